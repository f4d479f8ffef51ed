//! S-expression reader and writer for interpolants.
//!
//! Grammar: `true | false | (var k) | (not (var k)) | (and e+) | (or e+)`.
//! The writer emits the canonical constructor form, so reading it back
//! reproduces the same interned node.

use thiserror::Error;

use super::expr::{BoolExpr, ExprKind};
use super::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("trailing input after expression: `{0}`")]
    TrailingInput(String),
    #[error("bad variable index `{0}`")]
    BadVarIndex(String),
}

pub fn to_sexpr(expr: &BoolExpr) -> String {
    enum Step {
        Emit(BoolExpr),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut stack = vec![Step::Emit(expr.clone())];
    while let Some(step) = stack.pop() {
        match step {
            Step::Text(t) => out.push_str(t),
            Step::Emit(e) => match e.kind() {
                ExprKind::True => out.push_str("true"),
                ExprKind::False => out.push_str("false"),
                ExprKind::Lit(l) => {
                    if l.is_positive() {
                        out.push_str(&format!("(var {})", l.var()));
                    } else {
                        out.push_str(&format!("(not (var {}))", l.var()));
                    }
                }
                ExprKind::And(cs) | ExprKind::Or(cs) => {
                    out.push('(');
                    out.push_str(if matches!(e.kind(), ExprKind::And(_)) { "and" } else { "or" });
                    stack.push(Step::Text(")"));
                    for c in cs.iter().rev() {
                        stack.push(Step::Emit(c.clone()));
                        stack.push(Step::Text(" "));
                    }
                }
            },
        }
    }
    out
}

fn tokenize(input: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in input.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

pub fn parse_sexpr(input: &str) -> Result<BoolExpr, SexprError> {
    let tokens = tokenize(input);
    let mut pos = 0;
    let expr = parse_expr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(SexprError::TrailingInput(tokens[pos..].join(" ")));
    }
    Ok(expr)
}

// Head frames for the operator stack: an open list with its operator and the
// children parsed so far.
struct Frame {
    op: String,
    children: Vec<BoolExpr>,
}

fn parse_expr(tokens: &[String], pos: &mut usize) -> Result<BoolExpr, SexprError> {
    let mut frames: Vec<Frame> = Vec::new();
    loop {
        let tok = tokens.get(*pos).ok_or(SexprError::UnexpectedEnd)?;
        *pos += 1;
        let completed: Option<BoolExpr> = match tok.as_str() {
            "true" => Some(BoolExpr::top()),
            "false" => Some(BoolExpr::bot()),
            "(" => {
                let op = tokens.get(*pos).ok_or(SexprError::UnexpectedEnd)?.clone();
                *pos += 1;
                match op.as_str() {
                    "var" => {
                        let idx = tokens.get(*pos).ok_or(SexprError::UnexpectedEnd)?;
                        *pos += 1;
                        let v: u32 = idx
                            .parse()
                            .ok()
                            .filter(|&v| v >= 1)
                            .ok_or_else(|| SexprError::BadVarIndex(idx.clone()))?;
                        expect(tokens, pos, ")")?;
                        Some(BoolExpr::var(Var::new(v)))
                    }
                    "and" | "or" | "not" => {
                        frames.push(Frame { op, children: Vec::new() });
                        None
                    }
                    other => return Err(SexprError::UnexpectedToken(other.to_string())),
                }
            }
            ")" => {
                let frame = frames.pop().ok_or_else(|| SexprError::UnexpectedToken(")".into()))?;
                Some(close_frame(frame)?)
            }
            other => return Err(SexprError::UnexpectedToken(other.to_string())),
        };
        if let Some(mut expr) = completed {
            // Feed the completed expression upward; an empty frame stack
            // means we are done.
            loop {
                match frames.last_mut() {
                    None => return Ok(expr),
                    Some(f) => {
                        f.children.push(expr);
                        // Peek: a `)` closes this frame immediately.
                        if tokens.get(*pos).map(String::as_str) == Some(")") {
                            *pos += 1;
                            let frame = frames.pop().unwrap();
                            expr = close_frame(frame)?;
                        } else {
                            break;
                        }
                    }
                }
            }
        }
    }
}

fn close_frame(frame: Frame) -> Result<BoolExpr, SexprError> {
    match frame.op.as_str() {
        "and" if !frame.children.is_empty() => Ok(BoolExpr::and(frame.children)),
        "or" if !frame.children.is_empty() => Ok(BoolExpr::or(frame.children)),
        "not" if frame.children.len() == 1 => {
            // `not` is only written over literals, but accept any argument
            // and normalize: the constructors keep the result in NNF.
            Ok(frame.children[0].negate())
        }
        op => Err(SexprError::UnexpectedToken(op.to_string())),
    }
}

fn expect(tokens: &[String], pos: &mut usize, want: &str) -> Result<(), SexprError> {
    let tok = tokens.get(*pos).ok_or(SexprError::UnexpectedEnd)?;
    if tok != want {
        return Err(SexprError::UnexpectedToken(tok.clone()));
    }
    *pos += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> BoolExpr {
        BoolExpr::var(Var::new(i))
    }

    #[test]
    fn writes_paper_shape() {
        // (p and r) or not q
        let e = BoolExpr::or2(BoolExpr::and2(v(1), v(3)), BoolExpr::not_var(Var::new(2)));
        assert_eq!(to_sexpr(&e), "(or (and (var 1) (var 3)) (not (var 2)))");
    }

    #[test]
    fn constants() {
        assert_eq!(to_sexpr(&BoolExpr::top()), "true");
        assert_eq!(parse_sexpr("false").unwrap(), BoolExpr::bot());
    }

    #[test]
    fn round_trip_is_identity() {
        let e = BoolExpr::and(vec![
            BoolExpr::or2(v(1), BoolExpr::not_var(Var::new(2))),
            v(3),
            BoolExpr::or(vec![v(1), v(4), BoolExpr::not_var(Var::new(5))]),
        ]);
        let printed = to_sexpr(&e);
        assert_eq!(parse_sexpr(&printed).unwrap(), e);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_sexpr("(xor (var 1) (var 2))").is_err());
        assert!(parse_sexpr("(var 0)").is_err());
        assert!(parse_sexpr("(and)").is_err());
        assert!(parse_sexpr("true false").is_err());
        assert!(parse_sexpr("(and (var 1)").is_err());
    }

    #[test]
    fn nested_not_normalizes() {
        let e = parse_sexpr("(not (and (var 1) (not (var 2))))").unwrap();
        assert_eq!(to_sexpr(&e), "(or (not (var 1)) (var 2))");
    }
}
