//! Partitioned DIMACS reader and writer.
//!
//! The format is standard DIMACS CNF plus `c part <k>` comment lines:
//! partition k collects every clause up to the next marker. Markers must run
//! 1, 2, 3, ... consecutively; consecutive markers with no clauses between
//! them leave a partition empty (top). Clauses appearing before any marker
//! open partition 1 implicitly, so plain unpartitioned DIMACS parses as a
//! single-partition formula. The declared clause count is not enforced
//! (plenty of files in the wild get it wrong); variable bounds are.

use thiserror::Error;

use super::{Clause, Lit, PartitionedCnf, TautologyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Tautology {
        line: usize,
        #[source]
        source: TautologyError,
    },
    #[error("line {line}: variable {var} out of range (header declares {max})")]
    Range { line: usize, var: u32, max: u32 },
}

fn syntax(line: usize, msg: impl Into<String>) -> DimacsError {
    DimacsError::Syntax { line, msg: msg.into() }
}

pub fn parse_dimacs(input: &str) -> Result<PartitionedCnf, DimacsError> {
    let mut num_vars: Option<u32> = None;
    let mut partitions: Vec<Vec<Clause>> = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;

    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(syntax(line_no, "junk after `c`"));
            }
            let mut words = rest.split_whitespace();
            if words.next() == Some("part") {
                if num_vars.is_none() {
                    return Err(syntax(line_no, "partition marker before header"));
                }
                if !pending.is_empty() {
                    return Err(syntax(line_no, "partition marker inside a clause"));
                }
                let k: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax(line_no, "bad partition index"))?;
                if words.next().is_some() {
                    return Err(syntax(line_no, "trailing tokens after partition index"));
                }
                if k != partitions.len() + 1 {
                    return Err(syntax(
                        line_no,
                        format!("partition {k} out of order (expected {})", partitions.len() + 1),
                    ));
                }
                partitions.push(Vec::new());
            }
            continue;
        }
        if num_vars.is_none() {
            let mut words = line.split_whitespace();
            if words.next() != Some("p") || words.next() != Some("cnf") {
                return Err(syntax(line_no, "expected `p cnf <vars> <clauses>` header"));
            }
            let vars: u32 = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| syntax(line_no, "bad variable count"))?;
            let _clauses: u64 = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| syntax(line_no, "bad clause count"))?;
            if words.next().is_some() {
                return Err(syntax(line_no, "trailing tokens after header"));
            }
            num_vars = Some(vars);
            continue;
        }
        let max = num_vars.unwrap();
        for word in line.split_whitespace() {
            let code: i32 = word
                .parse()
                .map_err(|_| syntax(line_no, format!("bad literal `{word}`")))?;
            if code == 0 {
                if partitions.is_empty() {
                    partitions.push(Vec::new()); // implicit partition 1
                }
                let clause = Clause::new(std::mem::take(&mut pending))
                    .map_err(|source| DimacsError::Tautology { line: line_no, source })?;
                partitions.last_mut().unwrap().push(clause);
            } else {
                let var = code.unsigned_abs();
                if var > max {
                    return Err(DimacsError::Range { line: line_no, var, max });
                }
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.push(Lit::from_dimacs(code).unwrap());
            }
        }
    }

    if num_vars.is_none() {
        return Err(syntax(input.lines().count(), "missing `p cnf` header"));
    }
    if !pending.is_empty() {
        return Err(syntax(pending_line, "unterminated clause at end of input"));
    }
    if partitions.is_empty() {
        partitions.push(Vec::new());
    }
    Ok(PartitionedCnf::new(num_vars.unwrap(), partitions).expect("bounds already checked"))
}

pub fn write_dimacs(cnf: &PartitionedCnf) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", cnf.num_vars(), cnf.clause_count()));
    for k in 1..=cnf.num_partitions() {
        out.push_str(&format!("c part {k}\n"));
        for clause in cnf.partition(k) {
            out.push_str(&format!("{clause}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partitions_and_round_trips() {
        let text = "c a comment\np cnf 4 5\nc part 1\n1 -2 0\n3 0\nc part 2\n-1 -3 0\n2 0\nc part 3\n4 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_vars(), 4);
        assert_eq!(cnf.num_partitions(), 3);
        assert_eq!(cnf.partition(1).len(), 2);
        assert_eq!(cnf.partition(3), &[Clause::from_dimacs(&[4])]);
        let rt = parse_dimacs(&write_dimacs(&cnf)).unwrap();
        assert_eq!(rt, cnf);
    }

    #[test]
    fn empty_partition_is_top() {
        let cnf = parse_dimacs("p cnf 1 0\nc part 1\n").unwrap();
        assert_eq!(cnf.num_partitions(), 1);
        assert!(cnf.partition(1).is_empty());
        let cnf = parse_dimacs("p cnf 2 2\nc part 1\nc part 2\n1 0\n-1 0\n").unwrap();
        assert!(cnf.partition(1).is_empty());
        assert_eq!(cnf.partition(2).len(), 2);
    }

    #[test]
    fn plain_dimacs_goes_to_partition_one() {
        let cnf = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
        assert_eq!(cnf.num_partitions(), 1);
        assert_eq!(cnf.partition(1).len(), 2);
    }

    #[test]
    fn multiline_and_packed_clauses() {
        let cnf = parse_dimacs("p cnf 3 3\n1 2\n3 0 -1 0\n-2 -3 0\n").unwrap();
        assert_eq!(cnf.partition(1).len(), 3);
        assert_eq!(cnf.partition(1)[0], Clause::from_dimacs(&[1, 2, 3]));
    }

    #[test]
    fn tautology_is_rejected() {
        let err = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap_err();
        assert!(matches!(err, DimacsError::Tautology { line: 2, .. }));
    }

    #[test]
    fn out_of_range_var_is_rejected() {
        let err = parse_dimacs("p cnf 2 1\n1 -5 0\n").unwrap_err();
        assert!(matches!(err, DimacsError::Range { var: 5, max: 2, .. }));
    }

    #[test]
    fn out_of_order_partition_is_rejected() {
        let err = parse_dimacs("p cnf 2 1\nc part 1\nc part 3\n1 0\n").unwrap_err();
        assert!(matches!(err, DimacsError::Syntax { line: 3, .. }));
        // Reopening partition 1 after implicit clauses is also out of order.
        let err = parse_dimacs("p cnf 2 2\n1 0\nc part 1\n-1 0\n").unwrap_err();
        assert!(matches!(err, DimacsError::Syntax { line: 3, .. }));
    }

    #[test]
    fn unterminated_clause_is_rejected() {
        let err = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert!(matches!(err, DimacsError::Syntax { line: 2, .. }));
    }

    #[test]
    fn missing_header_is_rejected() {
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("").is_err());
    }
}
