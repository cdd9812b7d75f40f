//! Plain-text instance files.
//!
//! ```text
//! coverage <n_sets> <n_universe>
//! <weight>            # n_universe lines
//! <u> <u> ...         # n_sets lines, possibly empty
//!
//! facloc <n_items> <n_clients>
//! <s> <s> ...         # n_clients rows of n_items similarities
//! ```
//!
//! Lines whose first non-blank character is `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{CoverageInstance, FacilityLocationInstance, SubmodularInstance};
use crate::error::{Error, Result};

pub fn load_instance(path: impl AsRef<Path>) -> Result<SubmodularInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &SubmodularInstance) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, emit_instance(instance)).map_err(|e| Error::io(path, e))
}

pub fn emit_instance(instance: &SubmodularInstance) -> String {
    let mut out = String::new();
    match instance {
        SubmodularInstance::Coverage(c) => {
            let _ = writeln!(out, "coverage {} {}", c.n_sets(), c.n_universe());
            for w in c.weights() {
                let _ = writeln!(out, "{w:?}");
            }
            for i in 0..c.n_sets() {
                let line: Vec<String> = c.membership(i).map(|u| u.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        SubmodularInstance::FacilityLocation(f) => {
            let _ = writeln!(out, "facloc {} {}", f.n_items(), f.n_clients());
            for c in 0..f.n_clients() {
                let row: Vec<String> = (0..f.n_items()).map(|i| format!("{:?}", f.similarity(c, i))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-comment line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            if !line.trim_start().starts_with('#') {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn require(&mut self, section: &str, index: usize, expected: usize) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| {
            Error::parse(
                self.last + 1,
                format!("file ends inside the {section} section: expected {expected} lines, found {index}"),
            )
        })
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("`{token}` is not a valid {what}")))
}

pub fn parse_instance(text: &str) -> Result<SubmodularInstance> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (hline, header) = lines
        .next_line()
        .filter(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(1, "missing header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(hline, "header must be `<family> <size> <size>`"));
    }
    let a: usize = parse_num(hline, fields[1], "count")?;
    let b: usize = parse_num(hline, fields[2], "count")?;
    let instance = match fields[0] {
        "coverage" => {
            let (n_sets, n_universe) = (a, b);
            let mut weights = Vec::with_capacity(n_universe);
            for idx in 0..n_universe {
                let (ln, line) = lines.require("weights", idx, n_universe)?;
                let w: f64 = parse_num(ln, line.trim(), "weight")?;
                if w < 0.0 {
                    return Err(Error::InvalidInstance(format!("negative weight {w} at line {ln}")));
                }
                weights.push(w);
            }
            let mut membership = Vec::with_capacity(n_sets);
            for idx in 0..n_sets {
                let (ln, line) = lines.require("sets", idx, n_sets)?;
                let covered = line
                    .split_whitespace()
                    .map(|t| {
                        let u: usize = parse_num(ln, t, "universe index")?;
                        if u >= n_universe {
                            return Err(Error::parse(ln, format!("universe index {u} >= {n_universe}")));
                        }
                        Ok(u)
                    })
                    .collect::<Result<Vec<_>>>()?;
                membership.push(covered);
            }
            CoverageInstance::new(weights, membership)?.into()
        }
        "facloc" => {
            let (n_items, n_clients) = (a, b);
            let mut rows = Vec::with_capacity(n_clients);
            for idx in 0..n_clients {
                let (ln, line) = lines.require("similarity", idx, n_clients)?;
                let row = line
                    .split_whitespace()
                    .map(|t| parse_num::<f64>(ln, t, "similarity"))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != n_items {
                    return Err(Error::parse(ln, format!("expected {n_items} similarities, found {}", row.len())));
                }
                if let Some(s) = row.iter().find(|s| **s < 0.0) {
                    return Err(Error::InvalidInstance(format!("negative similarity {s} at line {ln}")));
                }
                rows.push(row);
            }
            FacilityLocationInstance::new(rows)?.into()
        }
        other => return Err(Error::parse(hline, format!("unknown instance family `{other}`"))),
    };
    while let Some((ln, line)) = lines.next_line() {
        if !line.trim().is_empty() {
            return Err(Error::parse(ln, "unexpected content after the last section"));
        }
    }
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementSet, SetFunction};
    use crate::objectives::{gen_random_coverage, gen_random_facility_location};
    use proptest::prelude::*;

    #[test]
    fn minimal_coverage_file() {
        let inst = parse_instance("coverage 1 1\n1.0\n0\n").unwrap();
        let SubmodularInstance::Coverage(c) = &inst else { panic!("wrong family") };
        assert_eq!((c.n_sets(), c.n_universe()), (1, 1));
        assert_eq!(c.weights(), &[1.0]);
        assert_eq!(c.membership(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn facility_file_matches_examples() {
        let inst = parse_instance("# two clients\nfacloc 2 2\n1 0\n0 1\n").unwrap();
        let s0 = ElementSet::from_indices(2, [0]).unwrap();
        assert_eq!(inst.value(&s0), 1.0);
        assert_eq!(inst.value(&ElementSet::full(2)), 2.0);
        assert_eq!(inst.kind(), "facloc");
    }

    #[test]
    fn empty_set_lines_and_comments() {
        let inst = parse_instance("coverage 3 2\n# weights\n0.5\n2\n0 1\n\n1\n").unwrap();
        let SubmodularInstance::Coverage(c) = &inst else { panic!("wrong family") };
        assert_eq!(c.membership(1).count(), 0);
        assert_eq!(c.membership(2).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn truncated_file_names_missing_section() {
        let err = parse_instance("coverage 2 3\n1.0\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("weights"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_instance("coverage 2 1\n1.0\n0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref message, .. } if message.contains("sets")));
        let err = parse_instance("facloc 2 2\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref message, .. } if message.contains("similarity")));
    }

    #[test]
    fn negative_weight_is_invalid_instance() {
        let err = parse_instance("coverage 1 1\n-1.0\n0\n").unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
        let err = parse_instance("facloc 1 1\n-0.1\n").unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        assert!(matches!(parse_instance(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("coverage 1 1\nabc\n0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("coverage 1 1\n1\n5\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_instance("facloc 2 1\n1 2 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("coverage 1 1\n1\n0\nextra\n"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_instance("matroid 1 1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn file_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.txt");
        let inst: SubmodularInstance = gen_random_facility_location(4, 3, 9).unwrap().into();
        write_instance(&path, &inst).unwrap();
        assert_eq!(load_instance(&path).unwrap(), inst);
        assert!(matches!(load_instance(dir.path().join("missing")), Err(Error::Io { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn emit_parse_round_trip(seed in any::<u64>(), n in 1usize..15, u in 1usize..20, facloc in any::<bool>()) {
            let inst: SubmodularInstance = if facloc {
                gen_random_facility_location(n, u, seed).unwrap().into()
            } else {
                gen_random_coverage(n, u, 0.3, 5.0, seed).unwrap().into()
            };
            let text = emit_instance(&inst);
            let parsed = parse_instance(&text).unwrap();
            prop_assert_eq!(&parsed, &inst);
            prop_assert_eq!(emit_instance(&parsed), text);
        }
    }
}
