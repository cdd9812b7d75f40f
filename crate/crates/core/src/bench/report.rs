use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 15] = [
    "instance",
    "objective",
    "n",
    "k",
    "eps",
    "mode",
    "seed",
    "algorithm",
    "value",
    "opt_value",
    "ratio",
    "queries",
    "rounds",
    "failed",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub objective: String,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub mode: String,
    pub seed: u64,
    pub algorithm: String,
    pub value: f64,
    pub opt_value: Option<f64>,
    pub ratio: Option<f64>,
    pub queries: u64,
    pub rounds: u64,
    pub failed: bool,
    pub wall_ms: f64,
}

/// `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    fn trim(s: &str) -> &str {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.')
        } else {
            s
        }
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

fn record(row: &ReportRow) -> [String; 15] {
    let opt = |x: Option<f64>| x.map(format_g17).unwrap_or_default();
    [
        row.instance.clone(),
        row.objective.clone(),
        row.n.to_string(),
        row.k.to_string(),
        format_g17(row.eps),
        row.mode.clone(),
        row.seed.to_string(),
        row.algorithm.clone(),
        format_g17(row.value),
        opt(row.opt_value),
        opt(row.ratio),
        row.queries.to_string(),
        row.rounds.to_string(),
        row.failed.to_string(),
        format_g17(row.wall_ms),
    ]
}

pub fn csv_string(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(record(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    std::fs::write(path, csv_string(rows)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, "unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        let field = |j: usize| &rec[j];
        fn num<T: std::str::FromStr>(line: usize, name: &str, raw: &str) -> Result<T> {
            raw.parse()
                .map_err(|_| Error::parse(line, format!("column {name}: `{raw}` is not a number")))
        }
        let opt = |j: usize| -> Result<Option<f64>> {
            match field(j) {
                "" => Ok(None),
                raw => num(line, CSV_HEADER[j], raw).map(Some),
            }
        };
        rows.push(ReportRow {
            instance: field(0).to_string(),
            objective: field(1).to_string(),
            n: num(line, "n", field(2))?,
            k: num(line, "k", field(3))?,
            eps: num(line, "eps", field(4))?,
            mode: field(5).to_string(),
            seed: num(line, "seed", field(6))?,
            algorithm: field(7).to_string(),
            value: num(line, "value", field(8))?,
            opt_value: opt(9)?,
            ratio: opt(10)?,
            queries: num(line, "queries", field(11))?,
            rounds: num(line, "rounds", field(12))?,
            failed: num(line, "failed", field(13))?,
            wall_ms: num(line, "wall_ms", field(14))?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn write_json(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, rows).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Mean of `value(row)` per `(key(row), algorithm)`, one line per key.
fn grouped_table(
    rows: &[ReportRow],
    key_name: &str,
    key: impl Fn(&ReportRow) -> f64,
    value: impl Fn(&ReportRow) -> Option<f64>,
) -> String {
    let algorithms: BTreeSet<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    let mut cells: BTreeMap<u64, BTreeMap<&str, (f64, usize)>> = BTreeMap::new();
    let mut keys = BTreeMap::new();
    for r in rows {
        let k = key(r);
        // Nonnegative floats order the same way as their bit patterns.
        let slot = cells.entry(k.to_bits()).or_default();
        keys.insert(k.to_bits(), k);
        if let Some(v) = value(r) {
            let cell = slot.entry(r.algorithm.as_str()).or_insert((0.0, 0));
            cell.0 += v;
            cell.1 += 1;
        }
    }
    let mut out = format!("# {key_name}");
    for a in &algorithms {
        out.push(' ');
        out.push_str(a);
    }
    out.push('\n');
    for (bits, slot) in &cells {
        out.push_str(&format_g17(keys[bits]));
        for a in &algorithms {
            out.push(' ');
            match slot.get(a) {
                Some((sum, count)) => out.push_str(&format_g17(sum / *count as f64)),
                None => out.push_str("nan"),
            }
        }
        out.push('\n');
    }
    out
}

/// Mean rounds per `n`, one column per algorithm.
pub fn rounds_vs_n(rows: &[ReportRow]) -> String {
    grouped_table(rows, "n", |r| r.n as f64, |r| Some(r.rounds as f64))
}

/// Mean ratio per `eps`, one column per algorithm; `nan` where no ratio.
pub fn ratio_vs_eps(rows: &[ReportRow]) -> String {
    grouped_table(rows, "eps", |r| r.eps, |r| r.ratio)
}

pub fn emit_report(rows: &[ReportRow], csv: Option<&Path>, json: Option<&Path>, plotdata: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Contract("emit_report called with no rows".into()));
    }
    if let Some(path) = csv {
        write_csv(path, rows)?;
    }
    if let Some(path) = json {
        write_json(path, rows)?;
    }
    if let Some(dir) = plotdata {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [("rounds_vs_n.dat", rounds_vs_n(rows)), ("ratio_vs_eps.dat", ratio_vs_eps(rows))] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
