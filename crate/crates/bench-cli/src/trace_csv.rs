//! Trace CSV: one header row, one row per time index.
//!
//! Columns: `k`, `x_0..x_{n−1}`, `y_0..y_{n−1}`, `err_norm_e`, `eps_k`,
//! `eps_gap`, `f_xk`, `track_err`, `run_avg`, `regret`, then one `rhs_<bound>`
//! column per evaluated bound. Floats carry 17 significant digits; a cell is
//! empty where the value is undefined (no reference path, or a bound whose
//! range starts later).

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use tvprox::analysis::{BoundReport, TrackingSeries};
use tvprox::StepRecord;

use crate::BenchError;

/// Bumped whenever the column layout changes.
pub const TRACE_SCHEMA_VERSION: u32 = 1;

const FIXED_TAIL: [&str; 7] = ["err_norm_e", "eps_k", "eps_gap", "f_xk", "track_err", "run_avg", "regret"];

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub record: StepRecord,
    pub track_err: Option<f64>,
    pub run_avg: Option<f64>,
    pub regret: Option<f64>,
    /// Aligned with [`TraceTable::bound_names`].
    pub rhs: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub dimension: usize,
    pub bound_names: Vec<String>,
    pub rows: Vec<TraceRow>,
}

/// Derived per-step series attached to the records.
#[derive(Clone, Copy, Debug, Default)]
pub struct Derived<'a> {
    pub tracking: Option<&'a TrackingSeries<f64>>,
    pub regret: Option<&'a [f64]>,
    pub bounds: Option<&'a BoundReport<f64>>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl TraceTable {
    pub fn from_records(records: &[StepRecord], derived: Derived<'_>) -> Self {
        let dimension = records.first().map_or(0, |r| r.x.len());
        let applicable: Vec<_> = derived
            .bounds
            .map(|b| b.bounds.iter().filter(|s| s.applicable).collect())
            .unwrap_or_default();
        let bound_names = applicable.iter().map(|s| s.kind.name().to_owned()).collect();
        let rows = records
            .iter()
            .enumerate()
            .map(|(i, rec)| TraceRow {
                record: rec.clone(),
                track_err: derived.tracking.and_then(|t| t.error.get(i).copied()),
                run_avg: derived.tracking.and_then(|t| t.running_average.get(i).copied()),
                regret: derived.regret.and_then(|r| r.get(i).copied()),
                rhs: applicable
                    .iter()
                    .map(|s| {
                        (rec.k)
                            .checked_sub(s.k_start)
                            .and_then(|j| s.rhs.get(j).copied())
                    })
                    .collect(),
            })
            .collect();
        Self {
            dimension,
            bound_names,
            rows,
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["k".to_owned()];
        h.extend((0..self.dimension).map(|i| format!("x_{i}")));
        h.extend((0..self.dimension).map(|i| format!("y_{i}")));
        h.extend(FIXED_TAIL.iter().map(|s| s.to_string()));
        h.extend(self.bound_names.iter().map(|b| format!("rhs_{b}")));
        h
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let err = |e: csv::Error| BenchError::Trace(e.to_string());
        w.write_record(self.header()).map_err(err)?;
        for row in &self.rows {
            let r = &row.record;
            let mut cells = vec![r.k.to_string()];
            cells.extend(r.x.iter().map(|&v| fmt_f64(v)));
            cells.extend(r.y.iter().map(|&v| fmt_f64(v)));
            cells.extend([r.error_norm, r.eps, r.eps_gap, r.objective].map(fmt_f64));
            cells.extend([row.track_err, row.run_avg, row.regret].map(fmt_opt));
            cells.extend(row.rhs.iter().map(|&v| fmt_opt(v)));
            w.write_record(&cells).map_err(err)?;
        }
        w.flush().map_err(|e| BenchError::Trace(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn write_file(&self, path: &Path) -> Result<(), BenchError> {
        let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
        self.write(std::io::BufWriter::new(file))
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = rd
            .headers()
            .map_err(|e| BenchError::Trace(e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let dimension = header.iter().filter(|h| h.starts_with("x_")).count();
        let tail_at = 1 + 2 * dimension;
        let expected: Vec<String> = std::iter::once("k".to_owned())
            .chain((0..dimension).map(|i| format!("x_{i}")))
            .chain((0..dimension).map(|i| format!("y_{i}")))
            .chain(FIXED_TAIL.iter().map(|s| s.to_string()))
            .collect();
        if header.len() < expected.len() || header[..expected.len()] != expected[..] {
            return Err(BenchError::Trace(format!("unexpected header {header:?}")));
        }
        let bound_names = header[expected.len()..]
            .iter()
            .map(|h| {
                h.strip_prefix("rhs_")
                    .map(str::to_owned)
                    .ok_or_else(|| BenchError::Trace(format!("unexpected column {h:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| BenchError::Trace(e.to_string()))?;
            let bad = |what: &str| BenchError::Trace(format!("data row {}: {what}", line + 1));
            if rec.len() != header.len() {
                return Err(bad("wrong number of cells"));
            }
            let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(&format!("bad number {:?}", &rec[i])));
            let opt = |i: usize| {
                if rec[i].is_empty() {
                    Ok(None)
                } else {
                    num(i).map(Some)
                }
            };
            let k = rec[0].parse::<usize>().map_err(|_| bad("bad index"))?;
            let x = (1..=dimension).map(num).collect::<Result<Vec<_>, _>>()?;
            let y = (1 + dimension..tail_at).map(num).collect::<Result<Vec<_>, _>>()?;
            let record = StepRecord {
                k,
                x,
                y,
                error_norm: num(tail_at)?,
                eps: num(tail_at + 1)?,
                eps_gap: num(tail_at + 2)?,
                objective: num(tail_at + 3)?,
                wall_time: Duration::ZERO,
            };
            rows.push(TraceRow {
                record,
                track_err: opt(tail_at + 4)?,
                run_avg: opt(tail_at + 5)?,
                regret: opt(tail_at + 6)?,
                rhs: (expected.len()..header.len()).map(opt).collect::<Result<Vec<_>, _>>()?,
            });
        }
        Ok(Self {
            dimension,
            bound_names,
            rows,
        })
    }

    pub fn read_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn records(&self) -> Vec<StepRecord> {
        self.rows.iter().map(|r| r.record.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize) -> StepRecord {
        StepRecord {
            k,
            x: vec![0.1 * k as f64, -1.0 / 3.0],
            y: vec![std::f64::consts::PI, 1e-300],
            error_norm: 0.2,
            eps: 0.0,
            eps_gap: 1.0 / 7.0,
            objective: f64::INFINITY,
            wall_time: Duration::from_millis(3),
        }
    }

    #[test]
    fn header_layout() {
        let t = TraceTable::from_records(&[rec(1)], Derived::default());
        assert_eq!(
            t.header().join(","),
            "k,x_0,x_1,y_0,y_1,err_norm_e,eps_k,eps_gap,f_xk,track_err,run_avg,regret"
        );
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn round_trip_with_empty_cells() {
        let mut t = TraceTable::from_records(&[rec(1), rec(2)], Derived::default());
        t.bound_names = vec!["asymptotic_tracking".into()];
        t.rows[0].rhs = vec![None];
        t.rows[1].rhs = vec![Some(2.5)];
        t.rows[1].regret = Some(-0.0);
        let text = t.to_csv_string();
        assert_eq!(text.lines().count(), 3);
        let back = TraceTable::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn rejects_foreign_columns() {
        assert!(TraceTable::parse("k,x_0,y_0,foo\n").is_err());
    }
}
