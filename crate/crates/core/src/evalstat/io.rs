use super::report::CorrelationReport;
use super::{Criterion, VoteRecord};
use crate::{Error, Result};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// One metric value of one item. Non-finite values (PSNR of identical
/// images) are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRecord {
    pub item_id: String,
    pub metric: String,
    pub value: f64,
}

/// A rater's two scores of the same item and criterion from separate
/// sessions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaPair {
    pub rater_id: String,
    pub item_id: String,
    pub criterion: Criterion,
    pub first: u8,
    pub second: u8,
}

/// Header-keyed CSV rows with 1-based line numbers for messages.
struct Table {
    what: &'static str,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(path: &Path, what: &'static str, required: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => Error::format(what, format!("{other:?}")),
            })?;
        let headers = reader
            .headers()
            .map_err(|e| Error::format(what, e.to_string()))?
            .clone();
        let columns: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(Error::format(what, format!("missing column '{col}'")));
            }
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::format(what, e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        Ok(Self { what, columns, rows })
    }

    fn get<'a>(&self, rec: &'a csv::StringRecord, col: &str) -> &'a str {
        rec.get(self.columns[col]).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, line: u64, rec: &csv::StringRecord, col: &str) -> Result<T> {
        let raw = self.get(rec, col);
        raw.parse::<T>()
            .map_err(|_| Error::format(self.what, format!("line {line}: invalid {col} '{raw}'")))
    }
}

/// Votes CSV: `item_id,rater_id,criterion,task,anatomy,score`.
pub fn load_votes(path: impl AsRef<Path>) -> Result<Vec<VoteRecord>> {
    let t = Table::read(
        path.as_ref(),
        "votes csv",
        &["item_id", "rater_id", "criterion", "task", "anatomy", "score"],
    )?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let score: u8 = t.parse(*line, rec, "score")?;
        let vote = VoteRecord::new(
            t.get(rec, "item_id"),
            t.get(rec, "rater_id"),
            t.parse(*line, rec, "criterion")?,
            t.parse(*line, rec, "task")?,
            t.parse(*line, rec, "anatomy")?,
            score,
        )
        .map_err(|e| Error::format("votes csv", format!("line {line}: {e}")))?;
        out.push(vote);
    }
    Ok(out)
}

/// Scores CSV: `item_id,metric,value`; further columns are ignored and rows
/// with an empty value (failed computations) are skipped with a warning.
pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>> {
    let t = Table::read(path.as_ref(), "scores csv", &["item_id", "metric", "value"])?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        if t.get(rec, "value").is_empty() {
            log::warn!("scores csv line {line}: no value, skipped");
            continue;
        }
        out.push(ScoreRecord {
            item_id: t.get(rec, "item_id").to_string(),
            metric: t.get(rec, "metric").to_string(),
            value: t.parse(*line, rec, "value")?,
        });
    }
    Ok(out)
}

/// Relabel CSV: `rater_id,item_id,criterion,first,second`.
pub fn load_kappa_pairs(path: impl AsRef<Path>) -> Result<Vec<KappaPair>> {
    let t = Table::read(
        path.as_ref(),
        "kappa csv",
        &["rater_id", "item_id", "criterion", "first", "second"],
    )?;
    t.rows
        .iter()
        .map(|(line, rec)| {
            Ok(KappaPair {
                rater_id: t.get(rec, "rater_id").to_string(),
                item_id: t.get(rec, "item_id").to_string(),
                criterion: t.parse(*line, rec, "criterion")?,
                first: t.parse(*line, rec, "first")?,
                second: t.parse(*line, rec, "second")?,
            })
        })
        .collect()
}

/// Fixed six-decimal rendering; non-finite values print as `inf`, `-inf`
/// or `nan`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

/// Report CSV: `metric,criterion,task,anatomy,n,srcc,krcc,plcc` in ranking
/// order.
pub fn write_report_csv(report: &CorrelationReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::InvalidInput(format!("writing report: {e}"));
    w.write_record(["metric", "criterion", "task", "anatomy", "n", "srcc", "krcc", "plcc"])
        .map_err(io_err)?;
    for r in &report.rows {
        w.write_record([
            r.metric.clone(),
            r.criterion.to_string(),
            r.task.to_string(),
            r.anatomy.to_string(),
            r.n.to_string(),
            format_value(r.srcc),
            format_value(r.krcc),
            format_value(r.plcc),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("writing report: {e}")))
}
