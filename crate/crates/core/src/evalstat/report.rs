use super::{fit_logistic, krcc, srcc, zscore_transform, Anatomy, Criterion, KendallVariant, ScoreRecord, Task, VoteRecord};
use crate::frmetrics::MetricId;
use crate::Result;
use std::collections::BTreeMap;

/// Correlation of one metric with the standardised votes in one slice.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStats {
    pub metric: String,
    pub criterion: Criterion,
    pub task: Task,
    pub anatomy: Anatomy,
    pub n: usize,
    pub srcc: f64,
    pub krcc: f64,
    pub plcc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    /// Slices grouped by metric in ranking order.
    pub rows: Vec<SliceStats>,
    /// Metrics with their orientation-corrected mean SRCC, best first.
    pub ranking: Vec<(String, f64)>,
}

/// Lower-is-better metrics have their SRCC negated before ranking. Names
/// such as `fid_vgg16` inherit the orientation of their prefix; unknown
/// names count as higher-is-better.
fn higher_better(metric: &str) -> bool {
    if let Ok(m) = metric.parse::<MetricId>() {
        return m.higher_better();
    }
    MetricId::ALL
        .iter()
        .filter(|m| metric.starts_with(&format!("{}_", m.name())))
        .max_by_key(|m| m.name().len())
        .is_none_or(|m| m.higher_better())
}

/// Joins z-scored votes with metric values per (metric, criterion, task,
/// anatomy). Items with non-finite metric values are left out of their
/// slice; slices with fewer than three items are dropped.
pub fn correlation_report(votes: &[VoteRecord], scores: &[ScoreRecord]) -> Result<CorrelationReport> {
    let table = zscore_transform(votes)?;
    let mut by_metric: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for s in scores {
        by_metric.entry(&s.metric).or_default().insert(&s.item_id, s.value);
    }

    type Key = (Criterion, Task, Anatomy);
    let mut rows_by_metric: BTreeMap<&str, Vec<SliceStats>> = BTreeMap::new();
    for (metric, values) in &by_metric {
        let mut slices: BTreeMap<Key, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for ((item, criterion), z) in &table.item_scores {
            let Some(&v) = values.get(item.as_str()) else { continue };
            if !v.is_finite() {
                continue;
            }
            let (task, anatomy) = table.item_info[item];
            let e = slices.entry((*criterion, task, anatomy)).or_default();
            e.0.push(v);
            e.1.push(*z);
        }
        let rows = rows_by_metric.entry(metric).or_default();
        for ((criterion, task, anatomy), (x, y)) in slices {
            if x.len() < 3 {
                log::warn!("slice {metric}/{criterion}/{task}/{anatomy} has {} items, omitted", x.len());
                continue;
            }
            rows.push(SliceStats {
                metric: metric.to_string(),
                criterion,
                task,
                anatomy,
                n: x.len(),
                srcc: srcc(&x, &y).unwrap_or(f64::NAN),
                krcc: krcc(&x, &y, KendallVariant::TauA).unwrap_or(f64::NAN),
                plcc: fit_logistic(&x, &y)
                    .and_then(|f| super::pearson(&x.iter().map(|v| f.predict(*v)).collect::<Vec<_>>(), &y))
                    .unwrap_or(f64::NAN),
            });
        }
    }

    let mut ranking: Vec<(String, f64)> = rows_by_metric
        .iter()
        .map(|(metric, rows)| {
            let sign = if higher_better(metric) { 1.0 } else { -1.0 };
            let finite: Vec<f64> = rows.iter().map(|r| r.srcc).filter(|v| v.is_finite()).collect();
            let avg = if finite.is_empty() {
                f64::NAN
            } else {
                sign * finite.iter().sum::<f64>() / finite.len() as f64
            };
            (metric.to_string(), avg)
        })
        .collect();
    // NaN averages sort last.
    ranking.sort_by(|a, b| match (a.1.is_nan(), b.1.is_nan()) {
        (false, false) => b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)),
        (x, y) => x.cmp(&y).then_with(|| a.0.cmp(&b.0)),
    });
    let mut rows = Vec::new();
    for (metric, _) in &ranking {
        rows.extend(rows_by_metric.remove(metric.as_str()).unwrap_or_default());
    }
    Ok(CorrelationReport { rows, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Vec<VoteRecord>, Vec<ScoreRecord>) {
        let mut votes = Vec::new();
        let mut scores = Vec::new();
        for i in 0..8u8 {
            let item = format!("i{i}");
            for r in ["r1", "r2"] {
                votes.push(VoteRecord::new(&item, r, Criterion::Artifacts, Task::Accel, Anatomy::Brain, 1 + i / 2).unwrap());
            }
            for (m, v) in [("alpha", (i / 2) as f64), ("beta", -((i / 2) as f64))] {
                scores.push(ScoreRecord {
                    item_id: item.clone(),
                    metric: m.into(),
                    value: v,
                });
            }
        }
        (votes, scores)
    }

    #[test]
    fn monotone_and_antimonotone() {
        let (votes, scores) = fixture();
        let r = correlation_report(&votes, &scores).unwrap();
        assert_eq!(r.ranking[0].0, "alpha");
        assert_eq!(r.ranking[1].0, "beta");
        assert!((r.rows[0].srcc - 1.0).abs() < 1e-12);
        assert!((r.rows[1].srcc + 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_invariant() {
        let (mut votes, scores) = fixture();
        let a = correlation_report(&votes, &scores).unwrap();
        votes.reverse();
        assert_eq!(a, correlation_report(&votes, &scores).unwrap());
    }

    #[test]
    fn orientation() {
        assert!(higher_better("ssim"));
        assert!(!higher_better("fid"));
        assert!(!higher_better("fid_vgg16"));
        assert!(higher_better("ms_ssim"));
        assert!(!higher_better("ms_gmsd"));
        assert!(higher_better("custom"));
    }

    #[test]
    fn small_slices_dropped() {
        let (votes, scores) = fixture();
        let few: Vec<_> = scores.into_iter().filter(|s| s.item_id < "i2".to_string()).collect();
        assert!(correlation_report(&votes, &few).unwrap().rows.is_empty());
    }
}
