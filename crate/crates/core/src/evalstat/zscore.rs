use super::{Anatomy, Criterion, Task, VoteRecord};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Standardised subjective scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ZScoreTable {
    /// Mean over raters of the rescaled score, in [0, 100], per
    /// `(item, criterion)`.
    pub item_scores: BTreeMap<(String, Criterion), f64>,
    /// Population mean and standard deviation per `(rater, criterion)`.
    pub rater_stats: BTreeMap<(String, Criterion), (f64, f64)>,
    /// Standardised score per `(rater, criterion, item)` before rescaling.
    pub z: BTreeMap<(String, Criterion, String), f64>,
    pub item_info: BTreeMap<String, (Task, Anatomy)>,
}

/// Z-scores each rater's votes per criterion (population deviation), maps
/// them linearly so that rater's lowest becomes 0 and highest 100, and
/// averages over the raters who scored each item.
pub fn zscore_transform(votes: &[VoteRecord]) -> Result<ZScoreTable> {
    let mut groups: BTreeMap<(String, Criterion), BTreeMap<String, f64>> = BTreeMap::new();
    let mut item_info: BTreeMap<String, (Task, Anatomy)> = BTreeMap::new();
    for v in votes {
        let info = (v.task, v.anatomy);
        if *item_info.entry(v.item_id.clone()).or_insert(info) != info {
            return Err(Error::InvalidInput(format!(
                "item '{}' has conflicting task/anatomy labels",
                v.item_id
            )));
        }
        let group = groups.entry((v.rater_id.clone(), v.criterion)).or_default();
        if group.insert(v.item_id.clone(), v.score as f64).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate vote by rater '{}' on item '{}' ({})",
                v.rater_id, v.item_id, v.criterion
            )));
        }
    }

    let mut rater_stats = BTreeMap::new();
    let mut z = BTreeMap::new();
    let mut sums: BTreeMap<(String, Criterion), (f64, usize)> = BTreeMap::new();
    for ((rater, criterion), scores) in &groups {
        let n = scores.len() as f64;
        let mu = scores.values().sum::<f64>() / n;
        let sigma = (scores.values().map(|s| (s - mu) * (s - mu)).sum::<f64>() / n).sqrt();
        if sigma == 0.0 {
            return Err(Error::InvalidInput(format!(
                "rater '{rater}' gave a single score value for criterion {criterion}; z-score undefined"
            )));
        }
        rater_stats.insert((rater.clone(), *criterion), (mu, sigma));
        let zs: Vec<(&String, f64)> = scores.iter().map(|(item, s)| (item, (s - mu) / sigma)).collect();
        let (lo, hi) = zs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (_, v)| (l.min(*v), h.max(*v)));
        for (item, zv) in zs {
            z.insert((rater.clone(), *criterion, item.clone()), zv);
            let e = sums.entry((item.clone(), *criterion)).or_insert((0.0, 0));
            e.0 += 100.0 * (zv - lo) / (hi - lo);
            e.1 += 1;
        }
    }

    let mut per_criterion_raters: BTreeMap<Criterion, usize> = BTreeMap::new();
    for (_, c) in groups.keys() {
        *per_criterion_raters.entry(*c).or_default() += 1;
    }
    let partial = sums.iter().filter(|((_, c), (_, k))| *k < per_criterion_raters[c]).count();
    if partial > 0 {
        log::warn!("{partial} item/criterion cells lack votes from some raters; averaging available ones");
    }
    let item_scores = sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect();
    Ok(ZScoreTable {
        item_scores,
        rater_stats,
        z,
        item_info,
    })
}
