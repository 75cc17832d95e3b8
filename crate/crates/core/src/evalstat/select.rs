use super::ScoreRecord;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionReason {
    Variance,
    Random,
}

impl fmt::Display for SelectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionReason::Variance => "variance",
            SelectionReason::Random => "random",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectedItem {
    pub item_id: String,
    pub reason: SelectionReason,
}

/// Picks `n_total` items for labelling: the `ceil(top_fraction * n_total)`
/// items on which the min-max normalised metrics disagree most, then a
/// seeded stratified draw from the rest.
///
/// Variance ties are broken by item id. Stratum quotas follow the strata
/// proportions of the whole item set by largest remainder, capped by what
/// is left in each stratum after the variance picks.
pub fn select_labeling_subset(
    scores: &[ScoreRecord],
    n_total: usize,
    top_fraction: f64,
    strata: &BTreeMap<String, String>,
    seed: u64,
) -> Result<Vec<SelectedItem>> {
    if !(0.0..=1.0).contains(&top_fraction) {
        return Err(Error::InvalidParameter(format!("top fraction {top_fraction} outside [0, 1]")));
    }
    let mut table: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut items: BTreeSet<&str> = BTreeSet::new();
    for r in scores {
        items.insert(&r.item_id);
        if table.entry(&r.metric).or_default().insert(&r.item_id, r.value).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate score for item '{}' metric '{}'",
                r.item_id, r.metric
            )));
        }
    }
    if n_total > items.len() {
        return Err(Error::InvalidInput(format!(
            "cannot select {n_total} of {} items",
            items.len()
        )));
    }
    for (metric, values) in &table {
        if values.len() != items.len() {
            let missing = items.iter().find(|i| !values.contains_key(*i)).unwrap();
            return Err(Error::InvalidInput(format!("metric '{metric}' has no value for item '{missing}'")));
        }
    }
    for item in &items {
        if !strata.contains_key(*item) {
            return Err(Error::InvalidInput(format!("item '{item}' has no stratum")));
        }
    }

    // Normalised columns; infinities saturate at the finite extremes.
    let mut normalised: BTreeMap<&str, Vec<f64>> = items.iter().map(|i| (*i, Vec::new())).collect();
    for values in table.values() {
        let finite = values.values().copied().filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        for (item, v) in values {
            let v = if v.is_nan() || !lo.is_finite() {
                0.0
            } else {
                v.clamp(lo, hi)
            };
            let n = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
            normalised.get_mut(item).unwrap().push(n);
        }
    }
    let mut ranked: Vec<(&str, f64)> = normalised
        .iter()
        .map(|(item, v)| {
            let m = v.iter().sum::<f64>() / v.len().max(1) as f64;
            let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len().max(1) as f64;
            (*item, var)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let n_top = ((top_fraction * n_total as f64) - 1e-9).ceil().max(0.0) as usize;
    let n_top = n_top.min(n_total);
    let mut out: Vec<SelectedItem> = ranked[..n_top]
        .iter()
        .map(|(id, _)| SelectedItem {
            item_id: id.to_string(),
            reason: SelectionReason::Variance,
        })
        .collect();

    let mut pool: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut population: BTreeMap<&str, usize> = BTreeMap::new();
    for (id, _) in &ranked {
        *population.entry(strata[*id].as_str()).or_default() += 1;
    }
    for (id, _) in &ranked[n_top..] {
        pool.entry(strata[*id].as_str()).or_default().push(id);
    }
    let quotas = stratum_quotas(&population, &pool, n_total - n_top, items.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (stratum, members) in pool.iter_mut() {
        members.sort_unstable();
        members.shuffle(&mut rng);
        let q = quotas.get(stratum).copied().unwrap_or(0);
        out.extend(members[..q].iter().map(|id| SelectedItem {
            item_id: id.to_string(),
            reason: SelectionReason::Random,
        }));
    }
    Ok(out)
}

fn stratum_quotas<'a>(
    population: &BTreeMap<&'a str, usize>,
    pool: &BTreeMap<&'a str, Vec<&'a str>>,
    need: usize,
    total: usize,
) -> Result<BTreeMap<&'a str, usize>> {
    let available = |s: &str| pool.get(s).map_or(0, Vec::len);
    let mut quotas: BTreeMap<&str, usize> = BTreeMap::new();
    let mut remainders = Vec::new();
    for (s, &count) in population {
        let exact = need as f64 * count as f64 / total as f64;
        let base = (exact.floor() as usize).min(available(s));
        quotas.insert(s, base);
        remainders.push((*s, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut assigned: usize = quotas.values().sum();
    // Largest remainder first, then any stratum with spare items.
    let order: Vec<&str> = remainders.iter().map(|r| r.0).chain(population.keys().copied()).collect();
    for s in order {
        if assigned == need {
            break;
        }
        let q = quotas.get_mut(s).unwrap();
        if *q < available(s) {
            *q += 1;
            assigned += 1;
        }
    }
    while assigned < need {
        let spare = population.keys().find(|s| quotas[*s] < available(s));
        match spare {
            Some(s) => {
                *quotas.get_mut(s).unwrap() += 1;
                assigned += 1;
            }
            None => {
                return Err(Error::InvalidInput(format!(
                    "strata cannot supply {need} random items"
                )))
            }
        }
    }
    Ok(quotas)
}
