//! Subjective-versus-objective statistics: vote standardisation, rank
//! correlations, logistic-mapped PLCC, rater self-agreement and the
//! variance-driven choice of which items to send for labelling.

mod io;
mod kappa;
mod logistic;
mod rank;
mod report;
mod select;
mod zscore;

pub use io::{format_value, load_kappa_pairs, load_scores, load_votes, write_report_csv, KappaPair, ScoreRecord};
pub use kappa::{kappa_by_rater, weighted_kappa, KappaWeights};
pub use logistic::{fit_logistic, plcc, LogisticFit};
pub use rank::{krcc, pearson, srcc, KendallVariant};
pub use report::{correlation_report, CorrelationReport, SliceStats};
pub use select::{select_labeling_subset, SelectionReason, SelectedItem};
pub use zscore::{zscore_transform, ZScoreTable};

use crate::{Error, Result};
use std::fmt;
use std::str::FromStr;

macro_rules! label_enum {
    ($(#[$meta:meta])* $name:ident, $what:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::InvalidInput(format!(concat!("unknown ", $what, " '{}'"), s))),
                }
            }
        }
    };
}

label_enum!(
    /// Rated image property.
    Criterion, "criterion" { Snr => "snr", Cnr => "cnr", Artifacts => "artifacts" }
);
label_enum!(
    /// Degradation family that produced an item.
    Task, "task" { Accel => "accel", Motion => "motion", Noise => "noise" }
);
label_enum!(Anatomy, "anatomy" { Brain => "brain", Knee => "knee" });

/// One rater's score of one item on one criterion, on a 1–4 scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteRecord {
    pub item_id: String,
    pub rater_id: String,
    pub criterion: Criterion,
    pub task: Task,
    pub anatomy: Anatomy,
    pub score: u8,
}

impl VoteRecord {
    pub fn new(
        item_id: impl Into<String>,
        rater_id: impl Into<String>,
        criterion: Criterion,
        task: Task,
        anatomy: Anatomy,
        score: u8,
    ) -> Result<Self> {
        if !(1..=4).contains(&score) {
            return Err(Error::InvalidInput(format!("vote score {score} outside 1..4")));
        }
        Ok(Self {
            item_id: item_id.into(),
            rater_id: rater_id.into(),
            criterion,
            task,
            anatomy,
            score,
        })
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn check_lengths(x: &[f64], y: &[f64], need: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "sample lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < need {
        return Err(Error::TooSmall {
            what: "number of samples",
            got: x.len(),
            need,
        });
    }
    Ok(())
}
