//! Full-reference metrics on image pairs, DISTS over supplied feature
//! stacks and BRISQUE feature extraction.
//!
//! Every pair metric divides both images by the pair's data range first;
//! constants quoted on a 0–255 scale are applied after multiplying back by
//! 255, which is the same as rescaling the constant.

mod brisque;
mod dists;
mod dss;
mod gmsd;
mod haarpsi;
mod mdsi;
mod psnr;
mod ssim;
mod vifp;
mod vsi;

pub use brisque::{brisque_features, brisque_score, BrisqueFeatures, BrisqueModel};
pub use dists::{dists, FeatureMap, FeatureStack};
pub use dss::{dss, dss_with, DssParams};
pub use gmsd::{gmsd, gmsd_with, ms_gmsd, ms_gmsd_with, MsGmsdParams, GMSD_C};
pub use haarpsi::{haarpsi, haarpsi_with, HaarPsiParams};
pub use mdsi::{mdsi, mdsi_with, MdsiParams};
pub use psnr::psnr;
pub use ssim::{ms_ssim, ms_ssim_with, ssim, ssim_components, ssim_with, SsimParams, MS_SSIM_WEIGHTS};
pub use vifp::{vifp, vifp_with, VifpParams};
pub use vsi::{sdsp_saliency, vsi, vsi_with, VsiParams};

use crate::{Error, ImagePair, Result};
use std::fmt;
use std::str::FromStr;

/// Every metric the toolkit knows by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Psnr,
    Ssim,
    MsSsim,
    Gmsd,
    MsGmsd,
    Haarpsi,
    Mdsi,
    Vsi,
    Vifp,
    Dss,
    Dists,
    Fid,
    Kid,
    Msid,
    Is,
    Brisque,
}

impl MetricId {
    pub const ALL: [MetricId; 16] = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::MsSsim,
        MetricId::Gmsd,
        MetricId::MsGmsd,
        MetricId::Haarpsi,
        MetricId::Mdsi,
        MetricId::Vsi,
        MetricId::Vifp,
        MetricId::Dss,
        MetricId::Dists,
        MetricId::Fid,
        MetricId::Kid,
        MetricId::Msid,
        MetricId::Is,
        MetricId::Brisque,
    ];

    /// Metrics computable from an image pair alone.
    pub const IMAGE_PAIR: [MetricId; 13] = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::MsSsim,
        MetricId::Gmsd,
        MetricId::MsGmsd,
        MetricId::Haarpsi,
        MetricId::Mdsi,
        MetricId::Vsi,
        MetricId::Vifp,
        MetricId::Dss,
        MetricId::Fid,
        MetricId::Kid,
        MetricId::Msid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Psnr => "psnr",
            MetricId::Ssim => "ssim",
            MetricId::MsSsim => "ms_ssim",
            MetricId::Gmsd => "gmsd",
            MetricId::MsGmsd => "ms_gmsd",
            MetricId::Haarpsi => "haarpsi",
            MetricId::Mdsi => "mdsi",
            MetricId::Vsi => "vsi",
            MetricId::Vifp => "vifp",
            MetricId::Dss => "dss",
            MetricId::Dists => "dists",
            MetricId::Fid => "fid",
            MetricId::Kid => "kid",
            MetricId::Msid => "msid",
            MetricId::Is => "is",
            MetricId::Brisque => "brisque",
        }
    }

    /// Orientation of the scale: `true` when larger values mean better
    /// quality.
    pub fn higher_better(self) -> bool {
        matches!(
            self,
            MetricId::Psnr
                | MetricId::Ssim
                | MetricId::MsSsim
                | MetricId::Haarpsi
                | MetricId::Vsi
                | MetricId::Vifp
                | MetricId::Dss
                | MetricId::Is
        )
    }

    pub fn is_distribution_based(self) -> bool {
        matches!(self, MetricId::Fid | MetricId::Kid | MetricId::Msid)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric '{s}'")))
    }
}

/// One metric evaluation. PSNR of identical images is `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricScore {
    pub metric: MetricId,
    pub value: f64,
}

impl MetricScore {
    pub fn new(metric: MetricId, value: f64) -> Self {
        Self { metric, value }
    }

    pub fn higher_better(&self) -> bool {
        self.metric.higher_better()
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Evaluates a full-reference metric with its default parameters.
pub fn compute_pair_metric(metric: MetricId, pair: &ImagePair) -> Result<MetricScore> {
    match metric {
        MetricId::Psnr => psnr(pair),
        MetricId::Ssim => ssim(pair),
        MetricId::MsSsim => ms_ssim(pair),
        MetricId::Gmsd => gmsd(pair),
        MetricId::MsGmsd => ms_gmsd(pair),
        MetricId::Haarpsi => haarpsi(pair),
        MetricId::Mdsi => mdsi(pair),
        MetricId::Vsi => vsi(pair),
        MetricId::Vifp => vifp(pair),
        MetricId::Dss => dss(pair),
        other => Err(Error::InvalidParameter(format!(
            "{other} is not a full-reference image metric"
        ))),
    }
}

pub(crate) fn require_side(pair: &ImagePair, what: &'static str, need: usize) -> Result<()> {
    let got = pair.width().min(pair.height());
    if got < need {
        return Err(Error::TooSmall { what, got, need });
    }
    Ok(())
}

/// `(2ab + c) / (a² + b² + c)`, the similarity form shared by most metrics.
#[inline]
pub(crate) fn similarity(a: f64, b: f64, c: f64) -> f64 {
    (2.0 * a * b + c) / (a * a + b * b + c)
}
