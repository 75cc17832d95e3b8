use crate::common::{all_metrics, parse_metric, CliError, CliResult, MetricContext, MetricOptions};
use mriqa::distmetrics::{db_score, inception_score, load_features, ProbabilitySet};
use mriqa::evalstat::format_value;
use mriqa::frmetrics::{dists, FeatureMap, FeatureStack, MetricId};
use std::io::Write;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// Metric name; repeatable.
    #[arg(long = "metric", value_name = "NAME")]
    metrics: Vec<String>,
    /// Every metric that needs no extra inputs.
    #[arg(long)]
    all: bool,
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Precomputed FS32 features replacing the tile features of the
    /// reference.
    #[arg(long)]
    features_ref: Option<PathBuf>,
    #[arg(long)]
    features_dist: Option<PathBuf>,
    /// Class probabilities (CSV, one row per image) for the Inception Score.
    #[arg(long)]
    probs: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    splits: usize,
    #[command(flatten)]
    opts: MetricOptions,
}

pub fn run(args: Args) -> CliResult<()> {
    let ctx = MetricContext::new(&args.opts)?;
    let mut metrics: Vec<MetricId> = args.metrics.iter().map(|m| parse_metric(m)).collect::<CliResult<_>>()?;
    if args.all {
        metrics.extend(all_metrics(ctx.brisque.is_some()));
    }
    if metrics.is_empty() {
        return Err(CliError::Usage("give --metric NAME or --all".into()));
    }
    let features = match (&args.features_ref, &args.features_dist) {
        (Some(a), Some(b)) => Some((load_features(a)?, load_features(b)?)),
        (None, None) => None,
        _ => return Err(CliError::Usage("--features-ref and --features-dist go together".into())),
    };
    let mut pair = None;
    let mut out = String::new();
    for metric in metrics {
        let value = match (metric, &features) {
            (MetricId::Is, _) => {
                let path = args.probs.as_ref().ok_or_else(|| CliError::Usage("is needs --probs".into()))?;
                inception_score(&ProbabilitySet::load_csv(path)?, args.splits)?.0
            }
            (MetricId::Fid | MetricId::Kid | MetricId::Msid, Some((a, b))) => db_score(metric, a, b, &ctx.db)?,
            (MetricId::Dists, Some((a, b))) => {
                let sa = FeatureStack::uniform(vec![FeatureMap::from_feature_set(a)?])?;
                let sb = FeatureStack::uniform(vec![FeatureMap::from_feature_set(b)?])?;
                dists(&sa, &sb)?.value
            }
            _ => {
                if pair.is_none() {
                    let (Some(r), Some(d)) = (&args.reference, &args.dist) else {
                        return Err(CliError::Usage(format!("{metric} needs --ref and --dist")));
                    };
                    pair = Some(ctx.load_pair(r, d)?);
                }
                ctx.evaluate(metric, pair.as_ref().unwrap())?
            }
        };
        out.push_str(&format!("{metric},{}\n", format_value(value)));
    }
    std::io::stdout()
        .write_all(out.as_bytes())
        .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}
