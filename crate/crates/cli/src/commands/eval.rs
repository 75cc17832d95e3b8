use crate::common::{csv_bytes, write_file, CliResult};
use mriqa::evalstat::{correlation_report, format_value, kappa_by_rater, load_kappa_pairs, load_scores, load_votes, write_report_csv, KappaWeights};
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    votes: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Label/relabel pairs for per-rater weighted kappa.
    #[arg(long)]
    kappa_pairs: Option<PathBuf>,
    /// Kappa output; defaults to `<out stem>_kappa.csv` beside the report.
    #[arg(long)]
    kappa_out: Option<PathBuf>,
    #[arg(long, default_value = "quadratic")]
    kappa_weights: String,
}

pub fn run(args: Args) -> CliResult<()> {
    let votes = load_votes(&args.votes)?;
    let scores = load_scores(&args.scores)?;
    let report = correlation_report(&votes, &scores)?;
    let mut buf = Vec::new();
    write_report_csv(&report, &mut buf)?;
    write_file(&args.out, &buf)?;
    for (metric, avg) in &report.ranking {
        log::info!("{metric}: mean srcc {}", format_value(*avg));
    }
    if let Some(path) = &args.kappa_pairs {
        let weights: KappaWeights = args.kappa_weights.parse()?;
        let kappas = kappa_by_rater(&load_kappa_pairs(path)?, weights, 4)?;
        let rows: Vec<Vec<String>> = kappas.iter().map(|(r, k)| vec![r.clone(), format_value(*k)]).collect();
        let out = args.kappa_out.clone().unwrap_or_else(|| {
            let stem = args.out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
            args.out.with_file_name(format!("{stem}_kappa.csv"))
        });
        write_file(&out, &csv_bytes(&["rater_id", "kappa"], &rows))?;
    }
    Ok(())
}
