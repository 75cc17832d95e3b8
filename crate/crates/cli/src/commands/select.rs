use crate::common::{csv_bytes, write_file, CliError, CliResult, CsvTable};
use mriqa::evalstat::{load_scores, select_labeling_subset};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// Scores CSV (`item_id,metric,value` plus the strata column).
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.25)]
    top_fraction: f64,
    #[arg(long, default_value = "task")]
    strata_col: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> CliResult<()> {
    let scores = load_scores(&args.scores)?;
    let table = CsvTable::read(&args.scores)?;
    let id_col = table.require("item_id", &args.scores)?;
    let strata_col = table.require(&args.strata_col, &args.scores)?;
    let mut strata: BTreeMap<String, String> = BTreeMap::new();
    for row in &table.rows {
        let id = row.get(id_col).unwrap_or("").to_string();
        let s = row.get(strata_col).unwrap_or("").to_string();
        if let Some(prev) = strata.insert(id.clone(), s.clone()) {
            if prev != s {
                return Err(CliError::Usage(format!("item '{id}' has strata '{prev}' and '{s}'")));
            }
        }
    }
    let picked = select_labeling_subset(&scores, args.n, args.top_fraction, &strata, args.seed)?;
    let rows: Vec<Vec<String>> = picked.iter().map(|p| vec![p.item_id.clone(), p.reason.to_string()]).collect();
    let bytes = csv_bytes(&["item_id", "reason"], &rows);
    match &args.out {
        Some(p) => write_file(p, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Write { path: "<stdout>".into(), source }),
    }
}
