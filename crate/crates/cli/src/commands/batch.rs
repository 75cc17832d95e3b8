use crate::common::{csv_bytes, parse_metric_list, thread_pool, write_file, CliError, CliResult, CsvTable, MetricContext, MetricOptions};
use mriqa::evalstat::format_value;
use rayon::prelude::*;
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(clap::Args)]
pub struct Args {
    /// CSV with `item_id,ref_path,dist_path,task,anatomy`; relative paths
    /// are resolved against the manifest's directory.
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated metric names, or `all`.
    #[arg(long, default_value = "all")]
    metrics: String,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to IQM_THREADS or the core count.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    opts: MetricOptions,
}

struct Entry {
    item_id: String,
    reference: PathBuf,
    distorted: PathBuf,
    task: String,
    anatomy: String,
}

fn read_manifest(path: &Path) -> CliResult<Vec<Entry>> {
    let t = CsvTable::read(path)?;
    let cols: Vec<usize> = ["item_id", "ref_path", "dist_path", "task", "anatomy"]
        .iter()
        .map(|c| t.require(c, path))
        .collect::<CliResult<_>>()?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(t.rows.len());
    for row in &t.rows {
        let get = |i: usize| row.get(cols[i]).unwrap_or("").to_string();
        let item_id = get(0);
        if !seen.insert(item_id.clone()) {
            return Err(CliError::Usage(format!("{}: duplicate item_id '{item_id}'", path.display())));
        }
        out.push(Entry {
            item_id,
            reference: base.join(get(1)),
            distorted: base.join(get(2)),
            task: get(3),
            anatomy: get(4),
        });
    }
    Ok(out)
}

/// Rows come out in manifest order times metric order whatever the thread
/// count; a failing item or metric fills the `error` column instead of
/// aborting the run.
pub fn run(args: Args) -> CliResult<()> {
    let ctx = MetricContext::new(&args.opts)?;
    let metrics = parse_metric_list(&args.metrics, ctx.brisque.is_some())?;
    let entries = read_manifest(&args.manifest)?;
    let pool = thread_pool(args.jobs)?;
    let rows: Vec<Vec<Vec<String>>> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let pair = ctx.load_pair(&e.reference, &e.distorted);
                metrics
                    .iter()
                    .map(|&m| {
                        let result = pair.as_ref().map_err(|err| err.to_string()).and_then(|p| ctx.evaluate(m, p).map_err(|err| err.to_string()));
                        let (value, error) = match result {
                            Ok(v) => (format_value(v), String::new()),
                            Err(msg) => (String::new(), msg),
                        };
                        vec![e.item_id.clone(), m.to_string(), value, e.task.clone(), e.anatomy.clone(), error]
                    })
                    .collect()
            })
            .collect()
    });
    let rows: Vec<Vec<String>> = rows.into_iter().flatten().collect();
    let failed = rows.iter().filter(|r| !r[5].is_empty()).count();
    for r in rows.iter().filter(|r| !r[5].is_empty()) {
        log::warn!("{} {}: {}", r[0], r[1], r[5]);
    }
    write_file(&args.out, &csv_bytes(&["item_id", "metric", "value", "task", "anatomy", "error"], &rows))?;
    if failed > 0 {
        return Err(CliError::Partial { failed, total: rows.len() });
    }
    Ok(())
}
