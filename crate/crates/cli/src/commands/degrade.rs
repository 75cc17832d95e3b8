use crate::common::{csv_bytes, read_image, thread_pool, write_file, write_image, CliError, CliResult, CsvTable};
use mriqa::degrade::{
    add_noise, cartesian_mask, default_center_fraction, estimate_background_sigma, sample_motion_params,
    simulate_motion, simulate_with_mask, NoiseParams, Roi,
};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Task {
    Accel,
    Motion,
    Noise,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    task: Task,
    /// One image, or a CSV listing images in a `path` (or `ref_path`)
    /// column with an optional `item_id` column.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Image `i` of the input list uses seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.0)]
    acceleration: f64,
    /// Fraction of always-sampled central columns; defaults to
    /// 0.32 / acceleration.
    #[arg(long)]
    center_fraction: Option<f64>,
    /// Severity multiplier for motion and noise (1 to 3).
    #[arg(long, default_value_t = 1.0)]
    amplification: f64,
    /// Noise standard deviation as a fraction of the data range.
    #[arg(long, conflicts_with = "auto_sigma")]
    sigma: Option<f64>,
    /// Estimate the noise level from a background region (needs --roi).
    #[arg(long, requires = "roi")]
    auto_sigma: bool,
    /// Background region `x,y,w,h`.
    #[arg(long)]
    roi: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
}

const SIDECAR_HEADER: [&str; 19] = [
    "item_id", "task", "seed", "input", "output", "acceleration", "center_fraction", "sampled_columns", "mask_file",
    "amplification", "sigma", "echo_train_length", "zero_pad", "event_fraction", "dx", "dy", "rotation_deg",
    "center_dx", "center_dy",
];

struct Job {
    item_id: String,
    input: PathBuf,
    seed: u64,
}

fn list_inputs(input: &Path, seed: u64) -> CliResult<Vec<Job>> {
    let stem = |p: &Path| p.file_stem().and_then(|s| s.to_str()).unwrap_or("image").to_string();
    let is_csv = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if !is_csv {
        return Ok(vec![Job { item_id: stem(input), input: input.to_path_buf(), seed }]);
    }
    let t = CsvTable::read(input)?;
    let path_col = t
        .column("path")
        .or_else(|| t.column("ref_path"))
        .ok_or_else(|| CliError::Usage(format!("{}: needs a 'path' column", input.display())))?;
    let id_col = t.column("item_id");
    let base = input.parent().unwrap_or(Path::new(""));
    let mut seen = std::collections::HashSet::new();
    t.rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let path = base.join(row.get(path_col).unwrap_or(""));
            let item_id = id_col.and_then(|c| row.get(c)).map_or_else(|| stem(&path), str::to_string);
            if !seen.insert(item_id.clone()) {
                return Err(CliError::Usage(format!("duplicate item_id '{item_id}'")));
            }
            Ok(Job { item_id, input: path, seed: seed.wrapping_add(i as u64) })
        })
        .collect()
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn degrade_one(args: &Args, roi: Option<Roi>, job: &Job) -> CliResult<Vec<String>> {
    let img = read_image(&job.input)?;
    let ext = job.input.extension().and_then(|e| e.to_str()).unwrap_or("rf32");
    let out_name = format!("{}.{ext}", job.item_id);
    let mut row = vec![String::new(); SIDECAR_HEADER.len()];
    row[0] = job.item_id.clone();
    row[2] = job.seed.to_string();
    row[3] = job.input.display().to_string();
    row[4] = out_name.clone();
    let degraded = match args.task {
        Task::Accel => {
            let cf = args.center_fraction.unwrap_or_else(|| default_center_fraction(args.acceleration));
            let mask = cartesian_mask(img.width(), args.acceleration, cf, job.seed)?;
            let mask_name = format!("{}_mask.csv", job.item_id);
            write_file(&args.out.join(&mask_name), mask.to_csv().as_bytes())?;
            row[1] = "accel".into();
            row[5] = num(args.acceleration);
            row[6] = num(cf);
            row[7] = mask.count().to_string();
            row[8] = mask_name;
            simulate_with_mask(&img, &mask)?
        }
        Task::Motion => {
            let p = sample_motion_params(job.seed, args.amplification)?;
            row[1] = "motion".into();
            row[9] = num(p.amplification);
            row[11] = p.echo_train_length.to_string();
            row[12] = p.zero_pad.to_string();
            row[13] = num(p.event_fraction);
            row[14] = num(p.translation.0);
            row[15] = num(p.translation.1);
            row[16] = num(p.rotation_deg);
            row[17] = num(p.rotation_center.0);
            row[18] = num(p.rotation_center.1);
            simulate_motion(&img, &p)?
        }
        Task::Noise => {
            let sigma = match (args.sigma, roi) {
                (Some(s), _) => s,
                (None, Some(r)) => estimate_background_sigma(&img, r)?,
                (None, None) => return Err(CliError::Usage("noise needs --sigma or --auto-sigma --roi".into())),
            };
            row[1] = "noise".into();
            row[9] = num(args.amplification);
            row[10] = num(sigma);
            add_noise(&img, &NoiseParams { sigma, amplification: args.amplification }, job.seed)?
        }
    };
    write_image(&degraded, &args.out.join(&out_name))?;
    Ok(row)
}

/// Writes one degraded image per input plus `params.csv`, which records
/// every drawn parameter so each output can be regenerated.
pub fn run(args: Args) -> CliResult<()> {
    let roi = match (&args.roi, args.auto_sigma) {
        (Some(r), true) => Some(r.parse::<Roi>()?),
        _ => None,
    };
    if args.task == Task::Noise && args.sigma.is_none() && roi.is_none() {
        return Err(CliError::Usage("noise needs --sigma or --auto-sigma --roi".into()));
    }
    let jobs = list_inputs(&args.input, args.seed)?;
    std::fs::create_dir_all(&args.out).map_err(|source| CliError::Write { path: args.out.clone(), source })?;
    let pool = thread_pool(args.jobs)?;
    let rows: Vec<Vec<String>> = pool.install(|| jobs.par_iter().map(|j| degrade_one(&args, roi, j)).collect::<CliResult<_>>())?;
    write_file(&args.out.join("params.csv"), &csv_bytes(&SIDECAR_HEADER, &rows))
}
