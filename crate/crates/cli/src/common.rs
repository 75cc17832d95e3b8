use mriqa::distmetrics::{db_pair_score, pair_features, DbConfig, DEFAULT_STRIDE, DEFAULT_TILE};
use mriqa::frmetrics::{brisque_features, brisque_score, compute_pair_metric, dists, BrisqueModel, FeatureMap, FeatureStack, MetricId};
use mriqa::imgcore::{load_image, normalize_fixed, normalize_unit, save_image, ImageFormat};
use mriqa::{GrayImage, ImagePair};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mriqa::Error),
    #[error("{failed} of {total} rows failed")]
    Partial { failed: usize, total: usize },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_precondition() => 3,
            CliError::Partial { .. } => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn image_format(path: &Path) -> CliResult<ImageFormat> {
    ImageFormat::from_path(path)
        .ok_or_else(|| CliError::Usage(format!("{}: expected a .pgm or .rf32 file", path.display())))
}

pub fn read_image(path: &Path) -> CliResult<GrayImage> {
    Ok(load_image(path, image_format(path)?)?)
}

pub fn write_image(img: &GrayImage, path: &Path) -> CliResult<()> {
    Ok(save_image(img, path, image_format(path)?)?)
}

/// Metrics evaluated by `--all`: everything computable from the pair alone,
/// plus BRISQUE when a model is supplied.
pub fn all_metrics(with_brisque: bool) -> Vec<MetricId> {
    MetricId::ALL
        .iter()
        .copied()
        .filter(|m| *m != MetricId::Is && (with_brisque || *m != MetricId::Brisque))
        .collect()
}

pub fn parse_metric(name: &str) -> CliResult<MetricId> {
    name.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown metric '{name}'")))
}

pub fn parse_metric_list(list: &str, with_brisque: bool) -> CliResult<Vec<MetricId>> {
    if list.trim() == "all" {
        return Ok(all_metrics(with_brisque));
    }
    list.split(',').map(parse_metric).collect()
}

#[derive(clap::Args, Clone, Debug)]
pub struct MetricOptions {
    /// Tile side for the distribution metrics and DISTS.
    #[arg(long, default_value_t = DEFAULT_TILE)]
    pub tile: usize,
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    pub stride: usize,
    /// Seed for KID subsets, MSID probes and random projections.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Divide by the stored data range instead of per-image min-max
    /// stretching.
    #[arg(long)]
    pub fixed_range: bool,
    /// BRISQUE regressor: 36 weights and a bias, whitespace or comma
    /// separated.
    #[arg(long)]
    pub brisque_model: Option<PathBuf>,
}

pub struct MetricContext {
    pub db: DbConfig,
    pub fixed_range: bool,
    pub brisque: Option<BrisqueModel>,
}

impl MetricContext {
    pub fn new(opts: &MetricOptions) -> CliResult<Self> {
        let brisque = match &opts.brisque_model {
            Some(p) => Some(BrisqueModel::load(p)?),
            None => None,
        };
        let mut db = DbConfig {
            tile_size: opts.tile,
            stride: opts.stride,
            seed: opts.seed,
            ..DbConfig::default()
        };
        db.kid.seed = opts.seed;
        db.msid.seed = opts.seed;
        Ok(Self {
            db,
            fixed_range: opts.fixed_range,
            brisque,
        })
    }

    pub fn load_pair(&self, reference: &Path, distorted: &Path) -> CliResult<ImagePair> {
        let norm = |img: GrayImage| if self.fixed_range { normalize_fixed(&img) } else { normalize_unit(&img) };
        Ok(ImagePair::new(norm(read_image(reference)?), norm(read_image(distorted)?))?)
    }

    /// Metric value on a normalised pair. Tile metrics compare the tile
    /// sets of the two images; BRISQUE scores the distorted image.
    pub fn evaluate(&self, metric: MetricId, pair: &ImagePair) -> CliResult<f64> {
        match metric {
            MetricId::Fid | MetricId::Kid | MetricId::Msid => Ok(db_pair_score(pair, metric, &self.db)?),
            MetricId::Dists => {
                let (a, b) = pair_features(pair, &self.db)?;
                let sa = FeatureStack::uniform(vec![FeatureMap::from_feature_set(&a)?])?;
                let sb = FeatureStack::uniform(vec![FeatureMap::from_feature_set(&b)?])?;
                Ok(dists(&sa, &sb)?.value)
            }
            MetricId::Brisque => {
                let model = self
                    .brisque
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("brisque needs --brisque-model".into()))?;
                Ok(brisque_score(&brisque_features(pair.distorted())?, model).value)
            }
            MetricId::Is => Err(CliError::Usage("is needs --probs with class probabilities".into())),
            _ => Ok(compute_pair_metric(metric, pair)?.value),
        }
    }
}

/// Worker count: `--jobs`, else `IQM_THREADS`, else the machine's
/// parallelism.
pub fn thread_count(jobs: Option<usize>) -> CliResult<usize> {
    if let Some(j) = jobs {
        return if j == 0 { Err(CliError::Usage("--jobs must be positive".into())) } else { Ok(j) };
    }
    if let Ok(v) = std::env::var("IQM_THREADS") {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("IQM_THREADS='{v}' is not a positive integer"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(jobs)?)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

/// Header-keyed CSV rows.
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl CsvTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bad = |e: csv::Error| CliError::Usage(format!("{}: {e}", path.display()));
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(bad)?;
        let headers = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
        let rows = r.records().collect::<Result<Vec<_>, _>>().map_err(bad)?;
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn require(&self, name: &str, path: &Path) -> CliResult<usize> {
        self.column(name)
            .ok_or_else(|| CliError::Usage(format!("{}: missing column '{name}'", path.display())))
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
