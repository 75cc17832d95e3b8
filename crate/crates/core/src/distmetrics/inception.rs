use crate::{Error, Result};
use std::path::Path;

/// Class probabilities `p(y|x)`, one row per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilitySet {
    n: usize,
    c: usize,
    data: Vec<f64>,
}

impl ProbabilitySet {
    /// Rows must be non-negative and sum to 1 within 1e-6.
    pub fn new(n: usize, c: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || c == 0 || n.checked_mul(c) != Some(data.len()) {
            return Err(Error::InvalidInput(format!(
                "probability set {n}x{c} with {} values",
                data.len()
            )));
        }
        for (i, row) in data.chunks_exact(c).enumerate() {
            if row.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::InvalidInput(format!("row {i} has a negative or non-finite probability")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidInput(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self { n, c, data })
    }

    /// CSV without header, one sample per row. A first row that does not
    /// parse as numbers is taken as a header and skipped.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::format("probability csv", e.to_string()))?;
        let mut data = Vec::new();
        let mut c = None;
        let mut n = 0;
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::format("probability csv", e.to_string()))?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = match parsed {
                Ok(r) => r,
                Err(_) if line == 0 => continue,
                Err(_) => {
                    return Err(Error::format("probability csv", format!("row {} is not numeric", line + 1)));
                }
            };
            if *c.get_or_insert(row.len()) != row.len() {
                return Err(Error::format("probability csv", format!("row {} has {} columns", line + 1, row.len())));
            }
            data.extend(row);
            n += 1;
        }
        Self::new(n, c.unwrap_or(0), data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> usize {
        self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.c..(i + 1) * self.c]
    }
}

/// `exp(mean KL(p(y|x) || p(y)))` per split; returns the mean and
/// population standard deviation over splits. Split `k` covers rows
/// `k*n/splits .. (k+1)*n/splits`.
pub fn inception_score(p: &ProbabilitySet, splits: usize) -> Result<(f64, f64)> {
    if splits == 0 || splits > p.n {
        return Err(Error::InvalidParameter(format!(
            "{splits} splits for {} samples",
            p.n
        )));
    }
    let mut scores = Vec::with_capacity(splits);
    for k in 0..splits {
        let (lo, hi) = (k * p.n / splits, (k + 1) * p.n / splits);
        let m = (hi - lo) as f64;
        let mut marginal = vec![0.0; p.c];
        for i in lo..hi {
            for (acc, v) in marginal.iter_mut().zip(p.row(i)) {
                *acc += v / m;
            }
        }
        let mut kl = 0.0;
        for i in lo..hi {
            for (&v, &q) in p.row(i).iter().zip(&marginal) {
                if v > 0.0 {
                    kl += v * (v / q).ln();
                }
            }
        }
        scores.push((kl / m).exp());
    }
    let mean = scores.iter().sum::<f64>() / splits as f64;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / splits as f64;
    Ok((mean, var.sqrt()))
}
