//! Covariance assembly on time grids, positive-definiteness checks, jittered
//! Cholesky factorization and exact Gaussian path sampling.
//!
//! Simulation is exact in the sense that the sampled vectors have precisely
//! the covariance of the process restricted to the grid (up to the jitter,
//! which is bounded by the schedule and reported). No circulant embedding:
//! the processes here are nonstationary, so the O(n^3) factorization route is
//! the correct one at desk scale.

use crate::error::{Error, Result};
use crate::kernels::ProcessSpec;
use crate::rng::NormalStream;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Strictly increasing, nonnegative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Grid("grid must contain at least one point".into()));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Grid("grid times must be finite and nonnegative".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("grid times must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `n + 1` equally spaced points from `start` to `end` inclusive.
    pub fn regular(start: f64, end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("regular grid needs n >= 1".into()));
        }
        let pts = (0..=n)
            .map(|i| start + (end - start) * i as f64 / n as f64)
            .collect();
        Self::new(pts)
    }

    /// Logarithmically spaced points over [lo, hi].
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(lo > 0.0) || !(hi > lo) {
            return Err(Error::Grid(format!(
                "log grid needs 0 < lo < hi and count >= 2, got lo={lo}, hi={hi}, count={count}"
            )));
        }
        let (l0, l1) = (lo.ln(), hi.ln());
        let mut pts: Vec<f64> = (0..count)
            .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
            .collect();
        pts[0] = lo;
        pts[count - 1] = hi;
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the grid starts at t = 0 (a degenerate all-zero kernel row).
    pub fn includes_zero(&self) -> bool {
        self.points[0] == 0.0
    }
}

/// Assembled covariance with PSD metadata.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    pub entries: DMatrix<f64>,
    /// Smallest eigenvalue; computed eagerly for n <= 512, else on demand by
    /// `check_psd` (the 4096-point simulation path never needs it).
    pub min_eigenvalue: Option<f64>,
    /// Diagonal shift applied by factorization; 0 until then.
    pub jitter: f64,
}

const EAGER_EIGEN_LIMIT: usize = 512;

/// Fill entries[i][j] = kernel(t_i, t_j). Only the lower triangle is
/// evaluated; the upper is mirrored, so symmetry is exact by construction.
pub fn assemble_covariance(spec: &ProcessSpec, grid: &TimeGrid) -> Result<CovarianceMatrix> {
    let n = grid.len();
    let pts = grid.points();

    let rows: Vec<Vec<f64>> = if n >= 128 {
        (0..n)
            .into_par_iter()
            .map(|i| (0..=i).map(|j| spec.cov(pts[i], pts[j])).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((0..=i).map(|j| spec.cov(pts[i], pts[j])).collect::<Result<Vec<f64>>>()?);
        }
        out
    };

    let mut entries = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }

    let min_eigenvalue = if n <= EAGER_EIGEN_LIMIT {
        Some(min_eigenvalue(&entries)?)
    } else {
        None
    };

    Ok(CovarianceMatrix { spec: spec.clone(), grid: grid.clone(), entries, min_eigenvalue, jitter: 0.0 })
}

fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), 1.0e-13, 50_000).ok_or_else(|| {
        Error::Eigensolver(format!(
            "QL iteration did not converge (n = {}, trace = {:.6e}, max |entry| = {:.6e})",
            m.nrows(),
            m.trace(),
            m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
        ))
    })?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Outcome of a positive-semidefiniteness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub n: usize,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    /// pass <=> min_eigenvalue >= -tolerance * max(1, trace/n)
    pub pass: bool,
}

/// Numerical witness of positive-definiteness: the smallest eigenvalue may
/// only be negative by rounding, i.e. by at most `tol` relative to the mean
/// diagonal (floored at 1 for small-scale matrices).
pub fn check_psd(m: &CovarianceMatrix, tol: f64) -> Result<PsdReport> {
    let min_eig = match m.min_eigenvalue {
        Some(v) => v,
        None => min_eigenvalue(&m.entries)?,
    };
    let n = m.entries.nrows();
    let trace = m.entries.trace();
    let scale = (trace / n as f64).max(1.0);
    Ok(PsdReport { n, trace, min_eigenvalue: min_eig, tolerance: tol, pass: min_eig >= -tol * scale })
}

/// Escalating diagonal shifts, relative to the mean diagonal of the matrix
/// being factored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JitterPolicy {
    pub relative_levels: Vec<f64>,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        Self { relative_levels: vec![0.0, 1e-12, 1e-10, 1e-8, 1e-6] }
    }
}

/// Lower-triangular factor of (entries + jitter I), with any t = 0 coordinate
/// pinned to zero and excluded from the factorization.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    /// Row i holds L[i][0..=i] of the reduced (zero-row-free) matrix.
    rows: Vec<Vec<f64>>,
    /// Index of the pinned t = 0 coordinate in the full grid, if present.
    zero_index: Option<usize>,
    pub jitter: f64,
}

impl CholeskyFactor {
    /// Dimension of the full grid (including a pinned zero coordinate).
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    fn reduced_dim(&self) -> usize {
        self.rows.len()
    }

    /// Reconstruct L * L^T and compare against the jittered source matrix;
    /// returns the maximum absolute mismatch (test/diagnostic helper).
    pub fn reconstruction_error(&self, source: &CovarianceMatrix) -> f64 {
        let n = self.reduced_dim();
        let offset = |idx: usize| match self.zero_index {
            Some(z) if idx >= z => idx + 1,
            _ => idx,
        };
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let mut acc = 0.0;
                for k in 0..=j {
                    acc += self.rows[i][k] * self.rows[j][k];
                }
                let mut want = source.entries[(offset(i), offset(j))];
                if i == j {
                    want += self.jitter;
                }
                worst = worst.max((acc - want).abs());
            }
        }
        worst
    }
}

/// Factor `entries + jitter I = L L^T`, escalating through the jitter policy
/// until a positive pivot sequence exists. Rows/columns for t = 0 are pinned
/// to zero, excluded from factorization and reinserted at sampling time.
pub fn cholesky_with_jitter(m: &CovarianceMatrix, policy: &JitterPolicy) -> Result<CholeskyFactor> {
    let n = m.grid.len();
    let zero_index = if m.grid.includes_zero() { Some(0) } else { None };
    let reduced: Vec<usize> = (0..n).filter(|&i| Some(i) != zero_index).collect();
    let r = reduced.len();

    let mean_diag = if r > 0 {
        reduced.iter().map(|&i| m.entries[(i, i)]).sum::<f64>() / r as f64
    } else {
        0.0
    };

    let mut last_err = (0.0f64, 0.0f64, 0usize);
    for &level in &policy.relative_levels {
        let jitter = level * mean_diag.max(f64::MIN_POSITIVE);
        match try_factor(&m.entries, &reduced, jitter) {
            Ok(rows) => {
                return Ok(CholeskyFactor {
                    spec: m.spec.clone(),
                    grid: m.grid.clone(),
                    rows,
                    zero_index,
                    jitter,
                })
            }
            Err((pivot, index)) => last_err = (jitter, pivot, index),
        }
    }
    Err(Error::FactorizationFailed {
        last_jitter: last_err.0,
        pivot: last_err.1,
        index: last_err.2,
    })
}

/// Left-looking Cholesky on the reduced index set; parallelizes the column
/// update for large matrices. Each element is a sequential dot product, so
/// the result is identical for any worker-thread count.
fn try_factor(
    entries: &DMatrix<f64>,
    reduced: &[usize],
    jitter: f64,
) -> std::result::Result<Vec<Vec<f64>>, (f64, usize)> {
    let r = reduced.len();
    let mut rows: Vec<Vec<f64>> = (0..r).map(|i| vec![0.0; i + 1]).collect();

    for j in 0..r {
        let (done, rest) = rows.split_at_mut(j + 1);
        let row_j = &mut done[j];

        let mut pivot = entries[(reduced[j], reduced[j])] + jitter;
        for &x in &row_j[..j] {
            pivot -= x * x;
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err((pivot, j));
        }
        let diag = pivot.sqrt();
        row_j[j] = diag;
        let row_j = &done[j];

        let update = |(offset, row_i): (usize, &mut Vec<f64>)| {
            let i = j + 1 + offset;
            let mut acc = entries[(reduced[i], reduced[j])];
            for k in 0..j {
                acc -= row_i[k] * row_j[k];
            }
            row_i[j] = acc / diag;
        };

        if r >= 512 {
            rest.par_iter_mut().enumerate().for_each(update);
        } else {
            rest.iter_mut().enumerate().for_each(update);
        }
    }
    Ok(rows)
}

/// A reproducible ensemble of exact sample paths.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    pub master_seed: u64,
    /// Row-major (n_paths x n_times).
    values: Vec<f64>,
    pub n_paths: usize,
    /// Human-readable statement of the per-path seed derivation.
    pub sub_seed_rule: &'static str,
}

pub const SUB_SEED_RULE: &str = "path i uses the counter-based stream keyed by \
splitmix64(splitmix64(master_seed) XOR (i+1)*0x9E3779B97F4A7C15); draw j mixes key+j";

impl PathEnsemble {
    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.n_times();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_paths).map(move |i| self.path(i))
    }
}

/// Draw `n_paths` exact sample paths. Path i is L z_i with z_i a standard
/// normal vector from the keyed stream (master_seed, i); the pinned t = 0
/// coordinate, if present, is written as exactly 0.
pub fn sample_paths(factor: &CholeskyFactor, n_paths: usize, master_seed: u64) -> PathEnsemble {
    let n = factor.dim();
    let r = factor.reduced_dim();
    let mut values = vec![0.0f64; n_paths * n];

    let fill_one = |(path_index, out): (usize, &mut [f64])| {
        let mut stream = NormalStream::new(master_seed, path_index as u64);
        let mut z = vec![0.0f64; r];
        stream.fill_normals(&mut z);
        // out already zeroed; the pinned coordinate stays exactly 0
        let shift = |idx: usize| match factor.zero_index {
            Some(zi) if idx >= zi => idx + 1,
            _ => idx,
        };
        for i in 0..r {
            let row = &factor.rows[i];
            let mut acc = 0.0;
            for k in 0..=i {
                acc += row[k] * z[k];
            }
            out[shift(i)] = acc;
        }
    };

    if n_paths * n >= 1 << 16 {
        values.par_chunks_mut(n).enumerate().for_each(fill_one);
    } else {
        values.chunks_mut(n).enumerate().for_each(fill_one);
    }

    PathEnsemble {
        spec: factor.spec.clone(),
        grid: factor.grid.clone(),
        master_seed,
        values,
        n_paths,
        sub_seed_rule: SUB_SEED_RULE,
    }
}

/// Unbiased sample covariance across paths, with per-entry standard errors
/// from the Gaussian fourth-moment (Wishart) formula
/// Var(c_ij) = (c_ii c_jj + c_ij^2) / (m - 1).
#[derive(Debug, Clone)]
pub struct EmpiricalCovariance {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
    pub std_err: DMatrix<f64>,
    pub n_paths: usize,
}

pub fn empirical_cov(ensemble: &PathEnsemble) -> Result<EmpiricalCovariance> {
    let m = ensemble.n_paths;
    if m < 2 {
        return Err(Error::InsufficientPaths { needed: 2, got: m });
    }
    let n = ensemble.n_times();

    let mut mean = vec![0.0f64; n];
    for path in ensemble.paths() {
        for (acc, &v) in mean.iter_mut().zip(path) {
            *acc += v;
        }
    }
    for acc in &mut mean {
        *acc /= m as f64;
    }

    let mut cov = DMatrix::zeros(n, n);
    for path in ensemble.paths() {
        for i in 0..n {
            let di = path[i] - mean[i];
            for j in 0..=i {
                cov[(i, j)] += di * (path[j] - mean[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = cov[(i, j)] / (m - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let mut std_err = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let var: f64 = (cov[(i, i)] * cov[(j, j)] + cov[(i, j)] * cov[(i, j)]) / (m - 1) as f64;
            std_err[(i, j)] = var.sqrt();
        }
    }

    Ok(EmpiricalCovariance { mean, cov, std_err, n_paths: m })
}
