//! Sliced-Wasserstein estimators.
//!
//! Every estimator consumes a [`DirectionSet`] supplied by the caller so that
//! several methods can be compared on the same directions. The `*_from_values`
//! variants take precomputed integrand values and never re-evaluate.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::harmonics::{evaluate_basis, HarmonicBasis};
use crate::measures::Measure;
use crate::numeric::{self, dot_short};
use crate::sphere::{self, DirectionSet, SequenceKind};
use crate::wasserstein1d::Integrand;

/// Estimation method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Mc,
    Shcv,
    CvLow,
    CvUp,
    Cvnn,
    Qmc,
    Rqmc,
}

impl Method {
    pub const ALL: [Method; 7] =
        [Method::Mc, Method::Shcv, Method::CvLow, Method::CvUp, Method::Cvnn, Method::Qmc, Method::Rqmc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Shcv => "shcv",
            Method::CvLow => "cvlow",
            Method::CvUp => "cvup",
            Method::Cvnn => "cvnn",
            Method::Qmc => "qmc",
            Method::Rqmc => "rqmc",
        }
    }

    /// Stable index used in seed derivation.
    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-'], "");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// Result of one estimator call.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub method: Method,
    pub estimate: f64,
    pub n: usize,
    /// Regression coefficients (SHCV: one per basis function, zero for dropped
    /// columns; quadratic CVs: the single coefficient).
    pub coefficients: Option<Vec<f64>>,
    /// Mean squared residual of the fitted model.
    pub residual_variance: Option<f64>,
    /// Number of regressors actually used after rank reduction.
    pub regressors: Option<usize>,
    /// Set when the estimator degraded to plain Monte Carlo.
    pub fallback: bool,
    pub wall_time: Duration,
}

impl EstimatorReport {
    fn plain(method: Method, estimate: f64, n: usize, wall_time: Duration) -> Self {
        Self {
            method,
            estimate,
            n,
            coefficients: None,
            residual_variance: None,
            regressors: None,
            fallback: false,
            wall_time,
        }
    }
}

fn check_values(fvals: &[f64]) -> Result<()> {
    if fvals.is_empty() {
        return Err(Error::InvalidArgument("no integrand values".into()));
    }
    Ok(())
}

/// Plain Monte Carlo average.
pub fn mc_estimate(fvals: &[f64]) -> Result<EstimatorReport> {
    let start = Instant::now();
    check_values(fvals)?;
    let m = numeric::sum(fvals.iter().copied()) / fvals.len() as f64;
    Ok(EstimatorReport::plain(Method::Mc, m, fvals.len(), start.elapsed()))
}

/// Least-squares fit of `f` on `[1 | Phi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub intercept: f64,
    /// Length `s`; dropped columns carry a zero coefficient.
    pub coefficients: Vec<f64>,
    /// Indices of the columns kept in the fit.
    pub kept: Vec<usize>,
    /// `RSS / n`.
    pub residual_variance: f64,
}

/// Relative rank tolerance for the centered regressors.
const RANK_TOL: f64 = 1e-10;

fn column_means(phi: &DMatrix<f64>, cols: &[usize]) -> Vec<f64> {
    let n = phi.nrows() as f64;
    cols.iter().map(|&j| numeric::sum(phi.column(j).iter().copied()) / n).collect()
}

fn centered(phi: &DMatrix<f64>, cols: &[usize], means: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(phi.nrows(), cols.len(), |i, k| phi[(i, cols[k])] - means[k])
}

/// Columns of `phi` that give a full-rank centered design with at most
/// `n - 2` regressors. Trailing columns go first when there are too many;
/// numerically dependent columns are then removed one at a time.
fn select_columns(phi: &DMatrix<f64>) -> Vec<usize> {
    let n = phi.nrows();
    let mut kept: Vec<usize> = (0..phi.ncols().min(n.saturating_sub(2))).collect();
    loop {
        if kept.is_empty() {
            return kept;
        }
        let means = column_means(phi, &kept);
        let x = centered(phi, &kept, &means);
        let max_norm = x.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max_norm == 0.0 {
            return Vec::new();
        }
        let r = x.qr().r();
        let bad = (0..kept.len()).find(|&k| !(r[(k, k)].abs() > RANK_TOL * max_norm));
        match bad {
            Some(k) => {
                kept.remove(k);
            }
            None => return kept,
        }
    }
}

/// OLS intercept estimator: the intercept of the least-squares regression of
/// `fvals` on `[1 | Phi]`, computed from a QR factorization of the centered
/// regressors.
pub fn ols_fit(fvals: &[f64], phi: &DMatrix<f64>) -> Result<OlsFit> {
    check_values(fvals)?;
    let n = fvals.len();
    if phi.nrows() != n {
        return Err(Error::LengthMismatch { left: n, right: phi.nrows() });
    }
    let s = phi.ncols();
    let fbar = numeric::sum(fvals.iter().copied()) / n as f64;
    let kept = select_columns(phi);
    let mut coefficients = vec![0.0; s];
    if kept.is_empty() {
        let rss = numeric::sum(fvals.iter().map(|f| (f - fbar) * (f - fbar)));
        return Ok(OlsFit { intercept: fbar, coefficients, kept, residual_variance: rss / n as f64 });
    }
    let means = column_means(phi, &kept);
    let x = centered(phi, &kept, &means);
    let fc = DVector::from_iterator(n, fvals.iter().map(|f| f - fbar));
    let qr = x.clone().qr();
    let qtf = qr.q().transpose() * &fc;
    let beta = qr
        .r()
        .solve_upper_triangular(&qtf)
        .ok_or_else(|| Error::IllPosed("singular triangular factor".into()))?;
    let resid = &fc - &x * &beta;
    let rss = numeric::sum(resid.iter().map(|r| r * r));
    let intercept = fbar - numeric::dot(&means, beta.as_slice());
    for (k, &j) in kept.iter().enumerate() {
        coefficients[j] = beta[k];
    }
    Ok(OlsFit { intercept, coefficients, kept, residual_variance: rss / n as f64 })
}

/// OLSMC estimate reported as an [`EstimatorReport`] tagged SHCV.
pub fn olsmc(fvals: &[f64], phi: &DMatrix<f64>) -> Result<EstimatorReport> {
    let start = Instant::now();
    let fit = ols_fit(fvals, phi)?;
    Ok(EstimatorReport {
        method: Method::Shcv,
        estimate: fit.intercept,
        n: fvals.len(),
        regressors: Some(fit.kept.len()),
        fallback: fit.kept.is_empty() && phi.ncols() > 0,
        coefficients: Some(fit.coefficients),
        residual_variance: Some(fit.residual_variance),
        wall_time: start.elapsed(),
    })
}

/// Spherical-harmonics control variates estimate.
pub fn shcv(integrand: &Integrand, dirs: &DirectionSet, basis: &HarmonicBasis) -> Result<EstimatorReport> {
    let start = Instant::now();
    if basis.dim() != integrand.dim() {
        return Err(Error::DimensionMismatch { expected: integrand.dim(), got: basis.dim() });
    }
    let fvals = integrand.eval_set(dirs)?;
    let phi = evaluate_basis(basis, dirs)?;
    let mut report = olsmc(&fvals, &phi)?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Quadrature weights reproducing the OLS intercept as a linear rule `w^T f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRuleWeights {
    pub weights: Vec<f64>,
    /// `(d, 2L, seed)` of the basis the weights were built from, if any.
    pub basis: Option<(usize, usize, u64)>,
    /// Basis columns kept after rank reduction.
    pub kept: Vec<usize>,
}

impl LinearRuleWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, fvals: &[f64]) -> Result<f64> {
        if fvals.len() != self.weights.len() {
            return Err(Error::LengthMismatch { left: self.weights.len(), right: fvals.len() });
        }
        Ok(numeric::dot(&self.weights, fvals))
    }
}

/// `w = (I - Pi) 1 / (1^T (I - Pi) 1)` with `Pi` the orthogonal projector onto
/// the column space of `Phi`.
pub fn shcv_weights(phi: &DMatrix<f64>) -> Result<LinearRuleWeights> {
    let n = phi.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("no directions".into()));
    }
    let kept = select_columns(phi);
    let mut u = vec![1.0; n];
    if !kept.is_empty() {
        let x = DMatrix::from_fn(n, kept.len(), |i, k| phi[(i, kept[k])]);
        let q = x.qr().q();
        let ones = DVector::from_element(n, 1.0);
        let qt1 = q.transpose() * &ones;
        let proj = &q * qt1;
        for (ui, pi) in u.iter_mut().zip(proj.iter()) {
            *ui -= pi;
        }
    }
    let denom = numeric::sum(u.iter().copied());
    if !(denom >= 1e-12 * n as f64) {
        return Err(Error::IllPosed(format!(
            "constant function lies in the span of the control variates (1^T(I-P)1 = {denom:e})"
        )));
    }
    Ok(LinearRuleWeights { weights: u.iter().map(|x| x / denom).collect(), basis: None, kept })
}

/// Linear-rule weights for a basis evaluated at a direction set.
pub fn shcv_linear_rule(basis: &HarmonicBasis, dirs: &DirectionSet) -> Result<LinearRuleWeights> {
    let phi = evaluate_basis(basis, dirs)?;
    let mut w = shcv_weights(&phi)?;
    w.basis = Some((basis.dim(), basis.max_degree(), basis.seed()));
    Ok(w)
}

/// Control variate with known mean: estimate `MC - gamma * mean(C - b)` with
/// `gamma = <f - MC, C - b> / ||C - b||^2`.
fn single_control(method: Method, fvals: &[f64], control: &[f64], b: f64) -> Result<EstimatorReport> {
    check_values(fvals)?;
    if control.len() != fvals.len() {
        return Err(Error::LengthMismatch { left: fvals.len(), right: control.len() });
    }
    let n = fvals.len();
    let mc = numeric::sum(fvals.iter().copied()) / n as f64;
    let centered: Vec<f64> = control.iter().map(|c| c - b).collect();
    let denom = numeric::sum(centered.iter().map(|c| c * c));
    let scale = numeric::sum(control.iter().map(|c| c * c)) + b * b * n as f64;
    if !(denom > 1e-28 * scale) || denom == 0.0 {
        let rss = numeric::sum(fvals.iter().map(|f| (f - mc) * (f - mc)));
        return Ok(EstimatorReport {
            method,
            estimate: mc,
            n,
            coefficients: None,
            residual_variance: Some(rss / n as f64),
            regressors: Some(0),
            fallback: true,
            wall_time: Duration::ZERO,
        });
    }
    let cov = numeric::sum(fvals.iter().zip(&centered).map(|(f, c)| (f - mc) * c));
    let gamma = cov / denom;
    let cbar = numeric::sum(centered.iter().copied()) / n as f64;
    let estimate = mc - gamma * cbar;
    let rss = numeric::sum(
        fvals.iter().zip(&centered).map(|(f, c)| (f - gamma * c - estimate).powi(2)),
    );
    Ok(EstimatorReport {
        method,
        estimate,
        n,
        coefficients: Some(vec![gamma]),
        residual_variance: Some(rss / n as f64),
        regressors: Some(1),
        fallback: false,
        wall_time: Duration::ZERO,
    })
}

fn quad_control(dirs: &DirectionSet, m: &DMatrix<f64>) -> Vec<f64> {
    let d = dirs.dim();
    dirs.rows()
        .map(|t| {
            let mut acc = 0.0;
            for i in 0..d {
                let mut row = 0.0;
                for j in 0..d {
                    row += m[(i, j)] * t[j];
                }
                acc += t[i] * row;
            }
            acc
        })
        .collect()
}

fn mean_gap(source: &Measure, target: &Measure) -> Result<Vec<f64>> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: source.dim(), got: target.dim() });
    }
    Ok(source.mean().iter().zip(target.mean()).map(|(a, b)| a - b).collect())
}

/// Lower control variate from precomputed values: `C(theta) = (theta^T (m_X - m_Y))^2`
/// with known mean `||m_X - m_Y||^2 / d`.
pub fn cv_lower_from_values(
    fvals: &[f64],
    dirs: &DirectionSet,
    source: &Measure,
    target: &Measure,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    let gap = mean_gap(source, target)?;
    if gap.len() != dirs.dim() {
        return Err(Error::DimensionMismatch { expected: gap.len(), got: dirs.dim() });
    }
    let control: Vec<f64> = dirs.rows().map(|t| dot_short(t, &gap).powi(2)).collect();
    let b = dot_short(&gap, &gap) / gap.len() as f64;
    let mut r = single_control(Method::CvLow, fvals, &control, b)?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Upper control variate from precomputed values: `C(theta) = theta^T M theta`
/// with `M = (m_X - m_Y)(m_X - m_Y)^T + Sigma_X + Sigma_Y` and known mean `Tr(M) / d`.
pub fn cv_upper_from_values(
    fvals: &[f64],
    dirs: &DirectionSet,
    source: &Measure,
    target: &Measure,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    let gap = mean_gap(source, target)?;
    let d = gap.len();
    if d != dirs.dim() {
        return Err(Error::DimensionMismatch { expected: d, got: dirs.dim() });
    }
    let g = DVector::from_column_slice(&gap);
    let m = &g * g.transpose() + source.scatter() + target.scatter();
    let control = quad_control(dirs, &m);
    let mut r = single_control(Method::CvUp, fvals, &control, m.trace() / d as f64)?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Lower quadratic control variate.
pub fn cv_lower(integrand: &Integrand, dirs: &DirectionSet) -> Result<EstimatorReport> {
    let start = Instant::now();
    let fvals = integrand.eval_set(dirs)?;
    let mut r = cv_lower_from_values(&fvals, dirs, integrand.source(), integrand.target())?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Upper quadratic control variate.
pub fn cv_upper(integrand: &Integrand, dirs: &DirectionSet) -> Result<EstimatorReport> {
    let start = Instant::now();
    let fvals = integrand.eval_set(dirs)?;
    let mut r = cv_upper_from_values(&fvals, dirs, integrand.source(), integrand.target())?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Largest default number of fresh directions used to integrate the
/// nearest-neighbor predictor.
pub const CVNN_MAX_FRESH: usize = 1 << 20;

/// Default fresh-direction count `ceil(n^{1 + 2/d})`, capped at [`CVNN_MAX_FRESH`].
pub fn cvnn_fresh_count(n: usize, d: usize) -> usize {
    let m = (n as f64).powf(1.0 + 2.0 / d as f64).ceil();
    if m >= CVNN_MAX_FRESH as f64 {
        CVNN_MAX_FRESH
    } else {
        m as usize
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest row of `dirs` to `q`, skipping `exclude`; ties go to
/// the lowest index.
fn nearest(dirs: &DirectionSet, q: &[f64], exclude: Option<usize>) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (j, row) in dirs.rows().enumerate() {
        if Some(j) == exclude {
            continue;
        }
        let dist = sq_dist(q, row);
        if dist < best_d {
            best_d = dist;
            best = j;
        }
    }
    best
}

/// Leave-one-out nearest neighbor of every direction.
pub fn leave_one_out_neighbors(dirs: &DirectionSet) -> Vec<usize> {
    use rayon::prelude::*;
    (0..dirs.len()).into_par_iter().map(|i| nearest(dirs, dirs.row(i), Some(i))).collect()
}

/// Control-neighbors estimate from precomputed values. `fresh` overrides the
/// number of fresh uniform directions used to integrate the 1-NN predictor.
pub fn cvnn_from_values(
    fvals: &[f64],
    dirs: &DirectionSet,
    seed: u64,
    fresh: Option<usize>,
) -> Result<EstimatorReport> {
    use rayon::prelude::*;
    let start = Instant::now();
    let n = fvals.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("control neighbors needs n >= 2, got {n}")));
    }
    if dirs.len() != n {
        return Err(Error::LengthMismatch { left: n, right: dirs.len() });
    }
    let d = dirs.dim();
    let loo = leave_one_out_neighbors(dirs);
    let mc = numeric::sum(fvals.iter().copied()) / n as f64;
    let loo_mean = numeric::sum(loo.iter().map(|&j| fvals[j])) / n as f64;
    let m = fresh.unwrap_or_else(|| cvnn_fresh_count(n, d)).max(1);
    let extra = sphere::sample_uniform(m, d, seed)?;
    let pred: Vec<f64> =
        extra.as_flat().par_chunks_exact(d).map(|q| fvals[nearest(dirs, q, None)]).collect();
    let integral = numeric::sum(pred) / m as f64;
    let estimate = mc - (loo_mean - integral);
    let resid = numeric::sum(
        fvals.iter().zip(&loo).map(|(f, &j)| (f - fvals[j] + integral - estimate).powi(2)),
    );
    Ok(EstimatorReport {
        method: Method::Cvnn,
        estimate,
        n,
        coefficients: None,
        residual_variance: Some(resid / n as f64),
        regressors: None,
        fallback: false,
        wall_time: start.elapsed(),
    })
}

/// Control-neighbors estimate.
pub fn cvnn(integrand: &Integrand, dirs: &DirectionSet, seed: u64) -> Result<EstimatorReport> {
    let start = Instant::now();
    let fvals = integrand.eval_set(dirs)?;
    let mut r = cvnn_from_values(&fvals, dirs, seed, None)?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Monte Carlo estimate over i.i.d. uniform directions.
pub fn mc(integrand: &Integrand, dirs: &DirectionSet) -> Result<EstimatorReport> {
    let start = Instant::now();
    let fvals = integrand.eval_set(dirs)?;
    let mut r = mc_estimate(&fvals)?;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Average over a deterministic QMC direction set.
pub fn qmc_estimate(integrand: &Integrand, n: usize, kind: SequenceKind) -> Result<EstimatorReport> {
    let start = Instant::now();
    let dirs = sphere::qmc_directions(n, integrand.dim(), kind)?;
    let fvals = integrand.eval_set(&dirs)?;
    let mut r = mc_estimate(&fvals)?;
    r.method = Method::Qmc;
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Average over a randomly rotated QMC direction set.
pub fn rqmc_estimate(
    integrand: &Integrand,
    n: usize,
    kind: SequenceKind,
    seed: u64,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    let dirs = sphere::rqmc_directions(n, integrand.dim(), kind, seed)?;
    let fvals = integrand.eval_set(&dirs)?;
    let mut r = mc_estimate(&fvals)?;
    r.method = Method::Rqmc;
    r.wall_time = start.elapsed();
    Ok(r)
}
