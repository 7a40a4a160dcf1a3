//! Probability measures on R^d and their one-dimensional projections.
//!
//! Two concrete families are supported: weighted point sets
//! ([`DiscreteMeasure`]) and multivariate normals ([`GaussianMeasure`]).
//! [`Measure`] is the sum type the integrand and the estimators work with.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::{self, dot_short};

/// Tolerance on `|sum(weights) - 1|`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Tolerance on `| ||theta|| - 1 |`.
pub const UNIT_TOL: f64 = 1e-12;

/// Weighted point set in R^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    dim: usize,
}

impl DiscreteMeasure {
    /// Builds a measure from `m` rows of length `d` and explicit weights.
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let m = atoms.len();
        if m == 0 {
            return Err(Error::InvalidMeasure("at least one atom required".into()));
        }
        let dim = atoms[0].len();
        if dim == 0 {
            return Err(Error::InvalidMeasure("atoms must have dimension >= 1".into()));
        }
        let mut flat = Vec::with_capacity(m * dim);
        for row in &atoms {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(flat, dim, weights)
    }

    /// Uniformly weighted measure `(1/m) sum delta_{x_i}`.
    pub fn uniform(atoms: Vec<Vec<f64>>) -> Result<Self> {
        let m = atoms.len();
        if m == 0 {
            return Err(Error::InvalidMeasure("at least one atom required".into()));
        }
        Self::new(atoms, vec![1.0 / m as f64; m])
    }

    /// Builds a measure from a row-major buffer of `weights.len() * dim` coordinates.
    pub fn from_flat(atoms: Vec<f64>, dim: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("atoms must have dimension >= 1".into()));
        }
        let m = weights.len();
        if m == 0 {
            return Err(Error::InvalidMeasure("at least one atom required".into()));
        }
        if atoms.len() != m * dim {
            return Err(Error::LengthMismatch { left: atoms.len(), right: m * dim });
        }
        if atoms.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite coordinate".into()));
        }
        check_probability_vector(&weights)?;
        Ok(Self { atoms, weights, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[f64]> {
        self.atoms.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals `1/m` exactly.
    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| x == w)
    }

    /// Translates every atom by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: shift.len() });
        }
        let atoms = self
            .atoms
            .chunks_exact(self.dim)
            .flat_map(|row| row.iter().zip(shift).map(|(x, c)| x + c))
            .collect();
        Ok(Self { atoms, weights: self.weights.clone(), dim: self.dim })
    }

    /// Weighted mean of the atoms.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| numeric::sum(self.atoms().zip(&self.weights).map(|(x, w)| w * x[k])))
            .collect()
    }

    /// Weighted scatter matrix `sum_i w_i (x_i - mean)(x_i - mean)^T`.
    pub fn scatter(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (x, &w) in self.atoms().zip(&self.weights) {
            let c = DVector::from_iterator(self.dim, x.iter().zip(&mean).map(|(a, b)| a - b));
            s += w * &c * c.transpose();
        }
        s
    }
}

/// Multivariate normal `N(mean, covariance)` with SPD covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianMeasure {
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::InvalidMeasure("dimension must be >= 1".into()));
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: covariance.nrows() });
        }
        let scale = covariance.amax().max(1.0);
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::NotPositiveDefinite(format!(
                        "covariance not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if covariance.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite("Cholesky factorization failed".into()));
        }
        Ok(Self { mean: DVector::from_vec(mean), covariance })
    }

    /// `N(0, I_d)`.
    pub fn standard(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d], DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: shift.len() });
        }
        let mean = self.mean.iter().zip(shift).map(|(a, b)| a + b).collect();
        Self::new(mean, self.covariance.clone())
    }

    /// Quadratic form `theta^T Sigma theta`.
    pub fn quad_form(&self, theta: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.covariance[(i, j)] * theta[j];
            }
            acc += theta[i] * row;
        }
        acc
    }
}

/// Empirical or Gaussian probability measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Gaussian(GaussianMeasure),
}

impl Measure {
    pub fn dim(&self) -> usize {
        match self {
            Measure::Discrete(m) => m.dim(),
            Measure::Gaussian(g) => g.dim(),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            Measure::Discrete(m) => m.mean(),
            Measure::Gaussian(g) => g.mean().iter().copied().collect(),
        }
    }

    /// Centered second-moment matrix (covariance for Gaussians).
    pub fn scatter(&self) -> DMatrix<f64> {
        match self {
            Measure::Discrete(m) => m.scatter(),
            Measure::Gaussian(g) => g.covariance().clone(),
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        Ok(match self {
            Measure::Discrete(m) => Measure::Discrete(m.translated(shift)?),
            Measure::Gaussian(g) => Measure::Gaussian(g.translated(shift)?),
        })
    }
}

impl From<DiscreteMeasure> for Measure {
    fn from(m: DiscreteMeasure) -> Self {
        Measure::Discrete(m)
    }
}

impl From<GaussianMeasure> for Measure {
    fn from(g: GaussianMeasure) -> Self {
        Measure::Gaussian(g)
    }
}

/// A discrete measure on the real line: values with probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Projected1D {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Projected1D {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch { left: values.len(), right: weights.len() });
        }
        if values.is_empty() {
            return Err(Error::InvalidMeasure("at least one atom required".into()));
        }
        check_probability_vector(&weights)?;
        Ok(Self { values, weights })
    }

    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        Self::new(values, vec![1.0 / m.max(1) as f64; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_probability_vector(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidMeasure("weights must be finite and nonnegative".into()));
    }
    let total = numeric::sum(weights.iter().copied());
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::NotNormalized(total));
    }
    Ok(())
}

/// Checks that `theta` is a unit vector of dimension `d`.
pub fn check_direction(theta: &[f64], d: usize) -> Result<()> {
    if theta.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: theta.len() });
    }
    let deviation = (numeric::norm(theta) - 1.0).abs();
    if !(deviation <= UNIT_TOL) {
        return Err(Error::NonUnitDirection { deviation });
    }
    Ok(())
}

/// Push-forward of a discrete measure by `x -> <theta, x>`.
pub fn project(measure: &DiscreteMeasure, theta: &[f64]) -> Result<Projected1D> {
    check_direction(theta, measure.dim())?;
    Ok(project_unchecked(measure, theta))
}

pub(crate) fn project_values(measure: &DiscreteMeasure, theta: &[f64]) -> Vec<f64> {
    measure.atoms().map(|x| dot_short(theta, x)).collect()
}

pub(crate) fn project_unchecked(measure: &DiscreteMeasure, theta: &[f64]) -> Projected1D {
    Projected1D { values: project_values(measure, theta), weights: measure.weights.clone() }
}

/// Mean and variance of the projected normal `N(theta^T a, theta^T A theta)`.
pub fn project_gaussian(g: &GaussianMeasure, theta: &[f64]) -> Result<(f64, f64)> {
    check_direction(theta, g.dim())?;
    let mean = dot_short(theta, g.mean().as_slice());
    Ok((mean, g.quad_form(theta)))
}

/// p-th absolute moment `int ||x||^p dmu`.
///
/// Gaussians only support `p = 2`, where the moment is `Tr(Sigma) + ||mean||^2`.
pub fn moment_p(measure: &Measure, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidOrder(p));
    }
    match measure {
        Measure::Discrete(m) => Ok(numeric::sum(
            m.atoms().zip(m.weights()).map(|(x, w)| w * numeric::norm(x).powf(p)),
        )),
        Measure::Gaussian(g) => {
            if p != 2.0 {
                return Err(Error::Unsupported(format!(
                    "Gaussian moment of order {p} (only p = 2 is implemented)"
                )));
            }
            Ok(g.covariance().trace() + g.mean().norm_squared())
        }
    }
}

/// Lipschitz constant of `theta -> W_p^p(theta#mu, theta#nu)` on the sphere,
/// from the p-th moments of both measures.
pub fn lipschitz_bound(mu: &Measure, nu: &Measure, p: f64) -> Result<f64> {
    let mp_mu = moment_p(mu, p)?;
    let mp_nu = moment_p(nu, p)?;
    Ok(lipschitz_from_moments(mp_mu, mp_nu, p))
}

/// `p 2^{p-1} max(M_mu, M_nu)^{(p-1)/p} (M_mu^{1/p} + M_nu^{1/p})`.
pub fn lipschitz_from_moments(mp_mu: f64, mp_nu: f64, p: f64) -> f64 {
    let max = mp_mu.max(mp_nu);
    let head = p * 2f64.powf(p - 1.0) * max.powf((p - 1.0) / p);
    head * (mp_mu.powf(1.0 / p) + mp_nu.powf(1.0 / p))
}

/// Parses the whitespace-separated point-cloud text format.
///
/// With `weighted`, the last column is read as a nonnegative weight. Weights
/// (or uniform weights) are renormalized to sum to one.
pub fn parse_point_cloud(text: &str, weighted: bool) -> Result<DiscreteMeasure> {
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("not a number: {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: idx + 1, message: "non-finite value".into() });
            }
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        if weighted {
            let w = row.pop().ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "missing weight column".into(),
            })?;
            if w < 0.0 {
                return Err(Error::Parse { line: idx + 1, message: "negative weight".into() });
            }
            weights.push(w);
        } else {
            weights.push(1.0);
        }
        coords.extend(row);
    }
    let m = weights.len();
    if m == 0 {
        return Err(Error::InvalidMeasure("no points in input".into()));
    }
    let dim = coords.len() / m;
    if dim == 0 {
        return Err(Error::InvalidMeasure("points have no coordinates".into()));
    }
    let total = numeric::sum(weights.iter().copied());
    if !(total > 0.0) {
        return Err(Error::InvalidMeasure("total weight is zero".into()));
    }
    let mut weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // absorb the renormalization residue so the sum is 1 to round-off
    let residue = 1.0 - numeric::sum(weights.iter().copied());
    if let Some(w) = weights.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *w += residue;
    }
    DiscreteMeasure::from_flat(coords, dim, weights)
}

pub fn load_point_cloud(path: impl AsRef<Path>, weighted: bool) -> Result<DiscreteMeasure> {
    let text = std::fs::read_to_string(path)?;
    parse_point_cloud(&text, weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn project_axis() {
        let m = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let p = project(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0]);
        assert_eq!(p.weights(), &[0.5, 0.5]);

        let m = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(project(&m, &[0.0, 1.0]).unwrap().values(), &[0.0, 1.0]);
    }

    #[test]
    fn project_diagonal() {
        let m = DiscreteMeasure::new(vec![vec![1.0, 2.0, 3.0]], vec![1.0]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let p = project(&m, &[s, s, s]).unwrap();
        assert_abs_diff_eq!(p.values()[0], 6.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.values()[0], 3.4641, epsilon = 1e-4);
    }

    #[test]
    fn project_rejects_bad_direction() {
        let m = DiscreteMeasure::uniform(vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(project(&m, &[1.0, 0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(project(&m, &[1.0, 1e-5]), Err(Error::NonUnitDirection { .. })));
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![0.9]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![1.5, -0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![], vec![]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0, 1.0], vec![1.0]], vec![0.5, 0.5]).is_err());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianMeasure::new(vec![0.0, 0.0], bad).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianMeasure::new(vec![0.0, 0.0], asym).is_err());
    }

    #[test]
    fn gaussian_projection_examples() {
        let g = GaussianMeasure::standard(4).unwrap();
        let theta = [0.5, 0.5, 0.5, 0.5];
        let (m, v) = project_gaussian(&g, &theta).unwrap();
        assert_abs_diff_eq!(m, 0.0);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);

        let g = GaussianMeasure::new(vec![1.0, 1.0], DMatrix::identity(2, 2)).unwrap();
        assert_eq!(project_gaussian(&g, &[1.0, 0.0]).unwrap(), (1.0, 1.0));

        let g = GaussianMeasure::new(vec![0.0, 0.0], DMatrix::from_diagonal_element(2, 2, 1.0))
            .unwrap();
        let g = GaussianMeasure::new(
            g.mean().iter().copied().collect(),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]),
        )
        .unwrap();
        assert_eq!(project_gaussian(&g, &[0.0, 1.0]).unwrap(), (0.0, 4.0));
    }

    #[test]
    fn gaussian_projection_matches_samples() {
        let cov = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5]);
        let g = GaussianMeasure::new(vec![0.5, -1.0, 2.0], cov.clone()).unwrap();
        let chol = cov.cholesky().unwrap().l();
        let theta = {
            let v = [0.3, -0.8, 0.5];
            let n = numeric::norm(&v);
            v.map(|x| x / n)
        };
        let (_, var) = project_gaussian(&g, &theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let proj: Vec<f64> = (0..n)
            .map(|_| {
                let z = DVector::from_fn(3, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = g.mean() + &chol * z;
                dot_short(&theta, x.as_slice())
            })
            .collect();
        let mean = proj.iter().sum::<f64>() / n as f64;
        let emp = proj.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((emp - var).abs() / var < 0.05, "empirical {emp} vs {var}");
    }

    #[test]
    fn moments() {
        let origin = Measure::Discrete(DiscreteMeasure::uniform(vec![vec![0.0, 0.0]]).unwrap());
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(moment_p(&origin, p).unwrap(), 0.0);
        }
        let m = Measure::Discrete(DiscreteMeasure::uniform(vec![vec![3.0, 4.0]]).unwrap());
        assert_abs_diff_eq!(moment_p(&m, 2.0).unwrap(), 25.0, epsilon = 1e-12);
        let g = Measure::Gaussian(GaussianMeasure::standard(3).unwrap());
        assert_abs_diff_eq!(moment_p(&g, 2.0).unwrap(), 3.0);
        assert!(matches!(moment_p(&g, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(moment_p(&m, 0.5), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn moment_matches_direct_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let atoms: Vec<Vec<f64>> =
            (0..17).map(|_| (0..4).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let raw: Vec<f64> = (0..17).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let fix = 1.0 - w.iter().sum::<f64>();
        w[0] += fix;
        let m = DiscreteMeasure::new(atoms.clone(), w.clone()).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let mut direct = 0.0;
            for (x, wi) in atoms.iter().zip(&w) {
                let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                direct += wi * r.powf(p);
            }
            assert_abs_diff_eq!(moment_p(&Measure::Discrete(m.clone()), p).unwrap(), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn lipschitz_examples() {
        assert_abs_diff_eq!(lipschitz_from_moments(2.0, 3.0, 1.0), 5.0);
        assert_abs_diff_eq!(lipschitz_from_moments(1.0, 1.0, 2.0), 8.0);
        let origin = Measure::Discrete(DiscreteMeasure::uniform(vec![vec![0.0, 0.0]]).unwrap());
        for p in [1.0, 2.0, 3.0] {
            assert_eq!(lipschitz_bound(&origin, &origin, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn translation_shifts_projection() {
        let m = DiscreteMeasure::uniform(vec![vec![0.1, 0.2], vec![-1.0, 3.0], vec![2.5, 0.0]])
            .unwrap();
        let c = [0.7, -1.3];
        let theta = [0.6, 0.8];
        let base = project(&m, &theta).unwrap();
        let moved = project(&m.translated(&c).unwrap(), &theta).unwrap();
        let offset = dot_short(&theta, &c);
        for (a, b) in base.values().iter().zip(moved.values()) {
            assert_abs_diff_eq!(a + offset, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn parse_cloud_formats() {
        let text = "# comment\n0 0 1\n1 0 3\n\n";
        let m = parse_point_cloud(text, true).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.weights(), &[0.25, 0.75]);
        let m = parse_point_cloud(text, false).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(m.is_uniform());
        assert!(parse_point_cloud("1 2\n3\n", false).is_err());
        assert!(parse_point_cloud("1 x\n", false).is_err());
        assert!(parse_point_cloud("# nothing\n", false).is_err());
        assert!(parse_point_cloud("1 -1\n", true).is_err());
    }

    #[test]
    fn scatter_of_two_points() {
        let m = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let s = m.scatter();
        assert_abs_diff_eq!(s[(0, 0)], 1.0);
        assert_abs_diff_eq!(s[(1, 1)], 0.0);
        assert_eq!(m.mean(), vec![1.0, 0.0]);
    }
}
