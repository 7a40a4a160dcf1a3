//! Closed-form transport quantities for Gaussian measures.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{check_direction, GaussianMeasure};
use crate::numeric::{self, derive_seed, dot_short};
use crate::sphere::{self, SequenceKind, SOBOL_MAX_DIM};

/// Relative eigenvalue floor used for matrix square roots.
const EIG_FLOOR: f64 = 1e-14;

fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = EIG_FLOOR * top;
    let roots = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| if l > floor { l.sqrt() } else { 0.0 }),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Squared 2-Wasserstein distance between two Gaussians:
/// `||a - b||^2 + Tr A + Tr B - 2 Tr (A^{1/2} B A^{1/2})^{1/2}`.
pub fn bures_w2_squared(g1: &GaussianMeasure, g2: &GaussianMeasure) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch { expected: g1.dim(), got: g2.dim() });
    }
    let (a, b) = (g1.covariance(), g2.covariance());
    let ra = sqrt_psd(a);
    let cross = sqrt_psd(&(&ra * b * &ra));
    let mean_term = (g1.mean() - g2.mean()).norm_squared();
    let value = mean_term + a.trace() + b.trace() - 2.0 * cross.trace();
    let scale = mean_term + a.trace() + b.trace();
    if value < 0.0 {
        if value >= -1e-10 * scale.max(1.0) {
            return Ok(0.0);
        }
        return Err(Error::NotPositiveDefinite(format!(
            "Bures distance evaluated to {value:.3e}"
        )));
    }
    Ok(value)
}

/// `W_2^2` between the projections of two Gaussians on a unit direction:
/// `(theta^T (a - b))^2 + (sqrt(theta^T A theta) - sqrt(theta^T B theta))^2`.
pub fn gaussian_integrand(g1: &GaussianMeasure, g2: &GaussianMeasure, theta: &[f64]) -> Result<f64> {
    check_direction(theta, g1.dim())?;
    if g2.dim() != g1.dim() {
        return Err(Error::DimensionMismatch { expected: g1.dim(), got: g2.dim() });
    }
    Ok(integrand_unchecked(g1, g2, theta))
}

pub(crate) fn integrand_unchecked(g1: &GaussianMeasure, g2: &GaussianMeasure, theta: &[f64]) -> f64 {
    let shift = dot_short(theta, g1.mean().as_slice()) - dot_short(theta, g2.mean().as_slice());
    let s = g1.quad_form(theta).max(0.0).sqrt() - g2.quad_form(theta).max(0.0).sqrt();
    shift * shift + s * s
}

/// Exact `SW_2^2` for `N(a, A)` and `N(b, gamma A)`:
/// `||a - b||^2 / d + (1 - sqrt(gamma))^2 Tr(A) / d`.
pub fn sw2_gaussian_proportional(a: &[f64], b: &[f64], cov: &DMatrix<f64>, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} (need gamma > 0)")));
    }
    let d = a.len();
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: cov.nrows() });
    }
    if cov.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite("A".into()));
    }
    let mean_term = numeric::sum(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)));
    let c = 1.0 - gamma.sqrt();
    Ok((mean_term + c * c * cov.trace()) / d as f64)
}

/// Reference value with a standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub value: f64,
    pub std_error: f64,
}

/// Number of independent rotations used by reference computations.
pub const REFERENCE_ROTATIONS: usize = 10;

/// High-accuracy `SW_2^2` between two Gaussians: mean of the integrand over
/// [`REFERENCE_ROTATIONS`] independently rotated QMC sets of `n_ref / 10`
/// directions each. The standard error comes from the spread of the
/// per-rotation averages.
pub fn sw2_gaussian_reference(
    g1: &GaussianMeasure,
    g2: &GaussianMeasure,
    n_ref: usize,
    seed: u64,
) -> Result<ReferenceValue> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch { expected: g1.dim(), got: g2.dim() });
    }
    rqmc_reference(g1.dim(), n_ref, seed, |theta| integrand_unchecked(g1, g2, theta))
}

/// Shared RQMC reference driver.
pub(crate) fn rqmc_reference<F>(d: usize, n_ref: usize, seed: u64, f: F) -> Result<ReferenceValue>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let per = (n_ref / REFERENCE_ROTATIONS).max(1);
    let kind = if d <= SOBOL_MAX_DIM { SequenceKind::Sobol } else { SequenceKind::Halton };
    let base = sphere::qmc_directions(per, d, kind)?;
    let means: Vec<f64> = (0..REFERENCE_ROTATIONS)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let rot = sphere::random_rotation(d, derive_seed(seed, &[0x5245_4600, r as u64]))?;
            let set = base.rotated(&rot)?;
            let vals: Vec<f64> = set.as_flat().par_chunks_exact(d).map(&f).collect();
            Ok(numeric::sum(vals) / per as f64)
        })
        .collect::<Result<_>>()?;
    let value = numeric::sum(means.iter().copied()) / means.len() as f64;
    let var = numeric::sum(means.iter().map(|m| (m - value) * (m - value)))
        / (means.len() - 1) as f64;
    Ok(ReferenceValue { value, std_error: (var / means.len() as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn bures_examples() {
        let g = GaussianMeasure::new(vec![1.0, 2.0], diag(&[1.0, 3.0])).unwrap();
        assert_abs_diff_eq!(bures_w2_squared(&g, &g).unwrap(), 0.0, epsilon = 1e-12);

        let a = GaussianMeasure::new(vec![1.0, 0.0], DMatrix::identity(2, 2)).unwrap();
        let b = GaussianMeasure::new(vec![-1.0, 2.0], DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(bures_w2_squared(&a, &b).unwrap(), 8.0, epsilon = 1e-12);

        let a = GaussianMeasure::new(vec![0.0, 0.0], diag(&[1.0, 4.0])).unwrap();
        let b = GaussianMeasure::new(vec![0.0, 0.0], diag(&[4.0, 1.0])).unwrap();
        assert_abs_diff_eq!(bures_w2_squared(&a, &b).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bures_rotation_equivariance() {
        let cov_a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 0.7]);
        let cov_b = DMatrix::from_row_slice(3, 3, &[1.0, -0.3, 0.0, -0.3, 3.0, 0.4, 0.0, 0.4, 0.9]);
        let a = GaussianMeasure::new(vec![0.1, 0.2, 0.3], cov_a.clone()).unwrap();
        let b = GaussianMeasure::new(vec![-1.0, 0.0, 2.0], cov_b.clone()).unwrap();
        let base = bures_w2_squared(&a, &b).unwrap();
        let r = sphere::random_rotation(3, 77).unwrap();
        let rot = |g: &GaussianMeasure, c: &DMatrix<f64>| {
            let m = &r * g.mean();
            let c = &r * c * r.transpose();
            let c = (&c + c.transpose()) * 0.5;
            GaussianMeasure::new(m.iter().copied().collect(), c).unwrap()
        };
        let moved = bures_w2_squared(&rot(&a, &cov_a), &rot(&b, &cov_b)).unwrap();
        assert_abs_diff_eq!(base, moved, epsilon = 1e-9);
    }

    #[test]
    fn integrand_examples() {
        let a = GaussianMeasure::new(vec![0.0, 1.0], diag(&[2.0, 1.0])).unwrap();
        let theta = [0.6, -0.8];
        assert_eq!(gaussian_integrand(&a, &a, &theta).unwrap(), 0.0);

        let b = GaussianMeasure::new(vec![1.0, -1.0], diag(&[2.0, 1.0])).unwrap();
        let shift = 0.6 * (0.0 - 1.0) - 0.8 * (1.0 + 1.0);
        assert_abs_diff_eq!(gaussian_integrand(&a, &b, &theta).unwrap(), shift * shift, epsilon = 1e-14);

        let gamma = 3.0;
        let c = GaussianMeasure::new(vec![1.0, -1.0], diag(&[2.0 * gamma, gamma])).unwrap();
        let quad = 0.36 * 2.0 + 0.64;
        let expected = shift * shift + (1.0 - gamma.sqrt()).powi(2) * quad;
        assert_abs_diff_eq!(gaussian_integrand(&a, &c, &theta).unwrap(), expected, epsilon = 1e-13);
        let minus = [-0.6, 0.8];
        assert_abs_diff_eq!(
            gaussian_integrand(&a, &c, &theta).unwrap(),
            gaussian_integrand(&a, &c, &minus).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn proportional_examples() {
        let id = DMatrix::identity(2, 2);
        assert_eq!(sw2_gaussian_proportional(&[1.0, 2.0], &[1.0, 2.0], &id, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            sw2_gaussian_proportional(&[1.0, 2.0], &[0.0, 0.0], &id, 1.0).unwrap(),
            2.5
        );
        assert_abs_diff_eq!(
            sw2_gaussian_proportional(&[1.0, 1.0], &[0.0, 0.0], &id, 4.0).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert!(sw2_gaussian_proportional(&[0.0, 0.0], &[0.0, 0.0], &id, 0.0).is_err());
    }

    #[test]
    fn one_dimensional_quantile_consistency() {
        // W_2^2 between projected normals vs a quantile-node discretization
        let cov_a = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.0]);
        let cov_b = DMatrix::from_row_slice(2, 2, &[10.0, 3.0, 3.0, 10.0]);
        let a = GaussianMeasure::new(vec![0.0, 0.0], cov_a).unwrap();
        let b = GaussianMeasure::new(vec![1.0, 1.0], cov_b).unwrap();
        let t = 0.7f64;
        let theta = [t.cos(), t.sin()];
        let (ma, va) = crate::measures::project_gaussian(&a, &theta).unwrap();
        let (mb, vb) = crate::measures::project_gaussian(&b, &theta).unwrap();
        let nodes = 10_000;
        let mut acc = 0.0;
        for k in 0..nodes {
            let u = (k as f64 + 0.5) / nodes as f64;
            let z = sphere::inverse_normal_cdf(u).unwrap();
            let diff = (ma + va.sqrt() * z) - (mb + vb.sqrt() * z);
            acc += diff * diff / nodes as f64;
        }
        let exact = gaussian_integrand(&a, &b, &theta).unwrap();
        assert!((acc - exact).abs() <= 1e-3 * exact.max(1.0), "{acc} vs {exact}");
    }

    #[test]
    fn reference_matches_closed_form() {
        let cov = DMatrix::from_row_slice(3, 3, &[1.5, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 0.8]);
        let a = GaussianMeasure::new(vec![1.0, 0.0, -1.0], cov.clone()).unwrap();
        let b = GaussianMeasure::new(vec![0.0, 2.0, 0.5], &cov * 2.0).unwrap();
        let exact =
            sw2_gaussian_proportional(&[1.0, 0.0, -1.0], &[0.0, 2.0, 0.5], &cov, 2.0).unwrap();
        let r = sw2_gaussian_reference(&a, &b, 1_000_000, 9).unwrap();
        assert!((r.value - exact).abs() <= 3.0 * r.std_error + 1e-12, "{r:?} vs {exact}");
        let swapped = sw2_gaussian_reference(&b, &a, 1_000_000, 9).unwrap();
        assert!((swapped.value - r.value).abs() <= 2.0 * r.std_error + 1e-12);
        let zero = sw2_gaussian_reference(&a, &a, 1_000_000, 9).unwrap();
        assert!(zero.value.abs() <= 1e-12);
    }
}
