//! Gaussians with proportional covariances have a quadratic integrand, so SHCV
//! with degree-2 harmonics integrates it exactly.
use nalgebra::DMatrix;
use sliced_cv::estimators::{mc, shcv};
use sliced_cv::gaussian_exact::sw2_gaussian_proportional;
use sliced_cv::{build_basis, sphere, GaussianMeasure, Integrand};

fn main() -> sliced_cv::Result<()> {
    for d in [3, 5, 10] {
        let cov = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 + i as f64 * 0.2 } else { 0.1 });
        let a: Vec<f64> = (0..d).map(|i| i as f64 * 0.3).collect();
        let b: Vec<f64> = (0..d).map(|i| 1.0 - i as f64 * 0.1).collect();
        let truth = sw2_gaussian_proportional(&a, &b, &cov, 2.0)?;
        let f = Integrand::new(
            GaussianMeasure::new(a, cov.clone())?,
            GaussianMeasure::new(b, cov * 2.0)?,
            2.0,
        )?;
        let basis = build_basis(d, 2, 0)?;
        let dirs = sphere::sample_uniform(500, d, 7)?;
        let m = mc(&f, &dirs)?.estimate;
        let s = shcv(&f, &dirs, &basis)?.estimate;
        println!(
            "d = {d:>2}  s = {:>3}  truth {truth:.12}  MC error {:.2e}  SHCV error {:.2e}",
            basis.len(),
            (m - truth).abs(),
            (s - truth).abs()
        );
    }
    Ok(())
}
