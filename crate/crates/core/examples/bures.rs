//! Closed forms for Gaussians: the Bures-Wasserstein distance, the sliced
//! integrand, and an RQMC reference for SW_2^2.
use nalgebra::DMatrix;
use sliced_cv::gaussian_exact::{bures_w2_squared, gaussian_integrand, sw2_gaussian_reference};
use sliced_cv::GaussianMeasure;

fn main() -> sliced_cv::Result<()> {
    let a = GaussianMeasure::new(vec![0.0, 0.0, 0.0], DMatrix::from_diagonal_element(3, 3, 1.0))?;
    let cov = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 0.5]);
    let b = GaussianMeasure::new(vec![1.0, -1.0, 0.5], cov)?;
    println!("W_2^2          {:.12}", bures_w2_squared(&a, &b)?);
    println!("f(e_1)         {:.12}", gaussian_integrand(&a, &b, &[1.0, 0.0, 0.0])?);
    let r = sw2_gaussian_reference(&a, &b, 1_000_000, 0)?;
    println!("SW_2^2         {:.12} (+- {:.1e})", r.value, r.std_error);
    Ok(())
}
