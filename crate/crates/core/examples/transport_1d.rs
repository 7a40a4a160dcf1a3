//! Exact one-dimensional transport between weighted atoms, and the sliced
//! integrand it induces.
use sliced_cv::measures::{project, Projected1D};
use sliced_cv::wasserstein1d::{w1d_equal_mass, w1d_weighted};
use sliced_cv::{DiscreteMeasure, Integrand};

fn main() -> sliced_cv::Result<()> {
    println!("W_2^2 equal mass   {}", w1d_equal_mass(&[0.0, 1.0, 3.0], &[2.0, 0.5, 1.0], 2.0)?);
    let a = Projected1D::new(vec![0.0, 1.0], vec![0.25, 0.75])?;
    let b = Projected1D::new(vec![0.5, 2.0, 4.0], vec![0.5, 0.25, 0.25])?;
    for p in [1.0, 2.0, 3.0] {
        println!("W_{p}^{p} weighted     {:.12}", w1d_weighted(&a, &b, p)?);
    }

    let mu = DiscreteMeasure::new(vec![vec![0.0, 0.0], vec![1.0, 2.0]], vec![0.3, 0.7])?;
    let nu = DiscreteMeasure::uniform(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 2.0]])?;
    let f = Integrand::new(mu.clone(), nu, 2.0)?;
    for k in 0..4 {
        let t = std::f64::consts::PI * k as f64 / 4.0;
        let theta = [t.cos(), t.sin()];
        let proj = project(&mu, &theta)?;
        println!("theta = {k} pi/4  mu values {:?}  f = {:.6}", proj.values(), f.eval(&theta)?);
    }
    Ok(())
}
