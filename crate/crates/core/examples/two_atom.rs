//! Two-atom measures in the plane: MC and SHCV against the closed form
//! 3/8 - 1/(2 pi).
use sliced_cv::bench::TWO_ATOM_SW2;
use sliced_cv::estimators::{mc, shcv};
use sliced_cv::{build_basis, sphere, DiscreteMeasure, Integrand};

fn main() -> sliced_cv::Result<()> {
    let mu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0]])?;
    let nu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 1.0]])?;
    let f = Integrand::new(mu, nu, 2.0)?;
    let basis = build_basis(2, 8, 0)?;

    println!("exact SW_2^2 = {TWO_ATOM_SW2:.10}");
    println!("{:>7} {:>14} {:>14}", "n", "|MC - SW|", "|SHCV - SW|");
    for (k, n) in [100, 1_000, 10_000, 100_000].into_iter().enumerate() {
        let dirs = sphere::sample_uniform(n, 2, k as u64)?;
        let a = mc(&f, &dirs)?.estimate;
        let b = shcv(&f, &dirs, &basis)?.estimate;
        println!("{n:>7} {:>14.3e} {:>14.3e}", (a - TWO_ATOM_SW2).abs(), (b - TWO_ATOM_SW2).abs());
    }
    Ok(())
}
