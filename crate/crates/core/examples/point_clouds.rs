//! SW_2^2 between two bundled 3D point clouds with every estimator on the same
//! direction budget.
use sliced_cv::bench::bundled_cloud;
use sliced_cv::estimators::{cv_lower, cv_upper, cvnn, mc, qmc_estimate, rqmc_estimate, shcv};
use sliced_cv::{build_basis, sphere, Integrand, SequenceKind};

fn main() -> sliced_cv::Result<()> {
    let f = Integrand::new(bundled_cloud("torus")?, bundled_cloud("vase")?, 2.0)?;
    let n = 500;
    let dirs = sphere::sample_uniform(n, 3, 42)?;
    let basis = build_basis(3, 8, 0)?;
    let reports = [
        mc(&f, &dirs)?,
        shcv(&f, &dirs, &basis)?,
        cv_lower(&f, &dirs)?,
        cv_upper(&f, &dirs)?,
        cvnn(&f, &dirs, 43)?,
        qmc_estimate(&f, n, SequenceKind::Sobol)?,
        rqmc_estimate(&f, n, SequenceKind::Halton, 44)?,
    ];
    for r in reports {
        println!("{:<6} {:.10}  {:>9.3?}", r.method.name(), r.estimate, r.wall_time);
    }
    Ok(())
}
