//! Deterministic and randomly rotated low-discrepancy directions.
use sliced_cv::estimators::{mc, qmc_estimate, rqmc_estimate};
use sliced_cv::gaussian_exact::sw2_gaussian_reference;
use sliced_cv::{sphere, GaussianMeasure, Integrand, SequenceKind};
use nalgebra::DMatrix;

fn main() -> sliced_cv::Result<()> {
    let d = 5;
    let a = GaussianMeasure::new(vec![1.0; d], DMatrix::identity(d, d))?;
    let cov = DMatrix::from_fn(d, d, |i, j| if i == j { 2.0 } else { 0.5 });
    let b = GaussianMeasure::new(vec![0.0, 1.0, 2.0, 0.0, -1.0], cov)?;
    let truth = sw2_gaussian_reference(&a, &b, 1_000_000, 0)?;
    let f = Integrand::new(a, b, 2.0)?;

    let first = sphere::qmc_directions(4, d, SequenceKind::Sobol)?;
    for row in first.rows() {
        println!("{row:+.4?}");
    }

    let n = 512;
    let reps = 50;
    let mut se = [0.0; 3];
    for r in 0..reps {
        let m = mc(&f, &sphere::sample_uniform(n, d, r)?)?.estimate;
        let h = rqmc_estimate(&f, n, SequenceKind::Halton, r)?.estimate;
        let s = rqmc_estimate(&f, n, SequenceKind::Sobol, r)?.estimate;
        for (acc, e) in se.iter_mut().zip([m, h, s]) {
            *acc += (e - truth.value).powi(2) / reps as f64;
        }
    }
    let q = qmc_estimate(&f, n, SequenceKind::Sobol)?.estimate;
    println!("reference {:.10} (+- {:.1e})", truth.value, truth.std_error);
    println!("QMC (Sobol) error {:.3e}", (q - truth.value).abs());
    println!("MSE  MC {:.3e}  RQMC Halton {:.3e}  RQMC Sobol {:.3e}", se[0], se[1], se[2]);
    Ok(())
}
