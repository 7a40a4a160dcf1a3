//! All estimators on empirical measures sampled from two random Gaussians in
//! d = 5, compared by mean squared error over seeded replications.
use sliced_cv::bench::{format_summary, run_benchmark, summarize, BenchmarkConfig, Scenario};

fn main() -> sliced_cv::Result<()> {
    let cfg = BenchmarkConfig {
        n_grid: vec![250, 500],
        reps: 20,
        degree: 6,
        m: 500,
        n_ref: 200_000,
        timing_repeats: 1,
        ..BenchmarkConfig::new(Scenario::GaussianSampled, 5)
    };
    let run = run_benchmark(&cfg)?;
    println!("reference SW_2^2 = {:.8} (standard error {:.1e})", run.truth.value, run.truth.std_error);
    println!("SHCV uses s = {} harmonics", run.basis_size.unwrap_or(0));
    print!("{}", format_summary(&summarize(&run.rows)));
    Ok(())
}
