//! Sliced-Wasserstein Gaussian kernel over the bundled point clouds, with
//! linear-rule SHCV weights shared across all pairs.
use std::time::Instant;

use sliced_cv::bench::{bundled_cloud, bundled_cloud_names};
use sliced_cv::kernel::{gram_mc, gram_shcv};
use sliced_cv::{build_basis, Measure};

fn main() -> sliced_cv::Result<()> {
    let names: Vec<&str> = bundled_cloud_names().collect();
    let clouds: Vec<Measure> =
        names.iter().map(|n| bundled_cloud(n).map(Measure::from)).collect::<Result<_, _>>()?;
    let basis = build_basis(3, 6, 0)?;

    let t = Instant::now();
    let k_mc = gram_mc(&clouds, &clouds, 2.0, 200, 1)?;
    let t_mc = t.elapsed();
    let t = Instant::now();
    let k_cv = gram_shcv(&clouds, &clouds, 2.0, 200, &basis, 1)?;
    let t_cv = t.elapsed();

    for (label, k, dt) in [("MC", &k_mc, t_mc), ("SHCV", &k_cv, t_cv)] {
        println!("{label} ({dt:.2?})");
        for i in 0..names.len() {
            let row: Vec<String> = (0..names.len()).map(|j| format!("{:.6}", k.matrix[(i, j)])).collect();
            println!("  {:>7} {}", names[i], row.join("  "));
        }
    }
    Ok(())
}
