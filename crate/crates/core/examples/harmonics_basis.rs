//! Counting even-degree harmonics and checking the addition formula
//! sum_k phi_{l,k}(theta)^2 = N_l^d on random directions.
use sliced_cv::harmonics::{build_basis, count_degree, count_even_cumulative, describe};
use sliced_cv::sphere;

fn main() -> sliced_cv::Result<()> {
    println!("{:>4} {:>4} {:>8}", "d", "2L", "s");
    for (d, deg) in [(3, 16), (5, 6), (6, 4), (10, 4), (20, 4)] {
        println!("{d:>4} {deg:>4} {:>8}", count_even_cumulative(d, deg)?);
    }

    let basis = build_basis(5, 4, 1)?;
    print!("\n{}", describe(&basis, 20_000)?);
    for theta in sphere::sample_uniform(3, 5, 2)?.rows() {
        let v = basis.eval_direction(theta);
        let mut off = 0;
        for b in basis.blocks() {
            let sum: f64 = v[off..off + b.count()].iter().map(|x| x * x).sum();
            println!("degree {}: sum phi^2 = {sum:.12}  N = {}", b.degree(), count_degree(5, b.degree())?);
            off += b.count();
        }
    }
    Ok(())
}
