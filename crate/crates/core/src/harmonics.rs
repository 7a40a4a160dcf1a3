//! Even-degree spherical harmonics on S^{d-1}, orthonormal with respect to the
//! uniform probability measure.
//!
//! Three constructions are used depending on the dimension:
//!
//! * `d = 2`: circular harmonics `sqrt(2) cos(l t)`, `sqrt(2) sin(l t)`;
//! * `d = 3`: the real Laplace basis built from associated Legendre functions;
//! * `d >= 4`: for each degree `l`, a fundamental system of points
//!   `theta_1..theta_N` is selected greedily, and the basis is
//!   `phi(theta) = c_l T^{-1} [C_l^alpha(<theta, theta_i>)]_i` where `T` is the
//!   Cholesky factor of the Gegenbauer-Gram matrix and `c_l^2 = (l + alpha) / alpha`.
//!
//! With this normalization the addition formula reads
//! `sum_k phi_{l,k}(theta)^2 = N_l^d` for every `theta`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{derive_seed, dot_short};
use crate::sphere::{self, DirectionSet};

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    u64::try_from(c).ok()
}

/// Dimension `N_l^d` of the space of degree-`l` spherical harmonics on S^{d-1}.
pub fn count_degree(d: usize, degree: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d = {d} (need d >= 2)")));
    }
    if degree == 0 {
        return Ok(1);
    }
    if d == 2 {
        return Ok(2);
    }
    let (d, l) = (d as u64, degree as u64);
    let overflow = || Error::Overflow(format!("N_{l}^{d}"));
    // (2l + d - 2) (l + d - 3)! / (l! (d - 2)!) = (2l + d - 2) binom(l + d - 3, l) / (d - 2)
    let b = binomial(l + d - 3, l).ok_or_else(overflow)? as u128;
    let num = b.checked_mul((2 * l + d - 2) as u128).ok_or_else(overflow)?;
    u64::try_from(num / (d - 2) as u128).map_err(|_| overflow())
}

fn check_max_degree(max_degree: usize) -> Result<()> {
    if max_degree < 2 || !max_degree.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "maximum degree {max_degree} must be even and >= 2"
        )));
    }
    Ok(())
}

/// Number `s` of harmonics of even degree `2, 4, ..., max_degree`:
/// `binom(max_degree + d - 1, d - 1) - 1`.
pub fn count_even_cumulative(d: usize, max_degree: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d = {d} (need d >= 2)")));
    }
    check_max_degree(max_degree)?;
    let b = binomial((max_degree + d - 1) as u64, (d - 1) as u64)
        .ok_or_else(|| Error::Overflow(format!("s for d = {d}, 2L = {max_degree}")))?;
    Ok(b - 1)
}

/// Gegenbauer polynomial `C_l^alpha` evaluated by the three-term recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerEvaluator {
    degree: usize,
    alpha: f64,
}

impl GegenbauerEvaluator {
    pub fn new(degree: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("Gegenbauer alpha = {alpha} (need > 0)")));
        }
        Ok(Self { degree, alpha })
    }

    /// Evaluator with `alpha = (d - 2) / 2` for the sphere S^{d-1}, `d >= 3`.
    pub fn for_sphere(degree: usize, d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!("Gegenbauer basis needs d >= 3, got {d}")));
        }
        Self::new(degree, (d as f64 - 2.0) / 2.0)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, z: f64) -> f64 {
        let a = self.alpha;
        let mut prev = 1.0;
        if self.degree == 0 {
            return prev;
        }
        let mut cur = 2.0 * a * z;
        for n in 2..=self.degree {
            let nf = n as f64;
            let next = (2.0 * z * (nf + a - 1.0) * cur - (nf + 2.0 * a - 2.0) * prev) / nf;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `C_l^alpha(1) = Gamma(2 alpha + l) / (Gamma(2 alpha) l!)`.
    pub fn at_one(&self) -> f64 {
        let a2 = 2.0 * self.alpha;
        (1..=self.degree).fold(1.0, |acc, k| acc * (a2 + k as f64 - 1.0) / k as f64)
    }
}

/// Basis construction options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisOptions {
    /// Candidate pool size per block is `min(factor * N, 10 N + 2000)`.
    pub candidate_factor: usize,
    /// Attempts with fresh candidate pools before giving up.
    pub max_attempts: usize,
    /// Cap on the total number of functions; the last block is truncated.
    pub max_functions: Option<usize>,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self { candidate_factor: 50, max_attempts: 3, max_functions: None }
    }
}

/// Relative floor on the Cholesky diagonal during greedy selection.
const PIVOT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
enum BlockData {
    Circular,
    Legendre {
        /// `(m, normalization)` for m = 0..=l.
        norms: Vec<f64>,
    },
    Fundamental {
        /// Selected points, row-major `count x d`.
        points: Vec<f64>,
        /// Transposed inverse Cholesky factor, `count x count`.
        inv_factor_t: DMatrix<f64>,
        scale: f64,
        gegenbauer: GegenbauerEvaluator,
        condition: f64,
    },
}

/// Harmonics of a single even degree.
#[derive(Debug, Clone)]
pub struct DegreeBlock {
    degree: usize,
    full_count: usize,
    count: usize,
    data: BlockData,
}

impl DegreeBlock {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of functions held (may be below `full_count` when capped).
    pub fn count(&self) -> usize {
        self.count
    }

    /// `N_l^d`.
    pub fn full_count(&self) -> usize {
        self.full_count
    }

    /// Condition estimate of the Gegenbauer-Gram factor (1 for closed forms).
    pub fn condition(&self) -> f64 {
        match &self.data {
            BlockData::Fundamental { condition, .. } => *condition,
            _ => 1.0,
        }
    }

    /// Fundamental-system points (row-major), when the block uses them.
    pub fn points(&self) -> Option<&[f64]> {
        match &self.data {
            BlockData::Fundamental { points, .. } => Some(points),
            _ => None,
        }
    }
}

/// Orthonormal system of even-degree spherical harmonics up to `max_degree`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    dim: usize,
    max_degree: usize,
    seed: u64,
    blocks: Vec<DegreeBlock>,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `2L`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn blocks(&self) -> &[DegreeBlock] {
        &self.blocks
    }

    /// Total number of functions `s`.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest condition estimate over the blocks.
    pub fn condition(&self) -> f64 {
        self.blocks.iter().map(DegreeBlock::condition).fold(1.0, f64::max)
    }

    /// Evaluates all functions at one direction (no norm check).
    pub fn eval_direction(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for block in &self.blocks {
            eval_block(block, theta, &mut out);
        }
        out
    }

    /// Evaluates the basis at every direction: an `n x s` matrix whose column
    /// `j` is `phi_j` at all directions.
    pub fn evaluate(&self, dirs: &DirectionSet) -> Result<DMatrix<f64>> {
        evaluate_basis(self, dirs)
    }
}

fn eval_block(block: &DegreeBlock, theta: &[f64], out: &mut Vec<f64>) {
    let l = block.degree;
    match &block.data {
        BlockData::Circular => {
            // (x + i y)^l = cos(l t) + i sin(l t) on the unit circle
            let (re, im) = complex_pow(theta[0], theta[1], l);
            let s = std::f64::consts::SQRT_2;
            let vals = [s * re, s * im];
            out.extend_from_slice(&vals[..block.count]);
        }
        BlockData::Legendre { norms } => {
            let start = out.len();
            eval_legendre_block(l, norms, theta, out);
            out.truncate(start + block.count);
        }
        BlockData::Fundamental { points, inv_factor_t, scale, gegenbauer, .. } => {
            let d = theta.len();
            let k: Vec<f64> =
                points.chunks_exact(d).map(|p| gegenbauer.eval(dot_short(theta, p))).collect();
            let n = block.count;
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..=j {
                    acc += k[i] * inv_factor_t[(i, j)];
                }
                out.push(scale * acc);
            }
        }
    }
}

fn complex_pow(x: f64, y: f64, n: usize) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..n {
        let r = re * x - im * y;
        im = re * y + im * x;
        re = r;
    }
    (re, im)
}

/// Largest degree supported by the d = 3 closed form.
const LEGENDRE_MAX_DEGREE: usize = 120;

fn legendre_norms(l: usize) -> Vec<f64> {
    use statrs::function::gamma::ln_gamma;
    (0..=l)
        .map(|m| {
            let ratio = (ln_gamma((l - m + 1) as f64) - ln_gamma((l + m + 1) as f64)).exp();
            let base = ((2 * l + 1) as f64 * ratio).sqrt();
            if m == 0 {
                base
            } else {
                std::f64::consts::SQRT_2 * base
            }
        })
        .collect()
}

/// Polynomial parts `Q_l^m(z) = P_l^m(z) / (1 - z^2)^{m/2}` for m = 0..=l
/// (no Condon-Shortley phase).
fn legendre_polynomial_parts(l: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; l + 1];
    let mut diag = 1.0; // Q_m^m = (2m - 1)!!
    for m in 0..=l {
        if m > 0 {
            diag *= (2 * m - 1) as f64;
        }
        if m == l {
            out[m] = diag;
            break;
        }
        let mut prev = diag;
        let mut cur = z * (2 * m + 1) as f64 * diag;
        for k in (m + 2)..=l {
            let next = ((2 * k - 1) as f64 * z * cur - (k + m - 1) as f64 * prev) / (k - m) as f64;
            prev = cur;
            cur = next;
        }
        out[m] = if l == m + 1 { z * (2 * m + 1) as f64 * diag } else { cur };
    }
    out
}

fn eval_legendre_block(l: usize, norms: &[f64], theta: &[f64], out: &mut Vec<f64>) {
    let (x, y, z) = (theta[0], theta[1], theta[2]);
    let q = legendre_polynomial_parts(l, z);
    out.push(norms[0] * q[0]);
    let (mut re, mut im) = (1.0, 0.0);
    for m in 1..=l {
        let r = re * x - im * y;
        im = re * y + im * x;
        re = r;
        let c = norms[m] * q[m];
        out.push(c * re);
        out.push(c * im);
    }
}

/// Greedy fundamental system by pivoted Cholesky over a candidate pool.
/// Returns the selected rows of `pool` in selection order, or the condition
/// estimate reached when the pivot floor was hit.
fn greedy_fundamental_system(
    pool: &DirectionSet,
    target: usize,
    gegenbauer: &GegenbauerEvaluator,
) -> std::result::Result<Vec<usize>, f64> {
    let p = pool.len();
    let d = pool.dim();
    let c1 = gegenbauer.at_one();
    let mut residual = vec![c1; p];
    let mut factor = vec![0.0; p * target];
    let mut selected: Vec<usize> = Vec::with_capacity(target);
    let mut is_selected = vec![false; p];
    let mut first_pivot = 0.0f64;
    let mut last_pivot = 0.0f64;
    for k in 0..target {
        let mut best = None;
        let mut best_val = f64::NEG_INFINITY;
        for (j, &r) in residual.iter().enumerate() {
            if !is_selected[j] && r > best_val {
                best_val = r;
                best = Some(j);
            }
        }
        let Some(star) = best else { return Err(f64::INFINITY) };
        let pivot = best_val.max(0.0).sqrt();
        if k == 0 {
            first_pivot = pivot;
        }
        if !(pivot > PIVOT_FLOOR * first_pivot) {
            let ratio = first_pivot / pivot.max(f64::MIN_POSITIVE);
            return Err(ratio * ratio);
        }
        last_pivot = pivot;
        selected.push(star);
        is_selected[star] = true;
        let star_row: Vec<f64> = factor[star * target..star * target + k].to_vec();
        let star_pt = pool.row(star).to_vec();
        let pts = pool.as_flat();
        factor
            .par_chunks_mut(target)
            .zip(residual.par_iter_mut())
            .enumerate()
            .for_each(|(j, (row, res))| {
                let kv = gegenbauer.eval(dot_short(&pts[j * d..(j + 1) * d], &star_pt));
                let v = (kv - dot_short(&row[..k], &star_row)) / pivot;
                row[k] = v;
                *res -= v * v;
            });
        residual[star] = 0.0;
    }
    let _ = last_pivot;
    Ok(selected)
}

fn build_fundamental_block(
    d: usize,
    degree: usize,
    count: usize,
    full_count: usize,
    seed: u64,
    opts: &BasisOptions,
) -> Result<DegreeBlock> {
    let gegenbauer = GegenbauerEvaluator::for_sphere(degree, d)?;
    let pool_size = (opts.candidate_factor.max(1) * full_count).min(10 * full_count + 2000).max(count);
    let mut worst = 0.0f64;
    for attempt in 0..opts.max_attempts.max(1) {
        let pool = sphere::sample_uniform(
            pool_size,
            d,
            derive_seed(seed, &[0x4655_4e44, degree as u64, attempt as u64]),
        )?;
        let selected = match greedy_fundamental_system(&pool, count, &gegenbauer) {
            Ok(s) => s,
            Err(cond) => {
                worst = worst.max(cond);
                continue;
            }
        };
        let points: Vec<f64> = selected.iter().flat_map(|&i| pool.row(i).to_vec()).collect();
        // refactor the selected Gram matrix from scratch for accuracy
        let gram = DMatrix::from_fn(count, count, |i, j| {
            gegenbauer.eval(dot_short(&points[i * d..(i + 1) * d], &points[j * d..(j + 1) * d]))
        });
        let Some(chol) = gram.cholesky() else {
            worst = worst.max(f64::INFINITY);
            continue;
        };
        let l = chol.l();
        let diag: Vec<f64> = (0..count).map(|i| l[(i, i)]).collect();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if !(lo > PIVOT_FLOOR * hi) {
            worst = worst.max((hi / lo) * (hi / lo));
            continue;
        }
        let inv = l
            .solve_lower_triangular(&DMatrix::identity(count, count))
            .ok_or(Error::FundamentalSystem { degree, condition: f64::INFINITY })?;
        let alpha = gegenbauer.alpha();
        let scale = ((degree as f64 + alpha) / alpha).sqrt();
        return Ok(DegreeBlock {
            degree,
            full_count,
            count,
            data: BlockData::Fundamental {
                points,
                inv_factor_t: inv.transpose(),
                scale,
                gegenbauer,
                condition: (hi / lo) * (hi / lo),
            },
        });
    }
    Err(Error::FundamentalSystem { degree, condition: worst })
}

/// Builds the even-degree basis up to `max_degree` (= 2L) with default options.
pub fn build_basis(d: usize, max_degree: usize, seed: u64) -> Result<HarmonicBasis> {
    build_basis_with(d, max_degree, seed, &BasisOptions::default())
}

pub fn build_basis_with(
    d: usize,
    max_degree: usize,
    seed: u64,
    opts: &BasisOptions,
) -> Result<HarmonicBasis> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d = {d} (need d >= 2)")));
    }
    check_max_degree(max_degree)?;
    count_even_cumulative(d, max_degree)?;
    if d == 3 && max_degree > LEGENDRE_MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "d = 3 harmonics above degree {LEGENDRE_MAX_DEGREE}"
        )));
    }
    let mut budget = opts.max_functions.unwrap_or(usize::MAX);
    let mut blocks = Vec::new();
    for degree in (2..=max_degree).step_by(2) {
        if budget == 0 {
            break;
        }
        let full = usize::try_from(count_degree(d, degree)?)
            .map_err(|_| Error::Overflow(format!("N_{degree}^{d}")))?;
        let count = full.min(budget);
        budget -= count;
        let block = match d {
            2 => DegreeBlock { degree, full_count: full, count, data: BlockData::Circular },
            3 => DegreeBlock {
                degree,
                full_count: full,
                count,
                data: BlockData::Legendre { norms: legendre_norms(degree) },
            },
            _ => build_fundamental_block(d, degree, count, full, seed, opts)?,
        };
        blocks.push(block);
    }
    Ok(HarmonicBasis { dim: d, max_degree, seed, blocks })
}

/// `n x s` design matrix of the basis at a direction set.
pub fn evaluate_basis(basis: &HarmonicBasis, dirs: &DirectionSet) -> Result<DMatrix<f64>> {
    if dirs.dim() != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, got: dirs.dim() });
    }
    let n = dirs.len();
    let s = basis.len();
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| basis.eval_direction(dirs.row(i))).collect();
    Ok(DMatrix::from_fn(n, s, |i, j| rows[i][j]))
}

/// Largest entrywise deviation of the empirical Gram matrix
/// `(1/n) Phi^T Phi` from the identity over `samples` uniform directions.
pub fn gram_deviation(basis: &HarmonicBasis, samples: usize, seed: u64) -> Result<f64> {
    let dirs = sphere::sample_uniform(samples, basis.dim, seed)?;
    let phi = evaluate_basis(basis, &dirs)?;
    let gram = phi.transpose() * &phi / samples as f64;
    let s = basis.len();
    Ok((0..s)
        .flat_map(|i| (0..s).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max))
}

/// Plain-text summary used by the `basis-info` command.
pub fn describe(basis: &HarmonicBasis, gram_samples: usize) -> Result<String> {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "dimension d        {}", basis.dim);
    let _ = writeln!(out, "max degree 2L      {}", basis.max_degree);
    for b in &basis.blocks {
        let _ = writeln!(
            out,
            "degree {:>3}         N = {:>6}  held = {:>6}  condition = {:.3e}",
            b.degree, b.full_count, b.count, b.condition()
        );
    }
    let _ = writeln!(out, "total s            {}", basis.len());
    let _ = writeln!(out, "factor condition   {:.3e}", basis.condition());
    if gram_samples > 0 {
        let dev = gram_deviation(basis, gram_samples, basis.seed ^ 0x6772_616d)?;
        let _ = writeln!(out, "gram max |G - I|   {dev:.3e} ({gram_samples} uniform samples)");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::gamma::gamma;

    #[test]
    fn counting_examples() {
        assert_eq!(count_degree(3, 2).unwrap(), 5);
        assert_eq!(count_degree(2, 5).unwrap(), 2);
        assert_eq!(count_degree(5, 2).unwrap(), 14);
        assert_eq!(count_degree(7, 0).unwrap(), 1);
        assert_eq!(count_even_cumulative(3, 16).unwrap(), 152);
        assert_eq!(count_even_cumulative(5, 6).unwrap(), 209);
        assert_eq!(count_even_cumulative(6, 4).unwrap(), 125);
        assert_eq!(count_even_cumulative(10, 4).unwrap(), 714);
        assert_eq!(count_even_cumulative(20, 4).unwrap(), 8854);
        for l in 1..10 {
            assert_eq!(count_even_cumulative(2, 2 * l).unwrap(), 2 * l as u64);
        }
        assert!(count_even_cumulative(3, 3).is_err());
        assert!(matches!(count_even_cumulative(400, 400), Err(Error::Overflow(_))));
    }

    #[test]
    fn counting_identities() {
        for d in 2..15usize {
            for l in 1..12usize {
                // N_l^d = binom(l + d - 1, d - 1) - binom(l + d - 3, d - 1)
                let a = binomial((l + d - 1) as u64, (d - 1) as u64).unwrap();
                let b = if l >= 2 { binomial((l + d - 3) as u64, (d - 1) as u64).unwrap() } else { 0 };
                assert_eq!(count_degree(d, l).unwrap(), a - b, "d={d} l={l}");
            }
            for half in 1..6usize {
                let direct: u64 = (1..=half).map(|k| count_degree(d, 2 * k).unwrap()).sum();
                assert_eq!(count_even_cumulative(d, 2 * half).unwrap(), direct);
            }
        }
    }

    fn gegenbauer_explicit(l: usize, alpha: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..=l / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let num = gamma((l - k) as f64 + alpha);
            let den = gamma(alpha) * gamma(k as f64 + 1.0) * gamma((l - 2 * k) as f64 + 1.0);
            acc += sign * num / den * (2.0 * z).powi((l - 2 * k) as i32);
        }
        acc
    }

    #[test]
    fn gegenbauer_matches_explicit_sum() {
        for &alpha in &[0.5, 1.0, 1.5, 4.0, 9.0] {
            let zero = GegenbauerEvaluator::new(0, alpha).unwrap();
            assert_eq!(zero.eval(0.3), 1.0);
            let one = GegenbauerEvaluator::new(1, alpha).unwrap();
            assert_abs_diff_eq!(one.eval(0.3), 2.0 * alpha * 0.3, epsilon = 1e-15);
            for l in 0..=8 {
                let g = GegenbauerEvaluator::new(l, alpha).unwrap();
                for k in 0..=20 {
                    let z = -1.0 + 0.1 * k as f64;
                    let e = gegenbauer_explicit(l, alpha, z);
                    assert!((g.eval(z) - e).abs() <= 1e-10 * e.abs().max(1.0), "l={l} a={alpha} z={z}");
                }
                let at1 = gamma(2.0 * alpha + l as f64) / (gamma(2.0 * alpha) * gamma(l as f64 + 1.0));
                assert!((g.eval(1.0) - at1).abs() <= 1e-10 * at1);
                assert!((g.at_one() - at1).abs() <= 1e-10 * at1);
            }
        }
        assert!(GegenbauerEvaluator::for_sphere(2, 2).is_err());
    }

    #[test]
    fn circular_basis_values() {
        let b = build_basis(2, 2, 0).unwrap();
        assert_eq!(b.len(), 2);
        let v = b.eval_direction(&[1.0, 0.0]);
        assert_abs_diff_eq!(v[0], 2f64.sqrt());
        assert_abs_diff_eq!(v[1], 0.0);
        let t = 0.3f64;
        let b = build_basis(2, 6, 0).unwrap();
        let v = b.eval_direction(&[t.cos(), t.sin()]);
        for (k, l) in [2.0, 4.0, 6.0].iter().enumerate() {
            assert_abs_diff_eq!(v[2 * k], 2f64.sqrt() * (l * t).cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(v[2 * k + 1], 2f64.sqrt() * (l * t).sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn legendre_parts_match_closed_forms() {
        let z = 0.37;
        let q = legendre_polynomial_parts(2, z);
        assert_abs_diff_eq!(q[0], 0.5 * (3.0 * z * z - 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(q[1], 3.0 * z, epsilon = 1e-15);
        assert_abs_diff_eq!(q[2], 3.0, epsilon = 1e-15);
        let q = legendre_polynomial_parts(4, z);
        let p4 = (35.0 * z.powi(4) - 30.0 * z * z + 3.0) / 8.0;
        assert_abs_diff_eq!(q[0], p4, epsilon = 1e-14);
        assert_abs_diff_eq!(q[4], 105.0, epsilon = 1e-12);
        let q = legendre_polynomial_parts(1, z);
        assert_abs_diff_eq!(q[0], z);
        assert_abs_diff_eq!(q[1], 1.0);
    }

    fn block_sums(basis: &HarmonicBasis, theta: &[f64]) -> Vec<f64> {
        let v = basis.eval_direction(theta);
        let mut out = Vec::new();
        let mut off = 0;
        for b in basis.blocks() {
            out.push(v[off..off + b.count()].iter().map(|x| x * x).sum());
            off += b.count();
        }
        out
    }

    #[test]
    fn addition_formula_small_dims() {
        let dirs_for = |d| sphere::sample_uniform(100, d, 3).unwrap();
        for (d, deg) in [(2usize, 8usize), (3, 16), (4, 6), (5, 6), (6, 4)] {
            let basis = build_basis(d, deg, 1).unwrap();
            assert_eq!(basis.len() as u64, count_even_cumulative(d, deg).unwrap());
            for theta in dirs_for(d).rows() {
                for (b, sum) in basis.blocks().iter().zip(block_sums(&basis, theta)) {
                    let n = b.full_count() as f64;
                    assert!((sum - n).abs() <= 1e-8 * n, "d={d} l={} sum={sum} N={n}", b.degree());
                }
            }
        }
    }

    #[test]
    fn parity_and_orthonormality() {
        for (d, deg) in [(3usize, 4usize), (5, 4)] {
            let basis = build_basis(d, deg, 7).unwrap();
            let dirs = sphere::sample_uniform(20, d, 8).unwrap();
            for theta in dirs.rows() {
                let minus: Vec<f64> = theta.iter().map(|x| -x).collect();
                let a = basis.eval_direction(theta);
                let b = basis.eval_direction(&minus);
                for (x, y) in a.iter().zip(&b) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-10);
                }
            }
            let dev = gram_deviation(&basis, 100_000, 3).unwrap();
            assert!(dev < 0.05, "d={d} gram deviation {dev}");
            let dirs = sphere::sample_uniform(100_000, d, 4).unwrap();
            let phi = evaluate_basis(&basis, &dirs).unwrap();
            for j in 0..phi.ncols() {
                let m = phi.column(j).sum() / 100_000.0;
                assert!(m.abs() < 0.02, "column {j} mean {m}");
            }
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = build_basis(5, 4, 99).unwrap();
        let b = build_basis(5, 4, 99).unwrap();
        let theta = [0.1, -0.2, 0.3, 0.5, 0.0];
        let n = crate::numeric::norm(&theta);
        let theta: Vec<f64> = theta.iter().map(|x| x / n).collect();
        assert_eq!(a.eval_direction(&theta), b.eval_direction(&theta));
        assert_eq!(a.blocks()[1].points(), b.blocks()[1].points());
    }

    fn homogeneous_monomials(d: usize, degree: usize) -> Vec<Vec<usize>> {
        fn rec(d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == d - 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(d, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, degree, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn fundamental_functions_are_homogeneous_polynomials() {
        for (d, deg) in [(4usize, 4usize), (5, 4)] {
            let basis = build_basis(d, deg, 5).unwrap();
            for (bi, block) in basis.blocks().iter().enumerate() {
                let monos = homogeneous_monomials(d, block.degree());
                let m = 2 * monos.len();
                let dirs = sphere::sample_uniform(m, d, 50 + bi as u64).unwrap();
                let design = DMatrix::from_fn(m, monos.len(), |i, j| {
                    let t = dirs.row(i);
                    monos[j].iter().enumerate().map(|(k, &e)| t[k].powi(e as i32)).product()
                });
                let offset: usize = basis.blocks()[..bi].iter().map(|b| b.count()).sum();
                let svd = design.clone().svd(true, true);
                for f in 0..block.count().min(6) {
                    let y = nalgebra::DVector::from_fn(m, |i, _| {
                        basis.eval_direction(dirs.row(i))[offset + f]
                    });
                    let coef = svd.solve(&y, 1e-12).unwrap();
                    let resid = (&design * coef - &y).amax();
                    assert!(resid <= 1e-8, "d={d} l={} f={f} residual {resid}", block.degree());
                }
            }
        }
    }

    #[test]
    fn capped_basis_truncates_last_block() {
        let opts = BasisOptions { max_functions: Some(30), ..BasisOptions::default() };
        let basis = build_basis_with(6, 4, 1, &opts).unwrap();
        assert_eq!(basis.len(), 30);
        assert_eq!(basis.blocks()[0].count(), 20);
        assert_eq!(basis.blocks()[1].count(), 10);
        let dev = gram_deviation(&basis, 50_000, 2).unwrap();
        assert!(dev < 0.06, "{dev}");
    }

    #[test]
    fn evaluate_checks_dimension() {
        let basis = build_basis(3, 2, 0).unwrap();
        let dirs = sphere::sample_uniform(5, 4, 0).unwrap();
        assert!(matches!(evaluate_basis(&basis, &dirs), Err(Error::DimensionMismatch { .. })));
    }
}
