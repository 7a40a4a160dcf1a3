//! Gram matrices of the sliced-Wasserstein Gaussian kernel
//! `k(mu, nu) = exp(-gamma * SW_p^p(mu, nu))` over collections of measures.
//!
//! All pairs share one direction set. The SHCV variant computes the
//! linear-rule weights once and reuses them for every pair.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{shcv_linear_rule, LinearRuleWeights, Method};
use crate::harmonics::HarmonicBasis;
use crate::measures::Measure;
use crate::numeric;
use crate::sphere::{self, DirectionSet};
use crate::wasserstein1d::Integrand;

#[derive(Debug, Clone, PartialEq)]
pub struct GramResult {
    /// `N_X x N_Y` kernel values.
    pub matrix: DMatrix<f64>,
    pub gamma: f64,
    pub method: Method,
    /// Number of directions.
    pub n: usize,
}

impl GramResult {
    /// Row-major `(i, j, k)` triples.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let (r, c) = self.matrix.shape();
        (0..r).flat_map(move |i| (0..c).map(move |j| (i, j, self.matrix[(i, j)])))
    }
}

fn check_inputs(xs: &[Measure], ys: &[Measure], gamma: f64) -> Result<usize> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel bandwidth gamma = {gamma} (need > 0)")));
    }
    let d = xs
        .first()
        .or(ys.first())
        .map(Measure::dim)
        .ok_or_else(|| Error::InvalidArgument("empty measure collection".into()))?;
    for m in xs.iter().chain(ys) {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.dim() });
        }
    }
    Ok(d)
}

/// Evaluates `reduce(f_{ij})` for every pair; when `xs` and `ys` are the same
/// slice only the upper triangle is computed and mirrored, with a unit
/// diagonal.
fn pairwise<F>(xs: &[Measure], ys: &[Measure], gamma: f64, p: f64, dirs: &DirectionSet, reduce: F) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let same = std::ptr::eq(xs, ys);
    let (nx, ny) = (xs.len(), ys.len());
    let pairs: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .filter(|&(i, j)| !same || i < j)
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let f = Integrand::new(xs[i].clone(), ys[j].clone(), p)?;
            let vals = f.eval_set(dirs)?;
            Ok((-gamma * reduce(&vals)?).exp())
        })
        .collect::<Result<_>>()?;
    let mut k = DMatrix::from_element(nx, ny, 1.0);
    for (&(i, j), v) in pairs.iter().zip(values) {
        k[(i, j)] = v;
        if same {
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Kernel Gram matrix with plain Monte Carlo estimates, `p = 2`.
pub fn gram_mc(xs: &[Measure], ys: &[Measure], gamma: f64, n: usize, seed: u64) -> Result<GramResult> {
    gram_mc_order(xs, ys, gamma, 2.0, n, seed)
}

/// [`gram_mc`] with a general order `p` (kernel `exp(-gamma SW_p^p)`).
pub fn gram_mc_order(
    xs: &[Measure],
    ys: &[Measure],
    gamma: f64,
    p: f64,
    n: usize,
    seed: u64,
) -> Result<GramResult> {
    let d = check_inputs(xs, ys, gamma)?;
    let dirs = sphere::sample_uniform(n, d, seed)?;
    let matrix = pairwise(xs, ys, gamma, p, &dirs, |v| Ok(numeric::sum(v.iter().copied()) / v.len() as f64))?;
    Ok(GramResult { matrix, gamma, method: Method::Mc, n })
}

/// Kernel Gram matrix with SHCV estimates, `p = 2`. The weights are computed
/// once from `basis` at the shared directions.
pub fn gram_shcv(
    xs: &[Measure],
    ys: &[Measure],
    gamma: f64,
    n: usize,
    basis: &HarmonicBasis,
    seed: u64,
) -> Result<GramResult> {
    gram_shcv_order(xs, ys, gamma, 2.0, n, basis, seed)
}

/// [`gram_shcv`] with a general order `p`.
pub fn gram_shcv_order(
    xs: &[Measure],
    ys: &[Measure],
    gamma: f64,
    p: f64,
    n: usize,
    basis: &HarmonicBasis,
    seed: u64,
) -> Result<GramResult> {
    let d = check_inputs(xs, ys, gamma)?;
    if basis.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: basis.dim() });
    }
    let dirs = sphere::sample_uniform(n, d, seed)?;
    let weights: LinearRuleWeights = shcv_linear_rule(basis, &dirs)?;
    let matrix = pairwise(xs, ys, gamma, p, &dirs, |v| weights.apply(v))?;
    Ok(GramResult { matrix, gamma, method: Method::Shcv, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::shcv;
    use crate::harmonics::build_basis;
    use crate::measures::DiscreteMeasure;

    fn two_atoms(a: [f64; 2], b: [f64; 2]) -> Measure {
        DiscreteMeasure::uniform(vec![a.to_vec(), b.to_vec()]).unwrap().into()
    }

    fn collection() -> Vec<Measure> {
        vec![
            two_atoms([1.0, 0.0], [-1.0, 0.0]),
            two_atoms([0.0, 1.0], [0.0, -1.0]),
            two_atoms([0.5, 0.5], [1.0, -0.25]),
        ]
    }

    #[test]
    fn symmetric_with_unit_diagonal() {
        let xs = collection();
        let k = gram_mc(&xs, &xs, 1.0, 200, 3).unwrap();
        for i in 0..3 {
            assert_eq!(k.matrix[(i, i)], 1.0);
            for j in 0..3 {
                assert_eq!(k.matrix[(i, j)], k.matrix[(j, i)]);
                assert!(k.matrix[(i, j)] > 0.0 && k.matrix[(i, j)] <= 1.0);
            }
        }
        let ys = collection();
        let k2 = gram_mc(&xs, &ys, 1.0, 200, 3).unwrap();
        for i in 0..3 {
            assert_eq!(k2.matrix[(i, i)], 1.0);
        }
    }

    #[test]
    fn larger_bandwidth_shrinks_entries() {
        let xs = collection();
        let a = gram_mc(&xs, &xs, 0.5, 300, 1).unwrap();
        let b = gram_mc(&xs, &xs, 2.0, 300, 1).unwrap();
        for (i, j, v) in a.entries() {
            if i != j {
                assert!(b.matrix[(i, j)] < v);
            }
        }
    }

    #[test]
    fn shared_weights_match_pairwise_shcv() {
        let xs = collection();
        let basis = build_basis(2, 8, 0).unwrap();
        let k = gram_shcv(&xs, &xs, 1.3, 100, &basis, 9).unwrap();
        let dirs = sphere::sample_uniform(100, 2, 9).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let f = Integrand::new(xs[i].clone(), xs[j].clone(), 2.0).unwrap();
                let e = (-1.3 * shcv(&f, &dirs, &basis).unwrap().estimate).exp();
                assert!((k.matrix[(i, j)] - e).abs() <= 1e-10, "({i},{j})");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let xs = collection();
        assert!(gram_mc(&xs, &xs, 0.0, 10, 0).is_err());
        let three: Vec<Measure> =
            vec![DiscreteMeasure::uniform(vec![vec![0.0, 0.0, 1.0]]).unwrap().into()];
        assert!(matches!(gram_mc(&xs, &three, 1.0, 10, 0), Err(Error::DimensionMismatch { .. })));
        let basis = build_basis(3, 2, 0).unwrap();
        assert!(gram_shcv(&xs, &xs, 1.0, 10, &basis, 0).is_err());
    }
}
