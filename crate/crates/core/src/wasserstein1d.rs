//! Exact one-dimensional optimal transport and the sliced integrand
//! `theta -> W_p^p(theta#mu, theta#nu)`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian_exact;
use crate::measures::{self, check_direction, Measure, Projected1D, WEIGHT_TOL};
use crate::numeric::CompensatedSum;
use crate::sphere::DirectionSet;

/// Breakpoint merge tolerance on cumulative weights.
const BREAKPOINT_TOL: f64 = 1e-15;

#[inline]
fn cost(diff: f64, p: f64) -> f64 {
    let a = diff.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else {
        a.powf(p)
    }
}

fn check_order(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(p))
    }
}

fn sort_values(v: &mut [f64]) {
    v.sort_by(f64::total_cmp);
}

/// `W_p^p` between two uniform measures with the same number of atoms:
/// `(1/m) sum_i |x_(i) - y_(i)|^p` over order statistics.
pub fn w1d_equal_mass(xs: &[f64], ys: &[f64], p: f64) -> Result<f64> {
    check_order(p)?;
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::InvalidMeasure("empty sample".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    Ok(equal_mass_in_place(&mut a, &mut b, p))
}

fn equal_mass_in_place(a: &mut [f64], b: &mut [f64], p: f64) -> f64 {
    sort_values(a);
    sort_values(b);
    let mut acc = CompensatedSum::new();
    for (x, y) in a.iter().zip(b.iter()) {
        acc.add(cost(x - y, p));
    }
    acc.value() / a.len() as f64
}

/// Exact `W_p^p` between two weighted discrete measures on the line.
///
/// Both quantile functions are step functions, so the integral
/// `int_0^1 |F_a^{-1}(t) - F_b^{-1}(t)|^p dt` is a finite sum over the merged
/// cumulative-weight breakpoints.
pub fn w1d_weighted(a: &Projected1D, b: &Projected1D, p: f64) -> Result<f64> {
    check_order(p)?;
    for w in [a.weights(), b.weights()] {
        let total: f64 = crate::numeric::sum(w.iter().copied());
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized(total));
        }
    }
    Ok(weighted_unchecked(a.values(), a.weights(), b.values(), b.weights(), p))
}

fn sorted_pairs(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> =
        values.iter().copied().zip(weights.iter().copied()).filter(|&(_, w)| w > 0.0).collect();
    // stable: equal values keep input order
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs
}

pub(crate) fn weighted_unchecked(
    xv: &[f64],
    xw: &[f64],
    yv: &[f64],
    yw: &[f64],
    p: f64,
) -> f64 {
    let xs = sorted_pairs(xv, xw);
    let ys = sorted_pairs(yv, yw);
    let mut acc = CompensatedSum::new();
    let (mut i, mut j) = (0usize, 0usize);
    // remaining mass of the current atom on each side
    let mut rx = xs.first().map_or(0.0, |a| a.1);
    let mut ry = ys.first().map_or(0.0, |a| a.1);
    while i < xs.len() && j < ys.len() {
        let dt = rx.min(ry);
        acc.add(cost(xs[i].0 - ys[j].0, p) * dt);
        rx -= dt;
        ry -= dt;
        if rx <= BREAKPOINT_TOL {
            i += 1;
            if i < xs.len() {
                rx += xs[i].1;
            }
        }
        if ry <= BREAKPOINT_TOL {
            j += 1;
            if j < ys.len() {
                ry += ys[j].1;
            }
        }
    }
    acc.value()
}

#[derive(Debug, Clone)]
enum Pair {
    /// Both discrete, uniform weights, same atom count.
    EqualMass,
    /// Both discrete, general weights.
    Weighted,
    /// Both Gaussian (p = 2 closed form).
    Gaussian,
}

/// The sliced integrand `f(theta) = W_p^p(theta#mu, theta#nu)` for a fixed
/// pair of measures and order `p`.
#[derive(Debug)]
pub struct Integrand {
    source: Measure,
    target: Measure,
    p: f64,
    pair: Pair,
    evaluations: AtomicU64,
}

impl Clone for Integrand {
    fn clone(&self) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            p: self.p,
            pair: self.pair.clone(),
            evaluations: AtomicU64::new(self.evaluations()),
        }
    }
}

impl Integrand {
    pub fn new(source: impl Into<Measure>, target: impl Into<Measure>, p: f64) -> Result<Self> {
        let (source, target) = (source.into(), target.into());
        check_order(p)?;
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch { expected: source.dim(), got: target.dim() });
        }
        let pair = match (&source, &target) {
            (Measure::Discrete(a), Measure::Discrete(b)) => {
                if a.len() == b.len() && a.is_uniform() && b.is_uniform() {
                    Pair::EqualMass
                } else {
                    Pair::Weighted
                }
            }
            (Measure::Gaussian(_), Measure::Gaussian(_)) => {
                if p != 2.0 {
                    return Err(Error::Unsupported(format!(
                        "Gaussian integrand of order {p} (closed form only for p = 2)"
                    )));
                }
                Pair::Gaussian
            }
            _ => {
                return Err(Error::Unsupported(
                    "mixed Gaussian/discrete pairs have no exact 1D transport here".into(),
                ))
            }
        };
        Ok(Self { source, target, p, pair, evaluations: AtomicU64::new(0) })
    }

    pub fn source(&self) -> &Measure {
        &self.source
    }

    pub fn target(&self) -> &Measure {
        &self.target
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Number of integrand evaluations so far (diagnostics only).
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Evaluates the integrand at a unit direction.
    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        check_direction(theta, self.dim())?;
        Ok(self.eval_unchecked(theta))
    }

    pub(crate) fn eval_unchecked(&self, theta: &[f64]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        match (&self.pair, &self.source, &self.target) {
            (Pair::EqualMass, Measure::Discrete(a), Measure::Discrete(b)) => {
                let mut x = measures::project_values(a, theta);
                let mut y = measures::project_values(b, theta);
                equal_mass_in_place(&mut x, &mut y, self.p)
            }
            (Pair::Weighted, Measure::Discrete(a), Measure::Discrete(b)) => {
                let x = measures::project_values(a, theta);
                let y = measures::project_values(b, theta);
                weighted_unchecked(&x, a.weights(), &y, b.weights(), self.p)
            }
            (Pair::Gaussian, Measure::Gaussian(a), Measure::Gaussian(b)) => {
                gaussian_exact::integrand_unchecked(a, b, theta)
            }
            _ => unreachable!("pair kind fixed at construction"),
        }
    }

    /// Evaluates the integrand at every direction of the set, in order.
    pub fn eval_set(&self, dirs: &DirectionSet) -> Result<Vec<f64>> {
        if dirs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dirs.dim() });
        }
        Ok(self.eval_rows(dirs.as_flat(), dirs.dim()))
    }

    pub(crate) fn eval_rows(&self, flat: &[f64], d: usize) -> Vec<f64> {
        if flat.len() / d >= 64 {
            flat.par_chunks_exact(d).map(|t| self.eval_unchecked(t)).collect()
        } else {
            flat.chunks_exact(d).map(|t| self.eval_unchecked(t)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DiscreteMeasure;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn equal_mass_examples() {
        assert_abs_diff_eq!(w1d_equal_mass(&[0.0, 1.0], &[0.0, 2.0], 2.0).unwrap(), 0.5);
        assert_abs_diff_eq!(
            w1d_equal_mass(&[3.0, 0.0, 1.0], &[2.0, 2.0, 2.0], 1.0).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(w1d_equal_mass(&[0.3, -1.0, 2.0], &[2.0, 0.3, -1.0], 3.0).unwrap(), 0.0);
        assert!(matches!(w1d_equal_mass(&[0.0], &[0.0, 1.0], 1.0), Err(Error::LengthMismatch { .. })));
        assert!(matches!(w1d_equal_mass(&[0.0], &[1.0], 0.5), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn weighted_examples() {
        let a = Projected1D::new(vec![0.0, 1.0], vec![0.75, 0.25]).unwrap();
        let b = Projected1D::new(vec![0.0, 1.0], vec![0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(w1d_weighted(&a, &b, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(w1d_weighted(&a, &a, 2.0).unwrap(), 0.0);

        let c = 1.7;
        let u = Projected1D::new(vec![0.0], vec![1.0]).unwrap();
        let v = Projected1D::new(vec![c], vec![1.0]).unwrap();
        assert_abs_diff_eq!(w1d_weighted(&u, &v, 2.0).unwrap(), c * c, epsilon = 1e-15);
    }

    #[test]
    fn weighted_rejects_bad_weights() {
        let a = Projected1D::new(vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(w1d_weighted(&a, &a, 0.9), Err(Error::InvalidOrder(_))));
    }

    fn two_atom_integrand() -> Integrand {
        let mu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        Integrand::new(mu, nu, 2.0).unwrap()
    }

    #[test]
    fn two_atom_branches() {
        let h = two_atom_integrand();
        assert_abs_diff_eq!(h.eval(&[1.0, 0.0]).unwrap(), 0.0, epsilon = 1e-15);
        let t = FRAC_PI_2;
        let v = h.eval(&[t.cos(), t.sin()]).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        // piecewise closed form on a grid
        for k in 0..400 {
            let t = 2.0 * PI * (k as f64 + 0.5) / 400.0;
            let (c, s) = (t.cos(), t.sin());
            let in_second = (t > FRAC_PI_2 && t < 0.75 * PI) || (t > 1.5 * PI && t < 1.75 * PI);
            let expected =
                if in_second { 0.5 * (c * c + (c + s) * (c + s)) } else { 0.5 * s * s };
            assert_abs_diff_eq!(h.eval(&[c, s]).unwrap(), expected, epsilon = 1e-12);
        }
        assert_eq!(h.evaluations(), 402);
    }

    #[test]
    fn identical_measures_give_zero() {
        let mu = DiscreteMeasure::uniform(vec![vec![0.2, 0.1, 3.0], vec![1.0, -2.0, 0.0]]).unwrap();
        let h = Integrand::new(mu.clone(), mu, 1.5).unwrap();
        assert_eq!(h.eval(&[0.0, 0.6, 0.8]).unwrap(), 0.0);
    }

    #[test]
    fn integrand_rejects_mixed_and_mismatched() {
        let d = DiscreteMeasure::uniform(vec![vec![0.0, 0.0]]).unwrap();
        let g = crate::measures::GaussianMeasure::standard(2).unwrap();
        assert!(Integrand::new(d.clone(), g.clone(), 2.0).is_err());
        assert!(Integrand::new(g.clone(), g, 1.0).is_err());
        let d3 = DiscreteMeasure::uniform(vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(Integrand::new(d, d3, 2.0).is_err());
    }

    fn weighted_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..7).prop_flat_map(|m| {
            (
                prop::collection::vec(-5.0f64..5.0, m),
                prop::collection::vec(0.01f64..1.0, m),
            )
        })
    }

    fn normalize(w: &[f64]) -> Vec<f64> {
        let t: f64 = w.iter().sum();
        let mut out: Vec<f64> = w.iter().map(|x| x / t).collect();
        let fix = 1.0 - out.iter().sum::<f64>();
        out[0] += fix;
        out
    }

    proptest! {
        #[test]
        fn equal_mass_matches_weighted(xs in prop::collection::vec(-10.0f64..10.0, 1..20),
                                       shift in -3.0f64..3.0, p in 1.0f64..3.5) {
            let ys: Vec<f64> = xs.iter().rev().map(|x| x * 0.7 + shift).collect();
            let a = Projected1D::uniform(xs.clone()).unwrap();
            let b = Projected1D::uniform(ys.clone()).unwrap();
            let e = w1d_equal_mass(&xs, &ys, p).unwrap();
            let w = w1d_weighted(&a, &b, p).unwrap();
            prop_assert!((e - w).abs() <= 1e-12 * (1.0 + e.abs()), "{} vs {}", e, w);
        }

        #[test]
        fn weighted_is_symmetric((xv, xw) in weighted_strategy(), (yv, yw) in weighted_strategy(),
                                 p in 1.0f64..3.0) {
            let a = Projected1D::new(xv, normalize(&xw)).unwrap();
            let b = Projected1D::new(yv, normalize(&yw)).unwrap();
            let ab = w1d_weighted(&a, &b, p).unwrap();
            let ba = w1d_weighted(&b, &a, p).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn tie_order_is_irrelevant(vals in prop::collection::vec(0i32..3, 2..8),
                                   raw in prop::collection::vec(0.05f64..1.0, 8),
                                   seed in any::<u64>()) {
            let m = vals.len();
            let values: Vec<f64> = vals.iter().map(|&v| v as f64).collect();
            let weights = normalize(&raw[..m]);
            // shuffle with a deterministic permutation from seed
            let mut idx: Vec<usize> = (0..m).collect();
            let mut s = seed;
            for i in (1..m).rev() {
                s = crate::numeric::mix64(s);
                idx.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let pv: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
            let pw: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
            let target = Projected1D::new(vec![-0.5, 1.5, 2.2], vec![0.2, 0.5, 0.3]).unwrap();
            let a = Projected1D::new(values, weights).unwrap();
            let b = Projected1D::new(pv, pw).unwrap();
            let va = w1d_weighted(&a, &target, 2.0).unwrap();
            let vb = w1d_weighted(&b, &target, 2.0).unwrap();
            prop_assert!((va - vb).abs() <= 1e-12);
        }

        #[test]
        fn integrand_is_even(t in 0.0f64..std::f64::consts::TAU, z in -1.0f64..1.0) {
            let h = {
                let mu = DiscreteMeasure::uniform(vec![
                    vec![0.0, 0.0, 1.0], vec![1.0, 0.5, 0.0], vec![-0.3, 2.0, 1.0]]).unwrap();
                let nu = DiscreteMeasure::new(
                    vec![vec![1.0, 1.0, 1.0], vec![0.0, -1.0, 0.4]], vec![0.3, 0.7]).unwrap();
                Integrand::new(mu, nu, 2.0).unwrap()
            };
            let r = (1.0 - z * z).sqrt();
            let theta = [r * t.cos(), r * t.sin(), z];
            let n = crate::numeric::norm(&theta);
            let theta = theta.map(|x| x / n);
            let minus = theta.map(|x| -x);
            let a = h.eval(&theta).unwrap();
            let b = h.eval(&minus).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
