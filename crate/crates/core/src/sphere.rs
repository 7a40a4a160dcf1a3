//! Direction sets on the unit sphere S^{d-1}: i.i.d. uniform, low-discrepancy
//! (Sobol / Halton mapped through the Gaussian quantile), and randomly rotated
//! low-discrepancy sets.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measures::{check_direction, UNIT_TOL};
use crate::numeric::{dot_short, norm};

/// Which low-discrepancy sequence backs a QMC point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Sobol,
    Halton,
}

impl std::str::FromStr for SequenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sobol" => Ok(Self::Sobol),
            "halton" => Ok(Self::Halton),
            other => Err(Error::InvalidArgument(format!("unknown sequence kind {other:?}"))),
        }
    }
}

/// How a direction set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    MonteCarlo { seed: u64 },
    Qmc { kind: SequenceKind },
    Rqmc { kind: SequenceKind, rotation_seed: u64 },
    /// Supplied by the caller.
    External,
}

/// `n` unit vectors in R^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    flat: Vec<f64>,
    dim: usize,
    provenance: Provenance,
}

impl DirectionSet {
    /// Wraps caller-supplied rows after checking every row is unit norm.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || dim == 0 {
            return Err(Error::InvalidArgument("direction set must be nonempty".into()));
        }
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            check_direction(r, dim)?;
            flat.extend_from_slice(r);
        }
        Ok(Self { flat, dim, provenance: Provenance::External })
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.flat[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.flat.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.flat
    }

    /// Applies `theta -> R theta` to every row.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim;
        if rotation.nrows() != d || rotation.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rotation.nrows() });
        }
        let mut flat = Vec::with_capacity(self.flat.len());
        for v in self.rows() {
            for i in 0..d {
                let mut acc = 0.0;
                for (j, vj) in v.iter().enumerate() {
                    acc += rotation[(i, j)] * vj;
                }
                flat.push(acc);
            }
        }
        Ok(Self { flat, dim: d, provenance: self.provenance })
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidArgument(format!("sphere dimension d = {d} (need d >= 2)")))
    } else {
        Ok(())
    }
}

/// Normalizes a nonzero vector in place; returns false for (near) zero input.
fn normalize(v: &mut [f64]) -> bool {
    let r = norm(v);
    if !(r > 1e-300) || !r.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= r);
    // a second pass trims the residual norm error to ~1 ulp
    let r = norm(v);
    v.iter_mut().for_each(|x| *x /= r);
    true
}

/// `n` i.i.d. uniform directions on S^{d-1} from normalized Gaussian vectors.
pub fn sample_uniform(n: usize, d: usize, seed: u64) -> Result<DirectionSet> {
    check_dim(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut flat = Vec::with_capacity(n * d);
    let mut buf = vec![0.0; d];
    for _ in 0..n {
        loop {
            buf.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
            if normalize(&mut buf) {
                break;
            }
        }
        flat.extend_from_slice(&buf);
    }
    Ok(DirectionSet { flat, dim: d, provenance: Provenance::MonteCarlo { seed } })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile `Phi^{-1}(u)` for `u` in the open unit interval.
///
/// Rational approximation followed by one Halley refinement step against the
/// CDF.
pub fn inverse_normal_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidArgument(format!("quantile level {u} outside (0, 1)")));
    }
    if u == 0.5 {
        return Ok(0.0);
    }
    // symmetric evaluation keeps Phi^{-1}(1-u) = -Phi^{-1}(u) exact
    if u > 0.5 {
        return Ok(-lower_quantile(1.0 - u));
    }
    Ok(lower_quantile(u))
}

fn lower_quantile(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671039542597e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if u < P_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley step on Phi(x) - u
    let e = normal_cdf(x) - u;
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let step = e / density;
    x - step / (1.0 + 0.5 * x * step)
}

/// Joe-Kuo direction-number table (new-joe-kuo-6.21201), dimensions 2..=21:
/// `(degree s, polynomial coefficients a, initial m_1..m_s)`.
const SOBOL_TABLE: &[(u32, u32, &[u32])] = &[
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
];

/// Largest dimension the Sobol table covers.
pub const SOBOL_MAX_DIM: usize = SOBOL_TABLE.len() + 1;

const SOBOL_BITS: usize = 32;

fn sobol_direction_numbers(d: usize) -> Vec<[u32; SOBOL_BITS]> {
    let mut out = Vec::with_capacity(d);
    // first coordinate: van der Corput in base 2
    let mut first = [0u32; SOBOL_BITS];
    for (k, v) in first.iter_mut().enumerate() {
        *v = 1u32 << (SOBOL_BITS - 1 - k);
    }
    out.push(first);
    for &(s, a, m) in SOBOL_TABLE.iter().take(d.saturating_sub(1)) {
        let s = s as usize;
        let mut v = [0u32; SOBOL_BITS];
        for k in 0..s.min(SOBOL_BITS) {
            v[k] = m[k] << (SOBOL_BITS - 1 - k);
        }
        for k in s..SOBOL_BITS {
            let mut x = v[k - s] ^ (v[k - s] >> s);
            for j in 1..s {
                if (a >> (s - 1 - j)) & 1 == 1 {
                    x ^= v[k - j];
                }
            }
            v[k] = x;
        }
        out.push(v);
    }
    out
}

fn sobol_points(start: u64, n: usize, d: usize) -> Vec<f64> {
    let dirs = sobol_direction_numbers(d);
    let scale = 1.0 / (1u64 << SOBOL_BITS) as f64;
    let mut flat = Vec::with_capacity(n * d);
    for idx in start..start + n as u64 {
        // Gray-code ordering
        let g = idx ^ (idx >> 1);
        for v in &dirs {
            let mut x = 0u32;
            let mut bits = g;
            let mut k = 0;
            while bits != 0 {
                if bits & 1 == 1 {
                    x ^= v[k];
                }
                bits >>= 1;
                k += 1;
            }
            flat.push(x as f64 * scale);
        }
    }
    flat
}

fn first_primes(d: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(d);
    let mut c = 2u64;
    while primes.len() < d {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

fn halton_points(start: u64, n: usize, d: usize) -> Vec<f64> {
    let primes = first_primes(d);
    let mut flat = Vec::with_capacity(n * d);
    for idx in start..start + n as u64 {
        for &b in &primes {
            flat.push(radical_inverse(idx, b));
        }
    }
    flat
}

fn low_discrepancy_from(start: u64, n: usize, d: usize, kind: SequenceKind) -> Result<Vec<f64>> {
    check_dim(d)?;
    if start == 0 {
        return Err(Error::InvalidArgument("sequence index must start at 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    match kind {
        SequenceKind::Sobol => {
            if d > SOBOL_MAX_DIM {
                return Err(Error::Unsupported(format!(
                    "Sobol sequence in dimension {d} (table covers d <= {SOBOL_MAX_DIM})"
                )));
            }
            if start + n as u64 >= 1u64 << SOBOL_BITS {
                return Err(Error::Unsupported("Sobol index beyond 2^32".into()));
            }
            Ok(sobol_points(start, n, d))
        }
        SequenceKind::Halton => Ok(halton_points(start, n, d)),
    }
}

/// First `n` points (from index 1) of an unscrambled low-discrepancy sequence,
/// row-major `n x d`, every coordinate strictly inside (0, 1).
pub fn low_discrepancy(n: usize, d: usize, kind: SequenceKind) -> Result<Vec<f64>> {
    low_discrepancy_from(1, n, d, kind)
}

/// Maps a point of the open unit cube to the sphere through
/// `v = Phi^{-1}(u) / ||Phi^{-1}(u)||`.
pub fn gaussian_map(u: &[f64]) -> Result<Vec<f64>> {
    let mut z = u.iter().map(|&x| inverse_normal_cdf(x)).collect::<Result<Vec<_>>>()?;
    if !normalize(&mut z) || norm(&z) == 0.0 {
        return Err(Error::DegeneratePoint(0));
    }
    Ok(z)
}

/// Deterministic QMC direction set: a low-discrepancy sequence pushed to the
/// sphere by the Gaussian map.
///
/// The Sobol sequence is read from index 2: index 1 is the cube centre, whose
/// Gaussian image is the zero vector.
pub fn qmc_directions(n: usize, d: usize, kind: SequenceKind) -> Result<DirectionSet> {
    let start = match kind {
        SequenceKind::Sobol => 2,
        SequenceKind::Halton => 1,
    };
    let cube = low_discrepancy_from(start, n, d, kind)?;
    let mut flat = Vec::with_capacity(n * d);
    for (i, u) in cube.chunks_exact(d).enumerate() {
        let v = gaussian_map(u).map_err(|e| match e {
            Error::DegeneratePoint(_) => Error::DegeneratePoint(i + start as usize),
            other => other,
        })?;
        flat.extend(v);
    }
    Ok(DirectionSet { flat, dim: d, provenance: Provenance::Qmc { kind } })
}

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with the column signs fixed by the diagonal of the triangular
/// factor.
pub fn random_rotation(d: usize, seed: u64) -> Result<DMatrix<f64>> {
    check_dim(d)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Randomly rotated QMC directions `theta_i = R v_i`.
pub fn rqmc_directions(n: usize, d: usize, kind: SequenceKind, seed: u64) -> Result<DirectionSet> {
    let base = qmc_directions(n, d, kind)?;
    let rotation = random_rotation(d, seed)?;
    let mut set = base.rotated(&rotation)?;
    set.provenance = Provenance::Rqmc { kind, rotation_seed: seed };
    debug_assert!(set.rows().all(|r| (norm(r) - 1.0).abs() <= UNIT_TOL));
    Ok(set)
}

/// Gram matrix of inner products of a direction set (testing aid).
pub fn inner_products(set: &DirectionSet) -> Vec<f64> {
    let n = set.len();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(dot_short(set.row(i), set.row(j)));
        }
    }
    out
}
