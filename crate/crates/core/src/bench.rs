//! Seeded benchmark harness: scenarios, ground truth, per-cell estimation,
//! CSV emission and summaries.
//!
//! A cell is one `(method, n, replication)` triple. Cell seeds come from
//! [`derive_seed`]`(base, [scenario, method, n, replication])`. The paired
//! methods (MC, CV_low, CV_up, CVNN, SHCV) draw their directions from the seed
//! `derive_seed(base, [scenario, PAIRED, n, replication])`, so they see the same
//! directions within a replication. QMC and RQMC build their own sets.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{self, Method};
use crate::gaussian_exact::{self, ReferenceValue};
use crate::harmonics::{build_basis_with, BasisOptions, HarmonicBasis};
use crate::measures::{parse_point_cloud, DiscreteMeasure, GaussianMeasure, Measure};
use crate::numeric::derive_seed;
use crate::sphere::{self, DirectionSet, SequenceKind, SOBOL_MAX_DIM};
use crate::wasserstein1d::Integrand;

/// `SW_2^2` of the two-atom pair `{(0,0),(1,0)}` vs `{(0,0),(1,1)}`.
pub const TWO_ATOM_SW2: f64 = 0.375 - 1.0 / (2.0 * std::f64::consts::PI);

/// Method index reserved for the paired direction stream.
pub const PAIRED_STREAM: u64 = 0x7061_6972;

const BUNDLED: [(&str, &str); 3] = [
    ("torus", include_str!("../data/torus.txt")),
    ("spring", include_str!("../data/spring.txt")),
    ("vase", include_str!("../data/vase.txt")),
];

/// Names of the bundled 3D point clouds.
pub fn bundled_cloud_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// One of the bundled 3D point clouds (1024 points each).
pub fn bundled_cloud(name: &str) -> Result<DiscreteMeasure> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled cloud named '{name}'")))?;
    parse_point_cloud(text, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Random Gaussians, closed-form integrand.
    GaussianExact,
    /// Empirical measures of `m` samples from random Gaussians.
    GaussianSampled,
    /// Two bundled (or user-supplied) 3D point clouds.
    PointCloud,
    /// The two-atom pair in the plane.
    TwoAtom,
    /// Gaussians with proportional covariances `B = gamma A`.
    ExactnessCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::GaussianExact,
        Scenario::GaussianSampled,
        Scenario::PointCloud,
        Scenario::TwoAtom,
        Scenario::ExactnessCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::GaussianExact => "gaussian-exact",
            Scenario::GaussianSampled => "gaussian-sampled",
            Scenario::PointCloud => "pointcloud",
            Scenario::TwoAtom => "two-atom",
            Scenario::ExactnessCheck => "exactness-check",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub scenario: Scenario,
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub seed: u64,
    /// Maximal harmonic degree `2L` for SHCV.
    pub degree: usize,
    /// Optional cap on the number of harmonics.
    pub max_functions: Option<usize>,
    /// Sample size for `gaussian-sampled`.
    pub m: usize,
    /// Covariance ratio for `exactness-check`.
    pub gamma: f64,
    pub p: f64,
    /// Directions used for reference ground truths.
    pub n_ref: usize,
    pub cache_dir: Option<PathBuf>,
    /// Point-cloud files replacing the bundled torus / spring pair.
    pub clouds: Option<(PathBuf, PathBuf)>,
    pub qmc_kind: SequenceKind,
    pub rqmc_kind: SequenceKind,
    /// Runs per cell; the reported time is the median.
    pub timing_repeats: usize,
}

impl BenchmarkConfig {
    /// Desk-scale defaults for a scenario.
    pub fn new(scenario: Scenario, d: usize) -> Self {
        Self {
            scenario,
            d,
            n_grid: vec![100, 250, 500, 1000],
            methods: Method::ALL.to_vec(),
            reps: 100,
            seed: 0,
            degree: 6,
            max_functions: None,
            m: 1000,
            gamma: 2.0,
            p: 2.0,
            n_ref: 10_000_000,
            cache_dir: None,
            clouds: None,
            qmc_kind: SequenceKind::Sobol,
            rqmc_kind: SequenceKind::Halton,
            timing_repeats: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods selected".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("n grid must be nonempty and strictly increasing".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::InvalidArgument("n grid entries must be positive".into()));
        }
        if self.degree < 2 || !self.degree.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("degree {} must be even and >= 2", self.degree)));
        }
        match self.scenario {
            Scenario::TwoAtom if self.d != 2 => {
                Err(Error::InvalidArgument("two-atom scenario lives in d = 2".into()))
            }
            Scenario::PointCloud if self.clouds.is_none() && self.d != 3 => {
                Err(Error::InvalidArgument("bundled point clouds live in d = 3".into()))
            }
            _ if self.d < 2 => Err(Error::InvalidArgument("d must be >= 2".into())),
            Scenario::ExactnessCheck if !(self.gamma > 0.0) => {
                Err(Error::InvalidArgument("gamma must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    fn stream(&self, keys: &[u64]) -> u64 {
        let mut all = vec![self.scenario.index()];
        all.extend_from_slice(keys);
        derive_seed(self.seed, &all)
    }

    /// Seed of cell `(method, n, replication)`.
    pub fn cell_seed(&self, method: Method, n: usize, rep: usize) -> u64 {
        self.stream(&[method.index(), n as u64, rep as u64])
    }

    /// Seed of the direction set shared by the paired methods.
    pub fn paired_seed(&self, n: usize, rep: usize) -> u64 {
        self.stream(&[PAIRED_STREAM, n as u64, rep as u64])
    }

    fn param_seed(&self) -> u64 {
        self.stream(&[0x5041_524d])
    }

    fn basis_seed(&self) -> u64 {
        self.stream(&[0x4241_5349])
    }
}

/// The measure pair of a scenario and its closed-form answer, if any.
#[derive(Debug, Clone)]
pub struct Problem {
    pub scenario: Scenario,
    pub integrand: Integrand,
    pub closed_form: Option<f64>,
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn gaussian_params(d: usize, rng: &mut ChaCha20Rng) -> (Vec<f64>, DMatrix<f64>) {
    let mean: Vec<f64> = (0..d).map(|_| 1.0 + normal(rng)).collect();
    let s = DMatrix::from_fn(d, d, |_, _| normal(rng));
    let cov = &s * s.transpose();
    // exact symmetry for validation
    let cov = (&cov + cov.transpose()) * 0.5;
    (mean, cov)
}

fn sample_gaussian(g: &GaussianMeasure, m: usize, rng: &mut ChaCha20Rng) -> Result<DiscreteMeasure> {
    let d = g.dim();
    let chol = g
        .covariance()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("sampling covariance".into()))?;
    let l = chol.l();
    let mut flat = Vec::with_capacity(m * d);
    for _ in 0..m {
        let z: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        for i in 0..d {
            let mut acc = g.mean()[i];
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                acc += l[(i, j)] * zj;
            }
            flat.push(acc);
        }
    }
    DiscreteMeasure::from_flat(flat, d, vec![1.0 / m as f64; m])
}

/// Builds the measure pair for a configuration (deterministic in the seed).
pub fn build_problem(cfg: &BenchmarkConfig) -> Result<Problem> {
    cfg.validate()?;
    let d = cfg.d;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.param_seed());
    let (integrand, closed_form) = match cfg.scenario {
        Scenario::GaussianExact => {
            let (a, ca) = gaussian_params(d, &mut rng);
            let (b, cb) = gaussian_params(d, &mut rng);
            let f = Integrand::new(GaussianMeasure::new(a, ca)?, GaussianMeasure::new(b, cb)?, cfg.p)?;
            (f, None)
        }
        Scenario::GaussianSampled => {
            let (a, ca) = gaussian_params(d, &mut rng);
            let (b, cb) = gaussian_params(d, &mut rng);
            let x = sample_gaussian(&GaussianMeasure::new(a, ca)?, cfg.m, &mut rng)?;
            let y = sample_gaussian(&GaussianMeasure::new(b, cb)?, cfg.m, &mut rng)?;
            (Integrand::new(x, y, cfg.p)?, None)
        }
        Scenario::PointCloud => {
            let (x, y) = match &cfg.clouds {
                Some((pa, pb)) => (
                    crate::measures::load_point_cloud(pa, false)?,
                    crate::measures::load_point_cloud(pb, false)?,
                ),
                None => (bundled_cloud("torus")?, bundled_cloud("spring")?),
            };
            if x.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
            }
            (Integrand::new(x, y, cfg.p)?, None)
        }
        Scenario::TwoAtom => {
            let x = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0]])?;
            let y = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![1.0, 1.0]])?;
            let exact = (cfg.p == 2.0).then_some(TWO_ATOM_SW2);
            (Integrand::new(x, y, cfg.p)?, exact)
        }
        Scenario::ExactnessCheck => {
            let (a, ca) = gaussian_params(d, &mut rng);
            let b: Vec<f64> = (0..d).map(|_| 1.0 + normal(&mut rng)).collect();
            let truth = gaussian_exact::sw2_gaussian_proportional(&a, &b, &ca, cfg.gamma)?;
            let cb = &ca * cfg.gamma;
            let f = Integrand::new(GaussianMeasure::new(a, ca)?, GaussianMeasure::new(b, cb)?, cfg.p)?;
            (f, Some(truth))
        }
    };
    Ok(Problem { scenario: cfg.scenario, integrand, closed_form })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthSource {
    ClosedForm,
    Reference { n_ref: usize },
    Cache,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub value: f64,
    pub std_error: f64,
    pub source: TruthSource,
}

fn hash_measure(h: &mut Sha256, m: &Measure) {
    match m {
        Measure::Discrete(x) => {
            h.update(b"discrete");
            h.update((x.dim() as u64).to_le_bytes());
            h.update((x.len() as u64).to_le_bytes());
            for a in x.atoms() {
                a.iter().for_each(|v| h.update(v.to_bits().to_le_bytes()));
            }
            x.weights().iter().for_each(|v| h.update(v.to_bits().to_le_bytes()));
        }
        Measure::Gaussian(g) => {
            h.update(b"gaussian");
            h.update((g.dim() as u64).to_le_bytes());
            g.mean().iter().for_each(|v| h.update(v.to_bits().to_le_bytes()));
            g.covariance().iter().for_each(|v| h.update(v.to_bits().to_le_bytes()));
        }
    }
}

/// Content hash identifying a reference computation.
pub fn truth_key(integrand: &Integrand, n_ref: usize, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(b"sliced-cv truth v1");
    hash_measure(&mut h, integrand.source());
    hash_measure(&mut h, integrand.target());
    h.update(integrand.p().to_bits().to_le_bytes());
    h.update((n_ref as u64).to_le_bytes());
    h.update(seed.to_le_bytes());
    hex::encode(h.finalize())
}

fn cache_body(key: &str, r: &ReferenceValue) -> String {
    format!("key {key}\nvalue {:016x}\nstd_error {:016x}\n", r.value.to_bits(), r.std_error.to_bits())
}

fn read_cache(path: &Path, key: &str) -> Option<ReferenceValue> {
    let mut text = String::new();
    std::fs::File::open(path).ok()?.read_to_string(&mut text).ok()?;
    let (body, check) = text.rsplit_once("check ")?;
    if hex::encode(Sha256::digest(body.as_bytes())) != check.trim() {
        return None;
    }
    let mut fields = body.lines().map(|l| l.split_once(' '));
    let (_, k) = fields.next()??;
    let (_, v) = fields.next()??;
    let (_, s) = fields.next()??;
    if k != key {
        return None;
    }
    Some(ReferenceValue {
        value: f64::from_bits(u64::from_str_radix(v, 16).ok()?),
        std_error: f64::from_bits(u64::from_str_radix(s, 16).ok()?),
    })
}

fn write_cache(path: &Path, key: &str, r: &ReferenceValue) -> Result<()> {
    let body = cache_body(key, r);
    let check = hex::encode(Sha256::digest(body.as_bytes()));
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{body}check {check}")?;
    Ok(())
}

/// Ground truth for a problem: the closed form when known, otherwise an RQMC
/// reference with `n_ref` directions. References are cached in `cache_dir`
/// under their content hash; unreadable or mismatching cache files are
/// recomputed and overwritten.
pub fn ground_truth(problem: &Problem, n_ref: usize, seed: u64, cache_dir: Option<&Path>) -> Result<GroundTruth> {
    if let Some(v) = problem.closed_form {
        return Ok(GroundTruth { value: v, std_error: 0.0, source: TruthSource::ClosedForm });
    }
    if n_ref < gaussian_exact::REFERENCE_ROTATIONS * 2 {
        return Err(Error::MissingGroundTruth(format!("n_ref = {n_ref} too small for a reference")));
    }
    let f = &problem.integrand;
    let key = truth_key(f, n_ref, seed);
    let path = cache_dir.map(|dir| dir.join(format!("{key}.truth")));
    if let Some(r) = path.as_deref().and_then(|p| read_cache(p, &key)) {
        return Ok(GroundTruth { value: r.value, std_error: r.std_error, source: TruthSource::Cache });
    }
    let r = match (f.source(), f.target()) {
        (Measure::Gaussian(a), Measure::Gaussian(b)) => gaussian_exact::sw2_gaussian_reference(a, b, n_ref, seed)?,
        _ => gaussian_exact::rqmc_reference(f.dim(), n_ref, seed, |t| f.eval_unchecked(t))?,
    };
    if let (Some(dir), Some(p)) = (cache_dir, path.as_deref()) {
        std::fs::create_dir_all(dir)?;
        write_cache(p, &key, &r)?;
    }
    Ok(GroundTruth { value: r.value, std_error: r.std_error, source: TruthSource::Reference { n_ref } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: Method,
    pub d: usize,
    pub n: usize,
    pub replication: usize,
    pub estimate: f64,
    pub abs_error: f64,
    pub squared_error: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub rows: Vec<BenchmarkRow>,
    pub truth: GroundTruth,
    /// Number of harmonics used by SHCV, when it ran.
    pub basis_size: Option<usize>,
}

fn pick_kind(kind: SequenceKind, d: usize) -> SequenceKind {
    if kind == SequenceKind::Sobol && d > SOBOL_MAX_DIM {
        SequenceKind::Halton
    } else {
        kind
    }
}

fn estimate_cell(
    cfg: &BenchmarkConfig,
    f: &Integrand,
    basis: Option<&HarmonicBasis>,
    method: Method,
    n: usize,
    rep: usize,
) -> Result<(f64, f64)> {
    let d = cfg.d;
    let seed = cfg.cell_seed(method, n, rep);
    let dirs: Option<DirectionSet> = match method {
        Method::Qmc | Method::Rqmc => None,
        _ => Some(sphere::sample_uniform(n, d, cfg.paired_seed(n, rep))?),
    };
    let run = || -> Result<f64> {
        let r = match method {
            Method::Mc => estimators::mc(f, dirs.as_ref().unwrap())?,
            Method::Shcv => estimators::shcv(f, dirs.as_ref().unwrap(), basis.unwrap())?,
            Method::CvLow => estimators::cv_lower(f, dirs.as_ref().unwrap())?,
            Method::CvUp => estimators::cv_upper(f, dirs.as_ref().unwrap())?,
            Method::Cvnn => estimators::cvnn(f, dirs.as_ref().unwrap(), seed)?,
            Method::Qmc => estimators::qmc_estimate(f, n, pick_kind(cfg.qmc_kind, d))?,
            Method::Rqmc => estimators::rqmc_estimate(f, n, pick_kind(cfg.rqmc_kind, d), seed)?,
        };
        Ok(r.estimate)
    };
    let mut times = Vec::with_capacity(cfg.timing_repeats.max(1));
    let mut estimate = f64::NAN;
    for k in 0..cfg.timing_repeats.max(1) {
        let t0 = Instant::now();
        let e = run()?;
        times.push(t0.elapsed().as_secs_f64() * 1e3);
        if k == 0 {
            estimate = e;
        }
    }
    times.sort_by(f64::total_cmp);
    Ok((estimate, times[times.len() / 2]))
}

/// Runs every `(method, n, replication)` cell. Rows come back in canonical
/// order (methods as configured, then `n`, then replication).
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    let problem = build_problem(cfg)?;
    let truth = ground_truth(&problem, cfg.n_ref, cfg.stream(&[0x5452_5554]), cfg.cache_dir.as_deref())?;
    run_with_truth(cfg, &problem, truth)
}

/// [`run_benchmark`] with a problem and ground truth supplied by the caller.
pub fn run_with_truth(cfg: &BenchmarkConfig, problem: &Problem, truth: GroundTruth) -> Result<BenchmarkRun> {
    cfg.validate()?;
    let basis = if cfg.methods.contains(&Method::Shcv) {
        let opts = BasisOptions { max_functions: cfg.max_functions, ..BasisOptions::default() };
        Some(build_basis_with(cfg.d, cfg.degree, cfg.basis_seed(), &opts)?)
    } else {
        None
    };
    let cells: Vec<(Method, usize, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.n_grid.iter().flat_map(move |&n| (0..cfg.reps).map(move |r| (m, n, r))))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(method, n, rep)| -> Result<BenchmarkRow> {
            let (estimate, wall_time_ms) = estimate_cell(cfg, &problem.integrand, basis.as_ref(), method, n, rep)?;
            let abs_error = (estimate - truth.value).abs();
            Ok(BenchmarkRow {
                method,
                d: cfg.d,
                n,
                replication: rep,
                estimate,
                abs_error,
                squared_error: abs_error * abs_error,
                wall_time_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkRun { rows, truth, basis_size: basis.map(|b| b.len()) })
}

pub const CSV_HEADER: [&str; 8] =
    ["method", "d", "n", "replication", "estimate", "abs_error", "squared_error", "wall_time_ms"];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes rows as CSV with 17 significant digits.
pub fn write_csv<W: Write>(rows: &[BenchmarkRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.d.to_string(),
            r.n.to_string(),
            r.replication.to_string(),
            real(r.estimate),
            real(r.abs_error),
            real(r.squared_error),
            real(r.wall_time_ms),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct RawRow {
    method: String,
    d: usize,
    n: usize,
    replication: usize,
    estimate: f64,
    abs_error: f64,
    squared_error: f64,
    wall_time_ms: f64,
}

/// Parses CSV produced by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchmarkRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse { line: 1, message: format!("unexpected header {headers:?}") });
    }
    rdr.deserialize::<RawRow>()
        .enumerate()
        .map(|(i, rec)| {
            let r = rec.map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?;
            Ok(BenchmarkRow {
                method: r.method.parse()?,
                d: r.d,
                n: r.n,
                replication: r.replication,
                estimate: r.estimate,
                abs_error: r.abs_error,
                squared_error: r.squared_error,
                wall_time_ms: r.wall_time_ms,
            })
        })
        .collect()
}

/// Aggregate over the replications of one `(method, n)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: Method,
    pub d: usize,
    pub n: usize,
    pub reps: usize,
    pub mse: f64,
    pub mean_time_ms: f64,
    pub time_sd_ms: f64,
}

pub fn summarize(rows: &[BenchmarkRow]) -> Vec<Summary> {
    let mut groups: BTreeMap<(Method, usize, usize), Vec<&BenchmarkRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.method, r.n, r.d)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((method, n, d), rs)| {
            let k = rs.len() as f64;
            let mse = crate::numeric::sum(rs.iter().map(|r| r.squared_error)) / k;
            let mean_time = crate::numeric::sum(rs.iter().map(|r| r.wall_time_ms)) / k;
            let sd = if rs.len() > 1 {
                (crate::numeric::sum(rs.iter().map(|r| (r.wall_time_ms - mean_time).powi(2))) / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            Summary { method, d, n, reps: rs.len(), mse, mean_time_ms: mean_time, time_sd_ms: sd }
        })
        .collect()
}

/// Fixed-width table of summaries, one line per `(method, n)`.
pub fn format_summary(summaries: &[Summary]) -> String {
    let mut out = format!("{:<7} {:>4} {:>7} {:>5} {:>12} {:>11} {:>10}\n", "method", "d", "n", "reps", "mse", "time_ms", "sd_ms");
    for s in summaries {
        out.push_str(&format!(
            "{:<7} {:>4} {:>7} {:>5} {:>12.4e} {:>11.3} {:>10.3}\n",
            s.method.name(),
            s.d,
            s.n,
            s.reps,
            s.mse,
            s.mean_time_ms,
            s.time_sd_ms
        ));
    }
    out
}

/// Least-squares slope of `log2(mse)` against `log2(n)` for one method.
pub fn log2_slope(summaries: &[Summary], method: Method) -> Option<f64> {
    let pts: Vec<(f64, f64)> = summaries
        .iter()
        .filter(|s| s.method == method && s.mse > 0.0)
        .map(|s| ((s.n as f64).log2(), s.mse.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
