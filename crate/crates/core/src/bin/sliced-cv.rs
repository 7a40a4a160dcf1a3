use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sliced_cv::bench::{self, BenchmarkConfig, Scenario};
use sliced_cv::estimators::{self, Method};
use sliced_cv::harmonics::{self, BasisOptions};
use sliced_cv::measures::{load_point_cloud, Measure};
use sliced_cv::numeric::derive_seed;
use sliced_cv::{kernel, sphere, Error, Integrand, Result, SequenceKind};

#[derive(Parser)]
#[command(name = "sliced-cv", version, about = "Sliced-Wasserstein estimation with spherical-harmonics control variates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate SW_p^p between two point-cloud files.
    Estimate {
        #[arg(long)]
        input_a: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "shcv")]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Maximal harmonic degree 2L (SHCV only).
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read the last column of each file as a weight.
        #[arg(long)]
        weighted: bool,
    },
    /// Run a seeded benchmark and write one CSV row per cell.
    Bench {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "100,250,500,1000")]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "mc,shcv,cvlow,cvup,cvnn,qmc,rqmc")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
        /// Directions for reference ground truths.
        #[arg(long, default_value_t = 10_000_000)]
        n_ref: usize,
        /// Directory caching reference ground truths.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Sample size of the gaussian-sampled scenario.
        #[arg(long, default_value_t = 1000)]
        m: usize,
        /// Covariance ratio of the exactness-check scenario.
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Cap on the number of harmonics.
        #[arg(long)]
        max_functions: Option<usize>,
        #[arg(long, default_value_t = 3)]
        timing_repeats: usize,
        /// Two point-cloud files replacing the bundled pair.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        clouds: Option<Vec<PathBuf>>,
    },
    /// Kernel Gram matrix exp(-gamma SW_2^2) over every file in a directory.
    Gram {
        dir: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "shcv")]
        method: Method,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe the even-degree harmonic basis for (d, 2L).
    BasisInfo {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Uniform samples for the empirical Gram check (0 disables it).
        #[arg(long, default_value_t = 20_000)]
        gram_samples: usize,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn estimate(a: &Path, b: &Path, p: f64, method: Method, n: usize, degree: usize, seed: u64, weighted: bool) -> Result<()> {
    let x = load_point_cloud(a, weighted)?;
    let y = load_point_cloud(b, weighted)?;
    let d = x.dim();
    let f = Integrand::new(x, y, p)?;
    let dirs = || sphere::sample_uniform(n, d, seed);
    let kind = |k| if d > sphere::SOBOL_MAX_DIM { SequenceKind::Halton } else { k };
    let report = match method {
        Method::Mc => estimators::mc(&f, &dirs()?)?,
        Method::Shcv => {
            let basis = harmonics::build_basis(d, degree, derive_seed(seed, &[0x4241_5349]))?;
            estimators::shcv(&f, &dirs()?, &basis)?
        }
        Method::CvLow => estimators::cv_lower(&f, &dirs()?)?,
        Method::CvUp => estimators::cv_upper(&f, &dirs()?)?,
        Method::Cvnn => estimators::cvnn(&f, &dirs()?, derive_seed(seed, &[0x434e_4e]))?,
        Method::Qmc => estimators::qmc_estimate(&f, n, kind(SequenceKind::Sobol))?,
        Method::Rqmc => estimators::rqmc_estimate(&f, n, SequenceKind::Halton, seed)?,
    };
    println!("method,d,n,estimate,wall_time_ms");
    println!(
        "{},{},{},{:.16e},{:.16e}",
        report.method,
        d,
        report.n,
        report.estimate,
        report.wall_time.as_secs_f64() * 1e3
    );
    if report.fallback {
        eprintln!("note: control variate was degenerate; the plain Monte Carlo value is reported");
    }
    Ok(())
}

fn load_dir(dir: &Path, weighted: bool) -> Result<Vec<Measure>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!("no files in {}", dir.display())));
    }
    for (i, p) in paths.iter().enumerate() {
        eprintln!("{i}\t{}", p.display());
    }
    paths.iter().map(|p| Ok(load_point_cloud(p, weighted)?.into())).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate { input_a, input_b, p, method, n, degree, seed, weighted } => {
            estimate(&input_a, &input_b, p, method, n, degree, seed, weighted)
        }
        Command::Bench {
            scenario,
            d,
            n_grid,
            methods,
            reps,
            seed,
            degree,
            out,
            n_ref,
            cache_dir,
            m,
            gamma,
            max_functions,
            timing_repeats,
            clouds,
        } => {
            let cfg = BenchmarkConfig {
                n_grid,
                methods,
                reps,
                seed,
                degree,
                max_functions,
                m,
                gamma,
                n_ref,
                cache_dir,
                timing_repeats,
                clouds: clouds.map(|c| (c[0].clone(), c[1].clone())),
                ..BenchmarkConfig::new(scenario, d)
            };
            let run = bench::run_benchmark(&cfg)?;
            bench::write_csv(&run.rows, output(Some(&out))?)?;
            eprintln!(
                "ground truth {:.12} (standard error {:.2e}, {:?})",
                run.truth.value, run.truth.std_error, run.truth.source
            );
            if let Some(s) = run.basis_size {
                eprintln!("harmonics s = {s}");
            }
            eprint!("{}", bench::format_summary(&bench::summarize(&run.rows)));
            Ok(())
        }
        Command::Gram { dir, gamma, n, method, degree, seed, weighted, out } => {
            let ms = load_dir(&dir, weighted)?;
            let g = match method {
                Method::Mc => kernel::gram_mc(&ms, &ms, gamma, n, seed)?,
                Method::Shcv => {
                    let basis = harmonics::build_basis(ms[0].dim(), degree, derive_seed(seed, &[0x4241_5349]))?;
                    kernel::gram_shcv(&ms, &ms, gamma, n, &basis, seed)?
                }
                other => return Err(Error::Unsupported(format!("gram with method {other}"))),
            };
            let mut w = output(out.as_deref())?;
            writeln!(w, "i,j,k_value")?;
            for (i, j, v) in g.entries() {
                writeln!(w, "{i},{j},{v:.16e}")?;
            }
            w.flush()?;
            Ok(())
        }
        Command::BasisInfo { d, degree, seed, gram_samples } => {
            let s = harmonics::count_even_cumulative(d, degree)?;
            println!("harmonics of even degree 2..={degree} on S^{}: s = {s}", d - 1);
            let basis = harmonics::build_basis_with(d, degree, seed, &BasisOptions::default())?;
            print!("{}", harmonics::describe(&basis, gram_samples)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
