//! Side-by-side solver runs on one problem instance.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gfista::imaging::{
    add_gaussian_noise, add_poisson_noise, compute_reference, phantom, primal_from_dual, problem_hash,
    HuberRofSpec, PoissonTvSpec, ReferenceCache,
};
use gfista::{
    CompositeProblem, Gfista, Point, Reference, ScalarField, SeparableQuadratic, SolverConfig, StepMode, Trace,
    WithConvexity,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pgm::{load_pgm, save_pgm, PgmError};
use crate::trace_csv::{emit_csv, format_float, CsvError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProblemKind {
    HuberRof,
    PoissonTv,
    QuadraticToy,
}

impl ProblemKind {
    pub fn label(self) -> &'static str {
        match self {
            ProblemKind::HuberRof => "huber-rof",
            ProblemKind::PoissonTv => "poisson-tv",
            ProblemKind::QuadraticToy => "quadratic-toy",
        }
    }

    /// `(lambda, eps)` used when the configuration leaves them unset.
    pub fn default_weights(self) -> (f64, f64) {
        match self {
            ProblemKind::HuberRof => (0.1, 0.01),
            ProblemKind::PoissonTv => (0.1, 0.15),
            ProblemKind::QuadraticToy => (0.1, 0.05),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Fixed step, strong convexity ignored.
    Fista,
    GfistaFixed,
    ClassicBt,
    FullBt,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Fista, Variant::GfistaFixed, Variant::ClassicBt, Variant::FullBt];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fista => "fista",
            Variant::GfistaFixed => "gfista-fixed",
            Variant::ClassicBt => "classic-bt",
            Variant::FullBt => "full-bt",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| format!("unknown variant {s:?}; expected one of fista, gfista-fixed, classic-bt, full-bt"))
    }
}

/// Comma-separated, duplicate-free variant list.
pub fn parse_variants(s: &str) -> Result<Vec<Variant>, String> {
    let mut out: Vec<Variant> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let v: Variant = part.parse()?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err("at least one variant is required".into());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    /// Clean input image; a synthetic phantom of `size x size` if absent.
    pub image: Option<PathBuf>,
    pub size: usize,
    pub out: PathBuf,
    /// Defaults to `<out>/cache`.
    pub cache: Option<PathBuf>,
    pub lambda: Option<f64>,
    pub eps: Option<f64>,
    pub rho: f64,
    pub c_bt: f64,
    pub t0: f64,
    /// Initial Lipschitz estimate of the backtracking variants; defaults to
    /// the known constant `L_f`.
    pub l0: Option<f64>,
    pub i_max: usize,
    pub iters: usize,
    pub variants: Vec<Variant>,
    pub seed: u64,
    pub variance: f64,
    pub peak: f64,
    pub inner_iters: usize,
    pub warm_start: bool,
    pub reference_iters: usize,
    pub monotone: bool,
    pub recompute_y: bool,
    pub verify: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::HuberRof,
            image: None,
            size: 64,
            out: PathBuf::from("out"),
            cache: None,
            lambda: None,
            eps: None,
            rho: 0.9,
            c_bt: 0.9,
            t0: 1.0,
            l0: None,
            i_max: 50,
            iters: 100,
            variants: Variant::ALL.to_vec(),
            seed: 0,
            variance: 0.005,
            peak: 45.0,
            inner_iters: 10,
            warm_start: false,
            reference_iters: 5000,
            monotone: false,
            recompute_y: true,
            verify: true,
        }
    }
}

impl ExperimentConfig {
    pub fn weights(&self) -> (f64, f64) {
        let (lambda, eps) = self.problem.default_weights();
        (self.lambda.unwrap_or(lambda), self.eps.unwrap_or(eps))
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(|| self.out.join("cache"))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.variants.is_empty() {
            return bad("at least one variant is required".into());
        }
        if self.iters == 0 || self.reference_iters == 0 || self.size == 0 || self.inner_iters == 0 {
            return bad("iters, reference-iters, size and inner-iters must be positive".into());
        }
        if let Some(path) = &self.image {
            if !path.is_file() {
                return bad(format!("image {} does not exist", path.display()));
            }
        }
        Ok(())
    }

    /// Solver settings of one variant, given the problem's `L_f`.
    pub fn solver_config(&self, variant: Variant, lipschitz: f64) -> SolverConfig {
        let base = match variant {
            Variant::Fista | Variant::GfistaFixed => SolverConfig::fixed(1.0 / lipschitz, self.iters),
            Variant::ClassicBt => {
                SolverConfig::backtracking(StepMode::ClassicBacktracking, self.l0.unwrap_or(lipschitz), self.iters)
            }
            Variant::FullBt => {
                SolverConfig::backtracking(StepMode::FullBacktracking, self.l0.unwrap_or(lipschitz), self.iters)
            }
        };
        SolverConfig {
            i_max: self.i_max,
            check_invariants: self.verify,
            ..base
        }
        .with_rho(self.rho)
        .with_c_bt(self.c_bt)
        .with_t0(self.t0)
        .with_monotone(self.monotone)
        .with_recompute_y(self.recompute_y)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("variant {variant}: certificate violated at iteration {iteration} (gap {gap:e} > bound {bound:e})")]
    CertificateViolation {
        variant: Variant,
        iteration: usize,
        gap: f64,
        bound: f64,
    },
    #[error("variant {variant}: {source}")]
    Solver {
        variant: Variant,
        #[source]
        source: gfista::Error,
    },
    #[error(transparent)]
    Core(#[from] gfista::Error),
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: Variant,
    pub csv: PathBuf,
    pub iterations: usize,
    pub final_objective: f64,
    pub final_gap: Option<f64>,
    pub final_relative_gap: Option<f64>,
    /// Largest `gap / bound` over iterations with a positive bound.
    pub max_gap_over_bound: Option<f64>,
    pub certificate_applies: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub problem: ProblemKind,
    pub reference_objective: f64,
    pub variants: Vec<VariantSummary>,
    pub summary_csv: PathBuf,
}

/// Round-off allowance when comparing a gap with its bound.
pub fn certificate_slack(reference_objective: f64) -> f64 {
    1e-10 * (1.0 + reference_objective.abs())
}

pub fn clean_image(config: &ExperimentConfig) -> Result<ScalarField, ExperimentError> {
    Ok(match &config.image {
        Some(path) => load_pgm(path)?,
        None => phantom(config.size, config.size),
    })
}

pub fn huber_rof_spec(config: &ExperimentConfig, clean: &ScalarField) -> Result<HuberRofSpec, ExperimentError> {
    let (lambda, eps) = config.weights();
    let noisy = add_gaussian_noise(clean, config.variance, config.seed)?;
    Ok(HuberRofSpec::new(noisy, lambda, eps)?)
}

pub fn poisson_tv_spec(config: &ExperimentConfig, clean: &ScalarField) -> Result<PoissonTvSpec, ExperimentError> {
    let (lambda, eps) = config.weights();
    let counts = add_poisson_noise(clean, config.peak, config.seed)?;
    Ok(PoissonTvSpec::with_unit_background(counts, lambda, eps, config.inner_iters)?)
}

/// Deterministic separable toy problem of dimension `size` with a
/// closed-form minimizer.
pub fn quadratic_toy(config: &ExperimentConfig) -> SeparableQuadratic {
    let (l1, ridge) = config.weights();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let curvature = (0..config.size).map(|_| rng.gen_range(0.05..4.0)).collect();
    let center = (0..config.size).map(|_| rng.gen_range(-3.0..3.0)).collect();
    SeparableQuadratic::new(curvature, center, ridge, l1)
}

/// Cache key of the reference solution of an imaging problem.
pub fn reference_key(config: &ExperimentConfig, clean: &ScalarField) -> u64 {
    let (lambda, eps) = config.weights();
    let noise = match config.problem {
        ProblemKind::PoissonTv => config.peak,
        _ => config.variance,
    };
    let params = [lambda, eps, noise, config.inner_iters as f64];
    let mut data = vec![clean.rows() as f64, clean.cols() as f64];
    data.extend_from_slice(clean.as_slice());
    problem_hash(config.problem.label(), &params, &data)
}

fn run_variant<Pr: CompositeProblem>(
    problem: &Pr,
    variant: Variant,
    config: &ExperimentConfig,
    x0: &Pr::Point,
    reference: &Reference<Pr::Point>,
) -> Result<Trace<Pr::Point>, ExperimentError> {
    let lipschitz = problem
        .lipschitz_f()
        .ok_or_else(|| ExperimentError::Config("problem has no Lipschitz constant".into()))?;
    let solver = config.solver_config(variant, lipschitz);
    let result = if variant == Variant::Fista {
        let plain = WithConvexity::ignoring_strong_convexity(problem);
        Gfista::new(&plain, solver).with_reference(reference).run(x0)
    } else {
        Gfista::new(problem, solver).with_reference(reference).run(x0)
    };
    result.map_err(|source| ExperimentError::Solver { variant, source })
}

/// Runs every variant concurrently on its own copy of the problem, so that
/// per-instance prox state is never shared; results come back in variant
/// order.
fn run_all<Pr: CompositeProblem + Clone + Send>(
    problem: &Pr,
    config: &ExperimentConfig,
    x0: &Pr::Point,
    reference: &Reference<Pr::Point>,
) -> Vec<Result<Trace<Pr::Point>, ExperimentError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .variants
            .iter()
            .map(|&variant| {
                let local = problem.clone();
                scope.spawn(move || run_variant(&local, variant, config, x0, reference))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

fn summarize<P>(variant: Variant, trace: &Trace<P>, csv: PathBuf) -> VariantSummary {
    let last = trace.last();
    let max_gap_over_bound = trace
        .records
        .iter()
        .filter_map(|r| match (r.gap, r.certificate_bound) {
            (Some(g), Some(b)) if b > 0.0 => Some(g / b),
            _ => None,
        })
        .reduce(f64::max);
    VariantSummary {
        variant,
        csv,
        iterations: trace.records.len() - 1,
        final_objective: last.objective,
        final_gap: last.gap,
        final_relative_gap: last.relative_gap,
        max_gap_over_bound,
        certificate_applies: trace.certificate_applies,
    }
}

fn write_summary(path: &Path, reference_objective: f64, rows: &[VariantSummary]) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_path(path).map_err(CsvError::from)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    writer
        .write_record([
            "variant",
            "iterations",
            "final_objective",
            "final_gap",
            "final_relative_gap",
            "max_gap_over_bound",
            "certificate_applies",
            "reference_objective",
        ])
        .map_err(CsvError::from)?;
    for r in rows {
        writer
            .write_record([
                r.variant.name().to_string(),
                r.iterations.to_string(),
                format_float(r.final_objective),
                opt(r.final_gap),
                opt(r.final_relative_gap),
                opt(r.max_gap_over_bound),
                r.certificate_applies.to_string(),
                format_float(reference_objective),
            ])
            .map_err(CsvError::from)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes traces and images, then checks certificates if enabled.
fn finish<P>(
    config: &ExperimentConfig,
    reference_objective: f64,
    results: Vec<Result<Trace<P>, ExperimentError>>,
    mut save_image: impl FnMut(Variant, &P) -> Result<(), ExperimentError>,
) -> Result<Summary, ExperimentError> {
    let mut traces = Vec::with_capacity(results.len());
    for (variant, result) in config.variants.iter().copied().zip(results) {
        traces.push((variant, result?));
    }
    let mut rows = Vec::with_capacity(traces.len());
    for (variant, trace) in &traces {
        let csv = config.out.join(format!("{variant}.csv"));
        emit_csv(trace, &csv)?;
        save_image(*variant, &trace.solution)?;
        rows.push(summarize(*variant, trace, csv));
    }
    let summary_csv = config.out.join("summary.csv");
    write_summary(&summary_csv, reference_objective, &rows)?;

    if config.verify {
        let slack = certificate_slack(reference_objective);
        for (variant, trace) in &traces {
            if let Some(r) = trace.certificate_violation(slack) {
                return Err(ExperimentError::CertificateViolation {
                    variant: *variant,
                    iteration: r.k,
                    gap: r.gap.unwrap_or(f64::NAN),
                    bound: r.certificate_bound.unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(Summary {
        problem: config.problem,
        reference_objective,
        variants: rows,
        summary_csv,
    })
}

/// Long-run reference of the configured imaging problem, loaded from or
/// stored into the cache. Returns the objective and the cache file.
pub fn reference_only(config: &ExperimentConfig) -> Result<(f64, Option<PathBuf>), ExperimentError> {
    config.validate()?;
    let cache = ReferenceCache::new(config.cache_dir());
    match config.problem {
        ProblemKind::HuberRof => {
            let clean = clean_image(config)?;
            let problem = huber_rof_spec(config, &clean)?.build();
            let key = reference_key(config, &clean);
            let r = cache.get_or_compute(key, config.reference_iters, config.seed, || {
                compute_reference(&problem, &problem.initial_point(), config.reference_iters)
            })?;
            Ok((r.objective, Some(cache.path_for(key, config.reference_iters, config.seed))))
        }
        ProblemKind::PoissonTv => {
            let clean = clean_image(config)?;
            let problem = poisson_tv_spec(config, &clean)?.build()?;
            let key = reference_key(config, &clean);
            let r = cache.get_or_compute(key, config.reference_iters, config.seed, || {
                compute_reference(&problem, &problem.initial_point(), config.reference_iters)
            })?;
            Ok((r.objective, Some(cache.path_for(key, config.reference_iters, config.seed))))
        }
        ProblemKind::QuadraticToy => {
            let problem = quadratic_toy(config);
            Ok((problem.objective(&problem.minimizer()), None))
        }
    }
}

/// Builds the problem, obtains the reference, runs every variant and
/// writes `<variant>.csv`, `summary.csv` and, for image problems,
/// `noisy.pgm` and `<variant>.pgm` into `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Summary, ExperimentError> {
    config.validate()?;
    fs::create_dir_all(&config.out)?;
    let cache = ReferenceCache::new(config.cache_dir());
    match config.problem {
        ProblemKind::HuberRof => {
            let clean = clean_image(config)?;
            let spec = huber_rof_spec(config, &clean)?;
            save_pgm(&spec.u0, config.out.join("noisy.pgm"), 255)?;
            let problem = spec.build();
            let x0 = problem.initial_point();
            let reference = cache.get_or_compute(reference_key(config, &clean), config.reference_iters, config.seed, || {
                compute_reference(&problem, &x0, config.reference_iters)
            })?;
            let results = run_all(&problem, config, &x0, &reference);
            finish(config, reference.objective, results, |variant, p| {
                let u = primal_from_dual(&spec, p);
                Ok(save_pgm(&u, config.out.join(format!("{variant}.pgm")), 255)?)
            })
        }
        ProblemKind::PoissonTv => {
            let clean = clean_image(config)?;
            let spec = poisson_tv_spec(config, &clean)?;
            let to_unit = 1.0 / config.peak;
            save_pgm(&spec.u0.scaled(to_unit), config.out.join("noisy.pgm"), 255)?;
            let mut problem = spec.build()?;
            if config.warm_start {
                problem = problem.with_warm_start();
            }
            let x0 = problem.initial_point();
            let reference = cache.get_or_compute(reference_key(config, &clean), config.reference_iters, config.seed, || {
                compute_reference(&problem, &x0, config.reference_iters)
            })?;
            let results = run_all(&problem, config, &x0, &reference);
            finish(config, reference.objective, results, |variant, u| {
                Ok(save_pgm(&u.scaled(to_unit), config.out.join(format!("{variant}.pgm")), 255)?)
            })
        }
        ProblemKind::QuadraticToy => {
            let problem = quadratic_toy(config);
            let point = problem.minimizer();
            let reference = Reference {
                objective: problem.objective(&point),
                point,
            };
            let x0 = vec![0.0; problem.dim()];
            let results = run_all(&problem, config, &x0, &reference);
            finish(config, reference.objective, results, |_, _| Ok(()))
        }
    }
}
