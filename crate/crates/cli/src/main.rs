//! `ramsey-forge`: witness search, avoidance numbers, and the reducibility exercise.
//!
//! Output is JSON on stdout (or `--out`), or a plain rendering with `--text`.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 budget exhausted, 4 tower too
//! small for the pattern, 5 avoidance cap reached, 6 the exercise found a
//! monochromatic quadruple, 7 any other engine failure.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ramsey_forge::brute::{
    check_p1_exercise, min_unavoidable_n, AvoidOptions, AvoidanceReport, BruteError, ExerciseReport, Outcome,
    PatternFamily,
};
use ramsey_forge::coloring::{parse_coloring, Coloring, NatColoring, PolyColoring, PolyOracle};
use ramsey_forge::poly::{GoodPoly, Monomial, Var};
use ramsey_forge::sumprod::{
    build_tower, extract_pattern, three_color_trace, CSchedule, ExtractError, Extraction, TowerError, TowerOptions,
    TowerWitness, Trace, TraceError, TraceOptions,
};

const SEED_VAR: &str = "RAMSEY_FORGE_SEED";
const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(name = "ramsey-forge", version, about = "Monochromatic sum-product patterns over good polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Human-readable output instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tower under a polynomial coloring and extract a monochromatic pattern.
    FindWitness {
        #[arg(long)]
        coloring: String,
        /// A pattern of the form {x, x+P(y), ..., xy}.
        #[arg(long, default_value = "sumprod")]
        pattern: String,
        /// Tower levels; defaults to the number of colors.
        #[arg(long)]
        levels: Option<usize>,
        /// Size bound for every level but the last.
        #[arg(long, default_value_t = 2)]
        size: u32,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Run the three-color deduction trace instead (needs exactly 3 colors).
        #[arg(long)]
        trace3: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Least N such that every coloring of [N] contains the pattern.
    Avoidance {
        /// `schur`, `ap3`, `sumprod`, `sumprod-corollary`, `quad`, or templates like "x; x+y^2; x*y".
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        colors: u32,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        cap: u32,
        /// Let y = 1 in the sum-product patterns (default y >= 2).
        #[arg(long)]
        allow_unit_y: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Scan the reducibility coloring of multilinear polynomials for {x, y, x+y, xy}.
    CheckExercise {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=3))]
        size: u32,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(0..=4))]
        vars: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized lift and algebra checks, seeded from RAMSEY_FORGE_SEED.
    SelfCheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
    Insufficient(String),
    Cap(String),
    Contradiction(String),
    Engine(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Insufficient(_) => 4,
            Failure::Cap(_) => 5,
            Failure::Contradiction(_) => 6,
            Failure::Engine(_) => 7,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Budget(m)
            | Failure::Insufficient(m)
            | Failure::Cap(m)
            | Failure::Contradiction(m)
            | Failure::Engine(m) => m,
        }
    }
}

impl From<TowerError> for Failure {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            TowerError::InvalidSchedule(_) => Failure::Usage(e.to_string()),
            _ => Failure::Engine(e.to_string()),
        }
    }
}

impl From<ExtractError> for Failure {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::InsufficientTower { .. } => Failure::Insufficient(e.to_string()),
            ExtractError::InvalidTarget(_) => Failure::Usage(e.to_string()),
            _ => Failure::Engine(e.to_string()),
        }
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            TraceError::ColorCount(_) => Failure::Usage(e.to_string()),
            _ => Failure::Engine(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum WitnessReport {
    Tower {
        coloring: String,
        pattern: String,
        tower: TowerWitness,
        extraction: Extraction,
    },
    Trace {
        coloring: String,
        trace: Trace,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct CapReport {
    pattern: String,
    colors: u32,
    cap: u32,
    cap_reached: bool,
    avoiding: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SelfCheckReport {
    seed: u64,
    samples: usize,
    failures: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::FindWitness {
            coloring,
            pattern,
            levels,
            size,
            budget,
            jobs,
            trace3,
            output,
        } => {
            init_pool(jobs);
            let oracle = poly_coloring(&coloring)?;
            let report = if trace3 {
                let opts = TraceOptions {
                    budget,
                    jobs,
                    ..Default::default()
                };
                WitnessReport::Trace {
                    coloring,
                    trace: three_color_trace(&oracle, opts)?,
                }
            } else {
                let family = PatternFamily::parse(&pattern, 1).map_err(|e| Failure::Usage(e.to_string()))?;
                let targets = extraction_targets(&family)?;
                let k = levels.unwrap_or(oracle.color_count() as usize);
                let schedule = CSchedule::flat(k, size)?;
                let opts = TowerOptions {
                    budget,
                    jobs,
                    ..Default::default()
                };
                let tower = build_tower(&oracle, k, &schedule, opts)?;
                let extraction = extract_pattern(&oracle, &tower, &targets)?;
                WitnessReport::Tower {
                    coloring,
                    pattern: family.to_string(),
                    tower,
                    extraction,
                }
            };
            emit(&output, &report, || render_witness(&report))
        }
        Command::Avoidance {
            pattern,
            colors,
            cap,
            allow_unit_y,
            jobs,
            output,
        } => {
            init_pool(jobs);
            let y_min = if allow_unit_y { 1 } else { 2 };
            let family = PatternFamily::parse(&pattern, y_min).map_err(|e| Failure::Usage(e.to_string()))?;
            match min_unavoidable_n(&family, colors, cap, AvoidOptions { jobs }) {
                Ok(report) => emit(&output, &report, || render_avoidance(&report)),
                Err(BruteError::CapReached { cap, coloring }) => {
                    let report = CapReport {
                        pattern: family.to_string(),
                        colors,
                        cap,
                        cap_reached: true,
                        avoiding: coloring,
                    };
                    emit(&output, &report, || {
                        format!(
                            "{} with {colors} colors: [{cap}] still avoidable\navoiding coloring: {}\n",
                            report.pattern,
                            join(&report.avoiding)
                        )
                    })?;
                    Err(Failure::Cap(format!("cap {cap} reached before the pattern became unavoidable")))
                }
                Err(BruteError::InvalidPattern(m) | BruteError::InvalidArgument(m)) => Err(Failure::Usage(m)),
                Err(e) => Err(Failure::Engine(e.to_string())),
            }
        }
        Command::CheckExercise { size, vars, output } => {
            let report = check_p1_exercise(size, vars).map_err(|e| Failure::Engine(e.to_string()))?;
            emit(&output, &report, || render_exercise(&report))?;
            match &report.outcome {
                Outcome::NoInstance { .. } => Ok(()),
                Outcome::Witness(w) => Err(Failure::Contradiction(format!(
                    "monochromatic {{x, y, x+y, xy}} under the reducibility coloring: {}",
                    w.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
                ))),
            }
        }
        Command::SelfCheck { samples, output } => {
            let seed = match std::env::var(SEED_VAR) {
                Ok(s) => s
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{SEED_VAR} must be an unsigned integer, got '{s}'")))?,
                Err(_) => DEFAULT_SEED,
            };
            let report = self_check(seed, samples);
            emit(&output, &report, || {
                format!(
                    "seed {}: {} samples, {} failures\n{}",
                    report.seed,
                    report.samples,
                    report.failures.len(),
                    report.failures.join("\n")
                )
            })?;
            if report.failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::Engine(format!("{} self-check failures", report.failures.len())))
            }
        }
    }
}

fn init_pool(jobs: usize) {
    // Only fails if a pool already exists, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
}

fn poly_coloring(spec: &str) -> Result<PolyColoring, Failure> {
    match parse_coloring(spec).map_err(|e| Failure::Usage(e.to_string()))? {
        Coloring::Poly(p) => Ok(p),
        Coloring::Nat(_) => Err(Failure::Usage(format!(
            "'{spec}' colors integers; wrap it as lift:2:{spec} to color polynomials"
        ))),
    }
}

/// Reads `{x, x + P_1(y), ..., x y}` off a pattern and returns the `P_i` in `t`.
fn extraction_targets(f: &PatternFamily) -> Result<Vec<GoodPoly>, Failure> {
    let x = GoodPoly::var(1);
    let xy = x.mul(&GoodPoly::var(2));
    let unsupported = || Failure::Usage(format!("find-witness needs a pattern {{x, x+P(y), ..., x*y}}, got {f}"));
    if f.var_count() != 2 || !f.templates.contains(&xy) {
        return Err(unsupported());
    }
    let to_t: HashMap<Var, GoodPoly> = [(2, GoodPoly::t())].into();
    let mut targets = Vec::new();
    for t in &f.templates {
        if *t == x || *t == xy {
            continue;
        }
        let x_mono = Monomial::var(1);
        if t.coefficient(&x_mono) != 1u32.into() {
            return Err(unsupported());
        }
        let rest = GoodPoly::make(
            t.terms()
                .filter(|(m, _)| **m != x_mono)
                .map(|(m, c)| (m.clone(), c.clone().into())),
        )
        .map_err(|_| unsupported())?;
        if rest.is_zero() || rest.vars().iter().any(|&v| v != 2) {
            return Err(unsupported());
        }
        targets.push(rest.substitute(&to_t).map_err(|_| unsupported())?);
    }
    if targets.is_empty() {
        return Err(unsupported());
    }
    Ok(targets)
}

fn emit<T: Serialize>(out: &Output, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let body = if out.text {
        text()
    } else {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Engine(e.to_string()))?;
        s.push('\n');
        s
    };
    match &out.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Engine(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn join(colors: &[u32]) -> String {
    colors.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn render_witness(r: &WitnessReport) -> String {
    match r {
        WitnessReport::Trace { coloring, trace } => format!("coloring {coloring}\n{}", trace.to_text()),
        WitnessReport::Tower {
            coloring,
            pattern,
            tower,
            extraction,
        } => {
            let mut s = format!("coloring {coloring}, pattern {pattern}\n");
            s += &format!("tower: x = {}, b = [{}]\n", tower.x, list(&tower.b));
            s += &format!("{} conditions checked\n", tower.conditions_checked);
            let w = &extraction.witness;
            s += &format!(
                "levels {:?}: x = {}, y = {}\n",
                extraction.pair, w.assignment[0].1, w.assignment[1].1
            );
            s += &format!("witness [{}], color {}\n", list(&w.elements), w.color);
            s
        }
    }
}

fn list(ps: &[GoodPoly]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_avoidance(r: &AvoidanceReport) -> String {
    format!(
        "{} with {} colors: N = {}\navoiding coloring of [{}]: {}\nnodes {}, certificate nodes {}\n",
        r.pattern,
        r.colors,
        r.min_n,
        r.min_n - 1,
        join(&r.avoiding),
        r.nodes_explored,
        r.certificate_nodes
    )
}

fn render_exercise(r: &ExerciseReport) -> String {
    let verdict = match &r.outcome {
        Outcome::NoInstance { checked } => format!("no monochromatic quadruple ({checked} assignments)"),
        Outcome::Witness(w) => format!(
            "MONOCHROMATIC: {}",
            w.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
        ),
    };
    format!(
        "size <= {}, {} variables, {} multilinear polynomials: {verdict}\n",
        r.size_bound, r.var_bound, r.region_size
    )
}

fn random_univariate(rng: &mut ChaCha8Rng) -> GoodPoly {
    let coeffs: Vec<u64> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..=9)).collect();
    let p = GoodPoly::from_coeffs(&coeffs);
    if p.is_zero() {
        GoodPoly::t()
    } else {
        p
    }
}

fn self_check(seed: u64, samples: usize) -> SelfCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..samples {
        let (p, q) = (random_univariate(&mut rng), random_univariate(&mut rng));
        let m = rng.gen_range(2..=9u32);
        let inner = NatColoring::modulo(m).expect("m >= 2");
        let lifted = ramsey_forge::coloring::lift_from_nat(inner.clone(), 2).expect("base 2");
        let direct = inner.color(&p.value_at_two());
        if lifted.color(&p).ok() != direct.ok() {
            failures.push(format!("sample {i}: lift of {p} mod {m}"));
        }
        if p.mul(&q).divide_exact(&q).ok().as_ref() != Some(&p) {
            failures.push(format!("sample {i}: ({p})({q}) / ({q})"));
        }
        if p.add(&q).value_at_two() != p.value_at_two() + q.value_at_two() {
            failures.push(format!("sample {i}: evaluation of {p} + {q}"));
        }
    }
    SelfCheckReport {
        seed,
        samples,
        failures,
    }
}
