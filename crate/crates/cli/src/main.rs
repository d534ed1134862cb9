use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use clpencil::appendix::ParamPoint;
use clpencil::chains::{chain_extend, pencil_rank_sample, ChainError};
use clpencil::liepoisson::{builtin, Chart, StructureConstants, BUILTIN_NAMES};
use clpencil::report::{Status, VerificationReport};
use clpencil::suite::{self, BChoice, Family, SuiteConfig};
use clpencil::{Multivector, Rational};

mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const BUDGET: u8 = 3;
}

/// Exact verification of centrally linearizable Poisson pencils.
#[derive(Parser)]
#[command(name = "clpencil", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Extend a Magri–Lenard chain of the gl(3) pencil at a numeric b.
    Chain(ChainArgs),
    /// Inspect a builtin or user-supplied Lie algebra.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
}

#[derive(Args)]
struct Common {
    /// Chart name.
    #[arg(long, default_value = "gl3")]
    chart: String,
    /// `symbolic`, `sample`, `sample:N`, or ten comma-separated rationals.
    #[arg(long, default_value = "symbolic")]
    b: String,
    /// File receiving one JSON record per check.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checks not started within this many seconds are reported as over budget.
    #[arg(long)]
    budget_seconds: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// all, schouten, appendix, identity, casimirs, involution or examples.
    target: String,
    #[command(flatten)]
    common: Common,
    /// Seed for every randomized input.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random triples for the Schouten axioms.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Shorthand for `--b symbolic`.
    #[arg(long, conflicts_with = "b")]
    symbolic: bool,
}

#[derive(Args)]
struct ChainArgs {
    /// Seed function: a Casimir name (x0, B, C2, C3) or a polynomial.
    #[arg(long)]
    seed: String,
    #[arg(long, default_value_t = 2)]
    steps: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum AlgebraAction {
    /// Builtin algebra by name.
    Info {
        name: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Structure constants from a JSON file.
    Load {
        path: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Everything that determines a run.
#[derive(Debug, Clone)]
struct RunConfig {
    chart: String,
    b: BChoice,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
    budget: Option<Duration>,
    workers: Option<usize>,
}

fn parse_b(text: &str) -> Result<BChoice> {
    let t = text.trim();
    if t == "symbolic" {
        return Ok(BChoice::Symbolic);
    }
    if t == "sample" {
        return Ok(BChoice::Sampled(12));
    }
    if let Some(n) = t.strip_prefix("sample:") {
        let n: usize = n.parse().with_context(|| format!("bad sample count `{n}`"))?;
        return Ok(BChoice::Sampled(n));
    }
    suite::parse_point(t)
        .map(BChoice::Point)
        .ok_or_else(|| anyhow!("--b needs `symbolic`, `sample[:N]` or ten rationals, got `{t}`"))
}

impl RunConfig {
    fn new(common: &Common, trials: usize, seed: u64, symbolic: bool) -> Result<Self> {
        let b = if symbolic { BChoice::Symbolic } else { parse_b(&common.b)? };
        if !BUILTIN_NAMES.contains(&common.chart.as_str()) {
            bail!("unknown chart `{}`; expected one of {BUILTIN_NAMES:?}", common.chart);
        }
        Ok(RunConfig {
            chart: common.chart.clone(),
            b,
            trials,
            seed,
            out: common.out.clone(),
            budget: common.budget_seconds.map(Duration::from_secs),
            workers: common.workers,
        })
    }

    fn install_pool(&self) -> Result<()> {
        if let Some(n) = self.workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global()
                .context("configuring worker threads")?;
        }
        Ok(())
    }
}

/// Writes one JSON line per report as soon as it is available.
struct Sink(Option<BufWriter<File>>);

impl Sink {
    fn open(path: &Option<PathBuf>) -> Result<Self> {
        let w = match path {
            Some(p) => Some(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => None,
        };
        Ok(Sink(w))
    }

    fn write(&mut self, r: &VerificationReport) -> Result<()> {
        if let Some(w) = &mut self.0 {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
        Ok(())
    }
}

fn scalars_text(r: &VerificationReport) -> String {
    let s = &r.scalars;
    [("c", &s.c), ("rho", &s.rho), ("alpha", &s.alpha), ("beta", &s.beta)]
        .iter()
        .filter_map(|(n, v)| v.as_ref().map(|v| format!(" {n}={v}")))
        .collect()
}

fn print_report(r: &VerificationReport) {
    let status = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Budget => "BUDGET",
    };
    let grade = if r.non_acceptance_grade { " (sampled, non-acceptance-grade)" } else { "" };
    println!(
        "{status:6} {} residual_terms={} {}ms{}{grade}",
        r.check,
        r.residual_terms,
        r.millis,
        scalars_text(r)
    );
    for d in &r.details {
        println!("       {d}");
    }
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let cfg = RunConfig::new(&args.common, args.trials, args.seed, args.symbolic)?;
    let Some(criteria) = suite::target_criteria(&args.target) else {
        bail!("unknown target `{}`; expected one of {:?}", args.target, suite::TARGETS);
    };
    cfg.install_pool()?;
    let mut sink = Sink::open(&cfg.out)?;
    let start = Instant::now();
    let needs_family = criteria.iter().any(|n| !matches!(n, 1 | 2 | 11 | 12));
    let family = if needs_family {
        Some(Family::load().context("loading the gl(3) family")?)
    } else {
        None
    };
    let suite_cfg = SuiteConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        b: cfg.b.clone(),
    };
    let (mut failed, mut over) = (false, false);
    for &n in criteria {
        let reports = if cfg.budget.is_some_and(|b| start.elapsed() > b) {
            let mut r = VerificationReport::new(format!("{n:02}"));
            r.status = Status::Budget;
            r.note(format!("not started: {}", suite::title(n)));
            vec![r]
        } else {
            match &family {
                Some(f) => suite::criterion(n, f, &suite_cfg),
                None => suite::criterion_without_family(n, &suite_cfg),
            }
        };
        for r in &reports {
            print_report(r);
            sink.write(r)?;
            failed |= r.status == Status::Fail;
            over |= r.status == Status::Budget;
        }
    }
    Ok(if failed {
        exit::FAIL
    } else if over {
        exit::BUDGET
    } else {
        exit::PASS
    })
}

fn chain(args: ChainArgs) -> Result<u8> {
    let cfg = RunConfig::new(&args.common, 0, 0, false)?;
    if cfg.chart != "gl3" {
        bail!("chains are computed on the gl3 pencil; got --chart {}", cfg.chart);
    }
    let point = match &cfg.b {
        BChoice::Point(p) => p.clone(),
        BChoice::Symbolic if args.common.b == "symbolic" => ParamPoint::unit(0),
        _ => bail!("chains need a numeric --b"),
    };
    cfg.install_pool()?;
    let fam = Family::load().context("loading the gl(3) family")?;
    let pencil = fam.pencil(&point);
    let chart = &pencil.chart;
    let f0 = match args.seed.as_str() {
        "B" => fam.b_casimir(),
        name => match chart.casimir(name) {
            Ok(c) => c,
            Err(_) => chart
                .parse(name)
                .map_err(|e| anyhow!("seed `{name}` is neither a Casimir name nor a polynomial: {e}"))?,
        },
    };
    let mut report = VerificationReport::new(format!("chain[{}]", args.seed));
    let st = match chain_extend(&pencil, &f0, args.steps) {
        Ok(st) => st,
        Err(ChainError::NotCasimir(n)) => {
            let res = pencil.pi1.ham(&f0);
            eprintln!("seed `{}` is not a Casimir of π1; π1(f0) has {n} terms:", args.seed);
            eprintln!("{res}");
            return Ok(exit::INPUT);
        }
        Err(e) => bail!(e),
    };
    for line in st.lines() {
        println!("{line}");
    }
    println!("kernel dims per step: {:?}", st.kernel_dims());
    let check = st.check(&pencil);
    report.merge(&check);
    report.kernel_dims = st.kernel_dims();
    report.scalars.c = Some(fam.sigma.clone());
    if let Some(k) = st.obstruction {
        report.note(format!("no continuation at step {k}"));
        println!("no continuation at step {k}");
    }
    for line in st.lines() {
        report.note(line);
    }
    let mut sink = Sink::open(&cfg.out)?;
    sink.write(&report)?;
    Ok(if report.passed() { exit::PASS } else { exit::FAIL })
}

fn describe(chart: &Chart, seed: u64) -> Result<()> {
    println!("algebra {}", chart.name());
    println!("dimension {}", chart.dim());
    let coords: Vec<&str> = chart.vars().coordinate_names().collect();
    println!("coordinates {}", coords.join(" "));
    let p = chart.poisson();
    let jac = p.schouten(p)?;
    println!("jacobi {}", if jac.is_zero() { "pass" } else { "fail" });
    for (name, c) in chart.casimirs() {
        println!("casimir {name} = {c}");
    }
    let zero = Multivector::zero(chart.vars(), 2);
    let stats = pencil_rank_sample(p, &zero, &Rational::ZERO, 20, seed)?;
    println!("generic rank {} corank {} (20 points, seed {seed})", stats.generic_rank, stats.generic_corank);
    Ok(())
}

fn algebra(action: AlgebraAction) -> Result<u8> {
    match action {
        AlgebraAction::Info { name, seed } => {
            let chart = builtin(&name)?;
            describe(&chart, seed)?;
        }
        AlgebraAction::Load { path, seed } => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let sc = StructureConstants::from_json(&text)?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("algebra").to_string();
            let chart = Chart::from_structure(name, sc)?;
            describe(&chart, seed)?;
        }
    }
    Ok(exit::PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Chain(a) => chain(a),
        Command::Algebra { action } => algebra(action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INPUT)
        }
    }
}
