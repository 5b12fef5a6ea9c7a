use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dlab_core::bounds::{check_theorem, CheckOptions, Estimates, Theorem};
use dlab_core::constructors::{construct, Construction, ConstructionSpec, Scheme, DEFAULT_DIGIT_GUARD};
use dlab_core::exponents::{exponent_report, ordinary_exponent, uniform_exponent, Tolerances};
use dlab_core::lattice::{diag_scale, fidelity_prefix, lattice_exponents, lattice_from_pair, LatticeSchedule};
use dlab_core::lemma::{check_conditions, find_witnesses, random_step_pair, StepParams};
use dlab_core::measure::{min_step, psi_step, upsilon_step};
use dlab_core::{ExponentKind, PartialQuotients, StepFunction, StepPair, Window};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::formats::{self, parse_inline_cf, parse_int, parse_ratio};
use crate::plot::{plot_steps, PlotOptions, Trace, VLine};

/// Environment variable overriding the decimal-digit guard of the constructors.
pub const DIGIT_GUARD_ENV: &str = "DLAB_DIGIT_GUARD";

#[derive(Debug, Parser)]
#[command(name = "dlab", version, about = "Diophantine exponent laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Artifact path; stdout when omitted.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergents, exact distances and sandwich checks of a prefix.
    Cf(CfArgs),
    /// Partial quotients from one of the extremal constructions.
    Construct(ConstructArgs),
    /// ψ or υ of a prefix (or the minimum over a pair) as step-function CSV.
    Measure(MeasureArgs),
    /// Finite-depth exponent estimates and ordering flags.
    Exponents(ExponentArgs),
    /// Lattice exponents by exact enumeration of the successive jumps of Ψ.
    Lattice(LatticeArgs),
    /// Conditions (a), (b) and witnesses for a pair of step functions.
    Lemma1(LemmaArgs),
    /// Evaluate one of the theorem bounds on constructed data.
    Verify(VerifyArgs),
    /// SVG plot of step functions.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Thm1,
    Thm2,
    Thm3,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Thm1 => Scheme::Thm1,
            SchemeArg::Thm2 => Scheme::Thm2,
            SchemeArg::Thm3 => Scheme::Thm3,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    /// Rational parameter `u/v`.
    #[arg(long)]
    pub gamma: String,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Seed for θ, e.g. `[0; 3]`.
    #[arg(long)]
    pub theta_seed: Option<String>,
    /// Seed for η (pair schemes).
    #[arg(long)]
    pub eta_seed: Option<String>,
    /// Maximum decimal digits of any denominator.
    #[arg(long, env = DIGIT_GUARD_ENV, default_value_t = DEFAULT_DIGIT_GUARD)]
    pub digit_guard: u64,
}

/// Where the numbers come from: a JSON file, an inline prefix or a construction.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Prefix or construction JSON.
    #[arg(long, conflicts_with_all = ["cf", "scheme"])]
    pub input: Option<PathBuf>,
    /// Inline prefix `[a0; a1, ...]`.
    #[arg(long, conflicts_with = "scheme")]
    pub cf: Option<String>,
    #[arg(long, value_enum, requires = "gamma")]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    #[arg(long, env = DIGIT_GUARD_ENV, default_value_t = DEFAULT_DIGIT_GUARD)]
    pub digit_guard: u64,
}

#[derive(Debug, Clone)]
pub enum Numbers {
    Single(PartialQuotients),
    Pair(PartialQuotients, PartialQuotients),
}

impl Source {
    pub fn load(&self) -> Result<Numbers> {
        if let Some(path) = &self.input {
            let doc = read_json(path)?;
            let (theta, eta) = formats::prefixes_from_json(&doc)?;
            return Ok(match eta {
                Some(eta) => Numbers::Pair(theta, eta),
                None => Numbers::Single(theta),
            });
        }
        if let Some(cf) = &self.cf {
            return Ok(Numbers::Single(parse_inline_cf(cf)?));
        }
        let Some(scheme) = self.scheme else {
            bail!(UsageError("one of --input, --cf or --scheme/--gamma is required"));
        };
        let gamma = self.gamma.as_deref().context("--gamma is required with --scheme")?;
        let spec = ConstructionSpec {
            digit_guard: self.digit_guard,
            ..ConstructionSpec::new(scheme.into(), parse_ratio(gamma, "gamma")?, self.depth)
        };
        Ok(match construct(&spec)? {
            Construction::Single(theta) => Numbers::Single(theta),
            Construction::Pair { theta, eta } => Numbers::Pair(theta, eta),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct CfArgs {
    /// Inline prefix `[a0; a1, ...]`.
    pub prefix: Option<String>,
    #[arg(long, conflicts_with = "prefix")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Psi,
    Upsilon,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    Theta,
    Eta,
    /// Pointwise minimum over the pair.
    Pair,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "psi")]
    pub kind: MeasureArg,
    #[arg(long, value_enum, default_value = "theta")]
    pub which: Which,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    /// Samples dropped at the start and end, `head,tail`.
    #[arg(long, default_value = "3,2")]
    pub window: String,
    /// Tolerance for asymptotic relations.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

impl WindowArgs {
    fn window(&self) -> Result<Window> {
        let (h, t) = self.window.split_once(',').ok_or(UsageError("--window expects head,tail"))?;
        Ok(Window::Trim { head: h.trim().parse()?, tail: t.trim().parse()? })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Lattice JSON with entries a11, a12, a21, a22.
    #[arg(long, conflicts_with_all = ["input", "cf", "scheme"])]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value = "1000000")]
    pub t_max: String,
    #[arg(long, default_value = "10")]
    pub t_min: String,
    #[arg(long, default_value = "1")]
    pub d1: String,
    #[arg(long, default_value = "1")]
    pub d2: String,
}

#[derive(Debug, Clone, Args)]
pub struct LemmaArgs {
    /// Step CSV of u.
    #[arg(long, requires = "v", conflicts_with = "seed")]
    pub u: Option<PathBuf>,
    /// Step CSV of v.
    #[arg(long, requires = "u")]
    pub v: Option<PathBuf>,
    #[arg(long, requires = "window_end")]
    pub window_start: Option<String>,
    #[arg(long, requires = "window_start")]
    pub window_end: Option<String>,
    /// Generate a random pair from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 12)]
    pub pieces: usize,
    /// Generate a control pair that breaks (a).
    #[arg(long)]
    pub no_alternation: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub theorem: String,
    /// Defaults to thm1 for T1, thm2 for T2 and thm3 for T3 and T4.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub gamma: String,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Largest t for the lattice enumeration of T4.
    #[arg(long, default_value = "1000000")]
    pub t_max: String,
    #[arg(long, env = DIGIT_GUARD_ENV, default_value_t = DEFAULT_DIGIT_GUARD)]
    pub digit_guard: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Step CSV, repeatable.
    #[arg(long = "step", required = true)]
    pub steps: Vec<PathBuf>,
    /// Trace labels in the order of --step; defaults to file stems.
    #[arg(long = "label")]
    pub labels: Vec<String>,
    /// Output of `lemma1`; its witnesses become vertical markers.
    #[arg(long)]
    pub witnesses: Option<PathBuf>,
    /// Extra vertical marker at t, repeatable.
    #[arg(long = "vline")]
    pub vlines: Vec<String>,
    #[arg(long)]
    pub linear: bool,
}

/// Invalid combination of arguments; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub &'static str);

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    CheckFailed,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_GUARD: u8 = 3;

/// Exit status for an error: 3 when a resource guard tripped, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let guard = err
        .chain()
        .filter_map(|e| e.downcast_ref::<dlab_core::Error>())
        .chain(err.chain().filter_map(|e| match e.downcast_ref::<formats::FormatError>() {
            Some(formats::FormatError::Core(c)) => Some(c),
            _ => None,
        }))
        .any(|e| matches!(e, dlab_core::Error::DigitGuard { .. }));
    if guard {
        EXIT_GUARD
    } else {
        EXIT_USAGE
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_step(path: &Path) -> Result<StepFunction> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    formats::read_step_csv(file).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<Status> {
    let (bytes, status) = render(&cli.command)?;
    emit(cli.out.as_deref(), &bytes)?;
    Ok(status)
}

/// Produces the artifact bytes of one command without writing them.
pub fn render(command: &Command) -> Result<(Vec<u8>, Status)> {
    match command {
        Command::Cf(a) => cf(a).map(|v| (formats::to_bytes(&v), Status::Passed)),
        Command::Construct(a) => construct_cmd(a).map(|v| (formats::to_bytes(&v), Status::Passed)),
        Command::Measure(a) => measure(a).map(|b| (b, Status::Passed)),
        Command::Exponents(a) => exponents(a).map(|(v, s)| (formats::to_bytes(&v), s)),
        Command::Lattice(a) => lattice(a).map(|v| (formats::to_bytes(&v), Status::Passed)),
        Command::Lemma1(a) => lemma1(a).map(|(v, s)| (formats::to_bytes(&v), s)),
        Command::Verify(a) => verify(a).map(|(v, s)| (formats::to_bytes(&v), s)),
        Command::Plot(a) => plot(a).map(|svg| (svg.into_bytes(), Status::Passed)),
    }
}

fn cf(a: &CfArgs) -> Result<Value> {
    let numbers = match (&a.prefix, &a.input) {
        (Some(p), _) => Numbers::Single(parse_inline_cf(p)?),
        (None, Some(path)) => Source { input: Some(path.clone()), ..empty_source() }.load()?,
        (None, None) => bail!(UsageError("give a prefix or --input")),
    };
    Ok(match numbers {
        Numbers::Single(pq) => formats::cf_table(&pq)?,
        Numbers::Pair(theta, eta) => json!({ "theta": formats::cf_table(&theta)?, "eta": formats::cf_table(&eta)? }),
    })
}

fn empty_source() -> Source {
    Source { input: None, cf: None, scheme: None, gamma: None, depth: 12, digit_guard: DEFAULT_DIGIT_GUARD }
}

fn construct_cmd(a: &ConstructArgs) -> Result<Value> {
    let gamma = parse_ratio(&a.gamma, "gamma")?;
    let spec = ConstructionSpec {
        theta_seed: a.theta_seed.as_deref().map(parse_inline_cf).transpose()?,
        eta_seed: a.eta_seed.as_deref().map(parse_inline_cf).transpose()?,
        digit_guard: a.digit_guard,
        ..ConstructionSpec::new(a.scheme.into(), gamma.clone(), a.depth)
    };
    let c = construct(&spec)?;
    Ok(formats::construction_to_json(Scheme::from(a.scheme).name(), &gamma, &c))
}

fn measure(a: &MeasureArgs) -> Result<Vec<u8>> {
    let step = |pq: &PartialQuotients| match a.kind {
        MeasureArg::Psi => psi_step(pq),
        MeasureArg::Upsilon => upsilon_step(pq),
    };
    let f = match (a.source.load()?, a.which) {
        (Numbers::Single(theta), Which::Theta) | (Numbers::Pair(theta, _), Which::Theta) => step(&theta)?,
        (Numbers::Pair(_, eta), Which::Eta) => step(&eta)?,
        (Numbers::Pair(theta, eta), Which::Pair) => min_step(&step(&theta)?, &step(&eta)?)?,
        (Numbers::Single(_), _) => bail!(UsageError("--which eta/pair needs a pair of numbers")),
    };
    let mut buf = Vec::new();
    formats::write_step_csv(&f, &mut buf)?;
    Ok(buf)
}

fn exponents(a: &ExponentArgs) -> Result<(Value, Status)> {
    let window = a.window.window()?;
    match a.source.load()? {
        Numbers::Single(theta) => {
            let omega = ordinary_exponent(&theta, window)?;
            let bar = match uniform_exponent(&upsilon_step(&theta)?, ExponentKind::OmegaBar, window) {
                Ok(e) => Some(e),
                Err(dlab_core::Error::WindowTooSmall { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let ok = bar.as_ref().is_none_or(|b| omega.value >= b.value - a.window.tolerance) && omega.value >= 1.0 - 1e-9;
            let doc = json!({
                "omega": formats::estimate_json(&omega),
                "omega_bar": bar.as_ref().map_or(Value::Null, formats::estimate_json),
            });
            Ok((doc, if ok { Status::Passed } else { Status::CheckFailed }))
        }
        Numbers::Pair(theta, eta) => {
            let tol = Tolerances { asymptotic: a.window.tolerance, ..Tolerances::default() };
            let report = exponent_report(&theta, &eta, window, tol)?;
            let status = if report.flags.is_empty() { Status::Passed } else { Status::CheckFailed };
            Ok((formats::report_json(&report), status))
        }
    }
}

fn lattice(a: &LatticeArgs) -> Result<Value> {
    let t_max = parse_ratio(&a.t_max, "t_max")?;
    let base = match &a.matrix {
        Some(path) => formats::lattice_from_json(&read_json(path)?)?,
        None => match a.source.load()? {
            Numbers::Pair(theta, eta) => lattice_from_pair(&fidelity_prefix(&theta, &t_max), &fidelity_prefix(&eta, &t_max))?,
            Numbers::Single(_) => bail!(UsageError("lattice needs a pair of numbers or --matrix")),
        },
    };
    let l = diag_scale(&base, &parse_ratio(&a.d1, "d1")?, &parse_ratio(&a.d2, "d2")?)?;
    let schedule = LatticeSchedule { t_min: parse_ratio(&a.t_min, "t_min")?, ..LatticeSchedule::default() };
    let e = lattice_exponents(&l, &t_max, &schedule)?;
    Ok(formats::lattice_exponents_json(&l, &e))
}

fn lemma1(a: &LemmaArgs) -> Result<(Value, Status)> {
    let (pair, expected) = match (&a.u, &a.v, a.seed) {
        (Some(u), Some(v), _) => {
            let (u, v) = (read_step(u)?, read_step(v)?);
            let pair = match (&a.window_start, &a.window_end) {
                (Some(s), Some(e)) => StepPair::with_window(u, v, parse_int(s, "window_start")?, parse_int(e, "window_end")?)?,
                _ => StepPair::new(u, v)?,
            };
            (pair, None)
        }
        (None, None, seed) => {
            let params = StepParams { pieces: a.pieces, alternation: !a.no_alternation, ..StepParams::default() };
            let g = random_step_pair(seed.unwrap_or(0), params)?;
            let expected = json!({ "a": g.expect_a, "b": g.expect_b, "witness": g.expect_witness });
            (g.pair, Some(expected))
        }
        _ => bail!(UsageError("give both --u and --v, or --seed")),
    };
    let report = check_conditions(&pair)?;
    let witnesses = find_witnesses(&pair);
    let verified: Vec<bool> = witnesses.iter().map(|w| w.verify(&pair)).collect();
    // The lemma is contradicted when (a) and (b) hold but no verified witness turns up.
    let applies = report.a_holds() && report.b_holds();
    let ok = verified.iter().all(|&v| v) && (!applies || !witnesses.is_empty());
    let (start, end) = pair.window();
    let mut doc = json!({
        "window": [formats::int_str(start), formats::int_str(end)],
        "conditions": formats::conditions_json(&report),
        "witnesses": witnesses.iter().map(formats::witness_json).collect::<Vec<_>>(),
        "verified": verified,
        "u": step_json(&pair.u),
        "v": step_json(&pair.v),
    });
    if let Some(expected) = expected {
        doc["expected"] = expected;
    }
    Ok((doc, if ok { Status::Passed } else { Status::CheckFailed }))
}

fn step_json(f: &StepFunction) -> Value {
    json!({
        "breakpoints": f.breakpoints().iter().map(formats::int_str).collect::<Vec<_>>(),
        "values": f.values().iter().map(formats::ratio_str).collect::<Vec<_>>(),
        "domain_end": formats::int_str(f.domain_end()),
    })
}

fn verify(a: &VerifyArgs) -> Result<(Value, Status)> {
    let theorem = Theorem::parse(&a.theorem).ok_or(UsageError("--theorem must be one of T1, T2, T3, T4"))?;
    let scheme = a.scheme.map_or(
        match theorem {
            Theorem::T1 => Scheme::Thm1,
            Theorem::T2 => Scheme::Thm2,
            Theorem::T3 | Theorem::T4 => Scheme::Thm3,
        },
        Scheme::from,
    );
    let gamma = parse_ratio(&a.gamma, "gamma")?;
    let spec = ConstructionSpec { digit_guard: a.digit_guard, ..ConstructionSpec::new(scheme, gamma.clone(), a.depth) };
    let construction = construct(&spec)?;
    let window = a.window.window()?;
    let tol = Tolerances { asymptotic: a.window.tolerance, ..Tolerances::default() };

    let mut est = Estimates::default();
    let mut extra = json!({});
    match &construction {
        Construction::Single(theta) => {
            est.omega_theta = Some(ordinary_exponent(theta, window)?.value);
            est.omega_bar_theta = uniform_exponent(&upsilon_step(theta)?, ExponentKind::OmegaBar, window).ok().map(|e| e.value);
        }
        Construction::Pair { theta, eta } => {
            let report = exponent_report(theta, eta, window, tol)?;
            let value = |e: &Option<dlab_core::ExponentEstimate>| e.as_ref().map(|e| e.value);
            est.omega_theta = Some(report.omega_theta.value);
            est.omega_eta = Some(report.omega_eta.value);
            est.omega_bar_theta = value(&report.omega_bar_theta);
            est.varpi_psi = value(&report.varpi_psi);
            est.varpi_upsilon = value(&report.varpi_upsilon);
            if theorem == Theorem::T4 {
                let t_max = parse_ratio(&a.t_max, "t_max")?;
                let l = lattice_from_pair(&fidelity_prefix(theta, &t_max), &fidelity_prefix(eta, &t_max))?;
                let e = lattice_exponents(&l, &t_max, &LatticeSchedule::default())?;
                est.omega_lattice = Some(e.omega.value);
                est.omega_bar_lattice = Some(e.omega_bar.value);
                extra["lattice_jumps"] = json!(e.jumps.len());
            }
        }
    }
    let opts = CheckOptions { tolerance: a.window.tolerance, ..CheckOptions::default() };
    let check = check_theorem(theorem, &est, opts);
    let mut doc = formats::bound_check_json(&check);
    doc["scheme"] = json!(scheme.name());
    doc["gamma"] = formats::ratio_str(&gamma);
    doc["depth"] = json!(a.depth);
    if let Some(n) = extra.get("lattice_jumps") {
        doc["lattice_jumps"] = n.clone();
    }
    let status = if check.satisfied() == Some(true) { Status::Passed } else { Status::CheckFailed };
    Ok((doc, status))
}

fn plot(a: &PlotArgs) -> Result<String> {
    let mut traces = Vec::new();
    for (i, path) in a.steps.iter().enumerate() {
        let label = a.labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem().map_or_else(|| format!("f{i}"), |s| s.to_string_lossy().into_owned())
        });
        traces.push(Trace { label, f: read_step(path)? });
    }
    let mut vlines = Vec::new();
    if let Some(path) = &a.witnesses {
        let doc = read_json(path)?;
        let ws = doc.get("witnesses").and_then(Value::as_array).context("witness file has no `witnesses` array")?;
        for w in ws {
            for (key, names) in [("q", ["q_nu*", "q_nu*+1"]), ("s", ["s_mu*", "s_mu*+1"])] {
                let pts = w.get(key).and_then(Value::as_array).context("witness without q/s")?;
                for (p, name) in pts.iter().zip(names) {
                    let t = p.as_str().context("witness entries must be strings")?;
                    vlines.push(VLine { t: BigRational::from(parse_int(t, "witness")?), label: format!("{name} = {t}") });
                }
            }
        }
    }
    for v in &a.vlines {
        vlines.push(VLine { t: parse_ratio(v, "vline")?, label: v.clone() });
    }
    let opts = if a.linear { PlotOptions { log_x: false, log_y: false, ..PlotOptions::default() } } else { PlotOptions::default() };
    Ok(plot_steps(&traces, &vlines, opts)?)
}

