use crate::spec::{parse_family, parse_law, parse_ns, LawSpec, SpecError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use stochord::asymptotics::{
    asp_verdict, bound_validation, condition_probe, counterexample_pair, dast_verdict, decay_bound_from_sets,
    precedence_probability, sweep_from_reports, sweep_pair, table1, DAST_THRESHOLD, DAST_WINDOW,
};
use stochord::crossings::{crossing_sets_with, DEFAULT_GRID};
use stochord::sim::precedence_monte_carlo;
use stochord::wasserstein::{BaselinePair, DepartureOptions};
use stochord::{
    boundary_quantities, departure, departure_l1, usual_order_verdict, Distribution, Error, Exec, FamilyTemplate,
    IndexSequence,
};

const DEFAULT_X: &str = "normal(0,1)";
const DEFAULT_Y: &str = "t(4)";

#[derive(Debug, Parser)]
#[command(
    name = "stochord",
    version,
    about = "Wasserstein departure from the usual stochastic order and its behaviour under distortions",
    after_help = "Laws: normal(m,s) t(nu) uniform(a,b) exp(rate) empirical:<file.csv> piecewise:<file.json>\n      counterexample_x(n,a,b) counterexample_y(n,a,b)\nFamilies: os(gamma=g) os(rule=kth_smallest,k=K) os(rule=kth_largest,k=K) mix(w@g, ...) record(k=K)\nEnvironment: STOCHORD_THREADS caps the worker pool."
)]
pub struct Cli {
    /// Run every computation on the calling thread
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Pretty,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    pub out: Option<Output>,
    /// Shorthand for --out json
    #[arg(long, conflicts_with_all = ["out", "csv"])]
    pub json: bool,
    /// Shorthand for --out csv
    #[arg(long, conflicts_with = "out")]
    pub csv: bool,
}

impl OutputArgs {
    fn resolve(&self, default: Output) -> Output {
        if self.json {
            Output::Json
        } else if self.csv {
            Output::Csv
        } else {
            self.out.unwrap_or(default)
        }
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Law of X
    #[arg(long, default_value = DEFAULT_X)]
    pub x: String,
    /// Law of Y
    #[arg(long, default_value = DEFAULT_Y)]
    pub y: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Departure ε(X,Y) and W2 between two laws
    Measure {
        /// Law of X
        #[arg(long)]
        x: String,
        /// Law of Y
        #[arg(long)]
        y: String,
        /// Report the L1 variant of the measure instead
        #[arg(long)]
        l1: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The sets A0, A1, A2 where the quantile functions differ
    Crossings {
        /// Law of X
        #[arg(long)]
        x: String,
        /// Law of Y
        #[arg(long)]
        y: String,
        /// Also report F_X at the boundary points around this γ
        #[arg(long)]
        gamma: Option<f64>,
        /// Scan grid size
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ε along a distortion family for a range of n
    Sweep {
        /// Law of X
        #[arg(long)]
        x: String,
        /// Law of Y
        #[arg(long)]
        y: String,
        /// Family template, e.g. os(gamma=0.5), mix(0.3@0.25, 0.7@0.75), record(k=2), or bare os
        #[arg(long, default_value = "os")]
        family: String,
        /// Limit γ for a bare os family
        #[arg(long)]
        gamma: Option<f64>,
        /// Indices: start:end, start:end:step or a comma list
        #[arg(long, default_value = "2:100")]
        ns: String,
        /// ε level below which the tail counts as vanished
        #[arg(long, default_value_t = DAST_THRESHOLD)]
        threshold: f64,
        /// Number of trailing indices the verdict looks at
        #[arg(long, default_value_t = DAST_WINDOW)]
        window: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ε over the 11 × 9 grid of sample sizes and quantile levels
    Table {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exponential decay rate z for ε of order statistics around γ
    Bound {
        #[command(flatten)]
        pair: PairArgs,
        /// Limit quantile level γ
        #[arg(long)]
        gamma: f64,
        /// Margin ε inside the boundary gaps
        #[arg(long)]
        eps: f64,
        /// Also sweep these n and check the fitted slope against ln z
        #[arg(long)]
        ns: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// P(X_{n:γ} ≤ Y_{n:γ}) for independent order statistics
    Precedence {
        #[command(flatten)]
        pair: PairArgs,
        /// Sample size
        #[arg(long)]
        n: u64,
        /// Quantile level γ_n
        #[arg(long)]
        gamma: f64,
        /// Also estimate by Monte Carlo with this many paired draws
        #[arg(long)]
        mc: Option<usize>,
        /// Seed for --mc
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also give the asymptotic order verdict at γ over these n
        #[arg(long)]
        asp: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Numeric checks of the concentration and log-convexity conditions
    ProbeConditions {
        /// Family template
        #[arg(long, default_value = "os(gamma=0.5)")]
        family: String,
        /// Indices to probe
        #[arg(long, default_value = "50,200,1000")]
        ns: String,
        /// Half-width excluded around each concentration point
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The piecewise pair that stays apart in ε while the order statistics merge
    Counterexample {
        /// Index of the pair
        #[arg(long, required_unless_present = "ns")]
        n: Option<u64>,
        /// Location of Y's mass (a > b > 0)
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        /// Location of X's mass
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Evaluate over these n instead and give the vanishing verdict
        #[arg(long, conflicts_with = "n")]
        ns: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Validated run: every spec has been parsed and every law built.
pub struct RunConfig {
    pub command: Task,
    pub output: Output,
    pub exec: Exec,
}

pub struct Law {
    pub spec: LawSpec,
    pub dist: Distribution,
}

pub enum Task {
    Measure { x: Law, y: Law, l1: bool },
    Crossings { x: Law, y: Law, gamma: Option<f64>, grid: usize },
    Sweep { x: Law, y: Law, family: FamilyTemplate, ns: Vec<u64>, threshold: f64, window: usize },
    Table { x: Law, y: Law },
    Bound { x: Law, y: Law, gamma: f64, eps: f64, ns: Option<Vec<u64>> },
    Precedence { x: Law, y: Law, n: u64, gamma: f64, mc: Option<usize>, seed: u64, asp: Option<Vec<u64>> },
    ProbeConditions { family: FamilyTemplate, ns: Vec<u64>, eps: f64 },
    Counterexample { ns: Vec<u64>, single: bool, a: f64, b: f64 },
}

/// Rejected before any computation; exit code 2.
#[derive(Debug)]
pub enum ArgError {
    Spec { flag: &'static str, err: SpecError },
    Invalid(String),
}

impl std::fmt::Display for ArgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArgError::Spec { flag, err } => write!(f, "invalid --{flag}: {err}"),
            ArgError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

fn law(flag: &'static str, s: &str) -> Result<Law, ArgError> {
    let spec = parse_law(s).map_err(|err| ArgError::Spec { flag, err })?;
    let dist = spec.build().map_err(|e| ArgError::Invalid(format!("invalid --{flag}: {e}")))?;
    Ok(Law { spec, dist })
}

fn ns(flag: &'static str, s: &str) -> Result<Vec<u64>, ArgError> {
    parse_ns(s).map_err(|err| ArgError::Spec { flag, err })
}

fn unit(flag: &str, g: f64) -> Result<f64, ArgError> {
    if (0.0..=1.0).contains(&g) {
        Ok(g)
    } else {
        Err(ArgError::Invalid(format!("--{flag} must lie in [0,1], got {g}")))
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig, ArgError> {
        let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
        let (command, output) = match cli.command {
            Command::Measure { x, y, l1, output } => {
                (Task::Measure { x: law("x", &x)?, y: law("y", &y)?, l1 }, output.resolve(Output::Pretty))
            }
            Command::Crossings { x, y, gamma, grid, output } => {
                if grid < 2 {
                    return Err(ArgError::Invalid("--grid must be at least 2".into()));
                }
                let gamma = gamma.map(|g| unit("gamma", g)).transpose()?;
                (Task::Crossings { x: law("x", &x)?, y: law("y", &y)?, gamma, grid }, output.resolve(Output::Pretty))
            }
            Command::Sweep { x, y, family, gamma, ns: n, threshold, window, output } => {
                if let Some(g) = gamma {
                    unit("gamma", g)?;
                }
                let family = parse_family(&family, gamma).map_err(|err| ArgError::Spec { flag: "family", err })?;
                if !(threshold > 0.0) || window == 0 {
                    return Err(ArgError::Invalid("--threshold must be positive and --window at least 1".into()));
                }
                let task =
                    Task::Sweep { x: law("x", &x)?, y: law("y", &y)?, family, ns: ns("ns", &n)?, threshold, window };
                (task, output.resolve(Output::Pretty))
            }
            Command::Table { pair, output } => {
                (Task::Table { x: law("x", &pair.x)?, y: law("y", &pair.y)? }, output.resolve(Output::Csv))
            }
            Command::Bound { pair, gamma, eps, ns: n, output } => {
                let task = Task::Bound {
                    x: law("x", &pair.x)?,
                    y: law("y", &pair.y)?,
                    gamma: unit("gamma", gamma)?,
                    eps,
                    ns: n.map(|s| ns("ns", &s)).transpose()?,
                };
                (task, output.resolve(Output::Pretty))
            }
            Command::Precedence { pair, n, gamma, mc, seed, asp, output } => {
                if n == 0 {
                    return Err(ArgError::Invalid("--n must be at least 1".into()));
                }
                if mc == Some(0) {
                    return Err(ArgError::Invalid("--mc must be at least 1".into()));
                }
                let task = Task::Precedence {
                    x: law("x", &pair.x)?,
                    y: law("y", &pair.y)?,
                    n,
                    gamma: unit("gamma", gamma)?,
                    mc,
                    seed,
                    asp: asp.map(|s| ns("asp", &s)).transpose()?,
                };
                (task, output.resolve(Output::Pretty))
            }
            Command::ProbeConditions { family, ns: n, eps, output } => {
                let family = parse_family(&family, None).map_err(|err| ArgError::Spec { flag: "family", err })?;
                (Task::ProbeConditions { family, ns: ns("ns", &n)?, eps }, output.resolve(Output::Pretty))
            }
            Command::Counterexample { n, a, b, ns: list, output } => {
                let (ns, single) = match (n, list) {
                    (_, Some(s)) => (ns("ns", &s)?, false),
                    (Some(n), None) => (vec![n], true),
                    (None, None) => return Err(ArgError::Invalid("give --n or --ns".into())),
                };
                if !(a > b && b > 0.0) {
                    return Err(ArgError::Invalid(format!("need a > b > 0, got a={a}, b={b}")));
                }
                if let Some(&m) = ns.iter().find(|&&m| m < 4) {
                    return Err(ArgError::Invalid(format!("counterexample needs n >= 4, got {m}")));
                }
                (Task::Counterexample { ns, single, a, b }, output.resolve(Output::Pretty))
            }
        };
        Ok(RunConfig { command, output, exec })
    }
}

/// Seven decimals, the precision of the published grid.
pub fn fmt7(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.7}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt7).unwrap_or_default()
}

fn intervals_text(s: &stochord::IntervalSet) -> String {
    if s.is_empty() {
        return "∅".into();
    }
    s.intervals().iter().map(|(l, r)| format!("({}, {})", fmt7(*l), fmt7(*r))).collect::<Vec<_>>().join(" ∪ ")
}

fn emit_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialize"))
}

#[derive(Debug)]
pub enum RunError {
    Compute(Error),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type Run = Result<(), RunError>;

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Run {
    let o = cfg.output;
    match &cfg.command {
        Task::Measure { x, y, l1 } => measure(out, o, x, y, *l1),
        Task::Crossings { x, y, gamma, grid } => crossings(out, o, cfg.exec, x, y, *gamma, *grid),
        Task::Sweep { x, y, family, ns, threshold, window } => {
            sweep(out, o, cfg.exec, x, y, family, ns, *threshold, *window)
        }
        Task::Table { x, y } => table(out, o, cfg.exec, x, y),
        Task::Bound { x, y, gamma, eps, ns } => bound(out, o, cfg.exec, x, y, *gamma, *eps, ns.as_deref()),
        Task::Precedence { x, y, n, gamma, mc, seed, asp } => {
            precedence(out, o, cfg.exec, x, y, *n, *gamma, *mc, *seed, asp.as_deref())
        }
        Task::ProbeConditions { family, ns, eps } => probe(out, o, family, ns, *eps),
        Task::Counterexample { ns, single, a, b } => counterexample(out, o, cfg.exec, ns, *single, *a, *b),
    }
}

fn measure(out: &mut dyn Write, o: Output, x: &Law, y: &Law, l1: bool) -> Run {
    if l1 {
        let e = departure_l1(&x.dist, &y.dist)?;
        match o {
            Output::Csv => writeln!(out, "epsilon_l1\n{}", fmt7(e))?,
            Output::Json => emit_json(out, &json!({"x": x.spec.to_string(), "y": y.spec.to_string(), "epsilon_l1": e}))?,
            Output::Pretty => writeln!(out, "epsilon_l1   {}", fmt7(e))?,
        }
        return Ok(());
    }
    let r = departure(&x.dist, &y.dist)?;
    match o {
        Output::Csv => {
            writeln!(out, "epsilon,w2,numerator,denominator,convention")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt7(r.epsilon),
                fmt7(r.w2),
                fmt7(r.numerator),
                fmt7(r.denominator),
                r.convention.as_str()
            )?;
        }
        Output::Json => {
            let order = usual_order_verdict(&x.dist, &y.dist)?;
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["x"] = json!(x.spec.to_string());
            v["y"] = json!(y.spec.to_string());
            v["usual_order"] = serde_json::to_value(order).expect("verdict serializes");
            emit_json(out, &v)?;
        }
        Output::Pretty => {
            let order = usual_order_verdict(&x.dist, &y.dist)?;
            writeln!(out, "x            {}", x.spec)?;
            writeln!(out, "y            {}", y.spec)?;
            writeln!(out, "epsilon      {}", fmt7(r.epsilon))?;
            writeln!(out, "w2           {}", fmt7(r.w2))?;
            writeln!(out, "numerator    {}", fmt7(r.numerator))?;
            writeln!(out, "denominator  {}", fmt7(r.denominator))?;
            writeln!(out, "convention   {}", r.convention.as_str())?;
            writeln!(out, "converged    {}", r.converged)?;
            writeln!(out, "A0           {}", intervals_text(&r.a0))?;
            writeln!(out, "usual order  {}", serde_json::to_value(order).unwrap().as_str().unwrap_or(""))?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn crossings(out: &mut dyn Write, o: Output, exec: Exec, x: &Law, y: &Law, gamma: Option<f64>, grid: usize) -> Run {
    let s = crossing_sets_with(&x.dist, &y.dist, grid, exec)?;
    let bq = gamma.map(|g| boundary_quantities(&s.a0, &s.a2, g));
    match o {
        Output::Json => {
            let mut v = serde_json::to_value(&s).expect("sets serialize");
            v["x"] = json!(x.spec.to_string());
            v["y"] = json!(y.spec.to_string());
            if let Some(b) = bq {
                v["boundary"] = serde_json::to_value(b).expect("boundary serializes");
            }
            emit_json(out, &v)?;
        }
        Output::Csv => {
            writeln!(out, "set,l,r")?;
            for (name, set) in [("A0", &s.a0), ("A1", &s.a1), ("A2", &s.a2)] {
                for (l, r) in set.intervals() {
                    writeln!(out, "{name},{},{}", fmt7(*l), fmt7(*r))?;
                }
            }
        }
        Output::Pretty => {
            writeln!(out, "A0 (x above y)  {}", intervals_text(&s.a0))?;
            writeln!(out, "A1 (x below y)  {}", intervals_text(&s.a1))?;
            writeln!(out, "A2 (differ)     {}", intervals_text(&s.a2))?;
            let c: Vec<String> = s.crossings.iter().map(|&u| fmt7(u)).collect();
            writeln!(out, "crossings       {}", if c.is_empty() { "none".into() } else { c.join(" ") })?;
            if let Some(b) = bq {
                writeln!(out, "gamma           {}", fmt7(b.gamma))?;
                writeln!(out, "F_X(c), F_X(a)  {}, {}", fmt7(b.fx_c), fmt7(b.fx_a))?;
                writeln!(out, "F_X(b), F_X(d)  {}, {}", fmt7(b.fx_b), fmt7(b.fx_d))?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    out: &mut dyn Write,
    o: Output,
    exec: Exec,
    x: &Law,
    y: &Law,
    family: &FamilyTemplate,
    ns: &[u64],
    threshold: f64,
    window: usize,
) -> Run {
    let opts = DepartureOptions { exec, ..Default::default() };
    let pair = BaselinePair::with_options(x.dist.clone(), y.dist.clone(), &opts)?;
    let s = sweep_pair(&pair, family, ns, exec)?;
    let verdict = dast_verdict(&s, threshold, window);
    match o {
        Output::Csv => {
            writeln!(out, "n,epsilon,w2")?;
            for i in 0..s.indices.len() {
                writeln!(out, "{},{},{}", s.indices[i], fmt7(s.epsilons[i]), fmt7(s.w2s[i]))?;
            }
        }
        Output::Json => emit_json(
            out,
            &json!({
                "x": x.spec.to_string(),
                "y": y.spec.to_string(),
                "family": family.to_string(),
                "indices": s.indices,
                "epsilons": s.epsilons,
                "w2s": s.w2s,
                "fitted_log_slope": s.fitted_log_slope,
                "threshold": threshold,
                "window": window,
                "verdict": verdict.as_str(),
            }),
        )?,
        Output::Pretty => {
            writeln!(out, "family {}  x {}  y {}", family, x.spec, y.spec)?;
            writeln!(out, "{:>6}  {:>12}  {:>12}", "n", "epsilon", "w2")?;
            for i in 0..s.indices.len() {
                writeln!(out, "{:>6}  {:>12}  {:>12}", s.indices[i], fmt7(s.epsilons[i]), fmt7(s.w2s[i]))?;
            }
            writeln!(out, "fitted log slope  {}", s.fitted_log_slope.map(fmt7).unwrap_or_else(|| "n/a".into()))?;
            writeln!(out, "verdict           {}", verdict.as_str())?;
        }
    }
    Ok(())
}

fn table(out: &mut dyn Write, o: Output, exec: Exec, x: &Law, y: &Law) -> Run {
    let cells = table1(&x.dist, &y.dist, exec)?;
    match o {
        Output::Csv => {
            writeln!(out, "n,gamma,epsilon,w2")?;
            for c in &cells {
                writeln!(out, "{},{},{},{}", c.n, c.gamma, fmt7(c.epsilon), fmt7(c.w2))?;
            }
        }
        Output::Json => emit_json(
            out,
            &json!({"x": x.spec.to_string(), "y": y.spec.to_string(), "cells": serde_json::to_value(&cells).unwrap()}),
        )?,
        Output::Pretty => {
            let gammas = stochord::asymptotics::TABLE1_GAMMAS;
            write!(out, "{:>5}", "n\\γ")?;
            for g in gammas {
                write!(out, " {:>10}", g)?;
            }
            writeln!(out)?;
            for row in cells.chunks(gammas.len()) {
                write!(out, "{:>5}", row[0].n)?;
                for c in row {
                    write!(out, " {:>10}", fmt7(c.epsilon))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bound(out: &mut dyn Write, o: Output, exec: Exec, x: &Law, y: &Law, gamma: f64, eps: f64, ns: Option<&[u64]>) -> Run {
    let opts = DepartureOptions { exec, ..Default::default() };
    let pair = BaselinePair::with_options(x.dist.clone(), y.dist.clone(), &opts)?;
    let b = decay_bound_from_sets(&pair.sets.a0, &pair.sets.a2, gamma, eps)?;
    let check = match ns {
        Some(ns) => {
            let s = sweep_pair(&pair, &FamilyTemplate::order_stat(gamma), ns, exec)?;
            Some((s.fitted_log_slope, bound_validation(&s, &b)))
        }
        None => None,
    };
    let slope = check.and_then(|c| c.0);
    let validated = check.map(|c| c.1);
    match o {
        Output::Csv => {
            writeln!(out, "gamma,eps,fx_c,fx_a,fx_b,fx_d,z,ln_z,fitted_log_slope,validated")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt7(gamma),
                fmt7(eps),
                fmt7(b.bq.fx_c),
                fmt7(b.bq.fx_a),
                fmt7(b.bq.fx_b),
                fmt7(b.bq.fx_d),
                fmt7(b.z),
                fmt7(b.z.ln()),
                fmt_opt(slope),
                validated.map(|v| v.to_string()).unwrap_or_default()
            )?;
        }
        Output::Json => {
            let mut v = serde_json::to_value(&b).expect("bound serializes");
            v["ln_z"] = json!(b.z.ln());
            v["fitted_log_slope"] = json!(slope);
            v["validated"] = json!(validated);
            emit_json(out, &v)?;
        }
        Output::Pretty => {
            writeln!(out, "gamma             {}", fmt7(gamma))?;
            writeln!(out, "eps               {}", fmt7(eps))?;
            writeln!(out, "F_X(c), F_X(a)    {}, {}", fmt7(b.bq.fx_c), fmt7(b.bq.fx_a))?;
            writeln!(out, "F_X(b), F_X(d)    {}, {}", fmt7(b.bq.fx_b), fmt7(b.bq.fx_d))?;
            writeln!(out, "z                 {}", fmt7(b.z))?;
            writeln!(out, "ln z              {}", fmt7(b.z.ln()))?;
            if let Some(v) = validated {
                writeln!(out, "fitted log slope  {}", slope.map(fmt7).unwrap_or_else(|| "n/a".into()))?;
                writeln!(out, "within bound      {v}")?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn precedence(
    out: &mut dyn Write,
    o: Output,
    exec: Exec,
    x: &Law,
    y: &Law,
    n: u64,
    gamma: f64,
    mc: Option<usize>,
    seed: u64,
    asp: Option<&[u64]>,
) -> Run {
    let p = precedence_probability(&x.dist, &y.dist, n, gamma)?;
    let est = mc.map(|m| precedence_monte_carlo(&x.dist, &y.dist, n, gamma, m, seed, exec));
    let report = asp.map(|ns| asp_verdict(&x.dist, &y.dist, &IndexSequence::constant(gamma), ns)).transpose()?;
    match o {
        Output::Csv => {
            writeln!(out, "n,gamma,precedence,mc_estimate,mc_std_error,mc_samples")?;
            writeln!(
                out,
                "{n},{},{},{},{},{}",
                fmt7(gamma),
                fmt7(p),
                fmt_opt(est.map(|e| e.p)),
                fmt_opt(est.map(|e| e.std_error)),
                est.map(|e| e.samples.to_string()).unwrap_or_default()
            )?;
        }
        Output::Json => emit_json(
            out,
            &json!({
                "x": x.spec.to_string(),
                "y": y.spec.to_string(),
                "n": n,
                "gamma": gamma,
                "precedence": p,
                "monte_carlo": est.map(|e| json!({"estimate": e.p, "std_error": e.std_error, "samples": e.samples, "seed": seed})),
                "asp": report.as_ref().map(|r| serde_json::to_value(r).unwrap()),
            }),
        )?,
        Output::Pretty => {
            writeln!(out, "P(X_n:γ <= Y_n:γ)  {}", fmt7(p))?;
            if let Some(e) = est {
                writeln!(out, "monte carlo        {} ± {} ({} draws, seed {seed})", fmt7(e.p), fmt7(e.std_error), e.samples)?;
            }
            if let Some(r) = &report {
                writeln!(out, "asp verdict        {}", r.verdict.as_str())?;
                writeln!(out, "dist(γ, A0)        {}", fmt7(r.dist_a0))?;
                writeln!(out, "dist(γ, A2)        {}", fmt7(r.dist_a2))?;
                for (m, q) in &r.precedence {
                    writeln!(out, "  n={m:<6} {}", fmt7(*q))?;
                }
            }
        }
    }
    Ok(())
}

fn probe(out: &mut dyn Write, o: Output, family: &FamilyTemplate, ns: &[u64], eps: f64) -> Run {
    let r = condition_probe(family, ns, eps)?;
    match o {
        Output::Csv => {
            writeln!(out, "family,c3_pass,c4_pass,c4_window_consistent,derivative_vanishes_off_gamma")?;
            writeln!(
                out,
                "\"{}\",{},{},{},{}",
                r.family,
                r.c3_pass,
                r.c4_pass,
                r.c4_window_consistent.map(|v| v.to_string()).unwrap_or_default(),
                r.derivative_vanishes_off_gamma
            )?;
        }
        Output::Json => emit_json(out, &serde_json::to_value(&r).expect("report serializes"))?,
        Output::Pretty => {
            writeln!(out, "family                 {}", r.family)?;
            writeln!(out, "concentration points   {:?}", r.gammas)?;
            writeln!(out, "C3 (concentration)     {}", if r.c3_pass { "pass" } else { "fail" })?;
            for w in &r.c3_witnesses {
                let ratios: Vec<String> = w.ratios.iter().map(|v| format!("{v:.3e}")).collect();
                writeln!(out, "  φ'({})/φ'({})  {}", fmt7(w.a), fmt7(w.b), ratios.join(" "))?;
            }
            writeln!(out, "C4 (log-convexity)     {}", if r.c4_pass { "pass" } else { "fail" })?;
            if !r.c4_violations.is_empty() {
                writeln!(out, "  violations at {} grid points", r.c4_violations.len())?;
            }
            if let Some(c) = r.c4_window_consistent {
                writeln!(out, "  window inside ±eps   {c}")?;
            }
            writeln!(out, "φ' vanishes off γ      {}", r.derivative_vanishes_off_gamma)?;
        }
    }
    Ok(())
}

fn counterexample(out: &mut dyn Write, o: Output, exec: Exec, ns: &[u64], single: bool, a: f64, b: f64) -> Run {
    let c = 1.0 / 3.0 + (b - a) * (b - a) + (b - a) / 6.0;
    let lower = 3.0 / (32.0 * c);
    let reports = exec
        .map(ns, |&n| {
            let (x, y) = counterexample_pair(n, a, b)?;
            departure(&x, &y)
        })
        .into_iter()
        .collect::<stochord::Result<Vec<_>>>()?;
    let s = sweep_from_reports(ns.to_vec(), reports);
    let verdict = (!single).then(|| dast_verdict(&s, DAST_THRESHOLD, DAST_WINDOW));
    match o {
        Output::Csv => {
            writeln!(out, "n,epsilon,w2,lower_bound")?;
            for i in 0..ns.len() {
                writeln!(out, "{},{},{},{}", ns[i], fmt7(s.epsilons[i]), fmt7(s.w2s[i]), fmt7(lower))?;
            }
        }
        Output::Json => emit_json(
            out,
            &json!({
                "a": a,
                "b": b,
                "indices": s.indices,
                "epsilons": s.epsilons,
                "w2s": s.w2s,
                "lower_bound": lower,
                "bound_holds": s.epsilons.iter().all(|&e| e >= lower),
                "verdict": verdict.map(|v| v.as_str()),
            }),
        )?,
        Output::Pretty => {
            writeln!(out, "a {a}  b {b}  lower bound on epsilon {}", fmt7(lower))?;
            writeln!(out, "{:>6}  {:>12}  {:>12}", "n", "epsilon", "w2")?;
            for i in 0..ns.len() {
                writeln!(out, "{:>6}  {:>12}  {:>12}", ns[i], fmt7(s.epsilons[i]), fmt7(s.w2s[i]))?;
            }
            writeln!(out, "bound holds       {}", s.epsilons.iter().all(|&e| e >= lower))?;
            if let Some(v) = verdict {
                writeln!(out, "verdict           {}", v.as_str())?;
            }
        }
    }
    Ok(())
}

/// Parses, validates and runs; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match run(&cfg, out) {
        Ok(()) => 0,
        Err(RunError::Compute(Error::Argument(m))) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(RunError::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(RunError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(RunError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
