//! Command-line front end: build instances, query LMOs, run methods, verify.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lmo_hardbench::algorithms::export;
use lmo_hardbench::harness::sweep::write_sweep_csv;
use lmo_hardbench::harness::suite::DEFAULT_SEED;
use lmo_hardbench::harness::verify::{verify_lower_bound, FEASIBILITY_TOLERANCE};
use lmo_hardbench::lmo::contains;
use lmo_hardbench::{
    build_hard_instance, build_smoothed_instance, lmo_minkowski, lmo_weighted_ball, run_method, run_suite, sweep,
    BaseKind, BoundSpec, Family, Instance, InstanceDocument, Method, Permutation, PermutedFamily,
    ResistingOracle, SuiteConfig, SuiteKind, SweepConfig, Trajectory,
};

/// Overrides `--seed` when set.
const SEED_ENV: &str = "LMO_HARDBENCH_SEED";

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "lmo-hardbench", version, about = "Hard instances and lower-bound checks for LMO methods")]
pub struct Cli {
    /// Print the parsed configuration as JSON and exit.
    #[arg(long, global = true)]
    #[serde(default)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Build an instance and write it as JSON.
    Instance(InstanceArgs),
    /// Solve one linear minimization over a stored instance.
    Lmo(LmoArgs),
    /// Run a method and print its trajectory as CSV.
    Run(RunArgs),
    /// Run the verification suite; exit status 1 on any failure.
    Verify(VerifyArgs),
    /// Tabulate gaps against bounds over methods, budgets and families.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Ball,
    Permuted,
    Smoothed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseArg {
    Simplex,
    WeightedBall,
}

impl From<BaseArg> for BaseKind {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Simplex => BaseKind::Simplex,
            BaseArg::WeightedBall => BaseKind::WeightedBall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InstanceArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Smoothing parameter (smoothed kind only).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = BaseArg::WeightedBall)]
    pub base: BaseArg,
    /// 1-based weight ranks, comma separated; identity if omitted.
    #[arg(long, value_delimiter = ',')]
    pub perm: Option<Vec<usize>>,
    /// Output path; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LmoArgs {
    /// Instance JSON written by `instance`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Query direction, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "T", value_parser = parse_budget)]
    pub t: usize,
    /// Answer LMO queries with the resisting oracle on the permuted family.
    #[arg(long)]
    pub resisting: bool,
    /// Run on the smoothed instance with this β.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = BaseArg::WeightedBall)]
    pub base: BaseArg,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Write the full trajectory as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the bound verification (and completion, if resisting) as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Vec<SuiteKind>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Add a corrupted check that must fail.
    #[arg(long)]
    pub inject_fault: bool,
    /// Print JSON instead of the text report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "ball")]
    pub families: Vec<Family>,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16", value_parser = parse_budget)]
    pub budgets: Vec<usize>,
    /// Comma separated; `all` for every method, empty for none.
    #[arg(long, default_value = "all")]
    pub methods: MethodList,
    /// Smoothed families only; defaults to 200/diam(base).
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_budget(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("the iteration budget must be at least 1".into()),
        Ok(t) => Ok(t),
        Err(e) => Err(e.to_string()),
    }
}

/// A possibly empty method list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodList(pub Vec<Method>);

impl FromStr for MethodList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(MethodList(Method::suite())),
            "" => Ok(MethodList(Vec::new())),
            list => list.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>().map(MethodList),
        }
    }
}

impl fmt::Display for MethodList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        f.write_str(&names.join(","))
    }
}

impl Cli {
    /// Arguments that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["lmo-hardbench".to_string()];
        if self.dump_config {
            a.push("--dump-config".into());
        }
        let flag = |a: &mut Vec<String>, name: &str, value: String| {
            a.push(format!("--{name}"));
            a.push(value);
        };
        let path = |p: &Path| p.to_string_lossy().into_owned();
        let join = |v: Vec<String>| v.join(",");
        match &self.command {
            Command::Instance(x) => {
                a.push("instance".into());
                flag(&mut a, "kind", value_name(x.kind));
                flag(&mut a, "d", x.d.to_string());
                flag(&mut a, "L", x.l.to_string());
                flag(&mut a, "alpha", x.alpha.to_string());
                if let Some(b) = x.beta {
                    flag(&mut a, "beta", b.to_string());
                }
                flag(&mut a, "base", value_name(x.base));
                if let Some(p) = &x.perm {
                    flag(&mut a, "perm", join(p.iter().map(|r| r.to_string()).collect()));
                }
                if let Some(o) = &x.output {
                    flag(&mut a, "output", path(o));
                }
            }
            Command::Lmo(x) => {
                a.push("lmo".into());
                flag(&mut a, "instance", path(&x.instance));
                a.push(format!("--p={}", x.p));
            }
            Command::Run(x) => {
                a.push("run".into());
                flag(&mut a, "method", x.method.to_string());
                flag(&mut a, "d", x.d.to_string());
                flag(&mut a, "T", x.t.to_string());
                if x.resisting {
                    a.push("--resisting".into());
                }
                if let Some(b) = x.beta {
                    flag(&mut a, "beta", b.to_string());
                }
                flag(&mut a, "base", value_name(x.base));
                flag(&mut a, "L", x.l.to_string());
                flag(&mut a, "alpha", x.alpha.to_string());
                if let Some(o) = &x.output {
                    flag(&mut a, "output", path(o));
                }
                if let Some(o) = &x.report {
                    flag(&mut a, "report", path(o));
                }
            }
            Command::Verify(x) => {
                a.push("verify".into());
                for s in &x.suite {
                    flag(&mut a, "suite", s.name().into());
                }
                flag(&mut a, "seed", x.seed.to_string());
                if x.inject_fault {
                    a.push("--inject-fault".into());
                }
                if x.json {
                    a.push("--json".into());
                }
            }
            Command::Sweep(x) => {
                a.push("sweep".into());
                flag(&mut a, "families", join(x.families.iter().map(|f| f.to_string()).collect()));
                flag(&mut a, "budgets", join(x.budgets.iter().map(|b| b.to_string()).collect()));
                a.push(format!("--methods={}", x.methods));
                if !x.betas.is_empty() {
                    flag(&mut a, "betas", join(x.betas.iter().map(|b| b.to_string()).collect()));
                }
                if let Some(o) = &x.output {
                    flag(&mut a, "output", path(o));
                }
            }
        }
        a
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn writer(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn cmd_instance(args: &InstanceArgs) -> anyhow::Result<()> {
    let instance = match args.kind {
        KindArg::Ball => {
            let mut h = build_hard_instance(args.d, args.l, args.alpha)?;
            if let Some(p) = &args.perm {
                h.set = h.set.with_permutation(Permutation::from_one_based(p)?)?;
            }
            Instance::Ball(h)
        }
        KindArg::Permuted => {
            let family = PermutedFamily::scaled(args.d, args.l, args.alpha)?;
            let perm = match &args.perm {
                Some(p) => Permutation::from_one_based(p)?,
                None => Permutation::identity(args.d),
            };
            if perm.len() != args.d {
                bail!("--perm has {} entries but d = {}", perm.len(), args.d);
            }
            Instance::Permuted { family, perm }
        }
        KindArg::Smoothed => {
            let Some(beta) = args.beta else { bail!("--kind smoothed needs --beta") };
            if args.l != 1.0 || args.alpha != 1.0 {
                bail!("smoothed instances are defined for L = 1 and alpha = 1 only");
            }
            Instance::Smoothed(build_smoothed_instance(args.base.into(), args.d, beta)?)
        }
    };
    let json = serde_json::to_string_pretty(&instance.to_document())?;
    write_text(args.output.as_deref(), &json)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LmoOutput {
    z: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constraint_residual: Option<f64>,
}

fn cmd_lmo(args: &LmoArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let doc: InstanceDocument = serde_json::from_str(&text).context("parsing instance document")?;
    let instance = Instance::from_document(&doc)?;
    let p = lmo_hardbench::vector::parse_csv_vector(&args.p).with_context(|| format!("parsing --p `{}`", args.p))?;
    let out = match &instance {
        Instance::Ball(h) => {
            let r = lmo_weighted_ball(&h.set, &p)?;
            LmoOutput { z: r.z, lambda: Some(r.lambda), constraint_residual: Some(r.constraint_residual) }
        }
        Instance::Permuted { family, perm } => {
            let r = lmo_weighted_ball(&family.permuted_set(perm)?, &p)?;
            LmoOutput { z: r.z, lambda: Some(r.lambda), constraint_residual: Some(r.constraint_residual) }
        }
        Instance::Smoothed(s) => LmoOutput { z: lmo_minkowski(s, &p)?, lambda: None, constraint_residual: None },
    };
    write_text(None, &serde_json::to_string(&out)?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunReport<'a> {
    bounds: Vec<lmo_hardbench::VerificationReport>,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    completion: Option<&'a lmo_hardbench::CompletionResult>,
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    if args.resisting && args.beta.is_some() {
        bail!("--resisting and --beta are mutually exclusive");
    }
    let mut completion = None;
    let (traj, feasible, specs): (Trajectory, bool, Vec<BoundSpec>) = if args.resisting {
        let family = PermutedFamily::scaled(args.d, args.l, args.alpha)?;
        let mut oracle = ResistingOracle::new(family.clone());
        let traj = run_method(&family.objective(), &mut oracle, args.method, args.t, family.optimal_value())?;
        let done = oracle.complete_permutation(traj.final_point())?;
        let feasible = done.feasible;
        completion = Some(done);
        let specs = if args.d == 2 * (args.t + 1) { vec![BoundSpec::t1(args.t, args.l, args.alpha)] } else { vec![] };
        (traj, feasible, specs)
    } else if let Some(beta) = args.beta {
        if args.l != 1.0 || args.alpha != 1.0 {
            bail!("smoothed instances are defined for L = 1 and alpha = 1 only");
        }
        let kind: BaseKind = args.base.into();
        let mut inst = build_smoothed_instance(kind, args.d, beta)?;
        let obj = inst.objective.clone();
        let traj = run_method(&obj, &mut inst, args.method, args.t, 0.0)?;
        let feasible = inst.contains(traj.final_point(), FEASIBILITY_TOLERANCE)?;
        let specs = match kind {
            BaseKind::WeightedBall => {
                let mut s = vec![BoundSpec::t5_per_iter(args.d, args.t, beta)];
                if args.d == 2 * (args.t + 1) {
                    s.push(BoundSpec::t5_final(args.t, beta));
                }
                s
            }
            BaseKind::Simplex => {
                let mut s = vec![BoundSpec::t4_per_iter(args.d, args.t, beta)];
                if args.d == 2 * args.t {
                    s.push(BoundSpec::t4_final(args.t, beta));
                }
                s
            }
        };
        (traj, feasible, specs)
    } else {
        let inst = build_hard_instance(args.d, args.l, args.alpha)?;
        let mut set = inst.set.clone();
        let traj = run_method(&inst.objective, &mut set, args.method, args.t, 0.0)?;
        let feasible = contains(&inst.set, traj.final_point(), FEASIBILITY_TOLERANCE)?;
        let mut specs = vec![BoundSpec::t2_per_iter(args.d, args.t, args.l, args.alpha)];
        if args.d == 2 * (args.t + 1) {
            specs.push(BoundSpec::t2_final(args.t, args.l, args.alpha));
        }
        (traj, feasible, specs)
    };

    export::write_csv(&traj, io::stdout().lock())?;

    let mut bounds = Vec::new();
    for spec in &specs {
        bounds.push(verify_lower_bound(&traj, spec, completion.as_ref())?);
    }
    let mut err = io::stderr().lock();
    writeln!(err, "method {} d {} T {}: final gap {:e}, feasible {}", traj.method, traj.dim, args.t, traj.final_gap, feasible)?;
    for b in &bounds {
        writeln!(
            err,
            "{} bound {:e}: {} (margin {:e})",
            b.theorem.label(),
            b.bound_value,
            if b.passed { "holds" } else { "VIOLATED" },
            b.margin
        )?;
    }
    if let Some(c) = &completion {
        writeln!(
            err,
            "completion: queries {}, unassigned {}, feasible {}, gap {:e}, certifiedFloor {:e}, tailBound {:e}",
            c.queries, c.unassigned, c.feasible, c.gap, c.certified_floor, c.tail_bound
        )?;
    }
    if let Some(path) = &args.output {
        write_text(Some(path), &export::to_json(&traj)?)?;
    }
    if let Some(path) = &args.report {
        let report = RunReport { bounds, feasible, completion: completion.as_ref() };
        write_text(Some(path), &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let config = SuiteConfig { suites: args.suite.clone(), seed: args.seed, inject_fault: args.inject_fault };
    let report = run_suite(&config);
    if args.json {
        write_text(None, &report.to_json()?)?;
    } else {
        let mut out = io::stdout().lock();
        out.write_all(report.render().as_bytes())?;
        out.flush()?;
    }
    Ok(report.passed)
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let config = SweepConfig {
        families: args.families.clone(),
        budgets: args.budgets.clone(),
        methods: args.methods.0.clone(),
        betas: args.betas.clone(),
    };
    let rows = sweep(&config)?;
    let mut w = writer(args.output.as_deref())?;
    write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn apply_seed_env(cli: &mut Cli) -> anyhow::Result<()> {
    if let (Ok(raw), Command::Verify(v)) = (std::env::var(SEED_ENV), &mut cli.command) {
        v.seed = raw.trim().parse().with_context(|| format!("{SEED_ENV}=`{raw}` is not an unsigned integer"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if cli.dump_config {
        write_text(None, &serde_json::to_string_pretty(cli)?)?;
        return Ok(true);
    }
    match &cli.command {
        Command::Instance(a) => cmd_instance(a).map(|_| true),
        Command::Lmo(a) => cmd_lmo(a).map(|_| true),
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if let Err(e) = apply_seed_env(&mut cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
