use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sidon_core::brset::{extract_brset, is_br_set, BrSet, ExtractOptions};
use sidon_core::constructions::{
    binomial_family, maxspan_from_brset, maxspan_from_irreducibles, monomial, trace_space, BinomialParams, BrsetParams,
    ConstructionRecord, IrreducibleParams, MonomialParams, TraceParams, Variant,
};
use sidon_core::experiments::{run_experiment, ExperimentSpec, Report};
use sidon_core::field::{FieldCtx, GeneratorOptions};
use sidon_core::orbit::{orbit_report, semilinear_equivalent};
use sidon_core::sidon::{audit_bounds, is_r_sidon, is_sidon_intersection, AuditOptions, DEFAULT_BUDGET};
use sidon_core::subspace::{span_chain, Subspace, SubspaceJson};

/// Exit status for errors that prevent a report from being produced.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "sidon", version, about = "r-Sidon spaces over finite fields")]
struct Cli {
    /// Seed for every random choice (generators, δ, sampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated items (multisets, field elements, sums).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build F_{q^n}, q = p^a, and print its spec.
    Field(FieldArgs),
    /// Run a built-in construction and print its record.
    Construct(ConstructArgs),
    /// Span chain V, V^2, ... with dimensions and stabilizers.
    Span {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_s: usize,
    },
    /// Decide r-Sidon; optionally audit the dimension bounds.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Also audit the span bounds up to `r`.
        #[arg(long)]
        audit: bool,
    },
    /// Orbit code parameters of {αV}.
    Orbit { file: PathBuf },
    /// Search for U = αV^σ.
    Equiv { first: PathBuf, second: PathBuf },
    #[command(subcommand)]
    Brset(BrsetCommand),
    /// Run a named reproduction experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long)]
    n: u32,
    /// Little-endian monic modulus of degree a·n, comma separated.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionName {
    Monomial,
    Binomial,
    Trace,
    BrsetMaxspan,
    IrreducibleMaxspan,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    name: ConstructionName,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// Ambient degree for the max-span constructions.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "mid")]
    variant: Variant,
    /// Absolute coordinates of δ, comma separated.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<u64>>,
    /// Absolute coordinates of γ (brset-maxspan only).
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<u64>>,
    /// The B_r-set for brset-maxspan.
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<u64>>,
    /// Insist on a primitive γ.
    #[arg(long)]
    primitive: bool,
    /// Use the built-in list of 20 quadratics over F_7 (fixes q = 7, k = 4, r = 3).
    #[arg(long)]
    f7: bool,
    #[arg(long)]
    emit_subspace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Definition,
    Intersection,
}

#[derive(Subcommand)]
enum BrsetCommand {
    /// Extract a B_r-set from an r-Sidon subspace file.
    Extract {
        file: PathBuf,
        #[arg(long)]
        r: usize,
        /// Absolute coordinates of a primitive γ; searched for otherwise.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<u64>>,
        #[arg(long)]
        no_translate: bool,
        /// Skip the r-Sidon check.
        #[arg(long)]
        assume_sidon: bool,
    },
    /// Re-check a B_r-set file.
    Verify { file: PathBuf },
}

#[derive(Args)]
struct ExperimentArgs {
    /// table2, table3, prop-f26, prop-trace-9, sample-f2-9, brset-316,
    /// monomial-grid, trace-grid
    name: Option<String>,
    /// JSON ExperimentSpec file; flags given on the command line win.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Parameter override `key=json`, e.g. `rows=[0,4]` or `samples=5000`.
    #[arg(long = "set", value_name = "KEY=JSON")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn budget(cli: &Cli) -> u128 {
    cli.budget.map_or(DEFAULT_BUDGET, u128::from)
}

fn run(cli: &Cli) -> Result<u8> {
    let value = match &cli.command {
        Command::Field(a) => {
            let ctx = FieldCtx::new(a.p, a.a, a.n, a.modulus.clone(), cli.seed)?;
            json!({
                "field": ctx.spec(),
                "q": ctx.q(),
                "degree": ctx.degree(),
                "order": ctx.group_order().to_str_radix(10),
            })
        }
        Command::Construct(a) => {
            let rec = construct(cli, a)?;
            if let Some(path) = &a.emit_subspace {
                write_json(path, &rec.subspace)?;
            }
            serde_json::to_value(&rec)?
        }
        Command::Span { file, max_s } => {
            let v = load_subspace(file)?;
            let chain = span_chain(&v, *max_s)?;
            json!({
                "field": v.ctx().spec(),
                "subspace_id": v.id(),
                "dims": chain.dims(),
                "h": chain.levels.iter().map(|l| l.h).collect::<Vec<_>>(),
                "t_bar": chain.t_bar,
                "truncated": chain.truncated,
                "generated_field_degree": chain.generated_field_degree,
                "stabilizer": v.stabilizer(),
            })
        }
        Command::Check { file, r, method, audit } => {
            let v = load_subspace(file)?;
            let report = match (method, r) {
                (Method::Intersection, 2) => is_sidon_intersection(&v, budget(cli))?,
                (Method::Intersection, _) => bail!("the intersection criterion only decides r = 2"),
                (Method::Auto, 2) => sidon_core::sidon::is_sidon(&v, budget(cli))?,
                _ => is_r_sidon(&v, *r, budget(cli))?,
            };
            let mut out = json!({ "field": v.ctx().spec(), "report": report });
            if *audit {
                let mut opts = AuditOptions {
                    budget: budget(cli),
                    ..Default::default()
                };
                opts.known.insert(*r, report.verdict);
                out["audit"] = serde_json::to_value(audit_bounds(&v, (*r).max(2), &opts)?)?;
            }
            out
        }
        Command::Orbit { file } => {
            let v = load_subspace(file)?;
            json!({ "field": v.ctx().spec(), "report": orbit_report(&v, budget(cli))? })
        }
        Command::Equiv { first, second } => {
            let u = load_subspace(first)?;
            let v = Subspace::from_json_in(u.ctx(), &read_json::<SubspaceJson>(second)?)?;
            json!({ "field": u.ctx().spec(), "report": semilinear_equivalent(&u, &v, budget(cli))? })
        }
        Command::Brset(BrsetCommand::Extract {
            file,
            r,
            gamma,
            no_translate,
            assume_sidon,
        }) => {
            let v = load_subspace(file)?;
            let ctx = v.ctx();
            let gamma = match gamma {
                Some(c) => ctx.element(c)?,
                None => ctx.find_generator(
                    1,
                    &GeneratorOptions {
                        primitive: true,
                        norm: None,
                        seed: cli.seed,
                    },
                )?,
            };
            let opts = ExtractOptions {
                translate: !no_translate,
                assume_sidon: *assume_sidon,
                budget: budget(cli),
            };
            let set = extract_brset(&v, *r, &gamma, &opts)?;
            json!({ "field": ctx.spec(), "gamma": gamma.to_json(), "brset": set })
        }
        Command::Brset(BrsetCommand::Verify { file }) => {
            let set: BrSet = read_json(file)?;
            json!({ "brset": set, "check": is_br_set(&set.elements, set.r, set.modulus, budget(cli))? })
        }
        Command::Experiment(a) => {
            let report = experiment(cli, a)?;
            emit(cli, &report_value(&report, cli.format))?;
            return Ok(report.exit_code as u8);
        }
    };
    emit(cli, &value)?;
    Ok(0)
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<ConstructionRecord> {
    let seed = cli.seed;
    let rec = match a.name {
        ConstructionName::Monomial => {
            let mut p = MonomialParams::new(a.q, a.k, a.s, a.t, a.r.unwrap_or(2));
            p.seed = seed;
            p.primitive = a.primitive;
            if let Some(b) = cli.budget {
                p.budget = b.into();
            }
            monomial(&p)?
        }
        ConstructionName::Binomial => {
            let mut p = BinomialParams::new(a.q, a.k, a.s, a.t, a.variant);
            p.seed = seed;
            p.r = a.r;
            p.delta = a.delta.clone();
            binomial_family(&p)?
        }
        ConstructionName::Trace => {
            let mut p = TraceParams::new(a.q, a.k, a.t);
            p.seed = seed;
            p.r = a.r;
            p.primitive = a.primitive;
            trace_space(&p)?
        }
        ConstructionName::BrsetMaxspan => {
            let set = a.set.as_ref().context("--set is required for brset-maxspan")?;
            let n = a.n.context("--n is required for brset-maxspan")?;
            let mut p = BrsetParams::new(set, a.q, a.r.unwrap_or(2), n);
            p.seed = seed;
            p.gamma = a.gamma.clone();
            if let Some(b) = cli.budget {
                p.budget = b.into();
            }
            maxspan_from_brset(&p)?
        }
        ConstructionName::IrreducibleMaxspan => {
            let mut p = if a.f7 {
                IrreducibleParams::f7_example()
            } else {
                IrreducibleParams::new(a.q, a.k, a.r.unwrap_or(2))
            };
            p.seed = seed;
            p.n = a.n;
            maxspan_from_irreducibles(&p)?
        }
    };
    Ok(rec)
}

fn experiment(cli: &Cli, a: &ExperimentArgs) -> Result<Report> {
    let mut spec = match &a.spec {
        Some(path) => read_json::<ExperimentSpec>(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(name) = &a.name {
        spec.name = name.clone();
    }
    if spec.name.is_empty() {
        bail!("experiment name missing");
    }
    if a.spec.is_none() || cli.seed != 0 {
        spec.seed = cli.seed;
    }
    if cli.budget.is_some() {
        spec.budget = cli.budget;
    }
    for kv in &a.overrides {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("override `{kv}` is not KEY=JSON"))?;
        let v: Value = serde_json::from_str(v).with_context(|| format!("override `{k}`"))?;
        spec.overrides.insert(k.to_string(), v);
    }
    Ok(run_experiment(&spec)?)
}

fn report_value(report: &Report, format: Format) -> Value {
    match format {
        Format::Json => serde_json::to_value(report).expect("report serializes"),
        // one CSV line per row, nested values kept as JSON text
        Format::Csv => Value::Array(
            report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "experiment": report.experiment,
                        "index": r.index,
                        "params": r.params.to_string(),
                        "expected": r.expected.to_string(),
                        "computed": r.computed.to_string(),
                        "verdict": r.verdict,
                    })
                })
                .collect(),
        ),
    }
}

fn load_subspace(path: &Path) -> Result<Subspace> {
    let json: SubspaceJson = read_json(path)?;
    Ok(Subspace::from_json(&json)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn emit(cli: &Cli, value: &Value) -> Result<()> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Csv => to_csv(value)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Objects become one record, arrays of objects one record each. Nested
/// objects flatten to dotted column names; arrays are written as compact JSON.
fn to_csv(value: &Value) -> Result<String> {
    let records: Vec<Vec<(String, String)>> = match value {
        Value::Object(_) => vec![flatten(value)],
        Value::Array(items) if items.iter().all(Value::is_object) => items.iter().map(flatten).collect(),
        _ => bail!("value has no tabular form"),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.iter().map(|(k, _)| k))?;
    }
    for rec in records {
        w.write_record(rec.iter().map(|(_, v)| v))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn flatten(value: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    go(&key, x, out);
                }
            }
            Value::String(s) => out.push((prefix.into(), s.clone())),
            other => out.push((prefix.into(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", value, &mut out);
    out
}
