mod output;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use causal_power::model::influence_class;
use causal_power::{
    build_model, cheng_to_rubin, compile, direct_power, estimate_power, forecast_removal, independence_residual,
    intervene_all, joint, markov_check, outer_form, paf, parse_model, prob_causation, probability, rubin_prob_e,
    rubin_to_cheng, sample, total_power, validate, write_model, Assignment, ChengModel, Dataset, Error, PowerKind,
    Probability, RubinModel, Status,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{csv, Format, Style};

#[derive(Parser)]
#[command(name = "cpower", version, about = "Causal power in noisy-OR / noisy-AND networks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print numbers at full precision instead of 4 significant digits.
    #[arg(long, global = true)]
    full_precision: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and show each variable's structural equation.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Exact probability queries, optionally after interventions.
    Infer(InferArgs),
    /// Analytic causal power from the model parameters.
    Power {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        cause: String,
        #[arg(long)]
        effect: String,
        #[arg(long, value_enum, default_value_t = Kind::Total)]
        kind: Kind,
    },
    /// Causal power estimated from data, with an identifiability report.
    Estimate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        cause: String,
        #[arg(long)]
        effect: String,
        #[arg(long, value_enum, default_value_t = Kind::Total)]
        kind: Kind,
    },
    /// Apply interventions and print the resulting model, or query it.
    Intervene {
        #[arg(long)]
        model: PathBuf,
        /// Interventions, e.g. `D=1` or `C=0,D=1`.
        #[arg(long)]
        set: Assignment,
        /// Write the intervened model here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        query: Option<Assignment>,
        #[arg(long, default_value = "")]
        given: Assignment,
    },
    /// Draw a seeded sample of the observed variables as CSV.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Population attributable fraction.
    Paf(AttributionArgs),
    /// Probability that the cause alone produced the effect in an exposed case.
    ProbCausation(AttributionArgs),
    /// Effect rate forecast if the cause were removed from every unit.
    ForecastRemoval(AttributionArgs),
    /// Unit-kinds model and its correspondence with two-cause noisy-OR.
    #[command(subcommand)]
    Rubin(RubinCommand),
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// Event, e.g. `E=1`.
    #[arg(long)]
    query: Option<Assignment>,
    #[arg(long, default_value = "")]
    given: Assignment,
    /// Interventions applied before the query.
    #[arg(long, default_value = "")]
    set: Assignment,
    /// Print the full joint table.
    #[arg(long)]
    joint: bool,
}

#[derive(Args)]
struct AttributionArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    cause: String,
    #[arg(long)]
    effect: String,
}

#[derive(Subcommand)]
enum RubinCommand {
    /// Powers, independence residual and effect rates for given kind frequencies.
    Check {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        cu: f64,
        #[arg(long)]
        n: f64,
        /// Rate of C; repeat to evaluate several settings.
        #[arg(long = "pc", default_values_t = vec![0.5])]
        p_c: Vec<f64>,
        /// Rate of U, paired with each `--pc`.
        #[arg(long = "pu", default_values_t = vec![0.5])]
        p_u: Vec<f64>,
    },
    /// Kind frequencies implied by two independent powers.
    Convert {
        #[arg(long)]
        qc: f64,
        #[arg(long)]
        qu: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Direct,
    Total,
}

impl From<Kind> for PowerKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Direct => PowerKind::Direct,
            Kind::Total => PowerKind::Total,
        }
    }
}

/// Successful runs either answer the question or report a domain outcome
/// (undefined, not identified) on standard output.
enum Outcome {
    Answered,
    Domain,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<ChengModel> {
    let spec = parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    build_model(spec).with_context(|| format!("in {}", path.display()))
}

fn load_data(path: &Path) -> anyhow::Result<Dataset> {
    Dataset::from_csv_str(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn emit(text: &str) {
    print!("{text}");
    let _ = std::io::stdout().flush();
}

fn validate_cmd(style: Style, path: &Path) -> anyhow::Result<Outcome> {
    let spec = parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let problems = validate(&spec);
    if !problems.is_empty() {
        match style.format {
            Format::Text => {
                for p in &problems {
                    println!("invalid: {p}");
                }
            }
            Format::Csv => {
                let rows: Vec<Vec<String>> = problems.iter().map(|p| vec!["invalid".into(), p.to_string()]).collect();
                emit(&csv(&["status", "detail"], &rows));
            }
        }
        return Ok(Outcome::Domain);
    }
    let model = build_model(spec)?;
    let mut rows = Vec::new();
    for v in model.topological_order().iter().copied() {
        if model.is_exogenous(v) {
            continue;
        }
        let name = &model.var_at(v).name;
        let eq = compile(&model, name)?;
        rows.push(vec![name.clone(), eq.to_string(), outer_form(&eq).to_string()]);
    }
    let report = markov_check(&model, &joint(&model)?)?;
    match style.format {
        Format::Text => {
            println!("valid: {} variables, {} edges", model.len(), model.edges().len());
            for r in &rows {
                println!("{} = {}    [{}]", r[0], r[1], r[2]);
            }
            println!(
                "markov check: {} (max factorization error {})",
                if report.passes() { "ok" } else { "FAILED" },
                style.num(report.max_factorization_error)
            );
        }
        Format::Csv => emit(&csv(&["variable", "equation", "outer_form"], &rows)),
    }
    Ok(Outcome::Answered)
}

fn query(style: Style, model: &ChengModel, event: &Assignment, given: &Assignment) -> anyhow::Result<Outcome> {
    let p = probability(model, event, given)?;
    match style.format {
        Format::Text => match p {
            Probability::Defined(x) => println!("{}", style.num(x)),
            Probability::Undefined => println!("Undefined: conditioning event {given} has probability 0"),
        },
        Format::Csv => {
            let (status, value) = match p {
                Probability::Defined(x) => ("Defined", style.num(x)),
                Probability::Undefined => ("Undefined", String::new()),
            };
            emit(&csv(
                &["query", "given", "status", "probability"],
                &[vec![event.to_string(), given.to_string(), status.into(), value]],
            ));
        }
    }
    Ok(if p.is_undefined() { Outcome::Domain } else { Outcome::Answered })
}

fn infer_cmd(style: Style, args: &InferArgs) -> anyhow::Result<Outcome> {
    let mut model = load_model(&args.model)?;
    if !args.set.is_empty() {
        model = intervene_all(&model, &args.set)?;
    }
    if args.joint {
        let table = joint(&model)?;
        let names = table.variables().to_vec();
        let rows: Vec<Vec<String>> = table
            .probs()
            .iter()
            .enumerate()
            .map(|(cell, &p)| {
                let mut row: Vec<String> = (0..names.len()).map(|i| (cell >> i & 1).to_string()).collect();
                row.push(style.num(p));
                row
            })
            .collect();
        let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
        header.push("probability");
        match style.format {
            Format::Csv => emit(&csv(&header, &rows)),
            Format::Text => {
                println!("{}", header.join(" "));
                for r in rows {
                    println!("{}", r.join(" "));
                }
            }
        }
        return Ok(Outcome::Answered);
    }
    let event = args
        .query
        .as_ref()
        .ok_or_else(|| anyhow!(Error::Parse { line: 1, message: "--query or --joint is required".into() }))?;
    query(style, &model, event, &args.given)
}

fn power_cmd(style: Style, model: &ChengModel, cause: &str, effect: &str, kind: Kind) -> anyhow::Result<Outcome> {
    let result = match kind {
        Kind::Direct => direct_power(model, cause, effect),
        Kind::Total => total_power(model, cause, effect),
    };
    let power = match result {
        Ok(p) => p,
        Err(Error::Undefined(why)) => {
            match style.format {
                Format::Text => println!("Undefined: {why}"),
                Format::Csv => emit(&csv(
                    &["cause", "effect", "kind", "polarity", "status", "value"],
                    &[vec![cause.into(), effect.into(), PowerKind::from(kind).to_string(), String::new(), format!("Undefined: {why}"), String::new()]],
                )),
            }
            return Ok(Outcome::Domain);
        }
        Err(e) => return Err(e.into()),
    };
    if let Ok(influence) = influence_class(model, cause, effect) {
        if influence.extrapolated {
            eprintln!("note: a path with two or more preventers in series; its polarity follows the parity rule");
        }
    }
    match style.format {
        Format::Text => println!("{}", style.num(power.value)),
        Format::Csv => emit(&csv(
            &["cause", "effect", "kind", "polarity", "status", "value"],
            &[vec![
                cause.into(),
                effect.into(),
                PowerKind::from(kind).to_string(),
                power.polarity.to_string(),
                "Defined".into(),
                style.num(power.value),
            ]],
        )),
    }
    Ok(Outcome::Answered)
}

fn estimate_cmd(style: Style, model: &Path, data: &Path, cause: &str, effect: &str, kind: Kind) -> anyhow::Result<Outcome> {
    let model = load_model(model)?;
    let data = load_data(data)?;
    let est = estimate_power(&model, &data, cause, effect, kind.into())?;
    match style.format {
        Format::Text => {
            match (&est.status, est.value) {
                (Status::Identified, Some(v)) => println!("{}", style.num(v)),
                (status, _) => println!("{status}"),
            }
            if let Status::NotIdentified(reason) = &est.status {
                println!("detail: {}", reason.detail());
            }
            println!("polarity: {}", est.polarity);
            println!("conditioning: {}", est.conditioning);
            if let Some(dp) = est.delta_p {
                println!("delta_p: {}", style.num(dp));
            }
            if let (Some(raw), false) = (est.raw, est.is_identified()) {
                println!("raw: {}", style.num(raw));
            }
        }
        Format::Csv => emit(&csv(
            &["cause", "effect", "kind", "status", "value", "raw", "polarity", "conditioning", "delta_p"],
            &[vec![
                cause.into(),
                effect.into(),
                PowerKind::from(kind).to_string(),
                est.status.to_string(),
                style.opt(est.value),
                style.opt(est.raw),
                est.polarity.to_string(),
                est.conditioning.to_string(),
                style.opt(est.delta_p),
            ]],
        )),
    }
    Ok(if est.is_identified() { Outcome::Answered } else { Outcome::Domain })
}

fn model_csv(style: Style, model: &ChengModel) -> String {
    let mut rows = Vec::new();
    for v in model.variables() {
        rows.push(vec![
            "var".into(),
            v.name.clone(),
            String::new(),
            String::new(),
            if v.is_observed() { "observed" } else { "unobserved" }.into(),
            style.opt(v.base_rate),
            String::new(),
        ]);
    }
    for e in model.edges() {
        let scope = match &e.scope {
            causal_power::Scope::All if e.is_preventive() => "ALL".to_string(),
            causal_power::Scope::All => String::new(),
            causal_power::Scope::Edges(ids) => ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        };
        rows.push(vec![
            "edge".into(),
            e.source.clone(),
            e.target.clone(),
            e.polarity.to_string(),
            String::new(),
            style.num(e.q),
            scope,
        ]);
    }
    csv(&["element", "name", "target", "polarity", "observability", "value", "scope"], &rows)
}

fn intervene_cmd(
    style: Style,
    path: &Path,
    set: &Assignment,
    out: Option<&Path>,
    event: Option<&Assignment>,
    given: &Assignment,
) -> anyhow::Result<Outcome> {
    let model = intervene_all(&load_model(path)?, set)?;
    if let Some(event) = event {
        return query(style, &model, event, given);
    }
    let text = match style.format {
        Format::Text => write_model(&model),
        Format::Csv => model_csv(style, &model),
    };
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => emit(&text),
    }
    Ok(Outcome::Answered)
}

fn simulate_cmd(path: &Path, n: usize, seed: u64, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let data = sample(&load_model(path)?, n, seed)?;
    let text = data.to_csv();
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => emit(&text),
    }
    Ok(Outcome::Answered)
}

fn attribution_cmd(
    style: Style,
    name: &str,
    f: fn(&Dataset, &str, &str) -> causal_power::Result<Probability>,
    args: &AttributionArgs,
) -> anyhow::Result<Outcome> {
    let data = load_data(&args.data)?;
    let p = f(&data, &args.cause, &args.effect)?;
    match style.format {
        Format::Text => match p {
            Probability::Defined(x) => println!("{}", style.num(x)),
            Probability::Undefined => println!("Undefined: effect absent or a cause stratum is empty"),
        },
        Format::Csv => {
            let (status, value) = match p {
                Probability::Defined(x) => ("Defined", style.num(x)),
                Probability::Undefined => ("Undefined", String::new()),
            };
            emit(&csv(
                &["statistic", "cause", "effect", "status", "value"],
                &[vec![name.into(), args.cause.clone(), args.effect.clone(), status.into(), value]],
            ));
        }
    }
    Ok(if p.is_undefined() { Outcome::Domain } else { Outcome::Answered })
}

fn rubin_cmd(style: Style, cmd: &RubinCommand) -> anyhow::Result<Outcome> {
    match cmd {
        RubinCommand::Check { c, u, cu, n, p_c, p_u } => {
            if p_c.len() != p_u.len() {
                return Err(Error::Parse { line: 1, message: "--pc and --pu must be given the same number of times".into() }.into());
            }
            let rm = RubinModel::new(*c, *u, *cu, *n)?;
            let (qc, qu) = rubin_to_cheng(&rm);
            let residual = independence_residual(&rm);
            let rates: Vec<(f64, f64, f64)> = p_c
                .iter()
                .zip(p_u)
                .map(|(&a, &b)| (a, b, rubin_prob_e(&rm, a, b)))
                .collect();
            match style.format {
                Format::Text => {
                    println!("q_ec: {}", style.num(qc));
                    println!("q_eu: {}", style.num(qu));
                    println!("independence residual: {}", style.num(residual));
                    for (a, b, p) in &rates {
                        println!("P(E) at P(C)={}, P(U)={}: {}", style.num(*a), style.num(*b), style.num(*p));
                    }
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rates
                        .iter()
                        .map(|(a, b, p)| {
                            vec![style.num(qc), style.num(qu), style.num(residual), style.num(*a), style.num(*b), style.num(*p)]
                        })
                        .collect();
                    emit(&csv(&["q_ec", "q_eu", "residual", "p_c", "p_u", "prob_e"], &rows));
                }
            }
        }
        RubinCommand::Convert { qc, qu } => {
            let rm = cheng_to_rubin(*qc, *qu)?;
            let values = [rm.prob_c, rm.prob_u, rm.prob_cu, rm.prob_n].map(|x| style.num(x));
            match style.format {
                Format::Text => {
                    for (k, v) in ["c", "u", "cu", "n"].iter().zip(&values) {
                        println!("{k}: {v}");
                    }
                }
                Format::Csv => emit(&csv(&["c", "u", "cu", "n"], &[values.to_vec()])),
            }
        }
    }
    Ok(Outcome::Answered)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let style = Style {
        format: cli.format,
        full_precision: cli.full_precision,
    };
    match &cli.command {
        Command::Validate { model } => validate_cmd(style, model),
        Command::Infer(args) => infer_cmd(style, args),
        Command::Power { model, cause, effect, kind } => power_cmd(style, &load_model(model)?, cause, effect, *kind),
        Command::Estimate { model, data, cause, effect, kind } => {
            estimate_cmd(style, model, data, cause, effect, *kind)
        }
        Command::Intervene { model, set, out, query, given } => {
            intervene_cmd(style, model, set, out.as_deref(), query.as_ref(), given)
        }
        Command::Simulate { model, n, seed, out } => simulate_cmd(model, *n, *seed, out.as_deref()),
        Command::Paf(args) => attribution_cmd(style, "paf", paf, args),
        Command::ProbCausation(args) => attribution_cmd(style, "prob_causation", prob_causation, args),
        Command::ForecastRemoval(args) => attribution_cmd(style, "forecast_removal", forecast_removal, args),
        Command::Rubin(cmd) => rubin_cmd(style, cmd),
    }
}

/// Errors about the inputs themselves exit 2; errors about what can be
/// computed from valid inputs exit 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NoDirectEdge(..)
            | Error::NoPath(..)
            | Error::Undefined(_)
            | Error::DataModelMismatch(_)
            | Error::RouteMismatch { .. }
            | Error::TooLarge { .. }
            | Error::ExogenousVariable(_)
            | Error::InvalidRubin(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Answered) => ExitCode::SUCCESS,
        Ok(Outcome::Domain) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
