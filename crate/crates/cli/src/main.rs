//! `hvc`: evaluate hidden-variable game models from JSON files, render the
//! condition ledger, simulate the sphere protocol, hill-climb for high
//! scores, and export the built-in reference models.
//!
//! Exit codes: 0 success, 2 unreadable or unparseable input, 3 the model
//! fails validation, 4 usage or domain errors.

use std::fmt::Write as _;
use std::io::Read as _;

use clap::builder::ArgGroup;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hvc_core::chsh::{chsh_score, optimal_alice, ChshReport, ChshVariant, TSIRELSON_SCORE};
use hvc_core::conditions::{condition_profile, ConditionProfile};
use hvc_core::dist::{enumerate_joint, HvcModel, DEFAULT_TOL};
use hvc_core::info::InfoReport;
use hvc_core::model_file::{parse_model_file, render_model_file, Meta, ModelFile};
use hvc_core::search::{hill_climb, Constraint, SearchConfig};
use hvc_core::toner_bacon::{
    tb_chsh, tb_correlator, tb_message_entropy, EntropyEstimate, EntropyMethod, TbChshEstimate,
    TbChshSettings, TbConfig, TbEstimate, DEFAULT_QUADRATURE_NODES, MIN_CHSH_ROUNDS,
};
use hvc_core::zoo::{zoo_get, zoo_list};
use hvc_core::Error;

#[derive(Parser)]
#[command(
    name = "hvc",
    version,
    about = "Analyzer for local hidden-variable models with one-way communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one model: game scores, guessing table, condition ledger
    Evaluate(EvaluateArgs),
    /// The eight-row condition ledger for one model
    Conditions(ConditionsArgs),
    /// Monte-Carlo simulation of the one-bit sphere protocol
    Tb(TbArgs),
    /// Random-restart hill climbing for high-scoring models
    Search(SearchArgs),
    /// Built-in reference models
    #[command(subcommand)]
    Zoo(ZooCommand),
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model file path, or `-` for stdin
    path: String,
    /// Game sign variant: `all` or a single index 0..=7
    #[arg(long, default_value = "all", value_parser = parse_variant_flag)]
    variant: VariantChoice,
    #[arg(long, value_enum, default_value_t = EvalFormat::Json)]
    format: EvalFormat,
    /// Tolerance for the ledger verdicts
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ConditionsArgs {
    /// Model file path, or `-` for stdin
    path: String,
    #[arg(long, value_enum, default_value_t = CondFormat::Table)]
    format: CondFormat,
    /// Tolerance for the ledger verdicts
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["angle_deg", "settings", "entropy"])))]
struct TbArgs {
    /// Correlator for one pair: sender along +z, receiver tilted this many
    /// degrees toward +x
    #[arg(long)]
    angle_deg: Option<f64>,
    /// Four-setting game: JSON file with "alice" and "bob" direction pairs,
    /// `-` for stdin, or the built-in name `coplanar`
    #[arg(long)]
    settings: Option<String>,
    /// Mean per-round entropy of the communicated bit
    #[arg(long)]
    entropy: bool,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent RNG streams per setting pair; fixed seed + chunks
    /// reproduces output exactly regardless of thread count
    #[arg(long, default_value_t = 64)]
    chunks: u32,
    /// Estimator for --entropy
    #[arg(long, value_enum, default_value_t = EntropyFlag::Quadrature)]
    method: EntropyFlag,
    /// Nodes (quadrature) or samples (monte-carlo) for --entropy;
    /// defaults to 2000 nodes / 1000000 samples
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// Structural family: none, message-independent-of-b,
    /// outcome-uninformative, delta-b-zero
    #[arg(long, default_value = "none")]
    constraint: String,
    /// Hidden-value cardinality
    #[arg(long = "L", default_value_t = 2)]
    lambda_card: usize,
    /// Message cardinality
    #[arg(long = "M", default_value_t = 2)]
    message_card: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Proposal steps per restart
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 0.1)]
    step_size: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum ZooCommand {
    /// Names and one-line summaries of the built-in models
    List,
    /// Write a built-in model to PATH (`-` for stdout) in the file format
    Export { name: String, path: String },
}

#[derive(Clone, Copy)]
enum VariantChoice {
    All,
    One(u8),
}

fn parse_variant_flag(s: &str) -> Result<VariantChoice, String> {
    if s == "all" {
        return Ok(VariantChoice::All);
    }
    match s.parse::<u8>() {
        Ok(v) if v < 8 => Ok(VariantChoice::One(v)),
        _ => Err(String::from("expected `all` or an index 0..=7")),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CondFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyFlag {
    Quadrature,
    MonteCarlo,
}

/// A failure routed to stderr plus a process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = match err {
            Error::Parse(_) => 2,
            Error::InvalidModel(_) => 3,
            _ => 4,
        };
        Failure { code, message: format!("{err}") }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Conditions(args) => cmd_conditions(&args),
        Command::Tb(args) => cmd_tb(&args),
        Command::Search(args) => cmd_search(&args),
        Command::Zoo(args) => cmd_zoo(&args),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// Reads a path or stdin (`-`). Unreadable input is a parse-class failure:
/// there is nothing to validate.
fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure { code: 2, message: format!("stdin: {e}") })?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| Failure { code: 2, message: format!("{path}: {e}") })
}

fn load_model(path: &str) -> Result<(ModelFile, HvcModel), Failure> {
    let text = read_input(path)?;
    let file = parse_model_file(&text)?;
    let model = file.to_model()?;
    Ok((file, model))
}

fn model_label(file: &ModelFile, path: &str) -> String {
    file.meta
        .as_ref()
        .and_then(|m| m.name.clone())
        .unwrap_or_else(|| path.to_string())
}

// ---------------------------------------------------------------- evaluate

#[derive(Serialize)]
struct EvaluateReport {
    model: String,
    tol: f64,
    /// Best score among the reported variants; null when the setting priors
    /// are weighted and the game is undefined.
    chsh_score: Option<f64>,
    chsh: Option<Vec<ChshReport>>,
    info: InfoReport,
    conditions: ConditionProfile,
    notes: Vec<String>,
}

fn requested_variants(choice: VariantChoice) -> Vec<ChshVariant> {
    match choice {
        VariantChoice::All => ChshVariant::all().to_vec(),
        VariantChoice::One(v) => vec![ChshVariant::new(v).expect("flag parser bounds it")],
    }
}

fn evaluate_report(args: &EvaluateArgs) -> Result<EvaluateReport, Failure> {
    let (file, model) = load_model(&args.path)?;
    let uniform = model.settings_uniform(DEFAULT_TOL);
    let mut notes = vec![String::from(
        "h_X_bits is the total entropy of the message; the part that is about \
         the receiver setting is i_X_b_bits, which can be far smaller.",
    )];

    let resolved = if model.alice.is_explicit() {
        model.clone()
    } else {
        if !uniform {
            return Err(Failure::usage(
                "the receiver table is the `optimal` placeholder, which is only \
                 defined for uniform setting priors",
            ));
        }
        notes.push(String::from(
            "receiver table resolved to the optimal deterministic strategy per variant",
        ));
        optimal_alice(&model, ChshVariant::BASE)?.model
    };

    let joint = enumerate_joint(&resolved)?;
    let info = InfoReport::from_joint(&joint)?;
    let conditions = condition_profile(&model, args.tol)?;

    let chsh = if uniform {
        let mut reports = Vec::new();
        for variant in requested_variants(args.variant) {
            // A placeholder receiver is re-optimized for each variant; an
            // explicit one is scored as given.
            let report = if model.alice.is_explicit() {
                chsh_score(&joint, variant)?
            } else {
                optimal_alice(&model, variant)?.report
            };
            reports.push(report);
        }
        Some(reports)
    } else {
        notes.push(String::from(
            "setting priors are weighted: game scores are undefined, chsh fields are null",
        ));
        None
    };
    let chsh_score =
        chsh.as_ref().map(|r| r.iter().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max));

    Ok(EvaluateReport {
        model: model_label(&file, &args.path),
        tol: args.tol,
        chsh_score,
        chsh,
        info,
        conditions,
        notes,
    })
}

fn csv_field(value: f64) -> String {
    format!("{value}")
}

fn evaluate_csv(report: &EvaluateReport) -> String {
    let mut out = String::from("name,value,bound,verdict\n");
    let verdict = |above: bool| if above { "above-local" } else { "within-local" };
    if let Some(reports) = &report.chsh {
        for c in reports {
            let _ = writeln!(
                out,
                "chsh_v{},{},0.75,{}",
                c.variant,
                csv_field(c.score),
                verdict(c.score > 0.75 + report.tol)
            );
        }
        let _ = writeln!(out, "ichsh_lhs,{},,", csv_field(reports[0].ichsh_lhs));
    }
    if let Some(max) = report.conditions.chsh_max {
        let _ = writeln!(out, "chsh_max,{},0.75,{}", csv_field(max), verdict(max > 0.75 + report.tol));
    }
    let ledger = |v: &hvc_core::conditions::ConditionValue| {
        if v.satisfied {
            "satisfied"
        } else {
            "unsatisfied"
        }
    };
    let c = &report.conditions;
    let rows = [
        ("j_lx_to_b", c.j_lx_to_b, 0.5),
        ("j_lx_to_B", c.j_lx_to_B, 0.5),
        ("j_l_to_b", c.j_l_to_b, 0.5),
        ("j_l_to_B", c.j_l_to_B, 0.5),
        ("delta_x_to_b", c.delta_x_to_b, 0.0),
        ("delta_x_to_B", c.delta_x_to_B, 0.0),
    ];
    for (name, value, bound) in rows {
        let _ = writeln!(out, "{name},{},{bound},{}", csv_field(value.value), ledger(&value));
    }
    let hold = |h: bool| if h { "holds" } else { "violated" };
    let _ = writeln!(out, "si_max_deviation,{},{},{}", csv_field(c.si.max_deviation), report.tol, hold(c.si.holds));
    let _ = writeln!(out, "oi_max_deviation,{},{},{}", csv_field(c.oi.max_deviation), report.tol, hold(c.oi.holds));
    let _ = writeln!(
        out,
        "freedom_j_lambda_to_ab,{},0.25,{}",
        csv_field(c.freedom.j_lambda_to_ab),
        hold(c.freedom.holds)
    );
    let info = [
        ("j_lx_to_BxorB", report.info.j_lx_to_BxorB),
        ("h_X_bits", report.info.h_X_bits),
        ("i_X_b_bits", report.info.i_X_b_bits),
        ("i_lambda_ab_bits", report.info.i_lambda_ab_bits),
        ("hmin_b_given_lx_bits", report.info.hmin_b_given_lx_bits),
        ("alice_dep_on_b_given_outcome", c.alice_dep_on_b_given_outcome),
    ];
    for (name, value) in info {
        let _ = writeln!(out, "{name},{},,", csv_field(value));
    }
    out
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let report = evaluate_report(args)?;
    match args.format {
        EvalFormat::Json => print!("{}\n", to_pretty(&report)),
        EvalFormat::Csv => print!("{}", evaluate_csv(&report)),
    }
    Ok(())
}

// -------------------------------------------------------------- conditions

const LEDGER_ROWS: [(&str, &str); 8] = [
    ("J(l,X -> b) = 1/2", "No"),
    ("J(l,X -> B) = 1/2", "No"),
    ("J(l -> b) = 1/2", "Yes ('freedom')"),
    ("J(l -> B) = 1/2", "Yes*"),
    ("D_l(X -> b) = 0", "No"),
    ("D_l(X -> B) = 0", "Yes*"),
    ("SI holds", "Yes**"),
    ("OI holds", "Yes**"),
];

fn conditions_table(label: &str, profile: &ConditionProfile) -> String {
    let c = profile;
    let values: [(f64, bool); 8] = [
        (c.j_lx_to_b.value, c.j_lx_to_b.satisfied),
        (c.j_lx_to_B.value, c.j_lx_to_B.satisfied),
        (c.j_l_to_b.value, c.j_l_to_b.satisfied),
        (c.j_l_to_B.value, c.j_l_to_B.satisfied),
        (c.delta_x_to_b.value, c.delta_x_to_b.satisfied),
        (c.delta_x_to_B.value, c.delta_x_to_B.satisfied),
        (c.si.max_deviation, c.si.holds),
        (c.oi.max_deviation, c.oi.holds),
    ];
    let mut out = String::new();
    let _ = writeln!(out, "condition ledger: {label} (tol {})", c.tol);
    let _ = writeln!(out, "  #  {:<20} {:>12}  {:<9}  violation possible?", "condition", "value", "satisfied");
    for (i, ((name, expectation), (value, satisfied))) in LEDGER_ROWS.iter().zip(values).enumerate() {
        let _ = writeln!(
            out,
            "  {}  {:<20} {:>12.9}  {:<9}  {}",
            i + 1,
            name,
            value,
            if satisfied { "yes" } else { "no" },
            expectation
        );
    }
    let _ = writeln!(out, "  *  rows 4 and 6: a model above the local bound can satisfy either one, never both");
    let _ = writeln!(out, "  ** rows 7 and 8: likewise, one or the other, never both");
    let _ = writeln!(
        out,
        "  freedom of choice: {} (I(l:a,b) = {:.9} bits, J(l -> a,b) = {:.9})",
        if c.freedom.holds { "holds" } else { "violated" },
        c.freedom.i_lambda_ab_bits,
        c.freedom.j_lambda_to_ab
    );
    match c.chsh_max {
        Some(max) => {
            let _ = writeln!(
                out,
                "  chsh_max (optimal receiver, best of 8 variants): {:.9} (variant {})",
                max,
                c.chsh_max_variant.unwrap_or(0)
            );
        }
        None => {
            let _ = writeln!(out, "  chsh_max: undefined (weighted setting priors)");
        }
    }
    let _ = writeln!(
        out,
        "  b-dependence of P(A|a,b,B,l), no ledger verdict: {:.9}",
        c.alice_dep_on_b_given_outcome
    );
    out
}

fn cmd_conditions(args: &ConditionsArgs) -> Result<(), Failure> {
    let (file, model) = load_model(&args.path)?;
    let profile = condition_profile(&model, args.tol)?;
    match args.format {
        CondFormat::Table => print!("{}", conditions_table(&model_label(&file, &args.path), &profile)),
        CondFormat::Json => print!("{}\n", to_pretty(&profile)),
    }
    Ok(())
}

// ---------------------------------------------------------------------- tb

#[derive(Serialize)]
struct TbCorrelatorOut {
    mode: &'static str,
    angle_deg: f64,
    /// The exact target at this angle, -cos(theta).
    singlet_correlator: f64,
    estimate: TbEstimate,
    three_sigma: [f64; 2],
}

#[derive(Serialize)]
struct TbChshOut {
    mode: &'static str,
    tsirelson_score: f64,
    estimate: TbChshEstimate,
    three_sigma: [f64; 2],
}

#[derive(Serialize)]
struct TbEntropyOut {
    mode: &'static str,
    method: &'static str,
    seed: Option<u64>,
    estimate: EntropyEstimate,
}

#[derive(serde::Deserialize)]
struct SettingsFile {
    alice: [[f64; 3]; 2],
    bob: [[f64; 3]; 2],
}

fn cmd_tb(args: &TbArgs) -> Result<(), Failure> {
    if !args.entropy && args.rounds < MIN_CHSH_ROUNDS {
        return Err(Error::EmptySample { got: args.rounds, need: MIN_CHSH_ROUNDS }.into());
    }
    if let Some(deg) = args.angle_deg {
        let rad = deg.to_radians();
        let cfg = TbConfig {
            a: [0.0, 0.0, 1.0],
            b: [rad.sin(), 0.0, rad.cos()],
            rounds: args.rounds,
            seed: args.seed,
            chunks: args.chunks,
        };
        let estimate = tb_correlator(&cfg)?;
        let out = TbCorrelatorOut {
            mode: "correlator",
            angle_deg: deg,
            singlet_correlator: -rad.cos(),
            three_sigma: [
                estimate.correlator - 3.0 * estimate.stderr,
                estimate.correlator + 3.0 * estimate.stderr,
            ],
            estimate,
        };
        print!("{}\n", to_pretty(&out));
        return Ok(());
    }
    if let Some(spec_path) = &args.settings {
        let settings = if spec_path == "coplanar" {
            TbChshSettings::coplanar_default()
        } else {
            let text = read_input(spec_path)?;
            let parsed: SettingsFile = serde_json::from_str(&text)
                .map_err(|e| Failure { code: 2, message: format!("{spec_path}: {e}") })?;
            TbChshSettings { alice: parsed.alice, bob: parsed.bob }
        };
        let estimate = tb_chsh(&settings, args.rounds, args.seed, args.chunks)?;
        let out = TbChshOut {
            mode: "chsh",
            tsirelson_score: TSIRELSON_SCORE,
            three_sigma: [estimate.score - 3.0 * estimate.stderr, estimate.score + 3.0 * estimate.stderr],
            estimate,
        };
        print!("{}\n", to_pretty(&out));
        return Ok(());
    }
    // --entropy (the arg group guarantees exactly one mode).
    let (method, name, seed) = match args.method {
        EntropyFlag::Quadrature => (EntropyMethod::Quadrature, "quadrature", None),
        EntropyFlag::MonteCarlo => {
            (EntropyMethod::MonteCarlo { seed: args.seed }, "monte-carlo", Some(args.seed))
        }
    };
    let resolution = args.resolution.unwrap_or(match args.method {
        EntropyFlag::Quadrature => DEFAULT_QUADRATURE_NODES,
        EntropyFlag::MonteCarlo => 1_000_000,
    });
    let estimate = tb_message_entropy(method, resolution)?;
    let out = TbEntropyOut { mode: "entropy", method: name, seed, estimate };
    print!("{}\n", to_pretty(&out));
    Ok(())
}

// ------------------------------------------------------------------ search

fn cmd_search(args: &SearchArgs) -> Result<(), Failure> {
    let constraint = Constraint::parse(&args.constraint.replace('_', "-"))?;
    let config = SearchConfig {
        lambda_card: args.lambda_card,
        message_card: args.message_card,
        constraint,
        restarts: args.restarts,
        steps_per_restart: args.steps,
        step_size: args.step_size,
        seed: args.seed,
    };
    let result = hill_climb(&config)?;
    print!("{}\n", to_pretty(&result));
    Ok(())
}

// --------------------------------------------------------------------- zoo

fn cmd_zoo(command: &ZooCommand) -> Result<(), Failure> {
    match command {
        ZooCommand::List => {
            for (name, summary) in zoo_list() {
                println!("{name:<18} {summary}");
            }
            Ok(())
        }
        ZooCommand::Export { name, path } => {
            let entry = zoo_get(name)?;
            let meta = Meta {
                name: Some(entry.name.to_string()),
                notes: Some(entry.summary.to_string()),
            };
            let file = ModelFile::from_model(&entry.model, Some(meta));
            let text = render_model_file(&file);
            if path == "-" {
                print!("{text}");
            } else {
                std::fs::write(path, text)
                    .map_err(|e| Failure { code: 2, message: format!("{path}: {e}") })?;
            }
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}
