//! Command-line front end: compute weight-set predictors for a parameter
//! given as JSON, run exhaustive property scans, construct digit witnesses,
//! and verify the example corpus.
//!
//! Exit codes: `0` pass, `1` property violation, `2` input error,
//! `3` unsupported request.

mod scans;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use tame_weights::context::Context;
use tame_weights::digit_witness::{self, WitnessError};
use tame_weights::jordan_holder::JhError;
use tame_weights::tame_types::TameType;
use tame_weights::weight_sets::{
    self, Genericity, PredictorReport, WeightSet,
};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

/// A failure with an associated process exit code.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    pub fn unsupported(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_UNSUPPORTED, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_VIOLATION, message: message.into() }
    }

    pub fn from_jh(err: JhError) -> Failure {
        match err {
            JhError::Unsupported { .. } => Failure::unsupported(err.to_string()),
            other => Failure::input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "tame-weights",
    version,
    about = "Serre-weight sets of tame inertial parameters: predictors, scans, witnesses"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute weight-set predictors for a parameter given as JSON.
    Compute(ComputeArgs),
    /// Exhaustively verify a named property over all canonical parameters.
    Scan(scans::ScanArgs),
    /// Base-p digit utilities.
    Digits {
        #[command(subcommand)]
        cmd: DigitsCmd,
    },
    /// Run the frozen example corpus at a prime.
    VerifyCorpus(CorpusArgs),
}

#[derive(Subcommand)]
enum DigitsCmd {
    /// Construct and verify a digit witness for a residue class.
    Witness(WitnessArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetChoice {
    /// Obvious weights only.
    Obv,
    /// Obvious weights and their closure.
    Closure,
    /// Explicit predicted weights.
    Expl,
    /// The exact predicted set (three-dimensional, unramified over Q_p).
    Wq,
    /// The generic predicted set.
    WqGeneric,
    /// The cycle-based predicted set.
    Adp,
    /// Every applicable predictor plus shadow/obscure classification.
    All,
}

#[derive(Args)]
struct ComputeArgs {
    /// Parameter JSON file; reads standard input when omitted or `-`.
    type_file: Option<PathBuf>,
    /// Which predictor subset to compute.
    #[arg(long, value_enum, default_value_t = SetChoice::All)]
    set: SetChoice,
    /// Genericity threshold for the annotation (defaults to n).
    #[arg(long)]
    delta: Option<i64>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Niveau of the piece.
    #[arg(long)]
    d: u32,
    /// Residue degree of the base field.
    #[arg(long)]
    f: u32,
    /// The prime.
    #[arg(long)]
    p: u64,
    /// The exponent residue class (decimal).
    #[arg(long)]
    n: String,
}

#[derive(Args)]
struct CorpusArgs {
    /// The prime to verify at.
    #[arg(long)]
    p: u64,
    /// Write the full JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Scan(args) => scans::cmd_scan(args),
        Cmd::Digits { cmd: DigitsCmd::Witness(args) } => cmd_witness(args),
        Cmd::VerifyCorpus(args) => cmd_verify_corpus(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::input(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

/// Parses and canonicalizes a parameter from its JSON form.
fn parse_type(text: &str) -> Result<TameType, Failure> {
    let raw: TameType = serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("invalid parameter JSON: {e}")))?;
    let ctx = raw.ctx;
    Context::new(ctx.p, ctx.f, ctx.e, ctx.n)
        .map_err(|e| Failure::input(format!("invalid context: {e}")))?;
    let t = TameType::from_raw_pieces(
        ctx,
        raw.pieces.into_iter().map(|pc| (pc.niveau, pc.exponent)).collect(),
    );
    if t.dim() != ctx.n {
        return Err(Failure::input(format!(
            "piece niveaux sum to {} but the context has n = {}",
            t.dim(),
            ctx.n
        )));
    }
    Ok(t)
}

fn is_gl3_qp(ctx: Context) -> bool {
    (ctx.n, ctx.f, ctx.e) == (3, 1, 1)
}

fn cmd_compute(args: ComputeArgs) -> Result<(), Failure> {
    let text = read_input(args.type_file.as_ref())?;
    let t = parse_type(&text)?;
    let ctx = t.ctx;
    let delta = args.delta.unwrap_or(ctx.n as i64);

    let mut report = PredictorReport {
        parameter: t.clone(),
        w_obv: None,
        closure: None,
        w_expl: None,
        w_q: None,
        obscure: None,
        shadow: None,
        adp: None,
        genericity: Genericity {
            delta,
            is_generic: weight_sets::is_delta_generic(&t, delta),
        },
    };

    let obv = || weight_sets::w_obv(&t);
    match args.set {
        SetChoice::Obv => report.w_obv = Some(obv()),
        SetChoice::Closure => {
            let o = obv();
            report.closure = Some(weight_sets::closure_c(&o).map_err(Failure::from_jh)?);
            report.w_obv = Some(o);
        }
        SetChoice::Expl => {
            report.w_expl = Some(weight_sets::w_expl(&t).map_err(Failure::from_jh)?);
        }
        SetChoice::Wq => {
            if !is_gl3_qp(ctx) {
                return Err(Failure::unsupported(
                    "the exact predicted set requires n = 3, f = 1, e = 1",
                ));
            }
            report.w_q = Some(weight_sets::w_q_gl3(&t));
        }
        SetChoice::WqGeneric => {
            if ctx.e != 1 {
                return Err(Failure::unsupported(
                    "the generic predicted set requires e = 1",
                ));
            }
            report.w_q = Some(weight_sets::w_q_generic(&t));
        }
        SetChoice::Adp => {
            if (ctx.f, ctx.e) != (1, 1) {
                return Err(Failure::unsupported(
                    "the cycle-based predicted set requires f = 1, e = 1",
                ));
            }
            report.adp = Some(weight_sets::adp_weights(&t));
        }
        SetChoice::All => {
            let o = obv();
            let cl = weight_sets::closure_c(&o).map_err(Failure::from_jh)?;
            let expl = weight_sets::w_expl(&t).map_err(Failure::from_jh)?;
            report.obscure = Some(expl.difference(&cl));
            report.shadow = Some(cl.difference(&o));
            if is_gl3_qp(ctx) {
                report.w_q = Some(weight_sets::w_q_gl3(&t));
                report.adp = Some(weight_sets::adp_weights(&t));
            } else if ctx.e == 1 {
                report.w_q = Some(weight_sets::w_q_generic(&t));
            }
            report.w_obv = Some(o);
            report.closure = Some(cl);
            report.w_expl = Some(expl);
        }
    }

    println!("{}", to_json(&report)?);
    Ok(())
}

#[derive(Serialize)]
struct WitnessOutput {
    d: u32,
    f: u32,
    p: u64,
    exponent: String,
    x: Vec<i64>,
    chains: Vec<Vec<i64>>,
    verified: bool,
}

fn cmd_witness(args: WitnessArgs) -> Result<(), Failure> {
    let n: BigUint = args
        .n
        .parse()
        .map_err(|e| Failure::input(format!("invalid exponent `{}`: {e}", args.n)))?;
    if args.d == 0 || args.f == 0 || args.p < 2 {
        return Err(Failure::input("need d >= 1, f >= 1, p >= 2"));
    }
    let witness = digit_witness::construct(args.d, args.f, args.p, &n)
        .map_err(|e: WitnessError| Failure::unsupported(e.to_string()))?;
    let out = WitnessOutput {
        d: args.d,
        f: args.f,
        p: args.p,
        exponent: n.to_string(),
        x: witness.x.clone(),
        chains: witness.chains(),
        verified: digit_witness::verify(&witness, &n),
    };
    if !out.verified {
        return Err(Failure::violation("constructed witness failed verification"));
    }
    println!("{}", to_json(&out)?);
    Ok(())
}

fn cmd_verify_corpus(args: CorpusArgs) -> Result<(), Failure> {
    let reports = tame_weights::corpus::verify_corpus(args.p).map_err(Failure::from_jh)?;
    let json = to_json(&reports)?;
    match &args.out {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    for rep in &reports {
        eprintln!("{rep}");
    }
    if reports.iter().any(|r| !r.is_clean()) {
        return Err(Failure::violation("corpus verification found mismatches"));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Failure::input(format!("serialization failure: {e}")))
}

/// Serializes a weight set as a plain sorted list (used by scan reports).
pub fn weight_rows(set: &WeightSet) -> Vec<Vec<Vec<i64>>> {
    set.members.iter().map(|w| w.rows.clone()).collect()
}
