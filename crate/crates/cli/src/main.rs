//! `glz-embed`: classify Sobolev embeddings of GLZ spaces and verify the
//! underlying norm asymptotics numerically.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use glz_embed::oracle::{classify, EmbeddingQuery, Table};
use glz_embed::space::SHORTHAND_GRAMMAR;
use glz_embed::sweep::{comparison_sweep, table_sweep, uncovered_rows};
use glz_embed::verify::{
    seed_from_env, verify_duality, verify_fundamental, verify_head_lemma, verify_tail_lemma, verify_theta_rho,
    VerificationReport, VerifyConfig,
};
use glz_embed::{
    glz_norm_numeric, parse_q, Error, ExtendedRational, PsiParams, QuadratureConfig, SpaceDescriptor, StepFunction,
};

#[derive(Parser)]
#[command(name = "glz-embed", version, about = "Optimal targets of W^m X for GLZ spaces X, with numeric verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal r.i., Hölder, Morrey and Campanato targets of W^m X.
    Classify {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Shorthand such as "L(2,2;0,0)" or "L*(1,2;0,0)", or a JSON descriptor.
        #[arg(long)]
        space: String,
    },
    /// Numeric norm of a step function read from a JSON file.
    Norm {
        #[arg(long)]
        space: String,
        /// JSON object with `breakpoints` (0 = b0 < … < bk = 1) and `values`.
        #[arg(long)]
        function: PathBuf,
    },
    /// Compare numeric norms with their symbolic asymptotics.
    Verify {
        #[command(subcommand)]
        check: Check,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check every table row against its derivation.
    Sweep {
        #[arg(long, value_enum, default_value_t = Suite::Full)]
        suite: Suite,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Ratios must lie in [1/band, band].
    #[arg(long, global = true, default_value_t = 10.0)]
    band: f64,
    #[arg(long, global = true, default_value_t = 8)]
    kmin: u32,
    #[arg(long, global = true, default_value_t = 36)]
    kmax: u32,
    /// Write the grid values as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PsiArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long)]
    q: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, value_enum, default_value_t = Side::Head)]
    side: Side,
}

#[derive(Subcommand)]
enum Check {
    /// Head or tail L^{q'} norm of s^{λ−1/q'} ℓ^{−α} ℓℓ^{−β}.
    #[command(name = "lemma51")]
    HeadTail(PsiArgs),
    /// Same with an extra ℓℓℓ^{−1} and α = β = 1/q'; λ = 0 for the head, λ < 0 for the tail.
    #[command(name = "lemma52")]
    ThreeLog {
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        lambda: String,
        #[arg(long, value_enum, default_value_t = Side::Head)]
        side: Side,
    },
    /// Associate-space norms of the two kernels behind the modulus of continuity.
    ThetaRho {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        space: String,
    },
    /// Hölder inequality between a space and its associate on random step functions.
    Duality {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest admissible empirical constant.
        #[arg(long, default_value_t = 10.0)]
        bound: f64,
        /// Defaults to GLZ_EMBED_SEED, else 0x5EED.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// φ_X(r)·φ_X'(r) against r.
    Fundamental {
        #[arg(long)]
        space: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Head,
    Tail,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Full,
    Holder,
    Morrey,
    Campanato,
}

impl Suite {
    fn includes(self, t: Table) -> bool {
        use Table::*;
        match self {
            Suite::Full => true,
            Suite::Holder => matches!(t, Continuity | HolderFirst | HolderMiddle | HolderTop | HolderDoubleStar),
            Suite::Morrey => matches!(t, MorreyStar | MorreyDoubleStar),
            Suite::Campanato => {
                matches!(
                    t,
                    CampanatoFirst
                        | CampanatoMiddle
                        | CampanatoTop
                        | CampanatoDoubleStarFirst
                        | CampanatoDoubleStarRest
                )
            }
        }
    }
}

/// Failures mapped to exit codes.
enum Failure {
    Usage(String),
    Verification,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn usage(e: Error) -> Failure {
    match e {
        Error::Parse(msg) if !msg.contains(SHORTHAND_GRAMMAR) => Failure::Usage(format!("{msg}; {SHORTHAND_GRAMMAR}")),
        other => Failure::Usage(other.to_string()),
    }
}

fn parse_space(s: &str) -> Result<SpaceDescriptor, Failure> {
    let d: SpaceDescriptor = s.parse().map_err(usage)?;
    glz_embed::canonical(&d).map_err(usage)
}

fn parse_query(m: u32, n: u32, s: &str) -> Result<EmbeddingQuery, Failure> {
    EmbeddingQuery::new(m, n, parse_space(s)?).map_err(usage)
}

fn rational(name: &str, s: &str) -> Result<glz_embed::Q, Failure> {
    parse_q(s).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn exponent(s: &str) -> Result<ExtendedRational, Failure> {
    s.parse().map_err(|e| Failure::Usage(format!("--q: {e}")))
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).context("serializing output")?;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn finish_reports(reports: &[VerificationReport], csv: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = csv {
        let body: String = reports.iter().map(|r| r.to_csv()).collect::<Vec<_>>().join("\n");
        write_file(path, &body)?;
    }
    print_json(&reports)?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_verify(check: Check, grid: GridArgs) -> Result<(), Failure> {
    let cfg =
        VerifyConfig { band: grid.band, kmin: grid.kmin, kmax: grid.kmax, quadrature: QuadratureConfig::default() };
    if !(cfg.band >= 1.0) || cfg.kmin < 2 || cfg.kmin > cfg.kmax {
        return Err(Failure::Usage("need --band >= 1 and 2 <= --kmin <= --kmax".into()));
    }
    let csv = grid.csv.as_deref();
    let side_report = |p: &PsiParams, side: Side| match side {
        Side::Head => verify_head_lemma(p, &cfg),
        Side::Tail => verify_tail_lemma(p, &cfg),
    };
    match check {
        Check::HeadTail(a) => {
            let p = PsiParams::new(
                rational("lambda", &a.lambda)?,
                exponent(&a.q)?,
                rational("alpha", &a.alpha)?,
                rational("beta", &a.beta)?,
            );
            finish_reports(&[side_report(&p, a.side)], csv)
        }
        Check::ThreeLog { q, lambda, side } => {
            let q = exponent(&q)?;
            if q.is_infinite() {
                return Err(Failure::Usage("--q must be finite".into()));
            }
            let a = q.conjugate().recip();
            let p = PsiParams::new(rational("lambda", &lambda)?, q, a, a).with_gamma(1.into());
            finish_reports(&[side_report(&p, side)], csv)
        }
        Check::ThetaRho { m, n, space } => {
            let q = parse_query(m, n, &space)?;
            finish_reports(&verify_theta_rho(&q, &cfg).map_err(usage)?, csv)
        }
        Check::Duality { space, trials, bound, seed } => {
            let d = parse_space(&space)?;
            let rep = verify_duality(&d, trials, bound, seed.unwrap_or_else(seed_from_env), &cfg.quadrature)
                .map_err(usage)?;
            print_json(&rep)?;
            if rep.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Check::Fundamental { space } => {
            let rep = verify_fundamental(&parse_space(&space)?, &cfg).map_err(usage)?;
            finish_reports(&[rep], csv)
        }
    }
}

fn run_sweep(suite: Suite, json_out: Option<&Path>) -> Result<(), Failure> {
    let entries: Vec<_> = table_sweep(usize::MAX)
        .map_err(|e| Failure::Other(e.into()))?
        .into_iter()
        .filter(|e| suite.includes(e.table))
        .collect();
    let uncovered: Vec<_> = uncovered_rows(&entries, 1).into_iter().filter(|(t, _)| suite.includes(*t)).collect();
    let disagreements = entries.iter().filter(|e| !e.agrees).count();
    let mut summary = json!({
        "suite": suite.to_possible_value().map(|v| v.get_name().to_string()),
        "tuples": entries.len(),
        "disagreements": disagreements,
        "uncovered_rows": uncovered.iter().map(|(t, k)| format!("{t}, row {k}")).collect::<Vec<_>>(),
    });
    let mut comparisons = vec![];
    if suite == Suite::Full {
        comparisons = comparison_sweep().map_err(|e| Failure::Other(e.into()))?;
        for kind in ["holder-campanato", "morrey-campanato"] {
            let of_kind = comparisons.iter().filter(|e| e.kind == kind);
            let (n, comparable, bad) = of_kind.fold((0, 0, 0), |(n, c, bad), e| {
                (n + 1, c + usize::from(e.comparable), bad + usize::from(e.mismatch()))
            });
            summary[kind] = json!({ "tuples": n, "with_both_forms": comparable, "list_vs_forms_mismatches": bad });
        }
    }
    if let Some(path) = json_out {
        let full = json!({ "summary": summary, "entries": entries, "comparisons": comparisons });
        write_file(path, &serde_json::to_string_pretty(&full).context("serializing sweep")?)?;
    }
    print_json(&summary)?;
    let mismatches = comparisons.iter().filter(|e| e.mismatch()).count();
    if disagreements == 0 && uncovered.is_empty() && mismatches == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { m, n, space } => print_json(&classify(&parse_query(m, n, &space)?)),
        Command::Norm { space, function } => {
            let d = parse_space(&space)?;
            let text = fs::read_to_string(&function).with_context(|| format!("reading {}", function.display()))?;
            let f: StepFunction =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", function.display())))?;
            let norm = glz_norm_numeric(&f, &d, &QuadratureConfig::default()).map_err(usage)?;
            print_json(&json!({ "space": d, "norm": norm }))
        }
        Command::Verify { check, grid } => run_verify(check, grid),
        Command::Sweep { suite, json } => run_sweep(suite, json.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
