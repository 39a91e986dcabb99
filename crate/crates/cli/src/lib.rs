//! Argument parsing, output formatting and exit codes for the `gridforge` binary.
//!
//! Exit codes: 0 success, 1 mathematical negative (duality not preserved, an
//! identity that fails), 2 usage or configuration error, 3 internal validation
//! failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use gridforge_core::basis::{build_basis, build_grid, duality_residual, required_prec, CanonicalBasis};
use gridforge_core::leveldata::{self, Space};
use gridforge_core::seedsynth::synthesize_report;
use gridforge_core::selftest;
use gridforge_core::traceops::{
    classify, genfun_check, genfun_level4_closed_form, obstructions, trace, Classification,
    GenfunSide,
};
use gridforge_core::{Error, QSeries};

pub const DEFAULT_PREC: i64 = 60;
pub const MIN_PREC: i64 = 10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "gridforge", version, about = "Canonical bases, modular grids and traces for genus-zero Gamma0(N)")]
pub struct Cli {
    /// Series are computed modulo q^PREC
    #[arg(long, global = true, env = "GRIDFORGE_PREC", default_value_t = DEFAULT_PREC)]
    pub prec: i64,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    /// Shorthand for --format json
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,

    /// Shorthand for --format text
    #[arg(long, global = true)]
    pub text: bool,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct LevelWeight {
    #[arg(long)]
    pub level: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub weight: i64,
}

#[derive(Args, Debug, Clone)]
pub struct Pair {
    #[arg(long)]
    pub from: u32,
    #[arg(long)]
    pub to: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub weight: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    /// weight k, variable z
    K,
    /// weight 2-k, variable tau
    Dual,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// First COUNT canonical basis elements of M_k^(inf)(N) or its cusp-vanishing subspace
    Basis {
        #[command(flatten)]
        lw: LevelWeight,
        #[arg(long, default_value = "inf")]
        space: Space,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Weight-k and weight-(2-k) bases side by side
    Grid {
        #[command(flatten)]
        lw: LevelWeight,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Report max |a_k(m,n) + b_{2-k}(n,m)| over the COUNT x COUNT box
        #[arg(long)]
        check_duality: bool,
    },
    /// Synthesized first basis element with the generating-family audit
    Seed {
        #[command(flatten)]
        lw: LevelWeight,
    },
    /// Trace of one basis element down to a divisor level
    Trace {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "inf")]
        space: Space,
        #[arg(long, allow_negative_numbers = true)]
        index: i64,
    },
    /// Whether the trace preserves grid duality (exit 1 if not)
    Classify {
        #[command(flatten)]
        pair: Pair,
    },
    /// Product terms separating the traced generating function from the lower-level one
    Obstructions {
        #[command(flatten)]
        pair: Pair,
    },
    /// Verify the traced generating-function identity on a truncated box (exit 1 on failure)
    GenfunCheck {
        #[command(flatten)]
        pair: Pair,
        /// Box size P
        #[arg(long, default_value_t = 15)]
        terms: i64,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
    },
    /// Verify the level-4 quotient formula for the generating function (exit 1 on failure)
    Level4Genfun {
        #[arg(long, allow_negative_numbers = true)]
        weight: i64,
        #[arg(long, default_value_t = 12)]
        terms: i64,
    },
    /// Dump the level registry
    Registry,
    /// Run the acceptance checks
    Selftest {
        /// Run only this criterion
        #[arg(long)]
        criterion: Option<u8>,
    },
}

/// Command failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::NotGenusZero(_)
            | Error::OddWeight(_)
            | Error::NotDivisor { .. }
            | Error::InsufficientPrecision { .. }
            | Error::OutOfRange(_)
            | Error::Invalid(_)
            | Error::UnsupportedWeight(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Rendered output plus the exit code it should produce.
pub struct Output {
    pub body: String,
    pub code: i32,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: EXIT_OK }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn series_json(s: &QSeries) -> Value {
    serde_json::to_value(s).expect("series serialize")
}

fn basis_json(b: &CanonicalBasis) -> Value {
    json!({
        "N": b.level,
        "k": b.weight,
        "space": b.space,
        "prec": b.prec,
        "elements": b.indices().zip(&b.elements).map(|(m, e)| json!({
            "N": b.level, "k": b.weight, "space": b.space, "m": m, "series": series_json(e),
        })).collect::<Vec<_>>(),
    })
}

fn basis_text(b: &CanonicalBasis, name: &str) -> String {
    let mut out = String::new();
    for (m, e) in b.indices().zip(&b.elements) {
        let _ = writeln!(out, "{name}_{{{},{m}}} = {e}", b.weight);
    }
    out
}

fn check_level(n: u32) -> Result<(), Failure> {
    leveldata::get_level(n).map(|_| ()).map_err(Failure::from)
}

fn check_weight(k: i64) -> Result<(), Failure> {
    if k % 2 != 0 {
        return Err(Error::OddWeight(k).into());
    }
    Ok(())
}

fn execute(cli: &Cli, format: Format) -> Result<Output, Failure> {
    let prec = cli.prec;
    let json_out = format == Format::Json;
    match &cli.command {
        Command::Basis { lw, space, count } => {
            check_level(lw.level)?;
            check_weight(lw.weight)?;
            let need = required_prec(lw.level, lw.weight, *space, *count)?;
            if prec < need {
                return Err(usage(format!("--prec {prec} too small for {count} elements; need at least {need}")));
            }
            let b = build_basis(lw.level, lw.weight, *space, *count, prec)?;
            let name = if *space == Space::Inf { "f" } else { "g" };
            Ok(Output::ok(if json_out { pretty(&basis_json(&b)) } else { basis_text(&b, name) }))
        }
        Command::Grid { lw, count, check_duality } => {
            check_level(lw.level)?;
            check_weight(lw.weight)?;
            let g = build_grid(lw.level, lw.weight, *count, prec)?;
            let residual = if *check_duality {
                Some(duality_residual(&g, *count, *count)?)
            } else {
                None
            };
            let code = match &residual {
                Some(r) if !r.residual.is_zero() => EXIT_NEGATIVE,
                _ => EXIT_OK,
            };
            let body = if json_out {
                let mut v = json!({"N": g.level, "fside": basis_json(&g.fside), "gside": basis_json(&g.gside)});
                if let Some(r) = &residual {
                    v["duality"] = json!({"residual": r.residual.to_string(), "witness": r.witness});
                }
                pretty(&v)
            } else {
                let mut s = basis_text(&g.fside, "f") + &basis_text(&g.gside, "g");
                if let Some(r) = &residual {
                    let _ = writeln!(s, "duality residual on {count}x{count} box: {}", r.residual);
                    if let Some((m, n)) = r.witness {
                        let _ = writeln!(s, "largest violation at a(m={m}, n={n})");
                    }
                }
                s
            };
            Ok(Output { body, code })
        }
        Command::Seed { lw } => {
            check_level(lw.level)?;
            check_weight(lw.weight)?;
            let r = synthesize_report(lw.level, lw.weight, prec)?;
            let body = if json_out {
                pretty(&serde_json::to_value(&r).expect("report serializes"))
            } else {
                let mut s = format!("F_{} = {}\n", r.weight, r.seed);
                let _ = writeln!(
                    s,
                    "family: {} members, pole bound {}, rank {}",
                    r.family.len(),
                    r.pole_bound,
                    r.rank
                );
                s
            };
            Ok(Output::ok(body))
        }
        Command::Trace { pair, space, index } => {
            check_weight(pair.weight)?;
            let r = trace(pair.from, pair.to, pair.weight, *space, *index, prec)?;
            let body = if json_out {
                pretty(&serde_json::to_value(&r).expect("report serializes"))
            } else {
                let name = if *space == Space::Inf { "f" } else { "g" };
                let lhs = format!("tr^{}_{}({name}_{{{},{}}})", pair.from, pair.to, pair.weight, index);
                match &r.expansion {
                    Some(e) => {
                        let comb: Vec<String> = r
                            .combination
                            .iter()
                            .map(|(i, c)| format!("{c}*{name}^({})_{{{},{i}}}", pair.to, pair.weight))
                            .collect();
                        let comb = if comb.is_empty() { "0".to_string() } else { comb.join(" + ") };
                        format!("{lhs} = {comb}\n  = {e}\n")
                    }
                    None => format!("{lhs}: {}\n", r.reason.clone().unwrap_or_default()),
                }
            };
            let code = if r.applicable { EXIT_OK } else { EXIT_NEGATIVE };
            Ok(Output { body, code })
        }
        Command::Classify { pair } => {
            check_weight(pair.weight)?;
            let c = classify(pair.from, pair.to, pair.weight)?;
            let code = if c.is_preserved() { EXIT_OK } else { EXIT_NEGATIVE };
            let body = if json_out {
                pretty(&json!({"from": pair.from, "to": pair.to, "weight": pair.weight, "classification": c}))
            } else {
                match &c {
                    Classification::Preserved => "Preserved\n".to_string(),
                    Classification::NotPreserved(cases) => {
                        let names: Vec<String> = cases.iter().map(|c| format!("{c:?}")).collect();
                        format!("NotPreserved ({})\n", names.join(", "))
                    }
                }
            };
            Ok(Output { body, code })
        }
        Command::Obstructions { pair } => {
            check_weight(pair.weight)?;
            let o = obstructions(pair.from, pair.to, pair.weight)?;
            let body = if json_out {
                pretty(&serde_json::to_value(&o).expect("list serializes"))
            } else if o.pairs.is_empty() {
                "none\n".to_string()
            } else {
                let mut s = String::new();
                for p in &o.pairs {
                    let sign = if p.sign < 0 { "-" } else { "+" };
                    let _ = writeln!(
                        s,
                        "{sign} f^({})_{{{},{}}}(z) g^({})_{{{},{}}}(tau)",
                        p.f.level, p.f.weight, p.f.index, p.g.level, p.g.weight, p.g.index
                    );
                }
                s
            };
            Ok(Output::ok(body))
        }
        Command::GenfunCheck { pair, terms, side } => {
            check_weight(pair.weight)?;
            let sides: Vec<GenfunSide> = match side {
                SideArg::K => vec![GenfunSide::WeightK],
                SideArg::Dual => vec![GenfunSide::WeightDual],
                SideArg::Both => vec![GenfunSide::WeightK, GenfunSide::WeightDual],
            };
            let mut reports = Vec::new();
            for s in sides {
                reports.push(genfun_check(pair.from, pair.to, pair.weight, *terms, s)?);
            }
            let holds = reports.iter().all(|r| r.holds);
            let body = if json_out {
                pretty(&json!({"from": pair.from, "to": pair.to, "weight": pair.weight, "holds": holds, "sides": reports}))
            } else {
                let mut s = String::new();
                for r in &reports {
                    let verdict = if r.holds { "holds".to_string() } else { format!("fails at outer exponent {:?}", r.witness) };
                    let _ = writeln!(s, "{:?}: {verdict} (outer {}..={}, inner below q^{})", r.side, r.outer.0, r.outer.1, r.prec);
                }
                s
            };
            Ok(Output { body, code: if holds { EXIT_OK } else { EXIT_NEGATIVE } })
        }
        Command::Level4Genfun { weight, terms } => {
            check_weight(*weight)?;
            let holds = genfun_level4_closed_form(*weight, *terms)?;
            let body = if json_out {
                pretty(&json!({"weight": weight, "terms": terms, "holds": holds}))
            } else {
                format!("{}\n", if holds { "holds" } else { "fails" })
            };
            Ok(Output { body, code: if holds { EXIT_OK } else { EXIT_NEGATIVE } })
        }
        Command::Registry => Ok(Output::ok(if json_out { registry_dump() } else { registry_text() })),
        Command::Selftest { criterion } => {
            let results = match criterion {
                Some(id) if (1..=9).contains(id) => vec![selftest::run_criterion(*id)],
                Some(id) => return Err(usage(format!("no criterion {id}; choose 1 to 9"))),
                None => selftest::run_all(),
            };
            let passed = results.iter().all(|r| r.passed);
            let body = if json_out {
                pretty(&serde_json::to_value(&results).expect("results serialize"))
            } else {
                results.iter().map(|r| format!("{r}\n")).collect()
            };
            Ok(Output { body, code: if passed { EXIT_OK } else { EXIT_INTERNAL } })
        }
    }
}

/// The registry as pretty JSON.
pub fn registry_dump() -> String {
    pretty(&leveldata::registry_json())
}

fn registry_text() -> String {
    let mut s = String::new();
    for l in leveldata::all_levels() {
        let _ = writeln!(
            s,
            "N={} cusps={} psi={} cusp_poly={}",
            l.level,
            l.cusp_count,
            l.hauptmodul.describe(),
            l.cusp_poly_string()
        );
        for f in &l.flags {
            let _ = writeln!(s, "  [{}] {}", f.kind, f.detail);
        }
    }
    for f in &leveldata::GLOBAL_FLAGS {
        let _ = writeln!(s, "[{}] {}", f.kind, f.detail);
    }
    s
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    if cli.prec < MIN_PREC {
        eprintln!("error: --prec must be at least {MIN_PREC}, got {}", cli.prec);
        return EXIT_USAGE;
    }
    let format = if cli.json {
        Format::Json
    } else if cli.text {
        Format::Text
    } else {
        cli.format
    };
    let out = match execute(&cli, format) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.body),
        None => std::io::stdout().write_all(out.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    out.code
}
