use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qzv_cli::value::{compute, parse_admissible, render_value, ValueKind};
use qzv_cli::{plan, render, run_cases, CheckName, Format, Params, Profile, Summary};
use qzv_core::{Error, Rational, TMode};

#[derive(Parser)]
#[command(name = "qzv", version, about = "Exact checks and values for interpolated q-multiple zeta values")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named identity check (or `all`).
    Check(CheckArgs),
    /// Print a truncated value as term lines.
    Value(ValueArgs),
}

fn parse_t(s: &str) -> Result<TMode, String> {
    if s == "symbolic" {
        return Ok(TMode::Symbolic);
    }
    s.parse::<Rational>().map(TMode::Value).map_err(|e| format!("expected `symbolic` or a rational: {e}"))
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    name: CheckName,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    u_deg: Option<i32>,
    #[arg(long)]
    q_ord: Option<i32>,
    #[arg(long)]
    z_ord: Option<i32>,
    #[arg(long, default_value = "symbolic", value_parser = parse_t)]
    t: TMode,
    #[arg(long)]
    max_weight: Option<u32>,
    #[arg(long, value_enum, default_value_t = Profile::Quick)]
    profile: Profile,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Append wall-clock times (reports are then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ValueArgs {
    #[arg(long, group = "kind")]
    zeta_t: bool,
    #[arg(long, group = "kind")]
    zeta: bool,
    #[arg(long, group = "kind")]
    zeta_star: bool,
    #[arg(long, group = "kind")]
    li_t_at_q: bool,
    /// Comma-separated index, e.g. `2,1`.
    #[arg(long)]
    index: String,
    #[arg(long, default_value_t = 10)]
    q_ord: i32,
    #[arg(long, default_value = "symbolic", value_parser = parse_t)]
    t: TMode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn usage(e: &Error) -> ExitCode {
    let msg = match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    };
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
}

fn check(a: CheckArgs) -> ExitCode {
    let params = Params {
        profile: a.profile,
        r: a.r,
        u_deg: a.u_deg,
        q_ord: a.q_ord,
        z_ord: a.z_ord,
        t: a.t,
        max_weight: a.max_weight,
    };
    let cases = match plan(a.name, &params) {
        Ok(c) => c,
        Err(e) => return usage(&e),
    };
    let reports = match run_cases(&cases, a.jobs.max(1), a.timings) {
        Ok(r) => r,
        Err(e) => return usage(&e),
    };
    if let Some(bad) = reports.iter().find(|r| r.error_kind.as_deref() == Some("config")) {
        eprintln!("error: {}", bad.error.as_deref().unwrap_or("configuration error"));
        return ExitCode::from(2);
    }
    emit(&render(&reports, a.format));
    if Summary::of(&reports).all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn value(a: ValueArgs) -> ExitCode {
    let kind = if a.zeta {
        ValueKind::Zeta
    } else if a.zeta_star {
        ValueKind::ZetaStar
    } else if a.li_t_at_q {
        ValueKind::LiTAtQ
    } else {
        ValueKind::ZetaT
    };
    let idx = match parse_admissible(&a.index) {
        Ok(i) => i,
        Err(e) => return usage(&e),
    };
    if a.q_ord < 0 {
        return usage(&Error::Config("q-ord must be ≥ 0".into()));
    }
    match compute(kind, &idx, a.q_ord, &a.t) {
        Ok(s) => {
            emit(&render_value(kind, &idx, a.q_ord, &a.t, &s, a.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check(a) => check(a),
        Cmd::Value(a) => value(a),
    }
}
