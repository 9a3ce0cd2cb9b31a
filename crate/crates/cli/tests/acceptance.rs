//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qzv_cli::{run_check, CheckName, CheckReport, Params, Status};
use qzv_core::TMode;

struct Outcome {
    reports: Vec<CheckReport>,
    ok: bool,
    note: String,
}

fn params(r: Option<usize>, d: Option<i32>, n: Option<i32>, m: Option<i32>, w: Option<u32>) -> Params {
    Params { r, u_deg: d, q_ord: n, z_ord: m, max_weight: w, t: TMode::Symbolic, ..Params::default() }
}

fn checks(runs: &[(CheckName, Params)]) -> Outcome {
    let mut reports = Vec::new();
    for (name, p) in runs {
        match run_check(*name, p, 1) {
            Ok(r) => reports.extend(r),
            Err(e) => return Outcome { reports, ok: false, note: format!("{}: {e}", name.as_str()) },
        }
    }
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| {
            let why = r.witness_monomial.clone().or(r.error.clone()).unwrap_or_default();
            format!("{} {} ({why})", r.check, r.case)
        })
        .collect();
    let note = if bad.is_empty() { format!("{} cases", reports.len()) } else { bad.join("; ") };
    Outcome { ok: bad.is_empty(), reports, note }
}

fn line(id: usize, what: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> (bool, Vec<CheckReport>) {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= budget;
    let ok = out.ok && in_time;
    let late = if in_time { String::new() } else { format!(", over budget {budget:?}") };
    println!(
        "{} criterion {id:>2}: {what}: {}{late} [{:.2} s]",
        if ok { "PASS" } else { "FAIL" },
        out.note,
        took.as_secs_f64()
    );
    (ok, out.reports)
}

fn qzv(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qzv")).args(args).output().expect("qzv runs");
    (out.stdout, out.status.code())
}

fn determinism() -> Outcome {
    let base = ["check", "all", "--profile", "quick"];
    let (a, ca) = qzv(&base);
    let (b, cb) = qzv(&base);
    let (c, cc) = qzv(&[&base[..], &["--jobs", "1"]].concat());
    let (d, cd) = qzv(&[&base[..], &["--jobs", "4"]].concat());
    let (e, _) = qzv(&[&base[..], &["--jobs", "4", "--format", "json"]].concat());
    let (f, _) = qzv(&[&base[..], &["--jobs", "1", "--format", "json"]].concat());
    let codes = [ca, cb, cc, cd];
    let same = a == b && a == c && a == d && e == f;
    let ok = same && codes.iter().all(|c| *c == Some(0)) && !a.is_empty();
    let note = format!("identical reports: {same}, exit codes {codes:?}, {} bytes", a.len());
    Outcome { reports: Vec::new(), ok, note }
}

fn main() -> ExitCode {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut all = Vec::new();
    let mut results = Vec::new();
    macro_rules! record {
        ($e:expr) => {{
            let (ok, reps): (bool, Vec<CheckReport>) = $e;
            results.push(ok);
            all.extend(reps);
        }};
    }

    record!(line(1, "closed form of the r=1 generating function (D=5, N=10, t symbolic)", min(2), || {
        checks(&[(CheckName::Main, params(Some(1), Some(5), Some(10), None, None))])
    }));
    record!(line(2, "closed form of the r=2 generating function (D=4, N=8, t symbolic)", min(5), || {
        checks(&[(CheckName::Main, params(Some(2), Some(4), Some(8), None, None))])
    }));
    record!(line(3, "one-height form against the general closed form (D=5, N=10)", min(1), || {
        checks(&[(CheckName::CorR1, params(Some(1), Some(5), Some(10), None, None))])
    }));
    record!(line(4, "weight-depth sum formula, 2<=k<=8, symbolic t, t=0 and t=1 (N=15)", min(2), || {
        checks(&[(CheckName::SumFormula, params(None, None, Some(15), None, Some(8)))])
    }));
    record!(line(5, "full-height generating function, k<=8 (N=12), with the log-product identity", min(2), || {
        checks(&[(CheckName::FullHeight, params(None, Some(6), Some(12), None, Some(8)))])
    }));
    record!(line(6, "t=0 closed form against the general form and enumeration, r=1,2 (D=4, N=8)", min(3), || {
        let runs: Vec<_> = (1..=2).map(|r| (CheckName::LiT0, params(Some(r), Some(4), Some(8), None, None))).collect();
        checks(&runs)
    }));
    record!(line(7, "closed-form level generating functions at z=q, r=1,2, all levels (D=4, N=8)", min(3), || {
        let runs: Vec<_> = (1..=2).map(|r| (CheckName::Phi, params(Some(r), Some(4), Some(8), None, None))).collect();
        checks(&runs)
    }));
    record!(line(8, "polylogarithm at z=q as a binomial sum, weight<=6 (N=12)", min(1), || {
        checks(&[(CheckName::Lemma1, params(None, None, Some(12), None, Some(6)))])
    }));
    record!(line(9, "q-difference system (M=8, N=8)", min(2), || {
        checks(&[(CheckName::DiffSystem, params(None, None, Some(8), Some(8), Some(5)))])
    }));
    record!(line(10, "2φ1 summation and 3φ2 transformation instances (N=20)", Duration::from_secs(10), || {
        checks(&[
            (CheckName::Heine, params(None, None, Some(20), None, None)),
            (CheckName::Ktw, params(None, None, Some(20), None, None)),
        ])
    }));
    let earlier = all.clone();
    record!(line(11, "no structural assertion fires; c routes agree; change of variables round-trips", min(2), || {
        let fired: Vec<String> = earlier
            .iter()
            .filter(|r| r.status == Status::Error)
            .map(|r| format!("{} {}: {}", r.check, r.case, r.error.clone().unwrap_or_default()))
            .collect();
        let mut out = checks(&[
            (CheckName::CConst, params(None, Some(4), Some(8), None, None)),
            (CheckName::RoundtripXu, params(None, Some(4), Some(8), None, None)),
        ]);
        if !fired.is_empty() {
            out.ok = false;
            out.note = format!("{} errors in earlier suites: {}", fired.len(), fired.join("; "));
        } else {
            out.note = format!("{} earlier cases clean, {}", earlier.len(), out.note);
        }
        out
    }));
    record!(line(
        12,
        "`qzv check all --profile quick` is byte-identical across runs and worker counts",
        min(5),
        determinism
    ));

    if results.iter().all(|&ok| ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
