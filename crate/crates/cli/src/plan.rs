//! Named checks, truncation profiles and their expansion into cases.

use clap::ValueEnum;
use qzv_core::{Error, Result, TMode, TruncSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Main,
    CorR1,
    SumFormula,
    FullHeight,
    LiT0,
    Phi,
    Lemma1,
    DiffSystem,
    Heine,
    Ktw,
    CConst,
    RoundtripXu,
    Stirling,
    All,
}

impl CheckName {
    pub const EVERY: [CheckName; 13] = [
        CheckName::Main,
        CheckName::CorR1,
        CheckName::SumFormula,
        CheckName::FullHeight,
        CheckName::LiT0,
        CheckName::Phi,
        CheckName::Lemma1,
        CheckName::DiffSystem,
        CheckName::Heine,
        CheckName::Ktw,
        CheckName::CConst,
        CheckName::RoundtripXu,
        CheckName::Stirling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Main => "main",
            CheckName::CorR1 => "cor-r1",
            CheckName::SumFormula => "sum-formula",
            CheckName::FullHeight => "full-height",
            CheckName::LiT0 => "li-t0",
            CheckName::Phi => "phi",
            CheckName::Lemma1 => "lemma1",
            CheckName::DiffSystem => "diff-system",
            CheckName::Heine => "heine",
            CheckName::Ktw => "ktw",
            CheckName::CConst => "c-const",
            CheckName::RoundtripXu => "roundtrip-xu",
            CheckName::Stirling => "stirling",
            CheckName::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    #[default]
    Quick,
    Full,
}

/// User overrides on top of a profile. `None` means "profile default".
#[derive(Clone, Debug)]
pub struct Params {
    pub profile: Profile,
    pub r: Option<usize>,
    pub u_deg: Option<i32>,
    pub q_ord: Option<i32>,
    pub z_ord: Option<i32>,
    pub t: TMode,
    pub max_weight: Option<u32>,
}

impl Default for Params {
    fn default() -> Params {
        Params {
            profile: Profile::Quick,
            r: None,
            u_deg: None,
            q_ord: None,
            z_ord: None,
            t: TMode::Symbolic,
            max_weight: None,
        }
    }
}

/// What a single case computes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Main,
    OneHeight,
    SumFormula { k: u32 },
    FullHeight,
    LogProduct,
    LiT0,
    Phi { j: i32, at_q: bool },
    LiAtQ { weight: u32 },
    Polylog { weight: u32 },
    Clauses,
    OrderEquation,
    ThetaStirling { n: usize },
    Summation2Phi1 { a1: i32, a2: i32, b: i32 },
    Transform3Phi2 { a: [i32; 3], b: [i32; 2] },
    CConst,
    Roundtrip,
}

#[derive(Clone, Debug)]
pub struct Case {
    pub check: CheckName,
    pub label: String,
    pub r: Option<usize>,
    pub spec: TruncSpec,
    pub max_weight: Option<u32>,
    pub task: Task,
}

struct Defaults {
    r_max: usize,
    weight: u32,
}

impl Params {
    fn defaults(&self) -> Defaults {
        match self.profile {
            Profile::Quick => Defaults { r_max: 1, weight: 6 },
            Profile::Full => Defaults { r_max: 2, weight: 8 },
        }
    }

    fn rs(&self, cap: usize) -> Vec<usize> {
        match self.r {
            Some(r) => vec![r],
            None => (1..=cap).collect(),
        }
    }

    fn weight(&self) -> u32 {
        self.max_weight.unwrap_or(self.defaults().weight)
    }

    /// Depth and q-order of the generating-function checks at height r.
    fn gen_spec(&self, r: usize) -> TruncSpec {
        let (d, n) = match (self.profile, r) {
            (Profile::Quick, _) => (4, 8),
            (Profile::Full, 1) => (5, 10),
            (Profile::Full, _) => (4, 8),
        };
        self.spec(self.q_ord.unwrap_or(n), self.u_deg.unwrap_or(d), 0)
    }

    fn spec(&self, n: i32, d: i32, m: i32) -> TruncSpec {
        TruncSpec::new(n, d, m).with_t(self.t.clone())
    }

    fn q_or(&self, quick: i32, full: i32) -> i32 {
        self.q_ord.unwrap_or(match self.profile {
            Profile::Quick => quick,
            Profile::Full => full,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.r == Some(0) {
            return Err(Error::Config("r must be ≥ 1".into()));
        }
        for (name, v) in [("u-deg", self.u_deg), ("q-ord", self.q_ord), ("z-ord", self.z_ord)] {
            if v.is_some_and(|v| v < 0) {
                return Err(Error::Config(format!("{name} must be ≥ 0")));
            }
        }
        if self.max_weight.is_some_and(|w| w < 2) {
            return Err(Error::Config("max-weight must be ≥ 2".into()));
        }
        Ok(())
    }
}

fn t_label(t: &TMode) -> String {
    match t {
        TMode::Symbolic => "symbolic".into(),
        TMode::Value(v) => v.to_string(),
    }
}

pub(crate) fn t_text(spec: &TruncSpec) -> String {
    t_label(&spec.t_mode)
}

const HEINE: [(i32, i32, i32); 4] = [(1, 3, 5), (1, 1, 3), (2, 1, 4), (1, 2, 6)];
const KTW: [([i32; 3], [i32; 2]); 3] = [([1, 2, 3], [6, 4]), ([1, 1, 1], [4, 3]), ([1, 2, 2], [5, 4])];

/// Expand a check name into its cases, in a fixed order.
pub fn plan(name: CheckName, p: &Params) -> Result<Vec<Case>> {
    p.validate()?;
    let mut out = Vec::new();
    let names: Vec<CheckName> = if name == CheckName::All { CheckName::EVERY.to_vec() } else { vec![name] };
    for check in names {
        plan_one(check, p, &mut out);
    }
    Ok(out)
}

fn plan_one(check: CheckName, p: &Params, out: &mut Vec<Case>) {
    let d = p.defaults();
    let mut push = |label: String, r: Option<usize>, spec: TruncSpec, w: Option<u32>, task: Task| {
        out.push(Case { check, label, r, spec, max_weight: w, task });
    };
    match check {
        CheckName::Main => {
            for r in p.rs(d.r_max) {
                push(format!("r={r}"), Some(r), p.gen_spec(r), None, Task::Main);
            }
        }
        CheckName::CorR1 => push("r=1".into(), Some(1), p.gen_spec(1), None, Task::OneHeight),
        CheckName::SumFormula => {
            let n = p.q_or(10, 15);
            let mut ts = vec![p.t.clone()];
            if p.t == TMode::Symbolic {
                ts.push(TMode::Value(0.into()));
                ts.push(TMode::Value(1.into()));
            }
            for t in ts {
                for k in 2..=p.weight() {
                    let spec = TruncSpec::new(n, 0, 0).with_t(t.clone());
                    push(format!("k={k} t={}", t_label(&t)), None, spec, Some(k), Task::SumFormula { k });
                }
            }
        }
        CheckName::FullHeight => {
            let n = p.q_or(10, 12);
            push(format!("k<={}", p.weight()), None, p.spec(n, 0, 0), Some(p.weight()), Task::FullHeight);
            let deg = p.u_deg.unwrap_or(6);
            push(format!("log x-degree<={deg}"), None, p.spec(n, deg, 0), None, Task::LogProduct);
        }
        CheckName::LiT0 => {
            for r in p.rs(d.r_max) {
                let spec = p.gen_spec(r).with_t(TMode::Value(0.into()));
                push(format!("r={r}"), Some(r), spec, None, Task::LiT0);
            }
        }
        CheckName::Phi => {
            for r in p.rs(d.r_max) {
                for j in -1..r as i32 {
                    let spec = p.gen_spec(r).with_u_degree(p.u_deg.unwrap_or(4));
                    let spec = spec.with_q_order(p.q_ord.unwrap_or(8));
                    push(format!("r={r} j={j} z=q"), Some(r), spec, None, Task::Phi { j, at_q: true });
                }
                for j in -1..r as i32 {
                    let m = p.z_ord.unwrap_or(5);
                    let spec = p.spec(p.q_ord.unwrap_or(6), p.u_deg.unwrap_or(3), m);
                    push(format!("r={r} j={j} z-series"), Some(r), spec, None, Task::Phi { j, at_q: false });
                }
            }
        }
        CheckName::Lemma1 => {
            let n = p.q_or(10, 12);
            for w in 2..=p.weight() {
                push(format!("weight={w}"), None, p.spec(n, 0, 0), Some(w), Task::LiAtQ { weight: w });
            }
        }
        CheckName::DiffSystem => {
            let (n, m) = (p.q_ord.unwrap_or(8), p.z_ord.unwrap_or(8));
            for w in 1..=p.weight().min(5) {
                push(format!("polylog weight={w}"), None, p.spec(n, 0, m), Some(w), Task::Polylog { weight: w });
            }
            for r in p.rs(2) {
                let deg = p.u_deg.unwrap_or(3);
                push(format!("clauses r={r}"), Some(r), p.spec(n, deg, m), None, Task::Clauses);
            }
            for r in p.rs(2) {
                let spec = p.spec(p.q_ord.unwrap_or(6), p.u_deg.unwrap_or(3), p.z_ord.unwrap_or(6));
                push(format!("order-(r+1) equation r={r}"), Some(r), spec, None, Task::OrderEquation);
            }
            for n_op in 0..=5 {
                let spec = p.spec(n, 0, m);
                push(format!("theta^{n_op}"), None, spec, None, Task::ThetaStirling { n: n_op });
            }
        }
        CheckName::Heine => {
            let n = p.q_ord.unwrap_or(20);
            for (a1, a2, b) in HEINE {
                let label = format!("({a1},{a2};{b})");
                push(label, None, TruncSpec::new(n, 0, 0), None, Task::Summation2Phi1 { a1, a2, b });
            }
        }
        CheckName::Ktw => {
            let n = p.q_ord.unwrap_or(20);
            for (a, b) in KTW {
                let label = format!("({},{},{};{},{})", a[0], a[1], a[2], b[0], b[1]);
                push(label, None, TruncSpec::new(n, 0, 0), None, Task::Transform3Phi2 { a, b });
            }
        }
        CheckName::CConst => {
            for r in p.rs(3) {
                let spec = p.spec(p.q_ord.unwrap_or(8), p.u_deg.unwrap_or(4), 0);
                push(format!("r={r}"), Some(r), spec, None, Task::CConst);
            }
        }
        CheckName::RoundtripXu => {
            for r in p.rs(2) {
                let spec = p.spec(p.q_ord.unwrap_or(8), p.u_deg.unwrap_or(4), 0);
                push(format!("r={r}"), Some(r), spec, None, Task::Roundtrip);
            }
        }
        CheckName::Stirling => {
            let (n, m) = (p.q_ord.unwrap_or(8), p.z_ord.unwrap_or(8));
            for n_op in 0..=5 {
                push(format!("theta^{n_op}"), None, p.spec(n, 0, m), None, Task::ThetaStirling { n: n_op });
            }
        }
        CheckName::All => unreachable!("expanded by plan"),
    }
}
