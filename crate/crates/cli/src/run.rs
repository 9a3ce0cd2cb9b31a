use std::time::Instant;

use qzv_core::hypergeom::{
    c_const_check, fullheight_check, li_t0_check, log_product_check, main_check, one_height_check, phi_check,
    roundtrip_check, sum_formula_check, summation_2phi1_check, transform_3phi2_check,
};
use qzv_core::mzv::{
    admissible_indices, enumerate_indices, g_clause_applies, g_difference_relation, li_at_q_binomial_sum, li_t_at_q,
    li_t_q, polylog_difference_relation, signatures, theta_stirling_relation, GClause, Index, IndexSignature,
    MzvEngine,
};
use qzv_core::series::Mismatch;
use qzv_core::{Error, Result, TruncSpec};
use rayon::prelude::*;

use crate::plan::{t_text, Case, Task};
use crate::report::{CheckReport, Status};

/// A mismatch, with the sub-object it was found in when a case covers many.
type Found = Option<(Option<String>, Mismatch)>;

fn plain(m: Option<Mismatch>) -> Found {
    m.map(|m| (None, m))
}

fn first_in<T, F>(items: impl IntoIterator<Item = T>, mut f: F) -> Result<Found>
where
    F: FnMut(&T) -> Result<Option<Mismatch>>,
    T: std::fmt::Display,
{
    for it in items {
        if let Some(m) = f(&it)? {
            return Ok(Some((Some(it.to_string()), m)));
        }
    }
    Ok(None)
}

struct Sig<'a>(&'a IndexSignature, GClause);

impl std::fmt::Display for Sig<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let h: Vec<String> = self.0.h.iter().map(|h| h.to_string()).collect();
        write!(f, "{:?} k={} l={} h=({})", self.1, self.0.k, self.0.l, h.join(","))
    }
}

struct Paren<'a>(&'a Index);

impl std::fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "index ({})", self.0)
    }
}

fn all_indices(weight: u32) -> Vec<Index> {
    let mut out = Vec::new();
    for l in 1..=weight {
        for h1 in 0..=l {
            out.extend(enumerate_indices(&IndexSignature { k: weight, l, h: vec![h1], j: -1 }));
        }
    }
    out
}

fn stirling_probe(n: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let f = &li_t_q(&"2,1".parse()?, spec)? + &li_t_q(&"3".parse()?, spec)?;
    theta_stirling_relation(n, &f)
}

fn execute(case: &Case) -> Result<Found> {
    let s = &case.spec;
    let r = case.r.unwrap_or(1);
    match &case.task {
        Task::Main => main_check(r, s).map(plain),
        Task::OneHeight => one_height_check(s).map(plain),
        Task::SumFormula { k } => first_in((1..*k).map(|n| Depth(*k, n)), |d| sum_formula_check(d.0, d.1, s)),
        Task::FullHeight => fullheight_check(case.max_weight.unwrap_or(8), s).map(plain),
        Task::LogProduct => log_product_check(s).map(plain),
        Task::LiT0 => li_t0_check(r, s).map(plain),
        Task::Phi { j, at_q } => phi_check(r, *j, s, *at_q).map(plain),
        Task::LiAtQ { weight } => {
            let idx: Vec<Index> = (1..*weight).flat_map(|l| admissible_indices(*weight, l)).collect();
            first_in(idx.iter().map(Paren), |k| li_t_at_q(k.0, s)?.first_difference(&li_at_q_binomial_sum(k.0, s)?))
        }
        Task::Polylog { weight } => {
            let idx = all_indices(*weight);
            first_in(idx.iter().map(Paren), |k| polylog_difference_relation(k.0, s))
        }
        Task::Clauses => {
            let mut eng = MzvEngine::new(s.q_order, s.z_order);
            let sigs = signatures(r, -1, s.u_degree, None);
            let mut clauses = vec![GClause::TopLevel, GClause::Bottom];
            clauses.extend((0..r as i32 - 1).map(GClause::Consecutive));
            let pairs = sigs
                .iter()
                .flat_map(|sig| clauses.iter().map(move |c| Sig(sig, *c)))
                .filter(|p| g_clause_applies(p.1, p.0));
            first_in(pairs, |p| g_difference_relation(&mut eng, p.1, p.0, s))
        }
        Task::OrderEquation => qzv_core::mzv::top_level_equation_relation(r, s).map(plain),
        Task::ThetaStirling { n } => stirling_probe(*n, s).map(plain),
        Task::Summation2Phi1 { a1, a2, b } => summation_2phi1_check(*a1, *a2, *b, s.q_order).map(plain),
        Task::Transform3Phi2 { a, b } => transform_3phi2_check(*a, *b, s.q_order).map(plain),
        Task::CConst => c_const_check(r, s).map(plain),
        Task::Roundtrip => roundtrip_check(r, s).map(plain),
    }
}

struct Depth(u32, u32);

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "depth {}", self.1)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) => "config",
        Error::NonInvertible(_) => "non-invertible",
        Error::Domain(_) => "domain",
        Error::Divisibility(_) => "divisibility",
        Error::InsufficientTruncation(_) => "insufficient-truncation",
        Error::Summability(_) => "summability",
        Error::Structural(_) => "structural",
        Error::Parse(_) => "parse",
    }
}

pub fn run_case(case: &Case, timings: bool) -> CheckReport {
    let start = Instant::now();
    let outcome = execute(case);
    let wall_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut rep = CheckReport {
        check: case.check.as_str().to_string(),
        case: case.label.clone(),
        r: case.r,
        u_degree: case.spec.u_degree,
        q_order: case.spec.q_order,
        z_order: case.spec.z_order,
        t: t_text(&case.spec),
        max_weight: case.max_weight,
        status: Status::Pass,
        location: None,
        witness_monomial: None,
        lhs: None,
        rhs: None,
        error_kind: None,
        error: None,
        wall_ms,
    };
    match outcome {
        Ok(None) => {}
        Ok(Some((loc, m))) => {
            rep.status = Status::Fail;
            rep.location = loc;
            rep.witness_monomial = Some(m.monomial);
            rep.lhs = Some(m.lhs.to_string());
            rep.rhs = Some(m.rhs.to_string());
        }
        Err(e) => {
            rep.status = Status::Error;
            rep.error_kind = Some(error_kind(&e).to_string());
            rep.error = Some(e.to_string());
        }
    }
    rep
}

/// Run cases on `jobs` workers; the output order is the case order.
pub fn run_cases(cases: &[Case], jobs: usize, timings: bool) -> Result<Vec<CheckReport>> {
    if jobs <= 1 {
        return Ok(cases.iter().map(|c| run_case(c, timings)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| cases.par_iter().map(|c| run_case(c, timings)).collect()))
}
