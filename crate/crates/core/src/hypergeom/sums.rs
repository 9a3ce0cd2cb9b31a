//! Sum formulas, the logarithm of a q-product, and the classical
//! summation and transformation instances.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mzv::{admissible_indices, fullheight_brute, zeta_q, zeta_t_sum, Index};
use crate::qkit::{binomial, q_int, q_pochhammer_inf};
use crate::series::{newton_power_sums, Layout, Mismatch, Mono, Rational, TruncSeries, TruncSpec};

use super::phi::{phi_eval, Param, PhiSpec};

/// Re-express a series in another layout under `spec`.
fn lift(s: &TruncSeries, layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    let src = s.layout();
    let mut terms = Vec::with_capacity(s.len());
    for (m, c) in s.terms() {
        let mut out = Mono::ONE;
        for slot in 0..src.nslots() {
            if m.0[slot] != 0 {
                out.0[layout.var(src.name(slot))?.0] = m.0[slot];
            }
        }
        terms.push((out, c.clone()));
    }
    TruncSeries::from_terms(layout, spec, terms)
}

fn zeta_single(n: u32, layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    lift(&zeta_q(&Index::new(vec![n])?, spec.q_order)?, layout, spec)
}

/// `(1/(k-1)) Σ_{0≤l≤j≤n-1} C(k-1,j) C(j,l) (k-1-l) t^j (1-t)^{n-1-j} (1-q)^l ζ_q(k-l)`.
pub fn sum_formula_rhs(k: u32, n: u32, spec: &TruncSpec) -> Result<TruncSeries> {
    if n < 1 || k <= n {
        return Err(Error::Domain(format!("sum formula needs k > n ≥ 1, got k = {k}, n = {n}")));
    }
    let layout = Layout::qt();
    let spec = TruncSpec::new(spec.q_order, 0, 0).with_t(spec.t_mode.clone());
    let one = TruncSeries::one(&layout, &spec);
    let t = TruncSeries::t(&layout, &spec);
    let q1 = TruncSeries::one_minus_q(&layout, &spec);
    let mut acc = TruncSeries::zero(&layout, &spec);
    for j in 0..n {
        let tj = &t.pow(j) * &(&one - &t).pow(n - 1 - j);
        for l in 0..=j {
            let c = &(&binomial(k as i64 - 1, j as i64) * &binomial(j as i64, l as i64))
                * &Rational::from((k - 1 - l) as i64);
            let z = zeta_single(k - l, &layout, &spec)?;
            acc = &acc + &(&(&tj * &q1.pow(l)) * &z).scale(&c);
        }
    }
    Ok(acc.scale(&Rational::new(1, k as i64 - 1)))
}

/// `Σ ζ_q^t` over admissible indices of weight `k` and depth `n`.
pub fn sum_formula_lhs(k: u32, n: u32, spec: &TruncSpec) -> Result<TruncSeries> {
    zeta_t_sum(&admissible_indices(k, n), spec)
}

pub fn sum_formula_check(k: u32, n: u32, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    sum_formula_lhs(k, n, spec)?.first_difference(&sum_formula_rhs(k, n, spec)?)
}

/// `(1/K) Σ_{n=2}^{K} ζ_q(n) (q-1)^{K-n}`.
fn gamma(k: u32, layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    let qm1 = -&TruncSeries::one_minus_q(layout, spec);
    let mut acc = TruncSeries::zero(layout, spec);
    for n in 2..=k {
        acc = &acc + &(&zeta_single(n, layout, spec)? * &qm1.pow(k - n));
    }
    Ok(acc.scale(&Rational::new(1, k as i64)))
}

/// `exp{Σ_K (p^w_K - p^z_K) γ_K} - 1` in the `u(1)` layout (u2 unused), where
/// the z-roots have `e = (u1 - (1-t)(1-q)u3, (1-t)u3)` and the w-roots
/// `e = (u1 + t(1-q)u3, -t u3)`. Power sums of index K have degree ≥ K/2, so
/// `K ≤ 2D` suffices.
pub fn fullheight_rhs(spec: &TruncSpec) -> Result<TruncSeries> {
    let layout = Layout::u(1);
    let spec = spec.clone().with_floor(0).with_z_order(0);
    let u1 = TruncSeries::var(&layout, &spec, layout.block_var(1));
    let u3 = TruncSeries::var(&layout, &spec, layout.block_var(3));
    let t = TruncSeries::t(&layout, &spec);
    let one = TruncSeries::one(&layout, &spec);
    let q1 = TruncSeries::one_minus_q(&layout, &spec);
    let omt = &one - &t;
    let ez = [&u1 - &(&(&omt * &q1) * &u3), &omt * &u3];
    let ew = [&u1 + &(&(&t * &q1) * &u3), -&(&t * &u3)];
    let kmax = 2 * spec.u_degree.max(0) as usize;
    let pz = newton_power_sums(&ez, kmax);
    let pw = newton_power_sums(&ew, kmax);
    let mut s = TruncSeries::zero(&layout, &spec);
    for k in 2..=kmax {
        let d = &pw[k - 1] - &pz[k - 1];
        if !d.is_zero() {
            s = &s + &(&d * &gamma(k as u32, &layout, &spec)?);
        }
    }
    Ok(&s.exp()? - &one)
}

/// Compare the coefficients of `u1^{k-2l} u3^l`, `k ≤ max_weight`.
pub fn fullheight_check(max_weight: u32, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let spec = spec.clone().with_u_degree(max_weight as i32);
    let rhs = fullheight_rhs(&spec)?;
    let layout = rhs.layout().clone();
    let (s1, s3) = (layout.block_var(1).0, layout.block_var(3).0);
    let kept = rhs.terms().iter().filter(|(m, _)| (m.0[s1] + 2 * m.0[s3]) as u32 <= max_weight).cloned();
    let rhs = TruncSeries::from_terms(&layout, rhs.spec(), kept)?;
    fullheight_brute(max_weight, &spec)?.first_difference(&rhs)
}

/// Both sides of
/// `log Π_{n≥1} (1 - q^n x/[n]) = log(1+(1-q)x)/(q-1) Σ_{n≥1} q^n/[n] - Σ_{K≥2} γ_K x^K`
/// in the layout `q, t, x`.
pub fn log_product_sides(spec: &TruncSpec) -> Result<(TruncSeries, TruncSeries)> {
    let layout = Layout::new(vec!["x".into()], false, false);
    let spec = spec.clone().with_floor(0).with_z_order(0);
    let x = TruncSeries::var(&layout, &spec, layout.block_var(1));
    let one = TruncSeries::one(&layout, &spec);
    let q1 = TruncSeries::one_minus_q(&layout, &spec);
    let n_max = spec.q_order.max(0);
    let mut prod = one.clone();
    let mut harmonic = TruncSeries::zero(&layout, &spec);
    for n in 1..=n_max {
        let w = &TruncSeries::q_pow(&layout, &spec, n as i16) * &q_int(n as i64, &layout, &spec)?.try_inverse()?;
        prod = &prod * &(&one - &(&w * &x));
        harmonic = &harmonic + &w;
    }
    let lhs = prod.log()?;
    let lead = &(&(&one + &(&q1 * &x)).log()? * &(-&q1).try_inverse()?) * &harmonic;
    let mut tail = TruncSeries::zero(&layout, &spec);
    for k in 2..=spec.u_degree.max(0) as u32 {
        tail = &tail + &(&gamma(k, &layout, &spec)? * &x.pow(k));
    }
    Ok((lhs, &lead - &tail))
}

pub fn log_product_check(spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let (a, b) = log_product_sides(spec)?;
    a.first_difference(&b)
}

fn qpow_params(exps: &[i32], layout: &Arc<Layout>, spec: &TruncSpec) -> Vec<(Param, i32)> {
    exps.iter().map(|&e| (Param::Series(TruncSeries::q_pow(layout, spec, e as i16)), 0)).collect()
}

fn qpoch_inf(e: i32, layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    if e < 1 {
        return Err(Error::Domain(format!("(q^{e}; q)_∞ is not a unit series")));
    }
    q_pochhammer_inf(&TruncSeries::q_pow(layout, spec, e as i16))
}

fn phi_q(upper: &[i32], lower: &[i32], arg: i32, spec: &TruncSpec) -> Result<TruncSeries> {
    let layout = Layout::qt();
    if arg < 1 || lower.iter().any(|&b| b < 1) {
        return Err(Error::Domain("needs argument and lower parameters of positive q-power".into()));
    }
    if upper.iter().any(|&a| a < 0) {
        return Err(Error::Domain("upper parameters need a nonnegative q-power".into()));
    }
    let p = PhiSpec {
        upper: qpow_params(upper, &layout, spec),
        lower: qpow_params(lower, &layout, spec),
        arg: TruncSeries::q_pow(&layout, spec, arg as i16),
    };
    Ok(phi_eval(&p)?.value)
}

/// `2φ1[q^a1, q^a2; q^b; q, q^{b-a1-a2}]` against its infinite-product value.
pub fn summation_2phi1_check(a1: i32, a2: i32, b: i32, q_order: i32) -> Result<Option<Mismatch>> {
    let layout = Layout::qt();
    let spec = TruncSpec::new(q_order, 0, 0);
    let lhs = phi_q(&[a1, a2], &[b], b - a1 - a2, &spec)?;
    let num = &qpoch_inf(b - a1, &layout, &spec)? * &qpoch_inf(b - a2, &layout, &spec)?;
    let den = &qpoch_inf(b, &layout, &spec)? * &qpoch_inf(b - a1 - a2, &layout, &spec)?;
    lhs.first_difference(&(&num * &den.try_inverse()?))
}

/// The three-term 3φ2 transformation with `(a1,a2,a3; b1,b2)` as q-powers.
pub fn transform_3phi2_check(a: [i32; 3], b: [i32; 2], q_order: i32) -> Result<Option<Mismatch>> {
    let layout = Layout::qt();
    let spec = TruncSpec::new(q_order, 0, 0);
    let [a1, a2, a3] = a;
    let [b1, b2] = b;
    let lhs = phi_q(&[a1, a2, a3], &[b1, b2], b1 + b2 - a1 - a2 - a3, &spec)?;
    let num = &qpoch_inf(b1 - a1, &layout, &spec)? * &qpoch_inf(b1 + b2 - a2 - a3, &layout, &spec)?;
    let den = &qpoch_inf(b1, &layout, &spec)? * &qpoch_inf(b1 + b2 - a1 - a2 - a3, &layout, &spec)?;
    let inner = phi_q(&[a1, b2 - a2, b2 - a3], &[b2, b1 + b2 - a2 - a3], b1 - a1, &spec)?;
    lhs.first_difference(&(&(&num * &den.try_inverse()?) * &inner))
}
