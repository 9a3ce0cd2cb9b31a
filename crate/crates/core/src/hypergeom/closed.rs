//! Closed-form generating functions assembled from basic hypergeometric
//! series, in the `u` block (Ψ) and in the `x` block (Φ).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qkit::{binomial, q_pochhammer, q_stirling2};
use crate::series::{Layout, Rational, TMode, TruncSeries, TruncSpec};

use super::phi::{phi_eval, phi_eval_from, Param, PhiSpec};
use super::subst::x_from_u;
use super::symfam::{esym_families, SymFamily};

pub(crate) fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::Config("r must be ≥ 1".into()));
    }
    if r + 5 > crate::series::MAX_VARS {
        return Err(Error::Config(format!("r = {r} needs more variables than supported")));
    }
    Ok(())
}

struct Ctx {
    layout: Arc<Layout>,
    spec: TruncSpec,
}

impl Ctx {
    fn new(layout: Arc<Layout>, spec: &TruncSpec) -> Ctx {
        Ctx { layout, spec: spec.clone() }
    }
    fn one(&self) -> TruncSeries {
        TruncSeries::one(&self.layout, &self.spec)
    }
    fn q(&self) -> TruncSeries {
        TruncSeries::q(&self.layout, &self.spec)
    }
    fn q_pow(&self, e: i16) -> TruncSeries {
        TruncSeries::q_pow(&self.layout, &self.spec, e)
    }
    fn q1(&self) -> TruncSeries {
        TruncSeries::one_minus_q(&self.layout, &self.spec)
    }
    fn t(&self) -> TruncSeries {
        TruncSeries::t(&self.layout, &self.spec)
    }
    fn v(&self, i: usize) -> TruncSeries {
        TruncSeries::var(&self.layout, &self.spec, self.layout.block_var(i))
    }
    fn int(&self, c: Rational) -> TruncSeries {
        TruncSeries::constant(&self.layout, &self.spec, c)
    }
    fn stirling(&self, n: i64, k: i64) -> TruncSeries {
        q_stirling2(n, k).to_series(&self.layout, &self.spec)
    }
    /// `(q; q)_n`.
    fn qq(&self, n: usize) -> TruncSeries {
        q_pochhammer(&self.q(), n)
    }
}

fn honest(s: TruncSeries, what: &str) -> Result<TruncSeries> {
    if s.is_honest() {
        Ok(s)
    } else {
        Err(Error::Structural(format!("{what} keeps a negative power of the first variable")))
    }
}

/// `c_m`, carried at an elevated degree cap with negative powers of `u1`.
pub fn c_m(r: usize, m: usize, work: &TruncSpec) -> Result<TruncSeries> {
    let cx = Ctx::new(Layout::u(r), work);
    let q1 = cx.q1();
    let inv1 = (&cx.one() + &(&q1 * &cx.v(1))).try_inverse()?;
    let ratio = &(&q1 * &cx.v(1)) * &inv1;
    let neg_q1 = -&q1;
    let neg_q1_inv = neg_q1.try_inverse()?;
    let u1 = cx.layout.block_var(1);
    let mut acc = TruncSeries::zero(&cx.layout, work);
    for k in (r - m + 1)..=(r + 1) {
        let b0 = binomial(k as i64 - 2, (r - m) as i64);
        let b1 = binomial(k as i64 - 2, r as i64 - m as i64 - 1);
        let coef = &cx.int(b0) + &ratio.scale(&b1);
        let e = k as i32 - r as i32 + m as i32 - 2;
        let p = if e >= 0 { neg_q1.pow(e as u32) } else { neg_q1_inv.pow((-e) as u32) };
        let lau = TruncSeries::var_pow(&cx.layout, work, u1, (k as i32 - r as i32 - 2) as i16);
        let inner = &(&(&cx.v(k) * &inv1) - &(&lau * &cx.v(r + 2))) + &(&(&q1 * &cx.v(k + 1)) * &inv1);
        acc = &acc + &(&(&coef * &p) * &inner);
    }
    Ok(acc)
}

fn work_spec(r: usize, spec: &TruncSpec) -> TruncSpec {
    spec.clone().with_u_degree(spec.u_degree + r as i32 + 2).with_floor(-(r as i32 + 2))
}

/// `Σ_{m=j}^{r-1} c_m S(m+o, j+o) + u1 u2 (1+(1-q)u1)^-2 S(r-1+o, j+o)`,
/// with `o = 1` for the main coefficients and `o = 0` for the t = 0 ones.
fn a_coeffs(r: usize, spec: &TruncSpec, o: i64) -> Result<Vec<TruncSeries>> {
    let work = work_spec(r, spec);
    let cx = Ctx::new(Layout::u(r), &work);
    let inv1 = (&cx.one() + &(&cx.q1() * &cx.v(1))).try_inverse()?;
    let lead = &(&cx.v(1) * &cx.v(2)) * &inv1.pow(2);
    let cs: Vec<TruncSeries> = (0..r).map(|m| c_m(r, m, &work)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let mut a = &lead * &cx.stirling(r as i64 - 1 + o, j as i64 + o);
        for (m, c) in cs.iter().enumerate().skip(j) {
            a = &a + &(c * &cx.stirling(m as i64 + o, j as i64 + o));
        }
        let a = honest(a, &format!("coefficient A_{j}"))?;
        out.push(a.retruncate(spec)?);
    }
    Ok(out)
}

/// The main coefficients `A_0..A_{r-1}`.
pub fn a_main(r: usize, spec: &TruncSpec) -> Result<Vec<TruncSeries>> {
    check_r(r)?;
    a_coeffs(r, spec, 1)
}

/// The t = 0 coefficients `A*_0..A*_{r-1}`.
pub fn a_star(r: usize, spec: &TruncSpec) -> Result<Vec<TruncSeries>> {
    check_r(r)?;
    a_coeffs(r, spec, 0)
}

/// `q (q;q)_j Π_{m<j} Π_i (1-a_i q^m)/(1-b_i q^m) (Z/(1-q))^j` with `Z` the
/// hypergeometric argument `q P_α / P_β`.
fn b_tilde(fa: &SymFamily, fb: &SymFamily, z: &TruncSeries, j: usize, cx: &Ctx) -> Result<TruncSeries> {
    let mut acc = &cx.q() * &cx.qq(j);
    let zq = z * &cx.q1().try_inverse()?;
    for m in 0..j as i32 {
        acc = &(&acc * &fa.factor(m)?) * &fb.factor(m)?.try_inverse()?;
        acc = &acc * &zq;
    }
    Ok(acc)
}

/// `{}_{r+2}φ_{r+1}[q^{j+1}, a q^j; b q^j; q, arg]`.
fn v_series(fa: &SymFamily, fb: &SymFamily, arg: &TruncSeries, j: i32, cx: &Ctx) -> Result<TruncSeries> {
    let spec = PhiSpec {
        upper: vec![(Param::Series(cx.q()), j), (Param::Family(fa.clone()), j)],
        lower: vec![(Param::Family(fb.clone()), j)],
        arg: arg.clone(),
    };
    Ok(phi_eval(&spec)?.value)
}

/// Ψ_0^t from the hypergeometric closed form, in the `u(r)` layout.
pub fn psi0_closed_form(r: usize, spec: &TruncSpec) -> Result<TruncSeries> {
    check_r(r)?;
    let spec = spec.clone().with_floor(0);
    let cx = Ctx::new(Layout::u(r), &spec);
    let x = x_from_u(r, &spec)?;
    let (fa, fb) = esym_families(&x);
    let z = &(&cx.q() * &fa.product()) * &fb.product().try_inverse()?;
    let a = a_main(r, &spec)?;
    let mut sum = TruncSeries::zero(&cx.layout, &spec);
    for (j, aj) in a.iter().enumerate() {
        let bj = b_tilde(&fa, &fb, &z, j, &cx)?;
        let vj = v_series(&fa, &fb, &z, j as i32, &cx)?;
        sum = &sum + &(&(aj * &bj) * &vj);
    }
    let pre = &(&cx.one() + &(&cx.q1() * &cx.v(1))).pow(2) * &main_denominator(r, &cx).try_inverse()?;
    honest(&pre * &sum, "Ψ_0")
}

/// `1 - q u1 - t (1 - q u1) Σ_{k=2}^{r+1} q^{k-2} u_k - t q^r u_{r+2}`.
fn main_denominator(r: usize, cx: &Ctx) -> TruncSeries {
    let omqu = &cx.one() - &(&cx.q() * &cx.v(1));
    let mut s = TruncSeries::zero(&cx.layout, &cx.spec);
    for k in 2..=r + 1 {
        s = &s + &(&cx.q_pow(k as i16 - 2) * &cx.v(k));
    }
    let t = cx.t();
    &(&omqu - &(&(&t * &omqu) * &s)) - &(&(&t * &cx.q_pow(r as i16)) * &cx.v(r + 2))
}

/// Ψ_0^t at r = 1 from the explicit one-height data in `u1, u2, u3`.
pub fn psi0_one_height(spec: &TruncSpec) -> Result<TruncSeries> {
    let spec = spec.clone().with_floor(0);
    let cx = Ctx::new(Layout::u(1), &spec);
    let (u1, u2, u3) = (cx.v(1), cx.v(2), cx.v(3));
    let (q, q1, t, one) = (cx.q(), cx.q1(), cx.t(), cx.one());
    let omt = &one - &t;
    let inv1 = (&one + &(&q1 * &u1)).try_inverse()?;
    let mix = &u2 + &(&q1 * &(&(&u1 * &u2) - &u3));
    let ea = vec![&(&(-&u1) + &(&omt * &mix)) * &inv1, &(&omt * &(&u3 - &(&u1 * &u2))) * &inv1];
    let eb = vec![&(&(-&u1) - &(&t * &mix)) * &inv1, &(&t * &(&(&u1 * &u2) - &u3)) * &inv1];
    let fa = SymFamily::new(ea, 1);
    let fb = SymFamily::new(eb, 2);
    let arg = &(&q * &(&one + &(&(&q1 * &omt) * &u2))) * &(&one - &(&(&q1 * &t) * &u2)).try_inverse()?;
    let phi = phi_eval(&PhiSpec {
        upper: vec![(Param::Series(q.clone()), 0), (Param::Family(fa), 0)],
        lower: vec![(Param::Family(fb), 0)],
        arg,
    })?;
    let den = &(&(&one - &(&q * &u1)) * &(&one - &(&t * &u2))) - &(&(&t * &q) * &u3);
    let pre = &(&q * &u3) * &den.try_inverse()?;
    honest(&pre * &phi.value, "Ψ_0 (one-height form)")
}

/// Ψ_0^0 through the t = 0 closed form with one fewer hypergeometric degree.
/// The division by `u_{r+2} - u1 u_{r+1}` is carried out symbolically: it
/// equals `(1 + (1-q)u1) e_{r+1}(α)`, and `e_{r+1}(α)` is exactly the factor
/// `Π(1 - a*_i)` contributed by the first step of every term used.
pub fn psi0_closed_form_t0(r: usize, spec: &TruncSpec) -> Result<TruncSeries> {
    check_r(r)?;
    if spec.t_mode != TMode::Value(Rational::ZERO) {
        return Err(Error::Config("the t = 0 form needs t fixed to 0".into()));
    }
    let spec = spec.clone().with_floor(0);
    let cx = Ctx::new(Layout::u(r), &spec);
    let x = x_from_u(r, &spec)?;
    let (fa, _) = esym_families(&x);
    let fa = fa.with_shift(0);
    let e_top = fa.esym()[r].clone();
    let (q, q1, one) = (cx.q(), cx.q1(), cx.one());
    let w = &one + &(&q1 * &cx.v(1));
    let lhs = &e_top * &w;
    let rhs = &cx.v(r + 2) - &(&cx.v(1) * &cx.v(r + 1));
    if let Some(mm) = lhs.first_difference(&rhs)? {
        return Err(Error::Structural(format!("top symmetric value mismatch at {}", mm.monomial)));
    }
    let b = &q * &w;
    let arg = &b * &fa.product();
    let stream = |j: i32| PhiSpec {
        upper: vec![(Param::Family(fa.clone()), j)],
        lower: std::iter::repeat_n((Param::Series(q.clone()), j), r - 1)
            .chain(std::iter::once((Param::Series(b.clone()), j)))
            .collect(),
        arg: arg.clone(),
    };
    // Π(1 - a*_i) / e_{r+1} = (1-q)^{r+1} / P_α
    let first = &q1.pow(r as u32 + 1) * &fa.product().try_inverse()?;
    let q1_inv = q1.try_inverse()?;
    let a = a_star(r, &spec)?;
    // j = 0: (φ_0 - 1) / e_{r+1}, starting from the reduced n = 1 term
    let den0 = &q1.pow(r as u32) * &(&one - &b);
    let t1 = &(&first * &den0.try_inverse()?) * &arg;
    let mut sum = &a[0] * &phi_eval_from(&stream(0), t1, 1)?.value;
    for (j, aj) in a.iter().enumerate().skip(1) {
        let mut bj = TruncSeries::one(&cx.layout, &spec);
        for m in 0..j as i32 {
            let num = if m == 0 { first.clone() } else { fa.factor(m)? };
            let qm = &one - &cx.q_pow(m as i16 + 1);
            let den = &qm.pow(r as u32 - 1) * &(&one - &b.shift_q(m as i16));
            bj = &(&bj * &num) * &den.try_inverse()?;
            bj = &(&bj * &arg) * &q1_inv;
        }
        let phi = phi_eval(&stream(j as i32))?.value;
        sum = &sum + &(&(aj * &bj) * &phi);
    }
    honest(&w * &sum, "Ψ_0^0")
}

/// `c` in terms of the `x` variables:
/// `1 - (x1 + t x2) - t Σ_{i=0}^{r-1} (x_{r+2-i} - x1 x_{r+1-i})`.
pub fn c_from_x(x: &[TruncSeries]) -> TruncSeries {
    let (layout, spec) = (x[0].layout(), x[0].spec());
    let r = x.len() - 2;
    let t = TruncSeries::t(layout, spec);
    let mut s = TruncSeries::zero(layout, spec);
    for i in 0..r {
        s = &s + &(&x[r + 1 - i] - &(&x[0] * &x[r - i]));
    }
    let one = TruncSeries::one(layout, spec);
    &(&one - &(&x[0] + &(&t * &x[1]))) - &(&t * &s)
}

/// Which expression of `c` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CRoute {
    /// Through the change of variables `x(u)`.
    XForm,
    /// Directly in the `u` variables.
    UForm,
}

/// The constant `c` as a series in the `u` variables.
pub fn c_constant(r: usize, route: CRoute, spec: &TruncSpec) -> Result<TruncSeries> {
    check_r(r)?;
    let spec = spec.clone().with_floor(0);
    match route {
        CRoute::XForm => Ok(c_from_x(&x_from_u(r, &spec)?)),
        CRoute::UForm => {
            let cx = Ctx::new(Layout::u(r), &spec);
            let (q, q1, t, one) = (cx.q(), cx.q1(), cx.t(), cx.one());
            let inv1 = (&one + &(&q1 * &cx.v(1))).try_inverse()?;
            let mut s = TruncSeries::zero(&cx.layout, &spec);
            for k in 2..=r + 1 {
                s = &s + &(&cx.q_pow(k as i16 - 2) * &cx.v(k));
            }
            let omqu = &one - &(&q * &cx.v(1));
            let a = &cx.v(1) * &inv1;
            let b = &(&(&t * &omqu) * &inv1) * &s;
            let c = &(&(&t * &cx.q_pow(r as i16)) * &inv1) * &cx.v(r + 2);
            Ok(&(&(&one - &a) - &b) - &c)
        }
    }
}

/// `Ã^{(j)}_i = Σ_{m=i}^{r-1-j} (x_{r+2-m} - x1 x_{r+1-m}) S(m+1,i+1) + x1 x_{j+2} S(r-j,i+1)`.
fn a_tilde(x: &[TruncSeries], j: i32, i: usize) -> TruncSeries {
    let (layout, spec) = (x[0].layout(), x[0].spec());
    let r = x.len() - 2;
    let st = |n: i64, k: i64| q_stirling2(n, k).to_series(layout, spec);
    let top = (r as i32 - 1 - j) as usize;
    let mut acc = &(&x[0] * &x[(j + 1) as usize]) * &st(r as i64 - j as i64, i as i64 + 1);
    for m in i..=top {
        let d = &x[r + 1 - m] - &(&x[0] * &x[r - m]);
        acc = &acc + &(&d * &st(m as i64 + 1, i as i64 + 1));
    }
    acc
}

/// Φ_j^t from the hypergeometric closed form, `-1 ≤ j ≤ r-1`, in the free
/// `x` variables: as a z-series (`at_q = false`) or its value at z = q.
pub fn phi_closed_form(r: usize, j: i32, spec: &TruncSpec, at_q: bool) -> Result<TruncSeries> {
    check_r(r)?;
    if j < -1 || j > r as i32 - 1 {
        return Err(Error::Domain(format!("level j = {j} outside -1..={}", r as i32 - 1)));
    }
    let spec = spec.clone().with_floor(0);
    let cx = Ctx::new(Layout::x(r, !at_q), &spec);
    let x: Vec<TruncSeries> = (1..=r + 2).map(|i| cx.v(i)).collect();
    let (fa, fb) = esym_families(&x);
    let ratio = &fa.product() * &fb.product().try_inverse()?;
    let mut sum = TruncSeries::zero(&cx.layout, &spec);
    let top = (r as i32 - 1 - j) as usize;
    if at_q {
        let z = &cx.q() * &ratio;
        for i in 0..=top {
            let b = b_tilde(&fa, &fb, &z, i, &cx)?;
            let v = v_series(&fa, &fb, &z, i as i32, &cx)?;
            sum = &sum + &(&(&a_tilde(&x, j, i) * &b) * &v);
        }
    } else {
        let zv = cx.layout.z();
        let zvar = TruncSeries::var(&cx.layout, &spec, zv);
        let arg = &ratio * &zvar;
        for i in 0..=top {
            // B_i = (q;q)_i Π (a-factors / b-factors) (P_α / ((1-q) P_β))^i
            let mut b = cx.qq(i);
            let step = &ratio * &cx.q1().try_inverse()?;
            for m in 0..i as i32 {
                b = &(&(&b * &fa.factor(m)?) * &fb.factor(m)?.try_inverse()?) * &step;
            }
            let v = v_series(&fa, &fb, &arg, i as i32, &cx)?;
            let zi = TruncSeries::var_pow(&cx.layout, &spec, zv, i as i16 + 1);
            sum = &sum + &(&(&(&a_tilde(&x, j, i) * &b) * &zi) * &v);
        }
    }
    let mut out = &sum * &c_from_x(&x).try_inverse()?;
    if j == -1 {
        out = &out + &cx.one();
    }
    Ok(out)
}
