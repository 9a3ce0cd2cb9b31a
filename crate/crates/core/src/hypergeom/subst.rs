//! The polynomial change of variables between the `u` and `x` blocks.

use crate::error::{Error, Result};
use crate::qkit::binomial;
use crate::series::{Layout, TruncSeries, TruncSpec};

fn block(layout: &std::sync::Arc<Layout>, spec: &TruncSpec, i: usize) -> TruncSeries {
    TruncSeries::var(layout, spec, layout.block_var(i))
}

/// Work spec with room for dividing by `u1^(r+1)`.
fn elevated(r: usize, spec: &TruncSpec) -> TruncSpec {
    spec.clone().with_u_degree(spec.u_degree + r as i32 + 2)
}

/// Shared shape of both directions: `v1 / (1 + s q1 v1)` for the first
/// variable, and for `j ≥ 2`
/// `v1^-(r+2-j) { Σ_k C(k-2,j-2) (-s q1 v1)^(k-j) (v1^(r+2-k) v_k - v_{r+2}) + v_{r+2} (1 + s q1 v1)^-(j-1) }`.
fn transform(r: usize, layout: &std::sync::Arc<Layout>, spec: &TruncSpec, sign: i64) -> Result<Vec<TruncSeries>> {
    let work = elevated(r, spec);
    let v = |i| block(layout, &work, i);
    let q1 = TruncSeries::one_minus_q(layout, &work).scale_i(sign);
    let one = TruncSeries::one(layout, &work);
    let inv = (&one + &(&q1 * &v(1))).try_inverse()?;
    let step = -&(&q1 * &v(1));
    let top = v(r + 2);
    let u1 = layout.block_var(1);
    let mut out = vec![(&v(1) * &inv).retruncate(spec)?];
    for j in 2..=r + 2 {
        let mut bracket = &top * &inv.pow(j as u32 - 1);
        for k in j..=r + 1 {
            let c = binomial(k as i64 - 2, j as i64 - 2);
            let mono = &v(1).pow((r + 2 - k) as u32) * &v(k);
            let term = &step.pow((k - j) as u32) * &(&mono - &top);
            bracket = &bracket + &term.scale(&c);
        }
        let x = bracket
            .exact_div(u1, (r + 2 - j) as i16)
            .map_err(|e| Error::Structural(format!("variable change: bracket {j} not divisible ({e})")))?;
        out.push(x.retruncate(spec)?);
    }
    Ok(out)
}

/// `x_1..x_{r+2}` as series in `u_1..u_{r+2}` (layout `u(r)`).
pub fn x_from_u(r: usize, spec: &TruncSpec) -> Result<Vec<TruncSeries>> {
    transform(r, &Layout::u(r), spec, 1)
}

/// `u_1..u_{r+2}` as series in `x_1..x_{r+2}` (layout `x(r)`).
pub fn u_from_x(r: usize, spec: &TruncSpec) -> Result<Vec<TruncSeries>> {
    transform(r, &Layout::x(r, false), spec, -1)
}

/// Substitute `x = x(u)` into `u(x)`; the identity map when both are right.
pub fn roundtrip_u(r: usize, spec: &TruncSpec) -> Result<Vec<TruncSeries>> {
    let x = x_from_u(r, spec)?;
    u_from_x(r, spec)?.iter().map(|s| s.compose(&x)).collect()
}
