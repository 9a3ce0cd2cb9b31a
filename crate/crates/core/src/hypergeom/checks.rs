//! Closed forms compared against the brute-force generating functions.

use crate::error::Result;
use crate::mzv::{phi_brute, psi0_brute};
use crate::series::{Layout, Mismatch, Rational, TMode, TruncSeries, TruncSpec};

use super::closed::{c_constant, phi_closed_form, psi0_closed_form, psi0_closed_form_t0, psi0_one_height, CRoute};
use super::subst::roundtrip_u;

pub fn main_check(r: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    psi0_closed_form(r, spec)?.first_difference(&psi0_brute(r, spec, None)?)
}

/// The one-height form against the general closed form at r = 1.
pub fn one_height_check(spec: &TruncSpec) -> Result<Option<Mismatch>> {
    psi0_one_height(spec)?.first_difference(&psi0_closed_form(1, spec)?)
}

/// The t = 0 form against the general closed form and the brute-force
/// values, both with t fixed to 0.
pub fn li_t0_check(r: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let spec = spec.clone().with_t(TMode::Value(Rational::ZERO));
    let li = psi0_closed_form_t0(r, &spec)?;
    if let Some(m) = li.first_difference(&psi0_closed_form(r, &spec)?)? {
        return Ok(Some(m));
    }
    li.first_difference(&psi0_brute(r, &spec, None)?)
}

pub fn phi_check(r: usize, j: i32, spec: &TruncSpec, at_q: bool) -> Result<Option<Mismatch>> {
    phi_closed_form(r, j, spec, at_q)?.first_difference(&phi_brute(r, j, spec, at_q)?)
}

pub fn c_const_check(r: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    c_constant(r, CRoute::XForm, spec)?.first_difference(&c_constant(r, CRoute::UForm, spec)?)
}

/// `u(x(u)) = u` coordinate by coordinate; the first mismatch wins.
pub fn roundtrip_check(r: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let spec = spec.clone().with_floor(0);
    let layout = Layout::u(r);
    for (i, s) in roundtrip_u(r, &spec)?.iter().enumerate() {
        let id = TruncSeries::var(&layout, &spec, layout.block_var(i + 1));
        if let Some(m) = s.first_difference(&id)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
