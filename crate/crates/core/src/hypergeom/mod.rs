//! Closed forms: the change of variables, symmetric parameter families,
//! basic hypergeometric evaluation and the generating-function identities.

mod checks;
mod closed;
mod phi;
mod subst;
mod sums;
mod symfam;

pub use checks::*;
pub use closed::{
    a_main, a_star, c_constant, c_from_x, c_m, phi_closed_form, psi0_closed_form, psi0_closed_form_t0, psi0_one_height,
    CRoute,
};
pub use phi::{phi_eval, phi_eval_from, Param, PhiSpec, PhiSum};
pub use subst::{roundtrip_u, u_from_x, x_from_u};
pub use sums::*;
pub use symfam::{esym_families, SymFamily};
