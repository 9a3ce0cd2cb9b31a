//! Exact ring kernel: rationals, truncated multivariate series and the
//! symmetric-function helpers built on them.

pub mod layout;
pub mod rational;
pub mod trunc;

pub use layout::{Layout, Mono, TMode, TruncSpec, Var, MAX_VARS};
pub use rational::Rational;
pub use trunc::{Division, Mismatch, TruncSeries};

/// Power sums p_1..p_K of the roots whose elementary symmetric values are
/// `e = (e_1, .., e_d)`, via Newton's identities.
pub fn newton_power_sums(e: &[TruncSeries], k: usize) -> Vec<TruncSeries> {
    assert!(!e.is_empty(), "need at least e_1");
    let d = e.len();
    let mut p: Vec<TruncSeries> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut acc = if n <= d {
            let c = if n % 2 == 1 { n as i64 } else { -(n as i64) };
            e[n - 1].scale_i(c)
        } else {
            TruncSeries::zero(e[0].layout(), e[0].spec())
        };
        for i in 1..=d.min(n - 1) {
            let term = &e[i - 1] * &p[n - i - 1];
            acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        p.push(acc);
    }
    p
}
