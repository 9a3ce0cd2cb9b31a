use crate::error::{Error, Result};
use crate::series::TruncSeries;

use super::symfam::SymFamily;

/// A hypergeometric parameter: an explicit series `a`, or a whole family.
#[derive(Clone, Debug)]
pub enum Param {
    Series(TruncSeries),
    Family(SymFamily),
}

/// `Σ_n (upper; q)_n / ((q; q)_n (lower; q)_n) arg^n` where each parameter
/// carries a q-power offset `j` (it stands for `a q^j`).
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub upper: Vec<(Param, i32)>,
    pub lower: Vec<(Param, i32)>,
    pub arg: TruncSeries,
}

/// Outcome of a term-stream summation.
#[derive(Clone, Debug)]
pub struct PhiSum {
    pub value: TruncSeries,
    /// Number of nonzero terms added.
    pub terms: usize,
}

impl PhiSpec {
    /// Family denominators `Π(1 + (1-q)α)` folded into the argument once.
    fn folded_arg(&self) -> Result<TruncSeries> {
        let mut k = self.arg.clone();
        for (p, _) in &self.upper {
            if let Param::Family(f) = p {
                k = &k * &f.product().try_inverse()?;
            }
        }
        for (p, _) in &self.lower {
            if let Param::Family(f) = p {
                k = &k * &f.product();
            }
        }
        Ok(k)
    }

    fn side(&self, params: &[(Param, i32)], n: i32) -> TruncSeries {
        let (layout, spec) = (self.arg.layout(), self.arg.spec());
        let mut acc = TruncSeries::one(layout, spec);
        for (p, j) in params {
            let f = match p {
                Param::Series(a) => &TruncSeries::one(layout, spec) - &a.shift_q((j + n) as i16),
                Param::Family(fam) => fam.numerator(j + n),
            };
            acc = &acc * &f;
        }
        acc
    }

    /// Term ratio `t_{n+1} / t_n`, with the family products already folded.
    fn ratio(&self, n: i32, folded: &TruncSeries) -> Result<TruncSeries> {
        let (layout, spec) = (self.arg.layout(), self.arg.spec());
        let qq = &TruncSeries::one(layout, spec) - &TruncSeries::q_pow(layout, spec, (n + 1) as i16);
        let den = &self.side(&self.lower, n) * &qq;
        let den = den.try_inverse().map_err(|e| Error::Domain(format!("lower parameter at step {n}: {e}")))?;
        Ok(&(&self.side(&self.upper, n) * &den) * folded)
    }
}

/// Sum of the series from `n = 0`.
pub fn phi_eval(spec: &PhiSpec) -> Result<PhiSum> {
    let one = TruncSeries::one(spec.arg.layout(), spec.arg.spec());
    phi_eval_from(spec, one, 0)
}

/// Sum of the terms from index `start` on, given the term at `start`.
/// Every ratio has positive grade, so after `N + D + M + 1` steps the stream
/// must have vanished; a surviving term is a summability error.
pub fn phi_eval_from(spec: &PhiSpec, start_term: TruncSeries, start: i32) -> Result<PhiSum> {
    let s = spec.arg.spec();
    let n_max = s.q_order.max(0) + s.u_degree.max(0) + s.z_order.max(0) + 1;
    let folded = spec.folded_arg()?;
    let mut term = start_term;
    let mut value = TruncSeries::zero(spec.arg.layout(), s);
    let mut count = 0;
    let mut n = start;
    while !term.is_zero() {
        if n - start > n_max {
            return Err(Error::Summability(format!("term {n} of the hypergeometric series survives truncation")));
        }
        value = &value + &term;
        count += 1;
        term = &term * &spec.ratio(n, &folded)?;
        n += 1;
    }
    Ok(PhiSum { value, terms: count })
}
