//! q-combinatorial primitives.

use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::series::{Layout, Mono, Rational, TruncSeries, TruncSpec};

/// An exact polynomial in q, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(pub Vec<Rational>);

impl QPoly {
    pub fn zero() -> QPoly {
        QPoly(Vec::new())
    }

    pub fn one() -> QPoly {
        QPoly(vec![Rational::ONE])
    }

    fn trim(mut self) -> QPoly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or(Rational::ZERO)
    }

    /// `[k] = 1 + q + … + q^{k-1}`.
    pub fn q_int(k: usize) -> QPoly {
        QPoly(vec![Rational::ONE; k])
    }

    pub fn monomial(e: usize) -> QPoly {
        let mut v = vec![Rational::ZERO; e + 1];
        v[e] = Rational::ONE;
        QPoly(v)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        QPoly((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect()).trim()
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return QPoly::zero();
        }
        let mut v = vec![Rational::ZERO; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += &(a * b);
            }
        }
        QPoly(v).trim()
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::ZERO, |acc, c| &(&acc * q) + c)
    }

    pub fn to_series(&self, layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries::from_terms(
            layout,
            spec,
            self.0.iter().enumerate().map(|(i, c)| (Mono::ONE.with(0, i as i16), c.clone())),
        )
        .expect("polynomial in q")
    }
}

/// `[n] = 1 + q + … + q^{n-1}` as a truncated series.
pub fn q_int(n: i64, layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    if n <= 0 {
        return Err(Error::Domain(format!("q-integer [{n}] needs n ≥ 1")));
    }
    Ok(QPoly::q_int(n as usize).to_series(layout, spec))
}

/// `(a; q)_n = Π_{m<n} (1 - a q^m)`.
pub fn q_pochhammer(a: &TruncSeries, n: usize) -> TruncSeries {
    let one = TruncSeries::one(a.layout(), a.spec());
    let mut acc = one.clone();
    let mut aqm = a.clone();
    for _ in 0..n {
        acc = &acc * &(&one - &aqm);
        aqm = aqm.shift_q(1);
    }
    acc
}

/// `(a; q)_∞` truncated at q-order; needs `a` of q-valuation ≥ 1 so that the
/// factors beyond index N are 1 under truncation.
pub fn q_pochhammer_inf(a: &TruncSeries) -> Result<TruncSeries> {
    if a.terms().iter().any(|(m, _)| m.0[0] < 1) {
        return Err(Error::Domain("(a;q)_∞ needs a of q-valuation ≥ 1".into()));
    }
    Ok(q_pochhammer(a, a.spec().q_order.max(0) as usize + 1))
}

impl TruncSeries {
    /// Multiply by `q^k` keeping the q-cap (truncation semantics).
    pub fn shift_q(&self, k: i16) -> TruncSeries {
        let terms = self.terms().iter().map(|(m, c)| {
            let mut m = *m;
            m.0[0] += k;
            (m, c.clone())
        });
        TruncSeries::from_terms(self.layout(), self.spec(), terms).expect("q shift")
    }
}

fn stirling_table() -> &'static Mutex<Vec<Vec<QPoly>>> {
    static TABLE: OnceLock<Mutex<Vec<Vec<QPoly>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![vec![QPoly::one()]]))
}

/// q-Stirling number of the second kind,
/// `S_q(n,k) = q^{k-1} S_q(n-1,k-1) + [k] S_q(n-1,k)`, `S_q(0,0) = 1`.
pub fn q_stirling2(n: i64, k: i64) -> QPoly {
    if n < 0 || k < 0 || k > n {
        return QPoly::zero();
    }
    let (n, k) = (n as usize, k as usize);
    let mut table = stirling_table().lock().expect("stirling table");
    while table.len() <= n {
        let prev = table.last().expect("row 0").clone();
        let m = table.len();
        let row: Vec<QPoly> = (0..=m)
            .map(|j| {
                let from_left =
                    if j >= 1 && j - 1 < prev.len() { QPoly::monomial(j - 1).mul(&prev[j - 1]) } else { QPoly::zero() };
                let from_up = if j < prev.len() { QPoly::q_int(j).mul(&prev[j]) } else { QPoly::zero() };
                from_left.add(&from_up)
            })
            .collect();
        table.push(row);
    }
    table[n][k].clone()
}

/// Binomial coefficient with the falling-factorial convention: `C(n,k) = 0`
/// for `k < 0`, and `n(n-1)…(n-k+1)/k!` otherwise (so 0 when `k > n ≥ 0`).
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::ZERO;
    }
    let mut acc = Rational::ONE;
    for i in 0..k {
        acc = &(&acc * &Rational::from(n - i)) / &Rational::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_small_values() {
        assert_eq!(q_stirling2(0, 0), QPoly::one());
        assert_eq!(q_stirling2(2, 2), QPoly::monomial(1));
        assert_eq!(q_stirling2(3, 2), QPoly(vec![0.into(), 2.into(), 1.into()]));
        assert!(q_stirling2(3, 4).is_zero());
        assert!(q_stirling2(3, 0).is_zero());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), Rational::from(6));
        assert_eq!(binomial(0, 0), Rational::ONE);
        assert_eq!(binomial(2, 3), Rational::ZERO);
        assert_eq!(binomial(-1, 2), Rational::ONE);
    }
}
