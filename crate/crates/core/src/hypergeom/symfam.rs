use crate::error::Result;
use crate::series::TruncSeries;

/// Parameters `a_i = q^s / (1 + (1-q) α_i)` held through the elementary
/// symmetric functions `e_1..e_d` of the `α_i`. The roots themselves are
/// never formed.
#[derive(Clone, Debug)]
pub struct SymFamily {
    esym: Vec<TruncSeries>,
    shift: i32,
}

impl SymFamily {
    pub fn new(esym: Vec<TruncSeries>, shift: i32) -> SymFamily {
        assert!(!esym.is_empty(), "a family needs at least e_1");
        SymFamily { esym, shift }
    }

    pub fn degree(&self) -> usize {
        self.esym.len()
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn esym(&self) -> &[TruncSeries] {
        &self.esym
    }

    pub fn with_shift(&self, shift: i32) -> SymFamily {
        SymFamily { esym: self.esym.clone(), shift }
    }

    fn q1_pow(&self, k: u32) -> TruncSeries {
        let e = &self.esym[0];
        TruncSeries::one_minus_q(e.layout(), e.spec()).pow(k)
    }

    /// `Π (1 + (1-q) α_i) = 1 + Σ_j (1-q)^j e_j`.
    pub fn product(&self) -> TruncSeries {
        let e = &self.esym[0];
        let mut acc = TruncSeries::one(e.layout(), e.spec());
        for (j, ej) in self.esym.iter().enumerate() {
            acc = &acc + &(&self.q1_pow(j as u32 + 1) * ej);
        }
        acc
    }

    /// `Π ((1 - q^(m+s)) + (1-q) α_i) = Σ_j (1 - q^(m+s))^(d-j) (1-q)^j e_j`.
    pub fn numerator(&self, m: i32) -> TruncSeries {
        let e = &self.esym[0];
        let (layout, spec) = (e.layout(), e.spec());
        let d = self.degree() as u32;
        let pw = m + self.shift;
        assert!(pw >= 0, "negative q-power in a family factor");
        let base = &TruncSeries::one(layout, spec) - &TruncSeries::q_pow(layout, spec, pw as i16);
        let mut acc = base.pow(d);
        for (j, ej) in self.esym.iter().enumerate() {
            let j = j as u32 + 1;
            acc = &acc + &(&(&base.pow(d - j) * &self.q1_pow(j)) * ej);
        }
        acc
    }

    /// `Π_i (1 - a_i q^m)`.
    pub fn factor(&self, m: i32) -> Result<TruncSeries> {
        Ok(&self.numerator(m) * &self.product().try_inverse()?)
    }
}

/// The α-data `e_1 = (1-t) x_2 - x_1`, `e_j = (1-t)(x_{j+1} - x_1 x_j)` and the
/// β-data `e_1 = -(x_1 + t x_2)`, `e_j = -t (x_{j+1} - x_1 x_j)`, as families
/// with shifts 1 and 2. `x` holds `x_1..x_{r+2}`.
pub fn esym_families(x: &[TruncSeries]) -> (SymFamily, SymFamily) {
    let (layout, spec) = (x[0].layout(), x[0].spec());
    let t = TruncSeries::t(layout, spec);
    let one = TruncSeries::one(layout, spec);
    let omt = &one - &t;
    let d = x.len() - 1;
    let mut ea = vec![&(&omt * &x[1]) - &x[0]];
    let mut eb = vec![-&(&x[0] + &(&t * &x[1]))];
    for j in 2..=d {
        let diff = &x[j] - &(&x[0] * &x[j - 1]);
        ea.push(&omt * &diff);
        eb.push(-&(&t * &diff));
    }
    (SymFamily::new(ea, 1), SymFamily::new(eb, 2))
}
