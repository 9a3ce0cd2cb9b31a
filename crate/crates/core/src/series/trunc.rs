//! Sparse truncated multivariate series over `Rational`.
//!
//! Terms are kept as a vector sorted in canonical monomial order with no zero
//! coefficients. The attached `TruncSpec` records how far the series is known
//! exactly; binary operations combine specs by componentwise minimum, and a
//! product involving Laurent terms of negative block degree lowers the block
//! cap accordingly so that every stored term stays exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::series::layout::{Layout, Mono, TMode, TruncSpec, Var, BLOCK, Q, T};
use crate::series::rational::Rational;

#[derive(Clone)]
pub struct TruncSeries {
    layout: Arc<Layout>,
    spec: TruncSpec,
    terms: Vec<(Mono, Rational)>,
}

/// Result of a monomial division: the quotient and whether every term divided.
#[derive(Clone, Debug)]
pub struct Division {
    pub series: TruncSeries,
    pub exact: bool,
}

/// First disagreement between two series in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub monomial: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

fn same_layout(a: &Arc<Layout>, b: &Arc<Layout>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl TruncSeries {
    // ---- construction -------------------------------------------------

    pub fn zero(layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries { layout: layout.clone(), spec: spec.clone(), terms: Vec::new() }
    }

    pub fn constant(layout: &Arc<Layout>, spec: &TruncSpec, c: Rational) -> TruncSeries {
        TruncSeries::monomial(layout, spec, Mono::ONE, c)
    }

    pub fn one(layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries::constant(layout, spec, Rational::ONE)
    }

    pub fn int(layout: &Arc<Layout>, spec: &TruncSpec, c: i64) -> TruncSeries {
        TruncSeries::constant(layout, spec, Rational::from(c))
    }

    /// `c * m`, dropped if `m` exceeds the caps. Panics if `m` violates the
    /// layout (negative exponent outside the Laurent slot).
    pub fn monomial(layout: &Arc<Layout>, spec: &TruncSpec, m: Mono, c: Rational) -> TruncSeries {
        TruncSeries::from_terms(layout, spec, vec![(m, c)]).expect("invalid monomial")
    }

    pub fn var(layout: &Arc<Layout>, spec: &TruncSpec, v: Var) -> TruncSeries {
        TruncSeries::var_pow(layout, spec, v, 1)
    }

    pub fn var_pow(layout: &Arc<Layout>, spec: &TruncSpec, v: Var, e: i16) -> TruncSeries {
        TruncSeries::monomial(layout, spec, Mono::ONE.with(v.0, e), Rational::ONE)
    }

    pub fn q(layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries::var(layout, spec, Var(Q))
    }

    pub fn q_pow(layout: &Arc<Layout>, spec: &TruncSpec, e: i16) -> TruncSeries {
        TruncSeries::var_pow(layout, spec, Var(Q), e)
    }

    /// The variable `t`, or its value when the spec fixes it.
    pub fn t(layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries::var(layout, spec, Var(T))
    }

    /// `1 - q`.
    pub fn one_minus_q(layout: &Arc<Layout>, spec: &TruncSpec) -> TruncSeries {
        TruncSeries::from_terms(
            layout,
            spec,
            vec![(Mono::ONE, Rational::ONE), (Mono::ONE.with(Q, 1), Rational::from(-1))],
        )
        .expect("1-q")
    }

    /// Build from arbitrary (possibly repeated, possibly zero) terms. Applies the
    /// t-value substitution, drops terms outside the caps and merges duplicates.
    pub fn from_terms<I>(layout: &Arc<Layout>, spec: &TruncSpec, terms: I) -> Result<TruncSeries>
    where
        I: IntoIterator<Item = (Mono, Rational)>,
    {
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        let tpow = TPowers::new(&spec.t_mode);
        for (mut m, mut c) in terms {
            if c.is_zero() {
                continue;
            }
            check_shape(layout, spec, &m)?;
            if let Some(tp) = &tpow {
                let e = m.0[T];
                if e != 0 {
                    c = &c * &tp.get(e);
                    m.0[T] = 0;
                }
            }
            if !within_caps(layout, spec, &m) {
                continue;
            }
            acc.entry(m).and_modify(|x| *x += &c).or_insert(c);
        }
        Ok(TruncSeries::from_map(layout, spec, acc))
    }

    fn from_map(layout: &Arc<Layout>, spec: &TruncSpec, acc: FxHashMap<Mono, Rational>) -> TruncSeries {
        let mut terms: Vec<(Mono, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|a| a.0);
        TruncSeries { layout: layout.clone(), spec: spec.clone(), terms }
    }

    // ---- accessors ----------------------------------------------------

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn spec(&self) -> &TruncSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[(Mono, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff_at(&Mono::ONE)
    }

    pub fn coeff_at(&self, m: &Mono) -> Rational {
        match self.terms.binary_search_by(|(k, _)| k.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::ZERO,
        }
    }

    /// Coefficient of the partial monomial `vars`, as a series in the
    /// remaining variables (the addressed slots are set to zero).
    pub fn coeff(&self, vars: &[(Var, i16)]) -> TruncSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| vars.iter().all(|(v, e)| m.0[v.0] == *e))
            .map(|(m, c)| {
                let mut m = *m;
                for (v, _) in vars {
                    m.0[v.0] = 0;
                }
                (m, c.clone())
            })
            .collect::<Vec<_>>();
        TruncSeries { layout: self.layout.clone(), spec: self.spec.clone(), terms }
    }

    /// Smallest exponent of the Laurent slot (0 if none or empty).
    pub fn laurent_min(&self) -> i32 {
        match self.layout.laurent_slot() {
            Some(s) => self.terms.iter().map(|(m, _)| m.0[s] as i32).min().unwrap_or(0).min(0),
            None => 0,
        }
    }

    /// True when no exponent is negative.
    pub fn is_honest(&self) -> bool {
        self.laurent_min() >= 0
    }

    fn min_block_degree(&self) -> i32 {
        let nb = self.layout.nblock();
        self.terms.iter().map(|(m, _)| m.block_degree(nb)).min().unwrap_or(0)
    }

    /// Maximal t-exponent present.
    pub fn t_degree(&self) -> i32 {
        self.terms.iter().map(|(m, _)| m.0[T] as i32).max().unwrap_or(0)
    }

    // ---- compatibility --------------------------------------------------

    fn combined_spec(&self, other: &TruncSeries) -> Result<TruncSpec> {
        if !same_layout(&self.layout, &other.layout) {
            return Err(Error::Config("operands have different variable layouts".into()));
        }
        self.spec.meet(&other.spec)
    }

    /// Drop terms beyond the (smaller) caps of `spec`.
    pub fn retruncate(&self, spec: &TruncSpec) -> Result<TruncSeries> {
        if spec.t_mode != self.spec.t_mode {
            return Err(Error::Config("retruncate cannot change the t-mode".into()));
        }
        if !self.spec.covers(spec) {
            return Err(Error::InsufficientTruncation(format!(
                "series known to (q {}, deg {}, z {}) but (q {}, deg {}, z {}) requested",
                self.spec.q_order, self.spec.u_degree, self.spec.z_order, spec.q_order, spec.u_degree, spec.z_order
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            check_shape(&self.layout, spec, m)?;
            if within_caps(&self.layout, spec, m) {
                terms.push((*m, c.clone()));
            }
        }
        Ok(TruncSeries { layout: self.layout.clone(), spec: spec.clone(), terms })
    }

    /// Re-express a series in another layout, matching variables by name.
    /// Variables missing from the target must not occur in any term.
    pub fn relayout(&self, layout: &Arc<Layout>) -> Result<TruncSeries> {
        let map: Vec<Option<usize>> =
            (0..self.layout.nslots()).map(|s| layout.var(self.layout.name(s)).ok().map(|v| v.0)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut out = Mono::ONE;
            for (s, d) in map.iter().enumerate() {
                match d {
                    Some(d) => out.0[*d] = m.0[s],
                    None if m.0[s] != 0 => {
                        return Err(Error::Config(format!(
                            "variable `{}` is not in the target layout",
                            self.layout.name(s)
                        )))
                    }
                    None => {}
                }
            }
            terms.push((out, c.clone()));
        }
        TruncSeries::from_terms(layout, &self.spec, terms)
    }

    // ---- ring operations ------------------------------------------------

    pub fn try_add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        let spec = self.combined_spec(other)?;
        Ok(self.merge(other, &spec, false))
    }

    pub fn try_sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        let spec = self.combined_spec(other)?;
        Ok(self.merge(other, &spec, true))
    }

    fn merge(&self, other: &TruncSeries, spec: &TruncSpec, negate: bool) -> TruncSeries {
        let keep = |m: &Mono| within_caps(&self.layout, spec, m);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = if i == a.len() {
                std::cmp::Ordering::Greater
            } else if j == b.len() {
                std::cmp::Ordering::Less
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match ord {
                std::cmp::Ordering::Less => {
                    if keep(&a[i].0) {
                        out.push(a[i].clone());
                    }
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if keep(&b[j].0) {
                        let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                        out.push((b[j].0, c));
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if keep(&a[i].0) {
                        let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                        if !c.is_zero() {
                            out.push((a[i].0, c));
                        }
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        TruncSeries { layout: self.layout.clone(), spec: spec.clone(), terms: out }
    }

    pub fn try_mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        let mut spec = self.combined_spec(other)?;
        let (va, vb) = (self.min_block_degree().min(0), other.min_block_degree().min(0));
        spec.u_degree = (self.spec.u_degree + vb).min(other.spec.u_degree + va).min(spec.u_degree);
        let layout = &self.layout;
        let nb = layout.nblock();
        let zs = layout.z_slot();
        let lslot = layout.laurent_slot();
        let (a, b) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        if a.terms.len() == 1 && a.terms[0].0 == Mono::ONE {
            return Ok(b.scale_to(&a.terms[0].1, &spec));
        }
        let binfo: Vec<(i32, i32, i32)> =
            b.terms.iter().map(|(m, _)| (m.0[Q] as i32, m.block_degree(nb), zs.map_or(0, |s| m.0[s] as i32))).collect();
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        acc.reserve(a.terms.len().max(b.terms.len()) * 2);
        for (ma, ca) in &a.terms {
            let qa = ma.0[Q] as i32;
            let da = ma.block_degree(nb);
            let za = zs.map_or(0, |s| ma.0[s] as i32);
            for ((mb, cb), &(qb, db, zb)) in b.terms.iter().zip(&binfo) {
                if qa + qb > spec.q_order {
                    break;
                }
                if da + db > spec.u_degree || za + zb > spec.z_order {
                    continue;
                }
                let m = ma.mul(mb);
                if let Some(s) = lslot {
                    if (m.0[s] as i32) < spec.laurent_floor {
                        return Err(Error::Config(format!(
                            "Laurent floor {} violated by {}",
                            spec.laurent_floor,
                            layout.format_mono(&m)
                        )));
                    }
                }
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(TruncSeries::from_map(layout, &spec, acc))
    }

    fn scale_to(&self, c: &Rational, spec: &TruncSpec) -> TruncSeries {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            self.terms.iter().filter(|(m, _)| within_caps(&self.layout, spec, m)).map(|(m, x)| (*m, x * c)).collect()
        };
        TruncSeries { layout: self.layout.clone(), spec: spec.clone(), terms }
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        self.scale_to(c, &self.spec)
    }

    pub fn scale_i(&self, c: i64) -> TruncSeries {
        self.scale(&Rational::from(c))
    }

    pub fn pow(&self, e: u32) -> TruncSeries {
        let mut acc = TruncSeries::one(&self.layout, &self.spec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiply by `v^k` and raise the matching cap by `k`; the exact inverse of
    /// [`TruncSeries::monomial_div`].
    pub fn shift(&self, v: Var, k: i16) -> TruncSeries {
        let mut spec = self.spec.clone();
        self.bump_cap(&mut spec, v, k as i32);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m = *m;
                m.0[v.0] += k;
                (m, c.clone())
            })
            .collect();
        TruncSeries { layout: self.layout.clone(), spec, terms }
    }

    fn bump_cap(&self, spec: &mut TruncSpec, v: Var, k: i32) {
        if v.0 == Q {
            spec.q_order += k;
        } else if self.layout.is_block(v) {
            spec.u_degree += k;
        } else if Some(v.0) == self.layout.z_slot() {
            spec.z_order += k;
        }
    }

    /// Divide every term by `v^k`. Terms that would leave the allowed exponent
    /// range make the division inexact; in strict mode that is an error, in
    /// lenient mode those terms are dropped and `exact` is false.
    pub fn monomial_div(&self, v: Var, k: i16, strict: bool) -> Result<Division> {
        let mut spec = self.spec.clone();
        self.bump_cap(&mut spec, v, -(k as i32));
        let lslot = self.layout.laurent_slot();
        let floor = if Some(v.0) == lslot { spec.laurent_floor } else { 0 };
        let mut exact = true;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (orig, c) in &self.terms {
            let mut m = *orig;
            m.0[v.0] -= k;
            if (m.0[v.0] as i32) < floor {
                if strict {
                    return Err(Error::Divisibility(format!(
                        "term {} {} not divisible by {}^{}",
                        c,
                        self.layout.format_mono(orig),
                        self.layout.name(v.0),
                        k
                    )));
                }
                exact = false;
                continue;
            }
            terms.push((m, c.clone()));
        }
        terms.sort_unstable_by_key(|a| a.0);
        Ok(Division { series: TruncSeries { layout: self.layout.clone(), spec, terms }, exact })
    }

    /// Strict division that must also leave an honest (non-Laurent) series.
    pub fn exact_div(&self, v: Var, k: i16) -> Result<TruncSeries> {
        let d = self.monomial_div(v, k, true)?;
        if !d.series.is_honest() {
            return Err(Error::Divisibility(format!(
                "quotient by {}^{} still has negative exponents",
                self.layout.name(v.0),
                k
            )));
        }
        Ok(d.series)
    }

    // ---- graded algorithms ----------------------------------------------

    /// Grade used by the recursive algorithms: q-exponent + block degree +
    /// z-exponent. Requires an honest series.
    fn graded(&self, what: &str) -> Result<Vec<Vec<(Mono, Rational)>>> {
        if !self.is_honest() {
            return Err(Error::Domain(format!("{what} of a Laurent series")));
        }
        let nb = self.layout.nblock();
        let zs = self.layout.z_slot();
        let gmax = self.max_grade();
        let mut buckets = vec![Vec::new(); gmax as usize + 1];
        for (m, c) in &self.terms {
            let g = m.0[Q] as i32 + m.block_degree(nb) + zs.map_or(0, |s| m.0[s] as i32);
            if g > gmax {
                continue;
            }
            buckets[g as usize].push((*m, c.clone()));
        }
        Ok(buckets)
    }

    fn max_grade(&self) -> i32 {
        let z = if self.layout.has_z() { self.spec.z_order } else { 0 };
        let d = if self.layout.nblock() > 0 { self.spec.u_degree } else { 0 };
        (self.spec.q_order + d + z).max(0)
    }

    /// Σ_{i in range} w(i) * a_i * b_{g-i}, truncated, accumulated into `acc`.
    fn convolve_into(
        &self,
        acc: &mut FxHashMap<Mono, Rational>,
        a: &[Vec<(Mono, Rational)>],
        b: &[Vec<(Mono, Rational)>],
        g: usize,
        i_range: std::ops::RangeInclusive<usize>,
        weight: impl Fn(usize) -> Rational,
    ) {
        for i in i_range {
            if i >= a.len() || g - i >= b.len() || a[i].is_empty() || b[g - i].is_empty() {
                continue;
            }
            let w = weight(i);
            if w.is_zero() {
                continue;
            }
            for (ma, ca) in &a[i] {
                let cw = ca * &w;
                for (mb, cb) in &b[g - i] {
                    let m = ma.mul(mb);
                    if !within_caps(&self.layout, &self.spec, &m) {
                        continue;
                    }
                    let c = &cw * cb;
                    match acc.get_mut(&m) {
                        Some(x) => *x += &c,
                        None => {
                            acc.insert(m, c);
                        }
                    }
                }
            }
        }
    }

    pub fn try_inverse(&self) -> Result<TruncSeries> {
        let a = self.graded("inverse")?;
        let c0 = self.constant_term();
        if c0.is_zero() || a[0].len() != 1 {
            return Err(Error::NonInvertible("constant term must be a nonzero rational (no pure-t part)".into()));
        }
        let inv0 = c0.recip();
        let neg = -&inv0;
        let mut b: Vec<Vec<(Mono, Rational)>> = vec![vec![(Mono::ONE, inv0)]];
        for g in 1..a.len() {
            let mut acc = FxHashMap::default();
            self.convolve_into(&mut acc, &a, &b, g, 1..=g, |_| neg.clone());
            b.push(sorted_nonzero(acc));
        }
        Ok(self.collect_buckets(b))
    }

    pub fn exp(&self) -> Result<TruncSeries> {
        let f = self.graded("exp")?;
        if !f[0].is_empty() {
            return Err(Error::Domain("exp needs zero constant term (and no pure-t part)".into()));
        }
        let mut e: Vec<Vec<(Mono, Rational)>> = vec![vec![(Mono::ONE, Rational::ONE)]];
        for g in 1..f.len() {
            let mut acc = FxHashMap::default();
            let inv_g = Rational::new(1, g as i64);
            self.convolve_into(&mut acc, &f, &e, g, 1..=g, |i| &Rational::from(i as i64) * &inv_g);
            e.push(sorted_nonzero(acc));
        }
        Ok(self.collect_buckets(e))
    }

    pub fn log(&self) -> Result<TruncSeries> {
        let a = self.graded("log")?;
        if a[0].len() != 1 || a[0][0].0 != Mono::ONE || !a[0][0].1.is_one() {
            return Err(Error::Domain("log needs constant term exactly 1".into()));
        }
        let mut l: Vec<Vec<(Mono, Rational)>> = vec![Vec::new()];
        for g in 1..a.len() {
            let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
            for (m, c) in &a[g] {
                acc.insert(*m, c.clone());
            }
            let inv_g = Rational::new(1, g as i64);
            let gg = g;
            if g >= 2 {
                self.convolve_into(&mut acc, &a, &l, g, 1..=g - 1, |i| &Rational::from(-((gg - i) as i64)) * &inv_g);
            }
            l.push(sorted_nonzero(acc));
        }
        Ok(self.collect_buckets(l))
    }

    fn collect_buckets(&self, buckets: Vec<Vec<(Mono, Rational)>>) -> TruncSeries {
        let mut terms: Vec<(Mono, Rational)> = buckets.into_iter().flatten().collect();
        terms.sort_unstable_by_key(|a| a.0);
        TruncSeries { layout: self.layout.clone(), spec: self.spec.clone(), terms }
    }

    // ---- substitutions ----------------------------------------------------

    /// Replace `z^k` by `q^k`. Needs z-order ≥ q-order.
    pub fn subst_z_to_q(&self) -> Result<TruncSeries> {
        let zs = match self.layout.z_slot() {
            Some(s) => s,
            None => return Ok(self.clone()),
        };
        if self.spec.z_order < self.spec.q_order {
            return Err(Error::InsufficientTruncation(format!(
                "z-order {} below q-order {}",
                self.spec.z_order, self.spec.q_order
            )));
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m = *m;
            m.0[Q] += m.0[zs];
            m.0[zs] = 0;
            (m, c.clone())
        });
        TruncSeries::from_terms(&self.layout, &self.spec, terms)
    }

    /// f(q z): the coefficient of z^m is multiplied by q^m.
    pub fn q_dilate_z(&self) -> TruncSeries {
        let zs = self.layout.z_slot().expect("series has no z");
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m = *m;
            m.0[Q] += m.0[zs];
            (m, c.clone())
        });
        TruncSeries::from_terms(&self.layout, &self.spec, terms).expect("dilation")
    }

    /// Substitute the block variables by `subs` (one series per block
    /// variable, all in a common target layout). Each substituted series must
    /// have block valuation ≥ 1 so that truncation stays exact. The target
    /// layout must carry the same z-variable status as the source.
    pub fn compose(&self, subs: &[TruncSeries]) -> Result<TruncSeries> {
        let nb = self.layout.nblock();
        if subs.len() != nb || nb == 0 {
            return Err(Error::Config(format!("compose needs {nb} substitutions")));
        }
        let target = subs[0].layout.clone();
        let mut spec = subs[0].spec.clone();
        for s in subs {
            spec = s.combined_spec(&subs[0])?.meet(&spec)?;
            if s.terms.iter().any(|(m, _)| m.block_degree(target.nblock()) < 1) || !s.is_honest() {
                return Err(Error::Domain("substituted series needs block valuation ≥ 1".into()));
            }
        }
        if target.has_z() != self.layout.has_z() {
            return Err(Error::Config("compose across different z-status".into()));
        }
        if !self.is_honest() {
            return Err(Error::Domain("compose of a Laurent series".into()));
        }
        let floor = spec.laurent_floor;
        spec = spec.meet(&self.spec)?;
        spec.laurent_floor = floor;
        let subs: Vec<TruncSeries> = subs.iter().map(|s| s.retruncate(&spec)).collect::<Result<_>>()?;
        let mut powers: Vec<Vec<TruncSeries>> =
            subs.iter().map(|s| vec![TruncSeries::one(&target, &spec), s.clone()]).collect();
        let zs_src = self.layout.z_slot();
        let zs_dst = target.z_slot();
        let mut acc = TruncSeries::zero(&target, &spec);
        // group terms by block exponent to share the expensive products
        let mut groups: std::collections::BTreeMap<Vec<i16>, Vec<(Mono, Rational)>> = Default::default();
        for (m, c) in &self.terms {
            let key = m.0[BLOCK..BLOCK + nb].to_vec();
            let mut rest = Mono::ONE;
            rest.0[Q] = m.0[Q];
            rest.0[T] = m.0[T];
            if let (Some(s), Some(d)) = (zs_src, zs_dst) {
                rest.0[d] = m.0[s];
            }
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        for (key, rest) in groups {
            if key.iter().map(|&e| e as i32).sum::<i32>() > spec.u_degree {
                continue;
            }
            let mut prod = TruncSeries::one(&target, &spec);
            for (i, &e) in key.iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    prod = &prod * &powers[i][e];
                }
            }
            let coeff = TruncSeries::from_terms(&target, &spec, rest)?;
            acc = &acc + &(&coeff * &prod);
        }
        Ok(acc)
    }

    // ---- comparison and text ---------------------------------------------

    /// Compare under the common caps; returns the first differing monomial.
    pub fn first_difference(&self, other: &TruncSeries) -> Result<Option<Mismatch>> {
        let spec = self.combined_spec(other)?;
        let a = self.retruncate(&spec)?;
        let b = other.retruncate(&spec)?;
        let d = a.try_sub(&b)?;
        Ok(d.terms.first().map(|(m, _)| Mismatch {
            monomial: self.layout.format_mono(m),
            lhs: a.coeff_at(m),
            rhs: b.coeff_at(m),
        }))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            s.push_str(&format!("{} {}\n", c, self.layout.format_mono(m)));
        }
        s
    }

    pub fn parse_text(layout: &Arc<Layout>, spec: &TruncSpec, text: &str) -> Result<TruncSeries> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (c, m) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("expected `<rational> <monomial>`: `{line}`")))?;
            let c: Rational = c.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            terms.push((layout.parse_mono(m)?, c));
        }
        TruncSeries::from_terms(layout, spec, terms)
    }
}

fn sorted_nonzero(acc: FxHashMap<Mono, Rational>) -> Vec<(Mono, Rational)> {
    let mut v: Vec<(Mono, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_unstable_by_key(|a| a.0);
    v
}

struct TPowers {
    t: Rational,
}

impl TPowers {
    fn new(mode: &TMode) -> Option<TPowers> {
        match mode {
            TMode::Symbolic => None,
            TMode::Value(t) => Some(TPowers { t: t.clone() }),
        }
    }

    fn get(&self, e: i16) -> Rational {
        self.t.pow(e as i32)
    }
}

fn check_shape(layout: &Layout, spec: &TruncSpec, m: &Mono) -> Result<()> {
    let lslot = layout.laurent_slot();
    for s in 0..crate::series::layout::MAX_VARS {
        let e = m.0[s];
        if s >= layout.nslots() {
            if e != 0 {
                return Err(Error::Config(format!("exponent in unused slot {s}")));
            }
            continue;
        }
        let lo = if Some(s) == lslot { spec.laurent_floor } else { 0 };
        if (e as i32) < lo {
            return Err(Error::Config(format!("exponent {} of {} below floor {}", e, layout.name(s), lo)));
        }
    }
    Ok(())
}

#[inline]
fn within_caps(layout: &Layout, spec: &TruncSpec, m: &Mono) -> bool {
    if m.0[Q] as i32 > spec.q_order {
        return false;
    }
    let nb = layout.nblock();
    if nb > 0 && m.block_degree(nb) > spec.u_degree {
        return false;
    }
    if let Some(z) = layout.z_slot() {
        if m.0[z] as i32 > spec.z_order {
            return false;
        }
    }
    true
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        same_layout(&self.layout, &other.layout) && self.terms == other.terms
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("{}*{}", c, self.layout.format_mono(m))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> $tr<&'a TruncSeries> for &'a TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: &TruncSeries) -> TruncSeries {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<TruncSeries> for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a TruncSeries> for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: &TruncSeries) -> TruncSeries {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<TruncSeries> for &'a TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                self.$m(&rhs)
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.scale(&Rational::from(-1))
    }
}

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        -&self
    }
}
