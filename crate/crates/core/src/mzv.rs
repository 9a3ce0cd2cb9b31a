//! Indices and brute-force evaluation of q-multiple zeta values,
//! q-multiple polylogarithms and their generating functions.
//!
//! All values are truncated at q-order `N` (and z-order `M` for polylogs).
//! Nested sums are evaluated with a suffix accumulator over dense q-series.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qkit::{binomial, q_stirling2};
use crate::series::{Layout, Mismatch, Mono, Rational, TruncSeries, TruncSpec};

// ---- indices ---------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Index> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Domain("an index is a nonempty list of positive integers".into()));
        }
        Ok(Index(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// `#{j : k_j ≥ i + 1}`.
    pub fn height(&self, i: u32) -> usize {
        self.0.iter().filter(|&&k| k > i).count()
    }

    pub fn is_admissible(&self) -> bool {
        self.0[0] >= 2
    }

    /// Membership in `I_j`: `k_1 ≥ j + 2`.
    pub fn in_level(&self, j: i32) -> bool {
        self.0[0] as i32 >= j + 2
    }

    /// Block exponents `u1^{k-l-Σh} u2^{l-h1} u3^{h1-h2} … u_{r+2}^{h_r}`.
    pub fn monomial(&self, r: usize) -> Vec<i16> {
        self.signature(r, -1).monomial()
    }

    pub fn signature(&self, r: usize, j: i32) -> IndexSignature {
        IndexSignature {
            k: self.weight(),
            l: self.depth() as u32,
            h: (1..=r as u32).map(|i| self.height(i) as u32).collect(),
            j,
        }
    }

    fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::Domain(format!("index ({self}) is not admissible: k1 ≥ 2 required")))
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl std::str::FromStr for Index {
    type Err = Error;
    fn from_str(s: &str) -> Result<Index> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad index `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }
}

/// Weight `k`, depth `l`, heights `h_1..h_r` and admissibility level `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSignature {
    pub k: u32,
    pub l: u32,
    pub h: Vec<u32>,
    pub j: i32,
}

impl IndexSignature {
    pub fn r(&self) -> usize {
        self.h.len()
    }

    /// Total block degree `k - Σh`.
    pub fn degree(&self) -> i32 {
        self.k as i32 - self.h.iter().sum::<u32>() as i32
    }

    pub fn monomial(&self) -> Vec<i16> {
        let r = self.r();
        let sh: u32 = self.h.iter().sum();
        let mut e = vec![0i16; r + 2];
        e[0] = self.k as i16 - self.l as i16 - sh as i16;
        let mut prev = self.l;
        for (i, &hi) in self.h.iter().enumerate() {
            e[i + 1] = prev as i16 - hi as i16;
            prev = hi;
        }
        e[r + 1] = prev as i16;
        e
    }

    pub fn with_level(&self, j: i32) -> IndexSignature {
        IndexSignature { j, ..self.clone() }
    }
}

/// All compositions of `k` into `l` parts with `k_1 ≥ j + 2` and the given
/// heights, in lexicographic order.
pub fn enumerate_indices(sig: &IndexSignature) -> Vec<Index> {
    let mut out = Vec::new();
    if sig.l == 0 || sig.k < sig.l {
        return out;
    }
    let mut cur = Vec::with_capacity(sig.l as usize);
    compositions(sig.k, sig.l, &mut cur, &mut |parts| {
        if (parts[0] as i32) < sig.j + 2 {
            return;
        }
        for (i, &hi) in sig.h.iter().enumerate() {
            if parts.iter().filter(|&&p| p > i as u32 + 1).count() != hi as usize {
                return;
            }
        }
        out.push(Index(parts.to_vec()));
    });
    out
}

fn compositions(k: u32, l: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if l == 0 {
        if k == 0 {
            f(cur);
        }
        return;
    }
    for first in 1..=k - (l - 1) {
        cur.push(first);
        compositions(k - first, l - 1, cur, f);
        cur.pop();
    }
}

/// Signatures at level `j` whose block monomial has degree ≤ `d`, with `k`
/// additionally capped by `weight_cap` when given. Includes only signatures
/// meeting the nonemptiness conditions `k ≥ l + Σh`, `l ≥ h_1 ≥ … ≥ h_r`
/// and `h_{j+1} ≥ 1` for `j ≥ 0`.
pub fn signatures(r: usize, j: i32, d: i32, weight_cap: Option<u32>) -> Vec<IndexSignature> {
    let mut out = Vec::new();
    for l in 1..=d.max(0) as u32 {
        let mut hs = Vec::new();
        heights(r, l, &mut Vec::new(), &mut hs);
        for h in hs {
            if j >= 0 && h[j as usize] < 1 {
                continue;
            }
            let sh: u32 = h.iter().sum();
            let kmax = match weight_cap {
                Some(w) => w,
                None => (d as u32) + sh,
            };
            for k in (l + sh)..=kmax {
                out.push(IndexSignature { k, l, h: h.clone(), j });
            }
        }
    }
    out
}

fn heights(r: usize, bound: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == r {
        out.push(cur.clone());
        return;
    }
    for h in 0..=bound {
        cur.push(h);
        heights(r, h, cur, out);
        cur.pop();
    }
}

// ---- dense q-series helpers -------------------------------------------------

type Dense = Vec<Rational>;

fn dzero(n: usize) -> Dense {
    vec![Rational::ZERO; n + 1]
}

fn dmul(a: &Dense, b: &Dense, n: usize) -> Dense {
    let mut out = dzero(n);
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += &(x * y);
            }
        }
    }
    out
}

fn dadd(acc: &mut Dense, a: &Dense) {
    for (x, y) in acc.iter_mut().zip(a) {
        if !y.is_zero() {
            *x += y;
        }
    }
}

fn dshift(a: &Dense, e: usize, n: usize) -> Dense {
    let mut out = dzero(n);
    for i in 0..=n {
        if i + e <= n {
            out[i + e] = a[i].clone();
        }
    }
    out
}

fn dscale(a: &Dense, c: &Rational) -> Dense {
    a.iter().map(|x| x * c).collect()
}

fn is_dzero(a: &Dense) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// `(1-q)^e` as a dense series.
fn one_minus_q_pow(e: u32, n: usize) -> Dense {
    let mut out = dzero(n);
    for (i, slot) in out.iter_mut().enumerate().take(e as usize + 1) {
        let c = binomial(e as i64, i as i64);
        *slot = if i % 2 == 0 { c } else { -c };
    }
    out
}

// ---- evaluation engine -----------------------------------------------------

/// Memoizing evaluator at fixed q-order `n` and z-order `m`.
pub struct MzvEngine {
    n: usize,
    m: usize,
    inv_pow: HashMap<(usize, u32), Dense>,
    zeta: HashMap<(Index, bool), Dense>,
    zeta_t: HashMap<Index, Vec<Dense>>,
    li: HashMap<Index, Vec<Dense>>,
    li_t: HashMap<Index, Vec<Vec<Dense>>>,
}

impl MzvEngine {
    pub fn new(q_order: i32, z_order: i32) -> MzvEngine {
        MzvEngine {
            n: q_order.max(0) as usize,
            m: z_order.max(0) as usize,
            inv_pow: HashMap::new(),
            zeta: HashMap::new(),
            zeta_t: HashMap::new(),
            li: HashMap::new(),
            li_t: HashMap::new(),
        }
    }

    /// `1/[m]^k`.
    fn inv_qint_pow(&mut self, m: usize, k: u32) -> Dense {
        if let Some(v) = self.inv_pow.get(&(m, k)) {
            return v.clone();
        }
        let n = self.n;
        let v = if k == 0 {
            let mut one = dzero(n);
            one[0] = Rational::ONE;
            one
        } else {
            // 1/[m] = (1 - q) Σ_j q^{mj}
            let mut base = dzero(n);
            let mut e = 0;
            while e <= n {
                base[e] += &Rational::ONE;
                if e < n {
                    base[e + 1] -= &Rational::ONE;
                }
                e += m;
            }
            let prev = self.inv_qint_pow(m, k - 1);
            dmul(&prev, &base, n)
        };
        self.inv_pow.insert((m, k), v.clone());
        v
    }

    /// Σ over `upper ≥ m_1 > … > m_l ≥ 1` (weak inequalities when `star`) of
    /// Π w_i(m_i) with `w_i(m) = q^{e_i m}/[m]^{k_i}`; returns the partial sums
    /// indexed by the top summation variable `m_1`.
    fn nested(&mut self, parts: &[u32], qpow: &[usize], upper: usize, star: bool) -> Vec<Dense> {
        let n = self.n;
        let l = parts.len();
        // cumulative sums of the inner tail, starting from the deepest part
        let mut cum: Vec<Dense> = vec![
            {
                let mut one = dzero(n);
                one[0] = Rational::ONE;
                one
            };
            upper + 1
        ];
        let mut top = vec![dzero(n); upper + 1];
        for i in (0..l).rev() {
            let mut level = vec![dzero(n); upper + 1];
            for m in 1..=upper {
                let e = qpow[i] * m;
                if e > n {
                    continue;
                }
                let inner = if i == l - 1 {
                    cum[0].clone()
                } else if star {
                    cum[m].clone()
                } else {
                    cum[m - 1].clone()
                };
                if is_dzero(&inner) {
                    continue;
                }
                let w = dshift(&self.inv_qint_pow(m, parts[i]), e, n);
                level[m] = dmul(&w, &inner, n);
            }
            if i == 0 {
                top = level;
            } else {
                let mut c = vec![dzero(n); upper + 1];
                for m in 1..=upper {
                    let mut s = c[m - 1].clone();
                    dadd(&mut s, &level[m]);
                    c[m] = s;
                }
                cum = c;
            }
        }
        top
    }

    pub fn zeta_dense(&mut self, idx: &Index, star: bool) -> Result<Dense> {
        idx.require_admissible()?;
        if let Some(v) = self.zeta.get(&(idx.clone(), star)) {
            return Ok(v.clone());
        }
        let qpow: Vec<usize> = idx.parts().iter().map(|&k| k as usize - 1).collect();
        let top = self.nested(idx.parts(), &qpow, self.n, star);
        let mut acc = dzero(self.n);
        for v in &top {
            dadd(&mut acc, v);
        }
        self.zeta.insert((idx.clone(), star), acc.clone());
        Ok(acc)
    }

    /// ζ_q^t as a list of dense q-series, one per power of t.
    pub fn zeta_t_dense(&mut self, idx: &Index) -> Result<Vec<Dense>> {
        idx.require_admissible()?;
        if let Some(v) = self.zeta_t.get(idx) {
            return Ok(v.clone());
        }
        let n = self.n;
        let l = idx.depth();
        let k = idx.weight();
        let mut out = vec![dzero(n); l];
        for filling in 0..3usize.pow(l as u32 - 1) {
            let (p, merges) = fill_boxes(idx.parts(), filling, 3);
            let p = Index::new(p)?;
            if !p.is_admissible() {
                return Err(Error::Structural(format!("box filling of ({idx}) gave ({p})")));
            }
            let z = self.zeta_dense(&p, false)?;
            let term = dmul(&one_minus_q_pow(k - p.weight(), n), &z, n);
            dadd(&mut out[merges], &term);
        }
        self.zeta_t.insert(idx.clone(), out.clone());
        Ok(out)
    }

    /// Coefficients of z^0..z^M of Li_k(z).
    pub fn li_dense(&mut self, idx: &Index) -> Vec<Dense> {
        if let Some(v) = self.li.get(idx) {
            return v.clone();
        }
        let qpow = vec![0; idx.depth()];
        let v = self.nested(idx.parts(), &qpow, self.m, false);
        self.li.insert(idx.clone(), v.clone());
        v
    }

    /// Li^t_k(z) as `[t-power][z-power]` dense q-series.
    pub fn li_t_dense(&mut self, idx: &Index) -> Vec<Vec<Dense>> {
        if let Some(v) = self.li_t.get(idx) {
            return v.clone();
        }
        let l = idx.depth();
        let mut out = vec![vec![dzero(self.n); self.m + 1]; l];
        for filling in 0..2usize.pow(l as u32 - 1) {
            let (p, merges) = fill_boxes(idx.parts(), filling, 2);
            let li = self.li_dense(&Index(p));
            for (mz, c) in li.iter().enumerate() {
                dadd(&mut out[merges][mz], c);
            }
        }
        self.li_t.insert(idx.clone(), out.clone());
        out
    }

    /// Li^t_k(q) as `[t-power]` dense q-series; needs z-order ≥ q-order.
    pub fn li_t_at_q_dense(&mut self, idx: &Index) -> Result<Vec<Dense>> {
        if self.m < self.n {
            return Err(Error::InsufficientTruncation(format!("z-order {} below q-order {}", self.m, self.n)));
        }
        let n = self.n;
        Ok(self
            .li_t_dense(idx)
            .into_iter()
            .map(|by_z| {
                let mut acc = dzero(n);
                for (mz, c) in by_z.iter().enumerate() {
                    dadd(&mut acc, &dshift(c, mz, n));
                }
                acc
            })
            .collect())
    }
}

/// Apply the `filling`-th assignment of box symbols (base 2: `,` / `+`;
/// base 3: `,` / `+` / `-1+`). Returns the new parts and the number of merges.
fn fill_boxes(parts: &[u32], mut filling: usize, base: usize) -> (Vec<u32>, usize) {
    let mut p = vec![parts[0]];
    let mut merges = 0;
    for &k in &parts[1..] {
        let sym = filling % base;
        filling /= base;
        match sym {
            0 => p.push(k),
            1 => {
                *p.last_mut().unwrap() += k;
                merges += 1;
            }
            _ => {
                *p.last_mut().unwrap() += k - 1;
                merges += 1;
            }
        }
    }
    (p, merges)
}

fn dense_terms(by_t: &[Dense], base: Mono) -> Vec<(Mono, Rational)> {
    let mut out = Vec::new();
    for (te, d) in by_t.iter().enumerate() {
        for (qe, c) in d.iter().enumerate() {
            if !c.is_zero() {
                let mut m = base;
                m.0[0] += qe as i16;
                m.0[1] += te as i16;
                out.push((m, c.clone()));
            }
        }
    }
    out
}

fn qt_spec(n: i32, spec_t: &TruncSpec) -> TruncSpec {
    TruncSpec::new(n, 0, 0).with_t(spec_t.t_mode.clone())
}

// ---- public value functions --------------------------------------------------

pub fn zeta_q(idx: &Index, n: i32) -> Result<TruncSeries> {
    let d = MzvEngine::new(n, 0).zeta_dense(idx, false)?;
    TruncSeries::from_terms(&Layout::qt(), &TruncSpec::new(n, 0, 0), dense_terms(&[d], Mono::ONE))
}

pub fn zeta_star_q(idx: &Index, n: i32) -> Result<TruncSeries> {
    let d = MzvEngine::new(n, 0).zeta_dense(idx, true)?;
    TruncSeries::from_terms(&Layout::qt(), &TruncSpec::new(n, 0, 0), dense_terms(&[d], Mono::ONE))
}

/// ζ_q^t via the three-way box expansion; `spec` supplies q-order and t-mode.
pub fn zeta_t_q(idx: &Index, spec: &TruncSpec) -> Result<TruncSeries> {
    let d = MzvEngine::new(spec.q_order, 0).zeta_t_dense(idx)?;
    TruncSeries::from_terms(&Layout::qt(), &qt_spec(spec.q_order, spec), dense_terms(&d, Mono::ONE))
}

fn z_series(by_t_z: &[Vec<Dense>], spec: &TruncSpec) -> Result<TruncSeries> {
    let layout = Layout::qtz();
    let zs = layout.z().0;
    let mut terms = Vec::new();
    for (te, by_z) in by_t_z.iter().enumerate() {
        for (ze, d) in by_z.iter().enumerate() {
            let base = Mono::ONE.with(zs, ze as i16).with(1, te as i16);
            terms.extend(dense_terms(std::slice::from_ref(d), base));
        }
    }
    TruncSeries::from_terms(&layout, spec, terms)
}

/// Li_k(z) in the `q, t, z` layout.
pub fn li_q(idx: &Index, spec: &TruncSpec) -> Result<TruncSeries> {
    let li = MzvEngine::new(spec.q_order, spec.z_order).li_dense(idx);
    z_series(&[li], spec)
}

pub fn li_t_q(idx: &Index, spec: &TruncSpec) -> Result<TruncSeries> {
    let li = MzvEngine::new(spec.q_order, spec.z_order).li_t_dense(idx);
    z_series(&li, spec)
}

/// Li^t_k(q) for an admissible index, through the z-series at z-order N.
pub fn li_t_at_q(idx: &Index, spec: &TruncSpec) -> Result<TruncSeries> {
    idx.require_admissible()?;
    let s = li_t_q(idx, &spec.clone().with_z_order(spec.q_order))?;
    let v = s.subst_z_to_q()?;
    v.relayout(&Layout::qt())
}

/// Σ_a C(k1-2,a1-2) Π C(kj-1,aj-1) (1-q)^{Σ(ki-ai)} ζ_q^t(a).
pub fn li_at_q_binomial_sum(idx: &Index, spec: &TruncSpec) -> Result<TruncSeries> {
    idx.require_admissible()?;
    let n = spec.q_order.max(0) as usize;
    let mut eng = MzvEngine::new(spec.q_order, 0);
    let parts = idx.parts();
    let l = parts.len();
    let mut acc = vec![dzero(n); l];
    let mut a = vec![0u32; l];
    fn rec(i: usize, parts: &[u32], a: &mut Vec<u32>, eng: &mut MzvEngine, acc: &mut [Dense], n: usize) -> Result<()> {
        if i == parts.len() {
            let mut c = Rational::ONE;
            let mut drop = 0;
            for (j, (&k, &aj)) in parts.iter().zip(a.iter()).enumerate() {
                let b =
                    if j == 0 { binomial(k as i64 - 2, aj as i64 - 2) } else { binomial(k as i64 - 1, aj as i64 - 1) };
                c = &c * &b;
                drop += k - aj;
            }
            let zt = eng.zeta_t_dense(&Index(a.clone()))?;
            let w = dscale(&one_minus_q_pow(drop, n), &c);
            for (te, z) in zt.iter().enumerate() {
                dadd(&mut acc[te], &dmul(&w, z, n));
            }
            return Ok(());
        }
        let lo = if i == 0 { 2 } else { 1 };
        for aj in lo..=parts[i] {
            a[i] = aj;
            rec(i + 1, parts, a, eng, acc, n)?;
        }
        Ok(())
    }
    rec(0, parts, &mut a, &mut eng, &mut acc, n)?;
    TruncSeries::from_terms(&Layout::qt(), &qt_spec(spec.q_order, spec), dense_terms(&acc, Mono::ONE))
}

// ---- q-difference operators ------------------------------------------------

/// Θ_q f = z 𝒟_q f: the coefficient of z^m is multiplied by [m].
pub fn theta_q(f: &TruncSeries) -> Result<TruncSeries> {
    let diff = f - &f.q_dilate_z();
    let inv = TruncSeries::one_minus_q(f.layout(), f.spec()).try_inverse()?;
    Ok(&diff * &inv)
}

/// 𝒟_q f = (f(z) - f(qz)) / ((1-q) z); the result is known to z-order M-1.
pub fn d_q(f: &TruncSeries) -> Result<TruncSeries> {
    let th = theta_q(f)?;
    let z = f.layout().z();
    th.monomial_div(z, 1, true)
        .map(|d| d.series)
        .map_err(|e| Error::Domain(format!("f(z) - f(qz) not divisible by z: {e}")))
}

// ---- brute-force generating functions ----------------------------------------

fn block_mono(layout: &Arc<Layout>, e: &[i16]) -> Mono {
    let mut m = Mono::ONE;
    for (i, &x) in e.iter().enumerate() {
        m.0[layout.block_var(i + 1).0] = x;
    }
    m
}

/// Ψ_0^t = Σ ξ_0^t(k,l,h) u1^{k-l-Σh} u2^{l-h1} … u_{r+2}^{h_r} in the
/// `u(r)` layout. Only signatures of degree ≤ D can survive, and those have
/// weight ≤ (r+1)D; `weight_cap` overrides the per-signature weight bound.
pub fn psi0_brute(r: usize, spec: &TruncSpec, weight_cap: Option<u32>) -> Result<TruncSeries> {
    let layout = Layout::u(r);
    let mut eng = MzvEngine::new(spec.q_order, 0);
    let mut terms = Vec::new();
    let bound = (r as u32 + 1) * spec.u_degree.max(0) as u32;
    for sig in signatures(r, 0, spec.u_degree, weight_cap) {
        if weight_cap.is_none() && sig.k > bound {
            return Err(Error::Structural(format!("signature weight {} above (r+1)D = {bound}", sig.k)));
        }
        let base = block_mono(&layout, &sig.monomial());
        for idx in enumerate_indices(&sig) {
            terms.extend(dense_terms(&eng.zeta_t_dense(&idx)?, base));
        }
    }
    TruncSeries::from_terms(&layout, spec, terms)
}

/// G_j^t(k,l,h; z) = Σ_{k ∈ I_j(k,l,h)} Li^t_k(z) in the `q, t, z` layout,
/// with G^t(0,…,0; z) = 1 at level −1.
pub fn g_brute(sig: &IndexSignature, spec: &TruncSpec) -> Result<TruncSeries> {
    let mut eng = MzvEngine::new(spec.q_order, spec.z_order);
    g_brute_with(&mut eng, sig, spec)
}

pub fn g_brute_with(eng: &mut MzvEngine, sig: &IndexSignature, spec: &TruncSpec) -> Result<TruncSeries> {
    let layout = Layout::qtz();
    if sig.k == 0 && sig.l == 0 && sig.h.iter().all(|&h| h == 0) && sig.j <= -1 {
        return Ok(TruncSeries::one(&layout, spec));
    }
    let mut acc: Vec<Vec<Dense>> = Vec::new();
    for idx in enumerate_indices(sig) {
        let li = eng.li_t_dense(&idx);
        if acc.len() < li.len() {
            acc.resize(li.len(), vec![dzero(eng.n); eng.m + 1]);
        }
        for (te, by_z) in li.iter().enumerate() {
            for (ze, d) in by_z.iter().enumerate() {
                dadd(&mut acc[te][ze], d);
            }
        }
    }
    z_series(&acc, spec)
}

/// Φ_j^t(z) = Σ G_j^t(k,l,h; z) x-monomial in the `x(r, z)` layout, or its
/// value at z = q in the `x(r)` layout when `at_q` is set.
pub fn phi_brute(r: usize, j: i32, spec: &TruncSpec, at_q: bool) -> Result<TruncSeries> {
    if j < -1 || j > r as i32 - 1 {
        return Err(Error::Domain(format!("level j = {j} outside -1..={}", r as i32 - 1)));
    }
    let layout = Layout::x(r, !at_q);
    let m = if at_q { spec.q_order } else { spec.z_order };
    let mut eng = MzvEngine::new(spec.q_order, m);
    let mut terms = Vec::new();
    if j == -1 {
        terms.push((Mono::ONE, Rational::ONE));
    }
    let zs = layout.z_slot();
    for sig in signatures(r, j, spec.u_degree, None) {
        let base = block_mono(&layout, &sig.monomial());
        for idx in enumerate_indices(&sig) {
            if at_q {
                terms.extend(dense_terms(&eng.li_t_at_q_dense(&idx)?, base));
            } else {
                for (te, by_z) in eng.li_t_dense(&idx).iter().enumerate() {
                    for (ze, d) in by_z.iter().enumerate() {
                        let b = base.with(zs.unwrap(), ze as i16).with(1, te as i16);
                        terms.extend(dense_terms(std::slice::from_ref(d), b));
                    }
                }
            }
        }
    }
    TruncSeries::from_terms(&layout, spec, terms)
}

// ---- difference relations ------------------------------------------------------

fn div_z(f: &TruncSeries) -> Result<TruncSeries> {
    Ok(f.monomial_div(f.layout().z(), 1, true)?.series)
}

fn geometric_z(layout: &Arc<Layout>, spec: &TruncSpec) -> Result<TruncSeries> {
    let one = TruncSeries::one(layout, spec);
    (&one - &TruncSeries::var(layout, spec, layout.z())).try_inverse()
}

/// 𝒟_q Li^t_k = (1/z) Li^t_{(k1-1,…)} for k1 ≥ 2,
/// (t/z + 1/(1-z)) Li^t_{(k2,…)} for k1 = 1 < l, and 1/(1-z) for k = (1).
pub fn polylog_difference_relation(idx: &Index, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let lhs = d_q(&li_t_q(idx, spec)?)?;
    let p = idx.parts();
    let layout = lhs.layout().clone();
    let rhs = if p[0] >= 2 {
        let mut q = p.to_vec();
        q[0] -= 1;
        div_z(&li_t_q(&Index(q), spec)?)?
    } else if p.len() >= 2 {
        let tail = li_t_q(&Index(p[1..].to_vec()), spec)?;
        let t = TruncSeries::t(&layout, spec);
        &(&t * &div_z(&tail)?) + &(&geometric_z(&layout, spec)? * &tail)
    } else {
        geometric_z(&layout, spec)?
    };
    lhs.first_difference(&rhs)
}

/// The three clauses of the difference relations among the G_j^t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GClause {
    TopLevel,
    Consecutive(i32),
    Bottom,
}

fn sig_with(sig: &IndexSignature, dk: i32, dl: i32, dh: Option<usize>, j: i32) -> Option<IndexSignature> {
    let k = sig.k as i32 + dk;
    let l = sig.l as i32 + dl;
    let mut h = sig.h.clone();
    if let Some(i) = dh {
        if h[i] == 0 {
            return None;
        }
        h[i] -= 1;
    }
    if k < 0 || l < 0 {
        return None;
    }
    Some(IndexSignature { k: k as u32, l: l as u32, h, j })
}

/// Whether a clause applies to a signature (its stated preconditions).
pub fn g_clause_applies(clause: GClause, sig: &IndexSignature) -> bool {
    let r = sig.r();
    let sh: u32 = sig.h.iter().sum();
    let mono = sig.l >= sig.h.first().copied().unwrap_or(0) && sig.h.windows(2).all(|w| w[0] >= w[1]);
    if sig.k < sig.l + sh || !mono {
        return false;
    }
    match clause {
        GClause::TopLevel => sig.h.iter().all(|&h| h >= 1),
        GClause::Consecutive(j) => j >= 0 && j <= r as i32 - 2 && sig.h[j as usize] >= 1,
        GClause::Bottom => sig.l >= 2,
    }
}

pub fn g_difference_relation(
    eng: &mut MzvEngine,
    clause: GClause,
    sig: &IndexSignature,
    spec: &TruncSpec,
) -> Result<Option<Mismatch>> {
    let r = sig.r() as i32;
    let mut g = |s: Option<IndexSignature>| -> Result<TruncSeries> {
        match s {
            Some(s) => g_brute_with(eng, &s, spec),
            None => Ok(TruncSeries::zero(&Layout::qtz(), spec)),
        }
    };
    let (lhs, rhs) = match clause {
        GClause::TopLevel => {
            let last = sig.h.len() - 1;
            let lhs = d_q(&g(Some(sig.with_level(r - 1)))?)?;
            let sum = &(&g(sig_with(sig, -1, 0, None, r - 1))? + &g(sig_with(sig, -1, 0, Some(last), r - 2))?)
                - &g(sig_with(sig, -1, 0, Some(last), r - 1))?;
            (lhs, div_z(&sum)?)
        }
        GClause::Consecutive(j) => {
            let a = g(Some(sig.with_level(j)))?;
            let b = g(Some(sig.with_level(j + 1)))?;
            let lhs = d_q(&(&a - &b))?;
            let hi = j as usize;
            let sum = &g(sig_with(sig, -1, 0, Some(hi), j - 1))? - &g(sig_with(sig, -1, 0, Some(hi), j))?;
            (lhs, div_z(&sum)?)
        }
        GClause::Bottom => {
            let a = g(Some(sig.with_level(-1)))?;
            let b = g(Some(sig.with_level(0)))?;
            let lhs = d_q(&(&a - &b))?;
            let base = g(sig_with(sig, -1, -1, None, -1))?;
            let layout = base.layout().clone();
            let t = TruncSeries::t(&layout, spec);
            let rhs = &(&t * &div_z(&base)?) + &(&geometric_z(&layout, spec)? * &base);
            (lhs, rhs)
        }
    };
    lhs.first_difference(&rhs)
}

/// The order-(r+1) q-difference equation satisfied by y0 = Φ_{r-1}^t(z):
/// returns the first mismatch between L y0 and x_{r+2} z.
pub fn top_level_equation_relation(r: usize, spec: &TruncSpec) -> Result<Option<Mismatch>> {
    let y0 = phi_brute(r, r as i32 - 1, spec, false)?;
    let layout = y0.layout().clone();
    let x = |i: usize| TruncSeries::var(&layout, spec, layout.block_var(i));
    let t = TruncSeries::t(&layout, spec);
    let one = TruncSeries::one(&layout, spec);
    let z = TruncSeries::var(&layout, spec, layout.z());
    let mut th = vec![y0];
    for _ in 0..=r {
        let next = theta_q(th.last().unwrap())?;
        th.push(next);
    }
    let d = |j: usize| &x(r + 2 - j) - &(&x(1) * &x(r + 1 - j));
    let mut tail = TruncSeries::zero(&layout, spec);
    for (j, thj) in th.iter().enumerate().take(r) {
        tail = &tail + &(&d(j) * thj);
    }
    let first = &(&th[r + 1] - &(&(&x(1) + &(&t * &x(2))) * &th[r])) - &(&t * &tail);
    let omt = &one - &t;
    let second = &(&th[r + 1] + &(&(&(&omt * &x(2)) - &x(1)) * &th[r])) + &(&omt * &tail);
    let lhs = &first - &(&z * &second);
    lhs.first_difference(&(&x(r + 2) * &z))
}

/// Θ_q^n f against Σ_m S_q(n,m) z^m 𝒟_q^m f.
pub fn theta_stirling_relation(n: usize, f: &TruncSeries) -> Result<Option<Mismatch>> {
    let layout = f.layout().clone();
    let z = layout.z();
    let mut lhs = f.clone();
    for _ in 0..n {
        lhs = theta_q(&lhs)?;
    }
    let mut rhs = TruncSeries::zero(&layout, f.spec());
    let mut dm = f.clone();
    for m in 0..=n {
        if m > 0 {
            dm = d_q(&dm)?;
        }
        let s = q_stirling2(n as i64, m as i64).to_series(&layout, f.spec());
        rhs = &rhs + &(&s * &dm.shift(z, m as i16));
    }
    lhs.first_difference(&rhs)
}

// ---- sums over index families ---------------------------------------------------

/// All admissible indices of weight `k` and depth `l`, lexicographic.
pub fn admissible_indices(k: u32, l: u32) -> Vec<Index> {
    let mut out = Vec::new();
    if l == 0 || k < l {
        return out;
    }
    compositions(k, l, &mut Vec::new(), &mut |p| {
        if p[0] >= 2 {
            out.push(Index(p.to_vec()));
        }
    });
    out
}

/// `Σ ζ_q^t(k)` over the given indices, in the `q, t` layout.
pub fn zeta_t_sum<'a>(indices: impl IntoIterator<Item = &'a Index>, spec: &TruncSpec) -> Result<TruncSeries> {
    let n = spec.q_order.max(0) as usize;
    let mut eng = MzvEngine::new(spec.q_order, 0);
    let mut acc: Vec<Dense> = Vec::new();
    for idx in indices {
        let z = eng.zeta_t_dense(idx)?;
        if acc.len() < z.len() {
            acc.resize(z.len(), dzero(n));
        }
        for (a, d) in acc.iter_mut().zip(&z) {
            dadd(a, d);
        }
    }
    TruncSeries::from_terms(&Layout::qt(), &qt_spec(spec.q_order, spec), dense_terms(&acc, Mono::ONE))
}

/// `Σ_{k ≤ max_weight} Σ_{k ∈ I_0(k,l,(l))} ζ_q^t(k) u1^{k-2l} u3^l` in the
/// `u(1)` layout.
pub fn fullheight_brute(max_weight: u32, spec: &TruncSpec) -> Result<TruncSeries> {
    let layout = Layout::u(1);
    let mut eng = MzvEngine::new(spec.q_order, 0);
    let mut terms = Vec::new();
    for k in 2..=max_weight {
        for l in 1..=k / 2 {
            let sig = IndexSignature { k, l, h: vec![l], j: 0 };
            let base = block_mono(&layout, &sig.monomial());
            for idx in enumerate_indices(&sig) {
                terms.extend(dense_terms(&eng.zeta_t_dense(&idx)?, base));
            }
        }
    }
    TruncSeries::from_terms(&layout, spec, terms)
}
