//! Variable layouts, exponent vectors and truncation specs.
//!
//! Every series carries a layout listing its variables in the fixed slot order
//! `q, t, <block variables>, z`. The block (the `u` or `x` variables) is
//! truncated by total degree; its first slot may be designated Laurent.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::rational::Rational;

pub const MAX_VARS: usize = 12;
pub const Q: usize = 0;
pub const T: usize = 1;
pub const BLOCK: usize = 2;

/// Exponent vector in slot order. The derived ordering is the canonical term
/// order: lexicographic in (q, t, block..., z).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [i16; MAX_VARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAX_VARS]);

    #[inline]
    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = [0i16; MAX_VARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i] + other.0[i];
        }
        Mono(out)
    }

    #[inline]
    pub fn block_degree(&self, nblock: usize) -> i32 {
        self.0[BLOCK..BLOCK + nblock].iter().map(|&e| e as i32).sum()
    }

    pub fn with(mut self, slot: usize, e: i16) -> Mono {
        self.0[slot] = e;
        self
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A variable, identified by its slot in the exponent vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    block: Vec<String>,
    laurent: bool,
    has_z: bool,
}

impl Layout {
    pub fn new(block: Vec<String>, laurent: bool, has_z: bool) -> Arc<Layout> {
        assert!(block.len() + 3 <= MAX_VARS, "too many block variables");
        assert!(!laurent || !block.is_empty(), "Laurent slot needs a block variable");
        Arc::new(Layout { block, laurent, has_z })
    }

    /// `q, t, u1..u_{r+2}` with `u1` Laurent.
    pub fn u(r: usize) -> Arc<Layout> {
        Layout::new((1..=r + 2).map(|i| format!("u{i}")).collect(), true, false)
    }

    /// `q, t, x1..x_{r+2}` with `x1` Laurent, optionally with `z`.
    pub fn x(r: usize, has_z: bool) -> Arc<Layout> {
        Layout::new((1..=r + 2).map(|i| format!("x{i}")).collect(), true, has_z)
    }

    /// `q, t` only.
    pub fn qt() -> Arc<Layout> {
        Layout::new(Vec::new(), false, false)
    }

    /// `q, t, z`.
    pub fn qtz() -> Arc<Layout> {
        Layout::new(Vec::new(), false, true)
    }

    pub fn nblock(&self) -> usize {
        self.block.len()
    }

    pub fn has_z(&self) -> bool {
        self.has_z
    }

    pub fn laurent_slot(&self) -> Option<usize> {
        self.laurent.then_some(BLOCK)
    }

    pub fn z_slot(&self) -> Option<usize> {
        self.has_z.then_some(BLOCK + self.block.len())
    }

    pub fn nslots(&self) -> usize {
        BLOCK + self.block.len() + usize::from(self.has_z)
    }

    /// The `i`-th block variable, 1-based (`block(1)` is `u1`/`x1`).
    pub fn block_var(&self, i: usize) -> Var {
        assert!(i >= 1 && i <= self.block.len(), "block variable {i} out of range");
        Var(BLOCK + i - 1)
    }

    pub fn z(&self) -> Var {
        Var(self.z_slot().expect("layout has no z"))
    }

    pub fn name(&self, slot: usize) -> &str {
        if slot == Q {
            "q"
        } else if slot == T {
            "t"
        } else if slot < BLOCK + self.block.len() {
            &self.block[slot - BLOCK]
        } else if Some(slot) == self.z_slot() {
            "z"
        } else {
            panic!("slot {slot} not in layout")
        }
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        (0..self.nslots())
            .find(|&s| self.name(s) == name)
            .map(Var)
            .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))
    }

    pub fn is_block(&self, v: Var) -> bool {
        v.0 >= BLOCK && v.0 < BLOCK + self.block.len()
    }

    /// Render a monomial as `q^3*t^2*u1^-1`, or `1` for the empty monomial.
    pub fn format_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for s in 0..self.nslots() {
            let e = m.0[s];
            match e {
                0 => {}
                1 => parts.push(self.name(s).to_string()),
                _ => parts.push(format!("{}^{}", self.name(s), e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn parse_mono(&self, s: &str) -> Result<Mono> {
        let s = s.trim();
        let mut m = Mono::ONE;
        if s == "1" {
            return Ok(m);
        }
        for factor in s.split('*') {
            let (name, e) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<i16>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?),
                None => (factor, 1),
            };
            let v = self.var(name.trim())?;
            m.0[v.0] += e;
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TMode {
    Symbolic,
    Value(Rational),
}

/// Truncation bounds: q-exponent ≤ `q_order`, signed block degree ≤
/// `u_degree`, z-exponent ≤ `z_order`; the Laurent slot may go down to
/// `laurent_floor`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSpec {
    pub q_order: i32,
    pub u_degree: i32,
    pub z_order: i32,
    pub t_mode: TMode,
    pub laurent_floor: i32,
}

impl TruncSpec {
    pub fn new(q_order: i32, u_degree: i32, z_order: i32) -> TruncSpec {
        TruncSpec { q_order, u_degree, z_order, t_mode: TMode::Symbolic, laurent_floor: 0 }
    }

    pub fn with_t(mut self, t: TMode) -> TruncSpec {
        self.t_mode = t;
        self
    }

    pub fn with_t_value(self, t: Rational) -> TruncSpec {
        self.with_t(TMode::Value(t))
    }

    pub fn with_floor(mut self, floor: i32) -> TruncSpec {
        self.laurent_floor = floor;
        self
    }

    pub fn with_u_degree(mut self, d: i32) -> TruncSpec {
        self.u_degree = d;
        self
    }

    pub fn with_q_order(mut self, n: i32) -> TruncSpec {
        self.q_order = n;
        self
    }

    pub fn with_z_order(mut self, m: i32) -> TruncSpec {
        self.z_order = m;
        self
    }

    /// Componentwise minimum; fails when the t-modes differ.
    pub fn meet(&self, other: &TruncSpec) -> Result<TruncSpec> {
        if self.t_mode != other.t_mode {
            return Err(Error::Config(format!("t-mode mismatch: {:?} vs {:?}", self.t_mode, other.t_mode)));
        }
        Ok(TruncSpec {
            q_order: self.q_order.min(other.q_order),
            u_degree: self.u_degree.min(other.u_degree),
            z_order: self.z_order.min(other.z_order),
            t_mode: self.t_mode.clone(),
            laurent_floor: self.laurent_floor.min(other.laurent_floor),
        })
    }

    /// True when every bound of `self` is at least the matching bound of `other`.
    pub fn covers(&self, other: &TruncSpec) -> bool {
        self.q_order >= other.q_order && self.u_degree >= other.u_degree && self.z_order >= other.z_order
    }
}
