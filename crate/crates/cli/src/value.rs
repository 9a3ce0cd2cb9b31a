use clap::ValueEnum;
use qzv_core::mzv::{li_t_at_q, zeta_q, zeta_star_q, zeta_t_q, Index};
use qzv_core::{Error, Result, TMode, TruncSeries, TruncSpec};
use serde::Serialize;

use crate::report::Format;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ValueKind {
    #[default]
    ZetaT,
    Zeta,
    ZetaStar,
    LiTAtQ,
}

impl ValueKind {
    fn as_str(self) -> &'static str {
        match self {
            ValueKind::ZetaT => "zeta-t",
            ValueKind::Zeta => "zeta",
            ValueKind::ZetaStar => "zeta-star",
            ValueKind::LiTAtQ => "li-t-at-q",
        }
    }
}

/// Parse `2,1` and insist on admissibility (first entry at least 2).
pub fn parse_admissible(text: &str) -> Result<Index> {
    let idx: Index = text.parse()?;
    if !idx.is_admissible() {
        return Err(Error::Config(format!("index ({idx}) is not admissible: the first entry must be at least 2")));
    }
    Ok(idx)
}

pub fn compute(kind: ValueKind, idx: &Index, q_order: i32, t: &TMode) -> Result<TruncSeries> {
    let spec = TruncSpec::new(q_order, 0, 0).with_t(t.clone());
    match kind {
        ValueKind::ZetaT => zeta_t_q(idx, &spec),
        ValueKind::Zeta => zeta_q(idx, q_order),
        ValueKind::ZetaStar => zeta_star_q(idx, q_order),
        ValueKind::LiTAtQ => li_t_at_q(idx, &spec),
    }
}

#[derive(Serialize)]
struct Term {
    coefficient: String,
    monomial: String,
}

#[derive(Serialize)]
struct ValueOut {
    kind: &'static str,
    index: String,
    q_order: i32,
    t: String,
    terms: Vec<Term>,
}

pub fn render_value(kind: ValueKind, idx: &Index, q_order: i32, t: &TMode, s: &TruncSeries, f: Format) -> String {
    match f {
        Format::Text => s.to_text(),
        Format::Json => {
            let terms = s
                .terms()
                .iter()
                .map(|(m, c)| Term { coefficient: c.to_string(), monomial: s.layout().format_mono(m) })
                .collect();
            let t = match t {
                TMode::Symbolic => "symbolic".to_string(),
                TMode::Value(v) => v.to_string(),
            };
            let out = ValueOut { kind: kind.as_str(), index: idx.to_string(), q_order, t, terms };
            let mut s = serde_json::to_string_pretty(&out).expect("value serializes");
            s.push('\n');
            s
        }
    }
}
