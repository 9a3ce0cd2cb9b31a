use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

/// Outcome of one case. A failing report always names a witness monomial.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub case: String,
    pub r: Option<usize>,
    pub u_degree: i32,
    pub q_order: i32,
    pub z_order: i32,
    pub t: String,
    pub max_weight: Option<u32>,
    pub status: Status,
    pub location: Option<String>,
    pub witness_monomial: Option<String>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub error_kind: Option<String>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl Summary {
    pub fn of(reports: &[CheckReport]) -> Summary {
        let mut s = Summary::default();
        for r in reports {
            match r.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Error => s.errors += 1,
            }
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn params(r: &CheckReport) -> String {
    let mut s = String::new();
    if let Some(rv) = r.r {
        s.push_str(&format!("r={rv} "));
    }
    s.push_str(&format!("D={} N={} M={} t={}", r.u_degree, r.q_order, r.z_order, r.t));
    if let Some(w) = r.max_weight {
        s.push_str(&format!(" w={w}"));
    }
    s
}

pub fn render_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{:<5} {:<12} {:<28} {}", r.status.tag(), r.check, r.case, params(r)));
        if let Some(ms) = r.wall_ms {
            out.push_str(&format!(" [{ms:.1} ms]"));
        }
        out.push('\n');
        match r.status {
            Status::Pass => {}
            Status::Fail => {
                let at = r.location.as_deref().map(|l| format!("{l}: ")).unwrap_or_default();
                out.push_str(&format!(
                    "      {at}first difference at {}: lhs {} rhs {}\n",
                    r.witness_monomial.as_deref().unwrap_or("?"),
                    r.lhs.as_deref().unwrap_or("?"),
                    r.rhs.as_deref().unwrap_or("?")
                ));
            }
            Status::Error => out.push_str(&format!("      {}\n", r.error.as_deref().unwrap_or(""))),
        }
    }
    let s = Summary::of(reports);
    out.push_str(&format!("{} passed, {} failed, {} errors\n", s.passed, s.failed, s.errors));
    out
}

#[derive(Serialize)]
struct JsonOut<'a> {
    reports: &'a [CheckReport],
    summary: Summary,
}

pub fn render_json(reports: &[CheckReport]) -> String {
    let doc = JsonOut { reports, summary: Summary::of(reports) };
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

pub fn render(reports: &[CheckReport], format: Format) -> String {
    match format {
        Format::Text => render_text(reports),
        Format::Json => render_json(reports),
    }
}
