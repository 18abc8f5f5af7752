//! Named scalar results with quadrature error estimates and three-way
//! verdicts, plus JSON/CSV serialization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    IdentityOk,
    InequalityOk,
    Violated,
    /// A strict-inequality claim whose value fell inside the quadrature
    /// error dead-band: the discretization cannot resolve the sign.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::IdentityOk => "identity_ok",
            Verdict::InequalityOk => "inequality_ok",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Echo of the inputs a functional was evaluated with.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub name: String,
    pub value: f64,
    pub quadrature_error: f64,
    pub inputs: ReportInputs,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FunctionalReport {
    pub fn new(name: &str, value: f64, quadrature_error: f64, verdict: Verdict) -> Self {
        Self {
            name: name.to_string(),
            value,
            quadrature_error,
            inputs: ReportInputs::default(),
            verdict,
            note: None,
        }
    }

    /// Verdict for an identity claim (expected value 0).
    pub fn identity(name: &str, value: f64, quad_err: f64, abs_tol: f64) -> Self {
        let verdict = if value.abs() <= quad_err.max(abs_tol) {
            Verdict::IdentityOk
        } else {
            Verdict::Violated
        };
        Self::new(name, value, quad_err, verdict)
    }

    /// Verdict for a strict-inequality claim (expected value > 0), with the
    /// quadrature error as the dead-band.
    pub fn strict_inequality(name: &str, value: f64, quad_err: f64) -> Self {
        let verdict = if value.abs() <= quad_err {
            Verdict::Inconclusive
        } else if value > 0.0 {
            Verdict::InequalityOk
        } else {
            Verdict::Violated
        };
        Self::new(name, value, quad_err, verdict)
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.inputs.eps = Some(eps);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.inputs.k = Some(k);
        self
    }

    pub fn with_manifold(mut self, tag: String) -> Self {
        self.inputs.manifold = Some(tag);
        self
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    /// One CSV row: name, value, error, verdict.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{}",
            self.name, self.value, self.quadrature_error, self.verdict
        )
    }
}

/// CSV summary for a batch of reports, header included.
pub fn reports_to_csv(reports: &[FunctionalReport]) -> String {
    let mut out = String::from("name,value,quadrature_error,verdict\n");
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
