//! `report.json` and `table.csv` writers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::ToyConfig;
use crate::error::{Error, Result};
use crate::selection::{GridSpec, SelectionReport};

/// Resolved settings of a `select` run, as recorded in `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Dataset path, or `"generated"` for an inline toy dataset.
    pub data: String,
    pub toy: ToyConfig,
    pub grid: GridSpec,
    /// Where the reference direction came from.
    pub reference: String,
    pub out_dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub config: RunConfig,
    pub reference_mbm: Vec<f64>,
    #[serde(flatten)]
    pub report: SelectionReport,
}

impl ReportFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Formats like C's `%g`: six significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |x| < 1e6`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One row per candidate: `lambda,delta,eta,zeta,mbm_1,...,mbm_p`. A
/// degenerate full fit leaves the map columns empty.
pub fn table_csv(report: &SelectionReport, p: usize) -> String {
    let mut out = String::from("lambda,delta,eta,zeta");
    for j in 1..=p {
        out.push_str(&format!(",mbm_{j}"));
    }
    out.push('\n');
    for c in &report.candidates {
        let mut fields = vec![format_g6(c.lambda), format_g6(c.delta), format_g6(c.eta), format_g6(c.zeta)];
        match &c.full_fit_mbm {
            Some(m) => fields.extend(m.direction().iter().map(|&v| format_g6(v))),
            None => fields.extend(std::iter::repeat_n(String::new(), p)),
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
