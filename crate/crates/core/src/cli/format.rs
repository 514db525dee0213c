use serde::Serialize;

use super::{CliError, SweepConfig};

/// Significant digits written for every output value.
pub const SIG_DIGITS: usize = 12;

/// Decimal rendering with [`SIG_DIGITS`] significant digits, trailing zeros
/// trimmed; exponent notation outside `1e-4 ≤ |x| < 1e12`. `-0` prints as `0`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Named columns and ordered numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Fails on the first non-finite value, naming its row and column.
    pub fn check_finite(&self) -> Result<(), CliError> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(CliError::Invariant(format!(
                    "non-finite value {v} in row {i}, column `{}`",
                    self.columns[j]
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_sig(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, config: &SweepConfig) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            config: &'a SweepConfig,
            columns: &'a [String],
            rows: Vec<Vec<f64>>,
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| format_sig(v).parse().expect("formatted number parses"))
                    .collect()
            })
            .collect();
        let doc = Doc {
            config,
            columns: &self.columns,
            rows,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable document");
        s.push('\n');
        s
    }
}
