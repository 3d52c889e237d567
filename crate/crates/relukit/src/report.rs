//! Tabular check results: one row per verified inequality or budget, with
//! the two sides, the margin and a verdict.

use std::io::Write;

/// One verified statement. `margin = rhs − lhs` (nonnegative iff the check
/// holds, up to the check's own tolerance which is already folded in).
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: bool,
}

impl CheckRow {
    pub fn new(
        name: impl Into<String>,
        params: impl Into<String>,
        lhs: f64,
        rhs: f64,
        verdict: bool,
    ) -> CheckRow {
        CheckRow { name: name.into(), params: params.into(), lhs, rhs, verdict }
    }

    /// A row asserting `lhs ≤ rhs` exactly.
    pub fn le(name: impl Into<String>, params: impl Into<String>, lhs: f64, rhs: f64) -> CheckRow {
        CheckRow::new(name, params, lhs, rhs, lhs <= rhs)
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Write rows as CSV with a header line.
pub fn write_csv<W: Write>(rows: &[CheckRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "params", "lhs", "rhs", "margin", "verdict"])?;
    for row in rows {
        w.write_record([
            row.name.as_str(),
            row.params.as_str(),
            &format!("{:.17e}", row.lhs),
            &format!("{:.17e}", row.rhs),
            &format!("{:.17e}", row.margin()),
            if row.verdict { "pass" } else { "FAIL" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Count of failing rows.
pub fn violations(rows: &[CheckRow]) -> usize {
    rows.iter().filter(|r| !r.verdict).count()
}
