//! Finite-sequence checks of `Nε^δ → 0` and of the `(d, β̃)` parameter window.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityRow {
    pub n: f64,
    pub epsilon: f64,
    /// `ε^{2+δ}/μ = Nε^δ` with `μ = ε²/N`.
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub delta: f64,
    pub rows: Vec<AdmissibilityRow>,
    /// `Nε^δ` strictly decreasing over the second half of the sequence.
    pub tail_decreasing: bool,
    /// Final value at most `tail_fraction` times the largest value.
    pub tail_small: bool,
    pub admissible: bool,
    /// `5/6 < d < β̃ < 2/(2+δ)` when `(d, β̃)` was supplied.
    pub window: Option<bool>,
}

/// Evaluates `Nε^δ` along the sequence.
///
/// A finite sequence cannot prove a limit; it is flagged admissible when the tail
/// decreases strictly and ends below `tail_fraction` of the peak.
pub fn validate_admissibility(
    sequence: &[(f64, f64)],
    delta: f64,
    window: Option<(f64, f64)>,
    tail_fraction: f64,
) -> Result<AdmissibilityReport> {
    if sequence.is_empty() {
        return Err(Error::domain("admissibility needs a non-empty (N, epsilon) sequence"));
    }
    if !(delta > 0.0 && delta < 0.4) {
        return Err(Error::domain(format!("delta = {delta} outside (0, 2/5)")));
    }
    for (i, &(n, eps)) in sequence.iter().enumerate() {
        if !(n > 0.0 && eps > 0.0) {
            return Err(Error::domain(format!("entry {i}: N and epsilon must be positive")));
        }
        if i > 0 {
            let (pn, pe) = sequence[i - 1];
            if !(n > pn && eps < pe) {
                return Err(Error::domain(format!(
                    "entry {i}: sequence must increase in N and decrease in epsilon"
                )));
            }
        }
    }
    let rows: Vec<AdmissibilityRow> =
        sequence.iter().map(|&(n, epsilon)| AdmissibilityRow { n, epsilon, value: n * epsilon.powf(delta) }).collect();
    let half = rows.len() / 2;
    let tail_decreasing = rows.len() >= 2 && rows[half.min(rows.len() - 2)..].windows(2).all(|w| w[1].value < w[0].value);
    let peak = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    let tail_small = rows.last().unwrap().value <= tail_fraction * peak;
    let window = window.map(|(d, bt)| 5.0 / 6.0 < d && d < bt && bt < 2.0 / (2.0 + delta));
    Ok(AdmissibilityReport { delta, rows, tail_decreasing, tail_small, admissible: tail_decreasing && tail_small, window })
}
