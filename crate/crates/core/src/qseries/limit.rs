//! The quantum dimension as the limit `y -> 0` of a character ratio at
//! `tau = i y`.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::expr::CharacterExpr;
use crate::error::Result;
use crate::rational::{big_to_f64, r64_to_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// S-transform both characters and read off the `y -> inf` behaviour.
    Transform,
    /// Evaluate the ratio directly on a shrinking grid `y = 2^{-j}`.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitOptions {
    pub strategy: Strategy,
    /// Evaluation point for the transformed ratio.
    pub transform_y: f64,
    /// Raw grid is `y_j = 2^{-j}` for `j = 0..=raw_levels`.
    pub raw_levels: u32,
    pub divergence_threshold: f64,
    /// Consecutive increasing grid points required to call divergence.
    pub monotone_points: usize,
    pub finite_rel_tol: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            strategy: Strategy::Transform,
            transform_y: 6.0,
            raw_levels: 12,
            divergence_threshold: 1e6,
            monotone_points: 5,
            finite_rel_tol: 1e-4,
        }
    }
}

impl LimitOptions {
    pub fn raw() -> Self {
        LimitOptions {
            strategy: Strategy::Raw,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QdimLimit {
    Finite { value: f64, error: f64 },
    Divergent,
    Inconclusive { reason: String },
}

impl QdimLimit {
    pub fn value(&self) -> Option<f64> {
        match self {
            QdimLimit::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// `lim_{y -> 0} chi_M(iy) / chi_V(iy)`.
pub fn qdim_limit(char_m: &CharacterExpr, char_v: &CharacterExpr, opts: &LimitOptions) -> Result<QdimLimit> {
    match opts.strategy {
        Strategy::Transform => transform_limit(char_m, char_v, opts),
        Strategy::Raw => raw_limit(char_m, char_v, opts),
    }
}

fn transform_limit(char_m: &CharacterExpr, char_v: &CharacterExpr, opts: &LimitOptions) -> Result<QdimLimit> {
    // y -> 0 in the original frame is y -> inf after tau -> -1/tau.
    let ratio = char_m.s_transform()?.ratio(&char_v.s_transform()?);
    let lead = ratio.leading_exponent();
    let p = ratio.tau_power;

    // ratio ~ C * c0 * y^p * e^{-2 pi y lead} as y -> inf.
    if lead.is_negative() || (lead.is_zero() && p.is_positive()) {
        return Ok(QdimLimit::Divergent);
    }
    if lead.is_positive() || p.is_negative() {
        return Ok(QdimLimit::Finite { value: 0.0, error: 0.0 });
    }
    let series = ratio.series(lead + Rational64::new(1, 1))?;
    let c0 = series.coeff(lead).map(|c| big_to_f64(&c)).unwrap_or(0.0);
    let value = c0 * r64_to_f64(&ratio.radicand).sqrt();

    // The transformed ratio should approach the limit as y grows. Terms
    // beyond e^{-40} relative are irrelevant at double precision.
    let extra = (40.0 / (2.0 * std::f64::consts::PI * opts.transform_y)).ceil().max(2.0) as i64;
    let order = lead + Rational64::from_integer(extra);
    let near = ratio.eval(opts.transform_y, order)?.value;
    let far = ratio.eval(2.0 * opts.transform_y, order)?.value;
    if (far - value).abs() > (near - value).abs() + 4.0 * f64::EPSILON * value.abs() {
        return Ok(QdimLimit::Inconclusive {
            reason: format!(
                "transformed ratio moves away from {value}: {near} at y={}, {far} at y={}",
                opts.transform_y,
                2.0 * opts.transform_y
            ),
        });
    }
    Ok(QdimLimit::Finite {
        value,
        error: 4.0 * f64::EPSILON * value.abs(),
    })
}

fn raw_limit(char_m: &CharacterExpr, char_v: &CharacterExpr, opts: &LimitOptions) -> Result<QdimLimit> {
    let mut logs = Vec::with_capacity(opts.raw_levels as usize + 1);
    for j in 0..=opts.raw_levels {
        let y = 0.5f64.powi(j as i32);
        logs.push(char_m.ln_eval_direct(y)? - char_v.ln_eval_direct(y)?);
    }
    let n = logs.len();

    let rising = logs.windows(2).rev().take_while(|w| w[1] > w[0]).count() + 1;
    if rising >= opts.monotone_points && logs[n - 1] > opts.divergence_threshold.ln() {
        return Ok(QdimLimit::Divergent);
    }

    if n >= 3 {
        let tail: Vec<f64> = logs[n - 3..].iter().map(|l| l.exp()).collect();
        let last = tail[2];
        let spread =
            tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
        if last.is_finite() && spread <= opts.finite_rel_tol * last.abs() {
            return Ok(QdimLimit::Finite {
                value: last,
                error: spread,
            });
        }
    }

    Ok(QdimLimit::Inconclusive {
        reason: format!(
            "ratio at y = 2^-{} is {:.6e}; neither converged nor past the divergence threshold",
            opts.raw_levels,
            logs[n - 1].exp()
        ),
    })
}
