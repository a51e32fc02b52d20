//! Reference loss functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities are clamped to at least this before taking logarithms.
pub const LOG_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalLossParams {
    pub gamma: f64,
    /// Weight of positives; negatives get `1 - alpha`.
    pub alpha: f64,
}

impl Default for FocalLossParams {
    fn default() -> Self {
        FocalLossParams {
            gamma: 2.0,
            alpha: 0.25,
        }
    }
}

/// `-α_t (1 - p_t)^γ ln p_t` with `p_t = p` for positives and `1 - p` for
/// negatives, `α_t = α` for positives and `1 - α` for negatives.
pub fn focal_loss(p: f64, positive: bool, params: FocalLossParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "probability must lie in [0, 1]",
            value: p.to_string(),
        });
    }
    if !(params.gamma >= 0.0) || !(0.0..=1.0).contains(&params.alpha) {
        return Err(Error::Domain {
            what: "focal loss needs gamma >= 0 and alpha in [0, 1]",
            value: format!("gamma={}, alpha={}", params.gamma, params.alpha),
        });
    }
    let (pt, at) = if positive {
        (p, params.alpha)
    } else {
        (1.0 - p, 1.0 - params.alpha)
    };
    let pt = pt.max(LOG_EPSILON);
    Ok(-at * (1.0 - pt).powf(params.gamma) * pt.ln() + 0.0)
}

/// `0.5 d² / β` for `|d| < β`, else `|d| - 0.5 β`, with `d = prediction - target`.
pub fn smooth_l1(prediction: f64, target: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain {
            what: "smooth L1 beta must be positive",
            value: beta.to_string(),
        });
    }
    let d = (prediction - target).abs();
    Ok(if d < beta { 0.5 * d * d / beta } else { d - 0.5 * beta })
}

pub const DEFAULT_SMOOTH_L1_BETA: f64 = 1.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focal_reference_values() {
        let p = FocalLossParams::default();
        assert_eq!(focal_loss(1.0, true, p).unwrap(), 0.0);
        assert_eq!(focal_loss(0.0, false, p).unwrap(), 0.0);
        let v = focal_loss(0.5, true, p).unwrap();
        assert!((v - 0.25 * 0.25 * std::f64::consts::LN_2).abs() < 1e-15);
        assert!(focal_loss(1.5, true, p).is_err());
        assert!(focal_loss(f64::NAN, true, p).is_err());
    }

    #[test]
    fn smooth_l1_branches() {
        assert_eq!(smooth_l1(2.0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(smooth_l1(0.5, 0.0, 0.5).unwrap(), 0.25);
        assert_eq!(smooth_l1(3.0, 0.0, 1.0).unwrap(), 2.5);
        assert!(smooth_l1(1.0, 0.0, 0.0).is_err());
    }
}
