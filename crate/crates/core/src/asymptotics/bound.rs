use super::{tail_log_slope, SweepResult};
use crate::crossings::{boundary_quantities, crossing_sets, hypothesis_check, BoundaryQuantities, IntervalSet, DEFAULT_GRID};
use crate::dist::Distribution;
use crate::error::{domain, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayBound {
    pub bq: BoundaryQuantities,
    pub eps: f64,
    pub z: f64,
    /// The multiplicative constant is not reconstructed.
    pub c: Option<f64>,
}

pub fn decay_bound(x: &Distribution, y: &Distribution, gamma: f64, eps: f64) -> Result<DecayBound> {
    let s = crossing_sets(x, y, DEFAULT_GRID)?;
    decay_bound_from_sets(&s.a0, &s.a2, gamma, eps)
}

/// z_{ε,γ} from the boundary quantities of (A0, A2) around γ.
pub fn decay_bound_from_sets(a0: &IntervalSet, a2: &IntervalSet, gamma: f64, eps: f64) -> Result<DecayBound> {
    if !(0.0..=1.0).contains(&gamma) {
        return domain(format!("gamma {gamma} outside [0,1]"));
    }
    let bq = boundary_quantities(a0, a2, gamma);
    if !hypothesis_check(&bq, None) {
        return domain(format!(
            "hypotheses fail at gamma={gamma}: need F_X(c) < F_X(a) and F_X(b) < F_X(d) on non-empty sides"
        ));
    }
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let left = !bq.left_empty && gamma > 0.0;
    let right = !bq.right_empty && gamma < 1.0;
    if left && eps >= bq.fx_a - bq.fx_c {
        return domain(format!("eps {eps} must be below F_X(a) - F_X(c) = {}", bq.fx_a - bq.fx_c));
    }
    if right && eps >= bq.fx_d - bq.fx_b {
        return domain(format!("eps {eps} must be below F_X(d) - F_X(b) = {}", bq.fx_d - bq.fx_b));
    }
    if gamma > 0.0 && gamma < 1.0 {
        let cap = (2.0 * gamma).min(2.0 * (1.0 - gamma));
        if eps >= cap {
            return domain(format!("eps {eps} must be below min(2γ, 2(1-γ)) = {cap}"));
        }
    }
    let g = gamma;
    let z = if g == 1.0 {
        if left {
            bq.fx_c / (bq.fx_a - eps)
        } else {
            0.0
        }
    } else if g == 0.0 {
        if right {
            (1.0 - bq.fx_d) / (1.0 - bq.fx_b - eps)
        } else {
            0.0
        }
    } else {
        let l = if left {
            (bq.fx_c / (bq.fx_a - eps)).powf(g) * ((1.0 - bq.fx_c) / (1.0 - bq.fx_a + eps)).powf(1.0 - g)
        } else {
            0.0
        };
        let r = if right {
            (bq.fx_d / (bq.fx_b + eps)).powf(g) * ((1.0 - bq.fx_d) / (1.0 - bq.fx_b - eps)).powf(1.0 - g)
        } else {
            0.0
        };
        l.max(r)
    };
    if !(z < 1.0) {
        return domain(format!("z = {z} is not below 1 for gamma={gamma}, eps={eps}"));
    }
    Ok(DecayBound { bq, eps, z, c: None })
}

/// Rate check: tail slope of ln ε against n − 1 is at most ln z + 0.05.
pub fn bound_validation(s: &SweepResult, b: &DecayBound) -> bool {
    match tail_log_slope(&s.indices, &s.epsilons) {
        // fewer than two positive values: nothing decays, nothing to refute
        None => true,
        Some(slope) => slope <= b.z.ln() + 0.05,
    }
}
