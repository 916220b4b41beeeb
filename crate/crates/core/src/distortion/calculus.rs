use super::{order_index, Distortion, IndexSequence};
use crate::error::{domain, Result};
use serde::Serialize;

/// Argmax of φ'_{n,γ}: [(n−1)γ]/(n−1).
pub fn phi_derivative_mode(n: u64, gamma_n: f64) -> Result<f64> {
    if n < 2 {
        return domain("mode of φ' needs n ≥ 2");
    }
    Ok(order_index(n, gamma_n) as f64 / (n - 1) as f64)
}

/// ξ_γ(t,s) = (t/s)^γ ((1−t)/(1−s))^{1−γ}.
pub fn xi_gamma(gamma: f64, t: f64, s: f64) -> f64 {
    if t == s {
        return 1.0;
    }
    let a = if gamma > 0.0 { gamma * (t / s).ln() } else { 0.0 };
    let b = if gamma < 1.0 { (1.0 - gamma) * ((1.0 - t) / (1.0 - s)).ln() } else { 0.0 };
    (a + b).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBound {
    pub bound: f64,
    pub c_ts: f64,
}

/// C(t,s) ξ_γ(t,s)^{n−1} with C(t,s) = (s(1−t)/(t(1−s)))^{1/2 − (K+1/2)·sign(t−s)}.
pub fn derivative_ratio_bound(n: u64, seq: &IndexSequence, t: f64, s: f64) -> RatioBound {
    let sign = if t > s {
        1.0
    } else if t < s {
        -1.0
    } else {
        0.0
    };
    let base = (s * (1.0 - t)) / (t * (1.0 - s));
    let c_ts = base.powf(0.5 - (seq.rate_constant + 0.5) * sign);
    let bound = c_ts * xi_gamma(seq.gamma, t, s).powf(n.saturating_sub(1) as f64);
    RatioBound { bound, c_ts }
}

/// φ'_{n,γ_n}(t)/φ'_{n,γ_n}(s) evaluated in log space.
pub fn derivative_ratio(n: u64, seq: &IndexSequence, t: f64, s: f64) -> Result<f64> {
    let d = Distortion::order_stat(n, seq.gamma_n(n))?;
    Ok((d.ln_derivative(t)? - d.ln_derivative(s)?).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureCrossing {
    pub i: usize,
    pub j: usize,
    pub u_ij: f64,
    pub delta_ij: f64,
}

fn entropy_h(x: f64) -> f64 {
    let a = if x > 0.0 { x * x.ln() } else { 0.0 };
    let b = if x < 1.0 { (1.0 - x) * (-x).ln_1p() } else { 0.0 };
    a + b
}

/// Limit crossing of ln φ'_{n,γ_i} and ln φ'_{n,γ_j}; endpoints 0 and 1 allowed.
fn crossing_point(gi: f64, gj: f64) -> f64 {
    if (gi + gj - 1.0).abs() < 1e-15 {
        return 0.5;
    }
    let r = -(entropy_h(gj) - entropy_h(gi)) / (gj - gi);
    1.0 / (1.0 + r.exp())
}

pub fn mixture_crossing(gamma_i: f64, gamma_j: f64) -> Result<MixtureCrossing> {
    if !(gamma_i > 0.0 && gamma_j < 1.0 && gamma_i < gamma_j) {
        return domain(format!("mixture crossing needs 0 < γ_i < γ_j < 1, got ({gamma_i}, {gamma_j})"));
    }
    let u = crossing_point(gamma_i, gamma_j);
    if !(gamma_i < u && u < gamma_j) {
        return domain(format!("crossing {u} not strictly between {gamma_i} and {gamma_j}"));
    }
    Ok(MixtureCrossing { i: 0, j: 1, u_ij: u, delta_ij: (u - gamma_i).min(gamma_j - u) })
}

/// All pairwise crossings of an increasing γ list.
pub fn mixture_crossings(gammas: &[f64]) -> Result<Vec<MixtureCrossing>> {
    let mut out = Vec::new();
    for i in 0..gammas.len() {
        for j in i + 1..gammas.len() {
            let c = mixture_crossing(gammas[i], gammas[j])?;
            out.push(MixtureCrossing { i, j, ..c });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityWindow {
    pub alpha_n: f64,
    pub beta_n: f64,
}

/// Roots of u² − (m/(n−2))(1 + (n−3)/(n−1)) u + m(m−1)/((n−1)(n−2)); φ''' < 0 strictly between them.
pub fn convexity_window(n: u64, gamma_n: f64) -> Result<ConvexityWindow> {
    if n < 4 {
        return domain(format!("convexity window needs n ≥ 4, got {n}"));
    }
    let m = order_index(n, gamma_n) as f64;
    let nf = n as f64;
    let p = (m / (nf - 2.0)) * (1.0 + (nf - 3.0) / (nf - 1.0));
    let c = m * (m - 1.0) / ((nf - 1.0) * (nf - 2.0));
    let disc = (0.25 * p * p - c).max(0.0);
    let hi = 0.5 * p + disc.sqrt();
    let lo = if hi > 0.0 { c / hi } else { 0.0 };
    Ok(ConvexityWindow { alpha_n: lo.min(hi), beta_n: hi })
}

/// e^{L(u+h)−L(u)} + e^{L(u−h)−L(u)} − 2: sign of f'' for f = e^L.
pub fn log_second_difference<L: Fn(f64) -> f64>(l: L, u: f64, h: f64) -> f64 {
    let c = l(u);
    (l(u + h) - c).exp() + (l(u - h) - c).exp() - 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert!((phi_derivative_mode(10, 0.5).unwrap() - 4.0 / 9.0).abs() < 1e-16);
        assert_eq!(phi_derivative_mode(2, 1.0).unwrap(), 1.0);
        assert_eq!(phi_derivative_mode(101, 0.25).unwrap(), 0.25);
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi_gamma(0.3, 0.4, 0.4), 1.0);
        assert!((xi_gamma(1.0, 0.5, 0.9) - 5.0 / 9.0).abs() < 1e-15);
        let v = xi_gamma(0.5, 0.2, 0.4);
        assert!((v - (0.5f64).sqrt() * (0.8f64 / 0.6).sqrt()).abs() < 1e-15);
        assert!(v < 1.0);
    }

    #[test]
    fn ratio_bound_worked_case() {
        let seq = IndexSequence::constant(1.0);
        let b = derivative_ratio_bound(11, &seq, 0.5, 0.9);
        assert!((b.c_ts - 9.0).abs() < 1e-12);
        assert!((b.bound - 9.0 * (5.0f64 / 9.0).powi(10)).abs() < 1e-14);
        let actual = derivative_ratio(11, &seq, 0.5, 0.9).unwrap();
        assert!((actual - (5.0f64 / 9.0).powi(10)).abs() < 1e-14);
        assert!(actual <= b.bound);
        let same = derivative_ratio_bound(7, &IndexSequence::constant(0.4), 0.3, 0.3);
        assert_eq!(same.bound, 1.0);
    }

    #[test]
    fn symmetric_crossings_exact() {
        assert_eq!(mixture_crossing(0.25, 0.75).unwrap().u_ij, 0.5);
        assert_eq!(mixture_crossing(0.1, 0.9).unwrap().u_ij, 0.5);
        assert!(mixture_crossing(0.0, 0.5).is_err());
        assert!(mixture_crossing(0.5, 0.5).is_err());
    }

    #[test]
    fn window_edges() {
        assert!(convexity_window(3, 0.5).is_err());
        let w = convexity_window(20, 0.5).unwrap();
        let mode = phi_derivative_mode(20, 0.5).unwrap();
        assert!(w.alpha_n < mode && mode < w.beta_n);
        let w = convexity_window(10_000, 0.3).unwrap();
        assert!((w.alpha_n - 0.3).abs() <= 0.05 && (w.beta_n - 0.3).abs() <= 0.05);
        let w = convexity_window(10, 0.0).unwrap();
        assert_eq!((w.alpha_n, w.beta_n), (0.0, 0.0));
    }
}
