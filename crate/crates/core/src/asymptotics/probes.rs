use crate::distortion::{convexity_window, log_second_difference, mixture_crossing, Distortion, FamilyTemplate};
use crate::error::{domain, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialProbe {
    pub ns: Vec<u64>,
    pub phi_values: Vec<f64>,
    /// φ'_{n,γ}(u) = n·P(B_{n−1,u} = [(n−1)γ]).
    pub scaled_pmf: Vec<f64>,
}

pub fn binomial_limit_probe(gamma: f64, u: f64, ns: &[u64]) -> Result<BinomialProbe> {
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("u = {u} outside [0,1]"));
    }
    let mut phi_values = Vec::with_capacity(ns.len());
    let mut scaled_pmf = Vec::with_capacity(ns.len());
    for &n in ns {
        let d = Distortion::order_stat(n, gamma)?;
        phi_values.push(d.value_pair(u, 1.0 - u).0);
        scaled_pmf.push(d.derivative_pair(u, 1.0 - u));
    }
    Ok(BinomialProbe { ns: ns.to_vec(), phi_values, scaled_pmf })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C3Witness {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    /// φ'_n(a)/φ'_n(b) for each probed n.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionProbeReport {
    pub family: String,
    pub gammas: Vec<f64>,
    pub ns: Vec<u64>,
    pub c3_pass: bool,
    pub c3_witnesses: Vec<C3Witness>,
    pub c4_pass: bool,
    /// Grid points where the second difference of φ' was negative at the largest n.
    pub c4_violations: Vec<f64>,
    /// For order statistics: whether (α_n, β_n) at the largest n sits inside the ±probe_eps window.
    pub c4_window_consistent: Option<bool>,
    pub derivative_vanishes_off_gamma: bool,
}

const GRID: usize = 400;
const FD_STEP: f64 = 1e-4;

/// C3 window half-widths: δ_i from the pairwise mixture crossings, or half
/// the distance to the nearest endpoint for a single concentration point.
fn c3_windows(gammas: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(gammas.len());
    for (i, &g) in gammas.iter().enumerate() {
        let mut d = if g > 0.0 && g < 1.0 { 0.5 * g.min(1.0 - g) } else { 0.5 };
        for (j, &h) in gammas.iter().enumerate() {
            if i != j && g > 0.0 && g < 1.0 && h > 0.0 && h < 1.0 {
                let c = if g < h { mixture_crossing(g, h)? } else { mixture_crossing(h, g)? };
                d = d.min(c.delta_ij);
            } else if i != j {
                d = d.min(0.5 * (g - h).abs());
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Numeric checks of (C3), (C4) and the vanishing of φ' away from the
/// concentration points, along `ns`.
pub fn condition_probe(family: &FamilyTemplate, ns: &[u64], probe_eps: f64) -> Result<ConditionProbeReport> {
    if ns.is_empty() {
        return domain("condition probe needs at least one n");
    }
    if !(probe_eps > 0.0 && probe_eps < 0.5) {
        return domain(format!("probe_eps {probe_eps} outside (0, 0.5)"));
    }
    let gammas = family.concentration_points();
    if gammas.windows(2).any(|w| w[0] >= w[1]) {
        return domain("concentration points must be strictly increasing");
    }
    let ds: Vec<Distortion> = ns.iter().map(|&n| family.at(n)).collect::<Result<_>>()?;
    let ln_d = |d: &Distortion, u: f64| d.ln_derivative_pair(u, 1.0 - u);

    let windows = c3_windows(&gammas)?;
    let mut witnesses = Vec::new();
    for (&g, &delta) in gammas.iter().zip(&windows) {
        let mut pairs = Vec::new();
        if g - 0.75 * delta > 0.0 {
            pairs.push((g - 0.75 * delta, g - 0.25 * delta));
        }
        if g + 0.75 * delta < 1.0 {
            pairs.push((g + 0.75 * delta, g + 0.25 * delta));
        }
        for (a, b) in pairs {
            let lr: Vec<f64> = ds.iter().map(|d| ln_d(d, a) - ln_d(d, b)).collect();
            let pass = lr.len() >= 2 && lr[lr.len() - 1] <= lr[0] - 10f64.ln();
            witnesses.push(C3Witness { gamma: g, a, b, ratios: lr.iter().map(|v| v.exp()).collect(), pass });
        }
    }
    let c3_pass = !witnesses.is_empty() && witnesses.iter().all(|w| w.pass);

    let outside = |u: f64| gammas.iter().all(|&g| (u - g).abs() > probe_eps);
    let grid: Vec<f64> = (1..GRID).map(|k| k as f64 / GRID as f64).filter(|&u| outside(u)).collect();
    let last = ds.last().unwrap();
    let mut c4_violations = Vec::new();
    for &u in &grid {
        if u - FD_STEP <= 0.0 || u + FD_STEP >= 1.0 || !ln_d(last, u).is_finite() {
            continue;
        }
        let s = log_second_difference(|v| ln_d(last, v), u, FD_STEP);
        if s < -1e-9 {
            c4_violations.push(u);
        }
    }
    let c4_window_consistent = match family {
        FamilyTemplate::OrderStat(seq) if *ns.last().unwrap() >= 4 => {
            let n = *ns.last().unwrap();
            let w = convexity_window(n, seq.gamma_n(n))?;
            Some(w.alpha_n >= seq.gamma - probe_eps && w.beta_n <= seq.gamma + probe_eps)
        }
        _ => None,
    };
    let c4_pass = c4_violations.is_empty() && c4_window_consistent.unwrap_or(true);

    let first = &ds[0];
    let vanishes = ds.len() >= 2
        && grid.iter().all(|&u| {
            let (a, b) = (ln_d(first, u), ln_d(last, u));
            b < a || b.exp() < 1e-12
        });

    Ok(ConditionProbeReport {
        family: family.to_string(),
        gammas,
        ns: ns.to_vec(),
        c3_pass,
        c3_witnesses: witnesses,
        c4_pass,
        c4_violations,
        c4_window_consistent,
        derivative_vanishes_off_gamma: vanishes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_symmetry_probe() {
        let p = binomial_limit_probe(0.5, 0.5, &[3, 11, 101]).unwrap();
        assert!(p.phi_values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn windows() {
        let w = c3_windows(&[0.25, 0.75]).unwrap();
        assert_eq!(w, vec![0.125, 0.125]);
        assert_eq!(c3_windows(&[1.0]).unwrap(), vec![0.5]);
    }
}
