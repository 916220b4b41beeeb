//! Distortion functions φ on [0,1] and their calculus.

mod calculus;
mod family;

pub use calculus::{
    convexity_window, derivative_ratio, derivative_ratio_bound, log_second_difference, mixture_crossing,
    mixture_crossings, phi_derivative_mode, xi_gamma, ConvexityWindow, MixtureCrossing, RatioBound,
};
pub use family::{FamilyTemplate, IndexRule, IndexSequence};

use crate::dist::Distribution;
use crate::error::{domain, Error, Result};
use crate::roots::bisect_predicate;
use crate::special::{binom_sf, gamma_reg, ln_dbinom, ln_dpois, log_sum_exp};
use std::fmt;

/// m = [(n−1)γ], guarding against representation error just below an integer.
pub fn order_index(n: u64, gamma: f64) -> u64 {
    if n <= 1 {
        return 0;
    }
    let x = (n - 1) as f64 * gamma;
    let r = x.round();
    let m = if (x - r).abs() <= 1e-9 * (1.0 + x) { r } else { x.floor() };
    (m.max(0.0) as u64).min(n - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distortion {
    /// Law of the (1 + [(n−1)γ])-th order statistic of n iid draws.
    OrderStat { n: u64, gamma: f64 },
    /// Σ α_i φ_{n,γ_i}.
    Mixture { n: u64, alphas: Vec<f64>, gammas: Vec<f64> },
    /// n-th upper k-record value.
    Record { n: u64, k: u64 },
}

impl Distortion {
    pub fn order_stat(n: u64, gamma: f64) -> Result<Self> {
        if n == 0 {
            return domain("order statistic needs n ≥ 1");
        }
        if !(0.0..=1.0).contains(&gamma) {
            return domain(format!("gamma {gamma} outside [0,1]"));
        }
        Ok(Distortion::OrderStat { n, gamma })
    }

    pub fn mixture(n: u64, alphas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return domain("mixture needs n ≥ 1");
        }
        if alphas.is_empty() || alphas.len() != gammas.len() {
            return domain("mixture needs matching, non-empty weight and gamma lists");
        }
        if alphas.iter().any(|&a| !(a > 0.0)) || (alphas.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return domain("mixture weights must be positive and sum to 1");
        }
        if gammas.iter().any(|g| !(0.0..=1.0).contains(g)) || gammas.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("mixture gammas must be strictly increasing in [0,1]");
        }
        Ok(Distortion::Mixture { n, alphas, gammas })
    }

    pub fn record(n: u64, k: u64) -> Result<Self> {
        if n == 0 || k == 0 {
            return domain("record distortion needs n ≥ 1 and k ≥ 1");
        }
        Ok(Distortion::Record { n, k })
    }

    pub fn n(&self) -> u64 {
        match self {
            Distortion::OrderStat { n, .. } | Distortion::Mixture { n, .. } | Distortion::Record { n, .. } => *n,
        }
    }

    /// φ(u) for u ∈ [0,1].
    pub fn value(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        self.value_pair(u, 1.0 - u).0
    }

    /// (φ(u), 1 − φ(u)) with `ubar = 1 − u` supplied by the caller.
    pub fn value_pair(&self, u: f64, ubar: f64) -> (f64, f64) {
        if u <= 0.0 {
            return (0.0, 1.0);
        }
        if ubar <= 0.0 {
            return (1.0, 0.0);
        }
        match self {
            Distortion::OrderStat { n, gamma } => binom_sf(order_index(*n, *gamma) + 1, *n, u, ubar),
            Distortion::Mixture { n, alphas, gammas } => {
                let (mut v, mut c) = (0.0, 0.0);
                for (a, g) in alphas.iter().zip(gammas) {
                    let (p, q) = binom_sf(order_index(*n, *g) + 1, *n, u, ubar);
                    v += a * p;
                    c += a * q;
                }
                (v, c)
            }
            Distortion::Record { n, k } => {
                let y = record_y(*k, u, ubar);
                if *n == 1 {
                    let e = (-y).exp();
                    (-(-y).exp_m1(), e)
                } else {
                    gamma_reg(*n as f64, y)
                }
            }
        }
    }

    /// φ'(u) on the open interval; the endpoints are rejected.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        check_open(u)?;
        Ok(self.derivative_pair(u, 1.0 - u))
    }

    pub fn ln_derivative(&self, u: f64) -> Result<f64> {
        check_open(u)?;
        Ok(self.ln_derivative_pair(u, 1.0 - u))
    }

    pub fn derivative_pair(&self, u: f64, ubar: f64) -> f64 {
        self.ln_derivative_pair(u, ubar).exp()
    }

    pub fn ln_derivative_pair(&self, u: f64, ubar: f64) -> f64 {
        match self {
            Distortion::OrderStat { n, gamma } => ln_os_derivative(*n, order_index(*n, *gamma), u, ubar),
            Distortion::Mixture { n, alphas, gammas } => {
                let terms: Vec<f64> = alphas
                    .iter()
                    .zip(gammas)
                    .map(|(a, g)| a.ln() + ln_os_derivative(*n, order_index(*n, *g), u, ubar))
                    .collect();
                log_sum_exp(&terms)
            }
            Distortion::Record { n, k } => {
                let y = record_y(*k, u, ubar);
                (*k as f64).ln() - ubar.ln() + ln_dpois((*n - 1) as f64, y)
            }
        }
    }

    /// φ⁻¹(v) as a pair (u, 1 − u).
    pub fn inverse(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        self.inverse_pair(v, 1.0 - v).0
    }

    /// Solves φ(u) = v by bisection followed by two guarded Newton steps.
    /// Works on whichever of `v`, `1 − v` is smaller.
    pub fn inverse_pair(&self, v: f64, vbar: f64) -> (f64, f64) {
        if v <= 0.0 {
            return (0.0, 1.0);
        }
        if vbar <= 0.0 {
            return (1.0, 0.0);
        }
        if v <= vbar {
            let (lo, hi) = bisect_predicate(|u| self.value_pair(u, 1.0 - u).0 < v, 0.0, 1.0, 1e-15);
            let mut u = 0.5 * (lo + hi);
            for _ in 0..2 {
                let d = self.derivative_pair(u, 1.0 - u);
                if d > 0.0 {
                    let nu = u - (self.value_pair(u, 1.0 - u).0 - v) / d;
                    if nu > lo && nu < hi {
                        u = nu;
                    }
                }
            }
            (u, 1.0 - u)
        } else {
            // same search on the complement: φ̄ increases with ubar
            let (lo, hi) = bisect_predicate(|ub| self.value_pair(1.0 - ub, ub).1 < vbar, 0.0, 1.0, 1e-15);
            let mut ub = 0.5 * (lo + hi);
            for _ in 0..2 {
                let d = self.derivative_pair(1.0 - ub, ub);
                if d > 0.0 {
                    let nb = ub - (self.value_pair(1.0 - ub, ub).1 - vbar) / d;
                    if nb > lo && nb < hi {
                        ub = nb;
                    }
                }
            }
            (1.0 - ub, ub)
        }
    }

    /// Points where φ' peaks (one per mixture component).
    pub fn modes(&self) -> Vec<f64> {
        match self {
            Distortion::OrderStat { n, gamma } => vec![os_mode(*n, *gamma)],
            Distortion::Mixture { n, gammas, .. } => gammas.iter().map(|g| os_mode(*n, *g)).collect(),
            Distortion::Record { n, k } => {
                if *n == 1 && *k == 1 {
                    vec![0.5]
                } else if *k == 1 {
                    vec![1.0]
                } else {
                    vec![-(-((*n - 1) as f64) / (*k - 1) as f64).exp_m1()]
                }
            }
        }
    }

    /// Extra quadrature breaks around the bulk of φ'.
    pub fn break_hints(&self) -> Vec<f64> {
        const SPREAD: [f64; 9] = [-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0];
        let mut out = Vec::new();
        match self {
            Distortion::Record { n, k } => {
                let nf = *n as f64;
                for c in SPREAD {
                    let y = nf + c * nf.sqrt();
                    if y > 0.0 {
                        out.push(-(-y / *k as f64).exp_m1());
                    }
                }
            }
            _ => {
                let n = self.n() as f64;
                for mu in self.modes() {
                    let w = (mu * (1.0 - mu)).max(1.0 / n).sqrt() / n.sqrt();
                    for c in SPREAD {
                        out.push(mu + c * w);
                    }
                }
            }
        }
        out.retain(|&u| u > 0.0 && u < 1.0);
        out
    }
}

/// The law with CDF φ ∘ F_base.
pub fn distort(base: &Distribution, d: &Distortion) -> Result<Distribution> {
    if !base.is_continuous() {
        return Err(Error::Unsupported(format!("distorting a step law ({base}) is not supported")));
    }
    Ok(Distribution::distorted(base.clone(), d.clone()))
}

fn check_open(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("derivative requested at boundary point {u}; use the limit")))
    }
}

fn os_mode(n: u64, gamma: f64) -> f64 {
    if n <= 1 {
        0.5
    } else {
        order_index(n, gamma) as f64 / (n - 1) as f64
    }
}

/// ln φ'_{n,·}(u) = ln n + ln P(Bin(n−1, u) = m).
fn ln_os_derivative(n: u64, m: u64, u: f64, ubar: f64) -> f64 {
    (n as f64).ln() + ln_dbinom(m as f64, (n - 1) as f64, u, ubar)
}

fn record_y(k: u64, u: f64, ubar: f64) -> f64 {
    let l = if ubar < 0.5 { ubar.ln() } else { (-u).ln_1p() };
    -(k as f64) * l
}

impl fmt::Display for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distortion::OrderStat { n, gamma } => write!(f, "os(n={n},gamma={gamma})"),
            Distortion::Mixture { n, alphas, gammas } => {
                write!(f, "mix(n={n}")?;
                for (i, (a, g)) in alphas.iter().zip(gammas).enumerate() {
                    write!(f, "{}{a}@{g}", if i == 0 { "; " } else { ", " })?;
                }
                write!(f, ")")
            }
            Distortion::Record { n, k } => write!(f, "record(n={n},k={k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_guard() {
        assert_eq!(order_index(10, 0.5), 4);
        assert_eq!(order_index(11, 0.3), 3);
        // 0.29 * 100 evaluates to 28.999999999999996
        assert_eq!(order_index(101, 0.29), 29);
        assert_eq!(order_index(2, 1.0), 1);
        assert_eq!(order_index(1, 0.7), 0);
    }

    #[test]
    fn closed_forms() {
        let d = Distortion::order_stat(3, 1.0).unwrap();
        assert!((d.value(0.5) - 0.125).abs() < 1e-16);
        let d = Distortion::order_stat(2, 0.0).unwrap();
        assert!((d.value(0.5) - 0.75).abs() < 1e-16);
        assert!((d.derivative(0.3).unwrap() - 1.4).abs() < 1e-14);
        let r = Distortion::record(1, 1).unwrap();
        for &u in &[0.1, 0.5, 0.9] {
            assert!((r.value(u) - u).abs() < 1e-15);
        }
        let r = Distortion::record(2, 1).unwrap();
        assert!((r.derivative(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn boundary_derivative_rejected() {
        let d = Distortion::order_stat(4, 0.5).unwrap();
        assert!(d.derivative(0.0).is_err());
        assert!(d.derivative(1.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let ds = [
            Distortion::order_stat(10, 0.5).unwrap(),
            Distortion::order_stat(40, 1.0).unwrap(),
            Distortion::mixture(10, vec![0.3, 0.7], vec![0.25, 0.75]).unwrap(),
            Distortion::record(3, 2).unwrap(),
        ];
        for d in &ds {
            for i in 1..100 {
                let v = i as f64 / 100.0;
                let u = d.inverse(v);
                assert!((d.value(u) - v).abs() < 1e-12, "{d} v={v}");
            }
        }
    }

    #[test]
    fn record_mode() {
        let d = Distortion::record(5, 3).unwrap();
        let m = d.modes()[0];
        let l = |u: f64| d.ln_derivative(u).unwrap();
        assert!(l(m) >= l(m - 1e-4) && l(m) >= l(m + 1e-4));
    }
}
