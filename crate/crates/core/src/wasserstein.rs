//! W2 distance and the departure measures built on it.

use crate::crossings::{crossing_sets_with, CrossingSets, IntervalSet, DEFAULT_GRID};
use crate::dist::{empirical_split, Distribution};
use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadrature::{integrate_segments, integrate_unit, QuadOptions};
use crate::roots::bisect_predicate;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    None,
    /// W2 = 0, so ε := 0.
    ZeroDistance,
    /// ∫_{A0} h² = ∞, so ε := 1.
    InfiniteNumerator,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::None => "none",
            Convention::ZeroDistance => "zero_distance",
            Convention::InfiniteNumerator => "infinite_numerator",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepartureReport {
    pub epsilon: f64,
    pub w2: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub a0: IntervalSet,
    pub convention: Convention,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepartureOptions {
    pub grid_size: usize,
    pub quad: QuadOptions,
    pub exec: Exec,
}

impl Default for DepartureOptions {
    fn default() -> Self {
        DepartureOptions { grid_size: DEFAULT_GRID, quad: QuadOptions::default(), exec: Exec::default() }
    }
}

/// A baseline pair with its crossing sets computed once.
#[derive(Debug, Clone)]
pub struct BaselinePair {
    pub x: Distribution,
    pub y: Distribution,
    pub sets: CrossingSets,
}

impl BaselinePair {
    pub fn new(x: Distribution, y: Distribution) -> Result<Self> {
        Self::with_options(x, y, &DepartureOptions::default())
    }

    pub fn with_options(x: Distribution, y: Distribution, opts: &DepartureOptions) -> Result<Self> {
        x.require_second_moment()?;
        y.require_second_moment()?;
        let sets = crossing_sets_with(&x, &y, opts.grid_size, opts.exec)?;
        Ok(BaselinePair { x, y, sets })
    }

    /// ∫ h² w over A0 and A1 with w = φ' scaled by its peak (or w ≡ 1).
    pub fn departure_weighted(&self, weight: Option<&Distortion>, quad: QuadOptions) -> DepartureReport {
        let sets = &self.sets;
        if sets.a2.is_empty() {
            return DepartureReport {
                epsilon: 0.0,
                w2: 0.0,
                numerator: 0.0,
                denominator: 0.0,
                a0: sets.a0.clone(),
                convention: Convention::ZeroDistance,
                converged: true,
            };
        }
        let mut breaks = sets.boundaries.clone();
        breaks.extend(self.x.u_breakpoints());
        breaks.extend(self.y.u_breakpoints());
        let mut shift = 0.0;
        if let Some(d) = weight {
            breaks.extend(d.modes());
            breaks.extend(d.break_hints());
            shift = d
                .modes()
                .iter()
                .map(|&m| {
                    let m = m.clamp(1e-12, 1.0 - 1e-12);
                    d.ln_derivative_pair(m, 1.0 - m)
                })
                .filter(|v| v.is_finite())
                .fold(f64::NEG_INFINITY, f64::max);
            if !shift.is_finite() {
                shift = 0.0;
            }
        }
        let (x, y) = (&self.x, &self.y);
        let f = |u: f64, ub: f64| {
            let h = x.quantile_pair(u, ub) - y.quantile_pair(u, ub);
            let w = match weight {
                Some(d) => (d.ln_derivative_pair(u, ub) - shift).exp(),
                None => 1.0,
            };
            if h == 0.0 || w == 0.0 {
                0.0
            } else {
                h * h * w
            }
        };
        // A0 and its complement are integrated separately so each carries
        // its own relative accuracy; tiny numerators stay meaningful
        let a0 = &sets.a0;
        let r0 = integrate_unit(|u, ub| if a0.contains_pair(u, ub) { f(u, ub) } else { 0.0 }, &breaks, quad);
        let r1 = integrate_unit(|u, ub| if a0.contains_pair(u, ub) { 0.0 } else { f(u, ub) }, &breaks, quad);
        let mut n0 = r0.value;
        let rest = r1.value;
        let mut converged = r0.converged && r1.converged;
        let mut convention = Convention::None;
        if !converged && numerator_diverges(&f, &sets.a0) {
            convention = Convention::InfiniteNumerator;
            n0 = f64::INFINITY;
            converged = true;
        }
        let denominator = n0 + rest;
        let (epsilon, w2) = match convention {
            Convention::InfiniteNumerator => (1.0, f64::INFINITY),
            _ if denominator <= 0.0 => {
                convention = Convention::ZeroDistance;
                (0.0, 0.0)
            }
            _ => ((n0 / denominator).clamp(0.0, 1.0), denominator.sqrt()),
        };
        // with a weight the integrals are scaled by e^{-shift}; undo for reporting
        let scale = shift.exp();
        DepartureReport {
            epsilon,
            w2: if weight.is_some() { (denominator * scale).sqrt() } else { w2 },
            numerator: n0 * scale,
            denominator: denominator * scale,
            a0: sets.a0.clone(),
            convention,
            converged,
        }
    }
}

/// Truncated integrals over A0 ∩ [δ, 1−δ] for δ = 10^-2, 10^-4, ...; the
/// numerator is declared infinite when successive increments keep growing by
/// more than a factor 2.
fn numerator_diverges<F: Fn(f64, f64) -> f64>(f: &F, a0: &IntervalSet) -> bool {
    let mut vals = Vec::new();
    for k in 1..=4 {
        let delta = 10f64.powi(-2 * k);
        let segs: Vec<(f64, f64)> = a0
            .intervals()
            .iter()
            .map(|&(l, r)| (l.max(delta), r.min(1.0 - delta)))
            .filter(|(l, r)| r > l)
            .collect();
        let r = integrate_segments(&segs, |_, u| f(u, 1.0 - u), QuadOptions::rel(1e-8));
        vals.push(r.value);
    }
    let inc: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    inc.len() == 3 && inc[0] > 0.0 && inc[1] > 2.0 * inc[0] && inc[2] > 2.0 * inc[1]
}

fn empirical_departure(x: &Distribution, y: &Distribution) -> Result<Option<DepartureReport>> {
    match (x, y) {
        (Distribution::Empirical(sx), Distribution::Empirical(sy)) => {
            let (n0, n1, a0) = empirical_split(sx, sy);
            let den = n0 + n1;
            let (epsilon, convention) =
                if den > 0.0 { (n0 / den, Convention::None) } else { (0.0, Convention::ZeroDistance) };
            Ok(Some(DepartureReport {
                epsilon,
                w2: den.sqrt(),
                numerator: n0,
                denominator: den,
                a0: IntervalSet::new(a0)?,
                convention,
                converged: true,
            }))
        }
        (Distribution::Empirical(_), _) | (_, Distribution::Empirical(_)) => Err(Error::Unsupported(
            "mixing an empirical sample with a continuous law is not supported".into(),
        )),
        _ => Ok(None),
    }
}

/// ε(X,Y): share of W2² carried by {F_X⁻¹ > F_Y⁻¹}, the departure from X ≤st Y.
pub fn departure(x: &Distribution, y: &Distribution) -> Result<DepartureReport> {
    departure_with(x, y, &DepartureOptions::default())
}

pub fn departure_with(x: &Distribution, y: &Distribution, opts: &DepartureOptions) -> Result<DepartureReport> {
    x.require_second_moment()?;
    y.require_second_moment()?;
    if let Some(r) = empirical_departure(x, y)? {
        return Ok(r);
    }
    let pair = BaselinePair::with_options(x.clone(), y.clone(), opts)?;
    Ok(pair.departure_weighted(None, opts.quad))
}

pub fn w2_distance(x: &Distribution, y: &Distribution) -> Result<f64> {
    Ok(departure(x, y)?.w2)
}

/// ‖F_Y − F_X‖₁⁻¹ ∫_{B0} (F_Y − F_X) dx with B0 = {F_X < F_Y}.
pub fn departure_l1(x: &Distribution, y: &Distribution) -> Result<f64> {
    for d in [x, y] {
        if !d.has_finite_first_moment() {
            return Err(Error::Unsupported(format!("{d} has no finite mean")));
        }
    }
    let p = 1e-9;
    let lo = x.quantile_pair(p, 1.0 - p).min(y.quantile_pair(p, 1.0 - p));
    let hi = x.quantile_pair(1.0 - p, p).max(y.quantile_pair(1.0 - p, p));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let diff = |t: f64| y.cdf(t) - x.cdf(t);
    let grid = 4096;
    let pts: Vec<f64> = (0..=grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect();
    let mut edges = vec![lo];
    for w in pts.windows(2) {
        let (a, b) = (diff(w[0]), diff(w[1]));
        if (a > 0.0) != (b > 0.0) {
            let pos = a > 0.0;
            let (l, r) = bisect_predicate(|t| (diff(t) > 0.0) == pos, w[0], w[1], 1e-13 * (1.0 + w[1].abs()));
            edges.push(0.5 * (l + r));
        }
    }
    for d in [x, y] {
        if let Distribution::Empirical(s) = d {
            edges.extend(s.values().iter().cloned().filter(|&v| v > lo && v < hi));
        }
    }
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let segs: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let opts = QuadOptions { rel_tol: 1e-8, max_intervals: 20_000, ..Default::default() };
    let pos = integrate_segments(&segs, |_, t| diff(t).max(0.0), opts);
    let abs = integrate_segments(&segs, |_, t| diff(t).abs(), opts);
    if abs.value <= 0.0 {
        return Ok(0.0);
    }
    Ok((pos.value / abs.value).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UsualOrder {
    XBelowY,
    YBelowX,
    Equal,
    Crossing,
}

pub fn usual_order_verdict(x: &Distribution, y: &Distribution) -> Result<UsualOrder> {
    let s = crossing_sets_with(x, y, DEFAULT_GRID, Exec::default())?;
    Ok(if s.a2.is_empty() {
        UsualOrder::Equal
    } else if s.a0.is_empty() {
        UsualOrder::XBelowY
    } else if s.a1.is_empty() {
        UsualOrder::YBelowX
    } else {
        UsualOrder::Crossing
    })
}
