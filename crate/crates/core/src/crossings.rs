//! Where one quantile function exceeds the other.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::roots::bisect_predicate;
use serde::Serialize;

pub const DEFAULT_GRID: usize = 4096;
const BISECT_TOL: f64 = 5e-13;

/// Finite union of disjoint open subintervals of (0,1), in ascending order.
/// Adjacent intervals may share an endpoint.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(l, r) in &intervals {
            if !(0.0 <= l && l < r && r <= 1.0) {
                return Err(Error::Argument(format!("interval ({l},{r}) not inside (0,1)")));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::Argument("intervals overlap".into()));
        }
        Ok(IntervalSet { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn contains(&self, u: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l < u && u < r)
    }

    /// Membership of u given as (u, 1 − u); near 1 the complement decides,
    /// so points with u rounding to 1 are still placed correctly.
    pub fn contains_pair(&self, u: f64, ubar: f64) -> bool {
        if u <= ubar {
            self.contains(u)
        } else {
            self.intervals.iter().any(|&(l, r)| 1.0 - r < ubar && ubar < 1.0 - l)
        }
    }

    /// Union of two disjoint sets; intervals are kept as they are.
    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        IntervalSet { intervals: v }
    }

    /// sup(self ∩ (0, γ)).
    pub fn sup_below(&self, gamma: f64) -> Option<f64> {
        self.intervals.iter().filter(|&&(l, _)| l < gamma).map(|&(_, r)| r.min(gamma)).reduce(f64::max)
    }

    /// inf(self ∩ (γ, 1)).
    pub fn inf_above(&self, gamma: f64) -> Option<f64> {
        self.intervals.iter().filter(|&&(_, r)| r > gamma).map(|&(l, _)| l.max(gamma)).reduce(f64::min)
    }

    /// Distance from γ to the set; +∞ for the empty set, 0 on the closure.
    pub fn distance(&self, gamma: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(l, r)| {
                if gamma < l {
                    l - gamma
                } else if gamma > r {
                    gamma - r
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingSets {
    pub a0: IntervalSet,
    pub a1: IntervalSet,
    pub a2: IntervalSet,
    /// Transversal sign changes of h.
    pub crossings: Vec<f64>,
    /// Sets where |h| stays within tolerance.
    pub plateaus: Vec<(f64, f64)>,
    /// Every region boundary (crossings and plateau edges).
    pub boundaries: Vec<f64>,
}

fn sign_of(x: &Distribution, y: &Distribution, u: f64, ub: f64) -> i8 {
    let qx = x.quantile_pair(u, ub);
    let qy = y.quantile_pair(u, ub);
    let atol = 1e-12 * qx.abs().max(qy.abs()).max(1.0);
    let h = qx - qy;
    if h > atol {
        1
    } else if h < -atol {
        -1
    } else {
        0
    }
}

pub fn crossing_sets(x: &Distribution, y: &Distribution, grid_size: usize) -> Result<CrossingSets> {
    crossing_sets_with(x, y, grid_size, Exec::default())
}

pub fn crossing_sets_with(x: &Distribution, y: &Distribution, grid_size: usize, exec: Exec) -> Result<CrossingSets> {
    for d in [x, y] {
        if !d.is_continuous() {
            return Err(Error::Unsupported(format!(
                "crossing detection needs continuous laws; {d} is a step function"
            )));
        }
    }
    if grid_size < 64 {
        return Err(Error::Argument(format!("grid_size {grid_size} < 64")));
    }
    // (u, 1-u) pairs: uniform grid, dyadic points toward both ends, law breakpoints
    let mut pts: Vec<(f64, f64)> = (1..grid_size).map(|i| {
        let u = i as f64 / grid_size as f64;
        (u, 1.0 - u)
    }).collect();
    let k0 = (grid_size as f64).log2().ceil() as i32 + 1;
    for k in k0..=50 {
        let e = 2f64.powi(-k);
        pts.push((e, 1.0 - e));
        pts.push((1.0 - e, e));
    }
    for u in x.u_breakpoints().into_iter().chain(y.u_breakpoints()) {
        if u > 0.0 && u < 1.0 {
            pts.push((u, 1.0 - u));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);

    let raw: Vec<i8> = exec.map(&pts, |&(u, ub)| sign_of(x, y, u, ub));
    let n = raw.len();

    // Resolve isolated zeros: touch points take their neighbours' sign,
    // a zero between opposite signs is a crossing exactly at that point.
    let mut signs = raw.clone();
    let mut point_crossing = vec![false; n];
    let mut i = 0;
    while i < n {
        if raw[i] != 0 {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && raw[j + 1] == 0 {
            j += 1;
        }
        if i == j {
            let left = if i > 0 { raw[i - 1] } else { 0 };
            let right = if i + 1 < n { raw[i + 1] } else { 0 };
            if left != 0 && right != 0 && left != right {
                point_crossing[i] = true;
            } else if left != 0 {
                signs[i] = left;
            } else if right != 0 {
                signs[i] = right;
            }
        }
        i = j + 1;
    }

    // maximal runs of equal sign; an isolated crossing zero is its own run
    struct Run {
        sign: i8,
        first: usize,
        last: usize,
        point: bool,
    }
    let mut runs: Vec<Run> = Vec::new();
    for i in 0..n {
        match runs.last_mut() {
            Some(r) if !point_crossing[i] && !r.point && r.sign == signs[i] => r.last = i,
            _ => runs.push(Run { sign: signs[i], first: i, last: i, point: point_crossing[i] }),
        }
    }

    // boundary between consecutive runs
    let mut bounds: Vec<f64> = Vec::with_capacity(runs.len().saturating_sub(1));
    for w in runs.windows(2) {
        let (r, s) = (&w[0], &w[1]);
        let b = if s.point {
            pts[s.first].0
        } else if r.point {
            pts[r.first].0
        } else {
            let sgn = r.sign;
            let (lo, hi) = bisect_predicate(
                |u| sign_of(x, y, u, 1.0 - u) == sgn,
                pts[r.last].0,
                pts[s.first].0,
                BISECT_TOL,
            );
            0.5 * (lo + hi)
        };
        bounds.push(b);
    }

    let mut a0 = Vec::new();
    let mut a1 = Vec::new();
    let mut plateaus = Vec::new();
    let mut crossings = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        if r.point {
            crossings.push(pts[r.first].0);
            continue;
        }
        let start = if k == 0 { 0.0 } else { bounds[k - 1] };
        let end = if k + 1 == runs.len() { 1.0 } else { bounds[k] };
        if !(end > start) {
            continue;
        }
        match r.sign {
            1 => a0.push((start, end)),
            -1 => a1.push((start, end)),
            _ => plateaus.push((start, end)),
        }
        if k + 1 < runs.len() {
            let s = &runs[k + 1];
            if !s.point && r.sign != 0 && s.sign != 0 {
                crossings.push(bounds[k]);
            }
        }
    }
    let a0 = IntervalSet { intervals: a0 };
    let a1 = IntervalSet { intervals: a1 };
    let a2 = a0.union(&a1);
    Ok(CrossingSets { a0, a1, a2, crossings, plateaus, boundaries: bounds })
}

/// F_X at the boundary points c_γ, a_γ, b_γ, d_γ, obtained from A0 and A2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryQuantities {
    pub gamma: f64,
    pub fx_c: f64,
    pub fx_a: f64,
    pub fx_b: f64,
    pub fx_d: f64,
    pub left_empty: bool,
    pub right_empty: bool,
}

pub fn boundary_quantities(a0: &IntervalSet, a2: &IntervalSet, gamma: f64) -> BoundaryQuantities {
    let c = a0.sup_below(gamma);
    let d = a0.inf_above(gamma);
    BoundaryQuantities {
        gamma,
        fx_c: c.unwrap_or(0.0),
        fx_a: a2.sup_below(gamma).unwrap_or(0.0),
        fx_b: a2.inf_above(gamma).unwrap_or(1.0),
        fx_d: d.unwrap_or(1.0),
        left_empty: c.is_none(),
        right_empty: d.is_none(),
    }
}

/// The theorem's ordering hypotheses, optionally with the δ-window variant.
pub fn hypothesis_check(bq: &BoundaryQuantities, delta: Option<f64>) -> bool {
    let base = (bq.left_empty || bq.fx_c < bq.fx_a) && (bq.right_empty || bq.fx_b < bq.fx_d);
    if !base {
        return false;
    }
    match delta {
        None => true,
        Some(dl) => {
            let left = bq.fx_a <= 0.0 || bq.fx_c.max(bq.gamma - dl) < bq.fx_a;
            let right = bq.fx_b >= 1.0 || bq.fx_b < bq.fx_d.min(bq.gamma + dl);
            left && right
        }
    }
}
