use super::tail_log_slope;
use crate::dist::Distribution;
use crate::distortion::{Distortion, FamilyTemplate};
use crate::error::Result;
use crate::exec::Exec;
use crate::wasserstein::{BaselinePair, DepartureOptions, DepartureReport};
use serde::Serialize;

pub const DAST_THRESHOLD: f64 = 1e-6;
pub const DAST_WINDOW: usize = 5;

pub const TABLE1_NS: [u64; 11] = [2, 3, 4, 5, 10, 15, 20, 25, 30, 50, 100];
pub const TABLE1_GAMMAS: [f64; 9] = [0.0, 0.25, 0.4, 0.49, 0.5, 0.51, 0.6, 0.75, 1.0];

/// ε for (φ∘F_X, φ∘F_Y), integrated in the baseline u-domain with weight φ'.
pub fn distorted_departure(x: &Distribution, y: &Distribution, d: &Distortion) -> Result<DepartureReport> {
    let opts = DepartureOptions::default();
    let pair = BaselinePair::with_options(x.clone(), y.clone(), &opts)?;
    Ok(pair.departure_weighted(Some(d), opts.quad))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub indices: Vec<u64>,
    pub epsilons: Vec<f64>,
    pub w2s: Vec<f64>,
    pub fitted_log_slope: Option<f64>,
}

pub fn sweep(x: &Distribution, y: &Distribution, family: &FamilyTemplate, ns: &[u64], exec: Exec) -> Result<SweepResult> {
    let opts = DepartureOptions { exec, ..Default::default() };
    let pair = BaselinePair::with_options(x.clone(), y.clone(), &opts)?;
    sweep_pair(&pair, family, ns, exec)
}

/// Sweep against precomputed crossing sets.
pub fn sweep_pair(pair: &BaselinePair, family: &FamilyTemplate, ns: &[u64], exec: Exec) -> Result<SweepResult> {
    let quad = DepartureOptions::default().quad;
    let reports = exec.map(ns, |&n| -> Result<DepartureReport> {
        let d = family.at(n)?;
        Ok(pair.departure_weighted(Some(&d), quad))
    });
    let mut epsilons = Vec::with_capacity(ns.len());
    let mut w2s = Vec::with_capacity(ns.len());
    for r in reports {
        let r = r?;
        epsilons.push(r.epsilon);
        w2s.push(r.w2);
    }
    let fitted_log_slope = tail_log_slope(ns, &epsilons);
    Ok(SweepResult { indices: ns.to_vec(), epsilons, w2s, fitted_log_slope })
}

/// Assembles a sweep from reports computed elsewhere, one per index, e.g.
/// for a family of pairs that is not a distortion of fixed baselines.
pub fn sweep_from_reports(indices: Vec<u64>, reports: Vec<DepartureReport>) -> SweepResult {
    let epsilons: Vec<f64> = reports.iter().map(|r| r.epsilon).collect();
    let w2s = reports.iter().map(|r| r.w2).collect();
    let fitted_log_slope = tail_log_slope(&indices, &epsilons);
    SweepResult { indices, epsilons, w2s, fitted_log_slope }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DastVerdict {
    Holds,
    Fails,
    Inconclusive,
}

impl DastVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DastVerdict::Holds => "holds",
            DastVerdict::Fails => "fails",
            DastVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Finite-n reading of ε → 0 along a sweep.
pub fn dast_verdict(s: &SweepResult, threshold: f64, window: usize) -> DastVerdict {
    let k = window.clamp(1, s.epsilons.len().max(1));
    if s.epsilons.is_empty() {
        return DastVerdict::Inconclusive;
    }
    let tail = &s.epsilons[s.epsilons.len() - k..];
    let xs: Vec<f64> = s.indices[s.indices.len() - k..].iter().map(|&n| n as f64).collect();
    let slope = super::ls_slope(&xs, tail).unwrap_or(0.0);
    if tail.iter().all(|&e| e < threshold) && slope <= 0.0 {
        DastVerdict::Holds
    } else if tail.iter().cloned().fold(f64::INFINITY, f64::min) > 10.0 * threshold {
        DastVerdict::Fails
    } else {
        DastVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableCell {
    pub n: u64,
    pub gamma: f64,
    pub epsilon: f64,
    pub w2: f64,
}

/// ε of order-statistic distortions on the (n, γ) grid of [`TABLE1_NS`] × [`TABLE1_GAMMAS`],
/// row-major in n.
pub fn table1(x: &Distribution, y: &Distribution, exec: Exec) -> Result<Vec<TableCell>> {
    let opts = DepartureOptions { exec, ..Default::default() };
    let pair = BaselinePair::with_options(x.clone(), y.clone(), &opts)?;
    let cells: Vec<(u64, f64)> =
        TABLE1_NS.iter().flat_map(|&n| TABLE1_GAMMAS.iter().map(move |&g| (n, g))).collect();
    exec.map(&cells, |&(n, gamma)| {
        let d = Distortion::order_stat(n, gamma)?;
        let r = pair.departure_weighted(Some(&d), opts.quad);
        Ok(TableCell { n, gamma, epsilon: r.epsilon, w2: r.w2 })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_of(eps: &[f64]) -> SweepResult {
        let n = eps.len() as u64;
        SweepResult { indices: (1..=n).collect(), epsilons: eps.to_vec(), w2s: vec![1.0; eps.len()], fitted_log_slope: None }
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(dast_verdict(&sweep_of(&[0.0; 6]), 1e-6, 5), DastVerdict::Holds);
        assert_eq!(dast_verdict(&sweep_of(&[0.5, 0.6, 0.55, 0.7, 0.6]), 1e-6, 3), DastVerdict::Fails);
        assert_eq!(dast_verdict(&sweep_of(&[1e-3, 1e-5, 1e-7, 1e-8]), 1e-6, 3), DastVerdict::Inconclusive);
        assert_eq!(dast_verdict(&sweep_of(&[1e-3, 1e-7, 1e-8, 1e-9]), 1e-6, 3), DastVerdict::Holds);
    }

    #[test]
    fn identity_distortion_matches_plain_departure() {
        let x = Distribution::normal(0.0, 1.0).unwrap();
        let y = Distribution::student_t(4.0).unwrap();
        let d = Distortion::order_stat(1, 0.3).unwrap();
        let a = distorted_departure(&x, &y, &d).unwrap();
        let b = crate::wasserstein::departure(&x, &y).unwrap();
        assert!((a.epsilon - b.epsilon).abs() < 1e-10);
        assert!((a.w2 - b.w2).abs() < 1e-10);
    }
}
