//! Quantities indexed by n: distorted departures, sweeps and verdicts,
//! decay bounds, precedence probabilities and condition probes.

mod bound;
mod departure;
mod examples;
mod precedence;
mod probes;

pub use bound::{bound_validation, decay_bound, decay_bound_from_sets, DecayBound};
pub use departure::{
    dast_verdict, distorted_departure, sweep, sweep_from_reports, sweep_pair, table1, DastVerdict, SweepResult, TableCell,
    DAST_THRESHOLD, DAST_WINDOW, TABLE1_GAMMAS, TABLE1_NS,
};
pub use examples::{counterexample_pair, property_harness, HarnessReport};
pub use precedence::{asp_verdict, precedence_probability, precedence_probability_pair, AspReport, AspVerdict};
pub use probes::{binomial_limit_probe, condition_probe, BinomialProbe, C3Witness, ConditionProbeReport};

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two points.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Slope of ln ε against n − 1 over the tail half, positive values only.
pub(crate) fn tail_log_slope(indices: &[u64], eps: &[f64]) -> Option<f64> {
    let start = indices.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = indices[start..]
        .iter()
        .zip(&eps[start..])
        .filter(|(_, &e)| e > 0.0)
        .map(|(&n, &e)| ((n as f64) - 1.0, e.ln()))
        .unzip();
    ls_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        assert_eq!(ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]), Some(2.0));
        assert_eq!(ls_slope(&[1.0], &[1.0]), None);
        let s = tail_log_slope(&[1, 2, 3, 4], &[1.0, 0.5, 0.25, 0.125]).unwrap();
        assert!((s - 0.5f64.ln()).abs() < 1e-14);
    }
}
