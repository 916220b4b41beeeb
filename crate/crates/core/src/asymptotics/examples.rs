use crate::dist::{Distribution, PiecewiseCdf, Segment};
use crate::error::{domain, Result};
use crate::sim::chunk_rng;
use crate::wasserstein::departure;
use rand::Rng;
use serde::Serialize;

fn shifted_law(n: f64, root: f64, center: f64) -> Result<Distribution> {
    let lower = -root;
    let h = 1.0 / (2.0 * n);
    let segments = vec![
        Segment::ExpLower { coef: h, shift: root },
        Segment::Affine { slope: 1.0, x0: lower, y0: h },
        Segment::Affine { slope: (1.0 / n) / (center + root - h), x0: center, y0: 2.0 / n },
        Segment::Affine { slope: n - 3.0, x0: center, y0: 2.0 / n },
        Segment::ExpUpper { coef: 1.0 / n, shift: center + 1.0 / n },
    ];
    let breaks = vec![lower, lower + h, center, center + 1.0 / n];
    Ok(Distribution::piecewise(PiecewiseCdf::new(breaks, segments)?))
}

/// The piecewise pair (X_n, Y_n): X_n puts mass 1 − 3/n near b, Y_n near a,
/// with thin exponential tails and a long flat stretch reaching −√n/2
/// (X_n) or −√n (Y_n).
pub fn counterexample_pair(n: u64, a: f64, b: f64) -> Result<(Distribution, Distribution)> {
    if !(a > b && b > 0.0) {
        return domain(format!("counterexample needs a > b > 0, got a={a}, b={b}"));
    }
    if n < 4 {
        return domain(format!("counterexample needs n >= 4, got {n}"));
    }
    let nf = n as f64;
    let x = shifted_law(nf, 0.5 * nf.sqrt(), b)?;
    let y = shifted_law(nf, nf.sqrt(), a)?;
    Ok((x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub trials: usize,
    pub seed: u64,
    pub complementarity_max_err: f64,
    pub location_scale_max_err: f64,
    pub negation_max_err: f64,
    pub triangle_max_excess: f64,
    pub transitivity_failures: usize,
    pub ordered_triple_max_eps: f64,
    pub range_violations: usize,
    pub passed: bool,
}

fn random_law<R: Rng>(rng: &mut R) -> Result<Distribution> {
    let mu = rng.gen_range(-2.0..2.0);
    let s = rng.gen_range(0.5..2.0);
    let base = match rng.gen_range(0..4) {
        0 => Distribution::normal(0.0, 1.0)?,
        1 => Distribution::student_t(rng.gen_range(3..12) as f64)?,
        2 => Distribution::uniform(-1.0, 1.0)?,
        _ => Distribution::exponential(1.0)?,
    };
    Distribution::location_scale(mu, s, base)
}

/// Randomised checks of the measure's structural properties on analytic
/// laws: ε(X,Y) + ε(Y,X) = 1, invariance under increasing affine maps,
/// the negation rule, the W2 triangle inequality, the transitivity
/// surrogate ε(X,Z) ≤ 3(C₁ε(X,Y) + C₂ε(Y,Z)), and ε = 0 along ordered shifts.
pub fn property_harness(trials: usize, seed: u64) -> Result<HarnessReport> {
    if trials == 0 {
        return domain("property harness needs at least one trial");
    }
    let mut rng = chunk_rng(seed, 0);
    let mut rep = HarnessReport {
        trials,
        seed,
        complementarity_max_err: 0.0,
        location_scale_max_err: 0.0,
        negation_max_err: 0.0,
        triangle_max_excess: f64::NEG_INFINITY,
        transitivity_failures: 0,
        ordered_triple_max_eps: 0.0,
        range_violations: 0,
        passed: false,
    };
    let mut done = 0;
    while done < trials {
        let (x, y, z) = (random_law(&mut rng)?, random_law(&mut rng)?, random_law(&mut rng)?);
        let xy = departure(&x, &y)?;
        let yx = departure(&y, &x)?;
        if xy.w2 < 1e-6 {
            continue;
        }
        done += 1;
        for e in [xy.epsilon, yx.epsilon] {
            if !(0.0..=1.0).contains(&e) {
                rep.range_violations += 1;
            }
        }
        rep.complementarity_max_err = rep.complementarity_max_err.max((xy.epsilon + yx.epsilon - 1.0).abs());

        let a = rng.gen_range(-3.0..3.0);
        let b = rng.gen_range(0.2..3.0);
        let ls = |d: &Distribution, s: f64| Distribution::location_scale(a, s * b, d.clone());
        let pos = departure(&ls(&x, 1.0)?, &ls(&y, 1.0)?)?;
        let neg = departure(&ls(&x, -1.0)?, &ls(&y, -1.0)?)?;
        rep.location_scale_max_err =
            rep.location_scale_max_err.max((pos.epsilon - xy.epsilon).abs()).max((neg.epsilon - yx.epsilon).abs());
        let flip = |d: &Distribution| Distribution::location_scale(0.0, -1.0, d.clone());
        let negated = departure(&flip(&y)?, &flip(&x)?)?;
        rep.negation_max_err = rep.negation_max_err.max((negated.epsilon - xy.epsilon).abs());

        let xz = departure(&x, &z)?;
        let yz = departure(&y, &z)?;
        rep.triangle_max_excess = rep.triangle_max_excess.max(xz.w2 - xy.w2 - yz.w2);
        if xz.w2 > 1e-6 {
            let d = xz.w2 * xz.w2;
            let bound = 3.0 * (xy.w2 * xy.w2 / d * xy.epsilon + yz.w2 * yz.w2 / d * yz.epsilon);
            if xz.epsilon > bound + 1e-8 {
                rep.transitivity_failures += 1;
            }
        }

        let s1 = rng.gen_range(0.1..1.0);
        let s2 = rng.gen_range(0.1..1.0);
        let y2 = Distribution::location_scale(s1, 1.0, x.clone())?;
        let z2 = Distribution::location_scale(s1 + s2, 1.0, x.clone())?;
        for (p, q) in [(&x, &y2), (&y2, &z2), (&x, &z2)] {
            rep.ordered_triple_max_eps = rep.ordered_triple_max_eps.max(departure(p, q)?.epsilon);
        }
    }
    rep.passed = rep.complementarity_max_err <= 1e-8
        && rep.location_scale_max_err <= 1e-8
        && rep.negation_max_err <= 1e-8
        && rep.triangle_max_excess <= 1e-8
        && rep.transitivity_failures == 0
        && rep.ordered_triple_max_eps == 0.0
        && rep.range_violations == 0;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_shape() {
        let (x, y) = counterexample_pair(4, 2.0, 1.0).unwrap();
        assert!((x.cdf(1.25) - 0.75).abs() < 1e-12);
        assert!((y.cdf(2.25) - 0.75).abs() < 1e-12);
        assert!(counterexample_pair(3, 2.0, 1.0).is_err());
        assert!(counterexample_pair(4, 1.0, 2.0).is_err());
    }
}
