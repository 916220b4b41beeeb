use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use stochord::asymptotics::{
    asp_verdict, binomial_limit_probe, bound_validation, condition_probe, counterexample_pair, dast_verdict, decay_bound,
    distorted_departure, precedence_probability, property_harness, sweep, AspVerdict, DastVerdict,
};
use stochord::distortion::{Distortion, FamilyTemplate, IndexSequence};
use stochord::{departure, distort, Distribution, Exec};

fn normal() -> Distribution {
    Distribution::normal(0.0, 1.0).unwrap()
}

fn t4() -> Distribution {
    Distribution::student_t(4.0).unwrap()
}

fn eps_os(n: u64, g: f64) -> f64 {
    distorted_departure(&normal(), &t4(), &Distortion::order_stat(n, g).unwrap()).unwrap().epsilon
}

#[test]
fn distorted_departure_examples() {
    for g in [0.0, 0.4, 1.0] {
        let a = distorted_departure(&normal(), &t4(), &Distortion::order_stat(1, g).unwrap()).unwrap();
        let b = departure(&normal(), &t4()).unwrap();
        assert!((a.epsilon - b.epsilon).abs() <= 1e-10);
    }
    assert!((eps_os(2, 1.0) - 0.0134944).abs() <= 5e-4);
    assert!((eps_os(3, 0.5) - 0.5).abs() <= 1e-8);
}

#[test]
fn max_sweep_decays() {
    let ns: Vec<u64> = (2..=15).collect();
    let s = sweep(&normal(), &t4(), &FamilyTemplate::order_stat(1.0), &ns, Exec::default()).unwrap();
    assert!(s.epsilons[0] > *s.epsilons.last().unwrap());
    assert!(*s.epsilons.last().unwrap() < 1e-7);
    assert_eq!(dast_verdict(&s, 1e-6, 3), DastVerdict::Holds);
    let b = decay_bound(&normal(), &t4(), 1.0, 0.1).unwrap();
    assert!(bound_validation(&s, &b));
}

#[test]
fn strict_decay_from_three() {
    let ns: Vec<u64> = (3..=40).collect();
    let s = sweep(&normal(), &t4(), &FamilyTemplate::order_stat(1.0), &ns, Exec::default()).unwrap();
    for w in s.epsilons.windows(2) {
        assert!(w[1] < w[0], "{:?}", w);
    }
    let b = decay_bound(&normal(), &t4(), 1.0, 0.1).unwrap();
    assert!(bound_validation(&s, &b));
    assert!(s.fitted_log_slope.unwrap() <= (0.5f64 / 0.9).ln());
}

#[test]
fn min_sweep_mirrors_max() {
    // the n = 10 cell at γ = 0 sits right at 1 − 1e-7 and is judged by the acceptance run
    assert!(eps_os(15, 0.0) > 0.9999999);
    for n in 2..=15 {
        let s = eps_os(n, 0.0) + eps_os(n, 1.0);
        assert!((s - 1.0).abs() <= 1e-6, "n={n}: {s}");
    }
}

#[test]
fn median_symmetry_odd_n() {
    for n in [1, 3, 5, 9, 15, 31, 101] {
        assert!((eps_os(n, 0.5) - 0.5).abs() <= 1e-8, "n={n}");
    }
}

#[test]
fn identical_laws_sweep() {
    let ns: Vec<u64> = (2..=12).collect();
    let s = sweep(&t4(), &t4(), &FamilyTemplate::order_stat(0.3), &ns, Exec::default()).unwrap();
    assert!(s.epsilons.iter().all(|&e| e == 0.0));
    assert_eq!(dast_verdict(&s, 1e-6, 5), DastVerdict::Holds);
}

#[test]
fn median_sweep_fails() {
    let ns: Vec<u64> = (2..=30).collect();
    let s = sweep(&normal(), &t4(), &FamilyTemplate::order_stat(0.5), &ns, Exec::default()).unwrap();
    assert_eq!(dast_verdict(&s, 1e-6, 5), DastVerdict::Fails);
}

#[test]
fn decay_bound_examples() {
    let b = decay_bound(&normal(), &t4(), 1.0, 0.1).unwrap();
    assert!((b.z - 0.5 / 0.9).abs() < 1e-9);
    assert!(b.c.is_none());

    let x = normal();
    let y = Distribution::normal(1.0, 1.0).unwrap();
    for g in [0.0, 0.3, 1.0] {
        assert_eq!(decay_bound(&x, &y, g, 0.1).unwrap().z, 0.0);
    }

    let b = decay_bound(&normal(), &t4(), 0.8, 0.05).unwrap();
    assert!((b.bq.fx_c - 0.5).abs() < 1e-9 && (b.bq.fx_a - 0.8).abs() < 1e-12 && b.bq.fx_d == 1.0);
    let want = (0.5f64 / 0.75).powf(0.8) * (0.5f64 / 0.25).powf(0.2);
    assert!((b.z - want).abs() < 1e-8, "{} vs {want}", b.z);
}

#[test]
fn decay_bound_rejects_inadmissible_eps() {
    assert!(decay_bound(&normal(), &t4(), 1.0, 0.5).is_err());
    assert!(decay_bound(&normal(), &t4(), 0.8, 0.4).is_err());
}

#[test]
fn bound_validation_examples() {
    let x = normal();
    let y = Distribution::normal(1.0, 1.0).unwrap();
    let ns: Vec<u64> = (2..=20).collect();
    let s = sweep(&x, &y, &FamilyTemplate::order_stat(1.0), &ns, Exec::default()).unwrap();
    assert!(s.epsilons.iter().all(|&e| e == 0.0));
    assert!(bound_validation(&s, &decay_bound(&x, &y, 1.0, 0.1).unwrap()));

    assert!(eps_os(100, 0.75) < 1e-7);
    let b = decay_bound(&normal(), &t4(), 0.75, 0.05).unwrap();
    assert!(b.z < 1.0);
    let ns: Vec<u64> = (2..=100).collect();
    let s = sweep(&normal(), &t4(), &FamilyTemplate::order_stat(0.75), &ns, Exec::default()).unwrap();
    assert!(bound_validation(&s, &b));
}

#[test]
fn precedence_identical_laws() {
    for (n, g) in [(1, 0.5), (4, 1.0), (11, 0.5), (25, 0.2)] {
        let p = precedence_probability(&t4(), &t4(), n, g).unwrap();
        assert!((p - 0.5).abs() < 1e-9);
    }
}

/// Standard normal by Box–Muller and t(4) as Z/√(χ²₄/4) with χ²₄ = −2 ln(U₁U₂).
fn draw<R: Rng>(rng: &mut R, is_t: bool) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    if is_t {
        let chi = -2.0 * ((1.0 - rng.gen::<f64>()) * (1.0 - rng.gen::<f64>())).ln();
        z / (chi / 4.0).sqrt()
    } else {
        z
    }
}

#[test]
fn precedence_matches_simulated_maxima() {
    const PATHS: usize = 1_000_000;
    let n = 10;
    let p = precedence_probability(&normal(), &t4(), n, 1.0).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(4242);
    let mut hits = 0usize;
    for _ in 0..PATHS {
        let x = (0..n).map(|_| draw(&mut rng, false)).fold(f64::NEG_INFINITY, f64::max);
        let y = (0..n).map(|_| draw(&mut rng, true)).fold(f64::NEG_INFINITY, f64::max);
        hits += (x <= y) as usize;
    }
    let mc = hits as f64 / PATHS as f64;
    let se = (mc * (1.0 - mc) / PATHS as f64).sqrt();
    assert!((p - mc).abs() <= 3.0 * se, "integral {p} vs simulated {mc} (se {se})");
}

#[test]
fn precedence_above_half_at_upper_quantile() {
    let mut prev = 0.5;
    for n in [10, 25, 50, 100, 200, 400] {
        let p = precedence_probability(&normal(), &t4(), n, 0.8).unwrap();
        assert!(p > prev, "n={n}: {p} after {prev}");
        prev = p;
    }
}

#[test]
fn asp_examples() {
    let ns = [10, 20, 40];
    let r = asp_verdict(&normal(), &t4(), &IndexSequence::constant(0.8), &ns).unwrap();
    assert_eq!(r.verdict, AspVerdict::LeqAsp);
    assert!(r.by_sufficient_condition);
    assert!((r.dist_a0 - 0.3).abs() < 1e-9);

    let r = asp_verdict(&normal(), &t4(), &IndexSequence::constant(0.5), &ns).unwrap();
    assert!(!r.by_sufficient_condition);
    assert_eq!(r.dist_a0, 0.0);
    assert_eq!(r.precedence.len(), ns.len());

    let r = asp_verdict(&t4(), &t4(), &IndexSequence::constant(0.5), &ns).unwrap();
    assert_eq!(r.verdict, AspVerdict::EqAsp);
    assert!(r.dist_a2.is_infinite());
}

#[test]
fn binomial_limit_examples() {
    let ns: Vec<u64> = (1..=201).step_by(2).collect();
    let p = binomial_limit_probe(0.5, 0.5, &ns).unwrap();
    assert!(p.phi_values.iter().all(|&v| v == 0.5));

    let p = binomial_limit_probe(0.5, 0.55, &[5000]).unwrap();
    assert!(p.phi_values[0] > 0.99);
    let p = binomial_limit_probe(0.5, 0.45, &[50, 500, 5000]).unwrap();
    assert!(p.scaled_pmf[2] < 1e-6);
    assert!(p.scaled_pmf.windows(2).all(|w| w[1] < w[0]));
    // at u = γ the scaled pmf diverges
    let p = binomial_limit_probe(0.5, 0.5, &[51, 501, 5001]).unwrap();
    assert!(p.scaled_pmf.windows(2).all(|w| w[1] > w[0]));
    assert!(binomial_limit_probe(0.5, 1.5, &[5]).is_err());
}

#[test]
fn condition_probe_examples() {
    let ns = [50, 200, 1000];
    let r = condition_probe(&FamilyTemplate::order_stat(0.5), &ns, 0.05).unwrap();
    assert!(r.c3_pass && r.c4_pass, "{r:?}");
    assert_eq!(r.c4_window_consistent, Some(true));
    assert!(r.derivative_vanishes_off_gamma);

    let r = condition_probe(&FamilyTemplate::mixture(vec![0.3, 0.7], vec![0.25, 0.75]), &ns, 0.05).unwrap();
    assert!(r.c3_pass && r.c4_pass, "{r:?}");
    assert_eq!(r.gammas, vec![0.25, 0.75]);

    let r = condition_probe(&FamilyTemplate::Record { k: 1 }, &ns, 0.05).unwrap();
    assert!(r.derivative_vanishes_off_gamma);
    assert_eq!(r.gammas, vec![1.0]);
}

#[test]
fn counterexample_lower_bound_and_bounded_distance() {
    let (a, b) = (2.0, 1.0);
    let c = 1.0 / 3.0 + (b - a) * (b - a) + (b - a) / 6.0;
    let mut w2sq = Vec::new();
    for n in [4, 10, 50] {
        let (x, y) = counterexample_pair(n, a, b).unwrap();
        let r = departure(&x, &y).unwrap();
        assert!(r.epsilon > 3.0 / (32.0 * c), "n={n}: {}", r.epsilon);
        w2sq.push(r.w2 * r.w2);
    }
    assert!(w2sq.iter().all(|&v| v.is_finite() && v < 2.0), "{w2sq:?}");
    assert!(w2sq[2] - w2sq[1] < w2sq[1] - w2sq[0]);
    assert!(counterexample_pair(3, a, b).is_err());
    assert!(counterexample_pair(10, 1.0, 2.0).is_err());
}

#[test]
fn harness_passes() {
    let r = property_harness(40, 7).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.location_scale_max_err <= 1e-8 && r.negation_max_err <= 1e-8);
    assert_eq!(r.ordered_triple_max_eps, 0.0);
    assert_eq!(r.transitivity_failures, 0);
}

#[test]
fn affine_and_negated_pairs() {
    let x = normal();
    let y = Distribution::normal(0.3, 2.0).unwrap();
    let e = departure(&x, &y).unwrap().epsilon;
    // ψ(x) = 2x + 1
    let (px, py) = (Distribution::normal(1.0, 2.0).unwrap(), Distribution::normal(1.6, 4.0).unwrap());
    assert!((departure(&px, &py).unwrap().epsilon - e).abs() <= 1e-8);
    // ψ(x) = −x, arguments swapped
    let ny = Distribution::normal(-0.3, 2.0).unwrap();
    assert!((departure(&ny, &x).unwrap().epsilon - e).abs() <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn u_domain_matches_direct(n in 2u64..=20, g in 0.0f64..=1.0) {
        let d = Distortion::order_stat(n, g).unwrap();
        let a = distorted_departure(&normal(), &t4(), &d).unwrap().epsilon;
        let x = distort(&normal(), &d).unwrap();
        let y = distort(&t4(), &d).unwrap();
        let b = departure(&x, &y).unwrap().epsilon;
        prop_assert!((a - b).abs() <= 1e-7, "n={} γ={}: {} vs {}", n, g, a, b);
    }
}
