use proptest::prelude::*;
use stochord::asymptotics::counterexample_pair;
use stochord::dist::{empirical_cdf, galton_rank};
use stochord::{Distribution, EmpiricalSample, Error};

fn sample(v: &[f64]) -> EmpiricalSample {
    EmpiricalSample::new(v.to_vec()).unwrap()
}

#[test]
fn cdf_examples() {
    assert_eq!(Distribution::normal(0.0, 1.0).unwrap().cdf(0.0), 0.5);
    assert_eq!(Distribution::student_t(4.0).unwrap().cdf(0.0), 0.5);
    assert!((Distribution::uniform(0.0, 2.0).unwrap().cdf(0.5) - 0.25).abs() < 1e-16);
}

#[test]
fn quantile_examples() {
    assert_eq!(Distribution::normal(0.0, 1.0).unwrap().quantile(0.5).unwrap(), 0.0);
    assert!((Distribution::uniform(0.0, 1.0).unwrap().quantile(0.3).unwrap() - 0.3).abs() < 1e-16);
}

/// t(4) CDF by Simpson's rule on its density, inverted by bisection.
fn t4_quantile_oracle(p: f64) -> f64 {
    let pdf = |x: f64| 0.375 * (1.0 + x * x / 4.0).powf(-2.5);
    let cdf = |x: f64| {
        let m = 20_000;
        let h = x / m as f64;
        let mut s = pdf(0.0) + pdf(x);
        for i in 1..m {
            s += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + s * h / 3.0
    };
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn t4_quantile_against_quadrature_oracle() {
    let t = Distribution::student_t(4.0).unwrap();
    for p in [0.6, 0.9, 0.975, 0.999] {
        let want = t4_quantile_oracle(p);
        let got = t.quantile(p).unwrap();
        assert!((got - want).abs() < 1e-10 * want.max(1.0), "p={p}: {got} vs {want}");
    }
    assert!((t.quantile(0.975).unwrap() - 2.7764451052).abs() < 1e-9);
}

#[test]
fn quantile_rejects_levels_outside_unit_interval() {
    let d = Distribution::normal(0.0, 1.0).unwrap();
    for u in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
        assert!(matches!(d.quantile(u), Err(Error::Domain(_))), "{u}");
    }
}

#[test]
fn constructors_validate() {
    assert!(Distribution::normal(0.0, 0.0).is_err());
    assert!(Distribution::student_t(-1.0).is_err());
    assert!(Distribution::uniform(1.0, 1.0).is_err());
    assert!(Distribution::exponential(0.0).is_err());
    assert!(Distribution::location_scale(0.0, 0.0, Distribution::normal(0.0, 1.0).unwrap()).is_err());
}

#[test]
fn second_moment_flags() {
    for (nu, finite) in [(1.0, false), (2.0, false), (2.01, true), (4.0, true)] {
        assert_eq!(Distribution::student_t(nu).unwrap().has_finite_second_moment(), finite, "{nu}");
    }
}

#[test]
fn empirical_cdf_examples() {
    assert!((empirical_cdf(&sample(&[1.0, 2.0, 3.0]), 2.5) - 2.0 / 3.0).abs() < 1e-16);
    assert_eq!(empirical_cdf(&sample(&[1.0, 2.0, 3.0]), 0.0), 0.0);
    assert!((empirical_cdf(&sample(&[1.0, 1.0, 2.0]), 1.0) - 2.0 / 3.0).abs() < 1e-16);
}

#[test]
fn galton_rank_examples() {
    assert_eq!(galton_rank(&sample(&[1.0, 2.0, 3.0]), &sample(&[4.0, 5.0, 6.0])).unwrap(), 1.0);
    assert_eq!(galton_rank(&sample(&[5.0, 1.0, 3.0]), &sample(&[2.0, 4.0, 0.0])).unwrap(), 0.0);
    assert_eq!(galton_rank(&sample(&[1.0, 4.0]), &sample(&[2.0, 3.0])).unwrap(), 0.5);
    assert!(galton_rank(&sample(&[1.0]), &sample(&[1.0, 2.0])).is_err());
}

#[test]
fn empirical_sample_rejects_bad_input() {
    assert!(EmpiricalSample::new(vec![]).is_err());
    assert!(EmpiricalSample::new(vec![1.0, f64::NAN]).is_err());
    let s = EmpiricalSample::from_csv_text("3\n1\n\n2\n").unwrap();
    assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
}

#[test]
fn counterexample_cdf_is_continuous() {
    for n in [4u64, 10, 50] {
        let (x, y) = counterexample_pair(n, 2.0, 1.0).unwrap();
        for d in [&x, &y] {
            let Distribution::Piecewise(p) = d else { panic!("piecewise expected") };
            for &b in p.breakpoints() {
                // a few ulps either side, so slope × gap stays far below the tolerance
                let h = 4e-16 * b.abs().max(1.0);
                let l = d.cdf(b - h);
                let r = d.cdf(b + h);
                assert!((l - r).abs() < 1e-12, "n={n} jump {} at {b}", (l - r).abs());
            }
        }
        let nf = n as f64;
        assert!((x.cdf(1.0 + 1.0 / nf) - (1.0 - 1.0 / nf)).abs() < 1e-12);
        assert!((y.cdf(2.0 + 1.0 / nf) - (1.0 - 1.0 / nf)).abs() < 1e-12);
    }
}

fn continuous_law() -> impl Strategy<Value = (Distribution, f64, f64)> {
    // (law, centre, scale) for building a ±6 scale grid
    prop_oneof![
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(m, s)| (Distribution::normal(m, s).unwrap(), m, s)),
        (1.0f64..30.0).prop_map(|nu| (Distribution::student_t(nu).unwrap(), 0.0, 1.0)),
        (0.2f64..5.0).prop_map(|r| (Distribution::exponential(r).unwrap(), 3.0 / r, 0.5 / r)),
        (-3.0f64..3.0, 0.1f64..4.0, 1.0f64..10.0).prop_map(|(a, b, nu)| {
            (Distribution::location_scale(a, b, Distribution::student_t(nu).unwrap()).unwrap(), a, b)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_inverts_cdf((d, c, s) in continuous_law()) {
        for k in 0..=48 {
            let x = c + s * (-6.0 + 0.25 * k as f64);
            let u = d.cdf(x);
            if u <= 0.0 || u >= 1.0 {
                continue;
            }
            let back = d.quantile_pair(u, d.sf(x));
            prop_assert!((back - x).abs() <= 1e-9 * (1.0 + x.abs()), "{} at x={}: {}", d, x, back);
        }
    }

    #[test]
    fn cdf_and_quantile_are_monotone((d, c, s) in continuous_law()) {
        let mut last = 0.0;
        for k in 0..=200 {
            let v = d.cdf(c + s * (-8.0 + 0.08 * k as f64));
            prop_assert!(v >= last && (0.0..=1.0).contains(&v));
            last = v;
        }
        let mut last = f64::NEG_INFINITY;
        for k in 1..1000 {
            let q = d.quantile(k as f64 / 1000.0).unwrap();
            prop_assert!(q >= last);
            last = q;
        }
    }

    #[test]
    fn location_scale_quantile_is_affine(a in -10.0f64..10.0, b in 0.01f64..10.0, u in 0.001f64..0.999) {
        let base = Distribution::student_t(5.0).unwrap();
        let d = Distribution::location_scale(a, b, base.clone()).unwrap();
        let want = a + b * base.quantile(u).unwrap();
        prop_assert!((d.quantile(u).unwrap() - want).abs() <= 1e-14 * (1.0 + want.abs()));
    }
}
