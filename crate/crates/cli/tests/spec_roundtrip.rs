use proptest::prelude::*;
use stochord_cli::{parse_distortion, parse_law, parse_spec, LawSpec, Spec};

fn law_strategy() -> impl Strategy<Value = LawSpec> {
    let r = -1e3f64..1e3;
    let p = 1e-3f64..1e3;
    prop_oneof![
        (r.clone(), p.clone()).prop_map(|(mu, sigma)| LawSpec::Normal { mu, sigma }),
        p.clone().prop_map(|nu| LawSpec::StudentT { nu }),
        (r.clone(), p.clone()).prop_map(|(a, w)| LawSpec::Uniform { a, b: a + w }),
        p.prop_map(|rate| LawSpec::Exponential { rate }),
        (4u64..500, 0.1f64..5.0, 0.01f64..1.0).prop_map(|(n, b, d)| LawSpec::CounterexampleX { n, a: b + d, b }),
        "[a-z]{1,8}\\.csv".prop_map(LawSpec::Empirical),
    ]
}

proptest! {
    #[test]
    fn law_round_trip(l in law_strategy()) {
        let text = l.to_string();
        let back = parse_law(&text).unwrap();
        prop_assert_eq!(&back, &l);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn order_stat_round_trip(n in 1u64..2000, g in 0.0f64..=1.0) {
        let d = parse_distortion(&format!("os(n={n},gamma={g})")).unwrap();
        let again = parse_distortion(&d.to_string()).unwrap();
        prop_assert_eq!(again, d);
    }

    #[test]
    fn mixture_round_trip(n in 1u64..500, a in 0.05f64..0.95, g1 in 0.0f64..0.5, g2 in 0.5f64..=1.0) {
        prop_assume!(g1 < g2);
        let text = format!("mix(n={n}; {a}@{g1}, {}@{g2})", 1.0 - a);
        let Ok(d) = parse_distortion(&text) else { return Ok(()) };
        prop_assert_eq!(parse_distortion(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn garbage_never_panics(s in "\\PC{0,40}") {
        let _ = parse_spec(&s);
    }
}

#[test]
fn spec_dispatch() {
    assert!(matches!(parse_spec("normal(0,1)").unwrap(), Spec::Law(LawSpec::Normal { .. })));
    assert!(matches!(parse_spec("os(n=10,gamma=0.5)").unwrap(), Spec::Distortion(_)));
    assert!(matches!(parse_spec("t(4)").unwrap(), Spec::Law(LawSpec::StudentT { nu }) if nu == 4.0));
    assert_eq!(parse_spec("record(n=3,k=2)").unwrap().clone(), Spec::Distortion(stochord::Distortion::record(3, 2).unwrap()));
}
