use cesorl_core::orlicz::Family;
use cesorl_core::*;

fn fam(f: Family, p: &[f64]) -> OrliczFunction {
    make_family(f, p).unwrap()
}

fn all_reports() -> Vec<WitnessReport> {
    let t = Tolerances::default();
    let mut out = Vec::new();
    for (f, p, d) in [
        (Family::CappedInfinite, vec![1.0], IntervalDomain::HalfLine),
        (Family::CappedInfinite, vec![1.0], IntervalDomain::UnitInterval),
        (Family::CappedFinite, vec![1.0], IntervalDomain::UnitInterval),
        (Family::ShiftedPower, vec![1.0, 1.0], IntervalDomain::HalfLine),
        (Family::ExpGap, vec![], IntervalDomain::UnitInterval),
        (Family::FlatZeroExp, vec![0.25], IntervalDomain::HalfLine),
        (Family::Power, vec![2.0], IntervalDomain::HalfLine),
    ] {
        out.push(oc_failure_witness(&fam(f, &p), d, 30, &t).unwrap());
        out.push(nontriviality(&fam(f, &p), d, &t).unwrap());
    }
    out.push(sm_failure_witness(&fam(Family::ShiftedPower, &[1.0, 1.0]), IntervalDomain::HalfLine, None, &t).unwrap());
    out.push(sm_failure_witness(&fam(Family::ShiftedPower, &[1.0, 2.0]), IntervalDomain::UnitInterval, None, &t).unwrap());
    out
}

#[test]
fn reports_round_trip_and_reverify() {
    let t = Tolerances::default();
    for r in all_reports() {
        let text = serde_json::to_string(&r).unwrap();
        let back: WitnessReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let v = verify_report(&back, &t).unwrap();
        assert!(v.ok, "{:?}: {:?}", r.kind, v.checks);
    }
}

#[test]
fn every_oc_failure_has_the_certified_shape() {
    for r in all_reports().into_iter().filter(|r| r.is_oc_failure()) {
        let x = r.element_named("x").unwrap();
        assert!(x.is_nonincreasing());
        let inf = r.certified_values.iter().any(|c| {
            c.description.starts_with("rho(2x")
                && matches!(&c.value, Certified::Modular { value } if !value.is_finite())
        });
        assert!(inf, "{:?}", r.kind);
        let phi = r.phi.build().unwrap();
        let plain = modular_step(&phi, x).unwrap();
        assert!(plain.is_finite() && plain.value() <= 1.0 + 1e-12, "{:?}: {plain:?}", r.kind);
    }
}

#[test]
fn tampered_reports_fail_verification() {
    let t = Tolerances::default();
    let phi = fam(Family::ExpGap, &[]);
    let mut r = oc_failure_witness(&phi, IntervalDomain::UnitInterval, 30, &t).unwrap();
    let x = r.elements[0].function.clone();
    r.elements[0].function = x.scale(0.5);
    assert!(!verify_report(&r, &t).unwrap().ok);

    let shifted = fam(Family::ShiftedPower, &[1.0, 1.0]);
    let mut r = sm_failure_witness(&shifted, IntervalDomain::HalfLine, None, &t).unwrap();
    let u = r.element_named("u").unwrap().scale(1.01);
    r.elements[0].function = u;
    assert!(!verify_report(&r, &t).unwrap().ok);
}

#[test]
fn suites_are_deterministic_in_the_seed() {
    let phi = fam(Family::Power, &[2.0]);
    let params = SuiteParams { corpus_size: 16, ..SuiteParams::default() };
    let a = monotonicity_suite(&phi, IntervalDomain::HalfLine, 30, &[0.25, 0.5], &params).unwrap();
    let b = monotonicity_suite(&phi, IntervalDomain::HalfLine, 30, &[0.25, 0.5], &params).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let other = SuiteParams { seed: 1, ..params };
    let c = monotonicity_suite(&phi, IntervalDomain::HalfLine, 30, &[0.25, 0.5], &other).unwrap();
    assert_ne!(a.sm_min_gap, c.sm_min_gap);
}

#[test]
fn cesaro_norm_dominates_on_nonincreasing_corpus() {
    let phi = fam(Family::Power, &[3.0]);
    let t = Tolerances::default();
    for x in hardy_corpus(IntervalDomain::HalfLine, 32, 11) {
        let x = rearrangement(&x);
        let plain = norm(&phi, &x, Space::Plain, &t).unwrap().value;
        let ces = norm(&phi, &x, Space::Cesaro, &t).unwrap().value;
        assert!(ces >= plain * (1.0 - 1e-9));
        assert!(ces <= 1.5 * plain * (1.0 + 1e-6));
    }
}
