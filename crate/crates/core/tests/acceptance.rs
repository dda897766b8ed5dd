use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cesorl_core::indices::EstimateStatus;
use cesorl_core::orlicz::Family;
use cesorl_core::propcheck::{random_corpus, oc_table_rows};
use cesorl_core::witnesses::DEFAULT_TRUNCATION;
use cesorl_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

type Outcome = std::result::Result<String, String>;

fn fam(f: Family, p: &[f64]) -> OrliczFunction {
    make_family(f, p).unwrap()
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn exact_of(c: &Certified) -> BigRational {
    match c {
        Certified::ExactRational { numerator, denominator, .. } => {
            BigRational::new(numerator.parse::<BigInt>().unwrap(), denominator.parse::<BigInt>().unwrap())
        }
        other => panic!("not exact: {other:?}"),
    }
}

fn modular_of(c: Option<&Certified>) -> &ExtendedValue {
    match c {
        Some(Certified::Modular { value }) => value,
        other => panic!("not a modular: {other:?}"),
    }
}

/// `‖Cx‖₂²` in closed form: on a constancy interval `[s, e)` of `x` with
/// value `v` and prior mass `M`, `Cx(t) = v + (M − vs)/t`.
fn cesaro_l2_squared(x: &StepFunction) -> f64 {
    let mut total = 0.0;
    let mut mass = 0.0;
    let mut at = 0.0;
    let segment = |s: f64, e: f64, v: f64, mass: f64| -> f64 {
        if s == 0.0 {
            return v * v * e;
        }
        let c = mass - v * s;
        v * v * (e - s) + 2.0 * v * c * (e / s).ln() + c * c * (1.0 / s - 1.0 / e)
    };
    for p in x.pieces() {
        if p.left > at && at > 0.0 {
            total += segment(at, p.left, 0.0, mass);
        }
        total += segment(p.left, p.right, p.value, mass);
        mass += p.value * (p.right - p.left);
        at = p.right;
    }
    if x.domain() == IntervalDomain::HalfLine {
        total += mass * mass / at;
    } else if at < 1.0 {
        total += segment(at, 1.0, 0.0, mass);
    }
    total
}

fn l2(x: &StepFunction) -> f64 {
    x.pieces().iter().map(|p| p.value * p.value * (p.right - p.left)).sum::<f64>().sqrt()
}

/// Bisection for `t ln t = 1` on `[1, 2]`.
fn lambda_oracle() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m * m.ln() <= 1.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

fn c1() -> Outcome {
    let phi = fam(Family::CappedInfinite, &[1.0]);
    let r = oc_failure_witness(&phi, IntervalDomain::HalfLine, 30, &tol()).map_err(|e| e.to_string())?;
    let want = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << 30);
    let got = exact_of(r.value("I_phi(x_N) exact").ok_or("missing I_phi")?);
    let two = modular_of(r.value("rho(2x)"));
    let verified = verify_report(&r, &tol()).map_err(|e| e.to_string())?.ok;
    if got == want && !two.is_finite() && verified && r.kind == (WitnessKind::OcFailure { case: OcCase::I1 }) {
        Ok(format!("I(x_30) = {}/{}, rho(2x_30) = inf", got.numer(), got.denom()))
    } else {
        Err(format!("I = {got}, rho(2x) = {two:?}, verified = {verified}"))
    }
}

fn c2() -> Outcome {
    let phi = fam(Family::ExpGap, &[]);
    let r = oc_failure_witness(&phi, IntervalDomain::UnitInterval, 30, &tol()).map_err(|e| e.to_string())?;
    let cert = modular_of(r.value("rho(2x) series"));
    let Some(Certificate::TermwiseLowerBound { lower_bound, term_lower_bound, terms, .. }) = cert.certificate() else {
        return Err(format!("no termwise certificate: {cert:?}"));
    };
    let x = r.element_named("x").ok_or("missing x")?;
    let oracle: f64 = x
        .pieces()
        .iter()
        .map(|p| {
            let u = 2.0 * p.value;
            (u.exp() - u - 1.0) * (p.right - p.left)
        })
        .sum();
    let ok = *lower_bound >= 30.0
        && *term_lower_bound >= 1.0
        && *terms == 30
        && oracle >= 30.0 * (1.0 - 1e-12)
        && x.is_nonincreasing();
    if ok {
        Ok(format!("lower bound {lower_bound:.6} over {terms} terms, oracle I(2x) = {oracle:.6}"))
    } else {
        Err(format!("lower bound {lower_bound}, term bound {term_lower_bound}, oracle {oracle}"))
    }
}

fn c3() -> Outcome {
    let x = StepFunction::indicator(IntervalDomain::HalfLine, 0.0, 1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let t = Instant::now();
        let n = norm(&fam(Family::Power, &[p]), &x, Space::Cesaro, &tol()).map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed());
        let want = (p / (p - 1.0)).powf(1.0 / p);
        worst = worst.max((n.value - want).abs());
    }
    if worst <= 1e-8 && slowest < Duration::from_secs(1) {
        Ok(format!("max |error| = {worst:.2e}, slowest {slowest:?}"))
    } else {
        Err(format!("max |error| = {worst:.2e}, slowest {slowest:?}"))
    }
}

fn c4() -> Outcome {
    let phi = fam(Family::Power, &[2.0]);
    let corpus = hardy_corpus(IntervalDomain::HalfLine, 1000, DEFAULT_SEED);
    let report = hardy_probe(&phi, IntervalDomain::HalfLine, &corpus, &tol()).map_err(|e| e.to_string())?;
    let mut violations = 0;
    let mut best: f64 = 0.0;
    let mut disagreement: f64 = 0.0;
    for (x, engine) in corpus.iter().zip(&report.ratios) {
        let (cx, nx) = (cesaro_l2_squared(x).sqrt(), l2(x));
        if cx > 2.0 * nx + 1e-6 {
            violations += 1;
        }
        best = best.max(cx / nx);
        disagreement = disagreement.max((engine - cx / nx).abs());
    }
    if violations == 0 && best >= 1.9 && disagreement <= 1e-6 && report.skipped == 0 {
        Ok(format!("1000 elements, max ratio {best:.6}, engine vs closed form {disagreement:.1e}"))
    } else {
        Err(format!("violations {violations}, max ratio {best}, disagreement {disagreement:e}, skipped {}", report.skipped))
    }
}

fn c5() -> Outcome {
    let phi = fam(Family::ShiftedPower, &[1.0, 1.0]);
    let r = sm_failure_witness(&phi, IntervalDomain::HalfLine, None, &tol()).map_err(|e| e.to_string())?;
    let lambda = r.scalar("lambda").ok_or("missing lambda")?;
    let (u, v) = (r.element_named("u").ok_or("u")?, r.element_named("v").ok_or("v")?);
    let nu = norm(&phi, u, Space::Cesaro, &tol()).map_err(|e| e.to_string())?.value;
    let nv = norm(&phi, v, Space::Cesaro, &tol()).map_err(|e| e.to_string())?.value;
    let differ = v.sub_clamped(u).map_err(|e| e.to_string())?.support_measure();
    let residual = (lambda * lambda.ln() - 1.0).abs();
    let ok = residual <= 1e-10
        && (lambda - lambda_oracle()).abs() <= 1e-10
        && (nu - 1.0).abs() <= 1e-6
        && (nv - 1.0).abs() <= 1e-6
        && u.le(v)
        && differ == 1.0;
    let msg = format!("lambda = {lambda:.12}, |l ln l - 1| = {residual:.1e}, norms {nu:.9} / {nv:.9}, m(u != v) = {differ}");
    if ok { Ok(msg) } else { Err(msg) }
}

fn c6() -> Outcome {
    let phi = fam(Family::ShiftedPower, &[1.0, 2.0]);
    let r = sm_failure_witness(&phi, IntervalDomain::UnitInterval, Some(3.0), &tol()).map_err(|e| e.to_string())?;
    let a1 = r.scalar("a1").ok_or("missing a1")?;
    let delta = r.scalar("delta").ok_or("missing delta")?;
    let (x1, x2) = (r.element_named("x1").ok_or("x1")?, r.element_named("x2").ok_or("x2")?);
    let r1 = modular_rho(&phi, x1, &tol()).map_err(|e| e.to_string())?.value();
    let r2 = modular_rho(&phi, x2, &tol()).map_err(|e| e.to_string())?.value();
    let from = 0.5 * (delta + 1.0);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let t = from + (1.0 - from) * i as f64 / 1000.0;
        let mass: f64 = x2.pieces().iter().map(|p| p.value * (p.right.min(t) - p.left).max(0.0)).sum();
        worst = worst.max(mass / t);
    }
    let residual = (a1 * (12.0 - 6.0 * 3f64.ln()) - 1.0).abs();
    let ok = residual <= 1e-8 && (r1 - 1.0).abs() <= 1e-8 && (r2 - 1.0).abs() <= 1e-8 && worst <= 1.0;
    let msg = format!("a1 = {a1:.12}, residual {residual:.1e}, rho {r1:.10} / {r2:.10}, max Cx2 = {worst:.9}");
    if ok { Ok(msg) } else { Err(msg) }
}

fn c7() -> Outcome {
    let t = tol();
    let mut groups: Vec<(OrliczFunction, Vec<(String, StepFunction)>)> = Vec::new();
    let shifted = fam(Family::ShiftedPower, &[1.0, 1.0]);
    let w = sm_failure_witness(&shifted, IntervalDomain::HalfLine, None, &t).map_err(|e| e.to_string())?;
    groups.push((shifted, w.elements.iter().map(|e| (e.name.clone(), e.function.clone())).collect()));
    let shifted2 = fam(Family::ShiftedPower, &[1.0, 2.0]);
    let w = sm_failure_witness(&shifted2, IntervalDomain::UnitInterval, Some(3.0), &t).map_err(|e| e.to_string())?;
    groups.push((shifted2, w.elements.iter().map(|e| (e.name.clone(), e.function.clone())).collect()));
    for (f, p, d) in [(Family::Power, vec![2.0], IntervalDomain::HalfLine), (Family::ExpGap, vec![], IntervalDomain::UnitInterval)] {
        let phi = fam(f, &p);
        let mut elems = Vec::new();
        let n = nontriviality(&phi, d, &t).map_err(|e| e.to_string())?;
        elems.extend(n.elements.iter().map(|e| (e.name.clone(), e.function.clone())));
        for (i, x) in random_corpus(d, 24, DEFAULT_SEED).into_iter().enumerate() {
            let nx = norm(&phi, &x, Space::Cesaro, &t).map_err(|e| e.to_string())?.value;
            elems.push((format!("x{i}"), x.clone()));
            elems.push((format!("x{i}/norm"), x.scale(1.0 / nx)));
        }
        groups.push((phi, elems));
    }
    let mut rows = 0;
    let mut on_sphere = 0;
    let mut violations = Vec::new();
    for (phi, elems) in &groups {
        for r in sphere_equivalence(phi, elems, &t).map_err(|e| e.to_string())? {
            rows += 1;
            if (r.rho - 1.0).abs() <= 1e-6 {
                on_sphere += 1;
            }
            if !r.consistent {
                violations.push(format!("{} {}: rho {} norm {}", phi.label(), r.name, r.rho, r.norm));
            }
        }
    }
    if violations.is_empty() && on_sphere > 0 {
        Ok(format!("{rows} elements in C_phi, {on_sphere} on the unit sphere, 0 violations"))
    } else {
        Err(format!("{} violations: {:?}", violations.len(), violations))
    }
}

fn c8() -> Outcome {
    let rows = oc_table_named(&SuiteParams::default()).map_err(|e| e.to_string())?;
    let good = rows.iter().filter(|r| r.consistent == Some(true) && r.witness_verified).count();
    let summary: Vec<String> = rows.iter().map(|r| format!("{}:{:?}/{}", r.phi, r.delta2, r.witness)).collect();
    if rows.len() == 7 && good == 7 {
        Ok(format!("7/7 consistent [{}]", summary.join(", ")))
    } else {
        Err(format!("{good}/{} consistent [{}]", rows.len(), summary.join(", ")))
    }
}

fn c9() -> Outcome {
    let t = tol();
    let one = nontriviality(&fam(Family::Power, &[1.0]), IntervalDomain::HalfLine, &t).map_err(|e| e.to_string())?;
    let one_ok = one.kind == (WitnessKind::NonTriviality { verdict: Verdict::No })
        && one.certified_values.iter().any(|c| {
            matches!(&c.value, Certified::Modular { value } if matches!(value.certificate(), Some(Certificate::TailLowerBound { .. })))
        });
    let two = nontriviality(&fam(Family::Power, &[2.0]), IntervalDomain::HalfLine, &t).map_err(|e| e.to_string())?;
    let integral = modular_of(two.value("tail integral")).value();
    let two_ok = two.kind == (WitnessKind::NonTriviality { verdict: Verdict::Yes }) && (integral - 1.0).abs() <= 1e-10;
    let mut unit_ok = 0;
    let rows = oc_table_rows();
    for (f, p, _, _) in &rows {
        let r = nontriviality(&fam(*f, p), IntervalDomain::UnitInterval, &t).map_err(|e| e.to_string())?;
        if r.kind == (WitnessKind::NonTriviality { verdict: Verdict::Yes }) {
            unit_ok += 1;
        }
    }
    let msg = format!("power 1 trivial: {one_ok}; power 2 integral = {integral:.12}; [0,1]: {unit_ok}/{} nontrivial", rows.len());
    if one_ok && two_ok && unit_ok == rows.len() { Ok(msg) } else { Err(msg) }
}

fn c10() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [1.0, 2.0, 3.0] {
        let e = matuszewska_indices(&fam(Family::Power, &[p]));
        ok &= (e.alpha_hat - p).abs() <= 0.01 && (e.beta_hat - p).abs() <= 0.01 && e.status == EstimateStatus::Determined;
        parts.push(format!("p={p}: [{:.4}, {:.4}]", e.alpha_hat, e.beta_hat));
    }
    for p in [1.0, 1.25, 2.0, 3.0] {
        let holds = matches!(condition_s(&fam(Family::Power, &[p])), ConditionS::Holds { .. });
        ok &= holds == (p > 1.0);
        parts.push(format!("S(p={p})={holds}"));
    }
    if ok { Ok(parts.join(", ")) } else { Err(parts.join(", ")) }
}

fn c11() -> Outcome {
    let params = SuiteParams::default();
    let cases = [
        (fam(Family::Power, &[2.0]), IntervalDomain::HalfLine, Space::Plain),
        (fam(Family::Power, &[2.0]), IntervalDomain::HalfLine, Space::Cesaro),
        (fam(Family::ExpGap, &[]), IntervalDomain::UnitInterval, Space::Cesaro),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (phi, d, s) in &cases {
        let r = unit_ball_suite(phi, *d, *s, 1000, &params);
        ok &= r.unit_ball_violations == 0 && r.ideal_violations == 0 && r.skipped == 0;
        parts.push(format!(
            "{} {:?}: {} pairs, {}+{} violations, {} skipped",
            r.phi, s, r.pairs, r.unit_ball_violations, r.ideal_violations, r.skipped
        ));
    }
    if ok { Ok(parts.join("; ")) } else { Err(parts.join("; ")) }
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    assert_eq!(DEFAULT_TRUNCATION, 30);
    let criteria: [(&str, Criterion, u64); 11] = [
        ("witness modular exactness", c1, 1),
        ("divergence lower bound", c2, 5),
        ("closed-form norms", c3, 4),
        ("Hardy bound", c4, 30),
        ("strict monotonicity witness on [0,inf)", c5, 5),
        ("strict monotonicity witness on [0,1]", c6, 5),
        ("unit sphere equivalence", c7, 10),
        ("order continuity equivalence table", c8, 60),
        ("non-triviality", c9, 5),
        ("index estimates", c10, 5),
        ("unit ball and ideal property", c11, 60),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match outcome {
            Ok(d) if !over => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d} (runtime over {budget} s)")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} [{:.3} s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
