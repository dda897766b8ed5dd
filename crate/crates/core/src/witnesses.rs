//! Explicit elements certifying structural properties of `Ces_φ`:
//! non-triviality, failure of order continuity (elements `x` with
//! `ρ(2x) = ∞`) and failure of strict monotonicity (pairs `u ≤ v`, `u ≠ v`
//! with `‖u‖ = ‖v‖ = 1`).
//!
//! Reports serialize completely, and [`verify_report`] re-derives every
//! certified value from the raw step functions alone.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cesaro::cesaro_mean;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::funcrep::{IntervalDomain, Piece, StepFunction};
use crate::indices::{condition_s, delta2_test, escalation_sequence, ConditionS, Delta2Verdict, Regime, MIN_WITNESS_PHI};
use crate::modular::{
    membership, modular_rho, modular_step, norm, tail_integral, Certificate, ExtendedValue, MembershipKind, NormResult,
    Space, Verdict,
};
use crate::orlicz::{OrliczFunction, PhiSpec};

/// Order-continuity failure cases, `I(k)` on `[0,∞)` and `II(k)` on `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OcCase {
    /// `b_φ < ∞`, `φ(b_φ) = ∞` on `[0,∞)`.
    #[serde(rename = "I(1)")]
    I1,
    /// `b_φ < ∞`, `φ(b_φ) < ∞` on `[0,∞)`.
    #[serde(rename = "I(2)")]
    I2,
    /// `a_φ > 0` on `[0,∞)`.
    #[serde(rename = "I(3)")]
    I3,
    /// `0 < φ < ∞`, `φ ∉ Δ₂(ℝ₊)` on `[0,∞)`.
    #[serde(rename = "I(4)")]
    I4,
    /// `b_φ < ∞`, `φ(b_φ) = ∞` on `[0,1]`; built as in `I(1)`, certifying
    /// that `Ces_φ[0,1]` is *not* order continuous.
    #[serde(rename = "II(1)")]
    II1,
    /// `b_φ < ∞`, `φ(b_φ) < ∞` on `[0,1]`.
    #[serde(rename = "II(2)")]
    II2,
    /// `φ < ∞`, `φ ∉ Δ₂(∞)` on `[0,1]`.
    #[serde(rename = "II(3)")]
    II3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmCase {
    HalfLine,
    UnitInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    NonTriviality { verdict: Verdict },
    OcFailure { case: OcCase },
    SmFailure { case: SmCase },
    NoWitnessFound,
    Undetermined { reason: String },
}

/// A certified quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certified {
    Modular { value: ExtendedValue },
    Norm { value: NormResult },
    /// Exact rational, numerator and denominator in decimal.
    ExactRational { numerator: String, denominator: String, approx: f64 },
    Check { holds: bool, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub description: String,
    pub value: Certified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedElement {
    pub name: String,
    pub function: StepFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n: usize,
    pub remainder_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub phi: PhiSpec,
    pub domain: IntervalDomain,
    pub elements: Vec<NamedElement>,
    pub certified_values: Vec<CertifiedValue>,
    pub truncation: Option<Truncation>,
    pub scalars: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl WitnessReport {
    fn new(kind: WitnessKind, phi: &OrliczFunction, domain: IntervalDomain) -> WitnessReport {
        WitnessReport {
            kind,
            phi: phi.spec(),
            domain,
            elements: Vec::new(),
            certified_values: Vec::new(),
            truncation: None,
            scalars: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, description: impl Into<String>, value: Certified) {
        self.certified_values.push(CertifiedValue { description: description.into(), value });
    }

    fn push_modular(&mut self, description: impl Into<String>, value: ExtendedValue) {
        self.push(description, Certified::Modular { value });
    }

    fn element(&mut self, name: &str, function: StepFunction) {
        self.elements.push(NamedElement { name: name.into(), function });
    }

    pub fn element_named(&self, name: &str) -> Option<&StepFunction> {
        self.elements.iter().find(|e| e.name == name).map(|e| &e.function)
    }

    pub fn value(&self, description: &str) -> Option<&Certified> {
        self.certified_values.iter().find(|c| c.description == description).map(|c| &c.value)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|s| s.0 == name).map(|s| s.1)
    }

    pub fn is_oc_failure(&self) -> bool {
        matches!(self.kind, WitnessKind::OcFailure { .. })
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn exact(r: &BigRational) -> Certified {
    Certified::ExactRational {
        numerator: r.numer().to_string(),
        denominator: r.denom().to_string(),
        approx: r.to_f64().unwrap_or(f64::NAN),
    }
}

fn parse_exact(c: &Certified) -> Option<BigRational> {
    match c {
        Certified::ExactRational { numerator, denominator, .. } => {
            Some(BigRational::new(numerator.parse::<BigInt>().ok()?, denominator.parse::<BigInt>().ok()?))
        }
        _ => None,
    }
}

/// `Σ φ(c_k)·(r_k − l_k)` in exact rational arithmetic over the stored
/// floats; `None` if some `φ(c_k) = ∞`.
pub fn exact_modular_step(phi: &OrliczFunction, f: &StepFunction) -> Option<BigRational> {
    let mut sum = BigRational::zero();
    for p in f.pieces() {
        let v = phi.eval(p.value);
        if !v.is_finite() {
            return None;
        }
        sum += rat(v) * (rat(p.right) - rat(p.left));
    }
    Some(sum)
}

/// `1 − 2⁻ᴺ`.
fn dyadic_partial(n: usize) -> BigRational {
    BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << n)
}

// ---------------------------------------------------------------------------
// Non-triviality

/// Whether `Ces_φ(I) ≠ {0}`.
pub fn nontriviality(phi: &OrliczFunction, domain: IntervalDomain, tol: &Tolerances) -> Result<WitnessReport> {
    match domain {
        IntervalDomain::UnitInterval => {
            let mut r = WitnessReport::new(WitnessKind::NonTriviality { verdict: Verdict::Yes }, phi, domain);
            let x = StepFunction::indicator(domain, 0.5, 1.0, 1.0)?;
            let plain = membership(phi, &x, MembershipKind::OrliczSpace, tol);
            let ces = membership(phi, &x, MembershipKind::CesSpace, tol);
            r.push(
                "chi_[1/2,1] in L^phi[0,1]",
                Certified::Check { holds: plain.verdict == Verdict::Yes, detail: format!("{:?}", plain.evidence) },
            );
            r.push(
                "chi_[1/2,1] in Ces_phi[0,1]",
                Certified::Check { holds: ces.verdict == Verdict::Yes, detail: format!("{:?}", ces.evidence) },
            );
            if plain.verdict != Verdict::Yes || ces.verdict != Verdict::Yes {
                r.kind = WitnessKind::NonTriviality { verdict: Verdict::Undetermined };
            }
            r.element("x", x);
            Ok(r)
        }
        IntervalDomain::HalfLine => {
            let mut r = WitnessReport::new(WitnessKind::NonTriviality { verdict: Verdict::Undetermined }, phi, domain);
            let lambda0 = 1.0;
            let mut x0 = 1.0;
            let mut found = None;
            for _ in 0..=tol.max_bracket_log2 {
                if phi.is_infinite_at(lambda0 / x0) {
                    x0 *= 2.0;
                    continue;
                }
                match tail_integral(phi, x0, lambda0, tol) {
                    Ok(v) if v.is_finite() => {
                        found = Some(v);
                        break;
                    }
                    Ok(v) => {
                        if matches!(v.certificate(), Some(Certificate::TailLowerBound { .. })) {
                            r.push_modular(format!("tail integral from {x0} at lambda0 = {lambda0}"), v);
                            r.kind = WitnessKind::NonTriviality { verdict: Verdict::No };
                            r.notes.push("the tail integral diverges at 0, so Ces_φ[0,∞) = {0}".into());
                            break;
                        }
                        x0 *= 2.0;
                    }
                    Err(e) => {
                        r.notes.push(format!("tail integral from {x0}: {e}"));
                        return Ok(r);
                    }
                }
            }
            if let Some(v) = found {
                r.scalars.push(("lambda0".into(), lambda0));
                r.scalars.push(("x0".into(), x0));
                let base = v.value();
                r.push_modular("tail integral", v);
                let lambda = 2.0;
                let y0 = lambda / lambda0 * x0;
                let scaled = tail_integral(phi, y0, lambda, tol)?;
                let expect = lambda / lambda0 * base;
                let ok = scaled.is_finite() && (scaled.value() - expect).abs() <= 1e-10 * expect.max(1.0);
                r.scalars.push(("y0".into(), y0));
                r.push_modular("tail integral at lambda = 2 from y0", scaled);
                r.push("rescaling identity", Certified::Check { holds: ok, detail: format!("expected {expect}") });
                let x = StepFunction::indicator(domain, 0.0, x0, lambda0)?;
                let m = membership(phi, &x, MembershipKind::CesSpace, tol);
                r.push(
                    "lambda0 * chi_[0,x0) in Ces_phi",
                    Certified::Check { holds: m.verdict == Verdict::Yes, detail: m.note.clone() },
                );
                r.element("x", x);
                if ok && m.verdict == Verdict::Yes {
                    r.kind = WitnessKind::NonTriviality { verdict: Verdict::Yes };
                }
            }
            let s = condition_s(phi);
            let holds = matches!(s, ConditionS::Holds { .. });
            r.push(
                "condition (S) (sufficient)",
                Certified::Check { holds, detail: serde_json::to_string(&s).unwrap_or_default() },
            );
            Ok(r)
        }
    }
}

// ---------------------------------------------------------------------------
// Order-continuity failure

/// Default truncation of the infinite series witnesses.
pub const DEFAULT_TRUNCATION: usize = 30;

/// Places `Σ uₙ χ_{Bₙ}` with `m(Bₙ) = 1/(2ⁿ φ(uₙ))`, largest `uₙ` first
/// from the origin, so the result is nonincreasing. Returns the element
/// and the exact measures.
fn stack_decreasing(
    domain: IntervalDomain,
    terms: &[(usize, f64, f64)],
) -> Result<(StepFunction, Vec<BigRational>)> {
    let mut sorted: Vec<(usize, f64, f64)> = terms.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut at = BigRational::zero();
    let mut left = 0.0;
    let mut pieces = Vec::with_capacity(sorted.len());
    let mut measures = vec![BigRational::zero(); terms.len()];
    for &(n, u, phi_u) in &sorted {
        let m = BigRational::one() / (rat(phi_u) * BigRational::from_integer(BigInt::one() << n));
        at += &m;
        let right = at.to_f64().expect("finite endpoint");
        if !(right > left) {
            return Err(Error::InvalidStep(format!("witness interval for u = {u} collapsed at {left}")));
        }
        pieces.push(Piece::new(left, right, u));
        left = right;
        measures[n - 1] = m;
    }
    Ok((StepFunction::new(domain, pieces)?, measures))
}

fn certify_exact_modular(
    r: &mut WitnessReport,
    phi: &OrliczFunction,
    terms: &[(usize, f64, f64)],
    measures: &[BigRational],
    x: &StepFunction,
) {
    let n = terms.len();
    let construction: BigRational = terms
        .iter()
        .map(|&(k, _, phi_u)| rat(phi_u) * &measures[k - 1])
        .fold(BigRational::zero(), |a, b| a + b);
    let target = dyadic_partial(n);
    r.push("I_phi(x_N) exact", exact(&construction));
    r.push(
        "I_phi(x_N) = 1 - 2^-N",
        Certified::Check { holds: construction == target, detail: format!("N = {n}") },
    );
    if let Some(stored) = exact_modular_step(phi, x) {
        let dev = (&stored - &target).to_f64().unwrap_or(f64::INFINITY).abs();
        r.push("I_phi(x_N) stored floats exact", exact(&stored));
        r.push(
            "stored floats within 1e-12 of 1 - 2^-N",
            Certified::Check { holds: dev <= 1e-12, detail: format!("deviation {dev:e}") },
        );
    }
    r.truncation = Some(Truncation { n, remainder_bound: 2f64.powi(-(n as i32)) });
}

/// `I_φ(2x) = Σ φ(2uₙ) m(Bₙ)` over exact measures: a lower bound for
/// `ρ_φ(2x)` when `x` is nonincreasing, each term at least 1.
fn termwise_bound(phi: &OrliczFunction, terms: &[(usize, f64, f64)], measures: &[BigRational]) -> Option<(f64, f64)> {
    let mut total = BigRational::zero();
    let mut least = f64::INFINITY;
    for &(k, u, _) in terms {
        let v = phi.eval(2.0 * u);
        if !v.is_finite() {
            return None;
        }
        let term = rat(v) * &measures[k - 1];
        least = least.min(term.to_f64().unwrap_or(0.0));
        total += term;
    }
    Some((total.to_f64().unwrap_or(f64::INFINITY), least))
}

/// Least `u` in `[lo, b)` with `φ(u) ≥ 1`, by bisection.
fn level_one(phi: &OrliczFunction, lo: f64) -> f64 {
    let b = phi.b_phi();
    if phi.eval(lo) >= 1.0 {
        return lo;
    }
    let (mut l, mut h) = (lo, b);
    for _ in 0..200 {
        let m = 0.5 * (l + h);
        if m <= l || m >= h {
            break;
        }
        if !phi.is_infinite_at(m) && phi.eval(m) >= 1.0 {
            h = m;
        } else {
            l = m;
        }
    }
    h
}

/// Dispatches on `(a_φ, b_φ, φ(b_φ), Δ₂)` and builds the corresponding
/// witness truncated at `n` terms.
pub fn oc_failure_witness(phi: &OrliczFunction, domain: IntervalDomain, n: usize, tol: &Tolerances) -> Result<WitnessReport> {
    if n < 4 {
        return Err(Error::Precondition(format!("truncation must be at least 4, got {n}")));
    }
    let half = domain == IntervalDomain::HalfLine;
    let b = phi.b_phi();
    if b.is_finite() && phi.value_at_b().is_infinite() {
        let case = if half { OcCase::I1 } else { OcCase::II1 };
        return case_cap_infinite(phi, domain, n, case, tol);
    }
    if b.is_finite() {
        let case = if half { OcCase::I2 } else { OcCase::II2 };
        return case_cap_finite(phi, domain, case, tol);
    }
    if half && phi.a_phi() > 0.0 {
        return case_flat(phi, tol);
    }
    let regime = Regime::for_domain(domain);
    let report = delta2_test(phi, regime)?;
    match report.verdict {
        Delta2Verdict::Holds { .. } => {
            let mut r = WitnessReport::new(WitnessKind::NoWitnessFound, phi, domain);
            r.notes.push(format!("φ ∈ Δ₂ ({regime:?} regime): no order-continuity witness exists"));
            Ok(r)
        }
        Delta2Verdict::Undetermined { reason } => {
            Ok(WitnessReport::new(WitnessKind::Undetermined { reason }, phi, domain))
        }
        Delta2Verdict::FailsWithWitness { .. } => {
            let sub = if half && delta2_test(phi, Regime::Zero)?.fails() { Regime::Zero } else { Regime::Infinity };
            let case = if half { OcCase::I4 } else { OcCase::II3 };
            case_delta2(phi, domain, n, sub, case, tol)
        }
    }
}

fn case_cap_infinite(phi: &OrliczFunction, domain: IntervalDomain, n: usize, case: OcCase, tol: &Tolerances) -> Result<WitnessReport> {
    let b = phi.b_phi();
    let start = level_one(phi, 0.5 * b);
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let u = b - (b - start) * 2f64.powi(-(k as i32));
        if !(u < b) || phi.is_infinite_at(u) {
            return Err(Error::Precondition(format!("u_{k} rounds to b_φ; lower the truncation")));
        }
        terms.push((k, u, phi.eval(u)));
    }
    let (x, measures) = stack_decreasing(domain, &terms)?;
    let mut r = WitnessReport::new(WitnessKind::OcFailure { case }, phi, domain);
    r.scalars.push(("u_start".into(), start));
    certify_exact_modular(&mut r, phi, &terms, &measures, &x);
    let two = modular_rho(phi, &x.scale(2.0), tol)?;
    r.push_modular("rho(2x)", two);
    r.push_modular("rho(x)", modular_rho(phi, &x, tol)?);
    r.notes.push("ρ(x) ≥ I_φ(x); the modular bound I_φ(x) ≤ 1 is the certified one".into());
    r.element("x", x);
    Ok(r)
}

fn case_cap_finite(phi: &OrliczFunction, domain: IntervalDomain, case: OcCase, tol: &Tolerances) -> Result<WitnessReport> {
    let b = phi.b_phi();
    let x = StepFunction::indicator(domain, 0.0, 1.0, b)?;
    let mut r = WitnessReport::new(WitnessKind::OcFailure { case }, phi, domain);
    let rho = modular_rho(phi, &x, tol)?;
    if domain == IntervalDomain::UnitInterval {
        let ok = rho.is_finite() && (rho.value() - phi.value_at_b()).abs() <= 1e-12 * phi.value_at_b().max(1.0);
        r.push("rho(x) = phi(b)", Certified::Check { holds: ok, detail: format!("φ(b) = {}", phi.value_at_b()) });
    } else if !rho.is_finite() {
        r.notes.push("ρ(x) = ∞ on [0,∞): C is unbounded on L^φ for this φ, so x ∉ Ces_φ".into());
    }
    r.push_modular("I_phi(x)", modular_step(phi, &x)?);
    r.push_modular("rho(x)", rho);
    r.push_modular("rho(2x)", modular_rho(phi, &x.scale(2.0), tol)?);
    r.element("x", x);
    Ok(r)
}

fn case_flat(phi: &OrliczFunction, tol: &Tolerances) -> Result<WitnessReport> {
    let a = phi.a_phi();
    let level = phi.eval(2.0 * a);
    let threshold = tol.divergence_threshold;
    let mut t = 1.0f64;
    while level * t < threshold {
        t *= 2.0;
    }
    let domain = IntervalDomain::HalfLine;
    let x = StepFunction::indicator(domain, 0.0, t, a)?;
    let mut r = WitnessReport::new(WitnessKind::OcFailure { case: OcCase::I3 }, phi, domain);
    r.scalars.push(("T".into(), t));
    r.push_modular("rho(x)", modular_rho(phi, &x, tol)?);
    let group = (1.0 / level).ceil().max(1.0);
    let lower = level * t;
    r.push_modular(
        "rho(2x) series",
        ExtendedValue::infinite(Certificate::TermwiseLowerBound {
            terms: (t / group).floor() as u64,
            term_lower_bound: level * group,
            lower_bound: lower,
            threshold,
        }),
    );
    r.push_modular("rho(2x_T)", modular_rho(phi, &x.scale(2.0), tol)?);
    r.notes.push(format!("x = a_φ χ_[0,∞) truncated at T = {t}; ρ(2x_T) ≥ φ(2a_φ)·T"));
    r.element("x", x);
    Ok(r)
}

fn case_delta2(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    n: usize,
    sub: Regime,
    case: OcCase,
    tol: &Tolerances,
) -> Result<WitnessReport> {
    let min_phi = if domain == IntervalDomain::UnitInterval { 1.0 } else { MIN_WITNESS_PHI };
    let seq = escalation_sequence(phi, sub, min_phi, n);
    if seq.len() < n {
        let reason = format!("only {} escalating points found, {n} needed", seq.len());
        return Ok(WitnessReport::new(WitnessKind::Undetermined { reason }, phi, domain));
    }
    let terms: Vec<(usize, f64, f64)> = seq.iter().enumerate().map(|(i, p)| (i + 1, p.u, phi.eval(p.u))).collect();
    let (x, measures) = stack_decreasing(domain, &terms)?;
    let mut r = WitnessReport::new(WitnessKind::OcFailure { case }, phi, domain);
    r.notes.push(format!("escalation sequence from the Δ₂ {sub:?} regime"));
    certify_exact_modular(&mut r, phi, &terms, &measures, &x);
    let (lower, least) = termwise_bound(phi, &terms, &measures)
        .ok_or_else(|| Error::Invariant("φ(2uₙ) infinite in the Δ₂ branch".into()))?;
    r.push_modular(
        "rho(2x) series",
        ExtendedValue::infinite(Certificate::TermwiseLowerBound {
            terms: n as u64,
            term_lower_bound: least,
            lower_bound: lower,
            threshold: n as f64,
        }),
    );
    r.push(
        "x nonincreasing",
        Certified::Check { holds: x.is_nonincreasing(), detail: "needed for C(2x) ≥ 2x".into() },
    );
    r.push_modular("rho(2x_N)", modular_rho(phi, &x.scale(2.0), tol)?);
    r.push_modular("rho(x)", modular_rho(phi, &x, tol)?);
    r.element("x", x);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Strict-monotonicity failure

/// Bisection for `f(t) = 1` on a bracket with `f(lo) ≤ 1 < f(hi)`.
fn solve_unit(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn finite_value(v: ExtendedValue) -> f64 {
    v.value()
}

/// The pair violating strict monotonicity when `a_φ > 0`.
pub fn sm_failure_witness(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    b0: Option<f64>,
    tol: &Tolerances,
) -> Result<WitnessReport> {
    let a = phi.a_phi();
    if a == 0.0 {
        let mut r = WitnessReport::new(WitnessKind::NoWitnessFound, phi, domain);
        r.notes.push("φ > 0: the space is strictly monotone".into());
        return Ok(r);
    }
    if !phi.is_finite_valued() {
        return Err(Error::Precondition("the strict-monotonicity witness needs φ < ∞".into()));
    }
    match domain {
        IntervalDomain::HalfLine => sm_half_line(phi, tol),
        IntervalDomain::UnitInterval => sm_unit(phi, b0, tol),
    }
}

fn sm_half_line(phi: &OrliczFunction, tol: &Tolerances) -> Result<WitnessReport> {
    let a = phi.a_phi();
    let domain = IntervalDomain::HalfLine;
    let f = |t: f64| -> Result<f64> {
        let y = StepFunction::indicator(domain, 0.0, 1.0, t)?;
        Ok(finite_value(modular_rho(phi, &y, tol)?))
    };
    let mut hi = 2.0 * a;
    let mut k = 0;
    while f(hi)? <= 1.0 {
        hi *= 2.0;
        k += 1;
        if k > tol.max_bracket_log2 {
            return Err(Error::RootNotBracketed(format!("ρ(tχ_[0,1)) ≤ 1 up to t = {hi}")));
        }
    }
    let lambda = solve_unit(f, a, hi, tol.root_tol)?;
    let x1 = (2.0 * lambda / a).max(2.0);
    let u = StepFunction::indicator(domain, 0.0, 1.0, lambda)?;
    let z = StepFunction::indicator(domain, x1, x1 + 1.0, a / 2.0)?;
    let v = u.add(&z)?;
    let mut r = WitnessReport::new(WitnessKind::SmFailure { case: SmCase::HalfLine }, phi, domain);
    r.scalars.push(("lambda".into(), lambda));
    r.scalars.push(("x1".into(), x1));
    certify_pair(&mut r, phi, &u, &v, tol)?;
    r.element("u", u);
    r.element("v", v);
    r.element("z", z);
    Ok(r)
}

fn sm_unit(phi: &OrliczFunction, b0: Option<f64>, tol: &Tolerances) -> Result<WitnessReport> {
    let a = phi.a_phi();
    let domain = IntervalDomain::UnitInterval;
    let big = 2f64.powi(40);
    if !(phi.eval(big) / big > 1e6) {
        return Err(Error::Precondition("φ(u)/u does not tend to ∞ on the doubling grid".into()));
    }
    let b0 = match b0 {
        Some(b) => {
            if !(a * phi.eval(b) / b > 1.0) {
                return Err(Error::Precondition(format!("b0 = {b} does not satisfy a_φ φ(b0)/b0 > 1")));
            }
            b
        }
        None => {
            let mut b = a.max(1.0);
            while !(a * phi.eval(b) / b > 1.0) {
                b *= 2.0;
            }
            b
        }
    };
    let f = |s: f64| -> Result<f64> {
        let y = StepFunction::indicator(domain, 0.0, s, b0)?;
        Ok(finite_value(modular_rho(phi, &y, tol)?))
    };
    let upper = a / b0;
    if f(upper)? <= 1.0 {
        return Err(Error::RootNotBracketed(format!("f(a_φ/b0) ≤ 1 with b0 = {b0}")));
    }
    let a1 = solve_unit(f, 0.0, upper, tol.root_tol * upper)?;
    let delta = 0.5 * (a1 * b0 / a + 1.0);
    let lift = a - a1 * b0 / delta;
    let x1 = StepFunction::indicator(domain, 0.0, a1, b0)?;
    let bump = StepFunction::indicator(domain, 0.5 * (delta + 1.0), 1.0, lift)?;
    let x2 = x1.add(&bump)?;
    let mut r = WitnessReport::new(WitnessKind::SmFailure { case: SmCase::UnitInterval }, phi, domain);
    r.scalars.push(("b0".into(), b0));
    r.scalars.push(("a1".into(), a1));
    r.scalars.push(("delta".into(), delta));
    let g = cesaro_mean(&x2);
    let from = 0.5 * (delta + 1.0);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let t = from + (1.0 - from) * (i as f64 + 0.5) / 1000.0;
        worst = worst.max(g.eval(t)?);
    }
    r.push(
        "Cx2 <= a_phi on [(delta+1)/2, 1)",
        Certified::Check { holds: worst <= a * (1.0 + 1e-12), detail: format!("max sampled Cx2 = {worst}, a_φ = {a}") },
    );
    certify_pair(&mut r, phi, &x1, &x2, tol)?;
    r.element("x1", x1);
    r.element("x2", x2);
    Ok(r)
}

fn certify_pair(r: &mut WitnessReport, phi: &OrliczFunction, u: &StepFunction, v: &StepFunction, tol: &Tolerances) -> Result<()> {
    let ru = modular_rho(phi, u, tol)?;
    let rv = modular_rho(phi, v, tol)?;
    let nu = norm(phi, u, Space::Cesaro, tol)?;
    let nv = norm(phi, v, Space::Cesaro, tol)?;
    let diff = v.sub_clamped(u)?.support_measure();
    r.push(
        "rho(first) = rho(second) = 1",
        Certified::Check {
            holds: (ru.value() - 1.0).abs() <= 1e-8 && (rv.value() - 1.0).abs() <= 1e-8,
            detail: format!("{} and {}", ru.value(), rv.value()),
        },
    );
    r.push(
        "norms = 1",
        Certified::Check {
            holds: (nu.value - 1.0).abs() <= 1e-6 && (nv.value - 1.0).abs() <= 1e-6,
            detail: format!("{} and {}", nu.value, nv.value),
        },
    );
    r.push(
        "first <= second, differing on positive measure",
        Certified::Check { holds: u.le(v) && diff > 0.0, detail: format!("m(u ≠ v) = {diff}") },
    );
    r.push_modular("rho(first)", ru);
    r.push_modular("rho(second)", rv);
    r.push("norm(first)", Certified::Norm { value: nu });
    r.push("norm(second)", Certified::Norm { value: nv });
    Ok(())
}

// ---------------------------------------------------------------------------
// Approximation by compactly supported truncations

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxStep {
    pub n: f64,
    pub ces_norm: f64,
    pub plain_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTrace {
    pub steps: Vec<ApproxStep>,
    pub converged: bool,
}

/// `‖x − xχ_[1/n,n]‖_{Ces(φ)}` for `n = 2, 4, …` until below `1e-6`.
pub fn oc_approximation(phi: &OrliczFunction, x: &StepFunction, tol: &Tolerances) -> Result<ApproxTrace> {
    if x.is_zero() {
        return Ok(ApproxTrace { steps: Vec::new(), converged: true });
    }
    let m = membership(phi, x, MembershipKind::CPhi, tol);
    if m.verdict != Verdict::Yes {
        return Err(Error::Precondition(format!("x is not certified in C_φ ({:?}): {}", m.verdict, m.note)));
    }
    let mut steps: Vec<ApproxStep> = Vec::new();
    for k in 1..=60 {
        let n = 2f64.powi(k);
        let rest = x.restrict(&[(0.0, 1.0 / n), (n, f64::INFINITY)]);
        let ces = norm(phi, &rest, Space::Cesaro, tol)?.value;
        let plain = norm(phi, &rest, Space::Plain, tol)?.value;
        if let Some(prev) = steps.last() {
            if ces > prev.ces_norm * (1.0 + 1e-9) {
                return Err(Error::Invariant(format!("approximation trace increased at n = {n}: {} → {ces}", prev.ces_norm)));
            }
        }
        steps.push(ApproxStep { n, ces_norm: ces, plain_norm: plain });
        if ces < 1e-6 {
            return Ok(ApproxTrace { steps, converged: true });
        }
    }
    Ok(ApproxTrace { steps, converged: false })
}

// ---------------------------------------------------------------------------
// Independent verification

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub checks: Vec<(String, bool)>,
    pub ok: bool,
}

/// Recomputes the certified values of a report from its raw elements.
pub fn verify_report(report: &WitnessReport, tol: &Tolerances) -> Result<VerifyOutcome> {
    let phi = report.phi.build()?;
    let mut checks: Vec<(String, bool)> = Vec::new();
    let elem = |name: &str| {
        report
            .element_named(name)
            .ok_or_else(|| Error::Invariant(format!("report has no element `{name}`")))
    };
    match &report.kind {
        WitnessKind::OcFailure { case } => {
            let x = elem("x")?;
            if let Some(t) = report.truncation {
                let stored = exact_modular_step(&phi, x);
                let claimed = report.value("I_phi(x_N) stored floats exact").and_then(parse_exact);
                checks.push(("exact I_phi(x_N) reproduces".into(), stored.is_some() && stored == claimed));
                let ok = report
                    .value("I_phi(x_N) exact")
                    .and_then(parse_exact)
                    .is_some_and(|v| v == dyadic_partial(t.n));
                checks.push(("construction sum is 1 - 2^-N".into(), ok));
                checks.push(("I_phi(x_N) <= 1".into(), stored.is_some_and(|s| s <= BigRational::one())));
            }
            match case {
                OcCase::I1 | OcCase::II1 | OcCase::I2 | OcCase::II2 => {
                    let two = modular_rho(&phi, &x.scale(2.0), tol)?;
                    checks.push(("rho(2x) certified infinite".into(), !two.is_finite()));
                }
                OcCase::I3 | OcCase::I4 | OcCase::II3 => {
                    let bound = exact_modular_step(&phi, &x.scale(2.0)).and_then(|v| v.to_f64()).unwrap_or(f64::INFINITY);
                    let claimed = match report.value("rho(2x) series") {
                        Some(Certified::Modular { value }) => match value.certificate() {
                            Some(Certificate::TermwiseLowerBound { lower_bound, .. }) => *lower_bound,
                            _ => f64::NAN,
                        },
                        _ => f64::NAN,
                    };
                    checks.push(("x nonincreasing".into(), x.is_nonincreasing()));
                    checks.push((
                        "I_phi(2x) reproduces the termwise bound".into(),
                        (bound - claimed).abs() <= 1e-9 * claimed.abs().max(1.0),
                    ));
                    let rho2 = modular_rho(&phi, &x.scale(2.0), tol)?;
                    checks.push(("rho(2x) >= termwise bound".into(), rho2.value() >= claimed * (1.0 - 1e-9)));
                }
            }
        }
        WitnessKind::SmFailure { case } => {
            let (first, second) = match case {
                SmCase::HalfLine => (elem("u")?, elem("v")?),
                SmCase::UnitInterval => (elem("x1")?, elem("x2")?),
            };
            let ru = modular_rho(&phi, first, tol)?.value();
            let rv = modular_rho(&phi, second, tol)?.value();
            let nu = norm(&phi, first, Space::Cesaro, tol)?.value;
            let nv = norm(&phi, second, Space::Cesaro, tol)?.value;
            checks.push(("rho = 1 for both".into(), (ru - 1.0).abs() <= 1e-8 && (rv - 1.0).abs() <= 1e-8));
            checks.push(("norm = 1 for both".into(), (nu - 1.0).abs() <= 1e-6 && (nv - 1.0).abs() <= 1e-6));
            checks.push(("ordered and distinct".into(), first.le(second) && first != second));
        }
        WitnessKind::NonTriviality { verdict } => {
            if report.domain == IntervalDomain::HalfLine && *verdict == Verdict::Yes {
                let x0 = report.scalar("x0").unwrap_or(f64::NAN);
                let l0 = report.scalar("lambda0").unwrap_or(f64::NAN);
                let v = tail_integral(&phi, x0, l0, tol)?;
                let claimed = match report.value("tail integral") {
                    Some(Certified::Modular { value }) => value.value(),
                    _ => f64::NAN,
                };
                checks.push(("tail integral reproduces".into(), (v.value() - claimed).abs() <= 1e-10 * claimed.max(1.0)));
            }
            if let Ok(x) = elem("x") {
                let m = membership(&phi, x, MembershipKind::CesSpace, tol);
                checks.push(("element in Ces_phi".into(), (m.verdict == Verdict::Yes) == (*verdict == Verdict::Yes)));
            }
        }
        WitnessKind::NoWitnessFound | WitnessKind::Undetermined { .. } => {}
    }
    let ok = checks.iter().all(|c| c.1);
    Ok(VerifyOutcome { checks, ok })
}
