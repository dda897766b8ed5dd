//! Orlicz modulars `I_φ`, Cesàro–Orlicz modulars `ρ_φ = I_φ ∘ C`,
//! Luxemburg norms and membership predicates.
//!
//! Every modular is three-way: a finite value with an error bound, a
//! certified infinity, or an [`Error::Indeterminate`] when the numerics can
//! decide neither.

use serde::{Deserialize, Serialize};

use crate::cesaro::{cesaro_mean, HyperbolicPiece, PiecewiseHyperbolic};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::funcrep::{IntervalDomain, StepFunction};
use crate::orlicz::OrliczFunction;
use crate::quad::integrate;

/// Evidence that a modular is `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The argument exceeds `b_φ` (or equals it with `φ(b_φ) = ∞`) on a set
    /// of positive measure.
    PositiveMeasureAboveB {
        argument: f64,
        measure: f64,
        b_phi: f64,
    },
    /// `φ(S/t) ≥ c/t` on a doubling sequence of intervals, so every further
    /// doubling adds at least `c·S·ln 2`; `extrapolated_doublings` of them
    /// push the partial integral past `threshold`.
    TailLowerBound {
        slope_lower_bound: f64,
        mass: f64,
        start: f64,
        partial_integrals: Vec<f64>,
        extrapolated_doublings: u64,
        lower_bound: f64,
        threshold: f64,
    },
    /// A sum of `terms` terms each at least `term_lower_bound ≥ 1`.
    TermwiseLowerBound {
        terms: u64,
        term_lower_bound: f64,
        lower_bound: f64,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtendedValue {
    Finite { value: f64, abs_error_bound: f64 },
    CertifiedInfinite { certificate: Certificate },
}

impl ExtendedValue {
    pub fn finite(value: f64, abs_error_bound: f64) -> ExtendedValue {
        ExtendedValue::Finite { value, abs_error_bound: abs_error_bound.max(0.0) }
    }

    pub fn infinite(certificate: Certificate) -> ExtendedValue {
        ExtendedValue::CertifiedInfinite { certificate }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite { .. })
    }

    /// The value, `+∞` when certified infinite.
    pub fn value(&self) -> f64 {
        match self {
            ExtendedValue::Finite { value, .. } => *value,
            ExtendedValue::CertifiedInfinite { .. } => f64::INFINITY,
        }
    }

    pub fn error_bound(&self) -> f64 {
        match self {
            ExtendedValue::Finite { abs_error_bound, .. } => *abs_error_bound,
            ExtendedValue::CertifiedInfinite { .. } => 0.0,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            ExtendedValue::Finite { .. } => None,
            ExtendedValue::CertifiedInfinite { certificate } => Some(certificate),
        }
    }

    /// Finite sum; the first infinity wins.
    fn plus(self, other: ExtendedValue) -> ExtendedValue {
        match (self, other) {
            (ExtendedValue::Finite { value: a, abs_error_bound: ea }, ExtendedValue::Finite { value: b, abs_error_bound: eb }) => {
                ExtendedValue::finite(a + b, ea + eb)
            }
            (inf @ ExtendedValue::CertifiedInfinite { .. }, _) | (_, inf) => inf,
        }
    }
}

/// `I_φ(f) = Σ φ(c_k)·m(A_k)`, exact up to floating-point summation.
pub fn modular_step(phi: &OrliczFunction, f: &StepFunction) -> Result<ExtendedValue> {
    let mut sum = 0.0;
    for p in f.pieces() {
        if phi.is_infinite_at(p.value) {
            return Ok(ExtendedValue::infinite(Certificate::PositiveMeasureAboveB {
                argument: p.value,
                measure: p.len(),
                b_phi: phi.b_phi(),
            }));
        }
        let v = phi.eval(p.value);
        if !v.is_finite() {
            return Err(Error::Overflow(p.value));
        }
        sum += v * p.len();
    }
    let n = f.pieces().len() as f64;
    Ok(ExtendedValue::finite(sum, 2.0 * n * f64::EPSILON * sum))
}

/// `∫_lo^hi φ(v(t)) dt` where `v` is finite-valued below `b_φ` on the
/// range and monotone. Long ranges are pre-split geometrically.
fn integrate_composed(
    phi: &OrliczFunction,
    v: impl Fn(f64) -> f64 + Copy,
    lo: f64,
    hi: f64,
    peak: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let top = phi.eval(peak);
    if !top.is_finite() {
        return Err(Error::Overflow(peak));
    }
    let mut cuts = vec![lo];
    if lo > 0.0 {
        let mut t = lo;
        while hi / t > 4.0 {
            t *= 2.0;
            cuts.push(t);
        }
    }
    cuts.push(hi);
    let (mut value, mut err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let r = integrate(|t| phi.eval(v(t)), w[0], w[1], tol.quad_rel, tol.quad_abs, tol.max_subdivisions)?;
        value += r.value;
        err += r.abs_error;
    }
    Ok((value, err))
}

/// Splits `[l, r)` where `a + b/t` crosses a kink of φ.
fn split_piece(phi: &OrliczFunction, p: &HyperbolicPiece) -> Vec<(f64, f64)> {
    let mut cuts = vec![p.left, p.right];
    if p.b != 0.0 {
        for k in phi.kinks() {
            if k != p.a {
                let t = p.b / (k - p.a);
                if t > p.left && t < p.right {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `I_φ(g)` for a piecewise hyperbolic `g` (typically `g = C|x|`).
pub fn modular_hyperbolic(phi: &OrliczFunction, g: &PiecewiseHyperbolic, tol: &Tolerances) -> Result<ExtendedValue> {
    enum Job {
        Exact(f64),
        Quad(HyperbolicPiece, f64, f64),
    }
    let a_phi = phi.a_phi();
    let mut jobs = Vec::new();
    for p in g.pieces() {
        for (s0, s1) in split_piece(phi, p) {
            let mid = p.eval(0.5 * (s0 + s1)).max(0.0);
            if mid <= a_phi {
                continue;
            }
            if phi.is_infinite_at(mid) {
                return Ok(ExtendedValue::infinite(Certificate::PositiveMeasureAboveB {
                    argument: mid,
                    measure: s1 - s0,
                    b_phi: phi.b_phi(),
                }));
            }
            if p.b == 0.0 {
                jobs.push(Job::Exact(phi.eval(p.a) * (s1 - s0)));
            } else if s0 == 0.0 {
                return Err(Error::Invariant(format!("unbounded hyperbolic piece {p:?} at 0")));
            } else {
                jobs.push(Job::Quad(*p, s0, s1));
            }
        }
    }
    if let Some(t) = g.tail() {
        let u = t.mass / t.start;
        if phi.is_infinite_at(u) && u > phi.b_phi() {
            let end = t.mass / phi.b_phi();
            return Ok(ExtendedValue::infinite(Certificate::PositiveMeasureAboveB {
                argument: t.mass / (0.5 * (t.start + end)),
                measure: end - t.start,
                b_phi: phi.b_phi(),
            }));
        }
    }
    let mut total = ExtendedValue::finite(0.0, 0.0);
    for job in jobs {
        let part = match job {
            Job::Exact(v) => {
                if !v.is_finite() {
                    return Err(Error::Overflow(v));
                }
                ExtendedValue::finite(v, 4.0 * f64::EPSILON * v)
            }
            Job::Quad(p, s0, s1) => {
                let peak = p.eval(s0).max(p.eval(s1)).max(0.0);
                let v = move |t: f64| (p.a + p.b / t).max(0.0);
                let (val, err) = integrate_composed(phi, v, s0, s1, peak, tol)?;
                ExtendedValue::finite(val, err)
            }
        };
        total = total.plus(part);
    }
    if let Some(t) = g.tail() {
        total = total.plus(tail_integral(phi, t.start, t.mass, tol)?);
    }
    Ok(total)
}

/// `ρ_φ(x) = I_φ(C|x|)`.
pub fn modular_rho(phi: &OrliczFunction, x: &StepFunction, tol: &Tolerances) -> Result<ExtendedValue> {
    modular_hyperbolic(phi, &cesaro_mean(x), tol)
}

const MAX_BANDS: usize = 1000;
const STABLE_REL: f64 = 1e-6;

/// `∫_{t₀}^∞ φ(S/t) dt = S ∫₀^{S/t₀} φ(u)/u² du`.
///
/// Below the smallest kink of φ the `u`-range is cut into dyadic bands
/// `[u_k/2, u_k]`. The sum stops once the geometric remainder is negligible;
/// it is certified divergent once `φ(u_k)/u_k` stabilizes at some `c > 0`
/// (each further band then adds at least `c·ln 2`) or the partial integral
/// crosses the divergence threshold.
pub fn tail_integral(phi: &OrliczFunction, start: f64, mass: f64, tol: &Tolerances) -> Result<ExtendedValue> {
    if !(start > 0.0) || mass < 0.0 {
        return Err(Error::Domain(format!("tail needs start > 0 and mass ≥ 0, got ({start}, {mass})")));
    }
    let top = mass / start;
    if mass == 0.0 || top <= phi.a_phi() {
        return Ok(ExtendedValue::finite(0.0, 0.0));
    }
    if phi.is_infinite_at(top) && top > phi.b_phi() {
        let end = mass / phi.b_phi();
        return Ok(ExtendedValue::infinite(Certificate::PositiveMeasureAboveB {
            argument: mass / (0.5 * (start + end)),
            measure: end - start,
            b_phi: phi.b_phi(),
        }));
    }
    let g = |u: f64| phi.eval(u) / (u * u);
    let threshold = tol.divergence_threshold;

    // Upper region [u_low, top], split at kinks.
    let u_low = if phi.a_phi() > 0.0 {
        phi.a_phi()
    } else {
        phi.kinks().first().copied().unwrap_or(top).min(top)
    };
    let (mut sum, mut err) = (0.0, 0.0);
    if u_low < top {
        let mut cuts: Vec<f64> = phi.kinks().into_iter().filter(|&k| k > u_low && k < top).collect();
        cuts.insert(0, u_low);
        cuts.push(top);
        for w in cuts.windows(2) {
            let (v, e) = integrate_composed_u(phi, g, w[0], w[1], tol)?;
            sum += v;
            err += e;
        }
    }
    if phi.a_phi() > 0.0 {
        return Ok(ExtendedValue::finite(mass * sum, mass * err));
    }

    let mut partials = Vec::new();
    let mut hi = u_low;
    let mut prev_band: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    let mut slopes: Vec<f64> = Vec::new();
    for _ in 0..MAX_BANDS {
        let lo = hi / 2.0;
        let band = integrate(g, lo, hi, tol.quad_rel, tol.quad_abs * 1e-3, tol.max_subdivisions)?;
        sum += band.value;
        err += band.abs_error;
        partials.push(mass * sum);
        let decaying = prev_band.map_or(true, |p| band.value < (1.0 - STABLE_REL) * p);
        if mass * sum > threshold && !decaying {
            return Ok(ExtendedValue::infinite(Certificate::TailLowerBound {
                slope_lower_bound: phi.eval(lo) / lo,
                mass,
                start,
                partial_integrals: partials,
                extrapolated_doublings: 0,
                lower_bound: mass * sum,
                threshold,
            }));
        }
        if band.value == 0.0 {
            return Ok(ExtendedValue::finite(mass * sum, mass * err));
        }
        slopes.push(phi.eval(lo) / lo);
        if let Some(prev) = prev_band {
            ratios.push(band.value / prev);
        }
        prev_band = Some(band.value);

        let n = slopes.len();
        if n >= 4 {
            let c = slopes[n - 1];
            let stable = slopes[n - 4..]
                .windows(2)
                .all(|w| (w[0] - w[1]).abs() <= STABLE_REL * w[0].abs());
            if c > 0.0 && stable {
                let per = c * mass * std::f64::consts::LN_2;
                let need = ((threshold - mass * sum) / per).ceil().max(1.0);
                return Ok(ExtendedValue::infinite(Certificate::TailLowerBound {
                    slope_lower_bound: c,
                    mass,
                    start,
                    extrapolated_doublings: need as u64,
                    lower_bound: mass * sum + need * per,
                    partial_integrals: partials,
                    threshold,
                }));
            }
        }
        if let Some(&r) = ratios.last() {
            if r < 1.0 {
                let rem = band.value * r / (1.0 - r);
                if rem <= 0.1 * tol.quad_rel * sum {
                    return Ok(ExtendedValue::finite(mass * (sum + rem), mass * (err + rem)));
                }
                let m = ratios.len();
                if m >= 3 && r < 1.0 - STABLE_REL {
                    let drift = ratios[m - 3..]
                        .windows(2)
                        .map(|w| (w[0] - w[1]).abs())
                        .fold(0.0, f64::max);
                    if drift <= 1e-10 * r {
                        let slack = band.value * drift / ((1.0 - r) * (1.0 - r));
                        return Ok(ExtendedValue::finite(
                            mass * (sum + rem),
                            mass * (err + slack + 1e-12 * rem),
                        ));
                    }
                }
            }
        }
        hi = lo;
    }
    Err(Error::Indeterminate { lo: hi, hi: top, subdivisions: MAX_BANDS })
}

fn integrate_composed_u(
    phi: &OrliczFunction,
    g: impl Fn(f64) -> f64 + Copy,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    if !phi.eval(hi).is_finite() && !phi.is_infinite_at(hi) {
        return Err(Error::Overflow(hi));
    }
    let mut cuts = vec![lo];
    if lo > 0.0 {
        let mut t = lo;
        while hi / t > 4.0 {
            t *= 2.0;
            cuts.push(t);
        }
    }
    cuts.push(hi);
    let (mut v, mut e) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let r = integrate(g, w[0], w[1], tol.quad_rel, tol.quad_abs, tol.max_subdivisions)?;
        v += r.value;
        e += r.abs_error;
    }
    Ok((v, e))
}

/// Which norm: `‖f‖_φ` or `‖f‖_{Ces(φ)} = ‖C|f|‖_φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Plain,
    Cesaro,
}

impl std::str::FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" | "orlicz" => Ok(Space::Plain),
            "cesaro" | "ces" => Ok(Space::Cesaro),
            _ => Err(Error::Config(format!("unknown space `{s}` (expected plain|cesaro)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormStatus {
    Converged,
    Zero,
    Infinite,
}

/// Luxemburg norm with its bisection bracket. `value` is the feasible end
/// `hi`, so `modular(f/value) ≤ 1` always holds when `Converged`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    #[serde(with = "crate::extreal::vec")]
    pub bracket: Vec<f64>,
    pub iterations: u32,
    pub status: NormStatus,
}

impl NormResult {
    pub fn lo(&self) -> f64 {
        self.bracket[0]
    }

    pub fn hi(&self) -> f64 {
        self.bracket[1]
    }
}

/// Something whose scaled modular can be evaluated.
pub trait ModularTarget {
    fn is_zero(&self) -> bool;
    /// Rough magnitude used to seed the bracket search.
    fn magnitude(&self) -> f64;
    /// Modular of `k · self`.
    fn modular_scaled(&self, phi: &OrliczFunction, k: f64, tol: &Tolerances) -> Result<ExtendedValue>;
}

impl ModularTarget for StepFunction {
    fn is_zero(&self) -> bool {
        StepFunction::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.max_value()
    }
    fn modular_scaled(&self, phi: &OrliczFunction, k: f64, _tol: &Tolerances) -> Result<ExtendedValue> {
        modular_step(phi, &self.scale(k))
    }
}

impl ModularTarget for PiecewiseHyperbolic {
    fn is_zero(&self) -> bool {
        PiecewiseHyperbolic::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.sup()
    }
    fn modular_scaled(&self, phi: &OrliczFunction, k: f64, tol: &Tolerances) -> Result<ExtendedValue> {
        modular_hyperbolic(phi, &self.scale(k), tol)
    }
}

/// `inf{λ > 0 : modular(f/λ) ≤ 1}` by bisection.
///
/// The bracket is the dyadic binade `[2^(e−1), 2^e]` with `2^e` the least
/// feasible power of two; bisection inside it then visits the same
/// midpoints for every target, which keeps the result monotone in the
/// feasibility predicate.
pub fn luxemburg<T: ModularTarget + ?Sized>(phi: &OrliczFunction, f: &T, tol: &Tolerances) -> Result<NormResult> {
    if f.is_zero() {
        return Ok(NormResult { value: 0.0, bracket: vec![0.0, 0.0], iterations: 0, status: NormStatus::Zero });
    }
    let feasible = |lam: f64| -> Result<bool> {
        match f.modular_scaled(phi, 1.0 / lam, tol)? {
            ExtendedValue::Finite { value, .. } => Ok(value <= 1.0),
            ExtendedValue::CertifiedInfinite { .. } => Ok(false),
        }
    };
    let pow2 = |e: i32| 2f64.powi(e);
    let mut iterations = 0u32;
    let seed = f.magnitude().log2().floor();
    let seed = if seed.is_finite() { seed.clamp(-900.0, 900.0) as i32 } else { 0 };
    let limit = tol.max_bracket_log2;
    let mut e = seed;
    if feasible(pow2(e))? {
        loop {
            iterations += 1;
            if e - 1 < seed - limit || e - 1 < -1000 {
                return Err(Error::RootNotBracketed(format!("modular ≤ 1 down to λ = 2^{}", e - 1)));
            }
            if !feasible(pow2(e - 1))? {
                break;
            }
            e -= 1;
        }
    } else {
        loop {
            iterations += 1;
            if e + 1 > seed + limit {
                return Ok(NormResult {
                    value: f64::INFINITY,
                    bracket: vec![pow2(e), f64::INFINITY],
                    iterations,
                    status: NormStatus::Infinite,
                });
            }
            e += 1;
            if feasible(pow2(e))? {
                break;
            }
        }
    }
    let (mut lo, mut hi) = (pow2(e - 1), pow2(e));
    let width = tol.norm_rel * lo;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NormResult { value: hi, bracket: vec![lo, hi], iterations, status: NormStatus::Converged })
}

/// `‖f‖_φ` or `‖f‖_{Ces(φ)}`.
pub fn norm(phi: &OrliczFunction, f: &StepFunction, space: Space, tol: &Tolerances) -> Result<NormResult> {
    match space {
        Space::Plain => luxemburg(phi, f, tol),
        Space::Cesaro => luxemburg(phi, &cesaro_mean(f), tol),
    }
}

/// `I_φ(f)` or `ρ_φ(f)`.
pub fn modular(phi: &OrliczFunction, f: &StepFunction, space: Space, tol: &Tolerances) -> Result<ExtendedValue> {
    match space {
        Space::Plain => modular_step(phi, f),
        Space::Cesaro => modular_rho(phi, f, tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipKind {
    OrliczClass,
    OrliczSpace,
    CesSpace,
    CPhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub label: String,
    pub value: ExtendedValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub which: MembershipKind,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub note: String,
}

/// Largest `k = 2^K` tried for `C_φ` membership.
pub const C_PHI_MAX_LOG2: u32 = 10;

pub fn membership(
    phi: &OrliczFunction,
    x: &StepFunction,
    which: MembershipKind,
    tol: &Tolerances,
) -> MembershipReport {
    let mut evidence = Vec::new();
    let report = |verdict, evidence, note: String| MembershipReport { which, verdict, evidence, note };
    if x.is_zero() {
        return report(Verdict::Yes, evidence, "zero function".into());
    }
    match which {
        MembershipKind::OrliczClass => match modular_step(phi, x) {
            Ok(v) => {
                let verdict = if v.is_finite() { Verdict::Yes } else { Verdict::No };
                evidence.push(Evidence { label: "I(x)".into(), value: v });
                report(verdict, evidence, String::new())
            }
            Err(e) => report(Verdict::Undetermined, evidence, e.to_string()),
        },
        MembershipKind::OrliczSpace | MembershipKind::CesSpace => {
            let cesaro = which == MembershipKind::CesSpace;
            let mut certified_all = true;
            for k in 0..=tol.max_bracket_log2 {
                let lam = 2f64.powi(k);
                let v = if cesaro { modular_rho(phi, &x.scale(1.0 / lam), tol) } else { modular_step(phi, &x.scale(1.0 / lam)) };
                match v {
                    Ok(v) if v.is_finite() => {
                        evidence.push(Evidence { label: format!("modular(x/{lam})"), value: v });
                        return report(Verdict::Yes, evidence, String::new());
                    }
                    Ok(v) => {
                        if k == 0 || k == tol.max_bracket_log2 {
                            evidence.push(Evidence { label: format!("modular(x/{lam})"), value: v });
                        }
                    }
                    Err(_) => certified_all = false,
                }
            }
            if certified_all {
                report(Verdict::No, evidence, "modular infinite at every tested scale".into())
            } else {
                report(Verdict::Undetermined, evidence, "indeterminate modular at some scale".into())
            }
        }
        MembershipKind::CPhi => {
            for j in 0..=C_PHI_MAX_LOG2 {
                let k = 2f64.powi(j as i32);
                match modular_rho(phi, &x.scale(k), tol) {
                    Ok(v) => {
                        let finite = v.is_finite();
                        evidence.push(Evidence { label: format!("rho({k}x)"), value: v });
                        if !finite {
                            return report(Verdict::No, evidence, format!("ρ({k}x) certified infinite"));
                        }
                    }
                    Err(e) => return report(Verdict::Undetermined, evidence, e.to_string()),
                }
            }
            if !phi.is_finite_valued() {
                return report(Verdict::Undetermined, evidence, "φ takes the value ∞ and no divergence was found".into());
            }
            if x.domain() == IntervalDomain::UnitInterval {
                return report(Verdict::Yes, evidence, "φ < ∞ and Cx is bounded on [0,1]".into());
            }
            let top = x.max_value();
            for j in 0..=C_PHI_MAX_LOG2 {
                let k = 2f64.powi(j as i32);
                match tail_integral(phi, 1.0, k * top, tol) {
                    Ok(v) if v.is_finite() => {}
                    Ok(v) => {
                        evidence.push(Evidence { label: format!("tail({})", k * top), value: v });
                        return report(Verdict::Undetermined, evidence, "tail test failed".into());
                    }
                    Err(e) => return report(Verdict::Undetermined, evidence, e.to_string()),
                }
            }
            report(Verdict::Yes, evidence, "φ < ∞ and every tail test converged".into())
        }
    }
}
