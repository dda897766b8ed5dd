//! Sampled growth classifiers: Δ₂ verdicts, Matuszewska–Orlicz indices,
//! condition (S) and an empirical Hardy-operator constant.
//!
//! These are semi-decisions. Named families carry declared flags and a
//! sampled verdict contradicting a declared flag is reported as
//! [`Error::FlagMismatch`] rather than silently accepted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::funcrep::{IntervalDomain, StepFunction};
use crate::modular::{norm, NormStatus, Space};
use crate::orlicz::{log_grid, OrliczFunction};

/// Sample count of every Δ₂ grid.
pub const DELTA2_GRID: usize = 1 << 12;
/// Witness count at which Δ₂ failure is declared.
pub const FAIL_WITNESSES: usize = 16;
/// Witness count below which Δ₂ is declared to hold.
pub const HOLD_WITNESSES: usize = 8;
/// Cap on the length of an escalation sequence.
pub const MAX_WITNESSES: usize = 64;
/// Smallest `φ(u)` admitted into an escalation sequence, so that
/// `1/(2ⁿφ(u))` stays representable.
pub const MIN_WITNESS_PHI: f64 = 1e-290;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Zero,
    Infinity,
    AllArgs,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Regime> {
        match s {
            "zero" | "0" => Ok(Regime::Zero),
            "infinity" | "inf" => Ok(Regime::Infinity),
            "all" | "all_args" => Ok(Regime::AllArgs),
            _ => Err(Error::Config(format!("unknown regime `{s}` (expected zero|infinity|all)"))),
        }
    }
}

impl Regime {
    /// The regime in which `φ ∈ Δ₂` is meant on a given domain.
    pub fn for_domain(domain: IntervalDomain) -> Regime {
        match domain {
            IntervalDomain::UnitInterval => Regime::Infinity,
            IntervalDomain::HalfLine => Regime::AllArgs,
        }
    }
}

/// A point where `φ(2u)/φ(u)` is large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub u: f64,
    #[serde(with = "crate::extreal")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Delta2Verdict {
    Holds { k_hat: f64, u0: f64 },
    FailsWithWitness { witnesses: Vec<RatioPoint> },
    Undetermined { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub regime: Regime,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub regime: Regime,
    pub verdict: Delta2Verdict,
    pub grids: Vec<GridInfo>,
}

impl Delta2Report {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Delta2Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self.verdict, Delta2Verdict::FailsWithWitness { .. })
    }
}

/// `ln φ(2u) − ln φ(u)`, with `+∞` when `φ(u) = 0 < φ(2u)` or
/// `φ(u) < ∞ = φ(2u)`, and `None` when both vanish.
fn ln_ratio(phi: &OrliczFunction, u: f64) -> Option<f64> {
    let (lo, hi) = (phi.ln_eval(u), phi.ln_eval(2.0 * u));
    if lo == f64::INFINITY {
        return None;
    }
    if lo == f64::NEG_INFINITY {
        return (hi > f64::NEG_INFINITY).then_some(f64::INFINITY);
    }
    let (v, w) = (phi.eval(u), phi.eval(2.0 * u));
    if v.is_finite() && w.is_finite() && v > 1e-300 && !phi.is_infinite_at(2.0 * u) {
        Some((w / v).ln())
    } else {
        Some(hi - lo)
    }
}

/// The sampled `u`-range of a single regime.
fn regime_range(phi: &OrliczFunction, regime: Regime) -> Option<(f64, f64)> {
    let b = phi.b_phi();
    match regime {
        Regime::Zero => {
            let hi = 1f64.max(2.0 * phi.a_phi()).min(b / 4.0);
            let lo = 2f64.powi(-40);
            (lo < hi).then_some((lo, hi))
        }
        Regime::Infinity => {
            let (lo, hi) = (1f64.max(2.0 * phi.a_phi()), 2f64.powi(40).min(b));
            (lo < hi).then_some((lo, hi))
        }
        Regime::AllArgs => None,
    }
}

/// Sampled `(u, φ(2u)/φ(u))` over a regime's grid (for plotting).
pub fn ratio_curve(phi: &OrliczFunction, regime: Regime, points: usize) -> Vec<RatioPoint> {
    let ranges: Vec<(f64, f64)> = match regime {
        Regime::AllArgs => [Regime::Zero, Regime::Infinity].iter().filter_map(|&r| regime_range(phi, r)).collect(),
        r => regime_range(phi, r).into_iter().collect(),
    };
    ranges
        .into_iter()
        .flat_map(|(lo, hi)| log_grid(lo, hi, points))
        .filter_map(|u| ln_ratio(phi, u).map(|l| RatioPoint { u, ratio: l.exp() }))
        .collect()
}

/// Greedy escalation search: walking the grid towards the regime's limit
/// (`u → 0` or `u → ∞`), accept `u` as the next term `uₙ` when
/// `φ(2u) ≥ 2ⁿ φ(u)` and `min_phi ≤ φ(u) < ∞`.
pub fn escalation_sequence(phi: &OrliczFunction, regime: Regime, min_phi: f64, max_len: usize) -> Vec<RatioPoint> {
    let Some((lo, hi)) = regime_range(phi, regime) else {
        return Vec::new();
    };
    let mut grid = log_grid(lo, hi, DELTA2_GRID);
    if regime == Regime::Zero {
        grid.reverse();
    }
    let mut out = Vec::new();
    for u in grid {
        if out.len() >= max_len {
            break;
        }
        let v = phi.eval(u);
        if !(v.is_finite() && v >= min_phi) || phi.is_infinite_at(u) {
            continue;
        }
        let Some(l) = ln_ratio(phi, u) else { continue };
        let n = out.len() + 1;
        if l >= n as f64 * std::f64::consts::LN_2 {
            out.push(RatioPoint { u, ratio: l.exp() });
        }
    }
    out
}

fn single_regime(phi: &OrliczFunction, regime: Regime) -> (Delta2Verdict, Option<GridInfo>) {
    let Some((lo, hi)) = regime_range(phi, regime) else {
        if regime == Regime::Infinity && phi.b_phi() <= 1.0 {
            return (trivial_cap_failure(phi), None);
        }
        return (Delta2Verdict::Undetermined { reason: "empty sampling range".into() }, None);
    };
    let grid = GridInfo { regime, lo, hi, points: DELTA2_GRID };
    if regime == Regime::Infinity && phi.b_phi().is_finite() {
        return (trivial_cap_failure(phi), Some(grid));
    }
    let lnr: Vec<(f64, f64)> = log_grid(lo, hi, DELTA2_GRID)
        .into_iter()
        .filter_map(|u| ln_ratio(phi, u).map(|l| (u, l)))
        .collect();
    if lnr.is_empty() {
        return (Delta2Verdict::Undetermined { reason: "φ vanishes on the whole grid".into() }, Some(grid));
    }
    let infinite: Vec<RatioPoint> = lnr
        .iter()
        .filter(|(_, l)| l.is_infinite())
        .take(MAX_WITNESSES)
        .map(|&(u, _)| RatioPoint { u, ratio: f64::INFINITY })
        .collect();
    if !infinite.is_empty() {
        let mut w = infinite;
        if regime == Regime::Zero {
            w.reverse();
        }
        return (Delta2Verdict::FailsWithWitness { witnesses: w }, Some(grid));
    }
    let seq = escalation_sequence(phi, regime, MIN_WITNESS_PHI, MAX_WITNESSES);
    let max_ln = lnr.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if seq.len() >= FAIL_WITNESSES {
        Delta2Verdict::FailsWithWitness { witnesses: seq }
    } else if seq.len() < HOLD_WITNESSES && max_ln.is_finite() {
        let u0 = if regime == Regime::Zero { hi } else { lo };
        Delta2Verdict::Holds { k_hat: max_ln.exp(), u0 }
    } else {
        Delta2Verdict::Undetermined {
            reason: format!("{} escalating grid points, between the hold and fail thresholds", seq.len()),
        }
    };
    (verdict, Some(grid))
}

/// `b_φ < ∞`: `φ(2u) = ∞ > φ(u)` for every `u ∈ (b_φ/2, b_φ)`.
fn trivial_cap_failure(phi: &OrliczFunction) -> Delta2Verdict {
    let b = phi.b_phi();
    let witnesses = (1..=FAIL_WITNESSES)
        .map(|n| RatioPoint { u: b * (1.0 - 2f64.powi(-(n as i32) - 1)), ratio: f64::INFINITY })
        .collect();
    Delta2Verdict::FailsWithWitness { witnesses }
}

fn check_flag(flag: &'static str, declared: Option<bool>, verdict: &Delta2Verdict) -> Result<()> {
    match (declared, verdict) {
        (Some(false), Delta2Verdict::Holds { .. }) => Err(Error::FlagMismatch { flag, declared: false }),
        (Some(true), Delta2Verdict::FailsWithWitness { .. }) => Err(Error::FlagMismatch { flag, declared: true }),
        _ => Ok(()),
    }
}

/// Sampled Δ₂ classification, cross-checked against declared flags.
pub fn delta2_test(phi: &OrliczFunction, regime: Regime) -> Result<Delta2Report> {
    let flags = *phi.flags();
    match regime {
        Regime::Zero | Regime::Infinity => {
            let (verdict, grid) = single_regime(phi, regime);
            let flag = if regime == Regime::Zero {
                ("delta2_zero", flags.delta2_zero)
            } else {
                ("delta2_infinity", flags.delta2_infinity)
            };
            check_flag(flag.0, flag.1, &verdict)?;
            Ok(Delta2Report { regime, verdict, grids: grid.into_iter().collect() })
        }
        Regime::AllArgs => {
            let zero = delta2_test(phi, Regime::Zero)?;
            let inf = delta2_test(phi, Regime::Infinity)?;
            let grids = zero.grids.iter().chain(inf.grids.iter()).cloned().collect();
            let verdict = match (&zero.verdict, &inf.verdict) {
                (Delta2Verdict::FailsWithWitness { .. }, _) => zero.verdict.clone(),
                (_, Delta2Verdict::FailsWithWitness { .. }) => inf.verdict.clone(),
                (Delta2Verdict::Holds { k_hat: k0, .. }, Delta2Verdict::Holds { k_hat: k1, .. }) => {
                    Delta2Verdict::Holds { k_hat: k0.max(*k1), u0: 0.0 }
                }
                (Delta2Verdict::Undetermined { reason }, _) | (_, Delta2Verdict::Undetermined { reason }) => {
                    Delta2Verdict::Undetermined { reason: reason.clone() }
                }
            };
            Ok(Delta2Report { regime, verdict, grids })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Determined,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub alpha_hat: f64,
    #[serde(with = "crate::extreal")]
    pub beta_hat: f64,
    pub fit_residual: f64,
    pub status: EstimateStatus,
    /// `(s, ln M(s))` samples.
    pub curve: Vec<(f64, f64)>,
}

const INDEX_GRID: usize = 1 << 10;
const FIT_RESIDUAL_MAX: f64 = 0.05;

/// `ln M(s) = max_u (ln φ(su) − ln φ(u))` over the sampled `u`.
fn ln_dilation(phi: &OrliczFunction, s: f64, grid: &[f64], unit: bool) -> f64 {
    grid.iter()
        .filter(|&&u| !unit || s * u >= 1.0)
        .filter_map(|&u| {
            let (num, den) = (phi.ln_eval(s * u), phi.ln_eval(u));
            if den == f64::INFINITY || den == f64::NEG_INFINITY {
                if den == f64::NEG_INFINITY && num > f64::NEG_INFINITY {
                    return Some(f64::INFINITY);
                }
                return None;
            }
            Some(num - den)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn slope_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let rss: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Matuszewska–Orlicz indices over all arguments (the `[0,∞)` reading).
pub fn matuszewska_indices(phi: &OrliczFunction) -> IndexEstimate {
    matuszewska_indices_on(phi, IntervalDomain::HalfLine)
}

/// Matuszewska–Orlicz indices. On `[0,1]` only large arguments matter, so
/// the sup runs over `u ≥ 1` with `su ≥ 1`.
pub fn matuszewska_indices_on(phi: &OrliczFunction, domain: IntervalDomain) -> IndexEstimate {
    let unit = domain == IntervalDomain::UnitInterval;
    let (lo, hi) = if unit { (1.0, 2f64.powi(30)) } else { (2f64.powi(-30), 2f64.powi(30)) };
    let grid = log_grid(lo, hi, INDEX_GRID);
    let curve_for = |ks: &mut dyn Iterator<Item = i32>| -> Vec<(f64, f64)> {
        ks.map(|k| {
            let s = 2f64.powi(k);
            (s, ln_dilation(phi, s, &grid, unit))
        })
        .collect()
    };
    let small = curve_for(&mut (1..=10).map(|k| -k));
    let large = curve_for(&mut (1..=10));
    let fit = |c: &[(f64, f64)]| -> Option<(f64, f64)> {
        if c.iter().any(|p| !p.1.is_finite()) {
            return None;
        }
        Some(slope_fit(&c.iter().map(|&(s, l)| (s.ln(), l)).collect::<Vec<_>>()))
    };
    let (alpha, res_a) = fit(&small).unwrap_or((f64::NAN, f64::INFINITY));
    let (beta, res_b) = fit(&large).unwrap_or((f64::INFINITY, 0.0));
    let residual = res_a.max(res_b);
    let status = if residual > FIT_RESIDUAL_MAX || !alpha.is_finite() {
        EstimateStatus::Undetermined
    } else {
        EstimateStatus::Determined
    };
    let mut curve = small;
    curve.reverse();
    curve.extend(large);
    IndexEstimate { alpha_hat: alpha, beta_hat: beta, fit_residual: residual, status, curve }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionS {
    Holds { estimate: f64 },
    Fails { estimate: f64 },
    Undetermined { reason: String },
}

const S_MARGIN: f64 = 0.01;

/// `liminf_{t→0} tφ′(t)/φ(t) > 1`, estimated by symmetric differences of
/// `ln φ` (step `u·2⁻²⁰`) over the smallest decade of a log grid.
pub fn condition_s(phi: &OrliczFunction) -> ConditionS {
    if phi.a_phi() > 0.0 {
        return ConditionS::Undetermined { reason: "a_φ > 0: the quotient is undefined near 0".into() };
    }
    let lo = 2f64.powi(-40);
    let hi = 1f64.min(phi.b_phi() / 2.0);
    let h = 2f64.powi(-20);
    let mut est = f64::INFINITY;
    for u in log_grid(lo, hi, DELTA2_GRID).into_iter().filter(|&u| u <= 10.0 * lo) {
        let (up, dn) = (phi.ln_eval(u * (1.0 + h)), phi.ln_eval(u * (1.0 - h)));
        if !(up.is_finite() && dn.is_finite()) {
            return ConditionS::Undetermined { reason: format!("ln φ not finite near u = {u:e}") };
        }
        est = est.min((up - dn) / (2.0 * h));
    }
    if est > 1.0 + S_MARGIN {
        ConditionS::Holds { estimate: est }
    } else {
        ConditionS::Fails { estimate: est }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub alpha_hat: f64,
    #[serde(with = "crate::extreal")]
    pub c_hat: f64,
    #[serde(with = "crate::extreal")]
    pub c_hat_half: f64,
    pub stable: bool,
    pub consistent: bool,
    /// `‖x‖_{Ces}/‖x‖_φ` per corpus element (`NaN` where skipped).
    #[serde(with = "crate::extreal::vec")]
    pub ratios: Vec<f64>,
    pub skipped: usize,
    /// `(n, ratio)` for `χ_[0,1/n)` when `α̂ ≈ 1`.
    pub escalation: Option<Vec<(f64, f64)>>,
    pub escalating: bool,
}

/// Ratio `‖x‖_{Ces(φ)}/‖x‖_φ`; `None` if a norm is indeterminate or zero.
pub fn hardy_ratio(phi: &OrliczFunction, x: &StepFunction, tol: &Tolerances) -> Option<f64> {
    let plain = norm(phi, x, Space::Plain, tol).ok()?;
    if plain.status != NormStatus::Converged {
        return None;
    }
    let ces = norm(phi, x, Space::Cesaro, tol).ok()?;
    match ces.status {
        NormStatus::Converged => Some(ces.value / plain.value),
        NormStatus::Infinite => Some(f64::INFINITY),
        NormStatus::Zero => None,
    }
}

/// Empirical Hardy constant over a corpus.
pub fn hardy_probe(phi: &OrliczFunction, domain: IntervalDomain, corpus: &[StepFunction], tol: &Tolerances) -> Result<HardyReport> {
    if corpus.is_empty() {
        return Err(Error::Precondition("hardy probe needs a nonempty corpus".into()));
    }
    let alpha = matuszewska_indices_on(phi, domain).alpha_hat;
    let ratios: Vec<f64> = corpus
        .par_iter()
        .map(|x| hardy_ratio(phi, x, tol).unwrap_or(f64::NAN))
        .collect();
    let skipped = ratios.iter().filter(|r| r.is_nan()).count();
    let max_of = |r: &[f64]| r.iter().filter(|v| !v.is_nan()).fold(0.0f64, |a, &b| a.max(b));
    let c_hat = max_of(&ratios);
    let c_hat_half = max_of(&ratios[..ratios.len().div_ceil(2)]);
    let stable = c_hat.is_finite() && c_hat <= 1.25 * c_hat_half;
    let (escalation, escalating) = if alpha < 1.0 + 0.05 {
        let seq: Vec<(f64, f64)> = (0..=10)
            .map(|k| {
                let n = 2f64.powi(k);
                let x = StepFunction::indicator(domain, 0.0, 1.0 / n, 1.0).expect("valid indicator");
                (n, hardy_ratio(phi, &x, tol).unwrap_or(f64::NAN))
            })
            .collect();
        let esc = seq.windows(2).all(|w| w[1].1 > w[0].1 || w[1].1.is_infinite())
            || seq.iter().all(|p| p.1.is_infinite());
        (Some(seq), esc)
    } else {
        (None, false)
    };
    let consistent = if alpha > 1.0 + 0.05 { stable } else { escalating || !stable };
    Ok(HardyReport { alpha_hat: alpha, c_hat, c_hat_half, stable, consistent, ratios, skipped, escalation, escalating })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::{make_family, Family};
    use approx::assert_abs_diff_eq;

    fn fam(f: Family, p: &[f64]) -> OrliczFunction {
        make_family(f, p).unwrap()
    }

    #[test]
    fn power_holds_with_exact_constant() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let phi = fam(Family::Power, &[p]);
            for regime in [Regime::Zero, Regime::Infinity, Regime::AllArgs] {
                let r = delta2_test(&phi, regime).unwrap();
                match r.verdict {
                    Delta2Verdict::Holds { k_hat, .. } => assert!((k_hat - 2f64.powf(p)).abs() <= 1e-6, "{p} {k_hat}"),
                    other => panic!("{p} {regime:?}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn failures_found() {
        let exp = fam(Family::ExpGap, &[]);
        let r = delta2_test(&exp, Regime::Infinity).unwrap();
        let Delta2Verdict::FailsWithWitness { witnesses } = &r.verdict else { panic!("{r:?}") };
        assert!(witnesses.len() >= FAIL_WITNESSES);
        for (n, w) in witnesses.iter().enumerate() {
            assert!(w.ratio >= 2f64.powi(n as i32 + 1));
        }
        assert!(witnesses.windows(2).all(|w| w[1].u > w[0].u));
        assert!(delta2_test(&exp, Regime::AllArgs).unwrap().fails());
        assert!(delta2_test(&exp, Regime::Zero).unwrap().holds());

        let flat = fam(Family::FlatZeroExp, &[0.25]);
        let r = delta2_test(&flat, Regime::Zero).unwrap();
        let Delta2Verdict::FailsWithWitness { witnesses } = &r.verdict else { panic!("{r:?}") };
        assert!(witnesses.windows(2).all(|w| w[1].u < w[0].u));
        assert!(delta2_test(&flat, Regime::Infinity).unwrap().holds());

        let cap = fam(Family::CappedInfinite, &[1.0]);
        assert!(delta2_test(&cap, Regime::Infinity).unwrap().fails());
        let shifted = fam(Family::ShiftedPower, &[1.0, 1.0]);
        assert!(delta2_test(&shifted, Regime::Zero).unwrap().fails());
        assert!(delta2_test(&shifted, Regime::Infinity).unwrap().holds());
    }

    #[test]
    fn named_families_reproduce_flags() {
        for f in Family::NAMED {
            let params: &[f64] = match f {
                Family::Power => &[2.0],
                Family::ShiftedPower => &[1.0, 2.0],
                Family::ExpGap => &[],
                Family::FlatZeroExp => &[0.25],
                Family::CappedFinite | Family::CappedInfinite => &[1.0],
                _ => &[1.0, 1.0, 2.0],
            };
            let phi = fam(f, params);
            for regime in [Regime::Zero, Regime::Infinity, Regime::AllArgs] {
                let r = delta2_test(&phi, regime).unwrap();
                assert!(!matches!(r.verdict, Delta2Verdict::Undetermined { .. }), "{f:?} {regime:?}");
            }
        }
    }

    #[test]
    fn mismatched_flag_is_an_error() {
        let mut flags = *fam(Family::ExpGap, &[]).flags();
        flags.delta2_infinity = Some(true);
        let liar = fam(Family::ExpGap, &[]).with_flags(flags);
        assert!(matches!(delta2_test(&liar, Regime::Infinity), Err(Error::FlagMismatch { .. })));
    }

    #[test]
    fn power_indices() {
        for p in [1.0, 2.0, 3.0] {
            let e = matuszewska_indices(&fam(Family::Power, &[p]));
            assert_abs_diff_eq!(e.alpha_hat, p, epsilon = 0.01);
            assert_abs_diff_eq!(e.beta_hat, p, epsilon = 0.01);
            assert_eq!(e.status, EstimateStatus::Determined);
        }
        let pwl = matuszewska_indices(&fam(Family::PiecewiseLinearConvex, &[1.0, 1.0, 2.0]));
        assert!(1.0 - 1e-9 <= pwl.alpha_hat && pwl.alpha_hat <= pwl.beta_hat + pwl.fit_residual);
        let cap = matuszewska_indices(&fam(Family::CappedFinite, &[1.0]));
        assert!(cap.beta_hat.is_infinite());
    }

    #[test]
    fn condition_s_examples() {
        assert!(matches!(condition_s(&fam(Family::Power, &[2.0])), ConditionS::Holds { estimate } if (estimate - 2.0).abs() < 1e-6));
        assert!(matches!(condition_s(&fam(Family::Power, &[1.0])), ConditionS::Fails { estimate } if (estimate - 1.0).abs() < 1e-6));
        assert!(matches!(condition_s(&fam(Family::ShiftedPower, &[1.0, 1.0])), ConditionS::Undetermined { .. }));
        assert!(matches!(condition_s(&fam(Family::ExpGap, &[])), ConditionS::Holds { .. }));
    }

    #[test]
    fn hardy_singleton() {
        let phi = fam(Family::Power, &[2.0]);
        let x = StepFunction::indicator(IntervalDomain::HalfLine, 0.0, 1.0, 1.0).unwrap();
        let r = hardy_probe(&phi, IntervalDomain::HalfLine, &[x], &Tolerances::default()).unwrap();
        assert!((r.c_hat - 2f64.sqrt()).abs() < 1e-8);
        assert!(r.consistent);
    }

    #[test]
    fn hardy_power_one_escalates() {
        let phi = fam(Family::Power, &[1.0]);
        let x = StepFunction::indicator(IntervalDomain::UnitInterval, 0.0, 0.5, 1.0).unwrap();
        let r = hardy_probe(&phi, IntervalDomain::UnitInterval, &[x], &Tolerances::default()).unwrap();
        assert!(r.escalating, "{:?}", r.escalation);
        let esc = r.escalation.unwrap();
        // ‖χ_[0,1/n)‖_Ces / ‖χ_[0,1/n)‖_1 = 1 + ln n on [0,1]
        let (n, ratio) = esc[6];
        assert!((ratio - (1.0 + n.ln())).abs() < 1e-6);
    }
}
