//! Orlicz functions: convex, nondecreasing `φ: [0,∞) → [0,∞]` with
//! `φ(0) = 0`, left-continuous at `b_φ`.
//!
//! Every function carries its degeneracy parameters
//!
//! * `a_φ = sup{u ≥ 0 : φ(u) = 0}`
//! * `b_φ = sup{u > 0 : φ(u) < ∞}`
//! * `φ(b_φ)` (finite or `+∞`)
//!
//! and optional declared analytic flags which the sampled classifiers in
//! [`crate::indices`] must reproduce.
//!
//! Values are plain `f64` with `+∞` meaning "infinite". A value of `+∞`
//! returned strictly below `b_φ` is an overflow, never a genuine infinity;
//! callers distinguish the two through [`OrliczFunction::is_infinite_at`].
//! [`OrliczFunction::ln_eval`] evaluates `ln φ` without underflow or
//! overflow and is what the structural predicates (zero / finite) use.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named families. Each realizes a degeneracy exercised by the witness
/// constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `u^p`, `p ≥ 1`.
    Power,
    /// `((u − a)₊)^p`, `a > 0`, `p ≥ 1`.
    ShiftedPower,
    /// `e^u − u − 1`; fails Δ₂ for large arguments.
    ExpGap,
    /// `e^{−1/u}` up to a knot `u* ≤ 1/2`, tangent line above; fails Δ₂ at 0.
    FlatZeroExp,
    /// `u` on `[0,b]`, `+∞` above; `φ(b_φ) < ∞`.
    CappedFinite,
    /// `u/(b − u)` on `[0,b)`, `+∞` from `b` on; `φ(b_φ) = ∞`.
    CappedInfinite,
    /// Convex piecewise-linear from a slope/knot list.
    PiecewiseLinearConvex,
    /// User-supplied evaluator.
    Custom,
}

impl Family {
    pub const NAMED: [Family; 7] = [
        Family::Power,
        Family::ShiftedPower,
        Family::ExpGap,
        Family::FlatZeroExp,
        Family::CappedFinite,
        Family::CappedInfinite,
        Family::PiecewiseLinearConvex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::ShiftedPower => "shifted_power",
            Family::ExpGap => "exp_gap",
            Family::FlatZeroExp => "flat_zero_exp",
            Family::CappedFinite => "capped_finite",
            Family::CappedInfinite => "capped_infinite",
            Family::PiecewiseLinearConvex => "piecewise_linear_convex",
            Family::Custom => "custom",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "power" | "pow" => Family::Power,
            "shifted_power" | "shifted" => Family::ShiftedPower,
            "exp_gap" | "exp" => Family::ExpGap,
            "flat_zero_exp" | "flat_exp" => Family::FlatZeroExp,
            "capped_finite" | "capped_fin" => Family::CappedFinite,
            "capped_infinite" | "capped_inf" => Family::CappedInfinite,
            "piecewise_linear_convex" | "piecewise_linear" | "pwl" => {
                Family::PiecewiseLinearConvex
            }
            "custom" => Family::Custom,
            other => return Err(Error::InvalidPhi(format!("unknown family `{other}`"))),
        })
    }
}

/// Constructor hints. `None` means "not declared".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeclaredFlags {
    pub delta2_zero: Option<bool>,
    pub delta2_infinity: Option<bool>,
    pub condition_s: Option<bool>,
    pub positive: Option<bool>,
    pub finite: Option<bool>,
}

/// Serializable description of a φ: `{"family": ..., "params": [...], "flags": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<DeclaredFlags>,
}

impl PhiSpec {
    pub fn new(family: Family, params: &[f64]) -> PhiSpec {
        PhiSpec {
            family: family.name().to_string(),
            params: params.to_vec(),
            flags: None,
        }
    }

    /// Parses the compact `family:p1,p2,...` form (`power:2`, `capped_inf:1`, `exp_gap`).
    pub fn parse_compact(s: &str) -> Result<PhiSpec> {
        let (fam, rest) = match s.split_once(':') {
            Some((f, r)) => (f, r),
            None => (s, ""),
        };
        let family: Family = fam.parse()?;
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidPhi(format!("bad parameter `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhiSpec::new(family, &params))
    }

    pub fn build(&self) -> Result<OrliczFunction> {
        let family: Family = self.family.parse()?;
        let mut phi = make_family(family, &self.params)?;
        if let Some(flags) = self.flags {
            phi = phi.with_flags(flags);
        }
        Ok(phi)
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kernel {
    Power { p: f64 },
    ShiftedPower { a: f64, p: f64 },
    ExpGap,
    FlatZeroExp { knot: f64, value: f64, slope: f64 },
    CappedFinite { b: f64 },
    CappedInfinite { b: f64 },
    PiecewiseLinear { knots: Vec<f64>, slopes: Vec<f64>, offsets: Vec<f64> },
    Custom(Evaluator),
}

fn exp_gap(u: f64) -> f64 {
    if u < 0.5 {
        // e^u − u − 1 = Σ_{k≥2} u^k / k!, summed directly to avoid cancellation
        let mut term = u * u / 2.0;
        let mut sum = 0.0;
        let mut k = 2.0;
        while term > sum * 1e-18 && term > 0.0 {
            sum += term;
            k += 1.0;
            term *= u / k;
        }
        sum
    } else {
        u.exp_m1() - u
    }
}

impl Kernel {
    fn value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            Kernel::Power { p } => {
                if *p == 1.0 {
                    u
                } else if *p == 2.0 {
                    u * u
                } else {
                    u.powf(*p)
                }
            }
            Kernel::ShiftedPower { a, p } => {
                let d = u - a;
                if d <= 0.0 {
                    0.0
                } else if *p == 1.0 {
                    d
                } else if *p == 2.0 {
                    d * d
                } else {
                    d.powf(*p)
                }
            }
            Kernel::ExpGap => exp_gap(u),
            Kernel::FlatZeroExp { knot, value, slope } => {
                if u <= *knot {
                    (-1.0 / u).exp()
                } else {
                    value + slope * (u - knot)
                }
            }
            Kernel::CappedFinite { b } => {
                if u <= *b {
                    u
                } else {
                    f64::INFINITY
                }
            }
            Kernel::CappedInfinite { b } => {
                if u < *b {
                    u / (b - u)
                } else {
                    f64::INFINITY
                }
            }
            Kernel::PiecewiseLinear { knots, slopes, offsets } => {
                let i = knots.partition_point(|&k| k <= u).saturating_sub(1);
                offsets[i] + slopes[i] * (u - knots[i])
            }
            Kernel::Custom(f) => f(u),
        }
    }

    fn ln_value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            Kernel::Power { p } => p * u.ln(),
            Kernel::ShiftedPower { a, p } => {
                let d = u - a;
                if d <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p * d.ln()
                }
            }
            Kernel::ExpGap => {
                if u < 700.0 {
                    exp_gap(u).ln()
                } else {
                    u + (-(1.0 + u) * (-u).exp()).ln_1p()
                }
            }
            Kernel::FlatZeroExp { knot, .. } if u <= *knot => -1.0 / u,
            _ => self.value(u).ln(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            Kernel::ShiftedPower { a, .. } => vec![*a],
            Kernel::FlatZeroExp { knot, .. } => vec![*knot],
            Kernel::CappedFinite { b } | Kernel::CappedInfinite { b } => vec![*b],
            Kernel::PiecewiseLinear { knots, .. } => knots[1..].to_vec(),
            _ => Vec::new(),
        }
    }
}

/// An Orlicz function with its structural parameters. Immutable and cheap
/// to clone (custom evaluators are shared).
#[derive(Clone)]
pub struct OrliczFunction {
    kernel: Kernel,
    family: Family,
    params: Vec<f64>,
    label: String,
    a_phi: f64,
    b_phi: f64,
    value_at_b: f64,
    flags: DeclaredFlags,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczFunction")
            .field("label", &self.label)
            .field("a_phi", &self.a_phi)
            .field("b_phi", &self.b_phi)
            .field("value_at_b", &self.value_at_b)
            .field("flags", &self.flags)
            .finish()
    }
}

impl fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidPhi(msg()))
    }
}

fn params_len(family: Family, params: &[f64], allowed: &[usize]) -> Result<()> {
    check(allowed.contains(&params.len()), || {
        format!("{} takes {:?} parameters, got {}", family.name(), allowed, params.len())
    })?;
    check(params.iter().all(|p| p.is_finite()), || {
        format!("{} parameters must be finite", family.name())
    })
}

/// Builds a named family with exact analytic `a_φ`, `b_φ`, `φ(b_φ)` and flags.
///
/// Parameter conventions:
/// `power [p]`, `shifted_power [a, p]`, `exp_gap []`, `flat_zero_exp [u*]`
/// (default `u* = 1/4`), `capped_finite [b]`, `capped_infinite [b]`,
/// `piecewise_linear_convex [s0, u1, s1, u2, s2, ...]` (slope `s0` on
/// `[0,u1)`, `s1` on `[u1,u2)`, ...).
pub fn make_family(family: Family, params: &[f64]) -> Result<OrliczFunction> {
    let yes = Some(true);
    let no = Some(false);
    let (kernel, a_phi, b_phi, value_at_b, flags, label) = match family {
        Family::Power => {
            params_len(family, params, &[1])?;
            let p = params[0];
            check(p >= 1.0, || format!("power exponent must be ≥ 1, got {p}"))?;
            let flags = DeclaredFlags {
                delta2_zero: yes,
                delta2_infinity: yes,
                condition_s: Some(p > 1.0),
                positive: yes,
                finite: yes,
            };
            (Kernel::Power { p }, 0.0, f64::INFINITY, f64::INFINITY, flags, format!("power({p})"))
        }
        Family::ShiftedPower => {
            params_len(family, params, &[2])?;
            let (a, p) = (params[0], params[1]);
            check(a > 0.0, || format!("shift must be > 0, got {a}"))?;
            check(p >= 1.0, || format!("power exponent must be ≥ 1, got {p}"))?;
            let flags = DeclaredFlags {
                delta2_zero: no,
                delta2_infinity: yes,
                condition_s: None,
                positive: no,
                finite: yes,
            };
            (
                Kernel::ShiftedPower { a, p },
                a,
                f64::INFINITY,
                f64::INFINITY,
                flags,
                format!("shifted_power({a},{p})"),
            )
        }
        Family::ExpGap => {
            params_len(family, params, &[0])?;
            let flags = DeclaredFlags {
                delta2_zero: yes,
                delta2_infinity: no,
                condition_s: yes,
                positive: yes,
                finite: yes,
            };
            (Kernel::ExpGap, 0.0, f64::INFINITY, f64::INFINITY, flags, "exp_gap".to_string())
        }
        Family::FlatZeroExp => {
            params_len(family, params, &[0, 1])?;
            let knot = params.first().copied().unwrap_or(0.25);
            check(knot > 0.0 && knot <= 0.5, || {
                format!("flat_zero_exp knot must lie in (0, 1/2] for convexity, got {knot}")
            })?;
            let value = (-1.0 / knot).exp();
            let slope = value / (knot * knot);
            let flags = DeclaredFlags {
                delta2_zero: no,
                delta2_infinity: yes,
                condition_s: yes,
                positive: yes,
                finite: yes,
            };
            (
                Kernel::FlatZeroExp { knot, value, slope },
                0.0,
                f64::INFINITY,
                f64::INFINITY,
                flags,
                format!("flat_zero_exp({knot})"),
            )
        }
        Family::CappedFinite => {
            params_len(family, params, &[1])?;
            let b = params[0];
            check(b > 0.0, || format!("cap must be > 0, got {b}"))?;
            let flags = DeclaredFlags {
                delta2_zero: yes,
                delta2_infinity: no,
                condition_s: no,
                positive: yes,
                finite: no,
            };
            (Kernel::CappedFinite { b }, 0.0, b, b, flags, format!("capped_finite({b})"))
        }
        Family::CappedInfinite => {
            params_len(family, params, &[1])?;
            let b = params[0];
            check(b > 0.0, || format!("cap must be > 0, got {b}"))?;
            let flags = DeclaredFlags {
                delta2_zero: yes,
                delta2_infinity: no,
                condition_s: no,
                positive: yes,
                finite: no,
            };
            (
                Kernel::CappedInfinite { b },
                0.0,
                b,
                f64::INFINITY,
                flags,
                format!("capped_infinite({b})"),
            )
        }
        Family::PiecewiseLinearConvex => piecewise_linear(params)?,
        Family::Custom => {
            return Err(Error::InvalidPhi(
                "custom functions are built with OrliczFunction::custom".into(),
            ))
        }
    };
    let phi = OrliczFunction {
        kernel,
        family,
        params: params.to_vec(),
        label,
        a_phi,
        b_phi,
        value_at_b,
        flags,
    };
    phi.validate()?;
    Ok(phi)
}

type Built = (Kernel, f64, f64, f64, DeclaredFlags, String);

fn piecewise_linear(params: &[f64]) -> Result<Built> {
    check(params.len() % 2 == 1, || {
        "piecewise_linear_convex expects [s0, u1, s1, ...] (odd length)".into()
    })?;
    check(params.iter().all(|p| p.is_finite()), || "parameters must be finite".into())?;
    let mut knots = vec![0.0];
    let mut slopes = vec![params[0]];
    for pair in params[1..].chunks(2) {
        knots.push(pair[0]);
        slopes.push(pair[1]);
    }
    check(slopes.iter().all(|&s| s >= 0.0), || "slopes must be nonnegative".into())?;
    check(knots.windows(2).all(|w| w[0] < w[1]), || {
        "knots must be positive and strictly increasing".into()
    })?;
    check(slopes.windows(2).all(|w| w[0] <= w[1]), || {
        format!("slopes {slopes:?} are not nondecreasing: function is not convex")
    })?;
    check(*slopes.last().unwrap() > 0.0, || "function is identically zero".into())?;
    let mut offsets = vec![0.0];
    for i in 1..knots.len() {
        let prev = offsets[i - 1] + slopes[i - 1] * (knots[i] - knots[i - 1]);
        offsets.push(prev);
    }
    let first_positive = slopes.iter().position(|&s| s > 0.0).unwrap();
    let a_phi = knots[first_positive];
    let flags = DeclaredFlags {
        delta2_zero: Some(a_phi == 0.0),
        delta2_infinity: Some(true),
        condition_s: if a_phi == 0.0 { Some(false) } else { None },
        positive: Some(a_phi == 0.0),
        finite: Some(true),
    };
    let label = format!(
        "piecewise_linear_convex({})",
        params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    Ok((
        Kernel::PiecewiseLinear { knots, slopes, offsets },
        a_phi,
        f64::INFINITY,
        f64::INFINITY,
        flags,
        label,
    ))
}

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default size of the convexity / monotonicity sampling grid.
pub const VALIDATION_GRID: usize = 1 << 10;

impl OrliczFunction {
    /// Wraps a black-box evaluator. `a_φ`, `b_φ` and `φ(b_φ)` are detected
    /// by bisection; the function is then checked for the Orlicz axioms on a
    /// sampled grid and rejected if any fails.
    pub fn custom<F>(label: &str, f: F) -> Result<OrliczFunction>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let kernel = Kernel::Custom(Arc::new(f));
        let mut phi = OrliczFunction {
            kernel,
            family: Family::Custom,
            params: Vec::new(),
            label: format!("custom({label})"),
            a_phi: 0.0,
            b_phi: f64::INFINITY,
            value_at_b: f64::INFINITY,
            flags: DeclaredFlags::default(),
        };
        check(phi.kernel.value(0.0) == 0.0, || "φ(0) must be 0".into())?;
        let (a, b) = phi.detect_raw()?;
        phi.a_phi = a;
        phi.b_phi = b;
        if b.is_finite() {
            phi.value_at_b = phi.kernel.value(b);
        }
        phi.validate()?;
        Ok(phi)
    }

    /// Replaces the declared flags.
    pub fn with_flags(mut self, flags: DeclaredFlags) -> OrliczFunction {
        self.flags = flags;
        self
    }

    /// `φ(u)`; `+∞` beyond `b_φ` (and at `b_φ` when `φ(b_φ) = ∞`).
    pub fn eval(&self, u: f64) -> f64 {
        if self.is_infinite_at(u) {
            return f64::INFINITY;
        }
        self.kernel.value(u)
    }

    /// `ln φ(u)`, `−∞` exactly on `[0, a_φ]`, `+∞` exactly where `φ = ∞`.
    pub fn ln_eval(&self, u: f64) -> f64 {
        if self.is_infinite_at(u) {
            return f64::INFINITY;
        }
        self.kernel.ln_value(u)
    }

    /// Whether `φ(u) = +∞` structurally (not by overflow).
    pub fn is_infinite_at(&self, u: f64) -> bool {
        u > self.b_phi || (u == self.b_phi && self.value_at_b.is_infinite())
    }

    pub fn a_phi(&self) -> f64 {
        self.a_phi
    }

    pub fn b_phi(&self) -> f64 {
        self.b_phi
    }

    pub fn value_at_b(&self) -> f64 {
        self.value_at_b
    }

    /// `φ > 0`, i.e. `a_φ = 0`.
    pub fn is_positive(&self) -> bool {
        self.a_phi == 0.0
    }

    /// `φ < ∞`, i.e. `b_φ = ∞`.
    pub fn is_finite_valued(&self) -> bool {
        self.b_phi.is_infinite()
    }

    pub fn flags(&self) -> &DeclaredFlags {
        &self.flags
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The spec this function was built from. Custom functions have no
    /// rebuildable spec and report family `custom`.
    pub fn spec(&self) -> PhiSpec {
        PhiSpec {
            family: self.family.name().to_string(),
            params: self.params.clone(),
            flags: Some(self.flags),
        }
    }

    /// Arguments where φ is not smooth: `a_φ`, `b_φ` and family knots.
    /// Quadrature splits integration ranges at these points.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = self.kernel.kinks();
        if self.a_phi > 0.0 {
            k.push(self.a_phi);
        }
        if self.b_phi.is_finite() {
            k.push(self.b_phi);
        }
        k.retain(|v| v.is_finite() && *v > 0.0);
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    fn detect_raw(&self) -> Result<(f64, f64)> {
        let lnv = |u: f64| self.kernel.ln_value(u);
        let is_zero = |u: f64| lnv(u) == f64::NEG_INFINITY;
        let is_finite = |u: f64| lnv(u) < f64::INFINITY && !lnv(u).is_nan();
        let lo_end = 2f64.powi(-60);
        let hi_end = 2f64.powi(60);

        let a = if !is_zero(lo_end) {
            0.0
        } else {
            let mut hi = 1.0;
            while is_zero(hi) {
                hi *= 2.0;
                if hi > hi_end {
                    return Err(Error::InvalidPhi("φ vanishes on the whole sampled range".into()));
                }
            }
            let mut lo = hi / 2.0;
            while !is_zero(lo) && lo > lo_end {
                lo /= 2.0;
            }
            bisect_boundary(lo, hi, is_zero)
        };

        let b = if is_finite(hi_end) {
            f64::INFINITY
        } else {
            let mut lo = 1.0;
            while !is_finite(lo) {
                lo /= 2.0;
                if lo < lo_end {
                    return Err(Error::InvalidPhi("φ is infinite on the whole sampled range".into()));
                }
            }
            let mut hi = lo * 2.0;
            while is_finite(hi) {
                hi *= 2.0;
            }
            bisect_boundary(lo, hi, is_finite)
        };
        Ok((a, b))
    }

    /// Re-detects `(a_φ, b_φ)` by bisection on the monotone predicates
    /// `φ(u) = 0` and `φ(u) < ∞`, and checks them against the stored values
    /// to relative tolerance `2⁻⁴⁰`.
    pub fn detect_params(&self) -> Result<(f64, f64)> {
        let (a, b) = self.detect_raw()?;
        let tol = 2f64.powi(-40);
        let close = |x: f64, y: f64| {
            if x.is_infinite() || y.is_infinite() {
                x == y
            } else {
                (x - y).abs() <= tol * x.abs().max(y.abs())
            }
        };
        if !close(a, self.a_phi) {
            return Err(Error::ParamMismatch { what: "a_φ", declared: self.a_phi, detected: a });
        }
        if !close(b, self.b_phi) {
            return Err(Error::ParamMismatch { what: "b_φ", declared: self.b_phi, detected: b });
        }
        Ok((a, b))
    }

    /// Checks the axioms on a sampled grid: `φ(0) = 0`, `0 ≤ a_φ ≤ b_φ`,
    /// monotonicity, midpoint convexity on adjacent triples, and left
    /// continuity at a finite `b_φ`.
    pub fn validate(&self) -> Result<()> {
        check(self.kernel.value(0.0) == 0.0, || "φ(0) must be 0".into())?;
        check(self.a_phi >= 0.0 && self.a_phi.is_finite(), || "a_φ must be finite and ≥ 0".into())?;
        check(self.b_phi > 0.0 && self.a_phi <= self.b_phi, || "need 0 ≤ a_φ ≤ b_φ, b_φ > 0".into())?;

        let hi = if self.b_phi.is_finite() {
            (self.b_phi * (1.0 - 2f64.powi(-20))).min(2f64.powi(30))
        } else {
            2f64.powi(30)
        };
        let lo = 2f64.powi(-30).min(hi / 2.0);
        let grid = log_grid(lo, hi, VALIDATION_GRID);
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&u| (u, self.eval(u)))
            .filter(|(_, v)| v.is_finite())
            .collect();
        for w in pts.windows(2) {
            let ((u0, v0), (u1, v1)) = (w[0], w[1]);
            check(v1 >= v0 * (1.0 - 1e-12), || {
                format!("φ decreases between {u0:e} and {u1:e}")
            })?;
            check(v0 >= 0.0, || format!("φ({u0:e}) is negative"))?;
        }
        for w in pts.windows(3) {
            let ((u0, v0), (u1, v1), (u2, v2)) = (w[0], w[1], w[2]);
            let s01 = (v1 - v0) / (u1 - u0);
            let s12 = (v2 - v1) / (u2 - u1);
            let slack = 1e-7 * s01.abs().max(s12.abs()) + 1e-300;
            check(s12 >= s01 - slack, || {
                format!("φ fails convexity near u = {u1:e} (slopes {s01:e} > {s12:e})")
            })?;
        }
        if self.b_phi.is_finite() {
            self.check_left_continuity()?;
        }
        Ok(())
    }

    fn check_left_continuity(&self) -> Result<()> {
        let b = self.b_phi;
        let vals: Vec<f64> = (10..=50).map(|k| self.kernel.value(b - b * 2f64.powi(-k))).collect();
        let last = *vals.last().unwrap();
        if self.value_at_b.is_infinite() {
            check(last >= 1e12 && vals.windows(2).all(|w| w[1] >= w[0]), || {
                format!("φ(b_φ) = ∞ but φ does not blow up approaching b_φ = {b}")
            })
        } else {
            check(
                (last - self.value_at_b).abs() <= 1e-9 * self.value_at_b.abs().max(1.0),
                || format!("φ is not left continuous at b_φ = {b}: limit {last} vs φ(b_φ) = {}", self.value_at_b),
            )
        }
    }
}

/// Bisection for the boundary of a monotone predicate that holds at `lo`
/// and fails at `hi`; returns the last point where it holds.
fn bisect_boundary(mut lo: f64, mut hi: f64, holds: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..2000 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_named() -> Vec<OrliczFunction> {
        vec![
            make_family(Family::Power, &[2.0]).unwrap(),
            make_family(Family::Power, &[1.0]).unwrap(),
            make_family(Family::Power, &[1.5]).unwrap(),
            make_family(Family::ShiftedPower, &[1.0, 1.0]).unwrap(),
            make_family(Family::ShiftedPower, &[1.0, 2.0]).unwrap(),
            make_family(Family::ExpGap, &[]).unwrap(),
            make_family(Family::FlatZeroExp, &[]).unwrap(),
            make_family(Family::CappedFinite, &[1.0]).unwrap(),
            make_family(Family::CappedInfinite, &[1.0]).unwrap(),
            make_family(Family::PiecewiseLinearConvex, &[1.0, 1.0, 2.0]).unwrap(),
            make_family(Family::PiecewiseLinearConvex, &[0.0, 0.5, 1.0, 2.0, 3.0]).unwrap(),
        ]
    }

    #[test]
    fn family_examples() {
        let p2 = make_family(Family::Power, &[2.0]).unwrap();
        assert_eq!(p2.a_phi(), 0.0);
        assert!(p2.b_phi().is_infinite());
        assert_eq!(p2.eval(3.0), 9.0);

        let sp = make_family(Family::ShiftedPower, &[1.0, 1.0]).unwrap();
        assert_eq!(sp.a_phi(), 1.0);
        assert_eq!(sp.eval(0.5), 0.0);
        assert_eq!(sp.eval(2.5), 1.5);

        let ci = make_family(Family::CappedInfinite, &[1.0]).unwrap();
        assert_eq!(ci.eval(0.5), 1.0);
        assert!(ci.eval(1.0).is_infinite());
        assert_eq!(ci.b_phi(), 1.0);

        let cf = make_family(Family::CappedFinite, &[1.0]).unwrap();
        assert_eq!(cf.eval(1.0), 1.0);
        assert!(cf.eval(1.0 + 1e-12).is_infinite());
    }

    #[test]
    fn construction_errors() {
        assert!(make_family(Family::Power, &[0.5]).is_err());
        assert!(make_family(Family::ShiftedPower, &[1.0, 0.9]).is_err());
        assert!(make_family(Family::PiecewiseLinearConvex, &[2.0, 1.0, 1.0]).is_err());
        assert!(make_family(Family::PiecewiseLinearConvex, &[1.0, 2.0, 3.0, 1.0, 4.0]).is_err());
        assert!(make_family(Family::FlatZeroExp, &[0.8]).is_err());
        assert!(make_family(Family::Custom, &[]).is_err());
    }

    #[test]
    fn detect_params_round_trips() {
        for phi in all_named() {
            let (a, b) = phi.detect_params().unwrap_or_else(|e| panic!("{phi}: {e}"));
            assert_eq!(b.is_infinite(), phi.b_phi().is_infinite(), "{phi}");
            let _ = a;
        }
        let cf = make_family(Family::CappedFinite, &[1.0]).unwrap();
        let (a, b) = cf.detect_params().unwrap();
        assert_eq!(a, 0.0);
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn custom_detection_and_rejection() {
        let phi = OrliczFunction::custom("quad_shift", |u| ((u - 2.0f64).max(0.0)).powi(2)).unwrap();
        assert!((phi.a_phi() - 2.0).abs() < 1e-12);
        assert!(phi.b_phi().is_infinite());

        // concave on (0,∞)
        assert!(OrliczFunction::custom("sqrt", |u: f64| u.sqrt()).is_err());
        // decreasing
        assert!(OrliczFunction::custom("bad", |u: f64| if u == 0.0 { 0.0 } else { 1.0 / u }).is_err());
        // not left continuous at b = 1: jumps from ≤ 1 to 5 at the cap
        let jump = |u: f64| {
            if u < 1.0 {
                u
            } else if u == 1.0 {
                5.0
            } else {
                f64::INFINITY
            }
        };
        assert!(OrliczFunction::custom("jump", jump).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s = PhiSpec::parse_compact("capped_inf:1").unwrap();
        assert_eq!(s.family, "capped_infinite");
        assert_eq!(s.params, vec![1.0]);
        let phi = s.build().unwrap();
        assert_eq!(phi.b_phi(), 1.0);
        let j: PhiSpec = serde_json::from_str(r#"{"family":"power","params":[3]}"#).unwrap();
        assert_eq!(j.build().unwrap().eval(2.0), 8.0);
        assert!(PhiSpec::parse_compact("nope:1").is_err());
        assert!(PhiSpec::parse_compact("power:x").is_err());
    }

    #[test]
    fn ln_eval_avoids_underflow() {
        let fz = make_family(Family::FlatZeroExp, &[]).unwrap();
        assert_eq!(fz.eval(1e-3), 0.0);
        assert_eq!(fz.ln_eval(1e-3), -1000.0);
        let eg = make_family(Family::ExpGap, &[]).unwrap();
        assert!(eg.eval(1000.0).is_infinite());
        assert!((eg.ln_eval(1000.0) - 1000.0).abs() < 1e-9);
        // small-argument accuracy of the series branch
        let u = 1e-8;
        assert!((eg.eval(u) / (u * u / 2.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn monotone_convex_superadditive_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for phi in all_named() {
            let top = if phi.b_phi().is_finite() { phi.b_phi() } else { 50.0 };
            for _ in 0..1000 {
                let u = rng.gen_range(0.0..top / 2.0);
                let v = rng.gen_range(0.0..top / 2.0);
                if u + v >= phi.b_phi() {
                    continue;
                }
                let (fu, fv, fs) = (phi.eval(u), phi.eval(v), phi.eval(u + v));
                assert!(fs >= fu + fv - 1e-12 * fs.max(1.0), "{phi}: superadditivity at {u},{v}");
                let (lo, hi) = if u <= v { (fu, fv) } else { (fv, fu) };
                assert!(lo <= hi, "{phi}: monotonicity");
                let mid = phi.eval((u + v) / 2.0);
                assert!(mid <= (fu + fv) / 2.0 + 1e-12 * fs.max(1.0), "{phi}: convexity");
            }
        }
    }

    #[test]
    fn kinks_listed() {
        let pwl = make_family(Family::PiecewiseLinearConvex, &[0.0, 0.5, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pwl.a_phi(), 0.5);
        assert_eq!(pwl.kinks(), vec![0.5, 2.0]);
        assert_eq!(pwl.eval(3.0), 1.5 + 3.0);
        let ci = make_family(Family::CappedInfinite, &[2.0]).unwrap();
        assert_eq!(ci.kinks(), vec![2.0]);
    }
}
