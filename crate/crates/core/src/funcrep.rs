//! Nonnegative step functions on `[0,1]` or `[0,∞)` with distribution
//! function, decreasing rearrangement and dilation.
//!
//! Signs are dropped at construction: every quantity computed downstream
//! depends on `|f|` only. Pieces are half-open `[left, right)` intervals, so
//! measures of unions are plain sums of lengths.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalDomain {
    /// `[0, 1]`
    #[serde(rename = "unit", alias = "unit_interval", alias = "UnitInterval")]
    UnitInterval,
    /// `[0, ∞)`
    #[serde(rename = "halfline", alias = "half_line", alias = "HalfLine")]
    HalfLine,
}

impl IntervalDomain {
    /// Right end of the domain.
    pub fn end(self) -> f64 {
        match self {
            IntervalDomain::UnitInterval => 1.0,
            IntervalDomain::HalfLine => f64::INFINITY,
        }
    }
}

impl fmt::Display for IntervalDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalDomain::UnitInterval => "[0,1]",
            IntervalDomain::HalfLine => "[0,∞)",
        })
    }
}

impl FromStr for IntervalDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unit" | "unit_interval" | "[0,1]" => Ok(IntervalDomain::UnitInterval),
            "halfline" | "half_line" | "[0,inf)" => Ok(IntervalDomain::HalfLine),
            other => Err(Error::Domain(format!("unknown domain `{other}`"))),
        }
    }
}

/// `value · χ_[left, right)`. Serialized as `[left, right, value]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Piece {
    pub left: f64,
    pub right: f64,
    pub value: f64,
}

impl From<[f64; 3]> for Piece {
    fn from(a: [f64; 3]) -> Self {
        Piece { left: a[0], right: a[1], value: a[2] }
    }
}

impl From<Piece> for [f64; 3] {
    fn from(p: Piece) -> Self {
        [p.left, p.right, p.value]
    }
}

impl Piece {
    pub fn new(left: f64, right: f64, value: f64) -> Piece {
        Piece { left, right, value }
    }

    pub fn len(&self) -> f64 {
        self.right - self.left
    }
}

/// A finite simple function with bounded support. Pieces are sorted,
/// disjoint, strictly positive, and adjacent pieces with equal values are
/// merged, so two equal functions have identical representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    domain: IntervalDomain,
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    domain: IntervalDomain,
    pieces: Vec<Piece>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;
    fn try_from(r: RawStep) -> Result<Self> {
        StepFunction::new(r.domain, r.pieces)
    }
}

impl From<StepFunction> for RawStep {
    fn from(s: StepFunction) -> Self {
        RawStep { domain: s.domain, pieces: s.pieces }
    }
}

impl StepFunction {
    pub fn new(domain: IntervalDomain, pieces: Vec<Piece>) -> Result<StepFunction> {
        let mut ps = Vec::with_capacity(pieces.len());
        for p in pieces {
            if !(p.left.is_finite() && p.right.is_finite() && p.value.is_finite()) {
                return Err(Error::InvalidStep(format!("non-finite piece {p:?}")));
            }
            if p.left < 0.0 || p.left >= p.right {
                return Err(Error::InvalidStep(format!(
                    "piece [{}, {}) is empty or starts below 0",
                    p.left, p.right
                )));
            }
            if p.right > domain.end() {
                return Err(Error::InvalidStep(format!(
                    "piece [{}, {}) leaves the domain {domain}",
                    p.left, p.right
                )));
            }
            if p.value != 0.0 {
                ps.push(Piece { value: p.value.abs(), ..p });
            }
        }
        ps.sort_by(|a, b| a.left.total_cmp(&b.left));
        for w in ps.windows(2) {
            if w[1].left < w[0].right {
                return Err(Error::InvalidStep(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].left, w[0].right, w[1].left, w[1].right
                )));
            }
        }
        let mut merged: Vec<Piece> = Vec::with_capacity(ps.len());
        for p in ps {
            match merged.last_mut() {
                Some(last) if last.right == p.left && last.value == p.value => last.right = p.right,
                _ => merged.push(p),
            }
        }
        Ok(StepFunction { domain, pieces: merged })
    }

    pub fn zero(domain: IntervalDomain) -> StepFunction {
        StepFunction { domain, pieces: Vec::new() }
    }

    /// `value · χ_[left, right)`.
    pub fn indicator(domain: IntervalDomain, left: f64, right: f64, value: f64) -> Result<StepFunction> {
        StepFunction::new(domain, vec![Piece::new(left, right, value)])
    }

    /// Builds from `(left, right, value)` triples.
    pub fn from_triples(domain: IntervalDomain, triples: &[(f64, f64, f64)]) -> Result<StepFunction> {
        StepFunction::new(domain, triples.iter().map(|&(l, r, v)| Piece::new(l, r, v)).collect())
    }

    pub fn domain(&self) -> IntervalDomain {
        self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.right <= t);
        match self.pieces.get(i) {
            Some(p) if p.left <= t => p.value,
            _ => 0.0,
        }
    }

    /// `m(supp f)`.
    pub fn support_measure(&self) -> f64 {
        self.pieces.iter().map(Piece::len).sum()
    }

    /// Right end of the support (0 for the zero function).
    pub fn support_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.right)
    }

    pub fn max_value(&self) -> f64 {
        self.pieces.iter().map(|p| p.value).fold(0.0, f64::max)
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| p.value * p.len()).sum()
    }

    /// `k · f` for `k ≥ 0`.
    pub fn scale(&self, k: f64) -> StepFunction {
        if k == 0.0 {
            return StepFunction::zero(self.domain);
        }
        let k = k.abs();
        StepFunction {
            domain: self.domain,
            pieces: self.pieces.iter().map(|p| Piece { value: p.value * k, ..*p }).collect(),
        }
    }

    /// All piece endpoints of `self` and `other`, sorted and deduplicated.
    fn breakpoints(&self, other: &StepFunction) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .flat_map(|p| [p.left, p.right])
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        if self.domain != other.domain {
            return Err(Error::Domain("step functions live on different domains".into()));
        }
        let b = self.breakpoints(other);
        let pieces = b
            .windows(2)
            .map(|w| {
                let v = op(self.value_at(w[0]), other.value_at(w[0]));
                Piece::new(w[0], w[1], v)
            })
            .collect();
        StepFunction::new(self.domain, pieces)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.combine(other, |a, b| a + b)
    }

    /// Pointwise `(self − other)₊`.
    pub fn sub_clamped(&self, other: &StepFunction) -> Result<StepFunction> {
        self.combine(other, |a, b| (a - b).max(0.0))
    }

    /// `f · χ_A` where `A` is a union of half-open intervals.
    pub fn restrict(&self, set: &[(f64, f64)]) -> StepFunction {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for &(l, r) in set {
                let (lo, hi) = (p.left.max(l), p.right.min(r));
                if lo < hi {
                    pieces.push(Piece::new(lo, hi, p.value));
                }
            }
        }
        StepFunction::new(self.domain, pieces).expect("restriction of a valid step function")
    }

    /// `self ≤ other` almost everywhere.
    pub fn le(&self, other: &StepFunction) -> bool {
        let b = self.breakpoints(other);
        b.windows(2).all(|w| self.value_at(w[0]) <= other.value_at(w[0]))
    }

    /// Whether `f` is nonincreasing on the whole domain (support starts at
    /// 0, no interior gaps, values nonincreasing).
    pub fn is_nonincreasing(&self) -> bool {
        if self.pieces.is_empty() {
            return true;
        }
        self.pieces[0].left == 0.0
            && self
                .pieces
                .windows(2)
                .all(|w| w[0].right == w[1].left && w[0].value >= w[1].value)
    }

    /// CSV with header `left,right,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("left,right,value\n");
        for p in &self.pieces {
            s.push_str(&format!("{},{},{}\n", p.left, p.right, p.value));
        }
        s
    }
}

/// `d_f(λ) = m{t : |f(t)| > λ}`.
pub fn distribution(f: &StepFunction, lambda: f64) -> f64 {
    f.pieces.iter().filter(|p| p.value > lambda).map(Piece::len).sum()
}

/// Decreasing rearrangement `f*`: pieces sorted by value (descending) and
/// stacked from the origin.
pub fn rearrangement(f: &StepFunction) -> StepFunction {
    let mut ps = f.pieces.clone();
    ps.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.left.total_cmp(&b.left)));
    let mut out = Vec::with_capacity(ps.len());
    let mut at = 0.0;
    for p in ps {
        let next = at + p.len();
        out.push(Piece::new(at, next, p.value));
        at = next;
    }
    StepFunction::new(f.domain, out).expect("rearrangement stays inside the domain")
}

/// Dilation `D_s f(t) = f(t/s) χ_I(t/s)`, clipped to the domain.
pub fn dilate(f: &StepFunction, s: f64) -> Result<StepFunction> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("dilation factor must be positive, got {s}")));
    }
    let end = f.domain.end();
    let pieces = f
        .pieces
        .iter()
        .filter_map(|p| {
            let (l, r) = (p.left * s, (p.right * s).min(end));
            (l < r).then(|| Piece::new(l, r, p.value))
        })
        .collect();
    StepFunction::new(f.domain, pieces)
}
