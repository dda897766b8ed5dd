//! The continuous Cesàro operator `Cf(t) = (1/t) ∫₀ᵗ |f|`, exact on step
//! functions.
//!
//! On a piece where `x ≡ c` starting at `t₀` with accumulated mass `S`,
//! `Cx(t) = c + (S − c·t₀)/t`. Past the support on `[0,∞)` the mean decays
//! as `S_total/t`, stored as a separate tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{IntervalDomain, StepFunction};

/// `t ↦ a + b/t` on `[left, right)`. Serialized as `[left, right, a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct HyperbolicPiece {
    pub left: f64,
    pub right: f64,
    pub a: f64,
    pub b: f64,
}

impl From<[f64; 4]> for HyperbolicPiece {
    fn from(v: [f64; 4]) -> Self {
        HyperbolicPiece { left: v[0], right: v[1], a: v[2], b: v[3] }
    }
}

impl From<HyperbolicPiece> for [f64; 4] {
    fn from(p: HyperbolicPiece) -> Self {
        [p.left, p.right, p.a, p.b]
    }
}

impl HyperbolicPiece {
    pub fn eval(&self, t: f64) -> f64 {
        if self.b == 0.0 {
            self.a
        } else {
            self.a + self.b / t
        }
    }
}

/// `t ↦ mass/t` on `[start, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicTail {
    pub start: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseHyperbolic {
    domain: IntervalDomain,
    pieces: Vec<HyperbolicPiece>,
    tail: Option<HyperbolicTail>,
}

impl PiecewiseHyperbolic {
    pub fn domain(&self) -> IntervalDomain {
        self.domain
    }

    pub fn pieces(&self) -> &[HyperbolicPiece] {
        &self.pieces
    }

    pub fn tail(&self) -> Option<HyperbolicTail> {
        self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() && self.tail.is_none()
    }

    /// `k · g` for `k ≥ 0`.
    pub fn scale(&self, k: f64) -> PiecewiseHyperbolic {
        if k == 0.0 {
            return PiecewiseHyperbolic { domain: self.domain, pieces: Vec::new(), tail: None };
        }
        PiecewiseHyperbolic {
            domain: self.domain,
            pieces: self
                .pieces
                .iter()
                .map(|p| HyperbolicPiece { a: p.a * k, b: p.b * k, ..*p })
                .collect(),
            tail: self.tail.map(|t| HyperbolicTail { mass: t.mass * k, ..t }),
        }
    }

    /// Supremum of the function (attained at a piece endpoint since each
    /// piece is monotone).
    pub fn sup(&self) -> f64 {
        let pieces = self
            .pieces
            .iter()
            .flat_map(|p| {
                let left = if p.left > 0.0 { p.eval(p.left) } else { p.a };
                [left, p.eval(p.right)]
            })
            .fold(0.0, f64::max);
        let tail = self.tail.map_or(0.0, |t| t.mass / t.start);
        pieces.max(tail)
    }

    /// Pointwise value; 0 where nothing covers `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("Cesàro mean evaluated at t = {t}")));
        }
        if t > self.domain.end() {
            return Err(Error::Domain(format!("t = {t} outside {}", self.domain)));
        }
        let i = self.pieces.partition_point(|p| p.right < t);
        if let Some(p) = self.pieces.get(i) {
            if p.left <= t {
                return Ok(p.eval(t).max(0.0));
            }
        }
        match self.tail {
            Some(tail) if t >= tail.start => Ok(tail.mass / t),
            _ => Ok(0.0),
        }
    }

    /// Checks continuity across knots (absolute tolerance `1e-12` scaled
    /// by the local value) and nonnegativity at piece endpoints.
    pub fn check_invariants(&self) -> Result<()> {
        let tol = |v: f64| 1e-12 * v.abs().max(1.0);
        for p in &self.pieces {
            let ends = [if p.left > 0.0 { p.eval(p.left) } else { p.a }, p.eval(p.right)];
            if ends.iter().any(|&v| v < -tol(v)) {
                return Err(Error::Invariant(format!("negative hyperbolic piece {p:?}")));
            }
        }
        for w in self.pieces.windows(2) {
            if w[0].right == w[1].left {
                let (l, r) = (w[0].eval(w[0].right), w[1].eval(w[1].left));
                if (l - r).abs() > tol(l) {
                    return Err(Error::Invariant(format!("discontinuity at t = {}", w[0].right)));
                }
            }
        }
        if let (Some(last), Some(tail)) = (self.pieces.last(), self.tail) {
            let (l, r) = (last.eval(last.right), tail.mass / tail.start);
            if last.right == tail.start && (l - r).abs() > tol(l) {
                return Err(Error::Invariant(format!("discontinuity at tail start {}", tail.start)));
            }
        }
        Ok(())
    }
}

/// `C|x|` as a piecewise hyperbolic function.
pub fn cesaro_mean(x: &StepFunction) -> PiecewiseHyperbolic {
    let mut pieces = Vec::with_capacity(2 * x.pieces().len() + 1);
    let mut mass = 0.0;
    let mut at = 0.0;
    for p in x.pieces() {
        if p.left > at && mass > 0.0 {
            pieces.push(HyperbolicPiece { left: at, right: p.left, a: 0.0, b: mass });
        }
        let b = if p.left == 0.0 { 0.0 } else { mass - p.value * p.left };
        pieces.push(HyperbolicPiece { left: p.left, right: p.right, a: p.value, b });
        mass += p.value * p.len();
        at = p.right;
    }
    let mut tail = None;
    if mass > 0.0 {
        match x.domain() {
            IntervalDomain::HalfLine => tail = Some(HyperbolicTail { start: at, mass }),
            IntervalDomain::UnitInterval if at < 1.0 => {
                pieces.push(HyperbolicPiece { left: at, right: 1.0, a: 0.0, b: mass })
            }
            IntervalDomain::UnitInterval => {}
        }
    }
    PiecewiseHyperbolic { domain: x.domain(), pieces, tail }
}

/// `C|x|(t)`.
pub fn eval_c(g: &PiecewiseHyperbolic, t: f64) -> Result<f64> {
    g.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{rearrangement, Piece};
    use crate::quad::integrate;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use IntervalDomain::*;

    #[test]
    fn indicator_mean() {
        let x = StepFunction::indicator(HalfLine, 0.0, 1.0, 1.0).unwrap();
        let g = cesaro_mean(&x);
        assert_eq!(g.pieces(), &[HyperbolicPiece { left: 0.0, right: 1.0, a: 1.0, b: 0.0 }]);
        assert_eq!(g.tail(), Some(HyperbolicTail { start: 1.0, mass: 1.0 }));
        assert_eq!(eval_c(&g, 2.0).unwrap(), 0.5);
        assert_eq!(eval_c(&g, 0.5).unwrap(), 1.0);
        let g2 = cesaro_mean(&x.scale(2.0));
        assert_eq!(eval_c(&g2, 4.0).unwrap(), 0.5);
        assert!(eval_c(&g, 0.0).is_err());
        assert!(eval_c(&g, -1.0).is_err());
    }

    #[test]
    fn capped_level_mean() {
        let b = 1.75;
        let x = StepFunction::indicator(HalfLine, 0.0, 1.0, b).unwrap();
        let g = cesaro_mean(&x);
        for t in [0.1, 0.5, 0.999, 1.0, 2.0, 17.0] {
            let expect = if t <= 1.0 { b } else { b / t };
            assert_relative_eq!(g.eval(t).unwrap(), expect, max_relative = 1e-15);
        }
    }

    #[test]
    fn constant_fixed_point_on_unit_interval() {
        let x = StepFunction::indicator(UnitInterval, 0.0, 1.0, 3.0).unwrap();
        let g = cesaro_mean(&x);
        for t in [1e-9, 0.3, 1.0] {
            assert_eq!(g.eval(t).unwrap(), 3.0);
        }
        assert!(g.eval(1.5).is_err());
    }

    #[test]
    fn gaps_and_unit_tail() {
        let x = StepFunction::from_triples(UnitInterval, &[(0.25, 0.5, 4.0)]).unwrap();
        let g = cesaro_mean(&x);
        assert_eq!(g.eval(0.1).unwrap(), 0.0);
        assert_relative_eq!(g.eval(0.5).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(g.eval(1.0).unwrap(), 1.0, max_relative = 1e-15);
        g.check_invariants().unwrap();
        assert_relative_eq!(g.sup(), 2.0);
    }

    fn step() -> impl Strategy<Value = StepFunction> {
        prop::collection::vec((0.0f64..2.0, 0.01f64..2.0, 0.01f64..10.0), 1..10).prop_map(|raw| {
            let mut at = 0.0;
            let mut pieces = Vec::new();
            for (gap, len, v) in raw {
                let l = at + gap;
                pieces.push(Piece::new(l, l + len, v));
                at = l + len;
            }
            StepFunction::new(HalfLine, pieces).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_quadrature(x in step(), seeds in prop::collection::vec(0.001f64..1.0, 16)) {
            let g = cesaro_mean(&x);
            g.check_invariants().unwrap();
            let end = x.support_end() * 1.5;
            for s in seeds {
                let t = s * end;
                let mut knots: Vec<f64> = x.pieces().iter().flat_map(|p| [p.left, p.right]).filter(|&k| k < t).collect();
                knots.insert(0, 0.0);
                knots.push(t);
                let mut total = 0.0;
                for w in knots.windows(2) {
                    if w[1] > w[0] {
                        total += integrate(|u| x.value_at(u), w[0], w[1], 1e-13, 1e-300, 64).unwrap().value;
                    }
                }
                let direct = total / t;
                let exact = g.eval(t).unwrap();
                prop_assert!((exact - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-300,
                    "t={t} exact={exact} quad={direct}");
            }
        }

        #[test]
        fn linear_and_monotone(x in step(), y in step(), al in 0.0f64..3.0, be in 0.0f64..3.0,
                               ts in prop::collection::vec(0.01f64..30.0, 20)) {
            let combo = x.scale(al).add(&y.scale(be)).unwrap();
            let (gx, gy, gc) = (cesaro_mean(&x), cesaro_mean(&y), cesaro_mean(&combo));
            let sum = x.add(&y).unwrap();
            let gs = cesaro_mean(&sum);
            for &t in &ts {
                let lhs = gc.eval(t).unwrap();
                let rhs = al * gx.eval(t).unwrap() + be * gy.eval(t).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
                prop_assert!(gs.eval(t).unwrap() + 1e-12 * gs.eval(t).unwrap().max(1.0) >= gx.eval(t).unwrap());
            }
        }

        #[test]
        fn dominates_nonincreasing(x in step(), ts in prop::collection::vec(0.001f64..20.0, 20), n in 1u32..64) {
            let r = rearrangement(&x);
            let g = cesaro_mean(&r);
            for &t in &ts {
                prop_assert!(g.eval(t).unwrap() >= r.value_at(t) * (1.0 - 1e-14));
            }
            let e = StepFunction::indicator(HalfLine, 0.0, 1.0 / n as f64, 1.0).unwrap();
            let ge = cesaro_mean(&e);
            for &t in &ts {
                prop_assert!(ge.eval(t).unwrap() >= e.value_at(t));
            }
        }
    }
}
