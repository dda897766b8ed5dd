//! Fixtures shared by the `engine` benchmarks.

use cesorl_core::orlicz::Family;
use cesorl_core::{make_family, IntervalDomain, OrliczFunction, StepFunction};

pub fn power(p: f64) -> OrliczFunction {
    make_family(Family::Power, &[p]).expect("valid power")
}

pub fn exp_gap() -> OrliczFunction {
    make_family(Family::ExpGap, &[]).expect("valid exp_gap")
}

pub fn capped_infinite() -> OrliczFunction {
    make_family(Family::CappedInfinite, &[1.0]).expect("valid capped")
}

/// A decreasing staircase with `levels` dyadic steps on `[0, 2^levels)`.
pub fn staircase(levels: u32) -> StepFunction {
    let triples: Vec<(f64, f64, f64)> = (0..levels)
        .map(|k| {
            let l = if k == 0 { 0.0 } else { 2f64.powi(k as i32 - 1) };
            (l, 2f64.powi(k as i32), 2f64.powf(-0.45 * k as f64))
        })
        .collect();
    StepFunction::from_triples(IntervalDomain::HalfLine, &triples).expect("valid staircase")
}
