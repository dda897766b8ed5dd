//! Batch property suites over named φ and seeded random step corpora.
//!
//! Every suite is a deterministic function of `(φ, domain, seed,
//! tolerances)`: corpora are generated sequentially from a ChaCha stream and
//! only then evaluated in parallel, and all reductions are min/max.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::funcrep::{IntervalDomain, Piece, StepFunction};
use crate::indices::{delta2_test, escalation_sequence, hardy_probe, Delta2Verdict, Regime, MIN_WITNESS_PHI};
use crate::modular::{membership, modular, norm, MembershipKind, NormStatus, Space, Verdict};
use crate::orlicz::{make_family, Family, OrliczFunction};
use crate::witnesses::{oc_failure_witness, sm_failure_witness, verify_report, OcCase, WitnessKind, DEFAULT_TRUNCATION};

/// Largest number of pieces in a random corpus element.
pub const MAX_PIECES: usize = 16;

/// Shared knobs of the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub seed: u64,
    pub corpus_size: usize,
    pub truncation: usize,
    pub tol: Tolerances,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: crate::config::DEFAULT_SEED,
            corpus_size: 64,
            truncation: DEFAULT_TRUNCATION,
            tol: Tolerances::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Corpora

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn endpoint_range(domain: IntervalDomain) -> (f64, f64) {
    match domain {
        IntervalDomain::HalfLine => (2f64.powi(-10), 2f64.powi(10)),
        IntervalDomain::UnitInterval => (2f64.powi(-20), 1.0),
    }
}

/// A random nonnegative step function with at most [`MAX_PIECES`] pieces,
/// endpoints and values log-uniform.
pub fn random_step(rng: &mut ChaCha8Rng, domain: IntervalDomain) -> StepFunction {
    let (lo, hi) = endpoint_range(domain);
    loop {
        let k = rng.gen_range(1..=MAX_PIECES);
        let mut ends: Vec<f64> = (0..=k).map(|_| log_uniform(rng, lo, hi)).collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        let mut pieces = Vec::with_capacity(k);
        for w in ends.windows(2) {
            if pieces.is_empty() || rng.gen_bool(0.75) {
                pieces.push(Piece::new(w[0], w[1], log_uniform(rng, 2f64.powi(-4), 2f64.powi(4))));
            }
        }
        if let Ok(f) = StepFunction::new(domain, pieces) {
            if !f.is_zero() {
                return f;
            }
        }
    }
}

pub fn random_corpus(domain: IntervalDomain, size: usize, seed: u64) -> Vec<StepFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| random_step(&mut rng, domain)).collect()
}

/// Dyadic staircase approximating `t^{-s}`: value `2^{-s(j+1/2)}` on
/// `[2^j, 2^{j+1})`, capped on `[0, 2^{j_min})`. Nonincreasing, so it is a
/// positive combination of `χ_[0,ε)`.
pub fn staircase(domain: IntervalDomain, s: f64, levels: i32) -> StepFunction {
    let (first, last) = match domain {
        IntervalDomain::HalfLine => (-levels, levels),
        IntervalDomain::UnitInterval => (-2 * levels, 0),
    };
    let mut pieces = vec![Piece::new(0.0, 2f64.powi(first), 2f64.powf(-s * first as f64))];
    for j in first..last {
        pieces.push(Piece::new(2f64.powi(j), 2f64.powi(j + 1), 2f64.powf(-s * (j as f64 + 0.5))));
    }
    StepFunction::new(domain, pieces).expect("staircase is a valid step function")
}

/// Random corpus interleaved with `χ_[0,ε)` and staircase shapes, the
/// extremal profiles for the Hardy inequality.
pub fn hardy_corpus(domain: IntervalDomain, size: usize, seed: u64) -> Vec<StepFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = endpoint_range(domain);
    (0..size)
        .map(|i| match i % 8 {
            0 => StepFunction::indicator(domain, 0.0, log_uniform(&mut rng, lo, hi), 1.0).expect("valid indicator"),
            4 => {
                let s = rng.gen_range(0.40..0.49);
                staircase(domain, s, 16)
            }
            _ => random_step(&mut rng, domain),
        })
        .collect()
}

/// `y ≤ x` obtained by scaling a random nonempty subset of pieces by factors
/// in `[0, 0.9]`.
fn shrink(rng: &mut ChaCha8Rng, x: &StepFunction) -> StepFunction {
    let n = x.pieces().len();
    let forced = rng.gen_range(0..n);
    let pieces: Vec<Piece> = x
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let factor = if i == forced || rng.gen_bool(0.5) { rng.gen_range(0.0..0.9) } else { 1.0 };
            Piece::new(p.left, p.right, p.value * factor)
        })
        .collect();
    StepFunction::new(x.domain(), pieces).expect("shrunk pieces stay valid")
}

/// `(x, y)` pairs with `0 ≤ y ≤ x`, `y ≠ x`.
pub fn random_pairs(domain: IntervalDomain, size: usize, seed: u64) -> Vec<(StepFunction, StepFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| {
            let x = random_step(&mut rng, domain);
            let y = shrink(&mut rng, &x);
            (x, y)
        })
        .collect()
}

fn converged(phi: &OrliczFunction, f: &StepFunction, space: Space, tol: &Tolerances) -> Option<f64> {
    let r = norm(phi, f, space, tol).ok()?;
    match r.status {
        NormStatus::Converged => Some(r.value),
        NormStatus::Zero => Some(0.0),
        NormStatus::Infinite => None,
    }
}

fn csv_lines<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Order continuity versus Δ₂

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delta2Outcome {
    Holds,
    Fails,
    Undetermined,
}

/// Whether `C` is bounded on `L^φ`, the standing hypothesis of the
/// order-continuity equivalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub alpha_hat: f64,
    pub hardy_c_hat: f64,
    pub hardy_consistent: bool,
    pub established: bool,
    pub overridden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcTableRow {
    pub phi: String,
    pub domain: IntervalDomain,
    pub delta2: Delta2Outcome,
    pub witness: String,
    pub case: Option<OcCase>,
    /// `Δ₂ holds ⟺ no witness`; `None` when either side is undetermined.
    pub consistent: Option<bool>,
    pub witness_verified: bool,
    pub hypothesis: Hypothesis,
}

pub fn oc_equivalence_suite(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    allow_override: bool,
    params: &SuiteParams,
) -> Result<OcTableRow> {
    let tol = &params.tol;
    let corpus = hardy_corpus(domain, params.corpus_size.max(2), params.seed);
    let hardy = hardy_probe(phi, domain, &corpus, tol)?;
    let established = hardy.consistent && hardy.alpha_hat > 1.05;
    if !established && !allow_override {
        return Err(Error::Precondition(format!(
            "C is not shown bounded on L^φ for {} (α̂ = {:.4}); pass an override to run anyway",
            phi.label(),
            hardy.alpha_hat
        )));
    }
    let hypothesis = Hypothesis {
        alpha_hat: hardy.alpha_hat,
        hardy_c_hat: hardy.c_hat,
        hardy_consistent: hardy.consistent,
        established,
        overridden: !established,
    };
    let delta2 = match delta2_test(phi, Regime::for_domain(domain))?.verdict {
        Delta2Verdict::Holds { .. } => Delta2Outcome::Holds,
        Delta2Verdict::FailsWithWitness { .. } => Delta2Outcome::Fails,
        Delta2Verdict::Undetermined { .. } => Delta2Outcome::Undetermined,
    };
    let report = oc_failure_witness(phi, domain, params.truncation, tol)?;
    let (witness, case, found) = match &report.kind {
        WitnessKind::OcFailure { case } => (format!("OCFailure {}", case_tag(*case)), Some(*case), Some(true)),
        WitnessKind::NoWitnessFound => ("NoWitnessFound".to_string(), None, Some(false)),
        other => (format!("{other:?}"), None, None),
    };
    let witness_verified = verify_report(&report, tol)?.ok;
    let consistent = match (delta2, found) {
        (Delta2Outcome::Undetermined, _) | (_, None) => None,
        (d, Some(f)) => Some((d == Delta2Outcome::Holds) == !f),
    };
    Ok(OcTableRow { phi: phi.label().to_string(), domain, delta2, witness, case, consistent, witness_verified, hypothesis })
}

fn case_tag(case: OcCase) -> &'static str {
    match case {
        OcCase::I1 => "I(1)",
        OcCase::I2 => "I(2)",
        OcCase::I3 => "I(3)",
        OcCase::I4 => "I(4)",
        OcCase::II1 => "II(1)",
        OcCase::II2 => "II(2)",
        OcCase::II3 => "II(3)",
    }
}

/// The seven named-family rows: `(family, params, domain, override)`.
pub fn oc_table_rows() -> Vec<(Family, Vec<f64>, IntervalDomain, bool)> {
    use IntervalDomain::*;
    vec![
        (Family::Power, vec![2.0], HalfLine, false),
        (Family::ShiftedPower, vec![1.0, 2.0], HalfLine, false),
        (Family::ExpGap, vec![], UnitInterval, false),
        (Family::FlatZeroExp, vec![0.25], HalfLine, true),
        (Family::CappedFinite, vec![1.0], UnitInterval, true),
        (Family::CappedInfinite, vec![1.0], HalfLine, true),
        (Family::PiecewiseLinearConvex, vec![1.0, 1.0, 2.0], HalfLine, true),
    ]
}

pub fn oc_table_named(params: &SuiteParams) -> Result<Vec<OcTableRow>> {
    oc_table_rows()
        .into_iter()
        .map(|(f, p, d, o)| oc_equivalence_suite(&make_family(f, &p)?, d, o, params))
        .collect()
}

pub fn oc_table_csv(rows: &[OcTableRow]) -> String {
    csv_lines("phi,domain,delta2,witness,consistent,verified,alpha_hat,hypothesis", rows, |r| {
        format!(
            "\"{}\",{},{:?},{},{},{},{},{}",
            r.phi,
            r.domain,
            r.delta2,
            r.witness,
            r.consistent.map_or("undetermined".to_string(), |c| c.to_string()),
            r.witness_verified,
            r.hypothesis.alpha_hat,
            if r.hypothesis.established { "established" } else { "overridden" }
        )
    })
}

// ---------------------------------------------------------------------------
// Strict and uniform monotonicity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmWitness {
    pub label: String,
    pub y_norm: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub phi: String,
    pub domain: IntervalDomain,
    pub pairs: usize,
    pub skipped: usize,
    /// `min (‖x‖ − ‖y‖)` over corpus pairs `y ≤ x`, `y ≠ x`, `‖x‖ = 1`.
    pub sm_min_gap: f64,
    /// `‖v‖ − ‖u‖` for the strict-monotonicity witness pair, when `a_φ > 0`.
    pub sm_witness_gap: Option<f64>,
    pub eps_grid: Vec<f64>,
    /// `δ̂(ε) = min (1 − ‖x − y‖)` over pairs with `‖y‖ ≥ ε` (`NaN` if none).
    pub delta_hat: Vec<f64>,
    /// The same minimum with `x` fixed, for the first corpus elements.
    pub per_x_delta: Vec<f64>,
    pub um_witnesses: Vec<UmWitness>,
    pub notes: Vec<String>,
}

impl MonotonicityReport {
    /// `(ε, δ̂(ε))` curve, with witness pairs folded in.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.eps_grid
            .iter()
            .zip(&self.delta_hat)
            .map(|(&e, &d)| {
                let w = self
                    .um_witnesses
                    .iter()
                    .filter(|w| w.y_norm >= e)
                    .map(|w| w.delta)
                    .fold(d, |a, b| if a.is_nan() { b } else { a.min(b) });
                (e, w)
            })
            .collect()
    }

    pub fn curve_csv(&self) -> String {
        csv_lines("epsilon,delta_hat", &self.curve(), |(e, d)| format!("{e},{d}"))
    }
}

struct PairOutcome {
    gap: f64,
    y_norm: f64,
    diff_norm: f64,
}

fn pair_outcome(phi: &OrliczFunction, x: &StepFunction, y: &StepFunction, tol: &Tolerances) -> Option<PairOutcome> {
    let nx = converged(phi, x, Space::Cesaro, tol)?;
    if nx == 0.0 {
        return None;
    }
    let (x, y) = (x.scale(1.0 / nx), y.scale(1.0 / nx));
    let x_norm = converged(phi, &x, Space::Cesaro, tol)?;
    let y_norm = converged(phi, &y, Space::Cesaro, tol)?;
    let diff_norm = converged(phi, &x.sub_clamped(&y).ok()?, Space::Cesaro, tol)?;
    Some(PairOutcome { gap: x_norm - y_norm, y_norm, diff_norm: diff_norm / x_norm })
}

pub fn monotonicity_suite(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    corpus_size: usize,
    eps_grid: &[f64],
    params: &SuiteParams,
) -> Result<MonotonicityReport> {
    let tol = &params.tol;
    let pairs = random_pairs(domain, corpus_size, params.seed);
    let outcomes: Vec<Option<PairOutcome>> = pairs.par_iter().map(|(x, y)| pair_outcome(phi, x, y, tol)).collect();
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let ok: Vec<&PairOutcome> = outcomes.iter().flatten().collect();
    let sm_min_gap = ok.iter().map(|o| o.gap).fold(f64::INFINITY, f64::min);
    let delta_for = |e: f64, set: &[&PairOutcome]| {
        set.iter().filter(|o| o.y_norm >= e).map(|o| 1.0 - o.diff_norm).fold(f64::NAN, f64::min)
    };
    let delta_hat: Vec<f64> = eps_grid.iter().map(|&e| delta_for(e, &ok)).collect();

    let e0 = eps_grid.first().copied().unwrap_or(0.5);
    let per_x_delta: Vec<f64> = pairs
        .iter()
        .take(8)
        .map(|(x, _)| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ x.pieces().len() as u64);
            let ys: Vec<StepFunction> = (0..8).map(|_| shrink(&mut rng, x)).collect();
            let outs: Vec<PairOutcome> = ys.iter().filter_map(|y| pair_outcome(phi, x, y, tol)).collect();
            delta_for(e0, &outs.iter().collect::<Vec<_>>())
        })
        .collect();

    let mut report = MonotonicityReport {
        phi: phi.label().to_string(),
        domain,
        pairs: pairs.len(),
        skipped,
        sm_min_gap,
        sm_witness_gap: None,
        eps_grid: eps_grid.to_vec(),
        delta_hat,
        per_x_delta,
        um_witnesses: Vec::new(),
        notes: Vec::new(),
    };
    if phi.a_phi() > 0.0 {
        match sm_failure_witness(phi, domain, None, tol) {
            Ok(w) => {
                let (first, second) = match domain {
                    IntervalDomain::HalfLine => ("u", "v"),
                    IntervalDomain::UnitInterval => ("x1", "x2"),
                };
                let n = |name: &str| -> Result<f64> {
                    let f = w.element_named(name).ok_or_else(|| Error::Invariant(format!("missing {name}")))?;
                    Ok(norm(phi, f, Space::Cesaro, tol)?.value)
                };
                report.sm_witness_gap = Some(n(second)? - n(first)?);
                if domain == IntervalDomain::HalfLine {
                    um_half_line_witnesses(phi, &w, eps_grid, tol, &mut report)?;
                } else {
                    let bump = w.element_named("x2").unwrap().sub_clamped(w.element_named("x1").unwrap())?;
                    let yn = norm(phi, &bump, Space::Cesaro, tol)?.value;
                    report.um_witnesses.push(UmWitness {
                        label: "x2 - x1 bump".into(),
                        y_norm: yn,
                        delta: 1.0 - n("x1")? / n("x2")?,
                    });
                }
            }
            Err(e) => report.notes.push(format!("no strict-monotonicity witness: {e}")),
        }
    } else if let Some(w) = delta2_block_witness(phi, domain, tol)? {
        report.um_witnesses.push(w);
    }
    Ok(report)
}

/// For `a_φ > 0` on `[0,∞)`: with `c = 7a_φ/8` and `x₁ = 8λ/a_φ`,
/// `v_L = u + cχ_[x₁, x₁+L)` keeps `C v_L ≤ a_φ` beyond `x₁`, so
/// `‖v_L‖ = ‖u‖ = 1` while `‖v_L − u‖ → c/a_φ` as `L` grows; `x = v_L`,
/// `y = v_L − u` gives `‖x − y‖ = ‖u‖`.
fn um_half_line_witnesses(
    phi: &OrliczFunction,
    w: &crate::witnesses::WitnessReport,
    eps_grid: &[f64],
    tol: &Tolerances,
    report: &mut MonotonicityReport,
) -> Result<()> {
    let a = phi.a_phi();
    let u = w.element_named("u").ok_or_else(|| Error::Invariant("missing u".into()))?;
    let lambda = w.scalar("lambda").ok_or_else(|| Error::Invariant("missing lambda".into()))?;
    let (c, x1) = (0.875 * a, (8.0 * lambda / a).max(2.0));
    let nu = norm(phi, u, Space::Cesaro, tol)?.value;
    for &e in eps_grid {
        let mut len = 1.0f64;
        loop {
            let z = StepFunction::indicator(IntervalDomain::HalfLine, x1, x1 + len, c)?;
            let zn = norm(phi, &z, Space::Cesaro, tol)?.value;
            if zn >= e || len >= 2f64.powi(40) {
                let v = u.add(&z)?;
                let nv = norm(phi, &v, Space::Cesaro, tol)?.value;
                report.um_witnesses.push(UmWitness {
                    label: format!("flat-region extension, L = {len}"),
                    y_norm: zn / nv,
                    delta: 1.0 - nu / nv,
                });
                break;
            }
            len *= 2.0;
        }
    }
    Ok(())
}

/// Two adjacent blocks at a Δ₂-escalation level: `x = uχ_[0,2m)`,
/// `y = uχ_[m,2m)`, `m = 1/(2φ(u))`.
fn delta2_block_witness(phi: &OrliczFunction, domain: IntervalDomain, tol: &Tolerances) -> Result<Option<UmWitness>> {
    let regime = Regime::for_domain(domain);
    if !delta2_test(phi, regime)?.fails() {
        return Ok(None);
    }
    let sub = if domain == IntervalDomain::HalfLine && delta2_test(phi, Regime::Zero)?.fails() {
        Regime::Zero
    } else {
        Regime::Infinity
    };
    let min_phi = if domain == IntervalDomain::UnitInterval { 1.0 } else { MIN_WITNESS_PHI };
    let Some(p) = escalation_sequence(phi, sub, min_phi, 64).last().copied() else {
        return Ok(None);
    };
    let m = 1.0 / (2.0 * phi.eval(p.u));
    if !(2.0 * m <= domain.end()) || !m.is_finite() {
        return Ok(None);
    }
    let x = StepFunction::indicator(domain, 0.0, 2.0 * m, p.u)?;
    let y = StepFunction::indicator(domain, m, 2.0 * m, p.u)?;
    let o = pair_outcome(phi, &x, &y, tol);
    Ok(o.map(|o| UmWitness { label: format!("Δ₂ blocks at u = {}", p.u), y_norm: o.y_norm, delta: 1.0 - o.diff_norm }))
}

// ---------------------------------------------------------------------------
// Embeddings

/// `ψ(u) ≤ φ(ku)` for all `u ≥ u0` on the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Majorization {
    pub k: f64,
    pub u0: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingVerdict {
    Identity,
    Embedded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub phi: String,
    pub psi: String,
    pub domain: IntervalDomain,
    pub certificate: Option<Majorization>,
    pub a_hat: f64,
    pub a_hat_half: f64,
    pub stable: bool,
    pub skipped: usize,
    pub verdict: EmbeddingVerdict,
}

fn majorizes(phi: &OrliczFunction, psi: &OrliczFunction, k: f64, lo: f64) -> bool {
    crate::orlicz::log_grid(lo, 2f64.powi(40), 1 << 12).iter().all(|&u| {
        let (s, p) = (psi.eval(u), phi.eval(k * u));
        s <= p * (1.0 + 1e-12) || p.is_infinite()
    })
}

pub fn find_majorization(phi: &OrliczFunction, psi: &OrliczFunction, domain: IntervalDomain) -> Option<Majorization> {
    let ks = (0..=10).map(|j| 2f64.powi(j));
    match domain {
        IntervalDomain::HalfLine => ks
            .into_iter()
            .find(|&k| majorizes(phi, psi, k, 2f64.powi(-40)))
            .map(|k| Majorization { k, u0: 0.0, regime: Regime::AllArgs }),
        IntervalDomain::UnitInterval => (0..=10)
            .flat_map(|j| (0..=10).map(move |i| (2f64.powi(i), 2f64.powi(j))))
            .find(|&(k, u0)| majorizes(phi, psi, k, u0))
            .map(|(k, u0)| Majorization { k, u0, regime: Regime::Infinity }),
    }
}

/// Empirical constant of `Ces(φ) ↪ Ces(ψ)`.
pub fn embedding_suite(
    phi: &OrliczFunction,
    psi: &OrliczFunction,
    domain: IntervalDomain,
    corpus: &[StepFunction],
    tol: &Tolerances,
) -> EmbeddingReport {
    let certificate = find_majorization(phi, psi, domain);
    let ratios: Vec<f64> = corpus
        .par_iter()
        .map(|x| match (converged(psi, x, Space::Cesaro, tol), converged(phi, x, Space::Cesaro, tol)) {
            (Some(a), Some(b)) if b > 0.0 => a / b,
            _ => f64::NAN,
        })
        .collect();
    let skipped = ratios.iter().filter(|r| r.is_nan()).count();
    let max_of = |r: &[f64]| r.iter().filter(|v| !v.is_nan()).fold(0.0f64, |a, &b| a.max(b));
    let a_hat = max_of(&ratios);
    let a_hat_half = max_of(&ratios[..ratios.len().div_ceil(2)]);
    let stable = a_hat.is_finite() && a_hat <= 1.25 * a_hat_half;
    let verdict = if phi.spec() == psi.spec() {
        EmbeddingVerdict::Identity
    } else if certificate.is_some() && stable {
        EmbeddingVerdict::Embedded
    } else {
        EmbeddingVerdict::Inconclusive
    };
    EmbeddingReport {
        phi: phi.label().to_string(),
        psi: psi.label().to_string(),
        domain,
        certificate,
        a_hat,
        a_hat_half,
        stable,
        skipped,
        verdict,
    }
}

// ---------------------------------------------------------------------------
// Lifting order continuity from L^φ to Ces_φ

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftingRow {
    pub index: usize,
    pub last_n: f64,
    pub plain_final: f64,
    pub ces_final: f64,
    pub plain_pass: bool,
    pub ces_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessTails {
    pub case: OcCase,
    pub scales: usize,
    pub plain_min: f64,
    pub ces_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftingReport {
    pub phi: String,
    pub domain: IntervalDomain,
    pub vacuous: bool,
    pub rows: Vec<LiftingRow>,
    /// Plain tails vanish ⇒ Cesàro tails vanish, on every row.
    pub implication_holds: bool,
    /// On `[0,1]`: Cesàro tails vanish ⇒ plain tails vanish.
    pub converse_holds: Option<bool>,
    pub witness_tails: Option<WitnessTails>,
}

/// Tail sets `A_n = [0,1/n) ∪ (n,∞)` for `n = 2, 4, …, 2^LIFT_MAX_LOG2`.
pub const LIFT_MAX_LOG2: i32 = 160;
const LIFT_PASS: f64 = 1e-6;

fn tail_set(domain: IntervalDomain, n: f64) -> Vec<(f64, f64)> {
    match domain {
        IntervalDomain::HalfLine => vec![(0.0, 1.0 / n), (n, f64::INFINITY)],
        IntervalDomain::UnitInterval => vec![(0.0, 1.0 / n)],
    }
}

fn lifting_row(phi: &OrliczFunction, index: usize, x: &StepFunction, tol: &Tolerances) -> LiftingRow {
    let mut row = LiftingRow {
        index,
        last_n: 0.0,
        plain_final: f64::NAN,
        ces_final: f64::NAN,
        plain_pass: false,
        ces_pass: false,
    };
    for k in 1..=LIFT_MAX_LOG2 {
        let n = 2f64.powi(k);
        let tail = x.restrict(&tail_set(x.domain(), n));
        row.last_n = n;
        row.plain_final = converged(phi, &tail, Space::Plain, tol).unwrap_or(f64::INFINITY);
        row.ces_final = converged(phi, &tail, Space::Cesaro, tol).unwrap_or(f64::INFINITY);
        if row.plain_final < LIFT_PASS && row.ces_final < LIFT_PASS {
            break;
        }
    }
    row.plain_pass = row.plain_final < LIFT_PASS;
    row.ces_pass = row.ces_final < LIFT_PASS;
    row
}

pub fn fact_lifting_probe(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    corpus: &[StepFunction],
    params: &SuiteParams,
) -> Result<LiftingReport> {
    let tol = &params.tol;
    let rows: Vec<LiftingRow> = corpus.par_iter().enumerate().map(|(i, x)| lifting_row(phi, i, x, tol)).collect();
    let implication_holds = rows.iter().all(|r| !r.plain_pass || r.ces_pass);
    let converse_holds =
        (domain == IntervalDomain::UnitInterval).then(|| rows.iter().all(|r| !r.ces_pass || r.plain_pass));
    let witness = oc_failure_witness(phi, domain, params.truncation, tol)?;
    let witness_tails = match (&witness.kind, witness.element_named("x")) {
        (WitnessKind::OcFailure { case }, Some(x)) if witness.truncation.is_some() => {
            let ends: Vec<f64> = x.pieces().iter().map(|p| p.right).collect();
            let cut = &ends[..ends.len() - 1];
            let norms: Vec<(f64, f64)> = cut
                .par_iter()
                .map(|&e| {
                    let tail = x.restrict(&[(0.0, e)]);
                    (
                        converged(phi, &tail, Space::Plain, tol).unwrap_or(f64::INFINITY),
                        converged(phi, &tail, Space::Cesaro, tol).unwrap_or(f64::INFINITY),
                    )
                })
                .collect();
            Some(WitnessTails {
                case: *case,
                scales: norms.len(),
                plain_min: norms.iter().map(|n| n.0).fold(f64::INFINITY, f64::min),
                ces_min: norms.iter().map(|n| n.1).fold(f64::INFINITY, f64::min),
            })
        }
        _ => None,
    };
    Ok(LiftingReport {
        phi: phi.label().to_string(),
        domain,
        vacuous: corpus.is_empty(),
        rows,
        implication_holds,
        converse_holds,
        witness_tails,
    })
}

pub fn lifting_csv(report: &LiftingReport) -> String {
    csv_lines("index,last_n,plain_final,ces_final,plain_pass,ces_pass", &report.rows, |r| {
        format!("{},{},{},{},{},{}", r.index, r.last_n, r.plain_final, r.ces_final, r.plain_pass, r.ces_pass)
    })
}

// ---------------------------------------------------------------------------
// Unit sphere and unit ball

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereRow {
    pub name: String,
    pub rho: f64,
    pub norm: f64,
    pub consistent: bool,
}

/// For elements certified in `C_φ`: `|ρ − 1| ≤ 1e-6 ⟺ |‖·‖ − 1| ≤ 1e-5`.
/// Elements not certified in `C_φ` are left out.
pub fn sphere_equivalence(
    phi: &OrliczFunction,
    elements: &[(String, StepFunction)],
    tol: &Tolerances,
) -> Result<Vec<SphereRow>> {
    let mut rows = Vec::new();
    for (name, x) in elements {
        if x.is_zero() || membership(phi, x, MembershipKind::CPhi, tol).verdict != Verdict::Yes {
            continue;
        }
        let rho = modular(phi, x, Space::Cesaro, tol)?.value();
        let n = norm(phi, x, Space::Cesaro, tol)?.value;
        let consistent = ((rho - 1.0).abs() <= 1e-6) == ((n - 1.0).abs() <= 1e-5);
        rows.push(SphereRow { name: name.clone(), rho, norm: n, consistent });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitBallReport {
    pub phi: String,
    pub domain: IntervalDomain,
    pub space: Space,
    pub pairs: usize,
    pub skipped: usize,
    pub unit_ball_violations: usize,
    pub ideal_violations: usize,
}

/// `‖f‖ ≤ 1 ⟺ modular(f) ≤ 1` and `|f| ≤ |g| ⇒ ‖f‖ ≤ ‖g‖` on seeded
/// pairs, `g` rescaled so its norm straddles 1.
pub fn unit_ball_suite(
    phi: &OrliczFunction,
    domain: IntervalDomain,
    space: Space,
    pairs: usize,
    params: &SuiteParams,
) -> UnitBallReport {
    let tol = &params.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let raw: Vec<(StepFunction, f64, Vec<f64>)> = (0..pairs)
        .map(|_| {
            let g = random_step(&mut rng, domain);
            let target = 2f64.powf(rng.gen_range(-0.5..0.5));
            let factors = g.pieces().iter().map(|_| rng.gen_range(0.0..=1.0)).collect();
            (g, target, factors)
        })
        .collect();
    let outcomes: Vec<Option<(bool, bool)>> = raw
        .par_iter()
        .map(|(g, target, factors)| {
            let ng = converged(phi, g, space, tol).filter(|&v| v > 0.0)?;
            let g = g.scale(target / ng);
            let pieces = g.pieces().iter().zip(factors).map(|(p, &c)| Piece::new(p.left, p.right, p.value * c)).collect();
            let f = StepFunction::new(domain, pieces).ok()?;
            let mut ball_ok = true;
            for h in [&f, &g] {
                let n = converged(phi, h, space, tol)?;
                let m = modular(phi, h, space, tol).ok()?;
                let inside_norm = n <= 1.0;
                let inside_mod = m.is_finite() && m.value() <= 1.0;
                let near = (n - 1.0).abs() <= 1e-9 || (m.is_finite() && (m.value() - 1.0).abs() <= 1e-9);
                ball_ok &= inside_norm == inside_mod || near;
            }
            let ideal_ok = converged(phi, &f, space, tol)? <= converged(phi, &g, space, tol)? + 1e-9;
            Some((ball_ok, ideal_ok))
        })
        .collect();
    UnitBallReport {
        phi: phi.label().to_string(),
        domain,
        space,
        pairs,
        skipped: outcomes.iter().filter(|o| o.is_none()).count(),
        unit_ball_violations: outcomes.iter().flatten().filter(|o| !o.0).count(),
        ideal_violations: outcomes.iter().flatten().filter(|o| !o.1).count(),
    }
}
