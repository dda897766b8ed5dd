//! Numerical engine for Cesàro–Orlicz function spaces.
//!
//! Orlicz functions ([`orlicz`]), step functions ([`funcrep`]) and their
//! exact Cesàro means ([`cesaro`]) feed the modular and norm engine
//! ([`modular`]), the growth classifiers ([`indices`]), the counterexample
//! constructions ([`witnesses`]) and the batch property suites
//! ([`propcheck`]).

pub mod cesaro;
pub mod config;
pub mod error;
pub mod extreal;
pub mod funcrep;
pub mod indices;
pub mod modular;
pub mod orlicz;
pub mod propcheck;
pub mod quad;
pub mod witnesses;

pub use cesaro::{cesaro_mean, eval_c, HyperbolicPiece, HyperbolicTail, PiecewiseHyperbolic};
pub use config::{Config, Tolerances, DEFAULT_SEED, SEED_ENV};
pub use error::{Error, Result};
pub use funcrep::{dilate, distribution, rearrangement, IntervalDomain, Piece, StepFunction};
pub use indices::{
    condition_s, delta2_test, hardy_probe, matuszewska_indices, matuszewska_indices_on, ConditionS, Delta2Report,
    Delta2Verdict, HardyReport, IndexEstimate, Regime,
};
pub use modular::{
    luxemburg, membership, modular, modular_hyperbolic, modular_rho, modular_step, norm, tail_integral, Certificate,
    ExtendedValue, MembershipKind, MembershipReport, NormResult, NormStatus, Space, Verdict,
};
pub use orlicz::{make_family, DeclaredFlags, Family, OrliczFunction, PhiSpec};
pub use witnesses::{
    nontriviality, oc_approximation, oc_failure_witness, sm_failure_witness, verify_report, ApproxTrace, Certified,
    OcCase, SmCase, VerifyOutcome, WitnessKind, WitnessReport,
};
pub use propcheck::{
    embedding_suite, fact_lifting_probe, hardy_corpus, monotonicity_suite, random_corpus, sphere_equivalence,
    oc_table_named, oc_equivalence_suite, unit_ball_suite, SuiteParams,
};
