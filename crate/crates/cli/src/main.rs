//! `cesorl`: batch front end for Cesàro–Orlicz computations.
//!
//! Exit status: 0 on success, 2 when the answer is undetermined or
//! inconclusive, 1 on any error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use cesorl_core::indices::{ratio_curve, EstimateStatus};
use cesorl_core::propcheck::{lifting_csv, random_corpus, oc_table_csv, EmbeddingVerdict};
use cesorl_core::witnesses::DEFAULT_TRUNCATION;
use cesorl_core::{
    condition_s, delta2_test, embedding_suite, fact_lifting_probe, hardy_corpus, matuszewska_indices_on, modular,
    monotonicity_suite, nontriviality, norm, oc_failure_witness, sm_failure_witness, oc_table_named, oc_equivalence_suite,
    verify_report, Certified, Config, Delta2Verdict, IntervalDomain, NormStatus, OrliczFunction, PhiSpec, Regime,
    Space, StepFunction, SuiteParams, Tolerances, Verdict, WitnessKind, WitnessReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "cesorl", version, about = "Orlicz and Cesàro–Orlicz norms, Δ₂ tests and witness constructions")]
struct Cli {
    /// Emit the full report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the command's curve or table as CSV to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// JSON config with phi, domain, tolerances, seed, truncation and divergence_threshold.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Target {
    /// φ as `family:p1,p2` (e.g. `power:2`, `capped_inf:1`) or a JSON object.
    #[arg(long)]
    phi: Option<String>,
    /// `halfline` ([0,∞)) or `unit` ([0,1]).
    #[arg(long)]
    domain: Option<IntervalDomain>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Luxemburg norm of a step function.
    Norm {
        #[command(flatten)]
        target: Target,
        /// Step function file: `{"domain": .., "pieces": [[l, r, v], ..]}` or a bare piece list.
        #[arg(long = "f", value_name = "PATH")]
        f: PathBuf,
        #[arg(long, default_value = "cesaro")]
        space: Space,
    },
    /// Modular `I_φ(f)` or `ρ_φ(f)` with its certificate.
    Modular {
        #[command(flatten)]
        target: Target,
        #[arg(long = "f", value_name = "PATH")]
        f: PathBuf,
        #[arg(long, default_value = "cesaro")]
        space: Space,
    },
    /// Δ₂ classification.
    Delta2 {
        #[command(flatten)]
        target: Target,
        /// `zero`, `infinity` or `all`; defaults to the domain's regime.
        #[arg(long)]
        regime: Option<Regime>,
    },
    /// Matuszewska–Orlicz index estimates and condition (S).
    Indices {
        #[command(flatten)]
        target: Target,
    },
    /// Whether the Cesàro–Orlicz space is nontrivial.
    Nontrivial {
        #[command(flatten)]
        target: Target,
    },
    /// Explicit witness: 7 for order continuity, 10 for strict monotonicity.
    Witness {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        theorem: u8,
        /// Expected case tag such as `I(1)` or `II(3)`; an error if φ dispatches elsewhere.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        b0: Option<f64>,
    },
    /// Batch property suites.
    Suite {
        #[arg(long)]
        name: SuiteName,
        #[command(flatten)]
        target: Target,
        /// Second φ for the embedding suite.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        corpus_size: Option<usize>,
        /// ε grid for the monotonicity suite.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        eps: Vec<f64>,
        /// Run the order-continuity table even when boundedness of C is not established.
        #[arg(long)]
        allow_override: bool,
    },
    /// Re-verify a witness report from its raw elements.
    Verify {
        /// Report produced by `witness --json` or `nontrivial --json`.
        report: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteName {
    #[value(name = "theorem7")]
    OrderContinuity,
    Monotonicity,
    Embedding,
    Fact,
}

struct Context {
    config: Config,
    tol: Tolerances,
    seed: u64,
}

impl Context {
    fn load(path: Option<&Path>) -> Result<Context> {
        let config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Config::from_json(&text).with_context(|| format!("config {}", p.display()))?
            }
            None => Config::default(),
        };
        let seed = config.effective_seed()?;
        Ok(Context { tol: config.tolerances.clone(), config, seed })
    }

    fn phi(&self, t: &Target) -> Result<OrliczFunction> {
        let spec = match &t.phi {
            Some(s) => parse_phi(s)?,
            None => self.config.phi.clone().ok_or_else(|| anyhow!("no φ given: pass --phi or set `phi` in the config"))?,
        };
        Ok(spec.build()?)
    }

    fn domain(&self, t: &Target) -> IntervalDomain {
        t.domain.or(self.config.domain).unwrap_or(IntervalDomain::HalfLine)
    }

    fn truncation(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.truncation).unwrap_or(DEFAULT_TRUNCATION)
    }

    fn params(&self, corpus_size: Option<usize>) -> SuiteParams {
        SuiteParams {
            seed: self.seed,
            corpus_size: corpus_size.unwrap_or(64),
            truncation: self.truncation(None),
            tol: self.tol.clone(),
        }
    }
}

fn parse_phi(s: &str) -> Result<PhiSpec> {
    if s.trim_start().starts_with('{') {
        Ok(serde_json::from_str(s).context("parsing φ JSON")?)
    } else {
        Ok(PhiSpec::parse_compact(s)?)
    }
}

fn read_step(path: &Path, domain: IntervalDomain) -> Result<StepFunction> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))?;
    let f = match value {
        Value::Array(_) => {
            let triples: Vec<(f64, f64, f64)> = serde_json::from_value(value).context("pieces must be [l, r, v] triples")?;
            StepFunction::from_triples(domain, &triples)?
        }
        other => serde_json::from_value::<StepFunction>(other).with_context(|| format!("{}", path.display()))?,
    };
    if f.domain() != domain {
        let triples: Vec<(f64, f64, f64)> = f.pieces().iter().map(|p| (p.left, p.right, p.value)).collect();
        return Ok(StepFunction::from_triples(domain, &triples)?);
    }
    Ok(f)
}

/// What a command produced.
struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
    undetermined: bool,
}

impl Output {
    fn new(report: &impl Serialize, text: String) -> Result<Output> {
        Ok(Output { json: serde_json::to_value(report)?, text, csv: None, undetermined: false })
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let ctx = Context::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Norm { target, f, space } => {
            let (phi, domain) = (ctx.phi(target)?, ctx.domain(target));
            let x = read_step(f, domain)?;
            let r = norm(&phi, &x, *space, &ctx.tol)?;
            let text = match r.status {
                NormStatus::Converged => fmt_value(r.value),
                NormStatus::Zero => "0".into(),
                NormStatus::Infinite => "inf".into(),
            };
            Output::new(&r, text)
        }
        Command::Modular { target, f, space } => {
            let (phi, domain) = (ctx.phi(target)?, ctx.domain(target));
            let x = read_step(f, domain)?;
            let v = modular(&phi, &x, *space, &ctx.tol)?;
            let text = match v.certificate() {
                None => format!("{} (error ≤ {:.1e})", fmt_value(v.value()), v.error_bound()),
                Some(c) => format!("inf\ncertificate: {}", serde_json::to_string(c)?),
            };
            Output::new(&v, text)
        }
        Command::Delta2 { target, regime } => {
            let (phi, domain) = (ctx.phi(target)?, ctx.domain(target));
            let regime = regime.unwrap_or_else(|| Regime::for_domain(domain));
            let r = delta2_test(&phi, regime)?;
            let text = match &r.verdict {
                Delta2Verdict::Holds { k_hat, u0 } => format!("Holds, K={} (u0 = {u0})", fmt_k(*k_hat)),
                Delta2Verdict::FailsWithWitness { witnesses } => {
                    let mut s = format!("Fails ({} escalating witnesses)", witnesses.len());
                    for (n, w) in witnesses.iter().take(8).enumerate() {
                        write!(s, "\n  u_{} = {:e}, φ(2u)/φ(u) = {:e}", n + 1, w.u, w.ratio)?;
                    }
                    s
                }
                Delta2Verdict::Undetermined { reason } => format!("Undetermined: {reason}"),
            };
            let mut out = Output::new(&r, text)?;
            out.undetermined = matches!(r.verdict, Delta2Verdict::Undetermined { .. });
            let curve = ratio_curve(&phi, regime, 1 << 8);
            out.csv = Some(csv("u,ratio", curve.iter().map(|p| format!("{},{}", p.u, p.ratio))));
            Ok(out)
        }
        Command::Indices { target } => {
            let (phi, domain) = (ctx.phi(target)?, ctx.domain(target));
            let e = matuszewska_indices_on(&phi, domain);
            let s = condition_s(&phi);
            let text = format!(
                "alpha = {:.6}\nbeta = {}\nfit residual = {:.2e} ({:?})\ncondition (S): {}",
                e.alpha_hat,
                fmt_value(e.beta_hat),
                e.fit_residual,
                e.status,
                serde_json::to_string(&s)?
            );
            let mut out = Output::new(&serde_json::json!({ "indices": e, "condition_s": s }), text)?;
            out.undetermined = e.status == EstimateStatus::Undetermined;
            out.csv = Some(csv("s,ln_m", e.curve.iter().map(|(s, m)| format!("{s},{m}"))));
            Ok(out)
        }
        Command::Nontrivial { target } => {
            let r = nontriviality(&ctx.phi(target)?, ctx.domain(target), &ctx.tol)?;
            witness_output(&r)
        }
        Command::Witness { target, theorem, case, truncation, b0 } => {
            let (phi, domain) = (ctx.phi(target)?, ctx.domain(target));
            let r = match theorem {
                7 => oc_failure_witness(&phi, domain, ctx.truncation(*truncation), &ctx.tol)?,
                10 => sm_failure_witness(&phi, domain, *b0, &ctx.tol)?,
                other => bail!("--theorem must be 7 or 10, got {other}"),
            };
            if let Some(want) = case {
                let got = case_name(&r.kind);
                if normalize_case(want) != normalize_case(&got) {
                    bail!("{} on {domain} dispatches to case `{got}`, not `{want}`", phi.label());
                }
            }
            witness_output(&r)
        }
        Command::Suite { name, target, psi, corpus_size, eps, allow_override } => {
            suite(&ctx, *name, target, psi.as_deref(), *corpus_size, eps, *allow_override)
        }
        Command::Verify { report } => {
            let text = std::fs::read_to_string(report).with_context(|| format!("reading {}", report.display()))?;
            let r: WitnessReport = serde_json::from_str(&text)
                .map_err(|e| anyhow!("{}: line {}, column {}: {e}", report.display(), e.line(), e.column()))?;
            let v = verify_report(&r, &ctx.tol)?;
            let mut s = String::new();
            for (name, ok) in &v.checks {
                writeln!(s, "{} {name}", if *ok { "ok  " } else { "FAIL" })?;
            }
            write!(s, "{}", if v.ok { "verified" } else { "verification failed" })?;
            if !v.ok {
                bail!("{s}");
            }
            Output::new(&v, s)
        }
    }
}

fn fmt_k(k: f64) -> String {
    if (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0) {
        format!("{}", k.round())
    } else {
        format!("{k:.6}")
    }
}

fn csv(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn case_name(kind: &WitnessKind) -> String {
    match kind {
        WitnessKind::OcFailure { case } => serde_json::to_value(case).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        WitnessKind::SmFailure { case } => serde_json::to_value(case).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        WitnessKind::NoWitnessFound => "none".into(),
        WitnessKind::NonTriviality { .. } => "nontriviality".into(),
        WitnessKind::Undetermined { .. } => "undetermined".into(),
    }
}

fn normalize_case(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase()
}

fn witness_output(r: &WitnessReport) -> Result<Output> {
    let mut s = String::new();
    match &r.kind {
        WitnessKind::OcFailure { .. } => writeln!(s, "OCFailure {}", case_name(&r.kind))?,
        WitnessKind::SmFailure { .. } => writeln!(s, "SMFailure {}", case_name(&r.kind))?,
        WitnessKind::NonTriviality { verdict } => writeln!(
            s,
            "{}",
            match verdict {
                Verdict::Yes => "nontrivial",
                Verdict::No => "trivial",
                Verdict::Undetermined => "undetermined",
            }
        )?,
        WitnessKind::NoWitnessFound => writeln!(s, "NoWitnessFound")?,
        WitnessKind::Undetermined { reason } => writeln!(s, "Undetermined: {reason}")?,
    }
    writeln!(s, "phi = {}, domain = {}", r.phi.build().map(|p| p.label().to_string()).unwrap_or_default(), r.domain)?;
    for (k, v) in &r.scalars {
        writeln!(s, "{k} = {v}")?;
    }
    if let Some(t) = r.truncation {
        writeln!(s, "truncation N = {}, remainder bound {:e}", t.n, t.remainder_bound)?;
    }
    for c in &r.certified_values {
        let v = match &c.value {
            Certified::Modular { value } => match value.certificate() {
                None => format!("{} (error ≤ {:.1e})", value.value(), value.error_bound()),
                Some(cert) => format!("inf [{}]", serde_json::to_value(cert)?["kind"].as_str().unwrap_or("")),
            },
            Certified::Norm { value } => format!("{}", value.value),
            Certified::ExactRational { numerator, denominator, .. } => format!("{numerator}/{denominator}"),
            Certified::Check { holds, detail } => format!("{holds} {detail}"),
        };
        writeln!(s, "{}: {v}", c.description)?;
    }
    for e in &r.elements {
        writeln!(s, "element {} with {} pieces", e.name, e.function.pieces().len())?;
    }
    for n in &r.notes {
        writeln!(s, "note: {n}")?;
    }
    let mut out = Output::new(r, s.trim_end().to_string())?;
    out.undetermined = matches!(
        r.kind,
        WitnessKind::Undetermined { .. } | WitnessKind::NonTriviality { verdict: Verdict::Undetermined }
    );
    out.csv = Some(csv(
        "element,left,right,value",
        r.elements
            .iter()
            .flat_map(|e| e.function.pieces().iter().map(move |p| format!("{},{},{},{}", e.name, p.left, p.right, p.value))),
    ));
    Ok(out)
}

fn suite(
    ctx: &Context,
    name: SuiteName,
    target: &Target,
    psi: Option<&str>,
    corpus_size: Option<usize>,
    eps: &[f64],
    allow_override: bool,
) -> Result<Output> {
    let params = ctx.params(corpus_size);
    let domain = ctx.domain(target);
    match name {
        SuiteName::OrderContinuity => {
            let rows = if target.phi.is_some() || ctx.config.phi.is_some() {
                vec![oc_equivalence_suite(&ctx.phi(target)?, domain, allow_override, &params)?]
            } else {
                oc_table_named(&params)?
            };
            let mut s = String::new();
            for r in &rows {
                let flag = match r.consistent {
                    Some(true) => "consistent",
                    Some(false) => "INCONSISTENT",
                    None => "undetermined",
                };
                writeln!(s, "{:<34} {:<9} {:?} / {} : {flag}", r.phi, r.domain.to_string(), r.delta2, r.witness)?;
            }
            let mut out = Output::new(&rows, s.trim_end().to_string())?;
            out.undetermined = rows.iter().any(|r| r.consistent.is_none());
            out.csv = Some(oc_table_csv(&rows));
            Ok(out)
        }
        SuiteName::Monotonicity => {
            let phi = ctx.phi(target)?;
            let r = monotonicity_suite(&phi, domain, params.corpus_size, eps, &params)?;
            let mut s = format!("pairs {} (skipped {}), SM gap min {:e}", r.pairs, r.skipped, r.sm_min_gap);
            if let Some(g) = r.sm_witness_gap {
                write!(s, "\nSM witness gap {g:e}")?;
            }
            for (e, d) in r.curve() {
                write!(s, "\ndelta_hat({e}) = {d:e}")?;
            }
            let mut out = Output::new(&r, s)?;
            out.csv = Some(r.curve_csv());
            Ok(out)
        }
        SuiteName::Embedding => {
            let phi = ctx.phi(target)?;
            let psi = parse_phi(psi.ok_or_else(|| anyhow!("the embedding suite needs --psi"))?)?.build()?;
            let corpus = random_corpus(domain, params.corpus_size, params.seed);
            let r = embedding_suite(&phi, &psi, domain, &corpus, &params.tol);
            let text = format!(
                "{:?}: A_hat = {} (half corpus {}), certificate {}",
                r.verdict,
                r.a_hat,
                r.a_hat_half,
                serde_json::to_string(&r.certificate)?
            );
            let mut out = Output::new(&r, text)?;
            out.undetermined = r.verdict == EmbeddingVerdict::Inconclusive;
            Ok(out)
        }
        SuiteName::Fact => {
            let phi = ctx.phi(target)?;
            let corpus = hardy_corpus(domain, params.corpus_size, params.seed);
            let r = fact_lifting_probe(&phi, domain, &corpus, &params)?;
            let passed = r.rows.iter().filter(|x| x.ces_pass).count();
            let mut s = format!(
                "{} elements, Cesàro tails vanish on {passed}; implication holds: {}",
                r.rows.len(),
                r.implication_holds
            );
            if r.vacuous {
                s.push_str(" (vacuous)");
            }
            if let Some(c) = r.converse_holds {
                write!(s, "; converse holds: {c}")?;
            }
            if let Some(t) = &r.witness_tails {
                write!(s, "\nwitness tails over {} scales: plain ≥ {}, Cesàro ≥ {}", t.scales, t.plain_min, t.ces_min)?;
            }
            let mut out = Output::new(&r, s)?;
            out.csv = Some(lifting_csv(&r));
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                match serde_json::to_string_pretty(&out.json) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
            } else {
                println!("{}", out.text);
            }
            if let Some(path) = &cli.csv {
                let Some(body) = &out.csv else {
                    eprintln!("error: this command has no CSV output");
                    return ExitCode::from(1);
                };
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(if out.undetermined { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
