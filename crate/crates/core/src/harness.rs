//! Seeded verification campaigns, falsification runs, and report assembly.
//!
//! Every sample draws from its own stream `rng_for(seed, index)`; samples are
//! evaluated in parallel and reduced in index order, so a report depends only
//! on its [`RunConfig`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bochner::{
    betti_certificate, curvature_term_with, norm_identity_check, q_quantity, weitzenbock_oracle,
    PForm,
};
use crate::claims::{self, ClaimId, ClaimStatus};
use crate::cones::{
    a_np, b_m_alpha, cone_membership_tol, critical_theta, theta_cylinder, ConeParams,
};
use crate::curvature::{induce_second_kind, random_curvature_with, Frame};
use crate::error::{Error, Result};
use crate::implications::{
    cp2_frame_identity, cylinder_frame_identities, pic_theta, sampled_isotropic_minimum,
    verify_prop_ricci, Verdict,
};
use crate::io::{write_json, Counterexample, TensorSource};
use crate::kahler::{kahler_cone_diagnostic, trace_identities, ComplexStructure};
use crate::models::{
    build, cluster_spectrum, compare_spectrum, expected_spectrum, model_boundaries, ModelSpec,
};
use crate::sampling::{derive_seed, haar_orthogonal, rng_for, FrameSearch};
use crate::tensor_space::Dim;
use crate::tol;

pub const FORMAT_VERSION: &str = "secondkind-report/1";

/// Seed of the shipped verification and falsification campaigns.
pub const SHIPPED_SEED: u64 = 42;

/// Tolerances used by a run; every report records them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Verdict band for claims with exact conclusions.
    pub implication: f64,
    /// Violation threshold for claims with sampled conclusions.
    pub sampled: f64,
    /// Residual bound for multilinear identities, relative to the tensor scale.
    pub identity: f64,
    /// Eigenvalue agreement with closed-form spectra.
    pub spectrum: f64,
    /// Boundary band for cone certificates.
    pub boundary: f64,
    pub flat: f64,
    pub hsc_variance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            implication: tol::BOUNDARY,
            sampled: tol::SAMPLED,
            identity: tol::IDENTITY,
            spectrum: tol::EIGEN,
            boundary: tol::BOUNDARY,
            flat: tol::FLAT,
            hsc_variance: tol::HSC_VARIANCE,
        }
    }
}

impl Tolerances {
    /// `--tol` replaces the exact-verdict, identity, spectrum and boundary tolerances.
    pub fn with_override(mut self, tol: Option<f64>) -> Self {
        if let Some(t) = tol {
            self.implication = t;
            self.identity = t;
            self.spectrum = t;
            self.boundary = t;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdTable {
    /// `Θ̄_{n,α}` on an `α` grid.
    Theta,
    /// `A_{n,p}` for `2 <= p <= n/2`.
    A,
    /// `B_{m,α}` on an `α` grid.
    B,
    /// The four-dimensional isotropic cone parameter on `[1, 9)`.
    Pic,
}

impl std::str::FromStr for ThresholdTable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(ThresholdTable::Theta),
            "a" => Ok(ThresholdTable::A),
            "b" => Ok(ThresholdTable::B),
            "pic" => Ok(ThresholdTable::Pic),
            _ => Err(Error::Config(format!(
                "unknown table `{s}` (theta, a, b, pic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropGroup {
    Ricci,
    Pic,
    Spectral,
    Bochner,
    Kahler,
    Identities,
    All,
}

impl std::str::FromStr for PropGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ricci" => PropGroup::Ricci,
            "pic" => PropGroup::Pic,
            "spectral" => PropGroup::Spectral,
            "bochner" => PropGroup::Bochner,
            "kahler" => PropGroup::Kahler,
            "identities" => PropGroup::Identities,
            "all" => PropGroup::All,
            _ => return Err(Error::Config(format!(
                "unknown prop group `{s}` (ricci, pic, spectral, bochner, kahler, identities, all)"
            ))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Threshold {
        table: ThresholdTable,
        /// `n` for `theta`/`a`, `m` for `b`; unused for `pic`.
        size: usize,
        /// `α` grid step.
        step: f64,
    },
    Spectrum {
        source: TensorSource,
    },
    CheckCone {
        source: TensorSource,
        alpha: f64,
        theta: f64,
    },
    Verify {
        prop: PropGroup,
        n: usize,
    },
    Bochner {
        source: TensorSource,
        p: usize,
        /// Defaults to `A_{n,p}`.
        theta: Option<f64>,
    },
    Kahler {
        source: TensorSource,
        alpha: f64,
        /// Defaults to `B_{m,α}`.
        theta: Option<f64>,
    },
    Falsify {
        /// All claims applicable in dimension `n` when empty.
        claims: Vec<ClaimId>,
        n: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Threshold { .. } => "threshold",
            Command::Spectrum { .. } => "spectrum",
            Command::CheckCone { .. } => "check-cone",
            Command::Verify { .. } => "verify",
            Command::Bochner { .. } => "bochner",
            Command::Kahler { .. } => "kahler",
            Command::Falsify { .. } => "falsify",
        }
    }

    fn samples_randomly(&self) -> bool {
        matches!(
            self,
            Command::Verify { .. } | Command::Falsify { .. } | Command::Kahler { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// Mandatory for sampling commands.
    pub seed: Option<u64>,
    /// Corpus size per check.
    pub samples: usize,
    pub search: FrameSearch,
    pub tolerances: Tolerances,
    /// Hill-climbing steps applied to the closest calls of a falsification run.
    pub refine_steps: usize,
    /// Where falsification persists counterexamples; nothing is written when `None`.
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: None,
            samples: 1000,
            search: FrameSearch::default(),
            tolerances: Tolerances::default(),
            refine_steps: 40,
            output_dir: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.samples_randomly() && self.seed.is_none() {
            return Err(Error::Config(format!(
                "`{}` needs a seed",
                self.command.name()
            )));
        }
        if self.samples == 0
            && matches!(
                self.command,
                Command::Verify { .. } | Command::Falsify { .. }
            )
        {
            return Err(Error::Config("samples must be positive".into()));
        }
        let t = &self.tolerances;
        for v in [
            t.implication,
            t.sampled,
            t.identity,
            t.spectrum,
            t.boundary,
            t.flat,
            t.hsc_variance,
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerances must be positive and finite, got {v}"
                )));
            }
        }
        match &self.command {
            Command::Threshold { table, size, step } => {
                if !(*step > 0.0 && step.is_finite()) {
                    return Err(Error::Config(format!("step must be positive, got {step}")));
                }
                match table {
                    ThresholdTable::Theta => Dim::new(*size).map(|_| ()),
                    ThresholdTable::A => Dim::new(*size)?.require_at_least(5).map(|_| ()),
                    ThresholdTable::B => b_m_alpha(*size, 1.0).map(|_| ()),
                    ThresholdTable::Pic => Ok(()),
                }
            }
            Command::Verify { n, .. } | Command::Falsify { n, .. } => Dim::new(*n).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Outcome counts of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub status: ClaimStatus,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Meaning of `worst`.
    pub metric: &'static str,
    pub worst: Option<f64>,
    /// Derived per-sample seeds (replay with `rng(seed)`) of failing samples, first 20.
    pub failing_seeds: Vec<u64>,
    pub sampled: bool,
}

impl CheckSummary {
    fn new(name: impl Into<String>, metric: &'static str) -> Self {
        CheckSummary {
            name: name.into(),
            status: ClaimStatus::Proven,
            passed: 0,
            failed: 0,
            skipped: 0,
            metric,
            worst: None,
            failing_seeds: Vec::new(),
            sampled: false,
        }
    }

    /// `min` folds toward the smallest value, otherwise the largest.
    fn observe(&mut self, value: f64, min: bool) {
        self.worst = Some(match self.worst {
            None => value,
            Some(w) if min => w.min(value),
            Some(w) => w.max(value),
        });
    }

    fn record(&mut self, ok: bool, seed: Option<u64>) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if let Some(s) = seed {
                if self.failing_seeds.len() < 20 {
                    self.failing_seeds.push(s);
                }
            }
        }
    }

    /// A planted claim passes when at least one violation was found; an open
    /// claim never fails.
    pub fn ok(&self) -> bool {
        match self.status {
            ClaimStatus::Proven => self.failed == 0,
            ClaimStatus::Planted => self.failed > 0,
            ClaimStatus::Open => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRecord {
    pub claim: ClaimId,
    pub status: ClaimStatus,
    pub n: usize,
    pub index: u64,
    pub seed: u64,
    pub hypothesis_margin: f64,
    pub conclusion_margin: f64,
    pub knobs: BTreeMap<String, f64>,
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub format_version: &'static str,
    pub crate_version: &'static str,
    pub config: RunConfig,
    pub checks: Vec<CheckSummary>,
    pub table: Option<Table>,
    pub details: Option<Value>,
    pub violations: Vec<ViolationRecord>,
    pub notes: Vec<String>,
}

impl CampaignReport {
    fn new(config: &RunConfig) -> Self {
        CampaignReport {
            format_version: FORMAT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            checks: Vec::new(),
            table: None,
            details: None,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.ok()).count()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `0` iff every check is ok, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed_checks() > 0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The table when there is one, otherwise one row per check.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.table {
            out.push_str(&t.columns.join("\t"));
            out.push('\n');
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
            return out;
        }
        out.push_str("check\tstatus\tpassed\tfailed\tskipped\tmetric\tworst\tok\n");
        for c in &self.checks {
            let worst = c.worst.map_or_else(|| "-".to_string(), |w| w.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                c.name,
                serde_json::to_value(c.status).unwrap().as_str().unwrap(),
                c.passed,
                c.failed,
                c.skipped,
                c.metric,
                worst,
                c.ok()
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} ({})\n", self.config.command.name(), FORMAT_VERSION);
        if let Some(t) = &self.table {
            out.push_str(&self.to_tsv_table(t));
        }
        if let Some(d) = &self.details {
            out.push_str(&serde_json::to_string_pretty(d).expect("details serialize"));
            out.push('\n');
        }
        for c in &self.checks {
            let worst = c
                .worst
                .map_or_else(|| "-".to_string(), |w| format!("{w:.3e}"));
            out.push_str(&format!(
                "[{}] {:<32} passed {:>6}  failed {:>6}  skipped {:>6}  {} {}\n",
                if c.ok() { "ok" } else { "FAIL" },
                c.name,
                c.passed,
                c.failed,
                c.skipped,
                c.metric,
                worst
            ));
        }
        for v in &self.violations {
            out.push_str(&format!(
                "violation {} n={} index={} hypothesis {:.3e} conclusion {:.3e}{}\n",
                v.claim.name(),
                v.n,
                v.index,
                v.hypothesis_margin,
                v.conclusion_margin,
                v.file
                    .as_ref()
                    .map(|f| format!(" -> {f}"))
                    .unwrap_or_default()
            ));
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }

    fn to_tsv_table(&self, t: &Table) -> String {
        let mut out = t.columns.join("\t");
        out.push('\n');
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

pub fn run(config: &RunConfig) -> Result<CampaignReport> {
    config.validate()?;
    let mut report = CampaignReport::new(config);
    match &config.command {
        Command::Threshold { table, size, step } => threshold(&mut report, *table, *size, *step)?,
        Command::Spectrum { source } => spectrum(&mut report, config, source)?,
        Command::CheckCone {
            source,
            alpha,
            theta,
        } => check_cone(&mut report, config, source, *alpha, *theta)?,
        Command::Verify { prop, n } => verify(&mut report, config, *prop, *n)?,
        Command::Bochner { source, p, theta } => bochner(&mut report, source, *p, *theta)?,
        Command::Kahler {
            source,
            alpha,
            theta,
        } => kahler(&mut report, config, source, *alpha, *theta)?,
        Command::Falsify { claims, n } => falsify_into(&mut report, config, claims, *n)?,
    }
    Ok(report)
}

/// Shorthand for `run` on a `falsify` config.
pub fn falsify(config: &RunConfig) -> Result<CampaignReport> {
    if !matches!(config.command, Command::Falsify { .. }) {
        return Err(Error::Config("falsify needs a falsify command".into()));
    }
    run(config)
}

fn alpha_grid(hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let a = 1.0 + k as f64 * step;
        if a >= hi {
            break;
        }
        out.push(a);
        k += 1;
    }
    out
}

fn threshold(
    report: &mut CampaignReport,
    table: ThresholdTable,
    size: usize,
    step: f64,
) -> Result<()> {
    let (columns, rows): (Vec<&str>, Vec<Vec<f64>>) = match table {
        ThresholdTable::Theta => {
            let big_n = Dim::new(size)?.traceless_dim() as f64;
            let rows = alpha_grid(big_n, step)
                .into_iter()
                .map(|a| Ok(vec![size as f64, a, theta_cylinder(size, a)?]))
                .collect::<Result<_>>()?;
            (vec!["n", "alpha", "theta_bar"], rows)
        }
        ThresholdTable::A => {
            let rows = (2..=size / 2)
                .map(|p| Ok(vec![size as f64, p as f64, a_np(size, p)?]))
                .collect::<Result<_>>()?;
            (vec!["n", "p", "a"], rows)
        }
        ThresholdTable::B => {
            let upper = ((2 * size - 1) * (size + 1)) as f64;
            let rows = alpha_grid(upper, step)
                .into_iter()
                .map(|a| Ok(vec![size as f64, a, b_m_alpha(size, a)?]))
                .collect::<Result<_>>()?;
            (vec!["m", "alpha", "b"], rows)
        }
        ThresholdTable::Pic => {
            let rows = alpha_grid(9.0, step)
                .into_iter()
                .map(|a| Ok(vec![4.0, a, pic_theta(a)?]))
                .collect::<Result<_>>()?;
            (vec!["n", "alpha", "theta"], rows)
        }
    };
    report.table = Some(Table {
        columns: columns.into_iter().map(String::from).collect(),
        rows,
    });
    Ok(())
}

fn spectrum_json(eigs: &[f64]) -> Value {
    let clusters: Vec<Value> = cluster_spectrum(eigs, tol::CLUSTER_GAP)
        .into_iter()
        .map(|(v, k)| json!({"value": v, "multiplicity": k}))
        .collect();
    Value::Array(clusters)
}

fn spectrum(report: &mut CampaignReport, config: &RunConfig, source: &TensorSource) -> Result<()> {
    let r = source.load()?;
    let op = induce_second_kind(&r);
    let n = r.n() as f64;
    let trace_residual = (op.trace() - (n + 2.0) / (2.0 * n) * r.scalar()).abs();
    let mut trace = CheckSummary::new("trace-identity", "max residual");
    trace.observe(trace_residual, false);
    trace.record(
        trace_residual <= config.tolerances.identity * r.norm().max(1.0),
        None,
    );
    report.checks.push(trace);

    let mut details = json!({
        "n": r.n(),
        "mean": op.mean(),
        "computed": spectrum_json(op.eigenvalues()),
    });
    if let Some(spec) = source.model() {
        if let Ok(expected) = expected_spectrum(spec) {
            let cmp = compare_spectrum(op.eigenvalues(), &expected, tol::CLUSTER_GAP);
            let mut check = CheckSummary::new("closed-form-spectrum", "max eigenvalue error");
            check.observe(cmp.max_error, false);
            check.record(cmp.passes(config.tolerances.spectrum), None);
            report.checks.push(check);
            details["expected"] = Value::Array(
                expected
                    .iter()
                    .map(|(v, k)| json!({"value": v, "multiplicity": k}))
                    .collect(),
            );
        }
        boundary_checks(report, config, spec, &op)?;
    }
    report.details = Some(details);
    Ok(())
}

fn boundary_checks(
    report: &mut CampaignReport,
    config: &RunConfig,
    spec: &ModelSpec,
    op: &crate::curvature::SecondKindOperator,
) -> Result<()> {
    let boundaries = model_boundaries(spec)?;
    if boundaries.is_empty() {
        return Ok(());
    }
    let mut check = CheckSummary::new("model-boundaries", "max |margin|");
    for params in boundaries {
        let verdict = cone_membership_tol(op, params, config.tolerances.boundary)?;
        check.observe(verdict.margin.abs(), false);
        check.record(verdict.class == crate::cones::ConeClass::Boundary, None);
    }
    report.checks.push(check);
    Ok(())
}

fn check_cone(
    report: &mut CampaignReport,
    config: &RunConfig,
    source: &TensorSource,
    alpha: f64,
    theta: f64,
) -> Result<()> {
    let r = source.load()?;
    let op = induce_second_kind(&r);
    let verdict = cone_membership_tol(
        &op,
        ConeParams::new(alpha, theta)?,
        config.tolerances.boundary,
    )?;
    let mut check = CheckSummary::new("membership", "margin");
    check.observe(verdict.margin, true);
    check.record(verdict.class.is_member(), None);
    report.checks.push(check);
    report.details = Some(json!({
        "verdict": verdict,
        "critical_theta": critical_theta(&op, alpha)?,
        "mean": op.mean(),
    }));
    Ok(())
}

/// Sample indices `0..count` mapped in parallel and returned in index order.
fn par_samples<T: Send>(
    count: usize,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..count as u64).into_par_iter().map(f).collect()
}

struct ClaimRun {
    summary: CheckSummary,
    violations: Vec<ViolationRecord>,
}

/// Runs `samples` instances of `claim` and, when `refine_steps > 0`, hill-climbs
/// the eight closest calls.
fn run_claim(config: &RunConfig, claim: ClaimId, n: usize, persist: bool) -> Result<ClaimRun> {
    let seed = config.seed.expect("validated");
    let stream = derive_seed(seed, claim as u64 ^ ((n as u64) << 8));
    let tol = if claim.sampled() {
        config.tolerances.sampled
    } else {
        config.tolerances.implication
    };
    let search = config.search;
    let outcomes = par_samples(config.samples, |i| {
        let mut rng = rng_for(stream, i);
        let inst = claims::generate(claim, n, i, &mut rng)?;
        let rep = claims::assess(claim, &inst, search, &mut rng, tol)?;
        Ok((inst, rep))
    })?;

    let mut outcomes: Vec<(
        u64,
        claims::Instance,
        crate::implications::ImplicationReport,
    )> = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, (inst, rep))| (i as u64, inst, rep))
        .collect();

    if config.refine_steps > 0 {
        let mut close: Vec<usize> = (0..outcomes.len())
            .filter(|&k| {
                outcomes[k].2.verdict == Verdict::Certified
                    && outcomes[k].2.hypothesis_margin >= 0.0
            })
            .collect();
        close.sort_by(|&a, &b| {
            outcomes[a]
                .2
                .conclusion_margin
                .total_cmp(&outcomes[b].2.conclusion_margin)
                .then(a.cmp(&b))
        });
        close.truncate(8);
        let refined = close
            .par_iter()
            .map(|&k| {
                let (i, inst, rep) = &outcomes[k];
                let mut rng = rng_for(stream ^ 0x5EE_D0FF_1E1D, *i);
                claims::refine(claim, inst, *rep, config.refine_steps, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&k, (inst, rep)) in close.iter().zip(refined) {
            outcomes[k].1 = inst;
            outcomes[k].2 = rep;
        }
    }

    let mut summary = CheckSummary::new(claim.name(), "worst conclusion margin");
    summary.status = claim.status();
    summary.sampled = claim.sampled();
    let mut violations = Vec::new();
    for (i, inst, mut rep) in outcomes {
        let sample_seed = derive_seed(stream, i);
        if rep.verdict == Verdict::Violated && claim.sampled() {
            let mut rng = rng_for(stream ^ 0xC0_FF_EE, i);
            rep = claims::confirm_sampled(claim, &inst, rep, search, &mut rng)?;
        }
        match rep.verdict {
            Verdict::HypothesisNotMet => summary.skipped += 1,
            v => {
                summary.observe(rep.conclusion_margin, true);
                let ok = v == Verdict::Certified;
                summary.record(ok, Some(sample_seed));
                if !ok {
                    let file = if persist && violations.len() < 20 {
                        persist_violation(config, claim, n, i, sample_seed, &inst, &rep)?
                    } else {
                        None
                    };
                    if violations.len() < 20 {
                        violations.push(ViolationRecord {
                            claim,
                            status: claim.status(),
                            n,
                            index: i,
                            seed: sample_seed,
                            hypothesis_margin: rep.hypothesis_margin,
                            conclusion_margin: rep.conclusion_margin,
                            knobs: inst.knobs.clone(),
                            file,
                        });
                    }
                }
            }
        }
    }
    Ok(ClaimRun {
        summary,
        violations,
    })
}

fn persist_violation(
    config: &RunConfig,
    claim: ClaimId,
    n: usize,
    index: u64,
    seed: u64,
    inst: &claims::Instance,
    rep: &crate::implications::ImplicationReport,
) -> Result<Option<String>> {
    let Some(dir) = &config.output_dir else {
        return Ok(None);
    };
    let mut margins = inst.knobs.clone();
    margins.insert("hypothesis".into(), rep.hypothesis_margin);
    margins.insert("conclusion".into(), rep.conclusion_margin);
    let ce = Counterexample::new(claim.name(), seed, index, margins, &inst.tensor);
    let path = dir.join(format!("{}-n{n}-{index}.json", claim.name()));
    write_json(&path, &ce)?;
    Ok(Some(path.display().to_string()))
}

fn claims_for(prop: PropGroup, n: usize) -> Vec<ClaimId> {
    use ClaimId::*;
    let list: Vec<ClaimId> = match prop {
        PropGroup::Ricci => vec![RicciBound],
        PropGroup::Pic => vec![IsotropicFour],
        PropGroup::Spectral => vec![TwoPositiveSectional, FractionalIsotropic, RicciPositive],
        PropGroup::Bochner => vec![
            PartialRicci,
            QLowerBound,
            WeightPrinciple,
            BochnerNonnegative,
        ],
        PropGroup::Kahler => vec![KahlerThreshold],
        PropGroup::Identities => vec![],
        PropGroup::All => ClaimId::ALL
            .into_iter()
            .filter(|c| c.status() == ClaimStatus::Proven)
            .collect(),
    };
    list.into_iter().filter(|c| c.supports(n)).collect()
}

fn verify(
    report: &mut CampaignReport,
    config: &RunConfig,
    prop: PropGroup,
    n: usize,
) -> Result<()> {
    let claim_list = claims_for(prop, n);
    if prop == PropGroup::Pic && n != 4 {
        return Err(Error::Config(
            "the isotropic-curvature claim is four-dimensional".into(),
        ));
    }
    for claim in claim_list {
        let run = run_claim(config, claim, n, false)?;
        report.checks.push(run.summary);
        report.violations.extend(run.violations);
    }
    if matches!(prop, PropGroup::Ricci | PropGroup::All) {
        report.checks.push(cylinder_sharpness(config, n)?);
    }
    if matches!(prop, PropGroup::Pic | PropGroup::All) && n == 4 {
        report.checks.push(cp2_sharpness(config)?);
    }
    if matches!(prop, PropGroup::Identities | PropGroup::All) {
        report.checks.extend(identity_checks(config, n)?);
    }
    if matches!(prop, PropGroup::Bochner | PropGroup::All) && n >= 3 {
        report.checks.extend(bochner_identity_checks(config, n)?);
    }
    if prop == PropGroup::Kahler && n >= 4 && n.is_multiple_of(2) {
        report.checks.push(kahler_trace_check(config, n / 2)?);
    }
    Ok(())
}

/// The cylinder on `∂C(α, Θ̄_{n,α})` for 50 `α`, with Ricci conclusion margin zero.
fn cylinder_sharpness(config: &RunConfig, n: usize) -> Result<CheckSummary> {
    let r = build(&ModelSpec::Cylinder { n })?;
    let big_n = Dim::new(n)?.traceless_dim() as f64;
    let mut check = CheckSummary::new("cylinder-sharpness", "max |margin|");
    for k in 0..50 {
        let alpha = 1.0 + (big_n - 1.0) * k as f64 / 50.0;
        let theta = theta_cylinder(n, alpha)?;
        let rep = verify_prop_ricci(&r, alpha, theta, config.tolerances.boundary)?;
        let worst = rep.hypothesis_margin.abs().max(rep.conclusion_margin.abs());
        check.observe(worst, false);
        check.record(worst <= config.tolerances.boundary, None);
    }
    Ok(check)
}

/// `CP²` on `∂C(α, θ_pic(α))` with sampled isotropic minimum within the sampled tolerance of zero.
fn cp2_sharpness(config: &RunConfig) -> Result<CheckSummary> {
    let r = build(&ModelSpec::CpFubiniStudy { m: 2, c: 4.0 })?;
    let op = induce_second_kind(&r);
    let seed = config.seed.expect("validated");
    let mut check = CheckSummary::new("cp2-sharpness", "max |margin|");
    check.sampled = true;
    let alphas: Vec<f64> = (0..16).map(|k| 1.0 + 0.5 * k as f64).collect();
    // A boundary minimum of zero is approached quadratically; refine harder than the corpus default.
    let search = FrameSearch {
        samples: config.search.samples.max(2000),
        starts: config.search.starts.max(4),
        steps: config.search.steps.max(600),
    };
    let mins = par_samples(1, |i| {
        let mut rng = rng_for(derive_seed(seed, 0xC2), i);
        Ok(sampled_isotropic_minimum(&r, search, &mut rng)?.0)
    })?;
    for alpha in alphas {
        let verdict = cone_membership_tol(
            &op,
            ConeParams::new(alpha, pic_theta(alpha)?)?,
            config.tolerances.boundary,
        )?;
        let worst = verdict.margin.abs().max(mins[0].abs());
        check.observe(worst, false);
        check.record(
            verdict.margin.abs() <= config.tolerances.boundary
                && mins[0].abs() <= config.tolerances.sampled,
            None,
        );
    }
    Ok(check)
}

fn residual_check(
    config: &RunConfig,
    name: &str,
    tag: u64,
    f: impl Fn(&mut crate::sampling::SampleRng) -> Result<(f64, f64)> + Sync + Send,
) -> Result<CheckSummary> {
    let seed = derive_seed(config.seed.expect("validated"), tag);
    let tol = config.tolerances.identity;
    let results = par_samples(config.samples, |i| f(&mut rng_for(seed, i)))?;
    let mut check = CheckSummary::new(name, "max relative residual");
    for (i, (residual, scale)) in results.into_iter().enumerate() {
        let rel = residual / scale.max(1.0);
        check.observe(rel, false);
        check.record(rel <= tol, Some(derive_seed(seed, i as u64)));
    }
    Ok(check)
}

fn identity_checks(config: &RunConfig, n: usize) -> Result<Vec<CheckSummary>> {
    let dim = Dim::new(n)?;
    let mut out = Vec::new();
    out.push(residual_check(config, "trace-identity", 1, |rng| {
        let r = random_curvature_with(dim, 1.0, rng);
        let op = induce_second_kind(&r);
        let nf = n as f64;
        Ok((
            (op.trace() - (nf + 2.0) / (2.0 * nf) * r.scalar()).abs(),
            r.scalar().abs(),
        ))
    })?);
    out.push(residual_check(
        config,
        "cylinder-frame-identities",
        2,
        |rng| {
            let r = random_curvature_with(dim, 1.0, rng);
            let frame = Frame::new(haar_orthogonal(n, rng))?;
            let ids = cylinder_frame_identities(&r, &frame, 0)?;
            Ok((ids.max_residual(), r.matrix().amax()))
        },
    )?);
    if n == 4 {
        out.push(residual_check(config, "cp2-frame-identity", 3, |rng| {
            let r = random_curvature_with(dim, 1.0, rng);
            let frame = Frame::new(haar_orthogonal(4, rng))?;
            let (lhs, rhs) = cp2_frame_identity(&r, &frame)?;
            Ok(((lhs - rhs).abs(), r.matrix().amax()))
        })?);
    }
    if n >= 2 {
        out.push(residual_check(config, "q-closed-form", 4, |rng| {
            let r = random_curvature_with(dim, 1.0, rng);
            let frame = Frame::new(haar_orthogonal(n, rng))?;
            let p = rand::Rng::random_range(rng, 1..=n / 2);
            let (def, closed) = q_quantity(&r, &frame, p)?;
            Ok(((def - closed).abs(), r.matrix().amax()))
        })?);
    }
    if n >= 2 && n.is_multiple_of(2) {
        out.push(kahler_trace_check(config, n / 2)?);
    }
    Ok(out)
}

fn bochner_identity_checks(config: &RunConfig, n: usize) -> Result<Vec<CheckSummary>> {
    let dim = Dim::new(n)?;
    let mut out = Vec::new();
    out.push(residual_check(config, "p-form-norm-identity", 5, |rng| {
        let p = rand::Rng::random_range(rng, 1..n);
        let omega = PForm::random(n, p, rng)?;
        let (lhs, rhs) = norm_identity_check(&omega)?;
        Ok(((lhs - rhs).abs(), lhs))
    })?);
    out.push(residual_check(config, "weitzenbock-agreement", 6, |rng| {
        let r = random_curvature_with(dim, 1.0, rng);
        let p = rand::Rng::random_range(rng, 1..=n / 2);
        let op = induce_second_kind(&r);
        let term = curvature_term_with(&r, &op, p)?;
        let oracle = weitzenbock_oracle(&r, p)?;
        Ok((term.max_difference(&oracle), 1.0))
    })?);
    Ok(out)
}

fn kahler_trace_check(config: &RunConfig, m: usize) -> Result<CheckSummary> {
    let j = ComplexStructure::standard(m);
    residual_check(config, "kahler-trace-identities", 7, |rng| {
        let r = claims::kahler_instance(m, rng)?;
        let frame = j.adapted_frame();
        Ok((trace_identities(&r, &j, &frame)?.max(), r.matrix().amax()))
    })
}

fn bochner(
    report: &mut CampaignReport,
    source: &TensorSource,
    p: usize,
    theta: Option<f64>,
) -> Result<()> {
    let r = source.load()?;
    let n = r.n();
    let theta = match theta {
        Some(t) => t,
        None => a_np(n, p)?,
    };
    let cert = betti_certificate(&r, p, theta)?;
    let op = induce_second_kind(&r);
    let term = curvature_term_with(&r, &op, p)?;
    let oracle = weitzenbock_oracle(&r, p)?;
    let diff = term.max_difference(&oracle);
    let mut agree = CheckSummary::new("weitzenbock-agreement", "max entry difference");
    agree.observe(diff, false);
    agree.record(diff <= tol::EIGEN * r.norm().max(1.0), None);
    report.checks.push(agree);

    let a = a_np(n, p)?;
    let mut claim = CheckSummary::new("bochner-nonnegative", "min eigenvalue");
    claim.observe(cert.min_eigenvalue, true);
    if cert.cone.class.is_member() && theta <= a {
        claim.record(cert.class != crate::bochner::Definiteness::Indefinite, None);
    } else {
        claim.skipped += 1;
    }
    report.checks.push(claim);
    report.details = Some(json!({
        "n": n,
        "p": p,
        "theta": theta,
        "a_np": a,
        "certificate": cert,
        "spectrum": spectrum_json(&{
            let mut e = term.eigenvalues();
            e.sort_by(f64::total_cmp);
            e
        }),
    }));
    Ok(())
}

fn kahler(
    report: &mut CampaignReport,
    config: &RunConfig,
    source: &TensorSource,
    alpha: f64,
    theta: Option<f64>,
) -> Result<()> {
    let r = source.load()?;
    if r.n() % 2 != 0 {
        return Err(Error::Config(format!(
            "Kähler diagnostics need even n, got {}",
            r.n()
        )));
    }
    let m = r.n() / 2;
    let theta = match theta {
        Some(t) => t,
        None => b_m_alpha(m, alpha)?,
    };
    let j = ComplexStructure::standard(m);
    let mut rng = rng_for(config.seed.expect("validated"), 0);
    let diag = kahler_cone_diagnostic(&r, &j, alpha, theta, 500, &mut rng)?;
    let traces = trace_identities(&r, &j, &j.adapted_frame())?;
    let mut ids = CheckSummary::new("kahler-trace-identities", "max residual");
    ids.observe(traces.max(), false);
    ids.record(
        traces.max() <= config.tolerances.identity * r.matrix().amax().max(1.0),
        None,
    );
    report.checks.push(ids);
    let mut rigid = CheckSummary::new("kahler-rigidity", "hsc variance");
    rigid.observe(diag.hsc_variance, false);
    if diag.flatness.is_some() || diag.constant_hsc.is_some() {
        rigid.record(diag.passed(), None);
    } else {
        rigid.skipped += 1;
    }
    report.checks.push(rigid);
    report.details = Some(json!({ "diagnostic": diag, "trace_identities": traces }));
    Ok(())
}

fn falsify_into(
    report: &mut CampaignReport,
    config: &RunConfig,
    requested: &[ClaimId],
    n: usize,
) -> Result<()> {
    let list: Vec<ClaimId> = if requested.is_empty() {
        ClaimId::ALL.into_iter().filter(|c| c.supports(n)).collect()
    } else {
        for c in requested {
            if !c.supports(n) {
                return Err(Error::Config(format!(
                    "claim `{}` does not apply in dimension {n}",
                    c.name()
                )));
            }
        }
        requested.to_vec()
    };
    for claim in list {
        let run = run_claim(config, claim, n, true)?;
        let s = &run.summary;
        let note = match (claim.status(), s.failed) {
            (ClaimStatus::Proven, 0) | (ClaimStatus::Open, 0) => format!(
                "{}: no violation among {} samples ({} met the hypothesis); this is not a proof",
                claim.name(),
                s.passed + s.failed + s.skipped,
                s.passed
            ),
            (ClaimStatus::Planted, 0) => {
                format!("{}: planted control was NOT detected", claim.name())
            }
            (ClaimStatus::Planted, k) => format!(
                "{}: planted control detected ({k} violations)",
                claim.name()
            ),
            (ClaimStatus::Open, k) => format!(
                "{}: {k} violations in the open region (finding)",
                claim.name()
            ),
            (ClaimStatus::Proven, k) => {
                format!("{}: {k} violations of a proven claim", claim.name())
            }
        };
        report.notes.push(note);
        report.checks.push(run.summary);
        report.violations.extend(run.violations);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(command: Command) -> RunConfig {
        let mut c = RunConfig::new(command).with_seed(42).with_samples(30);
        c.search = FrameSearch {
            samples: 300,
            starts: 2,
            steps: 60,
        };
        c.refine_steps = 5;
        c
    }

    #[test]
    fn theta_table_for_n4() {
        let report = run(&RunConfig::new(Command::Threshold {
            table: ThresholdTable::Theta,
            size: 4,
            step: 0.5,
        }))
        .unwrap();
        let t = report.table.as_ref().unwrap();
        let row = t.rows.iter().find(|r| r[1] == 3.0).unwrap();
        assert!((row[2] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.rows.len(), 16);
        assert_eq!(report.exit_code(), 0);
        assert!(report.to_tsv().starts_with("n\talpha\ttheta_bar\n"));
    }

    #[test]
    fn cylinder_spectrum_matches() {
        let report = run(&RunConfig::new(Command::Spectrum {
            source: TensorSource::Model(ModelSpec::Cylinder { n: 4 }),
        }))
        .unwrap();
        assert_eq!(report.exit_code(), 0, "{}", report.to_text());
        let cmp = report.check("closed-form-spectrum").unwrap();
        assert_eq!(cmp.passed, 1);
        let clusters = &report.details.as_ref().unwrap()["computed"];
        assert_eq!(clusters.as_array().unwrap().len(), 3);
        assert_eq!(report.check("model-boundaries").unwrap().failed, 0);
    }

    #[test]
    fn sampling_commands_need_a_seed() {
        let c = RunConfig::new(Command::Verify {
            prop: PropGroup::Ricci,
            n: 4,
        });
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn verify_is_deterministic_and_clean() {
        let c = small(Command::Verify {
            prop: PropGroup::All,
            n: 4,
        });
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.exit_code(), 0, "{}", a.to_text());
    }

    #[test]
    fn falsifier_detects_the_planted_claim() {
        let c = small(Command::Falsify {
            claims: vec![ClaimId::PlantedSectional, ClaimId::RicciBound],
            n: 4,
        });
        let report = falsify(&c).unwrap();
        let planted = report.check("planted-sectional").unwrap();
        assert!(planted.failed > 0 && planted.ok());
        assert_eq!(report.check("ricci-bound").unwrap().failed, 0);
        assert!(report
            .violations
            .iter()
            .all(|v| v.claim == ClaimId::PlantedSectional));
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn check_cone_exit_codes() {
        let inside = run(&RunConfig::new(Command::CheckCone {
            source: TensorSource::Model(ModelSpec::Sphere { n: 4, kappa: 1.0 }),
            alpha: 2.0,
            theta: 0.0,
        }))
        .unwrap();
        assert_eq!(inside.exit_code(), 0);
        let outside = run(&RunConfig::new(Command::CheckCone {
            source: TensorSource::Model(ModelSpec::CpFubiniStudy { m: 2, c: 4.0 }),
            alpha: 2.0,
            theta: 0.0,
        }))
        .unwrap();
        assert_eq!(outside.exit_code(), 1);
    }

    #[test]
    fn kahler_and_bochner_commands() {
        let report = run(&small(Command::Kahler {
            source: TensorSource::Model(ModelSpec::CpFubiniStudy { m: 2, c: 4.0 }),
            alpha: 2.0,
            theta: None,
        }))
        .unwrap();
        assert_eq!(report.exit_code(), 0, "{}", report.to_text());
        assert_eq!(report.check("kahler-rigidity").unwrap().passed, 1);

        let spec = crate::models::einstein_sphere_product(6, 2).unwrap();
        let report = run(&RunConfig::new(Command::Bochner {
            source: TensorSource::Model(spec),
            p: 3,
            theta: None,
        }))
        .unwrap();
        assert_eq!(report.exit_code(), 0, "{}", report.to_text());
    }
}
