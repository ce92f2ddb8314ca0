//! Inequality verification harness.
//!
//! Every theorem relating the functionals is a rule with a stable id. A
//! check realizes deterministic input bodies from a case recipe, computes
//! both sides with their error semantics, and returns a verdict:
//!
//! - `verified`: the strongest sound comparison available passed;
//! - `violated`: a sound certificate shows the relation fails (finalized
//!   only after an automatic re-check at doubled resolution);
//! - `inconclusive`: the estimator sat on the unfavorable side and its bound
//!   was too loose to decide;
//! - `logged`: report-only rules involving the unknown universal constant of
//!   the inverse Santalo inequality record the product without judging it.

mod bound;
mod checks;

pub use bound::{Bound, Comparison, FailClass, Relation, Side};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::functionals::FunctionalValue;
use crate::geominimal::SearchConfig;
use crate::schema::BodySpec;
use crate::sphere::SphereGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Affine,
    Order,
    AsRel,
    Prop31,
    Thm41,
    Thm42,
    Prop32,
    Af1,
    Af2,
    Iso,
    Santalo,
    Cor51,
    Cor52,
    Cyclic,
    Mono,
    DualH,
    Vph,
    Prop61,
    IthCyc,
    IthIso,
}

impl RuleId {
    pub const ALL: [RuleId; 20] = [
        RuleId::Affine,
        RuleId::Order,
        RuleId::AsRel,
        RuleId::Prop31,
        RuleId::Thm41,
        RuleId::Thm42,
        RuleId::Prop32,
        RuleId::Af1,
        RuleId::Af2,
        RuleId::Iso,
        RuleId::Santalo,
        RuleId::Cor51,
        RuleId::Cor52,
        RuleId::Cyclic,
        RuleId::Mono,
        RuleId::DualH,
        RuleId::Vph,
        RuleId::Prop61,
        RuleId::IthCyc,
        RuleId::IthIso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Affine => "AFFINE",
            RuleId::Order => "ORDER",
            RuleId::AsRel => "ASREL",
            RuleId::Prop31 => "PROP31",
            RuleId::Thm41 => "THM41",
            RuleId::Thm42 => "THM42",
            RuleId::Prop32 => "PROP32",
            RuleId::Af1 => "AF1",
            RuleId::Af2 => "AF2",
            RuleId::Iso => "ISO",
            RuleId::Santalo => "SANTALO",
            RuleId::Cor51 => "COR51",
            RuleId::Cor52 => "COR52",
            RuleId::Cyclic => "CYCLIC",
            RuleId::Mono => "MONO",
            RuleId::DualH => "DUALH",
            RuleId::Vph => "VPH",
            RuleId::Prop61 => "PROP61",
            RuleId::IthCyc => "ITHCYC",
            RuleId::IthIso => "ITHISO",
        }
    }

    /// Human description of what the rule tests.
    pub fn description(self) -> &'static str {
        match self {
            RuleId::Affine => "geominimal covariance under linear maps",
            RuleId::Order => "three-variant ordering by shared-pool construction",
            RuleId::AsRel => "affine surface area versus geominimal estimates",
            RuleId::Prop31 => "variational forms agree and the closed-form optimizer wins",
            RuleId::Thm41 => "dual-factor estimate equals the affine surface area on class inputs",
            RuleId::Thm42 => "all admitted variants equal the affine surface area on tuple-class inputs",
            RuleId::Prop32 => "affine surface area through curvature images",
            RuleId::Af1 => "Alexander-Fenchel chain for the estimates, -n < p < 0",
            RuleId::Af2 => "multi estimate against the product of single-body estimates",
            RuleId::Iso => "isoperimetric volume-ratio bounds",
            RuleId::Santalo => "polar-product bound (report-only below -n)",
            RuleId::Cor51 => "containment bounds against an ellipsoid",
            RuleId::Cor52 => "p-surface-area bounds",
            RuleId::Cyclic => "three-exponent cyclic bound",
            RuleId::Mono => "exponent monotonicity of normalized estimates",
            RuleId::DualH => "dual mixed volume Hoelder bounds",
            RuleId::Vph => "multi p-mixed volume Hoelder chain",
            RuleId::Prop61 => "weighted affine surface area closed-form optimizer",
            RuleId::IthCyc => "weight-index cyclic bound",
            RuleId::IthIso => "weighted isoperimetric bounds",
        }
    }

    /// Verifiability class, derivable from where the estimators sit.
    pub fn verifiability(self) -> Verifiability {
        match self {
            RuleId::DualH | RuleId::Vph | RuleId::Prop32 | RuleId::Prop61 | RuleId::Prop31 => {
                Verifiability::TwoSided
            }
            RuleId::Order
            | RuleId::Af1
            | RuleId::Af2
            | RuleId::Cyclic
            | RuleId::Mono
            | RuleId::IthCyc => Verifiability::Structural,
            RuleId::Santalo | RuleId::IthIso => Verifiability::OneSidedWithReportOnly,
            _ => Verifiability::OneSided,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        RuleId::ALL
            .iter()
            .find(|r| r.name() == upper)
            .copied()
            .ok_or_else(|| GeoError::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verifiability {
    TwoSided,
    OneSided,
    OneSidedWithReportOnly,
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Logged,
    Verified,
    Inconclusive,
    Violated,
}

/// Deterministic description of one check instance; bodies are realized
/// from the seed at whatever resolution the check runs at, which is what
/// makes escalation to a doubled resolution possible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecipe {
    pub rule: RuleId,
    pub dim: usize,
    pub body_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u8>,
    /// Extra exponents (cyclic triples, monotonicity pairs).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<f64>,
    /// Whether this case realizes a stated equality configuration.
    #[serde(default)]
    pub equality: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputsDesc {
    pub bodies: Vec<BodySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub lhs_err: f64,
    pub rhs_err: f64,
}

/// Outcome of one rule check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictReport {
    pub rule: String,
    pub recipe: CaseRecipe,
    pub inputs: InputsDesc,
    pub lhs: FunctionalValue<f64>,
    pub rhs: FunctionalValue<f64>,
    pub verdict: Verdict,
    /// Signed relative satisfaction margin of the tightest comparison.
    pub slack: f64,
    pub tolerances: Tolerances,
    pub escalated: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Tallies {
    pub verified: usize,
    pub inconclusive: usize,
    pub violated: usize,
    pub logged: usize,
    pub skipped: usize,
}

impl Tallies {
    fn add(&mut self, verdict: Verdict) {
        match verdict {
            Verdict::Verified => self.verified += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Logged => self.logged += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub resolution: usize,
    pub cases: Vec<VerdictReport>,
    pub tallies: Tallies,
    pub per_rule: BTreeMap<String, Tallies>,
}

/// Harness-wide configuration.
#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub resolution: usize,
    pub search: SearchConfig,
    /// Automatic re-check at doubled resolution before finalizing a
    /// violation.
    pub escalate: bool,
    pub ps: Vec<f64>,
    pub is: Vec<f64>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            resolution: 256,
            search: SearchConfig::default(),
            escalate: true,
            ps: vec![],
            is: vec![],
        }
    }
}

impl HarnessConfig {
    /// The sampled exponents: explicit list, or the default set
    /// {1, 2, 5, 0.5, -0.5, -1, -n-1, -2n}.
    pub fn p_list(&self, dim: usize) -> Vec<f64> {
        if !self.ps.is_empty() {
            return self.ps.clone();
        }
        let n = dim as f64;
        vec![1.0, 2.0, 5.0, 0.5, -0.5, -1.0, -n - 1.0, -2.0 * n]
    }

    /// The sampled weight indices: explicit list, or {-1, 0, n/2, n, n+1}.
    pub fn i_list(&self, dim: usize) -> Vec<f64> {
        if !self.is.is_empty() {
            return self.is.clone();
        }
        let n = dim as f64;
        vec![-1.0, 0.0, 0.5 * n, n, n + 1.0]
    }
}

/// Outcome of evaluating a rule body at one resolution.
pub(crate) struct CheckOutcome {
    pub inputs: InputsDesc,
    pub comparisons: Vec<Comparison>,
    /// Report-only quantities, logged without a verdict.
    pub logged: Vec<(String, f64, f64)>,
    pub notes: Vec<String>,
    pub skipped: Option<String>,
}

/// Runs a rule check: evaluate, and if a violation shows up, re-check at
/// doubled resolution before finalizing.
pub fn check(recipe: &CaseRecipe, cfg: &HarnessConfig) -> Result<VerdictReport> {
    let outcome = checks::run(recipe, cfg, cfg.resolution)?;
    let (verdict, report) = summarize(recipe, cfg, outcome, cfg.resolution, false)?;
    if verdict == Verdict::Violated && cfg.escalate {
        let outcome = checks::run(recipe, cfg, cfg.resolution * 2)?;
        let (esc_verdict, mut esc_report) = summarize(recipe, cfg, outcome, cfg.resolution * 2, true)?;
        if esc_verdict == Verdict::Violated {
            esc_report.notes.push("violation persisted at doubled resolution".into());
            return Ok(esc_report);
        }
        // The violation washed out under refinement: report the refined
        // verdict and keep the escalation trail.
        esc_report.notes.push("initial violation did not survive doubled resolution".into());
        return Ok(esc_report);
    }
    Ok(report)
}

fn summarize(
    recipe: &CaseRecipe,
    _cfg: &HarnessConfig,
    outcome: CheckOutcome,
    resolution: usize,
    escalated: bool,
) -> Result<(Verdict, VerdictReport)> {
    let mut notes = outcome.notes;
    if let Some(reason) = outcome.skipped {
        notes.push(format!("skipped: {reason}"));
        let zero = Bound::exact(0.0);
        let report = VerdictReport {
            rule: recipe.rule.name().to_string(),
            recipe: recipe.clone(),
            inputs: outcome.inputs,
            lhs: zero.to_value("skipped", resolution),
            rhs: zero.to_value("skipped", resolution),
            verdict: Verdict::Logged,
            slack: 0.0,
            tolerances: Tolerances { rel_tol: 0.0, lhs_err: 0.0, rhs_err: 0.0 },
            escalated,
            notes,
        };
        return Ok((Verdict::Logged, report));
    }

    let mut verdict = Verdict::Logged;
    let mut tightest: Option<&Comparison> = None;
    for cmp in &outcome.comparisons {
        let v = if cmp.passes() {
            Verdict::Verified
        } else {
            match cmp.on_fail {
                FailClass::Inconclusive => Verdict::Inconclusive,
                FailClass::Violated => Verdict::Violated,
            }
        };
        if v > verdict {
            verdict = v;
        }
        notes.push(format!(
            "{}: {} {} {} (slack {:+.3e}{})",
            cmp.label,
            cmp.lhs.value,
            cmp.relation.symbol(),
            cmp.rhs.value,
            cmp.slack(),
            if cmp.passes() { "" } else { ", FAILED" },
        ));
        let replace = match tightest {
            None => true,
            Some(t) => cmp.slack() < t.slack(),
        };
        if replace {
            tightest = Some(cmp);
        }
    }
    for (label, value, reference) in &outcome.logged {
        notes.push(format!("logged {label}: {value} (reference {reference})"));
    }
    if outcome.comparisons.is_empty() {
        verdict = Verdict::Logged;
    }

    let (lhs, rhs, slack, tol) = match tightest {
        Some(cmp) => (
            cmp.lhs.to_value("lhs", resolution),
            cmp.rhs.to_value("rhs", resolution),
            cmp.slack(),
            Tolerances { rel_tol: cmp.rel_tol, lhs_err: cmp.lhs.err, rhs_err: cmp.rhs.err },
        ),
        None => {
            let (label, value, reference) =
                outcome.logged.first().cloned().unwrap_or(("empty".into(), 0.0, 0.0));
            (
                Bound::exact(value).to_value(&label, resolution),
                Bound::exact(reference).to_value("reference", resolution),
                0.0,
                Tolerances { rel_tol: 0.0, lhs_err: 0.0, rhs_err: 0.0 },
            )
        }
    };

    let report = VerdictReport {
        rule: recipe.rule.name().to_string(),
        recipe: recipe.clone(),
        inputs: outcome.inputs,
        lhs,
        rhs,
        verdict,
        slack,
        tolerances: tol,
        escalated,
        notes,
    };
    Ok((verdict, report))
}

/// Runs `count` generated cases per rule and aggregates the verdicts.
/// Deterministic for a fixed seed; cases run concurrently and merge by
/// index.
pub fn fuzz_suite(
    rules: &[RuleId],
    count: usize,
    seed: u64,
    dims: &[usize],
    cfg: &HarnessConfig,
) -> Result<SuiteReport> {
    let mut recipes: Vec<CaseRecipe> = Vec::new();
    for rule in rules {
        for dim in dims {
            recipes.extend(checks::recipes(*rule, *dim, count, seed, cfg));
        }
    }
    let results: Vec<Result<VerdictReport>> =
        recipes.par_iter().map(|recipe| check(recipe, cfg)).collect();

    let mut cases = Vec::with_capacity(results.len());
    let mut tallies = Tallies::default();
    let mut per_rule: BTreeMap<String, Tallies> = BTreeMap::new();
    for (result, recipe) in results.into_iter().zip(recipes.iter()) {
        // Individual check failures are recorded, not thrown.
        let report = result.unwrap_or_else(|e| {
            let zero = Bound::exact(0.0);
            VerdictReport {
                rule: recipe.rule.name().to_string(),
                recipe: recipe.clone(),
                inputs: InputsDesc { bodies: vec![], p: recipe.p, i: recipe.i, alpha: recipe.alpha, aux: recipe.aux.clone() },
                lhs: zero.to_value("error", cfg.resolution),
                rhs: zero.to_value("error", cfg.resolution),
                verdict: Verdict::Logged,
                slack: 0.0,
                tolerances: Tolerances { rel_tol: 0.0, lhs_err: 0.0, rhs_err: 0.0 },
                escalated: false,
                notes: vec![format!("skipped: check errored: {e}")],
            }
        });
        tallies.add(report.verdict);
        per_rule.entry(report.rule.clone()).or_default().add(report.verdict);
        if report.notes.iter().any(|n| n.starts_with("skipped:")) {
            tallies.skipped += 1;
            per_rule.entry(report.rule.clone()).or_default().skipped += 1;
        }
        cases.push(report);
    }
    Ok(SuiteReport {
        schema: 1,
        suite: rules.iter().map(|r| r.name()).collect::<Vec<_>>().join(","),
        seed,
        resolution: cfg.resolution,
        cases,
        tallies,
        per_rule,
    })
}

pub(crate) fn grid_for(dim: usize, resolution: usize, seed: u64) -> Result<Arc<SphereGrid<f64>>> {
    let seed_opt = if dim >= 4 { Some(seed) } else { None };
    SphereGrid::for_dim(dim, resolution, seed_opt)
}
