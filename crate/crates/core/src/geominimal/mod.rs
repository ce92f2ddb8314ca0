//! Variational estimation of the mixed Lp geominimal surface areas.
//!
//! The targets are infima (p >= 0) or suprema (p < 0, p != -n) of
//!   n V_p(K; L)^{n/(n+p)} * (polar-volume factor)
//! over convex competitors. The estimators search restricted families
//! (ellipsoids, low-band planar support functions), so a minimized value is
//! an upper bound of the true infimum and a maximized value a lower bound of
//! the true supremum; every evaluated competitor is strictly feasible, which
//! makes those bound directions unconditional.
//!
//! Estimates for the three factor variants share candidate pools: each later
//! variant in the regime's chain starts from (and absorbs) the witnesses of
//! the earlier one, so the known orderings between the three variants hold
//! for the returned estimates by construction.

mod families;
mod neldermead;
mod objective;

pub use families::CompetitorFamily;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexSupportBody, SmoothBody, StarBody};
use crate::error::{GeoError, Result};
use crate::functionals::{
    lp_curvature, mixed_p_affine, FunctionalValue, Meta, PExponent, PRegime, ValueKind,
};
use crate::scalar::{real, Real};
use crate::sphere::SphereGrid;
use families::FamilySynth;
use objective::GeoObjective;

/// Search configuration for the derivative-free estimators.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub family: CompetitorFamily,
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { family: CompetitorFamily::FourierSupport { k_max: 6 }, starts: 8, max_iters: 400, tol: 1e-8, seed: 0 }
    }
}

impl SearchConfig {
    /// Default family per ambient dimension: planar searches use the Fourier
    /// support family, higher dimensions the ellipsoid family.
    pub fn default_for_dim(dim: usize) -> Self {
        let mut cfg = Self::default();
        if dim != 2 {
            cfg.family = CompetitorFamily::Ellipsoid;
        }
        cfg
    }

    fn validate(&self) -> Result<()> {
        if self.starts < 1 {
            return Err(GeoError::InvalidParameter("starts must be >= 1".into()));
        }
        if self.tol <= 0.0 {
            return Err(GeoError::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartRecord {
    pub label: String,
    pub initial: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Trace {
    pub family: String,
    pub shared_pool: bool,
    pub closed_form: bool,
    pub budget_exhausted: bool,
    pub starts: Vec<StartRecord>,
    pub notes: Vec<String>,
}

/// The optimizing competitor(s) that realize an estimate.
#[derive(Debug, Clone)]
pub enum Witness<T> {
    Convex(Vec<ConvexSupportBody<T>>),
    Star(Vec<StarBody<T>>),
}

/// A one-sided estimate of a geominimal surface area.
#[derive(Debug, Clone)]
pub struct GeoEstimate<T> {
    pub value: FunctionalValue<T>,
    pub witness: Witness<T>,
    pub alpha: u8,
    pub trace: Trace,
    pub(crate) witness_params: Option<Vec<Vec<T>>>,
}

/// The chain order in which the three factor variants are estimated so that
/// pool sharing yields the regime's ordering by construction.
fn chain_for(alpha: u8, regime: PRegime) -> Vec<u8> {
    let full: &[u8] = match regime {
        PRegime::NegLow => &[1, 3, 2],
        _ => &[1, 2, 3],
    };
    let pos = full.iter().position(|a| *a == alpha).expect("alpha in 1..=3");
    full[..=pos].to_vec()
}

struct RawEstimate<T> {
    value: T,
    stacked: Vec<T>,
    records: Vec<StartRecord>,
    exhausted: bool,
    notes: Vec<String>,
}

/// One shared-pool chain pass; returns the raw estimates for every variant in
/// `chain`, in chain order.
#[allow(clippy::too_many_arguments)]
fn run_chain<T: Real>(
    grid: &Arc<SphereGrid<T>>,
    objectives: &dyn Fn(u8) -> GeoObjective<T>,
    candidate_h: &[T],
    p: &PExponent<T>,
    cfg: &SearchConfig,
    chain: &[u8],
    extra_seeds: &[Vec<Vec<T>>],
    seed_salt: u64,
) -> Result<Vec<(u8, RawEstimate<T>)>> {
    let synth = FamilySynth::new(cfg.family, grid.clone())?;
    let plen = synth.param_len();
    let infimum = p.is_infimum_target();
    let candidate_params = synth.project(candidate_h);

    let mut done: Vec<(u8, RawEstimate<T>)> = Vec::new();
    for &a in chain {
        let obj = objectives(a);
        let comp_count = obj.competitor_count();
        let mut starts: Vec<(String, Vec<T>)> = Vec::new();
        starts.push(("ball".into(), replicate(&synth.ball_params(), comp_count)));
        starts.push(("candidate".into(), replicate(&candidate_params, comp_count)));
        // Witnesses of earlier chain members.
        for (prev_alpha, prev) in &done {
            starts.push((
                format!("chain-{prev_alpha}"),
                restack(&prev.stacked, plen, comp_count),
            ));
        }
        for (idx, seed) in extra_seeds.iter().enumerate() {
            if let Some(stacked) = stack_seed(seed, plen, comp_count) {
                starts.push((format!("seed-{idx}"), stacked));
            }
        }
        let n_random = cfg.starts.saturating_sub(2);
        let mut rng = ChaCha12Rng::seed_from_u64(
            cfg.seed ^ (a as u64 ^ seed_salt).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        for r in 0..n_random {
            let base = if r % 2 == 0 { &starts[0].1 } else { &starts[1].1 }.clone();
            let mut params = base;
            for v in params.iter_mut() {
                *v += real::<T>(rng.gen_range(-0.2..0.2));
            }
            // Shrink towards the ball until feasible.
            let ball = replicate(&synth.ball_params(), comp_count);
            for _ in 0..50 {
                if stacked_feasible(&synth, &params, plen) {
                    break;
                }
                for (pv, bv) in params.iter_mut().zip(ball.iter()) {
                    *pv = *bv + (*pv - *bv) * real::<T>(0.7);
                }
            }
            starts.push((format!("random-{r}"), params));
        }

        let sign = if infimum { T::one() } else { -T::one() };
        let results: Vec<(SimplexOutcome<T>, String, T)> = starts
            .par_iter()
            .map(|(label, x0)| {
                let mut eval = |x: &[T]| -> T {
                    match synth_stacked(&synth, x, plen) {
                        Some(hs) => {
                            let refs: Vec<&[T]> = hs.iter().map(|h| h.as_slice()).collect();
                            sign * obj.eval(&refs)
                        }
                        None => T::infinity(),
                    }
                };
                let initial = eval(x0);
                let res = neldermead::minimize(
                    &mut eval,
                    x0,
                    real::<T>(0.1),
                    cfg.max_iters,
                    real::<T>(cfg.tol),
                );
                (
                    SimplexOutcome {
                        best_x: res.best_x,
                        best_f: res.best_f,
                        iterations: res.iterations,
                        converged: res.converged,
                    },
                    label.clone(),
                    initial,
                )
            })
            .collect();

        let mut records = Vec::with_capacity(results.len());
        let mut best: Option<(T, Vec<T>)> = None;
        let mut exhausted = false;
        for (out, label, initial) in results {
            let value = sign * out.best_f;
            records.push(StartRecord {
                label,
                initial: (sign * initial).to_f64().unwrap_or(f64::NAN),
                value: value.to_f64().unwrap_or(f64::NAN),
                iterations: out.iterations,
                converged: out.converged,
            });
            if !out.converged {
                exhausted = true;
            }
            let better = match &best {
                None => out.best_f.is_finite(),
                Some((bv, _)) => out.best_f.is_finite() && (sign * value) < (sign * *bv),
            };
            if better {
                best = Some((value, out.best_x));
            }
        }
        let (mut value, mut stacked) =
            best.ok_or_else(|| GeoError::Degenerate("no feasible start".into()))?;
        let mut notes = vec![format!("chain order {:?}", chain)];

        // Pool sharing: absorb earlier-variant witnesses so the regime's
        // ordering between variants holds by construction.
        if let Some((prev_alpha, prev)) = done.last() {
            let prev_stack = restack(&prev.stacked, plen, comp_count);
            let replicated = prev.stacked.len() != comp_count * plen;
            let absorbed = if replicated {
                // A replicated single witness gives the same objective value
                // in every variant; carry the value over verbatim.
                Some(prev.value)
            } else {
                synth_stacked(&synth, &prev_stack, plen).map(|hs| {
                    let refs: Vec<&[T]> = hs.iter().map(|h| h.as_slice()).collect();
                    obj.eval(&refs)
                })
            };
            if let Some(cand) = absorbed {
                let improves = if infimum { cand < value } else { cand > value };
                if improves {
                    value = cand;
                    stacked = prev_stack.clone();
                    notes.push(format!("absorbed witness of variant {prev_alpha}"));
                }
                // Snap residual rounding so the by-construction ordering is
                // exact: the donor's value is itself a sound bound here.
                let donor = prev.value;
                let out_of_order = if infimum { value > donor } else { value < donor };
                if out_of_order {
                    value = donor;
                    stacked = prev_stack;
                    notes.push(format!("snapped to variant {prev_alpha} witness"));
                }
            }
        }
        done.push((a, RawEstimate { value, stacked, records, exhausted, notes }));
    }
    Ok(done)
}

struct SimplexOutcome<T> {
    best_x: Vec<T>,
    best_f: T,
    iterations: usize,
    converged: bool,
}

fn replicate<T: Clone>(params: &[T], times: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(params.len() * times);
    for _ in 0..times {
        out.extend_from_slice(params);
    }
    out
}

/// Restacks a witness parameter vector for a variant with `comp_count`
/// competitor slots (replicating a shared witness, truncating is never
/// needed because chains only grow or keep the competitor count).
fn restack<T: Clone>(stacked: &[T], plen: usize, comp_count: usize) -> Vec<T> {
    let have = stacked.len() / plen;
    if have == comp_count {
        stacked.to_vec()
    } else if have == 1 {
        replicate(stacked, comp_count)
    } else {
        // A multi-competitor witness seeding a shared-competitor variant:
        // reuse the first competitor.
        replicate(&stacked[..plen], comp_count)
    }
}

fn stack_seed<T: Clone>(seed: &[Vec<T>], plen: usize, comp_count: usize) -> Option<Vec<T>> {
    if seed.iter().any(|s| s.len() != plen) {
        return None;
    }
    if seed.len() == comp_count {
        Some(seed.concat())
    } else if seed.len() == 1 {
        Some(replicate(&seed[0], comp_count))
    } else if seed.len() > 1 && comp_count == 1 {
        Some(seed[0].clone())
    } else {
        None
    }
}

fn synth_stacked<T: Real>(synth: &FamilySynth<T>, stacked: &[T], plen: usize) -> Option<Vec<Vec<T>>> {
    let mut out = Vec::with_capacity(stacked.len() / plen);
    for chunk in stacked.chunks(plen) {
        out.push(synth.synth(chunk)?);
    }
    Some(out)
}

fn stacked_feasible<T: Real>(synth: &FamilySynth<T>, stacked: &[T], plen: usize) -> bool {
    stacked.chunks(plen).all(|chunk| synth.synth(chunk).is_some())
}

fn finalize_estimate<T: Real>(
    grid: &Arc<SphereGrid<T>>,
    obj: &GeoObjective<T>,
    raw: RawEstimate<T>,
    alpha: u8,
    p: &PExponent<T>,
    cfg: &SearchConfig,
    meta_id: &str,
    i: Option<T>,
) -> Result<GeoEstimate<T>> {
    let synth = FamilySynth::new(cfg.family, grid.clone())?;
    let plen = synth.param_len();
    let hs = synth_stacked(&synth, &raw.stacked, plen)
        .ok_or_else(|| GeoError::Degenerate("winning parameters are infeasible".into()))?;
    let refs: Vec<&[T]> = hs.iter().map(|h| h.as_slice()).collect();
    let (_, err) = obj.eval_with_err(&refs);
    let kind =
        if p.is_infimum_target() { ValueKind::OptimizerUpperBound } else { ValueKind::OptimizerLowerBound };
    let meta = Meta {
        id: meta_id.to_string(),
        p: p.p().to_f64(),
        i: i.and_then(|v| v.to_f64()),
        resolution: grid.resolution(),
        condition: None,
    };
    let mut witnesses = Vec::new();
    let mut params = Vec::new();
    for chunk in raw.stacked.chunks(plen) {
        witnesses.push(families::body_from_params(&synth, grid, chunk)?);
        params.push(chunk.to_vec());
    }
    Ok(GeoEstimate {
        value: FunctionalValue { value: raw.value, kind, err, meta },
        witness: Witness::Convex(witnesses),
        alpha,
        trace: Trace {
            family: cfg.family.label(),
            shared_pool: true,
            closed_form: false,
            budget_exhausted: raw.exhausted,
            starts: raw.records,
            notes: raw.notes,
        },
    witness_params: Some(params),
    })
}

fn closed_form_estimate<T: Real>(
    grid: &Arc<SphereGrid<T>>,
    value: FunctionalValue<T>,
    alpha: u8,
    cfg: &SearchConfig,
) -> Result<GeoEstimate<T>> {
    let ball = crate::bodies::make_ball(grid, T::one())?;
    Ok(GeoEstimate {
        value,
        witness: Witness::Convex(vec![ball.support().clone()]),
        alpha,
        trace: Trace {
            family: cfg.family.label(),
            shared_pool: false,
            closed_form: true,
            budget_exhausted: false,
            starts: vec![],
            notes: vec!["p = 0 closed form; competitors are irrelevant".into()],
        },
        witness_params: None,
    })
}

fn validate_bodies<T: Real>(ks: &[&SmoothBody<T>], p: &PExponent<T>) -> Result<Arc<SphereGrid<T>>> {
    let first = ks.first().ok_or_else(|| GeoError::InvalidParameter("empty body list".into()))?;
    let grid = first.grid();
    if p.dim() != grid.dim() {
        return Err(GeoError::DimensionMismatch { expected: grid.dim(), got: p.dim() });
    }
    for k in ks {
        crate::functionals::require_same_grid(grid, k.grid())?;
    }
    Ok(grid.clone())
}

/// The candidate support (prod_i f_p(K_i))^{-1/n(n+p)}-style closed form: the
/// support function whose polar is the unconstrained variational optimizer.
fn multi_candidate_h<T: Real>(ks: &[&SmoothBody<T>], p: &PExponent<T>) -> Vec<T> {
    let grid = ks[0].grid();
    let n = real::<T>(grid.dim() as f64);
    let np = n + p.p();
    let inv_n = T::one() / n;
    let mut log_mean = vec![T::zero(); grid.node_count()];
    for k in ks {
        let fp = lp_curvature(k, p);
        for (acc, f) in log_mean.iter_mut().zip(fp.iter()) {
            *acc += f.ln() * inv_n;
        }
    }
    log_mean.iter().map(|s| (-*s / np).exp()).collect()
}

fn weighted_candidate_h<T: Real>(k: &SmoothBody<T>, l: &SmoothBody<T>, p: &PExponent<T>, i: T) -> Vec<T> {
    let grid = k.grid();
    let n = real::<T>(grid.dim() as f64);
    let np = n + p.p();
    let w1 = (n - i) / n;
    let w2 = i / n;
    let fp_k = lp_curvature(k, p);
    let fp_l = lp_curvature(l, p);
    fp_k.iter()
        .zip(fp_l.iter())
        .map(|(fk, fl)| (-(w1 * fk.ln() + w2 * fl.ln()) / np).exp())
        .collect()
}

/// Membership test for the class where the geometric-mean Lp curvature is a
/// negative power of a support function. Returns the candidate support when
/// it is positive and (planar) convex; absence is a value, not an error.
pub fn vpn_test<T: Real>(ks: &[&SmoothBody<T>], p: &PExponent<T>) -> Result<Option<ConvexSupportBody<T>>> {
    let grid = validate_bodies(ks, p)?;
    if p.regime() == PRegime::Zero {
        return Err(GeoError::InvalidParameter("the class test is undefined at p = 0".into()));
    }
    if ks.len() != grid.dim() {
        return Err(GeoError::ArityViolation(format!("need {} bodies, got {}", grid.dim(), ks.len())));
    }
    let h = multi_candidate_h(ks, p);
    let body = ConvexSupportBody::new(grid.clone(), h)?;
    if grid.dim() == 2 {
        let curv = body.curvature_samples()?;
        let mean_h = body.h().iter().copied().sum::<T>() / real::<T>(body.h().len() as f64);
        let floor = -real::<T>(1e-9) * mean_h;
        if curv.iter().any(|c| *c < floor) {
            return Ok(None);
        }
    }
    Ok(Some(body))
}

/// Evaluates the geominimal objective at explicit competitors (one for
/// alpha = 1, n for alpha = 2 or 3).
pub fn objective<T: Real>(
    alpha: u8,
    ks: &[&SmoothBody<T>],
    competitors: &[&ConvexSupportBody<T>],
    p: &PExponent<T>,
) -> Result<T> {
    let grid = validate_bodies(ks, p)?;
    if !(1..=3).contains(&alpha) {
        return Err(GeoError::InvalidParameter("alpha must be 1, 2 or 3".into()));
    }
    if ks.len() != grid.dim() {
        return Err(GeoError::ArityViolation(format!("need {} bodies, got {}", grid.dim(), ks.len())));
    }
    let expected = if alpha == 1 { 1 } else { grid.dim() };
    if competitors.len() != expected {
        return Err(GeoError::ArityViolation(format!(
            "variant {alpha} takes {expected} competitor(s), got {}",
            competitors.len()
        )));
    }
    for c in competitors {
        crate::functionals::require_same_grid(&grid, c.grid())?;
    }
    let obj = GeoObjective::multi(alpha, ks, p);
    let hs: Vec<&[T]> = competitors.iter().map(|c| c.h()).collect();
    Ok(obj.eval(&hs))
}

/// The i-weighted objective at explicit competitors (q2 ignored for
/// alpha = 1).
pub fn objective_i<T: Real>(
    alpha: u8,
    k: &SmoothBody<T>,
    l: &SmoothBody<T>,
    q1: &ConvexSupportBody<T>,
    q2: &ConvexSupportBody<T>,
    p: &PExponent<T>,
    i: T,
) -> Result<T> {
    let obj = GeoObjective::weighted(alpha, k, l, p, i);
    if alpha == 1 {
        Ok(obj.eval(&[q1.h()]))
    } else {
        Ok(obj.eval(&[q1.h(), q2.h()]))
    }
}

/// Estimates the mixed geominimal surface area for one factor variant.
pub fn estimate_g<T: Real>(
    alpha: u8,
    ks: &[&SmoothBody<T>],
    p: &PExponent<T>,
    cfg: &SearchConfig,
) -> Result<GeoEstimate<T>> {
    estimate_g_with_seeds(alpha, ks, p, cfg, &[])
}

pub(crate) fn estimate_g_with_seeds<T: Real>(
    alpha: u8,
    ks: &[&SmoothBody<T>],
    p: &PExponent<T>,
    cfg: &SearchConfig,
    extra_seeds: &[Vec<Vec<T>>],
) -> Result<GeoEstimate<T>> {
    cfg.validate()?;
    let grid = validate_bodies(ks, p)?;
    if !(1..=3).contains(&alpha) {
        return Err(GeoError::InvalidParameter("alpha must be 1, 2 or 3".into()));
    }
    if ks.len() != grid.dim() {
        return Err(GeoError::ArityViolation(format!("need {} bodies, got {}", grid.dim(), ks.len())));
    }
    if p.regime() == PRegime::Zero {
        let mut value = mixed_p_affine(ks, p)?;
        value.meta.id = "estimate_g".into();
        return closed_form_estimate(&grid, value, alpha, cfg);
    }
    let chain = chain_for(alpha, p.regime());
    let candidate = multi_candidate_h(ks, p);
    let ks_owned: Vec<&SmoothBody<T>> = ks.to_vec();
    let objectives = move |a: u8| GeoObjective::multi(a, &ks_owned, p);
    let mut raws = run_chain(&grid, &objectives, &candidate, p, cfg, &chain, extra_seeds, 0)?;
    let (_, raw) = raws.pop().expect("chain returned the target variant");
    let obj = GeoObjective::multi(alpha, ks, p);
    finalize_estimate(&grid, &obj, raw, alpha, p, cfg, "estimate_g", None)
}

/// Estimates all three factor variants in one shared-pool chain pass.
pub fn estimate_g_all<T: Real>(
    ks: &[&SmoothBody<T>],
    p: &PExponent<T>,
    cfg: &SearchConfig,
) -> Result<[GeoEstimate<T>; 3]> {
    cfg.validate()?;
    let grid = validate_bodies(ks, p)?;
    if ks.len() != grid.dim() {
        return Err(GeoError::ArityViolation(format!("need {} bodies, got {}", grid.dim(), ks.len())));
    }
    if p.regime() == PRegime::Zero {
        let mut value = mixed_p_affine(ks, p)?;
        value.meta.id = "estimate_g".into();
        let one = closed_form_estimate(&grid, value.clone(), 1, cfg)?;
        let two = closed_form_estimate(&grid, value.clone(), 2, cfg)?;
        let three = closed_form_estimate(&grid, value, 3, cfg)?;
        return Ok([one, two, three]);
    }
    let last = if p.regime() == PRegime::NegLow { 2 } else { 3 };
    let chain = chain_for(last, p.regime());
    let candidate = multi_candidate_h(ks, p);
    let ks_owned: Vec<&SmoothBody<T>> = ks.to_vec();
    let objectives = move |a: u8| GeoObjective::multi(a, &ks_owned, p);
    let raws = run_chain(&grid, &objectives, &candidate, p, cfg, &chain, &[], 0)?;
    let mut out: Vec<GeoEstimate<T>> = Vec::with_capacity(3);
    let mut sorted = raws;
    sorted.sort_by_key(|(a, _)| *a);
    for (a, raw) in sorted {
        let obj = GeoObjective::multi(a, ks, p);
        out.push(finalize_estimate(&grid, &obj, raw, a, p, cfg, "estimate_g", None)?);
    }
    let [one, two, three]: [GeoEstimate<T>; 3] =
        out.try_into().map_err(|_| GeoError::Degenerate("chain variant missing".into()))?;
    Ok([one, two, three])
}

/// Single-body geominimal surface area: the shared-competitor variant on n
/// copies of the body.
pub fn estimate_gtilde<T: Real>(
    k: &SmoothBody<T>,
    p: &PExponent<T>,
    cfg: &SearchConfig,
) -> Result<GeoEstimate<T>> {
    estimate_gtilde_with_seeds(k, p, cfg, &[])
}

pub(crate) fn estimate_gtilde_with_seeds<T: Real>(
    k: &SmoothBody<T>,
    p: &PExponent<T>,
    cfg: &SearchConfig,
    extra_seeds: &[Vec<Vec<T>>],
) -> Result<GeoEstimate<T>> {
    let ks: Vec<&SmoothBody<T>> = vec![k; k.grid().dim()];
    estimate_g_with_seeds(1, &ks, p, cfg, extra_seeds)
}

/// Estimates the i-th mixed geominimal surface area of a body pair.
pub fn estimate_g_i<T: Real>(
    alpha: u8,
    k: &SmoothBody<T>,
    l: &SmoothBody<T>,
    p: &PExponent<T>,
    i: T,
    cfg: &SearchConfig,
) -> Result<GeoEstimate<T>> {
    estimate_g_i_with_seeds(alpha, k, l, p, i, cfg, &[])
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn estimate_g_i_with_seeds<T: Real>(
    alpha: u8,
    k: &SmoothBody<T>,
    l: &SmoothBody<T>,
    p: &PExponent<T>,
    i: T,
    cfg: &SearchConfig,
    extra_seeds: &[Vec<Vec<T>>],
) -> Result<GeoEstimate<T>> {
    cfg.validate()?;
    let grid = validate_bodies(&[k, l], p)?;
    if !(1..=3).contains(&alpha) {
        return Err(GeoError::InvalidParameter("alpha must be 1, 2 or 3".into()));
    }
    let n = real::<T>(grid.dim() as f64);
    // The weight endpoints reduce exactly to the single-body estimate.
    if i == T::zero() {
        return estimate_gtilde_with_seeds(k, p, cfg, extra_seeds);
    }
    if i == n {
        return estimate_gtilde_with_seeds(l, p, cfg, extra_seeds);
    }
    if p.regime() == PRegime::Zero {
        let mut value = crate::functionals::asp_i(k, l, p, i)?;
        value.meta.id = "estimate_g_i".into();
        return closed_form_estimate(&grid, value, alpha, cfg);
    }
    let chain = chain_for(alpha, p.regime());
    let candidate = weighted_candidate_h(k, l, p, i);
    let objectives = move |a: u8| GeoObjective::weighted(a, k, l, p, i);
    let salt = 0x1000 + (i.to_f64().unwrap_or(0.0).to_bits() & 0xFFFF);
    let mut raws = run_chain(&grid, &objectives, &candidate, p, cfg, &chain, extra_seeds, salt)?;
    let (_, raw) = raws.pop().expect("chain returned the target variant");
    let obj = GeoObjective::weighted(alpha, k, l, p, i);
    finalize_estimate(&grid, &obj, raw, alpha, p, cfg, "estimate_g_i", Some(i))
}

/// Coordinate-ascent lower bound of the tuple-competitor affine surface area
/// for p < -n: the supremum over per-body star competitors of
///   n V_p(K; L°)^{n/(n+p)} prod_i |L_i|^{p/(n(n+p))}.
pub fn estimate_asp1<T: Real>(
    ks: &[&SmoothBody<T>],
    p: &PExponent<T>,
    cfg: &SearchConfig,
) -> Result<GeoEstimate<T>> {
    cfg.validate()?;
    if cfg.family != CompetitorFamily::RadialGrid {
        return Err(GeoError::InvalidParameter(
            "tuple-competitor estimation requires the radial-grid family".into(),
        ));
    }
    if p.regime() != PRegime::NegLow {
        return Err(GeoError::InvalidParameter("tuple-competitor estimation requires p < -n".into()));
    }
    let grid = validate_bodies(ks, p)?;
    let n_dim = grid.dim();
    if ks.len() != n_dim {
        return Err(GeoError::ArityViolation(format!("need {n_dim} bodies, got {}", ks.len())));
    }
    let n = real::<T>(n_dim as f64);
    let np = n + p.p();
    let count = grid.node_count();
    let inv_n = T::one() / n;

    // Mean log curvature and the decoupled initial competitors
    // log rho_i = ln f_p(K_i) / (n + p).
    let mut mean_log_fp = vec![T::zero(); count];
    let mut log_rhos: Vec<Vec<T>> = Vec::with_capacity(n_dim);
    for k in ks {
        let fp = lp_curvature(k, p);
        for (acc, f) in mean_log_fp.iter_mut().zip(fp.iter()) {
            *acc += f.ln() * inv_n;
        }
        log_rhos.push(fp.iter().map(|f| f.ln() / np).collect());
    }

    let eval = |log_rhos: &[Vec<T>]| -> T {
        let mut v = T::zero();
        for j in 0..count {
            let mut exponent = mean_log_fp[j];
            for lr in log_rhos {
                exponent -= p.p() * inv_n * lr[j];
            }
            v += grid.weights()[j] * exponent.exp();
        }
        v /= n;
        let mut obj = n * v.powf(n / np);
        for lr in log_rhos {
            let mut vol = T::zero();
            for j in 0..count {
                vol += grid.weights()[j] * (n * lr[j]).exp();
            }
            vol /= n;
            obj *= vol.powf(p.p() / (n * np));
        }
        obj
    };

    let mut current = eval(&log_rhos);
    let initial = current;
    let mut sweeps = 0usize;
    let mut budget_exhausted = false;
    // Stationary exponent of the per-coordinate update; degenerate when
    // n^2 + p vanishes, in which case the initial competitors stand.
    let n2p = n * n + p.p();
    let mut notes = vec![];
    if n2p.abs() > real::<T>(1e-6) {
        let update_exp = n / n2p;
        'outer: for sweep in 0..cfg.max_iters {
            sweeps = sweep + 1;
            let before_sweep = current;
            for idx in 0..n_dim {
                // log of the frozen-part integrand for this coordinate.
                let mut candidate = vec![T::zero(); count];
                for j in 0..count {
                    let mut lg = mean_log_fp[j];
                    for (other, lr) in log_rhos.iter().enumerate() {
                        if other != idx {
                            lg -= p.p() * inv_n * lr[j];
                        }
                    }
                    candidate[j] = update_exp * lg;
                }
                // Accept the stationary update or a log-space blend of it,
                // whichever improves the supremum estimate.
                let old = log_rhos[idx].clone();
                let mut accepted = false;
                for &lam in &[1.0, 0.5, 0.25] {
                    let lam_t = real::<T>(lam);
                    for j in 0..count {
                        log_rhos[idx][j] = old[j] + lam_t * (candidate[j] - old[j]);
                    }
                    let trial = eval(&log_rhos);
                    if trial > current {
                        current = trial;
                        accepted = true;
                        break;
                    }
                }
                if !accepted {
                    log_rhos[idx] = old;
                }
            }
            let gain = current - before_sweep;
            if gain <= real::<T>(cfg.tol) * current.abs() {
                break 'outer;
            }
            if sweep + 1 == cfg.max_iters {
                budget_exhausted = true;
            }
        }
    } else {
        notes.push("stationary update degenerate at p = -n^2; initial competitors kept".into());
    }

    // Error estimate from the component quadratures at the witness.
    let v_samples: Vec<T> = (0..count)
        .map(|j| {
            let mut exponent = mean_log_fp[j];
            for lr in &log_rhos {
                exponent -= p.p() * inv_n * lr[j];
            }
            exponent.exp()
        })
        .collect();
    let (v_raw, v_err) = grid.integrate_with_err(&v_samples)?;
    let mut rel_err = (n / np).abs() * (v_err / v_raw);
    let mut witnesses = Vec::with_capacity(n_dim);
    for lr in &log_rhos {
        let rho: Vec<T> = lr.iter().map(|v| v.exp()).collect();
        let vol_samples: Vec<T> = rho.iter().map(|r| r.powi(n_dim as i32)).collect();
        let (vol_raw, vol_err) = grid.integrate_with_err(&vol_samples)?;
        rel_err += (p.p() / (n * np)).abs() * (vol_err / vol_raw);
        witnesses.push(StarBody::new(grid.clone(), rho)?);
    }

    notes.push(format!("coordinate ascent: {} -> {} in {} sweeps", initial, current, sweeps));
    Ok(GeoEstimate {
        value: FunctionalValue {
            value: current,
            kind: ValueKind::OptimizerLowerBound,
            err: rel_err * current.abs(),
            meta: Meta {
                id: "estimate_asp1".into(),
                p: p.p().to_f64(),
                i: None,
                resolution: grid.resolution(),
                condition: None,
            },
        },
        witness: Witness::Star(witnesses),
        alpha: 1,
        trace: Trace {
            family: CompetitorFamily::RadialGrid.label(),
            shared_pool: false,
            closed_form: false,
            budget_exhausted,
            starts: vec![],
            notes,
        },
        witness_params: None,
    })
}
