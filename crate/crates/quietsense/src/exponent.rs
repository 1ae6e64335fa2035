//! Error-exponent optimization: fractional programs over the probe simplex.
//!
//! Every exponent in this crate has the same shape: maximize, over probe
//! profiles on the non-null actions, a concave divergence rate divided by
//! (the square root of) a convex chi-square covertness price. The plain
//! non-covert exponents are the same programs with the denominator struck
//! out.
//!
//! Two independent solution paths are kept side by side on purpose:
//!
//! * [`grid_maximize`] brute-forces a lattice on the (floored) simplex. It
//!   is slow, has no tunable state, and is therefore trusted as the oracle.
//! * The production solver runs Dinkelbach iterations (maximize
//!   `f - lambda * g`, update `lambda = f/g`, repeat) with a projected
//!   subgradient inner loop, then a deterministic pairwise pattern search
//!   that polishes the ratio directly. Its results must track the oracle;
//!   the test suite enforces that on randomized instances.
//!
//! Covertness budgets enter only through the `sqrt(2 * eta)` prefactor, so
//! solutions scale exactly as `sqrt(eta)`.

use crate::model::{GaussianBanditModel, HypothesisModel};
use crate::prob::{self, EffectiveActionDist};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Chi-square values at or below this are treated as a vanished
/// denominator: the fractional program is undefined there.
pub const DEGENERATE_CHI2: f64 = 1e-14;

/// Two candidate optima within this of each other count as a tie and are
/// broken toward the lowest label, with a note in the solver trace.
const TIE_TOL: f64 = 1e-12;

/// Budgets and tolerances for the fractional-program solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Dinkelbach (outer) iteration cap.
    pub max_outer: usize,
    /// Projected-subgradient steps per outer iteration.
    pub max_inner: usize,
    /// Outer convergence threshold on the Dinkelbach residual
    /// `max_p [f(p) - lambda g(p)]`.
    pub tolerance: f64,
    /// Rounds of the pairwise pattern-search polish (each shrinks the
    /// search radius by 5x). Zero disables polishing.
    pub polish_rounds: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_outer: 200,
            max_inner: 5000,
            tolerance: 1e-10,
            polish_rounds: 9,
        }
    }
}

impl SolverOptions {
    /// A small budget for per-step re-solves inside policies, where the
    /// previous optimum is a warm start and the instance barely moved.
    pub fn warm_refresh() -> Self {
        SolverOptions {
            max_outer: 10,
            max_inner: 80,
            tolerance: 1e-9,
            polish_rounds: 6,
        }
    }
}

/// One Dinkelbach iteration as recorded in the trace.
#[derive(Debug, Clone, Serialize)]
pub struct SolverStep {
    pub outer: usize,
    pub lambda: f64,
    pub residual: f64,
}

/// Iteration log and tie-break notes for one solved program.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SolverTrace {
    pub steps: Vec<SolverStep>,
    pub notes: Vec<String>,
}

/// A solved exponent program.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentSolution {
    /// The exponent value, including the `sqrt(2 * eta)` prefactor when
    /// `eta` is set.
    pub value: f64,
    /// The maximizing probe profile.
    pub argmax_pbar: EffectiveActionDist,
    /// Hypothesis attaining the outer minimum (testing programs only).
    pub binding_hypothesis: Option<String>,
    /// The alternative attaining the inner minimum at the optimum: a
    /// hypothesis label for testing programs, an arm index rendered as
    /// `"arm<i>"` for bandit programs.
    pub binding_challenger: Option<String>,
    /// Covertness budget, when the program has one.
    pub eta: Option<f64>,
    pub trace: SolverTrace,
}

impl ExponentSolution {
    /// The optimum with the covertness prefactor stripped: the raw
    /// max/min of the fractional program itself.
    pub fn base_value(&self) -> f64 {
        match self.eta {
            Some(eta) => self.value / (2.0 * eta).sqrt(),
            None => self.value,
        }
    }
}

// ----------------------------------------------------------------------
// generic solver machinery
// ----------------------------------------------------------------------

fn uniform_start(k: usize) -> Vec<f64> {
    // The uniform point satisfies any feasible floor.
    vec![1.0 / k as f64; k]
}

fn renormalize(p: &mut [f64]) {
    let s: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= s;
    }
}

/// Projected subgradient ascent with `1/sqrt(t)` steps, returning the best
/// iterate seen. `fg` returns the objective value and a supergradient.
fn subgradient_max<F>(start: &[f64], zeta: f64, iters: usize, fg: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut p = start.to_vec();
    let (mut best_v, mut g) = fg(&p);
    let mut best_p = p.clone();
    for t in 1..=iters {
        let step = 1.0 / (t as f64).sqrt();
        let moved: Vec<f64> = p.iter().zip(&g).map(|(pi, gi)| pi + step * gi).collect();
        p = prob::project_to_floored_simplex(&moved, zeta);
        let (v, grad) = fg(&p);
        g = grad;
        if v > best_v {
            best_v = v;
            best_p.copy_from_slice(&p);
        }
    }
    (best_p, best_v)
}

/// Deterministic pairwise pattern search: repeatedly scan mass transfers
/// between coordinate pairs on a shrinking grid of step sizes, keeping the
/// best point. Value-only; degenerate points must evaluate to `-inf`.
fn pattern_search_max<F>(start: &[f64], zeta: f64, rounds: usize, f: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let k = start.len();
    let mut p = start.to_vec();
    let mut best = f(&p);
    if k < 2 || rounds == 0 {
        return (p, best);
    }
    let mut radius = 0.5;
    for _ in 0..rounds {
        for _pass in 0..6 {
            let mut improved = false;
            let mut cand = p.clone();
            let mut cand_v = best;
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    // Transfer t of mass from i to j, staying above the floor.
                    let t_max = (p[i] - zeta).max(0.0).min(radius);
                    if t_max <= 0.0 {
                        continue;
                    }
                    for step in 1..=10 {
                        let t = t_max * step as f64 / 10.0;
                        let mut q = p.clone();
                        q[i] -= t;
                        q[j] += t;
                        let v = f(&q);
                        if v > cand_v {
                            cand_v = v;
                            cand = q;
                            improved = true;
                        }
                    }
                }
            }
            if improved {
                p = cand;
                best = cand_v;
            } else {
                break;
            }
        }
        radius *= 0.2;
    }
    renormalize(&mut p);
    let final_v = f(&p);
    if final_v > best {
        best = final_v;
    }
    (p, best)
}

/// Dinkelbach iteration for `max_p f(p)/g(p)` over the floored simplex.
///
/// `num` and `den` return value and (super)gradient. The denominator must
/// be strictly positive on the feasible set; plain maximizations pass the
/// constant 1. Returns the argmax, the ratio value there, and the trace.
pub(crate) fn dinkelbach<N, D>(
    k: usize,
    zeta: f64,
    start: Option<&[f64]>,
    opts: &SolverOptions,
    num: N,
    den: D,
) -> Result<(Vec<f64>, f64, SolverTrace)>
where
    N: Fn(&[f64]) -> (f64, Vec<f64>),
    D: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let ratio = |p: &[f64]| -> f64 {
        let f = num(p).0;
        let g = den(p).0;
        if g <= 0.0 || !g.is_finite() {
            f64::NEG_INFINITY
        } else {
            f / g
        }
    };
    let mut p = match start {
        Some(s) => s.to_vec(),
        None => uniform_start(k),
    };
    let mut lambda = ratio(&p);
    if !lambda.is_finite() {
        return Err(Error::SolverDiverged(format!(
            "ratio undefined at the start point {p:?}"
        )));
    }
    let mut trace = SolverTrace::default();
    let mut converged = false;
    for outer in 1..=opts.max_outer {
        let surrogate = |q: &[f64]| {
            let (fv, fgrad) = num(q);
            let (gv, ggrad) = den(q);
            let v = fv - lambda * gv;
            let grad: Vec<f64> = fgrad
                .iter()
                .zip(&ggrad)
                .map(|(a, b)| a - lambda * b)
                .collect();
            (v, grad)
        };
        let (p1, v1) = subgradient_max(&p, zeta, opts.max_inner, &surrogate);
        let (p2, v2) =
            pattern_search_max(&p1, zeta, opts.polish_rounds, |q| surrogate(q).0);
        // The previous iterate has surrogate value exactly 0 by the choice
        // of lambda; keep it if the inner solver did worse.
        let (next, residual) = if v2 >= v1 && v2 > 0.0 {
            (p2, v2)
        } else if v1 > 0.0 {
            (p1, v1)
        } else {
            (p.clone(), 0.0)
        };
        p = next;
        lambda = ratio(&p);
        trace.steps.push(SolverStep {
            outer,
            lambda,
            residual,
        });
        if residual.abs() < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        let last = trace.steps.last().map(|s| s.residual).unwrap_or(f64::NAN);
        return Err(Error::SolverDiverged(format!(
            "Dinkelbach residual {last:.3e} after {} iterations (tolerance {:.1e})",
            opts.max_outer, opts.tolerance
        )));
    }
    // Final polish on the ratio itself.
    let (p_polished, ratio_polished) =
        pattern_search_max(&p, zeta, opts.polish_rounds, |q| ratio(q));
    if ratio_polished > lambda {
        p = p_polished;
        lambda = ratio_polished;
    }
    Ok((p, lambda, trace))
}

/// Exhaustive lattice search over the floored simplex at the given
/// resolution. The independent cross-check for the Dinkelbach solver.
///
/// The objective returns `None` at points where it is undefined; those are
/// skipped. Ties in value resolve to the lexicographically smallest point,
/// so the result is independent of the parallel split.
pub fn grid_maximize<F>(
    k: usize,
    zeta: f64,
    resolution: f64,
    objective: F,
) -> Result<(EffectiveActionDist, f64)>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    if k == 0 {
        return Err(Error::InvalidConfig("empty action set".into()));
    }
    if zeta < 0.0 || zeta * k as f64 > 1.0 + prob::SUM_TOL {
        return Err(Error::InvalidConfig(format!(
            "floor {zeta} infeasible for {k} actions"
        )));
    }
    let mass = 1.0 - zeta * k as f64;
    let levels = if mass <= 1e-12 {
        1
    } else {
        ((mass / resolution).round() as usize).max(1)
    };
    let spacing = mass / levels as f64;

    // A candidate is (value, lattice point); ties in value break toward the
    // lexicographically smaller point, making the parallel max associative.
    type Cand = Option<(f64, Vec<usize>)>;
    fn better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
        a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
    }
    let merge = |a: Cand, b: Cand| -> Cand {
        match (a, b) {
            (Some(x), Some(y)) => Some(if better(&x, &y) { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        }
    };

    let eval = |counts: &[usize]| -> Option<(f64, Vec<usize>)> {
        let p: Vec<f64> = counts.iter().map(|&c| zeta + c as f64 * spacing).collect();
        objective(&p).filter(|v| v.is_finite()).map(|v| (v, counts.to_vec()))
    };

    // Enumerate compositions of `levels` into k parts, parallel over the
    // first coordinate.
    let best: Cand = (0..=levels)
        .into_par_iter()
        .map(|first| {
            let mut local: Cand = None;
            let mut counts = vec![0usize; k];
            counts[0] = first;
            fn descend(
                counts: &mut Vec<usize>,
                idx: usize,
                remaining: usize,
                local: &mut Cand,
                eval: &dyn Fn(&[usize]) -> Option<(f64, Vec<usize>)>,
                merge: &dyn Fn(Cand, Cand) -> Cand,
            ) {
                if idx == counts.len() - 1 {
                    counts[idx] = remaining;
                    *local = merge(local.take(), eval(counts));
                    return;
                }
                for c in 0..=remaining {
                    counts[idx] = c;
                    descend(counts, idx + 1, remaining - c, local, eval, merge);
                }
            }
            if k == 1 {
                if first == levels {
                    local = eval(&counts);
                }
            } else {
                descend(
                    &mut counts,
                    1,
                    levels - first,
                    &mut local,
                    &eval,
                    &|a, b| merge(a, b),
                );
            }
            local
        })
        .reduce(|| None, merge);

    match best {
        Some((value, counts)) => {
            let mut p: Vec<f64> = counts.iter().map(|&c| zeta + c as f64 * spacing).collect();
            renormalize(&mut p);
            Ok((EffectiveActionDist::new(p)?, value))
        }
        None => Err(Error::DegenerateDenominator(
            "objective undefined on the entire grid".into(),
        )),
    }
}

/// Pick the index of the smallest value, lowest index on near-ties, and
/// record a note when a tie was actually broken.
fn argmin_tied(values: &[f64], what: &str, labels: &[String], notes: &mut Vec<String>) -> usize {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] <= min + TIE_TOL)
        .collect();
    if tied.len() > 1 {
        let names: Vec<&str> = tied.iter().map(|&i| labels[i].as_str()).collect();
        notes.push(format!(
            "tie on {what} among {{{}}} within {TIE_TOL:.0e}; chose {}",
            names.join(", "),
            labels[tied[0]]
        ));
    }
    tied[0]
}

// ----------------------------------------------------------------------
// hypothesis-testing objectives
// ----------------------------------------------------------------------

/// Per-hypothesis evaluation context for the covert testing exponent:
/// divergence rows against each alternative plus the monitor's probe and
/// idle laws.
pub(crate) struct CovertHtObjective {
    /// `dtab[a][x]` = agent divergence of action `x + 1` against
    /// alternative `alt_idx[a]`.
    dtab: Vec<Vec<f64>>,
    alt_idx: Vec<usize>,
    /// Monitor probe channels as raw rows `[x][z]`.
    probes: Vec<Vec<f64>>,
    null: Vec<f64>,
}

impl CovertHtObjective {
    pub(crate) fn new(model: &HypothesisModel, theta: usize) -> Result<Self> {
        let k = model.k();
        // Fail fast if any probe's chi-square against the idle law is
        // already infinite; the mixture price inherits that for every
        // interior profile.
        for x in 1..=k {
            prob::chi2_categorical(model.willie(theta, x), model.willie_null(theta)).map_err(
                |_| {
                    Error::AbsoluteContinuityViolation(format!(
                        "probe action {x} reaches outcomes the idle law excludes; \
                         smooth the idle law first (regularize_null)"
                    ))
                },
            )?;
        }
        let mut dtab = Vec::new();
        let mut alt_idx = Vec::new();
        for alt in 0..model.n_hypotheses() {
            if alt == theta {
                continue;
            }
            let mut row = Vec::with_capacity(k);
            for x in 1..=k {
                row.push(prob::kl_categorical(model.alice(theta, x), model.alice(alt, x))?);
            }
            dtab.push(row);
            alt_idx.push(alt);
        }
        Ok(CovertHtObjective {
            dtab,
            alt_idx,
            probes: (1..=k)
                .map(|x| model.willie(theta, x).probs().to_vec())
                .collect(),
            null: model.willie_null(theta).probs().to_vec(),
        })
    }

    /// Divergence rate `min_alt sum_x p(x) D(x)`: value, supergradient
    /// (the active alternative's divergence row), active alternative slot.
    pub(crate) fn numerator(&self, p: &[f64]) -> (f64, Vec<f64>, usize) {
        let mut best = f64::INFINITY;
        let mut active = 0;
        for (a, row) in self.dtab.iter().enumerate() {
            let v: f64 = row.iter().zip(p).map(|(d, pi)| d * pi).sum();
            if v < best {
                best = v;
                active = a;
            }
        }
        (best, self.dtab[active].clone(), active)
    }

    pub(crate) fn chi2(&self, p: &[f64]) -> f64 {
        let z = self.null.len();
        let mut s = 0.0;
        for zi in 0..z {
            let mix: f64 = self.probes.iter().zip(p).map(|(row, pi)| row[zi] * pi).sum();
            let d = mix - self.null[zi];
            s += d * d / self.null[zi];
        }
        s
    }

    /// `sqrt(chi2)` and its gradient, floored away from zero so the
    /// Dinkelbach surrogate stays finite.
    pub(crate) fn denominator(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let z = self.null.len();
        let mut chi = 0.0;
        let mut residual = vec![0.0; z];
        for zi in 0..z {
            let mix: f64 = self.probes.iter().zip(p).map(|(row, pi)| row[zi] * pi).sum();
            let d = mix - self.null[zi];
            residual[zi] = d / self.null[zi];
            chi += d * d / self.null[zi];
        }
        let g = chi.max(DEGENERATE_CHI2).sqrt();
        let grad: Vec<f64> = self
            .probes
            .iter()
            .map(|row| {
                row.iter().zip(&residual).map(|(q, r)| q * r).sum::<f64>() / g
            })
            .collect();
        (g, grad)
    }

    /// The full ratio, erroring on a vanished denominator.
    fn value(&self, p: &[f64]) -> Result<f64> {
        let chi = self.chi2(p);
        if chi < DEGENERATE_CHI2 {
            return Err(Error::DegenerateDenominator(format!(
                "chi-square price {chi:.3e} below {DEGENERATE_CHI2:.0e}"
            )));
        }
        Ok(self.numerator(p).0 / chi.sqrt())
    }

    fn ratio_opt(&self, p: &[f64]) -> Option<f64> {
        let chi = self.chi2(p);
        if chi < DEGENERATE_CHI2 {
            None
        } else {
            Some(self.numerator(p).0 / chi.sqrt())
        }
    }
}

/// Covert testing objective at one hypothesis and probe profile: the
/// worst-case divergence rate over alternatives divided by the square root
/// of the chi-square covertness price. The `sqrt(2 * eta)` prefactor is the
/// caller's.
pub fn covert_ht_objective(
    model: &HypothesisModel,
    theta: usize,
    pbar: &EffectiveActionDist,
) -> Result<f64> {
    check_theta(model, theta)?;
    check_pbar(model.k(), pbar)?;
    CovertHtObjective::new(model, theta)?.value(pbar.probs())
}

fn check_theta(model: &HypothesisModel, theta: usize) -> Result<()> {
    if theta >= model.n_hypotheses() {
        return Err(Error::InvalidConfig(format!(
            "hypothesis index {theta} out of range (have {})",
            model.n_hypotheses()
        )));
    }
    Ok(())
}

fn check_pbar(k: usize, pbar: &EffectiveActionDist) -> Result<()> {
    if pbar.k() != k {
        return Err(Error::AlphabetMismatch {
            left: pbar.k(),
            right: k,
        });
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "covertness budget must be positive and finite, got {eta}"
        )));
    }
    Ok(())
}

/// The covert sequential-testing exponent: `sqrt(2 eta)` times the worst
/// hypothesis's best achievable ratio of divergence rate to covertness
/// price.
pub fn covert_ht_exponent(
    model: &HypothesisModel,
    eta: f64,
    opts: &SolverOptions,
) -> Result<ExponentSolution> {
    check_eta(eta)?;
    let mut solves = Vec::new();
    for theta in 0..model.n_hypotheses() {
        let obj = CovertHtObjective::new(model, theta)?;
        let (p, ratio, trace) = dinkelbach(
            model.k(),
            0.0,
            None,
            opts,
            |q| {
                let (v, g, _) = obj.numerator(q);
                (v, g)
            },
            |q| obj.denominator(q),
        )?;
        solves.push((p, ratio, trace, obj));
    }
    let values: Vec<f64> = solves.iter().map(|s| s.1).collect();
    let mut notes = Vec::new();
    let binding = argmin_tied(&values, "binding hypothesis", model.labels(), &mut notes);
    let (p, ratio, mut trace, obj) = solves.swap_remove(binding);
    trace.notes.append(&mut notes);
    for (theta, v) in values.iter().enumerate() {
        trace
            .notes
            .push(format!("hypothesis {}: optimum {v:.12}", model.labels()[theta]));
    }
    // Identify the binding alternative at the optimum.
    let per_alt: Vec<f64> = obj
        .dtab
        .iter()
        .map(|row| row.iter().zip(&p).map(|(d, pi)| d * pi).sum())
        .collect();
    let alt_labels: Vec<String> = obj
        .alt_idx
        .iter()
        .map(|&a| model.labels()[a].clone())
        .collect();
    let alt = argmin_tied(&per_alt, "binding alternative", &alt_labels, &mut trace.notes);
    Ok(ExponentSolution {
        value: (2.0 * eta).sqrt() * ratio,
        argmax_pbar: EffectiveActionDist::new(p)?,
        binding_hypothesis: Some(model.labels()[binding].clone()),
        binding_challenger: Some(alt_labels[alt].clone()),
        eta: Some(eta),
        trace,
    })
}

/// Which reading of the non-covert testing exponent to compute.
///
/// The `AsWritten` objective puts the worst-case alternative inside the
/// action average, `sum_x p(x) min_alt D`; it is linear in the profile and
/// collapses to zero whenever every action has some alternative it cannot
/// see. The `MinOutside` objective, `min_alt sum_x p(x) D`, lets a mixture
/// of actions cover all alternatives at once. Both are exposed because the
/// two disagree on natural instances; reported optima state which was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlainHtVariant {
    AsWritten,
    MinOutside,
}

/// Non-covert sequential-testing exponent (no covertness price).
pub fn noncovert_ht_exponent(
    model: &HypothesisModel,
    variant: PlainHtVariant,
    opts: &SolverOptions,
) -> Result<ExponentSolution> {
    let k = model.k();
    let mut per_theta: Vec<(Vec<f64>, f64, SolverTrace, usize)> = Vec::new();
    for theta in 0..model.n_hypotheses() {
        let obj = CovertHtObjective::build_numerator_only(model, theta)?;
        match variant {
            PlainHtVariant::AsWritten => {
                // Linear objective: per-action worst-case divergences; the
                // maximum sits on a vertex.
                let mut trace = SolverTrace::default();
                let coeff: Vec<f64> = (0..k)
                    .map(|x| {
                        obj.dtab
                            .iter()
                            .map(|row| row[x])
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                let neg: Vec<f64> = coeff.iter().map(|c| -c).collect();
                let action_labels: Vec<String> =
                    (1..=k).map(|x| format!("action{x}")).collect();
                let best =
                    argmin_tied(&neg, "maximizing action", &action_labels, &mut trace.notes);
                let mut p = vec![0.0; k];
                p[best] = 1.0;
                let value = coeff[best];
                // The binding alternative for the chosen action.
                let per_alt: Vec<f64> = obj.dtab.iter().map(|row| row[best]).collect();
                per_theta.push((p, value, trace, argmin_slot(&per_alt)));
            }
            PlainHtVariant::MinOutside => {
                let (p, value, trace) = dinkelbach(
                    k,
                    0.0,
                    None,
                    opts,
                    |q| {
                        let (v, g, _) = obj.numerator(q);
                        (v, g)
                    },
                    |_q| (1.0, vec![0.0; k]),
                )?;
                let slot = obj.numerator(&p).2;
                per_theta.push((p, value, trace, slot));
            }
        }
    }
    let values: Vec<f64> = per_theta.iter().map(|s| s.1).collect();
    let mut notes = Vec::new();
    let binding = argmin_tied(&values, "binding hypothesis", model.labels(), &mut notes);
    let (p, value, mut trace, alt_slot) = per_theta.swap_remove(binding);
    trace.notes.append(&mut notes);
    let alt = alt_index_for(model, binding, alt_slot);
    Ok(ExponentSolution {
        value,
        argmax_pbar: EffectiveActionDist::new(p)?,
        binding_hypothesis: Some(model.labels()[binding].clone()),
        binding_challenger: Some(model.labels()[alt].clone()),
        eta: None,
        trace,
    })
}

fn argmin_slot(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn alt_index_for(model: &HypothesisModel, theta: usize, slot: usize) -> usize {
    (0..model.n_hypotheses())
        .filter(|&a| a != theta)
        .nth(slot)
        .expect("slot within alternatives")
}

impl CovertHtObjective {
    /// Variant without any monitor-side data, for the non-covert programs
    /// (the willie table may be degenerate there without consequence).
    fn build_numerator_only(model: &HypothesisModel, theta: usize) -> Result<Self> {
        let k = model.k();
        let mut dtab = Vec::new();
        let mut alt_idx = Vec::new();
        for alt in 0..model.n_hypotheses() {
            if alt == theta {
                continue;
            }
            let mut row = Vec::with_capacity(k);
            for x in 1..=k {
                row.push(prob::kl_categorical(model.alice(theta, x), model.alice(alt, x))?);
            }
            dtab.push(row);
            alt_idx.push(alt);
        }
        Ok(CovertHtObjective {
            dtab,
            alt_idx,
            probes: Vec::new(),
            null: vec![1.0],
        })
    }
}

// ----------------------------------------------------------------------
// best-arm objectives
// ----------------------------------------------------------------------

/// Worst-case divergence rate against bandits whose best arm differs:
/// `(1/2) min_challenger p(x) p(best) gap^2 / (p(best) + p(x))`.
///
/// `alice_means[i]` is the mean of effective arm `i + 1`; the best arm is
/// the first index attaining the maximum mean.
pub fn alt_inf_gaussian(pbar: &EffectiveActionDist, alice_means: &[f64]) -> Result<f64> {
    if pbar.k() != alice_means.len() {
        return Err(Error::AlphabetMismatch {
            left: pbar.k(),
            right: alice_means.len(),
        });
    }
    if alice_means.len() < 2 {
        return Err(Error::NoChallenger);
    }
    Ok(alt_inf_raw(pbar.probs(), alice_means, best_slot(alice_means)).0)
}

pub(crate) fn best_slot(means: &[f64]) -> usize {
    let mut best = 0;
    for (i, m) in means.iter().enumerate() {
        if *m > means[best] {
            best = i;
        }
    }
    best
}

/// Value, supergradient, and active challenger slot of the alternative
/// infimum. Zero-mass pairs contribute zero (their bandit is already
/// indistinguishable at rate zero).
pub(crate) fn alt_inf_raw(p: &[f64], means: &[f64], best: usize) -> (f64, Vec<f64>, usize) {
    let k = p.len();
    let mut value = f64::INFINITY;
    let mut active = usize::MAX;
    for x in 0..k {
        if x == best {
            continue;
        }
        let gap = means[best] - means[x];
        let denom = p[best] + p[x];
        let term = if denom <= 0.0 {
            0.0
        } else {
            0.5 * gap * gap * p[best] * p[x] / denom
        };
        if term < value {
            value = term;
            active = x;
        }
    }
    let mut grad = vec![0.0; k];
    if active != usize::MAX {
        let x = active;
        let gap = means[best] - means[x];
        let denom = p[best] + p[x];
        if denom > 0.0 {
            grad[best] = 0.5 * gap * gap * p[x] * p[x] / (denom * denom);
            grad[x] = 0.5 * gap * gap * p[best] * p[best] / (denom * denom);
        }
    }
    (value, grad, active)
}

/// Covert best-arm evaluation context over empirical or true means.
pub(crate) struct CovertBaiObjective {
    pub(crate) alice: Vec<f64>,
    pub(crate) willie: Vec<f64>,
    pub(crate) best: usize,
}

impl CovertBaiObjective {
    pub(crate) fn new(alice: Vec<f64>, willie: Vec<f64>) -> Result<Self> {
        if alice.len() != willie.len() {
            return Err(Error::AlphabetMismatch {
                left: alice.len(),
                right: willie.len(),
            });
        }
        if alice.len() < 2 {
            return Err(Error::NoChallenger);
        }
        let best = best_slot(&alice);
        Ok(CovertBaiObjective { alice, willie, best })
    }

    /// The feasible set must keep the monitor-side mixture mean bounded
    /// away from zero, else some profile reproduces the idle law and the
    /// price vanishes. The mixture mean is linear, so scanning the floored
    /// simplex's vertices bounds it.
    pub(crate) fn check_mean_sign(&self, zeta: f64) -> Result<()> {
        let k = self.willie.len();
        let base: f64 = self.willie.iter().sum::<f64>() * zeta;
        let free = 1.0 - zeta * k as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for mu in &self.willie {
            let v = base + free * mu;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo <= 0.0 && hi >= 0.0 {
            return Err(Error::DegenerateDenominator(format!(
                "monitor mixture mean spans zero on the feasible set \
                 (range [{lo:.3e}, {hi:.3e}]); some profile reproduces the idle law"
            )));
        }
        Ok(())
    }

    fn numerator(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let (v, g, _) = alt_inf_raw(p, &self.alice, self.best);
        (v, g)
    }

    fn denominator(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let m: f64 = p.iter().zip(&self.willie).map(|(pi, mu)| pi * mu).sum();
        let chi = (m * m).exp_m1();
        let g = chi.max(DEGENERATE_CHI2).sqrt();
        let scale = m * (m * m).exp() / g;
        let grad: Vec<f64> = self.willie.iter().map(|mu| mu * scale).collect();
        (g, grad)
    }

    pub(crate) fn ratio_opt(&self, p: &[f64]) -> Option<f64> {
        let m: f64 = p.iter().zip(&self.willie).map(|(pi, mu)| pi * mu).sum();
        let chi = (m * m).exp_m1();
        if chi < DEGENERATE_CHI2 || !chi.is_finite() {
            return None;
        }
        Some(alt_inf_raw(p, &self.alice, self.best).0 / chi.sqrt())
    }

    /// Solve the floored fractional program; shared by the exponent entry
    /// point and the policy layer's per-step refreshes.
    pub(crate) fn maximize(
        &self,
        zeta: f64,
        start: Option<&[f64]>,
        opts: &SolverOptions,
    ) -> Result<(Vec<f64>, f64, SolverTrace)> {
        self.check_mean_sign(zeta)?;
        dinkelbach(
            self.alice.len(),
            zeta,
            start,
            opts,
            |q| self.numerator(q),
            |q| self.denominator(q),
        )
    }
}

/// Covert best-arm objective at one probe profile: alternative infimum
/// over the chi-square price, without the `sqrt(2 eta)` prefactor.
pub fn covert_bai_objective(
    bandit: &GaussianBanditModel,
    pbar: &EffectiveActionDist,
) -> Result<f64> {
    check_pbar(bandit.k(), pbar)?;
    let obj = CovertBaiObjective::new(
        bandit.alice_effective_means().to_vec(),
        bandit.willie_effective_means().to_vec(),
    )?;
    match obj.ratio_opt(pbar.probs()) {
        Some(v) => Ok(v),
        None => Err(Error::DegenerateDenominator(
            "chi-square price vanished at this profile".into(),
        )),
    }
}

/// The covert best-arm exponent over the `zeta`-floored simplex.
pub fn covert_bai_exponent(
    bandit: &GaussianBanditModel,
    eta: f64,
    zeta_floor: f64,
    opts: &SolverOptions,
) -> Result<ExponentSolution> {
    check_eta(eta)?;
    let k = bandit.k();
    if zeta_floor < 0.0 || zeta_floor * k as f64 > 1.0 {
        return Err(Error::InvalidConfig(format!(
            "floor {zeta_floor} infeasible for {k} arms"
        )));
    }
    let obj = CovertBaiObjective::new(
        bandit.alice_effective_means().to_vec(),
        bandit.willie_effective_means().to_vec(),
    )?;
    let (p, ratio, mut trace) = obj.maximize(zeta_floor, None, opts)?;
    let (_, _, challenger) = alt_inf_raw(&p, &obj.alice, obj.best);
    trace.notes.push(format!(
        "best arm {}, floored simplex at zeta = {zeta_floor}",
        obj.best + 1
    ));
    Ok(ExponentSolution {
        value: (2.0 * eta).sqrt() * ratio,
        argmax_pbar: EffectiveActionDist::new(p)?,
        binding_hypothesis: None,
        binding_challenger: Some(format!("arm{}", challenger + 1)),
        eta: Some(eta),
        trace,
    })
}

/// Non-covert best-arm exponent: the alternative infimum alone.
pub fn noncovert_bai_exponent(
    bandit: &GaussianBanditModel,
    opts: &SolverOptions,
) -> Result<ExponentSolution> {
    let k = bandit.k();
    if k < 2 {
        return Err(Error::NoChallenger);
    }
    let means = bandit.alice_effective_means().to_vec();
    let best = best_slot(&means);
    let (p, value, trace) = dinkelbach(
        k,
        0.0,
        None,
        opts,
        |q| {
            let (v, g, _) = alt_inf_raw(q, &means, best);
            (v, g)
        },
        |_q| (1.0, vec![0.0; k]),
    )?;
    let (_, _, challenger) = alt_inf_raw(&p, &means, best);
    Ok(ExponentSolution {
        value,
        argmax_pbar: EffectiveActionDist::new(p)?,
        binding_hypothesis: None,
        binding_challenger: Some(format!("arm{}", challenger + 1)),
        eta: None,
        trace,
    })
}

// ----------------------------------------------------------------------
// grid cross-checks
// ----------------------------------------------------------------------
//
// Brute-force counterparts of the four exponent entry points, built on
// [`grid_maximize`]. Slow and trusted: no iteration, no step sizes, just
// the lattice. The command-line tool's `--grid-check` flag and the
// acceptance suite compare the iterative solvers against these.

/// Grid value of the covert testing exponent at the given lattice
/// `resolution`.
pub fn covert_ht_exponent_grid(
    model: &HypothesisModel,
    eta: f64,
    resolution: f64,
) -> Result<f64> {
    check_eta(eta)?;
    let mut worst: Option<f64> = None;
    for theta in 0..model.n_hypotheses() {
        let obj = CovertHtObjective::new(model, theta)?;
        let (_, v) = grid_maximize(model.k(), 0.0, resolution, |p| obj.ratio_opt(p))?;
        worst = Some(worst.map_or(v, |w: f64| w.min(v)));
    }
    Ok((2.0 * eta).sqrt() * worst.expect("models carry at least two hypotheses"))
}

/// Grid value of the non-covert testing exponent.
pub fn noncovert_ht_exponent_grid(
    model: &HypothesisModel,
    variant: PlainHtVariant,
    resolution: f64,
) -> Result<f64> {
    let k = model.k();
    let mut worst: Option<f64> = None;
    for theta in 0..model.n_hypotheses() {
        let obj = CovertHtObjective::build_numerator_only(model, theta)?;
        let (_, v) = match variant {
            PlainHtVariant::AsWritten => {
                let coeff: Vec<f64> = (0..k)
                    .map(|x| {
                        obj.dtab
                            .iter()
                            .map(|row| row[x])
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                grid_maximize(k, 0.0, resolution, |p| {
                    Some(p.iter().zip(&coeff).map(|(pi, c)| pi * c).sum())
                })?
            }
            PlainHtVariant::MinOutside => {
                grid_maximize(k, 0.0, resolution, |p| Some(obj.numerator(p).0))?
            }
        };
        worst = Some(worst.map_or(v, |w: f64| w.min(v)));
    }
    Ok(worst.expect("models carry at least two hypotheses"))
}

/// Grid value of the covert best-arm exponent over the floored simplex.
pub fn covert_bai_exponent_grid(
    bandit: &GaussianBanditModel,
    eta: f64,
    zeta_floor: f64,
    resolution: f64,
) -> Result<f64> {
    check_eta(eta)?;
    let obj = CovertBaiObjective::new(
        bandit.alice_effective_means().to_vec(),
        bandit.willie_effective_means().to_vec(),
    )?;
    obj.check_mean_sign(zeta_floor)?;
    let (_, v) = grid_maximize(bandit.k(), zeta_floor, resolution, |p| obj.ratio_opt(p))?;
    Ok((2.0 * eta).sqrt() * v)
}

/// Grid value of the non-covert best-arm exponent.
pub fn noncovert_bai_exponent_grid(
    bandit: &GaussianBanditModel,
    resolution: f64,
) -> Result<f64> {
    let k = bandit.k();
    if k < 2 {
        return Err(Error::NoChallenger);
    }
    let means = bandit.alice_effective_means().to_vec();
    let best = best_slot(&means);
    let (_, v) = grid_maximize(k, 0.0, resolution, |p| {
        Some(alt_inf_raw(p, &means, best).0)
    })?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use crate::prob::{Categorical, RngStream};

    fn eff(p: &[f64]) -> EffectiveActionDist {
        EffectiveActionDist::new(p.to_vec()).unwrap()
    }

    fn reg_model() -> HypothesisModel {
        presets::threeway_binary().regularize_null(0.02).unwrap()
    }

    #[test]
    fn covert_ht_objective_matches_scripted_value() {
        // Independently scripted evaluation of the ratio at theta = b,
        // profile (0.5, 0.5), idle law Ber(0.01).
        let m = reg_model();
        let v = covert_ht_objective(&m, 1, &eff(&[0.5, 0.5])).unwrap();
        assert!((v - 0.015_213_167_063_028_856).abs() < 1e-12, "{v}");
        // Numerator and price components, same script.
        let obj = CovertHtObjective::new(&m, 1).unwrap();
        assert!((obj.chi2(&[0.5, 0.5]) - 55.313_131_313_131_31).abs() < 1e-9);
        assert!((obj.numerator(&[0.5, 0.5]).0 - 0.113_144_580_592_679_44).abs() < 1e-12);
    }

    #[test]
    fn covert_ht_objective_rejects_raw_degenerate_null() {
        let m = presets::threeway_binary();
        let e = covert_ht_objective(&m, 1, &eff(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(e, Error::AbsoluteContinuityViolation(_)), "{e}");
    }

    #[test]
    fn degenerate_denominator_surfaces_on_synthetic_context() {
        // Bypass model validation: a probe equal to the idle law makes the
        // chi-square price exactly zero.
        let obj = CovertHtObjective {
            dtab: vec![vec![0.3]],
            alt_idx: vec![1],
            probes: vec![vec![0.5, 0.5]],
            null: vec![0.5, 0.5],
        };
        let e = obj.value(&[1.0]).unwrap_err();
        assert!(matches!(e, Error::DegenerateDenominator(_)), "{e}");
    }

    #[test]
    fn covert_ht_exponent_binds_at_middle_hypothesis() {
        let m = reg_model();
        let sol = covert_ht_exponent(&m, 1.0, &SolverOptions::default()).unwrap();
        assert_eq!(sol.binding_hypothesis.as_deref(), Some("b"));
        // Scripted lattice search puts the optimum at profile (0.5, 0.5)
        // with ratio 0.0152131670630289.
        assert!(
            (sol.base_value() - 0.015_213_167_063_028_856).abs() < 1e-5,
            "{}",
            sol.base_value()
        );
        assert!((sol.argmax_pbar.prob(1) - 0.5).abs() < 1e-3);
        // Re-evaluation closure.
        let re = covert_ht_objective(&m, 1, &sol.argmax_pbar).unwrap();
        assert!((re - sol.base_value()).abs() < 1e-9);
    }

    #[test]
    fn covert_ht_scale_law_in_eta() {
        let m = reg_model();
        let opts = SolverOptions::default();
        let v1 = covert_ht_exponent(&m, 0.5, &opts).unwrap().value;
        let v3 = covert_ht_exponent(&m, 1.5, &opts).unwrap().value;
        assert!((v3 - 3.0f64.sqrt() * v1).abs() < 1e-12);
    }

    #[test]
    fn plain_ht_variants_disagree_on_the_preset() {
        let m = presets::threeway_binary();
        let opts = SolverOptions::default();
        let aw = noncovert_ht_exponent(&m, PlainHtVariant::AsWritten, &opts).unwrap();
        // Every action of the middle hypothesis coincides with some
        // alternative, so the per-action worst case vanishes identically.
        assert_eq!(aw.binding_hypothesis.as_deref(), Some("b"));
        assert!(aw.value.abs() < 1e-12);
        let mo = noncovert_ht_exponent(&m, PlainHtVariant::MinOutside, &opts).unwrap();
        assert_eq!(mo.binding_hypothesis.as_deref(), Some("b"));
        assert!((mo.value - 0.113_144_580_592_679_44).abs() < 1e-6, "{}", mo.value);
        assert!((mo.argmax_pbar.prob(1) - 0.5).abs() < 1e-3);
        assert!(mo.value > aw.value);
    }

    #[test]
    fn dominant_action_takes_all_mass() {
        // Identical monitor probes make the price constant, so the covert
        // optimum rides the numerator alone; action 2 dominates.
        let row = |ps: &[[f64; 2]]| -> Vec<Categorical> {
            ps.iter().map(|p| Categorical::new(p.to_vec()).unwrap()).collect()
        };
        let m = HypothesisModel::new(
            vec!["a".into(), "b".into()],
            vec![
                row(&[[0.5, 0.5], [0.55, 0.45], [0.9, 0.1]]),
                row(&[[0.5, 0.5], [0.45, 0.55], [0.1, 0.9]]),
            ],
            vec![
                row(&[[0.7, 0.3], [0.4, 0.6], [0.4, 0.6]]),
                row(&[[0.7, 0.3], [0.4, 0.6], [0.4, 0.6]]),
            ],
        )
        .unwrap();
        let sol = covert_ht_exponent(&m, 1.0, &SolverOptions::default()).unwrap();
        assert!(sol.argmax_pbar.prob(2) > 0.999, "{:?}", sol.argmax_pbar);
    }

    #[test]
    fn alt_inf_closed_form_values() {
        let v = alt_inf_gaussian(&eff(&[0.5, 0.5]), &[1.0, 0.5]).unwrap();
        assert!((v - 0.03125).abs() < 1e-15);
        let v = alt_inf_gaussian(&eff(&[0.3, 0.7]), &[1.0, 0.5]).unwrap();
        assert!((v - 0.02625).abs() < 1e-15);
        // Equal means: every challenger gap is zero.
        let v = alt_inf_gaussian(&eff(&[0.5, 0.5]), &[1.0, 1.0]).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            alt_inf_gaussian(&eff(&[1.0]), &[1.0]),
            Err(Error::NoChallenger)
        ));
    }

    /// Independent oracle: minimize the weighted divergence over explicit
    /// alternative bandits (challenger arm swapped to beat the best) by
    /// dense line search on the two moved means.
    fn alt_inf_by_search(p: &[f64], means: &[f64]) -> f64 {
        let best = best_slot(means);
        let mut overall = f64::INFINITY;
        for x in 0..means.len() {
            if x == best {
                continue;
            }
            // Alternative: arm x's mean becomes m, best arm's becomes at
            // most m; optimal alternatives put both on a shared value m.
            let mut local = f64::INFINITY;
            let lo = means[x] - 1.0;
            let hi = means[best] + 1.0;
            for i in 0..=20_000 {
                let m = lo + (hi - lo) * i as f64 / 20_000.0;
                let db = (means[best] - m).powi(2) / 2.0;
                let dx = (means[x] - m).powi(2) / 2.0;
                let cost = p[best] * db + p[x] * dx;
                if cost < local {
                    local = cost;
                }
            }
            if local < overall {
                overall = local;
            }
        }
        overall
    }

    #[test]
    fn alt_inf_matches_alternative_bandit_search() {
        let cases: Vec<(Vec<f64>, Vec<f64>)> = vec![
            (vec![0.5, 0.5], vec![1.0, 0.5]),
            (vec![0.3, 0.7], vec![1.0, 0.5]),
            (vec![0.2, 0.5, 0.3], vec![1.5, 0.7, 0.2]),
            (vec![0.6, 0.1, 0.3], vec![2.0, 1.9, 0.5]),
        ];
        for (p, means) in cases {
            let closed = alt_inf_gaussian(&eff(&p), &means).unwrap();
            let searched = alt_inf_by_search(&p, &means);
            assert!(
                (closed - searched).abs() < 1e-6,
                "p {p:?} means {means:?}: {closed} vs {searched}"
            );
        }
    }

    #[test]
    fn plain_bai_recovers_even_split() {
        let b = presets::two_arm_gaussian();
        let sol = noncovert_bai_exponent(&b, &SolverOptions::default()).unwrap();
        assert!((sol.value - 0.03125).abs() < 1e-9, "{}", sol.value);
        assert!((sol.argmax_pbar.prob(1) - 0.5).abs() < 1e-3);
        assert_eq!(sol.binding_challenger.as_deref(), Some("arm2"));
    }

    #[test]
    fn covert_bai_tilts_away_from_loud_arm() {
        let b = presets::two_arm_gaussian();
        let sol = covert_bai_exponent(&b, 1.0, 0.0, &SolverOptions::default()).unwrap();
        // Scripted lattice search: ratio 0.03773780 at profile
        // (0.392, 0.608); the value with the budget prefactor.
        assert!((sol.value - 0.053_369_312_481_96).abs() < 1e-4, "{}", sol.value);
        assert!(
            (sol.argmax_pbar.prob(1) - 0.392).abs() < 2e-3,
            "{:?}",
            sol.argmax_pbar
        );
        // The covert optimum shifts mass toward the quieter arm relative
        // to the non-covert even split.
        assert!(sol.argmax_pbar.prob(2) > 0.55);
        let re = covert_bai_objective(&b, &sol.argmax_pbar).unwrap();
        assert!((re - sol.base_value()).abs() < 1e-9);
    }

    #[test]
    fn covert_bai_scale_law_and_floor_monotonicity() {
        let b = presets::two_arm_gaussian();
        let opts = SolverOptions::default();
        let v1 = covert_bai_exponent(&b, 1.0, 0.0, &opts).unwrap().value;
        let v2 = covert_bai_exponent(&b, 2.0, 0.0, &opts).unwrap().value;
        assert!((v2 - 2.0f64.sqrt() * v1).abs() < 1e-12);
        let floored = covert_bai_exponent(&b, 1.0, 0.05, &opts).unwrap().value;
        assert!(floored <= v1 + 1e-12);
        let lightly = covert_bai_exponent(&b, 1.0, 1e-6, &opts).unwrap().value;
        assert!((lightly - v1).abs() < 1e-6);
    }

    #[test]
    fn quieter_monitor_means_larger_covert_exponent() {
        let loud = GaussianBanditModel::new(vec![0.0, 1.0, 0.5], vec![0.0, 2.0, 1.5]).unwrap();
        let quiet = GaussianBanditModel::new(vec![0.0, 1.0, 0.5], vec![0.0, 0.2, 0.15]).unwrap();
        let opts = SolverOptions::default();
        let vl = covert_bai_exponent(&loud, 1.0, 0.0, &opts).unwrap().value;
        let vq = covert_bai_exponent(&quiet, 1.0, 0.0, &opts).unwrap().value;
        assert!(vq > vl, "quiet {vq} vs loud {vl}");
    }

    #[test]
    fn degenerate_monitor_means_rejected() {
        let opts = SolverOptions::default();
        let zeros = GaussianBanditModel::new(vec![0.0, 1.0, 0.5], vec![0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            covert_bai_exponent(&zeros, 1.0, 1e-3, &opts),
            Err(Error::DegenerateDenominator(_))
        ));
        let mixed = GaussianBanditModel::new(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, -1.0]).unwrap();
        assert!(matches!(
            covert_bai_exponent(&mixed, 1.0, 0.1, &opts),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn grid_recovers_known_quadratic_optimum() {
        // max p1*p2 on the simplex is at (0.5, 0.5) with value 0.25.
        let (p, v) = grid_maximize(2, 0.0, 1e-3, |q| Some(q[0] * q[1])).unwrap();
        assert!((v - 0.25).abs() < 1e-6);
        assert!((p.prob(1) - 0.5).abs() < 1e-9);
        // Floored version with a binding floor.
        let (p, _) = grid_maximize(2, 0.4, 1e-3, |q| Some(q[0])).unwrap();
        assert!((p.prob(2) - 0.4).abs() < 1e-9);
    }

    fn random_ht_instance(stream: &mut RngStream) -> HypothesisModel {
        loop {
            let n_theta = 2 + (stream.uniform() * 2.0) as usize; // 2..=3
            let k = 1 + (stream.uniform() * 3.0) as usize; // 1..=3
            let null_row = Categorical::bernoulli(0.05).unwrap();
            let mut alice = Vec::new();
            let mut willie = Vec::new();
            for _ in 0..n_theta {
                let mut arow = vec![null_row.clone()];
                let mut wrow = vec![null_row.clone()];
                for _ in 0..k {
                    arow.push(Categorical::bernoulli(0.15 + 0.7 * stream.uniform()).unwrap());
                    // Probe outputs stay well away from the idle law.
                    wrow.push(Categorical::bernoulli(0.3 + 0.6 * stream.uniform()).unwrap());
                }
                alice.push(arow);
                willie.push(wrow);
            }
            let labels: Vec<String> = (0..n_theta).map(|i| format!("h{i}")).collect();
            if let Ok(m) = HypothesisModel::new(labels, alice, willie) {
                return m;
            }
        }
    }

    fn random_bai_instance(stream: &mut RngStream) -> GaussianBanditModel {
        loop {
            let k = 2 + (stream.uniform() * 2.0) as usize; // 2..=3
            let mut alice = vec![0.0];
            let mut willie = vec![0.0];
            for _ in 0..k {
                alice.push(0.3 + 1.7 * stream.uniform());
                willie.push(0.2 + 1.3 * stream.uniform());
            }
            if let Ok(m) = GaussianBanditModel::new(alice, willie) {
                return m;
            }
        }
    }

    #[test]
    fn solver_tracks_grid_oracle_on_random_instances() {
        let opts = SolverOptions::default();
        let mut stream = RngStream::derive(2024, &[90, 1]);
        for trial in 0..3 {
            let m = random_ht_instance(&mut stream);
            let sol = covert_ht_exponent(&m, 1.0, &opts).unwrap();
            // Oracle: per-hypothesis lattice max, then the outer min.
            let mut oracle = f64::INFINITY;
            for theta in 0..m.n_hypotheses() {
                let obj = CovertHtObjective::new(&m, theta).unwrap();
                let (_, v) = grid_maximize(m.k(), 0.0, 1e-3, |q| obj.ratio_opt(q)).unwrap();
                oracle = oracle.min(v);
            }
            assert!(
                (sol.base_value() - oracle).abs() < 1e-3,
                "trial {trial}: solver {} vs oracle {oracle}",
                sol.base_value()
            );
        }
        for trial in 0..2 {
            let b = random_bai_instance(&mut stream);
            let sol = covert_bai_exponent(&b, 1.0, 0.0, &opts).unwrap();
            let obj = CovertBaiObjective::new(
                b.alice_effective_means().to_vec(),
                b.willie_effective_means().to_vec(),
            )
            .unwrap();
            let (_, oracle) = grid_maximize(b.k(), 0.0, 1e-3, |q| obj.ratio_opt(q)).unwrap();
            assert!(
                (sol.base_value() - oracle).abs() < 1e-3,
                "trial {trial}: solver {} vs oracle {oracle}",
                sol.base_value()
            );
        }
    }

    #[test]
    fn grid_wrappers_agree_with_the_iterative_solvers() {
        let opts = SolverOptions::default();
        let reg = presets::threeway_binary().regularize_null(0.02).unwrap();

        let sol = covert_ht_exponent(&reg, 0.5, &opts).unwrap();
        let grid = covert_ht_exponent_grid(&reg, 0.5, 1e-3).unwrap();
        assert!((sol.value - grid).abs() < 2e-3, "covert ht {} vs {grid}", sol.value);

        for variant in [PlainHtVariant::AsWritten, PlainHtVariant::MinOutside] {
            let sol = noncovert_ht_exponent(&reg, variant, &opts).unwrap();
            let grid = noncovert_ht_exponent_grid(&reg, variant, 1e-3).unwrap();
            assert!(
                (sol.value - grid).abs() < 2e-3,
                "plain ht {variant:?} {} vs {grid}",
                sol.value
            );
        }

        let b = presets::two_arm_gaussian();
        let sol = covert_bai_exponent(&b, 1.0, 0.0, &opts).unwrap();
        let grid = covert_bai_exponent_grid(&b, 1.0, 0.0, 1e-3).unwrap();
        assert!((sol.value - grid).abs() < 2e-3, "covert bai {} vs {grid}", sol.value);

        let sol = noncovert_bai_exponent(&b, &opts).unwrap();
        let grid = noncovert_bai_exponent_grid(&b, 1e-3).unwrap();
        assert!((sol.value - grid).abs() < 1e-6, "plain bai {} vs {grid}", sol.value);
        assert!((grid - 0.03125).abs() < 1e-6);
    }

    #[test]
    fn eta_must_be_positive() {
        let b = presets::two_arm_gaussian();
        assert!(matches!(
            covert_bai_exponent(&b, 0.0, 0.0, &SolverOptions::default()),
            Err(Error::InvalidConfig(_))
        ));
    }
}
