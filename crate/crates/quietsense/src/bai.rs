//! Covert best-arm identification with a sequential generalized
//! likelihood-ratio stopping rule.
//!
//! The agent tracks empirical arm means, periodically re-solves the covert
//! allocation program at the plug-in bandit, and sizes its activity rate
//! so the whole run's covertness spend targets the budget at the planned
//! confidence. Stopping compares the empirical best arm's evidence lead
//! against a threshold that grows with the pull count slowly enough to
//! keep the error probability under `delta`.
//!
//! Until every non-null arm has been pulled once the plug-in program is
//! degenerate (all empirical gaps collapse), so a bootstrap control runs
//! instead: a uniform floored profile whose rate spends the budget evenly
//! over the full horizon cap.
//!
//! That same horizon-spread rate also serves as a floor on the activity
//! rate after the bootstrap. The plug-in rate is proportional to the
//! empirical alternative gap, so an episode whose sample means wander
//! near a tie would otherwise throttle itself to zero activity and sit
//! frozen in a possibly wrong ordering until the cap; over an unbounded
//! horizon such freezes thaw on their own, but a finite cap truncates
//! the recovery. The floor guarantees the run keeps sampling at least as
//! fast as the schedule that spreads the whole budget over the whole
//! horizon, which costs nothing it was not already prepared to spend.

use crate::episode::{EpisodeResult, StopOutcome};
use crate::exponent::{alt_inf_raw, best_slot, CovertBaiObjective, SolverOptions};
use crate::model::GaussianBanditModel;
use crate::prob::{ActionDist, EffectiveActionDist, RngStream};
use crate::{Error, Result};

/// Tuning for one identification run.
#[derive(Debug, Clone)]
pub struct BaiPolicyConfig {
    /// Target error probability, in (0, 1).
    pub delta: f64,
    /// Covertness budget, in nats.
    pub eta: f64,
    /// Simplex floor for the allocation program; `None` means `1e-3 / k`.
    pub zeta_floor: Option<f64>,
    /// Upper-quantile level used when summarizing stop times.
    pub kappa: f64,
    /// Steps between allocation refreshes (the allocation only moves when
    /// the empirical bandit does, so 1 costs little).
    pub recompute_period: u64,
    /// Hard episode cap; `None` means `ceil(200 * ln(1/delta)^2)`.
    pub horizon_cap: Option<u64>,
    /// Arm count `K` in the stopping threshold, overridable for
    /// experiments; `None` means the model's non-null arm count.
    pub threshold_arms: Option<usize>,
}

impl BaiPolicyConfig {
    pub fn new(delta: f64, eta: f64) -> Self {
        BaiPolicyConfig {
            delta,
            eta,
            zeta_floor: None,
            kappa: 0.05,
            recompute_period: 1,
            horizon_cap: None,
            threshold_arms: None,
        }
    }
}

/// Empirical reward state over the non-null arms (slot `i` is arm
/// `i + 1`). Unpulled arms report mean zero.
#[derive(Debug, Clone, Default)]
pub struct EmpiricalBandit {
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl EmpiricalBandit {
    pub fn new(k: usize) -> Self {
        EmpiricalBandit {
            counts: vec![0; k],
            sums: vec![0.0; k],
        }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, slot: usize, reward: f64) {
        self.counts[slot] += 1;
        self.sums[slot] += reward;
    }

    pub fn pulls(&self, slot: usize) -> u64 {
        self.counts[slot]
    }

    pub fn total_pulls(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self, slot: usize) -> f64 {
        if self.counts[slot] == 0 {
            0.0
        } else {
            self.sums[slot] / self.counts[slot] as f64
        }
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.k()).map(|i| self.mean(i)).collect()
    }

    pub fn all_pulled(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    /// Empirical best arm slot, lowest index on ties.
    pub fn best_slot(&self) -> usize {
        best_slot(&self.means())
    }
}

/// The threshold shape `f(a) = exp(K - a) * (a / K)^K`, decreasing from 1
/// at `a = K`.
pub fn threshold_shape(k: usize, a: f64) -> f64 {
    let kf = k as f64;
    (kf - a).exp() * (a / kf).powi(k as i32)
}

/// Invert the threshold shape: the unique `a >= K` with `f(a) = delta`,
/// by bisection to absolute precision 1e-10.
pub fn invert_threshold_shape(k: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "confidence level must lie in (0, 1], got {delta}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("threshold needs at least one arm".into()));
    }
    let kf = k as f64;
    let mut lo = kf;
    let mut hi = kf + 10.0 * delta.ln().abs() + 10.0;
    if threshold_shape(k, hi) > delta {
        return Err(Error::SolverDiverged(format!(
            "threshold shape still above {delta} at a = {hi}"
        )));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if threshold_shape(k, mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Stopping threshold after `pulls` samples: `K ln(T^2 + T) + f^{-1}(delta)`,
/// with the inverse shape supplied by the caller (it is pull-independent).
pub fn stopping_threshold(k: usize, pulls: u64, shape_inverse: f64) -> f64 {
    let t = pulls as f64;
    k as f64 * (t * t + t).ln() + shape_inverse
}

/// Generalized likelihood-ratio statistic of the empirical best arm
/// against its nearest challenger:
/// `min_x T_b T_x (mean_b - mean_x)^2 / (2 (T_b + T_x))`.
///
/// Zero with no challenger slot until every arm has been pulled.
pub fn glr_statistic(bandit: &EmpiricalBandit) -> (f64, Option<usize>) {
    if !bandit.all_pulled() || bandit.k() < 2 {
        return (0.0, None);
    }
    let weights: Vec<f64> = bandit.counts.iter().map(|&c| c as f64).collect();
    let means = bandit.means();
    let (value, _, challenger) = alt_inf_raw(&weights, &means, best_slot(&means));
    (value, Some(challenger))
}

/// The activity-rate cap. The formula below can exceed 1 outright (large
/// budget, modest confidence, or a noisy early plug-in bandit that
/// overstates the gaps); runs clamp here and count how often they did, so
/// the covertness audit can expose what the clamp cost.
pub const ALPHA_CLAMP: f64 = 1.0 - 1e-9;

/// Activity rate at a refreshed allocation:
/// `(2 eta / chi2) * alt_inf / ln(1/delta)`, clamped to `(0, ALPHA_CLAMP]`.
pub fn activity_rate(eta: f64, chi2: f64, alt_inf: f64, delta: f64) -> f64 {
    activity_rate_raw(eta, chi2, alt_inf, delta).min(ALPHA_CLAMP)
}

fn activity_rate_raw(eta: f64, chi2: f64, alt_inf: f64, delta: f64) -> f64 {
    (2.0 * eta / chi2) * alt_inf / delta.ln().abs()
}

/// A compiled identification policy: the model, resolved knobs, and the
/// cached pieces every episode shares.
#[derive(Debug, Clone)]
pub struct BaiPolicy {
    model: GaussianBanditModel,
    delta: f64,
    eta: f64,
    zeta: f64,
    kappa: f64,
    recompute_period: u64,
    horizon_cap: u64,
    threshold_arms: usize,
    shape_inverse: f64,
    bootstrap_alpha: f64,
    bootstrap_pbar: Vec<f64>,
    bootstrap_rate: f64,
}

/// Resolve a config against a model: defaults, feasibility of the floored
/// program, and the bootstrap control.
pub fn build_policy(model: &GaussianBanditModel, config: &BaiPolicyConfig) -> Result<BaiPolicy> {
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "error probability must lie in (0, 1), got {}",
            config.delta
        )));
    }
    if !(config.eta > 0.0 && config.eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "covertness budget must be positive and finite, got {}",
            config.eta
        )));
    }
    if !(config.kappa > 0.0 && config.kappa <= 0.5) {
        return Err(Error::InvalidConfig(format!(
            "quantile level must lie in (0, 0.5], got {}",
            config.kappa
        )));
    }
    if config.recompute_period == 0 {
        return Err(Error::InvalidConfig("recompute period must be positive".into()));
    }
    let k = model.k();
    let zeta = config.zeta_floor.unwrap_or(1e-3 / k as f64);
    if !(zeta >= 0.0 && zeta * k as f64 <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "floor {zeta} infeasible for {k} arms"
        )));
    }
    let horizon_cap = config.horizon_cap.unwrap_or_else(|| {
        let l = (1.0 / config.delta).ln();
        (200.0 * l * l).ceil() as u64
    });
    if horizon_cap == 0 {
        return Err(Error::InvalidConfig("horizon cap must be positive".into()));
    }
    // Feasibility of the monitor-side price on the floored simplex; also
    // rules out the all-zero monitor-mean degeneracy.
    let probe = CovertBaiObjective::new(
        model.alice_effective_means().to_vec(),
        model.willie_effective_means().to_vec(),
    )?;
    probe.check_mean_sign(zeta)?;

    let shape_inverse = invert_threshold_shape(
        config.threshold_arms.unwrap_or(k),
        config.delta,
    )?;

    // Bootstrap control: uniform floored profile, rate sized to spend the
    // budget evenly over the full cap in the quadratic approximation.
    let bootstrap_pbar = vec![1.0 / k as f64; k];
    let m: f64 = bootstrap_pbar
        .iter()
        .zip(model.willie_effective_means())
        .map(|(p, mu)| p * mu)
        .sum();
    let chi2_unif = (m * m).exp_m1();
    let bootstrap_alpha =
        (2.0 * config.eta / (horizon_cap as f64 * chi2_unif)).sqrt().min(1.0 - 1e-9);
    let bootstrap_rate = crate::adversary::gaussian_control_divergence(
        bootstrap_alpha,
        &EffectiveActionDist::new(bootstrap_pbar.clone())?,
        model.willie_effective_means(),
    )?;

    Ok(BaiPolicy {
        model: model.clone(),
        delta: config.delta,
        eta: config.eta,
        zeta,
        kappa: config.kappa,
        recompute_period: config.recompute_period,
        horizon_cap,
        threshold_arms: config.threshold_arms.unwrap_or(k),
        shape_inverse,
        bootstrap_alpha,
        bootstrap_pbar,
        bootstrap_rate,
    })
}

impl BaiPolicy {
    pub fn model(&self) -> &GaussianBanditModel {
        &self.model
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn zeta_floor(&self) -> f64 {
        self.zeta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn horizon_cap(&self) -> u64 {
        self.horizon_cap
    }

    pub fn shape_inverse(&self) -> f64 {
        self.shape_inverse
    }

    /// Horizon-spread activity rate: spends the whole budget evenly over
    /// the whole cap in the quadratic approximation. Used by the
    /// bootstrap control and as the post-bootstrap activity floor.
    pub fn activity_floor(&self) -> f64 {
        self.bootstrap_alpha
    }

    /// Threshold at a given pull count under this policy's knobs.
    pub fn threshold(&self, pulls: u64) -> f64 {
        stopping_threshold(self.threshold_arms, pulls, self.shape_inverse)
    }
}

/// The allocation in force between refreshes.
#[derive(Debug, Clone)]
struct ControlState {
    /// Pull count of the bandit this control was solved at.
    version: u64,
    dist: ActionDist,
    pbar: Vec<f64>,
    /// Exact per-step divergence of this control's output law.
    step_rate: f64,
    bootstrap: bool,
    /// Whether the rate formula exceeded the cap at this refresh.
    clamped: bool,
}

fn refresh_control(
    policy: &BaiPolicy,
    bandit: &EmpiricalBandit,
    prev: Option<&ControlState>,
) -> Result<ControlState> {
    let version = bandit.total_pulls();
    let means = bandit.means();
    let degenerate = !bandit.all_pulled()
        || means.iter().filter(|&&m| m == means[best_slot(&means)]).count() > 1;
    if degenerate {
        return Ok(ControlState {
            version,
            dist: ActionDist::new(
                policy.bootstrap_alpha,
                EffectiveActionDist::new(policy.bootstrap_pbar.clone())?,
            )?,
            pbar: policy.bootstrap_pbar.clone(),
            step_rate: policy.bootstrap_rate,
            bootstrap: true,
            clamped: policy.bootstrap_alpha >= ALPHA_CLAMP,
        });
    }
    let obj = CovertBaiObjective::new(means, policy.model.willie_effective_means().to_vec())?;
    let warm = prev.filter(|c| !c.bootstrap).map(|c| c.pbar.as_slice());
    let opts = if warm.is_some() {
        SolverOptions::warm_refresh()
    } else {
        SolverOptions {
            max_outer: 40,
            max_inner: 400,
            tolerance: 1e-9,
            polish_rounds: 7,
        }
    };
    let solved = obj
        .maximize(policy.zeta, warm, &opts)
        .or_else(|_| obj.maximize(policy.zeta, None, &SolverOptions::default()))?;
    let (p, _ratio, _trace) = solved;
    let m: f64 = p
        .iter()
        .zip(policy.model.willie_effective_means())
        .map(|(pi, mu)| pi * mu)
        .sum();
    let chi2 = (m * m).exp_m1();
    let (inf, _, _) = alt_inf_raw(&p, &obj.alice, obj.best);
    let raw = activity_rate_raw(policy.eta, chi2, inf, policy.delta);
    let alpha = raw.clamp(policy.bootstrap_alpha, ALPHA_CLAMP);
    let effective = EffectiveActionDist::with_floor(p.clone(), policy.zeta)?;
    let step_rate = crate::adversary::gaussian_control_divergence(
        alpha,
        &effective,
        policy.model.willie_effective_means(),
    )?;
    Ok(ControlState {
        version,
        dist: ActionDist::new(alpha, effective)?,
        pbar: p,
        step_rate,
        bootstrap: false,
        clamped: raw > ALPHA_CLAMP,
    })
}

/// One finished identification episode.
#[derive(Debug, Clone)]
pub struct BaiEpisode {
    pub result: EpisodeResult,
    /// `(statistic, threshold)` at the stopping step; `None` on timeout.
    pub stop_glr: Option<(f64, f64)>,
    /// Per-step divergence rates, when recording was requested.
    pub kl_series: Option<Vec<f64>>,
    /// How many times the allocation was actually re-solved.
    pub refreshes: u64,
    /// How many of those refreshes hit the activity-rate cap. Nonzero
    /// counts flag spend the budget formula did not anticipate; see the
    /// covertness audit.
    pub clamped_refreshes: u64,
}

/// Run one episode to the stopping rule or the horizon cap. Timeout
/// episodes report the empirical best arm at the cap. The action stream
/// drives which arm fires; the agent stream supplies rewards.
pub fn run_episode(
    policy: &BaiPolicy,
    action_stream: &mut RngStream,
    agent_stream: &mut RngStream,
    record_series: bool,
) -> Result<BaiEpisode> {
    let k = policy.model.k();
    let truth = policy.model.best_arm() - 1;
    let alice_means = policy.model.alice_effective_means().to_vec();
    let mut bandit = EmpiricalBandit::new(k);
    let mut control = refresh_control(policy, &bandit, None)?;
    let mut refreshes = 1u64;
    let mut clamped_refreshes = u64::from(control.clamped);
    let mut kl = 0.0;
    let mut series = record_series.then(Vec::new);
    let mut stopped: Option<(u64, usize, f64, f64)> = None;
    for t in 0..policy.horizon_cap {
        if t % policy.recompute_period == 0 && control.version != bandit.total_pulls() {
            control = refresh_control(policy, &bandit, Some(&control))?;
            refreshes += 1;
            clamped_refreshes += u64::from(control.clamped);
        }
        kl += control.step_rate;
        if let Some(s) = series.as_mut() {
            s.push(control.step_rate);
        }
        let x = control.dist.sample(action_stream);
        if x > 0 {
            let slot = x - 1;
            let reward = alice_means[slot] + agent_stream.standard_normal();
            bandit.record(slot, reward);
            let (r, challenger) = glr_statistic(&bandit);
            if challenger.is_some() {
                let gamma = policy.threshold(bandit.total_pulls());
                if r > gamma {
                    stopped = Some((t + 1, bandit.best_slot(), r, gamma));
                    break;
                }
            }
        }
    }
    let (outcome, decision, stop_glr) = match stopped {
        Some((step, slot, r, gamma)) => (
            StopOutcome::Stopped { step },
            Some(slot),
            Some((r, gamma)),
        ),
        None => (
            StopOutcome::Timeout {
                cap: policy.horizon_cap,
            },
            Some(bandit.best_slot()),
            None,
        ),
    };
    Ok(BaiEpisode {
        result: EpisodeResult {
            truth,
            decision,
            correct: decision == Some(truth),
            effective_pulls: bandit.total_pulls(),
            kl_bound: kl,
            outcome,
            action_trace: None,
            control_trace: None,
            willie_trace: None,
        },
        stop_glr,
        kl_series: series,
        refreshes,
        clamped_refreshes,
    })
}

/// Upper `kappa`-quantile of observed stop times: sort ascending and take
/// the entry at index `N - ceil(kappa N)`. Needs at least `1/kappa`
/// episodes to say anything about that tail.
pub fn tau_sup_estimate(stop_times: &[u64], kappa: f64) -> Result<u64> {
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::InvalidConfig(format!(
            "quantile level must lie in (0, 0.5], got {kappa}"
        )));
    }
    let n = stop_times.len();
    let need = (1.0 / kappa).ceil() as usize;
    if n < need {
        return Err(Error::TooFewEpisodes { need, got: n });
    }
    let mut sorted = stop_times.to_vec();
    sorted.sort_unstable();
    let idx = n - ((kappa * n as f64).ceil() as usize);
    Ok(sorted[idx.min(n - 1)])
}
