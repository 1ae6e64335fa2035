//! Covert sequential hypothesis testing: policy construction and episodes.
//!
//! The policy is the plug-in scheme: for each hypothesis, solve the covert
//! exponent program once to get that hypothesis's probe profile and
//! chi-square price, size the activity rate so the whole-horizon
//! covertness spend is exactly the budget, and derive pairwise stopping
//! thresholds. At run time the agent acts as if its current
//! maximum-likelihood estimate were the truth, and stops the first time
//! that estimate clears every pairwise log-likelihood threshold.
//!
//! Null steps are free: they carry no likelihood information (the idle
//! observation law is hypothesis-independent by model validation), so the
//! state update skips them entirely rather than recomputing a zero.

use crate::episode::{EpisodeResult, RleTrace, StopOutcome, WillieTrace};
use crate::exponent::{CovertHtObjective, SolverOptions};
use crate::model::HypothesisModel;
use crate::prob::{self, ActionDist, Categorical, EffectiveActionDist, RngStream};
use crate::{Error, Result};

/// Precomputed covert testing policy for one model and horizon.
#[derive(Debug, Clone)]
pub struct SeqTestPolicy {
    model: HypothesisModel,
    n: u64,
    eta: f64,
    zeta: f64,
    horizon_cap: u64,
    /// Per-hypothesis activity rate.
    alpha: Vec<f64>,
    /// Per-hypothesis probe profile (the exponent argmax).
    pbar: Vec<EffectiveActionDist>,
    /// Per-hypothesis full action law (null mass included).
    action_dist: Vec<ActionDist>,
    /// Chi-square price of each hypothesis's profile.
    chi2: Vec<f64>,
    /// `gamma[i][j]`: threshold the log-likelihood lead of `i` over `j`
    /// must clear before stopping on `i`. Diagonal unused.
    gamma: Vec<Vec<f64>>,
    /// `loglik[i][x - 1][y]` = log agent-channel likelihood of outcome `y`
    /// under hypothesis `i`, action `x >= 1`.
    loglik: Vec<Vec<Vec<f64>>>,
    /// `per_step_div[c][t]`: monitor-side KL of one step controlled by
    /// hypothesis `c`'s law while `t` is true.
    per_step_div: Vec<Vec<f64>>,
}

/// Build the plug-in policy: one exponent solve per hypothesis, then
/// budget-exact activity rates and pairwise thresholds.
///
/// `n` is the covertness design horizon; the episode cap defaults to `4n`.
/// `zeta` is the threshold margin subtracted from each pairwise
/// divergence rate (not a simplex floor).
pub fn build_policy(
    model: &HypothesisModel,
    n: u64,
    eta: f64,
    zeta: f64,
    horizon_cap: Option<u64>,
    opts: &SolverOptions,
) -> Result<SeqTestPolicy> {
    if n == 0 {
        return Err(Error::InvalidConfig("design horizon n must be positive".into()));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "covertness budget must be positive and finite, got {eta}"
        )));
    }
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "threshold margin must be nonnegative, got {zeta}"
        )));
    }
    let n_theta = model.n_hypotheses();
    let k = model.k();
    let mut alpha = Vec::with_capacity(n_theta);
    let mut pbar = Vec::with_capacity(n_theta);
    let mut chi2 = Vec::with_capacity(n_theta);
    for theta in 0..n_theta {
        let obj = CovertHtObjective::new(model, theta)?;
        let (p, _ratio, _trace) = crate::exponent::dinkelbach(
            k,
            0.0,
            None,
            opts,
            |q| {
                let (v, g, _) = obj.numerator(q);
                (v, g)
            },
            |q| obj.denominator(q),
        )?;
        let price = obj.chi2(&p);
        let a = (2.0 * eta / (n as f64 * price)).sqrt();
        if a > 1.0 {
            return Err(Error::BudgetTooSmall(format!(
                "hypothesis {}: activity rate {a:.4} exceeds 1; horizon n = {n} is too \
                 short to spend budget eta = {eta} at chi-square price {price:.4}",
                model.labels()[theta]
            )));
        }
        alpha.push(a);
        chi2.push(price);
        pbar.push(EffectiveActionDist::new(p)?);
    }

    let mut gamma = vec![vec![0.0; n_theta]; n_theta];
    for i in 0..n_theta {
        for j in 0..n_theta {
            if i == j {
                continue;
            }
            let mut rate = 0.0;
            for x in 1..=k {
                rate += pbar[i].prob(x)
                    * prob::kl_categorical(model.alice(i, x), model.alice(j, x))?;
            }
            let g = n as f64 * alpha[i] * (rate - zeta);
            if g <= 0.0 {
                return Err(Error::BudgetTooSmall(format!(
                    "threshold for {} against {} is {g:.4}; margin zeta = {zeta} \
                     swallows the divergence rate {rate:.4}",
                    model.labels()[i],
                    model.labels()[j]
                )));
            }
            gamma[i][j] = g;
        }
    }

    let mut loglik = Vec::with_capacity(n_theta);
    for theta in 0..n_theta {
        let mut per_action = Vec::with_capacity(k);
        for x in 1..=k {
            per_action.push(model.alice(theta, x).probs().iter().map(|p| p.ln()).collect());
        }
        loglik.push(per_action);
    }

    let mut action_dist = Vec::with_capacity(n_theta);
    for theta in 0..n_theta {
        action_dist.push(ActionDist::new(alpha[theta], pbar[theta].clone())?);
    }

    // Monitor-side per-step divergence for every (control, truth) pair;
    // the covertness ledger charges each realized step at these rates.
    let mut per_step_div = vec![vec![0.0; n_theta]; n_theta];
    for c in 0..n_theta {
        for t in 0..n_theta {
            let channels: Vec<Categorical> =
                (0..=k).map(|x| model.willie(t, x).clone()).collect();
            let mix = prob::control_output_mixture(&action_dist[c], &channels)?;
            per_step_div[c][t] = prob::kl_categorical(&mix, model.willie_null(t))?;
        }
    }

    Ok(SeqTestPolicy {
        model: model.clone(),
        n,
        eta,
        zeta,
        horizon_cap: horizon_cap.unwrap_or(4 * n),
        alpha,
        pbar,
        action_dist,
        chi2,
        gamma,
        loglik,
        per_step_div,
    })
}

impl SeqTestPolicy {
    pub fn model(&self) -> &HypothesisModel {
        &self.model
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn horizon_cap(&self) -> u64 {
        self.horizon_cap
    }

    pub fn alpha(&self, theta: usize) -> f64 {
        self.alpha[theta]
    }

    pub fn pbar(&self, theta: usize) -> &EffectiveActionDist {
        &self.pbar[theta]
    }

    pub fn chi2(&self, theta: usize) -> f64 {
        self.chi2[theta]
    }

    pub fn gamma(&self, i: usize, j: usize) -> f64 {
        self.gamma[i][j]
    }

    /// Log agent-channel likelihood of outcome `y` under hypothesis
    /// `theta` and non-null action `x`.
    pub fn log_likelihood(&self, theta: usize, x: usize, y: usize) -> f64 {
        self.loglik[theta][x - 1][y]
    }

    /// Monitor-side KL of one step when control hypothesis `c` drives the
    /// action law and `t` is true.
    pub fn per_step_divergence(&self, c: usize, t: usize) -> f64 {
        self.per_step_div[c][t]
    }

    /// The monitor-facing per-step output law when the control hypothesis
    /// matches the truth `theta`.
    pub fn output_mixture(&self, theta: usize) -> Result<Categorical> {
        let channels: Vec<Categorical> = (0..=self.model.k())
            .map(|x| self.model.willie(theta, x).clone())
            .collect();
        prob::control_output_mixture(&self.action_dist[theta], &channels)
    }

    /// Whole-horizon covertness spend per hypothesis,
    /// `n * alpha^2 * chi2 / 2`; equal to the budget by construction.
    pub fn covert_budget_terms(&self) -> Vec<(String, f64)> {
        (0..self.alpha.len())
            .map(|i| {
                (
                    self.model.labels()[i].clone(),
                    self.n as f64 * self.alpha[i] * self.alpha[i] * self.chi2[i] / 2.0,
                )
            })
            .collect()
    }
}

/// Running state of one test episode.
pub struct SeqTestState<'a> {
    policy: &'a SeqTestPolicy,
    t: u64,
    cum: Vec<f64>,
    ml: usize,
    decision: Option<usize>,
    action_counts: Vec<u64>,
    ml_step_counts: Vec<u64>,
}

impl<'a> SeqTestState<'a> {
    pub fn new(policy: &'a SeqTestPolicy) -> Self {
        let n_theta = policy.model.n_hypotheses();
        SeqTestState {
            policy,
            t: 0,
            cum: vec![0.0; n_theta],
            ml: 0,
            decision: None,
            action_counts: vec![0; policy.model.k() + 1],
            ml_step_counts: vec![0; n_theta],
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Current maximum-likelihood hypothesis (lowest index on ties).
    pub fn ml(&self) -> usize {
        self.ml
    }

    pub fn decision(&self) -> Option<usize> {
        self.decision
    }

    pub fn action_counts(&self) -> &[u64] {
        &self.action_counts
    }

    pub fn ml_step_counts(&self) -> &[u64] {
        &self.ml_step_counts
    }

    /// Log-likelihood lead of hypothesis `a` over `b`; exactly
    /// antisymmetric because both sides are the same float subtraction.
    pub fn pairwise_llr(&self, a: usize, b: usize) -> f64 {
        self.cum[a] - self.cum[b]
    }

    /// Total non-null actions taken so far.
    pub fn effective_pulls(&self) -> u64 {
        self.action_counts.iter().skip(1).sum()
    }

    /// Covertness ledger: realized steps charged at the analytic per-step
    /// divergence of the control hypothesis that drove them.
    pub fn kl_bound(&self, truth: usize) -> f64 {
        self.ml_step_counts
            .iter()
            .enumerate()
            .map(|(c, &count)| count as f64 * self.policy.per_step_div[c][truth])
            .sum()
    }

    fn refresh_ml(&mut self) {
        let mut best = 0;
        for i in 1..self.cum.len() {
            if self.cum[i] > self.cum[best] {
                best = i;
            }
        }
        self.ml = best;
    }

    fn clears_thresholds(&self) -> bool {
        let i = self.ml;
        (0..self.cum.len())
            .filter(|&j| j != i)
            .all(|j| self.cum[i] - self.cum[j] >= self.policy.gamma[i][j])
    }

    /// Advance one step: draw an action from the current control
    /// hypothesis's law, observe, update. Returns the decision if this
    /// step triggered the stopping rule. The action stream decides which
    /// action fires; the agent stream supplies the observation.
    ///
    /// Returns the raw action taken as well, for callers recording traces.
    pub fn step(
        &mut self,
        truth: usize,
        action_stream: &mut RngStream,
        agent_stream: &mut RngStream,
    ) -> Result<(usize, Option<usize>)> {
        if self.decision.is_some() {
            return Err(Error::SteppedAfterStop);
        }
        let control = self.ml;
        self.ml_step_counts[control] += 1;
        let x = self.policy.action_dist[control].sample(action_stream);
        self.action_counts[x] += 1;
        self.t += 1;
        if x == 0 {
            // Null step: the idle observation law is shared by every
            // hypothesis, so the likelihood state is unchanged by fiat.
            return Ok((0, None));
        }
        let y = self.policy.model.alice(truth, x).sample(agent_stream);
        for (theta, cum) in self.cum.iter_mut().enumerate() {
            *cum += self.policy.loglik[theta][x - 1][y];
        }
        self.refresh_ml();
        if self.clears_thresholds() {
            self.decision = Some(self.ml);
            return Ok((x, self.decision));
        }
        Ok((x, None))
    }
}

/// Run one untraced episode to decision or the horizon cap. Timeout
/// episodes carry no decision.
pub fn run_episode(
    policy: &SeqTestPolicy,
    truth: usize,
    action_stream: &mut RngStream,
    agent_stream: &mut RngStream,
) -> Result<EpisodeResult> {
    let mut state = SeqTestState::new(policy);
    let mut outcome = None;
    while state.t < policy.horizon_cap {
        let (_x, decided) = state.step(truth, action_stream, agent_stream)?;
        if decided.is_some() {
            outcome = Some(StopOutcome::Stopped { step: state.t });
            break;
        }
    }
    let outcome = outcome.unwrap_or(StopOutcome::Timeout {
        cap: policy.horizon_cap,
    });
    // A timeout carries no decision: the run witnessed the cap, and the
    // batch layer counts it separately from decided-and-wrong episodes.
    let decision = state.decision;
    Ok(EpisodeResult {
        truth,
        decision,
        correct: decision == Some(truth),
        effective_pulls: state.effective_pulls(),
        kl_bound: state.kl_bound(truth),
        outcome,
        action_trace: None,
        control_trace: None,
        willie_trace: None,
    })
}

/// Run a fixed-length traced episode, recording actions, controls, and
/// monitor observations.
///
/// With `never_stop` the stopping rule is ignored (the schedule keeps
/// transmitting); otherwise the agent falls silent after its decision and
/// the remaining steps are forced null. Either way exactly `steps` monitor
/// observations are produced, so traces are comparable across classes.
pub fn run_traced(
    policy: &SeqTestPolicy,
    truth: usize,
    steps: u64,
    action_stream: &mut RngStream,
    agent_stream: &mut RngStream,
    willie_stream: &mut RngStream,
    never_stop: bool,
) -> Result<EpisodeResult> {
    let mut state = SeqTestState::new(policy);
    let mut actions = RleTrace::new();
    let mut controls = RleTrace::new();
    let mut zs = Vec::with_capacity(steps as usize);
    let mut stopped_at: Option<u64> = None;
    let mut kl = 0.0;
    for _ in 0..steps {
        let control = state.ml;
        let silent = !never_stop && state.decision.is_some();
        let x = if silent {
            0usize
        } else {
            let (x, decided) = state.step(truth, action_stream, agent_stream)?;
            if never_stop {
                // Dummy schedule: discard the decision and keep going.
                state.decision = None;
            } else if decided.is_some() && stopped_at.is_none() {
                stopped_at = Some(state.t);
            }
            x
        };
        actions.push(x as u32);
        controls.push(control as u32);
        if !silent {
            kl += policy.per_step_div[control][truth];
        }
        let z = policy.model.willie(truth, x).sample(willie_stream);
        zs.push(z as u32);
    }
    let outcome = match stopped_at {
        Some(step) => StopOutcome::Stopped { step },
        None => StopOutcome::Timeout { cap: steps },
    };
    let decision = state.decision.or(Some(state.ml));
    Ok(EpisodeResult {
        truth,
        decision,
        correct: decision == Some(truth),
        effective_pulls: state.effective_pulls(),
        kl_bound: kl,
        outcome,
        action_trace: Some(actions),
        control_trace: Some(controls),
        willie_trace: Some(WillieTrace::Discrete(zs)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::SolverOptions;
    use crate::model::presets;

    fn reg_model() -> HypothesisModel {
        presets::threeway_binary().regularize_null(0.02).unwrap()
    }

    fn policy_10k() -> SeqTestPolicy {
        build_policy(
            &reg_model(),
            10_000,
            0.5,
            0.01,
            None,
            &SolverOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn activity_rate_and_thresholds_match_scripted_values() {
        let p = policy_10k();
        // Scripted: hypothesis b's optimal profile is (0.5, 0.5) with
        // chi-square price 55.3131313..., so at n = 1e4, eta = 0.5 the
        // rate is sqrt(1 / (1e4 * 55.3131...)).
        let expected_alpha = (1.0f64 / (1e4 * 55.313_131_313_131_31)).sqrt();
        assert!((p.alpha(1) - expected_alpha).abs() < 1e-8, "{}", p.alpha(1));
        assert!((p.chi2(1) - 55.313_131_313_131_31).abs() < 2e-3);
        // Threshold of b against a: n * alpha * (rate - zeta) with the
        // pairwise divergence rate 0.5 * D(Ber(0.9)||Ber(0.6)).
        let expected_gamma = 1e4 * expected_alpha * (0.113_144_580_592_679_44 - 0.01);
        assert!(
            (p.gamma(1, 0) - expected_gamma).abs() < 1e-3,
            "{} vs {expected_gamma}",
            p.gamma(1, 0)
        );
        assert_eq!(p.horizon_cap(), 40_000);
    }

    #[test]
    fn budget_spend_is_exact_per_hypothesis() {
        let p = policy_10k();
        for (label, spend) in p.covert_budget_terms() {
            assert!((spend - 0.5).abs() <= 1e-9, "{label}: {spend}");
        }
    }

    #[test]
    fn forced_observation_moves_the_pairwise_llr_by_the_log_ratio() {
        let p = policy_10k();
        // Action 1, outcome 1: hypothesis b sees it with 0.9, c with 0.6.
        let delta = p.log_likelihood(1, 1, 1) - p.log_likelihood(2, 1, 1);
        assert!((delta - (0.9f64 / 0.6).ln()).abs() < 1e-12);
        assert!((delta - 0.405_465_108_108_164_4).abs() < 1e-12);
    }

    #[test]
    fn llr_is_exactly_antisymmetric_along_a_run() {
        let p = policy_10k();
        let mut state = SeqTestState::new(&p);
        let mut action = RngStream::derive(7, &[1, 0, 0]);
        let mut agent = RngStream::derive(7, &[1, 0, 1]);
        for _ in 0..50_000 {
            if state.decision().is_some() {
                break;
            }
            state.step(1, &mut action, &mut agent).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    let fwd = state.pairwise_llr(a, b);
                    let bwd = state.pairwise_llr(b, a);
                    assert!(fwd == -bwd, "asymmetry at t={}", state.t());
                }
                assert_eq!(state.pairwise_llr(a, a), 0.0);
            }
        }
    }

    #[test]
    fn null_steps_leave_likelihoods_untouched() {
        let p = policy_10k();
        let mut state = SeqTestState::new(&p);
        let mut action = RngStream::derive(11, &[1, 2, 0]);
        let mut agent = RngStream::derive(11, &[1, 2, 1]);
        let mut last = [0.0f64; 3];
        for _ in 0..5_000 {
            let pulls_before = state.effective_pulls();
            state.step(0, &mut action, &mut agent).unwrap();
            if state.effective_pulls() == pulls_before {
                // Null step: every pairwise statistic is bitwise unchanged.
                for (a, item) in last.iter().enumerate() {
                    assert_eq!(state.pairwise_llr(a, 0), *item);
                }
            } else {
                for (a, item) in last.iter_mut().enumerate() {
                    *item = state.pairwise_llr(a, 0);
                }
            }
            if state.decision().is_some() {
                break;
            }
        }
        // With an activity rate near 1.3e-3, a 5000-step prefix must have
        // taken at least one null step for the check above to bite.
        assert!(state.action_counts()[0] > 0);
    }

    #[test]
    fn stopping_clears_every_threshold_and_locks_the_state() {
        let p = build_policy(
            &reg_model(),
            2_500,
            0.5,
            0.01,
            None,
            &SolverOptions::default(),
        )
        .unwrap();
        let mut decided = 0;
        for ep in 0..4u64 {
            let mut state = SeqTestState::new(&p);
            let mut action = RngStream::derive(99, &[1, ep, 0]);
            let mut agent = RngStream::derive(99, &[1, ep, 1]);
            while state.t() < p.horizon_cap() {
                if let (_, Some(d)) = state.step(2, &mut action, &mut agent).unwrap() {
                    decided += 1;
                    for j in 0..3 {
                        if j != d {
                            assert!(state.pairwise_llr(d, j) >= p.gamma(d, j));
                        }
                    }
                    let e = state.step(2, &mut action, &mut agent).unwrap_err();
                    assert!(matches!(e, Error::SteppedAfterStop));
                    break;
                }
            }
        }
        assert!(decided > 0, "no episode decided within the cap");
    }

    #[test]
    fn episodes_are_deterministic_given_streams() {
        let p = build_policy(&reg_model(), 2_500, 0.5, 0.01, None, &SolverOptions::default())
            .unwrap();
        let run = || {
            let mut action = RngStream::derive(5, &[1, 3, 0]);
            let mut agent = RngStream::derive(5, &[1, 3, 1]);
            run_episode(&p, 0, &mut action, &mut agent).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn tiny_cap_times_out_without_a_decision() {
        let p = build_policy(&reg_model(), 10_000, 0.5, 0.01, Some(5), &SolverOptions::default())
            .unwrap();
        let mut action = RngStream::derive(5, &[1, 4, 0]);
        let mut agent = RngStream::derive(5, &[1, 4, 1]);
        let r = run_episode(&p, 1, &mut action, &mut agent).unwrap();
        assert!(r.timed_out());
        assert_eq!(r.stop_time(), 5);
        assert_eq!(r.decision, None);
        assert!(!r.correct);
    }

    #[test]
    fn traced_runs_have_fixed_length_and_post_stop_silence() {
        let p = build_policy(&reg_model(), 1_000, 2.0, 0.01, None, &SolverOptions::default())
            .unwrap();
        let steps = 6_000;
        let mut found_stop = false;
        for ep in 0..6u64 {
            let mut action = RngStream::derive(21, &[3, ep, 0]);
            let mut agent = RngStream::derive(21, &[3, ep, 1]);
            let mut willie = RngStream::derive(21, &[3, ep, 2]);
            let r = run_traced(&p, 1, steps, &mut action, &mut agent, &mut willie, false)
                .unwrap();
            let actions = r.action_trace.as_ref().unwrap();
            assert_eq!(actions.len(), steps);
            match r.willie_trace.as_ref().unwrap() {
                WillieTrace::Discrete(zs) => assert_eq!(zs.len(), steps as usize),
                WillieTrace::Gaussian(_) => panic!("discrete model"),
            }
            if let StopOutcome::Stopped { step } = r.outcome {
                found_stop = true;
                let tail: Vec<u32> = actions.iter().skip(step as usize).collect();
                assert!(tail.iter().all(|&x| x == 0), "agent spoke after stopping");
            }
        }
        assert!(found_stop, "no traced episode stopped; enlarge the budget");
    }

    #[test]
    fn never_stop_mode_keeps_transmitting() {
        let p = build_policy(&reg_model(), 1_000, 2.0, 0.01, None, &SolverOptions::default())
            .unwrap();
        let steps = 6_000;
        let mut action = RngStream::derive(22, &[3, 0, 0]);
        let mut agent = RngStream::derive(22, &[3, 0, 1]);
        let mut willie = RngStream::derive(22, &[3, 0, 2]);
        let r =
            run_traced(&p, 1, steps, &mut action, &mut agent, &mut willie, true).unwrap();
        assert!(r.timed_out());
        let actions = r.action_trace.as_ref().unwrap();
        // Activity persists across the whole window: some non-null action
        // in the final quarter.
        let tail_active = actions
            .iter()
            .skip((steps as usize * 3) / 4)
            .filter(|&x| x > 0)
            .count();
        assert!(tail_active > 0);
    }

    #[test]
    fn output_mixture_matches_the_per_step_ledger_rate() {
        let p = policy_10k();
        for theta in 0..3 {
            let mix = p.output_mixture(theta).unwrap();
            let d = prob::kl_categorical(&mix, p.model().willie_null(theta)).unwrap();
            assert!((d - p.per_step_divergence(theta, theta)).abs() < 1e-15);
        }
    }

    #[test]
    fn raw_degenerate_null_fails_policy_construction() {
        let e = build_policy(
            &presets::threeway_binary(),
            10_000,
            0.5,
            0.01,
            None,
            &SolverOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::AbsoluteContinuityViolation(_)), "{e}");
    }

    #[test]
    fn infeasible_budgets_are_rejected() {
        let m = reg_model();
        let opts = SolverOptions::default();
        // Oversized budget at a tiny horizon: activity rate above 1.
        let e = build_policy(&m, 10, 1e6, 0.01, None, &opts).unwrap_err();
        assert!(matches!(e, Error::BudgetTooSmall(_)), "{e}");
        // Margin swallowing the divergence rate.
        let e = build_policy(&m, 10_000, 0.5, 10.0, None, &opts).unwrap_err();
        assert!(matches!(e, Error::BudgetTooSmall(_)), "{e}");
    }
}
