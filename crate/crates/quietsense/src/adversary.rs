//! Covertness audits and an explicit monitor.
//!
//! Everything here takes the monitor's side: exact per-step divergence of
//! a control's output law against the idle law, cumulative budget ledgers,
//! plug-in estimates from observed traces, and a product likelihood-ratio
//! detector whose miss/false-alarm rates can be compared against the
//! information-theoretic floor `1 - sqrt(eta)`.

use crate::prob::{self, ActionDist, Categorical, EffectiveActionDist};
use crate::{Error, Result};
use serde::Serialize;

/// Exact per-step divergence of a discrete control: KL of the output
/// mixture against the idle law. `channels[0]` is the idle channel.
pub fn per_step_divergence(control: &ActionDist, channels: &[Categorical]) -> Result<f64> {
    let mix = prob::control_output_mixture(control, channels)?;
    prob::kl_categorical(&mix, &channels[0])
}

/// Exact per-step divergence of a Gaussian control by Simpson quadrature:
/// KL of `(1 - alpha) N(0,1) + alpha * sum_x pbar(x) N(mu_x, 1)` against
/// `N(0,1)`. `willie_means[x - 1]` is the monitor-side mean of effective
/// arm `x`.
///
/// Written as `E_phi[g ln g]` with the likelihood ratio
/// `g(z) = (1 - alpha) + alpha * sum_x pbar(x) exp(mu_x z - mu_x^2 / 2)`,
/// which is strictly positive whenever `alpha < 1`.
pub fn gaussian_control_divergence(
    alpha: f64,
    pbar: &EffectiveActionDist,
    willie_means: &[f64],
) -> Result<f64> {
    if pbar.k() != willie_means.len() {
        return Err(Error::AlphabetMismatch {
            left: pbar.k(),
            right: willie_means.len(),
        });
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "activity rate must lie in [0, 1), got {alpha}"
        )));
    }
    let mu_max = willie_means.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let half_width = 12.0 + mu_max;
    let panels = 1200usize; // even; error well below 1e-9 at this width
    let h = 2.0 * half_width / panels as f64;
    let g = |z: f64| -> f64 {
        let probe: f64 = pbar
            .probs()
            .iter()
            .zip(willie_means)
            .map(|(p, mu)| p * (mu * z - 0.5 * mu * mu).exp())
            .sum();
        (1.0 - alpha) + alpha * probe
    };
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let integrand = |z: f64| -> f64 {
        let gv = g(z);
        phi(z) * gv * gv.ln()
    };
    let mut acc = integrand(-half_width) + integrand(half_width);
    for i in 1..panels {
        let z = -half_width + i as f64 * h;
        acc += integrand(z) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    // KL is nonnegative; quadrature round-off can dip a hair below zero
    // when alpha is tiny.
    Ok((acc * h / 3.0).max(0.0))
}

/// The small-rate quadratic approximation to one step's divergence,
/// `alpha^2 * chi2 / 2`. This is the term whole-horizon budgets are sized
/// against.
pub fn quadratic_leading_term(alpha: f64, chi2: f64) -> f64 {
    0.5 * alpha * alpha * chi2
}

/// Cumulative divergence ledger from per-step rates; nondecreasing since
/// rates are nonnegative.
pub fn cumulative_series(rates: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rates.len());
    let mut acc = 0.0;
    for r in rates {
        acc += r;
        out.push(acc);
    }
    out
}

/// One covertness audit: how much divergence a schedule spends against a
/// budget.
#[derive(Debug, Clone, Serialize)]
pub struct CovertnessReport {
    /// The design budget, in nats.
    pub eta: f64,
    /// Steps audited.
    pub step_count: u64,
    /// Exact accumulated divergence of the schedule's output law.
    pub analytic_bound: f64,
    /// Whole-horizon quadratic budget term the design was sized against.
    pub quadratic_leading_term: f64,
    /// Plug-in estimate from observed traces, when traces were supplied.
    pub empirical_estimate: Option<f64>,
    /// Cumulative per-step ledger, when requested.
    pub per_step_series: Option<Vec<f64>>,
    /// Whether the quadratic budget term respects `eta` (to 1e-9).
    pub within_budget: bool,
}

/// Audit a testing policy's design-point schedule: the control hypothesis
/// equals the truth for the whole design horizon.
pub fn audit_ht_design(
    policy: &crate::seqtest::SeqTestPolicy,
    truth: usize,
    record_series: bool,
) -> Result<CovertnessReport> {
    let n = policy.n();
    let rate = policy.per_step_divergence(truth, truth);
    let quadratic = n as f64
        * quadratic_leading_term(policy.alpha(truth), policy.chi2(truth));
    let series = record_series.then(|| cumulative_series(&vec![rate; n as usize]));
    Ok(CovertnessReport {
        eta: policy.eta(),
        step_count: n,
        analytic_bound: n as f64 * rate,
        quadratic_leading_term: quadratic,
        empirical_estimate: None,
        per_step_series: series,
        within_budget: quadratic <= policy.eta() + 1e-9,
    })
}

/// Audit one realized identification episode from its per-step rates.
pub fn audit_realized_spend(
    eta: f64,
    per_step_rates: &[f64],
    record_series: bool,
) -> CovertnessReport {
    let total: f64 = per_step_rates.iter().sum();
    CovertnessReport {
        eta,
        step_count: per_step_rates.len() as u64,
        analytic_bound: total,
        quadratic_leading_term: total,
        empirical_estimate: None,
        per_step_series: record_series.then(|| cumulative_series(per_step_rates)),
        within_budget: total <= eta + 1e-9,
    }
}

/// Plug-in per-step KL estimate from an observed discrete trace against
/// the idle law. Restricted to tiny alphabets, where the histogram
/// estimator is meaningful at realistic trace lengths.
pub fn empirical_kl_estimate(zs: &[u32], null: &Categorical) -> Result<f64> {
    if null.len() > 3 {
        return Err(Error::InvalidConfig(format!(
            "plug-in estimate supports alphabets up to 3 outcomes, got {}",
            null.len()
        )));
    }
    if zs.is_empty() {
        return Err(Error::TooFewTraces { need: 1, got: 0 });
    }
    let mut counts = vec![0u64; null.len()];
    for &z in zs {
        let z = z as usize;
        if z >= null.len() {
            return Err(Error::AlphabetMismatch {
                left: z + 1,
                right: null.len(),
            });
        }
        counts[z] += 1;
    }
    let m = zs.len() as f64;
    let mut kl = 0.0;
    for (z, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let p_hat = c as f64 / m;
        let q = null.probs()[z];
        if q <= 0.0 {
            return Err(Error::AbsoluteContinuityViolation(format!(
                "observed outcome {z} has zero idle probability"
            )));
        }
        kl += p_hat * (p_hat / q).ln();
    }
    Ok(kl)
}

/// Product likelihood-ratio detector outcome over two labeled trace sets.
#[derive(Debug, Clone, Serialize)]
pub struct DetectorResult {
    /// Trace length the detector integrated over.
    pub k: u64,
    /// Miss rate: active traces declared idle.
    pub alpha: f64,
    /// False-alarm rate: idle traces declared active.
    pub beta: f64,
    /// Information-theoretic floor on `alpha + beta` for a covert
    /// schedule, `max(0, 1 - sqrt(eta))`.
    pub sum_lower_bound: f64,
    /// Whether the floor is vacuous (budget at or above 1 nat).
    pub vacuous: bool,
    /// 95% half-width for `alpha + beta` from the two binomial samples.
    pub ci_halfwidth: f64,
}

/// Minimum traces per class for the detector's rates to be meaningful.
pub const MIN_DETECTOR_TRACES: usize = 500;

/// Run the mean-field product likelihood-ratio test: each trace is scored
/// by the summed log ratio of the design output mixture against the idle
/// law and declared active when the score is nonnegative (unit likelihood
/// threshold).
///
/// `active` holds traces recorded while a schedule was running, `idle`
/// traces of the bare idle law; both must contain at least
/// [`MIN_DETECTOR_TRACES`] traces of equal length.
pub fn detect(
    active: &[Vec<u32>],
    idle: &[Vec<u32>],
    mix: &Categorical,
    null: &Categorical,
    eta: f64,
) -> Result<DetectorResult> {
    if active.len() < MIN_DETECTOR_TRACES || idle.len() < MIN_DETECTOR_TRACES {
        return Err(Error::TooFewTraces {
            need: MIN_DETECTOR_TRACES,
            got: active.len().min(idle.len()),
        });
    }
    if mix.len() != null.len() {
        return Err(Error::AlphabetMismatch {
            left: mix.len(),
            right: null.len(),
        });
    }
    let k = active[0].len();
    if k == 0 || active.iter().chain(idle).any(|t| t.len() != k) {
        return Err(Error::InvalidConfig(
            "detector traces must share one positive length".into(),
        ));
    }
    // Per-outcome log ratios; outcomes impossible under both laws score 0
    // and are never observed anyway.
    let llr: Vec<f64> = mix
        .probs()
        .iter()
        .zip(null.probs())
        .map(|(&m, &q)| {
            if m == 0.0 && q == 0.0 {
                0.0
            } else {
                m.ln() - q.ln()
            }
        })
        .collect();
    let score = |trace: &[u32]| -> f64 { trace.iter().map(|&z| llr[z as usize]).sum() };
    let misses = active.iter().filter(|t| score(t) < 0.0).count();
    let alarms = idle.iter().filter(|t| score(t) >= 0.0).count();
    let alpha = misses as f64 / active.len() as f64;
    let beta = alarms as f64 / idle.len() as f64;
    let var = alpha * (1.0 - alpha) / active.len() as f64
        + beta * (1.0 - beta) / idle.len() as f64;
    let bound = 1.0 - eta.sqrt();
    Ok(DetectorResult {
        k: k as u64,
        alpha,
        beta,
        sum_lower_bound: bound.max(0.0),
        vacuous: bound <= 0.0,
        ci_halfwidth: 1.96 * var.sqrt(),
    })
}

/// Empirical check of the two-point converse bound
/// `alpha + beta >= exp(-D) / 2` for a detector with miss rate `alpha`,
/// false-alarm rate `beta`, against traces carrying total divergence
/// `kl_total`.
#[derive(Debug, Clone, Serialize)]
pub struct BhBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub se: f64,
    pub holds: bool,
}

pub fn bh_bound_check(alpha: f64, beta: f64, kl_total: f64, n_traces: usize) -> BhBoundCheck {
    let lhs = alpha + beta;
    let rhs = 0.5 * (-kl_total).exp();
    let slack = lhs - rhs;
    let n = n_traces.max(1) as f64;
    let se = ((alpha * (1.0 - alpha) + beta * (1.0 - beta)) / n).sqrt();
    BhBoundCheck {
        lhs,
        rhs,
        slack,
        se,
        holds: slack >= -3.0 * se,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::RngStream;

    fn eff(p: &[f64]) -> EffectiveActionDist {
        EffectiveActionDist::new(p.to_vec()).unwrap()
    }

    #[test]
    fn discrete_per_step_divergence_matches_scripted_value() {
        // Control: rate 0.1, single probe Ber(0.6) over idle Ber(0.5);
        // output mixture Ber(0.51).
        let control = ActionDist::new(0.1, eff(&[1.0])).unwrap();
        let channels = vec![
            Categorical::bernoulli(0.5).unwrap(),
            Categorical::bernoulli(0.6).unwrap(),
        ];
        let d = per_step_divergence(&control, &channels).unwrap();
        assert!((d - 2.000_133_354_671_251_9e-4).abs() < 1e-8, "{d}");
    }

    #[test]
    fn idle_control_spends_nothing() {
        let control = ActionDist::new(0.0, eff(&[0.5, 0.5])).unwrap();
        let channels = vec![
            Categorical::bernoulli(0.5).unwrap(),
            Categorical::bernoulli(0.9).unwrap(),
            Categorical::bernoulli(0.1).unwrap(),
        ];
        let d = per_step_divergence(&control, &channels).unwrap();
        assert_eq!(d, 0.0);
        let g = gaussian_control_divergence(0.0, &eff(&[0.5, 0.5]), &[1.0, 0.5]).unwrap();
        assert!(g.abs() < 1e-12);
    }

    /// Independent quadrature: trapezoid over the mixture-of-densities
    /// form at high resolution.
    fn gaussian_kl_oracle(alpha: f64, pbar: &[f64], means: &[f64]) -> f64 {
        let mu_max = means.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let half = 20.0 + mu_max;
        let n = 400_000usize;
        let h = 2.0 * half / n as f64;
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let dens = |z: f64| -> (f64, f64) {
            let phi = norm * (-0.5 * z * z).exp();
            let mut mix = (1.0 - alpha) * phi;
            for (p, mu) in pbar.iter().zip(means) {
                mix += alpha * p * norm * (-0.5 * (z - mu) * (z - mu)).exp();
            }
            (mix, phi)
        };
        let f = |z: f64| -> f64 {
            let (mix, phi) = dens(z);
            if mix <= 0.0 {
                0.0
            } else {
                mix * (mix / phi).ln()
            }
        };
        let mut acc = 0.5 * (f(-half) + f(half));
        for i in 1..n {
            acc += f(-half + i as f64 * h);
        }
        acc * h
    }

    #[test]
    fn gaussian_divergence_matches_independent_quadrature() {
        for &(alpha, ref pbar, ref means) in &[
            (0.3, vec![0.5, 0.5], vec![1.0, 0.5]),
            (0.05, vec![0.3, 0.7], vec![1.0, 0.5]),
            (0.9, vec![1.0], vec![2.0]),
            (0.2, vec![0.2, 0.5, 0.3], vec![0.5, 1.5, 0.25]),
        ] {
            let fast = gaussian_control_divergence(alpha, &eff(pbar), means).unwrap();
            let slow = gaussian_kl_oracle(alpha, pbar, means);
            assert!(
                (fast - slow).abs() < 1e-9 * (1.0 + slow),
                "alpha {alpha}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn small_rate_divergence_tracks_the_quadratic_term() {
        // The design surrogate prices the profile with the worst-case
        // single-mean chi-square; at vanishing rates the exact divergence
        // stays within 10% of that quadratic term on this instance.
        let pbar = eff(&[0.5, 0.5]);
        let means = [1.0, 0.5];
        let m: f64 = 0.5 * 1.0 + 0.5 * 0.5;
        let chi2_surrogate = (m * m).exp_m1();
        assert!((chi2_surrogate - 0.755_054_656_960_298_5).abs() < 1e-12);
        for &alpha in &[0.01, 0.003, 0.001] {
            let exact = gaussian_control_divergence(alpha, &pbar, &means).unwrap();
            let quad = quadratic_leading_term(alpha, chi2_surrogate);
            assert!(
                (exact - quad).abs() <= 0.1 * quad,
                "alpha {alpha}: exact {exact} vs quadratic {quad}"
            );
        }
        // Against the full mixture chi-square the ratio tends to one.
        let chi2_true = 0.25 * 1.0f64.exp() + 0.5 * 0.5f64.exp() + 0.25 * 0.25f64.exp() - 1.0;
        let exact = gaussian_control_divergence(1e-3, &pbar, &means).unwrap();
        let quad = quadratic_leading_term(1e-3, chi2_true);
        assert!((exact / quad - 1.0).abs() < 0.02, "{}", exact / quad);
    }

    #[test]
    fn ledger_is_monotone_and_zero_on_silence() {
        let series = cumulative_series(&[0.1, 0.0, 0.2, 0.05]);
        assert_eq!(series.len(), 4);
        for w in series.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!((series[3] - 0.35).abs() < 1e-15);
        assert!(cumulative_series(&[0.0; 10]).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn plugin_estimate_recovers_the_kl_scale() {
        let null = Categorical::bernoulli(0.3).unwrap();
        let shifted = Categorical::bernoulli(0.45).unwrap();
        let mut stream = RngStream::derive(77, &[3, 0, 2]);
        let m = 200_000;
        let from_null: Vec<u32> = (0..m).map(|_| null.sample(&mut stream) as u32).collect();
        let from_shifted: Vec<u32> =
            (0..m).map(|_| shifted.sample(&mut stream) as u32).collect();
        let near_zero = empirical_kl_estimate(&from_null, &null).unwrap();
        assert!(near_zero < 1e-4, "{near_zero}");
        let kl_true = prob::kl_categorical(&shifted, &null).unwrap();
        let est = empirical_kl_estimate(&from_shifted, &null).unwrap();
        assert!((est - kl_true).abs() < 0.1 * kl_true, "{est} vs {kl_true}");
    }

    #[test]
    fn plugin_estimate_guards_alphabet_size() {
        let wide = Categorical::new(vec![0.25; 4]).unwrap();
        assert!(matches!(
            empirical_kl_estimate(&[0, 1], &wide),
            Err(Error::InvalidConfig(_))
        ));
    }

    fn sample_traces(law: &Categorical, n: usize, k: usize, seed: u64) -> Vec<Vec<u32>> {
        let mut stream = RngStream::derive(seed, &[3, 1, 2]);
        (0..n)
            .map(|_| (0..k).map(|_| law.sample(&mut stream) as u32).collect())
            .collect()
    }

    #[test]
    fn identical_laws_are_undetectable() {
        let null = Categorical::bernoulli(0.4).unwrap();
        let active = sample_traces(&null, 600, 50, 5);
        let idle = sample_traces(&null, 600, 50, 6);
        let r = detect(&active, &idle, &null, &null, 0.25).unwrap();
        // Scores are identically zero, so every trace is declared active:
        // all alarms, no misses.
        assert!((r.alpha + r.beta - 1.0).abs() <= 3.0 * r.ci_halfwidth + 1e-12);
        assert!(!r.vacuous);
        assert!((r.sum_lower_bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn loud_schedules_are_caught() {
        let null = Categorical::bernoulli(0.5).unwrap();
        let loud = Categorical::bernoulli(0.9).unwrap();
        let active = sample_traces(&loud, 800, 200, 7);
        let idle = sample_traces(&null, 800, 200, 8);
        let r = detect(&active, &idle, &loud, &null, 0.25).unwrap();
        assert!(r.alpha + r.beta < 0.2, "sum {}", r.alpha + r.beta);
    }

    #[test]
    fn detector_guards_trace_count_and_budget_vacuity() {
        let null = Categorical::bernoulli(0.4).unwrap();
        let few = sample_traces(&null, 10, 5, 9);
        let enough = sample_traces(&null, 500, 5, 10);
        assert!(matches!(
            detect(&few, &enough, &null, &null, 0.25),
            Err(Error::TooFewTraces { need: 500, got: 10 })
        ));
        let r = detect(&enough, &enough, &null, &null, 1.44).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.sum_lower_bound, 0.0);
    }

    #[test]
    fn converse_bound_check_behaves() {
        let ok = bh_bound_check(0.6, 0.4, 0.0, 10_000);
        assert!(ok.holds);
        assert!((ok.rhs - 0.5).abs() < 1e-15);
        let broken = bh_bound_check(0.05, 0.05, 0.1, 10_000);
        assert!(!broken.holds, "slack {}", broken.slack);
    }
}
