//! Distributions, divergences, and deterministic sampling streams.
//!
//! Everything downstream is built on four value types: [`Categorical`] and
//! [`UnitGaussian`] for observation laws, [`EffectiveActionDist`] for a
//! probe profile over the non-null actions `1..=K`, and [`ActionDist`] for
//! the full control law that mixes the null action with a probe profile.
//!
//! Conventions, fixed once here:
//!
//! * all divergences are in nats;
//! * `0 * log 0 = 0`;
//! * probability vectors must sum to 1 within `1e-12` and are never
//!   renormalized silently — [`Categorical::normalized`] is the only place
//!   weights get rescaled;
//! * sampling always takes an explicit [`RngStream`]; there is no global
//!   randomness anywhere in the crate.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Tolerance for "sums to one" and "is the same distribution" checks.
pub const SUM_TOL: f64 = 1e-12;

// ----------------------------------------------------------------------
// seeded streams
// ----------------------------------------------------------------------

/// A deterministic random stream with an explicit identity.
///
/// Streams are derived, not cloned: `RngStream::derive(master, path)` hashes
/// the master seed together with a counter path (for batch runs:
/// `[mode, cell, episode, lane]`), so any episode's stream can be
/// reconstructed independently of scheduling or worker count.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    /// Derive a stream from a master seed and a counter path.
    pub fn derive(master: u64, path: &[u64]) -> Self {
        let mut state = master;
        // Absorb the path one counter at a time; the per-position constant
        // keeps [a, 0] distinct from [a] followed by a zero draw.
        let mut acc = splitmix64(&mut state);
        for (i, &c) in path.iter().enumerate() {
            state ^= c.wrapping_add(0xA076_1D64_78BD_642F_u64.wrapping_mul(i as u64 + 1));
            acc ^= splitmix64(&mut state);
        }
        state ^= acc;
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream(ChaCha8Rng::from_seed(seed))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

// ----------------------------------------------------------------------
// value types
// ----------------------------------------------------------------------

/// A probability distribution over a finite outcome alphabet `0..len`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct Categorical {
    probs: Vec<f64>,
}

impl Categorical {
    /// Build from probabilities that already sum to 1 within [`SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} is negative or not finite"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Categorical { probs })
    }

    /// Explicitly rescale nonnegative weights to a distribution.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} is negative or not finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Categorical::new(weights.iter().map(|w| w / sum).collect())
    }

    /// Two-outcome convenience: `P(1) = p_one`.
    pub fn bernoulli(p_one: f64) -> Result<Self> {
        Categorical::new(vec![1.0 - p_one, p_one])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF sample; returns an outcome index.
    pub fn sample(&self, stream: &mut RngStream) -> usize {
        let u = stream.uniform();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }

    /// Max absolute pointwise difference; used for "same distribution" checks.
    pub fn max_abs_diff(&self, other: &Categorical) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A Gaussian with unit variance; only the mean is free.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct UnitGaussian {
    pub mean: f64,
}

impl UnitGaussian {
    pub fn new(mean: f64) -> Self {
        UnitGaussian { mean }
    }

    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        self.mean + stream.standard_normal()
    }
}

/// A probe profile: a distribution over the non-null actions `1..=K`.
///
/// Index convention: `probs()[i]` is the probability of action `i + 1`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct EffectiveActionDist {
    probs: Vec<f64>,
}

impl EffectiveActionDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let c = Categorical::new(probs)?;
        Ok(EffectiveActionDist { probs: c.probs })
    }

    /// Build and additionally require every entry `>= zeta - 1e-12`.
    pub fn with_floor(probs: Vec<f64>, zeta: f64) -> Result<Self> {
        let d = EffectiveActionDist::new(probs)?;
        if zeta < 0.0 || zeta * d.k() as f64 > 1.0 + SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "floor {zeta} infeasible for {} actions",
                d.k()
            )));
        }
        if let Some(p) = d.probs.iter().find(|p| **p < zeta - 1e-12) {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} below floor {zeta}"
            )));
        }
        Ok(d)
    }

    /// Number of non-null actions.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Probability of non-null action `x` (1-based).
    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x - 1]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// The full control law: play null with mass `1 - alpha`, otherwise draw a
/// non-null action from the probe profile.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ActionDist {
    alpha: f64,
    effective: EffectiveActionDist,
}

impl ActionDist {
    pub fn new(alpha: f64, effective: EffectiveActionDist) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidDistribution(format!(
                "effective mass {alpha} outside [0, 1]"
            )));
        }
        Ok(ActionDist { alpha, effective })
    }

    /// Mass on the null action; complements `alpha` by construction.
    pub fn null_mass(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn effective(&self) -> &EffectiveActionDist {
        &self.effective
    }

    /// Probability of action `x` where 0 is the null action.
    pub fn prob(&self, x: usize) -> f64 {
        if x == 0 {
            self.null_mass()
        } else {
            self.alpha * self.effective.prob(x)
        }
    }

    /// Sample an action index in `0..=K`.
    pub fn sample(&self, stream: &mut RngStream) -> usize {
        let u = stream.uniform();
        if u < self.null_mass() {
            return 0;
        }
        // Rescale the remainder into the probe profile.
        let mut v = (u - self.null_mass()) / self.alpha;
        if v >= 1.0 {
            v = 1.0 - f64::EPSILON;
        }
        let mut acc = 0.0;
        for (i, p) in self.effective.probs().iter().enumerate() {
            acc += p;
            if v < acc {
                return i + 1;
            }
        }
        self.effective.k()
    }
}

// ----------------------------------------------------------------------
// divergences
// ----------------------------------------------------------------------

fn check_alphabets(p: &Categorical, q: &Categorical) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// KL divergence `D(p || q)` in nats, with `0 log 0 = 0`.
pub fn kl_categorical(p: &Categorical, q: &Categorical) -> Result<f64> {
    check_alphabets(p, q)?;
    let mut s = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::AbsoluteContinuityViolation(format!(
                "p({i}) = {pi} but q({i}) = 0"
            )));
        }
        s += pi * (pi / qi).ln();
    }
    Ok(s.max(0.0))
}

/// KL divergence between unit-variance Gaussians: `(mean gap)^2 / 2`.
pub fn kl_unit_gaussian(p: UnitGaussian, q: UnitGaussian) -> f64 {
    let d = p.mean - q.mean;
    0.5 * d * d
}

/// Chi-square divergence `chi2(p || q) = sum (p - q)^2 / q`.
pub fn chi2_categorical(p: &Categorical, q: &Categorical) -> Result<f64> {
    check_alphabets(p, q)?;
    let mut s = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        let d = pi - qi;
        if qi == 0.0 {
            if d.abs() <= SUM_TOL {
                continue;
            }
            return Err(Error::AbsoluteContinuityViolation(format!(
                "p({i}) = {pi} but q({i}) = 0"
            )));
        }
        s += d * d / qi;
    }
    Ok(s.max(0.0))
}

/// Chi-square price of a Gaussian probe mixture against the idle law.
///
/// The monitor's per-probe output under profile `weights` is the mixture of
/// `N(arm_means[x], 1)`; the policy layer summarizes it by its mean
/// `m = sum_x weights(x) arm_means(x)` and charges
/// `chi2(N(m, 1) || N(0, 1)) = exp(m^2) - 1`. The idle law must be centered:
/// a nonzero `null_mean` is rejected rather than subtracted.
///
/// `arm_means[i]` is the side-effect mean of non-null action `i + 1`.
pub fn chi2_gaussian_mixture(
    weights: &EffectiveActionDist,
    arm_means: &[f64],
    null_mean: f64,
) -> Result<f64> {
    if weights.k() != arm_means.len() {
        return Err(Error::AlphabetMismatch {
            left: weights.k(),
            right: arm_means.len(),
        });
    }
    if null_mean.abs() > SUM_TOL {
        return Err(Error::NonZeroNullMean(null_mean));
    }
    let m: f64 = weights
        .probs()
        .iter()
        .zip(arm_means)
        .map(|(w, mu)| w * mu)
        .sum();
    Ok((m * m).exp_m1())
}

/// Total variation distance `0.5 * sum |p - q|`.
pub fn tv_categorical(p: &Categorical, q: &Categorical) -> Result<f64> {
    check_alphabets(p, q)?;
    let s: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(0.5 * s)
}

/// Finite mixture of categoricals on a shared alphabet.
///
/// `weights` must be nonnegative and sum to 1 within [`SUM_TOL`].
pub fn mixture(weights: &[f64], components: &[&Categorical]) -> Result<Categorical> {
    if weights.len() != components.len() {
        return Err(Error::AlphabetMismatch {
            left: weights.len(),
            right: components.len(),
        });
    }
    if components.is_empty() {
        return Err(Error::InvalidDistribution("empty mixture".into()));
    }
    let n = components[0].len();
    for c in components {
        check_alphabets(components[0], c)?;
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || (wsum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "mixture weights sum to {wsum}, not 1"
        )));
    }
    let mut probs = vec![0.0; n];
    for (w, c) in weights.iter().zip(components) {
        for (acc, p) in probs.iter_mut().zip(c.probs()) {
            *acc += w * p;
        }
    }
    Categorical::new(probs)
}

/// Euclidean projection onto the floored simplex `{p : p_i >= floor, sum p = 1}`.
///
/// Sorting-based threshold projection; `floor = 0` gives the plain simplex.
/// The floor must satisfy `floor * len <= 1`.
pub(crate) fn project_to_floored_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let k = v.len();
    debug_assert!(k > 0 && floor >= 0.0 && floor * k as f64 <= 1.0 + SUM_TOL);
    let mass = 1.0 - floor * k as f64;
    if mass <= 1e-15 {
        return vec![1.0 / k as f64; k];
    }
    let shifted: Vec<f64> = v.iter().map(|x| x - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut acc = 0.0;
    let mut theta = sorted[0] - mass;
    for (i, &s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - mass) / (i as f64 + 1.0);
        if s - t > 0.0 {
            theta = t;
        }
    }
    shifted
        .iter()
        .map(|&s| (s - theta).max(0.0) + floor)
        .collect()
}

/// The monitor-facing per-step output law of a control: the null channel
/// carries mass `1 - alpha`, each probe channel `alpha * pbar(x)`.
pub fn control_output_mixture(
    control: &ActionDist,
    channels: &[Categorical],
) -> Result<Categorical> {
    if channels.len() != control.effective().k() + 1 {
        return Err(Error::AlphabetMismatch {
            left: channels.len(),
            right: control.effective().k() + 1,
        });
    }
    let mut weights = Vec::with_capacity(channels.len());
    weights.push(control.null_mass());
    for x in 1..channels.len() {
        weights.push(control.alpha() * control.effective().prob(x));
    }
    let refs: Vec<&Categorical> = channels.iter().collect();
    mixture(&weights, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ber(p: f64) -> Categorical {
        Categorical::bernoulli(p).unwrap()
    }

    #[test]
    fn kl_matches_direct_evaluation() {
        let v = kl_categorical(&ber(0.9), &ber(0.6)).unwrap();
        assert!((v - 0.226_289_161_185_358_88).abs() < 1e-12);
        let w = kl_categorical(&ber(0.6), &ber(0.9)).unwrap();
        assert!((w - 0.311_238_679_583_057_7).abs() < 1e-12);
    }

    #[test]
    fn kl_of_identical_is_zero() {
        assert_eq!(kl_categorical(&ber(0.37), &ber(0.37)).unwrap(), 0.0);
    }

    #[test]
    fn kl_rejects_missing_support() {
        let e = kl_categorical(&ber(0.5), &ber(0.0)).unwrap_err();
        assert!(matches!(e, Error::AbsoluteContinuityViolation(_)));
    }

    #[test]
    fn kl_zero_mass_on_left_is_fine() {
        // 0 log 0 = 0: the left distribution may skip outcomes.
        let v = kl_categorical(&ber(0.0), &ber(0.4)).unwrap();
        assert!((v - (1.0f64 / 0.6).ln()).abs() < 1e-12);
    }

    #[test]
    fn kl_gaussian_half_square_gap() {
        let v = kl_unit_gaussian(UnitGaussian::new(1.0), UnitGaussian::new(0.5));
        assert_eq!(v, 0.125);
        assert_eq!(
            kl_unit_gaussian(UnitGaussian::new(0.5), UnitGaussian::new(1.0)),
            0.125
        );
    }

    #[test]
    fn chi2_matches_direct_evaluation() {
        let v = chi2_categorical(&ber(0.6), &ber(0.5)).unwrap();
        assert!((v - 0.04).abs() < 1e-12);
    }

    #[test]
    fn chi2_rejects_missing_support() {
        let e = chi2_categorical(&ber(0.6), &ber(0.0)).unwrap_err();
        assert!(matches!(e, Error::AbsoluteContinuityViolation(_)));
    }

    #[test]
    fn chi2_gaussian_closed_form_values() {
        let w = EffectiveActionDist::new(vec![0.5, 0.5]).unwrap();
        let v = chi2_gaussian_mixture(&w, &[1.0, 0.5], 0.0).unwrap();
        assert!((v - 0.755_054_656_960_298_5).abs() < 1e-9);
        let w = EffectiveActionDist::new(vec![0.3, 0.7]).unwrap();
        let v = chi2_gaussian_mixture(&w, &[1.0, 0.5], 0.0).unwrap();
        assert!((v - 0.525_771_219_603_461_4).abs() < 1e-9);
    }

    #[test]
    fn chi2_gaussian_rejects_shifted_null() {
        let w = EffectiveActionDist::new(vec![1.0]).unwrap();
        let e = chi2_gaussian_mixture(&w, &[1.0], 0.3).unwrap_err();
        assert!(matches!(e, Error::NonZeroNullMean(_)));
    }

    /// Numerical quadrature of the chi-square integral between the
    /// mean-summary Gaussian and the standard normal; independent check of
    /// the closed form `exp(m^2) - 1`.
    fn chi2_gaussian_by_quadrature(m: f64) -> f64 {
        // (phi_m(z) - phi(z))^2 / phi(z), expanded into three exponentials
        // so the tails stay finite.
        let f = |z: f64| {
            let a = (-0.5 * (z - 2.0 * m) * (z - 2.0 * m) + m * m).exp();
            let b = (-0.5 * (z - m) * (z - m)).exp();
            let c = (-0.5 * z * z).exp();
            (a - 2.0 * b + c) / (2.0 * std::f64::consts::PI).sqrt()
        };
        let hi = 12.0 + 2.0 * m.abs();
        let lo = -hi;
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let z = lo + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(z);
        }
        s * h / 3.0
    }

    #[test]
    fn chi2_gaussian_agrees_with_quadrature() {
        // Mixture means across [-2, 2], including the two frozen examples.
        let mut means: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
        means.push(0.75);
        means.push(0.65);
        for m in means {
            let closed = (m * m).exp_m1();
            let quad = chi2_gaussian_by_quadrature(m);
            let scale = closed.abs().max(1e-12);
            assert!(
                (closed - quad).abs() / scale < 1e-6 || (closed - quad).abs() < 1e-12,
                "m={m}: closed {closed} vs quadrature {quad}"
            );
        }
    }

    #[test]
    fn tv_matches_direct_evaluation() {
        let v = tv_categorical(&ber(0.9), &ber(0.6)).unwrap();
        assert!((v - 0.3).abs() < 1e-12);
    }

    #[test]
    fn mixture_of_bernoullis() {
        let m = mixture(&[0.9, 0.1], &[&ber(0.5), &ber(0.6)]).unwrap();
        assert!((m.probs()[1] - 0.51).abs() < 1e-12);
    }

    #[test]
    fn categorical_rejects_bad_vectors() {
        assert!(Categorical::new(vec![0.5, 0.6]).is_err());
        assert!(Categorical::new(vec![-0.1, 1.1]).is_err());
        assert!(Categorical::new(vec![]).is_err());
        assert!(Categorical::new(vec![0.5, f64::NAN]).is_err());
    }

    #[test]
    fn normalized_rescales_explicitly() {
        let c = Categorical::normalized(&[2.0, 6.0]).unwrap();
        assert!((c.probs()[0] - 0.25).abs() < 1e-15);
        assert!(Categorical::normalized(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn effective_floor_enforced() {
        assert!(EffectiveActionDist::with_floor(vec![0.5, 0.5], 0.4).is_ok());
        assert!(EffectiveActionDist::with_floor(vec![0.7, 0.3], 0.4).is_err());
        assert!(EffectiveActionDist::with_floor(vec![0.5, 0.5], 0.6).is_err());
    }

    #[test]
    fn action_dist_masses_complement() {
        let eff = EffectiveActionDist::new(vec![0.25, 0.75]).unwrap();
        let a = ActionDist::new(0.1, eff).unwrap();
        assert!((a.null_mass() + a.alpha() - 1.0).abs() < 1e-15);
        assert!((a.prob(0) - 0.9).abs() < 1e-15);
        assert!((a.prob(2) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection_is_feasible_and_idempotent() {
        let p = project_to_floored_simplex(&[0.9, 0.4, -0.3], 0.05);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.05 - 1e-12));
        let again = project_to_floored_simplex(&p, 0.05);
        for (a, b) in p.iter().zip(&again) {
            assert!((a - b).abs() < 1e-12);
        }
        // Already-feasible points are fixed points.
        let q = project_to_floored_simplex(&[0.25, 0.75], 0.0);
        assert!((q[0] - 0.25).abs() < 1e-12 && (q[1] - 0.75).abs() < 1e-12);
        // Saturated floor pins the uniform point.
        let u = project_to_floored_simplex(&[3.0, -1.0], 0.5);
        assert!((u[0] - 0.5).abs() < 1e-12 && (u[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stream_derivation_is_stable_and_distinct() {
        let mut a = RngStream::derive(7, &[1, 2, 3]);
        let mut b = RngStream::derive(7, &[1, 2, 3]);
        let mut c = RngStream::derive(7, &[1, 2, 4]);
        let va: Vec<f64> = (0..4).map(|_| a.uniform()).collect();
        let vb: Vec<f64> = (0..4).map(|_| b.uniform()).collect();
        let vc: Vec<f64> = (0..4).map(|_| c.uniform()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn sampler_matches_law_within_four_standard_errors() {
        let d = Categorical::new(vec![0.2, 0.5, 0.25, 0.05]).unwrap();
        let mut s = RngStream::derive(42, &[0]);
        let n = 1_000_000usize;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[d.sample(&mut s)] += 1;
        }
        for (i, &p) in d.probs().iter().enumerate() {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let phat = counts[i] as f64 / n as f64;
            assert!(
                (phat - p).abs() <= 4.0 * se,
                "outcome {i}: {phat} vs {p} (se {se})"
            );
        }
    }

    #[test]
    fn gaussian_sampler_matches_mean_within_four_standard_errors() {
        let g = UnitGaussian::new(0.7);
        let mut s = RngStream::derive(42, &[1]);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += g.sample(&mut s);
        }
        let mean = sum / n as f64;
        let se = 1.0 / (n as f64).sqrt();
        assert!((mean - 0.7).abs() <= 4.0 * se);
    }

    proptest! {
        /// Pinsker: tv <= sqrt(kl / 2) on full-support pairs.
        #[test]
        fn pinsker_inequality(
            raw_p in proptest::collection::vec(1e-3..1.0f64, 2..6),
            raw_q in proptest::collection::vec(1e-3..1.0f64, 2..6),
        ) {
            let n = raw_p.len().min(raw_q.len());
            let p = Categorical::normalized(&raw_p[..n]).unwrap();
            let q = Categorical::normalized(&raw_q[..n]).unwrap();
            let kl = kl_categorical(&p, &q).unwrap();
            let tv = tv_categorical(&p, &q).unwrap();
            prop_assert!(tv <= (kl / 2.0).sqrt() + 1e-12);
            prop_assert!(kl >= 0.0);
            prop_assert!(chi2_categorical(&p, &q).unwrap() >= 0.0);
        }

        /// Mixture is a valid distribution and KL to any component is finite
        /// whenever components share support.
        #[test]
        fn mixture_stays_valid(
            w in 0.01..0.99f64,
            a in 1e-3..0.999f64,
            b in 1e-3..0.999f64,
        ) {
            let pa = Categorical::bernoulli(a).unwrap();
            let pb = Categorical::bernoulli(b).unwrap();
            let m = mixture(&[w, 1.0 - w], &[&pa, &pb]).unwrap();
            let s: f64 = m.probs().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(kl_categorical(&m, &pa).is_ok());
        }
    }
}
