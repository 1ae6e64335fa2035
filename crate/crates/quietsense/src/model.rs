//! Environment models: finite hypothesis channel tables and Gaussian bandits.
//!
//! A [`HypothesisModel`] carries two channel tables over actions `0..=K`:
//! the agent's observation channels and the monitor's observation channels,
//! one row per hypothesis. Action 0 is the null action; its agent channel
//! must not depend on the hypothesis, and its monitor channel is the idle
//! baseline that covertness is measured against.
//!
//! A [`GaussianBanditModel`] is the unit-variance analogue for best-arm
//! identification: one mean per arm for the agent and one for the monitor,
//! arm 0 pinned to mean 0 on both sides.
//!
//! Both deserialize from a small JSON schema (see `models/` in the crate
//! root); [`load_model_file`] sniffs which of the two a file contains.

use crate::prob::{self, Categorical};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Distinguishability floor: a hypothesis pair must have some non-null
/// action whose agent channels differ by at least this much in divergence.
const MIN_PAIR_DIVERGENCE: f64 = 1e-12;

/// Feasibility floor for the least-squares check that no probe mixture
/// reproduces the idle monitor law exactly (squared L2 distance).
const MIN_MIXTURE_GAP_SQ: f64 = 1e-9;

// ----------------------------------------------------------------------
// finite hypothesis model
// ----------------------------------------------------------------------

/// Channel tables for active hypothesis testing.
///
/// Indexing is `[hypothesis][action]`; action 0 is the null action.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisModel {
    hypotheses: Vec<String>,
    k: usize,
    alice: Vec<Vec<Categorical>>,
    willie: Vec<Vec<Categorical>>,
}

impl HypothesisModel {
    /// Validate and build. See the module docs for the invariants; the
    /// short version: consistent shapes, a hypothesis-independent null
    /// agent channel, no perfectly revealing action, every hypothesis pair
    /// distinguishable by some action, and no probe mixture that lands
    /// exactly on the idle monitor law.
    pub fn new(
        hypotheses: Vec<String>,
        alice: Vec<Vec<Categorical>>,
        willie: Vec<Vec<Categorical>>,
    ) -> Result<Self> {
        if hypotheses.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least 2 hypotheses, got {}",
                hypotheses.len()
            )));
        }
        for (i, h) in hypotheses.iter().enumerate() {
            if h.is_empty() {
                return Err(Error::InvalidModel("empty hypothesis label".into()));
            }
            if hypotheses[..i].contains(h) {
                return Err(Error::InvalidModel(format!("duplicate hypothesis label {h:?}")));
            }
        }
        if alice.len() != hypotheses.len() || willie.len() != hypotheses.len() {
            return Err(Error::InvalidModel(format!(
                "channel tables have {} / {} rows for {} hypotheses",
                alice.len(),
                willie.len(),
                hypotheses.len()
            )));
        }
        let actions = alice[0].len();
        if actions < 2 {
            return Err(Error::InvalidModel(
                "need the null action plus at least one effective action".into(),
            ));
        }
        for (table, name) in [(&alice, "agent"), (&willie, "monitor")] {
            let alphabet = table[0][0].len();
            for (row, label) in table.iter().zip(&hypotheses) {
                if row.len() != actions {
                    return Err(Error::InvalidModel(format!(
                        "{name} table row for {label:?} has {} actions, expected {actions}",
                        row.len()
                    )));
                }
                for (x, ch) in row.iter().enumerate() {
                    if ch.len() != alphabet {
                        return Err(Error::InvalidModel(format!(
                            "{name} channel ({label:?}, action {x}) has alphabet {}, expected {alphabet}",
                            ch.len()
                        )));
                    }
                }
            }
        }
        // The null action must tell the agent nothing about the hypothesis.
        for (row, label) in alice.iter().zip(&hypotheses) {
            if row[0].max_abs_diff(&alice[0][0]) > prob::SUM_TOL {
                return Err(Error::InvalidModel(format!(
                    "agent null channel depends on the hypothesis (row {label:?} differs)"
                )));
            }
        }
        // No single action may reveal a hypothesis pair noiselessly, and
        // every pair must be distinguishable by some action.
        for i in 0..hypotheses.len() {
            for j in 0..hypotheses.len() {
                if i == j {
                    continue;
                }
                let mut best = 0.0f64;
                for x in 1..actions {
                    match prob::kl_categorical(&alice[i][x], &alice[j][x]) {
                        Ok(d) => best = best.max(d),
                        Err(_) => {
                            return Err(Error::InvalidModel(format!(
                                "action {x} reveals {:?} against {:?} noiselessly \
                                 (infinite divergence)",
                                hypotheses[i], hypotheses[j]
                            )));
                        }
                    }
                }
                if best <= MIN_PAIR_DIVERGENCE {
                    return Err(Error::InvalidModel(format!(
                        "hypotheses {:?} and {:?} are indistinguishable by every action",
                        hypotheses[i], hypotheses[j]
                    )));
                }
            }
        }
        // No probe mixture may reproduce the idle monitor law exactly.
        for (row, label) in willie.iter().zip(&hypotheses) {
            let gap = nearest_mixture_gap_sq(&row[1..], &row[0]);
            if gap < MIN_MIXTURE_GAP_SQ {
                return Err(Error::InvalidModel(format!(
                    "under {label:?} a probe mixture reproduces the idle monitor law \
                     (squared distance {gap:.3e})"
                )));
            }
        }
        Ok(HypothesisModel {
            k: actions - 1,
            hypotheses,
            alice,
            willie,
        })
    }

    /// Hypothesis labels in index order.
    pub fn labels(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn n_hypotheses(&self) -> usize {
        self.hypotheses.len()
    }

    /// Number of effective (non-null) actions.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.hypotheses.iter().position(|h| h == label)
    }

    /// Agent channel for hypothesis index `theta` and action `x` (0 = null).
    pub fn alice(&self, theta: usize, x: usize) -> &Categorical {
        &self.alice[theta][x]
    }

    /// Monitor channel for hypothesis index `theta` and action `x`.
    pub fn willie(&self, theta: usize, x: usize) -> &Categorical {
        &self.willie[theta][x]
    }

    /// The hypothesis-independent null agent channel.
    pub fn alice_null(&self) -> &Categorical {
        &self.alice[0][0]
    }

    /// Idle monitor baseline under hypothesis `theta`.
    pub fn willie_null(&self, theta: usize) -> &Categorical {
        &self.willie[theta][0]
    }

    /// Monitor probe channels (actions `1..=K`) under hypothesis `theta`.
    pub fn willie_probes(&self, theta: usize) -> &[Categorical] {
        &self.willie[theta][1..]
    }

    /// Replace every idle monitor law by `(1 - eps) * q + eps * uniform`.
    ///
    /// Raw models often make the idle law degenerate (zero mass on outcomes
    /// the probe actions can produce), which sends the chi-square price to
    /// infinity. This full-support smoothing of the null rows alone keeps
    /// the probe channels untouched; the result is re-validated.
    pub fn regularize_null(&self, eps: f64) -> Result<HypothesisModel> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "null regularization must lie in (0, 1), got {eps}"
            )));
        }
        let mut willie = self.willie.clone();
        for row in &mut willie {
            let z = row[0].len() as f64;
            let smoothed: Vec<f64> = row[0]
                .probs()
                .iter()
                .map(|p| (1.0 - eps) * p + eps / z)
                .collect();
            row[0] = Categorical::new(smoothed)?;
        }
        HypothesisModel::new(self.hypotheses.clone(), self.alice.clone(), willie)
    }

    /// True when some probe channel puts mass where the idle law has none,
    /// making the chi-square price infinite; such models need
    /// [`HypothesisModel::regularize_null`] before any covert computation.
    pub fn has_degenerate_null(&self) -> bool {
        self.willie.iter().any(|row| {
            row[1..]
                .iter()
                .any(|probe| prob::chi2_categorical(probe, &row[0]).is_err())
        })
    }
}

/// Squared L2 distance from the idle law to the nearest probe mixture,
/// minimized over the probe simplex by projected gradient descent on a
/// convex quadratic.
fn nearest_mixture_gap_sq(probes: &[Categorical], null: &Categorical) -> f64 {
    let k = probes.len();
    let z = null.len();
    let residual = |p: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; z];
        for (w, probe) in p.iter().zip(probes) {
            for (ri, pi) in r.iter_mut().zip(probe.probs()) {
                *ri += w * pi;
            }
        }
        for (ri, ni) in r.iter_mut().zip(null.probs()) {
            *ri -= ni;
        }
        r
    };
    let norm_sq: f64 = probes
        .iter()
        .flat_map(|c| c.probs())
        .map(|p| p * p)
        .sum();
    let step = 0.5 / norm_sq.max(1e-12);
    let mut p = vec![1.0 / k as f64; k];
    let mut best = f64::INFINITY;
    for _ in 0..500 {
        let r = residual(&p);
        let value: f64 = r.iter().map(|x| x * x).sum();
        if value < best - 1e-15 {
            best = value;
        } else if value <= best + 1e-15 {
            break;
        }
        let grad: Vec<f64> = probes
            .iter()
            .map(|probe| 2.0 * probe.probs().iter().zip(&r).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let moved: Vec<f64> = p.iter().zip(&grad).map(|(pi, gi)| pi - step * gi).collect();
        p = prob::project_to_floored_simplex(&moved, 0.0);
    }
    best.min(residual(&p).iter().map(|x| x * x).sum())
}

// ----------------------------------------------------------------------
// Gaussian bandit model
// ----------------------------------------------------------------------

/// Unit-variance Gaussian bandit with a null arm at index 0.
///
/// `alice_means[x]` is the agent's reward mean for arm `x`;
/// `willie_means[x]` is the monitor's observation mean. Both null entries
/// are pinned to exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianBanditModel {
    pub alice_means: Vec<f64>,
    pub willie_means: Vec<f64>,
}

impl GaussianBanditModel {
    pub fn new(alice_means: Vec<f64>, willie_means: Vec<f64>) -> Result<Self> {
        let m = GaussianBanditModel {
            alice_means,
            willie_means,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.alice_means.len() != self.willie_means.len() {
            return Err(Error::InvalidModel(format!(
                "agent has {} arms, monitor has {}",
                self.alice_means.len(),
                self.willie_means.len()
            )));
        }
        if self.alice_means.len() < 2 {
            return Err(Error::InvalidModel(
                "need the null arm plus at least one effective arm".into(),
            ));
        }
        if self
            .alice_means
            .iter()
            .chain(&self.willie_means)
            .any(|m| !m.is_finite())
        {
            return Err(Error::InvalidModel("arm means must be finite".into()));
        }
        if self.alice_means[0] != 0.0 || self.willie_means[0] != 0.0 {
            return Err(Error::InvalidModel(format!(
                "null arm means must be exactly 0, got agent {} / monitor {}",
                self.alice_means[0], self.willie_means[0]
            )));
        }
        let best = self.alice_means[1..]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if best <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "best effective arm mean {best} does not beat the null arm"
            )));
        }
        let ties = self.alice_means[1..].iter().filter(|m| **m == best).count();
        if ties > 1 {
            return Err(Error::InvalidModel(format!(
                "{ties} arms tie for the best mean {best}; the alternative-bandit \
                 set is ill-defined under ties"
            )));
        }
        Ok(())
    }

    /// Number of effective (non-null) arms.
    pub fn k(&self) -> usize {
        self.alice_means.len() - 1
    }

    /// Index of the unique best effective arm (1-based, never 0).
    pub fn best_arm(&self) -> usize {
        let mut best = 1;
        for x in 2..self.alice_means.len() {
            if self.alice_means[x] > self.alice_means[best] {
                best = x;
            }
        }
        best
    }

    /// Agent reward means of the effective arms (index 0 here is arm 1).
    pub fn alice_effective_means(&self) -> &[f64] {
        &self.alice_means[1..]
    }

    /// Monitor observation means of the effective arms.
    pub fn willie_effective_means(&self) -> &[f64] {
        &self.willie_means[1..]
    }
}

// ----------------------------------------------------------------------
// JSON schema
// ----------------------------------------------------------------------

/// File form of a [`HypothesisModel`]: `actions` counts the whole action
/// set including the null action, and each table maps a hypothesis label
/// to `actions` probability rows over the observation alphabet.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesisModelFile {
    hypotheses: Vec<String>,
    actions: usize,
    alice: BTreeMap<String, Vec<Vec<f64>>>,
    willie: BTreeMap<String, Vec<Vec<f64>>>,
}

impl HypothesisModelFile {
    fn build(self) -> Result<HypothesisModel> {
        let mut alice = Vec::with_capacity(self.hypotheses.len());
        let mut willie = Vec::with_capacity(self.hypotheses.len());
        for (table, out, name) in [
            (&self.alice, &mut alice, "alice"),
            (&self.willie, &mut willie, "willie"),
        ] {
            if table.len() != self.hypotheses.len() {
                return Err(Error::InvalidModel(format!(
                    "{name} table has {} entries for {} hypotheses",
                    table.len(),
                    self.hypotheses.len()
                )));
            }
            for label in &self.hypotheses {
                let rows = table.get(label).ok_or_else(|| {
                    Error::InvalidModel(format!("{name} table missing hypothesis {label:?}"))
                })?;
                if rows.len() != self.actions {
                    return Err(Error::InvalidModel(format!(
                        "{name} table for {label:?} has {} rows, expected {} actions",
                        rows.len(),
                        self.actions
                    )));
                }
                let mut parsed = Vec::with_capacity(rows.len());
                for row in rows {
                    parsed.push(Categorical::new(row.clone())?);
                }
                out.push(parsed);
            }
        }
        HypothesisModel::new(self.hypotheses, alice, willie)
    }
}

/// Either kind of model, as sniffed from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    Hypothesis(HypothesisModel),
    Bandit(GaussianBanditModel),
}

/// Load a model file, deciding its kind by the presence of `alice_means`.
pub fn load_model_file(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidConfig(format!("cannot read model file {}: {e}", path.display()))
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("alice_means").is_some() {
        let m: GaussianBanditModel = serde_json::from_value(value)?;
        m.validate()?;
        Ok(LoadedModel::Bandit(m))
    } else {
        let f: HypothesisModelFile = serde_json::from_value(value)?;
        Ok(LoadedModel::Hypothesis(f.build()?))
    }
}

// ----------------------------------------------------------------------
// presets
// ----------------------------------------------------------------------

/// The models used by the built-in reproduction runs, constructed in code
/// so nothing depends on file paths. The same tables ship as JSON under
/// `models/` for CLI use; a test pins file and preset together.
pub mod presets {
    use super::*;

    // Rows are written as explicit probability vectors (not computed
    // complements) so the in-code tables are bit-identical to the JSON
    // files under models/.
    fn binary_row(pairs: &[[f64; 2]]) -> Vec<Categorical> {
        pairs
            .iter()
            .map(|p| Categorical::new(p.to_vec()).expect("preset"))
            .collect()
    }

    /// Three hypotheses, two effective actions, all channels Bernoulli.
    ///
    /// The agent's channels make no single action informative about every
    /// pair: action 1 separates `c` from the rest, action 2 separates `a`.
    /// The monitor's probe channels are hypothesis-independent and its idle
    /// law is a point mass, so covert computations need
    /// [`HypothesisModel::regularize_null`] first.
    pub fn threeway_binary() -> HypothesisModel {
        HypothesisModel::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                binary_row(&[[1.0, 0.0], [0.1, 0.9], [0.4, 0.6]]),
                binary_row(&[[1.0, 0.0], [0.1, 0.9], [0.1, 0.9]]),
                binary_row(&[[1.0, 0.0], [0.4, 0.6], [0.1, 0.9]]),
            ],
            vec![
                binary_row(&[[1.0, 0.0], [0.4, 0.6], [0.1, 0.9]]),
                binary_row(&[[1.0, 0.0], [0.4, 0.6], [0.1, 0.9]]),
                binary_row(&[[1.0, 0.0], [0.4, 0.6], [0.1, 0.9]]),
            ],
        )
        .expect("preset is a valid model")
    }

    /// Two effective Gaussian arms with means 1 and 0.5 on both sides.
    pub fn two_arm_gaussian() -> GaussianBanditModel {
        GaussianBanditModel::new(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 0.5])
            .expect("preset is a valid model")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ber(p: f64) -> Categorical {
        Categorical::bernoulli(p).unwrap()
    }

    fn rows(ps: &[f64]) -> Vec<Categorical> {
        ps.iter().map(|p| ber(*p)).collect()
    }

    #[test]
    fn threeway_preset_is_valid_and_shaped() {
        let m = presets::threeway_binary();
        assert_eq!(m.k(), 2);
        assert_eq!(m.labels(), &["a", "b", "c"]);
        assert_eq!(m.index_of("b"), Some(1));
        assert!(m.alice(1, 1).max_abs_diff(&ber(0.9)) < 1e-15);
        assert!(m.willie_null(2).max_abs_diff(&ber(0.0)) < 1e-15);
        assert!(m.has_degenerate_null());
    }

    #[test]
    fn regularized_null_is_smoothed_and_full_support() {
        let m = presets::threeway_binary().regularize_null(0.02).unwrap();
        // (1 - 0.02) * Ber(0) + 0.02 * uniform = Ber(0.01).
        assert!(m.willie_null(0).max_abs_diff(&ber(0.01)) < 1e-15);
        // Probe channels untouched.
        assert!(m.willie(0, 1).max_abs_diff(&ber(0.6)) < 1e-15);
        assert!(m.willie(2, 2).max_abs_diff(&ber(0.9)) < 1e-15);
        assert!(!m.has_degenerate_null());
        // The agent side is untouched entirely.
        assert!(m.alice(0, 0).max_abs_diff(&ber(0.0)) < 1e-15);
        assert!(matches!(
            presets::threeway_binary().regularize_null(1.5),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn null_channel_must_not_depend_on_hypothesis() {
        let e = HypothesisModel::new(
            vec!["a".into(), "b".into()],
            vec![rows(&[0.0, 0.9]), rows(&[0.1, 0.6])],
            vec![rows(&[0.5, 0.6]), rows(&[0.5, 0.6])],
        )
        .unwrap_err();
        assert!(matches!(e, Error::InvalidModel(_)), "{e}");
    }

    #[test]
    fn noiseless_reveal_rejected() {
        // Action 1 has infinite divergence between the hypotheses: an
        // observation of 1 under "b" is impossible under "a".
        let e = HypothesisModel::new(
            vec!["a".into(), "b".into()],
            vec![rows(&[0.0, 0.0]), rows(&[0.0, 0.5])],
            vec![rows(&[0.5, 0.6]), rows(&[0.5, 0.6])],
        )
        .unwrap_err();
        assert!(matches!(e, Error::InvalidModel(_)), "{e}");
    }

    #[test]
    fn indistinguishable_pair_rejected() {
        let e = HypothesisModel::new(
            vec!["a".into(), "b".into()],
            vec![rows(&[0.0, 0.9]), rows(&[0.0, 0.9])],
            vec![rows(&[0.5, 0.6]), rows(&[0.5, 0.6])],
        )
        .unwrap_err();
        assert!(matches!(e, Error::InvalidModel(_)), "{e}");
    }

    #[test]
    fn probe_mixture_matching_idle_law_rejected() {
        // Probes Ber(0.3) and Ber(0.7): the even mixture is exactly the
        // idle law Ber(0.5).
        let e = HypothesisModel::new(
            vec!["a".into(), "b".into()],
            vec![rows(&[0.0, 0.9, 0.2]), rows(&[0.0, 0.6, 0.7])],
            vec![rows(&[0.5, 0.3, 0.7]), rows(&[0.5, 0.3, 0.7])],
        )
        .unwrap_err();
        assert!(matches!(e, Error::InvalidModel(_)), "{e}");
    }

    #[test]
    fn mixture_gap_positive_for_threeway_tables() {
        let m = presets::threeway_binary();
        for theta in 0..3 {
            let gap = nearest_mixture_gap_sq(m.willie_probes(theta), m.willie_null(theta));
            // The nearest mixture is the point mass on action 1 (Ber(0.6)),
            // at squared distance 2 * 0.6^2.
            assert!((gap - 0.72).abs() < 1e-6, "theta {theta}: gap {gap}");
        }
    }

    #[test]
    fn bandit_preset_and_accessors() {
        let m = presets::two_arm_gaussian();
        assert_eq!(m.k(), 2);
        assert_eq!(m.best_arm(), 1);
        assert_eq!(m.alice_effective_means(), &[1.0, 0.5]);
        assert_eq!(m.willie_effective_means(), &[1.0, 0.5]);
    }

    #[test]
    fn bandit_validation_rejections() {
        assert!(matches!(
            GaussianBanditModel::new(vec![0.0, 1.0, 1.0, 0.5], vec![0.0, 0.0, 0.0, 0.0]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            GaussianBanditModel::new(vec![0.1, 1.0], vec![0.0, 1.0]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            GaussianBanditModel::new(vec![0.0, -0.5, -1.0], vec![0.0, 1.0, 1.0]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            GaussianBanditModel::new(vec![0.0], vec![0.0]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            GaussianBanditModel::new(vec![0.0, 1.0], vec![0.0, 1.0, 0.5]),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn best_arm_breaks_no_ties_but_finds_max() {
        let m = GaussianBanditModel::new(vec![0.0, 0.5, 2.0, 1.0], vec![0.0, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(m.best_arm(), 2);
    }

    #[test]
    fn shipped_model_files_match_presets() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
        match load_model_file(&dir.join("threeway-binary.json")).unwrap() {
            LoadedModel::Hypothesis(m) => assert_eq!(m, presets::threeway_binary()),
            other => panic!("wrong kind: {other:?}"),
        }
        match load_model_file(&dir.join("two-arm-gaussian.json")).unwrap() {
            LoadedModel::Bandit(m) => assert_eq!(m, presets::two_arm_gaussian()),
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_unknown_keys_and_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(
            &path,
            r#"{"alice_means": [0.0, 1.0], "willie_means": [0.0, 1.0], "extra": 1}"#,
        )
        .unwrap();
        assert!(matches!(load_model_file(&path), Err(Error::Json(_))));
        std::fs::write(
            &path,
            r#"{"hypotheses": ["a", "b"], "actions": 2,
                "alice": {"a": [[1.0, 0.0], [0.2, 0.8]], "b": [[1.0, 0.0], [0.8, 0.2]]},
                "willie": {"a": [[0.5, 0.5], [0.4, 0.7]], "b": [[0.5, 0.5], [0.4, 0.7]]}}"#,
        )
        .unwrap();
        let e = load_model_file(&path).unwrap_err();
        assert!(matches!(e, Error::InvalidDistribution(_)), "{e}");
        assert!(load_model_file(&dir.path().join("missing.json")).is_err());
    }
}
