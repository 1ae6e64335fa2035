//! Seeded parallel Monte Carlo batches, cell statistics, and the
//! square-root scaling fit.
//!
//! Episodes are embarrassingly parallel. Every episode draws its
//! randomness from streams derived off `(master_seed, mode, cell,
//! episode, lane)` counters, so the episode index alone, never thread
//! scheduling, determines the outcome; batch results are byte-identical
//! across worker counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::bai::{self, BaiPolicyConfig};
use crate::episode::{EpisodeResult, WillieTrace};
use crate::exponent::SolverOptions;
use crate::model::{GaussianBanditModel, HypothesisModel};
use crate::prob::RngStream;
use crate::seqtest::{self, SeqTestPolicy};
use crate::{Error, Result};

/// Stream-derivation tags. The mode tag separates the three experiment
/// families; the lane tag separates the independent randomness consumers
/// inside one episode.
pub const MODE_HT: u64 = 1;
pub const MODE_BAI: u64 = 2;
pub const MODE_DETECTOR: u64 = 3;
pub const LANE_ACTION: u64 = 0;
pub const LANE_AGENT: u64 = 1;
pub const LANE_WILLIE: u64 = 2;

/// Cells below this size produce statistics too noisy to report.
pub const MIN_EPISODES: usize = 100;

const Z95: f64 = 1.959_963_984_540_054;

// ----------------------------------------------------------------------
// Per-episode records and per-cell statistics
// ----------------------------------------------------------------------

/// One episode, flattened for `episodes.csv`. The column order is the
/// struct's field order and is part of the output contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode_id: u64,
    pub truth: String,
    /// Decision label, empty when the episode timed out undecided.
    pub decision: String,
    pub stop_time: u64,
    pub timeout_flag: u8,
    pub effective_pulls: u64,
    pub kl_bound_contrib: f64,
}

fn episode_row(id: u64, r: &EpisodeResult, label: impl Fn(usize) -> String) -> EpisodeRow {
    EpisodeRow {
        episode_id: id,
        truth: label(r.truth),
        decision: r.decision.map(&label).unwrap_or_default(),
        stop_time: r.stop_time(),
        timeout_flag: u8::from(r.timed_out()),
        effective_pulls: r.effective_pulls,
        kl_bound_contrib: r.kl_bound,
    }
}

/// Aggregate statistics of one grid cell.
///
/// `error_rate` counts wrong decisions among decided episodes; undecided
/// timeouts are accounted by `timeout_rate` instead of being folded into
/// the error rate. Stop times of timeout episodes are right-censored at
/// the cap and enter the quantiles at that value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub param: f64,
    pub episodes: usize,
    pub decided: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub error_wilson_low: f64,
    pub error_wilson_high: f64,
    pub timeouts: usize,
    pub timeout_rate: f64,
    pub mean_effective_pulls: f64,
    pub mean_kl_bound: f64,
    pub stop_time_p50: u64,
    pub stop_time_p90: u64,
    pub stop_time_max: u64,
    /// Upper-quantile stop time at the configured `kappa`, when one was.
    pub tau_sup: Option<u64>,
}

fn nearest_rank(sorted: &[u64], q: f64) -> u64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn summarize(param: f64, results: &[EpisodeResult], kappa: Option<f64>) -> Result<CellSummary> {
    let episodes = results.len();
    let decided = results.iter().filter(|r| r.decision.is_some()).count();
    let errors = results
        .iter()
        .filter(|r| r.decision.is_some() && !r.correct)
        .count();
    let timeouts = results.iter().filter(|r| r.timed_out()).count();
    let mut stops: Vec<u64> = results.iter().map(|r| r.stop_time()).collect();
    stops.sort_unstable();
    let (lo, hi) = wilson_interval(errors as u64, decided as u64);
    let tau_sup = match kappa {
        Some(k) => Some(bai::tau_sup_estimate(&stops, k)?),
        None => None,
    };
    Ok(CellSummary {
        param,
        episodes,
        decided,
        errors,
        error_rate: if decided == 0 {
            0.0
        } else {
            errors as f64 / decided as f64
        },
        error_wilson_low: lo,
        error_wilson_high: hi,
        timeouts,
        timeout_rate: timeouts as f64 / episodes as f64,
        mean_effective_pulls: results.iter().map(|r| r.effective_pulls as f64).sum::<f64>()
            / episodes as f64,
        mean_kl_bound: results.iter().map(|r| r.kl_bound).sum::<f64>() / episodes as f64,
        stop_time_p50: nearest_rank(&stops, 0.5),
        stop_time_p90: nearest_rank(&stops, 0.9),
        stop_time_max: *stops.last().expect("validated nonempty"),
        tau_sup,
    })
}

/// Wilson 95% score interval for a binomial proportion. Zero trials give
/// the vacuous `(0, 1)`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

// ----------------------------------------------------------------------
// Hypothesis-testing batches
// ----------------------------------------------------------------------

/// A testing experiment: one cell per time budget `n`.
#[derive(Debug, Clone)]
pub struct HtBatchSpec {
    pub model: HypothesisModel,
    pub n_grid: Vec<u64>,
    pub eta: f64,
    pub zeta: f64,
    /// Per-policy cap override; `None` keeps the policy default.
    pub horizon_cap: Option<u64>,
    pub episodes: usize,
    pub master_seed: u64,
    /// Fixed truth, or `None` to rotate through the hypotheses
    /// round-robin by episode index.
    pub truth: Option<usize>,
    pub solver: SolverOptions,
}

impl HtBatchSpec {
    pub fn new(model: HypothesisModel, n_grid: Vec<u64>, eta: f64, zeta: f64) -> Self {
        HtBatchSpec {
            model,
            n_grid,
            eta,
            zeta,
            horizon_cap: None,
            episodes: 2000,
            master_seed: 0,
            truth: None,
            solver: SolverOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("empty n grid".into()));
        }
        if self.episodes < MIN_EPISODES {
            return Err(Error::InvalidConfig(format!(
                "need at least {MIN_EPISODES} episodes per cell, got {}",
                self.episodes
            )));
        }
        if let Some(t) = self.truth {
            if t >= self.model.n_hypotheses() {
                return Err(Error::InvalidConfig(format!(
                    "truth index {t} out of range for {} hypotheses",
                    self.model.n_hypotheses()
                )));
            }
        }
        Ok(())
    }
}

/// One finished testing cell: summary plus the raw rows, and the per
/// hypothesis design-level covertness terms of the cell's policy.
#[derive(Debug, Clone)]
pub struct HtCellResult {
    pub n: u64,
    pub summary: CellSummary,
    /// `(hypothesis label, n alpha^2 chi2 / 2)` pairs; each must stay at
    /// or under the budget by construction.
    pub budget_terms: Vec<(String, f64)>,
    pub rows: Vec<EpisodeRow>,
}

/// Run every cell of a testing experiment.
pub fn run_ht_batch(spec: &HtBatchSpec) -> Result<Vec<HtCellResult>> {
    spec.validate()?;
    let h = spec.model.n_hypotheses();
    let mut cells = Vec::with_capacity(spec.n_grid.len());
    for (c, &n) in spec.n_grid.iter().enumerate() {
        let policy = seqtest::build_policy(
            &spec.model,
            n,
            spec.eta,
            spec.zeta,
            spec.horizon_cap,
            &spec.solver,
        )?;
        let results: Vec<EpisodeResult> = (0..spec.episodes as u64)
            .into_par_iter()
            .map(|ep| {
                let truth = spec.truth.unwrap_or(ep as usize % h);
                let mut action =
                    RngStream::derive(spec.master_seed, &[MODE_HT, c as u64, ep, LANE_ACTION]);
                let mut agent =
                    RngStream::derive(spec.master_seed, &[MODE_HT, c as u64, ep, LANE_AGENT]);
                seqtest::run_episode(&policy, truth, &mut action, &mut agent)
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = spec.model.labels();
        let rows: Vec<EpisodeRow> = results
            .iter()
            .enumerate()
            .map(|(i, r)| episode_row(i as u64, r, |t| labels[t].clone()))
            .collect();
        cells.push(HtCellResult {
            n,
            summary: summarize(n as f64, &results, None)?,
            budget_terms: policy.covert_budget_terms(),
            rows,
        });
    }
    Ok(cells)
}

// ----------------------------------------------------------------------
// Best-arm batches
// ----------------------------------------------------------------------

/// An identification experiment: one cell per confidence target `delta`.
#[derive(Debug, Clone)]
pub struct BaiBatchSpec {
    pub model: GaussianBanditModel,
    pub delta_grid: Vec<f64>,
    pub eta: f64,
    pub zeta_floor: Option<f64>,
    pub kappa: f64,
    pub recompute_period: u64,
    pub horizon_cap: Option<u64>,
    pub episodes: usize,
    pub master_seed: u64,
}

impl BaiBatchSpec {
    pub fn new(model: GaussianBanditModel, delta_grid: Vec<f64>, eta: f64) -> Self {
        BaiBatchSpec {
            model,
            delta_grid,
            eta,
            zeta_floor: None,
            kappa: 0.05,
            recompute_period: 1,
            horizon_cap: None,
            episodes: 2000,
            master_seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.delta_grid.is_empty() {
            return Err(Error::InvalidConfig("empty delta grid".into()));
        }
        if self.episodes < MIN_EPISODES {
            return Err(Error::InvalidConfig(format!(
                "need at least {MIN_EPISODES} episodes per cell, got {}",
                self.episodes
            )));
        }
        Ok(())
    }

    fn cell_config(&self, delta: f64) -> BaiPolicyConfig {
        BaiPolicyConfig {
            delta,
            eta: self.eta,
            zeta_floor: self.zeta_floor,
            kappa: self.kappa,
            recompute_period: self.recompute_period,
            horizon_cap: self.horizon_cap,
            threshold_arms: None,
        }
    }
}

/// One finished identification cell.
#[derive(Debug, Clone)]
pub struct BaiCellResult {
    pub delta: f64,
    pub summary: CellSummary,
    /// Smallest `R - Gamma` margin over episodes that stopped on their
    /// own; `None` when every episode timed out.
    pub min_stop_margin: Option<f64>,
    /// Share of allocation refreshes that hit the activity-rate cap,
    /// averaged over episodes.
    pub clamped_refresh_rate: f64,
    pub rows: Vec<EpisodeRow>,
}

/// Run every cell of an identification experiment.
pub fn run_bai_batch(spec: &BaiBatchSpec) -> Result<Vec<BaiCellResult>> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.delta_grid.len());
    for (c, &delta) in spec.delta_grid.iter().enumerate() {
        let policy = bai::build_policy(&spec.model, &spec.cell_config(delta))?;
        let episodes: Vec<bai::BaiEpisode> = (0..spec.episodes as u64)
            .into_par_iter()
            .map(|ep| {
                let mut action =
                    RngStream::derive(spec.master_seed, &[MODE_BAI, c as u64, ep, LANE_ACTION]);
                let mut agent =
                    RngStream::derive(spec.master_seed, &[MODE_BAI, c as u64, ep, LANE_AGENT]);
                bai::run_episode(&policy, &mut action, &mut agent, false)
            })
            .collect::<Result<Vec<_>>>()?;
        let results: Vec<EpisodeResult> = episodes.iter().map(|e| e.result.clone()).collect();
        let rows: Vec<EpisodeRow> = results
            .iter()
            .enumerate()
            .map(|(i, r)| episode_row(i as u64, r, |slot| format!("arm{}", slot + 1)))
            .collect();
        let min_stop_margin = episodes
            .iter()
            .filter_map(|e| e.stop_glr.map(|(r, g)| r - g))
            .fold(None, |acc: Option<f64>, m| {
                Some(acc.map_or(m, |a| a.min(m)))
            });
        let clamped_refresh_rate = episodes
            .iter()
            .map(|e| e.clamped_refreshes as f64 / e.refreshes as f64)
            .sum::<f64>()
            / episodes.len() as f64;
        cells.push(BaiCellResult {
            delta,
            summary: summarize(delta, &results, Some(spec.kappa))?,
            min_stop_margin,
            clamped_refresh_rate,
            rows,
        });
    }
    Ok(cells)
}

// ----------------------------------------------------------------------
// Detector trace generation
// ----------------------------------------------------------------------

/// Monitor-side observation prefixes for the detection experiment:
/// `active` traces watch the policy run in its never-stopping mode,
/// `idle` traces watch pure nulls, both of length `steps`.
#[derive(Debug, Clone)]
pub struct DetectorTraces {
    pub active: Vec<Vec<u32>>,
    pub idle: Vec<Vec<u32>>,
}

pub fn detector_traces(
    policy: &SeqTestPolicy,
    truth: usize,
    steps: u64,
    traces: usize,
    master_seed: u64,
) -> Result<DetectorTraces> {
    let active: Vec<Vec<u32>> = (0..traces as u64)
        .into_par_iter()
        .map(|i| {
            let mut action = RngStream::derive(master_seed, &[MODE_DETECTOR, 0, i, LANE_ACTION]);
            let mut agent = RngStream::derive(master_seed, &[MODE_DETECTOR, 0, i, LANE_AGENT]);
            let mut willie = RngStream::derive(master_seed, &[MODE_DETECTOR, 0, i, LANE_WILLIE]);
            let r = seqtest::run_traced(
                policy, truth, steps, &mut action, &mut agent, &mut willie, true,
            )?;
            match r.willie_trace {
                Some(WillieTrace::Discrete(zs)) => Ok(zs),
                _ => Err(Error::InvalidConfig(
                    "testing policies emit discrete monitor traces".into(),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let null = policy.model().willie_null(truth);
    let idle: Vec<Vec<u32>> = (0..traces as u64)
        .into_par_iter()
        .map(|i| {
            let mut willie = RngStream::derive(master_seed, &[MODE_DETECTOR, 1, i, LANE_WILLIE]);
            (0..steps).map(|_| null.sample(&mut willie) as u32).collect()
        })
        .collect();
    Ok(DetectorTraces { active, idle })
}

// ----------------------------------------------------------------------
// Scaling fit
// ----------------------------------------------------------------------

/// One cell's contribution to the scaling fit.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    /// Abscissa, already transformed (`sqrt(n)` or `|log delta|`).
    pub x: f64,
    pub errors: u64,
    pub trials: u64,
}

/// Straight-line fit diagnostics with a known-variance slope interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub slope_ci: (f64, f64),
    pub r2: f64,
}

/// The full scaling regression: transformed per-cell observations plus
/// the weighted fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub xs: Vec<f64>,
    /// `-ln(error rate)` per cell.
    pub ys: Vec<f64>,
    /// Known observation noise per cell from the binomial delta method.
    pub sigmas: Vec<f64>,
    /// Cells whose rate was replaced by a rule-of-three surrogate.
    pub surrogate: Vec<bool>,
    pub fit: AffineFit,
}

/// Weighted least squares for `y = intercept + slope * x` with known
/// per-point standard deviations. The slope interval is the exact
/// known-variance normal interval at 95%.
pub fn weighted_affine_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> Result<AffineFit> {
    if xs.len() < 3 {
        return Err(Error::InsufficientCells {
            need: 3,
            got: xs.len(),
        });
    }
    if xs.len() != ys.len() || xs.len() != sigmas.len() {
        return Err(Error::InvalidConfig(format!(
            "fit inputs disagree: {} xs, {} ys, {} sigmas",
            xs.len(),
            ys.len(),
            sigmas.len()
        )));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "fit abscissas must be strictly increasing".into(),
        ));
    }
    if sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidConfig(
            "fit noise levels must be positive and finite".into(),
        ));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidConfig("fit ordinates must be finite".into()));
    }
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(xs).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(ys).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(xs).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w
        .iter()
        .zip(xs)
        .zip(ys)
        .map(|((w, x), y)| w * x * y)
        .sum();
    let det = sw * sxx - sx * sx;
    if det <= 0.0 {
        return Err(Error::InvalidConfig(
            "degenerate fit design (collinear abscissas)".into(),
        ));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let slope_se = (sw / det).sqrt();
    let ybar = sy / sw;
    let ss_res: f64 = w
        .iter()
        .zip(xs)
        .zip(ys)
        .map(|((w, x), y)| w * (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = w.iter().zip(ys).map(|(w, y)| w * (y - ybar).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(AffineFit {
        slope,
        intercept,
        slope_se,
        slope_ci: (slope - Z95 * slope_se, slope + Z95 * slope_se),
        r2,
    })
}

/// Fit `-ln(error rate)` against the supplied abscissas.
///
/// Cells that observed zero errors have no usable rate; they enter with
/// the rule-of-three upper bound `3/trials` and a raised surrogate flag
/// rather than being dropped (dropping would bias the slope upward).
/// Cells with zero successes on the other side are treated symmetrically.
/// Noise levels come from the binomial delta method,
/// `sigma = sqrt((1-p)/(n p))`.
pub fn fit_sqrt_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    let mut sigmas = Vec::with_capacity(points.len());
    let mut surrogate = Vec::with_capacity(points.len());
    for p in points {
        if p.trials == 0 {
            return Err(Error::InvalidConfig(
                "scaling cell with zero trials".into(),
            ));
        }
        if p.errors > p.trials {
            return Err(Error::InvalidConfig(format!(
                "scaling cell with {} errors out of {} trials",
                p.errors, p.trials
            )));
        }
        let n = p.trials as f64;
        let (rate, flagged) = if p.errors == 0 {
            (3.0 / n, true)
        } else if p.errors == p.trials {
            (1.0 - 3.0 / n, true)
        } else {
            (p.errors as f64 / n, false)
        };
        xs.push(p.x);
        ys.push(-rate.ln());
        sigmas.push(((1.0 - rate) / (n * rate)).sqrt());
        surrogate.push(flagged);
    }
    let fit = weighted_affine_fit(&xs, &ys, &sigmas)?;
    Ok(ScalingFit {
        xs,
        ys,
        sigmas,
        surrogate,
        fit,
    })
}

// ----------------------------------------------------------------------
// Report writers
// ----------------------------------------------------------------------

/// Write episode rows with the stable documented header
/// `episode_id,truth,decision,stop_time,timeout_flag,effective_pulls,kl_bound_contrib`.
pub fn write_episodes_csv(path: &Path, rows: &[EpisodeRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScalingCsvRow {
    x: f64,
    neg_log_error: f64,
    sigma: f64,
    rule_of_three: u8,
    fitted: f64,
}

/// Write the scaling regression table: per-cell observations plus the
/// fitted line, columns `x,neg_log_error,sigma,rule_of_three,fitted`.
pub fn write_scaling_csv(path: &Path, fit: &ScalingFit) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for i in 0..fit.xs.len() {
        w.serialize(ScalingCsvRow {
            x: fit.xs[i],
            neg_log_error: fit.ys[i],
            sigma: fit.sigmas[i],
            rule_of_three: u8::from(fit.surrogate[i]),
            fitted: fit.fit.intercept + fit.fit.slope * fit.xs[i],
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Write any serializable report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
