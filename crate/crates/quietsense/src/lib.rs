#![forbid(unsafe_code)]

//! Covert online decision-making: sequential hypothesis testing and best-arm
//! identification under an output-distribution secrecy constraint.
//!
//! An agent probes a system by choosing actions from `{0, 1, .., K}`, where
//! action `0` is a null action ("do nothing"). Each probe returns a private
//! observation to the agent, but also leaks a side-effect observation to a
//! passive monitor. The agent wants to solve an inference task quickly; the
//! monitor runs a hypothesis test of its own ("is anyone probing?"). The
//! covertness constraint keeps the KL divergence between the monitor's view
//! of a probing run and its view of an idle run below a budget `eta`, which
//! forces the agent to hide probes inside long stretches of null actions and
//! caps the achievable error exponent at `O(sqrt(n))` rather than `O(n)`.
//!
//! The crate covers two tasks end to end:
//!
//! * **Sequential hypothesis testing** ([`seqtest`]): the system hides one of
//!   finitely many hypotheses; each hypothesis fixes both the agent-facing
//!   channel and the monitor-facing channel per action. The policy mixes a
//!   sparse random probe schedule with pairwise log-likelihood-ratio
//!   stopping.
//! * **Best-arm identification** ([`bai`]): unit-variance Gaussian arms; the
//!   agent must name the arm with the largest mean at confidence `1 - delta`
//!   while the monitor watches a known side-effect channel per arm.
//!
//! Supporting modules:
//!
//! * [`prob`]: categorical and unit-variance Gaussian distributions, KL /
//!   chi-square / total-variation divergences, and deterministic seeded
//!   sampling streams.
//! * [`model`]: validated problem instances plus the JSON file format used
//!   by the command-line tool.
//! * [`exponent`]: the error-exponent optimization layer. Covert exponents
//!   are fractional programs (divergence rate over a chi-square covertness
//!   price); they are solved by Dinkelbach iterations with a projected
//!   subgradient inner loop, and independently by brute-force simplex grid
//!   search so every answer can be cross-checked.
//! * [`adversary`]: the monitor's side of the story: per-step divergence
//!   accounting, episode covertness audits, a likelihood-ratio detector, and
//!   a Bretagnolle-Huber sanity check.
//! * [`harness`]: deterministic parallel batch runner, Wilson intervals,
//!   stop-time quantiles, and the square-root scaling-law fit.
//!
//! Randomness is explicit everywhere: every sampling call takes an
//! [`prob::RngStream`], and batch runs derive one stream per episode from
//! `(master seed, cell, episode, lane)` counters, so results are identical
//! across runs and across worker counts.

pub mod adversary;
pub mod bai;
pub mod episode;
pub mod exponent;
pub mod harness;
pub mod model;
pub mod prob;
pub mod seqtest;

pub use episode::{EpisodeResult, StopOutcome};
pub use model::{GaussianBanditModel, HypothesisModel};
pub use prob::{ActionDist, Categorical, EffectiveActionDist, RngStream, UnitGaussian};

/// Crate-wide error type.
///
/// Validation-flavored variants map to exit code 2 in the command-line tool,
/// solver-flavored variants to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A KL or chi-square divergence is infinite: the left distribution puts
    /// mass where the right one has none.
    #[error("absolute continuity violated: {0}")]
    AbsoluteContinuityViolation(String),

    /// Two distributions that must share an alphabet do not.
    #[error("alphabet mismatch: {left} outcomes vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    /// A probability vector is malformed (negative mass, wrong sum, floor
    /// violation, empty support).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// The null side-effect distribution must have mean zero.
    #[error("null side-effect mean must be 0, got {0}")]
    NonZeroNullMean(f64),

    /// A covert objective's chi-square denominator vanished; the fractional
    /// program is unbounded or undefined there.
    #[error("degenerate covertness denominator: {0}")]
    DegenerateDenominator(String),

    /// Best-arm identification needs at least two non-null arms.
    #[error("no challenger arm: need at least two non-null arms")]
    NoChallenger,

    /// The optimization loop failed to produce a usable point.
    #[error("solver diverged: {0}")]
    SolverDiverged(String),

    /// A problem instance failed validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Policy construction needs a larger horizon or budget: the effective
    /// action mass exceeded 1 or a stopping threshold came out nonpositive.
    #[error("budget too small for a valid policy: {0}")]
    BudgetTooSmall(String),

    /// `step` was called on an episode that already stopped.
    #[error("stepped a policy after it stopped")]
    SteppedAfterStop,

    /// A quantile or estimate needs more episodes than were supplied.
    #[error("too few episodes: need at least {need}, got {got}")]
    TooFewEpisodes { need: usize, got: usize },

    /// The detector or a plug-in estimate needs more traces.
    #[error("too few traces: need at least {need}, got {got}")]
    TooFewTraces { need: usize, got: usize },

    /// The scaling fit needs at least three usable cells.
    #[error("insufficient cells for a fit: need {need}, got {got}")]
    InsufficientCells { need: usize, got: usize },

    /// A run configuration is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that indicate bad input rather than solver trouble.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::SolverDiverged(_) | Error::DegenerateDenominator(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
