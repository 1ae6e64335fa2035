//! Episode outcomes shared by the testing and best-arm policies.

/// How an episode ended: a genuine stop, or the horizon cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopOutcome {
    /// The policy's own stopping rule fired at this step (1-based).
    Stopped { step: u64 },
    /// The episode hit the cap without stopping; its stop time is
    /// right-censored at the cap.
    Timeout { cap: u64 },
}

/// Run-length-compressed trace of small nonnegative values (actions or
/// maximum-likelihood indices); episodes are long and the interesting
/// traces are dominated by long null runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RleTrace {
    runs: Vec<(u32, u64)>,
    len: u64,
}

impl RleTrace {
    pub fn new() -> Self {
        RleTrace::default()
    }

    pub fn push(&mut self, value: u32) {
        self.len += 1;
        if let Some(last) = self.runs.last_mut() {
            if last.0 == value {
                last.1 += 1;
                return;
            }
        }
        self.runs.push((value, 1));
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn runs(&self) -> &[(u32, u64)] {
        &self.runs
    }

    /// Decompressed values in order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs
            .iter()
            .flat_map(|&(v, n)| std::iter::repeat(v).take(n as usize))
    }

    /// Tally of each value's total occurrence count, indexed by value.
    pub fn counts(&self, n_values: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n_values];
        for &(v, n) in &self.runs {
            counts[v as usize] += n;
        }
        counts
    }
}

/// The monitor's observation sequence, when a run records one.
#[derive(Debug, Clone, PartialEq)]
pub enum WillieTrace {
    Discrete(Vec<u32>),
    Gaussian(Vec<f64>),
}

/// Everything a single episode produces.
///
/// `truth` and `decision` are indices: hypothesis indices for the testing
/// policy, arm indices for best-arm identification. A timeout episode of
/// the testing policy carries no decision; a best-arm timeout decides the
/// empirical best arm at the cap and is still counted against the error
/// rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub truth: usize,
    pub decision: Option<usize>,
    pub outcome: StopOutcome,
    pub correct: bool,
    /// Non-null actions actually taken.
    pub effective_pulls: u64,
    /// Accumulated analytic covertness bound along the realized control
    /// trajectory, in nats.
    pub kl_bound: f64,
    /// Realized actions, run-length compressed (only when tracing).
    pub action_trace: Option<RleTrace>,
    /// Per-step control index (maximum-likelihood estimate before the
    /// action was drawn), run-length compressed (only when tracing).
    pub control_trace: Option<RleTrace>,
    /// Monitor observations (only when tracing).
    pub willie_trace: Option<WillieTrace>,
}

impl EpisodeResult {
    /// Stop time in steps; timeout episodes are right-censored at the cap.
    pub fn stop_time(&self) -> u64 {
        match self.outcome {
            StopOutcome::Stopped { step } => step,
            StopOutcome::Timeout { cap } => cap,
        }
    }

    pub fn timed_out(&self) -> bool {
        matches!(self.outcome, StopOutcome::Timeout { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rle_round_trip_and_counts() {
        let mut t = RleTrace::new();
        for v in [0, 0, 0, 2, 2, 1, 0, 0] {
            t.push(v);
        }
        assert_eq!(t.len(), 8);
        assert_eq!(t.runs(), &[(0, 3), (2, 2), (1, 1), (0, 2)]);
        let back: Vec<u32> = t.iter().collect();
        assert_eq!(back, vec![0, 0, 0, 2, 2, 1, 0, 0]);
        assert_eq!(t.counts(3), vec![5, 1, 2]);
    }

    #[test]
    fn stop_time_censors_at_cap() {
        let stopped = StopOutcome::Stopped { step: 17 };
        let timeout = StopOutcome::Timeout { cap: 40 };
        let mk = |outcome| EpisodeResult {
            truth: 0,
            decision: None,
            outcome,
            correct: false,
            effective_pulls: 0,
            kl_bound: 0.0,
            action_trace: None,
            control_trace: None,
            willie_trace: None,
        };
        assert_eq!(mk(stopped).stop_time(), 17);
        assert!(!mk(stopped).timed_out());
        assert_eq!(mk(timeout).stop_time(), 40);
        assert!(mk(timeout).timed_out());
    }
}
