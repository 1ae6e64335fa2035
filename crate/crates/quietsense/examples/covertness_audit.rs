//! Audit a testing policy from the monitor's side of the wall.
//!
//! Three views of the same budget. The design audit sums the analytic
//! per-step divergence over the horizon and checks the quadratic leading
//! term against `eta`. The detector experiment then actually attacks the
//! policy with a product likelihood-ratio test over recorded traces; a
//! budget of `eta` floors its miss-plus-false-alarm sum at
//! `1 - sqrt(eta)`, so small budgets force the monitor toward coin
//! flipping. An identical-law control run calibrates the experiment.

use quietsense::exponent::SolverOptions;
use quietsense::harness;
use quietsense::model::presets;
use quietsense::{adversary, seqtest};

fn main() -> quietsense::Result<()> {
    let model = presets::threeway_binary().regularize_null(0.02)?;
    let eta = 0.25;
    let policy = seqtest::build_policy(&model, 10_000, eta, 0.01, None, &SolverOptions::default())?;

    println!("design audit at eta = {eta}:");
    for theta in 0..model.n_hypotheses() {
        let report = adversary::audit_ht_design(&policy, theta, false)?;
        println!(
            "  truth {}: horizon bound {:.6} nats, quadratic term {:.6}, within budget: {}",
            model.labels()[theta],
            report.analytic_bound,
            report.quadratic_leading_term,
            report.within_budget,
        );
    }

    let truth = model.index_of("b").expect("preset label");
    let steps = 4_000;
    let traces = 600;
    let recorded = harness::detector_traces(&policy, truth, steps, traces, 11)?;
    let mix = policy.output_mixture(truth)?;
    let null = model.willie_null(truth).clone();

    println!();
    println!("product likelihood-ratio detector, {traces} traces per class:");
    for k in [500usize, 2_000, 4_000] {
        let active: Vec<Vec<u32>> = recorded.active.iter().map(|t| t[..k].to_vec()).collect();
        let idle: Vec<Vec<u32>> = recorded.idle.iter().map(|t| t[..k].to_vec()).collect();
        let d = adversary::detect(&active, &idle, &mix, &null, eta)?;
        println!(
            "  k = {k:>5}: miss {:.4} + false alarm {:.4} = {:.4}  (floor {:.4}, ci half-width {:.4})",
            d.alpha,
            d.beta,
            d.alpha + d.beta,
            d.sum_lower_bound,
            d.ci_halfwidth,
        );
    }

    // Control: score two independent idle batches with the same statistic.
    // Identical laws admit no detector better than guessing, so the sum
    // should sit at 1 up to binomial noise.
    let second = harness::detector_traces(&policy, truth, steps, traces, 12)?;
    let control = adversary::detect(&recorded.idle, &second.idle, &mix, &null, eta)?;
    println!(
        "  identical-law control: sum = {:.4} (expected 1 within about {:.4})",
        control.alpha + control.beta,
        3.0 * control.ci_halfwidth,
    );
    Ok(())
}
