//! Measure the square-root law on the testing policy: sweep the design
//! horizon, estimate the error rate per cell, and fit the decay of
//! `-ln(error)` against `sqrt(n)` by variance-weighted least squares.
//!
//! Under a covertness budget the error exponent is linear in `sqrt(n)`,
//! not in `n`; a positive fitted slope with a confidence interval clear
//! of zero is that law showing up in finite samples.

use quietsense::harness::{self, HtBatchSpec, ScalingPoint};
use quietsense::model::presets;

fn main() -> quietsense::Result<()> {
    let model = presets::threeway_binary().regularize_null(0.02)?;
    let mut spec = HtBatchSpec::new(model, vec![2_500, 10_000, 40_000], 0.5, 0.01);
    spec.episodes = 400;
    spec.master_seed = 17;

    let cells = harness::run_ht_batch(&spec)?;
    println!("n        sqrt(n)  decided  errors  error_rate  wilson_95");
    let mut points = Vec::new();
    for cell in &cells {
        let s = &cell.summary;
        println!(
            "{:<8} {:>7.1} {:>8} {:>7}  {:>10.4}  [{:.4}, {:.4}]",
            cell.n,
            (cell.n as f64).sqrt(),
            s.decided,
            s.errors,
            s.error_rate,
            s.error_wilson_low,
            s.error_wilson_high,
        );
        points.push(ScalingPoint {
            x: (cell.n as f64).sqrt(),
            errors: s.errors as u64,
            trials: s.decided as u64,
        });
    }

    let fit = harness::fit_sqrt_scaling(&points)?;
    println!();
    println!("weighted fit of -ln(error rate) on sqrt(n):");
    println!(
        "  slope {:.6}, 95% CI [{:.6}, {:.6}], intercept {:.6}, weighted r2 {:.4}",
        fit.fit.slope, fit.fit.slope_ci.0, fit.fit.slope_ci.1, fit.fit.intercept, fit.fit.r2
    );
    for i in 0..fit.xs.len() {
        let flag = if fit.surrogate[i] { "  (rule-of-three surrogate)" } else { "" };
        println!(
            "  x = {:>6.1}: y = {:.4}, fitted {:.4}, sigma {:.4}{flag}",
            fit.xs[i],
            fit.ys[i],
            fit.fit.intercept + fit.fit.slope * fit.xs[i],
            fit.sigmas[i],
        );
    }
    Ok(())
}
