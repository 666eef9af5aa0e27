//! Corrected critical values, and what the non-monotone flag means.
//!
//! Run with: cargo run --example quantiles

use chi2corr::{
    compute_constants, multinomial_model, CorrectedDistribution, CorrectionConstants,
    MultinomialSpec,
};
use chi2corr::distribution::chi2_quantile;

fn main() {
    let spec = MultinomialSpec::new(vec![0.25; 4], 32).expect("valid design");
    let constants = compute_constants(&multinomial_model(&spec)).expect("projector model");
    let k = constants.k;
    let dist = CorrectedDistribution::new(constants);

    println!("{:>6} {:>14} {:>14} {:>10}", "level", "chi2 quantile", "corrected", "shift");
    for level in [0.80, 0.90, 0.95, 0.99] {
        let base = chi2_quantile(level, k).expect("interior level");
        let q = dist.quantile(level).expect("interior level");
        println!(
            "{:>6.2} {:>14.8} {:>14.8} {:>+10.5}",
            level, base, q.value, q.value - base
        );
        assert!(!q.non_monotone);
    }

    // Constants far outside the small-correction regime can make the
    // corrected CDF dip. The quantile then reports the smallest crossing and
    // raises the flag instead of silently picking a root.
    let strong = CorrectionConstants::new(-0.5, 0.0, 0.0, 0.0, 2, 1).expect("finite constants");
    let q = CorrectedDistribution::new(strong)
        .quantile(0.99)
        .expect("interior level");
    println!(
        "\nstrong a = -0.5, k = 2, level 0.99: quantile = {:.6}, non_monotone = {}",
        q.value, q.non_monotone
    );
}
