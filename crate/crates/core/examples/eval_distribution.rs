//! Baseline versus corrected CDF/PDF for the Pearson statistic on four
//! equal cells at n = 32.
//!
//! Run with: cargo run --example eval_distribution

use chi2corr::{
    compute_constants, multinomial_model, CorrectedDistribution, MultinomialSpec,
};
use chi2corr::distribution::chi2_cdf;

fn main() {
    let spec = MultinomialSpec::new(vec![0.25; 4], 32).expect("valid design");
    let constants = compute_constants(&multinomial_model(&spec)).expect("projector model");
    let k = constants.k;
    println!(
        "k = {}, a = {}, b = {:.6}, c = {:.6}, d = {}",
        k, constants.a, constants.b, constants.c, constants.d
    );
    let dist = CorrectedDistribution::new(constants);

    println!(
        "\n{:>6} {:>14} {:>14} {:>14} {:>14}",
        "u", "baseline_cdf", "corrected_cdf", "shift", "corrected_pdf"
    );
    for i in 1..=16 {
        let u = 0.75 * f64::from(i);
        let base = chi2_cdf(u, k);
        let corr = dist.cdf(u);
        println!(
            "{:>6.2} {:>14.8} {:>14.8} {:>+14.2e} {:>14.8}",
            u,
            base,
            corr,
            corr - base,
            dist.pdf(u)
        );
    }
}
