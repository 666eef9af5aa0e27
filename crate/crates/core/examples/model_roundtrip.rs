//! Model files round-trip bit for bit: write a multinomial model to JSON,
//! reload it, and compare every entry.
//!
//! Run with: cargo run --example model_roundtrip

use chi2corr::models::{load_model, save_model};
use chi2corr::{multinomial_model, MultinomialSpec};

fn main() {
    let spec = MultinomialSpec::new(vec![0.4, 0.3, 0.2, 0.1], 24).expect("valid design");
    let model = multinomial_model(&spec);

    let path = std::env::temp_dir().join("chi2corr_roundtrip.json");
    save_model(&model, &path).expect("writable temp dir");
    let reloaded = load_model(&path).expect("just written");

    assert_eq!(model.n(), reloaded.n());
    assert_eq!(model.mu1(), reloaded.mu1());
    assert_eq!(model.v0().entries(), reloaded.v0().entries());
    assert_eq!(model.v1().entries(), reloaded.v1().entries());
    assert_eq!(model.k3().entries(), reloaded.k3().entries());
    assert_eq!(model.k4().entries(), reloaded.k4().entries());
    println!("round trip exact for p = {}, n = {}", model.p(), model.n());

    let text = std::fs::read_to_string(&path).expect("just written");
    println!("\nfile head:");
    for line in text.lines().take(12) {
        println!("  {line}");
    }
    println!("  ...");
    std::fs::remove_file(&path).ok();
}
