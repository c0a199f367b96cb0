//! Instances shared by the criterion benches.

use recapc_core::gen::{generate, GenConfig};
use recapc_core::{fixtures, Instance};

/// Named fixture instances.
pub fn fixture_cases() -> Vec<(&'static str, Instance)> {
    vec![
        ("example1", fixtures::example1()),
        ("appendix1", fixtures::appendix(1).expect("fixture")),
        ("appendix3", fixtures::appendix(3).expect("fixture")),
    ]
}

/// Generated `M x K` instance with preferences capped at `clip_high`.
pub fn generated(types: usize, categories: usize, clip_high: f64, seed: u64) -> Instance {
    let mut cfg = GenConfig::new(types, categories, seed);
    cfg.clip_high = clip_high;
    generate(&cfg).expect("valid generator settings")
}
