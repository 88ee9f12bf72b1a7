//! Config-driven experiment runner for the pqlab numerical laboratory.

pub mod boundary;
pub mod config;
pub mod emit;
pub mod runner;

/// Bundled experiment configurations, compiled into the binary.
pub const BUNDLED: &[(&str, &str)] = &[
    ("prop2_sharpness", include_str!("../experiments/prop2_sharpness.toml")),
    ("prop2_bound", include_str!("../experiments/prop2_bound.toml")),
    ("counterexample", include_str!("../experiments/counterexample.toml")),
    ("theorem1_sweep", include_str!("../experiments/theorem1_sweep.toml")),
    ("caccioppoli", include_str!("../experiments/caccioppoli.toml")),
    ("lemma21_suite", include_str!("../experiments/lemma21_suite.toml")),
    ("holefilling_suite", include_str!("../experiments/holefilling_suite.toml")),
    ("slice_pick_suite", include_str!("../experiments/slice_pick_suite.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
