#![allow(dead_code)] // each test binary uses a different slice of these helpers

//! Shared fixtures for the integration suites: cached catalogues and the
//! pass-line printer used by the acceptance criteria.

use phaselab::catalogue::{self, CatalogueSpec};
use phaselab::morphism::DEFAULT_NODE_BUDGET;
use phaselab::Phase;
use std::sync::OnceLock;
use std::time::Instant;

/// Process-wide epoch: set when the first criterion starts, read by the
/// runtime criterion.
pub fn epoch() -> Instant {
    static EPOCH: OnceLock<Instant> = OnceLock::new();
    *EPOCH.get_or_init(Instant::now)
}

/// The exhaustive deduplicated universe: one binary operation, carriers
/// 1..=3, defect values up to 2.
pub fn universe_n3() -> &'static [Phase] {
    static UNIVERSE: OnceLock<Vec<Phase>> = OnceLock::new();
    UNIVERSE.get_or_init(|| {
        let mut out = Vec::new();
        for size in 1..=3 {
            out.extend(
                catalogue::enumerate_phases(
                    &CatalogueSpec::binary(size, 2, true),
                    DEFAULT_NODE_BUDGET,
                )
                .expect("universe enumeration fits the budget"),
            );
        }
        out
    })
}

/// The standard verification battery (fixtures + exhaustive small universes
/// + deterministic samples).
pub fn standard() -> &'static [Phase] {
    static STANDARD: OnceLock<Vec<Phase>> = OnceLock::new();
    STANDARD.get_or_init(|| catalogue::standard_catalogue().expect("standard catalogue builds"))
}

pub fn pass(criterion: usize, name: &str, details: String) {
    println!("ACCEPTANCE {criterion:02} {name}: PASS ({details})");
}

#[allow(dead_code)]
pub fn digests(phases: &[Phase]) -> Vec<String> {
    phases.iter().map(|p| phaselab::canon::digest(p).expect("digest")).collect()
}
