//! The in-repo fixture phases. The `.phase` sources under `fixtures/` are the
//! single source of truth; these accessors parse them once and cache.

use crate::dsl::{self, ParsedPhase};
use crate::phase::Phase;
use std::sync::OnceLock;

pub const T1_SRC: &str = include_str!("../fixtures/t1.phase");
pub const MAX3_SRC: &str = include_str!("../fixtures/max3.phase");
pub const PAIR4_SRC: &str = include_str!("../fixtures/pair4.phase");
pub const SEP4_SRC: &str = include_str!("../fixtures/sep4.phase");
pub const PAIR4_ORDERED_SRC: &str = include_str!("../fixtures/pair4_ordered.phase");

fn cached(cell: &'static OnceLock<Phase>, src: &str) -> Phase {
    cell.get_or_init(|| dsl::parse_phase(src).expect("fixture must parse")).clone()
}

pub fn t1() -> Phase {
    static CELL: OnceLock<Phase> = OnceLock::new();
    cached(&CELL, T1_SRC)
}

pub fn max3() -> Phase {
    static CELL: OnceLock<Phase> = OnceLock::new();
    cached(&CELL, MAX3_SRC)
}

pub fn pair4() -> Phase {
    static CELL: OnceLock<Phase> = OnceLock::new();
    cached(&CELL, PAIR4_SRC)
}

pub fn sep4() -> Phase {
    static CELL: OnceLock<Phase> = OnceLock::new();
    cached(&CELL, SEP4_SRC)
}

pub fn pair4_ordered() -> ParsedPhase {
    static CELL: OnceLock<ParsedPhase> = OnceLock::new();
    CELL.get_or_init(|| dsl::parse(PAIR4_ORDERED_SRC).expect("fixture must parse")).clone()
}

/// All four plain fixtures in a fixed order.
pub fn all() -> Vec<Phase> {
    vec![t1(), max3(), pair4(), sep4()]
}
