//! Executable theorem checks over phases and catalogue sweeps.
//!
//! Each check either verifies a claim on concrete inputs, refutes it with a
//! machine-checkable witness, or reports that its applicability gate failed.
//! Witnesses re-validate through the modules that produced them (see
//! [`revalidate`]), so every counterexample can be confirmed independently
//! of the sweep that found it.

use crate::canon;
use crate::catalogue::{self, CatalogueSpec};
use crate::dsl::ParsedPhase;
use crate::equivalence::{self, MoritaProfile};
use crate::error::PhaselabError;
use crate::filtration::{self, InvariantRecord};
use crate::morphism::{self, Mode};
use crate::oracle;
use crate::phase::Phase;
use crate::quotient;
use crate::twocat;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// Every stratum is closed under every operation.
    Subphase,
    /// Below the separation depth, each layer is generated from the previous.
    GenLayers,
    /// Morphisms are determined by their restriction to the rigid core.
    Rigidity,
    /// Morphisms into a separation-admissible target are determined by their
    /// restriction to the source's depth stratum.
    CoreFactor,
    /// The weak-equivalence decider agrees with a brute-force recomputation.
    EqReduction,
    /// Equal strict hom-count profiles imply isomorphism.
    MoritaCollapse,
    /// Isomorphic phases have identical invariant records.
    Invariants,
    /// Profile-equivalent admissible phases have isomorphic boundaries.
    BoundaryMorita,
    /// Morphisms constant on a depth stratum factor through its collapse.
    Localization,
    /// A phase is complete exactly when its completion unit is an isomorphism.
    CompleteFix,
    /// Completion extends to morphisms when the maximal congruence is unique.
    CompFunctor,
    /// Hom sets into complete targets biject with hom sets out of the completion.
    Adjunction,
    /// Ordered phases satisfy the strict 2-category laws.
    Twocat,
}

pub const ALL_THEOREMS: [TheoremId; 13] = [
    TheoremId::Subphase,
    TheoremId::GenLayers,
    TheoremId::Rigidity,
    TheoremId::CoreFactor,
    TheoremId::EqReduction,
    TheoremId::MoritaCollapse,
    TheoremId::Invariants,
    TheoremId::BoundaryMorita,
    TheoremId::Localization,
    TheoremId::CompleteFix,
    TheoremId::CompFunctor,
    TheoremId::Adjunction,
    TheoremId::Twocat,
];

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Subphase => "SUBPHASE",
            TheoremId::GenLayers => "GEN-LAYERS",
            TheoremId::Rigidity => "RIGIDITY",
            TheoremId::CoreFactor => "CORE-FACTOR",
            TheoremId::EqReduction => "EQ-REDUCTION",
            TheoremId::MoritaCollapse => "MORITA-COLLAPSE",
            TheoremId::Invariants => "INVARIANTS",
            TheoremId::BoundaryMorita => "BOUNDARY-MORITA",
            TheoremId::Localization => "LOCALIZATION",
            TheoremId::CompleteFix => "COMPLETE-FIX",
            TheoremId::CompFunctor => "COMP-FUNCTOR",
            TheoremId::Adjunction => "ADJUNCTION",
            TheoremId::Twocat => "TWOCAT",
        }
    }

    /// Number of phase inputs; `None` means any positive number.
    pub fn arity(&self) -> Option<usize> {
        match self {
            TheoremId::Subphase
            | TheoremId::GenLayers
            | TheoremId::CompleteFix => Some(1),
            TheoremId::Twocat => None,
            _ => Some(2),
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = PhaselabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_THEOREMS
            .iter()
            .find(|t| t.as_str() == s)
            .copied()
            .ok_or_else(|| PhaselabError::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gate {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "GEN")]
    Gen,
    #[serde(rename = "SEP")]
    Sep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Verified,
    Counterexample,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum Witness {
    ClosureEscape {
        stratum: u32,
        op: String,
        tuple: Vec<String>,
        output: String,
    },
    GenEscape {
        layer: u32,
        element: String,
    },
    MorphismPair {
        mode: Mode,
        first: BTreeMap<String, String>,
        second: BTreeMap<String, String>,
        agree_on: Vec<String>,
    },
    ProfilePair {
        battery_max_size: usize,
        profile: MoritaProfile,
    },
    InvariantMismatch {
        left: InvariantRecord,
        right: InvariantRecord,
        iso: BTreeMap<String, String>,
    },
    BoundaryMismatch {
        left_boundary: String,
        right_boundary: String,
    },
    NonFactoring {
        map: BTreeMap<String, String>,
        related: (String, String),
        values: (String, String),
        depth: u32,
    },
    CountMismatch {
        left: u64,
        right: u64,
        context: String,
    },
    CompletionInconsistency {
        complete_flag: bool,
        eta_iso: bool,
        comp_iso: bool,
    },
    FunctorFailure {
        map: BTreeMap<String, String>,
        detail: String,
    },
    EqReductionMismatch {
        decider: bool,
        recomputed: bool,
    },
    TwocatViolations {
        violations: Vec<twocat::LawViolation>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub schema_version: u32,
    pub theorem_id: TheoremId,
    pub inputs: Vec<String>,
    pub gate: Gate,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl Verdict {
    fn new(theorem_id: TheoremId, inputs: Vec<String>, gate: Gate) -> Verdict {
        Verdict {
            schema_version: SCHEMA_VERSION,
            theorem_id,
            inputs,
            gate,
            outcome: Outcome::Verified,
            witness: None,
            note: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub budget: u64,
    pub battery_max_size: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { budget: morphism::DEFAULT_NODE_BUDGET, battery_max_size: 3, seed: 0 }
    }
}

type SharedBattery = std::sync::Arc<Vec<(String, Phase)>>;

/// Profile/battery cache shared across the checks of one sweep. Thread-safe
/// so pair sweeps can run in parallel; results are value-deterministic, so
/// duplicated computation across threads is harmless.
#[derive(Default)]
struct SweepCache {
    batteries: std::sync::Mutex<std::collections::HashMap<(u32, usize), SharedBattery>>,
    profiles: std::sync::Mutex<std::collections::HashMap<(String, u32, usize), MoritaProfile>>,
}

impl SweepCache {
    fn profile(
        &self,
        p: &Phase,
        digest: &str,
        cfg: &CheckConfig,
    ) -> Result<MoritaProfile, PhaselabError> {
        let key = (digest.to_string(), p.max_defect(), cfg.battery_max_size);
        if let Some(profile) = self.profiles.lock().unwrap().get(&key) {
            return Ok(profile.clone());
        }
        let battery_key = (p.max_defect(), cfg.battery_max_size);
        let battery = {
            let cached = self.batteries.lock().unwrap().get(&battery_key).cloned();
            match cached {
                Some(b) => b,
                None => {
                    let built = std::sync::Arc::new(equivalence::profile_battery(
                        p,
                        cfg.battery_max_size,
                        p.max_defect(),
                        cfg.budget,
                    )?);
                    self.batteries.lock().unwrap().insert(battery_key, built.clone());
                    built
                }
            }
        };
        let profile =
            equivalence::profile_with_battery(p, &battery, cfg.battery_max_size, cfg.budget)?;
        self.profiles.lock().unwrap().insert(key, profile.clone());
        Ok(profile)
    }
}

fn name_map(p: &Phase, q: &Phase, f: &[usize]) -> BTreeMap<String, String> {
    f.iter()
        .enumerate()
        .map(|(x, &v)| (p.element_name(x).to_string(), q.element_name(v).to_string()))
        .collect()
}

fn index_map(p: &Phase, q: &Phase, named: &BTreeMap<String, String>) -> Option<Vec<usize>> {
    let mut out = vec![usize::MAX; p.n()];
    for (k, v) in named {
        let x = p.element_index(k)?;
        out[x] = q.element_index(v)?;
    }
    if out.contains(&usize::MAX) {
        None
    } else {
        Some(out)
    }
}

/// Run one theorem check on concrete inputs.
pub fn run_check(
    id: TheoremId,
    inputs: &[ParsedPhase],
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let cache = SweepCache::default();
    run_check_cached(id, inputs, cfg, &cache)
}

fn run_check_cached(
    id: TheoremId,
    inputs: &[ParsedPhase],
    cfg: &CheckConfig,
    cache: &SweepCache,
) -> Result<Verdict, PhaselabError> {
    if let Some(arity) = id.arity() {
        if inputs.len() != arity {
            return Err(PhaselabError::InvalidInput(format!(
                "{id} takes {arity} phase(s), got {}",
                inputs.len()
            )));
        }
    } else if inputs.is_empty() {
        return Err(PhaselabError::InvalidInput(format!("{id} needs at least one phase")));
    }
    let digests: Vec<String> =
        inputs.iter().map(|i| canon::digest(&i.phase)).collect::<Result<_, _>>()?;

    match id {
        TheoremId::Subphase => check_subphase(&inputs[0].phase, digests),
        TheoremId::GenLayers => check_gen_layers(&inputs[0].phase, digests),
        TheoremId::Rigidity => check_rigidity(&inputs[0].phase, &inputs[1].phase, digests, cfg),
        TheoremId::CoreFactor => check_core_factor(&inputs[0].phase, &inputs[1].phase, digests, cfg),
        TheoremId::EqReduction => check_eq_reduction(&inputs[0].phase, &inputs[1].phase, digests),
        TheoremId::MoritaCollapse => {
            check_morita_collapse(&inputs[0].phase, &inputs[1].phase, digests, cfg, cache)
        }
        TheoremId::Invariants => check_invariants(&inputs[0].phase, &inputs[1].phase, digests),
        TheoremId::BoundaryMorita => {
            check_boundary_morita(&inputs[0].phase, &inputs[1].phase, digests, cfg, cache)
        }
        TheoremId::Localization => check_localization(&inputs[0].phase, &inputs[1].phase, digests, cfg),
        TheoremId::CompleteFix => check_complete_fix(&inputs[0].phase, digests),
        TheoremId::CompFunctor => check_comp_functor(&inputs[0].phase, &inputs[1].phase, digests, cfg),
        TheoremId::Adjunction => check_adjunction(&inputs[0].phase, &inputs[1].phase, digests, cfg),
        TheoremId::Twocat => check_twocat(inputs, digests, cfg),
    }
}

fn check_subphase(p: &Phase, inputs: Vec<String>) -> Result<Verdict, PhaselabError> {
    let mut verdict = Verdict::new(TheoremId::Subphase, inputs, Gate::None);
    for i in 0..=p.max_defect() {
        if let Some(escape) = p.closure_escape(p.stratum_mask(i)) {
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::ClosureEscape {
                stratum: i,
                op: p.op(escape.op).name.clone(),
                tuple: escape.tuple.iter().map(|&x| p.element_name(x).to_string()).collect(),
                output: p.element_name(escape.output).to_string(),
            });
            return Ok(verdict);
        }
    }
    verdict.note = Some(format!("all {} strata closed", p.max_defect() + 1));
    Ok(verdict)
}

fn check_gen_layers(p: &Phase, inputs: Vec<String>) -> Result<Verdict, PhaselabError> {
    let s = filtration::stratify(p);
    let mut verdict = Verdict::new(TheoremId::GenLayers, inputs, Gate::Sep);
    if !s.strongly_admissible_sep() {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some(format!("Sep fails: d_sep = {} < k = {}", s.d_sep, s.k));
        return Ok(verdict);
    }
    for i in 1..=s.k {
        if !s.gen_flags[(i - 1) as usize] {
            let mut below = 0u32;
            for x in 0..p.n() {
                if p.defect(x) < i {
                    below |= 1 << x;
                }
            }
            let closure = p.generated_closure(below);
            let escapee = s.layers[i as usize]
                .iter()
                .find(|&&x| closure & (1 << x) == 0)
                .copied()
                .expect("a failing flag has an escapee");
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::GenEscape {
                layer: i,
                element: p.element_name(escapee).to_string(),
            });
            verdict.note = Some(
                "separation-admissible phase whose layer is not generated from below".into(),
            );
            return Ok(verdict);
        }
    }
    Ok(verdict)
}

fn rigidity_core_witness(
    p: &Phase,
    q: &Phase,
    check: &morphism::RigidityCheck,
    members: &[usize],
) -> Option<Witness> {
    check.witness.as_ref().map(|(f, g)| Witness::MorphismPair {
        mode: Mode::Strict,
        first: name_map(p, q, f),
        second: name_map(p, q, g),
        agree_on: members.iter().map(|&x| p.element_name(x).to_string()).collect(),
    })
}

fn check_rigidity(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let sp = filtration::stratify(p);
    let sq = filtration::stratify(q);
    let sep_ok = sp.strongly_admissible_sep() && sq.strongly_admissible_sep();
    let rank_ok = filtration::invariants(p)?.defect_rank == filtration::invariants(q)?.defect_rank;
    let mut verdict = Verdict::new(TheoremId::Rigidity, inputs, Gate::Sep);
    let check = morphism::rigidity_check(p, q, Mode::Strict, cfg.budget)?;
    let core = filtration::rigid_core_members(p);
    if !(sep_ok && rank_ok) {
        verdict.outcome = Outcome::Inapplicable;
        let mut reasons = Vec::new();
        if !sep_ok {
            reasons.push(format!(
                "Sep fails (d_sep {} of k {}, d_sep {} of k {})",
                sp.d_sep, sp.k, sq.d_sep, sq.k
            ));
        }
        if !rank_ok {
            reasons.push("defect ranks differ".into());
        }
        if !check.injective {
            reasons.push("restriction map non-injective anyway (witness attached)".into());
            verdict.witness = rigidity_core_witness(p, q, &check, &core);
        } else if sep_ok && !rank_ok {
            reasons.push("ignoring defect rank the check would verify".into());
        }
        verdict.note = Some(reasons.join("; "));
        return Ok(verdict);
    }
    if check.injective {
        verdict.note = Some(format!("{} strict morphism(s), all core-determined", check.hom_count));
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = rigidity_core_witness(p, q, &check, &core);
    }
    Ok(verdict)
}

fn restriction_injective(
    homs: &[Vec<usize>],
    members: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut seen: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    for (i, map) in homs.iter().enumerate() {
        let key: Vec<usize> = members.iter().map(|&x| map[x]).collect();
        match seen.get(&key) {
            None => {
                seen.insert(key, i);
            }
            Some(&first) => return Some((homs[first].clone(), map.clone())),
        }
    }
    None
}

fn check_core_factor(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let sq = filtration::stratify(q);
    let mut verdict = Verdict::new(TheoremId::CoreFactor, inputs, Gate::Sep);
    if !sq.strongly_admissible_sep() {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some(format!("target not separation-admissible: d_sep {} < k {}", sq.d_sep, sq.k));
        return Ok(verdict);
    }
    let sp = filtration::stratify(p);
    let homs = morphism::core_seeded_homs(p, q, Mode::Strict, cfg.budget)?;
    let sep_members = p.stratum_members(sp.d_sep);
    let gen_members = p.stratum_members(sp.d_gen);
    let gen_result = restriction_injective(&homs.maps, &gen_members);
    match restriction_injective(&homs.maps, &sep_members) {
        None => {
            verdict.note = Some(format!(
                "{} morphism(s) determined by the depth-{} stratum; GEN-stratum restriction {}",
                homs.maps.len(),
                sp.d_sep,
                if gen_result.is_none() { "also injective" } else { "NOT injective" },
            ));
        }
        Some((f, g)) => {
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::MorphismPair {
                mode: Mode::Strict,
                first: name_map(p, q, &f),
                second: name_map(p, q, &g),
                agree_on: sep_members.iter().map(|&x| p.element_name(x).to_string()).collect(),
            });
            verdict.note = Some(format!(
                "morphisms into an admissible target not determined by the depth-{} stratum",
                sp.d_sep
            ));
        }
    }
    Ok(verdict)
}

/// Brute-force route for the weak-equivalence clauses: grading data equal
/// plus some defect-preserving bijection restricting to an isomorphism of
/// the depth strata.
fn weak_equivalence_oracle(p: &Phase, q: &Phase) -> Result<bool, PhaselabError> {
    let sp = filtration::stratify(p);
    let sq = filtration::stratify(q);
    if sp.k != sq.k || sp.d_sep != sq.d_sep || p.n() != q.n() {
        return Ok(false);
    }
    let members_p = p.stratum_members(sp.d_sep);
    let members_q = q.stratum_members(sp.d_sep);
    if members_p.len() != members_q.len() {
        return Ok(false);
    }
    let core_p = p.induced(&members_p, "oracle_p")?;
    let core_q = q.induced(&members_q, "oracle_q")?;
    for bijection in oracle::delta_preserving_bijections(p, q) {
        // the restriction must send the stratum onto the stratum (automatic
        // for defect-preserving maps) and be an isomorphism there
        let restricted: Vec<usize> = members_p
            .iter()
            .map(|&x| members_q.iter().position(|&y| y == bijection[x]).unwrap())
            .collect();
        if oracle::is_strict_iso(&core_p, &core_q, &restricted) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_eq_reduction(p: &Phase, q: &Phase, inputs: Vec<String>) -> Result<Verdict, PhaselabError> {
    let mut verdict = Verdict::new(TheoremId::EqReduction, inputs, Gate::None);
    let decider = equivalence::weak_equivalent(p, q)?.equivalent;
    let recomputed = weak_equivalence_oracle(p, q)?;
    if decider == recomputed {
        verdict.note = Some(format!("both routes agree: weakly equivalent = {decider}"));
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = Some(Witness::EqReductionMismatch { decider, recomputed });
    }
    Ok(verdict)
}

fn check_morita_collapse(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
    cache: &SweepCache,
) -> Result<Verdict, PhaselabError> {
    let sp = filtration::stratify(p);
    let sq = filtration::stratify(q);
    let mut verdict = Verdict::new(TheoremId::MoritaCollapse, inputs.clone(), Gate::Sep);
    if !(sp.strongly_admissible_sep() && sq.strongly_admissible_sep()) {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some("both inputs must be separation-admissible".into());
        return Ok(verdict);
    }
    if sp.k != sq.k {
        verdict.note = Some("profiles differ trivially: filtration lengths differ".into());
        return Ok(verdict);
    }
    let profile_p = cache.profile(p, &inputs[0], cfg)?;
    let profile_q = cache.profile(q, &inputs[1], cfg)?;
    let strict_equal = profile_p.entries.len() == profile_q.entries.len()
        && profile_p
            .entries
            .iter()
            .zip(&profile_q.entries)
            .all(|(a, b)| a.digest == b.digest && a.strict == b.strict);
    if !strict_equal {
        verdict.note = Some("strict profiles differ".into());
        return Ok(verdict);
    }
    if equivalence::strong_equivalent(p, q)?.is_some() {
        verdict.note = Some("equal strict profiles and isomorphic".into());
        return Ok(verdict);
    }
    verdict.outcome = Outcome::Counterexample;
    verdict.witness = Some(Witness::ProfilePair {
        battery_max_size: cfg.battery_max_size,
        profile: profile_p,
    });
    verdict.note = Some("equal strict profiles but no isomorphism".into());
    Ok(verdict)
}

fn check_invariants(p: &Phase, q: &Phase, inputs: Vec<String>) -> Result<Verdict, PhaselabError> {
    let mut verdict = Verdict::new(TheoremId::Invariants, inputs, Gate::None);
    let Some(iso) = equivalence::strong_equivalent(p, q)? else {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some("inputs are not isomorphic".into());
        return Ok(verdict);
    };
    let left = filtration::invariants(p)?;
    let right = filtration::invariants(q)?;
    if left == right {
        verdict.note = Some("invariant records agree".into());
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = Some(Witness::InvariantMismatch { left, right, iso: name_map(p, q, &iso) });
    }
    Ok(verdict)
}

fn check_boundary_morita(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
    cache: &SweepCache,
) -> Result<Verdict, PhaselabError> {
    let sp = filtration::stratify(p);
    let sq = filtration::stratify(q);
    let mut verdict = Verdict::new(TheoremId::BoundaryMorita, inputs.clone(), Gate::Sep);
    if !(sp.strongly_admissible_sep() && sq.strongly_admissible_sep()) {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some("both inputs must be separation-admissible".into());
        return Ok(verdict);
    }
    let isomorphic = equivalence::strong_equivalent(p, q)?.is_some();
    let profile_equal = if isomorphic || sp.k != sq.k {
        isomorphic
    } else {
        let profile_p = cache.profile(p, &inputs[0], cfg)?;
        let profile_q = cache.profile(q, &inputs[1], cfg)?;
        profile_p.entries.len() == profile_q.entries.len()
            && profile_p
                .entries
                .iter()
                .zip(&profile_q.entries)
                .all(|(a, b)| a.digest == b.digest && a.strict == b.strict)
    };
    if !(isomorphic || profile_equal) {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some("inputs are neither isomorphic nor profile-equal".into());
        return Ok(verdict);
    }
    let bp = quotient::boundary(p)?;
    let bq = quotient::boundary(q)?;
    if equivalence::strong_equivalent(&bp, &bq)?.is_some() {
        verdict.note = Some("boundaries isomorphic".into());
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = Some(Witness::BoundaryMismatch {
            left_boundary: canon::digest(&bp)?,
            right_boundary: canon::digest(&bq)?,
        });
    }
    Ok(verdict)
}

fn check_localization(
    p: &Phase,
    r: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let sp = filtration::stratify(p);
    let depth = sp.d_sep;
    let mut verdict = Verdict::new(TheoremId::Localization, inputs, Gate::None);
    let homs = morphism::core_seeded_homs(p, r, Mode::Strict, cfg.budget)?;
    let collapsed = quotient::collapse_stratum(p, depth)?;
    let mut constant_count = 0u64;
    for f in &homs.maps {
        let members = p.stratum_members(depth);
        if !members.windows(2).all(|w| f[w[0]] == f[w[1]]) {
            continue;
        }
        constant_count += 1;
        let out = morphism::factorization_check(p, depth, f, r)?;
        let Some(factored) = &out.factored else {
            // the closure congruence relates a pair that f distinguishes
            let (x, y) = out
                .congruence
                .classes()
                .iter()
                .find_map(|class| {
                    class.windows(2).find(|w| f[w[0]] != f[w[1]]).map(|w| (w[0], w[1]))
                })
                .expect("a non-factoring map distinguishes a related pair");
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::NonFactoring {
                map: name_map(p, r, f),
                related: (p.element_name(x).to_string(), p.element_name(y).to_string()),
                values: (
                    r.element_name(f[x]).to_string(),
                    r.element_name(f[y]).to_string(),
                ),
                depth,
            });
            return Ok(verdict);
        };
        // the factored map must be equivariant and recover f through the
        // projection; a failure here is a broken quotient, not a theorem
        // counterexample
        let check = morphism::is_morphism(&collapsed, r, factored, Mode::Lax)?;
        let equivariant = check
            .violations
            .iter()
            .all(|v| matches!(v, morphism::MorphismViolation::Filtration { .. }));
        let recovers = (0..p.n()).all(|x| factored[out.congruence.class_of(x)] == f[x]);
        if !(equivariant && recovers) {
            return Err(PhaselabError::InvalidInput(format!(
                "factored map of {} through depth {depth} is not a morphism recovering it",
                p.name()
            )));
        }
    }
    verdict.note = Some(format!(
        "{} of {} strict morphism(s) constant on the depth-{} stratum, all factoring uniquely",
        constant_count,
        homs.maps.len(),
        depth
    ));
    Ok(verdict)
}

fn check_complete_fix(p: &Phase, inputs: Vec<String>) -> Result<Verdict, PhaselabError> {
    let mut verdict = Verdict::new(TheoremId::CompleteFix, inputs, Gate::None);
    let result = quotient::completion(p)?;
    let eta_iso = result.congruence.is_diagonal();
    let comp_iso = equivalence::strong_equivalent(p, &result.completed)?.is_some();
    if result.complete == eta_iso && eta_iso == comp_iso {
        verdict.note = Some(format!("complete = {} on all three routes", result.complete));
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = Some(Witness::CompletionInconsistency {
            complete_flag: result.complete,
            eta_iso,
            comp_iso,
        });
    }
    Ok(verdict)
}

fn check_comp_functor(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let rp = quotient::completion(p)?;
    let rq = quotient::completion(q)?;
    let mut verdict = Verdict::new(TheoremId::CompFunctor, inputs, Gate::None);
    match (rp.unique_max, rq.unique_max) {
        (Some(true), Some(true)) => {}
        (None, _) | (_, None) => {
            verdict.outcome = Outcome::Inapplicable;
            verdict.note = Some("carrier too large to certify a unique maximal congruence".into());
            return Ok(verdict);
        }
        _ => {
            verdict.outcome = Outcome::Inapplicable;
            verdict.note = Some("maximal admissible congruence is not unique".into());
            return Ok(verdict);
        }
    }
    let homs = morphism::core_seeded_homs(p, q, Mode::Strict, cfg.budget)?;
    for g in &homs.maps {
        // induced class map: well-defined iff related sources have related images
        let mut induced = vec![usize::MAX; rp.completed.n()];
        let mut ok = true;
        for x in 0..p.n() {
            let class = rp.unit_map[x];
            let image = rq.unit_map[g[x]];
            if induced[class] == usize::MAX {
                induced[class] = image;
            } else if induced[class] != image {
                ok = false;
                break;
            }
        }
        let valid = ok
            && morphism::is_morphism(&rp.completed, &rq.completed, &induced, Mode::Strict)?
                .valid;
        if !valid {
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::FunctorFailure {
                map: name_map(p, q, g),
                detail: if ok {
                    "induced class map is not a strict morphism".into()
                } else {
                    "completion congruence not respected".into()
                },
            });
            return Ok(verdict);
        }
    }
    verdict.note = Some(format!("{} morphism(s) lift through the completions", homs.maps.len()));
    Ok(verdict)
}

fn check_adjunction(
    p: &Phase,
    q: &Phase,
    inputs: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let rq = quotient::completion(q)?;
    let mut verdict = Verdict::new(TheoremId::Adjunction, inputs, Gate::None);
    if !rq.complete {
        verdict.outcome = Outcome::Inapplicable;
        verdict.note = Some("target is not complete".into());
        return Ok(verdict);
    }
    let rp = quotient::completion(p)?;
    let direct = morphism::core_seeded_homs(p, q, Mode::Strict, cfg.budget)?;
    let through = morphism::core_seeded_homs(&rp.completed, q, Mode::Strict, cfg.budget)?;
    if direct.maps.len() == through.maps.len() {
        verdict.note = Some(format!(
            "hom sets biject through the unit ({} morphisms)",
            direct.maps.len()
        ));
        return Ok(verdict);
    }
    // counts differ: exhibit a morphism that does not factor through the unit
    for f in &direct.maps {
        if let Some((x, y)) = rp.congruence.classes().iter().find_map(|class| {
            class.windows(2).find(|w| f[w[0]] != f[w[1]]).map(|w| (w[0], w[1]))
        }) {
            verdict.outcome = Outcome::Counterexample;
            verdict.witness = Some(Witness::NonFactoring {
                map: name_map(p, q, f),
                related: (p.element_name(x).to_string(), p.element_name(y).to_string()),
                values: (q.element_name(f[x]).to_string(), q.element_name(f[y]).to_string()),
                depth: 0,
            });
            verdict.note = Some(format!(
                "|Hom(p,q)| = {} but |Hom(Comp p, q)| = {}",
                direct.maps.len(),
                through.maps.len()
            ));
            return Ok(verdict);
        }
    }
    verdict.outcome = Outcome::Counterexample;
    verdict.witness = Some(Witness::CountMismatch {
        left: direct.maps.len() as u64,
        right: through.maps.len() as u64,
        context: "hom-set cardinalities through the completion unit".into(),
    });
    Ok(verdict)
}

fn check_twocat(
    inputs: &[ParsedPhase],
    digests: Vec<String>,
    cfg: &CheckConfig,
) -> Result<Verdict, PhaselabError> {
    let mut verdict = Verdict::new(TheoremId::Twocat, digests, Gate::None);
    let report = twocat::check_two_category_laws(inputs, cfg.budget)?;
    if report.violations.is_empty() {
        verdict.note = Some(format!(
            "{} configurations checked, {} one-cells, {} two-cells",
            report.configurations_checked, report.one_cells, report.two_cells
        ));
    } else {
        verdict.outcome = Outcome::Counterexample;
        verdict.witness = Some(Witness::TwocatViolations { violations: report.violations });
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub verified: u64,
    pub counterexample: u64,
    pub inapplicable: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub theorem_id: TheoremId,
    pub max_size: usize,
    pub max_delta: u32,
    pub battery_max_size: usize,
    pub summary: SweepSummary,
    pub summary_ext: BTreeMap<String, u64>,
    /// Non-verified verdicts in canonical sweep order.
    pub findings: Vec<Verdict>,
}

/// Deduplicated catalogue with carriers `1..=max_size`.
fn sweep_catalogue(max_size: usize, max_delta: u32, budget: u64) -> Result<Vec<Phase>, PhaselabError> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        out.extend(catalogue::enumerate_phases(
            &CatalogueSpec::binary(size, max_delta, true),
            budget,
        )?);
    }
    Ok(out)
}

/// Run a theorem check across the deduplicated catalogue; returns summary
/// counts and every non-verified verdict. `INVARIANTS` pairs each phase with
/// a seeded scramble (the deduplicated catalogue holds no isomorphic pairs);
/// `TWOCAT` runs on the ordered fixture battery.
pub fn search_counterexamples(
    id: TheoremId,
    max_size: usize,
    max_delta: u32,
    cfg: &CheckConfig,
) -> Result<SweepReport, PhaselabError> {
    let cache = SweepCache::default();
    let mut report = SweepReport {
        schema_version: SCHEMA_VERSION,
        theorem_id: id,
        max_size,
        max_delta,
        battery_max_size: cfg.battery_max_size,
        summary: SweepSummary { verified: 0, counterexample: 0, inapplicable: 0 },
        summary_ext: BTreeMap::new(),
        findings: Vec::new(),
    };
    let record = |report: &mut SweepReport, verdict: Verdict| {
        match verdict.outcome {
            Outcome::Verified => report.summary.verified += 1,
            Outcome::Counterexample => report.summary.counterexample += 1,
            Outcome::Inapplicable => report.summary.inapplicable += 1,
        }
        if verdict.outcome != Outcome::Verified {
            report.findings.push(verdict);
        }
    };

    if id == TheoremId::Twocat {
        let battery = vec![
            ParsedPhase { phase: crate::fixtures::t1(), order: Some(vec![]) },
            crate::fixtures::pair4_ordered(),
        ];
        let verdict = run_check_cached(id, &battery, cfg, &cache)?;
        record(&mut report, verdict);
        return Ok(report);
    }

    let phases = sweep_catalogue(max_size, max_delta, cfg.budget)?;
    let parsed: Vec<ParsedPhase> =
        phases.iter().map(|p| ParsedPhase { phase: p.clone(), order: None }).collect();

    // checks run in parallel per input tuple; the order-preserving collect
    // keeps verdict order (and therefore serialized reports) deterministic
    use rayon::prelude::*;
    match id.arity() {
        Some(1) => {
            let verdicts: Vec<Verdict> = parsed
                .par_iter()
                .map(|input| run_check_cached(id, std::slice::from_ref(input), cfg, &cache))
                .collect::<Result<_, _>>()?;
            for verdict in verdicts {
                record(&mut report, verdict);
            }
        }
        Some(2) if id == TheoremId::Invariants => {
            let verdicts: Vec<Verdict> = parsed
                .par_iter()
                .enumerate()
                .map(|(i, input)| {
                    let perm =
                        catalogue::random_permutation(cfg.seed ^ (i as u64), input.phase.n());
                    let scrambled = catalogue::scramble(&input.phase, &perm)?;
                    let pair = vec![input.clone(), ParsedPhase { phase: scrambled, order: None }];
                    run_check_cached(id, &pair, cfg, &cache)
                })
                .collect::<Result<_, _>>()?;
            for verdict in verdicts {
                record(&mut report, verdict);
            }
        }
        Some(2) => {
            let estimated = (parsed.len() as u128) * (parsed.len() as u128);
            if estimated > cfg.budget as u128 {
                return Err(PhaselabError::BudgetExceeded {
                    required: estimated,
                    budget: cfg.budget,
                });
            }
            let n = parsed.len();
            let verdicts: Vec<Verdict> = (0..n * n)
                .into_par_iter()
                .map(|idx| {
                    let pair = vec![parsed[idx / n].clone(), parsed[idx % n].clone()];
                    run_check_cached(id, &pair, cfg, &cache)
                })
                .collect::<Result<_, _>>()?;
            let mut rank_would_verify = 0u64;
            let mut rank_would_fail = 0u64;
            for verdict in verdicts {
                if id == TheoremId::Rigidity && verdict.outcome == Outcome::Inapplicable {
                    if let Some(note) = &verdict.note {
                        if note.contains("ignoring defect rank the check would verify") {
                            rank_would_verify += 1;
                        } else if note.contains("restriction map non-injective")
                            && !note.contains("Sep fails")
                        {
                            rank_would_fail += 1;
                        }
                    }
                }
                record(&mut report, verdict);
            }
            if id == TheoremId::Rigidity {
                report.summary_ext.insert("rank_gate_only_would_verify".into(), rank_would_verify);
                report.summary_ext.insert("rank_gate_only_would_fail".into(), rank_would_fail);
            }
        }
        _ => unreachable!("TWOCAT handled above"),
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Witness re-validation
// ---------------------------------------------------------------------------

/// Re-validate a verdict's witness against the phases it was produced from,
/// using the originating modules. Returns true when the witness still
/// demonstrates what the verdict claims.
pub fn revalidate(verdict: &Verdict, inputs: &[ParsedPhase]) -> Result<bool, PhaselabError> {
    let Some(witness) = &verdict.witness else {
        return Ok(verdict.outcome != Outcome::Counterexample);
    };
    match witness {
        Witness::ClosureEscape { stratum, op, tuple, output } => {
            let p = &inputs[0].phase;
            let Some(op_idx) =
                (0..p.op_count()).find(|&i| p.op(i).name == *op)
            else {
                return Ok(false);
            };
            let args: Option<Vec<usize>> =
                tuple.iter().map(|e| p.element_index(e)).collect();
            let (Some(args), Some(out)) = (args, p.element_index(output)) else {
                return Ok(false);
            };
            let mask = p.stratum_mask(*stratum);
            let in_stratum = args.iter().all(|&a| mask & (1 << a) != 0);
            Ok(in_stratum && p.apply(op_idx, &args) == out && mask & (1 << out) == 0)
        }
        Witness::GenEscape { layer, element } => {
            let p = &inputs[0].phase;
            let Some(x) = p.element_index(element) else { return Ok(false) };
            if p.defect(x) != *layer {
                return Ok(false);
            }
            let mut below = 0u32;
            for e in 0..p.n() {
                if p.defect(e) < *layer {
                    below |= 1 << e;
                }
            }
            Ok(p.generated_closure(below) & (1 << x) == 0)
        }
        Witness::MorphismPair { mode, first, second, agree_on } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let (Some(f), Some(g)) = (index_map(p, q, first), index_map(p, q, second)) else {
                return Ok(false);
            };
            if f == g {
                return Ok(false);
            }
            let fv = morphism::is_morphism(p, q, &f, *mode)?.valid;
            let gv = morphism::is_morphism(p, q, &g, *mode)?.valid;
            let agrees = agree_on.iter().all(|name| {
                p.element_index(name).map(|x| f[x] == g[x]).unwrap_or(false)
            });
            Ok(fv && gv && agrees)
        }
        Witness::ProfilePair { battery_max_size, .. } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let cfg = CheckConfig { battery_max_size: *battery_max_size, ..Default::default() };
            let a = equivalence::morita_profile(p, cfg.battery_max_size, cfg.budget)?;
            let b = equivalence::morita_profile(q, cfg.battery_max_size, cfg.budget)?;
            let strict_equal = a.entries.len() == b.entries.len()
                && a.entries
                    .iter()
                    .zip(&b.entries)
                    .all(|(x, y)| x.digest == y.digest && x.strict == y.strict);
            Ok(strict_equal && equivalence::strong_equivalent(p, q)?.is_none())
        }
        Witness::InvariantMismatch { left, right, iso } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let Some(f) = index_map(p, q, iso) else { return Ok(false) };
            Ok(oracle::is_strict_iso(p, q, &f)
                && *left == filtration::invariants(p)?
                && *right == filtration::invariants(q)?
                && left != right)
        }
        Witness::BoundaryMismatch { left_boundary, right_boundary } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let bp = quotient::boundary(p)?;
            let bq = quotient::boundary(q)?;
            Ok(canon::digest(&bp)? == *left_boundary
                && canon::digest(&bq)? == *right_boundary
                && equivalence::strong_equivalent(&bp, &bq)?.is_none())
        }
        Witness::NonFactoring { map, related, values, depth } => {
            let (p, r) = (&inputs[0].phase, &inputs[1].phase);
            let Some(f) = index_map(p, r, map) else { return Ok(false) };
            if !morphism::is_morphism(p, r, &f, Mode::Strict)?.valid {
                return Ok(false);
            }
            let (Some(x), Some(y)) =
                (p.element_index(&related.0), p.element_index(&related.1))
            else {
                return Ok(false);
            };
            let congruence = match verdict.theorem_id {
                TheoremId::Adjunction => quotient::completion(p)?.congruence,
                _ => quotient::stratum_congruence(p, *depth)?,
            };
            Ok(congruence.related(x, y)
                && f[x] != f[y]
                && r.element_name(f[x]) == values.0
                && r.element_name(f[y]) == values.1)
        }
        Witness::CountMismatch { left, right, .. } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let rp = quotient::completion(p)?;
            let direct =
                morphism::core_seeded_homs(p, q, Mode::Strict, morphism::DEFAULT_NODE_BUDGET)?;
            let through = morphism::core_seeded_homs(
                &rp.completed,
                q,
                Mode::Strict,
                morphism::DEFAULT_NODE_BUDGET,
            )?;
            Ok(direct.maps.len() as u64 == *left
                && through.maps.len() as u64 == *right
                && left != right)
        }
        Witness::CompletionInconsistency { complete_flag, eta_iso, comp_iso } => {
            let p = &inputs[0].phase;
            let r = quotient::completion(p)?;
            let eta = r.congruence.is_diagonal();
            let comp = equivalence::strong_equivalent(p, &r.completed)?.is_some();
            Ok(r.complete == *complete_flag
                && eta == *eta_iso
                && comp == *comp_iso
                && !(r.complete == eta && eta == comp))
        }
        Witness::FunctorFailure { map, .. } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let Some(g) = index_map(p, q, map) else { return Ok(false) };
            if !morphism::is_morphism(p, q, &g, Mode::Strict)?.valid {
                return Ok(false);
            }
            let rp = quotient::completion(p)?;
            let rq = quotient::completion(q)?;
            let mut induced = vec![usize::MAX; rp.completed.n()];
            for x in 0..p.n() {
                let class = rp.unit_map[x];
                let image = rq.unit_map[g[x]];
                if induced[class] == usize::MAX {
                    induced[class] = image;
                } else if induced[class] != image {
                    return Ok(true); // congruence genuinely not respected
                }
            }
            Ok(!morphism::is_morphism(&rp.completed, &rq.completed, &induced, Mode::Strict)?
                .valid)
        }
        Witness::EqReductionMismatch { decider, recomputed } => {
            let (p, q) = (&inputs[0].phase, &inputs[1].phase);
            let d = equivalence::weak_equivalent(p, q)?.equivalent;
            let r = weak_equivalence_oracle(p, q)?;
            Ok(d == *decider && r == *recomputed && d != r)
        }
        Witness::TwocatViolations { .. } => {
            let report = twocat::check_two_category_laws(inputs, morphism::DEFAULT_NODE_BUDGET)?;
            Ok(!report.violations.is_empty())
        }
    }
}
