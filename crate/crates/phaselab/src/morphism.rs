//! Phase morphisms: validity checking, hom-set enumeration, rigidity and
//! factorization checks.
//!
//! A map `f` between phases with the same signature is a morphism when it is
//! equivariant for every operation and respects the grading: lax mode needs
//! `defect(f x) >= defect(x)`, strict mode needs equality. Length and depth
//! preservation are reported as flags on each morphism, not enforced.
//!
//! Two enumelation routes with identical result sets:
//! * [`enumerate_homs`] inspects every total map (the reference route; its
//!   node count is fixed at `|p| * |q|^|p|` inspected slots), and
//! * [`core_seeded_homs`] backtracks over elements ordered deepest stratum
//!   first, with defect pruning and forward propagation of forced values; its
//!   node count is the number of candidate assignments attempted, which never
//!   exceeds the reference count.

use crate::canon;
use crate::error::PhaselabError;
use crate::filtration::{rigid_core_members, stratify};
use crate::phase::{decode_tuple, tuple_count, Phase};
use crate::quotient::{self, Congruence};
use serde::Serialize;
use std::collections::BTreeMap;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lax,
    Strict,
}

impl std::str::FromStr for Mode {
    type Err = PhaselabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lax" => Ok(Mode::Lax),
            "strict" => Ok(Mode::Strict),
            other => Err(PhaselabError::InvalidInput(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum MorphismViolation {
    Equivariance { op: String, tuple: Vec<String>, expected: String, found: String },
    Filtration { element: String, source_defect: u32, target_defect: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphismCheck {
    pub valid: bool,
    pub violations: Vec<MorphismViolation>,
}

fn check_signature(p: &Phase, q: &Phase) -> Result<(), PhaselabError> {
    if p.signature() != q.signature() {
        return Err(PhaselabError::SignatureMismatch);
    }
    Ok(())
}

/// Check whether `f` (indexed over `p`'s carrier) is a morphism `p -> q` in
/// the given mode, reporting every failing tuple.
pub fn is_morphism(p: &Phase, q: &Phase, f: &[usize], mode: Mode) -> Result<MorphismCheck, PhaselabError> {
    check_signature(p, q)?;
    if f.len() != p.n() {
        return Err(PhaselabError::InvalidInput(format!(
            "map has {} entries for a carrier of {}",
            f.len(),
            p.n()
        )));
    }
    for &v in f {
        if v >= q.n() {
            return Err(PhaselabError::UnknownIdentifier(format!("#{v}")));
        }
    }
    let mut violations = Vec::new();
    for x in 0..p.n() {
        let ok = match mode {
            Mode::Lax => q.defect(f[x]) >= p.defect(x),
            Mode::Strict => q.defect(f[x]) == p.defect(x),
        };
        if !ok {
            violations.push(MorphismViolation::Filtration {
                element: p.element_name(x).to_string(),
                source_defect: p.defect(x),
                target_defect: q.defect(f[x]),
            });
        }
    }
    let n = p.n();
    let mut args = [0usize; 16];
    let mut mapped = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = tuple_count(n, arity) as usize;
        for idx in 0..count {
            decode_tuple(n, arity, idx, &mut args[..arity]);
            for s in 0..arity {
                mapped[s] = f[args[s]];
            }
            let expected = q.apply(op_idx, &mapped[..arity]);
            let found = f[p.table(op_idx)[idx]];
            if expected != found {
                violations.push(MorphismViolation::Equivariance {
                    op: p.op(op_idx).name.clone(),
                    tuple: args[..arity].iter().map(|&a| p.element_name(a).to_string()).collect(),
                    expected: q.element_name(expected).to_string(),
                    found: q.element_name(found).to_string(),
                });
            }
        }
    }
    Ok(MorphismCheck { valid: violations.is_empty(), violations })
}

/// Report-level view of a morphism: digests, a name-keyed map, and the
/// length/depth preservation flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMorphism {
    pub source: String,
    pub target: String,
    pub map: BTreeMap<String, String>,
    pub mode: Mode,
    pub preserves_k: bool,
    pub preserves_d_gen: bool,
    pub preserves_d_sep: bool,
}

pub fn describe_morphism(
    p: &Phase,
    q: &Phase,
    f: &[usize],
    mode: Mode,
) -> Result<PhaseMorphism, PhaselabError> {
    let sp = stratify(p);
    let sq = stratify(q);
    Ok(PhaseMorphism {
        source: canon::digest(p)?,
        target: canon::digest(q)?,
        map: f
            .iter()
            .enumerate()
            .map(|(x, &v)| (p.element_name(x).to_string(), q.element_name(v).to_string()))
            .collect(),
        mode,
        preserves_k: sp.k == sq.k,
        preserves_d_gen: sp.d_gen == sq.d_gen,
        preserves_d_sep: sp.d_sep == sq.d_sep,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSet {
    /// Valid maps in lexicographic order of their index vectors.
    pub maps: Vec<Vec<usize>>,
    /// Search effort in nodes; see the module docs for the two definitions.
    pub nodes: u64,
}

fn budget_precheck(p: &Phase, q: &Phase, budget: u64) -> Result<u128, PhaselabError> {
    let total = (q.n() as u128).pow(p.n() as u32);
    if total > budget as u128 {
        return Err(PhaselabError::BudgetExceeded { required: total, budget });
    }
    Ok(total)
}

/// Enumerate the full hom set by inspecting every total map in lexicographic
/// order. Node count is fixed at `|p| * |q|^|p|`.
pub fn enumerate_homs(p: &Phase, q: &Phase, mode: Mode, budget: u64) -> Result<HomSet, PhaselabError> {
    check_signature(p, q)?;
    let total = budget_precheck(p, q, budget)?;
    let n = p.n();
    let qn = q.n();
    let mut maps = Vec::new();
    let mut f = vec![0usize; n];
    for raw in 0..total {
        let mut rest = raw;
        for slot in (0..n).rev() {
            f[slot] = (rest % qn as u128) as usize;
            rest /= qn as u128;
        }
        if map_is_valid(p, q, &f, mode) {
            maps.push(f.clone());
        }
    }
    Ok(HomSet { maps, nodes: (n as u64) * (total as u64) })
}

fn map_is_valid(p: &Phase, q: &Phase, f: &[usize], mode: Mode) -> bool {
    for x in 0..p.n() {
        let ok = match mode {
            Mode::Lax => q.defect(f[x]) >= p.defect(x),
            Mode::Strict => q.defect(f[x]) == p.defect(x),
        };
        if !ok {
            return false;
        }
    }
    let n = p.n();
    let mut args = [0usize; 16];
    let mut mapped = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = tuple_count(n, arity) as usize;
        for idx in 0..count {
            decode_tuple(n, arity, idx, &mut args[..arity]);
            for s in 0..arity {
                mapped[s] = f[args[s]];
            }
            if q.apply(op_idx, &mapped[..arity]) != f[p.table(op_idx)[idx]] {
                return false;
            }
        }
    }
    true
}

struct SeededSearch<'a> {
    p: &'a Phase,
    q: &'a Phase,
    mode: Mode,
    order: Vec<usize>,
    assign: Vec<Option<usize>>,
    nodes: u64,
    budget: u64,
    out: Vec<Vec<usize>>,
    count: u64,
    collect: bool,
}

impl<'a> SeededSearch<'a> {
    fn delta_ok(&self, x: usize, v: usize) -> bool {
        match self.mode {
            Mode::Lax => self.q.defect(v) >= self.p.defect(x),
            Mode::Strict => self.q.defect(v) == self.p.defect(x),
        }
    }

    /// Fixpoint pass: for every tuple with all arguments assigned, the image
    /// of the output is forced; bind or detect a conflict. Newly bound
    /// elements go on the trail for backtracking.
    fn propagate(&mut self, trail: &mut Vec<usize>) -> bool {
        let n = self.p.n();
        let mut args = [0usize; 16];
        let mut mapped = [0usize; 16];
        loop {
            let mut changed = false;
            for op_idx in 0..self.p.op_count() {
                let arity = self.p.op(op_idx).arity;
                let count = tuple_count(n, arity) as usize;
                'tuples: for idx in 0..count {
                    decode_tuple(n, arity, idx, &mut args[..arity]);
                    for s in 0..arity {
                        match self.assign[args[s]] {
                            Some(v) => mapped[s] = v,
                            None => continue 'tuples,
                        }
                    }
                    let required = self.q.apply(op_idx, &mapped[..arity]);
                    let out = self.p.table(op_idx)[idx];
                    match self.assign[out] {
                        Some(v) => {
                            if v != required {
                                return false;
                            }
                        }
                        None => {
                            if !self.delta_ok(out, required) {
                                return false;
                            }
                            self.assign[out] = Some(required);
                            trail.push(out);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, depth: usize) -> Result<(), PhaselabError> {
        if depth == self.order.len() {
            self.count += 1;
            if self.collect {
                let map: Vec<usize> = self.assign.iter().map(|a| a.unwrap()).collect();
                debug_assert!(map_is_valid(self.p, self.q, &map, self.mode));
                self.out.push(map);
            }
            return Ok(());
        }
        let x = self.order[depth];
        if self.assign[x].is_some() {
            return self.run(depth + 1);
        }
        for v in 0..self.q.n() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(PhaselabError::BudgetExceeded {
                    required: self.nodes as u128,
                    budget: self.budget,
                });
            }
            if !self.delta_ok(x, v) {
                continue;
            }
            self.assign[x] = Some(v);
            let mut trail = vec![x];
            if self.propagate(&mut trail) {
                self.run(depth + 1)?;
            }
            for t in trail {
                self.assign[t] = None;
            }
        }
        Ok(())
    }
}

fn seeded_search<'a>(
    p: &'a Phase,
    q: &'a Phase,
    mode: Mode,
    budget: u64,
    collect: bool,
) -> Result<SeededSearch<'a>, PhaselabError> {
    check_signature(p, q)?;
    budget_precheck(p, q, budget)?;
    let mut order: Vec<usize> = (0..p.n()).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(p.defect(x)), x));
    let mut search = SeededSearch {
        p,
        q,
        mode,
        order,
        assign: vec![None; p.n()],
        nodes: 0,
        budget,
        out: Vec::new(),
        count: 0,
        collect,
    };
    // nullary constants force assignments before any choice is made
    let mut trail = Vec::new();
    if search.propagate(&mut trail) {
        search.run(0)?;
    }
    Ok(search)
}

/// Enumerate the hom set by backtracking, assigning rigid-core elements
/// first (deepest stratum outward) with defect pruning and propagation of
/// forced images. Returns the same set as [`enumerate_homs`].
pub fn core_seeded_homs(p: &Phase, q: &Phase, mode: Mode, budget: u64) -> Result<HomSet, PhaselabError> {
    let search = seeded_search(p, q, mode, budget, true)?;
    let nodes = search.nodes;
    let mut maps = search.out;
    maps.sort();
    Ok(HomSet { maps, nodes })
}

/// Count the hom set with the seeded search without materializing the maps.
pub fn hom_count(p: &Phase, q: &Phase, mode: Mode, budget: u64) -> Result<u64, PhaselabError> {
    Ok(seeded_search(p, q, mode, budget, false)?.count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityCheck {
    /// Whether restriction to the rigid core is injective on the hom set.
    pub injective: bool,
    /// Two distinct morphisms with equal core restriction, in canonical
    /// order, when injectivity fails.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub hom_count: usize,
}

/// Is a morphism `p -> q` determined by its restriction to the rigid core of
/// `p`?
pub fn rigidity_check(p: &Phase, q: &Phase, mode: Mode, budget: u64) -> Result<RigidityCheck, PhaselabError> {
    let homs = core_seeded_homs(p, q, mode, budget)?;
    let core = rigid_core_members(p);
    let mut seen: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    for (i, map) in homs.maps.iter().enumerate() {
        let restriction: Vec<usize> = core.iter().map(|&x| map[x]).collect();
        match seen.get(&restriction) {
            None => {
                seen.insert(restriction, i);
            }
            Some(&first) => {
                return Ok(RigidityCheck {
                    injective: false,
                    witness: Some((homs.maps[first].clone(), map.clone())),
                    hom_count: homs.maps.len(),
                });
            }
        }
    }
    Ok(RigidityCheck { injective: true, witness: None, hom_count: homs.maps.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub constant_on_stratum: bool,
    pub respects_congruence: bool,
    /// Map from the classes of `collapse_stratum(p, depth)` to `r`, when it
    /// exists; composing with the projection recovers `f`.
    pub factored: Option<Vec<usize>>,
    pub congruence: Congruence,
}

/// Factor `f : p -> r` through the collapse of the stratum `P^(depth)`.
/// Only equivariance of `f` is assumed; the grading behavior of the
/// projection is not part of this check.
pub fn factorization_check(
    p: &Phase,
    depth: u32,
    f: &[usize],
    _r: &Phase,
) -> Result<Factorization, PhaselabError> {
    if f.len() != p.n() {
        return Err(PhaselabError::InvalidInput(format!(
            "map has {} entries for a carrier of {}",
            f.len(),
            p.n()
        )));
    }
    let congruence = quotient::stratum_congruence(p, depth)?;
    let members = p.stratum_members(depth);
    let constant_on_stratum =
        members.windows(2).all(|w| f[w[0]] == f[w[1]]);
    let respects_congruence = congruence
        .classes()
        .iter()
        .all(|class| class.windows(2).all(|w| f[w[0]] == f[w[1]]));
    let factored = if constant_on_stratum && respects_congruence {
        Some(congruence.classes().iter().map(|class| f[class[0]]).collect())
    } else {
        None
    };
    Ok(Factorization { constant_on_stratum, respects_congruence, factored, congruence })
}
