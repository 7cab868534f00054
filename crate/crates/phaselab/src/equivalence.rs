//! Equivalence deciders: strong (strict isomorphism), weak (grading and core
//! agreement), and hom-count profiles as the finite stand-in for equivalence
//! of filtered representation categories.

use crate::canon;
use crate::catalogue::{self, CatalogueSpec};
use crate::error::PhaselabError;
use crate::filtration::stratify;
use crate::morphism::{self, Mode};
use crate::phase::{Phase, MAX_EXACT_SIZE};
use serde::Serialize;

/// Search for a strict isomorphism: a defect-preserving bijection that is
/// equivariant for every operation (its inverse then is too). Exhaustive
/// over defect-compatible bijections; exact for carriers up to 8.
pub fn strong_equivalent(p: &Phase, q: &Phase) -> Result<Option<Vec<usize>>, PhaselabError> {
    if p.signature() != q.signature() {
        return Err(PhaselabError::SignatureMismatch);
    }
    if p.n() != q.n() {
        return Ok(None);
    }
    if p.n() > MAX_EXACT_SIZE {
        return Err(PhaselabError::SizeLimitExceeded { n: p.n(), max: MAX_EXACT_SIZE });
    }
    let n = p.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(p: &Phase, q: &Phase, slot: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        let n = p.n();
        if slot == n {
            return equivariant(p, q, map);
        }
        for v in 0..n {
            if !used[v] && q.defect(v) == p.defect(slot) {
                map[slot] = v;
                used[v] = true;
                if rec(p, q, slot + 1, map, used) {
                    return true;
                }
                used[v] = false;
            }
        }
        false
    }
    if rec(p, q, 0, &mut map, &mut used) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn equivariant(p: &Phase, q: &Phase, f: &[usize]) -> bool {
    let n = p.n();
    let mut args = [0usize; 16];
    let mut mapped = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = crate::phase::tuple_count(n, arity) as usize;
        for idx in 0..count {
            crate::phase::decode_tuple(n, arity, idx, &mut args[..arity]);
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

#[derive(Debug, Clone, PartialEq)]
pub struct WeakEquivalence {
    pub equivalent: bool,
    /// A defect-preserving bijection whose restriction to the stratum at the
    /// shared separation depth is a strict isomorphism of induced phases.
    pub witness: Option<Vec<usize>>,
    pub k_matches: bool,
    pub d_sep_matches: bool,
}

/// Weak equivalence: equal filtration length and separation depth, plus a
/// defect-preserving bijection restricting to a strict isomorphism between
/// the strata at that depth. No operation constraint outside the stratum.
pub fn weak_equivalent(p: &Phase, q: &Phase) -> Result<WeakEquivalence, PhaselabError> {
    if p.signature() != q.signature() {
        return Err(PhaselabError::SignatureMismatch);
    }
    let sp = stratify(p);
    let sq = stratify(q);
    let k_matches = sp.k == sq.k;
    let d_sep_matches = sp.d_sep == sq.d_sep;
    let no = |k_matches, d_sep_matches| WeakEquivalence {
        equivalent: false,
        witness: None,
        k_matches,
        d_sep_matches,
    };
    if !k_matches || !d_sep_matches {
        return Ok(no(k_matches, d_sep_matches));
    }
    if p.n() != q.n() {
        return Ok(no(true, true));
    }
    // a defect-preserving bijection needs matching layer cardinalities
    for i in 0..=sp.k {
        if sp.layers[i as usize].len() != sq.layers[i as usize].len() {
            return Ok(no(true, true));
        }
    }
    let depth = sp.d_sep;
    let members_p = p.stratum_members(depth);
    let members_q = q.stratum_members(depth);
    let core_p = p.induced(&members_p, "stratum_p")?;
    let core_q = q.induced(&members_q, "stratum_q")?;
    let Some(core_iso) = strong_equivalent(&core_p, &core_q)? else {
        return Ok(no(true, true));
    };
    // extend: the stratum maps through the core isomorphism, the remaining
    // defect fibers in index order
    let n = p.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (ci, &x) in members_p.iter().enumerate() {
        let v = members_q[core_iso[ci]];
        map[x] = v;
        used[v] = true;
    }
    for x in 0..n {
        if map[x] != usize::MAX {
            continue;
        }
        let v = (0..n)
            .find(|&v| !used[v] && q.defect(v) == p.defect(x))
            .expect("layer cardinalities match");
        map[x] = v;
        used[v] = true;
    }
    Ok(WeakEquivalence { equivalent: true, witness: Some(map), k_matches: true, d_sep_matches: true })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileEntry {
    pub digest: String,
    pub strict: u64,
    pub lax: u64,
}

/// Hom-count profile over a battery of small probe phases: for each probe
/// `b`, the number of strict and lax morphisms `b -> p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoritaProfile {
    pub battery_max_size: usize,
    pub entries: Vec<ProfileEntry>,
}

pub const MAX_BATTERY_SIZE: usize = 3;

/// The probe battery: every catalogue phase with the same signature, carrier
/// at most `max_size`, and attained defect at most `max_delta`, deduplicated
/// up to isomorphism, sorted by (carrier size, digest).
pub fn profile_battery(
    template: &Phase,
    max_size: usize,
    max_delta: u32,
    budget: u64,
) -> Result<Vec<(String, Phase)>, PhaselabError> {
    let mut battery = Vec::new();
    for size in 1..=max_size {
        let spec = CatalogueSpec {
            size,
            signature: template.signature().clone(),
            max_delta,
            dedupe: true,
        };
        for phase in catalogue::enumerate_phases(&spec, budget)? {
            let digest = canon::digest(&phase)?;
            battery.push((size, digest, phase));
        }
    }
    battery.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(battery.into_iter().map(|(_, d, p)| (d, p)).collect())
}

/// Profile of `p` against a precomputed battery.
pub fn profile_with_battery(
    p: &Phase,
    battery: &[(String, Phase)],
    battery_max_size: usize,
    budget: u64,
) -> Result<MoritaProfile, PhaselabError> {
    let mut entries = Vec::with_capacity(battery.len());
    for (digest, probe) in battery {
        let strict = morphism::hom_count(probe, p, Mode::Strict, budget)?;
        let lax = morphism::hom_count(probe, p, Mode::Lax, budget)?;
        entries.push(ProfileEntry { digest: digest.clone(), strict, lax });
    }
    entries.sort_by(|a, b| a.digest.cmp(&b.digest));
    Ok(MoritaProfile { battery_max_size, entries })
}

/// Hom-count profile of `p` with probes capped at `battery_max_size`
/// elements and defect capped at the filtration length of `p`.
pub fn morita_profile(
    p: &Phase,
    battery_max_size: usize,
    budget: u64,
) -> Result<MoritaProfile, PhaselabError> {
    if battery_max_size > MAX_BATTERY_SIZE {
        return Err(PhaselabError::BudgetExceeded {
            required: battery_max_size as u128,
            budget: MAX_BATTERY_SIZE as u64,
        });
    }
    let battery = profile_battery(p, battery_max_size, p.max_defect(), budget)?;
    profile_with_battery(p, &battery, battery_max_size, budget)
}
