//! Phase generation: exhaustive enumeration (monotone tables are generated
//! directly, entry by entry, so no rejection is needed), seeded random
//! sampling, isomorphic scrambles, and the standard verification battery.

use crate::canon::{self, permute_phase};
use crate::error::PhaselabError;
use crate::fixtures;
use crate::phase::{decode_tuple, tuple_count, Phase, Signature};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashSet;

/// Hard cap for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_SIZE: usize = 4;

/// Rejection budget for random sampling.
pub const REJECTION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogueSpec {
    /// Exact carrier size.
    pub size: usize,
    pub signature: Signature,
    /// Upper bound for defect values (attained or not).
    pub max_delta: u32,
    /// Emit one representative per isomorphism class.
    pub dedupe: bool,
}

impl CatalogueSpec {
    pub fn binary(size: usize, max_delta: u32, dedupe: bool) -> Self {
        CatalogueSpec { size, signature: Signature::binary(), max_delta, dedupe }
    }
}

/// Number of valid tables for a fixed defect vector: monotonicity constrains
/// each entry independently, so the count is a product over entries.
pub fn valid_table_count(signature: &Signature, defect: &[u32]) -> u128 {
    let n = defect.len();
    let mut args = [0usize; 16];
    let mut count: u128 = 1;
    for op in &signature.operations {
        let tuples = tuple_count(n, op.arity) as usize;
        for idx in 0..tuples {
            decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
            let allowed = if op.arity == 0 {
                n as u128
            } else {
                let min = args[..op.arity].iter().map(|&a| defect[a]).min().unwrap();
                defect.iter().filter(|&&d| d >= min).count() as u128
            };
            count = count.saturating_mul(allowed);
        }
    }
    count
}

/// Total number of (defect vector, table) configurations the enumeration
/// would emit before deduplication.
pub fn raw_phase_count(spec: &CatalogueSpec) -> u128 {
    let n = spec.size;
    let mut total: u128 = 0;
    let delta_vectors = ((spec.max_delta as u128) + 1).pow(n as u32);
    let mut defect = vec![0u32; n];
    for raw in 0..delta_vectors {
        let mut rest = raw;
        for slot in (0..n).rev() {
            defect[slot] = (rest % (spec.max_delta as u128 + 1)) as u32;
            rest /= spec.max_delta as u128 + 1;
        }
        total = total.saturating_add(valid_table_count(&spec.signature, &defect));
    }
    total
}

/// Visit every valid phase matching the given catalogue spec (before
/// deduplication) in canonical order: defect vectors ascending, then table
/// entries ascending. The visitor returns `false` to stop early.
pub fn visit_phases(
    spec: &CatalogueSpec,
    budget: u64,
    visit: &mut dyn FnMut(&Phase) -> bool,
) -> Result<(), PhaselabError> {
    if spec.size > MAX_EXHAUSTIVE_SIZE {
        return Err(PhaselabError::BudgetExceeded {
            required: spec.size as u128,
            budget: MAX_EXHAUSTIVE_SIZE as u64,
        });
    }
    let raw = raw_phase_count(spec);
    if raw > budget as u128 {
        return Err(PhaselabError::BudgetExceeded { required: raw, budget });
    }
    let n = spec.size;
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let delta_vectors = ((spec.max_delta as u128) + 1).pow(n as u32);
    let mut defect = vec![0u32; n];
    let mut args = [0usize; 16];
    let mut counter: u64 = 0;
    for raw_delta in 0..delta_vectors {
        let mut rest = raw_delta;
        for slot in (0..n).rev() {
            defect[slot] = (rest % (spec.max_delta as u128 + 1)) as u32;
            rest /= spec.max_delta as u128 + 1;
        }
        // allowed outputs per (op, tuple), ascending by element index
        let mut slots: Vec<Vec<usize>> = Vec::new();
        let mut layout: Vec<(usize, usize)> = Vec::new(); // (op, tuples)
        for (op_idx, op) in spec.signature.operations.iter().enumerate() {
            let tuples = tuple_count(n, op.arity) as usize;
            layout.push((op_idx, tuples));
            for idx in 0..tuples {
                decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                let allowed: Vec<usize> = if op.arity == 0 {
                    (0..n).collect()
                } else {
                    let min = args[..op.arity].iter().map(|&a| defect[a]).min().unwrap();
                    (0..n).filter(|&x| defect[x] >= min).collect()
                };
                slots.push(allowed);
            }
        }
        let mut choice = vec![0usize; slots.len()];
        'tables: loop {
            let mut tables: Vec<Vec<usize>> = Vec::with_capacity(layout.len());
            let mut cursor = 0;
            for &(_, tuples) in &layout {
                let table: Vec<usize> =
                    (0..tuples).map(|i| slots[cursor + i][choice[cursor + i]]).collect();
                tables.push(table);
                cursor += tuples;
            }
            let phase = Phase::assemble(
                format!("c{}_{}", n, counter),
                elements.clone(),
                spec.signature.clone(),
                tables,
                defect.clone(),
            )
            .expect("entrywise-allowed tables are valid");
            counter += 1;
            if !visit(&phase) {
                return Ok(());
            }
            // odometer over the allowed-output choices
            let mut s = 0;
            loop {
                if s == slots.len() {
                    break 'tables;
                }
                choice[s] += 1;
                if choice[s] < slots[s].len() {
                    break;
                }
                choice[s] = 0;
                s += 1;
            }
        }
    }
    Ok(())
}

/// All valid phases matching the given catalogue spec, deduplicated up to
/// isomorphism when requested, in deterministic enumeration order.
pub fn enumerate_phases(spec: &CatalogueSpec, budget: u64) -> Result<Vec<Phase>, PhaselabError> {
    let mut out = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut failure: Option<PhaselabError> = None;
    visit_phases(spec, budget, &mut |phase| {
        if spec.dedupe {
            match canon::digest(phase) {
                Ok(digest) => {
                    if seen.insert(digest) {
                        out.push(phase.clone());
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    return false;
                }
            }
        } else {
            out.push(phase.clone());
        }
        true
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Deterministic random phase: defects uniform in `0..=max_delta`, table
/// entries uniform over the carrier, rejection-sampled until the
/// monotonicity law holds.
pub fn random_phase(seed: u64, spec: &CatalogueSpec) -> Result<Phase, PhaselabError> {
    let n = spec.size;
    if n == 0 {
        return Err(PhaselabError::InvalidInput("carrier size must be positive".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    for _attempt in 0..REJECTION_BUDGET {
        let defect: Vec<u32> = (0..n).map(|_| rng.random_range(0..=spec.max_delta)).collect();
        let tables: Vec<Vec<usize>> = spec
            .signature
            .operations
            .iter()
            .map(|op| {
                let tuples = tuple_count(n, op.arity) as usize;
                (0..tuples).map(|_| rng.random_range(0..n)).collect()
            })
            .collect();
        if let Ok(phase) = Phase::assemble(
            format!("rnd_{seed}"),
            elements.clone(),
            spec.signature.clone(),
            tables,
            defect,
        ) {
            return Ok(phase);
        }
    }
    Err(PhaselabError::RejectionBudgetExceeded(REJECTION_BUDGET))
}

/// Deterministic random permutation of `0..n`.
pub fn random_permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Isomorphic copy of a phase along a carrier permutation (`perm[old] = new`):
/// defect and tables are transported, element names stay positional.
pub fn scramble(p: &Phase, perm: &[usize]) -> Result<Phase, PhaselabError> {
    let n = p.n();
    if perm.len() != n {
        return Err(PhaselabError::InvalidPermutation);
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return Err(PhaselabError::InvalidPermutation);
        }
        seen[v] = true;
    }
    Ok(permute_phase(p, perm))
}

/// The standard verification battery used by sweeps when no explicit
/// catalogue is given: the four fixtures, the exhaustive deduplicated
/// universes at one and two elements (defect up to 2), an evenly spaced
/// sample of the three-element universe plus the first incomplete
/// three-element phases (whose completion unit is a proper quotient), and a
/// handful of seeded random four-element phases.
pub fn standard_catalogue() -> Result<Vec<Phase>, PhaselabError> {
    let budget = crate::morphism::DEFAULT_NODE_BUDGET;
    let mut out = fixtures::all();
    for size in 1..=2 {
        out.extend(enumerate_phases(&CatalogueSpec::binary(size, 2, true), budget)?);
    }
    let n3 = enumerate_phases(&CatalogueSpec::binary(3, 2, true), budget)?;
    let step = (n3.len() / 40).max(1);
    out.extend(n3.iter().step_by(step).take(40).cloned());
    let mut incomplete = 0;
    for phase in &n3 {
        if !crate::quotient::completion(phase)?.complete {
            out.push(phase.clone());
            incomplete += 1;
            if incomplete == 10 {
                break;
            }
        }
    }
    for seed in 0..6u64 {
        out.push(random_phase(9_000 + seed, &CatalogueSpec::binary(4, 2, false))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::validate;

    #[test]
    fn single_element_universe_is_t1() {
        let spec = CatalogueSpec::binary(1, 0, true);
        let phases = enumerate_phases(&spec, 1000).unwrap();
        assert_eq!(phases.len(), 1);
        assert_eq!(
            canon::digest(&phases[0]).unwrap(),
            canon::digest(&fixtures::t1()).unwrap()
        );
    }

    #[test]
    fn two_element_flat_universe_has_sixteen_raw_ten_classes() {
        let spec = CatalogueSpec::binary(2, 0, false);
        assert_eq!(raw_phase_count(&spec), 16);
        let raw = enumerate_phases(&spec, 1000).unwrap();
        assert_eq!(raw.len(), 16);
        let deduped = enumerate_phases(&CatalogueSpec::binary(2, 0, true), 1000).unwrap();
        assert_eq!(deduped.len(), 10);
    }

    #[test]
    fn graded_two_element_table_count_matches_brute_force() {
        // defect (0,1): brute-force over all 16 tables with an independent
        // validity check, then compare with the analytic count
        let sig = Signature::binary();
        let mut valid = 0;
        for raw in 0..16 {
            let table: Vec<usize> = (0..4).map(|i| (raw >> i) & 1).collect();
            let raw_phase = crate::phase::RawPhase {
                name: "X".into(),
                elements: vec![("a".into(), None), ("b".into(), None)],
                defect: vec![("a".into(), 0, None), ("b".into(), 1, None)],
                ops: vec![crate::phase::RawOp {
                    name: "m".into(),
                    arity: 2,
                    span: None,
                    rows: (0..4)
                        .map(|i| crate::phase::RawRow {
                            inputs: vec![
                                if i / 2 == 0 { "a".into() } else { "b".into() },
                                if i % 2 == 0 { "a".into() } else { "b".into() },
                            ],
                            output: if table[i] == 0 { "a".into() } else { "b".into() },
                            span: None,
                        })
                        .collect(),
                }],
            };
            if validate(&raw_phase).is_ok() {
                valid += 1;
            }
        }
        assert_eq!(valid, 8, "frozen by the brute-force validity filter");
        assert_eq!(valid_table_count(&sig, &[0, 1]), 8);
    }

    #[test]
    fn every_enumerated_phase_is_valid_and_order_is_deterministic() {
        let spec = CatalogueSpec::binary(2, 1, false);
        let a = enumerate_phases(&spec, 10_000).unwrap();
        let b = enumerate_phases(&spec, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len() as u128, raw_phase_count(&spec));
    }

    #[test]
    fn dedupe_completeness_every_raw_digest_is_emitted() {
        let spec = CatalogueSpec::binary(2, 2, true);
        let deduped = enumerate_phases(&spec, 10_000).unwrap();
        let emitted: HashSet<String> =
            deduped.iter().map(|p| canon::digest(p).unwrap()).collect();
        let raw_spec = CatalogueSpec::binary(2, 2, false);
        let mut all_covered = true;
        visit_phases(&raw_spec, 10_000, &mut |p| {
            all_covered &= emitted.contains(&canon::digest(p).unwrap());
            true
        })
        .unwrap();
        assert!(all_covered);
    }

    #[test]
    fn oversized_enumeration_is_rejected() {
        let spec = CatalogueSpec::binary(4, 0, false);
        assert!(matches!(
            enumerate_phases(&spec, crate::morphism::DEFAULT_NODE_BUDGET),
            Err(PhaselabError::BudgetExceeded { .. })
        ));
        let spec = CatalogueSpec::binary(5, 0, false);
        assert!(matches!(
            enumerate_phases(&spec, u64::MAX),
            Err(PhaselabError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn random_phase_is_deterministic_and_valid() {
        let spec = CatalogueSpec::binary(3, 2, false);
        let a = random_phase(42, &spec).unwrap();
        let b = random_phase(42, &spec).unwrap();
        assert_eq!(a, b);
        for seed in 0..50 {
            let p = random_phase(seed, &spec).unwrap();
            assert!(p.n() == 3);
        }
    }

    #[test]
    fn distinct_seeds_reach_distinct_structures() {
        let spec = CatalogueSpec::binary(3, 2, false);
        let digests: HashSet<String> = (0..100)
            .map(|seed| canon::digest(&random_phase(seed, &spec).unwrap()).unwrap())
            .collect();
        assert!(digests.len() >= 2);
    }

    #[test]
    fn scramble_identity_is_identity() {
        let p = fixtures::max3();
        assert_eq!(scramble(&p, &[0, 1, 2]).unwrap(), p);
    }

    #[test]
    fn scramble_rejects_non_permutations() {
        let p = fixtures::max3();
        assert!(matches!(scramble(&p, &[0, 0, 1]), Err(PhaselabError::InvalidPermutation)));
        assert!(matches!(scramble(&p, &[0, 1]), Err(PhaselabError::InvalidPermutation)));
    }

    #[test]
    fn scramble_preserves_invariants() {
        let p = fixtures::pair4();
        let s = scramble(&p, &random_permutation(7, 4)).unwrap();
        let a = crate::filtration::invariants(&p).unwrap();
        let b = crate::filtration::invariants(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn enumeration_handles_nullary_operations() {
        // one constant plus one binary operation over two flat elements:
        // the constant contributes a free factor of 2
        let spec = CatalogueSpec {
            size: 2,
            signature: Signature::new(&[("c", 0), ("m", 2)]),
            max_delta: 0,
            dedupe: false,
        };
        assert_eq!(raw_phase_count(&spec), 32);
        let phases = enumerate_phases(&spec, 1000).unwrap();
        assert_eq!(phases.len(), 32);
        assert!(phases.iter().all(|p| p.op(0).arity == 0));
    }

    #[test]
    fn standard_catalogue_is_deterministic() {
        let a = standard_catalogue().unwrap();
        let b = standard_catalogue().unwrap();
        assert_eq!(a.len(), b.len());
        assert!(a.len() > 50);
        let da: Vec<String> = a.iter().map(|p| canon::digest(p).unwrap()).collect();
        let db: Vec<String> = b.iter().map(|p| canon::digest(p).unwrap()).collect();
        assert_eq!(da, db);
    }
}
