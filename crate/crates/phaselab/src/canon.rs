//! Canonical labeling and digests for phases.
//!
//! Two phases related by a defect-preserving isomorphism get byte-identical
//! canonical forms. Elements are renamed `e0..e(n-1)` ordered by ascending
//! defect, with ties broken by the lexicographically minimal table encoding
//! over all defect-fiber permutations. Exact for carriers up to
//! [`MAX_EXACT_SIZE`] elements.

use crate::error::PhaselabError;
use crate::phase::{decode_tuple, tuple_count, Phase, MAX_EXACT_SIZE};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub phase: Phase,
    pub digest: String,
}

/// Transport a phase along a carrier permutation: `perm[old] = new`.
/// Element names keep their positions; structure moves.
pub(crate) fn permute_phase(p: &Phase, perm: &[usize]) -> Phase {
    let n = p.n();
    debug_assert_eq!(perm.len(), n);
    let mut defect = vec![0u32; n];
    for old in 0..n {
        defect[perm[old]] = p.defect(old);
    }
    let mut tables = Vec::with_capacity(p.op_count());
    let mut new_args = [0usize; 16];
    let mut old_args = [0usize; 16];
    let mut inv = vec![0usize; n];
    for old in 0..n {
        inv[perm[old]] = old;
    }
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = tuple_count(n, arity) as usize;
        let mut table = Vec::with_capacity(count);
        for idx in 0..count {
            decode_tuple(n, arity, idx, &mut new_args[..arity]);
            for s in 0..arity {
                old_args[s] = inv[new_args[s]];
            }
            table.push(perm[p.apply(op_idx, &old_args[..arity])]);
        }
        tables.push(table);
    }
    Phase::assemble(
        p.name().to_string(),
        p.elements().to_vec(),
        p.signature().clone(),
        tables,
        defect,
    )
    .expect("permuting a valid phase preserves validity")
}

fn fiber_permutations(size: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: &mut Vec<usize>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            current.push(v);
            rec(remaining, current, out);
            current.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..size).collect(), &mut Vec::new(), &mut out);
    out
}

/// Flattened table encoding of `p` after relabeling old index `x` to
/// `position_of[x]`; compared lexicographically to pick the canonical label.
fn encode_tables(p: &Phase, new_to_old: &[usize], old_to_new: &[usize]) -> Vec<usize> {
    let n = p.n();
    let mut encoding = Vec::new();
    let mut new_args = [0usize; 16];
    let mut old_args = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = tuple_count(n, arity) as usize;
        for idx in 0..count {
            decode_tuple(n, arity, idx, &mut new_args[..arity]);
            for s in 0..arity {
                old_args[s] = new_to_old[new_args[s]];
            }
            encoding.push(old_to_new[p.apply(op_idx, &old_args[..arity])]);
        }
    }
    encoding
}

/// Canonical form by exhaustive best-labeling over defect-compatible
/// permutations. Errors with `SizeLimitExceeded` for carriers above 8.
pub fn canonical_form(p: &Phase) -> Result<CanonicalForm, PhaselabError> {
    let n = p.n();
    if n > MAX_EXACT_SIZE {
        return Err(PhaselabError::SizeLimitExceeded { n, max: MAX_EXACT_SIZE });
    }

    // order indices by defect; fibers are contiguous runs of equal defect
    let mut base: Vec<usize> = (0..n).collect();
    base.sort_by_key(|&x| (p.defect(x), x));
    let mut fibers: Vec<(usize, usize)> = Vec::new(); // (start, len) into base
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && p.defect(base[end]) == p.defect(base[start]) {
            end += 1;
        }
        fibers.push((start, end - start));
        start = end;
    }

    let per_fiber: Vec<Vec<Vec<usize>>> =
        fibers.iter().map(|&(_, len)| fiber_permutations(len)).collect();

    let mut best_encoding: Option<Vec<usize>> = None;
    let mut best_new_to_old: Vec<usize> = base.clone();
    let mut counters = vec![0usize; fibers.len()];
    let mut new_to_old = vec![0usize; n];
    let mut old_to_new = vec![0usize; n];
    loop {
        for (f, &(fstart, flen)) in fibers.iter().enumerate() {
            let perm = &per_fiber[f][counters[f]];
            for j in 0..flen {
                new_to_old[fstart + j] = base[fstart + perm[j]];
            }
        }
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = new;
        }
        let encoding = encode_tables(p, &new_to_old, &old_to_new);
        if best_encoding.as_ref().is_none_or(|b| encoding < *b) {
            best_encoding = Some(encoding);
            best_new_to_old.copy_from_slice(&new_to_old);
        }
        // odometer over fiber permutation choices
        let mut f = 0;
        loop {
            if f == fibers.len() {
                let encoding = best_encoding.unwrap();
                return Ok(build_canonical(p, &best_new_to_old, encoding));
            }
            counters[f] += 1;
            if counters[f] < per_fiber[f].len() {
                break;
            }
            counters[f] = 0;
            f += 1;
        }
    }
}

fn build_canonical(p: &Phase, new_to_old: &[usize], encoding: Vec<usize>) -> CanonicalForm {
    let n = p.n();
    let defect: Vec<u32> = new_to_old.iter().map(|&old| p.defect(old)).collect();
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut tables = Vec::with_capacity(p.op_count());
    let mut cursor = 0;
    for op_idx in 0..p.op_count() {
        let count = tuple_count(n, p.op(op_idx).arity) as usize;
        tables.push(encoding[cursor..cursor + count].to_vec());
        cursor += count;
    }
    let digest = digest_parts(p, &defect, &encoding);
    let phase = Phase::assemble(p.name().to_string(), elements, p.signature().clone(), tables, defect)
        .expect("canonical relabeling preserves validity");
    CanonicalForm { phase, digest }
}

fn digest_parts(p: &Phase, defect: &[u32], encoding: &[usize]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"phaselab-canon-v1|");
    hasher.update(p.n().to_string().as_bytes());
    hasher.update(b"|sig=");
    for op in &p.signature().operations {
        hasher.update(op.name.as_bytes());
        hasher.update(b"/");
        hasher.update(op.arity.to_string().as_bytes());
        hasher.update(b",");
    }
    hasher.update(b"|delta=");
    for d in defect {
        hasher.update(d.to_string().as_bytes());
        hasher.update(b",");
    }
    hasher.update(b"|tab=");
    for e in encoding {
        hasher.update(e.to_string().as_bytes());
        hasher.update(b",");
    }
    let bytes = hasher.finalize();
    bytes[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Structural digest of a phase: the digest of its canonical form. Invariant
/// under defect-preserving isomorphism and independent of element names.
pub fn digest(p: &Phase) -> Result<String, PhaselabError> {
    Ok(canonical_form(p)?.digest)
}

/// Digest of a carrier partition, used to identify congruences in reports.
pub fn partition_digest(classes: &[Vec<usize>]) -> String {
    let mut canonical: Vec<Vec<usize>> = classes.to_vec();
    for class in &mut canonical {
        class.sort_unstable();
    }
    canonical.sort();
    let mut hasher = Sha256::new();
    hasher.update(b"phaselab-partition-v1|");
    for class in &canonical {
        for x in class {
            hasher.update(x.to_string().as_bytes());
            hasher.update(b",");
        }
        hasher.update(b";");
    }
    let bytes = hasher.finalize();
    bytes[..16].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::testutil::{max3, phase_from, t1};

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        fiber_permutations(n)
    }

    #[test]
    fn canonical_form_invariant_under_all_relabelings_of_max3() {
        let p = max3();
        let reference = canonical_form(&p).unwrap();
        for perm in all_permutations(3) {
            let scrambled = permute_phase(&p, &perm);
            let cf = canonical_form(&scrambled).unwrap();
            assert_eq!(cf, reference, "permutation {perm:?} changed the canonical form");
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let p = t1();
        let once = canonical_form(&p).unwrap();
        let twice = canonical_form(&once.phase).unwrap();
        assert_eq!(once.phase, twice.phase);
        assert_eq!(once.digest, twice.digest);
    }

    #[test]
    fn distinct_structures_get_distinct_digests() {
        // MAX3 vs the 4-element PAIR4-style phase: carrier sizes differ
        let p = max3();
        let q = phase_from("Q", &[0, 0, 1, 2], &[2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3]);
        assert_ne!(digest(&p).unwrap(), digest(&q).unwrap());
    }

    #[test]
    fn digest_ignores_element_and_phase_independent_presentation() {
        let p = phase_from("A", &[0, 1], &[0, 1, 1, 1]);
        let q = Phase::assemble(
            "A",
            vec!["left".into(), "right".into()],
            crate::phase::Signature::binary(),
            vec![vec![0, 1, 1, 1]],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(digest(&p).unwrap(), digest(&q).unwrap());
    }

    #[test]
    fn size_limit_is_enforced() {
        let defect = vec![0u32; 9];
        let table = vec![0usize; 81];
        let p = phase_from_sized("BIG", &defect, &table);
        assert!(matches!(
            canonical_form(&p),
            Err(PhaselabError::SizeLimitExceeded { n: 9, max: 8 })
        ));
    }

    fn phase_from_sized(name: &str, defect: &[u32], table: &[usize]) -> Phase {
        let n = defect.len();
        let elements = (0..n).map(|i| format!("e{i}")).collect();
        Phase::assemble(
            name,
            elements,
            crate::phase::Signature::binary(),
            vec![table.to_vec()],
            defect.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn partition_digest_is_order_insensitive() {
        let a = partition_digest(&[vec![2, 0], vec![1]]);
        let b = partition_digest(&[vec![1], vec![0, 2]]);
        assert_eq!(a, b);
    }
}
