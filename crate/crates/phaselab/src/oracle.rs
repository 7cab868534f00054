//! Brute-force reference implementations.
//!
//! Everything here recomputes a result by exhaustive enumeration with its own
//! checking code, deliberately sharing no logic with the engines it is used
//! to cross-check. Only suitable for small carriers.

use crate::phase::{decode_tuple, tuple_count, Phase};
use crate::quotient::Congruence;

fn check_map(p: &Phase, q: &Phase, f: &[usize], strict: bool) -> bool {
    for x in 0..p.n() {
        let (dp, dq) = (p.defect(x), q.defect(f[x]));
        if strict && dq != dp {
            return false;
        }
        if !strict && dq < dp {
            return false;
        }
    }
    let n = p.n();
    let mut args = [0usize; 4];
    let mut mapped = [0usize; 4];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        for idx in 0..tuple_count(n, arity) as usize {
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

/// Every morphism `p -> q` by filtering all `|q|^|p|` total maps, in
/// lexicographic order.
pub fn all_maps_homs(p: &Phase, q: &Phase, mode: crate::morphism::Mode) -> Vec<Vec<usize>> {
    let strict = matches!(mode, crate::morphism::Mode::Strict);
    let n = p.n();
    let qn = q.n();
    let total = (qn as u128).pow(n as u32);
    assert!(total <= 1 << 24, "oracle is for small carriers only");
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    for raw in 0..total {
        let mut rest = raw;
        for slot in (0..n).rev() {
            f[slot] = (rest % qn as u128) as usize;
            rest /= qn as u128;
        }
        if check_map(p, q, &f, strict) {
            out.push(f.clone());
        }
    }
    out
}

fn partitions_rgs(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, max_used: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            prefix.push(label);
            rec(prefix, max_used.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    rec(&mut vec![0], 0, n, &mut out);
    out
}

fn rgs_is_congruence(p: &Phase, rgs: &[usize]) -> bool {
    let n = p.n();
    let mut a = [0usize; 4];
    let mut b = [0usize; 4];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        let count = tuple_count(n, arity) as usize;
        for i in 0..count {
            decode_tuple(n, arity, i, &mut a[..arity]);
            for j in 0..count {
                decode_tuple(n, arity, j, &mut b[..arity]);
                let related = (0..arity).all(|s| rgs[a[s]] == rgs[b[s]]);
                if related && rgs[p.table(op_idx)[i]] != rgs[p.table(op_idx)[j]] {
                    return false;
                }
            }
        }
    }
    true
}

/// Smallest congruence containing the seeds, computed as the intersection of
/// every congruence that contains them.
pub fn smallest_congruence(p: &Phase, seeds: &[(usize, usize)]) -> Congruence {
    let n = p.n();
    let qualifying: Vec<Vec<usize>> = partitions_rgs(n)
        .into_iter()
        .filter(|rgs| seeds.iter().all(|&(a, b)| rgs[a] == rgs[b]))
        .filter(|rgs| rgs_is_congruence(p, rgs))
        .collect();
    assert!(!qualifying.is_empty(), "the all-in-one-class partition always qualifies");
    // intersect: x ~ y iff related in every qualifying congruence
    let mut class_of = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        class_of[x] = next;
        for y in x + 1..n {
            if class_of[y] == usize::MAX && qualifying.iter().all(|rgs| rgs[x] == rgs[y]) {
                class_of[y] = next;
            }
        }
        next += 1;
    }
    Congruence::from_rgs(&class_of)
}

/// All defect-preserving bijections `p -> q`, in lexicographic order. Empty
/// unless the defect histograms match.
pub fn delta_preserving_bijections(p: &Phase, q: &Phase) -> Vec<Vec<usize>> {
    let n = p.n();
    if q.n() != n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        p: &Phase,
        q: &Phase,
        slot: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = p.n();
        if slot == n {
            out.push(map.clone());
            return;
        }
        for v in 0..n {
            if !used[v] && q.defect(v) == p.defect(slot) {
                map[slot] = v;
                used[v] = true;
                rec(p, q, slot + 1, map, used, out);
                used[v] = false;
            }
        }
    }
    rec(p, q, 0, &mut map, &mut used, &mut out);
    out
}

/// Direct check that `f` is a strict isomorphism (bijective, equivariant,
/// defect-preserving; the inverse then has the same properties).
pub fn is_strict_iso(p: &Phase, q: &Phase, f: &[usize]) -> bool {
    if p.n() != q.n() || f.len() != p.n() {
        return false;
    }
    let mut seen = vec![false; q.n()];
    for &v in f {
        if v >= q.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    check_map(p, q, f, true)
}

/// First strict isomorphism in lexicographic order, if any.
pub fn find_iso(p: &Phase, q: &Phase) -> Option<Vec<usize>> {
    if p.signature() != q.signature() {
        return None;
    }
    delta_preserving_bijections(p, q)
        .into_iter()
        .find(|f| check_map(p, q, f, true))
}
