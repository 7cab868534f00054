//! Canonical filtration, layer flags, rigid core, and intrinsic invariants.
//!
//! The filtration of a phase is the descending chain of strata
//! `P^(i) = {x : defect(x) >= i}` for `0 <= i <= k`, where `k` is the largest
//! attained defect. Each stratum is closed under every operation of positive
//! arity, as a consequence of monotonicity.
//!
//! Two operational depth predicates are computed per level `i`:
//!
//! * `Gen(i)`: every element of defect exactly `i` lies in the operation
//!   closure of the elements of defect below `i` (no independent generators
//!   at depth `i`).
//! * `Sep(i)`: every pair of distinct elements of `P^(i-1)` is `i`-separated,
//!   meaning their defects differ, or some operation, argument slot, and
//!   context tuple drawn from `P^(i)` yields distinct outputs that both lie
//!   in `P^(i)`.
//!
//! `d_gen` / `d_sep` are the largest `d` with all flags true for
//! `1 <= i <= d`; a phase is strongly admissible under a predicate when the
//! corresponding depth reaches `k`.

use crate::error::PhaselabError;
use crate::phase::{decode_tuple, tuple_count, Phase};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    /// `layers[i]` is `L_i = {x : defect(x) = i}`; layers may be empty.
    pub layers: Vec<Vec<usize>>,
    /// `strata[i]` is `P^(i) = {x : defect(x) >= i}`.
    pub strata: Vec<Vec<usize>>,
    /// Filtration length: the maximal attained defect.
    pub k: u32,
    /// `gen_flags[i-1]` is `Gen(i)` for `1 <= i <= k`.
    pub gen_flags: Vec<bool>,
    /// `sep_flags[i-1]` is `Sep(i)` for `1 <= i <= k`.
    pub sep_flags: Vec<bool>,
    pub d_gen: u32,
    pub d_sep: u32,
}

impl Stratification {
    pub fn strongly_admissible_gen(&self) -> bool {
        self.d_gen == self.k
    }

    pub fn strongly_admissible_sep(&self) -> bool {
        self.d_sep == self.k
    }
}

/// Compute the canonical filtration together with the Gen/Sep depth flags.
pub fn stratify(p: &Phase) -> Stratification {
    let k = p.max_defect();
    let layers: Vec<Vec<usize>> = (0..=k)
        .map(|i| (0..p.n()).filter(|&x| p.defect(x) == i).collect())
        .collect();
    let strata: Vec<Vec<usize>> = (0..=k).map(|i| p.stratum_members(i)).collect();

    let mut gen_flags = Vec::with_capacity(k as usize);
    let mut sep_flags = Vec::with_capacity(k as usize);
    for i in 1..=k {
        gen_flags.push(gen_at(p, i, &layers));
        sep_flags.push(sep_at(p, i));
    }
    let d_gen = depth(&gen_flags);
    let d_sep = depth(&sep_flags);
    Stratification { layers, strata, k, gen_flags, sep_flags, d_gen, d_sep }
}

fn depth(flags: &[bool]) -> u32 {
    let mut d = 0;
    for &f in flags {
        if !f {
            break;
        }
        d += 1;
    }
    d
}

fn gen_at(p: &Phase, i: u32, layers: &[Vec<usize>]) -> bool {
    let layer = &layers[i as usize];
    if layer.is_empty() {
        return true;
    }
    let mut below = 0u32;
    for x in 0..p.n() {
        if p.defect(x) < i {
            below |= 1 << x;
        }
    }
    let closure = p.generated_closure(below);
    layer.iter().all(|&x| closure & (1 << x) != 0)
}

fn sep_at(p: &Phase, i: u32) -> bool {
    let outer: Vec<usize> = p.stratum_members(i - 1);
    for (a, &x) in outer.iter().enumerate() {
        for &y in &outer[a + 1..] {
            if !separated(p, i, x, y) {
                return false;
            }
        }
    }
    true
}

/// Pair separation at depth `i`: distinct defects, or a context inside
/// `P^(i)` that sends the two elements to distinct outputs inside `P^(i)`.
fn separated(p: &Phase, i: u32, x: usize, y: usize) -> bool {
    if p.defect(x) != p.defect(y) {
        return true;
    }
    let inner = p.stratum_mask(i);
    let n = p.n();
    let mut ctx = [0usize; 16];
    let mut args = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let arity = p.op(op_idx).arity;
        if arity == 0 {
            continue;
        }
        let ctx_count = tuple_count(n, arity - 1) as usize;
        for slot in 0..arity {
            for ctx_idx in 0..ctx_count {
                decode_tuple(n, arity - 1, ctx_idx, &mut ctx[..arity - 1]);
                if !ctx[..arity - 1].iter().all(|&c| inner & (1 << c) != 0) {
                    continue;
                }
                let place = |probe: usize, args: &mut [usize]| {
                    let mut c = 0;
                    for (s, slot_arg) in args.iter_mut().enumerate().take(arity) {
                        if s == slot {
                            *slot_arg = probe;
                        } else {
                            *slot_arg = ctx[c];
                            c += 1;
                        }
                    }
                };
                place(x, &mut args);
                let out_x = p.apply(op_idx, &args[..arity]);
                place(y, &mut args);
                let out_y = p.apply(op_idx, &args[..arity]);
                if out_x != out_y
                    && inner & (1 << out_x) != 0
                    && inner & (1 << out_y) != 0
                {
                    return true;
                }
            }
        }
    }
    false
}

/// The induced phase on the penultimate stratum `P^(max(k-1, 0))`. For
/// `k = 0` this is the phase itself.
pub fn rigid_core(p: &Phase) -> Result<Phase, PhaselabError> {
    let k = p.max_defect();
    if k == 0 {
        return Ok(p.clone());
    }
    let members = p.stratum_members(k - 1);
    p.induced(&members, format!("{}_core", p.name()))
}

/// Indices of the rigid core inside the ambient carrier.
pub fn rigid_core_members(p: &Phase) -> Vec<usize> {
    let k = p.max_defect();
    p.stratum_members(k.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureComplexity {
    pub op_count: usize,
    pub arities: Vec<usize>,
}

/// The isomorphism-invariant summary of a phase: filtration length, defect
/// rank (largest layer above depth zero), boundary depth, and signature
/// complexity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub k: u32,
    pub defect_rank: usize,
    pub boundary_depth: u32,
    pub signature_complexity: SignatureComplexity,
}

pub fn invariants(p: &Phase) -> Result<InvariantRecord, PhaselabError> {
    let s = stratify(p);
    let defect_rank = if s.k == 0 {
        0
    } else {
        s.layers[1..].iter().map(|l| l.len()).max().unwrap_or(0)
    };
    let boundary = crate::quotient::boundary(p)?;
    let (op_count, arities) = p.signature().complexity();
    Ok(InvariantRecord {
        k: s.k,
        defect_rank,
        boundary_depth: boundary.max_defect(),
        signature_complexity: SignatureComplexity { op_count, arities },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn max3_stratification() {
        let s = stratify(&fixtures::max3());
        assert_eq!(s.k, 2);
        assert_eq!(s.strata.iter().map(|x| x.len()).collect::<Vec<_>>(), vec![3, 2, 1]);
        // e1 is not generated from {e0} under max, so Gen fails at every level
        assert_eq!(s.gen_flags, vec![false, false]);
        assert_eq!(s.d_gen, 0);
        // all defects are distinct, so every pair is separated by the grading
        assert_eq!(s.sep_flags, vec![true, true]);
        assert_eq!(s.d_sep, 2);
    }

    #[test]
    fn t1_stratification() {
        let s = stratify(&fixtures::t1());
        assert_eq!(s.k, 0);
        assert_eq!(s.d_gen, 0);
        assert_eq!(s.d_sep, 0);
        assert!(s.gen_flags.is_empty());
        assert_eq!(s.strata.len(), 1);
        assert!(s.strongly_admissible_gen() && s.strongly_admissible_sep());
    }

    #[test]
    fn sep4_is_sep_admissible() {
        let s = stratify(&fixtures::sep4());
        assert_eq!(s.k, 2);
        // the context (., y) separates a from b; the grading separates the rest
        assert_eq!(s.sep_flags, vec![true, true]);
        assert_eq!(s.d_sep, 2);
        assert!(s.strongly_admissible_sep());
        // y = m(a,a) and z = m(b,b) are generated from the defect-0 layer
        assert_eq!(s.gen_flags, vec![true, true]);
        assert_eq!(s.d_gen, 2);
    }

    #[test]
    fn pair4_fails_sep_at_depth_one() {
        let s = stratify(&fixtures::pair4());
        assert_eq!(s.k, 2);
        // no context distinguishes a from b, and their defects agree
        assert_eq!(s.sep_flags, vec![false, true]);
        assert_eq!(s.d_sep, 0);
        assert!(!s.strongly_admissible_sep());
        assert_eq!(s.gen_flags, vec![true, true]);
        assert_eq!(s.d_gen, 2);
    }

    #[test]
    fn rigid_cores_of_the_fixtures() {
        let core = rigid_core(&fixtures::max3()).unwrap();
        assert_eq!(core.elements(), &["e1".to_string(), "e2".to_string()]);

        let core = rigid_core(&fixtures::pair4()).unwrap();
        assert_eq!(core.elements(), &["y".to_string(), "z".to_string()]);

        let t1 = fixtures::t1();
        assert_eq!(rigid_core(&t1).unwrap(), t1);
    }

    #[test]
    fn invariant_records_of_the_fixtures() {
        let rec = invariants(&fixtures::max3()).unwrap();
        assert_eq!(rec.k, 2);
        assert_eq!(rec.defect_rank, 1);
        assert_eq!(rec.boundary_depth, 1);
        assert_eq!(rec.signature_complexity, SignatureComplexity { op_count: 1, arities: vec![2] });

        let rec = invariants(&fixtures::pair4()).unwrap();
        assert_eq!((rec.k, rec.defect_rank, rec.boundary_depth), (2, 1, 1));

        let rec = invariants(&fixtures::t1()).unwrap();
        assert_eq!((rec.k, rec.defect_rank, rec.boundary_depth), (0, 0, 0));
    }

    #[test]
    fn strata_are_closed_on_all_fixtures() {
        for p in fixtures::all() {
            for i in 0..=p.max_defect() {
                assert!(p.closure_escape(p.stratum_mask(i)).is_none());
            }
        }
    }

    #[test]
    fn empty_layers_are_tolerated() {
        // defect values 0 and 2; layer 1 is empty
        let p = crate::phase::testutil::phase_from("GAP", &[0, 2], &[0, 1, 1, 1]);
        let s = stratify(&p);
        assert_eq!(s.k, 2);
        assert!(s.layers[1].is_empty());
        // Gen(1) is vacuous, Gen(2) asks whether e1 is generated from {e0}
        assert!(s.gen_flags[0]);
        assert!(!s.gen_flags[1]);
    }
}
