//! Preorder-enriched phases and the strict 2-category law checks.
//!
//! An ordered phase carries a reflexive-transitive relation (the closure of
//! the DSL `order` block) that never relates elements of different defect
//! and for which every operation is monotone in each argument. 1-cells
//! between ordered phases are strict, order-monotone morphisms; a 2-cell
//! `F => G` exists exactly when `F(x) <= G(x)` pointwise (2-cells are
//! proof-irrelevant, at most one per parallel pair).

use crate::dsl::ParsedPhase;
use crate::error::PhaselabError;
use crate::morphism::{self, Mode};
use crate::phase::{decode_tuple, tuple_count, Phase};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum OrderViolation {
    MixesDefect { left: String, right: String },
    NotMonotone { op: String, slot: usize, left: String, right: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPhase {
    pub phase: Phase,
    pub generators: Vec<(usize, usize)>,
    /// Reflexive-transitive closure, row-major `leq[x * n + y]`.
    leq: Vec<bool>,
}

impl OrderedPhase {
    /// Close the generators and check the enrichment invariants.
    pub fn new(phase: Phase, generators: Vec<(usize, usize)>) -> Result<OrderedPhase, Vec<OrderViolation>> {
        let n = phase.n();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            leq[x * n + x] = true;
        }
        for &(a, b) in &generators {
            leq[a * n + b] = true;
        }
        for mid in 0..n {
            for a in 0..n {
                if leq[a * n + mid] {
                    for b in 0..n {
                        if leq[mid * n + b] {
                            leq[a * n + b] = true;
                        }
                    }
                }
            }
        }
        let mut violations = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if leq[x * n + y] && phase.defect(x) != phase.defect(y) {
                    violations.push(OrderViolation::MixesDefect {
                        left: phase.element_name(x).to_string(),
                        right: phase.element_name(y).to_string(),
                    });
                }
            }
        }
        // monotonicity of every operation in every argument slot
        let mut ctx = [0usize; 16];
        let mut args = [0usize; 16];
        for op_idx in 0..phase.op_count() {
            let arity = phase.op(op_idx).arity;
            if arity == 0 {
                continue;
            }
            let ctx_count = tuple_count(n, arity - 1) as usize;
            for slot in 0..arity {
                for x in 0..n {
                    for y in 0..n {
                        if x == y || !leq[x * n + y] {
                            continue;
                        }
                        for ctx_idx in 0..ctx_count {
                            decode_tuple(n, arity - 1, ctx_idx, &mut ctx[..arity - 1]);
                            let place = |probe: usize, args: &mut [usize]| {
                                let mut c = 0;
                                for (s, a) in args.iter_mut().enumerate().take(arity) {
                                    if s == slot {
                                        *a = probe;
                                    } else {
                                        *a = ctx[c];
                                        c += 1;
                                    }
                                }
                            };
                            place(x, &mut args);
                            let out_x = phase.apply(op_idx, &args[..arity]);
                            place(y, &mut args);
                            let out_y = phase.apply(op_idx, &args[..arity]);
                            if !leq[out_x * n + out_y] {
                                violations.push(OrderViolation::NotMonotone {
                                    op: phase.op(op_idx).name.clone(),
                                    slot,
                                    left: phase.element_name(x).to_string(),
                                    right: phase.element_name(y).to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(OrderedPhase { phase, generators, leq })
        } else {
            violations.dedup();
            Err(violations)
        }
    }

    /// Discrete enrichment: only the diagonal.
    pub fn discrete(phase: Phase) -> OrderedPhase {
        OrderedPhase::new(phase, Vec::new()).expect("the diagonal always satisfies the invariants")
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.phase.n() + y]
    }

    pub fn is_discrete(&self) -> bool {
        let n = self.phase.n();
        (0..n).all(|x| (0..n).all(|y| x == y || !self.leq[x * n + y]))
    }
}

/// Lift a parsed phase into an ordered phase. Errors with `OrderMissing`
/// when the document has no order block (an empty block is the discrete
/// order, which is fine).
pub fn ordered(parsed: &ParsedPhase) -> Result<OrderedPhase, PhaselabError> {
    match &parsed.order {
        None => Err(PhaselabError::OrderMissing),
        Some(generators) => OrderedPhase::new(parsed.phase.clone(), generators.clone())
            .map_err(|violations| {
                PhaselabError::InvalidInput(format!("order block invalid: {violations:?}"))
            }),
    }
}

/// Does the 2-cell `F => G` exist? Both maps must be morphisms into the
/// ordered target; the cell exists when `F(x) <= G(x)` for every `x`.
pub fn two_cell(f: &[usize], g: &[usize], target: &OrderedPhase) -> bool {
    f.iter().zip(g).all(|(&fx, &gx)| target.leq(fx, gx))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawViolation {
    pub law: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    /// One entry per battery member: (digest, had an order block).
    pub members: Vec<MemberReport>,
    pub one_cells: u64,
    pub two_cells: u64,
    pub configurations_checked: u64,
    pub violations: Vec<LawViolation>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberReport {
    pub digest: String,
    pub name: String,
    pub ordered: bool,
    pub discrete: bool,
}

/// Exhaustively check the strict 2-category laws over a battery of ordered
/// phases: identity cells, vertical composition (transitivity), horizontal
/// composition via whiskering, and the interchange law. With
/// proof-irrelevant cells every law is an existence equality.
pub fn check_two_category_laws(
    battery: &[ParsedPhase],
    budget: u64,
) -> Result<LawReport, PhaselabError> {
    let mut members = Vec::with_capacity(battery.len());
    let mut ordered_battery = Vec::with_capacity(battery.len());
    let mut notes = Vec::new();
    for parsed in battery {
        let op = match &parsed.order {
            None => {
                notes.push(format!(
                    "{}: no order block; only identity 2-cells exist",
                    parsed.phase.name()
                ));
                OrderedPhase::discrete(parsed.phase.clone())
            }
            Some(generators) => OrderedPhase::new(parsed.phase.clone(), generators.clone())
                .map_err(|violations| {
                    PhaselabError::InvalidInput(format!(
                        "order block of `{}` invalid: {violations:?}",
                        parsed.phase.name()
                    ))
                })?,
        };
        members.push(MemberReport {
            digest: crate::canon::digest(&op.phase)?,
            name: op.phase.name().to_string(),
            ordered: parsed.order.is_some(),
            discrete: op.is_discrete(),
        });
        ordered_battery.push(op);
    }
    if members.iter().all(|m| m.discrete) {
        notes.push("all orders are discrete; the 2-category reduces to the 1-category".into());
    }

    let b = ordered_battery.len();
    // 1-cells: strict morphisms monotone for the orders, per ordered pair
    let mut homs: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![Vec::new(); b]; b];
    let mut one_cells = 0u64;
    for i in 0..b {
        for j in 0..b {
            let (src, dst) = (&ordered_battery[i], &ordered_battery[j]);
            if src.phase.signature() != dst.phase.signature() {
                continue;
            }
            let candidates =
                morphism::core_seeded_homs(&src.phase, &dst.phase, Mode::Strict, budget)?;
            let monotone: Vec<Vec<usize>> = candidates
                .maps
                .into_iter()
                .filter(|f| {
                    let n = src.phase.n();
                    (0..n).all(|x| (0..n).all(|y| !src.leq(x, y) || dst.leq(f[x], f[y])))
                })
                .collect();
            one_cells += monotone.len() as u64;
            homs[i][j] = monotone;
        }
    }

    let mut violations = Vec::new();
    let mut configurations = 0u64;
    let mut two_cells = 0u64;
    let bump = |configurations: &mut u64| -> Result<(), PhaselabError> {
        *configurations += 1;
        if *configurations > budget {
            return Err(PhaselabError::BudgetExceeded { required: *configurations as u128, budget });
        }
        Ok(())
    };

    for i in 0..b {
        // identity 1-cell must be present
        let id: Vec<usize> = (0..ordered_battery[i].phase.n()).collect();
        if !homs[i][i].contains(&id) {
            violations.push(LawViolation {
                law: "identity-1-cell".into(),
                detail: format!("identity on `{}` is not a 1-cell", ordered_battery[i].phase.name()),
            });
        }
    }

    for i in 0..b {
        for j in 0..b {
            let target = &ordered_battery[j];
            let fs = &homs[i][j];
            // identity 2-cells and 2-cell census
            for f in fs {
                bump(&mut configurations)?;
                if !two_cell(f, f, target) {
                    violations.push(LawViolation {
                        law: "identity-2-cell".into(),
                        detail: format!("no identity cell on a 1-cell {} -> {}", i, j),
                    });
                }
            }
            for f in fs {
                for g in fs {
                    if two_cell(f, g, target) {
                        two_cells += 1;
                    }
                }
            }
            // vertical composition: transitivity of pointwise order
            for f in fs {
                for g in fs {
                    for h in fs {
                        bump(&mut configurations)?;
                        if two_cell(f, g, target)
                            && two_cell(g, h, target)
                            && !two_cell(f, h, target)
                        {
                            violations.push(LawViolation {
                                law: "vertical-composition".into(),
                                detail: format!("cells {f:?} => {g:?} => {h:?} do not compose"),
                            });
                        }
                    }
                }
            }
        }
    }

    // horizontal composition and interchange over composable pairs
    for i in 0..b {
        for j in 0..b {
            for k in 0..b {
                let (mid, dst) = (&ordered_battery[j], &ordered_battery[k]);
                let inner = &homs[i][j];
                let outer = &homs[j][k];
                if inner.is_empty() || outer.is_empty() {
                    continue;
                }
                let compose = |f: &[usize], g: &[usize]| -> Vec<usize> {
                    f.iter().map(|&x| g[x]).collect()
                };
                // composition of 1-cells must land in the enumerated hom set
                for f in inner {
                    for g in outer {
                        bump(&mut configurations)?;
                        let gf = compose(f, g);
                        if !homs[i][k].contains(&gf) {
                            violations.push(LawViolation {
                                law: "1-cell-composition".into(),
                                detail: format!("composite {gf:?} missing from hom({i},{k})"),
                            });
                        }
                    }
                }
                for f1 in inner {
                    for f2 in inner {
                        if !two_cell(f1, f2, mid) {
                            continue;
                        }
                        for g1 in outer {
                            for g2 in outer {
                                if !two_cell(g1, g2, dst) {
                                    continue;
                                }
                                bump(&mut configurations)?;
                                // whiskering route: G1 applied to the cell,
                                // then the outer cell at F2(x)
                                let step1 = f1
                                    .iter()
                                    .zip(f2)
                                    .all(|(&a, &b)| dst.leq(g1[a], g1[b]));
                                let step2 =
                                    f2.iter().all(|&x| dst.leq(g1[x], g2[x]));
                                let direct = two_cell(&compose(f1, g1), &compose(f2, g2), dst);
                                if !(step1 && step2 && direct) {
                                    violations.push(LawViolation {
                                        law: "horizontal-composition".into(),
                                        detail: format!(
                                            "whiskering failed for {f1:?}=>{f2:?} with {g1:?}=>{g2:?}"
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
                // interchange on 2x2 grids of cells
                for f1 in inner {
                    for f2 in inner {
                        for f3 in inner {
                            if !(two_cell(f1, f2, mid) && two_cell(f2, f3, mid)) {
                                continue;
                            }
                            for g1 in outer {
                                for g2 in outer {
                                    for g3 in outer {
                                        if !(two_cell(g1, g2, dst) && two_cell(g2, g3, dst)) {
                                            continue;
                                        }
                                        bump(&mut configurations)?;
                                        let left = two_cell(
                                            &compose(f1, g1),
                                            &compose(f3, g3),
                                            dst,
                                        );
                                        let right = two_cell(&compose(f1, g1), &compose(f2, g2), dst)
                                            && two_cell(&compose(f2, g2), &compose(f3, g3), dst);
                                        if left != right {
                                            violations.push(LawViolation {
                                                law: "interchange".into(),
                                                detail: format!(
                                                    "grid ({f1:?},{f2:?},{f3:?}) x ({g1:?},{g2:?},{g3:?})"
                                                ),
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(LawReport {
        members,
        one_cells,
        two_cells,
        configurations_checked: configurations,
        violations,
        notes,
    })
}
