//! Phase data model: finite carrier, total operation tables, and a defect
//! grading that must be monotone under every operation.
//!
//! A phase is only constructible through [`validate`] (string-level raw data)
//! or [`Phase::assemble`] (index-level parts); both enforce totality,
//! identifier integrity, and the monotonicity law
//! `defect(op(x1..xn)) >= min_j defect(x_j)` for every operation of arity >= 1.

use crate::span::SourceSpan;
use serde::Serialize;

/// Defect values are capped; gaps between attained values are allowed.
pub const MAX_DEFECT: u64 = u16::MAX as u64;

/// Carrier bound for exact canonical labeling and isomorphism search.
pub const MAX_EXACT_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub operations: Vec<Operation>,
}

impl Signature {
    pub fn new(ops: &[(&str, usize)]) -> Self {
        Signature {
            operations: ops
                .iter()
                .map(|(name, arity)| Operation { name: name.to_string(), arity: *arity })
                .collect(),
        }
    }

    /// One binary operation `m`; the default catalogue signature.
    pub fn binary() -> Self {
        Signature::new(&[("m", 2)])
    }

    /// (operation count, sorted arity multiset)
    pub fn complexity(&self) -> (usize, Vec<usize>) {
        let mut arities: Vec<usize> = self.operations.iter().map(|o| o.arity).collect();
        arities.sort_unstable();
        (self.operations.len(), arities)
    }
}

/// A validated finite phase. Immutable after construction; all analysis
/// operations are pure functions over shared references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    name: String,
    elements: Vec<String>,
    signature: Signature,
    /// One flat table per operation, indexed by [`encode_tuple`].
    tables: Vec<Vec<usize>>,
    defect: Vec<u32>,
}

/// Row-major index of an argument tuple: the first argument is the most
/// significant digit, so index order equals lexicographic tuple order.
pub fn encode_tuple(n: usize, args: &[usize]) -> usize {
    let mut idx = 0;
    for &a in args {
        debug_assert!(a < n);
        idx = idx * n + a;
    }
    idx
}

/// Inverse of [`encode_tuple`]; writes into `out[..arity]`.
pub fn decode_tuple(n: usize, arity: usize, mut idx: usize, out: &mut [usize]) {
    for slot in (0..arity).rev() {
        out[slot] = idx % n;
        idx /= n;
    }
}

/// `n^arity` as u128 (table sizes can overflow usize for hypothetical inputs).
pub fn tuple_count(n: usize, arity: usize) -> u128 {
    (n as u128).pow(arity as u32)
}

impl Phase {
    /// Index-level constructor; runs the full validity scan.
    pub fn assemble(
        name: impl Into<String>,
        elements: Vec<String>,
        signature: Signature,
        tables: Vec<Vec<usize>>,
        defect: Vec<u32>,
    ) -> Result<Phase, Vec<Violation>> {
        let phase = Phase { name: name.into(), elements, signature, tables, defect };
        let violations = phase.scan();
        if violations.is_empty() {
            Ok(phase)
        } else {
            Err(violations)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Phase {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn op_count(&self) -> usize {
        self.signature.operations.len()
    }

    pub fn op(&self, op: usize) -> &Operation {
        &self.signature.operations[op]
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn defects(&self) -> &[u32] {
        &self.defect
    }

    pub fn defect(&self, i: usize) -> u32 {
        self.defect[i]
    }

    /// Filtration length: the largest attained defect value.
    pub fn max_defect(&self) -> u32 {
        self.defect.iter().copied().max().unwrap_or(0)
    }

    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        self.tables[op][encode_tuple(self.n(), args)]
    }

    /// Members of the stratum `{x : defect(x) >= i}` in element order.
    pub fn stratum_members(&self, i: u32) -> Vec<usize> {
        (0..self.n()).filter(|&x| self.defect[x] >= i).collect()
    }

    /// Stratum as a bitmask (carrier size is at most [`MAX_EXACT_SIZE`] in
    /// exact paths, and masks stay correct up to 32 elements).
    pub fn stratum_mask(&self, i: u32) -> u32 {
        let mut mask = 0u32;
        for x in 0..self.n() {
            if self.defect[x] >= i {
                mask |= 1 << x;
            }
        }
        mask
    }

    /// First tuple (if any) of an arity >= 1 operation that maps a subset into
    /// its complement. Nullary operations are exempt, mirroring the vacuous
    /// monotonicity rule for constants.
    pub fn closure_escape(&self, mask: u32) -> Option<ClosureEscape> {
        let n = self.n();
        let mut args = [0usize; 16];
        for (op_idx, op) in self.signature.operations.iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let count = tuple_count(n, op.arity) as usize;
            for idx in 0..count {
                decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                if args[..op.arity].iter().all(|&a| mask & (1 << a) != 0) {
                    let out = self.tables[op_idx][idx];
                    if mask & (1 << out) == 0 {
                        return Some(ClosureEscape {
                            op: op_idx,
                            tuple: args[..op.arity].to_vec(),
                            output: out,
                        });
                    }
                }
            }
        }
        None
    }

    /// Operation-closure of a starting set, including nullary constants.
    pub fn generated_closure(&self, start: u32) -> u32 {
        let n = self.n();
        let mut mask = start;
        let mut args = [0usize; 16];
        loop {
            let mut next = mask;
            for (op_idx, op) in self.signature.operations.iter().enumerate() {
                if op.arity == 0 {
                    next |= 1 << self.tables[op_idx][0];
                    continue;
                }
                let count = tuple_count(n, op.arity) as usize;
                for idx in 0..count {
                    decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                    if args[..op.arity].iter().all(|&a| mask & (1 << a) != 0) {
                        next |= 1 << self.tables[op_idx][idx];
                    }
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    /// Induced phase on a closed subset of the carrier. Fails with
    /// `SubphaseNotClosed` when some operation leaves the subset (possible
    /// only for nullary constants, since strata are closed for arity >= 1).
    pub fn induced(&self, members: &[usize], name: impl Into<String>) -> Result<Phase, crate::error::PhaselabError> {
        let n = self.n();
        let mut mask = 0u32;
        for &x in members {
            mask |= 1 << x;
        }
        let mut old_to_new = vec![usize::MAX; n];
        for (new, &old) in members.iter().enumerate() {
            old_to_new[old] = new;
        }
        let m = members.len();
        let mut tables = Vec::with_capacity(self.op_count());
        let mut args_new = [0usize; 16];
        let mut args_old = [0usize; 16];
        for (op_idx, op) in self.signature.operations.iter().enumerate() {
            let count = tuple_count(m, op.arity) as usize;
            let mut table = Vec::with_capacity(count);
            for idx in 0..count {
                decode_tuple(m, op.arity, idx, &mut args_new[..op.arity]);
                for s in 0..op.arity {
                    args_old[s] = members[args_new[s]];
                }
                let out = self.apply(op_idx, &args_old[..op.arity]);
                if mask & (1 << out) == 0 {
                    return Err(crate::error::PhaselabError::SubphaseNotClosed { op: op.name.clone() });
                }
                table.push(old_to_new[out]);
            }
            tables.push(table);
        }
        let elements = members.iter().map(|&x| self.elements[x].clone()).collect();
        let defect = members.iter().map(|&x| self.defect[x]).collect();
        Phase::assemble(name, elements, self.signature.clone(), tables, defect)
            .map_err(crate::error::PhaselabError::Validation)
    }

    fn scan(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let n = self.n();
        if n == 0 {
            violations.push(Violation::plain(ViolationKind::EmptyCarrier));
            return violations;
        }
        for (i, e) in self.elements.iter().enumerate() {
            if !is_identifier(e) {
                violations.push(Violation::plain(ViolationKind::InvalidIdentifier {
                    ident: e.clone(),
                    context: "element".into(),
                }));
            }
            if self.elements[..i].contains(e) {
                violations.push(Violation::plain(ViolationKind::DuplicateIdentifier {
                    ident: e.clone(),
                    context: "element".into(),
                }));
            }
        }
        if !is_identifier(&self.name) {
            violations.push(Violation::plain(ViolationKind::InvalidIdentifier {
                ident: self.name.clone(),
                context: "phase name".into(),
            }));
        }
        for (i, op) in self.signature.operations.iter().enumerate() {
            if !is_identifier(&op.name) {
                violations.push(Violation::plain(ViolationKind::InvalidIdentifier {
                    ident: op.name.clone(),
                    context: "operation".into(),
                }));
            }
            if self.signature.operations[..i].iter().any(|o| o.name == op.name) {
                violations.push(Violation::plain(ViolationKind::DuplicateIdentifier {
                    ident: op.name.clone(),
                    context: "operation".into(),
                }));
            }
        }
        if self.defect.len() != n {
            violations.push(Violation::plain(ViolationKind::MissingDefect {
                element: self
                    .elements
                    .get(self.defect.len())
                    .cloned()
                    .unwrap_or_default(),
            }));
            return violations;
        }
        for (x, &d) in self.defect.iter().enumerate() {
            if d as u64 > MAX_DEFECT {
                violations.push(Violation::plain(ViolationKind::DefectOutOfRange {
                    element: self.elements[x].clone(),
                    value: d as u64,
                }));
            }
        }
        if self.tables.len() != self.op_count() {
            violations.push(Violation::plain(ViolationKind::Totality {
                op: self
                    .signature
                    .operations
                    .get(self.tables.len())
                    .map(|o| o.name.clone())
                    .unwrap_or_default(),
                tuple: Vec::new(),
            }));
            return violations;
        }
        let mut args = [0usize; 16];
        for (op_idx, op) in self.signature.operations.iter().enumerate() {
            let expected = tuple_count(n, op.arity);
            if expected > (1 << 24) {
                violations.push(Violation::plain(ViolationKind::InvalidIdentifier {
                    ident: op.name.clone(),
                    context: "operation table too large".into(),
                }));
                continue;
            }
            let expected = expected as usize;
            let table = &self.tables[op_idx];
            if table.len() != expected {
                let idx = table.len().min(expected.saturating_sub(1));
                decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                violations.push(Violation::plain(ViolationKind::Totality {
                    op: op.name.clone(),
                    tuple: args[..op.arity].iter().map(|&a| self.elements[a].clone()).collect(),
                }));
                continue;
            }
            for (idx, &out) in table.iter().enumerate() {
                if out >= n {
                    violations.push(Violation::plain(ViolationKind::UnknownIdentifier {
                        ident: format!("#{out}"),
                        context: format!("table of `{}`", op.name),
                    }));
                    continue;
                }
                if op.arity == 0 {
                    continue;
                }
                decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                let min_defect = args[..op.arity].iter().map(|&a| self.defect[a]).min().unwrap();
                if self.defect[out] < min_defect {
                    violations.push(Violation::plain(ViolationKind::Monotonicity {
                        op: op.name.clone(),
                        tuple: args[..op.arity].iter().map(|&a| self.elements[a].clone()).collect(),
                        output: self.elements[out].clone(),
                        output_defect: self.defect[out],
                        tuple_min_defect: min_defect,
                    }));
                }
            }
        }
        violations
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureEscape {
    pub op: usize,
    pub tuple: Vec<usize>,
    pub output: usize,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// Raw (unvalidated) phase data and the validation entry point.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct RawPhase {
    pub name: String,
    pub elements: Vec<(String, Option<SourceSpan>)>,
    pub defect: Vec<(String, u64, Option<SourceSpan>)>,
    pub ops: Vec<RawOp>,
}

#[derive(Debug, Clone)]
pub struct RawOp {
    pub name: String,
    pub arity: usize,
    pub span: Option<SourceSpan>,
    pub rows: Vec<RawRow>,
}

#[derive(Debug, Clone)]
pub struct RawRow {
    pub inputs: Vec<String>,
    pub output: String,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub span: Option<SourceSpan>,
}

impl Violation {
    pub fn plain(kind: ViolationKind) -> Self {
        Violation { kind, span: None }
    }

    pub fn at(kind: ViolationKind, span: Option<SourceSpan>) -> Self {
        Violation { kind, span }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.span {
            Some(span) => write!(f, "{} at {}: {}", self.kind.code(), span, self.kind),
            None => write!(f, "{}: {}", self.kind.code(), self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum ViolationKind {
    #[serde(rename = "TotalityError")]
    Totality { op: String, tuple: Vec<String> },
    #[serde(rename = "MonotonicityError")]
    Monotonicity {
        op: String,
        tuple: Vec<String>,
        output: String,
        output_defect: u32,
        tuple_min_defect: u32,
    },
    #[serde(rename = "UnknownIdentifier")]
    UnknownIdentifier { ident: String, context: String },
    #[serde(rename = "DuplicateIdentifier")]
    DuplicateIdentifier { ident: String, context: String },
    #[serde(rename = "DefectOutOfRange")]
    DefectOutOfRange { element: String, value: u64 },
    #[serde(rename = "MissingDefect")]
    MissingDefect { element: String },
    #[serde(rename = "DuplicateTuple")]
    DuplicateTuple { op: String, tuple: Vec<String> },
    #[serde(rename = "ArityMismatch")]
    ArityMismatch { op: String, expected: usize, got: usize },
    #[serde(rename = "InvalidIdentifier")]
    InvalidIdentifier { ident: String, context: String },
    #[serde(rename = "EmptyCarrier")]
    EmptyCarrier,
}

impl ViolationKind {
    pub fn code(&self) -> &'static str {
        match self {
            ViolationKind::Totality { .. } => "TotalityError",
            ViolationKind::Monotonicity { .. } => "MonotonicityError",
            ViolationKind::UnknownIdentifier { .. } => "UnknownIdentifier",
            ViolationKind::DuplicateIdentifier { .. } => "DuplicateIdentifier",
            ViolationKind::DefectOutOfRange { .. } => "DefectOutOfRange",
            ViolationKind::MissingDefect { .. } => "MissingDefect",
            ViolationKind::DuplicateTuple { .. } => "DuplicateTuple",
            ViolationKind::ArityMismatch { .. } => "ArityMismatch",
            ViolationKind::InvalidIdentifier { .. } => "InvalidIdentifier",
            ViolationKind::EmptyCarrier => "EmptyCarrier",
        }
    }
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ViolationKind::Totality { op, tuple } => {
                write!(f, "operation `{op}` is missing the entry for ({})", tuple.join(", "))
            }
            ViolationKind::Monotonicity { op, tuple, output, output_defect, tuple_min_defect } => write!(
                f,
                "`{op}`({}) = {output} has defect {output_defect} < {tuple_min_defect} = min over the tuple",
                tuple.join(", ")
            ),
            ViolationKind::UnknownIdentifier { ident, context } => {
                write!(f, "`{ident}` is not an element ({context})")
            }
            ViolationKind::DuplicateIdentifier { ident, context } => {
                write!(f, "`{ident}` declared more than once ({context})")
            }
            ViolationKind::DefectOutOfRange { element, value } => {
                write!(f, "defect {value} of `{element}` exceeds {MAX_DEFECT}")
            }
            ViolationKind::MissingDefect { element } => {
                write!(f, "element `{element}` has no defect entry")
            }
            ViolationKind::DuplicateTuple { op, tuple } => {
                write!(f, "operation `{op}` lists the tuple ({}) more than once", tuple.join(", "))
            }
            ViolationKind::ArityMismatch { op, expected, got } => {
                write!(f, "row of `{op}` has {got} argument(s), expected {expected}")
            }
            ViolationKind::InvalidIdentifier { ident, context } => {
                write!(f, "`{ident}` is not a valid identifier ({context})")
            }
            ViolationKind::EmptyCarrier => write!(f, "a phase needs at least one element"),
        }
    }
}

/// Validate raw phase data, resolving identifiers and checking totality,
/// monotonicity, and integrity. Returns every violation found.
pub fn validate(raw: &RawPhase) -> Result<Phase, Vec<Violation>> {
    let mut violations = Vec::new();

    let mut elements: Vec<String> = Vec::new();
    for (name, span) in &raw.elements {
        if !is_identifier(name) {
            violations.push(Violation::at(
                ViolationKind::InvalidIdentifier { ident: name.clone(), context: "element".into() },
                *span,
            ));
        }
        if elements.contains(name) {
            violations.push(Violation::at(
                ViolationKind::DuplicateIdentifier { ident: name.clone(), context: "element".into() },
                *span,
            ));
        } else {
            elements.push(name.clone());
        }
    }
    if elements.is_empty() {
        violations.push(Violation::plain(ViolationKind::EmptyCarrier));
        return Err(violations);
    }
    let index_of = |name: &str| elements.iter().position(|e| e == name);

    let mut defect = vec![None::<u64>; elements.len()];
    for (name, value, span) in &raw.defect {
        match index_of(name) {
            None => violations.push(Violation::at(
                ViolationKind::UnknownIdentifier { ident: name.clone(), context: "defect".into() },
                *span,
            )),
            Some(i) => {
                if defect[i].is_some() {
                    violations.push(Violation::at(
                        ViolationKind::DuplicateIdentifier { ident: name.clone(), context: "defect".into() },
                        *span,
                    ));
                } else {
                    if *value > MAX_DEFECT {
                        violations.push(Violation::at(
                            ViolationKind::DefectOutOfRange { element: name.clone(), value: *value },
                            *span,
                        ));
                    }
                    defect[i] = Some(*value);
                }
            }
        }
    }
    for (i, d) in defect.iter().enumerate() {
        if d.is_none() {
            violations.push(Violation::plain(ViolationKind::MissingDefect {
                element: elements[i].clone(),
            }));
        }
    }

    let n = elements.len();
    let mut op_names: Vec<String> = Vec::new();
    let mut signature = Signature::default();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    for op in &raw.ops {
        if !is_identifier(&op.name) {
            violations.push(Violation::at(
                ViolationKind::InvalidIdentifier { ident: op.name.clone(), context: "operation".into() },
                op.span,
            ));
        }
        if op_names.contains(&op.name) {
            violations.push(Violation::at(
                ViolationKind::DuplicateIdentifier { ident: op.name.clone(), context: "operation".into() },
                op.span,
            ));
            continue;
        }
        op_names.push(op.name.clone());
        let count = tuple_count(n, op.arity);
        if count > (1 << 24) {
            violations.push(Violation::at(
                ViolationKind::InvalidIdentifier {
                    ident: op.name.clone(),
                    context: "operation table too large".into(),
                },
                op.span,
            ));
            continue;
        }
        let count = count as usize;
        let mut table = vec![None::<usize>; count];
        for row in &op.rows {
            if row.inputs.len() != op.arity {
                violations.push(Violation::at(
                    ViolationKind::ArityMismatch {
                        op: op.name.clone(),
                        expected: op.arity,
                        got: row.inputs.len(),
                    },
                    row.span,
                ));
                continue;
            }
            let mut args = Vec::with_capacity(op.arity);
            let mut ok = true;
            for ident in &row.inputs {
                match index_of(ident) {
                    Some(i) => args.push(i),
                    None => {
                        violations.push(Violation::at(
                            ViolationKind::UnknownIdentifier {
                                ident: ident.clone(),
                                context: format!("table of `{}`", op.name),
                            },
                            row.span,
                        ));
                        ok = false;
                    }
                }
            }
            let out = match index_of(&row.output) {
                Some(i) => i,
                None => {
                    violations.push(Violation::at(
                        ViolationKind::UnknownIdentifier {
                            ident: row.output.clone(),
                            context: format!("table of `{}`", op.name),
                        },
                        row.span,
                    ));
                    ok = false;
                    0
                }
            };
            if !ok {
                continue;
            }
            let idx = encode_tuple(n, &args);
            if table[idx].is_some() {
                violations.push(Violation::at(
                    ViolationKind::DuplicateTuple { op: op.name.clone(), tuple: row.inputs.clone() },
                    row.span,
                ));
            } else {
                table[idx] = Some(out);
            }
        }
        let mut filled = Vec::with_capacity(count);
        let mut args = [0usize; 16];
        for (idx, entry) in table.iter().enumerate() {
            match entry {
                Some(out) => filled.push(*out),
                None => {
                    decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
                    violations.push(Violation::at(
                        ViolationKind::Totality {
                            op: op.name.clone(),
                            tuple: args[..op.arity].iter().map(|&a| elements[a].clone()).collect(),
                        },
                        op.span,
                    ));
                    filled.push(0);
                }
            }
        }
        signature.operations.push(Operation { name: op.name.clone(), arity: op.arity });
        tables.push(filled);
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    let defect: Vec<u32> = defect.into_iter().map(|d| d.unwrap() as u32).collect();
    match Phase::assemble(raw.name.clone(), elements, signature, tables, defect) {
        Ok(phase) => Ok(phase),
        Err(mut more) => {
            // attach op-header spans to monotonicity findings where possible
            for v in &mut more {
                if v.span.is_none() {
                    if let ViolationKind::Monotonicity { op, .. } = &v.kind {
                        v.span = raw.ops.iter().find(|o| &o.name == op).and_then(|o| o.span);
                    }
                }
            }
            violations.extend(more);
            Err(violations)
        }
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::{max3, phase_from, t1};
    use super::*;

    #[test]
    fn max3_validates() {
        let p = max3();
        assert_eq!(p.n(), 3);
        assert_eq!(p.max_defect(), 2);
        assert_eq!(p.apply(0, &[1, 2]), 2);
    }

    #[test]
    fn monotonicity_violation_reported_with_tuple() {
        // carrier {a,b}, defect a=1 b=0, m(a,a)=b: 0 < min(1,1)
        let raw = RawPhase {
            name: "BAD".into(),
            elements: vec![("a".into(), None), ("b".into(), None)],
            defect: vec![("a".into(), 1, None), ("b".into(), 0, None)],
            ops: vec![RawOp {
                name: "m".into(),
                arity: 2,
                span: None,
                rows: vec![
                    RawRow { inputs: vec!["a".into(), "a".into()], output: "b".into(), span: None },
                    RawRow { inputs: vec!["a".into(), "b".into()], output: "b".into(), span: None },
                    RawRow { inputs: vec!["b".into(), "a".into()], output: "b".into(), span: None },
                    RawRow { inputs: vec!["b".into(), "b".into()], output: "b".into(), span: None },
                ],
            }],
        };
        let violations = validate(&raw).unwrap_err();
        assert_eq!(violations.len(), 1);
        match &violations[0].kind {
            ViolationKind::Monotonicity { tuple, output_defect, tuple_min_defect, .. } => {
                assert_eq!(tuple, &vec!["a".to_string(), "a".to_string()]);
                assert_eq!((*output_defect, *tuple_min_defect), (0, 1));
            }
            other => panic!("expected monotonicity violation, got {other:?}"),
        }
    }

    #[test]
    fn missing_table_entry_is_totality_error() {
        let raw = RawPhase {
            name: "GAPPY".into(),
            elements: vec![("a".into(), None)],
            defect: vec![("a".into(), 0, None)],
            ops: vec![RawOp { name: "m".into(), arity: 2, span: None, rows: vec![] }],
        };
        let violations = validate(&raw).unwrap_err();
        assert!(violations.iter().any(|v| v.code() == "TotalityError"));
    }

    #[test]
    fn duplicate_and_unknown_identifiers() {
        let raw = RawPhase {
            name: "X".into(),
            elements: vec![("a".into(), None), ("a".into(), None)],
            defect: vec![("a".into(), 0, None), ("z".into(), 0, None)],
            ops: vec![],
        };
        let violations = validate(&raw).unwrap_err();
        assert!(violations.iter().any(|v| v.code() == "DuplicateIdentifier"));
        assert!(violations.iter().any(|v| v.code() == "UnknownIdentifier"));
    }

    #[test]
    fn defect_cap_enforced() {
        let raw = RawPhase {
            name: "HIGH".into(),
            elements: vec![("a".into(), None)],
            defect: vec![("a".into(), MAX_DEFECT + 1, None)],
            ops: vec![],
        };
        let violations = validate(&raw).unwrap_err();
        assert!(violations.iter().any(|v| v.code() == "DefectOutOfRange"));
    }

    #[test]
    fn every_stratum_is_closed_for_positive_arity() {
        // consequence of monotonicity; checked exhaustively on MAX3
        let p = max3();
        for i in 0..=p.max_defect() {
            assert!(p.closure_escape(p.stratum_mask(i)).is_none(), "stratum {i} not closed");
        }
    }

    #[test]
    fn nullary_constant_is_exempt_from_monotonicity() {
        let p = Phase::assemble(
            "CONST",
            vec!["a".into(), "b".into()],
            Signature::new(&[("c", 0), ("m", 2)]),
            vec![vec![0], vec![0, 1, 1, 1]],
            vec![0, 1],
        )
        .expect("constant of defect 0 is fine");
        // the defect-1 stratum is not closed under the nullary constant, which
        // induced() must surface as an error
        let err = p.induced(&[1], "SUB").unwrap_err();
        assert!(matches!(err, crate::error::PhaselabError::SubphaseNotClosed { .. }));
    }

    #[test]
    fn induced_subphase_on_stratum() {
        let p = max3();
        let sub = p.induced(&[1, 2], "CORE").unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.defects(), &[1, 2]);
        assert_eq!(sub.table(0), &[0, 1, 1, 1]);
    }

    #[test]
    fn tuple_codec_round_trip() {
        let mut out = [0usize; 3];
        for idx in 0..27 {
            decode_tuple(3, 3, idx, &mut out);
            assert_eq!(encode_tuple(3, &out), idx);
        }
    }

    #[test]
    fn gap_in_defect_values_is_allowed() {
        let p = phase_from("GAP", &[0, 2], &[0, 1, 1, 1]);
        assert_eq!(p.max_defect(), 2);
        assert!(p.stratum_members(1).contains(&1));
    }

    #[test]
    fn t1_is_minimal() {
        assert_eq!(t1().n(), 1);
    }
}
