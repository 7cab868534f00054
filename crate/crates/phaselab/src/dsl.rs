//! The `.phase` text format.
//!
//! Grammar (normative):
//!
//! ```text
//! phase <Ident> {
//!   elements: <Ident>+ ;
//!   defect: (<Ident>=<Nat>)+ ;
//!   (op <Ident>/<Nat> { (<Ident>{arity} = <Ident> ;)* })*
//!   (order { (<Ident> <= <Ident> ;)* })?
//! }
//! ```
//!
//! `#` starts a comment to end of line; whitespace between tokens is
//! insignificant; identifiers match `[A-Za-z_][A-Za-z0-9_]*`. Every element
//! appears in `defect` exactly once and every operation table lists every
//! tuple exactly once (a missing tuple surfaces as a `TotalityError` from
//! validation, carrying the operation header's span). The optional `order`
//! block feeds the 2-categorical checks.

use crate::phase::{self, Phase, RawOp, RawPhase, RawRow, Violation};
use crate::span::SourceSpan;
use thiserror::Error;

/// Parse result: the validated phase plus the optional order generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPhase {
    pub phase: Phase,
    /// `Some(pairs)` when an `order { .. }` block is present (possibly empty,
    /// meaning the discrete order); `None` when the block is absent.
    pub order: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("element `{0}` listed more than once in defect")]
    DuplicateDefect(String),
    #[error("{}", format_violations(.0))]
    Validation(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl ParseError {
    pub fn violations(&self) -> &[Violation] {
        match &self.kind {
            ParseErrorKind::Validation(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Eq,
    Slash,
    Le,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(v) => write!(f, "`{v}`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Le => write!(f, "`<=`"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        next
    }

    fn tokens(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // skip whitespace and comments
            loop {
                match self.chars.peek() {
                    Some(&(_, c)) if c.is_whitespace() => {
                        self.bump();
                    }
                    Some(&(_, '#')) => {
                        while let Some(&(_, c)) = self.chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                    _ => break,
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(&(start, c)) = self.chars.peek() else {
                return Ok(out);
            };
            let span1 = SourceSpan::new(line, column, 1);
            match c {
                '{' => {
                    self.bump();
                    out.push((Tok::LBrace, span1));
                }
                '}' => {
                    self.bump();
                    out.push((Tok::RBrace, span1));
                }
                ':' => {
                    self.bump();
                    out.push((Tok::Colon, span1));
                }
                ';' => {
                    self.bump();
                    out.push((Tok::Semi, span1));
                }
                '=' => {
                    self.bump();
                    out.push((Tok::Eq, span1));
                }
                '/' => {
                    self.bump();
                    out.push((Tok::Slash, span1));
                }
                '<' => {
                    self.bump();
                    match self.chars.peek() {
                        Some(&(_, '=')) => {
                            self.bump();
                            out.push((Tok::Le, SourceSpan::new(line, column, 2)));
                        }
                        _ => {
                            return Err(ParseError {
                                kind: ParseErrorKind::Syntax("expected `<=`".into()),
                                span: span1,
                            })
                        }
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut end = start;
                    while let Some(&(i, c)) = self.chars.peek() {
                        if c.is_ascii_digit() {
                            end = i;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..=end];
                    let value: u64 = text.parse().map_err(|_| ParseError {
                        kind: ParseErrorKind::Syntax(format!("number `{text}` out of range")),
                        span: SourceSpan::new(line, column, text.len()),
                    })?;
                    out.push((Tok::Nat(value), SourceSpan::new(line, column, text.len())));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut end = start;
                    while let Some(&(i, c)) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            end = i;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = self.src[start..=end].to_string();
                    let len = text.len();
                    out.push((Tok::Ident(text), SourceSpan::new(line, column, len)));
                }
                other => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                        span: span1,
                    })
                }
            }
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, SourceSpan)> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> SourceSpan {
        self.tokens.get(self.pos).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { kind: ParseErrorKind::Syntax(msg.into()), span: self.here() }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some((t, span)) if *t == tok => {
                let span = *span;
                self.pos += 1;
                Ok(span)
            }
            Some((t, _)) => Err(self.err(format!("expected {tok}, found {t}"))),
            None => Err(self.err(format!("expected {tok}, found end of input"))),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some((Tok::Ident(s), span)) if s == word => {
                let span = *span;
                self.pos += 1;
                Ok(span)
            }
            Some((t, _)) => Err(self.err(format!("expected `{word}`, found {t}"))),
            None => Err(self.err(format!("expected `{word}`, found end of input"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some((Tok::Ident(s), span)) => {
                let out = (s.clone(), *span);
                self.pos += 1;
                Ok(out)
            }
            Some((t, _)) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_nat(&mut self, what: &str) -> Result<(u64, SourceSpan), ParseError> {
        match self.peek() {
            Some((Tok::Nat(v), span)) => {
                let out = (*v, *span);
                self.pos += 1;
                Ok(out)
            }
            Some((t, _)) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some((Tok::Ident(s), _)) if s == word)
    }
}

/// Parse a single `.phase` document into a validated phase plus its optional
/// order block.
pub fn parse(text: &str) -> Result<ParsedPhase, ParseError> {
    let lines = text.lines().count().max(1);
    let last_len = text.lines().last().map(|l| l.chars().count()).unwrap_or(0);
    let end = SourceSpan::new(lines, last_len.max(1), 1);
    let tokens = Lexer::new(text).tokens()?;
    let mut p = Parser { tokens, pos: 0, end };

    p.expect_keyword("phase")?;
    let (name, _) = p.expect_ident("phase name")?;
    p.expect(Tok::LBrace)?;

    p.expect_keyword("elements")?;
    p.expect(Tok::Colon)?;
    let mut raw = RawPhase { name, ..Default::default() };
    while let Some((Tok::Ident(_), _)) = p.peek() {
        let (ident, span) = p.expect_ident("element")?;
        raw.elements.push((ident, Some(span)));
    }
    if raw.elements.is_empty() {
        return Err(p.err("expected at least one element"));
    }
    p.expect(Tok::Semi)?;

    p.expect_keyword("defect")?;
    p.expect(Tok::Colon)?;
    while let Some((Tok::Ident(_), _)) = p.peek() {
        let (ident, span) = p.expect_ident("element")?;
        p.expect(Tok::Eq)?;
        let (value, _) = p.expect_nat("defect value")?;
        if raw.defect.iter().any(|(e, _, _)| *e == ident) {
            return Err(ParseError {
                kind: ParseErrorKind::DuplicateDefect(ident),
                span,
            });
        }
        raw.defect.push((ident, value, Some(span)));
    }
    if raw.defect.is_empty() {
        return Err(p.err("expected at least one defect entry"));
    }
    p.expect(Tok::Semi)?;

    while p.at_keyword("op") {
        let header = p.expect_keyword("op")?;
        let (op_name, _) = p.expect_ident("operation name")?;
        p.expect(Tok::Slash)?;
        let (arity, arity_span) = p.expect_nat("arity")?;
        if arity > 4 {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("arity {arity} not supported (max 4)")),
                span: arity_span,
            });
        }
        let arity = arity as usize;
        p.expect(Tok::LBrace)?;
        let mut rows = Vec::new();
        loop {
            match p.peek() {
                Some((Tok::RBrace, _)) => break,
                Some((Tok::Ident(_) | Tok::Eq, _)) => {
                    let row_span = p.here();
                    let mut inputs = Vec::with_capacity(arity);
                    while let Some((Tok::Ident(_), _)) = p.peek() {
                        let (ident, _) = p.expect_ident("argument")?;
                        inputs.push(ident);
                    }
                    p.expect(Tok::Eq)?;
                    let (output, _) = p.expect_ident("result element")?;
                    p.expect(Tok::Semi)?;
                    rows.push(RawRow { inputs, output, span: Some(row_span) });
                }
                Some((t, _)) => {
                    let msg = format!("expected a table row or `}}`, found {t}");
                    return Err(p.err(msg));
                }
                None => return Err(p.err("unexpected end of input in operation block")),
            }
        }
        p.expect(Tok::RBrace)?;
        raw.ops.push(RawOp { name: op_name, arity, span: Some(header), rows });
    }

    let mut order_pairs: Option<Vec<(String, String, SourceSpan)>> = None;
    if p.at_keyword("order") {
        p.expect_keyword("order")?;
        p.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        while let Some((Tok::Ident(_), _)) = p.peek() {
            let (lhs, span) = p.expect_ident("element")?;
            p.expect(Tok::Le)?;
            let (rhs, _) = p.expect_ident("element")?;
            p.expect(Tok::Semi)?;
            pairs.push((lhs, rhs, span));
        }
        p.expect(Tok::RBrace)?;
        order_pairs = Some(pairs);
    }

    p.expect(Tok::RBrace)?;
    if let Some((t, span)) = p.bump() {
        return Err(ParseError {
            kind: ParseErrorKind::Syntax(format!("unexpected trailing {t}")),
            span,
        });
    }

    let phase = phase::validate(&raw).map_err(|violations| {
        let span = violations.iter().find_map(|v| v.span).unwrap_or(SourceSpan::new(1, 1, 1));
        ParseError { kind: ParseErrorKind::Validation(violations), span }
    })?;

    let order = match order_pairs {
        None => None,
        Some(pairs) => {
            let mut resolved = Vec::with_capacity(pairs.len());
            for (lhs, rhs, span) in pairs {
                let li = phase.element_index(&lhs).ok_or_else(|| ParseError {
                    kind: ParseErrorKind::Validation(vec![Violation::at(
                        phase::ViolationKind::UnknownIdentifier { ident: lhs.clone(), context: "order".into() },
                        Some(span),
                    )]),
                    span,
                })?;
                let ri = phase.element_index(&rhs).ok_or_else(|| ParseError {
                    kind: ParseErrorKind::Validation(vec![Violation::at(
                        phase::ViolationKind::UnknownIdentifier { ident: rhs.clone(), context: "order".into() },
                        Some(span),
                    )]),
                    span,
                })?;
                resolved.push((li, ri));
            }
            Some(resolved)
        }
    };

    Ok(ParsedPhase { phase, order })
}

/// Parse a document and return just the phase, ignoring any order block.
pub fn parse_phase(text: &str) -> Result<Phase, ParseError> {
    parse(text).map(|p| p.phase)
}

/// Render a phase in the canonical layout: elements in declaration order,
/// defect entries in element order, table rows in lexicographic tuple order,
/// a single-row table on one line, trailing newline. `parse(render(p))` is
/// structurally equal to `p`.
pub fn render_phase(p: &Phase) -> String {
    render(p, None)
}

/// Render a phase together with its order generators.
pub fn render_parsed(p: &ParsedPhase) -> String {
    render(&p.phase, p.order.as_deref())
}

fn render(p: &Phase, order: Option<&[(usize, usize)]>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "phase {} {{", p.name());
    let _ = writeln!(out, "  elements: {};", p.elements().join(" "));
    let defects: Vec<String> = (0..p.n())
        .map(|i| format!("{}={}", p.element_name(i), p.defect(i)))
        .collect();
    let _ = writeln!(out, "  defect: {};", defects.join(" "));
    let n = p.n();
    let mut args = [0usize; 16];
    for op_idx in 0..p.op_count() {
        let op = p.op(op_idx);
        let count = phase::tuple_count(n, op.arity) as usize;
        let mut rows = Vec::with_capacity(count);
        for idx in 0..count {
            phase::decode_tuple(n, op.arity, idx, &mut args[..op.arity]);
            let inputs: Vec<&str> = args[..op.arity].iter().map(|&a| p.element_name(a)).collect();
            let output = p.element_name(p.table(op_idx)[idx]);
            if op.arity == 0 {
                rows.push(format!("= {output};"));
            } else {
                rows.push(format!("{} = {output};", inputs.join(" ")));
            }
        }
        if rows.len() == 1 {
            let _ = writeln!(out, "  op {}/{} {{ {} }}", op.name, op.arity, rows[0]);
        } else {
            let _ = writeln!(out, "  op {}/{} {{", op.name, op.arity);
            for row in rows {
                let _ = writeln!(out, "    {row}");
            }
            let _ = writeln!(out, "  }}");
        }
    }
    if let Some(pairs) = order {
        let mut pairs: Vec<(usize, usize)> = pairs.to_vec();
        pairs.sort_unstable();
        pairs.dedup();
        let rows: Vec<String> = pairs
            .iter()
            .map(|&(a, b)| format!("{} <= {};", p.element_name(a), p.element_name(b)))
            .collect();
        if rows.len() == 1 {
            let _ = writeln!(out, "  order {{ {} }}", rows[0]);
        } else {
            let _ = writeln!(out, "  order {{");
            for row in rows {
                let _ = writeln!(out, "    {row}");
            }
            let _ = writeln!(out, "  }}");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::testutil::{max3, t1};

    const MAX3_SRC: &str = "phase MAX3 { elements: e0 e1 e2; defect: e0=0 e1=1 e2=2; \
        op m/2 { e0 e0 = e0; e0 e1 = e1; e0 e2 = e2; e1 e0 = e1; e1 e1 = e1; e1 e2 = e2; \
        e2 e0 = e2; e2 e1 = e2; e2 e2 = e2; } }";

    #[test]
    fn parses_max3() {
        let parsed = parse(MAX3_SRC).unwrap();
        assert_eq!(parsed.phase, max3());
        assert_eq!(parsed.phase.max_defect(), 2);
        assert!(parsed.order.is_none());
    }

    #[test]
    fn empty_element_list_is_a_parse_error() {
        let err = parse("phase X { elements: ; defect: a=0; }").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.span.line, 1);
        assert!(err.span.column > 1);
    }

    #[test]
    fn duplicate_defect_entry() {
        let err =
            parse("phase X { elements: a; defect: a=0 a=1; op m/2 { a a = a; } }").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DuplicateDefect(ref e) if e == "a"));
    }

    #[test]
    fn missing_tuple_surfaces_as_totality_error_with_span() {
        let err = parse("phase X { elements: a b; defect: a=0 b=0; op m/2 { a a = a; } }")
            .unwrap_err();
        match &err.kind {
            ParseErrorKind::Validation(violations) => {
                assert!(violations.iter().all(|v| v.code() == "TotalityError"));
                assert_eq!(violations.len(), 3);
                assert!(violations[0].span.is_some());
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace_are_insignificant() {
        let src = "phase T1 {\n# tiny\n  elements: e0 ;\n  defect: e0 = 0 ;\n  op m/2 { e0 e0 = e0 ; }\n}\n";
        assert_eq!(parse_phase(src).unwrap(), t1());
    }

    #[test]
    fn order_block_is_resolved_to_indices() {
        let src = "phase P { elements: a b; defect: a=0 b=0; op m/2 { a a = a; a b = b; b a = b; b b = b; } order { a <= b; } }";
        let parsed = parse(src).unwrap();
        assert_eq!(parsed.order, Some(vec![(0, 1)]));
    }

    #[test]
    fn empty_order_block_is_discrete_not_missing() {
        let src = "phase P { elements: a; defect: a=0; op m/2 { a a = a; } order { } }";
        let parsed = parse(src).unwrap();
        assert_eq!(parsed.order, Some(vec![]));
    }

    #[test]
    fn round_trip_max3() {
        let p = max3();
        let text = render_phase(&p);
        let back = parse_phase(&text).unwrap();
        assert_eq!(back, p);
        // determinism: rendering twice is byte-identical
        assert_eq!(text, render_phase(&back));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn t1_renders_as_five_lines_with_one_row() {
        let text = render_phase(&t1());
        assert_eq!(text.lines().count(), 5, "got:\n{text}");
        assert_eq!(text.matches('=').count(), 2); // one defect entry + one table row
    }

    #[test]
    fn nullary_operation_round_trips() {
        let src = "phase C { elements: a b; defect: a=0 b=1; op c/0 { = a; } op m/2 { a a = a; a b = b; b a = b; b b = b; } }";
        let p = parse_phase(src).unwrap();
        assert_eq!(p.op(0).arity, 0);
        assert_eq!(p.apply(0, &[]), 0);
        let rendered = render_phase(&p);
        assert_eq!(parse_phase(&rendered).unwrap(), p);
    }

    #[test]
    fn unknown_identifier_in_table_has_span() {
        let err = parse("phase X { elements: a; defect: a=0; op m/2 { a zz = a; } }").unwrap_err();
        match err.kind {
            ParseErrorKind::Validation(violations) => {
                assert!(violations.iter().any(|v| v.code() == "UnknownIdentifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_rejected() {
        let src = format!("{MAX3_SRC} phase");
        assert!(parse(&src).is_err());
    }

    #[test]
    fn ordered_phase_round_trips_with_its_generators() {
        let src = "phase P { elements: a b c; defect: a=0 b=0 c=0; \
            op m/2 { a a = a; a b = b; a c = c; b a = b; b b = b; b c = c; \
            c a = c; c b = c; c c = c; } order { a <= b; b <= c; } }";
        let parsed = parse(src).unwrap();
        let text = render_parsed(&parsed);
        let back = parse(&text).unwrap();
        assert_eq!(back, parsed);
        assert!(text.contains("order {"));
    }
}
