//! PENMAN reading and writing.
//!
//! A bare value token resolves to a node reference when it names a variable
//! introduced anywhere in the same graph, or when it has the shape of an AMR
//! variable (one ASCII lowercase letter followed by digits). Any other bare
//! token is a constant. A variable-shaped token that is never introduced is a
//! dangling reference.

use std::collections::HashMap;

use super::error::{AmrError, AmrWarning, Position};
use super::graph::{quote, AmrGraph, Constant, Edge, Target, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject cyclic graphs instead of warning about them.
    pub strict_acyclic: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict_acyclic: true }
    }
}

/// Parses exactly one PENMAN graph in strict mode.
pub fn parse_penman(text: &str) -> Result<AmrGraph, AmrError> {
    parse_penman_with(text, ParseOptions::default()).map(|(g, _)| g)
}

pub fn parse_penman_with(text: &str, opts: ParseOptions) -> Result<(AmrGraph, Vec<AmrWarning>), AmrError> {
    let mut p = Parser::new(text);
    p.skip_space();
    let raw = p.graph()?;
    p.skip_space();
    if let Some(tok) = p.peek_token() {
        return Err(p.syntax_at(tok.start, "end of input", &tok.describe()));
    }
    let graph = raw.resolve(text)?;
    let warnings = graph.check(opts.strict_acyclic)?;
    Ok((graph, warnings))
}

/// One graph of a multi-graph `.amr` file plus its `# ::key value` metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct AmrEntry {
    pub id: Option<String>,
    pub metadata: Vec<(String, String)>,
    pub graph: AmrGraph,
    pub warnings: Vec<AmrWarning>,
}

/// Parses a `.amr` document: graphs separated by blank lines, `#` comment
/// lines allowed between graphs, `# ::id` naming the following graph.
pub fn parse_amr_document(text: &str, opts: ParseOptions) -> Result<Vec<AmrEntry>, AmrError> {
    let mut p = Parser::new(text);
    let mut entries = Vec::new();
    let mut metadata: Vec<(String, String)> = Vec::new();
    loop {
        p.skip_whitespace_only();
        match p.peek_byte() {
            None => break,
            Some(b'#') => {
                let line = p.take_line();
                metadata.extend(parse_metadata(line));
            }
            Some(_) => {
                let raw = p.graph()?;
                let graph = raw.resolve(text)?;
                let warnings = graph.check(opts.strict_acyclic)?;
                let id = metadata.iter().find(|(k, _)| k == "id").map(|(_, v)| v.clone());
                entries.push(AmrEntry {
                    id,
                    metadata: std::mem::take(&mut metadata),
                    graph,
                    warnings,
                });
            }
        }
    }
    Ok(entries)
}

fn parse_metadata(line: &str) -> Vec<(String, String)> {
    let body = line.trim_start_matches('#');
    let mut out = Vec::new();
    for chunk in body.split("::").skip(1) {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (key, value) = chunk.split_once(char::is_whitespace).unwrap_or((chunk, ""));
        out.push((key.to_string(), value.trim().to_string()));
    }
    out
}

/// Writes a graph in PENMAN notation: the first mention of a node opens its
/// subtree, later mentions are bare variables, children keep stored edge
/// order, and each edge sits on its own line indented two spaces per level.
pub fn serialize_penman(graph: &AmrGraph) -> String {
    let mut out = String::new();
    let mut seen = std::collections::HashSet::new();
    write_node(graph, graph.root(), 0, &mut seen, &mut out);
    out
}

fn write_node<'a>(
    graph: &'a AmrGraph,
    var: &'a Var,
    depth: usize,
    seen: &mut std::collections::HashSet<&'a Var>,
    out: &mut String,
) {
    seen.insert(var);
    out.push('(');
    out.push_str(var.as_str());
    out.push_str(" / ");
    out.push_str(&render_concept(graph.concept(var).unwrap_or("")));
    for edge in graph.outgoing(var) {
        out.push('\n');
        for _ in 0..=depth {
            out.push_str("  ");
        }
        out.push(':');
        out.push_str(&edge.role);
        out.push(' ');
        match &edge.target {
            Target::Node(t) if !seen.contains(t) => write_node(graph, t, depth + 1, seen, out),
            Target::Node(t) => out.push_str(t.as_str()),
            Target::Const(c) => out.push_str(&c.surface()),
        }
    }
    out.push(')');
}

fn render_concept(concept: &str) -> String {
    let plain = !concept.is_empty()
        && !concept
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/') || c == ':');
    if plain {
        concept.to_string()
    } else {
        quote(concept)
    }
}

pub(crate) fn is_variable_shaped(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Open,
    Close,
    Slash,
    Role(String),
    Quoted(String),
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    start: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokKind::Open => "`(`".into(),
            TokKind::Close => "`)`".into(),
            TokKind::Slash => "`/`".into(),
            TokKind::Role(r) => format!("role `:{r}`"),
            TokKind::Quoted(s) => format!("string {}", quote(s)),
            TokKind::Atom(a) => format!("`{a}`"),
        }
    }
}

enum RawValue {
    Node(usize),
    Quoted(String),
    Atom(String, usize),
}

struct RawEdge {
    source: usize,
    role: String,
    value: RawValue,
}

/// A graph before bare tokens are resolved to nodes or constants.
struct RawGraph {
    nodes: Vec<(String, String, usize)>,
    edges: Vec<RawEdge>,
}

impl RawGraph {
    fn resolve(self, text: &str) -> Result<AmrGraph, AmrError> {
        let mut defined: HashMap<&str, usize> = HashMap::new();
        for (i, (var, _, pos)) in self.nodes.iter().enumerate() {
            if defined.insert(var.as_str(), i).is_some() {
                return Err(AmrError::DuplicateVariable {
                    var: var.clone(),
                    at: Some(Position::locate(text, *pos)),
                });
            }
        }
        let (root_var, root_concept, _) = &self.nodes[0];
        let mut graph = AmrGraph::new(root_var.as_str(), root_concept.as_str())?;
        for (var, concept, _) in &self.nodes[1..] {
            graph.add_node(var.as_str(), concept.as_str())?;
        }
        for e in self.edges {
            let source = Var::new(self.nodes[e.source].0.clone());
            let target = match e.value {
                RawValue::Node(i) => Target::Node(Var::new(self.nodes[i].0.clone())),
                RawValue::Quoted(s) => Target::Const(Constant::Str(s)),
                RawValue::Atom(tok, pos) => {
                    if defined.contains_key(tok.as_str()) {
                        Target::Node(Var::new(tok))
                    } else if is_variable_shaped(&tok) && !e.role.eq_ignore_ascii_case("mode") {
                        return Err(AmrError::DanglingVariable {
                            var: tok,
                            at: Some(Position::locate(text, pos)),
                        });
                    } else {
                        match Constant::from_token(&e.role, &tok) {
                            Some(c) => Target::Const(c),
                            None => {
                                return Err(AmrError::InvalidConstant {
                                    role: e.role,
                                    value: tok,
                                    at: Some(Position::locate(text, pos)),
                                })
                            }
                        }
                    }
                }
            };
            graph.add_edge(source, e.role, target)?;
        }
        Ok(graph)
    }
}

struct Parser<'t> {
    text: &'t str,
    pos: usize,
}

impl<'t> Parser<'t> {
    fn new(text: &'t str) -> Self {
        Parser { text, pos: 0 }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_whitespace_only(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    /// Whitespace and `#` comment lines.
    fn skip_space(&mut self) {
        loop {
            self.skip_whitespace_only();
            if self.peek_byte() == Some(b'#') {
                self.take_line();
            } else {
                break;
            }
        }
    }

    fn take_line(&mut self) -> &'t str {
        let rest = &self.text[self.pos..];
        let end = rest.find('\n').unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn syntax_at(&self, offset: usize, expected: &str, found: &str) -> AmrError {
        AmrError::Syntax {
            at: Position::locate(self.text, offset),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    fn eof_error(&self, expected: &str) -> AmrError {
        self.syntax_at(self.text.len(), expected, "end of input")
    }

    fn lex(&self, from: usize) -> Option<(Token, usize)> {
        let rest = &self.text[from..];
        let skipped = rest.len() - rest.trim_start().len();
        let start = from + skipped;
        let rest = &self.text[start..];
        let first = rest.chars().next()?;
        let (kind, len) = match first {
            '(' => (TokKind::Open, 1),
            ')' => (TokKind::Close, 1),
            '/' => (TokKind::Slash, 1),
            '"' => {
                let mut out = String::new();
                let mut escaped = false;
                let mut end = None;
                for (i, c) in rest.char_indices().skip(1) {
                    if escaped {
                        out.push(c);
                        escaped = false;
                    } else if c == '\\' {
                        escaped = true;
                    } else if c == '"' {
                        end = Some(i + 1);
                        break;
                    } else {
                        out.push(c);
                    }
                }
                match end {
                    Some(len) => (TokKind::Quoted(out), len),
                    // unterminated: hand back the raw text so the caller reports it
                    None => (TokKind::Atom(rest.to_string()), rest.len()),
                }
            }
            ':' => {
                let len = rest[1..].find(is_delimiter).map_or(rest.len(), |i| i + 1);
                (TokKind::Role(rest[1..len].to_string()), len)
            }
            _ => {
                let len = rest.find(is_delimiter).unwrap_or(rest.len());
                (TokKind::Atom(rest[..len].to_string()), len)
            }
        };
        Some((Token { kind, start }, start + len))
    }

    fn peek_token(&self) -> Option<Token> {
        self.lex(self.pos).map(|(t, _)| t)
    }

    fn next_token(&mut self) -> Option<Token> {
        let (tok, end) = self.lex(self.pos)?;
        self.pos = end;
        Some(tok)
    }

    fn expect(&mut self, want: TokKind, expected: &str) -> Result<Token, AmrError> {
        match self.next_token() {
            Some(t) if t.kind == want => Ok(t),
            Some(t) => Err(self.syntax_at(t.start, expected, &t.describe())),
            None => Err(self.eof_error(expected)),
        }
    }

    fn graph(&mut self) -> Result<RawGraph, AmrError> {
        let mut raw = RawGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        self.node(&mut raw)?;
        Ok(raw)
    }

    fn node(&mut self, raw: &mut RawGraph) -> Result<usize, AmrError> {
        self.expect(TokKind::Open, "`(`")?;
        let (var, var_pos) = match self.next_token() {
            Some(Token {
                kind: TokKind::Atom(a),
                start,
            }) => (a, start),
            Some(t) => return Err(self.syntax_at(t.start, "variable", &t.describe())),
            None => return Err(self.eof_error("variable")),
        };
        self.expect(TokKind::Slash, "`/`")?;
        let concept = match self.next_token() {
            Some(Token {
                kind: TokKind::Atom(a) | TokKind::Quoted(a),
                ..
            }) if !a.is_empty() && !a.starts_with('"') => a,
            Some(t) => return Err(self.syntax_at(t.start, "concept", &t.describe())),
            None => return Err(self.eof_error("concept")),
        };
        let index = raw.nodes.len();
        raw.nodes.push((var, concept, var_pos));
        loop {
            match self.next_token() {
                Some(Token { kind: TokKind::Close, .. }) => return Ok(index),
                Some(Token {
                    kind: TokKind::Role(role),
                    start,
                }) => {
                    if role.is_empty() {
                        return Err(self.syntax_at(start, "role name", "`:`"));
                    }
                    let value = self.value(raw)?;
                    raw.edges.push(RawEdge {
                        source: index,
                        role,
                        value,
                    });
                }
                Some(t) => return Err(self.syntax_at(t.start, "role or `)`", &t.describe())),
                None => return Err(self.eof_error("role or `)`")),
            }
        }
    }

    fn value(&mut self, raw: &mut RawGraph) -> Result<RawValue, AmrError> {
        match self.peek_token() {
            Some(Token { kind: TokKind::Open, .. }) => Ok(RawValue::Node(self.node(raw)?)),
            Some(_) => {
                let t = self.next_token().expect("peeked");
                match t.kind {
                    TokKind::Quoted(s) => Ok(RawValue::Quoted(s)),
                    TokKind::Atom(a) if !a.starts_with('"') => Ok(RawValue::Atom(a, t.start)),
                    _ => Err(self.syntax_at(t.start, "value", &t.describe())),
                }
            }
            None => Err(self.eof_error("value")),
        }
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '/' | '"')
}

impl Edge {
    /// Renders the edge value as it would appear in PENMAN.
    pub fn value_surface(&self) -> String {
        match &self.target {
            Target::Node(v) => v.to_string(),
            Target::Const(c) => c.surface(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::graph::{Mode, Polarity};

    const DRIVE: &str = "(d / drive-01 :mode imperative :ARG0 (y / you) :destination (d2 / door))";

    #[test]
    fn parses_drive_to_the_door() {
        let g = parse_penman(DRIVE).unwrap();
        assert_eq!(g.root().as_str(), "d");
        let inst: Vec<_> = g.instances().iter().map(|(v, c)| (v.as_str(), c.as_str())).collect();
        assert_eq!(inst, vec![("d", "drive-01"), ("y", "you"), ("d2", "door")]);
        let edges: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.source.as_str(), e.role.as_str(), e.value_surface()))
            .collect();
        assert_eq!(
            edges,
            vec![
                ("d", "mode", "imperative".to_string()),
                ("d", "ARG0", "y".to_string()),
                ("d", "destination", "d2".to_string()),
            ]
        );
        assert_eq!(g.edges()[0].target, Target::Const(Constant::Mode(Mode::Imperative)));
    }

    #[test]
    fn single_node() {
        let g = parse_penman("(b / boy)").unwrap();
        assert_eq!(g.instances().len(), 1);
        assert!(g.edges().is_empty());
        assert_eq!(serialize_penman(&g), "(b / boy)");
    }

    #[test]
    fn slash_without_space_and_inline_aspect() {
        let g = parse_penman("(g / go-02 :completable + :ARG4 (d/ door))").unwrap();
        assert_eq!(g.concept(&"d".into()), Some("door"));
        assert_eq!(g.edges()[0].target, Target::Const(Constant::Polarity(Polarity::Plus)));
    }

    #[test]
    fn reference_before_definition() {
        let g = parse_penman("(c / command-00 :ARG1 (g / go-01 :ARG0 r) :ARG2 (r / robot))").unwrap();
        let incoming = g.edges().iter().filter(|e| e.target.as_node().map(Var::as_str) == Some("r")).count();
        assert_eq!(incoming, 2);
    }

    #[test]
    fn duplicate_variable() {
        let err = parse_penman("(x / a :ARG0 (x / b))").unwrap_err();
        assert!(matches!(err, AmrError::DuplicateVariable { ref var, .. } if var == "x"), "{err:?}");
    }

    #[test]
    fn dangling_variable() {
        let err = parse_penman("(a / alpha :ARG0 b2)").unwrap_err();
        match err {
            AmrError::DanglingVariable { var, at } => {
                assert_eq!(var, "b2");
                assert_eq!(at.unwrap().column, 18);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_penman("(a / alpha :ARG0 (b beta))").unwrap_err();
        match err {
            AmrError::Syntax { at, expected, .. } => {
                assert_eq!(expected, "`/`");
                assert_eq!(at.column, 21);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_penman("(a / alpha"), Err(AmrError::Syntax { .. })));
        assert!(matches!(parse_penman("(a / alpha) extra"), Err(AmrError::Syntax { .. })));
        assert!(matches!(parse_penman(""), Err(AmrError::Syntax { .. })));
        assert!(matches!(parse_penman("(a / )"), Err(AmrError::Syntax { .. })));
        assert!(matches!(parse_penman("(a / b :name \"open"), Err(AmrError::Syntax { .. })));
    }

    #[test]
    fn invalid_mode_value() {
        let err = parse_penman("(a / go-02 :mode shouty)").unwrap_err();
        assert!(matches!(err, AmrError::InvalidConstant { .. }), "{err:?}");
    }

    #[test]
    fn strict_cycle_rejected_lenient_warns() {
        let text = "(a / alpha :ARG0 (b / beta :ARG1 a))";
        assert!(matches!(parse_penman(text), Err(AmrError::Cycle { .. })));
        let (_, warnings) = parse_penman_with(text, ParseOptions { strict_acyclic: false }).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn serializer_layout() {
        let g = parse_penman(DRIVE).unwrap();
        assert_eq!(
            serialize_penman(&g),
            "(d / drive-01\n  :mode imperative\n  :ARG0 (y / you)\n  :destination (d2 / door))"
        );
    }

    #[test]
    fn reentrant_second_mention_is_bare() {
        let text = "(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot) \
                    :ARG1 (g / go-02 :completable + :ARG0 r :ARG3 (h / here) :ARG4 (w / wall) \
                    :time (a2 / after :op1 (n / now))))";
        let out = serialize_penman(&parse_penman(text).unwrap());
        assert!(out.contains("\n    :ARG0 r\n"), "{out}");
        assert_eq!(out.matches("(r / robot)").count(), 1);
    }

    #[test]
    fn strings_round_trip() {
        let g = parse_penman(r#"(n / name :op1 "Fido \"the\" bot")"#).unwrap();
        let again = parse_penman(&serialize_penman(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn document_with_metadata_and_comments() {
        let doc = "# a corpus header\n\n# ::id u1 ::snt Drive to the door\n(d / drive-01)\n\n# ::id u2\n(b / boy)\n";
        let entries = parse_amr_document(doc, ParseOptions::default()).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].id.as_deref(), Some("u1"));
        assert!(entries[0].metadata.contains(&("snt".to_string(), "Drive to the door".to_string())));
        assert_eq!(entries[1].id.as_deref(), Some("u2"));
        assert_eq!(entries[1].graph.root_concept(), "boy");
    }

    #[test]
    fn document_error_reports_document_line() {
        let doc = "(a / alpha)\n\n(b / beta :ARG0 (c gamma))\n";
        match parse_amr_document(doc, ParseOptions::default()).unwrap_err() {
            AmrError::Syntax { at, .. } => assert_eq!(at.line, 3),
            other => panic!("{other:?}"),
        }
    }
}
