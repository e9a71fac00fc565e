use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::error::{AmrError, AmrWarning};

/// A node identifier (the variable of a PENMAN instance).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Plus => "+",
            Polarity::Minus => "-",
        }
    }
}

impl Serialize for Polarity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Imperative,
    Expressive,
    Interrogative,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "imperative" => Some(Mode::Imperative),
            "expressive" => Some(Mode::Expressive),
            "interrogative" => Some(Mode::Interrogative),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Imperative => "imperative",
            Mode::Expressive => "expressive",
            Mode::Interrogative => "interrogative",
        }
    }
}

/// A numeric constant. The surface text is kept verbatim so that
/// serialization is bit-exact; `value` is the exact rational reading when
/// it fits in 64-bit numerator/denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Number {
    text: String,
    value: Option<Ratio<i64>>,
}

impl Number {
    pub fn parse(text: &str) -> Option<Number> {
        if !looks_numeric(text) {
            return None;
        }
        Some(Number {
            text: text.to_string(),
            value: decimal_to_ratio(text),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> Option<Ratio<i64>> {
        self.value
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

fn looks_numeric(text: &str) -> bool {
    let body = text.strip_prefix(['-', '+']).unwrap_or(text);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = match frac {
        Some(f) => (digits(int) || int.is_empty()) && (digits(f) || (f.is_empty() && digits(int))),
        None => digits(int),
    };
    let exponent_ok = match exponent {
        Some(e) => digits(e.strip_prefix(['-', '+']).unwrap_or(e)),
        None => true,
    };
    mantissa_ok && exponent_ok
}

fn decimal_to_ratio(text: &str) -> Option<Ratio<i64>> {
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut numer: i64 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        numer = numer.checked_mul(10)?.checked_add(i64::from(b - b'0'))?;
    }
    let scale = exponent - frac.len() as i32;
    let pow = 10i64.checked_pow(scale.unsigned_abs())?;
    let mut r = if scale >= 0 {
        Ratio::from_integer(numer.checked_mul(pow)?)
    } else {
        Ratio::new(numer, pow)
    };
    if negative {
        r = -r;
    }
    Some(r)
}

/// A non-node value at the end of an edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Constant {
    Symbol(String),
    #[serde(rename = "string")]
    Str(String),
    Number(Number),
    Polarity(Polarity),
    Mode(Mode),
}

impl Constant {
    /// Classifies an unquoted token appearing as the value of `role`.
    /// Returns `None` when the role demands a value the token is not.
    pub fn from_token(role: &str, token: &str) -> Option<Constant> {
        if role.eq_ignore_ascii_case("mode") {
            return Mode::parse(token).map(Constant::Mode);
        }
        match token {
            "+" => return Some(Constant::Polarity(Polarity::Plus)),
            "-" => return Some(Constant::Polarity(Polarity::Minus)),
            _ => {}
        }
        if let Some(n) = Number::parse(token) {
            return Some(Constant::Number(n));
        }
        Some(Constant::Symbol(token.to_string()))
    }

    /// Surface form as it appears in PENMAN text.
    pub fn surface(&self) -> String {
        match self {
            Constant::Symbol(s) => s.clone(),
            Constant::Str(s) => quote(s),
            Constant::Number(n) => n.text.clone(),
            Constant::Polarity(p) => p.symbol().to_string(),
            Constant::Mode(m) => m.as_str().to_string(),
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Node(Var),
    Const(Constant),
}

impl Target {
    pub fn as_node(&self) -> Option<&Var> {
        match self {
            Target::Node(v) => Some(v),
            Target::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Constant> {
        match self {
            Target::Const(c) => Some(c),
            Target::Node(_) => None,
        }
    }
}

/// An edge as written: `source` is the enclosing node, and `role` keeps its
/// surface form (an inverse role such as `ARG1-of` is not flipped here).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub source: Var,
    pub role: String,
    pub target: Target,
}

/// Splits an inverse role into its forward form.
///
/// `consist-of` is a forward role in AMR, so only `consist-of-of` inverts it.
pub fn normalize_role(role: &str) -> (&str, bool) {
    if role.eq_ignore_ascii_case("consist-of") {
        return (role, false);
    }
    match role.len().checked_sub(3) {
        Some(cut) if cut > 0 && role[cut..].eq_ignore_ascii_case("-of") => (&role[..cut], true),
        _ => (role, false),
    }
}

/// A rooted, labeled, directed graph of concepts, roles, and constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmrGraph {
    root: Var,
    instances: IndexMap<Var, String>,
    edges: Vec<Edge>,
}

impl AmrGraph {
    pub fn new(root: impl Into<Var>, concept: impl Into<String>) -> Result<Self, AmrError> {
        let root = root.into();
        let concept = concept.into();
        if concept.is_empty() {
            return Err(AmrError::EmptyConcept { var: root.to_string() });
        }
        let mut instances = IndexMap::new();
        instances.insert(root.clone(), concept);
        Ok(AmrGraph {
            root,
            instances,
            edges: Vec::new(),
        })
    }

    pub fn root(&self) -> &Var {
        &self.root
    }

    pub fn root_concept(&self) -> &str {
        &self.instances[&self.root]
    }

    pub fn instances(&self) -> &IndexMap<Var, String> {
        &self.instances
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn concept(&self, var: &Var) -> Option<&str> {
        self.instances.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.instances.contains_key(var)
    }

    /// Outgoing edges of `var` in stored order.
    pub fn outgoing<'a>(&'a self, var: &'a Var) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.source == var)
    }

    /// First outgoing edge of `var` whose role matches case-insensitively.
    pub fn child<'a>(&'a self, var: &Var, role: &str) -> Option<&'a Target> {
        self.edges
            .iter()
            .find(|e| &e.source == var && e.role.eq_ignore_ascii_case(role))
            .map(|e| &e.target)
    }

    pub fn add_node(&mut self, var: impl Into<Var>, concept: impl Into<String>) -> Result<(), AmrError> {
        let var = var.into();
        let concept = concept.into();
        if concept.is_empty() {
            return Err(AmrError::EmptyConcept { var: var.to_string() });
        }
        if self.instances.contains_key(&var) {
            return Err(AmrError::DuplicateVariable { var: var.to_string(), at: None });
        }
        self.instances.insert(var, concept);
        Ok(())
    }

    pub fn add_edge(&mut self, source: impl Into<Var>, role: impl Into<String>, target: Target) -> Result<(), AmrError> {
        let source = source.into();
        if !self.contains(&source) {
            return Err(AmrError::UnknownNode { var: source.to_string() });
        }
        if let Target::Node(t) = &target {
            if !self.contains(t) {
                return Err(AmrError::UnknownNode { var: t.to_string() });
            }
        }
        self.edges.push(Edge {
            source,
            role: role.into(),
            target,
        });
        Ok(())
    }

    /// Inserts an edge before the first outgoing edge of its source, so it
    /// is written first on that node.
    pub fn prepend_edge(&mut self, source: impl Into<Var>, role: impl Into<String>, target: Target) -> Result<(), AmrError> {
        let source = source.into();
        self.add_edge(source.clone(), role, target)?;
        let edge = self.edges.pop().expect("just pushed");
        let at = self.edges.iter().position(|e| e.source == source).unwrap_or(self.edges.len());
        self.edges.insert(at, edge);
        Ok(())
    }

    /// Stable-sorts the outgoing edges of `var` by `key`, leaving every
    /// other edge where it is.
    pub fn sort_outgoing_by_key<K: Ord>(&mut self, var: &Var, mut key: impl FnMut(&Edge) -> K) {
        let slots: Vec<usize> = (0..self.edges.len()).filter(|&i| &self.edges[i].source == var).collect();
        let mut mine: Vec<Edge> = slots.iter().map(|&i| self.edges[i].clone()).collect();
        mine.sort_by_key(|e| key(e));
        for (slot, e) in slots.into_iter().zip(mine) {
            self.edges[slot] = e;
        }
    }

    /// An unused variable built from the first letter of `concept`: the bare
    /// letter if free, else the letter followed by 2, 3, ...
    pub fn fresh_var(&self, concept: &str) -> Var {
        let letter = concept
            .chars()
            .next()
            .filter(char::is_ascii_alphabetic)
            .map_or('x', |c| c.to_ascii_lowercase());
        let bare = Var::new(letter.to_string());
        if !self.contains(&bare) {
            return bare;
        }
        (2..)
            .map(|n| Var::new(format!("{letter}{n}")))
            .find(|v| !self.contains(v))
            .expect("unbounded search")
    }

    pub fn set_concept(&mut self, var: &Var, concept: impl Into<String>) -> Result<(), AmrError> {
        let concept = concept.into();
        if concept.is_empty() {
            return Err(AmrError::EmptyConcept { var: var.to_string() });
        }
        match self.instances.get_mut(var) {
            Some(c) => {
                *c = concept;
                Ok(())
            }
            None => Err(AmrError::UnknownNode { var: var.to_string() }),
        }
    }

    pub fn retain_edges(&mut self, keep: impl FnMut(&Edge) -> bool) {
        self.edges.retain(keep);
    }

    pub fn edges_mut(&mut self) -> impl Iterator<Item = &mut Edge> {
        self.edges.iter_mut()
    }

    /// Redirects every reference to `old` onto `new` and drops `old`'s
    /// instance. Outgoing edges of `old` move to `new`.
    pub fn merge_node_into(&mut self, old: &Var, new: &Var) -> Result<(), AmrError> {
        if !self.contains(new) {
            return Err(AmrError::UnknownNode { var: new.to_string() });
        }
        if self.instances.shift_remove(old).is_none() {
            return Err(AmrError::UnknownNode { var: old.to_string() });
        }
        for e in &mut self.edges {
            if &e.source == old {
                e.source = new.clone();
            }
            if e.target.as_node() == Some(old) {
                e.target = Target::Node(new.clone());
            }
        }
        if &self.root == old {
            self.root = new.clone();
        }
        Ok(())
    }

    /// Removes nodes no longer reachable from the root, along with their edges.
    pub fn prune_unreachable(&mut self) {
        let reachable: HashSet<Var> = self.traversal_order().into_iter().collect();
        self.instances.retain(|v, _| reachable.contains(v));
        self.edges.retain(|e| reachable.contains(&e.source));
    }

    /// Moves the root to `new_root`, which must already be a node.
    pub fn set_root(&mut self, new_root: &Var) -> Result<(), AmrError> {
        if !self.contains(new_root) {
            return Err(AmrError::UnknownNode { var: new_root.to_string() });
        }
        self.root = new_root.clone();
        Ok(())
    }

    /// Nodes in depth-first first-mention order from the root, following
    /// edges as written. This is the order serialization introduces them.
    pub fn traversal_order(&self) -> Vec<Var> {
        let mut by_source: HashMap<&Var, Vec<&Var>> = HashMap::new();
        for e in &self.edges {
            if let Target::Node(t) = &e.target {
                by_source.entry(&e.source).or_default().push(t);
            }
        }
        let mut seen = HashSet::new();
        let mut order = Vec::with_capacity(self.instances.len());
        let mut stack = vec![&self.root];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            order.push(v.clone());
            if let Some(children) = by_source.get(v) {
                for c in children.iter().rev() {
                    if !seen.contains(*c) {
                        stack.push(c);
                    }
                }
            }
        }
        order
    }

    /// Checks reachability and acyclicity. Cycles are errors when `strict`,
    /// warnings otherwise.
    pub fn check(&self, strict: bool) -> Result<Vec<AmrWarning>, AmrError> {
        let order = self.traversal_order();
        if order.len() != self.instances.len() {
            let reached: HashSet<&Var> = order.iter().collect();
            let missing = self.instances.keys().find(|v| !reached.contains(v)).expect("some node unreached");
            return Err(AmrError::Unreachable { var: missing.to_string() });
        }
        match self.find_cycle() {
            Some(path) if strict => Err(AmrError::Cycle { path }),
            Some(path) => Ok(vec![AmrWarning::Cycle { path }]),
            None => Ok(Vec::new()),
        }
    }

    /// Finds a directed cycle over the inverse-normalized edges, returning
    /// the variables along it (first repeated at the end).
    pub fn find_cycle(&self) -> Option<Vec<String>> {
        let mut adj: IndexMap<&Var, Vec<&Var>> = self.instances.keys().map(|v| (v, Vec::new())).collect();
        for e in &self.edges {
            if let Target::Node(t) = &e.target {
                let (_, inverted) = normalize_role(&e.role);
                let (from, to) = if inverted { (t, &e.source) } else { (&e.source, t) };
                adj.get_mut(from).expect("edge source is an instance").push(to);
            }
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let mut color: HashMap<&Var, Color> = adj.keys().map(|v| (*v, Color::White)).collect();
        for start in adj.keys() {
            if color[start] != Color::White {
                continue;
            }
            // iterative DFS keeping the grey path explicitly
            let mut path: Vec<&Var> = vec![start];
            let mut cursor: Vec<usize> = vec![0];
            color.insert(start, Color::Grey);
            while let Some(&node) = path.last() {
                let i = *cursor.last().unwrap();
                let next = adj[node].get(i).copied();
                match next {
                    Some(n) => {
                        *cursor.last_mut().unwrap() += 1;
                        match color[n] {
                            Color::White => {
                                color.insert(n, Color::Grey);
                                path.push(n);
                                cursor.push(0);
                            }
                            Color::Grey => {
                                let from = path.iter().position(|v| *v == n).unwrap();
                                let mut cyc: Vec<String> = path[from..].iter().map(|v| v.to_string()).collect();
                                cyc.push(n.to_string());
                                return Some(cyc);
                            }
                            Color::Black => {}
                        }
                    }
                    None => {
                        color.insert(node, Color::Black);
                        path.pop();
                        cursor.pop();
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_text_and_value() {
        let n = Number::parse("10").unwrap();
        assert_eq!(n.text(), "10");
        assert_eq!(n.value(), Some(Ratio::from_integer(10)));
        let n = Number::parse("-2.50").unwrap();
        assert_eq!(n.text(), "-2.50");
        assert_eq!(n.value(), Some(Ratio::new(-5, 2)));
        let n = Number::parse("1e3").unwrap();
        assert_eq!(n.value(), Some(Ratio::from_integer(1000)));
        assert!(Number::parse("door").is_none());
        assert!(Number::parse("-").is_none());
        assert!(Number::parse("1.2.3").is_none());
    }

    #[test]
    fn constant_classification() {
        assert_eq!(Constant::from_token("polarity", "-"), Some(Constant::Polarity(Polarity::Minus)));
        assert_eq!(Constant::from_token("mode", "imperative"), Some(Constant::Mode(Mode::Imperative)));
        assert_eq!(Constant::from_token("mode", "shouty"), None);
        assert!(matches!(Constant::from_token("quant", "10"), Some(Constant::Number(_))));
        assert_eq!(Constant::from_token("name", "foo"), Some(Constant::Symbol("foo".into())));
    }

    #[test]
    fn inverse_roles() {
        assert_eq!(normalize_role("ARG1-of"), ("ARG1", true));
        assert_eq!(normalize_role("ARG0"), ("ARG0", false));
        assert_eq!(normalize_role("consist-of"), ("consist-of", false));
        assert_eq!(normalize_role("consist-of-of"), ("consist-of", true));
        assert_eq!(normalize_role("-of"), ("-of", false));
    }

    #[test]
    fn builder_rejects_bad_input() {
        let mut g = AmrGraph::new("b", "boy").unwrap();
        assert!(matches!(g.add_node("b", "girl"), Err(AmrError::DuplicateVariable { .. })));
        assert!(matches!(g.add_node("g", ""), Err(AmrError::EmptyConcept { .. })));
        assert!(matches!(
            g.add_edge("b", "ARG0", Target::Node("z".into())),
            Err(AmrError::UnknownNode { .. })
        ));
    }

    #[test]
    fn edge_ordering_helpers() {
        let mut g = AmrGraph::new("g", "go-02").unwrap();
        g.add_node("r", "robot").unwrap();
        g.add_edge("g", "time", Target::Const(Constant::Symbol("later".into()))).unwrap();
        g.add_edge("g", "ARG0", Target::Node("r".into())).unwrap();
        g.prepend_edge("g", "completable", Target::Const(Constant::Polarity(Polarity::Plus))).unwrap();
        let roles: Vec<&str> = g.edges().iter().map(|e| e.role.as_str()).collect();
        assert_eq!(roles, ["completable", "time", "ARG0"]);
        g.sort_outgoing_by_key(&Var::new("g"), |e| e.role == "time");
        let roles: Vec<&str> = g.edges().iter().map(|e| e.role.as_str()).collect();
        assert_eq!(roles, ["completable", "ARG0", "time"]);
    }

    #[test]
    fn fresh_vars_skip_taken_names() {
        let mut g = AmrGraph::new("c", "command-SA").unwrap();
        assert_eq!(g.fresh_var("commander").as_str(), "c2");
        g.add_node("c2", "commander").unwrap();
        assert_eq!(g.fresh_var("cone").as_str(), "c3");
        assert_eq!(g.fresh_var("robot").as_str(), "r");
        assert_eq!(g.fresh_var("-").as_str(), "x");
    }

    #[test]
    fn unreachable_node_is_reported() {
        let mut g = AmrGraph::new("a", "alpha").unwrap();
        g.add_node("b", "beta").unwrap();
        assert!(matches!(g.check(true), Err(AmrError::Unreachable { .. })));
    }

    #[test]
    fn cycle_through_forward_edges() {
        let mut g = AmrGraph::new("a", "alpha").unwrap();
        g.add_node("b", "beta").unwrap();
        g.add_edge("a", "ARG0", Target::Node("b".into())).unwrap();
        g.add_edge("b", "ARG1", Target::Node("a".into())).unwrap();
        let err = g.check(true).unwrap_err();
        assert_eq!(err, AmrError::Cycle { path: vec!["a".into(), "b".into(), "a".into()] });
        assert_eq!(g.check(false).unwrap().len(), 1);
    }

    #[test]
    fn inverse_edge_is_not_a_cycle() {
        // a :ARG0 b, b :ARG0-of a  normalizes to a->b twice
        let mut g = AmrGraph::new("a", "alpha").unwrap();
        g.add_node("b", "beta").unwrap();
        g.add_edge("a", "ARG0", Target::Node("b".into())).unwrap();
        g.add_edge("b", "ARG0-of", Target::Node("a".into())).unwrap();
        assert!(g.check(true).unwrap().is_empty());
    }
}
