//! Random graphs that know their own triples, and a brute-force best
//! mapping computed from those triples alone.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

const CONCEPTS: [&str; 5] = ["go-02", "boy", "door", "want-01", "red"];
const ROLES: [&str; 4] = ["ARG0", "ARG1", "mod", "location"];
const ATTRS: [(&str, &str); 3] = [("quant", "3"), ("mod", "blue"), ("polarity", "-")];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum T {
    Inst(usize, String),
    Rel(String, usize, usize),
    Attr(String, usize, String),
}

#[derive(Debug, Clone)]
pub struct RandGraph {
    pub concepts: Vec<String>,
    /// `(parent, role, written inverted)` for every node but the root.
    pub parent: Vec<Option<(usize, String, bool)>>,
    pub extra: Vec<(usize, String, usize)>,
    pub attrs: Vec<(usize, String, String)>,
}

impl RandGraph {
    pub fn random(rng: &mut impl Rng, max_vars: usize) -> RandGraph {
        let n = rng.gen_range(1..=max_vars);
        let concepts = (0..n).map(|_| CONCEPTS[rng.gen_range(0..CONCEPTS.len())].to_string()).collect();
        let parent = (0..n)
            .map(|i| {
                (i > 0).then(|| {
                    let role = ROLES[rng.gen_range(0..ROLES.len())].to_string();
                    (rng.gen_range(0..i), role, rng.gen_bool(0.2))
                })
            })
            .collect();
        let extra = (0..rng.gen_range(0..3))
            .filter_map(|_| {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                (a < b).then(|| (a, ROLES[rng.gen_range(0..ROLES.len())].to_string(), b))
            })
            .collect();
        let attrs = (0..rng.gen_range(0..3))
            .map(|_| {
                let (r, v) = ATTRS[rng.gen_range(0..ATTRS.len())];
                (rng.gen_range(0..n), r.to_string(), v.to_string())
            })
            .collect();
        RandGraph {
            concepts,
            parent,
            extra,
            attrs,
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn triples(&self) -> Vec<T> {
        let mut out: Vec<T> = self.concepts.iter().enumerate().map(|(i, c)| T::Inst(i, c.clone())).collect();
        for (child, p) in self.parent.iter().enumerate() {
            if let Some((par, role, inverted)) = p {
                out.push(if *inverted {
                    T::Rel(role.to_lowercase(), child, *par)
                } else {
                    T::Rel(role.to_lowercase(), *par, child)
                });
            }
        }
        for (a, role, b) in &self.extra {
            out.push(T::Rel(role.to_lowercase(), *a, *b));
        }
        for (n, role, v) in &self.attrs {
            out.push(T::Attr(role.clone(), *n, v.clone()));
        }
        out
    }

    pub fn penman(&self, prefix: &str) -> String {
        self.node(0, prefix)
    }

    fn node(&self, i: usize, prefix: &str) -> String {
        let mut s = format!("({prefix}{i} / {}", self.concepts[i]);
        for (n, role, v) in &self.attrs {
            if *n == i {
                s.push_str(&format!(" :{role} {v}"));
            }
        }
        for (a, role, b) in &self.extra {
            if *a == i {
                s.push_str(&format!(" :{role} {prefix}{b}"));
            }
        }
        for (child, p) in self.parent.iter().enumerate() {
            if let Some((par, role, inverted)) = p {
                if *par == i {
                    let r = if *inverted { format!("{role}-of") } else { role.clone() };
                    s.push_str(&format!(" :{r} {}", self.node(child, prefix)));
                }
            }
        }
        s.push(')');
        s
    }
}

fn map_triple(t: &T, f: &[usize]) -> T {
    match t {
        T::Inst(a, c) => T::Inst(f[*a], c.clone()),
        T::Rel(r, a, b) => T::Rel(r.clone(), f[*a], f[*b]),
        T::Attr(r, a, v) => T::Attr(r.clone(), f[*a], v.clone()),
    }
}

fn overlap(a: &[T], b: &[T], f: &[usize]) -> usize {
    let mut pool: HashMap<T, usize> = HashMap::new();
    for t in b {
        *pool.entry(t.clone()).or_insert(0) += 1;
    }
    let mut hits = 0;
    for t in a {
        if let Some(c) = pool.get_mut(&map_triple(t, f)).filter(|c| **c > 0) {
            *c -= 1;
            hits += 1;
        }
    }
    hits
}

fn injections(k: usize, n: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for x in 0..n {
        if !cur.contains(&x) {
            cur.push(x);
            injections(k, n, cur, visit);
            cur.pop();
        }
    }
}

/// Best triple overlap over all injections of the smaller graph's nodes.
pub fn brute_force_matched(a: &RandGraph, b: &RandGraph) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (ts, tl) = (small.triples(), large.triples());
    let mut best = 0;
    injections(small.len(), large.len(), &mut Vec::new(), &mut |f| best = best.max(overlap(&ts, &tl, f)));
    best
}

pub fn f1(matched: usize, left: usize, right: usize) -> f64 {
    if matched == 0 {
        return 0.0;
    }
    let p = matched as f64 / left as f64;
    let r = matched as f64 / right as f64;
    2.0 * p * r / (p + r)
}

/// Parses with cycles allowed; reentrant random graphs may close a loop.
pub fn parse(text: &str) -> hrdialogue::amr::AmrGraph {
    let opts = hrdialogue::amr::ParseOptions { strict_acyclic: false };
    hrdialogue::amr::parse_penman_with(text, opts).expect("generated graph parses").0
}
