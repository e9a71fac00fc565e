//! Smatch: the best triple overlap between two AMR graphs over injective
//! variable mappings.
//!
//! Both routes work from a table of pairwise match weights.
//! [`smatch_exact`] searches every injection with branch-and-bound pruning.
//! [`smatch_hillclimb`] climbs greedily from a concept-aligned start plus
//! seeded random restarts.
//!
//! Roles are compared case-insensitively; concepts and constants are
//! compared exactly. There is no extra root triple.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::amr::{to_triples, AmrGraph, Triple, Var};

/// Default bound on the smaller graph's variable count for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 8;

/// Hard ceiling on the number of injections exhaustive search will visit.
const MAX_INJECTIONS: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmatchError {
    #[error("exhaustive search over {smaller} x {larger} variables exceeds the limit of {limit}")]
    TooLarge { smaller: usize, larger: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingResult {
    /// Variable pairs `(G1, G2)` in G1 instance order.
    pub mapping: Vec<(Var, Var)>,
    pub matched: usize,
    pub left_triples: usize,
    pub right_triples: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MappingResult {
    fn new(mapping: Vec<(Var, Var)>, matched: usize, left: usize, right: usize) -> Self {
        let (precision, recall, f1) = scores(matched, left, right);
        MappingResult {
            mapping,
            matched,
            left_triples: left,
            right_triples: right,
            precision,
            recall,
            f1,
        }
    }
}

/// Precision, recall, and F1 for `matched` of `left` (test) and `right`
/// (gold) triples.
pub fn scores(matched: usize, left: usize, right: usize) -> (f64, f64, f64) {
    let p = if left == 0 { 0.0 } else { matched as f64 / left as f64 };
    let r = if right == 0 { 0.0 } else { matched as f64 / right as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Exhaustive Smatch with the default limit.
pub fn smatch_exact(g1: &AmrGraph, g2: &AmrGraph) -> Result<MappingResult, SmatchError> {
    smatch_exact_with_limit(g1, g2, DEFAULT_EXHAUSTIVE_LIMIT)
}

/// Depth-first search over every maximal injection, pruned by an upper
/// bound on what the unassigned variables can still add. The search starts
/// from the hill-climbing score, so only mappings at least that good are
/// expanded. Among equal scores the mapping whose G2 index vector (in G1
/// instance order, unmapped last) is lexicographically lowest wins.
pub fn smatch_exact_with_limit(g1: &AmrGraph, g2: &AmrGraph, limit: usize) -> Result<MappingResult, SmatchError> {
    let vars1: Vec<&Var> = g1.instances().keys().collect();
    let vars2: Vec<&Var> = g2.instances().keys().collect();
    let (n1, n2) = (vars1.len(), vars2.len());
    let (small, large) = (n1.min(n2), n1.max(n2));
    let space: u128 = (0..small).map(|i| (large - i) as u128).product();
    if small > limit || space > MAX_INJECTIONS {
        return Err(SmatchError::TooLarge {
            smaller: small,
            larger: large,
            limit,
        });
    }

    let table = WeightTable::build(g1, g2);
    let floor = smatch_hillclimb(g1, g2, 1, 0).matched;
    let mut search = Search::new(&table, n1, n2, floor);
    search.run(0, 0, 0);

    let (matched, key) = search.best.expect("the hill-climbing score is reachable");
    let mapping = key
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (vars1[i].clone(), vars2[j].clone())))
        .collect();
    Ok(MappingResult::new(mapping, matched, to_triples(g1).len(), to_triples(g2).len()))
}

/// Role counts for one ordered variable pair.
type Roles = Vec<(String, usize)>;

struct Search<'a> {
    table: &'a WeightTable,
    n2: usize,
    /// G1 relation groups `(other endpoint, forward?, roles)` that close
    /// when variable `i` is assigned, the other endpoint already being.
    closing: Vec<Vec<(usize, bool, &'a Roles)>>,
    /// Most that variables `d..` and the relations they close can add.
    rest: Vec<usize>,
    unmapped_allowed: usize,
    used: Vec<bool>,
    current: Vec<Option<usize>>,
    floor: usize,
    best: Option<(usize, Vec<Option<usize>>)>,
}

impl<'a> Search<'a> {
    fn new(table: &'a WeightTable, n1: usize, n2: usize, floor: usize) -> Self {
        let mut closing = vec![Vec::new(); n1];
        let mut rest = vec![0; n1 + 1];
        for (i, r) in rest.iter_mut().take(n1).enumerate() {
            *r = (0..n2).map(|j| table.unary[i * n2 + j]).max().unwrap_or(0);
        }
        for ((a, b), roles) in &table.relations1 {
            let (late, early, forward) = if a > b { (*a, *b, true) } else { (*b, *a, false) };
            closing[late].push((early, forward, roles));
            rest[late] += roles.iter().map(|(_, c)| c).sum::<usize>();
        }
        for i in (0..n1).rev() {
            rest[i] += rest[i + 1];
        }
        Search {
            table,
            n2,
            closing,
            rest,
            unmapped_allowed: n1.saturating_sub(n2),
            used: vec![false; n2],
            current: vec![None; n1],
            floor,
            best: None,
        }
    }

    fn gain(&self, i: usize, j: usize) -> usize {
        let mut w = self.table.unary[i * self.n2 + j];
        for &(other, forward, roles) in &self.closing[i] {
            let Some(k) = self.current[other] else { continue };
            let (x, y) = if forward { (j, k) } else { (k, j) };
            for (role, c) in roles {
                let g2 = self.table.relations2.get(&(x, y, role.clone())).copied().unwrap_or(0);
                w += (*c).min(g2);
            }
        }
        w
    }

    fn run(&mut self, depth: usize, score: usize, unmapped: usize) {
        let bound = score + self.rest[depth];
        // depth-first order is lexicographic, so a later tie never wins
        if bound < self.floor || (self.best.is_some() && bound <= self.floor) {
            return;
        }
        if depth == self.current.len() {
            self.floor = score;
            self.best = Some((score, self.current.clone()));
            return;
        }
        for j in 0..self.n2 {
            if !self.used[j] {
                let g = self.gain(depth, j);
                self.used[j] = true;
                self.current[depth] = Some(j);
                self.run(depth + 1, score + g, unmapped);
                self.current[depth] = None;
                self.used[j] = false;
            }
        }
        if unmapped < self.unmapped_allowed {
            self.run(depth + 1, score, unmapped + 1);
        }
    }
}

/// Pairwise match weights between variables of the two graphs.
struct WeightTable {
    n2: usize,
    /// `unary[i * n2 + j]`: triples matched by `i -> j` alone (instance,
    /// attributes, self-loops).
    unary: Vec<usize>,
    /// G1 relations between distinct variables, grouped by endpoint pair.
    relations1: Vec<((usize, usize), Roles)>,
    /// G2 relation counts keyed by (source, target, role).
    relations2: HashMap<(usize, usize, String), usize>,
}

impl WeightTable {
    fn build(g1: &AmrGraph, g2: &AmrGraph) -> Self {
        let idx1: HashMap<&Var, usize> = g1.instances().keys().enumerate().map(|(i, v)| (v, i)).collect();
        let idx2: HashMap<&Var, usize> = g2.instances().keys().enumerate().map(|(i, v)| (v, i)).collect();
        let (n1, n2) = (idx1.len(), idx2.len());

        #[derive(Default)]
        struct Side {
            concept: Vec<String>,
            attrs: Vec<HashMap<(String, String), usize>>,
            loops: Vec<HashMap<String, usize>>,
            rels: HashMap<(usize, usize), HashMap<String, usize>>,
        }
        let collect = |g: &AmrGraph, idx: &HashMap<&Var, usize>, n: usize| {
            let mut s = Side {
                concept: g.instances().values().cloned().collect(),
                attrs: vec![HashMap::new(); n],
                loops: vec![HashMap::new(); n],
                rels: HashMap::new(),
            };
            for t in to_triples(g) {
                match t {
                    Triple::Instance { .. } => {}
                    Triple::Attribute { role, node, value } => {
                        *s.attrs[idx[&node]]
                            .entry((role.to_ascii_lowercase(), value.surface()))
                            .or_insert(0) += 1;
                    }
                    Triple::Relation { role, source, target } => {
                        let (a, b) = (idx[&source], idx[&target]);
                        let role = role.to_ascii_lowercase();
                        if a == b {
                            *s.loops[a].entry(role).or_insert(0) += 1;
                        } else {
                            *s.rels.entry((a, b)).or_default().entry(role).or_insert(0) += 1;
                        }
                    }
                }
            }
            s
        };
        let s1 = collect(g1, &idx1, n1);
        let s2 = collect(g2, &idx2, n2);

        let mut unary = vec![0; n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                let mut w = usize::from(s1.concept[i] == s2.concept[j]);
                for (k, c) in &s1.attrs[i] {
                    w += (*c).min(s2.attrs[j].get(k).copied().unwrap_or(0));
                }
                for (k, c) in &s1.loops[i] {
                    w += (*c).min(s2.loops[j].get(k).copied().unwrap_or(0));
                }
                unary[i * n2 + j] = w;
            }
        }
        let mut relations1: Vec<_> = s1
            .rels
            .into_iter()
            .map(|(pair, roles)| {
                let mut roles: Vec<_> = roles.into_iter().collect();
                roles.sort();
                (pair, roles)
            })
            .collect();
        relations1.sort_by_key(|r| r.0);
        let mut relations2 = HashMap::new();
        for ((a, b), roles) in s2.rels {
            for (role, c) in roles {
                relations2.insert((a, b, role), c);
            }
        }
        WeightTable {
            n2,
            unary,
            relations1,
            relations2,
        }
    }

    fn score(&self, mapping: &[Option<usize>]) -> usize {
        let mut total = 0;
        for (i, m) in mapping.iter().enumerate() {
            if let Some(j) = m {
                total += self.unary[i * self.n2 + j];
            }
        }
        for ((a, b), roles) in &self.relations1 {
            if let (Some(x), Some(y)) = (mapping[*a], mapping[*b]) {
                for (role, c) in roles {
                    let other = self.relations2.get(&(x, y, role.clone())).copied().unwrap_or(0);
                    total += (*c).min(other);
                }
            }
        }
        total
    }
}

/// Greedy hill-climbing with `restarts` starting points. Restart 0 aligns
/// variables with equal concepts; the others are random injections drawn
/// from a ChaCha stream keyed by `seed` and the restart number. Each climb
/// takes the best reassignment or swap until none improves. The result is
/// the best climb, earliest restart on ties.
pub fn smatch_hillclimb(g1: &AmrGraph, g2: &AmrGraph, restarts: usize, seed: u64) -> MappingResult {
    let vars1: Vec<&Var> = g1.instances().keys().collect();
    let vars2: Vec<&Var> = g2.instances().keys().collect();
    let (n1, n2) = (vars1.len(), vars2.len());
    let table = WeightTable::build(g1, g2);
    let left = g1.instances().len() + g1.edges().len();
    let right = g2.instances().len() + g2.edges().len();

    let mut best: Option<(usize, Vec<Option<usize>>)> = None;
    for restart in 0..restarts.max(1) {
        let start = if restart == 0 {
            concept_aligned_start(g1, g2)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            random_start(n1, n2, &mut rng)
        };
        let (score, mapping) = climb(&table, start, n2);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, mapping));
        }
    }
    let (matched, mapping) = best.expect("at least one restart");
    let pairs = mapping
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (vars1[i].clone(), vars2[j].clone())))
        .collect();
    MappingResult::new(pairs, matched, left, right)
}

fn concept_aligned_start(g1: &AmrGraph, g2: &AmrGraph) -> Vec<Option<usize>> {
    let concepts2: Vec<&String> = g2.instances().values().collect();
    let mut used = vec![false; concepts2.len()];
    g1.instances()
        .values()
        .map(|c| {
            let j = (0..concepts2.len()).find(|&j| !used[j] && concepts2[j] == c)?;
            used[j] = true;
            Some(j)
        })
        .collect()
}

fn random_start(n1: usize, n2: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut targets: Vec<usize> = (0..n2).collect();
    targets.shuffle(rng);
    let mut slots: Vec<usize> = (0..n1).collect();
    slots.shuffle(rng);
    let mut mapping = vec![None; n1];
    for (slot, j) in slots.into_iter().zip(targets) {
        mapping[slot] = Some(j);
    }
    mapping
}

fn climb(table: &WeightTable, mut mapping: Vec<Option<usize>>, n2: usize) -> (usize, Vec<Option<usize>>) {
    let mut current = table.score(&mapping);
    loop {
        let mut best_move: Option<(usize, Vec<Option<usize>>)> = None;
        for i in 0..mapping.len() {
            for j in (0..n2).map(Some).chain(std::iter::once(None)) {
                if mapping[i] == j {
                    continue;
                }
                let mut candidate = mapping.clone();
                // a target held by another variable is swapped, otherwise reassigned
                if let Some(other) = j.and_then(|j| mapping.iter().position(|m| *m == Some(j))) {
                    candidate[other] = mapping[i];
                }
                candidate[i] = j;
                let s = table.score(&candidate);
                if s > current && best_move.as_ref().is_none_or(|(b, _)| s > *b) {
                    best_move = Some((s, candidate));
                }
            }
        }
        match best_move {
            Some((s, m)) => {
                current = s;
                mapping = m;
            }
            None => return (current, mapping),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;
    use approx::assert_abs_diff_eq;

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    #[test]
    fn identity_is_perfect() {
        let a = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b :polarity -))");
        assert_eq!(smatch_exact(&a, &a).unwrap().f1, 1.0);
        assert_eq!(smatch_hillclimb(&a, &a, 1, 7).f1, 1.0);
    }

    #[test]
    fn want_boy_vs_want_girl() {
        let a = g("(w / want-01 :ARG0 (b / boy))");
        let b = g("(w2 / want-01 :ARG0 (g / girl))");
        let r = smatch_exact(&a, &b).unwrap();
        assert_eq!(r.matched, 2);
        assert_eq!((r.left_triples, r.right_triples), (3, 3));
        assert_abs_diff_eq!(r.f1, 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(r.mapping, vec![("w".into(), "w2".into()), ("b".into(), "g".into())]);
        assert_abs_diff_eq!(smatch_hillclimb(&a, &b, 4, 0).f1, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn disjoint_concepts_score_zero() {
        let r = smatch_exact(&g("(b / boy)"), &g("(g / girl)")).unwrap();
        assert_eq!(r.matched, 0);
        assert_eq!(r.f1, 0.0);
    }

    #[test]
    fn role_case_is_folded_but_constants_are_not() {
        let a = g("(g / go-02 :arg0 (r / robot) :mode imperative)");
        let b = g("(g / go-02 :ARG0 (r / robot) :mode imperative)");
        assert_eq!(smatch_exact(&a, &b).unwrap().f1, 1.0);
        let c = g("(n / name :op1 \"Fido\")");
        let d = g("(n / name :op1 \"fido\")");
        assert_eq!(smatch_exact(&c, &d).unwrap().matched, 1);
    }

    #[test]
    fn inverse_roles_match_forward_roles() {
        let a = g("(h / hallway :ARG1-of (f / front-03))");
        let b = g("(f / front-03 :ARG1 (h / hallway))");
        assert_eq!(smatch_exact(&a, &b).unwrap().f1, 1.0);
    }

    #[test]
    fn unequal_sizes_either_direction() {
        let small = g("(w / want-01 :ARG0 (b / boy))");
        let big = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let ab = smatch_exact(&small, &big).unwrap();
        let ba = smatch_exact(&big, &small).unwrap();
        assert_eq!(ab.matched, 3);
        assert_eq!(ba.matched, 3);
        assert_abs_diff_eq!(ab.f1, ba.f1, epsilon = 1e-15);
        assert_eq!(ab.precision, ba.recall);
        assert_eq!(ba.mapping.len(), 2);
    }

    #[test]
    fn too_large_is_reported() {
        let a = g("(a / x :ARG0 (b / x) :ARG1 (c / x))");
        assert!(matches!(
            smatch_exact_with_limit(&a, &a, 2),
            Err(SmatchError::TooLarge { smaller: 3, .. })
        ));
    }

    #[test]
    fn duplicate_triples_count_as_multiset() {
        let a = g("(a / x :mod blue :mod blue)");
        let b = g("(a / x :mod blue)");
        let r = smatch_exact(&a, &b).unwrap();
        assert_eq!(r.matched, 2);
        assert_eq!(smatch_hillclimb(&a, &b, 2, 1).matched, 2);
    }

    #[test]
    fn hillclimb_is_deterministic_per_seed() {
        let a = g("(a / x :ARG0 (b / y :ARG1 (c / x)) :ARG2 (d / y))");
        let b = g("(p / y :ARG0 (q / x :ARG1 (r / y)) :ARG2 (s / x))");
        let r1 = smatch_hillclimb(&a, &b, 5, 42);
        let r2 = smatch_hillclimb(&a, &b, 5, 42);
        assert_eq!(r1, r2);
    }
}
