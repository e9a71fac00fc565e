use std::collections::{HashMap, HashSet};

use super::graph::{AmrGraph, Target, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenameScheme {
    /// `v0`, `v1`, ... in depth-first first-mention order. Graphs that differ
    /// only in variable names (same edge order) map to equal graphs.
    CanonicalDepthFirst,
    /// `<prefix><n>` in the same order, with the prefix lengthened until no
    /// new name collides with a name already in the graph.
    Fresh(String),
}

pub fn rename_variables(graph: &AmrGraph, scheme: &RenameScheme) -> AmrGraph {
    let order = graph.traversal_order();
    let prefix = match scheme {
        RenameScheme::CanonicalDepthFirst => "v".to_string(),
        RenameScheme::Fresh(p) => {
            let existing: HashSet<&str> = graph.instances().keys().map(Var::as_str).collect();
            let mut prefix = if p.is_empty() { "x".to_string() } else { p.clone() };
            while (0..order.len()).any(|i| existing.contains(format!("{prefix}{i}").as_str())) {
                let last = prefix.chars().last().unwrap_or('x');
                prefix.push(last);
            }
            prefix
        }
    };
    let names: HashMap<&Var, Var> = order
        .iter()
        .enumerate()
        .map(|(i, v)| (v, Var::new(format!("{prefix}{i}"))))
        .collect();

    let root = &names[graph.root()];
    let mut out = AmrGraph::new(root.clone(), graph.root_concept()).expect("root concept is non-empty");
    for v in &order[1..] {
        let concept = graph.concept(v).expect("traversal only yields instances");
        out.add_node(names[v].clone(), concept).expect("fresh names are unique");
    }
    for e in graph.edges() {
        let target = match &e.target {
            Target::Node(t) => Target::Node(names[t].clone()),
            c => c.clone(),
        };
        out.add_edge(names[&e.source].clone(), e.role.clone(), target)
            .expect("renamed endpoints exist");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::penman::{parse_penman, serialize_penman};

    #[test]
    fn single_node_canonical() {
        let g = parse_penman("(x / boy)").unwrap();
        assert_eq!(serialize_penman(&rename_variables(&g, &RenameScheme::CanonicalDepthFirst)), "(v0 / boy)");
    }

    #[test]
    fn canonical_is_idempotent() {
        let g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))").unwrap();
        let once = rename_variables(&g, &RenameScheme::CanonicalDepthFirst);
        let twice = rename_variables(&once, &RenameScheme::CanonicalDepthFirst);
        assert_eq!(once, twice);
    }

    #[test]
    fn fresh_avoids_existing_names() {
        let g = parse_penman("(x0 / a :ARG0 (x1 / b))").unwrap();
        let r = rename_variables(&g, &RenameScheme::Fresh("x".into()));
        assert!(r.instances().keys().all(|v| v.as_str().starts_with("xx")));
        let r = rename_variables(&g, &RenameScheme::Fresh("n".into()));
        assert_eq!(r.root().as_str(), "n0");
    }
}
