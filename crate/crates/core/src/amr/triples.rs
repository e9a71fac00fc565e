use serde::Serialize;

use super::graph::{normalize_role, AmrGraph, Constant, Target, Var};

/// The triple view of a graph. Inverse roles are flipped to their forward
/// direction so `(a :ARG1-of b)` and `(b :ARG1 a)` give the same relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Triple {
    Instance { node: Var, concept: String },
    Relation { role: String, source: Var, target: Var },
    Attribute { role: String, node: Var, value: Constant },
}

/// One instance triple per node, then one triple per edge in stored order.
pub fn to_triples(graph: &AmrGraph) -> Vec<Triple> {
    let mut out = Vec::with_capacity(graph.instances().len() + graph.edges().len());
    for (node, concept) in graph.instances() {
        out.push(Triple::Instance {
            node: node.clone(),
            concept: concept.clone(),
        });
    }
    for edge in graph.edges() {
        match &edge.target {
            Target::Node(t) => {
                let (role, inverted) = normalize_role(&edge.role);
                let (source, target) = if inverted {
                    (t.clone(), edge.source.clone())
                } else {
                    (edge.source.clone(), t.clone())
                };
                out.push(Triple::Relation {
                    role: role.to_string(),
                    source,
                    target,
                });
            }
            Target::Const(c) => out.push(Triple::Attribute {
                role: edge.role.clone(),
                node: edge.source.clone(),
                value: c.clone(),
            }),
        }
    }
    out
}

/// Sorted triples, convenient for multiset comparison.
pub fn sorted_triples(graph: &AmrGraph) -> Vec<Triple> {
    let mut t = to_triples(graph);
    t.sort();
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::penman::parse_penman;

    #[test]
    fn drive_to_the_door_counts() {
        let g = parse_penman("(d / drive-01 :mode imperative :ARG0 (y / you) :destination (d2 / door))").unwrap();
        let t = to_triples(&g);
        let count = |f: fn(&Triple) -> bool| t.iter().filter(|x| f(x)).count();
        assert_eq!(count(|x| matches!(x, Triple::Instance { .. })), 3);
        assert_eq!(count(|x| matches!(x, Triple::Attribute { .. })), 1);
        assert_eq!(count(|x| matches!(x, Triple::Relation { .. })), 2);
    }

    #[test]
    fn single_instance() {
        let g = parse_penman("(b / boy)").unwrap();
        assert_eq!(
            to_triples(&g),
            vec![Triple::Instance {
                node: "b".into(),
                concept: "boy".into()
            }]
        );
    }

    #[test]
    fn inverse_role_is_flipped() {
        // hallway :ARG1-of front-03, written by hand as front-03 :ARG1 hallway
        let inverse = parse_penman("(h / hallway :ARG1-of (f / front-03 :ARG2 (r / robot)))").unwrap();
        let forward = Triple::Relation {
            role: "ARG1".into(),
            source: "f".into(),
            target: "h".into(),
        };
        assert!(to_triples(&inverse).contains(&forward));
        assert!(!to_triples(&inverse).iter().any(|t| matches!(t, Triple::Relation { role, .. } if role == "ARG1-of")));
    }
}
