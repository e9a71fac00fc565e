use std::collections::HashSet;

use serde::Serialize;

use super::error::DamrError;
use super::lexicon::{Lexicon, RobotConcept, SpeechAct};
use super::tense::{decode_tense_aspect, AspectFlag, TenseAspect};
use crate::amr::{AmrGraph, Polarity, Target, Var};

/// A validated Dialogue-AMR with its envelope decoded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DialogueAmr {
    /// The graph with its root concept canonicalized to `<act>-SA`.
    pub graph: AmrGraph,
    pub act: SpeechAct,
    pub speaker: Var,
    pub addressee: Var,
    pub content: Var,
    pub concept: RobotConcept,
    pub ta: TenseAspect,
    /// Lexicon rolesets found below the content root, in traversal order.
    pub embedded_actions: Vec<String>,
}

impl DialogueAmr {
    pub fn completable(&self) -> Option<Polarity> {
        self.ta.flag(AspectFlag::Completable)
    }
}

/// Checks a graph against the Dialogue-AMR schema and decodes its envelope.
/// All problems found are returned together.
pub fn validate_dialogue_amr(lex: &Lexicon, graph: &AmrGraph) -> Result<DialogueAmr, Vec<DamrError>> {
    let Some(act) = lex.act_of_root(graph.root_concept()) else {
        return Err(vec![DamrError::NotASpeechActRoot {
            concept: graph.root_concept().to_string(),
        }]);
    };
    let mut errors = Vec::new();
    let mut arg = |which: &str| match graph.child(graph.root(), which).and_then(Target::as_node) {
        Some(v) => Some(v.clone()),
        None => {
            errors.push(DamrError::MissingEnvelopeArg { which: which.into() });
            None
        }
    };
    let (speaker, content, addressee) = (arg("ARG0"), arg("ARG1"), arg("ARG2"));

    let Some(content) = content else {
        return Err(errors);
    };
    let roleset = graph.concept(&content).unwrap_or_default();
    let concept = lex.concept_by_roleset(roleset);
    match concept {
        None => errors.push(DamrError::UnknownRobotConcept {
            roleset: roleset.to_string(),
        }),
        Some(c) if !c.is_compatible(&act.label) => errors.push(DamrError::IncompatibleActConcept {
            act: act.label.clone(),
            concept: c.name.clone(),
        }),
        Some(_) => {}
    }
    let ta = decode_tense_aspect(graph, &content).map_err(|e| errors.push(e)).ok();

    match (speaker, addressee, concept, ta) {
        (Some(speaker), Some(addressee), Some(concept), Some(ta)) if errors.is_empty() => {
            let mut canonical = graph.clone();
            canonical
                .set_concept(&canonical.root().clone(), format!("{}-SA", act.label))
                .expect("root exists");
            let embedded_actions = embedded_actions(lex, graph, &content, &[&speaker, &addressee]);
            Ok(DialogueAmr {
                graph: canonical,
                act: act.clone(),
                speaker,
                addressee,
                content,
                concept: concept.clone(),
                ta,
                embedded_actions,
            })
        }
        _ => Err(errors),
    }
}

fn embedded_actions(lex: &Lexicon, graph: &AmrGraph, content: &Var, stop: &[&Var]) -> Vec<String> {
    let mut seen: HashSet<&Var> = stop.iter().copied().collect();
    seen.insert(content);
    let mut stack: Vec<&Var> = vec![content];
    let mut found = Vec::new();
    while let Some(v) = stack.pop() {
        let children: Vec<&Var> = graph.outgoing(v).filter_map(|e| e.target.as_node()).collect();
        for c in children.into_iter().rev() {
            if seen.insert(c) {
                stack.push(c);
            }
        }
        if v != content {
            if let Some(concept) = graph.concept(v).filter(|c| lex.concept_by_roleset(c).is_some()) {
                found.push(concept.to_string());
            }
        }
    }
    found
}
