use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::transcript::{Stream, Transcript, Utterance};
use super::validate::{validate_structure, Violation};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("no utterance belongs to TU {tu}")]
    NoSuchTu { tu: i64 },
    #[error("TU {tu} has {} structure violation(s)", violations.len())]
    InvalidTu { tu: i64, violations: Vec<Violation> },
}

/// A TU seen as a tree: each member hangs off its antecedent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TuTree {
    pub tu: i64,
    pub root: u64,
    /// child id -> parent id
    pub parent: BTreeMap<u64, u64>,
}

impl TuTree {
    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn children(&self, id: u64) -> Vec<u64> {
        self.parent.iter().filter(|(_, &p)| p == id).map(|(&c, _)| c).collect()
    }

    /// `(parent, child)` pairs in child order.
    pub fn edges(&self) -> Vec<(u64, u64)> {
        self.parent.iter().map(|(&c, &p)| (p, c)).collect()
    }

    pub fn depth(&self, id: u64) -> Option<usize> {
        let mut d = 0;
        let mut cur = id;
        while cur != self.root {
            cur = *self.parent.get(&cur)?;
            d += 1;
        }
        Some(d)
    }
}

pub fn tu_tree(t: &Transcript, tu: i64) -> Result<TuTree, TreeError> {
    let members = t.tu_members(tu);
    let Some(first) = members.first() else {
        return Err(TreeError::NoSuchTu { tu });
    };
    let ids: BTreeSet<u64> = members.iter().map(|u| u.id).collect();
    let violations: Vec<Violation> = validate_structure(t)
        .into_iter()
        .filter(|v| ids.contains(&v.row))
        .collect();
    if !violations.is_empty() {
        return Err(TreeError::InvalidTu { tu, violations });
    }
    let parent = members[1..]
        .iter()
        .map(|u| (u.id, u.annotation.antecedent.expect("validated").target))
        .collect();
    Ok(TuTree {
        tu,
        root: first.id,
        parent,
    })
}

/// A maximal stretch of utterances during which two or more TUs are open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterleavingSpan {
    pub start: u64,
    pub end: u64,
    pub tus: BTreeSet<i64>,
}

/// A TU is open from its first to its last annotated member.
pub fn interleaving_spans(t: &Transcript) -> Vec<InterleavingSpan> {
    let mut bounds: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
    for u in t.utterances() {
        if let Some(tu) = u.annotation.tu {
            bounds.entry(tu).and_modify(|b| b.1 = u.id).or_insert((u.id, u.id));
        }
    }
    let mut spans: Vec<InterleavingSpan> = Vec::new();
    let mut open: Option<InterleavingSpan> = None;
    for u in t.utterances() {
        let active: BTreeSet<i64> = bounds
            .iter()
            .filter(|(_, &(s, e))| s <= u.id && u.id <= e)
            .map(|(&tu, _)| tu)
            .collect();
        if active.len() >= 2 {
            match open.as_mut() {
                Some(span) => {
                    span.end = u.id;
                    span.tus.extend(active);
                }
                None => {
                    open = Some(InterleavingSpan {
                        start: u.id,
                        end: u.id,
                        tus: active,
                    })
                }
            }
        } else if let Some(span) = open.take() {
            spans.push(span);
        }
    }
    spans.extend(open);
    spans
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstructionResponsePair {
    pub tu: i64,
    /// Root utterance followed by the commander's `continue` additions.
    pub instruction_ids: Vec<u64>,
    pub instruction: String,
    pub responses: Vec<String>,
    pub translations: Vec<String>,
}

fn reaches<'a>(t: &'a Transcript, tu: i64, root: u64, mut u: &'a Utterance) -> bool {
    // ids strictly decrease along a valid chain, so this terminates
    loop {
        if u.id == root {
            return true;
        }
        let Some(a) = u.annotation.antecedent else { return false };
        match t.get(a.target) {
            Some(next) if next.id < u.id && next.annotation.tu == Some(tu) => u = next,
            _ => return false,
        }
    }
}

/// One pair per TU opened by the commander. Responses are the DM-CMD
/// members and translations the DM-RN members whose antecedent chain
/// reaches the TU's first utterance.
pub fn extract_instruction_response_pairs(t: &Transcript) -> Vec<InstructionResponsePair> {
    let mut out = Vec::new();
    for tu in t.tu_ids() {
        let members = t.tu_members(tu);
        let root = members[0];
        if root.stream != Stream::Cmd {
            continue;
        }
        let mut instruction_ids = vec![root.id];
        let mut texts = vec![root.text.as_str()];
        let mut responses = Vec::new();
        let mut translations = Vec::new();
        for u in &members[1..] {
            if !reaches(t, tu, root.id, u) {
                continue;
            }
            let a = &u.annotation;
            let continues = a.relation.as_ref().and_then(|r| r.known()).is_some_and(|l| l.code() == "continue")
                && a.antecedent.is_some_and(|x| instruction_ids.contains(&x.target));
            match u.stream {
                Stream::Cmd if continues => {
                    instruction_ids.push(u.id);
                    texts.push(&u.text);
                }
                Stream::DmCmd => responses.push(u.text.clone()),
                Stream::DmRn => translations.push(u.text.clone()),
                _ => {}
            }
        }
        out.push(InstructionResponsePair {
            tu,
            instruction_ids,
            instruction: texts.join(" "),
            responses,
            translations,
        });
    }
    out
}
