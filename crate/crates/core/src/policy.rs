//! Retrieval intent classifier and response policy.
//!
//! Instructions are indexed as tf-idf vectors (raw counts, smoothed idf
//! `ln((1 + N) / (1 + df)) + 1`) and queries are ranked by cosine
//! similarity. Query terms never seen in training still count toward the
//! query norm, so unfamiliar words lower the score.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::amr::Polarity;
use crate::damr::DialogueAmr;
use crate::structure::InstructionResponsePair;

pub const DEFAULT_THRESHOLD: f64 = 0.35;
pub const GENERIC_PROMPT: &str = "Sorry, I don't know how to do that. Can you rephrase the instruction?";
pub const ONE_AT_A_TIME_PROMPT: &str = "Could you give me those instructions one at a time?";

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("no training pairs")]
    EmptyTrainingSet,
    #[error("line {line}: empty instruction")]
    EmptyInstruction { line: usize },
    #[error("line {line}: instruction has neither feedback nor translation")]
    NoResponses { line: usize },
    #[error("line {line}: expected `instruction<TAB>feedback<TAB>translation`")]
    BadPairsLine { line: usize },
    #[error("threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponsePair {
    pub instruction: String,
    pub feedback: Vec<String>,
    pub translation: Vec<String>,
}

impl ResponsePair {
    fn check(&self, line: usize) -> Result<(), PolicyError> {
        if tokenize(&self.instruction).is_empty() {
            return Err(PolicyError::EmptyInstruction { line });
        }
        if self.feedback.is_empty() && self.translation.is_empty() {
            return Err(PolicyError::NoResponses { line });
        }
        Ok(())
    }
}

/// Pairs with at least one response; unanswered instructions are dropped.
pub fn pairs_from_transcript(extracted: &[InstructionResponsePair]) -> Vec<ResponsePair> {
    extracted
        .iter()
        .filter(|p| !(p.responses.is_empty() && p.translations.is_empty()))
        .map(|p| ResponsePair {
            instruction: p.instruction.clone(),
            feedback: p.responses.clone(),
            translation: p.translations.clone(),
        })
        .collect()
}

/// Reads `instruction<TAB>feedback<TAB>translation` lines, lists separated
/// by `|`. A first line starting with `instruction` is a header.
pub fn parse_pairs_tsv(text: &str) -> Result<Vec<ResponsePair>, PolicyError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || (i == 0 && raw.starts_with("instruction")) {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() > 3 {
            return Err(PolicyError::BadPairsLine { line });
        }
        let list = |i: usize| -> Vec<String> {
            cols.get(i)
                .map(|c| c.split('|').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect())
                .unwrap_or_default()
        };
        let pair = ResponsePair {
            instruction: cols[0].trim().to_string(),
            feedback: list(1),
            translation: list(2),
        };
        pair.check(line)?;
        out.push(pair);
    }
    Ok(out)
}

pub fn pairs_to_tsv(pairs: &[ResponsePair]) -> String {
    let mut out = String::from("instruction\tfeedback\ttranslation\n");
    for p in pairs {
        out.push_str(&format!("{}\t{}\t{}\n", p.instruction, p.feedback.join("|"), p.translation.join("|")));
    }
    out
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<ResponsePair>, PolicyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PolicyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pairs_tsv(&text)
}

/// Lowercased whitespace tokens with surrounding punctuation trimmed.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn counts(tokens: &[String]) -> BTreeMap<&str, f64> {
    let mut m = BTreeMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    m
}

#[derive(Debug, Clone)]
pub struct IntentIndex {
    pairs: Vec<ResponsePair>,
    df: HashMap<String, usize>,
    vectors: Vec<BTreeMap<String, f64>>,
    norms: Vec<f64>,
}

impl IntentIndex {
    /// Indexes the pairs in order. Instructions with the same tokens are
    /// merged and their responses unioned.
    pub fn build(pairs: &[ResponsePair]) -> Result<IntentIndex, PolicyError> {
        let mut merged: Vec<ResponsePair> = Vec::new();
        let mut by_key: HashMap<Vec<String>, usize> = HashMap::new();
        for (i, p) in pairs.iter().enumerate() {
            p.check(i + 1)?;
            let key = tokenize(&p.instruction);
            match by_key.get(&key) {
                Some(&at) => {
                    let m = &mut merged[at];
                    for f in &p.feedback {
                        if !m.feedback.contains(f) {
                            m.feedback.push(f.clone());
                        }
                    }
                    for t in &p.translation {
                        if !m.translation.contains(t) {
                            m.translation.push(t.clone());
                        }
                    }
                }
                None => {
                    by_key.insert(key, merged.len());
                    merged.push(p.clone());
                }
            }
        }
        if merged.is_empty() {
            return Err(PolicyError::EmptyTrainingSet);
        }
        let mut df: HashMap<String, usize> = HashMap::new();
        for p in &merged {
            for t in counts(&tokenize(&p.instruction)).keys() {
                *df.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        let mut index = IntentIndex {
            pairs: merged,
            df,
            vectors: Vec::new(),
            norms: Vec::new(),
        };
        for p in &index.pairs {
            let v = index.weigh(&tokenize(&p.instruction));
            index.norms.push(norm(&v));
            index.vectors.push(v);
        }
        Ok(index)
    }

    pub fn pairs(&self) -> &[ResponsePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.pairs.len() as f64;
        let df = self.df.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    fn weigh(&self, tokens: &[String]) -> BTreeMap<String, f64> {
        counts(tokens)
            .into_iter()
            .map(|(t, c)| (t.to_string(), c * self.idf(t)))
            .collect()
    }

    /// The `k` best matches with non-zero score, best first; ties keep
    /// training order.
    pub fn classify(&self, text: &str, k: usize) -> Vec<(&ResponsePair, f64)> {
        let q = self.weigh(&tokenize(text));
        let qn = norm(&q);
        if qn == 0.0 {
            return Vec::new();
        }
        let mut ranked: Vec<(usize, f64)> = self
            .vectors
            .iter()
            .zip(&self.norms)
            .enumerate()
            .filter_map(|(i, (v, n))| {
                let dot: f64 = q.iter().filter_map(|(t, w)| v.get(t).map(|x| x * w)).sum();
                let mut s = (dot / (qn * n)).min(1.0);
                if (1.0 - s).abs() < 1e-12 {
                    s = 1.0;
                }
                (s > 0.0).then_some((i, s))
            })
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().take(k).map(|(i, s)| (&self.pairs[i], s)).collect()
    }
}

fn norm(v: &BTreeMap<String, f64>) -> f64 {
    v.values().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecisionKind {
    Actionable {
        feedback: Vec<String>,
        translation: Vec<String>,
    },
    Clarify {
        prompt: String,
        /// The parameter the prompt asks for, when known.
        missing: Option<String>,
    },
    NoMatch {
        prompt: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyDecision {
    #[serde(flatten)]
    pub kind: DecisionKind,
    pub score: f64,
    pub matched_instruction: Option<String>,
}

impl PolicyDecision {
    pub fn is_actionable(&self) -> bool {
        matches!(self.kind, DecisionKind::Actionable { .. })
    }
}

/// End-state prompts for instructions that cannot complete as given, keyed
/// by robot concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClarifyTemplates {
    /// `(concept, missing parameter, prompt)`
    pub entries: Vec<(String, String, String)>,
    pub fallback: (String, String),
}

impl Default for ClarifyTemplates {
    fn default() -> Self {
        let e = |c: &str, p: &str, t: &str| (c.to_string(), p.to_string(), t.to_string());
        ClarifyTemplates {
            entries: vec![
                e("MOVEMENT", "destination", "Where should I move forward to?"),
                e("ROTATION", "angle", "How far should I turn?"),
                e("SEND-IMAGE", "target", "What should I take a picture of?"),
            ],
            fallback: ("extent".into(), "When should I stop?".into()),
        }
    }
}

impl ClarifyTemplates {
    pub fn prompt_for(&self, concept: &str) -> (&str, &str) {
        self.entries
            .iter()
            .find(|(c, _, _)| c == concept)
            .map(|(_, p, t)| (p.as_str(), t.as_str()))
            .unwrap_or((self.fallback.0.as_str(), self.fallback.1.as_str()))
    }
}

#[derive(Debug, Clone)]
pub struct Policy {
    pub index: IntentIndex,
    pub threshold: f64,
    pub templates: ClarifyTemplates,
}

impl Policy {
    pub fn new(index: IntentIndex, threshold: f64) -> Result<Policy, PolicyError> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(PolicyError::BadThreshold(threshold));
        }
        Ok(Policy {
            index,
            threshold,
            templates: ClarifyTemplates::default(),
        })
    }

    /// Decides how to answer `utterance`. With a Dialogue-AMR, an
    /// instruction holding more than one action or marked
    /// `:completable -` is sent back for clarification whatever its score.
    pub fn decide(&self, utterance: &str, damr: Option<&DialogueAmr>) -> PolicyDecision {
        let top = self.index.classify(utterance, 1).into_iter().next();
        let score = top.map_or(0.0, |(_, s)| s);
        let matched_instruction = top.map(|(p, _)| p.instruction.clone());
        let clarify = |prompt: &str, missing: Option<&str>| PolicyDecision {
            kind: DecisionKind::Clarify {
                prompt: prompt.to_string(),
                missing: missing.map(str::to_string),
            },
            score,
            matched_instruction: matched_instruction.clone(),
        };
        if let Some(d) = damr {
            if !d.embedded_actions.is_empty() {
                return clarify(ONE_AT_A_TIME_PROMPT, None);
            }
            if d.completable() == Some(Polarity::Minus) {
                let (missing, prompt) = self.templates.prompt_for(&d.concept.name);
                return clarify(prompt, Some(missing));
            }
        }
        match top {
            Some((pair, s)) if s >= self.threshold => PolicyDecision {
                kind: DecisionKind::Actionable {
                    feedback: pair.feedback.clone(),
                    translation: pair.translation.clone(),
                },
                score,
                matched_instruction,
            },
            _ => PolicyDecision {
                kind: DecisionKind::NoMatch {
                    prompt: GENERIC_PROMPT.to_string(),
                },
                score,
                matched_instruction,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;
    use crate::damr::{validate_dialogue_amr, Lexicon};
    use proptest::prelude::*;

    fn pair(i: &str, f: &[&str], t: &[&str]) -> ResponsePair {
        ResponsePair {
            instruction: i.into(),
            feedback: f.iter().map(|s| s.to_string()).collect(),
            translation: t.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn simple() -> Vec<ResponsePair> {
        vec![pair("move forward three feet", &["ok", "moving...", "done"], &["move forward 3 feet"])]
    }

    fn damr(text: &str) -> DialogueAmr {
        validate_dialogue_amr(Lexicon::builtin(), &parse_penman(text).unwrap()).unwrap()
    }

    #[test]
    fn build_merges_and_rejects_empty() {
        assert!(matches!(IntentIndex::build(&[]), Err(PolicyError::EmptyTrainingSet)));
        let idx = IntentIndex::build(&[
            pair("Move forward", &["ok"], &[]),
            pair("move   forward", &["ok", "sure"], &["go 1"]),
        ])
        .unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.pairs()[0].feedback, ["ok", "sure"]);
        assert_eq!(idx.pairs()[0].translation, ["go 1"]);
        assert!(matches!(
            IntentIndex::build(&[pair("go", &[], &[])]),
            Err(PolicyError::NoResponses { line: 1 })
        ));
    }

    #[test]
    fn paraphrase_ranks_its_instruction_first() {
        let idx = IntentIndex::build(&[
            pair("move forward three feet", &["ok"], &[]),
            pair("turn left ninety degrees", &["ok"], &[]),
        ])
        .unwrap();
        let r = idx.classify("please move ahead three feet", 5);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0.instruction, "move forward three feet");
        // shared terms idf a = ln(3/2)+1, unseen terms idf b = ln 3 + 1:
        // cos = 3a^2 / (sqrt(3a^2 + 2b^2) * 2a)
        let (a, b) = (1.5f64.ln() + 1.0, 3f64.ln() + 1.0);
        let want = 3.0 * a * a / ((3.0 * a * a + 2.0 * b * b).sqrt() * 2.0 * a);
        assert!((r[0].1 - want).abs() < 1e-12);
        assert!((r[0].1 - 0.54922).abs() < 1e-5);
        assert!(idx.classify("xyzzy", 5).is_empty());
    }

    #[test]
    fn decisions() {
        let p = Policy::new(IntentIndex::build(&simple()).unwrap(), DEFAULT_THRESHOLD).unwrap();
        let bounded = damr(
            "(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot)
               :ARG1 (g / go-02 :completable + :ARG0 r :ARG1 (d / distance-quantity :quant 3 :unit (f / foot))
                 :time (a / after :op1 (n / now))))",
        );
        let d = p.decide("move forward three feet", Some(&bounded));
        assert_eq!(d.score, 1.0);
        assert_eq!(
            d.kind,
            DecisionKind::Actionable {
                feedback: vec!["ok".into(), "moving...".into(), "done".into()],
                translation: vec!["move forward 3 feet".into()],
            }
        );

        let unbounded = damr(
            "(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot)
               :ARG1 (g / go-02 :completable - :ARG0 r :direction (f / forward) :time (a / after :op1 (n / now))))",
        );
        let d = p.decide("keep moving forward", Some(&unbounded));
        assert_eq!(
            d.kind,
            DecisionKind::Clarify {
                prompt: "Where should I move forward to?".into(),
                missing: Some("destination".into())
            }
        );

        let d = p.decide("xyzzy", None);
        assert_eq!(d.kind, DecisionKind::NoMatch { prompt: GENERIC_PROMPT.into() });
        assert_eq!(d.score, 0.0);

        let multi = damr(
            "(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot)
               :ARG1 (g / go-02 :ARG0 r :ARG4 (b / barrel) :purpose (s / send-image-99 :ARG0 r)))",
        );
        assert!(matches!(p.decide("move forward three feet", Some(&multi)).kind, DecisionKind::Clarify { .. }));
        assert!(matches!(Policy::new(p.index.clone(), 0.0), Err(PolicyError::BadThreshold(_))));
    }

    #[test]
    fn pairs_tsv_round_trip() {
        let pairs = vec![
            pair("move forward three feet", &["ok", "moving..."], &["move forward 3 feet"]),
            pair("take a picture", &[], &["image"]),
        ];
        assert_eq!(parse_pairs_tsv(&pairs_to_tsv(&pairs)).unwrap(), pairs);
        assert!(matches!(parse_pairs_tsv("\tok\t"), Err(PolicyError::EmptyInstruction { line: 1 })));
    }

    proptest! {
        #[test]
        fn self_retrieval(instrs in prop::collection::vec("[a-e]{1,3}( [a-e]{1,3}){0,4}", 1..8)) {
            let pairs: Vec<ResponsePair> = instrs.iter().map(|i| pair(i, &["ok"], &[])).collect();
            let idx = IntentIndex::build(&pairs).unwrap();
            for p in idx.pairs() {
                let top = idx.classify(&p.instruction, 1);
                prop_assert_eq!(top[0].1, 1.0);
                // bags of words: word order is invisible to the index
                let bag = |s: &str| { let mut t = tokenize(s); t.sort(); t };
                prop_assert_eq!(bag(&top[0].0.instruction), bag(&p.instruction));
            }
        }

        #[test]
        fn higher_threshold_never_adds_actions(q in "[a-e ]{0,12}", lo in 0.05f64..1.0, bump in 0.0f64..0.5) {
            let pairs = vec![pair("a b", &["ok"], &[]), pair("c d e", &["ok"], &[])];
            let idx = IntentIndex::build(&pairs).unwrap();
            let hi = (lo + bump).min(1.0);
            let low = Policy::new(idx.clone(), lo).unwrap().decide(&q, None);
            let high = Policy::new(idx, hi).unwrap().decide(&q, None);
            prop_assert!(!high.is_actionable() || low.is_actionable());
            prop_assert_eq!(low.score, high.score);
        }
    }
}
