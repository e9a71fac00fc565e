use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::amr::{AmrGraph, Var};

const BUILTIN_LEXICON: &str = include_str!("../../data/robot_lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActFamily {
    InformationTransfer,
    ActionDiscussion,
    Expressive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpeechAct {
    pub label: String,
    pub family: ActFamily,
}

impl SpeechAct {
    /// Command and request ask the addressee to act.
    pub fn is_directive(&self) -> bool {
        matches!(self.label.as_str(), "command" | "request")
    }
}

impl fmt::Display for SpeechAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// The built-in speech acts and their families.
pub fn default_speech_acts() -> Vec<SpeechAct> {
    use ActFamily::*;
    [
        ("question", InformationTransfer),
        ("assertion", InformationTransfer),
        ("command", ActionDiscussion),
        ("request", ActionDiscussion),
        ("offer", ActionDiscussion),
        ("open-option", ActionDiscussion),
        ("promise", ActionDiscussion),
        ("regret", Expressive),
    ]
    .into_iter()
    .map(|(label, family)| SpeechAct {
        label: label.to_string(),
        family,
    })
    .collect()
}

const ACT_ALIASES: &[(&str, &str)] = &[("assert", "assertion")];

/// A role whose presence on the content node gives the action an end
/// state. With `sub`, the role's filler must itself carry `sub`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GoalRole {
    pub role: String,
    pub sub: Option<String>,
}

impl GoalRole {
    fn parse(s: &str) -> GoalRole {
        match s.split_once('.') {
            Some((role, sub)) => GoalRole {
                role: role.to_string(),
                sub: Some(sub.to_string()),
            },
            None => GoalRole {
                role: s.to_string(),
                sub: None,
            },
        }
    }

    pub fn present_on(&self, graph: &AmrGraph, var: &Var) -> bool {
        graph
            .outgoing(var)
            .filter(|e| e.role.eq_ignore_ascii_case(&self.role))
            .any(|e| match (&self.sub, e.target.as_node()) {
                (None, _) => true,
                (Some(sub), Some(t)) => graph.child(t, sub).is_some(),
                (Some(_), None) => false,
            })
    }
}

/// Goal roles for content whose concept is not in the lexicon.
pub fn generic_goal_roles() -> Vec<GoalRole> {
    ["ARG4", "destination", "extent", "path.destination", "path.ARG4", "path.end"]
        .into_iter()
        .map(GoalRole::parse)
        .collect()
}

/// Whether content at `var` has an end state under `goals`. An empty goal
/// list means the action is bounded by itself.
pub fn has_bounded_goal(goals: &[GoalRole], graph: &AmrGraph, var: &Var) -> bool {
    goals.is_empty() || goals.iter().any(|g| g.present_on(graph, var))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RobotConcept {
    pub name: String,
    /// Canonical roleset first, then accepted aliases.
    pub rolesets: Vec<String>,
    pub compatible_acts: Vec<String>,
    pub trigger_lemmas: Vec<String>,
    pub goal_roles: Vec<GoalRole>,
}

impl RobotConcept {
    pub fn roleset(&self) -> &str {
        &self.rolesets[0]
    }

    pub fn is_compatible(&self, act: &str) -> bool {
        self.compatible_acts.iter().any(|a| a == act)
    }

    pub fn is_bounded(&self, graph: &AmrGraph, var: &Var) -> bool {
        has_bounded_goal(&self.goal_roles, graph, var)
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {detail}")]
    BadRecord { line: usize, detail: String },
    #[error("line {line}: concept {name} is defined twice")]
    DuplicateConcept { line: usize, name: String },
    #[error("line {line}: roleset {roleset} already belongs to another concept")]
    DuplicateRoleset { line: usize, roleset: String },
    #[error("line {line}: trigger lemma {lemma} already maps to another concept")]
    DuplicateTrigger { line: usize, lemma: String },
    #[error("line {line}: unknown speech act {act}")]
    UnknownAct { line: usize, act: String },
    #[error("speech act {0} is already registered")]
    DuplicateAct(String),
}

/// Speech acts plus robot concepts.
#[derive(Debug, Clone)]
pub struct Lexicon {
    acts: IndexMap<String, SpeechAct>,
    concepts: Vec<RobotConcept>,
    by_roleset: HashMap<String, usize>,
    by_trigger: HashMap<String, usize>,
}

impl Lexicon {
    /// The shipped lexicon, parsed once.
    pub fn builtin() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| Lexicon::from_tsv(BUILTIN_LEXICON).expect("shipped lexicon is valid"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::from_tsv(&text)
    }

    pub fn from_tsv(text: &str) -> Result<Lexicon, LexiconError> {
        Lexicon::from_tsv_with_acts(text, default_speech_acts())
    }

    /// Parses concept records against a caller-supplied act registry.
    pub fn from_tsv_with_acts(text: &str, acts: Vec<SpeechAct>) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon {
            acts: IndexMap::new(),
            concepts: Vec::new(),
            by_roleset: HashMap::new(),
            by_trigger: HashMap::new(),
        };
        for act in acts {
            lex.register_act(act)?;
        }
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if !(4..=5).contains(&cols.len()) {
                return Err(LexiconError::BadRecord {
                    line,
                    detail: format!("expected 4 or 5 tab-separated columns, found {}", cols.len()),
                });
            }
            let list = |s: &str| -> Vec<String> {
                s.split(',')
                    .map(|x| x.trim().to_ascii_lowercase())
                    .filter(|x| !x.is_empty())
                    .collect()
            };
            let name = cols[0].to_ascii_uppercase();
            let rolesets = list(cols[1]);
            let compatible_acts = list(cols[2]);
            let trigger_lemmas = list(cols[3]);
            let goal_roles = cols
                .get(4)
                .map(|s| s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(GoalRole::parse).collect())
                .unwrap_or_default();
            if name.is_empty() || rolesets.is_empty() {
                return Err(LexiconError::BadRecord {
                    line,
                    detail: "concept name and roleset are required".into(),
                });
            }
            if compatible_acts.is_empty() {
                return Err(LexiconError::BadRecord {
                    line,
                    detail: format!("{name} lists no compatible speech acts"),
                });
            }
            if lex.concept(&name).is_some() {
                return Err(LexiconError::DuplicateConcept { line, name });
            }
            let mut acts = Vec::new();
            for a in &compatible_acts {
                match lex.act(a) {
                    Some(act) => acts.push(act.label.clone()),
                    None => return Err(LexiconError::UnknownAct { line, act: a.clone() }),
                }
            }
            let idx = lex.concepts.len();
            for r in &rolesets {
                if lex.by_roleset.insert(r.clone(), idx).is_some() {
                    return Err(LexiconError::DuplicateRoleset { line, roleset: r.clone() });
                }
            }
            for t in &trigger_lemmas {
                if lex.by_trigger.insert(t.clone(), idx).is_some() {
                    return Err(LexiconError::DuplicateTrigger { line, lemma: t.clone() });
                }
            }
            lex.concepts.push(RobotConcept {
                name,
                rolesets,
                compatible_acts: acts,
                trigger_lemmas,
                goal_roles,
            });
        }
        Ok(lex)
    }

    pub fn register_act(&mut self, act: SpeechAct) -> Result<(), LexiconError> {
        let key = act.label.to_ascii_lowercase();
        if self.acts.contains_key(&key) {
            return Err(LexiconError::DuplicateAct(key));
        }
        self.acts.insert(key.clone(), SpeechAct { label: key, ..act });
        Ok(())
    }

    /// Looks up a speech act by label or alias, case-insensitively.
    pub fn act(&self, label: &str) -> Option<&SpeechAct> {
        let key = label.to_ascii_lowercase();
        let key = ACT_ALIASES
            .iter()
            .find(|(alias, _)| *alias == key)
            .map_or(key.as_str(), |(_, canonical)| canonical);
        self.acts.get(key)
    }

    pub fn acts(&self) -> impl Iterator<Item = &SpeechAct> {
        self.acts.values()
    }

    pub fn concepts(&self) -> &[RobotConcept] {
        &self.concepts
    }

    /// Looks up a concept by name (`MOVEMENT`), case-insensitively.
    pub fn concept(&self, name: &str) -> Option<&RobotConcept> {
        self.concepts.iter().find(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// The concept whose canonical roleset or alias is exactly `roleset`.
    pub fn concept_by_roleset(&self, roleset: &str) -> Option<&RobotConcept> {
        self.by_roleset
            .get(&roleset.to_ascii_lowercase())
            .map(|&i| &self.concepts[i])
    }

    pub fn concept_by_trigger(&self, lemma: &str) -> Option<&RobotConcept> {
        self.by_trigger
            .get(&lemma.to_ascii_lowercase())
            .map(|&i| &self.concepts[i])
    }

    /// Splits a speech-act root concept (`command-SA`, `assert-00`) into its
    /// registered act.
    pub fn act_of_root(&self, concept: &str) -> Option<&SpeechAct> {
        let lower = concept.to_ascii_lowercase();
        let stem = lower.strip_suffix("-sa").or_else(|| lower.strip_suffix("-00"))?;
        self.act(stem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_all_concepts() {
        let lex = Lexicon::builtin();
        assert_eq!(lex.concepts().len(), 24);
        assert_eq!(lex.concept("movement").unwrap().roleset(), "go-02");
        assert_eq!(lex.concept_by_roleset("go-01").unwrap().name, "MOVEMENT");
        assert_eq!(lex.concept_by_roleset("send-image-99").unwrap().name, "SEND-IMAGE");
        assert_eq!(lex.concept_by_trigger("pivot").unwrap().name, "ROTATION");
        assert!(lex.concept_by_roleset("eat-01").is_none());
    }

    #[test]
    fn act_aliases_and_suffixes() {
        let lex = Lexicon::builtin();
        assert_eq!(lex.act("assert").unwrap().label, "assertion");
        assert_eq!(lex.act_of_root("Question-SA").unwrap().label, "question");
        assert_eq!(lex.act_of_root("command-00").unwrap().label, "command");
        assert!(lex.act_of_root("command").is_none());
        assert!(lex.act_of_root("move-01").is_none());
        assert_eq!(lex.act("regret").unwrap().family, ActFamily::Expressive);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            Lexicon::from_tsv("A\ta-01\tquestion\tx\nB\tb-01\tquestion\tx\n"),
            Err(LexiconError::DuplicateTrigger { line: 2, .. })
        ));
        assert!(matches!(
            Lexicon::from_tsv("A\ta-01\tgossip\tx\n"),
            Err(LexiconError::UnknownAct { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::from_tsv("A\ta-01\t\tx\n"),
            Err(LexiconError::BadRecord { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::from_tsv("A\ta-01\n"),
            Err(LexiconError::BadRecord { line: 1, .. })
        ));
    }

    #[test]
    fn extra_acts_can_be_registered() {
        let mut acts = default_speech_acts();
        acts.push(SpeechAct {
            label: "greeting".into(),
            family: ActFamily::Expressive,
        });
        let lex = Lexicon::from_tsv_with_acts("HELLO\tgreet-01\tgreeting\thello\n", acts).unwrap();
        assert!(lex.concept("hello").unwrap().is_compatible("greeting"));
    }
}
