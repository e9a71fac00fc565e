use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::error::DamrError;
use super::lexicon::{generic_goal_roles, has_bounded_goal, Lexicon, SpeechAct};
use crate::amr::{AmrGraph, Constant, Polarity, Target, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeRef {
    BeforeNow,
    Now,
    AfterNow,
    Unspecified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AspectFlag {
    Stable,
    Ongoing,
    Complete,
    Habitual,
    Completable,
}

impl AspectFlag {
    pub const ALL: [AspectFlag; 5] = [
        AspectFlag::Stable,
        AspectFlag::Ongoing,
        AspectFlag::Complete,
        AspectFlag::Habitual,
        AspectFlag::Completable,
    ];

    pub fn role(self) -> &'static str {
        match self {
            AspectFlag::Stable => "stable",
            AspectFlag::Ongoing => "ongoing",
            AspectFlag::Complete => "complete",
            AspectFlag::Habitual => "habitual",
            AspectFlag::Completable => "completable",
        }
    }

    pub fn from_role(role: &str) -> Option<AspectFlag> {
        AspectFlag::ALL.into_iter().find(|f| f.role().eq_ignore_ascii_case(role))
    }
}

/// Time relative to speech time plus aspect flags of a content node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TenseAspect {
    pub time: TimeRef,
    pub flags: BTreeMap<AspectFlag, Polarity>,
}

impl TenseAspect {
    pub fn flag(&self, f: AspectFlag) -> Option<Polarity> {
        self.flags.get(&f).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceTense {
    Past,
    Present,
    Future,
    Imperative,
}

impl fmt::Display for SurfaceTense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceTense::Past => "past",
            SurfaceTense::Present => "present",
            SurfaceTense::Future => "future",
            SurfaceTense::Imperative => "imperative",
        })
    }
}

impl FromStr for SurfaceTense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "past" => Ok(SurfaceTense::Past),
            "present" => Ok(SurfaceTense::Present),
            "future" => Ok(SurfaceTense::Future),
            "imperative" => Ok(SurfaceTense::Imperative),
            other => Err(format!("unknown tense `{other}`")),
        }
    }
}

fn time_of(graph: &AmrGraph, var: &Var) -> Result<Option<TimeRef>, DamrError> {
    let mut times = graph.outgoing(var).filter(|e| e.role.eq_ignore_ascii_case("time"));
    let Some(edge) = times.next() else {
        return Ok(None);
    };
    if times.next().is_some() {
        return Err(DamrError::BadTenseAspect {
            detail: format!("{var} has more than one :time"),
        });
    }
    let Some(t) = edge.target.as_node() else {
        return Ok(Some(TimeRef::Unspecified));
    };
    let is_now = |v: &Var| graph.concept(v) == Some("now");
    let op1_now = || graph.child(t, "op1").and_then(Target::as_node).is_some_and(is_now);
    Ok(Some(match graph.concept(t) {
        Some("now") => TimeRef::Now,
        Some("before") if op1_now() => TimeRef::BeforeNow,
        Some("after") if op1_now() => TimeRef::AfterNow,
        _ => TimeRef::Unspecified,
    }))
}

/// Reads the tense/aspect annotation of the node `var`.
pub fn decode_tense_aspect(graph: &AmrGraph, var: &Var) -> Result<TenseAspect, DamrError> {
    let mut flags = BTreeMap::new();
    for e in graph.outgoing(var) {
        let Some(flag) = AspectFlag::from_role(&e.role) else {
            continue;
        };
        let value = match e.target.as_const() {
            Some(Constant::Polarity(p)) => *p,
            _ => {
                return Err(DamrError::BadTenseAspect {
                    detail: format!(":{} must be + or -, found {}", flag.role(), e.value_surface()),
                })
            }
        };
        if flags.insert(flag, value).is_some() {
            return Err(DamrError::BadTenseAspect {
                detail: format!(":{} appears twice", flag.role()),
            });
        }
    }
    let time = time_of(graph, var)?.unwrap_or(TimeRef::Unspecified);
    if flags.contains_key(&AspectFlag::Completable) && matches!(time, TimeRef::BeforeNow | TimeRef::Now) {
        return Err(DamrError::BadTenseAspect {
            detail: ":completable only applies to hypothetical or future events".into(),
        });
    }
    Ok(TenseAspect { time, flags })
}

/// The node that carries tense and aspect: the ARG1 of a speech-act root,
/// otherwise the root itself.
pub fn content_node(lex: &Lexicon, graph: &AmrGraph) -> Var {
    if lex.act_of_root(graph.root_concept()).is_some() {
        if let Some(v) = graph.child(graph.root(), "ARG1").and_then(Target::as_node) {
            return v.clone();
        }
    }
    graph.root().clone()
}

/// Adds the tense/aspect annotation implied by `tense` to the content node.
///
/// * imperative, future: `:completable` (+ when the content has a bounded
///   goal) and `:time (after :op1 now)`
/// * present: `:ongoing + :complete -` and `:time now`
/// * past: `:ongoing - :complete +` and `:time (before :op1 now)`
///
/// Flags already present with the same value are kept; a different value
/// is a conflict.
pub fn annotate_tense_aspect(
    lex: &Lexicon,
    graph: &AmrGraph,
    act: &SpeechAct,
    tense: SurfaceTense,
) -> Result<AmrGraph, DamrError> {
    use Polarity::{Minus, Plus};
    if tense == SurfaceTense::Imperative && !act.is_directive() {
        return Err(DamrError::TenseActMismatch {
            act: act.label.clone(),
            tense: tense.to_string(),
        });
    }
    let mut g = graph.clone();
    let content = content_node(lex, &g);
    let existing = decode_tense_aspect(&g, &content)?;

    let (flags, time) = match tense {
        SurfaceTense::Imperative | SurfaceTense::Future => {
            let concept = g.concept(&content).unwrap_or_default();
            let bounded = match super::normalize_action(lex, concept) {
                Ok(c) => c.is_bounded(&g, &content),
                Err(_) => has_bounded_goal(&generic_goal_roles(), &g, &content),
            };
            let sign = if bounded { Plus } else { Minus };
            (vec![(AspectFlag::Completable, sign)], TimeRef::AfterNow)
        }
        SurfaceTense::Present => (
            vec![(AspectFlag::Ongoing, Plus), (AspectFlag::Complete, Minus)],
            TimeRef::Now,
        ),
        SurfaceTense::Past => (
            vec![(AspectFlag::Ongoing, Minus), (AspectFlag::Complete, Plus)],
            TimeRef::BeforeNow,
        ),
    };

    for &(flag, value) in &flags {
        if let Some(old) = existing.flag(flag) {
            if old != value {
                return Err(DamrError::ConflictingAspect {
                    flag: flag.role().into(),
                    existing: old.symbol().into(),
                    wanted: value.symbol().into(),
                });
            }
        }
    }
    let has_time = time_of(&g, &content)?;
    if let Some(old) = has_time {
        if old != time {
            return Err(DamrError::ConflictingAspect {
                flag: "time".into(),
                existing: format!("{old:?}"),
                wanted: format!("{time:?}"),
            });
        }
    }

    for &(flag, value) in flags.iter().rev() {
        if existing.flag(flag).is_none() {
            g.prepend_edge(content.clone(), flag.role(), Target::Const(Constant::Polarity(value)))?;
        }
    }
    if has_time.is_none() {
        let now = |g: &mut AmrGraph| -> Result<Var, DamrError> {
            let n = g.fresh_var("now");
            g.add_node(n.clone(), "now")?;
            Ok(n)
        };
        let node = match time {
            TimeRef::Now => now(&mut g)?,
            TimeRef::BeforeNow | TimeRef::AfterNow => {
                let word = if time == TimeRef::BeforeNow { "before" } else { "after" };
                let t = g.fresh_var(word);
                g.add_node(t.clone(), word)?;
                let n = now(&mut g)?;
                g.add_edge(t.clone(), "op1", Target::Node(n))?;
                t
            }
            TimeRef::Unspecified => unreachable!("every tense fixes a time"),
        };
        g.add_edge(content, "time", Target::Node(node))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::{parse_penman, serialize_penman};

    const MOVE: &str = "(m / move-01 :ARG0 (i / i) :direction (f / forward) \
        :extent (d / distance-quantity :quant 10 :unit (f2 / foot)))";

    fn assertion() -> SpeechAct {
        Lexicon::builtin().act("assertion").unwrap().clone()
    }

    #[test]
    fn decodes_figure_annotations() {
        let g = parse_penman("(g / go-02 :completable + :ARG0 (r / robot) :time (a2 / after :op1 (n / now)))").unwrap();
        let ta = decode_tense_aspect(&g, g.root()).unwrap();
        assert_eq!(ta.time, TimeRef::AfterNow);
        assert_eq!(ta.flag(AspectFlag::Completable), Some(Polarity::Plus));
    }

    #[test]
    fn rejects_bad_flags() {
        for bad in [
            "(g / go-02 :completable yes)",
            "(g / go-02 :ongoing + :ongoing -)",
            "(g / go-02 :completable + :time (n / now))",
            "(g / go-02 :time (n / now) :time (n2 / now))",
        ] {
            let g = parse_penman(bad).unwrap();
            assert!(
                matches!(decode_tense_aspect(&g, g.root()), Err(DamrError::BadTenseAspect { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn future_is_completable_when_bounded() {
        let g = parse_penman(MOVE).unwrap();
        let out = annotate_tense_aspect(Lexicon::builtin(), &g, &assertion(), SurfaceTense::Future).unwrap();
        let text = serialize_penman(&out);
        assert!(text.starts_with("(m / move-01\n  :completable +\n"), "{text}");
        assert!(text.ends_with(":time (a / after\n    :op1 (n / now)))"), "{text}");
    }

    #[test]
    fn present_and_past_flags() {
        let g = parse_penman(MOVE).unwrap();
        let lex = Lexicon::builtin();
        let present = annotate_tense_aspect(lex, &g, &assertion(), SurfaceTense::Present).unwrap();
        let ta = decode_tense_aspect(&present, present.root()).unwrap();
        assert_eq!(ta.time, TimeRef::Now);
        assert_eq!(ta.flag(AspectFlag::Ongoing), Some(Polarity::Plus));
        assert_eq!(ta.flag(AspectFlag::Complete), Some(Polarity::Minus));
        let past = annotate_tense_aspect(lex, &g, &assertion(), SurfaceTense::Past).unwrap();
        let ta = decode_tense_aspect(&past, past.root()).unwrap();
        assert_eq!(ta.time, TimeRef::BeforeNow);
        assert_eq!(ta.flag(AspectFlag::Ongoing), Some(Polarity::Minus));
        assert_eq!(ta.flag(AspectFlag::Complete), Some(Polarity::Plus));
    }

    #[test]
    fn conflicts_and_mismatches() {
        let lex = Lexicon::builtin();
        let g = parse_penman("(m / move-01 :ongoing -)").unwrap();
        assert!(matches!(
            annotate_tense_aspect(lex, &g, &assertion(), SurfaceTense::Present),
            Err(DamrError::ConflictingAspect { .. })
        ));
        assert!(matches!(
            annotate_tense_aspect(lex, &g, &assertion(), SurfaceTense::Imperative),
            Err(DamrError::TenseActMismatch { .. })
        ));
        // an identical existing flag is kept, not duplicated
        let again = annotate_tense_aspect(lex, &g, &assertion(), SurfaceTense::Past).unwrap();
        assert_eq!(again.edges().iter().filter(|e| e.role == "ongoing").count(), 1);
    }

    #[test]
    fn unbounded_turn_is_not_completable() {
        let lex = Lexicon::builtin();
        let command = lex.act("command").unwrap();
        let g = parse_penman("(t / turn-01 :ARG0 (y / you))").unwrap();
        let out = annotate_tense_aspect(lex, &g, command, SurfaceTense::Imperative).unwrap();
        let ta = decode_tense_aspect(&out, out.root()).unwrap();
        assert_eq!(ta.flag(AspectFlag::Completable), Some(Polarity::Minus));
    }
}
