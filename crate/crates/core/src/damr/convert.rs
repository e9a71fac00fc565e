use super::error::DamrError;
use super::lexicon::{Lexicon, RobotConcept, SpeechAct};
use super::tense::{annotate_tense_aspect, AspectFlag, SurfaceTense};
use super::validate::{validate_dialogue_amr, DialogueAmr};
use crate::amr::{normalize_role, AmrGraph, Constant, Mode, Target, Var};

/// Maps a Standard-AMR concept to the robot concept it expresses: identity
/// for a lexicon roleset or alias, otherwise by the lemma before the sense
/// number.
pub fn normalize_action<'a>(lex: &'a Lexicon, label: &str) -> Result<&'a RobotConcept, DamrError> {
    if let Some(c) = lex.concept_by_roleset(label) {
        return Ok(c);
    }
    lex.concept_by_trigger(strip_sense(label))
        .ok_or_else(|| DamrError::NoConceptMapping { label: label.to_string() })
}

fn strip_sense(label: &str) -> &str {
    match label.rsplit_once('-') {
        Some((lemma, sense)) if !sense.is_empty() && sense.bytes().all(|b| b.is_ascii_digit()) => lemma,
        _ => label,
    }
}

fn has_sense(label: &str) -> bool {
    strip_sense(label) != label
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertOptions {
    pub speaker: String,
    pub addressee: String,
    /// Tense of the utterance. Imperative mode implies imperative; for other
    /// input without a tense no tense/aspect is added.
    pub tense: Option<SurfaceTense>,
    /// Treat a first-person statement about one's own future action as a
    /// promise rather than an assertion.
    pub promise: bool,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            speaker: "commander".into(),
            addressee: "robot".into(),
            tense: None,
            promise: false,
        }
    }
}

fn mode_of(g: &AmrGraph) -> Option<Mode> {
    g.outgoing(g.root()).find_map(|e| match &e.target {
        Target::Const(Constant::Mode(m)) => Some(*m),
        _ => None,
    })
}

/// Speech act of a Standard-AMR graph: `:mode imperative` is a command;
/// `:mode interrogative` or an `amr-unknown` node is a question; anything
/// else is an assertion, or a promise when the caller says so.
pub fn infer_act<'a>(lex: &'a Lexicon, g: &AmrGraph, promise: bool) -> &'a SpeechAct {
    let label = match mode_of(g) {
        Some(Mode::Imperative) => "command",
        Some(Mode::Interrogative) => "question",
        _ if g.instances().values().any(|c| c == "amr-unknown") => "question",
        _ if promise => "promise",
        _ => "assertion",
    };
    lex.act(label).expect("built-in act")
}

fn target_of(g: &AmrGraph, var: &Var, role: &str) -> Option<Var> {
    g.child(var, role).and_then(Target::as_node).cloned()
}

fn rewrite_movement(g: &mut AmrGraph, content: &Var, source_label: &str) -> Result<(), DamrError> {
    let agent = target_of(g, content, "ARG0");
    let from_move = strip_sense(source_label) == "move";
    let reflexive = |e: &crate::amr::Edge| {
        &e.source == content && e.role.eq_ignore_ascii_case("ARG1") && agent.is_some() && e.target.as_node() == agent.as_ref()
    };
    g.retain_edges(|e| !reflexive(e));
    for e in g.edges_mut().filter(|e| &e.source == content) {
        let renamed = match e.role.to_ascii_lowercase().as_str() {
            "destination" => "ARG4",
            "source" => "ARG3",
            "extent" => "ARG1",
            "arg2" if from_move => "ARG4",
            _ => continue,
        };
        e.role = renamed.to_string();
    }
    if g.child(content, "ARG3").is_none() {
        let h = g.fresh_var("here");
        g.add_node(h.clone(), "here")?;
        g.add_edge(content.clone(), "ARG3", Target::Node(h))?;
    }
    Ok(())
}

/// Edge order on the content node: aspect flags, numbered arguments,
/// everything else, then `:time`.
fn content_edge_rank(role: &str) -> (u8, u32) {
    if AspectFlag::from_role(role).is_some() {
        return (0, 0);
    }
    if role.eq_ignore_ascii_case("time") {
        return (3, 0);
    }
    let (base, inverted) = normalize_role(role);
    match base.strip_prefix("ARG").and_then(|n| n.parse::<u32>().ok()) {
        Some(n) if !inverted => (1, n),
        _ => (2, 0),
    }
}

/// Converts a Standard-AMR graph into Dialogue-AMR: infers the speech act,
/// maps the matrix predicate onto its robot concept and frame, merges `you`
/// and `i` into the addressee and speaker, adds tense and aspect, and wraps
/// the result in a speech-act envelope. The output is validated before it
/// is returned.
pub fn convert_to_dialogue_amr(lex: &Lexicon, std: &AmrGraph, opts: &ConvertOptions) -> Result<DialogueAmr, DamrError> {
    let root_concept = std.root_concept();
    if lex.act_of_root(root_concept).is_some() {
        return Err(DamrError::AlreadyDialogueAmr {
            concept: root_concept.to_string(),
        });
    }
    if matches!(root_concept, "and" | "or" | "multi-sentence") || !has_sense(root_concept) {
        return Err(DamrError::UnsupportedStructure {
            detail: format!("root `{root_concept}` is not a single predicate"),
        });
    }
    let mode = mode_of(std);
    let act = infer_act(lex, std, opts.promise);
    let concept = normalize_action(lex, root_concept)?;

    let mut g = std.clone();
    let content = g.root().clone();
    g.set_concept(&content, concept.roleset())?;
    g.retain_edges(|e| !(e.source == content && e.role.eq_ignore_ascii_case("mode")));
    if concept.name == "MOVEMENT" {
        rewrite_movement(&mut g, &content, root_concept)?;
    }

    let root = g.fresh_var(&act.label);
    g.add_node(root.clone(), format!("{}-SA", act.label))?;
    let speaker = g.fresh_var(&opts.speaker);
    g.add_node(speaker.clone(), opts.speaker.as_str())?;
    let addressee = g.fresh_var(&opts.addressee);
    g.add_node(addressee.clone(), opts.addressee.as_str())?;
    g.add_edge(root.clone(), "ARG0", Target::Node(speaker.clone()))?;
    g.add_edge(root.clone(), "ARG2", Target::Node(addressee.clone()))?;
    g.add_edge(root.clone(), "ARG1", Target::Node(content.clone()))?;
    g.set_root(&root)?;

    let pronouns: Vec<(Var, Var)> = g
        .instances()
        .iter()
        .filter_map(|(v, c)| match c.as_str() {
            "you" => Some((v.clone(), addressee.clone())),
            "i" => Some((v.clone(), speaker.clone())),
            _ => None,
        })
        .collect();
    for (old, new) in pronouns {
        g.merge_node_into(&old, &new)?;
    }
    g.sort_outgoing_by_key(&content, |e| content_edge_rank(&e.role));

    let tense = match (opts.tense, mode) {
        (Some(t), _) => Some(t),
        (None, Some(Mode::Imperative)) => Some(SurfaceTense::Imperative),
        (None, _) => None,
    };
    if let Some(t) = tense {
        g = annotate_tense_aspect(lex, &g, act, t)?;
    }
    g.prune_unreachable();
    g.check(true)?;

    if !concept.is_compatible(&act.label) {
        return Err(DamrError::IncompatibleActConcept {
            act: act.label.clone(),
            concept: concept.name.clone(),
        });
    }
    validate_dialogue_amr(lex, &g).map_err(|mut errs| errs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::{parse_penman, serialize_penman};
    use crate::smatch::smatch_exact;

    fn convert(text: &str) -> Result<DialogueAmr, DamrError> {
        convert_to_dialogue_amr(Lexicon::builtin(), &parse_penman(text).unwrap(), &ConvertOptions::default())
    }

    #[test]
    fn normalizes_rotation_lemmas() {
        let lex = Lexicon::builtin();
        assert_eq!(normalize_action(lex, "rotate-01").unwrap().roleset(), "turn-01");
        assert_eq!(normalize_action(lex, "pivot-01").unwrap().roleset(), "turn-01");
        assert_eq!(normalize_action(lex, "go-02").unwrap().name, "MOVEMENT");
        assert_eq!(normalize_action(lex, "eat-01").unwrap_err().code(), "NoConceptMapping");
    }

    #[test]
    fn drive_to_the_door() {
        let d = convert("(d / drive-01 :mode imperative :ARG0 (y / you) :destination (d2 / door))").unwrap();
        let expected = parse_penman(
            "(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot)
               :ARG1 (g / go-02 :completable + :ARG0 r :ARG3 (h / here) :ARG4 (d / door)
                 :time (a2 / after :op1 (n / now))))",
        )
        .unwrap();
        assert_eq!(smatch_exact(&d.graph, &expected).unwrap().f1, 1.0, "{}", serialize_penman(&d.graph));
    }

    #[test]
    fn reflexive_move_drops_arg1() {
        let d = convert("(m / move-01 :mode imperative :ARG0 (y / you) :ARG1 y :ARG2 (w / wall))").unwrap();
        let text = serialize_penman(&d.graph);
        assert!(!text.contains(":ARG1 r"), "{text}");
        assert!(text.contains(":ARG4 (w / wall)"), "{text}");
    }

    #[test]
    fn unbounded_turn_command() {
        let d = convert("(t / turn-01 :mode imperative :ARG0 (y / you))").unwrap();
        assert_eq!(d.concept.name, "ROTATION");
        assert_eq!(d.completable(), Some(crate::amr::Polarity::Minus));
    }

    #[test]
    fn questions_and_promises() {
        let lex = Lexicon::builtin();
        let q = parse_penman("(s / see-01 :ARG0 (y / you) :ARG1 (l / light) :polarity (a / amr-unknown))").unwrap();
        assert_eq!(infer_act(lex, &q, false).label, "question");
        let p = parse_penman("(m / move-01 :ARG0 (i / i))").unwrap();
        assert_eq!(infer_act(lex, &p, true).label, "promise");
        assert_eq!(infer_act(lex, &p, false).label, "assertion");
        let opts = ConvertOptions {
            speaker: "robot".into(),
            addressee: "commander".into(),
            tense: Some(SurfaceTense::Future),
            promise: true,
        };
        let d = convert_to_dialogue_amr(lex, &p, &opts).unwrap();
        assert_eq!(d.act.label, "promise");
        let arg0 = d.graph.child(&d.content, "ARG0").and_then(Target::as_node).unwrap();
        assert_eq!(arg0, &d.speaker);
    }

    #[test]
    fn rejects_out_of_domain_input() {
        assert_eq!(convert("(e / eat-01 :mode imperative)").unwrap_err().code(), "NoConceptMapping");
        assert_eq!(
            convert("(a / and :op1 (g / go-02) :op2 (t / turn-01))").unwrap_err().code(),
            "UnsupportedStructure"
        );
        let converted = convert("(t / turn-01 :mode imperative :ARG0 (y / you))").unwrap();
        assert_eq!(
            convert_to_dialogue_amr(Lexicon::builtin(), &converted.graph, &ConvertOptions::default())
                .unwrap_err()
                .code(),
            "AlreadyDialogueAmr"
        );
        // see-01 is not a command concept
        assert_eq!(
            convert("(s / see-01 :mode imperative :ARG0 (y / you))").unwrap_err().code(),
            "IncompatibleActConcept"
        );
    }
}
