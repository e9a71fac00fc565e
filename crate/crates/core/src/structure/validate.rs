use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::relations::{RelationFamily, RelationRef};
use super::transcript::{Stream, Transcript, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Antecedent precedes the annotated utterance.
    V1,
    /// Antecedent belongs to the same TU.
    V2,
    /// A TU's first member has neither antecedent nor relation.
    V3,
    /// Every later TU member has both.
    V4,
    /// Relation family agrees with the floors and streams involved.
    V5,
    /// `k*` points at the last utterance of a same-speaker run.
    V6,
    /// TU ids are positive.
    V7,
    /// Relation labels come from the taxonomy.
    V8,
}

impl Rule {
    pub const ALL: [Rule; 8] = [Rule::V1, Rule::V2, Rule::V3, Rule::V4, Rule::V5, Rule::V6, Rule::V7, Rule::V8];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Utterance id of the offending row.
    pub row: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub violations: Vec<Violation>,
    pub utterances: usize,
    /// Utterances assigned to a TU.
    pub annotated: usize,
    pub coverage: f64,
    /// `(id, code)` for rows using labels outside the published taxonomy.
    pub nonstandard: Vec<(u64, String)>,
}

fn check_family(family: RelationFamily, code: &str, u: &Utterance, ante: &Utterance) -> Option<String> {
    let (uf, af) = (u.stream.floor(), ante.stream.floor());
    match family {
        RelationFamily::Expansion if u.stream != ante.stream => Some(format!(
            "{code} joins {} to {}; expansions stay within one stream",
            u.stream, ante.stream
        )),
        RelationFamily::Response if uf != af => Some(format!(
            "{code} on {} answers {} on the other floor",
            u.stream, ante.stream
        )),
        RelationFamily::Response if u.stream == ante.stream => Some(format!(
            "{code} answers an utterance from the same stream {}",
            u.stream
        )),
        RelationFamily::Translation if uf == af => Some(format!(
            "{code} on {} translates {} on the same floor",
            u.stream, ante.stream
        )),
        RelationFamily::Translation if code.starts_with("translation-r") && u.stream != Stream::DmRn => {
            Some(format!("{code} must be emitted on DM-RN, found {}", u.stream))
        }
        RelationFamily::Translation if code.starts_with("translation-l") && u.stream != Stream::DmCmd => {
            Some(format!("{code} must be emitted on DM-CMD, found {}", u.stream))
        }
        _ => None,
    }
}

/// Checks every annotated row and returns the violations in row order.
/// Rows without a TU are skipped.
pub fn validate_structure(t: &Transcript) -> Vec<Violation> {
    let mut first_of_tu: HashMap<i64, u64> = HashMap::new();
    for u in t.utterances() {
        if let Some(tu) = u.annotation.tu {
            first_of_tu.entry(tu).or_insert(u.id);
        }
    }
    let mut out = Vec::new();
    for u in t.utterances() {
        let Some(tu) = u.annotation.tu else { continue };
        let mut flag = |rule, message: String| out.push(Violation { rule, row: u.id, message });
        let a = &u.annotation;

        if first_of_tu[&tu] == u.id {
            if a.antecedent.is_some() || a.relation.is_some() {
                flag(Rule::V3, format!("first utterance of TU {tu} carries an antecedent or relation"));
            }
        } else if a.antecedent.is_none() || a.relation.is_none() {
            flag(Rule::V4, format!("member of TU {tu} lacks an antecedent or relation"));
        } else if let (Some(ar), Some(rel)) = (a.antecedent, &a.relation) {
            match t.get(ar.target).filter(|x| x.id < u.id) {
                None => flag(Rule::V1, format!("antecedent {ar} does not precede {}", u.id)),
                Some(ante) => {
                    let same_tu = ante.annotation.tu == Some(tu);
                    if !same_tu {
                        flag(Rule::V2, format!("antecedent {ar} is outside TU {tu}"));
                    }
                    if let Some(label) = rel.known() {
                        if let Some(msg) = check_family(label.family(), label.code(), u, ante) {
                            flag(Rule::V5, msg);
                        }
                    }
                    if ar.sequence && same_tu {
                        // runs are per stream: the two DM streams address different listeners
                        let next = t
                            .utterances()
                            .iter()
                            .find(|x| x.id > ante.id && x.id < u.id && x.annotation.tu == Some(tu));
                        if next.is_some_and(|x| x.stream == ante.stream) {
                            flag(Rule::V6, format!("{ar} does not end a same-speaker run in TU {tu}"));
                        }
                    }
                }
            }
        }
        if tu <= 0 {
            flag(Rule::V7, format!("TU id {tu} is not positive"));
        }
        if let Some(RelationRef::Unknown(raw)) = &a.relation {
            flag(Rule::V8, format!("`{raw}` is not a relation label"));
        }
    }
    out
}

pub fn structure_report(t: &Transcript) -> StructureReport {
    let annotated = t.utterances().iter().filter(|u| u.annotation.tu.is_some()).count();
    let nonstandard = t
        .utterances()
        .iter()
        .filter_map(|u| {
            let l = u.annotation.relation.as_ref()?.known()?;
            l.is_nonstandard().then(|| (u.id, l.code().to_string()))
        })
        .collect();
    StructureReport {
        violations: validate_structure(t),
        utterances: t.len(),
        annotated,
        coverage: if t.is_empty() { 0.0 } else { annotated as f64 / t.len() as f64 },
        nonstandard,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{load_transcript, parse_transcript, LoadOptions, HEADER};

    fn fixture(name: &str) -> Transcript {
        let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        load_transcript(path, LoadOptions::lenient()).unwrap()
    }

    #[test]
    fn worked_tables_are_clean() {
        for f in ["simple_tu.tsv", "complex_tu.tsv", "interleaved_tu.tsv", "photo_offer.tsv"] {
            assert_eq!(validate_structure(&fixture(f)), [], "{f}");
        }
    }

    #[test]
    fn each_mutation_breaks_one_rule() {
        let cases = [
            ("v1_forward_antecedent", Rule::V1, 5),
            ("v2_cross_tu_antecedent", Rule::V2, 11),
            ("v3_first_member_with_relation", Rule::V3, 5),
            ("v4_member_without_relation", Rule::V4, 6),
            ("v5_family_floor_mismatch", Rule::V5, 2),
            ("v6_sequence_not_at_run_end", Rule::V6, 8),
            ("v7_nonpositive_tu", Rule::V7, 6),
            ("v8_unknown_relation", Rule::V8, 4),
        ];
        for (name, rule, row) in cases {
            let v = validate_structure(&fixture(&format!("mutations/{name}.tsv")));
            let got: Vec<(Rule, u64)> = v.iter().map(|x| (x.rule, x.row)).collect();
            assert_eq!(got, [(rule, row)], "{name}: {v:?}");
        }
    }

    #[test]
    fn report_counts_coverage_and_offer() {
        let t = parse_transcript(
            &format!("{HEADER}\n1\t\tCMD\tgo\t1\n2\t\tDM-CMD\tshall I?\t1\t1\toffer\n3\t\tCMD\tum\n"),
            LoadOptions::default(),
        )
        .unwrap();
        let r = structure_report(&t);
        assert!(r.violations.is_empty());
        assert_eq!((r.utterances, r.annotated), (3, 2));
        assert!((r.coverage - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.nonstandard, [(2, "offer".to_string())]);
    }

    #[test]
    fn translation_stream_rules() {
        let t = parse_transcript(
            &format!("{HEADER}\n1\t\tCMD\tgo\t1\n2\t\tDM-CMD\tgo\t1\t1\ttranslation-r-direct\n3\t\tRN\tdone\t1\t1\ttranslation-l\n"),
            LoadOptions::default(),
        )
        .unwrap();
        let rules: Vec<(Rule, u64)> = validate_structure(&t).iter().map(|v| (v.rule, v.row)).collect();
        assert_eq!(rules, [(Rule::V5, 2), (Rule::V5, 3)]);
    }
}
