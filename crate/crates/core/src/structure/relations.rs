use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationFamily {
    Expansion,
    Translation,
    Response,
}

const TAXONOMY: &[(&str, RelationFamily)] = {
    use RelationFamily::*;
    &[
        ("continue", Expansion),
        ("correction", Expansion),
        ("link-next", Expansion),
        ("summarization", Expansion),
        ("translation-l", Translation),
        ("translation-r-direct", Translation),
        ("translation-r-contextual", Translation),
        ("translation-r-landmark", Translation),
        ("translation-r-situated", Translation),
        ("translation-r-history", Translation),
        ("translation-r-default", Translation),
        ("translation-l-partial", Translation),
        ("translation-r-partial", Translation),
        ("quotation", Translation),
        ("comment", Translation),
        ("processing", Response),
        ("ack-underspecified", Response),
        ("ack-understand", Response),
        ("ack-unsure", Response),
        ("ack-try", Response),
        ("ack-wilco", Response),
        ("ack-will-do-prep", Response),
        ("ack-doing", Response),
        ("ack-doing-prep", Response),
        ("ack-done", Response),
        ("ack-cant", Response),
        ("ack-partial", Response),
        ("clar-request", Response),
        ("clar-repair", Response),
        ("clar-repeat", Response),
        ("clar-done-status", Response),
        ("req-repeat", Response),
        ("req-done-status", Response),
        ("answer", Response),
        ("non-answer-response", Response),
        ("offer", Response),
        ("offer-accept", Response),
        ("offer-reject", Response),
        ("reciprocal", Response),
        ("third-turn-feedback", Response),
        ("other-response", Response),
    ]
};

/// Labels accepted but outside the published taxonomy.
const NONSTANDARD: &[&str] = &["offer"];

const ALIASES: &[(&str, &str)] = &[
    ("req-clar", "clar-request"),
    ("translation-left", "translation-l"),
    ("partial-translation-left", "translation-l-partial"),
    ("partial-translation-right", "translation-r-partial"),
    ("ack-will-comply", "ack-wilco"),
    ("partial-acknowledgment", "ack-partial"),
    ("partial-acknowledgement", "ack-partial"),
    ("question-response-answer", "answer"),
    ("question-response-non-answer-response", "non-answer-response"),
    ("non-answer", "non-answer-response"),
    ("reciprocal-response", "reciprocal"),
];

const PREFIXES: &[(&str, &str)] = &[
    ("acknowledge-", "ack-"),
    ("acknowledgment-", "ack-"),
    ("clarification-", "clar-"),
    ("request-", "req-"),
    ("translation-right-", "translation-r-"),
    ("translation-left-", "translation-l-"),
];

/// A relation code from the closed taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelationLabel {
    code: &'static str,
    family: RelationFamily,
}

impl RelationLabel {
    pub fn code(&self) -> &'static str {
        self.code
    }

    pub fn family(&self) -> RelationFamily {
        self.family
    }

    pub fn is_nonstandard(&self) -> bool {
        NONSTANDARD.contains(&self.code)
    }

    /// Resolves a code or long form (`Acknowledge will comply`,
    /// `translation-right direct`, `ack-can't`) to its canonical label.
    pub fn lookup(text: &str) -> Option<RelationLabel> {
        let mut norm: String = text
            .trim()
            .to_lowercase()
            .chars()
            .filter(|c| !matches!(c, '\'' | '\u{2019}'))
            .map(|c| if c.is_whitespace() || c == '_' { '-' } else { c })
            .collect();
        while norm.contains("--") {
            norm = norm.replace("--", "-");
        }
        let find = |code: &str| {
            TAXONOMY
                .iter()
                .find(|(c, _)| *c == code)
                .map(|&(code, family)| RelationLabel { code, family })
        };
        if let Some(l) = find(&norm) {
            return Some(l);
        }
        if let Some((_, canonical)) = ALIASES.iter().find(|(a, _)| *a == norm) {
            return find(canonical);
        }
        for (long, short) in PREFIXES {
            if let Some(rest) = norm.strip_prefix(long) {
                let candidate = format!("{short}{rest}");
                if let Some(l) = find(&candidate) {
                    return Some(l);
                }
                if let Some((_, canonical)) = ALIASES.iter().find(|(a, _)| *a == candidate) {
                    return find(canonical);
                }
            }
        }
        None
    }

    pub fn all() -> impl Iterator<Item = RelationLabel> {
        TAXONOMY.iter().map(|&(code, family)| RelationLabel { code, family })
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code)
    }
}

impl Serialize for RelationLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code)
    }
}

/// A relation cell as loaded: a taxonomy label, or the raw text when
/// loading leniently.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum RelationRef {
    Known(RelationLabel),
    Unknown(String),
}

impl RelationRef {
    pub fn known(&self) -> Option<RelationLabel> {
        match self {
            RelationRef::Known(l) => Some(*l),
            RelationRef::Unknown(_) => None,
        }
    }
}

impl fmt::Display for RelationRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationRef::Known(l) => l.fmt(f),
            RelationRef::Unknown(s) => f.write_str(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_code_has_one_family() {
        let codes: Vec<&str> = RelationLabel::all().map(|l| l.code()).collect();
        let mut dedup = codes.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(codes.len(), dedup.len());
        assert_eq!(codes.len(), 41);
    }

    #[test]
    fn long_forms_resolve() {
        let code = |s: &str| RelationLabel::lookup(s).map(|l| l.code());
        assert_eq!(code("req-clar"), Some("clar-request"));
        assert_eq!(code("Clarification request"), Some("clar-request"));
        assert_eq!(code("Acknowledge will comply"), Some("ack-wilco"));
        assert_eq!(code("ack-can't"), Some("ack-cant"));
        assert_eq!(code("Translation-right direct"), Some("translation-r-direct"));
        assert_eq!(code("Translation-left"), Some("translation-l"));
        assert_eq!(code("Request done status"), Some("req-done-status"));
        assert_eq!(code("Reciprocal response"), Some("reciprocal"));
        assert_eq!(code("Third-turn feedback"), Some("third-turn-feedback"));
        assert_eq!(code("ack-flying"), None);
    }

    #[test]
    fn families() {
        assert_eq!(RelationLabel::lookup("continue").unwrap().family(), RelationFamily::Expansion);
        assert_eq!(RelationLabel::lookup("quotation").unwrap().family(), RelationFamily::Translation);
        let offer = RelationLabel::lookup("offer").unwrap();
        assert_eq!(offer.family(), RelationFamily::Response);
        assert!(offer.is_nonstandard());
    }
}
