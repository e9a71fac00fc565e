use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::relations::{RelationLabel, RelationRef};

pub const HEADER: &str = "id\ttimestamp\tstream\ttext\ttu\tantecedent\trelation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stream {
    Cmd,
    DmCmd,
    DmRn,
    Rn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Floor {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Participant {
    Commander,
    DialogueManager,
    Navigator,
}

impl Stream {
    pub fn token(self) -> &'static str {
        match self {
            Stream::Cmd => "CMD",
            Stream::DmCmd => "DM-CMD",
            Stream::DmRn => "DM-RN",
            Stream::Rn => "RN",
        }
    }

    pub fn floor(self) -> Floor {
        match self {
            Stream::Cmd | Stream::DmCmd => Floor::Left,
            Stream::DmRn | Stream::Rn => Floor::Right,
        }
    }

    pub fn speaker(self) -> Participant {
        match self {
            Stream::Cmd => Participant::Commander,
            Stream::DmCmd | Stream::DmRn => Participant::DialogueManager,
            Stream::Rn => Participant::Navigator,
        }
    }
}

impl FromStr for Stream {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.replace('\u{2192}', "-").replace("->", "-").as_str() {
            "CMD" => Ok(Stream::Cmd),
            "DM-CMD" => Ok(Stream::DmCmd),
            "DM-RN" => Ok(Stream::DmRn),
            "RN" => Ok(Stream::Rn),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Serialize for Stream {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

/// `k` or `k*`; the starred form points at the whole same-speaker run that
/// ends at `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntecedentRef {
    pub target: u64,
    pub sequence: bool,
}

impl FromStr for AntecedentRef {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (digits, sequence) = match s.strip_suffix('*') {
            Some(d) => (d, true),
            None => (s, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        match digits.parse::<u64>() {
            Ok(target) if target > 0 => Ok(AntecedentRef { target, sequence }),
            _ => Err(()),
        }
    }
}

impl fmt::Display for AntecedentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.target, if self.sequence { "*" } else { "" })
    }
}

impl Serialize for AntecedentRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct StructureAnnotation {
    pub tu: Option<i64>,
    pub antecedent: Option<AntecedentRef>,
    pub relation: Option<RelationRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Utterance {
    pub id: u64,
    pub timestamp: Option<f64>,
    pub stream: Stream,
    pub text: String,
    #[serde(flatten)]
    pub annotation: StructureAnnotation,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line 1: expected header `{}`, found `{found}`", HEADER.replace('\t', "\\t"))]
    BadHeader { found: String },
    #[error("line {row}: unknown stream `{value}`")]
    BadStream { row: usize, value: String },
    #[error("line {row}: id {id} does not follow {previous}")]
    NonMonotonicId { row: usize, id: u64, previous: u64 },
    #[error("line {row}: bad antecedent `{value}`")]
    BadAntecedentSyntax { row: usize, value: String },
    #[error("line {row}: unknown relation `{value}`")]
    UnknownRelation { row: usize, value: String },
    #[error("line {row}: bad {column} `{value}`")]
    BadField { row: usize, column: &'static str, value: String },
    #[error("line {row}: expected 4 to 7 columns, found {found}")]
    ColumnCount { row: usize, found: usize },
    #[error("line {row}: relation without antecedent")]
    RelationWithoutAntecedent { row: usize },
    #[error("line {row}: antecedent without relation")]
    AntecedentWithoutRelation { row: usize },
    #[error("line {row}: empty utterance text")]
    EmptyText { row: usize },
}

impl TranscriptError {
    pub fn code(&self) -> &'static str {
        match self {
            TranscriptError::Io { .. } => "Io",
            TranscriptError::BadHeader { .. } => "BadHeader",
            TranscriptError::BadStream { .. } => "BadStream",
            TranscriptError::NonMonotonicId { .. } => "NonMonotonicId",
            TranscriptError::BadAntecedentSyntax { .. } => "BadAntecedentSyntax",
            TranscriptError::UnknownRelation { .. } => "UnknownRelation",
            TranscriptError::BadField { .. } => "BadField",
            TranscriptError::ColumnCount { .. } => "ColumnCount",
            TranscriptError::RelationWithoutAntecedent { .. } => "RelationWithoutAntecedent",
            TranscriptError::AntecedentWithoutRelation { .. } => "AntecedentWithoutRelation",
            TranscriptError::EmptyText { .. } => "EmptyText",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Reject relation labels outside the taxonomy. When off they load as
    /// [`RelationRef::Unknown`] and surface as V8 during validation.
    pub strict_relations: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { strict_relations: true }
    }
}

impl LoadOptions {
    pub fn lenient() -> Self {
        LoadOptions { strict_relations: false }
    }
}

/// Time-ordered utterances across the four streams.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Transcript {
    utterances: Vec<Utterance>,
    #[serde(skip)]
    index: HashMap<u64, usize>,
}

impl Transcript {
    /// Builds a transcript from utterances already in strictly increasing
    /// id order.
    pub fn from_utterances(utterances: Vec<Utterance>) -> Result<Transcript, TranscriptError> {
        for (i, w) in utterances.windows(2).enumerate() {
            if w[1].id <= w[0].id {
                return Err(TranscriptError::NonMonotonicId {
                    row: i + 3,
                    id: w[1].id,
                    previous: w[0].id,
                });
            }
        }
        let index = utterances.iter().enumerate().map(|(i, u)| (u.id, i)).collect();
        Ok(Transcript { utterances, index })
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn get(&self, id: u64) -> Option<&Utterance> {
        self.index.get(&id).map(|&i| &self.utterances[i])
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    /// Distinct TU ids in order of first appearance.
    pub fn tu_ids(&self) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::new();
        for u in &self.utterances {
            if let Some(t) = u.annotation.tu {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Members of `tu` in id order.
    pub fn tu_members(&self, tu: i64) -> Vec<&Utterance> {
        self.utterances.iter().filter(|u| u.annotation.tu == Some(tu)).collect()
    }

    /// Writes the transcript back out in the TSV format it was read from.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for u in &self.utterances {
            let a = &u.annotation;
            let cells = [
                u.id.to_string(),
                u.timestamp.map(|t| t.to_string()).unwrap_or_default(),
                u.stream.to_string(),
                u.text.clone(),
                a.tu.map(|t| t.to_string()).unwrap_or_default(),
                a.antecedent.map(|x| x.to_string()).unwrap_or_default(),
                a.relation.as_ref().map(|r| r.to_string()).unwrap_or_default(),
            ];
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

pub fn load_transcript(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Transcript, TranscriptError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TranscriptError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_transcript(&text, opts)
}

/// Parses transcript TSV. Blank lines are ignored and trailing empty
/// columns may be left off.
pub fn parse_transcript(text: &str, opts: LoadOptions) -> Result<Transcript, TranscriptError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim_end_matches('\r')).unwrap_or("");
    if header != HEADER {
        return Err(TranscriptError::BadHeader {
            found: header.to_string(),
        });
    }
    let mut utterances: Vec<Utterance> = Vec::new();
    for (i, raw) in lines {
        let row = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(4..=7).contains(&cols.len()) {
            return Err(TranscriptError::ColumnCount { row, found: cols.len() });
        }
        let cell = |i: usize| cols.get(i).map_or("", |s| s.trim());
        let bad = |column, value: &str| TranscriptError::BadField {
            row,
            column,
            value: value.to_string(),
        };

        let id: u64 = cell(0).parse().ok().filter(|&n| n > 0).ok_or_else(|| bad("id", cell(0)))?;
        if let Some(prev) = utterances.last() {
            if id <= prev.id {
                return Err(TranscriptError::NonMonotonicId {
                    row,
                    id,
                    previous: prev.id,
                });
            }
        }
        let timestamp = match cell(1) {
            "" => None,
            t => Some(t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("timestamp", t))?),
        };
        let stream: Stream = cell(2).parse().map_err(|_| TranscriptError::BadStream {
            row,
            value: cell(2).to_string(),
        })?;
        let text = cell(3).to_string();
        if text.is_empty() {
            return Err(TranscriptError::EmptyText { row });
        }
        let tu = match cell(4) {
            "" => None,
            t => Some(t.parse::<i64>().map_err(|_| bad("tu", t))?),
        };
        let antecedent = match cell(5) {
            "" => None,
            a => Some(a.parse::<AntecedentRef>().map_err(|_| TranscriptError::BadAntecedentSyntax {
                row,
                value: a.to_string(),
            })?),
        };
        let relation = match cell(6) {
            "" => None,
            r => Some(match RelationLabel::lookup(r) {
                Some(l) => RelationRef::Known(l),
                None if opts.strict_relations => {
                    return Err(TranscriptError::UnknownRelation {
                        row,
                        value: r.to_string(),
                    })
                }
                None => RelationRef::Unknown(r.to_string()),
            }),
        };
        match (&antecedent, &relation) {
            (None, Some(_)) => return Err(TranscriptError::RelationWithoutAntecedent { row }),
            (Some(_), None) => return Err(TranscriptError::AntecedentWithoutRelation { row }),
            _ => {}
        }
        utterances.push(Utterance {
            id,
            timestamp,
            stream,
            text,
            annotation: StructureAnnotation {
                tu,
                antecedent,
                relation,
            },
        });
    }
    Transcript::from_utterances(utterances)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsv(rows: &[&str]) -> String {
        let mut s = format!("{HEADER}\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn header_only_is_empty() {
        let t = parse_transcript(&tsv(&[]), LoadOptions::default()).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn loads_rows_and_short_lines() {
        let t = parse_transcript(
            &tsv(&["1\t0\tCMD\tmove forward three feet\t1", "2\t1.5\tDM→CMD\tok\t1\t1*\tack-wilco"]),
            LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        let u = t.get(2).unwrap();
        assert_eq!(u.stream, Stream::DmCmd);
        assert_eq!(u.timestamp, Some(1.5));
        assert_eq!(u.annotation.antecedent, Some(AntecedentRef { target: 1, sequence: true }));
        assert_eq!(u.annotation.relation.as_ref().unwrap().to_string(), "ack-wilco");
    }

    #[test]
    fn row_precise_errors() {
        let err = |rows: &[&str]| parse_transcript(&tsv(rows), LoadOptions::default()).unwrap_err();
        assert!(matches!(err(&["1\t\tCMD\tgo\t1\t\tcontinue"]), TranscriptError::RelationWithoutAntecedent { row: 2 }));
        assert!(matches!(err(&["1\t\tCMD\tgo\t1\t1\t"]), TranscriptError::AntecedentWithoutRelation { row: 2 }));
        assert!(matches!(err(&["1\t\tBOT\tgo"]), TranscriptError::BadStream { row: 2, .. }));
        assert!(matches!(err(&["2\t\tCMD\tgo", "2\t\tCMD\tgo"]), TranscriptError::NonMonotonicId { row: 3, .. }));
        assert!(matches!(err(&["1\t\tCMD\tgo\t1\t1**\tcontinue"]), TranscriptError::BadAntecedentSyntax { .. }));
        assert!(matches!(err(&["1\t\tCMD\tgo\t1\t0\tcontinue"]), TranscriptError::BadAntecedentSyntax { .. }));
        assert!(matches!(err(&["1\t\tCMD\tgo\t1\t1\tflying"]), TranscriptError::UnknownRelation { row: 2, .. }));
        assert!(matches!(err(&["1\t\tCMD\t"]), TranscriptError::EmptyText { row: 2 }));
        assert!(matches!(err(&["x\t\tCMD\tgo"]), TranscriptError::BadField { column: "id", .. }));
        assert!(matches!(err(&["1\t\tCMD\tgo\tone"]), TranscriptError::BadField { column: "tu", .. }));
        assert!(matches!(
            parse_transcript("id\ttext\n", LoadOptions::default()),
            Err(TranscriptError::BadHeader { .. })
        ));
    }

    #[test]
    fn lenient_keeps_unknown_labels() {
        let t = parse_transcript(&tsv(&["1\t\tCMD\tgo\t1", "2\t\tRN\tok\t1\t1\tack-flying"]), LoadOptions::lenient()).unwrap();
        assert_eq!(t.get(2).unwrap().annotation.relation, Some(RelationRef::Unknown("ack-flying".into())));
    }

    #[test]
    fn tsv_round_trip() {
        let text = tsv(&["1\t0\tCMD\tgo\t1\t\t", "2\t45.75\tRN\tdone\t1\t1*\tack-done"]);
        let t = parse_transcript(&text, LoadOptions::default()).unwrap();
        assert_eq!(t.to_tsv(), text);
    }
}
