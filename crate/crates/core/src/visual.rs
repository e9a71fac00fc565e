//! Exploration-map item lists, photo-request strategies, and tracing photo
//! events back to the request that caused them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::structure::{Floor, Stream, Transcript, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Door,
    Shoe,
    Shovel,
    Other,
}

impl Category {
    /// Category from the alphabetic prefix of an item id.
    pub fn of_id(id: &str) -> Category {
        let prefix: String = id.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        match prefix.to_ascii_lowercase().as_str() {
            "door" => Category::Door,
            "shoe" => Category::Shoe,
            "shov" | "shovel" => Category::Shovel,
            _ => Category::Other,
        }
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "door" => Ok(Category::Door),
            "shoe" => Ok(Category::Shoe),
            "shovel" => Ok(Category::Shovel),
            "other" => Ok(Category::Other),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapItem {
    pub id: String,
    pub category: Category,
    pub scanned: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExplorationMap {
    pub items: Vec<MapItem>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VisualError {
    #[error("line {line}: status must be `scanned` or `not-scanned`, found `{value}`")]
    BadStatus { line: usize, value: String },
    #[error("line {line}: item `{id}` listed twice")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: expected `<item> <status>`")]
    BadLine { line: usize },
    #[error("no items in the selected category")]
    EmptyCategory,
}

/// Parses `<item> <status>` lines. `#` starts a comment; a line holding
/// only `...` is an elision and is skipped.
pub fn parse_exploration_list(text: &str) -> Result<ExplorationMap, VisualError> {
    let mut map = ExplorationMap::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || body == "..." {
            continue;
        }
        let cols: Vec<&str> = body.split_whitespace().collect();
        let [id, status] = cols[..] else {
            return Err(VisualError::BadLine { line });
        };
        let scanned = match status.to_ascii_lowercase().as_str() {
            "scanned" => true,
            "not-scanned" => false,
            _ => {
                return Err(VisualError::BadStatus {
                    line,
                    value: status.to_string(),
                })
            }
        };
        if !seen.insert(id.to_string()) {
            return Err(VisualError::DuplicateId { line, id: id.to_string() });
        }
        let category = Category::of_id(id);
        if category == Category::Other {
            map.warnings.push(format!("line {line}: `{id}` has no known category prefix"));
        }
        map.items.push(MapItem {
            id: id.to_string(),
            category,
            scanned,
        });
    }
    Ok(map)
}

/// Scanned share of the items, overall or within one category.
pub fn coverage(map: &ExplorationMap, category: Option<Category>) -> Result<Ratio<u64>, VisualError> {
    let items: Vec<&MapItem> = map
        .items
        .iter()
        .filter(|it| category.is_none_or(|c| it.category == c))
        .collect();
    if items.is_empty() {
        return Err(VisualError::EmptyCategory);
    }
    let scanned = items.iter().filter(|it| it.scanned).count() as u64;
    Ok(Ratio::new(scanned, items.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotoStrategy {
    Front,
    Cardinal,
    DegreesOfRotation,
    Repetition,
    None,
}

impl PhotoStrategy {
    pub fn label(self) -> &'static str {
        match self {
            PhotoStrategy::Front => "front",
            PhotoStrategy::Cardinal => "cardinal",
            PhotoStrategy::DegreesOfRotation => "degrees-of-rotation",
            PhotoStrategy::Repetition => "repetition",
            PhotoStrategy::None => "none",
        }
    }
}

impl fmt::Display for PhotoStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for PhotoStrategy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 8] = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

fn number_word(w: &str) -> Option<u32> {
    if let Some(i) = UNITS.iter().position(|u| *u == w) {
        return Some(i as u32);
    }
    TENS.iter().position(|t| *t == w).map(|i| 20 + 10 * i as u32)
}

/// Lowercases, drops punctuation, and folds spelled-out numbers
/// (`three hundred and sixty`) into digits.
pub fn normalize_numbers(text: &str) -> Vec<String> {
    let words: Vec<String> = text
        .to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let mut value: Option<u32> = None;
        let mut j = i;
        while j < words.len() {
            let w = words[j].as_str();
            if let Some(n) = number_word(w) {
                // "forty five" adds; "five forty" starts a new number
                match value {
                    Some(v) if v % 100 >= 20 && v % 10 == 0 && n < 10 => value = Some(v + n),
                    Some(v) if v % 100 == 0 && v > 0 => value = Some(v + n),
                    Some(_) => break,
                    None => value = Some(n),
                }
            } else if w == "hundred" && value.is_some_and(|v| (1..10).contains(&v)) {
                value = value.map(|v| v * 100);
            } else if w == "and"
                && value.is_some_and(|v| v % 100 == 0 && v > 0)
                && words.get(j + 1).is_some_and(|n| number_word(n).is_some())
            {
            } else {
                break;
            }
            j += 1;
        }
        match value {
            Some(v) => {
                out.push(v.to_string());
                i = j;
            }
            None => {
                out.push(words[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Keyword rules for photo strategies, tried in the order repetition,
/// degrees of rotation, cardinal, front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyRules {
    pub photo_words: Vec<String>,
    pub rotation_verbs: Vec<String>,
    pub cardinal_words: Vec<String>,
    /// Phrases that ask for photos all around without naming directions.
    pub all_directions: Vec<Vec<String>>,
    /// Phrases marking a standing per-event request.
    pub per_event: Vec<Vec<String>>,
    /// Tokens that cancel a photo request when they precede the photo word.
    pub negations: Vec<String>,
}

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn phrases(list: &[&str]) -> Vec<Vec<String>> {
    list.iter().map(|p| p.split(' ').map(str::to_string).collect()).collect()
}

impl Default for StrategyRules {
    fn default() -> Self {
        StrategyRules {
            photo_words: words(&[
                "photo", "photos", "picture", "pictures", "pic", "pics", "image", "images", "snapshot", "snapshots",
            ]),
            rotation_verbs: words(&[
                "turn", "turning", "rotate", "rotating", "pivot", "pivoting", "spin", "spinning",
            ]),
            cardinal_words: words(&["north", "south", "east", "west"]),
            all_directions: phrases(&["four directions", "all directions", "four cardinal", "every direction"]),
            per_event: phrases(&["after each", "after every", "each time", "every time", "after all"]),
            negations: words(&["not", "don't", "dont", "no", "stop", "never"]),
        }
    }
}

fn contains_phrase(tokens: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && tokens.windows(phrase.len()).any(|w| w == phrase)
}

impl StrategyRules {
    pub fn classify(&self, text: &str) -> PhotoStrategy {
        let tokens = normalize_numbers(text);
        let has = |set: &[String]| tokens.iter().any(|t| set.contains(t));
        let Some(photo_at) = tokens.iter().position(|t| self.photo_words.contains(t)) else {
            return PhotoStrategy::None;
        };
        if tokens[..photo_at].iter().any(|t| self.negations.contains(t)) {
            return PhotoStrategy::None;
        }
        if self.per_event.iter().any(|p| contains_phrase(&tokens, p)) {
            return PhotoStrategy::Repetition;
        }
        let every_angle = tokens
            .windows(2)
            .any(|w| w[0] == "every" && w[1].bytes().all(|b| b.is_ascii_digit()));
        if has(&self.rotation_verbs) && every_angle {
            return PhotoStrategy::DegreesOfRotation;
        }
        let cardinals: HashSet<&String> = tokens.iter().filter(|t| self.cardinal_words.contains(t)).collect();
        if cardinals.len() >= 2 || self.all_directions.iter().any(|p| contains_phrase(&tokens, p)) {
            return PhotoStrategy::Cardinal;
        }
        PhotoStrategy::Front
    }
}

pub fn classify_photo_strategy(text: &str) -> PhotoStrategy {
    StrategyRules::default().classify(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Initiator {
    #[serde(rename = "CMD")]
    Cmd,
    #[serde(rename = "DM")]
    Dm,
    #[serde(rename = "unknown")]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhotoTrace {
    pub event: u64,
    /// Nearest left-floor utterance up the antecedent chain.
    pub request: Option<u64>,
    /// First utterance of the event's TU.
    pub root: Option<u64>,
    pub initiator: Initiator,
}

const PHOTO_LEXICON: [&str; 8] = ["photo", "photos", "image", "images", "picture", "pictures", "sent", "pic"];

fn is_photo_event(u: &Utterance) -> bool {
    matches!(u.stream, Stream::Rn | Stream::DmRn)
        && normalize_numbers(&u.text).iter().any(|w| PHOTO_LEXICON.contains(&w.as_str()))
}

/// Walks each photo event on the right floor back along its antecedents.
/// The initiator is read off the stream of the TU's first utterance.
pub fn trace_photo_requests(t: &Transcript) -> Vec<PhotoTrace> {
    let mut out = Vec::new();
    for ev in t.utterances().iter().filter(|u| is_photo_event(u)) {
        let tu = ev.annotation.tu;
        let first = tu.and_then(|tu| t.tu_members(tu).first().map(|u| u.id));
        let mut request = None;
        let mut root = None;
        let mut cur = ev;
        loop {
            if request.is_none() && cur.stream.floor() == Floor::Left {
                request = Some(cur.id);
            }
            if Some(cur.id) == first {
                root = Some(cur.id);
                break;
            }
            match cur.annotation.antecedent.and_then(|a| t.get(a.target)) {
                Some(next) if next.id < cur.id && next.annotation.tu == tu => cur = next,
                _ => break,
            }
        }
        let initiator = match root.and_then(|r| t.get(r)).map(|u| u.stream) {
            Some(Stream::Cmd) => Initiator::Cmd,
            Some(Stream::DmCmd | Stream::DmRn) => Initiator::Dm,
            _ => Initiator::Unknown,
        };
        out.push(PhotoTrace {
            event: ev.id,
            request,
            root,
            initiator,
        });
    }
    out
}
