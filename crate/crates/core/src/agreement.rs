//! Krippendorff's alpha over ragged coder-by-unit matrices, with nominal
//! and MASI distances, plus builders for the three structure markables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::structure::Transcript;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Value {
    Label(String),
    Set(BTreeSet<u64>),
}

impl Value {
    pub fn label(s: impl Into<String>) -> Value {
        Value::Label(s.into())
    }

    pub fn set(ids: impl IntoIterator<Item = u64>) -> Value {
        Value::Set(ids.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Nominal,
    Masi,
}

impl FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nominal" => Ok(Distance::Nominal),
            "masi" => Ok(Distance::Masi),
            other => Err(format!("unknown distance `{other}` (expected nominal or masi)")),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distance::Nominal => "nominal",
            Distance::Masi => "masi",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("MASI is undefined for an empty set")]
    EmptySet,
    #[error("at least two coders are needed, got {0}")]
    TooFewCoders(usize),
    #[error("no unit was valued by two or more coders")]
    NoPairableUnits,
    #[error("MASI needs set values; unit `{unit}` has a label")]
    LabelUnderMasi { unit: String },
    #[error("coder `{coder}` annotated different utterances than coder `{first}`")]
    MismatchedUtteranceLists { first: String, coder: String },
}

fn nominal(a: &Value, b: &Value) -> Ratio<u64> {
    Ratio::from_integer(u64::from(a != b))
}

/// `1 - J * M` where `J` is the Jaccard overlap and `M` is 1 for equal sets,
/// 2/3 when one contains the other, 1/3 for other overlaps, 0 when disjoint.
pub fn masi_distance(a: &BTreeSet<u64>, b: &BTreeSet<u64>) -> Result<Ratio<u64>, AgreementError> {
    if a.is_empty() || b.is_empty() {
        return Err(AgreementError::EmptySet);
    }
    let inter = a.intersection(b).count() as u64;
    let union = a.union(b).count() as u64;
    let m = if a == b {
        Ratio::from_integer(1)
    } else if inter == 0 {
        Ratio::from_integer(0)
    } else if a.is_subset(b) || b.is_subset(a) {
        Ratio::new(2, 3)
    } else {
        Ratio::new(1, 3)
    };
    Ok(Ratio::from_integer(1) - Ratio::new(inter, union) * m)
}

fn distance(kind: Distance, a: &Value, b: &Value) -> Result<f64, AgreementError> {
    let r = match (kind, a, b) {
        (Distance::Nominal, _, _) => nominal(a, b),
        (Distance::Masi, Value::Set(x), Value::Set(y)) => masi_distance(x, y)?,
        (Distance::Masi, _, _) => return Err(AgreementError::LabelUnderMasi { unit: String::new() }),
    };
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// Coders by units, with any cell allowed to be empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AgreementMatrix {
    pub coders: Vec<String>,
    pub units: Vec<String>,
    /// `(coder index, unit index) -> value`
    #[serde(skip)]
    pub values: BTreeMap<(usize, usize), Value>,
}

impl AgreementMatrix {
    pub fn new(coders: Vec<String>, units: Vec<String>) -> AgreementMatrix {
        AgreementMatrix {
            coders,
            units,
            values: BTreeMap::new(),
        }
    }

    /// Builds a matrix from one row of optional values per coder.
    pub fn from_rows(rows: Vec<Vec<Option<Value>>>) -> AgreementMatrix {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut m = AgreementMatrix::new(
            (0..rows.len()).map(|c| format!("coder{}", c + 1)).collect(),
            (0..width).map(|u| (u + 1).to_string()).collect(),
        );
        for (c, row) in rows.into_iter().enumerate() {
            for (u, v) in row.into_iter().enumerate() {
                if let Some(v) = v {
                    m.values.insert((c, u), v);
                }
            }
        }
        m
    }

    pub fn set(&mut self, coder: usize, unit: usize, value: Value) {
        self.values.insert((coder, unit), value);
    }

    /// Values of each unit valued by two or more coders.
    pub fn pairable(&self) -> Vec<(usize, Vec<&Value>)> {
        (0..self.units.len())
            .map(|u| {
                let vals: Vec<&Value> = (0..self.coders.len()).filter_map(|c| self.values.get(&(c, u))).collect();
                (u, vals)
            })
            .filter(|(_, v)| v.len() >= 2)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    pub alpha: f64,
    #[serde(rename = "D_o")]
    pub d_o: f64,
    #[serde(rename = "D_e")]
    pub d_e: f64,
    pub pairable_units: usize,
    /// Number of pairable values.
    pub n: usize,
    /// Expected disagreement is zero; alpha is reported as 1 by convention.
    pub degenerate: bool,
    pub distance: Distance,
}

/// Krippendorff's alpha, `1 - D_o / D_e`.
///
/// Within a unit holding `n_u` values each ordered pair is weighted by
/// `1 / (n_u - 1)`; expected disagreement pools all pairable values.
pub fn krippendorff_alpha(m: &AgreementMatrix, kind: Distance) -> Result<AlphaReport, AgreementError> {
    if m.coders.len() < 2 {
        return Err(AgreementError::TooFewCoders(m.coders.len()));
    }
    let units = m.pairable();
    if units.is_empty() {
        return Err(AgreementError::NoPairableUnits);
    }
    let d = |a: &Value, b: &Value, u: usize| {
        distance(kind, a, b).map_err(|e| match e {
            AgreementError::LabelUnderMasi { .. } => AgreementError::LabelUnderMasi {
                unit: m.units[u].clone(),
            },
            e => e,
        })
    };
    let n: usize = units.iter().map(|(_, v)| v.len()).sum();
    let mut observed = 0.0;
    for (u, vals) in &units {
        let mut s = 0.0;
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                if i != j {
                    s += d(a, b, *u)?;
                }
            }
        }
        observed += s / (vals.len() - 1) as f64;
    }
    let d_o = observed / n as f64;

    let pooled: Vec<(usize, &Value)> = units.iter().flat_map(|(u, v)| v.iter().map(move |x| (*u, *x))).collect();
    let mut expected = 0.0;
    for (i, (u, a)) in pooled.iter().enumerate() {
        for (j, (_, b)) in pooled.iter().enumerate() {
            if i != j {
                expected += d(a, b, *u)?;
            }
        }
    }
    let d_e = expected / (n * (n - 1)) as f64;
    let degenerate = d_e == 0.0;
    Ok(AlphaReport {
        alpha: if degenerate { 1.0 } else { 1.0 - d_o / d_e },
        d_o,
        d_e,
        pairable_units: units.len(),
        n,
        degenerate,
        distance: kind,
    })
}

fn utterance_ids(coders: &[(String, Transcript)]) -> Result<Vec<u64>, AgreementError> {
    let Some((first, t0)) = coders.first() else {
        return Err(AgreementError::TooFewCoders(0));
    };
    let ids: Vec<u64> = t0.utterances().iter().map(|u| u.id).collect();
    for (name, t) in &coders[1..] {
        if !t.utterances().iter().map(|u| u.id).eq(ids.iter().copied()) {
            return Err(AgreementError::MismatchedUtteranceLists {
                first: first.clone(),
                coder: name.clone(),
            });
        }
    }
    Ok(ids)
}

fn build(
    coders: &[(String, Transcript)],
    mut value: impl FnMut(&Transcript, u64) -> Option<Value>,
) -> Result<AgreementMatrix, AgreementError> {
    let ids = utterance_ids(coders)?;
    let mut m = AgreementMatrix::new(
        coders.iter().map(|(n, _)| n.clone()).collect(),
        ids.iter().map(u64::to_string).collect(),
    );
    for (c, (_, t)) in coders.iter().enumerate() {
        for (u, &id) in ids.iter().enumerate() {
            if let Some(v) = value(t, id) {
                m.set(c, u, v);
            }
        }
    }
    Ok(m)
}

/// Unit = utterance; value = the ids of every utterance in the same TU.
/// Utterances a coder left outside any TU are missing for that coder.
pub fn tu_agreement_matrix(coders: &[(String, Transcript)]) -> Result<AgreementMatrix, AgreementError> {
    build(coders, |t, id| {
        let tu = t.get(id)?.annotation.tu?;
        Some(Value::set(t.tu_members(tu).iter().map(|u| u.id)))
    })
}

/// Unit = utterance; value = antecedent as written (`4` and `4*` differ).
pub fn antecedent_agreement_matrix(coders: &[(String, Transcript)]) -> Result<AgreementMatrix, AgreementError> {
    build(coders, |t, id| {
        t.get(id)?.annotation.antecedent.map(|a| Value::Label(a.to_string()))
    })
}

/// Unit = utterance; value = canonical relation code.
pub fn relation_agreement_matrix(coders: &[(String, Transcript)]) -> Result<AgreementMatrix, AgreementError> {
    build(coders, |t, id| {
        t.get(id)?.annotation.relation.as_ref().map(|r| Value::Label(r.to_string()))
    })
}
