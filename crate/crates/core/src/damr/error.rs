use thiserror::Error;

use crate::amr::AmrError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DamrError {
    #[error("root concept `{concept}` is not a speech act")]
    NotASpeechActRoot { concept: String },
    #[error("speech-act root has no :{which} node")]
    MissingEnvelopeArg { which: String },
    #[error("content concept `{roleset}` is not in the robot lexicon")]
    UnknownRobotConcept { roleset: String },
    #[error("speech act {act} does not combine with {concept}")]
    IncompatibleActConcept { act: String, concept: String },
    #[error("bad tense/aspect: {detail}")]
    BadTenseAspect { detail: String },
    #[error("no robot concept for `{label}`")]
    NoConceptMapping { label: String },
    #[error(":{flag} is already {existing}, cannot set {wanted}")]
    ConflictingAspect { flag: String, existing: String, wanted: String },
    #[error("{tense} tense needs a directive act, not {act}")]
    TenseActMismatch { act: String, tense: String },
    #[error("unsupported structure: {detail}")]
    UnsupportedStructure { detail: String },
    #[error("input is already Dialogue-AMR (root `{concept}`)")]
    AlreadyDialogueAmr { concept: String },
    #[error(transparent)]
    Graph(#[from] AmrError),
}

impl DamrError {
    pub fn code(&self) -> &'static str {
        match self {
            DamrError::NotASpeechActRoot { .. } => "NotASpeechActRoot",
            DamrError::MissingEnvelopeArg { .. } => "MissingEnvelopeArg",
            DamrError::UnknownRobotConcept { .. } => "UnknownRobotConcept",
            DamrError::IncompatibleActConcept { .. } => "IncompatibleActConcept",
            DamrError::BadTenseAspect { .. } => "BadTenseAspect",
            DamrError::NoConceptMapping { .. } => "NoConceptMapping",
            DamrError::ConflictingAspect { .. } => "ConflictingAspect",
            DamrError::TenseActMismatch { .. } => "TenseActMismatch",
            DamrError::UnsupportedStructure { .. } => "UnsupportedStructure",
            DamrError::AlreadyDialogueAmr { .. } => "AlreadyDialogueAmr",
            DamrError::Graph(e) => e.code(),
        }
    }
}
