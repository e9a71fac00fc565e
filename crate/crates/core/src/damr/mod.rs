//! Dialogue-AMR: a speech-act envelope around robot-concept content with
//! tense and aspect.
//!
//! ```text
//! (c / command-SA
//!   :ARG0 (c2 / commander)      speaker
//!   :ARG2 (r / robot)           addressee
//!   :ARG1 (g / go-02 ...))      content, a robot-lexicon roleset
//! ```

mod convert;
mod error;
mod lexicon;
mod tense;
mod validate;

pub use convert::{convert_to_dialogue_amr, infer_act, normalize_action, ConvertOptions};
pub use error::DamrError;
pub use lexicon::{
    default_speech_acts, generic_goal_roles, has_bounded_goal, ActFamily, GoalRole, Lexicon, LexiconError,
    RobotConcept, SpeechAct,
};
pub use tense::{
    annotate_tense_aspect, content_node, decode_tense_aspect, AspectFlag, SurfaceTense, TenseAspect, TimeRef,
};
pub use validate::{validate_dialogue_amr, DialogueAmr};
