//! Dialogue structure over the four conversational streams: transaction
//! units (TUs), antecedents and relations.
//!
//! Commander (`CMD`) and the dialogue manager's replies to them (`DM-CMD`)
//! share the left floor; the dialogue manager's instructions to the
//! navigator (`DM-RN`) and the navigator's replies (`RN`) share the right.

mod relations;
mod transcript;
mod tree;
mod validate;

pub use relations::{RelationFamily, RelationLabel, RelationRef};
pub use transcript::{
    load_transcript, parse_transcript, AntecedentRef, Floor, LoadOptions, Participant, Stream, StructureAnnotation,
    Transcript, TranscriptError, Utterance, HEADER,
};
pub use tree::{
    extract_instruction_response_pairs, interleaving_spans, tu_tree, InstructionResponsePair, InterleavingSpan,
    TreeError, TuTree,
};
pub use validate::{structure_report, validate_structure, Rule, StructureReport, Violation};
