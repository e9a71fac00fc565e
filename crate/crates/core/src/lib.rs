//! Toolkit for annotated human-robot dialogue.
//!
//! * [`amr`]: PENMAN graphs, triples, renaming.
//! * [`smatch`]: triple-overlap similarity between two graphs.
//! * [`damr`]: the Dialogue-AMR schema (speech-act envelope, tense and
//!   aspect, robot lexicon), its validator, and the Standard-AMR converter.
//! * [`structure`]: multi-floor transcripts with transaction-unit,
//!   antecedent, and relation annotations.
//! * [`agreement`]: Krippendorff's alpha with nominal and MASI distances.
//! * [`visual`]: exploration-map lists and photo-request strategies.
//! * [`policy`]: retrieval intent classifier and response policy.
//!
//! The guide under `book/` walks through each of these with runnable
//! examples; every snippet there is compiled and run as a doc-test.

pub mod agreement;
pub mod amr;
pub mod damr;
pub mod policy;
pub mod smatch;
pub mod structure;
pub mod visual;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/amr.md")]
    mod amr {}
    #[doc = include_str!("../../../book/src/smatch.md")]
    mod smatch {}
    #[doc = include_str!("../../../book/src/dialogue-amr.md")]
    mod dialogue_amr {}
    #[doc = include_str!("../../../book/src/dialogue-structure.md")]
    mod dialogue_structure {}
    #[doc = include_str!("../../../book/src/agreement.md")]
    mod agreement {}
    #[doc = include_str!("../../../book/src/visual-context.md")]
    mod visual_context {}
    #[doc = include_str!("../../../book/src/policy.md")]
    mod policy {}
}
