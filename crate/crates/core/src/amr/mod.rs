//! AMR graphs in PENMAN notation: parsing, serialization, the triple view,
//! and variable renaming.

mod error;
mod graph;
mod penman;
mod rename;
mod triples;

pub use error::{AmrError, AmrWarning, Position};
pub use graph::{normalize_role, AmrGraph, Constant, Edge, Mode, Number, Polarity, Target, Var};
pub use penman::{parse_amr_document, parse_penman, parse_penman_with, serialize_penman, AmrEntry, ParseOptions};
pub use rename::{rename_variables, RenameScheme};
pub use triples::{sorted_triples, to_triples, Triple};
