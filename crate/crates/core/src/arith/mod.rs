//! Base arithmetic: residue fields, local fields and their text formats.

mod local;
mod parse;
mod residue;
mod squares;

pub use local::{FieldKind, LocalElem, LocalField};
pub use parse::{field_spec, format_elem, parse_elem, parse_field};
pub use residue::{is_irreducible, ResidueField, MAX_Q};
pub use squares::{enumerate_residues, square_class_count};
