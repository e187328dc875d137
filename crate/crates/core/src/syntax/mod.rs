//! Formula representation, parsing, normal forms, closure sets and
//! fragment classification.

mod formula;
mod normal;
mod parser;

pub use formula::{Formula, Standpoint};
pub use normal::{
    classify, closure, is_nnf, standpoints_in_order, to_nnf, vocab, ClosureSet, Fragment, Vocab,
};
pub use parser::{parse, parse_generated, ParseError, Position};
