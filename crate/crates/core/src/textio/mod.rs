//! Text formats: the `.wlp` program syntax, tab-separated fact tables, and
//! chart output.

mod chart;
mod facts;
mod lexer;
mod parser;
mod printer;

pub use chart::{json_escape, render_chart, render_number, render_value_json};
pub use facts::parse_facts_tsv;
pub use parser::{parse_atom_text, parse_program, parse_term_list, parse_value_text};
pub use printer::render_program;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("line {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}
