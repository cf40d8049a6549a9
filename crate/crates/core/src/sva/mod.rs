//! Frontend for the supported SystemVerilog Assertion subset: lexer,
//! parser, syntax tree, canonical printer and diagnostics.

pub mod ast;
pub mod diag;
pub mod gen;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use diag::{codes, render_all, render_diagnostic, Category, Diagnostic, Severity, Span};
pub use parser::{parse_assertion, parse_bool_expr};
pub use printer::{pretty_print, print_bool, print_literal, print_property_text};
