//! Core of the assertion toolchain: the SVA frontend, RTL interface
//! extraction and name resolution, the combinational rewrite, and the
//! bounded checker and scoreboard used to grade assertions against golden
//! behavioral models.

pub mod checker;
pub mod eval;
pub mod rewrite;
pub mod rtl;
pub mod scoreboard;
pub mod sva;
