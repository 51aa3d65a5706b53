//! Front end of the IFP toolchain: the script language, the bundled corpus
//! and the command line.

pub mod sexpr;
pub mod syntax;
pub mod script;
pub mod corpus;
pub mod cli;
