//! Core of the IFP toolchain: the logic, the proof kernel, realizability,
//! program extraction, the operational semantics of extracted programs and
//! Haskell code generation.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod extract;
pub mod haskell;
pub mod kernel;
pub mod logic;
pub mod program;
pub mod realize;
pub mod runtime;
pub mod simplify;
pub mod typecheck;
pub mod types;
