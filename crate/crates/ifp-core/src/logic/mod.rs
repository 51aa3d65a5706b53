//! Object language of the logic: sorted terms, formulas with least and
//! greatest fixed points, substitution, classification and printing.

mod classify;
mod print;
mod signature;
mod subst;
mod syntax;

pub use classify::{
    classify, is_harrop, is_harrop_op, is_harrop_pred, is_nc, is_nc_pred, strictly_positive, Classification,
};
pub use print::Printer;
pub use signature::{LogicError, Signature};
pub use subst::{alpha_eq, alpha_eq_op, alpha_eq_pred, fresh_name, Subst};
pub use syntax::*;
