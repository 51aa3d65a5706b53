use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::classify::{is_nc, strictly_positive};
use super::print::Printer;
use super::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown function symbol `{0}`")]
    UnknownFunction(String),
    #[error("unknown predicate constant `{0}`")]
    UnknownPredicate(String),
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArgCount { name: String, expected: usize, got: usize },
    #[error("sort mismatch in `{context}`: expected {expected}, got {got}")]
    SortMismatch { context: String, expected: String, got: String },
    #[error("`{0}` is not strictly positive in its bound variable")]
    NotPositive(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("axiom `{0}` is not closed")]
    NotClosed(String),
    #[error("axiom `{0}` is not non-computational")]
    NotNc(String),
}

/// Sorts, function symbols, predicate constants, nc axioms and named
/// predicate definitions (the latter only used for printing).
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub sorts: Vec<Name>,
    pub funcs: BTreeMap<Name, (Vec<Name>, Name)>,
    pub preds: BTreeMap<Name, Vec<Name>>,
    pub axioms: BTreeMap<Name, Formula>,
    pub defs: Vec<(Name, Pred)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn default_sort(&self) -> Option<&Name> {
        self.sorts.first()
    }

    pub fn add_sort(&mut self, s: &str) -> Result<(), LogicError> {
        if self.sorts.iter().any(|x| &**x == s) {
            return Err(LogicError::Duplicate(s.into()));
        }
        self.sorts.push(name(s));
        Ok(())
    }

    pub fn add_func(&mut self, f: &str, args: &[&str], res: &str) -> Result<(), LogicError> {
        for s in args.iter().chain(core::iter::once(&res)) {
            self.require_sort(s)?;
        }
        if self.funcs.contains_key(f) {
            return Err(LogicError::Duplicate(f.into()));
        }
        self.funcs.insert(name(f), (args.iter().map(|s| name(s)).collect(), name(res)));
        Ok(())
    }

    pub fn add_pred(&mut self, p: &str, args: &[&str]) -> Result<(), LogicError> {
        for s in args {
            self.require_sort(s)?;
        }
        if self.preds.contains_key(p) {
            return Err(LogicError::Duplicate(p.into()));
        }
        self.preds.insert(name(p), args.iter().map(|s| name(s)).collect());
        Ok(())
    }

    pub fn add_def(&mut self, n: &str, p: Pred) -> Result<(), LogicError> {
        if self.defs.iter().any(|(m, _)| &**m == n) {
            return Err(LogicError::Duplicate(n.into()));
        }
        self.check_pred(&p)?;
        self.defs.push((name(n), p));
        Ok(())
    }

    pub fn add_axiom(&mut self, n: &str, f: Formula) -> Result<(), LogicError> {
        if self.axioms.contains_key(n) {
            return Err(LogicError::Duplicate(n.into()));
        }
        self.check_formula(&f)?;
        if !f.free_vars().is_empty() || !f.free_pvars().is_empty() {
            return Err(LogicError::NotClosed(n.into()));
        }
        if !is_nc(&f) {
            return Err(LogicError::NotNc(n.into()));
        }
        self.axioms.insert(name(n), f);
        Ok(())
    }

    pub fn def(&self, n: &str) -> Option<&Pred> {
        self.defs.iter().find(|(m, _)| &**m == n).map(|(_, p)| p)
    }

    pub fn require_sort(&self, s: &str) -> Result<(), LogicError> {
        if self.sorts.iter().any(|x| &**x == s) {
            Ok(())
        } else {
            Err(LogicError::UnknownSort(s.into()))
        }
    }

    pub fn sort_of(&self, t: &Term) -> Result<Name, LogicError> {
        match t {
            Term::Var(v) => {
                self.require_sort(&v.sort)?;
                Ok(v.sort.clone())
            }
            Term::App(f, args) => {
                let (dom, cod) = self.funcs.get(f).ok_or_else(|| LogicError::UnknownFunction(f.to_string()))?;
                if dom.len() != args.len() {
                    return Err(LogicError::ArgCount { name: f.to_string(), expected: dom.len(), got: args.len() });
                }
                for (s, a) in dom.iter().zip(args) {
                    let got = self.sort_of(a)?;
                    if &got != s {
                        return Err(LogicError::SortMismatch {
                            context: Printer::new(Some(self)).term(t),
                            expected: s.to_string(),
                            got: got.to_string(),
                        });
                    }
                }
                Ok(cod.clone())
            }
        }
    }

    fn check_args(&self, what: &str, arity: &[Name], ts: &[Term]) -> Result<(), LogicError> {
        if arity.len() != ts.len() {
            return Err(LogicError::ArgCount { name: what.into(), expected: arity.len(), got: ts.len() });
        }
        for (s, t) in arity.iter().zip(ts) {
            let got = self.sort_of(t)?;
            if &got != s {
                return Err(LogicError::SortMismatch {
                    context: what.into(),
                    expected: s.to_string(),
                    got: got.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn check_formula(&self, f: &Formula) -> Result<(), LogicError> {
        match f {
            Formula::Eq(s, t) => {
                let a = self.sort_of(s)?;
                let b = self.sort_of(t)?;
                if a != b {
                    return Err(LogicError::SortMismatch {
                        context: Printer::new(Some(self)).formula(f),
                        expected: a.to_string(),
                        got: b.to_string(),
                    });
                }
                Ok(())
            }
            Formula::App(p, ts) => {
                self.check_pred(p)?;
                self.check_args(&Printer::new(Some(self)).pred(p), &p.arity(), ts)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::All(x, b) | Formula::Ex(x, b) => {
                self.require_sort(&x.sort)?;
                self.check_formula(b)
            }
        }
    }

    pub fn check_pred(&self, p: &Pred) -> Result<(), LogicError> {
        match p {
            Pred::Var(s) => s.arity.iter().try_for_each(|a| self.require_sort(a)),
            Pred::Const(s) => {
                let ar = self.preds.get(&s.name).ok_or_else(|| LogicError::UnknownPredicate(s.name.to_string()))?;
                if ar != &s.arity {
                    return Err(LogicError::ArgCount { name: s.name.to_string(), expected: ar.len(), got: s.arity.len() });
                }
                Ok(())
            }
            Pred::Abst(xs, b) => {
                xs.iter().try_for_each(|x| self.require_sort(&x.sort))?;
                self.check_formula(b)
            }
            Pred::Mu(op) | Pred::Nu(op) => self.check_op(op),
        }
    }

    pub fn check_op(&self, op: &Operator) -> Result<(), LogicError> {
        if op.var.arity != op.arity() {
            return Err(LogicError::SortMismatch {
                context: op.var.name.to_string(),
                expected: join(&op.arity()),
                got: join(&op.var.arity),
            });
        }
        if !strictly_positive(&op.body, &op.var.name) {
            return Err(LogicError::NotPositive(Printer::new(Some(self)).op(op)));
        }
        op.params.iter().try_for_each(|x| self.require_sort(&x.sort))?;
        self.check_formula(&op.body)
    }
}

fn join(xs: &[Name]) -> String {
    let mut s = String::from("(");
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(x);
    }
    s.push(')');
    s
}
