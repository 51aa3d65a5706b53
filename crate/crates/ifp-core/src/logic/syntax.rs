use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::vec::Vec;

use super::subst::{fresh_name, Subst};

pub type Name = Rc<str>;

pub fn name(s: &str) -> Name {
    Rc::from(s)
}

/// An object variable together with its sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub sort: Name,
}

impl Var {
    pub fn new(n: &str, sort: &str) -> Var {
        Var { name: name(n), sort: name(sort) }
    }

    pub fn term(&self) -> Term {
        Term::Var(self.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(name(f), args)
    }

    pub fn constant(c: &str) -> Term {
        Term::App(name(c), Vec::new())
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.name.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.free_vars_into(out)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn occurs(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => &*v.name == x,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }
}

/// Name and arity (argument sorts) of a predicate variable or constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PredSym {
    pub name: Name,
    pub arity: Vec<Name>,
}

impl PredSym {
    pub fn new(n: &str, arity: &[&str]) -> PredSym {
        PredSym { name: name(n), arity: arity.iter().map(|s| name(s)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pred {
    Var(PredSym),
    Const(PredSym),
    Abst(Vec<Var>, Rc<Formula>),
    Mu(Rc<Operator>),
    Nu(Rc<Operator>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixKind {
    Mu,
    Nu,
}

/// `λX λx̄ A`, with `A` strictly positive in `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub var: PredSym,
    pub params: Vec<Var>,
    pub body: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Eq(Term, Term),
    App(Pred, Vec<Term>),
    And(Rc<Formula>, Rc<Formula>),
    Or(Rc<Formula>, Rc<Formula>),
    Imp(Rc<Formula>, Rc<Formula>),
    All(Var, Rc<Formula>),
    Ex(Var, Rc<Formula>),
}

impl Formula {
    pub fn eq(s: Term, t: Term) -> Formula {
        Formula::Eq(s, t)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Rc::new(a), Rc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Rc::new(a), Rc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Rc::new(a), Rc::new(b))
    }

    pub fn all(x: Var, body: Formula) -> Formula {
        Formula::All(x, Rc::new(body))
    }

    pub fn ex(x: Var, body: Formula) -> Formula {
        Formula::Ex(x, Rc::new(body))
    }

    pub fn all_many(xs: &[Var], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |acc, x| Formula::all(x.clone(), acc))
    }

    /// `µ(λX.X)()`.
    pub fn falsum() -> Formula {
        let x = PredSym { name: name("X"), arity: Vec::new() };
        let op = Operator {
            var: x.clone(),
            params: Vec::new(),
            body: Formula::App(Pred::Var(x), Vec::new()),
        };
        Formula::App(Pred::Mu(Rc::new(op)), Vec::new())
    }

    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::falsum())
    }

    pub fn neq(s: Term, t: Term) -> Formula {
        Formula::not(Formula::Eq(s, t))
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Eq(s, t) => {
                s.free_vars_into(out);
                t.free_vars_into(out);
            }
            Formula::App(p, ts) => {
                p.free_vars_into(out);
                ts.iter().for_each(|t| t.free_vars_into(out));
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            Formula::All(x, body) | Formula::Ex(x, body) => {
                let mut inner = BTreeSet::new();
                body.free_vars_into(&mut inner);
                inner.remove(&x.name);
                out.extend(inner);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn free_pvars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Eq(..) => {}
            Formula::App(p, _) => p.free_pvars_into(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.free_pvars_into(out);
                b.free_pvars_into(out);
            }
            Formula::All(_, body) | Formula::Ex(_, body) => body.free_pvars_into(out),
        }
    }

    pub fn free_pvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_pvars_into(&mut out);
        out
    }

    pub fn has_free_pvar(&self, x: &str) -> bool {
        self.free_pvars().contains(x)
    }

    pub fn subst_term(&self, x: &Var, t: &Term) -> Formula {
        Subst::new().with_term(x.name.clone(), t.clone()).apply(self)
    }

    pub fn subst_pred(&self, x: &str, p: &Pred) -> Formula {
        Subst::new().with_pred(name(x), p.clone()).apply(self)
    }

    pub fn is_falsum(&self) -> bool {
        match self {
            Formula::App(Pred::Mu(op), ts) if ts.is_empty() && op.params.is_empty() => {
                matches!(&op.body, Formula::App(Pred::Var(v), a) if a.is_empty() && v.name == op.var.name)
            }
            _ => false,
        }
    }
}

impl Pred {
    pub fn arity(&self) -> Vec<Name> {
        match self {
            Pred::Var(s) | Pred::Const(s) => s.arity.clone(),
            Pred::Abst(xs, _) => xs.iter().map(|x| x.sort.clone()).collect(),
            Pred::Mu(op) | Pred::Nu(op) => op.arity(),
        }
    }

    pub fn fixpoint(&self) -> Option<(FixKind, &Rc<Operator>)> {
        match self {
            Pred::Mu(op) => Some((FixKind::Mu, op)),
            Pred::Nu(op) => Some((FixKind::Nu, op)),
            _ => None,
        }
    }

    /// `P(t̄)`, beta-reducing abstractions.
    pub fn apply(&self, ts: &[Term]) -> Formula {
        match self {
            Pred::Abst(xs, body) => {
                let mut s = Subst::new();
                for (x, t) in xs.iter().zip(ts) {
                    s = s.with_term(x.name.clone(), t.clone());
                }
                s.apply(body)
            }
            _ => Formula::App(self.clone(), ts.to_vec()),
        }
    }

    /// Fresh parameters matching the arity, avoiding the given names.
    pub fn fresh_params(&self, avoid: &BTreeSet<Name>) -> Vec<Var> {
        let mut avoid = avoid.clone();
        let base = match self {
            Pred::Abst(xs, _) => xs.iter().map(|x| x.name.clone()).collect(),
            Pred::Mu(op) | Pred::Nu(op) => op.params.iter().map(|x| x.name.clone()).collect(),
            _ => Vec::new(),
        };
        self.arity()
            .into_iter()
            .enumerate()
            .map(|(i, sort)| {
                let b = base.get(i).cloned().unwrap_or_else(|| name("x"));
                let n = fresh_name(&b, &avoid);
                avoid.insert(n.clone());
                Var { name: n, sort }
            })
            .collect()
    }

    /// `λx̄ (P x̄ ∧ Q x̄)`.
    pub fn inter(p: &Pred, q: &Pred) -> Pred {
        let xs = pair_params(p, q);
        let ts: Vec<Term> = xs.iter().map(Var::term).collect();
        Pred::Abst(xs, Rc::new(Formula::and(p.apply(&ts), q.apply(&ts))))
    }

    /// `λx̄ (P x̄ ∨ Q x̄)`.
    pub fn union(p: &Pred, q: &Pred) -> Pred {
        let xs = pair_params(p, q);
        let ts: Vec<Term> = xs.iter().map(Var::term).collect();
        Pred::Abst(xs, Rc::new(Formula::or(p.apply(&ts), q.apply(&ts))))
    }

    /// `λx̄ (P x̄ → Q x̄)`.
    pub fn arrow(p: &Pred, q: &Pred) -> Pred {
        let xs = pair_params(p, q);
        let ts: Vec<Term> = xs.iter().map(Var::term).collect();
        Pred::Abst(xs, Rc::new(Formula::imp(p.apply(&ts), q.apply(&ts))))
    }

    /// `∀x̄ (P x̄ → Q x̄)`.
    pub fn subset(p: &Pred, q: &Pred) -> Formula {
        let xs = pair_params(p, q);
        let ts: Vec<Term> = xs.iter().map(Var::term).collect();
        Formula::all_many(&xs, Formula::imp(p.apply(&ts), q.apply(&ts)))
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Pred::Var(_) | Pred::Const(_) => {}
            Pred::Abst(xs, body) => {
                let mut inner = body.free_vars();
                for x in xs {
                    inner.remove(&x.name);
                }
                out.extend(inner);
            }
            Pred::Mu(op) | Pred::Nu(op) => {
                let mut inner = op.body.free_vars();
                for x in &op.params {
                    inner.remove(&x.name);
                }
                out.extend(inner);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn free_pvars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Pred::Var(s) => {
                out.insert(s.name.clone());
            }
            Pred::Const(_) => {}
            Pred::Abst(_, body) => body.free_pvars_into(out),
            Pred::Mu(op) | Pred::Nu(op) => {
                let mut inner = op.body.free_pvars();
                inner.remove(&op.var.name);
                out.extend(inner);
            }
        }
    }

    pub fn free_pvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_pvars_into(&mut out);
        out
    }
}

fn pair_params(p: &Pred, q: &Pred) -> Vec<Var> {
    let mut avoid = p.free_vars();
    q.free_vars_into(&mut avoid);
    p.fresh_params(&avoid)
}

impl Operator {
    pub fn arity(&self) -> Vec<Name> {
        self.params.iter().map(|x| x.sort.clone()).collect()
    }

    /// The body as a predicate `λx̄ A` (still mentioning `X`).
    pub fn body_pred(&self) -> Pred {
        Pred::Abst(self.params.clone(), Rc::new(self.body.clone()))
    }

    /// `Φ(Q)`.
    pub fn apply(&self, q: &Pred) -> Pred {
        let s = Subst::new().with_pred(self.var.name.clone(), q.clone());
        s.apply_pred(&self.body_pred())
    }

    pub fn is_constant(&self) -> bool {
        !self.body.has_free_pvar(&self.var.name)
    }
}
