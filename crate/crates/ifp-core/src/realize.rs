//! The realizability predicate `R(A)` and the Harrop interpretation `H(A)`,
//! produced as formulas of an extended language for inspection.
//!
//! The extended language adds realizer terms (programs), realizer
//! equations, type-membership atoms `a : ρ`, quantifiers over realizers and
//! predicates carrying an extra realizer argument. The predicate variable
//! `X̃` attached to `X` is written `X~`.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::logic::*;
use crate::program::{self, Prog, P};
use crate::types::{tau, Ty};

#[derive(Clone, Debug, PartialEq)]
pub enum RForm {
    /// An expression of the object language, left unchanged.
    Plain(Formula),
    Eq(Term, Term),
    REq(P, P),
    Typed(P, Ty),
    App(RPred, Vec<Term>, Option<P>),
    And(Box<RForm>, Box<RForm>),
    Or(Box<RForm>, Box<RForm>),
    Imp(Box<RForm>, Box<RForm>),
    All(Var, Box<RForm>),
    Ex(Var, Box<RForm>),
    AllR(Name, Box<RForm>),
    ExR(Name, Box<RForm>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RPred {
    Var(Name),
    Const(Name),
    Fix(FixKind, Name, Vec<Var>, Option<Name>, Box<RForm>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RealizeError {
    #[error("formula is not Harrop: {0}")]
    NotHarrop(String),
}

fn and(a: RForm, b: RForm) -> RForm {
    RForm::And(Box::new(a), Box::new(b))
}

/// The predicate variable `X̃`.
pub fn tilde(x: &str) -> Name {
    name(&format!("{x}~"))
}

struct Gen {
    used: BTreeSet<Name>,
}

impl Gen {
    fn fresh(&mut self, base: &str) -> Name {
        let n = fresh_name(base, &self.used);
        self.used.insert(n.clone());
        n
    }

    /// `a r A`, for a realizer term `a`.
    fn r(&mut self, a: &P, f: &Formula, hat: &[Name]) -> RForm {
        if is_harrop(f, hat) {
            return and(RForm::REq(a.clone(), program::nil()), self.h(f, hat));
        }
        match f {
            Formula::Eq(..) => unreachable!("equations are Harrop"),
            Formula::App(p, ts) => self.r_app(a, p, ts, hat),
            Formula::Or(x, y) => {
                let l = self.fresh("a");
                let rl = self.r(&Rc::new(Prog::Var(l.clone())), x, hat);
                let left = RForm::ExR(
                    l.clone(),
                    Box::new(and(RForm::REq(a.clone(), program::left(Rc::new(Prog::Var(l)))), rl)),
                );
                let r = self.fresh("b");
                let rr = self.r(&Rc::new(Prog::Var(r.clone())), y, hat);
                let right = RForm::ExR(
                    r.clone(),
                    Box::new(and(RForm::REq(a.clone(), program::right(Rc::new(Prog::Var(r)))), rr)),
                );
                RForm::Or(Box::new(left), Box::new(right))
            }
            Formula::And(x, y) => match (is_harrop(x, hat), is_harrop(y, hat)) {
                (false, true) => and(self.r(a, x, hat), self.h(y, hat)),
                (true, false) => and(self.h(x, hat), self.r(a, y, hat)),
                _ => {
                    let l = self.fresh("a");
                    let r = self.fresh("b");
                    let lv = Rc::new(Prog::Var(l.clone()));
                    let rv = Rc::new(Prog::Var(r.clone()));
                    let body = and(
                        RForm::REq(a.clone(), program::pair(lv.clone(), rv.clone())),
                        and(self.r(&lv, x, hat), self.r(&rv, y, hat)),
                    );
                    RForm::ExR(l, Box::new(RForm::ExR(r, Box::new(body))))
                }
            },
            Formula::Imp(x, y) => {
                if is_harrop(x, hat) {
                    let hx = self.h(x, hat);
                    and(RForm::Typed(a.clone(), tau(y)), RForm::Imp(Box::new(hx), Box::new(self.r(a, y, hat))))
                } else {
                    let b = self.fresh("a");
                    let bv = Rc::new(Prog::Var(b.clone()));
                    let rx = self.r(&bv, x, hat);
                    let ry = self.r(&program::app(a.clone(), bv), y, hat);
                    and(
                        RForm::Typed(a.clone(), Ty::arrow(tau(x), tau(y))),
                        RForm::AllR(b, Box::new(RForm::Imp(Box::new(rx), Box::new(ry)))),
                    )
                }
            }
            Formula::All(x, b) => RForm::All(x.clone(), Box::new(self.r(a, b, hat))),
            Formula::Ex(x, b) => RForm::Ex(x.clone(), Box::new(self.r(a, b, hat))),
        }
    }

    fn r_app(&mut self, a: &P, p: &Pred, ts: &[Term], hat: &[Name]) -> RForm {
        match p {
            Pred::Abst(..) => self.r(a, &p.apply(ts), hat),
            Pred::Var(x) => RForm::App(RPred::Var(tilde(&x.name)), ts.to_vec(), Some(a.clone())),
            Pred::Const(_) => unreachable!("predicate constants are Harrop"),
            Pred::Mu(op) | Pred::Nu(op) => {
                let kind = if matches!(p, Pred::Mu(_)) { FixKind::Mu } else { FixKind::Nu };
                let b = self.fresh("a");
                let body = self.r(&Rc::new(Prog::Var(b.clone())), &op.body, hat);
                let rp = RPred::Fix(kind, tilde(&op.var.name), op.params.clone(), Some(b), Box::new(body));
                RForm::App(rp, ts.to_vec(), Some(a.clone()))
            }
        }
    }

    /// `r A`, that is `∃a (a r A)`.
    fn r_exists(&mut self, f: &Formula, hat: &[Name]) -> RForm {
        let a = self.fresh("a");
        let body = self.r(&Rc::new(Prog::Var(a.clone())), f, hat);
        RForm::ExR(a, Box::new(body))
    }

    fn h(&mut self, f: &Formula, hat: &[Name]) -> RForm {
        if is_nc(f) {
            return RForm::Plain(f.clone());
        }
        match f {
            Formula::Eq(s, t) => RForm::Eq(s.clone(), t.clone()),
            Formula::App(p, ts) => match p {
                Pred::Abst(..) => self.h(&p.apply(ts), hat),
                Pred::Var(x) => RForm::App(RPred::Var(x.name.clone()), ts.to_vec(), None),
                Pred::Const(c) => RForm::App(RPred::Const(c.name.clone()), ts.to_vec(), None),
                Pred::Mu(op) | Pred::Nu(op) => {
                    let kind = if matches!(p, Pred::Mu(_)) { FixKind::Mu } else { FixKind::Nu };
                    let mut hat2 = hat.to_vec();
                    hat2.push(op.var.name.clone());
                    let body = self.h(&op.body, &hat2);
                    RForm::App(
                        RPred::Fix(kind, op.var.name.clone(), op.params.clone(), None, Box::new(body)),
                        ts.to_vec(),
                        None,
                    )
                }
            },
            Formula::And(a, b) => and(self.h(a, hat), self.h(b, hat)),
            Formula::Or(..) => unreachable!("disjunctions are not Harrop"),
            Formula::Imp(a, b) => {
                let pre = if is_harrop(a, hat) { self.h(a, hat) } else { self.r_exists(a, hat) };
                RForm::Imp(Box::new(pre), Box::new(self.h(b, hat)))
            }
            Formula::All(x, b) => RForm::All(x.clone(), Box::new(self.h(b, hat))),
            Formula::Ex(x, b) => RForm::Ex(x.clone(), Box::new(self.h(b, hat))),
        }
    }
}

fn all_names(f: &Formula, out: &mut BTreeSet<Name>) {
    f.free_vars_into(out);
    match f {
        Formula::Eq(..) => {}
        Formula::App(p, _) => match p {
            Pred::Abst(xs, b) => {
                out.extend(xs.iter().map(|x| x.name.clone()));
                all_names(b, out);
            }
            Pred::Mu(op) | Pred::Nu(op) => {
                out.extend(op.params.iter().map(|x| x.name.clone()));
                all_names(&op.body, out);
            }
            _ => {}
        },
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            all_names(a, out);
            all_names(b, out);
        }
        Formula::All(x, b) | Formula::Ex(x, b) => {
            out.insert(x.name.clone());
            all_names(b, out);
        }
    }
}

/// `a r A`, with a realizer variable based on `a` chosen fresh for `A`.
/// Returns the variable actually used together with the formula.
pub fn realizability_formula(a: &str, f: &Formula) -> (Name, RForm) {
    let mut used = BTreeSet::new();
    all_names(f, &mut used);
    let mut g = Gen { used };
    let v = g.fresh(a);
    let body = g.r(&Rc::new(Prog::Var(v.clone())), f, &[]);
    (v, body)
}

/// `H(A)` for a Harrop formula `A`.
pub fn harrop_interpretation(f: &Formula) -> Result<RForm, RealizeError> {
    if !is_harrop(f, &[]) {
        return Err(RealizeError::NotHarrop(Printer::new(None).formula(f)));
    }
    let mut used = BTreeSet::new();
    all_names(f, &mut used);
    Ok(Gen { used }.h(f, &[]))
}

/// One-point rule `∃a (a = t ∧ B) ↦ B[t/a]` applied bottom-up, used to
/// make the generated formulas readable.
pub fn tidy(f: &RForm) -> RForm {
    match f {
        RForm::Plain(_) | RForm::Eq(..) | RForm::REq(..) | RForm::Typed(..) => f.clone(),
        RForm::App(p, ts, a) => RForm::App(tidy_pred(p), ts.clone(), a.clone()),
        RForm::And(a, b) => and(tidy(a), tidy(b)),
        RForm::Or(a, b) => RForm::Or(Box::new(tidy(a)), Box::new(tidy(b))),
        RForm::Imp(a, b) => RForm::Imp(Box::new(tidy(a)), Box::new(tidy(b))),
        RForm::All(x, b) => RForm::All(x.clone(), Box::new(tidy(b))),
        RForm::Ex(x, b) => RForm::Ex(x.clone(), Box::new(tidy(b))),
        RForm::AllR(x, b) => RForm::AllR(x.clone(), Box::new(tidy(b))),
        RForm::ExR(x, b) => {
            let b = tidy(b);
            let mut parts = Vec::new();
            conjuncts(&b, &mut parts);
            let pos = parts.iter().position(|c| match c {
                RForm::REq(l, r) => defines(l, r, x).is_some() || defines(r, l, x).is_some(),
                _ => false,
            });
            match pos {
                Some(i) => {
                    let RForm::REq(l, r) = parts.remove(i) else { unreachable!() };
                    let t = defines(&l, &r, x).or_else(|| defines(&r, &l, x)).unwrap();
                    let rest: Vec<RForm> = parts.iter().map(|c| subst_real(c, x, &t)).collect();
                    rest.into_iter()
                        .reduce(and)
                        .unwrap_or(RForm::REq(program::nil(), program::nil()))
                }
                None => RForm::ExR(x.clone(), Box::new(b)),
            }
        }
    }
}

fn tidy_pred(p: &RPred) -> RPred {
    match p {
        RPred::Fix(k, x, ps, a, b) => RPred::Fix(*k, x.clone(), ps.clone(), a.clone(), Box::new(tidy(b))),
        _ => p.clone(),
    }
}

fn defines(l: &P, r: &P, x: &str) -> Option<P> {
    match &**l {
        Prog::Var(v) if &**v == x && !program::free_vars(r).contains(x) => Some(r.clone()),
        _ => None,
    }
}

fn conjuncts(f: &RForm, out: &mut Vec<RForm>) {
    match f {
        RForm::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

/// Substitutes a realizer term for a realizer variable. Realizer variables
/// are globally unique in generated formulas, so no capture can occur.
fn subst_real(f: &RForm, x: &str, t: &P) -> RForm {
    let s = |m: &P| program::subst(m, x, t);
    match f {
        RForm::Plain(_) | RForm::Eq(..) => f.clone(),
        RForm::REq(a, b) => RForm::REq(s(a), s(b)),
        RForm::Typed(a, ty) => RForm::Typed(s(a), ty.clone()),
        RForm::App(p, ts, a) => {
            let p = match p {
                RPred::Fix(k, v, ps, r, b) if r.as_deref() != Some(x) => {
                    RPred::Fix(*k, v.clone(), ps.clone(), r.clone(), Box::new(subst_real(b, x, t)))
                }
                _ => p.clone(),
            };
            RForm::App(p, ts.clone(), a.as_ref().map(s))
        }
        RForm::And(a, b) => and(subst_real(a, x, t), subst_real(b, x, t)),
        RForm::Or(a, b) => RForm::Or(Box::new(subst_real(a, x, t)), Box::new(subst_real(b, x, t))),
        RForm::Imp(a, b) => RForm::Imp(Box::new(subst_real(a, x, t)), Box::new(subst_real(b, x, t))),
        RForm::All(v, b) => RForm::All(v.clone(), Box::new(subst_real(b, x, t))),
        RForm::Ex(v, b) => RForm::Ex(v.clone(), Box::new(subst_real(b, x, t))),
        RForm::AllR(v, b) | RForm::ExR(v, b) if &**v == x => f.clone(),
        RForm::AllR(v, b) => RForm::AllR(v.clone(), Box::new(subst_real(b, x, t))),
        RForm::ExR(v, b) => RForm::ExR(v.clone(), Box::new(subst_real(b, x, t))),
    }
}

/// All type-membership atoms `c : ρ` of a generated formula.
pub fn typed_atoms(f: &RForm) -> Vec<(P, Ty)> {
    fn go(f: &RForm, out: &mut Vec<(P, Ty)>) {
        match f {
            RForm::Typed(a, t) => out.push((a.clone(), t.clone())),
            RForm::App(RPred::Fix(_, _, _, _, b), ..) => go(b, out),
            RForm::And(a, b) | RForm::Or(a, b) | RForm::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
            RForm::All(_, b) | RForm::Ex(_, b) | RForm::AllR(_, b) | RForm::ExR(_, b) => go(b, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

pub struct RPrinter<'a> {
    inner: Printer<'a>,
}

impl<'a> RPrinter<'a> {
    pub fn new(sig: Option<&'a Signature>) -> RPrinter<'a> {
        RPrinter { inner: Printer::new(sig) }
    }

    pub fn show(&self, f: &RForm) -> String {
        let mut s = String::new();
        self.write(&mut s, f).unwrap();
        s
    }

    fn args(&self, w: &mut impl Write, ts: &[Term], a: &Option<P>) -> fmt::Result {
        for t in ts {
            w.write_char(' ')?;
            self.inner.w_term(w, t)?;
        }
        if let Some(a) = a {
            w.write_char(' ')?;
            program::write_prog(w, a)?;
        }
        w.write_char(')')
    }

    fn pred(&self, w: &mut impl Write, p: &RPred) -> fmt::Result {
        match p {
            RPred::Var(x) | RPred::Const(x) => w.write_str(x),
            RPred::Fix(k, x, ps, a, b) => {
                let kw = if *k == FixKind::Mu { "mu" } else { "nu" };
                write!(w, "({kw} {x} (")?;
                let mut first = true;
                for p in ps {
                    if !first {
                        w.write_char(' ')?;
                    }
                    first = false;
                    w.write_str(&p.name)?;
                }
                if let Some(a) = a {
                    if !first {
                        w.write_char(' ')?;
                    }
                    w.write_str(a)?;
                }
                w.write_str(") ")?;
                self.write(w, b)?;
                w.write_char(')')
            }
        }
    }

    pub fn write(&self, w: &mut impl Write, f: &RForm) -> fmt::Result {
        match f {
            RForm::Plain(g) => self.inner.w_formula(w, g),
            RForm::Eq(s, t) => self.inner.w_formula(w, &Formula::Eq(s.clone(), t.clone())),
            RForm::REq(a, b) => {
                w.write_str("(= ")?;
                program::write_prog(w, a)?;
                w.write_char(' ')?;
                program::write_prog(w, b)?;
                w.write_char(')')
            }
            RForm::Typed(a, t) => {
                w.write_str("(: ")?;
                program::write_prog(w, a)?;
                write!(w, " {t})")
            }
            RForm::App(p, ts, a) => {
                w.write_char('(')?;
                self.pred(w, p)?;
                self.args(w, ts, a)
            }
            RForm::And(..) | RForm::Or(..) | RForm::Imp(..) => {
                let kw = match f {
                    RForm::And(..) => "and",
                    RForm::Or(..) => "or",
                    _ => "imp",
                };
                let mut parts = Vec::new();
                spine(f, &mut parts);
                write!(w, "({kw}")?;
                for p in parts {
                    w.write_char(' ')?;
                    self.write(w, p)?;
                }
                w.write_char(')')
            }
            RForm::All(x, b) => {
                write!(w, "(all ({}) ", x.name)?;
                self.write(w, b)?;
                w.write_char(')')
            }
            RForm::Ex(x, b) => {
                write!(w, "(ex ({}) ", x.name)?;
                self.write(w, b)?;
                w.write_char(')')
            }
            RForm::AllR(x, b) => {
                write!(w, "(allr ({x}) ")?;
                self.write(w, b)?;
                w.write_char(')')
            }
            RForm::ExR(x, b) => {
                write!(w, "(exr ({x}) ")?;
                self.write(w, b)?;
                w.write_char(')')
            }
        }
    }
}

fn spine<'f>(f: &'f RForm, out: &mut Vec<&'f RForm>) {
    match f {
        RForm::And(a, b) => {
            flat(a, out, |g| matches!(g, RForm::And(..)));
            flat(b, out, |g| matches!(g, RForm::And(..)));
        }
        RForm::Or(a, b) => {
            flat(a, out, |g| matches!(g, RForm::Or(..)));
            flat(b, out, |g| matches!(g, RForm::Or(..)));
        }
        RForm::Imp(a, b) => {
            out.push(a);
            match &**b {
                RForm::Imp(..) => spine(b, out),
                _ => out.push(b),
            }
        }
        _ => out.push(f),
    }
}

fn flat<'f>(f: &'f RForm, out: &mut Vec<&'f RForm>, same: fn(&RForm) -> bool) {
    if same(f) {
        spine(f, out);
    } else {
        out.push(f);
    }
}

impl fmt::Display for RForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        RPrinter::new(None).write(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn x() -> Var {
        Var::new("x", "r")
    }

    fn le(s: Term, t: Term) -> Formula {
        Formula::App(Pred::Const(PredSym::new("<=", &["r", "r"])), vec![s, t])
    }

    #[test]
    fn harrop_formula_is_realized_by_nil_only() {
        let f = Formula::eq(x().term(), Term::constant("0"));
        let (a, r) = realizability_formula("a", &f);
        assert_eq!(
            r,
            and(RForm::REq(Rc::new(Prog::Var(a)), program::nil()), RForm::Plain(f.clone()))
        );
    }

    #[test]
    fn nc_formula_is_its_own_harrop_interpretation() {
        let y = Var::new("y", "r");
        let e = Formula::eq(x().term(), y.term());
        let f = Formula::all(x(), Formula::imp(Formula::not(Formula::not(e.clone())), e));
        assert_eq!(harrop_interpretation(&f).unwrap(), RForm::Plain(f.clone()));
        assert_eq!(harrop_interpretation(&Formula::falsum()).unwrap(), RForm::Plain(Formula::falsum()));
        let or = Formula::or(f.clone(), f);
        assert!(harrop_interpretation(&or).is_err());
    }

    #[test]
    fn gray_digit() {
        let zero = Term::constant("0");
        let d = Formula::imp(
            Formula::neq(x().term(), zero.clone()),
            Formula::or(le(x().term(), zero.clone()), le(zero.clone(), x().term())),
        );
        let (a, r) = realizability_formula("a", &d);
        let r = tidy(&r);
        let av = Rc::new(Prog::Var(a));
        let want = and(
            RForm::Typed(av.clone(), Ty::two()),
            RForm::Imp(
                Box::new(RForm::Plain(Formula::neq(x().term(), zero.clone()))),
                Box::new(RForm::Or(
                    Box::new(and(
                        RForm::REq(av.clone(), program::left(program::nil())),
                        RForm::Plain(le(x().term(), zero.clone())),
                    )),
                    Box::new(and(
                        RForm::REq(av, program::right(program::nil())),
                        RForm::Plain(le(zero, x().term())),
                    )),
                )),
            ),
        );
        assert_eq!(r, want);
        assert_eq!(typed_atoms(&r).len(), 1);
    }
}
