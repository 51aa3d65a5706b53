//! Derivation terms and the proof checker.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::*;

#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    Assume(Name),
    Axiom(Name),
    /// A previously checked theorem.
    Lemma(Name),
    Refl(Term),
    /// `cong(d, e, λx A)`: from `A[s/x]` and `s = t` infer `A[t/x]`.
    Cong(Box<Derivation>, Box<Derivation>, Var, Formula),
    AndI(Box<Derivation>, Box<Derivation>),
    AndL(Box<Derivation>),
    AndR(Box<Derivation>),
    OrL(Box<Derivation>, Formula),
    OrR(Box<Derivation>, Formula),
    OrE(Box<Derivation>, Box<Derivation>, Box<Derivation>),
    ImpI(Name, Formula, Box<Derivation>),
    ImpE(Box<Derivation>, Box<Derivation>),
    AllI(Var, Box<Derivation>),
    AllE(Box<Derivation>, Term),
    /// `exi(t, d, λx A)`.
    ExI(Var, Formula, Term, Box<Derivation>),
    ExE(Box<Derivation>, Box<Derivation>),
    Clos(Rc<Operator>),
    Ind(Rc<Operator>, Pred, Box<Derivation>),
    Cocl(Rc<Operator>),
    Coind(Rc<Operator>, Pred, Box<Derivation>),
    Si(Rc<Operator>, Pred, Box<Derivation>),
    Hsi(Rc<Operator>, Pred, Box<Derivation>),
    Sci(Rc<Operator>, Pred, Box<Derivation>),
    Hsci(Rc<Operator>, Pred, Box<Derivation>),
    /// Wellfounded induction relative to `A`: relation, `A`, `P`.
    WfI(Pred, Pred, Pred, Box<Derivation>),
    AIq(Term, Pred, Box<Derivation>),
    /// Archimedean induction with a side predicate: `q`, `B`, `P`.
    AIBq(Term, Pred, Pred, Box<Derivation>),
}

impl Derivation {
    pub fn rule_name(&self) -> &'static str {
        use Derivation::*;
        match self {
            Assume(_) => "assumption",
            Axiom(_) => "axiom",
            Lemma(_) => "use",
            Refl(_) => "refl",
            Cong(..) => "cong",
            AndI(..) => "andi",
            AndL(_) => "andl",
            AndR(_) => "andr",
            OrL(..) => "orl",
            OrR(..) => "orr",
            OrE(..) => "ore",
            ImpI(..) => "impi",
            ImpE(..) => "impe",
            AllI(..) => "alli",
            AllE(..) => "alle",
            ExI(..) => "exi",
            ExE(..) => "exe",
            Clos(_) => "clos",
            Ind(..) => "ind",
            Cocl(_) => "cocl",
            Coind(..) => "coind",
            Si(..) => "si",
            Hsi(..) => "hsi",
            Sci(..) => "sci",
            Hsci(..) => "hsci",
            WfI(..) => "wfi",
            AIq(..) => "aiq",
            AIBq(..) => "aibq",
        }
    }

    pub fn children(&self) -> Vec<&Derivation> {
        use Derivation::*;
        match self {
            Assume(_) | Axiom(_) | Lemma(_) | Refl(_) | Clos(_) | Cocl(_) => vec![],
            AndL(d) | AndR(d) | OrL(d, _) | OrR(d, _) | ImpI(_, _, d) | AllI(_, d) | AllE(d, _) => vec![d],
            ExI(_, _, _, d) => vec![d],
            Ind(_, _, d) | Coind(_, _, d) | Si(_, _, d) | Hsi(_, _, d) | Sci(_, _, d) | Hsci(_, _, d) => vec![d],
            WfI(_, _, _, d) | AIq(_, _, d) | AIBq(_, _, _, d) => vec![d],
            Cong(d, e, ..) | AndI(d, e) | ImpE(d, e) | ExE(d, e) => vec![d, e],
            OrE(d, e, f) => vec![d, e, f],
        }
    }

    /// The subderivation at `path` (child indices from the root).
    pub fn at_path(&self, path: &[usize]) -> Option<&Derivation> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }
}

/// Assumptions in scope, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub entries: Vec<(Name, Formula)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn lookup(&self, label: &str) -> Option<&Formula> {
        self.entries.iter().rev().find(|(l, _)| &**l == label).map(|(_, f)| f)
    }

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (_, f) in &self.entries {
            f.free_vars_into(&mut out);
        }
        out
    }
}

/// Signature plus already checked theorems.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    pub sig: Signature,
    pub theorems: BTreeMap<Name, Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelErrorKind {
    #[error("unbound assumption `{0}`")]
    UnknownAssumption(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("assumption label `{0}` is already in scope")]
    DuplicateLabel(String),
    #[error("rule-mismatch in {rule}: expected {expected}, found {found}")]
    Mismatch { rule: &'static str, expected: String, found: String },
    #[error("eigenvariable condition violated in {rule}: `{var}` is free in {place}")]
    Eigenvariable { rule: &'static str, var: String, place: &'static str },
    #[error("arity mismatch in {rule}: expected {expected}, found {found}")]
    Arity { rule: &'static str, expected: String, found: String },
    #[error("{0}")]
    Logic(LogicError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelError {
    /// Child indices from the root derivation to the offending node.
    pub path: Vec<usize>,
    pub kind: KernelErrorKind,
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at derivation path {:?}: {}", self.path, self.kind)
    }
}

impl core::error::Error for KernelError {}

/// A derivation annotated with the formula proved at every node.
#[derive(Clone, Debug)]
pub struct Checked<'d> {
    pub deriv: &'d Derivation,
    pub formula: Formula,
    pub children: Vec<Checked<'d>>,
}

/// Premise formula and conclusion of a (co)induction or derived-rule node.
#[derive(Clone, Debug)]
pub struct Schema {
    pub premise: Formula,
    pub conclusion: Formula,
}

struct Checker<'t> {
    th: &'t Theory,
    path: Vec<usize>,
}

impl Theory {
    pub fn new(sig: Signature) -> Theory {
        Theory { sig, theorems: BTreeMap::new() }
    }

    fn show(&self, f: &Formula) -> String {
        Printer::new(Some(&self.sig)).formula(f)
    }

    pub fn infer(&self, ctx: &Context, d: &Derivation) -> Result<Formula, KernelError> {
        Ok(self.infer_tree(ctx, d)?.formula)
    }

    pub fn infer_tree<'d>(&self, ctx: &Context, d: &'d Derivation) -> Result<Checked<'d>, KernelError> {
        let mut c = Checker { th: self, path: Vec::new() };
        let mut ctx = ctx.clone();
        c.go(&mut ctx, d)
    }

    pub fn check(&self, ctx: &Context, d: &Derivation, goal: &Formula) -> Result<(), KernelError> {
        self.check_tree(ctx, d, goal).map(|_| ())
    }

    pub fn check_tree<'d>(&self, ctx: &Context, d: &'d Derivation, goal: &Formula) -> Result<Checked<'d>, KernelError> {
        let t = self.infer_tree(ctx, d)?;
        if !alpha_eq(&t.formula, goal) {
            return Err(KernelError {
                path: Vec::new(),
                kind: KernelErrorKind::Mismatch {
                    rule: d.rule_name(),
                    expected: self.show(goal),
                    found: self.show(&t.formula),
                },
            });
        }
        Ok(t)
    }

    /// Checks `d` against `goal` and records it as a theorem.
    pub fn add_theorem(&mut self, n: &str, goal: Formula, d: &Derivation) -> Result<(), KernelError> {
        let err = |kind| KernelError { path: Vec::new(), kind };
        if self.theorems.contains_key(n) || self.sig.axioms.contains_key(n) {
            return Err(err(KernelErrorKind::Logic(LogicError::Duplicate(n.into()))));
        }
        self.sig.check_formula(&goal).map_err(|e| err(KernelErrorKind::Logic(e)))?;
        if !goal.free_vars().is_empty() || !goal.free_pvars().is_empty() {
            return Err(err(KernelErrorKind::Logic(LogicError::NotClosed(n.into()))));
        }
        self.check(&Context::new(), d, &goal)?;
        self.theorems.insert(name(n), goal);
        Ok(())
    }

    /// Premise and conclusion of a rule whose premise is a single
    /// derivation against a fixed schema: (co)induction variants and the
    /// derived rules.
    pub fn expand_derived(&self, d: &Derivation) -> Result<Schema, KernelErrorKind> {
        use Derivation::*;
        let rule = d.rule_name();
        match d {
            Ind(op, p, _) | Coind(op, p, _) | Si(op, p, _) | Hsi(op, p, _) | Sci(op, p, _) | Hsci(op, p, _) => {
                self.check_op(rule, op)?;
                self.check_pred_arity(rule, p, &op.arity())?;
                let mu = Pred::Mu(op.clone());
                let nu = Pred::Nu(op.clone());
                let (premise, conclusion) = match d {
                    Ind(..) => (Pred::subset(&op.apply(p), p), Pred::subset(&mu, p)),
                    Coind(..) => (Pred::subset(p, &op.apply(p)), Pred::subset(p, &nu)),
                    Hsi(..) => (Pred::subset(&Pred::inter(&op.apply(p), &mu), p), Pred::subset(&mu, p)),
                    Si(..) => (Pred::subset(&op.apply(&Pred::inter(p, &mu)), p), Pred::subset(&mu, p)),
                    Hsci(..) => (Pred::subset(p, &Pred::union(&op.apply(p), &nu)), Pred::subset(p, &nu)),
                    _ => (Pred::subset(p, &op.apply(&Pred::union(p, &nu))), Pred::subset(p, &nu)),
                };
                Ok(Schema { premise, conclusion })
            }
            WfI(prec, a, p, _) => {
                let sort = self.unary_sort(rule, a)?;
                self.check_pred_arity(rule, p, &[sort.clone()])?;
                self.check_pred_arity(rule, prec, &[sort.clone(), sort.clone()])?;
                let mut avoid = prec.free_vars();
                a.free_vars_into(&mut avoid);
                p.free_vars_into(&mut avoid);
                let x = Var { name: fresh_name("x", &avoid), sort: sort.clone() };
                avoid.insert(x.name.clone());
                let y = Var { name: fresh_name("y", &avoid), sort: sort.clone() };
                let (xt, yt) = (x.term(), y.term());
                let premise = Formula::all(
                    x.clone(),
                    Formula::imp(
                        a.apply(&[xt.clone()]),
                        Formula::imp(
                            Formula::all(
                                y.clone(),
                                Formula::imp(
                                    a.apply(&[yt.clone()]),
                                    Formula::imp(prec.apply(&[yt.clone(), xt.clone()]), p.apply(&[yt])),
                                ),
                            ),
                            p.apply(&[xt]),
                        ),
                    ),
                );
                let acc = Pred::Mu(Rc::new(acc_operator(prec, &sort)));
                let conclusion = Pred::subset(&Pred::inter(&acc, a), p);
                Ok(Schema { premise, conclusion })
            }
            AIq(q, p, _) => {
                let sort = self.unary_sort(rule, p)?;
                let x = self.schema_var(&sort, &[p]);
                let xt = x.term();
                let two_x = Term::app("*", vec![Term::constant("2"), xt.clone()]);
                let small = abs_le(xt.clone(), q.clone(), &sort);
                let premise = Formula::all(
                    x.clone(),
                    Formula::imp(
                        nonzero(&xt),
                        Formula::imp(Formula::imp(small, p.apply(&[two_x])), p.apply(&[xt.clone()])),
                    ),
                );
                let conclusion = Formula::all(x, Formula::imp(nonzero(&xt), p.apply(&[xt.clone()])));
                self.check_schema(rule, &premise)?;
                Ok(Schema { premise, conclusion })
            }
            AIBq(q, b, p, _) => {
                let sort = self.unary_sort(rule, p)?;
                self.check_pred_arity(rule, b, &[sort.clone()])?;
                let x = self.schema_var(&sort, &[b, p]);
                let xt = x.term();
                let two_x = Term::app("*", vec![Term::constant("2"), xt.clone()]);
                let small = abs_le(xt.clone(), q.clone(), &sort);
                let step = Formula::and(
                    small,
                    Formula::and(b.apply(&[two_x.clone()]), Formula::imp(p.apply(&[two_x]), p.apply(&[xt.clone()]))),
                );
                let premise = Formula::all(
                    x.clone(),
                    Formula::imp(
                        b.apply(&[xt.clone()]),
                        Formula::imp(nonzero(&xt), Formula::or(p.apply(&[xt.clone()]), step)),
                    ),
                );
                let conclusion = Formula::all(
                    x,
                    Formula::imp(b.apply(&[xt.clone()]), Formula::imp(nonzero(&xt), p.apply(&[xt.clone()]))),
                );
                self.check_schema(rule, &premise)?;
                Ok(Schema { premise, conclusion })
            }
            _ => Err(KernelErrorKind::Mismatch {
                rule,
                expected: "a schematic rule".into(),
                found: rule.into(),
            }),
        }
    }

    fn check_op(&self, _rule: &'static str, op: &Operator) -> Result<(), KernelErrorKind> {
        self.sig.check_op(op).map_err(KernelErrorKind::Logic)
    }

    fn check_pred_arity(&self, rule: &'static str, p: &Pred, arity: &[Name]) -> Result<(), KernelErrorKind> {
        self.sig.check_pred(p).map_err(KernelErrorKind::Logic)?;
        let got = p.arity();
        if got != arity {
            return Err(KernelErrorKind::Arity { rule, expected: sorts(arity), found: sorts(&got) });
        }
        Ok(())
    }

    fn unary_sort(&self, rule: &'static str, p: &Pred) -> Result<Name, KernelErrorKind> {
        self.sig.check_pred(p).map_err(KernelErrorKind::Logic)?;
        let ar = p.arity();
        if ar.len() != 1 {
            return Err(KernelErrorKind::Arity { rule, expected: "a unary predicate".into(), found: sorts(&ar) });
        }
        Ok(ar[0].clone())
    }

    fn schema_var(&self, sort: &Name, preds: &[&Pred]) -> Var {
        let mut avoid = BTreeSet::new();
        for p in preds {
            p.free_vars_into(&mut avoid);
        }
        Var { name: fresh_name("x", &avoid), sort: sort.clone() }
    }

    fn check_schema(&self, _rule: &'static str, f: &Formula) -> Result<(), KernelErrorKind> {
        self.sig.check_formula(f).map_err(KernelErrorKind::Logic)
    }
}

/// `λX λx ∀y (y ≺ x → X y)`, whose least fixed point is the accessible part.
pub fn acc_operator(prec: &Pred, sort: &Name) -> Operator {
    let mut avoid = prec.free_vars();
    let x = Var { name: fresh_name("x", &avoid), sort: sort.clone() };
    avoid.insert(x.name.clone());
    let y = Var { name: fresh_name("y", &avoid), sort: sort.clone() };
    let xs = PredSym { name: fresh_name("X", &prec.free_pvars()), arity: vec![sort.clone()] };
    let body = Formula::all(
        y.clone(),
        Formula::imp(prec.apply(&[y.term(), x.term()]), Formula::App(Pred::Var(xs.clone()), vec![y.term()])),
    );
    Operator { var: xs, params: vec![x], body }
}

fn nonzero(t: &Term) -> Formula {
    Formula::neq(t.clone(), Term::constant("0"))
}

fn sorts(xs: &[Name]) -> String {
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

/// `|x| ≤ q`.
fn abs_le(x: Term, q: Term, sort: &Name) -> Formula {
    let le = PredSym { name: name("<="), arity: vec![sort.clone(), sort.clone()] };
    Formula::App(Pred::Const(le), vec![Term::app("abs", vec![x]), q])
}

impl Checker<'_> {
    fn err(&self, kind: KernelErrorKind) -> KernelError {
        KernelError { path: self.path.clone(), kind }
    }

    fn show(&self, f: &Formula) -> String {
        self.th.show(f)
    }

    fn mismatch(&self, rule: &'static str, expected: impl Into<String>, found: &Formula) -> KernelError {
        self.err(KernelErrorKind::Mismatch { rule, expected: expected.into(), found: self.show(found) })
    }

    fn logic(&self, r: Result<(), LogicError>) -> Result<(), KernelError> {
        r.map_err(|e| self.err(KernelErrorKind::Logic(e)))
    }

    fn child<'d>(&mut self, i: usize, ctx: &mut Context, d: &'d Derivation) -> Result<Checked<'d>, KernelError> {
        self.path.push(i);
        let r = self.go(ctx, d)?;
        self.path.pop();
        Ok(r)
    }

    fn expect(&self, rule: &'static str, want: &Formula, got: &Formula) -> Result<(), KernelError> {
        if alpha_eq(want, got) {
            Ok(())
        } else {
            Err(self.mismatch(rule, self.show(want), got))
        }
    }

    fn go<'d>(&mut self, ctx: &mut Context, d: &'d Derivation) -> Result<Checked<'d>, KernelError> {
        use Derivation::*;
        let rule = d.rule_name();
        let sig = &self.th.sig;
        let (formula, children) = match d {
            Assume(u) => {
                let f = ctx.lookup(u).ok_or_else(|| self.err(KernelErrorKind::UnknownAssumption(u.to_string())))?;
                (f.clone(), vec![])
            }
            Axiom(n) => {
                let f = sig.axioms.get(n).ok_or_else(|| self.err(KernelErrorKind::UnknownAxiom(n.to_string())))?;
                (f.clone(), vec![])
            }
            Lemma(n) => {
                let f = self
                    .th
                    .theorems
                    .get(n)
                    .ok_or_else(|| self.err(KernelErrorKind::UnknownTheorem(n.to_string())))?;
                (f.clone(), vec![])
            }
            Refl(t) => {
                self.logic(sig.sort_of(t).map(|_| ()))?;
                (Formula::eq(t.clone(), t.clone()), vec![])
            }
            Cong(d1, e, x, a) => {
                let cd = self.child(0, ctx, d1)?;
                let ce = self.child(1, ctx, e)?;
                let Formula::Eq(s, t) = &ce.formula else {
                    return Err(self.mismatch(rule, "an equation", &ce.formula));
                };
                self.logic(sig.check_formula(&Formula::all(x.clone(), a.clone())))?;
                self.logic(check_sort(sig, s, &x.sort))?;
                self.expect(rule, &a.subst_term(x, s), &cd.formula)?;
                (a.subst_term(x, t), vec![cd, ce])
            }
            AndI(d1, e) => {
                let cd = self.child(0, ctx, d1)?;
                let ce = self.child(1, ctx, e)?;
                (Formula::and(cd.formula.clone(), ce.formula.clone()), vec![cd, ce])
            }
            AndL(d1) | AndR(d1) => {
                let cd = self.child(0, ctx, d1)?;
                let Formula::And(a, b) = &cd.formula else {
                    return Err(self.mismatch(rule, "a conjunction", &cd.formula));
                };
                let f = if matches!(d, AndL(_)) { (**a).clone() } else { (**b).clone() };
                (f, vec![cd])
            }
            OrL(d1, b) => {
                let cd = self.child(0, ctx, d1)?;
                self.logic(sig.check_formula(b))?;
                (Formula::or(cd.formula.clone(), b.clone()), vec![cd])
            }
            OrR(d1, a) => {
                let cd = self.child(0, ctx, d1)?;
                self.logic(sig.check_formula(a))?;
                (Formula::or(a.clone(), cd.formula.clone()), vec![cd])
            }
            OrE(d1, e, f) => {
                let cd = self.child(0, ctx, d1)?;
                let ce = self.child(1, ctx, e)?;
                let cf = self.child(2, ctx, f)?;
                let Formula::Or(a, b) = &cd.formula else {
                    return Err(self.mismatch(rule, "a disjunction", &cd.formula));
                };
                let Formula::Imp(a2, c) = &ce.formula else {
                    return Err(self.mismatch(rule, "an implication", &ce.formula));
                };
                self.expect(rule, a, a2)?;
                let want = Formula::imp((**b).clone(), (**c).clone());
                self.expect(rule, &want, &cf.formula)?;
                ((**c).clone(), vec![cd, ce, cf])
            }
            ImpI(u, a, d1) => {
                self.logic(sig.check_formula(a))?;
                if ctx.lookup(u).is_some() {
                    return Err(self.err(KernelErrorKind::DuplicateLabel(u.to_string())));
                }
                ctx.entries.push((u.clone(), a.clone()));
                let r = self.child(0, ctx, d1);
                ctx.entries.pop();
                let cd = r?;
                (Formula::imp(a.clone(), cd.formula.clone()), vec![cd])
            }
            ImpE(d1, e) => {
                let cd = self.child(0, ctx, d1)?;
                let ce = self.child(1, ctx, e)?;
                let Formula::Imp(a, b) = &cd.formula else {
                    return Err(self.mismatch(rule, "an implication", &cd.formula));
                };
                self.path.push(1);
                let r = self.expect(rule, a, &ce.formula);
                self.path.pop();
                r?;
                ((**b).clone(), vec![cd, ce])
            }
            AllI(x, d1) => {
                self.logic(sig.require_sort(&x.sort))?;
                if ctx.free_vars().contains(&x.name) {
                    return Err(self.err(KernelErrorKind::Eigenvariable {
                        rule,
                        var: x.name.to_string(),
                        place: "the context",
                    }));
                }
                let cd = self.child(0, ctx, d1)?;
                (Formula::all(x.clone(), cd.formula.clone()), vec![cd])
            }
            AllE(d1, t) => {
                let cd = self.child(0, ctx, d1)?;
                let Formula::All(x, a) = &cd.formula else {
                    return Err(self.mismatch(rule, "a universal formula", &cd.formula));
                };
                self.logic(check_sort(sig, t, &x.sort))?;
                (a.subst_term(x, t), vec![cd])
            }
            ExI(x, a, t, d1) => {
                let cd = self.child(0, ctx, d1)?;
                self.logic(sig.check_formula(&Formula::ex(x.clone(), a.clone())))?;
                self.logic(check_sort(sig, t, &x.sort))?;
                self.expect(rule, &a.subst_term(x, t), &cd.formula)?;
                (Formula::ex(x.clone(), a.clone()), vec![cd])
            }
            ExE(d1, e) => {
                let cd = self.child(0, ctx, d1)?;
                let ce = self.child(1, ctx, e)?;
                let Formula::All(y, body) = &ce.formula else {
                    return Err(self.mismatch(rule, "a universal implication", &ce.formula));
                };
                let Formula::Imp(a, b) = &**body else {
                    return Err(self.mismatch(rule, "a universal implication", &ce.formula));
                };
                self.expect(rule, &Formula::ex(y.clone(), (**a).clone()), &cd.formula)?;
                if b.free_vars().contains(&y.name) {
                    return Err(self.err(KernelErrorKind::Eigenvariable {
                        rule,
                        var: y.name.to_string(),
                        place: "the conclusion",
                    }));
                }
                ((**b).clone(), vec![cd, ce])
            }
            Clos(op) => {
                self.logic(sig.check_op(op))?;
                let mu = Pred::Mu(op.clone());
                (Pred::subset(&op.apply(&mu), &mu), vec![])
            }
            Cocl(op) => {
                self.logic(sig.check_op(op))?;
                let nu = Pred::Nu(op.clone());
                (Pred::subset(&nu, &op.apply(&nu)), vec![])
            }
            Ind(.., d1) | Coind(.., d1) | Si(.., d1) | Hsi(.., d1) | Sci(.., d1) | Hsci(.., d1) => {
                self.schematic(ctx, d, d1)?
            }
            WfI(.., d1) | AIq(.., d1) | AIBq(.., d1) => self.schematic(ctx, d, d1)?,
        };
        Ok(Checked { deriv: d, formula, children })
    }

    fn schematic<'d>(
        &mut self,
        ctx: &mut Context,
        d: &'d Derivation,
        premise: &'d Derivation,
    ) -> Result<(Formula, Vec<Checked<'d>>), KernelError> {
        let schema = self.th.expand_derived(d).map_err(|k| self.err(k))?;
        let cp = self.child(0, ctx, premise)?;
        self.path.push(0);
        let r = self.expect(d.rule_name(), &schema.premise, &cp.formula);
        self.path.pop();
        r?;
        Ok((schema.conclusion, vec![cp]))
    }
}

fn check_sort(sig: &Signature, t: &Term, sort: &Name) -> Result<(), LogicError> {
    let got = sig.sort_of(t)?;
    if &got != sort {
        return Err(LogicError::SortMismatch {
            context: Printer::new(Some(sig)).term(t),
            expected: sort.to_string(),
            got: got.to_string(),
        });
    }
    Ok(())
}
