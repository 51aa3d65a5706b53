use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::vec::Vec;

use super::syntax::*;

/// Smallest variant of `base` (trailing digits stripped, then a numeric
/// suffix) not in `avoid`. Returns `base` itself when it is free.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    if !avoid.contains(base) {
        return name(base);
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    let mut n = 1usize;
    loop {
        let cand = format!("{stem}{n}");
        if !avoid.contains(cand.as_str()) {
            return name(&cand);
        }
        n += 1;
    }
}

/// Simultaneous capture-avoiding substitution of terms for object variables
/// and predicates for predicate variables.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    pub terms: BTreeMap<Name, Term>,
    pub preds: BTreeMap<Name, Pred>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn with_term(mut self, x: Name, t: Term) -> Subst {
        self.terms.insert(x, t);
        self
    }

    pub fn with_pred(mut self, x: Name, p: Pred) -> Subst {
        self.preds.insert(x, p);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.preds.is_empty()
    }

    fn range_obj_fvs(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for t in self.terms.values() {
            t.free_vars_into(&mut out);
        }
        for p in self.preds.values() {
            p.free_vars_into(&mut out);
        }
        out
    }

    fn range_pred_fvs(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for p in self.preds.values() {
            p.free_pvars_into(&mut out);
        }
        out
    }

    /// Pass under an object binder, renaming it when it would capture.
    fn enter_obj(&self, x: &Var, body_fvs: impl FnOnce() -> BTreeSet<Name>) -> (Subst, Var) {
        let mut s = self.clone();
        s.terms.remove(&x.name);
        if s.is_empty() {
            return (s, x.clone());
        }
        let range = s.range_obj_fvs();
        if !range.contains(&x.name) {
            return (s, x.clone());
        }
        let mut avoid = range;
        avoid.extend(body_fvs());
        avoid.extend(s.terms.keys().cloned());
        let x2 = Var { name: fresh_name(&x.name, &avoid), sort: x.sort.clone() };
        s.terms.insert(x.name.clone(), Term::Var(x2.clone()));
        (s, x2)
    }

    fn enter_objs(&self, xs: &[Var], body: &Formula) -> (Subst, Vec<Var>) {
        let mut s = self.clone();
        let mut out = Vec::with_capacity(xs.len());
        let mut taken: BTreeSet<Name> = BTreeSet::new();
        for x in xs {
            let (s2, x2) = s.enter_obj(x, || {
                let mut fv = body.free_vars();
                fv.extend(taken.iter().cloned());
                fv
            });
            taken.insert(x2.name.clone());
            s = s2;
            out.push(x2);
        }
        (s, out)
    }

    fn enter_pred(&self, x: &PredSym, body: &Formula) -> (Subst, PredSym) {
        let mut s = self.clone();
        s.preds.remove(&x.name);
        if s.preds.is_empty() {
            return (s, x.clone());
        }
        let range = s.range_pred_fvs();
        if !range.contains(&x.name) {
            return (s, x.clone());
        }
        let mut avoid = range;
        avoid.extend(body.free_pvars());
        avoid.extend(s.preds.keys().cloned());
        let x2 = PredSym { name: fresh_name(&x.name, &avoid), arity: x.arity.clone() };
        s.preds.insert(x.name.clone(), Pred::Var(x2.clone()));
        (s, x2)
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.terms.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        if self.is_empty() {
            return f.clone();
        }
        match f {
            Formula::Eq(s, t) => Formula::Eq(self.apply_term(s), self.apply_term(t)),
            Formula::App(p, ts) => {
                let ts: Vec<Term> = ts.iter().map(|t| self.apply_term(t)).collect();
                if let Pred::Var(v) = p {
                    if let Some(q) = self.preds.get(&v.name) {
                        return q.apply(&ts);
                    }
                }
                self.apply_pred(p).apply(&ts)
            }
            Formula::And(a, b) => Formula::And(Rc::new(self.apply(a)), Rc::new(self.apply(b))),
            Formula::Or(a, b) => Formula::Or(Rc::new(self.apply(a)), Rc::new(self.apply(b))),
            Formula::Imp(a, b) => Formula::Imp(Rc::new(self.apply(a)), Rc::new(self.apply(b))),
            Formula::All(x, body) => {
                let (s, x2) = self.enter_obj(x, || body.free_vars());
                Formula::All(x2, Rc::new(s.apply(body)))
            }
            Formula::Ex(x, body) => {
                let (s, x2) = self.enter_obj(x, || body.free_vars());
                Formula::Ex(x2, Rc::new(s.apply(body)))
            }
        }
    }

    pub fn apply_pred(&self, p: &Pred) -> Pred {
        if self.is_empty() {
            return p.clone();
        }
        match p {
            Pred::Var(v) => self.preds.get(&v.name).cloned().unwrap_or_else(|| p.clone()),
            Pred::Const(_) => p.clone(),
            Pred::Abst(xs, body) => {
                let (s, xs2) = self.enter_objs(xs, body);
                Pred::Abst(xs2, Rc::new(s.apply(body)))
            }
            Pred::Mu(op) => Pred::Mu(Rc::new(self.apply_op(op))),
            Pred::Nu(op) => Pred::Nu(Rc::new(self.apply_op(op))),
        }
    }

    pub fn apply_op(&self, op: &Operator) -> Operator {
        let (s, var) = self.enter_pred(&op.var, &op.body);
        let (s, params) = s.enter_objs(&op.params, &op.body);
        Operator { var, params, body: s.apply(&op.body) }
    }
}

#[derive(Default)]
struct Env<'a> {
    obj: Vec<(&'a str, &'a str)>,
    pred: Vec<(&'a str, &'a str)>,
}

fn bound_eq(pairs: &[(&str, &str)], x: &str, y: &str) -> bool {
    for (a, b) in pairs.iter().rev() {
        if *a == x || *b == y {
            return *a == x && *b == y;
        }
    }
    x == y
}

pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    aeq_f(&mut Env::default(), f, g)
}

pub fn alpha_eq_pred(p: &Pred, q: &Pred) -> bool {
    aeq_p(&mut Env::default(), p, q)
}

pub fn alpha_eq_op(p: &Operator, q: &Operator) -> bool {
    aeq_op(&mut Env::default(), p, q)
}

fn aeq_t(env: &Env, s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => bound_eq(&env.obj, &x.name, &y.name),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| aeq_t(env, a, b))
        }
        _ => false,
    }
}

fn aeq_f<'a>(env: &mut Env<'a>, f: &'a Formula, g: &'a Formula) -> bool {
    match (f, g) {
        (Formula::Eq(a, b), Formula::Eq(c, d)) => aeq_t(env, a, c) && aeq_t(env, b, d),
        (Formula::App(p, xs), Formula::App(q, ys)) => {
            xs.len() == ys.len() && aeq_p(env, p, q) && xs.iter().zip(ys).all(|(a, b)| aeq_t(env, a, b))
        }
        (Formula::And(a, b), Formula::And(c, d))
        | (Formula::Or(a, b), Formula::Or(c, d))
        | (Formula::Imp(a, b), Formula::Imp(c, d)) => aeq_f(env, a, c) && aeq_f(env, b, d),
        (Formula::All(x, a), Formula::All(y, b)) | (Formula::Ex(x, a), Formula::Ex(y, b)) => {
            if x.sort != y.sort {
                return false;
            }
            env.obj.push((&x.name, &y.name));
            let r = aeq_f(env, a, b);
            env.obj.pop();
            r
        }
        _ => false,
    }
}

fn aeq_p<'a>(env: &mut Env<'a>, p: &'a Pred, q: &'a Pred) -> bool {
    match (p, q) {
        (Pred::Var(x), Pred::Var(y)) => x.arity == y.arity && bound_eq(&env.pred, &x.name, &y.name),
        (Pred::Const(x), Pred::Const(y)) => x == y,
        (Pred::Abst(xs, a), Pred::Abst(ys, b)) => {
            if xs.len() != ys.len() || xs.iter().zip(ys).any(|(x, y)| x.sort != y.sort) {
                return false;
            }
            let n = env.obj.len();
            for (x, y) in xs.iter().zip(ys) {
                env.obj.push((&x.name, &y.name));
            }
            let r = aeq_f(env, a, b);
            env.obj.truncate(n);
            r
        }
        (Pred::Mu(a), Pred::Mu(b)) | (Pred::Nu(a), Pred::Nu(b)) => aeq_op(env, a, b),
        _ => false,
    }
}

fn aeq_op<'a>(env: &mut Env<'a>, a: &'a Operator, b: &'a Operator) -> bool {
    if a.var.arity != b.var.arity || a.params.len() != b.params.len() {
        return false;
    }
    if a.params.iter().zip(&b.params).any(|(x, y)| x.sort != y.sort) {
        return false;
    }
    let n = env.obj.len();
    env.pred.push((&a.var.name, &b.var.name));
    for (x, y) in a.params.iter().zip(&b.params) {
        env.obj.push((&x.name, &y.name));
    }
    let r = aeq_f(env, &a.body, &b.body);
    env.obj.truncate(n);
    env.pred.pop();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Var {
        Var::new(n, "r")
    }

    #[test]
    fn fresh_names_strip_digits() {
        let avoid: BTreeSet<Name> = ["x", "x1"].iter().map(|s| name(s)).collect();
        assert_eq!(&*fresh_name("x", &avoid), "x2");
        assert_eq!(&*fresh_name("x1", &avoid), "x2");
        assert_eq!(&*fresh_name("y", &avoid), "y");
    }

    #[test]
    fn substitution_avoids_capture() {
        // ∀y (x = y) [x := y]
        let f = Formula::all(v("y"), Formula::eq(v("x").term(), v("y").term()));
        let g = f.subst_term(&v("x"), &v("y").term());
        match &g {
            Formula::All(b, body) => {
                assert_ne!(&*b.name, "y");
                assert_eq!(**body, Formula::eq(v("y").term(), b.term()));
            }
            _ => panic!(),
        }
        assert!(!alpha_eq(&f, &g));
    }

    #[test]
    fn alpha_equivalence_of_binders() {
        let f = Formula::all(v("y"), Formula::eq(v("y").term(), v("z").term()));
        let g = Formula::all(v("w"), Formula::eq(v("w").term(), v("z").term()));
        let h = Formula::all(v("z"), Formula::eq(v("z").term(), v("z").term()));
        assert!(alpha_eq(&f, &g));
        assert!(!alpha_eq(&f, &h));
    }

    #[test]
    fn predicate_substitution_beta_reduces() {
        let x = PredSym::new("X", &["r"]);
        let f = Formula::App(Pred::Var(x), alloc::vec![v("a").term()]);
        let p = Pred::Abst(alloc::vec![v("z")], Rc::new(Formula::eq(v("z").term(), v("z").term())));
        let g = f.subst_pred("X", &p);
        assert_eq!(g, Formula::eq(v("a").term(), v("a").term()));
    }
}
