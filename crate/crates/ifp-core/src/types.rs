//! Realizer types, the type assignment for formulas and predicates,
//! regularity and the data-formula criterion.

use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::*;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Var(Name),
    One,
    Sum(Rc<Ty>, Rc<Ty>),
    Prod(Rc<Ty>, Rc<Ty>),
    Arrow(Rc<Ty>, Rc<Ty>),
    Fix(Name, Rc<Ty>),
}

impl Ty {
    pub fn var(n: &str) -> Ty {
        Ty::Var(name(n))
    }

    pub fn sum(a: Ty, b: Ty) -> Ty {
        Ty::Sum(Rc::new(a), Rc::new(b))
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Rc::new(a), Rc::new(b))
    }

    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Rc::new(a), Rc::new(b))
    }

    pub fn fix(a: &str, body: Ty) -> Ty {
        Ty::Fix(name(a), Rc::new(body))
    }

    /// `1 + 1`.
    pub fn two() -> Ty {
        Ty::sum(Ty::One, Ty::One)
    }

    /// `(1 + 1) + 1`.
    pub fn three() -> Ty {
        Ty::sum(Ty::two(), Ty::One)
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Ty::Var(a) => {
                out.insert(a.clone());
            }
            Ty::One => {}
            Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Arrow(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            Ty::Fix(a, b) => {
                let mut inner = BTreeSet::new();
                b.free_vars_into(&mut inner);
                inner.remove(a);
                out.extend(inner);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn occurs(&self, a: &str) -> bool {
        self.free_vars().contains(a)
    }

    /// Capture-avoiding `self[t/a]`.
    pub fn subst(&self, a: &str, t: &Ty) -> Ty {
        match self {
            Ty::Var(b) if &**b == a => t.clone(),
            Ty::Var(_) | Ty::One => self.clone(),
            Ty::Sum(x, y) => Ty::Sum(Rc::new(x.subst(a, t)), Rc::new(y.subst(a, t))),
            Ty::Prod(x, y) => Ty::Prod(Rc::new(x.subst(a, t)), Rc::new(y.subst(a, t))),
            Ty::Arrow(x, y) => Ty::Arrow(Rc::new(x.subst(a, t)), Rc::new(y.subst(a, t))),
            Ty::Fix(b, body) => {
                if &**b == a || !body.occurs(a) {
                    return self.clone();
                }
                let tfv = t.free_vars();
                if tfv.contains(b) {
                    let mut avoid = tfv;
                    body.free_vars_into(&mut avoid);
                    avoid.insert(name(a));
                    let b2 = fresh_name(b, &avoid);
                    let renamed = body.subst(b, &Ty::Var(b2.clone()));
                    Ty::Fix(b2, Rc::new(renamed.subst(a, t)))
                } else {
                    Ty::Fix(b.clone(), Rc::new(body.subst(a, t)))
                }
            }
        }
    }

    /// One-step unfolding `ρ[fix α ρ / α]` of `fix α ρ`.
    pub fn unfold(&self) -> Option<Ty> {
        match self {
            Ty::Fix(a, body) => Some(body.subst(a, self)),
            _ => None,
        }
    }

    pub fn alpha_eq(&self, other: &Ty) -> bool {
        fn go<'a>(env: &mut Vec<(&'a str, &'a str)>, s: &'a Ty, t: &'a Ty) -> bool {
            match (s, t) {
                (Ty::Var(a), Ty::Var(b)) => {
                    for (x, y) in env.iter().rev() {
                        if *x == &**a || *y == &**b {
                            return *x == &**a && *y == &**b;
                        }
                    }
                    a == b
                }
                (Ty::One, Ty::One) => true,
                (Ty::Sum(a, b), Ty::Sum(c, d))
                | (Ty::Prod(a, b), Ty::Prod(c, d))
                | (Ty::Arrow(a, b), Ty::Arrow(c, d)) => go(env, a, c) && go(env, b, d),
                (Ty::Fix(a, b), Ty::Fix(c, d)) => {
                    env.push((a, c));
                    let r = go(env, b, d);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(&mut Vec::new(), self, other)
    }

    /// Canonical representative of the alpha class: bound variables renamed
    /// to `a0, a1, …` by binding depth.
    pub fn alpha_normal(&self) -> Ty {
        fn go(t: &Ty, env: &mut Vec<(Name, Name)>) -> Ty {
            match t {
                Ty::Var(a) => match env.iter().rev().find(|(x, _)| x == a) {
                    Some((_, y)) => Ty::Var(y.clone()),
                    None => t.clone(),
                },
                Ty::One => Ty::One,
                Ty::Sum(a, b) => Ty::sum(go(a, env), go(b, env)),
                Ty::Prod(a, b) => Ty::prod(go(a, env), go(b, env)),
                Ty::Arrow(a, b) => Ty::arrow(go(a, env), go(b, env)),
                Ty::Fix(a, b) => {
                    let n = name(&alloc::format!("a{}", env.len()));
                    env.push((a.clone(), n.clone()));
                    let r = Ty::Fix(n, Rc::new(go(b, env)));
                    env.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Strict positivity of `a` (no free occurrence left of an arrow).
    pub fn strictly_positive(&self, a: &str) -> bool {
        match self {
            Ty::Var(_) | Ty::One => true,
            Ty::Sum(x, y) | Ty::Prod(x, y) => x.strictly_positive(a) && y.strictly_positive(a),
            Ty::Arrow(x, y) => !x.occurs(a) && y.strictly_positive(a),
            Ty::Fix(b, body) => &**b == a || body.strictly_positive(a),
        }
    }
}

/// No subexpression `fix α fix β₁ … fix βₙ α`.
pub fn is_regular(t: &Ty) -> bool {
    match t {
        Ty::Var(_) | Ty::One => true,
        Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Arrow(a, b) => is_regular(a) && is_regular(b),
        Ty::Fix(a, body) => {
            let mut cur: &Ty = body;
            let mut shadowed = false;
            loop {
                match cur {
                    Ty::Fix(b, inner) => {
                        if b == a {
                            shadowed = true;
                        }
                        cur = inner;
                    }
                    Ty::Var(v) if v == a && !shadowed => return false,
                    _ => break,
                }
            }
            is_regular(body)
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Var(a) => f.write_str(a),
            Ty::One => f.write_str("1"),
            Ty::Sum(a, b) => write!(f, "(+ {a} {b})"),
            Ty::Prod(a, b) => write!(f, "(* {a} {b})"),
            Ty::Arrow(a, b) => write!(f, "(-> {a} {b})"),
            Ty::Fix(a, b) => write!(f, "(fix {a} {b})"),
        }
    }
}

/// The type of potential realizers of a formula.
pub fn tau(f: &Formula) -> Ty {
    if is_harrop(f, &[]) {
        return Ty::One;
    }
    match f {
        Formula::Eq(..) => Ty::One,
        Formula::App(p, _) => tau_pred(p),
        Formula::And(a, b) => match (is_harrop(a, &[]), is_harrop(b, &[])) {
            (true, _) => tau(b),
            (_, true) => tau(a),
            _ => Ty::prod(tau(a), tau(b)),
        },
        Formula::Or(a, b) => Ty::sum(tau(a), tau(b)),
        Formula::Imp(a, b) => {
            if is_harrop(a, &[]) {
                tau(b)
            } else {
                Ty::arrow(tau(a), tau(b))
            }
        }
        Formula::All(_, b) | Formula::Ex(_, b) => tau(b),
    }
}

pub fn tau_pred(p: &Pred) -> Ty {
    if is_harrop_pred(p, &[]) {
        return Ty::One;
    }
    match p {
        Pred::Var(s) => Ty::Var(s.name.clone()),
        Pred::Const(_) => Ty::One,
        Pred::Abst(_, b) => tau(b),
        Pred::Mu(op) | Pred::Nu(op) => Ty::Fix(op.var.name.clone(), Rc::new(tau(&op.body))),
    }
}

/// Printed form of a type; convenience for diagnostics.
pub fn show(t: &Ty) -> String {
    alloc::format!("{t}")
}

/// No free predicate variables and no strictly positive subformula `A → B`
/// with both `A` and `B` non-Harrop.
pub fn is_data_formula(f: &Formula) -> bool {
    f.free_pvars().is_empty() && data_ok(f)
}

fn data_ok(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::App(p, _) => data_ok_pred(p),
        Formula::And(a, b) | Formula::Or(a, b) => data_ok(a) && data_ok(b),
        Formula::Imp(a, b) => (is_harrop(a, &[]) || is_harrop(b, &[])) && data_ok(b),
        Formula::All(_, b) | Formula::Ex(_, b) => data_ok(b),
    }
}

fn data_ok_pred(p: &Pred) -> bool {
    match p {
        Pred::Var(_) | Pred::Const(_) => true,
        Pred::Abst(_, b) => data_ok(b),
        Pred::Mu(op) | Pred::Nu(op) => data_ok(&op.body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn regularity() {
        assert!(!is_regular(&Ty::fix("a", Ty::var("a"))));
        assert!(is_regular(&Ty::fix("a", Ty::sum(Ty::One, Ty::var("a")))));
        assert!(!is_regular(&Ty::fix("a", Ty::fix("b", Ty::var("a")))));
        assert!(is_regular(&Ty::fix("a", Ty::fix("a", Ty::sum(Ty::One, Ty::var("a"))))));
    }

    #[test]
    fn unfolding() {
        let nat = Ty::fix("a", Ty::sum(Ty::One, Ty::var("a")));
        assert_eq!(nat.unfold().unwrap(), Ty::sum(Ty::One, nat.clone()));
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = Ty::fix("b", Ty::prod(Ty::var("a"), Ty::var("b")));
        let s = t.subst("a", &Ty::var("b"));
        match &s {
            Ty::Fix(c, body) => {
                assert_ne!(&**c, "b");
                assert_eq!(**body, Ty::prod(Ty::var("b"), Ty::Var(c.clone())));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn tau_of_falsum_is_one() {
        assert_eq!(tau(&Formula::falsum()), Ty::One);
        let x = PredSym::new("X", &["r"]);
        let f = Formula::App(Pred::Var(x), vec![Term::constant("0")]);
        assert_eq!(tau(&f), Ty::var("X"));
    }
}
