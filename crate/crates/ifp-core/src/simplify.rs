//! Program simplification.
//!
//! Rewrites, applied anywhere and to a fixpoint:
//! - `(λx.M) N ⇒ M[N/x]`
//! - `case C(M⃗) of {…; C(y⃗) → N; …} ⇒ N[M⃗/y⃗]` (this covers projections)
//! - `case (case M of {pᵢ → Nᵢ}) of K ⇒ case M of {pᵢ → case Nᵢ of K}`
//! - `(case M of {pᵢ → Nᵢ}) A ⇒ case M of {pᵢ → Nᵢ A}`
//!
//! A strict abstraction `λx. case x of K` applied to a case is pushed into
//! its branches by the first and third rule together. The combinator sugar
//! is expanded first. All rules hold in the denotational model for every
//! argument, so the result is equivalent to the input.

use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::vec::Vec;

use crate::logic::{fresh_name, Name};
use crate::program::*;

pub const DEFAULT_FUEL: usize = 20_000;
/// Rewriting stops once a program grows beyond this many nodes.
pub const SIZE_LIMIT: usize = 200_000;

pub fn simplify(m: &P) -> P {
    simplify_with(m, DEFAULT_FUEL)
}

pub fn simplify_with(m: &P, fuel: usize) -> P {
    let mut s = Simp { fuel };
    s.go(&desugar(m))
}

struct Simp {
    fuel: usize,
}

fn rename_clause(c: &Clause, avoid: &BTreeSet<Name>) -> Clause {
    let bs: Vec<Name> = c.pat.binders().into_iter().cloned().collect();
    if !bs.iter().any(|b| avoid.contains(b)) {
        return c.clone();
    }
    let mut used = avoid.clone();
    used.extend(free_vars(&c.body));
    used.extend(bs.iter().cloned());
    let mut body = c.body.clone();
    let mut fresh = |b: &Name, body: &mut P| -> Name {
        if avoid.contains(b) {
            let b2 = fresh_name(b, &used);
            used.insert(b2.clone());
            *body = subst(body, b, &Rc::new(Prog::Var(b2.clone())));
            b2
        } else {
            b.clone()
        }
    };
    let pat = match &c.pat {
        Pat::Nil => Pat::Nil,
        Pat::Left(a) => Pat::Left(fresh(a, &mut body)),
        Pat::Right(a) => Pat::Right(fresh(a, &mut body)),
        Pat::Pair(a, b) => {
            let a2 = fresh(a, &mut body);
            let b2 = fresh(b, &mut body);
            Pat::Pair(a2, b2)
        }
    };
    clause(pat, body)
}

fn select(v: &Prog, cls: &[Clause]) -> Option<P> {
    for c in cls {
        match (&c.pat, v) {
            (Pat::Nil, Prog::Nil) => return Some(c.body.clone()),
            (Pat::Left(a), Prog::Left(m)) | (Pat::Right(a), Prog::Right(m)) => return Some(subst(&c.body, a, m)),
            (Pat::Pair(a, b), Prog::Pair(m, n)) => {
                // Simultaneous substitution via a fresh intermediate name.
                let mut avoid = free_vars(&c.body);
                avoid.extend(free_vars(n));
                avoid.extend(free_vars(m));
                let t = fresh_name(b, &avoid);
                let body = subst(&c.body, b, &Rc::new(Prog::Var(t.clone())));
                let body = if a == b { body } else { subst(&body, a, m) };
                return Some(subst(&body, &t, n));
            }
            _ => {}
        }
    }
    None
}

fn is_constructor(m: &Prog) -> bool {
    matches!(m, Prog::Nil | Prog::Left(_) | Prog::Right(_) | Prog::Pair(..))
}

impl Simp {
    fn spend(&mut self, m: &P) -> bool {
        if self.fuel == 0 || size(m) > SIZE_LIMIT {
            return false;
        }
        self.fuel -= 1;
        true
    }

    fn go(&mut self, m: &P) -> P {
        let m = match &**m {
            Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => return m.clone(),
            Prog::Left(a) => left(self.go(a)),
            Prog::Right(a) => right(self.go(a)),
            Prog::Rec(a) => rec(self.go(a)),
            Prog::Pair(a, b) => pair(self.go(a), self.go(b)),
            Prog::Lam(x, b) => lam(x, self.go(b)),
            Prog::App(a, b) => app(self.go(a), self.go(b)),
            Prog::Case(s, cls) => {
                let s = self.go(s);
                case(s, cls.iter().map(|c| clause(c.pat.clone(), self.go(&c.body))).collect())
            }
            Prog::Comp(..) | Prog::CoSum(..) | Prog::Fanout(..) => return self.go(&desugar(m)),
        };
        self.root(m)
    }

    /// Rewrites at the root of a term whose children are simplified.
    fn root(&mut self, m: P) -> P {
        match &*m {
            Prog::App(f, a) => match &**f {
                Prog::Lam(x, b) if self.spend(&m) => {
                    let r = subst(b, x, a);
                    self.go(&r)
                }
                Prog::Case(s, cls) if self.spend(&m) => {
                    let avoid = free_vars(a);
                    let cls = cls
                        .iter()
                        .map(|c| {
                            let c = rename_clause(c, &avoid);
                            let body = self.root(app(c.body.clone(), a.clone()));
                            clause(c.pat, body)
                        })
                        .collect();
                    case(s.clone(), cls)
                }
                _ => m,
            },
            Prog::Case(s, cls) => {
                if is_constructor(s) {
                    match select(s, cls) {
                        Some(r) if self.spend(&m) => self.go(&r),
                        _ => m,
                    }
                } else if let Prog::Case(s0, inner) = &**s {
                    if !self.spend(&m) {
                        return m;
                    }
                    let mut avoid = BTreeSet::new();
                    for c in cls {
                        let mut fv = free_vars(&c.body);
                        for b in c.pat.binders() {
                            fv.remove(b);
                        }
                        avoid.extend(fv);
                    }
                    let new = inner
                        .iter()
                        .map(|c| {
                            let c = rename_clause(c, &avoid);
                            let body = self.root(case(c.body.clone(), cls.clone()));
                            clause(c.pat, body)
                        })
                        .collect();
                    case(s0.clone(), new)
                } else {
                    m
                }
            }
            _ => m,
        }
    }
}
