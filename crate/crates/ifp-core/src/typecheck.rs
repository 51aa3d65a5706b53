//! Type checking of programs against realizer types.
//!
//! Unification with metavariables. In greedy mode a `fix` type met against
//! a structural type is unrolled once (an implicit ROLL/UNROLL); in strict
//! mode this is an error and explicit `roll`/`unroll` constants are needed.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::logic::Name;
use crate::program::{desugar, Pat, Prog, P};
use crate::types::Ty;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Greedy,
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("type error: {0}")]
pub struct TypeError(pub String);

#[derive(Clone, Debug)]
enum T {
    Meta(usize),
    Var(Name),
    One,
    Sum(Box<T>, Box<T>),
    Prod(Box<T>, Box<T>),
    Arrow(Box<T>, Box<T>),
    /// Fixed-point types never contain metavariables.
    Fix(Ty),
}

fn from_ty(t: &Ty) -> T {
    match t {
        Ty::Var(a) => T::Var(a.clone()),
        Ty::One => T::One,
        Ty::Sum(a, b) => T::Sum(Box::new(from_ty(a)), Box::new(from_ty(b))),
        Ty::Prod(a, b) => T::Prod(Box::new(from_ty(a)), Box::new(from_ty(b))),
        Ty::Arrow(a, b) => T::Arrow(Box::new(from_ty(a)), Box::new(from_ty(b))),
        Ty::Fix(..) => T::Fix(t.clone()),
    }
}

const FUEL: usize = 1_000_000;

struct Checker {
    metas: Vec<Option<T>>,
    mode: Mode,
    fuel: usize,
}

impl Checker {
    fn fresh(&mut self) -> T {
        self.metas.push(None);
        T::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, t: &T) -> T {
        let mut cur = t.clone();
        while let T::Meta(m) = cur {
            match &self.metas[m] {
                Some(u) => cur = u.clone(),
                None => return T::Meta(m),
            }
        }
        cur
    }

    fn occurs(&self, m: usize, t: &T) -> bool {
        match self.resolve(t) {
            T::Meta(n) => n == m,
            T::Var(_) | T::One | T::Fix(_) => false,
            T::Sum(a, b) | T::Prod(a, b) | T::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn show(&self, t: &T) -> String {
        match self.resolve(t) {
            T::Meta(m) => format!("?{m}"),
            T::Var(a) => format!("{a}"),
            T::One => "1".into(),
            T::Sum(a, b) => format!("(+ {} {})", self.show(&a), self.show(&b)),
            T::Prod(a, b) => format!("(* {} {})", self.show(&a), self.show(&b)),
            T::Arrow(a, b) => format!("(-> {} {})", self.show(&a), self.show(&b)),
            T::Fix(t) => format!("{t}"),
        }
    }

    fn unify(&mut self, a: &T, b: &T) -> Result<(), TypeError> {
        if self.fuel == 0 {
            return Err(TypeError("unification budget exhausted".into()));
        }
        self.fuel -= 1;
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (T::Meta(m), T::Meta(n)) if m == n => Ok(()),
            (T::Meta(m), t) | (t, T::Meta(m)) => {
                if self.occurs(*m, t) {
                    return Err(TypeError(format!("infinite type ?{m} = {}", self.show(t))));
                }
                self.metas[*m] = Some(t.clone());
                Ok(())
            }
            (T::Var(x), T::Var(y)) if x == y => Ok(()),
            (T::One, T::One) => Ok(()),
            (T::Sum(a1, a2), T::Sum(b1, b2)) | (T::Prod(a1, a2), T::Prod(b1, b2)) | (T::Arrow(a1, a2), T::Arrow(b1, b2)) => {
                self.unify(a1, b1)?;
                self.unify(a2, b2)
            }
            (T::Fix(s), T::Fix(t)) => {
                if s.alpha_eq(t) {
                    Ok(())
                } else {
                    Err(TypeError(format!("cannot match {s} with {t}")))
                }
            }
            (T::Fix(f), t @ (T::One | T::Sum(..) | T::Prod(..) | T::Arrow(..)))
            | (t @ (T::One | T::Sum(..) | T::Prod(..) | T::Arrow(..)), T::Fix(f))
                if self.mode == Mode::Greedy =>
            {
                let u = from_ty(&f.unfold().expect("fix"));
                let t = t.clone();
                self.unify(&u, &t)
            }
            _ => Err(TypeError(format!("cannot match {} with {}", self.show(&a), self.show(&b)))),
        }
    }

    fn check(&mut self, ctx: &mut Vec<(Name, T)>, m: &Prog, t: &T) -> Result<(), TypeError> {
        match m {
            Prog::Var(x) => {
                let Some((_, u)) = ctx.iter().rev().find(|(y, _)| y == x) else {
                    return Err(TypeError(format!("unbound variable `{x}`")));
                };
                let u = u.clone();
                self.unify(&u, t)
            }
            Prog::Nil => self.unify(t, &T::One),
            Prog::Bot => Ok(()),
            Prog::Left(a) | Prog::Right(a) => {
                let (l, r) = (self.fresh(), self.fresh());
                self.unify(t, &T::Sum(Box::new(l.clone()), Box::new(r.clone())))?;
                self.check(ctx, a, if matches!(m, Prog::Left(_)) { &l } else { &r })
            }
            Prog::Pair(a, b) => {
                let (l, r) = (self.fresh(), self.fresh());
                self.unify(t, &T::Prod(Box::new(l.clone()), Box::new(r.clone())))?;
                self.check(ctx, a, &l)?;
                self.check(ctx, b, &r)
            }
            Prog::Lam(x, body) => {
                let (a, b) = (self.fresh(), self.fresh());
                self.unify(t, &T::Arrow(Box::new(a.clone()), Box::new(b.clone())))?;
                ctx.push((x.clone(), a));
                let r = self.check(ctx, body, &b);
                ctx.pop();
                r
            }
            Prog::App(f, a) => {
                let s = self.fresh();
                self.check(ctx, f, &T::Arrow(Box::new(s.clone()), Box::new(t.clone())))?;
                self.check(ctx, a, &s)
            }
            Prog::Rec(f) => self.check(ctx, f, &T::Arrow(Box::new(t.clone()), Box::new(t.clone()))),
            Prog::Case(s, cls) => {
                let st = self.fresh();
                self.check(ctx, s, &st)?;
                let (l, r) = (self.fresh(), self.fresh());
                let mut sum_done = false;
                for c in cls {
                    let n = ctx.len();
                    match &c.pat {
                        Pat::Nil => self.unify(&st, &T::One)?,
                        Pat::Left(a) | Pat::Right(a) => {
                            if !sum_done {
                                self.unify(&st, &T::Sum(Box::new(l.clone()), Box::new(r.clone())))?;
                                sum_done = true;
                            }
                            let at = if matches!(c.pat, Pat::Left(_)) { l.clone() } else { r.clone() };
                            ctx.push((a.clone(), at));
                        }
                        Pat::Pair(a, b) => {
                            let (x, y) = (self.fresh(), self.fresh());
                            self.unify(&st, &T::Prod(Box::new(x.clone()), Box::new(y.clone())))?;
                            ctx.push((a.clone(), x));
                            ctx.push((b.clone(), y));
                        }
                    }
                    let res = self.check(ctx, &c.body, t);
                    ctx.truncate(n);
                    res?;
                }
                Ok(())
            }
            Prog::Roll(ty) | Prog::Unroll(ty) => {
                let Some(u) = ty.unfold() else {
                    return Err(TypeError(format!("roll/unroll at non-fixpoint type {ty}")));
                };
                let (fix, unf) = (T::Fix(ty.clone()), from_ty(&u));
                let want = if matches!(m, Prog::Roll(_)) {
                    T::Arrow(Box::new(unf), Box::new(fix))
                } else {
                    T::Arrow(Box::new(fix), Box::new(unf))
                };
                self.unify(t, &want)
            }
            Prog::Comp(..) | Prog::CoSum(..) | Prog::Fanout(..) => {
                let d = desugar(&alloc::rc::Rc::new(m.clone()));
                self.check(ctx, &d, t)
            }
        }
    }
}

/// Checks `Γ ⊢ M : ρ`.
pub fn type_check(ctx: &[(Name, Ty)], m: &P, ty: &Ty, mode: Mode) -> Result<(), TypeError> {
    let mut c = Checker { metas: Vec::new(), mode, fuel: FUEL };
    let mut env: Vec<(Name, T)> = ctx.iter().map(|(x, t)| (x.clone(), from_ty(t))).collect();
    let m = desugar(m);
    c.check(&mut env, &m, &from_ty(ty))
}
