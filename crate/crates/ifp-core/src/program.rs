//! Untyped programs: the target language of extraction.

use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::logic::{fresh_name, name, Name};
use crate::types::Ty;

pub type P = Rc<Prog>;

#[derive(Clone, Debug, PartialEq)]
pub enum Prog {
    Var(Name),
    Nil,
    Left(P),
    Right(P),
    Pair(P, P),
    Case(P, Vec<Clause>),
    Lam(Name, P),
    App(P, P),
    Rec(P),
    Bot,
    /// `M ∘ N`.
    Comp(P, P),
    /// `[M + N]`.
    CoSum(P, P),
    /// `⟨M, N⟩`.
    Fanout(P, P),
    /// `roll` at the given fixed-point type; behaves as the identity.
    Roll(Ty),
    Unroll(Ty),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub pat: Pat,
    pub body: P,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pat {
    Nil,
    Left(Name),
    Right(Name),
    Pair(Name, Name),
}

impl Pat {
    pub fn binders(&self) -> Vec<&Name> {
        match self {
            Pat::Nil => vec![],
            Pat::Left(a) | Pat::Right(a) => vec![a],
            Pat::Pair(a, b) => vec![a, b],
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Pat::Nil => 0,
            Pat::Left(_) => 1,
            Pat::Right(_) => 2,
            Pat::Pair(..) => 3,
        }
    }

    pub fn same_constructor(&self, other: &Pat) -> bool {
        self.tag() == other.tag()
    }
}

pub fn var(x: &str) -> P {
    Rc::new(Prog::Var(name(x)))
}

pub fn nil() -> P {
    Rc::new(Prog::Nil)
}

pub fn bot() -> P {
    Rc::new(Prog::Bot)
}

pub fn left(m: P) -> P {
    Rc::new(Prog::Left(m))
}

pub fn right(m: P) -> P {
    Rc::new(Prog::Right(m))
}

pub fn pair(m: P, n: P) -> P {
    Rc::new(Prog::Pair(m, n))
}

pub fn lam(x: &Name, m: P) -> P {
    Rc::new(Prog::Lam(x.clone(), m))
}

pub fn app(m: P, n: P) -> P {
    Rc::new(Prog::App(m, n))
}

pub fn apps(m: P, args: impl IntoIterator<Item = P>) -> P {
    args.into_iter().fold(m, app)
}

pub fn rec(m: P) -> P {
    Rc::new(Prog::Rec(m))
}

pub fn case(m: P, clauses: Vec<Clause>) -> P {
    Rc::new(Prog::Case(m, clauses))
}

pub fn clause(pat: Pat, body: P) -> Clause {
    Clause { pat, body }
}

pub fn comp(m: P, n: P) -> P {
    Rc::new(Prog::Comp(m, n))
}

pub fn cosum(m: P, n: P) -> P {
    Rc::new(Prog::CoSum(m, n))
}

pub fn fanout(m: P, n: P) -> P {
    Rc::new(Prog::Fanout(m, n))
}

pub fn id(avoid: &BTreeSet<Name>) -> P {
    let a = fresh_name("a", avoid);
    lam(&a, Rc::new(Prog::Var(a.clone())))
}

/// `case m of {Pair(a,b) → a}`.
pub fn pl(m: P) -> P {
    let fv = free_vars(&m);
    let a = fresh_name("a", &fv);
    let mut avoid = fv;
    avoid.insert(a.clone());
    let b = fresh_name("b", &avoid);
    case(m, vec![clause(Pat::Pair(a.clone(), b), Rc::new(Prog::Var(a)))])
}

/// `case m of {Pair(a,b) → b}`.
pub fn pr(m: P) -> P {
    let fv = free_vars(&m);
    let a = fresh_name("a", &fv);
    let mut avoid = fv;
    avoid.insert(a.clone());
    let b = fresh_name("b", &avoid);
    case(m, vec![clause(Pat::Pair(a, b.clone()), Rc::new(Prog::Var(b)))])
}

pub fn free_vars(m: &Prog) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fv_into(m, &mut Vec::new(), &mut out);
    out
}

fn fv_into(m: &Prog, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match m {
        Prog::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => {}
        Prog::Left(a) | Prog::Right(a) | Prog::Rec(a) => fv_into(a, bound, out),
        Prog::Pair(a, b) | Prog::App(a, b) | Prog::Comp(a, b) | Prog::CoSum(a, b) | Prog::Fanout(a, b) => {
            fv_into(a, bound, out);
            fv_into(b, bound, out);
        }
        Prog::Lam(x, b) => {
            bound.push(x.clone());
            fv_into(b, bound, out);
            bound.pop();
        }
        Prog::Case(s, cls) => {
            fv_into(s, bound, out);
            for c in cls {
                let n = bound.len();
                bound.extend(c.pat.binders().into_iter().cloned());
                fv_into(&c.body, bound, out);
                bound.truncate(n);
            }
        }
    }
}

pub fn is_closed(m: &Prog) -> bool {
    free_vars(m).is_empty()
}

pub fn size(m: &Prog) -> usize {
    1 + match m {
        Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => 0,
        Prog::Left(a) | Prog::Right(a) | Prog::Rec(a) | Prog::Lam(_, a) => size(a),
        Prog::Pair(a, b) | Prog::App(a, b) | Prog::Comp(a, b) | Prog::CoSum(a, b) | Prog::Fanout(a, b) => {
            size(a) + size(b)
        }
        Prog::Case(s, cls) => size(s) + cls.iter().map(|c| size(&c.body)).sum::<usize>(),
    }
}

/// Capture-avoiding `m[n/x]`.
pub fn subst(m: &P, x: &str, n: &P) -> P {
    let fvn = free_vars(n);
    subst_with(m, x, n, &fvn)
}

fn subst_with(m: &P, x: &str, n: &P, fvn: &BTreeSet<Name>) -> P {
    match &**m {
        Prog::Var(y) => {
            if &**y == x {
                n.clone()
            } else {
                m.clone()
            }
        }
        Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => m.clone(),
        Prog::Left(a) => left(subst_with(a, x, n, fvn)),
        Prog::Right(a) => right(subst_with(a, x, n, fvn)),
        Prog::Rec(a) => rec(subst_with(a, x, n, fvn)),
        Prog::Pair(a, b) => pair(subst_with(a, x, n, fvn), subst_with(b, x, n, fvn)),
        Prog::App(a, b) => app(subst_with(a, x, n, fvn), subst_with(b, x, n, fvn)),
        Prog::Comp(a, b) => comp(subst_with(a, x, n, fvn), subst_with(b, x, n, fvn)),
        Prog::CoSum(a, b) => cosum(subst_with(a, x, n, fvn), subst_with(b, x, n, fvn)),
        Prog::Fanout(a, b) => fanout(subst_with(a, x, n, fvn), subst_with(b, x, n, fvn)),
        Prog::Lam(y, b) => {
            if &**y == x || !free_vars(b).contains(x) {
                return m.clone();
            }
            if fvn.contains(y) {
                let mut avoid = fvn.clone();
                avoid.extend(free_vars(b));
                avoid.insert(name(x));
                let y2 = fresh_name(y, &avoid);
                let b2 = subst(b, y, &Rc::new(Prog::Var(y2.clone())));
                lam(&y2, subst_with(&b2, x, n, fvn))
            } else {
                lam(y, subst_with(b, x, n, fvn))
            }
        }
        Prog::Case(s, cls) => {
            let s2 = subst_with(s, x, n, fvn);
            let cls2 = cls.iter().map(|c| subst_clause(c, x, n, fvn)).collect();
            case(s2, cls2)
        }
    }
}

fn subst_clause(c: &Clause, x: &str, n: &P, fvn: &BTreeSet<Name>) -> Clause {
    let bs = c.pat.binders();
    if bs.iter().any(|b| &***b == x) || !free_vars(&c.body).contains(x) {
        return c.clone();
    }
    if !bs.iter().any(|b| fvn.contains(*b)) {
        return clause(c.pat.clone(), subst_with(&c.body, x, n, fvn));
    }
    let mut avoid = fvn.clone();
    avoid.extend(free_vars(&c.body));
    avoid.insert(name(x));
    let mut body = c.body.clone();
    let rename = |b: &Name, avoid: &mut BTreeSet<Name>, body: &mut P| -> Name {
        if fvn.contains(b) {
            let b2 = fresh_name(b, avoid);
            avoid.insert(b2.clone());
            *body = subst(body, b, &Rc::new(Prog::Var(b2.clone())));
            b2
        } else {
            b.clone()
        }
    };
    let pat = match &c.pat {
        Pat::Nil => Pat::Nil,
        Pat::Left(a) => Pat::Left(rename(a, &mut avoid, &mut body)),
        Pat::Right(a) => Pat::Right(rename(a, &mut avoid, &mut body)),
        Pat::Pair(a, b) => {
            avoid.insert(a.clone());
            avoid.insert(b.clone());
            let a2 = rename(a, &mut avoid, &mut body);
            let b2 = rename(b, &mut avoid, &mut body);
            Pat::Pair(a2, b2)
        }
    };
    clause(pat, subst_with(&body, x, n, fvn))
}

/// Substitution of a closed program: no renaming is ever needed.
pub fn subst_closed(m: &P, x: &str, n: &P) -> P {
    match &**m {
        Prog::Var(y) => {
            if &**y == x {
                n.clone()
            } else {
                m.clone()
            }
        }
        Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => m.clone(),
        Prog::Left(a) => left(subst_closed(a, x, n)),
        Prog::Right(a) => right(subst_closed(a, x, n)),
        Prog::Rec(a) => rec(subst_closed(a, x, n)),
        Prog::Pair(a, b) => pair(subst_closed(a, x, n), subst_closed(b, x, n)),
        Prog::App(a, b) => app(subst_closed(a, x, n), subst_closed(b, x, n)),
        Prog::Comp(a, b) => comp(subst_closed(a, x, n), subst_closed(b, x, n)),
        Prog::CoSum(a, b) => cosum(subst_closed(a, x, n), subst_closed(b, x, n)),
        Prog::Fanout(a, b) => fanout(subst_closed(a, x, n), subst_closed(b, x, n)),
        Prog::Lam(y, b) => {
            if &**y == x {
                m.clone()
            } else {
                lam(y, subst_closed(b, x, n))
            }
        }
        Prog::Case(s, cls) => case(
            subst_closed(s, x, n),
            cls.iter()
                .map(|c| {
                    if c.pat.binders().iter().any(|b| &***b == x) {
                        c.clone()
                    } else {
                        clause(c.pat.clone(), subst_closed(&c.body, x, n))
                    }
                })
                .collect(),
        ),
    }
}

/// Simultaneous substitution of closed programs for free variables.
pub fn link(m: &P, defs: &[(Name, P)]) -> P {
    defs.iter().fold(m.clone(), |acc, (x, d)| subst(&acc, x, d))
}

pub fn alpha_eq(m: &Prog, n: &Prog) -> bool {
    fn bound_eq(env: &[(Name, Name)], x: &Name, y: &Name) -> bool {
        for (a, b) in env.iter().rev() {
            if a == x || b == y {
                return a == x && b == y;
            }
        }
        x == y
    }
    fn go(env: &mut Vec<(Name, Name)>, m: &Prog, n: &Prog) -> bool {
        match (m, n) {
            (Prog::Var(x), Prog::Var(y)) => bound_eq(env, x, y),
            (Prog::Nil, Prog::Nil) | (Prog::Bot, Prog::Bot) => true,
            (Prog::Roll(a), Prog::Roll(b)) | (Prog::Unroll(a), Prog::Unroll(b)) => a.alpha_eq(b),
            (Prog::Left(a), Prog::Left(b)) | (Prog::Right(a), Prog::Right(b)) | (Prog::Rec(a), Prog::Rec(b)) => {
                go(env, a, b)
            }
            (Prog::Pair(a, b), Prog::Pair(c, d))
            | (Prog::App(a, b), Prog::App(c, d))
            | (Prog::Comp(a, b), Prog::Comp(c, d))
            | (Prog::CoSum(a, b), Prog::CoSum(c, d))
            | (Prog::Fanout(a, b), Prog::Fanout(c, d)) => go(env, a, c) && go(env, b, d),
            (Prog::Lam(x, a), Prog::Lam(y, b)) => {
                env.push((x.clone(), y.clone()));
                let r = go(env, a, b);
                env.pop();
                r
            }
            (Prog::Case(s, cs), Prog::Case(t, ds)) => {
                if !go(env, s, t) || cs.len() != ds.len() {
                    return false;
                }
                cs.iter().zip(ds).all(|(c, d)| {
                    if !c.pat.same_constructor(&d.pat) {
                        return false;
                    }
                    let n = env.len();
                    for (x, y) in c.pat.binders().into_iter().zip(d.pat.binders()) {
                        env.push((x.clone(), y.clone()));
                    }
                    let r = go(env, &c.body, &d.body);
                    env.truncate(n);
                    r
                })
            }
            _ => false,
        }
    }
    go(&mut Vec::new(), m, n)
}

/// Alpha-equivalence up to the order of case clauses.
pub fn alpha_eq_modulo_clause_order(m: &Prog, n: &Prog) -> bool {
    alpha_eq(&sort_clauses(m), &sort_clauses(n))
}

fn sort_clauses(m: &Prog) -> Prog {
    map_children(m, &|c| Rc::new(sort_clauses(c)), |cls| {
        let mut cls = cls;
        cls.sort_by_key(|c| c.pat.tag());
        cls
    })
}

fn map_children(m: &Prog, f: &dyn Fn(&P) -> P, fix_clauses: impl Fn(Vec<Clause>) -> Vec<Clause>) -> Prog {
    match m {
        Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => m.clone(),
        Prog::Left(a) => Prog::Left(f(a)),
        Prog::Right(a) => Prog::Right(f(a)),
        Prog::Rec(a) => Prog::Rec(f(a)),
        Prog::Lam(x, a) => Prog::Lam(x.clone(), f(a)),
        Prog::Pair(a, b) => Prog::Pair(f(a), f(b)),
        Prog::App(a, b) => Prog::App(f(a), f(b)),
        Prog::Comp(a, b) => Prog::Comp(f(a), f(b)),
        Prog::CoSum(a, b) => Prog::CoSum(f(a), f(b)),
        Prog::Fanout(a, b) => Prog::Fanout(f(a), f(b)),
        Prog::Case(s, cls) => Prog::Case(
            f(s),
            fix_clauses(cls.iter().map(|c| clause(c.pat.clone(), f(&c.body))).collect()),
        ),
    }
}

/// Expands `∘`, `[·+·]` and `⟨·,·⟩` everywhere.
pub fn desugar(m: &P) -> P {
    match &**m {
        Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => m.clone(),
        Prog::Comp(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let mut avoid = free_vars(&a);
            avoid.extend(free_vars(&b));
            let x = fresh_name("a", &avoid);
            lam(&x, app(a, app(b, Rc::new(Prog::Var(x.clone())))))
        }
        Prog::CoSum(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let mut avoid = free_vars(&a);
            avoid.extend(free_vars(&b));
            let c = fresh_name("c", &avoid);
            let x = fresh_name("a", &avoid);
            let y = fresh_name("b", &avoid);
            lam(
                &c,
                case(
                    Rc::new(Prog::Var(c.clone())),
                    vec![
                        clause(Pat::Left(x.clone()), app(a, Rc::new(Prog::Var(x)))),
                        clause(Pat::Right(y.clone()), app(b, Rc::new(Prog::Var(y)))),
                    ],
                ),
            )
        }
        Prog::Fanout(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let mut avoid = free_vars(&a);
            avoid.extend(free_vars(&b));
            let c = fresh_name("c", &avoid);
            let cv = Rc::new(Prog::Var(c.clone()));
            lam(&c, pair(app(a, cv.clone()), app(b, cv)))
        }
        _ => Rc::new(map_children(m, &desugar, |c| c)),
    }
}

pub fn has_sugar(m: &Prog) -> bool {
    match m {
        Prog::Comp(..) | Prog::CoSum(..) | Prog::Fanout(..) => true,
        Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => false,
        Prog::Left(a) | Prog::Right(a) | Prog::Rec(a) | Prog::Lam(_, a) => has_sugar(a),
        Prog::Pair(a, b) | Prog::App(a, b) => has_sugar(a) || has_sugar(b),
        Prog::Case(s, cls) => has_sugar(s) || cls.iter().any(|c| has_sugar(&c.body)),
    }
}

/// Removes `roll`/`unroll` annotations (they denote the identity).
pub fn erase_rolls(m: &P) -> P {
    match &**m {
        Prog::App(f, a) if matches!(&**f, Prog::Roll(_) | Prog::Unroll(_)) => erase_rolls(a),
        Prog::Roll(_) | Prog::Unroll(_) => {
            let a = name("a");
            lam(&a, Rc::new(Prog::Var(a.clone())))
        }
        _ => Rc::new(map_children(m, &erase_rolls, |c| c)),
    }
}

impl fmt::Display for Prog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prog(f, self)
    }
}

pub fn show(m: &Prog) -> String {
    let mut s = String::new();
    write_prog(&mut s, m).unwrap();
    s
}

fn write_pat(w: &mut impl Write, p: &Pat) -> fmt::Result {
    match p {
        Pat::Nil => w.write_str("Nil"),
        Pat::Left(a) => write!(w, "(Left {a})"),
        Pat::Right(a) => write!(w, "(Right {a})"),
        Pat::Pair(a, b) => write!(w, "(Pair {a} {b})"),
    }
}

fn projection(m: &Prog) -> Option<(&'static str, &P)> {
    if let Prog::Case(s, cls) = m {
        if let [Clause { pat: Pat::Pair(a, b), body }] = cls.as_slice() {
            if a != b {
                if let Prog::Var(v) = &**body {
                    if v == a {
                        return Some(("pl", s));
                    }
                    if v == b {
                        return Some(("pr", s));
                    }
                }
            }
        }
    }
    None
}

pub fn write_prog(w: &mut impl Write, m: &Prog) -> fmt::Result {
    if let Some((kw, s)) = projection(m) {
        write!(w, "({kw} ")?;
        write_prog(w, s)?;
        return w.write_char(')');
    }
    match m {
        Prog::Var(x) => w.write_str(x),
        Prog::Nil => w.write_str("Nil"),
        Prog::Bot => w.write_str("bot"),
        Prog::Roll(t) => write!(w, "(roll {t})"),
        Prog::Unroll(t) => write!(w, "(unroll {t})"),
        Prog::Left(a) => {
            w.write_str("(Left ")?;
            write_prog(w, a)?;
            w.write_char(')')
        }
        Prog::Right(a) => {
            w.write_str("(Right ")?;
            write_prog(w, a)?;
            w.write_char(')')
        }
        Prog::Rec(a) => {
            w.write_str("(rec ")?;
            write_prog(w, a)?;
            w.write_char(')')
        }
        Prog::Pair(a, b) => binary(w, "Pair", a, b),
        Prog::Comp(a, b) => binary(w, "comp", a, b),
        Prog::CoSum(a, b) => binary(w, "sum", a, b),
        Prog::Fanout(a, b) => binary(w, "pairing", a, b),
        Prog::Lam(..) => {
            let mut xs = Vec::new();
            let mut cur = m;
            while let Prog::Lam(x, b) = cur {
                xs.push(x.clone());
                cur = b;
            }
            w.write_str("(lam (")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    w.write_char(' ')?;
                }
                w.write_str(x)?;
            }
            w.write_str(") ")?;
            write_prog(w, cur)?;
            w.write_char(')')
        }
        Prog::App(..) => {
            let mut args = Vec::new();
            let mut cur = m;
            while let Prog::App(f, a) = cur {
                args.push(a);
                cur = f;
            }
            w.write_char('(')?;
            write_prog(w, cur)?;
            for a in args.iter().rev() {
                w.write_char(' ')?;
                write_prog(w, a)?;
            }
            w.write_char(')')
        }
        Prog::Case(s, cls) => {
            w.write_str("(case ")?;
            write_prog(w, s)?;
            for c in cls {
                w.write_str(" (")?;
                write_pat(w, &c.pat)?;
                w.write_char(' ')?;
                write_prog(w, &c.body)?;
                w.write_char(')')?;
            }
            w.write_char(')')
        }
    }
}

fn binary(w: &mut impl Write, kw: &str, a: &Prog, b: &Prog) -> fmt::Result {
    write!(w, "({kw} ")?;
    write_prog(w, a)?;
    w.write_char(' ')?;
    write_prog(w, b)?;
    w.write_char(')')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_renames_binders() {
        // (λy. x y)[y/x] = λy1. y y1
        let m = lam(&name("y"), app(var("x"), var("y")));
        let r = subst(&m, "x", &var("y"));
        let want = lam(&name("z"), app(var("y"), var("z")));
        assert!(alpha_eq(&r, &want));
    }

    #[test]
    fn case_binders_are_renamed() {
        let m = case(var("s"), vec![clause(Pat::Left(name("a")), app(var("x"), var("a")))]);
        let r = subst(&m, "x", &var("a"));
        match &*r {
            Prog::Case(_, cls) => {
                let Pat::Left(b) = &cls[0].pat else { panic!() };
                assert_ne!(&**b, "a");
            }
            _ => panic!(),
        }
    }

    #[test]
    fn projections_print_as_sugar() {
        assert_eq!(show(&pl(var("p"))), "(pl p)");
        assert_eq!(show(&pr(var("p"))), "(pr p)");
        assert_eq!(show(&apps(var("f"), [var("a"), var("b")])), "(f a b)");
    }
}
