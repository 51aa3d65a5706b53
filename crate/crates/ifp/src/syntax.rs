//! Parsing of terms, formulas, predicates, types, derivations and programs
//! from s-expressions.

use std::collections::BTreeSet;
use std::rc::Rc;

use ifp_core::kernel::Derivation;
use ifp_core::logic::*;
use ifp_core::program::{self, Clause, Pat, Prog, P};
use ifp_core::types::Ty;

use crate::sexpr::{Kind, Sexp};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{loc}: {msg}")]
pub struct ParseError {
    pub loc: String,
    pub msg: String,
}

pub fn err(x: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError { loc: x.location(), msg: msg.into() }
}

pub type Result<T> = std::result::Result<T, ParseError>;

/// Positions of the nodes of a parsed derivation, shaped like
/// [`Derivation::children`].
#[derive(Clone, Debug)]
pub struct SpanTree {
    pub loc: String,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    /// Location of the node at a child-index path, or of the deepest node
    /// on it.
    pub fn locate(&self, path: &[usize]) -> &str {
        let mut cur = self;
        for &i in path {
            match cur.children.get(i) {
                Some(c) => cur = c,
                None => break,
            }
        }
        &cur.loc
    }
}

#[derive(Clone, Debug)]
enum Bound {
    Obj(Name),
    Pred(Vec<Name>),
}

/// Names in scope while parsing.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    entries: Vec<(Name, Bound)>,
    labels: Vec<Name>,
}

impl Scope {
    pub fn new() -> Scope {
        Scope::default()
    }

    fn lookup(&self, n: &str) -> Option<&Bound> {
        self.entries.iter().rev().find(|(m, _)| &**m == n).map(|(_, b)| b)
    }

    pub fn with_vars(&self, xs: &[Var]) -> Scope {
        let mut s = self.clone();
        s.entries.extend(xs.iter().map(|x| (x.name.clone(), Bound::Obj(x.sort.clone()))));
        s
    }

    pub fn with_pvar(&self, p: &PredSym) -> Scope {
        let mut s = self.clone();
        s.entries.push((p.name.clone(), Bound::Pred(p.arity.clone())));
        s
    }

    pub fn with_label(&self, u: &Name) -> Scope {
        let mut s = self.clone();
        s.labels.push(u.clone());
        s
    }
}

/// Parser over a signature and the names of checked theorems.
pub struct Parser<'a> {
    pub sig: &'a Signature,
    pub theorems: &'a BTreeSet<Name>,
}

fn items<'s>(x: &'s Sexp, what: &str) -> Result<&'s [Sexp]> {
    x.list().ok_or_else(|| err(x, format!("expected {what}")))
}

fn arity(x: &Sexp, xs: &[Sexp], n: usize) -> Result<()> {
    if xs.len() != n + 1 {
        return Err(err(x, format!("`{}` takes {n} arguments, got {}", xs[0], xs.len() - 1)));
    }
    Ok(())
}

fn atom_of<'s>(x: &'s Sexp, what: &str) -> Result<&'s str> {
    x.atom().ok_or_else(|| err(x, format!("expected {what}")))
}

impl Parser<'_> {
    fn default_sort(&self, x: &Sexp) -> Result<Name> {
        self.sig.default_sort().cloned().ok_or_else(|| err(x, "no sort declared"))
    }

    fn logic<T>(&self, x: &Sexp, r: std::result::Result<T, LogicError>) -> Result<T> {
        r.map_err(|e| err(x, e.to_string()))
    }

    /// `(x y (z s))`
    pub fn vars(&self, x: &Sexp) -> Result<Vec<Var>> {
        let mut out = Vec::new();
        for v in items(x, "a variable list")? {
            match &v.kind {
                Kind::Atom(a) => out.push(Var { name: name(a), sort: self.default_sort(v)? }),
                Kind::List(p) if p.len() == 2 => {
                    let n = atom_of(&p[0], "a variable")?;
                    let s = atom_of(&p[1], "a sort")?;
                    self.logic(&p[1], self.sig.require_sort(s))?;
                    out.push(Var::new(n, s));
                }
                _ => return Err(err(v, "expected a variable or `(variable sort)`")),
            }
        }
        Ok(out)
    }

    pub fn term(&self, sc: &Scope, x: &Sexp) -> Result<Term> {
        let t = self.term_raw(sc, x)?;
        self.logic(x, self.sig.sort_of(&t))?;
        Ok(t)
    }

    fn term_raw(&self, sc: &Scope, x: &Sexp) -> Result<Term> {
        match &x.kind {
            Kind::Atom(a) => match sc.lookup(a) {
                Some(Bound::Obj(s)) => Ok(Term::Var(Var { name: name(a), sort: s.clone() })),
                Some(Bound::Pred(_)) => Err(err(x, format!("`{a}` is a predicate variable, not a term"))),
                None if self.sig.funcs.contains_key(a.as_str()) => Ok(Term::constant(a)),
                None => Err(err(x, format!("unresolved symbol `{a}`"))),
            },
            Kind::List(xs) if !xs.is_empty() => {
                let f = atom_of(&xs[0], "a function symbol")?;
                if !self.sig.funcs.contains_key(f) {
                    return Err(err(&xs[0], format!("unresolved function symbol `{f}`")));
                }
                let args = xs[1..].iter().map(|a| self.term_raw(sc, a)).collect::<Result<Vec<_>>>()?;
                Ok(Term::app(f, args))
            }
            _ => Err(err(x, "expected a term")),
        }
    }

    pub fn formula(&self, sc: &Scope, x: &Sexp) -> Result<Formula> {
        let f = self.formula_raw(sc, x)?;
        self.logic(x, self.sig.check_formula(&f))?;
        Ok(f)
    }

    fn connective(&self, sc: &Scope, x: &Sexp, xs: &[Sexp], min: usize, mk: fn(Formula, Formula) -> Formula) -> Result<Formula> {
        if xs.len() < min + 1 {
            return Err(err(x, format!("`{}` needs at least {min} arguments", xs[0])));
        }
        let mut fs = xs[1..].iter().map(|a| self.formula_raw(sc, a)).collect::<Result<Vec<_>>>()?;
        let mut acc = fs.pop().expect("non-empty");
        while let Some(f) = fs.pop() {
            acc = mk(f, acc);
        }
        Ok(acc)
    }

    fn quantifier(&self, sc: &Scope, xs: &[Sexp], all: bool, bound: Option<&Sexp>, body: &Sexp) -> Result<Formula> {
        let vs = self.vars(&xs[1])?;
        let inner = sc.with_vars(&vs);
        let mut f = self.formula_raw(&inner, body)?;
        let p = match bound {
            Some(b) => Some(self.pred(sc, b)?),
            None => None,
        };
        for v in vs.iter().rev() {
            if let Some(p) = &p {
                let px = p.apply(&[v.term()]);
                f = if all { Formula::imp(px, f) } else { Formula::and(px, f) };
            }
            f = if all { Formula::all(v.clone(), f) } else { Formula::ex(v.clone(), f) };
        }
        Ok(f)
    }

    fn formula_raw(&self, sc: &Scope, x: &Sexp) -> Result<Formula> {
        match &x.kind {
            Kind::Atom(a) if a == "false" => Ok(Formula::falsum()),
            Kind::Atom(_) => {
                let p = self.pred(sc, x)?;
                if !p.arity().is_empty() {
                    return Err(err(x, "predicate applied to no arguments"));
                }
                Ok(p.apply(&[]))
            }
            Kind::List(xs) if !xs.is_empty() => {
                let head = xs[0].atom();
                let shadowed = head.is_some_and(|h| sc.lookup(h).is_some());
                match head.filter(|_| !shadowed) {
                    Some("=") | Some("neq") => {
                        arity(x, xs, 2)?;
                        let s = self.term_raw(sc, &xs[1])?;
                        let t = self.term_raw(sc, &xs[2])?;
                        Ok(if head == Some("=") { Formula::eq(s, t) } else { Formula::neq(s, t) })
                    }
                    Some("not") => {
                        arity(x, xs, 1)?;
                        Ok(Formula::not(self.formula_raw(sc, &xs[1])?))
                    }
                    Some("and") => self.connective(sc, x, xs, 1, Formula::and),
                    Some("or") => self.connective(sc, x, xs, 1, Formula::or),
                    Some("imp") => self.connective(sc, x, xs, 2, Formula::imp),
                    Some("iff") => {
                        arity(x, xs, 2)?;
                        let a = self.formula_raw(sc, &xs[1])?;
                        let b = self.formula_raw(sc, &xs[2])?;
                        Ok(Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a)))
                    }
                    Some(q @ ("all" | "ex")) => {
                        arity(x, xs, 2)?;
                        self.quantifier(sc, xs, q == "all", None, &xs[2])
                    }
                    Some(q @ ("all-in" | "ex-in")) => {
                        arity(x, xs, 3)?;
                        self.quantifier(sc, xs, q == "all-in", Some(&xs[2]), &xs[3])
                    }
                    Some("subset") => {
                        arity(x, xs, 2)?;
                        let p = self.pred(sc, &xs[1])?;
                        let q = self.pred(sc, &xs[2])?;
                        if p.arity() != q.arity() {
                            return Err(err(x, "`subset` of predicates with different arities"));
                        }
                        Ok(Pred::subset(&p, &q))
                    }
                    Some("pred") => {
                        if xs.len() < 2 {
                            return Err(err(x, "`pred` needs a predicate"));
                        }
                        self.application(sc, x, &xs[1], &xs[2..])
                    }
                    _ => self.application(sc, x, &xs[0], &xs[1..]),
                }
            }
            _ => Err(err(x, "expected a formula")),
        }
    }

    fn application(&self, sc: &Scope, x: &Sexp, p: &Sexp, args: &[Sexp]) -> Result<Formula> {
        let p = self.pred(sc, p)?;
        let ts = args.iter().map(|a| self.term_raw(sc, a)).collect::<Result<Vec<_>>>()?;
        if p.arity().len() != ts.len() {
            return Err(err(x, format!("predicate expects {} arguments, got {}", p.arity().len(), ts.len())));
        }
        Ok(p.apply(&ts))
    }

    pub fn pred(&self, sc: &Scope, x: &Sexp) -> Result<Pred> {
        match &x.kind {
            Kind::Atom(a) => match sc.lookup(a) {
                Some(Bound::Pred(ar)) => Ok(Pred::Var(PredSym { name: name(a), arity: ar.clone() })),
                Some(Bound::Obj(_)) => Err(err(x, format!("`{a}` is an object variable, not a predicate"))),
                None => {
                    if let Some(ar) = self.sig.preds.get(a.as_str()) {
                        Ok(Pred::Const(PredSym { name: name(a), arity: ar.clone() }))
                    } else if let Some(p) = self.sig.def(a) {
                        Ok(p.clone())
                    } else {
                        Err(err(x, format!("unresolved predicate `{a}`")))
                    }
                }
            },
            Kind::List(xs) if !xs.is_empty() => match xs[0].atom() {
                Some("lambda") => {
                    arity(x, xs, 2)?;
                    let vs = self.vars(&xs[1])?;
                    let body = self.formula_raw(&sc.with_vars(&vs), &xs[2])?;
                    Ok(Pred::Abst(vs, Rc::new(body)))
                }
                Some("mu") | Some("nu") => {
                    let op = self.operator_parts(sc, x, xs)?;
                    Ok(if xs[0].atom() == Some("mu") { Pred::Mu(Rc::new(op)) } else { Pred::Nu(Rc::new(op)) })
                }
                Some(k @ ("inter" | "union" | "arrow")) => {
                    arity(x, xs, 2)?;
                    let p = self.pred(sc, &xs[1])?;
                    let q = self.pred(sc, &xs[2])?;
                    if p.arity() != q.arity() {
                        return Err(err(x, format!("`{k}` of predicates with different arities")));
                    }
                    Ok(match k {
                        "inter" => Pred::inter(&p, &q),
                        "union" => Pred::union(&p, &q),
                        _ => Pred::arrow(&p, &q),
                    })
                }
                _ => Err(err(x, "expected a predicate")),
            },
            _ => Err(err(x, "expected a predicate")),
        }
    }

    /// `(mu X (x̄) A)`, `(nu …)` or `(op …)`, without the kind.
    fn operator_parts(&self, sc: &Scope, x: &Sexp, xs: &[Sexp]) -> Result<Operator> {
        arity(x, xs, 3)?;
        let xn = atom_of(&xs[1], "a predicate variable")?;
        let vs = self.vars(&xs[2])?;
        let ps = PredSym { name: name(xn), arity: vs.iter().map(|v| v.sort.clone()).collect() };
        let inner = sc.with_vars(&vs).with_pvar(&ps);
        let body = self.formula_raw(&inner, &xs[3])?;
        if !strictly_positive(&body, xn) {
            return Err(err(x, format!("`{xn}` does not occur strictly positively")));
        }
        Ok(Operator { var: ps, params: vs, body })
    }

    /// An operator: `(op X (x̄) A)`, a fixed point, or the name of a defined
    /// fixed point.
    pub fn operator(&self, sc: &Scope, x: &Sexp) -> Result<Rc<Operator>> {
        if let Some(xs) = x.list() {
            if xs.first().and_then(Sexp::atom) == Some("op") {
                return Ok(Rc::new(self.operator_parts(sc, x, xs)?));
            }
        }
        match self.pred(sc, x)? {
            Pred::Mu(op) | Pred::Nu(op) => Ok(op),
            _ => Err(err(x, "expected an operator")),
        }
    }

    pub fn derivation(&self, sc: &Scope, x: &Sexp) -> Result<(Derivation, SpanTree)> {
        use Derivation as D;
        let leaf = |d: Derivation| Ok((d, SpanTree { loc: x.location(), children: vec![] }));
        let node = |d: Derivation, children: Vec<SpanTree>| Ok((d, SpanTree { loc: x.location(), children }));
        let b = Box::new;
        match &x.kind {
            Kind::Atom(a) => {
                let n = name(a);
                if sc.labels.contains(&n) {
                    leaf(D::Assume(n))
                } else if self.sig.axioms.contains_key(a.as_str()) {
                    leaf(D::Axiom(n))
                } else if self.theorems.contains(a.as_str()) {
                    leaf(D::Lemma(n))
                } else {
                    Err(err(x, format!("unresolved assumption, axiom or theorem `{a}`")))
                }
            }
            Kind::List(xs) if !xs.is_empty() => {
                let tag = atom_of(&xs[0], "a rule name")?;
                let sub = |i: usize| self.derivation(sc, &xs[i]);
                match tag {
                    "assume" | "axiom" | "use" => {
                        arity(x, xs, 1)?;
                        let n = name(atom_of(&xs[1], "a name")?);
                        leaf(match tag {
                            "assume" => D::Assume(n),
                            "axiom" => D::Axiom(n),
                            _ => D::Lemma(n),
                        })
                    }
                    "refl" => {
                        arity(x, xs, 1)?;
                        leaf(D::Refl(self.term(sc, &xs[1])?))
                    }
                    "cong" => {
                        arity(x, xs, 4)?;
                        let (d, sd) = sub(1)?;
                        let (e, se) = sub(2)?;
                        let vs = self.vars(&xs[3])?;
                        let [v] = vs.as_slice() else {
                            return Err(err(&xs[3], "`cong` binds exactly one variable"));
                        };
                        let a = self.formula(&sc.with_vars(&vs), &xs[4])?;
                        node(D::Cong(b(d), b(e), v.clone(), a), vec![sd, se])
                    }
                    "andi" => {
                        arity(x, xs, 2)?;
                        let (d, sd) = sub(1)?;
                        let (e, se) = sub(2)?;
                        node(D::AndI(b(d), b(e)), vec![sd, se])
                    }
                    "andl" | "andr" => {
                        arity(x, xs, 1)?;
                        let (d, sd) = sub(1)?;
                        node(if tag == "andl" { D::AndL(b(d)) } else { D::AndR(b(d)) }, vec![sd])
                    }
                    "orl" | "orr" => {
                        arity(x, xs, 2)?;
                        let (d, sd) = sub(1)?;
                        let f = self.formula(sc, &xs[2])?;
                        node(if tag == "orl" { D::OrL(b(d), f) } else { D::OrR(b(d), f) }, vec![sd])
                    }
                    "ore" => {
                        arity(x, xs, 3)?;
                        let (d, sd) = sub(1)?;
                        let (e, se) = sub(2)?;
                        let (f, sf) = sub(3)?;
                        node(D::OrE(b(d), b(e), b(f)), vec![sd, se, sf])
                    }
                    "impi" => {
                        arity(x, xs, 3)?;
                        let u = name(atom_of(&xs[1], "an assumption label")?);
                        let a = self.formula(sc, &xs[2])?;
                        let (d, sd) = self.derivation(&sc.with_label(&u), &xs[3])?;
                        node(D::ImpI(u, a, b(d)), vec![sd])
                    }
                    "impe" => {
                        if xs.len() < 3 {
                            return Err(err(x, "`impe` needs a derivation and at least one argument"));
                        }
                        let (mut d, mut sd) = sub(1)?;
                        for i in 2..xs.len() {
                            let (e, se) = sub(i)?;
                            d = D::ImpE(b(d), b(e));
                            sd = SpanTree { loc: x.location(), children: vec![sd, se] };
                        }
                        Ok((d, sd))
                    }
                    "alli" => {
                        arity(x, xs, 2)?;
                        let vs = self.vars(&xs[1])?;
                        let (mut d, mut sd) = self.derivation(&sc.with_vars(&vs), &xs[2])?;
                        for v in vs.iter().rev() {
                            d = D::AllI(v.clone(), b(d));
                            sd = SpanTree { loc: x.location(), children: vec![sd] };
                        }
                        Ok((d, sd))
                    }
                    "alle" => {
                        if xs.len() < 3 {
                            return Err(err(x, "`alle` needs a derivation and at least one term"));
                        }
                        let (mut d, mut sd) = sub(1)?;
                        for t in &xs[2..] {
                            d = D::AllE(b(d), self.term(sc, t)?);
                            sd = SpanTree { loc: x.location(), children: vec![sd] };
                        }
                        Ok((d, sd))
                    }
                    "exi" => {
                        arity(x, xs, 4)?;
                        let vs = self.vars(&xs[1])?;
                        let [v] = vs.as_slice() else {
                            return Err(err(&xs[1], "`exi` binds exactly one variable"));
                        };
                        let a = self.formula(&sc.with_vars(&vs), &xs[2])?;
                        let t = self.term(sc, &xs[3])?;
                        let (d, sd) = sub(4)?;
                        node(D::ExI(v.clone(), a, t, b(d)), vec![sd])
                    }
                    "exe" => {
                        arity(x, xs, 2)?;
                        let (d, sd) = sub(1)?;
                        let (e, se) = sub(2)?;
                        node(D::ExE(b(d), b(e)), vec![sd, se])
                    }
                    "clos" | "cocl" => {
                        arity(x, xs, 1)?;
                        let op = self.operator(sc, &xs[1])?;
                        leaf(if tag == "clos" { D::Clos(op) } else { D::Cocl(op) })
                    }
                    "ind" | "coind" | "si" | "hsi" | "sci" | "hsci" => {
                        arity(x, xs, 3)?;
                        let op = self.operator(sc, &xs[1])?;
                        let p = self.pred(sc, &xs[2])?;
                        let (d, sd) = sub(3)?;
                        let d = b(d);
                        let r = match tag {
                            "ind" => D::Ind(op, p, d),
                            "coind" => D::Coind(op, p, d),
                            "si" => D::Si(op, p, d),
                            "hsi" => D::Hsi(op, p, d),
                            "sci" => D::Sci(op, p, d),
                            _ => D::Hsci(op, p, d),
                        };
                        node(r, vec![sd])
                    }
                    "wfi" => {
                        arity(x, xs, 4)?;
                        let prec = self.pred(sc, &xs[1])?;
                        let a = self.pred(sc, &xs[2])?;
                        let p = self.pred(sc, &xs[3])?;
                        let (d, sd) = sub(4)?;
                        node(D::WfI(prec, a, p, b(d)), vec![sd])
                    }
                    "aiq" => {
                        arity(x, xs, 3)?;
                        let q = self.term(sc, &xs[1])?;
                        let p = self.pred(sc, &xs[2])?;
                        let (d, sd) = sub(3)?;
                        node(D::AIq(q, p, b(d)), vec![sd])
                    }
                    "aibq" => {
                        arity(x, xs, 4)?;
                        let q = self.term(sc, &xs[1])?;
                        let bp = self.pred(sc, &xs[2])?;
                        let p = self.pred(sc, &xs[3])?;
                        let (d, sd) = sub(4)?;
                        node(D::AIBq(q, bp, p, b(d)), vec![sd])
                    }
                    _ => Err(err(&xs[0], format!("unknown rule `{tag}`"))),
                }
            }
            _ => Err(err(x, "expected a derivation")),
        }
    }
}

pub fn ty(x: &Sexp) -> Result<Ty> {
    match &x.kind {
        Kind::Atom(a) => Ok(match a.as_str() {
            "1" => Ty::One,
            "2" => Ty::two(),
            "3" => Ty::three(),
            _ => Ty::var(a),
        }),
        Kind::List(xs) if !xs.is_empty() => {
            let kw = atom_of(&xs[0], "a type constructor")?;
            match kw {
                "+" | "*" => {
                    arity(x, xs, 2)?;
                    let a = ty(&xs[1])?;
                    let b = ty(&xs[2])?;
                    Ok(if kw == "+" { Ty::sum(a, b) } else { Ty::prod(a, b) })
                }
                "->" => {
                    if xs.len() < 3 {
                        return Err(err(x, "`->` needs at least two types"));
                    }
                    let mut ts = xs[1..].iter().map(ty).collect::<Result<Vec<_>>>()?;
                    let mut acc = ts.pop().expect("non-empty");
                    while let Some(t) = ts.pop() {
                        acc = Ty::arrow(t, acc);
                    }
                    Ok(acc)
                }
                "fix" => {
                    arity(x, xs, 2)?;
                    Ok(Ty::fix(atom_of(&xs[1], "a type variable")?, ty(&xs[2])?))
                }
                "stream" => {
                    arity(x, xs, 1)?;
                    let r = ty(&xs[1])?;
                    let a = ifp_core::logic::fresh_name("a", &r.free_vars());
                    Ok(Ty::fix(&a, Ty::prod(r, Ty::var(&a))))
                }
                _ => Err(err(&xs[0], format!("unknown type constructor `{kw}`"))),
            }
        }
        _ => Err(err(x, "expected a type")),
    }
}

/// A constructor pattern with nesting, wildcards and digit aliases.
#[derive(Clone, Debug)]
enum NPat {
    Any(Option<Name>),
    Nil,
    Left(Box<NPat>),
    Right(Box<NPat>),
    Pair(Box<NPat>, Box<NPat>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Con {
    Nil,
    Left,
    Right,
    Pair,
}

impl NPat {
    fn con(&self) -> Option<Con> {
        match self {
            NPat::Any(_) => None,
            NPat::Nil => Some(Con::Nil),
            NPat::Left(_) => Some(Con::Left),
            NPat::Right(_) => Some(Con::Right),
            NPat::Pair(..) => Some(Con::Pair),
        }
    }

    fn binders(&self, out: &mut Vec<Name>) {
        match self {
            NPat::Any(Some(x)) => out.push(x.clone()),
            NPat::Any(None) | NPat::Nil => {}
            NPat::Left(p) | NPat::Right(p) => p.binders(out),
            NPat::Pair(p, q) => {
                p.binders(out);
                q.binders(out);
            }
        }
    }
}

fn any() -> Box<NPat> {
    Box::new(NPat::Any(None))
}

fn pattern(x: &Sexp) -> Result<NPat> {
    match &x.kind {
        Kind::Atom(a) => Ok(match a.as_str() {
            "_" => NPat::Any(None),
            "Nil" => NPat::Nil,
            "L" => NPat::Left(any()),
            "R" | "0" => NPat::Right(any()),
            "-1" => NPat::Left(Box::new(NPat::Left(any()))),
            "1" => NPat::Left(Box::new(NPat::Right(any()))),
            _ => NPat::Any(Some(name(a))),
        }),
        Kind::List(xs) if !xs.is_empty() => match xs[0].atom() {
            Some("Left") | Some("Right") => {
                arity(x, xs, 1)?;
                let p = Box::new(pattern(&xs[1])?);
                Ok(if xs[0].atom() == Some("Left") { NPat::Left(p) } else { NPat::Right(p) })
            }
            Some("Pair") => {
                arity(x, xs, 2)?;
                Ok(NPat::Pair(Box::new(pattern(&xs[1])?), Box::new(pattern(&xs[2])?)))
            }
            Some(":") if xs.len() >= 3 => {
                let mut acc = pattern(&xs[xs.len() - 1])?;
                for p in xs[1..xs.len() - 1].iter().rev() {
                    acc = NPat::Pair(Box::new(pattern(p)?), Box::new(acc));
                }
                Ok(acc)
            }
            _ => Err(err(x, "expected a pattern")),
        },
        _ => Err(err(x, "expected a pattern")),
    }
}

struct Row {
    pats: Vec<NPat>,
    body: P,
}

/// Compiles a match on several scrutinee variables into nested flat cases.
/// Rows are tried in order; uncovered constructors get no clause.
fn compile(cols: &[P], rows: Vec<Row>, avoid: &mut BTreeSet<Name>) -> P {
    let Some(first) = rows.first() else {
        return program::bot();
    };
    if cols.is_empty() {
        return first.body.clone();
    }
    let col = &cols[0];
    let bind = |p: &NPat, body: &P| -> P {
        match p {
            NPat::Any(Some(x)) => program::subst(body, x, col),
            _ => body.clone(),
        }
    };
    if rows.iter().all(|r| r.pats[0].con().is_none()) {
        let rows = rows
            .into_iter()
            .map(|r| {
                let body = bind(&r.pats[0], &r.body);
                Row { pats: r.pats[1..].to_vec(), body }
            })
            .collect();
        return compile(&cols[1..], rows, avoid);
    }
    let mut cons: Vec<Con> = Vec::new();
    for r in &rows {
        if let Some(c) = r.pats[0].con() {
            if !cons.contains(&c) {
                cons.push(c);
            }
        }
    }
    if rows.iter().any(|r| r.pats[0].con().is_none()) {
        for (a, b) in [(Con::Left, Con::Right), (Con::Right, Con::Left)] {
            if cons.contains(&a) && !cons.contains(&b) {
                cons.push(b);
            }
        }
    }
    let mut clauses = Vec::new();
    for c in cons {
        let width = match c {
            Con::Nil => 0,
            Con::Left | Con::Right => 1,
            Con::Pair => 2,
        };
        // Field names: the first variable pattern in that position, if any.
        let mut fields = Vec::new();
        for i in 0..width {
            let hint = rows.iter().find_map(|r| match (&r.pats[0], i) {
                (NPat::Left(p) | NPat::Right(p), 0) | (NPat::Pair(p, _), 0) | (NPat::Pair(_, p), 1) => match &**p {
                    NPat::Any(Some(x)) => Some(x.clone()),
                    _ => None,
                },
                _ => None,
            });
            let base = hint.unwrap_or_else(|| name(if i == 0 { "a" } else { "b" }));
            let f = fresh_name(&base, avoid);
            avoid.insert(f.clone());
            fields.push(f);
        }
        let mut sub_rows = Vec::new();
        for r in &rows {
            let subs: Option<Vec<NPat>> = match (&r.pats[0], c) {
                (NPat::Any(_), _) => Some(vec![NPat::Any(None); width]),
                (NPat::Nil, Con::Nil) => Some(vec![]),
                (NPat::Left(p), Con::Left) | (NPat::Right(p), Con::Right) => Some(vec![(**p).clone()]),
                (NPat::Pair(p, q), Con::Pair) => Some(vec![(**p).clone(), (**q).clone()]),
                _ => None,
            };
            if let Some(mut subs) = subs {
                let body = bind(&r.pats[0], &r.body);
                subs.extend(r.pats[1..].iter().cloned());
                sub_rows.push(Row { pats: subs, body });
            }
        }
        let mut sub_cols: Vec<P> = fields.iter().map(|f| Rc::new(Prog::Var(f.clone()))).collect();
        sub_cols.extend(cols[1..].iter().cloned());
        let body = compile(&sub_cols, sub_rows, avoid);
        let pat = match c {
            Con::Nil => Pat::Nil,
            Con::Left => Pat::Left(fields[0].clone()),
            Con::Right => Pat::Right(fields[0].clone()),
            Con::Pair => Pat::Pair(fields[0].clone(), fields[1].clone()),
        };
        clauses.push(Clause { pat, body });
    }
    program::case(col.clone(), clauses)
}

fn digit(d: &str) -> Option<P> {
    use program::{left, nil, right};
    Some(match d {
        "L" => left(nil()),
        "R" | "0" => right(nil()),
        "-1" => left(left(nil())),
        "1" => left(right(nil())),
        _ => return None,
    })
}

fn unary(x: &Sexp, xs: &[Sexp], f: fn(P) -> P) -> Result<P> {
    arity(x, xs, 1)?;
    Ok(f(prog(&xs[1])?))
}

fn binary(x: &Sexp, xs: &[Sexp], f: fn(P, P) -> P) -> Result<P> {
    arity(x, xs, 2)?;
    Ok(f(prog(&xs[1])?, prog(&xs[2])?))
}

/// A program. Free variables are left for the caller to resolve.
pub fn prog(x: &Sexp) -> Result<P> {
    use program::*;
    match &x.kind {
        Kind::Atom(a) => Ok(match a.as_str() {
            "Nil" => nil(),
            "bot" => bot(),
            "id" => id(&BTreeSet::new()),
            _ => match digit(a) {
                Some(d) => d,
                None => var(a),
            },
        }),
        Kind::List(xs) if !xs.is_empty() => {
            let kw = xs[0].atom().unwrap_or("");
            match kw {
                "Left" => unary(x, xs, left),
                "Right" => unary(x, xs, right),
                "rec" => unary(x, xs, rec),
                "pl" | "head" => unary(x, xs, pl),
                "pr" | "tail" => unary(x, xs, pr),
                "Pair" => binary(x, xs, pair),
                "comp" => binary(x, xs, comp),
                "sum" => binary(x, xs, cosum),
                "pairing" => binary(x, xs, fanout),
                ":" => {
                    if xs.len() < 3 {
                        return Err(err(x, "`:` needs at least two arguments"));
                    }
                    let mut acc = prog(&xs[xs.len() - 1])?;
                    for m in xs[1..xs.len() - 1].iter().rev() {
                        acc = pair(prog(m)?, acc);
                    }
                    Ok(acc)
                }
                "lam" => {
                    arity(x, xs, 2)?;
                    let ps = items(&xs[1], "a parameter list")?;
                    let mut body = prog(&xs[2])?;
                    for p in ps.iter().rev() {
                        body = lam(&name(atom_of(p, "a parameter")?), body);
                    }
                    Ok(body)
                }
                "let" => {
                    // (let (x M) N) is (λx.N) M
                    arity(x, xs, 2)?;
                    let bnd = items(&xs[1], "a binding `(x M)`")?;
                    if bnd.len() != 2 {
                        return Err(err(&xs[1], "expected a binding `(x M)`"));
                    }
                    let v = name(atom_of(&bnd[0], "a variable")?);
                    Ok(app(lam(&v, prog(&xs[2])?), prog(&bnd[1])?))
                }
                "roll" | "unroll" => {
                    arity(x, xs, 1)?;
                    let t = ty(&xs[1])?;
                    if !matches!(t, Ty::Fix(..)) {
                        return Err(err(&xs[1], "expected a fixed-point type"));
                    }
                    Ok(Rc::new(if kw == "roll" { Prog::Roll(t) } else { Prog::Unroll(t) }))
                }
                "case" => {
                    if xs.len() < 3 {
                        return Err(err(x, "`case` needs a scrutinee and clauses"));
                    }
                    let s = prog(&xs[1])?;
                    let mut rows = Vec::new();
                    let mut avoid = free_vars(&s);
                    for c in &xs[2..] {
                        let cl = items(c, "a clause `(pattern body)`")?;
                        if cl.len() != 2 {
                            return Err(err(c, "expected a clause `(pattern body)`"));
                        }
                        let p = pattern(&cl[0])?;
                        let body = prog(&cl[1])?;
                        let mut bs = Vec::new();
                        p.binders(&mut bs);
                        let mut fv = free_vars(&body);
                        for b in &bs {
                            fv.remove(b);
                        }
                        avoid.extend(fv);
                        rows.push(Row { pats: vec![p], body });
                    }
                    // A variable scrutinee can be matched on directly; other
                    // scrutinees are matched flat at the top.
                    Ok(compile(&[s], rows, &mut avoid))
                }
                _ => {
                    let f = prog(&xs[0])?;
                    if xs.len() == 1 {
                        return Ok(f);
                    }
                    let args = xs[1..].iter().map(prog).collect::<Result<Vec<_>>>()?;
                    Ok(apps(f, args))
                }
            }
        }
        _ => Err(err(x, "expected a program")),
    }
}

/// A program given as a sequence of expressions, read as an application.
pub fn prog_seq(xs: &[Sexp]) -> Result<P> {
    let mut it = xs.iter();
    let Some(f) = it.next() else {
        return Err(ParseError { loc: "<input>".into(), msg: "empty program".into() });
    };
    let f = prog(f)?;
    let args = it.map(prog).collect::<Result<Vec<_>>>()?;
    Ok(program::apps(f, args))
}
