//! Program extraction from checked derivations.
//!
//! Monotonicity witnesses are computed directly from the shape of the
//! realizer type of an operator body (`gen_mon`) or, for the variant with a
//! Harrop constant in place of the predicate variable, from the body
//! formula itself (`hat_mon`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{Checked, Context, Derivation, KernelError, Theory};
use crate::logic::*;
use crate::program::{self, *};
use crate::types::{tau, tau_pred, Ty};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("at derivation path {path:?}: extraction for {rule} is not supported here: {reason}")]
    Unsupported { path: Vec<usize>, rule: &'static str, reason: String },
    #[error("theorem `{0}` has no extracted program")]
    MissingLemma(String),
}

/// Everything extraction produces for one theorem.
#[derive(Clone, Debug)]
pub struct ExtractionResult {
    pub formula: Formula,
    /// Closed program: referenced theorems are substituted in.
    pub program: P,
    /// The program with referenced theorems left as free variables.
    pub local: P,
    pub ty: Ty,
    /// Roll-annotated form of `local`.
    pub typed: P,
    /// Theorems referenced by `local`, in order of first occurrence.
    pub deps: Vec<Name>,
    /// For nodes of `local` (as child-index paths), the derivation node
    /// (as child-index path) that produced them.
    pub provenance: Vec<(Vec<usize>, Vec<usize>)>,
}

fn v(x: &Name) -> P {
    Rc::new(Prog::Var(x.clone()))
}

struct Names(BTreeSet<Name>);

impl Names {
    fn of(ps: &[&P]) -> Names {
        let mut s = BTreeSet::new();
        for p in ps {
            s.extend(program::free_vars(p));
        }
        Names(s)
    }

    fn fresh(&mut self, base: &str) -> Name {
        let n = fresh_name(base, &self.0);
        self.0.insert(n.clone());
        n
    }
}

/// Closed-type instantiations of the mapped type variables, used to place
/// `roll`/`unroll` around nested fixed points.
#[derive(Clone)]
struct Inst {
    input: Vec<(Name, Ty)>,
    output: Vec<(Name, Ty)>,
}

fn inst(t: &Ty, env: &[(Name, Ty)]) -> Ty {
    env.iter().rev().fold(t.clone(), |acc, (a, s)| acc.subst(a, s))
}

/// Functorial action of `ρ` on `v`: every occurrence of a mapped variable
/// is transformed by the associated program.
fn map_ty(ty: &Ty, map: &[(Name, P)], val: P, ins: Option<&Inst>, names: &mut Names) -> P {
    let fv = ty.free_vars();
    if !map.iter().any(|(a, _)| fv.contains(a)) {
        return val;
    }
    match ty {
        Ty::Var(a) => {
            let (_, f) = map.iter().rev().find(|(b, _)| b == a).unwrap();
            app(f.clone(), val)
        }
        Ty::One => val,
        Ty::Sum(l, r) => {
            let a = names.fresh("a");
            let b = names.fresh("b");
            let ml = map_ty(l, map, v(&a), ins, names);
            let mr = map_ty(r, map, v(&b), ins, names);
            case(val, vec![clause(Pat::Left(a), left(ml)), clause(Pat::Right(b), right(mr))])
        }
        Ty::Prod(l, r) => {
            let ml = map_ty(l, map, pl(val.clone()), ins, names);
            let mr = map_ty(r, map, pr(val), ins, names);
            pair(ml, mr)
        }
        Ty::Arrow(_, r) => {
            let b = names.fresh("b");
            let body = map_ty(r, map, app(val, v(&b)), ins, names);
            lam(&b, body)
        }
        Ty::Fix(beta, body) => {
            let g = names.fresh("g");
            let w = names.fresh("w");
            let mut inner: Vec<(Name, P)> = map.iter().filter(|(a, _)| a != beta).cloned().collect();
            inner.push((beta.clone(), v(&g)));
            let (arg, inner_ins) = match ins {
                Some(i) => {
                    let fin = inst(ty, &i.input);
                    let fout = inst(ty, &i.output);
                    let mut i2 = i.clone();
                    i2.input.retain(|(a, _)| a != beta);
                    i2.output.retain(|(a, _)| a != beta);
                    i2.input.push((beta.clone(), fin.clone()));
                    i2.output.push((beta.clone(), fout));
                    (app(Rc::new(Prog::Unroll(fin)), v(&w)), Some(i2))
                }
                None => (v(&w), None),
            };
            let mut m = map_ty(body, &inner, arg, inner_ins.as_ref(), names);
            if let Some(i) = ins {
                m = app(Rc::new(Prog::Roll(inst(ty, &i.output))), m);
            }
            app(rec(lam(&g, lam(&w, m))), val)
        }
    }
}

/// The realizer `λf.λx.M` of `X ⊆ Y → Φ(X) ⊆ Φ(Y)`.
pub fn gen_mon(op: &Operator) -> Result<P, ExtractError> {
    mon_program(op, None)
}

fn mon_program(op: &Operator, ins: Option<&Inst>) -> Result<P, ExtractError> {
    let body_ty = tau(&op.body);
    let alpha = op.var.name.clone();
    if !strictly_positive(&op.body, &alpha) || !body_ty.strictly_positive(&alpha) {
        return Err(ExtractError::Unsupported {
            path: vec![],
            rule: "mon",
            reason: "operator is not strictly positive".into(),
        });
    }
    let mut names = Names(BTreeSet::new());
    let f = names.fresh("f");
    let x = names.fresh("x");
    let body = map_ty(&body_ty, &[(alpha, v(&f))], v(&x), ins, &mut names);
    Ok(lam(&f, lam(&x, body)))
}

/// The realizer of `X̂ ⊆ Y → Φ(X̂) ⊆ Φ(Y)` with `X̂` a Harrop constant and
/// `Y` non-Harrop. It is `λf.M` where `M` is a function of the realizer of
/// `Φ(X̂)` unless that formula is Harrop.
pub fn hat_mon(op: &Operator) -> Result<P, ExtractError> {
    let x = op.var.name.clone();
    let mut names = Names(BTreeSet::new());
    let f = names.fresh("f");
    let fv = v(&f);
    let body = if is_harrop(&op.body, &[x.clone()]) {
        hm(&op.body, &x, &fv, None, &mut names)?
    } else {
        let a = names.fresh("x");
        lam(&a, hm(&op.body, &x, &fv, Some(v(&a)), &mut names)?)
    };
    Ok(lam(&f, body))
}

fn hm(b: &Formula, x: &Name, f: &P, val: Option<P>, names: &mut Names) -> Result<P, ExtractError> {
    let hx = |a: &Formula| is_harrop(a, core::slice::from_ref(x));
    if !b.has_free_pvar(x) {
        return Ok(if is_harrop(b, &[]) { nil() } else { val.expect("input realizer") });
    }
    if is_harrop(b, &[]) {
        return Ok(nil());
    }
    match b {
        Formula::App(Pred::Var(s), _) if &s.name == x => Ok(f.clone()),
        Formula::App(p @ Pred::Abst(..), ts) => hm(&p.apply(ts), x, f, val, names),
        Formula::App(..) => Err(ExtractError::Unsupported {
            path: vec![],
            rule: "mon",
            reason: "a fixed point containing the operator variable".into(),
        }),
        Formula::And(a1, a2) => {
            let (v1, v2) = match (hx(a1), hx(a2)) {
                (true, true) => (None, None),
                (false, true) => (val, None),
                (true, false) => (None, val),
                (false, false) => {
                    let w = val.expect("input realizer");
                    (Some(pl(w.clone())), Some(pr(w)))
                }
            };
            let o1 = hm(a1, x, f, v1, names)?;
            let o2 = hm(a2, x, f, v2, names)?;
            Ok(match (is_harrop(a1, &[]), is_harrop(a2, &[])) {
                (true, _) => o2,
                (_, true) => o1,
                _ => pair(o1, o2),
            })
        }
        Formula::Or(a1, a2) => {
            let a = names.fresh("a");
            let c = names.fresh("b");
            let o1 = hm(a1, x, f, if hx(a1) { None } else { Some(v(&a)) }, names)?;
            let o2 = hm(a2, x, f, if hx(a2) { None } else { Some(v(&c)) }, names)?;
            Ok(case(
                val.expect("input realizer"),
                vec![clause(Pat::Left(a), left(o1)), clause(Pat::Right(c), right(o2))],
            ))
        }
        Formula::Imp(a, c) => {
            if is_harrop(a, &[]) {
                hm(c, x, f, val, names)
            } else {
                let bn = names.fresh("b");
                let inner = if hx(c) { None } else { Some(app(val.expect("input realizer"), v(&bn))) };
                Ok(lam(&bn, hm(c, x, f, inner, names)?))
            }
        }
        Formula::All(_, c) | Formula::Ex(_, c) => hm(c, x, f, val, names),
        Formula::Eq(..) => Ok(nil()),
    }
}

struct Ex {
    typed: bool,
    prov: BTreeMap<usize, (P, Vec<usize>)>,
    path: Vec<usize>,
}

fn h(f: &Formula) -> bool {
    is_harrop(f, &[])
}

impl Ex {
    fn unsupported(&self, rule: &'static str, reason: impl Into<String>) -> ExtractError {
        ExtractError::Unsupported { path: self.path.clone(), rule, reason: reason.into() }
    }

    fn record(&mut self, m: P) -> P {
        let key = Rc::as_ptr(&m) as usize;
        self.prov.entry(key).or_insert_with(|| (m.clone(), self.path.clone()));
        m
    }

    fn child(&mut self, i: usize, c: &Checked) -> Result<P, ExtractError> {
        self.path.push(i);
        let r = self.go(c);
        self.path.pop();
        r
    }

    fn go(&mut self, c: &Checked) -> Result<P, ExtractError> {
        let m = self.node(c)?;
        Ok(self.record(m))
    }

    fn mon(&self, op: &Operator, input: Ty, output: Ty) -> Result<P, ExtractError> {
        let r = if self.typed {
            let alpha = op.var.name.clone();
            let ins = Inst { input: vec![(alpha.clone(), input)], output: vec![(alpha, output)] };
            mon_program(op, Some(&ins))
        } else {
            mon_program(op, None)
        };
        r.map_err(|e| match e {
            ExtractError::Unsupported { rule, reason, .. } => self.unsupported(rule, reason),
            e => e,
        })
    }

    fn hat_mon(&self, op: &Operator) -> Result<P, ExtractError> {
        hat_mon(op).map_err(|e| match e {
            ExtractError::Unsupported { rule, reason, .. } => self.unsupported(rule, reason),
            e => e,
        })
    }

    fn node(&mut self, c: &Checked) -> Result<P, ExtractError> {
        use Derivation::*;
        if h(&c.formula) {
            return Ok(nil());
        }
        let ch = &c.children;
        let f = |i: usize| &ch[i].formula;
        Ok(match c.deriv {
            Assume(u) => v(u),
            Lemma(n) => v(n),
            Axiom(_) | Refl(_) => unreachable!("axioms and equations are Harrop"),
            Cong(..) => self.child(0, &ch[0])?,
            OrL(..) => left(self.child(0, &ch[0])?),
            OrR(..) => right(self.child(0, &ch[0])?),
            OrE(..) => {
                let (Formula::Or(a, b), _) = (f(0), ()) else { unreachable!() };
                let d = self.child(0, &ch[0])?;
                let e = self.child(1, &ch[1])?;
                let g = self.child(2, &ch[2])?;
                let mut names = Names::of(&[&e, &g]);
                let x = names.fresh("a");
                let y = names.fresh("b");
                let l = if h(a) { e } else { app(e, v(&x)) };
                let r = if h(b) { g } else { app(g, v(&y)) };
                case(d, vec![clause(Pat::Left(x), l), clause(Pat::Right(y), r)])
            }
            AndI(..) => {
                if h(f(1)) {
                    self.child(0, &ch[0])?
                } else if h(f(0)) {
                    self.child(1, &ch[1])?
                } else {
                    let d = self.child(0, &ch[0])?;
                    let e = self.child(1, &ch[1])?;
                    pair(d, e)
                }
            }
            AndL(_) | AndR(_) => {
                let Formula::And(a, b) = f(0) else { unreachable!() };
                let left_side = matches!(c.deriv, AndL(_));
                let other = if left_side { b } else { a };
                let d = self.child(0, &ch[0])?;
                if h(other) {
                    d
                } else if left_side {
                    pl(d)
                } else {
                    pr(d)
                }
            }
            ImpI(u, a, _) => {
                let d = self.child(0, &ch[0])?;
                if h(a) {
                    d
                } else {
                    lam(u, d)
                }
            }
            ImpE(..) => {
                let d = self.child(0, &ch[0])?;
                if h(f(1)) {
                    d
                } else {
                    let e = self.child(1, &ch[1])?;
                    app(d, e)
                }
            }
            AllI(..) | AllE(..) | ExI(..) => self.child(0, &ch[0])?,
            ExE(..) => {
                let e = self.child(1, &ch[1])?;
                if h(f(0)) {
                    e
                } else {
                    let d = self.child(0, &ch[0])?;
                    app(e, d)
                }
            }
            Clos(op) | Cocl(op) => {
                if self.typed {
                    let ty = tau_pred(&Pred::Mu(op.clone()));
                    Rc::new(if matches!(c.deriv, Clos(_)) { Prog::Roll(ty) } else { Prog::Unroll(ty) })
                } else {
                    program::id(&BTreeSet::new())
                }
            }
            Ind(op, p, _) => {
                let d = self.child(0, &ch[0])?;
                let fix = tau_pred(&Pred::Mu(op.clone()));
                if !is_harrop_op(op) {
                    let mon = self.mon(op, fix.clone(), tau_pred(p))?;
                    let mut names = Names::of(&[&d]);
                    let a = names.fresh("a");
                    let mut body = comp(d, app(mon, v(&a)));
                    if self.typed {
                        body = comp(body, Rc::new(Prog::Unroll(fix)));
                    }
                    rec(lam(&a, body))
                } else {
                    self.harrop_ind(op, p, d)?
                }
            }
            Hsi(op, p, _) => {
                if !is_harrop_op(op) || op.is_constant() {
                    return Err(self.unsupported("hsi", "only a Harrop, non-constant operator is supported"));
                }
                let d = self.child(0, &ch[0])?;
                self.harrop_ind(op, p, d)?
            }
            Si(..) => return Err(self.unsupported("si", "strong induction has no supported realizer")),
            Coind(op, p, _) => {
                let d = self.child(0, &ch[0])?;
                let fix = tau_pred(&Pred::Nu(op.clone()));
                let mut names = Names::of(&[&d]);
                let a = names.fresh("a");
                if !is_harrop_pred(p, &[]) {
                    let mon = self.mon(op, tau_pred(p), fix.clone())?;
                    let mut m = app(mon, v(&a));
                    if self.typed {
                        m = comp(Rc::new(Prog::Roll(fix)), m);
                    }
                    rec(lam(&a, comp(m, d)))
                } else {
                    let hm = app(self.hat_mon(op)?, v(&a));
                    let mut m = if is_harrop(&op.body, core::slice::from_ref(&op.var.name)) {
                        hm
                    } else {
                        app(hm, d)
                    };
                    if self.typed {
                        m = app(Rc::new(Prog::Roll(fix)), m);
                    }
                    rec(lam(&a, m))
                }
            }
            Hsci(op, p, _) | Sci(op, p, _) => {
                let rule = c.deriv.rule_name();
                if is_harrop_pred(p, &[]) || is_harrop_op(op) {
                    return Err(self.unsupported(rule, "only a non-Harrop operator and predicate are supported"));
                }
                let d = self.child(0, &ch[0])?;
                let fix = tau_pred(&Pred::Nu(op.clone()));
                let mut names = Names::of(&[&d]);
                let a = names.fresh("a");
                let idp = program::id(&BTreeSet::new());
                let roll = |m: P| -> P {
                    if self.typed {
                        comp(Rc::new(Prog::Roll(fix.clone())), m)
                    } else {
                        m
                    }
                };
                let step = if matches!(c.deriv, Hsci(..)) {
                    let mon = self.mon(op, tau_pred(p), fix.clone())?;
                    cosum(roll(app(mon, v(&a))), idp)
                } else {
                    let mon = self.mon(op, Ty::sum(tau_pred(p), fix.clone()), fix.clone())?;
                    roll(app(mon, cosum(v(&a), idp)))
                };
                rec(lam(&a, comp(step, d)))
            }
            WfI(prec, a, _, _) => {
                let s = self.child(0, &ch[0])?;
                let mut names = Names::of(&[&s]);
                match (is_harrop_pred(prec, &[]), is_harrop_pred(a, &[])) {
                    (false, false) => {
                        let (fz, x, x2, b) = (names.fresh("f"), names.fresh("a"), names.fresh("a"), names.fresh("b"));
                        let k = lam(&x2, lam(&b, app(v(&fz), v(&x2))));
                        rec(lam(&fz, lam(&x, apps(s, [v(&x), k]))))
                    }
                    (true, false) => {
                        let (fz, x) = (names.fresh("f"), names.fresh("a"));
                        rec(lam(&fz, lam(&x, apps(s, [v(&x), v(&fz)]))))
                    }
                    (false, true) => {
                        let (cz, b) = (names.fresh("c"), names.fresh("b"));
                        rec(lam(&cz, app(s, lam(&b, v(&cz)))))
                    }
                    (true, true) => rec(s),
                }
            }
            AIq(..) => rec(self.child(0, &ch[0])?),
            AIBq(_, b, _, _) => {
                let s = self.child(0, &ch[0])?;
                let mut names = Names::of(&[&s]);
                let a = names.fresh("a");
                let cn = names.fresh("c");
                let dn = names.fresh("d");
                if is_harrop_pred(b, &[]) {
                    let body = case(
                        s,
                        vec![clause(Pat::Left(cn.clone()), v(&cn)), clause(Pat::Right(dn.clone()), app(v(&dn), v(&a)))],
                    );
                    rec(lam(&a, body))
                } else {
                    let bn = names.fresh("b");
                    let b2 = names.fresh("b");
                    let w = names.fresh("w");
                    let inner =
                        case(v(&w), vec![clause(Pat::Pair(b2.clone(), dn.clone()), app(v(&dn), app(v(&a), v(&b2))))]);
                    let body = case(
                        app(s, v(&bn)),
                        vec![clause(Pat::Left(cn.clone()), v(&cn)), clause(Pat::Right(w), inner)],
                    );
                    rec(lam(&a, lam(&bn, body)))
                }
            }
        })
    }

    /// `rec(λa. d (m a))` with `m` the Harrop monotonicity witness, or
    /// `rec(λa. d)` when the premise has a Harrop antecedent.
    fn harrop_ind(&mut self, op: &Operator, p: &Pred, d: P) -> Result<P, ExtractError> {
        let mut names = Names::of(&[&d]);
        let a = names.fresh("a");
        let antecedent = op.apply(p);
        let params = antecedent.fresh_params(&BTreeSet::new());
        let ts: Vec<Term> = params.iter().map(Var::term).collect();
        if h(&antecedent.apply(&ts)) {
            return Ok(rec(lam(&a, d)));
        }
        let hm = self.hat_mon(op)?;
        Ok(rec(lam(&a, app(d, app(hm, v(&a))))))
    }
}

/// Paths of all nodes of a program, in preorder, paired with the node.
fn nodes(m: &P) -> Vec<(Vec<usize>, P)> {
    fn go(m: &P, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, P)>) {
        out.push((path.clone(), m.clone()));
        let kids: Vec<&P> = match &**m {
            Prog::Var(_) | Prog::Nil | Prog::Bot | Prog::Roll(_) | Prog::Unroll(_) => vec![],
            Prog::Left(a) | Prog::Right(a) | Prog::Rec(a) | Prog::Lam(_, a) => vec![a],
            Prog::Pair(a, b) | Prog::App(a, b) | Prog::Comp(a, b) | Prog::CoSum(a, b) | Prog::Fanout(a, b) => {
                vec![a, b]
            }
            Prog::Case(s, cls) => core::iter::once(s).chain(cls.iter().map(|c| &c.body)).collect(),
        };
        for (i, k) in kids.into_iter().enumerate() {
            path.push(i);
            go(k, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

/// Extracts the realizer of a derivation in the given context. The
/// program mentions assumption labels and used theorems as free variables.
pub fn extract_open(th: &Theory, ctx: &Context, d: &Derivation, typed: bool) -> Result<(Formula, P), ExtractError> {
    let c = th.infer_tree(ctx, d)?;
    let mut ex = Ex { typed, prov: BTreeMap::new(), path: Vec::new() };
    let m = ex.go(&c)?;
    Ok((c.formula, m))
}

/// Extracts a closed theorem. `lemmas` holds the results for theorems the
/// derivation refers to.
pub fn extract_theorem(
    th: &Theory,
    d: &Derivation,
    lemmas: &BTreeMap<Name, ExtractionResult>,
) -> Result<ExtractionResult, ExtractError> {
    let c = th.infer_tree(&Context::new(), d)?;
    let mut ex = Ex { typed: false, prov: BTreeMap::new(), path: Vec::new() };
    let local = ex.go(&c)?;
    let mut provenance = Vec::new();
    for (ppath, node) in nodes(&local) {
        if let Some((_, dpath)) = ex.prov.get(&(Rc::as_ptr(&node) as usize)) {
            provenance.push((ppath, dpath.clone()));
        }
    }
    let mut tx = Ex { typed: true, prov: BTreeMap::new(), path: Vec::new() };
    let typed = tx.go(&c)?;

    let mut deps = Vec::new();
    collect_deps(d, &mut deps);
    let fv = program::free_vars(&local);
    deps.retain(|n| fv.contains(n));
    let mut program = local.clone();
    for n in &deps {
        let r = lemmas.get(n).ok_or_else(|| ExtractError::MissingLemma(n.to_string()))?;
        program = subst_closed(&program, n, &r.program);
    }
    Ok(ExtractionResult { ty: tau(&c.formula), formula: c.formula, program, local, typed, deps, provenance })
}

fn collect_deps(d: &Derivation, out: &mut Vec<Name>) {
    if let Derivation::Lemma(n) = d {
        if !out.contains(n) {
            out.push(n.clone());
        }
    }
    for c in d.children() {
        collect_deps(c, out);
    }
}

/// Human-readable form of an extraction error's location.
pub fn describe(e: &ExtractError) -> String {
    format!("{e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::alpha_eq;
    use crate::typecheck::{type_check, Mode};

    fn nat_op() -> Operator {
        // λX λx (x = 0 ∨ X(x - 1))
        let x = Var::new("x", "r");
        let xs = PredSym::new("X", &["r"]);
        let body = Formula::or(
            Formula::eq(x.term(), Term::constant("0")),
            Formula::App(Pred::Var(xs.clone()), vec![Term::app("-", vec![x.term(), Term::constant("1")])]),
        );
        Operator { var: xs, params: vec![x], body }
    }

    #[test]
    fn mon_for_naturals() {
        let m = gen_mon(&nat_op()).unwrap();
        let want = lam(
            &name("f"),
            lam(
                &name("m"),
                case(
                    var("m"),
                    vec![
                        clause(Pat::Left(name("a")), left(var("a"))),
                        clause(Pat::Right(name("b")), right(app(var("f"), var("b")))),
                    ],
                ),
            ),
        );
        assert!(alpha_eq(&m, &want), "{m}");
        let t = Ty::arrow(
            Ty::arrow(Ty::One, Ty::two()),
            Ty::arrow(Ty::sum(Ty::One, Ty::One), Ty::sum(Ty::One, Ty::two())),
        );
        assert!(type_check(&[], &m, &t, Mode::Strict).is_ok());
    }

    #[test]
    fn constant_functor_mon_is_identity() {
        let x = Var::new("x", "r");
        let xs = PredSym::new("X", &["r"]);
        let zero = Formula::eq(x.term(), Term::constant("0"));
        let op = Operator { var: xs, params: vec![x], body: Formula::or(zero.clone(), zero) };
        let m = gen_mon(&op).unwrap();
        let want = lam(&name("f"), lam(&name("a"), var("a")));
        assert!(alpha_eq(&m, &want), "{m}");
    }
}
