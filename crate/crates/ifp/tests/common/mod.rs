#![allow(dead_code)]

use ifp::cli::program_in;
use ifp::corpus;
use ifp::script::Script;
use ifp::sexpr::read_all;
use ifp::syntax::prog;
use ifp_core::program::{self, Clause, Pat, Prog, P};
use ifp_core::runtime::{
    bigstep, data_leq, data_part, parallel_step, smallstep, Approximations, Data, Outcome, Small,
};
use proptest::prelude::*;
use std::rc::Rc;

pub fn programs() -> Script {
    corpus::script(corpus::MAIN).unwrap()
}

/// Program text closed over the bundled corpus.
pub fn closed(s: &Script, text: &str) -> P {
    match program_in(s, text) {
        Ok(m) => m,
        Err(e) => panic!("{text}: {}", e.0),
    }
}

pub fn parse(text: &str) -> P {
    let xs = read_all("<test>", text).unwrap();
    assert_eq!(xs.len(), 1);
    prog(&xs[0]).unwrap()
}

/// Reads choices from a random word list; exhausted lists yield zeros so
/// every list decodes to a finite program.
pub struct Choices<'a> {
    xs: &'a [u32],
    i: usize,
}

impl<'a> Choices<'a> {
    pub fn new(xs: &'a [u32]) -> Self {
        Choices { xs, i: 0 }
    }

    pub fn pick(&mut self, n: u32) -> u32 {
        let v = self.xs.get(self.i).copied().unwrap_or(0);
        self.i += 1;
        v % n
    }
}

fn rc(p: Prog) -> P {
    Rc::new(p)
}

fn fresh(scope: &[String]) -> String {
    format!("x{}", scope.len())
}

/// A closed program of depth at most `depth`.
pub fn gen_prog(c: &mut Choices, depth: u32, scope: &mut Vec<String>) -> P {
    let leaf = depth == 0;
    let k = if leaf { c.pick(4) } else { c.pick(16) };
    match k {
        0 => rc(Prog::Nil),
        1 | 2 => match scope.len() {
            0 => rc(Prog::Nil),
            n => program::var(&scope[n - 1 - c.pick(n as u32) as usize]),
        },
        3 => {
            if c.pick(4) == 0 {
                rc(Prog::Bot)
            } else {
                rc(Prog::Left(rc(Prog::Nil)))
            }
        }
        4 => rc(Prog::Left(gen_prog(c, depth - 1, scope))),
        5 => rc(Prog::Right(gen_prog(c, depth - 1, scope))),
        6 => rc(Prog::Pair(gen_prog(c, depth - 1, scope), gen_prog(c, depth - 1, scope))),
        7 | 8 => {
            let x = fresh(scope);
            scope.push(x.clone());
            let b = gen_prog(c, depth - 1, scope);
            scope.pop();
            program::lam(&x.as_str().into(), b)
        }
        9 | 10 => rc(Prog::App(gen_prog(c, depth - 1, scope), gen_prog(c, depth - 1, scope))),
        11 | 12 => {
            let m = gen_prog(c, depth - 1, scope);
            let shapes: &[&[u8]] = &[&[1, 2], &[3], &[0], &[1], &[2, 1], &[0, 1, 2, 3]];
            let shape = shapes[c.pick(shapes.len() as u32) as usize];
            let mut clauses = Vec::new();
            for &s in shape {
                let a = fresh(scope);
                let b = format!("{a}b");
                let (pat, bound) = match s {
                    0 => (Pat::Nil, vec![]),
                    1 => (Pat::Left(a.as_str().into()), vec![a.clone()]),
                    2 => (Pat::Right(a.as_str().into()), vec![a.clone()]),
                    _ => (Pat::Pair(a.as_str().into(), b.as_str().into()), vec![a.clone(), b]),
                };
                let n = bound.len();
                scope.extend(bound);
                let body = gen_prog(c, depth - 1, scope);
                scope.truncate(scope.len() - n);
                clauses.push(Clause { pat, body });
            }
            rc(Prog::Case(m, clauses))
        }
        13 => {
            let f = fresh(scope);
            scope.push(f.clone());
            let b = gen_prog(c, depth - 1, scope);
            scope.pop();
            rc(Prog::Rec(program::lam(&f.as_str().into(), b)))
        }
        14 => {
            let a = gen_prog(c, depth - 1, scope);
            let b = gen_prog(c, depth - 1, scope);
            match c.pick(3) {
                0 => rc(Prog::Comp(a, b)),
                1 => rc(Prog::CoSum(a, b)),
                _ => rc(Prog::Fanout(a, b)),
            }
        }
        _ => {
            // Applications of a case-dispatching function to data are common
            // in extracted code, so they get a dedicated shape.
            let x = fresh(scope);
            scope.push(x.clone());
            let l = fresh(scope);
            let r = format!("{l}r");
            scope.push(l.clone());
            let bl = gen_prog(c, depth - 1, scope);
            scope.pop();
            scope.push(r.clone());
            let br = gen_prog(c, depth - 1, scope);
            scope.pop();
            scope.pop();
            let f = program::lam(
                &x.as_str().into(),
                rc(Prog::Case(
                    program::var(&x),
                    vec![
                        Clause { pat: Pat::Left(l.as_str().into()), body: bl },
                        Clause { pat: Pat::Right(r.as_str().into()), body: br },
                    ],
                )),
            );
            rc(Prog::App(f, gen_prog(c, depth - 1, scope)))
        }
    }
}

pub fn arb_prog() -> impl Strategy<Value = P> {
    (2u32..=7, prop::collection::vec(any::<u32>(), 16..160)).prop_map(|(d, xs)| gen_prog(&mut Choices::new(&xs), d, &mut Vec::new()))
}

pub fn gen_data(c: &mut Choices, depth: u32) -> Data {
    match if depth == 0 { c.pick(2) } else { c.pick(5) } {
        0 => Data::Bot,
        1 => Data::Nil,
        2 => Data::Left(Box::new(gen_data(c, depth - 1))),
        3 => Data::Right(Box::new(gen_data(c, depth - 1))),
        _ => Data::Pair(Box::new(gen_data(c, depth - 1)), Box::new(gen_data(c, depth - 1))),
    }
}

/// Replaces some `⊥` leaves by data, giving an element above `d`.
pub fn refine(d: &Data, c: &mut Choices) -> Data {
    match d {
        Data::Bot => {
            if c.pick(2) == 0 {
                Data::Bot
            } else {
                gen_data(c, 2)
            }
        }
        Data::Nil => Data::Nil,
        Data::Left(a) => Data::Left(Box::new(refine(a, c))),
        Data::Right(a) => Data::Right(Box::new(refine(a, c))),
        Data::Pair(a, b) => Data::Pair(Box::new(refine(a, c)), Box::new(refine(b, c))),
    }
}

/// A data element with two refinements above it, plus an unrelated one.
pub fn arb_data_chain() -> impl Strategy<Value = (Data, Data, Data, Data)> {
    prop::collection::vec(any::<u32>(), 0..128).prop_map(|xs| {
        let mut c = Choices::new(&xs);
        let a = gen_data(&mut c, 4);
        let b = refine(&a, &mut c);
        let d = refine(&b, &mut c);
        let u = gen_data(&mut c, 4);
        (a, b, d, u)
    })
}

/// A signed digit stream `prefix ++ cycle^ω` as program text.
pub fn periodic(prefix: &[i8], cycle: &[i8]) -> String {
    let digit = |d: &i8| d.to_string();
    let cyc: Vec<String> = cycle.iter().map(digit).collect();
    let tail = format!("(rec (lam (c) (: {} c)))", cyc.join(" "));
    if prefix.is_empty() {
        tail
    } else {
        let pre: Vec<String> = prefix.iter().map(digit).collect();
        format!("(: {} {tail})", pre.join(" "))
    }
}

/// The `k`-th element of a signed digit stream `prefix ++ cycle^ω`.
pub fn periodic_at(prefix: &[i8], cycle: &[i8], k: usize) -> i8 {
    if k < prefix.len() {
        prefix[k]
    } else {
        cycle[(k - prefix.len()) % cycle.len()]
    }
}

/// A bigstep value is reached by iterating smallsteps, and a stuck bigstep
/// run corresponds to a stuck smallstep sequence.
pub fn bigstep_agrees_with_smallstep(m: &P) -> Result<(), String> {
    let outcome = bigstep(m, 2_000);
    if let Outcome::Diverged = outcome {
        return Ok(());
    }
    let mut cur = m.clone();
    for _ in 0..200_000 {
        match smallstep(&cur) {
            Small::Step(n) => cur = n,
            Small::Value => {
                return match &outcome {
                    Outcome::Value(v) if program::alpha_eq(&program::desugar(v), &program::desugar(&cur)) => Ok(()),
                    o => Err(format!("bigstep gave {o:?}, smallstep reached {}", program::show(&cur))),
                };
            }
            Small::Stuck => {
                return match &outcome {
                    Outcome::Stuck(_) => Ok(()),
                    o => Err(format!("bigstep gave {o:?}, smallstep is stuck at {}", program::show(&cur))),
                };
            }
        }
    }
    Err(format!("bigstep gave {outcome:?}, smallstep did not finish"))
}

/// Approximations form a ⊑-chain and coincide with iterated parallel steps.
pub fn approximations_accumulate(m: &P, rounds: usize) -> Result<(), String> {
    let mut it = Approximations::new(m);
    let mut reference = m.clone();
    let mut last = it.data();
    for n in 0..rounds {
        let d = it.data();
        if !data_leq(&last, &d) {
            return Err(format!("round {n}: {last:?} ⋢ {d:?}"));
        }
        let r = data_part(&reference);
        if r != d {
            return Err(format!("round {n}: iterated parallel step gives {r:?}, the evaluator {d:?}"));
        }
        last = d;
        it.advance();
        reference = parallel_step(&reference);
    }
    Ok(())
}

/// The parallel step is a function of its input.
pub fn parallel_step_deterministic(m: &P) -> Result<(), String> {
    let copy = parse(&program::show(m));
    let mut a = m.clone();
    let mut b = copy;
    for n in 0..20 {
        a = parallel_step(&a);
        b = parallel_step(&b);
        if !program::alpha_eq(&a, &b) {
            return Err(format!("step {n}: {} vs {}", program::show(&a), program::show(&b)));
        }
    }
    Ok(())
}

/// Reflexivity, antisymmetry and transitivity of ⊑ on `a ⊑ b ⊑ c`, plus
/// the laws on an unrelated element `u`.
pub fn leq_laws(a: &Data, b: &Data, c: &Data, u: &Data) -> Result<(), String> {
    for x in [a, b, c, u] {
        if !data_leq(x, x) {
            return Err(format!("not reflexive at {x:?}"));
        }
        if !data_leq(&Data::Bot, x) {
            return Err(format!("⊥ is not below {x:?}"));
        }
    }
    if !(data_leq(a, b) && data_leq(b, c) && data_leq(a, c)) {
        return Err(format!("refinement chain broken: {a:?} {b:?} {c:?}"));
    }
    for (x, y) in [(a, u), (u, a), (b, u), (c, u)] {
        if data_leq(x, y) && data_leq(y, x) && x != y {
            return Err(format!("not antisymmetric: {x:?} {y:?}"));
        }
    }
    for (x, y, z) in [(a, b, u), (u, a, b), (a, u, c), (b, c, u)] {
        if data_leq(x, y) && data_leq(y, z) && !data_leq(x, z) {
            return Err(format!("not transitive: {x:?} {y:?} {z:?}"));
        }
    }
    Ok(())
}

use ifp::script::ScriptError;
use ifp::syntax::{Parser, Scope};
use ifp_core::logic::{Formula, Pred, Var};

/// Loads script text that may include bundled corpus files.
pub fn script_src(src: &str) -> Result<Script, ScriptError> {
    let mut s = Script::new();
    s.load("<test>", src, &corpus::resolver)?;
    Ok(s)
}

fn one(text: &str) -> ifp::sexpr::Sexp {
    let mut xs = read_all("<test>", text).unwrap();
    assert_eq!(xs.len(), 1, "{text}");
    xs.remove(0)
}

fn scope(s: &Script, vars: &[&str]) -> Scope {
    let sort = s.theory.sig.default_sort().cloned().unwrap();
    let vs: Vec<Var> = vars.iter().map(|v| Var::new(v, &sort)).collect();
    Scope::new().with_vars(&vs)
}

/// Parses a formula whose free object variables are `vars`.
pub fn try_formula(s: &Script, vars: &[&str], text: &str) -> Result<Formula, ifp::syntax::ParseError> {
    let thms = s.theory.theorems.keys().cloned().collect();
    Parser { sig: &s.theory.sig, theorems: &thms }.formula(&scope(s, vars), &one(text))
}

pub fn formula(s: &Script, vars: &[&str], text: &str) -> Formula {
    try_formula(s, vars, text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn pred(s: &Script, text: &str) -> Pred {
    let thms = s.theory.theorems.keys().cloned().collect();
    Parser { sig: &s.theory.sig, theorems: &thms }.pred(&Scope::new(), &one(text)).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn reals() -> Script {
    corpus::script("reals.ifp").unwrap()
}

use ifp_core::logic::{Operator, PredSym, Term};

/// Signature of randomly generated formulas.
pub const SMALL_SIG: &str = "
(declare-sort r)
(declare-fun 0 r)
(declare-fun 1 r)
(declare-fun + (r r) r)
(declare-pred <= (r r))
(declare-pred P (r))
";

pub fn small() -> Script {
    script_src(SMALL_SIG).unwrap()
}

/// Bound names in generated formulas.
#[derive(Default, Clone)]
pub struct Env {
    pub vars: Vec<String>,
    /// Fixed-point variables, usable only at strictly positive positions.
    pub fix: Vec<String>,
    /// Free predicate variables, usable anywhere.
    pub free: Vec<String>,
    counter: usize,
}

impl Env {
    pub fn with_free(free: &[&str]) -> Env {
        Env { free: free.iter().map(|s| s.to_string()).collect(), ..Env::default() }
    }

    fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }
}

fn unary(n: &str) -> PredSym {
    PredSym::new(n, &["r"])
}

pub fn gen_term(c: &mut Choices, depth: u32, env: &Env) -> Term {
    let k = if depth == 0 { c.pick(3) } else { c.pick(4) };
    match k {
        0 if !env.vars.is_empty() => Var::new(&env.vars[c.pick(env.vars.len() as u32) as usize], "r").term(),
        0 | 1 => Term::constant("0"),
        2 => Term::constant("1"),
        _ => Term::app("+", vec![gen_term(c, depth - 1, env), gen_term(c, depth - 1, env)]),
    }
}

/// A formula over [`SMALL_SIG`]; `sp` is false inside implication premises.
pub fn gen_formula(c: &mut Choices, depth: u32, env: &mut Env, sp: bool) -> Formula {
    let t = |c: &mut Choices, env: &Env| gen_term(c, 1, env);
    let k = if depth == 0 { c.pick(5) } else { c.pick(13) };
    match k {
        0 => Formula::eq(t(c, env), t(c, env)),
        1 => Formula::App(Pred::Const(PredSym::new("<=", &["r", "r"])), vec![t(c, env), t(c, env)]),
        2 => Formula::App(Pred::Const(unary("P")), vec![t(c, env)]),
        3 if sp && !env.fix.is_empty() => {
            let x = env.fix[c.pick(env.fix.len() as u32) as usize].clone();
            Formula::App(Pred::Var(unary(&x)), vec![t(c, env)])
        }
        3 | 4 if !env.free.is_empty() => {
            let x = env.free[c.pick(env.free.len() as u32) as usize].clone();
            Formula::App(Pred::Var(unary(&x)), vec![t(c, env)])
        }
        3 | 4 => Formula::falsum(),
        5 => Formula::and(gen_formula(c, depth - 1, env, sp), gen_formula(c, depth - 1, env, sp)),
        6 | 7 => Formula::or(gen_formula(c, depth - 1, env, sp), gen_formula(c, depth - 1, env, sp)),
        8 => {
            let a = gen_formula(c, depth - 1, env, false);
            Formula::imp(a, gen_formula(c, depth - 1, env, sp))
        }
        9 | 10 => {
            let x = env.fresh("x");
            env.vars.push(x.clone());
            let b = gen_formula(c, depth - 1, env, sp);
            env.vars.pop();
            if k == 9 {
                Formula::all(Var::new(&x, "r"), b)
            } else {
                Formula::ex(Var::new(&x, "r"), b)
            }
        }
        11 => {
            let x = env.fresh("x");
            let arg = t(c, env);
            env.vars.push(x.clone());
            let b = gen_formula(c, depth - 1, env, sp);
            env.vars.pop();
            // Applied abstractions are kept beta-normal, as the parser does.
            Pred::Abst(vec![Var::new(&x, "r")], Rc::new(b)).apply(&[arg])
        }
        _ => {
            let arg = t(c, env);
            let xv = env.fresh("X");
            let x = env.fresh("x");
            // Fixed-point variables of enclosing operators stay usable only
            // while positivity has not been lost.
            let saved = env.fix.clone();
            if !sp {
                env.fix.clear();
            }
            env.fix.push(xv.clone());
            env.vars.push(x.clone());
            let body = gen_formula(c, depth - 1, env, true);
            env.vars.pop();
            env.fix = saved;
            let op = Rc::new(Operator { var: unary(&xv), params: vec![Var::new(&x, "r")], body });
            let p = if c.pick(2) == 0 { Pred::Mu(op) } else { Pred::Nu(op) };
            Formula::App(p, vec![arg])
        }
    }
}

pub fn arb_formula() -> impl Strategy<Value = Formula> {
    (1u32..=5, prop::collection::vec(any::<u32>(), 8..96))
        .prop_map(|(d, xs)| gen_formula(&mut Choices::new(&xs), d, &mut Env::default(), true))
}

/// Formulas with the free unary predicate variable `Y`.
pub fn arb_open_formula() -> impl Strategy<Value = Formula> {
    (1u32..=5, prop::collection::vec(any::<u32>(), 8..96))
        .prop_map(|(d, xs)| gen_formula(&mut Choices::new(&xs), d, &mut Env::with_free(&["Y"]), true))
}

/// Renames every bound object and predicate variable by appending `'`.
pub fn rename_bound(f: &Formula) -> Formula {
    fn v(x: &Var) -> Var {
        Var::new(&format!("{}'", x.name), &x.sort)
    }
    fn ren(f: &Formula, m: &[(String, String)]) -> Formula {
        match f {
            Formula::Eq(a, b) => Formula::Eq(rt(a, m), rt(b, m)),
            Formula::App(p, ts) => Formula::App(rp(p, m), ts.iter().map(|t| rt(t, m)).collect()),
            Formula::And(a, b) => Formula::and(ren(a, m), ren(b, m)),
            Formula::Or(a, b) => Formula::or(ren(a, m), ren(b, m)),
            Formula::Imp(a, b) => Formula::imp(ren(a, m), ren(b, m)),
            Formula::All(x, b) | Formula::Ex(x, b) => {
                let mut m2 = m.to_vec();
                m2.push((x.name.to_string(), format!("{}'", x.name)));
                let body = ren(b, &m2);
                if matches!(f, Formula::All(..)) {
                    Formula::all(v(x), body)
                } else {
                    Formula::ex(v(x), body)
                }
            }
        }
    }
    fn look(n: &str, m: &[(String, String)]) -> String {
        m.iter().rev().find(|(a, _)| a == n).map(|(_, b)| b.clone()).unwrap_or_else(|| n.to_string())
    }
    fn rt(t: &Term, m: &[(String, String)]) -> Term {
        match t {
            Term::Var(x) => Var::new(&look(&x.name, m), &x.sort).term(),
            Term::App(f, ts) => Term::app(f, ts.iter().map(|t| rt(t, m)).collect()),
        }
    }
    fn rp(p: &Pred, m: &[(String, String)]) -> Pred {
        match p {
            Pred::Var(s) => Pred::Var(PredSym { name: look(&s.name, m).as_str().into(), arity: s.arity.clone() }),
            Pred::Const(_) => p.clone(),
            Pred::Abst(xs, b) => {
                let mut m2 = m.to_vec();
                m2.extend(xs.iter().map(|x| (x.name.to_string(), format!("{}'", x.name))));
                Pred::Abst(xs.iter().map(v).collect(), Rc::new(ren(b, &m2)))
            }
            Pred::Mu(op) | Pred::Nu(op) => {
                let mut m2 = m.to_vec();
                m2.push((op.var.name.to_string(), format!("{}'", op.var.name)));
                m2.extend(op.params.iter().map(|x| (x.name.to_string(), format!("{}'", x.name))));
                let op2 = Operator {
                    var: PredSym { name: format!("{}'", op.var.name).as_str().into(), arity: op.var.arity.clone() },
                    params: op.params.iter().map(v).collect(),
                    body: ren(&op.body, &m2),
                };
                if matches!(p, Pred::Mu(_)) {
                    Pred::Mu(Rc::new(op2))
                } else {
                    Pred::Nu(Rc::new(op2))
                }
            }
        }
    }
    ren(f, &[])
}
