//! Operational semantics of closed programs: bigstep evaluation to weak
//! head values, leftmost-outermost smallstep, parallel steps under
//! constructors, and finite data approximations.
//!
//! Evaluation is by substitution as the rules state. `roll`/`unroll`
//! behave as the identity and the combinator sugar is expanded up front.
//! Internally every node records its free variables so that substitution
//! never descends into closed subterms, which are shared.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::logic::{name, Name};
use crate::program::{self, Pat, Prog, P};

pub const DEFAULT_FUEL: usize = 100_000;
pub const DEFAULT_STEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub enum Outcome {
    Value(P),
    Diverged,
    Stuck(String),
}

#[derive(Clone, Debug)]
pub enum Small {
    Step(P),
    Value,
    Stuck,
}

/// A program in evaluation form.
#[derive(Debug)]
pub struct Term {
    kind: Kind,
    fv: Rc<[Name]>,
}

type T = Rc<Term>;

#[derive(Debug)]
enum Kind {
    Var(Name),
    Nil,
    Left(T),
    Right(T),
    Pair(T, T),
    Case(T, Rc<[Alt]>),
    Lam(Name, T),
    App(T, T),
    Rec(T),
    Bot,
}

#[derive(Debug)]
struct Alt {
    pat: Pat,
    body: T,
}

type Fv = Rc<[Name]>;

fn union(a: &Fv, b: &Fv) -> Fv {
    if b.is_empty() || Rc::ptr_eq(a, b) {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    if b.iter().all(|x| a.contains(x)) {
        return a.clone();
    }
    let mut out: Vec<Name> = a.iter().chain(b.iter()).cloned().collect();
    out.sort();
    out.dedup();
    out.into()
}

fn without(a: &Fv, xs: &[&Name]) -> Fv {
    if !a.iter().any(|v| xs.contains(&v)) {
        return a.clone();
    }
    a.iter().filter(|v| !xs.contains(v)).cloned().collect::<Vec<_>>().into()
}

fn mk(kind: Kind) -> T {
    let fv: Fv = match &kind {
        Kind::Var(x) => Rc::from([x.clone()]),
        Kind::Nil | Kind::Bot => Rc::from([]),
        Kind::Left(a) | Kind::Right(a) | Kind::Rec(a) => a.fv.clone(),
        Kind::Pair(a, b) | Kind::App(a, b) => union(&a.fv, &b.fv),
        Kind::Lam(x, b) => without(&b.fv, &[x]),
        Kind::Case(s, alts) => alts.iter().fold(s.fv.clone(), |acc, c| union(&acc, &without(&c.body.fv, &c.pat.binders()))),
    };
    Rc::new(Term { kind, fv })
}

impl Term {
    fn has_free(&self, x: &str) -> bool {
        self.fv.iter().any(|v| &**v == x)
    }

    fn is_value(&self) -> bool {
        matches!(self.kind, Kind::Nil | Kind::Left(_) | Kind::Right(_) | Kind::Pair(..) | Kind::Lam(..))
    }

    fn is_constructor(&self) -> bool {
        matches!(self.kind, Kind::Nil | Kind::Left(_) | Kind::Right(_) | Kind::Pair(..))
    }
}

/// Converts a program, keeping the sharing of its Rc nodes.
pub fn load(m: &P) -> Rc<Term> {
    // Entries hold on to their key node: desugared nodes are temporary and
    // their addresses would otherwise be reused.
    fn go(m: &P, memo: &mut BTreeMap<usize, (P, T)>) -> T {
        let key = Rc::as_ptr(m) as usize;
        if let Some((_, t)) = memo.get(&key) {
            return t.clone();
        }
        let t = match &**m {
            Prog::Var(x) => mk(Kind::Var(x.clone())),
            Prog::Nil => mk(Kind::Nil),
            Prog::Bot => mk(Kind::Bot),
            Prog::Left(a) => mk(Kind::Left(go(a, memo))),
            Prog::Right(a) => mk(Kind::Right(go(a, memo))),
            Prog::Rec(a) => mk(Kind::Rec(go(a, memo))),
            Prog::Pair(a, b) => mk(Kind::Pair(go(a, memo), go(b, memo))),
            Prog::App(a, b) => mk(Kind::App(go(a, memo), go(b, memo))),
            Prog::Lam(x, b) => mk(Kind::Lam(x.clone(), go(b, memo))),
            Prog::Case(s, cls) => {
                let s = go(s, memo);
                let alts: Vec<Alt> = cls.iter().map(|c| Alt { pat: c.pat.clone(), body: go(&c.body, memo) }).collect();
                mk(Kind::Case(s, alts.into()))
            }
            Prog::Roll(_) | Prog::Unroll(_) => {
                let a = name("a");
                mk(Kind::Lam(a.clone(), mk(Kind::Var(a))))
            }
            Prog::Comp(..) | Prog::CoSum(..) | Prog::Fanout(..) => go(&program::desugar(m), memo),
        };
        memo.insert(key, (m.clone(), t.clone()));
        t
    }
    go(m, &mut BTreeMap::new())
}

/// Converts back, keeping sharing.
pub fn unload(t: &Rc<Term>) -> P {
    fn go(t: &T, memo: &mut BTreeMap<usize, P>) -> P {
        let key = Rc::as_ptr(t) as usize;
        if let Some(p) = memo.get(&key) {
            return p.clone();
        }
        let p = match &t.kind {
            Kind::Var(x) => Rc::new(Prog::Var(x.clone())),
            Kind::Nil => program::nil(),
            Kind::Bot => program::bot(),
            Kind::Left(a) => program::left(go(a, memo)),
            Kind::Right(a) => program::right(go(a, memo)),
            Kind::Rec(a) => program::rec(go(a, memo)),
            Kind::Pair(a, b) => program::pair(go(a, memo), go(b, memo)),
            Kind::App(a, b) => program::app(go(a, memo), go(b, memo)),
            Kind::Lam(x, b) => program::lam(x, go(b, memo)),
            Kind::Case(s, alts) => {
                let s = go(s, memo);
                program::case(s, alts.iter().map(|c| program::clause(c.pat.clone(), go(&c.body, memo))).collect())
            }
        };
        memo.insert(key, p.clone());
        p
    }
    go(t, &mut BTreeMap::new())
}

/// `m[n/x]` for closed `n`; `None` when `x` is not free in `m`.
fn sub(m: &T, x: &str, n: &T) -> Option<T> {
    if !m.has_free(x) {
        return None;
    }
    let s = |a: &T| sub(a, x, n).unwrap_or_else(|| a.clone());
    Some(match &m.kind {
        Kind::Var(_) => n.clone(),
        Kind::Nil | Kind::Bot => unreachable!(),
        Kind::Left(a) => mk(Kind::Left(s(a))),
        Kind::Right(a) => mk(Kind::Right(s(a))),
        Kind::Rec(a) => mk(Kind::Rec(s(a))),
        Kind::Pair(a, b) => mk(Kind::Pair(s(a), s(b))),
        Kind::App(a, b) => mk(Kind::App(s(a), s(b))),
        Kind::Lam(y, b) => mk(Kind::Lam(y.clone(), s(b))),
        Kind::Case(sc, alts) => {
            let alts: Vec<Alt> = alts
                .iter()
                .map(|c| {
                    let body = if c.pat.binders().iter().any(|b| &***b == x) { c.body.clone() } else { s(&c.body) };
                    Alt { pat: c.pat.clone(), body }
                })
                .collect();
            mk(Kind::Case(s(sc), alts.into()))
        }
    })
}

fn subst1(m: &T, x: &Name, n: &T) -> T {
    sub(m, x, n).unwrap_or_else(|| m.clone())
}

/// Contractum of `case v of alts` for a constructor value `v`.
fn select(v: &T, alts: &[Alt]) -> Option<T> {
    for c in alts {
        let r = match (&c.pat, &v.kind) {
            (Pat::Nil, Kind::Nil) => c.body.clone(),
            (Pat::Left(a), Kind::Left(m)) | (Pat::Right(a), Kind::Right(m)) => subst1(&c.body, a, m),
            (Pat::Pair(a, b), Kind::Pair(m, n)) => {
                if a == b {
                    subst1(&c.body, b, n)
                } else {
                    subst1(&subst1(&c.body, a, m), b, n)
                }
            }
            _ => continue,
        };
        return Some(r);
    }
    None
}

fn apply(f: &T, a: &T) -> Option<T> {
    match &f.kind {
        Kind::Lam(x, b) => Some(subst1(b, x, a)),
        _ => None,
    }
}

fn show_t(t: &T) -> String {
    program::show(&unload(t))
}

/// Bigstep evaluation. The budget counts applications of the case,
/// application and recursion rules plus the final value.
pub fn bigstep(m: &P, fuel: usize) -> Outcome {
    if fuel > 0 && is_value(m) && !matches!(**m, Prog::Roll(_) | Prog::Unroll(_)) {
        return Outcome::Value(m.clone());
    }
    let mut fuel = fuel;
    match eval(&load(m), &mut fuel) {
        Ok(v) => Outcome::Value(unload(&v)),
        Err(o) => o,
    }
}

fn eval(m: &T, fuel: &mut usize) -> Result<T, Outcome> {
    let mut cur = m.clone();
    let mut stack: Vec<Frame> = Vec::new();
    loop {
        // Value leaves under a case or an application are not charged.
        if !cur.is_value() || stack.is_empty() {
            if *fuel == 0 {
                return Err(Outcome::Diverged);
            }
            *fuel -= 1;
        }
        let next = match &cur.kind {
            Kind::Case(s, alts) => {
                stack.push(Frame::Case(alts.clone()));
                s.clone()
            }
            Kind::App(f, a) => {
                stack.push(Frame::Arg(a.clone()));
                f.clone()
            }
            Kind::Rec(f) => mk(Kind::App(f.clone(), cur.clone())),
            Kind::Var(x) => return Err(Outcome::Stuck(alloc::format!("free variable `{x}`"))),
            Kind::Bot => return Err(Outcome::Stuck("bot".into())),
            _ => match stack.pop() {
                None => return Ok(cur),
                Some(Frame::Case(alts)) => match select(&cur, &alts) {
                    Some(n) => n,
                    None => return Err(Outcome::Stuck(alloc::format!("no clause matches {}", show_t(&cur)))),
                },
                Some(Frame::Arg(a)) => match apply(&cur, &a) {
                    Some(n) => n,
                    None => return Err(Outcome::Stuck(alloc::format!("{} is not a function", show_t(&cur)))),
                },
            },
        };
        cur = next;
    }
}

enum St {
    Step(T),
    Value,
    Stuck,
}

fn step(m: &T) -> St {
    if m.is_value() {
        return St::Value;
    }
    let mut path: Vec<&T> = Vec::new();
    let mut cur = m;
    let contractum = loop {
        match &cur.kind {
            Kind::Case(s, alts) => {
                if s.is_constructor() {
                    match select(s, alts) {
                        Some(n) => break n,
                        None => return St::Stuck,
                    }
                } else if s.is_value() {
                    return St::Stuck;
                }
                path.push(cur);
                cur = s;
            }
            Kind::App(f, a) => {
                if f.is_value() {
                    match apply(f, a) {
                        Some(n) => break n,
                        None => return St::Stuck,
                    }
                }
                path.push(cur);
                cur = f;
            }
            Kind::Rec(f) => break mk(Kind::App(f.clone(), cur.clone())),
            _ => return St::Stuck,
        }
    };
    let mut r = contractum;
    for node in path.into_iter().rev() {
        r = match &node.kind {
            Kind::Case(_, alts) => mk(Kind::Case(r, alts.clone())),
            Kind::App(_, a) => mk(Kind::App(r, a.clone())),
            _ => unreachable!(),
        };
    }
    St::Step(r)
}

fn pstep(m: &T) -> T {
    match step(m) {
        St::Step(n) => n,
        St::Stuck => m.clone(),
        St::Value => {
            let keep = |a: &T| {
                let b = pstep(a);
                if Rc::ptr_eq(a, &b) {
                    None
                } else {
                    Some(b)
                }
            };
            match &m.kind {
                Kind::Left(a) => keep(a).map_or_else(|| m.clone(), |b| mk(Kind::Left(b))),
                Kind::Right(a) => keep(a).map_or_else(|| m.clone(), |b| mk(Kind::Right(b))),
                Kind::Pair(a, b) => match (keep(a), keep(b)) {
                    (None, None) => m.clone(),
                    (a2, b2) => mk(Kind::Pair(a2.unwrap_or_else(|| a.clone()), b2.unwrap_or_else(|| b.clone()))),
                },
                _ => m.clone(),
            }
        }
    }
}

pub fn is_value(m: &Prog) -> bool {
    matches!(
        m,
        Prog::Nil | Prog::Left(_) | Prog::Right(_) | Prog::Pair(..) | Prog::Lam(..) | Prog::Roll(_) | Prog::Unroll(_)
    )
}

/// One leftmost-outermost reduction step.
pub fn smallstep(m: &P) -> Small {
    if is_value(m) {
        return Small::Value;
    }
    match step(&load(m)) {
        St::Step(n) => Small::Step(unload(&n)),
        St::Value => Small::Value,
        St::Stuck => Small::Stuck,
    }
}

/// A smallstep at the root if one applies, otherwise simultaneous steps in
/// all constructor arguments, otherwise the identity.
pub fn parallel_step(m: &P) -> P {
    let t = load(m);
    let n = pstep(&t);
    if Rc::ptr_eq(&t, &n) {
        m.clone()
    } else {
        unload(&n)
    }
}

/// Finite data: constructor trees with `⊥` leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Data {
    Bot,
    Nil,
    Left(Box<Data>),
    Right(Box<Data>),
    Pair(Box<Data>, Box<Data>),
}

impl Data {
    pub fn left(d: Data) -> Data {
        Data::Left(Box::new(d))
    }

    pub fn right(d: Data) -> Data {
        Data::Right(Box::new(d))
    }

    pub fn pair(a: Data, b: Data) -> Data {
        Data::Pair(Box::new(a), Box::new(b))
    }

    /// `L`, i.e. `Left(Nil)`.
    pub fn l() -> Data {
        Data::left(Data::Nil)
    }

    /// `R`, i.e. `Right(Nil)`.
    pub fn r() -> Data {
        Data::right(Data::Nil)
    }

    /// Signed digits: −1, 0, 1.
    pub fn digit(d: i8) -> Data {
        match d {
            -1 => Data::left(Data::l()),
            1 => Data::left(Data::r()),
            0 => Data::r(),
            _ => panic!("not a signed digit: {d}"),
        }
    }

    /// `a₀ : a₁ : … : tail`.
    pub fn stream(items: impl IntoIterator<Item = Data>, tail: Data) -> Data {
        let items: Vec<Data> = items.into_iter().collect();
        items.into_iter().rev().fold(tail, |acc, d| Data::pair(d, acc))
    }

    /// Unary numeral `Rightⁿ(Left(Nil))`.
    pub fn numeral(n: usize) -> Data {
        (0..n).fold(Data::l(), |acc, _| Data::right(acc))
    }

    pub fn is_total(&self) -> bool {
        match self {
            Data::Bot => false,
            Data::Nil => true,
            Data::Left(a) | Data::Right(a) => a.is_total(),
            Data::Pair(a, b) => a.is_total() && b.is_total(),
        }
    }

    /// Elements of a right-nested pair spine and what ends it.
    pub fn spine(&self) -> (Vec<&Data>, &Data) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Data::Pair(a, b) = cur {
            items.push(&**a);
            cur = b;
        }
        (items, cur)
    }

    pub fn to_program(&self) -> P {
        match self {
            Data::Bot => program::bot(),
            Data::Nil => program::nil(),
            Data::Left(a) => program::left(a.to_program()),
            Data::Right(a) => program::right(a.to_program()),
            Data::Pair(a, b) => program::pair(a.to_program(), b.to_program()),
        }
    }
}

/// `⊑` on finite data.
pub fn data_leq(a: &Data, b: &Data) -> bool {
    match (a, b) {
        (Data::Bot, _) => true,
        (Data::Nil, Data::Nil) => true,
        (Data::Left(x), Data::Left(y)) | (Data::Right(x), Data::Right(y)) => data_leq(x, y),
        (Data::Pair(x1, x2), Data::Pair(y1, y2)) => data_leq(x1, y1) && data_leq(x2, y2),
        _ => false,
    }
}

/// The constructor part of a program, `⊥` elsewhere.
pub fn data_part(m: &Prog) -> Data {
    match m {
        Prog::Nil => Data::Nil,
        Prog::Left(a) => Data::left(data_part(a)),
        Prog::Right(a) => Data::right(data_part(a)),
        Prog::Pair(a, b) => Data::pair(data_part(a), data_part(b)),
        _ => Data::Bot,
    }
}

enum Frame {
    Case(Rc<[Alt]>),
    Arg(T),
}

/// A term in focused form: the focus plugged into the frames, innermost
/// last. Every frame's hole holds a non-value, so the leftmost-outermost
/// redex is always at or below the focus.
struct Machine {
    focus: T,
    stack: Vec<Frame>,
}

enum MStep {
    Stepped,
    Value,
    Stuck,
}

impl Machine {
    /// Exactly one leftmost-outermost contraction.
    fn step(&mut self) -> MStep {
        loop {
            let next = match &self.focus.kind {
                Kind::Case(s, alts) if !s.is_value() => {
                    self.stack.push(Frame::Case(alts.clone()));
                    self.focus = s.clone();
                    continue;
                }
                Kind::Case(s, alts) => match select(s, alts) {
                    Some(n) => n,
                    None => return MStep::Stuck,
                },
                Kind::App(f, a) if !f.is_value() => {
                    self.stack.push(Frame::Arg(a.clone()));
                    self.focus = f.clone();
                    continue;
                }
                Kind::App(f, a) => match apply(f, a) {
                    Some(n) => n,
                    None => return MStep::Stuck,
                },
                Kind::Rec(f) => mk(Kind::App(f.clone(), self.focus.clone())),
                Kind::Var(_) | Kind::Bot => return MStep::Stuck,
                _ => match self.stack.last() {
                    None => return MStep::Value,
                    Some(Frame::Case(alts)) => match select(&self.focus, alts) {
                        Some(n) => {
                            self.stack.pop();
                            n
                        }
                        None => return MStep::Stuck,
                    },
                    Some(Frame::Arg(a)) => match apply(&self.focus, a) {
                        Some(n) => {
                            self.stack.pop();
                            n
                        }
                        None => return MStep::Stuck,
                    },
                },
            };
            self.focus = next;
            return MStep::Stepped;
        }
    }

    fn plug(&self) -> T {
        let mut r = self.focus.clone();
        for f in self.stack.iter().rev() {
            r = match f {
                Frame::Case(alts) => mk(Kind::Case(r, alts.clone())),
                Frame::Arg(a) => mk(Kind::App(r, a.clone())),
            };
        }
        r
    }
}

#[derive(Clone, Copy)]
enum Con {
    Nil,
    Left,
    Right,
    Pair,
}

enum Cell {
    Running(Machine),
    /// A value that is not a constructor, or a stuck term.
    Inert(T),
    Con(Con, [usize; 2]),
}

/// Iterates parallel steps. Each maximal non-constructor subterm is kept
/// as its own focused machine, so a round costs time proportional to the
/// number of running subterms.
pub struct Approximations {
    cells: Vec<Cell>,
    active: Vec<usize>,
    steps: usize,
}

impl Approximations {
    pub fn new(m: &P) -> Self {
        let mut a = Approximations { cells: Vec::new(), active: Vec::new(), steps: 0 };
        let t = load(m);
        let root = a.alloc(t);
        debug_assert_eq!(root, 0);
        a
    }

    /// Allocates a cell for `t`; constructor values are split at once.
    fn alloc(&mut self, t: T) -> usize {
        let i = self.cells.len();
        self.cells.push(Cell::Inert(t.clone()));
        self.settle(i, t);
        i
    }

    fn settle(&mut self, i: usize, t: T) {
        let (con, kids): (Con, Vec<T>) = match &t.kind {
            Kind::Nil => (Con::Nil, vec![]),
            Kind::Left(a) => (Con::Left, vec![a.clone()]),
            Kind::Right(a) => (Con::Right, vec![a.clone()]),
            Kind::Pair(a, b) => (Con::Pair, vec![a.clone(), b.clone()]),
            Kind::Lam(..) | Kind::Var(_) | Kind::Bot => {
                self.cells[i] = Cell::Inert(t);
                return;
            }
            _ => {
                self.cells[i] = Cell::Running(Machine { focus: t, stack: Vec::new() });
                self.active.push(i);
                return;
            }
        };
        let mut idx = [usize::MAX; 2];
        for (k, c) in kids.into_iter().enumerate() {
            idx[k] = self.alloc(c);
        }
        self.cells[i] = Cell::Con(con, idx);
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// True once a parallel step can no longer change anything.
    pub fn is_stable(&self) -> bool {
        self.active.is_empty()
    }

    /// Performs one parallel step.
    pub fn advance(&mut self) {
        self.steps += 1;
        let active = core::mem::take(&mut self.active);
        let mut still = Vec::with_capacity(active.len());
        let mut done = Vec::new();
        for i in active {
            let Cell::Running(m) = &mut self.cells[i] else { unreachable!() };
            match m.step() {
                MStep::Stepped => {
                    if m.stack.is_empty() && m.focus.is_value() {
                        done.push(i);
                    } else {
                        still.push(i);
                    }
                }
                MStep::Value => unreachable!("running cells hold non-values"),
                MStep::Stuck => {
                    let t = m.plug();
                    self.cells[i] = Cell::Inert(t);
                }
            }
        }
        self.active = still;
        for i in done {
            let Cell::Running(m) = &self.cells[i] else { unreachable!() };
            let t = m.focus.clone();
            self.settle(i, t);
        }
    }

    fn term(&self, i: usize) -> T {
        match &self.cells[i] {
            Cell::Running(m) => m.plug(),
            Cell::Inert(t) => t.clone(),
            Cell::Con(Con::Nil, _) => mk(Kind::Nil),
            Cell::Con(Con::Left, [a, _]) => mk(Kind::Left(self.term(*a))),
            Cell::Con(Con::Right, [a, _]) => mk(Kind::Right(self.term(*a))),
            Cell::Con(Con::Pair, [a, b]) => mk(Kind::Pair(self.term(*a), self.term(*b))),
        }
    }

    /// The current program `M⁽ⁿ⁾`.
    pub fn program(&self) -> P {
        unload(&self.term(0))
    }

    fn data_at(&self, i: usize) -> Data {
        // Right-nested pair spines are walked iteratively.
        let mut heads = Vec::new();
        let mut cur = i;
        let tail = loop {
            match &self.cells[cur] {
                Cell::Con(Con::Pair, [a, b]) => {
                    heads.push(*a);
                    cur = *b;
                }
                Cell::Con(Con::Nil, _) => break Data::Nil,
                Cell::Con(Con::Left, [a, _]) => break Data::left(self.data_at(*a)),
                Cell::Con(Con::Right, [a, _]) => break Data::right(self.data_at(*a)),
                _ => break Data::Bot,
            }
        };
        heads.into_iter().rev().fold(tail, |acc, h| Data::pair(self.data_at(h), acc))
    }

    /// `(M⁽ⁿ⁾)⊥`.
    pub fn data(&self) -> Data {
        self.data_at(0)
    }

    /// The `k`-th element of the right-nested pair spine, `⊥` if the spine
    /// is not yet that long.
    pub fn element(&self, k: usize) -> Data {
        let mut cur = 0;
        for _ in 0..k {
            match &self.cells[cur] {
                Cell::Con(Con::Pair, [_, b]) => cur = *b,
                _ => return Data::Bot,
            }
        }
        match &self.cells[cur] {
            Cell::Con(Con::Pair, [a, _]) => self.data_at(*a),
            _ => Data::Bot,
        }
    }
}

/// `(M⁽ⁿ⁾)⊥`.
pub fn approx(m: &P, n: usize) -> Data {
    let mut it = Approximations::new(m);
    while it.steps() < n && !it.is_stable() {
        it.advance();
    }
    it.data()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finite {
    Data(Data),
    Diverged,
    Stuck(String),
}

/// Bigstep evaluation continued under constructors, with a shared budget.
pub fn compute_finite(m: &P, fuel: usize) -> Finite {
    enum Shape {
        Nil,
        Left,
        Right,
        Pair,
    }
    let mut budget = fuel;
    let mut work: Vec<T> = vec![load(m)];
    // Constructor nodes in preorder; the result is assembled bottom-up.
    let mut shapes: Vec<Shape> = Vec::new();
    while let Some(t) = work.pop() {
        let v = match eval(&t, &mut budget) {
            Ok(v) => v,
            Err(Outcome::Stuck(s)) => return Finite::Stuck(s),
            Err(_) => return Finite::Diverged,
        };
        match &v.kind {
            Kind::Nil => shapes.push(Shape::Nil),
            Kind::Left(a) => {
                shapes.push(Shape::Left);
                work.push(a.clone());
            }
            Kind::Right(a) => {
                shapes.push(Shape::Right);
                work.push(a.clone());
            }
            Kind::Pair(a, b) => {
                shapes.push(Shape::Pair);
                work.push(b.clone());
                work.push(a.clone());
            }
            _ => return Finite::Stuck(alloc::format!("{} is not data", show_t(&v))),
        }
    }
    let mut out: Vec<Data> = Vec::new();
    for s in shapes.into_iter().rev() {
        let d = match s {
            Shape::Nil => Data::Nil,
            Shape::Left => Data::left(out.pop().unwrap()),
            Shape::Right => Data::right(out.pop().unwrap()),
            Shape::Pair => {
                let a = out.pop().unwrap();
                let b = out.pop().unwrap();
                Data::pair(a, b)
            }
        };
        out.push(d);
    }
    Finite::Data(out.pop().unwrap())
}

/// How stream elements are printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Digits {
    /// `L`, `R`.
    Gray,
    /// `-1`, `0`, `1`.
    Signed,
    /// Constructor terms.
    Plain,
}

/// Output format for data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Term,
    Stream { digits: Option<Digits>, cap: usize },
}

pub const STREAM_CAP: usize = 32;

pub fn write_term(w: &mut impl Write, d: &Data) -> fmt::Result {
    match d {
        Data::Bot => w.write_str("⊥"),
        Data::Nil => w.write_str("Nil"),
        Data::Left(a) => {
            w.write_str("Left(")?;
            write_term(w, a)?;
            w.write_char(')')
        }
        Data::Right(a) => {
            w.write_str("Right(")?;
            write_term(w, a)?;
            w.write_char(')')
        }
        Data::Pair(a, b) => {
            w.write_str("Pair(")?;
            write_term(w, a)?;
            w.write_str(", ")?;
            write_term(w, b)?;
            w.write_char(')')
        }
    }
}

fn alias(d: &Data, digits: Digits) -> Option<&'static str> {
    let is = |x: &Data| *d == *x;
    match digits {
        Digits::Gray if is(&Data::l()) => Some("L"),
        Digits::Gray if is(&Data::r()) => Some("R"),
        Digits::Signed if is(&Data::digit(-1)) => Some("-1"),
        Digits::Signed if is(&Data::digit(0)) => Some("0"),
        Digits::Signed if is(&Data::digit(1)) => Some("1"),
        _ => None,
    }
}

/// Signed digits if any element is `Left(Left Nil)` or `Left(Right Nil)`,
/// Gray digits otherwise.
pub fn guess_digits(d: &Data) -> Digits {
    let (items, _) = d.spine();
    if items.iter().any(|x| **x == Data::digit(-1) || **x == Data::digit(1)) {
        Digits::Signed
    } else {
        Digits::Gray
    }
}

pub fn write_stream(w: &mut impl Write, d: &Data, digits: Digits, cap: usize) -> fmt::Result {
    let (items, tail) = d.spine();
    if items.is_empty() {
        return write_elem(w, d, digits);
    }
    for (i, x) in items.iter().enumerate() {
        if i == cap {
            return w.write_str("…");
        }
        write_elem(w, x, digits)?;
        w.write_char(':')?;
    }
    write_elem(w, tail, digits)
}

fn write_elem(w: &mut impl Write, d: &Data, digits: Digits) -> fmt::Result {
    match alias(d, digits) {
        Some(s) => w.write_str(s),
        None if matches!(d, Data::Pair(..)) => {
            w.write_char('(')?;
            write_stream(w, d, digits, STREAM_CAP)?;
            w.write_char(')')
        }
        None => write_term(w, d),
    }
}

pub fn show_data(d: &Data, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Term => write_term(&mut s, d),
        Format::Stream { digits, cap } => write_stream(&mut s, d, digits.unwrap_or_else(|| guess_digits(d)), cap),
    }
    .unwrap();
    s
}

impl fmt::Display for Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::name;
    use crate::program::*;
    use alloc::vec;

    fn ones_nil() -> P {
        rec(lam(&name("x"), pair(nil(), var("x"))))
    }

    #[test]
    fn values_evaluate_to_themselves() {
        for v in [nil(), left(bot()), lam(&name("x"), var("x")), pair(ones_nil(), nil())] {
            match bigstep(&v, 1) {
                Outcome::Value(w) => assert!(Rc::ptr_eq(&v, &w)),
                o => panic!("{o:?}"),
            }
        }
    }

    #[test]
    fn rec_unfolds_once_to_a_pair() {
        let m = ones_nil();
        let Outcome::Value(v) = bigstep(&m, 3) else { panic!() };
        assert!(alpha_eq(&v, &pair(nil(), m.clone())));
        assert!(matches!(bigstep(&m, 2), Outcome::Diverged));
    }

    #[test]
    fn smallstep_rules() {
        let id = lam(&name("x"), var("x"));
        let Small::Step(n) = smallstep(&app(id.clone(), nil())) else { panic!() };
        assert_eq!(*n, Prog::Nil);
        let k = lam(&name("x"), var("x"));
        let Small::Step(n) = smallstep(&rec(k.clone())) else { panic!() };
        assert!(alpha_eq(&n, &app(k.clone(), rec(k.clone()))));
        let c = case(rec(k.clone()), vec![clause(Pat::Nil, nil())]);
        let Small::Step(n) = smallstep(&c) else { panic!() };
        assert!(alpha_eq(&n, &case(app(k.clone(), rec(k)), vec![clause(Pat::Nil, nil())])));
    }

    #[test]
    fn parallel_step_examples() {
        let k = lam(&name("y"), var("y"));
        let id = lam(&name("x"), var("x"));
        let m = pair(rec(k.clone()), app(id.clone(), nil()));
        let want = pair(app(k.clone(), rec(k)), nil());
        assert!(alpha_eq(&parallel_step(&m), &want));
        assert!(Rc::ptr_eq(&parallel_step(&id), &id));
    }

    #[test]
    fn data_part_examples() {
        let k = lam(&name("y"), var("y"));
        assert_eq!(data_part(&pair(nil(), rec(k))), Data::pair(Data::Nil, Data::Bot));
        assert_eq!(data_part(&lam(&name("x"), var("x"))), Data::Bot);
        assert_eq!(data_part(&left(right(nil()))), Data::left(Data::r()));
    }

    #[test]
    fn order_examples() {
        assert!(data_leq(&Data::Bot, &Data::pair(Data::Nil, Data::Bot)));
        let a = Data::stream([Data::r()], Data::Bot);
        let b = Data::stream([Data::r(), Data::l()], Data::Bot);
        assert!(data_leq(&a, &b));
        assert!(!data_leq(&Data::left(Data::Bot), &Data::right(Data::Bot)));
    }

    #[test]
    fn finite_computation() {
        assert_eq!(compute_finite(&nil(), 10), Finite::Data(Data::Nil));
        assert_eq!(compute_finite(&ones_nil(), 10_000), Finite::Diverged);
    }

    #[test]
    fn stream_printing() {
        let d = Data::stream([Data::r(), Data::Bot, Data::r(), Data::l()], Data::Bot);
        assert_eq!(show_data(&d, Format::Stream { digits: None, cap: STREAM_CAP }), "R:⊥:R:L:⊥");
        let s = Data::stream([Data::digit(-1), Data::digit(0), Data::digit(1)], Data::Bot);
        assert_eq!(show_data(&s, Format::Stream { digits: None, cap: STREAM_CAP }), "-1:0:1:⊥");
        assert_eq!(show_data(&Data::pair(Data::l(), Data::Bot), Format::Term), "Pair(Left(Nil), ⊥)");
        let long = Data::stream((0..40).map(|_| Data::l()), Data::Bot);
        let out = show_data(&long, Format::Stream { digits: Some(Digits::Gray), cap: 3 });
        assert_eq!(out, "L:L:L:…");
    }
}
