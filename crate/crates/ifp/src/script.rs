//! Proof scripts: declarations, definitions, theorems and programs.
//!
//! ```text
//! (declare-sort r)
//! (declare-fun + (r r) r)      (declare-fun 0 r)
//! (declare-pred <= (r r))
//! (axiom name A)
//! (define-pred N (mu X (x) (or (= x 0) (X (- x 1)))))
//! (define name (params) body)  ; textual macro, params optional
//! (theorem name A derivation)
//! (program name M)
//! (include "file")
//! ```

use std::collections::{BTreeMap, BTreeSet};

use ifp_core::extract::{extract_theorem, ExtractError, ExtractionResult};
use ifp_core::kernel::{Derivation, Theory};
use ifp_core::logic::{name, Formula, Name};
use ifp_core::program::{self, P};

use crate::sexpr::{read_all, substitute, Kind, ReadError, Sexp};
use crate::syntax::{err, ParseError, Parser, Scope, SpanTree};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{loc}: in theorem `{theorem}`: {msg}")]
    Check { loc: String, theorem: String, msg: String },
    #[error("{0}")]
    Io(String),
}

/// Resolves an include: `(including file, argument) -> (file name, text)`.
pub type Resolver<'r> = dyn Fn(&str, &str) -> Result<(String, String), String> + 'r;

#[derive(Clone, Debug)]
struct Macro {
    params: Vec<String>,
    body: Sexp,
}

#[derive(Clone, Debug)]
pub struct TheoremEntry {
    pub name: Name,
    pub formula: Formula,
    pub derivation: Derivation,
    pub spans: SpanTree,
}

/// A loaded and checked script.
#[derive(Clone, Debug, Default)]
pub struct Script {
    pub theory: Theory,
    /// Theorems in script order.
    pub theorems: Vec<TheoremEntry>,
    /// Hand-written programs in script order, with free variables naming
    /// theorems or earlier programs.
    pub programs: Vec<(Name, P)>,
    macros: BTreeMap<String, Macro>,
    files: BTreeSet<String>,
}

fn arity(x: &Sexp, xs: &[Sexp], n: usize) -> Result<(), ParseError> {
    if xs.len() != n + 1 {
        return Err(err(x, format!("`{}` takes {n} arguments, got {}", xs[0], xs.len() - 1)));
    }
    Ok(())
}

fn atom<'s>(x: &'s Sexp, what: &str) -> Result<&'s str, ParseError> {
    x.atom().ok_or_else(|| err(x, format!("expected {what}")))
}

fn atoms<'s>(x: &'s Sexp, what: &str) -> Result<Vec<&'s str>, ParseError> {
    x.list()
        .ok_or_else(|| err(x, format!("expected a list of {what}")))?
        .iter()
        .map(|y| atom(y, what))
        .collect()
}

impl Script {
    pub fn new() -> Script {
        Script::default()
    }

    /// Loads a script from disk; includes are relative to the including file.
    pub fn load_file(path: &std::path::Path) -> Result<Script, ScriptError> {
        let src = std::fs::read_to_string(path).map_err(|e| ScriptError::Io(format!("{}: {e}", path.display())))?;
        let mut s = Script::new();
        s.load(&path.display().to_string(), &src, &fs_resolver)?;
        Ok(s)
    }

    pub fn theorem(&self, n: &str) -> Option<&TheoremEntry> {
        self.theorems.iter().find(|t| &*t.name == n)
    }

    pub fn program(&self, n: &str) -> Option<&P> {
        self.programs.iter().find(|(m, _)| &**m == n).map(|(_, p)| p)
    }

    /// Reads and checks every form of `src`.
    pub fn load(&mut self, file: &str, src: &str, resolve: &Resolver) -> Result<(), ScriptError> {
        if !self.files.insert(file.to_string()) {
            return Ok(());
        }
        for form in read_all(file, src)? {
            self.form(&form, file, resolve)?;
        }
        Ok(())
    }

    /// Expands macro uses.
    pub fn expand(&self, x: &Sexp) -> Result<Sexp, ParseError> {
        self.expand_depth(x, 0)
    }

    fn expand_depth(&self, x: &Sexp, depth: usize) -> Result<Sexp, ParseError> {
        if depth > 64 {
            return Err(err(x, "macro expansion too deep"));
        }
        match &x.kind {
            Kind::Atom(a) => match self.macros.get(a) {
                Some(m) if m.params.is_empty() => self.expand_depth(&m.body, depth + 1),
                _ => Ok(x.clone()),
            },
            Kind::Str(_) => Ok(x.clone()),
            Kind::List(xs) => {
                if let Some(m) = x.head().and_then(|h| self.macros.get(h)) {
                    if !m.params.is_empty() {
                        if xs.len() != m.params.len() + 1 {
                            return Err(err(x, format!("macro `{}` takes {} arguments", xs[0], m.params.len())));
                        }
                        let args = xs[1..].iter().map(|a| self.expand_depth(a, depth)).collect::<Result<Vec<_>, _>>()?;
                        let map: Vec<(&str, &Sexp)> = m.params.iter().map(String::as_str).zip(args.iter()).collect();
                        return self.expand_depth(&substitute(&m.body, &map), depth + 1);
                    }
                }
                let ys = xs.iter().map(|a| self.expand_depth(a, depth)).collect::<Result<Vec<_>, _>>()?;
                Ok(Sexp { kind: Kind::List(ys), pos: x.pos, file: x.file.clone() })
            }
        }
    }

    fn parser<'a>(&'a self, names: &'a BTreeSet<Name>) -> Parser<'a> {
        Parser { sig: &self.theory.sig, theorems: names }
    }

    fn theorem_names(&self) -> BTreeSet<Name> {
        self.theory.theorems.keys().cloned().collect()
    }

    fn logic<T>(x: &Sexp, r: Result<T, ifp_core::logic::LogicError>) -> Result<T, ParseError> {
        r.map_err(|e| err(x, e.to_string()))
    }

    fn form(&mut self, x: &Sexp, file: &str, resolve: &Resolver) -> Result<(), ScriptError> {
        let xs = x.list().filter(|xs| !xs.is_empty()).ok_or_else(|| err(x, "expected a declaration"))?;
        let kw = atom(&xs[0], "a declaration keyword")?;
        let names = self.theorem_names();
        match kw {
            "include" => {
                arity(x, xs, 1)?;
                let Kind::Str(arg) = &xs[1].kind else {
                    return Err(err(&xs[1], "expected a file name string").into());
                };
                let (f, src) = resolve(file, arg).map_err(|e| err(&xs[1], e))?;
                self.load(&f, &src, resolve)?;
            }
            "declare-sort" => {
                arity(x, xs, 1)?;
                Self::logic(x, self.theory.sig.add_sort(atom(&xs[1], "a sort name")?))?;
            }
            "declare-fun" => {
                let (args, res) = match xs.len() {
                    3 => (vec![], atom(&xs[2], "a sort")?),
                    4 => (atoms(&xs[2], "sorts")?, atom(&xs[3], "a sort")?),
                    _ => return Err(err(x, "expected `(declare-fun f (sorts) sort)`").into()),
                };
                Self::logic(x, self.theory.sig.add_func(atom(&xs[1], "a function name")?, &args, res))?;
            }
            "declare-pred" => {
                arity(x, xs, 2)?;
                let args = atoms(&xs[2], "sorts")?;
                Self::logic(x, self.theory.sig.add_pred(atom(&xs[1], "a predicate name")?, &args))?;
            }
            "axiom" => {
                arity(x, xs, 2)?;
                let n = atom(&xs[1], "an axiom name")?;
                let body = self.expand(&xs[2])?;
                let f = self.parser(&names).formula(&Scope::new(), &body)?;
                if self.theory.theorems.contains_key(n) {
                    return Err(err(&xs[1], format!("`{n}` is already a theorem")).into());
                }
                Self::logic(x, self.theory.sig.add_axiom(n, f))?;
            }
            "define-pred" => {
                arity(x, xs, 2)?;
                let n = atom(&xs[1], "a predicate name")?;
                let body = self.expand(&xs[2])?;
                let p = self.parser(&names).pred(&Scope::new(), &body)?;
                if !p.free_vars().is_empty() || !p.free_pvars().is_empty() {
                    return Err(err(x, format!("definition of `{n}` is not closed")).into());
                }
                Self::logic(x, self.theory.sig.add_def(n, p))?;
            }
            "define" => {
                // (define name body) or (define name (params) body)
                if xs.len() != 3 && xs.len() != 4 {
                    return Err(err(x, "expected `(define name [(params)] body)`").into());
                }
                let n = atom(&xs[1], "a macro name")?;
                let params = match xs.len() {
                    4 => atoms(&xs[2], "parameters")?.into_iter().map(String::from).collect(),
                    _ => Vec::new(),
                };
                if self.macros.contains_key(n) {
                    return Err(err(&xs[1], format!("duplicate macro `{n}`")).into());
                }
                self.macros.insert(n.to_string(), Macro { params, body: xs[xs.len() - 1].clone() });
            }
            "theorem" => {
                arity(x, xs, 3)?;
                let n = atom(&xs[1], "a theorem name")?;
                let goal = self.expand(&xs[2])?;
                let proof = self.expand(&xs[3])?;
                let p = self.parser(&names);
                let f = p.formula(&Scope::new(), &goal)?;
                let (d, spans) = p.derivation(&Scope::new(), &proof)?;
                if let Err(e) = self.theory.add_theorem(n, f.clone(), &d) {
                    let loc = if e.path.is_empty() && !matches!(e.kind, ifp_core::kernel::KernelErrorKind::UnknownAssumption(_)) {
                        x.location()
                    } else {
                        spans.locate(&e.path).to_string()
                    };
                    return Err(ScriptError::Check { loc, theorem: n.into(), msg: e.kind.to_string() });
                }
                self.theorems.push(TheoremEntry { name: name(n), formula: f, derivation: d, spans });
            }
            "program" => {
                arity(x, xs, 2)?;
                let n = atom(&xs[1], "a program name")?;
                if self.program(n).is_some() {
                    return Err(err(&xs[1], format!("duplicate program `{n}`")).into());
                }
                let body = self.expand(&xs[2])?;
                let m = crate::syntax::prog(&body)?;
                self.programs.push((name(n), m));
            }
            _ => return Err(err(&xs[0], format!("unknown declaration `{kw}`")).into()),
        }
        Ok(())
    }

    /// Extracts every theorem, in script order.
    pub fn extract_all(&self) -> Result<BTreeMap<Name, ExtractionResult>, ScriptError> {
        let mut out = BTreeMap::new();
        for t in &self.theorems {
            let r = extract_theorem(&self.theory, &t.derivation, &out).map_err(|e| self.extract_error(t, e))?;
            out.insert(t.name.clone(), r);
        }
        Ok(out)
    }

    /// Extracts one theorem together with the theorems it uses.
    pub fn extract(&self, n: &str) -> Result<(ExtractionResult, BTreeMap<Name, ExtractionResult>), ScriptError> {
        let Some(t) = self.theorem(n) else {
            return Err(ScriptError::Io(format!("unknown theorem `{n}`")));
        };
        let mut needed = BTreeSet::new();
        let mut stack = vec![t.name.clone()];
        while let Some(m) = stack.pop() {
            if needed.insert(m.clone()) {
                if let Some(e) = self.theorem(&m) {
                    lemmas_of(&e.derivation, &mut stack);
                }
            }
        }
        let mut out = BTreeMap::new();
        for e in self.theorems.iter().filter(|e| needed.contains(&e.name)) {
            let r = extract_theorem(&self.theory, &e.derivation, &out).map_err(|err| self.extract_error(e, err))?;
            out.insert(e.name.clone(), r);
        }
        let r = out[&t.name].clone();
        Ok((r, out))
    }

    fn extract_error(&self, t: &TheoremEntry, e: ExtractError) -> ScriptError {
        let (path, msg) = match &e {
            ExtractError::Kernel(k) => (k.path.clone(), k.kind.to_string()),
            ExtractError::Unsupported { path, .. } => (path.clone(), e.to_string()),
            ExtractError::MissingLemma(_) => (vec![], e.to_string()),
        };
        ScriptError::Check { loc: t.spans.locate(&path).to_string(), theorem: t.name.to_string(), msg }
    }

    /// Closes a program over the script's programs and extracted theorems.
    /// Programs may refer to earlier programs and to theorems.
    pub fn link(&self, m: &P, extracted: &BTreeMap<Name, ExtractionResult>) -> P {
        let mut m = m.clone();
        for (n, p) in self.programs.iter().rev() {
            m = program::subst(&m, n, p);
        }
        for n in program::free_vars(&m) {
            if let Some(r) = extracted.get(&n) {
                m = program::subst(&m, &n, &r.program);
            }
        }
        m
    }
}

fn lemmas_of(d: &Derivation, out: &mut Vec<Name>) {
    if let Derivation::Lemma(n) = d {
        out.push(n.clone());
    }
    for c in d.children() {
        lemmas_of(c, out);
    }
}

/// Includes resolved relative to the including file. A missing file with
/// the name of a bundled corpus file resolves to the bundled one.
pub fn fs_resolver(from: &str, arg: &str) -> Result<(String, String), String> {
    let base = std::path::Path::new(from).parent().unwrap_or(std::path::Path::new("."));
    let p = base.join(arg);
    match std::fs::read_to_string(&p) {
        Ok(src) => Ok((p.display().to_string(), src)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound && crate::corpus::source(arg).is_some() => {
            crate::corpus::resolver(from, arg)
        }
        Err(e) => Err(format!("cannot include {}: {e}", p.display())),
    }
}
