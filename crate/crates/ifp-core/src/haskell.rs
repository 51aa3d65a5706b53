//! Haskell code generation.
//!
//! Every `fix α ρ` becomes a single-constructor data type named `T` followed
//! by eight hex digits of the SHA-256 of its alpha-normal printed form, with
//! `roll_`/`unroll_` helpers. Alpha-equal fixed-point types share one
//! declaration.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use sha2::{Digest, Sha256};

use crate::extract::ExtractionResult;
use crate::logic::Name;
use crate::program::{desugar, Pat, Prog, P};
use crate::typecheck::{type_check, Mode};
use crate::types::Ty;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HaskellError {
    #[error("no extraction result for `{0}`")]
    Missing(Name),
    #[error("`{0}` is not roll-annotated: {1}")]
    Untyped(Name, String),
    #[error("dependency cycle through `{0}`")]
    Cycle(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedModule {
    pub name: String,
    pub preamble: String,
    pub data: Vec<String>,
    pub definitions: Vec<String>,
    /// Haskell name of the entry binding.
    pub entry: String,
}

impl fmt::Display for EmittedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.preamble)?;
        for d in self.data.iter().chain(&self.definitions) {
            writeln!(f)?;
            f.write_str(d)?;
        }
        Ok(())
    }
}

const KEYWORDS: &[&str] = &[
    "case", "class", "data", "default", "deriving", "do", "else", "foreign", "if", "import", "in", "infix",
    "infixl", "infixr", "instance", "let", "module", "newtype", "of", "then", "type", "where", "forall", "rec",
    "bot",
];

fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else {
            let _ = write!(out, "_{:x}_", c as u32);
        }
    }
}

/// Injective renaming of program variables to Haskell identifiers. Plain
/// names stay as they are; anything else gets an `x_` prefix and escapes.
pub fn hs_var(n: &str) -> String {
    let plain = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '\'')
        && !KEYWORDS.contains(&n);
    if plain {
        return n.to_string();
    }
    let mut s = String::from("x_");
    escape(n, &mut s);
    s
}

fn hs_tyvar(n: &str) -> String {
    let mut s = String::from("t_");
    escape(n, &mut s);
    s
}

/// Module name derived from a theorem name.
pub fn module_name(theorem: &str) -> String {
    let mut s: String = theorem.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    match s.chars().next() {
        Some(c) if c.is_ascii_alphabetic() => {
            let up = c.to_ascii_uppercase();
            s.replace_range(..1, up.encode_utf8(&mut [0; 4]));
            s
        }
        _ => format!("M{s}"),
    }
}

/// Data declarations collected while printing types.
#[derive(Default)]
struct Decls {
    names: BTreeMap<String, String>,
    text: Vec<String>,
}

fn fix_name(t: &Ty) -> (String, String) {
    let key = format!("{}", t.alpha_normal());
    let digest = Sha256::digest(key.as_bytes());
    let mut n = String::from("T");
    for b in &digest[..4] {
        let _ = write!(n, "{b:02x}");
    }
    (key, n)
}

impl Decls {
    /// The text of `t`. Level 0 is unrestricted, 1 is the left of an arrow
    /// and 2 an argument of a type constructor.
    fn ty(&mut self, t: &Ty, env: &[(Name, String)], level: u8) -> String {
        let paren = |s: String, need: bool| if need { format!("({s})") } else { s };
        match t {
            Ty::Var(a) => match env.iter().rev().find(|(x, _)| x == a) {
                Some((_, s)) => s.clone(),
                None => hs_tyvar(a),
            },
            Ty::One => "One".into(),
            Ty::Sum(a, b) => {
                let s = format!("Either {} {}", self.ty(a, env, 2), self.ty(b, env, 2));
                paren(s, level > 1)
            }
            Ty::Prod(a, b) => format!("({}, {})", self.ty(a, env, 0), self.ty(b, env, 0)),
            Ty::Arrow(a, b) => {
                let s = format!("{} -> {}", self.ty(a, env, 1), self.ty(b, env, 0));
                paren(s, level > 0)
            }
            Ty::Fix(..) => {
                let c = self.declare(t);
                let fv = t.free_vars();
                if fv.is_empty() {
                    return c;
                }
                let mut s = c;
                for b in &fv {
                    s.push(' ');
                    s.push_str(&self.ty(&Ty::Var(b.clone()), env, 2));
                }
                paren(s, level > 1)
            }
        }
    }

    fn declare(&mut self, t: &Ty) -> String {
        let (key, c) = fix_name(t);
        if let Some(n) = self.names.get(&key) {
            return n.clone();
        }
        self.names.insert(key, c.clone());
        let Ty::Fix(a, body) = t else { unreachable!() };
        let fv: Vec<Name> = t.free_vars().into_iter().collect();
        let params: Vec<String> = (0..fv.len()).map(|i| format!("t{i}")).collect();
        let head = if params.is_empty() { c.clone() } else { format!("{c} {}", params.join(" ")) };
        let applied = if params.is_empty() { c.clone() } else { format!("({head})") };
        let mut env: Vec<(Name, String)> = fv.iter().cloned().zip(params.iter().cloned()).collect();
        env.push((a.clone(), applied.clone()));
        let body_atomic = self.ty(body, &env, 2);
        let body_left = self.ty(body, &env, 1);
        let body_plain = self.ty(body, &env, 0);
        self.text.push(format!(
            "data {head} = {c} {body_atomic}\n\n\
             roll_{c} :: {body_left} -> {applied}\n\
             roll_{c} x = {c} x\n\n\
             unroll_{c} :: {applied} -> {body_plain}\n\
             unroll_{c} ({c} x) = x\n"
        ));
        c
    }

    fn prog(&mut self, m: &Prog, level: u8, out: &mut String) {
        // level 0: anything, 1: head of an application, 2: argument
        let open = |out: &mut String, need: bool| {
            if need {
                out.push('(');
            }
        };
        let close = |out: &mut String, need: bool| {
            if need {
                out.push(')');
            }
        };
        match m {
            Prog::Var(x) => out.push_str(&hs_var(x)),
            Prog::Nil => out.push_str("Nil"),
            Prog::Bot => out.push_str("bot"),
            Prog::Roll(t) => {
                let c = self.declare(t);
                let _ = write!(out, "roll_{c}");
            }
            Prog::Unroll(t) => {
                let c = self.declare(t);
                let _ = write!(out, "unroll_{c}");
            }
            Prog::Left(a) | Prog::Right(a) => {
                open(out, level > 1);
                out.push_str(if matches!(m, Prog::Left(_)) { "Left " } else { "Right " });
                self.prog(a, 2, out);
                close(out, level > 1);
            }
            Prog::Rec(a) => {
                open(out, level > 1);
                out.push_str("rec ");
                self.prog(a, 2, out);
                close(out, level > 1);
            }
            Prog::App(f, a) => {
                open(out, level > 1);
                self.prog(f, 1, out);
                out.push(' ');
                self.prog(a, 2, out);
                close(out, level > 1);
            }
            Prog::Pair(a, b) => {
                out.push('(');
                self.prog(a, 0, out);
                out.push_str(", ");
                self.prog(b, 0, out);
                out.push(')');
            }
            Prog::Lam(x, b) => {
                open(out, level > 0);
                let _ = write!(out, "\\{} -> ", hs_var(x));
                self.prog(b, 0, out);
                close(out, level > 0);
            }
            Prog::Case(s, cls) => {
                open(out, level > 0);
                out.push_str("case ");
                self.prog(s, 0, out);
                out.push_str(" of { ");
                for (i, c) in cls.iter().enumerate() {
                    if i > 0 {
                        out.push_str("; ");
                    }
                    match &c.pat {
                        Pat::Nil => out.push_str("Nil"),
                        Pat::Left(a) => {
                            let _ = write!(out, "Left {}", hs_var(a));
                        }
                        Pat::Right(a) => {
                            let _ = write!(out, "Right {}", hs_var(a));
                        }
                        Pat::Pair(a, b) => {
                            let _ = write!(out, "({}, {})", hs_var(a), hs_var(b));
                        }
                    }
                    out.push_str(" -> ");
                    self.prog(&c.body, 0, out);
                }
                out.push_str(" }");
                close(out, level > 0);
            }
            Prog::Comp(..) | Prog::CoSum(..) | Prog::Fanout(..) => {
                let d = desugar(&alloc::rc::Rc::new(m.clone()));
                self.prog(&d, level, out)
            }
        }
    }
}

/// The Haskell text of a type together with the declarations it needs.
pub fn emit_type(t: &Ty) -> (String, Vec<String>) {
    let mut d = Decls::default();
    let s = d.ty(t, &[], 0);
    (s, d.text)
}

const PREAMBLE_TAIL: &str = "\
import Prelude (Either (..))

data One = Nil

rec :: (a -> a) -> a
rec f = f (rec f)

bot :: a
bot = bot
";

fn order(
    entry: &Name,
    results: &BTreeMap<Name, ExtractionResult>,
    state: &mut BTreeMap<Name, bool>,
    out: &mut Vec<Name>,
) -> Result<(), HaskellError> {
    match state.get(entry) {
        Some(true) => return Ok(()),
        Some(false) => return Err(HaskellError::Cycle(entry.clone())),
        None => {}
    }
    let r = results.get(entry).ok_or_else(|| HaskellError::Missing(entry.clone()))?;
    state.insert(entry.clone(), false);
    for d in &r.deps {
        order(d, results, state, out)?;
    }
    state.insert(entry.clone(), true);
    out.push(entry.clone());
    Ok(())
}

/// A self-contained module defining `entry` and everything it references.
pub fn emit_module(entry: &Name, results: &BTreeMap<Name, ExtractionResult>) -> Result<EmittedModule, HaskellError> {
    let mut names = Vec::new();
    order(entry, results, &mut BTreeMap::new(), &mut names)?;
    let mut decls = Decls::default();
    let mut defs = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for n in &names {
        let r = &results[n];
        let ctx: Vec<(Name, Ty)> = r.deps.iter().map(|d| (d.clone(), results[d].ty.clone())).collect();
        type_check(&ctx, &r.typed, &r.ty, Mode::Strict).map_err(|e| HaskellError::Untyped(n.clone(), e.0))?;
        let hn = hs_var(n);
        if !seen.insert(hn.clone()) {
            continue;
        }
        let ty = decls.ty(&r.ty, &[], 0);
        let mut body = String::new();
        decls.prog(&desugar(&r.typed), 0, &mut body);
        defs.push(format!("-- {}\n{hn} :: {ty}\n{hn} = {body}\n", r.formula));
    }
    Ok(EmittedModule {
        name: module_name(entry),
        preamble: format!("module {} where\n\n{PREAMBLE_TAIL}", module_name(entry)),
        data: decls.text,
        definitions: defs,
        entry: hs_var(entry),
    })
}

/// Emission of a single closed program at a given type.
pub fn emit_program(name: &Name, m: &P, ty: &Ty) -> Result<String, HaskellError> {
    type_check(&[], m, ty, Mode::Strict).map_err(|e| HaskellError::Untyped(name.clone(), e.0))?;
    let mut decls = Decls::default();
    let t = decls.ty(ty, &[], 0);
    let mut body = String::new();
    decls.prog(&desugar(m), 0, &mut body);
    let hn = hs_var(name);
    let mut s = String::new();
    for d in &decls.text {
        s.push_str(d);
        s.push('\n');
    }
    let _ = write!(s, "{hn} :: {t}\n{hn} = {body}\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::name;
    use crate::program::*;
    use alloc::rc::Rc;

    fn nat() -> Ty {
        Ty::fix("a", Ty::sum(Ty::One, Ty::var("a")))
    }

    #[test]
    fn base_types() {
        assert_eq!(emit_type(&Ty::One).0, "One");
        assert_eq!(emit_type(&Ty::sum(Ty::One, Ty::One)).0, "Either One One");
        assert_eq!(emit_type(&Ty::prod(Ty::One, Ty::two())).0, "(One, Either One One)");
        assert_eq!(emit_type(&Ty::arrow(Ty::two(), Ty::arrow(Ty::One, Ty::One))).0, "Either One One -> One -> One");
        assert_eq!(emit_type(&Ty::arrow(Ty::arrow(Ty::One, Ty::One), Ty::One)).0, "(One -> One) -> One");
    }

    #[test]
    fn fix_types_get_one_declaration() {
        let (s, decls) = emit_type(&Ty::prod(nat(), Ty::fix("b", Ty::sum(Ty::One, Ty::var("b")))));
        assert_eq!(decls.len(), 1);
        let c = fix_name(&nat()).1;
        assert_eq!(s, format!("({c}, {c})"));
        assert!(decls[0].starts_with(&format!("data {c} = {c} (Either One {c})\n")));
        assert!(decls[0].contains(&format!("roll_{c} x = {c} x")));
        assert!(decls[0].contains(&format!("unroll_{c} ({c} x) = x")));
    }

    #[test]
    fn nested_fix_abstracts_free_variables() {
        // fix a. fix b. (a + b): the inner type has `a` free.
        let t = Ty::fix("a", Ty::fix("b", Ty::sum(Ty::var("a"), Ty::var("b"))));
        let (_, decls) = emit_type(&t);
        assert_eq!(decls.len(), 2);
        assert!(decls.iter().any(|d| d.contains(" t0 = ")));
    }

    #[test]
    fn names_are_injective() {
        assert_eq!(hs_var("plus"), "plus");
        assert_eq!(hs_var("a'"), "a'");
        assert_ne!(hs_var("case"), "case");
        assert_ne!(hs_var("x_1"), hs_var("x1"));
        assert_ne!(hs_var("X~"), hs_var("X"));
        assert_eq!(module_name("stog"), "Stog");
    }

    #[test]
    fn roll_is_emitted_at_the_declaration() {
        let zero = app(Rc::new(Prog::Roll(nat())), left(nil()));
        let s = emit_program(&name("zero"), &zero, &nat()).unwrap();
        let c = fix_name(&nat()).1;
        assert!(s.ends_with(&format!("zero :: {c}\nzero = roll_{c} (Left Nil)\n")));
    }

    #[test]
    fn unannotated_programs_are_rejected() {
        assert!(matches!(emit_program(&name("zero"), &left(nil()), &nat()), Err(HaskellError::Untyped(..))));
    }

    #[test]
    fn harrop_realizer_is_nil() {
        let s = emit_program(&name("triv"), &nil(), &Ty::One).unwrap();
        assert_eq!(s, "triv :: One\ntriv = Nil\n");
    }
}
