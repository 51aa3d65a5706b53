//! The bundled corpus: the real-number instance, the signed digit and Gray
//! code proofs, hand-written programs and the manifest of checks.

use std::collections::BTreeMap;

use ifp_core::extract::ExtractionResult;
use ifp_core::logic::{Formula, Name};
use ifp_core::program::P;
use ifp_core::runtime::{data_part, Data};
use ifp_core::simplify::simplify;

use crate::script::{Script, ScriptError};
use crate::sexpr::{read_all, Kind, Sexp};
use crate::syntax::{err, prog, ParseError};

pub const FILES: &[(&str, &str)] = &[
    ("reals.ifp", include_str!("../../../corpus/reals.ifp")),
    ("nat.ifp", include_str!("../../../corpus/nat.ifp")),
    ("sd.ifp", include_str!("../../../corpus/sd.ifp")),
    ("stog.ifp", include_str!("../../../corpus/stog.ifp")),
    ("programs.ifp", include_str!("../../../corpus/programs.ifp")),
    ("manifest", include_str!("../../../corpus/manifest")),
];

/// Script that includes every other corpus script.
pub const MAIN: &str = "programs.ifp";

pub fn source(file: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == file).map(|(_, s)| *s)
}

/// Resolves includes among the bundled files.
pub fn resolver(_from: &str, arg: &str) -> Result<(String, String), String> {
    let src = source(arg).ok_or_else(|| format!("no bundled file `{arg}`"))?;
    Ok((arg.to_string(), src.to_string()))
}

/// Loads a bundled script.
pub fn script(file: &str) -> Result<Script, ScriptError> {
    let src = source(file).ok_or_else(|| ScriptError::Io(format!("no bundled file `{file}`")))?;
    let mut s = Script::new();
    s.load(file, src, &resolver)?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("`{0}` is not in the manifest")]
    Unknown(String),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub theorem: String,
    pub file: String,
}

/// A behavioural check: `expect ⊑ approx(program, steps)`.
#[derive(Clone, Debug)]
pub struct Run {
    pub name: String,
    pub file: String,
    pub program: P,
    pub steps: usize,
    pub expect: Data,
}

#[derive(Clone, Debug, Default)]
pub struct Manifest {
    pub entries: Vec<Entry>,
    pub runs: Vec<Run>,
}

fn string(x: &Sexp) -> Result<String, ParseError> {
    match &x.kind {
        Kind::Str(s) => Ok(s.clone()),
        _ => Err(err(x, "expected a string")),
    }
}

fn field<'s>(x: &'s Sexp, key: &str) -> Result<&'s Sexp, ParseError> {
    match x.list() {
        Some([k, v]) if k.atom() == Some(key) => Ok(v),
        _ => Err(err(x, format!("expected `({key} …)`"))),
    }
}

impl Manifest {
    pub fn parse(file: &str, src: &str) -> Result<Manifest, CorpusError> {
        let mut m = Manifest::default();
        for x in read_all(file, src).map_err(ScriptError::from)? {
            let xs = x.list().unwrap_or(&[]);
            match (x.head(), xs.len()) {
                (Some("entry"), 3) => {
                    let theorem = xs[1].atom().ok_or_else(|| err(&xs[1], "expected a theorem name"))?;
                    m.entries.push(Entry { theorem: theorem.into(), file: string(&xs[2])? });
                }
                (Some("run"), 6) => {
                    let name = xs[1].atom().ok_or_else(|| err(&xs[1], "expected a name"))?;
                    let steps = field(&xs[4], "steps")?;
                    let steps = steps.atom().and_then(|s| s.parse().ok()).ok_or_else(|| err(steps, "expected a step count"))?;
                    let expect = data_part(&*prog(field(&xs[5], "expect")?)?);
                    m.runs.push(Run { name: name.into(), file: string(&xs[2])?, program: prog(&xs[3])?, steps, expect });
                }
                _ => return Err(err(&x, "expected `(entry …)` or `(run …)`").into()),
            }
        }
        Ok(m)
    }

    pub fn bundled() -> Manifest {
        Manifest::parse("manifest", source("manifest").expect("bundled")).expect("the bundled manifest parses")
    }
}

/// A checked and extracted corpus theorem.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub file: String,
    pub formula: Formula,
    pub extraction: ExtractionResult,
    /// Simplified form of the extraction's local program.
    pub simplified: P,
    /// Extractions of the theorems this one uses, including itself.
    pub lemmas: BTreeMap<Name, ExtractionResult>,
}

pub fn load(name: &str) -> Result<CorpusEntry, CorpusError> {
    let m = Manifest::bundled();
    let e = m.entries.iter().find(|e| e.theorem == name).ok_or_else(|| CorpusError::Unknown(name.into()))?;
    let s = script(&e.file)?;
    let (r, lemmas) = s.extract(name)?;
    Ok(CorpusEntry {
        name: name.into(),
        file: e.file.clone(),
        formula: r.formula.clone(),
        simplified: simplify(&r.local),
        extraction: r,
        lemmas,
    })
}
