//! The `ifp` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use ifp_core::haskell::emit_module;
use ifp_core::logic::{classify, Printer};
use ifp_core::program::{self, P};
use ifp_core::realize::{harrop_interpretation, realizability_formula, tidy, RPrinter};
use ifp_core::runtime::{self, compute_finite, data_leq, show_data, Approximations, Digits, Finite, Format};
use ifp_core::simplify::simplify;
use ifp_core::typecheck::{type_check, Mode};
use ifp_core::types::show as show_ty;

use crate::corpus::{self, Manifest};
use crate::script::{Script, ScriptError};
use crate::sexpr::read_all;
use crate::syntax::prog_seq;

#[derive(Parser, Debug)]
#[command(name = "ifp", version, about = "Proof checking, program extraction and evaluation for IFP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutFormat {
    Term,
    Stream,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DigitSet {
    Auto,
    Gray,
    Signed,
    Plain,
}

#[derive(clap::Args, Debug)]
pub struct Output {
    /// How data is printed.
    #[arg(long, value_enum, default_value = "stream")]
    pub format: OutFormat,
    /// Digit aliases used by the stream format.
    #[arg(long, value_enum, default_value = "auto")]
    pub digits: DigitSet,
    /// Number of stream cells printed before `…`.
    #[arg(long, default_value_t = runtime::STREAM_CAP, value_parser = positive)]
    pub cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every theorem of a script.
    Check { script: PathBuf },
    /// Print the program extracted from a theorem.
    Extract {
        script: PathBuf,
        theorem: String,
        /// Simplify the extracted program.
        #[arg(long)]
        simplify: bool,
        /// Print the roll/unroll annotated program.
        #[arg(long)]
        typed: bool,
        /// Substitute the programs of used theorems.
        #[arg(long)]
        closed: bool,
    },
    /// Evaluate a program to finite data.
    Run {
        /// Program text; several expressions are applied to each other.
        program: String,
        /// Script providing theorem and program names (default: the bundled corpus).
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = runtime::DEFAULT_FUEL, value_parser = positive)]
        fuel: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Print the approximation reached after a number of parallel steps.
    Approx {
        program: String,
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = runtime::DEFAULT_STEPS, value_parser = positive)]
        steps: usize,
        /// Print every strictly larger approximation as it appears.
        #[arg(long)]
        watch: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Write a Haskell module for a theorem's program.
    EmitHaskell {
        script: PathBuf,
        theorem: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print classification, type and realizability formulas of a theorem.
    Audit { script: PathBuf, theorem: String },
    /// Check, extract and run everything listed in a corpus manifest.
    CorpusTest {
        /// Manifest file (default: the bundled one).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// A failed command: the message goes to stderr, the status is 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl From<ScriptError> for Failure {
    fn from(e: ScriptError) -> Failure {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure(e.to_string())
    }
}

/// Loads a script from disk, falling back to the bundled corpus file with
/// the same name.
pub fn load_script(path: &Path) -> Result<Script, ScriptError> {
    if path.exists() {
        return Script::load_file(path);
    }
    let base = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
    if corpus::source(base).is_some() {
        return corpus::script(base);
    }
    Err(ScriptError::Io(format!("{}: no such file", path.display())))
}

fn context(script: &Option<PathBuf>) -> Result<Script, ScriptError> {
    match script {
        Some(p) => load_script(p),
        None => corpus::script(corpus::MAIN),
    }
}

/// Parses program text and closes it over the script's names.
pub fn program_in(s: &Script, text: &str) -> Result<P, Failure> {
    let xs = read_all("<program>", text).map_err(|e| Failure(e.to_string()))?;
    let m = prog_seq(&xs).map_err(|e| Failure(e.to_string()))?;
    let extracted = s.extract_all()?;
    let m = s.link(&m, &extracted);
    let fv = program::free_vars(&m);
    if let Some(x) = fv.iter().next() {
        return Err(Failure(format!("<program>: unresolved name `{x}`")));
    }
    Ok(m)
}

fn format_of(o: &Output) -> Format {
    match o.format {
        OutFormat::Term => Format::Term,
        OutFormat::Stream => Format::Stream {
            digits: match o.digits {
                DigitSet::Auto => None,
                DigitSet::Gray => Some(Digits::Gray),
                DigitSet::Signed => Some(Digits::Signed),
                DigitSet::Plain => Some(Digits::Plain),
            },
            cap: o.cap,
        },
    }
}

/// Runs a parsed command, writing results to `out`.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Check { script } => {
            let s = load_script(script)?;
            let p = Printer::new(Some(&s.theory.sig));
            for t in &s.theorems {
                writeln!(out, "{}: {}", t.name, p.formula(&t.formula))?;
            }
            writeln!(out, "ok: {} theorems", s.theorems.len())?;
        }
        Command::Extract { script, theorem, simplify: simp, typed, closed } => {
            let s = load_script(script)?;
            let (r, _) = s.extract(theorem)?;
            let m = match (typed, closed) {
                (true, _) => r.typed.clone(),
                (false, true) => r.program.clone(),
                (false, false) => r.local.clone(),
            };
            let m = if *simp { simplify(&m) } else { m };
            writeln!(out, "{}", program::show(&m))?;
        }
        Command::Run { program, script, fuel, output } => {
            let s = context(script)?;
            let m = program_in(&s, program)?;
            match compute_finite(&m, *fuel) {
                Finite::Data(d) => writeln!(out, "{}", show_data(&d, format_of(output)))?,
                Finite::Diverged => {
                    writeln!(out, "⊥")?;
                    eprintln!("fuel exhausted after {fuel} steps");
                }
                Finite::Stuck(e) => return Err(Failure(format!("evaluation is stuck: {e}"))),
            }
        }
        Command::Approx { program, script, steps, watch, output } => {
            let s = context(script)?;
            let m = program_in(&s, program)?;
            let f = format_of(output);
            let mut it = Approximations::new(&m);
            // Approximations that differ only past the print cap are not repeated.
            let mut last = show_data(&it.data(), f);
            if *watch {
                writeln!(out, "{}\t{}", 0, last)?;
            }
            while it.steps() < *steps && !it.is_stable() {
                it.advance();
                if *watch {
                    let d = show_data(&it.data(), f);
                    if d != last {
                        writeln!(out, "{}\t{}", it.steps(), d)?;
                        out.flush()?;
                        last = d;
                    }
                }
            }
            writeln!(out, "{}", show_data(&it.data(), f))?;
        }
        Command::EmitHaskell { script, theorem, output } => {
            let s = load_script(script)?;
            let (_, lemmas) = s.extract(theorem)?;
            let name = ifp_core::logic::name(theorem);
            let m = emit_module(&name, &lemmas).map_err(|e| Failure(e.to_string()))?;
            match output {
                Some(p) => std::fs::write(p, m.to_string())?,
                None => write!(out, "{m}")?,
            }
        }
        Command::Audit { script, theorem } => {
            let s = load_script(script)?;
            let t = s.theorem(theorem).ok_or_else(|| Failure(format!("unknown theorem `{theorem}`")))?;
            let p = Printer::new(Some(&s.theory.sig));
            let rp = RPrinter::new(Some(&s.theory.sig));
            writeln!(out, "theorem: {}", p.formula(&t.formula))?;
            writeln!(out, "class: {:?}", classify(&t.formula))?;
            writeln!(out, "type: {}", show_ty(&ifp_core::types::tau(&t.formula)))?;
            let (a, r) = realizability_formula("a", &t.formula);
            writeln!(out, "realizability ({a}): {}", rp.show(&tidy(&r)))?;
            if let Ok(h) = harrop_interpretation(&t.formula) {
                writeln!(out, "harrop: {}", rp.show(&tidy(&h)))?;
            }
        }
        Command::CorpusTest { manifest } => {
            let (m, base) = match manifest {
                Some(p) => {
                    let src = std::fs::read_to_string(p)?;
                    let m = Manifest::parse(&p.display().to_string(), &src).map_err(|e| Failure(e.to_string()))?;
                    (m, p.parent().map(Path::to_path_buf))
                }
                None => (Manifest::bundled(), None),
            };
            let report = corpus_test(&m, base.as_deref());
            for line in &report.lines {
                writeln!(out, "{line}")?;
            }
            if report.failures > 0 {
                return Err(Failure(format!("{} corpus checks failed", report.failures)));
            }
        }
    }
    Ok(())
}

pub struct Report {
    pub lines: Vec<String>,
    pub failures: usize,
}

fn corpus_script(file: &str, base: Option<&Path>) -> Result<Script, ScriptError> {
    match base {
        Some(b) => Script::load_file(&b.join(file)),
        None => corpus::script(file),
    }
}

/// Checks, extracts and type-checks every entry and runs every behaviour.
pub fn corpus_test(m: &Manifest, base: Option<&Path>) -> Report {
    let mut lines = Vec::new();
    let mut failures = 0;
    let mut record = |name: &str, r: Result<String, String>| match r {
        Ok(l) => lines.push(format!("ok   {l}")),
        Err(e) => {
            failures += 1;
            lines.push(format!("FAIL {name}: {e}"));
        }
    };
    for e in &m.entries {
        let r = (|| {
            let s = corpus_script(&e.file, base).map_err(|x| x.to_string())?;
            let (r, lemmas) = s.extract(&e.theorem).map_err(|x| x.to_string())?;
            let ctx: Vec<_> = r.deps.iter().map(|d| (d.clone(), lemmas[d].ty.clone())).collect();
            type_check(&ctx, &r.typed, &r.ty, Mode::Strict).map_err(|x| format!("type error: {x}"))?;
            Ok(format!("{} : {}", e.theorem, show_ty(&r.ty)))
        })();
        record(&e.theorem, r);
    }
    let f = Format::Stream { digits: None, cap: runtime::STREAM_CAP };
    for run in &m.runs {
        let r = (|| {
            let s = corpus_script(&run.file, base).map_err(|x| x.to_string())?;
            let extracted = s.extract_all().map_err(|x| x.to_string())?;
            let prog = s.link(&run.program, &extracted);
            let d = runtime::approx(&prog, run.steps);
            if data_leq(&run.expect, &d) {
                Ok(format!("{} = {}", run.name, show_data(&d, f)))
            } else {
                Err(format!("expected {} ⊑ {}", show_data(&run.expect, f), show_data(&d, f)))
            }
        })();
        record(&run.name, r);
    }
    Report { lines, failures }
}

/// Entry point: parses arguments, runs and maps the result to an exit code.
pub fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return std::process::ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli.command, &mut out) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            std::process::ExitCode::from(1)
        }
    }
}
