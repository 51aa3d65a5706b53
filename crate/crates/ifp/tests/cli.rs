use std::process::{Command, Output};

fn ifp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, file: &str, text: &str) -> String {
    let p = dir.path().join(file);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn check_bundled_script() {
    let o = ifp(&["check", "stog.ifp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("stog: (all (x) (imp (S x) (G x)))"), "{out}");
    assert!(out.ends_with("ok: 9 theorems\n"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ifp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ifp(&["approx", "ones", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(ifp(&["run"]).status.code(), Some(2));
    assert_eq!(ifp(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_script_exits_1() {
    let o = ifp(&["check", "/nonexistent/nothing.ifp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nothing.ifp: no such file"));
}

#[test]
fn check_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "bad.ifp",
        "(include \"reals.ifp\")\n(theorem t (all (x) (imp (N x) (N x)))\n  (alli (x)\n    (impi u (N x) (andl u))))\n",
    );
    let o = ifp(&["check", &path]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains(&format!("{path}:4:19")), "{err}");
    assert!(err.contains("`t`") || err.contains(" t"), "{err}");

    let path = write(&dir, "syntax.ifp", "(include \"reals.ifp\")\n(theorem t (all (x) (Nope x)) (refl 0))\n");
    let o = ifp(&["check", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("{path}:2:22")), "{}", stderr(&o));

    let path = write(&dir, "unbalanced.ifp", "(theorem t\n  (all (x)");
    let o = ifp(&["check", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("{path}:")), "{}", stderr(&o));
}

#[test]
fn extract_and_run() {
    let o = ifp(&["extract", "nat.ifp", "plus", "--simplify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("(lam"), "{}", stdout(&o));
    let o = ifp(&["run", "plus (Right (Left Nil)) (Right (Right (Left Nil)))", "--format", "term"]);
    assert_eq!(stdout(&o), "Right(Right(Right(Left(Nil))))\n");
    let o = ifp(&["extract", "stog.ifp", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ifp(&["run", "(undefined-name Nil)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unresolved name `undefined-name`"));
}

#[test]
fn fuel_exhaustion_prints_bottom() {
    let o = ifp(&["run", "sgh zeros", "--fuel", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "⊥\n");
    assert!(stderr(&o).contains("fuel exhausted"));
}

#[test]
fn approx_half_prime_leaves_a_gap() {
    let o = ifp(&["approx", "stog half′", "--steps", "10000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("R:⊥:R:L:L:"), "{last}");
}

#[test]
fn approx_watch_lists_growing_approximations() {
    let o = ifp(&["approx", "stog half", "--steps", "2000", "--watch"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("0\t"));
    let steps: Vec<usize> = lines[..lines.len() - 1].iter().map(|l| l.split('\t').next().unwrap().parse().unwrap()).collect();
    assert!(steps.windows(2).all(|w| w[0] < w[1]));
    let snaps: Vec<&str> = lines[..lines.len() - 1].iter().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert!(snaps.windows(2).all(|w| w[0] != w[1]));
    assert_eq!(*snaps.last().unwrap(), *lines.last().unwrap());
    assert!(snaps.iter().any(|s| s.starts_with("R:R:R:L:")), "{snaps:?}");
}

#[test]
fn emit_haskell_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("Stog.hs");
    let o = ifp(&["emit-haskell", "stog.ifp", "stog", "-o", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("module Stog where"));
    assert!(text.contains("\nstog :: "));
    assert!(text.contains("\nsgh :: "));
}

#[test]
fn audit_prints_type_and_realizability() {
    let o = ifp(&["audit", "stog.ifp", "claim1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("class: NonHarrop"), "{out}");
    assert!(out.contains("type: (-> (fix "), "{out}");
    assert!(out.contains("realizability (a): "), "{out}");
    let o = ifp(&["audit", "sd.ifp", "s-bounded"]);
    assert!(stdout(&o).contains("harrop: "));
}

#[test]
fn corpus_test_passes_and_reports_failures() {
    let o = ifp(&["corpus-test"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("ok   ")));

    let dir = tempfile::tempdir().unwrap();
    for f in ["reals.ifp", "programs.ifp", "nat.ifp", "sd.ifp", "stog.ifp"] {
        write(&dir, f, ifp::corpus::source(f).unwrap());
    }
    let m = write(&dir, "manifest", "(entry plus \"nat.ifp\")\n(run wrong \"programs.ifp\" (sgh ones) (steps 1000) (expect L))\n");
    let o = ifp(&["corpus-test", "--manifest", &m]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("ok   plus : "), "{out}");
    assert!(out.contains("FAIL wrong: "), "{out}");
}

#[test]
fn output_is_deterministic() {
    for args in [&["extract", "stog.ifp", "stog", "--typed"][..], &["emit-haskell", "stog.ifp", "stog"], &["audit", "stog.ifp", "stog"]] {
        let a = ifp(args);
        let b = ifp(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
