use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::signature::Signature;
use super::subst::{alpha_eq_pred};
use super::syntax::*;

/// S-expression printer. With a signature, binder sorts other than the
/// default one are written out and predicates alpha-equal to a definition are
/// folded back to its name.
#[derive(Clone, Copy)]
pub struct Printer<'a> {
    sig: Option<&'a Signature>,
}

impl<'a> Printer<'a> {
    pub fn new(sig: Option<&'a Signature>) -> Printer<'a> {
        Printer { sig }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.w_term(&mut s, t).unwrap();
        s
    }

    pub fn formula(&self, f: &Formula) -> String {
        let mut s = String::new();
        self.w_formula(&mut s, f).unwrap();
        s
    }

    pub fn pred(&self, p: &Pred) -> String {
        let mut s = String::new();
        self.w_pred(&mut s, p).unwrap();
        s
    }

    pub fn op(&self, op: &Operator) -> String {
        let mut s = String::new();
        self.w_op(&mut s, op).unwrap();
        s
    }

    fn w_var(&self, w: &mut impl Write, x: &Var) -> fmt::Result {
        match self.sig.and_then(|s| s.default_sort()) {
            Some(d) if *d != x.sort => write!(w, "({} {})", x.name, x.sort),
            _ => w.write_str(&x.name),
        }
    }

    fn w_vars(&self, w: &mut impl Write, xs: &[Var]) -> fmt::Result {
        w.write_char('(')?;
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                w.write_char(' ')?;
            }
            self.w_var(w, x)?;
        }
        w.write_char(')')
    }

    pub fn w_term(&self, w: &mut impl Write, t: &Term) -> fmt::Result {
        match t {
            Term::Var(v) => w.write_str(&v.name),
            Term::App(f, args) if args.is_empty() => w.write_str(f),
            Term::App(f, args) => {
                write!(w, "({f}")?;
                for a in args {
                    w.write_char(' ')?;
                    self.w_term(w, a)?;
                }
                w.write_char(')')
            }
        }
    }

    pub fn w_formula(&self, w: &mut impl Write, f: &Formula) -> fmt::Result {
        if f.is_falsum() {
            return w.write_str("false");
        }
        match f {
            Formula::Eq(s, t) => {
                w.write_str("(= ")?;
                self.w_term(w, s)?;
                w.write_char(' ')?;
                self.w_term(w, t)?;
                w.write_char(')')
            }
            Formula::App(p, ts) => {
                w.write_char('(')?;
                self.w_pred(w, p)?;
                for t in ts {
                    w.write_char(' ')?;
                    self.w_term(w, t)?;
                }
                w.write_char(')')
            }
            Formula::Imp(a, b) if b.is_falsum() => {
                if let Formula::Eq(s, t) = &**a {
                    w.write_str("(neq ")?;
                    self.w_term(w, s)?;
                    w.write_char(' ')?;
                    self.w_term(w, t)?;
                    return w.write_char(')');
                }
                w.write_str("(not ")?;
                self.w_formula(w, a)?;
                w.write_char(')')
            }
            Formula::And(..) | Formula::Or(..) | Formula::Imp(..) => {
                let (kw, parts) = spine(f);
                write!(w, "({kw}")?;
                for p in parts {
                    w.write_char(' ')?;
                    self.w_formula(w, p)?;
                }
                w.write_char(')')
            }
            Formula::All(..) | Formula::Ex(..) => {
                let all = matches!(f, Formula::All(..));
                let mut xs = Vec::new();
                let mut cur = f;
                loop {
                    match (all, cur) {
                        (true, Formula::All(x, b)) | (false, Formula::Ex(x, b)) => {
                            xs.push(x.clone());
                            cur = b;
                        }
                        _ => break,
                    }
                }
                w.write_str(if all { "(all " } else { "(ex " })?;
                self.w_vars(w, &xs)?;
                w.write_char(' ')?;
                self.w_formula(w, cur)?;
                w.write_char(')')
            }
        }
    }

    pub fn w_pred(&self, w: &mut impl Write, p: &Pred) -> fmt::Result {
        if let Some(sig) = self.sig {
            if matches!(p, Pred::Abst(..) | Pred::Mu(_) | Pred::Nu(_)) {
                if let Some((n, _)) = sig.defs.iter().find(|(_, d)| alpha_eq_pred(d, p)) {
                    return w.write_str(n);
                }
            }
        }
        match p {
            Pred::Var(s) | Pred::Const(s) => w.write_str(&s.name),
            Pred::Abst(xs, b) => {
                w.write_str("(lambda ")?;
                self.w_vars(w, xs)?;
                w.write_char(' ')?;
                self.w_formula(w, b)?;
                w.write_char(')')
            }
            Pred::Mu(op) => {
                w.write_str("(mu ")?;
                self.w_op_inner(w, op)?;
                w.write_char(')')
            }
            Pred::Nu(op) => {
                w.write_str("(nu ")?;
                self.w_op_inner(w, op)?;
                w.write_char(')')
            }
        }
    }

    fn w_op_inner(&self, w: &mut impl Write, op: &Operator) -> fmt::Result {
        write!(w, "{} ", op.var.name)?;
        self.w_vars(w, &op.params)?;
        w.write_char(' ')?;
        self.w_formula(w, &op.body)
    }

    /// `(op X (x̄) A)`.
    pub fn w_op(&self, w: &mut impl Write, op: &Operator) -> fmt::Result {
        w.write_str("(op ")?;
        self.w_op_inner(w, op)?;
        w.write_char(')')
    }
}

fn spine(f: &Formula) -> (&'static str, Vec<&Formula>) {
    let kw = match f {
        Formula::And(..) => "and",
        Formula::Or(..) => "or",
        _ => "imp",
    };
    let mut parts = Vec::new();
    let mut cur = f;
    loop {
        match (kw, cur) {
            ("and", Formula::And(a, b)) | ("or", Formula::Or(a, b)) => {
                parts.push(&**a);
                cur = b;
            }
            ("imp", Formula::Imp(a, b)) if !b.is_falsum() => {
                parts.push(&**a);
                cur = b;
            }
            _ => break,
        }
    }
    parts.push(cur);
    (kw, parts)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::new(None).w_term(f, self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::new(None).w_formula(f, self)
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::new(None).w_pred(f, self)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer::new(None).w_op(f, self)
    }
}
