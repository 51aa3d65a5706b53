use alloc::vec::Vec;

use super::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Non-computational: no disjunction and no free predicate variables.
    Nc,
    /// Harrop but not nc.
    Harrop,
    NonHarrop,
}

pub fn classify(f: &Formula) -> Classification {
    if is_nc(f) {
        Classification::Nc
    } else if is_harrop(f, &[]) {
        Classification::Harrop
    } else {
        Classification::NonHarrop
    }
}

fn has_or(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => false,
        Formula::App(p, _) => pred_has_or(p),
        Formula::Or(..) => true,
        Formula::And(a, b) | Formula::Imp(a, b) => has_or(a) || has_or(b),
        Formula::All(_, b) | Formula::Ex(_, b) => has_or(b),
    }
}

fn pred_has_or(p: &Pred) -> bool {
    match p {
        Pred::Var(_) | Pred::Const(_) => false,
        Pred::Abst(_, b) => has_or(b),
        Pred::Mu(op) | Pred::Nu(op) => has_or(&op.body),
    }
}

pub fn is_nc(f: &Formula) -> bool {
    !has_or(f) && f.free_pvars().is_empty()
}

pub fn is_nc_pred(p: &Pred) -> bool {
    !pred_has_or(p) && p.free_pvars().is_empty()
}

/// Harrop relative to the predicate variables in `hat`, which are treated as
/// Harrop (the `X̂` of the `X`-Harrop definition).
pub fn is_harrop(f: &Formula, hat: &[Name]) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::App(p, _) => is_harrop_pred(p, hat),
        Formula::And(a, b) => is_harrop(a, hat) && is_harrop(b, hat),
        Formula::Or(..) => false,
        Formula::Imp(_, b) => is_harrop(b, hat),
        Formula::All(_, b) | Formula::Ex(_, b) => is_harrop(b, hat),
    }
}

pub fn is_harrop_pred(p: &Pred, hat: &[Name]) -> bool {
    match p {
        Pred::Var(s) => hat.contains(&s.name),
        Pred::Const(_) => true,
        Pred::Abst(_, b) => is_harrop(b, hat),
        Pred::Mu(op) | Pred::Nu(op) => {
            let mut h: Vec<Name> = hat.to_vec();
            h.push(op.var.name.clone());
            is_harrop(&op.body, &h)
        }
    }
}

pub fn is_harrop_op(op: &Operator) -> bool {
    is_harrop_pred(&Pred::Mu(alloc::rc::Rc::new(op.clone())), &[])
}

/// No free occurrence of `x` inside the premise of an implication.
pub fn strictly_positive(f: &Formula, x: &str) -> bool {
    sp(f, x, false)
}

fn sp(f: &Formula, x: &str, neg: bool) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::App(p, _) => sp_pred(p, x, neg),
        Formula::And(a, b) | Formula::Or(a, b) => sp(a, x, neg) && sp(b, x, neg),
        Formula::Imp(a, b) => sp(a, x, true) && sp(b, x, neg),
        Formula::All(_, b) | Formula::Ex(_, b) => sp(b, x, neg),
    }
}

fn sp_pred(p: &Pred, x: &str, neg: bool) -> bool {
    match p {
        Pred::Var(s) => !(neg && &*s.name == x),
        Pred::Const(_) => true,
        Pred::Abst(_, b) => sp(b, x, neg),
        Pred::Mu(op) | Pred::Nu(op) => &*op.var.name == x || sp(&op.body, x, neg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::rc::Rc;
    use alloc::vec;

    #[test]
    fn falsum_is_nc() {
        assert_eq!(classify(&Formula::falsum()), Classification::Nc);
        assert!(is_nc(&Formula::not(Formula::falsum())));
    }

    #[test]
    fn disjunction_is_not_harrop() {
        let e = Formula::eq(Term::constant("0"), Term::constant("0"));
        let d = Formula::or(e.clone(), e.clone());
        assert_eq!(classify(&d), Classification::NonHarrop);
        assert_eq!(classify(&Formula::imp(d, e)), Classification::Harrop);
    }

    #[test]
    fn positivity() {
        let x = PredSym::new("X", &[]);
        let a = Formula::App(Pred::Var(x), vec![]);
        assert!(strictly_positive(&a, "X"));
        assert!(!strictly_positive(&Formula::not(a.clone()), "X"));
        let inner = Operator { var: PredSym::new("X", &[]), params: vec![], body: Formula::not(a.clone()) };
        let shadow = Formula::not(Formula::App(Pred::Mu(Rc::new(inner)), vec![]));
        assert!(strictly_positive(&shadow, "X"));
    }
}
