//! Matching rule patterns against ground facts.

use thiserror::Error;

use super::{Atom, Substitution, Term};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("arithmetic term {var}{offset:+} applied to non-integer binding {bound}")]
    ArithNonInteger {
        var: String,
        offset: i64,
        bound: String,
    },
}

/// Matches `pattern` against the ground atom `fact`, extending `subst` in
/// place. Returns false (leaving `subst` in a partially extended state the
/// caller must discard) when they do not match.
///
/// An `Arith(v, k)` pattern matches the integer `n` by binding or checking
/// `v = n - k`, so matching stays total over sugared bodies.
pub fn unify_into(pattern: &Atom, fact: &Atom, subst: &mut Substitution) -> bool {
    if pattern.predicate != fact.predicate || pattern.args.len() != fact.args.len() {
        return false;
    }
    pattern
        .args
        .iter()
        .zip(&fact.args)
        .all(|(p, f)| unify_term(p, f, subst))
}

/// Like `unify_into` but starts from an empty substitution.
pub fn unify(pattern: &Atom, fact: &Atom) -> Option<Substitution> {
    let mut subst = Substitution::new();
    if unify_into(pattern, fact, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn bind_or_check(var: &str, value: Term, subst: &mut Substitution) -> bool {
    match subst.get(var) {
        Some(bound) => *bound == value,
        None => {
            subst.insert(var.to_string(), value);
            true
        }
    }
}

fn unify_term(pattern: &Term, fact: &Term, subst: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => bind_or_check(v, fact.clone(), subst),
        Term::Int(_) | Term::Sym(_) | Term::Nil => pattern == fact,
        Term::Cons(ph, pt) => match fact {
            Term::Cons(fh, ft) => unify_term(ph, fh, subst) && unify_term(pt, ft, subst),
            _ => false,
        },
        Term::Arith(v, k) => match fact {
            Term::Int(n) => bind_or_check(v, Term::Int(n - k), subst),
            _ => false,
        },
    }
}

/// Applies `subst` to every argument. Bound variables are replaced;
/// arithmetic terms whose base becomes an integer are evaluated; unbound
/// variables are left in place.
pub fn substitute(atom: &Atom, subst: &Substitution) -> Result<Atom, KernelError> {
    let mut args = Vec::with_capacity(atom.args.len());
    for t in &atom.args {
        args.push(substitute_term(t, subst)?);
    }
    Ok(Atom {
        predicate: atom.predicate.clone(),
        args,
    })
}

pub fn substitute_term(term: &Term, subst: &Substitution) -> Result<Term, KernelError> {
    Ok(match term {
        Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| term.clone()),
        Term::Arith(v, k) => match subst.get(v) {
            None => term.clone(),
            Some(Term::Int(n)) => Term::Int(n + k),
            Some(other) => {
                return Err(KernelError::ArithNonInteger {
                    var: v.clone(),
                    offset: *k,
                    bound: other.to_string(),
                })
            }
        },
        Term::Cons(h, t) => Term::cons(substitute_term(h, subst)?, substitute_term(t, subst)?),
        _ => term.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Atom;

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(p, args)
    }

    #[test]
    fn binds_variables_positionally() {
        let pat = atom("edge", vec![Term::var("P"), Term::var("Q")]);
        let fact = atom("edge", vec![Term::sym("a"), Term::sym("b")]);
        let s = unify(&pat, &fact).unwrap();
        assert_eq!(s["P"], Term::sym("a"));
        assert_eq!(s["Q"], Term::sym("b"));
    }

    #[test]
    fn repeated_variable_must_agree() {
        let pat = atom("edge", vec![Term::var("P"), Term::var("P")]);
        assert!(unify(&pat, &atom("edge", vec![Term::sym("a"), Term::sym("a")])).is_some());
        assert!(unify(&pat, &atom("edge", vec![Term::sym("a"), Term::sym("b")])).is_none());
    }

    #[test]
    fn arith_pattern_solves_for_base() {
        // path(Q, I-1) against path(b, 3) gives I = 4
        let pat = atom("path", vec![Term::var("Q"), Term::Arith("I".into(), -1)]);
        let fact = atom("path", vec![Term::sym("b"), Term::Int(3)]);
        let s = unify(&pat, &fact).unwrap();
        assert_eq!(s["Q"], Term::sym("b"));
        assert_eq!(s["I"], Term::Int(4));
    }

    #[test]
    fn arith_pattern_checks_bound_base() {
        let pat = atom(
            "p",
            vec![Term::var("I"), Term::Arith("I".into(), -1)],
        );
        assert!(unify(&pat, &atom("p", vec![Term::Int(4), Term::Int(3)])).is_some());
        assert!(unify(&pat, &atom("p", vec![Term::Int(4), Term::Int(2)])).is_none());
        // non-integer fact under an arith pattern never matches
        let pat2 = atom("p", vec![Term::Arith("I".into(), 1)]);
        assert!(unify(&pat2, &atom("p", vec![Term::sym("a")])).is_none());
    }

    #[test]
    fn list_patterns_destructure() {
        let pat = atom("phrase", vec![Term::cons(Term::var("E"), Term::var("Es"))]);
        let fact = atom("phrase", vec![Term::list([Term::sym("x"), Term::sym("y")])]);
        let s = unify(&pat, &fact).unwrap();
        assert_eq!(s["E"], Term::sym("x"));
        assert_eq!(s["Es"], Term::list([Term::sym("y")]));
        assert!(unify(&pat, &atom("phrase", vec![Term::Nil])).is_none());
    }

    #[test]
    fn mismatched_predicate_or_arity() {
        let pat = atom("p", vec![Term::var("X")]);
        assert!(unify(&pat, &atom("q", vec![Term::sym("a")])).is_none());
        assert!(unify(&pat, &atom("p", vec![])).is_none());
    }

    #[test]
    fn substitute_round_trips_match() {
        let pat = atom("path", vec![Term::var("Q"), Term::Arith("I".into(), -1)]);
        let fact = atom("path", vec![Term::sym("b"), Term::Int(3)]);
        let s = unify(&pat, &fact).unwrap();
        assert_eq!(substitute(&pat, &s).unwrap(), fact);
    }

    #[test]
    fn substitute_leaves_unbound_vars() {
        let at = atom("p", vec![Term::var("X"), Term::var("Y")]);
        let mut s = Substitution::new();
        s.insert("X".into(), Term::sym("a"));
        let out = substitute(&at, &s).unwrap();
        assert_eq!(out, atom("p", vec![Term::sym("a"), Term::var("Y")]));
    }

    #[test]
    fn substitute_rejects_non_integer_arith_base() {
        let at = atom("p", vec![Term::Arith("I".into(), 1)]);
        let mut s = Substitution::new();
        s.insert("I".into(), Term::sym("a"));
        assert!(substitute(&at, &s).is_err());
    }
}
