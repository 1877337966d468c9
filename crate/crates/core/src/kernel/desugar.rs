//! Rewrites arithmetic sugar into plain variables plus equality
//! conditions, so rule heads are arithmetic-free and body matching never
//! has to invert an offset twice.

use std::collections::BTreeSet;

use super::{Atom, Program, Rule, SideCondition, Term};

/// `c(X, I-1, I) += ...` becomes `c(X, I0, I) += ... if I0 = I - 1`, and a
/// body occurrence `path(P, I-1)` becomes `path(P, I0)` with `I = I0 + 1`.
/// Ground instances are unchanged; only the bookkeeping moves.
pub fn desugar_arithmetic(program: &Program) -> Program {
    let mut out = program.clone();
    out.rules = program.rules.iter().map(desugar_rule).collect();
    out
}

fn desugar_rule(rule: &Rule) -> Rule {
    let mut used = rule.vars();
    let mut added = Vec::new();

    let head = Atom {
        predicate: rule.head.predicate.clone(),
        args: rule
            .head
            .args
            .iter()
            .map(|t| strip_arith(t, &mut used, &mut added, true))
            .collect(),
    };
    let body = rule
        .body
        .iter()
        .map(|b| Atom {
            predicate: b.predicate.clone(),
            args: b
                .args
                .iter()
                .map(|t| strip_arith(t, &mut used, &mut added, false))
                .collect(),
        })
        .collect();

    let mut conditions = rule.conditions.clone();
    conditions.extend(added);
    Rule {
        head,
        body,
        conditions,
        origin: rule.origin.clone(),
        product: rule.product.clone(),
        span: rule.span,
    }
}

fn strip_arith(
    term: &Term,
    used: &mut BTreeSet<String>,
    added: &mut Vec<SideCondition>,
    in_head: bool,
) -> Term {
    match term {
        Term::Arith(v, k) => {
            let fresh = fresh_name(v, used);
            if in_head {
                // head slot u with u = v + k
                added.push(SideCondition::Eq(Term::var(&fresh), Term::Arith(v.clone(), *k)));
            } else {
                // body slot u matches anything; v = u - k recovers the base
                added.push(SideCondition::Eq(Term::var(v), Term::Arith(fresh.clone(), -k)));
            }
            Term::var(fresh)
        }
        Term::Cons(h, t) => Term::cons(
            strip_arith(h, used, added, in_head),
            strip_arith(t, used, added, in_head),
        ),
        other => other.clone(),
    }
}

fn fresh_name(base: &str, used: &mut BTreeSet<String>) -> String {
    for n in 0.. {
        let cand = format!("{}{}", base, n);
        if !used.contains(&cand) {
            used.insert(cand.clone());
            return cand;
        }
    }
    unreachable!()
}
