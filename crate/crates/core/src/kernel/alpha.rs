//! Rule equality up to consistent variable renaming and antecedent order.

use std::collections::BTreeMap;

use super::{Atom, Rule, SideCondition, Term};

type VarMap = BTreeMap<String, String>;

/// True when some bijection on variable names maps `a` onto `b`, treating
/// the body and the condition list as multisets. Quadratic backtracking;
/// meant for the small rules the transformations emit.
pub fn alpha_equivalent(a: &Rule, b: &Rule) -> bool {
    if a.body.len() != b.body.len() || a.conditions.len() != b.conditions.len() {
        return false;
    }
    let mut map = VarMap::new();
    let mut rev = VarMap::new();
    if !atom_matches(&a.head, &b.head, &mut map, &mut rev) {
        return false;
    }
    let mut used = vec![false; b.body.len()];
    if !match_bodies(&a.body, &b.body, &mut used, 0, &mut map, &mut rev) {
        return false;
    }
    let mut cused = vec![false; b.conditions.len()];
    match_conditions(&a.conditions, &b.conditions, &mut cused, 0, &mut map, &mut rev)
}

fn match_bodies(
    a: &[Atom],
    b: &[Atom],
    used: &mut [bool],
    i: usize,
    map: &mut VarMap,
    rev: &mut VarMap,
) -> bool {
    if i == a.len() {
        return true;
    }
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        let (snap_m, snap_r) = (map.clone(), rev.clone());
        if atom_matches(&a[i], &b[j], map, rev) {
            used[j] = true;
            if match_bodies(a, b, used, i + 1, map, rev) {
                return true;
            }
            used[j] = false;
        }
        *map = snap_m;
        *rev = snap_r;
    }
    false
}

fn match_conditions(
    a: &[SideCondition],
    b: &[SideCondition],
    used: &mut [bool],
    i: usize,
    map: &mut VarMap,
    rev: &mut VarMap,
) -> bool {
    if i == a.len() {
        return true;
    }
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        let (snap_m, snap_r) = (map.clone(), rev.clone());
        if cond_matches(&a[i], &b[j], map, rev) {
            used[j] = true;
            if match_conditions(a, b, used, i + 1, map, rev) {
                return true;
            }
            used[j] = false;
        }
        *map = snap_m;
        *rev = snap_r;
    }
    false
}

fn cond_matches(a: &SideCondition, b: &SideCondition, map: &mut VarMap, rev: &mut VarMap) -> bool {
    match (a, b) {
        (SideCondition::Guard(x), SideCondition::Guard(y)) => atom_matches(x, y, map, rev),
        (SideCondition::Eq(a1, a2), SideCondition::Eq(b1, b2))
        | (SideCondition::Neq(a1, a2), SideCondition::Neq(b1, b2)) => {
            // either orientation, since both relations are symmetric
            let (snap_m, snap_r) = (map.clone(), rev.clone());
            if term_matches(a1, b1, map, rev) && term_matches(a2, b2, map, rev) {
                return true;
            }
            *map = snap_m;
            *rev = snap_r;
            term_matches(a1, b2, map, rev) && term_matches(a2, b1, map, rev)
        }
        _ => false,
    }
}

fn atom_matches(a: &Atom, b: &Atom, map: &mut VarMap, rev: &mut VarMap) -> bool {
    a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args
            .iter()
            .zip(&b.args)
            .all(|(x, y)| term_matches(x, y, map, rev))
}

fn var_matches(a: &str, b: &str, map: &mut VarMap, rev: &mut VarMap) -> bool {
    match (map.get(a), rev.get(b)) {
        (Some(m), _) => m == b,
        (None, Some(_)) => false,
        (None, None) => {
            map.insert(a.to_string(), b.to_string());
            rev.insert(b.to_string(), a.to_string());
            true
        }
    }
}

fn term_matches(a: &Term, b: &Term, map: &mut VarMap, rev: &mut VarMap) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => var_matches(x, y, map, rev),
        (Term::Arith(x, k), Term::Arith(y, l)) => k == l && var_matches(x, y, map, rev),
        (Term::Cons(h1, t1), Term::Cons(h2, t2)) => {
            term_matches(h1, h2, map, rev) && term_matches(t1, t2, map, rev)
        }
        _ => a == b,
    }
}
