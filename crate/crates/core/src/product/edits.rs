//! Surgical passes applied to product programs to recover the classic
//! coupled algorithms: drop rules, constrain variables, collapse argument
//! positions, re-open a predicate as an input, add structural guards.

use std::collections::BTreeSet;

use crate::kernel::{Atom, Program, Rule, SideCondition, Term};

use super::ProductError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSelector {
    Ids(BTreeSet<usize>),
    HeadPredicate(String, usize),
}

/// One step of an edit pipeline. Rule ids refer to positions in the program
/// the pass receives, i.e. after any earlier passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditPass {
    DropRules(RuleSelector),
    Constrain {
        rule: usize,
        equalities: Vec<(String, String)>,
    },
    Collapse {
        predicate: String,
        arity: usize,
        positions: Vec<(usize, usize)>,
    },
    Generalize {
        predicate: String,
        arity: usize,
    },
    Fix {
        predicate: String,
        arity: usize,
        witness: String,
        positions: Vec<usize>,
    },
}

pub fn apply_edits(program: &Program, passes: &[EditPass]) -> Result<Program, ProductError> {
    let mut prog = program.clone();
    for pass in passes {
        prog = match pass {
            EditPass::DropRules(RuleSelector::Ids(ids)) => drop_rules(&prog, ids)?,
            EditPass::DropRules(RuleSelector::HeadPredicate(p, a)) => {
                drop_rules_by_head(&prog, p, *a)?
            }
            EditPass::Constrain { rule, equalities } => {
                add_equality_constraint(&prog, *rule, equalities)?
            }
            EditPass::Collapse {
                predicate,
                arity,
                positions,
            } => collapse_arguments(&prog, predicate, *arity, positions)?,
            EditPass::Generalize { predicate, arity } => {
                generalize_axioms(&prog, predicate, *arity)?
            }
            EditPass::Fix {
                predicate,
                arity,
                witness,
                positions,
            } => fix_structure(&prog, predicate, *arity, witness, positions)?,
        };
    }
    Ok(prog)
}

pub fn drop_rules(program: &Program, ids: &BTreeSet<usize>) -> Result<Program, ProductError> {
    if let Some(&bad) = ids.iter().find(|&&i| i >= program.rules.len()) {
        return Err(ProductError::UnknownRule(bad));
    }
    let mut out = program.clone();
    let mut idx = 0;
    out.rules.retain(|_| {
        let keep = !ids.contains(&idx);
        idx += 1;
        keep
    });
    Ok(out)
}

pub fn drop_rules_by_head(
    program: &Program,
    predicate: &str,
    arity: usize,
) -> Result<Program, ProductError> {
    let key = (predicate.to_string(), arity);
    if !program.rules.iter().any(|r| r.head.key() == key) {
        return Err(ProductError::NoSuchPredicate(key.0, key.1));
    }
    let mut out = program.clone();
    out.rules.retain(|r| r.head.key() != key);
    Ok(out)
}

pub fn add_equality_constraint(
    program: &Program,
    rule: usize,
    equalities: &[(String, String)],
) -> Result<Program, ProductError> {
    let mut out = program.clone();
    let r = out
        .rules
        .get_mut(rule)
        .ok_or(ProductError::UnknownRule(rule))?;
    let vars = r.vars();
    for (a, b) in equalities {
        for v in [a, b] {
            if !vars.contains(v) {
                return Err(ProductError::UnknownVariable {
                    rule,
                    var: v.clone(),
                });
            }
        }
        r.conditions
            .push(SideCondition::Eq(Term::var(a), Term::var(b)));
    }
    Ok(out)
}

/// Merge argument positions of one predicate. Each `(keep, drop)` pair
/// requires every occurrence to already force the two positions equal,
/// either syntactically or through an explicit equality condition; the
/// pass substitutes accordingly and then erases the dropped positions.
pub fn collapse_arguments(
    program: &Program,
    predicate: &str,
    arity: usize,
    pairs: &[(usize, usize)],
) -> Result<Program, ProductError> {
    let key = (predicate.to_string(), arity);
    if !program.predicates().contains(&key) {
        return Err(ProductError::NoSuchPredicate(key.0, key.1));
    }
    let keeps: BTreeSet<usize> = pairs.iter().map(|(i, _)| *i).collect();
    let drops: BTreeSet<usize> = pairs.iter().map(|(_, j)| *j).collect();
    let shape_ok = !pairs.is_empty()
        && pairs.iter().all(|(i, j)| *i < arity && *j < arity && i != j)
        && drops.len() == pairs.len()
        && keeps.is_disjoint(&drops);
    if !shape_ok {
        return Err(ProductError::CollapsePositions {
            pred: key.0,
            arity,
        });
    }
    if let Some(meta) = &program.product {
        for (name, pp) in &meta.products {
            if *name != key.0 && (pp.left == key || pp.right == key) {
                return Err(ProductError::CollapseFactor(key.0, key.1));
            }
        }
    }

    let mut out = program.clone();
    for (idx, rule) in out.rules.iter_mut().enumerate() {
        collapse_rule(idx, rule, &key, pairs)?;
        erase_positions(rule, &key, &drops);
    }
    for ax in &mut out.axioms {
        if ax.atom.key() != key {
            continue;
        }
        for (i, j) in pairs {
            if ax.atom.args[*i] != ax.atom.args[*j] {
                return Err(ProductError::CollapseUnforcedFact {
                    atom: ax.atom.text(),
                    left: ax.atom.args[*i].to_string(),
                    right: ax.atom.args[*j].to_string(),
                });
            }
        }
        remove_args(&mut ax.atom, &drops);
    }

    let new_arity = arity - drops.len();
    if out.inputs.remove(&key) {
        out.inputs.insert((key.0.clone(), new_arity));
    }
    for decl in &mut out.pairs {
        if decl.left == key {
            decl.left.1 = new_arity;
        }
        if decl.right == key {
            decl.right.1 = new_arity;
        }
    }
    if let Some(meta) = &mut out.product {
        if let Some(pp) = meta.products.get_mut(&key.0) {
            if pp.supplies.len() == arity {
                for (i, j) in pairs {
                    let extra = pp.supplies[*j].clone();
                    pp.supplies[*i].extend(extra);
                }
                for j in drops.iter().rev() {
                    pp.supplies.remove(*j);
                }
                for s in &mut pp.supplies {
                    s.sort();
                    s.dedup();
                }
            }
        }
        for set in [&mut meta.left_predicates, &mut meta.right_predicates] {
            if set.remove(&key) {
                set.insert((key.0.clone(), new_arity));
            }
        }
    }
    Ok(out)
}

fn collapse_rule(
    idx: usize,
    rule: &mut Rule,
    key: &(String, usize),
    pairs: &[(usize, usize)],
) -> Result<(), ProductError> {
    loop {
        let Some((ai, aj)) = next_mismatch(rule, key, pairs) else {
            break;
        };
        let unforced = |reason: &str| ProductError::CollapseUnforced {
            rule: idx,
            left: ai.to_string(),
            right: aj.to_string(),
            reason: reason.to_string(),
        };
        if !has_equality(rule, &ai, &aj) {
            return Err(unforced("no equality condition links them"));
        }
        // replace the dropped side's variable where possible, so the kept
        // position keeps its name
        let (var, rep) = match (&ai, &aj) {
            (_, Term::Var(v)) => (v.clone(), ai.clone()),
            (Term::Var(v), _) => (v.clone(), aj.clone()),
            _ => return Err(unforced("neither side is a plain variable")),
        };
        substitute_everywhere(rule, &var, &rep).map_err(|r| unforced(&r))?;
    }
    rule.conditions
        .retain(|c| !matches!(c, SideCondition::Eq(a, b) if a == b));
    Ok(())
}

fn next_mismatch(
    rule: &Rule,
    key: &(String, usize),
    pairs: &[(usize, usize)],
) -> Option<(Term, Term)> {
    let mut found = None;
    for_each_atom(rule, &mut |atom| {
        if found.is_some() || atom.key() != *key {
            return;
        }
        for (i, j) in pairs {
            if atom.args[*i] != atom.args[*j] {
                found = Some((atom.args[*i].clone(), atom.args[*j].clone()));
                return;
            }
        }
    });
    found
}

fn has_equality(rule: &Rule, a: &Term, b: &Term) -> bool {
    rule.conditions.iter().any(|c| match c {
        SideCondition::Eq(x, y) => (x == a && y == b) || (x == b && y == a),
        _ => false,
    })
}

fn for_each_atom(rule: &Rule, f: &mut dyn FnMut(&Atom)) {
    f(&rule.head);
    for b in &rule.body {
        f(b);
    }
    for c in &rule.conditions {
        if let SideCondition::Guard(g) = c {
            f(g);
        }
    }
}

fn substitute_everywhere(rule: &mut Rule, var: &str, rep: &Term) -> Result<(), String> {
    let fix_atom = |atom: &mut Atom| -> Result<(), String> {
        for arg in &mut atom.args {
            *arg = subst_term(arg, var, rep)?;
        }
        Ok(())
    };
    fix_atom(&mut rule.head)?;
    for b in &mut rule.body {
        fix_atom(b)?;
    }
    for c in &mut rule.conditions {
        match c {
            SideCondition::Eq(a, b) | SideCondition::Neq(a, b) => {
                *a = subst_term(a, var, rep)?;
                *b = subst_term(b, var, rep)?;
            }
            SideCondition::Guard(g) => fix_atom(g)?,
        }
    }
    Ok(())
}

fn subst_term(t: &Term, var: &str, rep: &Term) -> Result<Term, String> {
    Ok(match t {
        Term::Var(v) if v == var => rep.clone(),
        Term::Arith(v, k) if v == var => match rep {
            Term::Var(u) => Term::Arith(u.clone(), *k),
            Term::Int(n) => Term::Int(n + k),
            Term::Arith(u, l) => Term::Arith(u.clone(), k + l),
            _ => return Err("arithmetic over a non-integer".to_string()),
        },
        Term::Cons(h, tail) => Term::cons(subst_term(h, var, rep)?, subst_term(tail, var, rep)?),
        other => other.clone(),
    })
}

fn erase_positions(rule: &mut Rule, key: &(String, usize), drops: &BTreeSet<usize>) {
    let fix = |atom: &mut Atom| {
        if atom.key() == *key {
            remove_args(atom, drops);
        }
    };
    fix(&mut rule.head);
    for b in &mut rule.body {
        fix(b);
    }
    for c in &mut rule.conditions {
        if let SideCondition::Guard(g) = c {
            fix(g);
        }
    }
}

fn remove_args(atom: &mut Atom, drops: &BTreeSet<usize>) {
    let mut i = 0;
    atom.args.retain(|_| {
        let keep = !drops.contains(&i);
        i += 1;
        keep
    });
}

/// Replace the single bridging rule of `predicate` by an input declaration,
/// so its pairs come from facts instead of the factor product.
pub fn generalize_axioms(
    program: &Program,
    predicate: &str,
    arity: usize,
) -> Result<Program, ProductError> {
    let key = (predicate.to_string(), arity);
    let defining: Vec<usize> = program
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.head.key() == key)
        .map(|(i, _)| i)
        .collect();
    let &[only] = defining.as_slice() else {
        return Err(ProductError::NotBridging(key.0, key.1));
    };
    let rule = &program.rules[only];
    if !is_bridging_shape(rule) {
        return Err(ProductError::NotBridging(key.0, key.1));
    }
    let mut out = program.clone();
    out.rules.remove(only);
    out.inputs.insert(key);
    Ok(out)
}

fn is_bridging_shape(rule: &Rule) -> bool {
    if rule.body.len() != 2 || !rule.conditions.is_empty() {
        return false;
    }
    let mut expect = rule.body[0].args.clone();
    expect.extend(rule.body[1].args.iter().cloned());
    if rule.head.args != expect {
        return false;
    }
    let all_vars = expect.iter().all(|t| matches!(t, Term::Var(_)));
    let distinct: BTreeSet<&Term> = expect.iter().collect();
    all_vars && distinct.len() == expect.len()
}

/// Guard every rule concluding `predicate` with a witness over the selected
/// head argument positions, so derivations only exist where the witness
/// relation has a fact.
pub fn fix_structure(
    program: &Program,
    predicate: &str,
    arity: usize,
    witness: &str,
    positions: &[usize],
) -> Result<Program, ProductError> {
    let key = (predicate.to_string(), arity);
    if !program.predicates().contains(&key) {
        return Err(ProductError::NoSuchPredicate(key.0, key.1));
    }
    if let Some(&bad) = positions.iter().find(|&&p| p >= arity) {
        return Err(ProductError::PositionOutOfRange(key.0, key.1, bad));
    }
    let wkey = (witness.to_string(), positions.len());
    if !program.inputs.contains(&wkey) {
        return Err(ProductError::WitnessNotInput(witness.to_string()));
    }
    let mut out = program.clone();
    for rule in &mut out.rules {
        if rule.head.key() != key {
            continue;
        }
        let args: Vec<Term> = positions.iter().map(|&p| rule.head.args[p].clone()).collect();
        rule.conditions
            .push(SideCondition::Guard(Atom::new(witness, args)));
    }
    Ok(out)
}
