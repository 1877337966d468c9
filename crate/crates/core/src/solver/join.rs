//! Rule instance enumeration against a set of ground atoms. Shared by both
//! solve modes and by proof enumeration.

use std::collections::BTreeMap;

use crate::kernel::{unify_into, Atom, Rule, SideCondition, Substitution, Term};

use super::SolveError;

/// Ground atoms indexed by predicate and, secondarily, by the ground value
/// at each argument position. The secondary index keeps joins from scanning
/// whole predicates once one argument is already bound.
#[derive(Default)]
pub struct Index {
    by_pred: BTreeMap<(String, usize), Vec<Atom>>,
    by_arg: BTreeMap<(String, usize, usize, Term), Vec<Atom>>,
}

impl Index {
    pub fn new() -> Index {
        Index::default()
    }

    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Index {
        let mut ix = Index::new();
        for a in atoms {
            ix.add(a);
        }
        ix
    }

    pub fn add(&mut self, atom: &Atom) {
        let key = atom.key();
        self.by_pred.entry(key.clone()).or_default().push(atom.clone());
        for (i, arg) in atom.args.iter().enumerate() {
            self.by_arg
                .entry((key.0.clone(), key.1, i, arg.clone()))
                .or_default()
                .push(atom.clone());
        }
    }

    /// Smallest bucket that can contain matches for `pattern`.
    fn candidates(&self, pattern: &Atom) -> &[Atom] {
        let key = pattern.key();
        let mut best: Option<&Vec<Atom>> = None;
        for (i, arg) in pattern.args.iter().enumerate() {
            if arg.is_ground() {
                match self.by_arg.get(&(key.0.clone(), key.1, i, arg.clone())) {
                    Some(v) => {
                        if best.is_none_or(|b| v.len() < b.len()) {
                            best = Some(v);
                        }
                    }
                    None => return &[],
                }
            }
        }
        match best {
            Some(v) => v,
            None => self.by_pred.get(&key).map(Vec::as_slice).unwrap_or(&[]),
        }
    }
}

/// A rule reshaped for matching: body atoms followed by guard atoms, with
/// the equality/disequality conditions kept separately. Guards trigger and
/// match like body atoms but carry no weight.
pub struct Antecedents<'r> {
    pub rule: &'r Rule,
    pub atoms: Vec<&'r Atom>,
    /// how many leading `atoms` contribute weight (the body length)
    pub weighted: usize,
    pub relations: Vec<&'r SideCondition>,
}

pub fn antecedents(rule: &Rule) -> Antecedents<'_> {
    let mut atoms: Vec<&Atom> = rule.body.iter().collect();
    let weighted = atoms.len();
    let mut relations = Vec::new();
    for c in &rule.conditions {
        match c {
            SideCondition::Guard(g) => atoms.push(g),
            rel => relations.push(rel),
        }
    }
    Antecedents {
        rule,
        atoms,
        weighted,
        relations,
    }
}

/// One satisfying ground instance: `atoms` aligns with `Antecedents::atoms`.
pub struct Instance<'a> {
    pub atoms: &'a [Atom],
    pub subst: &'a Substitution,
}

/// Enumerate every instance of `ante` whose antecedents all occur in
/// `index` and whose conditions hold. With `pin`, the antecedent at that
/// position is fixed to the given atom instead of drawn from the index.
pub fn for_each_instance(
    ante: &Antecedents,
    index: &Index,
    pin: Option<(usize, &Atom)>,
    sink: &mut dyn FnMut(&Instance) -> Result<(), SolveError>,
) -> Result<(), SolveError> {
    let conds: Vec<SideCondition> = ante.relations.iter().map(|c| (*c).clone()).collect();
    let mut matched: Vec<Atom> = Vec::with_capacity(ante.atoms.len());
    step(
        ante,
        index,
        pin,
        Substitution::new(),
        conds,
        &mut matched,
        sink,
    )
}

fn step(
    ante: &Antecedents,
    index: &Index,
    pin: Option<(usize, &Atom)>,
    subst: Substitution,
    conds: Vec<SideCondition>,
    matched: &mut Vec<Atom>,
    sink: &mut dyn FnMut(&Instance) -> Result<(), SolveError>,
) -> Result<(), SolveError> {
    let k = matched.len();
    if k == ante.atoms.len() {
        if let Some(c) = conds.first() {
            return Err(SolveError::UnresolvedCondition {
                rule: ante.rule.to_string(),
                condition: c.to_string(),
            });
        }
        return sink(&Instance {
            atoms: matched,
            subst: &subst,
        });
    }
    let pattern = instantiate(ante.atoms[k], &subst);
    let Some(pattern) = pattern else {
        return Ok(()); // arithmetic over a non-integer binding: no instances
    };
    let pinned_slice;
    let candidates: &[Atom] = match pin {
        Some((pos, atom)) if pos == k => {
            pinned_slice = [atom.clone()];
            &pinned_slice
        }
        _ => index.candidates(&pattern),
    };
    for cand in candidates {
        let mut s2 = subst.clone();
        if !unify_into(&pattern, cand, &mut s2) {
            continue;
        }
        let mut c2 = conds.clone();
        if !settle_conditions(&mut c2, &mut s2) {
            continue;
        }
        matched.push(cand.clone());
        step(ante, index, pin, s2, c2, matched, sink)?;
        matched.pop();
    }
    Ok(())
}

/// Apply what is bound; leave the rest symbolic. `None` when a binding
/// makes an arithmetic term ill-typed, which no candidate can satisfy.
fn instantiate(atom: &Atom, subst: &Substitution) -> Option<Atom> {
    let mut args = Vec::with_capacity(atom.args.len());
    for t in &atom.args {
        args.push(inst_term(t, subst)?);
    }
    Some(Atom::new(&atom.predicate, args))
}

fn inst_term(t: &Term, subst: &Substitution) -> Option<Term> {
    Some(match t {
        Term::Var(v) => match subst.get(v) {
            Some(b) => b.clone(),
            None => t.clone(),
        },
        Term::Arith(v, k) => match subst.get(v) {
            Some(Term::Int(n)) => Term::Int(n + k),
            Some(_) => return None,
            None => t.clone(),
        },
        Term::Cons(h, tail) => Term::cons(inst_term(h, subst)?, inst_term(tail, subst)?),
        other => other.clone(),
    })
}

/// Discharge every condition the current bindings decide; equalities with a
/// ground side may bind a variable (or an offset's base). False conditions
/// kill the match (returns false). Undecidable ones stay for later.
fn settle_conditions(conds: &mut Vec<SideCondition>, subst: &mut Substitution) -> bool {
    loop {
        let mut progressed = false;
        let mut i = 0;
        while i < conds.len() {
            let decided = match &conds[i] {
                SideCondition::Eq(a, b) => {
                    let (Some(a), Some(b)) = (inst_term(a, subst), inst_term(b, subst)) else {
                        return false;
                    };
                    match (a.is_ground(), b.is_ground()) {
                        (true, true) => {
                            if a == b {
                                Some(true)
                            } else {
                                return false;
                            }
                        }
                        (true, false) => match bind_side(&b, &a, subst) {
                            Bind::Bound => Some(true),
                            Bind::Impossible => return false,
                            Bind::NotYet => None,
                        },
                        (false, true) => match bind_side(&a, &b, subst) {
                            Bind::Bound => Some(true),
                            Bind::Impossible => return false,
                            Bind::NotYet => None,
                        },
                        (false, false) => None,
                    }
                }
                SideCondition::Neq(a, b) => {
                    let (Some(a), Some(b)) = (inst_term(a, subst), inst_term(b, subst)) else {
                        return false;
                    };
                    if a.is_ground() && b.is_ground() {
                        if a != b {
                            Some(true)
                        } else {
                            return false;
                        }
                    } else {
                        None
                    }
                }
                SideCondition::Guard(_) => unreachable!("guards are antecedents"),
            };
            if decided.is_some() {
                conds.remove(i);
                progressed = true;
            } else {
                i += 1;
            }
        }
        if !progressed {
            return true;
        }
    }
}

enum Bind {
    Bound,
    Impossible,
    NotYet,
}

/// Try to bind the open side of an equality to a ground value.
fn bind_side(open: &Term, ground: &Term, subst: &mut Substitution) -> Bind {
    match open {
        Term::Var(v) => {
            subst.insert(v.clone(), ground.clone());
            Bind::Bound
        }
        Term::Arith(v, k) => match ground {
            Term::Int(n) => {
                subst.insert(v.clone(), Term::Int(n - k));
                Bind::Bound
            }
            _ => Bind::Impossible,
        },
        _ => Bind::NotYet,
    }
}
