//! Fixpoint by repeated full recomputation: each sweep rebuilds the chart
//! from axioms plus every rule firing over the previous sweep's chart.
//! Order-independent by construction, and monotone wherever the semiring
//! is, at the price of redoing settled work each round.

use std::collections::BTreeMap;

use crate::kernel::{substitute, Atom, Program};
use crate::semiring::{Semiring, Value};

use super::join::{antecedents, for_each_instance, Antecedents, Index};
use super::{Chart, SolveError, SolveMode, SolveOptions};

pub(super) fn solve(
    program: &Program,
    semiring: &'static Semiring,
    axioms: &BTreeMap<Atom, Value>,
    options: &SolveOptions,
) -> Result<Chart, SolveError> {
    let antes: Vec<Antecedents> = program.rules.iter().map(antecedents).collect();
    let mut old: BTreeMap<Atom, Value> = BTreeMap::new();
    let mut residual = f64::INFINITY;
    for sweep in 1..=options.max_iterations {
        let new = sweep_once(semiring, &antes, axioms, &old, sweep)?;
        residual = max_change(semiring, &old, &new);
        old = new;
        if residual <= options.tolerance {
            return Ok(Chart {
                semiring,
                entries: old,
                mode: SolveMode::Iterate,
                iterations: sweep,
                residual,
            });
        }
    }
    Err(SolveError::Diverged {
        iterations: options.max_iterations,
        residual,
    })
}

fn sweep_once(
    semiring: &'static Semiring,
    antes: &[Antecedents],
    axioms: &BTreeMap<Atom, Value>,
    old: &BTreeMap<Atom, Value>,
    sweep: usize,
) -> Result<BTreeMap<Atom, Value>, SolveError> {
    // In a summing semiring an infinity born of finite operands is float
    // overflow, which only a divergent sum can reach; an infinity already
    // present (from an axiom) just propagates. Selective semirings instead
    // saturate harmlessly, so they are left alone.
    let watch_overflow = !semiring.monotone_superior;
    let overflowed = || SolveError::Diverged {
        iterations: sweep,
        residual: f64::INFINITY,
    };
    let index = Index::from_atoms(old.keys());
    let mut next = axioms.clone();
    for ante in antes {
        for_each_instance(ante, &index, None, &mut |inst| {
            let mut value = semiring.one();
            for atom in &inst.atoms[..ante.weighted] {
                let factor = &old[atom];
                let grew = semiring.times(&value, factor)?;
                if watch_overflow && !finite(&grew) && finite(&value) && finite(factor) {
                    return Err(overflowed());
                }
                value = grew;
            }
            if semiring.is_zero(&value) {
                return Ok(());
            }
            let head = substitute(&ante.rule.head, inst.subst)?;
            debug_assert!(head.is_ground(), "range restriction left {head} open");
            let total = match next.get(&head) {
                Some(acc) => {
                    let sum = semiring.plus(acc, &value)?;
                    if watch_overflow && !finite(&sum) && finite(acc) && finite(&value) {
                        return Err(overflowed());
                    }
                    sum
                }
                None => value,
            };
            next.insert(head, total);
            Ok(())
        })?;
    }
    next.retain(|_, v| !semiring.is_zero(v));
    Ok(next)
}

fn finite(v: &Value) -> bool {
    match v {
        Value::Bool(_) => true,
        Value::Real(r) => r.is_finite(),
        Value::Triple(x, y, z) => x.is_finite() && y.is_finite() && z.is_finite(),
    }
}

/// Largest componentwise move between consecutive sweeps, over the union
/// of their keys; a vanished entry counts as a move to 0̄.
fn max_change(
    semiring: &Semiring,
    old: &BTreeMap<Atom, Value>,
    new: &BTreeMap<Atom, Value>,
) -> f64 {
    let mut worst = 0.0_f64;
    for (atom, value) in new {
        worst = worst.max(semiring.delta(old.get(atom), value));
    }
    for (atom, value) in old {
        if !new.contains_key(atom) {
            worst = worst.max(semiring.delta(None, value));
        }
    }
    worst
}
