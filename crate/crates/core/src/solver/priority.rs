//! Best-first agenda. Sound only for semirings where a product can never
//! beat its factors and ⊕ keeps the better value: then the first time an
//! atom reaches the front of the queue its value is final, and every atom
//! settles exactly once, cycles included.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::kernel::{substitute, Atom, Program};
use crate::semiring::{Semiring, SemiringId, Value};

use super::join::{antecedents, for_each_instance, Antecedents, Index};
use super::{Chart, SolveError, SolveMode, SolveOptions};

struct Entry {
    key: f64,
    text: String,
    atom: Atom,
    value: Value,
}

impl Entry {
    fn new(semiring: &Semiring, atom: &Atom, value: &Value) -> Entry {
        let key = match (semiring.id, value) {
            (SemiringId::Boolean, _) => 1.0,
            (SemiringId::Viterbi, Value::Real(v)) => *v,
            // smaller cost is better
            (SemiringId::Tropical, Value::Real(v)) => -*v,
            _ => unreachable!("priority agenda on a summing semiring"),
        };
        Entry {
            key,
            text: atom.text(),
            atom: atom.clone(),
            value: value.clone(),
        }
    }
}

// max-heap: higher key first, then lexicographically earlier atom text
impl Ord for Entry {
    fn cmp(&self, other: &Entry) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.text.cmp(&self.text))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Entry) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Entry) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

pub(super) fn solve(
    program: &Program,
    semiring: &'static Semiring,
    axioms: &BTreeMap<Atom, Value>,
    options: &SolveOptions,
) -> Result<Chart, SolveError> {
    let antes: Vec<Antecedents> = program.rules.iter().map(antecedents).collect();
    let mut watchers: BTreeMap<(String, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (ri, ante) in antes.iter().enumerate() {
        for (pos, atom) in ante.atoms.iter().enumerate() {
            watchers.entry(atom.key()).or_default().push((ri, pos));
        }
    }

    let mut pending: BTreeMap<Atom, Value> = BTreeMap::new();
    let mut agenda: BinaryHeap<Entry> = BinaryHeap::new();
    for (atom, value) in axioms {
        pending.insert(atom.clone(), value.clone());
        agenda.push(Entry::new(semiring, atom, value));
    }

    // settle order doubles as the settled set; orders are unique
    let mut order: BTreeMap<Atom, usize> = BTreeMap::new();
    let mut chart: BTreeMap<Atom, Value> = BTreeMap::new();
    let mut index = Index::new();
    // finite programs settle at most one atom per derivable atom; only an
    // unbounded atom universe (arithmetic progressions) can exceed this
    let cap = axioms.len() + options.max_iterations;

    while let Some(entry) = agenda.pop() {
        if order.contains_key(&entry.atom) {
            continue;
        }
        if pending.get(&entry.atom) != Some(&entry.value) {
            continue; // superseded by a better accumulation
        }
        if order.len() >= cap {
            return Err(SolveError::Diverged {
                iterations: order.len(),
                residual: f64::INFINITY,
            });
        }
        let settled_at = order.len();
        order.insert(entry.atom.clone(), settled_at);
        chart.insert(entry.atom.clone(), entry.value.clone());
        index.add(&entry.atom);

        let Some(watching) = watchers.get(&entry.atom.key()) else {
            continue;
        };
        for &(ri, pos) in watching {
            let ante = &antes[ri];
            for_each_instance(ante, &index, Some((pos, &entry.atom)), &mut |inst| {
                // an instance fires once, when its last antecedent settles,
                // pinned at that atom's first occurrence
                if inst.atoms[..pos].iter().any(|a| *a == entry.atom) {
                    return Ok(());
                }
                let head = substitute(&ante.rule.head, inst.subst)?;
                debug_assert!(head.is_ground(), "range restriction left {head} open");
                if order.contains_key(&head) {
                    return Ok(()); // a later contribution cannot improve it
                }
                let mut value = semiring.one();
                for atom in &inst.atoms[..ante.weighted] {
                    value = semiring.times(&value, &chart[atom])?;
                }
                if semiring.is_zero(&value) {
                    return Ok(());
                }
                let total = match pending.get(&head) {
                    Some(acc) => semiring.plus(acc, &value)?,
                    None => value,
                };
                agenda.push(Entry::new(semiring, &head, &total));
                pending.insert(head, total);
                Ok(())
            })?;
        }
    }

    Ok(Chart {
        semiring,
        entries: chart,
        mode: SolveMode::Priority,
        iterations: order.len(),
        residual: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agenda_pops_best_key_then_earliest_text() {
        let mut heap = BinaryHeap::new();
        for (key, text) in [(0.5, "b"), (0.5, "a"), (0.9, "z")] {
            heap.push(Entry {
                key,
                text: text.into(),
                atom: Atom::new(text, vec![]),
                value: Value::Real(key),
            });
        }
        let popped: Vec<String> = std::iter::from_fn(|| heap.pop().map(|e| e.text)).collect();
        assert_eq!(popped, vec!["z", "a", "b"]);
    }
}
