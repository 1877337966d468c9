//! Forward-chaining evaluation of a program over its semiring.
//!
//! Two modes. Priority solving settles each atom once in best-first order
//! and is exact, but only where the semiring lets better antecedents only
//! improve conclusions. Iteration recomputes the whole chart from the
//! previous one until nothing moves by more than the tolerance.

mod iterate;
mod join;
mod priority;

pub use join::{antecedents, for_each_instance, Antecedents, Index, Instance};

use std::collections::BTreeMap;

use crate::kernel::{has_errors, validate, Atom, Diagnostic, KernelError, Program};
use crate::semiring::{Semiring, SemiringError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// priority where the semiring supports it, otherwise iterate
    Auto,
    Priority,
    Iterate,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: SolveMode,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            mode: SolveMode::Auto,
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

/// The least fixed point reached: every derivable atom with a nonzero
/// value, keyed for lookup. Zero-valued atoms are never stored.
#[derive(Debug)]
pub struct Chart {
    pub semiring: &'static Semiring,
    pub entries: BTreeMap<Atom, Value>,
    /// mode actually used, after Auto resolves
    pub mode: SolveMode,
    /// sweeps performed (iterate) or atoms settled (priority)
    pub iterations: usize,
    /// final residual; 0.0 for priority
    pub residual: f64,
}

impl Chart {
    pub fn get(&self, atom: &Atom) -> Option<&Value> {
        self.entries.get(atom)
    }

    /// Entries matching a pattern, ordered by atom text.
    pub fn query(&self, pattern: &Atom) -> Vec<(&Atom, &Value)> {
        let mut out: Vec<(&Atom, &Value)> = self
            .entries
            .iter()
            .filter(|(a, _)| crate::kernel::unify(pattern, a).is_some())
            .collect();
        out.sort_by(|(a, _), (b, _)| a.text().cmp(&b.text()));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("program has validation errors")]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("priority mode needs a semiring where combination cannot improve on its inputs; {semiring} is not one")]
    PriorityUnsupported { semiring: &'static str },
    #[error("no fixpoint after {iterations} sweeps; residual {residual}")]
    Diverged { iterations: usize, residual: f64 },
    #[error("rule `{rule}` matched with condition `{condition}` still open")]
    UnresolvedCondition { rule: String, condition: String },
    #[error("{0}")]
    BadOptions(String),
}

/// Solve `program` over `semiring`. The semiring is passed explicitly so a
/// caller can evaluate one ruleset under several interpretations; axiom
/// values must lie in its carrier.
pub fn solve(
    program: &Program,
    semiring: &'static Semiring,
    options: &SolveOptions,
) -> Result<Chart, SolveError> {
    if !options.tolerance.is_finite() || options.tolerance < 0.0 {
        return Err(SolveError::BadOptions(format!(
            "tolerance must be finite and nonnegative, got {}",
            options.tolerance
        )));
    }
    if options.max_iterations == 0 {
        return Err(SolveError::BadOptions(
            "max_iterations must be positive".into(),
        ));
    }
    let diags = validate(program);
    if has_errors(&diags) {
        return Err(SolveError::Invalid(diags));
    }
    let axioms = combined_axioms(program, semiring)?;
    match options.mode {
        SolveMode::Priority => {
            if !semiring.monotone_superior {
                return Err(SolveError::PriorityUnsupported {
                    semiring: semiring.id.name(),
                });
            }
            priority::solve(program, semiring, &axioms, options)
        }
        SolveMode::Iterate => iterate::solve(program, semiring, &axioms, options),
        SolveMode::Auto => {
            if semiring.monotone_superior {
                priority::solve(program, semiring, &axioms, options)
            } else {
                iterate::solve(program, semiring, &axioms, options)
            }
        }
    }
}

/// Axiom values keyed by atom, checked against the solving semiring's
/// carrier. Validation has already ruled out duplicates. Zero-valued
/// axioms are dropped here; they assert nothing.
fn combined_axioms(
    program: &Program,
    semiring: &'static Semiring,
) -> Result<BTreeMap<Atom, Value>, SolveError> {
    let mut map: BTreeMap<Atom, Value> = BTreeMap::new();
    for ax in &program.axioms {
        semiring.check_axiom(&ax.value)?;
        map.insert(ax.atom.clone(), ax.value.clone());
    }
    map.retain(|_, v| !semiring.is_zero(v));
    Ok(map)
}
