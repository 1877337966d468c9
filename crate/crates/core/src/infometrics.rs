//! Entropy and relative entropy of proof distributions.
//!
//! A nonnegatively weighted program induces a distribution over the proofs of
//! any goal: each proof carries the product of its axiom weights, normalized
//! by the goal's total mass. Summing per-proof quantities like `w ln w` one
//! proof at a time would need the (possibly infinite) proof list, so instead
//! the axioms are reweighted into the three-component expectation semiring and
//! one fixpoint solve accumulates mass and log-mass expectations together.

use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::{Atom, Axiom, Program};
use crate::product::{apply_edits, product, EditPass, PairingSpec, ProductError};
use crate::semiring::{SemiringId, Value, ENTROPY3};
use crate::solver::{solve, Chart, SolveError, SolveOptions};

/// Shannon entropy of one goal's proof distribution, with the two raw
/// aggregates it was computed from: `w_prime` is the total proof mass and
/// `h_prime` the unnormalized `-sum w ln w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub w_prime: f64,
    pub h_prime: f64,
    pub entropy: f64,
}

/// Relative entropy of one goal's proof distribution under two weightings
/// p and q of the same axioms. `ce_pq` and `ce_pp` are cross-entropies in
/// the convention `sum p~ ln q~` (so KL = ce_pp - ce_pq is nonnegative);
/// `r_bar` is the unnormalized cross term `sum p ln q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlReport {
    pub p_bar: f64,
    pub q_bar: f64,
    pub r_bar: f64,
    pub ce_pq: f64,
    pub ce_pp: f64,
    pub kl: f64,
    pub generalized_kl: Option<f64>,
}

/// How to pair two different programs for [`projection_kl`]: the pairing
/// declaration plus whatever edit passes cut the raw product down to a
/// one-to-one correspondence of proofs.
#[derive(Debug, Clone)]
pub struct ProjectionSpec {
    pub pairing: PairingSpec,
    pub edits: Vec<EditPass>,
}

#[derive(Debug, thiserror::Error)]
pub enum InfoError {
    #[error("axiom {0} needs a plain numeric weight")]
    NonNumericAxiom(String),
    #[error("axiom {0} has negative weight {1}")]
    NegativeWeight(String, f64),
    #[error("{0} is weighted twice in one assignment")]
    DuplicateAssignment(String),
    #[error("goal {0} is not derivable")]
    GoalUnderivable(String),
    #[error("goal {0} matches {1} derived atoms; narrow the pattern")]
    AmbiguousGoal(String, usize),
    #[error("goal {0} carries no p mass")]
    ZeroMass(String),
    #[error("goal {0} does not name a paired predicate")]
    NotAProductGoal(String),
    #[error("axiom {0} cannot be attributed to either factor")]
    UnattributableAxiom(String),
    #[error("computing {0} gave an indeterminate result")]
    Indeterminate(&'static str),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// Reweight every axiom w as the triple (w, -w ln w, 0), so that solving in
/// the expectation semiring yields, at each atom, the pair of aggregates an
/// entropy needs: total mass and total mass-weighted surprisal.
pub fn lift_entropy(program: &Program) -> Result<Program, InfoError> {
    let mut out = program.clone();
    out.semiring = Some(SemiringId::Entropy3);
    for ax in &mut out.axioms {
        let w = real_weight(ax)?;
        ax.value = Value::Triple(w, -xlnx(w), 0.0);
    }
    Ok(out)
}

/// Entropy of the proof distribution of `goal`. The goal may be a pattern as
/// long as exactly one derived atom matches it.
pub fn entropy_of_goal(
    program: &Program,
    goal: &Atom,
    options: &SolveOptions,
) -> Result<EntropyReport, InfoError> {
    let chart = solve(&lift_entropy(program)?, &ENTROPY3, options)?;
    let (atom, value) = resolve_goal(&chart, goal)?;
    let (w_prime, h_prime, _) = triple(value);
    if w_prime <= 0.0 {
        return Err(InfoError::ZeroMass(atom.text()));
    }
    let entropy = h_prime / w_prime + w_prime.ln();
    if entropy.is_nan() {
        return Err(InfoError::Indeterminate("entropy"));
    }
    Ok(EntropyReport {
        w_prime,
        h_prime,
        entropy,
    })
}

/// Reweight the program's axiom set for two weightings p and q of the same
/// atoms: each atom carries (p, p ln q, q). Weights default to the program's
/// own axiom values, and an atom missing from one weighting completes with
/// weight zero.
pub fn lift_kl(program: &Program, p: &[Axiom], q: &[Axiom]) -> Result<Program, InfoError> {
    lift_joint(program, p, q, cross_term)
}

/// KL divergence between the proof distributions of `goal` under weightings
/// p and q. Needs two solves: the cross run pairs p with q, and a second run
/// with q := p supplies the `sum p ln p` the cross run cannot.
pub fn kl_divergence(
    program: &Program,
    p: &[Axiom],
    q: &[Axiom],
    goal: &Atom,
    options: &SolveOptions,
    generalized: bool,
) -> Result<KlReport, InfoError> {
    let cross = solve(&lift_kl(program, p, q)?, &ENTROPY3, options)?;
    let (atom, value) = resolve_goal(&cross, goal)?;
    let (p_bar, r_bar, q_bar) = triple(value);
    if p_bar <= 0.0 {
        return Err(InfoError::ZeroMass(atom.text()));
    }

    let selfrun = solve(&lift_kl(program, p, p)?, &ENTROPY3, options)?;
    let (p_self, r_pp, _) = match selfrun.get(&atom) {
        Some(v) => triple(v),
        None => return Err(InfoError::GoalUnderivable(atom.text())),
    };

    let report = finish_report(&atom, p_bar, r_bar, q_bar, p_self, r_pp)?;
    if !generalized {
        return Ok(report);
    }

    let gen = solve(&lift_joint(program, p, q, generalized_term)?, &ENTROPY3, options)?;
    let (gp, gr, gq) = match gen.get(&atom) {
        Some(v) => triple(v),
        None => return Err(InfoError::GoalUnderivable(atom.text())),
    };
    let g = gr - gp + gq;
    if g.is_nan() {
        return Err(InfoError::Indeterminate("generalized divergence"));
    }
    Ok(KlReport {
        generalized_kl: Some(g),
        ..report
    })
}

/// KL divergence between two different programs, with the correspondence
/// between their proofs given by a product construction: pair the programs,
/// apply the spec's edits until each left proof of the goal meets exactly one
/// right proof, and read all three cross aggregates off the product goal.
/// `sum p ln p` still comes from a run over the left program alone.
pub fn projection_kl(
    p_program: &Program,
    q_program: &Program,
    spec: &ProjectionSpec,
    goal: &Atom,
    options: &SolveOptions,
) -> Result<KlReport, InfoError> {
    let joint = product(p_program, q_program, &spec.pairing)?;
    let joint = apply_edits(&joint, &spec.edits)?;
    let meta = joint.product.clone().expect("product() records provenance");
    if !meta.products.contains_key(&goal.predicate) {
        return Err(InfoError::NotAProductGoal(goal.text()));
    }

    // Reweight by provenance: left-factor axioms carry mass (w, 0, 1), right
    // ones carry log mass (1, ln w, w), and an axiom both factors use carries
    // its own full cross term. Axioms of paired predicates have no side.
    let shared = meta.shared();
    let mut lifted = joint.clone();
    lifted.semiring = Some(SemiringId::Entropy3);
    for ax in &mut lifted.axioms {
        let key = ax.atom.key();
        if meta.products.contains_key(&key.0) {
            return Err(InfoError::UnattributableAxiom(ax.atom.text()));
        }
        let w = real_weight(ax)?;
        ax.value = if shared.contains(&key) {
            Value::Triple(w, xlnx(w), w)
        } else if meta.left_predicates.contains(&key) {
            Value::Triple(w, 0.0, 1.0)
        } else if meta.right_predicates.contains(&key) {
            Value::Triple(1.0, w.ln(), w)
        } else {
            return Err(InfoError::UnattributableAxiom(ax.atom.text()));
        };
    }

    let chart = solve(&lifted, &ENTROPY3, options)?;
    let (atom, value) = resolve_goal(&chart, goal)?;
    let (p_bar, r_bar, q_bar) = triple(value);
    if p_bar <= 0.0 {
        return Err(InfoError::ZeroMass(atom.text()));
    }

    let pair = &meta.products[&atom.predicate];
    let (left_goal, _) = pair
        .split(&atom)
        .ok_or_else(|| InfoError::NotAProductGoal(atom.text()))?;
    let selfrun = solve(&lift_kl(p_program, &[], &[])?, &ENTROPY3, options)?;
    let (p_self, r_pp, _) = match selfrun.get(&left_goal) {
        Some(v) => triple(v),
        None => return Err(InfoError::GoalUnderivable(left_goal.text())),
    };

    finish_report(&atom, p_bar, r_bar, q_bar, p_self, r_pp)
}

fn finish_report(
    atom: &Atom,
    p_bar: f64,
    r_bar: f64,
    q_bar: f64,
    p_self: f64,
    r_pp: f64,
) -> Result<KlReport, InfoError> {
    if p_self <= 0.0 {
        return Err(InfoError::ZeroMass(atom.text()));
    }
    // q_bar = 0 forces r_bar = -inf; the difference is an indeterminate form
    // whose limit is the cross-entropy diverging, so pin it there directly.
    let ce_pq = if q_bar == 0.0 {
        f64::NEG_INFINITY
    } else {
        r_bar / p_bar - q_bar.ln()
    };
    let ce_pp = r_pp / p_self - p_self.ln();
    let kl = ce_pp - ce_pq;
    if ce_pq.is_nan() || ce_pp.is_nan() || kl.is_nan() {
        return Err(InfoError::Indeterminate("relative entropy"));
    }
    Ok(KlReport {
        p_bar,
        q_bar,
        r_bar,
        ce_pq,
        ce_pp,
        kl,
        generalized_kl: None,
    })
}

fn lift_joint(
    program: &Program,
    p: &[Axiom],
    q: &[Axiom],
    term: fn(f64, f64) -> f64,
) -> Result<Program, InfoError> {
    let pw = assignment(p)?;
    let qw = assignment(q)?;
    let mut own = BTreeMap::new();
    for ax in &program.axioms {
        own.insert(ax.atom.clone(), real_weight(ax)?);
    }
    let mut atoms: BTreeSet<Atom> = own.keys().cloned().collect();
    atoms.extend(pw.keys().cloned());
    atoms.extend(qw.keys().cloned());

    let mut out = program.clone();
    out.semiring = Some(SemiringId::Entropy3);
    out.axioms.clear();
    for atom in atoms {
        let pv = *pw.get(&atom).or_else(|| own.get(&atom)).unwrap_or(&0.0);
        let qv = *qw.get(&atom).or_else(|| own.get(&atom)).unwrap_or(&0.0);
        let y = term(pv, qv);
        out.axioms.push(Axiom::new(atom, Value::Triple(pv, y, qv)));
    }
    Ok(out)
}

// y-component conventions: p = 0 contributes nothing regardless of q, while
// q = 0 under positive p pushes the cross term to -inf.
fn cross_term(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * q.ln()
    }
}

fn generalized_term(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

// x ln x, continuously extended to 0 at x = 0.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn real_weight(ax: &Axiom) -> Result<f64, InfoError> {
    let Value::Real(w) = ax.value else {
        return Err(InfoError::NonNumericAxiom(ax.atom.text()));
    };
    if w.is_nan() {
        return Err(InfoError::NonNumericAxiom(ax.atom.text()));
    }
    if w < 0.0 {
        return Err(InfoError::NegativeWeight(ax.atom.text(), w));
    }
    Ok(w)
}

fn assignment(axioms: &[Axiom]) -> Result<BTreeMap<Atom, f64>, InfoError> {
    let mut out = BTreeMap::new();
    for ax in axioms {
        let w = real_weight(ax)?;
        if out.insert(ax.atom.clone(), w).is_some() {
            return Err(InfoError::DuplicateAssignment(ax.atom.text()));
        }
    }
    Ok(out)
}

fn resolve_goal<'c>(chart: &'c Chart, goal: &Atom) -> Result<(Atom, &'c Value), InfoError> {
    let hits = chart.query(goal);
    match hits.len() {
        0 => Err(InfoError::GoalUnderivable(goal.text())),
        1 => Ok((hits[0].0.clone(), hits[0].1)),
        n => Err(InfoError::AmbiguousGoal(goal.text(), n)),
    }
}

fn triple(value: &Value) -> (f64, f64, f64) {
    match value {
        Value::Triple(x, y, z) => (*x, *y, *z),
        _ => unreachable!("expectation charts hold triples"),
    }
}
