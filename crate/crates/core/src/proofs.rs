//! Proof enumeration by exhaustion. Deliberately naive: the solver is
//! clever, this module is checkable, and the tests hold the two against
//! each other. Also the substrate for projecting a product program's
//! proofs back onto its factors.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::kernel::{has_errors, substitute, unify, validate, Atom, Program};
use crate::product::{BodySource, ProductMeta, Side};
use crate::semiring::{Semiring, SemiringError, Value};
use crate::solver::{antecedents, for_each_instance, Antecedents, Index, SolveError};

#[derive(Debug, Clone)]
pub struct Proof {
    pub root: Atom,
    pub via: ProofVia,
    /// which factor this node came from, for product-generated programs
    pub tag: Option<ProofTag>,
}

#[derive(Debug, Clone)]
pub enum ProofVia {
    /// leaf: the axiom's value
    Axiom(Value),
    /// rule application; `rule` indexes the program's rule list and
    /// `children` align with the rule body (guards are checked, not kept)
    Step { rule: usize, children: Vec<Rc<Proof>> },
}

#[derive(Debug, Clone)]
pub enum ProofTag {
    /// lives entirely inside one factor; `rule` is that factor's own index
    Factor { side: Side, rule: Option<usize> },
    /// shared input predicate, valid in both factors as-is
    Shared,
    /// a paired step: head splits, children route by source
    Product {
        left_rule: Option<usize>,
        right_rule: Option<usize>,
        bridging: bool,
        sources: Vec<BodySource>,
    },
    /// an axiom directly on a product predicate; its factor values are
    /// gone, so projection through it is impossible
    Joint,
}

pub struct ProofLimits {
    pub max_depth: usize,
    pub max_count: usize,
}

impl Default for ProofLimits {
    fn default() -> ProofLimits {
        ProofLimits {
            max_depth: 64,
            max_count: 10_000,
        }
    }
}

pub struct ProofSet {
    pub proofs: Vec<Rc<Proof>>,
    /// some proofs were cut off by max_depth or max_count
    pub truncated: bool,
}

struct Forest {
    /// per atom: every proof found so far, with the round that built it
    proofs: BTreeMap<Atom, Vec<(usize, Rc<Proof>)>>,
    first_round: BTreeMap<Atom, usize>,
    /// proofs whose root matches the goal, in discovery order
    found: Vec<Rc<Proof>>,
}

impl Forest {
    fn keep(&mut self, goal: &Atom, round: usize, proof: Rc<Proof>) {
        let atom = &proof.root;
        self.first_round.entry(atom.clone()).or_insert(round);
        self.proofs
            .entry(atom.clone())
            .or_default()
            .push((round, proof.clone()));
        if unify(goal, atom).is_some() {
            self.found.push(proof);
        }
    }
}

/// All distinct proofs of ground instances of `goal`, in discovery order.
/// Distinctness is structural: traversing a cycle twice is a new proof.
/// The semiring decides which axioms count as asserting anything at all.
pub fn enumerate_proofs(
    program: &Program,
    semiring: &Semiring,
    goal: &Atom,
    limits: &ProofLimits,
) -> Result<ProofSet, SolveError> {
    if limits.max_depth == 0 || limits.max_count == 0 {
        return Err(SolveError::BadOptions("proof limits must be positive".into()));
    }
    let diags = validate(program);
    if has_errors(&diags) {
        return Err(SolveError::Invalid(diags));
    }

    let antes: Vec<Antecedents> = program.rules.iter().map(antecedents).collect();
    let mut forest = Forest {
        proofs: BTreeMap::new(),
        first_round: BTreeMap::new(),
        found: Vec::new(),
    };

    for axiom in &program.axioms {
        semiring.check_axiom(&axiom.value)?;
        if semiring.is_zero(&axiom.value) {
            continue; // asserts nothing, so it proves nothing
        }
        let proof = Rc::new(Proof {
            root: axiom.atom.clone(),
            via: ProofVia::Axiom(axiom.value.clone()),
            tag: leaf_tag(program, &axiom.atom),
        });
        forest.keep(goal, 1, proof);
    }

    for round in 2..=limits.max_depth {
        if forest.found.len() >= limits.max_count {
            break;
        }
        let index = Index::from_atoms(forest.proofs.keys());
        let frontier = round - 1;
        // grow strictly from the previous rounds: new proofs are staged
        // and merged only after the whole round
        let mut staged: Vec<Rc<Proof>> = Vec::new();
        for (ri, ante) in antes.iter().enumerate() {
            for_each_instance(ante, &index, None, &mut |inst| {
                let guard_round = inst.atoms[ante.weighted..]
                    .iter()
                    .map(|g| forest.first_round[g])
                    .max()
                    .unwrap_or(1);
                let head = substitute(&ante.rule.head, inst.subst)?;
                let options: Vec<&[(usize, Rc<Proof>)]> = inst.atoms[..ante.weighted]
                    .iter()
                    .map(|a| forest.proofs[a].as_slice())
                    .collect();
                // a combination is built in the round after its newest part
                combos(&options, frontier, guard_round >= frontier, &mut |children| {
                    staged.push(Rc::new(Proof {
                        root: head.clone(),
                        via: ProofVia::Step {
                            rule: ri,
                            children: children.to_vec(),
                        },
                        tag: step_tag(program, ri),
                    }));
                });
                Ok(())
            })?;
        }
        if staged.is_empty() {
            return Ok(ProofSet {
                proofs: forest.found,
                truncated: false,
            });
        }
        for proof in staged {
            forest.keep(goal, round, proof);
        }
    }

    // fell out of the limits while proofs were still appearing
    let mut found = forest.found;
    found.truncate(limits.max_count);
    Ok(ProofSet {
        proofs: found,
        truncated: true,
    })
}

/// Enumerate child tuples drawn from `options`, each tuple using at least
/// one proof from round `frontier` unless `any_round` already qualifies
/// the whole instance (a guard newly became derivable).
fn combos(
    options: &[&[(usize, Rc<Proof>)]],
    frontier: usize,
    any_round: bool,
    sink: &mut impl FnMut(&[Rc<Proof>]),
) {
    fn walk(
        options: &[&[(usize, Rc<Proof>)]],
        frontier: usize,
        fresh_needed: bool,
        picked: &mut Vec<Rc<Proof>>,
        sink: &mut impl FnMut(&[Rc<Proof>]),
    ) {
        let Some((here, rest)) = options.split_first() else {
            if !fresh_needed {
                sink(picked);
            }
            return;
        };
        // proofs from later rounds than the frontier do not exist yet in
        // this round's stores, so every pick is <= frontier
        for (round, proof) in *here {
            if fresh_needed && rest.is_empty() && *round != frontier {
                continue;
            }
            picked.push(proof.clone());
            walk(
                rest,
                frontier,
                fresh_needed && *round != frontier,
                picked,
                sink,
            );
            picked.pop();
        }
    }
    let mut picked = Vec::with_capacity(options.len());
    walk(options, frontier, !any_round, &mut picked, sink);
}

fn leaf_tag(program: &Program, atom: &Atom) -> Option<ProofTag> {
    let meta = program.product.as_ref()?;
    if meta.products.contains_key(&atom.predicate) {
        return Some(ProofTag::Joint);
    }
    let key = atom.key();
    let left = meta.left_predicates.contains(&key);
    let right = meta.right_predicates.contains(&key);
    match (left, right) {
        (true, true) => Some(ProofTag::Shared),
        (true, false) => Some(ProofTag::Factor {
            side: Side::Left,
            rule: None,
        }),
        (false, true) => Some(ProofTag::Factor {
            side: Side::Right,
            rule: None,
        }),
        (false, false) => None,
    }
}

fn step_tag(program: &Program, rule: usize) -> Option<ProofTag> {
    program.product.as_ref()?;
    let origin = program.rules[rule].product.as_ref()?;
    match (origin.left_rule, origin.right_rule) {
        (Some(_), Some(_)) => Some(ProofTag::Product {
            left_rule: origin.left_rule,
            right_rule: origin.right_rule,
            bridging: origin.bridging,
            sources: origin.sources.clone(),
        }),
        (Some(l), None) => Some(ProofTag::Factor {
            side: Side::Left,
            rule: Some(l),
        }),
        (None, Some(r)) => Some(ProofTag::Factor {
            side: Side::Right,
            rule: Some(r),
        }),
        (None, None) => None,
    }
}

/// ⊗-product of the axiom values at the leaves. Guards contribute nothing;
/// they never became children.
pub fn proof_value(proof: &Proof, semiring: &Semiring) -> Result<Value, SemiringError> {
    match &proof.via {
        ProofVia::Axiom(v) => semiring.times(&semiring.one(), v),
        ProofVia::Step { children, .. } => {
            let mut acc = semiring.one();
            for child in children {
                acc = semiring.times(&acc, &proof_value(child, semiring)?)?;
            }
            Ok(acc)
        }
    }
}

/// ⊕-sum over the proofs' values; 0̄ when there are none.
pub fn aggregate(proofs: &[Rc<Proof>], semiring: &Semiring) -> Result<Value, SemiringError> {
    let mut acc = semiring.zero();
    for proof in proofs {
        acc = semiring.plus(&acc, &proof_value(proof, semiring)?)?;
    }
    Ok(acc)
}

#[derive(Debug, thiserror::Error)]
pub enum ProofError {
    #[error("this program is not a product; its proofs have no factor structure")]
    NotAProduct,
    #[error("node {0} carries no provenance")]
    NoProvenance(String),
    #[error("node {0} belongs to the other factor")]
    WrongSide(String),
    #[error("axiom {0} is joint; the factor values behind it are gone")]
    JointLeaf(String),
    #[error("head {0} does not split against the recorded pairing")]
    BadSplit(String),
}

/// Rebuild the `side` factor's proof from a product program's proof:
/// coupled heads split, the other side's sub-proofs drop away, and
/// bridging steps unfold into the factor's own axiom leaves.
pub fn project_proof(program: &Program, proof: &Proof, side: Side) -> Result<Proof, ProofError> {
    let meta = program.product.as_ref().ok_or(ProofError::NotAProduct)?;
    project(meta, proof, side)
}

fn project(meta: &ProductMeta, node: &Proof, side: Side) -> Result<Proof, ProofError> {
    let tag = node
        .tag
        .as_ref()
        .ok_or_else(|| ProofError::NoProvenance(node.root.text()))?;
    match tag {
        ProofTag::Shared => Ok(Proof {
            root: node.root.clone(),
            via: node.via.clone(),
            tag: None,
        }),
        ProofTag::Joint => Err(ProofError::JointLeaf(node.root.text())),
        ProofTag::Factor { side: s, rule } => {
            if *s != side {
                return Err(ProofError::WrongSide(node.root.text()));
            }
            let via = match &node.via {
                ProofVia::Axiom(v) => ProofVia::Axiom(v.clone()),
                ProofVia::Step { children, .. } => {
                    let rule =
                        rule.ok_or_else(|| ProofError::NoProvenance(node.root.text()))?;
                    let mut kids = Vec::with_capacity(children.len());
                    for child in children {
                        kids.push(Rc::new(project(meta, child, side)?));
                    }
                    ProofVia::Step {
                        rule,
                        children: kids,
                    }
                }
            };
            Ok(Proof {
                root: node.root.clone(),
                via,
                tag: None,
            })
        }
        ProofTag::Product {
            left_rule,
            right_rule,
            bridging,
            sources,
        } => {
            let ProofVia::Step { children, .. } = &node.via else {
                return Err(ProofError::NoProvenance(node.root.text()));
            };
            if *bridging {
                // p_q(...) += p(...) * q(...): the factor proof is just the
                // chosen side's sub-proof
                for (child, source) in children.iter().zip(sources) {
                    let keep = match source {
                        BodySource::Left(_) => side == Side::Left,
                        BodySource::Right(_) => side == Side::Right,
                        BodySource::Paired { .. } => true,
                    };
                    if keep {
                        return project(meta, child, side);
                    }
                }
                return Err(ProofError::BadSplit(node.root.text()));
            }
            let pairing = meta
                .products
                .get(&node.root.predicate)
                .ok_or_else(|| ProofError::BadSplit(node.root.text()))?;
            let (l_atom, r_atom) = pairing
                .split(&node.root)
                .ok_or_else(|| ProofError::BadSplit(node.root.text()))?;
            let (root, rule) = match side {
                Side::Left => (l_atom, left_rule),
                Side::Right => (r_atom, right_rule),
            };
            let rule = rule.ok_or_else(|| ProofError::NoProvenance(node.root.text()))?;
            let mut kids: Vec<(usize, Rc<Proof>)> = Vec::new();
            for (child, source) in children.iter().zip(sources) {
                let slot = match (source, side) {
                    (BodySource::Left(i), Side::Left) => Some(*i),
                    (BodySource::Right(i), Side::Right) => Some(*i),
                    (BodySource::Paired { left, .. }, Side::Left) => Some(*left),
                    (BodySource::Paired { right, .. }, Side::Right) => Some(*right),
                    _ => None, // the other factor's premise: dropped
                };
                if let Some(slot) = slot {
                    kids.push((slot, Rc::new(project(meta, child, side)?)));
                }
            }
            kids.sort_by_key(|(slot, _)| *slot);
            Ok(Proof {
                root,
                via: ProofVia::Step {
                    rule,
                    children: kids.into_iter().map(|(_, p)| p).collect(),
                },
                tag: None,
            })
        }
    }
}

/// Indented tree, one node per line, subtree value on every node.
pub fn render_proof(proof: &Proof, semiring: &Semiring) -> Result<String, SemiringError> {
    let mut out = String::new();
    fn rec(
        node: &Proof,
        semiring: &Semiring,
        depth: usize,
        out: &mut String,
    ) -> Result<(), SemiringError> {
        let value = proof_value(node, semiring)?;
        let pad = "  ".repeat(depth);
        match &node.via {
            ProofVia::Axiom(_) => {
                out.push_str(&format!("{pad}{} = {value}\n", node.root));
            }
            ProofVia::Step { rule, children } => {
                out.push_str(&format!("{pad}{}  [{value} via rule {rule}]\n", node.root));
                for child in children {
                    rec(child, semiring, depth + 1, out)?;
                }
            }
        }
        Ok(())
    }
    rec(proof, semiring, 0, &mut out)?;
    Ok(out)
}
