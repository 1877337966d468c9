//! Pairing transformation: combine two programs into one whose derivations
//! are pairs of derivations of the factors.

mod edits;

pub use edits::{
    add_equality_constraint, apply_edits, collapse_arguments, drop_rules, drop_rules_by_head,
    fix_structure, generalize_axioms, EditPass, RuleSelector,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::{Atom, PairDecl, Program, Rule, SideCondition, Term};

/// Which factor of a product a thing came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Origin of one antecedent of a rule in a product program: a position in
/// the left factor rule's body, a position in the right one's, or a pair of
/// positions that was folded into a single product-predicate antecedent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodySource {
    Left(usize),
    Right(usize),
    Paired { left: usize, right: usize },
}

/// Per-rule provenance stamped by the transformation. Present on every rule
/// of a product program: copies of factor rules keep their index in the
/// factor, combined rules carry both indices, bridging rules carry neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductOrigin {
    pub left_rule: Option<usize>,
    pub right_rule: Option<usize>,
    pub bridging: bool,
    pub sources: Vec<BodySource>,
}

/// How one product predicate relates to its two factor predicates.
///
/// `supplies[k]` lists the factor argument positions that argument `k` of
/// the product predicate feeds. Fresh from the transformation each product
/// argument feeds exactly one factor position; collapsing argument pairs
/// makes single positions feed both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPredicate {
    pub left: (String, usize),
    pub right: (String, usize),
    pub supplies: Vec<Vec<(Side, usize)>>,
}

impl ProductPredicate {
    /// Split an atom of the product predicate into its two factor atoms.
    pub fn split(&self, atom: &Atom) -> Option<(Atom, Atom)> {
        if atom.args.len() != self.supplies.len() {
            return None;
        }
        let mut left: Vec<Option<Term>> = vec![None; self.left.1];
        let mut right: Vec<Option<Term>> = vec![None; self.right.1];
        for (arg, feeds) in atom.args.iter().zip(&self.supplies) {
            for (side, pos) in feeds {
                let slot = match side {
                    Side::Left => left.get_mut(*pos)?,
                    Side::Right => right.get_mut(*pos)?,
                };
                *slot = Some(arg.clone());
            }
        }
        let left: Option<Vec<Term>> = left.into_iter().collect();
        let right: Option<Vec<Term>> = right.into_iter().collect();
        Some((
            Atom::new(&self.left.0, left?),
            Atom::new(&self.right.0, right?),
        ))
    }
}

/// Metadata a product program carries so that later passes (argument
/// collapsing, proof projection) can still see the factor structure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProductMeta {
    /// product predicate name -> factor structure
    pub products: BTreeMap<String, ProductPredicate>,
    /// all predicates of the left factor, including shared inputs
    pub left_predicates: BTreeSet<(String, usize)>,
    /// all predicates of the right factor, including shared inputs
    pub right_predicates: BTreeSet<(String, usize)>,
}

impl ProductMeta {
    /// Predicates visible to both factors (shared inputs).
    pub fn shared(&self) -> BTreeSet<(String, usize)> {
        self.left_predicates
            .intersection(&self.right_predicates)
            .cloned()
            .collect()
    }
}

/// How paired antecedents are matched up when a left rule and a right rule
/// both mention a pair more than once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignmentPolicy {
    /// i-th occurrence with i-th occurrence, up to the shorter count
    #[default]
    LeftToRight,
    /// first with second and second with first; only defined when both
    /// rules mention the pair exactly twice
    Crossed,
    /// alignments supplied per rule pair in `PairingSpec::explicit`
    Explicit,
}

impl AlignmentPolicy {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "left_to_right" => Some(AlignmentPolicy::LeftToRight),
            "crossed" => Some(AlignmentPolicy::Crossed),
            "explicit" => Some(AlignmentPolicy::Explicit),
            _ => None,
        }
    }
}

/// Body-position alignments for one (left rule, right rule) combination,
/// used by `AlignmentPolicy::Explicit`.
pub type ExplicitAlignments = BTreeMap<(usize, usize), Vec<(usize, usize)>>;

#[derive(Debug, Clone, Default)]
pub struct PairingSpec {
    pub pairs: Vec<PairDecl>,
    pub policy: AlignmentPolicy,
    pub explicit: ExplicitAlignments,
}

impl PairingSpec {
    pub fn new(pairs: Vec<PairDecl>) -> Self {
        PairingSpec {
            pairs,
            policy: AlignmentPolicy::LeftToRight,
            explicit: ExplicitAlignments::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ProductError {
    #[error("predicate {0}/{1} appears in both programs but is not a shared input in both")]
    NameClash(String, usize),
    #[error("{side} program has no predicate {pred}/{arity}")]
    UnknownPredicate {
        side: &'static str,
        pred: String,
        arity: usize,
    },
    #[error("product name {0} collides with an existing predicate")]
    ProductNameClash(String),
    #[error("predicate {0} appears in more than one pair")]
    DuplicatePair(String),
    #[error(
        "pair {left}/{right}: one side is defined by rules and the other by facts; \
         pairing requires both or neither"
    )]
    MixedPair { left: String, right: String },
    #[error(
        "paired predicate {0} has both rules and its own facts; move the facts behind a rule"
    )]
    SeededPair(String),
    #[error("shared input fact {0} carries different values in the two programs")]
    SharedAxiomMismatch(String),
    #[error(
        "crossed alignment needs exactly two occurrences on each side, \
         rule {left_rule} x rule {right_rule} has {found_left} x {found_right}"
    )]
    CrossedShape {
        left_rule: usize,
        right_rule: usize,
        found_left: usize,
        found_right: usize,
    },
    #[error("no alignment given for rule {left_rule} x rule {right_rule} of pair {pair}")]
    MissingAlignment {
        left_rule: usize,
        right_rule: usize,
        pair: String,
    },
    #[error(
        "alignment for rule {left_rule} x rule {right_rule} names body position {pos} \
         on the {side} side, which does not hold the paired predicate"
    )]
    BadAlignment {
        left_rule: usize,
        right_rule: usize,
        side: &'static str,
        pos: usize,
    },
    #[error("no rule with id {0}")]
    UnknownRule(usize),
    #[error("rule {rule} has no variable {var}")]
    UnknownVariable { rule: usize, var: String },
    #[error("rule {rule}: cannot collapse {left} with {right}: {reason}")]
    CollapseUnforced {
        rule: usize,
        left: String,
        right: String,
        reason: String,
    },
    #[error("fact {atom}: cannot collapse unequal arguments {left} and {right}")]
    CollapseUnforcedFact {
        atom: String,
        left: String,
        right: String,
    },
    #[error("collapse positions for {pred}/{arity} are out of range or overlap")]
    CollapsePositions { pred: String, arity: usize },
    #[error("{0}/{1} is a factor of a product predicate; collapse the product instead")]
    CollapseFactor(String, usize),
    #[error("{0}/{1} is not defined by a single bridging rule")]
    NotBridging(String, usize),
    #[error("witness predicate {0} must be declared as an input")]
    WitnessNotInput(String),
    #[error("{0}/{1}: position {2} is out of range")]
    PositionOutOfRange(String, usize, usize),
    #[error("no predicate {0}/{1} in the program")]
    NoSuchPredicate(String, usize),
    #[error("renaming {0} to {1} collides with an existing predicate")]
    RenameClash(String, String),
}

struct PairInfo {
    decl: PairDecl,
    bridging: bool,
}

/// Combine two programs over the pairs named in `spec`.
///
/// For every pair whose two predicates are defined by rules, each left rule
/// is combined with each right rule: bodies are concatenated, and antecedent
/// occurrences of paired predicates are folded into single product atoms at
/// the position of the left occurrence. Pairs of pure fact predicates get a
/// bridging rule instead. Predicates shared by both programs must be inputs
/// in both and stay unpaired.
pub fn product(
    left: &Program,
    right: &Program,
    spec: &PairingSpec,
) -> Result<Program, ProductError> {
    let left_preds = left.predicates();
    let right_preds = right.predicates();

    for key in left_preds.intersection(&right_preds) {
        if !left.inputs.contains(key) || !right.inputs.contains(key) {
            return Err(ProductError::NameClash(key.0.clone(), key.1));
        }
    }

    let mut pairs = Vec::new();
    let mut seen_left = BTreeSet::new();
    let mut seen_right = BTreeSet::new();
    let mut product_names = BTreeSet::new();
    for decl in &spec.pairs {
        check_member(left, &left_preds, &decl.left, "left")?;
        check_member(right, &right_preds, &decl.right, "right")?;
        if !seen_left.insert(decl.left.clone()) {
            return Err(ProductError::DuplicatePair(decl.left.0.clone()));
        }
        if !seen_right.insert(decl.right.clone()) {
            return Err(ProductError::DuplicatePair(decl.right.0.clone()));
        }
        let in_use = |name: &str| {
            left_preds.iter().any(|(p, _)| p == name)
                || right_preds.iter().any(|(p, _)| p == name)
        };
        if in_use(&decl.name) || !product_names.insert(decl.name.clone()) {
            return Err(ProductError::ProductNameClash(decl.name.clone()));
        }
        let left_ruled = has_rules(left, &decl.left);
        let right_ruled = has_rules(right, &decl.right);
        if left_ruled != right_ruled {
            return Err(ProductError::MixedPair {
                left: decl.left.0.clone(),
                right: decl.right.0.clone(),
            });
        }
        if left_ruled {
            for (side, prog, key) in [("left", left, &decl.left), ("right", right, &decl.right)] {
                let _ = side;
                if prog.axioms.iter().any(|ax| ax.atom.key() == *key) {
                    return Err(ProductError::SeededPair(key.0.clone()));
                }
            }
        }
        pairs.push(PairInfo {
            decl: decl.clone(),
            bridging: !left_ruled,
        });
    }

    let mut out = Program::default();
    out.semiring = match (left.semiring, right.semiring) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        _ => None,
    };
    out.inputs = left.inputs.union(&right.inputs).cloned().collect();
    out.pairs = spec.pairs.clone();

    for (idx, rule) in left.rules.iter().enumerate() {
        let mut r = rule.clone();
        r.product = Some(ProductOrigin {
            left_rule: Some(idx),
            right_rule: None,
            bridging: false,
            sources: (0..r.body.len()).map(BodySource::Left).collect(),
        });
        out.rules.push(r);
    }
    for (idx, rule) in right.rules.iter().enumerate() {
        let mut r = rule.clone();
        r.product = Some(ProductOrigin {
            left_rule: None,
            right_rule: Some(idx),
            bridging: false,
            sources: (0..r.body.len()).map(BodySource::Right).collect(),
        });
        out.rules.push(r);
    }

    for info in &pairs {
        if info.bridging {
            out.rules.push(bridging_rule(&info.decl));
            continue;
        }
        for (li, lrule) in rules_for(left, &info.decl.left) {
            for (ri, rrule) in rules_for(right, &info.decl.right) {
                out.rules
                    .push(combine(li, lrule, ri, rrule, &pairs, spec)?);
            }
        }
    }

    let shared: BTreeSet<(String, usize)> =
        left_preds.intersection(&right_preds).cloned().collect();
    out.axioms = left.axioms.clone();
    for ax in &right.axioms {
        if shared.contains(&ax.atom.key()) {
            match left.axioms.iter().find(|l| l.atom == ax.atom) {
                Some(l) if l.value.same(&ax.value) => continue,
                Some(_) => {
                    return Err(ProductError::SharedAxiomMismatch(ax.atom.text()));
                }
                None => {}
            }
        }
        out.axioms.push(ax.clone());
    }

    let mut meta = ProductMeta {
        products: BTreeMap::new(),
        left_predicates: left_preds,
        right_predicates: right_preds,
    };
    for info in &pairs {
        let (la, ra) = (info.decl.left.1, info.decl.right.1);
        let mut supplies: Vec<Vec<(Side, usize)>> = Vec::with_capacity(la + ra);
        supplies.extend((0..la).map(|i| vec![(Side::Left, i)]));
        supplies.extend((0..ra).map(|j| vec![(Side::Right, j)]));
        meta.products.insert(
            info.decl.name.clone(),
            ProductPredicate {
                left: info.decl.left.clone(),
                right: info.decl.right.clone(),
                supplies,
            },
        );
    }
    out.product = Some(meta);
    Ok(out)
}

fn check_member(
    prog: &Program,
    preds: &BTreeSet<(String, usize)>,
    key: &(String, usize),
    side: &'static str,
) -> Result<(), ProductError> {
    if preds.contains(key) || prog.inputs.contains(key) {
        Ok(())
    } else {
        Err(ProductError::UnknownPredicate {
            side,
            pred: key.0.clone(),
            arity: key.1,
        })
    }
}

fn has_rules(prog: &Program, key: &(String, usize)) -> bool {
    prog.rules.iter().any(|r| r.head.key() == *key)
}

fn rules_for<'a>(
    prog: &'a Program,
    key: &'a (String, usize),
) -> impl Iterator<Item = (usize, &'a Rule)> {
    prog.rules
        .iter()
        .enumerate()
        .filter(move |(_, r)| r.head.key() == *key)
}

fn bridging_rule(decl: &PairDecl) -> Rule {
    let largs: Vec<Term> = (1..=decl.left.1)
        .map(|i| Term::var(&format!("L{i}")))
        .collect();
    let rargs: Vec<Term> = (1..=decl.right.1)
        .map(|i| Term::var(&format!("R{i}")))
        .collect();
    let mut head_args = largs.clone();
    head_args.extend(rargs.clone());
    let mut rule = Rule::new(
        Atom::new(&decl.name, head_args),
        vec![
            Atom::new(&decl.left.0, largs),
            Atom::new(&decl.right.0, rargs),
        ],
    );
    rule.origin = Some(format!(
        "bridge {}/{} x {}/{}",
        decl.left.0, decl.left.1, decl.right.0, decl.right.1
    ));
    rule.product = Some(ProductOrigin {
        left_rule: None,
        right_rule: None,
        bridging: true,
        sources: vec![BodySource::Left(0), BodySource::Right(0)],
    });
    rule
}

fn combine(
    li: usize,
    lrule: &Rule,
    ri: usize,
    rrule: &Rule,
    pairs: &[PairInfo],
    spec: &PairingSpec,
) -> Result<Rule, ProductError> {
    let lvars = lrule.vars();
    let rvars = rrule.vars();
    let mut taken: BTreeSet<String> = lvars.union(&rvars).cloned().collect();
    let mut lmap = BTreeMap::new();
    let mut rmap = BTreeMap::new();
    for v in lvars.intersection(&rvars) {
        lmap.insert(v.clone(), fresh_name(v, '1', &mut taken));
        rmap.insert(v.clone(), fresh_name(v, '2', &mut taken));
    }
    let lrule = rename_rule(lrule, &lmap);
    let rrule = rename_rule(rrule, &rmap);

    // decide which body positions fold together
    let mut folds: Vec<(usize, usize, &PairDecl)> = Vec::new();
    for info in pairs {
        let decl = &info.decl;
        let lpos: Vec<usize> = positions_of(&lrule, &decl.left);
        let rpos: Vec<usize> = positions_of(&rrule, &decl.right);
        if lpos.is_empty() || rpos.is_empty() {
            continue;
        }
        match spec.policy {
            AlignmentPolicy::LeftToRight => {
                for (a, b) in lpos.iter().zip(rpos.iter()) {
                    folds.push((*a, *b, decl));
                }
            }
            AlignmentPolicy::Crossed => {
                if lpos.len() == 1 && rpos.len() == 1 {
                    folds.push((lpos[0], rpos[0], decl));
                } else if lpos.len() == 2 && rpos.len() == 2 {
                    folds.push((lpos[0], rpos[1], decl));
                    folds.push((lpos[1], rpos[0], decl));
                } else {
                    return Err(ProductError::CrossedShape {
                        left_rule: li,
                        right_rule: ri,
                        found_left: lpos.len(),
                        found_right: rpos.len(),
                    });
                }
            }
            AlignmentPolicy::Explicit => {
                if lpos.len() == 1 && rpos.len() == 1 && !spec.explicit.contains_key(&(li, ri)) {
                    folds.push((lpos[0], rpos[0], decl));
                    continue;
                }
                let Some(given) = spec.explicit.get(&(li, ri)) else {
                    return Err(ProductError::MissingAlignment {
                        left_rule: li,
                        right_rule: ri,
                        pair: decl.name.clone(),
                    });
                };
                let mut covered = false;
                for (a, b) in given {
                    let a_here = lpos.contains(a);
                    let b_here = rpos.contains(b);
                    if a_here != b_here {
                        let (side, pos) = if a_here { ("right", *b) } else { ("left", *a) };
                        return Err(ProductError::BadAlignment {
                            left_rule: li,
                            right_rule: ri,
                            side,
                            pos,
                        });
                    }
                    if a_here {
                        folds.push((*a, *b, decl));
                        covered = true;
                    }
                }
                if !covered {
                    return Err(ProductError::MissingAlignment {
                        left_rule: li,
                        right_rule: ri,
                        pair: decl.name.clone(),
                    });
                }
            }
        }
    }

    let fold_at_left: BTreeMap<usize, (usize, &PairDecl)> = folds
        .iter()
        .map(|(a, b, d)| (*a, (*b, *d)))
        .collect();
    let folded_right: BTreeSet<usize> = folds.iter().map(|(_, b, _)| *b).collect();

    let my_decl = pairs
        .iter()
        .find(|p| p.decl.left == lrule.head.key() && p.decl.right == rrule.head.key())
        .map(|p| &p.decl)
        .expect("combined rules belong to a declared pair");

    let mut head_args = lrule.head.args.clone();
    head_args.extend(rrule.head.args.iter().cloned());
    let head = Atom::new(&my_decl.name, head_args);

    let mut body = Vec::new();
    let mut sources = Vec::new();
    for (i, atom) in lrule.body.iter().enumerate() {
        if let Some((j, decl)) = fold_at_left.get(&i) {
            let mut args = atom.args.clone();
            args.extend(rrule.body[*j].args.iter().cloned());
            body.push(Atom::new(&decl.name, args));
            sources.push(BodySource::Paired { left: i, right: *j });
        } else {
            body.push(atom.clone());
            sources.push(BodySource::Left(i));
        }
    }
    for (j, atom) in rrule.body.iter().enumerate() {
        if !folded_right.contains(&j) {
            body.push(atom.clone());
            sources.push(BodySource::Right(j));
        }
    }

    let mut conditions = lrule.conditions.clone();
    conditions.extend(rrule.conditions.iter().cloned());

    let mut rule = Rule::new(head, body).with_conditions(conditions);
    rule.origin = Some(format!("rule {li} x rule {ri}"));
    rule.product = Some(ProductOrigin {
        left_rule: Some(li),
        right_rule: Some(ri),
        bridging: false,
        sources,
    });
    Ok(rule)
}

fn rename_rule(rule: &Rule, map: &BTreeMap<String, String>) -> Rule {
    let mut f = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string());
    let mut out = rule.clone();
    out.head = rule.head.rename_vars(&mut f);
    out.body = rule.body.iter().map(|b| b.rename_vars(&mut f)).collect();
    out.conditions = rule
        .conditions
        .iter()
        .map(|c| c.rename_vars(&mut f))
        .collect();
    out
}

fn positions_of(rule: &Rule, key: &(String, usize)) -> Vec<usize> {
    rule.body
        .iter()
        .enumerate()
        .filter(|(_, a)| a.key() == *key)
        .map(|(i, _)| i)
        .collect()
}

fn fresh_name(base: &str, tag: char, taken: &mut BTreeSet<String>) -> String {
    let mut name = format!("{base}{tag}");
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

/// Rename non-input predicates of `left` with suffix `1` and of `right`
/// with suffix `2`, and pair every derived predicate name the two programs
/// have in common. Shared inputs keep their names, so the factors keep
/// reading the same facts. Returns the renamed programs and the pairing.
pub fn natural_pairing(
    left: &Program,
    right: &Program,
) -> Result<(Program, Program, PairingSpec), ProductError> {
    let lren = rename_non_inputs(left, "1")?;
    let rren = rename_non_inputs(right, "2")?;

    let lderived: BTreeMap<String, usize> = left
        .derived_predicates()
        .into_iter()
        .filter(|k| !left.inputs.contains(k))
        .map(|(p, a)| (p, a))
        .collect();
    let rderived: BTreeMap<String, usize> = right
        .derived_predicates()
        .into_iter()
        .filter(|k| !right.inputs.contains(k))
        .map(|(p, a)| (p, a))
        .collect();

    let mut pairs = Vec::new();
    for (name, la) in &lderived {
        if let Some(ra) = rderived.get(name) {
            pairs.push(PairDecl {
                left: (format!("{name}1"), *la),
                right: (format!("{name}2"), *ra),
                name: format!("{name}1_2"),
            });
        }
    }
    Ok((lren, rren, PairingSpec::new(pairs)))
}

fn rename_non_inputs(prog: &Program, suffix: &str) -> Result<Program, ProductError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (name, _) in prog.predicates() {
        if prog.inputs.iter().any(|(p, _)| *p == name) {
            continue;
        }
        map.entry(name.clone())
            .or_insert_with(|| format!("{name}{suffix}"));
    }
    for (old, new) in &map {
        let clashes = prog.inputs.iter().any(|(p, _)| p == new)
            || (prog.predicates().iter().any(|(p, _)| p == new) && !map.contains_key(new));
        if clashes {
            return Err(ProductError::RenameClash(old.clone(), new.clone()));
        }
    }
    let mut out = prog.clone();
    let fix = |atom: &mut Atom| {
        if let Some(new) = map.get(&atom.predicate) {
            atom.predicate = new.clone();
        }
    };
    for rule in &mut out.rules {
        fix(&mut rule.head);
        for atom in &mut rule.body {
            fix(atom);
        }
        for cond in &mut rule.conditions {
            if let SideCondition::Guard(atom) = cond {
                fix(atom);
            }
        }
    }
    for ax in &mut out.axioms {
        fix(&mut ax.atom);
    }
    out.pairs.clear();
    Ok(out)
}
