//! The term language and program representation shared by every stage:
//! parser, solver, proof enumeration, and the program transformations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::product::{ProductMeta, ProductOrigin};
use crate::semiring::{SemiringId, Value};

mod alpha;
mod desugar;
mod unify;
mod validate;

pub use alpha::alpha_equivalent;
pub use desugar::desugar_arithmetic;
pub use unify::{substitute, substitute_term, unify, unify_into, KernelError};
pub use validate::{has_errors, validate, Diagnostic, Severity};

/// 1-based position of a clause in its source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub col: usize,
}

/// First-order term. `Arith(v, k)` is the sugared form `V + k` / `V - k`;
/// it stays symbolic until `v` is bound to an integer. Constant bases are
/// folded at parse time, so a live `Arith` always has a variable base.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Sym(String),
    Var(String),
    Nil,
    Cons(Box<Term>, Box<Term>),
    Arith(String, i64),
}

impl Term {
    pub fn sym(name: impl Into<String>) -> Term {
        Term::Sym(name.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Cons(Box::new(head), Box::new(tail))
    }

    pub fn list<I: IntoIterator<Item = Term>>(items: I) -> Term
    where
        I::IntoIter: DoubleEndedIterator,
    {
        items.into_iter().rev().fold(Term::Nil, |t, h| Term::cons(h, t))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Int(_) | Term::Sym(_) | Term::Nil => true,
            Term::Var(_) | Term::Arith(_, _) => false,
            Term::Cons(h, t) => h.is_ground() && t.is_ground(),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) | Term::Arith(v, _) => {
                out.insert(v.clone());
            }
            Term::Cons(h, t) => {
                h.vars_into(out);
                t.vars_into(out);
            }
            _ => {}
        }
    }

    /// Applies `f` to every variable name, rebuilding the term.
    pub fn rename_vars(&self, f: &mut dyn FnMut(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Arith(v, k) => Term::Arith(f(v), *k),
            Term::Cons(h, t) => Term::cons(h.rename_vars(f), t.rename_vars(f)),
            other => other.clone(),
        }
    }
}

/// True when `s` can be written without quotes: lowercase letter first,
/// then letters, digits, underscores, and not a reserved word.
pub fn bare_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    let ok_first = matches!(chars.next(), Some(c) if c.is_ascii_lowercase());
    ok_first
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "if" | "as" | "true" | "false" | "inf" | "nan")
}

fn fmt_quoted(s: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            _ => write!(f, "{}", c)?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{}", n),
            Term::Sym(s) => {
                if bare_symbol(s) {
                    f.write_str(s)
                } else {
                    fmt_quoted(s, f)
                }
            }
            Term::Var(v) => f.write_str(v),
            Term::Nil => f.write_str("[]"),
            Term::Cons(h, t) => {
                // a cons or arith head needs parens: (a :: b) :: c
                match **h {
                    Term::Cons(_, _) | Term::Arith(_, _) => write!(f, "({}) :: {}", h, t),
                    _ => write!(f, "{} :: {}", h, t),
                }
            }
            Term::Arith(v, k) => {
                if *k >= 0 {
                    write!(f, "{} + {}", v, k)
                } else {
                    write!(f, "{} - {}", v, -k)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (String, usize) {
        (self.predicate.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        for a in &self.args {
            a.vars_into(out);
        }
    }

    pub fn rename_vars(&self, f: &mut dyn FnMut(&str) -> String) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.rename_vars(f)).collect(),
        }
    }

    /// Canonical rendering; charts sort and report by this text.
    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if bare_symbol(&self.predicate) {
            f.write_str(&self.predicate)?;
        } else {
            fmt_quoted(&self.predicate, f)?;
        }
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Side conditions filter rule instances without contributing weight,
/// except that a satisfied `Guard` multiplies in the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideCondition {
    Eq(Term, Term),
    Neq(Term, Term),
    Guard(Atom),
}

impl SideCondition {
    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            SideCondition::Eq(a, b) | SideCondition::Neq(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
            SideCondition::Guard(g) => g.vars_into(out),
        }
    }

    pub fn rename_vars(&self, f: &mut dyn FnMut(&str) -> String) -> SideCondition {
        match self {
            SideCondition::Eq(a, b) => SideCondition::Eq(a.rename_vars(f), b.rename_vars(f)),
            SideCondition::Neq(a, b) => SideCondition::Neq(a.rename_vars(f), b.rename_vars(f)),
            SideCondition::Guard(g) => SideCondition::Guard(g.rename_vars(f)),
        }
    }
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideCondition::Eq(a, b) => write!(f, "{} = {}", a, b),
            SideCondition::Neq(a, b) => write!(f, "{} != {}", a, b),
            SideCondition::Guard(g) => write!(f, "{}", g),
        }
    }
}

/// One Horn equation: `head += body1 * ... * bodyN if conditions.`
/// The value of the head accumulates, over all satisfying instances, the
/// semiring product of the body values.
#[derive(Clone, Debug)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub conditions: Vec<SideCondition>,
    /// Free-text provenance note, e.g. which factor rules a product rule
    /// came from. Not serialized.
    pub origin: Option<String>,
    /// Structured provenance for product-generated rules; drives proof
    /// projection. Not serialized.
    pub product: Option<ProductOrigin>,
    pub span: Option<SourceSpan>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Atom>) -> Rule {
        Rule {
            head,
            body,
            conditions: Vec::new(),
            origin: None,
            product: None,
            span: None,
        }
    }

    pub fn with_conditions(mut self, conditions: Vec<SideCondition>) -> Rule {
        self.conditions = conditions;
        self
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.head.vars_into(&mut out);
        for b in &self.body {
            b.vars_into(&mut out);
        }
        for c in &self.conditions {
            c.vars_into(&mut out);
        }
        out
    }

    /// Content equality: ignores origin, product metadata, and spans.
    pub fn structurally_eq(&self, other: &Rule) -> bool {
        self.head == other.head && self.body == other.body && self.conditions == other.conditions
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} += ", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{}", b)?;
        }
        if !self.conditions.is_empty() {
            f.write_str(" if ")?;
            for (i, c) in self.conditions.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", c)?;
            }
        }
        Ok(())
    }
}

/// A ground atom with its given weight.
#[derive(Clone, Debug)]
pub struct Axiom {
    pub atom: Atom,
    pub value: Value,
    pub span: Option<SourceSpan>,
}

impl Axiom {
    pub fn new(atom: Atom, value: Value) -> Axiom {
        Axiom {
            atom,
            value,
            span: None,
        }
    }

    pub fn structurally_eq(&self, other: &Axiom) -> bool {
        self.atom == other.atom && self.value == other.value
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.atom, self.value)
    }
}

/// A declared pairing of two predicates with the name of their product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDecl {
    pub left: (String, usize),
    pub right: (String, usize),
    pub name: String,
}

impl fmt::Display for PairDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "@pair {}/{} {}/{} as {}",
            self.left.0, self.left.1, self.right.0, self.right.1, self.name
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub axioms: Vec<Axiom>,
    /// Semiring named by an `@semiring` directive, if any.
    pub semiring: Option<SemiringId>,
    /// Pairings named by `@pair` directives or recorded by a product.
    pub pairs: Vec<PairDecl>,
    /// Predicates declared `@input`: supplied externally, allowed to be
    /// both axiom-backed and rule-defined, and left alone by renaming.
    pub inputs: BTreeSet<(String, usize)>,
    /// Set when this program came out of a product transformation.
    /// Not serialized.
    pub product: Option<ProductMeta>,
}

impl Program {
    pub fn new() -> Program {
        Program::default()
    }

    /// Predicates that appear at the head of at least one rule.
    pub fn derived_predicates(&self) -> BTreeSet<(String, usize)> {
        self.rules.iter().map(|r| r.head.key()).collect()
    }

    /// Predicates that appear in at least one axiom.
    pub fn axiom_predicates(&self) -> BTreeSet<(String, usize)> {
        self.axioms.iter().map(|a| a.atom.key()).collect()
    }

    /// Every predicate/arity mentioned anywhere.
    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.insert(r.head.key());
            for b in &r.body {
                out.insert(b.key());
            }
            for c in &r.conditions {
                if let SideCondition::Guard(g) = c {
                    out.insert(g.key());
                }
            }
        }
        for a in &self.axioms {
            out.insert(a.atom.key());
        }
        for i in &self.inputs {
            out.insert(i.clone());
        }
        out
    }

    /// Content equality: directives, rules, and axioms in order, ignoring
    /// spans and provenance. This is the identity `parse(render(p)) == p`
    /// preserves.
    pub fn structurally_eq(&self, other: &Program) -> bool {
        self.semiring == other.semiring
            && self.pairs == other.pairs
            && self.inputs == other.inputs
            && self.rules.len() == other.rules.len()
            && self
                .rules
                .iter()
                .zip(&other.rules)
                .all(|(a, b)| a.structurally_eq(b))
            && self.axioms.len() == other.axioms.len()
            && self
                .axioms
                .iter()
                .zip(&other.axioms)
                .all(|(a, b)| a.structurally_eq(b))
    }
}

/// Variable bindings produced by unification. Bindings are ground terms.
pub type Substitution = BTreeMap<String, Term>;

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(p, args)
    }

    #[test]
    fn term_display_round_shapes() {
        assert_eq!(Term::Int(-3).to_string(), "-3");
        assert_eq!(Term::sym("abc_1").to_string(), "abc_1");
        assert_eq!(Term::sym("If").to_string(), "\"If\"");
        assert_eq!(Term::sym("if").to_string(), "\"if\"");
        assert_eq!(Term::sym("two words").to_string(), "\"two words\"");
        assert_eq!(Term::var("Q1").to_string(), "Q1");
        assert_eq!(Term::Nil.to_string(), "[]");
        let l = Term::list([Term::sym("a"), Term::sym("b")]);
        assert_eq!(l.to_string(), "a :: b :: []");
        let nested = Term::cons(Term::cons(Term::sym("a"), Term::Nil), Term::Nil);
        assert_eq!(nested.to_string(), "(a :: []) :: []");
        assert_eq!(Term::Arith("I".into(), -1).to_string(), "I - 1");
        assert_eq!(Term::Arith("I".into(), 2).to_string(), "I + 2");
    }

    #[test]
    fn atom_display() {
        assert_eq!(a("goal", vec![]).to_string(), "goal");
        assert_eq!(
            a("edge", vec![Term::sym("a"), Term::sym("b")]).to_string(),
            "edge(a, b)"
        );
        assert_eq!(
            a("trigram", vec![Term::sym("if"), Term::sym("it")]).to_string(),
            "trigram(\"if\", it)"
        );
    }

    #[test]
    fn rule_display() {
        let r = Rule::new(
            a("reachable", vec![Term::var("Q")]),
            vec![
                a("reachable", vec![Term::var("P")]),
                a("edge", vec![Term::var("P"), Term::var("Q")]),
            ],
        )
        .with_conditions(vec![SideCondition::Neq(Term::var("P"), Term::var("Q"))]);
        assert_eq!(
            r.to_string(),
            "reachable(Q) += reachable(P) * edge(P, Q) if P != Q"
        );
    }

    #[test]
    fn groundness_and_vars() {
        let t = Term::cons(Term::var("X"), Term::list([Term::sym("a")]));
        assert!(!t.is_ground());
        let mut vs = BTreeSet::new();
        t.vars_into(&mut vs);
        assert_eq!(vs.into_iter().collect::<Vec<_>>(), vec!["X".to_string()]);
        assert!(Term::Arith("I".into(), 1).is_ground() == false);
    }

    #[test]
    fn structural_equality_ignores_metadata() {
        let mut r1 = Rule::new(a("p", vec![Term::var("X")]), vec![a("q", vec![Term::var("X")])]);
        let mut r2 = r1.clone();
        r1.span = Some(SourceSpan { line: 1, col: 1 });
        r2.origin = Some("elsewhere".into());
        assert!(r1.structurally_eq(&r2));
    }
}
