//! Static checks. `validate` returns diagnostics; an empty error set is
//! the precondition every downstream stage assumes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Atom, Program, SideCondition, SourceSpan, Term};
use crate::semiring::SemiringId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Option<SourceSpan>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.span {
            Some(s) => write!(f, "{}: {}:{}: {}", tag, s.line, s.col, self.message),
            None => write!(f, "{}: {}", tag, self.message),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

struct Ctx {
    out: Vec<Diagnostic>,
    arities: BTreeMap<String, (usize, Option<SourceSpan>)>,
}

impl Ctx {
    fn error(&mut self, span: Option<SourceSpan>, message: String) {
        self.out.push(Diagnostic {
            severity: Severity::Error,
            span,
            message,
        });
    }

    fn see_atom(&mut self, atom: &Atom, span: Option<SourceSpan>, place: &str) {
        self.see_pred(&atom.predicate, atom.args.len(), span, place);
    }

    fn see_pred(&mut self, name: &str, arity: usize, span: Option<SourceSpan>, place: &str) {
        match self.arities.get(name) {
            None => {
                self.arities.insert(name.to_string(), (arity, span));
            }
            Some((known, _)) if *known != arity => {
                let known = *known;
                self.error(
                    span,
                    format!(
                        "predicate {} used with arity {} in {} but with arity {} elsewhere",
                        name, arity, place, known
                    ),
                );
            }
            _ => {}
        }
    }
}

/// Pure: the same program always yields the same diagnostics.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut ctx = Ctx {
        out: Vec::new(),
        arities: BTreeMap::new(),
    };

    for (i, rule) in program.rules.iter().enumerate() {
        check_rule(program, i, rule, &mut ctx);
    }

    let mut seen = BTreeSet::new();
    let rule_heads = program.derived_predicates();
    for axiom in &program.axioms {
        ctx.see_atom(&axiom.atom, axiom.span, "an axiom");
        if !axiom.atom.is_ground() {
            ctx.error(axiom.span, format!("axiom {} is not ground", axiom.atom));
        }
        if !seen.insert(axiom.atom.clone()) {
            ctx.error(
                axiom.span,
                format!("duplicate axiom for {}; merge weights explicitly", axiom.atom),
            );
        }
        let key = axiom.atom.key();
        if rule_heads.contains(&key) && !program.inputs.contains(&key) {
            ctx.error(
                axiom.span,
                format!(
                    "{}/{} has both axioms and rules; declare it with @input to allow that",
                    key.0, key.1
                ),
            );
        }
        if let Some(id) = program.semiring {
            if let Err(e) = id.get().check_axiom(&axiom.value) {
                ctx.error(axiom.span, e.to_string());
            }
        }
    }

    for (name, arity) in &program.inputs {
        ctx.see_pred(name, *arity, None, "an @input directive");
    }

    let known = program.predicates();
    let mut paired: BTreeSet<&str> = BTreeSet::new();
    for pair in &program.pairs {
        for side in [&pair.left, &pair.right] {
            if !known.contains(side) {
                ctx.error(
                    None,
                    format!("@pair names {}/{} which the program never defines", side.0, side.1),
                );
            }
            if !paired.insert(side.0.as_str()) {
                ctx.error(None, format!("predicate {} appears in two pairs", side.0));
            }
        }
    }

    if program.semiring == Some(SemiringId::Boolean) {
        // nothing extra: carrier check above covers it
    }

    ctx.out
}

fn check_rule(_program: &Program, index: usize, rule: &super::Rule, ctx: &mut Ctx) {
    let at = |what: &str| format!("rule {} ({})", index, what);

    if rule.body.is_empty() {
        ctx.error(rule.span, format!("{}: empty body", at(&rule.head.to_string())));
    }
    ctx.see_atom(&rule.head, rule.span, "a rule head");
    for b in &rule.body {
        ctx.see_atom(b, rule.span, "a rule body");
    }
    for c in &rule.conditions {
        if let SideCondition::Guard(g) = c {
            ctx.see_atom(g, rule.span, "a guard");
        }
    }

    // Variables bound by body atoms, then grown through Eq conditions that
    // can be solved left-to-right in some order.
    let mut bound: BTreeSet<String> = BTreeSet::new();
    for b in &rule.body {
        b.vars_into(&mut bound);
    }
    loop {
        let mut changed = false;
        for c in &rule.conditions {
            if let SideCondition::Eq(l, r) = c {
                for (this, other) in [(l, r), (r, l)] {
                    if let Some(v) = solvable_var(this) {
                        let mut ov = BTreeSet::new();
                        other.vars_into(&mut ov);
                        if !bound.contains(v) && ov.iter().all(|x| bound.contains(x)) {
                            bound.insert(v.to_string());
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut head_vars = BTreeSet::new();
    rule.head.vars_into(&mut head_vars);
    for v in head_vars.difference(&bound) {
        ctx.error(
            rule.span,
            format!(
                "{}: head variable {} is not bound by the body or an equality condition",
                at(&rule.head.to_string()),
                v
            ),
        );
    }

    for c in &rule.conditions {
        let mut cv = BTreeSet::new();
        c.vars_into(&mut cv);
        let unbound: Vec<_> = cv.difference(&bound).cloned().collect();
        if !unbound.is_empty() {
            ctx.error(
                rule.span,
                format!(
                    "{}: condition {} uses unbound {}",
                    at(&rule.head.to_string()),
                    c,
                    unbound.join(", ")
                ),
            );
        }
    }
}

/// A term that an equality condition can solve for: a bare variable or an
/// arithmetic term over one.
fn solvable_var(t: &Term) -> Option<&str> {
    match t {
        Term::Var(v) | Term::Arith(v, _) => Some(v),
        _ => None,
    }
}
