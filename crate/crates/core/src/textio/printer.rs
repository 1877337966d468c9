use std::fmt::Write;

use crate::kernel::Program;

/// Canonical text form: directives, rules, then facts, one clause per line.
/// Parsing the result reproduces the program structurally.
pub fn render_program(prog: &Program) -> String {
    let mut out = String::new();
    let mut sections = 0;
    let mut sep = |out: &mut String| {
        if sections > 0 {
            out.push('\n');
        }
        sections += 1;
    };

    let has_directives =
        prog.semiring.is_some() || !prog.inputs.is_empty() || !prog.pairs.is_empty();
    if has_directives {
        sep(&mut out);
        if let Some(sr) = prog.semiring {
            writeln!(out, "@semiring {}.", sr.name()).unwrap();
        }
        for (name, arity) in &prog.inputs {
            writeln!(out, "@input {name}/{arity}.").unwrap();
        }
        for pair in &prog.pairs {
            writeln!(out, "{pair}.").unwrap();
        }
    }
    if !prog.rules.is_empty() {
        sep(&mut out);
        for rule in &prog.rules {
            writeln!(out, "{rule}.").unwrap();
        }
    }
    if !prog.axioms.is_empty() {
        sep(&mut out);
        for ax in &prog.axioms {
            writeln!(out, "{ax}.").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Atom, Axiom, Rule, Term};
    use crate::semiring::{SemiringId, Value};
    use crate::textio::parse_program;

    #[test]
    fn renders_all_sections() {
        let text = "@semiring viterbi.\n@input string/2.\n\n\
                    goal += s(X) if string(N, W).\n\ns(a) = 0.5.\n";
        let prog = parse_program(text).unwrap();
        assert_eq!(render_program(&prog), text);
    }

    #[test]
    fn round_trip_is_structural_identity() {
        let mut prog = Program::default();
        prog.semiring = Some(SemiringId::Entropy3);
        prog.inputs.insert(("string".into(), 2));
        prog.rules.push(Rule::new(
            Atom::new("length", vec![Term::var("N")]),
            vec![Atom::new("string", vec![Term::var("N"), Term::var("W")])],
        ));
        prog.axioms.push(Axiom::new(
            Atom::new("p", vec![Term::sym("a")]),
            Value::Triple(0.5, 0.0, 1.0),
        ));
        let text = render_program(&prog);
        assert!(text.contains("p(a) = <0.5,0,1>."));
        let back = parse_program(&text).unwrap();
        assert!(back.structurally_eq(&prog));
    }

    #[test]
    fn idempotent_canonicalization() {
        let messy = "goal+=s(X)   if  string(N,W),N!=X.%note\ns( a )=0.5.";
        let once = parse_program(messy).unwrap();
        let text1 = render_program(&once);
        let twice = parse_program(&text1).unwrap();
        assert!(once.structurally_eq(&twice));
        assert_eq!(text1, render_program(&twice));
    }
}
