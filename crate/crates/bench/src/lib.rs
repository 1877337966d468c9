//! Program generators sized to order, so the benchmarks can sweep input
//! scale without hand-written fixtures.

use hornbeam_core::{parse_program, Atom, Axiom, Program, Term, Value};
use rand::Rng;

fn fact(prog: &mut Program, pred: &str, args: Vec<Term>, w: f64) {
    prog.axioms.push(Axiom {
        atom: Atom::new(pred, args),
        value: Value::Real(w),
        span: None,
    });
}

/// Random layered reachability instance: `layers` ranks of `width` nodes,
/// edges only between adjacent ranks. A deterministic backbone keeps the
/// goal derivable no matter what the extra random edges do.
pub fn layered_graph(layers: usize, width: usize, rng: &mut impl Rng) -> Program {
    let mut prog = parse_program(
        "reachable(Q) += initial(Q).\n\
         reachable(Q) += reachable(P) * edge(P, Q).\n\
         goal += reachable(Q) * final(Q).\n",
    )
    .unwrap();
    let node = |k: usize, i: usize| Term::sym(format!("n{k}_{i}"));
    fact(&mut prog, "initial", vec![node(0, 0)], 1.0);
    for i in 0..width {
        fact(&mut prog, "final", vec![node(layers - 1, i)], 1.0);
    }
    for k in 0..layers - 1 {
        for i in 0..width {
            fact(
                &mut prog,
                "edge",
                vec![node(k, i), node(k + 1, (i + 1) % width)],
                rng.random_range(0.05..1.0),
            );
            for j in 0..width {
                if j != (i + 1) % width && rng.random_bool(0.3) {
                    fact(
                        &mut prog,
                        "edge",
                        vec![node(k, i), node(k + 1, j)],
                        rng.random_range(0.05..1.0),
                    );
                }
            }
        }
    }
    prog
}

/// Linear automaton of `steps` states with two parallel arcs per step, so the
/// goal has exactly 2^steps distinct proofs.
pub fn branching_chain(steps: usize) -> Program {
    let mut prog = parse_program(
        "goal += path(Q) * final(Q).\n\
         path(Q) += initial(Q).\n\
         path(Q) += path(P) * arc(P, Q, A).\n",
    )
    .unwrap();
    let state = |i: usize| Term::sym(format!("q{i}"));
    fact(&mut prog, "initial", vec![state(0)], 1.0);
    fact(&mut prog, "final", vec![state(steps)], 1.0);
    for i in 0..steps {
        fact(
            &mut prog,
            "arc",
            vec![state(i), state(i + 1), Term::sym("a")],
            0.6,
        );
        fact(
            &mut prog,
            "arc",
            vec![state(i), state(i + 1), Term::sym("b")],
            0.4,
        );
    }
    prog
}

/// Maximally ambiguous bracketing of a `words`-long sentence: every split of
/// every span is a derivation, which drives cubic-time chart fill.
pub fn dense_spans(words: usize) -> Program {
    let mut prog = parse_program(
        "c(I, K) += c(I, J) * c(J, K) * glue.\n\
         c(I, K) += word(I, K).\n\
         goal += c(0, N) * length(N).\n",
    )
    .unwrap();
    for i in 0..words {
        fact(
            &mut prog,
            "word",
            vec![Term::Int(i as i64), Term::Int(i as i64 + 1)],
            1.0,
        );
    }
    fact(&mut prog, "glue", vec![], 0.5);
    fact(&mut prog, "length", vec![Term::Int(words as i64)], 1.0);
    prog
}
