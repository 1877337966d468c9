//! End-to-end tests of the binary. Each golden test drives a subcommand and
//! compares its bytes against the same operation called directly on the
//! library, so the CLI can never drift from the engine.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hornbeam_core::corpus;
use hornbeam_core::infometrics::{entropy_of_goal, kl_divergence};
use hornbeam_core::kernel::Atom;
use hornbeam_core::product::{apply_edits, natural_pairing, product, EditPass, PairingSpec, RuleSelector};
use hornbeam_core::proofs::{aggregate, enumerate_proofs, ProofLimits};
use hornbeam_core::semiring::{SemiringId, Value};
use hornbeam_core::solver::{solve, SolveOptions};
use hornbeam_core::textio::{
    parse_facts_tsv, parse_program, render_chart, render_number, render_value_json,
};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hornbeam"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn materialize(name: &str, dir: &Path) -> (PathBuf, PathBuf) {
    let fx = corpus::fixture(name).unwrap();
    let wlp = dir.join(format!("{name}.wlp"));
    let tsv = dir.join(format!("{name}.tsv"));
    fs::write(&wlp, fx.program_text).unwrap();
    fs::write(&tsv, fx.facts_tsv).unwrap();
    (wlp, tsv)
}

#[test]
fn solve_chart_matches_the_library_route() {
    let dir = tempfile::tempdir().unwrap();
    materialize("graph4", dir.path());
    let out = run_in(
        dir.path(),
        &["solve", "graph4.wlp", "--facts", "graph4.tsv", "--semiring", "viterbi"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let prog = corpus::fixture("graph4").unwrap().assembled();
    let chart = solve(&prog, SemiringId::Viterbi.get(), &SolveOptions::default()).unwrap();
    assert_eq!(stdout(&out), render_chart(&chart));
}

#[test]
fn solve_query_prints_matching_atoms_only() {
    let dir = tempfile::tempdir().unwrap();
    materialize("graph4", dir.path());
    let out = run_in(
        dir.path(),
        &[
            "solve",
            "graph4.wlp",
            "--facts",
            "graph4.tsv",
            "--semiring",
            "viterbi",
            "--query",
            "reachable(Q)",
        ],
    );
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("{\"atom\":\"reachable(b)\",\"value\":0.16}"));
    assert_eq!(text.lines().count(), 3, "a, b, d are reachable");
    assert!(!text.contains("edge"));
}

#[test]
fn fixtures_round_trip_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["fixtures", "fsa6", "-o", "out"]);
    assert_eq!(code(&out), 0);
    let fx = corpus::fixture("fsa6").unwrap();
    assert_eq!(
        fs::read_to_string(dir.path().join("out/fsa6.wlp")).unwrap(),
        fx.program_text
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("out/fsa6.tsv")).unwrap(),
        fx.facts_tsv
    );
    let missing = run_in(dir.path(), &["fixtures", "no_such", "-o", "out"]);
    assert_eq!(code(&missing), 1);
    assert!(stderr(&missing).contains("graph4"), "lists what exists");
}

#[test]
fn check_separates_clean_from_broken() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.wlp");
    fs::write(&good, "p(X) += q(X).\nq(a) = 1.\n").unwrap();
    let out = run_in(dir.path(), &["check", "good.wlp"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("ok"));

    let bad = dir.path().join("bad.wlp");
    fs::write(&bad, "p(X) += q(Y).\nq(a) = 1.\n").unwrap();
    let out = run_in(dir.path(), &["check", "bad.wlp"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("error"));
}

#[test]
fn unparseable_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("torn.wlp"), "p(X +=.\n").unwrap();
    let out = run_in(dir.path(), &["check", "torn.wlp"]);
    assert_eq!(code(&out), 2);
    let out = run_in(dir.path(), &["solve", "torn.wlp", "--semiring", "real"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_mistakes_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    materialize("graph4", dir.path());
    let out = run_in(dir.path(), &["solve", "graph4.wlp"]);
    assert_eq!(code(&out), 1, "--semiring is required");
    let out = run_in(dir.path(), &["frobnicate"]);
    assert_eq!(code(&out), 1);
    let out = run_in(
        dir.path(),
        &[
            "solve",
            "graph4.wlp",
            "--facts",
            "graph4.tsv",
            "--semiring",
            "real",
            "--mode",
            "priority",
        ],
    );
    assert_eq!(code(&out), 1, "priority needs a superior semiring");
}

#[test]
fn divergence_exits_four_with_a_residual_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("diverge.wlp");
    fs::write(
        &file,
        "@input p/1.\np(a) = 1.\nw(a) = 1.\np(X) += p(X) * w(X).\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["solve", "diverge.wlp", "--semiring", "real"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("residual"));
    assert!(stdout(&out).is_empty(), "no half-finished chart");
}

#[test]
fn proofs_tally_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    materialize("fsa6", dir.path());
    let out = run_in(
        dir.path(),
        &["proofs", "fsa6.wlp", "--facts", "fsa6.tsv", "--goal", "goal"],
    );
    assert_eq!(code(&out), 0);

    let prog = corpus::fixture("fsa6").unwrap().assembled();
    let sr = SemiringId::Real.get();
    let set = enumerate_proofs(&prog, sr, &Atom::new("goal", vec![]), &ProofLimits::default())
        .unwrap();
    let total = aggregate(&set.proofs, sr).unwrap();
    let expected_tail = format!(
        "# proofs {} total {}\n",
        set.proofs.len(),
        render_value_json(&total)
    );
    assert!(stdout(&out).ends_with(&expected_tail), "{}", stdout(&out));
    assert_eq!(set.proofs.len(), 5);
}

const LEFT_GRAPH: &str = "\
reach1(Q) += init1(Q).
reach1(Q) += reach1(P) * edge1(P, Q).
init1(a) = 1.
edge1(a, b) = 0.5.
";

const RIGHT_GRAPH: &str = "\
reach2(Q) += init2(Q).
reach2(Q) += reach2(P) * edge2(P, Q).
init2(a) = 1.
edge2(a, b) = 0.25.
";

#[test]
fn product_with_an_explicit_pair_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("l.wlp"), LEFT_GRAPH).unwrap();
    fs::write(dir.path().join("r.wlp"), RIGHT_GRAPH).unwrap();
    let out = run_in(
        dir.path(),
        &["product", "l.wlp", "r.wlp", "--pair", "reach1/1=reach2/1:reach12"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let l = parse_program(LEFT_GRAPH).unwrap();
    let r = parse_program(RIGHT_GRAPH).unwrap();
    let spec = PairingSpec::new(vec![hornbeam_core::kernel::PairDecl {
        left: ("reach1".into(), 1),
        right: ("reach2".into(), 1),
        name: "reach12".into(),
    }]);
    let joint = product(&l, &r, &spec).unwrap();
    assert_eq!(stdout(&out), hornbeam_core::textio::render_program(&joint));
    assert_eq!(joint.rules.len(), 8, "4 factor rules + 4 combinations");
}

#[test]
fn natural_product_and_edits_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let shared = "\
reachable(Q) += initial(Q).
reachable(Q) += reachable(P) * edge(P, Q).
";
    fs::write(dir.path().join("l.wlp"), format!("{shared}initial(a) = 1.\nedge(a, b) = 0.5.\n"))
        .unwrap();
    fs::write(dir.path().join("r.wlp"), format!("{shared}initial(a) = 1.\nedge(a, b) = 0.25.\n"))
        .unwrap();
    let out = run_in(
        dir.path(),
        &["product", "l.wlp", "r.wlp", "--natural", "-o", "prod.wlp"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let l = parse_program(&fs::read_to_string(dir.path().join("l.wlp")).unwrap()).unwrap();
    let r = parse_program(&fs::read_to_string(dir.path().join("r.wlp")).unwrap()).unwrap();
    let (lren, rren, spec) = natural_pairing(&l, &r).unwrap();
    let joint = product(&lren, &rren, &spec).unwrap();
    assert_eq!(
        fs::read_to_string(dir.path().join("prod.wlp")).unwrap(),
        hornbeam_core::textio::render_program(&joint)
    );

    let out = run_in(
        dir.path(),
        &[
            "edit",
            "prod.wlp",
            "--constrain",
            "7:Q1=Q2",
            "--drop-rule",
            "5",
            "--drop-rule",
            "6",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let edited = apply_edits(
        &joint,
        &[
            EditPass::Constrain {
                rule: 7,
                equalities: vec![("Q1".into(), "Q2".into())],
            },
            EditPass::DropRules(RuleSelector::Ids([5, 6].into())),
        ],
    )
    .unwrap();
    assert_eq!(stdout(&out), hornbeam_core::textio::render_program(&edited));

    let refused = run_in(dir.path(), &["edit", "prod.wlp", "--collapse", "nosuch/2:0=1"]);
    assert_eq!(code(&refused), 5);
}

#[test]
fn entropy_report_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("two.wlp"), "goal += pick(X).\n").unwrap();
    fs::write(dir.path().join("two.tsv"), "pick\tl\t0.5\npick\tr\t0.5\n").unwrap();
    let out = run_in(
        dir.path(),
        &["entropy", "two.wlp", "--facts", "two.tsv", "--goal", "goal"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut prog = parse_program("goal += pick(X).\n").unwrap();
    prog.axioms
        .extend(parse_facts_tsv("pick\tl\t0.5\npick\tr\t0.5\n", &Value::Real(1.0)).unwrap());
    let report = entropy_of_goal(&prog, &Atom::new("goal", vec![]), &SolveOptions::default())
        .unwrap();
    let expected = format!(
        "{{\"w_prime\":{},\"h_prime\":{},\"entropy\":{}}}\n",
        render_number(report.w_prime),
        render_number(report.h_prime),
        render_number(report.entropy)
    );
    assert_eq!(stdout(&out), expected);
    assert!((report.entropy - std::f64::consts::LN_2).abs() < 1e-12);

    let missing = run_in(dir.path(), &["entropy", "two.wlp", "--goal", "goal"]);
    assert_eq!(code(&missing), 3, "no facts, goal underivable");
}

#[test]
fn kl_report_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("two.wlp"), "goal += pick(X).\n").unwrap();
    fs::write(dir.path().join("p.tsv"), "pick\tl\t2\npick\tr\t1\n").unwrap();
    fs::write(dir.path().join("q.tsv"), "pick\tl\t1\npick\tr\t1\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "kl",
            "two.wlp",
            "--p-facts",
            "p.tsv",
            "--q-facts",
            "q.tsv",
            "--goal",
            "goal",
            "--generalized",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let prog = parse_program("goal += pick(X).\n").unwrap();
    let p = parse_facts_tsv("pick\tl\t2\npick\tr\t1\n", &Value::Real(1.0)).unwrap();
    let q = parse_facts_tsv("pick\tl\t1\npick\tr\t1\n", &Value::Real(1.0)).unwrap();
    let report = kl_divergence(
        &prog,
        &p,
        &q,
        &Atom::new("goal", vec![]),
        &SolveOptions::default(),
        true,
    )
    .unwrap();
    let expected = format!(
        "{{\"p_bar\":{},\"q_bar\":{},\"r_bar\":{},\"ce_pq\":{},\"ce_pp\":{},\"kl\":{},\"generalized_kl\":{}}}\n",
        render_number(report.p_bar),
        render_number(report.q_bar),
        render_number(report.r_bar),
        render_number(report.ce_pq),
        render_number(report.ce_pp),
        render_number(report.kl),
        render_number(report.generalized_kl.unwrap()),
    );
    assert_eq!(stdout(&out), expected);
    assert!(report.kl > 0.0);
}

#[test]
fn runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    materialize("g18", dir.path());
    let args = ["solve", "g18.wlp", "--facts", "g18.tsv", "--semiring", "real"];
    let first = run_in(dir.path(), &args);
    let second = run_in(dir.path(), &args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}
