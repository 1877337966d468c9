//! Built-in fixture programs: small graphs, automata, grammars, and
//! translation models with hand-checkable weights. Each fixture bundles a
//! program, a fact table in the TSV ingestion format, and the values a
//! solve is expected to produce.

use crate::kernel::{Atom, Axiom, Program};
use crate::semiring::{SemiringId, Value};
use crate::solver::Chart;
use crate::textio::{parse_facts_tsv, parse_program, parse_term_list};

/// One pinned chart value: solving the fixture under `semiring` must give
/// `value` at `atom`, within `tolerance`. A zero value means the atom must
/// be absent (or carry the zero) after solving.
#[derive(Debug, Clone)]
pub struct Expectation {
    pub semiring: SemiringId,
    pub atom: Atom,
    pub value: Value,
    pub tolerance: f64,
    /// where the number comes from: a closed form, an enumeration, or a
    /// hand computation small enough to redo on paper
    pub note: &'static str,
}

impl Expectation {
    pub fn check(&self, chart: &Chart) -> Result<(), String> {
        let sr = self.semiring.get();
        match chart.get(&self.atom) {
            None => {
                if sr.is_zero(&self.value) {
                    Ok(())
                } else {
                    Err(format!(
                        "{} absent, expected {:?} ({})",
                        self.atom.text(),
                        self.value,
                        self.note
                    ))
                }
            }
            Some(got) => match sr.approx_eq(got, &self.value, self.tolerance) {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!(
                    "{} = {:?}, expected {:?} within {} ({})",
                    self.atom.text(),
                    got,
                    self.value,
                    self.tolerance,
                    self.note
                )),
                Err(e) => Err(e.to_string()),
            },
        }
    }
}

/// A named program plus its data and expected results. `program_text` and
/// `facts_tsv` are the authoritative sources; the parsed forms are kept so
/// callers need not reparse.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub program_text: &'static str,
    pub facts_tsv: &'static str,
    pub program: Program,
    pub facts: Vec<Axiom>,
    pub expectations: Vec<Expectation>,
}

impl Fixture {
    /// The program with the fact table appended to its axioms — the form a
    /// solve should run on.
    pub fn assembled(&self) -> Program {
        let mut prog = self.program.clone();
        prog.axioms.extend(self.facts.iter().cloned());
        prog
    }
}

fn make(
    name: &'static str,
    program_text: &'static str,
    facts_tsv: &'static str,
    default: Value,
    expectations: Vec<Expectation>,
) -> Fixture {
    let program = parse_program(program_text)
        .unwrap_or_else(|e| panic!("fixture {name} program: {e}"));
    let facts = parse_facts_tsv(facts_tsv, &default)
        .unwrap_or_else(|e| panic!("fixture {name} facts: {e}"));
    Fixture {
        name,
        program_text,
        facts_tsv,
        program,
        facts,
        expectations,
    }
}

fn exp(
    semiring: SemiringId,
    predicate: &str,
    args: &str,
    value: Value,
    tolerance: f64,
    note: &'static str,
) -> Expectation {
    let args = parse_term_list(args).unwrap_or_else(|e| panic!("expectation args: {e}"));
    Expectation {
        semiring,
        atom: Atom::new(predicate, args),
        value,
        tolerance,
        note,
    }
}

fn real(x: f64) -> Value {
    Value::Real(x)
}

const REACH_RULES: &str = "\
reachable(Q) += initial(Q).
reachable(Q) += reachable(P) * edge(P, Q).
";

const FSA_RULES: &str = "\
goal += path(Q) * final(Q).
path(Q) += initial(Q).
path(Q) += path(P) * arc(P, Q, A).
";

const FST_RULES: &str = "\
goal += path(Q) * final(Q).
path(Q) += initial(Q).
path(Q) += path(P) * arc(P, Q, A, B).
";

const ORDER2_RULES: &str = "\
goal += path(P, Q) * final(Q).
path(null, Q) += initial(Q).
path(Pp, Q) += path(P, Pp) * biarc(P, Pp, Q, A, B).
";

const CKY_RULES: &str = "\
goal += length(N) * start(S) * c(S, 0, N).
c(X, I - 1, I) += unary(X, W) * string(I, W).
c(X, I, K) += binary(X, Y, Z) * c(Y, I, J) * c(Z, J, K).
";

const EPS_CKY_RULES: &str = "\
goal += length(N) * start(S) * c(S, 0, N).
c(X, I, I) += unary(X, eps) * pos(I).
c(X, I - 1, I) += unary(X, W) * string(I, W).
c(X, I, K) += binary(X, Y, Z) * c(Y, I, J) * c(Z, J, K).
";

const ITG_RULES: &str = "\
goal += length1(N) * length2(M) * start(S) * c(S, 0, N, 0, M).
c(X, I - 1, I, J, J) += unary(X, W1, eps) * string1(I, W1) * pos2(J).
c(X, I, I, J - 1, J) += unary(X, eps, W2) * pos1(I) * string2(J, W2).
c(X, I - 1, I, J - 1, J) += unary(X, W1, W2) * string1(I, W1) * string2(J, W2).
c(X, I1, K1, I2, K2) += binary(X, Y, Z) * c(Y, I1, J1, I2, J2) * c(Z, J1, K1, J2, K2).
c(X, I1, K1, I2, K2) += inversion(X, Y, Z) * c(Y, I1, J1, J2, K2) * c(Z, J1, K1, I2, J2).
";

const TRIGRAM_RULES: &str = "\
@input predict/3.
goal += targetlength(M) * predict(E1, E2, M + 1).
predict(E2, E3, J + 1) += predict(E1, E2, J) * trigram(E1, E2, E3).
";

const MONOTONE_RULES: &str = "\
@input trans/2.
goal += sourcelength(N) * trans(N, []).
trans(Ip, Es) += trans(I, []) * phrase(I, Ip, Ej :: Es).
trans(Ip, Es) += trans(Ip, Ej :: Es).
phrase(I, Ip, Es) += substr(I, Ip, Ds) * ptranslate(Ds, Es).
";

const PHRASE_TRIGRAM_RULES: &str = "\
@input protr/5.
goal += sourcelength(N) * targetlength(M) * protr(N, M + 1, E1, E2, []).
protr(Ip, J + 1, E2, E3, Es) += protr(I, J, E1, E2, []) * trigram(E1, E2, E3) * phrase(I, Ip, E3 :: Es).
protr(Ip, J + 1, E2, E3, Es) += protr(Ip, J, E1, E2, E3 :: Es) * trigram(E1, E2, E3).
phrase(I, Ip, Es) += substr(I, Ip, Ds) * ptranslate(Ds, Es).
";

/// Graph-reachability fixtures: plain closure, least-cost paths, and the
/// four-node probabilistic graph whose cycles make the path sum geometric.
pub fn build_graph_fixtures() -> Vec<Fixture> {
    use SemiringId::*;
    vec![
        make(
            "reach_bool",
            REACH_RULES,
            "\
# a -> b -> c -> a is a cycle; d -> e is a separate island
initial\ta
edge\ta,b
edge\tb,c
edge\tc,a
edge\td,e
",
            Value::Bool(true),
            vec![
                exp(Boolean, "reachable", "a", Value::Bool(true), 0.0, "start node"),
                exp(Boolean, "reachable", "b", Value::Bool(true), 0.0, "one hop from a"),
                exp(
                    Boolean,
                    "reachable",
                    "c",
                    Value::Bool(true),
                    0.0,
                    "closure survives the cycle back to a",
                ),
                exp(
                    Boolean,
                    "reachable",
                    "d",
                    Value::Bool(false),
                    0.0,
                    "no edge into the d-e island",
                ),
                exp(Boolean, "reachable", "e", Value::Bool(false), 0.0, "island stays dark"),
            ],
        ),
        make(
            "cost3",
            REACH_RULES,
            "\
# least-cost reachability; the d self-loop adds a cost of 2 and never helps
initial\ta
edge\ta,d\t1
edge\td,d\t2
edge\td,b\t3
edge\ta,b\t5
",
            real(0.0),
            vec![
                exp(Tropical, "reachable", "a", real(0.0), 1e-12, "start costs nothing"),
                exp(Tropical, "reachable", "d", real(1.0), 1e-12, "direct edge a-d"),
                exp(
                    Tropical,
                    "reachable",
                    "b",
                    real(4.0),
                    1e-12,
                    "a-d-b costs 1+3, beating the direct edge at 5",
                ),
            ],
        ),
        make(
            "graph4",
            REACH_RULES,
            "\
# a feeds d; d and b each carry a self-loop, so path sums are geometric
initial\ta
edge\ta,d\t0.2
edge\td,d\t0.84
edge\td,b\t0.8
edge\tb,b\t0.9
",
            real(1.0),
            vec![
                exp(Viterbi, "reachable", "a", real(1.0), 1e-12, "the start itself"),
                exp(
                    Viterbi,
                    "reachable",
                    "d",
                    real(0.2),
                    1e-12,
                    "best path a-d ignores the loop",
                ),
                exp(
                    Viterbi,
                    "reachable",
                    "b",
                    real(0.16),
                    1e-12,
                    "best path a-d-b: 0.2 * 0.8",
                ),
                exp(
                    Real,
                    "reachable",
                    "d",
                    real(1.25),
                    1e-6,
                    "geometric sum 0.2 / (1 - 0.84)",
                ),
                exp(
                    Real,
                    "reachable",
                    "b",
                    real(10.0),
                    1e-6,
                    "1.25 * 0.8 / (1 - 0.9): both loops compound",
                ),
            ],
        ),
    ]
}

/// Automata fixtures: a six-arc acceptor with five accepting paths, the
/// deterministic 01 acceptor it intersects with, a one-state machine biased
/// toward 1s, and two transducer machines (order 1 and order 2).
pub fn build_fsa_fixtures() -> Vec<Fixture> {
    use SemiringId::*;
    vec![
        make(
            "fsa6",
            FSA_RULES,
            "\
# five accepting paths: ab0 then {1,0} from b, ad0 then {1,0} from d, ac1
initial\ta
final\tc
arc\ta,b,0\t0.5
arc\tb,c,1\t0.8
arc\tb,c,0\t0.2
arc\ta,d,0\t0.25
arc\td,c,1\t0.8
arc\td,c,0\t0.2
arc\ta,c,1\t0.25
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(1.0),
                    1e-12,
                    "0.4 + 0.1 + 0.2 + 0.05 + 0.25: the machine is a probability distribution",
                ),
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(0.4),
                    1e-12,
                    "best path reads 0 to b then 1 to c: 0.5 * 0.8",
                ),
            ],
        ),
        make(
            "acceptor01",
            FSA_RULES,
            "\
# accepts exactly the string 01, with weight 1
initial\ts0
final\ts2
arc\ts0,s1,0
arc\ts1,s2,1
",
            real(1.0),
            vec![
                exp(Real, "goal", "", real(1.0), 1e-12, "one accepting path of weight 1"),
                exp(Viterbi, "goal", "", real(1.0), 1e-12, "same single path"),
            ],
        ),
        make(
            "biaser1",
            FSA_RULES,
            "\
# one state, both symbols loop; 1 is three times as likely as 0
initial\ts
final\ts
arc\ts,s,0\t0.2
arc\ts,s,1\t0.6
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(5.0),
                    1e-6,
                    "geometric series over all strings: 1 / (1 - 0.8)",
                ),
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(1.0),
                    1e-12,
                    "the empty string is accepted without reading an arc",
                ),
            ],
        ),
        make(
            "wfst_pair",
            FST_RULES,
            "\
# two one-arc transducers in one namespace: a maps x to y or w, b reads y or w and writes z
initial\ta0
final\ta1
arc\ta0,a1,x,y\t0.6
arc\ta0,a1,x,w\t0.4
initial\tb0
final\tb1
arc\tb0,b1,y,z\t0.7
arc\tb0,b1,w,z\t0.3
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(2.0),
                    1e-12,
                    "each machine carries unit mass and both reach the shared goal",
                ),
                exp(Viterbi, "goal", "", real(0.7), 1e-12, "the heaviest single arc"),
            ],
        ),
        make(
            "wfst_order2",
            ORDER2_RULES,
            "\
# biarc machine remembering one state of history; the arc rows describe the
# order-1 machine over the same states and are data for pairing tests
initial\ts
final\tt
biarc\tnull,s,t,0,0\t0.3
biarc\tnull,s,m,0,0\t0.7
biarc\ts,m,t,1,1\t1.0
arc\ts,t,0,0\t0.4
arc\ts,m,0,0\t0.6
arc\tm,t,1,1\t1.0
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(1.0),
                    1e-12,
                    "0.3 direct plus 0.7 * 1.0 through m",
                ),
                exp(Viterbi, "goal", "", real(0.7), 1e-12, "the path through m wins"),
            ],
        ),
    ]
}

/// Parsing fixtures: a five-word sentence with a classic attachment
/// ambiguity, a dependency reading of the same sentence, an epsilon-capable
/// grammar, and a synchronous grammar needing an inverted production.
pub fn build_grammar_fixtures() -> Vec<Fixture> {
    use SemiringId::*;
    vec![
        make(
            "g18",
            CKY_RULES,
            "\
# binary weights normalize per left-hand side
start\ts
length\t5
string\t1,alice
string\t2,saw
string\t3,bob
string\t4,with
string\t5,binoculars
unary\tnp,alice\t0.3
unary\tv,saw\t1.0
unary\tnp,bob\t0.25
unary\tp,with\t1.0
unary\tnp,binoculars\t0.15
binary\ts,np,vp\t1.0
binary\tvp,v,np\t0.6
binary\tvp,vp,pp\t0.4
binary\tnp,np,pp\t0.3
binary\tpp,p,np\t1.0
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.004725),
                    1e-12,
                    "both attachments: 0.0027 + 0.002025",
                ),
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(0.0027),
                    1e-12,
                    "the pp attaches to the vp in the best parse",
                ),
                exp(
                    Real,
                    "c",
                    "vp,1,5",
                    real(0.01575),
                    1e-12,
                    "the vp over words 2..5 sums its two bracketings: 0.009 + 0.00675",
                ),
            ],
        ),
        make(
            "g18_dep",
            CKY_RULES,
            "\
# dependency reading: nonterminals are the words themselves, each phrase
# labeled by its head
start\tsaw
length\t5
string\t1,alice
string\t2,saw
string\t3,bob
string\t4,with
string\t5,binoculars
unary\talice,alice\t1
unary\tsaw,saw\t1
unary\tbob,bob\t1
unary\twith,with\t1
unary\tbinoculars,binoculars\t1
binary\tsaw,alice,saw\t0.9
binary\tsaw,saw,bob\t0.7
binary\tsaw,saw,with\t0.3
binary\tbob,bob,with\t0.25
binary\twith,with,binoculars\t0.8
",
            real(1.0),
            vec![
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(0.1512),
                    1e-12,
                    "attaching with to saw: 0.9 * 0.7 * 0.3 * 0.8",
                ),
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.7056),
                    1e-12,
                    "3 derivations of the saw attachment plus 2 of the bob attachment: 3 * 0.1512 + 2 * 0.126",
                ),
            ],
        ),
        make(
            "gEps",
            EPS_CKY_RULES,
            "\
# one-word sentence whose parse needs an empty constituent at position 1
start\ts
length\t1
string\t1,w1
pos\t0
pos\t1
unary\taa,w1\t1
unary\te,eps\t0.5
binary\ts,aa,e\t1
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.5),
                    1e-12,
                    "single parse: the word then an empty e",
                ),
                exp(Viterbi, "goal", "", real(0.5), 1e-12, "same single parse"),
                exp(
                    Real,
                    "c",
                    "e,1,1",
                    real(0.5),
                    1e-12,
                    "the empty constituent occupies a zero-width span",
                ),
            ],
        ),
        make(
            "itg_pair",
            ITG_RULES,
            "\
# source u v pairs with target y x: the word order is crossed, so only the
# inverted production can derive the pair
start\ts
length1\t2
length2\t2
string1\t1,u
string1\t2,v
string2\t1,y
string2\t2,x
pos1\t0
pos1\t1
pos1\t2
pos2\t0
pos2\t1
pos2\t2
unary\ta,u,x\t1
unary\tb,v,y\t1
binary\ts,a,b\t0.7
inversion\ts,a,b\t0.8
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.8),
                    1e-12,
                    "only the inverted production aligns the crossed spans",
                ),
                exp(Viterbi, "goal", "", real(0.8), 1e-12, "same single derivation"),
            ],
        ),
    ]
}

/// Translation fixtures: a trigram chain over a quoted-word seed, monotone
/// phrase translation over a three-entry table, and the combined
/// phrase-plus-trigram walk over both fact sets.
pub fn build_translation_fixtures() -> Vec<Fixture> {
    use SemiringId::*;
    vec![
        make(
            "trigram_othello",
            TRIGRAM_RULES,
            "\
# seeded after the bigram if it; be is three times as likely as prove
predict\t\"if\",\"it\",3
targetlength\t4
trigram\t\"if\",\"it\",be\t0.375
trigram\t\"if\",\"it\",prove\t0.125
trigram\t\"it\",be,demanded\t0.125
trigram\t\"it\",prove,\"false\"\t0.25
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.078125),
                    1e-12,
                    "0.375 * 0.125 + 0.125 * 0.25 over the two four-word chains",
                ),
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(0.046875),
                    1e-12,
                    "the be chain outweighs the prove chain",
                ),
                exp(
                    Real,
                    "predict",
                    "\"it\",be,4",
                    real(0.375),
                    1e-12,
                    "one step from the seed",
                ),
                exp(
                    Real,
                    "predict",
                    "\"it\",prove,4",
                    real(0.125),
                    1e-12,
                    "a third of the be weight",
                ),
            ],
        ),
        make(
            "monotone",
            MONOTONE_RULES,
            "\
# three-entry phrase table over a two-word source
trans\t0,[]
sourcelength\t2
substr\t0,1,d1 :: []\t1
substr\t1,2,d2 :: []\t1
substr\t0,2,d1 :: d2 :: []\t1
ptranslate\td1 :: [],e1 :: []\t0.6
ptranslate\td2 :: [],e2 :: []\t0.5
ptranslate\td1 :: d2 :: [],e3 :: e4 :: []\t0.2
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.5),
                    1e-12,
                    "two segmentations: 0.6 * 0.5 word by word, 0.2 as one phrase",
                ),
                exp(Viterbi, "goal", "", real(0.3), 1e-12, "word-by-word wins"),
                exp(
                    Real,
                    "phrase",
                    "0,2,e3 :: e4 :: []",
                    real(0.2),
                    1e-12,
                    "the two-word table entry",
                ),
            ],
        ),
        make(
            "phrase_product",
            PHRASE_TRIGRAM_RULES,
            "\
# the monotone table plus a trigram model over its target words
protr\t0,3,s1,s2,[]
sourcelength\t2
targetlength\t4
substr\t0,1,d1 :: []\t1
substr\t1,2,d2 :: []\t1
substr\t0,2,d1 :: d2 :: []\t1
ptranslate\td1 :: [],e1 :: []\t0.6
ptranslate\td2 :: [],e2 :: []\t0.5
ptranslate\td1 :: d2 :: [],e3 :: e4 :: []\t0.2
trigram\ts1,s2,e1\t0.5
trigram\ts2,e1,e2\t0.4
trigram\ts1,s2,e3\t0.5
trigram\ts2,e3,e4\t0.4
",
            real(1.0),
            vec![
                exp(
                    Real,
                    "goal",
                    "",
                    real(0.1),
                    1e-12,
                    "0.5 * 0.6 * 0.4 * 0.5 word by word plus 0.5 * 0.2 * 0.4 as one phrase",
                ),
                exp(
                    Viterbi,
                    "goal",
                    "",
                    real(0.06),
                    1e-12,
                    "the word-by-word derivation",
                ),
            ],
        ),
    ]
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut out = build_graph_fixtures();
    out.extend(build_fsa_fixtures());
    out.extend(build_grammar_fixtures());
    out.extend(build_translation_fixtures());
    out
}

pub fn fixture(name: &str) -> Option<Fixture> {
    all_fixtures().into_iter().find(|f| f.name == name)
}
