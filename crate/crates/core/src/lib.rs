//! Weighted deduction over semirings: programs of Horn equations, a
//! forward-chaining solver, proof enumeration, and transformations that
//! pair two programs into one that derives in both at once.

pub mod corpus;
pub mod infometrics;
pub mod kernel;
pub mod product;
pub mod proofs;
pub mod semiring;
pub mod solver;
pub mod textio;

pub use corpus::{all_fixtures, fixture, Expectation, Fixture};
pub use infometrics::{
    entropy_of_goal, kl_divergence, lift_entropy, lift_kl, projection_kl, EntropyReport,
    InfoError, KlReport, ProjectionSpec,
};
pub use kernel::{
    alpha_equivalent, desugar_arithmetic, has_errors, substitute, unify, validate, Atom, Axiom,
    Diagnostic, PairDecl, Program, Rule, Severity, SideCondition, SourceSpan, Substitution, Term,
};
pub use product::{
    apply_edits, natural_pairing, product, AlignmentPolicy, BodySource, EditPass, PairingSpec,
    ProductError, ProductMeta, ProductOrigin, ProductPredicate, RuleSelector, Side,
};
pub use proofs::{
    aggregate, enumerate_proofs, project_proof, proof_value, render_proof, Proof, ProofError,
    ProofLimits, ProofSet, ProofTag, ProofVia,
};
pub use semiring::{Semiring, SemiringError, SemiringId, Value, ALL_SEMIRINGS};
pub use solver::{solve, Chart, SolveError, SolveMode, SolveOptions};
pub use textio::{
    parse_atom_text, parse_facts_tsv, parse_program, render_chart, render_program, ParseError,
};
