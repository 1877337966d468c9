//! The `hornbeam` binary. Every subcommand is a thin wrapper over the
//! library: read files, call one operation, print its result. Exit codes:
//! 0 success, 1 usage, 2 parse error, 3 validation error, 4 failure to
//! converge, 5 transform refusal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hornbeam_core::corpus;
use hornbeam_core::infometrics::{entropy_of_goal, kl_divergence, EntropyReport, InfoError, KlReport};
use hornbeam_core::kernel::{has_errors, validate, Atom, Axiom, PairDecl, Program, Severity};
use hornbeam_core::product::{
    apply_edits, natural_pairing, product, AlignmentPolicy, EditPass, PairingSpec, RuleSelector,
};
use hornbeam_core::proofs::{aggregate, enumerate_proofs, proof_value, render_proof, ProofLimits};
use hornbeam_core::semiring::{SemiringId, Value};
use hornbeam_core::solver::{solve, SolveError, SolveMode, SolveOptions};
use hornbeam_core::textio::{
    json_escape, parse_atom_text, parse_facts_tsv, parse_program, render_chart, render_number,
    render_program, render_value_json,
};

#[derive(Parser)]
#[command(name = "hornbeam", version, about = "solve, transform, and measure weighted logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a program, printing its diagnostics
    Check { file: PathBuf },
    /// Solve a program and print the chart as JSON lines
    Solve {
        file: PathBuf,
        /// fact tables to append to the program's axioms; repeatable
        #[arg(long = "facts")]
        facts: Vec<PathBuf>,
        #[arg(long)]
        semiring: SemiringArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
        /// only print entries matching this atom pattern, e.g. "reachable(Q)"
        #[arg(long)]
        query: Option<String>,
    },
    /// Enumerate proofs of a goal and print them as trees
    Proofs {
        file: PathBuf,
        #[arg(long = "facts")]
        facts: Vec<PathBuf>,
        #[arg(long)]
        goal: String,
        #[arg(long = "max-depth", default_value_t = 64)]
        max_depth: usize,
        #[arg(long = "max-count", default_value_t = 10_000)]
        max_count: usize,
        #[arg(long, value_enum, default_value_t = SemiringArg::Real)]
        semiring: SemiringArg,
    },
    /// Build the product of two programs and print it
    Product {
        left: PathBuf,
        right: PathBuf,
        /// pairing such as p/1=q/1:pq; repeatable
        #[arg(long = "pair")]
        pairs: Vec<String>,
        /// rename both programs apart and pair every derived predicate name
        /// they share
        #[arg(long)]
        natural: bool,
        #[arg(long, value_enum, default_value_t = PolicyArg::Left)]
        policy: PolicyArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply edit passes to a program and print the result. Constraints are
    /// applied first and use the rule numbers of the program as read; drops
    /// follow, then collapses, generalizations, and fixes.
    Edit {
        file: PathBuf,
        #[arg(long = "drop-rule")]
        drop_rules: Vec<usize>,
        /// RULE:X=Y or RULE:X=Y,A=B
        #[arg(long = "constrain")]
        constraints: Vec<String>,
        /// pred/arity:i=j, merging product argument positions
        #[arg(long = "collapse")]
        collapses: Vec<String>,
        /// pred/arity — drop the bridging rule and open the predicate to axioms
        #[arg(long = "generalize")]
        generalizes: Vec<String>,
        /// pred/arity:witness:pos,pos — guard the listed positions by witness facts
        #[arg(long = "fix")]
        fixes: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derivational entropy of a goal's proof distribution
    Entropy {
        file: PathBuf,
        #[arg(long = "facts")]
        facts: Vec<PathBuf>,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
    },
    /// KL divergence between two weightings of one program
    Kl {
        file: PathBuf,
        #[arg(long = "p-facts")]
        p_facts: PathBuf,
        #[arg(long = "q-facts")]
        q_facts: PathBuf,
        #[arg(long)]
        goal: String,
        /// also report the unnormalized form, defined for improper weights
        #[arg(long)]
        generalized: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iters", default_value_t = 10_000)]
        max_iters: usize,
    },
    /// Write a built-in fixture as program and facts files
    Fixtures {
        name: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemiringArg {
    Boolean,
    Tropical,
    Viterbi,
    Real,
    Entropy3,
}

impl SemiringArg {
    fn id(self) -> SemiringId {
        match self {
            SemiringArg::Boolean => SemiringId::Boolean,
            SemiringArg::Tropical => SemiringId::Tropical,
            SemiringArg::Viterbi => SemiringId::Viterbi,
            SemiringArg::Real => SemiringId::Real,
            SemiringArg::Entropy3 => SemiringId::Entropy3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Priority,
    Iterate,
}

impl ModeArg {
    fn mode(self) -> SolveMode {
        match self {
            ModeArg::Auto => SolveMode::Auto,
            ModeArg::Priority => SolveMode::Priority,
            ModeArg::Iterate => SolveMode::Iterate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Left,
    Crossed,
    Explicit,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Check { file } => cmd_check(&file),
        Command::Solve {
            file,
            facts,
            semiring,
            mode,
            tol,
            max_iters,
            query,
        } => cmd_solve(&file, &facts, semiring, mode, tol, max_iters, query.as_deref()),
        Command::Proofs {
            file,
            facts,
            goal,
            max_depth,
            max_count,
            semiring,
        } => cmd_proofs(&file, &facts, &goal, max_depth, max_count, semiring),
        Command::Product {
            left,
            right,
            pairs,
            natural,
            policy,
            output,
        } => cmd_product(&left, &right, &pairs, natural, policy, output.as_deref()),
        Command::Edit {
            file,
            drop_rules,
            constraints,
            collapses,
            generalizes,
            fixes,
            output,
        } => cmd_edit(
            &file,
            &drop_rules,
            &constraints,
            &collapses,
            &generalizes,
            &fixes,
            output.as_deref(),
        ),
        Command::Entropy {
            file,
            facts,
            goal,
            tol,
            max_iters,
        } => cmd_entropy(&file, &facts, &goal, tol, max_iters),
        Command::Kl {
            file,
            p_facts,
            q_facts,
            goal,
            generalized,
            tol,
            max_iters,
        } => cmd_kl(&file, &p_facts, &q_facts, &goal, generalized, tol, max_iters),
        Command::Fixtures { name, output } => cmd_fixtures(&name, &output),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read_file(path)?;
    parse_program(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn load_facts(path: &Path, default: &Value) -> Result<Vec<Axiom>, Failure> {
    let text = read_file(path)?;
    parse_facts_tsv(&text, default)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn assemble(file: &Path, facts: &[PathBuf], default: &Value) -> Result<Program, Failure> {
    let mut prog = load_program(file)?;
    for table in facts {
        prog.axioms.extend(load_facts(table, default)?);
    }
    Ok(prog)
}

fn goal_pattern(text: &str) -> Result<Atom, Failure> {
    parse_atom_text(text).map_err(|e| Failure::new(1, format!("bad atom pattern `{text}`: {e}")))
}

fn solve_code(e: &SolveError) -> u8 {
    match e {
        SolveError::PriorityUnsupported { .. } | SolveError::BadOptions(_) => 1,
        SolveError::Diverged { .. } => 4,
        _ => 3,
    }
}

fn map_solve(e: SolveError) -> Failure {
    let message = match &e {
        SolveError::Invalid(diags) => diags
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    };
    Failure::new(solve_code(&e), message)
}

fn map_info(e: InfoError) -> Failure {
    match e {
        InfoError::Solve(inner) => map_solve(inner),
        InfoError::Product(inner) => Failure::new(5, inner.to_string()),
        other => Failure::new(3, other.to_string()),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_check(file: &Path) -> Result<(), Failure> {
    let prog = load_program(file)?;
    let diags = validate(&prog);
    for d in &diags {
        println!("{d}");
    }
    if has_errors(&diags) {
        let n = diags
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .count();
        return Err(Failure::new(3, format!("{n} error(s)")));
    }
    println!("ok: {} rules, {} axioms", prog.rules.len(), prog.axioms.len());
    Ok(())
}

fn cmd_solve(
    file: &Path,
    facts: &[PathBuf],
    semiring: SemiringArg,
    mode: ModeArg,
    tol: f64,
    max_iters: usize,
    query: Option<&str>,
) -> Result<(), Failure> {
    let sr = semiring.id().get();
    let prog = assemble(file, facts, &sr.one())?;
    let options = SolveOptions {
        mode: mode.mode(),
        tolerance: tol,
        max_iterations: max_iters,
    };
    let chart = solve(&prog, sr, &options).map_err(map_solve)?;
    match query {
        None => print!("{}", render_chart(&chart)),
        Some(text) => {
            let pattern = goal_pattern(text)?;
            for (atom, value) in chart.query(&pattern) {
                println!(
                    "{{\"atom\":\"{}\",\"value\":{}}}",
                    json_escape(&atom.text()),
                    render_value_json(value)
                );
            }
        }
    }
    Ok(())
}

fn cmd_proofs(
    file: &Path,
    facts: &[PathBuf],
    goal: &str,
    max_depth: usize,
    max_count: usize,
    semiring: SemiringArg,
) -> Result<(), Failure> {
    let sr = semiring.id().get();
    let prog = assemble(file, facts, &sr.one())?;
    let pattern = goal_pattern(goal)?;
    let limits = ProofLimits {
        max_depth,
        max_count,
    };
    let set = enumerate_proofs(&prog, sr, &pattern, &limits).map_err(map_solve)?;
    for (i, proof) in set.proofs.iter().enumerate() {
        let value = proof_value(proof, sr).map_err(|e| Failure::new(3, e.to_string()))?;
        println!("# proof {i} value {}", render_value_json(&value));
        let tree = render_proof(proof, sr).map_err(|e| Failure::new(3, e.to_string()))?;
        print!("{tree}");
    }
    let total = aggregate(&set.proofs, sr).map_err(|e| Failure::new(3, e.to_string()))?;
    let marker = if set.truncated { " truncated" } else { "" };
    println!(
        "# proofs {}{marker} total {}",
        set.proofs.len(),
        render_value_json(&total)
    );
    Ok(())
}

fn parse_pred_key(text: &str) -> Result<(String, usize), Failure> {
    let (name, arity) = text
        .split_once('/')
        .ok_or_else(|| Failure::new(1, format!("`{text}` is not pred/arity")))?;
    let arity = arity
        .parse()
        .map_err(|_| Failure::new(1, format!("`{text}` is not pred/arity")))?;
    if name.is_empty() {
        return Err(Failure::new(1, format!("`{text}` is not pred/arity")));
    }
    Ok((name.to_string(), arity))
}

fn parse_pair_decl(text: &str) -> Result<PairDecl, Failure> {
    let bad = || Failure::new(1, format!("`{text}` is not left/arity=right/arity:name"));
    let (sides, name) = text.rsplit_once(':').ok_or_else(bad)?;
    let (left, right) = sides.split_once('=').ok_or_else(bad)?;
    if name.is_empty() {
        return Err(bad());
    }
    Ok(PairDecl {
        left: parse_pred_key(left)?,
        right: parse_pred_key(right)?,
        name: name.to_string(),
    })
}

fn cmd_product(
    left: &Path,
    right: &Path,
    pairs: &[String],
    natural: bool,
    policy: PolicyArg,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let l = load_program(left)?;
    let r = load_program(right)?;
    let joint = if natural {
        if !pairs.is_empty() {
            return Err(Failure::new(1, "--natural and --pair are mutually exclusive"));
        }
        let (lren, rren, spec) = natural_pairing(&l, &r).map_err(|e| Failure::new(5, e.to_string()))?;
        product(&lren, &rren, &spec).map_err(|e| Failure::new(5, e.to_string()))?
    } else {
        if pairs.is_empty() {
            return Err(Failure::new(1, "need at least one --pair, or --natural"));
        }
        let decls = pairs
            .iter()
            .map(|p| parse_pair_decl(p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut spec = PairingSpec::new(decls);
        spec.policy = match policy {
            PolicyArg::Left => AlignmentPolicy::LeftToRight,
            PolicyArg::Crossed => AlignmentPolicy::Crossed,
            PolicyArg::Explicit => {
                return Err(Failure::new(
                    1,
                    "explicit alignments need per-rule tables; use the library interface",
                ));
            }
        };
        product(&l, &r, &spec).map_err(|e| Failure::new(5, e.to_string()))?
    };
    emit(output, &render_program(&joint))
}

fn parse_equalities(text: &str) -> Result<Vec<(String, String)>, Failure> {
    text.split(',')
        .map(|eq| {
            eq.split_once('=')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .ok_or_else(|| Failure::new(1, format!("`{eq}` is not X=Y")))
        })
        .collect()
}

fn cmd_edit(
    file: &Path,
    drop_rules: &[usize],
    constraints: &[String],
    collapses: &[String],
    generalizes: &[String],
    fixes: &[String],
    output: Option<&Path>,
) -> Result<(), Failure> {
    let prog = load_program(file)?;
    let mut passes = Vec::new();
    for c in constraints {
        let (rule, eqs) = c
            .split_once(':')
            .ok_or_else(|| Failure::new(1, format!("`{c}` is not RULE:X=Y")))?;
        let rule = rule
            .parse()
            .map_err(|_| Failure::new(1, format!("`{c}` is not RULE:X=Y")))?;
        passes.push(EditPass::Constrain {
            rule,
            equalities: parse_equalities(eqs)?,
        });
    }
    if !drop_rules.is_empty() {
        passes.push(EditPass::DropRules(RuleSelector::Ids(
            drop_rules.iter().copied().collect(),
        )));
    }
    for c in collapses {
        let (pred, positions) = c
            .split_once(':')
            .ok_or_else(|| Failure::new(1, format!("`{c}` is not pred/arity:i=j")))?;
        let (predicate, arity) = parse_pred_key(pred)?;
        let positions = positions
            .split(',')
            .map(|pair| {
                let (i, j) = pair
                    .split_once('=')
                    .ok_or_else(|| Failure::new(1, format!("`{pair}` is not i=j")))?;
                let i = i.parse().map_err(|_| Failure::new(1, format!("`{pair}` is not i=j")))?;
                let j = j.parse().map_err(|_| Failure::new(1, format!("`{pair}` is not i=j")))?;
                Ok((i, j))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        passes.push(EditPass::Collapse {
            predicate,
            arity,
            positions,
        });
    }
    for g in generalizes {
        let (predicate, arity) = parse_pred_key(g)?;
        passes.push(EditPass::Generalize { predicate, arity });
    }
    for f in fixes {
        let bad = || Failure::new(1, format!("`{f}` is not pred/arity:witness:pos,pos"));
        let mut parts = f.splitn(3, ':');
        let pred = parts.next().ok_or_else(bad)?;
        let witness = parts.next().ok_or_else(bad)?;
        let positions = parts.next().ok_or_else(bad)?;
        let (predicate, arity) = parse_pred_key(pred)?;
        let positions = positions
            .split(',')
            .map(|p| p.parse().map_err(|_| bad()))
            .collect::<Result<Vec<usize>, Failure>>()?;
        passes.push(EditPass::Fix {
            predicate,
            arity,
            witness: witness.to_string(),
            positions,
        });
    }
    let edited = apply_edits(&prog, &passes).map_err(|e| Failure::new(5, e.to_string()))?;
    emit(output, &render_program(&edited))
}

fn entropy_json(report: &EntropyReport) -> String {
    format!(
        "{{\"w_prime\":{},\"h_prime\":{},\"entropy\":{}}}",
        render_number(report.w_prime),
        render_number(report.h_prime),
        render_number(report.entropy)
    )
}

fn cmd_entropy(
    file: &Path,
    facts: &[PathBuf],
    goal: &str,
    tol: f64,
    max_iters: usize,
) -> Result<(), Failure> {
    let prog = assemble(file, facts, &Value::Real(1.0))?;
    let pattern = goal_pattern(goal)?;
    let options = SolveOptions {
        mode: SolveMode::Auto,
        tolerance: tol,
        max_iterations: max_iters,
    };
    let report = entropy_of_goal(&prog, &pattern, &options).map_err(map_info)?;
    println!("{}", entropy_json(&report));
    Ok(())
}

fn kl_json(report: &KlReport) -> String {
    let generalized = match report.generalized_kl {
        Some(x) => render_number(x),
        None => "null".into(),
    };
    format!(
        "{{\"p_bar\":{},\"q_bar\":{},\"r_bar\":{},\"ce_pq\":{},\"ce_pp\":{},\"kl\":{},\"generalized_kl\":{generalized}}}",
        render_number(report.p_bar),
        render_number(report.q_bar),
        render_number(report.r_bar),
        render_number(report.ce_pq),
        render_number(report.ce_pp),
        render_number(report.kl)
    )
}

fn cmd_kl(
    file: &Path,
    p_facts: &Path,
    q_facts: &Path,
    goal: &str,
    generalized: bool,
    tol: f64,
    max_iters: usize,
) -> Result<(), Failure> {
    let prog = load_program(file)?;
    let p = load_facts(p_facts, &Value::Real(1.0))?;
    let q = load_facts(q_facts, &Value::Real(1.0))?;
    let pattern = goal_pattern(goal)?;
    let options = SolveOptions {
        mode: SolveMode::Auto,
        tolerance: tol,
        max_iterations: max_iters,
    };
    let report = kl_divergence(&prog, &p, &q, &pattern, &options, generalized).map_err(map_info)?;
    println!("{}", kl_json(&report));
    Ok(())
}

fn cmd_fixtures(name: &str, output: &Path) -> Result<(), Failure> {
    let Some(fx) = corpus::fixture(name) else {
        let names: Vec<&str> = corpus::all_fixtures().iter().map(|f| f.name).collect();
        return Err(Failure::new(
            1,
            format!("no fixture `{name}`; available: {}", names.join(", ")),
        ));
    };
    fs::create_dir_all(output).map_err(|e| Failure::new(1, format!("{}: {e}", output.display())))?;
    let wlp = output.join(format!("{name}.wlp"));
    let tsv = output.join(format!("{name}.tsv"));
    fs::write(&wlp, fx.program_text).map_err(|e| Failure::new(1, format!("{}: {e}", wlp.display())))?;
    fs::write(&tsv, fx.facts_tsv).map_err(|e| Failure::new(1, format!("{}: {e}", tsv.display())))?;
    println!("{}", wlp.display());
    println!("{}", tsv.display());
    Ok(())
}
