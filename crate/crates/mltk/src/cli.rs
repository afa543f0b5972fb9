//! Command implementations for the `mltk` binary. Every command is a thin
//! wrapper over the library; exit codes: 0 success/equal/valid,
//! 1 unequal/invalid/counterexample, 2 parse or type error, 3 fuel
//! exhausted, 4 internal invariant violation.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::prelude::*;

use crate::cl::{
    complete_development, contract_weak, decide_weak_equal, find_weak_redexes, join,
    weak_normalize, ClTerm,
};
use crate::combinator::{express_lambda_to_mlt, express_omega_to_upsilon, verify_combinator_behaviour};
use crate::comb::CombinatorSpec;
use crate::gen::{
    random_beta_sequence, random_cl_term_any, random_lterm_any, random_weak_sequence,
    rng_from_seed, GenCtx,
};
use crate::reduction::{
    contract, decide_beta_eta_equal, find_redexes, Redex, ReduceError, ReductionMode, Strategy,
    DEFAULT_FUEL,
};
use crate::semantics::{check_model, validate_equality, ModelVerdict};
use crate::syntax::{
    elaborate_cl_term, elaborate_term, load_frame, parse_term, parse_workspace, RawTerm,
    SystemMode, Workspace,
};
use crate::term::{canonicalize, Term, Var};
use crate::translate::{check_beta_to_weak, roundtrip_check, to_cl, to_lambda};
use crate::types::{Budget, Type};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEQUAL: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser)]
#[command(name = "mltk", about = "modal lambda calculus and combinatory logic toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Beta0,
    Betar,
    Beta,
    Eta,
    Betaeta,
}

impl ModeArg {
    fn mode(self) -> ReductionMode {
        match self {
            ModeArg::Beta0 => ReductionMode::Beta0,
            ModeArg::Betar => ReductionMode::BetaR,
            ModeArg::Beta => ReductionMode::Beta,
            ModeArg::Eta => ReductionMode::Eta,
            ModeArg::Betaeta => ReductionMode::BetaEta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    /// Leftmost-outermost stepping.
    Lo,
    /// Enumerate every redex of the input with its one-step contractum.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TargetArg {
    /// Compile a term of the maximal system to the workspace parameter.
    Upsilon,
    /// Compile a term of the ordinary calculus into the modal fragment.
    Mlt,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SystemArg {
    Cl,
    Mlt,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Parse and typecheck a workspace file.
    Check { file: PathBuf },
    /// Reduce a term under a mode and strategy.
    Reduce {
        file: PathBuf,
        term: String,
        #[arg(long, value_enum, default_value = "betaeta")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "lo")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1)]
        steps: u64,
        #[arg(long)]
        trace: bool,
    },
    /// Decide beta-eta equality of two terms.
    Eq {
        file: PathBuf,
        m: String,
        n: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Translate a lambda term to combinatory logic.
    Tocl { file: PathBuf, term: String },
    /// Translate a combinatory-logic term to the lambda calculus.
    Tolambda { file: PathBuf, term: String },
    /// Check the translation roundtrip identity on a term.
    Roundtrip {
        file: PathBuf,
        term: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Run one of the expressibility compilers.
    Express {
        #[arg(long, value_enum)]
        to: TargetArg,
        file: PathBuf,
        term: String,
    },
    /// Bracket abstraction of a declared free variable out of a CL term.
    Bracket { file: PathBuf, var: String, term: String },
    /// Weak normal form of a combinatory-logic term.
    Wnf {
        file: PathBuf,
        term: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Decide weak equality of two combinatory-logic terms.
    Weq {
        file: PathBuf,
        m: String,
        n: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// Complete development of a combinatory-logic term.
    Devel { file: PathBuf, term: String },
    /// Verify that a frame file describes a model.
    FrameVerify { frame: PathBuf },
    /// Validate an equality on a frame.
    ModelCheck { frame: PathBuf, file: PathBuf, m: String, n: String },
    /// Randomized confluence search.
    CrSearch {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        max_size: usize,
    },
    /// Run the built-in property sweep.
    Selftest,
}

fn read(path: &Path) -> Result<String, (i32, String)> {
    fs::read_to_string(path).map_err(|e| (EXIT_SYNTAX, format!("{}: {e}", path.display())))
}

fn workspace(path: &Path) -> Result<Workspace, (i32, String)> {
    parse_workspace(&read(path)?).map_err(|e| (EXIT_SYNTAX, e.to_string()))
}

/// A term argument: a let-bound name, else term syntax.
fn raw_term(ws: &Workspace, src: &str) -> Result<RawTerm, (i32, String)> {
    if let Some(raw) = ws.lookup_let(src.trim()) {
        return Ok(raw.clone());
    }
    parse_term(src).map_err(|e| (EXIT_SYNTAX, e.to_string()))
}

fn lterm(ws: &Workspace, src: &str, mode: SystemMode) -> Result<Term, (i32, String)> {
    let raw = raw_term(ws, src)?;
    elaborate_term(&raw, ws, mode).map_err(|e| (EXIT_SYNTAX, e.to_string()))
}

fn clterm(ws: &Workspace, src: &str) -> Result<ClTerm, (i32, String)> {
    let raw = raw_term(ws, src)?;
    elaborate_cl_term(&raw, ws, SystemMode::Modal).map_err(|e| (EXIT_SYNTAX, e.to_string()))
}

fn fuel_code(e: &ReduceError) -> i32 {
    match e {
        ReduceError::FuelExhausted(_) => EXIT_FUEL,
        ReduceError::StaleRedex => EXIT_INTERNAL,
    }
}

/// Executes a parsed command; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, (i32, String)> {
    match cli.cmd {
        Cmd::Check { file } => {
            let ws = workspace(&file)?;
            for (name, raw) in &ws.lets {
                let term = elaborate_term(raw, &ws, SystemMode::Modal)
                    .map_err(|e| (EXIT_SYNTAX, format!("{name}: {e}")))?;
                println!("{name} : {}", term.ty());
            }
            println!(
                "ok: {} atoms, {} constants, {} terms",
                ws.state_atoms.len() + ws.entity_atoms.len(),
                ws.sig.iter().count(),
                ws.lets.len()
            );
            Ok(EXIT_OK)
        }
        Cmd::Reduce { file, term, mode, strategy, steps, trace } => {
            let ws = workspace(&file)?;
            let t = lterm(&ws, &term, SystemMode::Modal)?;
            let mode = mode.mode();
            match strategy {
                StrategyArg::All => {
                    let redexes = find_redexes(&t, &ws.upsilon, mode);
                    println!("{} redexes", redexes.len());
                    for (i, r) in redexes.iter().enumerate() {
                        let out = contract(&t, r).map_err(|e| (fuel_code(&e), e.to_string()))?;
                        match r {
                            Redex::Beta(b) => println!(
                                "  [{i}] beta distance {} {}-> {out}",
                                b.distance,
                                if b.regular { "(regular) " } else { "" }
                            ),
                            Redex::Eta(_) => println!("  [{i}] eta -> {out}"),
                        }
                    }
                    Ok(EXIT_OK)
                }
                StrategyArg::Lo => {
                    let mut current = t;
                    for i in 0..steps {
                        let Some(next) = crate::reduction::step(
                            &current,
                            &ws.upsilon,
                            mode,
                            Strategy::LeftmostOutermost,
                        ) else {
                            if trace {
                                println!("normal after {i} steps");
                            }
                            break;
                        };
                        current = next;
                        if trace {
                            println!("[{}] {current}", i + 1);
                        }
                    }
                    println!("{current}");
                    Ok(EXIT_OK)
                }
            }
        }
        Cmd::Eq { file, m, n, fuel } => {
            let ws = workspace(&file)?;
            let m = lterm(&ws, &m, SystemMode::Modal)?;
            let n = lterm(&ws, &n, SystemMode::Modal)?;
            let equal = decide_beta_eta_equal(&m, &n, fuel)
                .map_err(|e| (fuel_code(&e), e.to_string()))?;
            println!("{}", if equal { "equal" } else { "not equal" });
            Ok(if equal { EXIT_OK } else { EXIT_UNEQUAL })
        }
        Cmd::Tocl { file, term } => {
            let ws = workspace(&file)?;
            let t = lterm(&ws, &term, SystemMode::Modal)?;
            let cl = to_cl(&t, &ws.upsilon, &ws.sig)
                .map_err(|e| (EXIT_SYNTAX, e.to_string()))?;
            println!("{cl}");
            Ok(EXIT_OK)
        }
        Cmd::Tolambda { file, term } => {
            let ws = workspace(&file)?;
            let t = clterm(&ws, &term)?;
            let back = to_lambda(&t, &ws.upsilon, &ws.sig)
                .map_err(|e| (EXIT_SYNTAX, e.to_string()))?;
            println!("{back}");
            Ok(EXIT_OK)
        }
        Cmd::Roundtrip { file, term, fuel } => {
            let ws = workspace(&file)?;
            let t = lterm(&ws, &term, SystemMode::Modal)?;
            let ok = roundtrip_check(&t, &ws.upsilon, &ws.sig, fuel)
                .map_err(|e| (EXIT_INTERNAL, e.to_string()))?;
            println!("{}", if ok { "roundtrip equal" } else { "roundtrip UNEQUAL" });
            Ok(if ok { EXIT_OK } else { EXIT_INTERNAL })
        }
        Cmd::Express { to, file, term } => {
            let ws = workspace(&file)?;
            match to {
                TargetArg::Upsilon => {
                    let t = lterm(&ws, &term, SystemMode::ModalOmega)?;
                    let out = express_omega_to_upsilon(&t, &ws.upsilon, &ws.sig)
                        .map_err(|e| (EXIT_SYNTAX, e.to_string()))?;
                    println!("{out}");
                }
                TargetArg::Mlt => {
                    let t = lterm(&ws, &term, SystemMode::Full)?;
                    let out = express_lambda_to_mlt(&t, DEFAULT_FUEL)
                        .map_err(|e| (EXIT_SYNTAX, e.to_string()))?;
                    println!("{out}");
                }
            }
            Ok(EXIT_OK)
        }
        Cmd::Bracket { file, var, term } => {
            let ws = workspace(&file)?;
            let idx: u32 = var
                .strip_prefix('v')
                .and_then(|s| s.parse().ok())
                .ok_or((EXIT_SYNTAX, format!("`{var}` is not a variable token")))?;
            let ty = ws
                .frees
                .get(&idx)
                .ok_or((EXIT_SYNTAX, format!("v{idx} is not declared free")))?
                .clone();
            let t = clterm(&ws, &term)?;
            let out = crate::cl::cl_bracket(&Var::new(ty, idx), &t, &ws.upsilon, &ws.sig)
                .map_err(|e| (EXIT_SYNTAX, e.to_string()))?;
            println!("{out}");
            Ok(EXIT_OK)
        }
        Cmd::Wnf { file, term, fuel } => {
            let ws = workspace(&file)?;
            let t = clterm(&ws, &term)?;
            let nf = weak_normalize(&t, fuel).map_err(|e| (fuel_code(&e), e.to_string()))?;
            println!("{nf}");
            Ok(EXIT_OK)
        }
        Cmd::Weq { file, m, n, fuel } => {
            let ws = workspace(&file)?;
            let m = clterm(&ws, &m)?;
            let n = clterm(&ws, &n)?;
            let equal =
                decide_weak_equal(&m, &n, fuel).map_err(|e| (fuel_code(&e), e.to_string()))?;
            println!("{}", if equal { "equal" } else { "not equal" });
            Ok(if equal { EXIT_OK } else { EXIT_UNEQUAL })
        }
        Cmd::Devel { file, term } => {
            let ws = workspace(&file)?;
            let t = clterm(&ws, &term)?;
            println!("{}", complete_development(&t));
            Ok(EXIT_OK)
        }
        Cmd::FrameVerify { frame } => {
            let loaded = load_frame(&read(&frame)?).map_err(|e| (EXIT_SYNTAX, e))?;
            let verdict = check_model(&loaded.frame, &loaded.upsilon, &loaded.sig)
                .map_err(|e| (EXIT_INTERNAL, e.to_string()))?;
            println!("{verdict}");
            Ok(match verdict {
                ModelVerdict::Model => EXIT_OK,
                ModelVerdict::NotModel { .. } => EXIT_UNEQUAL,
            })
        }
        Cmd::ModelCheck { frame, file, m, n } => {
            let loaded = load_frame(&read(&frame)?).map_err(|e| (EXIT_SYNTAX, e))?;
            let ws = workspace(&file)?;
            let m = lterm(&ws, &m, SystemMode::Modal)?;
            let n = lterm(&ws, &n, SystemMode::Modal)?;
            let valid = validate_equality(&m, &n, &loaded.frame)
                .map_err(|e| (EXIT_INTERNAL, e.to_string()))?;
            println!("{}", if valid { "valid" } else { "invalid" });
            Ok(if valid { EXIT_OK } else { EXIT_UNEQUAL })
        }
        Cmd::CrSearch { system, iters, seed, max_size } => {
            let failures = match system {
                SystemArg::Cl => cr_search_cl(iters, seed, max_size),
                SystemArg::Mlt => cr_search_mlt(iters, seed, max_size),
            };
            println!("{failures} join failures");
            Ok(if failures == 0 { EXIT_OK } else { EXIT_UNEQUAL })
        }
        Cmd::Selftest => selftest(),
    }
}

/// Random divergent weak-reduction pairs must rejoin: Church-Rosser holds
/// in the combinatory logic.
fn cr_search_cl(iters: u64, seed: u64, max_size: usize) -> u64 {
    let mut failures = 0;
    for i in 0..iters {
        let mut rng = rng_from_seed(seed.wrapping_add(i));
        let budget = if rng.gen_bool(0.5) { Budget::Finite(1) } else { Budget::Finite(2) };
        let ctx = GenCtx::montagovian(budget);
        let term = random_cl_term_any(&mut rng, &ctx, max_size);
        let a = random_weak_sequence(&mut rng, &term, 20);
        let b = random_weak_sequence(&mut rng, &term, 20);
        match join(a.last().expect("non-empty"), b.last().expect("non-empty"), 2_000) {
            Ok(Some(_)) => {}
            _ => {
                eprintln!("join failure from {term}");
                failures += 1;
            }
        }
    }
    failures
}

/// The modal calculus is not Church-Rosser, so divergent beta-eta pairs
/// may fail to rejoin within bounds; reported pairs are counterexample
/// candidates, not verdicts.
fn cr_search_mlt(iters: u64, seed: u64, max_size: usize) -> u64 {
    let mut failures = 0;
    for i in 0..iters {
        let mut rng = rng_from_seed(seed.wrapping_add(i));
        let budget = if rng.gen_bool(0.5) { Budget::Finite(1) } else { Budget::Finite(2) };
        let ctx = GenCtx::montagovian(budget);
        let term = random_lterm_any(&mut rng, &ctx, max_size);
        let a = random_beta_sequence(&mut rng, &term, &ctx.upsilon, ReductionMode::BetaEta, 10);
        let b = random_beta_sequence(&mut rng, &term, &ctx.upsilon, ReductionMode::BetaEta, 10);
        if !mlt_joinable(
            a.last().expect("non-empty"),
            b.last().expect("non-empty"),
            &ctx,
            6,
        ) {
            eprintln!("no bounded join from {term}");
            failures += 1;
        }
    }
    failures
}

/// Bounded bidirectional search for a common beta-eta reduct inside the
/// modal calculus, comparing terms up to renaming of bound variables.
fn mlt_joinable(a: &Term, b: &Term, ctx: &GenCtx, depth: usize) -> bool {
    let key = |t: &Term| canonicalize(t).to_string();
    let mut seen_a: BTreeSet<String> = BTreeSet::new();
    let mut seen_b: BTreeSet<String> = BTreeSet::new();
    let mut frontier_a = vec![a.clone()];
    let mut frontier_b = vec![b.clone()];
    seen_a.insert(key(a));
    seen_b.insert(key(b));
    for _ in 0..depth {
        if seen_a.intersection(&seen_b).next().is_some() {
            return true;
        }
        let expand = |frontier: &mut Vec<Term>, seen: &mut BTreeSet<String>| {
            let mut next = Vec::new();
            for t in frontier.iter().take(200) {
                for r in find_redexes(t, &ctx.upsilon, ReductionMode::BetaEta) {
                    let out = contract(t, &r).expect("enumerated redex applies");
                    if seen.insert(key(&out)) {
                        next.push(out);
                    }
                }
            }
            *frontier = next;
        };
        expand(&mut frontier_a, &mut seen_a);
        expand(&mut frontier_b, &mut seen_b);
        if frontier_a.is_empty() && frontier_b.is_empty() {
            break;
        }
    }
    seen_a.intersection(&seen_b).next().is_some()
}

/// The behavioural inventory over the two-atom slot assignments.
pub fn combinator_inventory(
    state_budget: Budget,
) -> Vec<(CombinatorSpec, Result<(usize, bool), String>)> {
    let s = Type::state("S");
    let e = Type::entity("E");
    let upsilon = crate::types::Parameter::omega().with("S", state_budget);
    let sig = crate::types::Signature::new().with("c0", s.clone());
    let slots = [s.clone(), e.clone()];
    let mut specs = Vec::new();
    for a in &slots {
        specs.push(CombinatorSpec::i(a.clone()));
        for b in &slots {
            specs.push(CombinatorSpec::k(a.clone(), b.clone()));
            specs.push(CombinatorSpec::w(a.clone(), b.clone()));
            for c in &slots {
                specs.push(CombinatorSpec::c(a.clone(), b.clone(), c.clone()));
                specs.push(CombinatorSpec::b(a.clone(), b.clone(), c.clone()));
                specs.push(CombinatorSpec::s(a.clone(), b.clone(), c.clone()));
                if b.is_state() {
                    specs.push(CombinatorSpec::d(a.clone(), b.clone(), c.clone(), "c0"));
                }
            }
        }
    }
    specs.retain(|spec| spec.validate(&upsilon, &sig).is_ok());
    let mut out = Vec::new();
    for spec in specs {
        let args = behaviour_args(&spec, &upsilon);
        let result = verify_combinator_behaviour(&spec, &args, &upsilon, &sig)
            .map(|trace| (trace.max_distance(), trace.all_regular()))
            .map_err(|e| e.to_string());
        out.push((spec, result));
    }
    out
}

/// Generic arguments for a behaviour run: free variables at the instance's
/// argument types, state-typed ones at index zero, regular ones high.
fn behaviour_args(spec: &CombinatorSpec, _upsilon: &crate::types::Parameter) -> Vec<Term> {
    let mut tys = Vec::new();
    let mut ty = spec.result_type();
    for _ in 0..spec.kind.arity() {
        let Some((dom, cod)) = ty.as_arrow() else { break };
        tys.push(dom.clone());
        ty = cod.clone();
    }
    tys.iter()
        .map(|t| Term::var(Var::new(t.clone(), if t.is_state() { 0 } else { 7 })))
        .collect()
}

fn selftest() -> Result<i32, (i32, String)> {
    let mut ok = true;
    let mut report = |name: &str, pass: bool| {
        println!("{} {name}", if pass { "pass" } else { "FAIL" });
        ok &= pass;
    };

    // Combinator behaviour inventory at budgets one and two.
    for budget in [Budget::Finite(1), Budget::Finite(2)] {
        let inventory = combinator_inventory(budget);
        let pass = !inventory.is_empty()
            && inventory.iter().all(|(_, r)| matches!(r, Ok((d, reg)) if *d <= 2 && *reg));
        report(&format!("combinator inventory (budget {budget:?})", ), pass);
    }

    // Church-Rosser sampling in the combinatory logic.
    report("cl church-rosser sample", cr_search_cl(200, 7, 25) == 0);

    // Roundtrip and beta-to-weak sampling.
    let ctx = GenCtx::montagovian(Budget::Finite(2));
    let mut rng = rng_from_seed(11);
    let mut pass = true;
    for _ in 0..100 {
        let t = random_lterm_any(&mut rng, &ctx, 18);
        pass &= roundtrip_check(&t, &ctx.upsilon, &ctx.sig, DEFAULT_FUEL).unwrap_or(false);
    }
    report("translation roundtrip sample", pass);

    let mut pass = true;
    let mut found = 0;
    while found < 50 {
        if let Some((m, n, _)) = crate::gen::random_beta_step(&mut rng, &ctx, 18) {
            found += 1;
            pass &= check_beta_to_weak(&m, &n, &ctx.upsilon, &ctx.sig, DEFAULT_FUEL)
                .unwrap_or(false);
        }
    }
    report("beta steps to weak equalities", pass);

    // Weak reduction exercises the Cardinal-to-Dardinal rule somewhere.
    let mut saw_c2d = false;
    for i in 0..200 {
        let mut rng = rng_from_seed(100 + i);
        let t = random_cl_term_any(&mut rng, &ctx, 25);
        for r in find_weak_redexes(&t) {
            if r.rule == crate::cl::WeakRule::CardinalToDardinal {
                saw_c2d = true;
                let _ = contract_weak(&t, &r);
            }
        }
    }
    report("cardinal-to-dardinal reachable", saw_c2d);

    Ok(if ok { EXIT_OK } else { EXIT_UNEQUAL })
}
