//! Lambda-side combinator terms, their reduction behaviour, and the two
//! expressibility compilers.
//!
//! Combinator terms are ordinary closed lambda terms. Building one with
//! specific bound variables matters: the combinatorialization below returns
//! a witnessing beta chain that must land on its input syntactically, so
//! each instance is built with binders chosen for the chain at hand. The
//! canonical instances use the lowest legal indices.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cl::{starling_component_specs, ClKind, ClTerm};
use crate::comb::{CombKind, CombinatorError, CombinatorSpec};
use crate::reduction::{
    beta_redex_at, contract, find_redexes, normalize_full_lambda, PathStep, Redex, ReduceError,
    ReductionMode,
};
use crate::term::{Term, TermKind, Var};
use crate::types::{Budget, Parameter, Signature, Type};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviourError {
    #[error(transparent)]
    Combinator(#[from] CombinatorError),
    #[error("trace construction failed: {0}")]
    TraceFailure(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpressError {
    #[error("free variable {0} is not legal at the target parameter")]
    IllegalFreeVariable(Var),
    #[error("constant `{0}` is not in the signature")]
    IllegalConstant(String),
    #[error("input type {0} is not a type of the modal calculus")]
    NonModalType(Type),
    #[error("normal form fell outside the modal calculus: {0}")]
    NotMltTerm(String),
    #[error(transparent)]
    Fuel(#[from] ReduceError),
    #[error(transparent)]
    Combinator(#[from] CombinatorError),
}

/// Binder slot types of a combinator instance, in lambda order.
fn binder_types(spec: &CombinatorSpec) -> Vec<Type> {
    let ar = |d: &Type, c: Type| Type::arrow(d.clone(), c).expect("validated spec");
    let p = |i: usize| spec.type_params[i].clone();
    match spec.kind {
        CombKind::I => vec![p(0)],
        CombKind::K => vec![p(0), p(1)],
        CombKind::C => vec![ar(&p(0), ar(&p(1), p(2))), p(1), p(0)],
        CombKind::D => vec![ar(&p(0), ar(&p(1), p(2))), p(0)],
        CombKind::W => vec![ar(&p(0), ar(&p(0), p(1))), p(0)],
        CombKind::B => vec![ar(&p(1), p(2)), ar(&p(0), p(1)), p(0)],
        CombKind::S => vec![ar(&p(2), ar(&p(0), p(1))), ar(&p(2), p(0)), p(2)],
    }
}

fn combinator_body(spec: &CombinatorSpec, binders: &[Var]) -> Term {
    let v = |i: usize| Term::var(binders[i].clone());
    match spec.kind {
        CombKind::I | CombKind::K => v(0),
        CombKind::C => Term::apps(v(0), &[v(2), v(1)]).expect("instance typing"),
        CombKind::D => {
            let c = spec.dardinal_const.as_deref().expect("Dardinal carries a constant");
            let konst = Term::constant(c, spec.type_params[1].clone());
            Term::apps(v(0), &[v(1), konst]).expect("instance typing")
        }
        CombKind::W => Term::apps(v(0), &[v(1), v(1)]).expect("instance typing"),
        CombKind::B => {
            Term::app(v(0), Term::app(v(1), v(2)).expect("instance typing"))
                .expect("instance typing")
        }
        CombKind::S => {
            let yz = Term::app(v(1), v(2)).expect("instance typing");
            Term::apps(v(0), &[v(2), yz]).expect("instance typing")
        }
    }
}

/// Builds the instance with explicitly chosen binders.
fn build_with_binders(spec: &CombinatorSpec, binders: &[Var]) -> Term {
    debug_assert_eq!(binders.len(), binder_types(spec).len());
    let term = Term::lams(binders, combinator_body(spec, binders)).expect("instance typing");
    debug_assert_eq!(*term.ty(), spec.result_type());
    term
}

/// Canonical binders: within the instance, each slot takes the lowest index
/// not used by an earlier slot of the same type.
fn canonical_binders(spec: &CombinatorSpec) -> Vec<Var> {
    let tys = binder_types(spec);
    let mut out: Vec<Var> = Vec::new();
    for ty in tys {
        let index = out.iter().filter(|v| v.ty == ty).count() as u32;
        out.push(Var::new(ty, index));
    }
    out
}

/// The canonical combinator term of the definition, with pairwise-distinct
/// bound variables at the lowest legal indices.
pub fn mk_lambda_combinator(
    spec: &CombinatorSpec,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Term, CombinatorError> {
    spec.validate(upsilon, sig)?;
    let binders = canonical_binders(spec);
    for b in &binders {
        debug_assert!(upsilon.admits(&b.ty, b.index), "side conditions admit the binders");
    }
    Ok(build_with_binders(spec, &binders))
}

/// Allocates fresh variables above everything seen so far.
struct FreshAlloc {
    used: BTreeSet<Var>,
}

impl FreshAlloc {
    fn new(avoid: BTreeSet<Var>) -> FreshAlloc {
        FreshAlloc { used: avoid }
    }

    fn fresh(&mut self, ty: &Type) -> Var {
        debug_assert!(ty.is_regular(), "fresh variables are drawn at regular types only");
        let v = crate::term::fresh_var(ty, &self.used);
        self.used.insert(v.clone());
        v
    }
}

/// One recorded contraction.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub term: Term,
    pub distance: usize,
    pub regular: bool,
}

/// A reduction trace from an applied combinator to its behavioural result.
#[derive(Debug, Clone)]
pub struct BehaviourTrace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
    pub result: Term,
}

impl BehaviourTrace {
    pub fn max_distance(&self) -> usize {
        self.steps.iter().map(|s| s.distance).max().unwrap_or(0)
    }

    pub fn all_regular(&self) -> bool {
        self.steps.iter().all(|s| s.regular)
    }
}

/// Drives regular reduction, leftmost-outermost, until the target appears.
fn reduce_to_target(
    start: Term,
    target: &Term,
    upsilon: &Parameter,
    cap: usize,
) -> Result<BehaviourTrace, BehaviourError> {
    let mut steps = Vec::new();
    let mut current = start.clone();
    for _ in 0..cap {
        if current == *target {
            return Ok(BehaviourTrace { start, steps, result: current });
        }
        let redexes = find_redexes(&current, upsilon, ReductionMode::BetaR);
        let Some(first) = redexes.first() else {
            return Err(BehaviourError::TraceFailure(format!(
                "stuck at {current} before reaching {target}"
            )));
        };
        let (distance, regular) = match first {
            Redex::Beta(b) => (b.distance, b.regular),
            Redex::Eta(_) => unreachable!("beta mode only"),
        };
        current = contract(&current, first).expect("enumerated redex applies");
        steps.push(TraceStep { term: current.clone(), distance, regular });
    }
    Err(BehaviourError::TraceFailure(format!("no trace within {cap} steps")))
}

/// Verifies the behavioural reduction of an applied combinator instance:
/// `I P ->> P`, `K P Q ->> P`, `C P Q R ->> P R Q`, `D^c P R ->> P R c`,
/// `W P Q ->> P Q Q`, `B P Q R ->> P (Q R)`, `S P Q R ->> P R (Q R)`, and
/// the partial Cardinal-to-Dardinal step `C P c -> D^c P`. Every step in
/// the trace is a regular reduction of distance at most two.
pub fn verify_combinator_behaviour(
    spec: &CombinatorSpec,
    args: &[Term],
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<BehaviourTrace, BehaviourError> {
    spec.validate(upsilon, sig)?;
    let full_arity = match spec.kind {
        CombKind::I => 1,
        CombKind::K | CombKind::D | CombKind::W => 2,
        CombKind::C | CombKind::B | CombKind::S => 3,
    };
    let cardinal_partial = spec.kind == CombKind::C
        && args.len() == 2
        && matches!(args[1].kind(), TermKind::Const(_));
    if args.len() != full_arity && !cardinal_partial {
        return Err(BehaviourError::TraceFailure(format!(
            "expected {full_arity} arguments for {spec}, got {}",
            args.len()
        )));
    }

    let mut avoid: BTreeSet<Var> = BTreeSet::new();
    for a in args {
        avoid.extend(a.all_vars());
    }
    let mut alloc = FreshAlloc::new(avoid);
    let tys = binder_types(spec);
    let mut binders: Vec<Var> = Vec::new();
    for (slot, ty) in tys.iter().enumerate() {
        let v = if ty.is_regular() {
            alloc.fresh(ty)
        } else if spec.kind == CombKind::C
            && slot == 1
            && spec.type_params[0] == spec.type_params[1]
        {
            // Identical state argument types: align the second binder with
            // the argument when it is a variable, and give the third the
            // other low index. The side condition guarantees budget two.
            match args.get(1).map(Term::kind) {
                Some(TermKind::Var(q)) => q.clone(),
                _ => Var::new(ty.clone(), 0),
            }
        } else if spec.kind == CombKind::C
            && slot == 2
            && spec.type_params[0] == spec.type_params[1]
        {
            let y = &binders[1];
            Var::new(ty.clone(), if y.index == 0 { 1 } else { 0 })
        } else {
            Var::new(ty.clone(), 0)
        };
        binders.push(v);
    }
    let instance = build_with_binders(spec, &binders);
    let applied = Term::apps(instance, args)
        .map_err(|e| BehaviourError::TraceFailure(format!("ill-typed application: {e}")))?;

    let expected = if cardinal_partial {
        // C P c -> D^c P, with the Dardinal inheriting the Cardinal's
        // first and third binders.
        let TermKind::Const(c) = args[1].kind() else { unreachable!() };
        let d = CombinatorSpec::d(
            spec.type_params[0].clone(),
            spec.type_params[1].clone(),
            spec.type_params[2].clone(),
            c,
        );
        let d_term = build_with_binders(&d, &[binders[0].clone(), binders[2].clone()]);
        Term::app(d_term, args[0].clone()).expect("typing")
    } else {
        let a = |i: usize| args[i].clone();
        match spec.kind {
            CombKind::I | CombKind::K => a(0),
            CombKind::C => Term::apps(a(0), &[a(2), a(1)]).expect("typing"),
            CombKind::D => {
                let c = spec.dardinal_const.as_deref().expect("spec");
                let konst = Term::constant(c, spec.type_params[1].clone());
                Term::apps(a(0), &[a(1), konst]).expect("typing")
            }
            CombKind::W => Term::apps(a(0), &[a(1), a(1)]).expect("typing"),
            CombKind::B => {
                Term::app(a(0), Term::app(a(1), a(2)).expect("typing")).expect("typing")
            }
            CombKind::S => {
                let qr = Term::app(a(1), a(2)).expect("typing");
                Term::apps(a(0), &[a(2), qr]).expect("typing")
            }
        }
    };
    let trace = reduce_to_target(applied, &expected, upsilon, 20)?;
    if trace.max_distance() > 2 {
        return Err(BehaviourError::TraceFailure("a step exceeded distance two".into()));
    }
    Ok(trace)
}

/// A beta chain: consecutive entries are one contraction apart, first entry
/// the combinatorial witness, last entry the original term.
pub type Chain = Vec<Term>;

fn embed(chain: &[Term], f: impl Fn(&Term) -> Term) -> Chain {
    chain.iter().map(|t| f(t)).collect()
}

/// Appends `suffix` to `chain`, dropping the repeated junction entry.
fn join_chains(mut chain: Chain, suffix: Chain) -> Chain {
    debug_assert_eq!(chain.last(), suffix.first(), "chains must meet at the junction");
    chain.extend(suffix.into_iter().skip(1));
    chain
}

/// Contracts the redex at `path` on the last chain entry and pushes the
/// result.
fn chain_step(chain: &mut Chain, path: &[PathStep]) -> Result<(), BehaviourError> {
    let current = chain.last().expect("chains are non-empty").clone();
    let redex = beta_redex_at(&current, path).ok_or_else(|| {
        BehaviourError::TraceFailure(format!("no redex at {path:?} in {current}"))
    })?;
    let next = contract(&current, &Redex::Beta(redex))
        .map_err(|e| BehaviourError::TraceFailure(e.to_string()))?;
    chain.push(next);
    Ok(())
}

const F: PathStep = PathStep::Fun;
const A: PathStep = PathStep::Arg;
const B: PathStep = PathStep::Body;

/// The expanded Starling: the Bluebird/Cardinal/Warbler composite of the
/// recovery proposition, together with a chain reducing it to the Starling
/// term whose third binder is `z4`. The first two binders of the resulting
/// Starling term are returned as well.
struct StarlingExpansion {
    composite: Term,
    chain: Chain,
    starling_term: Term,
    binder_x: Var,
    binder_y: Var,
}

fn expand_starling(
    a: &Type,
    b: &Type,
    c: &Type,
    z4: Var,
    alloc: &mut FreshAlloc,
) -> Result<StarlingExpansion, BehaviourError> {
    debug_assert_eq!(z4.ty, *c);
    let specs = starling_component_specs(a, b, c);
    // z1 and z3 become the first two binders of the Starling term; both are
    // arrow-typed. Every other binder is fresh; the state-typed slots of
    // W4 and the component tails take z4 or index zero.
    let tys: Vec<Vec<Type>> = specs.iter().map(binder_types).collect();
    let mut pick = |ty: &Type, is_tail: bool| -> Var {
        if ty.is_regular() {
            alloc.fresh(ty)
        } else {
            debug_assert!(is_tail, "only tail binders can be state-typed here");
            Var::new(ty.clone(), 0)
        }
    };
    let mk = |spec: &CombinatorSpec, binders: &[Var]| build_with_binders(spec, binders);

    // Component binders; W4's second slot is the target z4.
    let b1b = vec![pick(&tys[0][0], false), pick(&tys[0][1], false), pick(&tys[0][2], true)];
    let b2b = vec![pick(&tys[1][0], false), pick(&tys[1][1], false), pick(&tys[1][2], true)];
    let b3b = vec![pick(&tys[2][0], false), pick(&tys[2][1], false), pick(&tys[2][2], true)];
    let w4b = vec![pick(&tys[3][0], false), z4.clone()];
    let c5b = vec![pick(&tys[4][0], false), pick(&tys[4][1], false), pick(&tys[4][2], true)];
    let b6b = vec![pick(&tys[5][0], false), pick(&tys[5][1], false), pick(&tys[5][2], true)];
    let b7b = vec![pick(&tys[6][0], false), pick(&tys[6][1], false), pick(&tys[6][2], true)];
    let z1 = b1b[2].clone();
    let z3 = b3b[2].clone();

    let b1t = mk(&specs[0], &b1b);
    let b2t = mk(&specs[1], &b2b);
    let b3t = mk(&specs[2], &b3b);
    let w4t = mk(&specs[3], &w4b);
    let c5t = mk(&specs[4], &c5b);
    let b6t = mk(&specs[5], &b6b);
    let b7t = mk(&specs[6], &b7b);

    let inner = Term::apps(b2t, &[Term::app(b3t, w4t).expect("table typing"), c5t])
        .expect("table typing");
    let right = Term::app(b6t, b7t).expect("table typing");
    let composite = Term::apps(b1t, &[inner, right]).expect("table typing");

    let mut chain: Chain = vec![composite.clone()];
    let script: &[&[PathStep]] = &[
        &[],
        &[],
        &[B],
        &[B],
        &[B],
        &[B],
        &[B],
        &[B, B],
        &[B, B, B, F],
        &[B, B, B, F],
        &[B, B, B, F],
        &[B, B, B, F, F],
        &[B, B, B, F, F],
        &[B, B, B, F, F],
        &[B, B, B],
        &[B, B, B],
        &[B, B, B],
    ];
    for path in script {
        chain_step(&mut chain, path)?;
    }

    // The endpoint is the Starling term with binders z1, z3, z4.
    let starling_term = {
        let x = Term::var(z1.clone());
        let z = Term::var(z4.clone());
        let yz = Term::app(Term::var(z3.clone()), z.clone()).expect("typing");
        Term::lams(
            &[z1.clone(), z3.clone(), z4],
            Term::apps(x, &[z, yz]).expect("typing"),
        )
        .expect("typing")
    };
    if chain.last() != Some(&starling_term) {
        return Err(BehaviourError::TraceFailure(format!(
            "starling expansion ended at {} instead of {starling_term}",
            chain.last().expect("non-empty")
        )));
    }
    Ok(StarlingExpansion { composite, chain, starling_term, binder_x: z1, binder_y: z3 })
}

/// The expanded Starling as a public builder: a closed term that reduces to
/// the Starling behaviour, with the component instances of the recovery
/// table. Canonical binder choices.
pub fn derive_starling(
    a: &Type,
    b: &Type,
    c: &Type,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Term, CombinatorError> {
    let probe = CombinatorSpec::s(a.clone(), b.clone(), c.clone());
    probe.validate(upsilon, sig)?;
    let z4 = Var::new(c.clone(), 0);
    let mut alloc = FreshAlloc::new(BTreeSet::new());
    let exp = expand_starling(a, b, c, z4, &mut alloc).map_err(|e| match e {
        BehaviourError::Combinator(c) => c,
        BehaviourError::TraceFailure(msg) => {
            CombinatorError::SideConditionViolated { spec: probe.to_string(), clause: msg }
        }
    })?;
    Ok(exp.composite)
}

/// The expanded Identity `S K K` over the expanded Starling; reduces to the
/// identity behaviour.
pub fn derive_identity(
    b: &Type,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Term, CombinatorError> {
    let probe = CombinatorSpec::i(b.clone());
    probe.validate(upsilon, sig)?;
    let v = Var::new(b.clone(), 0);
    let mut alloc = FreshAlloc::new(BTreeSet::new());
    alloc.used.insert(v.clone());
    let exp = expand_identity(b, v, &mut alloc, upsilon, sig).map_err(|e| match e {
        BehaviourError::Combinator(c) => c,
        BehaviourError::TraceFailure(msg) => {
            CombinatorError::SideConditionViolated { spec: probe.to_string(), clause: msg }
        }
    })?;
    Ok(exp.0)
}

/// Identity expansion targeted at a specific final binder: returns the
/// composite and a chain ending at `\v:B.v`.
fn expand_identity(
    b: &Type,
    v: Var,
    alloc: &mut FreshAlloc,
    _upsilon: &Parameter,
    _sig: &Signature,
) -> Result<(Term, Chain), BehaviourError> {
    let bb = Type::arrow(b.clone(), b.clone()).expect("regular");
    let exp = expand_starling(&bb, b, b, v.clone(), alloc)?;
    // K1 : B -> (B->B) -> B with first binder distinct from v.
    let k1_spec = CombinatorSpec::k(b.clone(), bb.clone());
    let k1a = alloc.fresh(b);
    let k1b = alloc.fresh(&bb);
    let k1 = build_with_binders(&k1_spec, &[k1a, k1b]);
    let k2_spec = CombinatorSpec::k(b.clone(), b.clone());
    let k2a = alloc.fresh(b);
    let k2b = alloc.fresh(b);
    let k2 = build_with_binders(&k2_spec, &[k2a, k2b]);

    let composite =
        Term::apps(exp.composite.clone(), &[k1.clone(), k2.clone()]).expect("recovery typing");
    let mut chain = embed(&exp.chain, |t| {
        Term::apps(t.clone(), &[k1.clone(), k2.clone()]).expect("recovery typing")
    });
    // S K1 K2 -> .. -> \v. K1 v (K2 v) -> \v. (\a.a) v -> \v. v
    chain_step(&mut chain, &[])?;
    chain_step(&mut chain, &[])?;
    chain_step(&mut chain, &[B])?;
    chain_step(&mut chain, &[B])?;
    let target = Term::lam(v.clone(), Term::var(v)).expect("typing");
    if chain.last() != Some(&target) {
        return Err(BehaviourError::TraceFailure(format!(
            "identity expansion ended at {}",
            chain.last().expect("non-empty")
        )));
    }
    Ok((composite, chain))
}

/// The result of combinatorializing a term: a term built from combinator
/// instances, variables, and constants only; a structured skeleton of the
/// same shape; and a witnessing beta chain from the witness to the input.
#[derive(Debug, Clone)]
pub struct Combinatorialization {
    pub skeleton: ClTerm,
    pub term: Term,
    pub chain: Chain,
}

/// Rewrites a term into an applied combination of combinator instances
/// reducing to it: identity for the bound variable, Kestral for
/// non-occurrence, expanded Starling for a regular argument type, and
/// Warbler / Cardinal / Dardinal for the three state-argument cases. Total
/// on well-typed terms of the calculus.
pub fn to_combinatorial(
    term: &Term,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Combinatorialization, BehaviourError> {
    let (skeleton, l, chain) = go_comb(term, upsilon, sig)?;
    debug_assert_eq!(chain.first(), Some(&l));
    debug_assert_eq!(chain.last(), Some(term));
    Ok(Combinatorialization { skeleton, term: l, chain })
}

fn go_comb(
    term: &Term,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<(ClTerm, Term, Chain), BehaviourError> {
    match term.kind() {
        TermKind::Var(v) => {
            Ok((ClTerm::var(v.clone()), term.clone(), vec![term.clone()]))
        }
        TermKind::Const(c) => {
            Ok((ClTerm::constant(c, term.ty().clone()), term.clone(), vec![term.clone()]))
        }
        TermKind::App(f, a) => {
            let (sk0, l0, ch0) = go_comb(f, upsilon, sig)?;
            let (sk1, l1, ch1) = go_comb(a, upsilon, sig)?;
            let skeleton = ClTerm::app(sk0, sk1).expect("mirrors term typing");
            let l = Term::app(l0, l1.clone()).expect("typing");
            let chain = join_chains(
                embed(&ch0, |t| Term::app(t.clone(), l1.clone()).expect("typing")),
                embed(&ch1, |t| Term::app(f.clone(), t.clone()).expect("typing")),
            );
            Ok((skeleton, l, chain))
        }
        TermKind::Lam(v, body) => {
            let (sk0, l0, ch0) = go_comb(body, upsilon, sig)?;
            let (sk, n, chain_n) = abstract_comb(v, &sk0, &l0, upsilon, sig)?;
            // n ->> \v.l0 ->> \v.body
            let tail = embed(&ch0, |t| Term::lam(v.clone(), t.clone()).expect("typing"));
            Ok((sk, n.clone(), join_chains(chain_n, tail)))
        }
    }
}

/// Abstraction of `v` out of a combinatorial term `l` (with skeleton `sk`):
/// returns a combinatorial term and a chain ending exactly at `\v. l`.
fn abstract_comb(
    v: &Var,
    sk: &ClTerm,
    l: &Term,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<(ClTerm, Term, Chain), BehaviourError> {
    let mut avoid = l.all_vars();
    avoid.insert(v.clone());
    let mut alloc = FreshAlloc::new(avoid);
    let body_ty = l.ty().clone();

    // The bound variable itself: the expanded identity.
    if matches!(sk.kind(), ClKind::Var(u) if u == v) {
        let (composite, chain) = expand_identity(&v.ty, v.clone(), &mut alloc, upsilon, sig)?;
        let sk_i = cl_derived_identity_skeleton(&v.ty, upsilon, sig)?;
        return Ok((sk_i, composite, chain));
    }

    // Non-occurrence: Kestral, second binder aligned with v.
    if !sk.contains_var(v) {
        let spec = CombinatorSpec::k(body_ty.clone(), v.ty.clone());
        spec.validate(upsilon, sig)?;
        let x = alloc.fresh(&body_ty);
        let k = build_with_binders(&spec, &[x, v.clone()]);
        let n = Term::app(k, l.clone()).expect("typing");
        let mut chain = vec![n.clone()];
        chain_step(&mut chain, &[])?;
        let sk_k = ClTerm::app(ClTerm::comb_unchecked(spec), sk.clone()).expect("typing");
        return Ok((sk_k, n, chain));
    }

    let (ClKind::App(sk0, sk1), TermKind::App(l0, l1)) = (sk.kind(), l.kind()) else {
        unreachable!("an occurrence of the variable forces an application");
    };
    let arg_ty = l1.ty().clone();

    if arg_ty.is_regular() {
        // Starling case.
        let (ska, na, cha) = abstract_comb(v, sk0, l0, upsilon, sig)?;
        let (skb, nb, chb) = abstract_comb(v, sk1, l1, upsilon, sig)?;
        let mut avoid = na.all_vars();
        avoid.extend(nb.all_vars());
        avoid.extend(l.all_vars());
        avoid.insert(v.clone());
        let mut alloc = FreshAlloc::new(avoid);
        let exp = expand_starling(&arg_ty, &body_ty, &v.ty, v.clone(), &mut alloc)?;
        let n = Term::apps(exp.composite.clone(), &[na.clone(), nb.clone()]).expect("typing");
        let lam_l0 = Term::lam(v.clone(), l0.clone()).expect("typing");
        let mut chain = embed(&exp.chain, |t| {
            Term::apps(t.clone(), &[na.clone(), nb.clone()]).expect("typing")
        });
        chain = join_chains(
            chain,
            embed(&cha, |t| {
                Term::apps(exp.starling_term.clone(), &[t.clone(), nb.clone()]).expect("typing")
            }),
        );
        chain = join_chains(
            chain,
            embed(&chb, |t| {
                Term::apps(exp.starling_term.clone(), &[lam_l0.clone(), t.clone()])
                    .expect("typing")
            }),
        );
        // S (\v.l0) (\v.l1) -> .. -> \v. l0 l1
        chain_step(&mut chain, &[])?;
        chain_step(&mut chain, &[])?;
        chain_step(&mut chain, &[B, F])?;
        chain_step(&mut chain, &[B, A])?;
        expect_last(&chain, &Term::lam(v.clone(), l.clone()).expect("typing"))?;
        let sk_s = ClTerm::apps(cl_derived_starling_skeleton(&arg_ty, &body_ty, &v.ty), &[ska, skb])
            .expect("typing");
        let _ = exp.binder_x;
        let _ = exp.binder_y;
        return Ok((sk_s, n, chain));
    }

    // State-typed argument: a variable or a constant.
    match l1.kind() {
        TermKind::Var(u) if u == v => {
            // Warbler, second binder aligned with v.
            let (ska, na, cha) = abstract_comb(v, sk0, l0, upsilon, sig)?;
            let spec = CombinatorSpec::w(v.ty.clone(), body_ty.clone());
            spec.validate(upsilon, sig)?;
            let mut avoid = na.all_vars();
            avoid.insert(v.clone());
            let x = FreshAlloc::new(avoid).fresh(&binder_types(&spec)[0]);
            let w = build_with_binders(&spec, &[x, v.clone()]);
            let n = Term::app(w.clone(), na.clone()).expect("typing");
            let mut chain = embed(&cha, |t| Term::app(w.clone(), t.clone()).expect("typing"));
            chain_step(&mut chain, &[])?;
            chain_step(&mut chain, &[B, F])?;
            expect_last(&chain, &Term::lam(v.clone(), l.clone()).expect("typing"))?;
            let sk_w =
                ClTerm::app(ClTerm::comb_unchecked(spec), ska).expect("typing");
            Ok((sk_w, n, chain))
        }
        TermKind::Var(q) => {
            // Cardinal, second binder aligned with the argument variable,
            // third with v.
            let (ska, na, cha) = abstract_comb(v, sk0, l0, upsilon, sig)?;
            let spec = CombinatorSpec::c(v.ty.clone(), arg_ty.clone(), body_ty.clone());
            spec.validate(upsilon, sig)?;
            let mut avoid = na.all_vars();
            avoid.insert(v.clone());
            avoid.insert(q.clone());
            let x = FreshAlloc::new(avoid).fresh(&binder_types(&spec)[0]);
            let c = build_with_binders(&spec, &[x, q.clone(), v.clone()]);
            let n = Term::apps(c.clone(), &[na.clone(), l1.clone()]).expect("typing");
            let mut chain = embed(&cha, |t| {
                Term::apps(c.clone(), &[t.clone(), l1.clone()]).expect("typing")
            });
            chain_step(&mut chain, &[])?;
            chain_step(&mut chain, &[])?;
            chain_step(&mut chain, &[B, F])?;
            expect_last(&chain, &Term::lam(v.clone(), l.clone()).expect("typing"))?;
            let sk_c = ClTerm::apps(ClTerm::comb_unchecked(spec), &[ska, sk1.clone()])
                .expect("typing");
            Ok((sk_c, n, chain))
        }
        TermKind::Const(name) => {
            // Dardinal, second binder aligned with v.
            let (ska, na, cha) = abstract_comb(v, sk0, l0, upsilon, sig)?;
            let spec =
                CombinatorSpec::d(v.ty.clone(), arg_ty.clone(), body_ty.clone(), name);
            spec.validate(upsilon, sig)?;
            let mut avoid = na.all_vars();
            avoid.insert(v.clone());
            let x = FreshAlloc::new(avoid).fresh(&binder_types(&spec)[0]);
            let d = build_with_binders(&spec, &[x, v.clone()]);
            let n = Term::app(d.clone(), na.clone()).expect("typing");
            let mut chain = embed(&cha, |t| Term::app(d.clone(), t.clone()).expect("typing"));
            chain_step(&mut chain, &[])?;
            chain_step(&mut chain, &[B, F])?;
            expect_last(&chain, &Term::lam(v.clone(), l.clone()).expect("typing"))?;
            let sk_d = ClTerm::app(ClTerm::comb_unchecked(spec), ska).expect("typing");
            Ok((sk_d, n, chain))
        }
        _ => unreachable!("state-typed subterms are variables or constants"),
    }
}

fn expect_last(chain: &Chain, target: &Term) -> Result<(), BehaviourError> {
    if chain.last() == Some(target) {
        Ok(())
    } else {
        Err(BehaviourError::TraceFailure(format!(
            "chain ended at {} instead of {target}",
            chain.last().expect("non-empty")
        )))
    }
}

/// Skeleton of the derived combinatory-logic Starling (shared shape with
/// the lambda-side expansion).
fn cl_derived_starling_skeleton(a: &Type, b: &Type, c: &Type) -> ClTerm {
    let specs = starling_component_specs(a, b, c);
    let [b1, b2, b3, w4, c5, b6, b7] = specs;
    let k = ClTerm::comb_unchecked;
    let inner = ClTerm::app(
        ClTerm::app(k(b2), ClTerm::app(k(b3), k(w4)).expect("typing")).expect("typing"),
        k(c5),
    )
    .expect("typing");
    let right = ClTerm::app(k(b6), k(b7)).expect("typing");
    ClTerm::app(ClTerm::app(k(b1), inner).expect("typing"), right).expect("typing")
}

fn cl_derived_identity_skeleton(
    b: &Type,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ClTerm, BehaviourError> {
    crate::cl::derive_cl_identity(b, upsilon, sig).map_err(BehaviourError::from)
}

/// The closed replacement term for a Cardinal over identical state argument
/// types that is missing at budget one: a term of type
/// `(B->B->C) -> B -> B -> C` using only the single index-zero variable of
/// the state type, denotationally equal to the Cardinal in every model.
pub fn cardinal_replacement(b: &Type, c: &Type) -> Term {
    let bc = Type::arrow(b.clone(), c.clone()).expect("regular codomain");
    let bbc = Type::arrow(b.clone(), bc.clone()).expect("regular codomain");
    let v = Var::new(bbc, 0);
    let v0 = Var::new(b.clone(), 0);
    let big_v = Var::new(Type::arrow(bc.clone(), c.clone()).expect("regular"), 0);
    let u = Var::new(bc, 0);
    let left = Term::lam(
        big_v.clone(),
        Term::lam(
            v0.clone(),
            Term::app(
                Term::var(big_v),
                Term::app(Term::var(v.clone()), Term::var(v0.clone())).expect("typing"),
            )
            .expect("typing"),
        )
        .expect("typing"),
    )
    .expect("typing");
    let right = Term::lam(
        u.clone(),
        Term::app(Term::var(u), Term::var(v0.clone())).expect("typing"),
    )
    .expect("typing");
    let body = Term::app(left, right).expect("typing");
    Term::lam(v, Term::lam(v0, body).expect("typing")).expect("typing")
}

/// Renders a combinatory-logic term as a lambda term: variables and
/// constants map to themselves, combinator instances to their canonical
/// lambda terms. With `replace_missing_cardinals`, a Cardinal whose
/// identical state argument types have budget one at the target parameter
/// is rendered as [`cardinal_replacement`] instead.
pub fn render_cl_as_lambda(
    term: &ClTerm,
    upsilon: &Parameter,
    sig: &Signature,
    replace_missing_cardinals: bool,
) -> Result<Term, CombinatorError> {
    match term.kind() {
        ClKind::Var(v) => Ok(Term::var(v.clone())),
        ClKind::Const(c) => Ok(Term::constant(c, term.ty().clone())),
        ClKind::Comb(spec) => {
            if replace_missing_cardinals
                && spec.kind == CombKind::C
                && spec.type_params[0] == spec.type_params[1]
                && spec.type_params[0].is_state()
                && upsilon.budget(&spec.type_params[0]) == Budget::Finite(1)
            {
                Ok(cardinal_replacement(&spec.type_params[0], &spec.type_params[2]))
            } else {
                mk_lambda_combinator(spec, upsilon, sig)
            }
        }
        ClKind::App(f, a) => {
            let f2 = render_cl_as_lambda(f, upsilon, sig, replace_missing_cardinals)?;
            let a2 = render_cl_as_lambda(a, upsilon, sig, replace_missing_cardinals)?;
            Ok(Term::app(f2, a2).expect("translation preserves typing"))
        }
    }
}

/// Compiles a term of the maximal system down to the target parameter:
/// combinatorialize at the maximal parameter, then uniformly replace every
/// Cardinal instance missing at the target by its closed replacement. The
/// output is a term of the target system with the same free variables and
/// constants, semantically equal to the input in every model of the target
/// system.
pub fn express_omega_to_upsilon(
    term: &Term,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Term, ExpressError> {
    for v in term.free_vars() {
        if !upsilon.admits(&v.ty, v.index) {
            return Err(ExpressError::IllegalFreeVariable(v));
        }
    }
    for c in term.constants() {
        if sig.lookup(&c).is_none() {
            return Err(ExpressError::IllegalConstant(c));
        }
    }
    let omega = Parameter::omega();
    let cl = crate::translate::to_cl(term, &omega, sig).map_err(ExpressError::Combinator)?;
    let rendered = render_cl_as_lambda(&cl, upsilon, sig, true)?;
    debug_assert_eq!(rendered.ty(), term.ty());
    debug_assert!(rendered.respects_budgets(upsilon));
    Ok(rendered)
}

/// Compiles a term of the ordinary simply-typed calculus into the maximal
/// modal system: beta-eta normalize and check the normal form lies in the
/// modal fragment, which the conservation argument guarantees whenever the
/// surviving free variables, constants, and the type are modal. A free
/// variable of non-modal type is only an error when it survives
/// normalization.
pub fn express_lambda_to_mlt(term: &Term, fuel: u64) -> Result<Term, ExpressError> {
    if !term.ty().is_modal() {
        return Err(ExpressError::NonModalType(term.ty().clone()));
    }
    let nf = normalize_full_lambda(term, fuel)?;
    for v in nf.free_vars() {
        if !v.ty.is_modal() {
            return Err(ExpressError::IllegalFreeVariable(v));
        }
    }
    if !nf.is_modal() {
        return Err(ExpressError::NotMltTerm(nf.to_string()));
    }
    Ok(nf)
}

/// Replays a combinatorialization chain: every consecutive pair must be one
/// enumerable beta contraction apart. Used by tests and the self-check.
pub fn replay_chain(chain: &Chain, upsilon: &Parameter) -> Result<(), String> {
    for window in chain.windows(2) {
        let (a, b) = (&window[0], &window[1]);
        let found = find_redexes(a, upsilon, ReductionMode::Beta)
            .iter()
            .any(|r| contract(a, r).ok().as_ref() == Some(b));
        if !found {
            return Err(format!("no single beta step from {a} to {b}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{beta_eta_equal, DEFAULT_FUEL};
    use crate::types::Budget;

    fn s() -> Type {
        Type::state("S")
    }
    fn e() -> Type {
        Type::entity("E")
    }
    fn t() -> Type {
        Type::entity("T")
    }
    fn u1() -> Parameter {
        Parameter::omega().with("S", Budget::Finite(1))
    }
    fn u2() -> Parameter {
        Parameter::omega().with("S", Budget::Finite(2))
    }
    fn sig() -> Signature {
        Signature::new().with("c", s())
    }

    #[test]
    fn canonical_combinator_terms() {
        // K[E,S] = \x:E.\y:S.x : E->S->E
        let k = mk_lambda_combinator(&CombinatorSpec::k(e(), s()), &u1(), &sig()).unwrap();
        let x = Var::new(e(), 0);
        let y = Var::new(s(), 0);
        assert_eq!(k, Term::lam(x.clone(), Term::lam(y, Term::var(x)).unwrap()).unwrap());
        // C[S,S,T] at budget one violates the side condition.
        assert!(mk_lambda_combinator(&CombinatorSpec::c(s(), s(), t()), &u1(), &sig()).is_err());
        // D[c;S,S,T] = \x:S->S->T.\z:S. x z c.
        let d = mk_lambda_combinator(&CombinatorSpec::d(s(), s(), t(), "c"), &u1(), &sig())
            .unwrap();
        let xd = Var::new(Type::arrows(&[s(), s()], t()).unwrap(), 0);
        let zd = Var::new(s(), 0);
        let expected = Term::lam(
            xd.clone(),
            Term::lam(
                zd.clone(),
                Term::apps(Term::var(xd), &[Term::var(zd), Term::constant("c", s())]).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(d, expected);
        // The Cardinal over identical state types binds indices 0 and 1.
        let c = mk_lambda_combinator(&CombinatorSpec::c(s(), s(), t()), &u2(), &sig()).unwrap();
        let TermKind::Lam(_, rest) = c.kind() else { panic!() };
        let TermKind::Lam(yb, rest) = rest.kind() else { panic!() };
        let TermKind::Lam(zb, _) = rest.kind() else { panic!() };
        assert_eq!((yb.index, zb.index), (0, 1));
        // Combinator terms are closed with pairwise distinct binders.
        assert!(c.free_vars().is_empty());
    }

    #[test]
    fn behaviour_traces() {
        let upsilon = u1();
        // W[S,T] p q ->> p q q via distance 1 then distance 0.
        let p = Term::var(Var::new(Type::arrows(&[s(), s()], t()).unwrap(), 0));
        let q = Term::var(Var::new(s(), 0));
        let trace = verify_combinator_behaviour(
            &CombinatorSpec::w(s(), t()),
            &[p.clone(), q.clone()],
            &upsilon,
            &sig(),
        )
        .unwrap();
        assert_eq!(trace.result, Term::apps(p, &[q.clone(), q]).unwrap());
        assert_eq!(
            trace.steps.iter().map(|st| st.distance).collect::<Vec<_>>(),
            vec![1, 0]
        );
        assert!(trace.all_regular());

        // C[S,E,T] p q r goes through a regular distance-2 step.
        let p = Term::var(Var::new(
            Type::arrows(&[s(), e()], t()).unwrap(),
            0,
        ));
        let q = Term::var(Var::new(e(), 3));
        let r = Term::var(Var::new(s(), 0));
        let trace = verify_combinator_behaviour(
            &CombinatorSpec::c(s(), e(), t()),
            &[p.clone(), q.clone(), r.clone()],
            &upsilon,
            &sig(),
        )
        .unwrap();
        assert_eq!(trace.result, Term::apps(p, &[r, q]).unwrap());
        assert_eq!(trace.max_distance(), 2);
        assert!(trace.all_regular());

        // C[E,S,T] p c contracts to the Dardinal in one distance-1 step.
        let p = Term::var(Var::new(Type::arrows(&[e(), s()], t()).unwrap(), 0));
        let c = Term::constant("c", s());
        let trace = verify_combinator_behaviour(
            &CombinatorSpec::c(e(), s(), t()),
            &[p, c],
            &upsilon,
            &sig(),
        )
        .unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].distance, 1);
    }

    #[test]
    fn starling_and_identity_expansion() {
        // derive_starling(E,E,S): well-formed even with a state index type.
        let st = derive_starling(&e(), &e(), &s(), &u1(), &sig()).unwrap();
        assert!(st.free_vars().is_empty());
        // Behaviour through the kernel's own normalizer at all-entity types.
        let stf = derive_starling(&e(), &e(), &e(), &u1(), &sig()).unwrap();
        let p = Term::var(Var::new(Type::arrows(&[e(), e()], e()).unwrap(), 0));
        let q = Term::var(Var::new(Type::arrow(e(), e()).unwrap(), 0));
        let r = Term::var(Var::new(e(), 0));
        let applied = Term::apps(stf, &[p.clone(), q.clone(), r.clone()]).unwrap();
        let nf = normalize_full_lambda(&applied, DEFAULT_FUEL).unwrap();
        let expected =
            Term::apps(p, &[r.clone(), Term::app(q, r).unwrap()]).unwrap();
        assert!(crate::term::alpha_equal(&nf, &expected));

        // Identity at E and at S->T; rejected at the state atom.
        for ty in [e(), Type::arrow(s(), t()).unwrap()] {
            let ident = derive_identity(&ty, &u1(), &sig()).unwrap();
            let x = Term::var(Var::new(ty.clone(), 0));
            let applied = Term::app(ident, x.clone()).unwrap();
            let nf = normalize_full_lambda(&applied, DEFAULT_FUEL).unwrap();
            assert!(crate::term::alpha_equal(&nf, &x));
        }
        assert!(derive_identity(&s(), &u1(), &sig()).is_err());
    }

    #[test]
    fn combinatorialization_replays() {
        let upsilon = u2();
        // \v:A.v at a regular type.
        let v = Var::new(e(), 0);
        let idt = Term::lam(v.clone(), Term::var(v)).unwrap();
        let out = to_combinatorial(&idt, &upsilon, &sig()).unwrap();
        assert_eq!(out.chain.last(), Some(&idt));
        replay_chain(&out.chain, &upsilon).unwrap();

        // \v:S. u v with u : S->T free: the Warbler subcase, W (K u).
        let vs = Var::new(s(), 0);
        let u = Var::new(Type::arrow(s(), t()).unwrap(), 0);
        let m = Term::lam(
            vs.clone(),
            Term::app(Term::var(u.clone()), Term::var(vs.clone())).unwrap(),
        )
        .unwrap();
        let out = to_combinatorial(&m, &upsilon, &sig()).unwrap();
        replay_chain(&out.chain, &upsilon).unwrap();
        assert_eq!(out.chain.last(), Some(&m));
        // The skeleton is W (K u).
        let ClKind::App(w, karg) = out.skeleton.kind() else { panic!() };
        assert!(matches!(w.kind(), ClKind::Comb(spec) if spec.kind == CombKind::W));
        let ClKind::App(k, uvar) = karg.kind() else { panic!() };
        assert!(matches!(k.kind(), ClKind::Comb(spec) if spec.kind == CombKind::K));
        assert!(matches!(uvar.kind(), ClKind::Var(x) if x == &u));
        // Free variables are preserved.
        assert_eq!(out.term.free_vars(), m.free_vars());

        // \v:S.(u c) with v not occurring: the non-occurrence case K (u c).
        let uc = Term::app(
            Term::var(Var::new(Type::arrow(s(), t()).unwrap(), 0)),
            Term::constant("c", s()),
        )
        .unwrap();
        let m = Term::lam(vs, uc).unwrap();
        let out = to_combinatorial(&m, &upsilon, &sig()).unwrap();
        replay_chain(&out.chain, &upsilon).unwrap();
        let ClKind::App(k, _) = out.skeleton.kind() else { panic!() };
        assert!(matches!(k.kind(), ClKind::Comb(spec) if spec.kind == CombKind::K));
    }

    #[test]
    fn combinatorialization_of_the_de_re_term() {
        let upsilon = u2();
        let sig = Signature::new()
            .with("c", s())
            .with(
                "b",
                Type::arrow(s(), Type::arrow(Type::arrow(s(), t()).unwrap(), t()).unwrap())
                    .unwrap(),
            )
            .with("ch", Type::arrows(&[s(), e()], t()).unwrap())
            .with("d", Type::arrow(s(), e()).unwrap());
        let u = Var::new(s(), 0);
        let v = Var::new(s(), 1);
        let inner = Term::lam(
            v.clone(),
            Term::apps(
                Term::constant("ch", Type::arrows(&[s(), e()], t()).unwrap()),
                &[
                    Term::var(v),
                    Term::app(
                        Term::constant("d", Type::arrow(s(), e()).unwrap()),
                        Term::var(u.clone()),
                    )
                    .unwrap(),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let m = Term::lam(
            u.clone(),
            Term::apps(
                Term::constant(
                    "b",
                    Type::arrow(s(), Type::arrow(Type::arrow(s(), t()).unwrap(), t()).unwrap())
                        .unwrap(),
                ),
                &[Term::var(u), inner],
            )
            .unwrap(),
        )
        .unwrap();
        let out = to_combinatorial(&m, &upsilon, &sig).unwrap();
        replay_chain(&out.chain, &upsilon).unwrap();
        assert_eq!(out.chain.last(), Some(&m));
        assert_eq!(out.term.free_vars(), m.free_vars());
        // Both ends agree under full normalization as well.
        assert!(beta_eta_equal(&out.term, &m).unwrap());
    }

    #[test]
    fn cardinal_replacement_is_beta_eta_equal_to_the_cardinal() {
        // The replacement and C[B,B,C] (at budget two) decide equal.
        let upsilon = u2();
        let cardinal =
            mk_lambda_combinator(&CombinatorSpec::c(s(), s(), t()), &upsilon, &sig()).unwrap();
        let replacement = cardinal_replacement(&s(), &t());
        assert!(beta_eta_equal(&cardinal, &replacement).unwrap());
        // The replacement is legal at budget one.
        assert!(replacement.respects_budgets(&u1()));
        assert!(replacement.is_modal());
    }

    #[test]
    fn express_to_budget_one() {
        // N = \v0:S.\v1:S. u v1 v0 is a term of mlt_2 but not of mlt_1;
        // its compilation must typecheck at budget one with the same free
        // variables.
        let u = Var::new(Type::arrows(&[s(), s()], t()).unwrap(), 0);
        let v0 = Var::new(s(), 0);
        let v1 = Var::new(s(), 1);
        let n = Term::lam(
            v0.clone(),
            Term::lam(
                v1.clone(),
                Term::apps(Term::var(u.clone()), &[Term::var(v1), Term::var(v0.clone())]).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        let upsilon = u1();
        let m = express_omega_to_upsilon(&n, &upsilon, &sig()).unwrap();
        assert!(m.respects_budgets(&upsilon));
        assert!(m.is_modal());
        assert_eq!(m.free_vars(), n.free_vars());
        assert_eq!(m.ty(), n.ty());
        // The two sides stay beta-eta equal in the maximal system.
        assert!(beta_eta_equal(&m, &n).unwrap());
        // When nothing is missing the compilation is vacuous up to
        // beta-eta equality.
        let simple = Term::lam(v0.clone(), Term::var(Var::new(e(), 0))).unwrap();
        let m2 = express_omega_to_upsilon(&simple, &upsilon, &sig()).unwrap();
        assert!(beta_eta_equal(&m2, &simple).unwrap());
        // Budget violations in the free variables are rejected.
        let bad = Term::var(Var::new(s(), 1));
        let err = express_omega_to_upsilon(
            &Term::app(Term::var(u), bad).unwrap(),
            &upsilon,
            &sig(),
        )
        .unwrap_err();
        assert!(matches!(err, ExpressError::IllegalFreeVariable(_)));
    }

    #[test]
    fn express_full_lambda_into_mlt() {
        // (\U:E->S.\w:E. u) U' w' normalizes to the modal term u.
        let es = Type::arrow_full(e(), s());
        let u = Var::new(t(), 0);
        let big_u = Var::new(es.clone(), 0);
        let w = Var::new(e(), 0);
        let fun = Term::lam_full(
            big_u.clone(),
            Term::lam_full(w.clone(), Term::var(u.clone())),
        );
        let uprime = Term::var(Var::new(es.clone(), 1));
        let wprime = Term::var(Var::new(e(), 1));
        let n = Term::apps(fun, &[uprime, wprime]).unwrap();
        let m = express_lambda_to_mlt(&n, DEFAULT_FUEL).unwrap();
        assert_eq!(m, Term::var(u));
        // A normal modal term maps to itself.
        let idt = Term::lam(Var::new(e(), 0), Term::var(Var::new(e(), 0))).unwrap();
        assert_eq!(express_lambda_to_mlt(&idt, DEFAULT_FUEL).unwrap(), idt);
        // A surviving free variable of non-modal type is rejected: U w with
        // U : E->S is no modal term even though its type S is an atom.
        let bad = Term::app(Term::var(Var::new(es, 0)), Term::var(Var::new(e(), 0))).unwrap();
        assert!(matches!(
            express_lambda_to_mlt(&bad, DEFAULT_FUEL),
            Err(ExpressError::IllegalFreeVariable(_))
        ));
    }
}
