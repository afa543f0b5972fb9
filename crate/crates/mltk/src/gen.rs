//! Seeded random term generation and bounded exhaustive enumeration.
//!
//! Powers the confluence search, the property harness, and the acceptance
//! suite. Generation is type-directed: state-typed goals can only be
//! variables or constants, so the generators respect that from the start.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cl::{find_weak_redexes, weak_candidate_is_redex, ClKind, ClTerm, WeakRule};
use crate::comb::CombinatorSpec;
use crate::reduction::{contract, find_redexes, ReductionMode};
use crate::term::{Term, Var};
use crate::types::{Budget, Parameter, Signature, Type};

/// Deterministic generator from a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generation context: atoms, signature, parameter, a type menu for
/// application domains, and a pool of free variables.
#[derive(Debug, Clone)]
pub struct GenCtx {
    pub upsilon: Parameter,
    pub sig: Signature,
    pub type_menu: Vec<Type>,
    pub free_pool: Vec<Var>,
    /// Highest binder index generated per state atom; stays within the
    /// budget unless the context is deliberately wider for the maximal
    /// system.
    pub binder_width: u32,
}

impl GenCtx {
    /// The Montagovian context: state atom S, entity atoms E and T, a small
    /// signature, and free variables at the commonly used types.
    pub fn montagovian(state_budget: Budget) -> GenCtx {
        let s = Type::state("S");
        let e = Type::entity("E");
        let t = Type::entity("T");
        let st = Type::arrow(s.clone(), t.clone()).unwrap();
        let se = Type::arrow(s.clone(), e.clone()).unwrap();
        let sst = Type::arrows(&[s.clone(), s.clone()], t.clone()).unwrap();
        let et = Type::arrow(e.clone(), t.clone()).unwrap();
        let tt = Type::arrow(t.clone(), t.clone()).unwrap();
        let upsilon = Parameter::omega().with("S", state_budget);
        let sig = Signature::new()
            .with("c0", s.clone())
            .with("k0", e.clone())
            .with("t0", t.clone())
            .with("p0", st.clone())
            .with("d0", se.clone())
            .with("q0", sst.clone())
            .with("g0", tt.clone());
        let menu = vec![s.clone(), e.clone(), t.clone(), st.clone(), se, sst, et, tt];
        let max_state = match state_budget {
            Budget::Finite(n) => n,
            Budget::Omega => 3,
        };
        let mut free_pool = Vec::new();
        for ty in &menu {
            let width = if ty.is_state() { max_state.min(2) } else { 2 };
            for i in 0..width {
                free_pool.push(Var::new(ty.clone(), i));
            }
        }
        GenCtx { upsilon, sig, type_menu: menu, free_pool, binder_width: max_state.min(3) }
    }

    /// Same atoms and signature, but binders may use indices up to the
    /// maximal system's habits while free variables stay within the target
    /// budget. Used to generate terms of the maximal system whose free
    /// parts are legal at a smaller parameter.
    pub fn montagovian_omega_with_free_budget(free_budget: u32) -> GenCtx {
        let mut ctx = GenCtx::montagovian(Budget::Omega);
        ctx.free_pool.retain(|v| !v.ty.is_state() || v.index < free_budget);
        ctx.binder_width = 2;
        ctx
    }

    fn leaf_candidates(&self, ty: &Type, env: &[Var]) -> Vec<Term> {
        let mut out = Vec::new();
        for v in env.iter().rev() {
            if v.ty == *ty {
                out.push(Term::var(v.clone()));
            }
        }
        for v in &self.free_pool {
            if v.ty == *ty && self.upsilon.admits(&v.ty, v.index) {
                out.push(Term::var(v.clone()));
            }
        }
        for name in self.sig.constants_of(ty) {
            out.push(Term::constant(name, ty.clone()));
        }
        out
    }
}

/// A random well-typed term of the given type, or `None` when the budget
/// runs out before a leaf is reachable.
pub fn random_lterm(
    rng: &mut impl Rng,
    ctx: &GenCtx,
    ty: &Type,
    size: usize,
) -> Option<Term> {
    fn go(rng: &mut impl Rng, ctx: &GenCtx, ty: &Type, size: usize, env: &mut Vec<Var>) -> Option<Term> {
        let leaves = ctx.leaf_candidates(ty, env);
        if ty.is_state() || size <= 1 {
            return leaves.choose(rng).cloned();
        }
        // Weighted choice among leaf, abstraction, application.
        let mut options: Vec<u8> = Vec::new();
        if !leaves.is_empty() {
            options.push(0);
        }
        if ty.as_arrow().is_some() {
            options.extend([1, 1]);
        }
        options.extend([2, 2]);
        match options.choose(rng)? {
            0 => leaves.choose(rng).cloned(),
            1 => {
                let (dom, cod) = ty.as_arrow().expect("checked");
                let width = match ctx.upsilon.budget(dom) {
                    Budget::Finite(n) => n.min(ctx.binder_width),
                    Budget::Omega => ctx.binder_width,
                };
                let v = Var::new(dom.clone(), rng.gen_range(0..width.max(1)));
                env.push(v.clone());
                let body = go(rng, ctx, cod, size - 1, env);
                env.pop();
                Term::lam(v, body?).ok()
            }
            _ => {
                let dom = ctx.type_menu.choose(rng)?.clone();
                let fun_ty = Type::arrow(dom.clone(), ty.clone()).ok()?;
                let fsize = rng.gen_range(1..size.max(2));
                let f = go(rng, ctx, &fun_ty, fsize, env)?;
                let a = go(rng, ctx, &dom, size.saturating_sub(1 + fsize).max(1), env)?;
                Term::app(f, a).ok()
            }
        }
    }
    go(rng, ctx, ty, size, &mut Vec::new())
}

/// A random well-typed term at a random regular type from the menu;
/// retries until one fits.
pub fn random_lterm_any(rng: &mut impl Rng, ctx: &GenCtx, max_size: usize) -> Term {
    loop {
        let ty = ctx.type_menu.choose(rng).expect("non-empty menu").clone();
        let size = rng.gen_range(2..=max_size.max(3));
        if let Some(t) = random_lterm(rng, ctx, &ty, size) {
            debug_assert!(t.respects_budgets(&ctx.upsilon) || ctx.binder_width > 1);
            return t;
        }
    }
}

/// Combinator specs whose instance type equals `ty`, with side conditions
/// satisfied. Only the combinatory-logic primitives are produced.
fn cl_specs_for(ty: &Type, ctx: &GenCtx) -> Vec<CombinatorSpec> {
    let mut out = Vec::new();
    let Some((f, rest)) = ty.as_arrow() else { return Vec::new() };
    // K: A -> B -> A
    if let Some((b, a2)) = rest.as_arrow() {
        if a2 == f {
            out.push(CombinatorSpec::k(f.clone(), b.clone()));
        }
    }
    // W: (A->A->B) -> A -> B
    if let (Some((fd, fc)), Some((a, b))) = (f.as_arrow(), rest.as_arrow()) {
        if fd == a {
            if let Some((a2, b2)) = fc.as_arrow() {
                if a2 == a && b2 == b {
                    out.push(CombinatorSpec::w(a.clone(), b.clone()));
                }
            }
        }
    }
    // C: (A->B->C) -> B -> A -> C and D: (A->B->C) -> A -> C
    if let Some((fa, fbc)) = f.as_arrow() {
        if let Some((fb, fcc)) = fbc.as_arrow() {
            if let Some((b2, ac)) = rest.as_arrow() {
                if let Some((a2, c2)) = ac.as_arrow() {
                    if fa == a2 && fb == b2 && fcc == c2 {
                        out.push(CombinatorSpec::c(fa.clone(), fb.clone(), fcc.clone()));
                    }
                }
                // D with B read off the function part.
                if fa == b2 && fcc == ac && fb.is_state() {
                    for name in ctx.sig.constants_of(fb) {
                        out.push(CombinatorSpec::d(fa.clone(), fb.clone(), fcc.clone(), name));
                    }
                }
            }
        }
    }
    // B: (B->C) -> (A->B) -> A -> C
    if let (Some((b, c)), Some((ab, acod))) = (f.as_arrow(), rest.as_arrow()) {
        if let (Some((a, b2)), Some((a2, c2))) = (ab.as_arrow(), acod.as_arrow()) {
            if b2 == b && a2 == a && c2 == c {
                out.push(CombinatorSpec::b(a.clone(), b.clone(), c.clone()));
            }
        }
    }
    out.retain(|s| s.validate(&ctx.upsilon, &ctx.sig).is_ok());
    out
}

/// A random well-typed combinatory-logic term of the given type.
pub fn random_cl_term(
    rng: &mut impl Rng,
    ctx: &GenCtx,
    ty: &Type,
    size: usize,
) -> Option<ClTerm> {
    let mut leaves: Vec<ClTerm> = Vec::new();
    for v in &ctx.free_pool {
        if v.ty == *ty && ctx.upsilon.admits(&v.ty, v.index) {
            leaves.push(ClTerm::var(v.clone()));
        }
    }
    for name in ctx.sig.constants_of(ty) {
        leaves.push(ClTerm::constant(name, ty.clone()));
    }
    for spec in cl_specs_for(ty, ctx) {
        leaves.push(ClTerm::comb_unchecked(spec));
    }
    if ty.is_state() || size <= 1 {
        return leaves.choose(rng).cloned();
    }
    let choice = rng.gen_range(0..4u8);
    if choice == 0 && !leaves.is_empty() {
        return leaves.choose(rng).cloned();
    }
    let dom = ctx.type_menu.choose(rng)?.clone();
    let fun_ty = Type::arrow(dom.clone(), ty.clone()).ok()?;
    let fsize = rng.gen_range(1..size.max(2));
    let f = random_cl_term(rng, ctx, &fun_ty, fsize)?;
    let a = random_cl_term(rng, ctx, &dom, size.saturating_sub(1 + fsize).max(1))?;
    ClTerm::app(f, a).ok().or_else(|| leaves.choose(rng).cloned())
}

/// A random combinatory-logic term at some menu type.
pub fn random_cl_term_any(rng: &mut impl Rng, ctx: &GenCtx, max_size: usize) -> ClTerm {
    loop {
        let ty = ctx.type_menu.choose(rng).expect("non-empty menu").clone();
        let size = rng.gen_range(2..=max_size.max(3));
        if let Some(t) = random_cl_term(rng, ctx, &ty, size) {
            return t;
        }
    }
}

/// A random weak-reduction sequence of at most `max_steps` contractions.
pub fn random_weak_sequence(
    rng: &mut impl Rng,
    term: &ClTerm,
    max_steps: usize,
) -> Vec<ClTerm> {
    let mut out = vec![term.clone()];
    for _ in 0..max_steps {
        let current = out.last().expect("non-empty");
        let redexes = find_weak_redexes(current);
        let Some(r) = redexes.choose(rng) else { break };
        out.push(crate::cl::contract_weak(current, r).expect("enumerated redex applies"));
    }
    out
}

/// A random one-step parallel reduct: at each node, choose between leaving
/// it, reducing components, or (when it is a redex) contracting it with
/// recursively chosen component reducts.
pub fn random_parallel_reduct(rng: &mut impl Rng, term: &ClTerm) -> ClTerm {
    match term.kind() {
        ClKind::Var(_) | ClKind::Const(_) | ClKind::Comb(_) => term.clone(),
        ClKind::App(f, a) => {
            if let Some((rule, spec, comps)) = weak_candidate_is_redex(term) {
                if rng.gen_bool(0.5) {
                    let dev: Vec<ClTerm> =
                        comps.iter().map(|c| random_parallel_reduct(rng, c)).collect();
                    return match rule {
                        WeakRule::Kestral => dev[0].clone(),
                        WeakRule::Cardinal => {
                            ClTerm::apps(dev[0].clone(), &[dev[2].clone(), dev[1].clone()])
                                .expect("typing")
                        }
                        WeakRule::CardinalToDardinal => {
                            let ClKind::Const(c) = comps[1].kind() else { unreachable!() };
                            let d = CombinatorSpec::d(
                                spec.type_params[0].clone(),
                                spec.type_params[1].clone(),
                                spec.type_params[2].clone(),
                                c,
                            );
                            ClTerm::app(ClTerm::comb_unchecked(d), dev[0].clone()).expect("typing")
                        }
                        WeakRule::Dardinal => {
                            let c = spec.dardinal_const.as_deref().expect("spec");
                            let k = ClTerm::constant(c, spec.type_params[1].clone());
                            ClTerm::apps(dev[0].clone(), &[dev[1].clone(), k]).expect("typing")
                        }
                        WeakRule::Warbler => {
                            ClTerm::apps(dev[0].clone(), &[dev[1].clone(), dev[1].clone()])
                                .expect("typing")
                        }
                        WeakRule::Bluebird => {
                            let qr =
                                ClTerm::app(dev[1].clone(), dev[2].clone()).expect("typing");
                            ClTerm::app(dev[0].clone(), qr).expect("typing")
                        }
                    };
                }
            }
            ClTerm::app(random_parallel_reduct(rng, f), random_parallel_reduct(rng, a))
                .expect("typing")
        }
    }
}

/// A random beta (or beta-eta) reduction sequence in the modal calculus.
pub fn random_beta_sequence(
    rng: &mut impl Rng,
    term: &Term,
    upsilon: &Parameter,
    mode: ReductionMode,
    max_steps: usize,
) -> Vec<Term> {
    let mut out = vec![term.clone()];
    for _ in 0..max_steps {
        let current = out.last().expect("non-empty");
        let redexes = find_redexes(current, upsilon, mode);
        let Some(r) = redexes.choose(rng) else { break };
        out.push(contract(current, r).expect("enumerated redex applies"));
    }
    out
}

/// A random term together with one beta step out of it, if it has any.
pub fn random_beta_step(
    rng: &mut impl Rng,
    ctx: &GenCtx,
    max_size: usize,
) -> Option<(Term, Term, usize)> {
    let term = random_lterm_any(rng, ctx, max_size);
    let redexes = find_redexes(&term, &ctx.upsilon, ReductionMode::Beta);
    let r = redexes.choose(rng)?;
    let distance = r.distance().unwrap_or(0);
    let next = contract(&term, r).expect("enumerated redex applies");
    Some((term, next, distance))
}

/// Exhaustively enumerates closed terms of the given type with at most
/// `max_size` nodes, over the context's signature. Binders use index zero
/// at regular types and every budgeted index at state types.
pub fn enumerate_closed_lterms(ctx: &GenCtx, ty: &Type, max_size: usize) -> Vec<Term> {
    fn go(ctx: &GenCtx, ty: &Type, size: usize, env: &mut Vec<Var>, out: &mut Vec<Term>) {
        if size == 0 {
            return;
        }
        for v in env.iter() {
            if v.ty == *ty {
                let t = Term::var(v.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        for name in ctx.sig.constants_of(ty) {
            let t = Term::constant(name, ty.clone());
            if !out.contains(&t) {
                out.push(t);
            }
        }
        if size == 1 {
            return;
        }
        if let Some((dom, cod)) = ty.as_arrow() {
            let width = match ctx.upsilon.budget(dom) {
                Budget::Finite(n) => n.min(2),
                Budget::Omega => 1,
            };
            for i in 0..width {
                let v = Var::new(dom.clone(), i);
                env.push(v.clone());
                let mut bodies = Vec::new();
                go(ctx, cod, size - 1, env, &mut bodies);
                env.pop();
                for b in bodies {
                    let t = Term::lam(v.clone(), b).expect("regular codomain by type validity");
                    if !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
        for dom in &ctx.type_menu {
            let Ok(fun_ty) = Type::arrow(dom.clone(), ty.clone()) else { continue };
            for fsize in 1..size - 1 {
                let mut funs = Vec::new();
                go(ctx, &fun_ty, fsize, env, &mut funs);
                if funs.is_empty() {
                    continue;
                }
                let mut args = Vec::new();
                go(ctx, dom, size - 1 - fsize, env, &mut args);
                for f in &funs {
                    // Only exact-size function parts: smaller ones were
                    // already paired at smaller budgets.
                    if f.size() != fsize {
                        continue;
                    }
                    for a in &args {
                        let t = Term::app(f.clone(), a.clone()).expect("typing");
                        if t.size() <= size && !out.contains(&t) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(ctx, ty, max_size, &mut Vec::new(), &mut out);
    out.retain(|t| t.free_vars().is_empty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cl::weak_normalize;

    #[test]
    fn generated_lambda_terms_are_well_typed_and_budgeted() {
        let ctx = GenCtx::montagovian(Budget::Finite(2));
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let t = random_lterm_any(&mut rng, &ctx, 20);
            assert!(t.respects_budgets(&ctx.upsilon), "{t:?}");
            assert!(t.is_modal());
        }
    }

    #[test]
    fn generated_cl_terms_validate() {
        let ctx = GenCtx::montagovian(Budget::Finite(1));
        let mut rng = rng_from_seed(2);
        for _ in 0..200 {
            let t = random_cl_term_any(&mut rng, &ctx, 20);
            t.validate_under(&ctx.upsilon, &ctx.sig).unwrap();
        }
    }

    #[test]
    fn parallel_reducts_normalize_consistently() {
        let ctx = GenCtx::montagovian(Budget::Finite(2));
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let t = random_cl_term_any(&mut rng, &ctx, 15);
            let r = random_parallel_reduct(&mut rng, &t);
            assert_eq!(
                weak_normalize(&t, 2_000).unwrap(),
                weak_normalize(&r, 2_000).unwrap()
            );
        }
    }

    #[test]
    fn enumeration_is_closed_and_typed() {
        let ctx = GenCtx::montagovian(Budget::Finite(2));
        let st = Type::arrow(Type::state("S"), Type::entity("T")).unwrap();
        let terms = enumerate_closed_lterms(&ctx, &st, 6);
        assert!(terms.len() > 5);
        for t in &terms {
            assert_eq!(t.ty(), &st);
            assert!(t.free_vars().is_empty());
        }
    }
}
