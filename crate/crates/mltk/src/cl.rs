//! The intensional combinatory logic: terms over B, C, D, K, W with weak
//! reduction, Takahashi machinery, and bracket abstraction.
//!
//! Weak reduction contracts the usual redexes plus the Cardinal-to-Dardinal
//! rule `C P c -> D^c P`, which fires whenever Cardinal's second argument
//! is a constant of state type. Starling and Identity are derived, not
//! primitive.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::comb::{CombKind, CombinatorError, CombinatorSpec};
use crate::reduction::{PathStep, ReduceError};
use crate::term::Var;
use crate::types::{Parameter, Signature, Type, TypeError};

pub type Path = Vec<PathStep>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClKind {
    Var(Var),
    Const(Rc<str>),
    Comb(CombinatorSpec),
    App(ClTerm, ClTerm),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ClNode {
    pub kind: ClKind,
    pub ty: Type,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ClTerm(Rc<ClNode>);

impl ClTerm {
    pub fn var(v: Var) -> ClTerm {
        let ty = v.ty.clone();
        ClTerm(Rc::new(ClNode { kind: ClKind::Var(v), ty }))
    }

    pub fn constant(name: &str, ty: Type) -> ClTerm {
        ClTerm(Rc::new(ClNode { kind: ClKind::Const(Rc::from(name)), ty }))
    }

    /// A combinator constant, validated against the parameter and
    /// signature. Only B, C, D, K, W exist as primitives here.
    pub fn comb(
        spec: CombinatorSpec,
        upsilon: &Parameter,
        sig: &Signature,
    ) -> Result<ClTerm, CombinatorError> {
        if !spec.is_cl_primitive() {
            return Err(CombinatorError::SideConditionViolated {
                spec: spec.to_string(),
                clause: "S and I are derived in the combinatory logic".into(),
            });
        }
        spec.validate(upsilon, sig)?;
        Ok(ClTerm::comb_unchecked(spec))
    }

    pub(crate) fn comb_unchecked(spec: CombinatorSpec) -> ClTerm {
        let ty = spec.result_type();
        ClTerm(Rc::new(ClNode { kind: ClKind::Comb(spec), ty }))
    }

    pub fn app(fun: ClTerm, arg: ClTerm) -> Result<ClTerm, TypeError> {
        match fun.ty().as_arrow() {
            Some((dom, cod)) if *dom == *arg.ty() => {
                let ty = cod.clone();
                Ok(ClTerm(Rc::new(ClNode { kind: ClKind::App(fun, arg), ty })))
            }
            _ => Err(TypeError::IllTypedApplication {
                fun_ty: fun.ty().clone(),
                arg_ty: arg.ty().clone(),
            }),
        }
    }

    pub fn apps(fun: ClTerm, args: &[ClTerm]) -> Result<ClTerm, TypeError> {
        let mut t = fun;
        for a in args {
            t = ClTerm::app(t, a.clone())?;
        }
        Ok(t)
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn kind(&self) -> &ClKind {
        &self.0.kind
    }

    pub fn spine(&self) -> (ClTerm, Vec<ClTerm>) {
        let mut args = Vec::new();
        let mut head = self.clone();
        while let ClKind::App(f, a) = head.kind() {
            args.push(a.clone());
            head = f.clone();
        }
        args.reverse();
        (head, args)
    }

    pub fn size(&self) -> usize {
        match self.kind() {
            ClKind::App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }

    /// Variables appearing in the term, in first-occurrence order. There is
    /// no binding here, so appearance is the only notion.
    pub fn vars(&self) -> Vec<Var> {
        fn go(t: &ClTerm, out: &mut Vec<Var>) {
            match t.kind() {
                ClKind::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                ClKind::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self.kind() {
            ClKind::Var(u) => u == v,
            ClKind::App(f, a) => f.contains_var(v) || a.contains_var(v),
            _ => false,
        }
    }

    /// Checks the term lives in the combinatory logic at this parameter:
    /// every combinator instance satisfies its side conditions, every
    /// variable is within budget, every constant is declared.
    pub fn validate_under(&self, upsilon: &Parameter, sig: &Signature) -> Result<(), String> {
        match self.kind() {
            ClKind::Var(v) => {
                if upsilon.admits(&v.ty, v.index) {
                    Ok(())
                } else {
                    Err(format!("variable {v} exceeds its budget"))
                }
            }
            ClKind::Const(c) => match sig.lookup(c) {
                Some(t) if t == self.ty() => Ok(()),
                Some(_) => Err(format!("constant {c} used at the wrong type")),
                None => Err(format!("unknown constant {c}")),
            },
            ClKind::Comb(spec) => {
                if !spec.is_cl_primitive() {
                    return Err(format!("{spec} is not a combinatory-logic primitive"));
                }
                spec.validate(upsilon, sig).map_err(|e| e.to_string())
            }
            ClKind::App(f, a) => {
                f.validate_under(upsilon, sig)?;
                a.validate_under(upsilon, sig)
            }
        }
    }
}

impl fmt::Display for ClTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ClKind::Var(v) => write!(f, "v{}", v.index),
            ClKind::Const(c) => write!(f, "{c}"),
            ClKind::Comb(spec) => write!(f, "{spec}"),
            ClKind::App(fun, arg) => {
                write!(f, "{fun} ")?;
                if matches!(arg.kind(), ClKind::App(..)) {
                    write!(f, "({arg})")
                } else {
                    write!(f, "{arg}")
                }
            }
        }
    }
}

impl fmt::Debug for ClTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} : {}", self.ty())
    }
}

/// The rewrite rules of weak reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakRule {
    Kestral,
    Cardinal,
    CardinalToDardinal,
    Dardinal,
    Warbler,
    Bluebird,
}

/// A located weak redex with its decomposed components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakRedex {
    pub position: Path,
    pub rule: WeakRule,
    pub spec: CombinatorSpec,
    pub components: Vec<ClTerm>,
}

/// The candidate redex decomposition at one application node, if any. Each
/// node matches at most one rule: the head combinator and exact argument
/// count determine it.
fn weak_candidate_at(node: &ClTerm, position: &Path) -> Option<WeakRedex> {
    let ClKind::App(..) = node.kind() else { return None };
    let (head, args) = node.spine();
    let ClKind::Comb(spec) = head.kind() else { return None };
    let rule = match (spec.kind, args.len()) {
        (CombKind::K, 2) => WeakRule::Kestral,
        (CombKind::C, 3) => WeakRule::Cardinal,
        (CombKind::C, 2) => {
            // Cardinal-to-Dardinal: second argument a constant of state type.
            let ClKind::Const(_) = args[1].kind() else { return None };
            if !spec.type_params[1].is_state() {
                return None;
            }
            WeakRule::CardinalToDardinal
        }
        (CombKind::D, 2) => WeakRule::Dardinal,
        (CombKind::W, 2) => WeakRule::Warbler,
        (CombKind::B, 3) => WeakRule::Bluebird,
        _ => return None,
    };
    Some(WeakRedex { position: position.clone(), rule, spec: spec.clone(), components: args })
}

/// The decomposition of the term itself as a weak redex, if it is one.
pub fn weak_candidate_is_redex(
    term: &ClTerm,
) -> Option<(WeakRule, CombinatorSpec, Vec<ClTerm>)> {
    weak_candidate_at(term, &Vec::new()).map(|r| (r.rule, r.spec, r.components))
}

/// All weak redexes, outermost first, left to right.
pub fn find_weak_redexes(term: &ClTerm) -> Vec<WeakRedex> {
    fn go(t: &ClTerm, path: &mut Path, out: &mut Vec<WeakRedex>) {
        if let ClKind::App(f, a) = t.kind() {
            if let Some(r) = weak_candidate_at(t, path) {
                out.push(r);
            }
            path.push(PathStep::Fun);
            go(f, path, out);
            path.pop();
            path.push(PathStep::Arg);
            go(a, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(term, &mut Vec::new(), &mut out);
    out
}

fn cl_subterm_at<'a>(term: &'a ClTerm, path: &Path) -> Option<&'a ClTerm> {
    let mut t = term;
    for step in path {
        t = match (t.kind(), step) {
            (ClKind::App(f, _), PathStep::Fun) => f,
            (ClKind::App(_, a), PathStep::Arg) => a,
            _ => return None,
        };
    }
    Some(t)
}

fn cl_replace_at(term: &ClTerm, path: &[PathStep], replacement: ClTerm) -> Option<ClTerm> {
    match path.split_first() {
        None => Some(replacement),
        Some((step, rest)) => match (term.kind(), step) {
            (ClKind::App(f, a), PathStep::Fun) => {
                ClTerm::app(cl_replace_at(f, rest, replacement)?, a.clone()).ok()
            }
            (ClKind::App(f, a), PathStep::Arg) => {
                ClTerm::app(f.clone(), cl_replace_at(a, rest, replacement)?).ok()
            }
            _ => None,
        },
    }
}

/// The Dardinal spec induced by a Cardinal spec and a constant name.
fn dardinal_of_cardinal(spec: &CombinatorSpec, constant: &str) -> CombinatorSpec {
    CombinatorSpec::d(
        spec.type_params[0].clone(),
        spec.type_params[1].clone(),
        spec.type_params[2].clone(),
        constant,
    )
}

/// The contractum of a decomposed redex.
fn contractum(redex: &WeakRedex) -> ClTerm {
    let comps = &redex.components;
    match redex.rule {
        WeakRule::Kestral => comps[0].clone(),
        WeakRule::Cardinal => {
            ClTerm::apps(comps[0].clone(), &[comps[2].clone(), comps[1].clone()])
                .expect("redex typing")
        }
        WeakRule::CardinalToDardinal => {
            let ClKind::Const(c) = comps[1].kind() else { unreachable!() };
            let d = ClTerm::comb_unchecked(dardinal_of_cardinal(&redex.spec, c));
            ClTerm::app(d, comps[0].clone()).expect("redex typing")
        }
        WeakRule::Dardinal => {
            let c = redex.spec.dardinal_const.as_deref().expect("Dardinal has its constant");
            let k = ClTerm::constant(c, redex.spec.type_params[1].clone());
            ClTerm::apps(comps[0].clone(), &[comps[1].clone(), k]).expect("redex typing")
        }
        WeakRule::Warbler => {
            ClTerm::apps(comps[0].clone(), &[comps[1].clone(), comps[1].clone()])
                .expect("redex typing")
        }
        WeakRule::Bluebird => {
            let qr = ClTerm::app(comps[1].clone(), comps[2].clone()).expect("redex typing");
            ClTerm::app(comps[0].clone(), qr).expect("redex typing")
        }
    }
}

/// Contracts one redex produced by [`find_weak_redexes`] on this term.
pub fn contract_weak(term: &ClTerm, redex: &WeakRedex) -> Result<ClTerm, ReduceError> {
    let node = cl_subterm_at(term, &redex.position).ok_or(ReduceError::StaleRedex)?;
    let fresh = weak_candidate_at(node, &redex.position).ok_or(ReduceError::StaleRedex)?;
    if fresh != *redex {
        return Err(ReduceError::StaleRedex);
    }
    cl_replace_at(term, &redex.position, contractum(redex)).ok_or(ReduceError::StaleRedex)
}

/// Weak normal form by leftmost-outermost contraction. Church-Rosser makes
/// the result strategy-independent; termination is guarded by fuel rather
/// than assumed.
pub fn weak_normalize(term: &ClTerm, fuel: u64) -> Result<ClTerm, ReduceError> {
    let mut current = term.clone();
    let mut used = 0u64;
    loop {
        let redexes = find_weak_redexes(&current);
        let Some(first) = redexes.first() else {
            return Ok(current);
        };
        if used >= fuel {
            return Err(ReduceError::FuelExhausted(used));
        }
        used += 1;
        current = contract_weak(&current, first).expect("freshly enumerated redex applies");
    }
}

/// One-step weak reduction relation: all one-step reducts.
pub fn weak_reducts(term: &ClTerm) -> Vec<ClTerm> {
    find_weak_redexes(term)
        .iter()
        .map(|r| contract_weak(term, r).expect("enumerated redex applies"))
        .collect()
}

/// Decides parallel reduction by structural recursion, mirroring the
/// successor analyses: an application may step by congruence, or, when it
/// is a redex, to the corresponding contractum shape with components
/// reducing in parallel.
pub fn parallel_reduces(m: &ClTerm, n: &ClTerm) -> bool {
    if m.ty() != n.ty() {
        return false;
    }
    fn par(m: &ClTerm, n: &ClTerm) -> bool {
        match m.kind() {
            ClKind::Var(_) | ClKind::Const(_) | ClKind::Comb(_) => m == n,
            ClKind::App(f, a) => {
                if let ClKind::App(f2, a2) = n.kind() {
                    if par(f, f2) && par(a, a2) {
                        return true;
                    }
                }
                let Some(redex) = weak_candidate_at(m, &Vec::new()) else {
                    return false;
                };
                let comps = &redex.components;
                match redex.rule {
                    WeakRule::Kestral => par(&comps[0], n),
                    WeakRule::Cardinal => {
                        // N must be P' R' Q'.
                        let ClKind::App(pr, q1) = n.kind() else { return false };
                        let ClKind::App(p1, r1) = pr.kind() else { return false };
                        par(&comps[0], p1) && par(&comps[2], r1) && par(&comps[1], q1)
                    }
                    WeakRule::CardinalToDardinal => {
                        let ClKind::Const(c) = comps[1].kind() else { unreachable!() };
                        let ClKind::App(d, p1) = n.kind() else { return false };
                        let ClKind::Comb(dspec) = d.kind() else { return false };
                        *dspec == dardinal_of_cardinal(&redex.spec, c) && par(&comps[0], p1)
                    }
                    WeakRule::Dardinal => {
                        let c = redex.spec.dardinal_const.as_deref().expect("spec");
                        let ClKind::App(pr, c1) = n.kind() else { return false };
                        let ClKind::App(p1, r1) = pr.kind() else { return false };
                        matches!(c1.kind(), ClKind::Const(name) if &**name == c)
                            && par(&comps[0], p1)
                            && par(&comps[1], r1)
                    }
                    WeakRule::Warbler => {
                        // N must be P' Q' Q' with the same Q' twice.
                        let ClKind::App(pq, q2) = n.kind() else { return false };
                        let ClKind::App(p1, q1) = pq.kind() else { return false };
                        q1 == q2 && par(&comps[0], p1) && par(&comps[1], q1)
                    }
                    WeakRule::Bluebird => {
                        let ClKind::App(p1, qr) = n.kind() else { return false };
                        let ClKind::App(q1, r1) = qr.kind() else { return false };
                        par(&comps[0], p1) && par(&comps[1], q1) && par(&comps[2], r1)
                    }
                }
            }
        }
    }
    par(m, n)
}

/// The complete development: every present redex contracted at once,
/// outermost redexes superseding the ones inside their components.
pub fn complete_development(m: &ClTerm) -> ClTerm {
    if let Some(redex) = weak_candidate_at(m, &Vec::new()) {
        let comps = &redex.components;
        let dev: Vec<ClTerm> = comps.iter().map(complete_development).collect();
        return match redex.rule {
            WeakRule::Kestral => dev[0].clone(),
            WeakRule::Cardinal => {
                ClTerm::apps(dev[0].clone(), &[dev[2].clone(), dev[1].clone()]).expect("typing")
            }
            WeakRule::CardinalToDardinal => {
                let ClKind::Const(c) = comps[1].kind() else { unreachable!() };
                let d = ClTerm::comb_unchecked(dardinal_of_cardinal(&redex.spec, c));
                ClTerm::app(d, dev[0].clone()).expect("typing")
            }
            WeakRule::Dardinal => {
                let c = redex.spec.dardinal_const.as_deref().expect("spec");
                let k = ClTerm::constant(c, redex.spec.type_params[1].clone());
                ClTerm::apps(dev[0].clone(), &[dev[1].clone(), k]).expect("typing")
            }
            WeakRule::Warbler => {
                ClTerm::apps(dev[0].clone(), &[dev[1].clone(), dev[1].clone()]).expect("typing")
            }
            WeakRule::Bluebird => {
                let qr = ClTerm::app(dev[1].clone(), dev[2].clone()).expect("typing");
                ClTerm::app(dev[0].clone(), qr).expect("typing")
            }
        };
    }
    match m.kind() {
        ClKind::App(f, a) => {
            ClTerm::app(complete_development(f), complete_development(a)).expect("typing")
        }
        _ => m.clone(),
    }
}

/// Common reduct of two terms, found by normalizing both; present exactly
/// when the weak normal forms coincide.
pub fn join(m1: &ClTerm, m2: &ClTerm, fuel: u64) -> Result<Option<ClTerm>, ReduceError> {
    let n1 = weak_normalize(m1, fuel)?;
    let n2 = weak_normalize(m2, fuel)?;
    Ok(if n1 == n2 { Some(n1) } else { None })
}

/// Weak equality via Church-Rosser: normal forms must be syntactically
/// identical.
pub fn decide_weak_equal(m: &ClTerm, n: &ClTerm, fuel: u64) -> Result<bool, ReduceError> {
    if m.ty() != n.ty() {
        return Ok(false);
    }
    Ok(join(m, n, fuel)?.is_some())
}

/// Simultaneous substitution of terms for pairwise distinct variables.
pub fn cl_substitute(term: &ClTerm, bindings: &BTreeMap<Var, ClTerm>) -> ClTerm {
    for (v, t) in bindings {
        assert_eq!(&v.ty, t.ty(), "substitution must preserve types");
    }
    fn go(t: &ClTerm, bindings: &BTreeMap<Var, ClTerm>) -> ClTerm {
        match t.kind() {
            ClKind::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            ClKind::Const(_) | ClKind::Comb(_) => t.clone(),
            ClKind::App(f, a) => {
                ClTerm::app(go(f, bindings), go(a, bindings)).expect("typing preserved")
            }
        }
    }
    go(term, bindings)
}

/// Substitution of a single variable.
pub fn cl_substitute1(term: &ClTerm, v: &Var, n: &ClTerm) -> ClTerm {
    let mut map = BTreeMap::new();
    map.insert(v.clone(), n.clone());
    cl_substitute(term, &map)
}

/// Applies a type-preserving permutation of variables; identity on
/// constants and combinator instances.
pub fn cl_apply_permutation(term: &ClTerm, perm: &crate::term::VarPermutation) -> ClTerm {
    match term.kind() {
        ClKind::Var(v) => ClTerm::var(perm.apply(v)),
        ClKind::Const(_) | ClKind::Comb(_) => term.clone(),
        ClKind::App(f, a) => {
            ClTerm::app(cl_apply_permutation(f, perm), cl_apply_permutation(a, perm))
                .expect("typing preserved")
        }
    }
}

/// The derived Starling `B (B (B W) C) (B B)` at the instance types of the
/// recovery proposition; behaves as `S P Q R ->> P R (Q R)`.
pub fn derive_cl_starling(
    a: &Type,
    b: &Type,
    c: &Type,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ClTerm, CombinatorError> {
    // Only A and B need to be regular; C may be a state atom.
    let probe = CombinatorSpec::s(a.clone(), b.clone(), c.clone());
    if a.is_state() || b.is_state() {
        return Err(CombinatorError::SideConditionViolated {
            spec: probe.to_string(),
            clause: "S requires A and B regular".into(),
        });
    }
    let specs = starling_component_specs(a, b, c);
    let [b1, b2, b3, w4, c5, b6, b7] = specs;
    let mk = |s: CombinatorSpec| ClTerm::comb(s, upsilon, sig);
    let inner = ClTerm::app(
        ClTerm::app(mk(b2)?, ClTerm::app(mk(b3)?, mk(w4)?).expect("table typing"))
            .expect("table typing"),
        mk(c5)?,
    )
    .expect("table typing");
    let right = ClTerm::app(mk(b6)?, mk(b7)?).expect("table typing");
    Ok(ClTerm::app(ClTerm::app(mk(b1)?, inner).expect("table typing"), right)
        .expect("table typing"))
}

/// The seven component instances of the Starling recovery, in order:
/// B1, B2, B3, W4, C5, B6, B7.
pub fn starling_component_specs(a: &Type, b: &Type, c: &Type) -> [CombinatorSpec; 7] {
    let ar = |d: &Type, co: &Type| {
        Type::arrow(d.clone(), co.clone()).expect("regular codomain by side conditions")
    };
    let ca = ar(c, a); // C->A
    let cb = ar(c, b); // C->B
    let ccb = ar(c, &cb); // C->C->B
    let ca_cb = ar(&ca, &cb); // (C->A)->C->B
    let cab = ar(c, &ar(a, b)); // C->A->B
    let c_ca_cb = ar(c, &ca_cb); // C->(C->A)->C->B
    let ca_ccb = ar(&ca, &ccb); // (C->A)->C->C->B
    [
        CombinatorSpec::b(cab.clone(), c_ca_cb.clone(), ca_cb.clone()),
        CombinatorSpec::b(c_ca_cb, ca_ccb, ca_cb.clone()),
        CombinatorSpec::b(ca.clone(), ccb, cb.clone()),
        CombinatorSpec::w(c.clone(), b.clone()),
        CombinatorSpec::c(c.clone(), ca, cb),
        CombinatorSpec::b(c.clone(), ar(a, b), ca_cb),
        CombinatorSpec::b(c.clone(), a.clone(), b.clone()),
    ]
}

/// The derived Identity `S K K`; behaves as `I P ->> P`.
pub fn derive_cl_identity(
    b: &Type,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ClTerm, CombinatorError> {
    if b.is_state() {
        return Err(CombinatorError::SideConditionViolated {
            spec: CombinatorSpec::i(b.clone()).to_string(),
            clause: "I requires A regular".into(),
        });
    }
    let bb = Type::arrow(b.clone(), b.clone()).expect("regular");
    let s = derive_cl_starling(&bb, b, b, upsilon, sig)?;
    let k1 = ClTerm::comb(CombinatorSpec::k(b.clone(), bb), upsilon, sig)?;
    let k2 = ClTerm::comb(CombinatorSpec::k(b.clone(), b.clone()), upsilon, sig)?;
    Ok(ClTerm::apps(s, &[k1, k2]).expect("recovery typing"))
}

/// Bracket abstraction `[v:A]M`, simulating lambda abstraction: K for
/// non-occurrence, derived I for the variable itself, S for a regular
/// argument type, and W / C / Dardinal for the three state-argument cases.
pub fn cl_bracket(
    v: &Var,
    m: &ClTerm,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ClTerm, CombinatorError> {
    if m.ty().is_state() {
        return Err(CombinatorError::SideConditionViolated {
            spec: format!("[{v}]{m}"),
            clause: "bracket abstraction requires a regular body type".into(),
        });
    }
    if !m.contains_var(v) {
        let k = ClTerm::comb(
            CombinatorSpec::k(m.ty().clone(), v.ty.clone()),
            upsilon,
            sig,
        )?;
        return Ok(ClTerm::app(k, m.clone()).expect("K typing"));
    }
    if let ClKind::Var(u) = m.kind() {
        debug_assert_eq!(u, v);
        return derive_cl_identity(&v.ty, upsilon, sig);
    }
    let ClKind::App(m0, m1) = m.kind() else {
        unreachable!("an occurrence of {v} forces an application here");
    };
    let arg_ty = m1.ty().clone();
    let body_ty = m.ty().clone();
    if arg_ty.is_state() {
        // State-typed arguments are variables or constants.
        match m1.kind() {
            ClKind::Var(u) if u == v => {
                let w = ClTerm::comb(
                    CombinatorSpec::w(v.ty.clone(), body_ty),
                    upsilon,
                    sig,
                )?;
                Ok(ClTerm::app(w, cl_bracket(v, m0, upsilon, sig)?).expect("W typing"))
            }
            ClKind::Var(_) => {
                let c = ClTerm::comb(
                    CombinatorSpec::c(v.ty.clone(), arg_ty, body_ty),
                    upsilon,
                    sig,
                )?;
                Ok(ClTerm::apps(c, &[cl_bracket(v, m0, upsilon, sig)?, m1.clone()])
                    .expect("C typing"))
            }
            ClKind::Const(name) => {
                let d = ClTerm::comb(
                    CombinatorSpec::d(v.ty.clone(), arg_ty, body_ty, name),
                    upsilon,
                    sig,
                )?;
                Ok(ClTerm::app(d, cl_bracket(v, m0, upsilon, sig)?).expect("D typing"))
            }
            _ => unreachable!("state-typed subterms are variables or constants"),
        }
    } else {
        let s = derive_cl_starling(&arg_ty, &body_ty, &v.ty, upsilon, sig)?;
        Ok(ClTerm::apps(
            s,
            &[cl_bracket(v, m0, upsilon, sig)?, cl_bracket(v, m1, upsilon, sig)?],
        )
        .expect("S typing"))
    }
}

/// Iterated bracket abstraction `[x1]..[xn]M`.
pub fn cl_bracket_many(
    vars: &[Var],
    m: &ClTerm,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ClTerm, CombinatorError> {
    let mut t = m.clone();
    for v in vars.iter().rev() {
        t = cl_bracket(v, &t, upsilon, sig)?;
    }
    Ok(t)
}
