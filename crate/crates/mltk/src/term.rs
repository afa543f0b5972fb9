//! Lambda terms of the modal calculus, Church-typed.
//!
//! Every node caches its type. The smart constructors enforce the formation
//! rules, so a well-typed [`Term`] stays well-typed: applications match
//! domains, abstraction bodies are regular, and (in the modal fragment) the
//! only subterms of state type are variables and constants.
//!
//! Substitution never renames on its own. Renaming is an explicit,
//! permutation-based operation, because a finite variable budget can make
//! the usual "pick a fresh name" move illegal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::types::{Parameter, Signature, Type, TypeError};

/// A variable is a type together with an index below the type's budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub ty: Type,
    pub index: u32,
}

impl Var {
    pub fn new(ty: Type, index: u32) -> Var {
        Var { ty, index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}:{}", self.index, self.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    Var(Var),
    Const(Rc<str>),
    App(Term, Term),
    Lam(Var, Term),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct TermNode {
    pub kind: TermKind,
    pub ty: Type,
}

/// A typed term; cheap to clone, compared structurally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term(Rc<TermNode>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("substituting {replacement} for {var} would capture a free variable")]
pub struct CaptureError {
    pub var: Var,
    pub replacement: String,
}

impl Term {
    pub fn var(v: Var) -> Term {
        let ty = v.ty.clone();
        Term(Rc::new(TermNode { kind: TermKind::Var(v), ty }))
    }

    pub fn constant(name: &str, ty: Type) -> Term {
        Term(Rc::new(TermNode { kind: TermKind::Const(Rc::from(name)), ty }))
    }

    pub fn app(fun: Term, arg: Term) -> Result<Term, TypeError> {
        match fun.ty().as_arrow() {
            Some((dom, cod)) if *dom == *arg.ty() => {
                let ty = cod.clone();
                Ok(Term(Rc::new(TermNode { kind: TermKind::App(fun, arg), ty })))
            }
            _ => Err(TypeError::IllTypedApplication {
                fun_ty: fun.ty().clone(),
                arg_ty: arg.ty().clone(),
            }),
        }
    }

    /// Iterated application.
    pub fn apps(fun: Term, args: &[Term]) -> Result<Term, TypeError> {
        let mut t = fun;
        for a in args {
            t = Term::app(t, a.clone())?;
        }
        Ok(t)
    }

    /// Modal abstraction: the body must have regular type.
    pub fn lam(binder: Var, body: Term) -> Result<Term, TypeError> {
        if body.ty().is_state() {
            return Err(TypeError::StateBodyAbstraction(body.ty().clone()));
        }
        let ty = Type::arrow(binder.ty.clone(), body.ty().clone())?;
        Ok(Term(Rc::new(TermNode { kind: TermKind::Lam(binder, body), ty })))
    }

    /// Abstraction in the full calculus: no restriction on the body.
    pub fn lam_full(binder: Var, body: Term) -> Term {
        let ty = Type::arrow_full(binder.ty.clone(), body.ty().clone());
        Term(Rc::new(TermNode { kind: TermKind::Lam(binder, body), ty }))
    }

    pub fn lams(binders: &[Var], body: Term) -> Result<Term, TypeError> {
        let mut t = body;
        for b in binders.iter().rev() {
            t = Term::lam(b.clone(), t)?;
        }
        Ok(t)
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Splits an application spine: `f a b c` gives `(f, [a, b, c])`.
    pub fn spine(&self) -> (Term, Vec<Term>) {
        let mut args = Vec::new();
        let mut head = self.clone();
        while let TermKind::App(f, a) = head.kind() {
            args.push(a.clone());
            head = f.clone();
        }
        args.reverse();
        (head, args)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::Var(_) | TermKind::Const(_) => 1,
            TermKind::App(f, a) => 1 + f.size() + a.size(),
            TermKind::Lam(_, b) => 1 + b.size(),
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Var> {
        fn go(t: &Term, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
            match t.kind() {
                TermKind::Var(v) => {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                TermKind::Const(_) => {}
                TermKind::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                TermKind::Lam(v, b) => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_free(&self, v: &Var) -> bool {
        self.free_vars().contains(v)
    }

    /// Every variable occurring anywhere, bound or free, binders included.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        fn go(t: &Term, out: &mut BTreeSet<Var>) {
            match t.kind() {
                TermKind::Var(v) => {
                    out.insert(v.clone());
                }
                TermKind::Const(_) => {}
                TermKind::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                TermKind::Lam(v, b) => {
                    out.insert(v.clone());
                    go(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Constant names occurring in the term, sorted.
    pub fn constants(&self) -> BTreeSet<String> {
        fn go(t: &Term, out: &mut BTreeSet<String>) {
            match t.kind() {
                TermKind::Const(c) => {
                    out.insert(c.to_string());
                }
                TermKind::Var(_) => {}
                TermKind::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                TermKind::Lam(_, b) => go(b, out),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// True when the term lies in the modal fragment: all types modal and
    /// all abstraction bodies regular.
    pub fn is_modal(&self) -> bool {
        if !self.ty().is_modal() {
            return false;
        }
        match self.kind() {
            TermKind::Var(v) => v.ty.is_modal(),
            TermKind::Const(_) => true,
            TermKind::App(f, a) => f.is_modal() && a.is_modal(),
            TermKind::Lam(v, b) => v.ty.is_modal() && b.ty().is_regular() && b.is_modal(),
        }
    }

    /// Checks variable indices against the parameter, binders included.
    pub fn respects_budgets(&self, upsilon: &Parameter) -> bool {
        self.all_vars().iter().all(|v| upsilon.admits(&v.ty, v.index))
    }

    /// All types of all subterms, binder types included.
    pub fn subterm_types(&self) -> BTreeSet<Type> {
        fn go(t: &Term, out: &mut BTreeSet<Type>) {
            out.insert(t.ty().clone());
            match t.kind() {
                TermKind::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                TermKind::Lam(v, b) => {
                    out.insert(v.ty.clone());
                    go(b, out);
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
}

/// `N` is free for `v` in `L`: no free occurrence of `v` in `L` lies in the
/// scope of a binder of a variable free in `N`.
pub fn is_free_for(replacement: &Term, v: &Var, target: &Term) -> bool {
    let fv_n: BTreeSet<Var> = replacement.free_vars().into_iter().collect();
    fn go(t: &Term, v: &Var, fv_n: &BTreeSet<Var>, bad_binders: u32) -> bool {
        match t.kind() {
            TermKind::Var(u) => u != v || bad_binders == 0,
            TermKind::Const(_) => true,
            TermKind::App(f, a) => go(f, v, fv_n, bad_binders) && go(a, v, fv_n, bad_binders),
            TermKind::Lam(u, b) => {
                if u == v {
                    true // v is shadowed below
                } else {
                    let bad = bad_binders + u32::from(fv_n.contains(u));
                    go(b, v, fv_n, bad)
                }
            }
        }
    }
    go(target, v, &fv_n, 0)
}

/// Capture-checked substitution of every free occurrence of `v` by `n`.
/// Fails rather than renaming: a finite budget can forbid renaming, so
/// callers rename explicitly when they may.
pub fn substitute(target: &Term, v: &Var, n: &Term) -> Result<Term, CaptureError> {
    assert_eq!(&v.ty, n.ty(), "substitution must preserve types");
    if !is_free_for(n, v, target) {
        return Err(CaptureError { var: v.clone(), replacement: n.to_string() });
    }
    Ok(substitute_unchecked(target, v, n))
}

pub(crate) fn substitute_unchecked(target: &Term, v: &Var, n: &Term) -> Term {
    match target.kind() {
        TermKind::Var(u) => {
            if u == v {
                n.clone()
            } else {
                target.clone()
            }
        }
        TermKind::Const(_) => target.clone(),
        TermKind::App(f, a) => {
            let f2 = substitute_unchecked(f, v, n);
            let a2 = substitute_unchecked(a, v, n);
            Term::app(f2, a2).expect("substitution preserves typing")
        }
        TermKind::Lam(u, b) => {
            if u == v {
                target.clone()
            } else {
                let b2 = substitute_unchecked(b, v, n);
                Term(Rc::new(TermNode {
                    kind: TermKind::Lam(u.clone(), b2),
                    ty: target.ty().clone(),
                }))
            }
        }
    }
}

/// A type-preserving permutation of variables with finite support.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarPermutation {
    map: BTreeMap<Var, Var>,
}

impl VarPermutation {
    pub fn identity() -> VarPermutation {
        VarPermutation::default()
    }

    /// Builds a permutation from (from, to) pairs. The pairs must be
    /// type-preserving and form a bijection of their support set.
    pub fn from_pairs(pairs: &[(Var, Var)]) -> Option<VarPermutation> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if a.ty != b.ty {
                return None;
            }
            if map.insert(a.clone(), b.clone()).is_some() {
                return None;
            }
        }
        let support: BTreeSet<&Var> = map.keys().collect();
        let image: BTreeSet<&Var> = map.values().collect();
        if support != image {
            return None;
        }
        Some(VarPermutation { map })
    }

    pub fn swap(a: Var, b: Var) -> VarPermutation {
        assert_eq!(a.ty, b.ty);
        if a == b {
            return VarPermutation::identity();
        }
        VarPermutation::from_pairs(&[(a.clone(), b.clone()), (b, a)]).unwrap()
    }

    pub fn apply(&self, v: &Var) -> Var {
        self.map.get(v).cloned().unwrap_or_else(|| v.clone())
    }

    /// `self` after `other`: `(compose)(v) = self(other(v))`.
    pub fn compose(&self, other: &VarPermutation) -> VarPermutation {
        let mut support: BTreeSet<Var> = self.map.keys().cloned().collect();
        support.extend(other.map.keys().cloned());
        let map = support
            .into_iter()
            .filter_map(|v| {
                let w = self.apply(&other.apply(&v));
                if w == v {
                    None
                } else {
                    Some((v, w))
                }
            })
            .collect();
        VarPermutation { map }
    }

    pub fn is_identity_on(&self, vars: &[Var]) -> bool {
        vars.iter().all(|v| self.apply(v) == *v)
    }
}

/// Applies a permutation to a term: identity on constants, homomorphic on
/// applications, renames binders and variable occurrences alike.
pub fn apply_permutation(term: &Term, perm: &VarPermutation) -> Term {
    match term.kind() {
        TermKind::Var(v) => Term::var(perm.apply(v)),
        TermKind::Const(_) => term.clone(),
        TermKind::App(f, a) => {
            Term::app(apply_permutation(f, perm), apply_permutation(a, perm))
                .expect("permutations preserve typing")
        }
        TermKind::Lam(v, b) => {
            let body = apply_permutation(b, perm);
            Term(Rc::new(TermNode {
                kind: TermKind::Lam(perm.apply(v), body),
                ty: term.ty().clone(),
            }))
        }
    }
}

/// Alpha equivalence: is there a type-preserving permutation of variables,
/// identity on the free variables of `m`, carrying `m` syntactically to
/// `n`?
///
/// A permutation that works is fully determined on the variables of `m` by
/// walking both terms in step, so no search is needed: collect the forced
/// assignments and check they form a partial injection fixing `m`'s free
/// variables. Such a partial injection always extends to a permutation of
/// the budgeted variable space, finite budgets included.
pub fn alpha_equal(m: &Term, n: &Term) -> bool {
    fn collect(m: &Term, n: &Term, map: &mut BTreeMap<Var, Var>) -> bool {
        match (m.kind(), n.kind()) {
            (TermKind::Var(v), TermKind::Var(u)) => {
                if v.ty != u.ty {
                    return false;
                }
                match map.get(v) {
                    Some(w) => w == u,
                    None => {
                        map.insert(v.clone(), u.clone());
                        true
                    }
                }
            }
            (TermKind::Const(c), TermKind::Const(d)) => c == d && m.ty() == n.ty(),
            (TermKind::App(f1, a1), TermKind::App(f2, a2)) => {
                collect(f1, f2, map) && collect(a1, a2, map)
            }
            (TermKind::Lam(v, b1), TermKind::Lam(u, b2)) => {
                if v.ty != u.ty {
                    return false;
                }
                match map.get(v) {
                    Some(w) => w == u && collect(b1, b2, map),
                    None => {
                        map.insert(v.clone(), u.clone());
                        collect(b1, b2, map)
                    }
                }
            }
            _ => false,
        }
    }
    if m.ty() != n.ty() {
        return false;
    }
    let mut map = BTreeMap::new();
    if !collect(m, n, &mut map) {
        return false;
    }
    // Injectivity of the forced assignment.
    let image: BTreeSet<&Var> = map.values().collect();
    if image.len() != map.len() {
        return false;
    }
    // Identity on the free variables of m.
    m.free_vars().iter().all(|v| map.get(v) == Some(v))
}

/// Canonical representative of a term's class under ordinary (textbook)
/// alpha equivalence: binders are renamed, in pre-order, to indices above
/// every free index of their type. Used where the full calculus is the
/// ambient system and renaming is unrestricted.
pub fn canonicalize(term: &Term) -> Term {
    let mut next: HashMap<Type, u32> = HashMap::new();
    for v in term.free_vars() {
        let e = next.entry(v.ty.clone()).or_insert(0);
        *e = (*e).max(v.index + 1);
    }
    fn go(t: &Term, env: &BTreeMap<Var, Var>, next: &mut HashMap<Type, u32>) -> Term {
        match t.kind() {
            TermKind::Var(v) => Term::var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
            TermKind::Const(_) => t.clone(),
            TermKind::App(f, a) => {
                Term::app(go(f, env, next), go(a, env, next)).expect("renaming preserves typing")
            }
            TermKind::Lam(v, b) => {
                let idx = next.entry(v.ty.clone()).or_insert(0);
                let fresh = Var::new(v.ty.clone(), *idx);
                *idx += 1;
                let mut env2 = env.clone();
                env2.insert(v.clone(), fresh.clone());
                let body = go(b, &env2, next);
                Term(Rc::new(TermNode {
                    kind: TermKind::Lam(fresh, body),
                    ty: t.ty().clone(),
                }))
            }
        }
    }
    go(term, &BTreeMap::new(), &mut next)
}

/// A variable of the given type with index strictly above every index that
/// type takes in `avoid`.
pub fn fresh_var(ty: &Type, avoid: &BTreeSet<Var>) -> Var {
    let max = avoid
        .iter()
        .filter(|v| v.ty == *ty)
        .map(|v| v.index + 1)
        .max()
        .unwrap_or(0);
    Var::new(ty.clone(), max)
}

/// Elaborated Church typing of a raw tree: see [`crate::syntax`]. This
/// checks budgets against the parameter and constant names against the
/// signature; the smart constructors handle the rest.
pub fn check_var(v: &Var, upsilon: &Parameter) -> Result<(), TypeError> {
    if upsilon.admits(&v.ty, v.index) {
        Ok(())
    } else {
        Err(TypeError::VariableBudgetExceeded {
            ty: v.ty.clone(),
            index: v.index,
            budget: upsilon.budget(&v.ty),
        })
    }
}

/// Looks a constant up in the signature.
pub fn check_const(name: &str, sig: &Signature) -> Result<Type, TypeError> {
    sig.lookup(name)
        .cloned()
        .ok_or_else(|| TypeError::UnknownConstant(name.to_string()))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(t: &Term) -> bool {
            matches!(t.kind(), TermKind::Var(_) | TermKind::Const(_))
        }
        fn go(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.kind() {
                TermKind::Var(v) => write!(f, "v{}", v.index),
                TermKind::Const(c) => write!(f, "{c}"),
                TermKind::Lam(v, b) => {
                    write!(f, "\\v{}:{}. ", v.index, v.ty)?;
                    go(b, f)
                }
                TermKind::App(fun, arg) => {
                    if matches!(fun.kind(), TermKind::Lam(..)) {
                        write!(f, "(")?;
                        go(fun, f)?;
                        write!(f, ")")?;
                    } else {
                        go(fun, f)?;
                    }
                    write!(f, " ")?;
                    if atom(arg) {
                        go(arg, f)
                    } else {
                        write!(f, "(")?;
                        go(arg, f)?;
                        write!(f, ")")
                    }
                }
            }
        }
        go(self, f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} : {}", self.ty())
    }
}
