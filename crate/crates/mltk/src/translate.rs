//! The two translations between the modal lambda calculus and the
//! combinatory logic, with the equality correspondences they carry.

use crate::cl::{cl_bracket, decide_weak_equal, ClTerm};
use crate::comb::CombinatorError;
use crate::combinator::render_cl_as_lambda;
use crate::reduction::{decide_beta_eta_equal, ReduceError};
use crate::term::{Term, TermKind};
use crate::types::{Parameter, Signature};

/// Translation into combinatory logic: homomorphic on variables, constants,
/// and applications; abstraction becomes bracket abstraction. Alpha
/// equivalent inputs produce syntactically identical outputs.
pub fn to_cl(term: &Term, upsilon: &Parameter, sig: &Signature) -> Result<ClTerm, CombinatorError> {
    match term.kind() {
        TermKind::Var(v) => Ok(ClTerm::var(v.clone())),
        TermKind::Const(c) => Ok(ClTerm::constant(c, term.ty().clone())),
        TermKind::App(f, a) => {
            let f2 = to_cl(f, upsilon, sig)?;
            let a2 = to_cl(a, upsilon, sig)?;
            Ok(ClTerm::app(f2, a2).expect("translation preserves typing"))
        }
        TermKind::Lam(v, body) => {
            let body2 = to_cl(body, upsilon, sig)?;
            cl_bracket(v, &body2, upsilon, sig)
        }
    }
}

/// Translation back into the lambda calculus: combinator instances map to
/// their canonical lambda terms.
pub fn to_lambda(
    term: &ClTerm,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<Term, CombinatorError> {
    render_cl_as_lambda(term, upsilon, sig, false)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error(transparent)]
    Combinator(#[from] CombinatorError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

/// `(M^cl)^lambda` is beta-eta equal to `M`; always true, exercised as a
/// check.
pub fn roundtrip_check(
    term: &Term,
    upsilon: &Parameter,
    sig: &Signature,
    fuel: u64,
) -> Result<bool, TranslateError> {
    let there = to_cl(term, upsilon, sig)?;
    let back = to_lambda(&there, upsilon, sig)?;
    Ok(decide_beta_eta_equal(&back, term, fuel)?)
}

/// A single beta step translates to a weak equality: `M -> N` implies
/// `M^cl =w N^cl`.
pub fn check_beta_to_weak(
    m: &Term,
    n: &Term,
    upsilon: &Parameter,
    sig: &Signature,
    fuel: u64,
) -> Result<bool, TranslateError> {
    let mc = to_cl(m, upsilon, sig)?;
    let nc = to_cl(n, upsilon, sig)?;
    Ok(decide_weak_equal(&mc, &nc, fuel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cl::{derive_cl_identity, weak_normalize};
    use crate::comb::CombinatorSpec;
    use crate::combinator::mk_lambda_combinator;
    use crate::reduction::{
        contract, find_redexes, normalize_full_lambda, ReductionMode, DEFAULT_FUEL,
    };
    use crate::term::{alpha_equal, Var};
    use crate::types::{Budget, Type};

    fn s() -> Type {
        Type::state("S")
    }
    fn e() -> Type {
        Type::entity("E")
    }
    fn t() -> Type {
        Type::entity("T")
    }
    fn u2() -> Parameter {
        Parameter::omega().with("S", Budget::Finite(2))
    }
    fn sig() -> Signature {
        Signature::new().with("c", s())
    }

    #[test]
    fn identity_translates_to_derived_identity() {
        let v = Var::new(e(), 0);
        let idt = Term::lam(v.clone(), Term::var(v)).unwrap();
        let cl = to_cl(&idt, &u2(), &sig()).unwrap();
        assert_eq!(cl, derive_cl_identity(&e(), &u2(), &sig()).unwrap());
    }

    #[test]
    fn warbler_subcase_and_alpha_invariance() {
        // (\v:S. u v)^cl = W (K u).
        let vs = Var::new(s(), 0);
        let u = Var::new(Type::arrow(s(), t()).unwrap(), 0);
        let m = Term::lam(
            vs.clone(),
            Term::app(Term::var(u.clone()), Term::var(vs)).unwrap(),
        )
        .unwrap();
        let cl = to_cl(&m, &u2(), &sig()).unwrap();
        let k = ClTerm::comb(
            CombinatorSpec::k(Type::arrow(s(), t()).unwrap(), s()),
            &u2(),
            &sig(),
        )
        .unwrap();
        let w = ClTerm::comb(CombinatorSpec::w(s(), t()), &u2(), &sig()).unwrap();
        let expected = ClTerm::app(w, ClTerm::app(k, ClTerm::var(u)).unwrap()).unwrap();
        assert_eq!(cl, expected);

        // Alpha-equivalent binders give identical translations.
        let v1 = Var::new(s(), 1);
        let uvar = Var::new(Type::arrow(s(), t()).unwrap(), 0);
        let m2 = Term::lam(
            v1.clone(),
            Term::app(Term::var(uvar), Term::var(v1)).unwrap(),
        )
        .unwrap();
        assert_eq!(to_cl(&m2, &u2(), &sig()).unwrap(), cl);

        // And for regular binders: \v0:E.v1 vs \v2:E.v1.
        let free = Var::new(e(), 1);
        let a = Term::lam(Var::new(e(), 0), Term::var(free.clone())).unwrap();
        let b = Term::lam(Var::new(e(), 2), Term::var(free)).unwrap();
        assert_eq!(to_cl(&a, &u2(), &sig()).unwrap(), to_cl(&b, &u2(), &sig()).unwrap());
    }

    #[test]
    fn to_lambda_on_combinators_and_variables() {
        // K[E,S] maps to the canonical Kestral term.
        let k = ClTerm::comb(CombinatorSpec::k(e(), s()), &u2(), &sig()).unwrap();
        let km = to_lambda(&k, &u2(), &sig()).unwrap();
        assert_eq!(
            km,
            mk_lambda_combinator(&CombinatorSpec::k(e(), s()), &u2(), &sig()).unwrap()
        );
        // (K x y)^lambda beta-reduces to x.
        let x = ClTerm::var(Var::new(e(), 3));
        let y = ClTerm::var(Var::new(s(), 0));
        let kxy = ClTerm::apps(k, &[x, y]).unwrap();
        let back = to_lambda(&kxy, &u2(), &sig()).unwrap();
        let nf = normalize_full_lambda(&back, DEFAULT_FUEL).unwrap();
        assert_eq!(nf, Term::var(Var::new(e(), 3)));
        // Variables map to themselves.
        let v = Var::new(e(), 0);
        assert_eq!(to_lambda(&ClTerm::var(v.clone()), &u2(), &sig()).unwrap(), Term::var(v));
    }

    #[test]
    fn free_variable_correspondence() {
        let vs = Var::new(s(), 0);
        let u = Var::new(Type::arrows(&[s(), e()], t()).unwrap(), 0);
        let w = Var::new(e(), 4);
        let m = Term::lam(
            vs.clone(),
            Term::apps(Term::var(u.clone()), &[Term::var(vs), Term::var(w.clone())]).unwrap(),
        )
        .unwrap();
        let cl = to_cl(&m, &u2(), &sig()).unwrap();
        let fv: Vec<Var> = m.free_vars();
        let appearing = cl.vars();
        assert_eq!(
            fv.iter().collect::<std::collections::BTreeSet<_>>(),
            appearing.iter().collect::<std::collections::BTreeSet<_>>()
        );
        // And back: appearing variables of a CL term are free in its
        // lambda translate.
        let back = to_lambda(&cl, &u2(), &sig()).unwrap();
        assert_eq!(
            back.free_vars().iter().collect::<std::collections::BTreeSet<_>>(),
            appearing.iter().collect::<std::collections::BTreeSet<_>>()
        );
    }

    #[test]
    fn permutation_commutes_with_translation() {
        let upsilon = u2();
        let v0 = Var::new(s(), 0);
        let v1 = Var::new(s(), 1);
        let u = Var::new(Type::arrows(&[s(), s()], t()).unwrap(), 0);
        let m = Term::lam(
            v0.clone(),
            Term::apps(Term::var(u), &[Term::var(v0.clone()), Term::var(v1.clone())]).unwrap(),
        )
        .unwrap();
        let pi = crate::term::VarPermutation::swap(v0, v1);
        let lhs = to_cl(&crate::term::apply_permutation(&m, &pi), &upsilon, &sig()).unwrap();
        let rhs = crate::cl::cl_apply_permutation(&to_cl(&m, &upsilon, &sig()).unwrap(), &pi);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn roundtrip_examples() {
        let upsilon = u2();
        let v = Var::new(e(), 0);
        let idt = Term::lam(v.clone(), Term::var(v)).unwrap();
        assert!(roundtrip_check(&idt, &upsilon, &sig(), DEFAULT_FUEL).unwrap());

        // The de re reading roundtrips.
        let sig = Signature::new()
            .with(
                "b",
                Type::arrow(s(), Type::arrow(Type::arrow(s(), t()).unwrap(), t()).unwrap())
                    .unwrap(),
            )
            .with("ch", Type::arrows(&[s(), e()], t()).unwrap())
            .with("d", Type::arrow(s(), e()).unwrap());
        let u = Var::new(s(), 0);
        let vv = Var::new(s(), 1);
        let inner = Term::lam(
            vv.clone(),
            Term::apps(
                Term::constant("ch", Type::arrows(&[s(), e()], t()).unwrap()),
                &[
                    Term::var(vv),
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
        let de_re = Term::lam(
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
        assert!(roundtrip_check(&de_re, &upsilon, &sig, DEFAULT_FUEL).unwrap());
    }

    #[test]
    fn beta_steps_translate_to_weak_equalities() {
        let upsilon = u2();
        // I[E] applied: one distance-zero step.
        let i = mk_lambda_combinator(&CombinatorSpec::i(e()), &upsilon, &sig()).unwrap();
        let p = Term::var(Var::new(e(), 2));
        let m = Term::app(i, p).unwrap();
        let redexes = find_redexes(&m, &upsilon, ReductionMode::Beta);
        let n = contract(&m, &redexes[0]).unwrap();
        assert!(check_beta_to_weak(&m, &n, &upsilon, &sig(), DEFAULT_FUEL).unwrap());
    }

    #[test]
    fn weak_step_translates_to_matching_normal_forms() {
        // One weak step; the lambda translates share a full normal form.
        let upsilon = u2();
        let k = ClTerm::comb(CombinatorSpec::k(e(), s()), &upsilon, &sig()).unwrap();
        let x = ClTerm::var(Var::new(e(), 0));
        let y = ClTerm::var(Var::new(s(), 0));
        let kxy = ClTerm::apps(k, &[x.clone(), y]).unwrap();
        let reduct = crate::cl::weak_reducts(&kxy)[0].clone();
        let lhs = to_lambda(&kxy, &upsilon, &sig()).unwrap();
        let rhs = to_lambda(&reduct, &upsilon, &sig()).unwrap();
        let n1 = normalize_full_lambda(&lhs, DEFAULT_FUEL).unwrap();
        let n2 = normalize_full_lambda(&rhs, DEFAULT_FUEL).unwrap();
        assert!(alpha_equal(&n1, &n2));
    }

    #[test]
    fn bracket_translates_to_abstraction_up_to_beta_eta() {
        // ([v:A]M)^lambda and \v:A.(M^lambda) share their normal forms.
        let upsilon = u2();
        let vs = Var::new(s(), 0);
        let u = Var::new(Type::arrow(s(), t()).unwrap(), 0);
        let m_cl = ClTerm::app(ClTerm::var(u.clone()), ClTerm::var(vs.clone())).unwrap();
        let bracket = cl_bracket(&vs, &m_cl, &upsilon, &sig()).unwrap();
        let lhs = to_lambda(&bracket, &upsilon, &sig()).unwrap();
        let rhs = Term::lam(
            vs.clone(),
            to_lambda(&m_cl, &upsilon, &sig()).unwrap(),
        )
        .unwrap();
        let n1 = normalize_full_lambda(&lhs, DEFAULT_FUEL).unwrap();
        let n2 = normalize_full_lambda(&rhs, DEFAULT_FUEL).unwrap();
        assert!(alpha_equal(&n1, &n2));
        // Sanity: the weak normal form of ([v]M) v is M.
        let applied = ClTerm::app(bracket, ClTerm::var(vs)).unwrap();
        assert_eq!(weak_normalize(&applied, 10_000).unwrap(), m_cl);
    }

    #[test]
    fn substitution_mirrored_at_equality_level() {
        // (L[v:=N])^cl =w L^cl[v:=N^cl] when N is free for v in L.
        let upsilon = u2();
        let sig = sig();
        let vs = Var::new(s(), 0);
        let u = Var::new(Type::arrows(&[s(), s()], t()).unwrap(), 0);
        let l = Term::lam(
            Var::new(s(), 1),
            Term::apps(
                Term::var(u.clone()),
                &[Term::var(Var::new(s(), 1)), Term::var(vs.clone())],
            )
            .unwrap(),
        )
        .unwrap();
        let n = Term::constant("c", s());
        assert!(crate::term::is_free_for(&n, &vs, &l));
        let lhs = to_cl(&crate::term::substitute(&l, &vs, &n).unwrap(), &upsilon, &sig).unwrap();
        let l_cl = to_cl(&l, &upsilon, &sig).unwrap();
        let n_cl = to_cl(&n, &upsilon, &sig).unwrap();
        let rhs = crate::cl::cl_substitute1(&l_cl, &vs, &n_cl);
        assert!(decide_weak_equal(&lhs, &rhs, 100_000).unwrap());
    }
}
