//! Typed combinator instances and their side conditions.
//!
//! One spec describes an instance of I, K, C, D, W, B, or S at concrete
//! types. The same table of side conditions governs the lambda-side
//! combinator terms and the combinatory-logic constants; only Cardinal
//! depends on the parameter, and only Dardinal depends on the signature.

use std::fmt;

use thiserror::Error;

use crate::types::{Budget, Parameter, Signature, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CombKind {
    I,
    K,
    C,
    D,
    W,
    B,
    S,
}

impl CombKind {
    pub fn arity(&self) -> usize {
        match self {
            CombKind::I => 1,
            CombKind::K | CombKind::W => 2,
            CombKind::C | CombKind::D | CombKind::B | CombKind::S => 3,
        }
    }

    pub fn letter(&self) -> char {
        match self {
            CombKind::I => 'I',
            CombKind::K => 'K',
            CombKind::C => 'C',
            CombKind::D => 'D',
            CombKind::W => 'W',
            CombKind::B => 'B',
            CombKind::S => 'S',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatorError {
    #[error("side condition violated for {spec}: {clause}")]
    SideConditionViolated { spec: String, clause: String },
}

/// A typed combinator instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombinatorSpec {
    pub kind: CombKind,
    pub type_params: Vec<Type>,
    /// Dardinal's decorating constant; `None` for every other kind.
    pub dardinal_const: Option<String>,
}

impl CombinatorSpec {
    pub fn i(a: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::I, type_params: vec![a], dardinal_const: None }
    }
    pub fn k(a: Type, b: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::K, type_params: vec![a, b], dardinal_const: None }
    }
    pub fn c(a: Type, b: Type, c: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::C, type_params: vec![a, b, c], dardinal_const: None }
    }
    pub fn d(a: Type, b: Type, c: Type, constant: &str) -> CombinatorSpec {
        CombinatorSpec {
            kind: CombKind::D,
            type_params: vec![a, b, c],
            dardinal_const: Some(constant.to_string()),
        }
    }
    pub fn w(a: Type, b: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::W, type_params: vec![a, b], dardinal_const: None }
    }
    pub fn b(a: Type, b: Type, c: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::B, type_params: vec![a, b, c], dardinal_const: None }
    }
    pub fn s(a: Type, b: Type, c: Type) -> CombinatorSpec {
        CombinatorSpec { kind: CombKind::S, type_params: vec![a, b, c], dardinal_const: None }
    }

    fn p(&self, i: usize) -> &Type {
        &self.type_params[i]
    }

    fn violation(&self, clause: &str) -> CombinatorError {
        CombinatorError::SideConditionViolated { spec: self.to_string(), clause: clause.into() }
    }

    /// Checks the side conditions relative to a parameter and signature.
    pub fn validate(&self, upsilon: &Parameter, sig: &Signature) -> Result<(), CombinatorError> {
        if self.type_params.len() != self.kind.arity() {
            return Err(self.violation("wrong number of type parameters"));
        }
        if self.type_params.iter().any(|t| !t.is_modal()) {
            return Err(self.violation("type parameters must be modal types"));
        }
        if self.dardinal_const.is_some() != (self.kind == CombKind::D) {
            return Err(self.violation("only Dardinal carries a constant"));
        }
        match self.kind {
            CombKind::I => {
                if self.p(0).is_state() {
                    return Err(self.violation("I requires A regular"));
                }
            }
            CombKind::K => {
                if self.p(0).is_state() {
                    return Err(self.violation("K requires A regular"));
                }
            }
            CombKind::C => {
                if self.p(2).is_state() {
                    return Err(self.violation("C requires C regular"));
                }
                if self.p(0) == self.p(1) && upsilon.budget(self.p(0)) == Budget::Finite(1) {
                    return Err(self.violation(
                        "C with identical argument types requires a budget above one",
                    ));
                }
            }
            CombKind::D => {
                if self.p(2).is_state() {
                    return Err(self.violation("D requires C regular"));
                }
                if !self.p(1).is_state() {
                    return Err(self.violation("D requires B state"));
                }
                let c = self.dardinal_const.as_ref().expect("checked above");
                match sig.lookup(c) {
                    Some(t) if t == self.p(1) => {}
                    Some(_) => return Err(self.violation("Dardinal constant has the wrong type")),
                    None => return Err(self.violation("Dardinal constant not in signature")),
                }
            }
            CombKind::W => {
                if self.p(1).is_state() {
                    return Err(self.violation("W requires B regular"));
                }
            }
            CombKind::B => {
                if self.p(1).is_state() || self.p(2).is_state() {
                    return Err(self.violation("B requires B and C regular"));
                }
            }
            CombKind::S => {
                if self.p(0).is_state() || self.p(1).is_state() {
                    return Err(self.violation("S requires A and B regular"));
                }
            }
        }
        Ok(())
    }

    /// Whether the instance exists as a primitive of the combinatory logic;
    /// S and I are derived there.
    pub fn is_cl_primitive(&self) -> bool {
        !matches!(self.kind, CombKind::S | CombKind::I)
    }

    /// The type of the instance. Caller must have validated the spec; the
    /// arrows formed here all have regular codomains once the side
    /// conditions hold.
    pub fn result_type(&self) -> Type {
        let ar = |d: Type, c: Type| Type::arrow(d, c).expect("side conditions make this regular");
        match self.kind {
            CombKind::I => {
                let a = self.p(0).clone();
                ar(a.clone(), a)
            }
            CombKind::K => {
                let (a, b) = (self.p(0).clone(), self.p(1).clone());
                ar(a.clone(), ar(b, a))
            }
            CombKind::C => {
                let (a, b, c) = (self.p(0).clone(), self.p(1).clone(), self.p(2).clone());
                let abc = ar(a.clone(), ar(b.clone(), c.clone()));
                ar(abc, ar(b, ar(a, c)))
            }
            CombKind::D => {
                let (a, b, c) = (self.p(0).clone(), self.p(1).clone(), self.p(2).clone());
                let abc = ar(a.clone(), ar(b, c.clone()));
                ar(abc, ar(a, c))
            }
            CombKind::W => {
                let (a, b) = (self.p(0).clone(), self.p(1).clone());
                ar(ar(a.clone(), ar(a.clone(), b.clone())), ar(a, b))
            }
            CombKind::B => {
                let (a, b, c) = (self.p(0).clone(), self.p(1).clone(), self.p(2).clone());
                ar(ar(b.clone(), c.clone()), ar(ar(a.clone(), b), ar(a, c)))
            }
            CombKind::S => {
                let (a, b, c) = (self.p(0).clone(), self.p(1).clone(), self.p(2).clone());
                ar(ar(c.clone(), ar(a.clone(), b.clone())), ar(ar(c.clone(), a), ar(c, b)))
            }
        }
    }
}

impl fmt::Display for CombinatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.kind.letter())?;
        if let Some(c) = &self.dardinal_const {
            write!(f, "{c};")?;
        }
        for (i, t) in self.type_params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Type {
        Type::state("S")
    }
    fn e() -> Type {
        Type::entity("E")
    }
    fn t() -> Type {
        Type::entity("T")
    }
    fn sig() -> Signature {
        Signature::new().with("c", s())
    }

    #[test]
    fn side_conditions() {
        let u1 = Parameter::omega().with("S", Budget::Finite(1));
        let u2 = Parameter::omega().with("S", Budget::Finite(2));
        // Cardinal with identical state argument types needs budget > 1.
        assert!(CombinatorSpec::c(s(), s(), t()).validate(&u2, &sig()).is_ok());
        assert!(CombinatorSpec::c(s(), s(), t()).validate(&u1, &sig()).is_err());
        // Distinct types are fine at budget 1.
        assert!(CombinatorSpec::c(s(), e(), t()).validate(&u1, &sig()).is_ok());
        // Dardinal does not depend on the parameter.
        assert!(CombinatorSpec::d(s(), s(), t(), "c").validate(&u1, &sig()).is_ok());
        assert!(CombinatorSpec::d(s(), s(), t(), "missing").validate(&u1, &sig()).is_err());
        // I and K need a regular first type.
        assert!(CombinatorSpec::i(s()).validate(&u2, &sig()).is_err());
        assert!(CombinatorSpec::k(e(), s()).validate(&u1, &sig()).is_ok());
        assert!(CombinatorSpec::k(s(), e()).validate(&u1, &sig()).is_err());
        // W needs B regular; B needs B, C regular; S needs A, B regular.
        assert!(CombinatorSpec::w(s(), t()).validate(&u1, &sig()).is_ok());
        assert!(CombinatorSpec::w(e(), s()).validate(&u1, &sig()).is_err());
        assert!(CombinatorSpec::b(s(), e(), t()).validate(&u1, &sig()).is_ok());
        assert!(CombinatorSpec::b(e(), s(), t()).validate(&u1, &sig()).is_err());
        assert!(CombinatorSpec::s(e(), e(), s()).validate(&u1, &sig()).is_ok());
        assert!(CombinatorSpec::s(s(), e(), e()).validate(&u1, &sig()).is_err());
    }

    #[test]
    fn instance_types() {
        let k = CombinatorSpec::k(e(), s());
        assert_eq!(k.result_type(), Type::arrows(&[e(), s()], e()).unwrap());
        let st = CombinatorSpec::s(e(), e(), s());
        // (S->E->E) -> (S->E) -> S->E
        let see = Type::arrows(&[s(), e()], e()).unwrap();
        let se = Type::arrow(s(), e()).unwrap();
        assert_eq!(
            st.result_type(),
            Type::arrows(&[see, se.clone()], se).unwrap()
        );
    }
}
