//! Types, atoms, variable budgets, and signatures.
//!
//! A type is a state atom, an entity atom, or an arrow whose codomain is
//! regular. State atoms never appear as a codomain; that single restriction
//! is what makes the modal systems modal. The parameter assigns each state
//! atom a budget of variable indices; regular types always get `omega`.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// Interned atom name.
pub type AtomName = Rc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum TypeKind {
    State(AtomName),
    Entity(AtomName),
    Arrow(Type, Type),
}

/// A type expression. Cheap to clone; compared structurally.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Type(Rc<TypeKind>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("arrow codomain {0} is a state atom")]
    StateCodomain(Type),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("variable index {index} exceeds budget {budget} at type {ty}")]
    VariableBudgetExceeded { ty: Type, index: u32, budget: Budget },
    #[error("cannot apply {fun_ty} to argument of type {arg_ty}")]
    IllTypedApplication { fun_ty: Type, arg_ty: Type },
    #[error("lambda abstraction over state-typed body {0}")]
    StateBodyAbstraction(Type),
    #[error("type {0} is not a type of the modal calculus")]
    NonModalType(Type),
}

impl Type {
    pub fn state(name: &str) -> Type {
        Type(Rc::new(TypeKind::State(Rc::from(name))))
    }

    pub fn entity(name: &str) -> Type {
        Type(Rc::new(TypeKind::Entity(Rc::from(name))))
    }

    /// Arrow formation under the modal discipline: the codomain must be
    /// regular.
    pub fn arrow(dom: Type, cod: Type) -> Result<Type, TypeError> {
        if cod.is_state() {
            return Err(TypeError::StateCodomain(cod));
        }
        Ok(Type(Rc::new(TypeKind::Arrow(dom, cod))))
    }

    /// Arrow formation for the ordinary simply-typed calculus, where the
    /// former state atoms count as entity atoms and anything goes.
    pub fn arrow_full(dom: Type, cod: Type) -> Type {
        Type(Rc::new(TypeKind::Arrow(dom, cod)))
    }

    /// Right-associated arrow chain `ts[0] -> ts[1] -> ... -> cod`.
    pub fn arrows(doms: &[Type], cod: Type) -> Result<Type, TypeError> {
        let mut ty = cod;
        for d in doms.iter().rev() {
            ty = Type::arrow(d.clone(), ty)?;
        }
        Ok(ty)
    }

    pub fn is_state(&self) -> bool {
        matches!(&*self.0, TypeKind::State(_))
    }

    /// Regular = not a state atom.
    pub fn is_regular(&self) -> bool {
        !self.is_state()
    }

    pub fn is_atom(&self) -> bool {
        !matches!(&*self.0, TypeKind::Arrow(..))
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match &*self.0 {
            TypeKind::Arrow(d, c) => Some((d, c)),
            _ => None,
        }
    }

    pub fn atom_name(&self) -> Option<&str> {
        match &*self.0 {
            TypeKind::State(n) | TypeKind::Entity(n) => Some(n),
            TypeKind::Arrow(..) => None,
        }
    }

    /// True when every arrow inside has a regular codomain, i.e. the type
    /// belongs to the modal calculus and not merely to the full calculus.
    pub fn is_modal(&self) -> bool {
        match &*self.0 {
            TypeKind::State(_) | TypeKind::Entity(_) => true,
            TypeKind::Arrow(d, c) => c.is_regular() && d.is_modal() && c.is_modal(),
        }
    }

    /// All atoms mentioned, in first-occurrence order.
    pub fn atoms(&self) -> Vec<Type> {
        fn go(ty: &Type, out: &mut Vec<Type>) {
            match &*ty.0 {
                TypeKind::Arrow(d, c) => {
                    go(d, out);
                    go(c, out);
                }
                _ => {
                    if !out.contains(ty) {
                        out.push(ty.clone());
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            TypeKind::State(n) | TypeKind::Entity(n) => write!(f, "{n}"),
            TypeKind::Arrow(d, c) => {
                if d.as_arrow().is_some() {
                    write!(f, "({d})->{c}")
                } else {
                    write!(f, "{d}->{c}")
                }
            }
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A variable budget: finitely many indices, or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Finite(u32),
    Omega,
}

impl Budget {
    pub fn admits(&self, index: u32) -> bool {
        match self {
            Budget::Finite(n) => index < *n,
            Budget::Omega => true,
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Finite(n) => write!(f, "{n}"),
            Budget::Omega => write!(f, "omega"),
        }
    }
}

/// The parameter: a budget for each state atom. Regular types implicitly
/// get `omega`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Parameter {
    budgets: BTreeMap<AtomName, u32>,
}

impl Parameter {
    /// Parameter with every declared state atom at `omega`.
    pub fn omega() -> Parameter {
        Parameter::default()
    }

    /// Uniform budget `n` is declared atom by atom via [`Parameter::set`].
    pub fn set(&mut self, state_atom: &str, budget: Budget) {
        match budget {
            Budget::Finite(n) => {
                assert!(n >= 1, "budgets start at 1");
                self.budgets.insert(Rc::from(state_atom), n);
            }
            Budget::Omega => {
                self.budgets.remove(state_atom);
            }
        }
    }

    pub fn with(mut self, state_atom: &str, budget: Budget) -> Parameter {
        self.set(state_atom, budget);
        self
    }

    /// Budget of a type: finite only for state atoms with a declared finite
    /// budget.
    pub fn budget(&self, ty: &Type) -> Budget {
        if let Some(name) = ty.atom_name() {
            if ty.is_state() {
                if let Some(n) = self.budgets.get(name) {
                    return Budget::Finite(*n);
                }
            }
        }
        Budget::Omega
    }

    pub fn admits(&self, ty: &Type, index: u32) -> bool {
        self.budget(ty).admits(index)
    }

    /// The pointwise partial order on parameters over a shared atom set.
    pub fn leq(&self, other: &Parameter) -> bool {
        // Atoms absent from the map sit at omega, so only our finite
        // entries can violate the order.
        for (atom, n) in &other.budgets {
            match self.budgets.get(atom) {
                Some(m) if m <= n => {}
                _ => return false,
            }
        }
        // Finite entries of ours that `other` leaves at omega are fine.
        self.budgets
            .iter()
            .all(|(atom, _)| other.budgets.get(atom).is_none() || other.budgets.contains_key(atom))
    }
}

/// Typed constants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Signature {
    consts: BTreeMap<String, Type>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, name: &str, ty: Type) {
        let prev = self.consts.insert(name.to_string(), ty);
        assert!(prev.is_none(), "constant `{name}` declared twice");
    }

    pub fn with(mut self, name: &str, ty: Type) -> Signature {
        self.declare(name, ty);
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.consts.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Type)> {
        self.consts.iter()
    }

    /// Constants of exactly the given type.
    pub fn constants_of(&self, ty: &Type) -> Vec<&str> {
        self.consts
            .iter()
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}
