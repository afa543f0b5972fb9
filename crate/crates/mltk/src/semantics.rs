//! Finite Henkin-style frames and denotation evaluation.
//!
//! Carriers for arrow types are either *standard* (the full function space,
//! represented arithmetically: an element is its lexicographic rank, and
//! application is digit extraction, so nothing is materialized) or
//! *explicit* (a concrete list of tables, possibly a proper subset of the
//! function space). A frame fails to be a model exactly when the table of
//! some lambda abstract is missing from an explicit carrier.
//!
//! The combinatorial characterisation reduces model checking over a finite
//! type universe to evaluating the combinator instances that fit in it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::comb::CombinatorSpec;
use crate::combinator::mk_lambda_combinator;
use crate::term::{Term, TermKind, Var};
use crate::types::{Parameter, Signature, Type};

pub type Elem = u128;

/// Default cap on any carrier that must actually be enumerated.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("denotation undefined at {at}: table missing from the carrier of {ty}")]
    DenotationUndefined { at: String, ty: Type },
    #[error("type {0} lies outside the frame's universe")]
    TypeOutsideUniverse(Type),
    #[error("carrier of {0} exceeds the enumeration bound")]
    UniverseTooLarge(Type),
    #[error("constant `{0}` has no interpretation in the frame")]
    ConstantUndeclared(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
}

/// A finite set of types closed under taking domains and codomains.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeUniverse {
    types: BTreeSet<Type>,
}

impl TypeUniverse {
    pub fn closure(seed: impl IntoIterator<Item = Type>) -> TypeUniverse {
        let mut types = BTreeSet::new();
        let mut stack: Vec<Type> = seed.into_iter().collect();
        while let Some(t) = stack.pop() {
            if types.insert(t.clone()) {
                if let Some((d, c)) = t.as_arrow() {
                    stack.push(d.clone());
                    stack.push(c.clone());
                }
            }
        }
        TypeUniverse { types }
    }

    /// The closure of all subterm types of the given terms.
    pub fn of_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> TypeUniverse {
        TypeUniverse::closure(terms.into_iter().flat_map(|t| t.subterm_types()))
    }

    pub fn contains(&self, ty: &Type) -> bool {
        self.types.contains(ty)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Type> {
        self.types.iter()
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Type> {
        self.types.iter().filter(|t| t.is_atom())
    }

    pub fn admits_term(&self, term: &Term) -> bool {
        term.subterm_types().iter().all(|t| self.contains(t))
    }
}

#[derive(Debug, Clone)]
enum Carrier {
    Atom(u128),
    Standard,
    Explicit { tables: Vec<Vec<Elem>>, index: HashMap<Vec<Elem>, Elem> },
}

/// A decorated frame: carriers for every universe type plus constant
/// interpretations.
#[derive(Debug, Clone)]
pub struct DecoratedFrame {
    universe: TypeUniverse,
    carriers: BTreeMap<Type, Carrier>,
    constants: BTreeMap<String, (Type, Elem)>,
    bound: u128,
}

/// A denotation: an element handle within one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenotValue {
    pub ty: Type,
    pub index: Elem,
}

/// A variable assignment; variables not mentioned default to element zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<Var, Elem>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn set(&mut self, v: Var, x: Elem) {
        self.map.insert(v, x);
    }

    pub fn with(mut self, v: Var, x: Elem) -> Assignment {
        self.set(v, x);
        self
    }

    pub fn get(&self, v: &Var) -> Elem {
        self.map.get(v).copied().unwrap_or(0)
    }
}

fn checked_pow(base: u128, exp: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl DecoratedFrame {
    /// An all-standard frame over the universe with the given atom sizes.
    pub fn standard(
        universe: TypeUniverse,
        atom_sizes: &BTreeMap<Type, u128>,
    ) -> Result<DecoratedFrame, SemanticsError> {
        let mut carriers = BTreeMap::new();
        for ty in universe.iter() {
            if ty.is_atom() {
                let size = *atom_sizes.get(ty).ok_or_else(|| {
                    SemanticsError::InvalidFrame(format!("no size for atom {ty}"))
                })?;
                if size == 0 {
                    return Err(SemanticsError::InvalidFrame(format!(
                        "carrier of {ty} must be non-empty"
                    )));
                }
                carriers.insert(ty.clone(), Carrier::Atom(size));
            } else {
                carriers.insert(ty.clone(), Carrier::Standard);
            }
        }
        Ok(DecoratedFrame {
            universe,
            carriers,
            constants: BTreeMap::new(),
            bound: DEFAULT_ENUMERATION_BOUND,
        })
    }

    /// Replaces the carrier of one arrow type by an explicit table list.
    /// Tables are sorted lexicographically and deduplicated.
    pub fn set_explicit(&mut self, ty: &Type, mut tables: Vec<Vec<Elem>>) -> Result<(), SemanticsError> {
        let (dom, cod) = ty
            .as_arrow()
            .ok_or_else(|| SemanticsError::InvalidFrame(format!("{ty} is not an arrow type")))?;
        let dom_len = self.carrier_len(dom)?;
        let cod_len = self.carrier_len(cod)?;
        for t in &tables {
            if t.len() as u128 != dom_len {
                return Err(SemanticsError::InvalidFrame(format!(
                    "table for {ty} has {} entries, expected {dom_len}",
                    t.len()
                )));
            }
            if t.iter().any(|&e| e >= cod_len) {
                return Err(SemanticsError::InvalidFrame(format!(
                    "table entry out of range for {ty}"
                )));
            }
        }
        tables.sort();
        tables.dedup();
        let index = tables
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as Elem))
            .collect();
        self.carriers.insert(ty.clone(), Carrier::Explicit { tables, index });
        Ok(())
    }

    pub fn set_bound(&mut self, bound: u128) {
        self.bound = bound;
    }

    pub fn declare_constant(
        &mut self,
        name: &str,
        ty: Type,
        value: Elem,
    ) -> Result<(), SemanticsError> {
        let len = self.carrier_len(&ty)?;
        if value >= len {
            return Err(SemanticsError::InvalidFrame(format!(
                "constant `{name}` assigned element {value} outside its carrier of size {len}"
            )));
        }
        self.constants.insert(name.to_string(), (ty, value));
        Ok(())
    }

    pub fn universe(&self) -> &TypeUniverse {
        &self.universe
    }

    pub fn constants(&self) -> impl Iterator<Item = (&String, &(Type, Elem))> {
        self.constants.iter()
    }

    fn carrier(&self, ty: &Type) -> Result<&Carrier, SemanticsError> {
        self.carriers
            .get(ty)
            .ok_or_else(|| SemanticsError::TypeOutsideUniverse(ty.clone()))
    }

    /// Number of elements in a carrier.
    pub fn carrier_len(&self, ty: &Type) -> Result<u128, SemanticsError> {
        match self.carrier(ty)? {
            Carrier::Atom(n) => Ok(*n),
            Carrier::Explicit { tables, .. } => Ok(tables.len() as u128),
            Carrier::Standard => {
                let (dom, cod) = ty.as_arrow().expect("standard carriers are arrows");
                let d = self.carrier_len(dom)?;
                let c = self.carrier_len(cod)?;
                checked_pow(c, d).ok_or_else(|| SemanticsError::UniverseTooLarge(ty.clone()))
            }
        }
    }

    /// Whether the carrier is the full function space.
    pub fn is_standard(&self, ty: &Type) -> Result<bool, SemanticsError> {
        match self.carrier(ty)? {
            Carrier::Atom(_) | Carrier::Standard => Ok(true),
            Carrier::Explicit { tables, .. } => {
                let (dom, cod) = ty.as_arrow().expect("explicit carriers are arrows");
                let full = checked_pow(self.carrier_len(cod)?, self.carrier_len(dom)?);
                Ok(full == Some(tables.len() as u128))
            }
        }
    }

    /// Applies a function element to an argument element.
    pub fn apply(&self, f: &DenotValue, x: &DenotValue) -> Result<DenotValue, SemanticsError> {
        let (dom, cod) = f
            .ty
            .as_arrow()
            .ok_or_else(|| SemanticsError::InvalidFrame(format!("{} is no function", f.ty)))?;
        debug_assert_eq!(*dom, x.ty);
        let out = match self.carrier(&f.ty)? {
            Carrier::Atom(_) => unreachable!("atoms are not applied"),
            Carrier::Explicit { tables, .. } => tables[f.index as usize][x.index as usize],
            Carrier::Standard => {
                let dom_len = self.carrier_len(dom)?;
                let cod_len = self.carrier_len(cod)?;
                if cod_len == 1 {
                    0
                } else {
                    let place = checked_pow(cod_len, dom_len - 1 - x.index)
                        .ok_or_else(|| SemanticsError::UniverseTooLarge(f.ty.clone()))?;
                    (f.index / place) % cod_len
                }
            }
        };
        Ok(DenotValue { ty: cod.clone(), index: out })
    }

    /// Looks up (or ranks) a table in the carrier of `ty`.
    fn find_table(&self, ty: &Type, entries: &[Elem]) -> Result<Option<Elem>, SemanticsError> {
        match self.carrier(ty)? {
            Carrier::Atom(_) => unreachable!("tables live at arrow types"),
            Carrier::Explicit { index, .. } => Ok(index.get(entries).copied()),
            Carrier::Standard => {
                let (_, cod) = ty.as_arrow().expect("arrow");
                let cod_len = self.carrier_len(cod)?;
                let mut rank: u128 = 0;
                for &e in entries {
                    rank = rank
                        .checked_mul(cod_len)
                        .and_then(|r| r.checked_add(e))
                        .ok_or_else(|| SemanticsError::UniverseTooLarge(ty.clone()))?;
                }
                Ok(Some(rank))
            }
        }
    }

    /// Inserts a table into an explicit carrier, returning its element.
    fn insert_table(&mut self, ty: &Type, entries: Vec<Elem>) -> Elem {
        let Some(Carrier::Explicit { tables, index }) = self.carriers.get_mut(ty) else {
            unreachable!("insertion only targets explicit carriers");
        };
        if let Some(e) = index.get(&entries) {
            return *e;
        }
        let e = tables.len() as Elem;
        tables.push(entries.clone());
        index.insert(entries, e);
        e
    }

    /// All carriers non-empty?
    pub fn validate_nonempty(&self) -> Result<(), SemanticsError> {
        for ty in self.universe.iter() {
            if self.carrier_len(ty)? == 0 {
                return Err(SemanticsError::InvalidFrame(format!(
                    "carrier of {ty} is empty"
                )));
            }
        }
        Ok(())
    }
}

/// Denotation of a term, per the inductive clauses; for an abstraction the
/// metatheoretic function is tabulated over the domain carrier and looked
/// up in the carrier of the arrow type.
pub fn eval(
    term: &Term,
    frame: &DecoratedFrame,
    rho: &Assignment,
) -> Result<DenotValue, SemanticsError> {
    eval_inner(term, frame, rho, &mut |_, _| {})
}

fn eval_inner(
    term: &Term,
    frame: &DecoratedFrame,
    rho: &Assignment,
    missing: &mut impl FnMut(&Type, &Vec<Elem>),
) -> Result<DenotValue, SemanticsError> {
    if !frame.universe.contains(term.ty()) {
        return Err(SemanticsError::TypeOutsideUniverse(term.ty().clone()));
    }
    match term.kind() {
        TermKind::Var(v) => {
            let len = frame.carrier_len(&v.ty)?;
            let idx = rho.get(v);
            debug_assert!(idx < len, "assignment element within the carrier");
            Ok(DenotValue { ty: v.ty.clone(), index: idx.min(len - 1) })
        }
        TermKind::Const(c) => {
            let (ty, value) = frame
                .constants
                .get(&**c)
                .ok_or_else(|| SemanticsError::ConstantUndeclared(c.to_string()))?;
            debug_assert_eq!(ty, term.ty());
            Ok(DenotValue { ty: ty.clone(), index: *value })
        }
        TermKind::App(f, a) => {
            let fv = eval_inner(f, frame, rho, missing)?;
            let av = eval_inner(a, frame, rho, missing)?;
            frame.apply(&fv, &av)
        }
        TermKind::Lam(v, body) => {
            if !frame.universe.contains(&v.ty) {
                return Err(SemanticsError::TypeOutsideUniverse(v.ty.clone()));
            }
            let dom_len = frame.carrier_len(&v.ty)?;
            if dom_len > frame.bound {
                return Err(SemanticsError::UniverseTooLarge(v.ty.clone()));
            }
            let mut entries = Vec::with_capacity(dom_len as usize);
            for x in 0..dom_len {
                let rho2 = rho.clone().with(v.clone(), x);
                entries.push(eval_inner(body, frame, &rho2, missing)?.index);
            }
            match frame.find_table(term.ty(), &entries)? {
                Some(e) => Ok(DenotValue { ty: term.ty().clone(), index: e }),
                None => {
                    missing(term.ty(), &entries);
                    Err(SemanticsError::DenotationUndefined {
                        at: term.to_string(),
                        ty: term.ty().clone(),
                    })
                }
            }
        }
    }
}

/// The model verdict over the universe-restricted language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Model,
    NotModel { witness: Term },
}

/// Enumerates all combinator instances (including derived Starling and
/// Identity, taken at their primitive shapes) whose subterm types fit the
/// universe.
pub fn universe_combinator_instances(
    universe: &TypeUniverse,
    upsilon: &Parameter,
    sig: &Signature,
) -> Vec<Term> {
    let types: Vec<Type> = universe.iter().cloned().collect();
    let mut specs: Vec<CombinatorSpec> = Vec::new();
    for a in &types {
        specs.push(CombinatorSpec::i(a.clone()));
        for b in &types {
            specs.push(CombinatorSpec::k(a.clone(), b.clone()));
            specs.push(CombinatorSpec::w(a.clone(), b.clone()));
            for c in &types {
                specs.push(CombinatorSpec::c(a.clone(), b.clone(), c.clone()));
                specs.push(CombinatorSpec::b(a.clone(), b.clone(), c.clone()));
                specs.push(CombinatorSpec::s(a.clone(), b.clone(), c.clone()));
                if b.is_state() {
                    for name in sig.constants_of(b) {
                        specs.push(CombinatorSpec::d(a.clone(), b.clone(), c.clone(), name));
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for spec in specs {
        if spec.validate(upsilon, sig).is_err() {
            continue;
        }
        let Ok(term) = mk_lambda_combinator(&spec, upsilon, sig) else { continue };
        if universe.admits_term(&term) {
            out.push(term);
        }
    }
    out
}

/// Decides model-hood for the universe-restricted language by evaluating
/// every fitting combinator instance: the characterisation theorem makes
/// the denotations of those instances the only possible failure points,
/// since applications of existing tables always land in carriers.
pub fn check_model(
    frame: &DecoratedFrame,
    upsilon: &Parameter,
    sig: &Signature,
) -> Result<ModelVerdict, SemanticsError> {
    for instance in universe_combinator_instances(frame.universe(), upsilon, sig) {
        match eval(&instance, frame, &Assignment::new()) {
            Ok(_) => {}
            Err(SemanticsError::DenotationUndefined { .. }) => {
                return Ok(ModelVerdict::NotModel { witness: instance });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ModelVerdict::Model)
}

/// Enumerates every assignment to the given variables over their carriers.
pub fn assignments_over(
    frame: &DecoratedFrame,
    vars: &[Var],
) -> Result<Vec<Assignment>, SemanticsError> {
    let mut total: u128 = 1;
    let mut lens = Vec::new();
    for v in vars {
        let len = frame.carrier_len(&v.ty)?;
        if len > frame.bound {
            return Err(SemanticsError::UniverseTooLarge(v.ty.clone()));
        }
        total = total
            .checked_mul(len)
            .filter(|t| *t <= frame.bound)
            .ok_or_else(|| SemanticsError::UniverseTooLarge(v.ty.clone()))?;
        lens.push(len);
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut counters = vec![0u128; vars.len()];
    loop {
        let mut rho = Assignment::new();
        for (v, &c) in vars.iter().zip(&counters) {
            rho.set(v.clone(), c);
        }
        out.push(rho);
        let mut i = vars.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            counters[i] += 1;
            if counters[i] < lens[i] {
                break;
            }
            counters[i] = 0;
        }
    }
}

/// Validity of an equality in one frame: the denotations agree under every
/// assignment of the free variables.
pub fn validate_equality(
    m: &Term,
    n: &Term,
    frame: &DecoratedFrame,
) -> Result<bool, SemanticsError> {
    let mut vars = m.free_vars();
    for v in n.free_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    for rho in assignments_over(frame, &vars)? {
        if eval(m, frame, &rho)? != eval(n, frame, &rho)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Constructs the standard frame over a universe. The carriers stay
/// arithmetic; sizes are only computed, never materialized, so very large
/// function spaces are fine as long as no abstraction has to enumerate
/// them.
pub fn enumerate_standard_frame(
    universe: TypeUniverse,
    atom_sizes: &BTreeMap<Type, u128>,
    sig: &Signature,
    constant_assignment: &BTreeMap<String, Elem>,
) -> Result<DecoratedFrame, SemanticsError> {
    let mut frame = DecoratedFrame::standard(universe, atom_sizes)?;
    for (name, ty) in sig.iter() {
        if frame.universe.contains(ty) {
            let value = constant_assignment.get(name).copied().unwrap_or(0);
            frame.declare_constant(name, ty.clone(), value)?;
        }
    }
    frame.validate_nonempty()?;
    Ok(frame)
}

/// Closes the explicit carriers of a frame under the tabulations demanded
/// by every fitting combinator instance and every term of the corpus
/// (under all assignments of their free variables), iterating to a fixed
/// point. Afterwards the frame passes `check_model` and evaluates the
/// corpus.
pub fn close_frame(
    frame: &mut DecoratedFrame,
    upsilon: &Parameter,
    sig: &Signature,
    corpus: &[Term],
) -> Result<(), SemanticsError> {
    let instances = universe_combinator_instances(frame.universe(), upsilon, sig);
    for _round in 0..64 {
        let mut inserted = false;
        let mut todo: Vec<(Type, Vec<Elem>)> = Vec::new();
        {
            let mut record = |ty: &Type, entries: &Vec<Elem>| {
                todo.push((ty.clone(), entries.clone()));
            };
            for inst in &instances {
                let _ = eval_inner(inst, frame, &Assignment::new(), &mut record);
            }
            for term in corpus {
                let vars = term.free_vars();
                for rho in assignments_over(frame, &vars)? {
                    let _ = eval_inner(term, frame, &rho, &mut record);
                }
            }
        }
        for (ty, entries) in todo {
            frame.insert_table(&ty, entries);
            inserted = true;
        }
        if !inserted {
            return Ok(());
        }
    }
    Err(SemanticsError::InvalidFrame(
        "carrier closure did not stabilize".into(),
    ))
}

impl fmt::Display for ModelVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelVerdict::Model => write!(f, "model"),
            ModelVerdict::NotModel { witness } => write!(f, "not a model; witness: {witness}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{contract, find_redexes, ReductionMode};
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

    fn sizes2(universe: &TypeUniverse) -> BTreeMap<Type, u128> {
        universe.atoms().map(|a| (a.clone(), 2)).collect()
    }

    #[test]
    fn standard_frame_sizes() {
        // Universe {S, T, S->T}: the arrow carrier has 4 tables.
        let st = Type::arrow(s(), t()).unwrap();
        let u = TypeUniverse::closure([st.clone()]);
        let frame = DecoratedFrame::standard(u, &sizes2(&TypeUniverse::closure([st.clone()])))
            .unwrap();
        assert_eq!(frame.carrier_len(&st).unwrap(), 4);

        // Montagovian universe {S,E,T,S->T,S->E} with sizes 2: 2,2,2,4,4.
        let se = Type::arrow(s(), e()).unwrap();
        let u = TypeUniverse::closure([st.clone(), se.clone()]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        for ty in [s(), e(), t()] {
            assert_eq!(frame.carrier_len(&ty).unwrap(), 2);
        }
        assert_eq!(frame.carrier_len(&st).unwrap(), 4);
        assert_eq!(frame.carrier_len(&se).unwrap(), 4);
    }

    #[test]
    fn identity_evaluates_to_the_identity_table() {
        let ee = Type::arrow(e(), e()).unwrap();
        let u = TypeUniverse::closure([ee.clone()]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        let x = Var::new(e(), 0);
        let idt = Term::lam(x.clone(), Term::var(x)).unwrap();
        let v = eval(&idt, &frame, &Assignment::new()).unwrap();
        // Lex rank of the table [0,1] over codomain size 2 is 0*2+1 = 1.
        assert_eq!(v, DenotValue { ty: ee, index: 1 });
    }

    #[test]
    fn singleton_carriers_make_every_equality_valid() {
        let ee = Type::arrow(e(), e()).unwrap();
        let u = TypeUniverse::closure([ee.clone()]);
        let sizes: BTreeMap<Type, u128> = u.atoms().map(|a| (a.clone(), 1)).collect();
        let frame = DecoratedFrame::standard(u.clone(), &sizes).unwrap();
        let x = Var::new(e(), 0);
        let y = Var::new(e(), 1);
        assert!(validate_equality(&Term::var(x), &Term::var(y), &frame).unwrap());
    }

    #[test]
    fn punctured_frame_is_rejected_with_a_witness() {
        let ee = Type::arrow(e(), e()).unwrap();
        let u = TypeUniverse::closure([ee.clone()]);
        let mut frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        // All tables except the identity [0,1].
        frame
            .set_explicit(&ee, vec![vec![0, 0], vec![1, 0], vec![1, 1]])
            .unwrap();
        let x = Var::new(e(), 0);
        let idt = Term::lam(x.clone(), Term::var(x)).unwrap();
        assert!(matches!(
            eval(&idt, &frame, &Assignment::new()),
            Err(SemanticsError::DenotationUndefined { .. })
        ));
        let verdict = check_model(&frame, &Parameter::omega(), &Signature::new()).unwrap();
        let ModelVerdict::NotModel { witness } = verdict else {
            panic!("punctured frame accepted");
        };
        assert!(witness.to_string().contains("v0"));
        // The standard frame over the same universe is a model.
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        assert_eq!(
            check_model(&frame, &Parameter::omega(), &Signature::new()).unwrap(),
            ModelVerdict::Model
        );
    }

    #[test]
    fn closed_frame_passes_check_model_without_being_standard() {
        // Keep S->S->T explicit, seed it with one table, and close under
        // the fitting combinator instances (the Cardinal over S,S,T
        // tabulates argument-permuted tables back into the carrier).
        let sst = Type::arrows(&[s(), s()], t()).unwrap();
        let c_ty = Type::arrow(sst.clone(), sst.clone()).unwrap();
        let u = TypeUniverse::closure([c_ty]);
        let mut frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        frame.set_explicit(&sst, vec![vec![0, 1]]).unwrap();
        let upsilon = Parameter::omega().with("S", Budget::Finite(2));
        let sig = Signature::new();
        close_frame(&mut frame, &upsilon, &sig, &[]).unwrap();
        assert_eq!(check_model(&frame, &upsilon, &sig).unwrap(), ModelVerdict::Model);
        assert!(!frame.is_standard(&sst).unwrap());
        assert!(frame.carrier_len(&sst).unwrap() > 0);
    }

    #[test]
    fn separating_assignment_on_free_variables() {
        let u = TypeUniverse::closure([e()]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        let x = Term::var(Var::new(e(), 0));
        let y = Term::var(Var::new(e(), 1));
        assert!(!validate_equality(&x, &y, &frame).unwrap());
        assert!(validate_equality(&x, &x, &frame).unwrap());
    }

    #[test]
    fn nested_abstract_equation() {
        // [[ (\x1.\x2.L) M1 M2 ]]_rho = [[L]]_rho2 with the iterated
        // variant assignment.
        let sst = Type::arrows(&[s(), s()], t()).unwrap();
        let u = TypeUniverse::closure([sst.clone()]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        let f = Var::new(sst.clone(), 0);
        let x1 = Var::new(s(), 0);
        let x2 = Var::new(s(), 1);
        let m1 = Term::var(Var::new(s(), 2));
        let m2 = Term::var(Var::new(s(), 3));
        let body = Term::apps(
            Term::var(f.clone()),
            &[Term::var(x1.clone()), Term::var(x2.clone())],
        )
        .unwrap();
        let lam = Term::lam(x1.clone(), Term::lam(x2.clone(), body.clone()).unwrap()).unwrap();
        let applied = Term::apps(lam, &[m1.clone(), m2.clone()]).unwrap();
        for rho in assignments_over(&frame, &applied.free_vars()).unwrap() {
            let lhs = eval(&applied, &frame, &rho).unwrap();
            let mut rho_n = rho.clone();
            let m1v = eval(&m1, &frame, &rho).unwrap();
            rho_n.set(x1.clone(), m1v.index);
            let m2v = eval(&m2, &frame, &rho).unwrap();
            rho_n.set(x2.clone(), m2v.index);
            let rhs = eval(&body, &frame, &rho_n).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn soundness_along_a_reduction() {
        // Evaluate a redex and its contractum: equal denotations.
        let upsilon = Parameter::omega().with("S", Budget::Finite(2));
        let x = Var::new(e(), 0);
        let idt = Term::lam(x.clone(), Term::var(x)).unwrap();
        let p = Term::var(Var::new(e(), 1));
        let m = Term::app(idt, p.clone()).unwrap();
        let u = TypeUniverse::of_terms([&m]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        let redexes = find_redexes(&m, &upsilon, ReductionMode::Beta);
        let n = contract(&m, &redexes[0]).unwrap();
        for rho in assignments_over(&frame, &m.free_vars()).unwrap() {
            assert_eq!(
                eval(&m, &frame, &rho).unwrap(),
                eval(&n, &frame, &rho).unwrap()
            );
        }
    }

    #[test]
    fn big_standard_carriers_need_no_materialization() {
        // The Cardinal replacement term evaluates on the standard frame
        // even though one carrier has 4^16 elements.
        let replacement = crate::combinator::cardinal_replacement(&s(), &t());
        let cardinal = mk_lambda_combinator(
            &CombinatorSpec::c(s(), s(), t()),
            &Parameter::omega().with("S", Budget::Finite(2)),
            &Signature::new(),
        )
        .unwrap();
        let u = TypeUniverse::of_terms([&replacement, &cardinal]);
        let frame = DecoratedFrame::standard(u.clone(), &sizes2(&u)).unwrap();
        assert!(validate_equality(&replacement, &cardinal, &frame).unwrap());
    }
}
