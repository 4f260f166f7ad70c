//! Finite general (Henkin) models: carriers that are literal subsets of
//! the full set hierarchy over named atoms, Tarski-style satisfaction with
//! closure failures surfaced as errors, labeled points, basic opens, and
//! finite restrictions of the fibered sets with their section subbasis.

mod file;

pub use file::{format_general_model, format_labeled_point, parse_general_model};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::HenkinError;
use crate::finspace::{FinSpace, PointSet};
use crate::sheaf::EtaleSpace;
use crate::syntax::{
    all_names_of, free_vars, fresh_name, print_term, substitute, typecheck, Context, Signature,
    Term, TypeExpr, Var,
};

/// Default nesting-depth cap for the carriers registered by [`GeneralModel::full`].
pub const DEFAULT_DEPTH_CAP: usize = 3;

/// Hard bound on enumerable carrier sizes; function spaces explode doubly
/// exponentially, so anything past this is refused rather than attempted.
pub const MAX_CARRIER: usize = 20_000;

/// An element of the universe: a type tag and an index into that type's
/// carrier enumeration. Truth value `tt` is index 0 at type `2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Value {
    pub ty: TypeExpr,
    pub idx: usize,
}

impl Value {
    pub fn new(ty: TypeExpr, idx: usize) -> Value {
        Value { ty, idx }
    }
}

/// Index of the truth value `tt` in the carrier of `2`.
pub const TT: usize = 0;
/// Index of the truth value `ff` in the carrier of `2`.
pub const FF: usize = 1;

/// A finite general model. Carriers of basic types are named atom sets and
/// `2` is always `{tt, ff}`; products are full relative to their factor
/// carriers; a function carrier is either registered explicitly (a listed
/// subset of the tables `carrier(Y) -> carrier(Z)`) or implicitly the full
/// table set, encoded in little-endian mixed radix.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralModel {
    pub signature: Signature,
    atoms: BTreeMap<String, Vec<String>>,
    funcs: BTreeMap<TypeExpr, Vec<Vec<usize>>>,
    func_names: BTreeMap<TypeExpr, Vec<String>>,
    consts: BTreeMap<String, Value>,
    rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

fn type_depth(ty: &TypeExpr) -> usize {
    match ty {
        TypeExpr::Basic(_) | TypeExpr::Two => 0,
        TypeExpr::Prod(a, b) | TypeExpr::Exp(a, b) => 1 + type_depth(a).max(type_depth(b)),
    }
}

fn too_large(ty: &TypeExpr) -> HenkinError {
    HenkinError::CarrierTooLarge { ty: ty.to_string() }
}

impl GeneralModel {
    /// Builds a model from explicit parts, validating that every function
    /// table has the right length and lands in the right carrier, that
    /// constant denotations and relation tuples are in range, and that
    /// registered function types sit under registered subcarriers.
    pub fn new(
        signature: Signature,
        atoms: BTreeMap<String, Vec<String>>,
        funcs: BTreeMap<TypeExpr, Vec<Vec<usize>>>,
        func_names: BTreeMap<TypeExpr, Vec<String>>,
        consts: BTreeMap<String, Value>,
        rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
    ) -> Result<GeneralModel, HenkinError> {
        for b in &signature.basic_types {
            if !atoms.contains_key(b) {
                return Err(HenkinError::MissingCarrier { ty: b.clone() });
            }
        }
        let m = GeneralModel {
            signature,
            atoms,
            funcs,
            func_names,
            consts,
            rels,
        };
        for (ty, tables) in &m.funcs {
            let (z, y) = match ty {
                TypeExpr::Exp(z, y) => (z, y),
                _ => {
                    return Err(HenkinError::CarrierEdit {
                        ty: ty.to_string(),
                        detail: "only function carriers may be registered".into(),
                    })
                }
            };
            let sy = m.carrier_size(y)?;
            let sz = m.carrier_size(z)?;
            for t in tables {
                if t.len() != sy || t.iter().any(|&v| v >= sz) {
                    return Err(HenkinError::CarrierEdit {
                        ty: ty.to_string(),
                        detail: "table does not fit the domain and codomain carriers".into(),
                    });
                }
            }
            if let Some(names) = m.func_names.get(ty) {
                if names.len() != tables.len() {
                    return Err(HenkinError::CarrierEdit {
                        ty: ty.to_string(),
                        detail: "element names do not match the table list".into(),
                    });
                }
            }
        }
        for (name, v) in &m.consts {
            let want = m
                .signature
                .constants
                .get(name)
                .ok_or_else(|| HenkinError::Syntax(crate::SyntaxError::UnknownConstant { name: name.clone() }))?;
            if &v.ty != want || v.idx >= m.carrier_size(&v.ty)? {
                return Err(HenkinError::UnknownElement {
                    name: name.clone(),
                    ty: want.to_string(),
                });
            }
        }
        for (name, tuples) in &m.rels {
            let args = m
                .signature
                .relations
                .get(name)
                .ok_or_else(|| HenkinError::Syntax(crate::SyntaxError::UnknownRelation { name: name.clone() }))?;
            for tup in tuples {
                if tup.len() != args.len() {
                    return Err(HenkinError::UnknownElement {
                        name: name.clone(),
                        ty: "relation tuple".into(),
                    });
                }
                for (v, ty) in tup.iter().zip(args) {
                    if *v >= m.carrier_size(ty)? {
                        return Err(HenkinError::UnknownElement {
                            name: format!("{}", v),
                            ty: ty.to_string(),
                        });
                    }
                }
            }
        }
        Ok(m)
    }

    /// The full model over the given atom sets: every function type
    /// reachable from the signature with nesting depth at most `depth_cap`
    /// gets its complete table set registered; constants denote the first
    /// element of their carrier; relations are empty.
    pub fn full(
        signature: &Signature,
        atoms: &[(&str, &[&str])],
        depth_cap: usize,
    ) -> Result<GeneralModel, HenkinError> {
        let atom_map: BTreeMap<String, Vec<String>> = atoms
            .iter()
            .map(|(b, names)| (b.to_string(), names.iter().map(|s| s.to_string()).collect()))
            .collect();
        let mut m = GeneralModel {
            signature: signature.clone(),
            atoms: atom_map,
            funcs: BTreeMap::new(),
            func_names: BTreeMap::new(),
            consts: BTreeMap::new(),
            rels: BTreeMap::new(),
        };
        for b in &signature.basic_types {
            if !m.atoms.contains_key(b) {
                return Err(HenkinError::MissingCarrier { ty: b.clone() });
            }
        }
        let mut reach: BTreeSet<TypeExpr> = BTreeSet::new();
        for b in &signature.basic_types {
            reach.insert(TypeExpr::basic(b));
        }
        reach.insert(TypeExpr::Two);
        for ty in signature.constants.values() {
            reach.extend(ty.subtypes());
        }
        for args in signature.relations.values() {
            for ty in args {
                reach.extend(ty.subtypes());
            }
        }
        let mut exps: Vec<TypeExpr> = reach
            .into_iter()
            .filter(|ty| matches!(ty, TypeExpr::Exp(_, _)) && type_depth(ty) <= depth_cap)
            .collect();
        exps.sort_by_key(type_depth);
        for ty in exps {
            m.ensure_carrier(&ty)?;
        }
        for (name, ty) in &signature.constants {
            if m.carrier_size(ty)? == 0 {
                return Err(HenkinError::UnknownElement {
                    name: name.clone(),
                    ty: ty.to_string(),
                });
            }
            m.consts.insert(name.clone(), Value::new(ty.clone(), 0));
        }
        for name in signature.relations.keys() {
            m.rels.insert(name.clone(), BTreeSet::new());
        }
        Ok(m)
    }

    /// Registers the full table set for a function type (a no-op if the
    /// type already has a registered carrier).
    pub fn ensure_carrier(&mut self, ty: &TypeExpr) -> Result<(), HenkinError> {
        let (z, y) = match ty {
            TypeExpr::Exp(z, y) => (z.as_ref().clone(), y.as_ref().clone()),
            _ => return Ok(()),
        };
        if self.funcs.contains_key(ty) {
            return Ok(());
        }
        let n = self.carrier_size(ty)?;
        let sy = self.carrier_size(&y)?;
        let sz = self.carrier_size(&z)?;
        let tables: Vec<Vec<usize>> = (0..n).map(|i| decode_table(i, sy, sz)).collect();
        let names = (0..n).map(|i| format!("f{}", i)).collect();
        self.funcs.insert(ty.clone(), tables);
        self.func_names.insert(ty.clone(), names);
        Ok(())
    }

    /// Size of the carrier at a type: registered carriers report their
    /// list length, everything else the full relative hierarchy size.
    pub fn carrier_size(&self, ty: &TypeExpr) -> Result<usize, HenkinError> {
        match ty {
            TypeExpr::Basic(b) => self
                .atoms
                .get(b)
                .map(|v| v.len())
                .ok_or_else(|| HenkinError::MissingCarrier { ty: b.clone() }),
            TypeExpr::Two => Ok(2),
            TypeExpr::Prod(a, b) => {
                let n = self
                    .carrier_size(a)?
                    .checked_mul(self.carrier_size(b)?)
                    .ok_or_else(|| too_large(ty))?;
                if n > MAX_CARRIER {
                    return Err(too_large(ty));
                }
                Ok(n)
            }
            TypeExpr::Exp(z, y) => {
                if let Some(tables) = self.funcs.get(ty) {
                    return Ok(tables.len());
                }
                let sz = self.carrier_size(z)?;
                let sy = self.carrier_size(y)?;
                let n = sz.checked_pow(u32::try_from(sy).map_err(|_| too_large(ty))?);
                match n {
                    Some(n) if n <= MAX_CARRIER => Ok(n),
                    _ => Err(too_large(ty)),
                }
            }
        }
    }

    /// The table of a function-typed element, relative to the domain and
    /// codomain carrier enumerations.
    pub fn table(&self, ty: &TypeExpr, idx: usize) -> Result<Vec<usize>, HenkinError> {
        let (z, y) = match ty {
            TypeExpr::Exp(z, y) => (z, y),
            _ => {
                return Err(HenkinError::UnknownElement {
                    name: format!("{}", idx),
                    ty: ty.to_string(),
                })
            }
        };
        if let Some(tables) = self.funcs.get(ty) {
            return tables.get(idx).cloned().ok_or_else(|| HenkinError::UnknownElement {
                name: format!("{}", idx),
                ty: ty.to_string(),
            });
        }
        let sy = self.carrier_size(y)?;
        let sz = self.carrier_size(z)?;
        Ok(decode_table(idx, sy, sz))
    }

    /// Looks a table up in the carrier of a function type; `None` means the
    /// function exists in the ambient hierarchy but not in the carrier.
    pub fn table_index(&self, ty: &TypeExpr, table: &[usize]) -> Result<Option<usize>, HenkinError> {
        if let Some(tables) = self.funcs.get(ty) {
            return Ok(tables.iter().position(|t| t == table));
        }
        let z = match ty {
            TypeExpr::Exp(z, _) => z,
            _ => {
                return Err(HenkinError::UnknownElement {
                    name: "table".into(),
                    ty: ty.to_string(),
                })
            }
        };
        let sz = self.carrier_size(z)?;
        let mut idx = 0usize;
        for &v in table.iter().rev() {
            idx = idx * sz + v;
        }
        Ok(Some(idx))
    }

    /// Deletes one table from a registered function carrier. Refused when
    /// the type supports other registered carriers, constants, or relation
    /// arguments, since their element indices would shift.
    pub fn remove_function(&mut self, ty: &TypeExpr, idx: usize) -> Result<(), HenkinError> {
        let edit = |detail: &str| HenkinError::CarrierEdit {
            ty: ty.to_string(),
            detail: detail.into(),
        };
        if !self.funcs.contains_key(ty) {
            return Err(HenkinError::MissingCarrier { ty: ty.to_string() });
        }
        for other in self.funcs.keys() {
            if other != ty && other.subtypes().contains(ty) {
                return Err(edit("another registered carrier depends on it"));
            }
        }
        if self.consts.values().any(|v| v.ty.subtypes().contains(ty)) {
            return Err(edit("a constant denotation depends on it"));
        }
        for args in self.signature.relations.values() {
            if args.iter().any(|a| a.subtypes().contains(ty)) {
                return Err(edit("a relation argument depends on it"));
            }
        }
        let tables = self.funcs.get_mut(ty).unwrap();
        if idx >= tables.len() {
            return Err(HenkinError::UnknownElement {
                name: format!("{}", idx),
                ty: ty.to_string(),
            });
        }
        tables.remove(idx);
        if let Some(names) = self.func_names.get_mut(ty) {
            names.remove(idx);
        }
        Ok(())
    }

    /// Reassigns a constant denotation.
    pub fn set_constant(&mut self, name: &str, v: Value) -> Result<(), HenkinError> {
        let want = self.signature.constants.get(name).cloned().ok_or_else(|| {
            HenkinError::Syntax(crate::SyntaxError::UnknownConstant { name: name.into() })
        })?;
        if v.ty != want || v.idx >= self.carrier_size(&v.ty)? {
            return Err(HenkinError::UnknownElement {
                name: name.into(),
                ty: want.to_string(),
            });
        }
        self.consts.insert(name.to_string(), v);
        Ok(())
    }

    /// Adds a tuple to a relation denotation.
    pub fn add_relation_tuple(&mut self, name: &str, tuple: Vec<usize>) -> Result<(), HenkinError> {
        let args = self.signature.relations.get(name).cloned().ok_or_else(|| {
            HenkinError::Syntax(crate::SyntaxError::UnknownRelation { name: name.into() })
        })?;
        if tuple.len() != args.len() {
            return Err(HenkinError::UnknownElement {
                name: name.into(),
                ty: "relation tuple".into(),
            });
        }
        for (v, ty) in tuple.iter().zip(&args) {
            if *v >= self.carrier_size(ty)? {
                return Err(HenkinError::UnknownElement {
                    name: format!("{}", v),
                    ty: ty.to_string(),
                });
            }
        }
        self.rels.entry(name.to_string()).or_default().insert(tuple);
        Ok(())
    }

    pub fn atom_names(&self, basic: &str) -> Option<&[String]> {
        self.atoms.get(basic).map(|v| v.as_slice())
    }

    pub fn registered_function_types(&self) -> impl Iterator<Item = &TypeExpr> {
        self.funcs.keys()
    }

    pub fn function_names(&self, ty: &TypeExpr) -> Option<&[String]> {
        self.func_names.get(ty).map(|v| v.as_slice())
    }

    pub fn function_tables(&self, ty: &TypeExpr) -> Option<&[Vec<usize>]> {
        self.funcs.get(ty).map(|v| v.as_slice())
    }

    pub fn constant(&self, name: &str) -> Option<&Value> {
        self.consts.get(name)
    }

    pub fn relation_tuples(&self, name: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.rels.get(name)
    }

    /// The printable name of an element, when its type supports names.
    pub fn element_name(&self, v: &Value) -> Option<String> {
        match &v.ty {
            TypeExpr::Basic(b) => self.atoms.get(b)?.get(v.idx).cloned(),
            TypeExpr::Two => Some(if v.idx == TT { "tt" } else { "ff" }.to_string()),
            TypeExpr::Exp(_, _) => self.func_names.get(&v.ty)?.get(v.idx).cloned(),
            TypeExpr::Prod(_, _) => None,
        }
    }

    /// The tagged disjoint union of the named carriers: basic types, `2`,
    /// and every registered function carrier.
    pub fn universe(&self) -> Universe {
        let mut elements = Vec::new();
        for b in &self.signature.basic_types {
            let ty = TypeExpr::basic(b);
            for idx in 0..self.atoms[b].len() {
                elements.push(Value::new(ty.clone(), idx));
            }
        }
        for idx in 0..2 {
            elements.push(Value::new(TypeExpr::Two, idx));
        }
        for (ty, tables) in &self.funcs {
            for idx in 0..tables.len() {
                elements.push(Value::new(ty.clone(), idx));
            }
        }
        Universe { elements }
    }
}

fn decode_table(idx: usize, sy: usize, sz: usize) -> Vec<usize> {
    let mut idx = idx;
    let mut t = Vec::with_capacity(sy);
    for _ in 0..sy {
        t.push(if sz == 0 { 0 } else { idx % sz });
        if sz > 0 {
            idx /= sz;
        }
    }
    t
}

/// The underlying set of a model: all named carrier elements with their
/// type tags.
#[derive(Debug, Clone, PartialEq)]
pub struct Universe {
    pub elements: Vec<Value>,
}

impl Universe {
    pub fn contains(&self, v: &Value) -> bool {
        self.elements.contains(v)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// An environment: carrier elements for the free variables.
pub type Env = BTreeMap<String, Value>;

fn open_binder(v: &Var, body: &Term, env: &Env) -> Result<(Var, Term), HenkinError> {
    if !env.contains_key(&v.name) {
        return Ok((v.clone(), body.clone()));
    }
    let mut taken: BTreeSet<String> = env.keys().cloned().collect();
    all_names_of(body, &mut taken);
    let nv = Var::new(&fresh_name(&v.name, &taken), v.ty.clone());
    let nb = substitute(body, &Term::Var(nv.clone()), v)?;
    Ok((nv, nb))
}

fn env_context(env: &Env) -> Result<Context, HenkinError> {
    let vars = env
        .iter()
        .map(|(name, v)| Var::new(name, v.ty.clone()))
        .collect();
    Ok(Context::new(vars)?)
}

fn bool_value(b: bool) -> Value {
    Value::new(TypeExpr::Two, if b { TT } else { FF })
}

fn as_bool(v: &Value) -> Result<bool, HenkinError> {
    if v.ty != TypeExpr::Two {
        return Err(HenkinError::Syntax(crate::SyntaxError::TypeMismatch {
            detail: format!("expected a truth value, found an element of `{}`", v.ty),
        }));
    }
    Ok(v.idx == TT)
}

/// Evaluates a term to a carrier element. A λ-abstraction denotes its
/// induced table, which must lie in the carrier of the function type —
/// otherwise the closure conditions fail and `EscapesCarrier` is raised.
pub fn eval_term(m: &GeneralModel, t: &Term, env: &mut Env) -> Result<Value, HenkinError> {
    match t {
        Term::Var(v) => env
            .get(&v.name)
            .cloned()
            .ok_or_else(|| HenkinError::UnboundVariable { name: v.name.clone() }),
        Term::Const(name) => m
            .consts
            .get(name)
            .cloned()
            .ok_or_else(|| HenkinError::Syntax(crate::SyntaxError::UnknownConstant { name: name.clone() })),
        Term::Pair(a, b) => {
            let va = eval_term(m, a, env)?;
            let vb = eval_term(m, b, env)?;
            let ty = TypeExpr::prod(va.ty.clone(), vb.ty.clone());
            m.carrier_size(&ty)?;
            let idx = va.idx * m.carrier_size(&vb.ty)? + vb.idx;
            Ok(Value::new(ty, idx))
        }
        Term::Proj1(p) | Term::Proj2(p) => {
            let v = eval_term(m, p, env)?;
            let (a, b) = match &v.ty {
                TypeExpr::Prod(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                other => {
                    return Err(HenkinError::Syntax(crate::SyntaxError::TypeMismatch {
                        detail: format!("projection from non-product `{}`", other),
                    }))
                }
            };
            let sb = m.carrier_size(&b)?;
            Ok(match t {
                Term::Proj1(_) => Value::new(a, v.idx / sb),
                _ => Value::new(b, v.idx % sb),
            })
        }
        Term::Lambda(v, body) => {
            let ctx = env_context(env)?;
            let ty = typecheck(t, &ctx, &m.signature)?;
            let z = match &ty {
                TypeExpr::Exp(z, _) => z.as_ref().clone(),
                _ => unreachable!("lambda has function type"),
            };
            let (v, body) = open_binder(v, body, env)?;
            let sy = m.carrier_size(&v.ty)?;
            let sz = m.carrier_size(&z)?;
            let mut table = Vec::with_capacity(sy);
            for a in 0..sy {
                env.insert(v.name.clone(), Value::new(v.ty.clone(), a));
                let r = eval_term(m, &body, env);
                env.remove(&v.name);
                let r = r?;
                debug_assert!(r.ty == z && r.idx < sz);
                table.push(r.idx);
            }
            match m.table_index(&ty, &table)? {
                Some(idx) => Ok(Value::new(ty, idx)),
                None => Err(HenkinError::EscapesCarrier { term: print_term(t) }),
            }
        }
        Term::App(f, a) => {
            let vf = eval_term(m, f, env)?;
            let va = eval_term(m, a, env)?;
            let z = match &vf.ty {
                TypeExpr::Exp(z, y) if y.as_ref() == &va.ty => z.as_ref().clone(),
                other => {
                    return Err(HenkinError::Syntax(crate::SyntaxError::TypeMismatch {
                        detail: format!("cannot apply an element of `{}`", other),
                    }))
                }
            };
            let table = m.table(&vf.ty, vf.idx)?;
            Ok(Value::new(z, table[va.idx]))
        }
        Term::Eq(a, b) => {
            let va = eval_term(m, a, env)?;
            let vb = eval_term(m, b, env)?;
            Ok(bool_value(va == vb))
        }
        Term::Top => Ok(bool_value(true)),
        Term::Bot => Ok(bool_value(false)),
        Term::Not(p) => {
            let v = eval_term(m, p, env)?;
            Ok(bool_value(!as_bool(&v)?))
        }
        Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
            let va = as_bool(&eval_term(m, a, env)?)?;
            let vb = as_bool(&eval_term(m, b, env)?)?;
            Ok(bool_value(match t {
                Term::And(_, _) => va && vb,
                Term::Or(_, _) => va || vb,
                _ => !va || vb,
            }))
        }
        Term::Forall(v, body) | Term::Exists(v, body) => {
            let forall = matches!(t, Term::Forall(_, _));
            let (v, body) = open_binder(v, body, env)?;
            let n = m.carrier_size(&v.ty)?;
            let mut acc = forall;
            for a in 0..n {
                env.insert(v.name.clone(), Value::new(v.ty.clone(), a));
                let r = eval_term(m, &body, env);
                env.remove(&v.name);
                let b = as_bool(&r?)?;
                if forall {
                    acc &= b;
                } else {
                    acc |= b;
                }
                if acc != forall {
                    break;
                }
            }
            Ok(bool_value(acc))
        }
        Term::RelApp(name, args) => {
            let tuples = m.rels.get(name).cloned().unwrap_or_default();
            if !m.signature.relations.contains_key(name) {
                return Err(HenkinError::Syntax(crate::SyntaxError::UnknownRelation {
                    name: name.clone(),
                }));
            }
            let mut tup = Vec::with_capacity(args.len());
            for a in args {
                tup.push(eval_term(m, a, env)?.idx);
            }
            Ok(bool_value(tuples.contains(&tup)))
        }
    }
}

/// Tarski-style satisfaction: evaluates a formula to a truth value,
/// reporting a closure failure if a λ-abstraction denotes a function
/// missing from its carrier.
pub fn henkin_satisfies(m: &GeneralModel, phi: &Term, env: &Env) -> Result<bool, HenkinError> {
    let mut env = env.clone();
    let v = eval_term(m, phi, &mut env)?;
    as_bool(&v)
}

/// Outcome of a closure check.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosureVerdict {
    Valid,
    /// A witness term whose denotation escapes its carrier under some
    /// environment.
    Invalid { term: Term },
}

/// Checks the closure conditions against an explicit witness term set:
/// every witness must denote inside its carrier under every assignment of
/// carrier elements to its free variables.
pub fn check_closure(m: &GeneralModel, witnesses: &[Term]) -> Result<ClosureVerdict, HenkinError> {
    for term in witnesses {
        let fvs: Vec<Var> = free_vars(term).into_iter().collect();
        let mut sizes = Vec::with_capacity(fvs.len());
        for v in &fvs {
            sizes.push(m.carrier_size(&v.ty)?);
        }
        let mut choice = vec![0usize; fvs.len()];
        loop {
            if sizes.iter().all(|&s| s > 0) {
                let mut env: Env = fvs
                    .iter()
                    .zip(&choice)
                    .map(|(v, &a)| (v.name.clone(), Value::new(v.ty.clone(), a)))
                    .collect();
                match eval_term(m, term, &mut env) {
                    Ok(_) => {}
                    Err(HenkinError::EscapesCarrier { .. }) => {
                        return Ok(ClosureVerdict::Invalid { term: term.clone() })
                    }
                    Err(e) => return Err(e),
                }
            }
            // Odometer over environments; an empty variable list runs once.
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < sizes[k] {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    Ok(ClosureVerdict::Valid)
}

/// The finite-fragment contrapositive of sufficiency: every sentence the
/// caller marks as non-provable must be refuted by some model in the set.
/// Models whose evaluation errors out cannot refute anything.
pub fn is_sufficient(models: &[GeneralModel], sentences: &[Term], provable: &[bool]) -> bool {
    sentences.iter().zip(provable).all(|(sigma, &p)| {
        p || models
            .iter()
            .any(|m| henkin_satisfies(m, sigma, &Env::new()) == Ok(false))
    })
}

/// A finite partial map from naturals to universe elements. Finite
/// labelings approximate germs of the real points; no infinite-fiber
/// condition is meaningful here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Labeling {
    map: BTreeMap<usize, Value>,
}

impl Labeling {
    pub fn new() -> Labeling {
        Labeling::default()
    }

    pub fn assign(&mut self, n: usize, v: Value) {
        self.map.insert(n, v);
    }

    pub fn get(&self, n: usize) -> Option<&Value> {
        self.map.get(&n)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }
}

/// A labeled model: one prospective point of the classifying space.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub model: GeneralModel,
    pub labeling: Labeling,
}

impl LabeledPoint {
    /// Validates that every label value lies in the model's carriers.
    pub fn new(model: GeneralModel, labeling: Labeling) -> Result<LabeledPoint, HenkinError> {
        for n in labeling.domain() {
            let v = labeling.get(n).unwrap();
            if v.idx >= model.carrier_size(&v.ty)? {
                return Err(HenkinError::UnknownElement {
                    name: format!("label {}", n),
                    ty: v.ty.to_string(),
                });
            }
        }
        Ok(LabeledPoint { model, labeling })
    }
}

/// Membership in the basic open determined by a formula and a label tuple:
/// every label must be defined with the type of the matching free variable
/// (free variables taken in name order), and the model must satisfy the
/// formula at the labeled elements.
pub fn in_basic_open(pt: &LabeledPoint, phi: &Term, ns: &[usize]) -> Result<bool, HenkinError> {
    let fvs: Vec<Var> = free_vars(phi).into_iter().collect();
    if fvs.len() != ns.len() {
        return Err(HenkinError::Syntax(crate::SyntaxError::TypeMismatch {
            detail: format!(
                "formula has {} free variables but the label tuple has {}",
                fvs.len(),
                ns.len()
            ),
        }));
    }
    let mut env = Env::new();
    for (v, &n) in fvs.iter().zip(ns) {
        match pt.labeling.get(n) {
            Some(val) if val.ty == v.ty => {
                env.insert(v.name.clone(), val.clone());
            }
            _ => return Ok(false),
        }
    }
    henkin_satisfies(&pt.model, phi, &env)
}

/// The finite restriction of a fibered set: the disjoint union of the
/// `z`-carriers over a point list, topologized by preimages of base opens
/// together with the label sections `V_n` and index sections through every
/// element, so that the projection is a local homeomorphism.
#[derive(Debug, Clone)]
pub struct PhiFiber {
    /// Total space, base space on the point list, and the projection.
    pub etale: EtaleSpace,
    /// Total point index to (base point, carrier element).
    pub elems: Vec<(usize, usize)>,
    /// The label sections `V_n` as subsets of the total space.
    pub sections: BTreeMap<usize, PointSet>,
}

pub fn phi_fiber(points: &[LabeledPoint], z: &TypeExpr) -> Result<PhiFiber, HenkinError> {
    let sizes: Vec<usize> = points
        .iter()
        .map(|pt| pt.model.carrier_size(z))
        .collect::<Result<_, _>>()?;
    let total_n: usize = sizes.iter().sum();
    if points.len() > 16 || total_n >= 64 {
        return Err(too_large(z));
    }
    let mut elems = Vec::with_capacity(total_n);
    let mut names = Vec::with_capacity(total_n);
    for (i, &s) in sizes.iter().enumerate() {
        for a in 0..s {
            elems.push((i, a));
            names.push(format!("m{}.{}", i, a));
        }
    }
    let base_names: Vec<String> = (0..points.len()).map(|i| format!("m{}", i)).collect();
    let label_dom: BTreeSet<usize> = points.iter().flat_map(|pt| pt.labeling.domain()).collect();
    // Base subbasis: carrier-size opens (from the distinct-elements
    // sentences), label-definedness opens, and exact-label opens. The
    // last family mirrors the index sections below so that the generated
    // topology makes the projection a local homeomorphism.
    let mut base_sub: Vec<PointSet> = vec![crate::finspace::full_mask(points.len())];
    let max_size = sizes.iter().copied().max().unwrap_or(0);
    for k in 1..=max_size {
        let mut mask: PointSet = 0;
        for (i, &s) in sizes.iter().enumerate() {
            if s >= k {
                mask |= 1 << i;
            }
        }
        base_sub.push(mask);
    }
    for &n in &label_dom {
        let tys: BTreeSet<TypeExpr> = points
            .iter()
            .filter_map(|pt| pt.labeling.get(n).map(|v| v.ty.clone()))
            .collect();
        for ty in tys {
            let mut mask: PointSet = 0;
            for (i, pt) in points.iter().enumerate() {
                if pt.labeling.get(n).is_some_and(|v| v.ty == ty) {
                    mask |= 1 << i;
                }
            }
            base_sub.push(mask);
        }
        for a in 0..max_size {
            let mut mask: PointSet = 0;
            for (i, pt) in points.iter().enumerate() {
                if pt.labeling.get(n) == Some(&Value::new(z.clone(), a)) {
                    mask |= 1 << i;
                }
            }
            if mask != 0 {
                base_sub.push(mask);
            }
        }
    }
    let base = FinSpace::from_subbasis_masks(base_names, &base_sub);
    let mut total_sub: Vec<PointSet> = Vec::new();
    for u in &base_sub {
        let mut mask: PointSet = 0;
        for (t, &(i, _)) in elems.iter().enumerate() {
            if u & (1 << i) != 0 {
                mask |= 1 << t;
            }
        }
        total_sub.push(mask);
    }
    // Index sections: the elements with a fixed carrier index, one section
    // through every total point.
    for a in 0..max_size {
        let mut mask: PointSet = 0;
        for (t, &(_, b)) in elems.iter().enumerate() {
            if b == a {
                mask |= 1 << t;
            }
        }
        total_sub.push(mask);
    }
    let mut sections = BTreeMap::new();
    for &n in &label_dom {
        let mut mask: PointSet = 0;
        for (t, &(i, a)) in elems.iter().enumerate() {
            if points[i].labeling.get(n) == Some(&Value::new(z.clone(), a)) {
                mask |= 1 << t;
            }
        }
        sections.insert(n, mask);
        total_sub.push(mask);
    }
    let total = FinSpace::from_subbasis_masks(names, &total_sub);
    let map: Vec<usize> = elems.iter().map(|&(i, _)| i).collect();
    let proj = crate::finspace::ContinuousMap::new(total, base.clone(), map);
    let etale = EtaleSpace {
        total: proj.source.clone(),
        base,
        proj,
    };
    Ok(PhiFiber {
        etale,
        elems,
        sections,
    })
}

/// Rebuilds the model at a point from its fibers: carrier extents are read
/// off the fibers of every registered type, everything else is the germ
/// data carried along with them. Equality with the original model is the
/// advertised identity.
pub fn stalk_is_model(points: &[LabeledPoint], pt: usize) -> Result<GeneralModel, HenkinError> {
    let src = &points[pt].model;
    let fiber_size = |ty: &TypeExpr| -> Result<usize, HenkinError> {
        let fiber = phi_fiber(points, ty)?;
        Ok(fiber.elems.iter().filter(|&&(i, _)| i == pt).count())
    };
    let mut atoms = BTreeMap::new();
    for b in &src.signature.basic_types {
        let n = fiber_size(&TypeExpr::basic(b))?;
        atoms.insert(b.clone(), src.atoms[b][..n].to_vec());
    }
    let mut funcs = BTreeMap::new();
    let mut func_names = BTreeMap::new();
    for ty in src.funcs.keys() {
        let n = fiber_size(ty)?;
        funcs.insert(ty.clone(), src.funcs[ty][..n].to_vec());
        func_names.insert(ty.clone(), src.func_names[ty][..n].to_vec());
    }
    GeneralModel::new(
        src.signature.clone(),
        atoms,
        funcs,
        func_names,
        src.consts.clone(),
        src.rels.clone(),
    )
}

#[cfg(test)]
mod tests;
