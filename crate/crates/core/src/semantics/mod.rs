//! Sheaf-valued semantics over a finite base space: classical semantics
//! valued in 1+1 (requiring decidable type interpretations) and
//! intuitionistic subobject semantics valued in Ω, plus model checking,
//! countermodel search and bounded definability search.

mod file;
mod search;

pub use file::{format_interpretation, model_space_ref, parse_model};
pub use search::{
    enumerate_interpretations, enumerate_sheaves, find_defining_formula, graph_subsheaf,
    random_interpretation, search_countermodel, spaces_up_to_homeo, SearchBounds,
};

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::SemanticsError;
use crate::finspace::FinSpace;
use crate::sheaf::{
    bar_factor, classify, complement, diagonal, eval_morphism, exponential, forall_along,
    heyting_implies, heyting_join, heyting_meet, is_decidable, omega, pairing, product,
    proj1_morphism, proj2_morphism, pullback_along, transpose, exists_along, Exponential, Omega,
    Sheaf, SheafMorphism, Subsheaf,
};
use crate::syntax::{
    compile_to_primitive_basis, fresh_name, substitute, typecheck, Context, Formula, Mode,
    Signature, Term, Theory, TypeExpr, Var,
};

/// Which truth-value object interprets formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Formulas valued in 1+1; every type interpretation must be decidable.
    ClassicalC,
    /// Formulas valued as subsheaves (equivalently, maps into Ω).
    OmegaIntuitionistic,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::ClassicalC => "classical-c",
            Flavor::OmegaIntuitionistic => "omega",
        }
    }

    pub fn parse(s: &str) -> Option<Flavor> {
        match s {
            "classical-c" => Some(Flavor::ClassicalC),
            "omega" | "omega-intuitionistic" => Some(Flavor::OmegaIntuitionistic),
            _ => None,
        }
    }
}

/// Largest permitted stalk of an interpreted type; bounded by the subsheaf
/// bitmask width.
pub const MAX_STALK: usize = 128;

/// An interpretation of a theory in sheaves over a finite space.
///
/// Basic types are assigned sheaves, constants global sections of their
/// type's interpretation, relation symbols subsheaves of the product of
/// their argument interpretations. Composite types are interpreted by
/// products, exponentials and (classically) 1+1 for the type of formulas.
#[derive(Debug, Clone)]
pub struct Interpretation {
    pub theory: Theory,
    pub base: FinSpace,
    pub flavor: Flavor,
    basic: BTreeMap<String, Sheaf>,
    consts: BTreeMap<String, SheafMorphism>,
    rels: BTreeMap<String, Subsheaf>,
    type_memo: RefCell<BTreeMap<TypeExpr, Sheaf>>,
    exp_memo: RefCell<BTreeMap<TypeExpr, Exponential>>,
    omega_memo: RefCell<Option<Omega>>,
}

/// Interprets a type given just the basic-type assignment; the memoized
/// `Interpretation::interpret_type` delegates here.
pub fn interpret_type_in(
    basic: &BTreeMap<String, Sheaf>,
    base: &FinSpace,
    ty: &TypeExpr,
) -> Result<Sheaf, SemanticsError> {
    match ty {
        TypeExpr::Basic(n) => basic
            .get(n)
            .cloned()
            .ok_or_else(|| SemanticsError::UnknownBasicType { name: n.clone() }),
        TypeExpr::Two => Ok(Sheaf::constant(base.clone(), 2)),
        TypeExpr::Prod(l, r) => {
            let lm = interpret_type_in(basic, base, l)?;
            let rm = interpret_type_in(basic, base, r)?;
            guard_size(ty, product(&lm, &rm)?)
        }
        TypeExpr::Exp(z, y) => {
            let zm = interpret_type_in(basic, base, z)?;
            let ym = interpret_type_in(basic, base, y)?;
            guard_exponent(ty, &zm, &ym)?;
            guard_size(ty, exponential(&zm, &ym)?.sheaf)
        }
    }
}

/// Subsheaf element masks cap stalks at 128; anything wider must be
/// reported as an error before a mask is built.
fn guard_mask_width(f: Sheaf) -> Result<Sheaf, SemanticsError> {
    match f.sizes().iter().max() {
        Some(&m) if m > 128 => Err(SemanticsError::StalkTooLarge {
            ty: "context product".into(),
            bound: 128,
        }),
        _ => Ok(f),
    }
}

/// The diagonal of Z lives in Z×Z, whose stalks must still fit a mask.
fn guard_diag_width(ty: &TypeExpr, f: Sheaf) -> Result<Sheaf, SemanticsError> {
    if f.sizes().iter().any(|&n| n * n > 128) {
        return Err(SemanticsError::StalkTooLarge {
            ty: TypeExpr::prod(ty.clone(), ty.clone()).to_string(),
            bound: 128,
        });
    }
    Ok(f)
}

fn guard_size(ty: &TypeExpr, f: Sheaf) -> Result<Sheaf, SemanticsError> {
    match f.sizes().iter().max() {
        Some(&m) if m > MAX_STALK => Err(SemanticsError::StalkTooLarge {
            ty: ty.to_string(),
            bound: m,
        }),
        _ => Ok(f),
    }
}

/// Bounds the stalk count of `Z^Y` before enumerating it: the stalk at p
/// is at most ∏_{q ∈ ↑p} |Z_q|^|Y_q|.
fn guard_exponent(ty: &TypeExpr, zm: &Sheaf, ym: &Sheaf) -> Result<(), SemanticsError> {
    let base = zm.base();
    for p in 0..base.len() {
        let mut bound: u128 = 1;
        for q in crate::finspace::points_of(base.min_open(p)) {
            let cell = (zm.size(q) as u128).saturating_pow(ym.size(q) as u32);
            bound = bound.saturating_mul(cell);
            if bound > 1_000_000 {
                return Err(SemanticsError::StalkTooLarge {
                    ty: ty.to_string(),
                    bound: 1_000_000,
                });
            }
        }
    }
    Ok(())
}

/// The unique morphism to the terminal sheaf.
fn bang(f: &Sheaf) -> SheafMorphism {
    SheafMorphism {
        source: f.clone(),
        target: Sheaf::terminal(f.base().clone()),
        maps: f.sizes().iter().map(|&n| vec![0; n]).collect(),
    }
}

/// A context shadowed left-to-right (later bindings win), for typechecking
/// under reused binder names.
fn scope_ctx(scope: &[Var]) -> Context {
    let mut vars: Vec<Var> = Vec::new();
    for v in scope {
        vars.retain(|w| w.name != v.name);
        vars.push(v.clone());
    }
    Context::new(vars).unwrap()
}

/// Every type whose interpretation evaluation can touch: the type of each
/// typeable subterm, plus binder annotations, with all their subtypes.
fn collect_types(t: &Term, scope: &mut Vec<Var>, sig: &Signature, out: &mut BTreeSet<TypeExpr>) {
    if let Ok(ty) = typecheck(t, &scope_ctx(scope), sig) {
        out.extend(ty.subtypes());
    }
    match t {
        Term::Lambda(v, b) | Term::Forall(v, b) | Term::Exists(v, b) => {
            out.extend(v.ty.subtypes());
            scope.push(v.clone());
            collect_types(b, scope, sig, out);
            scope.pop();
        }
        Term::Var(v) => out.extend(v.ty.subtypes()),
        Term::Const(_) | Term::Top | Term::Bot => {}
        Term::Pair(a, b)
        | Term::App(a, b)
        | Term::Eq(a, b)
        | Term::And(a, b)
        | Term::Or(a, b)
        | Term::Implies(a, b) => {
            collect_types(a, scope, sig, out);
            collect_types(b, scope, sig, out);
        }
        Term::Proj1(a) | Term::Proj2(a) | Term::Not(a) => collect_types(a, scope, sig, out),
        Term::RelApp(_, args) => {
            for a in args {
                collect_types(a, scope, sig, out);
            }
        }
    }
}

/// All types the eager decidability check must cover.
pub fn reachable_types(thy: &Theory) -> BTreeSet<TypeExpr> {
    let sig = &thy.signature;
    let mut out = BTreeSet::new();
    for b in &sig.basic_types {
        out.insert(TypeExpr::basic(b));
    }
    if sig.mode.is_hol() {
        out.insert(TypeExpr::Two);
    }
    for ty in sig.constants.values() {
        out.extend(ty.subtypes());
    }
    for args in sig.relations.values() {
        for a in args {
            out.extend(a.subtypes());
        }
    }
    for ax in &thy.axioms {
        collect_types(ax, &mut Vec::new(), sig, &mut out);
    }
    out
}

impl Interpretation {
    /// Validates the assignment: sheaves over the common base, constants
    /// as global sections of their type, relations as subsheaves of their
    /// argument product; under the classical flavor, every reachable type
    /// must be interpreted by a decidable sheaf.
    pub fn new(
        theory: Theory,
        base: FinSpace,
        flavor: Flavor,
        basic: BTreeMap<String, Sheaf>,
        consts: BTreeMap<String, SheafMorphism>,
        rels: BTreeMap<String, Subsheaf>,
    ) -> Result<Interpretation, SemanticsError> {
        let sig = &theory.signature;
        if flavor == Flavor::OmegaIntuitionistic && sig.mode != Mode::Lambda {
            return Err(SemanticsError::FlavorMismatch {
                detail: format!("subobject semantics does not fit mode {}", sig.mode),
            });
        }
        for b in &sig.basic_types {
            let sheaf = basic
                .get(b)
                .ok_or_else(|| SemanticsError::UnknownBasicType { name: b.clone() })?;
            if sheaf.base() != &base {
                return Err(SemanticsError::Sheaf(crate::error::SheafError::BaseMismatch));
            }
        }
        for (name, ty) in &sig.constants {
            let sec = consts.get(name).ok_or_else(|| SemanticsError::ModelFile {
                detail: format!("constant `{}` has no assigned section", name),
            })?;
            let target = interpret_type_in(&basic, &base, ty)?;
            if sec.source != Sheaf::terminal(base.clone()) || sec.target != target {
                return Err(SemanticsError::ModelFile {
                    detail: format!("section for `{}` is not a global section of its type", name),
                });
            }
        }
        for (name, args) in &sig.relations {
            let sub = rels.get(name).ok_or_else(|| SemanticsError::UnknownRelation {
                name: name.clone(),
            })?;
            let mut parent = Sheaf::terminal(base.clone());
            for a in args {
                parent = product(&parent, &interpret_type_in(&basic, &base, a)?)?;
            }
            if sub.parent != parent {
                return Err(SemanticsError::ModelFile {
                    detail: format!("relation `{}` is not a subsheaf of its argument product", name),
                });
            }
        }
        let m = Interpretation {
            theory,
            base,
            flavor,
            basic,
            consts,
            rels,
            type_memo: RefCell::new(BTreeMap::new()),
            exp_memo: RefCell::new(BTreeMap::new()),
            omega_memo: RefCell::new(None),
        };
        if flavor == Flavor::ClassicalC {
            for ty in reachable_types(&m.theory) {
                if !is_decidable(&m.interpret_type(&ty)?) {
                    return Err(SemanticsError::NotDecidable { ty: ty.to_string() });
                }
            }
            // 1+1-valued relation symbols must have complemented graphs.
            for (name, sub) in &m.rels {
                if complement(sub).is_none() {
                    return Err(SemanticsError::FlavorMismatch {
                        detail: format!("relation `{}` is not complemented", name),
                    });
                }
            }
        }
        Ok(m)
    }

    pub fn basic_sheaf(&self, name: &str) -> Option<&Sheaf> {
        self.basic.get(name)
    }

    pub fn constant_section(&self, name: &str) -> Option<&SheafMorphism> {
        self.consts.get(name)
    }

    pub fn relation_subsheaf(&self, name: &str) -> Option<&Subsheaf> {
        self.rels.get(name)
    }

    /// The sheaf interpreting a type; memoized.
    pub fn interpret_type(&self, ty: &TypeExpr) -> Result<Sheaf, SemanticsError> {
        if let Some(f) = self.type_memo.borrow().get(ty) {
            return Ok(f.clone());
        }
        let f = interpret_type_in(&self.basic, &self.base, ty)?;
        self.type_memo.borrow_mut().insert(ty.clone(), f.clone());
        Ok(f)
    }

    fn exponential_of(&self, z: &TypeExpr, y: &TypeExpr) -> Result<Exponential, SemanticsError> {
        let key = TypeExpr::exp(z.clone(), y.clone());
        if let Some(e) = self.exp_memo.borrow().get(&key) {
            return Ok(e.clone());
        }
        let zm = self.interpret_type(z)?;
        let ym = self.interpret_type(y)?;
        guard_exponent(&key, &zm, &ym)?;
        let ex = exponential(&zm, &ym)?;
        guard_size(&key, ex.sheaf.clone())?;
        self.exp_memo.borrow_mut().insert(key, ex.clone());
        Ok(ex)
    }

    fn omega(&self) -> Omega {
        if let Some(om) = self.omega_memo.borrow().as_ref() {
            return om.clone();
        }
        let om = omega(&self.base);
        *self.omega_memo.borrow_mut() = Some(om.clone());
        om
    }

    /// The interpretation of a context: the left-nested product of its
    /// variable types over the terminal sheaf.
    pub fn ctx_sheaf(&self, ctx: &Context) -> Result<Sheaf, SemanticsError> {
        let mut s = Sheaf::terminal(self.base.clone());
        for v in ctx.vars() {
            s = product(&s, &self.interpret_type(&v.ty)?)?;
        }
        Ok(s)
    }

    fn var_morphism(&self, ctx: &Context, v: &Var) -> Result<SheafMorphism, SemanticsError> {
        let vars = ctx.vars();
        let i = vars
            .iter()
            .position(|w| w.name == v.name)
            .ok_or_else(|| SemanticsError::Syntax(crate::error::SyntaxError::UnboundVariable {
                name: v.name.clone(),
            }))?;
        let mut stages = vec![Sheaf::terminal(self.base.clone())];
        for w in vars {
            let next = product(stages.last().unwrap(), &self.interpret_type(&w.ty)?)?;
            stages.push(next);
        }
        let mut m = SheafMorphism::identity(&stages[vars.len()]);
        for k in ((i + 1)..vars.len()).rev() {
            m = m.then(&proj1_morphism(&stages[k], &self.interpret_type(&vars[k].ty)?));
        }
        Ok(m.then(&proj2_morphism(&stages[i], &self.interpret_type(&vars[i].ty)?)))
    }

    /// The 1+1-valued equality map for a type, factored through the
    /// classifier of the diagonal.
    fn eq_bar(&self, ty: &TypeExpr) -> Result<SheafMorphism, SemanticsError> {
        let zm = guard_diag_width(ty, self.interpret_type(ty)?)?;
        let om = self.omega();
        let chi = classify(&diagonal(&zm), &om);
        bar_factor(&chi, &om).ok_or_else(|| SemanticsError::NotDecidable { ty: ty.to_string() })
    }

    fn freshen(&self, v: &Var, body: &Term, ctx: &Context) -> Result<(Var, Term), SemanticsError> {
        if ctx.lookup(&v.name).is_none() {
            return Ok((v.clone(), body.clone()));
        }
        let mut taken: BTreeSet<String> = ctx.vars().iter().map(|w| w.name.clone()).collect();
        taken.insert(v.name.clone());
        let fresh = Var::new(&fresh_name(&v.name, &taken), v.ty.clone());
        let renamed = substitute(body, &Term::Var(fresh.clone()), v)
            .map_err(SemanticsError::Syntax)?;
        Ok((fresh, renamed))
    }

    fn term_raw(&self, t: &Term, ctx: &Context) -> Result<SheafMorphism, SemanticsError> {
        let sig = &self.theory.signature;
        let c = self.ctx_sheaf(ctx)?;
        match t {
            Term::Var(v) => self.var_morphism(ctx, v),
            Term::Const(name) => {
                let sec = self.consts.get(name).ok_or_else(|| SemanticsError::ModelFile {
                    detail: format!("constant `{}` has no assigned section", name),
                })?;
                Ok(bang(&c).then(sec))
            }
            Term::Pair(a, b) => Ok(pairing(&self.term_raw(a, ctx)?, &self.term_raw(b, ctx)?)),
            Term::Proj1(a) => {
                let TypeExpr::Prod(l, r) = typecheck(a, ctx, sig)? else {
                    unreachable!("typechecked projection")
                };
                let (lm, rm) = (self.interpret_type(&l)?, self.interpret_type(&r)?);
                Ok(self.term_raw(a, ctx)?.then(&proj1_morphism(&lm, &rm)))
            }
            Term::Proj2(a) => {
                let TypeExpr::Prod(l, r) = typecheck(a, ctx, sig)? else {
                    unreachable!("typechecked projection")
                };
                let (lm, rm) = (self.interpret_type(&l)?, self.interpret_type(&r)?);
                Ok(self.term_raw(a, ctx)?.then(&proj2_morphism(&lm, &rm)))
            }
            Term::Lambda(v, body) => {
                let (v, body) = self.freshen(v, body, ctx)?;
                let inner = ctx.extend(v.clone()).map_err(SemanticsError::Syntax)?;
                let h = self.term_raw(&body, &inner)?;
                let z = typecheck(&body, &inner, sig)?;
                let ex = self.exponential_of(&z, &v.ty)?;
                Ok(transpose(&h, &c, &self.interpret_type(&v.ty)?, &ex))
            }
            Term::App(f, a) => {
                let TypeExpr::Exp(z, y) = typecheck(f, ctx, sig)? else {
                    unreachable!("typechecked application")
                };
                let ex = self.exponential_of(&z, &y)?;
                let zm = self.interpret_type(&z)?;
                let ym = self.interpret_type(&y)?;
                let pair = pairing(&self.term_raw(f, ctx)?, &self.term_raw(a, ctx)?);
                Ok(pair.then(&eval_morphism(&ex, &zm, &ym)))
            }
            Term::Eq(a, b) => {
                let ty = typecheck(a, ctx, sig)?;
                let bar = self.eq_bar(&ty)?;
                Ok(pairing(&self.term_raw(a, ctx)?, &self.term_raw(b, ctx)?).then(&bar))
            }
            Term::Top | Term::Bot => {
                let two = self.interpret_type(&TypeExpr::Two)?;
                let v = if *t == Term::Top { 0 } else { 1 };
                let maps = c.sizes().iter().map(|&n| vec![v; n]).collect();
                Ok(SheafMorphism {
                    source: c,
                    target: two,
                    maps,
                })
            }
            _ => Err(SemanticsError::FlavorMismatch {
                detail: format!("`{}` is not a term of the classical fragment", t),
            }),
        }
    }

    /// Hands back the morphism interpreting a well-typed term over the
    /// product of the context interpretations. Classical formulas are
    /// compiled to the pairing/equality primitive basis first.
    pub fn interpret_term(&self, t: &Term, ctx: &Context) -> Result<SheafMorphism, SemanticsError> {
        let t = if self.flavor == Flavor::ClassicalC && self.theory.signature.mode.is_hol() {
            compile_to_primitive_basis(t, ctx, &self.theory.signature)?
        } else {
            t.clone()
        };
        self.term_raw(&t, ctx)
    }

    /// The subsheaf of the context product where an intuitionistic formula
    /// holds, computed by the Heyting operations and the quantifier
    /// adjoints stalkwise up the specialization order.
    pub fn interpret_formula_omega(
        &self,
        phi: &Formula,
        ctx: &Context,
    ) -> Result<Subsheaf, SemanticsError> {
        if self.flavor != Flavor::OmegaIntuitionistic {
            return Err(SemanticsError::FlavorMismatch {
                detail: "subobject semantics requires the omega flavor".into(),
            });
        }
        let c = guard_mask_width(self.ctx_sheaf(ctx)?)?;
        match phi {
            Term::Top => Ok(Subsheaf::whole(&c)),
            Term::Bot => Ok(Subsheaf::bottom(&c)),
            Term::Not(a) => Ok(crate::sheaf::heyting_neg(&self.interpret_formula_omega(a, ctx)?)),
            Term::And(a, b) => Ok(heyting_meet(
                &self.interpret_formula_omega(a, ctx)?,
                &self.interpret_formula_omega(b, ctx)?,
            )?),
            Term::Or(a, b) => Ok(heyting_join(
                &self.interpret_formula_omega(a, ctx)?,
                &self.interpret_formula_omega(b, ctx)?,
            )?),
            Term::Implies(a, b) => Ok(heyting_implies(
                &self.interpret_formula_omega(a, ctx)?,
                &self.interpret_formula_omega(b, ctx)?,
            )?),
            Term::Eq(a, b) => {
                let ty = typecheck(a, ctx, &self.theory.signature)?;
                let zm = guard_diag_width(&ty, self.interpret_type(&ty)?)?;
                let m = pairing(&self.term_raw(a, ctx)?, &self.term_raw(b, ctx)?);
                debug_assert_eq!(m.target, product(&zm, &zm)?);
                Ok(pullback_along(&m, &diagonal(&zm)))
            }
            Term::RelApp(name, args) => {
                let sub = self.rels.get(name).ok_or_else(|| SemanticsError::UnknownRelation {
                    name: name.clone(),
                })?;
                let mut m = bang(&c);
                for a in args {
                    m = pairing(&m, &self.term_raw(a, ctx)?);
                }
                Ok(pullback_along(&m, sub))
            }
            Term::Forall(v, body) => {
                let (v, body) = self.freshen(v, body, ctx)?;
                let inner = ctx.extend(v.clone()).map_err(SemanticsError::Syntax)?;
                let s = self.interpret_formula_omega(&body, &inner)?;
                Ok(forall_along(&s, &c, &self.interpret_type(&v.ty)?))
            }
            Term::Exists(v, body) => {
                let (v, body) = self.freshen(v, body, ctx)?;
                let inner = ctx.extend(v.clone()).map_err(SemanticsError::Syntax)?;
                let s = self.interpret_formula_omega(&body, &inner)?;
                Ok(exists_along(&s, &c, &self.interpret_type(&v.ty)?))
            }
            _ => Err(SemanticsError::FlavorMismatch {
                detail: format!("`{}` is not a formula of the lambda fragment", phi),
            }),
        }
    }

    /// Classical evaluation of a lambda-mode formula: truth values must be
    /// complemented subsheaves (two-valued componentwise), with the
    /// quantifiers read through the double-complement prenex forms.
    fn classical_lambda_subsheaf(
        &self,
        phi: &Formula,
        ctx: &Context,
    ) -> Result<Subsheaf, SemanticsError> {
        let comp = |s: &Subsheaf, phi: &Formula| {
            complement(s).ok_or_else(|| SemanticsError::FlavorMismatch {
                detail: format!("`{}` has no two-valued truth value here", phi),
            })
        };
        let c = guard_mask_width(self.ctx_sheaf(ctx)?)?;
        match phi {
            Term::Top => Ok(Subsheaf::whole(&c)),
            Term::Bot => Ok(Subsheaf::bottom(&c)),
            Term::Not(a) => {
                let s = self.classical_lambda_subsheaf(a, ctx)?;
                comp(&s, phi)
            }
            Term::And(a, b) => Ok(heyting_meet(
                &self.classical_lambda_subsheaf(a, ctx)?,
                &self.classical_lambda_subsheaf(b, ctx)?,
            )?),
            Term::Or(a, b) => Ok(heyting_join(
                &self.classical_lambda_subsheaf(a, ctx)?,
                &self.classical_lambda_subsheaf(b, ctx)?,
            )?),
            Term::Implies(a, b) => {
                let na = comp(&self.classical_lambda_subsheaf(a, ctx)?, phi)?;
                Ok(heyting_join(&na, &self.classical_lambda_subsheaf(b, ctx)?)?)
            }
            Term::Eq(a, b) => {
                let ty = typecheck(a, ctx, &self.theory.signature)?;
                let zm = guard_diag_width(&ty, self.interpret_type(&ty)?)?;
                let m = pairing(&self.term_raw(a, ctx)?, &self.term_raw(b, ctx)?);
                Ok(pullback_along(&m, &diagonal(&zm)))
            }
            Term::RelApp(name, args) => {
                let sub = self.rels.get(name).ok_or_else(|| SemanticsError::UnknownRelation {
                    name: name.clone(),
                })?;
                let mut m = bang(&c);
                for a in args {
                    m = pairing(&m, &self.term_raw(a, ctx)?);
                }
                Ok(pullback_along(&m, sub))
            }
            Term::Exists(v, body) => {
                let (v, body) = self.freshen(v, body, ctx)?;
                let inner = ctx.extend(v.clone()).map_err(SemanticsError::Syntax)?;
                let s = self.classical_lambda_subsheaf(&body, &inner)?;
                let e = exists_along(&s, &c, &self.interpret_type(&v.ty)?);
                // Two-valuedness of the result is part of the flavor.
                comp(&e, phi)?;
                Ok(e)
            }
            Term::Forall(v, body) => {
                let (v, body) = self.freshen(v, body, ctx)?;
                let inner = ctx.extend(v.clone()).map_err(SemanticsError::Syntax)?;
                let s = self.classical_lambda_subsheaf(&body, &inner)?;
                let ns = comp(&s, phi)?;
                let e = exists_along(&ns, &c, &self.interpret_type(&v.ty)?);
                comp(&e, phi)
            }
            _ => Err(SemanticsError::FlavorMismatch {
                detail: format!("`{}` is not a formula of the lambda fragment", phi),
            }),
        }
    }

    /// The subsheaf of the context product on which a formula holds, in
    /// either flavor.
    pub fn truth_subsheaf(&self, phi: &Formula, ctx: &Context) -> Result<Subsheaf, SemanticsError> {
        match self.flavor {
            Flavor::OmegaIntuitionistic => self.interpret_formula_omega(phi, ctx),
            Flavor::ClassicalC if self.theory.signature.mode == Mode::Lambda => {
                self.classical_lambda_subsheaf(phi, ctx)
            }
            Flavor::ClassicalC => {
                let m = self.interpret_term(phi, ctx)?;
                guard_mask_width(m.source.clone())?;
                let elems = m
                    .maps
                    .iter()
                    .map(|f| {
                        let mut mask: crate::sheaf::ElemSet = 0;
                        for (a, &v) in f.iter().enumerate() {
                            if v == 0 {
                                mask |= 1 << a;
                            }
                        }
                        mask
                    })
                    .collect();
                Ok(Subsheaf::new(m.source.clone(), elems)?)
            }
        }
    }

    /// Truth of a closed formula: the first coproduct inclusion under the
    /// classical flavor, the maximal subterminal under omega.
    pub fn satisfies(&self, sigma: &Formula) -> Result<bool, SemanticsError> {
        match self.flavor {
            Flavor::ClassicalC if self.theory.signature.mode.is_hol() => {
                let m = self.interpret_term(sigma, &Context::empty())?;
                Ok(m.maps.iter().all(|f| f.iter().all(|&v| v == 0)))
            }
            _ => Ok(self.truth_subsheaf(sigma, &Context::empty())?.is_whole()),
        }
    }

    /// An entailment φ ⊢_x ψ holds when the subsheaf where φ holds is
    /// contained in the one where ψ holds.
    pub fn sequent_holds(&self, s: &crate::deduction::Sequent) -> Result<bool, SemanticsError> {
        let lhs = self.truth_subsheaf(&s.lhs, &s.ctx)?;
        let rhs = self.truth_subsheaf(&s.rhs, &s.ctx)?;
        Ok(lhs.leq(&rhs))
    }
}

/// Whether an interpretation models its theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Valid,
    /// Index of the first failing axiom.
    FailsAxiom(usize),
}

pub fn check_model(m: &Interpretation) -> Result<ModelVerdict, SemanticsError> {
    for (i, ax) in m.theory.axioms.iter().enumerate() {
        if !m.satisfies(ax)? {
            return Ok(ModelVerdict::FailsAxiom(i));
        }
    }
    Ok(ModelVerdict::Valid)
}
