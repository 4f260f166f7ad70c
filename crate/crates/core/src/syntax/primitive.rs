//! Compilation of HOL formulas to the primitive basis: pairing,
//! comprehension, membership and equality. Connectives and quantifiers are
//! rewritten to their comprehension/equality definitions and projections are
//! eliminated.

use std::collections::BTreeSet;

use super::term::{all_names_of, free_vars, Term};
use super::typecheck::typecheck;
use super::types::{Context, Signature, TypeExpr, Var};
use crate::error::SyntaxError;

fn fresh_var(base: &str, ty: TypeExpr, taken: &mut BTreeSet<String>) -> Var {
    let name = super::term::fresh_name(base, taken);
    taken.insert(name.clone());
    Var::new(&name, ty)
}

/// `true` as a primitive-basis formula: `{x:2|x=x} = {x:2|x=x}`.
fn top_prim() -> Term {
    let x = Var::new("x", TypeExpr::Two);
    let set = Term::lam(x.clone(), Term::eq(Term::Var(x.clone()), Term::Var(x)));
    Term::eq(set.clone(), set)
}

/// Compiles a HOL formula (a term of type `2`) to the primitive basis.
///
/// The output contains no `Top`/`Bot`/`Not`/`And`/`Or`/`Implies`/
/// `Forall`/`Exists` nodes and no projections; lambda abstraction and
/// application at general exponential types are kept (they are interpreted
/// directly as exponentials).
pub fn compile_to_primitive_basis(
    term: &Term,
    ctx: &Context,
    sig: &Signature,
) -> Result<Term, SyntaxError> {
    if !sig.mode.is_hol() {
        return Err(SyntaxError::ModeViolation {
            what: "lambda-logic formulas are not compiled to the primitive basis".into(),
        });
    }
    // Sanity: input must be well-typed (also feeds projection typing below).
    typecheck(term, ctx, sig)?;
    let mut taken: BTreeSet<String> = ctx.vars().iter().map(|v| v.name.clone()).collect();
    all_names_of(term, &mut taken);
    let no_proj = eliminate_projections(term, ctx, sig, &mut taken)?;
    Ok(compile_connectives(&no_proj, &mut taken))
}

fn compile_connectives(t: &Term, taken: &mut BTreeSet<String>) -> Term {
    match t {
        Term::Top => top_prim(),
        Term::Bot => {
            // false := forall p:2. p
            let p = fresh_var("p", TypeExpr::Two, taken);
            compile_connectives(&Term::forall(p.clone(), Term::Var(p)), taken)
        }
        Term::Not(a) => compile_connectives(&Term::implies(a.as_ref().clone(), Term::Bot), taken),
        Term::And(a, b) => {
            let ca = compile_connectives(a, taken);
            let cb = compile_connectives(b, taken);
            Term::eq(Term::pair(ca, cb), Term::pair(top_prim(), top_prim()))
        }
        Term::Implies(a, b) => {
            // a -> b := (a /\ b) = a
            let conj = compile_connectives(&Term::and(a.as_ref().clone(), b.as_ref().clone()), taken);
            let ca = compile_connectives(a, taken);
            Term::eq(conj, ca)
        }
        Term::Or(a, b) => {
            // a \/ b := forall p:2. ((a -> p) /\ (b -> p)) -> p
            let p = fresh_var("p", TypeExpr::Two, taken);
            let body = Term::implies(
                Term::and(
                    Term::implies(a.as_ref().clone(), Term::Var(p.clone())),
                    Term::implies(b.as_ref().clone(), Term::Var(p.clone())),
                ),
                Term::Var(p.clone()),
            );
            compile_connectives(&Term::forall(p, body), taken)
        }
        Term::Forall(v, body) => {
            // forall y. phi := {y|phi} = {y|true}
            let cb = compile_connectives(body, taken);
            Term::eq(
                Term::lam(v.clone(), cb),
                Term::lam(v.clone(), top_prim()),
            )
        }
        Term::Exists(v, body) => {
            // exists y. phi := forall p:2. (forall y. phi -> p) -> p
            let p = fresh_var("p", TypeExpr::Two, taken);
            let inner = Term::forall(
                v.clone(),
                Term::implies(body.as_ref().clone(), Term::Var(p.clone())),
            );
            compile_connectives(&Term::forall(p.clone(), Term::implies(inner, Term::Var(p))), taken)
        }
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Pair(a, b) => Term::pair(compile_connectives(a, taken), compile_connectives(b, taken)),
        Term::Proj1(a) => Term::proj1(compile_connectives(a, taken)),
        Term::Proj2(a) => Term::proj2(compile_connectives(a, taken)),
        Term::Lambda(v, body) => Term::lam(v.clone(), compile_connectives(body, taken)),
        Term::App(f, a) => Term::app(compile_connectives(f, taken), compile_connectives(a, taken)),
        Term::Eq(a, b) => Term::eq(compile_connectives(a, taken), compile_connectives(b, taken)),
        Term::RelApp(..) => t.clone(),
    }
}

/// Rewrites `fst <a,b>` / `snd <a,b>` to `a` / `b` everywhere, then hoists
/// remaining projections out of atomic formulas with the surjective-pairing
/// equation: an atom `A[fst t]` becomes
/// `exists u. exists v. t = <u,v> /\ A[u, v]`.
fn eliminate_projections(
    t: &Term,
    ctx: &Context,
    sig: &Signature,
    taken: &mut BTreeSet<String>,
) -> Result<Term, SyntaxError> {
    let t = simplify_pair_projections(t);
    go_formula(&t, &mut ctx.vars().to_vec(), sig, taken)
}

fn simplify_pair_projections(t: &Term) -> Term {
    let rec = simplify_pair_projections;
    match t {
        Term::Proj1(a) => match rec(a) {
            Term::Pair(x, _) => *x,
            other => Term::proj1(other),
        },
        Term::Proj2(a) => match rec(a) {
            Term::Pair(_, y) => *y,
            other => Term::proj2(other),
        },
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => t.clone(),
        Term::Not(a) => Term::not(rec(a)),
        Term::Pair(a, b) => Term::pair(rec(a), rec(b)),
        Term::App(a, b) => Term::app(rec(a), rec(b)),
        Term::Eq(a, b) => Term::eq(rec(a), rec(b)),
        Term::And(a, b) => Term::and(rec(a), rec(b)),
        Term::Or(a, b) => Term::or(rec(a), rec(b)),
        Term::Implies(a, b) => Term::implies(rec(a), rec(b)),
        Term::Lambda(v, b) => Term::lam(v.clone(), rec(b)),
        Term::Forall(v, b) => Term::forall(v.clone(), rec(b)),
        Term::Exists(v, b) => Term::exists(v.clone(), rec(b)),
        Term::RelApp(r, args) => Term::RelApp(r.clone(), args.iter().map(rec).collect()),
    }
}

/// Finds an innermost projection subterm `fst t`/`snd t` where `t` itself is
/// projection-free, returning the projected term. Does not look under
/// binders: formula-valued binder bodies are hoisted recursively on their
/// own, and hoisting across a term-valued binder would capture.
fn find_innermost_projected(t: &Term) -> Option<Term> {
    match t {
        Term::Proj1(a) | Term::Proj2(a) => {
            if let Some(inner) = find_innermost_projected(a) {
                Some(inner)
            } else {
                Some(a.as_ref().clone())
            }
        }
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => None,
        Term::Lambda(..) | Term::Forall(..) | Term::Exists(..) => None,
        Term::Not(a) => find_innermost_projected(a),
        Term::Pair(a, b)
        | Term::App(a, b)
        | Term::Eq(a, b)
        | Term::And(a, b)
        | Term::Or(a, b)
        | Term::Implies(a, b) => find_innermost_projected(a).or_else(|| find_innermost_projected(b)),
        Term::RelApp(_, args) => args.iter().find_map(find_innermost_projected),
    }
}

/// Replaces every occurrence of `fst base` by `u` and `snd base` by `v`.
fn replace_projections_of(t: &Term, base: &Term, u: &Var, v: &Var) -> Term {
    let rec = |x: &Term| replace_projections_of(x, base, u, v);
    match t {
        Term::Proj1(a) if a.as_ref() == base => Term::Var(u.clone()),
        Term::Proj2(a) if a.as_ref() == base => Term::Var(v.clone()),
        Term::Proj1(a) => Term::proj1(rec(a)),
        Term::Proj2(a) => Term::proj2(rec(a)),
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => t.clone(),
        Term::Not(a) => Term::not(rec(a)),
        Term::Pair(a, b) => Term::pair(rec(a), rec(b)),
        Term::App(a, b) => Term::app(rec(a), rec(b)),
        Term::Eq(a, b) => Term::eq(rec(a), rec(b)),
        Term::And(a, b) => Term::and(rec(a), rec(b)),
        Term::Or(a, b) => Term::or(rec(a), rec(b)),
        Term::Implies(a, b) => Term::implies(rec(a), rec(b)),
        // Binders are opaque to hoisting; see find_innermost_projected.
        Term::Lambda(..) | Term::Forall(..) | Term::Exists(..) => t.clone(),
        Term::RelApp(r, args) => Term::RelApp(r.clone(), args.iter().map(rec).collect()),
    }
}

fn go_formula(
    t: &Term,
    scope: &mut Vec<Var>,
    sig: &Signature,
    taken: &mut BTreeSet<String>,
) -> Result<Term, SyntaxError> {
    match t {
        Term::Top | Term::Bot | Term::Var(_) | Term::Const(_) => Ok(t.clone()),
        Term::Not(a) => Ok(Term::not(go_formula(a, scope, sig, taken)?)),
        Term::And(a, b) => Ok(Term::and(
            go_formula(a, scope, sig, taken)?,
            go_formula(b, scope, sig, taken)?,
        )),
        Term::Or(a, b) => Ok(Term::or(
            go_formula(a, scope, sig, taken)?,
            go_formula(b, scope, sig, taken)?,
        )),
        Term::Implies(a, b) => Ok(Term::implies(
            go_formula(a, scope, sig, taken)?,
            go_formula(b, scope, sig, taken)?,
        )),
        Term::Forall(v, b) => {
            scope.push(v.clone());
            let r = go_formula(b, scope, sig, taken);
            scope.pop();
            Ok(Term::forall(v.clone(), r?))
        }
        Term::Exists(v, b) => {
            scope.push(v.clone());
            let r = go_formula(b, scope, sig, taken);
            scope.pop();
            Ok(Term::exists(v.clone(), r?))
        }
        // Atoms (and embedded comprehensions): hoist projections.
        _ => hoist_projections_in_atom(t, scope, sig, taken),
    }
}

fn hoist_projections_in_atom(
    atom: &Term,
    scope: &mut Vec<Var>,
    sig: &Signature,
    taken: &mut BTreeSet<String>,
) -> Result<Term, SyntaxError> {
    // First descend into comprehension bodies that are formulas.
    let atom = descend_lambdas(atom, scope, sig, taken)?;
    let atom = simplify_pair_projections(&atom);
    match find_innermost_projected(&atom) {
        None => Ok(atom),
        Some(base) => {
            let base_ty = super::typecheck::typecheck_scoped(&base, scope, sig)?;
            let TypeExpr::Prod(l, r) = base_ty else {
                return Err(SyntaxError::TypeMismatch {
                    detail: "projection applied to a non-product term".into(),
                });
            };
            let u = fresh_var("u", *l, taken);
            let v = fresh_var("v", *r, taken);
            let replaced = replace_projections_of(&atom, &base, &u, &v);
            scope.push(u.clone());
            scope.push(v.clone());
            let inner = hoist_projections_in_atom(&replaced, scope, sig, taken);
            scope.pop();
            scope.pop();
            Ok(Term::exists(
                u.clone(),
                Term::exists(
                    v.clone(),
                    Term::and(
                        Term::eq(base, Term::pair(Term::Var(u), Term::Var(v))),
                        inner?,
                    ),
                ),
            ))
        }
    }
}

fn descend_lambdas(
    t: &Term,
    scope: &mut Vec<Var>,
    sig: &Signature,
    taken: &mut BTreeSet<String>,
) -> Result<Term, SyntaxError> {
    Ok(match t {
        Term::Lambda(v, body) => {
            // If the body is a formula, recurse with the formula eliminator
            // so projections there get proper existential scope.
            scope.push(v.clone());
            let body_ty = super::typecheck::typecheck_scoped(body, scope, sig);
            let r = match body_ty {
                Ok(TypeExpr::Two) => go_formula(body, scope, sig, taken),
                _ => descend_lambdas(body, scope, sig, taken),
            };
            scope.pop();
            Term::lam(v.clone(), r?)
        }
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => t.clone(),
        Term::Not(a) => Term::not(descend_lambdas(a, scope, sig, taken)?),
        Term::Proj1(a) => Term::proj1(descend_lambdas(a, scope, sig, taken)?),
        Term::Proj2(a) => Term::proj2(descend_lambdas(a, scope, sig, taken)?),
        Term::Pair(a, b) => Term::pair(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::App(a, b) => Term::app(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::Eq(a, b) => Term::eq(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::And(a, b) => Term::and(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::Or(a, b) => Term::or(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::Implies(a, b) => Term::implies(
            descend_lambdas(a, scope, sig, taken)?,
            descend_lambdas(b, scope, sig, taken)?,
        ),
        Term::Forall(v, b) => {
            scope.push(v.clone());
            let r = go_formula(b, scope, sig, taken);
            scope.pop();
            Term::forall(v.clone(), r?)
        }
        Term::Exists(v, b) => {
            scope.push(v.clone());
            let r = go_formula(b, scope, sig, taken);
            scope.pop();
            Term::exists(v.clone(), r?)
        }
        Term::RelApp(r, args) => Term::RelApp(
            r.clone(),
            args.iter()
                .map(|a| descend_lambdas(a, scope, sig, taken))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    })
}

/// Used by `free_vars`-preserving checks in tests.
pub fn preserves_free_vars(before: &Term, after: &Term) -> bool {
    free_vars(before) == free_vars(after)
}
