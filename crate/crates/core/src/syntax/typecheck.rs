//! Typing of terms and well-formedness of formulas.

use super::term::Term;
use super::types::{Context, Mode, Signature, TypeExpr};
use crate::error::SyntaxError;

fn check_mode_type(ty: &TypeExpr, sig: &Signature) -> Result<(), SyntaxError> {
    if sig.mode == Mode::Lambda && ty.mentions_two() {
        return Err(SyntaxError::ModeViolation {
            what: format!("type {} mentions 2 in lambda mode", ty),
        });
    }
    match ty {
        TypeExpr::Basic(n) => {
            if !sig.basic_types.iter().any(|t| t == n) {
                return Err(SyntaxError::UnknownBasicType { name: n.clone() });
            }
        }
        TypeExpr::Two => {}
        TypeExpr::Prod(l, r) | TypeExpr::Exp(l, r) => {
            check_mode_type(l, sig)?;
            check_mode_type(r, sig)?;
        }
    }
    Ok(())
}

/// Returns the unique type of a well-typed term, or an error.
///
/// In lambda mode the formula layer (connectives, quantifiers, `Eq`,
/// `RelApp`) is not part of the term language and is rejected here with
/// `ModeViolation`; use `check_formula` for formulas.
pub fn typecheck(term: &Term, ctx: &Context, sig: &Signature) -> Result<TypeExpr, SyntaxError> {
    let mut scope: Vec<super::types::Var> = ctx.vars().to_vec();
    typecheck_in(term, &mut scope, sig)
}

fn lambda_reject(sig: &Signature, what: &str) -> Result<TypeExpr, SyntaxError> {
    debug_assert_eq!(sig.mode, Mode::Lambda);
    Err(SyntaxError::ModeViolation {
        what: format!("{} is a formula, not a term, in lambda mode", what),
    })
}

/// Typechecking against a raw binder scope (innermost last); shadowing is
/// allowed here, unlike in a `Context`.
pub(crate) fn typecheck_scoped(
    term: &Term,
    scope: &mut Vec<super::types::Var>,
    sig: &Signature,
) -> Result<TypeExpr, SyntaxError> {
    typecheck_in(term, scope, sig)
}

fn typecheck_in(
    term: &Term,
    scope: &mut Vec<super::types::Var>,
    sig: &Signature,
) -> Result<TypeExpr, SyntaxError> {
    match term {
        Term::Var(v) => {
            check_mode_type(&v.ty, sig)?;
            match scope.iter().rev().find(|w| w.name == v.name) {
                Some(w) if w.ty == v.ty => Ok(v.ty.clone()),
                Some(w) => Err(SyntaxError::TypeMismatch {
                    detail: format!(
                        "variable `{}` has type {} in scope but is annotated {}",
                        v.name, w.ty, v.ty
                    ),
                }),
                None => Err(SyntaxError::UnboundVariable {
                    name: v.name.clone(),
                }),
            }
        }
        Term::Const(c) => match sig.constants.get(c) {
            Some(ty) => Ok(ty.clone()),
            None => Err(SyntaxError::UnknownConstant { name: c.clone() }),
        },
        Term::Pair(a, b) => {
            let ta = typecheck_in(a, scope, sig)?;
            let tb = typecheck_in(b, scope, sig)?;
            Ok(TypeExpr::prod(ta, tb))
        }
        Term::Proj1(t) => match typecheck_in(t, scope, sig)? {
            TypeExpr::Prod(l, _) => Ok(*l),
            ty => Err(SyntaxError::TypeMismatch {
                detail: format!("fst applied to a term of non-product type {}", ty),
            }),
        },
        Term::Proj2(t) => match typecheck_in(t, scope, sig)? {
            TypeExpr::Prod(_, r) => Ok(*r),
            ty => Err(SyntaxError::TypeMismatch {
                detail: format!("snd applied to a term of non-product type {}", ty),
            }),
        },
        Term::Lambda(v, body) => {
            check_mode_type(&v.ty, sig)?;
            scope.push(v.clone());
            let tb = typecheck_in(body, scope, sig);
            scope.pop();
            Ok(TypeExpr::exp(tb?, v.ty.clone()))
        }
        Term::App(f, a) => {
            let tf = typecheck_in(f, scope, sig)?;
            let ta = typecheck_in(a, scope, sig)?;
            match tf {
                TypeExpr::Exp(z, y) if *y == ta => Ok(*z),
                TypeExpr::Exp(_, y) => Err(SyntaxError::TypeMismatch {
                    detail: format!("function expects argument of type {} but got {}", y, ta),
                }),
                ty => Err(SyntaxError::TypeMismatch {
                    detail: format!("application of a term of non-exponential type {}", ty),
                }),
            }
        }
        Term::Eq(a, b) => {
            if sig.mode == Mode::Lambda {
                return lambda_reject(sig, "an equality");
            }
            let ta = typecheck_in(a, scope, sig)?;
            let tb = typecheck_in(b, scope, sig)?;
            if ta != tb {
                return Err(SyntaxError::TypeMismatch {
                    detail: format!("equality between types {} and {}", ta, tb),
                });
            }
            Ok(TypeExpr::Two)
        }
        Term::Top | Term::Bot => {
            if sig.mode == Mode::Lambda {
                return lambda_reject(sig, "a logical constant");
            }
            Ok(TypeExpr::Two)
        }
        Term::Not(a) => {
            if sig.mode == Mode::Lambda {
                return lambda_reject(sig, "a negation");
            }
            expect_two(a, scope, sig)?;
            Ok(TypeExpr::Two)
        }
        Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
            if sig.mode == Mode::Lambda {
                return lambda_reject(sig, "a connective");
            }
            expect_two(a, scope, sig)?;
            expect_two(b, scope, sig)?;
            Ok(TypeExpr::Two)
        }
        Term::Forall(v, body) | Term::Exists(v, body) => {
            if sig.mode == Mode::Lambda {
                return lambda_reject(sig, "a quantifier");
            }
            check_mode_type(&v.ty, sig)?;
            scope.push(v.clone());
            let r = expect_two(body, scope, sig);
            scope.pop();
            r?;
            Ok(TypeExpr::Two)
        }
        Term::RelApp(r, _) => Err(if sig.mode == Mode::Lambda {
            SyntaxError::ModeViolation {
                what: format!("relation application `{}` is a formula, not a term", r),
            }
        } else {
            SyntaxError::ModeViolation {
                what: format!("relation symbol `{}` used in HOL mode", r),
            }
        }),
    }
}

fn expect_two(
    t: &Term,
    scope: &mut Vec<super::types::Var>,
    sig: &Signature,
) -> Result<(), SyntaxError> {
    let ty = typecheck_in(t, scope, sig)?;
    if ty != TypeExpr::Two {
        return Err(SyntaxError::TypeMismatch {
            detail: format!("expected a formula (type 2) but got type {}", ty),
        });
    }
    Ok(())
}

/// Checks that `phi` is a well-formed formula over `ctx`: a term of type `2`
/// in HOL mode, or a member of the two-sorted formula layer in lambda mode.
pub fn check_formula(phi: &Term, ctx: &Context, sig: &Signature) -> Result<(), SyntaxError> {
    if sig.mode.is_hol() {
        expect_two(phi, &mut ctx.vars().to_vec(), sig)
    } else {
        let mut scope = ctx.vars().to_vec();
        check_lambda_formula(phi, &mut scope, sig)
    }
}

fn check_lambda_formula(
    phi: &Term,
    scope: &mut Vec<super::types::Var>,
    sig: &Signature,
) -> Result<(), SyntaxError> {
    match phi {
        Term::Top | Term::Bot => Ok(()),
        Term::Not(a) => check_lambda_formula(a, scope, sig),
        Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
            check_lambda_formula(a, scope, sig)?;
            check_lambda_formula(b, scope, sig)
        }
        Term::Forall(v, body) | Term::Exists(v, body) => {
            check_mode_type(&v.ty, sig)?;
            scope.push(v.clone());
            let r = check_lambda_formula(body, scope, sig);
            scope.pop();
            r
        }
        Term::Eq(a, b) => {
            let ta = typecheck_in(a, scope, sig)?;
            let tb = typecheck_in(b, scope, sig)?;
            if ta != tb {
                return Err(SyntaxError::TypeMismatch {
                    detail: format!("equality between types {} and {}", ta, tb),
                });
            }
            Ok(())
        }
        Term::RelApp(r, args) => {
            let arg_tys = sig
                .relations
                .get(r)
                .ok_or_else(|| SyntaxError::UnknownRelation { name: r.clone() })?
                .clone();
            if arg_tys.len() != args.len() {
                return Err(SyntaxError::TypeMismatch {
                    detail: format!(
                        "relation `{}` expects {} arguments, got {}",
                        r,
                        arg_tys.len(),
                        args.len()
                    ),
                });
            }
            for (a, want) in args.iter().zip(&arg_tys) {
                let got = typecheck_in(a, scope, sig)?;
                if got != *want {
                    return Err(SyntaxError::TypeMismatch {
                        detail: format!(
                            "argument of relation `{}` has type {}, expected {}",
                            r, got, want
                        ),
                    });
                }
            }
            Ok(())
        }
        _ => Err(SyntaxError::ModeViolation {
            what: "a bare term is not a lambda-mode formula".into(),
        }),
    }
}
