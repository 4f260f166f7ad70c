//! Terms and formulas, capture-avoiding substitution, alpha equivalence.

use std::collections::BTreeSet;
use std::fmt;

use super::types::{TypeExpr, Var};
use crate::error::SyntaxError;

/// The unified term language. In HOL mode a formula is a term of type `2`;
/// in lambda mode the connective/quantifier/`Eq`/`RelApp` constructors form a
/// separate formula layer and may not occur under `Pair`, `Lambda` or `App`
/// (enforced by `typecheck`/`check_formula`, not by the grammar).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(String),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Lambda(Var, Box<Term>),
    App(Box<Term>, Box<Term>),
    Eq(Box<Term>, Box<Term>),
    Top,
    Bot,
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Forall(Var, Box<Term>),
    Exists(Var, Box<Term>),
    RelApp(String, Vec<Term>),
}

/// A formula is a term of type `2` (HOL) or a member of the formula layer
/// (lambda mode). The distinction is a checking concern, not a grammar one.
pub type Formula = Term;

impl Term {
    pub fn var(name: &str, ty: TypeExpr) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn cnst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj1(t: Term) -> Term {
        Term::Proj1(Box::new(t))
    }

    pub fn proj2(t: Term) -> Term {
        Term::Proj2(Box::new(t))
    }

    pub fn lam(v: Var, body: Term) -> Term {
        Term::Lambda(v, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::Eq(Box::new(a), Box::new(b))
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Term) -> Term {
        Term::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Term) -> Term {
        Term::Exists(v, Box::new(body))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => 0,
            Term::Proj1(t) | Term::Proj2(t) | Term::Not(t) => t.size(),
            Term::Lambda(_, t) | Term::Forall(_, t) | Term::Exists(_, t) => t.size(),
            Term::Pair(a, b)
            | Term::App(a, b)
            | Term::Eq(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Implies(a, b) => a.size() + b.size(),
            Term::RelApp(_, args) => args.iter().map(Term::size).sum(),
        }
    }

    /// Tree height.
    pub fn height(&self) -> usize {
        1 + match self {
            Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot => 0,
            Term::Proj1(t) | Term::Proj2(t) | Term::Not(t) => t.height(),
            Term::Lambda(_, t) | Term::Forall(_, t) | Term::Exists(_, t) => t.height(),
            Term::Pair(a, b)
            | Term::App(a, b)
            | Term::Eq(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Implies(a, b) => a.height().max(b.height()),
            Term::RelApp(_, args) => args.iter().map(Term::height).max().unwrap_or(0),
        }
    }
}

/// The free typed variables of a term. Lambda, Forall and Exists bind.
pub fn free_vars(term: &Term) -> BTreeSet<Var> {
    fn go(t: &Term, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match t {
            Term::Var(v) => {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) | Term::Top | Term::Bot => {}
            Term::Proj1(t) | Term::Proj2(t) | Term::Not(t) => go(t, bound, out),
            Term::Pair(a, b)
            | Term::App(a, b)
            | Term::Eq(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Implies(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Term::Lambda(v, body) | Term::Forall(v, body) | Term::Exists(v, body) => {
                bound.push(v.clone());
                go(body, bound, out);
                bound.pop();
            }
            Term::RelApp(_, args) => {
                for a in args {
                    go(a, bound, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(term, &mut Vec::new(), &mut out);
    out
}

/// All variable names occurring in `t`, free or bound.
pub fn all_names_of(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.name.clone());
        }
        Term::Const(_) | Term::Top | Term::Bot => {}
        Term::Proj1(t) | Term::Proj2(t) | Term::Not(t) => all_names_of(t, out),
        Term::Pair(a, b)
        | Term::App(a, b)
        | Term::Eq(a, b)
        | Term::And(a, b)
        | Term::Or(a, b)
        | Term::Implies(a, b) => {
            all_names_of(a, out);
            all_names_of(b, out);
        }
        Term::Lambda(v, body) | Term::Forall(v, body) | Term::Exists(v, body) => {
            out.insert(v.name.clone());
            all_names_of(body, out);
        }
        Term::RelApp(_, args) => {
            for a in args {
                all_names_of(a, out);
            }
        }
    }
}

/// Deterministic fresh name: primes the base name until it avoids `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution `body[tau/y]`. Bound variables clashing with
/// free variables of `tau` are renamed with a deterministic fresh name.
pub fn substitute(body: &Term, tau: &Term, y: &Var) -> Result<Term, SyntaxError> {
    let tau_fv: BTreeSet<String> = free_vars(tau).into_iter().map(|v| v.name).collect();
    fn go(
        t: &Term,
        tau: &Term,
        y: &Var,
        tau_fv: &BTreeSet<String>,
    ) -> Result<Term, SyntaxError> {
        Ok(match t {
            Term::Var(v) => {
                if v.name == y.name {
                    if v.ty != y.ty {
                        return Err(SyntaxError::TypeMismatch {
                            detail: format!(
                                "variable `{}` occurs at type {} but substitution target has type {}",
                                v.name, v.ty, y.ty
                            ),
                        });
                    }
                    tau.clone()
                } else {
                    t.clone()
                }
            }
            Term::Const(_) | Term::Top | Term::Bot => t.clone(),
            Term::Proj1(a) => Term::proj1(go(a, tau, y, tau_fv)?),
            Term::Proj2(a) => Term::proj2(go(a, tau, y, tau_fv)?),
            Term::Not(a) => Term::not(go(a, tau, y, tau_fv)?),
            Term::Pair(a, b) => Term::pair(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?),
            Term::App(a, b) => Term::app(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?),
            Term::Eq(a, b) => Term::eq(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?),
            Term::And(a, b) => Term::and(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?),
            Term::Or(a, b) => Term::or(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?),
            Term::Implies(a, b) => {
                Term::implies(go(a, tau, y, tau_fv)?, go(b, tau, y, tau_fv)?)
            }
            Term::Lambda(v, body) | Term::Forall(v, body) | Term::Exists(v, body) => {
                let rebuild = |v: Var, b: Term| match t {
                    Term::Lambda(..) => Term::lam(v, b),
                    Term::Forall(..) => Term::forall(v, b),
                    _ => Term::exists(v, b),
                };
                if v.name == y.name {
                    // y is shadowed; nothing to substitute below.
                    rebuild(v.clone(), body.as_ref().clone())
                } else if tau_fv.contains(&v.name) && free_vars(body).iter().any(|w| w.name == y.name) {
                    // Rename the binder away from FV(tau) before descending.
                    let mut taken = tau_fv.clone();
                    all_names_of(body, &mut taken);
                    taken.insert(y.name.clone());
                    let fresh = fresh_name(&v.name, &taken);
                    let fresh_var = Var::new(&fresh, v.ty.clone());
                    let renamed = go(body, &Term::Var(fresh_var.clone()), v, &BTreeSet::new())?;
                    rebuild(fresh_var, go(&renamed, tau, y, tau_fv)?)
                } else {
                    rebuild(v.clone(), go(body, tau, y, tau_fv)?)
                }
            }
            Term::RelApp(r, args) => Term::RelApp(
                r.clone(),
                args.iter()
                    .map(|a| go(a, tau, y, tau_fv))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        })
    }
    go(body, tau, y, &tau_fv)
}

/// Alpha equivalence: structural equality up to renaming of bound variables.
pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    fn go(t1: &Term, t2: &Term, pairs: &mut Vec<(Var, Var)>) -> bool {
        match (t1, t2) {
            (Term::Var(a), Term::Var(b)) => {
                // Innermost binder pairing wins.
                for (x, y) in pairs.iter().rev() {
                    let hit_l = x.name == a.name;
                    let hit_r = y.name == b.name;
                    if hit_l || hit_r {
                        return hit_l && hit_r && a.ty == b.ty && x.ty == y.ty;
                    }
                }
                a == b
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::Top, Term::Top) | (Term::Bot, Term::Bot) => true,
            (Term::Proj1(a), Term::Proj1(b))
            | (Term::Proj2(a), Term::Proj2(b))
            | (Term::Not(a), Term::Not(b)) => go(a, b, pairs),
            (Term::Pair(a1, a2), Term::Pair(b1, b2))
            | (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::Eq(a1, a2), Term::Eq(b1, b2))
            | (Term::And(a1, a2), Term::And(b1, b2))
            | (Term::Or(a1, a2), Term::Or(b1, b2))
            | (Term::Implies(a1, a2), Term::Implies(b1, b2)) => {
                go(a1, b1, pairs) && go(a2, b2, pairs)
            }
            (Term::Lambda(v1, b1), Term::Lambda(v2, b2))
            | (Term::Forall(v1, b1), Term::Forall(v2, b2))
            | (Term::Exists(v1, b1), Term::Exists(v2, b2)) => {
                if v1.ty != v2.ty {
                    return false;
                }
                pairs.push((v1.clone(), v2.clone()));
                let r = go(b1, b2, pairs);
                pairs.pop();
                r
            }
            (Term::RelApp(r1, a1), Term::RelApp(r2, a2)) => {
                r1 == r2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(a, b)| go(a, b, pairs))
            }
            _ => false,
        }
    }
    go(t1, t2, &mut Vec::new())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_term(self))
    }
}
