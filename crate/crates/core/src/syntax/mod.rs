//! The object language: types, terms, formulas, signatures and theories,
//! with typing, substitution and the primitive-basis compiler.

mod parse;
mod primitive;
mod print;
mod term;
mod typecheck;
mod types;

pub use parse::{lex, parse_term, parse_theory, parse_type, Parser, SpannedTok, Tok};
pub use primitive::{compile_to_primitive_basis, preserves_free_vars};
pub use print::print_term;
pub use term::{all_names_of, alpha_eq, free_vars, fresh_name, substitute, Formula, Term};
pub use typecheck::{check_formula, typecheck};
pub use types::{Context, Mode, Signature, Theory, TypeExpr, Var};

#[cfg(test)]
mod tests {
    use super::*;

    fn hol_sig() -> Signature {
        let mut sig = Signature::new(Mode::HolClassical);
        sig.add_basic_type("X").unwrap();
        sig.add_basic_type("Y").unwrap();
        sig.add_constant("c", TypeExpr::basic("X")).unwrap();
        sig
    }

    fn lambda_sig() -> Signature {
        let mut sig = Signature::new(Mode::Lambda);
        sig.add_basic_type("X").unwrap();
        sig.add_constant("c", TypeExpr::basic("X")).unwrap();
        sig.add_relation("R", vec![TypeExpr::basic("X")]).unwrap();
        sig
    }

    fn x() -> Term {
        Term::var("x", TypeExpr::basic("X"))
    }

    fn y() -> Term {
        Term::var("y", TypeExpr::basic("Y"))
    }

    fn ctx_xy() -> Context {
        Context::new(vec![
            Var::new("x", TypeExpr::basic("X")),
            Var::new("y", TypeExpr::basic("Y")),
        ])
        .unwrap()
    }

    #[test]
    fn typecheck_pair() {
        let sig = hol_sig();
        let t = Term::pair(x(), y());
        assert_eq!(
            typecheck(&t, &ctx_xy(), &sig).unwrap(),
            TypeExpr::prod(TypeExpr::basic("X"), TypeExpr::basic("Y"))
        );
    }

    #[test]
    fn typecheck_identity_lambda() {
        let sig = hol_sig();
        let v = Var::new("y", TypeExpr::basic("Y"));
        let t = Term::lam(v.clone(), Term::Var(v));
        assert_eq!(
            typecheck(&t, &Context::empty(), &sig).unwrap(),
            TypeExpr::exp(TypeExpr::basic("Y"), TypeExpr::basic("Y"))
        );
    }

    #[test]
    fn typecheck_eq_is_two_in_hol_and_rejected_in_lambda() {
        let sig = hol_sig();
        let t = Term::eq(x(), x());
        let ctx = Context::new(vec![Var::new("x", TypeExpr::basic("X"))]).unwrap();
        assert_eq!(typecheck(&t, &ctx, &sig).unwrap(), TypeExpr::Two);

        let lsig = lambda_sig();
        let err = typecheck(&t, &ctx, &lsig).unwrap_err();
        assert!(matches!(err, crate::error::SyntaxError::ModeViolation { .. }));
        // But it is a fine lambda-mode formula.
        check_formula(&t, &ctx, &lsig).unwrap();
    }

    #[test]
    fn typecheck_errors() {
        let sig = hol_sig();
        assert!(matches!(
            typecheck(&x(), &Context::empty(), &sig),
            Err(crate::error::SyntaxError::UnboundVariable { .. })
        ));
        assert!(matches!(
            typecheck(&Term::cnst("d"), &Context::empty(), &sig),
            Err(crate::error::SyntaxError::UnknownConstant { .. })
        ));
    }

    #[test]
    fn substitute_base_and_vacuous() {
        let yv = Var::new("y", TypeExpr::basic("X"));
        let tau = Term::cnst("c");
        // y[tau/y] = tau
        assert_eq!(substitute(&Term::Var(yv.clone()), &tau, &yv).unwrap(), tau);
        // (x=x)[tau/y] = x=x
        let phi = Term::eq(x(), x());
        assert_eq!(substitute(&phi, &tau, &yv).unwrap(), phi);
    }

    #[test]
    fn substitute_capture_avoidance() {
        // (forall z. z = y)[z/y]  ->  forall z'. z' = z
        let zx = Var::new("z", TypeExpr::basic("X"));
        let yv = Var::new("y", TypeExpr::basic("X"));
        let phi = Term::forall(zx.clone(), Term::eq(Term::Var(zx.clone()), Term::Var(yv.clone())));
        let got = substitute(&phi, &Term::Var(zx.clone()), &yv).unwrap();
        let zp = Var::new("z'", TypeExpr::basic("X"));
        let want = Term::forall(zp.clone(), Term::eq(Term::Var(zp), Term::Var(zx)));
        assert!(alpha_eq(&got, &want), "got {}", got);
    }

    #[test]
    fn alpha_eq_cases() {
        let ya = Var::new("y", TypeExpr::basic("Y"));
        let za = Var::new("z", TypeExpr::basic("Y"));
        assert!(alpha_eq(
            &Term::lam(ya.clone(), Term::Var(ya.clone())),
            &Term::lam(za.clone(), Term::Var(za.clone()))
        ));
        // \y.x vs \y.y differ
        let xa = Var::new("x", TypeExpr::basic("Y"));
        assert!(!alpha_eq(
            &Term::lam(ya.clone(), Term::Var(xa)),
            &Term::lam(ya.clone(), Term::Var(ya.clone()))
        ));
        assert!(alpha_eq(
            &Term::forall(ya.clone(), Term::eq(Term::Var(ya.clone()), Term::Var(ya))),
            &Term::forall(za.clone(), Term::eq(Term::Var(za.clone()), Term::Var(za)))
        ));
    }

    #[test]
    fn free_vars_cases() {
        let yv = Var::new("y", TypeExpr::basic("Y"));
        assert!(free_vars(&Term::lam(yv.clone(), Term::Var(yv.clone()))).is_empty());
        let fv = free_vars(&Term::eq(x(), x()));
        assert_eq!(fv.len(), 1);
        let fv = free_vars(&Term::forall(
            yv.clone(),
            Term::eq(Term::var("x", TypeExpr::basic("Y")), Term::Var(yv)),
        ));
        assert_eq!(fv.into_iter().map(|v| v.name).collect::<Vec<_>>(), ["x"]);
    }

    #[test]
    fn parse_print_round_trip() {
        let sig = hol_sig();
        let inputs = [
            "forall x:X. x = x",
            "exists p:2. p = p",
            "\\y:Y. y",
            "<c, c>",
            "fst <c, c> = c",
            "{x:X | x = c}",
            "c in {x:X | x = c}",
            "~(c = c) \\/ c = c",
            "(c = c -> c = c) /\\ true",
        ];
        for s in inputs {
            let t = parse_term(s, &sig, &Context::empty()).unwrap();
            let printed = print_term(&t);
            let t2 = parse_term(&printed, &sig, &Context::empty()).unwrap();
            assert!(alpha_eq(&t, &t2), "round trip failed for `{}` -> `{}`", s, printed);
        }
    }

    #[test]
    fn parse_theory_with_mode() {
        let src = "%mode lambda\ntype G;\nconst e : G;\nconst mul : G^(G * G);\nrel P : (G, G);\naxiom forall g:G. mul(<g, e>) = g;";
        let thy = parse_theory(src).unwrap();
        assert_eq!(thy.signature.mode, Mode::Lambda);
        assert_eq!(thy.axioms.len(), 1);
    }

    #[test]
    fn compile_preserves_type_and_free_vars() {
        let sig = hol_sig();
        let ctx = ctx_xy();
        let cases = [
            Term::Top,
            Term::Bot,
            Term::and(Term::eq(x(), x()), Term::Top),
            Term::or(Term::eq(x(), x()), Term::not(Term::eq(y(), y()))),
            Term::forall(Var::new("z", TypeExpr::basic("X")), Term::eq(Term::var("z", TypeExpr::basic("X")), x())),
            Term::exists(Var::new("z", TypeExpr::basic("X")), Term::eq(Term::var("z", TypeExpr::basic("X")), Term::cnst("c"))),
        ];
        for t in cases {
            let c = compile_to_primitive_basis(&t, &ctx, &sig).unwrap();
            assert_eq!(typecheck(&c, &ctx, &sig).unwrap(), TypeExpr::Two, "term {}", t);
            assert_eq!(free_vars(&t), free_vars(&c), "term {}", t);
            assert!(is_primitive_basis(&c), "not primitive: {}", c);
        }
        // The surjective-pairing rewrite may drop a variable that occurred
        // only inside a projected pair.
        let t = Term::eq(Term::proj1(Term::pair(x(), y())), x());
        let c = compile_to_primitive_basis(&t, &ctx, &sig).unwrap();
        assert!(is_primitive_basis(&c));
        assert!(free_vars(&c).is_subset(&free_vars(&t)));
    }

    #[test]
    fn compile_eliminates_unapplied_projection() {
        let sig = hol_sig();
        let w = Var::new("w", TypeExpr::prod(TypeExpr::basic("X"), TypeExpr::basic("X")));
        let ctx = Context::new(vec![w.clone()]).unwrap();
        let t = Term::eq(Term::proj1(Term::Var(w.clone())), Term::cnst("c"));
        let c = compile_to_primitive_basis(&t, &ctx, &sig).unwrap();
        assert!(is_primitive_basis(&c), "not primitive: {}", c);
        assert_eq!(free_vars(&t), free_vars(&c));
    }

    fn is_primitive_basis(t: &Term) -> bool {
        match t {
            Term::Top
            | Term::Bot
            | Term::Not(_)
            | Term::And(..)
            | Term::Or(..)
            | Term::Implies(..)
            | Term::Forall(..)
            | Term::Exists(..)
            | Term::Proj1(_)
            | Term::Proj2(_)
            | Term::RelApp(..) => false,
            Term::Var(_) | Term::Const(_) => true,
            Term::Pair(a, b) | Term::App(a, b) | Term::Eq(a, b) => {
                is_primitive_basis(a) && is_primitive_basis(b)
            }
            Term::Lambda(_, b) => is_primitive_basis(b),
        }
    }
}
