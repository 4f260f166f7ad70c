use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::deduction::random_formula;
use crate::error::HenkinError;
use crate::finspace::{points_of, FinSpace};
use crate::semantics::{Flavor, Interpretation};
use crate::sheaf::{from_etale, is_local_homeo, Sheaf, SheafMorphism};
use crate::syntax::{Mode, Signature, Term, Theory, TypeExpr, Var};

fn x() -> TypeExpr {
    TypeExpr::basic("X")
}

fn sig_xc() -> Signature {
    let mut sig = Signature::new(Mode::HolClassical);
    sig.add_basic_type("X").unwrap();
    sig.add_constant("c", x()).unwrap();
    sig
}

fn full2() -> GeneralModel {
    GeneralModel::full(&sig_xc(), &[("X", &["a", "b"])], DEFAULT_DEPTH_CAP).unwrap()
}

fn full1() -> GeneralModel {
    GeneralModel::full(&sig_xc(), &[("X", &["a"])], DEFAULT_DEPTH_CAP).unwrap()
}

#[test]
fn the_full_model_validates_excluded_middle() {
    let m = full2();
    let p = Var::new("p", TypeExpr::Two);
    let sigma = Term::forall(p.clone(), Term::or(Term::Var(p.clone()), Term::not(Term::Var(p))));
    assert_eq!(henkin_satisfies(&m, &sigma, &Env::new()), Ok(true));
}

#[test]
fn the_identity_witnesses_the_existential() {
    // exists f : X^X. forall x. f(x) = x
    let f = Var::new("f", TypeExpr::exp(x(), x()));
    let v = Var::new("x", x());
    let body = Term::forall(
        v.clone(),
        Term::eq(Term::app(Term::Var(f.clone()), Term::Var(v.clone())), Term::Var(v)),
    );
    let sigma = Term::exists(f, body);
    assert_eq!(henkin_satisfies(&full2(), &sigma, &Env::new()), Ok(true));
    assert_eq!(henkin_satisfies(&full1(), &sigma, &Env::new()), Ok(true));
}

/// The comprehension term whose denotation we delete below.
fn singleton_c() -> Term {
    let v = Var::new("x", x());
    Term::lam(v.clone(), Term::eq(Term::Var(v), Term::cnst("c")))
}

#[test]
fn deleting_a_definable_set_breaks_closure() {
    let mut m = full2();
    let t = singleton_c();
    let ty = TypeExpr::exp(TypeExpr::Two, x());
    m.ensure_carrier(&ty).unwrap();
    assert_eq!(check_closure(&m, &[t.clone()]), Ok(ClosureVerdict::Valid));
    // c denotes atom 0; the table of {x | x = c} is [tt, ff] = [0, 1],
    // which sits at mixed-radix index 0 + 2*1 = 2.
    let idx = m.table_index(&ty, &[TT, FF]).unwrap().unwrap();
    m.remove_function(&ty, idx).unwrap();
    assert!(matches!(
        henkin_satisfies(&m, &Term::eq(t.clone(), t.clone()), &Env::new()),
        Err(HenkinError::EscapesCarrier { .. })
    ));
    assert_eq!(check_closure(&m, &[t.clone()]), Ok(ClosureVerdict::Invalid { term: t }));
    // Closure over the empty witness set is vacuous.
    assert_eq!(check_closure(&m, &[]), Ok(ClosureVerdict::Valid));
}

#[test]
fn carrier_edits_respect_dependents() {
    let mut m = full2();
    // X^X feeds 2^(X^X) once that carrier is registered.
    let xx = TypeExpr::exp(x(), x());
    m.ensure_carrier(&xx).unwrap();
    m.ensure_carrier(&TypeExpr::exp(TypeExpr::Two, xx.clone())).unwrap();
    assert!(matches!(
        m.remove_function(&xx, 0),
        Err(HenkinError::CarrierEdit { .. })
    ));
}

#[test]
fn quantifiers_range_over_the_carrier() {
    // After deleting {x | x = c}, "every subset containing c contains
    // everything" becomes true: the only survivors are {}, {b}, {a,b}... in
    // fact all remaining tables except [tt,ff] either miss c or are total.
    let mut m = full2();
    let ty = TypeExpr::exp(TypeExpr::Two, x());
    m.ensure_carrier(&ty).unwrap();
    let idx = m.table_index(&ty, &[TT, FF]).unwrap().unwrap();
    let s = Var::new("s", ty);
    let v = Var::new("x", x());
    let all_or_nothing = Term::forall(
        s.clone(),
        Term::implies(
            Term::app(Term::Var(s.clone()), Term::cnst("c")),
            Term::forall(v.clone(), Term::app(Term::Var(s), Term::Var(v))),
        ),
    );
    assert_eq!(henkin_satisfies(&m, &all_or_nothing, &Env::new()), Ok(false));
    m.remove_function(&TypeExpr::exp(TypeExpr::Two, x()), idx).unwrap();
    assert_eq!(henkin_satisfies(&m, &all_or_nothing, &Env::new()), Ok(true));
}

#[test]
fn sufficiency_over_a_finite_fragment() {
    let v = Var::new("x", x());
    let all_equal_c = Term::forall(v.clone(), Term::eq(Term::Var(v), Term::cnst("c")));
    // A two-element model refutes the non-provable sentence.
    assert!(is_sufficient(&[full2()], &[all_equal_c.clone()], &[false]));
    // One-element models satisfy it, so nothing refutes it.
    assert!(!is_sufficient(&[full1()], &[all_equal_c.clone()], &[false]));
    // Provable sentences need no refutation.
    assert!(is_sufficient(&[], &[Term::Top], &[true]));
    assert!(is_sufficient(&[full1()], &[all_equal_c, Term::Top], &[true, true]));
}

fn labeled(m: GeneralModel, labels: &[(usize, Value)]) -> LabeledPoint {
    let mut lab = Labeling::new();
    for (n, v) in labels {
        lab.assign(*n, v.clone());
    }
    LabeledPoint::new(m, lab).unwrap()
}

#[test]
fn basic_open_membership() {
    let pt = labeled(full2(), &[(3, Value::new(x(), 0)), (7, Value::new(x(), 0))]);
    assert_eq!(in_basic_open(&pt, &Term::Top, &[]), Ok(true));
    let z1 = Var::new("z1", x());
    let z2 = Var::new("z2", x());
    let eq = Term::eq(Term::Var(z1.clone()), Term::Var(z2));
    assert_eq!(in_basic_open(&pt, &eq, &[3, 7]), Ok(true));
    // An undefined label fails the first conjunct.
    assert_eq!(in_basic_open(&pt, &eq, &[3, 8]), Ok(false));
    // A label of the wrong type also fails it.
    let pt2 = labeled(full2(), &[(3, Value::new(TypeExpr::Two, TT))]);
    assert_eq!(
        in_basic_open(&pt2, &Term::eq(Term::Var(z1), Term::cnst("c")), &[3]),
        Ok(false)
    );
}

#[test]
fn basic_open_intersection_is_basic() {
    // phi(z) = (z = c), psi(z, w) = (z = w): conjunction membership is the
    // conjunction of memberships when shared variables share labels.
    let z = Var::new("z", x());
    let w = Var::new("w", x());
    let phi = Term::eq(Term::Var(z.clone()), Term::cnst("c"));
    let psi = Term::eq(Term::Var(z.clone()), Term::Var(w.clone()));
    let both = Term::and(phi.clone(), psi.clone());
    // Free variables in name order: phi -> (z), psi -> (w, z)? No: (w, z)
    // sorts as w < z, and the conjunction as (w, z) too.
    for a in 0..2 {
        for b in 0..2 {
            for drop_w in [false, true] {
                let mut labels = vec![(4, Value::new(x(), a))];
                if !drop_w {
                    labels.push((9, Value::new(x(), b)));
                }
                let pt = labeled(full2(), &labels);
                let lhs = in_basic_open(&pt, &both, &[9, 4]).unwrap();
                let rhs = in_basic_open(&pt, &phi, &[4]).unwrap()
                    && in_basic_open(&pt, &psi, &[9, 4]).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn fibers_carry_label_sections() {
    let single = labeled(full2(), &[]);
    let fiber = phi_fiber(&[single], &x()).unwrap();
    assert_eq!(fiber.elems.len(), 2);
    assert_eq!(fiber.etale.base.len(), 1);

    let pt0 = labeled(full2(), &[(1, Value::new(x(), 1))]);
    let pt1 = labeled(full1(), &[(2, Value::new(x(), 0))]);
    let fiber = phi_fiber(&[pt0, pt1], &x()).unwrap();
    assert_eq!(fiber.elems.len(), 3);
    // Each section picks exactly one element per point where the label is
    // defined, so over disjoint domains it meets at most one fiber.
    let v1 = fiber.sections[&1];
    let v2 = fiber.sections[&2];
    assert_eq!(points_of(v1).count(), 1);
    assert_eq!(points_of(v2).count(), 1);
    assert_eq!(v1 & v2, 0);
    for mask in [v1, v2] {
        for p in points_of(mask) {
            let (i, _) = fiber.elems[p];
            // injective over its support: no second element of the same fiber
            assert_eq!(
                points_of(mask).filter(|&q| fiber.elems[q].0 == i).count(),
                1
            );
        }
    }
}

#[test]
fn fibers_are_etale_and_reassemble_to_sheaves() {
    let pt0 = labeled(full2(), &[(1, Value::new(x(), 1)), (5, Value::new(TypeExpr::Two, TT))]);
    let pt1 = labeled(full1(), &[(2, Value::new(x(), 0)), (1, Value::new(x(), 0))]);
    let pt2 = labeled(full2(), &[(1, Value::new(x(), 1))]);
    let points = [pt0, pt1, pt2];
    for ty in [x(), TypeExpr::Two, TypeExpr::exp(TypeExpr::Two, x())] {
        let fiber = phi_fiber(&points, &ty).unwrap();
        is_local_homeo(&fiber.etale).unwrap();
        let sheaf = from_etale(&fiber.etale).unwrap();
        let sizes: Vec<usize> = points
            .iter()
            .map(|pt| pt.model.carrier_size(&ty).unwrap())
            .collect();
        assert_eq!(sheaf.sizes(), &sizes[..]);
    }
}

#[test]
fn stalks_recover_their_own_model() {
    let pt0 = labeled(full2(), &[(1, Value::new(x(), 1))]);
    let pt1 = labeled(full1(), &[(2, Value::new(x(), 0))]);
    let points = [pt0.clone(), pt1.clone()];
    let m0 = stalk_is_model(&points, 0).unwrap();
    let m1 = stalk_is_model(&points, 1).unwrap();
    assert_eq!(m0, pt0.model);
    assert_eq!(m1, pt1.model);
    assert_ne!(m0, pt1.model);
    // The recovered model passes the same closure check.
    assert_eq!(check_closure(&m0, &[singleton_c()]), Ok(ClosureVerdict::Valid));
}

#[test]
fn model_files_round_trip() {
    let sig = sig_xc();
    let text = "\
# a model with a two-element carrier and only two endomaps
carrier X: a b;
carrier X^X: id swap;
fun id: a|->a b|->b;
fun swap: a|->b b|->a;
const c = a;
label 3 = a;
";
    let (m, lab) = parse_general_model(text, &sig).unwrap();
    assert_eq!(m.carrier_size(&x()), Ok(2));
    assert_eq!(m.carrier_size(&TypeExpr::exp(x(), x())), Ok(2));
    assert_eq!(m.constant("c"), Some(&Value::new(x(), 0)));
    assert_eq!(lab.get(3), Some(&Value::new(x(), 0)));
    // Quantification over the declared carrier only sees id and swap:
    // every endomap is invertible here, unlike in the full model.
    let f = Var::new("f", TypeExpr::exp(x(), x()));
    let g = Var::new("g", TypeExpr::exp(x(), x()));
    let v = Var::new("x", x());
    let invertible = Term::forall(
        f.clone(),
        Term::exists(
            g.clone(),
            Term::forall(
                v.clone(),
                Term::eq(
                    Term::app(Term::Var(g), Term::app(Term::Var(f), Term::Var(v.clone()))),
                    Term::Var(v),
                ),
            ),
        ),
    );
    assert_eq!(henkin_satisfies(&m, &invertible, &Env::new()), Ok(true));
    let full = GeneralModel::full(&sig, &[("X", &["a", "b"])], 2).unwrap();
    assert_eq!(henkin_satisfies(&full, &invertible, &Env::new()), Ok(false));
    // Round trip through the formatter.
    let lp = LabeledPoint::new(m.clone(), lab.clone()).unwrap();
    let printed = format_labeled_point(&lp);
    let (m2, lab2) = parse_general_model(&printed, &sig).unwrap();
    assert_eq!(m2, m);
    assert_eq!(lab2, lab);
}

#[test]
fn file_errors_are_reported() {
    let sig = sig_xc();
    assert!(matches!(
        parse_general_model("carrier X: a b", &sig),
        Err(HenkinError::Parse { line: 1, .. })
    ));
    assert!(matches!(
        parse_general_model("carrier X: a b;\nlabel 0 = q;", &sig),
        Err(HenkinError::UnknownElement { .. })
    ));
    assert!(matches!(
        parse_general_model("carrier Y: a;", &sig),
        Err(HenkinError::Syntax(_))
    ));
}

#[test]
fn the_universe_is_tagged_and_finite() {
    let mut m = full2();
    m.ensure_carrier(&TypeExpr::exp(TypeExpr::Two, x())).unwrap();
    let u = m.universe();
    assert!(u.contains(&Value::new(x(), 1)));
    assert!(u.contains(&Value::new(TypeExpr::Two, FF)));
    assert!(u.contains(&Value::new(TypeExpr::exp(TypeExpr::Two, x()), 3)));
    assert!(!u.contains(&Value::new(x(), 2)));
    // X and 2 and the registered function carriers, nothing else.
    let funcs: usize = m
        .registered_function_types()
        .map(|ty| m.carrier_size(ty).unwrap())
        .sum();
    assert_eq!(u.len(), 2 + 2 + funcs);
}

#[test]
fn satisfaction_agrees_with_one_point_sheaf_semantics() {
    let thy = crate::deduction::default_fuzz_theory(Mode::HolClassical);
    let henkin = GeneralModel::full(&thy.signature, &[("X", &["e0", "e1"])], DEFAULT_DEPTH_CAP).unwrap();
    let mut henkin = henkin;
    henkin.set_constant("b", Value::new(x(), 1)).unwrap();
    let base = FinSpace::point();
    let xs = Sheaf::constant(base.clone(), 2);
    let sec = |i: usize| {
        SheafMorphism::new(Sheaf::terminal(base.clone()), xs.clone(), vec![vec![i]]).unwrap()
    };
    let consts = BTreeMap::from([("a".to_string(), sec(0)), ("b".to_string(), sec(1))]);
    let interp = Interpretation::new(
        Theory::new(thy.signature.clone()),
        base,
        Flavor::ClassicalC,
        BTreeMap::from([("X".to_string(), xs)]),
        consts,
        BTreeMap::new(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    let mut compared = 0;
    for depth in 1..=4 {
        for _ in 0..20 {
            let sigma = random_formula(&mut rng, &thy.signature, &crate::syntax::Context::empty(), depth);
            let sheaf_verdict = match interp.satisfies(&sigma) {
                Ok(v) => v,
                Err(_) => continue, // oversized exponential interpretations
            };
            let henkin_verdict = henkin_satisfies(&henkin, &sigma, &Env::new()).unwrap();
            assert_eq!(henkin_verdict, sheaf_verdict, "sentence {}", crate::syntax::print_term(&sigma));
            compared += 1;
        }
    }
    assert!(compared > 60);
}
