//! Seeded generation of random valid derivations. Every rule available in
//! the signature's mode has a hand-written template that places it at the
//! root; deeper trees are produced by validity-preserving wrappers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{fresh_name, Context, Formula, Mode, Signature, Term, Theory, TypeExpr, Var};

use super::{check_proof, ProofTree, RuleData, RuleId, Sequent, Verdict, ALL_RULES};

/// A small signature suitable for fuzzing: one basic type with two
/// constants, plus a unary relation in λ-mode.
pub fn default_fuzz_theory(mode: Mode) -> Theory {
    let mut sig = Signature::new(mode);
    sig.add_basic_type("X").unwrap();
    sig.add_constant("a", TypeExpr::basic("X")).unwrap();
    sig.add_constant("b", TypeExpr::basic("X")).unwrap();
    if mode == Mode::Lambda {
        sig.add_relation("R", vec![TypeExpr::basic("X")]).unwrap();
    }
    Theory::new(sig)
}

/// A random small type: basic types, 2 (HOL only), and occasional
/// products and exponents of those.
pub fn random_type<R: Rng>(rng: &mut R, sig: &Signature) -> TypeExpr {
    let basics: Vec<TypeExpr> = sig.basic_types.iter().map(|b| TypeExpr::basic(b)).collect();
    let mut atoms = basics.clone();
    if sig.mode.is_hol() {
        atoms.push(TypeExpr::Two);
    }
    let atom = |rng: &mut R| atoms.choose(rng).cloned().unwrap_or(TypeExpr::Two);
    match rng.gen_range(0..10) {
        0 => TypeExpr::prod(atom(rng), atom(rng)),
        1 => TypeExpr::exp(atom(rng), atom(rng)),
        _ => atom(rng),
    }
}

fn fresh_var<R: Rng>(rng: &mut R, ctx: &Context, ty: TypeExpr) -> Var {
    let taken = ctx.vars().iter().map(|v| v.name.clone()).collect();
    let base = ["u", "v", "w"].choose(rng).unwrap();
    Var::new(&fresh_name(base, &taken), ty)
}

/// A random context of at most two basic-typed variables.
pub fn random_context<R: Rng>(rng: &mut R, sig: &Signature) -> Context {
    let names = ["x", "y"];
    let n = rng.gen_range(0..=2);
    let mut vars = Vec::new();
    for name in names.iter().take(n) {
        let basics: Vec<&String> = sig.basic_types.iter().collect();
        if let Some(b) = basics.choose(rng) {
            vars.push(Var::new(name, TypeExpr::basic(b)));
        }
    }
    Context::new(vars).unwrap()
}

/// A random term of the given type, if one can be synthesized from the
/// context and the signature's constants.
pub fn random_term<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    ctx: &Context,
    ty: &TypeExpr,
    fuel: usize,
) -> Option<Term> {
    let mut leaves: Vec<Term> = ctx
        .vars()
        .iter()
        .filter(|v| v.ty == *ty)
        .map(|v| Term::Var(v.clone()))
        .collect();
    for (name, cty) in &sig.constants {
        if cty == ty {
            leaves.push(Term::cnst(name));
        }
    }
    // Structural syntheses.
    if fuel > 0 {
        let deeper = rng.gen_range(0..3) == 0 || leaves.is_empty();
        if deeper {
            match ty {
                TypeExpr::Prod(a, b) => {
                    let l = random_term(rng, sig, ctx, a, fuel - 1)?;
                    let r = random_term(rng, sig, ctx, b, fuel - 1)?;
                    return Some(Term::pair(l, r));
                }
                TypeExpr::Exp(z, y) => {
                    let u = fresh_var(rng, ctx, (**y).clone());
                    let inner = ctx.extend(u.clone()).ok()?;
                    let body = random_term(rng, sig, &inner, z, fuel - 1)?;
                    return Some(Term::lam(u, body));
                }
                TypeExpr::Two => {
                    return Some(random_formula(rng, sig, ctx, 1));
                }
                TypeExpr::Basic(_) => {}
            }
        }
        // Occasionally wrap a leaf in a projection redex for coverage.
        if !leaves.is_empty() && rng.gen_range(0..6) == 0 {
            let t = leaves.choose(rng).unwrap().clone();
            let other = random_term(rng, sig, ctx, ty, 0).unwrap_or_else(|| t.clone());
            return Some(Term::proj1(Term::pair(t, other)));
        }
    }
    if *ty == TypeExpr::Two {
        return Some(random_formula(rng, sig, ctx, 0));
    }
    leaves.choose(rng).cloned()
}

/// A random formula over the context; total (falls back to ⊤).
pub fn random_formula<R: Rng>(rng: &mut R, sig: &Signature, ctx: &Context, depth: usize) -> Formula {
    if depth == 0 {
        let mut atoms = vec![Term::Top, Term::Bot];
        // Equations over a random small type. Types mentioning 2 are
        // skipped so term and formula generation cannot recurse forever
        // through each other.
        let ty = random_type(rng, sig);
        if !ty.mentions_two() {
            if let (Some(l), Some(r)) = (
                random_term(rng, sig, ctx, &ty, 2),
                random_term(rng, sig, ctx, &ty, 2),
            ) {
                atoms.push(Term::eq(l, r));
            }
        }
        if sig.mode.is_hol() {
            for v in ctx.vars() {
                if v.ty == TypeExpr::Two {
                    atoms.push(Term::Var(v.clone()));
                }
            }
        }
        for (name, args) in &sig.relations {
            let mut ok = Vec::new();
            for a in args {
                match random_term(rng, sig, ctx, a, 2) {
                    Some(t) => ok.push(t),
                    None => break,
                }
            }
            if ok.len() == args.len() {
                atoms.push(Term::RelApp(name.clone(), ok));
            }
        }
        return atoms.choose(rng).cloned().unwrap();
    }
    match rng.gen_range(0..8) {
        0 => Term::not(random_formula(rng, sig, ctx, depth - 1)),
        1 => Term::and(
            random_formula(rng, sig, ctx, depth - 1),
            random_formula(rng, sig, ctx, depth - 1),
        ),
        2 => Term::or(
            random_formula(rng, sig, ctx, depth - 1),
            random_formula(rng, sig, ctx, depth - 1),
        ),
        3 => Term::implies(
            random_formula(rng, sig, ctx, depth - 1),
            random_formula(rng, sig, ctx, depth - 1),
        ),
        4 | 5 => {
            let ty = random_type(rng, sig);
            let ty = if sig.mode == Mode::Lambda && ty.mentions_two() {
                TypeExpr::basic(sig.basic_types.iter().next().unwrap())
            } else {
                ty
            };
            let v = fresh_var(rng, ctx, ty);
            let inner = ctx.extend(v.clone()).unwrap();
            let body = random_formula(rng, sig, &inner, depth - 1);
            if rng.gen_bool(0.5) {
                Term::forall(v, body)
            } else {
                Term::exists(v, body)
            }
        }
        _ => random_formula(rng, sig, ctx, 0),
    }
}

fn refl(ctx: Context, phi: Formula) -> ProofTree {
    ProofTree::leaf(RuleId::R1a, RuleData::CtxFormula { ctx, phi })
}

/// Builds a valid derivation whose root uses the given rule.
fn template<R: Rng>(rule: RuleId, rng: &mut R, thy: &Theory) -> Option<ProofTree> {
    let sig = &thy.signature;
    let ctx = random_context(rng, sig);
    let phi = random_formula(rng, sig, &ctx, 1);
    let psi = random_formula(rng, sig, &ctx, 1);
    let basic_ty = || TypeExpr::basic(sig.basic_types.iter().next().unwrap());
    Some(match rule {
        RuleId::R1a => refl(ctx, phi),
        RuleId::R1b => {
            // φ ⊢ ⊤ and ⊤ ⊢ τ=τ, cut to φ ⊢ τ=τ.
            let tau = random_term(rng, sig, &ctx, &basic_ty(), 2)?;
            let top = ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx: ctx.clone(), phi });
            let eq = ProofTree::leaf(RuleId::R2a, RuleData::CtxTerm { ctx, term: tau });
            ProofTree::node(RuleId::R1b, RuleData::None, vec![top, eq])
        }
        RuleId::R1c => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y.clone()).ok()?;
            let tau = random_term(rng, sig, &ctx, &y.ty, 2)?;
            let body = random_formula(rng, sig, &inner, 1);
            ProofTree::node(
                RuleId::R1c,
                RuleData::Subst { ctx, var: y, term: tau },
                vec![refl(inner, body)],
            )
        }
        RuleId::R2a => {
            let ty = random_type(rng, sig);
            let term = random_term(rng, sig, &ctx, &ty, 3)
                .or_else(|| random_term(rng, sig, &ctx, &basic_ty(), 3))?;
            ProofTree::leaf(RuleId::R2a, RuleData::CtxTerm { ctx, term })
        }
        RuleId::R2b => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y.clone()).ok()?;
            let body = random_formula(rng, sig, &inner, 1);
            let lhs = random_term(rng, sig, &ctx, &y.ty, 2)?;
            let rhs = random_term(rng, sig, &ctx, &y.ty, 2)?;
            ProofTree::leaf(
                RuleId::R2b,
                RuleData::EqSubst { ctx, var: y, phi: body, lhs, rhs },
            )
        }
        RuleId::R2c => {
            // ϑ∧φ ⊢ φ twice over, giving ϑ ⊢ φ⇒φ from both sides.
            let both = Term::and(psi.clone(), phi.clone());
            let half = ProofTree::node(
                RuleId::R5fFwd,
                RuleData::None,
                vec![ProofTree::node(
                    RuleId::R5dBwd,
                    RuleData::Index(2),
                    vec![refl(ctx, both)],
                )],
            );
            ProofTree::node(RuleId::R2c, RuleData::None, vec![half.clone(), half])
        }
        RuleId::R2d | RuleId::R4b => {
            let (yt, zt) = (basic_ty(), basic_ty());
            let u = fresh_var(rng, &ctx, yt.clone());
            let inner = ctx.extend(u.clone()).ok()?;
            let mk = |rng: &mut R| -> Option<Term> {
                Some(Term::lam(u.clone(), random_term(rng, sig, &inner, &zt, 2)?))
            };
            let alpha = mk(rng)?;
            let var = fresh_var(rng, &ctx, yt);
            if rule == RuleId::R2d {
                let beta = mk(rng)?;
                ProofTree::leaf(RuleId::R2d, RuleData::FunExt { ctx, var, alpha, beta })
            } else {
                ProofTree::leaf(RuleId::R4b, RuleData::Eta { ctx, var, alpha })
            }
        }
        RuleId::R3a => {
            let ty = TypeExpr::prod(basic_ty(), basic_ty());
            let term = random_term(rng, sig, &ctx, &ty, 3)?;
            ProofTree::leaf(RuleId::R3a, RuleData::CtxTerm { ctx, term })
        }
        RuleId::R3b => {
            let fst = random_term(rng, sig, &ctx, &basic_ty(), 2)?;
            let snd = random_term(rng, sig, &ctx, &basic_ty(), 2)?;
            let index = rng.gen_range(1..=2);
            ProofTree::leaf(RuleId::R3b, RuleData::ProjBeta { ctx, index, fst, snd })
        }
        RuleId::R4a => {
            let x = Var::new("x", basic_ty());
            let ctx = if ctx.lookup("x").is_some() {
                ctx
            } else {
                ctx.extend(x.clone()).ok()?
            };
            let x = ctx.lookup("x").unwrap().clone();
            let ty = random_type(rng, sig);
            let body = random_term(rng, sig, &ctx, &ty, 2)
                .or_else(|| Some(Term::Var(x.clone())))?;
            ProofTree::leaf(RuleId::R4a, RuleData::Beta { ctx, var: x, body })
        }
        RuleId::R5a => ProofTree::leaf(RuleId::R5a, RuleData::CtxFormula { ctx, phi }),
        RuleId::R5b => ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx, phi }),
        RuleId::R5cFwd => {
            let neg = Term::not(psi);
            ProofTree::node(RuleId::R5cFwd, RuleData::None, vec![refl(ctx, neg)])
        }
        RuleId::R5cBwd => {
            let both = Term::and(Term::Bot, psi);
            let drop = ProofTree::node(RuleId::R5dBwd, RuleData::Index(1), vec![refl(ctx, both)]);
            ProofTree::node(RuleId::R5cBwd, RuleData::None, vec![drop])
        }
        RuleId::R5dFwd => {
            let top = |phi: Formula| {
                ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx: ctx.clone(), phi })
            };
            ProofTree::node(RuleId::R5dFwd, RuleData::None, vec![top(phi.clone()), top(phi)])
        }
        RuleId::R5dBwd => {
            let both = Term::and(phi, psi);
            ProofTree::node(RuleId::R5dBwd, RuleData::Index(rng.gen_range(1..=2)), vec![refl(ctx, both)])
        }
        RuleId::R5eFwd => {
            let both = Term::or(phi, psi);
            ProofTree::node(RuleId::R5eFwd, RuleData::Index(rng.gen_range(1..=2)), vec![refl(ctx, both)])
        }
        RuleId::R5eBwd => {
            let top = |phi: Formula| {
                ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx: ctx.clone(), phi })
            };
            ProofTree::node(RuleId::R5eBwd, RuleData::None, vec![top(phi), top(psi)])
        }
        RuleId::R5fFwd => {
            let both = Term::and(psi, phi);
            let drop = ProofTree::node(RuleId::R5dBwd, RuleData::Index(2), vec![refl(ctx, both)]);
            ProofTree::node(RuleId::R5fFwd, RuleData::None, vec![drop])
        }
        RuleId::R5fBwd => {
            let fwd = template(RuleId::R5fFwd, rng, thy)?;
            ProofTree::node(RuleId::R5fBwd, RuleData::None, vec![fwd])
        }
        RuleId::R5gFwd => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y).ok()?;
            let top = ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx: inner, phi });
            ProofTree::node(RuleId::R5gFwd, RuleData::None, vec![top])
        }
        RuleId::R5gBwd => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y.clone()).ok()?;
            let body = random_formula(rng, sig, &inner, 1);
            let all = Term::forall(y, body);
            ProofTree::node(RuleId::R5gBwd, RuleData::None, vec![refl(ctx, all)])
        }
        RuleId::R5hFwd => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y.clone()).ok()?;
            let body = random_formula(rng, sig, &inner, 1);
            let some = Term::exists(y, body);
            ProofTree::node(RuleId::R5hFwd, RuleData::None, vec![refl(ctx, some)])
        }
        RuleId::R5hBwd => {
            let y = fresh_var(rng, &ctx, basic_ty());
            let inner = ctx.extend(y).ok()?;
            let theta = random_formula(rng, sig, &inner, 1);
            let top = ProofTree::leaf(RuleId::R5b, RuleData::CtxFormula { ctx: inner, phi: theta });
            ProofTree::node(RuleId::R5hBwd, RuleData::None, vec![top])
        }
        RuleId::Classical => ProofTree::leaf(RuleId::Classical, RuleData::None),
        RuleId::Axiom => {
            if thy.axioms.is_empty() {
                return None;
            }
            let i = rng.gen_range(0..thy.axioms.len());
            ProofTree::leaf(RuleId::Axiom, RuleData::AxiomIndex(i))
        }
    })
}

/// Validity-preserving wrappers used to deepen a tree.
fn wrap<R: Rng>(tree: ProofTree, conclusion: &Sequent, rng: &mut R) -> ProofTree {
    let mut options: Vec<u8> = vec![0, 1];
    if matches!(conclusion.lhs, Term::And(..)) {
        options.push(2);
    }
    if matches!(conclusion.rhs, Term::And(..)) {
        options.push(3);
    }
    match options.choose(rng).unwrap() {
        0 => {
            let again = refl(conclusion.ctx.clone(), conclusion.rhs.clone());
            ProofTree::node(RuleId::R1b, RuleData::None, vec![tree, again])
        }
        1 => ProofTree::node(RuleId::R5dFwd, RuleData::None, vec![tree.clone(), tree]),
        2 => ProofTree::node(RuleId::R5fFwd, RuleData::None, vec![tree]),
        _ => ProofTree::node(
            RuleId::R5dBwd,
            RuleData::Index(rng.gen_range(1..=2)),
            vec![tree],
        ),
    }
}

/// A random derivation of depth at most `depth` that `check_proof`
/// accepts; deterministic per seed, and every rule available in the
/// theory's mode appears at the root with positive probability.
pub fn random_derivation(seed: u64, depth: usize, thy: &Theory) -> ProofTree {
    assert!(depth >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = thy.signature.mode;
    loop {
        let rules: Vec<RuleId> = ALL_RULES
            .iter()
            .copied()
            .filter(|r| r.available_in(mode))
            .filter(|r| *r != RuleId::Axiom || !thy.axioms.is_empty())
            .collect();
        let rule = *rules.choose(&mut rng).unwrap();
        let Some(mut tree) = template(rule, &mut rng, thy) else {
            continue;
        };
        if tree.depth() > depth {
            continue;
        }
        // Deepen while the budget allows.
        while tree.depth() < depth && rng.gen_bool(0.4) {
            let Verdict::Valid(conc) = check_proof(&tree, thy) else {
                break;
            };
            tree = wrap(tree, &conc, &mut rng);
        }
        debug_assert!(check_proof(&tree, thy).is_valid(), "generator produced an invalid tree");
        if check_proof(&tree, thy).is_valid() {
            return tree;
        }
    }
}

/// Used by tests to confirm generator coverage.
pub fn rules_used(tree: &ProofTree, out: &mut std::collections::BTreeSet<RuleId>) {
    out.insert(tree.rule);
    for p in &tree.premises {
        rules_used(p, out);
    }
}
