//! The entailment calculus: sequents, rule instances, proof trees and the
//! checker, plus a seeded generator of valid derivations for soundness
//! fuzzing.

mod fuzz;
mod sexpr;

pub use fuzz::{
    default_fuzz_theory, random_context, random_derivation, random_formula, random_term,
    random_type, rules_used,
};
pub use sexpr::{parse_proof, print_proof, proof_theory_ref};

use crate::error::DeductionError;
use crate::syntax::{
    alpha_eq, check_formula, free_vars, substitute, typecheck, Context, Formula, Mode, Term,
    Theory, TypeExpr, Var,
};

/// An entailment φ ⊢_x ψ: both formulas well-typed with free variables
/// inside the context.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequent {
    pub ctx: Context,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(ctx: Context, lhs: Formula, rhs: Formula, thy: &Theory) -> Result<Sequent, DeductionError> {
        check_formula(&lhs, &ctx, &thy.signature)?;
        check_formula(&rhs, &ctx, &thy.signature)?;
        Ok(Sequent { ctx, lhs, rhs })
    }

    /// Alpha-equality with identical contexts.
    pub fn alpha_eq(&self, other: &Sequent) -> bool {
        self.ctx == other.ctx && alpha_eq(&self.lhs, &other.lhs) && alpha_eq(&self.rhs, &other.rhs)
    }
}

impl std::fmt::Display for Sequent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let vars: Vec<String> = self
            .ctx
            .vars()
            .iter()
            .map(|v| format!("{}:{}", v.name, v.ty))
            .collect();
        write!(f, "{} |-[{}] {}", self.lhs, vars.join(", "), self.rhs)
    }
}

/// The rules of the calculus. Biconditional rules are split into two
/// directions so that checking is purely bottom-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    R1a,
    R1b,
    R1c,
    R2a,
    R2b,
    R2c,
    R2d,
    R3a,
    R3b,
    R4a,
    R4b,
    R5a,
    R5b,
    R5cFwd,
    R5cBwd,
    R5dFwd,
    R5dBwd,
    R5eFwd,
    R5eBwd,
    R5fFwd,
    R5fBwd,
    R5gFwd,
    R5gBwd,
    R5hFwd,
    R5hBwd,
    Classical,
    Axiom,
}

pub const ALL_RULES: [RuleId; 27] = [
    RuleId::R1a,
    RuleId::R1b,
    RuleId::R1c,
    RuleId::R2a,
    RuleId::R2b,
    RuleId::R2c,
    RuleId::R2d,
    RuleId::R3a,
    RuleId::R3b,
    RuleId::R4a,
    RuleId::R4b,
    RuleId::R5a,
    RuleId::R5b,
    RuleId::R5cFwd,
    RuleId::R5cBwd,
    RuleId::R5dFwd,
    RuleId::R5dBwd,
    RuleId::R5eFwd,
    RuleId::R5eBwd,
    RuleId::R5fFwd,
    RuleId::R5fBwd,
    RuleId::R5gFwd,
    RuleId::R5gBwd,
    RuleId::R5hFwd,
    RuleId::R5hBwd,
    RuleId::Classical,
    RuleId::Axiom,
];

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::R1a => "1a",
            RuleId::R1b => "1b",
            RuleId::R1c => "1c",
            RuleId::R2a => "2a",
            RuleId::R2b => "2b",
            RuleId::R2c => "2c",
            RuleId::R2d => "2d",
            RuleId::R3a => "3a",
            RuleId::R3b => "3b",
            RuleId::R4a => "4a",
            RuleId::R4b => "4b",
            RuleId::R5a => "5a",
            RuleId::R5b => "5b",
            RuleId::R5cFwd => "5c-fwd",
            RuleId::R5cBwd => "5c-bwd",
            RuleId::R5dFwd => "5d-fwd",
            RuleId::R5dBwd => "5d-bwd",
            RuleId::R5eFwd => "5e-fwd",
            RuleId::R5eBwd => "5e-bwd",
            RuleId::R5fFwd => "5f-fwd",
            RuleId::R5fBwd => "5f-bwd",
            RuleId::R5gFwd => "5g-fwd",
            RuleId::R5gBwd => "5g-bwd",
            RuleId::R5hFwd => "5h-fwd",
            RuleId::R5hBwd => "5h-bwd",
            RuleId::Classical => "classical",
            RuleId::Axiom => "axiom",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleId> {
        ALL_RULES.iter().copied().find(|r| r.name() == s)
    }

    /// Availability per mode: 2(c) needs the type of formulas; Classical
    /// belongs to ⊢^c only.
    pub fn available_in(self, mode: Mode) -> bool {
        match self {
            RuleId::R2c => mode != Mode::Lambda,
            RuleId::Classical => mode == Mode::HolClassical,
            _ => true,
        }
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantiation data for the rule schemas that need it.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleData {
    None,
    /// Selects a conjunct/disjunct (1-based) for 5d-bwd / 5e-fwd.
    Index(usize),
    /// Cites a theory axiom.
    AxiomIndex(usize),
    /// 1a, 5a, 5b.
    CtxFormula { ctx: Context, phi: Formula },
    /// 2a, 3a.
    CtxTerm { ctx: Context, term: Term },
    /// 1c: the conclusion context, the substituted variable, the term.
    Subst { ctx: Context, var: Var, term: Term },
    /// 2b.
    EqSubst { ctx: Context, var: Var, phi: Formula, lhs: Term, rhs: Term },
    /// 2d.
    FunExt { ctx: Context, var: Var, alpha: Term, beta: Term },
    /// 3b.
    ProjBeta { ctx: Context, index: usize, fst: Term, snd: Term },
    /// 4a.
    Beta { ctx: Context, var: Var, body: Term },
    /// 4b.
    Eta { ctx: Context, var: Var, alpha: Term },
}

fn schema(rule: RuleId, detail: &str) -> DeductionError {
    DeductionError::SchemaMismatch {
        rule: rule.name().into(),
        detail: detail.into(),
    }
}

fn side(rule: RuleId, detail: &str) -> DeductionError {
    DeductionError::SideConditionViolated {
        rule: rule.name().into(),
        detail: detail.into(),
    }
}

/// The classical axiom ∀p:2. p ∨ ¬p.
pub fn excluded_middle() -> Formula {
    let p = Var::new("p", TypeExpr::Two);
    Term::forall(p.clone(), Term::or(Term::Var(p.clone()), Term::not(Term::Var(p))))
}

/// Checks one rule instance and returns the conclusion it licenses.
pub fn check_step(
    rule: RuleId,
    data: &RuleData,
    premises: &[Sequent],
    thy: &Theory,
) -> Result<Sequent, DeductionError> {
    let sig = &thy.signature;
    let mode = sig.mode;
    if !rule.available_in(mode) {
        return Err(DeductionError::RuleNotInMode {
            rule: rule.name().into(),
            mode: mode.as_str().into(),
        });
    }
    let want_premises = |n: usize| -> Result<(), DeductionError> {
        if premises.len() != n {
            Err(schema(rule, &format!("expected {} premises, got {}", n, premises.len())))
        } else {
            Ok(())
        }
    };
    match (rule, data) {
        (RuleId::R1a, RuleData::CtxFormula { ctx, phi }) => {
            want_premises(0)?;
            Sequent::new(ctx.clone(), phi.clone(), phi.clone(), thy)
        }
        (RuleId::R1b, RuleData::None) => {
            want_premises(2)?;
            let (s1, s2) = (&premises[0], &premises[1]);
            if s1.ctx != s2.ctx {
                return Err(schema(rule, "premise contexts differ"));
            }
            if !alpha_eq(&s1.rhs, &s2.lhs) {
                return Err(schema(rule, "cut formulas do not match"));
            }
            Sequent::new(s1.ctx.clone(), s1.lhs.clone(), s2.rhs.clone(), thy)
        }
        (RuleId::R1c, RuleData::Subst { ctx, var, term }) => {
            want_premises(1)?;
            let s = &premises[0];
            let expected = ctx.extend(var.clone()).map_err(DeductionError::Syntax)?;
            if s.ctx != expected {
                return Err(schema(rule, "premise context is not the conclusion context plus the variable"));
            }
            let tty = typecheck(term, ctx, sig)?;
            if tty != var.ty {
                return Err(side(rule, "substituted term has the wrong type"));
            }
            let lhs = substitute(&s.lhs, term, var)?;
            let rhs = substitute(&s.rhs, term, var)?;
            Sequent::new(ctx.clone(), lhs, rhs, thy)
        }
        (RuleId::R2a, RuleData::CtxTerm { ctx, term }) => {
            want_premises(0)?;
            typecheck(term, ctx, sig)?;
            Sequent::new(ctx.clone(), Term::Top, Term::eq(term.clone(), term.clone()), thy)
        }
        (RuleId::R2b, RuleData::EqSubst { ctx, var, phi, lhs, rhs }) => {
            want_premises(0)?;
            let t1 = typecheck(lhs, ctx, sig)?;
            let t2 = typecheck(rhs, ctx, sig)?;
            if t1 != var.ty || t2 != var.ty {
                return Err(side(rule, "equated terms must have the variable's type"));
            }
            let inner = ctx.extend(var.clone()).map_err(DeductionError::Syntax)?;
            check_formula(phi, &inner, sig)?;
            let left = substitute(phi, lhs, var)?;
            let right = substitute(phi, rhs, var)?;
            Sequent::new(
                ctx.clone(),
                Term::eq(lhs.clone(), rhs.clone()),
                Term::implies(left, right),
                thy,
            )
        }
        (RuleId::R2c, RuleData::None) => {
            want_premises(2)?;
            let (s1, s2) = (&premises[0], &premises[1]);
            if s1.ctx != s2.ctx || !alpha_eq(&s1.lhs, &s2.lhs) {
                return Err(schema(rule, "premises must share context and hypothesis"));
            }
            let (Term::Implies(a1, b1), Term::Implies(a2, b2)) = (&s1.rhs, &s2.rhs) else {
                return Err(schema(rule, "premises must conclude implications"));
            };
            if !alpha_eq(a1, b2) || !alpha_eq(b1, a2) {
                return Err(schema(rule, "implications are not mutually converse"));
            }
            Sequent::new(
                s1.ctx.clone(),
                s1.lhs.clone(),
                Term::eq((**a1).clone(), (**b1).clone()),
                thy,
            )
        }
        (RuleId::R2d, RuleData::FunExt { ctx, var, alpha, beta }) => {
            want_premises(0)?;
            let ta = typecheck(alpha, ctx, sig)?;
            let tb = typecheck(beta, ctx, sig)?;
            if ta != tb {
                return Err(side(rule, "terms must share an exponential type"));
            }
            let TypeExpr::Exp(_, arg) = &ta else {
                return Err(side(rule, "terms must have exponential type"));
            };
            if var.ty != **arg {
                return Err(side(rule, "variable must have the argument type"));
            }
            if ctx.lookup(&var.name).is_some() {
                return Err(side(rule, "variable must be fresh for the context"));
            }
            let app = |t: &Term| Term::app(t.clone(), Term::Var(var.clone()));
            let lhs = Term::forall(var.clone(), Term::eq(app(alpha), app(beta)));
            Sequent::new(ctx.clone(), lhs, Term::eq(alpha.clone(), beta.clone()), thy)
        }
        (RuleId::R3a, RuleData::CtxTerm { ctx, term }) => {
            want_premises(0)?;
            let ty = typecheck(term, ctx, sig)?;
            if !matches!(ty, TypeExpr::Prod(..)) {
                return Err(side(rule, "term must have product type"));
            }
            let pair = Term::pair(Term::proj1(term.clone()), Term::proj2(term.clone()));
            Sequent::new(ctx.clone(), Term::Top, Term::eq(pair, term.clone()), thy)
        }
        (RuleId::R3b, RuleData::ProjBeta { ctx, index, fst, snd }) => {
            want_premises(0)?;
            typecheck(fst, ctx, sig)?;
            typecheck(snd, ctx, sig)?;
            let pair = Term::pair(fst.clone(), snd.clone());
            let (proj, tau) = match index {
                1 => (Term::proj1(pair), fst.clone()),
                2 => (Term::proj2(pair), snd.clone()),
                _ => return Err(schema(rule, "projection index must be 1 or 2")),
            };
            Sequent::new(ctx.clone(), Term::Top, Term::eq(proj, tau), thy)
        }
        (RuleId::R4a, RuleData::Beta { ctx, var, body }) => {
            want_premises(0)?;
            if ctx.lookup(&var.name).map(|v| &v.ty) != Some(&var.ty) {
                return Err(side(rule, "applied variable must be in the context"));
            }
            typecheck(body, ctx, sig)?;
            let redex = Term::app(Term::lam(var.clone(), body.clone()), Term::Var(var.clone()));
            Sequent::new(ctx.clone(), Term::Top, Term::eq(redex, body.clone()), thy)
        }
        (RuleId::R4b, RuleData::Eta { ctx, var, alpha }) => {
            want_premises(0)?;
            let ta = typecheck(alpha, ctx, sig)?;
            let TypeExpr::Exp(_, arg) = &ta else {
                return Err(side(rule, "term must have exponential type"));
            };
            if var.ty != **arg {
                return Err(side(rule, "variable must have the argument type"));
            }
            if ctx.lookup(&var.name).is_some() {
                return Err(side(rule, "variable must be fresh for the context"));
            }
            let expanded = Term::lam(var.clone(), Term::app(alpha.clone(), Term::Var(var.clone())));
            Sequent::new(ctx.clone(), Term::Top, Term::eq(expanded, alpha.clone()), thy)
        }
        (RuleId::R5a, RuleData::CtxFormula { ctx, phi }) => {
            want_premises(0)?;
            Sequent::new(ctx.clone(), Term::Bot, phi.clone(), thy)
        }
        (RuleId::R5b, RuleData::CtxFormula { ctx, phi }) => {
            want_premises(0)?;
            Sequent::new(ctx.clone(), phi.clone(), Term::Top, thy)
        }
        (RuleId::R5cFwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::Not(psi) = &s.rhs else {
                return Err(schema(rule, "premise must conclude a negation"));
            };
            Sequent::new(
                s.ctx.clone(),
                Term::and(s.lhs.clone(), (**psi).clone()),
                Term::Bot,
                thy,
            )
        }
        (RuleId::R5cBwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            if s.rhs != Term::Bot {
                return Err(schema(rule, "premise must conclude falsum"));
            }
            let Term::And(phi, psi) = &s.lhs else {
                return Err(schema(rule, "premise hypothesis must be a conjunction"));
            };
            Sequent::new(s.ctx.clone(), (**phi).clone(), Term::not((**psi).clone()), thy)
        }
        (RuleId::R5dFwd, RuleData::None) => {
            want_premises(2)?;
            let (s1, s2) = (&premises[0], &premises[1]);
            if s1.ctx != s2.ctx || !alpha_eq(&s1.lhs, &s2.lhs) {
                return Err(schema(rule, "premises must share context and hypothesis"));
            }
            Sequent::new(
                s1.ctx.clone(),
                s1.lhs.clone(),
                Term::and(s1.rhs.clone(), s2.rhs.clone()),
                thy,
            )
        }
        (RuleId::R5dBwd, RuleData::Index(i)) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::And(phi, psi) = &s.rhs else {
                return Err(schema(rule, "premise must conclude a conjunction"));
            };
            let picked = match i {
                1 => (**phi).clone(),
                2 => (**psi).clone(),
                _ => return Err(schema(rule, "conjunct index must be 1 or 2")),
            };
            Sequent::new(s.ctx.clone(), s.lhs.clone(), picked, thy)
        }
        (RuleId::R5eFwd, RuleData::Index(i)) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::Or(th, phi) = &s.lhs else {
                return Err(schema(rule, "premise hypothesis must be a disjunction"));
            };
            let picked = match i {
                1 => (**th).clone(),
                2 => (**phi).clone(),
                _ => return Err(schema(rule, "disjunct index must be 1 or 2")),
            };
            Sequent::new(s.ctx.clone(), picked, s.rhs.clone(), thy)
        }
        (RuleId::R5eBwd, RuleData::None) => {
            want_premises(2)?;
            let (s1, s2) = (&premises[0], &premises[1]);
            if s1.ctx != s2.ctx || !alpha_eq(&s1.rhs, &s2.rhs) {
                return Err(schema(rule, "premises must share context and conclusion"));
            }
            Sequent::new(
                s1.ctx.clone(),
                Term::or(s1.lhs.clone(), s2.lhs.clone()),
                s1.rhs.clone(),
                thy,
            )
        }
        (RuleId::R5fFwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::And(th, phi) = &s.lhs else {
                return Err(schema(rule, "premise hypothesis must be a conjunction"));
            };
            Sequent::new(
                s.ctx.clone(),
                (**th).clone(),
                Term::implies((**phi).clone(), s.rhs.clone()),
                thy,
            )
        }
        (RuleId::R5fBwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::Implies(phi, psi) = &s.rhs else {
                return Err(schema(rule, "premise must conclude an implication"));
            };
            Sequent::new(
                s.ctx.clone(),
                Term::and(s.lhs.clone(), (**phi).clone()),
                (**psi).clone(),
                thy,
            )
        }
        (RuleId::R5gFwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Some((outer, y)) = s.ctx.split_last() else {
                return Err(schema(rule, "premise context must be nonempty"));
            };
            if free_vars(&s.lhs).contains(&y) {
                return Err(side(rule, "quantified variable occurs free in the hypothesis"));
            }
            Sequent::new(outer, s.lhs.clone(), Term::forall(y, s.rhs.clone()), thy)
        }
        (RuleId::R5gBwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::Forall(y, phi) = &s.rhs else {
                return Err(schema(rule, "premise must conclude a universal"));
            };
            if s.ctx.lookup(&y.name).is_some() {
                return Err(side(rule, "bound variable clashes with the context"));
            }
            let ctx = s.ctx.extend(y.clone()).map_err(DeductionError::Syntax)?;
            Sequent::new(ctx, s.lhs.clone(), (**phi).clone(), thy)
        }
        (RuleId::R5hFwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Term::Exists(y, th) = &s.lhs else {
                return Err(schema(rule, "premise hypothesis must be an existential"));
            };
            if s.ctx.lookup(&y.name).is_some() {
                return Err(side(rule, "bound variable clashes with the context"));
            }
            let ctx = s.ctx.extend(y.clone()).map_err(DeductionError::Syntax)?;
            Sequent::new(ctx, (**th).clone(), s.rhs.clone(), thy)
        }
        (RuleId::R5hBwd, RuleData::None) => {
            want_premises(1)?;
            let s = &premises[0];
            let Some((outer, y)) = s.ctx.split_last() else {
                return Err(schema(rule, "premise context must be nonempty"));
            };
            if free_vars(&s.rhs).contains(&y) {
                return Err(side(rule, "quantified variable occurs free in the conclusion"));
            }
            Sequent::new(outer, Term::exists(y, s.lhs.clone()), s.rhs.clone(), thy)
        }
        (RuleId::Classical, RuleData::None) => {
            want_premises(0)?;
            Sequent::new(Context::empty(), Term::Top, excluded_middle(), thy)
        }
        (RuleId::Axiom, RuleData::AxiomIndex(i)) => {
            want_premises(0)?;
            let sigma = thy.axioms.get(*i).ok_or(DeductionError::AxiomOutOfRange {
                index: *i,
                count: thy.axioms.len(),
            })?;
            Sequent::new(Context::empty(), Term::Top, sigma.clone(), thy)
        }
        _ => Err(schema(rule, "rule data has the wrong shape")),
    }
}

/// A derivation: rule, instantiation data and premise subtrees. The
/// conclusion is recomputed by the checker rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofTree {
    pub rule: RuleId,
    pub data: RuleData,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaf(rule: RuleId, data: RuleData) -> ProofTree {
        ProofTree {
            rule,
            data,
            premises: Vec::new(),
        }
    }

    pub fn node(rule: RuleId, data: RuleData, premises: Vec<ProofTree>) -> ProofTree {
        ProofTree {
            rule,
            data,
            premises,
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }
}

/// Result of checking a proof.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid(Sequent),
    /// `path` indexes premises from the root down to the failing node.
    Invalid { path: Vec<usize>, error: DeductionError },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }
}

/// Checks every node bottom-up; the verdict carries the root conclusion
/// or the first failing node.
pub fn check_proof(p: &ProofTree, thy: &Theory) -> Verdict {
    fn go(p: &ProofTree, thy: &Theory, path: &mut Vec<usize>) -> Result<Sequent, (Vec<usize>, DeductionError)> {
        let mut concs = Vec::with_capacity(p.premises.len());
        for (i, sub) in p.premises.iter().enumerate() {
            path.push(i);
            concs.push(go(sub, thy, path)?);
            path.pop();
        }
        check_step(p.rule, &p.data, &concs, thy).map_err(|e| (path.clone(), e))
    }
    match go(p, thy, &mut Vec::new()) {
        Ok(s) => Verdict::Valid(s),
        Err((path, error)) => Verdict::Invalid { path, error },
    }
}

/// Re-contexts a derivation of φ ⊢_x ψ to φ ⊢_{x,y} ψ for a fresh `y`,
/// via a cut against `ψ ⊢_{x,y} ψ` generalized by 5(g) in both directions.
pub fn weaken_tree(p: &ProofTree, thy: &Theory, y: &Var) -> Result<ProofTree, DeductionError> {
    let Verdict::Valid(s) = check_proof(p, thy) else {
        return Err(schema(RuleId::R5gBwd, "cannot weaken an invalid proof"));
    };
    if s.ctx.lookup(&y.name).is_some() || free_vars(&s.rhs).contains(y) {
        return Err(side(RuleId::R5gFwd, "weakening variable is not fresh"));
    }
    let wide = s.ctx.extend(y.clone()).map_err(DeductionError::Syntax)?;
    // ψ ⊢_{x,y} ψ, then ψ ⊢_x ∀y.ψ.
    let refl = ProofTree::leaf(
        RuleId::R1a,
        RuleData::CtxFormula {
            ctx: wide,
            phi: s.rhs.clone(),
        },
    );
    let gen = ProofTree::node(RuleId::R5gFwd, RuleData::None, vec![refl]);
    // φ ⊢_x ∀y.ψ, then back down with the wider context.
    let cut = ProofTree::node(RuleId::R1b, RuleData::None, vec![p.clone(), gen]);
    Ok(ProofTree::node(RuleId::R5gBwd, RuleData::None, vec![cut]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Signature;

    fn thy(mode: Mode) -> Theory {
        default_fuzz_theory(mode)
    }

    fn xty() -> TypeExpr {
        TypeExpr::basic("X")
    }

    fn ctx_x() -> Context {
        Context::new(vec![Var::new("x", xty())]).unwrap()
    }

    fn valid(tree: &ProofTree, thy: &Theory) -> Sequent {
        match check_proof(tree, thy) {
            Verdict::Valid(s) => s,
            Verdict::Invalid { path, error } => panic!("invalid at {:?}: {}", path, error),
        }
    }

    #[test]
    fn reflexivity_of_equality() {
        let t = thy(Mode::HolClassical);
        let tree = ProofTree::leaf(
            RuleId::R2a,
            RuleData::CtxTerm {
                ctx: ctx_x(),
                term: Term::Var(Var::new("x", xty())),
            },
        );
        let s = valid(&tree, &t);
        let x = Term::Var(Var::new("x", xty()));
        assert_eq!(s.ctx, ctx_x());
        assert_eq!(s.lhs, Term::Top);
        assert_eq!(s.rhs, Term::eq(x.clone(), x));
    }

    #[test]
    fn projection_beta() {
        let t = thy(Mode::Lambda);
        let tree = ProofTree::leaf(
            RuleId::R3b,
            RuleData::ProjBeta {
                ctx: Context::empty(),
                index: 1,
                fst: Term::cnst("a"),
                snd: Term::cnst("b"),
            },
        );
        let s = valid(&tree, &t);
        let redex = Term::proj1(Term::pair(Term::cnst("a"), Term::cnst("b")));
        assert_eq!(s.rhs, Term::eq(redex, Term::cnst("a")));
    }

    #[test]
    fn conjunction_directions() {
        let t = thy(Mode::HolClassical);
        let phi = Term::eq(Term::cnst("a"), Term::cnst("b"));
        let refl = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula {
                ctx: Context::empty(),
                phi: phi.clone(),
            },
        );
        let fwd = ProofTree::node(RuleId::R5dFwd, RuleData::None, vec![refl.clone(), refl.clone()]);
        let s = valid(&fwd, &t);
        assert_eq!(s.rhs, Term::and(phi.clone(), phi.clone()));
        for i in 1..=2 {
            let back = ProofTree::node(RuleId::R5dBwd, RuleData::Index(i), vec![fwd.clone()]);
            let s = valid(&back, &t);
            assert!(s.alpha_eq(&valid(&refl, &t)));
        }
    }

    #[test]
    fn fwd_bwd_round_trips() {
        let t = thy(Mode::HolClassical);
        let phi = Term::eq(Term::cnst("a"), Term::cnst("b"));
        let psi = Term::eq(Term::cnst("b"), Term::cnst("b"));

        // Implication: ϑ∧φ ⊢ ϑ∧φ, up through ⇒ and back.
        let both = Term::and(phi.clone(), psi.clone());
        let start = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx: Context::empty(), phi: both },
        );
        let fwd = ProofTree::node(RuleId::R5fFwd, RuleData::None, vec![start.clone()]);
        let back = ProofTree::node(RuleId::R5fBwd, RuleData::None, vec![fwd]);
        assert!(valid(&back, &t).alpha_eq(&valid(&start, &t)));

        // Negation.
        let neg = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx: Context::empty(), phi: Term::not(phi.clone()) },
        );
        let fwd = ProofTree::node(RuleId::R5cFwd, RuleData::None, vec![neg.clone()]);
        let back = ProofTree::node(RuleId::R5cBwd, RuleData::None, vec![fwd]);
        assert!(valid(&back, &t).alpha_eq(&valid(&neg, &t)));

        // Universal: context variable in and out.
        let over_y = Context::new(vec![Var::new("y", xty())]).unwrap();
        let start = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx: over_y, phi: phi.clone() },
        );
        let gen = ProofTree::node(RuleId::R5gFwd, RuleData::None, vec![start.clone()]);
        let back = ProofTree::node(RuleId::R5gBwd, RuleData::None, vec![gen]);
        assert!(valid(&back, &t).alpha_eq(&valid(&start, &t)));

        // Existential.
        let over_y = Context::new(vec![Var::new("y", xty())]).unwrap();
        let start = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx: over_y, phi },
        );
        let packed = ProofTree::node(RuleId::R5hBwd, RuleData::None, vec![start.clone()]);
        let back = ProofTree::node(RuleId::R5hFwd, RuleData::None, vec![packed]);
        assert!(valid(&back, &t).alpha_eq(&valid(&start, &t)));
    }

    #[test]
    fn extensionality_needs_hol() {
        let t = thy(Mode::Lambda);
        let top = Sequent::new(Context::empty(), Term::Top, Term::Top, &t).unwrap();
        let err = check_step(RuleId::R2c, &RuleData::None, &[top.clone(), top], &t).unwrap_err();
        assert!(matches!(err, DeductionError::RuleNotInMode { .. }));
    }

    #[test]
    fn classical_axiom_gated_by_mode() {
        let leaf = ProofTree::leaf(RuleId::Classical, RuleData::None);
        let s = valid(&leaf, &thy(Mode::HolClassical));
        assert_eq!(s.rhs, excluded_middle());
        assert_eq!(s.lhs, Term::Top);
        match check_proof(&leaf, &thy(Mode::HolIntuitionistic)) {
            Verdict::Invalid { error: DeductionError::RuleNotInMode { .. }, .. } => {}
            v => panic!("expected mode rejection, got {:?}", v),
        }
    }

    #[test]
    fn axiom_rule_reads_the_theory() {
        let mut t = thy(Mode::HolClassical);
        t.add_axiom(Term::eq(Term::cnst("a"), Term::cnst("b"))).unwrap();
        let leaf = ProofTree::leaf(RuleId::Axiom, RuleData::AxiomIndex(0));
        let s = valid(&leaf, &t);
        assert_eq!(s.rhs, Term::eq(Term::cnst("a"), Term::cnst("b")));
        let bad = ProofTree::leaf(RuleId::Axiom, RuleData::AxiomIndex(3));
        match check_proof(&bad, &t) {
            Verdict::Invalid { error: DeductionError::AxiomOutOfRange { .. }, .. } => {}
            v => panic!("expected out-of-range, got {:?}", v),
        }
    }

    #[test]
    fn generalization_side_condition() {
        let t = thy(Mode::HolClassical);
        // y ⊢ free on the left blocks 5g-fwd.
        let y = Var::new("y", TypeExpr::Two);
        let ctx = Context::new(vec![y.clone()]).unwrap();
        let premise = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx, phi: Term::Var(y) },
        );
        let gen = ProofTree::node(RuleId::R5gFwd, RuleData::None, vec![premise]);
        match check_proof(&gen, &t) {
            Verdict::Invalid { error: DeductionError::SideConditionViolated { .. }, .. } => {}
            v => panic!("expected side-condition failure, got {:?}", v),
        }
    }

    #[test]
    fn substitution_changes_context() {
        let t = thy(Mode::HolClassical);
        let y = Var::new("y", xty());
        let inner = ctx_x().extend(y.clone()).unwrap();
        let phi = Term::eq(Term::Var(y.clone()), Term::Var(Var::new("x", xty())));
        let premise = ProofTree::leaf(
            RuleId::R1a,
            RuleData::CtxFormula { ctx: inner, phi },
        );
        let sub = ProofTree::node(
            RuleId::R1c,
            RuleData::Subst { ctx: ctx_x(), var: y, term: Term::cnst("a") },
            vec![premise],
        );
        let s = valid(&sub, &t);
        assert_eq!(s.ctx, ctx_x());
        let expect = Term::eq(Term::cnst("a"), Term::Var(Var::new("x", xty())));
        assert_eq!(s.lhs, expect);
    }

    #[test]
    fn generator_agrees_with_checker() {
        for mode in [Mode::HolClassical, Mode::HolIntuitionistic, Mode::Lambda] {
            let t = thy(mode);
            for seed in 0..120u64 {
                let depth = 1 + (seed as usize % 5);
                let tree = random_derivation(seed, depth, &t);
                assert!(tree.depth() <= depth);
                assert!(check_proof(&tree, &t).is_valid(), "seed {} mode {:?}", seed, mode);
            }
        }
    }

    #[test]
    fn generator_reaches_every_rule() {
        for mode in [Mode::HolClassical, Mode::HolIntuitionistic, Mode::Lambda] {
            let t = thy(mode);
            let mut roots = std::collections::BTreeSet::new();
            for seed in 0..400u64 {
                roots.insert(random_derivation(seed, 6, &t).rule);
            }
            for rule in ALL_RULES {
                if rule.available_in(mode) && rule != RuleId::Axiom {
                    assert!(roots.contains(&rule), "{:?} never at root in {:?}", rule, mode);
                }
            }
        }
    }

    #[test]
    fn weakening_preserves_validity() {
        let t = thy(Mode::HolClassical);
        let z = Var::new("zz", xty());
        let mut weakened = 0;
        for seed in 0..40u64 {
            let tree = random_derivation(seed, 3, &t);
            let Verdict::Valid(s) = check_proof(&tree, &t) else { unreachable!() };
            if s.ctx.lookup("zz").is_some() || free_vars(&s.rhs).contains(&z) {
                continue;
            }
            let wide = weaken_tree(&tree, &t, &z).unwrap();
            let ws = valid(&wide, &t);
            assert_eq!(ws.ctx.split_last().unwrap().1, z);
            assert!(alpha_eq(&ws.lhs, &s.lhs) && alpha_eq(&ws.rhs, &s.rhs));
            weakened += 1;
        }
        assert!(weakened > 20);
    }

    #[test]
    fn proof_files_round_trip() {
        for mode in [Mode::HolClassical, Mode::Lambda] {
            let t = thy(mode);
            for seed in 0..60u64 {
                let tree = random_derivation(seed, 4, &t);
                let text = print_proof(&tree);
                let parsed = parse_proof(&text, &t)
                    .unwrap_or_else(|e| panic!("seed {}: {}\n{}", seed, e, text));
                assert_eq!(parsed, tree, "seed {} mode {:?}", seed, mode);
            }
        }
    }

    #[test]
    fn proof_file_syntax() {
        let t = thy(Mode::HolClassical);
        let text = "%theory fuzz.thy\n(rule 2a :data ((ctx (x \"X\")) (term \"x\")) :premises ())\n";
        assert_eq!(proof_theory_ref(text).as_deref(), Some("fuzz.thy"));
        let tree = parse_proof(text, &t).unwrap();
        let s = valid(&tree, &t);
        assert_eq!(format!("{}", s), "true |-[x:X] x = x");
        assert!(parse_proof("(rule bogus :data () :premises ())", &t).is_err());
    }

    #[test]
    fn lambda_mode_trees_avoid_hol_rules() {
        let t = thy(Mode::Lambda);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200u64 {
            rules_used(&random_derivation(seed, 5, &t), &mut seen);
        }
        assert!(!seen.contains(&RuleId::R2c));
        assert!(!seen.contains(&RuleId::Classical));
    }

    #[test]
    fn empty_signature_still_fuzzes() {
        let mut sig = Signature::new(Mode::HolClassical);
        sig.add_basic_type("A").unwrap();
        let t = Theory::new(sig);
        for seed in 0..30u64 {
            assert!(check_proof(&random_derivation(seed, 3, &t), &t).is_valid());
        }
    }
}
