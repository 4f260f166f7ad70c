//! Exhaustive and randomized model search: countermodels within size
//! bounds, and a bounded enumeration looking for a formula defining a
//! given sheaf morphism by its graph.

use std::collections::BTreeMap;

use rand::Rng;

use super::{check_model, interpret_type_in, Flavor, Interpretation, ModelVerdict};
use crate::error::SemanticsError;
use crate::finspace::{all_topologies, FinSpace};
use crate::sheaf::{
    all_subsheaves, find_iso, pair_idx, product, random_sheaf, random_subsheaf, Sheaf,
    SheafMorphism, Subsheaf,
};
use crate::syntax::{typecheck, Context, Formula, Mode, Term, Theory, TypeExpr, Var};

#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub max_points: usize,
    pub max_stalk: usize,
}

impl Default for SearchBounds {
    fn default() -> SearchBounds {
        SearchBounds {
            max_points: 2,
            max_stalk: 2,
        }
    }
}

fn homeomorphic(a: &FinSpace, b: &FinSpace) -> bool {
    let n = a.len();
    if n != b.len() || a.opens().len() != b.opens().len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = a.opens().iter().all(|&u| {
            let mut img = 0u64;
            for i in 0..n {
                if u & (1 << i) != 0 {
                    img |= 1 << perm[i];
                }
            }
            b.opens().binary_search(&img).is_ok()
        });
        if ok {
            return true;
        }
        if !next_perm(&mut perm) {
            return false;
        }
    }
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All topologies on up to `max_points` points, one representative per
/// homeomorphism class.
pub fn spaces_up_to_homeo(max_points: usize) -> Vec<FinSpace> {
    let names = ["p0", "p1", "p2", "p3"];
    assert!(max_points <= names.len());
    let mut out: Vec<FinSpace> = Vec::new();
    for n in 1..=max_points {
        for s in all_topologies(&names[..n]) {
            if !out.iter().any(|t| homeomorphic(&s, t)) {
                out.push(s);
            }
        }
    }
    out
}

/// Every sheaf over the base with stalks of at most `max_stalk` elements
/// (empty stalks included).
pub fn enumerate_sheaves(base: &FinSpace, max_stalk: usize) -> Vec<Sheaf> {
    let n = base.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .filter(|&(p, q)| p != q && base.leq(p, q))
        .collect();
    let mut out = Vec::new();
    let mut sizes = vec![0usize; n];
    loop {
        collect_transitions(base, &sizes, &edges, 0, &mut BTreeMap::new(), &mut out);
        // Next size vector.
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            sizes[i] += 1;
            if sizes[i] <= max_stalk {
                break;
            }
            sizes[i] = 0;
            i += 1;
        }
    }
}

fn collect_transitions(
    base: &FinSpace,
    sizes: &[usize],
    edges: &[(usize, usize)],
    i: usize,
    trans: &mut BTreeMap<(usize, usize), Vec<usize>>,
    out: &mut Vec<Sheaf>,
) {
    if i == edges.len() {
        if let Ok(f) = Sheaf::new(base.clone(), sizes.to_vec(), trans.clone()) {
            out.push(f);
        }
        return;
    }
    let (p, q) = edges[i];
    let (sp, sq) = (sizes[p], sizes[q]);
    if sp > 0 && sq == 0 {
        return; // no map into an empty stalk
    }
    let mut map = vec![0usize; sp];
    loop {
        trans.insert((p, q), map.clone());
        collect_transitions(base, sizes, edges, i + 1, trans, out);
        trans.remove(&(p, q));
        // Next map.
        let mut k = 0;
        loop {
            if k == sp {
                return;
            }
            map[k] += 1;
            if map[k] < sq {
                break;
            }
            map[k] = 0;
            k += 1;
        }
        if sp == 0 {
            return;
        }
    }
}

fn iso_signature(f: &Sheaf) -> (Vec<usize>, usize) {
    let mut sizes = f.sizes().to_vec();
    sizes.sort();
    (sizes, f.transitions_injective() as usize)
}

fn dedupe_up_to_iso(sheaves: Vec<Sheaf>) -> Vec<Sheaf> {
    let mut kept: Vec<Sheaf> = Vec::new();
    for f in sheaves {
        let sig = iso_signature(&f);
        let dup = kept
            .iter()
            .any(|g| iso_signature(g) == sig && find_iso(&f, g).is_some());
        if !dup {
            kept.push(f);
        }
    }
    kept
}

fn global_sections(f: &Sheaf) -> Vec<SheafMorphism> {
    let base = f.base().clone();
    f.sections(base.full())
        .into_iter()
        .map(|sec| SheafMorphism {
            source: Sheaf::terminal(base.clone()),
            target: f.clone(),
            maps: sec.into_iter().map(|a| vec![a.unwrap()]).collect(),
        })
        .collect()
}

/// Every interpretation of the theory over the base within the stalk
/// bound, up to isomorphism of the basic-type assignment.
pub fn enumerate_interpretations(
    thy: &Theory,
    base: &FinSpace,
    max_stalk: usize,
    flavor: Flavor,
) -> Vec<Interpretation> {
    let sig = &thy.signature;
    let mut candidates = enumerate_sheaves(base, max_stalk);
    if flavor == Flavor::ClassicalC {
        candidates.retain(Sheaf::transitions_injective);
    }
    let candidates = dedupe_up_to_iso(candidates);
    let mut out = Vec::new();
    let mut assignment: BTreeMap<String, Sheaf> = BTreeMap::new();
    assign_types(thy, base, flavor, &candidates, 0, &mut assignment, &mut out);
    let _ = sig;
    out
}

fn assign_types(
    thy: &Theory,
    base: &FinSpace,
    flavor: Flavor,
    candidates: &[Sheaf],
    i: usize,
    assignment: &mut BTreeMap<String, Sheaf>,
    out: &mut Vec<Interpretation>,
) {
    let sig = &thy.signature;
    if i == sig.basic_types.len() {
        assign_symbols(thy, base, flavor, assignment, out);
        return;
    }
    for f in candidates {
        assignment.insert(sig.basic_types[i].clone(), f.clone());
        assign_types(thy, base, flavor, candidates, i + 1, assignment, out);
    }
    assignment.remove(&sig.basic_types[i]);
}

fn assign_symbols(
    thy: &Theory,
    base: &FinSpace,
    flavor: Flavor,
    basic: &BTreeMap<String, Sheaf>,
    out: &mut Vec<Interpretation>,
) {
    let sig = &thy.signature;
    // Per-constant section choices.
    let mut const_choices: Vec<(String, Vec<SheafMorphism>)> = Vec::new();
    for (name, ty) in &sig.constants {
        let Ok(zm) = interpret_type_in(basic, base, ty) else { return };
        let secs = global_sections(&zm);
        if secs.is_empty() {
            return;
        }
        const_choices.push((name.clone(), secs));
    }
    // Per-relation subsheaf choices.
    let mut rel_choices: Vec<(String, Vec<Subsheaf>)> = Vec::new();
    for (name, args) in &sig.relations {
        let mut parent = Sheaf::terminal(base.clone());
        for a in args {
            let Ok(am) = interpret_type_in(basic, base, a) else { return };
            let Ok(next) = product(&parent, &am) else { return };
            parent = next;
        }
        rel_choices.push((name.clone(), all_subsheaves(&parent)));
    }
    let mut consts = BTreeMap::new();
    let mut rels = BTreeMap::new();
    pick(
        &const_choices,
        &rel_choices,
        0,
        &mut consts,
        &mut rels,
        &mut |consts, rels| {
            if let Ok(m) = Interpretation::new(
                thy.clone(),
                base.clone(),
                flavor,
                basic.clone(),
                consts.clone(),
                rels.clone(),
            ) {
                out.push(m);
            }
        },
    );
}

fn pick(
    consts: &[(String, Vec<SheafMorphism>)],
    rels: &[(String, Vec<Subsheaf>)],
    i: usize,
    cacc: &mut BTreeMap<String, SheafMorphism>,
    racc: &mut BTreeMap<String, Subsheaf>,
    emit: &mut dyn FnMut(&BTreeMap<String, SheafMorphism>, &BTreeMap<String, Subsheaf>),
) {
    if i < consts.len() {
        let (name, options) = &consts[i];
        for o in options {
            cacc.insert(name.clone(), o.clone());
            pick(consts, rels, i + 1, cacc, racc, emit);
        }
        cacc.remove(name);
        return;
    }
    let j = i - consts.len();
    if j < rels.len() {
        let (name, options) = &rels[j];
        for o in options {
            racc.insert(name.clone(), o.clone());
            pick(consts, rels, i + 1, cacc, racc, emit);
        }
        racc.remove(name);
        return;
    }
    emit(cacc, racc);
}

/// Searches spaces of at most `bounds.max_points` points for a model of
/// the theory falsifying the sentence. Exhaustive up to homeomorphism of
/// the base and isomorphism of the type assignment.
pub fn search_countermodel(
    thy: &Theory,
    sigma: &Formula,
    flavor: Flavor,
    bounds: SearchBounds,
) -> Result<Option<Interpretation>, SemanticsError> {
    for base in spaces_up_to_homeo(bounds.max_points) {
        for m in enumerate_interpretations(thy, &base, bounds.max_stalk, flavor) {
            if check_model(&m)? != ModelVerdict::Valid {
                continue;
            }
            if !m.satisfies(sigma)? {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// A random valid interpretation over the base, or none after bounded
/// retries (e.g. when a constant's type keeps coming up empty).
pub fn random_interpretation<R: Rng>(
    rng: &mut R,
    thy: &Theory,
    base: &FinSpace,
    max_stalk: usize,
    flavor: Flavor,
) -> Option<Interpretation> {
    let sig = &thy.signature;
    'attempt: for _ in 0..60 {
        let mut basic = BTreeMap::new();
        for b in &sig.basic_types {
            let mut f = random_sheaf(base, max_stalk, rng);
            if flavor == Flavor::ClassicalC {
                for _ in 0..40 {
                    if f.transitions_injective() {
                        break;
                    }
                    f = random_sheaf(base, max_stalk, rng);
                }
                if !f.transitions_injective() {
                    f = Sheaf::constant(base.clone(), 1 + rng.gen_range(0..max_stalk));
                }
            }
            basic.insert(b.clone(), f);
        }
        let mut consts = BTreeMap::new();
        for (name, ty) in &sig.constants {
            let zm = interpret_type_in(&basic, base, ty).ok()?;
            let secs = global_sections(&zm);
            if secs.is_empty() {
                continue 'attempt;
            }
            consts.insert(name.clone(), secs[rng.gen_range(0..secs.len())].clone());
        }
        let mut rels = BTreeMap::new();
        for (name, args) in &sig.relations {
            let mut parent = Sheaf::terminal(base.clone());
            for a in args {
                parent = product(&parent, &interpret_type_in(&basic, base, a).ok()?).ok()?;
            }
            rels.insert(name.clone(), random_subsheaf(&parent, rng));
        }
        if let Ok(m) = Interpretation::new(
            thy.clone(),
            base.clone(),
            flavor,
            basic,
            consts,
            rels,
        ) {
            return Some(m);
        }
    }
    None
}

/// The graph of f : F → G as a subsheaf of F × G.
pub fn graph_subsheaf(f: &SheafMorphism) -> Subsheaf {
    let parent = product(&f.source, &f.target).unwrap();
    let elems = (0..f.source.base().len())
        .map(|p| {
            let mut m: crate::sheaf::ElemSet = 0;
            for a in 0..f.source.size(p) {
                m |= 1 << pair_idx(&f.target, p, a, f.maps[p][a]);
            }
            m
        })
        .collect();
    Subsheaf::new(parent, elems).unwrap()
}

/// Bounded search for a formula φ(y,z) whose truth subsheaf over the
/// context (y:Y, z:Z) equals the graph of `f : Y_M → Z_M`. Sound (the
/// match is literal equality of subsheaves) but not complete.
pub fn find_defining_formula(
    m: &Interpretation,
    f: &SheafMorphism,
    y_ty: &TypeExpr,
    z_ty: &TypeExpr,
    depth: usize,
) -> Result<Option<Term>, SemanticsError> {
    let sig = &m.theory.signature;
    let yv = Var::new("y", y_ty.clone());
    let zv = Var::new("z", z_ty.clone());
    let ctx = Context::new(vec![yv.clone(), zv.clone()]).unwrap();
    let target = graph_subsheaf(f);

    // Small term language over the context.
    let mut terms: Vec<(Term, TypeExpr)> = vec![
        (Term::Var(yv), y_ty.clone()),
        (Term::Var(zv), z_ty.clone()),
    ];
    for (name, ty) in &sig.constants {
        terms.push((Term::cnst(name), ty.clone()));
    }
    for _ in 0..depth.min(2) {
        let snapshot = terms.clone();
        for (t, ty) in &snapshot {
            if let TypeExpr::Prod(l, r) = ty {
                terms.push((Term::proj1(t.clone()), (**l).clone()));
                terms.push((Term::proj2(t.clone()), (**r).clone()));
            }
        }
        for (a, ta) in &snapshot {
            for (b, tb) in &snapshot {
                if terms.len() >= 80 {
                    break;
                }
                terms.push((Term::pair(a.clone(), b.clone()), TypeExpr::prod(ta.clone(), tb.clone())));
            }
        }
        terms.dedup();
        terms.truncate(80);
    }

    // Atoms, then connective closure level by level.
    let mut formulas: Vec<Term> = vec![Term::Top, Term::Bot];
    for (a, ta) in &terms {
        for (b, tb) in &terms {
            if ta == tb {
                formulas.push(Term::eq(a.clone(), b.clone()));
            }
        }
    }
    if sig.mode == Mode::Lambda {
        for (name, args) in &sig.relations {
            if let [arg_ty] = args.as_slice() {
                for (t, ty) in &terms {
                    if ty == arg_ty {
                        formulas.push(Term::RelApp(name.clone(), vec![t.clone()]));
                    }
                }
            }
        }
    }
    formulas.truncate(400);

    let check = |phi: &Term| -> Result<bool, SemanticsError> {
        if typecheck(phi, &ctx, sig).is_err() && sig.mode.is_hol() {
            return Ok(false);
        }
        let truth = m.truth_subsheaf(phi, &ctx)?;
        Ok(truth.elems == target.elems)
    };

    let mut frontier = formulas.clone();
    let mut all = formulas;
    for phi in &all {
        if check(phi)? {
            return Ok(Some(phi.clone()));
        }
    }
    for _ in 1..depth {
        let mut next = Vec::new();
        for a in &frontier {
            next.push(Term::not(a.clone()));
            for b in &all {
                if all.len() + next.len() > 4000 {
                    break;
                }
                next.push(Term::and(a.clone(), b.clone()));
                next.push(Term::or(a.clone(), b.clone()));
                next.push(Term::implies(a.clone(), b.clone()));
            }
        }
        for phi in &next {
            if check(phi)? {
                return Ok(Some(phi.clone()));
            }
        }
        all.extend(next.clone());
        frontier = next;
        if all.len() > 4000 {
            break;
        }
    }
    Ok(None)
}
