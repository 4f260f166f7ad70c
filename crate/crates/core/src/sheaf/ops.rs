//! Topos structure on sheaves: finite limits, coproducts, exponentials,
//! the subobject classifier, complements and decidability, and the Heyting
//! operations on subsheaves.

use std::collections::BTreeMap;

use crate::error::SheafError;
use crate::finspace::{points_of, FinSpace, PointSet};

use super::{hom_tables, mask_full, ElemSet, Sheaf, SheafMorphism, Subsheaf};

/// Product sheaf. The stalk at p is F_p × G_p, with `(a,b)` stored at
/// index `a * |G_p| + b`.
pub fn product(f: &Sheaf, g: &Sheaf) -> Result<Sheaf, SheafError> {
    if f.base() != g.base() {
        return Err(SheafError::BaseMismatch);
    }
    let base = f.base().clone();
    let sizes: Vec<usize> = (0..base.len()).map(|p| f.size(p) * g.size(p)).collect();
    let mut trans = BTreeMap::new();
    for (p, q) in f.edges() {
        let mut t = Vec::with_capacity(sizes[p]);
        for a in 0..f.size(p) {
            for b in 0..g.size(p) {
                t.push(f.restrict(p, q, a) * g.size(q) + g.restrict(p, q, b));
            }
        }
        trans.insert((p, q), t);
    }
    Ok(Sheaf { base, sizes, trans })
}

pub fn pair_idx(g: &Sheaf, p: usize, a: usize, b: usize) -> usize {
    a * g.size(p) + b
}

pub fn unpair_idx(g: &Sheaf, p: usize, i: usize) -> (usize, usize) {
    (i / g.size(p), i % g.size(p))
}

pub fn proj1_morphism(f: &Sheaf, g: &Sheaf) -> SheafMorphism {
    let prod = product(f, g).unwrap();
    let maps = (0..prod.base().len())
        .map(|p| (0..prod.size(p)).map(|i| unpair_idx(g, p, i).0).collect())
        .collect();
    SheafMorphism {
        source: prod,
        target: f.clone(),
        maps,
    }
}

pub fn proj2_morphism(f: &Sheaf, g: &Sheaf) -> SheafMorphism {
    let prod = product(f, g).unwrap();
    let maps = (0..prod.base().len())
        .map(|p| (0..prod.size(p)).map(|i| unpair_idx(g, p, i).1).collect())
        .collect();
    SheafMorphism {
        source: prod,
        target: g.clone(),
        maps,
    }
}

/// The mediating morphism ⟨f,g⟩ : H → F×G.
pub fn pairing(f: &SheafMorphism, g: &SheafMorphism) -> SheafMorphism {
    assert_eq!(f.source, g.source);
    let prod = product(&f.target, &g.target).unwrap();
    let maps = (0..prod.base().len())
        .map(|p| {
            (0..f.source.size(p))
                .map(|a| pair_idx(&g.target, p, f.maps[p][a], g.maps[p][a]))
                .collect()
        })
        .collect();
    SheafMorphism {
        source: f.source.clone(),
        target: prod,
        maps,
    }
}

/// Coproduct sheaf: stalkwise disjoint union, F elements first.
pub fn coproduct(f: &Sheaf, g: &Sheaf) -> Result<Sheaf, SheafError> {
    if f.base() != g.base() {
        return Err(SheafError::BaseMismatch);
    }
    let base = f.base().clone();
    let sizes: Vec<usize> = (0..base.len()).map(|p| f.size(p) + g.size(p)).collect();
    let mut trans = BTreeMap::new();
    for (p, q) in f.edges() {
        let mut t = Vec::with_capacity(sizes[p]);
        for a in 0..f.size(p) {
            t.push(f.restrict(p, q, a));
        }
        for b in 0..g.size(p) {
            t.push(f.size(q) + g.restrict(p, q, b));
        }
        trans.insert((p, q), t);
    }
    Ok(Sheaf { base, sizes, trans })
}

pub fn inclusion1(f: &Sheaf, g: &Sheaf) -> SheafMorphism {
    let cop = coproduct(f, g).unwrap();
    let maps = (0..f.base().len()).map(|p| (0..f.size(p)).collect()).collect();
    SheafMorphism {
        source: f.clone(),
        target: cop,
        maps,
    }
}

pub fn inclusion2(f: &Sheaf, g: &Sheaf) -> SheafMorphism {
    let cop = coproduct(f, g).unwrap();
    let maps = (0..g.base().len())
        .map(|p| (0..g.size(p)).map(|b| f.size(p) + b).collect())
        .collect();
    SheafMorphism {
        source: g.clone(),
        target: cop,
        maps,
    }
}

/// The mediating morphism [f,g] : F+G → H.
pub fn copair(f: &SheafMorphism, g: &SheafMorphism) -> SheafMorphism {
    assert_eq!(f.target, g.target);
    let cop = coproduct(&f.source, &g.source).unwrap();
    let maps = (0..cop.base().len())
        .map(|p| f.maps[p].iter().chain(&g.maps[p]).copied().collect())
        .collect();
    SheafMorphism {
        source: cop,
        target: f.target.clone(),
        maps,
    }
}

/// Equalizer of f, g : F → G, as a subsheaf of F with its inclusion.
pub fn equalizer(f: &SheafMorphism, g: &SheafMorphism) -> (Sheaf, SheafMorphism) {
    assert_eq!(f.source, g.source);
    assert_eq!(f.target, g.target);
    let elems: Vec<ElemSet> = (0..f.source.base().len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.source.size(p) {
                if f.maps[p][a] == g.maps[p][a] {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.source.clone(), elems).unwrap().to_sheaf()
}

/// The two-valued object 1+1 over `base`: stalks {0,1} with identity
/// transitions; index 0 is the `true` summand.
pub fn two(base: &FinSpace) -> Sheaf {
    Sheaf::constant(base.clone(), 2)
}

/// The exponential F^G with its stalk elements materialized: the stalk at
/// p is the set of morphisms G|↑p → F|↑p, as raw component tables.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub sheaf: Sheaf,
    /// `elems[p][i][q]` is the component at q of the i-th morphism
    /// G|↑p → F|↑p (empty outside ↑p), in canonical order.
    pub elems: Vec<Vec<Vec<Vec<usize>>>>,
}

pub fn exponential(f: &Sheaf, g: &Sheaf) -> Result<Exponential, SheafError> {
    if f.base() != g.base() {
        return Err(SheafError::BaseMismatch);
    }
    let base = f.base().clone();
    let elems: Vec<Vec<Vec<Vec<usize>>>> = (0..base.len())
        .map(|p| hom_tables(g, f, base.min_open(p)))
        .collect();
    let sizes: Vec<usize> = elems.iter().map(|e| e.len()).collect();
    let mut trans = BTreeMap::new();
    for p in 0..base.len() {
        for q in points_of(base.min_open(p)) {
            if q == p {
                continue;
            }
            let up_q = base.min_open(q);
            let t = elems[p]
                .iter()
                .map(|tab| {
                    let restricted: Vec<Vec<usize>> = tab
                        .iter()
                        .enumerate()
                        .map(|(r, comp)| {
                            if up_q & (1 << r) != 0 {
                                comp.clone()
                            } else {
                                Vec::new()
                            }
                        })
                        .collect();
                    elems[q]
                        .iter()
                        .position(|e| *e == restricted)
                        .expect("restriction of a natural family is natural")
                })
                .collect();
            trans.insert((p, q), t);
        }
    }
    Ok(Exponential {
        sheaf: Sheaf { base, sizes, trans },
        elems,
    })
}

/// Evaluation F^G × G → F.
pub fn eval_morphism(ex: &Exponential, f: &Sheaf, g: &Sheaf) -> SheafMorphism {
    let prod = product(&ex.sheaf, g).unwrap();
    let maps = (0..prod.base().len())
        .map(|p| {
            (0..prod.size(p))
                .map(|i| {
                    let (m, b) = unpair_idx(g, p, i);
                    ex.elems[p][m][p][b]
                })
                .collect()
        })
        .collect();
    SheafMorphism {
        source: prod,
        target: f.clone(),
        maps,
    }
}

/// Transpose of h : H×G → F to H → F^G.
pub fn transpose(h: &SheafMorphism, hh: &Sheaf, g: &Sheaf, ex: &Exponential) -> SheafMorphism {
    let base = hh.base().clone();
    let maps: Vec<Vec<usize>> = (0..base.len())
        .map(|p| {
            (0..hh.size(p))
                .map(|a| {
                    let mut tab: Vec<Vec<usize>> = vec![Vec::new(); base.len()];
                    for q in points_of(base.min_open(p)) {
                        let aq = hh.restrict(p, q, a);
                        tab[q] = (0..g.size(q))
                            .map(|b| h.maps[q][pair_idx(g, q, aq, b)])
                            .collect();
                    }
                    ex.elems[p]
                        .iter()
                        .position(|e| *e == tab)
                        .expect("transpose lands in the exponential stalk")
                })
                .collect()
        })
        .collect();
    SheafMorphism {
        source: hh.clone(),
        target: ex.sheaf.clone(),
        maps,
    }
}

/// The subobject classifier: the stalk at p is the set of up-closed
/// subsets of ↑p, ordered by mask value; transitions intersect with ↑q.
#[derive(Debug, Clone)]
pub struct Omega {
    pub sheaf: Sheaf,
    pub stalk_sets: Vec<Vec<PointSet>>,
}

pub fn omega(base: &FinSpace) -> Omega {
    let stalk_sets: Vec<Vec<PointSet>> = (0..base.len())
        .map(|p| {
            let up = base.min_open(p);
            let mut sets = Vec::new();
            // Enumerate subsets of ↑p that are up-closed.
            let bits: Vec<usize> = points_of(up).collect();
            for choice in 0u64..(1 << bits.len()) {
                let mut m: PointSet = 0;
                for (i, &q) in bits.iter().enumerate() {
                    if choice & (1 << i) != 0 {
                        m |= 1 << q;
                    }
                }
                let closed = points_of(m).all(|q| base.min_open(q) & !m == 0);
                if closed {
                    sets.push(m);
                }
            }
            sets.sort_unstable();
            sets
        })
        .collect();
    let sizes: Vec<usize> = stalk_sets.iter().map(|s| s.len()).collect();
    let mut trans = BTreeMap::new();
    for p in 0..base.len() {
        for q in points_of(base.min_open(p)) {
            if q == p {
                continue;
            }
            let up_q = base.min_open(q);
            let t = stalk_sets[p]
                .iter()
                .map(|&s| stalk_sets[q].binary_search(&(s & up_q)).unwrap())
                .collect();
            trans.insert((p, q), t);
        }
    }
    Omega {
        sheaf: Sheaf {
            base: base.clone(),
            sizes,
            trans,
        },
        stalk_sets,
    }
}

/// The classifying morphism χ_S : F → Ω of a subsheaf S ⊆ F.
pub fn classify(s: &Subsheaf, om: &Omega) -> SheafMorphism {
    let f = &s.parent;
    let base = f.base();
    let maps = (0..base.len())
        .map(|p| {
            (0..f.size(p))
                .map(|a| {
                    let mut m: PointSet = 0;
                    for q in points_of(base.min_open(p)) {
                        if s.contains(q, f.restrict(p, q, a)) {
                            m |= 1 << q;
                        }
                    }
                    om.stalk_sets[p].binary_search(&m).unwrap()
                })
                .collect()
        })
        .collect();
    SheafMorphism {
        source: f.clone(),
        target: om.sheaf.clone(),
        maps,
    }
}

/// The subsheaf classified by χ : F → Ω: elements whose truth value is
/// all of ↑p.
pub fn unclassify(chi: &SheafMorphism, om: &Omega) -> Subsheaf {
    let f = &chi.source;
    let base = f.base();
    let elems = (0..base.len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.size(p) {
                if om.stalk_sets[p][chi.maps[p][a]] == base.min_open(p) {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.clone(), elems).unwrap()
}

/// true : 1 → Ω.
pub fn true_arrow(om: &Omega) -> SheafMorphism {
    let base = om.sheaf.base().clone();
    let maps = (0..base.len())
        .map(|p| vec![om.stalk_sets[p].binary_search(&base.min_open(p)).unwrap()])
        .collect();
    SheafMorphism {
        source: Sheaf::terminal(base),
        target: om.sheaf.clone(),
        maps,
    }
}

/// false : 1 → Ω (the empty truth value).
pub fn false_arrow(om: &Omega) -> SheafMorphism {
    let base = om.sheaf.base().clone();
    let maps = (0..base.len())
        .map(|p| vec![om.stalk_sets[p].binary_search(&0).unwrap()])
        .collect();
    SheafMorphism {
        source: Sheaf::terminal(base),
        target: om.sheaf.clone(),
        maps,
    }
}

/// The canonical monomorphism 1+1 → Ω sending the summands to true and
/// false.
pub fn two_to_omega(om: &Omega) -> SheafMorphism {
    let base = om.sheaf.base().clone();
    let maps = (0..base.len())
        .map(|p| {
            vec![
                om.stalk_sets[p].binary_search(&base.min_open(p)).unwrap(),
                om.stalk_sets[p].binary_search(&0).unwrap(),
            ]
        })
        .collect();
    SheafMorphism {
        source: two(&base),
        target: om.sheaf.clone(),
        maps,
    }
}

/// The stalkwise complement, if it is transition-closed; in the finite
/// case a complement exists exactly when this one does.
pub fn complement(s: &Subsheaf) -> Option<Subsheaf> {
    let elems: Vec<ElemSet> = s
        .elems
        .iter()
        .zip(s.parent.sizes())
        .map(|(&m, &n)| !m & mask_full(n))
        .collect();
    Subsheaf::new(s.parent.clone(), elems).ok()
}

/// The diagonal subsheaf Δ ⊆ F×F.
pub fn diagonal(f: &Sheaf) -> Subsheaf {
    let prod = product(f, f).unwrap();
    let elems = (0..f.base().len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.size(p) {
                m |= 1 << pair_idx(f, p, a, a);
            }
            m
        })
        .collect();
    Subsheaf::new(prod, elems).unwrap()
}

/// Decidability: the diagonal is complemented, equivalently (finite case)
/// all transitions are injective.
pub fn is_decidable(f: &Sheaf) -> bool {
    f.transitions_injective()
}

/// Factors χ : F → Ω through 1+1 → Ω, if the classified subsheaf is
/// complemented. Index 0 of 1+1 is true.
pub fn bar_factor(chi: &SheafMorphism, om: &Omega) -> Option<SheafMorphism> {
    let s = unclassify(chi, om);
    complement(&s)?;
    let f = &chi.source;
    let base = f.base().clone();
    // With a complement, every truth value is all of ↑p or empty, so the
    // two-valued factor is total and exact.
    let maps = (0..base.len())
        .map(|p| {
            (0..f.size(p))
                .map(|a| if s.contains(p, a) { 0 } else { 1 })
                .collect()
        })
        .collect();
    Some(SheafMorphism {
        source: f.clone(),
        target: two(&base),
        maps,
    })
}

/// Stalkwise intersection.
pub fn heyting_meet(s: &Subsheaf, t: &Subsheaf) -> Result<Subsheaf, SheafError> {
    if s.parent != t.parent {
        return Err(SheafError::ParentMismatch);
    }
    let elems = s.elems.iter().zip(&t.elems).map(|(&a, &b)| a & b).collect();
    Subsheaf::new(s.parent.clone(), elems)
}

/// Stalkwise union.
pub fn heyting_join(s: &Subsheaf, t: &Subsheaf) -> Result<Subsheaf, SheafError> {
    if s.parent != t.parent {
        return Err(SheafError::ParentMismatch);
    }
    let elems = s.elems.iter().zip(&t.elems).map(|(&a, &b)| a | b).collect();
    Subsheaf::new(s.parent.clone(), elems)
}

/// S ⇒ T at p: elements all of whose restrictions up the specialization
/// order satisfy S → T pointwise.
pub fn heyting_implies(s: &Subsheaf, t: &Subsheaf) -> Result<Subsheaf, SheafError> {
    if s.parent != t.parent {
        return Err(SheafError::ParentMismatch);
    }
    let f = &s.parent;
    let base = f.base();
    let elems = (0..base.len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.size(p) {
                let ok = points_of(base.min_open(p)).all(|q| {
                    let aq = f.restrict(p, q, a);
                    !s.contains(q, aq) || t.contains(q, aq)
                });
                if ok {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.clone(), elems)
}

/// ¬S = S ⇒ ⊥.
pub fn heyting_neg(s: &Subsheaf) -> Subsheaf {
    heyting_implies(s, &Subsheaf::bottom(&s.parent)).unwrap()
}

/// The pullback f*T ⊆ F of a subsheaf T ⊆ G along f : F → G.
pub fn pullback_along(f: &SheafMorphism, t: &Subsheaf) -> Subsheaf {
    assert_eq!(f.target, t.parent);
    let elems = (0..f.source.base().len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.source.size(p) {
                if t.contains(p, f.maps[p][a]) {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.source.clone(), elems).unwrap()
}

/// ∃ along the projection F×G → F: the stalkwise image.
pub fn exists_along(s: &Subsheaf, f: &Sheaf, g: &Sheaf) -> Subsheaf {
    let elems = (0..f.base().len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.size(p) {
                if (0..g.size(p)).any(|b| s.contains(p, pair_idx(g, p, a, b))) {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.clone(), elems).unwrap()
}

/// ∀ along the projection F×G → F: at p, elements whose every restriction
/// pairs into S with every fiber element.
pub fn forall_along(s: &Subsheaf, f: &Sheaf, g: &Sheaf) -> Subsheaf {
    let base = f.base();
    let elems = (0..base.len())
        .map(|p| {
            let mut m: ElemSet = 0;
            for a in 0..f.size(p) {
                let ok = points_of(base.min_open(p)).all(|q| {
                    let aq = f.restrict(p, q, a);
                    (0..g.size(q)).all(|b| s.contains(q, pair_idx(g, q, aq, b)))
                });
                if ok {
                    m |= 1 << a;
                }
            }
            m
        })
        .collect();
    Subsheaf::new(f.clone(), elems).unwrap()
}
