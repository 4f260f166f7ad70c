//! Sheaves on a finite space, presented stalkwise over the specialization
//! preorder, together with the topos structure: limits, coproducts,
//! exponentials, the subobject classifier, and the étale-space equivalence.

mod etale;
mod ops;

pub use etale::{etale_iso, from_etale, is_local_homeo, to_etale, EtaleSpace};
pub use ops::{
    bar_factor, classify, complement, copair, coproduct, diagonal, equalizer, eval_morphism,
    exists_along, exponential, false_arrow, forall_along, heyting_implies, heyting_join,
    heyting_meet, heyting_neg, inclusion1, inclusion2, is_decidable, omega, pair_idx, pairing,
    product, proj1_morphism, proj2_morphism, pullback_along, transpose, true_arrow, two,
    two_to_omega, unclassify, unpair_idx, Exponential, Omega,
};

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::SheafError;
use crate::finspace::{points_of, FinSpace, PointSet};

/// A subset of a stalk, as a bitmask over element indices.
pub type ElemSet = u128;

/// A sheaf on a finite space: a finite stalk per point and a transition
/// function along every specialization edge p ≼ q. Stalk elements are the
/// indices `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sheaf {
    base: FinSpace,
    sizes: Vec<usize>,
    /// `trans[(p,q)]` for p ≼ q with p ≠ q.
    trans: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Sheaf {
    /// Validates stalk ranges and functoriality (identity on reflexive
    /// edges is implicit; compositions must be path independent).
    pub fn new(
        base: FinSpace,
        sizes: Vec<usize>,
        trans: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Sheaf, SheafError> {
        if sizes.len() != base.len() {
            return Err(SheafError::NotSheaf {
                detail: "one stalk per point required".into(),
            });
        }
        let s = Sheaf { base, sizes, trans };
        for (p, q) in s.edges() {
            let t = s.trans.get(&(p, q)).ok_or_else(|| SheafError::NotSheaf {
                detail: format!(
                    "missing transition {} -> {}",
                    s.base.point_names()[p],
                    s.base.point_names()[q]
                ),
            })?;
            if t.len() != s.sizes[p] || t.iter().any(|&x| x >= s.sizes[q]) {
                return Err(SheafError::NotSheaf {
                    detail: format!(
                        "transition {} -> {} has the wrong shape",
                        s.base.point_names()[p],
                        s.base.point_names()[q]
                    ),
                });
            }
        }
        for &(p, q) in s.trans.keys() {
            if p == q || !s.base.leq(p, q) {
                return Err(SheafError::NotSheaf {
                    detail: "transition given along a non-specialization edge".into(),
                });
            }
        }
        // Path independence, including cycles composing to the identity.
        for (p, q) in s.edges() {
            for r in 0..s.base.len() {
                if r != q && s.base.leq(q, r) {
                    for a in 0..s.sizes[p] {
                        let via_q = s.restrict(q, r, s.restrict(p, q, a));
                        let direct = s.restrict(p, r, a);
                        if via_q != direct {
                            return Err(SheafError::NotSheaf {
                                detail: "transitions are not path independent".into(),
                            });
                        }
                    }
                }
            }
        }
        Ok(s)
    }

    /// The constant sheaf with `n`-element stalks and identity transitions.
    pub fn constant(base: FinSpace, n: usize) -> Sheaf {
        let sizes = vec![n; base.len()];
        let mut trans = BTreeMap::new();
        for p in 0..base.len() {
            for q in points_of(base.min_open(p)) {
                if q != p {
                    trans.insert((p, q), (0..n).collect());
                }
            }
        }
        Sheaf { base, sizes, trans }
    }

    /// The terminal sheaf (singleton stalks).
    pub fn terminal(base: FinSpace) -> Sheaf {
        Sheaf::constant(base, 1)
    }

    /// The initial sheaf (empty stalks).
    pub fn empty(base: FinSpace) -> Sheaf {
        Sheaf::constant(base, 0)
    }

    pub fn base(&self) -> &FinSpace {
        &self.base
    }

    pub fn size(&self, p: usize) -> usize {
        self.sizes[p]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Specialization edges (p,q) with p ≼ q and p ≠ q.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.base.len() {
            for q in points_of(self.base.min_open(p)) {
                if q != p {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Image of stalk element `a` under the transition p → q (p ≼ q).
    pub fn restrict(&self, p: usize, q: usize, a: usize) -> usize {
        if p == q {
            return a;
        }
        self.trans[&(p, q)][a]
    }

    pub fn transition(&self, p: usize, q: usize) -> Option<&[usize]> {
        self.trans.get(&(p, q)).map(|v| v.as_slice())
    }

    /// Sections over the open `u`: compatible families of stalk elements.
    /// Entry `s[p]` is `None` outside `u`.
    pub fn sections(&self, u: PointSet) -> Vec<Vec<Option<usize>>> {
        assert!(self.base.is_open(u), "sections are taken over opens");
        let pts: Vec<usize> = points_of(u).collect();
        let mut out = Vec::new();
        let mut cur: Vec<Option<usize>> = vec![None; self.base.len()];
        self.sections_go(&pts, 0, &mut cur, &mut out);
        out
    }

    fn sections_go(
        &self,
        pts: &[usize],
        i: usize,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if i == pts.len() {
            out.push(cur.clone());
            return;
        }
        let q = pts[i];
        'cand: for a in 0..self.sizes[q] {
            for &p in &pts[..i] {
                let b = cur[p].unwrap();
                if p != q && self.base.leq(p, q) && self.restrict(p, q, b) != a {
                    continue 'cand;
                }
                if p != q && self.base.leq(q, p) && self.restrict(q, p, a) != b {
                    continue 'cand;
                }
            }
            cur[q] = Some(a);
            self.sections_go(pts, i + 1, cur, out);
            cur[q] = None;
        }
    }

    /// All transitions injective; see `is_decidable` for the equivalent
    /// categorical characterizations.
    pub fn transitions_injective(&self) -> bool {
        self.trans.values().all(|t| {
            let mut seen = vec![false; t.iter().max().map_or(0, |m| m + 1)];
            t.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
        })
    }
}

/// A morphism of sheaves over a common base: a stalk map per point,
/// commuting with transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafMorphism {
    pub source: Sheaf,
    pub target: Sheaf,
    /// `maps[p][a]` is the image of stalk element `a` at point `p`.
    pub maps: Vec<Vec<usize>>,
}

impl SheafMorphism {
    pub fn new(source: Sheaf, target: Sheaf, maps: Vec<Vec<usize>>) -> Result<SheafMorphism, SheafError> {
        if source.base != target.base {
            return Err(SheafError::BaseMismatch);
        }
        let m = SheafMorphism {
            source,
            target,
            maps,
        };
        if m.maps.len() != m.source.base.len() {
            return Err(SheafError::NotMorphism {
                detail: "one component per point required".into(),
            });
        }
        for p in 0..m.source.base.len() {
            if m.maps[p].len() != m.source.size(p) || m.maps[p].iter().any(|&x| x >= m.target.size(p)) {
                return Err(SheafError::NotMorphism {
                    detail: format!("component at point {} has the wrong shape", p),
                });
            }
        }
        for (p, q) in m.source.edges() {
            for a in 0..m.source.size(p) {
                if m.maps[q][m.source.restrict(p, q, a)] != m.target.restrict(p, q, m.maps[p][a]) {
                    return Err(SheafError::NotMorphism {
                        detail: "components do not commute with transitions".into(),
                    });
                }
            }
        }
        Ok(m)
    }

    pub fn identity(f: &Sheaf) -> SheafMorphism {
        let maps = f.sizes.iter().map(|&n| (0..n).collect()).collect();
        SheafMorphism {
            source: f.clone(),
            target: f.clone(),
            maps,
        }
    }

    /// `self` then `g`.
    pub fn then(&self, g: &SheafMorphism) -> SheafMorphism {
        assert_eq!(self.target, g.source, "composition type mismatch");
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(p, f)| f.iter().map(|&a| g.maps[p][a]).collect())
            .collect();
        SheafMorphism {
            source: self.source.clone(),
            target: g.target.clone(),
            maps,
        }
    }

    /// Componentwise injectivity, which for sheaves is exactly being monic.
    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(|f| {
            let mut seen = std::collections::BTreeSet::new();
            f.iter().all(|&x| seen.insert(x))
        })
    }
}

/// All natural families of stalk maps `source_q -> target_q` for q in the
/// up-set `u`, as raw tables indexed by base point (empty outside `u`).
/// Output order is canonical (lexicographic in point-major order).
pub fn hom_tables(source: &Sheaf, target: &Sheaf, u: PointSet) -> Vec<Vec<Vec<usize>>> {
    assert_eq!(source.base, target.base);
    let n = source.base.len();
    let pts: Vec<usize> = points_of(u).collect();
    let mut out = Vec::new();
    let mut cur: Vec<Vec<usize>> = vec![Vec::new(); n];
    go(source, target, &pts, 0, &mut cur, &mut out);
    return out;

    fn go(
        src: &Sheaf,
        tgt: &Sheaf,
        pts: &[usize],
        i: usize,
        cur: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == pts.len() {
            out.push(cur.clone());
            return;
        }
        let q = pts[i];
        if src.size(q) > 0 && tgt.size(q) == 0 {
            return; // no function into an empty stalk
        }
        let mut table = vec![0usize; src.size(q)];
        'next: loop {
            // Check naturality against already assigned points.
            let ok = pts[..i].iter().all(|&p| {
                let fits_up = |lo: usize, hi: usize, flo: &[usize], fhi: &[usize]| {
                    (0..src.size(lo)).all(|a| fhi[src.restrict(lo, hi, a)] == tgt.restrict(lo, hi, flo[a]))
                };
                (!src.base().leq(p, q) || fits_up(p, q, &cur[p], &table))
                    && (!src.base().leq(q, p) || fits_up(q, p, &table, &cur[p]))
            });
            if ok {
                cur[q] = table.clone();
                go(src, tgt, pts, i + 1, cur, out);
                cur[q] = Vec::new();
            }
            // Advance the table as a mixed-radix counter (last index fastest).
            for j in (0..table.len()).rev() {
                table[j] += 1;
                if table[j] < tgt.size(q) {
                    continue 'next;
                }
                table[j] = 0;
            }
            break;
        }
    }
}

/// All sheaf morphisms F → G.
pub fn hom(source: &Sheaf, target: &Sheaf) -> Vec<SheafMorphism> {
    hom_tables(source, target, source.base().full())
        .into_iter()
        .map(|maps| SheafMorphism {
            source: source.clone(),
            target: target.clone(),
            maps,
        })
        .collect()
}

/// A subsheaf: a transition-closed choice of subset of each stalk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsheaf {
    pub parent: Sheaf,
    /// One bitmask per point; stalks are capped at 128 elements.
    pub elems: Vec<ElemSet>,
}

impl Subsheaf {
    pub fn new(parent: Sheaf, elems: Vec<ElemSet>) -> Result<Subsheaf, SheafError> {
        assert!(parent.sizes().iter().all(|&n| n <= 128), "stalk too large for subsheaf masks");
        let s = Subsheaf { parent, elems };
        for (p, q) in s.parent.edges() {
            for a in 0..s.parent.size(p) {
                if s.contains(p, a) && !s.contains(q, s.parent.restrict(p, q, a)) {
                    return Err(SheafError::NotSheaf {
                        detail: "subsets are not closed under transitions".into(),
                    });
                }
            }
        }
        Ok(s)
    }

    pub fn whole(parent: &Sheaf) -> Subsheaf {
        let elems = parent.sizes().iter().map(|&n| mask_full(n)).collect();
        Subsheaf {
            parent: parent.clone(),
            elems,
        }
    }

    pub fn bottom(parent: &Sheaf) -> Subsheaf {
        Subsheaf {
            parent: parent.clone(),
            elems: vec![0; parent.base().len()],
        }
    }

    pub fn contains(&self, p: usize, a: usize) -> bool {
        self.elems[p] & (1 << a) != 0
    }

    pub fn is_whole(&self) -> bool {
        self.elems
            .iter()
            .zip(self.parent.sizes())
            .all(|(&m, &n)| m == mask_full(n))
    }

    pub fn is_empty(&self) -> bool {
        self.elems.iter().all(|&m| m == 0)
    }

    pub fn leq(&self, other: &Subsheaf) -> bool {
        assert_eq!(self.parent, other.parent);
        self.elems.iter().zip(&other.elems).all(|(&a, &b)| a & !b == 0)
    }

    /// The subsheaf as a sheaf in its own right, with the inclusion.
    pub fn to_sheaf(&self) -> (Sheaf, SheafMorphism) {
        let base = self.parent.base().clone();
        let chosen: Vec<Vec<usize>> = (0..base.len())
            .map(|p| (0..self.parent.size(p)).filter(|&a| self.contains(p, a)).collect())
            .collect();
        let sizes: Vec<usize> = chosen.iter().map(|c| c.len()).collect();
        let mut trans = BTreeMap::new();
        for (p, q) in self.parent.edges() {
            let t = chosen[p]
                .iter()
                .map(|&a| {
                    let img = self.parent.restrict(p, q, a);
                    chosen[q].iter().position(|&b| b == img).unwrap()
                })
                .collect();
            trans.insert((p, q), t);
        }
        let sheaf = Sheaf {
            base,
            sizes,
            trans,
        };
        let incl = SheafMorphism {
            source: sheaf.clone(),
            target: self.parent.clone(),
            maps: chosen,
        };
        (sheaf, incl)
    }
}

pub fn mask_full(n: usize) -> ElemSet {
    if n >= 128 {
        panic!("stalks are limited to 128 elements");
    }
    (1u128 << n) - 1
}

/// All subsheaves of `f`, in a canonical order.
pub fn all_subsheaves(f: &Sheaf) -> Vec<Subsheaf> {
    let n = f.base().len();
    let mut out = Vec::new();
    let mut cur = vec![0 as ElemSet; n];
    go(f, 0, &mut cur, &mut out);
    return out;

    fn go(f: &Sheaf, p: usize, cur: &mut Vec<ElemSet>, out: &mut Vec<Subsheaf>) {
        if p == f.base().len() {
            if let Ok(s) = Subsheaf::new(f.clone(), cur.clone()) {
                out.push(s);
            }
            return;
        }
        for m in 0..=mask_full(f.size(p)) {
            cur[p] = m;
            go(f, p + 1, cur, out);
        }
        cur[p] = 0;
    }
}

/// Searches for an isomorphism F ≅ G, returning the stalkwise bijections.
pub fn find_iso(f: &Sheaf, g: &Sheaf) -> Option<SheafMorphism> {
    if f.base() != g.base() || f.sizes() != g.sizes() {
        return None;
    }
    let n = f.base().len();
    let mut maps: Vec<Vec<usize>> = vec![Vec::new(); n];
    if go(f, g, 0, &mut maps) {
        return Some(SheafMorphism {
            source: f.clone(),
            target: g.clone(),
            maps,
        });
    }
    return None;

    fn go(f: &Sheaf, g: &Sheaf, p: usize, maps: &mut Vec<Vec<usize>>) -> bool {
        if p == f.base().len() {
            return true;
        }
        let mut perm: Vec<usize> = (0..f.size(p)).collect();
        loop {
            maps[p] = perm.clone();
            let ok = (0..=p).all(|q| {
                (0..=p).all(|r| {
                    if q == r || !f.base().leq(q, r) {
                        return true;
                    }
                    (0..f.size(q)).all(|a| maps[r][f.restrict(q, r, a)] == g.restrict(q, r, maps[q][a]))
                })
            });
            if ok && go(f, g, p + 1, maps) {
                return true;
            }
            if !next_permutation(&mut perm) {
                maps[p] = Vec::new();
                return false;
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A random sheaf over `base` with stalks of size 1..=max_stalk. Transition
/// tables are sampled and resampled until functorial; falls back to a
/// constant sheaf if no functorial assignment is found quickly.
pub fn random_sheaf<R: Rng>(base: &FinSpace, max_stalk: usize, rng: &mut R) -> Sheaf {
    for _ in 0..200 {
        let sizes: Vec<usize> = (0..base.len()).map(|_| rng.gen_range(1..=max_stalk)).collect();
        let mut trans = BTreeMap::new();
        for p in 0..base.len() {
            for q in points_of(base.min_open(p)) {
                if q != p {
                    let t: Vec<usize> = (0..sizes[p]).map(|_| rng.gen_range(0..sizes[q])).collect();
                    trans.insert((p, q), t);
                }
            }
        }
        if let Ok(s) = Sheaf::new(base.clone(), sizes, trans) {
            return s;
        }
    }
    Sheaf::constant(base.clone(), rng.gen_range(1..=max_stalk))
}

/// A random subsheaf of `parent`: a random generating set, closed forward
/// under transitions.
pub fn random_subsheaf<R: Rng>(parent: &Sheaf, rng: &mut R) -> Subsheaf {
    let mut elems: Vec<ElemSet> = (0..parent.base().len())
        .map(|p| {
            let n = parent.size(p);
            if n == 0 {
                0
            } else {
                rng.gen_range(0..=mask_full(n))
            }
        })
        .collect();
    // Forward closure.
    loop {
        let mut changed = false;
        for (p, q) in parent.edges() {
            for a in 0..parent.size(p) {
                if elems[p] & (1 << a) != 0 {
                    let b = parent.restrict(p, q, a);
                    if elems[q] & (1 << b) == 0 {
                        elems[q] |= 1 << b;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Subsheaf::new(parent.clone(), elems).unwrap()
}

/// Extracts the `%space <path>` header of a sheaf file, if present.
pub fn sheaf_space_ref(input: &str) -> Option<String> {
    for line in input.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("%space") {
            return Some(rest.trim().to_string());
        }
    }
    None
}

/// Parses the sheaf file body against a known base space:
/// `stalk p: a b c;` and `trans p->q: a|->x b|->y;` declarations.
/// Returns the sheaf and the element labels per point.
pub fn parse_sheaf(input: &str, space: &FinSpace) -> Result<(Sheaf, Vec<Vec<String>>), SheafError> {
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); space.len()];
    let mut seen_stalk = vec![false; space.len()];
    struct RawTrans {
        p: usize,
        q: usize,
        pairs: Vec<(String, String)>,
        line: usize,
    }
    let mut raw: Vec<RawTrans> = Vec::new();
    // Header and comment lines are whole-line constructs; drop them before
    // splitting on `;`.
    let body: String = input
        .lines()
        .map(|l| {
            let t = l.trim_start();
            if t.starts_with('%') || t.starts_with('#') {
                ""
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut lineno = 0usize;
    for stmt in body.split(';') {
        lineno += stmt.matches('\n').count();
        let stmt = stmt.trim();
        let line = lineno + 1;
        if stmt.is_empty() || stmt.starts_with('#') || stmt.starts_with('%') {
            continue;
        }
        let err = |msg: String| SheafError::Parse { line, msg };
        let (key, rest) = stmt.split_once(':').ok_or_else(|| err("expected `key: ...`".into()))?;
        let key = key.trim();
        if let Some(pt) = key.strip_prefix("stalk") {
            let p = space.point_index(pt.trim())?;
            if seen_stalk[p] {
                return Err(err(format!("duplicate stalk for point `{}`", pt.trim())));
            }
            seen_stalk[p] = true;
            labels[p] = rest.split_whitespace().map(|s| s.to_string()).collect();
        } else if let Some(edge) = key.strip_prefix("trans") {
            let (a, b) = edge
                .trim()
                .split_once("->")
                .ok_or_else(|| err("expected `trans p->q: ...`".into()))?;
            let p = space.point_index(a.trim())?;
            let q = space.point_index(b.trim())?;
            let mut pairs = Vec::new();
            for item in rest.split_whitespace() {
                let (x, y) = item
                    .split_once("|->")
                    .ok_or_else(|| err(format!("expected `a|->x`, got `{}`", item)))?;
                pairs.push((x.to_string(), y.to_string()));
            }
            raw.push(RawTrans { p, q, pairs, line });
        } else {
            return Err(err(format!("unknown declaration `{}`", key)));
        }
    }
    for p in 0..space.len() {
        if !seen_stalk[p] {
            return Err(SheafError::NotSheaf {
                detail: format!("missing stalk for point `{}`", space.point_names()[p]),
            });
        }
    }
    let sizes: Vec<usize> = labels.iter().map(|l| l.len()).collect();
    let mut trans: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for rt in raw {
        let mut table = vec![usize::MAX; sizes[rt.p]];
        for (x, y) in &rt.pairs {
            let a = labels[rt.p].iter().position(|l| l == x).ok_or(SheafError::Parse {
                line: rt.line,
                msg: format!("unknown stalk element `{}`", x),
            })?;
            let b = labels[rt.q].iter().position(|l| l == y).ok_or(SheafError::Parse {
                line: rt.line,
                msg: format!("unknown stalk element `{}`", y),
            })?;
            table[a] = b;
        }
        if table.iter().any(|&x| x == usize::MAX) {
            return Err(SheafError::Parse {
                line: rt.line,
                msg: "transition table is not total".into(),
            });
        }
        trans.insert((rt.p, rt.q), table);
    }
    let sheaf = Sheaf::new(space.clone(), sizes, trans)?;
    Ok((sheaf, labels))
}

/// Renders a sheaf in the file format, with numeric element labels.
pub fn format_sheaf(f: &Sheaf) -> String {
    let mut out = String::new();
    for p in 0..f.base().len() {
        let elems: Vec<String> = (0..f.size(p)).map(|a| format!("e{}", a)).collect();
        out.push_str(&format!(
            "stalk {}: {};\n",
            f.base().point_names()[p],
            elems.join(" ")
        ));
    }
    for (p, q) in f.edges() {
        let pairs: Vec<String> = (0..f.size(p))
            .map(|a| format!("e{}|->e{}", a, f.restrict(p, q, a)))
            .collect();
        out.push_str(&format!(
            "trans {}->{}: {};\n",
            f.base().point_names()[p],
            f.base().point_names()[q],
            pairs.join(" ")
        ));
    }
    out
}
