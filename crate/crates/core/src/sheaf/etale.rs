//! The étale-space presentation: a sheaf as a space over the base with a
//! local homeomorphism, and the round trip between presentations.

use std::collections::BTreeMap;

use crate::error::SheafError;
use crate::finspace::{points_of, ContinuousMap, FinSpace, PointSet};

use super::Sheaf;

/// A space over a base whose projection is a local homeomorphism; the
/// fibers are the stalks of the corresponding sheaf.
#[derive(Debug, Clone)]
pub struct EtaleSpace {
    pub total: FinSpace,
    pub base: FinSpace,
    pub proj: ContinuousMap,
}

/// Checks that the projection is continuous and a local homeomorphism.
/// For finite spaces this is exactly: every total point's minimal open
/// maps bijectively onto the minimal open of its image.
pub fn is_local_homeo(e: &EtaleSpace) -> Result<(), SheafError> {
    if !e.proj.is_continuous() {
        return Err(SheafError::NotEtale {
            detail: "projection is not continuous".into(),
        });
    }
    for pt in 0..e.total.len() {
        let v = e.total.min_open(pt);
        let img = e.proj.image(v);
        let want = e.base.min_open(e.proj.map[pt]);
        let injective = points_of(v).count() == points_of(img).count();
        if !injective || img != want {
            return Err(SheafError::NotEtale {
                detail: format!(
                    "minimal open of `{}` does not map bijectively onto a minimal open",
                    e.total.point_names()[pt]
                ),
            });
        }
    }
    Ok(())
}

/// The étale space of a sheaf: total points are the stalk elements, named
/// `p.i`; the topology is generated by base-open preimages and the images
/// of the local sections through each germ.
pub fn to_etale(f: &Sheaf) -> EtaleSpace {
    let base = f.base().clone();
    let mut names = Vec::new();
    let mut offset = vec![0usize; base.len()];
    for p in 0..base.len() {
        offset[p] = names.len();
        for a in 0..f.size(p) {
            names.push(format!("{}.{}", base.point_names()[p], a));
        }
    }
    let total_n = names.len();
    assert!(total_n < 64, "total space too large");
    let mut subbasis: Vec<PointSet> = Vec::new();
    for &u in base.opens() {
        let mut m: PointSet = 0;
        for p in points_of(u) {
            for a in 0..f.size(p) {
                m |= 1 << (offset[p] + a);
            }
        }
        subbasis.push(m);
    }
    for p in 0..base.len() {
        for a in 0..f.size(p) {
            // The section through the germ (p, a) over min_open(p).
            let mut m: PointSet = 0;
            for q in points_of(base.min_open(p)) {
                m |= 1 << (offset[q] + f.restrict(p, q, a));
            }
            subbasis.push(m);
        }
    }
    let total = FinSpace::from_subbasis_masks(names, &subbasis);
    let map: Vec<usize> = (0..base.len())
        .flat_map(|p| std::iter::repeat(p).take(f.size(p)))
        .collect();
    let proj = ContinuousMap::new(total.clone(), base.clone(), map);
    EtaleSpace { total, base, proj }
}

/// Reassembles a sheaf from an étale space: stalks are fibers, transitions
/// follow the unique lift inside each minimal open.
pub fn from_etale(e: &EtaleSpace) -> Result<Sheaf, SheafError> {
    is_local_homeo(e)?;
    let base = e.base.clone();
    let fibers: Vec<Vec<usize>> = (0..base.len())
        .map(|x| (0..e.total.len()).filter(|&pt| e.proj.map[pt] == x).collect())
        .collect();
    let sizes: Vec<usize> = fibers.iter().map(|f| f.len()).collect();
    let mut trans = BTreeMap::new();
    for x in 0..base.len() {
        for y in points_of(base.min_open(x)) {
            if y == x {
                continue;
            }
            let mut table = Vec::with_capacity(sizes[x]);
            for &pt in &fibers[x] {
                let v = e.total.min_open(pt);
                let lifts: Vec<usize> = fibers[y]
                    .iter()
                    .copied()
                    .filter(|&q| v & (1 << q) != 0)
                    .collect();
                if lifts.len() != 1 {
                    return Err(SheafError::NotEtale {
                        detail: "no unique lift along a specialization edge".into(),
                    });
                }
                table.push(fibers[y].iter().position(|&q| q == lifts[0]).unwrap());
            }
            trans.insert((x, y), table);
        }
    }
    Sheaf::new(base, sizes, trans)
}

/// Searches for a homeomorphism over the base between two étale spaces:
/// a fiber-preserving bijection carrying opens onto opens.
pub fn etale_iso(e1: &EtaleSpace, e2: &EtaleSpace) -> Option<Vec<usize>> {
    if e1.base != e2.base || e1.total.len() != e2.total.len() {
        return None;
    }
    if e1.total.opens().len() != e2.total.opens().len() {
        return None;
    }
    let n_base = e1.base.len();
    let fibers1: Vec<Vec<usize>> = (0..n_base)
        .map(|x| (0..e1.total.len()).filter(|&p| e1.proj.map[p] == x).collect())
        .collect();
    let fibers2: Vec<Vec<usize>> = (0..n_base)
        .map(|x| (0..e2.total.len()).filter(|&p| e2.proj.map[p] == x).collect())
        .collect();
    if fibers1.iter().zip(&fibers2).any(|(a, b)| a.len() != b.len()) {
        return None;
    }
    let mut map = vec![usize::MAX; e1.total.len()];
    if assign(e1, e2, &fibers1, &fibers2, 0, &mut map) {
        return Some(map);
    }
    return None;

    fn assign(
        e1: &EtaleSpace,
        e2: &EtaleSpace,
        fibers1: &[Vec<usize>],
        fibers2: &[Vec<usize>],
        x: usize,
        map: &mut Vec<usize>,
    ) -> bool {
        if x == fibers1.len() {
            // Full assignment: must carry opens onto opens bijectively.
            return e1.total.opens().iter().all(|&u| {
                let mut img: PointSet = 0;
                for p in points_of(u) {
                    img |= 1 << map[p];
                }
                e2.total.is_open(img)
            });
        }
        let mut perm: Vec<usize> = (0..fibers1[x].len()).collect();
        loop {
            for (i, &j) in perm.iter().enumerate() {
                map[fibers1[x][i]] = fibers2[x][j];
            }
            if assign(e1, e2, fibers1, fibers2, x + 1, map) {
                return true;
            }
            if !super::next_permutation(&mut perm) {
                for &p in &fibers1[x] {
                    map[p] = usize::MAX;
                }
                return false;
            }
        }
    }
}
