//! Finite topological spaces and continuous maps.
//!
//! Points are interned atoms with a total order; subsets are bitmasks, so
//! every family of opens has a canonical form. Spaces are capped at 64
//! points by the representation, far above the workbench's practical sizes.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::SpaceError;

/// A subset of the points of a space, as a bitmask over point indices.
pub type PointSet = u64;

/// A finite topological space: an ordered point list plus the family of
/// opens, closed under union and intersection and containing the empty set
/// and the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinSpace {
    points: Vec<String>,
    /// Sorted, deduplicated list of open sets.
    opens: Vec<PointSet>,
}

impl FinSpace {
    /// The space with the given points and *all* subsets open.
    pub fn discrete(points: &[&str]) -> FinSpace {
        let names: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let n = names.len();
        let opens = (0..(1u64 << n)).collect();
        FinSpace {
            points: names,
            opens,
        }
    }

    /// The space with only the empty set and the whole set open.
    pub fn indiscrete(points: &[&str]) -> FinSpace {
        let names: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let full = full_mask(names.len());
        let mut opens = vec![0];
        if full != 0 {
            opens.push(full);
        }
        FinSpace {
            points: names,
            opens,
        }
    }

    /// One-point space.
    pub fn point() -> FinSpace {
        FinSpace::discrete(&["pt"])
    }

    /// Sierpinski space: open point `g`, closed point `c`.
    pub fn sierpinski() -> FinSpace {
        FinSpace::from_subbasis(&["g", "c"], &[vec!["g"]]).unwrap()
    }

    /// Smallest topology containing the subbasis sets.
    pub fn from_subbasis(points: &[&str], subbasis: &[Vec<&str>]) -> Result<FinSpace, SpaceError> {
        let names: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let mut masks = Vec::new();
        for sub in subbasis {
            let mut m: PointSet = 0;
            for p in sub {
                let idx = names
                    .iter()
                    .position(|n| n == p)
                    .ok_or_else(|| SpaceError::MemberOutOfRange {
                        member: p.to_string(),
                    })?;
                m |= 1 << idx;
            }
            masks.push(m);
        }
        Ok(FinSpace::from_subbasis_masks(names, &masks))
    }

    /// Subbasis closure working directly on masks.
    pub fn from_subbasis_masks(points: Vec<String>, subbasis: &[PointSet]) -> FinSpace {
        let full = full_mask(points.len());
        let mut family: BTreeSet<PointSet> = BTreeSet::new();
        family.insert(0);
        family.insert(full);
        for &m in subbasis {
            family.insert(m & full);
        }
        // Close under pairwise union and intersection to a fixpoint.
        loop {
            let current: Vec<PointSet> = family.iter().copied().collect();
            let before = family.len();
            for (i, &a) in current.iter().enumerate() {
                for &b in &current[i + 1..] {
                    family.insert(a | b);
                    family.insert(a & b);
                }
            }
            if family.len() == before {
                break;
            }
        }
        FinSpace {
            points,
            opens: family.into_iter().collect(),
        }
    }

    /// Builds a space from an explicit family of opens, validating closure.
    pub fn from_opens(points: Vec<String>, opens: Vec<PointSet>) -> Result<FinSpace, SpaceError> {
        let full = full_mask(points.len());
        let family: BTreeSet<PointSet> = opens.into_iter().collect();
        if !family.contains(&0) {
            return Err(SpaceError::NotTopology {
                detail: "the empty set is not open".into(),
            });
        }
        if !family.contains(&full) {
            return Err(SpaceError::NotTopology {
                detail: "the whole point set is not open".into(),
            });
        }
        for &a in &family {
            if a & !full != 0 {
                return Err(SpaceError::NotTopology {
                    detail: "an open mentions a point outside the space".into(),
                });
            }
            for &b in &family {
                if !family.contains(&(a | b)) || !family.contains(&(a & b)) {
                    return Err(SpaceError::NotTopology {
                        detail: "opens are not closed under union and intersection".into(),
                    });
                }
            }
        }
        Ok(FinSpace {
            points,
            opens: family.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_names(&self) -> &[String] {
        &self.points
    }

    pub fn point_index(&self, name: &str) -> Result<usize, SpaceError> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| SpaceError::UnknownPoint { name: name.into() })
    }

    pub fn full(&self) -> PointSet {
        full_mask(self.points.len())
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        self.opens.binary_search(&s).is_ok()
    }

    /// Intersection of all opens containing `p`; itself open.
    pub fn min_open(&self, p: usize) -> PointSet {
        let mut m = self.full();
        for &o in &self.opens {
            if o & (1 << p) != 0 {
                m &= o;
            }
        }
        m
    }

    /// Specialization preorder: `le[p]` is the mask of points `q` with
    /// `p <= q`, i.e. `q` is in every open containing `p`. Equals
    /// `min_open(p)`.
    pub fn specialization(&self) -> Vec<PointSet> {
        (0..self.len()).map(|p| self.min_open(p)).collect()
    }

    /// `p <= q` in the specialization preorder.
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.min_open(p) & (1 << q) != 0
    }

    /// Whether `s` is an up-set for the specialization preorder.
    pub fn is_up_set(&self, s: PointSet) -> bool {
        for p in 0..self.len() {
            if s & (1 << p) != 0 && self.min_open(p) & !s & self.full() != 0 {
                return false;
            }
        }
        true
    }

    /// Connected components as point masks, via the equivalence closure of
    /// specialization.
    pub fn components(&self) -> Vec<PointSet> {
        let n = self.len();
        let spec = self.specialization();
        let mut comp: Vec<Option<usize>> = vec![None; n];
        let mut out: Vec<PointSet> = Vec::new();
        for start in 0..n {
            if comp[start].is_some() {
                continue;
            }
            let id = out.len();
            let mut mask: PointSet = 0;
            let mut stack = vec![start];
            while let Some(p) = stack.pop() {
                if comp[p].is_some() {
                    continue;
                }
                comp[p] = Some(id);
                mask |= 1 << p;
                for q in 0..n {
                    if q != p && (spec[p] & (1 << q) != 0 || spec[q] & (1 << p) != 0) {
                        stack.push(q);
                    }
                }
            }
            out.push(mask);
        }
        out
    }

    /// Formats a subset as `{a b c}`.
    pub fn format_set(&self, s: PointSet) -> String {
        let mut parts = Vec::new();
        for (i, name) in self.points.iter().enumerate() {
            if s & (1 << i) != 0 {
                parts.push(name.as_str());
            }
        }
        format!("{{{}}}", parts.join(" "))
    }
}

pub fn full_mask(n: usize) -> PointSet {
    if n >= 64 {
        panic!("spaces are limited to 63 points");
    }
    (1u64 << n) - 1
}

/// Iterates the points of a mask.
pub fn points_of(s: PointSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| s & (1 << i) != 0)
}

/// A point map between finite spaces, with continuity checkable.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousMap {
    pub source: FinSpace,
    pub target: FinSpace,
    /// `map[p]` is the target index of source point `p`.
    pub map: Vec<usize>,
}

impl ContinuousMap {
    pub fn new(source: FinSpace, target: FinSpace, map: Vec<usize>) -> ContinuousMap {
        assert_eq!(map.len(), source.len());
        ContinuousMap {
            source,
            target,
            map,
        }
    }

    pub fn preimage(&self, s: PointSet) -> PointSet {
        let mut out: PointSet = 0;
        for (p, &q) in self.map.iter().enumerate() {
            if s & (1 << q) != 0 {
                out |= 1 << p;
            }
        }
        out
    }

    pub fn image(&self, s: PointSet) -> PointSet {
        let mut out: PointSet = 0;
        for (p, &q) in self.map.iter().enumerate() {
            if s & (1 << p) != 0 {
                out |= 1 << q;
            }
        }
        out
    }

    pub fn is_continuous(&self) -> bool {
        self.target
            .opens()
            .iter()
            .all(|&o| self.source.is_open(self.preimage(o)))
    }
}

/// True iff the point map `map` is continuous from `source` to `target`.
pub fn is_continuous(map: &[usize], source: &FinSpace, target: &FinSpace) -> bool {
    ContinuousMap::new(source.clone(), target.clone(), map.to_vec()).is_continuous()
}

/// Enumerates all topologies on `n` named points, by brute force over
/// subset families. Intended for small `n` (<= 4).
pub fn all_topologies(points: &[&str]) -> Vec<FinSpace> {
    let n = points.len();
    assert!(n <= 4, "exhaustive topology enumeration is capped at 4 points");
    let names: Vec<String> = points.iter().map(|s| s.to_string()).collect();
    let subsets = 1usize << n;
    let mut out = Vec::new();
    for fam in 0u64..(1 << subsets) {
        let opens: Vec<PointSet> = (0..subsets as u64).filter(|&s| fam & (1 << s) != 0).collect();
        if let Ok(space) = FinSpace::from_opens(names.clone(), opens) {
            out.push(space);
        }
    }
    out
}

impl fmt::Display for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points: {};", self.points.join(" "))?;
        write!(f, " opens:")?;
        for &o in &self.opens {
            write!(f, " {}", self.format_set(o))?;
        }
        write!(f, ";")
    }
}

/// Parses the space file format:
/// `points: a b c; opens: {} {a} {a b c};` or `points: ...; subbasis: ...;`.
pub fn parse_space(input: &str) -> Result<FinSpace, SpaceError> {
    let mut points: Option<Vec<String>> = None;
    let mut opens: Option<Vec<Vec<String>>> = None;
    let mut subbasis: Option<Vec<Vec<String>>> = None;
    // Comment lines are whole-line constructs; drop them before splitting
    // on `;`.
    let body: String = input
        .lines()
        .map(|l| if l.trim_start().starts_with('#') { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    for (lineno, raw) in body.split(';').enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| SpaceError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let (key, rest) = line.split_once(':').ok_or_else(|| err("expected `key: ...`"))?;
        match key.trim() {
            "points" => {
                points = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
            }
            "opens" | "subbasis" => {
                let mut sets = Vec::new();
                let mut rest = rest.trim();
                while !rest.is_empty() {
                    if !rest.starts_with('{') {
                        return Err(err("expected `{`"));
                    }
                    let close = rest.find('}').ok_or_else(|| err("missing `}`"))?;
                    let inner = &rest[1..close];
                    sets.push(inner.split_whitespace().map(|s| s.to_string()).collect());
                    rest = rest[close + 1..].trim();
                }
                if key.trim() == "opens" {
                    opens = Some(sets);
                } else {
                    subbasis = Some(sets);
                }
            }
            other => {
                return Err(err(&format!("unknown key `{}`", other)));
            }
        }
    }
    let points = points.ok_or(SpaceError::Parse {
        line: 1,
        msg: "missing `points:` declaration".into(),
    })?;
    let to_masks = |sets: Vec<Vec<String>>| -> Result<Vec<PointSet>, SpaceError> {
        sets.into_iter()
            .map(|set| {
                let mut m: PointSet = 0;
                for p in set {
                    let idx = points.iter().position(|n| *n == p).ok_or(
                        SpaceError::MemberOutOfRange { member: p.clone() },
                    )?;
                    m |= 1 << idx;
                }
                Ok(m)
            })
            .collect()
    };
    match (opens, subbasis) {
        (Some(o), None) => FinSpace::from_opens(points.clone(), to_masks(o)?),
        (None, Some(s)) => Ok(FinSpace::from_subbasis_masks(points.clone(), &to_masks(s)?)),
        (None, None) => Err(SpaceError::Parse {
            line: 1,
            msg: "missing `opens:` or `subbasis:` declaration".into(),
        }),
        (Some(_), Some(_)) => Err(SpaceError::Parse {
            line: 1,
            msg: "give either `opens:` or `subbasis:`, not both".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sierpinski_from_subbasis() {
        let s = FinSpace::from_subbasis(&["g", "c"], &[vec!["g"]]).unwrap();
        assert_eq!(s.opens(), &[0b00, 0b01, 0b11]);
    }

    #[test]
    fn discrete_from_subbasis() {
        let s = FinSpace::from_subbasis(&["0", "1"], &[vec!["0"], vec!["1"]]).unwrap();
        assert_eq!(s.opens().len(), 4);
    }

    #[test]
    fn indiscrete_from_empty_subbasis() {
        let s = FinSpace::from_subbasis(&["0", "1", "2"], &[]).unwrap();
        assert_eq!(s.opens(), &[0, 0b111]);
    }

    #[test]
    fn subbasis_member_out_of_range() {
        assert!(matches!(
            FinSpace::from_subbasis(&["a"], &[vec!["b"]]),
            Err(SpaceError::MemberOutOfRange { .. })
        ));
    }

    #[test]
    fn min_open_cases() {
        let s = FinSpace::sierpinski();
        let g = s.point_index("g").unwrap();
        let c = s.point_index("c").unwrap();
        assert_eq!(s.min_open(g), 0b01);
        assert_eq!(s.min_open(c), 0b11);
        let d = FinSpace::discrete(&["0", "1"]);
        assert_eq!(d.min_open(0), 0b01);
    }

    #[test]
    fn specialization_cases() {
        let s = FinSpace::sierpinski();
        let g = s.point_index("g").unwrap();
        let c = s.point_index("c").unwrap();
        // c <= g plus reflexivity
        assert!(s.leq(c, g));
        assert!(s.leq(c, c) && s.leq(g, g));
        assert!(!s.leq(g, c));

        let d = FinSpace::discrete(&["0", "1"]);
        assert!(d.leq(0, 0) && !d.leq(0, 1) && !d.leq(1, 0));

        let i = FinSpace::indiscrete(&["0", "1"]);
        assert!(i.leq(0, 1) && i.leq(1, 0));
    }

    #[test]
    fn opens_are_up_sets() {
        for space in all_topologies(&["a", "b", "c"]) {
            for &o in space.opens() {
                assert!(space.is_up_set(o));
            }
            // and every up-set need not be open in general, but for finite
            // spaces it is: check the converse too.
            for s in 0..=space.full() {
                if space.is_up_set(s) {
                    assert!(space.is_open(s), "up-set {:b} not open in {}", s, space);
                }
            }
        }
    }

    #[test]
    fn from_subbasis_idempotent() {
        for space in all_topologies(&["a", "b", "c"]) {
            let again = FinSpace::from_subbasis_masks(
                space.point_names().to_vec(),
                space.opens(),
            );
            assert_eq!(space, again);
        }
    }

    #[test]
    fn continuity_cases() {
        let s = FinSpace::sierpinski();
        // identity
        assert!(is_continuous(&[0, 1], &s, &s));
        // swap g and c is not continuous
        assert!(!is_continuous(&[1, 0], &s, &s));
        // constant maps are continuous
        let d = FinSpace::discrete(&["0", "1"]);
        assert!(is_continuous(&[0, 0], &d, &s));
        assert!(is_continuous(&[1, 1], &d, &s));
    }

    #[test]
    fn components_match_specialization_closure() {
        for space in all_topologies(&["a", "b", "c"]) {
            let comps = space.components();
            let union: PointSet = comps.iter().fold(0, |a, &b| a | b);
            assert_eq!(union, space.full());
            for (i, &a) in comps.iter().enumerate() {
                for &b in &comps[i + 1..] {
                    assert_eq!(a & b, 0);
                }
            }
        }
    }

    #[test]
    fn parse_space_formats() {
        let s = parse_space("points: a b c; opens: {} {a} {a b c};").unwrap();
        assert_eq!(s.opens().len(), 3);
        let s2 = parse_space("points: g c; subbasis: {g};").unwrap();
        assert_eq!(s2, FinSpace::sierpinski());
        assert!(parse_space("points: a; opens: {a};").is_err());
    }

    #[test]
    fn count_topologies_on_small_sets() {
        // Known counts: 1 point -> 1, 2 points -> 4, 3 points -> 29.
        assert_eq!(all_topologies(&["a"]).len(), 1);
        assert_eq!(all_topologies(&["a", "b"]).len(), 4);
        assert_eq!(all_topologies(&["a", "b", "c"]).len(), 29);
    }
}
