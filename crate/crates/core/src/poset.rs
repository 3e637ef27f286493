//! Finite simplicial posets: parsing, the boolean-interval axiom, meets and
//! joins, and f-/h-vectors.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a poset element; `0` is always the bottom element.
pub type ElementId = usize;

/// Index of an atom in the atom list `x_1..x_n` (zero based).
pub type AtomIndex = usize;

pub const BOTTOM: ElementId = 0;

/// Structural problems that prevent building a poset at all. Violations of
/// the simplicial axioms are reported by [`SimplicialPoset::validate`]
/// instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has no elements")]
    Empty,
    #[error("element ids must be dense from 0: missing id {0}")]
    NonDenseIds(usize),
    #[error("duplicate element id {0}")]
    DuplicateId(usize),
    #[error("element 0 must have rank 0 and no covers")]
    MalformedBottom,
    #[error("element {element} covers unknown element {cover}")]
    DanglingCover { element: ElementId, cover: ElementId },
    #[error("element {0} covers itself")]
    SelfCover(ElementId),
    #[error("cover relation contains a cycle through element {0}")]
    Cycle(ElementId),
    #[error("invalid poset JSON: {0}")]
    Json(String),
}

/// One element record of the poset file format.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ElementRecord {
    pub id: ElementId,
    pub rank: usize,
    pub covers: Vec<ElementId>,
}

/// The poset file format: `{"name": ..., "elements": [{"id", "rank", "covers"}]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PosetFile {
    pub name: String,
    pub elements: Vec<ElementRecord>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The element is not above the bottom element.
    NotAboveBottom { element: ElementId },
    RankMismatch {
        element: ElementId,
        declared: usize,
        computed: usize,
    },
    /// A listed cover is not one rank below the element.
    RankJump { element: ElementId, cover: ElementId },
    NonBooleanInterval { element: ElementId, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotAboveBottom { element } => {
                write!(f, "element {element} is not above the bottom element")
            }
            Violation::RankMismatch {
                element,
                declared,
                computed,
            } => write!(
                f,
                "element {element} declares rank {declared} but its longest chain from 0 has length {computed}"
            ),
            Violation::RankJump { element, cover } => {
                write!(f, "element {element} covers {cover} across a rank jump")
            }
            Violation::NonBooleanInterval { element, reason } => {
                write!(f, "interval [0,{element}] is not boolean: {reason}")
            }
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub name: String,
    pub elements: usize,
    pub rank: usize,
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// Result of a greatest-lower-bound query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Meet {
    Element(ElementId),
    /// The common lower bounds have no greatest element; the maximal ones are
    /// listed as witness.
    NoGreatest(Vec<ElementId>),
}

/// A finite poset with bottom element, stored as its Hasse diagram with the
/// full order relation and atom sets cached.
#[derive(Clone, Debug)]
pub struct SimplicialPoset {
    name: String,
    declared_rank: Vec<usize>,
    rank: Vec<usize>,
    lower: Vec<Vec<ElementId>>,
    upper: Vec<Vec<ElementId>>,
    // le[a * n + b] <=> a <= b
    le: Vec<bool>,
    atoms: Vec<ElementId>,
    atom_index: Vec<Option<AtomIndex>>,
    atom_sets: Vec<Vec<AtomIndex>>,
}

impl SimplicialPoset {
    /// Builds a poset from declared ranks and lower-cover lists, indexed by
    /// element id. Fails only on structural errors; the simplicial axioms are
    /// checked by [`validate`](Self::validate).
    pub fn from_covers(
        name: impl Into<String>,
        declared_rank: Vec<usize>,
        lower: Vec<Vec<ElementId>>,
    ) -> Result<Self, PosetError> {
        let n = declared_rank.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        assert_eq!(lower.len(), n);
        if declared_rank[BOTTOM] != 0 || !lower[BOTTOM].is_empty() {
            return Err(PosetError::MalformedBottom);
        }
        let mut lower = lower;
        for (y, covers) in lower.iter_mut().enumerate() {
            for &c in covers.iter() {
                if c >= n {
                    return Err(PosetError::DanglingCover { element: y, cover: c });
                }
                if c == y {
                    return Err(PosetError::SelfCover(y));
                }
            }
            covers.sort_unstable();
            covers.dedup();
        }
        let mut upper = vec![Vec::new(); n];
        for (y, covers) in lower.iter().enumerate() {
            for &c in covers {
                upper[c].push(y);
            }
        }

        // Kahn's algorithm over the cover graph, bottom-up.
        let mut indegree: Vec<usize> = lower.iter().map(Vec::len).collect();
        let mut queue: VecDeque<ElementId> = (0..n).filter(|&y| indegree[y] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(y) = queue.pop_front() {
            order.push(y);
            for &u in &upper[y] {
                indegree[u] -= 1;
                if indegree[u] == 0 {
                    queue.push_back(u);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&y| indegree[y] > 0).unwrap_or(0);
            return Err(PosetError::Cycle(stuck));
        }

        let mut rank = vec![0usize; n];
        let mut le = vec![false; n * n];
        for &y in &order {
            rank[y] = lower[y].iter().map(|&c| rank[c] + 1).max().unwrap_or(0);
            le[y * n + y] = true;
            for &c in &lower[y] {
                for w in 0..n {
                    if le[w * n + c] {
                        le[w * n + y] = true;
                    }
                }
            }
        }

        let atoms: Vec<ElementId> = (1..n)
            .filter(|&y| lower[y] == [BOTTOM])
            .collect();
        let mut atom_index = vec![None; n];
        for (i, &a) in atoms.iter().enumerate() {
            atom_index[a] = Some(i);
        }
        let atom_sets = (0..n)
            .map(|y| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| le[a * n + y])
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();

        Ok(SimplicialPoset {
            name: name.into(),
            declared_rank,
            rank,
            lower,
            upper,
            le,
            atoms,
            atom_index,
            atom_sets,
        })
    }

    pub fn from_file(file: &PosetFile) -> Result<Self, PosetError> {
        let n = file.elements.len();
        let mut slots: Vec<Option<&ElementRecord>> = vec![None; n];
        for rec in &file.elements {
            if rec.id >= n {
                let missing = (0..n).find(|&i| file.elements.iter().all(|r| r.id != i));
                return Err(PosetError::NonDenseIds(missing.unwrap_or(n)));
            }
            if slots[rec.id].is_some() {
                return Err(PosetError::DuplicateId(rec.id));
            }
            slots[rec.id] = Some(rec);
        }
        let recs: Vec<&ElementRecord> = slots.into_iter().map(|r| r.expect("dense")).collect();
        Self::from_covers(
            file.name.clone(),
            recs.iter().map(|r| r.rank).collect(),
            recs.iter().map(|r| r.covers.clone()).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, PosetError> {
        let file: PosetFile =
            serde_json::from_str(text).map_err(|e| PosetError::Json(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            name: self.name.clone(),
            elements: (0..self.len())
                .map(|y| ElementRecord {
                    id: y,
                    rank: self.declared_rank[y],
                    covers: self.lower[y].clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("poset serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.len()
    }

    /// Rank computed as the longest chain length from the bottom element.
    pub fn rank_of(&self, y: ElementId) -> usize {
        self.rank[y]
    }

    /// Rank of the poset: the maximum element rank.
    pub fn rank(&self) -> usize {
        self.rank.iter().copied().max().unwrap_or(0)
    }

    pub fn lower_covers(&self, y: ElementId) -> &[ElementId] {
        &self.lower[y]
    }

    pub fn upper_covers(&self, y: ElementId) -> &[ElementId] {
        &self.upper[y]
    }

    #[inline]
    pub fn le(&self, a: ElementId, b: ElementId) -> bool {
        self.le[a * self.len() + b]
    }

    #[inline]
    pub fn lt(&self, a: ElementId, b: ElementId) -> bool {
        a != b && self.le(a, b)
    }

    #[inline]
    pub fn comparable(&self, a: ElementId, b: ElementId) -> bool {
        self.le(a, b) || self.le(b, a)
    }

    pub fn elements_of_rank(&self, r: usize) -> Vec<ElementId> {
        self.elements().filter(|&y| self.rank[y] == r).collect()
    }

    /// Elements of maximal rank.
    pub fn facets(&self) -> Vec<ElementId> {
        self.elements_of_rank(self.rank())
    }

    /// Elements of rank `d - 1`.
    pub fn ridges(&self) -> Vec<ElementId> {
        match self.rank() {
            0 => Vec::new(),
            d => self.elements_of_rank(d - 1),
        }
    }

    /// Maximal elements.
    pub fn maximal_elements(&self) -> Vec<ElementId> {
        self.elements().filter(|&y| self.upper[y].is_empty()).collect()
    }

    /// Every maximal element has the maximal rank.
    pub fn is_pure(&self) -> bool {
        let d = self.rank();
        self.maximal_elements().iter().all(|&y| self.rank[y] == d)
    }

    /// Facets above `z`.
    pub fn facets_above(&self, z: ElementId) -> Vec<ElementId> {
        let d = self.rank();
        self.elements()
            .filter(|&y| self.rank[y] == d && self.le(z, y))
            .collect()
    }

    /// Elements strictly above `y`.
    pub fn strictly_above(&self, y: ElementId) -> impl Iterator<Item = ElementId> + '_ {
        self.elements().filter(move |&w| self.lt(y, w))
    }

    pub fn atoms(&self) -> &[ElementId] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, y: ElementId) -> Option<AtomIndex> {
        self.atom_index[y]
    }

    /// `A(y)`: indices of the atoms below `y`, ascending.
    pub fn atom_set(&self, y: ElementId) -> &[AtomIndex] {
        &self.atom_sets[y]
    }

    /// Element of rank `rank(y) - 1` below `y` missing atom `atom`.
    pub fn face_opposite(&self, y: ElementId, atom: AtomIndex) -> Option<ElementId> {
        self.lower[y]
            .iter()
            .copied()
            .find(|&z| !self.atom_sets[z].contains(&atom))
    }

    /// Checks every simplicial-poset axiom and lists all violations.
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let mut violations = Vec::new();
        for y in 0..n {
            if !self.le(BOTTOM, y) {
                violations.push(Violation::NotAboveBottom { element: y });
                continue;
            }
            if self.declared_rank[y] != self.rank[y] {
                violations.push(Violation::RankMismatch {
                    element: y,
                    declared: self.declared_rank[y],
                    computed: self.rank[y],
                });
            }
            for &c in &self.lower[y] {
                if self.rank[c] + 1 != self.rank[y] {
                    violations.push(Violation::RankJump { element: y, cover: c });
                }
            }
            if let Some(reason) = self.boolean_interval_failure(y) {
                violations.push(Violation::NonBooleanInterval { element: y, reason });
            }
        }
        ValidationReport {
            name: self.name.clone(),
            elements: n,
            rank: self.rank(),
            pass: violations.is_empty(),
            violations,
        }
    }

    /// `w -> A(w)` must be an order isomorphism from `[0,y]` onto the power
    /// set of `A(y)`.
    fn boolean_interval_failure(&self, y: ElementId) -> Option<String> {
        let r = self.rank[y];
        let a_y = &self.atom_sets[y];
        if a_y.len() != r {
            return Some(format!("|A({y})| = {} but rank is {r}", a_y.len()));
        }
        if r >= usize::BITS as usize - 1 {
            return Some(format!("rank {r} too large"));
        }
        let interval: Vec<ElementId> = (0..self.len()).filter(|&w| self.le(w, y)).collect();
        if interval.len() != 1 << r {
            return Some(format!(
                "interval has {} elements, expected {}",
                interval.len(),
                1usize << r
            ));
        }
        let mut seen: std::collections::BTreeMap<&[AtomIndex], ElementId> =
            std::collections::BTreeMap::new();
        for &w in &interval {
            if let Some(&other) = seen.get(self.atom_sets[w].as_slice()) {
                return Some(format!("elements {other} and {w} have the same atom set"));
            }
            seen.insert(&self.atom_sets[w], w);
        }
        // injective + correct size => onto the power set; check order reflection
        for &u in &interval {
            for &v in &interval {
                let subset = self.atom_sets[u]
                    .iter()
                    .all(|a| self.atom_sets[v].contains(a));
                if subset && !self.le(u, v) {
                    return Some(format!("A({u}) is inside A({v}) but {u} is not below {v}"));
                }
            }
        }
        None
    }

    /// Greatest lower bound of `a` and `b`.
    pub fn meet(&self, a: ElementId, b: ElementId) -> Meet {
        let common: Vec<ElementId> = self
            .elements()
            .filter(|&w| self.le(w, a) && self.le(w, b))
            .collect();
        if let Some(&g) = common
            .iter()
            .find(|&&g| common.iter().all(|&w| self.le(w, g)))
        {
            return Meet::Element(g);
        }
        let maximal = common
            .iter()
            .copied()
            .filter(|&w| !common.iter().any(|&v| self.lt(w, v)))
            .collect();
        Meet::NoGreatest(maximal)
    }

    /// Minimal common upper bounds of `a` and `b`, ascending by id.
    pub fn minimal_upper_bounds(&self, a: ElementId, b: ElementId) -> Vec<ElementId> {
        let common: Vec<ElementId> = self
            .elements()
            .filter(|&z| self.le(a, z) && self.le(b, z))
            .collect();
        common
            .iter()
            .copied()
            .filter(|&z| !common.iter().any(|&w| self.lt(w, z)))
            .collect()
    }

    /// `(f_0, ..., f_{d-1})`, `f_i` = number of rank `i + 1` elements.
    pub fn f_vector(&self) -> Vec<u64> {
        let d = self.rank();
        let mut f = vec![0u64; d];
        for y in self.elements() {
            let r = self.rank[y];
            if r >= 1 {
                f[r - 1] += 1;
            }
        }
        f
    }

    /// `(h_0, ..., h_d)` from expanding `sum_i f_{i-1} (t-1)^{d-i}`.
    pub fn h_vector(&self) -> Vec<i64> {
        h_from_f(&self.f_vector())
    }
}

/// Expands `sum_{i=0}^{d} f_{i-1} (t-1)^{d-i}` (with `f_{-1} = 1`) and reads
/// off the coefficient of `t^{d-k}` as `h_k`.
pub fn h_from_f(f: &[u64]) -> Vec<i64> {
    let d = f.len();
    let mut h = vec![0i64; d + 1];
    for i in 0..=d {
        let fi = if i == 0 { 1 } else { f[i - 1] as i64 };
        let e = d - i;
        // (t-1)^e = sum_j C(e,j) t^j (-1)^{e-j}; t^{d-k} needs j = d-k
        for j in 0..=e {
            let k = d - j;
            let sign = if (e - j).is_multiple_of(2) { 1 } else { -1 };
            h[k] += sign * fi * binomial(e as u64, j as u64) as i64;
        }
    }
    h
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 0, a=1, b=2, e1=3, e2=4.
    fn digon() -> SimplicialPoset {
        SimplicialPoset::from_covers(
            "digon",
            vec![0, 1, 1, 2, 2],
            vec![vec![], vec![0], vec![0], vec![1, 2], vec![1, 2]],
        )
        .unwrap()
    }

    fn tetrahedron_boundary() -> SimplicialPoset {
        crate::generators::boundary_simplex(3)
    }

    #[test]
    fn single_bottom_is_valid_rank_zero() {
        let p = SimplicialPoset::from_covers("pt", vec![0], vec![vec![]]).unwrap();
        let r = p.validate();
        assert!(r.pass);
        assert_eq!(r.rank, 0);
        assert!(p.f_vector().is_empty());
        assert_eq!(p.h_vector(), vec![1]);
    }

    #[test]
    fn edge_poset_is_boolean() {
        let p = SimplicialPoset::from_covers(
            "edge",
            vec![0, 1, 1, 2],
            vec![vec![], vec![0], vec![0], vec![1, 2]],
        )
        .unwrap();
        let r = p.validate();
        assert!(r.pass, "{:?}", r.violations);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn digon_validates() {
        let p = digon();
        assert!(p.validate().pass);
        assert_eq!(p.f_vector(), vec![2, 2]);
        assert_eq!(p.h_vector(), vec![1, 0, 1]);
    }

    #[test]
    fn digon_with_short_cover_fails_at_e2() {
        let p = SimplicialPoset::from_covers(
            "bad",
            vec![0, 1, 1, 2, 2],
            vec![vec![], vec![0], vec![0], vec![1, 2], vec![1]],
        )
        .unwrap();
        let r = p.validate();
        assert!(!r.pass);
        assert!(r.violations.iter().all(|v| matches!(
            v,
            Violation::NonBooleanInterval { element: 4, .. } | Violation::RankMismatch { element: 4, .. }
        )));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonBooleanInterval { element: 4, .. })));
    }

    #[test]
    fn rank_jump_and_mismatch_are_reported() {
        // element 2 claims rank 2 and covers the bottom directly
        let p = SimplicialPoset::from_covers("jump", vec![0, 1, 2], vec![vec![], vec![0], vec![0]])
            .unwrap();
        let r = p.validate();
        assert!(r.violations.contains(&Violation::RankMismatch {
            element: 2,
            declared: 2,
            computed: 1
        }));
        // a cover skipping a rank
        let q = SimplicialPoset::from_covers(
            "skip",
            vec![0, 1, 1, 2, 3],
            vec![vec![], vec![0], vec![0], vec![1, 2], vec![3, 1]],
        )
        .unwrap();
        assert!(q
            .validate()
            .violations
            .contains(&Violation::RankJump { element: 4, cover: 1 }));
    }

    #[test]
    fn second_minimal_element_is_reported() {
        let p = SimplicialPoset::from_covers("two-min", vec![0, 1, 0], vec![vec![], vec![0], vec![]])
            .unwrap();
        assert!(p
            .validate()
            .violations
            .contains(&Violation::NotAboveBottom { element: 2 }));
    }

    #[test]
    fn parse_level_errors() {
        assert_eq!(
            SimplicialPoset::from_covers("x", vec![0, 1], vec![vec![], vec![5]]).unwrap_err(),
            PosetError::DanglingCover { element: 1, cover: 5 }
        );
        assert!(matches!(
            SimplicialPoset::from_covers("x", vec![0, 1, 1], vec![vec![], vec![2], vec![1]]),
            Err(PosetError::Cycle(_))
        ));
        assert_eq!(
            SimplicialPoset::from_covers("x", vec![1], vec![vec![]]).unwrap_err(),
            PosetError::MalformedBottom
        );
        assert!(matches!(
            SimplicialPoset::from_json(r#"{"name":"x","elements":[{"id":0,"rank":0,"covers":[]},{"id":2,"rank":1,"covers":[0]}]}"#),
            Err(PosetError::NonDenseIds(1))
        ));
        assert!(matches!(SimplicialPoset::from_json("{"), Err(PosetError::Json(_))));
    }

    #[test]
    fn json_round_trip() {
        let p = digon();
        let q = SimplicialPoset::from_json(&p.to_json()).unwrap();
        assert_eq!(p.to_file(), q.to_file());
    }

    #[test]
    fn f_and_h_vectors_of_corpus_shapes() {
        let t = tetrahedron_boundary();
        assert_eq!(t.f_vector(), vec![4, 6, 4]);
        assert_eq!(t.h_vector(), vec![1, 1, 1, 1]);
        let ds = crate::generators::doubled_sphere(3);
        assert_eq!(ds.f_vector(), vec![3, 3, 2]);
        assert_eq!(ds.h_vector(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn meets_and_upper_bounds() {
        let p = digon();
        assert_eq!(p.meet(3, 4), Meet::NoGreatest(vec![1, 2]));
        assert_eq!(p.meet(1, 3), Meet::Element(1));
        assert_eq!(p.meet(1, 2), Meet::Element(BOTTOM));
        assert_eq!(p.minimal_upper_bounds(1, 2), vec![3, 4]);
        assert!(p.minimal_upper_bounds(3, 4).is_empty());

        let t = tetrahedron_boundary();
        let abc = t.elements().find(|&y| t.atom_set(y) == [0, 1, 2]).unwrap();
        let abd = t.elements().find(|&y| t.atom_set(y) == [0, 1, 3]).unwrap();
        let ab = t.elements().find(|&y| t.atom_set(y) == [0, 1]).unwrap();
        assert_eq!(t.meet(abc, abd), Meet::Element(ab));

        let tri = crate::generators::boundary_simplex(2);
        let (a, b) = (tri.atoms()[0], tri.atoms()[1]);
        let ab = tri.elements().find(|&y| tri.atom_set(y) == [0, 1]).unwrap();
        assert_eq!(tri.minimal_upper_bounds(a, b), vec![ab]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(2, 3), 0);
    }
}
