//! Deterministic constructors for the example posets and a few combinators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poset::{ElementId, SimplicialPoset, BOTTOM};

/// Largest parameter accepted by [`GeneratorSpec`].
pub const MAX_PARAM: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("unknown generator '{0}'")]
    UnknownKind(String),
    #[error("generator '{kind}' needs 1 <= d <= {max}, got {d}", max = MAX_PARAM)]
    OutOfRange { kind: String, d: usize },
    #[error("malformed generator spec '{0}'")]
    Malformed(String),
}

/// Textual description of a generated poset, e.g. `doubled-sphere:3` or
/// `join(doubled-sphere:2,boundary-simplex:1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    BoundarySimplex(usize),
    DoubledSphere(usize),
    CrossPolytope(usize),
    Rp2,
    Join(Box<GeneratorSpec>, Box<GeneratorSpec>),
    FromComplex(Vec<Vec<usize>>),
}

impl GeneratorSpec {
    pub fn build(&self) -> SimplicialPoset {
        let p = match self {
            GeneratorSpec::BoundarySimplex(d) => boundary_simplex(*d),
            GeneratorSpec::DoubledSphere(d) => doubled_sphere(*d),
            GeneratorSpec::CrossPolytope(d) => cross_polytope(*d),
            GeneratorSpec::Rp2 => rp2(),
            GeneratorSpec::Join(a, b) => join(&a.build(), &b.build()),
            GeneratorSpec::FromComplex(facets) => from_complex("complex", facets),
        };
        p.with_name(self.to_string())
    }

    /// Builds a spec from a kind name and a dimension parameter.
    pub fn from_kind(kind: &str, d: Option<usize>) -> Result<Self, GeneratorError> {
        let need = |d: Option<usize>| -> Result<usize, GeneratorError> {
            match d {
                Some(d) if (1..=MAX_PARAM).contains(&d) => Ok(d),
                Some(d) => Err(GeneratorError::OutOfRange {
                    kind: kind.to_string(),
                    d,
                }),
                None => Err(GeneratorError::Malformed(format!("{kind} needs a dimension"))),
            }
        };
        match kind {
            "boundary-simplex" | "boundary_simplex" => Ok(Self::BoundarySimplex(need(d)?)),
            "doubled-sphere" | "doubled_sphere" => Ok(Self::DoubledSphere(need(d)?)),
            "cross-polytope" | "cross_polytope" => Ok(Self::CrossPolytope(need(d)?)),
            "rp2" => Ok(Self::Rp2),
            other => Err(GeneratorError::UnknownKind(other.to_string())),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::BoundarySimplex(d) => write!(f, "boundary-simplex:{d}"),
            GeneratorSpec::DoubledSphere(d) => write!(f, "doubled-sphere:{d}"),
            GeneratorSpec::CrossPolytope(d) => write!(f, "cross-polytope:{d}"),
            GeneratorSpec::Rp2 => write!(f, "rp2"),
            GeneratorSpec::Join(a, b) => write!(f, "join({a},{b})"),
            GeneratorSpec::FromComplex(facets) => {
                let parts: Vec<String> = facets
                    .iter()
                    .map(|s| s.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
                    .collect();
                write!(f, "complex:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("join(").and_then(|r| r.strip_suffix(')')) {
            // split at the top-level comma
            let mut depth = 0i32;
            let mut split = None;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(|| GeneratorError::Malformed(s.to_string()))?;
            let a = inner[..i].parse()?;
            let b = inner[i + 1..].parse()?;
            return Ok(GeneratorSpec::Join(Box::new(a), Box::new(b)));
        }
        if let Some(body) = s.strip_prefix("complex:") {
            let facets = body
                .split(',')
                .map(|f| {
                    f.split('-')
                        .map(|v| v.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| GeneratorError::Malformed(s.to_string()))?;
            return Ok(GeneratorSpec::FromComplex(facets));
        }
        match s.split_once(':') {
            Some((kind, d)) => {
                let d = d
                    .trim()
                    .parse()
                    .map_err(|_| GeneratorError::Malformed(s.to_string()))?;
                GeneratorSpec::from_kind(kind.trim(), Some(d))
            }
            None => GeneratorSpec::from_kind(s, None),
        }
    }
}

/// Face poset of the simplicial complex generated by `facets` (vertex labels
/// are arbitrary integers). Elements are numbered by (size, lexicographic).
pub fn from_complex(name: &str, facets: &[Vec<usize>]) -> SimplicialPoset {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        f.dedup();
        let k = f.len();
        for mask in 0u64..(1u64 << k) {
            let sub: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| f[i]).collect();
            faces.insert(sub);
        }
    }
    if faces.is_empty() {
        faces.insert(Vec::new());
    }
    from_face_sets(name, faces.into_iter().collect())
}

/// Builds the poset of the given subset-closed family ordered by inclusion.
fn from_face_sets(name: &str, mut faces: Vec<Vec<usize>>) -> SimplicialPoset {
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: BTreeMap<&[usize], ElementId> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_slice(), i))
        .collect();
    let ranks = faces.iter().map(Vec::len).collect();
    let covers = faces
        .iter()
        .map(|f| {
            (0..f.len())
                .map(|skip| {
                    let sub: Vec<usize> = f
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index[sub.as_slice()]
                })
                .collect()
        })
        .collect();
    SimplicialPoset::from_covers(name, ranks, covers).expect("face family is a valid poset")
}

/// Face poset of the boundary of the `d`-simplex (`d + 1` atoms, rank `d`).
pub fn boundary_simplex(d: usize) -> SimplicialPoset {
    assert!(d >= 1);
    let facets: Vec<Vec<usize>> = (0..=d)
        .map(|skip| (0..=d).filter(|&v| v != skip).collect())
        .collect();
    from_complex(&format!("boundary-simplex:{d}"), &facets)
}

/// Two `(d-1)`-simplices glued along their boundaries by the identity.
/// For `d >= 2` this is not the face poset of a simplicial complex.
pub fn doubled_sphere(d: usize) -> SimplicialPoset {
    assert!(d >= 1);
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for mask in 0u64..(1u64 << d) - 1 {
        faces.push((0..d).filter(|&i| mask & (1 << i) != 0).collect());
    }
    faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: BTreeMap<&[usize], ElementId> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_slice(), i))
        .collect();
    let mut ranks: Vec<usize> = faces.iter().map(Vec::len).collect();
    let mut covers: Vec<Vec<ElementId>> = faces
        .iter()
        .map(|f| {
            (0..f.len())
                .map(|skip| {
                    let sub: Vec<usize> = f
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index[sub.as_slice()]
                })
                .collect()
        })
        .collect();
    let ridges: Vec<ElementId> = faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.len() + 1 == d)
        .map(|(i, _)| i)
        .collect();
    for _ in 0..2 {
        ranks.push(d);
        covers.push(ridges.clone());
    }
    SimplicialPoset::from_covers(format!("doubled-sphere:{d}"), ranks, covers)
        .expect("doubled sphere is a valid poset")
}

/// Face poset of the boundary of the `d`-dimensional cross-polytope. Vertex
/// `2i` is `+e_i` and `2i + 1` is `-e_i`.
pub fn cross_polytope(d: usize) -> SimplicialPoset {
    assert!(d >= 1);
    let facets: Vec<Vec<usize>> = (0u64..(1u64 << d))
        .map(|signs| {
            (0..d)
                .map(|i| 2 * i + ((signs >> i) & 1) as usize)
                .collect()
        })
        .collect();
    from_complex(&format!("cross-polytope:{d}"), &facets)
}

/// Minimal 6-vertex triangulation of the real projective plane.
pub fn rp2() -> SimplicialPoset {
    let facets = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 2, 6],
        [2, 3, 5],
        [3, 4, 6],
        [2, 4, 5],
        [3, 5, 6],
        [2, 4, 6],
    ];
    let facets: Vec<Vec<usize>> = facets.iter().map(|f| f.to_vec()).collect();
    from_complex("rp2", &facets)
}

/// Join of two posets: pairs `(p, q)` ordered componentwise.
pub fn join(p: &SimplicialPoset, q: &SimplicialPoset) -> SimplicialPoset {
    let mut pairs: Vec<(ElementId, ElementId)> = p
        .elements()
        .flat_map(|a| q.elements().map(move |b| (a, b)))
        .collect();
    pairs.sort_by_key(|&(a, b)| (p.rank_of(a) + q.rank_of(b), a, b));
    debug_assert_eq!(pairs[0], (BOTTOM, BOTTOM));
    let index: BTreeMap<(ElementId, ElementId), ElementId> =
        pairs.iter().enumerate().map(|(i, &pq)| (pq, i)).collect();
    let ranks = pairs
        .iter()
        .map(|&(a, b)| p.rank_of(a) + q.rank_of(b))
        .collect();
    let covers = pairs
        .iter()
        .map(|&(a, b)| {
            let mut c: Vec<ElementId> = p
                .lower_covers(a)
                .iter()
                .map(|&a2| index[&(a2, b)])
                .chain(q.lower_covers(b).iter().map(|&b2| index[&(a, b2)]))
                .collect();
            c.sort_unstable();
            c
        })
        .collect();
    SimplicialPoset::from_covers(format!("join({},{})", p.name(), q.name()), ranks, covers)
        .expect("join of posets is a poset")
}

/// The one-element poset (the unit for [`join`]).
pub fn point() -> SimplicialPoset {
    SimplicialPoset::from_covers("point", vec![0], vec![vec![]]).expect("point poset")
}

/// Decides poset isomorphism by backtracking over rank-preserving
/// bijections that respect lower covers.
pub fn is_isomorphic(p: &SimplicialPoset, q: &SimplicialPoset) -> bool {
    if p.len() != q.len() || p.rank() != q.rank() {
        return false;
    }
    let profile = |s: &SimplicialPoset, y: ElementId| {
        (s.rank_of(y), s.lower_covers(y).len(), s.upper_covers(y).len())
    };
    let mut pp: Vec<_> = p.elements().map(|y| profile(p, y)).collect();
    let mut qp: Vec<_> = q.elements().map(|y| profile(q, y)).collect();
    pp.sort_unstable();
    qp.sort_unstable();
    if pp != qp {
        return false;
    }
    let mut order: Vec<ElementId> = p.elements().collect();
    order.sort_by_key(|&y| (p.rank_of(y), y));
    let mut map = vec![usize::MAX; p.len()];
    let mut used = vec![false; q.len()];

    fn extend(
        p: &SimplicialPoset,
        q: &SimplicialPoset,
        order: &[ElementId],
        pos: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&y) = order.get(pos) else { return true };
        let mut image: Vec<ElementId> = p.lower_covers(y).iter().map(|&c| map[c]).collect();
        image.sort_unstable();
        for cand in q.elements() {
            if used[cand]
                || q.rank_of(cand) != p.rank_of(y)
                || q.upper_covers(cand).len() != p.upper_covers(y).len()
                || q.lower_covers(cand) != image.as_slice()
            {
                continue;
            }
            map[y] = cand;
            used[cand] = true;
            if extend(p, q, order, pos + 1, map, used) {
                return true;
            }
            used[cand] = false;
            map[y] = usize::MAX;
        }
        false
    }
    extend(p, q, &order, 0, &mut map, &mut used)
}

/// A named corpus member with its expected Gorenstein* status.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub spec: GeneratorSpec,
    pub poset: SimplicialPoset,
    pub gorenstein: bool,
}

fn entry(spec: &str, gorenstein: bool) -> CorpusEntry {
    let spec: GeneratorSpec = spec.parse().expect("corpus spec parses");
    CorpusEntry {
        poset: spec.build(),
        spec,
        gorenstein,
    }
}

/// Built-in corpus: spheres of several kinds plus joins.
pub fn corpus() -> Vec<CorpusEntry> {
    [
        "boundary-simplex:1",
        "boundary-simplex:2",
        "boundary-simplex:3",
        "boundary-simplex:4",
        "doubled-sphere:2",
        "doubled-sphere:3",
        "doubled-sphere:4",
        "cross-polytope:2",
        "cross-polytope:3",
        "join(doubled-sphere:2,boundary-simplex:1)",
        "join(doubled-sphere:2,doubled-sphere:2)",
        "join(doubled-sphere:3,boundary-simplex:1)",
        "join(doubled-sphere:2,boundary-simplex:2)",
    ]
    .iter()
    .map(|s| entry(s, true))
    .collect()
}

/// Joins with a vanishing interior h-entry, for checking facet-count parity.
pub fn parity_corpus() -> Vec<CorpusEntry> {
    [
        "doubled-sphere:2",
        "doubled-sphere:3",
        "doubled-sphere:4",
        "join(doubled-sphere:2,doubled-sphere:2)",
        "join(doubled-sphere:3,boundary-simplex:1)",
        "join(doubled-sphere:2,doubled-sphere:3)",
        "join(doubled-sphere:4,boundary-simplex:1)",
        "join(doubled-sphere:3,doubled-sphere:3)",
        "join(doubled-sphere:2,doubled-sphere:4)",
    ]
    .iter()
    .map(|s| entry(s, true))
    .collect()
}

/// Posets that are valid but not Gorenstein*.
pub fn negative_corpus() -> Vec<CorpusEntry> {
    [
        "rp2",
        "complex:0-1-2",
        "complex:0-1-2,0-1-3,0-1-4",
    ]
    .iter()
    .map(|s| entry(s, false))
    .collect()
}
