//! Order complexes, rational homology, the Gorenstein* test, and orientations
//! of pseudomanifolds.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{rat, RowReducer, SparseRow};
use crate::poset::{AtomIndex, ElementId, SimplicialPoset, BOTTOM};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("poset is not pure: maximal element {0} has rank below the poset rank")]
    NotPure(ElementId),
    #[error("ridge {ridge} lies below {count} facets, expected exactly two")]
    NotPseudomanifold { ridge: ElementId, count: usize },
    #[error("non-orientable: sign propagation contradicts itself across ridge {ridge} (facets {facets:?})")]
    NonOrientable { ridge: ElementId, facets: [ElementId; 2] },
}

/// A finite simplicial complex. Faces are sorted lists of local vertex
/// indices, grouped by dimension; `faces[k]` holds the `k`-dimensional faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    faces: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// The complex with no vertices (only the empty face).
    pub fn void() -> Self {
        SimplicialComplex {
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    /// Closes the given faces under taking subsets. `vertices` are labels for
    /// the local indices used in `faces`.
    pub fn from_faces(vertices: Vec<usize>, faces: &[Vec<usize>]) -> Self {
        let mut all: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
        for f in faces {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                all.insert((0..k).filter(|&i| mask & (1 << i) != 0).map(|i| f[i]).collect());
            }
        }
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for f in all {
            let k = f.len() - 1;
            if by_dim.len() <= k {
                by_dim.resize(k + 1, Vec::new());
            }
            by_dim[k].push(f);
        }
        SimplicialComplex {
            vertices,
            faces: by_dim,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Dimension; `-1` for the void complex.
    pub fn dim(&self) -> isize {
        self.faces.len() as isize - 1
    }

    pub fn faces(&self, k: usize) -> &[Vec<usize>] {
        self.faces.get(k).map_or(&[], Vec::as_slice)
    }

    /// Face counts `(f_0, ..., f_dim)`.
    pub fn face_counts(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.faces
            .iter()
            .enumerate()
            .map(|(k, f)| if k % 2 == 0 { f.len() as i64 } else { -(f.len() as i64) })
            .sum()
    }

    /// Sparse boundary matrix of `d_k : C_k -> C_{k-1}` as `(row, col, value)`
    /// triplets, rows indexed by `k`-faces. For `k = 0` this is the
    /// augmentation onto the empty face (a single column).
    pub fn boundary_triplets(&self, k: usize) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        if k == 0 {
            for i in 0..self.faces(0).len() {
                out.push((i, 0, 1));
            }
            return out;
        }
        let index: HashMap<&[usize], usize> = self
            .faces(k - 1)
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_slice(), i))
            .collect();
        let mut sub = Vec::with_capacity(k);
        for (i, f) in self.faces(k).iter().enumerate() {
            for skip in 0..f.len() {
                sub.clear();
                sub.extend(f.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                out.push((i, index[sub.as_slice()], sign));
            }
        }
        out
    }

    /// Plain-text export: faces by dimension, then each boundary matrix as
    /// `row col value` triplets.
    pub fn export_triplets(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vertices {}", self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "v {i} {v}");
        }
        for (k, fs) in self.faces.iter().enumerate() {
            let _ = writeln!(out, "# faces dim {k} count {}", fs.len());
            for f in fs {
                let verts: Vec<String> = f.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "f {k} {}", verts.join(" "));
            }
        }
        for k in 0..self.faces.len() {
            let t = self.boundary_triplets(k);
            let cols = if k == 0 { 1 } else { self.faces[k - 1].len() };
            let _ = writeln!(
                out,
                "# boundary {k} rows {} cols {cols} nnz {}",
                self.faces[k].len(),
                t.len()
            );
            for (r, c, v) in t {
                let _ = writeln!(out, "{r} {c} {v}");
            }
        }
        out
    }
}

/// Reduced Betti numbers over the rationals, `beta[q + 1]` for `q >= -1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedBetti(pub Vec<usize>);

impl ReducedBetti {
    pub fn get(&self, q: isize) -> usize {
        usize::try_from(q + 1)
            .ok()
            .and_then(|i| self.0.get(i).copied())
            .unwrap_or(0)
    }

    /// `(beta_0, ..., beta_dim)`.
    pub fn by_dimension(&self) -> &[usize] {
        &self.0[1..]
    }

    /// Homology of a sphere of dimension `dim` (`dim = -1` is the empty sphere).
    pub fn is_sphere(&self, dim: isize) -> bool {
        (-1..=self.0.len() as isize).all(|q| self.get(q) == usize::from(q == dim))
    }
}

/// Reduced rational homology from exact boundary-matrix ranks.
///
/// Boundary maps are reduced from the top dimension down. A reduced
/// boundary with leading face `i` is a cycle, so the row of `i` in the next
/// map down depends on rows of larger index and is skipped ("clearing").
pub fn reduced_betti(complex: &SimplicialComplex) -> ReducedBetti {
    let top = complex.faces.len();
    // ranks[k] = rank of d_k for k = 0..top, with d_0 the augmentation
    let mut ranks = vec![0usize; top + 1];
    let mut cleared: HashSet<usize> = HashSet::new();
    for k in (0..top).rev() {
        let mut rows: Vec<SparseRow> = vec![SparseRow::new(); complex.faces[k].len()];
        for (r, c, v) in complex.boundary_triplets(k) {
            rows[r].insert(c, rat(v));
        }
        let mut reducer = RowReducer::new();
        for (r, row) in rows.into_iter().enumerate() {
            if !cleared.contains(&r) {
                reducer.insert(row);
            }
        }
        ranks[k] = reducer.rank();
        cleared = reducer.pivot_columns().collect();
    }
    let mut betti = Vec::with_capacity(top + 1);
    // q = -1: C_{-1} = Q
    betti.push(1 - ranks[0]);
    for k in 0..top {
        let n = complex.faces[k].len();
        betti.push(n - ranks[k] - ranks[k + 1]);
    }
    ReducedBetti(betti)
}

/// Chains of the subposet `members` (sorted by rank), as lists of positions
/// into `members`. Includes every nonempty chain.
fn chains_of(poset: &SimplicialPoset, members: &[ElementId]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn grow(
        poset: &SimplicialPoset,
        members: &[ElementId],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let start = stack.last().map_or(0, |&i| i + 1);
        for j in start..members.len() {
            if let Some(&i) = stack.last() {
                if !poset.lt(members[i], members[j]) {
                    continue;
                }
            }
            stack.push(j);
            out.push(stack.clone());
            grow(poset, members, stack, out);
            stack.pop();
        }
    }
    grow(poset, members, &mut stack, &mut out);
    out
}

fn sorted_by_rank(poset: &SimplicialPoset, mut members: Vec<ElementId>) -> Vec<ElementId> {
    members.sort_by_key(|&y| (poset.rank_of(y), y));
    members
}

/// Order complex of the subposet `members`. Vertices are ordered by
/// (rank, id), so each chain is an increasing list of local indices.
pub fn order_complex_of(poset: &SimplicialPoset, members: Vec<ElementId>) -> SimplicialComplex {
    let members = sorted_by_rank(poset, members);
    let chains = chains_of(poset, &members);
    let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
    for c in chains {
        let k = c.len() - 1;
        if by_dim.len() <= k {
            by_dim.resize(k + 1, Vec::new());
        }
        by_dim[k].push(c);
    }
    for fs in &mut by_dim {
        fs.sort();
    }
    SimplicialComplex {
        vertices: members,
        faces: by_dim,
    }
}

/// `Delta(P - {0})`: the simplicial complex of chains of the proper part.
pub fn order_complex(poset: &SimplicialPoset) -> SimplicialComplex {
    order_complex_of(poset, poset.elements().filter(|&y| y != BOTTOM).collect())
}

/// All chains of `P - {0}`, including the empty chain, as element ids in
/// increasing order. Enumeration order is deterministic.
pub fn all_chains(poset: &SimplicialPoset) -> Vec<Vec<ElementId>> {
    let members = sorted_by_rank(poset, poset.elements().filter(|&y| y != BOTTOM).collect());
    let mut out = vec![Vec::new()];
    out.extend(
        chains_of(poset, &members)
            .into_iter()
            .map(|c| c.into_iter().map(|i| members[i]).collect()),
    );
    out
}

/// The link of a chain `sigma` in the order complex: the order complex of
/// the elements outside `sigma` comparable with all of it.
pub fn link_of_chain(poset: &SimplicialPoset, sigma: &[ElementId]) -> SimplicialComplex {
    let members: Vec<ElementId> = poset
        .elements()
        .filter(|&w| w != BOTTOM && !sigma.contains(&w))
        .filter(|&w| sigma.iter().all(|&s| poset.comparable(s, w)))
        .collect();
    if members.is_empty() {
        return SimplicialComplex::void();
    }
    order_complex_of(poset, members)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LinkFailure {
    /// The failing face of the order complex, as a chain of element ids.
    pub face: Vec<ElementId>,
    pub expected_dim: isize,
    pub link_dim: isize,
    /// Reduced Betti numbers of the link, from `q = -1` upwards.
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GorensteinReport {
    pub rank: usize,
    pub pass: bool,
    pub faces_checked: usize,
    /// Reduced Betti numbers of the whole order complex, from `q = -1`.
    pub betti: Vec<usize>,
    pub failure: Option<LinkFailure>,
}

fn ensure_pure(poset: &SimplicialPoset) -> Result<(), HomologyError> {
    let d = poset.rank();
    match poset
        .maximal_elements()
        .into_iter()
        .find(|&y| poset.rank_of(y) != d)
    {
        Some(y) => Err(HomologyError::NotPure(y)),
        None => Ok(()),
    }
}

/// Gorenstein* over the rationals: the link of every face of the order
/// complex (including the empty face) has the rational homology of a sphere
/// of dimension `d - 1 - |face|`.
pub fn is_gorenstein_star(poset: &SimplicialPoset) -> Result<GorensteinReport, HomologyError> {
    ensure_pure(poset)?;
    let d = poset.rank() as isize;
    let chains = all_chains(poset);
    let check = |sigma: &Vec<ElementId>| -> Option<LinkFailure> {
        let link = link_of_chain(poset, sigma);
        let expected = d - 1 - sigma.len() as isize;
        let betti = reduced_betti(&link);
        (link.dim() != expected || !betti.is_sphere(expected)).then(|| LinkFailure {
            face: sigma.clone(),
            expected_dim: expected,
            link_dim: link.dim(),
            betti: betti.0,
        })
    };
    let failure = chains.par_iter().find_map_first(check);
    Ok(GorensteinReport {
        rank: poset.rank(),
        pass: failure.is_none(),
        faces_checked: chains.len(),
        betti: reduced_betti(&order_complex(poset)).0,
        failure,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RidgeViolation {
    pub ridge: ElementId,
    pub facets: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RidgeReport {
    pub pass: bool,
    pub ridges: usize,
    pub violations: Vec<RidgeViolation>,
}

/// Every ridge lies below exactly two facets.
pub fn check_two_facets_per_ridge(poset: &SimplicialPoset) -> Result<RidgeReport, HomologyError> {
    ensure_pure(poset)?;
    let ridges = poset.ridges();
    let violations: Vec<RidgeViolation> = ridges
        .iter()
        .map(|&z| RidgeViolation {
            ridge: z,
            facets: poset.facets_above(z).len(),
        })
        .filter(|v| v.facets != 2)
        .collect();
    Ok(RidgeReport {
        pass: violations.is_empty(),
        ridges: ridges.len(),
        violations,
    })
}

/// Coefficient of the ridge cell `[z]` in the boundary of the oriented
/// simplex on `order` (an ordering of `A(y)` for a facet `y` above `z`),
/// measured against `[z]` oriented by increasing atom index.
pub fn incidence(poset: &SimplicialPoset, order: &[AtomIndex], z: ElementId) -> i64 {
    let a_z = poset.atom_set(z);
    let pos = order
        .iter()
        .position(|a| !a_z.contains(a))
        .expect("z is a ridge below the facet");
    let rest: Vec<AtomIndex> = order.iter().copied().filter(|&a| a != order[pos]).collect();
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    sign * permutation_sign(&rest)
}

/// Sign of the permutation that sorts `seq` (distinct entries).
pub fn permutation_sign(seq: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Per-facet atom orderings and signs making `sum sgn(y) <y>` a cycle.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct OrientationData {
    pub order: BTreeMap<ElementId, Vec<AtomIndex>>,
    pub sign: BTreeMap<ElementId, i64>,
    pub components: usize,
}

impl OrientationData {
    pub fn flipped(&self) -> OrientationData {
        OrientationData {
            order: self.order.clone(),
            sign: self.sign.iter().map(|(&y, &s)| (y, -s)).collect(),
            components: self.components,
        }
    }
}

/// Boundary of `sum sgn(y) <y>`: nonzero ridge coefficients only.
pub fn fundamental_chain_boundary(
    poset: &SimplicialPoset,
    orientation: &OrientationData,
) -> BTreeMap<ElementId, i64> {
    let mut out = BTreeMap::new();
    for z in poset.ridges() {
        let total: i64 = poset
            .facets_above(z)
            .iter()
            .map(|y| orientation.sign[y] * incidence(poset, &orientation.order[y], z))
            .sum();
        if total != 0 {
            out.insert(z, total);
        }
    }
    out
}

/// Orients a pseudomanifold by propagating signs along a spanning forest of
/// the facet-ridge graph, rooted at the lowest-id facet of each component
/// with sign `+1`, then checks every ridge.
pub fn orient(poset: &SimplicialPoset) -> Result<OrientationData, HomologyError> {
    let ridge_report = check_two_facets_per_ridge(poset)?;
    if let Some(v) = ridge_report.violations.first() {
        return Err(HomologyError::NotPseudomanifold {
            ridge: v.ridge,
            count: v.facets,
        });
    }
    let facets = poset.facets();
    let order: BTreeMap<ElementId, Vec<AtomIndex>> = facets
        .iter()
        .map(|&y| (y, poset.atom_set(y).to_vec()))
        .collect();

    // facet -> [(ridge, neighbour)]
    let mut adjacency: BTreeMap<ElementId, Vec<(ElementId, ElementId)>> =
        facets.iter().map(|&y| (y, Vec::new())).collect();
    for z in poset.ridges() {
        let pair = poset.facets_above(z);
        let (a, b) = (pair[0], pair[1]);
        adjacency.get_mut(&a).unwrap().push((z, b));
        adjacency.get_mut(&b).unwrap().push((z, a));
    }

    let mut sign: BTreeMap<ElementId, i64> = BTreeMap::new();
    let mut components = 0;
    for &root in &facets {
        if sign.contains_key(&root) {
            continue;
        }
        components += 1;
        sign.insert(root, 1);
        let mut queue = VecDeque::from([root]);
        while let Some(y) = queue.pop_front() {
            for &(z, other) in &adjacency[&y] {
                // sgn(y) e(y,z) + sgn(other) e(other,z) = 0
                let want = -sign[&y] * incidence(poset, &order[&y], z)
                    * incidence(poset, &order[&other], z);
                match sign.get(&other) {
                    None => {
                        sign.insert(other, want);
                        queue.push_back(other);
                    }
                    Some(&s) if s != want => {
                        let mut facets = [y, other];
                        facets.sort_unstable();
                        return Err(HomologyError::NonOrientable { ridge: z, facets });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let data = OrientationData {
        order,
        sign,
        components,
    };
    debug_assert!(fundamental_chain_boundary(poset, &data).is_empty());
    if let Some((&z, _)) = fundamental_chain_boundary(poset, &data).iter().next() {
        let pair = poset.facets_above(z);
        return Err(HomologyError::NonOrientable {
            ridge: z,
            facets: [pair[0], pair[1]],
        });
    }
    Ok(data)
}
