//! Facet frames, the localized index map and the facet-parity certificate.
//!
//! For a pure orientable pseudomanifold with parameters `theta_1..theta_d`,
//! each facet `y` contributes `sgn(y) iota_y(alpha) / (m(y) prod theta_i(y))`.
//! The sum is a polynomial in the thetas. Evaluated on `m_I prod_{i in I} x_i`
//! it returns the signed count of facets with atom set `I`, which is how the
//! parity of the facet count is read off.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{fmt_rational, rat, to_i64, LinearDenomFraction, LinearForm, Polynomial, Rational};
use crate::face_ring::{choose_lsop, FaceRing, FaceRingElement, FaceRingError, FacetRestriction, Lsop};
use crate::homology::{is_gorenstein_star, orient, permutation_sign, GorensteinReport, HomologyError, OrientationData};
use crate::poset::{AtomIndex, ElementId, SimplicialPoset};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("ridge {ridge}: frame ratio {value} is not +1 or -1")]
    NotPmOne { ridge: ElementId, value: String },
    #[error("index sum is not a polynomial: residual denominator {denominator}")]
    NotPolynomial { denominator: String },
    #[error("expected a homogeneous element of degree {expected}, got degrees {got:?}")]
    WrongDegree { expected: usize, got: Vec<usize> },
    #[error("class {atoms:?}: index {index} differs from signed facet count {sum}")]
    ClassMismatch {
        atoms: Vec<usize>,
        index: String,
        sum: i64,
    },
    #[error("parity theorem violated: h = {h:?}, {facets} facets, class sums {sums:?}")]
    TheoremViolation {
        h: Vec<i64>,
        facets: usize,
        sums: Vec<i64>,
    },
    #[error("poset is not a valid simplicial poset")]
    Invalid,
    #[error("poset is not Gorenstein*")]
    NotGorenstein(Box<GorensteinReport>),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Parameters(#[from] FaceRingError),
}

impl IndexError {
    /// True for failures that the theory says cannot happen on valid input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            IndexError::NotPmOne { .. }
                | IndexError::NotPolynomial { .. }
                | IndexError::ClassMismatch { .. }
                | IndexError::TheoremViolation { .. }
                | IndexError::Parameters(FaceRingError::RetryExhausted(_))
        )
    }
}

/// Per-facet data: ordered basis `theta_i(y)`, the positive scale `m(y)` and
/// the orientation sign.
#[derive(Debug, Clone)]
pub struct FacetFrame {
    pub facet: ElementId,
    /// Ordering of `A(y)` whose induced orientation of the theta-space is
    /// the standard one.
    pub order: Vec<AtomIndex>,
    pub m: Rational,
    pub sign: i64,
    restriction: FacetRestriction,
}

impl FacetFrame {
    pub fn atoms(&self) -> &[AtomIndex] {
        self.restriction.atoms()
    }

    pub fn theta(&self, i: AtomIndex) -> Option<&LinearForm> {
        self.restriction.theta_of_atom(i)
    }

    pub fn restriction(&self) -> &FacetRestriction {
        &self.restriction
    }

    /// `sgn(y) iota_y(alpha) / (m(y) prod theta_i(y))`.
    pub fn term(&self, alpha: &FaceRingElement) -> LinearDenomFraction {
        let image = self.restriction.apply(alpha);
        if image.is_zero() {
            return LinearDenomFraction::zero(image.nvars());
        }
        let scalar = rat(self.sign) / &self.m;
        let forms = self
            .atoms()
            .iter()
            .map(|&i| self.theta(i).expect("own atom").clone());
        LinearDenomFraction::new(scalar, image, forms)
    }
}

/// Frames for every facet, in increasing facet id.
#[derive(Debug, Clone)]
pub struct Frames {
    dim: usize,
    frames: Vec<FacetFrame>,
}

impl Frames {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FacetFrame> {
        self.frames.iter()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, y: ElementId) -> Option<&FacetFrame> {
        self.frames
            .binary_search_by_key(&y, |f| f.facet)
            .ok()
            .map(|k| &self.frames[k])
    }
}

/// Builds the frames. `m(y) = |det C_y|`, the absolute determinant relating
/// the facet basis to the global one. When the orientation's ordering of
/// `A(y)` induces the opposite orientation on the theta-space, the last two
/// atoms are swapped and the sign flipped, leaving `sgn(y) <y>` unchanged.
/// In dimension one there is nothing to swap and only the sign is flipped.
pub fn build_frames(
    poset: &SimplicialPoset,
    lsop: &Lsop,
    orientation: &OrientationData,
) -> Frames {
    let frames = poset
        .facets()
        .into_iter()
        .map(|y| {
            let det = lsop.facet_matrix(poset, y).det().expect("square");
            assert!(!det.is_zero(), "parameter system singular on facet {y}");
            let mut order = orientation.order[&y].clone();
            let mut sign = orientation.sign[&y];
            // rows theta_i(y) in `order` form a permuted C_y^{-1}
            let induced = permutation_sign(&order) * if det.is_negative() { -1 } else { 1 };
            if induced < 0 {
                let n = order.len();
                if n >= 2 {
                    order.swap(n - 2, n - 1);
                }
                sign = -sign;
            }
            FacetFrame {
                facet: y,
                order,
                m: det.abs(),
                sign,
                restriction: FacetRestriction::new(poset, lsop, y),
            }
        })
        .collect();
    Frames {
        dim: lsop.dim(),
        frames,
    }
}

/// Ridge data: the two facets and the atom each has outside the ridge.
pub fn ridge_pair(
    poset: &SimplicialPoset,
    z: ElementId,
) -> Option<((ElementId, AtomIndex), (ElementId, AtomIndex))> {
    let above = poset.facets_above(z);
    if above.len() != 2 {
        return None;
    }
    let outside = |y: ElementId| {
        *poset
            .atom_set(y)
            .iter()
            .find(|a| !poset.atom_set(z).contains(a))
            .expect("facet has one atom outside its ridge")
    };
    Some(((above[0], outside(above[0])), (above[1], outside(above[1]))))
}

/// `lambda(y, y')` with `m(y) theta_l(y) = lambda m(y') theta_l'(y')`.
pub fn lambda_of(
    poset: &SimplicialPoset,
    frames: &Frames,
    z: ElementId,
) -> Result<Rational, IndexError> {
    let ((y, l), (y2, l2)) = ridge_pair(poset, z).ok_or(IndexError::Homology(
        HomologyError::NotPseudomanifold {
            ridge: z,
            count: poset.facets_above(z).len(),
        },
    ))?;
    let (f, f2) = (frames.get(y).expect("frame"), frames.get(y2).expect("frame"));
    let lhs = f.theta(l).expect("own atom") * &f.m;
    let rhs = f2.theta(l2).expect("own atom") * &f2.m;
    match rhs.proportionality(&lhs) {
        Some(v) if v.abs().is_one() => Ok(v),
        Some(v) => Err(IndexError::NotPmOne {
            ridge: z,
            value: fmt_rational(&v),
        }),
        None => Err(IndexError::NotPmOne {
            ridge: z,
            value: "not proportional".into(),
        }),
    }
}

/// Whether `iota_y(alpha) - iota_y'(alpha)` is divisible by `theta_l(y)` for
/// the two facets over the ridge `z`.
pub fn restriction_congruence(
    poset: &SimplicialPoset,
    frames: &Frames,
    z: ElementId,
    alpha: &FaceRingElement,
) -> bool {
    let Some(((y, l), (y2, _))) = ridge_pair(poset, z) else {
        return false;
    };
    let f = frames.get(y).expect("frame");
    let diff = &f.restriction.apply(alpha) - &frames.get(y2).expect("frame").restriction.apply(alpha);
    matches!(diff.divide_exact(f.theta(l).expect("own atom")), Ok(Some(_)))
}

#[derive(Debug, Clone, Serialize)]
pub struct TermEntry {
    pub facet: ElementId,
    pub sign: i64,
    pub m: String,
    pub term: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub element: String,
    pub value: Polynomial,
    pub polynomial: bool,
    pub terms: Vec<TermEntry>,
}

type Part = (ElementId, Rational, Polynomial, Vec<LinearForm>);

/// Nonzero facet terms `(y, sgn(y)/m(y), iota_y(alpha), [theta_i(y)])`.
fn facet_parts(frames: &Frames, alpha: &FaceRingElement) -> Vec<Part> {
    frames
        .frames
        .par_iter()
        .filter_map(|f| {
            let image = f.restriction.apply(alpha);
            if image.is_zero() {
                return None;
            }
            let forms = f.atoms().iter().map(|&i| f.theta(i).expect("own atom").clone()).collect();
            Some((f.facet, rat(f.sign) / &f.m, image, forms))
        })
        .collect()
}

fn sum_parts(frames: &Frames, parts: &[Part]) -> Result<Polynomial, IndexError> {
    let total = LinearDenomFraction::sum_parts(
        frames.dim,
        parts.iter().map(|(_, s, p, forms)| (s.clone(), p.clone(), forms.clone())),
    );
    total.to_polynomial().ok_or_else(|| IndexError::NotPolynomial {
        denominator: total.to_string(),
    })
}

/// `ind_T(alpha)` without the per-facet ledger.
pub fn ind_t_value(frames: &Frames, alpha: &FaceRingElement) -> Result<Polynomial, IndexError> {
    sum_parts(frames, &facet_parts(frames, alpha))
}

/// Sums the facet terms. Facets where `alpha` restricts to zero are skipped
/// and do not appear in the ledger.
pub fn ind_t(frames: &Frames, alpha: &FaceRingElement) -> Result<IndexReport, IndexError> {
    let parts = facet_parts(frames, alpha);
    let value = sum_parts(frames, &parts)?;
    let terms = parts
        .into_iter()
        .map(|(y, s, p, forms)| {
            let f = frames.get(y).expect("frame");
            TermEntry {
                facet: y,
                sign: f.sign,
                m: fmt_rational(&f.m),
                term: LinearDenomFraction::new(s, p, forms).to_string(),
            }
        })
        .collect();
    Ok(IndexReport {
        element: alpha.to_string(),
        value,
        polynomial: true,
        terms,
    })
}

/// `ind` on a degree-`d` element: the constant `ind_T(alpha)`.
pub fn ind(frames: &Frames, alpha: &FaceRingElement) -> Result<Rational, IndexError> {
    let degrees = alpha.degrees();
    if !(degrees.is_empty() || degrees == [frames.dim]) {
        return Err(IndexError::WrongDegree {
            expected: frames.dim,
            got: degrees,
        });
    }
    Ok(ind_t_value(frames, alpha)?.constant_term())
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ClassSum {
    /// Atom labels, 1-based to match the `x` variables.
    pub atoms: Vec<usize>,
    pub sum: i64,
    pub size: usize,
}

/// `sum_{A(y) = I} sgn(y)` for each realized atom set `I`, keyed by `I`
/// (0-based atom indices).
pub fn facet_class_sums(frames: &Frames) -> BTreeMap<Vec<AtomIndex>, ClassSum> {
    let mut out: BTreeMap<Vec<AtomIndex>, ClassSum> = BTreeMap::new();
    for f in frames.iter() {
        let key = f.atoms().to_vec();
        let entry = out.entry(key.clone()).or_insert_with(|| ClassSum {
            atoms: key.iter().map(|a| a + 1).collect(),
            sum: 0,
            size: 0,
        });
        entry.sum += f.sign;
        entry.size += 1;
    }
    out
}

/// `m_I prod_{i in I} x_i`.
pub fn class_monomial(ring: &FaceRing<'_>, frames: &Frames, class: &[AtomIndex]) -> FaceRingElement {
    let m = frames
        .iter()
        .find(|f| f.atoms() == class)
        .map_or_else(Rational::zero, |f| f.m.clone());
    let xs: Vec<FaceRingElement> = class.iter().map(|&i| ring.atom(i)).collect();
    ring.product(&xs).scale(&m)
}

/// `sum_I m_I prod_{i in I} x_i` over realized classes.
pub fn omega_t(ring: &FaceRing<'_>, frames: &Frames) -> FaceRingElement {
    facet_class_sums(frames)
        .keys()
        .fold(FaceRingElement::zero(), |acc, class| {
            acc.add(&class_monomial(ring, frames, class))
        })
}

/// Compares `ind(m_I prod x_i)` with the signed facet count for each class.
pub fn cross_check_classes(
    ring: &FaceRing<'_>,
    frames: &Frames,
) -> Result<Vec<ClassSum>, IndexError> {
    let sums = facet_class_sums(frames);
    for (class, s) in &sums {
        let value = ind(frames, &class_monomial(ring, frames, class))?;
        if to_i64(&value) != Some(s.sum) {
            return Err(IndexError::ClassMismatch {
                atoms: s.atoms.clone(),
                index: fmt_rational(&value),
                sum: s.sum,
            });
        }
    }
    Ok(sums.into_values().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub h: Vec<i64>,
    pub facets: usize,
    pub classes: Vec<ClassSum>,
    pub even: bool,
    pub hypothesis_met: bool,
    pub polynomiality_checked: bool,
}

/// An interior vanishing entry `h_i = 0` with `1 <= i <= d - 1`.
pub fn has_interior_zero(h: &[i64]) -> bool {
    h.len() > 2 && h[1..h.len() - 1].contains(&0)
}

/// Parity certificate from prepared frames.
pub fn parity_from_frames(
    poset: &SimplicialPoset,
    frames: &Frames,
) -> Result<ParityReport, IndexError> {
    let ring = FaceRing::new(poset);
    let classes = cross_check_classes(&ring, frames)?;
    let omega = ind(frames, &omega_t(&ring, frames))?;
    let total: i64 = frames.iter().map(|f| f.sign).sum();
    if to_i64(&omega) != Some(total) {
        return Err(IndexError::ClassMismatch {
            atoms: Vec::new(),
            index: fmt_rational(&omega),
            sum: total,
        });
    }
    let h = poset.h_vector();
    let facets = frames.len();
    let even = facets.is_multiple_of(2);
    let hypothesis_met = has_interior_zero(&h);
    if hypothesis_met && (!even || classes.iter().any(|c| c.sum != 0)) {
        return Err(IndexError::TheoremViolation {
            h,
            facets,
            sums: classes.iter().map(|c| c.sum).collect(),
        });
    }
    Ok(ParityReport {
        h,
        facets,
        classes,
        even,
        hypothesis_met,
        polynomiality_checked: true,
    })
}

/// The whole pipeline: validate, certify Gorenstein*, orient, choose
/// parameters from `seed`, build frames and certify the class sums.
pub fn verify_parity(poset: &SimplicialPoset, seed: u64) -> Result<ParityReport, IndexError> {
    if !poset.validate().pass {
        return Err(IndexError::Invalid);
    }
    let report = is_gorenstein_star(poset)?;
    if !report.pass {
        return Err(IndexError::NotGorenstein(Box::new(report)));
    }
    let orientation = orient(poset)?;
    let lsop = choose_lsop(poset, seed)?;
    let frames = build_frames(poset, &lsop, &orientation);
    parity_from_frames(poset, &frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Matrix;
    use crate::generators::{boundary_simplex, doubled_sphere};

    fn digon_frames(p: &SimplicialPoset) -> Frames {
        let lsop = Lsop::new(p, Matrix::identity(2)).unwrap();
        build_frames(p, &lsop, &orient(p).unwrap())
    }

    #[test]
    fn digon_frames_are_trivial() {
        let p = doubled_sphere(2);
        let frames = digon_frames(&p);
        for f in frames.iter() {
            assert_eq!(f.m, rat(1));
            assert_eq!(f.theta(0).unwrap(), &LinearForm::var(2, 0));
            assert_eq!(f.theta(1).unwrap(), &LinearForm::var(2, 1));
        }
        assert_eq!(frames.get(3).unwrap().sign * frames.get(4).unwrap().sign, -1);
        // ridge a = element 1; the outside atom is b on both sides
        assert_eq!(lambda_of(&p, &frames, 1).unwrap(), rat(1));
    }

    #[test]
    fn digon_index_values() {
        let p = doubled_sphere(2);
        let r = FaceRing::new(&p);
        let frames = digon_frames(&p);
        let one = ind_t(&frames, &FaceRingElement::one()).unwrap();
        assert!(one.value.is_zero());
        assert_eq!(one.terms.len(), 2);
        let ab = r.mul(&r.atom(0), &r.atom(1));
        assert_eq!(ind(&frames, &ab).unwrap(), rat(0));
        assert!(matches!(
            ind(&frames, &r.atom(0)),
            Err(IndexError::WrongDegree { expected: 2, .. })
        ));
    }

    #[test]
    fn tetrahedron_classes_are_singletons() {
        let p = boundary_simplex(3);
        let rows = vec![vec![1, 0, 0, -1], vec![0, 1, 0, -1], vec![0, 0, 1, -1]];
        let lsop = Lsop::from_i64(&p, &rows).unwrap();
        let frames = build_frames(&p, &lsop, &orient(&p).unwrap());
        for f in frames.iter() {
            assert_eq!(f.m, rat(1));
        }
        let r = FaceRing::new(&p);
        let classes = cross_check_classes(&r, &frames).unwrap();
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.size == 1 && c.sum.abs() == 1));
        let omega = ind(&frames, &omega_t(&r, &frames)).unwrap();
        assert_eq!(to_i64(&omega).unwrap().rem_euclid(2), 0);
    }

    #[test]
    fn parity_reports() {
        let r = verify_parity(&doubled_sphere(3), 0).unwrap();
        assert_eq!(r.h, vec![1, 0, 0, 1]);
        assert!(r.even && r.hypothesis_met);
        assert_eq!(r.classes, vec![ClassSum { atoms: vec![1, 2, 3], sum: 0, size: 2 }]);
        let r = verify_parity(&boundary_simplex(3), 0).unwrap();
        assert!(!r.hypothesis_met);
        assert_eq!(r.facets, 4);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"h\":[1,1,1,1],\"facets\":4,\"classes\":["));
    }

    #[test]
    fn non_gorenstein_input_is_refused() {
        let err = verify_parity(&crate::generators::rp2(), 0).unwrap_err();
        assert!(matches!(err, IndexError::NotGorenstein(_)));
        assert!(!err.is_internal());
    }

    #[test]
    fn interior_zero_detection() {
        assert!(has_interior_zero(&[1, 0, 1]));
        assert!(!has_interior_zero(&[1, 1, 1, 1]));
        assert!(!has_interior_zero(&[1, 1]));
        assert!(has_interior_zero(&[1, 2, 0, 2, 1]));
    }
}
