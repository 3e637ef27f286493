use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FaceRing, FaceRingElement, FaceRingError};
use crate::algebra::{fmt_rational, rat, LinearForm, Matrix, Rational};
use crate::poset::{ElementId, SimplicialPoset};

/// Sampled coefficients are uniform in `-COEFF_RANGE..=COEFF_RANGE`.
pub const COEFF_RANGE: i64 = 9;
/// Number of candidates tried before giving up.
pub const RETRY_CAP: usize = 1000;

/// `d` linear forms in the atom variables, stored as a `d x n` matrix whose
/// restriction to every facet's atoms is invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lsop {
    coeffs: Matrix,
    seed: Option<u64>,
    attempts: usize,
}

#[derive(Serialize, Debug, Clone)]
pub struct FacetDeterminant {
    pub facet: ElementId,
    pub atoms: Vec<usize>,
    pub det: String,
}

#[derive(Serialize, Debug, Clone)]
pub struct LsopReport {
    pub seed: Option<u64>,
    pub attempts: usize,
    pub forms: Vec<String>,
    pub determinants: Vec<FacetDeterminant>,
    /// Facet-submatrix criterion: every `C_y` is nonsingular.
    pub criterion: bool,
    /// `dim (A/(Theta))_i` per degree, when the cross-check was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i64>>,
}

fn check_shape(poset: &SimplicialPoset) -> Result<usize, FaceRingError> {
    let d = poset.rank();
    if d == 0 {
        return Err(FaceRingError::RankZero);
    }
    if !poset.is_pure() {
        return Err(FaceRingError::NotPure);
    }
    Ok(d)
}

impl Lsop {
    /// Accepts the matrix if every facet submatrix is nonsingular.
    pub fn new(poset: &SimplicialPoset, coeffs: Matrix) -> Result<Self, FaceRingError> {
        let d = check_shape(poset)?;
        if coeffs.rows() != d || coeffs.cols() != poset.num_atoms() {
            return Err(FaceRingError::Shape {
                rows: d,
                cols: poset.num_atoms(),
            });
        }
        let lsop = Lsop {
            coeffs,
            seed: None,
            attempts: 1,
        };
        if let Some(facet) = lsop.first_singular_facet(poset) {
            return Err(FaceRingError::SingularFacet { facet });
        }
        Ok(lsop)
    }

    pub fn from_i64(poset: &SimplicialPoset, rows: &[Vec<i64>]) -> Result<Self, FaceRingError> {
        Self::new(poset, Matrix::from_i64(rows))
    }

    fn first_singular_facet(&self, poset: &SimplicialPoset) -> Option<ElementId> {
        poset
            .facets()
            .into_iter()
            .find(|&y| self.facet_matrix(poset, y).det().map_or(true, |v| v.is_zero()))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    /// `C_y`: the columns of the facet's atoms, in increasing atom order.
    pub fn facet_matrix(&self, poset: &SimplicialPoset, y: ElementId) -> Matrix {
        self.coeffs.select_columns(poset.atom_set(y))
    }

    /// `theta_j` as a linear form in the atom variables.
    pub fn form(&self, j: usize) -> LinearForm {
        LinearForm::new(self.coeffs.row(j).to_vec())
    }

    /// `theta_j` as a degree-one element of the face ring.
    pub fn theta(&self, ring: &FaceRing<'_>, j: usize) -> FaceRingElement {
        ring.linear(self.coeffs.row(j))
    }

    pub fn report(&self, poset: &SimplicialPoset) -> LsopReport {
        let determinants: Vec<FacetDeterminant> = poset
            .facets()
            .into_iter()
            .map(|y| FacetDeterminant {
                facet: y,
                atoms: poset.atom_set(y).iter().map(|a| a + 1).collect(),
                det: fmt_rational(&self.facet_matrix(poset, y).det().expect("square")),
            })
            .collect();
        LsopReport {
            seed: self.seed,
            attempts: self.attempts,
            forms: (0..self.dim()).map(|j| self.form(j).render("x")).collect(),
            criterion: determinants.iter().all(|f| f.det != "0"),
            determinants,
            quotient_dims: None,
            h: None,
        }
    }
}

/// Samples integer coefficient matrices from a seeded stream until one passes
/// the facet-submatrix test.
pub fn choose_lsop(poset: &SimplicialPoset, seed: u64) -> Result<Lsop, FaceRingError> {
    let d = check_shape(poset)?;
    let n = poset.num_atoms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=RETRY_CAP {
        let rows: Vec<Vec<Rational>> = (0..d)
            .map(|_| {
                (0..n)
                    .map(|_| rat(rng.gen_range(-COEFF_RANGE..=COEFF_RANGE)))
                    .collect()
            })
            .collect();
        let candidate = Lsop {
            coeffs: Matrix::from_rows(rows).expect("rectangular"),
            seed: Some(seed),
            attempts: attempt,
        };
        if candidate.first_singular_facet(poset).is_none() {
            return Ok(candidate);
        }
    }
    Err(FaceRingError::RetryExhausted(RETRY_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{boundary_simplex, doubled_sphere, rp2};
    use num_traits::Signed;

    #[test]
    fn identity_on_digon() {
        let p = doubled_sphere(2);
        let l = Lsop::from_i64(&p, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(l.report(&p).criterion);
        assert_eq!(l.form(0).render("x"), "x1");
    }

    #[test]
    fn differences_on_tetrahedron_boundary() {
        let p = boundary_simplex(3);
        let rows = vec![vec![1, 0, 0, -1], vec![0, 1, 0, -1], vec![0, 0, 1, -1]];
        let l = Lsop::from_i64(&p, &rows).unwrap();
        let dets: Vec<String> = l.report(&p).determinants.into_iter().map(|f| f.det).collect();
        assert_eq!(dets.len(), 4);
        assert!(dets.iter().all(|d| d == "1" || d == "-1"));
    }

    #[test]
    fn repeated_form_is_rejected() {
        let p = doubled_sphere(2);
        let err = Lsop::from_i64(&p, &[vec![1, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, FaceRingError::SingularFacet { .. }));
        let err = Lsop::from_i64(&p, &[vec![1, 1]]).unwrap_err();
        assert_eq!(err, FaceRingError::Shape { rows: 2, cols: 2 });
    }

    #[test]
    fn seeded_choice_is_deterministic_and_valid() {
        for p in [doubled_sphere(3), boundary_simplex(4), rp2()] {
            for seed in 0..5 {
                let a = choose_lsop(&p, seed).unwrap();
                let b = choose_lsop(&p, seed).unwrap();
                assert_eq!(a, b);
                assert!(a.report(&p).criterion);
                for j in 0..a.dim() {
                    for c in a.coeffs().row(j) {
                        assert!(c.abs() <= rat(COEFF_RANGE));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_zero_has_no_parameters() {
        let p = crate::generators::point();
        assert_eq!(choose_lsop(&p, 0).unwrap_err(), FaceRingError::RankZero);
    }
}
