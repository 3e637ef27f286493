use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{FaceRingElement, Lsop};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::algebra::{LinearForm, Polynomial, Rational};
use crate::poset::{AtomIndex, ElementId, SimplicialPoset};

/// The restriction map `iota_y` for one facet, with images landing in the
/// polynomial ring on `theta_1..theta_d`.
///
/// A chain monomial below `y` maps to `prod_i theta_i(y)^(e_i)`, where `e_i`
/// counts the factors containing atom `i`. Those products are memoized by
/// exponent vector and built one linear factor at a time.
#[derive(Debug)]
pub struct FacetRestriction {
    facet: ElementId,
    atoms: Vec<AtomIndex>,
    thetas: Vec<LinearForm>,
    /// `scales[k] * thetas[k]` has integer coefficients; products are formed
    /// from these so the cached polynomials stay integral.
    scales: Vec<Rational>,
    integral: Vec<LinearForm>,
    /// Positions within `atoms` of each element below the facet.
    below: HashMap<ElementId, Vec<usize>>,
    images: Mutex<HashMap<Vec<u32>, Arc<Polynomial>>>,
}

impl Clone for FacetRestriction {
    fn clone(&self) -> Self {
        FacetRestriction {
            facet: self.facet,
            atoms: self.atoms.clone(),
            thetas: self.thetas.clone(),
            scales: self.scales.clone(),
            integral: self.integral.clone(),
            below: self.below.clone(),
            images: Mutex::new(self.images.lock().expect("image cache").clone()),
        }
    }
}

impl FacetRestriction {
    pub fn new(poset: &SimplicialPoset, lsop: &Lsop, y: ElementId) -> Self {
        let d = lsop.dim();
        let inv = lsop
            .facet_matrix(poset, y)
            .inverse()
            .expect("parameter system is nonsingular on every facet");
        // theta_j = sum_k C[j,k] x_{A(y)[k]} on [0, y], so row k of the
        // inverse writes x_{A(y)[k]} in theta-coordinates.
        let thetas: Vec<LinearForm> = (0..d).map(|k| LinearForm::new(inv.row(k).to_vec())).collect();
        let atoms = poset.atom_set(y).to_vec();
        let below = poset
            .elements()
            .filter(|&w| poset.le(w, y))
            .map(|w| {
                let pos = poset
                    .atom_set(w)
                    .iter()
                    .map(|a| atoms.binary_search(a).expect("atom of a lower element"))
                    .collect();
                (w, pos)
            })
            .collect();
        let scales: Vec<Rational> = thetas
            .iter()
            .map(|t| {
                let lcm = t
                    .coeffs()
                    .iter()
                    .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                Rational::from_integer(lcm)
            })
            .collect();
        let integral = thetas.iter().zip(&scales).map(|(t, s)| t * s).collect();
        FacetRestriction {
            facet: y,
            atoms,
            thetas,
            scales,
            integral,
            below,
            images: Mutex::new(HashMap::new()),
        }
    }

    pub fn facet(&self) -> ElementId {
        self.facet
    }

    /// Atoms of the facet in increasing order.
    pub fn atoms(&self) -> &[AtomIndex] {
        &self.atoms
    }

    /// `theta_i(y)` for the atom `i`, or `None` if `i` is not below the facet.
    pub fn theta_of_atom(&self, i: AtomIndex) -> Option<&LinearForm> {
        self.atoms.binary_search(&i).ok().map(|k| &self.thetas[k])
    }

    /// `prod_k (scales[k] * theta_{A(y)[k]}(y))^(e[k])`, an integral polynomial.
    fn power_product(&self, e: &[u32]) -> Arc<Polynomial> {
        if let Some(hit) = self.images.lock().expect("image cache").get(e) {
            return hit.clone();
        }
        let img = match e.iter().rposition(|&k| k > 0) {
            None => Polynomial::one(self.thetas.len()),
            Some(k) => {
                let mut smaller = e.to_vec();
                smaller[k] -= 1;
                self.power_product(&smaller).mul_linear(&self.integral[k])
            }
        };
        let img = Arc::new(img);
        self.images
            .lock()
            .expect("image cache")
            .insert(e.to_vec(), img.clone());
        img
    }

    /// The image of a single element: the product of its atoms' `theta_i(y)`,
    /// or `None` if the element is not below the facet.
    pub fn element_image(&self, w: ElementId) -> Option<Polynomial> {
        let pos = self.below.get(&w)?;
        let mut e = vec![0u32; self.atoms.len()];
        for &k in pos {
            e[k] += 1;
        }
        let mut out = Polynomial::zero(self.thetas.len());
        out.add_scaled(&self.power_product(&e), &self.unscale(&e));
        Some(out)
    }

    fn unscale(&self, e: &[u32]) -> Rational {
        let mut denom = Rational::one();
        for (s, &k) in self.scales.iter().zip(e) {
            for _ in 0..k {
                denom *= s;
            }
        }
        denom.recip()
    }

    pub fn apply(&self, alpha: &FaceRingElement) -> Polynomial {
        let mut out = Polynomial::zero(self.thetas.len());
        let mut e = vec![0u32; self.atoms.len()];
        for (m, c) in alpha.terms() {
            if !self.below.contains_key(&m.top()) {
                continue;
            }
            e.iter_mut().for_each(|k| *k = 0);
            for &(w, a) in m.factors() {
                for &k in &self.below[&w] {
                    e[k] += a;
                }
            }
            out.add_scaled(&self.power_product(&e), &(c * self.unscale(&e)));
        }
        out
    }
}

/// `iota_y(alpha)` in theta-coordinates.
pub fn restrict(
    poset: &SimplicialPoset,
    lsop: &Lsop,
    y: ElementId,
    alpha: &FaceRingElement,
) -> Polynomial {
    FacetRestriction::new(poset, lsop, y).apply(alpha)
}
