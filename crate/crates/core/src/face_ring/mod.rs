//! The face ring of a simplicial poset, with chain monomials as normal form.
//!
//! The ring is the polynomial ring on the nonzero poset elements modulo
//! `u*v - (u meet v) * sum_z z` (sum over minimal upper bounds, zero when
//! there is none), graded by rank. The bottom element is the unit. Every
//! element reduces to a combination of monomials supported on chains.

mod expr;
mod lsop;
mod restrict;

pub use expr::{parse_element, ExprError};
pub use lsop::{choose_lsop, Lsop, COEFF_RANGE, RETRY_CAP};
pub use restrict::{restrict, FacetRestriction};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{fmt_rational, Rational, RowReducer, SparseRow};
use crate::poset::{AtomIndex, ElementId, Meet, SimplicialPoset, BOTTOM};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaceRingError {
    #[error("poset of rank 0 has no linear system of parameters")]
    RankZero,
    #[error("poset is not pure")]
    NotPure,
    #[error("candidate forms are singular on facet {facet}")]
    SingularFacet { facet: ElementId },
    #[error("no valid parameter system found after {0} attempts")]
    RetryExhausted(usize),
    #[error("coefficient matrix must be {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
}

/// A monomial supported on a chain `w_1 < ... < w_k` of nonzero elements,
/// stored bottom to top with positive exponents. The empty chain is `1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ChainMonomial {
    degree: usize,
    factors: Vec<(ElementId, u32)>,
}

impl ChainMonomial {
    pub fn one() -> Self {
        ChainMonomial {
            degree: 0,
            factors: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn factors(&self) -> &[(ElementId, u32)] {
        &self.factors
    }

    /// Top element of the chain, or the bottom element for `1`.
    pub fn top(&self) -> ElementId {
        self.factors.last().map_or(BOTTOM, |&(w, _)| w)
    }
}

impl fmt::Display for ChainMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(w, a)| format!("e{w}^{a}"))
            .collect();
        f.write_str(&parts.join("<"))
    }
}

/// A rational combination of chain monomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FaceRingElement {
    terms: BTreeMap<ChainMonomial, Rational>,
}

impl FaceRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(ChainMonomial::one(), Rational::one())
    }

    pub fn monomial(m: ChainMonomial, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(ChainMonomial::one(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChainMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &ChainMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: ChainMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &FaceRingElement) -> FaceRingElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FaceRingElement) -> FaceRingElement {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> FaceRingElement {
        if s.is_zero() {
            return Self::zero();
        }
        FaceRingElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Degrees present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(ChainMonomial::degree).collect();
        d.dedup();
        d
    }

    pub fn homogeneous_part(&self, degree: usize) -> FaceRingElement {
        FaceRingElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The degree if the element is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for FaceRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if m.factors.is_empty() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

/// Multiset of nonzero elements, keyed by id.
pub type RawMonomial = BTreeMap<ElementId, u32>;

type NormalForm = Arc<Vec<(ChainMonomial, Rational)>>;

/// Arithmetic context for the face ring of one poset. Normal forms of raw
/// monomials are memoized.
pub struct FaceRing<'p> {
    poset: &'p SimplicialPoset,
    cache: Mutex<HashMap<Vec<(ElementId, u32)>, NormalForm>>,
}

impl<'p> FaceRing<'p> {
    pub fn new(poset: &'p SimplicialPoset) -> Self {
        FaceRing {
            poset,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn poset(&self) -> &'p SimplicialPoset {
        self.poset
    }

    /// The generator for element `y` (the unit for the bottom element).
    pub fn element(&self, y: ElementId) -> FaceRingElement {
        if y == BOTTOM {
            return FaceRingElement::one();
        }
        FaceRingElement::monomial(self.chain(vec![(y, 1)]), Rational::one())
    }

    /// The atom variable `x_i`.
    pub fn atom(&self, i: AtomIndex) -> FaceRingElement {
        self.element(self.poset.atoms()[i])
    }

    /// `sum_i c_i x_i`.
    pub fn linear(&self, coeffs: &[Rational]) -> FaceRingElement {
        let mut out = FaceRingElement::zero();
        for (i, c) in coeffs.iter().enumerate() {
            out.add_term(self.chain(vec![(self.poset.atoms()[i], 1)]), c.clone());
        }
        out
    }

    /// Builds a chain monomial; factors must form a chain (any order).
    pub fn chain(&self, mut factors: Vec<(ElementId, u32)>) -> ChainMonomial {
        factors.retain(|&(w, a)| w != BOTTOM && a > 0);
        factors.sort_by_key(|&(w, _)| (self.poset.rank_of(w), w));
        debug_assert!(factors
            .windows(2)
            .all(|p| self.poset.lt(p[0].0, p[1].0)));
        let degree = factors
            .iter()
            .map(|&(w, a)| a as usize * self.poset.rank_of(w))
            .sum();
        ChainMonomial { degree, factors }
    }

    fn first_incomparable(&self, raw: &RawMonomial) -> Option<(ElementId, ElementId)> {
        let keys: Vec<ElementId> = raw.keys().copied().collect();
        for (i, &u) in keys.iter().enumerate() {
            for &v in &keys[i + 1..] {
                if !self.poset.comparable(u, v) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Reduces a raw monomial to chain normal form by repeatedly straightening
    /// the leftmost incomparable pair. Each step replaces `u*v` by
    /// `(u meet v) * z` with `z` above both, strictly increasing the number of
    /// comparable pairs' total rank, so the rewriting terminates.
    pub fn normal_form(&self, raw: &RawMonomial) -> NormalForm {
        let key: Vec<(ElementId, u32)> = raw
            .iter()
            .filter(|&(&w, &a)| w != BOTTOM && a > 0)
            .map(|(&w, &a)| (w, a))
            .collect();
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let raw: RawMonomial = key.iter().copied().collect();
        let result = match self.first_incomparable(&raw) {
            None => vec![(self.chain(key.clone()), Rational::one())],
            Some((u, v)) => {
                let uppers = self.poset.minimal_upper_bounds(u, v);
                let mut acc: BTreeMap<ChainMonomial, Rational> = BTreeMap::new();
                if !uppers.is_empty() {
                    let meet = match self.poset.meet(u, v) {
                        Meet::Element(m) => m,
                        Meet::NoGreatest(_) => {
                            panic!("elements {u} and {v} have an upper bound but no meet")
                        }
                    };
                    let mut base = raw.clone();
                    for w in [u, v] {
                        let e = base.get_mut(&w).expect("present");
                        *e -= 1;
                        if *e == 0 {
                            base.remove(&w);
                        }
                    }
                    if meet != BOTTOM {
                        *base.entry(meet).or_insert(0) += 1;
                    }
                    for z in uppers {
                        let mut next = base.clone();
                        *next.entry(z).or_insert(0) += 1;
                        for (m, c) in self.normal_form(&next).iter() {
                            let e = acc.entry(m.clone()).or_insert_with(Rational::zero);
                            *e += c;
                        }
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
        };
        let result = Arc::new(result);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, result.clone());
        result
    }

    /// Same reduction, straightening the rightmost incomparable pair first.
    /// Exists to check that the normal form does not depend on the order.
    pub fn normal_form_rightmost(&self, raw: &RawMonomial) -> Vec<(ChainMonomial, Rational)> {
        let keys: Vec<ElementId> = raw.keys().copied().filter(|&w| w != BOTTOM).collect();
        let mut pair = None;
        'outer: for i in (0..keys.len()).rev() {
            for j in (0..i).rev() {
                if !self.poset.comparable(keys[i], keys[j]) {
                    pair = Some((keys[j], keys[i]));
                    break 'outer;
                }
            }
        }
        let Some((u, v)) = pair else {
            let key: Vec<(ElementId, u32)> = raw
                .iter()
                .filter(|&(&w, &a)| w != BOTTOM && a > 0)
                .map(|(&w, &a)| (w, a))
                .collect();
            return vec![(self.chain(key), Rational::one())];
        };
        let uppers = self.poset.minimal_upper_bounds(u, v);
        let mut acc: BTreeMap<ChainMonomial, Rational> = BTreeMap::new();
        if let (false, Meet::Element(meet)) = (uppers.is_empty(), self.poset.meet(u, v)) {
            let mut base = raw.clone();
            for w in [u, v] {
                let e = base.get_mut(&w).expect("present");
                *e -= 1;
                if *e == 0 {
                    base.remove(&w);
                }
            }
            if meet != BOTTOM {
                *base.entry(meet).or_insert(0) += 1;
            }
            for z in uppers {
                let mut next = base.clone();
                *next.entry(z).or_insert(0) += 1;
                for (m, c) in self.normal_form_rightmost(&next) {
                    *acc.entry(m).or_insert_with(Rational::zero) += c;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn reduce_raw(&self, raw: &RawMonomial) -> FaceRingElement {
        let mut out = FaceRingElement::zero();
        for (m, c) in self.normal_form(raw).iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, a: &FaceRingElement, b: &FaceRingElement) -> FaceRingElement {
        let mut out = FaceRingElement::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let mut raw: RawMonomial = ma.factors.iter().copied().collect();
                for &(w, k) in &mb.factors {
                    *raw.entry(w).or_insert(0) += k;
                }
                let coef = ca * cb;
                for (m, c) in self.normal_form(&raw).iter() {
                    out.add_term(m.clone(), &coef * c);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &FaceRingElement, k: u32) -> FaceRingElement {
        let mut out = FaceRingElement::one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    pub fn product<'a, I>(&self, factors: I) -> FaceRingElement
    where
        I: IntoIterator<Item = &'a FaceRingElement>,
    {
        factors
            .into_iter()
            .fold(FaceRingElement::one(), |acc, f| self.mul(&acc, f))
    }

    /// All chain monomials of the given degree, in a fixed order.
    pub fn basis(&self, degree: usize) -> Vec<ChainMonomial> {
        let members: Vec<ElementId> = {
            let mut m: Vec<ElementId> = self.poset.elements().filter(|&y| y != BOTTOM).collect();
            m.sort_by_key(|&y| (self.poset.rank_of(y), y));
            m
        };
        let mut out = Vec::new();
        let mut stack: Vec<(ElementId, u32)> = Vec::new();
        self.grow_basis(&members, 0, degree, &mut stack, &mut out);
        out
    }

    fn grow_basis(
        &self,
        members: &[ElementId],
        start: usize,
        remaining: usize,
        stack: &mut Vec<(ElementId, u32)>,
        out: &mut Vec<ChainMonomial>,
    ) {
        if remaining == 0 {
            out.push(self.chain(stack.clone()));
            return;
        }
        for j in start..members.len() {
            let w = members[j];
            if let Some(&(top, _)) = stack.last() {
                if !self.poset.lt(top, w) {
                    continue;
                }
            }
            let r = self.poset.rank_of(w);
            let mut a = 1;
            while a as usize * r <= remaining {
                stack.push((w, a));
                self.grow_basis(members, j + 1, remaining - a as usize * r, stack, out);
                stack.pop();
                a += 1;
            }
        }
    }

    /// `dim (A_P)_i`, the number of chain monomials of degree `i`.
    pub fn graded_dimension(&self, degree: usize) -> usize {
        self.basis(degree).len()
    }

    /// Coordinates of a homogeneous element in the chain-monomial basis.
    pub fn coordinates(
        &self,
        element: &FaceRingElement,
        index: &HashMap<ChainMonomial, usize>,
    ) -> SparseRow {
        element
            .terms
            .iter()
            .map(|(m, c)| (*index.get(m).expect("monomial in basis"), c.clone()))
            .collect()
    }

    /// Reducer spanning `theta_j * b` for all `j` and basis elements `b` of
    /// degree `degree - 1`, in coordinates of the degree-`degree` basis.
    fn theta_image(&self, lsop: &Lsop, degree: usize) -> (Vec<ChainMonomial>, HashMap<ChainMonomial, usize>, RowReducer) {
        let target = self.basis(degree);
        let index: HashMap<ChainMonomial, usize> =
            target.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut reducer = RowReducer::new();
        if degree > 0 {
            let thetas: Vec<FaceRingElement> = (0..lsop.dim()).map(|j| lsop.theta(self, j)).collect();
            for b in self.basis(degree - 1) {
                let b = FaceRingElement::monomial(b, Rational::one());
                for t in &thetas {
                    reducer.insert(self.coordinates(&self.mul(t, &b), &index));
                }
            }
        }
        (target, index, reducer)
    }

    /// `dim (A_P / (Theta))_i`.
    pub fn quotient_graded_dimension(&self, lsop: &Lsop, degree: usize) -> usize {
        let (target, _, reducer) = self.theta_image(lsop, degree);
        target.len() - reducer.rank()
    }

    /// Whether a homogeneous element lies in the ideal generated by the
    /// parameters.
    pub fn in_theta_ideal(&self, lsop: &Lsop, element: &FaceRingElement) -> bool {
        let Some(degree) = element.homogeneous_degree() else {
            return element.is_zero()
                || element
                    .degrees()
                    .into_iter()
                    .all(|d| self.in_theta_ideal(lsop, &element.homogeneous_part(d)));
        };
        let (_, index, reducer) = self.theta_image(lsop, degree);
        reducer.contains(self.coordinates(element, &index))
    }
}
