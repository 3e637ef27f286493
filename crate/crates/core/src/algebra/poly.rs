use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{fmt_rational, AlgebraError, LinearForm, Rational};

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn one(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over the rationals in a fixed number of variables.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Exponents::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(Exponents(e), Rational::one());
        p
    }

    pub fn from_linear(f: &LinearForm) -> Self {
        let n = f.nvars();
        let mut p = Polynomial::zero(n);
        for (i, c) in f.coeffs().iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(Exponents(e), c.clone());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Exponents(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponents::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Exponents::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Coefficient of the greatest monomial in graded-lex order.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Exponents::one(self.nvars))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The constant value, if the polynomial has degree <= 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.degree() {
            None => Some(Rational::zero()),
            Some(0) => Some(self.constant_term()),
            Some(_) => None,
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, other: &Polynomial, s: &Rational) {
        assert_eq!(self.nvars, other.nvars);
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul_linear(&self, f: &LinearForm) -> Polynomial {
        assert_eq!(self.nvars, f.nvars());
        let mut out = Polynomial::zero(self.nvars);
        for (i, a) in f.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (e, c) in &self.terms {
                let mut e = e.clone();
                e.0[i] += 1;
                out.add_term(e, c * a);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                for _ in 0..k {
                    v *= x;
                }
            }
            total += v;
        }
        total
    }

    /// Exact quotient `self / f`, or `Ok(None)` when `f` does not divide.
    ///
    /// Pivoting on the first variable `v` with nonzero coefficient, write
    /// `f = c*v + g` and `self = sum_j p_j v^j` with `p_j` free of `v`.
    /// Synthetic division from the top power down leaves the remainder
    /// `self(v = -g/c)`, i.e. the restriction to the hyperplane `f = 0`;
    /// divisibility is exactly the vanishing of that restriction.
    pub fn divide_exact(&self, f: &LinearForm) -> Result<Option<Polynomial>, AlgebraError> {
        assert_eq!(self.nvars, f.nvars());
        let k = f.leading_index().ok_or(AlgebraError::ZeroForm)?;
        let c = f.coeff(k).clone();
        let mut g = f.clone();
        let mut gc = g.coeffs().to_vec();
        gc[k] = Rational::zero();
        g = LinearForm::new(gc);

        let mut by_power: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (e, coef) in &self.terms {
            let j = e.0[k];
            let mut rest = e.clone();
            rest.0[k] = 0;
            by_power
                .entry(j)
                .or_insert_with(|| Polynomial::zero(self.nvars))
                .add_term(rest, coef.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&t) => t,
            None => return Ok(Some(Polynomial::zero(self.nvars))),
        };
        let inv_c = c.recip();
        let mut quotient = Polynomial::zero(self.nvars);
        for j in (1..=top).rev() {
            let Some(pj) = by_power.remove(&j) else { continue };
            if pj.is_zero() {
                continue;
            }
            let qj = pj.scale(&inv_c);
            let carry = qj.mul_linear(&g);
            let lower = by_power
                .entry(j - 1)
                .or_insert_with(|| Polynomial::zero(self.nvars));
            *lower = &*lower - &carry;
            for (e, coef) in qj.terms {
                let mut e = e;
                e.0[k] += j - 1;
                quotient.add_term(e, coef);
            }
        }
        let remainder = by_power.remove(&0).unwrap_or_else(|| Polynomial::zero(self.nvars));
        Ok(remainder.is_zero().then_some(quotient))
    }

    /// Canonical text: monomials in decreasing graded-lex order, `t1^2*t2`.
    pub fn render(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("{prefix}{}", i + 1)
                    } else {
                        format!("{prefix}{}^{k}", i + 1)
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&fmt_rational(&abs));
            } else {
                if !abs.is_one() {
                    out.push_str(&fmt_rational(&abs));
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = Exponents(ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect());
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn t(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::new(c.iter().map(|&v| rat(v)).collect())
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&t(2, 0) * &t(2, 0)) - &(&t(2, 1) * &t(2, 1));
        let q = p.divide_exact(&form(&[1, -1])).unwrap().unwrap();
        assert_eq!(q, &t(2, 0) + &t(2, 1));
    }

    #[test]
    fn indivisible_and_zero_form() {
        assert_eq!(t(2, 0).divide_exact(&form(&[0, 1])).unwrap(), None);
        assert_eq!(
            t(2, 0).divide_exact(&form(&[0, 0])),
            Err(AlgebraError::ZeroForm)
        );
        let zero = Polynomial::zero(2);
        assert_eq!(zero.divide_exact(&form(&[1, 1])).unwrap(), Some(Polynomial::zero(2)));
        // a nonzero constant is never divisible by a linear form
        assert_eq!(Polynomial::one(2).divide_exact(&form(&[3, 0])).unwrap(), None);
    }

    #[test]
    fn rendering_is_canonical() {
        let p = &(&t(2, 0) * &t(2, 0)).scale(&rat(2)) - &t(2, 1);
        assert_eq!(p.to_string(), "2*t1^2 - t2");
        assert_eq!(Polynomial::constant(3, rat(-5)).to_string(), "-5");
        assert_eq!(Polynomial::zero(1).to_string(), "0");
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, nvars), -5i64..=5), 0..6)
            .prop_map(move |terms| {
                Polynomial::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, rat(c))))
            })
    }

    fn arb_form(nvars: usize) -> impl Strategy<Value = LinearForm> {
        prop::collection::vec(-4i64..=4, nvars)
            .prop_filter("nonzero form", |c| c.iter().any(|&v| v != 0))
            .prop_map(|c| form(&c))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn divide_exact_round_trip(p in arb_poly(3), f in arb_form(3)) {
            let prod = p.mul_linear(&f);
            prop_assert_eq!(prod.divide_exact(&f).unwrap(), Some(p));
        }

        #[test]
        fn remainder_means_nonvanishing_on_hyperplane(p in arb_poly(2), f in arb_form(2)) {
            // f = a*t1 + b*t2 vanishes at (b, -a); when f does not divide p,
            // p must be nonzero somewhere on that line
            let divisible = p.divide_exact(&f).unwrap().is_some();
            let pt = [f.coeff(1).clone(), -f.coeff(0).clone()];
            let on_line: Vec<Rational> = (1..=6)
                .map(|s| p.eval(&[&pt[0] * rat(s), &pt[1] * rat(s)]))
                .collect();
            prop_assert_eq!(divisible, on_line.iter().all(Zero::is_zero));
        }
    }
}
