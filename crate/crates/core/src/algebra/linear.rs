use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{fmt_rational, Polynomial, Rational};

/// A homogeneous linear form `c_0 v_0 + ... + c_{n-1} v_{n-1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinearForm {
    coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        LinearForm { coeffs }
    }

    pub fn zero(nvars: usize) -> Self {
        LinearForm {
            coeffs: vec![Rational::zero(); nvars],
        }
    }

    /// The coordinate form `v_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut f = LinearForm::zero(nvars);
        f.coeffs[i] = Rational::one();
        f
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &Rational) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Splits `self = scalar * canonical` with the canonical form's first
    /// nonzero coefficient equal to 1. `None` for the zero form.
    pub fn canonical(&self) -> Option<(Rational, LinearForm)> {
        let lead = self.leading_index()?;
        let scalar = self.coeffs[lead].clone();
        let inv = scalar.recip();
        Some((scalar, self.scale(&inv)))
    }

    /// The scalar `c` with `other = c * self`, if one exists.
    pub fn proportionality(&self, other: &LinearForm) -> Option<Rational> {
        assert_eq!(self.nvars(), other.nvars());
        let lead = self.leading_index()?;
        let c = &other.coeffs[lead] / &self.coeffs[lead];
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| &(a * &c) == b)
            .then_some(c)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_linear(self)
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .map(|(a, b)| a * b)
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Renders with the given variable prefix, e.g. `2*t1 - t3`.
    pub fn render(&self, prefix: &str) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !abs.is_one() {
                out.push_str(&fmt_rational(&abs));
                out.push('*');
            }
            out.push_str(&format!("{prefix}{}", i + 1));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul<&Rational> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: &Rational) -> LinearForm {
        self.scale(rhs)
    }
}
