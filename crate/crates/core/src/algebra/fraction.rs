use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{fmt_rational, LinearForm, Polynomial, Rational};

/// `scalar * numerator / prod(form^mult)`, with every denominator form scaled
/// so its first nonzero coefficient is 1.
///
/// After normalization no denominator form divides the numerator, and the
/// numerator's leading coefficient is 1 (the constant lives in `scalar`), so
/// two equal fractions are structurally equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearDenomFraction {
    scalar: Rational,
    numerator: Polynomial,
    denominator: BTreeMap<LinearForm, u32>,
}

impl LinearDenomFraction {
    pub fn zero(nvars: usize) -> Self {
        LinearDenomFraction {
            scalar: Rational::zero(),
            numerator: Polynomial::zero(nvars),
            denominator: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self::new(Rational::one(), p, std::iter::empty())
    }

    /// Builds and normalizes `scalar * numerator / prod(forms)`. Panics on a
    /// zero denominator form.
    pub fn new<I>(scalar: Rational, numerator: Polynomial, forms: I) -> Self
    where
        I: IntoIterator<Item = LinearForm>,
    {
        let nvars = numerator.nvars();
        let mut scalar = scalar;
        let mut denominator = BTreeMap::new();
        for f in forms {
            let (s, canon) = f.canonical().expect("zero linear form in denominator");
            assert_eq!(canon.nvars(), nvars);
            scalar /= s;
            *denominator.entry(canon).or_insert(0) += 1;
        }
        let mut out = LinearDenomFraction {
            scalar,
            numerator,
            denominator,
        };
        out.normalize();
        out
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &BTreeMap<LinearForm, u32> {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_empty()
    }

    /// The value as a polynomial when the denominator has cancelled.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        self.is_polynomial()
            .then(|| self.numerator.scale(&self.scalar))
    }

    fn normalize(&mut self) {
        let nvars = self.nvars();
        if self.scalar.is_zero() || self.numerator.is_zero() {
            *self = Self::zero(nvars);
            return;
        }
        for (form, mult) in self.denominator.iter_mut() {
            while *mult > 0 {
                match self
                    .numerator
                    .divide_exact(form)
                    .expect("canonical forms are nonzero")
                {
                    Some(q) => {
                        self.numerator = q;
                        *mult -= 1;
                    }
                    None => break,
                }
            }
        }
        self.denominator.retain(|_, m| *m > 0);
        let lead = self
            .numerator
            .leading_coefficient()
            .cloned()
            .expect("nonzero numerator");
        if !lead.is_one() {
            self.numerator = self.numerator.scale(&lead.recip());
            self.scalar *= lead;
        }
    }

    /// Sum of many fractions. Terms with identical denominators are combined
    /// first; the rest go over their least common denominator and are
    /// cancelled once at the end. Exact, so the result does not depend on
    /// input order.
    pub fn sum<'a, I>(nvars: usize, items: I) -> Self
    where
        I: IntoIterator<Item = &'a LinearDenomFraction>,
    {
        let mut groups: BTreeMap<BTreeMap<LinearForm, u32>, Polynomial> = BTreeMap::new();
        for f in items.into_iter().filter(|f| !f.is_zero()) {
            groups
                .entry(f.denominator.clone())
                .or_insert_with(|| Polynomial::zero(nvars))
                .add_scaled(&f.numerator, &f.scalar);
        }
        Self::sum_groups(nvars, groups)
    }

    /// Like [`sum`](Self::sum) for raw parts `scalar * numerator / prod(forms)`,
    /// skipping the per-part cancellation.
    pub fn sum_parts<I>(nvars: usize, parts: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Polynomial, Vec<LinearForm>)>,
    {
        let mut groups: BTreeMap<BTreeMap<LinearForm, u32>, Polynomial> = BTreeMap::new();
        for (scalar, numerator, forms) in parts {
            if scalar.is_zero() || numerator.is_zero() {
                continue;
            }
            let mut s = scalar;
            let mut denominator = BTreeMap::new();
            for f in forms {
                let (c, canon) = f.canonical().expect("zero linear form in denominator");
                s /= c;
                *denominator.entry(canon).or_insert(0) += 1;
            }
            groups
                .entry(denominator)
                .or_insert_with(|| Polynomial::zero(nvars))
                .add_scaled(&numerator, &s);
        }
        Self::sum_groups(nvars, groups)
    }

    fn sum_groups(nvars: usize, groups: BTreeMap<BTreeMap<LinearForm, u32>, Polynomial>) -> Self {
        let parts: Vec<LinearDenomFraction> = groups
            .into_iter()
            .map(|(denominator, numerator)| {
                let mut f = LinearDenomFraction {
                    scalar: Rational::one(),
                    numerator,
                    denominator,
                };
                f.normalize();
                f
            })
            .filter(|f| !f.is_zero())
            .collect();
        match parts.len() {
            0 => Self::zero(nvars),
            1 => parts.into_iter().next().expect("one part"),
            _ => Self::lcd_sum(nvars, &parts),
        }
    }

    fn lcd_sum(nvars: usize, items: &[LinearDenomFraction]) -> Self {
        let mut lcd: BTreeMap<LinearForm, u32> = BTreeMap::new();
        for f in items {
            for (form, &m) in &f.denominator {
                let e = lcd.entry(form.clone()).or_insert(0);
                *e = (*e).max(m);
            }
        }
        let mut numerator = Polynomial::zero(nvars);
        for f in items {
            let mut term = f.numerator.scale(&f.scalar);
            for (form, &m) in &lcd {
                let have = f.denominator.get(form).copied().unwrap_or(0);
                for _ in have..m {
                    term = term.mul_linear(form);
                }
            }
            numerator.add_scaled(&term, &Rational::one());
        }
        let mut out = LinearDenomFraction {
            scalar: Rational::one(),
            numerator,
            denominator: lcd,
        };
        out.normalize();
        out
    }

    pub fn add(&self, other: &LinearDenomFraction) -> LinearDenomFraction {
        Self::sum(self.nvars(), [self, other])
    }

    pub fn neg(&self) -> LinearDenomFraction {
        LinearDenomFraction {
            scalar: -self.scalar.clone(),
            numerator: self.numerator.clone(),
            denominator: self.denominator.clone(),
        }
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> LinearDenomFraction {
        let mut out = LinearDenomFraction {
            scalar: self.scalar.clone(),
            numerator: &self.numerator * p,
            denominator: self.denominator.clone(),
        };
        out.normalize();
        out
    }

    pub fn render(&self, prefix: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let num = self.numerator.scale(&self.scalar).render(prefix);
        if self.denominator.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .denominator
            .iter()
            .map(|(f, &m)| {
                let s = format!("({})", f.render(prefix));
                if m == 1 {
                    s
                } else {
                    format!("{s}^{m}")
                }
            })
            .collect();
        format!("({num}) / {}", den.join("*"))
    }

    pub fn scalar_text(&self) -> String {
        fmt_rational(&self.scalar)
    }
}

impl fmt::Display for LinearDenomFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::new(c.iter().map(|&v| rat(v)).collect())
    }

    fn recip(f: LinearForm, c: i64) -> LinearDenomFraction {
        let n = f.nvars();
        LinearDenomFraction::new(rat(c), Polynomial::one(n), [f])
    }

    #[test]
    fn opposite_terms_cancel() {
        let s = recip(form(&[1, 0]), 1).add(&recip(form(&[1, 0]), -1));
        assert!(s.is_zero());
        assert!(s.is_polynomial());
        assert_eq!(s.to_polynomial(), Some(Polynomial::zero(2)));
    }

    #[test]
    fn distinct_denominators_combine() {
        let s = recip(form(&[1, 0]), 1).add(&recip(form(&[0, 1]), 1));
        let expected = LinearDenomFraction::new(
            rat(1),
            &Polynomial::var(2, 0) + &Polynomial::var(2, 1),
            [form(&[1, 0]), form(&[0, 1])],
        );
        assert_eq!(s, expected);
        assert_eq!(s.to_string(), "(t1 + t2) / (t2)*(t1)");
    }

    #[test]
    fn scaled_forms_share_a_factor() {
        // 1/(2 t1) + 1/(-t1) = -1/(2 t1)
        let s = recip(form(&[2, 0]), 1).add(&recip(form(&[-1, 0]), 1));
        let expected =
            LinearDenomFraction::new(crate::algebra::ratio(-1, 2), Polynomial::one(2), [form(&[1, 0])]);
        assert_eq!(s, expected);
    }

    #[test]
    fn cancellation_reaches_polynomial() {
        // t1^2 / t1 = t1, with squared denominators cancelled one by one
        let t1 = Polynomial::var(2, 0);
        let f = LinearDenomFraction::new(rat(3), &t1 * &t1, [form(&[1, 0]), form(&[1, 0])]);
        assert_eq!(f.to_polynomial(), Some(Polynomial::constant(2, rat(3))));
    }

    fn arb_frac() -> impl Strategy<Value = LinearDenomFraction> {
        (
            -3i64..=3,
            prop::collection::vec((prop::collection::vec(0u32..2, 2), -3i64..=3), 0..3),
            prop::collection::vec(prop::sample::select(vec![[1i64, 0], [0, 1], [1, 1], [1, -1], [2, 1]]), 0..3),
        )
            .prop_map(|(s, terms, forms)| {
                let num = Polynomial::from_terms(2, terms.into_iter().map(|(e, c)| (e, rat(c))));
                LinearDenomFraction::new(rat(s), num, forms.iter().map(|f| form(f)))
            })
    }

    proptest! {
        #[test]
        fn add_is_commutative_and_associative(a in arb_frac(), b in arb_frac(), c in arb_frac()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(LinearDenomFraction::sum(2, [&a, &b, &c]), a.add(&b).add(&c));
            prop_assert!(a.add(&a.neg()).is_zero());
        }
    }
}
