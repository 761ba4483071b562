//! Sparse polynomials with exact integer coefficients.
//!
//! Generic over the coefficient type; every arithmetic step is checked and an
//! overflow surfaces as [`Error::Overflow`] instead of wrapping.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{
    CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Signed, ToPrimitive, Zero,
};

use crate::error::{Error, Result};

/// Exact signed integer usable as a polynomial coefficient.
pub trait Coefficient:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
{
    fn from_count(n: usize) -> Result<Self> {
        Self::from_usize(n).ok_or(Error::Overflow)
    }

    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or(Error::Overflow)
    }

    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }
}

impl Coefficient for i32 {}
impl Coefficient for i64 {}
impl Coefficient for i128 {}
impl Coefficient for BigInt {}

const VARS: [char; 3] = ['x', 'y', 'z'];

/// Polynomial in `N` variables named `x`, `y`, `z` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<C, const N: usize> {
    terms: BTreeMap<[u32; N], C>,
}

pub type Poly2<C> = Poly<C, 2>;
pub type Poly3<C> = Poly<C, 3>;

impl<C: Coefficient, const N: usize> Default for Poly<C, N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient, const N: usize> Poly<C, N> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial([0; N], C::one())
    }

    pub fn monomial(exponents: [u32; N], coeff: C) -> Self {
        let mut p = Self::zero();
        if !coeff.is_zero() {
            p.terms.insert(exponents, coeff);
        }
        p
    }

    /// `var^1` for the variable at `index`.
    pub fn var(index: usize) -> Self {
        let mut e = [0; N];
        e[index] = 1;
        Self::monomial(e, C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &[u32; N]) -> C {
        self.terms.get(exponents).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &C)> {
        self.terms.iter()
    }

    /// Terms in graded-lexicographic order, highest first.
    pub fn terms_grlex(&self) -> Vec<(&[u32; N], &C)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let deg = |e: &[u32; N]| e.iter().sum::<u32>();
            deg(b.0).cmp(&deg(a.0)).then_with(|| b.0.cmp(a.0))
        });
        terms
    }

    pub fn add_term(&mut self, exponents: [u32; N], coeff: &C) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.get(&exponents) {
            Some(c) => c.try_add(coeff)?,
            None => coeff.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&exponents);
        } else {
            self.terms.insert(exponents, sum);
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &C::zero().try_sub(c)?)?;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                }
                out.add_term(e, &ca.try_mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn checked_scale(&self, factor: &C) -> Result<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &c.try_mul(factor)?)?;
        }
        Ok(out)
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Self> {
        (0..exp).try_fold(Self::one(), |acc, _| acc.checked_mul(self))
    }

    /// Sum of all coefficients (the value at `x = y = z = 1`).
    pub fn mass(&self) -> Result<C> {
        self.terms
            .values()
            .try_fold(C::zero(), |acc, c| acc.try_add(c))
    }

    /// Total degree shared by every term, or `None` if mixed or empty.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = degrees.next()?;
        degrees.all(|x| x == d).then_some(d)
    }

    pub fn map_coefficients<D: Coefficient>(
        &self,
        f: impl Fn(&C) -> Result<D>,
    ) -> Result<Poly<D, N>> {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &f(c)?)?;
        }
        Ok(out)
    }
}

impl<C: Coefficient> Poly2<C> {
    /// `(xy)^j (x+y)^e`.
    pub fn gamma_basis(j: u32, e: u32) -> Result<Self> {
        let xy = Self::monomial([j, j], C::one());
        let x_plus_y = Self::var(0).checked_add(&Self::var(1))?;
        xy.checked_mul(&x_plus_y.checked_pow(e)?)
    }
}

impl<C: Coefficient> Poly3<C> {
    /// Embeds a bivariate polynomial multiplied by `z^power`.
    pub fn from_slice(slice: &Poly2<C>, power: u32) -> Self {
        Poly {
            terms: slice
                .terms
                .iter()
                .map(|([a, b], c)| ([*a, *b, power], c.clone()))
                .collect(),
        }
    }
}

impl<C: Coefficient, const N: usize> fmt::Display for Poly<C, N> {
    /// Graded-lexicographic, e.g. `2x^2y^2z + x^2yz^2 + xy^2z^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms_grlex().into_iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let constant = e.iter().all(|&x| x == 0);
            if constant || !magnitude.is_one() {
                write!(f, "{magnitude}")?;
            }
            for (var, &power) in VARS.iter().zip(e.iter()) {
                match power {
                    0 => {}
                    1 => write!(f, "{var}")?,
                    p => write!(f, "{var}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_graded_lex() {
        let mut p = Poly3::<i64>::zero();
        p.add_term([1, 2, 2], &1).unwrap();
        p.add_term([2, 2, 1], &2).unwrap();
        p.add_term([2, 1, 2], &1).unwrap();
        assert_eq!(p.to_string(), "2x^2y^2z + x^2yz^2 + xy^2z^2");

        let mut q = Poly2::<i64>::zero();
        q.add_term([2, 0], &1).unwrap();
        q.add_term([1, 1], &-2).unwrap();
        q.add_term([0, 0], &-1).unwrap();
        assert_eq!(q.to_string(), "x^2 - 2xy - 1");
        assert_eq!(Poly2::<i64>::zero().to_string(), "0");
    }

    #[test]
    fn binomial_expansion() {
        let p = Poly2::<i64>::gamma_basis(0, 3).unwrap();
        assert_eq!(p.to_string(), "x^3 + 3x^2y + 3xy^2 + y^3");
        let p = Poly2::<i64>::gamma_basis(1, 1).unwrap();
        assert_eq!(p.to_string(), "x^2y + xy^2");
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Poly2::<i64>::var(0);
        assert!(x.checked_sub(&x).unwrap().is_zero());
    }

    #[test]
    fn overflow_is_an_error() {
        let big = Poly2::<i32>::monomial([0, 0], i32::MAX);
        assert_eq!(big.checked_add(&Poly2::one()), Err(Error::Overflow));
        assert_eq!(big.checked_scale(&2), Err(Error::Overflow));
        let huge = Poly2::<BigInt>::monomial([0, 0], BigInt::from(i128::MAX));
        assert!(huge.checked_scale(&BigInt::from(4)).is_ok());
    }

    #[test]
    fn homogeneity() {
        let p = Poly2::<i64>::gamma_basis(1, 2).unwrap();
        assert_eq!(p.homogeneous_degree(), Some(4));
        let q = p.checked_add(&Poly2::one()).unwrap();
        assert_eq!(q.homogeneous_degree(), None);
    }
}
