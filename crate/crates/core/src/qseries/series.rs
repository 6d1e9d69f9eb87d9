use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{big_to_f64, format_big_fraction};

/// Truncated formal series `sum c_e q^{e/D}` with exact rational
/// coefficients.
///
/// Every exponent lies in `(1/D)Z`. Terms with exponent `<= order` are known
/// exactly (absent means zero); everything above `order` is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    denom: i64,
    coeffs: BTreeMap<i64, BigRational>,
    /// Truncation bound, as a numerator over `denom`.
    order: i64,
}

/// A numeric value together with an estimate of the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub error_bound: f64,
}

/// Safety factor applied to the first-omitted-term estimate.
const TAIL_SAFETY: f64 = 10.0;

impl PuiseuxSeries {
    /// Builds a series from `(exponent, coefficient)` pairs. Terms above
    /// `order` are dropped; zero coefficients are not stored.
    pub fn from_terms<I>(terms: I, order: Rational64) -> Self
    where
        I: IntoIterator<Item = (Rational64, BigRational)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let denom = terms.iter().fold(*order.denom(), |acc, (e, _)| acc.lcm(e.denom()));
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            let num = e.numer() * (denom / e.denom());
            let slot = coeffs.entry(num).or_insert_with(BigRational::zero);
            *slot += c;
        }
        let order_num = order.numer() * (denom / order.denom());
        coeffs.retain(|&e, c| e <= order_num && !c.is_zero());
        PuiseuxSeries {
            denom,
            coeffs,
            order: order_num,
        }
        .normalized()
    }

    /// The series known to be zero up to `order`.
    pub fn zero(order: Rational64) -> Self {
        Self::from_terms(std::iter::empty(), order)
    }

    pub fn one(order: Rational64) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: Rational64) -> Self {
        Self::from_terms([(Rational64::zero(), c)], order)
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn order(&self) -> Rational64 {
        Rational64::new(self.order, self.denom)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Known terms as `(exponent, coefficient)`, sorted by exponent.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &BigRational)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (Rational64::new(e, self.denom), c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `q^e`; `None` when `e` is beyond the truncation bound.
    pub fn coeff(&self, e: Rational64) -> Option<BigRational> {
        if e > self.order() {
            return None;
        }
        let scaled = e * self.denom;
        if !scaled.is_integer() {
            return Some(BigRational::zero());
        }
        Some(
            self.coeffs
                .get(&scaled.to_integer())
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// Leading exponent and coefficient, if any term is known to be nonzero.
    pub fn leading(&self) -> Option<(Rational64, &BigRational)> {
        self.coeffs
            .iter()
            .next()
            .map(|(&e, c)| (Rational64::new(e, self.denom), c))
    }

    /// Valuation as a numerator over `denom`; a series that is zero up to
    /// its order has valuation `order`.
    fn valuation_num(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.order)
    }

    /// Drops every term above `order`. Fails if `order` exceeds what is known.
    pub fn truncate(&self, order: Rational64) -> Result<Self> {
        if order > self.order() {
            return Err(Error::Domain(format!(
                "cannot truncate at {order}: series known only to {}",
                self.order()
            )));
        }
        Ok(Self::from_terms(self.terms().map(|(e, c)| (e, c.clone())), order))
    }

    fn lifted(&self, denom: i64) -> (BTreeMap<i64, BigRational>, i64) {
        debug_assert_eq!(denom % self.denom, 0);
        let f = denom / self.denom;
        (
            self.coeffs.iter().map(|(&e, c)| (e * f, c.clone())).collect(),
            self.order * f,
        )
    }

    fn normalized(mut self) -> Self {
        let g = self
            .coeffs
            .keys()
            .fold(self.denom.gcd(&self.order), |acc, e| acc.gcd(e));
        if g > 1 {
            self.denom /= g;
            self.order /= g;
            self.coeffs = std::mem::take(&mut self.coeffs)
                .into_iter()
                .map(|(e, c)| (e / g, c))
                .collect();
        }
        self
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let coeffs = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect()
        };
        PuiseuxSeries {
            denom: self.denom,
            coeffs,
            order: self.order,
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: Rational64) -> Self {
        let denom = self.denom.lcm(e.denom());
        let (coeffs, order) = self.lifted(denom);
        let s = e.numer() * (denom / e.denom());
        PuiseuxSeries {
            denom,
            coeffs: coeffs.into_iter().map(|(k, c)| (k + s, c)).collect(),
            order: order + s,
        }
        .normalized()
    }

    /// Multiplicative inverse. The leading coefficient must be known and
    /// nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let (&v, c0) = self
            .coeffs
            .iter()
            .next()
            .ok_or_else(|| Error::Domain("division by a series with zero leading term".into()))?;
        // self = c0 q^v (1 + u); invert (1 + u) by the usual recurrence on
        // the grid of step 1/denom, up to relative order (order - v).
        let span = self.order - v;
        let w: Vec<(i64, BigRational)> = self.coeffs.iter().skip(1).map(|(&e, c)| (e - v, c / c0)).collect();
        let mut r: Vec<BigRational> = Vec::with_capacity(span as usize + 1);
        r.push(BigRational::one());
        for n in 1..=span {
            let mut acc = BigRational::zero();
            for (k, wk) in &w {
                if *k > n {
                    break;
                }
                let rk = &r[(n - k) as usize];
                if !rk.is_zero() {
                    acc -= wk * rk;
                }
            }
            r.push(acc);
        }
        let inv_c0 = c0.recip();
        let coeffs = r
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as i64 - v, c * &inv_c0))
            .collect();
        Ok(PuiseuxSeries {
            denom: self.denom,
            coeffs,
            order: span - v,
        }
        .normalized())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Integer power; negative powers go through [`Self::inverse`].
    pub fn pow(&self, n: i32) -> Result<Self> {
        if n == 0 {
            return Ok(Self::one(self.order().max(Rational64::zero())));
        }
        let mut sq = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<Self> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => &a * &sq,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = &sq * &sq;
        }
        Ok(acc.expect("n != 0"))
    }

    /// Leading exponent, or the order for a series that is zero so far.
    pub fn valuation(&self) -> Rational64 {
        Rational64::new(self.valuation_num(), self.denom)
    }

    /// Substitutes `q -> q^a` for positive rational `a`.
    pub fn rescale(&self, a: Rational64) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::Domain(format!("rescale factor {a} is not positive")));
        }
        let (p, s) = (*a.numer(), *a.denom());
        Ok(PuiseuxSeries {
            denom: self.denom * s,
            coeffs: self.coeffs.iter().map(|(&e, c)| (e * p, c.clone())).collect(),
            order: self.order * p,
        }
        .normalized())
    }

    /// Sums the known terms at `q = e^{-2 pi y}`.
    pub fn eval(&self, y: f64) -> Result<Evaluation> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!("evaluation point y = {y} must be positive")));
        }
        let t = 2.0 * std::f64::consts::PI * y;
        let d = self.denom as f64;
        let value: f64 = self
            .coeffs
            .iter()
            .map(|(&e, c)| big_to_f64(c) * (-t * e as f64 / d).exp())
            .sum();
        // Estimate the first omitted term from the size of the coefficients
        // in the last unit interval below the bound.
        let tail_scale = self
            .coeffs
            .range((self.order - self.denom + 1)..)
            .map(|(_, c)| big_to_f64(c).abs())
            .fold(1.0f64, f64::max);
        let error_bound = TAIL_SAFETY * tail_scale * (-t * self.order as f64 / d).exp();
        Ok(Evaluation { value, error_bound })
    }

    /// Lines `e_num/e_den<TAB>c_num/c_den`, sorted by exponent.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (e, c) in self.terms() {
            out.push_str(&format!("{}/{}\t{}\n", e.numer(), e.denom(), format_big_fraction(c)));
        }
        out
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let (mut a, oa) = self.lifted(denom);
        let (b, ob) = other.lifted(denom);
        let order = oa.min(ob);
        for (e, c) in b {
            let slot = a.entry(e).or_insert_with(BigRational::zero);
            if sign < 0 {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        a.retain(|&e, c| e <= order && !c.is_zero());
        PuiseuxSeries {
            denom,
            coeffs: a,
            order,
        }
        .normalized()
    }
}

impl<'a> Add<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.combine(rhs, 1)
    }
}

impl<'a> Sub<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.combine(rhs, -1)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        self.scale(&-BigRational::one())
    }
}

impl<'a> Mul<&'a PuiseuxSeries> for &'a PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        let denom = self.denom.lcm(&rhs.denom);
        let (a, oa) = self.lifted(denom);
        let (b, ob) = rhs.lifted(denom);
        let va = a.keys().next().copied().unwrap_or(oa);
        let vb = b.keys().next().copied().unwrap_or(ob);
        let order = oa.saturating_add(vb).min(ob.saturating_add(va));
        let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (&ea, ca) in &a {
            for (&eb, cb) in &b {
                let e = ea + eb;
                if e > order {
                    break;
                }
                let slot = out.entry(e).or_insert_with(BigRational::zero);
                *slot += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        PuiseuxSeries {
            denom,
            coeffs: out,
            order,
        }
        .normalized()
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})q^({e})")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^({}))", self.order())
    }
}
