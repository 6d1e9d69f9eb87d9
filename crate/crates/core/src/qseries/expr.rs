//! Closed-form characters built from eta and rank-one theta factors.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Roots;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::series::{Evaluation, PuiseuxSeries};
use super::special::{eta_series, theta_rank1, theta_terms_for_order};
use crate::error::{Error, Result};
use crate::rational::{r64_to_f64, to_big};

/// Building block of a character, evaluated at `scale * tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Base {
    /// `eta(scale * tau)`.
    Eta,
    /// `sum_{r in cosets} theta_{k,r}(scale * tau)` where
    /// `theta_{k,r}(tau) = sum_n q^{k (n + r/2k)^2}`. A single coset `[r]` is
    /// the coset theta; the full list `0..2k` is the dual-lattice theta.
    Theta { k: u32, cosets: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub base: Base,
    pub scale: Rational64,
    pub power: i32,
}

impl Factor {
    pub fn eta(scale: Rational64, power: i32) -> Self {
        Factor {
            base: Base::Eta,
            scale,
            power,
        }
    }

    pub fn theta(k: u32, r: u32, power: i32) -> Self {
        Factor {
            base: Base::Theta { k, cosets: vec![r] },
            scale: Rational64::one(),
            power,
        }
    }

    /// Theta function of the dual lattice `(1/2k) Z alpha`.
    pub fn theta_dual(k: u32, power: i32) -> Self {
        Factor {
            base: Base::Theta {
                k,
                cosets: (0..2 * k).collect(),
            },
            scale: Rational64::one(),
            power,
        }
    }

    /// Leading exponent of the base series in `q`.
    fn base_valuation(&self) -> Rational64 {
        match &self.base {
            Base::Eta => self.scale / 24,
            Base::Theta { k, cosets } => {
                let k = *k as i64;
                let m = cosets
                    .iter()
                    .map(|&r| (r as i64).min(2 * k - r as i64))
                    .min()
                    .unwrap_or(0);
                self.scale * Rational64::new(m * m, 4 * k)
            }
        }
    }

    fn base_series(&self, order: Rational64) -> Result<PuiseuxSeries> {
        match &self.base {
            Base::Eta => {
                let needed = order / self.scale - Rational64::new(1, 24);
                let n = needed.ceil().to_integer().max(1) as u32;
                eta_series(n)?.rescale(self.scale)
            }
            Base::Theta { k, cosets } => {
                let mut acc = PuiseuxSeries::zero(order / self.scale);
                for &r in cosets {
                    let n = theta_terms_for_order(*k, r, order / self.scale);
                    acc = &acc + &theta_rank1(*k, r, n)?;
                }
                acc.rescale(self.scale)
            }
        }
    }

    /// `ln` of the base at `tau = i y`, summed directly in floating point.
    fn base_ln(&self, y: f64) -> f64 {
        let t = r64_to_f64(&self.scale) * y;
        match &self.base {
            Base::Eta => {
                let u = 2.0 * PI * t;
                let n_max = (40.0 / u).ceil() as u64 + 1;
                let mut acc = -u / 24.0;
                for n in 1..=n_max {
                    acc += (-(-u * n as f64).exp_m1()).ln();
                }
                acc
            }
            Base::Theta { k, cosets } => {
                let k = *k as f64;
                let u = 2.0 * PI * t / (4.0 * k);
                let m_max = (45.0 / u).sqrt().ceil() as i64 + 1;
                let mut sum = 0.0;
                for &r in cosets {
                    let j_max = m_max / (2 * k as i64) + 1;
                    for j in -j_max..=j_max {
                        let m = (2.0 * k) * j as f64 + r as f64;
                        sum += (-u * m * m).exp();
                    }
                }
                sum.ln()
            }
        }
    }
}

/// `coef * sqrt(radicand) * (-i tau)^{tau_power} * prod factors`.
///
/// At `tau = i y` the factor `(-i tau)^{tau_power}` is `y^{tau_power}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterExpr {
    pub coef: Rational64,
    pub radicand: Rational64,
    pub tau_power: Rational64,
    pub factors: Vec<Factor>,
}

impl CharacterExpr {
    pub fn one() -> Self {
        CharacterExpr {
            coef: Rational64::one(),
            radicand: Rational64::one(),
            tau_power: Rational64::zero(),
            factors: Vec::new(),
        }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        CharacterExpr { factors, ..Self::one() }.simplified()
    }

    pub fn times(mut self, other: &CharacterExpr) -> Self {
        self.coef *= other.coef;
        self.radicand *= other.radicand;
        self.tau_power += other.tau_power;
        self.factors.extend(other.factors.iter().cloned());
        self.simplified()
    }

    pub fn recip(&self) -> Self {
        CharacterExpr {
            coef: self.coef.recip(),
            radicand: self.radicand.recip(),
            tau_power: -self.tau_power,
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    power: -f.power,
                    ..f.clone()
                })
                .collect(),
        }
        .simplified()
    }

    pub fn ratio(&self, den: &CharacterExpr) -> Self {
        self.clone().times(&den.recip())
    }

    pub fn pow(&self, n: i32) -> Self {
        let mut acc = Self::one();
        let base = if n < 0 { self.recip() } else { self.clone() };
        for _ in 0..n.unsigned_abs() {
            acc = acc.times(&base);
        }
        acc
    }

    /// Substitutes `tau -> a tau`.
    pub fn substitute(&self, a: Rational64) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::Domain(format!("substitution factor {a} is not positive")));
        }
        // (-i a tau)^p = a^p (-i tau)^p; p is always a multiple of 1/2 here.
        let two_p = self.tau_power * 2;
        if !two_p.is_integer() {
            return Err(Error::Unsupported(format!(
                "tau power {} is not a half-integer",
                self.tau_power
            )));
        }
        let mut out = self.clone();
        out.radicand *= pow_rational(a, two_p.to_integer());
        for f in &mut out.factors {
            f.scale *= a;
        }
        Ok(out.simplified())
    }

    /// Value of the constant `coef * sqrt(radicand)`.
    pub fn constant(&self) -> f64 {
        r64_to_f64(&self.coef) * r64_to_f64(&self.radicand).sqrt()
    }

    /// The behaviour under `tau -> -1/tau`.
    ///
    /// Uses `eta(-1/tau) = (-i tau)^{1/2} eta(tau)` and
    /// `theta_L(-1/tau) = (2k)^{-1/2} (-i tau)^{1/2} theta_{L°}(tau)`, the
    /// latter also read backwards for the dual-lattice theta. Coset thetas
    /// with a single nonzero `r` would map to linear combinations and are
    /// rejected.
    pub fn s_transform(&self) -> Result<Self> {
        let mut out = CharacterExpr {
            coef: self.coef,
            radicand: self.radicand,
            tau_power: -self.tau_power,
            factors: Vec::with_capacity(self.factors.len()),
        };
        for f in &self.factors {
            let s = f.scale;
            let (base, multiplier) = match &f.base {
                Base::Eta => (Base::Eta, s.recip()),
                Base::Theta { k, cosets } => {
                    let two_k = Rational64::from_integer(2 * *k as i64);
                    if cosets.as_slice() == [0] {
                        (
                            Base::Theta {
                                k: *k,
                                cosets: (0..2 * k).collect(),
                            },
                            (two_k * s).recip(),
                        )
                    } else if cosets.len() == 2 * *k as usize
                        && cosets.iter().enumerate().all(|(i, &r)| r as usize == i)
                    {
                        (Base::Theta { k: *k, cosets: vec![0] }, two_k / s)
                    } else {
                        return Err(Error::Unsupported(format!(
                            "S-transform of theta coset sum {cosets:?} for k={k}"
                        )));
                    }
                }
            };
            out.radicand *= pow_rational(multiplier, f.power as i64);
            out.tau_power += Rational64::new(f.power as i64, 2);
            out.factors.push(Factor {
                base,
                scale: s.recip(),
                power: f.power,
            });
        }
        Ok(out.simplified())
    }

    /// Leading exponent of the q-series part.
    pub fn leading_exponent(&self) -> Rational64 {
        self.factors
            .iter()
            .map(|f| f.base_valuation() * f.power as i64)
            .fold(Rational64::zero(), |a, b| a + b)
    }

    /// `coef * prod factors` as a q-series, exact through `order`.
    pub fn series(&self, order: Rational64) -> Result<PuiseuxSeries> {
        let total_v = self.leading_exponent();
        let mut acc: Option<PuiseuxSeries> = None;
        for f in &self.factors {
            let v = f.base_valuation();
            let needed = (order - total_v + v).max(v) + 1;
            let part = f.base_series(needed)?.pow(f.power)?;
            acc = Some(match acc {
                None => part,
                Some(a) => &a * &part,
            });
        }
        let s = acc.unwrap_or_else(|| PuiseuxSeries::one(order));
        s.truncate(order).map(|s| s.scale(&to_big(&self.coef)))
    }

    /// Evaluates at `tau = i y` by summing the series through `order`.
    pub fn eval(&self, y: f64, order: Rational64) -> Result<Evaluation> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("evaluation point y = {y} must be positive")));
        }
        let e = self.series(order)?.eval(y)?;
        let pre = r64_to_f64(&self.radicand).sqrt() * y.powf(r64_to_f64(&self.tau_power));
        Ok(Evaluation {
            value: e.value * pre,
            error_bound: e.error_bound * pre,
        })
    }

    /// `ln` of the value at `tau = i y` from the product and lattice-sum
    /// formulas directly, without going through series. Works for very small
    /// `y` where truncated series are useless.
    pub fn ln_eval_direct(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("evaluation point y = {y} must be positive")));
        }
        if !self.coef.is_positive() {
            return Err(Error::Domain("logarithm of a non-positive prefactor".into()));
        }
        let mut acc =
            r64_to_f64(&self.coef).ln() + 0.5 * r64_to_f64(&self.radicand).ln() + r64_to_f64(&self.tau_power) * y.ln();
        for f in &self.factors {
            acc += f.power as f64 * f.base_ln(y);
        }
        Ok(acc)
    }

    pub fn eval_direct(&self, y: f64) -> Result<f64> {
        Ok(self.ln_eval_direct(y)?.exp())
    }

    /// Merges equal factors, drops zero powers, pulls square factors out of
    /// the radicand.
    fn simplified(mut self) -> Self {
        let mut merged: Vec<Factor> = Vec::new();
        for f in self.factors.drain(..) {
            if let Some(g) = merged.iter_mut().find(|g| g.base == f.base && g.scale == f.scale) {
                g.power += f.power;
            } else {
                merged.push(f);
            }
        }
        merged.retain(|f| f.power != 0);
        self.factors = merged;

        let (n, d) = (*self.radicand.numer(), *self.radicand.denom());
        let (sn, rn) = split_square(n);
        let (sd, rd) = split_square(d);
        self.coef *= Rational64::new(sn, sd);
        self.radicand = Rational64::new(rn, rd);
        self
    }
}

/// `n = s^2 * r` with `r` square-free-ish (largest square divisor pulled out).
fn split_square(n: i64) -> (i64, i64) {
    let mut s = 1;
    let mut r = n;
    let mut p = 2;
    while p * p <= r {
        while r % (p * p) == 0 {
            r /= p * p;
            s *= p;
        }
        p += 1;
    }
    if r > 1 {
        let t = r.sqrt();
        if t * t == r {
            return (s * t, 1);
        }
    }
    (s, r)
}

fn pow_rational(a: Rational64, n: i64) -> Rational64 {
    let base = if n < 0 { a.recip() } else { a };
    (0..n.unsigned_abs()).fold(Rational64::one(), |acc, _| acc * base)
}

/// `1/eta(tau)^d`.
pub fn char_heisenberg(d: u32) -> CharacterExpr {
    CharacterExpr::from_factors(vec![Factor::eta(Rational64::one(), -(d as i32))])
}

/// `eta(tau)^d / eta(tau/2)^d`.
pub fn char_heisenberg_twisted(d: u32) -> CharacterExpr {
    CharacterExpr::from_factors(vec![
        Factor::eta(Rational64::one(), d as i32),
        Factor::eta(Rational64::new(1, 2), -(d as i32)),
    ])
}

/// `theta_{k,r}(tau) / eta(tau)`.
pub fn char_lattice(k: u32, r: u32) -> Result<CharacterExpr> {
    if k == 0 || r >= 2 * k {
        return Err(Error::Domain(format!(
            "lattice character needs k >= 1, 0 <= r < 2k; got k={k}, r={r}"
        )));
    }
    Ok(CharacterExpr::from_factors(vec![
        Factor::theta(k, r, 1),
        Factor::eta(Rational64::one(), -1),
    ]))
}

/// Character of either theta-twisted module: `eta(tau) / eta(tau/2)`.
pub fn char_lattice_twisted(k: u32) -> Result<CharacterExpr> {
    if k == 0 {
        return Err(Error::Domain("lattice character needs k >= 1".into()));
    }
    Ok(char_heisenberg_twisted(1))
}

/// `chi(tau / k)`: character of the permutation-twisted module.
pub fn permutation_twist_char(expr: &CharacterExpr, k: u32) -> Result<CharacterExpr> {
    if k == 0 {
        return Err(Error::Domain("cycle length must be positive".into()));
    }
    expr.substitute(Rational64::new(1, k as i64))
}

impl fmt::Display for CharacterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coef)?;
        if self.radicand != Rational64::one() {
            write!(f, "*sqrt({})", self.radicand)?;
        }
        if !self.tau_power.is_zero() {
            write!(f, "*(-i tau)^({})", self.tau_power)?;
        }
        for fac in &self.factors {
            match &fac.base {
                Base::Eta => write!(f, "*eta({} tau)^{}", fac.scale, fac.power)?,
                Base::Theta { k, cosets } => write!(f, "*theta[k={k},r={cosets:?}]({} tau)^{}", fac.scale, fac.power)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    const ORDER: i64 = 100;

    #[test]
    fn leading_exponents() {
        assert_eq!(char_heisenberg(1).leading_exponent(), r(-1, 24));
        assert_eq!(char_heisenberg_twisted(1).leading_exponent(), r(1, 48));
        assert_eq!(char_lattice(1, 0).unwrap().leading_exponent(), r(-1, 24));
        assert_eq!(char_lattice_twisted(3).unwrap().leading_exponent(), r(1, 48));
        assert_eq!(char_lattice(2, 1).unwrap().leading_exponent(), r(1, 12));
        let s = char_lattice(2, 1).unwrap().series(r(5, 1)).unwrap();
        assert_eq!(s.leading().unwrap().0, r(1, 12));
    }

    #[test]
    fn heisenberg_twisted_square() {
        let one = char_heisenberg_twisted(1);
        let two = char_heisenberg_twisted(2);
        assert_eq!(one.pow(2), two);
        let a = one.series(r(20, 1)).unwrap();
        let b = two.series(r(20, 1)).unwrap();
        assert_eq!((&a * &a).truncate(r(20, 1)).unwrap(), b);
    }

    #[test]
    fn eta_law() {
        let eta = CharacterExpr::from_factors(vec![Factor::eta(r(1, 1), 1)]);
        let t = eta.s_transform().unwrap();
        assert_eq!(t.tau_power, r(1, 2));
        assert_eq!(t.factors, vec![Factor::eta(r(1, 1), 1)]);
        assert_eq!(t.constant(), 1.0);
        let inv = CharacterExpr::from_factors(vec![Factor::eta(r(1, 1), -1)]);
        assert_eq!(inv.s_transform().unwrap().tau_power, r(-1, 2));
    }

    #[test]
    fn eta_transform_numerically() {
        let eta = CharacterExpr::from_factors(vec![Factor::eta(r(1, 1), 1)]);
        let t = eta.s_transform().unwrap();
        let y = 0.7;
        let lhs = t.eval(y, r(ORDER, 1)).unwrap().value;
        let rhs = eta.eval(1.0 / y, r(ORDER, 1)).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn lattice_vacuum_transform_structure() {
        let chi = char_lattice(1, 0).unwrap();
        let t = chi.s_transform().unwrap();
        assert_eq!(t.tau_power, r(0, 1));
        assert!((t.constant() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(t.factors.contains(&Factor::theta_dual(1, 1)));
        let y = 0.8;
        let lhs = t.eval(y, r(ORDER, 1)).unwrap().value;
        let rhs = chi.eval(1.0 / y, r(ORDER, 1)).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn transform_is_involutive_on_supported_factors() {
        let chi = char_lattice(3, 0).unwrap().ratio(&char_heisenberg_twisted(2));
        assert_eq!(chi.s_transform().unwrap().s_transform().unwrap(), chi);
    }

    #[test]
    fn coset_theta_is_rejected() {
        assert!(matches!(
            char_lattice(2, 1).unwrap().s_transform(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn theta_value_at_one() {
        // 1 + 2e^{-2pi} + 2e^{-8pi} + 2e^{-18pi}
        let th = CharacterExpr::from_factors(vec![Factor::theta(1, 0, 1)]);
        let oracle: f64 = 1.0
            + (1..=5)
                .map(|n: i32| 2.0 * (-2.0 * PI * (n * n) as f64).exp())
                .sum::<f64>();
        let v = th.eval(1.0, r(ORDER, 1)).unwrap().value;
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 1.003735).abs() < 1e-6);
    }

    #[test]
    fn direct_and_series_evaluation_agree() {
        let exprs = [
            char_heisenberg(1),
            char_heisenberg_twisted(2),
            char_lattice(2, 1).unwrap(),
            char_lattice(3, 0).unwrap().s_transform().unwrap(),
        ];
        for e in &exprs {
            for y in [0.3, 0.9, 2.0] {
                let a = e.eval(y, r(ORDER, 1)).unwrap().value;
                let b = e.eval_direct(y).unwrap();
                assert!(((a - b) / b).abs() < 1e-11, "{e}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn permutation_twist() {
        let chi = char_heisenberg(1);
        assert_eq!(permutation_twist_char(&chi, 1).unwrap(), chi);
        let tw = permutation_twist_char(&chi, 2).unwrap();
        assert_eq!(tw.leading_exponent(), r(-1, 48));
        for y in [0.4, 1.0] {
            let a = tw.eval_direct(y).unwrap();
            let b = chi.eval_direct(y / 2.0).unwrap();
            assert!(((a - b) / b).abs() < 1e-12);
        }
    }

    #[test]
    fn split_square_extracts_squares() {
        assert_eq!(split_square(8), (2, 2));
        assert_eq!(split_square(9), (3, 1));
        assert_eq!(split_square(1), (1, 1));
        assert_eq!(split_square(12), (2, 3));
    }
}
