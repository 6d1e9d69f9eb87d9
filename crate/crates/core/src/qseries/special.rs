//! Dedekind eta and rank-one lattice theta series.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::series::PuiseuxSeries;
use crate::error::{Error, Result};

/// `q^{1/24} prod_{n=1}^{n_terms} (1 - q^n)`, exact through exponent
/// `1/24 + n_terms`.
pub fn eta_series(n_terms: u32) -> Result<PuiseuxSeries> {
    if n_terms == 0 {
        return Err(Error::Domain("eta_series needs at least one factor".into()));
    }
    let n = n_terms as usize;
    // Dense integer coefficients of the product, exponents 0..=n.
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for k in 1..=n {
        for e in (k..=n).rev() {
            let t = p[e - k].clone();
            p[e] -= t;
        }
    }
    let terms = p
        .into_iter()
        .enumerate()
        .map(|(e, c)| (Rational64::new(24 * e as i64 + 1, 24), BigRational::from_integer(c)));
    Ok(PuiseuxSeries::from_terms(terms, Rational64::new(24 * n as i64 + 1, 24)))
}

/// `sum_{|n| <= n_terms} q^{k (n + r/2k)^2}`.
///
/// The truncation bound is placed just below the smallest omitted exponent,
/// so every term up to the bound is present.
pub fn theta_rank1(k: u32, r: u32, n_terms: u32) -> Result<PuiseuxSeries> {
    if k == 0 || r >= 2 * k {
        return Err(Error::Domain(format!(
            "theta_rank1 needs k >= 1 and 0 <= r < 2k, got k={k}, r={r}"
        )));
    }
    let (k, r, n) = (k as i64, r as i64, n_terms as i64);
    // Exponent k(n + r/2k)^2 = m^2 / 4k with m = 2kn + r.
    let terms = (-n..=n).map(|j| {
        let m = 2 * k * j + r;
        (Rational64::new(m * m, 4 * k), BigRational::one())
    });
    let m0 = 2 * k * (n + 1) - r;
    let order = Rational64::new(m0 * m0 - 1, 4 * k);
    Ok(PuiseuxSeries::from_terms(terms, order))
}

/// Smallest `n_terms` for which [`theta_rank1`] is exact through `order`.
pub fn theta_terms_for_order(k: u32, r: u32, order: Rational64) -> u32 {
    let (kk, rr) = (k as i64, r as i64);
    let mut n: i64 = 0;
    loop {
        let m0 = 2 * kk * (n + 1) - rr;
        if Rational64::new(m0 * m0 - 1, 4 * kk) >= order {
            return n as u32;
        }
        n += 1;
    }
}
