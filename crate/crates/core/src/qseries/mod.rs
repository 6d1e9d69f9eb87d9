//! Truncated q-series, eta/theta characters and character limits.

mod expr;
mod limit;
mod series;
mod special;

pub use expr::{
    char_heisenberg, char_heisenberg_twisted, char_lattice, char_lattice_twisted, permutation_twist_char, Base,
    CharacterExpr, Factor,
};
pub use limit::{qdim_limit, LimitOptions, QdimLimit, Strategy};
pub use series::{Evaluation, PuiseuxSeries};
pub use special::{eta_series, theta_rank1};

use crate::error::{Error, Result};

/// Default truncation bound for character expansions.
pub const DEFAULT_ORDER: i64 = 100;

/// Parses character names used on the command line: `heisenberg(d)`,
/// `heisenberg_twisted(d)`, `lattice(k,r)`, `lattice_twisted(k)`.
pub fn parse_character(name: &str) -> Result<CharacterExpr> {
    let name = name.trim();
    let bad = || Error::Domain(format!("unknown character {name:?}"));
    let (head, rest) = name.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let args: Vec<u32> = args
        .split(',')
        .map(|a| a.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match (head.trim(), args.as_slice()) {
        ("heisenberg", [d]) if *d >= 1 => Ok(char_heisenberg(*d)),
        ("heisenberg_twisted", [d]) if *d >= 1 => Ok(char_heisenberg_twisted(*d)),
        ("lattice", [k, r]) => char_lattice(*k, *r),
        ("lattice_twisted", [k]) => char_lattice_twisted(*k),
        _ => Err(bad()),
    }
}
