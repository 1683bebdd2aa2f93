//! Seeded random rational maps with small integer coefficients.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::poly::{monomials, reduce_map, HPoly, RatMap};
use crate::scalar::{random_int, rng_for};

/// Degree and target dimension of generated maps, written
/// `quadratic-rp3` and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapKind {
    pub degree: u32,
    pub target_dim: usize,
}

impl FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown map kind {s:?}"));
        let (deg, target) = s.split_once("-rp").ok_or_else(bad)?;
        let degree = match deg {
            "linear" => 1,
            "quadratic" => 2,
            "cubic" => 3,
            _ => return Err(bad()),
        };
        let target_dim: usize = target.parse().map_err(|_| bad())?;
        if !(2..=5).contains(&target_dim) {
            return Err(bad());
        }
        Ok(Self { degree, target_dim })
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = ["", "linear", "quadratic", "cubic"][self.degree as usize];
        write!(f, "{deg}-rp{}", self.target_dim)
    }
}

/// Coefficient range of generated maps.
pub const COEFF_BOUND: i64 = 9;

/// Random map RP^2 -> RP^n of the requested degree with integer
/// coefficients in `[-9, 9]`, redrawn until reduction keeps the degree.
pub fn generate(kind: MapKind, seed: u64) -> RatMap {
    let mut rng = rng_for(seed, "gen", 0);
    let mons = monomials(3, kind.degree);
    loop {
        let comps: Vec<HPoly> = (0..=kind.target_dim)
            .map(|_| {
                let mut p = MPoly::zero(3);
                for e in &mons {
                    p.add_term(e.clone(), random_int(&mut rng, -COEFF_BOUND, COEFF_BOUND));
                }
                if p.is_zero() {
                    HPoly::zero(3, kind.degree)
                } else {
                    HPoly::new(kind.degree, p).expect("homogeneous")
                }
            })
            .collect();
        if let Ok(m) = reduce_map(comps) {
            if m.degree() == kind.degree {
                return m;
            }
        }
    }
}
