//! Homogeneous points, hyperplanes and the point/hyperplane duality of
//! real projective space, all over exact rationals.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{dot, format_scalar, serde_scalar_vec, Scalar};

/// Canonical representative of the projective class of `v`: integer
/// entries with gcd 1 and a positive first nonzero entry.
pub fn normalize(v: &[Scalar]) -> Result<Vec<Scalar>> {
    let lead = v.iter().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let negative = lead.is_negative();
    Ok(linalg::integer_row(v)
        .into_iter()
        .map(|x| Scalar::from_integer(if negative { -x } else { x }))
        .collect())
}

/// Covector `w` with `w . v_i = 0` for the k input vectors in (k+1)-space;
/// the zero covector when the inputs are dependent.
pub fn wedge_complement(vs: &[Vec<Scalar>]) -> Result<Vec<Scalar>> {
    let dim = vs.len() + 1;
    if let Some(bad) = vs.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    Ok(linalg::wedge(vs))
}

pub fn cross(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Point of RP^k. Equality is projective because coordinates are kept in
/// [`normalize`]d form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCoords", into = "RawCoords")]
pub struct PPoint {
    coords: Vec<Scalar>,
}

impl PPoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        Ok(Self {
            coords: normalize(&coords)?,
        })
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(crate::scalar::ints(v))
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Dimension k of the ambient RP^k.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dual(&self) -> Hyperplane {
        Hyperplane {
            covector: self.coords.clone(),
        }
    }
}

/// Hyperplane of RP^k given by its covector; also a point of the dual space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCoords", into = "RawCoords")]
pub struct Hyperplane {
    covector: Vec<Scalar>,
}

impl Hyperplane {
    pub fn new(covector: Vec<Scalar>) -> Result<Self> {
        Ok(Self {
            covector: normalize(&covector)?,
        })
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(crate::scalar::ints(v))
    }

    pub fn covector(&self) -> &[Scalar] {
        &self.covector
    }

    pub fn contains(&self, p: &PPoint) -> bool {
        self.pairing(p.coords()).is_zero()
    }

    pub fn pairing(&self, v: &[Scalar]) -> Scalar {
        dot(&self.covector, v)
    }

    pub fn dual(&self) -> PPoint {
        PPoint {
            coords: self.covector.clone(),
        }
    }
}

/// Line of RP^2, i.e. a point of the dual plane.
pub type PLine2 = Hyperplane;

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawCoords(#[serde(with = "serde_scalar_vec")] Vec<Scalar>);

impl TryFrom<RawCoords> for PPoint {
    type Error = Error;
    fn try_from(raw: RawCoords) -> Result<Self> {
        PPoint::new(raw.0)
    }
}

impl From<PPoint> for RawCoords {
    fn from(p: PPoint) -> Self {
        RawCoords(p.coords)
    }
}

impl TryFrom<RawCoords> for Hyperplane {
    type Error = Error;
    fn try_from(raw: RawCoords) -> Result<Self> {
        Hyperplane::new(raw.0)
    }
}

impl From<Hyperplane> for RawCoords {
    fn from(h: Hyperplane) -> Self {
        RawCoords(h.covector)
    }
}

fn write_coords(f: &mut fmt::Formatter<'_>, v: &[Scalar]) -> fmt::Result {
    let parts: Vec<String> = v.iter().map(format_scalar).collect();
    write!(f, "[{}]", parts.join(":"))
}

impl fmt::Display for PPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coords(f, &self.coords)
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coords(f, &self.covector)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperplaneFit {
    Unique(Hyperplane),
    NotUnique,
    NoneExists,
}

/// The hyperplane spanned by the given points of RP^k, when unique.
pub fn hyperplane_through(ps: &[PPoint]) -> Result<HyperplaneFit> {
    let first = ps
        .first()
        .ok_or_else(|| Error::InvalidInput("no points given".into()))?;
    let n = first.coords().len();
    if let Some(bad) = ps.iter().find(|p| p.coords().len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.coords().len(),
        });
    }
    let rows: Vec<Vec<Scalar>> = ps.iter().map(|p| p.coords().to_vec()).collect();
    hyperplane_of_rows(&rows)
}

pub(crate) fn hyperplane_of_rows(rows: &[Vec<Scalar>]) -> Result<HyperplaneFit> {
    let n = rows[0].len();
    let r = linalg::rank(rows);
    Ok(if r == n {
        HyperplaneFit::NoneExists
    } else if r < n - 1 {
        HyperplaneFit::NotUnique
    } else {
        let ns = linalg::nullspace(rows, n);
        HyperplaneFit::Unique(Hyperplane::new(ns.into_iter().next().expect("corank one"))?)
    })
}
