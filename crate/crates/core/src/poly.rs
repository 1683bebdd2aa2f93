//! Homogeneous polynomials and rational maps between projective spaces:
//! evaluation, restriction to lines, common-factor reduction, image spans,
//! implicitization and fiber counting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mpoly::{Exponent, MPoly};
use crate::projcore::{PLine2, PPoint};
use crate::scalar::{format_scalar, random_int, rng_for, serde_scalar, Scalar};
use crate::upoly::UPoly;

/// All exponent vectors of `nvars` entries summing to `degree`, in
/// descending lexicographic order.
pub fn monomials(nvars: usize, degree: u32) -> Vec<Exponent> {
    fn rec(nvars: usize, degree: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == nvars {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=degree).rev() {
            prefix.push(k);
            rec(nvars, degree - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Homogeneous polynomial of a fixed degree in a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HPolyJson", into = "HPolyJson")]
pub struct HPoly {
    degree: u32,
    poly: MPoly,
}

impl HPoly {
    pub fn new(degree: u32, poly: MPoly) -> Result<Self> {
        if let Some(e) = poly.terms().keys().find(|e| e.iter().sum::<u32>() != degree) {
            return Err(Error::InvalidInput(format!(
                "term {e:?} does not have degree {degree}"
            )));
        }
        Ok(Self { degree, poly })
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self {
            degree,
            poly: MPoly::zero(nvars),
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self {
            degree: 1,
            poly: MPoly::var(nvars, i),
        }
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let poly = MPoly::from_terms(
            n,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, c.clone())
            }),
        );
        Self { degree: 1, poly }
    }

    /// Panics unless every term has total degree `degree`.
    pub fn from_int_terms(nvars: usize, degree: u32, terms: &[(i64, &[u32])]) -> Self {
        Self::new(degree, MPoly::from_int_terms(nvars, terms)).expect("homogeneous terms")
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        self.poly.eval(x)
    }

    pub fn mul(&self, other: &HPoly) -> HPoly {
        HPoly {
            degree: self.degree + other.degree,
            poly: &self.poly * &other.poly,
        }
    }

    pub fn add(&self, other: &HPoly) -> HPoly {
        assert!(
            self.is_zero() || other.is_zero() || self.degree == other.degree,
            "adding forms of different degree"
        );
        HPoly {
            degree: if self.is_zero() { other.degree } else { self.degree },
            poly: &self.poly + &other.poly,
        }
    }

    pub fn sub(&self, other: &HPoly) -> HPoly {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> HPoly {
        HPoly {
            degree: self.degree,
            poly: self.poly.scale(c),
        }
    }

    /// Substitutes the forms `subs` (all of one degree) for the variables.
    pub fn compose(&self, subs: &[HPoly]) -> HPoly {
        let e = subs.first().map_or(0, |s| s.degree);
        debug_assert!(subs.iter().all(|s| s.degree == e || s.is_zero()));
        let polys: Vec<MPoly> = subs.iter().map(|s| s.poly.clone()).collect();
        HPoly {
            degree: self.degree * e,
            poly: self.poly.compose(&polys),
        }
    }

    /// Coefficients on the given monomial basis.
    pub fn coefficients(&self, basis: &[Exponent]) -> Vec<Scalar> {
        basis
            .iter()
            .map(|e| self.poly.terms().get(e).cloned().unwrap_or_else(Scalar::zero))
            .collect()
    }

    pub fn exact_div(&self, d: &HPoly) -> Option<HPoly> {
        let q = self.poly.exact_div(&d.poly)?;
        Some(HPoly {
            degree: self.degree - d.degree,
            poly: q,
        })
    }

    /// Greatest common divisor. The x0-free parts are compared after
    /// setting x0 = 1, which keeps the subresultant sequence one variable
    /// shorter.
    pub fn gcd(&self, other: &HPoly) -> HPoly {
        let n = self.nvars().max(other.nvars());
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let x0_power = |p: &HPoly| p.poly.monomial_content()[0];
        let e = x0_power(self).min(x0_power(other));
        let g = self.poly.dehomogenize(0).gcd(&other.poly.dehomogenize(0));
        let dg = g.total_degree().unwrap_or(0);
        let mut x0e = vec![0; n];
        x0e[0] = e;
        let poly = &g.homogenize(0, dg) * &MPoly::monomial(x0e, Scalar::one());
        HPoly {
            degree: dg + e,
            poly: poly.primitive(),
        }
    }

    pub fn primitive(&self) -> HPoly {
        HPoly {
            degree: self.degree,
            poly: self.poly.primitive(),
        }
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.poly.terms().iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|&(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                .collect();
            let body = if mono.is_empty() {
                format_scalar(&mag)
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", format_scalar(&mag), mono.join("*"))
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    #[serde(with = "serde_scalar")]
    coef: Scalar,
}

#[derive(Serialize, Deserialize)]
struct HPolyJson {
    nvars: usize,
    degree: u32,
    terms: Vec<TermJson>,
}

impl TryFrom<HPolyJson> for HPoly {
    type Error = Error;
    fn try_from(j: HPolyJson) -> Result<Self> {
        let mut poly = MPoly::zero(j.nvars);
        for t in j.terms {
            if t.exp.len() != j.nvars {
                return Err(Error::DimensionMismatch {
                    expected: j.nvars,
                    found: t.exp.len(),
                });
            }
            poly.add_term(t.exp, t.coef);
        }
        HPoly::new(j.degree, poly)
    }
}

impl From<HPoly> for HPolyJson {
    fn from(p: HPoly) -> Self {
        HPolyJson {
            nvars: p.nvars(),
            degree: p.degree,
            terms: p
                .poly
                .terms()
                .iter()
                .rev()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
    }
}

/// Rational map between projective spaces: a tuple of forms of one degree
/// without a common factor, up to a common scalar. Stored canonically, so
/// `==` is projective equality of maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RatMapJson", into = "RatMapJson")]
pub struct RatMap {
    components: Vec<HPoly>,
}

#[derive(Serialize, Deserialize)]
struct RatMapJson {
    components: Vec<HPoly>,
}

impl TryFrom<RatMapJson> for RatMap {
    type Error = Error;
    fn try_from(j: RatMapJson) -> Result<Self> {
        reduce_map(j.components)
    }
}

impl From<RatMap> for RatMapJson {
    fn from(m: RatMap) -> Self {
        RatMapJson {
            components: m.components,
        }
    }
}

impl RatMap {
    pub fn components(&self) -> &[HPoly] {
        &self.components
    }

    pub fn domain_vars(&self) -> usize {
        self.components[0].nvars()
    }

    /// n for a map into RP^n.
    pub fn target_dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.components[0].degree()
    }

    /// Component values, or `None` at an indeterminacy point.
    pub fn eval(&self, x: &[Scalar]) -> Option<Vec<Scalar>> {
        let v: Vec<Scalar> = self.components.iter().map(|c| c.eval(x)).collect();
        if v.iter().all(Zero::is_zero) {
            None
        } else {
            Some(v)
        }
    }

    pub fn eval_point(&self, x: &[Scalar]) -> Result<PPoint> {
        PPoint::new(self.eval(x).ok_or(Error::OnIndeterminacy)?)
    }

    /// `self` after `inner`, reduced.
    pub fn compose(&self, inner: &RatMap) -> Result<RatMap> {
        if self.domain_vars() != inner.components.len() {
            return Err(Error::DimensionMismatch {
                expected: self.domain_vars(),
                found: inner.components.len(),
            });
        }
        reduce_map(
            self.components
                .iter()
                .map(|c| c.compose(&inner.components))
                .collect(),
        )
    }

    /// Rows of component coefficients on the monomial basis.
    pub fn coefficient_matrix(&self) -> Vec<Vec<Scalar>> {
        let basis = monomials(self.domain_vars(), self.degree());
        self.components.iter().map(|c| c.coefficients(&basis)).collect()
    }

    /// Basis of the vectors `h` with `sum h_i F_i = 0` identically.
    pub fn linear_relations(&self) -> Vec<Vec<Scalar>> {
        let m = self.coefficient_matrix();
        let cols = m[0].len();
        let transposed: Vec<Vec<Scalar>> = (0..cols)
            .map(|j| m.iter().map(|row| row[j].clone()).collect())
            .collect();
        linalg::nullspace(&transposed, self.components.len())
    }

    /// The projective transformation with matrix `rows` (target i gets
    /// `sum_j rows[i][j] x_j`).
    pub fn linear(rows: &[Vec<Scalar>]) -> Result<RatMap> {
        reduce_map(rows.iter().map(|r| HPoly::linear(r)).collect())
    }

    /// Matrix of a degree-one map.
    pub fn matrix(&self) -> Option<Vec<Vec<Scalar>>> {
        if self.degree() != 1 {
            return None;
        }
        let n = self.domain_vars();
        let basis: Vec<Exponent> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        Some(self.components.iter().map(|c| c.coefficients(&basis)).collect())
    }
}

impl fmt::Display for RatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(" : "))
    }
}

/// Divides out the common factor of the components and scales them to a
/// canonical integer representative.
pub fn reduce_map(components: Vec<HPoly>) -> Result<RatMap> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidInput("map without components".into()))?;
    let (nvars, degree) = (first.nvars(), first.degree());
    for c in &components {
        if c.nvars() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: c.nvars(),
            });
        }
        if c.degree() != degree && !c.is_zero() {
            return Err(Error::InvalidInput("components of different degree".into()));
        }
    }
    if components.iter().all(HPoly::is_zero) {
        return Err(Error::AllZero);
    }
    let mut g: Option<HPoly> = None;
    for c in components.iter().filter(|c| !c.is_zero()) {
        g = Some(match g {
            None => c.primitive(),
            Some(g) => g.gcd(c),
        });
        if g.as_ref().is_some_and(|g| g.degree() == 0) {
            break;
        }
    }
    let g = g.expect("some component is nonzero");
    let new_degree = degree - g.degree();
    let reduced: Vec<HPoly> = components
        .iter()
        .map(|c| {
            if c.is_zero() {
                HPoly::zero(nvars, new_degree)
            } else {
                c.exact_div(&g).expect("gcd divides every component")
            }
        })
        .collect();
    Ok(RatMap {
        components: canonical_scale(reduced),
    })
}

fn canonical_scale(cs: Vec<HPoly>) -> Vec<HPoly> {
    let coeffs = cs.iter().flat_map(|c| c.poly().terms().values());
    let lcm = coeffs.clone().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let g = coeffs.fold(BigInt::zero(), |acc, x| acc.gcd(&(x.numer() * (&lcm / x.denom()))));
    let lead_negative = cs
        .iter()
        .find(|c| !c.is_zero())
        .and_then(|c| c.poly().leading())
        .is_some_and(|(_, x)| x.is_negative());
    let mut factor = Scalar::new(lcm, g);
    if lead_negative {
        factor = -factor;
    }
    cs.iter().map(|c| c.scale(&factor)).collect()
}

/// Restriction of a map to a line of RP^1 in coordinates `[u0:u1]`:
/// `sum_m u0^(d-m) u1^m A_m` with coefficient vectors `A_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniTuple {
    degree: u32,
    coeffs: Vec<Vec<Scalar>>,
}

impl UniTuple {
    /// `coeffs[m]` is the vector `A_m`.
    pub fn new(coeffs: Vec<Vec<Scalar>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput("empty tuple".into()))?;
        let n = first.len();
        if let Some(bad) = coeffs.iter().find(|a| a.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self {
            degree: (coeffs.len() - 1) as u32,
            coeffs,
        })
    }

    pub fn from_components(components: &[HPoly]) -> Self {
        let d = components[0].degree();
        let coeffs = (0..=d)
            .map(|m| {
                let e = vec![d - m, m];
                components
                    .iter()
                    .map(|c| c.poly().terms().get(&e).cloned().unwrap_or_else(Scalar::zero))
                    .collect()
            })
            .collect();
        Self { degree: d, coeffs }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Vec<Scalar>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.iter().all(Zero::is_zero))
    }

    pub fn eval(&self, u0: &Scalar, u1: &Scalar) -> Vec<Scalar> {
        let d = self.degree as usize;
        let n = self.coeffs[0].len();
        let mut out = vec![Scalar::zero(); n];
        for (m, a) in self.coeffs.iter().enumerate() {
            let w = num_traits::pow(u0.clone(), d - m) * num_traits::pow(u1.clone(), m);
            for (o, x) in out.iter_mut().zip(a) {
                *o += &w * x;
            }
        }
        out
    }
}

/// Two points spanning `L`: the basis points of the coordinates other than
/// the largest index `k` with a nonzero entry, projected onto `L` along `e_k`.
pub fn line_parameterization(l: &PLine2) -> (Vec<Scalar>, Vec<Scalar>) {
    let c = l.covector();
    let k = (0..3).rev().find(|&i| !c[i].is_zero()).expect("nonzero line");
    let mut others = (0..3).filter(|&i| i != k);
    let (i, j) = (others.next().expect("two"), others.next().expect("two"));
    let project = |b: usize| {
        let mut p = vec![Scalar::zero(); 3];
        p[b] = Scalar::one();
        p[k] = -&c[b] / &c[k];
        p
    };
    (project(i), project(j))
}

pub fn restrict_to_line(f: &RatMap, l: &PLine2) -> Result<UniTuple> {
    if f.domain_vars() != 3 || l.covector().len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: f.domain_vars(),
        });
    }
    let (p, q) = line_parameterization(l);
    let subs: Vec<HPoly> = (0..3)
        .map(|i| HPoly::linear(&[p[i].clone(), q[i].clone()]))
        .collect();
    let comps: Vec<HPoly> = f.components().iter().map(|c| c.compose(&subs)).collect();
    let t = UniTuple::from_components(&comps);
    if t.is_zero() {
        return Err(Error::OnIndeterminacy);
    }
    Ok(t)
}

/// Rank of the coefficient vectors `A_0..A_d`.
pub fn span_dim(t: &UniTuple) -> usize {
    linalg::rank(&t.coeffs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implicitization {
    pub degree: u32,
    /// Form in the target coordinates vanishing on the image.
    pub relation: HPoly,
}

/// Lowest-degree form in the target coordinates that vanishes identically
/// after composition with `f`, searching degrees `1..=kmax`.
pub fn implicitize(f: &RatMap, kmax: u32) -> Option<Implicitization> {
    let m = f.components().len();
    for k in 1..=kmax {
        let targets = monomials(m, k);
        let composed: Vec<HPoly> = targets
            .iter()
            .map(|e| {
                let mono = HPoly::new(k, MPoly::monomial(e.clone(), Scalar::one())).expect("monomial");
                mono.compose(f.components())
            })
            .collect();
        let rows_basis = monomials(f.domain_vars(), k * f.degree());
        // one row per source monomial, one column per target monomial
        let cols: Vec<Vec<Scalar>> = composed.iter().map(|p| p.coefficients(&rows_basis)).collect();
        let rows: Vec<Vec<Scalar>> = (0..rows_basis.len())
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let ns = linalg::nullspace(&rows, targets.len());
        if let Some(v) = ns.into_iter().next() {
            let poly = MPoly::from_terms(m, targets.into_iter().zip(v));
            let relation = HPoly::new(k, poly).expect("homogeneous").primitive();
            return Some(Implicitization {
                degree: k,
                relation,
            });
        }
    }
    None
}

/// Resultant in variable `t` of two polynomials in `(s, t)` (variables 1
/// and 2 of a three-variable ring), as a polynomial in `s`. Uses the
/// formal total degrees, evaluating the Sylvester determinant at
/// `deg_a * deg_b + 1` nodes and interpolating.
fn resultant_t(a: &MPoly, b: &MPoly, da: usize, db: usize) -> UPoly {
    let ca = a.as_univariate(2);
    let cb = b.as_univariate(2);
    let coeff_at = |cs: &[MPoly], k: usize, s: &Scalar| -> Scalar {
        cs.get(k).map_or_else(Scalar::zero, |c| c.eval(&[Scalar::zero(), s.clone(), Scalar::zero()]))
    };
    let size = da + db;
    let nodes = da * db + 1;
    let points: Vec<(Scalar, Scalar)> = (0..nodes)
        .map(|i| {
            let s = Scalar::from_integer(BigInt::from(i));
            let mut syl = vec![vec![Scalar::zero(); size]; size];
            for r in 0..db {
                for k in 0..=da {
                    syl[r][r + k] = coeff_at(&ca, da - k, &s);
                }
            }
            for r in 0..da {
                for k in 0..=db {
                    syl[db + r][r + k] = coeff_at(&cb, db - k, &s);
                }
            }
            (s, linalg::det_exact(&syl))
        })
        .collect();
    UPoly::interpolate(&points)
}

/// s-projections (as a squarefree polynomial) of the common zeros of the
/// forms `eqs` after the coordinate change `change`, in the chart x'0 = 1.
fn projected_common_zeros<R: Rng>(eqs: &[HPoly], change: &[HPoly], rng: &mut R) -> Option<UPoly> {
    let d = eqs[0].degree() as usize;
    let moved: Vec<MPoly> = eqs
        .iter()
        .map(|e| e.compose(change).poly().dehomogenize(0))
        .collect();
    let mut combo = || {
        moved.iter().fold(MPoly::zero(3), |acc, p| {
            &acc + &p.scale(&random_int(rng, -50, 50))
        })
    };
    let (g1, g2, g3) = (combo(), combo(), combo());
    let r1 = resultant_t(&g1, &g2, d, d);
    let r2 = resultant_t(&g1, &g3, d, d);
    if r1.is_zero() || r2.is_zero() {
        return None;
    }
    Some(r1.gcd(&r2).squarefree())
}

/// Number of distinct points of CP^2 (indeterminacy points excluded) that
/// `f` sends to `y`, by resultant elimination in a random chart.
pub fn fiber_count(f: &RatMap, y: &PPoint, seed: u64) -> Result<usize> {
    if f.domain_vars() != 3 {
        return Err(Error::InvalidInput("fiber counting needs a map from RP^2".into()));
    }
    if y.coords().len() != f.components().len() {
        return Err(Error::DimensionMismatch {
            expected: f.components().len(),
            found: y.coords().len(),
        });
    }
    let yc = y.coords();
    let comps = f.components();
    let mut eqs = Vec::new();
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let e = comps[i].scale(&yc[j]).sub(&comps[j].scale(&yc[i]));
            if !e.is_zero() {
                eqs.push(e);
            }
        }
    }
    if eqs.is_empty() {
        // f is constant on the plane up to scale
        return Err(Error::NonGenericTarget);
    }
    let mut rng = rng_for(seed, "fiber_count", 0);
    let change: Vec<HPoly> = loop {
        let m: Vec<Vec<Scalar>> = (0..3)
            .map(|_| (0..3).map(|_| random_int(&mut rng, -5, 5)).collect())
            .collect();
        if !linalg::det_exact(&m).is_zero() {
            break m.iter().map(|r| HPoly::linear(r)).collect();
        }
    };
    let fiber = projected_common_zeros(&eqs, &change, &mut rng).ok_or(Error::NonGenericTarget)?;
    let nonzero: Vec<HPoly> = comps.iter().filter(|c| !c.is_zero()).cloned().collect();
    let base = if f.degree() == 0 {
        None
    } else {
        projected_common_zeros(&nonzero, &change, &mut rng)
    };
    let count = match base {
        Some(b) if b.degree().unwrap_or(0) > 0 => {
            let shared = fiber.gcd(&b);
            fiber.div_rem(&shared).0.degree().unwrap_or(0)
        }
        _ => fiber.degree().unwrap_or(0),
    };
    Ok(count)
}

/// Fiber count over a generic image point `f(x)` for a seeded random `x`.
pub fn generic_fiber_count(f: &RatMap, seed: u64, index: u64) -> Result<usize> {
    let mut rng = rng_for(seed, "generic_fiber", index);
    loop {
        let x: Vec<Scalar> = (0..f.domain_vars()).map(|_| random_int(&mut rng, -20, 20)).collect();
        if let Ok(y) = f.eval_point(&x) {
            return fiber_count(f, &y, seed.wrapping_add(index));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ints};
    use proptest::prelude::*;

    fn q(terms: &[(i64, &[u32])]) -> HPoly {
        let d = terms[0].1.iter().sum();
        HPoly::from_int_terms(3, d, terms)
    }

    fn map(cs: Vec<HPoly>) -> RatMap {
        reduce_map(cs).unwrap()
    }

    pub(crate) fn quad_map() -> RatMap {
        map(vec![
            q(&[(1, &[2, 0, 0])]),
            q(&[(1, &[1, 1, 0])]),
            q(&[(1, &[1, 0, 1])]),
            q(&[(1, &[0, 1, 1])]),
        ])
    }

    pub(crate) fn circle_web_map() -> RatMap {
        map(vec![
            q(&[(1, &[2, 0, 0])]),
            q(&[(1, &[1, 1, 0])]),
            q(&[(1, &[1, 0, 1])]),
            q(&[(1, &[0, 2, 0]), (1, &[0, 0, 2])]),
        ])
    }

    fn identity() -> RatMap {
        map((0..3).map(|i| HPoly::var(3, i)).collect())
    }

    #[test]
    fn monomials_are_descending_and_complete() {
        let m = monomials(3, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0], vec![2, 0, 0]);
        assert_eq!(m[5], vec![0, 0, 2]);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn restrict_identity_to_x2_line() {
        let l = PLine2::from_ints(&[0, 0, 1]).unwrap();
        let t = restrict_to_line(&identity(), &l).unwrap();
        // [u0, u1, 0]
        assert_eq!(t.coeffs(), &[ints(&[1, 0, 0]), ints(&[0, 1, 0])]);
    }

    #[test]
    fn restrict_quadratic_to_x0_line() {
        let l = PLine2::from_ints(&[1, 0, 0]).unwrap();
        let t = restrict_to_line(&quad_map(), &l).unwrap();
        // direct substitution x = (0, u0, u1): components [0, 0, 0, u0 u1]
        assert_eq!(t.degree(), 2);
        assert_eq!(
            t.coeffs(),
            &[ints(&[0, 0, 0, 0]), ints(&[0, 0, 0, 1]), ints(&[0, 0, 0, 0])]
        );
        assert_eq!(span_dim(&t), 1);
    }

    #[test]
    fn restriction_of_generic_line_keeps_degree() {
        let l = PLine2::from_ints(&[1, 2, 3]).unwrap();
        let t = restrict_to_line(&quad_map(), &l).unwrap();
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn reduce_removes_common_factor() {
        let f = q(&[(1, &[0, 2, 0]), (1, &[0, 0, 2])]);
        let m = map(vec![f.mul(&HPoly::var(3, 0)), f.mul(&HPoly::var(3, 1))]);
        assert_eq!(m.degree(), 1);
        assert_eq!(m.components(), &[HPoly::var(3, 0), HPoly::var(3, 1)]);
    }

    #[test]
    fn reduce_inversion_web_composite() {
        let f = q(&[(1, &[0, 2, 0]), (1, &[0, 0, 2])]);
        let m = map(vec![
            f.mul(&f),
            f.mul(&q(&[(1, &[1, 1, 0])])),
            f.mul(&q(&[(1, &[1, 0, 1])])),
            f.mul(&q(&[(1, &[2, 0, 0])])),
        ]);
        let expected = [f.clone(), q(&[(1, &[1, 1, 0])]), q(&[(1, &[1, 0, 1])]), q(&[(1, &[2, 0, 0])])];
        assert_eq!(m.components(), &expected);
        // verify by exact multiplication
        for (c, e) in m.components().iter().zip(&expected) {
            assert_eq!(c.mul(&f), e.mul(&f));
        }
    }

    #[test]
    fn reduce_keeps_coprime_components() {
        let m = quad_map();
        assert_eq!(reduce_map(m.components().to_vec()).unwrap(), m);
        assert_eq!(reduce_map(vec![HPoly::zero(3, 2)]), Err(Error::AllZero));
    }

    #[test]
    fn span_dim_examples() {
        let t = UniTuple::new(vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]).unwrap();
        assert_eq!(span_dim(&t), 3);
        let t = UniTuple::new(vec![ints(&[2, 3, 5])]).unwrap();
        assert_eq!(span_dim(&t), 1);
        // [u0^2, u0 u1, u1^2, u0^2 + u1^2]; rank oracle: A_0 = A_2 + e_0 - e_2 style
        let t = UniTuple::new(vec![ints(&[1, 0, 0, 1]), ints(&[0, 1, 0, 0]), ints(&[0, 0, 1, 1])]).unwrap();
        assert_eq!(span_dim(&t), 3);
    }

    #[test]
    fn implicitize_examples() {
        let r = implicitize(&quad_map(), 4).unwrap();
        assert_eq!(r.degree, 2);
        // y0 y3 - y1 y2, since x0^2 * x1 x2 = (x0 x1)(x0 x2)
        let expected = HPoly::from_int_terms(4, 2, &[(1, &[1, 0, 0, 1]), (-1, &[0, 1, 1, 0])]);
        assert_eq!(r.relation, expected);

        let r = implicitize(&circle_web_map(), 4).unwrap();
        let expected = HPoly::from_int_terms(
            4,
            2,
            &[(1, &[1, 0, 0, 1]), (-1, &[0, 2, 0, 0]), (-1, &[0, 0, 2, 0])],
        );
        assert_eq!(r.relation, expected);

        let trivial = map(vec![
            q(&[(1, &[2, 0, 0])]),
            q(&[(1, &[1, 1, 0])]),
            q(&[(1, &[1, 0, 1])]),
            q(&[(1, &[2, 0, 0]), (1, &[1, 1, 0])]),
        ]);
        let r = implicitize(&trivial, 4).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.relation, HPoly::from_int_terms(4, 1, &[(1, &[1, 0, 0, 0]), (1, &[0, 1, 0, 0]), (-1, &[0, 0, 0, 1])]));
    }

    #[test]
    fn fiber_counts() {
        let y = PPoint::from_ints(&[2, -3, 5]).unwrap();
        assert_eq!(fiber_count(&identity(), &y, 1).unwrap(), 1);

        let squares = map(vec![q(&[(1, &[2, 0, 0])]), q(&[(1, &[0, 2, 0])]), q(&[(1, &[0, 0, 2])])]);
        let y = squares.eval_point(&ints(&[1, 2, 3])).unwrap();
        // brute force: preimages are [1 : +-2 : +-3], four distinct points
        let mut pre = std::collections::HashSet::new();
        for s1 in [-1, 1] {
            for s2 in [-1, 1] {
                let x = ints(&[1, 2 * s1, 3 * s2]);
                assert_eq!(squares.eval_point(&x).unwrap(), y);
                pre.insert(PPoint::new(x).unwrap());
            }
        }
        assert_eq!(fiber_count(&squares, &y, 3).unwrap(), pre.len());

        let y = circle_web_map().eval_point(&ints(&[2, 1, -3])).unwrap();
        assert_eq!(fiber_count(&circle_web_map(), &y, 5).unwrap(), 1);
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let m = circle_web_map();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"components":[{"nvars":3,"degree":2,"terms":[{"exp":[2,0,0],"coef":"1"}]}"#));
        let back: RatMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    fn random_map(seed: u64, targets: usize, degree: u32) -> RatMap {
        let mut rng = rng_for(seed, "poly-test", 0);
        let basis = monomials(3, degree);
        let comps = (0..targets)
            .map(|_| {
                let poly = MPoly::from_terms(3, basis.iter().map(|e| (e.clone(), random_int(&mut rng, -3, 3))));
                HPoly::new(degree, poly).unwrap()
            })
            .collect();
        reduce_map(comps).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn restriction_commutes_with_evaluation(seed in 0u64..1000, a in -5i64..=5, b in -5i64..=5, c in 1i64..=5, t0 in -4i64..=4, t1 in -4i64..=4) {
            prop_assume!(a != 0 || b != 0);
            prop_assume!(t0 != 0 || t1 != 0);
            let f = random_map(seed, 4, 2);
            let l = PLine2::from_ints(&[a, b, c]).unwrap();
            let t = restrict_to_line(&f, &l).unwrap();
            prop_assert!(span_dim(&t) <= f.degree() as usize + 1);
            let (p, qq) = line_parameterization(&l);
            let x: Vec<Scalar> = (0..3).map(|i| &p[i] * int(t0) + &qq[i] * int(t1)).collect();
            let lhs = t.eval(&int(t0), &int(t1));
            match f.eval(&x) {
                None => prop_assert!(lhs.iter().all(Zero::is_zero)),
                Some(v) => prop_assert_eq!(PPoint::new(lhs).unwrap(), PPoint::new(v).unwrap()),
            }
        }

        #[test]
        fn reduce_is_idempotent(seed in 0u64..1000) {
            let f = random_map(seed, 3, 2);
            let g = HPoly::linear(&ints(&[1, (seed % 5) as i64, 2]));
            let padded = reduce_map(f.components().iter().map(|c| c.mul(&g)).collect()).unwrap();
            prop_assert_eq!(&padded, &f);
            prop_assert_eq!(reduce_map(padded.components().to_vec()).unwrap(), padded);
        }

        #[test]
        fn implicit_relation_vanishes_on_image(seed in 0u64..1000) {
            let f = random_map(seed, 3, 1);
            let r = implicitize(&f, 2);
            // a projective map of the plane onto the plane has no relation
            prop_assert!(r.is_none() || linalg::rank(&f.coefficient_matrix()) < 3);
            let g = random_map(seed, 4, 2);
            if let Some(r) = implicitize(&g, 4) {
                prop_assert!(r.relation.compose(g.components()).is_zero());
            }
        }

        #[test]
        fn degree_one_fibers_are_single_points(seed in 0u64..1000) {
            let f = random_map(seed, 3, 1);
            prop_assume!(linalg::rank(&f.coefficient_matrix()) == 3);
            prop_assert_eq!(generic_fiber_count(&f, seed, 0).unwrap(), 1);
        }
    }
}
