//! Rational reconstruction: univariate rational functions from samples,
//! bivariate ones from their restrictions to horizontal lines, and whole
//! rational maps from evaluations in an affine chart.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::jetplan::{chart_of, MapEvaluator};
use crate::linalg::{self, FLOAT_RANK_TOL};
use crate::mpoly::MPoly;
use crate::poly::{reduce_map, HPoly, RatMap};
use crate::projcore::PPoint;
use crate::scalar::{int, random_ratio, rationalize, rng_for, to_f64, Mode, Scalar};
use crate::upoly::UPoly;

/// Relative residual allowed when validating float-mode fits.
pub const FLOAT_FIT_TOL: f64 = 1e-6;
/// Largest denominator tried when turning float coefficients into exact ones.
pub const MAX_RATIONALIZE_DEN: i64 = 1_000_000;

/// Univariate rational function `num / den` in lowest terms, `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniRat {
    num: UPoly,
    den: UPoly,
}

impl UniRat {
    pub fn new(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let lead = den.lead().expect("nonzero").recip();
        Ok(Self {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    fn from_vector(v: &[Scalar], d: usize) -> Result<Self> {
        Self::new(UPoly::new(v[..=d].to_vec()), UPoly::new(v[d + 1..].to_vec()))
    }
}

fn check_nodes(samples: &[(Scalar, Scalar)], needed: usize) -> Result<()> {
    if samples.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            found: samples.len(),
        });
    }
    let mut nodes: Vec<&Scalar> = samples.iter().map(|(x, _)| x).collect();
    nodes.sort();
    if nodes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("sample nodes must be distinct".into()));
    }
    Ok(())
}

/// Rows `[1, x, .., x^d, -y, -y x, .., -y x^d]` of the linearized system
/// `p(x_i) - y_i q(x_i) = 0`.
fn uni_rows(samples: &[(Scalar, Scalar)], d: usize) -> Vec<Vec<Scalar>> {
    samples
        .iter()
        .map(|(x, y)| {
            let powers: Vec<Scalar> = (0..=d).map(|k| num_traits::pow(x.clone(), k)).collect();
            powers
                .iter()
                .cloned()
                .chain(powers.iter().map(|p| -(p * y)))
                .collect()
        })
        .collect()
}

/// Exact nullspace of the degree-`d` fitting system over all samples.
pub fn fit_nullspace(samples: &[(Scalar, Scalar)], d: usize) -> Vec<Vec<Scalar>> {
    linalg::nullspace(&uni_rows(samples, d), 2 * d + 2)
}

/// Scales a float vector by its largest entry and snaps every entry to a
/// nearby small-denominator rational.
pub(crate) fn rationalize_vec(v: &[f64]) -> Option<Vec<Scalar>> {
    let big = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
    if big == 0.0 {
        return None;
    }
    v.iter()
        .map(|x| {
            let r = x / big;
            if r.abs() < 1e-10 {
                Some(Scalar::zero())
            } else {
                rationalize(r, MAX_RATIONALIZE_DEN, 1e-9)
            }
        })
        .collect()
}

fn float_nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<f64>> {
    // row scaling keeps equations at different nodes comparable
    let m: Vec<Vec<f64>> = linalg::to_f64_matrix(rows)
        .into_iter()
        .map(|r| {
            let s = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if s > 0.0 {
                r.iter().map(|x| x / s).collect()
            } else {
                r
            }
        })
        .collect();
    linalg::nullspace_f64(&m, ncols, FLOAT_RANK_TOL)
}

fn values_agree(got: &Scalar, want: &Scalar, mode: Mode) -> bool {
    match mode {
        Mode::Exact => got == want,
        Mode::Float => {
            let (g, w) = (to_f64(got), to_f64(want));
            (g - w).abs() <= FLOAT_FIT_TOL * w.abs().max(1.0)
        }
    }
}

/// Rational function of degree at most `d` through the samples.
///
/// The lowest degree with a nontrivial solution is used, so a solution that
/// only exists through a spurious common factor is caught by re-evaluating
/// the reduced fraction at every node.
pub fn fit_uni(samples: &[(Scalar, Scalar)], d: usize, mode: Mode) -> Result<UniRat> {
    check_nodes(samples, 2 * d + 1)?;
    for dd in 0..=d {
        let rows = uni_rows(samples, dd);
        let candidates: Vec<UniRat> = match mode {
            Mode::Exact => linalg::nullspace(&rows, 2 * dd + 2)
                .iter()
                .map(|v| UniRat::from_vector(v, dd))
                .collect::<Result<_>>()?,
            Mode::Float => {
                let ns = float_nullspace(&rows, 2 * dd + 2);
                if ns.len() > 1 {
                    return Err(Error::AmbiguousFit);
                }
                ns.iter()
                    .map(|v| {
                        let exact = rationalize_vec(v).ok_or(Error::DegreeTooLow(d))?;
                        UniRat::from_vector(&exact, dd)
                    })
                    .collect::<Result<_>>()?
            }
        };
        let Some(first) = candidates.first() else {
            continue;
        };
        if candidates.iter().any(|c| c != first) {
            return Err(Error::AmbiguousFit);
        }
        for (x, y) in samples {
            match first.eval(x) {
                Some(v) if values_agree(&v, y, mode) => {}
                _ => return Err(Error::DegreeTooLow(d)),
            }
        }
        return Ok(first.clone());
    }
    Err(Error::DegreeTooLow(d))
}

/// Bivariate rational function `num / den` in `(u, v)`, in lowest terms and
/// scaled so the denominator is a primitive integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiRat {
    num: MPoly,
    den: MPoly,
}

impl BiRat {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        let prim = den.primitive();
        let factor = prim.leading().expect("nonzero").1 / den.leading().expect("nonzero").1;
        Ok(Self {
            num: num.scale(&factor),
            den: prim,
        })
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn degree(&self) -> u32 {
        self.num
            .total_degree()
            .unwrap_or(0)
            .max(self.den.total_degree().unwrap_or(0))
    }

    pub fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Scalar> {
        let x = [u.clone(), v.clone()];
        let d = self.den.eval(&x);
        (!d.is_zero()).then(|| self.num.eval(&x) / d)
    }
}

/// Exponents `[i, j]` with `i + j <= d`.
fn bivariate_monomials(d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d as u32 {
        for i in (0..=total).rev() {
            out.push(vec![i, total - i]);
        }
    }
    out
}

type Samples2 = Vec<(Scalar, Scalar, Scalar)>;

fn direct_fit(samples: &Samples2, d: usize, mode: Mode) -> Result<BiRat> {
    for dd in 0..=d {
        let basis = bivariate_monomials(dd);
        let nb = basis.len();
        let rows: Vec<Vec<Scalar>> = samples
            .iter()
            .map(|(u, v, y)| {
                let mono: Vec<Scalar> = basis
                    .iter()
                    .map(|e| {
                        num_traits::pow(u.clone(), e[0] as usize) * num_traits::pow(v.clone(), e[1] as usize)
                    })
                    .collect();
                mono.iter().cloned().chain(mono.iter().map(|m| -(m * y))).collect()
            })
            .collect();
        let vectors: Vec<Vec<Scalar>> = match mode {
            Mode::Exact => linalg::nullspace(&rows, 2 * nb),
            Mode::Float => {
                let ns = float_nullspace(&rows, 2 * nb);
                if ns.len() > 1 {
                    return Err(Error::AmbiguousFit);
                }
                ns.iter()
                    .map(|v| rationalize_vec(v).ok_or(Error::DegreeTooLow(d)))
                    .collect::<Result<_>>()?
            }
        };
        if vectors.is_empty() {
            continue;
        }
        let to_poly = |coeffs: &[Scalar]| MPoly::from_terms(2, basis.iter().cloned().zip(coeffs.iter().cloned()));
        let candidates: Vec<BiRat> = vectors
            .iter()
            .filter(|v| v[nb..].iter().any(|x| !x.is_zero()))
            .map(|v| BiRat::new(to_poly(&v[..nb]), to_poly(&v[nb..])))
            .collect::<Result<_>>()?;
        let Some(first) = candidates.first() else {
            return Err(Error::DegreeTooLow(d));
        };
        if candidates.iter().any(|c| c != first) {
            return Err(Error::AmbiguousFit);
        }
        return Ok(first.clone());
    }
    Err(Error::DegreeTooLow(d))
}

/// Per-line fits along `v = c`, then rational fits of each normalized
/// coefficient as a function of `c`.
fn two_stage_fit(
    f: &dyn Fn(&Scalar, &Scalar) -> Option<Scalar>,
    us: &[Scalar],
    vs: &[Scalar],
    d: usize,
    mode: Mode,
    samples: &mut Samples2,
) -> Result<BiRat> {
    let mut lines: Vec<(Scalar, UniRat)> = Vec::new();
    for c in vs {
        let pts: Vec<(Scalar, Scalar)> = us
            .iter()
            .filter_map(|u| f(u, c).map(|y| (u.clone(), y)))
            .collect();
        samples.extend(pts.iter().map(|(u, y)| (u.clone(), c.clone(), y.clone())));
        if pts.len() < 2 * d + 1 {
            continue;
        }
        match fit_uni(&pts, d, mode) {
            Ok(r) => lines.push((c.clone(), r)),
            Err(Error::AmbiguousFit) => {}
            Err(e) => return Err(e),
        }
    }
    // keep the lines with the generic (most frequent) degree profile
    let profile = |r: &UniRat| (r.num.degree(), r.den.degree());
    let mut counts: Vec<((Option<usize>, Option<usize>), usize)> = Vec::new();
    for (_, r) in &lines {
        match counts.iter_mut().find(|(p, _)| *p == profile(r)) {
            Some(slot) => slot.1 += 1,
            None => counts.push((profile(r), 1)),
        }
    }
    let modal = counts
        .iter()
        .max_by_key(|(_, k)| *k)
        .map(|(p, _)| *p)
        .ok_or(Error::TooFewSamples {
            needed: 2 * d + 1,
            found: 0,
        })?;
    lines.retain(|(_, r)| profile(r) == modal);
    if lines.len() < 2 * d + 1 {
        return Err(Error::TooFewSamples {
            needed: 2 * d + 1,
            found: lines.len(),
        });
    }
    let probe = us
        .iter()
        .find(|u| lines.iter().all(|(_, r)| !r.den.eval(u).is_zero()))
        .ok_or(Error::NormalizationFailure)?;
    let (np, nq) = (modal.0.map_or(0, |x| x + 1), modal.1.map_or(0, |x| x + 1));
    // slot k < np is the u^k coefficient of the numerator, the rest the
    // denominator's
    let slot_samples: Vec<Vec<(Scalar, Scalar)>> = (0..np + nq)
        .map(|k| {
            lines
                .iter()
                .map(|(c, r)| {
                    let scale = r.den.eval(probe).recip();
                    let x = if k < np {
                        r.num.coeff(k)
                    } else {
                        r.den.coeff(k - np)
                    };
                    (c.clone(), x * scale)
                })
                .collect()
        })
        .collect();
    let slots: Vec<UniRat> = slot_samples
        .iter()
        .map(|s| fit_uni(s, d, Mode::Exact))
        .collect::<Result<_>>()?;
    let common = slots
        .iter()
        .fold(UPoly::constant(Scalar::one()), |acc, r| {
            let g = acc.gcd(&r.den);
            acc.clone() * r.den.div_rem(&g).0
        });
    let assemble = |range: std::ops::Range<usize>, offset: usize| {
        let mut p = MPoly::zero(2);
        for k in range {
            let r = &slots[k];
            let coeff_in_v = r.num.clone() * common.div_rem(&r.den).0;
            for (j, x) in coeff_in_v.coeffs().iter().enumerate() {
                p.add_term(vec![(k - offset) as u32, j as u32], x.clone());
            }
        }
        p
    };
    BiRat::new(assemble(0..np, 0), assemble(np..np + nq, np))
}

/// Bivariate rational function of total degree at most `d` from its values
/// on the grid `us x vs`, reconstructed along horizontal lines and checked
/// against a direct fit on all nodes.
pub fn fit_bi(
    f: &dyn Fn(&Scalar, &Scalar) -> Option<Scalar>,
    us: &[Scalar],
    vs: &[Scalar],
    d: usize,
    mode: Mode,
) -> Result<BiRat> {
    let mut samples = Vec::new();
    let staged = two_stage_fit(f, us, vs, d, mode, &mut samples)?;
    let direct = direct_fit(&samples, d, mode)?;
    if staged != direct {
        return Err(Error::RouteMismatch);
    }
    for (u, v, y) in &samples {
        match staged.eval(u, v) {
            Some(x) if values_agree(&x, y, mode) => {}
            _ => return Err(Error::DegreeTooLow(d)),
        }
    }
    Ok(staged)
}

/// Default node pool for exact sources: `0, 1, ..` with room for poles.
pub fn integer_nodes(d: usize) -> Vec<Scalar> {
    (0..(5 * d + 3) as i64).map(int).collect()
}

/// Outcome of [`fit_map`] with its validation record.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFit {
    pub map: RatMap,
    /// Target coordinate used as the affine denominator.
    pub chart: usize,
    /// Points at which the fitted map was compared with the source.
    pub checked: usize,
    /// Largest relative deviation seen (zero for exact agreement).
    pub max_residual: f64,
}

/// Distance between the projective classes of `a` and `b`.
pub fn projective_residual(a: &[Scalar], b: &[Scalar]) -> f64 {
    let fa: Vec<f64> = a.iter().map(to_f64).collect();
    let fb: Vec<f64> = b.iter().map(to_f64).collect();
    let na = fa.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = fb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let dot: f64 = fa.iter().zip(&fb).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    // sine of the angle between the lines
    (1.0 - dot * dot).max(0.0).sqrt()
}

fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    let g = a.gcd(b);
    (a * &b.exact_div(&g).expect("gcd divides")).primitive()
}

/// Homogenizes a polynomial in `(u, v)` to a form of degree `deg` in
/// `(x0, x1, x2)` with `u = x1/x0`, `v = x2/x0`.
fn homogenize_uv(p: &MPoly, deg: u32) -> HPoly {
    let terms = p
        .terms()
        .iter()
        .map(|(e, c)| (vec![deg - e[0] - e[1], e[0], e[1]], c.clone()));
    HPoly::new(deg, MPoly::from_terms(3, terms)).expect("homogeneous by construction")
}

fn fit_map_on(
    f: &dyn MapEvaluator,
    us: &[Scalar],
    vs: &[Scalar],
    d: usize,
    mode: Mode,
) -> Result<(RatMap, usize)> {
    let mid = (&us[us.len() / 2], &vs[vs.len() / 2]);
    let reference = f
        .eval(mid.0, mid.1)
        .or_else(|| us.iter().flat_map(|u| vs.iter().map(move |v| (u, v))).find_map(|(u, v)| f.eval(u, v)))
        .ok_or(Error::OnIndeterminacy)?;
    let chart = chart_of(&reference);
    let n = f.target_dim();
    let mut parts: Vec<Option<BiRat>> = vec![None; n + 1];
    for j in (0..=n).filter(|&j| j != chart) {
        let g = |u: &Scalar, v: &Scalar| {
            let y = f.eval(u, v)?;
            (!y[chart].is_zero()).then(|| &y[j] / &y[chart])
        };
        parts[j] = Some(fit_bi(&g, us, vs, d, mode)?);
    }
    let common = parts
        .iter()
        .flatten()
        .fold(MPoly::one(2), |acc, r| lcm(&acc, r.den()));
    let affine: Vec<MPoly> = parts
        .iter()
        .map(|p| match p {
            None => common.clone(),
            Some(r) => r.num() * &common.exact_div(r.den()).expect("lcm is a multiple"),
        })
        .collect();
    let deg = affine.iter().filter_map(MPoly::total_degree).max().unwrap_or(0);
    if deg as usize > d {
        return Err(Error::DegreeTooLow(d));
    }
    let map = reduce_map(affine.iter().map(|p| homogenize_uv(p, deg)).collect())?;
    Ok((map, chart))
}

/// Seeded invertible affine change `(u, v) = A (s, t) + b` of the domain
/// chart, as a 3x3 matrix acting on `[x0:x1:x2]`.
fn random_affine_change(seed: u64, attempt: u64) -> Vec<Vec<Scalar>> {
    let mut rng = rng_for(seed, "fit_map/affine", attempt);
    loop {
        let a: Vec<Scalar> = (0..4).map(|_| random_ratio(&mut rng, 3, 2)).collect();
        let det = &a[0] * &a[3] - &a[1] * &a[2];
        if det.is_zero() {
            continue;
        }
        let b = (random_ratio(&mut rng, 2, 3), random_ratio(&mut rng, 2, 3));
        return vec![
            vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
            vec![b.0, a[0].clone(), a[1].clone()],
            vec![b.1, a[2].clone(), a[3].clone()],
        ];
    }
}

fn invert3(m: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let det = linalg::det(m);
    let minor = |r: usize, c: usize| {
        let rows: Vec<Vec<Scalar>> = (0..3)
            .filter(|&i| i != r)
            .map(|i| (0..3).filter(|&j| j != c).map(|j| m[i][j].clone()).collect())
            .collect();
        linalg::det(&rows)
    };
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let cof = minor(j, i);
                    let s = if (i + j) % 2 == 0 { cof } else { -cof };
                    s / &det
                })
                .collect()
        })
        .collect()
}

struct Changed<'a> {
    inner: &'a dyn MapEvaluator,
    m: Vec<Vec<Scalar>>,
}

impl MapEvaluator for Changed<'_> {
    fn target_dim(&self) -> usize {
        self.inner.target_dim()
    }
    fn mode(&self) -> Mode {
        self.inner.mode()
    }
    fn region(&self) -> crate::jetplan::Region {
        self.inner.region()
    }
    fn eval(&self, s: &Scalar, t: &Scalar) -> Option<Vec<Scalar>> {
        let u = &self.m[1][0] + &self.m[1][1] * s + &self.m[1][2] * t;
        let v = &self.m[2][0] + &self.m[2][1] * s + &self.m[2][2] * t;
        self.inner.eval(&u, &v)
    }
}

/// Rational map of degree at most `d` reproducing the evaluator.
///
/// Grids are fitted on their own nodes and validated at every node; other
/// sources use integer node pools, are validated at 20 seeded rational
/// points, and are retried once after a seeded affine change of the
/// domain chart when the line-by-line reconstruction is inconclusive.
pub fn fit_map(f: &dyn MapEvaluator, d: usize, seed: u64) -> Result<MapFit> {
    let mode = f.mode();
    if let Some((us, vs)) = f.grid() {
        let (map, chart) = fit_map_on(f, us, vs, d, mode)?;
        let mut checked = 0;
        let mut worst = 0.0f64;
        for v in vs {
            for u in us {
                let Some(y) = f.eval(u, v) else { continue };
                let Some(z) = map.eval(&[Scalar::one(), u.clone(), v.clone()]) else {
                    continue;
                };
                checked += 1;
                let ok = match mode {
                    Mode::Exact => PPoint::new(y.clone()) == PPoint::new(z.clone()),
                    Mode::Float => {
                        let r = projective_residual(&y, &z);
                        worst = worst.max(r);
                        r < FLOAT_FIT_TOL
                    }
                };
                if !ok {
                    return Err(Error::DegreeTooLow(d));
                }
            }
        }
        return Ok(MapFit {
            map,
            chart,
            checked,
            max_residual: worst,
        });
    }
    let nodes = integer_nodes(d);
    let mut last_err = Error::DegreeTooLow(d);
    for attempt in 0..2u64 {
        let result = if attempt == 0 {
            fit_map_on(f, &nodes, &nodes, d, mode)
        } else {
            let m = random_affine_change(seed, attempt);
            let changed = Changed { inner: f, m: m.clone() };
            fit_map_on(&changed, &nodes, &nodes, d, mode).and_then(|(g, chart)| {
                // undo the change: x = M x' so x' = M^-1 x
                let inv = invert3(&m);
                let back: Vec<HPoly> = inv.iter().map(|r| HPoly::linear(r)).collect();
                let comps = g.components().iter().map(|c| c.compose(&back)).collect();
                Ok((reduce_map(comps)?, chart))
            })
        };
        match result {
            Ok((map, chart)) => {
                let (checked, worst) = validate_at_random_points(f, &map, seed, d)?;
                return Ok(MapFit {
                    map,
                    chart,
                    checked,
                    max_residual: worst,
                });
            }
            Err(e @ (Error::NormalizationFailure | Error::RouteMismatch | Error::AmbiguousFit | Error::TooFewSamples { .. })) => {
                last_err = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn validate_at_random_points(f: &dyn MapEvaluator, map: &RatMap, seed: u64, d: usize) -> Result<(usize, f64)> {
    let mut rng = rng_for(seed, "fit_map/validate", 0);
    let region = f.region();
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut tries = 0;
    while checked < 20 && tries < 200 {
        tries += 1;
        let s = random_ratio(&mut rng, 97, 97).abs();
        let t = random_ratio(&mut rng, 97, 97).abs();
        let (s, t) = (s.min(Scalar::one()), t.min(Scalar::one()));
        let (u, v) = region.at(&s, &t);
        let (Some(y), Some(z)) = (f.eval(&u, &v), map.eval(&[Scalar::one(), u, v])) else {
            continue;
        };
        checked += 1;
        let ok = match f.mode() {
            Mode::Exact => PPoint::new(y) == PPoint::new(z),
            Mode::Float => {
                let r = projective_residual(&y, &z);
                worst = worst.max(r);
                r < FLOAT_FIT_TOL
            }
        };
        if !ok {
            return Err(Error::DegreeTooLow(d));
        }
    }
    Ok((checked, worst))
}
