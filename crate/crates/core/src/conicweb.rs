//! Linear systems of conics, the map they define, and the classification of
//! maps taking lines to curves of a web.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dualize::{classify, sample_points, sampled_center_of, sampled_trivial_witness, PlanarizationClass};
use crate::error::{Error, Result};
use crate::jetplan::{Composed, MapEvaluator};
use crate::linalg::{self, FLOAT_RANK_TOL};
use crate::poly::{generic_fiber_count, implicitize, monomials, reduce_map, HPoly, RatMap};
use crate::projcore::{cross, Hyperplane, PLine2, PPoint};
use crate::ratfit::{fit_map, projective_residual, rationalize_vec, FLOAT_FIT_TOL};
use crate::scalar::{random_int, ratio, rng_for, to_f64, Mode, Scalar};

/// Span of linearly independent quadratic forms in three variables:
/// a pencil (dimension 1), net (2) or web (3).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConicSystemJson", into = "ConicSystemJson")]
pub struct ConicSystem {
    basis: Vec<HPoly>,
}

#[derive(Serialize, Deserialize)]
struct ConicSystemJson {
    dimension: usize,
    basis: Vec<HPoly>,
}

impl TryFrom<ConicSystemJson> for ConicSystem {
    type Error = Error;
    fn try_from(j: ConicSystemJson) -> Result<Self> {
        if j.basis.len() != j.dimension + 1 {
            return Err(Error::DimensionMismatch {
                expected: j.dimension + 1,
                found: j.basis.len(),
            });
        }
        ConicSystem::new(j.basis)
    }
}

impl From<ConicSystem> for ConicSystemJson {
    fn from(s: ConicSystem) -> Self {
        Self {
            dimension: s.dimension(),
            basis: s.basis,
        }
    }
}

impl ConicSystem {
    pub fn new(basis: Vec<HPoly>) -> Result<Self> {
        if basis.len() < 2 {
            return Err(Error::InvalidInput("a conic system needs at least two members".into()));
        }
        for b in &basis {
            if b.nvars() != 3 || b.degree() != 2 {
                return Err(Error::InvalidInput(format!("{b} is not a ternary quadratic form")));
            }
        }
        let mons = monomials(3, 2);
        let rows: Vec<Vec<Scalar>> = basis.iter().map(|b| b.coefficients(&mons)).collect();
        if linalg::rank(&rows) < basis.len() {
            return Err(Error::DependentBasis);
        }
        Ok(Self { basis })
    }

    pub fn from_int_terms(members: &[&[(i64, &[u32])]]) -> Result<Self> {
        Self::new(members.iter().map(|t| HPoly::from_int_terms(3, 2, t)).collect())
    }

    /// The circle web: conics through the two circular points.
    pub fn circle_web() -> Self {
        Self::from_int_terms(&[
            &[(1, &[2, 0, 0])],
            &[(1, &[1, 1, 0])],
            &[(1, &[1, 0, 1])],
            &[(1, &[0, 2, 0]), (1, &[0, 0, 2])],
        ])
        .expect("independent")
    }

    pub fn basis(&self) -> &[HPoly] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len() - 1
    }

    /// The member `sum lambda_i phi_i`.
    pub fn member(&self, lambda: &[Scalar]) -> HPoly {
        self.basis
            .iter()
            .zip(lambda)
            .fold(HPoly::zero(3, 2), |acc, (b, l)| acc.add(&b.scale(l)))
    }

    /// Subsystem spanned by the members with the given coefficient vectors.
    pub fn subsystem(&self, lambdas: &[Vec<Scalar>]) -> Result<Self> {
        Self::new(lambdas.iter().map(|l| self.member(l)).collect())
    }
}

/// The map `x -> [phi_0(x) : ... : phi_k(x)]`, reduced.
pub fn phi_map(sys: &ConicSystem) -> Result<RatMap> {
    reduce_map(sys.basis.clone())
}

/// Points of `line` where `f` is defined: grid nodes on the line, or `m`
/// evenly spaced interior points of the segment cut out by the region.
pub fn line_samples(f: &dyn MapEvaluator, line: &PLine2, m: usize) -> Vec<(Scalar, Scalar, Vec<Scalar>)> {
    let l = line.covector();
    let on = |u: &Scalar, v: &Scalar| (&l[0] + &l[1] * u + &l[2] * v).is_zero();
    if let Some((us, vs)) = f.grid() {
        let mut out = Vec::new();
        for v in vs {
            for u in us {
                if on(u, v) {
                    if let Some(y) = f.eval(u, v) {
                        out.push((u.clone(), v.clone(), y));
                    }
                }
            }
        }
        return out;
    }
    let r = f.region();
    let mut ends: Vec<(Scalar, Scalar)> = Vec::new();
    if !l[2].is_zero() {
        for u in [&r.u.0, &r.u.1] {
            let v = -(&l[0] + &l[1] * u) / &l[2];
            ends.push((u.clone(), v));
        }
    }
    if !l[1].is_zero() {
        for v in [&r.v.0, &r.v.1] {
            let u = -(&l[0] + &l[2] * v) / &l[1];
            ends.push((u, v.clone()));
        }
    }
    ends.retain(|(u, v)| r.contains(u, v));
    ends.sort();
    ends.dedup();
    if ends.len() < 2 {
        return Vec::new();
    }
    let (p, q) = (&ends[0], &ends[ends.len() - 1]);
    (1..=m)
        .filter_map(|k| {
            let t = ratio(k as i64, m as i64 + 1);
            let u = &p.0 + (&q.0 - &p.0) * &t;
            let v = &p.1 + (&q.1 - &p.1) * &t;
            let y = f.eval(&u, &v)?;
            Some((u, v, y))
        })
        .collect()
}

/// Generator of the nullspace of `rows`, exact or float, when nontrivial.
fn null_vector(rows: &[Vec<Scalar>], ncols: usize, mode: Mode) -> Option<Vec<Scalar>> {
    match mode {
        Mode::Exact => linalg::nullspace(rows, ncols).into_iter().next(),
        Mode::Float => {
            let m: Vec<Vec<f64>> = linalg::to_f64_matrix(rows)
                .into_iter()
                .map(|r| {
                    let s = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if s > 0.0 {
                        r.iter().map(|x| x / s).collect()
                    } else {
                        r
                    }
                })
                .collect();
            let ns = linalg::nullspace_f64(&m, ncols, FLOAT_RANK_TOL);
            let v = ns.first()?;
            rationalize_vec(v).or_else(|| v.iter().map(|&x| Scalar::from_float(x)).collect())
        }
    }
}

/// For each line, the member of `sys` containing the image of the line, or
/// `None` when no member does.
pub fn lines_to_curves(f: &dyn MapEvaluator, sys: &ConicSystem, lines: &[PLine2]) -> Result<Vec<Option<PPoint>>> {
    if f.target_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: f.target_dim(),
        });
    }
    let k = sys.dimension();
    let m = 2 * k + 4;
    lines
        .iter()
        .map(|line| {
            let pts = line_samples(f, line, m);
            if pts.len() < k + 3 {
                return Err(Error::TooFewSamples {
                    needed: k + 3,
                    found: pts.len(),
                });
            }
            let rows: Vec<Vec<Scalar>> = pts.iter().map(|(_, _, y)| sys.basis.iter().map(|b| b.eval(y)).collect()).collect();
            Ok(null_vector(&rows, k + 1, f.mode()).and_then(|l| PPoint::new(l).ok()))
        })
        .collect()
}

/// Seeded lines through the region, or the rows and columns of a grid.
pub fn screening_lines(f: &dyn MapEvaluator, count: usize, seed: u64) -> Vec<PLine2> {
    let mut rng = rng_for(seed, "web/screen", 0);
    if let Some((us, vs)) = f.grid() {
        let mut lines: Vec<PLine2> = vs
            .iter()
            .map(|v| Hyperplane::new(vec![-v.clone(), Scalar::zero(), Scalar::one()]).expect("row"))
            .chain(
                us.iter()
                    .map(|u| Hyperplane::new(vec![-u.clone(), Scalar::one(), Scalar::zero()]).expect("column")),
            )
            .collect();
        rand::seq::SliceRandom::shuffle(lines.as_mut_slice(), &mut rng);
        lines.truncate(count);
        return lines;
    }
    let r = f.region();
    let mut lines = Vec::new();
    while lines.len() < count {
        let mut pick = || {
            let s = ratio(rand::Rng::random_range(&mut rng, 1..=99), 100);
            let t = ratio(rand::Rng::random_range(&mut rng, 1..=99), 100);
            let (u, v) = r.at(&s, &t);
            vec![Scalar::one(), u, v]
        };
        let (a, b) = (pick(), pick());
        if let Ok(l) = Hyperplane::new(cross(&a, &b)) {
            lines.push(l);
        }
    }
    lines
}

/// Outcome of the web classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WebCase {
    /// The image lies in the member with these coefficients.
    InConic(PPoint),
    /// Quadratic map inverting `f`.
    InverseQuadratic(RatMap),
    /// `f` itself, rational of degree at most two.
    Quadratic(RatMap),
    /// `phi` and `f_composite` both map into the quadric `q = 0`.
    QuadricFactor { q: HPoly, phi: RatMap, f_composite: RatMap },
    Unresolved(String),
}

impl WebCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InConic(_) => "InConic",
            Self::InverseQuadratic(_) => "InverseQuadratic",
            Self::Quadratic(_) => "Quadratic",
            Self::QuadricFactor { .. } => "QuadricFactor",
            Self::Unresolved(_) => "Unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebVerdict {
    pub case: WebCase,
    pub diagnostics: Vec<String>,
}

/// Lines screened before classifying.
pub const SCREEN_LINES: usize = 25;

/// Which web case applies to `f`.
///
/// Checks run in the order InConic, QuadricFactor, InverseQuadratic,
/// Quadratic; the first that validates wins. For sampled `f` the verdict
/// describes the sampled region.
pub fn classify_web(f: &dyn MapEvaluator, web: &ConicSystem, seed: u64) -> Result<WebVerdict> {
    if web.dimension() != 3 {
        return Err(Error::InvalidInput(format!(
            "expected a web of conics, got dimension {}",
            web.dimension()
        )));
    }
    let lines = screening_lines(f, SCREEN_LINES, seed);
    let verdicts = lines_to_curves(f, web, &lines)?;
    if let Some(i) = verdicts.iter().position(Option::is_none) {
        return Err(Error::NotALinesToCurvesMap(format!("{} is not taken to a web curve", lines[i])));
    }
    let mut diagnostics = vec![format!("{} lines screened", lines.len())];
    let phi = phi_map(web)?;
    let composite = Composed::new(phi.clone(), f)?;
    let unresolved = |why: String, mut diagnostics: Vec<String>| {
        diagnostics.push(why.clone());
        Ok(WebVerdict {
            case: WebCase::Unresolved(why),
            diagnostics,
        })
    };

    let big_f = match composite.rational() {
        Some(m) => m.clone(),
        None => {
            if let Some(h) = sampled_trivial_witness(&composite, seed) {
                return Ok(WebVerdict {
                    case: WebCase::InConic(h.dual()),
                    diagnostics,
                });
            }
            match fit_map(&composite, 4, seed) {
                Ok(fit) => {
                    diagnostics.push(format!(
                        "composite fitted at degree {} over {} points, max residual {:e}",
                        fit.map.degree(),
                        fit.checked,
                        fit.max_residual
                    ));
                    fit.map
                }
                Err(e) => {
                    return match sampled_center_of(&composite, seed) {
                        Some(o) => finish_co_trivial(f, web, &o, seed, diagnostics),
                        None => unresolved(format!("no rational model of the composite: {e}"), diagnostics),
                    }
                }
            }
        }
    };
    diagnostics.push(format!("composite has degree {}", big_f.degree()));

    if let Some(rel) = big_f.linear_relations().into_iter().next() {
        return Ok(WebVerdict {
            case: WebCase::InConic(PPoint::new(rel)?),
            diagnostics,
        });
    }

    if let Some(imp) = implicitize(&phi, 2) {
        if imp.degree == 2 {
            let q = imp.relation.primitive();
            let on_phi = q.compose(phi.components()).is_zero();
            let on_f = q.compose(big_f.components()).is_zero();
            if on_phi && on_f {
                return Ok(WebVerdict {
                    case: WebCase::QuadricFactor {
                        q,
                        phi,
                        f_composite: big_f,
                    },
                    diagnostics,
                });
            }
            diagnostics.push(format!("quadric {q} does not contain the composite"));
        }
    }

    match classify(&big_f, seed)? {
        PlanarizationClass::Trivial(h) => Ok(WebVerdict {
            case: WebCase::InConic(h.dual()),
            diagnostics,
        }),
        PlanarizationClass::CoTrivial(o) => finish_co_trivial(f, web, &o, seed, diagnostics),
        PlanarizationClass::Rational(d) => {
            diagnostics.push(format!("composite is a rational planarization of degree {d}"));
            for i in 0..5 {
                match generic_fiber_count(&phi, seed, i) {
                    Ok(1) => {}
                    Ok(c) => return unresolved(format!("web map has {c} points in a generic fiber"), diagnostics),
                    Err(e) => return unresolved(format!("fiber count failed: {e}"), diagnostics),
                }
            }
            let recovered = match f.rational() {
                Some(m) => Ok(m.clone()),
                None => fit_map(f, 2, seed).map(|fit| fit.map),
            };
            match recovered {
                Ok(m) if m.degree() <= 2 => Ok(WebVerdict {
                    case: WebCase::Quadratic(m),
                    diagnostics,
                }),
                Ok(m) => unresolved(format!("map has degree {} above two", m.degree()), diagnostics),
                Err(e) => unresolved(format!("map not recovered at degree two: {e}"), diagnostics),
            }
        }
        PlanarizationClass::Indeterminate(why) => unresolved(why, diagnostics),
    }
}

fn finish_co_trivial(
    f: &dyn MapEvaluator,
    web: &ConicSystem,
    o: &PPoint,
    seed: u64,
    mut diagnostics: Vec<String>,
) -> Result<WebVerdict> {
    diagnostics.push(format!("composite is co-trivial with center {o}"));
    // members whose hyperplane passes through o
    let lambdas = linalg::nullspace(&[o.coords().to_vec()], 4);
    let case = match web.subsystem(&lambdas).and_then(|net| invert_via_net(f, &net, seed)) {
        Ok(w) => WebCase::InverseQuadratic(w),
        Err(e) => {
            diagnostics.push(format!("net inversion failed: {e}"));
            WebCase::Unresolved(format!("co-trivial composite but the net does not invert the map: {e}"))
        }
    };
    Ok(WebVerdict { case, diagnostics })
}

fn adjugate3(m: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let c = |r: usize, s: usize| {
        let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
        let (s0, s1) = ((s + 1) % 3, (s + 2) % 3);
        &m[r0][s0] * &m[r1][s1] - &m[r0][s1] * &m[r1][s0]
    };
    (0..3).map(|i| (0..3).map(|j| c(j, i)).collect()).collect()
}

/// Quadratic map `W = P^-1 . Phi_net` with `W(f(x)) = x`, where `P` is
/// the collineation `Phi_net . f`.
pub fn invert_via_net(f: &dyn MapEvaluator, net: &ConicSystem, seed: u64) -> Result<RatMap> {
    if net.dimension() != 2 || f.target_dim() != 2 {
        return Err(Error::InvalidInput("net inversion needs a net and a map into RP^2".into()));
    }
    let phi = phi_map(net)?;
    let g = Composed::new(phi.clone(), f)?;
    let mode = f.mode();

    for line in screening_lines(&g, 10, seed) {
        let pts = line_samples(&g, &line, 8);
        if pts.len() < 4 {
            continue;
        }
        let rows: Vec<Vec<Scalar>> = pts.into_iter().map(|(_, _, y)| y).collect();
        if null_vector(&rows, 3, mode).is_none() {
            return Err(Error::NotCollinear);
        }
    }

    let p = fit_map(&g, 1, seed).map_err(|e| Error::ProjectiveFitFailed(e.to_string()))?;
    let pm = p
        .map
        .matrix()
        .filter(|m| !linalg::det_exact(m).is_zero())
        .ok_or_else(|| Error::ProjectiveFitFailed(format!("fitted map {} is not a collineation", p.map)))?;
    let w = RatMap::linear(&adjugate3(&pm))?.compose(&phi)?;

    let mut checked = 0;
    for (u, v) in sample_points(f, seed, 40) {
        if checked == 20 {
            break;
        }
        let Some(y) = f.eval(&u, &v) else { continue };
        let Some(x) = w.eval(&y) else { continue };
        let want = [Scalar::one(), u, v];
        let ok = match mode {
            Mode::Exact => PPoint::new(x).ok() == PPoint::new(want.to_vec()).ok(),
            Mode::Float => projective_residual(&x, &want) < FLOAT_FIT_TOL,
        };
        if !ok {
            return Err(Error::ProjectiveFitFailed(format!("W(f(x)) differs from x at ({}, {})", want[1], want[2])));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::ProjectiveFitFailed("no validation point".into()));
    }
    Ok(w)
}

/// Outcome of the sphere classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KhovanskiiCase {
    /// The image lies in the circle cut out by this plane.
    InCircle(Hyperplane),
    CoTrivial(PPoint),
    /// The map, quadratic, with its co-triviality center when it has one.
    Quadratic { map: RatMap, center: Option<PPoint> },
}

impl KhovanskiiCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InCircle(_) => "InCircle",
            Self::CoTrivial(_) => "CoTrivial",
            Self::Quadratic { .. } => "Quadratic",
        }
    }
}

/// Tolerance for the unit-sphere check on float samples.
pub const SPHERE_TOL: f64 = 1e-9;

/// Classification of a map into the unit sphere of 3-space taking lines to
/// circles, read as a planarization into RP^3 through `[1:X:Y:Z]`.
///
/// A quadratic fit takes precedence over co-triviality, since the
/// quadratic maps of the sphere are themselves co-trivial.
pub fn khovanskii_classify(f: &dyn MapEvaluator, seed: u64) -> Result<KhovanskiiCase> {
    if f.target_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: f.target_dim(),
        });
    }
    for (u, v) in sample_points(f, seed, 40) {
        let Some(y) = f.eval(&u, &v) else { continue };
        let gap = &y[1] * &y[1] + &y[2] * &y[2] + &y[3] * &y[3] - &y[0] * &y[0];
        let off = match f.mode() {
            Mode::Exact => !gap.is_zero(),
            Mode::Float => (to_f64(&gap) / to_f64(&(&y[0] * &y[0]))).abs() > SPHERE_TOL,
        };
        if off {
            return Err(Error::NotOnSphere(format!("sample at ({u}, {v}) is off the unit sphere")));
        }
    }
    if let Some(h) = sampled_trivial_witness(f, seed) {
        return Ok(KhovanskiiCase::InCircle(h));
    }
    match fit_map(f, 3, seed) {
        Ok(fit) => {
            let class = classify(&fit.map, seed)?;
            match class {
                PlanarizationClass::Trivial(h) => Ok(KhovanskiiCase::InCircle(h)),
                _ if fit.map.degree() <= 2 => Ok(KhovanskiiCase::Quadratic {
                    center: match class {
                        PlanarizationClass::CoTrivial(o) => Some(o),
                        _ => None,
                    },
                    map: fit.map,
                }),
                PlanarizationClass::CoTrivial(o) => Ok(KhovanskiiCase::CoTrivial(o)),
                PlanarizationClass::Rational(d) => Err(Error::DegreeAnomaly(d as usize)),
                PlanarizationClass::Indeterminate(why) => Err(Error::NotAPlanarization(why)),
            }
        }
        Err(e) => match sampled_center_of(f, seed) {
            Some(o) => Ok(KhovanskiiCase::CoTrivial(o)),
            None => Err(Error::NotAPlanarization(format!("no rational model of degree at most 3: {e}"))),
        },
    }
}

/// Random web with integer coefficients in `[-9, 9]`.
pub fn random_web(seed: u64) -> ConicSystem {
    let mut rng = rng_for(seed, "random_web", 0);
    loop {
        let basis = (0..4)
            .map(|_| {
                let mut p = crate::mpoly::MPoly::zero(3);
                for e in monomials(3, 2) {
                    p.add_term(e, random_int(&mut rng, -9, 9));
                }
                HPoly::new(2, p)
            })
            .collect::<Result<Vec<_>>>();
        if let Ok(web) = basis.and_then(ConicSystem::new) {
            return web;
        }
    }
}

/// Inversion in the unit circle, `[x1^2 + x2^2 : x0 x1 : x0 x2]`.
pub fn inversion() -> RatMap {
    reduce_map(vec![
        HPoly::from_int_terms(3, 2, &[(1, &[0, 2, 0]), (1, &[0, 0, 2])]),
        HPoly::from_int_terms(3, 2, &[(1, &[1, 1, 0])]),
        HPoly::from_int_terms(3, 2, &[(1, &[1, 0, 1])]),
    ])
    .expect("nonzero")
}

/// Inverse stereographic projection onto the unit sphere.
pub fn inverse_stereographic() -> RatMap {
    reduce_map(vec![
        HPoly::from_int_terms(3, 2, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (1, &[0, 0, 2])]),
        HPoly::from_int_terms(3, 2, &[(2, &[1, 1, 0])]),
        HPoly::from_int_terms(3, 2, &[(2, &[1, 0, 1])]),
        HPoly::from_int_terms(3, 2, &[(-1, &[2, 0, 0]), (1, &[0, 2, 0]), (1, &[0, 0, 2])]),
    ])
    .expect("nonzero")
}

/// Value of `dot(lambda, phi(y))` for each sample, for checking a member
/// against image points.
pub fn member_residuals(sys: &ConicSystem, lambda: &PPoint, ys: &[Vec<Scalar>]) -> Vec<Scalar> {
    let c = sys.member(lambda.coords());
    ys.iter().map(|y| c.eval(y)).collect()
}
