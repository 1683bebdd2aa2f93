//! Dual planarizations: the map sending a line of the plane to the
//! hyperplane carrying its image, and the trivial / co-trivial / rational
//! classification built on it.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetplan::{nondegenerate_at, MapEvaluator, RationalSource, Region};
use crate::linalg::{self, FLOAT_RANK_TOL};
use crate::mpoly::MPoly;
use crate::poly::{line_parameterization, reduce_map, HPoly, RatMap};
use crate::projcore::{hyperplane_through, Hyperplane, HyperplaneFit, PLine2, PPoint};
use crate::ratfit::{fit_map, rationalize_vec};
use crate::scalar::{int, random_int, random_ratio, ratio, rng_for, Mode, Scalar};

/// Verdict of the trichotomy for planarizations into RP^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanarizationClass {
    /// The whole image lies in this hyperplane.
    Trivial(Hyperplane),
    /// Every line's hyperplane passes through this point.
    CoTrivial(PPoint),
    /// Neither; the map is rational of this degree.
    Rational(u32),
    Indeterminate(String),
}

impl PlanarizationClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Trivial(_) => "Trivial",
            Self::CoTrivial(_) => "CoTrivial",
            Self::Rational(_) => "Rational",
            Self::Indeterminate(_) => "Indeterminate",
        }
    }
}

/// Base points for the nondegeneracy pre-check: a 3x3 grid in the unit
/// square, then 16 seeded points.
fn precheck_points(seed: u64) -> Vec<(Scalar, Scalar)> {
    let mut pts = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            pts.push((ratio(i, 4), ratio(j, 4)));
        }
    }
    let mut rng = rng_for(seed, "dual_map/precheck", 0);
    for _ in 0..16 {
        pts.push((random_ratio(&mut rng, 30, 31), random_ratio(&mut rng, 30, 31)));
    }
    pts
}

/// Whether `f` is nondegenerate at one of the pre-check points.
pub fn somewhere_nondegenerate(f: &RatMap, seed: u64) -> Result<bool> {
    let src = RationalSource::unit(f.clone())?;
    for (u, v) in precheck_points(seed) {
        match nondegenerate_at(&src, (&u, &v)) {
            Ok(true) => return Ok(true),
            Ok(false) | Err(Error::OnIndeterminacy) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

/// Direction vectors `w` for the sections `l x w`; later sets are tried
/// when an earlier one collapses.
fn section_sets(n: usize, seed: u64) -> Vec<Vec<Vec<Scalar>>> {
    let fixed: Vec<Vec<Scalar>> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3], [1, -1, 2], [2, 1, -1], [3, -2, 1]]
        .iter()
        .map(|w| w.iter().map(|&x| int(x)).collect())
        .collect();
    let mut sets = Vec::new();
    if n <= fixed.len() {
        sets.push(fixed[..n].to_vec());
    }
    let mut rng = rng_for(seed, "dual_map/sections", 0);
    for _ in 0..3 {
        sets.push((0..n).map(|_| (0..3).map(|_| random_int(&mut rng, -7, 7)).collect()).collect());
    }
    sets
}

/// `l x w` as three linear forms in the line coordinates `l`.
fn section(w: &[Scalar]) -> Vec<HPoly> {
    let lin = |c: [Scalar; 3]| HPoly::linear(&c);
    let z = Scalar::zero;
    vec![
        lin([z(), w[2].clone(), -w[1].clone()]),
        lin([-w[2].clone(), z(), w[0].clone()]),
        lin([w[1].clone(), -w[0].clone(), z()]),
    ]
}

/// Random line through the pre-check square and a random point on it.
fn random_line_and_point<R: rand::Rng>(rng: &mut R) -> Option<(PLine2, Vec<Scalar>)> {
    let l: Vec<Scalar> = (0..3).map(|_| random_int(rng, -9, 9)).collect();
    let line = Hyperplane::new(l).ok()?;
    let (p, q) = line_parameterization(&line);
    let (s, t) = (random_int(rng, -9, 9), random_int(rng, -9, 9));
    let x: Vec<Scalar> = p.iter().zip(&q).map(|(a, b)| a * &s + b * &t).collect();
    x.iter().any(|c| !c.is_zero()).then_some((line, x))
}

/// The dual map: line `l` (a point of the dual plane) goes to the
/// hyperplane containing the image of `l`, computed symbolically from the
/// images of `n` sections of the line and reduced.
pub fn dual_map(f: &RatMap, seed: u64) -> Result<RatMap> {
    if f.domain_vars() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: f.domain_vars(),
        });
    }
    let n = f.target_dim();
    if n < 2 {
        return Err(Error::InvalidInput("dual maps need a target of dimension at least 2".into()));
    }
    if !somewhere_nondegenerate(f, seed)? {
        return Err(Error::EverywhereDegenerate);
    }
    let mut dual = None;
    for ws in section_sets(n, seed) {
        let images: Vec<Vec<MPoly>> = ws
            .iter()
            .map(|w| {
                let s = section(w);
                f.components().iter().map(|c| c.compose(&s).poly().clone()).collect()
            })
            .collect();
        let w = linalg::wedge(&images);
        if w.iter().all(Zero::is_zero) {
            continue;
        }
        let deg = n as u32 * f.degree();
        let comps = w
            .into_iter()
            .map(|p| {
                if p.is_zero() {
                    Ok(HPoly::zero(3, deg))
                } else {
                    HPoly::new(deg, p)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        dual = Some(reduce_map(comps)?);
        break;
    }
    let dual = dual.ok_or(Error::SectionCollapse)?;
    validate_dual(f, &dual, seed)?;
    Ok(dual)
}

fn validate_dual(f: &RatMap, dual: &RatMap, seed: u64) -> Result<()> {
    let mut rng = rng_for(seed, "dual_map/validate", 0);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 10 && tries < 200 {
        tries += 1;
        let Some((line, x)) = random_line_and_point(&mut rng) else {
            continue;
        };
        let (Some(h), Some(y)) = (dual.eval(line.covector()), f.eval(&x)) else {
            continue;
        };
        checked += 1;
        if !crate::scalar::dot(&h, &y).is_zero() {
            return Err(Error::NotAPlanarization(format!(
                "image of a point of {line} is off its dual hyperplane"
            )));
        }
    }
    Ok(())
}

/// Hyperplane through the image of one line, from image points alone.
pub fn pointwise_dual(f: &RatMap, line: &PLine2) -> Result<Hyperplane> {
    let n = f.target_dim();
    let (p, q) = line_parameterization(line);
    let mut pts = Vec::new();
    for t in 0..(4 * n as i64 + 8) {
        if pts.len() == 2 * n + 2 {
            break;
        }
        let x: Vec<Scalar> = p.iter().zip(&q).map(|(a, b)| a + b * int(t)).collect();
        if let Ok(y) = f.eval_point(&x) {
            pts.push(y);
        }
    }
    if pts.len() < n + 1 {
        return Err(Error::OnIndeterminacy);
    }
    match hyperplane_through(&pts)? {
        HyperplaneFit::Unique(h) => Ok(h),
        HyperplaneFit::NotUnique => Err(Error::Degenerate),
        HyperplaneFit::NoneExists => Err(Error::NotAPlanarization(format!(
            "the image of {line} spans the whole target"
        ))),
    }
}

/// Common point of the hyperplanes when they meet in exactly one point.
pub fn common_point(hs: &[Hyperplane]) -> Option<PPoint> {
    let rows: Vec<Vec<Scalar>> = hs.iter().map(|h| h.covector().to_vec()).collect();
    let ns = linalg::nullspace(&rows, rows.first()?.len());
    if ns.len() == 1 {
        PPoint::new(ns.into_iter().next().expect("one")).ok()
    } else {
        None
    }
}

/// Co-triviality from pointwise duals of seeded random lines.
pub fn sampled_center(f: &RatMap, seed: u64, lines: usize) -> Result<Option<PPoint>> {
    let mut rng = rng_for(seed, "classify/center", 0);
    let mut hs = Vec::new();
    let mut tries = 0;
    while hs.len() < lines && tries < 10 * lines {
        tries += 1;
        let l: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -9, 9)).collect();
        let Ok(line) = Hyperplane::new(l) else { continue };
        match pointwise_dual(f, &line) {
            Ok(h) => hs.push(h),
            Err(Error::Degenerate) | Err(Error::OnIndeterminacy) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(common_point(&hs))
}

/// Above this degree the dual is not formed symbolically.
pub const SYMBOLIC_DUAL_MAX_DEGREE: u32 = 3;

/// Trichotomy for a rational map from RP^2.
///
/// Maps whose dual cannot be formed (degenerate everywhere, or failing the
/// containment check) are reported as `Indeterminate`. Above degree three
/// the co-triviality test works from pointwise duals of 12 seeded lines.
pub fn classify(f: &RatMap, seed: u64) -> Result<PlanarizationClass> {
    if let Some(rel) = f.linear_relations().into_iter().next() {
        return Ok(PlanarizationClass::Trivial(Hyperplane::new(rel)?));
    }
    if f.degree() > SYMBOLIC_DUAL_MAX_DEGREE {
        return Ok(match sampled_center(f, seed, 12) {
            Ok(Some(o)) => PlanarizationClass::CoTrivial(o),
            Ok(None) => PlanarizationClass::Indeterminate(format!(
                "degree {} map is neither trivial nor co-trivial",
                f.degree()
            )),
            Err(e) => PlanarizationClass::Indeterminate(e.to_string()),
        });
    }
    match dual_map(f, seed) {
        Ok(dual) => Ok(match dual.linear_relations().into_iter().next() {
            Some(rel) => PlanarizationClass::CoTrivial(PPoint::new(rel)?),
            None => PlanarizationClass::Rational(f.degree()),
        }),
        Err(e @ (Error::EverywhereDegenerate | Error::NotAPlanarization(_) | Error::SectionCollapse)) => {
            Ok(PlanarizationClass::Indeterminate(e.to_string()))
        }
        Err(e) => Err(e),
    }
}

/// Sample points of an evaluator: every grid node, or seeded points of its
/// region.
pub fn sample_points(f: &dyn MapEvaluator, seed: u64, count: usize) -> Vec<(Scalar, Scalar)> {
    if let Some((us, vs)) = f.grid() {
        return vs
            .iter()
            .flat_map(|v| us.iter().map(move |u| (u.clone(), v.clone())))
            .collect();
    }
    let region = f.region();
    let mut rng = rng_for(seed, "sample_points", 0);
    (0..count)
        .map(|_| {
            let s = ratio(rand::Rng::random_range(&mut rng, 0..=997), 997);
            let t = ratio(rand::Rng::random_range(&mut rng, 0..=997), 997);
            region.at(&s, &t)
        })
        .collect()
}

/// Hyperplane from a null vector of sampled rows, exact or float.
fn null_hyperplane(rows: &[Vec<Scalar>], mode: Mode) -> Option<Hyperplane> {
    let ncols = rows.first()?.len();
    let v = match mode {
        Mode::Exact => {
            let ns = linalg::nullspace(rows, ncols);
            (ns.len() == 1).then(|| ns.into_iter().next().expect("one"))?
        }
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
            if ns.len() != 1 {
                return None;
            }
            rationalize_vec(&ns[0])
                .or_else(|| ns[0].iter().map(|&x| Scalar::from_float(x)).collect())?
        }
    };
    Hyperplane::new(v).ok()
}

/// Hyperplane containing every sampled image point, if the samples have
/// corank exactly one.
pub fn sampled_trivial_witness(f: &dyn MapEvaluator, seed: u64) -> Option<Hyperplane> {
    let rows: Vec<Vec<Scalar>> = sample_points(f, seed, 40)
        .iter()
        .filter_map(|(u, v)| f.eval(u, v))
        .collect();
    if rows.len() < f.target_dim() + 1 {
        return None;
    }
    null_hyperplane(&rows, f.mode())
}

/// Per-line hyperplanes of a sampled map: grid rows, columns and
/// diagonals, or seeded segments through the region.
fn sampled_line_hyperplanes(f: &dyn MapEvaluator, seed: u64) -> Vec<Hyperplane> {
    let n = f.target_dim();
    let mut lines: Vec<Vec<Vec<Scalar>>> = Vec::new();
    if let Some((us, vs)) = f.grid() {
        let at = |i: usize, j: usize| f.eval(&us[i], &vs[j]);
        for j in 0..vs.len() {
            lines.push((0..us.len()).filter_map(|i| at(i, j)).collect());
        }
        for i in 0..us.len() {
            lines.push((0..vs.len()).filter_map(|j| at(i, j)).collect());
        }
        // index diagonals are lines only on evenly spaced axes
        let even = |a: &[Scalar]| a.windows(3).all(|w| &w[1] - &w[0] == &w[2] - &w[1]);
        let offsets = if even(us) && even(vs) { -(vs.len() as i64)..(us.len() as i64) } else { 0..0 };
        for off in offsets {
            lines.push(
                (0..vs.len())
                    .filter_map(|j| {
                        let i = j as i64 + off;
                        (0..us.len() as i64).contains(&i).then(|| at(i as usize, j)).flatten()
                    })
                    .collect(),
            );
        }
    } else {
        let region = f.region();
        let mut rng = rng_for(seed, "classify/lines", 0);
        for _ in 0..16 {
            let a = region.at(&ratio(rand::Rng::random_range(&mut rng, 1..=9), 10), &ratio(rand::Rng::random_range(&mut rng, 1..=9), 10));
            let dir = (random_int(&mut rng, -4, 4), random_int(&mut rng, -4, 4));
            if dir.0.is_zero() && dir.1.is_zero() {
                continue;
            }
            let step = (&region.u.1 - &region.u.0).max(&region.v.1 - &region.v.0) / int(64);
            lines.push(
                (-(2 * n as i64 + 2)..=(2 * n as i64 + 2))
                    .filter_map(|k| {
                        let t = &step * int(k);
                        f.eval(&(&a.0 + &t * &dir.0), &(&a.1 + &t * &dir.1))
                    })
                    .collect(),
            );
        }
    }
    lines
        .iter()
        .filter(|pts| pts.len() >= n + 2)
        .filter_map(|pts| null_hyperplane(pts, f.mode()))
        .collect()
}

/// Common point of the sampled per-line hyperplanes.
pub fn sampled_center_of(f: &dyn MapEvaluator, seed: u64) -> Option<PPoint> {
    let hs = sampled_line_hyperplanes(f, seed);
    if hs.len() < f.target_dim() + 2 {
        return None;
    }
    let rows: Vec<Vec<Scalar>> = hs.iter().map(|h| h.covector().to_vec()).collect();
    let ncols = rows[0].len();
    let v = match f.mode() {
        Mode::Exact => {
            let ns = linalg::nullspace(&rows, ncols);
            (ns.len() == 1).then(|| ns.into_iter().next().expect("one"))?
        }
        Mode::Float => {
            let m = linalg::to_f64_matrix(&rows);
            let ns = linalg::nullspace_f64(&m, ncols, FLOAT_RANK_TOL);
            if ns.len() != 1 {
                return None;
            }
            rationalize_vec(&ns[0]).or_else(|| ns[0].iter().map(|&x| Scalar::from_float(x)).collect())?
        }
    };
    PPoint::new(v).ok()
}

/// Whether every sweep point is degenerate.
fn everywhere_degenerate(f: &dyn MapEvaluator, seed: u64) -> bool {
    let pts = sample_points(f, seed, 25);
    let mut tested = 0;
    for (u, v) in &pts {
        match nondegenerate_at(f, (u, v)) {
            Ok(true) => return false,
            Ok(false) => tested += 1,
            Err(_) => {}
        }
    }
    tested > 0
}

/// Trichotomy for a sampled map: image rank, degeneracy sweep, then a
/// rational model fitted at degree three; without a model, a common
/// point of sampled per-line hyperplanes still gives `CoTrivial`.
///
/// The verdict describes the sampled region only.
pub fn classify_sampled(f: &dyn MapEvaluator, seed: u64) -> Result<PlanarizationClass> {
    if let Some(map) = f.rational() {
        return classify(map, seed);
    }
    if let Some(h) = sampled_trivial_witness(f, seed) {
        return Ok(PlanarizationClass::Trivial(h));
    }
    if everywhere_degenerate(f, seed) {
        return Ok(PlanarizationClass::Indeterminate(
            "degenerate at every swept point while the image spans the target".into(),
        ));
    }
    match fit_map(f, 3, seed) {
        Ok(fit) => classify(&fit.map, seed),
        Err(fit_err) => Ok(match sampled_center_of(f, seed) {
            Some(o) => PlanarizationClass::CoTrivial(o),
            None => PlanarizationClass::Indeterminate(format!("no rational model of degree at most 3 ({fit_err})")),
        }),
    }
}

/// Unit-square region used when rational maps are sampled.
pub fn default_region() -> Region {
    Region::new((int(0), Scalar::one()), (int(0), Scalar::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetplan::SampleGrid;
    use crate::scalar::{ints, to_f64};
    use proptest::prelude::*;

    fn q(terms: &[(i64, &[u32])]) -> HPoly {
        let d = terms[0].1.iter().sum();
        HPoly::from_int_terms(3, d, terms)
    }

    fn quad_map() -> RatMap {
        reduce_map(vec![
            q(&[(1, &[2, 0, 0])]),
            q(&[(1, &[1, 1, 0])]),
            q(&[(1, &[1, 0, 1])]),
            q(&[(1, &[0, 1, 1])]),
        ])
        .unwrap()
    }

    fn generic_quadratic(seed: u64) -> RatMap {
        let mut rng = rng_for(seed, "dualize-test", 0);
        loop {
            let comps: Vec<HPoly> = (0..4)
                .map(|_| {
                    let mut p = MPoly::zero(3);
                    for e in crate::poly::monomials(3, 2) {
                        p.add_term(e, random_int(&mut rng, -9, 9));
                    }
                    HPoly::new(2, p).unwrap()
                })
                .collect();
            if let Ok(m) = reduce_map(comps) {
                if m.degree() == 2 && m.linear_relations().is_empty() {
                    return m;
                }
            }
        }
    }

    #[test]
    fn dual_of_the_quadratic_example_is_linear() {
        let d = dual_map(&quad_map(), 1).unwrap();
        assert_eq!(d.degree(), 1);
        let want = RatMap::linear(&[ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[0, 0, 0])]).unwrap();
        assert_eq!(d, want);
        // oracle: l0 x0^2 + l1 x0 x1 + l2 x0 x2 = x0 (l . x) vanishes on l
        let mut rng = rng_for(3, "oracle", 0);
        for _ in 0..10 {
            let (line, x) = random_line_and_point(&mut rng).unwrap();
            let y = quad_map().eval(&x);
            if let Some(y) = y {
                assert!(crate::scalar::dot(&d.eval(line.covector()).unwrap(), &y).is_zero());
            }
        }
    }

    #[test]
    fn generic_quadratic_duals_are_cubic() {
        let f = generic_quadratic(11);
        let d = dual_map(&f, 1).unwrap();
        assert_eq!(d.degree(), 3);
    }

    #[test]
    fn affine_linear_maps_are_everywhere_degenerate() {
        let f = RatMap::linear(&[ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[1, 2, -1])]).unwrap();
        assert_eq!(dual_map(&f, 1), Err(Error::EverywhereDegenerate));
    }

    #[test]
    fn trichotomy_examples() {
        let trivial = reduce_map(vec![
            q(&[(1, &[2, 0, 0])]),
            q(&[(1, &[1, 1, 0])]),
            q(&[(1, &[1, 0, 1])]),
            q(&[(1, &[2, 0, 0]), (1, &[1, 1, 0])]),
        ])
        .unwrap();
        match classify(&trivial, 1).unwrap() {
            PlanarizationClass::Trivial(h) => assert_eq!(h, Hyperplane::from_ints(&[1, 1, 0, -1]).unwrap()),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            classify(&quad_map(), 1).unwrap(),
            PlanarizationClass::CoTrivial(PPoint::from_ints(&[0, 0, 0, 1]).unwrap())
        );
        assert_eq!(classify(&generic_quadratic(5), 1).unwrap(), PlanarizationClass::Rational(2));
    }

    #[test]
    fn pointwise_and_symbolic_duals_agree() {
        let f = generic_quadratic(7);
        let d = dual_map(&f, 1).unwrap();
        for l in [[1, 2, 3], [2, -1, 5], [0, 1, 1]] {
            let line = Hyperplane::from_ints(&l).unwrap();
            let h = pointwise_dual(&f, &line).unwrap();
            assert_eq!(PPoint::new(d.eval(line.covector()).unwrap()).unwrap(), h.dual());
        }
    }

    #[test]
    fn quartic_co_trivial_maps_use_sampled_duals() {
        // cone over a quartic: every line's hyperplane contains [0:0:0:1]
        let g = q(&[(1, &[0, 4, 0]), (2, &[1, 2, 1]), (-3, &[0, 1, 3]), (1, &[2, 2, 0])]);
        let f = reduce_map(vec![q(&[(1, &[4, 0, 0])]), q(&[(1, &[3, 1, 0])]), q(&[(1, &[3, 0, 1])]), g]).unwrap();
        assert_eq!(f.degree(), 4);
        assert_eq!(
            classify(&f, 1).unwrap(),
            PlanarizationClass::CoTrivial(PPoint::from_ints(&[0, 0, 0, 1]).unwrap())
        );
    }

    #[test]
    fn non_planarizations_are_indeterminate() {
        // (u^2, v, u^3): lines are not carried into planes
        let f = reduce_map(vec![
            q(&[(1, &[3, 0, 0])]),
            q(&[(1, &[1, 2, 0])]),
            q(&[(1, &[2, 0, 1])]),
            q(&[(1, &[0, 3, 0])]),
        ])
        .unwrap();
        assert!(matches!(classify(&f, 1).unwrap(), PlanarizationClass::Indeterminate(_)));
    }

    #[test]
    fn sampled_classification_on_grids() {
        let axis: Vec<Scalar> = (0..11).map(|k| ratio(k, 4)).collect();
        let sample = |m: &RatMap, mode: Mode| {
            SampleGrid::from_fn(axis.clone(), axis.clone(), mode, |u, v| {
                let y = m.eval(&[Scalar::one(), u.clone(), v.clone()]).unwrap();
                y[1..]
                    .iter()
                    .map(|x| {
                        let e = x / &y[0];
                        match mode {
                            Mode::Exact => e,
                            Mode::Float => Scalar::from_float(to_f64(&e)).unwrap(),
                        }
                    })
                    .collect()
            })
            .unwrap()
        };
        let g = sample(&quad_map(), Mode::Float);
        assert_eq!(
            classify_sampled(&g, 1).unwrap(),
            PlanarizationClass::CoTrivial(PPoint::from_ints(&[0, 0, 0, 1]).unwrap())
        );
        let flat = RatMap::linear(&[ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[1, 2, -1])]).unwrap();
        let g = sample(&flat, Mode::Exact);
        assert_eq!(
            classify_sampled(&g, 1).unwrap(),
            PlanarizationClass::Trivial(Hyperplane::from_ints(&[1, 2, -1, -1]).unwrap())
        );
    }

    #[test]
    fn biduality_on_a_generic_quadratic() {
        let f = generic_quadratic(21);
        let dd = dual_map(&dual_map(&f, 1).unwrap(), 1).unwrap();
        assert_eq!(dd, f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn dual_hyperplanes_contain_line_images(seed in 0u64..1000) {
            let f = generic_quadratic(seed);
            let d = dual_map(&f, seed).unwrap();
            prop_assert!(d.degree() <= 3);
            let mut rng = rng_for(seed, "containment", 0);
            let mut checked = 0;
            while checked < 10 {
                let Some((line, x)) = random_line_and_point(&mut rng) else { continue };
                let (Some(h), Some(y)) = (d.eval(line.covector()), f.eval(&x)) else { continue };
                prop_assert!(crate::scalar::dot(&h, &y).is_zero());
                checked += 1;
            }
        }

        #[test]
        fn trivial_iff_linear_relation(seed in 0u64..1000, dependent in any::<bool>()) {
            let mut f = generic_quadratic(seed);
            if dependent {
                let c = f.components();
                let last = c[0].add(&c[1].scale(&int(2)));
                f = reduce_map(vec![c[0].clone(), c[1].clone(), c[2].clone(), last]).unwrap();
            }
            let is_trivial = matches!(classify(&f, seed).unwrap(), PlanarizationClass::Trivial(_));
            let deg1 = crate::poly::implicitize(&f, 1).is_some();
            prop_assert_eq!(is_trivial, deg1);
            prop_assert_eq!(is_trivial, dependent);
        }

        #[test]
        fn degree_one_maps_are_degenerate_and_trivial(rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 4)) {
            let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| ints(r)).collect();
            let Ok(f) = RatMap::linear(&rows) else { return Ok(()) };
            prop_assume!(f.degree() == 1);
            let src = RationalSource::unit(f.clone()).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    let (u, v) = (ratio(i, 4), ratio(j, 4));
                    if let Ok(nd) = nondegenerate_at(&src, (&u, &v)) {
                        prop_assert!(!nd);
                    }
                }
            }
            prop_assert!(matches!(classify(&f, 1).unwrap(), PlanarizationClass::Trivial(_)));
        }
    }
}
