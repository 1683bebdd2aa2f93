//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Lines are written straight to stdout so they show up even when the
//! harness captures test output.

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use planar::conicweb::{
    classify_web, inverse_stereographic, inversion, invert_via_net, khovanskii_classify, phi_map, ConicSystem,
    KhovanskiiCase, WebCase,
};
use planar::dualize::{classify, dual_map, pointwise_dual, PlanarizationClass};
use planar::gen::{generate, MapKind};
use planar::jetplan::{jet_of, omega, FnSource, RationalSource, Region};
use planar::mpoly::MPoly;
use planar::poly::{implicitize, reduce_map, span_dim, HPoly, RatMap, UniTuple};
use planar::projcore::{Hyperplane, PPoint};
use planar::ratfit::{fit_bi, fit_uni, integer_nodes, BiRat, UniRat};
use planar::scalar::{dot, int, random_int, ratio, rng_for, to_f64};
use planar::upoly::UPoly;
use planar::{Mode, Scalar};

/// Wall-clock budget for criterion 1.
const CUBIC_DUALS_BUDGET: Duration = Duration::from_secs(60);
/// Generic maps required to have a dual of degree exactly three.
const CUBIC_DUALS_MIN_EXACT: usize = 8;
/// Span-bound cases required to reach equality.
const SPAN_MIN_EQUAL: usize = 25;

struct Verdict {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, v: &Verdict) {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{tag} criterion {n:>2} {name}: {}", v.detail).unwrap();
    out.flush().unwrap();
}

fn q2(t: &[(i64, &[u32])]) -> HPoly {
    HPoly::from_int_terms(3, 2, t)
}

fn quad_map() -> RatMap {
    reduce_map(vec![q2(&[(1, &[2, 0, 0])]), q2(&[(1, &[1, 1, 0])]), q2(&[(1, &[1, 0, 1])]), q2(&[(1, &[0, 1, 1])])]).unwrap()
}

fn same_point(a: &[Scalar], b: &[Scalar]) -> bool {
    PPoint::new(a.to_vec()).ok() == PPoint::new(b.to_vec()).ok()
}

/// Generic quadratic maps of criterion 1: `gen` seeds from 1, skipping
/// trivial and co-trivial ones, until ten are collected.
fn criterion_one_maps() -> (Vec<(u64, RatMap)>, Vec<u64>) {
    let kind: MapKind = "quadratic-rp3".parse().unwrap();
    let mut maps = Vec::new();
    let mut rejected = Vec::new();
    let mut seed = 1;
    while maps.len() < 10 {
        let f = generate(kind, seed);
        match classify(&f, seed).unwrap() {
            PlanarizationClass::Trivial(_) | PlanarizationClass::CoTrivial(_) => rejected.push(seed),
            _ => maps.push((seed, f)),
        }
        seed += 1;
    }
    (maps, rejected)
}

/// Degree of the dual along a pencil of lines, from pointwise duals and
/// univariate fits of coordinate ratios.
fn pencil_degree_oracle(f: &RatMap, seed: u64) -> usize {
    let mut rng = rng_for(seed, "acceptance/pencil", 0);
    let a0: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -9, 9)).collect();
    let a1: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -9, 9)).collect();
    let mut hs = Vec::new();
    for t in 0..12 {
        let l: Vec<Scalar> = a0.iter().zip(&a1).map(|(x, y)| x + y * int(t)).collect();
        let Ok(line) = Hyperplane::new(l) else { continue };
        if let Ok(h) = pointwise_dual(f, &line) {
            hs.push((int(t), h.covector().to_vec()));
        }
    }
    let k = (0..4).find(|&k| hs.iter().all(|(_, h)| !h[k].is_zero())).expect("chart");
    (0..4)
        .filter(|&i| i != k)
        .map(|i| {
            let samples: Vec<(Scalar, Scalar)> = hs.iter().map(|(t, h)| (t.clone(), &h[i] / &h[k])).collect();
            fit_uni(&samples, 4, Mode::Exact).unwrap().degree()
        })
        .max()
        .unwrap()
}

fn c1_cubic_duals(maps: &[(u64, RatMap)], rejected: &[u64]) -> (Verdict, Vec<(u64, RatMap, RatMap)>) {
    let start = Instant::now();
    let mut duals = Vec::new();
    let mut degrees = Vec::new();
    let mut oracle_ok = true;
    for (seed, f) in maps {
        let d = dual_map(f, *seed).unwrap();
        degrees.push(d.degree());
        duals.push((*seed, f.clone(), d));
    }
    let elapsed = start.elapsed();
    for (seed, f, d) in &duals {
        oracle_ok &= pencil_degree_oracle(f, *seed) == d.degree() as usize;
    }
    let exact3 = degrees.iter().filter(|&&d| d == 3).count();
    let pass = degrees.iter().all(|&d| d <= 3) && exact3 >= CUBIC_DUALS_MIN_EXACT && elapsed < CUBIC_DUALS_BUDGET && oracle_ok;
    (
        Verdict {
            pass,
            detail: format!(
                "degrees {degrees:?}, {exact3} cubic, pencil oracle {}, {:.2}s, rejected seeds {rejected:?}",
                if oracle_ok { "agrees" } else { "disagrees" },
                elapsed.as_secs_f64()
            ),
        },
        duals,
    )
}

fn c2_degree_bound() -> Verdict {
    let mut worst = Vec::new();
    let mut failures = 0;
    let mut evaluated = 0;
    for (kind, n) in [("quadratic-rp3", 3usize), ("quadratic-rp4", 4), ("cubic-rp4", 4)] {
        let f = generate(kind.parse().unwrap(), 2);
        let src = RationalSource::unit(f).unwrap();
        let bound = n * (n - 1) / 2;
        let mut max_deg = 0;
        let mut nonzero = 0;
        for i in 0..5 {
            for j in 0..5 {
                let (u, v) = (ratio(i + 1, 6), ratio(j + 1, 6));
                let Ok(jet) = jet_of(&src, (&u, &v), n - 1) else { continue };
                let w = omega(&jet).unwrap();
                evaluated += 1;
                if let Some(d) = w.degree() {
                    nonzero += 1;
                    max_deg = max_deg.max(d);
                    if d > bound {
                        failures += 1;
                    }
                }
            }
        }
        worst.push(format!("{kind}: max {max_deg} <= {bound} ({nonzero}/25 nonvanishing)"));
    }
    Verdict {
        pass: failures == 0 && evaluated == 75,
        detail: format!("{} over {evaluated} base points, {failures} violations", worst.join(", ")),
    }
}

fn c3_biduality(duals: &[(u64, RatMap, RatMap)]) -> Verdict {
    let mut ok = 0;
    let mut symbolic = 0;
    let mut checked_pts = 0;
    let rational: Vec<_> = duals.iter().filter(|(_, _, d)| d.degree() == 3).collect();
    for (seed, f, d) in &rational {
        let dd = dual_map(d, *seed).unwrap();
        if dd == *f {
            symbolic += 1;
        }
        let mut rng = rng_for(*seed, "acceptance/biduality", 0);
        let mut pts = 0;
        let mut good = true;
        while pts < 20 {
            let x: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -30, 30)).collect();
            let (Some(a), Some(b)) = (f.eval(&x), dd.eval(&x)) else { continue };
            pts += 1;
            good &= same_point(&a, &b);
        }
        checked_pts += pts;
        if good {
            ok += 1;
        }
    }
    Verdict {
        pass: ok == rational.len() && rational.len() >= CUBIC_DUALS_MIN_EXACT,
        detail: format!(
            "{ok}/{} maps agree at all {checked_pts} points, {symbolic} equal as maps",
            rational.len()
        ),
    }
}

fn c4_span_bound() -> Verdict {
    let mut rng = rng_for(4, "acceptance/span", 0);
    let mut equal = 0;
    let mut bound_ok = true;
    let mut oracle_ok = true;
    for case in 0..30 {
        let d = 1 + case % 3;
        let n = d + (case / 3) % (6 - d);
        let coeffs: Vec<Vec<Scalar>> = (0..=d).map(|_| (0..=n).map(|_| random_int(&mut rng, -9, 9)).collect()).collect();
        let t = UniTuple::new(coeffs).unwrap();
        let s = span_dim(&t);
        bound_ok &= s <= d + 1;
        if s == d + 1 {
            equal += 1;
        }
        // oracle: rank of curve points at many parameters
        let pts: Vec<Vec<f64>> = (0..8).map(|k| t.eval(&int(1), &int(k - 3)).iter().map(to_f64).collect()).collect();
        oracle_ok &= planar::linalg::rank_f64(&pts, n + 1, planar::linalg::FLOAT_RANK_TOL) == s;
    }
    Verdict {
        pass: bound_ok && oracle_ok && equal >= SPAN_MIN_EQUAL,
        detail: format!("bound held: {bound_ok}, equality in {equal}/30, point-rank oracle agrees: {oracle_ok}"),
    }
}

fn random_upoly<R: rand::Rng>(rng: &mut R, deg: usize) -> UPoly {
    UPoly::new((0..=deg).map(|_| random_int(rng, -9, 9)).collect())
}

fn c5_fitting() -> Verdict {
    let mut per_degree = Vec::new();
    let mut all = true;
    for d in 1..=3usize {
        let mut rng = rng_for(d as u64, "acceptance/unirat", 0);
        let mut ok = 0;
        let mut planted = 0;
        while planted < 50 {
            let (dn, dd) = if rng.random_bool(0.5) { (d, rng.random_range(0..=d)) } else { (rng.random_range(0..=d), d) };
            let r = UniRat::new(random_upoly(&mut rng, dn), random_upoly(&mut rng, dd));
            let Ok(r) = r else { continue };
            let nodes: Vec<Scalar> = (0..=2 * d as i64).map(int).collect();
            if r.degree() != d || nodes.iter().any(|x| r.eval(x).is_none()) {
                continue;
            }
            planted += 1;
            let samples: Vec<(Scalar, Scalar)> = nodes.iter().map(|x| (x.clone(), r.eval(x).unwrap())).collect();
            if fit_uni(&samples, d, Mode::Exact).as_ref() == Ok(&r) {
                ok += 1;
            }
        }
        all &= ok == 50;
        per_degree.push(format!("d={d}: {ok}/50"));
    }

    let mut rng = rng_for(5, "acceptance/birat", 0);
    let nodes = integer_nodes(2);
    let mut bi_ok = 0;
    let mut bi_planted = 0;
    let rand_mpoly = |rng: &mut rand_chacha::ChaCha8Rng, deg: u32| {
        let mut p = MPoly::zero(2);
        for a in 0..=deg {
            for b in 0..=deg - a {
                p.add_term(vec![a, b], random_int(rng, -5, 5));
            }
        }
        p
    };
    while bi_planted < 10 {
        let num = rand_mpoly(&mut rng, 2);
        let dd = rng.random_range(1..=2u32);
        let den = rand_mpoly(&mut rng, dd);
        let Ok(r) = BiRat::new(num, den) else { continue };
        if r.degree() == 0 || nodes.iter().any(|u| nodes.iter().any(|v| r.eval(u, v).is_none())) {
            continue;
        }
        bi_planted += 1;
        let f = |u: &Scalar, v: &Scalar| r.eval(u, v);
        if fit_bi(&f, &nodes, &nodes, 2, Mode::Exact).as_ref() == Ok(&r) {
            bi_ok += 1;
        }
    }
    all &= bi_ok == 10;
    Verdict {
        pass: all,
        detail: format!("{}, bivariate {bi_ok}/10 (line-by-line and direct routes agree)", per_degree.join(", ")),
    }
}

fn c6_trichotomy(maps: &[(u64, RatMap)]) -> Verdict {
    let trivial =
        reduce_map(vec![q2(&[(1, &[2, 0, 0])]), q2(&[(1, &[1, 1, 0])]), q2(&[(1, &[1, 0, 1])]), q2(&[(1, &[2, 0, 0]), (1, &[1, 1, 0])])])
            .unwrap();
    let t = matches!(classify(&trivial, 1).unwrap(), PlanarizationClass::Trivial(h) if h == Hyperplane::from_ints(&[1, 1, 0, -1]).unwrap());
    let c = classify(&quad_map(), 1).unwrap() == PlanarizationClass::CoTrivial(PPoint::from_ints(&[0, 0, 0, 1]).unwrap());
    let r = maps.iter().filter(|(s, f)| classify(f, *s).unwrap() == PlanarizationClass::Rational(2)).count();
    Verdict {
        pass: t && c && r == maps.len(),
        detail: format!("Trivial: {t}, CoTrivial [0:0:0:1]: {c}, Rational(2) on {r}/{} generic maps", maps.len()),
    }
}

fn c7_web_pipeline() -> Verdict {
    let phi = phi_map(&ConicSystem::circle_web()).unwrap();
    let imp = implicitize(&phi, 4).unwrap();
    let want = HPoly::from_int_terms(4, 2, &[(1, &[1, 0, 0, 1]), (-1, &[0, 2, 0, 0]), (-1, &[0, 0, 2, 0])]);
    // projective equality: proportional coefficient vectors
    let basis = planar::poly::monomials(4, 2);
    let relation_ok = imp.degree == 2 && {
        let (a, b) = (imp.relation.coefficients(&basis), want.coefficients(&basis));
        same_point(&a, &b)
    };
    let src = RationalSource::unit(inversion()).unwrap();
    let verdict = classify_web(&src, &ConicSystem::circle_web(), 7).unwrap();
    let (case_ok, case) = match &verdict.case {
        WebCase::QuadricFactor { q, phi, f_composite } => (
            q.compose(phi.components()).is_zero() && q.compose(f_composite.components()).is_zero(),
            "QuadricFactor",
        ),
        other => (false, other.name()),
    };
    Verdict {
        pass: relation_ok && case_ok,
        detail: format!(
            "implicit degree {} relation matches y0y3-y1^2-y2^2: {relation_ok}; web case {case}, exact Q.Phi = Q.F = 0: {case_ok}",
            imp.degree
        ),
    }
}

fn c8_net_inversion() -> Verdict {
    let net = ConicSystem::new(inversion().components().to_vec()).unwrap();
    let src = RationalSource::new(inversion(), Region::new((int(-3), int(3)), (int(-3), int(3)))).unwrap();
    let w = invert_via_net(&src, &net, 8).unwrap();
    let f = inversion();
    let mut rng = rng_for(8, "acceptance/net", 0);
    let mut agree = 0;
    let mut pts = 0;
    while pts < 20 {
        let x: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -20, 20)).collect();
        let Some(y) = f.eval(&x) else { continue };
        let Some(z) = w.eval(&y) else { continue };
        pts += 1;
        if same_point(&z, &x) {
            agree += 1;
        }
    }
    Verdict {
        pass: agree == 20,
        detail: format!("W of degree {} inverts f at {agree}/20 points", w.degree()),
    }
}

fn c9_khovanskii() -> Verdict {
    let sphere = FnSource::new(3, Mode::Exact, Region::new((int(-2), int(2)), (int(-2), int(2))), |u: &Scalar, v: &Scalar| {
        let y = inverse_stereographic().eval(&[Scalar::one(), u.clone(), v.clone()])?;
        Some(y.iter().map(|c| c / &y[0]).collect())
    });
    let quad = match khovanskii_classify(&sphere, 9) {
        Ok(KhovanskiiCase::Quadratic { map, .. }) => map == inverse_stereographic(),
        _ => false,
    };
    let equator = FnSource::new(3, Mode::Float, Region::unit(), |u: &Scalar, v: &Scalar| {
        let g = 3.0 * to_f64(u) + (2.0 * to_f64(v)).sin();
        Some(vec![Scalar::one(), Scalar::from_float(g.cos())?, Scalar::from_float(g.sin())?, Scalar::zero()])
    });
    let circle = matches!(khovanskii_classify(&equator, 9), Ok(KhovanskiiCase::InCircle(_)));
    Verdict {
        pass: quad && circle,
        detail: format!("inverse stereographic recovered as Quadratic: {quad}; equator map InCircle: {circle}"),
    }
}

fn c10_degeneracy() -> Verdict {
    let mut rng = rng_for(10, "acceptance/degenerate", 0);
    let mut ok = 0;
    let mut planted = 0;
    while planted < 5 {
        // a plane in RP^3 through a linear map of rank three
        let rows: Vec<Vec<Scalar>> = (0..3).map(|_| (0..3).map(|_| random_int(&mut rng, -9, 9)).collect()).collect();
        let mix: Vec<Scalar> = (0..3).map(|_| random_int(&mut rng, -3, 3)).collect();
        let last: Vec<Scalar> = (0..3).map(|j| (0..3).map(|i| &mix[i] * &rows[i][j]).sum()).collect();
        let mut all = rows.clone();
        all.push(last);
        let Ok(f) = RatMap::linear(&all) else { continue };
        if f.degree() != 1 || planar::linalg::rank(&rows) < 3 {
            continue;
        }
        planted += 1;
        let src = RationalSource::unit(f.clone()).unwrap();
        let mut zero_everywhere = true;
        for i in 0..5 {
            for j in 0..5 {
                let (u, v) = (ratio(i, 4), ratio(j, 4));
                let jet = jet_of(&src, (&u, &v), 2).unwrap();
                zero_everywhere &= omega(&jet).unwrap().is_zero();
            }
        }
        // the witness must annihilate every column of the planted matrix
        let trivial = match classify(&f, 10).unwrap() {
            PlanarizationClass::Trivial(h) => {
                (0..3).all(|j| dot(h.covector(), &all.iter().map(|r| r[j].clone()).collect::<Vec<_>>()).is_zero())
            }
            _ => false,
        };
        if zero_everywhere && trivial {
            ok += 1;
        }
    }
    Verdict {
        pass: ok == 5,
        detail: format!("{ok}/5 planted maps have omega = 0 at all 25 grid points and classify Trivial"),
    }
}

#[test]
fn acceptance() {
    let (maps, rejected) = criterion_one_maps();
    let (v1, duals) = c1_cubic_duals(&maps, &rejected);
    let verdicts = [
        ("cubic duals", v1),
        ("omega degree bound", c2_degree_bound()),
        ("biduality", c3_biduality(&duals)),
        ("span bound", c4_span_bound()),
        ("rational fitting", c5_fitting()),
        ("trichotomy", c6_trichotomy(&maps)),
        ("web pipeline", c7_web_pipeline()),
        ("net inversion", c8_net_inversion()),
        ("sphere maps", c9_khovanskii()),
        ("degeneracy consistency", c10_degeneracy()),
    ];
    for (i, (name, v)) in verdicts.iter().enumerate() {
        report(i + 1, name, v);
    }
    let failed: Vec<&str> = verdicts.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
