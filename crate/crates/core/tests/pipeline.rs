use num_traits::{One, Zero};
use planar::conicweb::{classify_web, random_web, WebCase};
use planar::dualize::{classify, classify_sampled};
use planar::gen::generate;
use planar::jetplan::{FnSource, MapEvaluator, Region, SampleGrid};
use planar::poly::RatMap;
use planar::ratfit::fit_map;
use planar::scalar::{int, ints, ratio, to_f64};
use planar::{Mode, Scalar};

fn grid_of(m: &RatMap, mode: Mode) -> SampleGrid {
    let axis: Vec<Scalar> = (0..13).map(|k| ratio(k, 6)).collect();
    SampleGrid::from_fn(axis.clone(), axis, mode, |u, v| {
        let y = m.eval(&[Scalar::one(), u.clone(), v.clone()]).unwrap();
        y[1..]
            .iter()
            .map(|c| {
                let e = c / &y[0];
                match mode {
                    Mode::Exact => e,
                    Mode::Float => Scalar::from_float(to_f64(&e)).unwrap(),
                }
            })
            .collect()
    })
    .unwrap()
}

#[test]
fn sampled_and_symbolic_verdicts_agree() {
    let mut tried = 0;
    for seed in 1..=6 {
        let f = generate("quadratic-rp3".parse().unwrap(), seed);
        // keep the denominator off the grid
        let Some(_) = (0..13).flat_map(|i| (0..13).map(move |j| (i, j))).try_for_each(|(i, j)| {
            let y = f.eval(&[Scalar::one(), ratio(i, 6), ratio(j, 6)])?;
            (!y[0].is_zero()).then_some(())
        }) else {
            continue;
        };
        let symbolic = classify(&f, seed).unwrap();
        for mode in [Mode::Exact, Mode::Float] {
            let g = grid_of(&f, mode);
            assert_eq!(fit_map(&g, 3, seed).unwrap().map, f);
            assert_eq!(classify_sampled(&g, seed).unwrap(), symbolic);
        }
        tried += 1;
    }
    assert!(tried >= 2);
}

#[test]
fn csv_grids_survive_a_round_trip_through_the_fitter() {
    let f = RatMap::linear(&[ints(&[2, 1, 0]), ints(&[0, 1, 1]), ints(&[1, 0, 3]), ints(&[1, 1, 1])]).unwrap();
    let g = grid_of(&f, Mode::Exact);
    let back = SampleGrid::from_csv(&g.to_csv(), Mode::Exact).unwrap();
    assert_eq!(fit_map(&back, 2, 0).unwrap().map, f);
}

#[test]
fn sampled_collineation_with_a_generic_web() {
    let p = RatMap::linear(&[ints(&[3, 1, 0]), ints(&[0, 2, 1]), ints(&[1, 0, 3])]).unwrap();
    let q = p.clone();
    let f = FnSource::new(2, Mode::Exact, Region::new((int(0), int(2)), (int(0), int(2))), move |u: &Scalar, v: &Scalar| {
        q.eval(&[Scalar::one(), u.clone(), v.clone()])
    });
    assert!(f.rational().is_none());
    let v = classify_web(&f, &random_web(11), 2).unwrap();
    assert_eq!(v.case, WebCase::Quadratic(p), "{:?}", v.diagnostics);
}
