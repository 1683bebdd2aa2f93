//! Map sources, Taylor jets, the covector polynomial Omega and the
//! hyperplane carrying the image of each line through a base point.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mpoly::MPoly;
use crate::poly::RatMap;
use crate::projcore::Hyperplane;
use crate::scalar::{abs_f64, int, parse_scalar, to_f64, Mode, Scalar};
use crate::upoly::UPoly;

/// Relative threshold below which a float-mode Omega counts as zero.
pub const FLOAT_DEGENERACY_TOL: f64 = 1e-7;
/// Relative residual allowed for float-mode containment checks.
pub const FLOAT_CONTAINMENT_TOL: f64 = 1e-6;

/// Closed rectangle of the affine chart `x0 = 1` of the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub u: (Scalar, Scalar),
    pub v: (Scalar, Scalar),
}

impl Region {
    pub fn new(u: (Scalar, Scalar), v: (Scalar, Scalar)) -> Self {
        Self { u, v }
    }

    pub fn unit() -> Self {
        Self::new((int(0), int(1)), (int(0), int(1)))
    }

    pub fn contains(&self, u: &Scalar, v: &Scalar) -> bool {
        &self.u.0 <= u && u <= &self.u.1 && &self.v.0 <= v && v <= &self.v.1
    }

    /// The point at fractions `(s, t)` of the way across.
    pub fn at(&self, s: &Scalar, t: &Scalar) -> (Scalar, Scalar) {
        (
            &self.u.0 + (&self.u.1 - &self.u.0) * s,
            &self.v.0 + (&self.v.1 - &self.v.0) * t,
        )
    }
}

/// A map from a region of the plane to RP^n.
///
/// Implementations are read-only after construction so one evaluator can
/// be shared across threads.
pub trait MapEvaluator: Sync {
    /// n for a map into RP^n.
    fn target_dim(&self) -> usize;

    fn mode(&self) -> Mode;

    fn region(&self) -> Region;

    /// Homogeneous coordinates of the image of `[1:u:v]`, or `None` where
    /// the map is undefined (indeterminacy, a pole, or a missing node).
    fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Vec<Scalar>>;

    /// Symbolic model, when the source is a rational map.
    fn rational(&self) -> Option<&RatMap> {
        None
    }

    /// Axes of the sample grid, when evaluation is limited to its nodes.
    fn grid(&self) -> Option<(&[Scalar], &[Scalar])> {
        None
    }
}

/// Exact evaluator backed by a rational map from RP^2.
#[derive(Clone, Debug)]
pub struct RationalSource {
    map: RatMap,
    region: Region,
}

impl RationalSource {
    pub fn new(map: RatMap, region: Region) -> Result<Self> {
        if map.domain_vars() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: map.domain_vars(),
            });
        }
        Ok(Self { map, region })
    }

    pub fn unit(map: RatMap) -> Result<Self> {
        Self::new(map, Region::unit())
    }

    pub fn map(&self) -> &RatMap {
        &self.map
    }
}

impl MapEvaluator for RationalSource {
    fn target_dim(&self) -> usize {
        self.map.target_dim()
    }
    fn mode(&self) -> Mode {
        Mode::Exact
    }
    fn region(&self) -> Region {
        self.region.clone()
    }
    fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Vec<Scalar>> {
        self.map.eval(&[Scalar::one(), u.clone(), v.clone()])
    }
    fn rational(&self) -> Option<&RatMap> {
        Some(&self.map)
    }
}

/// Evaluator defined by a closure, for analytic test maps.
pub struct FnSource<F> {
    f: F,
    target_dim: usize,
    mode: Mode,
    region: Region,
}

impl<F> FnSource<F>
where
    F: Fn(&Scalar, &Scalar) -> Option<Vec<Scalar>> + Sync,
{
    pub fn new(target_dim: usize, mode: Mode, region: Region, f: F) -> Self {
        Self {
            f,
            target_dim,
            mode,
            region,
        }
    }
}

impl<F> MapEvaluator for FnSource<F>
where
    F: Fn(&Scalar, &Scalar) -> Option<Vec<Scalar>> + Sync,
{
    fn target_dim(&self) -> usize {
        self.target_dim
    }
    fn mode(&self) -> Mode {
        self.mode
    }
    fn region(&self) -> Region {
        self.region.clone()
    }
    fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Vec<Scalar>> {
        (self.f)(u, v)
    }
}

/// Map values on a rectangular grid. Values are affine coordinates in the
/// chart `y0 = 1` and are parsed exactly.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    us: Vec<Scalar>,
    vs: Vec<Scalar>,
    // row-major: v outer, u inner
    values: Vec<Vec<Scalar>>,
    target_dim: usize,
    mode: Mode,
    u_index: HashMap<Scalar, usize>,
    v_index: HashMap<Scalar, usize>,
}

fn strictly_monotone(xs: &[Scalar]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1]) || xs.windows(2).all(|w| w[0] > w[1])
}

impl SampleGrid {
    /// `values[j * us.len() + i]` is the sample at `(us[i], vs[j])`.
    pub fn new(us: Vec<Scalar>, vs: Vec<Scalar>, values: Vec<Vec<Scalar>>, mode: Mode) -> Result<Self> {
        if us.is_empty() || vs.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        if !strictly_monotone(&us) || !strictly_monotone(&vs) {
            return Err(Error::InvalidInput("grid axes must be strictly monotone".into()));
        }
        if values.len() != us.len() * vs.len() {
            return Err(Error::InvalidInput(format!(
                "grid of {}x{} nodes needs {} rows, found {}",
                us.len(),
                vs.len(),
                us.len() * vs.len(),
                values.len()
            )));
        }
        let target_dim = values[0].len();
        if target_dim == 0 {
            return Err(Error::InvalidInput("samples carry no map values".into()));
        }
        if let Some(bad) = values.iter().find(|r| r.len() != target_dim) {
            return Err(Error::DimensionMismatch {
                expected: target_dim,
                found: bad.len(),
            });
        }
        let u_index = us.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let v_index = vs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Ok(Self {
            us,
            vs,
            values,
            target_dim,
            mode,
            u_index,
            v_index,
        })
    }

    /// Samples `f` (affine target coordinates) at every node.
    pub fn from_fn(
        us: Vec<Scalar>,
        vs: Vec<Scalar>,
        mode: Mode,
        f: impl Fn(&Scalar, &Scalar) -> Vec<Scalar>,
    ) -> Result<Self> {
        let values = vs
            .iter()
            .flat_map(|v| us.iter().map(move |u| (u, v)))
            .map(|(u, v)| f(u, v))
            .collect();
        Self::new(us, vs, values, mode)
    }

    /// Parses the `u,v,F1,...,Fn` format, one row per node, v outer.
    pub fn from_csv(text: &str, mode: Mode) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        if header.len() < 3 || &header[0] != "u" || &header[1] != "v" {
            return Err(Error::Parse("header must read u,v,F1,...,Fn".into()));
        }
        let mut rows: Vec<(Scalar, Scalar, Vec<Scalar>)> = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() != header.len() {
                return Err(Error::Parse(format!("row {} has {} fields", line + 2, record.len())));
            }
            let mut fields = record.iter().map(parse_scalar);
            let u = fields.next().expect("u")?;
            let v = fields.next().expect("v")?;
            let vals = fields.collect::<Result<Vec<_>>>()?;
            rows.push((u, v, vals));
        }
        if rows.is_empty() {
            return Err(Error::Parse("no samples".into()));
        }
        let nu = rows.iter().take_while(|r| r.1 == rows[0].1).count();
        let us: Vec<Scalar> = rows[..nu].iter().map(|r| r.0.clone()).collect();
        let vs: Vec<Scalar> = rows.iter().step_by(nu).map(|r| r.1.clone()).collect();
        for (k, (u, v, _)) in rows.iter().enumerate() {
            let (i, j) = (k % nu, k / nu);
            if j >= vs.len() || u != &us[i] || v != &vs[j] {
                return Err(Error::Parse(format!(
                    "row {} breaks the rectangular v-major layout",
                    k + 2
                )));
            }
        }
        Self::new(us, vs, rows.into_iter().map(|r| r.2).collect(), mode)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v");
        for k in 1..=self.target_dim {
            out.push_str(&format!(",F{k}"));
        }
        out.push('\n');
        for (j, v) in self.vs.iter().enumerate() {
            for (i, u) in self.us.iter().enumerate() {
                let mut fields = vec![crate::scalar::format_scalar(u), crate::scalar::format_scalar(v)];
                fields.extend(self.values[j * self.us.len() + i].iter().map(crate::scalar::format_scalar));
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn us(&self) -> &[Scalar] {
        &self.us
    }

    pub fn vs(&self) -> &[Scalar] {
        &self.vs
    }

    /// Affine sample at node `(i, j)`.
    pub fn value(&self, i: usize, j: usize) -> &[Scalar] {
        &self.values[j * self.us.len() + i]
    }
}

impl MapEvaluator for SampleGrid {
    fn target_dim(&self) -> usize {
        self.target_dim
    }
    fn mode(&self) -> Mode {
        self.mode
    }
    fn region(&self) -> Region {
        let span = |xs: &[Scalar]| {
            let (a, b) = (xs[0].clone(), xs[xs.len() - 1].clone());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        Region::new(span(&self.us), span(&self.vs))
    }
    fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Vec<Scalar>> {
        let i = *self.u_index.get(u)?;
        let j = *self.v_index.get(v)?;
        let mut out = Vec::with_capacity(self.target_dim + 1);
        out.push(Scalar::one());
        out.extend(self.value(i, j).iter().cloned());
        Some(out)
    }
    fn grid(&self) -> Option<(&[Scalar], &[Scalar])> {
        Some((&self.us, &self.vs))
    }
}

/// `outer` after `inner`.
pub struct Composed<'a> {
    inner: &'a dyn MapEvaluator,
    outer: RatMap,
    model: Option<RatMap>,
}

impl<'a> Composed<'a> {
    pub fn new(outer: RatMap, inner: &'a dyn MapEvaluator) -> Result<Self> {
        if outer.domain_vars() != inner.target_dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: outer.domain_vars(),
                found: inner.target_dim() + 1,
            });
        }
        let model = match inner.rational() {
            Some(m) => Some(outer.compose(m)?),
            None => None,
        };
        Ok(Self { inner, outer, model })
    }
}

impl MapEvaluator for Composed<'_> {
    fn target_dim(&self) -> usize {
        self.outer.target_dim()
    }
    fn mode(&self) -> Mode {
        self.inner.mode()
    }
    fn region(&self) -> Region {
        self.inner.region()
    }
    fn eval(&self, u: &Scalar, v: &Scalar) -> Option<Vec<Scalar>> {
        if let Some(m) = &self.model {
            return m.eval(&[Scalar::one(), u.clone(), v.clone()]);
        }
        self.outer.eval(&self.inner.eval(u, v)?)
    }
    fn rational(&self) -> Option<&RatMap> {
        self.model.as_ref()
    }
    fn grid(&self) -> Option<(&[Scalar], &[Scalar])> {
        self.inner.grid()
    }
}

/// Index of the largest coordinate in absolute value, ties to the lowest.
pub fn chart_of(y: &[Scalar]) -> usize {
    let mut best = 0;
    for (k, x) in y.iter().enumerate() {
        if x.abs() > y[best].abs() {
            best = k;
        }
    }
    best
}

/// Taylor coefficients `A_{i,j}` of the affine map at a base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    base: (Scalar, Scalar),
    order: usize,
    chart: usize,
    // coeffs[i][j] for i + j <= order, each a vector in n-space
    coeffs: Vec<Vec<Vec<Scalar>>>,
    exact: bool,
}

impl Jet {
    pub fn base(&self) -> &(Scalar, Scalar) {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Target coordinate set to one for the affine chart.
    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn target_dim(&self) -> usize {
        self.coeffs[0][0].len()
    }

    /// False for finite-difference jets of sampled sources.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn a(&self, i: usize, j: usize) -> &[Scalar] {
        &self.coeffs[i][j]
    }

    fn scale_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .flatten()
            .map(abs_f64)
            .fold(1.0, f64::max)
    }
}

fn affine(y: &[Scalar], chart: usize) -> Option<Vec<Scalar>> {
    let c = &y[chart];
    if c.is_zero() {
        return None;
    }
    Some(
        y.iter()
            .enumerate()
            .filter(|&(k, _)| k != chart)
            .map(|(_, x)| x / c)
            .collect(),
    )
}

/// Jet of order `m` of `f` at `a`: exact Taylor coefficients for rational
/// sources, central finite differences for everything else.
pub fn jet_of(f: &dyn MapEvaluator, a: (&Scalar, &Scalar), m: usize) -> Result<Jet> {
    let y = f.eval(a.0, a.1).ok_or(Error::OnIndeterminacy)?;
    let chart = chart_of(&y);
    match f.rational() {
        Some(map) => Ok(exact_jet(map, a, m, chart)),
        None => finite_difference_jet(f, a, m, chart),
    }
}

fn exact_jet(map: &RatMap, a: (&Scalar, &Scalar), m: usize, chart: usize) -> Jet {
    // shift so the base point is the origin of (s, t)
    let subs = [
        MPoly::one(2),
        &MPoly::constant(2, a.0.clone()) + &MPoly::var(2, 0),
        &MPoly::constant(2, a.1.clone()) + &MPoly::var(2, 1),
    ];
    let shifted: Vec<MPoly> = map
        .components()
        .iter()
        .map(|c| c.poly().compose(&subs))
        .collect();
    let q = &shifted[chart];
    let coef = |p: &MPoly, i: usize, j: usize| {
        p.terms()
            .get(&vec![i as u32, j as u32])
            .cloned()
            .unwrap_or_else(Scalar::zero)
    };
    let q00 = coef(q, 0, 0);
    let n = shifted.len() - 1;
    let mut coeffs: Vec<Vec<Vec<Scalar>>> = (0..=m).map(|i| vec![Vec::new(); m + 1 - i]).collect();
    // truncated power-series division p / q, one target coordinate at a time
    let mut series: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(n);
    for (k, p) in shifted.iter().enumerate() {
        if k == chart {
            continue;
        }
        let mut g: Vec<Vec<Scalar>> = (0..=m).map(|i| vec![Scalar::zero(); m + 1 - i]).collect();
        for total in 0..=m {
            for i in (0..=total).rev() {
                let j = total - i;
                let mut acc = coef(p, i, j);
                for k1 in 0..=i {
                    for l1 in 0..=j {
                        if k1 + l1 == 0 {
                            continue;
                        }
                        let qc = coef(q, k1, l1);
                        if !qc.is_zero() {
                            acc -= qc * &g[i - k1][j - l1];
                        }
                    }
                }
                g[i][j] = acc / &q00;
            }
        }
        series.push(g);
    }
    for (i, row) in coeffs.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = series.iter().map(|g| g[i][j].clone()).collect();
        }
    }
    Jet {
        base: (a.0.clone(), a.1.clone()),
        order: m,
        chart,
        coeffs,
        exact: true,
    }
}

/// Central difference weights (offset, weight) for the k-th derivative at
/// unit step.
fn stencil(k: usize) -> Result<Vec<(i64, Scalar)>> {
    let w = |v: &[(i64, i64, i64)]| {
        v.iter()
            .map(|&(o, p, q)| (o, crate::scalar::ratio(p, q)))
            .collect()
    };
    Ok(match k {
        0 => w(&[(0, 1, 1)]),
        1 => w(&[(-1, -1, 2), (1, 1, 2)]),
        2 => w(&[(-1, 1, 1), (0, -2, 1), (1, 1, 1)]),
        3 => w(&[(-2, -1, 2), (-1, 1, 1), (1, -1, 1), (2, 1, 2)]),
        4 => w(&[(-2, 1, 1), (-1, -4, 1), (0, 6, 1), (1, -4, 1), (2, 1, 1)]),
        _ => {
            return Err(Error::InvalidInput(format!(
                "finite-difference jets stop at order 4, requested {k}"
            )))
        }
    })
}

fn factorial(k: usize) -> Scalar {
    (1..=k as i64).fold(Scalar::one(), |acc, x| acc * int(x))
}

fn finite_difference_jet(
    f: &dyn MapEvaluator,
    a: (&Scalar, &Scalar),
    m: usize,
    chart: usize,
) -> Result<Jet> {
    let radius: i64 = if m <= 2 { 1 } else { 2 };
    // node positions along each axis, indexed by offset
    let (u_at, v_at): (Vec<Scalar>, Vec<Scalar>) = match f.grid() {
        Some((us, vs)) => {
            let axis = |xs: &[Scalar], x: &Scalar| -> Result<Vec<Scalar>> {
                let i = xs
                    .iter()
                    .position(|y| y == x)
                    .ok_or_else(|| Error::InvalidInput("base point is not a grid node".into()))?
                    as i64;
                if i < radius || i + radius >= xs.len() as i64 {
                    return Err(Error::InvalidInput("base point too close to the grid edge".into()));
                }
                Ok((-radius..=radius).map(|o| xs[(i + o) as usize].clone()).collect())
            };
            (axis(us, a.0)?, axis(vs, a.1)?)
        }
        None => {
            let r = f.region();
            let hu = (&r.u.1 - &r.u.0) / int(256);
            let hv = (&r.v.1 - &r.v.0) / int(256);
            (
                (-radius..=radius).map(|o| a.0 + &hu * int(o)).collect(),
                (-radius..=radius).map(|o| a.1 + &hv * int(o)).collect(),
            )
        }
    };
    let r = radius as usize;
    let hu = (&u_at[2 * r] - &u_at[0]) / int(2 * radius);
    let hv = (&v_at[2 * r] - &v_at[0]) / int(2 * radius);
    let mut cache: HashMap<(i64, i64), Vec<Scalar>> = HashMap::new();
    let mut sample = |p: i64, q: i64| -> Result<Vec<Scalar>> {
        if let Some(v) = cache.get(&(p, q)) {
            return Ok(v.clone());
        }
        let y = f
            .eval(&u_at[(p + radius) as usize], &v_at[(q + radius) as usize])
            .ok_or(Error::OnIndeterminacy)?;
        let v = affine(&y, chart).ok_or(Error::ChartOverflow)?;
        cache.insert((p, q), v.clone());
        Ok(v)
    };
    let n = f.target_dim();
    let mut coeffs: Vec<Vec<Vec<Scalar>>> = (0..=m).map(|i| vec![Vec::new(); m + 1 - i]).collect();
    for i in 0..=m {
        for j in 0..=m - i {
            let mut acc = vec![Scalar::zero(); n];
            for (p, wp) in stencil(i)? {
                for (q, wq) in stencil(j)? {
                    let w = &wp * &wq;
                    for (o, x) in acc.iter_mut().zip(sample(p, q)?) {
                        *o += &w * x;
                    }
                }
            }
            let denom = num_traits::pow(hu.clone(), i) * num_traits::pow(hv.clone(), j) * factorial(i) * factorial(j);
            coeffs[i][j] = acc.into_iter().map(|x| x / &denom).collect();
        }
    }
    Ok(Jet {
        base: (a.0.clone(), a.1.clone()),
        order: m,
        chart,
        coeffs,
        exact: false,
    })
}

/// Covector-valued polynomial in the slope `lambda`. `formal_degree` is
/// the degree used for homogeneous evaluation at `[lambda0:lambda1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorPoly {
    coeffs: Vec<Vec<Scalar>>,
    formal_degree: usize,
    width: usize,
}

impl CovectorPoly {
    fn from_components(components: &[UPoly], formal_degree: usize) -> Self {
        let width = components.len();
        let len = components
            .iter()
            .filter_map(UPoly::degree)
            .max()
            .map_or(0, |d| d + 1);
        let coeffs = (0..len)
            .map(|k| components.iter().map(|c| c.coeff(k)).collect())
            .collect();
        Self {
            coeffs,
            formal_degree,
            width,
        }
    }

    /// `coeffs()[k]` is the covector multiplying `lambda^k`.
    pub fn coeffs(&self) -> &[Vec<Scalar>] {
        &self.coeffs
    }

    /// Degree in `lambda`; `None` when identically zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn components(&self) -> Vec<UPoly> {
        (0..self.width)
            .map(|c| UPoly::new(self.coeffs.iter().map(|v| v[c].clone()).collect()))
            .collect()
    }

    pub fn eval(&self, lambda: &Scalar) -> Vec<Scalar> {
        self.components().iter().map(|c| c.eval(lambda)).collect()
    }

    /// Value at the projective slope `[l0:l1]`, covering the vertical
    /// direction `[0:1]`.
    pub fn eval_homogeneous(&self, l0: &Scalar, l1: &Scalar) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.width];
        for (k, c) in self.coeffs.iter().enumerate() {
            let w = num_traits::pow(l0.clone(), self.formal_degree - k) * num_traits::pow(l1.clone(), k);
            if w.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(c) {
                *o += &w * x;
            }
        }
        out
    }

    /// Removes the common polynomial factor of the components.
    pub fn primitive(&self) -> CovectorPoly {
        let comps = self.components();
        let g = comps.iter().fold(UPoly::zero(), |acc, c| acc.gcd(c));
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let reduced: Vec<UPoly> = comps.iter().map(|c| c.div_rem(&g).0).collect();
        Self::from_components(&reduced, self.formal_degree - g.degree().expect("nonzero"))
    }

    fn max_abs_f64(&self) -> f64 {
        self.coeffs.iter().flatten().map(abs_f64).fold(0.0, f64::max)
    }
}

/// `B_l(lambda) = sum_j lambda^j A_{l-j,j}` for `l = 0..=order`.
fn b_polys(jet: &Jet) -> Vec<Vec<UPoly>> {
    let n = jet.target_dim();
    (0..=jet.order)
        .map(|l| {
            (0..n)
                .map(|k| UPoly::new((0..=l).map(|j| jet.a(l - j, j)[k].clone()).collect()))
                .collect()
        })
        .collect()
}

/// Wedge of the lifted `B_0, ..., B_{n-1}`: the point `B_0` gets a one in
/// the chart slot, the tangent data `B_l` for `l >= 1` a zero.
pub fn omega(jet: &Jet) -> Result<CovectorPoly> {
    let n = jet.target_dim();
    if jet.order + 1 != n {
        return Err(Error::OrderMismatch {
            expected: n - 1,
            found: jet.order,
        });
    }
    let lifted: Vec<Vec<UPoly>> = b_polys(jet)
        .into_iter()
        .enumerate()
        .map(|(l, mut b)| {
            let slot = if l == 0 { Scalar::one() } else { Scalar::zero() };
            b.insert(jet.chart, UPoly::constant(slot));
            b
        })
        .collect();
    let w = linalg::wedge(&lifted);
    Ok(CovectorPoly::from_components(&w, n * (n - 1) / 2))
}

fn omega_is_zero(jet: &Jet, om: &CovectorPoly) -> bool {
    if jet.exact {
        return om.is_zero();
    }
    let s = jet.scale_f64();
    om.max_abs_f64() / s.powi(jet.target_dim() as i32) <= FLOAT_DEGENERACY_TOL
}

/// Whether the order-(n-1) jet at `a` pins down a unique hyperplane for
/// some line through `a`.
pub fn nondegenerate_at(f: &dyn MapEvaluator, a: (&Scalar, &Scalar)) -> Result<bool> {
    let n = f.target_dim();
    let jet = jet_of(f, a, n - 1)?;
    let om = omega(&jet)?;
    Ok(!omega_is_zero(&jet, &om))
}

/// Relative residual `|h . y| / (|h| |y|)`.
pub fn relative_residual(h: &[Scalar], y: &[Scalar]) -> f64 {
    let dot: f64 = h.iter().zip(y).map(|(a, b)| to_f64(a) * to_f64(b)).sum();
    let norm = |v: &[Scalar]| v.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt();
    let d = norm(h) * norm(y);
    if d == 0.0 {
        0.0
    } else {
        dot.abs() / d
    }
}

/// Points of the line through `a` with direction `slope` at which `f` is
/// evaluated for cross-validation.
fn line_samples(
    f: &dyn MapEvaluator,
    a: (&Scalar, &Scalar),
    slope: (&Scalar, &Scalar),
    wanted: usize,
) -> Vec<Vec<Scalar>> {
    if let Some((us, vs)) = f.grid() {
        let mut out = Vec::new();
        for v in vs {
            for u in us {
                if (u - a.0) * slope.1 == (v - a.1) * slope.0 {
                    if let Some(y) = f.eval(u, v) {
                        out.push(y);
                    }
                }
            }
        }
        return out;
    }
    let r = f.region();
    let span = (&r.u.1 - &r.u.0).max(&r.v.1 - &r.v.0);
    let step = span / int(4 * wanted as i64);
    let mut out = Vec::new();
    for k in 1..=(4 * wanted as i64) {
        if out.len() == wanted {
            break;
        }
        let t = &step * int(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
        if let Some(y) = f.eval(&(a.0 + &t * slope.0), &(a.1 + &t * slope.1)) {
            out.push(y);
        }
    }
    out
}

/// The hyperplane containing the image of the line through `a` with
/// direction `[l0:l1]` (slope `l1/l0`), checked against 2n image points.
pub fn hyperplane_for_line(
    f: &dyn MapEvaluator,
    a: (&Scalar, &Scalar),
    slope: (&Scalar, &Scalar),
) -> Result<Hyperplane> {
    if slope.0.is_zero() && slope.1.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = f.target_dim();
    let jet = jet_of(f, a, n - 1)?;
    let om = omega(&jet)?;
    if omega_is_zero(&jet, &om) {
        return Err(Error::Degenerate);
    }
    let w = om.eval_homogeneous(slope.0, slope.1);
    let degenerate_here = if jet.exact {
        w.iter().all(Zero::is_zero)
    } else {
        let s = jet.scale_f64();
        w.iter().map(abs_f64).fold(0.0, f64::max) / s.powi(n as i32) <= FLOAT_DEGENERACY_TOL
    };
    if degenerate_here {
        return Err(Error::DegenerateSlope);
    }
    let h = Hyperplane::new(w)?;
    let wanted = 2 * n;
    let pts = line_samples(f, a, slope, wanted);
    if pts.len() < wanted {
        return Err(Error::TooFewSamples {
            needed: wanted,
            found: pts.len(),
        });
    }
    for y in &pts {
        let ok = if jet.exact {
            h.pairing(y).is_zero()
        } else {
            relative_residual(h.covector(), y) < FLOAT_CONTAINMENT_TOL
        };
        if !ok {
            let shown: Vec<String> = y.iter().map(crate::scalar::format_scalar).collect();
            return Err(Error::ContainmentFailed(format!(
                "image point [{}] is off {}",
                shown.join(":"),
                h
            )));
        }
    }
    Ok(h)
}
