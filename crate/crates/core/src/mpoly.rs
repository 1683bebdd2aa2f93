//! Sparse multivariate polynomials over exact rationals, with exact
//! division and a recursive subresultant gcd.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::upoly::UPoly;

pub type Exponent = Vec<u32>;

/// Terms are keyed by exponent vector; the lexicographically largest key is
/// the leading term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Scalar>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Scalar::one())
    }

    pub fn monomial(exp: Exponent, c: Scalar) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Scalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    /// Builds from `(coefficient, exponents)` pairs with integer coefficients.
    pub fn from_int_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            nvars,
            terms
                .iter()
                .map(|(c, e)| (e.to_vec(), Scalar::from_integer((*c).into()))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn add_term(&mut self, e: Exponent, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn leading(&self) -> Option<(&Exponent, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(crate::scalar::to_f64(c), |t, (&k, xi)| t * xi.powi(k as i32))
            })
            .sum()
    }

    /// Substitutes `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut powers: Vec<Vec<MPoly>> = subs.iter().map(|s| vec![MPoly::one(s.nvars)]).collect();
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("seeded") * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= 1;
            out.add_term(e2, c * Scalar::from_integer(e[v].into()));
        }
        out
    }

    /// Coefficients of powers of `v`; each coefficient has `v`-exponent zero.
    pub fn as_univariate(&self, v: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(self.nvars); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[v], 0) as usize;
            out[k].terms.insert(e2, c.clone());
        }
        out
    }

    pub fn from_univariate(v: usize, nvars: usize, coeffs: &[MPoly]) -> Self {
        let mut out = MPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, x) in &c.terms {
                let mut e2 = e.clone();
                e2[v] += k as u32;
                out.add_term(e2, x.clone());
            }
        }
        out
    }

    /// Univariate view when only variable `v` occurs.
    pub fn to_upoly(&self, v: usize) -> UPoly {
        UPoly::new(
            self.as_univariate(v)
                .iter()
                .map(|c| c.terms.values().next().cloned().unwrap_or_else(Scalar::zero))
                .collect(),
        )
    }

    /// Sets variable `v` to one.
    pub fn dehomogenize(&self, v: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[v] = 0;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Inverse of [`dehomogenize`](Self::dehomogenize) to total degree `deg`.
    pub fn homogenize(&self, v: usize, deg: u32) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let rest: u32 = e.iter().enumerate().filter(|&(i, _)| i != v).map(|(_, &k)| k).sum();
            assert!(rest <= deg, "term above homogenizing degree");
            e2[v] = deg - rest;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Exponent {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        it.fold(first.clone(), |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect()
        })
    }

    fn shift_down(&self, m: &[u32]) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Integer coefficients with gcd one and a positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if self.leading().expect("nonzero").1.is_negative() {
            g = -g;
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .keys()
                .cloned()
                .zip(ints)
                .map(|(e, x)| (e, Scalar::from_integer(x / &g)))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let dc_inv = dc.recip();
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while let Some((re, rc)) = r.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let te: Exponent = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let tc = &rc * &dc_inv;
            for (e, c) in &d.terms {
                let e2: Exponent = e.iter().zip(&te).map(|(a, b)| a + b).collect();
                r.add_term(e2, -(c * &tc));
            }
            q.add_term(te, tc);
        }
        Some(q)
    }

    /// Greatest common divisor, normalized by [`primitive`](Self::primitive).
    pub fn gcd(&self, other: &MPoly) -> MPoly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let ma = self.monomial_content();
        let mb = other.monomial_content();
        let m: Exponent = ma.iter().zip(&mb).map(|(a, b)| *a.min(b)).collect();
        let g = gcd_no_monomial(&self.shift_down(&ma).primitive(), &other.shift_down(&mb).primitive());
        (&g * &MPoly::monomial(m, Scalar::one())).primitive()
    }
}

fn gcd_no_monomial(a: &MPoly, b: &MPoly) -> MPoly {
    let n = a.nvars;
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(n);
    }
    let v = (0..n)
        .max_by_key(|&i| (a.degree_in(i).max(b.degree_in(i)), std::cmp::Reverse(i)))
        .expect("nvars > 0");
    if a.degree_in(v) == 0 {
        return gcd_no_monomial(a, &content(b, v));
    }
    if b.degree_in(v) == 0 {
        return gcd_no_monomial(&content(a, v), b);
    }
    let ca = content(a, v);
    let cb = content(b, v);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let c = ca.gcd(&cb);
    let g = subresultant_gcd(&pa, &pb, v);
    (&c * &g).primitive()
}

/// Gcd of the coefficients of `a` viewed as a polynomial in `v`.
fn content(a: &MPoly, v: usize) -> MPoly {
    let mut g = MPoly::zero(a.nvars);
    for c in a.as_univariate(v) {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(&c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn trim(mut v: Vec<MPoly>) -> Vec<MPoly> {
    while v.last().is_some_and(MPoly::is_zero) {
        v.pop();
    }
    v
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b` in the main variable.
fn prem(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut e = (a.len() - 1 - db + 1) as u32;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().expect("nonempty").clone();
        let k = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&lr * bc);
        }
        r = trim(r);
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e);
        r = r.iter().map(|c| c * &f).collect();
    }
    r
}

/// Primitive gcd of two primitive polynomials via the subresultant PRS.
fn subresultant_gcd(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let n = a.nvars;
    let (mut a, mut b) = (a.as_univariate(v), b.as_univariate(v));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = MPoly::one(n);
    let mut h = MPoly::one(n);
    loop {
        let d = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            let bp = MPoly::from_univariate(v, n, &b);
            let cb = content(&bp, v);
            return bp.exact_div(&cb).expect("content divides").primitive();
        }
        if r.len() == 1 {
            return MPoly::one(n);
        }
        let divisor = &g * &h.pow(d);
        a = std::mem::replace(
            &mut b,
            r.iter()
                .map(|c| c.exact_div(&divisor).expect("subresultant division is exact"))
                .collect(),
        );
        g = a.last().expect("nonempty").clone();
        if d > 0 {
            h = g.pow(d).exact_div(&h.pow(d - 1)).expect("subresultant division is exact");
        }
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(rhs.nvars);
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars.max(rhs.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Scalar::one())
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

/// Zero of unspecified arity; arithmetic with it adopts the other operand's
/// arity. Needed so polynomials can serve as determinant entries.
impl Zero for MPoly {
    fn zero() -> Self {
        MPoly::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
