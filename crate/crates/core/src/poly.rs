//! Sparse multivariate polynomials and evaluation grids.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{RingElem, RingSpec};

/// Exponent tuple of a monomial `x1^a1 * ... * xn^an`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        ExponentVector(exps)
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Lexicographic comparison after permuting coordinates by `order`
    /// (`order[0]` is the most significant variable).
    pub fn cmp_in_order(&self, other: &ExponentVector, order: &[usize]) -> Ordering {
        for &i in order {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    fn graded_lex_cmp(&self, other: &ExponentVector) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl From<&[u32]> for ExponentVector {
    fn from(v: &[u32]) -> Self {
        ExponentVector(v.to_vec())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A polynomial in `arity` variables with coefficients in `ring`.
///
/// Terms with a zero coefficient are never stored, so the empty map is
/// the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    arity: usize,
    ring: RingSpec,
    terms: BTreeMap<ExponentVector, BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Degrees {
    pub partial: Vec<u32>,
    pub total: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    Scale,
}

/// Right-hand operand of [`poly_arith`].
#[derive(Clone, Copy, Debug)]
pub enum Operand<'a> {
    Poly(&'a Polynomial),
    Scalar(&'a RingElem),
}

/// Polynomial arithmetic with ring and arity checks. `Scale` takes a
/// scalar operand, the other operations a polynomial.
pub fn poly_arith(op: PolyOp, f: &Polynomial, g: Operand<'_>) -> Result<Polynomial> {
    match (op, g) {
        (PolyOp::Add, Operand::Poly(g)) => f.add(g),
        (PolyOp::Sub, Operand::Poly(g)) => f.sub(g),
        (PolyOp::Mul, Operand::Poly(g)) => f.mul(g),
        (PolyOp::Scale, Operand::Scalar(c)) => f.scale(c),
        (PolyOp::Scale, Operand::Poly(_)) => Err(Error::InvalidArgument(
            "scale expects a scalar operand".into(),
        )),
        (_, Operand::Scalar(c)) => {
            let g = Polynomial::constant(f.ring, f.arity, c)?;
            poly_arith(op, f, Operand::Poly(&g))
        }
    }
}

impl Polynomial {
    pub fn zero(ring: RingSpec, arity: usize) -> Self {
        Polynomial {
            arity,
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: RingSpec, arity: usize, c: &RingElem) -> Result<Self> {
        if c.ring() != ring {
            return Err(Error::RingMismatch(ring.to_string(), c.ring().to_string()));
        }
        let mut p = Polynomial::zero(ring, arity);
        p.insert(ExponentVector::zeros(arity), c.value().clone());
        Ok(p)
    }

    pub fn one(ring: RingSpec, arity: usize) -> Self {
        let mut p = Polynomial::zero(ring, arity);
        p.insert(ExponentVector::zeros(arity), BigInt::one());
        p
    }

    /// The variable `x_{index+1}`.
    pub fn var(ring: RingSpec, arity: usize, index: usize) -> Result<Self> {
        check_var(index, arity)?;
        let mut e = vec![0; arity];
        e[index] = 1;
        let mut p = Polynomial::zero(ring, arity);
        p.insert(ExponentVector(e), BigInt::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I, C>(ring: RingSpec, arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
        C: Into<BigInt>,
    {
        let mut p = Polynomial::zero(ring, arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: e.len(),
                });
            }
            p.add_term(ExponentVector(e), &ring.canon(&c.into()));
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Exponent vectors with nonzero coefficient, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    pub fn contains(&self, e: &ExponentVector) -> bool {
        self.terms.contains_key(e)
    }

    pub fn coefficient(&self, e: &ExponentVector) -> RingElem {
        match self.terms.get(e) {
            Some(c) => RingElem::from_canonical(self.ring, c.clone()),
            None => self.ring.zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, RingElem)> + '_ {
        self.terms
            .iter()
            .map(|(e, c)| (e, RingElem::from_canonical(self.ring, c.clone())))
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<ExponentVector, BigInt> {
        &self.terms
    }

    fn insert(&mut self, e: ExponentVector, c: BigInt) {
        if c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let ring = self.ring;
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = ring.add_raw(old, c);
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                let c = ring.canon(c);
                if !c.is_zero() {
                    self.terms.insert(e, c);
                }
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            arity: self.arity,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.ring.neg_raw(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = Polynomial::zero(self.ring, self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                out.add_term(ExponentVector(e), &self.ring.mul_raw(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RingElem) -> Result<Polynomial> {
        if c.ring() != self.ring {
            return Err(Error::RingMismatch(
                self.ring.to_string(),
                c.ring().to_string(),
            ));
        }
        let mut out = Polynomial::zero(self.ring, self.arity);
        for (e, v) in &self.terms {
            out.insert(e.clone(), self.ring.mul_raw(v, c.value()));
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.ring, self.arity);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same ring and arity");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same ring and arity");
            }
        }
        acc
    }

    /// Exact value at `point`.
    pub fn evaluate(&self, point: &[RingElem]) -> Result<RingElem> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        if let Some(x) = point.iter().find(|x| x.ring() != self.ring) {
            return Err(Error::RingMismatch(
                self.ring.to_string(),
                x.ring().to_string(),
            ));
        }
        let raw: Vec<BigInt> = point.iter().map(|x| x.value().clone()).collect();
        Ok(RingElem::from_canonical(self.ring, self.evaluate_raw(&raw)))
    }

    /// Evaluation on canonical values; lengths are the caller's concern.
    pub(crate) fn evaluate_raw(&self, point: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    t = self.ring.mul_raw(&t, &self.ring.pow_raw(x, k as u64));
                }
            }
            acc += t;
        }
        self.ring.canon(&acc)
    }

    /// Partial degree in every variable and total degree.
    pub fn degrees(&self) -> Result<Degrees> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut partial = vec![0; self.arity];
        let mut total = 0;
        for e in self.terms.keys() {
            for (d, &k) in partial.iter_mut().zip(&e.0) {
                *d = (*d).max(k);
            }
            total = total.max(e.total());
        }
        Ok(Degrees { partial, total })
    }

    /// Divides by the monic linear factor `(x_var - a)`: returns `(q, r)`
    /// with `self = q * (x_var - a) + r` and `r` free of `x_var`.
    pub fn divide_linear(&self, var: usize, a: &RingElem) -> Result<(Polynomial, Polynomial)> {
        check_var(var, self.arity)?;
        if a.ring() != self.ring {
            return Err(Error::RingMismatch(
                self.ring.to_string(),
                a.ring().to_string(),
            ));
        }
        if self.is_zero() {
            return Ok((self.clone(), self.clone()));
        }
        let hs = self.decompose_by_variable(var)?;
        let a_const = Polynomial::constant(self.ring, self.arity, a)?;
        // Synthetic division with polynomial coefficients.
        let mut q = Polynomial::zero(self.ring, self.arity);
        let mut carry = Polynomial::zero(self.ring, self.arity);
        for k in (1..hs.len()).rev() {
            carry = hs[k].add(&a_const.mul(&carry)?)?;
            q = q.add(&carry.shift(var, (k - 1) as u32))?;
        }
        let r = hs[0].add(&a_const.mul(&carry)?)?;
        Ok((q, r))
    }

    /// Multiplies by `x_var^k`.
    fn shift(&self, var: usize, k: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.ring, self.arity);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.0[var] += k;
            out.terms.insert(e, c.clone());
        }
        out
    }

    /// Writes `self = sum_k x_var^k * h_k`; returns `h_0..h_d` where `d`
    /// is the degree in `x_var`. Each `h_k` is free of `x_var`.
    pub fn decompose_by_variable(&self, var: usize) -> Result<Vec<Polynomial>> {
        check_var(var, self.arity)?;
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let d = self.terms.keys().map(|e| e.0[var]).max().unwrap_or(0) as usize;
        let mut hs = vec![Polynomial::zero(self.ring, self.arity); d + 1];
        for (e, c) in &self.terms {
            let k = e.0[var] as usize;
            let mut stripped = e.clone();
            stripped.0[var] = 0;
            hs[k].terms.insert(stripped, c.clone());
        }
        Ok(hs)
    }

    /// Terms sorted for display: graded lexicographic, largest first.
    pub fn graded_lex_terms(&self) -> Vec<(&ExponentVector, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.graded_lex_cmp(a.0));
        v
    }

    /// Canonical text with the given variable names (`x1..xn` if `None`).
    pub fn render(&self, names: Option<&[String]>) -> String {
        let name = |i: usize| match names {
            Some(ns) => ns[i].clone(),
            None => format!("x{}", i + 1),
        };
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.graded_lex_terms().into_iter().enumerate() {
            let neg = crate::ring::is_negative(c);
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            let is_const = e.0.iter().all(|&x| x == 0);
            if is_const || !mag.is_one() {
                factors.push(mag.to_string());
            }
            for (i, &x) in e.0.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(name(i)),
                    _ => factors.push(format!("{}^{}", name(i), x)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_var(index: usize, arity: usize) -> Result<()> {
    if index >= arity {
        return Err(Error::VariableOutOfRange { index, arity });
    }
    Ok(())
}

/// The evaluation grid `S_1 x ... x S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    ring: RingSpec,
    sets: Vec<Vec<BigInt>>,
}

impl GridSpec {
    pub fn new(ring: RingSpec, sets: Vec<Vec<RingElem>>) -> Result<Self> {
        if let Some(x) = sets.iter().flatten().find(|x| x.ring() != ring) {
            return Err(Error::RingMismatch(ring.to_string(), x.ring().to_string()));
        }
        Self::from_bigints(
            ring,
            sets.into_iter()
                .map(|s| s.into_iter().map(|x| x.value().clone()).collect())
                .collect(),
        )
    }

    pub fn from_bigints(ring: RingSpec, sets: Vec<Vec<BigInt>>) -> Result<Self> {
        let mut out = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidGrid(format!("set {} is empty", i + 1)));
            }
            let canon: Vec<BigInt> = set.iter().map(|x| ring.canon(x)).collect();
            let mut seen = HashSet::new();
            for x in &canon {
                if !seen.insert(x.clone()) {
                    return Err(Error::InvalidGrid(format!(
                        "set {} repeats the element {x}",
                        i + 1
                    )));
                }
            }
            out.push(canon);
        }
        Ok(GridSpec { ring, sets: out })
    }

    pub fn from_ints(ring: RingSpec, sets: &[Vec<i64>]) -> Result<Self> {
        Self::from_bigints(
            ring,
            sets.iter()
                .map(|s| s.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The same set for every one of `arity` variables.
    pub fn uniform(ring: RingSpec, set: &[i64], arity: usize) -> Result<Self> {
        Self::from_ints(ring, &vec![set.to_vec(); arity])
    }

    /// Parses the grid file format: one line per variable, elements
    /// separated by commas. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, ring: RingSpec) -> Result<Self> {
        let mut sets = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut set = Vec::new();
            for tok in line.split(',') {
                let tok = tok.trim();
                let v: BigInt = tok.parse().map_err(|_| {
                    Error::InvalidGrid(format!("line {}: bad element `{tok}`", lineno + 1))
                })?;
                set.push(v);
            }
            sets.push(set);
        }
        if sets.is_empty() {
            return Err(Error::InvalidGrid("no sets given".into()));
        }
        Self::from_bigints(ring, sets)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.sets.len()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.sets.iter().map(|s| s.len() as u64).collect()
    }

    pub fn sets(&self) -> &[Vec<BigInt>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> Vec<RingElem> {
        self.sets[i]
            .iter()
            .map(|x| RingElem::from_canonical(self.ring, x.clone()))
            .collect()
    }

    /// Number of grid points, `None` on overflow.
    pub fn num_points(&self) -> Option<u128> {
        self.sets
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
    }

    /// Grid points in odometer order (last variable fastest).
    pub fn points(&self) -> GridPoints<'_> {
        GridPoints {
            grid: self,
            idx: vec![0; self.sets.len()],
            done: false,
        }
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let sets: Vec<Vec<RingElem>> = (0..self.arity()).map(|i| self.set(i)).collect();
        sets.serialize(s)
    }
}

pub struct GridPoints<'a> {
    grid: &'a GridSpec,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for GridPoints<'_> {
    type Item = Vec<BigInt>;

    fn next(&mut self) -> Option<Vec<BigInt>> {
        if self.done {
            return None;
        }
        let pt = self
            .idx
            .iter()
            .zip(&self.grid.sets)
            .map(|(&k, s)| s[k].clone())
            .collect();
        let mut i = self.idx.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.idx[i] += 1;
            if self.idx[i] < self.grid.sets[i].len() {
                break;
            }
            self.idx[i] = 0;
        }
        Some(pt)
    }
}

/// `prod_{a in S_var} (x_var - a)`.
pub fn vanishing_poly(grid: &GridSpec, var: usize) -> Result<Polynomial> {
    let n = grid.arity();
    check_var(var, n)?;
    let ring = grid.ring();
    let x = Polynomial::var(ring, n, var)?;
    let mut acc = Polynomial::one(ring, n);
    for a in grid.set(var) {
        let lin = x.sub(&Polynomial::constant(ring, n, &a)?)?;
        acc = acc.mul(&lin)?;
    }
    Ok(acc)
}
