//! Coefficient rings: prime fields, the integers, and integers modulo `m`.
//!
//! Elements are kept in canonical form: residues in `[0, p)` or `[0, m)`
//! for the modular rings, plain arbitrary-precision integers otherwise.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    PrimeField(u64),
    Integers,
    IntegersMod(u64),
}

/// A coefficient ring. Construction validates the modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    kind: RingKind,
}

impl RingSpec {
    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(RingSpec {
            kind: RingKind::PrimeField(p),
        })
    }

    pub fn integers() -> Self {
        RingSpec {
            kind: RingKind::Integers,
        }
    }

    pub fn integers_mod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(RingSpec {
            kind: RingKind::IntegersMod(m),
        })
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    /// The modulus of a modular ring, `None` for the integers.
    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            RingKind::PrimeField(p) => Some(p),
            RingKind::IntegersMod(m) => Some(m),
            RingKind::Integers => None,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self.kind, RingKind::PrimeField(_))
    }

    pub fn canon(&self, v: &BigInt) -> BigInt {
        match self.modulus() {
            Some(m) => v.mod_floor(&BigInt::from(m)),
            None => v.clone(),
        }
    }

    pub fn elem(&self, v: impl Into<BigInt>) -> RingElem {
        RingElem {
            ring: *self,
            value: self.canon(&v.into()),
        }
    }

    pub fn zero(&self) -> RingElem {
        self.elem(0)
    }

    pub fn one(&self) -> RingElem {
        self.elem(1)
    }

    pub(crate) fn add_raw(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.canon(&(a + b))
    }

    pub(crate) fn sub_raw(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.canon(&(a - b))
    }

    pub(crate) fn mul_raw(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.canon(&(a * b))
    }

    pub(crate) fn neg_raw(&self, a: &BigInt) -> BigInt {
        self.canon(&-a)
    }

    pub(crate) fn pow_raw(&self, a: &BigInt, e: u64) -> BigInt {
        match self.modulus() {
            Some(m) => a.modpow(&BigInt::from(e), &BigInt::from(m)),
            None => num_traits::pow::pow(a.clone(), e as usize),
        }
    }

    pub(crate) fn inv_raw(&self, a: &BigInt) -> Result<BigInt> {
        let p = match self.kind {
            RingKind::PrimeField(p) => p,
            _ => return Err(Error::UnsupportedRing(self.to_string())),
        };
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = BigInt::from(p);
        let g = a.extended_gcd(&p);
        debug_assert!(g.gcd.is_one());
        Ok(g.x.mod_floor(&p))
    }

    /// Whether `v` is a zero divisor (zero itself counts as one).
    pub fn is_zero_divisor(&self, v: &BigInt) -> bool {
        let v = self.canon(v);
        if v.is_zero() {
            return true;
        }
        match self.kind {
            RingKind::IntegersMod(m) => !v.gcd(&BigInt::from(m)).is_one(),
            _ => false,
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RingKind::PrimeField(p) => write!(f, "fp:{p}"),
            RingKind::Integers => write!(f, "int"),
            RingKind::IntegersMod(m) => write!(f, "zmod:{m}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Accepts `fp:<p>`, `int` and `zmod:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "int" {
            return Ok(RingSpec::integers());
        }
        let bad = || Error::InvalidArgument(format!("unrecognised ring `{s}`"));
        let (tag, num) = s.split_once(':').ok_or_else(bad)?;
        let n: u64 = num.trim().parse().map_err(|_| bad())?;
        match tag {
            "fp" => RingSpec::prime_field(n),
            "zmod" => RingSpec::integers_mod(n),
            _ => Err(bad()),
        }
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An element of a [`RingSpec`], always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    ring: RingSpec,
    value: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// Binary ring arithmetic. `Neg` negates `a` and only checks that `b`
/// shares its ring.
pub fn arith(op: ArithOp, a: &RingElem, b: &RingElem) -> Result<RingElem> {
    a.same_ring(b)?;
    let r = a.ring;
    let value = match op {
        ArithOp::Add => r.add_raw(&a.value, &b.value),
        ArithOp::Sub => r.sub_raw(&a.value, &b.value),
        ArithOp::Mul => r.mul_raw(&a.value, &b.value),
        ArithOp::Neg => r.neg_raw(&a.value),
    };
    Ok(RingElem { ring: r, value })
}

impl RingElem {
    pub(crate) fn from_canonical(ring: RingSpec, value: BigInt) -> Self {
        debug_assert_eq!(ring.canon(&value), value);
        RingElem { ring, value }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_ring(&self, other: &RingElem) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        arith(ArithOp::Add, self, other)
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem> {
        arith(ArithOp::Sub, self, other)
    }

    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        arith(ArithOp::Mul, self, other)
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            ring: self.ring,
            value: self.ring.neg_raw(&self.value),
        }
    }

    /// Multiplicative inverse in a prime field.
    pub fn invert(&self) -> Result<RingElem> {
        let value = self.ring.inv_raw(&self.value)?;
        Ok(RingElem {
            ring: self.ring,
            value,
        })
    }

    /// Signed representative in `(-m/2, m/2]` for display purposes.
    pub fn balanced(&self) -> BigInt {
        match self.ring.modulus() {
            Some(m) => {
                let m = BigInt::from(m);
                if &self.value * 2 > m {
                    &self.value - m
                } else {
                    self.value.clone()
                }
            }
            None => self.value.clone(),
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for RingElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_bigint(&self.value, s)
    }
}

pub(crate) fn serialize_bigint<S: Serializer>(
    v: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.collect_str(v),
    }
}

/// Outcome of [`grid_condition_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub pass: bool,
    /// First offending pair `(variable, x, y)` when the check fails.
    pub violation: Option<(usize, RingElem, RingElem)>,
}

/// Checks that no difference of two distinct elements within one grid set
/// is a zero divisor of `ring`.
pub fn grid_condition_check(ring: RingSpec, grid: &GridSpec) -> CheckResult {
    if !matches!(ring.kind(), RingKind::IntegersMod(_)) {
        return CheckResult {
            pass: true,
            violation: None,
        };
    }
    for (i, set) in grid.sets().iter().enumerate() {
        for (k, x) in set.iter().enumerate() {
            for y in &set[k + 1..] {
                if ring.is_zero_divisor(&(x - y)) {
                    return CheckResult {
                        pass: false,
                        violation: Some((i, ring.elem(x.clone()), ring.elem(y.clone()))),
                    };
                }
            }
        }
    }
    CheckResult {
        pass: true,
        violation: None,
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sign-aware helper used by renderers.
pub(crate) fn is_negative(v: &BigInt) -> bool {
    v.is_negative()
}
