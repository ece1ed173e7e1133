//! Randomized identity testing of expression DAGs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::oracle::{advance, DEFAULT_GRID_LIMIT};
use crate::parser::{ExprDag, Node};
use crate::ring::{RingElem, RingKind, RingSpec};

/// Value of `g` at `point`; every node is evaluated once.
pub fn eval_dag(g: &ExprDag, point: &[RingElem]) -> Result<RingElem> {
    if point.len() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: g.arity(),
            found: point.len(),
        });
    }
    let ring = g.ring();
    if let Some(x) = point.iter().find(|x| x.ring() != ring) {
        return Err(Error::RingMismatch(ring.to_string(), x.ring().to_string()));
    }
    let raw: Vec<BigInt> = point.iter().map(|x| x.value().clone()).collect();
    Ok(ring.elem(g.evaluate_raw(&raw)))
}

/// Structural upper bound on the total degree of `g`.
pub fn degree_upper_bound(g: &ExprDag) -> u64 {
    let mut deg: Vec<u64> = Vec::with_capacity(g.nodes().len());
    for node in g.nodes() {
        let d = match node {
            Node::Var(_) => 1,
            Node::Const(_) => 0,
            Node::Add(a, b) | Node::Sub(a, b) => deg[*a].max(deg[*b]),
            Node::Mul(a, b) => deg[*a].saturating_add(deg[*b]),
            Node::Neg(a) => deg[*a],
            Node::Pow(a, k) => deg[*a].saturating_mul(*k as u64),
        };
        deg.push(d);
    }
    deg[g.root()]
}

/// The DAG of `g1 - g2`, sharing common subexpressions.
pub fn difference(g1: &ExprDag, g2: &ExprDag) -> Result<ExprDag> {
    if g1.ring() != g2.ring() {
        return Err(Error::RingMismatch(
            g1.ring().to_string(),
            g2.ring().to_string(),
        ));
    }
    if g1.arity() != g2.arity() {
        return Err(Error::ArityMismatch {
            expected: g1.arity(),
            found: g2.arity(),
        });
    }
    let mut d = g1.clone();
    let r2 = d.import(g2)?;
    let root = d.add(Node::Sub(g1.root(), r2))?;
    d.set_root(root)?;
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    NonzeroWitnessed {
        trial: u64,
        point: Vec<RingElem>,
        value: RingElem,
    },
    AllZero {
        trials: u64,
        failure_bound: BigRational,
    },
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Outcome::NonzeroWitnessed {
                trial,
                point,
                value,
            } => {
                let mut m = s.serialize_map(Some(4))?;
                m.serialize_entry("verdict", "nonzero_witnessed")?;
                m.serialize_entry("trial", trial)?;
                m.serialize_entry("point", point)?;
                m.serialize_entry("value", value)?;
                m.end()
            }
            Outcome::AllZero {
                trials,
                failure_bound,
            } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("verdict", "all_zero")?;
                m.serialize_entry("trials", trials)?;
                m.serialize_entry("failure_bound", &failure_bound.to_string())?;
                m.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PitVerdict {
    pub outcome: Outcome,
    pub degree_bound_used: u64,
    pub samples_per_var: u64,
    pub seed: u64,
}

impl PitVerdict {
    pub fn is_all_zero(&self) -> bool {
        matches!(self.outcome, Outcome::AllZero { .. })
    }
}

fn field_order(ring: RingSpec) -> Result<u64> {
    match ring.kind() {
        RingKind::PrimeField(p) => Ok(p),
        _ => Err(Error::UnsupportedRing(ring.to_string())),
    }
}

/// Tests `g1 = g2` at `trials` points drawn uniformly from `S^n`, where
/// `S` holds the first `s` field elements. A nonzero difference is missed
/// with probability at most `(d/s)^trials`.
pub fn identity_test(
    g1: &ExprDag,
    g2: &ExprDag,
    s: u64,
    trials: u64,
    seed: u64,
) -> Result<PitVerdict> {
    let diff = difference(g1, g2)?;
    let ring = diff.ring();
    let p = field_order(ring)?;
    if s == 0 || s > p {
        return Err(Error::InvalidArgument(format!(
            "sample set size {s} must lie in 1..={p}"
        )));
    }
    let d = degree_upper_bound(&diff);
    if d >= s {
        return Err(Error::Hypothesis(format!(
            "degree bound {d} is not below the sample set size {s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = diff.arity();
    for trial in 0..trials {
        let raw: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(0..s))).collect();
        let v = diff.evaluate_raw(&raw);
        if !v.is_zero() {
            return Ok(PitVerdict {
                outcome: Outcome::NonzeroWitnessed {
                    trial,
                    point: raw.into_iter().map(|x| ring.elem(x)).collect(),
                    value: ring.elem(v),
                },
                degree_bound_used: d,
                samples_per_var: s,
                seed,
            });
        }
    }
    let ratio = BigRational::new(BigInt::from(d), BigInt::from(s));
    let failure_bound = if trials == 0 {
        BigRational::one()
    } else {
        num_traits::pow::pow(ratio, trials as usize)
    };
    Ok(PitVerdict {
        outcome: Outcome::AllZero {
            trials,
            failure_bound,
        },
        degree_bound_used: d,
        samples_per_var: s,
        seed,
    })
}

/// Exact fraction of points of `{0, ..., s-1}^n` where `g` vanishes.
pub fn zero_fraction(g: &ExprDag, s: u64) -> Result<BigRational> {
    let p = field_order(g.ring())?;
    if s == 0 || s > p {
        return Err(Error::InvalidArgument(format!(
            "sample set size {s} must lie in 1..={p}"
        )));
    }
    let n = g.arity();
    let total = (s as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= DEFAULT_GRID_LIMIT)
        .ok_or(Error::GridTooLarge {
            points: (s as u128).saturating_pow(n as u32),
            limit: DEFAULT_GRID_LIMIT,
        })?;
    let sizes = vec![s as usize; n];
    let mut idx = vec![0usize; n];
    let mut zeros: u128 = 0;
    loop {
        let raw: Vec<BigInt> = idx.iter().map(|&k| BigInt::from(k)).collect();
        if g.evaluate_raw(&raw).is_zero() {
            zeros += 1;
        }
        if !advance(&mut idx, &sizes) {
            break;
        }
    }
    Ok(BigRational::new(BigInt::from(zeros), BigInt::from(total)))
}

/// A reproducible random expression DAG built from `ops` random
/// operations over variables and small constants. Exponents are 2 or 3.
pub fn random_dag(ring: RingSpec, arity: usize, ops: usize, seed: u64) -> Result<ExprDag> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = ExprDag::new(ring, arity);
    let mut pool = Vec::new();
    for i in 0..arity {
        pool.push(g.add(Node::Var(i))?);
    }
    for _ in 0..2 {
        let c = rng.gen_range(-5i64..=5);
        pool.push(g.add(Node::Const(BigInt::from(c)))?);
    }
    let mut last = pool[0];
    for _ in 0..ops {
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        let node = match rng.gen_range(0..6) {
            0 | 1 => Node::Add(a, b),
            2 => Node::Sub(a, b),
            3 | 4 => Node::Mul(a, b),
            _ => {
                if rng.gen_bool(0.5) {
                    Node::Neg(a)
                } else {
                    Node::Pow(a, rng.gen_range(2..=3))
                }
            }
        };
        last = g.add(node)?;
        pool.push(last);
    }
    g.set_root(last)?;
    Ok(g)
}
