//! Brute-force ground truth over a grid.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bounds_for, BoundReport};
use crate::error::{Error, Result};
use crate::poly::{ExponentVector, GridSpec, Polynomial};
use crate::ring::{grid_condition_check, RingElem, RingKind, RingSpec};

pub const DEFAULT_ZERO_SET_CAP: u128 = 1_000_000;
pub const DEFAULT_GRID_LIMIT: u128 = 100_000_000;
pub const DEFAULT_SEARCH_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Grids with more points than this are rejected.
    pub grid_limit: u128,
    /// The zero set is listed only for grids up to this size.
    pub zero_set_cap: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            grid_limit: DEFAULT_GRID_LIMIT,
            zero_set_cap: DEFAULT_ZERO_SET_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub nonzeros: u128,
    pub zeros: u128,
    pub grid_size: u128,
    pub zero_set: Option<Vec<Vec<RingElem>>>,
}

/// Evaluates a fixed polynomial at grid points given by index vectors,
/// using precomputed power tables.
pub(crate) struct GridEvaluator {
    ring: RingSpec,
    sizes: Vec<usize>,
    sets: Vec<Vec<BigInt>>,
    inner: EvalTables,
}

enum EvalTables {
    Modular {
        m: u64,
        terms: Vec<(u64, Vec<u32>)>,
        pows: Vec<Vec<Vec<u64>>>,
    },
    Big {
        terms: Vec<(BigInt, Vec<u32>)>,
        pows: Vec<Vec<Vec<BigInt>>>,
    },
}

impl GridEvaluator {
    pub(crate) fn new(f: &Polynomial, grid: &GridSpec) -> Result<Self> {
        check_inputs(f, grid)?;
        let ring = grid.ring();
        let n = grid.arity();
        let mut maxdeg = vec![0u32; n];
        for e in f.support() {
            for (i, m) in maxdeg.iter_mut().enumerate() {
                *m = (*m).max(e[i]);
            }
        }
        let sets = grid.sets().to_vec();
        let inner = match ring.modulus() {
            Some(m) => {
                let pows = (0..n)
                    .map(|i| {
                        sets[i]
                            .iter()
                            .map(|a| {
                                let a = a.to_u64().expect("canonical residue fits u64");
                                let mut row = Vec::with_capacity(maxdeg[i] as usize + 1);
                                let mut acc = 1 % m;
                                for _ in 0..=maxdeg[i] {
                                    row.push(acc);
                                    acc = mulmod(acc, a, m);
                                }
                                row
                            })
                            .collect()
                    })
                    .collect();
                let terms = f
                    .raw_terms()
                    .iter()
                    .map(|(e, c)| (c.to_u64().expect("canonical"), e.as_slice().to_vec()))
                    .collect();
                EvalTables::Modular { m, terms, pows }
            }
            None => {
                let pows = (0..n)
                    .map(|i| {
                        sets[i]
                            .iter()
                            .map(|a| {
                                let mut row = Vec::with_capacity(maxdeg[i] as usize + 1);
                                let mut acc = BigInt::one();
                                for _ in 0..=maxdeg[i] {
                                    row.push(acc.clone());
                                    acc *= a;
                                }
                                row
                            })
                            .collect()
                    })
                    .collect();
                let terms = f
                    .raw_terms()
                    .iter()
                    .map(|(e, c)| (c.clone(), e.as_slice().to_vec()))
                    .collect();
                EvalTables::Big { terms, pows }
            }
        };
        Ok(GridEvaluator {
            ring,
            sizes: sets.iter().map(|s| s.len()).collect(),
            sets,
            inner,
        })
    }

    pub(crate) fn value(&self, idx: &[usize]) -> BigInt {
        match &self.inner {
            EvalTables::Modular { m, terms, pows } => {
                let mut sum: u64 = 0;
                for (c, e) in terms {
                    let mut t = *c;
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t = mulmod(t, pows[i][idx[i]][k as usize], *m);
                        }
                    }
                    sum = addmod(sum, t, *m);
                }
                BigInt::from(sum)
            }
            EvalTables::Big { terms, pows } => {
                let mut sum = BigInt::zero();
                for (c, e) in terms {
                    let mut t = c.clone();
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t *= &pows[i][idx[i]][k as usize];
                        }
                    }
                    sum += t;
                }
                sum
            }
        }
    }

    pub(crate) fn point(&self, idx: &[usize]) -> Vec<RingElem> {
        idx.iter()
            .enumerate()
            .map(|(i, &k)| RingElem::from_canonical(self.ring, self.sets[i][k].clone()))
            .collect()
    }

    pub(crate) fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn check_inputs(f: &Polynomial, grid: &GridSpec) -> Result<()> {
    if f.ring() != grid.ring() {
        return Err(Error::RingMismatch(
            f.ring().to_string(),
            grid.ring().to_string(),
        ));
    }
    if f.arity() != grid.arity() {
        return Err(Error::ArityMismatch {
            expected: grid.arity(),
            found: f.arity(),
        });
    }
    let check = grid_condition_check(grid.ring(), grid);
    if let Some((i, x, y)) = check.violation {
        return Err(Error::GridCondition(format!(
            "{x} - {y} is a zero divisor in set {}",
            i + 1
        )));
    }
    Ok(())
}

/// Mixed-radix decoding of a flat index, last variable fastest.
pub(crate) fn unflatten(mut k: u128, sizes: &[usize], out: &mut [usize]) {
    for i in (0..sizes.len()).rev() {
        out[i] = (k % sizes[i] as u128) as usize;
        k /= sizes[i] as u128;
    }
}

/// Advances an odometer over `0..sizes[i]` (last index fastest); returns
/// `false` after wrapping past the last point.
pub fn advance(idx: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < sizes[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}

const CHUNK: u128 = 1 << 14;

/// Exact nonzero/zero counts by full enumeration with default limits.
pub fn count_nonzeros(f: &Polynomial, grid: &GridSpec) -> Result<CountResult> {
    count_nonzeros_with(f, grid, &CountOptions::default())
}

pub fn count_nonzeros_with(
    f: &Polynomial,
    grid: &GridSpec,
    opts: &CountOptions,
) -> Result<CountResult> {
    check_inputs(f, grid)?;
    let grid_size = grid.num_points().ok_or(Error::GridTooLarge {
        points: u128::MAX,
        limit: opts.grid_limit,
    })?;
    if grid_size > opts.grid_limit {
        return Err(Error::GridTooLarge {
            points: grid_size,
            limit: opts.grid_limit,
        });
    }
    let list = grid_size <= opts.zero_set_cap;
    if f.is_zero() {
        let zero_set = list.then(|| grid.points().map(|p| to_elems(grid.ring(), p)).collect());
        return Ok(CountResult {
            nonzeros: 0,
            zeros: grid_size,
            grid_size,
            zero_set,
        });
    }
    let ev = GridEvaluator::new(f, grid)?;
    let sizes = ev.sizes().to_vec();
    let chunks = grid_size.div_ceil(CHUNK);
    let parts: Vec<(u128, Vec<Vec<usize>>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(grid_size);
            let mut idx = vec![0usize; sizes.len()];
            unflatten(start, &sizes, &mut idx);
            let mut zeros = 0u128;
            let mut listed = Vec::new();
            for _ in start..end {
                if ev.value(&idx).is_zero() {
                    zeros += 1;
                    if list {
                        listed.push(idx.clone());
                    }
                }
                advance(&mut idx, &sizes);
            }
            (zeros, listed)
        })
        .collect();
    let zeros: u128 = parts.iter().map(|p| p.0).sum();
    let zero_set = list.then(|| {
        parts
            .iter()
            .flat_map(|p| p.1.iter().map(|idx| ev.point(idx)))
            .collect()
    });
    Ok(CountResult {
        nonzeros: grid_size - zeros,
        zeros,
        grid_size,
        zero_set,
    })
}

fn to_elems(ring: RingSpec, p: Vec<BigInt>) -> Vec<RingElem> {
    p.into_iter()
        .map(|v| RingElem::from_canonical(ring, v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound: BoundReport,
    pub sound: bool,
    pub slack: i128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub nonzero_count: u128,
    pub zero_count: u128,
    pub grid_size: u128,
    pub per_bound: Vec<BoundCheck>,
    /// Unsound entries among the certified bounds; always zero unless a
    /// theorem is wrong.
    pub certified_violations: usize,
    pub zero_set: Option<Vec<Vec<RingElem>>>,
}

/// Checks every count-valued, non-asymptotic bound from
/// [`bounds_for`] against the exact count.
pub fn verify_bounds(f: &Polynomial, grid: &GridSpec) -> Result<VerificationReport> {
    verify_bounds_with(f, grid, &CountOptions::default())
}

pub fn verify_bounds_with(
    f: &Polynomial,
    grid: &GridSpec,
    opts: &CountOptions,
) -> Result<VerificationReport> {
    let counts = count_nonzeros_with(f, grid, opts)?;
    let bounds = if f.is_zero() {
        Vec::new()
    } else {
        bounds_for(f, grid)?
    };
    let per_bound: Vec<BoundCheck> = bounds
        .into_iter()
        .filter(|b| !b.asymptotic)
        .filter_map(|b| {
            let v = b.value.count()?;
            Some(BoundCheck {
                sound: v <= counts.nonzeros,
                slack: counts.nonzeros as i128 - v as i128,
                bound: b,
            })
        })
        .collect();
    let certified_violations = per_bound
        .iter()
        .filter(|c| c.bound.certified && !c.sound)
        .count();
    Ok(VerificationReport {
        nonzero_count: counts.nonzeros,
        zero_count: counts.zeros,
        grid_size: counts.grid_size,
        per_bound,
        certified_violations,
        zero_set: counts.zero_set,
    })
}

/// `prod_i prod_{a in A_i} (x_i - a)` with `A_i` the first `d_i` elements
/// of `S_i` unless subsets are given.
pub fn tightness_family(
    grid: &GridSpec,
    d: &ExponentVector,
    subsets: Option<&[Vec<RingElem>]>,
) -> Result<Polynomial> {
    let n = grid.arity();
    if d.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: d.len(),
        });
    }
    let ring = grid.ring();
    let sizes = grid.sizes();
    if let Some(i) = (0..n).find(|&i| d[i] as u64 > sizes[i]) {
        return Err(Error::Hypothesis(format!(
            "d_{} = {} exceeds |S_{}| = {}",
            i + 1,
            d[i],
            i + 1,
            sizes[i]
        )));
    }
    if let Some(subs) = subsets {
        if subs.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: subs.len(),
            });
        }
    }
    let mut acc = Polynomial::one(ring, n);
    for i in 0..n {
        let set = grid.set(i);
        let chosen: Vec<RingElem> = match subsets {
            None => set[..d[i] as usize].to_vec(),
            Some(subs) => {
                let a = &subs[i];
                if a.len() != d[i] as usize {
                    return Err(Error::InvalidArgument(format!(
                        "subset {} has {} elements, expected {}",
                        i + 1,
                        a.len(),
                        d[i]
                    )));
                }
                for (k, x) in a.iter().enumerate() {
                    if !set.contains(x) {
                        return Err(Error::InvalidArgument(format!("{x} is not in S_{}", i + 1)));
                    }
                    if a[..k].contains(x) {
                        return Err(Error::InvalidArgument(format!(
                            "subset {} repeats {x}",
                            i + 1
                        )));
                    }
                }
                a.clone()
            }
        };
        let x = Polynomial::var(ring, n, i)?;
        for a in chosen {
            acc = acc.mul(&x.sub(&Polynomial::constant(ring, n, &a)?)?)?;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinNonzeroResult {
    pub min_count: u128,
    pub witness: Polynomial,
    pub exhaustive: bool,
    pub polynomials_examined: u128,
}

/// Smallest nonzero count on `grid` over all polynomials supported in
/// `support` whose coefficient at `required` is nonzero. The required
/// coefficient is normalised to 1, since scaling by a unit leaves the zero
/// set unchanged. When the remaining `p^(k)` coefficient choices exceed
/// `budget`, `budget` random choices are sampled instead.
pub fn min_nonzero_search(
    support: &[ExponentVector],
    required: &ExponentVector,
    grid: &GridSpec,
    budget: u128,
    seed: u64,
) -> Result<MinNonzeroResult> {
    let ring = grid.ring();
    let p = match ring.kind() {
        RingKind::PrimeField(p) => p,
        _ => return Err(Error::UnsupportedRing(ring.to_string())),
    };
    let n = grid.arity();
    if !support.contains(required) {
        return Err(Error::NotInSupport(required.as_slice().to_vec()));
    }
    if let Some(e) = support.iter().find(|e| e.len() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            found: e.len(),
        });
    }
    if support
        .iter()
        .any(|e| e != required && e.dominates(required))
    {
        return Err(Error::Hypothesis(format!(
            "{required} is not maximal in the support"
        )));
    }
    let mut others: Vec<ExponentVector> =
        support.iter().filter(|e| *e != required).cloned().collect();
    others.sort();
    others.dedup();

    let grid_size = grid.num_points().ok_or(Error::Overflow("grid size"))?;
    if grid_size > DEFAULT_GRID_LIMIT {
        return Err(Error::GridTooLarge {
            points: grid_size,
            limit: DEFAULT_GRID_LIMIT,
        });
    }
    let column = |e: &ExponentVector| -> Result<Vec<u64>> {
        let mono = Polynomial::from_terms(ring, n, [(e.as_slice().to_vec(), 1)])?;
        let ev = GridEvaluator::new(&mono, grid)?;
        let sizes = ev.sizes().to_vec();
        let mut idx = vec![0usize; n];
        let mut out = Vec::with_capacity(grid_size as usize);
        for _ in 0..grid_size {
            out.push(ev.value(&idx).to_u64().expect("residue"));
            advance(&mut idx, &sizes);
        }
        Ok(out)
    };
    let base = column(required)?;
    let cols: Vec<Vec<u64>> = others.iter().map(column).collect::<Result<_>>()?;
    let k = cols.len();
    let space = (p as u128).checked_pow(k as u32);
    let witness_of = |coeffs: &[u64]| -> Result<Polynomial> {
        let mut terms = vec![(required.as_slice().to_vec(), BigInt::one())];
        for (e, &c) in others.iter().zip(coeffs) {
            terms.push((e.as_slice().to_vec(), BigInt::from(c)));
        }
        Polynomial::from_terms(ring, n, terms)
    };
    let count = |vals: &[u64]| vals.iter().filter(|&&v| v != 0).count() as u128;

    match space {
        Some(space) if space <= budget => {
            let mut vals = base.clone();
            let mut digits = vec![0u64; k];
            let mut best = (count(&vals), digits.clone());
            let mut examined = 1u128;
            'outer: loop {
                let mut i = k;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    for (v, c) in vals.iter_mut().zip(&cols[i]) {
                        *v = addmod(*v, *c, p);
                    }
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                }
                examined += 1;
                let c = count(&vals);
                if c < best.0 {
                    best = (c, digits.clone());
                }
            }
            Ok(MinNonzeroResult {
                min_count: best.0,
                witness: witness_of(&best.1)?,
                exhaustive: true,
                polynomials_examined: examined,
            })
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(u128, Vec<u64>)> = None;
            let samples = budget.max(1);
            for _ in 0..samples {
                let digits: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
                let mut vals = base.clone();
                for (d, col) in digits.iter().zip(&cols) {
                    if *d != 0 {
                        for (v, c) in vals.iter_mut().zip(col) {
                            *v = addmod(*v, mulmod(*c, *d, p), p);
                        }
                    }
                }
                let c = count(&vals);
                if best.as_ref().is_none_or(|b| c < b.0) {
                    best = Some((c, digits));
                }
            }
            let (min_count, digits) = best.expect("at least one sample");
            Ok(MinNonzeroResult {
                min_count,
                witness: witness_of(&digits)?,
                exhaustive: false,
                polynomials_examined: samples,
            })
        }
    }
}

/// Reproducible random polynomial: each exponent vector in the box
/// `0..=caps` is kept with probability `density` and given a uniformly
/// random nonzero coefficient (from `-10..=10` over the integers).
pub fn random_polynomial(
    arity: usize,
    caps: &[u32],
    density: f64,
    ring: RingSpec,
    seed: u64,
) -> Result<Polynomial> {
    if caps.len() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: caps.len(),
        });
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<usize> = caps.iter().map(|&c| c as usize + 1).collect();
    let mut idx = vec![0usize; arity];
    let mut terms = Vec::new();
    loop {
        if density >= 1.0 || rng.gen_bool(density) {
            let c: i64 = match ring.modulus() {
                Some(m) => rng.gen_range(1..m) as i64,
                None => {
                    let c = rng.gen_range(1..=20i64);
                    if c > 10 {
                        10 - c
                    } else {
                        c
                    }
                }
            };
            let e: Vec<u32> = idx.iter().map(|&k| k as u32).collect();
            terms.push((e, c));
        }
        if !advance(&mut idx, &sizes) {
            break;
        }
    }
    Polynomial::from_terms(ring, arity, terms)
}
