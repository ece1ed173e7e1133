//! Agreements between a multiplication table `a_i b_j` and an addition
//! table `u_i + v_j`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::ring::RingSpec;

pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 100_000_000;
/// Non-improving steps before local search restarts.
pub const RESTART_AFTER: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PuzzleInstance {
    a: Vec<i64>,
    b: Vec<i64>,
    u: Vec<i64>,
    v: Vec<i64>,
}

fn distinct(xs: &[i64]) -> bool {
    let mut seen = BTreeSet::new();
    xs.iter().all(|x| seen.insert(*x))
}

impl PuzzleInstance {
    pub fn new(a: Vec<i64>, b: Vec<i64>, u: Vec<i64>, v: Vec<i64>) -> Result<Self> {
        let s = a.len();
        if b.len() != s || u.len() != s || v.len() != s {
            return Err(Error::InvalidArgument(
                "a, b, u and v must have the same length".into(),
            ));
        }
        if !distinct(&a) || !distinct(&b) {
            return Err(Error::InvalidArgument(
                "the entries of a and of b must be distinct".into(),
            ));
        }
        Ok(PuzzleInstance { a, b, u, v })
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn u(&self) -> &[i64] {
        &self.u
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn product_table(&self) -> Vec<Vec<i128>> {
        self.a
            .iter()
            .map(|&x| self.b.iter().map(|&y| x as i128 * y as i128).collect())
            .collect()
    }

    pub fn sum_table(&self) -> Vec<Vec<i128>> {
        self.u
            .iter()
            .map(|&x| self.v.iter().map(|&y| x as i128 + y as i128).collect())
            .collect()
    }

    /// Both tables as aligned text, agreeing cells marked with `*`.
    pub fn render_tables(&self) -> String {
        let prod = self.product_table();
        let sum = self.sum_table();
        let width = prod
            .iter()
            .chain(&sum)
            .flatten()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1)
            + 1;
        let mut out = String::new();
        for (title, table) in [("products a_i b_j", &prod), ("sums u_i + v_j", &sum)] {
            out.push_str(title);
            out.push('\n');
            for i in 0..self.s() {
                for j in 0..self.s() {
                    let mark = if prod[i][j] == sum[i][j] { "*" } else { " " };
                    out.push_str(&format!("{:>width$}{mark}", table[i][j]));
                }
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementPattern {
    pub s: usize,
    pub cells: BTreeSet<(usize, usize)>,
    pub count: usize,
}

impl AgreementPattern {
    pub fn from_cells(s: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let cells: BTreeSet<_> = cells.into_iter().collect();
        AgreementPattern {
            s,
            count: cells.len(),
            cells,
        }
    }
}

/// Cells `(i, j)` with `a_i b_j = u_i + v_j`.
pub fn agreement_count(inst: &PuzzleInstance) -> AgreementPattern {
    let s = inst.s();
    let mut cells = BTreeSet::new();
    for i in 0..s {
        for j in 0..s {
            if inst.a[i] as i128 * inst.b[j] as i128 == inst.u[i] as i128 + inst.v[j] as i128 {
                cells.insert((i, j));
            }
        }
    }
    AgreementPattern {
        s,
        count: cells.len(),
        cells,
    }
}

/// The instance with `u_i = P(a_i) = c_i` and `v_j = Q(b_j) = d_j`, whose
/// agreements are the zeros of `-xy + P(x) + Q(y)` on `{a} x {b}`.
pub fn from_polynomial(a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> Result<PuzzleInstance> {
    PuzzleInstance::new(a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec())
}

fn horner(coeffs: &[i64], x: i64) -> Result<i64> {
    coeffs.iter().rev().try_fold(0i64, |acc, &c| {
        acc.checked_mul(x)
            .and_then(|t| t.checked_add(c))
            .ok_or(Error::Overflow("univariate evaluation"))
    })
}

/// [`from_polynomial`] with `P` and `Q` given by coefficient lists,
/// constant term first.
pub fn from_univariates(a: &[i64], b: &[i64], p: &[i64], q: &[i64]) -> Result<PuzzleInstance> {
    let c = a
        .iter()
        .map(|&x| horner(p, x))
        .collect::<Result<Vec<_>>>()?;
    let d = b
        .iter()
        .map(|&y| horner(q, y))
        .collect::<Result<Vec<_>>>()?;
    from_polynomial(a, b, &c, &d)
}

/// `-xy + P(x) + Q(y)` over the integers.
pub fn equation_polynomial(p: &[i64], q: &[i64]) -> Result<Polynomial> {
    let mut terms: Vec<(Vec<u32>, BigInt)> = vec![(vec![1, 1], BigInt::from(-1))];
    for (k, &c) in p.iter().enumerate() {
        terms.push((vec![k as u32, 0], BigInt::from(c)));
    }
    for (k, &c) in q.iter().enumerate() {
        terms.push((vec![0, k as u32], BigInt::from(c)));
    }
    Polynomial::from_terms(RingSpec::integers(), 2, terms)
}

/// True iff no two rows share two columns.
pub fn k22_check(pattern: &AgreementPattern) -> bool {
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); pattern.s];
    for &(i, j) in &pattern.cells {
        if i >= rows.len() {
            rows.resize(i + 1, Vec::new());
        }
        rows[i].push(j);
    }
    for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            let shared = rows[i].iter().filter(|j| rows[k].contains(j)).count();
            if shared >= 2 {
                return false;
            }
        }
    }
    true
}

/// `count <= s (1 + sqrt(4s - 3)) / 2`, decided in integers.
pub fn zarankiewicz_ok(count: usize, s: usize) -> bool {
    if s == 0 {
        return count == 0;
    }
    let t = 2 * count as i128 - s as i128;
    t <= 0 || t * t <= (s as i128).pow(2) * (4 * s as i128 - 3)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub best: PuzzleInstance,
    pub count: usize,
    pub pattern: AgreementPattern,
    pub candidates: u128,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn increasing_tuples(lo: i64, hi: i64, s: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn rec(lo: i64, hi: i64, s: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(lo, |&x| x + 1);
        for x in start..=hi {
            cur.push(x);
            rec(lo, hi, s, cur, out);
            cur.pop();
        }
    }
    rec(lo, hi, s, &mut cur, &mut out);
    out
}

/// Count, index of `a`, then `b`, `u`, `v`.
type Candidate = (usize, usize, Vec<i64>, Vec<i64>, Vec<i64>);

/// Best `v` for fixed `a`, `b`, `u`: each `v_j` takes the most frequent
/// in-range value of `a_i b_j - u_i` (smallest on ties).
fn best_v(prod: &[Vec<i64>], u: &[i64], range: i64) -> (usize, Vec<i64>) {
    let s = u.len();
    let mut total = 0;
    let mut v = Vec::with_capacity(s);
    let mut cand = Vec::with_capacity(s);
    #[allow(clippy::needless_range_loop)]
    for j in 0..s {
        cand.clear();
        cand.extend(
            (0..s)
                .map(|i| prod[i][j] - u[i])
                .filter(|w| w.abs() <= range),
        );
        cand.sort_unstable();
        let (mut best, mut best_len) = (-range, 0);
        let mut k = 0;
        while k < cand.len() {
            let mut e = k;
            while e < cand.len() && cand[e] == cand[k] {
                e += 1;
            }
            if e - k > best_len {
                best_len = e - k;
                best = cand[k];
            }
            k = e;
        }
        total += best_len;
        v.push(best);
    }
    (total, v)
}

/// Maximum agreement count over all instances with entries in
/// `[-range, range]`. `a` and `b` are taken ascending (row and column
/// permutations preserve the count) and each `v_j` is chosen optimally for
/// the given `a`, `b`, `u`, so the search covers `C(2R+1, s)^2 (2R+1)^s`
/// candidates.
pub fn exhaustive_search(s: usize, range: i64, budget: u128) -> Result<SearchResult> {
    if s == 0 || range < 0 {
        return Err(Error::InvalidArgument("need s >= 1 and range >= 0".into()));
    }
    let width = 2 * range as u128 + 1;
    let tuples = binomial(width, s as u128);
    if tuples == 0 {
        return Err(Error::InvalidArgument(format!(
            "[-{range}, {range}] has fewer than {s} distinct values"
        )));
    }
    let size = tuples
        .saturating_mul(tuples)
        .saturating_mul(width.saturating_pow(s as u32));
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let increasing = increasing_tuples(-range, range, s);
    let all_u: Vec<Vec<i64>> = {
        let sizes = vec![width as usize; s];
        let mut idx = vec![0usize; s];
        let mut out = Vec::new();
        loop {
            out.push(idx.iter().map(|&k| k as i64 - range).collect());
            if !crate::oracle::advance(&mut idx, &sizes) {
                break;
            }
        }
        out
    };
    let best = increasing
        .par_iter()
        .enumerate()
        .map(|(ai, a)| {
            let mut best: Option<Candidate> = None;
            for b in &increasing {
                let prod: Vec<Vec<i64>> = a
                    .iter()
                    .map(|&x| b.iter().map(|&y| x * y).collect())
                    .collect();
                for u in &all_u {
                    let (c, v) = best_v(&prod, u, range);
                    if best.as_ref().is_none_or(|bst| c > bst.0) {
                        best = Some((c, ai, b.clone(), u.clone(), v));
                    }
                }
            }
            best.expect("nonempty search space")
        })
        .reduce_with(|x, y| {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                y
            } else {
                x
            }
        })
        .expect("nonempty search space");
    let (count, ai, b, u, v) = best;
    let inst = PuzzleInstance::new(increasing[ai].clone(), b, u, v)?;
    let pattern = agreement_count(&inst);
    debug_assert_eq!(pattern.count, count);
    Ok(SearchResult {
        best: inst,
        count,
        pattern,
        candidates: size,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Improvement {
    pub step: u64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSearchResult {
    pub best: PuzzleInstance,
    pub count: usize,
    pub pattern: AgreementPattern,
    pub seed: u64,
    pub steps: u64,
    pub restarts: u64,
    /// Every step at which the global best improved.
    pub history: Vec<Improvement>,
}

fn random_distinct(rng: &mut ChaCha8Rng, s: usize, range: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(s);
    while out.len() < s {
        let x = rng.gen_range(-range..=range);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng, s: usize, range: i64) -> PuzzleInstance {
    let a = random_distinct(rng, s, range);
    let b = random_distinct(rng, s, range);
    let u = (0..s).map(|_| rng.gen_range(-range..=range)).collect();
    let v = (0..s).map(|_| rng.gen_range(-range..=range)).collect();
    PuzzleInstance { a, b, u, v }
}

/// One random move: a +-1 step on one entry, a resample of one entry, or a
/// swap of two entries of the same vector. Half of the resamples of `u` or
/// `v` pick the value that makes a random cell of its row or column agree.
fn perturb(rng: &mut ChaCha8Rng, inst: &PuzzleInstance, range: i64) -> PuzzleInstance {
    let s = inst.s();
    loop {
        let mut next = inst.clone();
        let which = rng.gen_range(0..4);
        let k = rng.gen_range(0..s);
        let vec = match which {
            0 => &mut next.a,
            1 => &mut next.b,
            2 => &mut next.u,
            _ => &mut next.v,
        };
        match rng.gen_range(0..3) {
            0 => {
                let step = if rng.gen_bool(0.5) { 1 } else { -1 };
                vec[k] = (vec[k] + step).clamp(-range, range);
            }
            1 => {
                let aligned = which >= 2 && rng.gen_bool(0.5);
                vec[k] = if aligned {
                    let o = rng.gen_range(0..s);
                    let target = if which == 2 {
                        inst.a[k] * inst.b[o] - inst.v[o]
                    } else {
                        inst.a[o] * inst.b[k] - inst.u[o]
                    };
                    target.clamp(-range, range)
                } else {
                    rng.gen_range(-range..=range)
                };
            }
            _ => {
                if s >= 2 {
                    let l = rng.gen_range(0..s);
                    vec.swap(k, l);
                }
            }
        }
        if distinct(&next.a) && distinct(&next.b) {
            return next;
        }
    }
}

/// Hill climbing over integer instances with entries in
/// `[-range, range]`. Moves that do not lower the count are accepted; a
/// fresh random instance is drawn after [`RESTART_AFTER`] steps without
/// improvement. Deterministic for a given seed.
pub fn local_search(s: usize, budget: u64, seed: u64, range: i64) -> Result<LocalSearchResult> {
    if s < 2 {
        return Err(Error::InvalidArgument("local search needs s >= 2".into()));
    }
    if (2 * range as i128 + 1) < s as i128 || range < 0 {
        return Err(Error::InvalidArgument(format!(
            "[-{range}, {range}] has fewer than {s} distinct values"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = random_instance(&mut rng, s, range);
    let mut cur_count = agreement_count(&cur).count;
    let mut best = cur.clone();
    let mut best_count = cur_count;
    let mut history = vec![Improvement {
        step: 0,
        count: best_count,
    }];
    let mut restart_best = cur_count;
    let mut stale = 0u64;
    let mut restarts = 0u64;
    for step in 1..=budget {
        let cand = perturb(&mut rng, &cur, range);
        let c = agreement_count(&cand).count;
        if c >= cur_count {
            cur = cand;
            cur_count = c;
        }
        if cur_count > restart_best {
            restart_best = cur_count;
            stale = 0;
        } else {
            stale += 1;
        }
        if cur_count > best_count {
            best = cur.clone();
            best_count = cur_count;
            history.push(Improvement {
                step,
                count: best_count,
            });
        }
        if stale >= RESTART_AFTER {
            cur = random_instance(&mut rng, s, range);
            cur_count = agreement_count(&cur).count;
            restart_best = cur_count;
            stale = 0;
            restarts += 1;
        }
    }
    let pattern = agreement_count(&best);
    Ok(LocalSearchResult {
        count: pattern.count,
        best,
        pattern,
        seed,
        steps: budget,
        restarts,
        history,
    })
}
