//! Which monomial hypotheses a polynomial satisfies, and the exponent
//! regions each hypothesis forbids.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{ExponentVector, Polynomial};

/// Orders are enumerated exhaustively up to this many variables.
pub const MAX_ORDER_ENUMERATION: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Condition {
    MaximalMonomial,
    LexLargest { order: Vec<usize> },
    SuccessivelyLargest { order: Vec<usize> },
    DLeading,
    PartialDegrees,
    TotalDegree,
}

impl Condition {
    pub fn needs_seed(&self) -> bool {
        matches!(
            self,
            Condition::SuccessivelyLargest { .. } | Condition::DLeading
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Condition::MaximalMonomial => "maximal_monomial",
            Condition::LexLargest { .. } => "lex_largest",
            Condition::SuccessivelyLargest { .. } => "successively_largest",
            Condition::DLeading => "d_leading",
            Condition::PartialDegrees => "partial_degrees",
            Condition::TotalDegree => "total_degree",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub condition: Condition,
    pub witness_d: ExponentVector,
    pub witness_e: Option<ExponentVector>,
    pub holds: bool,
}

fn nonzero(f: &Polynomial) -> Result<()> {
    if f.is_zero() {
        Err(Error::ZeroPolynomial)
    } else {
        Ok(())
    }
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidArgument(format!(
            "order {order:?} is not a permutation of {n} variables"
        )));
    }
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument(format!(
                "order {order:?} is not a permutation of {n} variables"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

fn check_len(e: &ExponentVector, n: usize) -> Result<()> {
    if e.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: e.len(),
        });
    }
    Ok(())
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Monomials of `f` that divide no other monomial of `f`.
pub fn maximal_monomials(f: &Polynomial) -> Result<Vec<ExponentVector>> {
    nonzero(f)?;
    let supp: Vec<&ExponentVector> = f.support().collect();
    Ok(supp
        .iter()
        .filter(|m| !supp.iter().any(|o| o != *m && o.dominates(m)))
        .map(|m| (*m).clone())
        .collect())
}

/// Lexicographically largest monomial of `f` when variables are compared
/// in the sequence `order`.
pub fn lex_largest(f: &Polynomial, order: &[usize]) -> Result<ExponentVector> {
    nonzero(f)?;
    check_order(order, f.arity())?;
    Ok(f.support()
        .max_by(|a, b| a.cmp_in_order(b, order))
        .expect("nonzero")
        .clone())
}

/// Degree sequence obtained by repeatedly taking the coefficient of
/// `x_j^{e_j}` along `order`: `d_j` is the largest `a_j` over monomials
/// `a` that agree with the seed on every earlier variable. The result is
/// indexed by variable, not by position in `order`.
pub fn successively_largest(
    f: &Polynomial,
    seed: &ExponentVector,
    order: &[usize],
) -> Result<ExponentVector> {
    nonzero(f)?;
    check_len(seed, f.arity())?;
    check_order(order, f.arity())?;
    if !f.contains(seed) {
        return Err(Error::NotInSupport(seed.as_slice().to_vec()));
    }
    let mut d = vec![0u32; f.arity()];
    let mut live: Vec<&ExponentVector> = f.support().collect();
    for &j in order {
        d[j] = live.iter().map(|a| a[j]).max().expect("seed stays live");
        live.retain(|a| a[j] == seed[j]);
    }
    Ok(ExponentVector::new(d))
}

/// Whether `e` is a `d`-leading multi-index of `f`: no other monomial
/// `e'` has `e'_i == e_i || e'_i > d_i` in every coordinate.
pub fn is_d_leading(f: &Polynomial, e: &ExponentVector, d: &ExponentVector) -> Result<bool> {
    nonzero(f)?;
    check_len(e, f.arity())?;
    check_len(d, f.arity())?;
    if !f.contains(e) {
        return Err(Error::NotInSupport(e.as_slice().to_vec()));
    }
    if !d.dominates(e) {
        return Err(Error::Hypothesis(format!("seed {e} exceeds {d}")));
    }
    Ok(!f
        .support()
        .any(|c| forbids(&Condition::DLeading, d, Some(e), c)))
}

/// Whether a monomial `c` in `f` would violate `cond` with witness
/// `(d, e)`. `e` is ignored by conditions that do not use a seed.
pub fn forbids(
    cond: &Condition,
    d: &ExponentVector,
    e: Option<&ExponentVector>,
    c: &ExponentVector,
) -> bool {
    let n = d.len();
    match cond {
        Condition::MaximalMonomial => c != d && c.dominates(d),
        Condition::LexLargest { order } => c.cmp_in_order(d, order).is_gt(),
        Condition::SuccessivelyLargest { order } => {
            let e = e.expect("seed required");
            for &j in order {
                if c[j] > d[j] {
                    return true;
                }
                if c[j] != e[j] {
                    return false;
                }
            }
            false
        }
        Condition::DLeading => {
            let e = e.expect("seed required");
            c != e && (0..n).all(|i| c[i] == e[i] || c[i] > d[i])
        }
        Condition::PartialDegrees => (0..n).any(|i| c[i] > d[i]),
        Condition::TotalDegree => c.total() > d.total(),
    }
}

/// The forbidden exponent vectors for `cond` with witness `(d, e)`,
/// restricted to the box `[0, cap]`.
pub fn forbidden_set(
    cond: &Condition,
    d: &ExponentVector,
    e: Option<&ExponentVector>,
    cap: &ExponentVector,
) -> Result<BTreeSet<ExponentVector>> {
    let n = d.len();
    check_len(cap, n)?;
    if let Some(e) = e {
        check_len(e, n)?;
    }
    match cond {
        Condition::LexLargest { order } | Condition::SuccessivelyLargest { order } => {
            check_order(order, n)?
        }
        _ => {}
    }
    if cond.needs_seed() && e.is_none() {
        return Err(Error::InvalidArgument(format!(
            "{} needs a seed monomial",
            cond.name()
        )));
    }
    let mut out = BTreeSet::new();
    let mut cur = vec![0u32; n];
    loop {
        let c = ExponentVector::new(cur.clone());
        if forbids(cond, d, e, &c) {
            out.insert(c);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < cap[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Re-checks a hypothesis with a given witness against the support of `f`.
pub fn check_condition(
    f: &Polynomial,
    cond: &Condition,
    d: &ExponentVector,
    e: Option<&ExponentVector>,
) -> Result<bool> {
    nonzero(f)?;
    check_len(d, f.arity())?;
    if let Some(e) = e {
        check_len(e, f.arity())?;
    }
    let witness_present = match cond {
        Condition::MaximalMonomial | Condition::LexLargest { .. } => f.contains(d),
        Condition::SuccessivelyLargest { .. } => {
            f.contains(e.ok_or_else(|| Error::InvalidArgument("missing seed".into()))?)
        }
        Condition::DLeading => {
            let e = e.ok_or_else(|| Error::InvalidArgument("missing seed".into()))?;
            f.contains(e) && d.dominates(e)
        }
        Condition::PartialDegrees | Condition::TotalDegree => true,
    };
    Ok(witness_present && !f.support().any(|c| forbids(cond, d, e, c)))
}

fn orders_for(n: usize) -> Vec<Vec<usize>> {
    if n <= MAX_ORDER_ENUMERATION {
        permutations(n)
    } else {
        vec![(0..n).collect()]
    }
}

/// Every hypothesis report for `f`: one per maximal monomial, one
/// lexicographically largest monomial and all successively largest
/// sequences per variable order, the implied d-leading pairs, the partial
/// degree vector and each monomial of largest total degree.
pub fn classify(f: &Polynomial) -> Result<Vec<HypothesisReport>> {
    nonzero(f)?;
    let report = |condition: Condition, d: ExponentVector, e: Option<ExponentVector>| {
        let holds = check_condition(f, &condition, &d, e.as_ref()).unwrap_or(false);
        HypothesisReport {
            condition,
            witness_d: d,
            witness_e: e,
            holds,
        }
    };
    let mut out = Vec::new();
    for m in maximal_monomials(f)? {
        out.push(report(Condition::MaximalMonomial, m, None));
    }
    let orders = orders_for(f.arity());
    for order in &orders {
        let d = lex_largest(f, order)?;
        out.push(report(
            Condition::LexLargest {
                order: order.clone(),
            },
            d,
            None,
        ));
    }
    let seeds: Vec<&ExponentVector> = f.support().collect();
    let per_order: Vec<Vec<HypothesisReport>> = orders
        .par_iter()
        .map(|order| {
            seeds
                .iter()
                .map(|e| {
                    let d = successively_largest(f, e, order).expect("seed in support");
                    report(
                        Condition::SuccessivelyLargest {
                            order: order.clone(),
                        },
                        d,
                        Some((*e).clone()),
                    )
                })
                .collect()
        })
        .collect();
    let mut leading = BTreeSet::new();
    for r in per_order.iter().flatten() {
        leading.insert((r.witness_e.clone().expect("seeded"), r.witness_d.clone()));
    }
    out.extend(per_order.into_iter().flatten());
    for (e, d) in leading {
        out.push(report(Condition::DLeading, d, Some(e)));
    }
    let deg = f.degrees()?;
    out.push(report(
        Condition::PartialDegrees,
        ExponentVector::new(deg.partial),
        None,
    ));
    for m in f.support().filter(|m| m.total() == deg.total) {
        out.push(report(Condition::TotalDegree, m.clone(), None));
    }
    Ok(out)
}
