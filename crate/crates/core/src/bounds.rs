//! Lower bounds on the number of grid nonzeros.
//!
//! Every count-valued bound is an exact integer. The only real-valued
//! quantity is the hypergraph density bound, which involves an
//! `l^(n-1)`-th root.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::analysis::{classify, Condition};
use crate::error::{Error, Result};
use crate::poly::{ExponentVector, GridSpec, Polynomial};

/// Relative tolerance for the real root in [`erdos_density_bound`].
pub const REAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    /// Minimum number of nonzeros.
    Count(u128),
    /// Upper bound on the probability of hitting a zero.
    ZeroProbability(BigRational),
    /// Upper bound on the density of zeros (asymptotic).
    ZeroDensity(f64),
    /// Exponent `c` in an `O(s^c)` bound on the number of zeros.
    Exponent(BigRational),
}

impl BoundValue {
    pub fn count(&self) -> Option<u128> {
        match self {
            BoundValue::Count(c) => Some(*c),
            _ => None,
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        match self {
            BoundValue::Count(c) => {
                m.serialize_entry("kind", "count")?;
                m.serialize_entry("value", c)?;
            }
            BoundValue::ZeroProbability(r) => {
                m.serialize_entry("kind", "zero_probability")?;
                m.serialize_entry("value", &r.to_string())?;
            }
            BoundValue::ZeroDensity(x) => {
                m.serialize_entry("kind", "zero_density")?;
                m.serialize_entry("value", x)?;
            }
            BoundValue::Exponent(r) => {
                m.serialize_entry("kind", "exponent")?;
                m.serialize_entry("value", &r.to_string())?;
            }
        }
        m.end()
    }
}

/// A named bound together with the hypothesis it relies on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: BoundValue,
    pub witness_d: Option<ExponentVector>,
    pub witness_e: Option<ExponentVector>,
    pub assumptions: String,
    /// `false` for probes whose hypothesis is not known to imply the bound.
    pub certified: bool,
    pub asymptotic: bool,
}

fn check_sizes(sizes: &[u64], d: &[u32]) -> Result<()> {
    if sizes.len() != d.len() {
        return Err(Error::ArityMismatch {
            expected: sizes.len(),
            found: d.len(),
        });
    }
    if let Some(i) = (0..d.len()).find(|&i| sizes[i] <= d[i] as u64) {
        return Err(Error::Hypothesis(format!(
            "|S_{}| = {} does not exceed d_{} = {}",
            i + 1,
            sizes[i],
            i + 1,
            d[i]
        )));
    }
    Ok(())
}

fn checked_product(it: impl IntoIterator<Item = u64>) -> Result<u128> {
    it.into_iter().try_fold(1u128, |acc, x| {
        acc.checked_mul(x as u128)
            .ok_or(Error::Overflow("bound product"))
    })
}

/// `prod (|S_i| - d_i)`.
pub fn product_bound(sizes: &[u64], d: &[u32]) -> Result<u128> {
    check_sizes(sizes, d)?;
    checked_product(sizes.iter().zip(d).map(|(&s, &k)| s - k as u64))
}

/// `ceil(prod |S_i| * (1 - sum d_i/|S_i|))`, clamped at zero. The value
/// is an integer because each `prod |S_j| * d_i / |S_i|` is one.
pub fn schwartz_additive_bound(sizes: &[u64], d: &[u32]) -> Result<u128> {
    check_sizes(sizes, d)?;
    let total = checked_product(sizes.iter().copied())?;
    let mut subtract: u128 = 0;
    for (i, &k) in d.iter().enumerate() {
        let others = checked_product(
            sizes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &s)| s),
        )?;
        subtract = subtract
            .checked_add(
                others
                    .checked_mul(k as u128)
                    .ok_or(Error::Overflow("additive bound"))?,
            )
            .ok_or(Error::Overflow("additive bound"))?;
    }
    Ok(total.saturating_sub(subtract))
}

fn check_common(s: u64, d: u64) -> Result<()> {
    if s <= d {
        return Err(Error::Hypothesis(format!(
            "sample set size {s} does not exceed degree {d}"
        )));
    }
    Ok(())
}

/// Probability `d/s` of hitting a zero for total degree `d` and a common
/// set of size `s`.
pub fn sz_probability(d: u64, s: u64) -> Result<BigRational> {
    check_common(s, d)?;
    Ok(BigRational::new(BigInt::from(d), BigInt::from(s)))
}

/// Count form of the same statement: `s^n (1 - d/s) = s^(n-1) (s - d)`.
pub fn schwartz_zippel_count(s: u64, d: u64, n: u32) -> Result<u128> {
    check_common(s, d)?;
    if n == 0 {
        return Ok(1);
    }
    let base = (s as u128)
        .checked_pow(n - 1)
        .ok_or(Error::Overflow("Schwartz-Zippel count"))?;
    base.checked_mul((s - d) as u128)
        .ok_or(Error::Overflow("Schwartz-Zippel count"))
}

/// `(s - d)^n` for a per-variable degree bound `d`.
pub fn zippel_bound(s: u64, d: u64, n: u32) -> Result<u128> {
    check_common(s, d)?;
    ((s - d) as u128)
        .checked_pow(n)
        .ok_or(Error::Overflow("Zippel bound"))
}

/// `(s - d)^n` for total degree `d`; numerically equal to
/// [`zippel_bound`] but under a different hypothesis.
pub fn demillo_lipton_bound(s: u64, d: u64, n: u32) -> Result<u128> {
    zippel_bound(s, d, n)
}

/// `1 + sum (|S_i| - d_i - 1)`.
pub fn additive_existence_bound(sizes: &[u64], d: &[u32]) -> Result<u128> {
    check_sizes(sizes, d)?;
    Ok(1 + sizes
        .iter()
        .zip(d)
        .map(|(&s, &k)| (s - k as u64 - 1) as u128)
        .sum::<u128>())
}

/// Data of a generalized Alon-Furedi instance: set sizes, per-variable
/// degree caps and the total degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AFInstance {
    sizes: Vec<u64>,
    caps: Vec<u32>,
    total: u64,
}

impl AFInstance {
    pub fn new(sizes: Vec<u64>, caps: Vec<u32>, total: u64) -> Result<Self> {
        check_sizes(&sizes, &caps)?;
        let cap_sum: u64 = caps.iter().map(|&c| c as u64).sum();
        if total > cap_sum {
            return Err(Error::Hypothesis(format!(
                "total degree {total} exceeds the sum of caps {cap_sum}"
            )));
        }
        Ok(AFInstance { sizes, caps, total })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn lower(&self) -> Vec<u64> {
        self.sizes
            .iter()
            .zip(&self.caps)
            .map(|(&s, &c)| s - c as u64)
            .collect()
    }

    fn target(&self) -> u64 {
        self.sizes.iter().sum::<u64>() - self.total
    }
}

/// Minimises `prod y_i` over integers `lower_i <= y_i <= upper_i` with
/// `sum y_i == target` (or `>= target` when `at_least`). Ties go to the
/// lexicographically largest `y`.
fn min_product_dp(
    lower: &[u64],
    upper: &[u64],
    target: u64,
    at_least: bool,
) -> Option<(u128, Vec<u64>)> {
    let n = lower.len();
    let max_sum: u64 = upper.iter().sum();
    if target > max_sum {
        return None;
    }
    let width = max_sum as usize + 1;
    // best[i][t]: min product of y_i..y_{n-1} with exact sum t.
    let mut best = vec![vec![None::<u128>; width]; n + 1];
    best[n][0] = Some(1);
    for i in (0..n).rev() {
        for t in 0..width {
            let mut m: Option<u128> = None;
            for y in lower[i]..=upper[i].min(t as u64) {
                if let Some(rest) = best[i + 1][t - y as usize] {
                    let v = rest.saturating_mul(y as u128);
                    m = Some(m.map_or(v, |c| c.min(v)));
                }
            }
            best[i][t] = m;
        }
    }
    let sums: Vec<usize> = if at_least {
        (target as usize..width).collect()
    } else {
        vec![target as usize]
    };
    let (value, mut t) = sums
        .into_iter()
        .filter_map(|t| best[0][t].map(|v| (v, t)))
        .min_by_key(|&(v, t)| (v, t))?;
    let mut ys = Vec::with_capacity(n);
    let mut remaining = value;
    for i in 0..n {
        let y = (lower[i]..=upper[i].min(t as u64))
            .rev()
            .find(|&y| {
                best[i + 1][t - y as usize]
                    .is_some_and(|rest| rest.saturating_mul(y as u128) == remaining)
            })
            .expect("dp table is consistent");
        remaining = if y == 0 { 0 } else { remaining / y as u128 };
        t -= y as usize;
        ys.push(y);
    }
    Some((value, ys))
}

/// Optimum `N` of: minimise `prod y_i` subject to
/// `|S_i| - d_i <= y_i <= |S_i|` and `sum y_i = sum |S_i| - d`, together
/// with the lexicographically largest minimiser.
pub fn gen_alon_furedi_bound(inst: &AFInstance) -> Result<(u128, Vec<u64>)> {
    min_product_dp(&inst.lower(), &inst.sizes, inst.target(), false)
        .ok_or_else(|| Error::Hypothesis("infeasible Alon-Furedi instance".into()))
}

/// Same optimisation with the sum constraint relaxed to `>=`.
pub fn gen_alon_furedi_bound_relaxed(inst: &AFInstance) -> Result<(u128, Vec<u64>)> {
    min_product_dp(&inst.lower(), &inst.sizes, inst.target(), true)
        .ok_or_else(|| Error::Hypothesis("infeasible Alon-Furedi instance".into()))
}

fn check_af_range(sizes: &[u64], d: u64) -> Result<u64> {
    let slack: u64 = sizes.iter().map(|&s| s.saturating_sub(1)).sum();
    if sizes.contains(&0) || d > slack {
        return Err(Error::Hypothesis(format!(
            "total degree {d} outside 0..={slack}"
        )));
    }
    Ok(sizes.iter().sum::<u64>() - d)
}

/// Bound of the original Alon-Furedi theorem (valid when `f` has at least
/// one nonzero on the grid): minimise `prod y_i` with `1 <= y_i <= |S_i|`
/// and `sum y_i >= sum |S_i| - d`. Solved greedily: start from all ones
/// and raise the variables with the largest sets first.
pub fn alon_furedi_original_bound(sizes: &[u64], d: u64) -> Result<(u128, Vec<u64>)> {
    let target = check_af_range(sizes, d)?;
    let mut idx: Vec<usize> = (0..sizes.len()).collect();
    idx.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut y = vec![1u64; sizes.len()];
    let mut need = target.saturating_sub(sizes.len() as u64);
    for i in idx {
        let inc = (sizes[i] - 1).min(need);
        y[i] += inc;
        need -= inc;
    }
    let value = checked_product(y.iter().copied())?;
    Ok((value, y))
}

/// Dynamic-programming solution of the original Alon-Furedi problem.
pub fn alon_furedi_original_dp(sizes: &[u64], d: u64) -> Result<(u128, Vec<u64>)> {
    let target = check_af_range(sizes, d)?;
    min_product_dp(&vec![1; sizes.len()], sizes, target, true)
        .ok_or_else(|| Error::Hypothesis("infeasible Alon-Furedi instance".into()))
}

/// Hypergraph zero-density bound `(3n)^n / s^(1/l^(n-1))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityBound {
    pub numerator: u128,
    pub root_index: u64,
    pub s: u64,
    pub value: f64,
    /// The exact value when `s` is a perfect `root_index`-th power.
    pub exact: Option<String>,
}

pub fn erdos_density_bound(n: u32, l: u32, s: u64) -> Result<DensityBound> {
    if n < 1 || l < 2 || s < 1 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1, l >= 2, s >= 1; got n={n}, l={l}, s={s}"
        )));
    }
    let numerator = (3 * n as u128)
        .checked_pow(n)
        .ok_or(Error::Overflow("density numerator"))?;
    let root_index = (l as u64)
        .checked_pow(n - 1)
        .ok_or(Error::Overflow("density root"))?;
    let root = (s as f64).powf(1.0 / root_index as f64);
    let value = numerator as f64 / root;
    let exact = integer_root(s, root_index)
        .map(|r| BigRational::new(BigInt::from(numerator), BigInt::from(r)).to_string());
    Ok(DensityBound {
        numerator,
        root_index,
        s,
        value,
        exact,
    })
}

fn integer_root(s: u64, k: u64) -> Option<u64> {
    if k == 1 {
        return Some(s);
    }
    let guess = (s as f64).powf(1.0 / k as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| {
        u32::try_from(k)
            .ok()
            .and_then(|k| (r as u128).checked_pow(k))
            .is_some_and(|p| p == s as u128)
    })
}

/// Exponent `2 - 1/(min(d1, d2) + 1)` of the bipartite zero-count bound.
pub fn kst_exponent(d1: u32, d2: u32) -> BigRational {
    let l = d1.min(d2) as i64 + 1;
    BigRational::new(BigInt::from(2 * l - 1), BigInt::from(l))
}

fn fmt_order(order: &[usize]) -> String {
    let names: Vec<String> = order.iter().map(|i| format!("x{}", i + 1)).collect();
    names.join(",")
}

/// Every bound applicable to `f` on `grid`, derived from the hypotheses
/// reported by [`classify`]. Probes that the theory does not back (the
/// product bound at a merely maximal monomial) carry `certified: false`.
pub fn bounds_for(f: &Polynomial, grid: &GridSpec) -> Result<Vec<BoundReport>> {
    if f.arity() != grid.arity() {
        return Err(Error::ArityMismatch {
            expected: grid.arity(),
            found: f.arity(),
        });
    }
    let sizes = grid.sizes();
    let n = sizes.len();
    let fits = |d: &ExponentVector| (0..n).all(|i| sizes[i] > d[i] as u64);
    let uniform = sizes
        .windows(2)
        .all(|w| w[0] == w[1])
        .then(|| sizes.first().copied().unwrap_or(1));
    let reports = classify(f)?;
    let degrees = f.degrees()?;

    let mut out: Vec<BoundReport> = Vec::new();
    let mut seen: HashSet<(String, Option<ExponentVector>, Option<ExponentVector>)> =
        HashSet::new();
    let mut push = |out: &mut Vec<BoundReport>, r: BoundReport| {
        if seen.insert((r.name.clone(), r.witness_d.clone(), r.witness_e.clone())) {
            out.push(r);
        }
    };
    let report = |name: &str,
                  value: BoundValue,
                  d: Option<&ExponentVector>,
                  e: Option<&ExponentVector>,
                  assumptions: String| BoundReport {
        name: name.to_string(),
        value,
        witness_d: d.cloned(),
        witness_e: e.cloned(),
        assumptions,
        certified: true,
        asymptotic: false,
    };

    let mut existence_certified = false;
    let mut certified_products: HashSet<ExponentVector> = HashSet::new();

    for r in reports.iter().filter(|r| r.holds) {
        let d = &r.witness_d;
        match &r.condition {
            Condition::LexLargest { order } if fits(d) => {
                let why = format!(
                    "lexicographically largest monomial in order ({})",
                    fmt_order(order)
                );
                certified_products.insert(d.clone());
                existence_certified = true;
                push(
                    &mut out,
                    report(
                        "product_bound",
                        BoundValue::Count(product_bound(&sizes, d.as_slice())?),
                        Some(d),
                        None,
                        why.clone(),
                    ),
                );
                push(
                    &mut out,
                    report(
                        "schwartz_additive",
                        BoundValue::Count(schwartz_additive_bound(&sizes, d.as_slice())?),
                        Some(d),
                        None,
                        why,
                    ),
                );
            }
            Condition::SuccessivelyLargest { order } if fits(d) => {
                let e = r.witness_e.as_ref();
                push(
                    &mut out,
                    report(
                        "successively_largest_product",
                        BoundValue::Count(product_bound(&sizes, d.as_slice())?),
                        Some(d),
                        e,
                        format!(
                            "successively largest sequence in order ({})",
                            fmt_order(order)
                        ),
                    ),
                );
            }
            Condition::DLeading if fits(d) => {
                existence_certified = true;
                push(
                    &mut out,
                    report(
                        "d_leading_existence",
                        BoundValue::Count(1),
                        Some(d),
                        r.witness_e.as_ref(),
                        "d-leading multi-index with |S_i| > d_i".into(),
                    ),
                );
            }
            Condition::MaximalMonomial if fits(d) => {
                existence_certified = true;
                push(
                    &mut out,
                    report(
                        "existence",
                        BoundValue::Count(1),
                        Some(d),
                        None,
                        "maximal monomial".into(),
                    ),
                );
                push(
                    &mut out,
                    report(
                        "additive_existence",
                        BoundValue::Count(additive_existence_bound(&sizes, d.as_slice())?),
                        Some(d),
                        None,
                        "maximal monomial".into(),
                    ),
                );
            }
            Condition::PartialDegrees if fits(d) => {
                existence_certified = true;
                push(
                    &mut out,
                    report(
                        "generalized_demillo_lipton_zippel",
                        BoundValue::Count(product_bound(&sizes, d.as_slice())?),
                        Some(d),
                        None,
                        "partial degrees d_i".into(),
                    ),
                );
                let dmax = d.as_slice().iter().copied().max().unwrap_or(0) as u64;
                if let Some(s) = uniform {
                    push(
                        &mut out,
                        report(
                            "zippel",
                            BoundValue::Count(zippel_bound(s, dmax, n as u32)?),
                            Some(d),
                            None,
                            format!("every partial degree <= {dmax}, common set size {s}"),
                        ),
                    );
                }
                let inst = AFInstance::new(sizes.clone(), d.as_slice().to_vec(), degrees.total)?;
                let (nval, ys) = gen_alon_furedi_bound(&inst)?;
                push(
                    &mut out,
                    report(
                        "generalized_alon_furedi",
                        BoundValue::Count(nval),
                        Some(d),
                        None,
                        format!(
                            "partial degrees d_i, total degree {}, argmin y = {:?}",
                            degrees.total, ys
                        ),
                    ),
                );
            }
            Condition::TotalDegree => {
                let total = degrees.total;
                if let Some(s) = uniform.filter(|&s| s > total) {
                    push(
                        &mut out,
                        report(
                            "schwartz_zippel",
                            BoundValue::Count(schwartz_zippel_count(s, total, n as u32)?),
                            None,
                            None,
                            format!("total degree {total}, common set size {s}"),
                        ),
                    );
                    push(
                        &mut out,
                        report(
                            "schwartz_zippel_probability",
                            BoundValue::ZeroProbability(sz_probability(total, s)?),
                            None,
                            None,
                            format!("total degree {total}, common set size {s}"),
                        ),
                    );
                    push(
                        &mut out,
                        report(
                            "demillo_lipton",
                            BoundValue::Count(demillo_lipton_bound(s, total, n as u32)?),
                            None,
                            None,
                            format!("total degree {total}, common set size {s}"),
                        ),
                    );
                }
                if fits(d) {
                    existence_certified = true;
                    push(
                        &mut out,
                        report(
                            "alon_nullstellensatz",
                            BoundValue::Count(1),
                            Some(d),
                            None,
                            "monomial of largest total degree".into(),
                        ),
                    );
                }
            }
            _ => {}
        }
    }

    // Quantitative probes at maximal monomials: not implied by maximality.
    for r in reports
        .iter()
        .filter(|r| r.holds && r.condition == Condition::MaximalMonomial)
    {
        let d = &r.witness_d;
        if fits(d) && !certified_products.contains(d) {
            let mut probe = report(
                "product_bound",
                BoundValue::Count(product_bound(&sizes, d.as_slice())?),
                Some(d),
                None,
                "maximal monomial only; the quantitative conclusion does not follow".into(),
            );
            probe.certified = false;
            push(&mut out, probe);
        }
    }

    if existence_certified {
        if let Ok((v, ys)) = alon_furedi_original_bound(&sizes, degrees.total) {
            push(
                &mut out,
                report(
                    "alon_furedi",
                    BoundValue::Count(v),
                    None,
                    None,
                    format!(
                        "total degree {}, a nonzero exists on the grid, argmin y = {:?}",
                        degrees.total, ys
                    ),
                ),
            );
        }
    }

    let s_min = sizes.iter().copied().min().unwrap_or(1);
    for r in reports
        .iter()
        .filter(|r| r.holds && r.condition == Condition::MaximalMonomial)
    {
        let d = &r.witness_d;
        let dmax = d.as_slice().iter().copied().max().unwrap_or(0);
        if dmax >= 1 {
            let l = dmax + 1;
            let b = erdos_density_bound(n as u32, l, s_min)?;
            let mut rep = report("erdos_density", BoundValue::ZeroDensity(b.value), Some(d), None, format!("maximal monomial, l = {l}, s = {s_min}; valid only beyond an unspecified threshold s0(n, l)"));
            rep.asymptotic = true;
            push(&mut out, rep);
        }
        if n == 2 {
            let mut rep = report(
                "kst_exponent",
                BoundValue::Exponent(kst_exponent(d[0], d[1])),
                Some(d),
                None,
                "maximal monomial, zeros on an s x s grid are O(s^c)".into(),
            );
            rep.asymptotic = true;
            push(&mut out, rep);
        }
    }
    Ok(out)
}

/// `value` as an `f64`, for display.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.denom().is_zero() {
        return f64::NAN;
    }
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
