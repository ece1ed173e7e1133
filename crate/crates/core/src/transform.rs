//! Trimming modulo the vanishing polynomials of a grid, and recovery of a
//! maximal coefficient from grid values.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{vanishing_poly, ExponentVector, GridSpec, Polynomial};
use crate::ring::{grid_condition_check, RingElem, RingSpec};

fn check_grid(f: &Polynomial, grid: &GridSpec) -> Result<()> {
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
    if let Some((i, x, y)) = grid_condition_check(grid.ring(), grid).violation {
        return Err(Error::GridCondition(format!(
            "{x} - {y} is a zero divisor in set {}",
            i + 1
        )));
    }
    Ok(())
}

/// Remainder of `f` on division by each `prod_{a in S_i} (x_i - a)`,
/// taken in ascending variable order. The result agrees with `f` on the
/// grid and has degree below `|S_i|` in every `x_i`.
pub fn trim(f: &Polynomial, grid: &GridSpec) -> Result<Polynomial> {
    let order: Vec<usize> = (0..grid.arity()).collect();
    trim_in_order(f, grid, &order)
}

/// [`trim`] with the variables reduced in the given order.
pub fn trim_in_order(f: &Polynomial, grid: &GridSpec, order: &[usize]) -> Result<Polynomial> {
    check_grid(f, grid)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..grid.arity()).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "{order:?} is not a permutation of the variables"
        )));
    }
    let mut g = f.clone();
    for &i in order {
        g = reduce_variable(&g, grid, i)?;
    }
    Ok(g)
}

fn reduce_variable(f: &Polynomial, grid: &GridSpec, var: usize) -> Result<Polynomial> {
    let ring = f.ring();
    let s = grid.sets()[var].len();
    let top = f.support().map(|e| e[var] as usize).max().unwrap_or(0);
    if top < s {
        return Ok(f.clone());
    }
    // x^s = -(v_0 + v_1 x + ... + v_{s-1} x^{s-1}) modulo the vanishing polynomial.
    let v = vanishing_poly(grid, var)?;
    let mut low = vec![BigInt::zero(); s];
    for (e, c) in v.raw_terms() {
        if (e[var] as usize) < s {
            low[e[var] as usize] = ring.neg_raw(c);
        }
    }
    let mut levels: Vec<HashMap<Vec<u32>, BigInt>> = vec![HashMap::new(); top + 1];
    for (e, c) in f.raw_terms() {
        let mut rest = e.as_slice().to_vec();
        let k = rest[var] as usize;
        rest[var] = 0;
        levels[k].insert(rest, c.clone());
    }
    for level in (s..=top).rev() {
        let bucket = std::mem::take(&mut levels[level]);
        for (rest, c) in bucket {
            for (k, w) in low.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let target = level - s + k;
                let add = ring.mul_raw(w, &c);
                let slot = levels[target]
                    .entry(rest.clone())
                    .or_insert_with(BigInt::zero);
                *slot = ring.add_raw(slot, &add);
            }
        }
    }
    let mut out = Polynomial::zero(ring, f.arity());
    for (k, bucket) in levels.into_iter().enumerate().take(s) {
        for (mut rest, c) in bucket {
            rest[var] = k as u32;
            out.add_term(ExponentVector::new(rest), &c);
        }
    }
    Ok(out)
}

/// Weights `g(a)` on a set `S` with `sum g(a) a^k = 0` for `k < deg` and
/// `= 1` for `k = deg`. For `deg < |S| - 1` only the first `deg + 1`
/// elements carry weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multipliers {
    pub elements: Vec<RingElem>,
    pub weights: Vec<RingElem>,
    pub degree: u32,
}

impl Multipliers {
    pub fn weight(&self, x: &RingElem) -> Option<&RingElem> {
        self.elements
            .iter()
            .position(|e| e == x)
            .map(|k| &self.weights[k])
    }

    /// `sum g(a) a^k` over the set.
    pub fn moment(&self, k: u64) -> RingElem {
        let ring = self.elements[0].ring();
        let mut acc = BigInt::zero();
        for (a, g) in self.elements.iter().zip(&self.weights) {
            let t = ring.mul_raw(g.value(), &ring.pow_raw(a.value(), k));
            acc = ring.add_raw(&acc, &t);
        }
        RingElem::from_canonical(ring, acc)
    }
}

/// `g(a_j) = 1 / prod_{k != j} (a_j - a_k)` over the first `d + 1`
/// elements of `set` (all of it when `d` is `None`), zero elsewhere.
pub fn vandermonde_multipliers(set: &[RingElem], d: Option<u32>) -> Result<Multipliers> {
    let Some(first) = set.first() else {
        return Err(Error::InvalidArgument("empty set".into()));
    };
    let ring = first.ring();
    if !ring.is_field() {
        return Err(Error::UnsupportedRing(ring.to_string()));
    }
    if let Some(x) = set.iter().find(|x| x.ring() != ring) {
        return Err(Error::RingMismatch(ring.to_string(), x.ring().to_string()));
    }
    for (j, x) in set.iter().enumerate() {
        if set[..j].contains(x) {
            return Err(Error::InvalidGrid(format!("the set repeats {x}")));
        }
    }
    let degree = match d {
        Some(d) if d as usize >= set.len() => {
            return Err(Error::Hypothesis(format!(
                "|S| = {} does not exceed d = {d}",
                set.len()
            )))
        }
        Some(d) => d,
        None => set.len() as u32 - 1,
    };
    let used = degree as usize + 1;
    let mut weights = Vec::with_capacity(set.len());
    for j in 0..set.len() {
        if j >= used {
            weights.push(ring.zero());
            continue;
        }
        let mut denom = BigInt::one();
        for k in 0..used {
            if k != j {
                denom = ring.mul_raw(&denom, &ring.sub_raw(set[j].value(), set[k].value()));
            }
        }
        weights.push(RingElem::from_canonical(ring, ring.inv_raw(&denom)?));
    }
    let m = Multipliers {
        elements: set.to_vec(),
        weights,
        degree,
    };
    for k in 0..=degree as u64 {
        let expected = if k == degree as u64 {
            ring.one()
        } else {
            ring.zero()
        };
        if m.moment(k) != expected {
            return Err(Error::Hypothesis(format!(
                "multiplier identity fails at power {k}"
            )));
        }
    }
    Ok(m)
}

/// Values of `f` at every grid point, keyed by the point.
pub fn grid_values(f: &Polynomial, grid: &GridSpec) -> Result<HashMap<Vec<RingElem>, RingElem>> {
    check_grid(f, grid)?;
    let ring = grid.ring();
    let mut out = HashMap::new();
    for p in grid.points() {
        let v = f.evaluate_raw(&p);
        let key: Vec<RingElem> = p
            .into_iter()
            .map(|x| RingElem::from_canonical(ring, x))
            .collect();
        out.insert(key, RingElem::from_canonical(ring, v));
    }
    Ok(out)
}

/// `sum_x f(x) prod_i g_{S_i, d_i}(x_i)` over the grid. Equals the
/// coefficient of `x^d` in `f` whenever `d` is a maximal monomial of `f`.
pub fn coefficient_via_grid(
    values: &HashMap<Vec<RingElem>, RingElem>,
    grid: &GridSpec,
    d: &ExponentVector,
) -> Result<RingElem> {
    let ring: RingSpec = grid.ring();
    let n = grid.arity();
    if d.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: d.len(),
        });
    }
    let sizes = grid.sizes();
    if let Some(i) = (0..n).find(|&i| sizes[i] <= d[i] as u64) {
        return Err(Error::Hypothesis(format!(
            "|S_{}| = {} does not exceed d_{} = {}",
            i + 1,
            sizes[i],
            i + 1,
            d[i]
        )));
    }
    let mults: Vec<Multipliers> = (0..n)
        .map(|i| vandermonde_multipliers(&grid.set(i), Some(d[i])))
        .collect::<Result<_>>()?;
    // Only the first d_i + 1 elements of each set carry weight.
    let box_sizes: Vec<usize> = (0..n).map(|i| d[i] as usize + 1).collect();
    let mut idx = vec![0usize; n];
    let mut acc = BigInt::zero();
    loop {
        let point: Vec<RingElem> = (0..n).map(|i| mults[i].elements[idx[i]].clone()).collect();
        let Some(v) = values.get(&point) else {
            return Err(Error::InvalidArgument(format!(
                "no value given for grid point {}",
                fmt_point(&point)
            )));
        };
        if v.ring() != ring {
            return Err(Error::RingMismatch(ring.to_string(), v.ring().to_string()));
        }
        let mut w = v.value().clone();
        for i in 0..n {
            w = ring.mul_raw(&w, mults[i].weights[idx[i]].value());
        }
        acc = ring.add_raw(&acc, &w);
        if !crate::oracle::advance(&mut idx, &box_sizes) {
            break;
        }
    }
    for p in grid.points() {
        let key: Vec<RingElem> = p
            .into_iter()
            .map(|x| RingElem::from_canonical(ring, x))
            .collect();
        if !values.contains_key(&key) {
            return Err(Error::InvalidArgument(format!(
                "no value given for grid point {}",
                fmt_point(&key)
            )));
        }
    }
    Ok(RingElem::from_canonical(ring, acc))
}

fn fmt_point(p: &[RingElem]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    fn ellipse(ring: RingSpec) -> Polynomial {
        Polynomial::from_terms(
            ring,
            2,
            vec![
                (vec![2, 0], 1),
                (vec![1, 1], -1),
                (vec![0, 2], 1),
                (vec![0, 0], -1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn trim_examples() {
        let ring = RingSpec::integers();
        let grid = GridSpec::uniform(ring, &[-1, 0, 1], 1).unwrap();
        let f = Polynomial::from_terms(ring, 1, [(vec![3], 1)]).unwrap();
        assert_eq!(trim(&f, &grid).unwrap().to_string(), "x1");

        let grid2 = GridSpec::uniform(ring, &[-1, 0, 1], 2).unwrap();
        let e = ellipse(ring);
        let t = trim(&e, &grid2).unwrap();
        assert_eq!(t, e);
        assert_eq!(t.coefficient(&ev(&[1, 1])), ring.elem(-1));

        let f = Polynomial::from_terms(ring, 2, [(vec![5, 4], 3), (vec![1, 0], 1)]).unwrap();
        let t = trim(&f, &grid2).unwrap();
        let d = t.degrees().unwrap();
        assert!(d.partial.iter().all(|&k| k < 3));
        for p in grid2.points() {
            assert_eq!(f.evaluate_raw(&p), t.evaluate_raw(&p));
        }
    }

    #[test]
    fn trim_rejects_bad_grids() {
        let ring = RingSpec::integers_mod(6).unwrap();
        let grid = GridSpec::from_ints(ring, &[vec![0, 2]]).unwrap();
        let f = Polynomial::var(ring, 1, 0).unwrap();
        assert!(matches!(trim(&f, &grid), Err(Error::GridCondition(_))));
    }

    #[test]
    fn multiplier_examples() {
        let f5 = RingSpec::prime_field(5).unwrap();
        let m = vandermonde_multipliers(&[f5.elem(0), f5.elem(1)], None).unwrap();
        assert_eq!(m.weights, vec![f5.elem(4), f5.elem(1)]);
        assert_eq!(m.moment(0), f5.zero());
        assert_eq!(m.moment(1), f5.one());

        let m = vandermonde_multipliers(&[f5.elem(3)], None).unwrap();
        assert_eq!(m.weights, vec![f5.one()]);

        let f7 = RingSpec::prime_field(7).unwrap();
        let m = vandermonde_multipliers(&[f7.elem(1), f7.elem(2), f7.elem(3)], None).unwrap();
        assert_eq!(m.moment(0), f7.zero());
        assert_eq!(m.moment(1), f7.zero());
        assert_eq!(m.moment(2), f7.one());

        let m = vandermonde_multipliers(&[f7.elem(1), f7.elem(2), f7.elem(3)], Some(1)).unwrap();
        assert_eq!(m.weights[2], f7.zero());
        assert_eq!(m.moment(0), f7.zero());
        assert_eq!(m.moment(1), f7.one());
    }

    #[test]
    fn multiplier_errors() {
        let f5 = RingSpec::prime_field(5).unwrap();
        assert!(matches!(
            vandermonde_multipliers(&[f5.elem(1), f5.elem(6)], None),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            vandermonde_multipliers(&[f5.elem(1), f5.elem(2)], Some(2)),
            Err(Error::Hypothesis(_))
        ));
        let z = RingSpec::integers();
        assert!(matches!(
            vandermonde_multipliers(&[z.elem(1), z.elem(2)], None),
            Err(Error::UnsupportedRing(_))
        ));
    }

    #[test]
    fn coefficient_examples() {
        let f5 = RingSpec::prime_field(5).unwrap();
        let grid = GridSpec::uniform(f5, &[0, 1], 2).unwrap();
        let f = Polynomial::from_terms(f5, 2, [(vec![1, 1], 1)]).unwrap();
        let vals = grid_values(&f, &grid).unwrap();
        assert_eq!(
            coefficient_via_grid(&vals, &grid, &ev(&[1, 1])).unwrap(),
            f5.one()
        );

        let g = Polynomial::from_terms(f5, 2, [(vec![1, 0], 2), (vec![0, 0], 3)]).unwrap();
        let vals = grid_values(&g, &grid).unwrap();
        assert_eq!(
            coefficient_via_grid(&vals, &grid, &ev(&[1, 1])).unwrap(),
            f5.zero()
        );

        let f7 = RingSpec::prime_field(7).unwrap();
        let grid = GridSpec::uniform(f7, &[-1, 0, 1], 2).unwrap();
        let e = ellipse(f7);
        let vals = grid_values(&e, &grid).unwrap();
        assert_eq!(
            coefficient_via_grid(&vals, &grid, &ev(&[1, 1])).unwrap(),
            f7.elem(-1)
        );
    }

    #[test]
    fn coefficient_errors() {
        let f5 = RingSpec::prime_field(5).unwrap();
        let grid = GridSpec::uniform(f5, &[0, 1], 2).unwrap();
        let f = Polynomial::from_terms(f5, 2, [(vec![1, 1], 1)]).unwrap();
        let mut vals = grid_values(&f, &grid).unwrap();
        assert!(matches!(
            coefficient_via_grid(&vals, &grid, &ev(&[2, 1])),
            Err(Error::Hypothesis(_))
        ));
        vals.remove(&vec![f5.elem(1), f5.elem(0)]);
        assert!(matches!(
            coefficient_via_grid(&vals, &grid, &ev(&[1, 1])),
            Err(Error::InvalidArgument(_))
        ));
    }
}
