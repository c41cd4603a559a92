//! Brute-force homology oracle for the weight-graded pieces B_m of the
//! relative cyclic bar construction of <t> modulo <t^a, t^b>, checked
//! degreewise against the two-cell prediction coming from the total
//! cofiber description.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_bigint::BigInt;

use crate::algebra::{homology_at, AbelianGroupStructure, IntegerMatrix};
use crate::error::{Error, Result};
use crate::semigroup::CuspPair;

pub const DEFAULT_WEIGHT_CAP: u64 = 14;

/// Normalized relative chains of B_m. Degree-n basis elements are tuples
/// (i_0, ..., i_n) with i_0 >= 0, the rest >= 1, total weight m, excluding
/// tuples all of whose entries lie in the exponent semigroup (those span
/// the collapsed subcomplex). Bases are sorted lexicographically so the
/// boundary matrices are reproducible.
pub struct ChainComplex {
    m: u64,
    /// basis[n] lists the degree-n tuples
    basis: Vec<Vec<Vec<u64>>>,
    /// boundary[n]: degree n -> n-1; rows = dim(n-1), cols = dim(n)
    boundary: Vec<IntegerMatrix>,
}

impl ChainComplex {
    pub fn weight(&self) -> u64 {
        self.m
    }

    pub fn top_degree(&self) -> usize {
        self.basis.len().saturating_sub(1)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.basis.get(n).map_or(0, |b| b.len())
    }

    pub fn basis(&self, n: usize) -> &[Vec<u64>] {
        self.basis.get(n).map_or(&[], |b| b.as_slice())
    }

    /// Boundary matrix from degree n to degree n-1.
    pub fn boundary(&self, n: usize) -> IntegerMatrix {
        if n == 0 || n > self.top_degree() {
            IntegerMatrix::zeros(if n == 0 { 0 } else { self.dim(n - 1) }, self.dim(n))
        } else {
            self.boundary[n].clone()
        }
    }

    pub fn total_basis_size(&self) -> usize {
        self.basis.iter().map(|b| b.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(n, b)| if n % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) })
            .sum()
    }
}

fn all_in_semigroup(pair: &CuspPair, tuple: &[u64]) -> bool {
    tuple.iter().all(|&x| pair.semigroup_member(x))
}

/// Compositions (i_0, ..., i_n) of m with i_0 >= 0 and i_j >= 1 for j >= 1,
/// grouped by degree n, excluding the collapsed tuples.
fn enumerate_basis(pair: &CuspPair, m: u64) -> Vec<Vec<Vec<u64>>> {
    let mut by_degree: Vec<Vec<Vec<u64>>> = vec![Vec::new(); m as usize + 1];
    let mut stack: Vec<u64> = Vec::new();
    fn rec(
        pair: &CuspPair,
        rest: u64,
        stack: &mut Vec<u64>,
        out: &mut [Vec<Vec<u64>>],
    ) {
        if rest == 0 {
            if !all_in_semigroup(pair, stack) {
                out[stack.len() - 1].push(stack.clone());
            }
        }
        for next in 1..=rest {
            stack.push(next);
            rec(pair, rest - next, stack, out);
            stack.pop();
        }
    }
    for head in 0..=m {
        stack.push(head);
        rec(pair, m - head, &mut stack, &mut by_degree);
        stack.pop();
    }
    while by_degree.last().is_some_and(|b| b.is_empty()) {
        by_degree.pop();
    }
    for b in &mut by_degree {
        b.sort();
    }
    by_degree
}

/// The alternating-sum boundary: d_j merges entries j and j+1, the last
/// face merges i_n into i_0 cyclically. Faces that land in the collapsed
/// subcomplex, or that are degenerate (a zero in a position >= 1), drop.
fn face(tuple: &[u64], j: usize) -> Vec<u64> {
    let n = tuple.len() - 1;
    if j < n {
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&tuple[..j]);
        out.push(tuple[j] + tuple[j + 1]);
        out.extend_from_slice(&tuple[j + 2..]);
        out
    } else {
        let mut out = Vec::with_capacity(n);
        out.push(tuple[n] + tuple[0]);
        out.extend_from_slice(&tuple[1..n]);
        out
    }
}

fn is_degenerate(tuple: &[u64]) -> bool {
    tuple[1..].iter().any(|&x| x == 0)
}

/// Build the normalized relative chain complex of B_m. The total basis
/// size is at most 2^m; d compose-to-zero is asserted.
pub fn relative_complex(pair: &CuspPair, m: u64, weight_cap: u64) -> Result<ChainComplex> {
    if m < 1 {
        return Err(Error::invalid("weight m must be >= 1"));
    }
    if m > weight_cap {
        return Err(Error::resource(format!(
            "weight {m} exceeds the cap {weight_cap} (basis grows like 2^m)"
        )));
    }
    let basis = enumerate_basis(pair, m);
    let top = basis.len().saturating_sub(1);
    let mut index: Vec<HashMap<&[u64], usize>> = Vec::with_capacity(basis.len());
    for b in &basis {
        let mut map = HashMap::with_capacity(b.len());
        for (i, t) in b.iter().enumerate() {
            map.insert(t.as_slice(), i);
        }
        index.push(map);
    }
    let mut boundary: Vec<IntegerMatrix> = Vec::with_capacity(basis.len());
    boundary.push(IntegerMatrix::zeros(0, basis.first().map_or(0, |b| b.len())));
    for n in 1..=top {
        let rows = basis[n - 1].len();
        let cols = basis[n].len();
        let mut d = IntegerMatrix::zeros(rows, cols);
        for (col, tuple) in basis[n].iter().enumerate() {
            for j in 0..=n {
                let f = face(tuple, j);
                if is_degenerate(&f) || all_in_semigroup(pair, &f) {
                    continue;
                }
                let row = *index[n - 1]
                    .get(f.as_slice())
                    .expect("face stays in the relative basis");
                let sign = if j % 2 == 0 { 1 } else { -1 };
                d.add_assign_entry(row, col, &BigInt::from(sign));
            }
        }
        boundary.push(d);
    }
    let complex = ChainComplex { m, basis, boundary };
    for n in 2..=top {
        if !complex.boundary[n - 1].mul(&complex.boundary[n]).is_zero() {
            return Err(Error::integrity(format!(
                "boundary does not square to zero at degree {n} (weight {m})"
            )));
        }
    }
    Ok(complex)
}

/// Reduced integral homology of B_m by Smith normal forms, nontrivial
/// degrees only.
pub fn homology(
    pair: &CuspPair,
    m: u64,
    weight_cap: u64,
) -> Result<BTreeMap<usize, AbelianGroupStructure>> {
    let complex = relative_complex(pair, m, weight_cap)?;
    homology_of_complex(&complex)
}

pub fn homology_of_complex(
    complex: &ChainComplex,
) -> Result<BTreeMap<usize, AbelianGroupStructure>> {
    let mut out = BTreeMap::new();
    for n in 0..=complex.top_degree() {
        let d_out = complex.boundary(n);
        let d_in = complex.boundary(n + 1);
        let h = homology_at(&d_in, &d_out)?;
        if !h.is_trivial() {
            out.insert(n, h);
        }
    }
    Ok(out)
}

/// The two-cell prediction: with l = ell(a,b,m),
///   neither a nor b divides m  ->  Z in degrees 2l and 2l+1,
///   exactly a | m              ->  Z/a in degree 2l+1,
///   exactly b | m              ->  Z/b in degree 2l+1,
///   ab | m                     ->  zero.
pub fn predicted_homology(pair: &CuspPair, m: u64) -> BTreeMap<usize, AbelianGroupStructure> {
    let l = pair.ell(m) as usize;
    let div_a = m % pair.a() == 0;
    let div_b = m % pair.b() == 0;
    let mut out = BTreeMap::new();
    match (div_a, div_b) {
        (true, true) => {}
        (false, false) => {
            out.insert(2 * l, AbelianGroupStructure::free(1));
            out.insert(2 * l + 1, AbelianGroupStructure::free(1));
        }
        (true, false) => {
            out.insert(2 * l + 1, AbelianGroupStructure::cyclic(pair.a()));
        }
        (false, true) => {
            out.insert(2 * l + 1, AbelianGroupStructure::cyclic(pair.b()));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct HomologyReport {
    pub m: u64,
    pub groups: BTreeMap<usize, AbelianGroupStructure>,
    pub predicted: BTreeMap<usize, AbelianGroupStructure>,
    pub agree: bool,
}

/// Compare computed and predicted homology for every weight up to m_max.
pub fn verify_bar(pair: &CuspPair, m_max: u64, weight_cap: u64) -> Result<Vec<HomologyReport>> {
    use rayon::prelude::*;
    let reports: Result<Vec<HomologyReport>> = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let groups = homology(pair, m, weight_cap)?;
            let predicted = predicted_homology(pair, m);
            let agree = groups == predicted;
            Ok(HomologyReport {
                m,
                groups,
                predicted,
                agree,
            })
        })
        .collect();
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::group_from_parts;

    fn pair23() -> CuspPair {
        CuspPair::new(2, 3, 2, 1).unwrap()
    }

    #[test]
    fn weight_one_is_a_circle() {
        let c = relative_complex(&pair23(), 1, DEFAULT_WEIGHT_CAP).unwrap();
        assert_eq!(c.dim(0), 1);
        assert_eq!(c.basis(0), &[vec![1]]);
        assert_eq!(c.dim(1), 1);
        assert_eq!(c.basis(1), &[vec![0, 1]]);
        assert!(c.boundary(1).is_zero());
        let h = homology(&pair23(), 1, DEFAULT_WEIGHT_CAP).unwrap();
        assert_eq!(h[&0], AbelianGroupStructure::free(1));
        assert_eq!(h[&1], AbelianGroupStructure::free(1));
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn weight_two_gives_z2() {
        let h = homology(&pair23(), 2, DEFAULT_WEIGHT_CAP).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[&1], group_from_parts(0, &[2]));
    }

    #[test]
    fn weight_six_is_acyclic() {
        // ab | m: everything cancels
        let h = homology(&pair23(), 6, DEFAULT_WEIGHT_CAP).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn basis_bounded_by_2_to_m() {
        for m in 1..=8 {
            let c = relative_complex(&pair23(), m, DEFAULT_WEIGHT_CAP).unwrap();
            assert!(c.total_basis_size() <= 1 << m);
        }
    }

    #[test]
    fn predicted_examples() {
        let p = pair23();
        let h5 = predicted_homology(&p, 5);
        assert_eq!(h5[&2], AbelianGroupStructure::free(1));
        assert_eq!(h5[&3], AbelianGroupStructure::free(1));
        let h4 = predicted_homology(&p, 4);
        assert_eq!(h4.len(), 1);
        assert_eq!(h4[&1], group_from_parts(0, &[2]));
        assert!(predicted_homology(&p, 6).is_empty());
    }

    #[test]
    fn verify_bar_small_weights() {
        for (a, b) in [(2u64, 3u64), (3, 4)] {
            let pair = CuspPair::new(a, b, 2, 1).unwrap();
            let reports = verify_bar(&pair, 8, DEFAULT_WEIGHT_CAP).unwrap();
            assert_eq!(reports.len(), 8);
            for r in &reports {
                assert!(r.agree, "({a},{b}) weight {}: {:?} vs {:?}", r.m, r.groups, r.predicted);
            }
        }
    }

    #[test]
    fn homology_vanishes_outside_predicted_range() {
        let p = pair23();
        for m in 1..=9 {
            let h = homology(&p, m, DEFAULT_WEIGHT_CAP).unwrap();
            let l = p.ell(m) as usize;
            for degree in h.keys() {
                assert!(*degree <= 2 * l + 1, "weight {m} degree {degree}");
            }
        }
    }

    #[test]
    fn euler_characteristic_matches_ranks() {
        let p = pair23();
        for m in 1..=9 {
            let c = relative_complex(&p, m, DEFAULT_WEIGHT_CAP).unwrap();
            let h = homology_of_complex(&c).unwrap();
            let h_euler: i64 = h
                .iter()
                .map(|(n, g)| {
                    let r = g.free_rank() as i64;
                    if n % 2 == 0 {
                        r
                    } else {
                        -r
                    }
                })
                .sum();
            assert_eq!(c.euler_characteristic(), h_euler, "weight {m}");
        }
    }

    #[test]
    fn weight_cap_enforced() {
        assert!(relative_complex(&pair23(), 15, 14).is_err());
        assert!(relative_complex(&pair23(), 0, 14).is_err());
    }
}
