use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::algebra::matrix::IntegerMatrix;
use crate::algebra::snf::{smith_diagonal, snf_kernel_rows};
use crate::error::{Error, Result};

/// A finitely generated abelian group in canonical form: free rank plus
/// invariant factors d_1 | d_2 | ... | d_k, each >= 2.
///
/// Two groups are isomorphic iff these fields are equal, so `==` decides
/// isomorphism.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupStructure {
    invariant_factors: Vec<BigUint>,
    free_rank: usize,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        AbelianGroupStructure {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroupStructure {
            invariant_factors: Vec::new(),
            free_rank: rank,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            Self::trivial()
        } else {
            AbelianGroupStructure {
                invariant_factors: vec![BigUint::from(n)],
                free_rank: 0,
            }
        }
    }

    /// Canonicalize an arbitrary list of cyclic orders into invariant
    /// factors: coprime parts merge (Z/2 x Z/3 = Z/6) and units drop.
    pub fn from_cyclic_orders(orders: &[BigUint], free_rank: usize) -> Self {
        let mut f: Vec<BigUint> = orders
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        let n = f.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (f[i].clone(), f[j].clone());
                let g = a.gcd(&b);
                let l = &a / &g * &b;
                f[i] = g;
                f[j] = l;
            }
        }
        f.retain(|d| !d.is_one());
        debug_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        AbelianGroupStructure {
            invariant_factors: f,
            free_rank,
        }
    }

    /// The p-group (Z/p^{e_1}) x (Z/p^{e_2}) x ... as invariant factors.
    pub fn from_prime_power_exponents(p: u64, exponents: &[u32]) -> Self {
        let mut exps: Vec<u32> = exponents.iter().copied().filter(|&e| e > 0).collect();
        exps.sort_unstable();
        AbelianGroupStructure {
            invariant_factors: exps
                .iter()
                .map(|&e| BigUint::from(p).pow(e))
                .collect(),
            free_rank: 0,
        }
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Order of the torsion-free quotient being trivial; `None` if infinite.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(
            self.invariant_factors
                .iter()
                .fold(BigUint::one(), |acc, d| acc * d),
        )
    }

    /// Total p-length: the sum over invariant factors of their p-adic
    /// valuations. For a finite W(F_q)-module of length L this equals e*L.
    pub fn p_length(&self, p: u64) -> u64 {
        let p = BigUint::from(p);
        let mut total = 0u64;
        for d in &self.invariant_factors {
            let mut d = d.clone();
            while (&d % &p).is_zero() {
                d /= &p;
                total += 1;
            }
        }
        total
    }

    /// Direct sum.
    pub fn sum(&self, other: &AbelianGroupStructure) -> AbelianGroupStructure {
        let mut orders = self.invariant_factors.clone();
        orders.extend(other.invariant_factors.iter().cloned());
        Self::from_cyclic_orders(&orders, self.free_rank + other.free_rank)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "free_rank": self.free_rank.to_string(),
            "invariant_factors": self.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".into());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        let mut i = 0;
        while i < self.invariant_factors.len() {
            let d = &self.invariant_factors[i];
            let mut count = 1;
            while i + count < self.invariant_factors.len()
                && self.invariant_factors[i + count] == *d
            {
                count += 1;
            }
            if count == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{count}"));
            }
            i += count;
        }
        write!(f, "{}", parts.join(" x "))
    }
}

impl fmt::Debug for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Structure of Z^rows / (column span of `m`).
pub fn cokernel_structure(m: &IntegerMatrix) -> AbelianGroupStructure {
    let diag = smith_diagonal(m);
    let rank = diag.len();
    let factors: Vec<BigUint> = diag
        .iter()
        .filter(|d| **d > BigInt::one())
        .map(|d| d.to_biguint().unwrap())
        .collect();
    AbelianGroupStructure {
        invariant_factors: factors,
        free_rank: m.rows() - rank,
    }
}

/// Homology ker(d_out) / im(d_in) at the middle of
/// `C_in --d_in--> C --d_out--> C_out`.
///
/// The image is expressed in an integral basis of the kernel (the bottom
/// rows of V^{-1} from the Smith decomposition of d_out), and the quotient
/// is read off as a cokernel.
pub fn homology_at(
    d_in: &IntegerMatrix,
    d_out: &IntegerMatrix,
) -> Result<AbelianGroupStructure> {
    if d_out.cols() != d_in.rows() {
        return Err(Error::invalid(format!(
            "homology_at: d_out is {}x{} but d_in is {}x{}",
            d_out.rows(),
            d_out.cols(),
            d_in.rows(),
            d_in.cols()
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::integrity("homology_at: d_out * d_in != 0"));
    }
    let dim = d_out.cols();
    let (rank_out, kernel_rows) = snf_kernel_rows(d_out);
    let kernel_rank = dim - rank_out;
    debug_assert_eq!(kernel_rows.len(), kernel_rank);

    // relations: each column of d_in in kernel coordinates
    let mut d_in_rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); d_in.rows()];
    for (r, c, v) in d_in.nonzero_entries() {
        d_in_rows[r].push((c, v.clone()));
    }
    let mut relations = IntegerMatrix::zeros(kernel_rank, d_in.cols());
    for (t, krow) in kernel_rows.iter().enumerate() {
        for (&k, coeff) in krow {
            for (j, val) in &d_in_rows[k] {
                relations.add_assign_entry(t, *j, &(coeff * val));
            }
        }
    }
    Ok(cokernel_structure(&relations))
}

/// Helper for display/tests: parse "Z/4 x Z" style is not needed; instead
/// build directly from small integers.
pub fn group_from_parts(free_rank: usize, torsion: &[u64]) -> AbelianGroupStructure {
    let orders: Vec<BigUint> = torsion.iter().map(|&d| BigUint::from(d)).collect();
    AbelianGroupStructure::from_cyclic_orders(&orders, free_rank)
}

impl AbelianGroupStructure {
    /// Invariant factors as u64, for tests on small groups.
    pub fn factors_u64(&self) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .map(|d| d.to_u64().expect("factor fits u64"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cokernel_examples() {
        // single relation 2 on Z^1
        let m = IntegerMatrix::from_rows(&[vec![2]]);
        assert_eq!(cokernel_structure(&m), group_from_parts(0, &[2]));
        // zero relation: free
        let z = IntegerMatrix::from_rows(&[vec![0]]);
        assert_eq!(cokernel_structure(&z), AbelianGroupStructure::free(1));
        // diag(2,3) merges to Z/6
        let d = IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(cokernel_structure(&d), group_from_parts(0, &[6]));
    }

    #[test]
    fn homology_trivial_cases() {
        // single Z, no boundaries: H = Z
        let d_in = IntegerMatrix::zeros(1, 0);
        let d_out = IntegerMatrix::zeros(0, 1);
        assert_eq!(
            homology_at(&d_in, &d_out).unwrap(),
            AbelianGroupStructure::free(1)
        );
        // circle complex: Z -> Z with zero map in both degrees
        let zero11 = IntegerMatrix::zeros(1, 1);
        let h0 = homology_at(&zero11, &IntegerMatrix::zeros(0, 1)).unwrap();
        let h1 = homology_at(&IntegerMatrix::zeros(1, 0), &zero11).unwrap();
        assert_eq!(h0, AbelianGroupStructure::free(1));
        assert_eq!(h1, AbelianGroupStructure::free(1));
    }

    #[test]
    fn homology_rejects_bad_complex() {
        let d_in = IntegerMatrix::from_rows(&[vec![1]]);
        let d_out = IntegerMatrix::from_rows(&[vec![1]]);
        assert!(homology_at(&d_in, &d_out).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(AbelianGroupStructure::trivial().to_string(), "0");
        assert_eq!(group_from_parts(0, &[2, 2, 8]).to_string(), "(Z/2)^2 x Z/8");
        assert_eq!(group_from_parts(2, &[3]).to_string(), "Z^2 x Z/3");
    }

    #[test]
    fn normalization_merges_coprime() {
        assert_eq!(group_from_parts(0, &[2, 3]), group_from_parts(0, &[6]));
        assert_eq!(
            group_from_parts(0, &[2, 3, 4]).factors_u64(),
            vec![2, 12]
        );
    }

    #[test]
    fn p_length_counts_valuations() {
        let g = group_from_parts(0, &[2, 8, 3]);
        assert_eq!(g.p_length(2), 4);
        assert_eq!(g.p_length(3), 1);
    }
}
