use std::collections::HashSet;
use std::hash::Hash;

use crate::algebra::structure::AbelianGroupStructure;
use crate::error::{Error, Result};

pub const DEFAULT_CLOSURE_CAP: usize = 1 << 22;

/// The subgroup of a finite abelian group generated by `generators`,
/// computed by breadth-first closure under addition.
///
/// Elements are opaque; the caller supplies the group operations. Seeding
/// with the negatives as well keeps the frontier short, although in a
/// finite group closing under addition alone already reaches inverses.
pub struct SubgroupClosure<E> {
    elements: Vec<E>,
}

impl<E: Ord> SubgroupClosure<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn contains(&self, e: &E) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

pub fn subgroup_closure<E, A, N>(
    ambient_order: u128,
    zero: E,
    generators: &[E],
    add: A,
    neg: N,
    cap: usize,
) -> Result<SubgroupClosure<E>>
where
    E: Clone + Eq + Hash + Ord,
    A: Fn(&E, &E) -> E,
    N: Fn(&E) -> E,
{
    let mut gens: Vec<E> = Vec::new();
    for g in generators {
        let ng = neg(g);
        if !gens.contains(g) {
            gens.push(g.clone());
        }
        if !gens.contains(&ng) {
            gens.push(ng);
        }
    }
    let mut seen: HashSet<E> = HashSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = add(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::resource(format!(
                        "subgroup closure exceeded cap {cap}"
                    )));
                }
                frontier.push(y);
            }
        }
    }
    let order = seen.len() as u128;
    if order > ambient_order || ambient_order % order != 0 {
        return Err(Error::integrity(format!(
            "closure order {order} does not divide ambient order {ambient_order}"
        )));
    }
    let mut elements: Vec<E> = seen.into_iter().collect();
    elements.sort();
    Ok(SubgroupClosure { elements })
}

/// Structure of a finite abelian group given as its full element list.
///
/// Counts solutions of p^k * x = 0 for each prime p dividing the order;
/// the jumps of log_p of those counts are the conjugate partition of the
/// p-part's cyclic decomposition.
pub fn abelian_structure_from_elements<E, A>(
    elements: &[E],
    zero: &E,
    add: A,
) -> Result<AbelianGroupStructure>
where
    E: Clone + Eq,
    A: Fn(&E, &E) -> E,
{
    let n = elements.len() as u128;
    if n == 0 {
        return Err(Error::invalid("empty element list"));
    }
    let mut parts_per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    let mut rem = n;
    let mut p = 2u64;
    while rem > 1 {
        if (p as u128) * (p as u128) > rem && rem > 1 {
            // rem itself is prime
            p = rem as u64;
        }
        if rem % p as u128 == 0 {
            let mut ppow = 1u128;
            while rem % p as u128 == 0 {
                rem /= p as u128;
                ppow *= p as u128;
            }
            let lambda = p_part_partition(elements, zero, &add, p, ppow)?;
            parts_per_prime.push((p, lambda));
        }
        p += 1;
    }
    // combine primes into invariant factors, aligning largest with largest
    let max_len = parts_per_prime
        .iter()
        .map(|(_, l)| l.len())
        .max()
        .unwrap_or(0);
    let mut orders: Vec<num_bigint::BigUint> = Vec::new();
    for idx in 0..max_len {
        let mut d = num_bigint::BigUint::from(1u32);
        for (p, lambda) in &parts_per_prime {
            if idx < lambda.len() {
                d *= num_bigint::BigUint::from(*p).pow(lambda[idx]);
            }
        }
        orders.push(d);
    }
    Ok(AbelianGroupStructure::from_cyclic_orders(&orders, 0))
}

/// Descending exponent partition of the p-Sylow subgroup.
fn p_part_partition<E, A>(
    elements: &[E],
    zero: &E,
    add: &A,
    p: u64,
    p_part_order: u128,
) -> Result<Vec<u32>>
where
    E: Clone + Eq,
    A: Fn(&E, &E) -> E,
{
    let mut counts: Vec<u128> = vec![1]; // #{x : p^0 x = 0}
    let mut cur: Vec<E> = elements.to_vec();
    while *counts.last().unwrap() < p_part_order {
        if counts.len() > 128 {
            return Err(Error::integrity("p-part iteration did not terminate"));
        }
        cur = cur
            .iter()
            .map(|x| {
                let mut y = x.clone();
                for _ in 1..p {
                    y = add(&y, x);
                }
                y
            })
            .collect();
        let zeros = cur.iter().filter(|x| *x == zero).count() as u128;
        counts.push(zeros);
    }
    // a_k = log_p(N_k / N_{k-1}) = number of parts >= k
    let mut a: Vec<u32> = Vec::new();
    for w in counts.windows(2) {
        let ratio = w[1] / w[0];
        if w[1] % w[0] != 0 {
            return Err(Error::integrity("order counts not nested"));
        }
        let mut r = ratio;
        let mut e = 0u32;
        while r > 1 {
            if r % p as u128 != 0 {
                return Err(Error::integrity("order count jump not a p-power"));
            }
            r /= p as u128;
            e += 1;
        }
        a.push(e);
    }
    // conjugate: lambda_i = #{k : a_k >= i}, descending
    let max_mult = a.first().copied().unwrap_or(0);
    let mut lambda = Vec::new();
    for i in 1..=max_mult {
        lambda.push(a.iter().filter(|&&ak| ak >= i).count() as u32);
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mod_add(n: u64) -> impl Fn(&u64, &u64) -> u64 {
        move |a, b| (a + b) % n
    }

    fn mod_neg(n: u64) -> impl Fn(&u64) -> u64 {
        move |a| (n - a) % n
    }

    #[test]
    fn closure_empty_generators() {
        let c = subgroup_closure(8, 0u64, &[], mod_add(8), mod_neg(8), 1000).unwrap();
        assert_eq!(c.order(), 1);
    }

    #[test]
    fn closure_z4_subgroup() {
        let c = subgroup_closure(4, 0u64, &[2], mod_add(4), mod_neg(4), 1000).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.elements(), &[0, 2]);
    }

    #[test]
    fn closure_idempotent() {
        let c = subgroup_closure(12, 0u64, &[4, 6], mod_add(12), mod_neg(12), 1000).unwrap();
        let again = subgroup_closure(
            12,
            0u64,
            c.elements(),
            mod_add(12),
            mod_neg(12),
            1000,
        )
        .unwrap();
        assert_eq!(c.elements(), again.elements());
    }

    #[test]
    fn closure_cap_enforced() {
        let err = subgroup_closure(1 << 20, 0u64, &[1], mod_add(1 << 20), mod_neg(1 << 20), 100);
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn structure_from_elements_cyclic_and_product() {
        let els: Vec<u64> = (0..12).collect();
        let g = abelian_structure_from_elements(&els, &0, mod_add(12)).unwrap();
        assert_eq!(g.factors_u64(), vec![12]);

        // Z/2 x Z/4 as pairs encoded into u64
        let els: Vec<(u64, u64)> = (0..2).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        let add = |x: &(u64, u64), y: &(u64, u64)| ((x.0 + y.0) % 2, (x.1 + y.1) % 4);
        let g = abelian_structure_from_elements(&els, &(0, 0), add).unwrap();
        assert_eq!(g.factors_u64(), vec![2, 4]);

        // Z/6 = Z/2 x Z/3
        let els: Vec<u64> = (0..6).collect();
        let g = abelian_structure_from_elements(&els, &0, mod_add(6)).unwrap();
        assert_eq!(g.factors_u64(), vec![6]);
    }
}
