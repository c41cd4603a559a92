use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Variable side in a universal structure polynomial: X is the first
/// operand, Y the second.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    X,
    Y,
}

/// A monomial: sorted list of ((side, divisor), exponent), exponents >= 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<((Side, u64), u32)>);

impl Monomial {
    fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<(Side, u64), u32> = self.0.iter().cloned().collect();
        for &(v, e) in &other.0 {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }
}

/// Sparse multivariate polynomial with integer coefficients in the
/// variables x_d, y_d attached to truncation-set members d.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn var(side: Side, d: u64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![((side, d), 1)]), BigInt::one());
        SparsePoly { terms }
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = SparsePoly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::default(), c);
        }
        p
    }

    /// Assemble from explicit terms; exponent lists are sorted and merged,
    /// zero coefficients dropped.
    pub fn from_terms(raw: Vec<(Vec<((Side, u64), u32)>, BigInt)>) -> Self {
        let mut out = SparsePoly::zero();
        for (mut mono, c) in raw {
            mono.sort_unstable();
            out.insert(Monomial(mono), c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> SparsePoly {
        if k.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> SparsePoly {
        let mut base = self.clone();
        let mut acc = SparsePoly::constant(BigInt::one());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divide every coefficient exactly by `m`; inexactness means the ghost
    /// solving produced a non-integral Witt polynomial, i.e. a bug.
    pub fn div_exact(&self, m: u64) -> Result<SparsePoly> {
        let m = BigInt::from(m);
        let mut terms = BTreeMap::new();
        for (mono, c) in &self.terms {
            let (q, r) = c.div_rem(&m);
            if !r.is_zero() {
                return Err(Error::integrity(format!(
                    "inexact division by {m} while solving ghost equations (coefficient {c})"
                )));
            }
            terms.insert(mono.clone(), q);
        }
        Ok(SparsePoly { terms })
    }

    pub fn eval<F>(&self, assign: &F) -> BigInt
    where
        F: Fn(Side, u64) -> BigInt,
    {
        let mut total = BigInt::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for &((side, d), e) in &mono.0 {
                t *= assign(side, d).pow(e);
            }
            total += t;
        }
        total
    }
}

/// ghost_m for one side: sum over d | m (all lie in any divisor-closed set
/// containing m) of d * x_d^{m/d}.
pub fn ghost_poly(side: Side, m: u64) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for d in 1..=m {
        if m % d == 0 {
            let term = SparsePoly::var(side, d)
                .pow((m / d) as u32)
                .scale(&BigInt::from(d));
            out = out.add(&term);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghost_poly_shape() {
        // ghost_2 = x_1^2 + 2 x_2
        let g = ghost_poly(Side::X, 2);
        assert_eq!(g.num_terms(), 2);
        let val = g.eval(&|_, d| BigInt::from(if d == 1 { 3 } else { 5 }));
        assert_eq!(val, BigInt::from(9 + 10));
    }

    #[test]
    fn pow_and_div_exact() {
        let p = SparsePoly::var(Side::X, 1).add(&SparsePoly::var(Side::Y, 1));
        let sq = p.pow(2);
        assert_eq!(sq.num_terms(), 3);
        assert!(sq.div_exact(2).is_err()); // x^2 coefficient 1 not divisible
        let doubled = sq.scale(&BigInt::from(2));
        assert_eq!(doubled.div_exact(2).unwrap(), sq);
    }
}
