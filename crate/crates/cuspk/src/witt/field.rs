use crate::error::{Error, Result};

/// Index of a field element: the base-p digits of the index are the
/// coefficients of the element on 1, z, z^2, ... where z is the class of
/// the variable modulo the defining polynomial.
pub type FieldElem = u16;

pub const MAX_EXTENSION_DEGREE: u32 = 4;

/// Default irreducible moduli, little-endian coefficients including the
/// leading 1, for the shipped (p, e) range. Fixed so encodings are
/// reproducible across runs; construction re-verifies irreducibility.
fn default_modulus(p: u64, e: u32) -> Option<Vec<u64>> {
    let m: &[u64] = match (p, e) {
        (2, 1) => &[1, 1],
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (3, 1) => &[1, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (3, 4) => &[2, 0, 0, 2, 1],
        (5, 1) => &[3, 1],
        (5, 2) => &[2, 4, 1],
        (5, 3) => &[3, 3, 0, 1],
        (5, 4) => &[2, 4, 4, 0, 1],
        (7, 1) => &[4, 1],
        (7, 2) => &[3, 6, 1],
        (7, 3) => &[4, 0, 6, 1],
        (7, 4) => &[3, 4, 5, 0, 1],
        _ => return None,
    };
    Some(m.to_vec())
}

/// F_q with q = p^e, realized as Z/p[z]/(modulus). All arithmetic is via
/// precomputed tables on element indices, so field operations are lookups.
pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    modulus: Vec<u64>,
    add: Vec<FieldElem>,
    mul: Vec<FieldElem>,
    neg: Vec<FieldElem>,
    pow: Vec<FieldElem>, // exp in 0..q
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{} (q={})", self.p, self.e, self.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients in Z/p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let deg_m = m.len() - 1;
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        for (i, &mc) in m.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + p * p - (lead * mc) % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

impl FiniteField {
    /// The shipped default modulus for (p, e).
    pub fn new(p: u64, e: u32) -> Result<Self> {
        let modulus = default_modulus(p, e).ok_or_else(|| {
            Error::invalid(format!(
                "no default modulus shipped for p={p}, e={e} (p in {{2,3,5,7}}, e <= {MAX_EXTENSION_DEGREE})"
            ))
        })?;
        Self::with_modulus(p, e, modulus)
    }

    pub fn with_modulus(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("p={p} is not prime")));
        }
        if e < 1 || e > MAX_EXTENSION_DEGREE {
            return Err(Error::invalid(format!(
                "extension degree e={e} outside 1..={MAX_EXTENSION_DEGREE}"
            )));
        }
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
            return Err(Error::invalid("modulus must be monic of degree e"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::invalid("modulus coefficients must be reduced mod p"));
        }
        check_irreducible(&modulus, p)?;
        let q = p.pow(e);
        if q > u64::from(FieldElem::MAX) {
            return Err(Error::invalid(format!("field order {q} too large")));
        }
        let mut field = FiniteField {
            p,
            e,
            q,
            modulus,
            add: Vec::new(),
            mul: Vec::new(),
            neg: Vec::new(),
            pow: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    fn idx_to_coeffs(&self, idx: FieldElem) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut n = u64::from(idx);
        for _ in 0..self.e {
            v.push(n % self.p);
            n /= self.p;
        }
        v
    }

    fn coeffs_to_idx(&self, coeffs: &[u64]) -> FieldElem {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        idx as FieldElem
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        self.add = vec![0; q * q];
        self.mul = vec![0; q * q];
        self.neg = vec![0; q];
        self.pow = vec![0; q * q];
        let coeffs: Vec<Vec<u64>> = (0..q).map(|i| self.idx_to_coeffs(i as FieldElem)).collect();
        for x in 0..q {
            let nc: Vec<u64> = coeffs[x].iter().map(|&c| (self.p - c) % self.p).collect();
            self.neg[x] = self.coeffs_to_idx(&nc);
            for y in 0..q {
                let sum: Vec<u64> = coeffs[x]
                    .iter()
                    .zip(&coeffs[y])
                    .map(|(&a, &b)| (a + b) % self.p)
                    .collect();
                self.add[x * q + y] = self.coeffs_to_idx(&sum);
                let prod = poly_rem(
                    &poly_mul_mod_p(&coeffs[x], &coeffs[y], self.p),
                    &self.modulus,
                    self.p,
                );
                let mut padded = prod;
                padded.resize(self.e as usize, 0);
                self.mul[x * q + y] = self.coeffs_to_idx(&padded);
            }
        }
        for x in 0..q {
            self.pow[x * q] = 1; // x^0
            for k in 1..q {
                self.pow[x * q + k] = self.mul_elem(self.pow[x * q + k - 1], x as FieldElem);
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        0
    }

    pub fn one(&self) -> FieldElem {
        1
    }

    /// The class of the variable z (for e = 1 this is 1, and powers of it
    /// still run through a Z/p-basis, namely {1}).
    pub fn generator(&self) -> FieldElem {
        if self.e == 1 {
            1
        } else {
            self.p as FieldElem
        }
    }

    /// z^i for i < e: a Z/p-basis of the field.
    pub fn basis(&self) -> Vec<FieldElem> {
        (0..self.e).map(|i| self.pow_elem(self.generator(), i as u64)).collect()
    }

    pub fn add_elem(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add[x as usize * self.q as usize + y as usize]
    }

    pub fn mul_elem(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.mul[x as usize * self.q as usize + y as usize]
    }

    pub fn neg_elem(&self, x: FieldElem) -> FieldElem {
        self.neg[x as usize]
    }

    pub fn sub_elem(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add_elem(x, self.neg_elem(y))
    }

    /// x^k with the exponent already reduced below q by the caller, or any
    /// k < q in general.
    pub fn pow_elem(&self, x: FieldElem, k: u64) -> FieldElem {
        debug_assert!(k < self.q);
        self.pow[x as usize * self.q as usize + k as usize]
    }

    /// Reduce an arbitrary positive exponent using x^q = x.
    pub fn reduce_exponent(&self, k: u64) -> u64 {
        if k == 0 || k < self.q {
            return k;
        }
        if self.q == 2 {
            return 1;
        }
        1 + (k - 1) % (self.q - 1)
    }

    /// An integer scalar as a field element (c mod p, embedded in F_p).
    pub fn scalar(&self, c: i64) -> FieldElem {
        let m = c.rem_euclid(self.p as i64) as u64;
        m as FieldElem
    }

    pub fn scalar_bigint(&self, c: &num_bigint::BigInt) -> FieldElem {
        use num_traits::ToPrimitive;
        let m = num_integer::Integer::mod_floor(c, &num_bigint::BigInt::from(self.p));
        m.to_u64().expect("reduced scalar fits") as FieldElem
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        0..self.q as FieldElem
    }
}

/// Exhaustive irreducibility check: no monic factor of degree 1..=deg/2.
/// Feasible because e <= 4 and p <= 7.
fn check_irreducible(modulus: &[u64], p: u64) -> Result<()> {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        // all monic polynomials of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut n = idx;
            for _ in 0..d {
                f.push(n % p);
                n /= p;
            }
            f.push(1);
            if poly_rem(modulus, &f, p).is_empty() {
                return Err(Error::invalid(format!(
                    "modulus {modulus:?} is reducible mod {p} (factor {f:?})"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_moduli_build() {
        for p in [2u64, 3, 5, 7] {
            for e in 1..=4u32 {
                let f = FiniteField::new(p, e).unwrap();
                assert_eq!(f.q(), p.pow(e));
            }
        }
    }

    #[test]
    fn rejects_reducible() {
        // z^2 + 1 = (z+1)^2 mod 2
        assert!(FiniteField::with_modulus(2, 2, vec![1, 0, 1]).is_err());
        // z^2 - 1 factors mod 5
        assert!(FiniteField::with_modulus(5, 2, vec![4, 0, 1]).is_err());
    }

    #[test]
    fn field_axioms_f4() {
        let f = FiniteField::new(2, 2).unwrap();
        let g = f.generator();
        // z^2 = z + 1 for modulus z^2+z+1
        assert_eq!(f.mul_elem(g, g), f.add_elem(g, 1));
        // every nonzero element has multiplicative order dividing 3
        for x in 1..f.q() as FieldElem {
            assert_eq!(f.pow_elem(x, 3), 1);
        }
        for x in f.elements() {
            assert_eq!(f.add_elem(x, f.neg_elem(x)), 0);
            assert_eq!(f.mul_elem(x, 1), x);
        }
    }

    #[test]
    fn exponent_reduction() {
        let f = FiniteField::new(3, 2).unwrap();
        for x in f.elements() {
            for k in 1..30u64 {
                let reduced = f.reduce_exponent(k);
                assert!(reduced < f.q());
                let mut expect = f.one();
                for _ in 0..k {
                    expect = f.mul_elem(expect, x);
                }
                assert_eq!(f.pow_elem(x, reduced), expect, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn basis_is_independent() {
        let f = FiniteField::new(5, 2).unwrap();
        let basis = f.basis();
        assert_eq!(basis.len(), 2);
        // all F_p-combinations distinct
        let mut seen = std::collections::HashSet::new();
        for c0 in 0..5u16 {
            for c1 in 0..5u16 {
                let mut v = f.zero();
                for _ in 0..c0 {
                    v = f.add_elem(v, basis[0]);
                }
                for _ in 0..c1 {
                    v = f.add_elem(v, basis[1]);
                }
                seen.insert(v);
            }
        }
        assert_eq!(seen.len(), 25);
    }
}
