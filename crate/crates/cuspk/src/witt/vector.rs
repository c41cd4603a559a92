use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::witt::field::{FieldElem, FiniteField};
use crate::witt::poly::Side;
use crate::witt::table::{StructureTable, TableStore};
use crate::witt::truncation::TruncationSet;

pub const DEFAULT_ENUM_CAP: u128 = 1 << 22;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// --- compiled polynomials ----------------------------------------------

/// A structure polynomial specialized to one field: coefficients reduced
/// mod p, exponents reduced with x^q = x, equal monomials merged. Only the
/// induced function on F_q-points matters here, and this keeps evaluation
/// to table lookups.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(FieldElem, Vec<(u16, u16)>)>, // coeff, sorted (slot, exp)
}

fn compile(
    poly: &crate::witt::poly::SparsePoly,
    set: &TruncationSet,
    field: &FiniteField,
) -> CompiledPoly {
    let mut merged: HashMap<Vec<(u16, u16)>, FieldElem> = HashMap::new();
    for (mono, c) in poly.terms() {
        let coeff = field.scalar_bigint(c);
        if coeff == 0 {
            continue;
        }
        let mut vars: Vec<(u16, u16)> = mono
            .0
            .iter()
            .map(|&((side, d), e)| {
                let idx = set.index_of(d).expect("divisor in set") as u16;
                let slot = idx * 2 + u16::from(side == Side::Y);
                (slot, field.reduce_exponent(u64::from(e)) as u16)
            })
            .collect();
        vars.sort_unstable();
        let entry = merged.entry(vars).or_insert(0);
        *entry = field.add_elem(*entry, coeff);
    }
    let mut terms: Vec<(FieldElem, Vec<(u16, u16)>)> = merged
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(vars, c)| (c, vars))
        .collect();
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    CompiledPoly { terms }
}

impl CompiledPoly {
    #[inline]
    fn eval(&self, field: &FiniteField, vals: &[FieldElem]) -> FieldElem {
        let mut acc = 0;
        'terms: for (coeff, vars) in &self.terms {
            let mut v = *coeff;
            for &(slot, e) in vars {
                let x = vals[slot as usize];
                if x == 0 {
                    continue 'terms;
                }
                v = field.mul_elem(v, field.pow_elem(x, u64::from(e)));
            }
            acc = field.add_elem(acc, v);
        }
        acc
    }
}

// --- field-coefficient Witt vectors -------------------------------------

/// A big Witt vector over a finite field: one coordinate per member of the
/// truncation set, in ascending member order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WittVector {
    set: Arc<TruncationSet>,
    coords: Vec<FieldElem>,
}

impl WittVector {
    pub fn set(&self) -> &TruncationSet {
        &self.set
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn coord(&self, m: u64) -> Option<FieldElem> {
        self.set.index_of(m).map(|i| self.coords[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// W_S(F_q): the ring of big Witt vectors over one truncation set and one
/// field, with the compiled structure polynomials baked in.
pub struct WittRing {
    set: Arc<TruncationSet>,
    field: Arc<FiniteField>,
    table: Arc<StructureTable>,
    sum_c: Vec<CompiledPoly>,
    prod_c: Vec<CompiledPoly>,
}

impl WittRing {
    pub fn new(set: TruncationSet, field: Arc<FiniteField>, store: &TableStore) -> Result<Self> {
        let table = store.get_or_build(&set)?;
        let sum_c = table
            .sum_polys()
            .iter()
            .map(|p| compile(p, &set, &field))
            .collect();
        let prod_c = table
            .prod_polys()
            .iter()
            .map(|p| compile(p, &set, &field))
            .collect();
        Ok(WittRing {
            set: Arc::new(set),
            field,
            table,
            sum_c,
            prod_c,
        })
    }

    pub fn set(&self) -> &TruncationSet {
        &self.set
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    fn check(&self, w: &WittVector) -> Result<()> {
        if *w.set != *self.set {
            return Err(Error::Mismatch(format!(
                "vector indexed by {:?} used in ring over {:?}",
                w.set.members(),
                self.set.members()
            )));
        }
        Ok(())
    }

    pub fn from_coords(&self, coords: Vec<FieldElem>) -> Result<WittVector> {
        if coords.len() != self.set.len() {
            return Err(Error::Mismatch(format!(
                "expected {} coordinates, got {}",
                self.set.len(),
                coords.len()
            )));
        }
        if coords.iter().any(|&c| u64::from(c) >= self.field.q()) {
            return Err(Error::invalid("coordinate outside the field"));
        }
        Ok(WittVector {
            set: Arc::clone(&self.set),
            coords,
        })
    }

    pub fn zero(&self) -> WittVector {
        WittVector {
            set: Arc::clone(&self.set),
            coords: vec![0; self.set.len()],
        }
    }

    pub fn one(&self) -> WittVector {
        self.teichmuller(self.field.one())
    }

    /// The multiplicative lift [c] = (c, 0, 0, ...).
    pub fn teichmuller(&self, c: FieldElem) -> WittVector {
        let mut w = self.zero();
        if !self.set.is_empty() {
            debug_assert_eq!(self.set.members()[0], 1);
            w.coords[0] = c;
        }
        w
    }

    /// V_m([c]): the vector supported at coordinate m with value c.
    pub fn single_support(&self, m: u64, c: FieldElem) -> Result<WittVector> {
        let idx = self
            .set
            .index_of(m)
            .ok_or_else(|| Error::Mismatch(format!("{m} is not a member of the set")))?;
        let mut w = self.zero();
        w.coords[idx] = c;
        Ok(w)
    }

    fn interleave(&self, a: &WittVector, b: &WittVector) -> Vec<FieldElem> {
        let n = self.set.len();
        let mut vals = vec![0; 2 * n];
        for i in 0..n {
            vals[2 * i] = a.coords[i];
            vals[2 * i + 1] = b.coords[i];
        }
        vals
    }

    pub fn add(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.check(a)?;
        self.check(b)?;
        let vals = self.interleave(a, b);
        let coords = self
            .sum_c
            .iter()
            .map(|p| p.eval(&self.field, &vals))
            .collect();
        Ok(WittVector {
            set: Arc::clone(&self.set),
            coords,
        })
    }

    pub fn mul(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        self.check(a)?;
        self.check(b)?;
        let vals = self.interleave(a, b);
        let coords = self
            .prod_c
            .iter()
            .map(|p| p.eval(&self.field, &vals))
            .collect();
        Ok(WittVector {
            set: Arc::clone(&self.set),
            coords,
        })
    }

    /// Additive inverse, solved coordinate by coordinate from the sum
    /// polynomials: s_m = x_m + y_m + (terms in strictly smaller indices),
    /// so each z_m is determined by requiring s_m(w, z) = 0.
    pub fn neg(&self, a: &WittVector) -> Result<WittVector> {
        self.check(a)?;
        let n = self.set.len();
        let mut vals = vec![0; 2 * n];
        for i in 0..n {
            vals[2 * i] = a.coords[i];
        }
        let mut coords = vec![0; n];
        for i in 0..n {
            let s = self.sum_c[i].eval(&self.field, &vals); // = a_m + P(lower)
            let z = self.field.neg_elem(s);
            coords[i] = z;
            vals[2 * i + 1] = z;
        }
        Ok(WittVector {
            set: Arc::clone(&self.set),
            coords,
        })
    }

    pub fn sub(&self, a: &WittVector, b: &WittVector) -> Result<WittVector> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    pub fn scalar_mul(&self, k: u64, a: &WittVector) -> Result<WittVector> {
        let mut acc = self.zero();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// V_n: W_{S/n} -> W_S, (V_n w)_m = w_{m/n} if n | m, else 0.
    pub fn verschiebung(&self, n: u64, w: &WittVector) -> Result<WittVector> {
        let quotient = self.set.divide(n);
        if *w.set != quotient {
            return Err(Error::Mismatch(format!(
                "verschiebung source must be indexed by S/{n}"
            )));
        }
        let mut out = self.zero();
        for (i, &m) in self.set.members().iter().enumerate() {
            if m % n == 0 {
                out.coords[i] = w.coord(m / n).unwrap_or(0);
            }
        }
        Ok(out)
    }

    /// The unique expansion w = sum_m V_m([gamma_m]); subtracting each
    /// single-support term zeroes its coordinate without touching lower ones.
    pub fn teichmuller_decomposition(&self, w: &WittVector) -> Result<Vec<(u64, FieldElem)>> {
        self.check(w)?;
        let mut r = w.clone();
        let mut out = Vec::with_capacity(self.set.len());
        for (i, &m) in self.set.members().iter().enumerate() {
            let c = r.coords[i];
            out.push((m, c));
            if c != 0 {
                let v = self.single_support(m, c)?;
                r = self.sub(&r, &v)?;
                debug_assert_eq!(r.coords[i], 0);
            }
        }
        if !r.is_zero() {
            return Err(Error::integrity("teichmuller decomposition did not close"));
        }
        Ok(out)
    }

    /// F_n: W_S -> W_{S/n}, characterized on ghost components by
    /// ghost(F_n w)_m = ghost(w)_{nm}. Computed through the expansion in
    /// Teichmuller–Verschiebung terms and F_n V_m = gcd(n,m) V_{m/gcd} F_{n/gcd},
    /// F_k([c]) = [c^k].
    pub fn frobenius(&self, n: u64, w: &WittVector, target: &WittRing) -> Result<WittVector> {
        self.check(w)?;
        if *target.set != self.set.divide(n) {
            return Err(Error::Mismatch(format!(
                "frobenius target must be the ring over S/{n}"
            )));
        }
        if *target.field != *self.field {
            return Err(Error::Mismatch("frobenius target field differs".into()));
        }
        let mut acc = target.zero();
        for (m, c) in self.teichmuller_decomposition(w)? {
            if c == 0 {
                continue;
            }
            let d = gcd(n, m);
            let m1 = m / d;
            if !target.set.contains(m1) {
                continue; // that component of S/n is empty
            }
            let e = target.field.reduce_exponent(n / d);
            let lifted = target.field.pow_elem(c, e);
            let term = target.single_support(m1, lifted)?;
            let term = target.scalar_mul(d, &term)?;
            acc = target.add(&acc, &term)?;
        }
        Ok(acc)
    }

    /// q^{|S|}, or None on overflow.
    pub fn group_order(&self) -> Option<u128> {
        let mut order: u128 = 1;
        for _ in 0..self.set.len() {
            order = order.checked_mul(u128::from(self.field.q()))?;
            if order > u128::MAX / 2 {
                return None;
            }
        }
        Some(order)
    }

    /// All q^{|S|} vectors, each exactly once.
    pub fn enumerate(&self, cap: u128) -> Result<impl Iterator<Item = WittVector> + '_> {
        let order = self
            .group_order()
            .ok_or_else(|| Error::resource("group order overflows"))?;
        if order > cap {
            return Err(Error::resource(format!(
                "group order {order} exceeds enumeration cap {cap}; shrink q or r"
            )));
        }
        Ok((0..order as u64).map(move |code| self.decode(code)))
    }

    /// {V_m([z^i]) : m in S, i < e}: these generate the additive group.
    pub fn additive_generators(&self) -> Vec<WittVector> {
        let mut out = Vec::new();
        for &m in self.set.members() {
            for c in self.field.basis() {
                out.push(self.single_support(m, c).expect("member"));
            }
        }
        out
    }

    /// Mixed-radix encoding; total order must fit in u64.
    pub fn encode(&self, w: &WittVector) -> u64 {
        debug_assert!(self.group_order().map_or(false, |o| o <= u128::from(u64::MAX)));
        let q = self.field.q();
        let mut code = 0u64;
        for &c in w.coords.iter().rev() {
            code = code * q + u64::from(c);
        }
        code
    }

    pub fn decode(&self, mut code: u64) -> WittVector {
        let q = self.field.q();
        let coords = (0..self.set.len())
            .map(|_| {
                let c = (code % q) as FieldElem;
                code /= q;
                c
            })
            .collect();
        WittVector {
            set: Arc::clone(&self.set),
            coords,
        }
    }

    pub fn add_encoded(&self, x: u64, y: u64) -> u64 {
        let w = self
            .add(&self.decode(x), &self.decode(y))
            .expect("same ring");
        self.encode(&w)
    }

    pub fn neg_encoded(&self, x: u64) -> u64 {
        let w = self.neg(&self.decode(x)).expect("same ring");
        self.encode(&w)
    }
}

// --- integer-coefficient Witt vectors (oracle mode) ---------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WittIntVector {
    set: Arc<TruncationSet>,
    coords: Vec<BigInt>,
}

impl WittIntVector {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn coord(&self, m: u64) -> Option<&BigInt> {
        self.set.index_of(m).map(|i| &self.coords[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// W_S(Z): exact integer coordinates, where the ghost map is injective and
/// serves as the independent oracle for the ring structure.
pub struct WittIntRing {
    set: Arc<TruncationSet>,
    table: Arc<StructureTable>,
}

impl WittIntRing {
    pub fn new(set: TruncationSet, store: &TableStore) -> Result<Self> {
        let table = store.get_or_build(&set)?;
        Ok(WittIntRing {
            set: Arc::new(set),
            table,
        })
    }

    pub fn set(&self) -> &TruncationSet {
        &self.set
    }

    fn check(&self, w: &WittIntVector) -> Result<()> {
        if *w.set != *self.set {
            return Err(Error::Mismatch("vector from a different set".into()));
        }
        Ok(())
    }

    pub fn from_i64(&self, coords: &[i64]) -> Result<WittIntVector> {
        if coords.len() != self.set.len() {
            return Err(Error::Mismatch("coordinate count".into()));
        }
        Ok(WittIntVector {
            set: Arc::clone(&self.set),
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        })
    }

    pub fn zero(&self) -> WittIntVector {
        WittIntVector {
            set: Arc::clone(&self.set),
            coords: vec![BigInt::zero(); self.set.len()],
        }
    }

    pub fn teichmuller(&self, c: BigInt) -> WittIntVector {
        let mut w = self.zero();
        if !self.set.is_empty() {
            w.coords[0] = c;
        }
        w
    }

    /// Ghost components: ghost_m(w) = sum_{d | m} d * w_d^{m/d}.
    pub fn ghost(&self, w: &WittIntVector) -> Result<Vec<BigInt>> {
        self.check(w)?;
        Ok(self
            .set
            .members()
            .iter()
            .map(|&m| {
                let mut total = BigInt::zero();
                for (i, &d) in self.set.members().iter().enumerate() {
                    if d <= m && m % d == 0 {
                        total += BigInt::from(d) * w.coords[i].pow((m / d) as u32);
                    }
                }
                total
            })
            .collect())
    }

    fn eval_binary(
        &self,
        polys: &[crate::witt::poly::SparsePoly],
        a: &WittIntVector,
        b: &WittIntVector,
    ) -> WittIntVector {
        let assign = |side: Side, d: u64| -> BigInt {
            let i = self.set.index_of(d).expect("divisor in set");
            match side {
                Side::X => a.coords[i].clone(),
                Side::Y => b.coords[i].clone(),
            }
        };
        WittIntVector {
            set: Arc::clone(&self.set),
            coords: polys.iter().map(|p| p.eval(&assign)).collect(),
        }
    }

    pub fn add(&self, a: &WittIntVector, b: &WittIntVector) -> Result<WittIntVector> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.eval_binary(self.table.sum_polys(), a, b))
    }

    pub fn mul(&self, a: &WittIntVector, b: &WittIntVector) -> Result<WittIntVector> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.eval_binary(self.table.prod_polys(), a, b))
    }

    pub fn neg(&self, a: &WittIntVector) -> Result<WittIntVector> {
        self.check(a)?;
        let mut z = self.zero();
        for i in 0..self.set.len() {
            let assign = |side: Side, d: u64| -> BigInt {
                let j = self.set.index_of(d).expect("divisor");
                match side {
                    Side::X => a.coords[j].clone(),
                    Side::Y => z.coords[j].clone(), // z_m still 0 at its own slot
                }
            };
            let s = self.table.sum_poly(i).eval(&assign);
            z.coords[i] = -s;
        }
        Ok(z)
    }

    pub fn sub(&self, a: &WittIntVector, b: &WittIntVector) -> Result<WittIntVector> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    pub fn verschiebung(&self, n: u64, w: &WittIntVector) -> Result<WittIntVector> {
        if *w.set != self.set.divide(n) {
            return Err(Error::Mismatch(format!("source must be indexed by S/{n}")));
        }
        let mut out = self.zero();
        for (i, &m) in self.set.members().iter().enumerate() {
            if m % n == 0 {
                if let Some(c) = w.coord(m / n) {
                    out.coords[i] = c.clone();
                }
            }
        }
        Ok(out)
    }

    /// F_n over the integers, solved directly from the ghost equations
    /// ghost(F_n w)_m = ghost(w)_{nm}; every division must be exact.
    pub fn frobenius(&self, n: u64, w: &WittIntVector, target: &WittIntRing) -> Result<WittIntVector> {
        self.check(w)?;
        if *target.set != self.set.divide(n) {
            return Err(Error::Mismatch(format!("target must be over S/{n}")));
        }
        let ghosts = self.ghost(w)?;
        let mut out = target.zero();
        for (i, &m) in target.set.members().iter().enumerate() {
            let src = self.set.index_of(n * m).expect("nm in S");
            let mut rhs = ghosts[src].clone();
            for (j, &d) in target.set.members()[..i].iter().enumerate() {
                if m % d == 0 {
                    rhs -= BigInt::from(d) * out.coords[j].pow((m / d) as u32);
                }
            }
            let (q, r) = rhs.div_rem(&BigInt::from(m));
            if !r.is_zero() {
                return Err(Error::integrity(
                    "frobenius ghost solve hit an inexact division",
                ));
            }
            out.coords[i] = q;
        }
        Ok(out)
    }

    /// Reduce coordinates mod p into W_S(F_p). Prime fields only; for e > 1
    /// there is no canonical integer lift to reduce from.
    pub fn reduce_mod_p(&self, w: &WittIntVector, ring: &WittRing) -> Result<WittVector> {
        self.check(w)?;
        if ring.field().e() != 1 {
            return Err(Error::Mismatch("reduction targets a prime field".into()));
        }
        if *ring.set() != *self.set {
            return Err(Error::Mismatch("reduction must keep the set".into()));
        }
        let p = BigInt::from(ring.field().p());
        let coords: Vec<FieldElem> = w
            .coords
            .iter()
            .map(|c| {
                use num_traits::ToPrimitive;
                c.mod_floor(&p).to_u64().unwrap() as FieldElem
            })
            .collect();
        ring.from_coords(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::field::FiniteField;

    fn store() -> TableStore {
        TableStore::in_memory()
    }

    fn tset(members: &[u64]) -> TruncationSet {
        TruncationSet::new(members.to_vec()).unwrap()
    }

    #[test]
    fn ghost_examples() {
        let st = store();
        let ring = WittIntRing::new(tset(&[1, 2]), &st).unwrap();
        let w = ring.from_i64(&[1, 1]).unwrap();
        let g = ring.ghost(&w).unwrap();
        assert_eq!(g, vec![BigInt::from(1), BigInt::from(3)]);
        // Teichmuller ghost is x^m
        let t = ring.teichmuller(BigInt::from(5));
        assert_eq!(
            ring.ghost(&t).unwrap(),
            vec![BigInt::from(5), BigInt::from(25)]
        );
        assert!(ring
            .ghost(&ring.zero())
            .unwrap()
            .iter()
            .all(|g| g.is_zero()));
    }

    #[test]
    fn integer_addition_example() {
        let st = store();
        let ring = WittIntRing::new(tset(&[1, 2]), &st).unwrap();
        let one = ring.from_i64(&[1, 0]).unwrap();
        let sum = ring.add(&one, &one).unwrap();
        assert_eq!(sum, ring.from_i64(&[2, -1]).unwrap());
    }

    #[test]
    fn f2_addition_example() {
        let st = store();
        let field = Arc::new(FiniteField::new(2, 1).unwrap());
        let ring = WittRing::new(tset(&[1, 2]), field, &st).unwrap();
        let one = ring.one();
        let sum = ring.add(&one, &one).unwrap();
        assert_eq!(sum.coords(), &[0, 1]); // (2, -1) mod 2
        // w + 0 = w
        assert_eq!(ring.add(&one, &ring.zero()).unwrap(), one);
    }

    #[test]
    fn neg_is_additive_inverse() {
        let st = store();
        for (p, e) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let field = Arc::new(FiniteField::new(p, e).unwrap());
            let ring = WittRing::new(tset(&[1, 2, 3, 4, 6]), field, &st).unwrap();
            for code in 0..ring.group_order().unwrap().min(200) as u64 {
                let w = ring.decode(code * 7 % ring.group_order().unwrap() as u64);
                let n = ring.neg(&w).unwrap();
                assert!(ring.add(&w, &n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn teichmuller_multiplicative_f4() {
        let st = store();
        let field = Arc::new(FiniteField::new(2, 2).unwrap());
        let g = field.generator();
        let g2 = field.mul_elem(g, g);
        let ring = WittRing::new(tset(&[1, 2, 3, 4, 6]), field, &st).unwrap();
        let prod = ring
            .mul(&ring.teichmuller(g), &ring.teichmuller(g))
            .unwrap();
        assert_eq!(prod, ring.teichmuller(g2));
        // [0] and [1]
        assert!(ring.teichmuller(0).is_zero());
        let one = ring.one();
        assert_eq!(ring.mul(&one, &one).unwrap(), one);
    }

    #[test]
    fn verschiebung_examples() {
        let st = store();
        let field = Arc::new(FiniteField::new(3, 1).unwrap());
        let ring = WittRing::new(tset(&[1, 2]), Arc::clone(&field), &st).unwrap();
        let sub = WittRing::new(tset(&[1]), Arc::clone(&field), &st).unwrap();
        let y = sub.teichmuller(2);
        let v = ring.verschiebung(2, &y).unwrap();
        assert_eq!(v.coords(), &[0, 2]);
        assert!(ring.verschiebung(2, &sub.zero()).unwrap().is_zero());
        // V_n additivity over F_3 on S = {1,2,3}, n = 3
        let ring3 = WittRing::new(tset(&[1, 2, 3]), Arc::clone(&field), &st).unwrap();
        let sub3 = WittRing::new(tset(&[1]), Arc::clone(&field), &st).unwrap();
        for a in 0..3u16 {
            for b in 0..3u16 {
                let wa = sub3.teichmuller(a);
                let wb = sub3.teichmuller(b);
                let lhs = ring3
                    .verschiebung(3, &sub3.add(&wa, &wb).unwrap())
                    .unwrap();
                let rhs = ring3
                    .add(
                        &ring3.verschiebung(3, &wa).unwrap(),
                        &ring3.verschiebung(3, &wb).unwrap(),
                    )
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn frobenius_identities() {
        let st = store();
        let field = Arc::new(FiniteField::new(2, 1).unwrap());
        let s = tset(&[1, 2, 3, 4, 6]);
        let ring = WittRing::new(s.clone(), Arc::clone(&field), &st).unwrap();
        let half = WittRing::new(s.divide(2), Arc::clone(&field), &st).unwrap();

        // F_1 = id
        let idring = WittRing::new(s.clone(), Arc::clone(&field), &st).unwrap();
        for code in 0..32u64 {
            let w = ring.decode(code);
            assert_eq!(ring.frobenius(1, &w, &idring).unwrap(), w);
        }
        // F_n([x]) = [x^n]
        let t = ring.teichmuller(1);
        assert_eq!(ring.frobenius(2, &t, &half).unwrap(), half.teichmuller(1));
        // F_2 V_2 = 2 = w + w on W_{S/2}(F_2)
        for code in 0..8u64 {
            let w = half.decode(code);
            let v = ring.verschiebung(2, &w).unwrap();
            let fv = ring.frobenius(2, &v, &half).unwrap();
            let doubled = half.add(&w, &w).unwrap();
            assert_eq!(fv, doubled);
        }
    }

    #[test]
    fn frobenius_int_ghost_characterization() {
        let st = store();
        let s = tset(&[1, 2, 3, 4, 6, 12]);
        let ring = WittIntRing::new(s.clone(), &st).unwrap();
        let target = WittIntRing::new(s.divide(2), &st).unwrap();
        let w = ring.from_i64(&[3, -1, 2, 5, 0, -2]).unwrap();
        let fw = ring.frobenius(2, &w, &target).unwrap();
        let gw = ring.ghost(&w).unwrap();
        let gf = target.ghost(&fw).unwrap();
        // ghost(F_2 w)_m = ghost(w)_{2m}
        for (i, &m) in target.set().members().iter().enumerate() {
            let src = s.index_of(2 * m).unwrap();
            assert_eq!(gf[i], gw[src], "ghost at m={m}");
        }
    }

    #[test]
    fn enumerate_counts() {
        let st = store();
        let f2 = Arc::new(FiniteField::new(2, 1).unwrap());
        let r1 = WittRing::new(tset(&[1]), Arc::clone(&f2), &st).unwrap();
        assert_eq!(r1.enumerate(DEFAULT_ENUM_CAP).unwrap().count(), 2);
        let r5 = WittRing::new(tset(&[1, 2, 3, 4, 6]), f2, &st).unwrap();
        let all: Vec<_> = r5.enumerate(DEFAULT_ENUM_CAP).unwrap().collect();
        assert_eq!(all.len(), 32);
        let unique: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), 32);
        assert!(r5.enumerate(16).is_err());
    }

    #[test]
    fn teichmuller_decomposition_roundtrip() {
        let st = store();
        let field = Arc::new(FiniteField::new(3, 1).unwrap());
        let ring = WittRing::new(tset(&[1, 2, 3, 4, 6]), field, &st).unwrap();
        for code in [0u64, 1, 17, 100, 241] {
            let w = ring.decode(code % ring.group_order().unwrap() as u64);
            let decomp = ring.teichmuller_decomposition(&w).unwrap();
            let mut acc = ring.zero();
            for (m, c) in decomp {
                acc = ring
                    .add(&acc, &ring.single_support(m, c).unwrap())
                    .unwrap();
            }
            assert_eq!(acc, w);
        }
    }

    #[test]
    fn mismatch_errors() {
        let st = store();
        let f2 = Arc::new(FiniteField::new(2, 1).unwrap());
        let r1 = WittRing::new(tset(&[1]), Arc::clone(&f2), &st).unwrap();
        let r2 = WittRing::new(tset(&[1, 2]), f2, &st).unwrap();
        let a = r1.one();
        let b = r2.one();
        assert!(r2.add(&a, &b).is_err());
        assert!(r2.verschiebung(2, &b).is_err());
    }

    #[test]
    fn empty_set_zero_ring() {
        let st = store();
        let f2 = Arc::new(FiniteField::new(2, 1).unwrap());
        let r = WittRing::new(TruncationSet::empty(), f2, &st).unwrap();
        let z = r.zero();
        assert!(z.is_zero());
        assert_eq!(r.add(&z, &z).unwrap(), z);
        assert_eq!(r.one(), z);
        assert_eq!(r.group_order(), Some(1));
    }
}
