use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::matrix::IntegerMatrix;
use crate::error::{Error, Result};

type Row = HashMap<usize, BigInt>;

/// Rounded division: returns q with |a - q*b| <= |b|/2.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut q, r) = a.div_mod_floor(b);
    if r.magnitude() * 2u32 > *b.magnitude() {
        q += 1;
    }
    q
}

/// Row-op-only sparse matrix used for the transformation trackers.
struct Tracked {
    rows: Vec<Row>,
}

impl Tracked {
    fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = Row::new();
                r.insert(i, BigInt::one());
                r
            })
            .collect();
        Tracked { rows }
    }

    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() || dst == src {
            return;
        }
        let updates: Vec<(usize, BigInt)> =
            self.rows[src].iter().map(|(&c, v)| (c, v * q)).collect();
        let row = &mut self.rows[dst];
        for (c, dv) in updates {
            let e = row.entry(c).or_insert_with(BigInt::zero);
            *e += dv;
            if e.is_zero() {
                row.remove(&c);
            }
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.rows.swap(i, j);
    }

    fn negate(&mut self, i: usize) {
        for v in self.rows[i].values_mut() {
            *v = -&*v;
        }
    }

    /// Rows reordered by `perm` (output row t = tracked row perm[t]).
    fn permuted_rows(mut self, perm: &[usize]) -> Vec<Row> {
        let mut taken: Vec<Option<Row>> = self.rows.drain(..).map(Some).collect();
        perm.iter().map(|&p| taken[p].take().unwrap()).collect()
    }
}

fn rows_to_matrix(rows: &[Row], cols: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(rows.len(), cols);
    for (r, row) in rows.iter().enumerate() {
        for (&c, v) in row {
            m.set(r, c, v.clone());
        }
    }
    m
}

fn rows_to_matrix_transposed(rows: &[Row], cols_of_t: usize) -> IntegerMatrix {
    // rows represent the transpose; emit the straight matrix
    let mut m = IntegerMatrix::zeros(cols_of_t, rows.len());
    for (r, row) in rows.iter().enumerate() {
        for (&c, v) in row {
            m.set(c, r, v.clone());
        }
    }
    m
}

/// Working matrix with row and column operations and a column occupancy index.
struct WorkMat {
    rows: Vec<Row>,
    col_occ: Vec<HashSet<usize>>,
}

impl WorkMat {
    fn load(m: &IntegerMatrix) -> Self {
        let mut w = WorkMat {
            rows: vec![Row::new(); m.rows()],
            col_occ: vec![HashSet::new(); m.cols()],
        };
        for (r, c, v) in m.nonzero_entries() {
            w.rows[r].insert(c, v.clone());
            w.col_occ[c].insert(r);
        }
        w
    }

    fn get(&self, r: usize, c: usize) -> Option<&BigInt> {
        self.rows[r].get(&c)
    }

    fn add_entry(&mut self, r: usize, c: usize, dv: BigInt) {
        if dv.is_zero() {
            return;
        }
        match self.rows[r].entry(c) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += dv;
                if e.get().is_zero() {
                    e.remove();
                    self.col_occ[c].remove(&r);
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(dv);
                self.col_occ[c].insert(r);
            }
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let updates: Vec<(usize, BigInt)> =
            self.rows[src].iter().map(|(&c, v)| (c, v * q)).collect();
        for (c, dv) in updates {
            self.add_entry(dst, c, dv);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let rows: Vec<usize> = self.col_occ[src].iter().copied().collect();
        for r in rows {
            let dv = &self.rows[r][&src] * q;
            self.add_entry(r, dst, dv);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let cols: HashSet<usize> = self.rows[i]
            .keys()
            .chain(self.rows[j].keys())
            .copied()
            .collect();
        self.rows.swap(i, j);
        for c in cols {
            let in_i = self.rows[i].contains_key(&c);
            let in_j = self.rows[j].contains_key(&c);
            if in_i {
                self.col_occ[c].insert(i);
            } else {
                self.col_occ[c].remove(&i);
            }
            if in_j {
                self.col_occ[c].insert(j);
            } else {
                self.col_occ[c].remove(&j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let rows: Vec<usize> = self.col_occ[i].union(&self.col_occ[j]).copied().collect();
        for r in rows {
            let vi = self.rows[r].remove(&i);
            let vj = self.rows[r].remove(&j);
            if let Some(v) = vj {
                self.rows[r].insert(i, v);
            }
            if let Some(v) = vi {
                self.rows[r].insert(j, v);
            }
        }
        self.col_occ.swap(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for v in self.rows[i].values_mut() {
            *v = -&*v;
        }
    }
}

#[derive(Clone, Copy, Default)]
pub(crate) struct SnfOptions {
    pub track_u: bool,
    pub track_v: bool,
    pub track_u_inv: bool,
    pub track_v_inv: bool,
}

pub(crate) struct SnfOutcome {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<BigInt>,
    pub u: Option<Vec<Row>>,
    pub v_t: Option<Vec<Row>>,
    pub u_inv_t: Option<Vec<Row>>,
    pub v_inv: Option<Vec<Row>>,
}

impl SnfOutcome {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn d_matrix(&self) -> IntegerMatrix {
        let mut d = IntegerMatrix::zeros(self.rows, self.cols);
        for (i, val) in self.diag.iter().enumerate() {
            d.set(i, i, val.clone());
        }
        d
    }

    pub fn u_matrix(&self) -> IntegerMatrix {
        rows_to_matrix(self.u.as_ref().expect("u not tracked"), self.rows)
    }

    pub fn v_matrix(&self) -> IntegerMatrix {
        rows_to_matrix_transposed(self.v_t.as_ref().expect("v not tracked"), self.cols)
    }

    pub fn u_inv_matrix(&self) -> IntegerMatrix {
        rows_to_matrix_transposed(self.u_inv_t.as_ref().expect("u_inv not tracked"), self.rows)
    }
}

pub(crate) fn snf_engine(m: &IntegerMatrix, opt: SnfOptions) -> SnfOutcome {
    let nr = m.rows();
    let nc = m.cols();
    let mut w = WorkMat::load(m);
    let mut u = opt.track_u.then(|| Tracked::identity(nr));
    let mut u_inv_t = opt.track_u_inv.then(|| Tracked::identity(nr));
    let mut v_t = opt.track_v.then(|| Tracked::identity(nc));
    let mut v_inv = opt.track_v_inv.then(|| Tracked::identity(nc));

    let mut row_active = vec![true; nr];
    let mut col_active = vec![true; nc];
    let mut steps: Vec<(usize, usize)> = Vec::new();
    let mut diag: Vec<BigInt> = Vec::new();

    macro_rules! op_add_row {
        ($dst:expr, $src:expr, $q:expr) => {{
            let q = $q;
            w.add_row($dst, $src, &q);
            if let Some(t) = u.as_mut() {
                t.add_row($dst, $src, &q);
            }
            if let Some(t) = u_inv_t.as_mut() {
                t.add_row($src, $dst, &(-&q));
            }
        }};
    }
    macro_rules! op_add_col {
        ($dst:expr, $src:expr, $q:expr) => {{
            let q = $q;
            w.add_col($dst, $src, &q);
            if let Some(t) = v_t.as_mut() {
                t.add_row($dst, $src, &q);
            }
            if let Some(t) = v_inv.as_mut() {
                t.add_row($src, $dst, &(-&q));
            }
        }};
    }
    macro_rules! op_swap_rows {
        ($i:expr, $j:expr) => {{
            w.swap_rows($i, $j);
            if let Some(t) = u.as_mut() {
                t.swap($i, $j);
            }
            if let Some(t) = u_inv_t.as_mut() {
                t.swap($i, $j);
            }
        }};
    }
    macro_rules! op_swap_cols {
        ($i:expr, $j:expr) => {{
            w.swap_cols($i, $j);
            if let Some(t) = v_t.as_mut() {
                t.swap($i, $j);
            }
            if let Some(t) = v_inv.as_mut() {
                t.swap($i, $j);
            }
        }};
    }

    loop {
        // Pivot selection: smallest |value|, then least fill, then position.
        let mut best: Option<(usize, usize)> = None;
        let mut best_key: Option<(BigInt, usize, usize, usize)> = None;
        'scan: for r in 0..nr {
            if !row_active[r] {
                continue;
            }
            for (&c, v) in &w.rows[r] {
                debug_assert!(col_active[c]);
                let fill = (w.rows[r].len() - 1) * (w.col_occ[c].len() - 1);
                let key = (BigInt::from(v.magnitude().clone()), fill, r, c);
                if best_key.as_ref().map_or(true, |b| key < *b) {
                    let unit = key.0.is_one() && fill == 0;
                    best = Some((r, c));
                    best_key = Some(key);
                    if unit {
                        break 'scan;
                    }
                }
            }
        }
        let (pr, pc) = match best {
            Some(p) => p,
            None => break,
        };

        // Clean the pivot row and column (Euclidean steps, swapping smaller
        // remainders into the pivot position until everything else is zero).
        loop {
            let mut swapped = false;
            // column phase
            loop {
                let others: Vec<usize> = w.col_occ[pc]
                    .iter()
                    .copied()
                    .filter(|&r| r != pr && row_active[r])
                    .collect();
                if others.is_empty() {
                    break;
                }
                for i in others {
                    let (q, rem_nonzero) = {
                        let piv = w.get(pr, pc).unwrap().clone();
                        match w.get(i, pc) {
                            None => continue,
                            Some(a) => {
                                let q = div_round(a, &piv);
                                let rem_nonzero = (a - &q * &piv) != BigInt::zero();
                                            (q, rem_nonzero)
                            }
                        }
                    };
                    op_add_row!(i, pr, -q);
                    if rem_nonzero {
                        debug_assert!(w.get(i, pc).is_some());
                        op_swap_rows!(i, pr);
                        swapped = true;
                    }
                }
            }
            // row phase
            let mut col_swapped = false;
            loop {
                let others: Vec<usize> = w.rows[pr]
                    .keys()
                    .copied()
                    .filter(|&c| c != pc && col_active[c])
                    .collect();
                if others.is_empty() {
                    break;
                }
                for j in others {
                    let (q, rem_nonzero) = {
                        let piv = w.get(pr, pc).unwrap().clone();
                        match w.get(pr, j) {
                            None => continue,
                            Some(a) => {
                                let q = div_round(a, &piv);
                                let rem_nonzero = (a - &q * &piv) != BigInt::zero();
                                            (q, rem_nonzero)
                            }
                        }
                    };
                    op_add_col!(j, pc, -q);
                    if rem_nonzero {
                        op_swap_cols!(j, pc);
                        col_swapped = true;
                    }
                }
            }
            // A column swap may have pulled new entries under the pivot column.
            if !col_swapped && !swapped {
                let col_clean = w.col_occ[pc]
                    .iter()
                    .all(|&r| r == pr || !row_active[r]);
                let row_clean = w.rows[pr]
                    .keys()
                    .all(|&c| c == pc || !col_active[c]);
                if col_clean && row_clean {
                    break;
                }
            }
        }

        // Divisibility sweep: the pivot must divide every remaining active
        // entry so the diagonal forms a chain d_1 | d_2 | ...
        'div: loop {
            let piv = w.get(pr, pc).unwrap().clone();
            let mut offender: Option<usize> = None;
            'find: for r in 0..nr {
                if !row_active[r] || r == pr {
                    continue;
                }
                for v in w.rows[r].values() {
                    if !v.mod_floor(&piv).is_zero() {
                        offender = Some(r);
                        break 'find;
                    }
                }
            }
            match offender {
                None => break 'div,
                Some(r) => {
                    op_add_row!(pr, r, BigInt::one());
                    // re-clean; the gcd steps shrink the pivot
                    loop {
                        let mut any = false;
                        loop {
                            let others: Vec<usize> = w.rows[pr]
                                .keys()
                                .copied()
                                .filter(|&c| c != pc && col_active[c])
                                .collect();
                            if others.is_empty() {
                                break;
                            }
                            for j in others {
                                let (q, rem_nonzero) = {
                                    let piv = w.get(pr, pc).unwrap().clone();
                                    match w.get(pr, j) {
                                        None => continue,
                                        Some(a) => {
                                            let q = div_round(a, &piv);
                                            let rem_nonzero = (a - &q * &piv) != BigInt::zero();
                                            (q, rem_nonzero)
                                        }
                                    }
                                };
                                op_add_col!(j, pc, -q);
                                if rem_nonzero {
                                    op_swap_cols!(j, pc);
                                    any = true;
                                }
                            }
                        }
                        loop {
                            let others: Vec<usize> = w.col_occ[pc]
                                .iter()
                                .copied()
                                .filter(|&r2| r2 != pr && row_active[r2])
                                .collect();
                            if others.is_empty() {
                                break;
                            }
                            for i in others {
                                let (q, rem_nonzero) = {
                                    let piv = w.get(pr, pc).unwrap().clone();
                                    match w.get(i, pc) {
                                        None => continue,
                                        Some(a) => {
                                            let q = div_round(a, &piv);
                                            let rem_nonzero = (a - &q * &piv) != BigInt::zero();
                                            (q, rem_nonzero)
                                        }
                                    }
                                };
                                op_add_row!(i, pr, -q);
                                if rem_nonzero {
                                    op_swap_rows!(i, pr);
                                    any = true;
                                }
                            }
                        }
                        if !any {
                            break;
                        }
                    }
                }
            }
        }

        if w.get(pr, pc).unwrap().is_negative() {
            w.negate_row(pr);
            if let Some(t) = u.as_mut() {
                t.negate(pr);
            }
            if let Some(t) = u_inv_t.as_mut() {
                t.negate(pr);
            }
        }

        diag.push(w.get(pr, pc).unwrap().clone());
        steps.push((pr, pc));
        row_active[pr] = false;
        col_active[pc] = false;
    }

    // Final permutations: pivot t moves to position (t, t).
    let mut row_perm: Vec<usize> = steps.iter().map(|&(r, _)| r).collect();
    for r in 0..nr {
        if row_active[r] {
            row_perm.push(r);
        }
    }
    let mut col_perm: Vec<usize> = steps.iter().map(|&(_, c)| c).collect();
    for c in 0..nc {
        if col_active[c] {
            col_perm.push(c);
        }
    }

    SnfOutcome {
        rows: nr,
        cols: nc,
        diag,
        u: u.map(|t| t.permuted_rows(&row_perm)),
        u_inv_t: u_inv_t.map(|t| t.permuted_rows(&row_perm)),
        v_t: v_t.map(|t| t.permuted_rows(&col_perm)),
        v_inv: v_inv.map(|t| t.permuted_rows(&col_perm)),
    }
}

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular and `D`
/// diagonal, nonnegative, `d_1 | d_2 | ...`.
pub struct SnfDecomposition {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SnfDecomposition {
    let out = snf_engine(
        m,
        SnfOptions {
            track_u: true,
            track_v: true,
            ..Default::default()
        },
    );
    let dec = SnfDecomposition {
        d: out.d_matrix(),
        u: out.u_matrix(),
        v: out.v_matrix(),
    };
    debug_assert!(
        m.rows() * m.cols() > 4096 || dec.u.mul(m).mul(&dec.v) == dec.d,
        "U*M*V != D"
    );
    dec
}

/// The nonzero diagonal of the Smith normal form (no transforms tracked).
pub fn smith_diagonal(m: &IntegerMatrix) -> Vec<BigInt> {
    snf_engine(m, SnfOptions::default()).diag
}

pub fn rank(m: &IntegerMatrix) -> usize {
    smith_diagonal(m).len()
}

/// Basis of the integer kernel lattice of `m`, as matrix columns.
///
/// The kernel of a matrix is a saturated sublattice, so these columns span
/// it exactly (not just up to finite index).
pub fn kernel_basis(m: &IntegerMatrix) -> IntegerMatrix {
    let out = snf_engine(
        m,
        SnfOptions {
            track_v: true,
            ..Default::default()
        },
    );
    let rank = out.rank();
    let v_t = out.v_t.as_ref().unwrap();
    let k = m.cols() - rank;
    let mut basis = IntegerMatrix::zeros(m.cols(), k);
    for t in 0..k {
        for (&r, val) in &v_t[rank + t] {
            basis.set(r, t, val.clone());
        }
    }
    basis
}

/// Solve `a * x = rhs` exactly over the integers.
pub fn solve_exact(a: &IntegerMatrix, rhs: &IntegerMatrix) -> Result<IntegerMatrix> {
    if a.rows() != rhs.rows() {
        return Err(Error::invalid("solve_exact: row mismatch"));
    }
    let out = snf_engine(
        a,
        SnfOptions {
            track_u: true,
            track_v: true,
            ..Default::default()
        },
    );
    let y = out.u_matrix().mul(rhs);
    let rank = out.rank();
    let mut z = IntegerMatrix::zeros(a.cols(), rhs.cols());
    for i in 0..a.rows() {
        for j in 0..rhs.cols() {
            let yv = y.get(i, j);
            if i < rank {
                let (q, r) = yv.div_rem(&out.diag[i]);
                if !r.is_zero() {
                    return Err(Error::integrity("solve_exact: no integral solution"));
                }
                z.set(i, j, q);
            } else if !yv.is_zero() {
                return Err(Error::integrity("solve_exact: inconsistent system"));
            }
        }
    }
    let x = out.v_matrix().mul(&z);
    debug_assert!(a.mul(&x) == *rhs);
    Ok(x)
}

/// Diagonal of the Smith form together with U^{-1}; the columns of
/// U^{-1} scaled by the diagonal are a basis of the column span.
pub(crate) fn snf_diag_and_u_inv(m: &IntegerMatrix) -> (Vec<BigInt>, IntegerMatrix) {
    let out = snf_engine(
        m,
        SnfOptions {
            track_u_inv: true,
            ..Default::default()
        },
    );
    let u_inv = out.u_inv_matrix();
    (out.diag, u_inv)
}

/// Kernel data for homology: the rank of `m` and the bottom rows of
/// `V^{-1}` (which express vectors in kernel coordinates).
pub(crate) fn snf_kernel_rows(m: &IntegerMatrix) -> (usize, Vec<Row>) {
    let out = snf_engine(
        m,
        SnfOptions {
            track_v_inv: true,
            ..Default::default()
        },
    );
    let rank = out.rank();
    let mut rows = out.v_inv.unwrap();
    let lower = rows.split_off(rank);
    (rank, lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(data: &[Vec<i64>]) -> Vec<BigInt> {
        let m = IntegerMatrix::from_rows(data);
        let dec = smith_normal_form(&m);
        assert_eq!(dec.u.mul(&m).mul(&dec.v), dec.d, "U*M*V = D");
        assert!(dec.u.is_unimodular(), "U unimodular");
        assert!(dec.v.is_unimodular(), "V unimodular");
        let diag = dec.d.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(
                    !w[0].is_zero() && w[1].mod_floor(&w[0]).is_zero(),
                    "divisibility chain"
                );
            }
        }
        diag.into_iter().filter(|d| !d.is_zero()).collect()
    }

    #[test]
    fn snf_hand_examples() {
        // hand elimination: gcd of entries is 2, det = -8, so diag(2, 4)
        assert_eq!(
            check_snf(&[vec![2, 4], vec![6, 8]]),
            vec![BigInt::from(2), BigInt::from(4)]
        );
        assert_eq!(
            check_snf(&[vec![1, 0], vec![0, 1]]),
            vec![BigInt::from(1), BigInt::from(1)]
        );
        assert!(check_snf(&[]).is_empty());
        // coprime diagonal merges: diag(2,3) -> diag(1,6)
        assert_eq!(
            check_snf(&[vec![2, 0], vec![0, 3]]),
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn snf_zero_and_rectangular() {
        assert!(check_snf(&[vec![0, 0], vec![0, 0]]).is_empty());
        assert_eq!(
            check_snf(&[vec![4, 6, 8]]),
            vec![BigInt::from(2)]
        );
        assert_eq!(
            check_snf(&[vec![3], vec![5]]),
            vec![BigInt::from(1)]
        );
    }

    #[test]
    fn kernel_basis_saturated() {
        // kernel of [2 0 -2; 0 3 -3] is spanned by (3? ...) -> x=z, y=z: (1,1,1)
        let m = IntegerMatrix::from_rows(&[vec![2, 0, -2], vec![0, 3, -3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
        // saturation: entries of the basis vector are coprime
        let g = num_integer::gcd(
            num_integer::gcd(k.get(0, 0).clone(), k.get(1, 0).clone()),
            k.get(2, 0).clone(),
        );
        assert!(g.abs().is_one());
    }

    #[test]
    fn solve_exact_roundtrip() {
        let a = IntegerMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let rhs = IntegerMatrix::from_rows(&[vec![3], vec![2]]);
        let x = solve_exact(&a, &rhs).unwrap();
        assert_eq!(a.mul(&x), rhs);
        // no integral solution: 2x = 1
        let a2 = IntegerMatrix::from_rows(&[vec![2]]);
        let r2 = IntegerMatrix::from_rows(&[vec![1]]);
        assert!(solve_exact(&a2, &r2).is_err());
    }
}
