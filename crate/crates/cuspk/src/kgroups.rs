//! The top-level calculator: K_j(k[x,y]/(y^a - x^b), (x,y)) by three
//! routes (closed form, exhaustive Witt quotient, TC tower elimination),
//! cross-checked against each other and against the Sylvester length.


use std::sync::Arc;

use crate::algebra::{
    abelian_structure_from_elements, subgroup_closure, AbelianGroupStructure,
    DEFAULT_CLOSURE_CAP,
};
use crate::error::{Error, Result};
use crate::semigroup::CuspPair;
use crate::tcmodel;
use crate::witt::{FiniteField, TableStore, WittRing, WittVector, DEFAULT_ENUM_CAP};

#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Exhaustive-enumeration bound on q^{|S|} for the Witt quotient route.
    pub enum_cap: u128,
    /// Element bound for subgroup closures.
    pub closure_cap: usize,
    /// Weight bound for the cyclic bar oracle.
    pub weight_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enum_cap: DEFAULT_ENUM_CAP,
            closure_cap: DEFAULT_CLOSURE_CAP,
            weight_cap: crate::cyclicbar::DEFAULT_WEIGHT_CAP,
        }
    }
}

fn check_field(pair: &CuspPair, field: &FiniteField) -> Result<()> {
    if field.p() != pair.p() || field.e() != pair.e() {
        return Err(Error::Mismatch(format!(
            "field F_{}^{} does not match pair (p={}, e={})",
            field.p(),
            field.e(),
            pair.p(),
            pair.e()
        )));
    }
    Ok(())
}

/// The closed form: product over the p-typical profile of W_h(k), i.e. of
/// (Z/p^h)^e, normalized to invariant factors.
pub fn closed_form(
    pair: &CuspPair,
    r: u32,
    field: &FiniteField,
) -> Result<AbelianGroupStructure> {
    check_field(pair, field)?;
    let profile = pair.p_typical_profile(r)?;
    let mut exps: Vec<u32> = Vec::new();
    for (_, &h) in profile.entries() {
        for _ in 0..field.e() {
            exps.push(h);
        }
    }
    Ok(AbelianGroupStructure::from_prime_power_exponents(
        pair.p(),
        &exps,
    ))
}

#[derive(Clone, Debug)]
pub struct WittQuotientReport {
    pub structure: AbelianGroupStructure,
    pub ambient_order: u128,
    pub subgroup_order: u128,
    pub quotient_order: u128,
}

/// The brute-force route: enumerate the subgroup
/// V_a W_{S/a}(k) + V_b W_{S/b}(k) inside W_S(k) by closure from the
/// Verschiebung images of additive generators, then read off the quotient.
///
/// Cosets are canonicalized by sweeping the coordinates at indices
/// divisible by a or b to zero with single-support subtractions (each such
/// single-support vector is a Verschiebung image, hence lies in the
/// subgroup). The count of representatives times the closure order must
/// equal the ambient order, which certifies both that the sweep separates
/// cosets and that the generators really generate.
pub fn witt_quotient(
    pair: &CuspPair,
    r: u32,
    field: &Arc<FiniteField>,
    store: &TableStore,
    caps: &Caps,
) -> Result<WittQuotientReport> {
    check_field(pair, field)?;
    let set = pair.truncation_set(r)?;
    // cap check before any table is built
    let mut ambient: u128 = 1;
    for _ in 0..set.len() {
        ambient = ambient
            .checked_mul(u128::from(field.q()))
            .filter(|&o| o <= caps.enum_cap)
            .ok_or_else(|| {
                Error::resource(format!(
                    "q^|S| = {}^{} exceeds the enumeration cap {}; shrink q or r",
                    field.q(),
                    set.len(),
                    caps.enum_cap
                ))
            })?;
    }
    let ring = WittRing::new(set.clone(), Arc::clone(field), store)?;
    debug_assert_eq!(ring.group_order(), Some(ambient));

    // generators: V_a and V_b of the additive generators of the sub-rings
    let mut encoded_gens: Vec<u64> = Vec::new();
    for n in [pair.a(), pair.b()] {
        let sub = WittRing::new(set.divide(n), Arc::clone(field), store)?;
        for g in sub.additive_generators() {
            let v = ring.verschiebung(n, &g)?;
            encoded_gens.push(ring.encode(&v));
        }
    }

    let closure = subgroup_closure(
        ambient,
        ring.encode(&ring.zero()),
        &encoded_gens,
        |x, y| ring.add_encoded(*x, *y),
        |x| ring.neg_encoded(*x),
        caps.closure_cap,
    )?;
    let subgroup_order = closure.order() as u128;

    // coordinates to sweep (divisible by a or b) and the complement
    let swept: Vec<u64> = set
        .members()
        .iter()
        .copied()
        .filter(|&m| m % pair.a() == 0 || m % pair.b() == 0)
        .collect();
    let free: Vec<u64> = set
        .members()
        .iter()
        .copied()
        .filter(|&m| m % pair.a() != 0 && m % pair.b() != 0)
        .collect();

    let canon = |w: &WittVector| -> Result<WittVector> {
        let mut rep = w.clone();
        for &m in &swept {
            let c = rep.coord(m).unwrap();
            if c != 0 {
                rep = ring.sub(&rep, &ring.single_support(m, c)?)?;
            }
        }
        for &m in &swept {
            if rep.coord(m).unwrap() != 0 {
                return Err(Error::integrity("coset sweep left a nonzero coordinate"));
            }
        }
        Ok(rep)
    };

    // the sweep must kill the subgroup itself
    let sample: Vec<u64> = if closure.order() <= 4096 {
        closure.elements().to_vec()
    } else {
        closure.elements().iter().copied().step_by(closure.order() / 256).collect()
    };
    for code in sample {
        if !canon(&ring.decode(code))?.is_zero() {
            return Err(Error::integrity(
                "a subgroup element has a nonzero canonical representative",
            ));
        }
    }

    // representatives: all vectors supported on the free coordinates
    let q = field.q();
    let mut quotient: Vec<WittVector> = Vec::new();
    let mut counter = vec![0u64; free.len()];
    loop {
        let mut w = ring.zero();
        for (i, &m) in free.iter().enumerate() {
            if counter[i] != 0 {
                let idx = set.index_of(m).unwrap();
                let mut coords = w.coords().to_vec();
                coords[idx] = counter[i] as u16;
                w = ring.from_coords(coords)?;
            }
        }
        quotient.push(w);
        let mut i = 0;
        loop {
            if i == free.len() {
                break;
            }
            counter[i] += 1;
            if counter[i] < q {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if i == free.len() {
            break;
        }
    }
    let quotient_order = quotient.len() as u128;
    if quotient_order * subgroup_order != ambient {
        return Err(Error::integrity(format!(
            "representative count {quotient_order} x subgroup order {subgroup_order} \
             != ambient order {ambient}; the generators do not span the expected subgroup"
        )));
    }

    let zero = ring.zero();
    let add = |x: &WittVector, y: &WittVector| -> WittVector {
        canon(&ring.add(x, y).expect("same ring")).expect("canon closes")
    };
    let structure = abelian_structure_from_elements(&quotient, &zero, add)?;
    Ok(WittQuotientReport {
        structure,
        ambient_order: ambient,
        subgroup_order,
        quotient_order,
    })
}

/// The TC route: the product over p-free classes m' in S of TC_{2r+1}(m').
/// Classes with h = 0 contribute nothing but are still run through the
/// elimination (which must then return the trivial group).
pub fn tc_route(pair: &CuspPair, r: u32, field: &FiniteField) -> Result<AbelianGroupStructure> {
    check_field(pair, field)?;
    let set = pair.truncation_set(r)?;
    let mut acc = AbelianGroupStructure::trivial();
    for &m in set.members() {
        if m % pair.p() == 0 {
            continue;
        }
        let tc = tcmodel::tc_of_class(pair, r, m, field)?;
        acc = acc.sum(&tc);
    }
    Ok(acc)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RouteSelection {
    pub witt: bool,
    pub tc: bool,
}

impl Default for RouteSelection {
    fn default() -> Self {
        RouteSelection { witt: true, tc: true }
    }
}

#[derive(Clone, Debug)]
pub struct KGroupResult {
    pub a: u64,
    pub b: u64,
    pub p: u64,
    pub e: u32,
    pub j: i64,
    pub group: AbelianGroupStructure,
    /// route name -> computed structure
    pub routes: Vec<(String, AbelianGroupStructure)>,
    /// routes skipped with the reason (resource caps)
    pub skipped: Vec<(String, String)>,
    pub agree: bool,
    pub length: u64,
    pub length_expected: u64,
    pub length_ok: bool,
}

impl KGroupResult {
    pub fn pass(&self) -> bool {
        self.agree && self.length_ok
    }
}

/// K_j of the cusp relative to the cusp point: trivial in odd and negative
/// degrees, and the truncation-set quotient for j = 2r.
pub fn k_group(
    pair: &CuspPair,
    j: i64,
    field: &Arc<FiniteField>,
    routes: RouteSelection,
    store: &TableStore,
    caps: &Caps,
) -> Result<KGroupResult> {
    check_field(pair, field)?;
    let mut result = KGroupResult {
        a: pair.a(),
        b: pair.b(),
        p: pair.p(),
        e: pair.e(),
        j,
        group: AbelianGroupStructure::trivial(),
        routes: Vec::new(),
        skipped: Vec::new(),
        agree: true,
        length: 0,
        length_expected: 0,
        length_ok: true,
    };
    if j < 0 || j % 2 != 0 {
        return Ok(result);
    }
    let r = u32::try_from(j / 2).map_err(|_| Error::invalid("degree too large"))?;

    let closed = closed_form(pair, r, field)?;
    result
        .routes
        .push(("closed_form".to_string(), closed.clone()));

    if routes.tc {
        let tc = tc_route(pair, r, field)?;
        result.routes.push(("tc".to_string(), tc));
    }
    if routes.witt {
        match witt_quotient(pair, r, field, store, caps) {
            Ok(report) => result
                .routes
                .push(("witt_quotient".to_string(), report.structure)),
            Err(Error::Resource(reason)) => {
                result.skipped.push(("witt_quotient".to_string(), reason));
            }
            Err(e) => return Err(e),
        }
    }

    result.agree = result.routes.iter().all(|(_, g)| *g == closed);
    result.group = closed;
    result.length = result.group.p_length(pair.p());
    result.length_expected = u64::from(pair.e()) * pair.sylvester_length(r);
    result.length_ok = result.length == result.length_expected;
    Ok(result)
}

// --- grid verification --------------------------------------------------

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub pairs: Vec<(u64, u64)>,
    pub primes: Vec<u64>,
    pub degrees: Vec<u32>,
    pub levels: Vec<u32>,
    /// Self-test hook: deliberately corrupt the expected length so every
    /// point must be flagged as failing.
    pub negative_control: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            pairs: vec![(2, 3), (2, 5), (3, 4), (3, 5)],
            primes: vec![2, 3, 5],
            degrees: vec![1, 2],
            levels: vec![0, 1, 2, 3, 4],
            negative_control: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridPointReport {
    pub a: u64,
    pub b: u64,
    pub p: u64,
    pub e: u32,
    pub r: u32,
    pub routes_run: Vec<String>,
    pub agree: bool,
    pub length_ok: bool,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct GridReport {
    pub points: Vec<GridPointReport>,
    pub failures: usize,
}

pub fn verify_grid(grid: &GridSpec, store: &TableStore, caps: &Caps) -> GridReport {
    use rayon::prelude::*;
    let mut combos = Vec::new();
    for &(a, b) in &grid.pairs {
        for &p in &grid.primes {
            for &e in &grid.degrees {
                for &r in &grid.levels {
                    combos.push((a, b, p, e, r));
                }
            }
        }
    }
    let points: Vec<GridPointReport> = combos
        .par_iter()
        .map(|&(a, b, p, e, r)| {
            let run = || -> Result<(KGroupResult, CuspPair)> {
                let pair = CuspPair::new(a, b, p, e)?;
                let field = Arc::new(FiniteField::new(p, e)?);
                let res = k_group(
                    &pair,
                    2 * i64::from(r),
                    &field,
                    RouteSelection::default(),
                    store,
                    caps,
                )?;
                Ok((res, pair))
            };
            match run() {
                Ok((res, _)) => {
                    let mut length_ok = res.length_ok;
                    if grid.negative_control {
                        length_ok = res.length == res.length_expected + 1;
                    }
                    let pass = res.agree && length_ok;
                    GridPointReport {
                        a,
                        b,
                        p,
                        e,
                        r,
                        routes_run: res.routes.iter().map(|(n, _)| n.clone()).collect(),
                        agree: res.agree,
                        length_ok,
                        pass,
                        detail: format!(
                            "group {} (length {}), skipped: {:?}",
                            res.group, res.length, res.skipped
                        ),
                    }
                }
                Err(err) => GridPointReport {
                    a,
                    b,
                    p,
                    e,
                    r,
                    routes_run: Vec::new(),
                    agree: false,
                    length_ok: false,
                    pass: false,
                    detail: format!("error: {err}"),
                },
            }
        })
        .collect();
    let failures = points.iter().filter(|p| !p.pass).count();
    GridReport { points, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::group_from_parts;

    fn setup(a: u64, b: u64, p: u64, e: u32) -> (CuspPair, Arc<FiniteField>, TableStore) {
        (
            CuspPair::new(a, b, p, e).unwrap(),
            Arc::new(FiniteField::new(p, e).unwrap()),
            TableStore::in_memory(),
        )
    }

    #[test]
    fn closed_form_examples() {
        let (pair, field, _) = setup(2, 3, 2, 1);
        assert_eq!(
            closed_form(&pair, 0, &field).unwrap(),
            group_from_parts(0, &[2])
        );
        let (pair, field, _) = setup(2, 3, 2, 2);
        assert_eq!(
            closed_form(&pair, 0, &field).unwrap(),
            group_from_parts(0, &[2, 2])
        );
        let (pair, field, _) = setup(2, 3, 2, 1);
        let g = closed_form(&pair, 1, &field).unwrap();
        assert_eq!(g.p_length(2), 3);
    }

    #[test]
    fn witt_quotient_smallest_case() {
        let (pair, field, store) = setup(2, 3, 2, 1);
        let report = witt_quotient(&pair, 0, &field, &store, &Caps::default()).unwrap();
        assert_eq!(report.ambient_order, 32);
        assert_eq!(report.subgroup_order, 16);
        assert_eq!(report.quotient_order, 2);
        assert_eq!(report.structure, group_from_parts(0, &[2]));
    }

    #[test]
    fn witt_quotient_f4() {
        let (pair, field, store) = setup(2, 3, 2, 2);
        let report = witt_quotient(&pair, 0, &field, &store, &Caps::default()).unwrap();
        assert_eq!(report.structure, group_from_parts(0, &[2, 2]));
    }

    #[test]
    fn witt_quotient_respects_cap() {
        let (pair, field, store) = setup(2, 3, 2, 1);
        let caps = Caps {
            enum_cap: 16,
            ..Caps::default()
        };
        assert!(matches!(
            witt_quotient(&pair, 0, &field, &store, &caps),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn tc_route_examples() {
        let (pair, field, _) = setup(2, 3, 2, 1);
        assert_eq!(
            tc_route(&pair, 0, &field).unwrap(),
            group_from_parts(0, &[2])
        );
        let (pair, field, _) = setup(3, 5, 2, 1);
        // profile {1 -> 3, 7 -> 1}: Z/8 x Z/2
        assert_eq!(
            tc_route(&pair, 0, &field).unwrap(),
            group_from_parts(0, &[2, 8])
        );
    }

    #[test]
    fn k_group_three_routes_agree() {
        let (pair, field, store) = setup(2, 3, 2, 1);
        let res = k_group(
            &pair,
            0,
            &field,
            RouteSelection::default(),
            &store,
            &Caps::default(),
        )
        .unwrap();
        assert!(res.pass());
        assert_eq!(res.routes.len(), 3);
        assert_eq!(res.group, group_from_parts(0, &[2]));
    }

    #[test]
    fn k_group_odd_and_negative_trivial() {
        let (pair, field, store) = setup(2, 3, 2, 1);
        for j in [-2i64, -1, 1, 3, 5] {
            let res = k_group(
                &pair,
                j,
                &field,
                RouteSelection::default(),
                &store,
                &Caps::default(),
            )
            .unwrap();
            assert!(res.group.is_trivial());
            assert!(res.agree);
        }
    }

    #[test]
    fn k_group_r1_length_three() {
        let (pair, field, store) = setup(2, 3, 2, 1);
        let res = k_group(
            &pair,
            2,
            &field,
            RouteSelection::default(),
            &store,
            &Caps::default(),
        )
        .unwrap();
        assert!(res.pass());
        assert_eq!(res.length, 3);
        assert_eq!(res.group, group_from_parts(0, &[2, 2, 2]));
    }

    #[test]
    fn orientation_invariance() {
        let store = TableStore::in_memory();
        let caps = Caps::default();
        let p1 = CuspPair::new(2, 3, 2, 1).unwrap();
        let p2 = CuspPair::new(3, 2, 2, 1).unwrap();
        let field = Arc::new(FiniteField::new(2, 1).unwrap());
        for j in [0i64, 2] {
            let r1 = k_group(&p1, j, &field, RouteSelection::default(), &store, &caps).unwrap();
            let r2 = k_group(&p2, j, &field, RouteSelection::default(), &store, &caps).unwrap();
            assert_eq!(r1.group, r2.group);
        }
    }

    #[test]
    fn truncation_monotone_consistency() {
        let pair = CuspPair::new(3, 4, 2, 1).unwrap();
        let mut prev_len = 0;
        let mut prev_size = 0;
        for r in 0..=4u32 {
            let size = pair.truncation_set(r).unwrap().len();
            let len = pair.sylvester_length(r);
            if r > 0 {
                assert!(size >= prev_size);
                assert_eq!(len - prev_len, (pair.a() - 1) * (pair.b() - 1));
            }
            prev_size = size;
            prev_len = len;
        }
    }

    #[test]
    fn negative_control_flags_failures() {
        let store = TableStore::in_memory();
        let grid = GridSpec {
            pairs: vec![(2, 3)],
            primes: vec![2],
            degrees: vec![1],
            levels: vec![0],
            negative_control: true,
        };
        let report = verify_grid(&grid, &store, &Caps::default());
        assert_eq!(report.failures, 1);
        let grid_ok = GridSpec {
            negative_control: false,
            ..grid
        };
        let report = verify_grid(&grid_ok, &store, &Caps::default());
        assert_eq!(report.failures, 0);
    }
}
