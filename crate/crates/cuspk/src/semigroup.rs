//! Numerical-semigroup combinatorics of the cusp pair (a, b): the counting
//! function ell, the truncation sets S(a,b,r), the exponents s and h, and
//! the Sylvester length identity tying them together.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::witt::TruncationSet;

pub const MAX_GENERATOR: u64 = 64;
pub const MAX_TRUNCATION_LEVEL: u32 = 16;

/// The cusp y^a = x^b over F_{p^e}, oriented so that p does not divide b,
/// with a = p^u * a' and p not dividing a'.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CuspPair {
    a: u64,
    b: u64,
    p: u64,
    u: u32,
    a_prime: u64,
    e: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Validate (a, b, p, e) and swap a and b if necessary so that p does not
/// divide b. Since gcd(a, b) = 1, p divides at most one of them.
pub fn normalize_orientation(a: u64, b: u64, p: u64, e: u32) -> Result<CuspPair> {
    if a < 2 || b < 2 {
        return Err(Error::invalid(format!("need a, b >= 2, got a={a}, b={b}")));
    }
    if a > MAX_GENERATOR || b > MAX_GENERATOR {
        return Err(Error::invalid(format!(
            "a, b <= {MAX_GENERATOR} enforced, got a={a}, b={b}"
        )));
    }
    if gcd(a, b) != 1 {
        return Err(Error::invalid(format!("a={a} and b={b} are not coprime")));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("p={p} is not prime")));
    }
    if e < 1 {
        return Err(Error::invalid("field degree e must be >= 1"));
    }
    let (a, b) = if b % p == 0 { (b, a) } else { (a, b) };
    let mut u = 0u32;
    let mut a_prime = a;
    while a_prime % p == 0 {
        a_prime /= p;
        u += 1;
    }
    Ok(CuspPair { a, b, p, u, a_prime, e })
}

impl CuspPair {
    pub fn new(a: u64, b: u64, p: u64, e: u32) -> Result<Self> {
        normalize_orientation(a, b, p, e)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// p-adic valuation u of a (a = p^u a').
    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn a_prime(&self) -> u64 {
        self.a_prime
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Number of pairs (i, j) with i, j >= 1 and a*i + b*j = m.
    pub fn ell(&self, m: u64) -> u64 {
        let mut count = 0;
        let mut i = 1;
        while self.a * i + self.b <= m {
            let rest = m - self.a * i;
            if rest % self.b == 0 {
                count += 1;
            }
            i += 1;
        }
        count
    }

    /// Membership in the exponent monoid of <t^a, t^b> (including 0).
    pub fn semigroup_member(&self, n: u64) -> bool {
        let mut i = 0;
        while self.a * i <= n {
            if (n - self.a * i) % self.b == 0 {
                return true;
            }
            i += 1;
        }
        false
    }

    /// Number of gaps, counted by enumeration. Classically (a-1)(b-1)/2.
    pub fn gap_count(&self) -> u64 {
        // all gaps lie below the Frobenius number ab - a - b
        (1..self.a * self.b)
            .filter(|&n| !self.semigroup_member(n))
            .count() as u64
    }

    /// S(a, b, r) = { m >= 1 : ell(a,b,m) <= r }.
    ///
    /// ell is nondecreasing along residue classes mod ab (adding (b, a) to a
    /// solution of m gives one of m + ab), so the scan stops once ab
    /// consecutive values fail. Every member must also sit below the crude
    /// bound ab(r+2), which is checked as it is produced.
    pub fn truncation_set(&self, r: u32) -> Result<TruncationSet> {
        check_level(r)?;
        let ab = self.a * self.b;
        let bound = ab * (u64::from(r) + 2);
        let mut members = Vec::new();
        let mut misses = 0u64;
        let mut m = 1u64;
        while misses < ab {
            if self.ell(m) <= u64::from(r) {
                if m > bound {
                    return Err(Error::integrity(format!(
                        "member {m} exceeds the termination bound {bound}"
                    )));
                }
                members.push(m);
                misses = 0;
            } else {
                misses += 1;
            }
            m += 1;
        }
        TruncationSet::new(members)
    }

    /// The unique s >= 1 with ell(a,b,p^{s-1} m') <= r < ell(a,b,p^s m'),
    /// and 0 when no such s exists (i.e. when ell(a,b,m') > r already).
    pub fn s_exponent(&self, r: u32, m_prime: u64) -> Result<u32> {
        check_level(r)?;
        self.check_p_free(m_prime)?;
        if self.ell(m_prime) > u64::from(r) {
            return Ok(0);
        }
        let mut s = 1u32;
        let mut weight = m_prime
            .checked_mul(self.p)
            .ok_or_else(|| Error::resource("weight overflow in s_exponent"))?;
        loop {
            if self.ell(weight) > u64::from(r) {
                return Ok(s);
            }
            s += 1;
            weight = weight
                .checked_mul(self.p)
                .ok_or_else(|| Error::resource("weight overflow in s_exponent"))?;
        }
    }

    /// The case formula: h = s if neither a' nor b divides m',
    /// h = min(s, u) if a' but not b divides m', and h = 0 if b divides m'.
    pub fn h_exponent(&self, r: u32, m_prime: u64) -> Result<u32> {
        let s = self.s_exponent(r, m_prime)?;
        Ok(if m_prime % self.b == 0 {
            0
        } else if m_prime % self.a_prime == 0 {
            s.min(self.u)
        } else {
            s
        })
    }

    /// (2r+1)(a-1)(b-1)/2, always an integer since (a-1)(b-1) is even.
    pub fn sylvester_length(&self, r: u32) -> u64 {
        let prod = (2 * u64::from(r) + 1) * (self.a - 1) * (self.b - 1);
        assert!(prod % 2 == 0, "(a-1)(b-1) must be even for coprime a, b");
        prod / 2
    }

    /// All p-free m' with h > 0, together with the total length. Support is
    /// bounded by S(a,b,r): h(m') > 0 forces ell(a,b,m') <= r.
    pub fn p_typical_profile(&self, r: u32) -> Result<PTypicalProfile> {
        let set = self.truncation_set(r)?;
        let mut entries = BTreeMap::new();
        let mut total = 0u64;
        for &m in set.members() {
            if m % self.p == 0 {
                continue;
            }
            let h = self.h_exponent(r, m)?;
            if h > 0 {
                entries.insert(m, h);
                total += u64::from(h);
            }
        }
        Ok(PTypicalProfile {
            r,
            entries,
            total_length: total,
        })
    }

    fn check_p_free(&self, m_prime: u64) -> Result<()> {
        if m_prime == 0 || m_prime % self.p == 0 {
            Err(Error::invalid(format!(
                "m'={m_prime} must be positive and not divisible by p={}",
                self.p
            )))
        } else {
            Ok(())
        }
    }
}

fn check_level(r: u32) -> Result<()> {
    if r > MAX_TRUNCATION_LEVEL {
        Err(Error::invalid(format!(
            "truncation level r={r} exceeds the enforced limit {MAX_TRUNCATION_LEVEL}"
        )))
    } else {
        Ok(())
    }
}

/// The p-typical decomposition data: m' -> h(a,b,r,p,m') over its support,
/// with total length equal to the Sylvester length (enforced by tests).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTypicalProfile {
    r: u32,
    entries: BTreeMap<u64, u32>,
    total_length: u64,
}

impl PTypicalProfile {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn entries(&self) -> &BTreeMap<u64, u32> {
        &self.entries
    }

    pub fn total_length(&self) -> u64 {
        self.total_length
    }
}
