use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::witt::poly::{ghost_poly, Side, SparsePoly};
use crate::witt::truncation::TruncationSet;

pub const DEFAULT_TABLE_CAP: usize = 24;
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Universal addition and multiplication polynomials for one truncation
/// set, solved once from the ghost equations with exact divisions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureTable {
    set: TruncationSet,
    sum: Vec<SparsePoly>,
    prod: Vec<SparsePoly>,
}

impl StructureTable {
    /// Solve degree by degree:
    ///   m * s_m = ghost_m(x) + ghost_m(y) - sum_{d|m, d<m} d * s_d^{m/d}
    /// and the same with ghost products for the multiplication family.
    /// Every division must come out exact (Witt integrality).
    pub fn build(set: &TruncationSet, cap: usize) -> Result<Self> {
        if set.len() > cap {
            return Err(Error::resource(format!(
                "truncation set has {} members, structure-table cap is {cap}",
                set.len()
            )));
        }
        let members = set.members();
        let mut sum: Vec<SparsePoly> = Vec::with_capacity(members.len());
        let mut prod: Vec<SparsePoly> = Vec::with_capacity(members.len());
        for (i, &m) in members.iter().enumerate() {
            let gx = ghost_poly(Side::X, m);
            let gy = ghost_poly(Side::Y, m);
            let mut sum_num = gx.add(&gy);
            let mut prod_num = gx.mul(&gy);
            for (j, &d) in members[..i].iter().enumerate() {
                if m % d != 0 {
                    continue;
                }
                let e = (m / d) as u32;
                let k = BigInt::from(d);
                sum_num = sum_num.sub(&sum[j].pow(e).scale(&k));
                prod_num = prod_num.sub(&prod[j].pow(e).scale(&k));
            }
            sum.push(sum_num.div_exact(m)?);
            prod.push(prod_num.div_exact(m)?);
        }
        Ok(StructureTable {
            set: set.clone(),
            sum,
            prod,
        })
    }

    pub fn set(&self) -> &TruncationSet {
        &self.set
    }

    pub fn sum_poly(&self, idx: usize) -> &SparsePoly {
        &self.sum[idx]
    }

    pub fn prod_poly(&self, idx: usize) -> &SparsePoly {
        &self.prod[idx]
    }

    pub fn sum_polys(&self) -> &[SparsePoly] {
        &self.sum
    }

    pub fn prod_polys(&self) -> &[SparsePoly] {
        &self.prod
    }
}

// --- disk format ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermFile {
    c: String,
    /// (side "x"|"y", divisor, exponent), all decimal strings
    v: Vec<(String, String, String)>,
}

#[derive(Serialize, Deserialize)]
struct PolyFile {
    m: String,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    version: u32,
    set: Vec<String>,
    sum: Vec<PolyFile>,
    prod: Vec<PolyFile>,
}

fn poly_to_file(m: u64, p: &SparsePoly) -> PolyFile {
    PolyFile {
        m: m.to_string(),
        terms: p
            .terms()
            .map(|(mono, c)| TermFile {
                c: c.to_string(),
                v: mono
                    .0
                    .iter()
                    .map(|&((side, d), e)| {
                        (
                            match side {
                                Side::X => "x".to_string(),
                                Side::Y => "y".to_string(),
                            },
                            d.to_string(),
                            e.to_string(),
                        )
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn poly_from_file(f: &PolyFile) -> Result<SparsePoly> {
    let mut raw = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        let c: BigInt = t
            .c
            .parse()
            .map_err(|_| Error::Cache(format!("bad coefficient {:?}", t.c)))?;
        let mut mono = Vec::with_capacity(t.v.len());
        for (s, d, e) in &t.v {
            let side = match s.as_str() {
                "x" => Side::X,
                "y" => Side::Y,
                _ => return Err(Error::Cache(format!("bad side {s:?}"))),
            };
            let d: u64 = d.parse().map_err(|_| Error::Cache("bad divisor".into()))?;
            let e: u32 = e.parse().map_err(|_| Error::Cache("bad exponent".into()))?;
            mono.push(((side, d), e));
        }
        raw.push((mono, c));
    }
    Ok(SparsePoly::from_terms(raw))
}

pub fn serialize_table(table: &StructureTable) -> String {
    let members = table.set.members();
    let file = TableFile {
        version: CACHE_FORMAT_VERSION,
        set: members.iter().map(|m| m.to_string()).collect(),
        sum: members
            .iter()
            .zip(table.sum.iter())
            .map(|(&m, p)| poly_to_file(m, p))
            .collect(),
        prod: members
            .iter()
            .zip(table.prod.iter())
            .map(|(&m, p)| poly_to_file(m, p))
            .collect(),
    };
    serde_json::to_string(&file).expect("table serialization cannot fail")
}

pub fn deserialize_table(data: &str) -> Result<StructureTable> {
    let file: TableFile =
        serde_json::from_str(data).map_err(|e| Error::Cache(format!("parse: {e}")))?;
    if file.version != CACHE_FORMAT_VERSION {
        return Err(Error::Cache(format!(
            "cache format version {} but this build reads {CACHE_FORMAT_VERSION}",
            file.version
        )));
    }
    let members: Vec<u64> = file
        .set
        .iter()
        .map(|s| s.parse().map_err(|_| Error::Cache("bad member".into())))
        .collect::<Result<_>>()?;
    let set = TruncationSet::new(members)?;
    let sum = file.sum.iter().map(poly_from_file).collect::<Result<_>>()?;
    let prod = file.prod.iter().map(poly_from_file).collect::<Result<_>>()?;
    Ok(StructureTable { set, sum, prod })
}

// --- store ------------------------------------------------------------

/// Process-wide table store: in-memory map plus an optional disk cache.
/// Disk writes go through a temp file and an atomic rename so concurrent
/// readers never observe a partial file.
pub struct TableStore {
    dir: Option<PathBuf>,
    cap: usize,
    mem: Mutex<HashMap<String, Arc<StructureTable>>>,
}

impl TableStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        TableStore {
            dir,
            cap: DEFAULT_TABLE_CAP,
            mem: Mutex::new(HashMap::new()),
        }
    }

    pub fn in_memory() -> Self {
        Self::new(None)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// CUSPK_CACHE, else the platform user cache directory, else none.
    pub fn default_dir() -> Option<PathBuf> {
        if let Ok(dir) = std::env::var("CUSPK_CACHE") {
            if !dir.is_empty() {
                return Some(PathBuf::from(dir));
            }
        }
        if let Ok(dir) = std::env::var("XDG_CACHE_HOME") {
            if !dir.is_empty() {
                return Some(Path::new(&dir).join("cuspk"));
            }
        }
        std::env::var("HOME")
            .ok()
            .filter(|h| !h.is_empty())
            .map(|h| Path::new(&h).join(".cache").join("cuspk"))
    }

    pub fn cache_path(&self, set: &TruncationSet) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("witt-table-v{CACHE_FORMAT_VERSION}-{}.json", set.key())))
    }

    pub fn get_or_build(&self, set: &TruncationSet) -> Result<Arc<StructureTable>> {
        let key = set.key();
        if let Some(t) = self.mem.lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        if let Some(path) = self.cache_path(set) {
            if let Ok(data) = std::fs::read_to_string(&path) {
                match deserialize_table(&data) {
                    Ok(table) if table.set == *set => {
                        let arc = Arc::new(table);
                        self.mem.lock().unwrap().insert(key, Arc::clone(&arc));
                        return Ok(arc);
                    }
                    Ok(_) => {
                        return Err(Error::Cache(format!(
                            "cache file {} holds a different truncation set",
                            path.display()
                        )))
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        let table = StructureTable::build(set, self.cap)?;
        if let Some(path) = self.cache_path(set) {
            write_atomic(&path, &serialize_table(&table))?;
        }
        let arc = Arc::new(table);
        self.mem.lock().unwrap().insert(key, Arc::clone(&arc));
        Ok(arc)
    }
}

fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| Error::Cache("cache path has no parent".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("mkdir {}: {e}", dir.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().unwrap().to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, data).map_err(|e| Error::Cache(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::Cache(format!("rename to {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(members: &[u64]) -> TruncationSet {
        TruncationSet::new(members.to_vec()).unwrap()
    }

    fn assign(vals: &[(Side, u64, i64)]) -> impl Fn(Side, u64) -> BigInt + '_ {
        move |side, d| {
            vals.iter()
                .find(|&&(s, dd, _)| s == side && dd == d)
                .map(|&(_, _, v)| BigInt::from(v))
                .unwrap_or_default()
        }
    }

    #[test]
    fn table_singleton() {
        let t = StructureTable::build(&set(&[1]), 24).unwrap();
        // s_1 = x_1 + y_1, p_1 = x_1 * y_1
        let s1 = t.sum_poly(0);
        let v = s1.eval(&assign(&[(Side::X, 1, 3), (Side::Y, 1, 4)]));
        assert_eq!(v, BigInt::from(7));
        let p1 = t.prod_poly(0);
        let v = p1.eval(&assign(&[(Side::X, 1, 3), (Side::Y, 1, 4)]));
        assert_eq!(v, BigInt::from(12));
    }

    #[test]
    fn sum_poly_2_classical_form() {
        let t = StructureTable::build(&set(&[1, 2]), 24).unwrap();
        // s_2 = x_2 + y_2 - x_1 y_1
        let s2 = t.sum_poly(1);
        assert_eq!(s2.num_terms(), 3);
        let v = s2.eval(&assign(&[
            (Side::X, 1, 1),
            (Side::X, 2, 0),
            (Side::Y, 1, 1),
            (Side::Y, 2, 0),
        ]));
        assert_eq!(v, BigInt::from(-1));
    }

    #[test]
    fn prod_poly_p_classical_form() {
        for p in [2u64, 3, 5] {
            let t = StructureTable::build(&set(&[1, p]), 24).unwrap();
            // p_p = x_1^p y_p + x_p y_1^p + p x_p y_p
            let pp = t.prod_poly(1);
            assert_eq!(pp.num_terms(), 3, "p={p}");
            let v = pp.eval(&assign(&[
                (Side::X, 1, 1),
                (Side::X, p, 1),
                (Side::Y, 1, 1),
                (Side::Y, p, 1),
            ]));
            assert_eq!(v, BigInt::from(2 + p as i64), "p={p}");
        }
    }

    #[test]
    fn cap_enforced() {
        let s = set(&[1, 2, 3, 4, 6]);
        assert!(StructureTable::build(&s, 3).is_err());
    }

    #[test]
    fn cache_roundtrip_bit_for_bit() {
        let s = set(&[1, 2, 3, 4, 6]);
        let t = StructureTable::build(&s, 24).unwrap();
        let data = serialize_table(&t);
        let back = deserialize_table(&data).unwrap();
        assert_eq!(back, t);
        assert_eq!(serialize_table(&back), data);
    }

    #[test]
    fn store_uses_disk() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::new(Some(dir.path().to_path_buf()));
        let s = set(&[1, 2, 4]);
        let t1 = store.get_or_build(&s).unwrap();
        let path = store.cache_path(&s).unwrap();
        assert!(path.exists());
        // a fresh store must read the same table back from disk
        let store2 = TableStore::new(Some(dir.path().to_path_buf()));
        let t2 = store2.get_or_build(&s).unwrap();
        assert_eq!(*t1, *t2);
    }

    #[test]
    fn store_rejects_bad_version() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::new(Some(dir.path().to_path_buf()));
        let s = set(&[1]);
        store.get_or_build(&s).unwrap();
        let path = store.cache_path(&s).unwrap();
        let data = std::fs::read_to_string(&path).unwrap();
        let corrupted = data.replace("\"version\":1", "\"version\":999");
        std::fs::write(&path, corrupted).unwrap();
        let store2 = TableStore::new(Some(dir.path().to_path_buf()));
        assert!(matches!(store2.get_or_build(&s), Err(Error::Cache(_))));
    }

}
