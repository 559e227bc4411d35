use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{BasisElement, Ladder, Space};
use crate::error::{Error, Result};
use crate::leveldata::{get_level, FIXTURE_VERSION};

/// Version of the on-disk ladder format.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Ladders whose stored coefficients would exceed this many decimal digits
/// are kept in memory only.
pub const DEFAULT_PERSIST_LIMIT_DIGITS: u64 = 32 << 20;

type Key = (u64, i64, Space);

#[derive(Serialize, Deserialize)]
struct LadderFile {
    format_version: u32,
    fixture_version: u32,
    level: u64,
    weight: i64,
    space: Space,
    rel_prec: i64,
    elements: Vec<BasisElement>,
}

/// Summary of one stored ladder.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CacheEntryInfo {
    pub file: String,
    pub level: u64,
    pub weight: i64,
    pub space: Space,
    pub rel_prec: i64,
    pub elements: usize,
    pub bytes: u64,
}

/// Memoized basis ladders, optionally persisted as JSON.
///
/// Each `(N, k, space)` ladder sits behind its own lock, so different
/// ladders can be extended from different threads while requests for the
/// same ladder are serialized.
pub struct BasisCache {
    ladders: Mutex<BTreeMap<Key, Arc<Mutex<Option<Ladder>>>>>,
    dir: Option<PathBuf>,
    persist_limit: u64,
}

impl Default for BasisCache {
    fn default() -> Self {
        Self::new()
    }
}

impl BasisCache {
    /// In-memory cache.
    pub fn new() -> Self {
        BasisCache {
            ladders: Mutex::new(BTreeMap::new()),
            dir: None,
            persist_limit: DEFAULT_PERSIST_LIMIT_DIGITS,
        }
    }

    /// Cache backed by `dir`; stored ladders are loaded on first use.
    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(BasisCache {
            dir: Some(dir),
            ..Self::new()
        })
    }

    pub fn with_persist_limit(mut self, digits: u64) -> Self {
        self.persist_limit = digits;
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn slot(&self, key: Key) -> Arc<Mutex<Option<Ladder>>> {
        let mut map = self.ladders.lock().expect("cache lock poisoned");
        map.entry(key).or_default().clone()
    }

    /// `f_{k,m}^(N)` (space `M`) or `g_{k,m}^(N)` (space `S`) known at
    /// least below `q^prec`.
    pub fn element(&self, level: i64, weight: i64, space: Space, m: i64, prec: i64) -> Result<Arc<BasisElement>> {
        let data = get_level(level)?;
        if weight % 2 != 0 {
            return Err(Error::OddWeight(weight));
        }
        let slot = self.slot((data.level, weight, space));
        let mut guard = slot.lock().expect("ladder lock poisoned");
        if guard.is_none() {
            *guard = self.load(data.level, weight, space);
        }
        let needed = m + prec;
        let rebuild = match guard.as_ref() {
            None => Some(needed),
            Some(l) if l.rel_prec() < needed => Some(needed.max(l.rel_prec() + l.rel_prec() / 2)),
            Some(_) => None,
        };
        if let Some(rel) = rebuild {
            *guard = Some(Ladder::new(data, weight, space, rel)?);
        }
        guard.as_mut().expect("ladder present").element(m)
    }

    /// Makes sure the ladder can serve indices up to `m_max` below `q^prec`
    /// without rebuilding, and builds those elements.
    pub fn reserve(&self, level: i64, weight: i64, space: Space, m_max: i64, prec: i64) -> Result<()> {
        self.element(level, weight, space, m_max, prec).map(|_| ())
    }

    pub fn f(&self, level: i64, weight: i64, m: i64, prec: i64) -> Result<Arc<BasisElement>> {
        self.element(level, weight, Space::M, m, prec)
    }

    pub fn g(&self, level: i64, weight: i64, m: i64, prec: i64) -> Result<Arc<BasisElement>> {
        self.element(level, weight, Space::S, m, prec)
    }

    /// `a_k^(N)(m, n)`: coefficient of `q^n` in `f_{k,m}^(N)`.
    pub fn a_coeff(&self, level: i64, weight: i64, m: i64, n: i64) -> Result<BigInt> {
        self.f(level, weight, m, n + 1)?.coeff(n)
    }

    /// `b_k^(N)(m, n)`: coefficient of `q^n` in `g_{k,m}^(N)`.
    pub fn b_coeff(&self, level: i64, weight: i64, m: i64, n: i64) -> Result<BigInt> {
        self.g(level, weight, m, n + 1)?.coeff(n)
    }

    fn file_name(level: u64, weight: i64, space: Space) -> String {
        format!("basis-N{level}-k{weight}-{space}.json")
    }

    fn load(&self, level: u64, weight: i64, space: Space) -> Option<Ladder> {
        let dir = self.dir.as_ref()?;
        let path = dir.join(Self::file_name(level, weight, space));
        load_ladder(&path).ok().flatten()
    }

    /// Writes every ladder within the size limit to the cache directory.
    /// Returns the number of files written.
    pub fn persist(&self) -> Result<usize> {
        let Some(dir) = &self.dir else { return Ok(0) };
        let slots: Vec<(Key, Arc<Mutex<Option<Ladder>>>)> = {
            let map = self.ladders.lock().expect("cache lock poisoned");
            map.iter().map(|(k, v)| (*k, v.clone())).collect()
        };
        let mut written = 0;
        for ((level, weight, space), slot) in slots {
            let guard = slot.lock().expect("ladder lock poisoned");
            let Some(ladder) = guard.as_ref() else { continue };
            let digits: u64 = ladder
                .elements()
                .iter()
                .map(|e| e.expansion.numerators().iter().map(|c| c.bits() * 30103 / 100000 + 2).sum::<u64>())
                .sum();
            if digits > self.persist_limit {
                continue;
            }
            let path = dir.join(Self::file_name(level, weight, space));
            if let Ok(Some(existing)) = load_ladder(&path) {
                if existing.rel_prec() == ladder.rel_prec() && existing.top_index() >= ladder.top_index() {
                    continue;
                }
            }
            let file = LadderFile {
                format_version: CACHE_FORMAT_VERSION,
                fixture_version: FIXTURE_VERSION,
                level,
                weight,
                space,
                rel_prec: ladder.rel_prec(),
                elements: ladder.elements().iter().map(|e| (**e).clone()).collect(),
            };
            let text = serde_json::to_string(&file)?;
            let tmp = path.with_extension("json.tmp");
            fs::write(&tmp, text)?;
            fs::rename(&tmp, &path)?;
            written += 1;
        }
        Ok(written)
    }
}

/// Reads one stored ladder. `Ok(None)` for files of another format or
/// fixture version.
pub(crate) fn load_ladder(path: &Path) -> Result<Option<Ladder>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let file: LadderFile = serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    if file.format_version != CACHE_FORMAT_VERSION || file.fixture_version != FIXTURE_VERSION {
        return Ok(None);
    }
    let data = get_level(file.level as i64)?;
    Ladder::from_elements(data, file.weight, file.space, file.rel_prec, file.elements).map(Some)
}

/// Lists the stored ladders in `dir`, sorted by file name.
pub fn cache_info(dir: &Path) -> Result<Vec<CacheEntryInfo>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    let mut names: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_cache_file(p))
        .collect();
    names.sort();
    for path in names {
        let bytes = fs::metadata(&path)?.len();
        let text = fs::read_to_string(&path)?;
        let file: LadderFile = serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        out.push(CacheEntryInfo {
            file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            level: file.level,
            weight: file.weight,
            space: file.space,
            rel_prec: file.rel_prec,
            elements: file.elements.len(),
            bytes,
        });
    }
    Ok(out)
}

/// Removes the stored ladders in `dir`; returns how many were removed.
pub fn cache_clear(dir: &Path) -> Result<usize> {
    if !dir.exists() {
        return Ok(0);
    }
    let mut n = 0;
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if is_cache_file(&path) {
            fs::remove_file(&path)?;
            n += 1;
        }
    }
    Ok(n)
}

fn is_cache_file(p: &Path) -> bool {
    p.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("basis-N") && n.ends_with(".json"))
}
