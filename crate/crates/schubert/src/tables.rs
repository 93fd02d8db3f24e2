//! Dimension tables, closed-form codimension counts and the run cache.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::transpose::{classify_all_with_cap, Classification};

/// Coefficients of prod_{k=1}^{n-1} (1 + t + ... + t^k): the number of
/// permutations of S_n by inversion count, degrees 0..n(n-1)/2.
pub fn mahonian(n: usize) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for k in 1..n {
        let mut next = vec![0u64; coeffs.len() + k];
        for (d, &c) in coeffs.iter().enumerate() {
            for e in 0..=k {
                next[d + e] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Row m: number of Schubert varieties of dimension m and number of
/// distinct cone classes in that dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub n: usize,
    pub schubert: Vec<u64>,
    pub cones: Vec<u64>,
}

impl DimensionTable {
    pub fn from_classification(c: &Classification) -> Self {
        DimensionTable {
            n: c.n,
            schubert: mahonian(c.n),
            cones: c.count_by_dimension().iter().map(|&x| x as u64).collect(),
        }
    }

    pub fn total_cones(&self) -> u64 {
        self.cones.iter().sum()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .schubert
            .iter()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1)
            .max(3);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = write!(out, "dim      ");
        for m in 0..self.schubert.len() {
            let _ = write!(out, " {m:>width$}");
        }
        let _ = writeln!(out);
        let _ = write!(out, "varieties");
        for v in &self.schubert {
            let _ = write!(out, " {v:>width$}");
        }
        let _ = writeln!(out);
        let _ = write!(out, "cones    ");
        for v in &self.cones {
            let _ = write!(out, " {v:>width$}");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "total cones: {}", self.total_cones());
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("dimension,schubert_count,cone_class_count\n");
        for m in 0..self.schubert.len() {
            let _ = writeln!(out, "{m},{},{}", self.schubert[m], self.cones[m]);
        }
        out
    }
}

/// Closed form for the number of codimension-2 tangent cones.
pub fn codim2_count(n: usize) -> Result<u64> {
    if n < 4 {
        return Err(Error::IndexOutOfRange(format!("codim2_count needs n >= 4, got {n}")));
    }
    let n = n as u64;
    Ok(if n % 2 == 1 {
        2 + (n - 3) * (n + 11) / 8
    } else {
        3 + (n - 4) * (n + 14) / 8
    })
}

/// Number of codimension-2 Schubert varieties, for cross-checks.
pub fn codim2_schubert_count(n: usize) -> u64 {
    let n = n as u64;
    (n + 2) * (n - 1) / 2
}

/// (number of codimension-1 Schubert varieties, number of their cones).
pub fn codim1_report(n: usize) -> (u64, u64) {
    ((n as u64) - 1, (n as u64) / 2)
}

/// Persisted classification: canonical representatives, member lists and
/// a checksum, stable across worker counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunCache {
    pub schema_version: u32,
    pub n: usize,
    /// Classes sorted by (dimension, representative); members sorted.
    pub classes: Vec<CachedClass>,
    /// SHA-256 of the canonical payload (schema version, n, classes).
    pub checksum: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CachedClass {
    pub representative: Permutation,
    pub dimension: usize,
    pub members: Vec<Permutation>,
}

pub const CACHE_SCHEMA_VERSION: u32 = 1;

fn payload_checksum(schema_version: u32, n: usize, classes: &[CachedClass]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(schema_version.to_le_bytes());
    hasher.update((n as u64).to_le_bytes());
    for class in classes {
        for m in &class.members {
            hasher.update(m.to_string().as_bytes());
            hasher.update(b";");
        }
        hasher.update(b"|");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunCache {
    pub fn from_classification(c: &Classification) -> Self {
        let classes: Vec<CachedClass> = c
            .classes
            .iter()
            .map(|members| CachedClass {
                representative: members[0].clone(),
                dimension: members[0].length(),
                members: members.clone(),
            })
            .collect();
        let checksum = payload_checksum(CACHE_SCHEMA_VERSION, c.n, &classes);
        RunCache {
            schema_version: CACHE_SCHEMA_VERSION,
            n: c.n,
            classes,
            checksum,
        }
    }

    pub fn to_classification(&self) -> Classification {
        Classification {
            n: self.n,
            classes: self.classes.iter().map(|c| c.members.clone()).collect(),
        }
    }

    pub fn verify(&self) -> Result<()> {
        if self.schema_version != CACHE_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "cache schema {} unsupported (want {CACHE_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let expect = payload_checksum(self.schema_version, self.n, &self.classes);
        if expect != self.checksum {
            return Err(Error::Parse("cache checksum mismatch".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cache serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Parse(format!("cannot write cache {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read cache {}: {e}", path.display())))?;
        let cache: RunCache =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad cache: {e}")))?;
        cache.verify()?;
        Ok(cache)
    }
}

/// Classification for n, read from the cache file when it matches, written
/// there after a fresh run.
pub fn classification_cached(n: usize, cap: usize, cache_path: Option<&Path>) -> Result<Classification> {
    if let Some(path) = cache_path {
        if path.exists() {
            let cache = RunCache::load(path)?;
            if cache.n == n {
                return Ok(cache.to_classification());
            }
        }
    }
    let c = classify_all_with_cap(n, cap)?;
    if let Some(path) = cache_path {
        RunCache::from_classification(&c).save(path)?;
    }
    Ok(c)
}
