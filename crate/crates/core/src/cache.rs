//! Content-addressed cache of counting fits.
//!
//! Entries are keyed by a SHA-256 of the variety, the chain as given, the
//! exponent, the fit options and the crate version. The cache only saves
//! time; a missing or unreadable entry is recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::flag::{Mode, RawFlagIdeal};
use crate::lattice::PolarizedToricVariety;
use crate::weight::{CountingFit, FitOptions};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

pub fn key(variety: &PolarizedToricVariety, flag: &RawFlagIdeal, r: u32, options: &FitOptions) -> String {
    let mut vertices = variety.polytope().vertices().to_vec();
    vertices.sort();
    let doc = json!({
        "version": crate::VERSION,
        "vertices": vertices,
        "chart_vertex": variety.chart_vertex(),
        "mode": match flag.mode { Mode::Chart => "chart", Mode::Cox => "cox" },
        "ideals": flag.ideals.iter().map(|i| i.exponents()).collect::<Vec<_>>(),
        "r": r,
        "options": options,
    });
    let digest = Sha256::digest(serde_json::to_vec(&doc).expect("key document serializes"));
    hex::encode(digest)
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::InvalidInput(format!("cache dir {}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<CountingFit> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Best effort: a failed write leaves the cache without the entry.
    pub fn put(&self, key: &str, fit: &CountingFit) {
        let tmp = self.dir.join(format!("{key}.tmp"));
        if fs::write(&tmp, crate::io::to_json(fit)).is_ok() {
            let _ = fs::rename(&tmp, self.path(key));
        }
    }
}
