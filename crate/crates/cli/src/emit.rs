//! Writes result files through one serialized writer per output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::Result;
use crate::result::ExperimentResult;

#[derive(Debug, Serialize)]
struct ManifestEntry {
    file: String,
    kind: &'static str,
}

pub struct Emitter {
    dir: PathBuf,
    written: Mutex<Vec<ManifestEntry>>,
}

impl Emitter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Mutex::new(Vec::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name` under the output directory; concurrent callers are
    /// serialized.
    pub fn write(&self, name: &str, kind: &'static str, bytes: &[u8]) -> Result<()> {
        let mut written = self.written.lock().expect("emitter lock poisoned");
        fs::write(self.dir.join(name), bytes)?;
        written.push(ManifestEntry { file: name.to_owned(), kind });
        Ok(())
    }

    /// Tables and curves as CSV, the full result as JSON, and a manifest.
    pub fn emit_result(&self, result: &ExperimentResult) -> Result<()> {
        let stem = result.experiment;
        for t in &result.tables {
            self.write(&format!("{stem}_{}.csv", t.name), "table", &t.to_csv()?)?;
        }
        for c in &result.curves {
            self.write(&format!("{stem}_curve_{}.csv", c.name), "curve", &c.to_csv()?)?;
        }
        self.write(&format!("{stem}.json"), "result", &serde_json::to_vec_pretty(result)?)?;
        self.finish()
    }

    /// Writes `manifest.json` listing every file emitted so far.
    pub fn finish(&self) -> Result<()> {
        let written = self.written.lock().expect("emitter lock poisoned");
        let text = serde_json::to_vec_pretty(&*written)?;
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concurrent_writes_all_land_in_the_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let e = Emitter::new(dir.path()).unwrap();
        std::thread::scope(|s| {
            for i in 0..8 {
                let e = &e;
                s.spawn(move || e.write(&format!("f{i}.csv"), "curve", b"x,y\n").unwrap());
            }
        });
        e.finish().unwrap();
        let manifest: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.as_array().unwrap().len(), 8);
    }
}
