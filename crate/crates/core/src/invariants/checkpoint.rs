//! On-disk search state: the job plus every completed unit.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::search::{SearchJob, UnitResult};
use super::InvariantError;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub job: SearchJob,
    pub units_total: usize,
    /// Caller data, returned untouched on resume.
    pub context: serde_json::Value,
    pub done: BTreeMap<usize, UnitResult>,
}

impl Checkpoint {
    pub fn new(job: SearchJob, units_total: usize, context: serde_json::Value) -> Self {
        Checkpoint { version: CHECKPOINT_VERSION, job, units_total, context, done: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self, InvariantError> {
        let text = fs::read_to_string(path).map_err(|e| InvariantError::Checkpoint(format!("{}: {e}", path.display())))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| InvariantError::IncompatibleCheckpoint(format!("{}: {e}", path.display())))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(InvariantError::IncompatibleCheckpoint(format!(
                "{}: version {} (expected {CHECKPOINT_VERSION})",
                path.display(),
                cp.version
            )));
        }
        if cp.done.keys().any(|&k| k >= cp.units_total) {
            return Err(InvariantError::IncompatibleCheckpoint(format!("{}: unit index out of range", path.display())));
        }
        Ok(cp)
    }

    /// Writes to a sibling temporary file, then renames over `path`, so a
    /// crash leaves either the old or the new state.
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let mut f = fs::File::create(&tmp)?;
        serde_json::to_writer(&mut f, self)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::invariants::search::Predicate;

    #[test]
    fn round_trip_and_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let g = Group::metacyclic(2, 3, 2).unwrap();
        let mut cp = Checkpoint::new(SearchJob::new(&g, Predicate::ProductOneFree, 5), 21, serde_json::json!({"k": 1}));
        cp.done.insert(3, UnitResult { deepest: 2, sequences: vec![vec![1, 2]], nodes: 7, pruned: 1 });
        cp.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), cp);

        fs::write(&path, "{ not json").unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(InvariantError::IncompatibleCheckpoint(_))));

        cp.version = 99;
        cp.save(&path).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(InvariantError::IncompatibleCheckpoint(_))));
    }
}
