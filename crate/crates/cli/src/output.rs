use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use minibatch_ot::Result;
use serde_json::{json, Value};

pub const MANIFEST: &str = "manifest.json";

/// Output directory plus the list of files written so far.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    started: Instant,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Creates `name` inside the output directory and records it.
    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let file = File::create(self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let mut w = self.create(name)?;
        w.write_all(bytes)?;
        w.flush()?;
        Ok(())
    }

    /// Writes the run manifest. `config` is the resolved subcommand configuration.
    pub fn finish(
        self,
        subcommand: &str,
        config: Value,
        threads: usize,
        seeds: Value,
        results: Value,
    ) -> Result<PathBuf> {
        let manifest = json!({
            "subcommand": subcommand,
            "config": config,
            "threads": threads,
            "seeds": seeds,
            "wallclock_seconds": self.started.elapsed().as_secs_f64(),
            "files": self.files,
            "results": results,
        });
        let path = self.dir.join(MANIFEST);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
