use std::path::{Path, PathBuf};

/// Output files of one command; removed again unless [`Outputs::keep`] is called.
#[derive(Default)]
pub struct Outputs {
    paths: Vec<PathBuf>,
    keep: bool,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a path before writing it.
    pub fn add(&mut self, p: &Path) -> PathBuf {
        self.paths.push(p.to_path_buf());
        p.to_path_buf()
    }

    pub fn keep(mut self) {
        self.keep = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}
