//! Access to source text behind physical locations.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::loc::SourceLocation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("source unavailable for {location}: {reason}")]
pub struct SourceUnavailable {
    pub location: SourceLocation,
    pub reason: String,
}

/// Fetches file text for physical locations. Implementations must allow
/// concurrent reads.
pub trait SourceResolver: Sync {
    /// Full text of the file identified by `file` (any region is ignored).
    fn read(&self, file: &SourceLocation) -> Result<String, SourceUnavailable>;

    /// Every `.java` file below the directory `root`, as physical locations
    /// sharing `root`'s scheme and authority.
    fn list_java_files(&self, root: &SourceLocation) -> Result<Vec<SourceLocation>, SourceUnavailable>;
}

/// Maps `file` locations onto the file system directly, `project://<name>/p`
/// onto `<project_root>/p` and `cwd:///p` onto the working directory.
#[derive(Debug, Clone, Default)]
pub struct FsResolver {
    project_root: Option<PathBuf>,
}

impl FsResolver {
    pub fn new(project_root: Option<PathBuf>) -> Self {
        FsResolver { project_root }
    }

    pub fn to_path(&self, loc: &SourceLocation) -> Result<PathBuf, SourceUnavailable> {
        let fail = |reason: &str| SourceUnavailable {
            location: loc.clone(),
            reason: reason.to_string(),
        };
        let mut base = match loc.scheme() {
            "file" => PathBuf::from("/"),
            "project" => self
                .project_root
                .clone()
                .ok_or_else(|| fail("no source root given for project locations"))?,
            "cwd" => std::env::current_dir().map_err(|e| fail(&e.to_string()))?,
            other => return Err(fail(&format!("scheme `{other}` is not resolvable"))),
        };
        for seg in loc.path() {
            if seg == ".." {
                return Err(fail("`..` segments are not resolved"));
            }
            if !seg.is_empty() {
                base.push(seg);
            }
        }
        Ok(base)
    }
}

/// Physical location for `path` relative to `root`.
pub fn child_location(root: &SourceLocation, relative: &Path) -> SourceLocation {
    let mut loc = root.without_region();
    // A trailing empty segment (`|file:///dir/|`) is a directory marker.
    if loc.path().last().is_some_and(|s| s.is_empty()) {
        let trimmed: Vec<String> = loc.path()[..loc.path().len() - 1].to_vec();
        loc = SourceLocation::new(loc.scheme(), loc.authority(), trimmed).expect("valid scheme");
    }
    for comp in relative.components() {
        loc = loc.child(&comp.as_os_str().to_string_lossy());
    }
    loc
}

impl SourceResolver for FsResolver {
    fn read(&self, file: &SourceLocation) -> Result<String, SourceUnavailable> {
        let path = self.to_path(file)?;
        fs::read_to_string(&path).map_err(|e| SourceUnavailable {
            location: file.without_region(),
            reason: format!("{}: {e}", path.display()),
        })
    }

    fn list_java_files(&self, root: &SourceLocation) -> Result<Vec<SourceLocation>, SourceUnavailable> {
        let dir = self.to_path(root)?;
        let fail = |e: std::io::Error| SourceUnavailable {
            location: root.clone(),
            reason: format!("{}: {e}", dir.display()),
        };
        if !dir.is_dir() {
            return Err(SourceUnavailable {
                location: root.clone(),
                reason: format!("{} is not a directory", dir.display()),
            });
        }
        let mut found = Vec::new();
        let mut stack = vec![dir.clone()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).map_err(fail)? {
                let path = entry.map_err(fail)?.path();
                if path.is_dir() {
                    stack.push(path);
                } else if path.extension().is_some_and(|e| e == "java") {
                    let rel = path.strip_prefix(&dir).expect("below root");
                    found.push(child_location(root, rel));
                }
            }
        }
        found.sort_by_key(|l| l.to_string());
        Ok(found)
    }
}

/// In-memory sources keyed by printed file location (without region).
#[derive(Debug, Clone, Default)]
pub struct MemoryResolver {
    files: std::collections::BTreeMap<String, (SourceLocation, String)>,
}

impl MemoryResolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, file: SourceLocation, text: impl Into<String>) {
        let file = file.without_region();
        self.files.insert(file.to_string(), (file, text.into()));
    }
}

impl SourceResolver for MemoryResolver {
    fn read(&self, file: &SourceLocation) -> Result<String, SourceUnavailable> {
        self.files
            .get(&file.without_region().to_string())
            .map(|(_, t)| t.clone())
            .ok_or_else(|| SourceUnavailable {
                location: file.without_region(),
                reason: "not in memory".into(),
            })
    }

    fn list_java_files(&self, root: &SourceLocation) -> Result<Vec<SourceLocation>, SourceUnavailable> {
        let prefix: Vec<String> = root.path().iter().filter(|s| !s.is_empty()).cloned().collect();
        let found: Vec<SourceLocation> = self
            .files
            .values()
            .map(|(l, _)| l)
            .filter(|l| {
                l.scheme() == root.scheme()
                    && l.authority() == root.authority()
                    && l.path().starts_with(&prefix)
                    && l.path().last().is_some_and(|s| s.ends_with(".java"))
            })
            .cloned()
            .collect();
        if found.is_empty() {
            return Err(SourceUnavailable {
                location: root.clone(),
                reason: "no sources below this root".into(),
            });
        }
        Ok(found)
    }
}
