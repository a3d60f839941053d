//! Bundled benchmark instances and name/path resolution.
//!
//! The 40 Lawrence instances ship embedded in the binary so benchmarks are
//! reproducible without any network or filesystem setup. [`resolve`] accepts,
//! in order of precedence: an existing file path, a file under the directory
//! named by [`DATA_DIR_ENV`], or a bundled instance name such as `LA05`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

use crate::instance::{JobShopInstance, ParseError};

/// Environment variable naming a directory searched for instance files
/// before falling back to the bundled set.
pub const DATA_DIR_ENV: &str = "FORMIC_DATA_DIR";

const LA_SOURCES: [(&str, &str); 40] = [
    ("LA01", include_str!("../data/la01.txt")),
    ("LA02", include_str!("../data/la02.txt")),
    ("LA03", include_str!("../data/la03.txt")),
    ("LA04", include_str!("../data/la04.txt")),
    ("LA05", include_str!("../data/la05.txt")),
    ("LA06", include_str!("../data/la06.txt")),
    ("LA07", include_str!("../data/la07.txt")),
    ("LA08", include_str!("../data/la08.txt")),
    ("LA09", include_str!("../data/la09.txt")),
    ("LA10", include_str!("../data/la10.txt")),
    ("LA11", include_str!("../data/la11.txt")),
    ("LA12", include_str!("../data/la12.txt")),
    ("LA13", include_str!("../data/la13.txt")),
    ("LA14", include_str!("../data/la14.txt")),
    ("LA15", include_str!("../data/la15.txt")),
    ("LA16", include_str!("../data/la16.txt")),
    ("LA17", include_str!("../data/la17.txt")),
    ("LA18", include_str!("../data/la18.txt")),
    ("LA19", include_str!("../data/la19.txt")),
    ("LA20", include_str!("../data/la20.txt")),
    ("LA21", include_str!("../data/la21.txt")),
    ("LA22", include_str!("../data/la22.txt")),
    ("LA23", include_str!("../data/la23.txt")),
    ("LA24", include_str!("../data/la24.txt")),
    ("LA25", include_str!("../data/la25.txt")),
    ("LA26", include_str!("../data/la26.txt")),
    ("LA27", include_str!("../data/la27.txt")),
    ("LA28", include_str!("../data/la28.txt")),
    ("LA29", include_str!("../data/la29.txt")),
    ("LA30", include_str!("../data/la30.txt")),
    ("LA31", include_str!("../data/la31.txt")),
    ("LA32", include_str!("../data/la32.txt")),
    ("LA33", include_str!("../data/la33.txt")),
    ("LA34", include_str!("../data/la34.txt")),
    ("LA35", include_str!("../data/la35.txt")),
    ("LA36", include_str!("../data/la36.txt")),
    ("LA37", include_str!("../data/la37.txt")),
    ("LA38", include_str!("../data/la38.txt")),
    ("LA39", include_str!("../data/la39.txt")),
    ("LA40", include_str!("../data/la40.txt")),
];

const DEMO_3X3: &str = include_str!("../data/demo3x3.txt");

fn builtin_table() -> &'static HashMap<&'static str, JobShopInstance> {
    static TABLE: OnceLock<HashMap<&'static str, JobShopInstance>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Lookup keys are uppercase; the second tuple field is the display
        // name the instance carries into reports.
        LA_SOURCES
            .iter()
            .map(|(name, source)| (*name, *name, *source))
            .chain([("DEMO3X3", "demo3x3", DEMO_3X3)])
            .map(|(key, name, source)| {
                let inst = JobShopInstance::parse(source, name)
                    .unwrap_or_else(|e| panic!("bundled instance {name} is invalid: {e}"));
                (key, inst)
            })
            .collect()
    })
}

/// Names of all bundled instances: `LA01`…`LA40` plus `demo3x3`.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    LA_SOURCES
        .iter()
        .map(|(name, _)| *name)
        .chain(["DEMO3X3"])
}

/// Returns a bundled instance by name (case-insensitive).
pub fn builtin(name: &str) -> Option<JobShopInstance> {
    builtin_table()
        .get(name.to_ascii_uppercase().as_str())
        .cloned()
}

/// The 3×3 demonstration instance used in examples and tiny-scale tests.
pub fn demo_3x3() -> JobShopInstance {
    builtin("demo3x3").expect("demo fixture is bundled")
}

/// Failure to turn an instance specifier into a parsed instance.
#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("instance {0:?} is neither a readable file, a file under $FORMIC_DATA_DIR, nor a bundled name")]
    NotFound(String),
}

impl ResolveError {
    /// The file the failure concerns, when there is one.
    pub fn path(&self) -> Option<&Path> {
        match self {
            Self::Io { path, .. } | Self::Parse { path, .. } => Some(path),
            Self::NotFound(_) => None,
        }
    }
}

fn load(path: &Path) -> Result<JobShopInstance, ResolveError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned());
    let source = std::fs::read_to_string(path).map_err(|source| ResolveError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    JobShopInstance::parse(&source, name).map_err(|source| ResolveError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves an instance specifier: an existing file path first, then a file
/// under [`DATA_DIR_ENV`] (tried verbatim and as `<lowercase>.txt`), then the
/// bundled Lawrence set.
pub fn resolve(spec: &str) -> Result<JobShopInstance, ResolveError> {
    let direct = Path::new(spec);
    if direct.is_file() {
        return load(direct);
    }
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        for candidate in [spec.to_string(), format!("{}.txt", spec.to_ascii_lowercase())] {
            let path = Path::new(&dir).join(candidate);
            if path.is_file() {
                return load(&path);
            }
        }
    }
    if let Some(inst) = builtin(spec) {
        return Ok(inst);
    }
    Err(ResolveError::NotFound(spec.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::BKS_TABLE;

    #[test]
    fn all_bundled_instances_parse_with_published_sizes() {
        for record in &BKS_TABLE {
            let inst = builtin(record.name).unwrap_or_else(|| panic!("{} missing", record.name));
            assert_eq!(inst.jobs(), record.jobs, "{} job count", record.name);
            assert_eq!(
                inst.machines(),
                record.machines,
                "{} machine count",
                record.name
            );
            assert_eq!(inst.name(), record.name);
            // Best-known values can never undercut the trivial load bounds.
            assert!(
                inst.lower_bound() <= record.bks,
                "{}: lower bound {} exceeds best-known {}",
                record.name,
                inst.lower_bound(),
                record.bks
            );
        }
    }

    #[test]
    fn demo_fixture_shape() {
        let demo = demo_3x3();
        assert_eq!((demo.jobs(), demo.machines()), (3, 3));
        assert_eq!(demo.operation(0, 0).machine, 2);
    }

    #[test]
    fn resolve_precedence() {
        let dir = std::env::temp_dir().join(format!("formic-fixtures-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        // A direct file path wins.
        let path = dir.join("custom.txt");
        std::fs::write(&path, "1 1\n0 7\n").unwrap();
        let inst = resolve(path.to_str().unwrap()).unwrap();
        assert_eq!(inst.name(), "custom");
        assert_eq!(inst.operation(0, 0).duration, 7);

        // Bare names fall back to the bundled set.
        assert_eq!(resolve("la05").unwrap().name(), "LA05");
        let err = resolve("no-such-instance").unwrap_err();
        assert!(err.path().is_none());

        // Parse failures surface the offending path.
        let bad = dir.join("bad.txt");
        std::fs::write(&bad, "1 1\nnope\n").unwrap();
        let err = resolve(bad.to_str().unwrap()).unwrap_err();
        assert_eq!(err.path(), Some(bad.as_path()));

        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn resolve_honors_data_dir_env() {
        // Sole test that mutates the environment; it overrides an instance
        // name no sibling test resolves, so a concurrent lookup elsewhere can
        // only fall through to the bundled set.
        let dir = std::env::temp_dir().join(format!("formic-data-dir-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("la07.txt"), "1 1\n0 9\n").unwrap();
        std::env::set_var(DATA_DIR_ENV, &dir);
        let inst = resolve("LA07").unwrap();
        std::env::remove_var(DATA_DIR_ENV);
        // The override shadows the bundled LA07.
        assert_eq!(inst.num_operations(), 1);
        std::fs::remove_dir_all(&dir).ok();
    }
}
