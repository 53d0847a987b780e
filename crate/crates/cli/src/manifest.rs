//! CSV manifest describing the input rows of a batch run.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const HEADER: [&str; 5] = [
    "image_id",
    "image_path",
    "seg_mask_path",
    "landmark_path",
    "subject_id",
];

/// One input row: an image plus optional map sources and subject label.
#[derive(Clone, Debug)]
pub struct ManifestRow {
    pub image_id: String,
    pub image_path: PathBuf,
    pub seg_mask_path: Option<PathBuf>,
    pub landmark_path: Option<PathBuf>,
    #[allow(dead_code)]
    pub subject_id: Option<String>,
}

/// Reads and validates a manifest; `image_id` must be unique and non-empty.
/// Relative paths are resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: String| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening manifest `{}`", path.display()))?;
    let headers = reader.headers().context("reading manifest header")?;
    if headers.iter().ne(HEADER) {
        bail!("manifest header must be `{}`", HEADER.join(","));
    }

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("manifest row {}", i + 1))?;
        let field = |k: usize| record.get(k).unwrap_or("").to_string();
        let optional = |k: usize| Some(field(k)).filter(|s| !s.is_empty());

        let image_id = field(0);
        if image_id.is_empty() {
            bail!("manifest row {}: image_id is empty", i + 1);
        }
        if !seen.insert(image_id.clone()) {
            bail!("manifest row {}: duplicate image_id `{image_id}`", i + 1);
        }
        let image_path = field(1);
        if image_path.is_empty() {
            bail!("manifest row {} ({image_id}): image_path is empty", i + 1);
        }

        rows.push(ManifestRow {
            image_id,
            image_path: resolve(image_path),
            seg_mask_path: optional(2).map(resolve),
            landmark_path: optional(3).map(resolve),
            subject_id: optional(4),
        });
    }
    if rows.is_empty() {
        bail!("manifest `{}` has no rows", path.display());
    }
    Ok(rows)
}
