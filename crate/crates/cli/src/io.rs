//! File helpers shared by the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use obbassign::dataio::{parse_dota, Annotation};

/// Expands directories to their `*.txt` files; the result is sorted.
pub fn collect_txt(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            for entry in std::fs::read_dir(p).with_context(|| format!("listing {}", p.display()))? {
                let path = entry?.path();
                if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
                    out.push(path);
                }
            }
        } else {
            out.push(p.clone());
        }
    }
    out.sort();
    Ok(out)
}

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dota(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Writes to `out`, or standard output when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Patch identifiers follow the DOTA devkit: `{image}__{rate}__{x0}___{y0}`.
pub fn patch_id(image: &str, x0: u32, y0: u32) -> String {
    format!("{image}__1__{x0}___{y0}")
}

/// Splits a patch identifier into `(image, rate, x0, y0)`. Identifiers that
/// do not follow the pattern are whole images.
pub fn split_patch_id(id: &str) -> (String, f64, f64, f64) {
    let parsed = (|| {
        let (rest, y) = id.rsplit_once("___")?;
        let (rest, x) = rest.rsplit_once("__")?;
        let (image, rate) = rest.rsplit_once("__")?;
        let rate: f64 = rate.parse().ok().filter(|r: &f64| *r > 0.0 && r.is_finite())?;
        Some((image.to_string(), rate, x.parse().ok()?, y.parse().ok()?))
    })();
    parsed.unwrap_or_else(|| (id.to_string(), 1.0, 0.0, 0.0))
}
