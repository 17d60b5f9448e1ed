use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use obbassign::dataio::{
    clip_annotations, format_annotations, tile_plan, Annotation, DEFAULT_GAP, DEFAULT_MIN_FRACTION, DEFAULT_PATCH,
};

use crate::config::ConfigFile;
use crate::io;

#[derive(Debug, Args)]
pub struct TileArgs {
    /// Annotation files or directories of them; one image per file. Without
    /// any, only the window manifest of a single image is written.
    pub annotations: Vec<PathBuf>,
    /// Image width in pixels.
    #[arg(long)]
    pub width: Option<u32>,
    /// Image height in pixels.
    #[arg(long)]
    pub height: Option<u32>,
    /// Window side [default: 1024].
    #[arg(long)]
    pub patch: Option<u32>,
    /// Overlap between neighbouring windows [default: 512].
    #[arg(long)]
    pub gap: Option<u32>,
    /// Smallest visible area fraction for an object to be kept [default: 0.5].
    #[arg(long)]
    pub min_fraction: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &["width", "height", "patch", "gap", "min-fraction", "out"];

pub struct Settings {
    pub width: u32,
    pub height: u32,
    pub patch: u32,
    pub gap: u32,
    pub min_fraction: f64,
    pub out: PathBuf,
}

/// `Ok(Err(msg))` is a usage problem.
pub fn settings(args: &TileArgs) -> Result<std::result::Result<Settings, String>> {
    let cfg = ConfigFile::load(args.config.as_deref(), KEYS)?;
    let width = cfg.resolve_opt(args.width, "width")?;
    let height = cfg.resolve_opt(args.height, "height")?;
    let out = cfg.resolve_opt(args.out.clone(), "out")?;
    let patch = cfg.resolve(args.patch, "patch", DEFAULT_PATCH)?;
    let gap = cfg.resolve(args.gap, "gap", DEFAULT_GAP)?;
    let min_fraction = cfg.resolve(args.min_fraction, "min-fraction", DEFAULT_MIN_FRACTION)?;
    let (Some(width), Some(height), Some(out)) = (width, height, out) else {
        return Ok(Err("--width, --height and --out are required".into()));
    };
    if width == 0 || height == 0 {
        return Ok(Err("image dimensions must be positive".into()));
    }
    if patch == 0 || gap >= patch {
        return Ok(Err(format!("patch ({patch}) must be positive and larger than gap ({gap})")));
    }
    if !(0.0..=1.0).contains(&min_fraction) {
        return Ok(Err(format!("min-fraction must be in [0, 1], got {min_fraction}")));
    }
    Ok(Ok(Settings { width, height, patch, gap, min_fraction, out }))
}

pub fn run(args: &TileArgs, s: &Settings) -> Result<()> {
    let windows = tile_plan(s.width, s.height, s.patch, s.gap)?;
    let files = io::collect_txt(&args.annotations)?;
    let images: Vec<(String, Option<Vec<Annotation>>)> = if files.is_empty() {
        vec![("image".to_string(), None)]
    } else {
        files.iter().map(|f| Ok((io::stem(f), Some(io::read_annotations(f)?)))).collect::<Result<_>>()?
    };
    std::fs::create_dir_all(&s.out).with_context(|| format!("creating {}", s.out.display()))?;
    let mut manifest = String::from("patch,image,x0,y0,width,height,objects\n");
    for (image, annots) in &images {
        for w in &windows {
            let id = io::patch_id(image, w.x0, w.y0);
            let objects = match annots {
                Some(a) => {
                    let local = clip_annotations(a, w, s.min_fraction);
                    let path = s.out.join(format!("{id}.txt"));
                    std::fs::write(&path, format_annotations(&local))
                        .with_context(|| format!("writing {}", path.display()))?;
                    local.len().to_string()
                }
                None => String::new(),
            };
            writeln!(manifest, "{id},{image},{},{},{},{},{objects}", w.x0, w.y0, w.width, w.height)?;
        }
    }
    let path = s.out.join("manifest.csv");
    std::fs::write(&path, manifest).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("{} window(s) per image, {} image(s)", windows.len(), images.len());
    Ok(())
}
