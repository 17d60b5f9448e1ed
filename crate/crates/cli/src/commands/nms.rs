use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use obbassign::dataio::{format_result_line, parse_results};
use obbassign::postprocess::merge_patches;
use obbassign::{Detection, Obb, PatchOrigin};

use crate::config::ConfigFile;
use crate::io;

#[derive(Debug, Args)]
pub struct NmsArgs {
    /// Per-class result files (or directories of them) with patch-level
    /// image ids.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Suppression IoU [default: 0.1].
    #[arg(long)]
    pub iou_thresh: Option<f64>,
    /// Detections scoring below this are dropped [default: 0.1].
    #[arg(long)]
    pub score_thresh: Option<f64>,
    /// Output directory; each input keeps its file name.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &["iou-thresh", "score-thresh", "out"];

pub fn run(args: &NmsArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref(), KEYS)?;
    let iou = cfg.resolve(args.iou_thresh, "iou-thresh", 0.1)?;
    let score = cfg.resolve(args.score_thresh, "score-thresh", 0.1)?;
    let Some(out) = cfg.resolve_opt(args.out.clone(), "out")? else {
        bail!("--out is required");
    };
    for (name, v) in [("iou-thresh", iou), ("score-thresh", score)] {
        if !(0.0..=1.0).contains(&v) {
            bail!("{name} must be in [0, 1], got {v}");
        }
    }
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    for path in io::collect_txt(&args.inputs)? {
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let records = parse_results(&text, 0).with_context(|| format!("parsing {}", path.display()))?;

        // image -> patch id -> detections in patch coordinates
        let mut grouped: BTreeMap<String, BTreeMap<String, (PatchOrigin, Vec<Detection>)>> = BTreeMap::new();
        for r in records {
            let (image, rate, x0, y0) = io::split_patch_id(&r.image_id);
            let o = r.detection.obb;
            let obb = Obb { cx: o.cx / rate, cy: o.cy / rate, w: o.w / rate, h: o.h / rate, theta: o.theta };
            grouped
                .entry(image)
                .or_default()
                .entry(r.image_id)
                .or_insert_with(|| (PatchOrigin::new(x0, y0), Vec::new()))
                .1
                .push(Detection { obb, ..r.detection });
        }
        let mut lines = String::new();
        let mut kept = 0;
        for (image, patches) in &grouped {
            let per_patch: Vec<(PatchOrigin, Vec<Detection>)> = patches.values().cloned().collect();
            for d in merge_patches(&per_patch, iou, score) {
                lines.push_str(&format_result_line(&d, image));
                lines.push('\n');
                kept += 1;
            }
        }
        let target = out.join(path.file_name().expect("collected paths are files"));
        std::fs::write(&target, lines).with_context(|| format!("writing {}", target.display()))?;
        eprintln!("{}: {kept} detection(s) kept", path.display());
    }
    Ok(())
}
