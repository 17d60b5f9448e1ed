use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use obbassign::assignment::{assign_levels, build_assignment, AssignConfig, GroundTruth, LevelSpec, DEFAULT_LEVELS};

use crate::config::ConfigFile;
use crate::io;

#[derive(Debug, Args)]
pub struct AssignArgs {
    /// DOTA annotation file.
    pub annotations: PathBuf,
    /// Image width in pixels [default: 1024].
    #[arg(long)]
    pub width: Option<u32>,
    /// Image height in pixels [default: 1024].
    #[arg(long)]
    pub height: Option<u32>,
    /// Pyramid levels as `stride:min:max` triples; `inf` is allowed as max.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<String>,
    /// Gaussian kernel threshold for positive cells [default: 0.23].
    #[arg(long)]
    pub c_threshold: Option<f64>,
    /// Sample from the shrunk Gaussian (default).
    #[arg(long, overrides_with = "no_shrink")]
    pub shrink: bool,
    /// Sample from the full Gaussian.
    #[arg(long, overrides_with = "shrink")]
    pub no_shrink: bool,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &["width", "height", "levels", "c-threshold", "shrink", "out"];

pub fn parse_level(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [s, lo, hi] = parts[..] else {
        bail!("level `{text}` is not `stride:min:max`");
    };
    let num = |v: &str| -> Result<f64> {
        match v.trim() {
            "inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().with_context(|| format!("level `{text}`: bad number `{t}`")),
        }
    };
    Ok((num(s)?, num(lo)?, num(hi)?))
}

pub fn run(args: &AssignArgs) -> Result<()> {
    let cfg_file = ConfigFile::load(args.config.as_deref(), KEYS)?;
    let width = cfg_file.resolve(args.width, "width", 1024u32)?;
    let height = cfg_file.resolve(args.height, "height", 1024u32)?;
    let shrink_flag = match (args.shrink, args.no_shrink) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    let defaults = AssignConfig::default();
    let cfg = AssignConfig {
        c_threshold: cfg_file.resolve(args.c_threshold, "c-threshold", defaults.c_threshold)?,
        use_shrink: cfg_file.resolve(shrink_flag, "shrink", defaults.use_shrink)?,
        ..defaults
    };
    let triples: Vec<(f64, f64, f64)> = if !args.levels.is_empty() {
        args.levels.iter().map(|l| parse_level(l)).collect::<Result<_>>()?
    } else if let Some(raw) = cfg_file.raw("levels") {
        raw.split(',').filter(|s| !s.trim().is_empty()).map(parse_level).collect::<Result<_>>()?
    } else {
        DEFAULT_LEVELS.to_vec()
    };
    let levels: Vec<LevelSpec> = triples
        .iter()
        .map(|&(s, lo, hi)| LevelSpec::covering(s, width as f64, height as f64, lo, hi))
        .collect();
    let out = cfg_file.resolve_opt(args.out.clone(), "out")?;

    let annots = io::read_annotations(&args.annotations)?;
    let mut classes: Vec<&str> = annots.iter().map(|a| a.category.as_str()).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut targets = Vec::with_capacity(annots.len());
    for (i, a) in annots.iter().enumerate() {
        let obb = a.to_obb().with_context(|| format!("object {i}"))?;
        targets.push(GroundTruth::new(obb, classes.binary_search(&a.category.as_str()).unwrap()));
    }
    let map = build_assignment(&targets, &levels, &cfg)?;

    let mut s = String::new();
    writeln!(s, "image {width} {height}")?;
    writeln!(s, "c_threshold {}", cfg.c_threshold)?;
    writeln!(s, "shrink {}", cfg.use_shrink)?;
    writeln!(s, "targets {}", targets.len())?;
    let per_target = map.positives_per_target(targets.len());
    for (i, t) in targets.iter().enumerate() {
        let names: Vec<String> = assign_levels(&t.obb, &levels, &cfg).iter().map(|&l| levels[l].name()).collect();
        let o = t.obb;
        writeln!(
            s,
            "target {i} class {} box {:.4} {:.4} {:.4} {:.4} {:.6} levels {} positives {}",
            classes[t.class_index],
            o.cx,
            o.cy,
            o.w,
            o.h,
            o.theta,
            names.join(","),
            per_target[i]
        )?;
    }
    for level in &map.levels {
        let spec = &level.spec;
        let n = level.positives().count();
        writeln!(
            s,
            "level {} stride {} grid {}x{} range {} {} positives {n}",
            spec.name(),
            spec.stride,
            spec.grid_h,
            spec.grid_w,
            spec.range_min,
            spec.range_max
        )?;
        for (r, c, p) in level.positives() {
            writeln!(s, "cell {r} {c} class {} target {} j {:.9e}", classes[p.class_index], p.target_index, p.j_value)?;
        }
    }
    writeln!(s, "positives {}", map.num_positive())?;
    let unassigned = map.unassigned_targets(targets.len());
    let list: Vec<String> = unassigned.iter().map(usize::to_string).collect();
    writeln!(s, "unassigned {} [{}]", unassigned.len(), list.join(" "))?;
    if !unassigned.is_empty() {
        eprintln!("warning: {} target(s) received no positive cell", unassigned.len());
    }
    io::emit(out.as_deref(), &s)
}
