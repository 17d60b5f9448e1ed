use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use obbassign::dataio::parse_results;
use obbassign::eval::{evaluate, EvalGroundTruth, ImageRecord, LabeledGroundTruth};
use obbassign::{ApMetric, EvalConfig};

use crate::config::ConfigFile;
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Voc07,
    Voc12,
}

impl FromStr for MetricArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl From<MetricArg> for ApMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Voc07 => ApMetric::Voc07,
            MetricArg::Voc12 => ApMetric::Voc12,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of per-class result files, `Task1_{class}.txt` or `{class}.txt`.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Directory of DOTA annotation files, one per image.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// AP definition [default: voc07].
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// IoU needed for a match [default: 0.5].
    #[arg(long)]
    pub iou_thresh: Option<f64>,
    /// CSV output path; the table is also printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &["results", "gt", "metric", "iou-thresh", "out"];

fn class_of(stem: &str) -> &str {
    stem.strip_prefix("Task1_").unwrap_or(stem)
}

pub fn run(args: &EvalArgs) -> Result<()> {
    let cfg_file = ConfigFile::load(args.config.as_deref(), KEYS)?;
    let (Some(results_dir), Some(gt_dir)) =
        (cfg_file.resolve_opt(args.results.clone(), "results")?, cfg_file.resolve_opt(args.gt.clone(), "gt")?)
    else {
        bail!("--results and --gt are required");
    };
    let defaults = EvalConfig::default();
    let metric: Option<MetricArg> = cfg_file.resolve_opt(args.metric, "metric")?;
    let cfg = EvalConfig {
        metric: metric.map_or(defaults.metric, ApMetric::from),
        iou_threshold: cfg_file.resolve(args.iou_thresh, "iou-thresh", defaults.iou_threshold)?,
        ..defaults
    };
    let out = cfg_file.resolve_opt(args.out.clone(), "out")?;

    let mut gt_by_image = BTreeMap::new();
    for f in io::collect_txt(std::slice::from_ref(&gt_dir))? {
        gt_by_image.insert(io::stem(&f), io::read_annotations(&f)?);
    }
    let mut result_files = BTreeMap::new();
    for f in io::collect_txt(std::slice::from_ref(&results_dir))? {
        let class = class_of(&io::stem(&f)).to_string();
        if let Some(prev) = result_files.insert(class.clone(), f.clone()) {
            bail!("two result files for class {class}: {} and {}", prev.display(), f.display());
        }
    }
    let classes: Vec<String> = gt_by_image
        .values()
        .flatten()
        .map(|a| a.category.clone())
        .chain(result_files.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |name: &str| classes.binary_search_by(|c| c.as_str().cmp(name)).unwrap();

    let mut images: BTreeMap<String, ImageRecord> = BTreeMap::new();
    for (image, annots) in &gt_by_image {
        let rec = images.entry(image.clone()).or_default();
        for a in annots {
            rec.ground_truth.push(LabeledGroundTruth {
                class_index: index(&a.category),
                truth: EvalGroundTruth::new(&a.quad, a.difficult),
            });
        }
    }
    let mut stray = BTreeSet::new();
    for class in &classes {
        let Some(path) = result_files.get(class) else {
            eprintln!("warning: no result file for class {class}; counting zero detections");
            continue;
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for r in parse_results(&text, index(class)).with_context(|| format!("parsing {}", path.display()))? {
            if !gt_by_image.contains_key(&r.image_id) {
                stray.insert(r.image_id.clone());
            }
            images.entry(r.image_id).or_default().detections.push(r.detection);
        }
    }
    if !stray.is_empty() {
        eprintln!("warning: {} image id(s) in results have no annotation file; their detections are false positives", stray.len());
    }

    let records: Vec<ImageRecord> = images.into_values().collect();
    let report = evaluate(&records, classes.len(), &cfg)?;
    let mut csv = String::from("class,ap,n_gt,n_det\n");
    for (name, c) in classes.iter().zip(&report.per_class) {
        writeln!(csv, "{name},{:.6},{},{}", c.ap, c.n_gt, c.n_det)?;
    }
    writeln!(csv, "mAP,{:.6},,", report.map)?;
    print!("{csv}");
    if let Some(p) = out {
        io::emit(Some(&p), &csv)?;
    }
    Ok(())
}
