use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use obbassign::losses::{prob_iou_grad, prob_iou_loss};
use obbassign::Obb;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ConfigFile;
use crate::io;

pub const TOLERANCE: f64 = 1e-4;
const STEP: f64 = 1e-5;

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Number of random box pairs [default: 1000].
    #[arg(long)]
    pub count: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &["count", "seed", "out"];

pub struct Settings {
    pub count: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn settings(args: &GradcheckArgs) -> Result<Settings> {
    let cfg = ConfigFile::load(args.config.as_deref(), KEYS)?;
    Ok(Settings {
        count: cfg.resolve(args.count, "count", 1000)?,
        seed: cfg.resolve(args.seed, "seed", 0)?,
        out: cfg.resolve_opt(args.out.clone(), "out")?,
    })
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Obb, Obb) {
    let gt = Obb::new(
        rng.gen_range(0.0..200.0),
        rng.gen_range(0.0..200.0),
        rng.gen_range(4.0..120.0),
        rng.gen_range(4.0..120.0),
        rng.gen_range(-3.2..3.2),
    )
    .expect("finite positive box");
    let s = gt.long_edge();
    let pred = Obb::new(
        gt.cx + rng.gen_range(-0.5..0.5) * s,
        gt.cy + rng.gen_range(-0.5..0.5) * s,
        gt.w * rng.gen_range(0.5..2.0),
        gt.h * rng.gen_range(0.5..2.0),
        gt.theta + rng.gen_range(-0.8..0.8),
    )
    .expect("finite positive box");
    (pred, gt)
}

fn central_difference(pred: &Obb, gt: &Obb) -> [f64; 5] {
    let p = [pred.cx, pred.cy, pred.w, pred.h, pred.theta];
    std::array::from_fn(|k| {
        let at = |d: f64| {
            let mut q = p;
            q[k] += d;
            prob_iou_loss(&Obb::new(q[0], q[1], q[2], q[3], q[4]).expect("finite positive box"), gt)
        };
        (at(STEP) - at(-STEP)) / (2.0 * STEP)
    })
}

/// Returns the report text and whether the check passed.
pub fn run(s: &Settings) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    let mut checked = 0usize;
    while checked < s.count {
        let (pred, gt) = random_pair(&mut rng);
        let g = prob_iou_grad(&pred, &gt);
        // Near-coincident pairs sit on the square-root singularity.
        if g.degenerate || prob_iou_loss(&pred, &gt) < 1e-3 {
            skipped += 1;
            continue;
        }
        let fd = central_difference(&pred, &gt);
        for (a, b) in g.grad.iter().zip(fd) {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-6));
        }
        checked += 1;
    }
    let pass = worst <= TOLERANCE;
    let mut r = String::new();
    writeln!(r, "pairs {checked}")?;
    writeln!(r, "skipped {skipped}")?;
    writeln!(r, "seed {}", s.seed)?;
    writeln!(r, "max_rel_err {worst:.6e}")?;
    writeln!(r, "tolerance {TOLERANCE:e}")?;
    writeln!(r, "status {}", if pass { "pass" } else { "fail" })?;
    io::emit(s.out.as_deref(), &r)?;
    Ok(pass)
}
