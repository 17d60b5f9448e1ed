//! Command-line front end: assignment dumps, gradient checks, DOTA tiling,
//! result merging and VOC evaluation.

mod commands;
mod config;
mod io;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};

use commands::{assign, eval, gradcheck, nms, tile};

#[derive(Debug, Parser)]
#[command(name = "obbassign", version, about = "Label assignment, decoding and evaluation tools for oriented-box detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the positive cells of every pyramid level for one annotation file.
    Assign(assign::AssignArgs),
    /// Compare analytic ProbIoU gradients with finite differences.
    Gradcheck(gradcheck::GradcheckArgs),
    /// Cut annotations into overlapping windows.
    Tile(tile::TileArgs),
    /// Per-class AP and mAP of result files against annotations.
    Eval(eval::EvalArgs),
    /// Merge patch-level results into image coordinates with rotated NMS.
    Nms(nms::NmsArgs),
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Assign(a) => assign::run(a).map(|()| true),
        Command::Gradcheck(a) => gradcheck::settings(a).and_then(|s| {
            if s.count == 0 {
                usage_error("count must be at least 1");
            }
            gradcheck::run(&s)
        }),
        Command::Tile(a) => tile::settings(a).and_then(|s| match s {
            Ok(s) => tile::run(a, &s).map(|()| true),
            Err(msg) => usage_error(msg),
        }),
        Command::Eval(a) => eval::run(a).map(|()| true),
        Command::Nms(a) => nms::run(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
