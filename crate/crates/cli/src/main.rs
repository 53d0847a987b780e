//! `paw`: batch piecewise-affine ear warping and verification evaluation.

mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "paw",
    version,
    about = "Anatomy-aware piecewise-affine warping of ear images and AUC evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warp every manifest row into a stitched patch canvas.
    Warp(commands::WarpArgs),
    /// Write the combined region map for every manifest row.
    Maps(commands::MapsArgs),
    /// Score embedding pairs and report AUC with a confidence interval.
    Eval(commands::EvalArgs),
    /// Run one image through the pipeline and dump every stage.
    Inspect(commands::InspectArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Warp(args) => commands::warp(args),
        Command::Maps(args) => commands::maps(args),
        Command::Eval(args) => commands::eval(args),
        Command::Inspect(args) => commands::inspect(args),
    };
    result.unwrap_or_else(|err| {
        eprintln!("error: {err:#}");
        ExitCode::FAILURE
    })
}
