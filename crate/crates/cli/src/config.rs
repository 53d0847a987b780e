//! Run configuration: defaults, flat JSON config file, flag overrides.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use paw_core::warp::WarpConfig;
use serde::{Deserialize, Serialize};

/// Source of the region map driving the warp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMode {
    /// Binarized segmentation mask image.
    Segmentation,
    /// Filled convex hull of the landmark points.
    Landmark,
    /// Pixelwise OR of the segmentation and landmark maps.
    Union,
    /// Pixelwise AND of the segmentation and landmark maps.
    Intersection,
    /// No region map: plain bilinear resize, no warp.
    None,
}

impl MapMode {
    pub fn name(self) -> &'static str {
        match self {
            MapMode::Segmentation => "segmentation",
            MapMode::Landmark => "landmark",
            MapMode::Union => "union",
            MapMode::Intersection => "intersection",
            MapMode::None => "none",
        }
    }
}

/// Geometry and input settings for a run.
///
/// A config file is a flat JSON object carrying any subset of these fields;
/// command-line flags override file values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub samples: usize,
    pub anchors: usize,
    pub patch_size: usize,
    pub grid: usize,
    pub canvas: usize,
    pub threshold: u8,
    pub map_mode: MapMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            anchors: 16,
            patch_size: 28,
            grid: 4,
            canvas: 112,
            threshold: 128,
            map_mode: MapMode::Segmentation,
        }
    }
}

impl PipelineConfig {
    /// Rejects settings that violate the layout invariants.
    pub fn validate(&self) -> Result<()> {
        if self.anchors != self.grid * self.grid {
            bail!(
                "anchors ({}) must equal grid squared ({})",
                self.anchors,
                self.grid * self.grid
            );
        }
        if self.canvas != self.grid * self.patch_size {
            bail!(
                "canvas ({}) must equal grid * patch_size ({})",
                self.canvas,
                self.grid * self.patch_size
            );
        }
        if self.samples < 2 * self.anchors {
            bail!(
                "samples ({}) must be at least twice the anchor count ({})",
                self.samples,
                2 * self.anchors
            );
        }
        self.warp_config().validate()?;
        Ok(())
    }

    pub fn warp_config(&self) -> WarpConfig {
        WarpConfig {
            samples: self.samples,
            anchors: self.anchors,
            patch_size: self.patch_size,
            grid: self.grid,
        }
    }
}

/// Configuration flags shared by the pipeline commands.
#[derive(clap::Args, Clone, Debug)]
pub struct ConfigArgs {
    /// Flat JSON config file; the flags below override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Boundary samples along the hull perimeter.
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    /// Anchor count; must equal grid squared.
    #[arg(long, value_name = "N")]
    pub anchors: Option<usize>,
    /// Side of each warped patch in pixels.
    #[arg(long, value_name = "PX")]
    pub patch_size: Option<usize>,
    /// Patches per canvas row and column.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Canvas side in pixels; must equal grid * patch_size.
    #[arg(long, value_name = "PX")]
    pub canvas: Option<usize>,
    /// Binarization threshold for segmentation mask images.
    #[arg(long, value_name = "LEVEL")]
    pub threshold: Option<u8>,
    /// Region-map source for each row.
    #[arg(long, value_enum, value_name = "MODE")]
    pub map_mode: Option<MapMode>,
}

impl ConfigArgs {
    /// Loads the file when given, applies flag overrides, then validates.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config `{}`", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config `{}`", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.anchors {
            cfg.anchors = v;
        }
        if let Some(v) = self.patch_size {
            cfg.patch_size = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.canvas {
            cfg.canvas = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.map_mode {
            cfg.map_mode = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
