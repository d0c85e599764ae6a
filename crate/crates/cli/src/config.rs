//! Pipeline configuration: defaults, optional TOML file, command-line flags.
//! Later layers override earlier ones field by field.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use persistack_core::{Connectivity, FilterParams, NeighborhoodShape, ThresholdMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::StackSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceOrder {
    #[default]
    Acquisition,
    Reversed,
}

impl FromStr for SliceOrder {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acquisition" => Ok(SliceOrder::Acquisition),
            "reversed" => Ok(SliceOrder::Reversed),
            _ => Err(CliError::Config(format!(
                "slice order must be acquisition or reversed, got {s:?}"
            ))),
        }
    }
}

/// Files a run can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Artifact {
    /// `D^0` as `mask.png`.
    Mask,
    /// `barcode.json`.
    Barcode,
    /// `barcode.png`.
    BarcodePlot,
    /// `colors.png` and `colors.palette.json`.
    Colors,
    /// `report.json`.
    Report,
    /// Raw maximum projection, `projection.png`.
    Projection,
    /// Median-filtered projection, `filtered.png`.
    Filtered,
    /// Binarized projection, `thresholded.png`.
    Thresholded,
    /// Every filtration level, `level_00.png` ... `level_<m>.png`.
    Levels,
}

impl Artifact {
    pub const ALL: [Artifact; 9] = [
        Artifact::Mask,
        Artifact::Barcode,
        Artifact::BarcodePlot,
        Artifact::Colors,
        Artifact::Report,
        Artifact::Projection,
        Artifact::Filtered,
        Artifact::Thresholded,
        Artifact::Levels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Artifact::Mask => "mask",
            Artifact::Barcode => "barcode",
            Artifact::BarcodePlot => "barcode-plot",
            Artifact::Colors => "colors",
            Artifact::Report => "report",
            Artifact::Projection => "projection",
            Artifact::Filtered => "filtered",
            Artifact::Thresholded => "thresholded",
            Artifact::Levels => "levels",
        }
    }
}

impl fmt::Display for Artifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Artifact {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Artifact::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = Artifact::ALL.iter().map(|a| a.name()).collect();
            CliError::Config(format!("unknown artifact {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

pub fn parse_threshold(s: &str) -> Result<ThresholdMode> {
    if s == "huang" {
        return Ok(ThresholdMode::Huang);
    }
    s.strip_prefix("fixed:")
        .and_then(|n| n.parse().ok())
        .map(ThresholdMode::Fixed)
        .ok_or_else(|| CliError::Config(format!("threshold must be huang or fixed:<level>, got {s:?}")))
}

pub fn parse_shape(s: &str) -> Result<NeighborhoodShape> {
    match s {
        "square" => Ok(NeighborhoodShape::Square),
        "disc" => Ok(NeighborhoodShape::Disc),
        _ => Err(CliError::Config(format!("shape must be square or disc, got {s:?}"))),
    }
}

pub fn shape_name(shape: NeighborhoodShape) -> &'static str {
    match shape {
        NeighborhoodShape::Square => "square",
        NeighborhoodShape::Disc => "disc",
    }
}

pub fn threshold_name(mode: ThresholdMode) -> String {
    match mode {
        ThresholdMode::Huang => "huang".to_string(),
        ThresholdMode::Fixed(n) => format!("fixed:{n}"),
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub input: StackSource,
    pub filter: FilterParams,
    pub connectivity: Connectivity,
    pub slice_order: SliceOrder,
    pub threshold: ThresholdMode,
    pub outputs: BTreeSet<Artifact>,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    /// Default parameters for `input`, writing the default artifact set.
    pub fn new(input: StackSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input,
            filter: FilterParams::default(),
            connectivity: Connectivity::default(),
            slice_order: SliceOrder::default(),
            threshold: ThresholdMode::default(),
            outputs: default_outputs(),
            out_dir: out_dir.into(),
        }
    }
}

fn default_outputs() -> BTreeSet<Artifact> {
    [Artifact::Mask, Artifact::Barcode, Artifact::Colors, Artifact::Report].into()
}

/// One configuration source. Every field is optional; raw values are only
/// checked by [`ConfigLayer::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub input: Option<String>,
    pub radius: Option<i64>,
    pub shape: Option<String>,
    pub connectivity: Option<u32>,
    pub slice_order: Option<String>,
    pub threshold: Option<String>,
    pub emit: Option<Vec<String>>,
    pub out: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Schema {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            input: self.input.or(lower.input),
            radius: self.radius.or(lower.radius),
            shape: self.shape.or(lower.shape),
            connectivity: self.connectivity.or(lower.connectivity),
            slice_order: self.slice_order.or(lower.slice_order),
            threshold: self.threshold.or(lower.threshold),
            emit: self.emit.or(lower.emit),
            out: self.out.or(lower.out),
        }
    }

    /// Validates every field and fills defaults. Touches no files.
    pub fn resolve(self) -> Result<PipelineConfig> {
        let radius = match self.radius {
            None => FilterParams::default().radius,
            Some(r) => usize::try_from(r).map_err(|_| CliError::Config(format!("radius must be >= 0, got {r}")))?,
        };
        let shape = self.shape.as_deref().map(parse_shape).transpose()?.unwrap_or_default();
        let connectivity = match self.connectivity {
            None => Connectivity::default(),
            Some(n) => Connectivity::try_from(n).map_err(|e| CliError::Config(e.to_string()))?,
        };
        let slice_order = self
            .slice_order
            .as_deref()
            .map(str::parse)
            .transpose()?
            .unwrap_or_default();
        let threshold = self
            .threshold
            .as_deref()
            .map(parse_threshold)
            .transpose()?
            .unwrap_or_default();
        let outputs = match self.emit {
            None => default_outputs(),
            Some(names) => names
                .iter()
                .flat_map(|n| n.split(','))
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(str::parse)
                .collect::<Result<BTreeSet<_>>>()?,
        };
        if outputs.is_empty() {
            return Err(CliError::Config("no output artifact selected".into()));
        }
        let input = self.input.ok_or_else(|| CliError::Config("no input given".into()))?;
        let out_dir = self
            .out
            .ok_or_else(|| CliError::Config("no output directory given".into()))?;
        Ok(PipelineConfig {
            input: StackSource::resolve(&input)?,
            filter: FilterParams { radius, shape },
            connectivity,
            slice_order,
            threshold,
            outputs,
            out_dir,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ConfigLayer {
        ConfigLayer {
            input: Some("stack.tif".into()),
            out: Some("out".into()),
            ..Default::default()
        }
    }

    #[test]
    fn defaults() {
        let c = base().resolve().unwrap();
        assert_eq!(c.filter, FilterParams::default());
        assert_eq!(c.connectivity, Connectivity::Eight);
        assert_eq!(c.threshold, ThresholdMode::Huang);
        assert_eq!(c.slice_order, SliceOrder::Acquisition);
        assert_eq!(c.outputs, default_outputs());
    }

    #[test]
    fn precedence() {
        let file = ConfigLayer {
            radius: Some(5),
            shape: Some("disc".into()),
            ..base()
        };
        let flags = ConfigLayer {
            radius: Some(15),
            ..Default::default()
        };
        let c = flags.over(file).resolve().unwrap();
        assert_eq!(c.filter.radius, 15);
        assert_eq!(c.filter.shape, NeighborhoodShape::Disc);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |layer: ConfigLayer| assert!(matches!(layer.over(base()).resolve(), Err(CliError::Config(_))));
        bad(ConfigLayer {
            radius: Some(-1),
            ..Default::default()
        });
        bad(ConfigLayer {
            connectivity: Some(6),
            ..Default::default()
        });
        bad(ConfigLayer {
            threshold: Some("otsu".into()),
            ..Default::default()
        });
        bad(ConfigLayer {
            threshold: Some("fixed:-3".into()),
            ..Default::default()
        });
        bad(ConfigLayer {
            emit: Some(vec![]),
            ..Default::default()
        });
        bad(ConfigLayer {
            emit: Some(vec!["mask,nope".into()]),
            ..Default::default()
        });
        bad(ConfigLayer {
            slice_order: Some("random".into()),
            ..Default::default()
        });
    }

    #[test]
    fn emit_lists_split_on_commas() {
        let c = ConfigLayer {
            emit: Some(vec!["mask,barcode".into(), "levels".into()]),
            ..base()
        }
        .resolve()
        .unwrap();
        assert_eq!(c.outputs, [Artifact::Mask, Artifact::Barcode, Artifact::Levels].into());
    }

    #[test]
    fn toml_layer() {
        let layer: ConfigLayer = toml::from_str("radius = 5\nshape = \"disc\"\nemit = [\"mask\"]\n").unwrap();
        assert_eq!(layer.radius, Some(5));
        assert!(toml::from_str::<ConfigLayer>("radius = 5\ncolour = 1\n").is_err());
    }

    #[test]
    fn threshold_names_round_trip() {
        for s in ["huang", "fixed:0", "fixed:128"] {
            assert_eq!(threshold_name(parse_threshold(s).unwrap()), s);
        }
    }
}
