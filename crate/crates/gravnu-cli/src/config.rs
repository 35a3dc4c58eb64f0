//! Layered run configuration: built-in defaults, overridden by an
//! optional flat-JSON config file, overridden by explicit flags.

use std::path::{Path, PathBuf};

use gravnu::geometry::{ApproxMode, Direction};
use gravnu::oscillation::Flavor;
use gravnu::sweep::{Grid, Preset, SweepKind, SweepSpec, DEFAULT_STEPS};
use gravnu::sweep::{DEFAULT_DELTA_M2_EV2, DEFAULT_GM_KM, DEFAULT_THETA};
use gravnu::units::UnitsMode;

/// Which observable the subcommand computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tool {
    K3,
    Coherence,
}

impl Tool {
    pub fn as_str(self) -> &'static str {
        match self {
            Tool::K3 => "k3",
            Tool::Coherence => "coherence",
        }
    }

    fn sweep_kind(self) -> SweepKind {
        match self {
            Tool::K3 => SweepKind::K3Energy,
            Tool::Coherence => SweepKind::CoherenceBaseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// One layer of optional settings; `None` defers to the layer below.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub direction: Option<Direction>,
    pub alpha: Option<Flavor>,
    pub units: Option<UnitsMode>,
    pub approx: Option<ApproxMode>,
    pub gm: Option<f64>,
    pub r_source: Option<f64>,
    pub baseline: Option<f64>,
    pub energy: Option<f64>,
    pub energy_min: Option<f64>,
    pub energy_max: Option<f64>,
    pub baseline_min: Option<f64>,
    pub baseline_max: Option<f64>,
    pub steps: Option<usize>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    /// `over` wins wherever it is set.
    pub fn layered(self, over: Overrides) -> Overrides {
        Overrides {
            preset: over.preset.or(self.preset),
            direction: over.direction.or(self.direction),
            alpha: over.alpha.or(self.alpha),
            units: over.units.or(self.units),
            approx: over.approx.or(self.approx),
            gm: over.gm.or(self.gm),
            r_source: over.r_source.or(self.r_source),
            baseline: over.baseline.or(self.baseline),
            energy: over.energy.or(self.energy),
            energy_min: over.energy_min.or(self.energy_min),
            energy_max: over.energy_max.or(self.energy_max),
            baseline_min: over.baseline_min.or(self.baseline_min),
            baseline_max: over.baseline_max.or(self.baseline_max),
            steps: over.steps.or(self.steps),
            format: over.format.or(self.format),
        }
    }

    /// Parses a flat JSON object whose keys are the long flag names with
    /// dashes replaced by underscores.
    pub fn from_config_file(path: &Path) -> Result<Overrides, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("config {} is not valid JSON: {e}", path.display()))?;
        let object = value
            .as_object()
            .ok_or_else(|| format!("config {} must be a flat JSON object", path.display()))?;

        let mut over = Overrides::default();
        for (key, value) in object {
            let as_f64 = || {
                value
                    .as_f64()
                    .ok_or_else(|| format!("config key `{key}` must be a number"))
            };
            let as_str = || {
                value
                    .as_str()
                    .ok_or_else(|| format!("config key `{key}` must be a string"))
            };
            match key.as_str() {
                "preset" => {
                    over.preset = Some(
                        Preset::parse(as_str()?)
                            .ok_or_else(|| format!("unknown preset `{value}`"))?,
                    )
                }
                "direction" => {
                    over.direction = Some(
                        Direction::parse(as_str()?)
                            .ok_or_else(|| format!("unknown direction `{value}`"))?,
                    )
                }
                "alpha" => {
                    over.alpha = Some(
                        Flavor::parse(as_str()?)
                            .ok_or_else(|| format!("unknown alpha `{value}`"))?,
                    )
                }
                "units" => {
                    over.units = Some(
                        UnitsMode::parse(as_str()?)
                            .ok_or_else(|| format!("unknown units mode `{value}`"))?,
                    )
                }
                "approx" => {
                    over.approx = Some(
                        ApproxMode::parse(as_str()?)
                            .ok_or_else(|| format!("unknown approx mode `{value}`"))?,
                    )
                }
                "format" => {
                    over.format = Some(
                        OutputFormat::parse(as_str()?)
                            .ok_or_else(|| format!("unknown format `{value}`"))?,
                    )
                }
                "gm" => over.gm = Some(as_f64()?),
                "r_source" => over.r_source = Some(as_f64()?),
                "baseline" => over.baseline = Some(as_f64()?),
                "energy" => over.energy = Some(as_f64()?),
                "energy_min" => over.energy_min = Some(as_f64()?),
                "energy_max" => over.energy_max = Some(as_f64()?),
                "baseline_min" => over.baseline_min = Some(as_f64()?),
                "baseline_max" => over.baseline_max = Some(as_f64()?),
                "steps" => {
                    let n = as_f64()?;
                    if n.fract() != 0.0 || n < 0.0 {
                        return Err(format!(
                            "config key `steps` must be a whole number, got {n}"
                        ));
                    }
                    over.steps = Some(n as usize);
                }
                other => return Err(format!("unknown config key `{other}`")),
            }
        }
        Ok(over)
    }
}

/// Fully resolved single-evaluation / sweep configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub tool: Tool,
    pub sweep: bool,
    pub direction: Direction,
    pub alpha: Flavor,
    pub theta: f64,
    pub delta_m2: f64,
    pub units: UnitsMode,
    pub approx: ApproxMode,
    pub gm: f64,
    pub r_source: f64,
    pub baseline: f64,
    pub energy: f64,
    pub grid: Grid,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// Default source radius for each tool and direction.
fn default_r_source(tool: Tool, direction: Direction) -> f64 {
    match (tool, direction) {
        (Tool::K3, Direction::Outward) => 1.0e8,
        (Tool::K3, Direction::Inward) => 6.5e8,
        (Tool::Coherence, Direction::Outward) => 1.0e8,
        (Tool::Coherence, Direction::Inward) => 4.0e8,
    }
}

/// Default sweep grid for each tool and direction.
fn default_grid(tool: Tool, direction: Direction) -> Grid {
    match (tool, direction) {
        (Tool::K3, _) => Grid {
            min: 150.0,
            max: 500.0,
            steps: DEFAULT_STEPS,
        },
        (Tool::Coherence, Direction::Outward) => Grid {
            min: 2.0e8,
            max: 4.0e8,
            steps: DEFAULT_STEPS,
        },
        (Tool::Coherence, Direction::Inward) => Grid {
            min: 1.5e8,
            max: 3.0e8,
            steps: DEFAULT_STEPS,
        },
    }
}

/// Applies flag > config > preset > built-in default precedence.
pub fn resolve(
    tool: Tool,
    sweep: bool,
    layered: Overrides,
    out: Option<PathBuf>,
) -> Result<Resolved, String> {
    // A preset pre-fills the layer below config and flags.
    let preset_layer = match layered.preset {
        Some(preset) => {
            let spec = preset.spec();
            if spec.kind != tool.sweep_kind() {
                return Err(format!(
                    "preset `{}` belongs to the `{}` command",
                    preset.as_str(),
                    match spec.kind {
                        SweepKind::K3Energy => "k3",
                        SweepKind::CoherenceBaseline => "coherence",
                    }
                ));
            }
            Overrides {
                direction: Some(spec.direction),
                alpha: Some(spec.alpha),
                units: Some(spec.units),
                approx: Some(spec.approx),
                gm: Some(spec.gm_km),
                r_source: Some(spec.r_source_km),
                baseline: match spec.kind {
                    SweepKind::K3Energy => Some(spec.baseline_km),
                    SweepKind::CoherenceBaseline => None,
                },
                energy: match spec.kind {
                    SweepKind::K3Energy => None,
                    SweepKind::CoherenceBaseline => Some(spec.energy_tev),
                },
                energy_min: (spec.kind == SweepKind::K3Energy).then_some(spec.grid.min),
                energy_max: (spec.kind == SweepKind::K3Energy).then_some(spec.grid.max),
                baseline_min: (spec.kind == SweepKind::CoherenceBaseline).then_some(spec.grid.min),
                baseline_max: (spec.kind == SweepKind::CoherenceBaseline).then_some(spec.grid.max),
                steps: Some(spec.grid.steps),
                ..Overrides::default()
            }
        }
        None => Overrides::default(),
    };
    let merged = preset_layer.layered(layered);

    let direction = merged.direction.unwrap_or(Direction::Outward);
    let grid_default = default_grid(tool, direction);
    let (grid_min, grid_max) = match tool {
        Tool::K3 => (merged.energy_min, merged.energy_max),
        Tool::Coherence => (merged.baseline_min, merged.baseline_max),
    };
    Ok(Resolved {
        tool,
        sweep,
        direction,
        alpha: merged.alpha.unwrap_or(Flavor::Muon),
        theta: DEFAULT_THETA,
        delta_m2: DEFAULT_DELTA_M2_EV2,
        units: merged.units.unwrap_or(UnitsMode::PaperFigure),
        approx: merged.approx.unwrap_or(ApproxMode::Weak),
        gm: merged.gm.unwrap_or(DEFAULT_GM_KM),
        r_source: merged
            .r_source
            .unwrap_or_else(|| default_r_source(tool, direction)),
        baseline: merged.baseline.unwrap_or(3.0e8),
        energy: merged.energy.unwrap_or(300.0),
        grid: Grid {
            min: grid_min.unwrap_or(grid_default.min),
            max: grid_max.unwrap_or(grid_default.max),
            steps: merged.steps.unwrap_or(grid_default.steps),
        },
        format: merged.format.unwrap_or(OutputFormat::Csv),
        out,
    })
}

impl Resolved {
    /// The sweep spec this configuration describes.
    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            kind: self.tool.sweep_kind(),
            direction: self.direction,
            alpha: self.alpha,
            theta: self.theta,
            delta_m2: self.delta_m2,
            units: self.units,
            approx: self.approx,
            gm_km: self.gm,
            r_source_km: self.r_source,
            baseline_km: match self.tool {
                Tool::K3 => self.baseline,
                Tool::Coherence => 0.0,
            },
            energy_tev: match self.tool {
                Tool::K3 => 0.0,
                Tool::Coherence => self.energy,
            },
            grid: self.grid,
        }
    }

    /// Key/value echo for single evaluations, mirroring flag names.
    pub fn echo_pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs = vec![
            ("command", self.tool.as_str().to_string()),
            ("direction", self.direction.as_str().to_string()),
        ];
        if self.tool == Tool::K3 {
            pairs.push(("alpha", self.alpha.as_str().to_string()));
        }
        pairs.push(("theta", gravnu::sweep::fmt_g17(self.theta)));
        pairs.push(("delta_m2", gravnu::sweep::fmt_g17(self.delta_m2)));
        pairs.push(("units", self.units.as_str().to_string()));
        pairs.push(("approx", self.approx.as_str().to_string()));
        pairs.push(("gm", gravnu::sweep::fmt_g17(self.gm)));
        pairs.push(("r_source", gravnu::sweep::fmt_g17(self.r_source)));
        pairs.push(("baseline", gravnu::sweep::fmt_g17(self.baseline)));
        pairs.push(("energy", gravnu::sweep::fmt_g17(self.energy)));
        pairs
    }
}
