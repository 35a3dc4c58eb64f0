//! Flat-vs-curved parameter sweeps emitted as tabular data.
//!
//! A sweep evaluates one observable over a grid, twice: once with the
//! requested gravitational source and once with `GM = 0` at otherwise
//! identical kinematics, so the gravitational term is the only difference
//! between the two series. Execution is sequential and input-ordered, and all
//! floats are serialized with 17 significant digits, so identical specs give
//! byte-identical output.

use crate::coherence::{coherence_mu, CoherenceScenario};
use crate::geometry::{ApproxMode, Direction, GravitySource};
use crate::lgi::{k3, LgiScenario};
use crate::oscillation::{Flavor, OscillationParams};
use crate::units::UnitsMode;
use crate::{Error, Result};

/// Which observable is swept against which independent variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// `K3` as a function of the energy at infinity (TeV).
    K3Energy,
    /// `C_mu` as a function of the proper baseline (km).
    CoherenceBaseline,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::K3Energy => "k3_energy",
            SweepKind::CoherenceBaseline => "coherence_baseline",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "k3_energy" => Some(SweepKind::K3Energy),
            "coherence_baseline" => Some(SweepKind::CoherenceBaseline),
            _ => None,
        }
    }
}

/// Uniform grid over the independent variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let grid = Grid { min, max, steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.min >= self.max {
            return Err(Error::InvalidGrid(format!(
                "min must be below max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// The `steps` grid points, strictly increasing, endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                self.min * (1.0 - t) + self.max * t
            })
            .collect()
    }

    /// Grid spacing between adjacent points.
    pub fn cell(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

/// Default grid resolution: resolves the fastest published curve with more
/// than ten points per oscillation.
pub const DEFAULT_STEPS: usize = 2000;

/// A fully resolved sweep request.
///
/// `baseline_km` is the fixed proper baseline for energy sweeps and unused
/// for baseline sweeps (the grid supplies it); `energy_tev` is the fixed
/// local energy for baseline sweeps and unused for energy sweeps. `alpha`
/// only matters for `K3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub direction: Direction,
    pub alpha: Flavor,
    pub theta: f64,
    pub delta_m2: f64,
    pub units: UnitsMode,
    pub approx: ApproxMode,
    pub gm_km: f64,
    pub r_source_km: f64,
    pub baseline_km: f64,
    pub energy_tev: f64,
    pub grid: Grid,
}

/// The four published parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
}

pub const DEFAULT_THETA: f64 = 0.59;
pub const DEFAULT_DELTA_M2_EV2: f64 = 7.92e-5;
pub const DEFAULT_GM_KM: f64 = 3.0e7;

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1b => "fig1b",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fig1a" => Some(Preset::Fig1a),
            "fig1b" => Some(Preset::Fig1b),
            "fig2a" => Some(Preset::Fig2a),
            "fig2b" => Some(Preset::Fig2b),
            _ => None,
        }
    }

    /// The resolved spec for this preset in the figure-reproduction units.
    pub fn spec(self) -> SweepSpec {
        let common = SweepSpec {
            kind: SweepKind::K3Energy,
            direction: Direction::Outward,
            alpha: Flavor::Muon,
            theta: DEFAULT_THETA,
            delta_m2: DEFAULT_DELTA_M2_EV2,
            units: UnitsMode::PaperFigure,
            approx: ApproxMode::Weak,
            gm_km: DEFAULT_GM_KM,
            r_source_km: 0.0,
            baseline_km: 0.0,
            energy_tev: 0.0,
            grid: Grid {
                min: 0.0,
                max: 1.0,
                steps: DEFAULT_STEPS,
            },
        };
        match self {
            Preset::Fig1a => SweepSpec {
                r_source_km: 1.0e8,
                baseline_km: 3.0e8,
                grid: Grid {
                    min: 150.0,
                    max: 500.0,
                    steps: DEFAULT_STEPS,
                },
                ..common
            },
            Preset::Fig1b => SweepSpec {
                direction: Direction::Inward,
                r_source_km: 6.5e8,
                baseline_km: 3.0e8,
                grid: Grid {
                    min: 150.0,
                    max: 500.0,
                    steps: DEFAULT_STEPS,
                },
                ..common
            },
            Preset::Fig2a => SweepSpec {
                kind: SweepKind::CoherenceBaseline,
                r_source_km: 1.0e8,
                energy_tev: 300.0,
                grid: Grid {
                    min: 2.0e8,
                    max: 4.0e8,
                    steps: DEFAULT_STEPS,
                },
                ..common
            },
            Preset::Fig2b => SweepSpec {
                kind: SweepKind::CoherenceBaseline,
                direction: Direction::Inward,
                r_source_km: 4.0e8,
                energy_tev: 300.0,
                grid: Grid {
                    min: 1.5e8,
                    max: 3.0e8,
                    steps: DEFAULT_STEPS,
                },
                ..common
            },
        }
    }
}

/// One grid point: the independent variable, the flat value, the curved value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub flat: f64,
    pub curved: f64,
}

/// Per-series maxima (parabolically refined) and, for `K3`, the grid points
/// whose value exceeds 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub max_flat: f64,
    pub max_curved: f64,
    pub violations_flat: Vec<f64>,
    pub violations_curved: Vec<f64>,
}

/// A completed sweep: the resolved spec, the rows in grid order, the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepSpec {
    fn params(&self) -> Result<OscillationParams> {
        OscillationParams::new(self.theta, self.delta_m2, self.units)
    }

    fn source(&self) -> Result<GravitySource> {
        GravitySource::new(self.gm_km)
    }

    /// Validates the grid and every grid point's scenario preconditions
    /// before any computation.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let params = self.params()?;
        let source = self.source()?;
        match self.kind {
            SweepKind::K3Energy => {
                if self.grid.min <= 0.0 {
                    return Err(Error::InvalidGrid(
                        "energy grid must be strictly positive".into(),
                    ));
                }
                // Geometry is energy-independent; one scenario check covers
                // the whole grid.
                let scenario = LgiScenario::new(
                    params,
                    source,
                    self.direction,
                    self.r_source_km,
                    self.baseline_km,
                    self.grid.min,
                    self.alpha,
                    self.approx,
                )?;
                scenario.with_source(GravitySource::flat())?;
            }
            SweepKind::CoherenceBaseline => {
                if self.grid.min < 0.0 {
                    return Err(Error::InvalidGrid(
                        "baseline grid must be nonnegative".into(),
                    ));
                }
                for x in self.grid.points() {
                    let scenario = CoherenceScenario::new(
                        params,
                        source,
                        self.direction,
                        self.r_source_km,
                        x,
                        self.energy_tev,
                        self.approx,
                    )?;
                    scenario.with_source(GravitySource::flat())?;
                }
            }
        }
        Ok(())
    }

    /// Metadata echo: every meaningful field as a `(key, value)` pair, floats
    /// at full precision. Parsing the pairs back rebuilds the spec bit-exactly.
    pub fn metadata_pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs = vec![
            ("kind", self.kind.as_str().to_string()),
            ("direction", self.direction.as_str().to_string()),
        ];
        if self.kind == SweepKind::K3Energy {
            pairs.push(("alpha", self.alpha.as_str().to_string()));
        }
        pairs.push(("theta", fmt_g17(self.theta)));
        pairs.push(("delta_m2", fmt_g17(self.delta_m2)));
        pairs.push(("units", self.units.as_str().to_string()));
        pairs.push(("approx", self.approx.as_str().to_string()));
        pairs.push(("gm", fmt_g17(self.gm_km)));
        pairs.push(("r_source", fmt_g17(self.r_source_km)));
        match self.kind {
            SweepKind::K3Energy => {
                pairs.push(("baseline", fmt_g17(self.baseline_km)));
                pairs.push(("energy_min", fmt_g17(self.grid.min)));
                pairs.push(("energy_max", fmt_g17(self.grid.max)));
            }
            SweepKind::CoherenceBaseline => {
                pairs.push(("energy", fmt_g17(self.energy_tev)));
                pairs.push(("baseline_min", fmt_g17(self.grid.min)));
                pairs.push(("baseline_max", fmt_g17(self.grid.max)));
            }
        }
        pairs.push(("steps", self.grid.steps.to_string()));
        pairs
    }

    /// Rebuilds a spec from echoed metadata pairs. Unused fields get their
    /// canonical zero so a rebuilt spec compares equal to the original.
    pub fn from_metadata_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map = std::collections::BTreeMap::new();
        for (k, v) in pairs {
            map.insert(k.to_string(), v.to_string());
        }
        let get = |key: &str| -> Result<String> {
            map.get(key)
                .cloned()
                .ok_or_else(|| Error::InvalidGrid(format!("missing metadata key `{key}`")))
        };
        let get_f64 = |key: &str| -> Result<f64> {
            get(key)?
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("unparseable metadata key `{key}`")))
        };
        let kind = SweepKind::parse(&get("kind")?)
            .ok_or_else(|| Error::InvalidGrid("unknown sweep kind".into()))?;
        let direction = Direction::parse(&get("direction")?)
            .ok_or_else(|| Error::InvalidGrid("unknown direction".into()))?;
        let alpha = match kind {
            SweepKind::K3Energy => Flavor::parse(&get("alpha")?)
                .ok_or_else(|| Error::InvalidGrid("unknown alpha".into()))?,
            SweepKind::CoherenceBaseline => Flavor::Muon,
        };
        let units = UnitsMode::parse(&get("units")?)
            .ok_or_else(|| Error::InvalidGrid("unknown units mode".into()))?;
        let approx = ApproxMode::parse(&get("approx")?)
            .ok_or_else(|| Error::InvalidGrid("unknown approx mode".into()))?;
        let steps = get("steps")?
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid("unparseable steps".into()))?;
        let grid = match kind {
            SweepKind::K3Energy => Grid {
                min: get_f64("energy_min")?,
                max: get_f64("energy_max")?,
                steps,
            },
            SweepKind::CoherenceBaseline => Grid {
                min: get_f64("baseline_min")?,
                max: get_f64("baseline_max")?,
                steps,
            },
        };
        Ok(SweepSpec {
            kind,
            direction,
            alpha,
            theta: get_f64("theta")?,
            delta_m2: get_f64("delta_m2")?,
            units,
            approx,
            gm_km: get_f64("gm")?,
            r_source_km: get_f64("r_source")?,
            baseline_km: match kind {
                SweepKind::K3Energy => get_f64("baseline")?,
                SweepKind::CoherenceBaseline => 0.0,
            },
            energy_tev: match kind {
                SweepKind::K3Energy => 0.0,
                SweepKind::CoherenceBaseline => get_f64("energy")?,
            },
            grid,
        })
    }
}

/// Runs the sweep selected by `spec.kind`.
pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    match spec.kind {
        SweepKind::K3Energy => run_k3_energy_sweep(spec),
        SweepKind::CoherenceBaseline => run_coherence_baseline_sweep(spec),
    }
}

/// `K3` against the energy at infinity, flat and curved series.
pub fn run_k3_energy_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::K3Energy {
        return Err(Error::InvalidGrid("spec kind is not k3_energy".into()));
    }
    spec.validate()?;
    let params = spec.params()?;
    let curved_base = LgiScenario::new(
        params,
        spec.source()?,
        spec.direction,
        spec.r_source_km,
        spec.baseline_km,
        spec.grid.min,
        spec.alpha,
        spec.approx,
    )?;
    let flat_base = curved_base.with_source(GravitySource::flat())?;

    let mut rows = Vec::with_capacity(spec.grid.steps);
    for x in spec.grid.points() {
        let flat = k3(&flat_base.with_energy(x)?)?;
        let curved = k3(&curved_base.with_energy(x)?)?;
        rows.push(SweepRow { x, flat, curved });
    }
    finish(spec, rows, true)
}

/// `C_mu` against the proper baseline, flat and curved series.
pub fn run_coherence_baseline_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.kind != SweepKind::CoherenceBaseline {
        return Err(Error::InvalidGrid(
            "spec kind is not coherence_baseline".into(),
        ));
    }
    spec.validate()?;
    let params = spec.params()?;
    let curved_base = CoherenceScenario::new(
        params,
        spec.source()?,
        spec.direction,
        spec.r_source_km,
        spec.grid.min,
        spec.energy_tev,
        spec.approx,
    )?;
    let flat_base = curved_base.with_source(GravitySource::flat())?;

    let mut rows = Vec::with_capacity(spec.grid.steps);
    for x in spec.grid.points() {
        let flat = coherence_mu(&flat_base.with_baseline(x)?)?;
        let curved = coherence_mu(&curved_base.with_baseline(x)?)?;
        rows.push(SweepRow { x, flat, curved });
    }
    finish(spec, rows, false)
}

fn finish(spec: &SweepSpec, rows: Vec<SweepRow>, track_violations: bool) -> Result<SweepResult> {
    debug_assert!(rows.windows(2).all(|w| w[0].x < w[1].x));
    let flat: Vec<f64> = rows.iter().map(|r| r.flat).collect();
    let curved: Vec<f64> = rows.iter().map(|r| r.curved).collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let violations = |ys: &[f64]| -> Vec<f64> {
        if !track_violations {
            return Vec::new();
        }
        xs.iter()
            .zip(ys)
            .filter(|(_, &y)| y > 1.0)
            .map(|(&x, _)| x)
            .collect()
    };
    let summary = SweepSummary {
        max_flat: refined_max(&flat),
        max_curved: refined_max(&curved),
        violations_flat: violations(&flat),
        violations_curved: violations(&curved),
    };
    Ok(SweepResult {
        spec: *spec,
        rows,
        summary,
    })
}

/// Grid argmax refined by a three-point parabolic fit (interior maxima only).
pub fn refined_max(ys: &[f64]) -> f64 {
    let i = argmax(ys);
    if i == 0 || i + 1 == ys.len() {
        return ys[i];
    }
    parabolic_peak(ys[i - 1], ys[i], ys[i + 1]).map_or(ys[i], |(_, y)| y)
}

/// All strict local maxima `(x, y)`, each refined by the three-point
/// parabolic fit around its grid cell.
pub fn refined_local_maxima(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] {
            let h = xs[i + 1] - xs[i];
            let (x, y) = parabolic_peak(ys[i - 1], ys[i], ys[i + 1])
                .map_or((xs[i], ys[i]), |(t, y)| (xs[i] + t * h, y));
            peaks.push((x, y));
        }
    }
    peaks
}

fn argmax(ys: &[f64]) -> usize {
    let mut best = 0;
    for (i, &y) in ys.iter().enumerate() {
        if y > ys[best] {
            best = i;
        }
    }
    best
}

/// Vertex of the parabola through (-1, prev), (0, mid), (1, next), as a
/// fractional cell offset and peak value; `None` when the points are not
/// concave or the vertex falls outside the cell.
fn parabolic_peak(prev: f64, mid: f64, next: f64) -> Option<(f64, f64)> {
    let denom = prev - 2.0 * mid + next;
    if denom >= 0.0 || denom.is_nan() {
        return None;
    }
    let t = 0.5 * (prev - next) / denom;
    if t.abs() > 1.0 {
        return None;
    }
    let y = mid - (next - prev) * (next - prev) / (8.0 * denom);
    Some((t, y))
}

/// Full-precision float serialization: 17 significant digits, enough to
/// reparse bit-exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Library version stamped into output metadata.
pub const TOOL_VERSION: &str = concat!("gravnu ", env!("CARGO_PKG_VERSION"));

/// CSV: `#`-prefixed metadata (spec echo and tool version), a `x,flat,curved`
/// header, one row per grid point.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool = {TOOL_VERSION}\n"));
    for (k, v) in result.spec.metadata_pairs() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str("x,flat,curved\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_g17(row.x),
            fmt_g17(row.flat),
            fmt_g17(row.curved)
        ));
    }
    out
}

/// Parses the `# key = value` metadata lines of [`to_csv`] output back into
/// the spec.
pub fn spec_from_csv_metadata(csv: &str) -> Result<SweepSpec> {
    let pairs: Vec<(&str, &str)> = csv
        .lines()
        .take_while(|line| line.starts_with('#'))
        .filter_map(|line| {
            let body = line.trim_start_matches('#').trim();
            body.split_once(" = ")
        })
        .collect();
    SweepSpec::from_metadata_pairs(pairs)
}

/// JSON: one object `{spec, rows, summary}`; rows are `[x, flat, curved]`
/// triples and all floats carry 17 significant digits.
pub fn to_json(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"spec\": {\n");
    out.push_str(&format!("    \"tool\": \"{TOOL_VERSION}\""));
    for (k, v) in result.spec.metadata_pairs() {
        let quoted = v.parse::<f64>().is_err() && k != "steps";
        if quoted {
            out.push_str(&format!(",\n    \"{k}\": \"{v}\""));
        } else {
            out.push_str(&format!(",\n    \"{k}\": {v}"));
        }
    }
    out.push_str("\n  },\n  \"rows\": [\n");
    for (i, row) in result.rows.iter().enumerate() {
        let sep = if i + 1 == result.rows.len() { "" } else { "," };
        out.push_str(&format!(
            "    [{}, {}, {}]{sep}\n",
            fmt_g17(row.x),
            fmt_g17(row.flat),
            fmt_g17(row.curved)
        ));
    }
    out.push_str("  ],\n  \"summary\": {\n");
    out.push_str(&format!(
        "    \"max_flat\": {},\n    \"max_curved\": {},\n",
        fmt_g17(result.summary.max_flat),
        fmt_g17(result.summary.max_curved)
    ));
    let join = |xs: &[f64]| -> String {
        xs.iter()
            .map(|&x| fmt_g17(x))
            .collect::<Vec<_>>()
            .join(", ")
    };
    out.push_str(&format!(
        "    \"violations\": {{\n      \"flat\": [{}],\n      \"curved\": [{}]\n    }}\n",
        join(&result.summary.violations_flat),
        join(&result.summary.violations_curved)
    ));
    out.push_str("  }\n}\n");
    out
}
