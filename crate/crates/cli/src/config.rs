//! Run configuration: flat optional settings merged from a JSON file and
//! command-line flags (flags win), then resolved per command into a fully
//! specified, validated record that is echoed into every output file.

use anyhow::{anyhow, bail, Context, Result};
use permutherm_core::otto::parameterised_hamiltonian;
use permutherm_core::thermo::Ensemble;
use permutherm_core::SpectrumSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PERMUTHERM_OUT_DIR";

/// Every knob the CLI understands, all optional.  The JSON configuration
/// file deserializes into this (unknown keys are rejected); the parsed
/// command-line flags produce a second instance that overlays it.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub command: Option<String>,
    pub n: Option<u32>,
    /// Symmetry treatment: `sud` (blocks labelled by shapes) or `spin`.
    pub kind: Option<String>,
    pub d: Option<u32>,
    /// Spin size as `1/2`, `1`, `3/2`, ...
    pub s: Option<String>,
    /// Spectrum family: `ladder`, `two-level`, `h-delta`, or `explicit`.
    pub spectrum: Option<String>,
    /// Levels for the `explicit` spectrum (any order; shifted traceless).
    pub levels: Option<Vec<f64>>,
    /// Middle-level parameter of the `h-delta` family, in `[0, 2]`.
    pub delta: Option<f64>,
    pub beta0: Option<f64>,
    /// Bath inverse-temperature grid.
    pub beta: Option<Vec<f64>>,
    /// Hot-bath inverse-temperature grid (Otto commands).
    pub beta_h: Option<Vec<f64>>,
    pub beta_c: Option<f64>,
    pub kappa: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    /// Monte Carlo sample count (asymptotics-energy).
    pub samples: Option<usize>,
    /// Largest local dimension for the coefficient sweep.
    pub d_max: Option<u32>,
    /// Ensemble sizes for the entropy-convergence sweep.
    pub n_grid: Option<Vec<u32>>,
    /// Number of gap values across `[0, 2]` (otto-scan).
    pub delta_points: Option<usize>,
    /// Emit per-block columns (thermo).
    pub per_block: Option<bool>,
    /// Collective coupling rate (lindblad-verify).
    pub gamma: Option<f64>,
    /// Keep zero-frequency jump channels (lindblad-verify).
    pub include_zero_frequency: Option<bool>,
    /// Extra random initial states to verify (lindblad-verify).
    pub random_states: Option<usize>,
    /// Integration step cap (lindblad-verify).
    pub max_steps: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:ident, $over:ident; $($field:ident),* $(,)?) => {
        Settings {
            $($field: $over.$field.or($base.$field),)*
        }
    };
}

impl Settings {
    /// Field-wise merge: values from `flags` shadow values from `self`.
    pub fn overlaid_with(self, flags: Settings) -> Settings {
        let base = self;
        overlay_fields!(
            base, flags;
            command, n, kind, d, s, spectrum, levels, delta, beta0, beta, beta_h,
            beta_c, kappa, output, format, seed, samples, d_max, n_grid,
            delta_points, per_block, gamma, include_zero_frequency, random_states,
            max_steps,
        )
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read configuration file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse configuration file {}", path.display()))
    }
}

/// Output format of the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Fully resolved ensemble description, echoed into output metadata.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleConfig {
    pub n: u32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    /// Normalized (traceless) single-particle levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// Shift that was subtracted from the supplied levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applied_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// Resolved temperature parameters; only the fields a command uses are
/// present.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TemperatureConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_h: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

/// The resolved, validated run record: everything needed to reproduce the
/// output byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperatures: Option<TemperatureConfig>,
    pub output: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_block: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_zero_frequency: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

impl RunConfig {
    /// Skeleton with output/seed resolved; command runners fill the rest.
    pub fn new(command: &str, settings: &Settings) -> Result<Self> {
        let format = match settings.format.as_deref() {
            None => default_format(command),
            Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => bail!("unknown output format {other:?} (expected csv or json)"),
        };
        let output = resolve_output_path(command, settings.output.clone(), format);
        Ok(Self {
            command: command.to_string(),
            ensemble: None,
            temperatures: None,
            output,
            format,
            seed: settings.seed.unwrap_or(0),
            samples: None,
            d_max: None,
            n_grid: None,
            delta_points: None,
            per_block: None,
            gamma: None,
            include_zero_frequency: None,
            random_states: None,
            max_steps: None,
        })
    }
}

/// The verification report is structured, so it defaults to JSON; the
/// sweep commands default to CSV.
fn default_format(command: &str) -> OutputFormat {
    if command == "lindblad-verify" {
        OutputFormat::Json
    } else {
        OutputFormat::Csv
    }
}

/// `--output` wins; otherwise `permutherm-<command>.<ext>` inside
/// `$PERMUTHERM_OUT_DIR` (or the working directory).
fn resolve_output_path(command: &str, explicit: Option<PathBuf>, format: OutputFormat) -> PathBuf {
    if let Some(path) = explicit {
        return path;
    }
    let name = format!("permutherm-{command}.{}", format.extension());
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(name),
        None => PathBuf::from(name),
    }
}

/// Parses a spin size `1/2`, `3/2`, `1`, `2.5`, ... into `2s`.
pub fn parse_two_s(text: &str) -> Result<u32> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        if den.trim() != "2" {
            bail!("spin sizes are half-integers; write {text:?} as k/2 or an integer");
        }
        let two_s: u32 = num
            .trim()
            .parse()
            .context("cannot parse the spin numerator")?;
        return Ok(two_s);
    }
    if let Ok(integer) = text.parse::<u32>() {
        return Ok(2 * integer);
    }
    let value: f64 = text
        .parse()
        .with_context(|| format!("cannot parse spin size {text:?}"))?;
    let doubled = 2.0 * value;
    if doubled <= 0.0 || doubled.fract() != 0.0 || doubled > u32::MAX as f64 {
        bail!("spin size must be a positive half-integer, got {text}");
    }
    Ok(doubled as u32)
}

/// Parses a grid flag: either comma-separated values or a generator
/// `lin:start:stop:count` / `log:start:stop:count` (inclusive endpoints).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let make = |start: f64, stop: f64, count: usize, log: bool| -> Result<Vec<f64>> {
        if count < 2 {
            bail!("grid generators need at least 2 points, got {count}");
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            bail!("log grids need positive endpoints");
        }
        Ok((0..count)
            .map(|k| {
                let t = k as f64 / (count - 1) as f64;
                if log {
                    (start.ln() + t * (stop.ln() - start.ln())).exp()
                } else {
                    start + t * (stop - start)
                }
            })
            .collect())
    };
    let generator = |body: &str, log: bool| -> Result<Vec<f64>> {
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            bail!("grid generator must be start:stop:count, got {body:?}");
        }
        make(
            parts[0].parse().context("grid start")?,
            parts[1].parse().context("grid stop")?,
            parts[2].parse().context("grid count")?,
            log,
        )
    };
    if let Some(body) = text.strip_prefix("lin:") {
        return generator(body, false);
    }
    if let Some(body) = text.strip_prefix("log:") {
        return generator(body, true);
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse grid value {v:?}"))
        })
        .collect()
}

/// Validates that a grid is non-empty, finite, and strictly increasing.
pub fn validate_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        bail!("{name} grid is empty");
    }
    if grid.iter().any(|v| !v.is_finite()) {
        bail!("{name} grid contains a non-finite value");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        bail!("{name} grid must be strictly increasing: {grid:?}");
    }
    Ok(())
}

/// Builds the ensemble (and its metadata echo) from the settings.
///
/// `sud` ensembles default to the unit-gap ladder spectrum; any supplied
/// spectrum is shifted traceless, and the shift is reported in the echo.
pub fn resolve_ensemble(settings: &Settings) -> Result<(Ensemble, EnsembleConfig)> {
    let n = settings
        .n
        .ok_or_else(|| anyhow!("missing ensemble size n"))?;
    let kind = settings.kind.as_deref().unwrap_or("sud");
    match kind {
        "spin" => {
            let s = settings
                .s
                .as_deref()
                .ok_or_else(|| anyhow!("kind=spin needs s"))?;
            let two_s = parse_two_s(s)?;
            if settings.spectrum.is_some() || settings.levels.is_some() {
                bail!("spin ensembles fix the unit-gap spectrum; drop the spectrum settings");
            }
            let ensemble = Ensemble::spins(n, two_s)?;
            let echo = EnsembleConfig {
                n,
                kind: "spin".into(),
                d: None,
                two_s: Some(two_s),
                spectrum: None,
                levels: None,
                applied_shift: None,
                delta: None,
            };
            Ok((ensemble, echo))
        }
        "sud" => {
            let family = settings.spectrum.as_deref().unwrap_or("ladder");
            let (spec, d, delta) = match family {
                "ladder" => {
                    let d = settings.d.ok_or_else(|| anyhow!("ladder spectrum needs d"))?;
                    (SpectrumSpec::ladder(d as usize)?, d, None)
                }
                "two-level" => {
                    let d = settings.d.ok_or_else(|| anyhow!("two-level spectrum needs d"))?;
                    (SpectrumSpec::two_level(d as usize)?, d, None)
                }
                "h-delta" => {
                    let delta =
                        settings.delta.ok_or_else(|| anyhow!("h-delta spectrum needs delta"))?;
                    if settings.d.is_some_and(|d| d != 3) {
                        bail!("the h-delta family is three-level; drop d or set d=3");
                    }
                    (parameterised_hamiltonian(delta)?, 3, Some(delta))
                }
                "explicit" => {
                    let levels = settings
                        .levels
                        .clone()
                        .ok_or_else(|| anyhow!("explicit spectrum needs levels"))?;
                    let spec = SpectrumSpec::new(levels)?;
                    let d = spec.num_levels() as u32;
                    if settings.d.is_some_and(|given| given != d) {
                        bail!("d disagrees with the number of explicit levels");
                    }
                    (spec, d, None)
                }
                other => bail!(
                    "unknown spectrum family {other:?} (expected ladder, two-level, h-delta, explicit)"
                ),
            };
            let echo = EnsembleConfig {
                n,
                kind: "sud".into(),
                d: Some(d),
                two_s: None,
                spectrum: Some(family.to_string()),
                levels: Some(spec.levels().to_vec()),
                applied_shift: Some(spec.applied_shift()),
                delta,
            };
            Ok((Ensemble::qudits(n, spec)?, echo))
        }
        other => bail!("unknown ensemble kind {other:?} (expected sud or spin)"),
    }
}
