//! Command-line flags, the flat `key = value` config file, and their
//! resolution into a [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use paritynet::dynamics::DEFAULT_DT;
use paritynet::scenarios::{InitialState, Preset, ScenarioConfig, DEFAULT_SAMPLES};
use paritynet::sweep::{OutputFormat, RunConfig, SweepAxis, SweepParam};

#[derive(Debug, Parser)]
#[command(
    name = "paritynet",
    version,
    about = "Entanglement transfer in a parity-deformed cavity network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write its time series.
    Run(Flags),
    /// Simulate the Cartesian product of one or more parameter grids.
    Sweep(Flags),
    /// Check the closed-form propagation against the master-equation integrator.
    Verify(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat key = value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter preset: fig2 or fig3.
    #[arg(long)]
    pub preset: Option<String>,
    /// Initial state: psi+, psi-, phi+, phi- or custom.
    #[arg(long)]
    pub state: Option<String>,
    /// Five bare amplitudes for --state custom, e.g. "0.6,0.8i,0,0,0".
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: Option<String>,
    /// Detuning omega_c - omega0 in units of eta.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Atomic transition frequency in units of eta (overrides the preset).
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<String>,
    /// Wigner parameters of cavity 1, cavity 2 and the fiber: l1,l2,l3.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Photon decay rates: g1,g2,g3.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Cavity-fiber hopping strength.
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (run) or directory (sweep).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also integrate the master equation and report the max deviation.
    #[arg(long)]
    pub oracle: bool,
    /// Integrator step for --oracle and verify.
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    /// Sweep grid, repeatable: name=v1,v2,... over delta, lambda, lambda1..3,
    /// gamma1..3, upsilon.
    #[arg(long = "sweep", allow_hyphen_values = true)]
    pub sweep: Vec<String>,
    /// Run sweep points one after another.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug)]
pub enum OptionsError {
    Invalid(String),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for OptionsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OptionsError::Invalid(msg) => f.write_str(msg),
            OptionsError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> OptionsError {
    OptionsError::Invalid(msg.into())
}

const KEYS: [&str; 15] = [
    "preset",
    "state",
    "amplitudes",
    "delta",
    "omega0",
    "lambda",
    "gamma",
    "upsilon",
    "tmax",
    "samples",
    "format",
    "out",
    "oracle",
    "dt",
    "sweep",
];

/// Parses `key = value` lines; `#` starts a comment. `sweep` may repeat.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, Vec<String>>, OptionsError> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected key = value", no + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(invalid(format!(
                "config line {}: unknown key '{key}'",
                no + 1
            )));
        }
        let value = value.trim().trim_matches('"').to_string();
        let slot = map.entry(key.to_string()).or_default();
        if key != "sweep" {
            slot.clear();
        }
        slot.push(value);
    }
    Ok(map)
}

/// Flags layered over the config file.
struct Merged {
    values: BTreeMap<String, Vec<String>>,
}

impl Merged {
    fn new(flags: &Flags, file: BTreeMap<String, Vec<String>>) -> Self {
        let mut values = file;
        let mut set = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                values.insert(k.to_string(), vec![v.clone()]);
            }
        };
        set("preset", &flags.preset);
        set("state", &flags.state);
        set("amplitudes", &flags.amplitudes);
        set("delta", &flags.delta);
        set("omega0", &flags.omega0);
        set("lambda", &flags.lambda);
        set("gamma", &flags.gamma);
        set("upsilon", &flags.upsilon);
        set("tmax", &flags.tmax);
        set("samples", &flags.samples);
        set("format", &flags.format);
        set("dt", &flags.dt);
        set("out", &flags.out.as_ref().map(|p| p.display().to_string()));
        if flags.oracle {
            values.insert("oracle".into(), vec!["true".into()]);
        }
        if !flags.sweep.is_empty() {
            values.insert("sweep".into(), flags.sweep.clone());
        }
        Self { values }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    fn all(&self, key: &str) -> &[String] {
        self.values.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn real(key: &str, s: &str) -> Result<f64, OptionsError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| invalid(format!("--{key}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("--{key}: '{s}' is not finite")));
    }
    Ok(v)
}

fn reals(key: &str, s: &str) -> Result<Vec<f64>, OptionsError> {
    s.split(',').map(|x| real(key, x)).collect()
}

fn triple(key: &str, s: &str) -> Result<[f64; 3], OptionsError> {
    let v = reals(key, s)?;
    v.try_into().map_err(|v: Vec<f64>| {
        invalid(format!(
            "--{key} needs 3 comma-separated values, got {}",
            v.len()
        ))
    })
}

fn amplitudes(s: &str) -> Result<[Complex64; 5], OptionsError> {
    let v: Vec<Complex64> = s
        .split(',')
        .map(|x| {
            Complex64::from_str(x.trim())
                .map_err(|_| invalid(format!("--amplitudes: '{x}' is not a complex number")))
        })
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<Complex64>| {
        invalid(format!("--amplitudes needs 5 values, got {}", v.len()))
    })
}

fn initial_state(label: &str, merged: &Merged) -> Result<InitialState, OptionsError> {
    Ok(match label {
        "psi+" => InitialState::CavityBellPlus,
        "psi-" => InitialState::CavityBellMinus,
        "phi+" => InitialState::AtomCavityBellPlus,
        "phi-" => InitialState::AtomCavityBellMinus,
        "custom" => {
            let a = merged
                .get("amplitudes")
                .ok_or_else(|| invalid("--state custom requires --amplitudes"))?;
            InitialState::Custom(amplitudes(a)?)
        }
        other => {
            return Err(invalid(format!(
                "unknown state '{other}' (psi+, psi-, phi+, phi-, custom)"
            )))
        }
    })
}

fn sweep_axis(spec: &str) -> Result<SweepAxis, OptionsError> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| invalid(format!("--sweep '{spec}': expected name=v1,v2,...")))?;
    let param = SweepParam::from_str(name.trim()).map_err(|e| invalid(e.to_string()))?;
    let values = if values.trim().is_empty() {
        Vec::new()
    } else {
        reals(name.trim(), values)?
    };
    Ok(SweepAxis { param, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Sweep,
    Verify,
}

pub fn resolve(flags: &Flags, mode: Mode) -> Result<RunConfig, OptionsError> {
    let file = match &flags.config {
        Some(path) => parse_config(&read(path)?)?,
        None => BTreeMap::new(),
    };
    let merged = Merged::new(flags, file);

    let preset = Preset::from_str(merged.get("preset").unwrap_or("fig2"))
        .map_err(|e| invalid(e.to_string()))?;
    let default_state = match preset {
        Preset::Fig2 => "psi+",
        Preset::Fig3 => "phi-",
    };
    let state = initial_state(merged.get("state").unwrap_or(default_state), &merged)?;
    let delta = merged
        .get("delta")
        .map(|s| real("delta", s))
        .transpose()?
        .unwrap_or(0.0);
    let mut scenario = ScenarioConfig::preset(preset, delta, state);
    let p = &mut scenario.params;
    if let Some(s) = merged.get("omega0") {
        p.omega0 = real("omega0", s)?;
        p.omega_c = p.omega0 + delta;
    }
    if let Some(s) = merged.get("lambda") {
        p.lambda = triple("lambda", s)?;
    }
    if let Some(s) = merged.get("gamma") {
        p.gamma = triple("gamma", s)?;
    }
    if let Some(s) = merged.get("upsilon") {
        p.upsilon = real("upsilon", s)?;
    }
    if let Some(s) = merged.get("tmax") {
        scenario.t_max = real("tmax", s)?;
    }
    scenario.n_samples = match merged.get("samples") {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| invalid(format!("--samples: '{s}' is not a positive integer")))?,
        None => DEFAULT_SAMPLES,
    };

    let format = match merged.get("format") {
        Some(s) => OutputFormat::from_str(s).map_err(|e| invalid(e.to_string()))?,
        None => OutputFormat::Csv,
    };
    let out = match merged.get("out") {
        Some(s) => PathBuf::from(s),
        None if mode == Mode::Sweep => PathBuf::from("sweep_out"),
        None => PathBuf::from(format!("series.{}", format.extension())),
    };
    let mut cfg = RunConfig::new(scenario, out);
    cfg.output_format = format;
    cfg.oracle_check = matches!(merged.get("oracle"), Some("true" | "1" | "yes"));
    if let Some(s) = merged.get("dt") {
        cfg.oracle_dt = real("dt", s)?;
    } else {
        cfg.oracle_dt = DEFAULT_DT;
    }
    let axes: Vec<SweepAxis> = merged
        .all("sweep")
        .iter()
        .map(|s| sweep_axis(s))
        .collect::<Result<_, _>>()?;
    if mode == Mode::Sweep {
        cfg.sweep = Some(axes);
    } else if !axes.is_empty() {
        return Err(invalid("--sweep is only valid with the sweep subcommand"));
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, OptionsError> {
    std::fs::read_to_string(path).map_err(|e| OptionsError::Io(path.to_path_buf(), e))
}
