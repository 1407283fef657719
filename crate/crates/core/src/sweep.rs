//! Scenario runs, parameter sweeps and the oracle verification report.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    decay_rates, propagate_closed_form, DecayRates, DressedDensityMatrix, OracleIntegrator,
    DEFAULT_DT, VACUUM,
};
use crate::error::{domain, numerical, Error, Result};
use crate::exec::{self, Execution};
use crate::network::{assemble_hamiltonian, diagonalize, DressedBasis, NetworkParams};
use crate::observables::{concurrence, mode_populations, two_qubit_state};
use crate::scenarios::ScenarioConfig;

/// Pass threshold for closed form vs integrator.
pub const ORACLE_THRESHOLD: f64 = 1e-8;

pub const CSV_COLUMNS: [&str; 13] = [
    "t",
    "concurrence",
    "r1",
    "r2",
    "r3",
    "re_r4",
    "im_r4",
    "p_q1",
    "p_q2",
    "p_c1",
    "p_c2",
    "p_f",
    "p_g",
];

const GAUGE_NOTE: &str =
    "dressed states sorted by ascending energy; each eigenvector signed so its largest-magnitude bare component is positive";

const RECORD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
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

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(domain(format!(
                "unknown output format '{s}' (expected csv or json)"
            ))),
        }
    }
}

/// A network parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// `Δ = ω_c − ω0`, moving `ω_c` at fixed `ω0`.
    Delta,
    /// All three Wigner parameters at once.
    Lambda,
    Lambda1,
    Lambda2,
    Lambda3,
    Gamma1,
    Gamma2,
    Gamma3,
    Upsilon,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::Lambda => "lambda",
            SweepParam::Lambda1 => "lambda1",
            SweepParam::Lambda2 => "lambda2",
            SweepParam::Lambda3 => "lambda3",
            SweepParam::Gamma1 => "gamma1",
            SweepParam::Gamma2 => "gamma2",
            SweepParam::Gamma3 => "gamma3",
            SweepParam::Upsilon => "upsilon",
        }
    }

    pub fn apply(self, params: &mut NetworkParams, value: f64) {
        match self {
            SweepParam::Delta => params.omega_c = params.omega0 + value,
            SweepParam::Lambda => params.lambda = [value; 3],
            SweepParam::Lambda1 => params.lambda[0] = value,
            SweepParam::Lambda2 => params.lambda[1] = value,
            SweepParam::Lambda3 => params.lambda[2] = value,
            SweepParam::Gamma1 => params.gamma[0] = value,
            SweepParam::Gamma2 => params.gamma[1] = value,
            SweepParam::Gamma3 => params.gamma[2] = value,
            SweepParam::Upsilon => params.upsilon = value,
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "delta" => SweepParam::Delta,
            "lambda" => SweepParam::Lambda,
            "lambda1" => SweepParam::Lambda1,
            "lambda2" => SweepParam::Lambda2,
            "lambda3" => SweepParam::Lambda3,
            "gamma1" => SweepParam::Gamma1,
            "gamma2" => SweepParam::Gamma2,
            "gamma3" => SweepParam::Gamma3,
            "upsilon" => SweepParam::Upsilon,
            _ => return Err(domain(format!("unknown sweep parameter '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub sweep: Option<Vec<SweepAxis>>,
    /// Output file for `run`, output directory for `sweep`.
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub oracle_check: bool,
    pub oracle_dt: f64,
}

impl RunConfig {
    pub fn new(scenario: ScenarioConfig, output_path: impl Into<PathBuf>) -> Self {
        Self {
            scenario,
            sweep: None,
            output_path: output_path.into(),
            output_format: OutputFormat::Csv,
            oracle_check: false,
            oracle_dt: DEFAULT_DT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub concurrence: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub re_r4: f64,
    pub im_r4: f64,
    pub p_q1: f64,
    pub p_q2: f64,
    pub p_c1: f64,
    pub p_c2: f64,
    pub p_f: f64,
    pub p_g: f64,
}

impl Sample {
    fn observe(t: f64, rho: &DressedDensityMatrix, basis: &DressedBasis) -> Self {
        let s = two_qubit_state(rho, basis);
        let p = mode_populations(rho, basis);
        Sample {
            t,
            concurrence: concurrence(&s),
            r1: s.r1,
            r2: s.r2,
            r3: s.r3,
            re_r4: s.r4.re,
            im_r4: s.r4.im,
            p_q1: p.p_qubit1,
            p_q2: p.p_qubit2,
            p_c1: p.p_cavity1,
            p_c2: p.p_cavity2,
            p_f: p.p_fiber,
            p_g: p.p_ground,
        }
    }

    fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.concurrence,
            self.r1,
            self.r2,
            self.r3,
            self.re_r4,
            self.im_r4,
            self.p_q1,
            self.p_q2,
            self.p_c1,
            self.p_c2,
            self.p_f,
            self.p_g,
        ]
    }

    fn check(&self) -> Result<()> {
        let tq = crate::observables::TwoQubitState {
            r1: self.r1,
            r2: self.r2,
            r3: self.r3,
            r4: num_complex::Complex64::new(self.re_r4, self.im_r4),
        };
        if !tq.is_valid(RECORD_TOL) {
            return Err(numerical(format!(
                "two-qubit state invalid at t = {}: {tq:?}",
                self.t
            )));
        }
        let pops = [
            self.p_q1, self.p_q2, self.p_c1, self.p_c2, self.p_f, self.p_g,
        ];
        let total: f64 = pops.iter().sum();
        if pops
            .iter()
            .any(|&p| !(-RECORD_TOL..=1.0 + RECORD_TOL).contains(&p))
            || (total - 1.0).abs() > RECORD_TOL
        {
            return Err(numerical(format!(
                "populations invalid at t = {}: {pops:?}",
                self.t
            )));
        }
        if !(0.0..=1.0 + RECORD_TOL).contains(&self.concurrence) {
            return Err(numerical(format!(
                "concurrence {} out of range at t = {}",
                self.concurrence, self.t
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub param: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub code_version: String,
    pub initial_state: String,
    pub params: NetworkParams,
    pub delta: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub gauge: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coordinates: Vec<Coordinate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub metadata: Metadata,
    pub records: Vec<Sample>,
}

impl TimeSeries {
    pub fn validate(&self) -> Result<()> {
        match self.records.first() {
            Some(first) if first.t == 0.0 => {}
            _ => return Err(numerical("time series must start at t = 0")),
        }
        if self
            .records
            .windows(2)
            .any(|w| w[1].t.partial_cmp(&w[0].t) != Some(std::cmp::Ordering::Greater))
        {
            return Err(numerical("time series must be strictly increasing in t"));
        }
        self.records.iter().try_for_each(Sample::check)
    }

    pub fn peak_concurrence(&self) -> f64 {
        self.records
            .iter()
            .map(|s| s.concurrence)
            .fold(0.0, f64::max)
    }

    /// Trapezoidal time average of the concurrence over the sampled window.
    pub fn mean_concurrence(&self) -> f64 {
        let r = &self.records;
        let span = r.last().map(|s| s.t).unwrap_or(0.0) - r[0].t;
        if span <= 0.0 {
            return r[0].concurrence;
        }
        let area: f64 = r
            .windows(2)
            .map(|w| 0.5 * (w[0].concurrence + w[1].concurrence) * (w[1].t - w[0].t))
            .sum();
        area / span
    }

    pub fn to_csv(&self) -> Result<String> {
        use fmt::Write as _;
        let meta = serde_json::to_value(&self.metadata)?;
        let mut out = String::new();
        if let serde_json::Value::Object(map) = meta {
            for (k, v) in map {
                let _ = writeln!(out, "# {k}: {v}");
            }
        }
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        for s in &self.records {
            let row: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Dressed basis, rates and initial state of a validated scenario.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub params: NetworkParams,
    pub basis: DressedBasis,
    pub rates: DecayRates,
    pub rho0: DressedDensityMatrix,
}

pub fn prepare(scenario: &ScenarioConfig) -> Result<Prepared> {
    scenario.validate()?;
    let params = scenario.params;
    let basis = diagonalize(&assemble_hamiltonian(&params)?)?;
    let rates = decay_rates(&basis, &params);
    let rho0 = scenario.initial_state.build(&basis)?;
    Ok(Prepared {
        params,
        basis,
        rates,
        rho0,
    })
}

/// Closed-form states at every sample time.
pub fn evolve(prep: &Prepared, times: &[f64]) -> Result<Vec<DressedDensityMatrix>> {
    times
        .iter()
        .map(|&t| propagate_closed_form(&prep.rho0, &prep.basis, &prep.rates, t))
        .collect()
}

/// Max elementwise deviation, skipping vacuum coherences that start nonzero.
///
/// The closed form freezes `ρ_6n` while the Lindblad equation damps it, so
/// those entries are only comparable when they are identically zero.
pub fn oracle_deviation(
    rho0: &DressedDensityMatrix,
    closed: &DressedDensityMatrix,
    oracle: &DressedDensityMatrix,
) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..crate::dynamics::DIM {
        for k in 0..crate::dynamics::DIM {
            let vacuum_coherence = (j == VACUUM) != (k == VACUUM);
            if vacuum_coherence && rho0.0[(j, k)].norm() != 0.0 {
                continue;
            }
            worst = worst.max((closed.0[(j, k)] - oracle.0[(j, k)]).norm());
        }
    }
    worst
}

fn max_oracle_deviation(
    prep: &Prepared,
    times: &[f64],
    closed: &[DressedDensityMatrix],
    dt: f64,
) -> Result<f64> {
    let oracle = OracleIntegrator::new(&prep.basis, &prep.params, dt)?.series(&prep.rho0, times)?;
    Ok(closed
        .iter()
        .zip(&oracle)
        .map(|(c, o)| oracle_deviation(&prep.rho0, c, o))
        .fold(0.0, f64::max))
}

fn metadata(scenario: &ScenarioConfig, coordinates: Vec<Coordinate>) -> Metadata {
    Metadata {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        initial_state: scenario.initial_state.label().to_string(),
        params: scenario.params,
        delta: scenario.params.detuning(),
        t_max: scenario.t_max,
        n_samples: scenario.n_samples,
        gauge: GAUGE_NOTE.to_string(),
        coordinates,
        oracle_max_deviation: None,
    }
}

/// Computes the observable series of one scenario without writing anything.
pub fn simulate(scenario: &ScenarioConfig, oracle_dt: Option<f64>) -> Result<TimeSeries> {
    simulate_at(scenario, Vec::new(), oracle_dt)
}

fn simulate_at(
    scenario: &ScenarioConfig,
    coordinates: Vec<Coordinate>,
    oracle_dt: Option<f64>,
) -> Result<TimeSeries> {
    let prep = prepare(scenario)?;
    let times = scenario.sample_times();
    let states = evolve(&prep, &times)?;
    let records = times
        .iter()
        .zip(&states)
        .map(|(&t, rho)| Sample::observe(t, rho, &prep.basis))
        .collect();
    let mut metadata = metadata(scenario, coordinates);
    if let Some(dt) = oracle_dt {
        metadata.oracle_max_deviation = Some(max_oracle_deviation(&prep, &times, &states, dt)?);
    }
    let series = TimeSeries { metadata, records };
    series.validate()?;
    Ok(series)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Runs one scenario and writes its series to `config.output_path`.
pub fn run(config: &RunConfig) -> Result<TimeSeries> {
    let dt = config.oracle_check.then_some(config.oracle_dt);
    let series = simulate(&config.scenario, dt)?;
    write_atomic(&config.output_path, &series.render(config.output_format)?)?;
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub coordinates: Vec<Coordinate>,
    pub scenario: ScenarioConfig,
}

impl SweepPoint {
    pub fn file_name(&self, format: OutputFormat) -> String {
        let parts: Vec<String> = self
            .coordinates
            .iter()
            .map(|c| format!("{}={}", c.param, c.value))
            .collect();
        format!("point_{}.{}", parts.join("_"), format.extension())
    }
}

/// Expands the Cartesian product of the sweep grid, validating every point
/// before returning any.
pub fn sweep_points(config: &RunConfig) -> Result<Vec<SweepPoint>> {
    let axes = match &config.sweep {
        Some(axes) if !axes.is_empty() => axes,
        _ => return Err(domain("sweep requires at least one parameter grid")),
    };
    for axis in axes {
        if axis.values.is_empty() {
            return Err(domain(format!(
                "sweep grid for '{}' is empty",
                axis.param.name()
            )));
        }
    }
    let mut points = vec![SweepPoint {
        coordinates: Vec::new(),
        scenario: config.scenario.clone(),
    }];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    axis.param.apply(&mut q.scenario.params, v);
                    q.coordinates.push(Coordinate {
                        param: axis.param.name().to_string(),
                        value: v,
                    });
                    q
                })
            })
            .collect();
    }
    for p in &points {
        p.scenario.validate().map_err(|e| {
            let at: Vec<String> = p
                .coordinates
                .iter()
                .map(|c| format!("{}={}", c.param, c.value))
                .collect();
            domain(format!("sweep point [{}]: {e}", at.join(", ")))
        })?;
    }
    Ok(points)
}

/// Computes every sweep point without writing files.
pub fn compute_sweep(config: &RunConfig, exec: Execution) -> Result<Vec<(SweepPoint, TimeSeries)>> {
    let points = sweep_points(config)?;
    let dt = config.oracle_check.then_some(config.oracle_dt);
    let results = exec::map(exec, &points, |p| {
        simulate_at(&p.scenario, p.coordinates.clone(), dt)
    });
    points
        .into_iter()
        .zip(results)
        .map(|(p, r)| r.map(|s| (p, s)))
        .collect()
}

/// Runs the sweep and writes one file per point into `config.output_path`.
pub fn sweep(config: &RunConfig, exec: Execution) -> Result<Vec<(PathBuf, TimeSeries)>> {
    let points = sweep_points(config)?;
    fs::create_dir_all(&config.output_path).map_err(|source| Error::Io {
        path: config.output_path.clone(),
        source,
    })?;
    let dt = config.oracle_check.then_some(config.oracle_dt);
    let results = exec::map(exec, &points, |p| {
        let series = simulate_at(&p.scenario, p.coordinates.clone(), dt)?;
        let path = config.output_path.join(p.file_name(config.output_format));
        write_atomic(&path, &series.render(config.output_format)?)?;
        Ok((path, series))
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub max_oracle_deviation: f64,
    pub threshold: f64,
    pub lambda_zero_deviation: f64,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl VerifyReport {
    pub fn oracle_pass(&self) -> bool {
        self.max_oracle_deviation <= self.threshold
    }

    pub fn lambda_zero_pass(&self) -> bool {
        self.lambda_zero_deviation <= 1e-12
    }

    pub fn structure_pass(&self) -> bool {
        self.max_trace_error <= 1e-12
            && self.max_hermiticity_error <= 1e-12
            && self.min_eigenvalue >= -1e-10
    }

    pub fn passed(&self) -> bool {
        self.oracle_pass() && self.lambda_zero_pass() && self.structure_pass()
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "oracle deviation   {:.3e} (threshold {:.0e})  {}",
            self.max_oracle_deviation,
            self.threshold,
            verdict(self.oracle_pass())
        )?;
        writeln!(
            f,
            "lambda=0 reduction {:.3e}                    {}",
            self.lambda_zero_deviation,
            verdict(self.lambda_zero_pass())
        )?;
        write!(
            f,
            "trace {:.3e}  hermiticity {:.3e}  min eigenvalue {:.3e}  {}",
            self.max_trace_error,
            self.max_hermiticity_error,
            self.min_eigenvalue,
            verdict(self.structure_pass())
        )
    }
}

/// Standard Jaynes-Cummings network block (`λ_i = 0`) written out directly.
pub fn standard_jc_block(params: &NetworkParams) -> Matrix5<f64> {
    let z = 1.5 * params.omega_c;
    let d = params.omega_c - params.omega0;
    let (e, u) = (params.eta, params.upsilon);
    #[rustfmt::skip]
    let m = Matrix5::new(
        z,   e,     0.0,   0.0,   0.0,
        e,   z + d, u,     0.0,   0.0,
        0.0, u,     z + d, u,     0.0,
        0.0, 0.0,   u,     z + d, e,
        0.0, 0.0,   0.0,   e,     z,
    );
    m
}

pub type Propagator = dyn Fn(&DressedDensityMatrix, &DressedBasis, &DecayRates, f64) -> Result<DressedDensityMatrix>
    + Sync;

pub fn verify(config: &RunConfig) -> Result<VerifyReport> {
    verify_with(config, &propagate_closed_form)
}

/// Checks `propagate` against the integrator on the configured scenario,
/// plus the `λ = 0` reduction and the density-matrix invariants.
pub fn verify_with(config: &RunConfig, propagate: &Propagator) -> Result<VerifyReport> {
    let scenario = &config.scenario;
    let prep = prepare(scenario)?;
    let times = scenario.sample_times();
    let closed: Vec<DressedDensityMatrix> = times
        .iter()
        .map(|&t| propagate(&prep.rho0, &prep.basis, &prep.rates, t))
        .collect::<Result<_>>()?;
    let max_oracle_deviation = max_oracle_deviation(&prep, &times, &closed, config.oracle_dt)?;

    let mut standard = scenario.params;
    standard.lambda = [0.0; 3];
    let assembled = assemble_hamiltonian(&standard)?.matrix;
    let lambda_zero_deviation = (assembled - standard_jc_block(&standard)).abs().max();

    let (mut tr, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for rho in &closed {
        let d = rho.diagnostics();
        tr = tr.max(d.trace_error);
        herm = herm.max(d.hermiticity_error);
        min_eig = min_eig.min(d.min_eigenvalue);
    }
    Ok(VerifyReport {
        max_oracle_deviation,
        threshold: ORACLE_THRESHOLD,
        lambda_zero_deviation,
        max_trace_error: tr,
        max_hermiticity_error: herm,
        min_eigenvalue: min_eig,
    })
}
