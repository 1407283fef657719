//! Dissipative evolution in the dressed basis.
//!
//! At zero temperature every dressed state `|φ_n⟩` decays to the vacuum
//! `|φ_6⟩` through three channels (cavity 1, cavity 2, fiber). Two
//! propagators are provided: the analytic solution of the secular master
//! equation, and a fixed-step RK4 integrator of the Lindblad equation built
//! from the jump operators, used as an independent check.
//!
//! Dressed indices are zero-based; index 5 is the vacuum.

use nalgebra::{Matrix6, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::network::{bare, DressedBasis, NetworkParams, EXCITED_DIM};

pub const DIM: usize = EXCITED_DIM + 1;
pub const VACUUM: usize = EXCITED_DIM;

/// Default integrator step, in units of `1/η`.
pub const DEFAULT_DT: f64 = 1e-3;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub gnn: [f64; EXCITED_DIM],
}

/// `γ_nn = γ₁(2λ₁+1)|c_n2|² + γ₂(2λ₂+1)|c_n4|² + γ₃(2λ₃+1)|c_n3|²`
pub fn decay_rates(basis: &DressedBasis, params: &NetworkParams) -> DecayRates {
    let c = basis.coefficients();
    let weight = channel_weights(params);
    let gnn = std::array::from_fn(|n| {
        CHANNEL_MODE
            .iter()
            .zip(weight)
            .map(|(&mode, w)| w * c[(n, mode)].powi(2))
            .sum()
    });
    DecayRates { gnn }
}

/// Bare index of the photon state emptied by each loss channel.
const CHANNEL_MODE: [usize; 3] = [bare::CAVITY1, bare::CAVITY2, bare::FIBER];

fn channel_weights(params: &NetworkParams) -> [f64; 3] {
    std::array::from_fn(|i| params.gamma[i] * (2.0 * params.lambda[i] + 1.0))
}

/// Rank-one operator `amplitude · |target⟩⟨source|` in the dressed basis,
/// acting with rate `rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperator {
    pub channel: usize,
    pub source: usize,
    pub target: usize,
    pub amplitude: f64,
    pub rate: f64,
}

impl JumpOperator {
    pub fn to_matrix(&self) -> Matrix6<Complex64> {
        let mut m = Matrix6::zeros();
        m[(self.target, self.source)] = Complex64::new(self.amplitude, 0.0);
        m
    }
}

/// The 15 operators `A_{i,n} = c_n,mode(i) √(2λ_i+1) |φ_6⟩⟨φ_n|`, channel-major.
pub fn jump_operators(basis: &DressedBasis, params: &NetworkParams) -> Vec<JumpOperator> {
    let c = basis.coefficients();
    let factors = params.photon_factors();
    let mut ops = Vec::with_capacity(3 * EXCITED_DIM);
    for (channel, &mode) in CHANNEL_MODE.iter().enumerate() {
        for n in 0..EXCITED_DIM {
            ops.push(JumpOperator {
                channel,
                source: n,
                target: VACUUM,
                amplitude: c[(n, mode)] * factors[channel],
                rate: params.gamma[channel],
            });
        }
    }
    ops
}

/// Density matrix in the dressed basis `{|φ_1⟩, …, |φ_5⟩, |φ_6⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedDensityMatrix(pub Matrix6<Complex64>);

/// Worst-case violations of the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn within(&self, trace_tol: f64, herm_tol: f64, pos_tol: f64) -> bool {
        self.trace_error <= trace_tol
            && self.hermiticity_error <= herm_tol
            && self.min_eigenvalue >= -pos_tol
    }
}

impl DressedDensityMatrix {
    pub fn pure(amplitudes: &[Complex64; DIM]) -> Self {
        Self(Matrix6::from_fn(|j, k| {
            amplitudes[j] * amplitudes[k].conj()
        }))
    }

    pub fn vacuum() -> Self {
        let mut m = Matrix6::zeros();
        m[(VACUUM, VACUUM)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let m = &self.0;
        let hermiticity_error = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let min_eigenvalue = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        StateDiagnostics {
            trace_error: (self.trace() - 1.0).norm(),
            hermiticity_error,
            min_eigenvalue,
        }
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("time t = {t} must be finite and >= 0")));
    }
    Ok(())
}

/// Analytic solution of the dressed-basis equations of motion.
///
/// Coherences between the vacuum and excited dressed states are held
/// constant, and `ρ_66(t)` includes `ρ_66(0)` so the trace is conserved.
pub fn propagate_closed_form(
    rho0: &DressedDensityMatrix,
    basis: &DressedBasis,
    rates: &DecayRates,
    t: f64,
) -> Result<DressedDensityMatrix> {
    check_time(t)?;
    let r0 = &rho0.0;
    let g = &rates.gnn;
    let mut out = *r0;
    let mut filled = r0[(VACUUM, VACUUM)];
    for n in 0..EXCITED_DIM {
        let survive = (-g[n] * t).exp();
        out[(n, n)] = r0[(n, n)] * survive;
        filled += r0[(n, n)] * (1.0 - survive);
        for m in 0..EXCITED_DIM {
            if m == n {
                continue;
            }
            let exponent =
                (2.0 * I * (basis.energy(m) - basis.energy(n)) - (g[n] + g[m])) * t / 2.0;
            out[(n, m)] = r0[(n, m)] * exponent.exp();
        }
    }
    out[(VACUUM, VACUUM)] = filled;
    Ok(DressedDensityMatrix(out))
}

/// Right-hand side of the Lindblad equation with a diagonal Hamiltonian
/// `diag(energies)` and rank-one jump operators.
pub fn lindblad_rhs(
    energies: &[f64; DIM],
    jumps: &[JumpOperator],
    rho: &Matrix6<Complex64>,
) -> Matrix6<Complex64> {
    // −i[H, ρ]_jk = −i(E_j − E_k) ρ_jk
    let mut out = Matrix6::from_fn(|j, k| -I * (energies[j] - energies[k]) * rho[(j, k)]);
    for op in jumps {
        let w = op.rate * op.amplitude * op.amplitude;
        if w == 0.0 {
            continue;
        }
        let (s, t) = (op.source, op.target);
        // A ρ A† = w ρ_ss |t⟩⟨t|
        out[(t, t)] += rho[(s, s)] * w;
        // −½{A†A, ρ} with A†A = w |s⟩⟨s|
        for k in 0..DIM {
            out[(s, k)] -= rho[(s, k)] * (0.5 * w);
            out[(k, s)] -= rho[(k, s)] * (0.5 * w);
        }
    }
    out
}

/// Fixed-step RK4 integrator for the microscopic master equation.
#[derive(Debug, Clone)]
pub struct OracleIntegrator {
    energies: [f64; DIM],
    jumps: Vec<JumpOperator>,
    dt: f64,
}

/// Largest `ω·dt` accepted, where `ω` bounds the generator's spectrum.
/// Beyond this RK4 is far outside its accuracy region.
const MAX_STEP_PHASE: f64 = 0.5;

impl OracleIntegrator {
    pub fn new(basis: &DressedBasis, params: &NetworkParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(domain(format!(
                "integrator step dt = {dt} must be finite and > 0"
            )));
        }
        let energies: [f64; DIM] = std::array::from_fn(|n| basis.energy(n));
        let jumps = jump_operators(basis, params);
        let spread = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - energies.iter().copied().fold(f64::INFINITY, f64::min);
        let decay: f64 = params
            .gamma
            .iter()
            .zip(params.photon_factors())
            .map(|(g, f)| g * f * f)
            .sum();
        let omega = spread + decay;
        if omega * dt > MAX_STEP_PHASE {
            return Err(domain(format!(
                "integrator step dt = {dt} too coarse for generator scale {omega:.3e} (need dt <= {:.3e})",
                MAX_STEP_PHASE / omega
            )));
        }
        Ok(Self {
            energies,
            jumps,
            dt,
        })
    }

    fn rhs(&self, rho: &Matrix6<Complex64>) -> Matrix6<Complex64> {
        lindblad_rhs(&self.energies, &self.jumps, rho)
    }

    fn step(&self, rho: &Matrix6<Complex64>, h: f64) -> Matrix6<Complex64> {
        let hc = Complex64::new(h, 0.0);
        let half = Complex64::new(0.5 * h, 0.0);
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&(rho + k1 * half));
        let k3 = self.rhs(&(rho + k2 * half));
        let k4 = self.rhs(&(rho + k3 * hc));
        let two = Complex64::new(2.0, 0.0);
        rho + (k1 + k2 * two + k3 * two + k4) * (hc / 6.0)
    }

    /// Advances `rho` by `duration` using `⌈duration/dt⌉` equal steps.
    pub fn advance(
        &self,
        rho: &DressedDensityMatrix,
        duration: f64,
    ) -> Result<DressedDensityMatrix> {
        check_time(duration)?;
        if duration == 0.0 {
            return Ok(*rho);
        }
        let steps = (duration / self.dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        let mut m = rho.0;
        for _ in 0..steps {
            m = self.step(&m, h);
        }
        Ok(DressedDensityMatrix(m))
    }

    /// States at each of the nondecreasing `times`, integrating segment by segment.
    pub fn series(
        &self,
        rho0: &DressedDensityMatrix,
        times: &[f64],
    ) -> Result<Vec<DressedDensityMatrix>> {
        let mut out = Vec::with_capacity(times.len());
        let mut now = 0.0;
        let mut rho = *rho0;
        for &t in times {
            check_time(t)?;
            if t < now {
                return Err(domain("oracle sample times must be nondecreasing"));
            }
            rho = self.advance(&rho, t - now)?;
            now = t;
            out.push(rho);
        }
        Ok(out)
    }
}

/// Integrates the master equation from 0 to `t` with step at most `dt`.
pub fn integrate_oracle(
    rho0: &DressedDensityMatrix,
    basis: &DressedBasis,
    params: &NetworkParams,
    t: f64,
    dt: f64,
) -> Result<DressedDensityMatrix> {
    OracleIntegrator::new(basis, params, dt)?.advance(rho0, t)
}
