//! Initial states and the two parameter presets used for the figures.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DressedDensityMatrix, DIM};
use crate::error::{domain, Error, Result};
use crate::network::{bare_to_dressed, DressedBasis, NetworkParams};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Cavity-to-atom transfer: ω0 = 0.2, υ = 0.5.
    Fig2,
    /// Atom-cavity to atom transfer: ω0 = 0.4, υ = 10.
    Fig3,
}

impl Preset {
    /// Default simulated duration in units of `1/η`.
    pub fn default_t_max(self) -> f64 {
        match self {
            Preset::Fig2 => 50.0,
            Preset::Fig3 => 30.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            _ => Err(domain(format!(
                "unknown preset '{s}' (expected fig2 or fig3)"
            ))),
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 2001;

/// Controlled-field parameters of a figure, with `ω_c = ω0 + delta`.
///
/// The uncontrolled comparison curves use the same values with all
/// `λ_i = 0`.
pub fn figure_preset(which: Preset, delta: f64) -> NetworkParams {
    let (omega0, upsilon) = match which {
        Preset::Fig2 => (0.2, 0.5),
        Preset::Fig3 => (0.4, 10.0),
    };
    NetworkParams {
        omega0,
        omega_c: omega0 + delta,
        eta: 1.0,
        upsilon,
        lambda: [-0.49; 3],
        gamma: [0.1; 3],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    /// `(|gg100⟩ + |gg010⟩)/√2`
    CavityBellPlus,
    /// `(|gg100⟩ − |gg010⟩)/√2`
    CavityBellMinus,
    /// `(|eg000⟩ + |gg100⟩)/√2`
    AtomCavityBellPlus,
    /// `(|eg000⟩ − |gg100⟩)/√2`
    AtomCavityBellMinus,
    /// Arbitrary normalized bare amplitudes on `|1⟩…|5⟩`.
    Custom([Complex64; 5]),
}

impl InitialState {
    pub fn bare_amplitudes(&self) -> [Complex64; 5] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = |a: [f64; 5]| a.map(|x| Complex64::new(x, 0.0));
        match self {
            InitialState::CavityBellPlus => v([0.0, h, 0.0, h, 0.0]),
            InitialState::CavityBellMinus => v([0.0, h, 0.0, -h, 0.0]),
            InitialState::AtomCavityBellPlus => v([h, h, 0.0, 0.0, 0.0]),
            InitialState::AtomCavityBellMinus => v([h, -h, 0.0, 0.0, 0.0]),
            InitialState::Custom(a) => *a,
        }
    }

    pub fn build(&self, basis: &DressedBasis) -> Result<DressedDensityMatrix> {
        match self {
            InitialState::CavityBellPlus => Ok(cavity_bell_initial(1, basis)),
            InitialState::CavityBellMinus => Ok(cavity_bell_initial(-1, basis)),
            InitialState::AtomCavityBellPlus => Ok(atom_cavity_bell_initial(1, basis)),
            InitialState::AtomCavityBellMinus => Ok(atom_cavity_bell_initial(-1, basis)),
            InitialState::Custom(a) => custom_pure_initial(a, basis),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            InitialState::CavityBellPlus => "psi+",
            InitialState::CavityBellMinus => "psi-",
            InitialState::AtomCavityBellPlus => "phi+",
            InitialState::AtomCavityBellMinus => "phi-",
            InitialState::Custom(_) => "custom",
        }
    }

    pub fn all_bell() -> [InitialState; 4] {
        [
            InitialState::CavityBellPlus,
            InitialState::CavityBellMinus,
            InitialState::AtomCavityBellPlus,
            InitialState::AtomCavityBellMinus,
        ]
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn pure_from_bare(amplitudes: &[Complex64; 5], basis: &DressedBasis) -> DressedDensityMatrix {
    let d = bare_to_dressed(amplitudes, basis);
    let mut full = [Complex64::new(0.0, 0.0); DIM];
    full[..5].copy_from_slice(&d);
    DressedDensityMatrix::pure(&full)
}

fn sign_factor(sign: i8) -> f64 {
    if sign < 0 {
        -1.0
    } else {
        1.0
    }
}

/// `|Ψ±⟩ = (|2⟩ ± |4⟩)/√2`: one photon shared by the two cavities.
pub fn cavity_bell_initial(sign: i8, basis: &DressedBasis) -> DressedDensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = [0.0, h, 0.0, sign_factor(sign) * h, 0.0].map(|x| Complex64::new(x, 0.0));
    pure_from_bare(&a, basis)
}

/// `|Φ±⟩ = (|1⟩ ± |2⟩)/√2`: qubit 1 entangled with cavity 1.
pub fn atom_cavity_bell_initial(sign: i8, basis: &DressedBasis) -> DressedDensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = [h, sign_factor(sign) * h, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0));
    pure_from_bare(&a, basis)
}

pub fn custom_pure_initial(
    amplitudes: &[Complex64; 5],
    basis: &DressedBasis,
) -> Result<DressedDensityMatrix> {
    check_unit_norm(amplitudes)?;
    Ok(pure_from_bare(amplitudes, basis))
}

pub fn check_unit_norm(amplitudes: &[Complex64; 5]) -> Result<()> {
    let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if norm2.is_nan() || (norm2 - 1.0).abs() > NORM_TOL {
        return Err(domain(format!(
            "custom amplitudes must have unit norm (|a|^2 = {norm2})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub initial_state: InitialState,
    pub params: NetworkParams,
    pub t_max: f64,
    pub n_samples: usize,
}

impl ScenarioConfig {
    pub fn preset(which: Preset, delta: f64, initial_state: InitialState) -> Self {
        Self {
            initial_state,
            params: figure_preset(which, delta),
            t_max: which.default_t_max(),
            n_samples: DEFAULT_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(domain(format!("t_max = {} must be > 0", self.t_max)));
        }
        if self.n_samples < 2 {
            return Err(domain(format!(
                "n_samples = {} must be >= 2",
                self.n_samples
            )));
        }
        if let InitialState::Custom(a) = &self.initial_state {
            check_unit_norm(a)?;
        }
        Ok(())
    }

    /// `n_samples` equally spaced times from 0 to `t_max` inclusive.
    pub fn sample_times(&self) -> Vec<f64> {
        let last = self.n_samples - 1;
        (0..self.n_samples)
            .map(|k| {
                if k == last {
                    self.t_max
                } else {
                    self.t_max * k as f64 / last as f64
                }
            })
            .collect()
    }
}
