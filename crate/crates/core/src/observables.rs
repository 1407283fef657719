//! Two-qubit reduced state, concurrence and excitation bookkeeping.

use nalgebra::Matrix5;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DressedDensityMatrix, VACUUM};
use crate::network::{bare, DressedBasis, EXCITED_DIM};

/// Reduced atomic state in the single-excitation sector.
///
/// In the basis `{|ee⟩, |eg⟩, |ge⟩, |gg⟩}` this is an X-state with an empty
/// `|ee⟩` row; `r4 = ⟨eg|ϱ|ge⟩` and `⟨ge|ϱ|eg⟩ = conj(r4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: Complex64,
}

impl TwoQubitState {
    /// 4×4 matrix in the ordered basis `{|ee⟩, |eg⟩, |ge⟩, |gg⟩}`.
    #[rustfmt::skip]
    pub fn to_matrix(&self) -> nalgebra::Matrix4<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        nalgebra::Matrix4::new(
            z, z, z, z,
            z, re(self.r1), self.r4, z,
            z, self.r4.conj(), re(self.r2), z,
            z, z, z, re(self.r3),
        )
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.r1 >= -tol
            && self.r2 >= -tol
            && self.r3 >= -tol
            && (self.r1 + self.r2 + self.r3 - 1.0).abs() <= tol
            && self.r4.norm() <= (self.r1.max(0.0) * self.r2.max(0.0)).sqrt() + 1e-10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationRecord {
    pub p_qubit1: f64,
    pub p_qubit2: f64,
    pub p_cavity1: f64,
    pub p_cavity2: f64,
    pub p_fiber: f64,
    pub p_ground: f64,
}

impl PopulationRecord {
    pub fn total(&self) -> f64 {
        self.p_qubit1
            + self.p_qubit2
            + self.p_cavity1
            + self.p_cavity2
            + self.p_fiber
            + self.p_ground
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        [
            self.p_qubit1,
            self.p_qubit2,
            self.p_cavity1,
            self.p_cavity2,
            self.p_fiber,
            self.p_ground,
        ]
        .iter()
        .all(|&p| (-tol..=1.0 + tol).contains(&p))
            && (self.total() - 1.0).abs() <= tol
    }
}

/// Single-excitation block of `ρ` expressed in the bare basis, `Cᵀ ρ C`.
fn bare_block(rho: &DressedDensityMatrix, basis: &DressedBasis) -> Matrix5<Complex64> {
    let c: Matrix5<Complex64> = basis.coefficients().map(|x| Complex64::new(x, 0.0));
    let dressed = rho
        .0
        .fixed_view::<EXCITED_DIM, EXCITED_DIM>(0, 0)
        .into_owned();
    c.transpose() * dressed * c
}

/// Partial trace over both cavities and the fiber.
pub fn two_qubit_state(rho: &DressedDensityMatrix, basis: &DressedBasis) -> TwoQubitState {
    use bare::*;
    let b = bare_block(rho, basis);
    let modes: f64 = [CAVITY1, FIBER, CAVITY2]
        .iter()
        .map(|&i| b[(i, i)].re)
        .sum();
    TwoQubitState {
        r1: b[(QUBIT1, QUBIT1)].re,
        r2: b[(QUBIT2, QUBIT2)].re,
        r3: rho.0[(VACUUM, VACUUM)].re + modes,
        r4: b[(QUBIT1, QUBIT2)],
    }
}

/// `2·max{0, |r4|}`, exact for states with no `|ee⟩` population.
pub fn concurrence(state: &TwoQubitState) -> f64 {
    2.0 * state.r4.norm().max(0.0)
}

pub fn mode_populations(rho: &DressedDensityMatrix, basis: &DressedBasis) -> PopulationRecord {
    use bare::*;
    let b = bare_block(rho, basis);
    PopulationRecord {
        p_qubit1: b[(QUBIT1, QUBIT1)].re,
        p_qubit2: b[(QUBIT2, QUBIT2)].re,
        p_cavity1: b[(CAVITY1, CAVITY1)].re,
        p_cavity2: b[(CAVITY2, CAVITY2)].re,
        p_fiber: b[(FIBER, FIBER)].re,
        p_ground: rho.0[(VACUUM, VACUUM)].re,
    }
}
