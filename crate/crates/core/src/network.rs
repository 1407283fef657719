//! Single-excitation Hamiltonian of the qubit/cavity/fiber network and its
//! dressed-state eigendecomposition.
//!
//! Frequencies and times are measured in units of the atom-cavity coupling
//! `η`. The bare basis is ordered
//!
//! | index | state      | excitation  |
//! |-------|------------|-------------|
//! | 1     | `|eg000⟩`  | qubit 1     |
//! | 2     | `|gg100⟩`  | cavity 1    |
//! | 3     | `|gg001⟩`  | fiber       |
//! | 4     | `|gg010⟩`  | cavity 2    |
//! | 5     | `|ge000⟩`  | qubit 2     |
//! | 6     | `|gg000⟩`  | vacuum      |
//!
//! with subsystem order qubit-1, qubit-2, cavity-1, cavity-2, fiber.

use nalgebra::{Matrix5, SymmetricEigen, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, numerical, Result};
use crate::parity::{check_lambda, single_photon_factor};

/// Number of single-excitation bare states.
pub const EXCITED_DIM: usize = 5;

/// Zero-based bare indices.
pub mod bare {
    pub const QUBIT1: usize = 0;
    pub const CAVITY1: usize = 1;
    pub const FIBER: usize = 2;
    pub const CAVITY2: usize = 3;
    pub const QUBIT2: usize = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub omega0: f64,
    pub omega_c: f64,
    pub eta: f64,
    pub upsilon: f64,
    /// Wigner parameters of cavity 1, cavity 2 and the fiber.
    pub lambda: [f64; 3],
    /// Photon decay rates of cavity 1, cavity 2 and the fiber.
    pub gamma: [f64; 3],
}

impl NetworkParams {
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega0
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &l) in self.lambda.iter().enumerate() {
            check_lambda(l)
                .map_err(|_| domain(format!("lambda{} = {l} must satisfy lambda > -1/2", i + 1)))?;
        }
        for (i, &g) in self.gamma.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                return Err(domain(format!("gamma{} = {g} must be >= 0", i + 1)));
            }
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(domain(format!("eta = {} must be > 0", self.eta)));
        }
        if !(self.upsilon.is_finite() && self.upsilon >= 0.0) {
            return Err(domain(format!("upsilon = {} must be >= 0", self.upsilon)));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(domain(format!("omega0 = {} must be > 0", self.omega0)));
        }
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(domain(format!(
                "omega_c = {} must be > 0 (omega0 + delta)",
                self.omega_c
            )));
        }
        Ok(())
    }

    /// `√(2λ_i+1)` for cavity 1, cavity 2, fiber.
    pub fn photon_factors(&self) -> [f64; 3] {
        self.lambda.map(single_photon_factor)
    }

    /// Common diagonal offset `(ω_c/2) Σ (2λ_i+1)` of the deformed free fields.
    pub fn zero_point(&self) -> f64 {
        0.5 * self.omega_c * self.lambda.iter().map(|l| 2.0 * l + 1.0).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianBlock {
    /// Real symmetric matrix on bare states 1..5.
    pub matrix: Matrix5<f64>,
    /// Energy of the vacuum `|gg000⟩`.
    pub ground_energy: f64,
}

pub fn assemble_hamiltonian(params: &NetworkParams) -> Result<HamiltonianBlock> {
    use bare::*;

    params.validate()?;
    let [g1, g2, g3] = params.photon_factors();
    let z = params.zero_point();
    let delta = params.detuning();

    let mut h = Matrix5::zeros();
    // σ3 contributions cancel on |eg⟩ and |ge⟩; a photon costs ω_c − ω0 relative to them.
    h[(QUBIT1, QUBIT1)] = z;
    h[(QUBIT2, QUBIT2)] = z;
    for i in [CAVITY1, FIBER, CAVITY2] {
        h[(i, i)] = z + delta;
    }

    let mut couple = |i: usize, j: usize, v: f64| {
        h[(i, j)] = v;
        h[(j, i)] = v;
    };
    couple(QUBIT1, CAVITY1, params.eta * g1);
    couple(QUBIT2, CAVITY2, params.eta * g2);
    couple(CAVITY1, FIBER, params.upsilon * g1 * g3);
    couple(CAVITY2, FIBER, params.upsilon * g2 * g3);

    Ok(HamiltonianBlock {
        matrix: h,
        ground_energy: z - params.omega0,
    })
}

/// Dressed eigenbasis of the single-excitation block plus the vacuum.
///
/// Row `n` of `c` holds the bare coefficients of `|φ_n⟩`; `ctilde = c⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    eps: Vector5<f64>,
    c: Matrix5<f64>,
    ctilde: Matrix5<f64>,
    ground_energy: f64,
}

const RESIDUAL_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-10;

impl DressedBasis {
    /// Builds a basis from an explicit eigenvalue list and coefficient rows.
    ///
    /// The rows must be orthonormal; `ctilde` is computed by inversion and
    /// checked against the transpose.
    pub fn from_parts(eps: Vector5<f64>, c: Matrix5<f64>, ground_energy: f64) -> Result<Self> {
        let ctilde = c
            .try_inverse()
            .ok_or_else(|| numerical("dressed coefficient matrix is singular"))?;
        let ortho = (c * c.transpose() - Matrix5::identity()).abs().max();
        if ortho > ORTHO_TOL {
            return Err(numerical(format!(
                "dressed coefficient matrix is not orthogonal (deviation {ortho:e})"
            )));
        }
        let inv_err = (ctilde - c.transpose()).abs().max();
        if inv_err > ORTHO_TOL {
            return Err(numerical(format!(
                "inverse of coefficient matrix differs from its transpose by {inv_err:e}"
            )));
        }
        Ok(Self {
            eps,
            c,
            ctilde,
            ground_energy,
        })
    }

    pub fn eigenvalues(&self) -> &Vector5<f64> {
        &self.eps
    }

    /// `ε_n` for `n` in `0..6`, with index 5 the vacuum.
    pub fn energy(&self, n: usize) -> f64 {
        if n == EXCITED_DIM {
            self.ground_energy
        } else {
            self.eps[n]
        }
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn coefficients(&self) -> &Matrix5<f64> {
        &self.c
    }

    pub fn inverse_coefficients(&self) -> &Matrix5<f64> {
        &self.ctilde
    }

    /// `max_n ‖H v_n − ε_n v_n‖`.
    pub fn residual(&self, h: &Matrix5<f64>) -> f64 {
        (0..EXCITED_DIM)
            .map(|n| {
                let v = self.c.row(n).transpose();
                (h * v - v * self.eps[n]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Index of the first component of largest magnitude.
fn dominant_index(v: &Vector5<f64>) -> usize {
    let mut best = 0;
    for i in 1..EXCITED_DIM {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Diagonalizes the block with ascending eigenvalues and each eigenvector
/// signed so that its largest-magnitude component is positive.
pub fn diagonalize(block: &HamiltonianBlock) -> Result<DressedBasis> {
    let h = block.matrix;
    if h != h.transpose() {
        return Err(domain("Hamiltonian block is not symmetric"));
    }
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| numerical("symmetric eigensolver did not converge"))?;

    let mut pairs: Vec<(f64, Vector5<f64>)> = (0..EXCITED_DIM)
        .map(|k| {
            let mut v: Vector5<f64> = eig.eigenvectors.column(k).into_owned();
            v /= v.norm();
            if v[dominant_index(&v)] < 0.0 {
                v = -v;
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| dominant_index(&a.1).cmp(&dominant_index(&b.1)))
    });

    let eps = Vector5::from_iterator(pairs.iter().map(|p| p.0));
    let mut c = Matrix5::zeros();
    for (n, (_, v)) in pairs.iter().enumerate() {
        c.set_row(n, &v.transpose());
    }
    let basis = DressedBasis::from_parts(eps, c, block.ground_energy)?;
    let res = basis.residual(&h);
    if res.is_nan() || res > RESIDUAL_TOL {
        return Err(numerical(format!(
            "eigenvector residual {res:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(basis)
}

/// `d_n = Σ_k a_k c̃_kn`: dressed amplitudes of a bare single-excitation vector.
pub fn bare_to_dressed(amplitudes: &[Complex64; 5], basis: &DressedBasis) -> [Complex64; 5] {
    let ct = basis.inverse_coefficients();
    std::array::from_fn(|n| (0..EXCITED_DIM).map(|k| amplitudes[k] * ct[(k, n)]).sum())
}

/// Inverse of [`bare_to_dressed`]: `a_k = Σ_n d_n c_nk`.
pub fn dressed_to_bare(amplitudes: &[Complex64; 5], basis: &DressedBasis) -> [Complex64; 5] {
    let c = basis.coefficients();
    std::array::from_fn(|k| (0..EXCITED_DIM).map(|n| amplitudes[n] * c[(n, k)]).sum())
}
