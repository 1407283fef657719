//! Truncated Fock-space matrices for a single parity-deformed mode.
//!
//! A mode with Wigner parameter `λ` has ladder operators acting as
//!
//! ```text
//! a |2k⟩   = √(2k)        |2k−1⟩      a† |2k⟩   = √(2k+2λ+1) |2k+1⟩
//! a |2k+1⟩ = √(2k+2λ+1)   |2k⟩        a† |2k+1⟩ = √(2k+2)    |2k+2⟩
//! ```
//!
//! and obey `[a, a†] = 1 + 2λR`, `{R, a} = 0` with `R|k⟩ = (−1)^k |k⟩`.
//! At `λ = 0` the ordinary boson operators are recovered.
//!
//! All matrices are real and stored dense. Relations involving products of
//! ladder matrices only hold away from the two topmost truncated levels.

use nalgebra::DMatrix;

use crate::error::{domain, Result};

/// Smallest admissible truncation; `a a†|1⟩` needs `|2⟩`.
pub const MIN_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedModeSpec {
    lambda: f64,
    dim: usize,
}

impl DeformedModeSpec {
    pub fn new(lambda: f64, dim: usize) -> Result<Self> {
        check_lambda(lambda)?;
        if dim < MIN_DIM {
            return Err(domain(format!(
                "Fock truncation dim = {dim} must be at least {MIN_DIM}"
            )));
        }
        Ok(Self { lambda, dim })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= -0.5 {
        return Err(domain(format!(
            "Wigner parameter lambda = {lambda} must satisfy lambda > -1/2"
        )));
    }
    Ok(())
}

/// `√(2λ+1)`: the matrix element `⟨0|a|1⟩`, i.e. the single-photon
/// deformation factor that dresses every coupling in the network.
pub fn single_photon_factor(lambda: f64) -> f64 {
    (2.0 * lambda + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Annihilator,
    Creator,
    Parity,
    SymmetricProduct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Matrix element `⟨k−1| a |k⟩` for `k ≥ 1`.
fn lowering_element(lambda: f64, k: usize) -> f64 {
    if k.is_multiple_of(2) {
        (k as f64).sqrt()
    } else {
        // k = 2j+1 → √(2j + 2λ + 1) = √(k + 2λ)
        (k as f64 + 2.0 * lambda).sqrt()
    }
}

pub fn annihilator_matrix(spec: &DeformedModeSpec) -> OperatorMatrix {
    let n = spec.dim;
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = lowering_element(spec.lambda, k);
    }
    OperatorMatrix {
        kind: OperatorKind::Annihilator,
        entries: m,
    }
}

pub fn creator_matrix(spec: &DeformedModeSpec) -> OperatorMatrix {
    OperatorMatrix {
        kind: OperatorKind::Creator,
        entries: annihilator_matrix(spec).entries.transpose(),
    }
}

pub fn parity_matrix(dim: usize) -> Result<OperatorMatrix> {
    if dim == 0 {
        return Err(domain("parity matrix dimension must be at least 1"));
    }
    let diag = (0..dim).map(|k| if k.is_multiple_of(2) { 1.0 } else { -1.0 });
    Ok(OperatorMatrix {
        kind: OperatorKind::Parity,
        entries: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag)),
    })
}

/// Exact diagonal of `{a, a†}`: `4k+2λ+1` on `|2k⟩`, `4k+2λ+3` on `|2k+1⟩`.
///
/// Evaluated analytically so the top levels carry no truncation error.
pub fn symmetric_product_diag(spec: &DeformedModeSpec) -> OperatorMatrix {
    let lam2 = 2.0 * spec.lambda;
    let diag = (0..spec.dim).map(|n| {
        let k = (n / 2) as f64;
        if n % 2 == 0 {
            4.0 * k + lam2 + 1.0
        } else {
            4.0 * k + lam2 + 3.0
        }
    });
    OperatorMatrix {
        kind: OperatorKind::SymmetricProduct,
        entries: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(spec.dim, diag)),
    }
}
