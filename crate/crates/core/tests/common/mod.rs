//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix4, Matrix5, SymmetricEigen};
use num_complex::Complex64;
use paritynet::dynamics::{DressedDensityMatrix, VACUUM};
use paritynet::network::{DressedBasis, NetworkParams};
use paritynet::observables::TwoQubitState;
use paritynet::parity::{annihilator_matrix, creator_matrix, DeformedModeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid parameters whose generator spectrum stays small enough for
/// the default integrator step.
pub fn random_params(rng: &mut impl Rng) -> NetworkParams {
    let omega0 = rng.random_range(0.1..1.0);
    let delta = rng.random_range(-(omega0 - 0.05f64).min(0.5)..0.5);
    NetworkParams {
        omega0,
        omega_c: omega0 + delta,
        eta: 1.0,
        upsilon: rng.random_range(0.0..1.5),
        lambda: std::array::from_fn(|_| rng.random_range(-0.49..0.5)),
        gamma: std::array::from_fn(|_| rng.random_range(0.0..0.3)),
    }
}

pub fn random_unit_amplitudes(rng: &mut impl Rng) -> [Complex64; 5] {
    let mut a: [Complex64; 5] = std::array::from_fn(|_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut a {
        *z /= norm;
    }
    // renormalize once more so |a|² = 1 holds to rounding
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    a.map(|z| z / norm)
}

const QUBIT: usize = 2;
const MODE: usize = 3;

fn kron_all(ops: &[DMatrix<f64>]) -> DMatrix<f64> {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

/// Full Hamiltonian on qubit ⊗ qubit ⊗ cavity ⊗ cavity ⊗ fiber (2·2·3·3·3),
/// built from truncated operator products.
pub fn tensor_hamiltonian(p: &NetworkParams) -> DMatrix<f64> {
    // qubit basis ordered (g, e)
    let sz = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
    let sp = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let sm = sp.transpose();
    let iq = DMatrix::<f64>::identity(QUBIT, QUBIT);
    let im = DMatrix::<f64>::identity(MODE, MODE);

    let modes: Vec<(DMatrix<f64>, DMatrix<f64>)> = p
        .lambda
        .iter()
        .map(|&l| {
            let spec = DeformedModeSpec::new(l, MODE).unwrap();
            (
                annihilator_matrix(&spec).entries,
                creator_matrix(&spec).entries,
            )
        })
        .collect();

    // slot order: q1, q2, c1, c2, f
    let embed = |slot: usize, op: &DMatrix<f64>| {
        let mut ops: Vec<DMatrix<f64>> =
            vec![iq.clone(), iq.clone(), im.clone(), im.clone(), im.clone()];
        ops[slot] = op.clone();
        kron_all(&ops)
    };
    let a = |i: usize| embed(2 + i, &modes[i].0);
    let ad = |i: usize| embed(2 + i, &modes[i].1);

    let mut h = DMatrix::zeros(108, 108);
    for i in 0..2 {
        h += embed(i, &sz) * (p.omega0 / 2.0);
        h += (a(i) * ad(i) + ad(i) * a(i)) * (p.omega_c / 2.0);
        h += (ad(i) * embed(i, &sm) + a(i) * embed(i, &sp)) * p.eta;
    }
    h += (a(2) * ad(2) + ad(2) * a(2)) * (p.omega_c / 2.0);
    h += a(2) * (ad(0) + ad(1)) * p.upsilon;
    h += ad(2) * (a(0) + a(1)) * p.upsilon;
    h
}

fn product_index(q1: usize, q2: usize, c1: usize, c2: usize, f: usize) -> usize {
    (((q1 * QUBIT + q2) * MODE + c1) * MODE + c2) * MODE + f
}

/// Bare states |1⟩…|6⟩ as indices into the tensor-product space.
pub fn bare_indices() -> [usize; 6] {
    [
        product_index(1, 0, 0, 0, 0),
        product_index(0, 0, 1, 0, 0),
        product_index(0, 0, 0, 0, 1),
        product_index(0, 0, 0, 1, 0),
        product_index(0, 1, 0, 0, 0),
        product_index(0, 0, 0, 0, 0),
    ]
}

/// Projection of the tensor-product Hamiltonian onto bare states 1..5 plus
/// the vacuum energy.
pub fn projected_hamiltonian(p: &NetworkParams) -> (Matrix5<f64>, f64) {
    let h = tensor_hamiltonian(p);
    let idx = bare_indices();
    let block = Matrix5::from_fn(|j, k| h[(idx[j], idx[k])]);
    (block, h[(idx[5], idx[5])])
}

/// Roots of det(H − xI) by sign-change scanning and bisection.
pub fn char_poly_roots(h: &Matrix5<f64>) -> Vec<f64> {
    let det = |x: f64| (h - Matrix5::identity() * x).determinant();
    let bound = h.abs().row_sum().max() + 1.0;
    let n = 200_000;
    let mut roots = Vec::new();
    let mut prev_x = -bound;
    let mut prev = det(prev_x);
    for i in 1..=n {
        let x = -bound + 2.0 * bound * i as f64 / n as f64;
        let v = det(x);
        if prev == 0.0 {
            roots.push(prev_x);
        } else if prev * v < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if det(lo) * det(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev = v;
    }
    roots
}

/// General two-qubit concurrence in the basis {ee, eg, ge, gg}.
///
/// Uses the singular values of `Wᵀ (σ_y⊗σ_y) W` with `ρ = W W†`, which are
/// the square roots of the eigenvalues of `ρ ρ̃`. Eigenvalues of `ρ` below
/// `1e-13` are dropped.
pub fn wootters_concurrence(rho: &Matrix4<Complex64>) -> f64 {
    let eig = SymmetricEigen::new(*rho);
    let kept: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > 1e-13).collect();
    if kept.is_empty() {
        return 0.0;
    }
    let w = DMatrix::from_fn(4, kept.len(), |r, c| {
        eig.eigenvectors[(r, kept[c])] * eig.eigenvalues[kept[c]].sqrt()
    });
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    // σ_y ⊗ σ_y is the antidiagonal (−1, 1, 1, −1)
    let yy = DMatrix::from_row_slice(
        4,
        4,
        &[z, z, z, -one, z, z, one, z, z, one, z, z, -one, z, z, z],
    );
    let tau = w.transpose() * yy * &w;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(4, 0.0);
    (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
}

/// Reduced two-qubit coefficients from the dressed-basis sums, with the
/// off-diagonal double sums taken over unordered pairs `n < m`.
pub fn paper_two_qubit(rho: &DressedDensityMatrix, basis: &DressedBasis) -> TwoQubitState {
    let c = basis.coefficients();
    let r = &rho.0;
    let pop = |k: usize| {
        let mut s = 0.0;
        for n in 0..5 {
            s += r[(n, n)].re * c[(n, k)] * c[(n, k)];
            for m in (n + 1)..5 {
                s += 2.0 * (r[(n, m)] * c[(m, k)] * c[(n, k)]).re;
            }
        }
        s
    };
    let mut r4 = Complex64::new(0.0, 0.0);
    for n in 0..5 {
        r4 += r[(n, n)] * c[(n, 4)] * c[(n, 0)];
        for m in 0..5 {
            if m != n {
                r4 += r[(n, m)] * c[(m, 4)] * c[(n, 0)];
            }
        }
    }
    TwoQubitState {
        r1: pop(0),
        r2: pop(4),
        r3: r[(VACUUM, VACUUM)].re + pop(1) + pop(2) + pop(3),
        r4,
    }
}
