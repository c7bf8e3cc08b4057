//! Brute-force reference in the full `2^L` Hilbert space.
//!
//! Basis convention: bit `i` of a basis index is `1` when spin `i` points
//! along `+z`, which is also the Jordan-Wigner occupation of site `i`.
//! Reduced density matrices are written in the local basis `(up, down)`
//! so that `sz = diag(1, -1)`.

mod ops;
mod validate;

use nalgebra::{DMatrix, DVector};

pub use ops::Monomial;
pub use validate::{validate_against_oracle, Check, ValidationOptions, ValidationReport, DYNAMICS_TOLERANCE, STATICS_TOLERANCE};

use crate::error::{Error, Result};
use crate::linalg::{binary_entropy, HermitianEigen};
use crate::model::{DisorderRealization, ModelSpec};
use crate::statics::ReducedDensityMatrix;
use crate::C64;

pub const MAX_SITES: usize = 12;

fn check_size(sites: usize) -> Result<()> {
    if sites > MAX_SITES {
        Err(Error::OracleTooLarge(sites))
    } else {
        Ok(())
    }
}

/// Dense operator on `sites` spins.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub sites: usize,
    pub matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.matrix)
    }
}

/// Pure or mixed many-body state.
#[derive(Clone, Debug)]
pub enum DenseState {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

impl DenseState {
    pub fn dim(&self) -> usize {
        match self {
            DenseState::Pure(v) => v.len(),
            DenseState::Mixed(m) => m.nrows(),
        }
    }

    pub fn density_matrix(&self) -> DMatrix<C64> {
        match self {
            DenseState::Pure(v) => v * v.adjoint(),
            DenseState::Mixed(m) => m.clone(),
        }
    }
}

/// `H = -sum_i J_i [(1+g)/2 sx sx + (1-g)/2 sy sy]_{i,i+1} - sum_i h_i sz_i`.
pub fn dense_hamiltonian(real: &DisorderRealization, spec: &ModelSpec) -> Result<DenseOperator> {
    let l = real.fields.len();
    check_size(l)?;
    let dim = 1usize << l;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let gamma = spec.gamma;
    for (i, &h) in real.fields.iter().enumerate() {
        m += Monomial::sigma_z(l, i).to_dense() * C64::new(-h, 0.0);
    }
    for (i, &j) in real.bonds.iter().enumerate() {
        let xx = Monomial::sigma_x(l, i).mul(&Monomial::sigma_x(l, i + 1));
        m += xx.to_dense() * C64::new(-j * 0.5 * (1.0 + gamma), 0.0);
        if gamma != 1.0 {
            let yy = Monomial::sigma_y(l, i).mul(&Monomial::sigma_y(l, i + 1));
            m += yy.to_dense() * C64::new(-j * 0.5 * (1.0 - gamma), 0.0);
        }
    }
    Ok(DenseOperator { sites: l, matrix: m })
}

/// Ground energy and one ground-state vector.
pub fn dense_ground(h: &DenseOperator) -> (f64, DVector<C64>) {
    let eig = h.eigen();
    (eig.values[0], eig.vectors.column(0).into_owned())
}

/// Orthonormal basis of all eigenvectors within `tol` of the ground energy.
pub fn dense_ground_space(h: &DenseOperator, tol: f64) -> Vec<DVector<C64>> {
    let eig = h.eigen();
    let e0 = eig.values[0];
    (0..eig.values.len())
        .take_while(|&k| eig.values[k] - e0 <= tol)
        .map(|k| eig.vectors.column(k).into_owned())
        .collect()
}

/// `E_1 - E_0`.
pub fn dense_gap(h: &DenseOperator) -> f64 {
    let eig = h.eigen();
    eig.values[1] - eig.values[0]
}

pub fn dense_expect(state: &DenseState, op: &Monomial) -> C64 {
    match state {
        DenseState::Pure(v) => op.expect_pure(v),
        DenseState::Mixed(rho) => op.expect_mixed(rho),
    }
}

pub fn dense_expect_operator(state: &DenseState, op: &DMatrix<C64>) -> C64 {
    match state {
        DenseState::Pure(v) => (v.adjoint() * op * v)[(0, 0)],
        DenseState::Mixed(rho) => (rho * op).trace(),
    }
}

/// `|<a|b>|`.
pub fn dense_overlap(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm()
}

/// Norm of the projection of `state` onto the span of orthonormal `basis`.
pub fn dense_subspace_overlap(state: &DVector<C64>, basis: &[DVector<C64>]) -> f64 {
    basis
        .iter()
        .map(|b| b.dotc(state).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Evolution by `exp(-i H t)`, given a precomputed eigendecomposition.
pub fn dense_evolve_with(state: &DenseState, eig: &HermitianEigen, t: f64) -> DenseState {
    match state {
        DenseState::Pure(v) => {
            let mut coeffs = eig.vectors.adjoint() * v;
            for (c, &e) in coeffs.iter_mut().zip(eig.values.iter()) {
                *c *= C64::new(0.0, -e * t).exp();
            }
            DenseState::Pure(&eig.vectors * coeffs)
        }
        DenseState::Mixed(rho) => {
            let u = eig.exp(C64::new(0.0, -t));
            DenseState::Mixed(&u * rho * u.adjoint())
        }
    }
}

pub fn dense_evolve(state: &DenseState, h: &DenseOperator, t: f64) -> DenseState {
    dense_evolve_with(state, &h.eigen(), t)
}

/// Gibbs state `exp(-H/T) / Z`.
pub fn dense_thermal(h: &DenseOperator, temperature: f64) -> DMatrix<C64> {
    let eig = h.eigen();
    let e0 = eig.values[0];
    let z: f64 = eig.values.iter().map(|e| (-(e - e0) / temperature).exp()).sum();
    eig.apply(|e| C64::new((-(e - e0) / temperature).exp() / z, 0.0))
}

/// Reduced density matrix of the `kept` sites, in the given site order.
pub fn dense_partial_trace(state: &DenseState, kept: &[usize]) -> ReducedDensityMatrix {
    let dim = state.dim();
    let k = kept.len();
    let sub = 1usize << k;
    let mask: usize = kept.iter().map(|&s| 1usize << s).sum();
    // Local index: first kept site is the most significant factor; up -> 0.
    let local = |s: usize| -> usize {
        kept.iter()
            .fold(0, |acc, &site| (acc << 1) | (1 - ((s >> site) & 1)))
    };
    let embed = |rest: usize, a: usize| -> usize {
        kept.iter().enumerate().fold(rest, |acc, (pos, &site)| {
            let bit = 1 - ((a >> (k - 1 - pos)) & 1);
            acc | (bit << site)
        })
    };
    let mut rho = DMatrix::<C64>::zeros(sub, sub);
    for s in 0..dim {
        let a = local(s);
        let rest = s & !mask;
        for b in 0..sub {
            let t = embed(rest, b);
            rho[(a, b)] += match state {
                DenseState::Pure(v) => v[s] * v[t].conj(),
                DenseState::Mixed(m) => m[(s, t)],
            };
        }
    }
    ReducedDensityMatrix::new(rho)
}

/// Von Neumann entropy (natural log).
pub fn dense_entropy(rho: &DMatrix<C64>) -> f64 {
    HermitianEigen::new(rho)
        .values
        .iter()
        .map(|&p| if p > 1e-300 { -p * p.ln() } else { 0.0 })
        .sum()
}

/// Entropy of the left block of `cut` sites.
pub fn dense_block_entropy(state: &DenseState, cut: usize) -> f64 {
    let kept: Vec<usize> = (0..cut).collect();
    dense_entropy(&dense_partial_trace(state, &kept).matrix)
}

/// `<c_i^+ c_j>` and friends from a dense state, in the layout of
/// [`crate::freefermion::CorrelationMatrix`].
pub fn dense_correlation_matrix(state: &DenseState, sites: usize) -> DMatrix<C64> {
    let l = sites;
    let c: Vec<Monomial> = (0..l).map(|j| Monomial::annihilate(l, j)).collect();
    let cd: Vec<Monomial> = (0..l).map(|j| Monomial::create(l, j)).collect();
    let mut g = DMatrix::zeros(2 * l, 2 * l);
    for i in 0..l {
        for j in 0..l {
            g[(i, j)] = dense_expect(state, &cd[i].mul(&c[j]));
            g[(i, j + l)] = dense_expect(state, &cd[i].mul(&cd[j]));
            g[(i + l, j)] = dense_expect(state, &c[i].mul(&c[j]));
            g[(i + l, j + l)] = dense_expect(state, &c[i].mul(&cd[j]));
        }
    }
    g
}

/// Binary entropy re-exported for oracle-side Gaussian checks.
pub fn mode_entropy(p: f64) -> f64 {
    binary_entropy(p)
}
