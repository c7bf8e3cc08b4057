//! Free-fermion diagonalization of the quadratic form via the SVD of
//! `Z = A - B`.
//!
//! With `Phi Z Psi^T = diag(Lambda)` the normal modes are
//! `eta_k = sum_j g_kj c_j + h_kj c_j^+` with `g = (Phi + Psi) / 2` and
//! `h = (Phi - Psi) / 2`; the ground state is their common vacuum and has
//! energy `E0 = -sum_k Lambda_k / 2`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen};
use crate::model::{QuadraticForm, RealizationId};
use crate::C64;

#[derive(Clone, Debug)]
pub struct FermionDiagonalization {
    /// Quasiparticle energies `Lambda_k >= 0`, ascending.
    pub energies: DVector<f64>,
    /// Rows are the left singular vectors of `Z`.
    pub phi: DMatrix<f64>,
    /// Rows are the right singular vectors of `Z`.
    pub psi: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub ground_energy: f64,
    pub origin: RealizationId,
}

/// Which excitation energy is reported as the gap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapDefinition {
    /// Lowest single-quasiparticle energy.
    #[default]
    MinQuasiparticle,
    /// Lowest excitation preserving fermion parity (two quasiparticles).
    ParityResolved,
}

pub fn diagonalize(q: &QuadraticForm) -> Result<FermionDiagonalization> {
    let l = q.len();
    let svd = linalg::svd(&q.z()).ok_or(Error::SvdNonConvergence(q.origin))?;
    let (u, v) = (&svd.u, &svd.v);
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));

    let mut energies = DVector::zeros(l);
    let mut phi = DMatrix::zeros(l, l);
    let mut psi = DMatrix::zeros(l, l);
    for (k, &src) in order.iter().enumerate() {
        energies[k] = sv[src];
        // Sign gauge: the largest-magnitude entry of each row of Phi is positive.
        let col = u.column(src);
        let pivot = col.iter().copied().fold(0.0f64, |best, x| {
            if x.abs() > best.abs() {
                x
            } else {
                best
            }
        });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for j in 0..l {
            phi[(k, j)] = sign * u[(j, src)];
            psi[(k, j)] = sign * v[(j, src)];
        }
    }
    if energies.iter().any(|x| !x.is_finite()) {
        return Err(Error::SvdNonConvergence(q.origin));
    }
    let g = (&phi + &psi) * 0.5;
    let h = (&phi - &psi) * 0.5;
    let ground_energy = -0.5 * energies.sum();
    Ok(FermionDiagonalization {
        energies,
        phi,
        psi,
        g,
        h,
        ground_energy,
        origin: q.origin,
    })
}

impl FermionDiagonalization {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `Phi^T diag(Lambda) Psi`, which reproduces `Z`.
    pub fn reconstruct_z(&self) -> DMatrix<f64> {
        let mut scaled = self.psi.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= self.energies[k];
        }
        self.phi.transpose() * scaled
    }

    /// Orthogonal polar factor `Phi^T Psi` of `Z`. Its entries are the
    /// ground-state Majorana correlators `<(c_i^+ + c_i)(c_j^+ - c_j)>`.
    pub fn polar_factor(&self) -> DMatrix<f64> {
        self.phi.transpose() * &self.psi
    }

    /// All `2^L` many-body levels `E0 + sum_{k in S} Lambda_k`, ascending.
    pub fn many_body_spectrum(&self) -> Result<Vec<f64>> {
        let l = self.len();
        if l > 20 {
            return Err(Error::OutOfRange(format!(
                "many-body spectrum of {l} modes"
            )));
        }
        let mut levels: Vec<f64> = (0..1usize << l)
            .map(|mask| {
                self.ground_energy
                    + (0..l)
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| self.energies[k])
                        .sum::<f64>()
            })
            .collect();
        levels.sort_by(f64::total_cmp);
        Ok(levels)
    }
}

/// Lowest single-quasiparticle energy.
pub fn energy_gap(d: &FermionDiagonalization) -> f64 {
    d.energies[0]
}

pub fn energy_gap_with(d: &FermionDiagonalization, def: GapDefinition) -> f64 {
    match def {
        GapDefinition::MinQuasiparticle => d.energies[0],
        GapDefinition::ParityResolved => d.energies[0] + d.energies[1],
    }
}

/// Second-moment correlators `<c^+ c>`, `<c^+ c^+>`, `<c c>`, `<c c^+>` of a
/// Gaussian fermionic state.
pub trait FermionCorrelations {
    fn sites(&self) -> usize;
    /// `<c_i^+ c_j>`
    fn cdag_c(&self, i: usize, j: usize) -> C64;
    /// `<c_i^+ c_j^+>`
    fn cdag_cdag(&self, i: usize, j: usize) -> C64;
    /// `<c_i c_j>`
    fn c_c(&self, i: usize, j: usize) -> C64;
    /// `<c_i c_j^+>`
    fn c_cdag(&self, i: usize, j: usize) -> C64 {
        let delta = if i == j { 1.0 } else { 0.0 };
        C64::new(delta, 0.0) - self.cdag_c(j, i)
    }
}

/// Ground-state correlators evaluated lazily from `g` and `h`.
impl FermionCorrelations for FermionDiagonalization {
    fn sites(&self) -> usize {
        self.len()
    }

    fn cdag_c(&self, i: usize, j: usize) -> C64 {
        C64::new(self.h.column(i).dot(&self.h.column(j)), 0.0)
    }

    fn cdag_cdag(&self, i: usize, j: usize) -> C64 {
        C64::new(self.h.column(i).dot(&self.g.column(j)), 0.0)
    }

    fn c_c(&self, i: usize, j: usize) -> C64 {
        C64::new(self.g.column(i).dot(&self.h.column(j)), 0.0)
    }

    fn c_cdag(&self, i: usize, j: usize) -> C64 {
        C64::new(self.g.column(i).dot(&self.g.column(j)), 0.0)
    }
}

/// `G_ij = <Psi_i^+ Psi_j>` with `Psi^+ = (c_1^+ .. c_L^+, c_1 .. c_L)`.
///
/// Block layout: `[[<c^+ c>, <c^+ c^+>], [<c c>, <c c^+>]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(pub DMatrix<C64>);

impl CorrelationMatrix {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Occupations `<c_i^+ c_i>`.
    pub fn occupations(&self) -> Vec<f64> {
        (0..self.sites()).map(|i| self.0[(i, i)].re).collect()
    }
}

impl FermionCorrelations for CorrelationMatrix {
    fn sites(&self) -> usize {
        self.0.nrows() / 2
    }

    fn cdag_c(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    fn cdag_cdag(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j + self.sites())]
    }

    fn c_c(&self, i: usize, j: usize) -> C64 {
        let l = self.sites();
        self.0[(i + l, j)]
    }

    fn c_cdag(&self, i: usize, j: usize) -> C64 {
        let l = self.sites();
        self.0[(i + l, j + l)]
    }
}

pub fn ground_correlation_matrix(d: &FermionDiagonalization) -> CorrelationMatrix {
    let (g, h) = (&d.g, &d.h);
    let l = d.len();
    let mut out = DMatrix::zeros(2 * l, 2 * l);
    let blocks = [
        (0, 0, h.transpose() * h),
        (0, l, h.transpose() * g),
        (l, 0, g.transpose() * h),
        (l, l, g.transpose() * g),
    ];
    for (r0, c0, block) in blocks {
        out.view_mut((r0, c0), (l, l))
            .copy_from(&linalg::to_complex(&block));
    }
    CorrelationMatrix(out)
}

/// Bogoliubov-de Gennes matrix `H` with `H_op = Psi^+ H Psi / 2` and
/// `Psi = (c_1 .. c_L, c_1^+ .. c_L^+)`; block form `[[A, B], [-B, -A]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NambuHamiltonian(pub DMatrix<C64>);

impl NambuHamiltonian {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.0)
    }

    /// Largest deviation from `S H S = -H^*`, `S` swapping the two blocks.
    pub fn particle_hole_error(&self) -> f64 {
        let l = self.modes();
        let m = &self.0;
        let mut err = 0.0f64;
        for i in 0..2 * l {
            for j in 0..2 * l {
                let si = (i + l) % (2 * l);
                let sj = (j + l) % (2 * l);
                err = err.max((m[(si, sj)] + m[(i, j)].conj()).norm());
            }
        }
        err
    }
}

pub fn nambu_form(q: &QuadraticForm) -> NambuHamiltonian {
    let l = q.len();
    let mut out = DMatrix::zeros(2 * l, 2 * l);
    let blocks = [
        (0, 0, q.a.clone()),
        (0, l, q.b.clone()),
        (l, 0, -q.b.clone()),
        (l, l, -q.a.clone()),
    ];
    for (r0, c0, block) in blocks {
        out.view_mut((r0, c0), (l, l))
            .copy_from(&linalg::to_complex(&block));
    }
    NambuHamiltonian(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{clean_form, realization_form, ModelSpec};

    fn field_only(l: usize) -> QuadraticForm {
        let mut q = clean_form(&ModelSpec::ising(l, 1.0));
        q.a = DMatrix::from_diagonal_element(l, l, -2.0);
        q.b = DMatrix::zeros(l, l);
        q
    }

    fn check_invariants(d: &FermionDiagonalization, q: &QuadraticForm) {
        let l = d.len();
        let id = DMatrix::<f64>::identity(l, l);
        assert!(d.energies.iter().all(|&x| x >= -1e-12));
        assert!(d.energies.as_slice().windows(2).all(|w| w[0] <= w[1]));
        assert!((&d.phi * d.phi.transpose() - &id).amax() < 1e-10);
        assert!((&d.psi * d.psi.transpose() - &id).amax() < 1e-10);
        let diag = &d.phi * q.z() * d.psi.transpose();
        for i in 0..l {
            for j in 0..l {
                let expect = if i == j { d.energies[i] } else { 0.0 };
                assert!((diag[(i, j)] - expect).abs() < 1e-10, "{i} {j} {}", diag[(i, j)] - expect);
            }
        }
        let (g, h) = (&d.g, &d.h);
        assert!((g.transpose() * g + h.transpose() * h - &id).amax() < 1e-10);
        assert!((g.transpose() * h + h.transpose() * g).amax() < 1e-10);
        let scale = q.z().amax().max(1.0);
        assert!((d.reconstruct_z() - q.z()).amax() < 1e-10 * scale);
    }

    #[test]
    fn field_only_chain() {
        let q = field_only(5);
        let d = diagonalize(&q).unwrap();
        assert!(d.energies.iter().all(|&x| (x - 2.0).abs() < 1e-14));
        assert!((d.ground_energy + 5.0).abs() < 1e-13);
        assert!((energy_gap(&d) - 2.0).abs() < 1e-14);
        check_invariants(&d, &q);
    }

    #[test]
    fn invariants_on_random_realizations() {
        for (l, lambda, r) in [(6, 0.5, 0.3), (17, 1.0, 0.1), (40, 1.5, 0.2)] {
            let spec = ModelSpec::ising(l, lambda).with_disorder(r).with_seed(4);
            for stream in 0..5 {
                let q = realization_form(&spec, stream);
                let d = diagonalize(&q).unwrap();
                check_invariants(&d, &q);
            }
        }
    }

    #[test]
    fn gauge_is_reproducible() {
        let spec = ModelSpec::ising(12, 0.9).with_disorder(0.2).with_seed(2);
        let q = realization_form(&spec, 1);
        let a = diagonalize(&q).unwrap();
        let b = diagonalize(&q).unwrap();
        assert_eq!(a.phi, b.phi);
        for k in 0..12 {
            let row = a.phi.row(k);
            let pivot = row.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn gap_decays_in_ferromagnet() {
        let gap = |l| energy_gap(&diagonalize(&clean_form(&ModelSpec::ising(l, 0.5))).unwrap());
        assert!(gap(60) < gap(20));
    }

    #[test]
    fn nambu_spectrum_pairs() {
        let q = field_only(2);
        let eig = nambu_form(&q).eigen();
        let expect = [-2.0, -2.0, 2.0, 2.0];
        for (x, e) in eig.values.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12);
        }

        let spec = ModelSpec::ising(6, 0.8).with_disorder(0.3).with_seed(9);
        let q = realization_form(&spec, 0);
        let nambu = nambu_form(&q);
        assert!(linalg::hermiticity_error(nambu.matrix()) < 1e-12);
        assert!(nambu.particle_hole_error() < 1e-12);
        let d = diagonalize(&q).unwrap();
        let mut expect: Vec<f64> = d
            .energies
            .iter()
            .flat_map(|&x| [x, -x])
            .collect();
        expect.sort_by(f64::total_cmp);
        for (x, e) in nambu.eigen().values.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_correlations_are_pure() {
        let spec = ModelSpec::ising(7, 1.1).with_disorder(0.2).with_seed(3);
        let d = diagonalize(&realization_form(&spec, 2)).unwrap();
        let g = ground_correlation_matrix(&d);
        assert!(linalg::hermiticity_error(g.matrix()) < 1e-12);
        let eig = HermitianEigen::new(g.matrix());
        for x in eig.values.iter() {
            assert!(x.abs() < 1e-10 || (x - 1.0).abs() < 1e-10, "eigenvalue {x}");
        }
        for i in 0..7 {
            for j in 0..7 {
                assert!((g.cdag_c(i, j) - d.cdag_c(i, j)).norm() < 1e-12);
                assert!((g.cdag_cdag(i, j) - d.cdag_cdag(i, j)).norm() < 1e-12);
                assert!((g.c_c(i, j) - d.c_c(i, j)).norm() < 1e-12);
                assert!((g.c_cdag(i, j) - FermionCorrelations::c_cdag(&d, i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn field_aligned_ground_state_is_filled() {
        // sz = 2 c^+ c - 1, so the state with every spin along +z is fully occupied.
        let d = diagonalize(&field_only(4)).unwrap();
        for i in 0..4 {
            assert!((d.cdag_c(i, i).re - 1.0).abs() < 1e-14);
        }
    }
}
