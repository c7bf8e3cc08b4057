//! Static robustness observables of one disorder realization: global and
//! reduced simulator fidelities, `zz` correlations, correlation length and
//! block entanglement entropy.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::freefermion::{energy_gap, FermionCorrelations, FermionDiagonalization};
use crate::linalg::{self, binary_entropy, log_det_real, psd_sqrt, HermitianEigen};
use crate::C64;

/// Singular values below this fraction of the largest one count as zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// Points with `|C|` below this are dropped from correlation-length fits.
pub const CORRELATION_FLOOR: f64 = 1e-12;

/// One- or two-site density matrix in the `(up, down)` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    pub matrix: DMatrix<C64>,
}

impl ReducedDensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        ReducedDensityMatrix { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        HermitianEigen::new(&self.matrix).values.min()
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        linalg::hermiticity_error(&self.matrix) < tol
            && (self.trace() - 1.0).abs() < tol
            && self.min_eigenvalue() > -tol
    }
}

fn pauli(mu: usize) -> DMatrix<C64> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match mu {
        0 => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `<sz_i> = 2 <c_i^+ c_i> - 1`.
pub fn magnetization<C: FermionCorrelations + ?Sized>(corr: &C, site: usize) -> f64 {
    2.0 * corr.cdag_c(site, site).re - 1.0
}

/// Single-site density matrix `(1 + <sz> sz) / 2`; `<sx>` and `<sy>` are
/// odd under fermion parity and vanish for every Gaussian state.
pub fn single_site_rdm<C: FermionCorrelations + ?Sized>(
    corr: &C,
    site: usize,
) -> Result<ReducedDensityMatrix> {
    if site >= corr.sites() {
        return Err(Error::OutOfRange(format!(
            "site {site} of a {}-site chain",
            corr.sites()
        )));
    }
    let mz = magnetization(corr, site);
    let m = (pauli(0) + pauli(3) * C64::new(mz, 0.0)) * C64::new(0.5, 0.0);
    Ok(ReducedDensityMatrix::new(m))
}

/// The nine parity-even two-point Pauli correlators of sites `(i, i+1)`,
/// indexed `[mu][nu]` with `0 = identity, 1 = x, 2 = y, 3 = z`.
fn neighbour_paulis<C: FermionCorrelations + ?Sized>(corr: &C, i: usize) -> [[C64; 4]; 4] {
    let j = i + 1;
    let c = corr.cdag_c(i, j);
    let f = corr.cdag_cdag(i, j);
    let fp = corr.c_c(i, j);
    let d = corr.c_cdag(i, j);
    let ni = corr.cdag_c(i, i);
    let nj = corr.cdag_c(j, j);
    let minus_i = C64::new(0.0, -1.0);
    let one = C64::new(1.0, 0.0);

    let mut e = [[C64::new(0.0, 0.0); 4]; 4];
    e[0][0] = one;
    e[3][0] = ni * 2.0 - one;
    e[0][3] = nj * 2.0 - one;
    e[1][1] = f + c - d - fp;
    e[2][2] = -f + c - d + fp;
    e[1][2] = minus_i * (f - c - d + fp);
    e[2][1] = minus_i * (f + c + d + fp);
    // Wick: <n_i n_j> = n_i n_j - <c+c+><cc> + <c+c><cc+>
    let ninj = ni * nj - f * fp + c * d;
    e[3][3] = ninj * 4.0 - ni * 2.0 - nj * 2.0 + one;
    e
}

/// Density matrix of the nearest-neighbour pair `(site, site + 1)`.
pub fn two_site_rdm<C: FermionCorrelations + ?Sized>(
    corr: &C,
    site: usize,
) -> Result<ReducedDensityMatrix> {
    if site + 1 >= corr.sites() {
        return Err(Error::OutOfRange(format!(
            "bond {site} of a {}-site chain",
            corr.sites()
        )));
    }
    let e = neighbour_paulis(corr, site);
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for (mu, row) in e.iter().enumerate() {
        for (nu, &val) in row.iter().enumerate() {
            if val.norm() > 0.0 {
                m += pauli(mu).kronecker(&pauli(nu)) * val;
            }
        }
    }
    Ok(ReducedDensityMatrix::new(m * C64::new(0.25, 0.0)))
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho0) rho1 sqrt(rho0))`.
pub fn uhlmann_fidelity(rho0: &ReducedDensityMatrix, rho1: &ReducedDensityMatrix) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {}- and {}-dimensional states",
            rho0.dim(),
            rho1.dim()
        )));
    }
    let tol = 1e-10;
    let min1 = rho1.min_eigenvalue();
    if min1 < -tol {
        return Err(Error::NotPositiveSemidefinite(min1));
    }
    let s0 = psd_sqrt(&rho0.matrix, tol)?;
    let mut inner = &s0 * &rho1.matrix * &s0;
    // Symmetrize away rounding so the Hermitian solver sees a Hermitian input.
    inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let f: f64 = HermitianEigen::new(&inner)
        .values
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum();
    Ok(f.min(1.0))
}

/// Connected correlator `<sz_i sz_j> - <sz_i><sz_j>`
/// `= 4 (<c_i^+ c_j><c_i c_j^+> - <c_i^+ c_j^+><c_i c_j>)`.
pub fn zz_correlation<C: FermionCorrelations + ?Sized>(corr: &C, i: usize, j: usize) -> f64 {
    let v = corr.cdag_c(i, j) * corr.c_cdag(i, j) - corr.cdag_cdag(i, j) * corr.c_c(i, j);
    4.0 * v.re
}

/// `C(reference, reference + d)` for a run of separations `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationProfile {
    pub reference: usize,
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
}

/// Profile to the right of `reference` for every separation `1..`.
pub fn correlation_profile<C: FermionCorrelations + ?Sized>(
    corr: &C,
    reference: usize,
) -> CorrelationProfile {
    let l = corr.sites();
    let separations: Vec<usize> = (1..l - reference).collect();
    let values = separations
        .iter()
        .map(|&d| zz_correlation(corr, reference, reference + d))
        .collect();
    CorrelationProfile {
        reference,
        separations,
        values,
    }
}

/// Reference site `L/2` and fit window `[L/8, 3L/8]`.
pub fn default_xi_window(length: usize) -> (usize, RangeInclusive<usize>) {
    (length / 2, (length / 8).max(1)..=(3 * length / 8))
}

/// `xi = -1 / slope` of `ln|C|` against separation inside `window`.
pub fn correlation_length(profile: &CorrelationProfile, window: RangeInclusive<usize>) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = profile
        .separations
        .iter()
        .zip(&profile.values)
        .filter(|(d, c)| window.contains(d) && c.abs() >= CORRELATION_FLOOR)
        .map(|(&d, c)| (d as f64, c.abs().ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InsufficientPoints(format!(
            "{} usable correlation points in window {:?}",
            xs.len(),
            window
        )));
    }
    let fit = linalg::fit_line(&xs, &ys)?;
    if fit.slope >= 0.0 {
        return Err(Error::NoExponentialDecay(fit.slope));
    }
    Ok(-1.0 / fit.slope)
}

fn entropy_of_block(polar: &DMatrix<f64>, cut: usize) -> f64 {
    let block = polar.view((0, 0), (cut, cut)).into_owned();
    let values = linalg::singular_values(&block).unwrap_or_else(|| block.singular_values().as_slice().to_vec());
    values
        .iter()
        .map(|&nu| binary_entropy(0.5 * (1.0 + nu.min(1.0))))
        .sum()
}

/// Von Neumann entropy (natural log) of the leftmost `cut` sites.
///
/// The block's Majorana correlations `<(c_i^+ + c_i)(c_j^+ - c_j)>` are the
/// restriction of the polar factor `Phi^T Psi`; its singular values `nu`
/// give `S = sum H((1 + nu) / 2)`.
pub fn entanglement_entropy(d: &FermionDiagonalization, cut: usize) -> Result<f64> {
    Ok(entanglement_profile(d, &[cut])?[0])
}

/// Entropies for several cuts, sharing one polar factor.
pub fn entanglement_profile(d: &FermionDiagonalization, cuts: &[usize]) -> Result<Vec<f64>> {
    let l = d.len();
    if let Some(bad) = cuts.iter().find(|&&c| c == 0 || c >= l) {
        return Err(Error::OutOfRange(format!("cut {bad} of a {l}-site chain")));
    }
    let polar = d.polar_factor();
    Ok(cuts.iter().map(|&c| entropy_of_block(&polar, c)).collect())
}

fn zero_modes(d: &FermionDiagonalization) -> Vec<usize> {
    let scale = d.energies.max().max(1.0);
    (0..d.len())
        .filter(|&k| d.energies[k] <= ZERO_MODE_TOL * scale)
        .collect()
}

/// `Phi^T S Psi` where `S` flips the sign of the modes in `flipped`.
fn polar_with_flips(d: &FermionDiagonalization, flipped: &[usize]) -> DMatrix<f64> {
    let mut psi = d.psi.clone();
    for &k in flipped {
        psi.row_mut(k).neg_mut();
    }
    d.phi.transpose() * psi
}

fn overlap_from_polars(t0: &DMatrix<f64>, t1: &DMatrix<f64>) -> Result<f64> {
    let l = t0.nrows();
    let m = (DMatrix::identity(l, l) + t0.transpose() * t1) * 0.5;
    let ld = log_det_real(m)?;
    if ld.log_abs.is_nan() {
        return Err(Error::NonFinite("overlap determinant".into()));
    }
    Ok(ld.sqrt_abs())
}

/// Ground-state overlap `|<Psi_0|Psi_r>| = sqrt|det((1 + T0^-1 T1) / 2)|`.
///
/// `T = (Phi^-1 Lambda Phi)^-1 Z` is the orthogonal polar factor
/// `Phi^T Psi` of `Z`, which is formed directly so no inverse of a
/// near-singular matrix is needed, and `T0^-1 = T0^T`. When a chain has an
/// exact zero mode its ground space is two-fold degenerate (one state per
/// fermion parity); the overlap then is the largest one over both ground
/// states, i.e. the norm of the projection onto the ground space.
pub fn global_fidelity(ideal: &FermionDiagonalization, disordered: &FermionDiagonalization) -> Result<f64> {
    if ideal.len() != disordered.len() {
        return Err(Error::DimensionMismatch(format!(
            "overlap of {}- and {}-site ground states",
            ideal.len(),
            disordered.len()
        )));
    }
    let z0 = zero_modes(ideal);
    let z1 = zero_modes(disordered);
    if z0.len() + z1.len() > 2 || z0.len() > 1 || z1.len() > 1 {
        return Err(Error::ZeroModeOverlap(format!(
            "{} and {} zero modes in realization {}",
            z0.len(),
            z1.len(),
            disordered.origin
        )));
    }
    let variants = |d: &FermionDiagonalization, z: &[usize]| -> Vec<DMatrix<f64>> {
        let mut out = vec![polar_with_flips(d, &[])];
        if !z.is_empty() {
            out.push(polar_with_flips(d, z));
        }
        out
    };
    let mut best: f64 = 0.0;
    for t0 in variants(ideal, &z0) {
        for t1 in variants(disordered, &z1) {
            best = best.max(overlap_from_polars(&t0, &t1)?);
        }
    }
    if !best.is_finite() {
        return Err(Error::ZeroModeOverlap(format!(
            "non-finite overlap in realization {}",
            disordered.origin
        )));
    }
    Ok(best.min(1.0))
}

/// The overlap formula evaluated literally, with explicit inverses:
/// `T = (Phi^-1 Lambda Phi)^-1 Z`. Only meaningful for well-conditioned `Z`.
pub fn global_fidelity_literal(
    ideal: &FermionDiagonalization,
    disordered: &FermionDiagonalization,
) -> Result<f64> {
    let t = |d: &FermionDiagonalization| -> Result<DMatrix<f64>> {
        let phi_inv = d
            .phi
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::ZeroModeOverlap("singular Phi".into()))?;
        let lam = DMatrix::from_diagonal(&d.energies);
        let root = phi_inv * lam * &d.phi;
        let root_inv = root
            .try_inverse()
            .ok_or_else(|| Error::ZeroModeOverlap("singular |Z|".into()))?;
        Ok(root_inv * d.reconstruct_z())
    };
    let t0 = t(ideal)?;
    let t1 = t(disordered)?;
    let t0_inv = t0
        .try_inverse()
        .ok_or_else(|| Error::ZeroModeOverlap("singular T".into()))?;
    let l = t1.nrows();
    let m = (DMatrix::identity(l, l) + t0_inv * t1) * 0.5;
    Ok(log_det_real(m)?.sqrt_abs())
}

/// Ideal-chain quantities reused across every realization at one `lambda`.
#[derive(Clone, Debug)]
pub struct StaticsReference {
    pub ideal: FermionDiagonalization,
    pub single: Vec<ReducedDensityMatrix>,
    pub pairs: Vec<ReducedDensityMatrix>,
}

impl StaticsReference {
    pub fn new(ideal: FermionDiagonalization) -> Result<Self> {
        let l = ideal.len();
        let single = (0..l)
            .map(|i| single_site_rdm(&ideal, i))
            .collect::<Result<_>>()?;
        let pairs = (0..l - 1)
            .map(|i| two_site_rdm(&ideal, i))
            .collect::<Result<_>>()?;
        Ok(StaticsReference {
            ideal,
            single,
            pairs,
        })
    }
}

/// Per-realization statics. `xi` is `NaN` when the fit window holds no
/// usable exponential decay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticObservables {
    pub fidelity: f64,
    /// Site-averaged single-site fidelity.
    pub f1: f64,
    /// Bond-averaged two-site fidelity.
    pub f2: f64,
    pub xi: f64,
    pub gap: f64,
}

/// Mean single-site Uhlmann fidelity over all sites.
pub fn mean_single_site_fidelity(reference: &StaticsReference, d: &FermionDiagonalization) -> Result<f64> {
    let mut sum = 0.0;
    for (i, rho0) in reference.single.iter().enumerate() {
        sum += uhlmann_fidelity(rho0, &single_site_rdm(d, i)?)?;
    }
    Ok(sum / reference.single.len() as f64)
}

/// Mean nearest-neighbour two-site Uhlmann fidelity over all bonds.
pub fn mean_two_site_fidelity(reference: &StaticsReference, d: &FermionDiagonalization) -> Result<f64> {
    let mut sum = 0.0;
    for (i, rho0) in reference.pairs.iter().enumerate() {
        sum += uhlmann_fidelity(rho0, &two_site_rdm(d, i)?)?;
    }
    Ok(sum / reference.pairs.len() as f64)
}

pub fn static_observables(
    reference: &StaticsReference,
    d: &FermionDiagonalization,
) -> Result<StaticObservables> {
    let fidelity = global_fidelity(&reference.ideal, d)?;
    let f1 = mean_single_site_fidelity(reference, d)?;
    let f2 = mean_two_site_fidelity(reference, d)?;
    let (i0, window) = default_xi_window(d.len());
    let xi = correlation_length(&correlation_profile(d, i0), window).unwrap_or(f64::NAN);
    Ok(StaticObservables {
        fidelity,
        f1,
        f2,
        xi,
        gap: energy_gap(d),
    })
}

/// Vector of the diagonal `<c_i^+ c_i>`.
pub fn occupations<C: FermionCorrelations + ?Sized>(corr: &C) -> DVector<f64> {
    DVector::from_iterator(corr.sites(), (0..corr.sites()).map(|i| corr.cdag_c(i, i).re))
}
