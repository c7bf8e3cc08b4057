//! Quench dynamics: zero-temperature Loschmidt-type fidelity through
//! determinant formulas in the doubled (Nambu) space, thermal initial states
//! and single-site thermal fidelities.
//!
//! Conventions: `H_op = Psi^+ H Psi / 2` with `Psi = (c, c^+)`, and
//! `G_ij = <Psi_i^+ Psi_j>`. Heisenberg evolution is
//! `Psi(t) = exp(-i H t) Psi`, so `G(t) = conj(U) G U^T` with
//! `U = exp(-i H t)`; for the real Ising `H` this is
//! `exp(i H t) G exp(-i H t)`. Doubling makes every determinant the square
//! of the Fock-space quantity, hence the square roots below.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freefermion::{
    diagonalize, ground_correlation_matrix, nambu_form, CorrelationMatrix, FermionDiagonalization,
    NambuHamiltonian,
};
use crate::linalg::{self, log_det, HermitianEigen, LogDet};
use crate::model::{assemble_quadratic_form, DisorderRealization, DisorderScaling, ModelSpec};
use crate::statics::{single_site_rdm, uhlmann_fidelity};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "site")]
pub enum QuenchKind {
    /// Every field is shifted.
    Global,
    /// Only the field on one site is shifted.
    Local(usize),
}

impl QuenchKind {
    pub fn label(&self) -> &'static str {
        match self {
            QuenchKind::Global => "global",
            QuenchKind::Local(_) => "local",
        }
    }
}

/// Instantaneous field quench `lambda_initial -> lambda_initial + delta_lambda`
/// at `t = 0`; times in units of `1/J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchProtocol {
    pub kind: QuenchKind,
    pub lambda_initial: f64,
    pub delta_lambda: f64,
    pub times: Vec<f64>,
}

impl QuenchProtocol {
    pub fn validate(&self, length: usize) -> Result<()> {
        if let QuenchKind::Local(site) = self.kind {
            if site >= length {
                return Err(Error::OutOfRange(format!(
                    "local quench site {site} of a {length}-site chain"
                )));
            }
        }
        if self.times.iter().any(|&t| !(t >= 0.0)) {
            return Err(Error::InvalidSpec("quench times must be nonnegative".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("quench times must be increasing".into()));
        }
        Ok(())
    }
}

/// Gaussian thermal state of a free-fermion Hamiltonian.
#[derive(Clone, Debug)]
pub struct ThermalState {
    pub temperature: f64,
    pub correlations: CorrelationMatrix,
}

/// `det(1 + e^P e^Q)` for Hermitian `P`, `Q` in the doubled space.
///
/// Evaluated in factored form so that large exponents cannot overflow: with
/// `e^D = B S` split into parts `>= 1` and `<= 1` and `W = U_P^+ U_Q`,
/// `det(1 + e^P e^Q) = det B_P det B_Q det W^+ det(B_P^-1 W B_Q^-1 + S_P W S_Q)`.
/// For operators `Psi^+ P Psi / 2` the Fock-space trace is the square root.
pub fn levitov_trace(p: &DMatrix<C64>, q: &DMatrix<C64>) -> Result<LogDet> {
    if p.shape() != q.shape() || !p.is_square() {
        return Err(Error::DimensionMismatch("Levitov trace operands".into()));
    }
    for m in [p, q] {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Levitov trace operand".into()));
        }
        let err = linalg::hermiticity_error(m);
        if err > 1e-10 * linalg::max_abs(m).max(1.0) {
            return Err(Error::NotHermitian(err));
        }
    }
    let ep = HermitianEigen::new(p);
    let eq = HermitianEigen::new(q);
    let w = ep.vectors.adjoint() * &eq.vectors;
    let n = p.nrows();
    let big = |x: f64| x.max(0.0);
    let small = |x: f64| x.min(0.0);
    let mut core = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let a = (-big(ep.values[i]) - big(eq.values[j])).exp();
            let b = (small(ep.values[i]) + small(eq.values[j])).exp();
            core[(i, j)] = w[(i, j)] * (a + b);
        }
    }
    let core_det = log_det(core)?;
    let w_det = log_det(w.adjoint())?;
    let log_big: f64 = ep.values.iter().chain(eq.values.iter()).map(|&x| big(x)).sum();
    Ok(LogDet {
        log_abs: core_det.log_abs + w_det.log_abs + log_big,
        phase: core_det.phase * w_det.phase,
    })
}

/// Reusable evolution operator `exp(-i H t)` of a Nambu Hamiltonian.
#[derive(Clone, Debug)]
pub struct NambuPropagator {
    eigen: HermitianEigen,
}

impl NambuPropagator {
    pub fn new(h: &NambuHamiltonian) -> Self {
        NambuPropagator { eigen: h.eigen() }
    }

    /// `exp(s H)`.
    pub fn exp(&self, s: C64) -> DMatrix<C64> {
        self.eigen.exp(s)
    }

    /// `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        self.exp(C64::new(0.0, -t))
    }

    pub fn evolve(&self, g: &CorrelationMatrix, t: f64) -> CorrelationMatrix {
        let u = self.unitary(t);
        CorrelationMatrix(linalg::matmul(&linalg::matmul(&u.conjugate(), g.matrix()), &u.transpose()))
    }

    /// Only `<c_i^+ c_i>(t)`, without forming the full evolved matrix.
    pub fn evolve_occupations(&self, g: &CorrelationMatrix, t: f64) -> Vec<f64> {
        let l = g.matrix().nrows() / 2;
        let e = &self.eigen;
        let mut scaled = e.vectors.rows(0, l).into_owned();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from_polar(1.0, -e.values[k] * t);
        }
        let top = linalg::matmul(&scaled, &e.vectors.adjoint());
        let right = linalg::matmul(g.matrix(), &top.transpose());
        (0..l)
            .map(|i| {
                top.row(i)
                    .iter()
                    .zip(right.column(i).iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
                    .re
            })
            .collect()
    }
}

/// Heisenberg evolution `G(t) = conj(U) G U^T`, `U = exp(-i H t)`.
pub fn evolve_correlation_matrix(g: &CorrelationMatrix, h: &NambuHamiltonian, t: f64) -> CorrelationMatrix {
    NambuPropagator::new(h).evolve(g, t)
}

/// Gibbs state at temperature `T` (`k_B = 1`): quasiparticle occupations
/// `n_k = 1 / (exp(Lambda_k / T) + 1)` mapped back to the site basis.
pub fn thermal_state(d: &FermionDiagonalization, temperature: f64) -> Result<ThermalState> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let l = d.len();
    let occ: Vec<f64> = d
        .energies
        .iter()
        .map(|&e| 1.0 / ((e / temperature).exp() + 1.0))
        .collect();
    let weighted = |m: &DMatrix<f64>, w: &dyn Fn(f64) -> f64| {
        let mut out = m.clone();
        for (k, mut row) in out.row_iter_mut().enumerate() {
            row *= w(occ[k]);
        }
        out
    };
    let (g, h) = (&d.g, &d.h);
    let gn = weighted(g, &|n| n);
    let hn = weighted(h, &|n| n);
    let gm = weighted(g, &|n| 1.0 - n);
    let hm = weighted(h, &|n| 1.0 - n);
    let blocks = [
        (0, 0, g.transpose() * &gn + h.transpose() * &hm),
        (0, l, g.transpose() * &hn + h.transpose() * &gm),
        (l, 0, h.transpose() * &gn + g.transpose() * &hm),
        (l, l, h.transpose() * &hn + g.transpose() * &gm),
    ];
    let mut out = DMatrix::zeros(2 * l, 2 * l);
    for (r0, c0, block) in blocks {
        out.view_mut((r0, c0), (l, l))
            .copy_from(&linalg::to_complex(&block));
    }
    Ok(ThermalState {
        temperature,
        correlations: CorrelationMatrix(out),
    })
}

/// Precomputed pieces for `F(t) = |<psi0| e^{i H_r t} e^{-i H_0 t} |psi0>|`.
#[derive(Clone, Debug)]
pub struct LoschmidtPropagator {
    g0: DMatrix<C64>,
    ideal: NambuPropagator,
    perturbed: NambuPropagator,
}

impl LoschmidtPropagator {
    pub fn new(g0: &CorrelationMatrix, h0: &NambuHamiltonian, hr: &NambuHamiltonian) -> Result<Self> {
        let n = g0.matrix().nrows();
        if h0.matrix().nrows() != n || hr.matrix().nrows() != n {
            return Err(Error::DimensionMismatch(
                "correlation matrix and Nambu Hamiltonians".into(),
            ));
        }
        Ok(LoschmidtPropagator {
            g0: g0.matrix().clone(),
            ideal: NambuPropagator::new(h0),
            perturbed: NambuPropagator::new(hr),
        })
    }

    /// Shares the ideal propagator between realizations.
    pub fn with_ideal(g0: &CorrelationMatrix, ideal: NambuPropagator, hr: &NambuHamiltonian) -> Self {
        LoschmidtPropagator {
            g0: g0.matrix().clone(),
            ideal,
            perturbed: NambuPropagator::new(hr),
        }
    }

    /// `det(1 - G0 + G0 e^{i H_r t} e^{-i H_0 t})`, the square of the
    /// many-body amplitude.
    pub fn determinant(&self, t: f64) -> Result<LogDet> {
        self.determinant_with(t, &self.ideal.unitary(t))
    }

    fn determinant_with(&self, t: f64, ideal_unitary: &DMatrix<C64>) -> Result<LogDet> {
        let m = self.perturbed.exp(C64::new(0.0, t)) * ideal_unitary;
        let n = self.g0.nrows();
        let x = DMatrix::<C64>::identity(n, n) + &self.g0 * (m - DMatrix::<C64>::identity(n, n));
        log_det(x)
    }

    /// Fidelity: principal square root of the determinant modulus.
    pub fn fidelity(&self, t: f64) -> Result<f64> {
        let det = self.determinant(t)?;
        let f = det.sqrt_abs();
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("Loschmidt determinant at t = {t}")));
        }
        Ok(f)
    }

    /// Fidelity on a time grid, reusing precomputed ideal unitaries.
    pub fn fidelity_series(&self, times: &[f64], ideal_unitaries: Option<&[DMatrix<C64>]>) -> Result<Vec<f64>> {
        times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let det = match ideal_unitaries {
                    Some(us) => self.determinant_with(t, &us[k])?,
                    None => self.determinant(t)?,
                };
                let f = det.sqrt_abs();
                if f.is_finite() {
                    Ok(f)
                } else {
                    Err(Error::NonFinite(format!("Loschmidt determinant at t = {t}")))
                }
            })
            .collect()
    }
}

pub fn zero_temperature_fidelity(
    g0: &CorrelationMatrix,
    h0: &NambuHamiltonian,
    hr: &NambuHamiltonian,
    t: f64,
) -> Result<f64> {
    LoschmidtPropagator::new(g0, h0, hr)?.fidelity(t)
}

/// Uhlmann fidelity of the single-site states built from the diagonals of
/// two correlation matrices.
pub fn thermal_reduced_fidelity(
    ideal: &CorrelationMatrix,
    disordered: &CorrelationMatrix,
    site: usize,
) -> Result<f64> {
    uhlmann_fidelity(&single_site_rdm(ideal, site)?, &single_site_rdm(disordered, site)?)
}

/// Same as [`thermal_reduced_fidelity`], from occupations alone. The
/// single-site states are diagonal, so the fidelity reduces to
/// `sqrt(p q) + sqrt((1-p)(1-q))`.
pub fn occupation_fidelity(p: f64, q: f64) -> f64 {
    let (p, q) = (p.clamp(0.0, 1.0), q.clamp(0.0, 1.0));
    ((p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt()).min(1.0)
}

/// Couplings after the quench, with or without the realization's disorder.
pub fn quench_couplings(
    spec: &ModelSpec,
    kind: QuenchKind,
    lambda_before: f64,
    lambda_after: f64,
    real: Option<&DisorderRealization>,
) -> DisorderRealization {
    let l = spec.length;
    let j = spec.coupling;
    let mut base = DisorderRealization::clean(spec);
    base.fields = (0..l)
        .map(|i| match kind {
            QuenchKind::Global => lambda_after * j,
            QuenchKind::Local(s) if s == i => lambda_after * j,
            QuenchKind::Local(_) => lambda_before * j,
        })
        .collect();
    if let Some(real) = real {
        let amp = spec.disorder
            * match spec.scaling {
                DisorderScaling::Prefactor => 1.0,
                DisorderScaling::Variance => spec.disorder.sqrt(),
            };
        base.id = real.id;
        base.delta = real.delta.clone();
        base.eta = real.eta.clone();
        for (b, d) in base.bonds.iter_mut().zip(&real.delta) {
            *b *= 1.0 + amp * d;
        }
        for (h, e) in base.fields.iter_mut().zip(&real.eta) {
            *h *= 1.0 + amp * e;
        }
    }
    base
}

/// Ideal side of a zero-temperature quench, shared across realizations.
#[derive(Clone, Debug)]
pub struct QuenchSetup {
    pub spec: ModelSpec,
    pub protocol: QuenchProtocol,
    /// `P^dagger`, where the initial correlation matrix is the projector `P P^dagger`.
    occupied_adj: DMatrix<C64>,
    /// `e^{-i H_0 t} P` on the time grid.
    ideal_evolved: Vec<DMatrix<C64>>,
}

impl QuenchSetup {
    pub fn new(spec: &ModelSpec, protocol: &QuenchProtocol) -> Result<Self> {
        spec.validate()?;
        protocol.validate(spec.length)?;
        let before = protocol.lambda_initial;
        let after = before + protocol.delta_lambda;
        let pre = quench_couplings(spec, QuenchKind::Global, before, before, None);
        let initial = ground_correlation_matrix(&diagonalize(&assemble_quadratic_form(&pre, spec))?);
        let l = spec.length;
        let occupied = HermitianEigen::new(initial.matrix()).vectors.columns(l, l).into_owned();
        let post = quench_couplings(spec, protocol.kind, before, after, None);
        let ideal = NambuPropagator::new(&nambu_form(&assemble_quadratic_form(&post, spec)));
        let ideal_evolved = protocol.times.iter().map(|&t| ideal.unitary(t) * &occupied).collect();
        Ok(QuenchSetup {
            spec: spec.clone(),
            protocol: protocol.clone(),
            occupied_adj: occupied.adjoint(),
            ideal_evolved,
        })
    }

    /// `F(t)` on the protocol's time grid for one disorder realization.
    ///
    /// With a pure initial state `G0 = P P^dagger`, the Loschmidt determinant
    /// collapses to the `L x L` determinant `det(P^dagger e^{i H_r t} e^{-i H_0 t} P)`.
    pub fn run(&self, real: &DisorderRealization) -> Result<Vec<f64>> {
        let before = self.protocol.lambda_initial;
        let after = before + self.protocol.delta_lambda;
        let post = quench_couplings(&self.spec, self.protocol.kind, before, after, Some(real));
        let eigen = nambu_form(&assemble_quadratic_form(&post, &self.spec)).eigen();
        let left = linalg::matmul(&self.occupied_adj, &eigen.vectors);
        let right_basis = eigen.vectors.adjoint();
        self.protocol
            .times
            .iter()
            .zip(&self.ideal_evolved)
            .map(|(&t, evolved)| {
                let mut right = linalg::matmul(&right_basis, evolved);
                for (k, mut row) in right.row_iter_mut().enumerate() {
                    row *= C64::from_polar(1.0, eigen.values[k] * t);
                }
                let f = log_det(linalg::matmul(&left, &right))?.sqrt_abs();
                if f.is_finite() {
                    Ok(f)
                } else {
                    Err(Error::NonFinite(format!("Loschmidt determinant at t = {t} ({})", real.id)))
                }
            })
            .collect()
    }
}

/// Zero-temperature quench from the ideal ground state at `lambda_initial`:
/// the state evolves once with the ideal post-quench Hamiltonian and once
/// with the disordered one, and `F(t)` is their overlap.
pub fn run_quench(spec: &ModelSpec, protocol: &QuenchProtocol, real: &DisorderRealization) -> Result<Vec<f64>> {
    QuenchSetup::new(spec, protocol)?.run(real)
}

/// Ideal side of a thermal quench: Gibbs state of the ideal chain at
/// `lambda_initial`, evolved under the ideal chain at `lambda_final`.
#[derive(Clone, Debug)]
pub struct ThermalQuenchSetup {
    pub spec: ModelSpec,
    pub lambda_initial: f64,
    pub lambda_final: f64,
    pub temperature: f64,
    pub times: Vec<f64>,
    initial: CorrelationMatrix,
    ideal_occupations: Vec<Vec<f64>>,
}

impl ThermalQuenchSetup {
    pub fn new(
        spec: &ModelSpec,
        lambda_initial: f64,
        lambda_final: f64,
        temperature: f64,
        times: &[f64],
    ) -> Result<Self> {
        spec.validate()?;
        let pre = quench_couplings(spec, QuenchKind::Global, lambda_initial, lambda_initial, None);
        let initial = thermal_state(&diagonalize(&assemble_quadratic_form(&pre, spec))?, temperature)?
            .correlations;
        let post = quench_couplings(spec, QuenchKind::Global, lambda_initial, lambda_final, None);
        let prop = NambuPropagator::new(&nambu_form(&assemble_quadratic_form(&post, spec)));
        let ideal_occupations = times.iter().map(|&t| prop.evolve_occupations(&initial, t)).collect();
        Ok(ThermalQuenchSetup {
            spec: spec.clone(),
            lambda_initial,
            lambda_final,
            temperature,
            times: times.to_vec(),
            initial,
            ideal_occupations,
        })
    }

    /// Site-averaged single-site fidelity `f1(t)` for one realization.
    pub fn run(&self, real: &DisorderRealization) -> Result<Vec<f64>> {
        let post = quench_couplings(
            &self.spec,
            QuenchKind::Global,
            self.lambda_initial,
            self.lambda_final,
            Some(real),
        );
        let prop = NambuPropagator::new(&nambu_form(&assemble_quadratic_form(&post, &self.spec)));
        Ok(self
            .times
            .iter()
            .zip(&self.ideal_occupations)
            .map(|(&t, ideal)| {
                let occ = prop.evolve_occupations(&self.initial, t);
                let sum: f64 = ideal
                    .iter()
                    .zip(&occ)
                    .map(|(&p, &q)| occupation_fidelity(p, q))
                    .sum();
                sum / occ.len() as f64
            })
            .collect())
    }
}

/// Mean of `values` over the times inside `[from, to]`.
pub fn time_average(times: &[f64], values: &[f64], from: f64, to: f64) -> Option<f64> {
    let picked: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= from && t <= to)
        .map(|(_, &v)| v)
        .collect();
    if picked.is_empty() {
        None
    } else {
        Some(picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{clean_form, draw_disorder, realization_form};

    #[test]
    fn levitov_of_zero_counts_doubled_states() {
        let l = 3;
        let z = DMatrix::<C64>::zeros(2 * l, 2 * l);
        let det = levitov_trace(&z, &z).unwrap();
        assert!((det.value().re - 2f64.powi(2 * l as i32)).abs() < 1e-9);
        assert!((det.sqrt_abs() - 2f64.powi(l as i32)).abs() < 1e-9);
    }

    #[test]
    fn levitov_inverse_pair() {
        let q = realization_form(&ModelSpec::ising(4, 1.3).with_disorder(0.2), 0);
        let p = nambu_form(&q).0 * C64::new(0.7, 0.0);
        let det = levitov_trace(&p, &(-p.clone())).unwrap();
        assert!((det.value() - C64::new(256.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn levitov_survives_large_exponents() {
        let q = clean_form(&ModelSpec::ising(3, 1.0));
        let p = nambu_form(&q).0 * C64::new(400.0, 0.0);
        let det = levitov_trace(&p, &p).unwrap();
        assert!(det.log_abs.is_finite() && det.log_abs > 700.0);
    }

    #[test]
    fn fidelity_trivial_cases() {
        let spec = ModelSpec::ising(6, 0.8);
        let d = diagonalize(&clean_form(&spec)).unwrap();
        let g0 = ground_correlation_matrix(&d);
        let h0 = nambu_form(&clean_form(&spec.clone().with_field(1.2)));
        let hr = nambu_form(&realization_form(&spec.clone().with_field(1.2).with_disorder(0.3), 1));
        assert!((zero_temperature_fidelity(&g0, &h0, &hr, 0.0).unwrap() - 1.0).abs() < 1e-12);
        for t in [0.5, 3.0, 11.0] {
            assert!((zero_temperature_fidelity(&g0, &h0, &h0, t).unwrap() - 1.0).abs() < 1e-10);
            let f = zero_temperature_fidelity(&g0, &h0, &hr, t).unwrap();
            assert!(f > 0.0 && f <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn clean_quench_has_unit_fidelity() {
        let spec = ModelSpec::ising(12, 1.0).with_seed(3);
        let protocol = QuenchProtocol {
            kind: QuenchKind::Global,
            lambda_initial: 0.75,
            delta_lambda: 0.5,
            times: vec![0.0, 1.0, 2.5, 7.0],
        };
        let f = run_quench(&spec, &protocol, &draw_disorder(&spec, 0)).unwrap();
        assert!(f.iter().all(|x| (x - 1.0).abs() < 1e-10), "{f:?}");
    }

    #[test]
    fn thermal_limits() {
        let spec = ModelSpec::ising(8, 1.4).with_disorder(0.2);
        let d = diagonalize(&realization_form(&spec, 2)).unwrap();
        let g = ground_correlation_matrix(&d);
        let cold = thermal_state(&d, d.energies[0] / 50.0).unwrap();
        assert!(linalg::max_abs(&(cold.correlations.matrix() - g.matrix())) < 1e-8);
        let hot = thermal_state(&d, 1e9).unwrap();
        for n in hot.correlations.occupations() {
            assert!((n - 0.5).abs() < 1e-8);
        }
        assert!(thermal_state(&d, 0.0).is_err());
    }

    #[test]
    fn thermal_state_is_stationary_and_fermi_distributed() {
        let spec = ModelSpec::ising(7, 0.9).with_disorder(0.3);
        let q = realization_form(&spec, 4);
        let d = diagonalize(&q).unwrap();
        let th = thermal_state(&d, 0.8).unwrap();
        let h = nambu_form(&q);
        // G = n_F(H) for real symmetric H.
        let expect = h.eigen().apply(|e| C64::new(1.0 / ((e / 0.8).exp() + 1.0), 0.0));
        assert!(linalg::max_abs(&(th.correlations.matrix() - &expect)) < 1e-10);
        for t in [0.3, 4.0] {
            let gt = evolve_correlation_matrix(&th.correlations, &h, t);
            assert!(linalg::max_abs(&(gt.matrix() - th.correlations.matrix())) < 1e-10);
        }
    }

    #[test]
    fn evolution_preserves_spectrum() {
        let spec = ModelSpec::ising(6, 0.7);
        let g = ground_correlation_matrix(&diagonalize(&clean_form(&spec)).unwrap());
        let h = nambu_form(&realization_form(&spec.clone().with_field(1.5).with_disorder(0.2), 0));
        let before = HermitianEigen::new(g.matrix()).values;
        let g0 = evolve_correlation_matrix(&g, &h, 0.0);
        assert!(linalg::max_abs(&(g0.matrix() - g.matrix())) < 1e-12);
        let gt = evolve_correlation_matrix(&g, &h, 2.3);
        let after = HermitianEigen::new(gt.matrix()).values;
        assert!((before - after).amax() < 1e-10);
        let prop = NambuPropagator::new(&h);
        let occ = prop.evolve_occupations(&g, 2.3);
        for (i, n) in occ.iter().enumerate() {
            assert!((n - gt.matrix()[(i, i)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn occupation_fidelity_matches_uhlmann() {
        let spec = ModelSpec::ising(5, 1.0).with_disorder(0.3);
        let a = ground_correlation_matrix(&diagonalize(&realization_form(&spec, 0)).unwrap());
        let b = ground_correlation_matrix(&diagonalize(&realization_form(&spec, 1)).unwrap());
        for site in 0..5 {
            let f = thermal_reduced_fidelity(&a, &b, site).unwrap();
            let g = occupation_fidelity(a.occupations()[site], b.occupations()[site]);
            assert!((f - g).abs() < 1e-10);
        }
        assert!((thermal_reduced_fidelity(&a, &a, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn protocol_validation() {
        let mut p = QuenchProtocol {
            kind: QuenchKind::Local(10),
            lambda_initial: 0.75,
            delta_lambda: 0.5,
            times: vec![0.0, 1.0],
        };
        assert!(p.validate(10).is_err());
        p.kind = QuenchKind::Local(9);
        assert!(p.validate(10).is_ok());
        p.times = vec![1.0, 0.5];
        assert!(p.validate(10).is_err());
    }
}
