//! Sweep comparing every free-fermion observable with the dense reference.

use serde::Serialize;

use super::*;
use crate::dynamics::{evolve_correlation_matrix, quench_couplings, run_quench, thermal_state, QuenchKind, QuenchProtocol};
use crate::freefermion::{diagonalize, energy_gap, ground_correlation_matrix, nambu_form, CorrelationMatrix};
use crate::model::{assemble_quadratic_form, draw_disorder};
use crate::statics::{entanglement_profile, global_fidelity, single_site_rdm, two_site_rdm, zz_correlation};

/// Statics are compared to this tolerance, dynamics and thermal states to
/// [`DYNAMICS_TOLERANCE`].
pub const STATICS_TOLERANCE: f64 = 1e-8;
pub const DYNAMICS_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub length: usize,
    pub realizations: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    fn record(&mut self, name: &str, deviation: f64, tolerance: f64) {
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.max_deviation = c.max_deviation.max(deviation),
            None => self.checks.push(Check {
                name: name.to_string(),
                max_deviation: deviation,
                tolerance,
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    pub length: usize,
    pub realizations: usize,
    pub seed: u64,
    pub disorders: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub times: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub delta_lambda: f64,
}

impl ValidationOptions {
    pub fn new(length: usize, realizations: usize) -> Self {
        ValidationOptions {
            length,
            realizations,
            seed: 2024,
            disorders: vec![0.0, 0.1, 0.3],
            lambdas: vec![0.5, 1.0, 1.5],
            times: (0..=10).map(|k| 0.5 * k as f64).collect(),
            temperatures: vec![0.5, 2.0],
            delta_lambda: 0.5,
        }
    }
}

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Compares energies, gaps, correlators, reduced density matrices,
/// entropies, ground-state overlaps, quench fidelities, evolved and thermal
/// correlation matrices on `realizations` draws cycling through the
/// `(r, lambda)` grid.
pub fn validate_against_oracle(opts: &ValidationOptions) -> Result<ValidationReport> {
    let l = opts.length;
    check_size(l)?;
    let mut report = ValidationReport {
        length: l,
        realizations: opts.realizations,
        checks: Vec::new(),
    };
    let combos: Vec<(f64, f64)> = opts
        .disorders
        .iter()
        .flat_map(|&r| opts.lambdas.iter().map(move |&lam| (r, lam)))
        .collect();
    for k in 0..opts.realizations {
        let (r, lambda) = combos[k % combos.len()];
        let spec = ModelSpec::ising(l, lambda).with_disorder(r).with_seed(opts.seed);
        let real = draw_disorder(&spec, k as u64);
        check_realization(&mut report, &spec, &real, opts)?;
    }
    Ok(report)
}

fn check_realization(
    report: &mut ValidationReport,
    spec: &ModelSpec,
    real: &DisorderRealization,
    opts: &ValidationOptions,
) -> Result<()> {
    let l = spec.length;
    let st = STATICS_TOLERANCE;
    let dt = DYNAMICS_TOLERANCE;
    let q = assemble_quadratic_form(real, spec);
    let d = diagonalize(&q)?;
    let h = dense_hamiltonian(real, spec)?;
    let eig = h.eigen();
    let psi = DenseState::Pure(eig.vectors.column(0).into_owned());

    report.record("ground energy", (d.ground_energy - eig.values[0]).abs(), st);
    report.record("gap", (energy_gap(&d) - (eig.values[1] - eig.values[0])).abs(), st);

    let mut zz: f64 = 0.0;
    for i in 0..l {
        for j in 0..l {
            if i == j {
                continue;
            }
            let szi = Monomial::sigma_z(l, i);
            let szj = Monomial::sigma_z(l, j);
            let exact = dense_expect(&psi, &szi.mul(&szj)).re
                - dense_expect(&psi, &szi).re * dense_expect(&psi, &szj).re;
            zz = zz.max((zz_correlation(&d, i, j) - exact).abs());
        }
    }
    report.record("zz correlation", zz, st);

    let mut one: f64 = 0.0;
    let mut two: f64 = 0.0;
    for i in 0..l {
        let rho = dense_partial_trace(&psi, &[i]);
        one = one.max(max_dev(&single_site_rdm(&d, i)?.matrix, &rho.matrix));
        if i + 1 < l {
            let rho = dense_partial_trace(&psi, &[i, i + 1]);
            two = two.max(max_dev(&two_site_rdm(&d, i)?.matrix, &rho.matrix));
        }
    }
    report.record("single-site rdm", one, st);
    report.record("two-site rdm", two, st);

    let cuts: Vec<usize> = (1..l).collect();
    let entropies = entanglement_profile(&d, &cuts)?;
    let ent = cuts
        .iter()
        .zip(&entropies)
        .map(|(&c, s)| (s - dense_block_entropy(&psi, c)).abs())
        .fold(0.0, f64::max);
    report.record("entanglement entropy", ent, st);

    let clean = DisorderRealization::clean(spec);
    let d0 = diagonalize(&assemble_quadratic_form(&clean, spec))?;
    let h0 = dense_hamiltonian(&clean, spec)?;
    let (_, psi0) = dense_ground(&h0);
    let exact = match &psi {
        DenseState::Pure(v) => dense_overlap(&psi0, v),
        DenseState::Mixed(_) => unreachable!(),
    };
    report.record("global fidelity", (global_fidelity(&d0, &d)? - exact).abs(), st);

    // Zero-temperature quenches from the clean ground state.
    let lambda = spec.lambda();
    for kind in [QuenchKind::Global, QuenchKind::Local(l / 2)] {
        let protocol = QuenchProtocol {
            kind,
            lambda_initial: lambda,
            delta_lambda: opts.delta_lambda,
            times: opts.times.clone(),
        };
        let f = run_quench(spec, &protocol, real)?;
        let after = lambda + opts.delta_lambda;
        let ideal_post = dense_hamiltonian(&quench_couplings(spec, kind, lambda, after, None), spec)?.eigen();
        let dis = quench_couplings(spec, kind, lambda, after, Some(real));
        let dis_post = dense_hamiltonian(&dis, spec)?.eigen();
        let start = DenseState::Pure(psi0.clone());
        let mut dev: f64 = 0.0;
        for (&t, &ft) in opts.times.iter().zip(&f) {
            let a = dense_evolve_with(&start, &ideal_post, t);
            let b = dense_evolve_with(&start, &dis_post, t);
            if let (DenseState::Pure(a), DenseState::Pure(b)) = (a, b) {
                dev = dev.max((ft - dense_overlap(&a, &b)).abs());
            }
        }
        report.record(&format!("{} quench fidelity", kind.label()), dev, dt);

        if kind == QuenchKind::Global {
            let g0 = ground_correlation_matrix(&d0);
            let hn = nambu_form(&assemble_quadratic_form(&dis, spec));
            let mut ev: f64 = 0.0;
            for &t in opts.times.iter().step_by(3) {
                let gt = evolve_correlation_matrix(&g0, &hn, t);
                let exact = dense_correlation_matrix(&dense_evolve_with(&start, &dis_post, t), l);
                ev = ev.max(max_dev(gt.matrix(), &exact));
            }
            report.record("evolved correlators", ev, dt);
        }
    }

    for &temp in &opts.temperatures {
        let th = thermal_state(&d, temp)?;
        let rho = DenseState::Mixed(dense_thermal(&h, temp));
        let exact = CorrelationMatrix(dense_correlation_matrix(&rho, l));
        report.record(
            "thermal correlators",
            max_dev(th.correlations.matrix(), exact.matrix()),
            dt,
        );
    }
    Ok(())
}
