//! Disordered transverse-field Ising chain and its quadratic fermionic form.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary conditions of the chain. Only open chains are supported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
}

/// How the disorder strength `r` enters the couplings.
///
/// `Prefactor` (the default) draws unit-variance Gaussians and multiplies
/// them by `r`, so that `std(J_i) = r J`. `Variance` draws Gaussians of
/// variance `r` and still multiplies by `r`, giving `std(J_i) = r^{3/2} J`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderScaling {
    #[default]
    Prefactor,
    Variance,
}

/// Identity of one experiment: chain, couplings, disorder and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub length: usize,
    /// Base nearest-neighbour coupling `J`.
    pub coupling: f64,
    /// Base transverse field `h`.
    pub field: f64,
    /// Anisotropy; `1` is the Ising chain.
    pub gamma: f64,
    /// Disorder strength `r`.
    pub disorder: f64,
    pub boundary: Boundary,
    pub seed: u64,
    pub scaling: DisorderScaling,
}

impl ModelSpec {
    /// Ising chain with `J = 1`, `h = lambda`, no disorder.
    pub fn ising(length: usize, lambda: f64) -> Self {
        ModelSpec {
            length,
            coupling: 1.0,
            field: lambda,
            gamma: 1.0,
            disorder: 0.0,
            boundary: Boundary::Open,
            seed: 0,
            scaling: DisorderScaling::Prefactor,
        }
    }

    pub fn with_disorder(mut self, r: f64) -> Self {
        self.disorder = r;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_field(mut self, field: f64) -> Self {
        self.field = field;
        self
    }

    /// Control parameter `lambda = h / J`.
    pub fn lambda(&self) -> f64 {
        self.field / self.coupling
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::InvalidSpec(format!(
                "chain length must be at least 2, got {}",
                self.length
            )));
        }
        if !(self.coupling > 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "coupling J must be positive, got {}",
                self.coupling
            )));
        }
        if !(self.disorder >= 0.0) || !self.disorder.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "disorder strength r must be nonnegative, got {}",
                self.disorder
            )));
        }
        if !self.field.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidSpec("field and gamma must be finite".into()));
        }
        Ok(())
    }
}

/// `(seed, stream_index)` pair identifying one disorder draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RealizationId {
    pub seed: u64,
    pub stream: u64,
}

impl fmt::Display for RealizationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed={} stream={}", self.seed, self.stream)
    }
}

/// One frozen draw of bond and site disorder.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderRealization {
    pub id: RealizationId,
    /// Bond draws `delta_i`, length `L - 1`.
    pub delta: Vec<f64>,
    /// Site draws `eta_i`, length `L`.
    pub eta: Vec<f64>,
    /// `J_i = J (1 + r delta_i)`.
    pub bonds: Vec<f64>,
    /// `h_i = h (1 + r eta_i)`.
    pub fields: Vec<f64>,
}

impl DisorderRealization {
    /// Disorder-free couplings for `spec`, whatever its `r`.
    pub fn clean(spec: &ModelSpec) -> Self {
        let l = spec.length;
        DisorderRealization {
            id: RealizationId {
                seed: spec.seed,
                stream: u64::MAX,
            },
            delta: vec![0.0; l - 1],
            eta: vec![0.0; l],
            bonds: vec![spec.coupling; l - 1],
            fields: vec![spec.field; l],
        }
    }

    /// Same draws applied to different base couplings.
    pub fn rescaled(&self, spec: &ModelSpec) -> Self {
        let (delta, eta) = (self.delta.clone(), self.eta.clone());
        let (bonds, fields) = couplings(spec, &delta, &eta);
        DisorderRealization {
            id: self.id,
            delta,
            eta,
            bonds,
            fields,
        }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

fn couplings(spec: &ModelSpec, delta: &[f64], eta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r = spec.disorder;
    let amp = match spec.scaling {
        DisorderScaling::Prefactor => 1.0,
        DisorderScaling::Variance => r.sqrt(),
    };
    let bonds = delta
        .iter()
        .map(|d| spec.coupling * (1.0 + r * amp * d))
        .collect();
    let fields = eta
        .iter()
        .map(|e| spec.field * (1.0 + r * amp * e))
        .collect();
    (bonds, fields)
}

/// Draws the standard-normal bond and site variables for `stream_index`.
///
/// ChaCha20 keyed by the seed, with the stream index selecting an
/// independent keystream, so every `(seed, stream)` pair maps to the same
/// numbers regardless of which thread asks. Bond draws come first, then
/// site draws.
pub fn draw_disorder(spec: &ModelSpec, stream_index: u64) -> DisorderRealization {
    let l = spec.length;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream_index);
    let delta: Vec<f64> = (0..l - 1).map(|_| rng.sample(StandardNormal)).collect();
    let eta: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
    let (bonds, fields) = couplings(spec, &delta, &eta);
    DisorderRealization {
        id: RealizationId {
            seed: spec.seed,
            stream: stream_index,
        },
        delta,
        eta,
        bonds,
        fields,
    }
}

/// Real symmetric `A` and antisymmetric `B` of
/// `H = c^+ A c + (c^+ B c^+ + h.c.) / 2 - Tr(A) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub origin: RealizationId,
}

impl QuadraticForm {
    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.nrows() == 0
    }

    /// `Z = A - B`, whose singular values are the quasiparticle energies.
    pub fn z(&self) -> DMatrix<f64> {
        &self.a - &self.b
    }
}

/// Builds `A` and `B` for an open chain:
/// `A_ii = -2 h_i`, `A_{i,i+1} = A_{i+1,i} = -J_i`,
/// `B_{i,i+1} = -gamma J_i`, `B_{i+1,i} = gamma J_i`.
pub fn assemble_quadratic_form(real: &DisorderRealization, spec: &ModelSpec) -> QuadraticForm {
    let l = real.fields.len();
    let mut a = DMatrix::zeros(l, l);
    let mut b = DMatrix::zeros(l, l);
    for (i, &h) in real.fields.iter().enumerate() {
        a[(i, i)] = -2.0 * h;
    }
    for (i, &j) in real.bonds.iter().enumerate() {
        a[(i, i + 1)] = -j;
        a[(i + 1, i)] = -j;
        b[(i, i + 1)] = -spec.gamma * j;
        b[(i + 1, i)] = spec.gamma * j;
    }
    QuadraticForm {
        a,
        b,
        origin: real.id,
    }
}

/// Quadratic form of disorder realization `stream` of `spec`.
pub fn realization_form(spec: &ModelSpec, stream: u64) -> QuadraticForm {
    assemble_quadratic_form(&draw_disorder(spec, stream), spec)
}

/// Quadratic form of the clean chain.
pub fn clean_form(spec: &ModelSpec) -> QuadraticForm {
    assemble_quadratic_form(&DisorderRealization::clean(spec), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_disorder_gives_uniform_couplings() {
        for seed in [0, 1, 99] {
            let spec = ModelSpec::ising(6, 0.7).with_seed(seed);
            let real = draw_disorder(&spec, 3);
            assert!(real.bonds.iter().all(|&j| j == 1.0));
            assert!(real.fields.iter().all(|&h| h == 0.7));
        }
    }

    #[test]
    fn draws_are_deterministic() {
        let spec = ModelSpec::ising(10, 1.0).with_disorder(0.2).with_seed(1);
        let a = draw_disorder(&spec, 7);
        let b = draw_disorder(&spec, 7);
        assert_eq!(a, b);
        let c = draw_disorder(&spec, 8);
        assert_ne!(a.delta, c.delta);
    }

    #[test]
    fn generator_statistics() {
        let spec = ModelSpec::ising(4, 1.0).with_disorder(0.1).with_seed(42);
        let n = 100_000u64;
        let (mut sum_j, mut count_j) = (0.0, 0usize);
        let (mut s1, mut s2, mut count_d) = (0.0, 0.0, 0usize);
        for stream in 0..n {
            let real = draw_disorder(&spec, stream);
            sum_j += real.bonds.iter().sum::<f64>();
            count_j += real.bonds.len();
            for &d in &real.delta {
                s1 += d;
                s2 += d * d;
                count_d += 1;
            }
        }
        let mean_j = sum_j / count_j as f64;
        let mean_d = s1 / count_d as f64;
        let std_d = (s2 / count_d as f64 - mean_d * mean_d).sqrt();
        assert!((mean_j - 1.0).abs() < 3e-3, "mean J = {mean_j}");
        assert!((std_d - 1.0).abs() < 0.02, "std delta = {std_d}");
    }

    #[test]
    fn neighbouring_streams_are_uncorrelated() {
        let spec = ModelSpec::ising(3, 1.0).with_disorder(0.1).with_seed(5);
        let n = 10_000u64;
        let first: Vec<f64> = (0..=n).map(|s| draw_disorder(&spec, s).delta[0]).collect();
        let x = &first[..n as usize];
        let y = &first[1..];
        let mx = x.iter().sum::<f64>() / n as f64;
        let my = y.iter().sum::<f64>() / n as f64;
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.05, "corr = {corr}");
    }

    #[test]
    fn variance_scaling_switch() {
        let base = ModelSpec::ising(5, 1.0).with_disorder(0.25).with_seed(3);
        let mut var = base.clone();
        var.scaling = DisorderScaling::Variance;
        let a = draw_disorder(&base, 0);
        let b = draw_disorder(&var, 0);
        assert_eq!(a.delta, b.delta);
        for (ja, jb) in a.bonds.iter().zip(&b.bonds) {
            assert!(((jb - 1.0) - 0.5 * (ja - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn field_only_form() {
        let mut spec = ModelSpec::ising(3, 1.0);
        spec.coupling = 1.0;
        let mut real = DisorderRealization::clean(&spec);
        real.bonds = vec![0.0; 2];
        let q = assemble_quadratic_form(&real, &spec);
        assert_eq!(q.a, DMatrix::from_diagonal_element(3, 3, -2.0));
        assert_eq!(q.b, DMatrix::zeros(3, 3));
    }

    #[test]
    fn two_site_bond_only_form() {
        let spec = ModelSpec::ising(2, 0.0);
        let q = clean_form(&spec);
        assert_eq!(q.a, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        assert_eq!(q.b, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn symmetry_of_forms() {
        let spec = ModelSpec::ising(9, 1.2).with_disorder(0.3).with_seed(11);
        for stream in 0..20 {
            let q = realization_form(&spec, stream);
            let scale = q.a.amax().max(q.b.amax());
            assert!((&q.a - q.a.transpose()).amax() <= 1e-14 * scale);
            assert!((&q.b + q.b.transpose()).amax() <= 1e-14 * scale);
            for i in 0..9 {
                assert_eq!(q.b[(i, i)], 0.0);
                for j in 0..9 {
                    if i.abs_diff(j) > 1 {
                        assert_eq!(q.a[(i, j)], 0.0);
                        assert_eq!(q.b[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::ising(1, 1.0).validate().is_err());
        assert!(ModelSpec::ising(4, 1.0).with_disorder(-0.1).validate().is_err());
        let mut s = ModelSpec::ising(4, 1.0);
        s.coupling = 0.0;
        assert!(s.validate().is_err());
        assert!(ModelSpec::ising(4, 1.0).validate().is_ok());
    }
}
