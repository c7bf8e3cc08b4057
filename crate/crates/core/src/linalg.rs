//! Small dense linear-algebra helpers shared by the solver and the oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Thin singular-value decomposition `M = U diag(s) V^T` of a real square
/// matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Option<Svd> {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let dec = fm.thin_svd().ok()?;
    let (u, s, v) = (dec.U(), dec.S(), dec.V());
    let k = r.min(c);
    Some(Svd {
        u: DMatrix::from_fn(r, k, |i, j| u[(i, j)]),
        singular_values: DVector::from_fn(k, |i, _| s[i]),
        v: DMatrix::from_fn(c, k, |i, j| v[(i, j)]),
    })
}

pub fn singular_values(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    fm.singular_values().ok()
}

/// Complex matrix product through faer's blocked kernels.
pub fn matmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let fa = faer::MatRef::from_column_major_slice(a.as_slice(), a.nrows(), a.ncols());
    let fb = faer::MatRef::from_column_major_slice(b.as_slice(), b.nrows(), b.ncols());
    let mut out = DMatrix::<C64>::zeros(a.nrows(), b.ncols());
    let (r, c) = out.shape();
    let fo = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), r, c);
    faer::linalg::matmul::matmul(fo, faer::Accum::Replace, fa, fb, C64::new(1.0, 0.0), faer::Par::Seq);
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    /// Columns are the eigenvectors.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
        let (raw_values, raw_vectors) = match fm.self_adjoint_eigen(faer::Side::Lower) {
            Ok(eig) => {
                let (u, s) = (eig.U(), eig.S());
                (
                    DVector::from_fn(n, |k, _| s[k].re),
                    DMatrix::from_fn(n, n, |i, j| u[(i, j)]),
                )
            }
            Err(_) => {
                let eig = m.clone().symmetric_eigen();
                (eig.eigenvalues, eig.eigenvectors)
            }
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&k| raw_values[k]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &raw_vectors.column(src));
        }
        HermitianEigen { values, vectors }
    }

    /// `V f(D) V^+` for a scalar function of the eigenvalues.
    pub fn apply<F: Fn(f64) -> C64>(&self, f: F) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[k]);
        }
        matmul(&scaled, &self.vectors.adjoint())
    }

    /// `exp(s H)` for complex `s`.
    pub fn exp(&self, s: C64) -> DMatrix<C64> {
        self.apply(|x| (s * x).exp())
    }
}

/// Determinant kept as `exp(log_abs) * phase`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    /// Unit-modulus phase factor (zero when the matrix is singular).
    pub phase: C64,
}

impl LogDet {
    pub fn value(&self) -> C64 {
        self.phase * self.log_abs.exp()
    }

    pub fn abs(&self) -> f64 {
        self.log_abs.exp()
    }

    /// Principal square root of the modulus.
    pub fn sqrt_abs(&self) -> f64 {
        (0.5 * self.log_abs).exp()
    }

    fn combine(self, other: LogDet) -> LogDet {
        LogDet {
            log_abs: self.log_abs + other.log_abs,
            phase: self.phase * other.phase,
        }
    }
}

/// Log-determinant of a complex square matrix by LU with partial pivoting.
pub fn log_det(m: DMatrix<C64>) -> Result<LogDet> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("determinant input".into()));
    }
    let lu = m.lu();
    let mut out = LogDet {
        log_abs: 0.0,
        phase: C64::new(lu.p().determinant::<f64>(), 0.0),
    };
    let u = lu.u();
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        let a = d.norm();
        if a == 0.0 {
            return Ok(LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: C64::new(0.0, 0.0),
            });
        }
        out = out.combine(LogDet {
            log_abs: a.ln(),
            phase: d / a,
        });
    }
    Ok(out)
}

/// Log-determinant of a real square matrix; the phase is `+1` or `-1`.
pub fn log_det_real(m: DMatrix<f64>) -> Result<LogDet> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("determinant input".into()));
    }
    let lu = m.lu();
    let mut sign = lu.p().determinant::<f64>();
    let mut log_abs = 0.0;
    let u = lu.u();
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return Ok(LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: C64::new(0.0, 0.0),
            });
        }
        sign *= d.signum();
        log_abs += d.abs().ln();
    }
    Ok(LogDet {
        log_abs,
        phase: C64::new(sign, 0.0),
    })
}

/// Square root of a Hermitian positive-semidefinite matrix. Eigenvalues
/// below `-tol` are rejected, smaller negative ones are clamped to zero.
pub fn psd_sqrt(m: &DMatrix<C64>, tol: f64) -> Result<DMatrix<C64>> {
    let eig = HermitianEigen::new(m);
    let min = eig.values.min();
    if min < -tol {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    Ok(eig.apply(|x| C64::new(x.max(0.0).sqrt(), 0.0)))
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Binary entropy `-p ln p - (1-p) ln(1-p)` with `0 ln 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(p) + term(1.0 - p)
}

/// Ordinary least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::DimensionMismatch("line fit x/y lengths".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientPoints(format!("line fit needs 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints("line fit with degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms: (rss / nf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_matches_direct_determinant() {
        let m = DMatrix::from_fn(5, 5, |i, j| {
            C64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64).cos())
        });
        let direct = m.clone().determinant();
        let ld = log_det(m).unwrap();
        assert!((ld.value() - direct).norm() < 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn real_log_det_sign() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 3.0, 0.0]);
        let ld = log_det_real(m).unwrap();
        assert!((ld.value().re + 6.0).abs() < 1e-14);
    }

    #[test]
    fn exp_of_hermitian() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).map(|x| C64::new(x, 0.0));
        let e = HermitianEigen::new(&h).exp(C64::new(0.0, -0.3));
        let expect = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.3f64.cos(), 0.0),
                C64::new(0.0, -0.3f64.sin()),
                C64::new(0.0, -0.3f64.sin()),
                C64::new(0.3f64.cos(), 0.0),
            ],
        );
        assert!(max_abs(&(e - expect)) < 1e-14);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(-0.1, 0.0), C64::new(1.0, 0.0)]));
        assert!(psd_sqrt(&m, 1e-10).is_err());
        let s = psd_sqrt(&m.map(|z| C64::new(z.re.abs(), 0.0)), 1e-10).unwrap();
        assert!((s[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-14 && (fit.intercept + 1.0).abs() < 1e-14);
    }
}
