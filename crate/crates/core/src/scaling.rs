//! Finite-size-scaling estimators: pseudo-critical points from gap
//! crossings, the correlation-length exponent from a data collapse, and the
//! central charge from the entanglement entropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::fit_line;

/// Observable sampled on a grid of sizes and couplings, one row per size.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeSweep {
    pub sizes: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub errors: Option<Vec<Vec<f64>>>,
}

impl SizeSweep {
    pub fn new(sizes: Vec<usize>, lambdas: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let sweep = SizeSweep {
            sizes,
            lambdas,
            values,
            errors: None,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn with_errors(mut self, errors: Vec<Vec<f64>>) -> Result<Self> {
        self.errors = Some(errors);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("sizes must be strictly increasing".into()));
        }
        if self.lambdas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec("lambda grid must be strictly increasing".into()));
        }
        let rows_ok = |m: &Vec<Vec<f64>>| {
            m.len() == self.sizes.len() && m.iter().all(|row| row.len() == self.lambdas.len())
        };
        if !rows_ok(&self.values) || !self.errors.as_ref().map_or(true, rows_ok) {
            return Err(Error::DimensionMismatch(format!(
                "sweep of {} sizes x {} couplings",
                self.sizes.len(),
                self.lambdas.len()
            )));
        }
        Ok(())
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson).
#[derive(Clone, Debug)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::DimensionMismatch("interpolation nodes".into()));
        }
        if n < 2 {
            return Err(Error::InsufficientPoints(format!("interpolation needs 2 nodes, got {n}")));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![delta[0]; 2];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`, extrapolating the end cubics outside the nodes.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Sign changes of `f` on `[a, b]`, located by sampling and bisection.
pub fn find_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let grid: Vec<f64> = (0..=samples)
        .map(|k| a + (b - a) * k as f64 / samples as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for k in 0..samples {
        let (mut lo, mut hi) = (grid[k], grid[k + 1]);
        let (mut flo, fhi) = (vals[k], vals[k + 1]);
        if flo == 0.0 {
            if roots.last() != Some(&lo) {
                roots.push(lo);
            }
            continue;
        }
        if fhi == 0.0 {
            if k + 1 == samples {
                roots.push(hi);
            }
            continue;
        }
        if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// Crossings of the scaled inverse gaps of two adjacent sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCrossing {
    pub sizes: (usize, usize),
    /// Every crossing inside the grid, ascending.
    pub roots: Vec<f64>,
    /// The root entering the estimate: the largest one above the smaller
    /// chain's interior minimum, if it has one.
    pub selected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCrossing {
    pub lambda_c: f64,
    pub zeta: f64,
    pub pairs: Vec<PairCrossing>,
    pub warnings: Vec<String>,
}

/// Sub-samples per grid interval used when bracketing crossings.
const CROSSING_SAMPLES: usize = 16;

/// Crossings of already-scaled curves `y_L(lambda)`, one row per size.
pub fn curve_crossings(sizes: &[usize], lambdas: &[f64], curves: &[Vec<f64>], zeta: f64) -> Result<GapCrossing> {
    if sizes.len() < 2 {
        return Err(Error::InsufficientPoints(format!(
            "crossings need 2 sizes, got {}",
            sizes.len()
        )));
    }
    let interps = curves
        .iter()
        .map(|y| Pchip::new(lambdas, y))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = interps[0].domain();
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..sizes.len() - 1 {
        let (p, q) = (&interps[k], &interps[k + 1]);
        let roots = find_roots(
            |x| p.eval(x) - q.eval(x),
            a,
            b,
            CROSSING_SAMPLES * (lambdas.len() - 1),
        );
        if roots.is_empty() {
            warnings.push(format!(
                "no crossing between L = {} and L = {} in [{a}, {b}]",
                sizes[k],
                sizes[k + 1]
            ));
        } else if roots.len() > 1 {
            warnings.push(format!(
                "{} crossings between L = {} and L = {}: {:?}",
                roots.len(),
                sizes[k],
                sizes[k + 1],
                roots
            ));
        }
        // With an interior minimum of the smaller chain's curve, only roots
        // above it count.
        let y = &curves[k];
        let floor = y
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .filter(|&(i, _)| i > 0 && i + 1 < y.len())
            .map_or(f64::NEG_INFINITY, |(i, _)| lambdas[i]);
        let selected = roots.iter().rev().find(|&&x| x > floor).copied();
        if selected.is_none() && !roots.is_empty() {
            warnings.push(format!(
                "crossings between L = {} and L = {} all lie below the curve minimum at {floor}",
                sizes[k],
                sizes[k + 1]
            ));
        }
        pairs.push(PairCrossing {
            sizes: (sizes[k], sizes[k + 1]),
            roots,
            selected,
        });
    }
    let used: Vec<f64> = pairs.iter().filter_map(|p| p.selected).collect();
    if used.is_empty() {
        return Err(Error::NoCrossing(warnings.join("; ")));
    }
    Ok(GapCrossing {
        lambda_c: used.iter().sum::<f64>() / used.len() as f64,
        zeta,
        pairs,
        warnings,
    })
}

/// Pseudo-critical points from the crossings of `1 / (L^zeta Delta(L, lambda))`
/// between adjacent sizes; the estimate is their mean.
pub fn gap_crossing(sweep: &SizeSweep, zeta: f64) -> Result<GapCrossing> {
    sweep.validate()?;
    if sweep.values.iter().flatten().any(|&g| !(g > 0.0)) {
        return Err(Error::OutOfRange("gaps must be positive".into()));
    }
    let curves: Vec<Vec<f64>> = sweep
        .sizes
        .iter()
        .zip(&sweep.values)
        .map(|(&l, gaps)| gaps.iter().map(|g| 1.0 / ((l as f64).powf(zeta) * g)).collect())
        .collect();
    curve_crossings(&sweep.sizes, &sweep.lambdas, &curves, zeta)
}

/// Correlations `C(d)` of one chain against separation `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizedProfile {
    pub length: usize,
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseOptions {
    pub nu_min: f64,
    pub nu_max: f64,
    /// Window in `x = d / L`.
    pub x_min: f64,
    pub x_max: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions {
            nu_min: 0.2,
            nu_max: 3.0,
            x_min: 0.125,
            x_max: 0.375,
            grid_points: 57,
            tolerance: 1e-4,
        }
    }
}

/// One rescaled curve: `x = d / L`, `y = ln |C L^{2 nu}|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapsedCurve {
    pub length: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseResult {
    pub nu: f64,
    pub cost: f64,
    /// Cost without rescaling (`nu = 0`).
    pub baseline_cost: f64,
    pub curves: Vec<CollapsedCurve>,
    pub warnings: Vec<String>,
}

const COLLAPSE_FLOOR: f64 = 1e-300;

struct LogCurve {
    log_l: f64,
    x: Vec<f64>,
    log_c: Vec<f64>,
}

fn log_curve(p: &SizedProfile, opts: &CollapseOptions) -> LogCurve {
    let l = p.length as f64;
    let (x, log_c) = p
        .separations
        .iter()
        .zip(&p.values)
        .map(|(&d, &c)| (d as f64 / l, c.abs()))
        .filter(|&(x, c)| x >= opts.x_min - 1e-12 && x <= opts.x_max + 1e-12 && c > COLLAPSE_FLOOR && c.is_finite())
        .map(|(x, c)| (x, c.ln()))
        .unzip();
    LogCurve {
        log_l: l.ln(),
        x,
        log_c,
    }
}

fn linear_interp(x: &[f64], y: &[f64], t: f64) -> f64 {
    let k = x.partition_point(|&xi| xi <= t).clamp(1, x.len() - 1) - 1;
    let s = (t - x[k]) / (x[k + 1] - x[k]);
    y[k] + s * (y[k + 1] - y[k])
}

/// Residual terms `ln C_L(x) - ln C_ref(x)` and `ln L - ln L_ref`, so that
/// the cost at `nu` is the mean of `(a + 2 nu b)^2`.
fn collapse_terms(curves: &[LogCurve]) -> Result<Vec<(f64, f64)>> {
    let reference = curves.last().expect("nonempty");
    if reference.x.len() < 2 {
        return Err(Error::EmptyOverlap);
    }
    let (lo, hi) = (reference.x[0], reference.x[reference.x.len() - 1]);
    let mut terms = Vec::new();
    for c in &curves[..curves.len() - 1] {
        for (&x, &y) in c.x.iter().zip(&c.log_c) {
            if x >= lo && x <= hi {
                let r = linear_interp(&reference.x, &reference.log_c, x);
                terms.push((y - r, c.log_l - reference.log_l));
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(terms)
}

fn collapse_cost(terms: &[(f64, f64)], nu: f64) -> f64 {
    terms.iter().map(|(a, b)| (a + 2.0 * nu * b).powi(2)).sum::<f64>() / terms.len() as f64
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Finds `nu` making `C L^{2 nu}` against `d / L` collapse onto the largest
/// chain's curve, comparing log-ordinates against its piecewise-linear
/// interpolant inside the `x` window.
pub fn data_collapse(profiles: &[SizedProfile], opts: &CollapseOptions) -> Result<CollapseResult> {
    if profiles.len() < 3 {
        return Err(Error::InsufficientPoints(format!(
            "collapse needs 3 sizes, got {}",
            profiles.len()
        )));
    }
    if !(opts.nu_max > opts.nu_min) {
        return Err(Error::InvalidSpec("empty nu range".into()));
    }
    let mut sorted = profiles.to_vec();
    sorted.sort_by_key(|p| p.length);
    let curves: Vec<LogCurve> = sorted.iter().map(|p| log_curve(p, opts)).collect();
    let terms = collapse_terms(&curves)?;
    let cost = |nu: f64| collapse_cost(&terms, nu);

    let n = opts.grid_points.max(5);
    let step = (opts.nu_max - opts.nu_min) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| opts.nu_min + step * k as f64).collect();
    let costs: Vec<f64> = grid.iter().map(|&nu| cost(nu)).collect();
    let best = (0..n)
        .min_by(|&i, &j| costs[i].total_cmp(&costs[j]))
        .expect("nonempty grid");
    let minima = (0..n)
        .filter(|&k| (k == 0 || costs[k] < costs[k - 1]) && (k == n - 1 || costs[k] <= costs[k + 1]))
        .count();
    let mut warnings = Vec::new();
    if minima > 1 {
        warnings.push(format!("collapse cost has {minima} local minima on the nu grid"));
    }
    if best == 0 || best == n - 1 {
        warnings.push(format!("collapse optimum at the edge of nu range [{}, {}]", opts.nu_min, opts.nu_max));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n - 1)];
    let nu = golden_section(cost, lo, hi, opts.tolerance);
    let nu = if cost(nu) <= costs[best] { nu } else { grid[best] };

    let collapsed = curves
        .iter()
        .zip(&sorted)
        .map(|(c, p)| CollapsedCurve {
            length: p.length,
            x: c.x.clone(),
            y: c.log_c.iter().map(|y| y + 2.0 * nu * c.log_l).collect(),
        })
        .collect();
    Ok(CollapseResult {
        nu,
        cost: cost(nu),
        baseline_cost: cost(0.0),
        curves: collapsed,
        warnings,
    })
}

/// Entanglement entropies `S(l)` of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProfile {
    pub length: usize,
    pub cuts: Vec<usize>,
    pub entropies: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CentralChargeFit {
    pub c: f64,
    pub a: f64,
    pub residual: f64,
    pub points: usize,
}

/// Minimum number of cuts inside the fit window.
pub const MIN_CENTRAL_CHARGE_POINTS: usize = 8;

/// Cuts in `[L/8, 7L/8]`, at most `count` of them, evenly spread.
pub fn central_charge_cuts(length: usize, count: usize) -> Vec<usize> {
    let lo = (length / 8).max(1);
    let hi = (7 * length / 8).min(length - 1);
    if hi < lo {
        return Vec::new();
    }
    let span = hi - lo;
    if count == 0 || span + 1 <= count {
        return (lo..=hi).collect();
    }
    let mut cuts: Vec<usize> = (0..count)
        .map(|k| lo + (k * span + (count - 1) / 2) / (count - 1))
        .collect();
    cuts.dedup();
    cuts
}

/// Fits `S(l) = (c / 6) ln((L / pi) sin(pi l / L)) + A` over `l` in
/// `[L/8, 7L/8]`.
pub fn central_charge(profile: &EntropyProfile) -> Result<CentralChargeFit> {
    let l = profile.length as f64;
    let lo = profile.length / 8;
    let hi = 7 * profile.length / 8;
    let (xs, ys): (Vec<f64>, Vec<f64>) = profile
        .cuts
        .iter()
        .zip(&profile.entropies)
        .filter(|(&cut, s)| cut >= lo.max(1) && cut <= hi && cut < profile.length && s.is_finite())
        .map(|(&cut, &s)| {
            let chord = (l / std::f64::consts::PI) * (std::f64::consts::PI * cut as f64 / l).sin();
            (chord.ln() / 6.0, s)
        })
        .unzip();
    if xs.len() < MIN_CENTRAL_CHARGE_POINTS {
        return Err(Error::InsufficientPoints(format!(
            "central-charge fit needs {MIN_CENTRAL_CHARGE_POINTS} cuts in window, got {}",
            xs.len()
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(CentralChargeFit {
        c: fit.slope,
        a: fit.intercept,
        residual: fit.rms,
        points: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_reproduces_nodes_and_lines() {
        let x = [0.0, 0.5, 1.5, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let p = Pchip::new(&x, &y).unwrap();
        for t in [0.0, 0.2, 0.77, 1.9, 2.5, 3.0] {
            assert!((p.eval(t) - (2.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pchip_stays_monotone() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.0, 1.0, 1.0, 10.0];
        let p = Pchip::new(&x, &y).unwrap();
        let mut prev = p.eval(0.0);
        for k in 1..=400 {
            let v = p.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn synthetic_crossings_are_exact() {
        let lambdas: Vec<f64> = (0..21).map(|k| 0.9 + 0.02 * k as f64).collect();
        let sizes = vec![10, 20, 40];
        let curves: Vec<Vec<f64>> = sizes
            .iter()
            .map(|&l| lambdas.iter().map(|&x| (x - 1.1) * l as f64 + 1.0).collect())
            .collect();
        let res = curve_crossings(&sizes, &lambdas, &curves, 1.0).unwrap();
        assert!((res.lambda_c - 1.1).abs() < 1e-10);
        for p in &res.pairs {
            assert_eq!(p.roots.len(), 1);
            assert!((p.roots[0] - 1.1).abs() < 1e-10);
        }
        // Through the gap form, Delta = 1 / (L y), on a grid where y > 0.
        let lambdas: Vec<f64> = (0..9).map(|k| 1.08 + 0.005 * k as f64).collect();
        let curves: Vec<Vec<f64>> = sizes
            .iter()
            .map(|&l| lambdas.iter().map(|&x| (x - 1.1) * l as f64 + 1.0).collect())
            .collect();
        let gaps = curves
            .iter()
            .zip(&sizes)
            .map(|(c, &l)| c.iter().map(|y| 1.0 / (l as f64 * y)).collect())
            .collect();
        let sweep = SizeSweep::new(sizes, lambdas, gaps).unwrap();
        assert!((gap_crossing(&sweep, 1.0).unwrap().lambda_c - 1.1).abs() < 1e-10);
    }

    #[test]
    fn missing_crossings_warn_then_fail() {
        let lambdas = vec![0.0, 1.0, 2.0];
        let curves = vec![vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0], vec![5.0, 3.5, 2.0]];
        let res = curve_crossings(&[1, 2, 3], &lambdas, &curves, 1.0).unwrap();
        assert!(res.pairs[0].selected.is_none());
        assert_eq!(res.warnings.len(), 1);
        assert!(res.pairs[1].selected.is_some());
        assert!(res.lambda_c > 1.0 && res.lambda_c < 2.0);
        let none = curve_crossings(&[1, 2], &lambdas, &curves[..2], 1.0);
        assert!(matches!(none, Err(Error::NoCrossing(_))));
    }

    #[test]
    fn largest_root_is_selected() {
        let lambdas: Vec<f64> = (0..41).map(|k| 0.5 + 0.025 * k as f64).collect();
        let a: Vec<f64> = lambdas.iter().map(|_| 0.0).collect();
        let b: Vec<f64> = lambdas.iter().map(|&x| (x - 0.8) * (x - 1.2)).collect();
        let res = curve_crossings(&[10, 20], &lambdas, &[a, b], 1.0).unwrap();
        assert_eq!(res.pairs[0].roots.len(), 2);
        assert!((res.lambda_c - 1.2).abs() < 1e-6);
    }

    fn synthetic_profiles(nu: f64) -> Vec<SizedProfile> {
        [32usize, 48, 64, 96]
            .iter()
            .map(|&l| {
                let separations: Vec<usize> = (1..l / 2).collect();
                let values = separations
                    .iter()
                    .map(|&d| (l as f64).powf(-2.0 * nu) * (-(d as f64) / l as f64).exp())
                    .collect();
                SizedProfile {
                    length: l,
                    separations,
                    values,
                }
            })
            .collect()
    }

    #[test]
    fn synthetic_collapse_recovers_nu() {
        let res = data_collapse(&synthetic_profiles(1.3), &CollapseOptions::default()).unwrap();
        assert!((res.nu - 1.3).abs() < 1e-3, "{}", res.nu);
        assert!(res.cost < 1e-6);
        assert!(res.baseline_cost > res.cost);
        assert!(res.warnings.is_empty(), "{:?}", res.warnings);
    }

    #[test]
    fn collapse_rejects_disjoint_windows() {
        let mut profiles = synthetic_profiles(1.0);
        for p in &mut profiles {
            p.values.iter_mut().for_each(|v| *v = 0.0);
        }
        assert_eq!(data_collapse(&profiles, &CollapseOptions::default()), Err(Error::EmptyOverlap));
        assert!(data_collapse(&profiles[..2], &CollapseOptions::default()).is_err());
    }

    #[test]
    fn synthetic_central_charge_is_exact() {
        let length = 128;
        let cuts: Vec<usize> = (1..length).collect();
        let entropies = cuts
            .iter()
            .map(|&l| {
                let chord = (length as f64 / std::f64::consts::PI)
                    * (std::f64::consts::PI * l as f64 / length as f64).sin();
                0.7 / 6.0 * chord.ln() + 0.3
            })
            .collect();
        let fit = central_charge(&EntropyProfile { length, cuts, entropies }).unwrap();
        assert!((fit.c - 0.7).abs() < 1e-8);
        assert!((fit.a - 0.3).abs() < 1e-8);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn central_charge_needs_points() {
        let profile = EntropyProfile {
            length: 16,
            cuts: vec![2, 4, 6, 8, 10, 12],
            entropies: vec![0.1; 6],
        };
        assert!(matches!(central_charge(&profile), Err(Error::InsufficientPoints(_))));
    }

    #[test]
    fn cut_selection() {
        let cuts = central_charge_cuts(256, 24);
        assert_eq!(cuts.len(), 24);
        assert_eq!(cuts[0], 32);
        assert_eq!(*cuts.last().unwrap(), 224);
        assert_eq!(central_charge_cuts(16, 24), (2..=14).collect::<Vec<_>>());
    }
}
