//! Fisher information, sensitivity, scalar optimization and scaling fits.

use crate::curve::CurveData;
use crate::error::{Error, Result};
use crate::gaussian_core::GaussianState;
use crate::moments::{Contractions, OpPoly};

/// Default finite-difference step in radians.
pub const DERIV_STEP: f64 = 1e-4;
/// Number of coarse grid points before golden-section refinement.
pub const DEFAULT_GRID: usize = 64;

/// Centered difference with one Richardson step.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |s: f64| (f(x + s) - f(x - s)) / (2.0 * s);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

type Scalar<'a> = Box<dyn Fn(f64) -> f64 + 'a>;
type Table<'a> = Box<dyn Fn(f64) -> Vec<f64> + 'a>;

/// Outcome distribution family `p(x | phi)`.
pub enum OutcomeModel<'a> {
    /// Normal outcomes with mean `m(phi)` and standard deviation `s(phi)`.
    Gaussian { mean: Scalar<'a>, std: Scalar<'a> },
    /// Finite outcome table.
    Discrete { probs: Table<'a> },
}

impl<'a> OutcomeModel<'a> {
    pub fn gaussian(mean: impl Fn(f64) -> f64 + 'a, std: impl Fn(f64) -> f64 + 'a) -> Self {
        OutcomeModel::Gaussian { mean: Box::new(mean), std: Box::new(std) }
    }

    pub fn discrete(probs: impl Fn(f64) -> Vec<f64> + 'a) -> Self {
        OutcomeModel::Discrete { probs: Box::new(probs) }
    }
}

/// Fisher information `F(phi) = sum_x p (d ln p / d phi)^2`.
pub fn fisher_information(model: &OutcomeModel, phi: f64) -> Result<f64> {
    match model {
        OutcomeModel::Gaussian { mean, std } => {
            let s = std(phi);
            if !(s > 0.0) {
                return Err(Error::Degenerate(format!("standard deviation {s} at phi = {phi}")));
            }
            let dm = derivative(mean, phi, DERIV_STEP);
            let ds = derivative(std, phi, DERIV_STEP);
            Ok((dm * dm + 2.0 * ds * ds) / (s * s))
        }
        OutcomeModel::Discrete { probs } => {
            let p0 = probs(phi);
            let total: f64 = p0.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("outcome table sums to {total}")));
            }
            let h = DERIV_STEP;
            let (pp, pm) = (probs(phi + h), probs(phi - h));
            let (pp2, pm2) = (probs(phi + h / 2.0), probs(phi - h / 2.0));
            let mut f = 0.0;
            let mut skipped = 0;
            for k in 0..p0.len() {
                if p0[k] <= 1e-300 {
                    skipped += 1;
                    continue;
                }
                let d1 = (pp[k] - pm[k]) / (2.0 * h);
                let d2 = (pp2[k] - pm2[k]) / h;
                let d = (4.0 * d2 - d1) / 3.0;
                f += d * d / p0[k];
            }
            if skipped > 0 {
                log::warn!("fisher_information: {skipped} zero-probability outcomes excluded");
            }
            Ok(f)
        }
    }
}

/// `S = sqrt(var O) / |d<O>/dphi|`.
pub fn sensitivity(model: &OutcomeModel, phi: f64) -> Result<f64> {
    match model {
        OutcomeModel::Gaussian { mean, std } => {
            let dm = derivative(mean, phi, DERIV_STEP);
            if dm.abs() < 1e-14 {
                return Err(Error::Stationary(dm));
            }
            Ok(std(phi) / dm.abs())
        }
        OutcomeModel::Discrete { probs } => {
            let moments = |p: f64| {
                let t = probs(p);
                let m: f64 = t.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
                let m2: f64 = t.iter().enumerate().map(|(k, q)| (k * k) as f64 * q).sum();
                (m, m2 - m * m)
            };
            let dm = derivative(|p| moments(p).0, phi, DERIV_STEP);
            if dm.abs() < 1e-14 {
                return Err(Error::Stationary(dm));
            }
            Ok(moments(phi).1.max(0.0).sqrt() / dm.abs())
        }
    }
}

/// Generator `G = sum_k w_k N_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub weights: Vec<(usize, f64)>,
}

impl Generator {
    pub fn number(mode: usize) -> Self {
        Self { weights: vec![(mode, 1.0)] }
    }
}

/// `H = 4 var[G]` for a pure probe.
pub fn qfi_pure_unitary(probe: &GaussianState, generator: &Generator) -> Result<f64> {
    let det = probe.cov().determinant();
    if (det - 1.0).abs() > 1e-6 * det.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!("probe is mixed: det cov = {det}")));
    }
    let ctx = Contractions::new(probe);
    let mut g = OpPoly::zero();
    for &(k, w) in &generator.weights {
        if k >= probe.n_modes() {
            return Err(Error::ModeIndex(format!("generator mode {k} out of range")));
        }
        g = &g + &ctx.delta_number(k).scale(w);
    }
    Ok(4.0 * ctx.variance(&g)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

pub fn maximize_scalar(f: impl Fn(f64) -> f64, interval: (f64, f64), tol: f64) -> Result<Maximum> {
    maximize_scalar_grid(f, interval, tol, DEFAULT_GRID)
}

/// Coarse grid scan, then golden-section search inside the bracketing cell.
pub fn maximize_scalar_grid(
    f: impl Fn(f64) -> f64,
    interval: (f64, f64),
    tol: f64,
    grid: usize,
) -> Result<Maximum> {
    let (a, b) = interval;
    if !(a < b) || !(tol > 0.0) || grid < 3 {
        return Err(Error::InvalidParameter(format!("bad search interval ({a}, {b}) or tol {tol}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(format!("objective at {x}")))
        }
    };
    let step = (b - a) / (grid - 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..grid {
        let y = eval(a + i as f64 * step)?;
        if y > best.1 {
            best = (i, y);
        }
    }
    let mut lo = a + best.0.saturating_sub(1) as f64 * step;
    let mut hi = (a + (best.0 + 1) as f64 * step).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut iters = 0;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1)?;
        }
        iters += 1;
        if iters > 500 {
            return Err(Error::NonConvergence { arg: 0.5 * (lo + hi), best: f1.max(f2) });
        }
    }
    let (arg, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    // the grid point itself can beat an interior bracket on flat plateaus
    if best.1 > value {
        return Ok(Maximum { arg: a + best.0 as f64 * step, value: best.1 });
    }
    Ok(Maximum { arg, value })
}

pub fn minimize_scalar_grid(
    f: impl Fn(f64) -> f64,
    interval: (f64, f64),
    tol: f64,
    grid: usize,
) -> Result<Maximum> {
    let m = maximize_scalar_grid(|x| -f(x), interval, tol, grid)?;
    Ok(Maximum { arg: m.arg, value: -m.value })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Standard error of the exponent.
    pub stderr: f64,
    pub residual_rms: f64,
    pub points_used: usize,
    pub dropped_lowest_decade: bool,
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let rms = (ss / n).sqrt();
    let se = if n > 2.0 { (ss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, icpt, se, rms)
}

/// Log-log least squares slope of `y` against `x`.
pub fn fit_scaling(curve: &CurveData) -> Result<ScalingFit> {
    let n = curve.x.len();
    if n < 8 {
        return Err(Error::InvalidParameter(format!("{n} points, need at least 8")));
    }
    if curve.x.iter().chain(&curve.y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("scaling fit needs positive data".into()));
    }
    let lx: Vec<f64> = curve.x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = curve.y.iter().map(|v| v.log10()).collect();
    let (xmin, xmax) = lx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if xmax - xmin < 2.0 - 1e-9 {
        return Err(Error::InvalidParameter(format!("data spans {:.2} decades, need 2", xmax - xmin)));
    }
    let (slope, icpt, se, rms) = line_fit(&lx, &ly);
    // curvature: the lowest decade bends away from the rest
    let low: Vec<usize> = (0..n).filter(|&i| lx[i] < xmin + 1.0).collect();
    let high: Vec<usize> = (0..n).filter(|&i| lx[i] >= xmin + 1.0).collect();
    if low.len() >= 3 && high.len() >= 8 {
        let pick = |idx: &[usize], v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let (s_low, ..) = line_fit(&pick(&low, &lx), &pick(&low, &ly));
        let (s_high, i_high, se_high, rms_high) = line_fit(&pick(&high, &lx), &pick(&high, &ly));
        if (s_low - s_high).abs() > 0.05 {
            return Ok(ScalingFit {
                exponent: s_high,
                intercept: i_high,
                stderr: se_high,
                residual_rms: rms_high,
                points_used: high.len(),
                dropped_lowest_decade: true,
            });
        }
    }
    Ok(ScalingFit {
        exponent: slope,
        intercept: icpt,
        stderr: se,
        residual_rms: rms,
        points_used: n,
        dropped_lowest_decade: false,
    })
}
