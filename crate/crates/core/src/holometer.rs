//! Two coupled interferometers probing a correlated phase noise.
//!
//! Mode layout inside this module: `0 = a1`, `1 = a2` (the dark inputs that
//! may carry squeezed vacua or a twin beam) and `2 = b1`, `3 = b2` (the
//! coherent drives). Each interferometer is a beam splitter of angle
//! `phi_k / 2`, so after it mode 0 is the port `c1`, mode 2 is `d1`, mode 1
//! is `c2` and mode 3 is `d2`; the transmission is `tau_k = cos^2(phi_k / 2)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::curve::CurveData;
use crate::error::{check_finite, Error, Result};
use crate::gaussian_core::{
    apply, beam_splitter, single_mode_squeezer, two_mode_squeezer, GaussianState, LossChannel,
};
use crate::moments::{nrf, Contractions, NrfSign, OpPoly};

/// Finite-difference step for the mixed phase derivative.
pub const PHASE_STEP: f64 = 1e-4;

/// Largest fluctuation std accepted by [`holographic_noise_average`].
pub const MAX_SIGMA: f64 = 0.05;

const QUAD_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoloInput {
    /// Coherent drives only.
    Classical { mu: f64 },
    /// Coherent drives plus one squeezed vacuum per interferometer, with the
    /// squeezing aligned to the drive.
    Squeezed { mu: f64, lambda: f64 },
    /// Twin beam across the two dark inputs, drives with phase `psi`.
    Twb { lambda: f64, mu: f64, psi: f64 },
}

impl HoloInput {
    pub fn mu(&self) -> f64 {
        match *self {
            HoloInput::Classical { mu } | HoloInput::Squeezed { mu, .. } | HoloInput::Twb { mu, .. } => mu,
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            HoloInput::Classical { .. } => 0.0,
            HoloInput::Squeezed { lambda, .. } | HoloInput::Twb { lambda, .. } => lambda,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HoloInput::Classical { .. } => "classical",
            HoloInput::Squeezed { .. } => "squeezed",
            HoloInput::Twb { .. } => "twb",
        }
    }

    fn with_lambda(self, l: f64) -> Self {
        match self {
            HoloInput::Classical { .. } => self,
            HoloInput::Squeezed { mu, .. } => HoloInput::Squeezed { mu, lambda: l },
            HoloInput::Twb { mu, psi, .. } => HoloInput::Twb { lambda: l, mu, psi },
        }
    }
}

/// The correlation statistic `C(phi1, phi2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoloObservable {
    /// `dD1 dD2` with `D_k = N_ck - N_dk`.
    DifferenceProduct,
    /// `dN_c1 dN_c2`.
    PortProduct,
    /// `[d(N_c1 - N_c2)]^2 / 2`.
    DifferenceSquare,
}

impl HoloObservable {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diff-product" => Some(Self::DifferenceProduct),
            "port-product" => Some(Self::PortProduct),
            "diff-square" => Some(Self::DifferenceSquare),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolometerConfig {
    pub phi10: f64,
    pub phi20: f64,
    pub input: HoloInput,
    pub eta: f64,
    pub observable: HoloObservable,
    /// Reserved for a radiation-pressure correction; only 0 is accepted.
    pub radiation_pressure: f64,
}

impl HolometerConfig {
    /// Both interferometers at `phi0`. The twin beam reads the squared
    /// port difference, the other families the product of differences.
    pub fn new(input: HoloInput, phi0: f64, eta: f64) -> Self {
        let observable = match input {
            HoloInput::Twb { .. } => HoloObservable::DifferenceSquare,
            _ => HoloObservable::DifferenceProduct,
        };
        Self { phi10: phi0, phi20: phi0, input, eta, observable, radiation_pressure: 0.0 }
    }

    pub fn with_observable(mut self, o: HoloObservable) -> Self {
        self.observable = o;
        self
    }

    pub fn with_phases(mut self, phi10: f64, phi20: f64) -> Self {
        self.phi10 = phi10;
        self.phi20 = phi20;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    /// Classical drives of the same energy and efficiency at the dark-fringe
    /// optimum `pi/2`.
    pub fn classical_baseline(&self) -> Self {
        HolometerConfig::new(HoloInput::Classical { mu: self.input.mu() }, FRAC_PI_2, self.eta)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("phi10", self.phi10)?;
        check_finite("phi20", self.phi20)?;
        check_finite("eta", self.eta)?;
        let (mu, lambda) = (self.input.mu(), self.input.lambda());
        check_finite("mu", mu)?;
        check_finite("lambda", lambda)?;
        if mu < 0.0 || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("mu and lambda must be >= 0, got {mu}, {lambda}")));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if let HoloInput::Twb { psi, .. } = self.input {
            if !(0.0..2.0 * PI).contains(&psi) {
                return Err(Error::InvalidParameter(format!("psi must lie in [0, 2pi), got {psi}")));
            }
        }
        if self.radiation_pressure != 0.0 {
            return Err(Error::InvalidParameter("radiation-pressure correction is not modelled".into()));
        }
        Ok(())
    }

    /// Detected four-mode state with the interferometers at `(phi1, phi2)`.
    pub fn state(&self, phi1: f64, phi2: f64) -> Result<GaussianState> {
        self.validate()?;
        let mut s = GaussianState::vacuum(4);
        let r = self.input.lambda().sqrt().asinh();
        let mut drive = self.input.mu().sqrt();
        match self.input {
            HoloInput::Classical { .. } => {}
            HoloInput::Squeezed { .. } => {
                let sq = single_mode_squeezer(Complex64::from_polar(r, PI));
                s = apply(&sq, &s, &[0])?;
                s = apply(&sq, &s, &[1])?;
            }
            HoloInput::Twb { psi, .. } => {
                s = apply(&two_mode_squeezer(Complex64::from_polar(r, PI)), &s, &[0, 1])?;
                drive = 0.0;
                s = s.displaced(2, Complex64::from_polar(self.input.mu().sqrt(), psi));
                s = s.displaced(3, Complex64::from_polar(self.input.mu().sqrt(), psi));
            }
        }
        if drive > 0.0 {
            s = s.displaced(2, Complex64::new(drive, 0.0));
            s = s.displaced(3, Complex64::new(drive, 0.0));
        }
        s = apply(&beam_splitter(0.5 * phi1, 0.0), &s, &[0, 2])?;
        s = apply(&beam_splitter(0.5 * phi2, 0.0), &s, &[1, 3])?;
        LossChannel::uniform(self.eta, 4)?.apply(&s)
    }
}

/// Centered observable pieces: fluctuation operators and their means.
struct Pieces {
    ctx: Contractions,
    first: (OpPoly, f64),
    second: Option<(OpPoly, f64)>,
}

fn pieces(cfg: &HolometerConfig, phi1: f64, phi2: f64) -> Result<Pieces> {
    let st = cfg.state(phi1, phi2)?;
    let ctx = Contractions::new(&st);
    let port = |k: usize| (ctx.delta_number(k), ctx.mean_number(k));
    let diff = |i: usize, j: usize| {
        let (a, x) = port(i);
        let (b, y) = port(j);
        (&a - &b, x - y)
    };
    let (first, second) = match cfg.observable {
        HoloObservable::DifferenceProduct => (diff(0, 2), Some(diff(1, 3))),
        HoloObservable::PortProduct => (port(0), Some(port(1))),
        HoloObservable::DifferenceSquare => (diff(0, 1), None),
    };
    Ok(Pieces { ctx, first, second })
}

impl Pieces {
    fn centers(&self) -> (f64, f64) {
        (self.first.1, self.second.as_ref().map_or(0.0, |s| s.1))
    }

    fn operator(&self) -> OpPoly {
        match &self.second {
            Some((b, _)) => &self.first.0 * b,
            None => (&self.first.0 * &self.first.0).scale(0.5),
        }
    }

    /// `<C>` with the centering constants of `C` frozen at `c`.
    fn mean(&self, c: (f64, f64)) -> Result<f64> {
        let x1 = self.first.1 - c.0;
        Ok(match &self.second {
            Some((b, x2)) => self.ctx.expect(&(&self.first.0 * b))?.re + x1 * (x2 - c.1),
            None => 0.5 * (self.ctx.expect(&(&self.first.0 * &self.first.0))?.re + x1 * x1),
        })
    }
}

/// Zero-order uncertainty of a covariance measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    pub u: f64,
    pub var_c: f64,
    /// `<d^2 C / dphi1 dphi2>` at the working point.
    pub denominator: f64,
}

/// Mean of `C(phi1, phi2)` with centering taken at the working point.
pub fn mean_statistic(cfg: &HolometerConfig, phi1: f64, phi2: f64) -> Result<f64> {
    let c = pieces(cfg, cfg.phi10, cfg.phi20)?.centers();
    pieces(cfg, phi1, phi2)?.mean(c)
}

fn mixed_partial(cfg: &HolometerConfig, c: (f64, f64)) -> Result<f64> {
    let f = |a: f64, b: f64| pieces(cfg, cfg.phi10 + a, cfg.phi20 + b)?.mean(c);
    let d = |h: f64| -> Result<f64> { Ok((f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h)) };
    let h = PHASE_STEP;
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

/// `U = sqrt(2 var C) / |<d^2 C / dphi1 dphi2>|`, infinite when the mixed
/// derivative vanishes.
pub fn covariance_uncertainty_zero(cfg: &HolometerConfig) -> Result<Uncertainty> {
    let p = pieces(cfg, cfg.phi10, cfg.phi20)?;
    let var_c = p.ctx.variance(&p.operator())?.max(0.0);
    let denominator = mixed_partial(cfg, p.centers())?;
    let u = if denominator == 0.0 { f64::INFINITY } else { (2.0 * var_c).sqrt() / denominator.abs() };
    Ok(Uncertainty { u, var_c, denominator })
}

/// `U / U_CL` against [`HolometerConfig::classical_baseline`].
pub fn ratio(cfg: &HolometerConfig) -> Result<f64> {
    let u = covariance_uncertainty_zero(cfg)?.u;
    let u_cl = covariance_uncertainty_zero(&cfg.classical_baseline())?.u;
    Ok(u / u_cl)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    Eta,
    Phi0,
    Lambda,
}

impl Vary {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eta" => Some(Vary::Eta),
            "phi0" => Some(Vary::Phi0),
            "lambda" => Some(Vary::Lambda),
            _ => None,
        }
    }

    pub fn apply(self, cfg: &HolometerConfig, x: f64) -> HolometerConfig {
        match self {
            Vary::Eta => cfg.with_eta(x),
            Vary::Phi0 => cfg.with_phases(x, x),
            Vary::Lambda => HolometerConfig { input: cfg.input.with_lambda(x), ..*cfg },
        }
    }

    fn label(self) -> &'static str {
        match self {
            Vary::Eta => "eta",
            Vary::Phi0 => "phi0",
            Vary::Lambda => "lambda",
        }
    }
}

/// `R = U / U_CL` along one parameter. Extra columns: `U`, `U_CL`, `denominator`.
pub fn ratio_curves(cfg: &HolometerConfig, vary: Vary, grid: &[f64]) -> Result<CurveData> {
    let rows = grid
        .par_iter()
        .map(|&x| {
            let c = vary.apply(cfg, x);
            let u = covariance_uncertainty_zero(&c)?;
            let u_cl = covariance_uncertainty_zero(&c.classical_baseline())?.u;
            Ok((u.u / u_cl, u.u, u_cl, u.denominator))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveData::new(vary.label(), "R", grid.to_vec(), rows.iter().map(|r| r.0).collect())
        .with_column("U", rows.iter().map(|r| r.1).collect())
        .with_column("U_CL", rows.iter().map(|r| r.2).collect())
        .with_column("denominator", rows.iter().map(|r| r.3).collect())
        .with_param("family", cfg.input.name())
        .with_param("mu", cfg.input.mu())
        .with_param("lambda", cfg.input.lambda())
        .with_param("eta", cfg.eta)
        .with_param("phi10", cfg.phi10)
        .with_param("phi20", cfg.phi20))
}

/// Efficiency at which `R` crosses `level`, by bisection on `[lo, hi]`.
pub fn eta_threshold(cfg: &HolometerConfig, level: f64, lo: f64, hi: f64) -> Result<f64> {
    bisect(|eta| Ok(ratio(&cfg.with_eta(eta))? - level), lo, hi)
}

/// Efficiency at which `R_a = R_b` on `[lo, hi]`.
pub fn eta_crossing(a: &HolometerConfig, b: &HolometerConfig, lo: f64, hi: f64) -> Result<f64> {
    bisect(|eta| Ok(ratio(&a.with_eta(eta))? - ratio(&b.with_eta(eta))?), lo, hi)
}

fn bisect(g: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (g(a)?, g(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Degenerate(format!("no sign change on [{lo}, {hi}]")));
    }
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        let fm = g(m)?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Interferometer phase for transmission `tau`.
pub fn phase_for_tau(tau: f64) -> f64 {
    2.0 * tau.clamp(0.0, 1.0).sqrt().acos()
}

/// `NRF` of the `c1, c2` ports with both interferometers at transmission `tau`.
/// Uses the configured drive phase.
pub fn nrf_at(cfg: &HolometerConfig, tau: f64, sign: NrfSign) -> Result<f64> {
    let p = phase_for_tau(tau);
    nrf(&cfg.with_phases(p, p).state(p, p)?, (0, 1), sign)
}

/// The drive phase on an `n`-point grid over `[0, 2pi)` that minimizes `NRF`.
pub fn nrf_psi_argmin(cfg: &HolometerConfig, tau: f64, sign: NrfSign, n: usize) -> Result<f64> {
    let HoloInput::Twb { lambda, mu, .. } = cfg.input else {
        return Err(Error::InvalidParameter("NRF regimes need the twin-beam family".into()));
    };
    let mut best = (0.0, f64::INFINITY);
    for i in 0..n {
        let psi = 2.0 * PI * i as f64 / n as f64;
        let c = HolometerConfig { input: HoloInput::Twb { lambda, mu, psi }, ..*cfg };
        let v = nrf_at(&c, tau, sign)?;
        if v < best.1 - 1e-12 * v.abs() {
            best = (psi, v);
        }
    }
    Ok(best.0)
}

/// Bright-regime value `1 - 2 eta tau (sqrt(lambda (1 + lambda)) - lambda)`.
pub fn nrf_bright(lambda: f64, eta: f64, tau: f64) -> f64 {
    1.0 - 2.0 * eta * tau * ((lambda * (1.0 + lambda)).sqrt() - lambda)
}

/// `NRF-` at `psi = pi/2` and `NRF+` at `psi = 0` along `tau`. Extra columns:
/// `NRF_plus`, `kappa = mu (1 - tau) / (tau lambda)`, `bright` (1 when
/// `kappa > 1`) and the bright-regime formula.
pub fn nrf_regimes(cfg: &HolometerConfig, tau_grid: &[f64]) -> Result<CurveData> {
    let HoloInput::Twb { lambda, mu, .. } = cfg.input else {
        return Err(Error::InvalidParameter("NRF regimes need the twin-beam family".into()));
    };
    let at = |psi: f64| HolometerConfig { input: HoloInput::Twb { lambda, mu, psi }, ..*cfg };
    let (minus, plus) = (at(FRAC_PI_2), at(0.0));
    let rows = tau_grid
        .par_iter()
        .map(|&t| {
            let kappa = if lambda > 0.0 { mu * (1.0 - t) / (t * lambda) } else { f64::INFINITY };
            Ok((nrf_at(&minus, t, NrfSign::Minus)?, nrf_at(&plus, t, NrfSign::Plus)?, kappa))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveData::new("tau", "NRF_minus", tau_grid.to_vec(), rows.iter().map(|r| r.0).collect())
        .with_column("NRF_plus", rows.iter().map(|r| r.1).collect())
        .with_column("kappa", rows.iter().map(|r| r.2).collect())
        .with_column("bright", rows.iter().map(|r| f64::from(u8::from(r.2 > 1.0))).collect())
        .with_column("NRF_bright", tau_grid.iter().map(|&t| nrf_bright(lambda, cfg.eta, t)).collect())
        .with_param("mu", mu)
        .with_param("lambda", lambda)
        .with_param("eta", cfg.eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseConfiguration {
    /// Fully correlated fluctuations.
    Parallel,
    /// Independent fluctuations.
    Orthogonal,
}

/// Zero-mean Gaussian phase fluctuations with marginal std `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub configuration: NoiseConfiguration,
    pub sigma: f64,
}

impl NoiseModel {
    pub fn correlation(&self) -> f64 {
        match self.configuration {
            NoiseConfiguration::Parallel => 1.0,
            NoiseConfiguration::Orthogonal => 0.0,
        }
    }
}

/// What to average over the phase fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoloStatistic {
    /// `<C>` centered at the working point.
    Correlation,
    /// Mean count of one output mode.
    MeanCount(usize),
}

/// `E[<O(phi10 + d1, phi20 + d2)>]` over the noise model, by tensor
/// Gauss-Hermite quadrature.
pub fn holographic_noise_average(cfg: &HolometerConfig, noise: &NoiseModel, stat: HoloStatistic) -> Result<f64> {
    check_finite("sigma", noise.sigma)?;
    if noise.sigma < 0.0 || noise.sigma > MAX_SIGMA {
        return Err(Error::InvalidParameter(format!(
            "sigma {} outside [0, {MAX_SIGMA}] for the quadrature order",
            noise.sigma
        )));
    }
    let centers = pieces(cfg, cfg.phi10, cfg.phi20)?.centers();
    let eval = |p1: f64, p2: f64| -> Result<f64> {
        match stat {
            HoloStatistic::Correlation => pieces(cfg, p1, p2)?.mean(centers),
            HoloStatistic::MeanCount(k) => {
                if k >= 4 {
                    return Err(Error::ModeIndex(format!("mode {k} out of range")));
                }
                Ok(cfg.state(p1, p2)?.mean_photons(k))
            }
        }
    };
    if noise.sigma == 0.0 {
        return eval(cfg.phi10, cfg.phi20);
    }
    let quad = GaussHermite::new(NonZeroUsize::new(QUAD_ORDER).unwrap());
    let rule: Vec<(f64, f64)> = quad
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w / PI.sqrt()))
        .collect();
    let rho = noise.correlation();
    let s = noise.sigma;
    let mut acc = 0.0;
    for &(z1, w1) in &rule {
        for &(z2, w2) in &rule {
            let d1 = s * z1;
            let d2 = s * (rho * z1 + (1.0 - rho * rho).sqrt() * z2);
            acc += w1 * w2 * eval(cfg.phi10 + d1, cfg.phi20 + d2)?;
        }
    }
    Ok(acc)
}

/// `(E_par[C] - E_orth[C]) / <d^2 C / dphi1 dphi2>`, which estimates the
/// covariance of the phase fluctuations under `noise`.
pub fn recovered_covariance(cfg: &HolometerConfig, noise: &NoiseModel) -> Result<f64> {
    let orth = NoiseModel { configuration: NoiseConfiguration::Orthogonal, sigma: noise.sigma };
    let e = holographic_noise_average(cfg, noise, HoloStatistic::Correlation)?;
    let e0 = holographic_noise_average(cfg, &orth, HoloStatistic::Correlation)?;
    let d = covariance_uncertainty_zero(cfg)?.denominator;
    if d == 0.0 {
        return Err(Error::Degenerate("vanishing mixed derivative".into()));
    }
    Ok((e - e0) / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn twb(lambda: f64, mu: f64) -> HoloInput {
        HoloInput::Twb { lambda, mu, psi: FRAC_PI_2 }
    }

    #[test]
    fn twb_is_noiseless_at_the_transparent_point() {
        let u = covariance_uncertainty_zero(&HolometerConfig::new(twb(0.5, 1e12), 0.0, 1.0)).unwrap();
        assert_eq!(u.u, 0.0);
        assert_relative_eq!(u.denominator.abs(), 0.5e12 * 0.75f64.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn classical_at_dark_fringe() {
        let mu = 1e8;
        let u = covariance_uncertainty_zero(&HolometerConfig::new(HoloInput::Classical { mu }, FRAC_PI_2, 1.0))
            .unwrap();
        assert_relative_eq!(u.u, 2f64.sqrt() / mu, max_relative = 1e-6);
    }

    #[test]
    fn squeezed_bright_limit() {
        let (mu, lambda) = (1e12, 1e3);
        let u = covariance_uncertainty_zero(&HolometerConfig::new(HoloInput::Squeezed { mu, lambda }, FRAC_PI_2, 1.0))
            .unwrap()
            .u;
        assert_relative_eq!(u, 1.0 / (2.0 * 2f64.sqrt() * lambda * mu), max_relative = 1e-2);
    }

    #[test]
    fn twb_ratio_small_lambda() {
        let eta = 0.8;
        let r = ratio(&HolometerConfig::new(twb(1e-4, 1e12), 0.0, eta)).unwrap();
        assert_relative_eq!(r, (2.0 * (1.0 - eta) / eta).sqrt(), max_relative = 1e-2);
    }

    #[test]
    fn nrf_pure_twb_is_zero() {
        let cfg = HolometerConfig::new(twb(2.0, 0.0), 0.0, 1.0);
        assert!(nrf_at(&cfg, 1.0, NrfSign::Minus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nrf_bright_regime() {
        let (lambda, eta, tau) = (0.7, 0.9, 0.6);
        let cfg = HolometerConfig::new(twb(lambda, 1e12), 0.0, eta);
        let v = nrf_at(&cfg, tau, NrfSign::Minus).unwrap();
        assert_relative_eq!(v, nrf_bright(lambda, eta, tau), epsilon = 1e-6);
    }

    #[test]
    fn zero_sigma_is_point_value() {
        let cfg = HolometerConfig::new(twb(0.5, 1e4), 0.1, 0.9);
        let noise = NoiseModel { configuration: NoiseConfiguration::Parallel, sigma: 0.0 };
        let a = holographic_noise_average(&cfg, &noise, HoloStatistic::Correlation).unwrap();
        assert_eq!(a, mean_statistic(&cfg, 0.1, 0.1).unwrap());
    }

    #[test]
    fn rejects_large_sigma() {
        let cfg = HolometerConfig::new(twb(0.5, 1e4), 0.1, 0.9);
        let noise = NoiseModel { configuration: NoiseConfiguration::Parallel, sigma: 0.3 };
        assert!(holographic_noise_average(&cfg, &noise, HoloStatistic::Correlation).is_err());
    }
}
