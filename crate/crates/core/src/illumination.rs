//! Target detection from photon-count covariances of correlated pixel pairs.
//!
//! Arm 1 is detected directly. Arm 2 hits a 50:50 beam splitter (the
//! object) that also injects a multithermal background; with the object
//! removed only the background reaches detector 2.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{check_finite, Error, Result};
use crate::estimation::maximize_scalar;
use crate::gaussian_core::{apply, beam_splitter, GaussianState, LossChannel};
use crate::moments::{number_stats, NumberStats};

/// Object reflectivity.
pub const REFLECTIVITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    /// Twin beam: both arms carry the same multithermal photon number.
    Twb,
    /// One multithermal beam of twice the per-mode energy split 50:50.
    SplitThermal,
}

impl Source {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "twb" | "quantum" => Some(Source::Twb),
            "thermal" | "classical" => Some(Source::SplitThermal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlluminationConfig {
    pub source: Source,
    /// Mean photons per mode in each arm.
    pub mu: f64,
    /// Temporal modes bundled into one pixel.
    pub modes: u32,
    pub object: bool,
    /// Mean background photons per pixel, spread over `background_modes`.
    pub background: f64,
    pub background_modes: u32,
    pub eta: f64,
    /// Pixel pairs per covariance estimate.
    pub pairs: usize,
    pub seed: u64,
}

impl IlluminationConfig {
    pub fn new(source: Source, background: f64, background_modes: u32) -> Self {
        Self {
            source,
            mu: 0.075,
            modes: 1000,
            object: true,
            background,
            background_modes,
            eta: 0.8,
            pairs: 10_000,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("mu", self.mu)?;
        check_finite("background", self.background)?;
        check_finite("eta", self.eta)?;
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be > 0, got {}", self.mu)));
        }
        if self.background < 0.0 {
            return Err(Error::InvalidParameter(format!("background must be >= 0, got {}", self.background)));
        }
        if self.modes == 0 || self.background_modes == 0 {
            return Err(Error::InvalidParameter("mode counts must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if self.pairs < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 pixel pairs, got {}", self.pairs)));
        }
        Ok(())
    }
}

/// Total count of `modes` thermal modes with `mean` photons each.
fn multithermal(rng: &mut ChaCha8Rng, modes: u32, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let intensity = Gamma::new(modes as f64, mean).unwrap().sample(rng);
    if intensity <= 0.0 {
        return 0;
    }
    Poisson::new(intensity).unwrap().sample(rng) as u64
}

fn thin(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    Binomial::new(n, p.clamp(0.0, 1.0)).unwrap().sample(rng)
}

fn draw_pairs(cfg: &IlluminationConfig, rng: &mut ChaCha8Rng) -> Vec<(u64, u64)> {
    let bg_mean = cfg.background / cfg.background_modes as f64;
    (0..cfg.pairs)
        .map(|_| {
            let (r, p) = match cfg.source {
                Source::Twb => {
                    let n = multithermal(rng, cfg.modes, cfg.mu);
                    (n, n)
                }
                Source::SplitThermal => {
                    let n = multithermal(rng, cfg.modes, 2.0 * cfg.mu);
                    let r = thin(rng, n, 0.5);
                    (r, n - r)
                }
            };
            let n1 = thin(rng, r, cfg.eta);
            let probe = if cfg.object { thin(rng, p, REFLECTIVITY * cfg.eta) } else { 0 };
            let bg = multithermal(rng, cfg.background_modes, bg_mean);
            let bg = thin(rng, bg, cfg.eta);
            (n1, probe + bg)
        })
        .collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Detected counts `(N1, N2)` for each pixel pair.
pub fn sample_counts(cfg: &IlluminationConfig) -> Result<Vec<(u64, u64)>> {
    cfg.validate()?;
    Ok(draw_pairs(cfg, &mut stream_rng(cfg.seed, 0)))
}

/// `<N1 N2> - <N1><N2>` over the pairs (population normalization).
pub fn covariance_statistic(samples: &[(u64, u64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 pairs, got {}", samples.len())));
    }
    let m = samples.len() as f64;
    let m1 = samples.iter().map(|s| s.0 as f64).sum::<f64>() / m;
    let m2 = samples.iter().map(|s| s.1 as f64).sum::<f64>() / m;
    Ok(samples.iter().map(|s| (s.0 as f64 - m1) * (s.1 as f64 - m2)).sum::<f64>() / m)
}

/// Per-pixel count moments predicted from the Gaussian-state description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMoments {
    pub mean: [f64; 2],
    pub var: [f64; 2],
    pub cov: f64,
}

/// Exact count moments: one mode pair from the moments engine scaled by the
/// number of independent modes, plus the background.
pub fn analytic_moments(cfg: &IlluminationConfig) -> Result<PairMoments> {
    cfg.validate()?;
    let probe_eta = if cfg.object { REFLECTIVITY * cfg.eta } else { 0.0 };
    let pair = match cfg.source {
        Source::Twb => GaussianState::twb(cfg.mu)?,
        Source::SplitThermal => {
            let two = GaussianState::thermal(2.0 * cfg.mu)?.tensor(&GaussianState::vacuum(1));
            apply(&beam_splitter(std::f64::consts::FRAC_PI_4, 0.0), &two, &[0, 1])?
        }
    };
    let pair = LossChannel::new(vec![cfg.eta, probe_eta])?.apply(&pair)?;
    let s: NumberStats = number_stats(&pair, &[(0, 1)])?;
    let k = cfg.modes as f64;
    let bg = GaussianState::thermal(cfg.background / cfg.background_modes as f64)?;
    let bg = number_stats(&LossChannel::new(vec![cfg.eta])?.apply(&bg)?, &[])?;
    let mb = cfg.background_modes as f64;
    Ok(PairMoments {
        mean: [k * s.means[0], k * s.means[1] + mb * bg.means[0]],
        var: [k * s.variances[0], k * s.variances[1] + mb * bg.variances[0]],
        cov: k * s.covariances[0].2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    pub mean: f64,
    pub var: f64,
}

impl GaussianFit {
    fn of(x: &[f64]) -> Self {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self { mean, var }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationResult {
    pub cov_in: Vec<f64>,
    pub cov_out: Vec<f64>,
    pub fit_in: GaussianFit,
    pub fit_out: GaussianFit,
    pub threshold: f64,
    pub p_err: f64,
    /// `ln P_err`, finite even when `p_err` underflows.
    pub ln_p_err: f64,
}

/// `ln(erfc(x) / 2)`, with the asymptotic series once `erfc` underflows.
fn ln_half_erfc(x: f64) -> f64 {
    if x < 25.0 {
        (0.5 * erfc(x)).ln()
    } else {
        let x2 = x * x;
        -x2 - (x * std::f64::consts::PI.sqrt()).ln() + (1.0 - 0.5 / x2 + 0.75 / (x2 * x2)).ln() - std::f64::consts::LN_2
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Minimal `ln P_err` and its threshold for two Gaussian hypotheses with
/// equal priors, deciding "present" on the side of `fit_in`.
pub fn gaussian_error(fit_in: GaussianFit, fit_out: GaussianFit) -> Result<(f64, f64)> {
    let (si, so) = (fit_in.var.sqrt(), fit_out.var.sqrt());
    if fit_in.mean == fit_out.mean {
        return Err(Error::Degenerate("hypotheses have equal mean covariance".into()));
    }
    if !(si > 0.0 && so > 0.0) {
        return Err(Error::Degenerate("zero spread under one hypothesis".into()));
    }
    let dir = if fit_in.mean > fit_out.mean { 1.0 } else { -1.0 };
    let ln_p = |t: f64| {
        let miss = ln_half_erfc(dir * (fit_in.mean - t) / (si * std::f64::consts::SQRT_2));
        let false_alarm = ln_half_erfc(dir * (t - fit_out.mean) / (so * std::f64::consts::SQRT_2));
        ln_add(miss, false_alarm) - std::f64::consts::LN_2
    };
    let (lo, hi) = if dir > 0.0 { (fit_out.mean, fit_in.mean) } else { (fit_in.mean, fit_out.mean) };
    let best = maximize_scalar(|t| -ln_p(t), (lo, hi), 1e-9 * (hi - lo))?;
    Ok((best.arg, -best.value))
}

/// Covariance estimates for `trials` independent realizations of each
/// hypothesis, Gaussian fits and the optimal threshold.
pub fn error_probability(cfg: &IlluminationConfig, trials: usize) -> Result<DiscriminationResult> {
    cfg.validate()?;
    if trials < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 trials per hypothesis, got {trials}")));
    }
    let run = |object: bool, offset: u64| -> Result<Vec<f64>> {
        let c = IlluminationConfig { object, ..cfg.clone() };
        (0..trials as u64)
            .into_par_iter()
            .map(|t| covariance_statistic(&draw_pairs(&c, &mut stream_rng(cfg.seed, offset + t))))
            .collect()
    };
    let cov_in = run(true, 1)?;
    let cov_out = run(false, 1 + trials as u64)?;
    let (fit_in, fit_out) = (GaussianFit::of(&cov_in), GaussianFit::of(&cov_out));
    let (threshold, ln_p_err) = gaussian_error(fit_in, fit_out)?;
    Ok(DiscriminationResult { cov_in, cov_out, fit_in, fit_out, threshold, p_err: ln_p_err.exp(), ln_p_err })
}

impl DiscriminationResult {
    /// `ln P_err` with the fitted means and spreads moved by `k` standard
    /// errors toward (`pessimistic`) or away from each other.
    pub fn ln_p_err_shifted(&self, k: f64, pessimistic: bool) -> Result<f64> {
        let n = self.cov_in.len() as f64;
        let shift = |f: GaussianFit, toward: f64| {
            let sd = f.var.sqrt();
            let s = if pessimistic { 1.0 } else { -1.0 };
            let mean = f.mean + s * toward * k * sd / n.sqrt();
            let sd = (sd * (1.0 + s * k / (2.0 * (n - 1.0)).sqrt())).max(0.0);
            GaussianFit { mean, var: sd * sd }
        };
        let dir = (self.fit_out.mean - self.fit_in.mean).signum();
        Ok(gaussian_error(shift(self.fit_in, dir), shift(self.fit_out, -dir))?.1)
    }
}
