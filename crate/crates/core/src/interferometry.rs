//! Mach-Zehnder style interferometers with passive or active (OPA) stages.
//!
//! Every configuration is: two inputs, a first stage mixing them, a phase
//! shift `phi` on mode 0, a detection stage, detector losses, and a photon
//! counting observable. With the passive stages below the whole chain acts on
//! the mode operators exactly as [`mz_effective_bs`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curve::CurveData;
use crate::error::{Error, Result};
use crate::estimation::{maximize_scalar, minimize_scalar_grid, qfi_pure_unitary, Generator};
use crate::gaussian_core::{
    apply, beam_splitter, make_state, phase_shift, two_mode_squeezer, GaussianState, LossChannel, Mat,
    StateKind, SymplecticOp, Vector,
};
use crate::moments::{Contractions, OpPoly};

/// `c = cos(phi/2) a + sin(phi/2) b`, `d = cos(phi/2) b - sin(phi/2) a`.
pub fn mz_effective_bs(phi: f64) -> SymplecticOp {
    beam_splitter(0.5 * phi, 0.0)
}

/// First half of the passive interferometer: a `-pi/2` shifter on `b`, then
/// a balanced beam splitter.
pub fn passive_mixer() -> SymplecticOp {
    embed(&phase_shift(-FRAC_PI_2), 1).then(&beam_splitter(FRAC_PI_4, 0.0))
}

/// Second half: balanced beam splitter with the opposite phase, then a
/// `pi/2` shifter on the `d` output.
pub fn passive_recombiner() -> SymplecticOp {
    beam_splitter(FRAC_PI_4, PI).then(&embed(&phase_shift(FRAC_PI_2), 1))
}

fn opa(r: f64, phase: f64) -> SymplecticOp {
    two_mode_squeezer(Complex64::from_polar(r, phase))
}

/// Single-mode op placed on `mode` of a two-mode system.
fn embed(op: &SymplecticOp, mode: usize) -> SymplecticOp {
    let mut m = SymplecticOp::identity(2);
    for i in 0..2 {
        for j in 0..2 {
            m.matrix[(2 * mode + i, 2 * mode + j)] = op.matrix[(i, j)];
        }
        m.displacement[2 * mode + i] = op.displacement[i];
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstStage {
    /// Balanced beam splitter.
    BeamSplitter,
    /// Two-mode squeezer with gain `r` and pump phase.
    Opa { r: f64, phase: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionStage {
    BeamSplitter,
    Opa { r: f64, phase: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `D- = N_c - N_d`.
    Difference,
    /// `D+ = N_c + N_d`.
    Sum,
    /// `N_d` alone.
    SinglePort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    pub first_stage: FirstStage,
    pub detection: DetectionStage,
    pub observable: Observable,
    pub inputs: [StateKind; 2],
    /// Detector efficiency per output port.
    pub eta: [f64; 2],
    pub working_point: f64,
}

impl InterferometerConfig {
    /// Plain Mach-Zehnder, `D-` at `phi = pi/2`.
    pub fn mach_zehnder(a: StateKind, b: StateKind) -> Self {
        Self {
            first_stage: FirstStage::BeamSplitter,
            detection: DetectionStage::BeamSplitter,
            observable: Observable::Difference,
            inputs: [a, b],
            eta: [1.0, 1.0],
            working_point: FRAC_PI_2,
        }
    }

    /// Mach-Zehnder read out at port `d` only, dark fringe at `phi = 0`.
    pub fn dark_port(a: StateKind, b: StateKind) -> Self {
        Self { observable: Observable::SinglePort, working_point: 0.0, ..Self::mach_zehnder(a, b) }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = [eta, eta];
        self
    }

    pub fn validate(&self) -> Result<()> {
        for &e in &self.eta {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!("efficiency {e} outside [0, 1]")));
            }
        }
        let gains = [
            match self.first_stage {
                FirstStage::Opa { r, .. } => r,
                _ => 0.0,
            },
            match self.detection {
                DetectionStage::Opa { r, .. } => r,
                _ => 0.0,
            },
        ];
        if gains.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter(format!("OPA gains must be finite and >= 0: {gains:?}")));
        }
        for k in &self.inputs {
            if k.n_modes() != 1 {
                return Err(Error::InvalidParameter("each input must be a single-mode state".into()));
            }
        }
        Ok(())
    }

    /// Two-mode state after the first stage, before the phase shift.
    pub fn internal_state(&self) -> Result<GaussianState> {
        self.validate()?;
        let input = make_state(self.inputs[0], 1)?.tensor(&make_state(self.inputs[1], 1)?);
        let op = match self.first_stage {
            FirstStage::BeamSplitter => passive_mixer(),
            FirstStage::Opa { r, phase } => opa(r, phase),
        };
        apply(&op, &input, &[0, 1])
    }

    fn detection_op(&self) -> SymplecticOp {
        match self.detection {
            DetectionStage::BeamSplitter => passive_recombiner(),
            DetectionStage::Opa { r, phase } => opa(r, phase),
        }
    }

    /// Detected two-mode state at phase `phi`.
    pub fn output_state(&self, phi: f64) -> Result<GaussianState> {
        let inner = self.internal_state()?;
        let s = apply(&phase_shift(phi), &inner, &[0])?;
        let s = apply(&self.detection_op(), &s, &[0, 1])?;
        LossChannel::new(self.eta.to_vec())?.apply(&s)
    }

    /// Total mean photon number inside the interferometer.
    pub fn n_tot(&self) -> Result<f64> {
        Ok(self.internal_state()?.total_photons())
    }
}

/// Mean, variance and phase slope of the configured observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeStats {
    pub mean: f64,
    pub variance: f64,
    /// `d<O>/dphi`, exact.
    pub slope: f64,
}

impl FringeStats {
    /// `sqrt(var O) / |d<O>/dphi|`.
    pub fn sensitivity(&self) -> Result<f64> {
        if self.slope.abs() < 1e-14 {
            return Err(Error::Stationary(self.slope));
        }
        Ok(self.variance.max(0.0).sqrt() / self.slope.abs())
    }
}

/// Precomputed chain for repeated evaluation at many phases.
pub struct Fringe {
    observable: Observable,
    inner: GaussianState,
    det: Mat,
    gain: Vec<f64>,
    eta: [f64; 2],
}

impl Fringe {
    pub fn new(config: &InterferometerConfig) -> Result<Self> {
        let inner = config.internal_state()?;
        let g = [config.eta[0].sqrt(), config.eta[1].sqrt()];
        Ok(Self {
            observable: config.observable,
            inner,
            det: config.detection_op().matrix,
            gain: vec![g[0], g[0], g[1], g[1]],
            eta: config.eta,
        })
    }

    fn weights(&self) -> [f64; 2] {
        match self.observable {
            Observable::Difference => [1.0, -1.0],
            Observable::Sum => [1.0, 1.0],
            Observable::SinglePort => [0.0, 1.0],
        }
    }

    fn rotation(phi: f64) -> Mat {
        let mut r = Mat::identity(4, 4);
        let p = phase_shift(phi).matrix;
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = p[(i, j)];
            }
        }
        r
    }

    /// Mean and covariance at the detectors together with their phase derivatives.
    fn moments(&self, phi: f64) -> (Vector, Mat, Vector, Mat) {
        let r = Self::rotation(phi);
        let mut dr = Mat::zeros(4, 4);
        let p = phase_shift(phi + FRAC_PI_2).matrix;
        for i in 0..2 {
            for j in 0..2 {
                dr[(i, j)] = p[(i, j)];
            }
        }
        let t = &self.det * &r;
        let dt = &self.det * &dr;
        let (m0, v0) = (self.inner.mean(), self.inner.cov());
        let g = |i: usize| self.gain[i];
        let mean = Vector::from_fn(4, |i, _| g(i) * (&t * m0)[i]);
        let dmean = Vector::from_fn(4, |i, _| g(i) * (&dt * m0)[i]);
        let tv = &t * v0;
        let cov = &tv * t.transpose();
        let dcov_half = &dt * v0 * t.transpose();
        let dcov = &dcov_half + dcov_half.transpose();
        let cov = Mat::from_fn(4, 4, |i, j| {
            g(i) * g(j) * cov[(i, j)] + if i == j { 1.0 - self.eta[i / 2] } else { 0.0 }
        });
        let dcov = Mat::from_fn(4, 4, |i, j| g(i) * g(j) * dcov[(i, j)]);
        (mean, cov, dmean, dcov)
    }

    pub fn state(&self, phi: f64) -> GaussianState {
        let (mean, cov, ..) = self.moments(phi);
        GaussianState::from_parts(mean, (&cov + cov.transpose()) * 0.5)
    }

    pub fn stats(&self, phi: f64) -> Result<FringeStats> {
        let (mean, cov, dmean, dcov) = self.moments(phi);
        let state = GaussianState::from_parts(mean.clone(), (&cov + cov.transpose()) * 0.5);
        let ctx = Contractions::new(&state);
        let w = self.weights();
        let mut poly = OpPoly::zero();
        let mut m = 0.0;
        let mut slope = 0.0;
        for k in 0..2 {
            if w[k] == 0.0 {
                continue;
            }
            poly = &poly + &ctx.delta_number(k).scale(w[k]);
            m += w[k] * ctx.mean_number(k);
            // <N> = (V_xx + V_pp + x^2 + p^2 - 2) / 4
            let (x, p) = (2 * k, 2 * k + 1);
            let dn = (dcov[(x, x)] + dcov[(p, p)] + 2.0 * (mean[x] * dmean[x] + mean[p] * dmean[p])) / 4.0;
            slope += w[k] * dn;
        }
        Ok(FringeStats { mean: m, variance: ctx.variance(&poly)?, slope })
    }

    pub fn sensitivity(&self, phi: f64) -> Result<f64> {
        self.stats(phi)?.sensitivity()
    }
}

/// Mean, variance and slope of the configured observable at `phi`.
pub fn fringe_observable(config: &InterferometerConfig, phi: f64) -> Result<FringeStats> {
    Fringe::new(config)?.stats(phi)
}

/// Monte Carlo fringes: `shots` Gaussian draws per phase from the exact
/// moments. Each grid point uses its own ChaCha stream of the master seed.
pub fn simulate_fringes(
    config: &InterferometerConfig,
    phi_grid: &[f64],
    shots: usize,
    seed: u64,
) -> Result<CurveData> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let fr = Fringe::new(config)?;
    let (mut sample_mean, mut sample_std, mut exact, mut exact_std) = (vec![], vec![], vec![], vec![]);
    for (i, &phi) in phi_grid.iter().enumerate() {
        let st = fr.stats(phi)?;
        let sd = st.variance.max(0.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..shots {
            let z: f64 = rng.sample(StandardNormal);
            let x = st.mean + sd * z;
            s1 += x;
            s2 += x * x;
        }
        let n = shots as f64;
        let mu = s1 / n;
        let var = if shots > 1 { ((s2 - n * mu * mu) / (n - 1.0)).max(0.0) } else { 0.0 };
        sample_mean.push(mu);
        sample_std.push(var.sqrt());
        exact.push(st.mean);
        exact_std.push(sd);
    }
    Ok(CurveData::new("phi", "sample_mean", phi_grid.to_vec(), sample_mean)
        .with_errors(sample_std)
        .with_column("exact_mean", exact)
        .with_column("exact_std", exact_std)
        .with_param("shots", shots)
        .with_param("seed", seed))
}

/// `R(phi) = S_sq / S_cl` over a grid, with the phases where `R < 1` flagged.
pub fn sensitivity_ratio(
    config_sq: &InterferometerConfig,
    config_cl: &InterferometerConfig,
    phi_grid: &[f64],
) -> Result<CurveData> {
    let alpha = |c: &InterferometerConfig| -> f64 {
        c.inputs
            .iter()
            .map(|k| match k {
                StateKind::Coherent(a) => a.norm(),
                StateKind::Squeezed { alpha, .. } => alpha.norm(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    };
    if (alpha(config_sq) - alpha(config_cl)).abs() > 1e-12 * alpha(config_cl).max(1.0) {
        return Err(Error::InvalidParameter("both configurations need the same coherent amplitude".into()));
    }
    let (fs, fc) = (Fringe::new(config_sq)?, Fringe::new(config_cl)?);
    let (mut r, mut ssq, mut scl, mut below) = (vec![], vec![], vec![], vec![]);
    for &phi in phi_grid {
        let a = fs.sensitivity(phi)?;
        let b = fc.sensitivity(phi)?;
        r.push(a / b);
        ssq.push(a);
        scl.push(b);
        below.push(if a < b { 1.0 } else { 0.0 });
    }
    Ok(CurveData::new("phi", "R", phi_grid.to_vec(), r)
        .with_column("S_sq", ssq)
        .with_column("S_cl", scl)
        .with_column("improved", below))
}

/// Energy bookkeeping for the two-input probes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyBudget {
    pub n_tot: f64,
    /// Signal fraction `alpha^2 / (alpha^2 + gamma^2)`.
    pub delta: f64,
    pub beta_tot: f64,
    pub beta: f64,
}

impl EnergyBudget {
    /// Inputs `|alpha, r>|gamma, xi>` ahead of a passive first stage.
    pub fn passive(alpha: f64, gamma: f64, r: f64, xi: f64) -> Self {
        let (sr, sx) = (r.sinh().powi(2), xi.sinh().powi(2));
        let n_tot = alpha * alpha + gamma * gamma + sr + sx;
        let coh = alpha * alpha + gamma * gamma;
        Self {
            n_tot,
            delta: if coh > 0.0 { alpha * alpha / coh } else { 0.0 },
            beta_tot: if n_tot > 0.0 { (sr + sx) / n_tot } else { 0.0 },
            beta: if n_tot > 0.0 { sx / n_tot } else { 0.0 },
        }
    }

    /// Coherent inputs `|alpha>|gamma e^{i theta}>` through an OPA of gain `r`.
    pub fn active(alpha: f64, gamma: f64, theta: f64, r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let coh = alpha * alpha + gamma * gamma;
        let n_tot = (coh + 1.0) * c + 2.0 * alpha * gamma * theta.cos() * s - 1.0;
        let sq = 2.0 * r.sinh().powi(2);
        let b = if n_tot > 0.0 { sq / n_tot } else { 0.0 };
        Self { n_tot, delta: if coh > 0.0 { alpha * alpha / coh } else { 0.0 }, beta_tot: b, beta: b }
    }
}

/// Coherent amplitudes `(alpha, gamma)` for an OPA probe with total energy
/// `n_tot`, squeezing fraction `beta = 2 sinh^2 r / n_tot` and signal
/// fraction `delta`. `None` if the budget cannot be met.
pub fn active_amplitudes(n_tot: f64, beta: f64, delta: f64, theta: f64) -> Option<(f64, f64, f64)> {
    let r = (0.5 * beta * n_tot).max(0.0).sqrt().asinh();
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let k = c + 2.0 * (delta * (1.0 - delta)).max(0.0).sqrt() * theta.cos() * s;
    let a = (n_tot + 1.0 - c) / k;
    if !(k > 0.0) || a < -1e-12 * n_tot.max(1.0) {
        return None;
    }
    let a = a.max(0.0);
    Some(((delta * a).sqrt(), ((1.0 - delta) * a).sqrt(), r))
}

/// Probe `|alpha, r>|alpha, r>` after a balanced beam splitter, with
/// `n_tot = 2(alpha^2 + sinh^2 r)` and `beta_tot = 2 sinh^2 r / n_tot`.
pub fn passive_probe(n_tot: f64, beta_tot: f64) -> Result<GaussianState> {
    if !(n_tot > 0.0) || !(0.0..=1.0).contains(&beta_tot) {
        return Err(Error::InvalidParameter(format!("n_tot = {n_tot}, beta_tot = {beta_tot}")));
    }
    let r = (0.5 * beta_tot * n_tot).sqrt().asinh();
    let alpha = Complex64::new((0.5 * (1.0 - beta_tot) * n_tot).sqrt(), 0.0);
    let one = StateKind::Squeezed { alpha, xi: Complex64::new(r, 0.0) };
    let input = make_state(one, 2)?;
    apply(&beam_splitter(FRAC_PI_4, 0.0), &input, &[0, 1])
}

/// `H = 4 var[N_a]` of [`passive_probe`].
pub fn qfi_passive(n_tot: f64, beta_tot: f64) -> Result<f64> {
    qfi_pure_unitary(&passive_probe(n_tot, beta_tot)?, &Generator::number(0))
}

/// The closed form `2N[2N b(2-b) + 2(1-b) sqrt(N b (2 + N b))]` as printed in
/// the literature for the same probe. It is not `4 var[N_a]`; kept for the
/// discrepancy report.
pub fn qfi_passive_printed(n_tot: f64, beta_tot: f64) -> f64 {
    let (n, b) = (n_tot, beta_tot);
    2.0 * n * (2.0 * n * b * (2.0 - b) + 2.0 * (1.0 - b) * (n * b * (2.0 + n * b)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QfiOptimum {
    pub n_tot: f64,
    pub beta: f64,
    /// Signal fraction, CLBI only.
    pub delta: f64,
    pub h: f64,
}

impl QfiOptimum {
    /// `delta phi = H^{-1/2}`.
    pub fn delta_phi(&self) -> f64 {
        1.0 / self.h.sqrt()
    }
}

/// Maximize [`qfi_passive`] over the squeezing fraction.
pub fn optimize_passive_qfi(n_tot: f64) -> Result<QfiOptimum> {
    let m = maximize_scalar(|b| qfi_passive(n_tot, b).unwrap_or(f64::NEG_INFINITY).max(-1.0), (0.0, 1.0), 1e-9)?;
    Ok(QfiOptimum { n_tot, beta: m.arg, delta: 0.5, h: m.value })
}

/// Maximize the printed closed form over the squeezing fraction.
pub fn optimize_passive_printed(n_tot: f64) -> Result<QfiOptimum> {
    let m = maximize_scalar(|b| qfi_passive_printed(n_tot, b), (0.0, 1.0), 1e-9)?;
    Ok(QfiOptimum { n_tot, beta: m.arg, delta: 0.5, h: m.value })
}

/// Coherent light boosted probe: `|alpha>|gamma e^{i theta}>` through an OPA.
pub fn clbi_probe(n_tot: f64, beta: f64, delta: f64, theta: f64) -> Result<GaussianState> {
    let (a, g, r) = active_amplitudes(n_tot, beta, delta, theta)
        .ok_or_else(|| Error::InvalidParameter(format!("budget n_tot = {n_tot} unreachable at beta = {beta}")))?;
    let input = GaussianState::coherent(Complex64::new(a, 0.0))?
        .tensor(&GaussianState::coherent(Complex64::from_polar(g, theta))?);
    apply(&opa(r, 0.0), &input, &[0, 1])
}

pub fn qfi_clbi(n_tot: f64, beta: f64, delta: f64, theta: f64) -> Result<f64> {
    qfi_pure_unitary(&clbi_probe(n_tot, beta, delta, theta)?, &Generator::number(0))
}

/// Nested maximization over `beta` (outer) and `delta` (inner) at relative
/// coherent phase `theta`.
pub fn optimize_clbi_qfi(n_tot: f64, theta: f64) -> Result<QfiOptimum> {
    let inner = |b: f64| maximize_scalar(|d| qfi_clbi(n_tot, b, d, theta).unwrap_or(-1.0), (0.0, 1.0), 1e-7);
    let outer = maximize_scalar(|b| inner(b).map(|m| m.value).unwrap_or(-1.0), (0.0, 1.0), 1e-7)?;
    let d = inner(outer.arg)?;
    Ok(QfiOptimum { n_tot, beta: outer.arg, delta: d.arg, h: d.value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    PassivePassive,
    PassiveActive,
    ActivePassive,
    ActiveActive,
}

impl Family {
    pub const ALL: [Family; 4] =
        [Family::PassivePassive, Family::PassiveActive, Family::ActivePassive, Family::ActiveActive];

    pub fn name(&self) -> &'static str {
        match self {
            Family::PassivePassive => "passive-passive",
            Family::PassiveActive => "passive-active",
            Family::ActivePassive => "active-passive",
            Family::ActiveActive => "active-active",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }

    fn active_first(&self) -> bool {
        matches!(self, Family::ActivePassive | Family::ActiveActive)
    }

    fn active_detection(&self) -> bool {
        matches!(self, Family::PassiveActive | Family::ActiveActive)
    }

    /// Input class searched when none is requested: the literature states
    /// the large-energy passive-active optimum within the squeezed coherent
    /// plus vacuum class.
    pub fn default_inputs(&self) -> InputClass {
        match self {
            Family::PassiveActive => InputClass::SqueezedCoherentVacuum,
            _ => InputClass::TwoSqueezed,
        }
    }

    /// Search coordinates (excluding the phase) with bounds; `lo == hi` marks
    /// a coordinate held fixed.
    fn coordinates(&self, class: InputClass) -> Vec<(&'static str, f64, f64)> {
        let mut c = if self.active_first() {
            vec![("beta", 0.0, 1.0), ("delta", 0.0, 1.0), ("theta", 0.0, TAU)]
        } else if class == InputClass::SqueezedCoherentVacuum {
            vec![("beta_tot", 0.0, 1.0), ("q", 1.0, 1.0), ("psi_a", 0.0, TAU), ("psi_b", 0.0, 0.0)]
        } else {
            vec![("beta_tot", 0.0, 1.0), ("q", 0.0, 1.0), ("psi_a", 0.0, TAU), ("psi_b", 0.0, TAU)]
        };
        if self.active_detection() {
            c.push(("theta_d", 0.0, TAU));
        }
        c
    }

    /// Configuration for the parameter vector `x` (order of [`Self::coordinates`]).
    fn config(&self, n_tot: f64, eta: f64, gain: f64, x: &[f64]) -> Option<InterferometerConfig> {
        let (first, inputs, rest) = if self.active_first() {
            let (a, g, r) = active_amplitudes(n_tot, x[0], x[1], x[2])?;
            let inputs = [
                StateKind::Coherent(Complex64::new(a, 0.0)),
                StateKind::Coherent(Complex64::from_polar(g, x[2])),
            ];
            (FirstStage::Opa { r, phase: 0.0 }, inputs, &x[3..])
        } else {
            let (b, q) = (x[0], x[1]);
            let ra = (q * b * n_tot).sqrt().asinh();
            let rb = ((1.0 - q) * b * n_tot).sqrt().asinh();
            let alpha = Complex64::new(((1.0 - b) * n_tot).max(0.0).sqrt(), 0.0);
            let inputs = [
                StateKind::Squeezed { alpha, xi: Complex64::from_polar(ra, x[2]) },
                StateKind::Squeezed { alpha: Complex64::new(0.0, 0.0), xi: Complex64::from_polar(rb, x[3]) },
            ];
            (FirstStage::BeamSplitter, inputs, &x[4..])
        };
        let (detection, observable) = if self.active_detection() {
            (DetectionStage::Opa { r: gain, phase: rest[0] }, Observable::Sum)
        } else {
            (DetectionStage::BeamSplitter, Observable::Difference)
        };
        Some(InterferometerConfig {
            first_stage: first,
            detection,
            observable,
            inputs,
            eta: [eta, eta],
            working_point: FRAC_PI_2,
        })
    }
}

/// Inputs searched ahead of a passive first stage. Active first stages are
/// always fed by two coherent states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputClass {
    /// `D(alpha) S(xi_a) |0> (x) S(xi_b) |0>`.
    TwoSqueezed,
    /// `D(alpha) S(xi_a) |0> (x) |0>`.
    SqueezedCoherentVacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// `None` selects [`Family::default_inputs`].
    pub inputs: Option<InputClass>,
    /// OPA gain of an active detection stage.
    pub detection_gain: f64,
    /// Random restarts in addition to the fixed starting points.
    pub starts: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { inputs: None, detection_gain: 4.0, starts: 24, sweeps: 12, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigOptimum {
    pub family: Family,
    pub inputs: InputClass,
    pub sensitivity: f64,
    pub phi: f64,
    pub params: Vec<(&'static str, f64)>,
    pub config: InterferometerConfig,
    pub budget: EnergyBudget,
}

/// Candidate phases: a uniform grid plus logarithmic clusters around
/// `0`, `pi` and `2 pi` where the optimal working points of the bright
/// configurations sit.
fn phase_candidates() -> Vec<f64> {
    let mut v: Vec<f64> = (1..128).map(|i| TAU * i as f64 / 128.0).collect();
    for k in 0..=28 {
        let d = 10f64.powf(-8.0 + 7.0 * k as f64 / 28.0);
        v.extend([d, PI - d, PI + d, TAU - d]);
    }
    v.retain(|p| *p > 0.0 && *p < TAU);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

const PENALTY: f64 = 1e3;

/// 1-D minimization of `f` over sorted candidates, refined by golden section
/// inside the bracket of the best candidate.
fn line_search(f: &dyn Fn(f64) -> f64, cand: &[f64], current: (f64, f64)) -> (f64, f64) {
    let mut best = current;
    let mut idx = None;
    for (i, &c) in cand.iter().enumerate() {
        let y = f(c);
        if y < best.1 {
            best = (c, y);
            idx = Some(i);
        }
    }
    if let Some(i) = idx {
        let lo = if i > 0 { cand[i - 1] } else { cand[0] };
        let hi = if i + 1 < cand.len() { cand[i + 1] } else { cand[i] };
        if hi > lo {
            let tol = 1e-10 * (hi - lo).max(1e-300) + 1e-14 * best.0.abs();
            if let Ok(m) = minimize_scalar_grid(f, (lo, hi), tol.max(1e-16), 5) {
                if m.value < best.1 {
                    best = (m.arg, m.value);
                }
            }
        }
    }
    best
}

/// Minimize the sensitivity of a family at fixed `n_tot` and efficiency by
/// cyclic coordinate descent over 1-D grid plus golden-section searches.
pub fn optimize_configuration(family: Family, n_tot: f64, eta: f64, opts: &OptimizeOptions) -> Result<ConfigOptimum> {
    if !(n_tot > 0.0) || !n_tot.is_finite() {
        return Err(Error::InvalidParameter(format!("n_tot must be > 0, got {n_tot}")));
    }
    if !(0.0..=1.0).contains(&eta) || eta == 0.0 {
        return Err(Error::InvalidParameter(format!("efficiency {eta} outside (0, 1]")));
    }
    let class = opts.inputs.unwrap_or(family.default_inputs());
    let coords = family.coordinates(class);
    let dim = coords.len();
    let gain = opts.detection_gain;
    // objective over (params, phi): log S, penalized where infeasible
    let obj = |x: &[f64]| -> f64 {
        let (p, phi) = (&x[..dim], x[dim]);
        let Some(cfg) = family.config(n_tot, eta, gain, p) else { return PENALTY };
        match Fringe::new(&cfg).and_then(|f| f.sensitivity(phi)) {
            Ok(s) if s.is_finite() && s > 0.0 => s.ln(),
            _ => PENALTY,
        }
    };
    let phases = phase_candidates();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    let mid: Vec<f64> = coords.iter().map(|c| 0.5 * (c.1 + c.2)).collect();
    starts.push(mid);
    let zero: Vec<f64> = coords.iter().map(|c| if c.2 > 1.5 { c.1 } else { 0.5 * (c.1 + c.2) }).collect();
    starts.push(zero);
    for _ in 0..opts.starts {
        starts.push(coords.iter().map(|c| if c.2 > c.1 { rng.random_range(c.1..c.2) } else { c.1 }).collect());
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in starts {
        let mut x = s;
        x.push(FRAC_PI_2);
        let mut fx = obj(&x);
        // phase first: it carries most of the curvature
        let (p, v) = line_search(&|t| obj(&with(&x, dim, t)), &phases, (x[dim], fx));
        x[dim] = p;
        fx = v;
        for sweep in 0..opts.sweeps {
            let before = fx;
            let start_of_sweep = x.clone();
            let shrink = 0.5f64.powi(sweep as i32);
            for (i, c) in coords.iter().enumerate() {
                if c.2 <= c.1 {
                    continue;
                }
                let w = (c.2 - c.1) * shrink;
                let (lo, hi) = ((x[i] - 0.5 * w).max(c.1), (x[i] + 0.5 * w).min(c.2));
                let cand: Vec<f64> = (0..=24).map(|k| lo + (hi - lo) * k as f64 / 24.0).collect();
                let (p, v) = line_search(&|t| obj(&with(&x, i, t)), &cand, (x[i], fx));
                x[i] = p;
                fx = v;
                let (p, v) = line_search(&|t| obj(&with(&x, dim, t)), &phase_window(x[dim], &phases), (x[dim], fx));
                x[dim] = p;
                fx = v;
            }
            // pattern move along the net displacement of the sweep
            let dir: Vec<f64> = x.iter().zip(&start_of_sweep).map(|(a, b)| a - b).collect();
            if dir.iter().any(|d| *d != 0.0) {
                let along = |t: f64| -> Vec<f64> {
                    let mut y: Vec<f64> = start_of_sweep.iter().zip(&dir).map(|(b, d)| b + t * d).collect();
                    for (i, c) in coords.iter().enumerate() {
                        y[i] = y[i].clamp(c.1, c.2);
                    }
                    y[dim] = y[dim].clamp(1e-12, TAU - 1e-12);
                    y
                };
                let cand: Vec<f64> = (0..=32).map(|k| -1.0 + 5.0 * k as f64 / 32.0).collect();
                let (t, v) = line_search(&|t| obj(&along(t)), &cand, (1.0, fx));
                if v < fx {
                    x = along(t);
                    fx = v;
                }
            }
            if sweep > 3 && before - fx < 1e-9 {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    let (x, fx) = best.expect("at least one start");
    if fx >= PENALTY {
        return Err(Error::NonConvergence { arg: x[dim], best: f64::INFINITY });
    }
    let cfg = family.config(n_tot, eta, gain, &x[..dim]).expect("feasible optimum");
    let budget = budget_of(family, n_tot, &x[..dim]);
    let mut params: Vec<(&'static str, f64)> = coords.iter().zip(&x).map(|(c, v)| (c.0, *v)).collect();
    if family.active_detection() {
        params.push(("gain", gain));
    }
    Ok(ConfigOptimum { family, inputs: class, sensitivity: fx.exp(), phi: x[dim], params, config: cfg, budget })
}

fn with(x: &[f64], i: usize, t: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] = t;
    y
}

/// Phase candidates near the incumbent: log-spaced offsets on both sides.
fn phase_window(phi: f64, global: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = Vec::with_capacity(80);
    for k in 0..=30 {
        let d = phi.abs().max(1e-9) * 10f64.powf(-4.0 + 4.0 * k as f64 / 30.0);
        v.extend([phi - d, phi + d]);
    }
    v.extend(global.iter().step_by(4));
    v.retain(|p| *p > 0.0 && *p < TAU);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn budget_of(family: Family, n_tot: f64, x: &[f64]) -> EnergyBudget {
    if family.active_first() {
        let (a, g, r) = active_amplitudes(n_tot, x[0], x[1], x[2]).unwrap_or((0.0, 0.0, 0.0));
        EnergyBudget::active(a, g, x[2], r)
    } else {
        let (b, q) = (x[0], x[1]);
        EnergyBudget::passive(
            ((1.0 - b) * n_tot).max(0.0).sqrt(),
            0.0,
            (q * b * n_tot).sqrt().asinh(),
            ((1.0 - q) * b * n_tot).sqrt().asinh(),
        )
    }
}

/// Minimized sensitivity against detection gain for several efficiencies.
/// Columns `S_eta=<eta>` per efficiency; the primary column is the lossless value.
pub fn eta_robustness(
    family: Family,
    n_tot: f64,
    gains: &[f64],
    etas: &[f64],
    opts: &OptimizeOptions,
) -> Result<CurveData> {
    if !family.active_detection() {
        return Err(Error::InvalidParameter(format!("{} has no detection gain", family.name())));
    }
    let mut lossless = Vec::with_capacity(gains.len());
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); etas.len()];
    for &g in gains {
        let o = OptimizeOptions { detection_gain: g, ..opts.clone() };
        lossless.push(optimize_configuration(family, n_tot, 1.0, &o)?.sensitivity);
        for (k, &e) in etas.iter().enumerate() {
            cols[k].push(optimize_configuration(family, n_tot, e, &o)?.sensitivity);
        }
    }
    let mut c = CurveData::new("gain", "S_min", gains.to_vec(), lossless)
        .with_param("family", family.name())
        .with_param("n_tot", n_tot);
    for (k, &e) in etas.iter().enumerate() {
        c = c.with_column(&format!("S_eta={e}"), std::mem::take(&mut cols[k]));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coh(a: f64) -> StateKind {
        StateKind::Coherent(Complex64::new(a, 0.0))
    }

    fn sq_vac(lambda: f64) -> StateKind {
        StateKind::Squeezed { alpha: Complex64::new(0.0, 0.0), xi: Complex64::from_polar(lambda.sqrt().asinh(), PI) }
    }

    #[test]
    fn passive_chain_equals_effective_beam_splitter() {
        for phi in [0.0, 0.3, 1.7, PI] {
            let chain = passive_mixer().then(&embed(&phase_shift(phi), 0)).then(&passive_recombiner());
            let eff = mz_effective_bs(phi);
            // equal up to a common phase on both outputs, which counting cannot see
            let rot = embed(&phase_shift(-0.5 * phi), 0).then(&embed(&phase_shift(-0.5 * phi), 1));
            let d = (&chain.then(&rot).matrix - &eff.matrix).amax();
            assert!(d < 1e-12, "phi {phi}: {d}");
        }
    }

    #[test]
    fn transmissivity_is_cos_half_phi_squared() {
        let phi: f64 = 0.9;
        let m = mz_effective_bs(phi).matrix;
        assert_relative_eq!(m[(0, 0)].powi(2), (0.5 * phi).cos().powi(2), epsilon = 1e-15);
        assert!(mz_effective_bs(phi).is_symplectic(1e-12));
    }

    #[test]
    fn coherent_fringe() {
        let a2: f64 = 1e4;
        let cfg = InterferometerConfig::mach_zehnder(coh(a2.sqrt()), StateKind::Vacuum);
        let st = fringe_observable(&cfg, 0.7).unwrap();
        assert_relative_eq!(st.mean, a2 * 0.7f64.cos(), max_relative = 1e-12);
        assert_relative_eq!(st.variance, a2, max_relative = 1e-12);
        assert_relative_eq!(st.slope, -a2 * 0.7f64.sin(), max_relative = 1e-12);
    }

    #[test]
    fn squeezed_difference_variance() {
        let (a2, l): (f64, f64) = (1e6, 4.0);
        let cfg = InterferometerConfig::mach_zehnder(coh(a2.sqrt()), sq_vac(l));
        for phi in [0.2, FRAC_PI_2, 2.5] {
            let st = fringe_observable(&cfg, phi).unwrap();
            let s2 = phi.sin().powi(2);
            let want = a2 * (1.0 - 2.0 * l.sqrt() * ((l + 1.0).sqrt() - l.sqrt()) * s2)
                + l * (1.0 + (1.0 + 2.0 * l) * phi.cos().powi(2));
            assert_relative_eq!(st.variance, want, max_relative = 1e-10);
            assert_relative_eq!(st.mean, (a2 - l) * phi.cos(), epsilon = 1e-6, max_relative = 1e-10);
        }
    }

    #[test]
    fn dark_port_mean() {
        let (a2, l): (f64, f64) = (100.0, 0.5);
        let cfg = InterferometerConfig::dark_port(coh(a2.sqrt()), sq_vac(l));
        let phi: f64 = 0.4;
        let st = fringe_observable(&cfg, phi).unwrap();
        let want = a2 * (0.5 * phi).sin().powi(2) + l * (0.5 * phi).cos().powi(2);
        assert_relative_eq!(st.mean, want, max_relative = 1e-12);
        let dark = fringe_observable(&cfg, 0.0).unwrap();
        assert_relative_eq!(dark.variance, 2.0 * l * (1.0 + l), max_relative = 1e-10);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let cfg = InterferometerConfig {
            first_stage: FirstStage::Opa { r: 0.7, phase: 0.3 },
            detection: DetectionStage::Opa { r: 1.1, phase: 2.0 },
            observable: Observable::Sum,
            inputs: [coh(1.3), sq_vac(0.4)],
            eta: [0.8, 0.9],
            working_point: 0.0,
        };
        let f = Fringe::new(&cfg).unwrap();
        let phi = 0.37;
        let fd = crate::estimation::derivative(|p| f.stats(p).unwrap().mean, phi, 1e-4);
        assert_relative_eq!(f.stats(phi).unwrap().slope, fd, max_relative = 1e-7);
    }

    #[test]
    fn energy_budgets_match_state() {
        let cfg = Family::ActiveActive.config(50.0, 1.0, 2.0, &[0.4, 0.3, 1.0, 0.0]).unwrap();
        assert_relative_eq!(cfg.n_tot().unwrap(), 50.0, max_relative = 1e-10);
        let b = budget_of(Family::ActiveActive, 50.0, &[0.4, 0.3, 1.0]);
        assert_relative_eq!(b.n_tot, 50.0, max_relative = 1e-10);
        assert_relative_eq!(b.beta, 0.4, max_relative = 1e-10);
        assert_relative_eq!(b.delta, 0.3, max_relative = 1e-10);
        let cfg = Family::PassivePassive.config(50.0, 1.0, 0.0, &[0.4, 0.3, 1.0, 2.0]).unwrap();
        assert_relative_eq!(cfg.n_tot().unwrap(), 50.0, max_relative = 1e-10);
    }

    #[test]
    fn difference_is_flat_with_active_detection() {
        let mut cfg = Family::PassiveActive.config(20.0, 1.0, 2.0, &[0.3, 1.0, 0.4, 0.0, 1.0]).unwrap();
        cfg.observable = Observable::Difference;
        let f = Fringe::new(&cfg).unwrap();
        for phi in [0.1, 1.0, 2.0] {
            let st = f.stats(phi).unwrap();
            assert!(st.slope.abs() < 1e-9 * st.mean.abs().max(1.0), "{}", st.slope);
        }
    }

    #[test]
    fn printed_passive_formula_differs() {
        let (n, b) = (100.0, 0.5);
        let h = qfi_passive(n, b).unwrap();
        let r2 = 2.0 * (0.5 * b * n).sqrt().asinh();
        let direct = 4.0 * n * (1.0 - b) * r2.exp() + 2.0 * n * b * (n * b + 2.0);
        assert_relative_eq!(h, direct, max_relative = 1e-10);
        let gap = direct - qfi_passive_printed(n, b);
        assert_relative_eq!(gap, 4.0 * n - 2.0 * n * n * b * (2.0 - b), max_relative = 1e-9);
    }
}
