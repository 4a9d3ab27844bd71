use std::f64::consts::{FRAC_PI_2, PI};

use clap::Args;
use cvmetro::gaussian_core::StateKind;
use cvmetro::holometer::{self, HoloInput, HoloObservable, HolometerConfig, Vary};
use cvmetro::illumination::{error_probability, IlluminationConfig, Source};
use cvmetro::interferometry::{
    self, optimize_clbi_qfi, optimize_configuration, optimize_passive_printed, optimize_passive_qfi, Family,
    InputClass, InterferometerConfig, OptimizeOptions,
};
use cvmetro::CurveData;
use num_complex::Complex64;

use crate::params::Params;
use crate::CliError;

fn squeezed_vacuum(lambda: f64, phase: f64) -> StateKind {
    StateKind::Squeezed { alpha: Complex64::new(0.0, 0.0), xi: Complex64::from_polar(lambda.sqrt().asinh(), phase) }
}

fn interferometer(p: &mut Params, port: Option<String>, alpha2: f64, b: StateKind) -> Result<InterferometerConfig, CliError> {
    if !(alpha2 >= 0.0) {
        return Err(CliError::Validation(format!("alpha2 must be >= 0, got {alpha2}")));
    }
    let a = StateKind::Coherent(Complex64::new(alpha2.sqrt(), 0.0));
    match p.get("port", port, "difference".to_string())?.as_str() {
        "difference" => Ok(InterferometerConfig::mach_zehnder(a, b)),
        "dark" => Ok(InterferometerConfig::dark_port(a, b)),
        other => Err(CliError::Validation(format!("port must be difference or dark, got {other:?}"))),
    }
}

#[derive(Args, Debug)]
pub struct FringesArgs {
    /// Coherent intensity |alpha|^2.
    #[arg(long)]
    alpha2: Option<f64>,
    /// Squeezed-vacuum photons in the second input (0 = vacuum).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    squeeze_phase: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// difference (N_c - N_d) or dark (N_d alone).
    #[arg(long)]
    port: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    shots: Option<usize>,
}

pub fn fringes(a: FringesArgs, p: &mut Params, seed: u64) -> Result<CurveData, CliError> {
    let alpha2 = p.get("alpha2", a.alpha2, 1e6)?;
    let lambda = p.get("lambda", a.lambda, 0.0)?;
    let phase = p.get("squeeze-phase", a.squeeze_phase, PI)?;
    let eta = p.get("eta", a.eta, 1.0)?;
    let grid = p.grid("phi", a.phi, "0:6.283185307179586:129")?;
    let shots = p.get("shots", a.shots, 1000)?;
    let b = if lambda > 0.0 { squeezed_vacuum(lambda, phase) } else { StateKind::Vacuum };
    let cfg = interferometer(p, a.port, alpha2, b)?.with_eta(eta);
    Ok(interferometry::simulate_fringes(&cfg, &grid, shots, seed)?
        .with_param("alpha2", alpha2)
        .with_param("lambda", lambda))
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    squeeze_phase: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    port: Option<String>,
    #[arg(long)]
    phi: Option<String>,
}

pub fn ratio(a: RatioArgs, p: &mut Params) -> Result<CurveData, CliError> {
    let alpha2 = p.get("alpha2", a.alpha2, 1e4)?;
    let lambda = p.get("lambda", a.lambda, 10.0)?;
    let phase = p.get("squeeze-phase", a.squeeze_phase, PI)?;
    let eta = p.get("eta", a.eta, 1.0)?;
    let grid = p.grid("phi", a.phi, "0.01:3.13:157")?;
    let port = p.get("port", a.port, "difference".to_string())?;
    let sq = interferometer(p, Some(port.clone()), alpha2, squeezed_vacuum(lambda, phase))?.with_eta(eta);
    let cl = interferometer(p, Some(port), alpha2, StateKind::Vacuum)?.with_eta(eta);
    Ok(interferometry::sensitivity_ratio(&sq, &cl, &grid)?.with_param("alpha2", alpha2).with_param("lambda", lambda))
}

#[derive(Args, Debug)]
pub struct QfiArgs {
    /// passive or clbi.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n_tot: Option<String>,
    /// Relative coherent phase of the active probe.
    #[arg(long)]
    theta: Option<f64>,
}

pub fn qfi_bounds(a: QfiArgs, p: &mut Params) -> Result<CurveData, CliError> {
    let kind = p.get("kind", a.kind, "passive".to_string())?;
    let grid = p.grid("n-tot", a.n_tot, "log:10:10000:13")?;
    match kind.as_str() {
        "passive" => {
            let (mut dphi, mut beta, mut h, mut bp, mut hp) = (vec![], vec![], vec![], vec![], vec![]);
            for &n in &grid {
                let o = optimize_passive_qfi(n)?;
                let q = optimize_passive_printed(n)?;
                dphi.push(o.delta_phi());
                beta.push(o.beta);
                h.push(o.h);
                bp.push(q.beta);
                hp.push(q.h);
            }
            let hn: Vec<f64> = h.iter().zip(&grid).map(|(h, n)| h / (n * n)).collect();
            Ok(CurveData::new("n_tot", "delta_phi", grid, dphi)
                .with_column("beta_tot", beta)
                .with_column("H", h)
                .with_column("H_over_N2", hn)
                .with_column("beta_tot_closed_form", bp)
                .with_column("H_closed_form", hp))
        }
        "clbi" => {
            let theta = p.get("theta", a.theta, PI)?;
            let (mut dphi, mut beta, mut delta, mut h) = (vec![], vec![], vec![], vec![]);
            for &n in &grid {
                let o = optimize_clbi_qfi(n, theta)?;
                dphi.push(o.delta_phi());
                beta.push(o.beta);
                delta.push(o.delta);
                h.push(o.h);
            }
            let hn: Vec<f64> = h.iter().zip(&grid).map(|(h, n)| h / (n * n)).collect();
            Ok(CurveData::new("n_tot", "delta_phi", grid, dphi)
                .with_column("beta", beta)
                .with_column("delta", delta)
                .with_column("H", h)
                .with_column("H_over_N2", hn)
                .with_param("theta", theta))
        }
        other => Err(CliError::Validation(format!("kind must be passive or clbi, got {other:?}"))),
    }
}

#[derive(Args, Debug)]
pub struct ConfigArgs {
    #[arg(long)]
    family: Option<String>,
    /// n-tot (sensitivity scaling) or gain (efficiency robustness).
    #[arg(long)]
    vary: Option<String>,
    /// Grid for --vary n-tot, single value for --vary gain.
    #[arg(long)]
    n_tot: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    etas: Option<String>,
    #[arg(long)]
    gain: Option<f64>,
    #[arg(long)]
    gains: Option<String>,
    /// two-squeezed or squeezed-coherent-vacuum.
    #[arg(long)]
    inputs: Option<String>,
    #[arg(long)]
    starts: Option<usize>,
}

pub fn config_opt(a: ConfigArgs, p: &mut Params, seed: u64) -> Result<CurveData, CliError> {
    let family = Family::parse(&p.get("family", a.family, "passive-passive".to_string())?)?;
    let vary = p.get("vary", a.vary, "n-tot".to_string())?;
    let inputs = match p.optional::<String>("inputs", a.inputs)?.as_deref() {
        None => None,
        Some("two-squeezed") => Some(InputClass::TwoSqueezed),
        Some("squeezed-coherent-vacuum") => Some(InputClass::SqueezedCoherentVacuum),
        Some(o) => return Err(CliError::Validation(format!("unknown input class {o:?}"))),
    };
    let starts = p.get("starts", a.starts, OptimizeOptions::default().starts)?;
    let gain = p.get("gain", a.gain, 4.0)?;
    let opts = OptimizeOptions { inputs, detection_gain: gain, starts, seed, ..OptimizeOptions::default() };
    match vary.as_str() {
        "n-tot" => {
            let grid = p.grid("n-tot", a.n_tot, "log:10:1000:5")?;
            let eta = p.get("eta", a.eta, 1.0)?;
            let mut rows = Vec::new();
            for &n in &grid {
                rows.push(optimize_configuration(family, n, eta, &opts)?);
            }
            let s: Vec<f64> = rows.iter().map(|r| r.sensitivity).collect();
            let mut c = CurveData::new("n_tot", "S_min", grid.clone(), s.clone())
                .with_column("phi", rows.iter().map(|r| r.phi).collect())
                .with_column("S_times_N", s.iter().zip(&grid).map(|(s, n)| s * n).collect())
                .with_column("S_times_sqrtN", s.iter().zip(&grid).map(|(s, n)| s * n.sqrt()).collect());
            if let Some(first) = rows.first() {
                for (k, (name, _)) in first.params.iter().enumerate() {
                    c = c.with_column(name, rows.iter().map(|r| r.params[k].1).collect());
                }
            }
            Ok(c.with_param("family", family.name()).with_param("eta", eta).with_param("gain", gain))
        }
        "gain" => {
            let n = p.get("n-tot", a.n_tot.map(|s| s.parse::<f64>().unwrap_or(f64::NAN)), 1000.0)?;
            let gains = p.grid("gains", a.gains, "1,2,4,6")?;
            let etas = p.grid("etas", a.etas, "0.9")?;
            Ok(interferometry::eta_robustness(family, n, &gains, &etas, &opts)?)
        }
        other => Err(CliError::Validation(format!("vary must be n-tot or gain, got {other:?}"))),
    }
}

#[derive(Args, Debug)]
pub struct IllumArgs {
    /// Background photon grid.
    #[arg(long)]
    nb: Option<String>,
    /// Background mode counts, comma separated.
    #[arg(long)]
    mb: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    modes: Option<u32>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

pub fn illumination(a: IllumArgs, p: &mut Params, seed: u64) -> Result<CurveData, CliError> {
    let nb = p.grid("nb", a.nb, "1,3,10,30,100")?;
    let mb = p.grid("mb", a.mb, "57,1300")?;
    let mu = p.get("mu", a.mu, 0.075)?;
    let modes = p.get("modes", a.modes, 1000)?;
    let eta = p.get("eta", a.eta, 0.8)?;
    let pairs = p.get("pairs", a.pairs, 10_000)?;
    let trials = p.get("trials", a.trials, 200)?;
    if mb.iter().any(|m| m.fract() != 0.0 || *m < 1.0 || *m > u32::MAX as f64) {
        return Err(CliError::Validation("mb must be positive integers".into()));
    }
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    let mut k = 0u64;
    for &m in &mb {
        for (tag, source) in [("Q", Source::Twb), ("C", Source::SplitThermal)] {
            let mut c: [Vec<f64>; 7] = Default::default();
            for &n in &nb {
                let cfg = IlluminationConfig {
                    mu,
                    modes,
                    eta,
                    pairs,
                    seed: seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                    ..IlluminationConfig::new(source, n, m as u32)
                };
                k += 1;
                let r = error_probability(&cfg, trials)?;
                let vals = [
                    r.p_err,
                    r.ln_p_err / std::f64::consts::LN_10,
                    r.threshold,
                    r.fit_in.mean,
                    r.fit_in.var.sqrt(),
                    r.fit_out.mean,
                    r.fit_out.var.sqrt(),
                ];
                for (col, v) in c.iter_mut().zip(vals) {
                    col.push(v);
                }
            }
            let names = ["P_err", "log10_P_err", "threshold", "cov_in", "cov_in_std", "cov_out", "cov_out_std"];
            for (name, v) in names.iter().zip(c) {
                cols.push((format!("{name}_{tag}_Mb{m}"), v));
            }
        }
    }
    let (y_name, y) = cols.remove(0);
    let mut curve = CurveData::new("N_b", &y_name, nb, y);
    for (n, v) in cols {
        curve = curve.with_column(&n, v);
    }
    Ok(curve.with_param("mu", mu).with_param("modes", modes).with_param("eta", eta).with_param("pairs", pairs).with_param("trials", trials))
}

#[derive(Args, Debug)]
pub struct HoloArgs {
    /// twb, squeezed or classical.
    #[arg(long)]
    family: Option<String>,
    /// eta, phi0 or lambda.
    #[arg(long)]
    vary: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    phi0: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    /// diff-product, port-product or diff-square.
    #[arg(long)]
    observable: Option<String>,
    /// ratio, or threshold (efficiency where twin beams match squeezed vacua).
    #[arg(long)]
    output: Option<String>,
    /// Squeezed-family working phase for --output threshold.
    #[arg(long)]
    phi0_sq: Option<f64>,
}

fn holo_input(family: &str, mu: f64, lambda: f64, psi: f64) -> Result<HoloInput, CliError> {
    match family {
        "twb" => Ok(HoloInput::Twb { lambda, mu, psi }),
        "squeezed" => Ok(HoloInput::Squeezed { mu, lambda }),
        "classical" => Ok(HoloInput::Classical { mu }),
        o => Err(CliError::Validation(format!("family must be twb, squeezed or classical, got {o:?}"))),
    }
}

pub fn holometer_ratio(a: HoloArgs, p: &mut Params) -> Result<CurveData, CliError> {
    let output = p.get("output", a.output, "ratio".to_string())?;
    let mu = p.get("mu", a.mu, 1e12)?;
    let psi = p.get("psi", a.psi, FRAC_PI_2)?;
    if output == "threshold" {
        let vary = p.get("vary", a.vary, "lambda".to_string())?;
        if vary != "lambda" {
            return Err(CliError::Validation("threshold output varies lambda".into()));
        }
        let grid = p.grid("grid", a.grid, "log:0.01:100:9")?;
        let phi0 = p.get("phi0", a.phi0, 0.0)?;
        let phi_sq = p.get("phi0-sq", a.phi0_sq, FRAC_PI_2)?;
        let mut eta = Vec::new();
        for &l in &grid {
            let t = HolometerConfig::new(HoloInput::Twb { lambda: l, mu, psi }, phi0, 1.0);
            let s = HolometerConfig::new(HoloInput::Squeezed { mu, lambda: l }, phi_sq, 1.0);
            eta.push(holometer::eta_crossing(&t, &s, 0.05, 0.999999)?);
        }
        return Ok(CurveData::new("lambda", "eta_th", grid, eta)
            .with_param("mu", mu)
            .with_param("phi0", phi0)
            .with_param("phi0_sq", phi_sq));
    }
    if output != "ratio" {
        return Err(CliError::Validation(format!("output must be ratio or threshold, got {output:?}")));
    }
    let family = p.get("family", a.family, "twb".to_string())?;
    let vary_s = p.get("vary", a.vary, "eta".to_string())?;
    let vary = Vary::parse(&vary_s).ok_or_else(|| CliError::Validation(format!("unknown vary {vary_s:?}")))?;
    let default_grid = match vary {
        Vary::Eta => "0.5:1:51",
        Vary::Phi0 => "log:1e-5:0.1:41",
        Vary::Lambda => "log:0.001:1000:31",
    };
    let grid = p.grid("grid", a.grid, default_grid)?;
    let lambda = p.get("lambda", a.lambda, 0.5)?;
    let eta = p.get("eta", a.eta, 0.95)?;
    let phi0 = p.get("phi0", a.phi0, if family == "twb" { 0.0 } else { FRAC_PI_2 })?;
    let mut cfg = HolometerConfig::new(holo_input(&family, mu, lambda, psi)?, phi0, eta);
    if let Some(o) = p.optional::<String>("observable", a.observable)? {
        cfg = cfg.with_observable(
            HoloObservable::parse(&o).ok_or_else(|| CliError::Validation(format!("unknown observable {o:?}")))?,
        );
    }
    Ok(holometer::ratio_curves(&cfg, vary, &grid)?)
}

#[derive(Args, Debug)]
pub struct NrfArgs {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tau: Option<String>,
}

pub fn nrf(a: NrfArgs, p: &mut Params) -> Result<CurveData, CliError> {
    let mu = p.get("mu", a.mu, 1e2)?;
    let lambda = p.get("lambda", a.lambda, 1.0)?;
    let eta = p.get("eta", a.eta, 1.0)?;
    let tau = p.grid("tau", a.tau, "0.01:0.99:99")?;
    let cfg = HolometerConfig::new(HoloInput::Twb { lambda, mu, psi: FRAC_PI_2 }, 0.0, eta);
    Ok(holometer::nrf_regimes(&cfg, &tau)?)
}
