//! Holometer uncertainty ratios, noise reduction and the noise-average estimator.

use std::f64::consts::FRAC_PI_2;

use approx::assert_relative_eq;
use cvmetro::holometer::*;
use cvmetro::moments::NrfSign;

fn twb(lambda: f64, mu: f64, phi0: f64, eta: f64) -> HolometerConfig {
    HolometerConfig::new(HoloInput::Twb { lambda, mu, psi: FRAC_PI_2 }, phi0, eta)
}

fn sq(lambda: f64, mu: f64, phi0: f64, eta: f64) -> HolometerConfig {
    HolometerConfig::new(HoloInput::Squeezed { mu, lambda }, phi0, eta).with_observable(HoloObservable::PortProduct)
}

#[test]
fn thresholds_where_twin_beams_beat_coherent_light() {
    let small = eta_threshold(&twb(1e-4, 1e12, 0.0, 1.0), 1.0, 0.3, 0.99).unwrap();
    assert!((small - 2.0 / 3.0).abs() < 0.01, "{small}");
    let big = eta_threshold(&twb(1e3, 1e12, 0.0, 1.0), 1.0, 0.3, 0.99).unwrap();
    assert!((big - 0.776).abs() < 0.01, "{big}");
}

#[test]
fn twb_ratio_limits() {
    for eta in [0.7, 0.9] {
        let r = ratio(&twb(1e3, 1e12, 0.0, eta)).unwrap();
        assert_relative_eq!(r, 2.0 * 5f64.sqrt() * (1.0 - eta), max_relative = 0.01);
    }
    assert_eq!(ratio(&twb(0.5, 1e12, 0.0, 1.0)).unwrap(), 0.0);
}

#[test]
fn squeezed_ratio_limits_at_dark_fringe() {
    let eta = 0.8;
    let r = ratio(&HolometerConfig::new(HoloInput::Squeezed { mu: 1e12, lambda: 1e-4 }, FRAC_PI_2, eta)).unwrap();
    assert_relative_eq!(r, 1.0 - 2.0 * eta * 1e-2, max_relative = 1e-3);
    let r = ratio(&HolometerConfig::new(HoloInput::Squeezed { mu: 1e12, lambda: 1e3 }, FRAC_PI_2, eta)).unwrap();
    assert_relative_eq!(r, (1.0 - eta) - eta / 4e3, max_relative = 0.01);
}

#[test]
fn squeezed_ratio_expansions_near_transparency() {
    let eta = 0.95;
    for p0 in [3e-3, 1e-2] {
        let c = (1.0 + f64::cos(p0)) * eta;
        let big = ratio(&sq(10.0, 1e12, p0, eta)).unwrap();
        assert_relative_eq!(big, 1.0 - c / 2.0 + eta * (p0 / 2.0).cos().powi(2) / 40.0, max_relative = 0.02);
        let small = ratio(&sq(0.01, 1e12, p0, eta)).unwrap();
        let l = 0.01f64.sqrt();
        assert_relative_eq!(small, 1.0 - c * l * (1.0 - l), max_relative = 0.02);
    }
}

#[test]
fn twb_over_squeezed_in_the_bright_window() {
    for p0 in [3e-3, 1e-2, 3e-2] {
        let q = ratio(&twb(10.0, 1e12, p0, 0.95)).unwrap() / ratio(&sq(10.0, 1e12, p0, 0.95)).unwrap();
        assert_relative_eq!(q, 2f64.sqrt(), max_relative = 0.05);
    }
}

#[test]
fn twb_uncertainty_grows_with_loss() {
    let u: Vec<f64> = [1.0, 0.999, 0.99, 0.98, 0.95]
        .iter()
        .map(|&e| covariance_uncertainty_zero(&twb(0.5, 1e12, 0.0, e)).unwrap().u)
        .collect();
    assert!(u.windows(2).all(|w| w[1] > w[0]), "{u:?}");
}

#[test]
fn squeezed_exact_ratio_at_unit_efficiency() {
    for l in [0.1f64, 1.0, 10.0] {
        let r = ratio(&sq(l, 1e12, 1e-2, 1.0)).unwrap();
        assert_relative_eq!(r, ((1.0 + l).sqrt() - l.sqrt()).powi(2), max_relative = 5e-3);
    }
}

#[test]
fn twb_beats_squeezed_above_a_crossing() {
    let r = |eta: f64| {
        ratio(&twb(10.0, 1e12, 0.0, eta)).unwrap()
            - ratio(&HolometerConfig::new(HoloInput::Squeezed { mu: 1e12, lambda: 10.0 }, FRAC_PI_2, eta)).unwrap()
    };
    assert!(r(0.9) > 0.0);
    assert!(r(0.999) < 0.0);
    let sq = HolometerConfig::new(HoloInput::Squeezed { mu: 1e12, lambda: 10.0 }, FRAC_PI_2, 1.0);
    let eta = eta_crossing(&twb(10.0, 1e12, 0.0, 1.0), &sq, 0.9, 0.999).unwrap();
    assert!(r(eta).abs() < 1e-6);
}

#[test]
fn ratio_curve_columns() {
    let c = ratio_curves(&twb(0.5, 1e8, 0.0, 1.0), Vary::Eta, &[0.6, 0.8, 1.0]).unwrap();
    c.validate().unwrap();
    assert_eq!(c.header(), ["eta", "R", "U", "U_CL", "denominator"]);
    assert_eq!(c.y[2], 0.0);
    assert!(c.y[0] > c.y[1]);
}

#[test]
fn nrf_limits_dominated_by_twin_beams() {
    let (lambda, eta, tau) = (1e3, 0.9, 0.9);
    let c = twb(lambda, 1.0, 0.0, eta);
    let minus = nrf_at(&c, tau, NrfSign::Minus).unwrap();
    assert_relative_eq!(minus, 1.0 - eta * tau, max_relative = 0.01);
    let c0 = HolometerConfig::new(HoloInput::Twb { lambda, mu: 1.0, psi: 0.0 }, 0.0, eta);
    let plus = nrf_at(&c0, tau, NrfSign::Plus).unwrap();
    assert_relative_eq!(plus, 1.0 + eta * tau * (1.0 + 2.0 * lambda), max_relative = 0.01);
}

#[test]
fn nrf_bright_formula_both_signs() {
    for (lambda, eta, tau) in [(0.5, 1.0, 0.5), (2.0, 0.9, 0.3)] {
        let m = nrf_at(&twb(lambda, 1e12, 0.0, eta), tau, NrfSign::Minus).unwrap();
        let c0 = HolometerConfig::new(HoloInput::Twb { lambda, mu: 1e12, psi: 0.0 }, 0.0, eta);
        let p = nrf_at(&c0, tau, NrfSign::Plus).unwrap();
        assert!((m - nrf_bright(lambda, eta, tau)).abs() < 1e-6);
        assert!((p - nrf_bright(lambda, eta, tau)).abs() < 1e-6);
    }
}

#[test]
fn nrf_optimal_drive_phases() {
    let c = twb(0.5, 1e4, 0.0, 0.9);
    assert_eq!(nrf_psi_argmin(&c, 0.5, NrfSign::Minus, 64).unwrap(), FRAC_PI_2);
    assert_eq!(nrf_psi_argmin(&c, 0.5, NrfSign::Plus, 64).unwrap(), 0.0);
}

#[test]
fn nrf_regime_flag() {
    let c = nrf_regimes(&twb(1.0, 1e2, 0.0, 1.0), &[0.5, 0.999]).unwrap();
    let kappa = &c.extra[1].1;
    assert_relative_eq!(kappa[0], 100.0);
    assert_eq!(c.extra[2].1, vec![1.0, 0.0]);
}

#[test]
fn recovered_covariance_parallel_and_orthogonal() {
    let cfg = twb(0.5, 1e4, 0.3, 1.0);
    let s = 1e-3;
    let par = recovered_covariance(&cfg, &NoiseModel { configuration: NoiseConfiguration::Parallel, sigma: s }).unwrap();
    assert_relative_eq!(par, s * s, max_relative = 0.01);
    let orth =
        recovered_covariance(&cfg, &NoiseModel { configuration: NoiseConfiguration::Orthogonal, sigma: s }).unwrap();
    assert!(orth.abs() < 1e-3 * s * s, "{orth}");
}

#[test]
fn marginals_do_not_see_the_correlation() {
    let cfg = twb(0.5, 1e6, 0.3, 0.9);
    for k in 0..4 {
        let a = holographic_noise_average(
            &cfg,
            &NoiseModel { configuration: NoiseConfiguration::Parallel, sigma: 1e-2 },
            HoloStatistic::MeanCount(k),
        )
        .unwrap();
        let b = holographic_noise_average(
            &cfg,
            &NoiseModel { configuration: NoiseConfiguration::Orthogonal, sigma: 1e-2 },
            HoloStatistic::MeanCount(k),
        )
        .unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
}

#[test]
fn rejects_bad_configs() {
    assert!(covariance_uncertainty_zero(&twb(0.5, 1e4, 0.0, 1.2)).is_err());
    let mut c = twb(0.5, 1e4, 0.0, 1.0);
    c.radiation_pressure = 1.0;
    assert!(c.validate().is_err());
    assert!(nrf_regimes(&sq(0.5, 1e4, 0.0, 1.0), &[0.5]).is_err());
}
