//! Gaussian moments against brute-force number-basis evolution.

use cvmetro::fock_oracle::{build_fock, detect, evolve, FockKind, FockOp, FockVector};
use cvmetro::gaussian_core::{apply, apply_loss, GaussianState, StateKind, make_state};
use cvmetro::moments::{wick_moment, Ladder, MomentRequest};
use num_complex::Complex64;
use proptest::prelude::*;

const CUTOFF: usize = 150;

#[derive(Debug, Clone)]
enum Input {
    Vacuum,
    Coherent(Complex64),
    Squeezed(Complex64, Complex64),
}

fn single(inp: &Input) -> (GaussianState, FockVector) {
    match inp {
        Input::Vacuum => (GaussianState::vacuum(1), build_fock(FockKind::Vacuum, CUTOFF).unwrap()),
        Input::Coherent(a) => (
            make_state(StateKind::Coherent(*a), 1).unwrap(),
            build_fock(FockKind::Coherent(*a), CUTOFF).unwrap(),
        ),
        Input::Squeezed(a, xi) => {
            let g = make_state(StateKind::Squeezed { alpha: *a, xi: *xi }, 1).unwrap();
            let f = build_fock(FockKind::SqueezedVacuum(*xi), CUTOFF).unwrap();
            let f = evolve(FockOp::Displace { alpha: *a, mode: 0 }, &f).unwrap();
            (g, f)
        }
    }
}

fn words() -> Vec<Vec<Ladder>> {
    use Ladder as L;
    let mut w = vec![
        vec![L::a(0)],
        vec![L::a(1)],
        vec![L::a(0), L::a(0)],
        vec![L::adag(0), L::a(1)],
        vec![L::a(0), L::a(1)],
        vec![L::a(1), L::a(1)],
    ];
    for p in 0..=4usize {
        for q in 0..=(4 - p) {
            if p + q > 0 {
                w.push(MomentRequest::number_powers(&[(0, p), (1, q)]).unwrap().ops().to_vec());
            }
        }
    }
    w
}

fn max_error(inputs: (Input, Input), twb: Option<f64>, circuit: &[FockOp], eta: f64) -> f64 {
    let (mut g, mut f) = match twb {
        Some(l) => (
            GaussianState::twb(l).unwrap(),
            build_fock(FockKind::Twb { lambda: l, psi: 0.0 }, CUTOFF).unwrap(),
        ),
        None => {
            let (g0, f0) = single(&inputs.0);
            let (g1, f1) = single(&inputs.1);
            (g0.tensor(&g1), f0.tensor(&f1).unwrap())
        }
    };
    for op in circuit {
        let (s, modes) = op.gaussian();
        g = apply(&s, &g, &modes).unwrap();
        f = evolve(*op, &f).unwrap();
    }
    let mut err: f64 = 0.0;
    for w in words() {
        let a = wick_moment(&g, &MomentRequest::new(w.clone()).unwrap()).unwrap();
        let b = f.moment(&w).unwrap();
        err = err.max((a - b).norm());
    }
    let lossy = apply_loss(&g, eta).unwrap();
    let counts = detect(&f, eta).unwrap();
    for p in 0..=4u32 {
        for q in 0..=(4 - p) {
            let req = MomentRequest::number_powers(&[(0, p as usize), (1, q as usize)]).unwrap();
            let a = wick_moment(&lossy, &req).unwrap().re;
            let b = counts.number_moment(&[(0, p), (1, q)]);
            err = err.max((a - b).abs());
        }
    }
    err
}

fn input() -> impl Strategy<Value = Input> {
    prop_oneof![
        Just(Input::Vacuum),
        (0.0..1.5f64, 0.0..6.3f64).prop_map(|(r, t)| Input::Coherent(Complex64::from_polar(r, t))),
        (0.0..1.0f64, 0.0..6.3f64, 0.0..1.0f64, 0.0..6.3f64).prop_map(|(a, ta, s2, tx)| {
            Input::Squeezed(Complex64::from_polar(a, ta), Complex64::from_polar(s2.sqrt().asinh(), tx))
        }),
    ]
}

fn gate() -> impl Strategy<Value = FockOp> {
    prop_oneof![
        (-3.2..3.2f64, 0.0..6.3f64).prop_map(|(phi, theta)| FockOp::BeamSplitter { phi, theta, modes: (0, 1) }),
        (0.0..6.3f64, 0..2usize).prop_map(|(phi, mode)| FockOp::Phase { phi, mode }),
        (0.0..0.15f64, 0.0..6.3f64, 0..2usize)
            .prop_map(|(r, t, mode)| FockOp::Squeeze { xi: Complex64::from_polar(r, t), mode }),
        (0.0..0.15f64, 0.0..6.3f64)
            .prop_map(|(r, t)| FockOp::TwoModeSqueeze { xi: Complex64::from_polar(r, t), modes: (0, 1) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moments_match_fock(
        a in input(),
        b in input(),
        twb in prop::option::weighted(0.2, 0.0..0.5f64),
        circuit in prop::collection::vec(gate(), 0..=4),
        lossy in any::<bool>(),
    ) {
        let eta = if lossy { 0.6 } else { 1.0 };
        let e = max_error((a, b), twb, &circuit, eta);
        prop_assert!(e < 1e-5, "max error {e}");
    }
}

#[test]
fn beam_splitter_on_coherent_matches_fock() {
    let alpha = Complex64::new(1.0, 0.0);
    let op = FockOp::BeamSplitter { phi: std::f64::consts::FRAC_PI_4, theta: 0.0, modes: (0, 1) };
    let e = max_error((Input::Coherent(alpha), Input::Vacuum), None, &[op], 1.0);
    assert!(e < 1e-10, "{e}");
}

#[test]
fn two_mode_squeezer_matches_fock() {
    let op = FockOp::TwoModeSqueeze { xi: Complex64::new(0.5, 0.0), modes: (0, 1) };
    let e = max_error((Input::Vacuum, Input::Vacuum), None, &[op], 1.0);
    assert!(e < 1e-8, "{e}");
}
