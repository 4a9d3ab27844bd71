//! Multimode Gaussian states in the quadrature picture.
//!
//! Quadratures are ordered `x1, p1, ..., xn, pn` with `a = (x + i p) / 2`, so
//! the vacuum has unit covariance and `<dr_i dr_j> = V_ij + i Omega_ij`.
//! Every optical element is stored as its Heisenberg action on the mode
//! operators, `a -> A a + B a^dag`, converted once to a real symplectic matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{check_finite, Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Block-diagonal symplectic form with 2x2 blocks `[[0, 1], [-1, 0]]`.
pub fn omega(n_modes: usize) -> Mat {
    let mut w = Mat::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: Vector,
    cov: Mat,
}

/// Single- or two-mode state families with closed-form moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Vacuum,
    Coherent(Complex64),
    /// Displaced squeezed state `D(alpha) S(xi) |0>`, `xi = r e^{i psi}`.
    Squeezed { alpha: Complex64, xi: Complex64 },
    /// Thermal state with mean photon number `N`.
    Thermal(f64),
    /// Twin beam with `lambda` mean photons per mode (two modes).
    Twb(f64),
}

impl StateKind {
    pub fn n_modes(&self) -> usize {
        match self {
            StateKind::Twb(_) => 2,
            _ => 1,
        }
    }
}

/// Build a state of the requested family. `modes` copies of a single-mode
/// family are placed side by side; a twin beam occupies two modes per copy.
pub fn make_state(kind: StateKind, modes: usize) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::InvalidParameter("at least one copy required".into()));
    }
    let one = match kind {
        StateKind::Vacuum => GaussianState::vacuum(1),
        StateKind::Coherent(alpha) => GaussianState::coherent(alpha)?,
        StateKind::Squeezed { alpha, xi } => GaussianState::squeezed(alpha, xi)?,
        StateKind::Thermal(n) => GaussianState::thermal(n)?,
        StateKind::Twb(lambda) => GaussianState::twb(lambda)?,
    };
    let mut out = one.clone();
    for _ in 1..modes {
        out = out.tensor(&one);
    }
    Ok(out)
}

fn check_complex(name: &str, z: Complex64) -> Result<()> {
    check_finite(name, z.re)?;
    check_finite(name, z.im)?;
    Ok(())
}

impl GaussianState {
    pub fn new(mean: Vector, cov: Mat) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "mean length {dim} and cov shape {}x{} are inconsistent",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidParameter("covariance is not symmetric".into()));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state moments".into()));
        }
        Ok(Self { n_modes: dim / 2, mean, cov })
    }

    pub(crate) fn from_parts(mean: Vector, cov: Mat) -> Self {
        Self { n_modes: mean.len() / 2, mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::from_parts(Vector::zeros(2 * n_modes), Mat::identity(2 * n_modes, 2 * n_modes))
    }

    pub fn coherent(alpha: Complex64) -> Result<Self> {
        check_complex("alpha", alpha)?;
        Ok(Self::vacuum(1).displaced(0, alpha))
    }

    pub fn squeezed(alpha: Complex64, xi: Complex64) -> Result<Self> {
        check_complex("alpha", alpha)?;
        check_complex("xi", xi)?;
        let s = single_mode_squeezer(xi);
        Ok(s.apply_all(&Self::vacuum(1)).displaced(0, alpha))
    }

    pub fn thermal(n: f64) -> Result<Self> {
        check_finite("N", n)?;
        if n < 0.0 {
            return Err(Error::InvalidParameter(format!("thermal N must be >= 0, got {n}")));
        }
        Ok(Self::from_parts(Vector::zeros(2), Mat::identity(2, 2) * (2.0 * n + 1.0)))
    }

    /// Twin beam from two vacua through a two-mode squeezer with `sinh^2 r = lambda`.
    pub fn twb(lambda: f64) -> Result<Self> {
        Self::twb_with_phase(lambda, 0.0)
    }

    pub fn twb_with_phase(lambda: f64, psi: f64) -> Result<Self> {
        check_finite("lambda", lambda)?;
        check_finite("psi", psi)?;
        if lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        let r = lambda.sqrt().asinh();
        let op = two_mode_squeezer(Complex64::from_polar(r, psi));
        Ok(op.apply_all(&Self::vacuum(2)))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn cov(&self) -> &Mat {
        &self.cov
    }

    /// Coherent amplitude `<a_k>`.
    pub fn alpha(&self, k: usize) -> Complex64 {
        Complex64::new(self.mean[2 * k], self.mean[2 * k + 1]) * 0.5
    }

    /// `<a_k^dag a_k>`.
    pub fn mean_photons(&self, k: usize) -> f64 {
        let v = self.cov[(2 * k, 2 * k)] + self.cov[(2 * k + 1, 2 * k + 1)];
        (v - 2.0) / 4.0 + self.alpha(k).norm_sqr()
    }

    pub fn total_photons(&self) -> f64 {
        (0..self.n_modes).map(|k| self.mean_photons(k)).sum()
    }

    /// Mean and variance of `X_theta = a e^{-i theta} + a^dag e^{i theta}`.
    pub fn quadrature(&self, k: usize, theta: f64) -> (f64, f64) {
        let (c, s) = (theta.cos(), theta.sin());
        let m = c * self.mean[2 * k] + s * self.mean[2 * k + 1];
        let v = c * c * self.cov[(2 * k, 2 * k)]
            + 2.0 * c * s * self.cov[(2 * k, 2 * k + 1)]
            + s * s * self.cov[(2 * k + 1, 2 * k + 1)];
        (m, v)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let n = 2 * self.n_modes;
        let m = 2 * other.n_modes;
        let mut mean = Vector::zeros(n + m);
        mean.rows_mut(0, n).copy_from(&self.mean);
        mean.rows_mut(n, m).copy_from(&other.mean);
        let mut cov = Mat::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        Self::from_parts(mean, cov)
    }

    /// Marginal on the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        check_modes(modes, self.n_modes)?;
        let idx: Vec<usize> = modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mean = Vector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = Mat::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self::from_parts(mean, cov))
    }

    pub fn displaced(&self, k: usize, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.mean[2 * k] += 2.0 * alpha.re;
        out.mean[2 * k + 1] += 2.0 * alpha.im;
        out
    }

    /// Smallest eigenvalue of `cov + i Omega`; nonnegative for physical states.
    pub fn physicality_margin(&self) -> f64 {
        let d = 2 * self.n_modes;
        let w = omega(self.n_modes);
        let mut big = Mat::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&self.cov);
        big.view_mut((d, d), (d, d)).copy_from(&self.cov);
        big.view_mut((0, d), (d, d)).copy_from(&(-&w));
        big.view_mut((d, 0), (d, d)).copy_from(&w);
        SymmetricEigen::new(big).eigenvalues.min()
    }

    pub fn check_physical(&self) -> Result<()> {
        let m = self.physicality_margin();
        if m < -1e-9 * self.cov.amax().max(1.0) {
            Err(Error::Unphysical(m))
        } else {
            Ok(())
        }
    }

    /// Pure Gaussian states have `det cov = 1`.
    pub fn is_pure(&self, tol: f64) -> bool {
        (self.cov.determinant() - 1.0).abs() <= tol
    }
}

fn check_modes(modes: &[usize], n: usize) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= n {
            return Err(Error::ModeIndex(format!("mode {m} out of range for {n} modes")));
        }
        if modes[..i].contains(&m) {
            return Err(Error::ModeIndex(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    pub matrix: Mat,
    pub displacement: Vector,
}

impl SymplecticOp {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: Mat::identity(2 * n_modes, 2 * n_modes),
            displacement: Vector::zeros(2 * n_modes),
        }
    }

    /// Real form of `a -> A a + B a^dag`.
    pub fn from_heisenberg(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Self {
        let n = a.len();
        let mut s = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let p = a[i][j] + b[i][j];
                let m = a[i][j] - b[i][j];
                s[(2 * i, 2 * j)] = p.re;
                s[(2 * i, 2 * j + 1)] = -m.im;
                s[(2 * i + 1, 2 * j)] = p.im;
                s[(2 * i + 1, 2 * j + 1)] = m.re;
            }
        }
        Self { matrix: s, displacement: Vector::zeros(2 * n) }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `self` first, then `later`.
    pub fn then(&self, later: &SymplecticOp) -> SymplecticOp {
        SymplecticOp {
            matrix: &later.matrix * &self.matrix,
            displacement: &later.matrix * &self.displacement + &later.displacement,
        }
    }

    pub fn symplectic_error(&self) -> f64 {
        let w = omega(self.n_modes());
        (self.matrix.transpose() * &w * &self.matrix - w).amax()
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_error() <= tol
    }

    /// Apply to a state with the same number of modes.
    pub fn apply_all(&self, state: &GaussianState) -> GaussianState {
        let mean = &self.matrix * &state.mean + &self.displacement;
        let cov = &self.matrix * &state.cov * self.matrix.transpose();
        GaussianState::from_parts(mean, symmetrize(cov))
    }
}

fn symmetrize(m: Mat) -> Mat {
    (&m + m.transpose()) * 0.5
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a -> a cos(phi) + b e^{i theta} sin(phi)`, `b -> b cos(phi) - a e^{-i theta} sin(phi)`.
/// Transmissivity is `cos^2 phi`.
pub fn beam_splitter(phi: f64, theta: f64) -> SymplecticOp {
    let (s, co) = phi.sin_cos();
    let e = Complex64::from_polar(1.0, theta);
    let a = vec![vec![c(co, 0.0), e * s], vec![-e.conj() * s, c(co, 0.0)]];
    let b = vec![vec![c(0.0, 0.0); 2]; 2];
    SymplecticOp::from_heisenberg(&a, &b)
}

/// `a -> a e^{-i phi}`.
pub fn phase_shift(phi: f64) -> SymplecticOp {
    SymplecticOp::from_heisenberg(&[vec![Complex64::from_polar(1.0, -phi)]], &[vec![c(0.0, 0.0)]])
}

/// `a -> mu a + nu a^dag` with `mu = cosh r`, `nu = e^{i psi} sinh r`.
pub fn single_mode_squeezer(xi: Complex64) -> SymplecticOp {
    let (r, psi) = xi.to_polar();
    let nu = Complex64::from_polar(r.sinh(), psi);
    SymplecticOp::from_heisenberg(&[vec![c(r.cosh(), 0.0)]], &[vec![nu]])
}

/// `a -> mu a + nu b^dag`, `b -> mu b + nu a^dag`.
pub fn two_mode_squeezer(xi: Complex64) -> SymplecticOp {
    let (r, psi) = xi.to_polar();
    let mu = c(r.cosh(), 0.0);
    let nu = Complex64::from_polar(r.sinh(), psi);
    let z = c(0.0, 0.0);
    SymplecticOp::from_heisenberg(&[vec![mu, z], vec![z, mu]], &[vec![z, nu], vec![nu, z]])
}

pub fn displacement(alpha: Complex64) -> SymplecticOp {
    let mut op = SymplecticOp::identity(1);
    op.displacement[0] = 2.0 * alpha.re;
    op.displacement[1] = 2.0 * alpha.im;
    op
}

/// Embed `op` acting on `modes` into the full state and apply it.
pub fn apply(op: &SymplecticOp, state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    check_modes(modes, state.n_modes)?;
    if modes.len() != op.n_modes() {
        return Err(Error::ModeIndex(format!(
            "op acts on {} modes, {} indices given",
            op.n_modes(),
            modes.len()
        )));
    }
    let idx: Vec<usize> = modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    let d = idx.len();
    let dim = 2 * state.n_modes;

    let mut mean = state.mean.clone();
    for i in 0..d {
        let mut acc = op.displacement[i];
        for j in 0..d {
            acc += op.matrix[(i, j)] * state.mean[idx[j]];
        }
        mean[idx[i]] = acc;
    }

    // rows of S*V restricted to the active indices
    let mut sv = Mat::zeros(d, dim);
    for i in 0..d {
        for col in 0..dim {
            let mut acc = 0.0;
            for j in 0..d {
                acc += op.matrix[(i, j)] * state.cov[(idx[j], col)];
            }
            sv[(i, col)] = acc;
        }
    }
    let mut cov = state.cov.clone();
    for i in 0..d {
        for col in 0..dim {
            cov[(idx[i], col)] = sv[(i, col)];
            cov[(col, idx[i])] = sv[(i, col)];
        }
    }
    for i in 0..d {
        for k in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += sv[(i, idx[j])] * op.matrix[(k, j)];
            }
            cov[(idx[i], idx[k])] = acc;
        }
    }
    Ok(GaussianState::from_parts(mean, cov))
}

/// Pure-loss channel per mode: `cov -> eta cov + (1 - eta) I`, `mean -> sqrt(eta) mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossChannel {
    pub eta: Vec<f64>,
}

impl LossChannel {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        for &e in &eta {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!("efficiency {e} outside [0, 1]")));
            }
        }
        Ok(Self { eta })
    }

    pub fn uniform(eta: f64, n_modes: usize) -> Result<Self> {
        Self::new(vec![eta; n_modes])
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if self.eta.len() != state.n_modes {
            return Err(Error::ModeIndex(format!(
                "{} efficiencies for {} modes",
                self.eta.len(),
                state.n_modes
            )));
        }
        if self.eta.iter().all(|&e| e == 1.0) {
            return Ok(state.clone());
        }
        let dim = 2 * state.n_modes;
        let g: Vec<f64> = (0..dim).map(|i| self.eta[i / 2].sqrt()).collect();
        let mean = Vector::from_fn(dim, |i, _| g[i] * state.mean[i]);
        let cov = Mat::from_fn(dim, dim, |i, j| {
            let v = g[i] * g[j] * state.cov[(i, j)];
            if i == j {
                v + 1.0 - self.eta[i / 2]
            } else {
                v
            }
        });
        Ok(GaussianState::from_parts(mean, cov))
    }
}

/// Uniform loss on every mode.
pub fn apply_loss(state: &GaussianState, eta: f64) -> Result<GaussianState> {
    LossChannel::uniform(eta, state.n_modes())?.apply(state)
}
