//! Truncated number-basis simulator used to check the Gaussian engine.
//!
//! Amplitudes are stored row-major with mode 0 most significant; each mode
//! keeps levels `0..=cutoff`. Unitaries are applied through their
//! normal-ordered factorizations, whose exponentials are finite series on a
//! truncated space. A plain Taylor expansion of the generator is available
//! as an independent check.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{check_finite, Error, Result};
use crate::gaussian_core::{
    beam_splitter, displacement, phase_shift, single_mode_squeezer, two_mode_squeezer, SymplecticOp,
};
use crate::moments::Ladder;

/// Largest tolerated norm loss from a construction.
pub const BUILD_LEAK_LIMIT: f64 = 1e-6;
/// Largest tolerated cumulative norm loss during evolution.
pub const EVOLVE_LEAK_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
    leak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockKind {
    Vacuum,
    Number(usize),
    Coherent(Complex64),
    /// `S(xi)|0>` with `a -> cosh(r) a + e^{i psi} sinh(r) a^dag`.
    SqueezedVacuum(Complex64),
    /// Two-mode twin beam with `lambda` mean photons per mode and squeezing phase `psi`.
    Twb { lambda: f64, psi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockOp {
    BeamSplitter { phi: f64, theta: f64, modes: (usize, usize) },
    Phase { phi: f64, mode: usize },
    Squeeze { xi: Complex64, mode: usize },
    TwoModeSqueeze { xi: Complex64, modes: (usize, usize) },
    Displace { alpha: Complex64, mode: usize },
}

impl FockOp {
    /// The same element as a Gaussian map on the listed modes.
    pub fn gaussian(&self) -> (SymplecticOp, Vec<usize>) {
        match *self {
            FockOp::BeamSplitter { phi, theta, modes: (i, j) } => (beam_splitter(phi, theta), vec![i, j]),
            FockOp::Phase { phi, mode } => (phase_shift(phi), vec![mode]),
            FockOp::Squeeze { xi, mode } => (single_mode_squeezer(xi), vec![mode]),
            FockOp::TwoModeSqueeze { xi, modes: (i, j) } => (two_mode_squeezer(xi), vec![i, j]),
            FockOp::Displace { alpha, mode } => (displacement(alpha), vec![mode]),
        }
    }
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn build_fock(kind: FockKind, cutoff: usize) -> Result<FockVector> {
    let d = cutoff + 1;
    let (n_modes, amps) = match kind {
        FockKind::Vacuum => {
            let mut v = vec![cz(); d];
            v[0] = Complex64::one();
            (1, v)
        }
        FockKind::Number(n) => {
            if n > cutoff {
                return Err(Error::InvalidParameter(format!("|{n}> exceeds cutoff {cutoff}")));
            }
            let mut v = vec![cz(); d];
            v[n] = Complex64::one();
            (1, v)
        }
        FockKind::Coherent(alpha) => {
            check_finite("alpha", alpha.norm())?;
            let r = alpha.norm();
            let v = (0..d)
                .map(|n| {
                    if r == 0.0 {
                        return if n == 0 { Complex64::one() } else { cz() };
                    }
                    let mag = (-r * r / 2.0 + n as f64 * r.ln() - 0.5 * ln_factorial(n)).exp();
                    Complex64::from_polar(mag, n as f64 * alpha.arg())
                })
                .collect();
            (1, v)
        }
        FockKind::SqueezedVacuum(xi) => {
            let (r, psi) = xi.to_polar();
            check_finite("r", r)?;
            let t = r.tanh();
            let mut v = vec![cz(); d];
            for k in 0..=cutoff / 2 {
                let mag = if t == 0.0 {
                    if k == 0 { 1.0 } else { 0.0 }
                } else {
                    (k as f64 * (t / 2.0).ln() + 0.5 * ln_factorial(2 * k) - ln_factorial(k)).exp()
                };
                v[2 * k] = Complex64::from_polar(mag / r.cosh().sqrt(), k as f64 * psi);
            }
            (1, v)
        }
        FockKind::Twb { lambda, psi } => {
            check_finite("lambda", lambda)?;
            if lambda < 0.0 {
                return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
            }
            let t = (lambda / (1.0 + lambda)).sqrt();
            let norm = (1.0 - t * t).sqrt();
            let mut v = vec![cz(); d * d];
            for n in 0..d {
                v[n * d + n] = Complex64::from_polar(norm * t.powi(n as i32), n as f64 * psi);
            }
            (2, v)
        }
    };
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let leak = (1.0 - norm2).max(0.0);
    if leak > BUILD_LEAK_LIMIT {
        return Err(Error::TruncationLeak { leak, limit: BUILD_LEAK_LIMIT });
    }
    let s = 1.0 / norm2.sqrt();
    Ok(FockVector { n_modes, cutoff, amps: amps.into_iter().map(|a| a * s).collect(), leak })
}

impl FockVector {
    pub fn from_amplitudes(n_modes: usize, cutoff: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != (cutoff + 1).pow(n_modes as u32) {
            return Err(Error::InvalidParameter("amplitude array has the wrong size".into()));
        }
        Ok(Self { n_modes, cutoff, amps, leak: 0.0 })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
    /// Accumulated truncation loss, before renormalization.
    pub fn leak(&self) -> f64 {
        self.leak
    }

    fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        let d = self.dim();
        self.amps[occ.iter().fold(0, |acc, &n| acc * d + n)]
    }

    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        if self.cutoff != other.cutoff {
            return Err(Error::InvalidParameter("tensor factors need equal cutoffs".into()));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(FockVector {
            n_modes: self.n_modes + other.n_modes,
            cutoff: self.cutoff,
            amps,
            leak: self.leak + other.leak,
        })
    }

    /// Photon-number probabilities on the joint grid.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<psi| o_1 ... o_m |psi>` for an ordered ladder word, exact in an
    /// enlarged space so no raising operator is truncated.
    pub fn moment(&self, word: &[Ladder]) -> Result<Complex64> {
        for l in word {
            if l.mode >= self.n_modes {
                return Err(Error::ModeIndex(format!("mode {} out of range", l.mode)));
            }
        }
        let raise = word.iter().filter(|l| l.dagger).count();
        let big = Space::new(self.n_modes, self.dim() + raise);
        let small = Space::new(self.n_modes, self.dim());
        let mut v = vec![cz(); big.len()];
        for (i, a) in self.amps.iter().enumerate() {
            v[big.index(&small.occupations(i))] = *a;
        }
        let orig = v.clone();
        for l in word.iter().rev() {
            v = big.ladder(&v, *l);
        }
        Ok(orig.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
    }

    fn finish(mut self, norm_before: f64) -> Result<FockVector> {
        let n2 = self.norm_sqr();
        // growth would mean an unstable update, so it counts like loss
        self.leak += (norm_before - n2).abs();
        if self.leak > EVOLVE_LEAK_LIMIT {
            return Err(Error::TruncationLeak { leak: self.leak, limit: EVOLVE_LEAK_LIMIT });
        }
        let s = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }
}

/// Index arithmetic for `n_modes` modes with `dim` levels each.
#[derive(Debug, Clone, Copy)]
struct Space {
    n_modes: usize,
    dim: usize,
}

impl Space {
    fn new(n_modes: usize, dim: usize) -> Self {
        Self { n_modes, dim }
    }
    fn len(&self) -> usize {
        self.dim.pow(self.n_modes as u32)
    }
    fn stride(&self, mode: usize) -> usize {
        self.dim.pow((self.n_modes - 1 - mode) as u32)
    }
    fn level(&self, i: usize, mode: usize) -> usize {
        (i / self.stride(mode)) % self.dim
    }
    fn index(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * self.dim + n)
    }
    fn occupations(&self, i: usize) -> Vec<usize> {
        (0..self.n_modes).map(|m| self.level(i, m)).collect()
    }

    /// Apply one ladder operator; population pushed past the top level is dropped.
    fn ladder(&self, v: &[Complex64], l: Ladder) -> Vec<Complex64> {
        let s = self.stride(l.mode);
        let mut out = vec![cz(); v.len()];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let n = self.level(i, l.mode);
            if l.dagger {
                if n + 1 < self.dim {
                    out[i + s] += a * ((n + 1) as f64).sqrt();
                }
            } else if n > 0 {
                out[i - s] += a * (n as f64).sqrt();
            }
        }
        out
    }

    fn word(&self, v: &[Complex64], word: &[Ladder]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        for l in word.iter().rev() {
            out = self.ladder(&out, *l);
        }
        out
    }

    /// `exp(c W) v` for a ladder word `W`, summed until the terms vanish.
    fn exp_word(&self, v: &[Complex64], c: Complex64, word: &[Ladder]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        let mut term = v.to_vec();
        let scale: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..=8 * self.dim + 16 {
            term = self.word(&term, word);
            let f = c / k as f64;
            let mut tn = 0.0;
            for t in term.iter_mut() {
                *t *= f;
                tn += t.norm_sqr();
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
            if tn.sqrt() <= 1e-18 * scale {
                break;
            }
        }
        out
    }

    /// Multiply by a function of the occupation numbers.
    fn diag(&self, v: &mut [Complex64], f: impl Fn(&[usize]) -> Complex64) {
        let mut occ = vec![0; self.n_modes];
        for (i, a) in v.iter_mut().enumerate() {
            for (m, o) in occ.iter_mut().enumerate() {
                *o = self.level(i, m);
            }
            *a *= f(&occ);
        }
    }
}

fn check_mode(m: usize, n: usize) -> Result<()> {
    if m >= n {
        Err(Error::ModeIndex(format!("mode {m} out of range for {n} modes")))
    } else {
        Ok(())
    }
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    check_mode(i, n)?;
    check_mode(j, n)?;
    if i == j {
        return Err(Error::ModeIndex(format!("mode {i} listed twice")));
    }
    Ok(())
}

/// Apply a unitary through its normal-ordered factorization.
pub fn evolve(op: FockOp, state: &FockVector) -> Result<FockVector> {
    let sp = Space::new(state.n_modes, state.dim());
    let n0 = state.norm_sqr();
    let mut v = state.amps.clone();
    match op {
        FockOp::Phase { phi, mode } => {
            check_mode(mode, state.n_modes)?;
            sp.diag(&mut v, |o| Complex64::from_polar(1.0, -phi * o[mode] as f64));
        }
        FockOp::Displace { alpha, mode } => {
            check_mode(mode, state.n_modes)?;
            v = sp.exp_word(&v, -alpha.conj(), &[Ladder::a(mode)]);
            v = sp.exp_word(&v, alpha, &[Ladder::adag(mode)]);
            let s = (-alpha.norm_sqr() / 2.0).exp();
            v.iter_mut().for_each(|a| *a *= s);
        }
        FockOp::Squeeze { xi, mode } => {
            check_mode(mode, state.n_modes)?;
            let (r, psi) = xi.to_polar();
            let t = Complex64::from_polar(r.tanh(), psi);
            let ln_mu = r.cosh().ln();
            v = sp.exp_word(&v, -t.conj() * 0.5, &[Ladder::a(mode), Ladder::a(mode)]);
            sp.diag(&mut v, |o| Complex64::new((-ln_mu * (o[mode] as f64 + 0.5)).exp(), 0.0));
            v = sp.exp_word(&v, t * 0.5, &[Ladder::adag(mode), Ladder::adag(mode)]);
        }
        FockOp::TwoModeSqueeze { xi, modes: (i, j) } => {
            check_pair(i, j, state.n_modes)?;
            let (r, psi) = xi.to_polar();
            let t = Complex64::from_polar(r.tanh(), psi);
            let ln_mu = r.cosh().ln();
            v = sp.exp_word(&v, -t.conj(), &[Ladder::a(i), Ladder::a(j)]);
            sp.diag(&mut v, |o| Complex64::new((-ln_mu * (o[i] + o[j] + 1) as f64).exp(), 0.0));
            v = sp.exp_word(&v, t, &[Ladder::adag(i), Ladder::adag(j)]);
        }
        FockOp::BeamSplitter { phi, theta, modes: (i, j) } => {
            check_pair(i, j, state.n_modes)?;
            v = beam_splitter_exact(&sp, &v, phi, theta, i, j);
        }
    }
    let out = FockVector { amps: v, ..state.clone() };
    out.finish(n0)
}

/// Photon-number-conserving mixing done in closed form. The factored
/// SU(2) form carries `cos(phi)^{-(N_a - N_b)}`, which amplifies truncation
/// error at the box edge, so it is not used here.
///
/// Uses `U a^dag U^dag = cos a^dag - e^{-i theta} sin b^dag` and
/// `U b^dag U^dag = cos b^dag + e^{i theta} sin a^dag` on each `|n, m>`.
fn beam_splitter_exact(sp: &Space, v: &[Complex64], phi: f64, theta: f64, i: usize, j: usize) -> Vec<Complex64> {
    let d = sp.dim;
    let (s, c) = phi.sin_cos();
    // U a^dag U^dag = c a^dag + ea b^dag,  U b^dag U^dag = c b^dag + eb a^dag
    let ea = Complex64::from_polar(-s, -theta);
    let eb = Complex64::from_polar(s, theta);
    let c = Complex64::new(c, 0.0);
    // Columns U|n, m>, entry p on |p, n + m - p>. With A = U a^dag U^dag and
    // B = U b^dag U^dag, both A U|n-1, m> = sqrt(n) U|n, m> and
    // B U|n, m-1> = sqrt(m) U|n, m>; averaging the two paths with weights
    // sqrt(n), sqrt(m) keeps rounding error from compounding along one chain.
    let raise = |v: &[Complex64], on_a: Complex64, on_b: Complex64, w: &mut [Complex64], k: f64| {
        let big_n = v.len() - 1;
        for (p, z) in v.iter().enumerate() {
            let q = big_n - p;
            w[p + 1] += z * on_a * (k * (p + 1) as f64).sqrt();
            w[p] += z * on_b * (k * (q + 1) as f64).sqrt();
        }
    };
    let mut cols: Vec<Vec<Complex64>> = vec![Vec::new(); d * d];
    let mut table: Vec<Vec<(usize, usize, Complex64)>> = vec![Vec::new(); d * d];
    for n in 0..d {
        for m in 0..d {
            let tot = n + m;
            let col = if tot == 0 {
                vec![Complex64::new(1.0, 0.0)]
            } else {
                let mut w = vec![cz(); tot + 1];
                if n > 0 {
                    raise(&cols[(n - 1) * d + m], c, ea, &mut w, n as f64);
                }
                if m > 0 {
                    raise(&cols[n * d + m - 1], eb, c, &mut w, m as f64);
                }
                let k = 1.0 / tot as f64;
                w.iter_mut().for_each(|z| *z *= k);
                w
            };
            let lo = tot.saturating_sub(d - 1);
            let hi = tot.min(d - 1);
            table[n * d + m] = (lo..=hi).map(|p| (p, tot - p, col[p])).collect();
            cols[n * d + m] = col;
        }
    }
    let (si, sj) = (sp.stride(i), sp.stride(j));
    let mut out = vec![cz(); v.len()];
    for (idx, a) in v.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let (n, m) = (sp.level(idx, i), sp.level(idx, j));
        let base = idx - n * si - m * sj;
        for &(p, q, z) in &table[n * d + m] {
            out[base + p * si + q * sj] += a * z;
        }
    }
    out
}

/// Apply `exp(G)` with `G` the anti-Hermitian generator of `op`, by Taylor
/// series on the truncated space. Slow; intended for validation only.
pub fn evolve_dense(op: FockOp, state: &FockVector) -> Result<FockVector> {
    let sp = Space::new(state.n_modes, state.dim());
    let gen: Vec<(Complex64, Vec<Ladder>)> = match op {
        FockOp::Phase { phi, mode } => {
            check_mode(mode, state.n_modes)?;
            vec![(Complex64::new(0.0, -phi), vec![Ladder::adag(mode), Ladder::a(mode)])]
        }
        FockOp::Displace { alpha, mode } => {
            check_mode(mode, state.n_modes)?;
            vec![(alpha, vec![Ladder::adag(mode)]), (-alpha.conj(), vec![Ladder::a(mode)])]
        }
        FockOp::Squeeze { xi, mode } => {
            check_mode(mode, state.n_modes)?;
            vec![
                (xi * 0.5, vec![Ladder::adag(mode), Ladder::adag(mode)]),
                (-xi.conj() * 0.5, vec![Ladder::a(mode), Ladder::a(mode)]),
            ]
        }
        FockOp::TwoModeSqueeze { xi, modes: (i, j) } => {
            check_pair(i, j, state.n_modes)?;
            vec![
                (xi, vec![Ladder::adag(i), Ladder::adag(j)]),
                (-xi.conj(), vec![Ladder::a(i), Ladder::a(j)]),
            ]
        }
        FockOp::BeamSplitter { phi, theta, modes: (i, j) } => {
            check_pair(i, j, state.n_modes)?;
            let z = Complex64::from_polar(phi, theta);
            vec![
                (z, vec![Ladder::adag(i), Ladder::a(j)]),
                (-z.conj(), vec![Ladder::a(i), Ladder::adag(j)]),
            ]
        }
    };
    let bound: f64 = gen.iter().map(|(c, w)| c.norm() * (sp.dim as f64).powf(w.len() as f64 / 2.0)).sum();
    let steps = bound.ceil().max(1.0) as usize;
    let n0 = state.norm_sqr();
    let mut v = state.amps.clone();
    for _ in 0..steps {
        let mut term = v.clone();
        for k in 1..200 {
            let mut next = vec![cz(); v.len()];
            for (c, w) in &gen {
                let x = sp.word(&term, w);
                for (n, y) in next.iter_mut().zip(&x) {
                    *n += y * (c / (steps * k) as f64);
                }
            }
            term = next;
            let tn: f64 = term.iter().map(|a| a.norm_sqr()).sum();
            for (o, t) in v.iter_mut().zip(&term) {
                *o += t;
            }
            if tn.sqrt() < 1e-18 {
                break;
            }
        }
    }
    let out = FockVector { amps: v, ..state.clone() };
    out.finish(n0)
}

/// Joint photocount distribution after independent Bernoulli detection.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    pub n_modes: usize,
    pub cutoff: usize,
    pub probs: Vec<f64>,
}

/// One detection record: counts per mode.
pub type CountSample = Vec<usize>;

impl CountDistribution {
    pub fn prob(&self, counts: &[usize]) -> f64 {
        let d = self.cutoff + 1;
        if counts.iter().any(|&c| c > self.cutoff) {
            return 0.0;
        }
        self.probs[counts.iter().fold(0, |acc, &n| acc * d + n)]
    }

    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let sp = Space::new(self.n_modes, self.cutoff + 1);
        let mut out = vec![0.0; self.cutoff + 1];
        for (i, p) in self.probs.iter().enumerate() {
            out[sp.level(i, mode)] += p;
        }
        out
    }

    /// `E[prod_k m_k^{p_k}]`.
    pub fn number_moment(&self, powers: &[(usize, u32)]) -> f64 {
        let sp = Space::new(self.n_modes, self.cutoff + 1);
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                powers.iter().fold(*p, |acc, &(m, e)| acc * (sp.level(i, m) as f64).powi(e as i32))
            })
            .sum()
    }

    pub fn samples(&self) -> impl Iterator<Item = (CountSample, f64)> + '_ {
        let sp = Space::new(self.n_modes, self.cutoff + 1);
        self.probs.iter().enumerate().map(move |(i, p)| (sp.occupations(i), *p))
    }
}

/// Thin a joint photon-number distribution with efficiency `eta` on every
/// mode, `P(m) = sum_n p(n) prod_k C(n_k, m_k) eta^m_k (1 - eta)^(n_k - m_k)`.
/// Generic so the same routine runs on exact rationals.
pub fn binomial_thinning<T>(probs: &[T], n_modes: usize, levels: usize, eta: &T) -> Vec<T>
where
    T: Clone + Zero + One + std::ops::Sub<Output = T>,
{
    let one = T::one();
    let q = one.clone() - eta.clone();
    // binom[n][m]
    let mut binom = vec![vec![T::zero(); levels]; levels];
    for n in 0..levels {
        binom[n][0] = T::one();
        for m in 1..=n {
            let above = if m < n { binom[n - 1][m].clone() } else { T::zero() };
            binom[n][m] = binom[n - 1][m - 1].clone() + above;
        }
    }
    let pow = |b: &T, e: usize| (0..e).fold(T::one(), |acc, _| acc * b.clone());
    let ep: Vec<T> = (0..levels).map(|e| pow(eta, e)).collect();
    let qp: Vec<T> = (0..levels).map(|e| pow(&q, e)).collect();

    let sp = Space::new(n_modes, levels);
    let mut cur = probs.to_vec();
    for mode in 0..n_modes {
        let s = sp.stride(mode);
        let mut next = vec![T::zero(); cur.len()];
        for (i, p) in cur.iter().enumerate() {
            let n = sp.level(i, mode);
            let base = i - n * s;
            for m in 0..=n {
                let w = binom[n][m].clone() * ep[m].clone() * qp[n - m].clone();
                next[base + m * s] = next[base + m * s].clone() + w * p.clone();
            }
        }
        cur = next;
    }
    cur
}

/// Exact photocount distribution after detection with efficiency `eta`.
pub fn detect(state: &FockVector, eta: f64) -> Result<CountDistribution> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("efficiency {eta} outside [0, 1]")));
    }
    let probs = binomial_thinning(&state.probabilities(), state.n_modes, state.dim(), &eta);
    Ok(CountDistribution { n_modes: state.n_modes, cutoff: state.cutoff, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &FockVector, b: &FockVector) -> f64 {
        a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn coherent_poisson_weight() {
        let v = build_fock(FockKind::Coherent(c(1.0, 0.0)), 30).unwrap();
        assert_abs_diff_eq!(v.probabilities()[2], (-1f64).exp() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn squeezed_vacuum_is_even() {
        let v = build_fock(FockKind::SqueezedVacuum(c(0.6, 0.3)), 40).unwrap();
        for n in (1..=40).step_by(2) {
            assert_eq!(v.probabilities()[n], 0.0);
        }
    }

    #[test]
    fn truncation_leak_reported() {
        let e = build_fock(FockKind::Coherent(c(5.0, 0.0)), 10).unwrap_err();
        assert!(matches!(e, Error::TruncationLeak { .. }));
    }

    #[test]
    fn beam_splitter_round_trip_at_high_occupation() {
        for (n, m) in [(50, 50), (10, 90), (70, 25)] {
            let s = build_fock(FockKind::Number(n), 100).unwrap().tensor(&build_fock(FockKind::Number(m), 100).unwrap()).unwrap();
            let there = evolve(FockOp::BeamSplitter { phi: 2.29, theta: 5.45, modes: (0, 1) }, &s).unwrap();
            let back = evolve(FockOp::BeamSplitter { phi: -2.29, theta: 5.45, modes: (0, 1) }, &there).unwrap();
            assert!(close(&s, &back) < 1e-13, "{n} {m}");
            assert!(back.leak() < 1e-13);
        }
    }

    #[test]
    fn single_photon_balanced_split() {
        let one = build_fock(FockKind::Number(1), 5).unwrap();
        let vac = build_fock(FockKind::Vacuum, 5).unwrap();
        let st = one.tensor(&vac).unwrap();
        let out = evolve(
            FockOp::BeamSplitter { phi: std::f64::consts::FRAC_PI_4, theta: 0.0, modes: (0, 1) },
            &st,
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, h, epsilon = 1e-13);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re.abs(), h, epsilon = 1e-13);
    }

    #[test]
    fn factored_matches_dense() {
        let a = build_fock(FockKind::Coherent(c(0.5, 0.2)), 34).unwrap();
        let b = build_fock(FockKind::SqueezedVacuum(c(0.2, -0.3)), 34).unwrap();
        let st = a.tensor(&b).unwrap();
        let ops = [
            FockOp::BeamSplitter { phi: 0.9, theta: 0.4, modes: (0, 1) },
            FockOp::BeamSplitter { phi: -2.0, theta: 1.0, modes: (1, 0) },
            FockOp::Phase { phi: 0.7, mode: 1 },
            FockOp::Squeeze { xi: c(0.3, 0.2), mode: 0 },
            FockOp::TwoModeSqueeze { xi: c(-0.2, 0.25), modes: (0, 1) },
            FockOp::Displace { alpha: c(0.3, -0.4), mode: 1 },
        ];
        for op in ops {
            let f = evolve(op, &st).unwrap();
            let d = evolve_dense(op, &st).unwrap();
            // the two truncations differ only near the top of the box
            assert!(close(&f, &d) < 1e-6, "{op:?}: {}", close(&f, &d));
            for w in [
                &[Ladder::a(0)][..],
                &[Ladder::adag(1), Ladder::a(0)],
                &[Ladder::adag(0), Ladder::a(0), Ladder::adag(1), Ladder::a(1)],
            ] {
                let e = (f.moment(w).unwrap() - d.moment(w).unwrap()).norm();
                assert!(e < 1e-10, "{op:?} {w:?}: {e}");
            }
        }
    }

    #[test]
    fn two_mode_squeezer_builds_twb() {
        let vac = build_fock(FockKind::Vacuum, 30).unwrap();
        let st = vac.tensor(&vac).unwrap();
        let r = 0.5f64;
        let out = evolve(FockOp::TwoModeSqueeze { xi: c(r, 0.0), modes: (0, 1) }, &st).unwrap();
        let twb = build_fock(FockKind::Twb { lambda: r.sinh().powi(2), psi: 0.0 }, 30).unwrap();
        assert!(close(&out, &twb) < 1e-12);
    }

    #[test]
    fn moments_on_coherent_and_thermal() {
        let a = c(0.8, -0.6);
        let v = build_fock(FockKind::Coherent(a), 30).unwrap();
        let n = v.moment(&[Ladder::adag(0), Ladder::a(0)]).unwrap();
        assert_abs_diff_eq!(n.re, a.norm_sqr(), epsilon = 1e-12);

        // reduced twin-beam mode is thermal
        let l = 0.4;
        let t = build_fock(FockKind::Twb { lambda: l, psi: 0.0 }, 40).unwrap();
        let n1 = t.moment(&[Ladder::adag(0), Ladder::a(0)]).unwrap().re;
        let n2 = t
            .moment(&[Ladder::adag(0), Ladder::a(0), Ladder::adag(0), Ladder::a(0)])
            .unwrap()
            .re;
        assert_abs_diff_eq!(n2 - n1 * n1, l * (l + 1.0), epsilon = 1e-10);
    }

    #[test]
    fn odd_moment_of_squeezed_vacuum_vanishes() {
        let v = build_fock(FockKind::SqueezedVacuum(c(0.4, 0.0)), 30).unwrap();
        let m = v.moment(&[Ladder::adag(0), Ladder::a(0), Ladder::a(0)]).unwrap();
        assert_eq!(m, c(0.0, 0.0));
    }

    #[test]
    fn single_photon_detection() {
        let v = build_fock(FockKind::Number(1), 3).unwrap();
        let d = detect(&v, 0.3).unwrap();
        assert_abs_diff_eq!(d.prob(&[1]), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(&[0]), 0.7, epsilon = 1e-15);
        assert_eq!(detect(&v, 1.0).unwrap().probs, v.probabilities());
    }

    #[test]
    fn detection_marginal_matches_single_mode() {
        let t = build_fock(FockKind::Twb { lambda: 0.2, psi: 0.0 }, 25).unwrap();
        let joint = detect(&t, 0.7).unwrap();
        let marg: Vec<f64> = (0..=25).map(|n| t.probabilities()[n * 26 + n]).collect();
        let single = binomial_thinning(&marg, 1, 26, &0.7);
        for (a, b) in joint.marginal(1).iter().zip(&single) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }
}
