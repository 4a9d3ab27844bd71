//! Photon-number moments of Gaussian states by Wick contraction.
//!
//! Each mode operator is split as `o = <o> + do`. The ordered two-point
//! functions `<do_u do_v>` of the fluctuations form the contraction table; an
//! ordered product of up to eight operators is then reduced with the
//! recursion
//!
//! `E[o_1 ... o_m] = <o_1> E[o_2 ... o_m] + sum_j <do_1 do_j> E[.. without 1, j ..]`
//!
//! memoized over bitmasks of the remaining operators.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian_core::GaussianState;

pub const MAX_OPS: usize = 8;

/// Results smaller than this multiple of machine epsilon times the
/// magnitude of the summed terms are indistinguishable from zero.
const ROUNDING_FLOOR: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn a(mode: usize) -> Self {
        Self { mode, dagger: false }
    }
    pub fn adag(mode: usize) -> Self {
        Self { mode, dagger: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentRequest {
    ops: Vec<Ladder>,
}

impl MomentRequest {
    pub fn new(ops: Vec<Ladder>) -> Result<Self> {
        if ops.len() > MAX_OPS {
            return Err(Error::MomentCap(ops.len()));
        }
        Ok(Self { ops })
    }

    /// `prod_k (a_k^dag a_k)^{p_k}` in normal order per factor, e.g. `[(0, 2)]` is `N_0^2`.
    pub fn number_powers(powers: &[(usize, usize)]) -> Result<Self> {
        let mut ops = Vec::new();
        for &(mode, p) in powers {
            for _ in 0..p {
                ops.push(Ladder::adag(mode));
                ops.push(Ladder::a(mode));
            }
        }
        Self::new(ops)
    }

    pub fn ops(&self) -> &[Ladder] {
        &self.ops
    }
}

/// Contraction table and means of a state in the `(a_1..a_n, a_1^dag..a_n^dag)` basis.
#[derive(Debug, Clone)]
pub struct Contractions {
    n: usize,
    k: DMatrix<Complex64>,
    mean: Vec<Complex64>,
}

impl Contractions {
    pub fn new(state: &GaussianState) -> Self {
        let n = state.n_modes();
        let cov = state.cov();
        let half = Complex64::new(0.5, 0.0);
        let ihalf = Complex64::new(0.0, 0.5);
        // coefficient of quadrature q in basis operator u
        let coef = |u: usize, q: usize| -> Complex64 {
            let mode = u % n;
            if q / 2 != mode {
                return Complex64::new(0.0, 0.0);
            }
            match (u < n, q % 2 == 0) {
                (_, true) => half,
                (true, false) => ihalf,
                (false, false) => -ihalf,
            }
        };
        let mut k = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
        for u in 0..2 * n {
            for v in 0..2 * n {
                let (mu, mv) = (u % n, v % n);
                let mut acc = Complex64::new(0.0, 0.0);
                for qi in [2 * mu, 2 * mu + 1] {
                    for qj in [2 * mv, 2 * mv + 1] {
                        let mut m = Complex64::new(cov[(qi, qj)], 0.0);
                        // i * Omega entries, Omega blocks [[0, 1], [-1, 0]]
                        if qi / 2 == qj / 2 && qi != qj {
                            m += if qi % 2 == 0 { Complex64::i() } else { -Complex64::i() };
                        }
                        acc += coef(u, qi) * m * coef(v, qj);
                    }
                }
                k[(u, v)] = acc;
            }
        }
        let mut mean = vec![Complex64::new(0.0, 0.0); 2 * n];
        for j in 0..n {
            let a = state.alpha(j);
            mean[j] = a;
            mean[n + j] = a.conj();
        }
        Self { n, k, mean }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    fn index(&self, l: Ladder) -> usize {
        if l.dagger {
            self.n + l.mode
        } else {
            l.mode
        }
    }

    /// `<do_u do_v>`.
    pub fn contraction(&self, u: Ladder, v: Ladder) -> Complex64 {
        self.k[(self.index(u), self.index(v))]
    }

    pub fn mean(&self, l: Ladder) -> Complex64 {
        self.mean[self.index(l)]
    }

    /// Expectation of an ordered product of (optionally centered) operators,
    /// together with the sum of absolute values of all contributions.
    fn product(&self, factors: &[Factor]) -> Result<(Complex64, f64)> {
        let m = factors.len();
        if m > MAX_OPS {
            return Err(Error::MomentCap(m));
        }
        if m == 0 {
            return Ok((Complex64::new(1.0, 0.0), 1.0));
        }
        let idx: Vec<usize> = factors.iter().map(|f| self.index(f.op)).collect();
        let full = (1usize << m) - 1;
        let mut val = [Complex64::new(0.0, 0.0); 1 << MAX_OPS];
        let mut mag = [0.0f64; 1 << MAX_OPS];
        val[0] = Complex64::new(1.0, 0.0);
        mag[0] = 1.0;
        // masks in increasing order: every submask is smaller than its parent
        for mask in 1..=full {
            let first = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << first);
            let mut v = Complex64::new(0.0, 0.0);
            let mut a = 0.0;
            if !factors[first].centered {
                let mu = self.mean[idx[first]];
                v += mu * val[rest];
                a += mu.norm() * mag[rest];
            }
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                let kk = self.k[(idx[first], idx[j])];
                let sub = rest & !(1 << j);
                v += kk * val[sub];
                a += kk.norm() * mag[sub];
            }
            val[mask] = v;
            mag[mask] = a;
        }
        Ok((val[full], mag[full]))
    }

    /// `a_k^dag a_k`.
    pub fn number(&self, k: usize) -> OpPoly {
        OpPoly::monomial(vec![Factor::full(Ladder::adag(k)), Factor::full(Ladder::a(k))])
    }

    /// `N_k - <N_k>` written in fluctuation operators, free of the large
    /// cancellation between `<N^2>` and `<N>^2` for bright modes.
    pub fn delta_number(&self, k: usize) -> OpPoly {
        let a = self.mean(Ladder::a(k));
        let dad = Factor::centered(Ladder::adag(k));
        let da = Factor::centered(Ladder::a(k));
        let nn = self.contraction(Ladder::adag(k), Ladder::a(k));
        OpPoly {
            terms: vec![
                (a.conj(), vec![da]),
                (a, vec![dad]),
                (Complex64::new(1.0, 0.0), vec![dad, da]),
                (-nn, vec![]),
            ],
        }
    }

    pub fn mean_number(&self, k: usize) -> f64 {
        (self.mean(Ladder::a(k)).norm_sqr() + self.contraction(Ladder::adag(k), Ladder::a(k)).re).max(0.0)
    }

    pub fn expect(&self, p: &OpPoly) -> Result<Complex64> {
        Ok(self.expect_with_scale(p)?.0)
    }

    /// Expectation plus the magnitude scale of the summed contributions.
    pub fn expect_with_scale(&self, p: &OpPoly) -> Result<(Complex64, f64)> {
        let mut v = Complex64::new(0.0, 0.0);
        let mut s = 0.0;
        for (c, f) in &p.terms {
            let (x, a) = self.product(f)?;
            v += c * x;
            s += c.norm() * a;
        }
        Ok((v, s))
    }

    /// `<P^2> - <P>^2` for Hermitian `P`, snapped to zero below the rounding floor.
    pub fn variance(&self, p: &OpPoly) -> Result<f64> {
        let (m, ms) = self.expect_with_scale(p)?;
        let (m2, s2) = self.expect_with_scale(&(p * p))?;
        let v = m2.re - m.re * m.re;
        let scale = s2 + ms * ms;
        if v.abs() <= ROUNDING_FLOOR * scale {
            Ok(0.0)
        } else {
            Ok(v)
        }
    }

    /// `<P Q>` symmetrized, minus `<P><Q>`.
    pub fn covariance(&self, p: &OpPoly, q: &OpPoly) -> Result<f64> {
        let pq = self.expect(&(p * q))?;
        let qp = self.expect(&(q * p))?;
        Ok(0.5 * (pq.re + qp.re) - self.expect(p)?.re * self.expect(q)?.re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub op: Ladder,
    /// Use the fluctuation `o - <o>` instead of `o`.
    pub centered: bool,
}

impl Factor {
    pub fn full(op: Ladder) -> Self {
        Self { op, centered: false }
    }
    pub fn centered(op: Ladder) -> Self {
        Self { op, centered: true }
    }
}

/// Linear combination of ordered operator products.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpPoly {
    pub terms: Vec<(Complex64, Vec<Factor>)>,
}

impl OpPoly {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn constant(c: f64) -> Self {
        Self { terms: vec![(Complex64::new(c, 0.0), vec![])] }
    }
    pub fn monomial(f: Vec<Factor>) -> Self {
        Self { terms: vec![(Complex64::new(1.0, 0.0), f)] }
    }
    pub fn scale(&self, s: f64) -> Self {
        Self { terms: self.terms.iter().map(|(c, f)| (c * s, f.clone())).collect() }
    }
    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|t| t.1.len()).max().unwrap_or(0)
    }
}

impl Add for &OpPoly {
    type Output = OpPoly;
    fn add(self, o: &OpPoly) -> OpPoly {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        OpPoly { terms }
    }
}

impl Add for OpPoly {
    type Output = OpPoly;
    fn add(self, o: OpPoly) -> OpPoly {
        &self + &o
    }
}

impl Neg for &OpPoly {
    type Output = OpPoly;
    fn neg(self) -> OpPoly {
        self.scale(-1.0)
    }
}

impl Sub for &OpPoly {
    type Output = OpPoly;
    fn sub(self, o: &OpPoly) -> OpPoly {
        self + &(-o)
    }
}

impl Sub for OpPoly {
    type Output = OpPoly;
    fn sub(self, o: OpPoly) -> OpPoly {
        &self - &o
    }
}

impl Mul for &OpPoly {
    type Output = OpPoly;
    fn mul(self, o: &OpPoly) -> OpPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (c1, f1) in &self.terms {
            for (c2, f2) in &o.terms {
                let mut f = f1.clone();
                f.extend_from_slice(f2);
                terms.push((c1 * c2, f));
            }
        }
        OpPoly { terms }
    }
}

impl Mul for OpPoly {
    type Output = OpPoly;
    fn mul(self, o: OpPoly) -> OpPoly {
        &self * &o
    }
}

/// Expectation of an ordered product of mode operators.
pub fn wick_moment(state: &GaussianState, req: &MomentRequest) -> Result<Complex64> {
    for l in req.ops() {
        if l.mode >= state.n_modes() {
            return Err(Error::ModeIndex(format!("mode {} out of range", l.mode)));
        }
    }
    let ctx = Contractions::new(state);
    let f: Vec<Factor> = req.ops().iter().map(|&l| Factor::full(l)).collect();
    Ok(ctx.product(&f)?.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberStats {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    /// `(i, j, <dN_i dN_j>)` for each requested pair.
    pub covariances: Vec<(usize, usize, f64)>,
}

pub fn number_stats(state: &GaussianState, pairs: &[(usize, usize)]) -> Result<NumberStats> {
    let n = state.n_modes();
    if !pairs.is_empty() && n < 2 {
        return Err(Error::InvalidParameter("covariances need at least two modes".into()));
    }
    for &(i, j) in pairs {
        if i >= n || j >= n {
            return Err(Error::ModeIndex(format!("pair ({i}, {j}) out of range")));
        }
    }
    let ctx = Contractions::new(state);
    let dn: Vec<OpPoly> = (0..n).map(|k| ctx.delta_number(k)).collect();
    let means = (0..n).map(|k| ctx.mean_number(k)).collect();
    let variances = dn.iter().map(|p| ctx.variance(p)).collect::<Result<Vec<_>>>()?;
    let covariances = pairs
        .iter()
        .map(|&(i, j)| Ok((i, j, ctx.expect(&(&dn[i] * &dn[j]))?.re)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NumberStats { means, variances, covariances })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrfSign {
    Plus,
    Minus,
}

/// Noise reduction factor `var(N_i +- N_j) / <N_i + N_j>`.
pub fn nrf(state: &GaussianState, modes: (usize, usize), sign: NrfSign) -> Result<f64> {
    let (i, j) = modes;
    if i == j || i >= state.n_modes() || j >= state.n_modes() {
        return Err(Error::ModeIndex(format!("bad detection pair ({i}, {j})")));
    }
    let ctx = Contractions::new(state);
    let s = match sign {
        NrfSign::Plus => 1.0,
        NrfSign::Minus => -1.0,
    };
    let p = &ctx.delta_number(i) + &ctx.delta_number(j).scale(s);
    let flux = ctx.mean_number(i) + ctx.mean_number(j);
    if flux <= 0.0 {
        return Err(Error::Degenerate("zero total mean flux".into()));
    }
    Ok(ctx.variance(&p)? / flux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_core::{make_state, StateKind};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coherent_number() {
        let st = GaussianState::coherent(c(1.2, -0.7)).unwrap();
        let n = wick_moment(&st, &MomentRequest::number_powers(&[(0, 1)]).unwrap()).unwrap();
        assert_relative_eq!(n.re, 1.2f64.powi(2) + 0.49, epsilon = 1e-14);
    }

    #[test]
    fn odd_moment_on_vacuum_is_zero() {
        let st = GaussianState::vacuum(2);
        let req = MomentRequest::new(vec![Ladder::a(0), Ladder::adag(1), Ladder::a(1)]).unwrap();
        assert_eq!(wick_moment(&st, &req).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(MomentRequest::new(vec![Ladder::a(0); 9]), Err(Error::MomentCap(9))));
    }

    #[test]
    fn commutator_is_one() {
        let st = make_state(StateKind::Squeezed { alpha: c(0.4, 0.2), xi: c(0.3, 0.5) }, 1).unwrap();
        let ctx = Contractions::new(&st);
        let k1 = ctx.contraction(Ladder::a(0), Ladder::adag(0));
        let k2 = ctx.contraction(Ladder::adag(0), Ladder::a(0));
        assert_relative_eq!((k1 - k2).re, 1.0, epsilon = 1e-14);
        assert!((k1 - k2).im.abs() < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_variance() {
        let st = GaussianState::squeezed(c(0.0, 0.0), c(2f64.asinh(), 0.0)).unwrap();
        let s = number_stats(&st, &[]).unwrap();
        assert_relative_eq!(s.variances[0], 40.0, epsilon = 1e-10);
    }

    #[test]
    fn twb_cross_moment() {
        let l = 0.3;
        let st = GaussianState::twb(l).unwrap();
        let v = wick_moment(&st, &MomentRequest::number_powers(&[(0, 1), (1, 1)]).unwrap()).unwrap();
        assert_relative_eq!(v.re, l * (2.0 * l + 1.0), epsilon = 1e-12);
    }

    #[test]
    fn pure_twb_nrf_minus_vanishes() {
        let st = GaussianState::twb(2.5).unwrap();
        assert_eq!(nrf(&st, (0, 1), NrfSign::Minus).unwrap(), 0.0);
    }

    #[test]
    fn coherent_pair_nrf_is_one() {
        let st = GaussianState::coherent(c(3.0, 0.0)).unwrap().tensor(&GaussianState::coherent(c(0.0, 2.0)).unwrap());
        for s in [NrfSign::Plus, NrfSign::Minus] {
            assert_relative_eq!(nrf(&st, (0, 1), s).unwrap(), 1.0, epsilon = 1e-12);
        }
        let stats = number_stats(&st, &[(0, 1)]).unwrap();
        assert!(stats.covariances[0].2.abs() < 1e-12);
    }

    #[test]
    fn delta_number_has_zero_mean() {
        let st = make_state(StateKind::Squeezed { alpha: c(1e5, 3e4), xi: c(0.7, 0.1) }, 1).unwrap();
        let ctx = Contractions::new(&st);
        let (v, s) = ctx.expect_with_scale(&ctx.delta_number(0)).unwrap();
        assert!(v.norm() <= 1e-15 * s.max(1.0));
    }
}
