//! Symmetrically ordered characteristic functions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::displacement_entries;
use crate::special::{binomial, laguerre, ln_factorial};
use crate::states::TwoModeState;

/// The single-mode state handed to the sender.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSpec {
    Coherent { alpha0: Complex64 },
    /// Squeezed vacuum with squeezing `r e^{i zeta}`.
    Squeezed { r: f64, zeta: f64 },
}

impl InputSpec {
    pub fn coherent(alpha0: Complex64) -> Self {
        InputSpec::Coherent { alpha0 }
    }

    pub fn squeezed(r: f64, zeta: f64) -> Self {
        InputSpec::Squeezed { r, zeta }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InputSpec::Coherent { alpha0 } if !(alpha0.re.is_finite() && alpha0.im.is_finite()) => {
                Err(Error::InvalidInput("alpha0 must be finite"))
            }
            InputSpec::Squeezed { r, zeta } if !(r.is_finite() && zeta.is_finite()) => {
                Err(Error::InvalidInput("squeezing parameters must be finite"))
            }
            InputSpec::Squeezed { r, .. } if r < 0.0 => Err(Error::InvalidInput("squeezing modulus must be >= 0")),
            _ => Ok(()),
        }
    }
}

pub fn chi_input(input: &InputSpec, gamma: Complex64) -> Complex64 {
    match *input {
        InputSpec::Coherent { alpha0 } => {
            (Complex64::new(-0.5 * gamma.norm_sqr(), 0.0) + alpha0.conj() * gamma - alpha0 * gamma.conj()).exp()
        }
        InputSpec::Squeezed { r, zeta } => {
            let rot = Complex64::from_polar(1.0, -zeta);
            let quad = gamma * gamma * rot + (gamma * gamma * rot).conj();
            (-(2.0 * gamma.norm_sqr() * (2.0 * r).cosh() + quad * (2.0 * r).sinh()) / 4.0).exp()
        }
    }
}

/// How the two-mode characteristic function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMethod {
    /// Double series over the single-mode coefficients with Laguerre kernels.
    ClosedForm,
    /// `<phi| D(g1) (x) D(g2) |phi>` contracted against the full amplitude matrix.
    Trace,
    /// Uses that a beam-split state with vacuum in the second port has
    /// `chi(g1, g2) = chi_psi((g1+g2)/sqrt 2) e^{-|g1-g2|^2/4}`.
    BeamSplitter,
}

/// `g^{q-p} L_p^{q-p}(|g|^2)` for any `p, q >= 0`, using the continuation
/// `g^{q-p} L_p^{q-p} = (-g^*)^{p-q} q!/p! L_q^{p-q}` when `q < p`.
fn laguerre_kernel(p: usize, q: usize, g: Complex64) -> Complex64 {
    let x = g.norm_sqr();
    if q >= p {
        g.powu((q - p) as u32) * laguerre(p, (q - p) as i64, x)
    } else {
        let ratio = (ln_factorial(q) - ln_factorial(p)).exp();
        (-g.conj()).powu((p - q) as u32) * (ratio * laguerre(q, (p - q) as i64, x))
    }
}

fn closed_form(source: &[Complex64], g1: Complex64, g2: Complex64) -> Complex64 {
    let d = source.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut h1 = vec![zero; d * d];
    let mut h2 = vec![zero; d * d];
    for p in 0..d {
        for q in 0..d {
            h1[p * d + q] = laguerre_kernel(p, q, g1);
            h2[p * d + q] = laguerre_kernel(p, q, g2);
        }
    }
    let mut total = zero;
    for m in 0..d {
        if source[m] == zero {
            continue;
        }
        for l in 0..d {
            if source[l] == zero {
                continue;
            }
            let w = source[m].conj()
                * source[l]
                * (0.5 * (ln_factorial(l) - ln_factorial(m)) - 0.5 * (m + l) as f64 * core::f64::consts::LN_2).exp();
            let mut inner = zero;
            for j in 0..=m {
                let b = binomial(m as i64, j as i64);
                for k in 0..=l {
                    inner += h1[k * d + j] * h2[(l - k) * d + (m - j)] * b;
                }
            }
            total += w * inner;
        }
    }
    total * (-0.5 * (g1.norm_sqr() + g2.norm_sqr())).exp()
}

fn trace(state: &TwoModeState, g1: Complex64, g2: Complex64) -> Complex64 {
    let d = state.dim();
    let m = state.coeffs();
    let d1 = displacement_entries(g1, d);
    let d2 = displacement_entries(g2, d);
    let zero = Complex64::new(0.0, 0.0);
    // t = M D2^T, then chi = sum conj(M) .* (D1 t)
    let mut t = vec![zero; d * d];
    for j in 0..d {
        for i in 0..d - j {
            let a = m[j * d + i];
            if a == zero {
                continue;
            }
            for ip in 0..d {
                t[j * d + ip] += a * d2[ip * d + i];
            }
        }
    }
    let mut total = zero;
    for j in 0..d {
        for ip in 0..d - j {
            let a = m[j * d + ip];
            if a == zero {
                continue;
            }
            let mut s = zero;
            for jp in 0..d {
                s += d1[j * d + jp] * t[jp * d + ip];
            }
            total += a.conj() * s;
        }
    }
    total
}

/// `chi_psi(beta) = <psi|D(beta)|psi>` for a single-mode coefficient vector.
pub fn chi_single_mode(coeffs: &[Complex64], beta: Complex64) -> Complex64 {
    let d = coeffs.len();
    let dm = displacement_entries(beta, d);
    let mut total = Complex64::new(0.0, 0.0);
    for (mi, cm) in coeffs.iter().enumerate() {
        if cm.norm_sqr() == 0.0 {
            continue;
        }
        let row = &dm[mi * d..(mi + 1) * d];
        let s: Complex64 = row.iter().zip(coeffs).map(|(x, c)| x * c).sum();
        total += cm.conj() * s;
    }
    total
}

fn factorized(source: &[Complex64], g1: Complex64, g2: Complex64) -> Complex64 {
    let beta = (g1 + g2) / 2f64.sqrt();
    chi_single_mode(source, beta) * (-0.25 * (g1 - g2).norm_sqr()).exp()
}

/// `chi(g1, g2) = <D(g1) (x) D(g2)>` of a two-mode state.
pub fn chi_resource(state: &TwoModeState, g1: Complex64, g2: Complex64, method: ChiMethod) -> Result<Complex64> {
    match method {
        ChiMethod::Trace => Ok(trace(state, g1, g2)),
        ChiMethod::ClosedForm => {
            let source = state.source().ok_or(Error::MethodUnavailable("closed_form"))?;
            let origin = closed_form(source, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let deviation = (origin - 1.0).norm();
            if !(deviation <= 1e-8) {
                return Err(Error::SeriesDivergence { deviation });
            }
            Ok(closed_form(source, g1, g2))
        }
        ChiMethod::BeamSplitter => {
            let source = state.source().ok_or(Error::MethodUnavailable("beam_splitter"))?;
            Ok(factorized(source, g1, g2))
        }
    }
}

/// Beam-splitter route when the source coefficients are known, trace otherwise.
pub fn chi_resource_auto(state: &TwoModeState, g1: Complex64, g2: Complex64) -> Complex64 {
    match state.source() {
        Some(source) => factorized(source, g1, g2),
        None => trace(state, g1, g2),
    }
}

/// `(g1, g2)` sample points on a small grid, handy for cross-checks.
pub fn sample_points(count: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    while out.len() < count {
        let t = i as f64;
        let g1 = Complex64::new(0.9 * (0.7 * t).sin(), 0.6 * (1.3 * t + 0.4).cos());
        let g2 = Complex64::new(0.8 * (0.5 * t + 1.0).cos(), -0.7 * (0.9 * t).sin());
        out.push((g1, g2));
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Cutoff;
    use crate::states::{make_two_mode, ResourceSpec};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn input_normalization_and_limits() {
        for input in [InputSpec::coherent(c(1.0, -2.0)), InputSpec::squeezed(0.8, 0.3)] {
            assert_eq!(chi_input(&input, c(0.0, 0.0)), c(1.0, 0.0));
        }
        let g = c(0.4, -0.7);
        let v = chi_input(&InputSpec::squeezed(0.0, 1.1), g);
        assert_relative_eq!(v.re, (-0.5 * g.norm_sqr()).exp(), epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_input_against_trace() {
        let cut = Cutoff::with_nmax(60).unwrap();
        let alpha0 = c(1.0, 0.0);
        let coh = crate::states::make_single_mode(&ResourceSpec::displaced_fock(0, alpha0), &cut).unwrap();
        let g = c(0.0, 1.0);
        let oracle = chi_single_mode(coh.coeffs(), g);
        let v = chi_input(&InputSpec::coherent(alpha0), g);
        assert!((v - oracle).norm() < 1e-12);
        assert!((v - Complex64::from_polar((-0.5f64).exp(), 2.0)).norm() < 1e-14);
    }

    #[test]
    fn two_mode_vacuum() {
        let cut = Cutoff::with_nmax(8).unwrap();
        let vac = make_two_mode(&ResourceSpec::displaced_fock(0, c(0.0, 0.0)), &cut).unwrap();
        let g = c(0.3, 0.5);
        for method in [ChiMethod::Trace, ChiMethod::ClosedForm, ChiMethod::BeamSplitter] {
            let v = chi_resource(&vac, g, g, method).unwrap();
            assert_relative_eq!(v.re, (-g.norm_sqr()).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn methods_agree() {
        let spec = ResourceSpec::added(1, 1, c(1.0, 0.0));
        let cut = Cutoff::with_nmax(30).unwrap();
        let st = make_two_mode(&spec, &cut).unwrap();
        let (g1, g2) = (c(0.3, 0.1), c(0.0, -0.2));
        let a = chi_resource(&st, g1, g2, ChiMethod::ClosedForm).unwrap();
        let b = chi_resource(&st, g1, g2, ChiMethod::Trace).unwrap();
        let f = chi_resource(&st, g1, g2, ChiMethod::BeamSplitter).unwrap();
        assert!((a - b).norm() < 1e-8);
        assert!((f - b).norm() < 1e-12);
    }

    #[test]
    fn closed_form_needs_source() {
        let cut = Cutoff::with_nmax(2).unwrap();
        let mut m = alloc::vec![c(0.0, 0.0); 9];
        m[0] = c(1.0, 0.0);
        let st = TwoModeState::from_matrix(m, cut, 0.0).unwrap();
        assert_eq!(
            chi_resource(&st, c(0.1, 0.0), c(0.0, 0.0), ChiMethod::ClosedForm).unwrap_err(),
            Error::MethodUnavailable("closed_form")
        );
    }
}
