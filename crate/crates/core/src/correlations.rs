//! Entanglement entropy and EPR-type quadrature variances of two-mode pure
//! states.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::binomial;
use crate::states::TwoModeState;

/// How the squared Schmidt coefficients are extracted from the coefficient
/// matrix `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchmidtMethod {
    /// Eigenvalues of the reduced matrix `M M^dagger`.
    #[default]
    ReducedEigen,
    /// Squared singular values of `M`.
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub entropy_nats: f64,
    pub var_xminus: f64,
    pub var_pplus: f64,
    /// Squared Schmidt coefficients, largest first.
    pub schmidt_spectrum: Vec<f64>,
}

impl CorrelationReport {
    pub fn entropy_bits(&self) -> f64 {
        self.entropy_nats / core::f64::consts::LN_2
    }
}

// Smallest square block holding every nonzero amplitude.
fn occupied(state: &TwoModeState) -> usize {
    let dim = state.dim();
    let mut used = 0;
    for j in 0..dim {
        for i in 0..dim {
            if state.get(j, i) != Complex64::new(0.0, 0.0) {
                used = used.max(j + 1).max(i + 1);
            }
        }
    }
    used.max(1)
}

fn coefficient_matrix(state: &TwoModeState) -> DMatrix<Complex64> {
    let d = occupied(state);
    DMatrix::from_fn(d, d, |j, i| state.get(j, i))
}

fn clean_spectrum(mut values: Vec<f64>) -> Vec<f64> {
    for v in values.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Squared Schmidt coefficients of the state, largest first.
pub fn schmidt_spectrum(state: &TwoModeState, method: SchmidtMethod) -> Vec<f64> {
    let m = coefficient_matrix(state);
    let values: Vec<f64> = match method {
        SchmidtMethod::ReducedEigen => {
            let rho = &m * m.adjoint();
            rho.symmetric_eigenvalues().iter().copied().collect()
        }
        SchmidtMethod::Singular => m.singular_values().iter().map(|s| s * s).collect(),
    };
    clean_spectrum(values)
}

/// `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn von_neumann(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum();
    s.max(0.0)
}

/// Entropy of either reduced state (nats) together with the spectrum it came from.
pub fn entanglement_entropy(state: &TwoModeState) -> (f64, Vec<f64>) {
    let spec = schmidt_spectrum(state, SchmidtMethod::ReducedEigen);
    (von_neumann(&spec), spec)
}

/// The closed expansion of the entropy in the single-mode coefficients,
///
/// `-sum_{m,l} sum_{j<=m} x ln x`, `x = |C_m C_l| / 2^{(m+l)/2} sqrt(C(m,j) C(l, l-m+j))`,
///
/// summed literally. It is not the entropy in general; it is kept so the two
/// can be compared.
pub fn entropy_expansion(coeffs: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for (m, cm) in coeffs.iter().enumerate() {
        let am = cm.norm();
        if am == 0.0 {
            continue;
        }
        for (l, cl) in coeffs.iter().enumerate() {
            let al = cl.norm();
            if al == 0.0 {
                continue;
            }
            let scale = am * al / 2f64.powf(0.5 * (m + l) as f64);
            for j in 0..=m as i64 {
                let b = binomial(m as i64, j) * binomial(l as i64, l as i64 - m as i64 + j);
                if b == 0.0 {
                    continue;
                }
                let x = scale * b.sqrt();
                if x > 0.0 {
                    total -= x * x.ln();
                }
            }
        }
    }
    total
}

// Ladder moments needed for the joint variances.
#[derive(Debug, Default)]
struct Moments {
    a1: Complex64,
    a2: Complex64,
    a1a1: Complex64,
    a2a2: Complex64,
    a1a2: Complex64,
    n1: f64,
    n2: f64,
    a1d_a2: Complex64,
}

fn moments(state: &TwoModeState) -> Moments {
    let d = state.dim();
    let at = |j: usize, i: usize| if j < d && i < d { state.get(j, i) } else { Complex64::new(0.0, 0.0) };
    let mut mo = Moments::default();
    for j in 0..d {
        for i in 0..d {
            let c = state.get(j, i);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (fj, fi) = (j as f64, i as f64);
            mo.n1 += fj * c.norm_sqr();
            mo.n2 += fi * c.norm_sqr();
            // <psi| a |psi> picks the amplitude one level lower
            if j >= 1 {
                mo.a1 += at(j - 1, i).conj() * c * fj.sqrt();
            }
            if i >= 1 {
                mo.a2 += at(j, i - 1).conj() * c * fi.sqrt();
            }
            if j >= 2 {
                mo.a1a1 += at(j - 2, i).conj() * c * (fj * (fj - 1.0)).sqrt();
            }
            if i >= 2 {
                mo.a2a2 += at(j, i - 2).conj() * c * (fi * (fi - 1.0)).sqrt();
            }
            if j >= 1 && i >= 1 {
                mo.a1a2 += at(j - 1, i - 1).conj() * c * (fj * fi).sqrt();
            }
            // a1^dagger a2 |j, i> = sqrt((j+1) i) |j+1, i-1>
            if i >= 1 {
                mo.a1d_a2 += at(j + 1, i - 1).conj() * c * ((fj + 1.0) * fi).sqrt();
            }
        }
    }
    mo
}

/// `(Delta(x1 - x2)^2, Delta(p1 + p2)^2)` with `x = (a + a^dagger)/sqrt2` and
/// `p = (a - a^dagger)/(i sqrt2)`. Both equal 1 for the vacuum.
pub fn epr_variance(state: &TwoModeState) -> Result<(f64, f64)> {
    let tol = state.cutoff().tail_tol();
    if state.tail_mass() > tol {
        return Err(Error::TailMassExceeded { tail: state.tail_mass(), tol, nmax: state.cutoff().nmax() });
    }
    let mo = moments(state);
    let cross = mo.n1 + mo.n2;
    // u = a1 - a2, v = a1 + a2
    let u = mo.a1 - mo.a2;
    let uu = mo.a1a1 - 2.0 * mo.a1a2 + mo.a2a2;
    let udu = cross - 2.0 * mo.a1d_a2.re;
    let v = mo.a1 + mo.a2;
    let vv = mo.a1a1 + 2.0 * mo.a1a2 + mo.a2a2;
    let vdv = cross + 2.0 * mo.a1d_a2.re;
    let var_x = uu.re + udu + 1.0 - 2.0 * u.re * u.re;
    let var_p = -vv.re + vdv + 1.0 - 2.0 * v.im * v.im;
    Ok((var_x, var_p))
}

pub fn correlation_report(state: &TwoModeState) -> Result<CorrelationReport> {
    let (var_xminus, var_pplus) = epr_variance(state)?;
    let (entropy_nats, schmidt_spectrum) = entanglement_entropy(state);
    Ok(CorrelationReport { entropy_nats, var_xminus, var_pplus, schmidt_spectrum })
}
