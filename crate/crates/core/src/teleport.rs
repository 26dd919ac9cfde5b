//! Ideal Braunstein-Kimble teleportation fidelity.
//!
//! The fidelity is `F = (1/pi) int d^2g chi_in(g) chi_out(-g)` with
//! `chi_out(g) = chi_in(g) chi_res(g^*, g)`. It is evaluated either by a tensor
//! Gauss-Hermite rule or by the closed double series over the resource
//! coefficients, `F = sum_{m,l} conj(C_m) C_l W(m, l)`, where the kernel `W`
//! depends only on the input state.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::charfun::{chi_input, chi_resource_auto, chi_single_mode, InputSpec};
use crate::error::{Error, Result};
use crate::fock::Cutoff;
use crate::quadrature::GaussHermite;
use crate::special::ln_factorial;
use crate::states::{make_single_mode, make_two_mode, ResourceSpec, TwoModeState};

pub const QUADRATURE_START_NODES: usize = 96;
pub const QUADRATURE_MAX_NODES: usize = 384;
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const IMAG_TOL: f64 = 1e-8;
pub const SERIES_EXTRA_LEVELS: usize = 20;
pub const SERIES_DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Series: number of `(m, l)` pairs. Quadrature: nodes per axis of the final rule.
    pub terms: usize,
    /// Series: drift under a cutoff extension. Quadrature: change under node doubling.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityResult {
    pub value: f64,
    pub method: FidelityMethod,
    pub input: InputSpec,
    pub resource: Option<ResourceSpec>,
    pub convergence: Convergence,
}

fn check_value(z: Complex64) -> Result<f64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::OutOfRange { value: f64::NAN });
    }
    if z.im.abs() > IMAG_TOL {
        return Err(Error::NonRealResult { imag: z.im });
    }
    if z.re < -1e-9 || z.re > 1.0 + 1e-9 {
        return Err(Error::OutOfRange { value: z.re });
    }
    Ok(z.re)
}

/// `chi_in(g) chi_res(g^*, g)`
pub fn chi_output(input: &InputSpec, resource: &TwoModeState, gamma: Complex64) -> Complex64 {
    chi_input(input, gamma) * chi_resource_auto(resource, gamma.conj(), gamma)
}

// Rotation and per-axis widths that turn the input envelope
// chi_in(g) chi_in(-g) e^{-|g|^2} into e^{-u^2 - v^2}.
fn envelope(input: &InputSpec) -> (Complex64, f64, f64) {
    match *input {
        InputSpec::Coherent { .. } => (Complex64::new(1.0, 0.0), 2f64.sqrt(), 2f64.sqrt()),
        InputSpec::Squeezed { r, zeta } => (
            Complex64::from_polar(1.0, 0.5 * zeta),
            (1.0 + (2.0 * r).exp()).sqrt(),
            (1.0 + (-2.0 * r).exp()).sqrt(),
        ),
    }
}

/// One tensor Gauss-Hermite estimate of the fidelity integral (complex, so the
/// imaginary residue can be inspected). Returns the estimate and the number of
/// integrand evaluations.
pub fn quadrature_estimate(input: &InputSpec, resource: &TwoModeState, rule: &GaussHermite) -> (Complex64, usize) {
    let (rot, su, sv) = envelope(input);
    let scale = 1.0 / (core::f64::consts::PI * su * sv);
    // On the fidelity line the factorized resource function only depends on
    // sqrt(2) Re g, so values repeat along grid lines; cache them.
    let mut cache: BTreeMap<u64, Complex64> = BTreeMap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    for (u, wu) in rule.nodes.iter().zip(&rule.total_weights) {
        for (v, wv) in rule.nodes.iter().zip(&rule.total_weights) {
            let g = rot * Complex64::new(u / su, v / sv);
            let cin = chi_input(input, g);
            let cin_neg = chi_input(input, -g);
            let w = wu * wv * scale;
            if (cin * cin_neg).norm() * w < 1e-20 {
                continue;
            }
            evals += 1;
            let h = -g;
            let res = match resource.source() {
                Some(source) => {
                    let beta = -(2f64.sqrt()) * g.re;
                    let chi = *cache
                        .entry(beta.to_bits())
                        .or_insert_with(|| chi_single_mode(source, Complex64::new(beta, 0.0)));
                    chi * (-g.im * g.im).exp()
                }
                None => chi_resource_auto(resource, h.conj(), h),
            };
            total += cin * cin_neg * res * w;
        }
    }
    (total, evals)
}

/// Fidelity by tensor Gauss-Hermite quadrature on the rotated and rescaled
/// plane, doubling the node count from 96 until two estimates agree to 1e-8
/// (at most 384 nodes per axis).
pub fn fidelity_quadrature(input: &InputSpec, resource: &TwoModeState) -> Result<FidelityResult> {
    input.validate()?;
    let mut nodes = QUADRATURE_START_NODES;
    let (mut prev, _) = quadrature_estimate(input, resource, &GaussHermite::new(nodes));
    loop {
        let next_nodes = nodes * 2;
        if next_nodes > QUADRATURE_MAX_NODES {
            return Err(Error::NonConvergent { change: f64::NAN, nodes });
        }
        let (est, _) = quadrature_estimate(input, resource, &GaussHermite::new(next_nodes));
        let change = (est - prev).norm();
        nodes = next_nodes;
        if change < QUADRATURE_TOL {
            let value = check_value(est)?;
            return Ok(FidelityResult {
                value,
                method: FidelityMethod::Quadrature,
                input: *input,
                resource: resource.resource().cloned(),
                convergence: Convergence { terms: nodes, estimated_error: change },
            });
        }
        if nodes == QUADRATURE_MAX_NODES {
            return Err(Error::NonConvergent { change, nodes });
        }
        prev = est;
    }
}

/// The series kernel `W(m, l)` for one input state, valid for any resource
/// whose coefficient vector is no longer than `dim`.
///
/// The kernel sums alternate strongly once `m` and `l` pass a few dozen, so
/// they are accumulated in double-double arithmetic and rounded at the end.
#[derive(Debug, Clone)]
pub struct SeriesKernel {
    dim: usize,
    input: InputSpec,
    w: Vec<Complex64>,
    // rounding bound per entry: unit roundoff times the sum of term magnitudes
    err: Vec<f64>,
}

// Unit roundoff of double-double arithmetic, with some slack for the few
// operations that build each term.
const DD_EPS: f64 = 8.0 * 4.93e-32;

/// Largest kernel dimension whose intermediate terms stay inside the f64 range.
pub const MAX_KERNEL_DIM: usize = 120;

type Dd = TwoFloat;

fn dd_zero() -> Dd {
    Dd::from(0.0)
}

fn pow2(e: i64) -> f64 {
    libm::scalbn(1.0, e as i32)
}

// Pascal's triangle up to row n.
struct Binomials {
    n: usize,
    rows: Vec<Dd>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let w = n + 1;
        let mut rows = vec![dd_zero(); w * w];
        for i in 0..=n {
            rows[i * w] = Dd::from(1.0);
            for k in 1..=i {
                rows[i * w + k] = rows[(i - 1) * w + k - 1] + rows[(i - 1) * w + k];
            }
        }
        Binomials { n, rows }
    }

    fn get(&self, n: i64, k: i64) -> Dd {
        if n < 0 || k < 0 || k > n {
            return dd_zero();
        }
        debug_assert!(n as usize <= self.n);
        self.rows[n as usize * (self.n + 1) + k as usize]
    }
}

// p!/q!
fn factorial_ratio(p: i64, q: i64) -> Dd {
    let mut acc = Dd::from(1.0);
    if p >= q {
        for i in q + 1..=p {
            acc = acc * i as f64;
        }
        acc
    } else {
        for i in p + 1..=q {
            acc = acc * i as f64;
        }
        Dd::from(1.0) / acc
    }
}

impl SeriesKernel {
    /// Kernel for a coherent input (any amplitude). Entry `(m, l)` is
    ///
    /// `(-1)^{m-l} sqrt(l!/m!) / 2^{m+1} sum_j C(m,j) sum_{r,s} C(j, j+(l-m)/2-r)
    ///  C(m-j, (l+m)/2-j-s) (-1)^{r+s} ((m-l)/2+r+s)! / (2^{r+s} r! s!)`
    ///
    /// with every term vanishing when `m + l` is odd or an index leaves its range.
    /// The sums over `j` and over `r` at fixed `q = r + s` are Vandermonde
    /// convolutions, which leaves
    ///
    /// `sqrt(l!/m!) / 2^{m+1} sum_q (-1)^q 2^{l-2q} C(2q-2h, q-h) C(m, l-q) (q-h)!/q!`
    ///
    /// with `h = (l-m)/2`.
    ///
    /// # Panics
    /// If `dim` exceeds [`MAX_KERNEL_DIM`].
    pub fn coherent(dim: usize) -> Self {
        assert!(dim <= MAX_KERNEL_DIM, "series kernel dimension {dim} too large");
        let binom = Binomials::new(2 * dim);
        let mut w = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut err = vec![0.0; dim * dim];
        for m in 0..dim as i64 {
            for l in (m % 2..dim as i64).step_by(2) {
                let h = (l - m) / 2;
                let q0 = 0.max(l - m).max(h);
                let mut ratio = factorial_ratio(q0 - h, q0);
                let mut acc = dd_zero();
                let mut mag = 0.0;
                for q in q0..=l {
                    if q > q0 {
                        ratio = ratio * (q - h) as f64 / q as f64;
                    }
                    let term = binom.get(2 * q - 2 * h, q - h) * binom.get(m, l - q) * ratio * pow2(l - 2 * q);
                    mag += f64::from(term);
                    if q % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                let pre = (0.5 * (ln_factorial(l as usize) - ln_factorial(m as usize))
                    - (m + 1) as f64 * core::f64::consts::LN_2)
                    .exp();
                let idx = (m * dim as i64 + l) as usize;
                w[idx] = Complex64::new(pre * f64::from(acc), 0.0);
                err[idx] = pre * mag * (l + 1) as f64 * DD_EPS;
            }
        }
        SeriesKernel { dim, input: InputSpec::coherent(Complex64::new(0.0, 0.0)), w, err }
    }

    /// Kernel for a squeezed-vacuum input `r e^{i zeta}`. Entry `(m, l)` is
    ///
    /// `(-1)^{m-l} sqrt(l!/m!) / (2^{(m+l)/2} 2 cosh r) sum_{j<=m, k<=l} C(m,j)
    ///  sum_{r',s} C(j,k-r') C(m-j,l-k-s) (-1)^{r'+s} / (r'! s!) Phi(a, b)`
    ///
    /// with `a = m-l+k-j+r'+s`, `b = j-k+r'+s` and
    ///
    /// `Phi(a, b) = e^{i zeta (a-b)/2} sum_t C(b,t) 2^{-t} (-tanh(r)/2)^{(a+b)/2-t}
    ///  a!/(a-t)!! (b-t-1)!!`
    ///
    /// restricted to `a - t` and `b - t` even.
    ///
    /// `a` and `b` only depend on `d = k - j` and `q = r' + s`, and the remaining
    /// sums over `j` and `r'` collapse (multinomial and Vandermonde identities).
    /// With `Q = (a+b)/2` and `u = m - l` the entry becomes
    ///
    /// `sqrt(l!/m!) / (2^{(m+l)/2} 2 cosh r) sum_{q,d} (-1)^q 2^{l-q} C(m,l-q)
    ///  C(2Q,Q) Q!/q! e^{i zeta (u/2+d)} Xi(a, b)`
    ///
    /// where `Xi(a,b) = sum_t C(Q,t) C(Q-t,(a-t)/2) 2^{-t} (-tanh(r)/4)^{Q-t}`.
    ///
    /// # Panics
    /// If `dim` exceeds [`MAX_KERNEL_DIM`].
    pub fn squeezed(r: f64, zeta: f64, dim: usize) -> Self {
        assert!(dim <= MAX_KERNEL_DIM, "series kernel dimension {dim} too large");
        let n = 2 * dim;
        let binom = Binomials::new(n);
        let kappa = -r.tanh() / 4.0;
        let mut kpow = Vec::with_capacity(n);
        kpow.push(Dd::from(1.0));
        for e in 1..n {
            let prev: Dd = kpow[e - 1];
            kpow.push(prev * kappa);
        }
        // xi[a * n + b]
        let mut xi = vec![dd_zero(); n * n];
        for a in 0..n {
            for b in (a % 2..n).step_by(2) {
                let big_q = (a + b) / 2;
                let mut acc = dd_zero();
                let mut t = a % 2;
                while t <= a.min(b) {
                    let c = binom.get(big_q as i64, t as i64) * binom.get((big_q - t) as i64, ((a - t) / 2) as i64);
                    acc += c * kpow[big_q - t] * pow2(-(t as i64));
                    t += 2;
                }
                xi[a * n + b] = acc;
            }
        }

        let (zr, zi) = (Dd::from(zeta.cos()), Dd::from(zeta.sin()));
        let norm = 1.0 / (2.0 * r.cosh());
        let mut w = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut err = vec![0.0; dim * dim];
        let mut c: Vec<Dd> = Vec::new();
        for m in 0..dim as i64 {
            for l in (m % 2..dim as i64).step_by(2) {
                let u = m - l;
                let q0 = 0.max(-u);
                let mut ratio = factorial_ratio(q0 + u / 2, q0);
                // c[d + m] = sum_q of the terms at fixed d
                c.clear();
                c.resize((m + l + 1) as usize, dd_zero());
                let mut mag = 0.0;
                for q in q0..=l {
                    if q > q0 {
                        ratio = ratio * (q + u / 2) as f64 / q as f64;
                    }
                    let big_q = q + u / 2;
                    let mut amp = binom.get(2 * big_q, big_q) * binom.get(m, l - q) * ratio * pow2(l - q);
                    if q % 2 == 1 {
                        amp = -amp;
                    }
                    for d in -(u + q)..=q {
                        let (a, b) = ((u + d + q) as usize, (q - d) as usize);
                        let t = amp * xi[a * n + b];
                        mag += f64::from(t).abs();
                        c[(d + m) as usize] += t;
                    }
                }
                // sum_i c_i z^i by Horner
                let (mut sr, mut si) = (dd_zero(), dd_zero());
                for ci in c.iter().rev() {
                    let nr = sr * zr - si * zi + *ci;
                    si = sr * zi + si * zr;
                    sr = nr;
                }
                // z^i = e^{i zeta d} e^{i zeta m}, and the u/2 phase
                let phase = Complex64::from_polar(1.0, -0.5 * zeta * (m + l) as f64);
                let pre = (0.5 * (ln_factorial(l as usize) - ln_factorial(m as usize))
                    - 0.5 * (m + l) as f64 * core::f64::consts::LN_2)
                    .exp()
                    * norm;
                let idx = (m * dim as i64 + l) as usize;
                w[idx] = Complex64::new(f64::from(sr), f64::from(si)) * phase * pre;
                err[idx] = pre * mag * (2 * (m + l) + 4) as f64 * DD_EPS;
            }
        }
        SeriesKernel { dim, input: InputSpec::squeezed(r, zeta), w, err }
    }

    /// Kernel matching an input specification.
    pub fn for_input(input: &InputSpec, dim: usize) -> Self {
        match *input {
            InputSpec::Coherent { .. } => SeriesKernel::coherent(dim),
            InputSpec::Squeezed { r, zeta } => SeriesKernel::squeezed(r, zeta, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether this kernel serves `input` (coherent kernels ignore the amplitude).
    pub fn matches(&self, input: &InputSpec) -> bool {
        match (self.input, *input) {
            (InputSpec::Coherent { .. }, InputSpec::Coherent { .. }) => true,
            (InputSpec::Squeezed { r: a, zeta: b }, InputSpec::Squeezed { r: c, zeta: d }) => a == c && b == d,
            _ => false,
        }
    }

    pub fn entry(&self, m: usize, l: usize) -> Complex64 {
        self.w[m * self.dim + l]
    }

    /// Bound on the rounding error of [`entry`](Self::entry). It grows roughly
    /// like `4^{(m+l)/2}` relative to the entry and passes 1e-10 somewhere
    /// around `m = l = 80`.
    pub fn entry_error(&self, m: usize, l: usize) -> f64 {
        self.err[m * self.dim + l]
    }

    /// `sum_{m,l} |C_m| |C_l| err(m, l)`: how far rounding in the kernel can
    /// move the series for these coefficients.
    pub fn rounding_bound(&self, coeffs: &[Complex64]) -> f64 {
        let n = coeffs.len().min(self.dim);
        let mut total = 0.0;
        for m in 0..n {
            let row = &self.err[m * self.dim..m * self.dim + n];
            let s: f64 = row.iter().zip(coeffs).map(|(e, cl)| e * cl.norm()).sum();
            total += coeffs[m].norm() * s;
        }
        total
    }

    /// `sum_{m,l} conj(C_m) C_l W(m, l)` (complex, unchecked).
    pub fn evaluate_raw(&self, coeffs: &[Complex64]) -> Result<Complex64> {
        if coeffs.len() > self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: coeffs.len() });
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, cm) in coeffs.iter().enumerate() {
            if cm.norm_sqr() == 0.0 {
                continue;
            }
            let row = &self.w[m * self.dim..m * self.dim + coeffs.len()];
            let s: Complex64 = row.iter().zip(coeffs).map(|(w, cl)| w * cl).sum();
            total += cm.conj() * s;
        }
        Ok(total)
    }

    /// Fidelity for a normalized coefficient vector.
    pub fn evaluate(&self, coeffs: &[Complex64]) -> Result<f64> {
        check_value(self.evaluate_raw(coeffs)?)
    }
}

/// Series fidelity of `spec` with the convergence check: the resource is
/// rebuilt on a cutoff 20 levels higher and the two values must agree to 1e-8.
pub fn fidelity_series_with(kernel: &SeriesKernel, spec: &ResourceSpec, cutoff: &Cutoff) -> Result<FidelityResult> {
    let ext = cutoff.extended(SERIES_EXTRA_LEVELS);
    if kernel.dim() < ext.dim() {
        return Err(Error::DimensionMismatch { left: kernel.dim(), right: ext.dim() });
    }
    let state = make_single_mode(spec, cutoff)?;
    let value = kernel.evaluate(state.coeffs())?;
    let wider = make_single_mode(spec, &ext)?;
    // kernel rounding counts against the same budget as truncation
    let drift = (kernel.evaluate(wider.coeffs())? - value).abs() + kernel.rounding_bound(wider.coeffs());
    if !(drift <= SERIES_DRIFT_TOL) {
        return Err(Error::SeriesNotConverged { drift });
    }
    Ok(FidelityResult {
        value,
        method: FidelityMethod::Series,
        input: kernel.input,
        resource: Some(spec.clone()),
        convergence: Convergence { terms: cutoff.dim() * cutoff.dim(), estimated_error: drift },
    })
}

fn kernel_dim(cutoff: &Cutoff) -> Result<usize> {
    let dim = cutoff.extended(SERIES_EXTRA_LEVELS).dim();
    if dim > MAX_KERNEL_DIM {
        return Err(Error::InvalidCutoff("cutoff too large for the series kernel"));
    }
    Ok(dim)
}

/// Closed-series fidelity for a coherent input.
pub fn fidelity_series_coherent(spec: &ResourceSpec, cutoff: &Cutoff) -> Result<FidelityResult> {
    kernel_dim(cutoff)?;
    let kernel = SeriesKernel::coherent(cutoff.extended(SERIES_EXTRA_LEVELS).dim());
    fidelity_series_with(&kernel, spec, cutoff)
}

/// Closed-series fidelity for a squeezed-vacuum input `r e^{i zeta}`.
pub fn fidelity_series_squeezed(spec: &ResourceSpec, r: f64, zeta: f64, cutoff: &Cutoff) -> Result<FidelityResult> {
    InputSpec::squeezed(r, zeta).validate()?;
    kernel_dim(cutoff)?;
    let kernel = SeriesKernel::squeezed(r, zeta, cutoff.extended(SERIES_EXTRA_LEVELS).dim());
    fidelity_series_with(&kernel, spec, cutoff)
}

/// Either method for a resource specification.
pub fn fidelity(input: &InputSpec, spec: &ResourceSpec, cutoff: &Cutoff, method: FidelityMethod) -> Result<FidelityResult> {
    input.validate()?;
    match method {
        FidelityMethod::Series => match *input {
            InputSpec::Coherent { .. } => fidelity_series_coherent(spec, cutoff),
            InputSpec::Squeezed { r, zeta } => fidelity_series_squeezed(spec, r, zeta, cutoff),
        },
        FidelityMethod::Quadrature => fidelity_quadrature(input, &make_two_mode(spec, cutoff)?),
    }
}
