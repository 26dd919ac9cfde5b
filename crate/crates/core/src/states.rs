//! Displaced Fock states with photons added or subtracted, their f-deformed
//! versions, and the two-mode states obtained by mixing them with vacuum on a
//! balanced beam splitter.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{deformed_displacement, displacement_element, Cutoff, DeformationFn, DisplacementVariant};
use crate::special::{ln_binomial, ln_factorial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Operation {
    #[default]
    None,
    Add,
    Subtract,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::None => "none",
            Operation::Add => "add",
            Operation::Subtract => "sub",
        })
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s.trim() {
            "none" => Ok(Operation::None),
            "add" | "added" => Ok(Operation::Add),
            "sub" | "subtract" | "subtracted" => Ok(Operation::Subtract),
            other => Err(format!("unknown operation '{other}' (expected none, add or sub)")),
        }
    }
}

/// Parameters of a single-mode resource before the beam splitter:
/// `O^k D(alpha) |n>` with `O` the (deformed) creation or annihilation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceSpec {
    pub n: usize,
    pub k: usize,
    pub operation: Operation,
    pub alpha: Complex64,
    pub deformation: DeformationFn,
    pub variant: DisplacementVariant,
}

impl ResourceSpec {
    pub fn displaced_fock(n: usize, alpha: Complex64) -> Self {
        ResourceSpec {
            n,
            k: 0,
            operation: Operation::None,
            alpha,
            deformation: DeformationFn::Identity,
            variant: DisplacementVariant::default(),
        }
    }

    pub fn added(n: usize, k: usize, alpha: Complex64) -> Self {
        ResourceSpec { k, operation: Operation::Add, ..Self::displaced_fock(n, alpha) }
    }

    pub fn subtracted(n: usize, k: usize, alpha: Complex64) -> Self {
        ResourceSpec { k, operation: Operation::Subtract, ..Self::displaced_fock(n, alpha) }
    }

    /// `k = 0` collapses every operation to the plain displaced Fock state.
    pub fn new(n: usize, k: usize, operation: Operation, alpha: Complex64) -> Self {
        ResourceSpec { k, operation, ..Self::displaced_fock(n, alpha) }
    }

    pub fn with_deformation(mut self, f: DeformationFn) -> Self {
        self.deformation = f;
        self
    }

    pub fn with_variant(mut self, v: DisplacementVariant) -> Self {
        self.variant = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.operation == Operation::None && self.k != 0 {
            return Err(Error::InvalidResource("operation none requires k = 0"));
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::InvalidResource("alpha must be finite"));
        }
        self.deformation.validate()
    }

    /// Short column label such as `add_n1_k2`.
    pub fn label(&self) -> String {
        format!("{}_n{}_k{}", self.operation, self.n, self.k)
    }
}

/// Cutoff used when none is given: `max(40, ceil((|alpha| + 3)^2) + n + k + 15)`.
pub fn default_cutoff(spec: &ResourceSpec) -> Cutoff {
    let a = spec.alpha.norm() + 3.0;
    let nmax = ((a * a).ceil() as usize + spec.n + spec.k + 15).max(40);
    Cutoff::with_nmax(nmax).expect("default cutoff is valid")
}

/// Normalized single-mode coefficient vector on `0..=nmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    coeffs: Vec<Complex64>,
    cutoff: Cutoff,
    tail_mass: f64,
    resource: Option<ResourceSpec>,
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

impl SingleModeState {
    /// Wraps and normalizes an explicit coefficient vector of length `nmax + 1`.
    pub fn from_coefficients(coeffs: Vec<Complex64>, cutoff: Cutoff) -> Result<Self> {
        if coeffs.len() != cutoff.dim() {
            return Err(Error::DimensionMismatch { left: cutoff.dim(), right: coeffs.len() });
        }
        let norm = norm_sqr(&coeffs);
        if !norm.is_finite() {
            return Err(Error::InvalidState("coefficients are not finite"));
        }
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let s = 1.0 / norm.sqrt();
        Ok(SingleModeState {
            coeffs: coeffs.into_iter().map(|c| c * s).collect(),
            cutoff,
            tail_mass: 0.0,
            resource: None,
        })
    }

    /// Records the weight known to lie above the cutoff (for states read back from files).
    pub fn with_tail_mass(mut self, tail_mass: f64) -> Self {
        self.tail_mass = tail_mass;
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Probability weight the untruncated state carries above `nmax`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn resource(&self) -> Option<&ResourceSpec> {
        self.resource.as_ref()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(m, c)| m as f64 * c.norm_sqr()).sum()
    }
}

// Unnormalized coefficients <m| O^k D |n> for m < len. With `exact_len` the
// number of leading entries that are free of truncation effects.
fn raw_coefficients(spec: &ResourceSpec, len: usize) -> Result<(Vec<Complex64>, usize)> {
    let zero = Complex64::new(0.0, 0.0);
    let k = spec.k;
    if spec.deformation.is_identity() {
        // closed forms, exact at every index
        let mut out = vec![zero; len];
        for (m, c) in out.iter_mut().enumerate() {
            *c = match spec.operation {
                Operation::None => displacement_element(m, spec.n, spec.alpha),
                Operation::Add if m < k => zero,
                Operation::Add => {
                    let r = (0.5 * (ln_factorial(m) - ln_factorial(m - k))).exp();
                    displacement_element(m - k, spec.n, spec.alpha) * r
                }
                Operation::Subtract => {
                    let r = (0.5 * (ln_factorial(m + k) - ln_factorial(m))).exp();
                    displacement_element(m + k, spec.n, spec.alpha) * r
                }
            };
        }
        return Ok((out, len));
    }
    if spec.n >= len {
        return Err(Error::InvalidCutoff("cutoff below the Fock parameter n"));
    }
    let cut = Cutoff::with_nmax(len - 1)?;
    let d = deformed_displacement(spec.alpha, &spec.deformation, spec.variant, &cut)?;
    let mut v: Vec<Complex64> = (0..len).map(|m| d.get(m, spec.n)).collect();
    let mut exact = len;
    for _ in 0..k {
        match spec.operation {
            Operation::None => {}
            Operation::Add => {
                // A^dag |m> = sqrt(m+1) f(m+1) |m+1>, the top level falls off
                for m in (1..len).rev() {
                    v[m] = v[m - 1] * spec.deformation.lowering_factor(m)?;
                }
                v[0] = zero;
            }
            Operation::Subtract => {
                for m in 0..len - 1 {
                    v[m] = v[m + 1] * spec.deformation.lowering_factor(m + 1)?;
                }
                v[len - 1] = zero;
                exact -= 1;
            }
        }
    }
    Ok((v, exact))
}

fn build(spec: &ResourceSpec, cutoff: &Cutoff, enforce_tail: bool) -> Result<SingleModeState> {
    spec.validate()?;
    let dim = cutoff.dim();
    if spec.n > cutoff.nmax() {
        return Err(Error::InvalidCutoff("cutoff below the Fock parameter n"));
    }
    let ext_len = 2 * dim + spec.k;
    let (raw, exact) = raw_coefficients(spec, ext_len)?;
    let head = &raw[..dim];
    let head_norm = norm_sqr(head);
    if !head_norm.is_finite() {
        return Err(Error::InvalidState("coefficients overflow on this cutoff"));
    }
    let tail_norm = norm_sqr(&raw[dim..exact]);
    if head_norm == 0.0 && tail_norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let tail = if tail_norm.is_finite() { tail_norm / (head_norm + tail_norm) } else { 1.0 };
    if enforce_tail && tail > cutoff.tail_tol() {
        return Err(Error::TailMassExceeded { tail, tol: cutoff.tail_tol(), nmax: cutoff.nmax() });
    }
    if head_norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let mut state = SingleModeState::from_coefficients(head.to_vec(), *cutoff)?;
    state.tail_mass = tail;
    state.resource = Some(spec.clone());
    Ok(state)
}

/// Builds the normalized resource state, rejecting it if more than
/// `cutoff.tail_tol()` of its weight lies above `nmax`.
pub fn make_single_mode(spec: &ResourceSpec, cutoff: &Cutoff) -> Result<SingleModeState> {
    build(spec, cutoff, true)
}

/// Same as [`make_single_mode`] but keeps whatever the cutoff retains and only
/// records the tail mass. Needed for deformations whose untruncated state is
/// not normalizable.
pub fn make_single_mode_truncated(spec: &ResourceSpec, cutoff: &Cutoff) -> Result<SingleModeState> {
    build(spec, cutoff, false)
}

/// Normalized two-mode amplitudes `M[j][i]` of `|j, i>`, stored row-major on a
/// `(nmax+1) x (nmax+1)` grid and supported on `j + i <= nmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    dim: usize,
    coeffs: Vec<Complex64>,
    cutoff: Cutoff,
    tail_mass: f64,
    source: Option<Vec<Complex64>>,
    resource: Option<ResourceSpec>,
}

impl TwoModeState {
    /// Wraps and normalizes a row-major amplitude matrix.
    pub fn from_matrix(coeffs: Vec<Complex64>, cutoff: Cutoff, tail_mass: f64) -> Result<Self> {
        let dim = cutoff.dim();
        if coeffs.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: dim * dim, right: coeffs.len() });
        }
        for j in 0..dim {
            for i in 0..dim {
                if j + i > cutoff.nmax() && coeffs[j * dim + i] != Complex64::new(0.0, 0.0) {
                    return Err(Error::InvalidState("amplitude outside the band j + i <= nmax"));
                }
            }
        }
        let norm = norm_sqr(&coeffs);
        if !norm.is_finite() {
            return Err(Error::InvalidState("coefficients are not finite"));
        }
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let s = 1.0 / norm.sqrt();
        Ok(TwoModeState {
            dim,
            coeffs: coeffs.into_iter().map(|c| c * s).collect(),
            cutoff,
            tail_mass,
            source: None,
            resource: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.coeffs[j * self.dim + i]
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Single-mode coefficients that were beam-split into this state, if known.
    pub fn source(&self) -> Option<&[Complex64]> {
        self.source.as_deref()
    }

    pub fn resource(&self) -> Option<&ResourceSpec> {
        self.resource.as_ref()
    }
}

/// `|m>|0> -> sum_j sqrt(C(m, j)) / 2^{m/2} |j, m-j>`
pub fn beam_split(s: &SingleModeState) -> TwoModeState {
    let dim = s.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (m, c) in s.coeffs().iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..=m {
            let w = (0.5 * ln_binomial(m, j) - 0.5 * m as f64 * core::f64::consts::LN_2).exp();
            coeffs[j * dim + (m - j)] = c * w;
        }
    }
    let mut out = TwoModeState::from_matrix(coeffs, *s.cutoff(), s.tail_mass())
        .expect("beam splitter keeps the band and the norm");
    out.source = Some(s.coeffs().to_vec());
    out.resource = s.resource().cloned();
    out
}

/// `make_single_mode` followed by `beam_split`.
pub fn make_two_mode(spec: &ResourceSpec, cutoff: &Cutoff) -> Result<TwoModeState> {
    Ok(beam_split(&make_single_mode(spec, cutoff)?))
}
