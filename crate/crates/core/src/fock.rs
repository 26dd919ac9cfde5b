//! Truncated Fock space: cutoffs, ladder operators and displacement operators.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{laguerre_sequence, ln_factorial};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Photon-number truncation `0..=nmax` together with the tail tolerance used
/// when building states on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    nmax: usize,
    tail_tol: f64,
}

impl Cutoff {
    pub fn new(nmax: usize, tail_tol: f64) -> Result<Self> {
        if nmax == 0 {
            return Err(Error::InvalidCutoff("nmax must be at least 1"));
        }
        if !(0.0..1.0).contains(&tail_tol) {
            return Err(Error::InvalidCutoff("tail tolerance must lie in [0, 1)"));
        }
        Ok(Cutoff { nmax, tail_tol })
    }

    pub fn with_nmax(nmax: usize) -> Result<Self> {
        Cutoff::new(nmax, DEFAULT_TAIL_TOL)
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Number of basis states, `nmax + 1`.
    pub fn dim(&self) -> usize {
        self.nmax + 1
    }

    /// Same tolerance, `extra` more levels.
    pub fn extended(&self, extra: usize) -> Cutoff {
        Cutoff { nmax: self.nmax + extra, tail_tol: self.tail_tol }
    }
}

/// The function `f(n)` of an f-deformed oscillator. `f(0)` is taken to be 1.
#[derive(Debug, Clone, PartialEq)]
pub enum DeformationFn {
    Identity,
    SqrtN,
    InvSqrtN,
    /// `n^{-p}`
    InvPow(f64),
    /// Explicit values `f(0), f(1), ...`
    Table(Vec<f64>),
}

impl DeformationFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            DeformationFn::InvPow(p) if !(p.is_finite() && *p > 0.0) => {
                Err(Error::InvalidResource("inverse power must be positive and finite"))
            }
            DeformationFn::Table(t) if t.is_empty() => {
                Err(Error::InvalidResource("deformation table is empty"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, DeformationFn::Identity)
    }

    /// `f(n)`, checked to be finite and nonzero for `n >= 1`.
    pub fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(match self {
                DeformationFn::Table(t) if !t.is_empty() => t[0],
                _ => 1.0,
            });
        }
        let x = n as f64;
        let v = match self {
            DeformationFn::Identity => 1.0,
            DeformationFn::SqrtN => x.sqrt(),
            DeformationFn::InvSqrtN => 1.0 / x.sqrt(),
            DeformationFn::InvPow(p) => x.powf(-p),
            DeformationFn::Table(t) => match t.get(n) {
                Some(v) => *v,
                None => return Err(Error::TableTooShort { len: t.len(), needed: n }),
            },
        };
        if !v.is_finite() || v == 0.0 {
            return Err(Error::NonFiniteDeformation { n });
        }
        Ok(v)
    }

    /// `<n-1|A|n> = sqrt(n) f(n)`, zero for `n = 0`.
    pub fn lowering_factor(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok((n as f64).sqrt() * self.value(n)?)
    }

    /// `<n-1|B|n> = sqrt(n) / f(n)`, zero for `n = 0`.
    pub fn aux_lowering_factor(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok((n as f64).sqrt() / self.value(n)?)
    }
}

impl fmt::Display for DeformationFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformationFn::Identity => write!(f, "identity"),
            DeformationFn::SqrtN => write!(f, "sqrt_n"),
            DeformationFn::InvSqrtN => write!(f, "inv_sqrt_n"),
            DeformationFn::InvPow(p) => write!(f, "inv_pow:{p}"),
            DeformationFn::Table(t) => write!(f, "table:{}", t.len()),
        }
    }
}

impl FromStr for DeformationFn {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "identity" | "1" | "f1" => return Ok(DeformationFn::Identity),
            "sqrt_n" | "sqrtn" => return Ok(DeformationFn::SqrtN),
            "inv_sqrt_n" | "invsqrtn" => return Ok(DeformationFn::InvSqrtN),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("inv_pow:") {
            let p: f64 = p.trim().parse().map_err(|_| alloc::format!("bad exponent in '{s}'"))?;
            let f = DeformationFn::InvPow(p);
            f.validate().map_err(|e| alloc::format!("{e}"))?;
            return Ok(f);
        }
        if let Some(vals) = s.strip_prefix("table:") {
            let t: core::result::Result<Vec<f64>, _> =
                vals.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let t = t.map_err(|_| alloc::format!("bad table in '{s}'"))?;
            let f = DeformationFn::Table(t);
            f.validate().map_err(|e| alloc::format!("{e}"))?;
            return Ok(f);
        }
        Err(alloc::format!(
            "unknown deformation '{s}' (expected identity, sqrt_n, inv_sqrt_n, inv_pow:<p> or table:<v0,v1,...>)"
        ))
    }
}

/// Ordering of the two exponentials in a deformed displacement operator.
///
/// `Prime` is `e^{-|a|^2/2} e^{a A^dag} e^{-a^* B}` and `DoublePrime` is
/// `e^{-|a|^2/2} e^{a B^dag} e^{-a^* A}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisplacementVariant {
    Prime,
    #[default]
    DoublePrime,
}

impl fmt::Display for DisplacementVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisplacementVariant::Prime => write!(f, "prime"),
            DisplacementVariant::DoublePrime => write!(f, "double_prime"),
        }
    }
}

impl FromStr for DisplacementVariant {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s.trim() {
            "prime" | "'" => Ok(DisplacementVariant::Prime),
            "double_prime" | "doubleprime" | "''" => Ok(DisplacementVariant::DoublePrime),
            other => Err(alloc::format!("unknown variant '{other}' (expected prime or double_prime)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorLabel {
    Annihilation,
    Creation,
    DeformedLowering,
    DeformedRaising,
    AuxLowering,
    AuxRaising,
    Displacement(Complex64),
    DeformedDisplacement { alpha: Complex64, variant: DisplacementVariant },
    Identity,
    Composite,
}

/// Dense square operator on a truncated space, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    pub label: OperatorLabel,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, label: OperatorLabel) -> Self {
        OperatorMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim], label }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = OperatorMatrix::zeros(dim, OperatorLabel::Identity);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>, label: OperatorLabel) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: dim * dim, right: entries.len() });
        }
        Ok(OperatorMatrix { dim, entries, label })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: v.len() });
        }
        let d = self.dim;
        Ok((0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let d = self.dim;
        let mut out = OperatorMatrix::zeros(d, OperatorLabel::Composite);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        let d = self.dim;
        let mut out = OperatorMatrix::zeros(d, OperatorLabel::Composite);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out.label = match &self.label {
            OperatorLabel::Annihilation => OperatorLabel::Creation,
            OperatorLabel::Creation => OperatorLabel::Annihilation,
            OperatorLabel::DeformedLowering => OperatorLabel::DeformedRaising,
            OperatorLabel::DeformedRaising => OperatorLabel::DeformedLowering,
            OperatorLabel::AuxLowering => OperatorLabel::AuxRaising,
            OperatorLabel::AuxRaising => OperatorLabel::AuxLowering,
            OperatorLabel::Identity => OperatorLabel::Identity,
            _ => OperatorLabel::Composite,
        };
        out
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
            label: OperatorLabel::Composite,
        }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
            label: OperatorLabel::Composite,
        })
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn lowering_from(dim: usize, label: OperatorLabel, factor: impl Fn(usize) -> Result<f64>) -> Result<OperatorMatrix> {
    let mut m = OperatorMatrix::zeros(dim, label);
    for n in 1..dim {
        m.set(n - 1, n, Complex64::new(factor(n)?, 0.0));
    }
    Ok(m)
}

pub fn annihilation(cutoff: &Cutoff) -> OperatorMatrix {
    lowering_from(cutoff.dim(), OperatorLabel::Annihilation, |n| Ok((n as f64).sqrt()))
        .expect("plain ladder has no failure mode")
}

/// Truncated creation operator. The row above `nmax` is dropped.
pub fn creation(cutoff: &Cutoff) -> OperatorMatrix {
    annihilation(cutoff).adjoint()
}

/// `A`, `A^dag`, `B`, `B^dag` for a deformation function on a cutoff.
#[derive(Debug, Clone)]
pub struct DeformedLadders {
    pub lowering: OperatorMatrix,
    pub raising: OperatorMatrix,
    pub aux_lowering: OperatorMatrix,
    pub aux_raising: OperatorMatrix,
}

pub fn deformed_ladders(f: &DeformationFn, cutoff: &Cutoff) -> Result<DeformedLadders> {
    f.validate()?;
    let d = cutoff.dim();
    let lowering = lowering_from(d, OperatorLabel::DeformedLowering, |n| f.lowering_factor(n))?;
    let aux_lowering = lowering_from(d, OperatorLabel::AuxLowering, |n| f.aux_lowering_factor(n))?;
    Ok(DeformedLadders {
        raising: lowering.adjoint(),
        aux_raising: aux_lowering.adjoint(),
        lowering,
        aux_lowering,
    })
}

/// `<m|D(alpha)|n>` for the ordinary displacement operator, exact (no truncation).
pub fn displacement_element(m: usize, n: usize, alpha: Complex64) -> Complex64 {
    if m < n {
        let v = displacement_element(n, m, alpha).conj();
        return if (n - m) % 2 == 0 { v } else { -v };
    }
    let k = m - n;
    let x = alpha.norm_sqr();
    let lag = laguerre_sequence(n + 1, k as i64, x)[n];
    lower_prefactor(n, k, alpha) * lag
}

// sqrt(n!/(n+k)!) alpha^k e^{-|alpha|^2/2}
fn lower_prefactor(n: usize, k: usize, alpha: Complex64) -> Complex64 {
    let r = alpha.norm();
    let mut log = 0.5 * (ln_factorial(n) - ln_factorial(n + k)) - 0.5 * r * r;
    if k > 0 {
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        log += k as f64 * r.ln();
    }
    Complex64::from_polar(log.exp(), k as f64 * alpha.arg())
}

/// Row-major `<m|D(alpha)|n>` for `m, n < dim`.
pub(crate) fn displacement_entries(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    let x = alpha.norm_sqr();
    for k in 0..dim {
        let lag = laguerre_sequence(dim - k, k as i64, x);
        let odd = k % 2 == 1;
        for (n, l) in lag.iter().enumerate() {
            let v = lower_prefactor(n, k, alpha) * l;
            out[(n + k) * dim + n] = v;
            if k > 0 {
                out[n * dim + n + k] = if odd { -v.conj() } else { v.conj() };
            }
        }
    }
    out
}

/// Truncated displacement matrix built from the exact elements.
pub fn displacement_matrix(alpha: Complex64, cutoff: &Cutoff) -> OperatorMatrix {
    let d = cutoff.dim();
    OperatorMatrix { dim: d, entries: displacement_entries(alpha, d), label: OperatorLabel::Displacement(alpha) }
}

// exp(c X) where X is the raising (or lowering) operator whose amplitude between
// |n-1> and |n> is factors[n]. The power series terminates after `dim` terms.
fn exp_single_band(factors: &[f64], c: Complex64, raising: bool, dim: usize) -> OperatorMatrix {
    let mut out = OperatorMatrix::identity(dim);
    for top in 0..dim {
        let mut amp = Complex64::new(1.0, 0.0);
        if raising {
            for p in 1..dim - top {
                amp = amp * c * factors[top + p] / p as f64;
                out.set(top + p, top, amp);
            }
        } else {
            for p in 1..=top {
                amp = amp * c * factors[top + 1 - p] / p as f64;
                out.set(top - p, top, amp);
            }
        }
    }
    out.label = OperatorLabel::Composite;
    out
}

/// Truncated `D'_f(alpha)` or `D''_f(alpha)`.
///
/// Both exponentials are finite power series on the cutoff. Because the
/// annihilation-type factor acts first the product reproduces the exact matrix
/// elements of the untruncated operator for every `m, n <= nmax`.
pub fn deformed_displacement(
    alpha: Complex64,
    f: &DeformationFn,
    variant: DisplacementVariant,
    cutoff: &Cutoff,
) -> Result<OperatorMatrix> {
    f.validate()?;
    let d = cutoff.dim();
    let mut low = vec![0.0; d];
    let mut aux = vec![0.0; d];
    for n in 1..d {
        low[n] = f.lowering_factor(n)?;
        aux[n] = f.aux_lowering_factor(n)?;
    }
    let (raise_f, lower_f) = match variant {
        DisplacementVariant::Prime => (&low, &aux),
        DisplacementVariant::DoublePrime => (&aux, &low),
    };
    let left = exp_single_band(raise_f, alpha, true, d);
    let right = exp_single_band(lower_f, -alpha.conj(), false, d);
    let mut out = left.matmul(&right)?;
    let g = (-0.5 * alpha.norm_sqr()).exp();
    for e in out.entries.iter_mut() {
        *e *= g;
    }
    out.label = OperatorLabel::DeformedDisplacement { alpha, variant };
    Ok(out)
}
