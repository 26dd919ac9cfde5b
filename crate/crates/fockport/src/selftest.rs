//! Oracle cross-checks run by `fockport selftest`.

use std::fmt::Write as _;

use fockport_core::charfun::{chi_resource, sample_points, ChiMethod, InputSpec};
use fockport_core::correlations::{epr_variance, schmidt_spectrum, SchmidtMethod};
use fockport_core::teleport::{fidelity_quadrature, fidelity_series_with, SeriesKernel, SERIES_EXTRA_LEVELS};
use fockport_core::{
    beam_split, default_cutoff, make_single_mode, make_single_mode_truncated, make_two_mode, Complex64, Cutoff,
    DeformationFn, Operation, ResourceSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub deviation: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.note.is_none() && self.deviation <= self.tolerance
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Acc {
    check: Check,
}

impl Acc {
    fn new(name: &str, tolerance: f64) -> Self {
        Acc { check: Check { name: name.into(), cases: 0, deviation: 0.0, tolerance, note: None } }
    }

    fn record(&mut self, r: Result<f64, String>) {
        self.check.cases += 1;
        match r {
            Ok(d) if d.is_finite() => self.check.deviation = self.check.deviation.max(d),
            Ok(d) => self.fail(format!("non-finite deviation {d}")),
            Err(e) => self.fail(e),
        }
    }

    fn fail(&mut self, e: String) {
        self.check.deviation = f64::INFINITY;
        if self.check.note.is_none() {
            self.check.note = Some(e);
        }
    }
}

fn resources() -> Vec<ResourceSpec> {
    let mut out = Vec::new();
    for (n, k, op, a) in [
        (0, 0, Operation::None, 0.0),
        (1, 1, Operation::Add, 1.0),
        (2, 2, Operation::Subtract, 0.5),
        (1, 2, Operation::Add, 2.0),
        (2, 1, Operation::Subtract, 1.5),
    ] {
        out.push(ResourceSpec::new(n, k, op, c(a, 0.0)));
    }
    out.push(ResourceSpec::new(1, 1, Operation::Add, c(0.8, 0.0)).with_deformation(DeformationFn::SqrtN));
    out.push(ResourceSpec::new(1, 1, Operation::Subtract, c(0.5, 0.0)).with_deformation(DeformationFn::InvSqrtN));
    out
}

fn series_vs_quadrature(input: InputSpec, name: &str) -> Check {
    let mut acc = Acc::new(name, 1e-6);
    let specs = resources();
    let dim = specs.iter().map(|s| default_cutoff(s).extended(SERIES_EXTRA_LEVELS).dim()).max().unwrap();
    let kernel = SeriesKernel::for_input(&input, dim);
    for spec in &specs {
        let cut = default_cutoff(spec);
        acc.record((|| {
            let s = fidelity_series_with(&kernel, spec, &cut).map_err(|e| format!("{}: {e}", spec.label()))?;
            let q = fidelity_quadrature(&input, &make_two_mode(spec, &cut).map_err(|e| e.to_string())?)
                .map_err(|e| format!("{}: {e}", spec.label()))?;
            Ok((s.value - q.value).abs())
        })());
    }
    acc.check
}

fn chi_routes(method: ChiMethod, name: &str) -> Check {
    let mut acc = Acc::new(name, 1e-8);
    let points = sample_points(25);
    for spec in resources().iter().skip(1).take(4) {
        let cut = Cutoff::with_nmax(30).unwrap();
        let state = match make_single_mode_truncated(spec, &cut) {
            Ok(s) => beam_split(&s),
            Err(e) => {
                acc.record(Err(e.to_string()));
                continue;
            }
        };
        for &(g1, g2) in &points {
            acc.record((|| {
                let a = chi_resource(&state, g1, g2, method).map_err(|e| e.to_string())?;
                let b = chi_resource(&state, g1, g2, ChiMethod::Trace).map_err(|e| e.to_string())?;
                Ok((a - b).norm())
            })());
        }
    }
    acc.check
}

fn deformed_identity() -> Check {
    let mut acc = Acc::new("deformed f = 1 vs analytic constructor", 1e-9);
    for base in resources().iter().take(5) {
        let cut = Cutoff::with_nmax(40).unwrap();
        let table = base.clone().with_deformation(DeformationFn::Table(vec![1.0; 200]));
        acc.record((|| {
            let a = make_single_mode(base, &cut).map_err(|e| e.to_string())?;
            let b = make_single_mode(&table, &cut).map_err(|e| e.to_string())?;
            Ok(a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
        })());
    }
    acc.check
}

fn schmidt_routes() -> Check {
    let mut acc = Acc::new("Schmidt spectrum: eigen vs singular values", 1e-10);
    for spec in resources() {
        acc.record((|| {
            let s = make_two_mode(&spec, &default_cutoff(&spec)).map_err(|e| e.to_string())?;
            let a = schmidt_spectrum(&s, SchmidtMethod::ReducedEigen);
            let b = schmidt_spectrum(&s, SchmidtMethod::Singular);
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        })());
    }
    acc.check
}

fn epr_vacuum_levels() -> Check {
    let mut acc = Acc::new("EPR variances of split coherent states", 1e-9);
    for a in [0.0, 0.5, 1.0, 2.0] {
        acc.record((|| {
            let spec = ResourceSpec::displaced_fock(0, c(a, 0.3 * a));
            let s = make_two_mode(&spec, &default_cutoff(&spec)).map_err(|e| e.to_string())?;
            let (x, p) = epr_variance(&s).map_err(|e| e.to_string())?;
            Ok((x - 1.0).abs().max((p - 1.0).abs()))
        })());
    }
    acc.check
}

/// Runs every check.
pub fn run() -> Vec<Check> {
    vec![
        series_vs_quadrature(InputSpec::coherent(c(0.3, -0.2)), "fidelity series vs quadrature, coherent input"),
        series_vs_quadrature(InputSpec::squeezed(1.0, 0.0), "fidelity series vs quadrature, squeezed r = 1"),
        chi_routes(ChiMethod::ClosedForm, "closed-form chi vs trace"),
        chi_routes(ChiMethod::BeamSplitter, "factorized chi vs trace"),
        deformed_identity(),
        schmidt_routes(),
        epr_vacuum_levels(),
    ]
}

/// Fixed-width table, one row per check.
pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>5}  {:>10}  {:>9}  result", "check", "cases", "max dev", "tol");
    for c in checks {
        let _ = writeln!(
            s,
            "{:<width$}  {:>5}  {:>10.3e}  {:>9.1e}  {}",
            c.name,
            c.cases,
            c.deviation,
            c.tolerance,
            if c.passed() { "PASS" } else { "FAIL" }
        );
        if let Some(n) = &c.note {
            let _ = writeln!(s, "    {n}");
        }
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(s, "{} of {} checks passed", checks.len() - failed, checks.len());
    s
}
