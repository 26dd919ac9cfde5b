//! Parameter sweeps: fan the grid out over a thread pool and write one CSV per
//! (target, deformation) in axis order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fockport_core::charfun::InputSpec;
use fockport_core::correlations::{entanglement_entropy, epr_variance};
use fockport_core::fock::DEFAULT_TAIL_TOL;
use fockport_core::teleport::{fidelity, fidelity_series_with, FidelityMethod, SeriesKernel, MAX_KERNEL_DIM, SERIES_EXTRA_LEVELS};
use fockport_core::{default_cutoff, make_two_mode, Complex64, Cutoff, DeformationFn, Operation, ResourceSpec};
use rayon::prelude::*;

use crate::config::{AxisVariable, Method, Target, ValidatedConfig};
use crate::format::g12;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("cannot build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

/// One resource curve of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curve {
    pub n: usize,
    pub k: usize,
    pub operation: Operation,
}

impl Curve {
    pub fn label(&self) -> String {
        format!("{}_n{}_k{}", self.operation, self.n, self.k)
    }
}

/// Curves in column order: operation, then `n`, then `k`. `none` ignores `k`.
pub fn curves(cfg: &ValidatedConfig) -> Vec<Curve> {
    let mut out = Vec::new();
    for &operation in &cfg.operations {
        for &n in &cfg.raw.grid.n {
            if operation == Operation::None {
                out.push(Curve { n, k: 0, operation });
                continue;
            }
            for &k in &cfg.raw.grid.k {
                out.push(Curve { n, k, operation });
            }
        }
    }
    out
}

/// A finished dataset before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub deformation: DeformationFn,
    /// Appended to the file stem, e.g. `_pplus`.
    pub suffix: &'static str,
    pub variable: AxisVariable,
    pub axis: Vec<f64>,
    pub columns: Vec<String>,
    /// `rows[i][c]` is `None` where the point failed.
    pub rows: Vec<Vec<Option<f64>>>,
    pub errors: Vec<String>,
}

impl Table {
    pub fn column(&self, label: &str) -> Option<Vec<Option<f64>>> {
        let c = self.columns.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn failed_cells(&self) -> usize {
        self.rows.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let mut header = vec![self.variable.to_string()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        for (x, row) in self.axis.iter().zip(&self.rows) {
            let mut rec = vec![g12(*x)];
            rec.extend(row.iter().map(|v| v.map(g12).unwrap_or_default()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Cutoff for a grid point: the config override if present, else the default rule.
pub fn cutoff_for(cfg: &ValidatedConfig, spec: &ResourceSpec) -> fockport_core::Result<Cutoff> {
    let nmax = cfg.raw.cutoff.nmax.unwrap_or_else(|| default_cutoff(spec).nmax());
    Cutoff::new(nmax, cfg.raw.cutoff.tail_tol.unwrap_or(DEFAULT_TAIL_TOL))
}

struct Task {
    deformation: usize,
    point: usize,
    curve: Curve,
}

fn resource(cfg: &ValidatedConfig, curve: Curve, alpha: f64, f: &DeformationFn) -> ResourceSpec {
    ResourceSpec::new(curve.n, curve.k, curve.operation, Complex64::new(alpha, 0.0))
        .with_deformation(f.clone())
        .with_variant(cfg.variant)
}

// Resource displacement and teleported input at one axis value.
fn point_setup(cfg: &ValidatedConfig, x: f64) -> (f64, Option<InputSpec>) {
    let fx = &cfg.raw.fixed;
    let zeta = fx.zeta.unwrap_or(0.0);
    match cfg.raw.target {
        Target::FidelityCoherent => {
            let [re, im] = fx.alpha0.unwrap_or([0.0, 0.0]);
            (x, Some(InputSpec::coherent(Complex64::new(re, im))))
        }
        Target::FidelitySqueezed => (x, Some(InputSpec::squeezed(fx.r.unwrap_or(0.0), zeta))),
        Target::FidelityVsZ => (fx.alpha.unwrap_or(1.0), Some(InputSpec::squeezed(x, zeta))),
        Target::Entanglement | Target::EprVariance => (x, None),
    }
}

fn evaluate(
    cfg: &ValidatedConfig,
    spec: &ResourceSpec,
    input: Option<&InputSpec>,
    kernel: Option<&SeriesKernel>,
) -> Result<(f64, Option<f64>), String> {
    let cutoff = cutoff_for(cfg, spec).map_err(|e| e.to_string())?;
    let out = match (cfg.raw.target, input) {
        (Target::Entanglement, _) => {
            let state = make_two_mode(spec, &cutoff).map_err(|e| e.to_string())?;
            (entanglement_entropy(&state).0, None)
        }
        (Target::EprVariance, _) => {
            let state = make_two_mode(spec, &cutoff).map_err(|e| e.to_string())?;
            let (x, p) = epr_variance(&state).map_err(|e| e.to_string())?;
            (x, Some(p))
        }
        (_, Some(input)) => {
            let r = match (cfg.raw.method, kernel) {
                (Method::Series, Some(kernel)) => fidelity_series_with(kernel, spec, &cutoff),
                (Method::Series, None) => fidelity(input, spec, &cutoff, FidelityMethod::Series),
                (Method::Quadrature, _) => fidelity(input, spec, &cutoff, FidelityMethod::Quadrature),
            };
            (r.map_err(|e| e.to_string())?.value, None)
        }
        (_, None) => unreachable!("fidelity targets always carry an input"),
    };
    Ok(out)
}

/// Kernel size covering every curve at the given displacements, capped at
/// [`MAX_KERNEL_DIM`]. Points that need more fail individually.
fn kernel_dim(cfg: &ValidatedConfig, alphas: &[f64], curves: &[Curve]) -> usize {
    let mut dim = 1;
    for f in &cfg.deformations {
        for &a in alphas {
            for &c in curves {
                if let Ok(cut) = cutoff_for(cfg, &resource(cfg, c, a, f)) {
                    dim = dim.max(cut.extended(SERIES_EXTRA_LEVELS).dim());
                }
            }
        }
    }
    dim.min(MAX_KERNEL_DIM)
}

/// Evaluates the whole grid. `jobs = 0` uses the available parallelism.
pub fn compute(cfg: &ValidatedConfig, jobs: usize) -> Result<Vec<Table>, SweepError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(|| compute_in_pool(cfg)))
}

fn compute_in_pool(cfg: &ValidatedConfig) -> Vec<Table> {
    let axis = cfg.raw.axis.points();
    let curves = curves(cfg);
    let target = cfg.raw.target;
    let setups: Vec<(f64, Option<InputSpec>)> = axis.iter().map(|&x| point_setup(cfg, x)).collect();
    let fidelity_target = matches!(target, Target::FidelityCoherent | Target::FidelitySqueezed | Target::FidelityVsZ);

    // one kernel per distinct input: a single one unless the input varies along the axis
    let kernels: Vec<SeriesKernel> = if fidelity_target && cfg.raw.method == Method::Series {
        let alphas: Vec<f64> = setups.iter().map(|s| s.0).collect();
        let dim = kernel_dim(cfg, &alphas, &curves);
        if target == Target::FidelityVsZ {
            setups.par_iter().map(|(_, input)| SeriesKernel::for_input(input.as_ref().unwrap(), dim)).collect()
        } else {
            vec![SeriesKernel::for_input(setups[0].1.as_ref().unwrap(), dim)]
        }
    } else {
        Vec::new()
    };

    let mut tasks = Vec::new();
    for deformation in 0..cfg.deformations.len() {
        for point in 0..axis.len() {
            for &curve in &curves {
                tasks.push(Task { deformation, point, curve });
            }
        }
    }
    let results: Vec<Result<(f64, Option<f64>), String>> = tasks
        .par_iter()
        .map(|t| {
            let (alpha, input) = &setups[t.point];
            let spec = resource(cfg, t.curve, *alpha, &cfg.deformations[t.deformation]);
            let kernel = match kernels.len() {
                0 => None,
                1 => Some(&kernels[0]),
                _ => Some(&kernels[t.point]),
            };
            evaluate(cfg, &spec, input.as_ref(), kernel)
        })
        .collect();

    let columns: Vec<String> = curves.iter().map(Curve::label).collect();
    let variable = cfg.raw.axis.variable;
    let mut tables = Vec::new();
    let per_def = axis.len() * curves.len();
    for (d, f) in cfg.deformations.iter().enumerate() {
        let chunk = &results[d * per_def..(d + 1) * per_def];
        let mut main = Table {
            deformation: f.clone(),
            suffix: "",
            variable,
            axis: axis.clone(),
            columns: columns.clone(),
            rows: Vec::with_capacity(axis.len()),
            errors: Vec::new(),
        };
        let mut second = main.clone();
        second.suffix = "_pplus";
        for (i, row) in chunk.chunks(curves.len()).enumerate() {
            let mut a = Vec::with_capacity(curves.len());
            let mut b = Vec::with_capacity(curves.len());
            for (c, r) in row.iter().enumerate() {
                match r {
                    Ok((x, p)) => {
                        a.push(Some(*x));
                        b.push(*p);
                    }
                    Err(e) => {
                        a.push(None);
                        b.push(None);
                        main.errors.push(format!("{}={} {}: {e}", variable, g12(axis[i]), columns[c]));
                    }
                }
            }
            main.rows.push(a);
            second.rows.push(b);
        }
        second.errors = main.errors.clone();
        tables.push(main);
        if target == Target::EprVariance {
            tables.push(second);
        }
    }
    tables
}

/// File stem for a deformation: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem(prefix: &str, f: &DeformationFn) -> String {
    let d: String = f
        .to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect();
    format!("{prefix}_{d}")
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub csv_files: Vec<PathBuf>,
    pub error_logs: Vec<PathBuf>,
    pub failed_cells: usize,
    pub total_cells: usize,
}

/// Computes the sweep and writes it under `out_dir`.
pub fn run_sweep(cfg: &ValidatedConfig, out_dir: &Path, jobs: usize) -> Result<SweepReport, SweepError> {
    let tables = compute(cfg, jobs)?;
    write_tables(cfg, &tables, out_dir)
}

pub fn write_tables(cfg: &ValidatedConfig, tables: &[Table], out_dir: &Path) -> Result<SweepReport, SweepError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| SweepError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let prefix = cfg.prefix();
    let mut report = SweepReport::default();
    for t in tables {
        let stem = format!("{}{}", file_stem(&prefix, &t.deformation), t.suffix);
        let csv_path = out_dir.join(format!("{stem}.csv"));
        let mut buf = Vec::new();
        t.write_csv(&mut buf)?;
        fs::write(&csv_path, buf).map_err(io(&csv_path))?;
        report.failed_cells += t.failed_cells();
        report.total_cells += t.rows.len() * t.columns.len();
        report.csv_files.push(csv_path);

        let log_path = out_dir.join(format!("{stem}.errors.log"));
        if t.errors.is_empty() {
            if log_path.exists() {
                fs::remove_file(&log_path).map_err(io(&log_path))?;
            }
        } else if t.suffix.is_empty() {
            let mut text = t.errors.join("\n");
            text.push('\n');
            fs::write(&log_path, text).map_err(io(&log_path))?;
            report.error_logs.push(log_path);
        }
    }
    Ok(report)
}
