use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fockport::config::{ConfigError, SweepConfig};
use fockport::exchange::{self, ExchangeState};
use fockport::format::g12;
use fockport::plot::{parse_sweep_csv, render_svg, PlotOptions};
use fockport::{selftest, sweep, OUT_DIR_ENV};
use fockport_core::charfun::InputSpec;
use fockport_core::correlations::{correlation_report, entanglement_entropy};
use fockport_core::fock::DEFAULT_TAIL_TOL;
use fockport_core::teleport::{fidelity, FidelityMethod};
use fockport_core::{
    beam_split, default_cutoff, make_single_mode, Complex64, Cutoff, DeformationFn, DisplacementVariant, Operation,
    ResourceSpec, TwoModeState,
};

#[derive(Parser)]
#[command(name = "fockport", version, about = "Teleportation fidelity, entanglement and EPR sweeps for deformed displaced Fock resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a JSON config and write CSV files.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 0, help = "worker threads (0 = all cores)")]
        jobs: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also write an SVG chart next to every CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Teleportation fidelity of one resource.
    Fidelity {
        #[command(flatten)]
        resource: ResourceArgs,
        #[arg(long, value_enum, default_value_t = InputKind::Coherent)]
        input: InputKind,
        #[arg(long, value_parser = parse_complex, default_value = "0")]
        alpha0: Complex64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        zeta: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Series)]
        method: MethodArg,
    },
    /// Entanglement entropy of one resource (or a saved two-mode state).
    Entanglement {
        #[command(flatten)]
        resource: ResourceArgs,
        /// Report bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// EPR variances of one resource (or a saved two-mode state).
    Epr {
        #[command(flatten)]
        resource: ResourceArgs,
    },
    /// Cross-check every closed form against its oracle.
    Selftest,
    /// Render a sweep CSV as an SVG line chart.
    Plot {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        y_label: Option<String>,
    },
}

#[derive(Args)]
struct ResourceArgs {
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_parser = Operation::from_str, default_value = "none")]
    op: Operation,
    /// Displacement, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    alpha: Complex64,
    #[arg(long, value_parser = DeformationFn::from_str, default_value = "identity")]
    deform: DeformationFn,
    #[arg(long, value_parser = DisplacementVariant::from_str, default_value = "double_prime")]
    variant: DisplacementVariant,
    /// Override the default cutoff rule.
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    /// Read the two-mode state from an exchange file (.json or .csv) instead.
    #[arg(long, conflicts_with_all = ["n", "k", "op", "alpha", "deform", "variant", "nmax"])]
    state: Option<PathBuf>,
    /// Write the two-mode state to an exchange file (.json or .csv).
    #[arg(long)]
    save_state: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKind {
    Coherent,
    Squeezed,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Series,
    Quadrature,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("{t:?} is not a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err("expected `re` or `re,im`".into()),
    }
}

impl ResourceArgs {
    fn spec(&self) -> ResourceSpec {
        ResourceSpec::new(self.n, self.k, self.op, self.alpha)
            .with_deformation(self.deform.clone())
            .with_variant(self.variant)
    }

    fn cutoff(&self, spec: &ResourceSpec) -> anyhow::Result<Cutoff> {
        let nmax = self.nmax.unwrap_or_else(|| default_cutoff(spec).nmax());
        Ok(Cutoff::new(nmax, self.tail_tol)?)
    }

    fn two_mode(&self) -> anyhow::Result<TwoModeState> {
        let state = match &self.state {
            Some(path) => match load_state(path)? {
                ExchangeState::Two(s) => s,
                ExchangeState::Single(s) => beam_split(&s),
            },
            None => {
                let spec = self.spec();
                spec.validate()?;
                beam_split(&make_single_mode(&spec, &self.cutoff(&spec)?)?)
            }
        };
        if let Some(path) = &self.save_state {
            save_state(path, &ExchangeState::Two(state.clone()))?;
        }
        Ok(state)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_state(path: &Path) -> anyhow::Result<ExchangeState> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let state = if is_json(path) { exchange::read_json(&text) } else { exchange::read_csv(text.as_bytes()) };
    state.with_context(|| format!("parsing {}", path.display()))
}

fn save_state(path: &Path, state: &ExchangeState) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    if is_json(path) {
        exchange::write_json(state, &mut buf)?;
        buf.push(b'\n');
    } else {
        exchange::write_csv(state, &mut buf)?;
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

/// `--out-dir`, then the config, then the environment, then the working directory.
fn output_dir(flag: Option<PathBuf>, config: Option<&str>) -> PathBuf {
    flag.or_else(|| config.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

// Usage errors exit with 2, everything else with 1.
struct Usage(anyhow::Error);

fn run(cli: Cli) -> Result<(), Result<Usage, anyhow::Error>> {
    match cli.command {
        Command::Sweep { config, jobs, out_dir, plot } => {
            let cfg = SweepConfig::from_path(&config).map_err(|e: ConfigError| {
                Ok(Usage(anyhow!("{}: {e}", config.display())))
            })?;
            let dir = output_dir(out_dir, cfg.raw.output.dir.as_deref());
            let report = sweep::run_sweep(&cfg, &dir, jobs).map_err(|e| Err(e.into()))?;
            for f in &report.csv_files {
                println!("{}", f.display());
                if plot {
                    write_plot(f, &f.with_extension("svg"), None, None).map_err(Err)?;
                }
            }
            if report.failed_cells > 0 {
                eprintln!(
                    "warning: {} of {} cells failed, see {}",
                    report.failed_cells,
                    report.total_cells,
                    report.error_logs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
                );
            }
            Ok(())
        }
        Command::Fidelity { resource, input, alpha0, r, zeta, method } => {
            if resource.state.is_some() || resource.save_state.is_some() {
                return Err(Ok(Usage(anyhow!("--state and --save-state apply to entanglement and epr"))));
            }
            let input = match input {
                InputKind::Coherent => InputSpec::coherent(alpha0),
                InputKind::Squeezed => InputSpec::squeezed(r, zeta),
            };
            let spec = resource.spec();
            let go = || -> anyhow::Result<()> {
                spec.validate()?;
                let cut = resource.cutoff(&spec)?;
                let m = match method {
                    MethodArg::Series => FidelityMethod::Series,
                    MethodArg::Quadrature => FidelityMethod::Quadrature,
                };
                let res = fidelity(&input, &spec, &cut, m)?;
                println!("fidelity {}", g12(res.value));
                println!("estimated_error {:.3e}", res.convergence.estimated_error);
                println!("nmax {}", cut.nmax());
                Ok(())
            };
            go().map_err(Err)
        }
        Command::Entanglement { resource, bits } => {
            let state = resource.two_mode().map_err(Err)?;
            let (e, spectrum) = entanglement_entropy(&state);
            let (value, unit) = if bits { (e / std::f64::consts::LN_2, "bits") } else { (e, "nats") };
            println!("entropy {} {unit}", g12(value));
            println!("schmidt_rank {}", spectrum.iter().filter(|l| **l > 1e-14).count());
            Ok(())
        }
        Command::Epr { resource } => {
            let state = resource.two_mode().map_err(Err)?;
            let rep = correlation_report(&state).map_err(|e| Err(e.into()))?;
            println!("var_xminus {}", g12(rep.var_xminus));
            println!("var_pplus {}", g12(rep.var_pplus));
            Ok(())
        }
        Command::Selftest => {
            let checks = selftest::run();
            print!("{}", selftest::render(&checks));
            if checks.iter().all(|c| c.passed()) {
                Ok(())
            } else {
                Err(Err(anyhow!("selftest failed")))
            }
        }
        Command::Plot { csv, output, title, y_label } => {
            let out = output.unwrap_or_else(|| csv.with_extension("svg"));
            write_plot(&csv, &out, title, y_label).map_err(|e| {
                if e.is::<fockport::plot::PlotError>() { Ok(Usage(e)) } else { Err(e) }
            })?;
            println!("{}", out.display());
            Ok(())
        }
    }
}

fn write_plot(csv: &Path, out: &Path, title: Option<String>, y_label: Option<String>) -> anyhow::Result<()> {
    let text = fs::read_to_string(csv).with_context(|| format!("reading {}", csv.display()))?;
    let data = parse_sweep_csv(&text).map_err(|e| anyhow::Error::new(e).context(csv.display().to_string()))?;
    let opts = PlotOptions { title, y_label, ..PlotOptions::default() };
    fs::write(out, render_svg(&data, &opts)).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Ok(Usage(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
