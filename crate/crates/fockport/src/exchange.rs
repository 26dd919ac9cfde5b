//! State exchange files: a sparse list of `(j, i, re, im)` amplitudes plus the
//! cutoff metadata, as JSON or CSV. Single-mode states use `i = 0`.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! gives the same amplitudes up to the renormalization on load.

use std::io::{BufRead, Write};

use fockport_core::{Complex64, Cutoff, SingleModeState, TwoModeState};
use serde::{Deserialize, Serialize};

pub const EXCHANGE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ExchangeError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    State(#[from] fockport_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExchangeState {
    Single(SingleModeState),
    Two(TwoModeState),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub j: usize,
    pub i: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub version: u32,
    pub modes: u8,
    pub nmax: usize,
    pub tail_tol: f64,
    pub tail_mass: f64,
    pub entries: Vec<Entry>,
}

impl StateFile {
    pub fn from_state(state: &ExchangeState) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let (modes, cutoff, tail_mass, entries) = match state {
            ExchangeState::Single(s) => {
                let e = s
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != zero)
                    .map(|(j, c)| Entry { j, i: 0, re: c.re, im: c.im })
                    .collect();
                (1, *s.cutoff(), s.tail_mass(), e)
            }
            ExchangeState::Two(s) => {
                let d = s.dim();
                let mut e = Vec::new();
                for j in 0..d {
                    for i in 0..d {
                        let c = s.get(j, i);
                        if c != zero {
                            e.push(Entry { j, i, re: c.re, im: c.im });
                        }
                    }
                }
                (2, *s.cutoff(), s.tail_mass(), e)
            }
        };
        StateFile {
            version: EXCHANGE_VERSION,
            modes,
            nmax: cutoff.nmax(),
            tail_tol: cutoff.tail_tol(),
            tail_mass,
            entries,
        }
    }

    pub fn into_state(self) -> Result<ExchangeState, ExchangeError> {
        let bad = |message: String| ExchangeError::Format { line: 0, message };
        if self.version != EXCHANGE_VERSION {
            return Err(bad(format!("unsupported version {}", self.version)));
        }
        let cutoff = Cutoff::new(self.nmax, self.tail_tol)?;
        let dim = cutoff.dim();
        match self.modes {
            1 => {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                for e in &self.entries {
                    if e.i != 0 || e.j >= dim {
                        return Err(bad(format!("entry ({}, {}) outside a single mode of nmax {}", e.j, e.i, self.nmax)));
                    }
                    v[e.j] = Complex64::new(e.re, e.im);
                }
                let s = SingleModeState::from_coefficients(v, cutoff)?.with_tail_mass(self.tail_mass);
                Ok(ExchangeState::Single(s))
            }
            2 => {
                let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
                for e in &self.entries {
                    if e.j >= dim || e.i >= dim {
                        return Err(bad(format!("entry ({}, {}) outside nmax {}", e.j, e.i, self.nmax)));
                    }
                    m[e.j * dim + e.i] = Complex64::new(e.re, e.im);
                }
                Ok(ExchangeState::Two(TwoModeState::from_matrix(m, cutoff, self.tail_mass)?))
            }
            other => Err(bad(format!("modes must be 1 or 2, got {other}"))),
        }
    }
}

pub fn write_json<W: Write>(state: &ExchangeState, w: W) -> Result<(), ExchangeError> {
    serde_json::to_writer_pretty(w, &StateFile::from_state(state))?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<ExchangeState, ExchangeError> {
    let file: StateFile = serde_json::from_str(text)?;
    file.into_state()
}

/// CSV layout: a `# key=value ...` metadata line, then a `j,i,re,im` table.
pub fn write_csv<W: Write>(state: &ExchangeState, mut w: W) -> Result<(), ExchangeError> {
    let f = StateFile::from_state(state);
    writeln!(
        w,
        "# version={} modes={} nmax={} tail_tol={:e} tail_mass={:e}",
        f.version, f.modes, f.nmax, f.tail_tol, f.tail_mass
    )?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["j", "i", "re", "im"])?;
    for e in &f.entries {
        out.write_record([e.j.to_string(), e.i.to_string(), format!("{:e}", e.re), format!("{:e}", e.im)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(mut r: R) -> Result<ExchangeState, ExchangeError> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    let meta = first
        .trim_end()
        .strip_prefix('#')
        .ok_or_else(|| ExchangeError::Format { line: 1, message: "expected a `# key=value` metadata line".into() })?;
    let mut file = StateFile { version: 0, modes: 0, nmax: 0, tail_tol: 0.0, tail_mass: 0.0, entries: Vec::new() };
    let mut seen = 0;
    for kv in meta.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ExchangeError::Format { line: 1, message: format!("bad metadata item {kv:?}") })?;
        let parsed = match k {
            "version" => v.parse().map(|x| file.version = x).is_ok(),
            "modes" => v.parse().map(|x| file.modes = x).is_ok(),
            "nmax" => v.parse().map(|x| file.nmax = x).is_ok(),
            "tail_tol" => v.parse().map(|x| file.tail_tol = x).is_ok(),
            "tail_mass" => v.parse().map(|x| file.tail_mass = x).is_ok(),
            _ => return Err(ExchangeError::Format { line: 1, message: format!("unknown metadata key {k:?}") }),
        };
        if !parsed {
            return Err(ExchangeError::Format { line: 1, message: format!("bad value for {k}: {v:?}") });
        }
        seen += 1;
    }
    if seen != 5 {
        return Err(ExchangeError::Format {
            line: 1,
            message: "metadata needs version, modes, nmax, tail_tol and tail_mass".into(),
        });
    }
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["j", "i", "re", "im"] {
        return Err(ExchangeError::Format { line: 2, message: "header must be j,i,re,im".into() });
    }
    for (row, rec) in rd.deserialize::<Entry>().enumerate() {
        let e = rec.map_err(|err| ExchangeError::Format { line: row + 3, message: err.to_string() })?;
        file.entries.push(e);
    }
    file.into_state()
}
