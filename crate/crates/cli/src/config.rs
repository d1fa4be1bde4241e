//! Run configuration: flag types, the `key = value` config file, and the
//! overlay rules (defaults < config file < explicit flags).
//!
//! Units at this boundary are kHz and µs; everything becomes rad/s and
//! seconds exactly once, inside the command implementations.

use std::path::PathBuf;
use std::str::FromStr;

use ptsim::Complex64;

use crate::CliError;

/// Loss-rate grid in kHz: `start:stop:count` with count ≥ 2, endpoints
/// included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start_khz: f64,
    pub stop_khz: f64,
    pub count: usize,
}

impl GridSpec {
    /// Grid values in kHz, computed ratio-first so that rational grid
    /// fractions (like the midpoint of a 0..2Ω grid) land exactly.
    pub fn values_khz(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| {
                let frac = i as f64 / (self.count - 1) as f64;
                self.start_khz + (self.stop_khz - self.start_khz) * frac
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid spec must be start:stop:count, got '{s}'"));
        }
        let start_khz: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let stop_khz: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid stop '{}'", parts[1]))?;
        let count: usize = parts[2].trim().parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
        if count < 2 {
            return Err(format!("grid count must be >= 2, got {count}"));
        }
        if !start_khz.is_finite() || !stop_khz.is_finite() || stop_khz <= start_khz {
            return Err(format!("grid needs finite start < stop, got '{s}'"));
        }
        Ok(GridSpec { start_khz, stop_khz, count })
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start_khz, self.stop_khz, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Ket0,
    Ket1,
    /// (re₀, im₀, re₁, im₁), normalized on use.
    Custom([f64; 4]),
}

impl InitialState {
    pub fn density_matrix(&self) -> Result<ptsim::DensityMatrix, CliError> {
        match self {
            InitialState::Ket0 => Ok(ptsim::DensityMatrix::ket0()),
            InitialState::Ket1 => Ok(ptsim::DensityMatrix::ket1()),
            InitialState::Custom([r0, i0, r1, i1]) => {
                ptsim::DensityMatrix::from_pure(Complex64::new(*r0, *i0), Complex64::new(*r1, *i1))
                    .map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ket0" => return Ok(InitialState::Ket0),
            "ket1" => return Ok(InitialState::Ket1),
            _ => {}
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!(
                "initial state must be ket0, ket1 or re0,im0,re1,im1, got '{s}'"
            ));
        }
        let mut vals = [0.0f64; 4];
        for (v, p) in vals.iter_mut().zip(parts.iter()) {
            *v = p.trim().parse().map_err(|_| format!("bad amplitude '{p}'"))?;
        }
        if vals.iter().map(|v| v * v).sum::<f64>() < 1e-300 {
            return Err("custom initial state must be nonzero".into());
        }
        Ok(InitialState::Custom(vals))
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Ket0 => write!(f, "ket0"),
            InitialState::Ket1 => write!(f, "ket1"),
            InitialState::Custom([a, b, c, d]) => write!(f, "{a},{b},{c},{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PictureArg {
    Lossy,
    Pt,
    Both,
}

impl FromStr for PictureArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lossy" => Ok(PictureArg::Lossy),
            "pt" => Ok(PictureArg::Pt),
            "both" => Ok(PictureArg::Both),
            other => Err(format!("picture must be lossy, pt or both, got '{other}'")),
        }
    }
}

impl std::fmt::Display for PictureArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PictureArg::Lossy => write!(f, "lossy"),
            PictureArg::Pt => write!(f, "pt"),
            PictureArg::Both => write!(f, "both"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableArg {
    P0,
    Sy,
}

impl From<ObservableArg> for ptsim::ReadoutObservable {
    fn from(o: ObservableArg) -> Self {
        match o {
            ObservableArg::P0 => ptsim::ReadoutObservable::P0,
            ObservableArg::Sy => ptsim::ReadoutObservable::SY,
        }
    }
}

impl FromStr for ObservableArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p0" => Ok(ObservableArg::P0),
            "sy" => Ok(ObservableArg::Sy),
            other => Err(format!("observable must be p0 or sy, got '{other}'")),
        }
    }
}

impl std::fmt::Display for ObservableArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObservableArg::P0 => write!(f, "p0"),
            ObservableArg::Sy => write!(f, "sy"),
        }
    }
}

/// Comma-separated list of times in µs.
#[derive(Debug, Clone, PartialEq)]
pub struct TimesList(pub Vec<f64>);

impl FromStr for TimesList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let v: f64 = part.trim().parse().map_err(|_| format!("bad time '{part}'"))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("times must be positive, got {v}"));
            }
            out.push(v);
        }
        if out.is_empty() {
            return Err("empty time list".into());
        }
        Ok(TimesList(out))
    }
}

impl std::fmt::Display for TimesList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// All settable fields, every one optional; commands fill their own
/// defaults after the overlay.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub omega_khz: Option<f64>,
    pub gamma_khz: Option<f64>,
    pub gamma_grid: Option<GridSpec>,
    pub t_max_us: Option<f64>,
    pub n_samples: Option<usize>,
    pub dt_us: Option<f64>,
    pub initial_state: Option<InitialState>,
    pub seed: Option<u64>,
    pub n_shots: Option<u64>,
    pub levels: Option<usize>,
    pub picture: Option<PictureArg>,
    pub times_us: Option<TimesList>,
    pub observable: Option<ObservableArg>,
    pub output: Option<PathBuf>,
}

impl RawConfig {
    /// Fields set in `over` win over `self`.
    pub fn overlay(mut self, over: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if over.$f.is_some() { self.$f = over.$f; })*
            };
        }
        take!(
            omega_khz, gamma_khz, gamma_grid, t_max_us, n_samples, dt_us, initial_state, seed,
            n_shots, levels, picture, times_us, observable, output
        );
        self
    }

    /// Parse a `key = value` file. `#` starts a comment, blank lines are
    /// skipped, unknown keys are rejected with their line number.
    pub fn from_file(path: &std::path::Path) -> Result<RawConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
        let mut cfg = RawConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {lineno}: expected key = value, got '{line}'"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| CliError::Config(format!("config line {lineno}: {msg}"));
            macro_rules! parse_into {
                ($field:ident) => {
                    cfg.$field = Some(value.parse().map_err(|e| bad(format!("{e:?}").replace('"', "'")))?)
                };
            }
            match key {
                "omega_khz" => parse_into!(omega_khz),
                "gamma_khz" => parse_into!(gamma_khz),
                "gamma_grid" => {
                    cfg.gamma_grid = Some(value.parse().map_err(bad)?);
                }
                "t_max_us" => parse_into!(t_max_us),
                "n_samples" => parse_into!(n_samples),
                "dt_us" => parse_into!(dt_us),
                "initial_state" => {
                    cfg.initial_state = Some(value.parse().map_err(bad)?);
                }
                "seed" => parse_into!(seed),
                "n_shots" => parse_into!(n_shots),
                "levels" => parse_into!(levels),
                "picture" => {
                    cfg.picture = Some(value.parse().map_err(bad)?);
                }
                "times_us" => {
                    cfg.times_us = Some(value.parse().map_err(bad)?);
                }
                "observable" => {
                    cfg.observable = Some(value.parse().map_err(bad)?);
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Config(format!(
                        "config line {lineno}: unknown key '{other}'"
                    )))
                }
            }
        }
        Ok(cfg)
    }
}

/// Positive, finite check for resolved numeric settings.
pub fn require_positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}
