use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::{Integrator, ObservableSet, PropagatorConfig};
use crate::linalg::LanczosOptions;
use crate::model::{Boundary, ChainSpec, CouplingKernel};
use crate::statics::{CrossingOptions, EnergyConvention, ScanAxis};
use crate::{Error, Result};

/// Experiment selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Crossing,
    GapScaling,
    Ramp,
    LzSweep,
    Bubbles,
    Scaling,
    LrPhase,
    LrPotential,
    G0,
    Extended,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Spectrum,
        Command::Crossing,
        Command::GapScaling,
        Command::Ramp,
        Command::LzSweep,
        Command::Bubbles,
        Command::Scaling,
        Command::LrPhase,
        Command::LrPotential,
        Command::G0,
        Command::Extended,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Crossing => "crossing",
            Command::GapScaling => "gapscaling",
            Command::Ramp => "ramp",
            Command::LzSweep => "lzsweep",
            Command::Bubbles => "bubbles",
            Command::Scaling => "scaling",
            Command::LrPhase => "lrphase",
            Command::LrPotential => "lrpotential",
            Command::G0 => "g0",
            Command::Extended => "extended",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Command::Spectrum => "lowest levels and magnetizations along an h or g scan",
            Command::Crossing => "avoided crossing of the two lowest levels and its two-level fit",
            Command::GapScaling => "crossing gap against chain length and its exponential fit",
            Command::Ramp => "one linear ramp with all observables",
            Command::LzSweep => "final populations against ramp time compared with Landau-Zener",
            Command::Bubbles => "bubble-size distribution along a ramp and bubble crossing fields",
            Command::Scaling => "sign-change field against ramp time and its power-law fit",
            Command::LrPhase => "long-range phase boundaries and classical breaking lengths",
            Command::LrPotential => "static potential of the two lowest levels against length",
            Command::G0 => "closed-form g = 0 energetics",
            Command::Extended => "static versus dynamical external spins along a ramp",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config("command", format!("unknown command `{s}`")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Exponential,
    PowerLaw,
}

/// Fully resolved run description. Every field has a default except the
/// command; see [`RunConfig::KEYS`] for the text format.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kernel: KernelKind,
    pub xi: f64,
    pub alpha: f64,
    pub ell: usize,
    pub boundary: BoundaryKind,
    pub n_ext: usize,
    pub g: f64,
    pub h: f64,
    pub scan: ScanAxis,
    pub scan_min: Option<f64>,
    pub scan_max: Option<f64>,
    pub points: usize,
    pub levels: usize,
    pub tau: f64,
    pub taus: Vec<f64>,
    pub final_control: Option<f64>,
    pub samples: usize,
    pub ells: Vec<usize>,
    pub alphas: Vec<f64>,
    pub ell_max: usize,
    pub step_dt: f64,
    pub krylov_dim: usize,
    pub krylov_tol: f64,
    pub norm_tol: f64,
    pub convergence_tol: f64,
    pub integrator: Integrator,
    pub eig_tol: f64,
    pub max_restarts: usize,
    pub window: f64,
    pub grid_points: usize,
    pub potential: bool,
    pub bubbles: bool,
    pub convention: EnergyConvention,
    pub threads: usize,
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Static,
    Dynamical,
}

impl RunConfig {
    /// Recognized keys with a one-line description, in serialization order.
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        ("command", "experiment to run"),
        ("kernel", "exp | power"),
        ("xi", "exponential decay length (kernel=exp)"),
        ("alpha", "power-law exponent (kernel=power)"),
        ("ell", "string length"),
        ("boundary", "static | dynamical external spins"),
        ("n_ext", "dynamical external spins per side (boundary=dynamical)"),
        ("g", "transverse field"),
        ("h", "longitudinal field"),
        ("scan", "h | g: control varied by scans and ramps"),
        ("scan_min", "lower end of a scan interval (optional)"),
        ("scan_max", "upper end of a scan interval (optional)"),
        ("points", "points of a spectrum scan"),
        ("levels", "number of levels (spectra) or tracked eigenstates (ramps, 0 = off)"),
        ("tau", "ramp time scale, control = t / tau"),
        ("taus", "comma-separated ramp times for sweeps"),
        ("final", "final control value of a ramp (optional)"),
        ("samples", "samples per ramp, uniform in control"),
        ("ells", "comma-separated lengths"),
        ("alphas", "comma-separated exponents"),
        ("ell_max", "largest length scanned for classical breaking"),
        ("step_dt", "propagator time step"),
        ("krylov_dim", "Krylov subspace dimension"),
        ("krylov_tol", "Krylov exponential error target per step"),
        ("norm_tol", "allowed norm drift"),
        ("convergence_tol", "step-halving target"),
        ("integrator", "magnus4 | midpoint"),
        ("eig_tol", "eigensolver residual target"),
        ("max_restarts", "eigensolver restart limit"),
        ("window", "crossing fit half-width in units of gap / slope"),
        ("grid_points", "coarse grid of the gap-minimum search"),
        ("potential", "record the dynamical potential (true | false)"),
        ("bubbles", "record bubble histograms (true | false)"),
        ("convention", "configuration energies: first_principles or appendix (compact form)"),
        ("threads", "worker threads, 0 = STRINGBREAK_THREADS or all cores"),
        ("output", "output directory"),
    ];

    pub fn new(command: Command) -> Self {
        let prop = PropagatorConfig::default();
        let lanczos = LanczosOptions::default();
        let crossing = CrossingOptions::default();
        RunConfig {
            command,
            kernel: KernelKind::Exponential,
            xi: 1.0,
            alpha: 2.2,
            ell: 5,
            boundary: BoundaryKind::Static,
            n_ext: 3,
            g: 1.2,
            h: 0.0,
            scan: ScanAxis::H,
            scan_min: None,
            scan_max: None,
            points: 201,
            levels: 8,
            tau: 100.0,
            taus: vec![5.0, 10.0, 20.0, 50.0, 100.0],
            final_control: None,
            samples: 201,
            ells: vec![5, 6, 7, 8, 9, 10, 11],
            alphas: vec![1.8, 2.0, 2.2, 2.35, 2.45, 2.5],
            ell_max: 100_000,
            step_dt: prop.step_dt,
            krylov_dim: prop.krylov_dim,
            krylov_tol: prop.krylov_tol,
            norm_tol: prop.norm_tol,
            convergence_tol: prop.convergence_tol,
            integrator: prop.integrator,
            eig_tol: lanczos.tol,
            max_restarts: lanczos.max_restarts,
            window: crossing.window,
            grid_points: crossing.grid_points,
            potential: true,
            bubbles: true,
            convention: EnergyConvention::FirstPrinciples,
            threads: 0,
            output: PathBuf::from("out"),
        }
    }

    /// Reads `key=value` lines (`#` starts a comment) and applies `overrides`
    /// on top. The command comes from `command` if given, else from the file.
    pub fn load(command: Option<Command>, file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
            pairs = parse_pairs(&text)?;
        }
        pairs.extend(overrides.iter().cloned());
        let from_pairs = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "command")
            .map(|(_, v)| v.parse::<Command>())
            .transpose()?;
        let cmd = command
            .or(from_pairs)
            .ok_or_else(|| Error::config("command", "missing"))?;
        let mut cfg = RunConfig::new(cmd);
        for (k, v) in &pairs {
            if k != "command" {
                cfg.set(k, v)?;
            }
        }
        cfg.command = cmd;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses the text format without a file or overrides.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        RunConfig::load(None, None, &pairs)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "command" => self.command = v.parse()?,
            "kernel" => {
                self.kernel = match v {
                    "exp" => KernelKind::Exponential,
                    "power" => KernelKind::PowerLaw,
                    _ => return Err(Error::config(key, format!("expected exp or power, got `{v}`"))),
                }
            }
            "xi" => self.xi = num(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "ell" => self.ell = num(key, v)?,
            "boundary" => {
                self.boundary = match v {
                    "static" => BoundaryKind::Static,
                    "dynamical" => BoundaryKind::Dynamical,
                    _ => return Err(Error::config(key, format!("expected static or dynamical, got `{v}`"))),
                }
            }
            "n_ext" => self.n_ext = num(key, v)?,
            "g" => self.g = num(key, v)?,
            "h" => self.h = num(key, v)?,
            "scan" => {
                self.scan = match v {
                    "h" => ScanAxis::H,
                    "g" => ScanAxis::G,
                    _ => return Err(Error::config(key, format!("expected h or g, got `{v}`"))),
                }
            }
            "scan_min" => self.scan_min = Some(num(key, v)?),
            "scan_max" => self.scan_max = Some(num(key, v)?),
            "points" => self.points = num(key, v)?,
            "levels" => self.levels = num(key, v)?,
            "tau" => self.tau = num(key, v)?,
            "taus" => self.taus = list(key, v)?,
            "final" => self.final_control = Some(num(key, v)?),
            "samples" => self.samples = num(key, v)?,
            "ells" => self.ells = list(key, v)?,
            "alphas" => self.alphas = list(key, v)?,
            "ell_max" => self.ell_max = num(key, v)?,
            "step_dt" => self.step_dt = num(key, v)?,
            "krylov_dim" => self.krylov_dim = num(key, v)?,
            "krylov_tol" => self.krylov_tol = num(key, v)?,
            "norm_tol" => self.norm_tol = num(key, v)?,
            "convergence_tol" => self.convergence_tol = num(key, v)?,
            "integrator" => {
                self.integrator = match v {
                    "magnus4" => Integrator::Magnus4,
                    "midpoint" => Integrator::Midpoint,
                    _ => return Err(Error::config(key, format!("expected magnus4 or midpoint, got `{v}`"))),
                }
            }
            "eig_tol" => self.eig_tol = num(key, v)?,
            "max_restarts" => self.max_restarts = num(key, v)?,
            "window" => self.window = num(key, v)?,
            "grid_points" => self.grid_points = num(key, v)?,
            "potential" => self.potential = num(key, v)?,
            "bubbles" => self.bubbles = num(key, v)?,
            "convention" => {
                self.convention = match v {
                    "first_principles" => EnergyConvention::FirstPrinciples,
                    "appendix" => EnergyConvention::AppendixAsWritten,
                    _ => return Err(Error::config(key, format!("expected first_principles or appendix, got `{v}`"))),
                }
            }
            "threads" => self.threads = num(key, v)?,
            "output" => self.output = PathBuf::from(v),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Key/value pairs in [`RunConfig::KEYS`] order; unset optional keys are omitted.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mut out = Vec::new();
        for &(key, _) in Self::KEYS {
            let value = match key {
                "command" => Some(self.command.to_string()),
                "kernel" => Some(match self.kernel {
                    KernelKind::Exponential => "exp".into(),
                    KernelKind::PowerLaw => "power".into(),
                }),
                "xi" => Some(self.xi.to_string()),
                "alpha" => Some(self.alpha.to_string()),
                "ell" => Some(self.ell.to_string()),
                "boundary" => Some(match self.boundary {
                    BoundaryKind::Static => "static".into(),
                    BoundaryKind::Dynamical => "dynamical".into(),
                }),
                "n_ext" => Some(self.n_ext.to_string()),
                "g" => Some(self.g.to_string()),
                "h" => Some(self.h.to_string()),
                "scan" => Some(match self.scan {
                    ScanAxis::H => "h".into(),
                    ScanAxis::G => "g".into(),
                }),
                "scan_min" => self.scan_min.map(|x| x.to_string()),
                "scan_max" => self.scan_max.map(|x| x.to_string()),
                "points" => Some(self.points.to_string()),
                "levels" => Some(self.levels.to_string()),
                "tau" => Some(self.tau.to_string()),
                "taus" => Some(join(self.taus.iter().map(|x| x.to_string()).collect())),
                "final" => self.final_control.map(|x| x.to_string()),
                "samples" => Some(self.samples.to_string()),
                "ells" => Some(join(self.ells.iter().map(|x| x.to_string()).collect())),
                "alphas" => Some(join(self.alphas.iter().map(|x| x.to_string()).collect())),
                "ell_max" => Some(self.ell_max.to_string()),
                "step_dt" => Some(self.step_dt.to_string()),
                "krylov_dim" => Some(self.krylov_dim.to_string()),
                "krylov_tol" => Some(self.krylov_tol.to_string()),
                "norm_tol" => Some(self.norm_tol.to_string()),
                "convergence_tol" => Some(self.convergence_tol.to_string()),
                "integrator" => Some(match self.integrator {
                    Integrator::Magnus4 => "magnus4".into(),
                    Integrator::Midpoint => "midpoint".into(),
                }),
                "eig_tol" => Some(self.eig_tol.to_string()),
                "max_restarts" => Some(self.max_restarts.to_string()),
                "window" => Some(self.window.to_string()),
                "grid_points" => Some(self.grid_points.to_string()),
                "potential" => Some(self.potential.to_string()),
                "bubbles" => Some(self.bubbles.to_string()),
                "convention" => Some(match self.convention {
                    EnergyConvention::FirstPrinciples => "first_principles".into(),
                    EnergyConvention::AppendixAsWritten => "appendix".into(),
                }),
                "threads" => Some(self.threads.to_string()),
                "output" => Some(self.output.display().to_string()),
                _ => unreachable!("every listed key is serialized"),
            };
            if let Some(v) = value {
                out.push((key, v));
            }
        }
        out
    }

    /// The text format accepted by [`RunConfig::parse`].
    pub fn serialize(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel_spec().map_err(|e| Error::config(self.kernel_key(), e.to_string()))?;
        if self.ell == 0 {
            return Err(Error::config("ell", "must be at least 1"));
        }
        let positive = [
            ("tau", self.tau),
            ("step_dt", self.step_dt),
            ("krylov_tol", self.krylov_tol),
            ("norm_tol", self.norm_tol),
            ("convergence_tol", self.convergence_tol),
            ("eig_tol", self.eig_tol),
            ("window", self.window),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.g.is_finite() && self.h.is_finite()) {
            return Err(Error::config("g", "fields must be finite"));
        }
        if let Some(f) = self.final_control {
            if !(f > 0.0) {
                return Err(Error::config("final", format!("must be positive, got {f}")));
            }
        }
        if let (Some(a), Some(b)) = (self.scan_min, self.scan_max) {
            if !(a < b) {
                return Err(Error::config("scan_max", "must exceed scan_min"));
            }
        }
        if self.taus.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::config("taus", "ramp times must be positive"));
        }
        if self.ells.iter().any(|l| *l == 0) {
            return Err(Error::config("ells", "lengths must be at least 1"));
        }
        if self.alphas.iter().any(|a| !(*a > 1.0)) {
            return Err(Error::config("alphas", "exponents must exceed 1"));
        }
        for (key, v) in [("points", self.points), ("samples", self.samples), ("grid_points", self.grid_points)] {
            if v < 2 {
                return Err(Error::config(key, "must be at least 2"));
            }
        }
        if self.krylov_dim < 2 {
            return Err(Error::config("krylov_dim", "must be at least 2"));
        }
        Ok(())
    }

    fn kernel_key(&self) -> &'static str {
        match self.kernel {
            KernelKind::Exponential => "xi",
            KernelKind::PowerLaw => "alpha",
        }
    }

    pub fn kernel_spec(&self) -> Result<CouplingKernel> {
        match self.kernel {
            KernelKind::Exponential => CouplingKernel::exponential(self.xi),
            KernelKind::PowerLaw => CouplingKernel::power_law(self.alpha),
        }
    }

    pub fn chain_with(&self, ell: usize) -> Result<ChainSpec> {
        let boundary = match self.boundary {
            BoundaryKind::Static => Boundary::StaticExternal,
            BoundaryKind::Dynamical => Boundary::DynamicalExternal { n_ext: self.n_ext },
        };
        ChainSpec::new(ell, self.kernel_spec()?, boundary)
    }

    pub fn chain(&self) -> Result<ChainSpec> {
        self.chain_with(self.ell)
    }

    pub fn propagator(&self) -> PropagatorConfig {
        PropagatorConfig {
            step_dt: self.step_dt,
            krylov_dim: self.krylov_dim,
            norm_tol: self.norm_tol,
            convergence_tol: self.convergence_tol,
            krylov_tol: self.krylov_tol,
            integrator: self.integrator,
        }
    }

    pub fn observables(&self) -> ObservableSet {
        ObservableSet {
            levels: self.levels,
            potential: self.potential,
            bubbles: self.bubbles,
        }
    }

    pub fn crossing_options(&self) -> CrossingOptions {
        CrossingOptions {
            grid_points: self.grid_points,
            window: self.window,
            ..CrossingOptions::default()
        }
    }

    pub fn lanczos(&self) -> LanczosOptions {
        LanczosOptions {
            tol: self.eig_tol,
            max_restarts: self.max_restarts,
            ..LanczosOptions::default()
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{v}` as {}", std::any::type_name::<T>())))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| num(key, x.trim())).collect()
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", n + 1), format!("expected key=value, got `{line}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spectrum_file() {
        let c = RunConfig::parse(
            "command=spectrum\nkernel=exp\nxi=1\nell=5\ng=1.2\nscan_min=0\nscan_max=0.5\npoints=201\n",
        )
        .unwrap();
        assert_eq!(c.command, Command::Spectrum);
        assert_eq!(c.scan_max, Some(0.5));
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "command=ramp\ntau=100 # slow\n").unwrap();
        let c = RunConfig::load(None, Some(&path), &[("tau".into(), "50".into())]).unwrap();
        assert_eq!(c.tau, 50.0);
    }

    #[test]
    fn domain_and_key_errors() {
        let e = RunConfig::parse("command=g0\nxi=0\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref key, .. } if key == "xi"));
        assert_eq!(e.exit_code(), 1);
        let e = RunConfig::parse("command=g0\nbogus=1\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref key, .. } if key == "bogus"));
        assert!(RunConfig::parse("command=g0\nell=five\n").is_err());
        assert!(RunConfig::parse("xi=1\n").is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let c = RunConfig::new(Command::Ramp);
        let mut d = RunConfig::new(Command::Ramp);
        for (k, v) in c.entries() {
            d.set(k, &v).unwrap();
        }
        assert_eq!(c, d);
    }
}
