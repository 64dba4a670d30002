//! key=value configuration: a file read first, individual flags layered on top,
//! then typed into [`RunConfig`] with the offending key named on failure.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use foldwave::rays::{linear_layer_caustic_depth, LinearLayerParams};
use foldwave::wigner::{QuadraturePolicy, TruncationRule};

/// Every key accepted in a config file or as `--key value`.
pub const KEYS: &[&str] = &[
    "scenario",
    "epsilon",
    "x0",
    "xmin",
    "xmax",
    "nx",
    "kmin",
    "kmax",
    "nk",
    "sigma_samples",
    "taper",
    "truncation",
    "support_margin",
    "nrays",
    "mu1",
    "h",
    "eta0",
    "psi",
    "kappa0",
    "random_points",
    "out",
    "format",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
enum Origin {
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

/// Raw string values with the place each one came from.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse_file(path: &Path, text: &str) -> Result<Self, ConfigError> {
        let mut raw = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return err(format!("{}:{line_no}: expected key=value, found '{body}'", path.display()));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return err(format!("{}:{line_no}: unknown field '{key}'", path.display()));
            }
            let origin = Origin::File { path: path.to_path_buf(), line: line_no };
            raw.entries.insert(key.to_string(), (value.trim().to_string(), origin));
        }
        Ok(raw)
    }

    pub fn set_flag(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), (value, Origin::Flag));
    }

    pub fn keys(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }

    fn get<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, origin)) => match v.parse::<T>() {
                Ok(t) => Ok(Some(t)),
                Err(_) => err(format!("{origin}: invalid value '{v}' for field '{key}' (expected {what})")),
            },
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.get::<f64>(key, "a number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                return err(format!("field '{key}' must be finite"));
            }
        }
        Ok(v)
    }

    fn require_real(&self, key: &str) -> Result<f64, ConfigError> {
        self.real(key)?.map_or_else(|| err(format!("missing required field '{key}'")), Ok)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.get::<usize>(key, "a non-negative integer")?.unwrap_or(default))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Airy,
    LinearLayer,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Airy => "airy",
            Scenario::LinearLayer => "linear_layer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rays,
    Field,
    Wigner,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rays => "rays",
            Command::Field => "field",
            Command::Wigner => "wigner",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        foldwave::numerics::linspace(self.min, self.max, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Scenario,
    pub epsilon: f64,
    pub x0: f64,
    pub layer: Option<LinearLayerParams>,
    pub x: Axis,
    pub k: Axis,
    pub quadrature: QuadraturePolicy,
    pub nrays: usize,
    pub random_points: usize,
    pub out: PathBuf,
    pub csv: bool,
    pub json: bool,
    pub seed: u64,
}

const MIN_COUNT: usize = 8;

impl RunConfig {
    pub fn from_raw(command: Command, raw: &RawConfig) -> Result<Self, ConfigError> {
        let scenario = match raw.get::<String>("scenario", "airy or linear_layer")?.as_deref() {
            None | Some("airy") => Scenario::Airy,
            Some("linear_layer") => Scenario::LinearLayer,
            Some(other) => {
                return err(format!("invalid value '{other}' for field 'scenario' (expected airy or linear_layer)"))
            }
        };
        if scenario == Scenario::LinearLayer && matches!(command, Command::Wigner | Command::Validate) {
            return err(format!("command '{}' supports scenario 'airy' only", command.name()));
        }

        let layer = match scenario {
            Scenario::LinearLayer => {
                let p = LinearLayerParams::on_shell(
                    raw.require_real("mu1")?,
                    raw.require_real("h")?,
                    raw.require_real("eta0")?,
                    raw.require_real("psi")?,
                    raw.require_real("kappa0")?,
                )
                .map_err(|e| ConfigError(format!("invalid layer parameters: {e}")))?;
                Some(p)
            }
            Scenario::Airy => None,
        };

        let epsilon = match (scenario, layer) {
            (Scenario::LinearLayer, Some(p)) => raw.real("epsilon")?.unwrap_or_else(|| p.semiclassical_epsilon()),
            _ => raw.require_real("epsilon")?,
        };
        if !(epsilon > 0.0) {
            return err("field 'epsilon' must be positive");
        }

        let x0 = match (scenario, command) {
            (Scenario::Airy, Command::Validate) => raw.real("x0")?.unwrap_or(2.0),
            (Scenario::Airy, _) => raw.require_real("x0")?,
            (Scenario::LinearLayer, _) => raw.real("x0")?.unwrap_or(0.0),
        };
        if scenario == Scenario::Airy && !(x0 > 0.0) {
            return err("field 'x0' must be positive");
        }

        // for the layer the x-axis is depth z, from the caustic up to the entry plane
        let x_default = match (command, layer) {
            (_, Some(p)) => (linear_layer_caustic_depth(&p), p.h),
            (Command::Field, None) => (-1.0, 0.95 * x0),
            _ => (0.05, 0.95 * x0),
        };
        let n_default = if command == Command::Field { 400 } else { 200 };
        let x = Axis {
            min: raw.real("xmin")?.unwrap_or(x_default.0),
            max: raw.real("xmax")?.unwrap_or(x_default.1),
            n: raw.count("nx", n_default)?,
        };
        let k = Axis {
            min: raw.real("kmin")?.unwrap_or(-1.6),
            max: raw.real("kmax")?.unwrap_or(1.6),
            n: raw.count("nk", 200)?,
        };
        for (name, axis) in [("x", x), ("k", k)] {
            if axis.n < MIN_COUNT {
                return err(format!("field 'n{name}' must be at least {MIN_COUNT}"));
            }
            if !(axis.min < axis.max) {
                return err(format!("fields '{name}min' < '{name}max' required, got {} and {}", axis.min, axis.max));
            }
        }

        let defaults = QuadraturePolicy::default();
        let truncation_rule = match raw.get::<String>("truncation", "support or domain")?.as_deref() {
            // the wigner command transforms the fundamental solution, defined on the whole line
            None if command == Command::Wigner => TruncationRule::DomainLimited,
            None => defaults.truncation_rule,
            Some("support") => TruncationRule::SupportLimited,
            Some("domain") => TruncationRule::DomainLimited,
            Some(other) => {
                return err(format!("invalid value '{other}' for field 'truncation' (expected support or domain)"))
            }
        };
        let quadrature = QuadraturePolicy {
            sigma_samples: raw.count("sigma_samples", defaults.sigma_samples)?,
            taper_fraction: raw.real("taper")?.unwrap_or(defaults.taper_fraction),
            truncation_rule,
            support_margin: raw.real("support_margin")?.unwrap_or(defaults.support_margin),
        };
        quadrature.validate().map_err(|e| ConfigError(format!("invalid quadrature policy: {e}")))?;

        let nrays = raw.count("nrays", 21)?;
        if nrays < 2 {
            return err("field 'nrays' must be at least 2");
        }

        let (mut csv, mut json) = (false, false);
        let formats = raw.get::<String>("format", "a list drawn from csv,json")?.unwrap_or_else(|| "csv".into());
        for f in formats.split(',').map(str::trim) {
            match f {
                "csv" => csv = true,
                "json" => json = true,
                other => return err(format!("invalid value '{other}' for field 'format' (expected csv and/or json)")),
            }
        }

        Ok(Self {
            command,
            scenario,
            epsilon,
            x0,
            layer,
            x,
            k,
            quadrature,
            nrays,
            random_points: raw.count("random_points", 10_000)?,
            out: raw.get::<PathBuf>("out", "a directory path")?.unwrap_or_else(|| PathBuf::from("foldwave-out")),
            csv,
            json,
            seed: raw.get::<u64>("seed", "a non-negative integer")?.unwrap_or(20240601),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pairs: &[(&str, &str)]) -> RawConfig {
        let mut r = RawConfig::default();
        for (k, v) in pairs {
            r.set_flag(k, v.to_string());
        }
        r
    }

    #[test]
    fn file_values_are_overridden_by_flags() {
        let mut r = RawConfig::parse_file(Path::new("a.cfg"), "epsilon = 0.1\n# note\nx0=2\n").unwrap();
        r.set_flag("epsilon", "0.05".into());
        let c = RunConfig::from_raw(Command::Wigner, &r).unwrap();
        assert_eq!(c.epsilon, 0.05);
        assert_eq!(c.x0, 2.0);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = RawConfig::parse_file(Path::new("a.cfg"), "epsilon=0.1\nbogus=1\n").unwrap_err();
        assert!(e.0.contains("a.cfg:2") && e.0.contains("bogus"), "{e}");
        let r = RawConfig::parse_file(Path::new("a.cfg"), "epsilon=abc\nx0=1\n").unwrap();
        let e = RunConfig::from_raw(Command::Field, &r).unwrap_err();
        assert!(e.0.contains("a.cfg:1") && e.0.contains("epsilon"), "{e}");
    }

    #[test]
    fn missing_and_invalid_fields() {
        let e = RunConfig::from_raw(Command::Wigner, &raw(&[("x0", "2")])).unwrap_err();
        assert!(e.0.contains("'epsilon'"));
        let e = RunConfig::from_raw(Command::Wigner, &raw(&[("epsilon", "0.1")])).unwrap_err();
        assert!(e.0.contains("'x0'"));
        let e =
            RunConfig::from_raw(Command::Wigner, &raw(&[("epsilon", "0.1"), ("x0", "2"), ("nx", "4")])).unwrap_err();
        assert!(e.0.contains("'nx'"));
        let e = RunConfig::from_raw(Command::Wigner, &raw(&[("epsilon", "-1"), ("x0", "2")])).unwrap_err();
        assert!(e.0.contains("positive"));
        let e = RunConfig::from_raw(
            Command::Wigner,
            &raw(&[("epsilon", "0.1"), ("x0", "2"), ("kmin", "1"), ("kmax", "0")]),
        )
        .unwrap_err();
        assert!(e.0.contains("kmin"));
    }

    #[test]
    fn layer_scenario_derives_epsilon() {
        let r = raw(&[
            ("scenario", "linear_layer"),
            ("mu1", "1"),
            ("h", "1"),
            ("eta0", "1.2"),
            ("psi", "0.5"),
            ("kappa0", "10"),
        ]);
        let c = RunConfig::from_raw(Command::Rays, &r).unwrap();
        assert!((c.epsilon - 0.01).abs() < 1e-15);
        let e = RunConfig::from_raw(Command::Wigner, &r).unwrap_err();
        assert!(e.0.contains("airy"));
    }
}
