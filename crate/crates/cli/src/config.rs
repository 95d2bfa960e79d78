//! Run configuration: a flat `key = value` file plus command-line
//! overrides. Flags win over the file; the file wins over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use emdecay::TargetParams;

use crate::error::{CliError, CliResult};

/// Every key accepted in a config file. Command-line flags use the same
/// names with `-` for `_`.
pub const KEYS: &[&str] = &[
    "mu_c",
    "mu_b",
    "mu_ratio",
    "sigma_c",
    "length",
    "sigma_b",
    "distance",
    "l_max",
    "l",
    "roots",
    "mesh_level",
    "mesh",
    "modes",
    "tmin",
    "tmax",
    "points",
    "spacing",
    "models",
    "out",
    "input",
    "column",
    "windows",
    "panel",
];

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Default,
    File { path: String, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

/// Raw settings before typing.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    entries: BTreeMap<String, (String, Origin)>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>, origin: Origin) -> CliResult<()> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("{origin}: unknown key `{key}`")));
        }
        self.entries.insert(key, (value.into(), origin));
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse_file(&mut self, path: &str, text: &str) -> CliResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::File {
                path: path.to_string(),
                line: i + 1,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{origin}: expected `key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(CliError::Config(format!("{origin}: empty key or value")));
            }
            self.set(k, v, origin)?;
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&(String, Origin)> {
        self.entries.get(key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &'static str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((v, origin)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("field `{key}` ({origin}): cannot parse `{v}`: {e}"))),
        }
    }

    fn origin(&self, key: &str) -> Origin {
        self.get(key).map(|(_, o)| o.clone()).unwrap_or(Origin::Default)
    }

    fn invalid(&self, key: &'static str, reason: impl fmt::Display) -> CliError {
        CliError::Config(format!("field `{key}` ({}): {reason}", self.origin(key)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// Curve families emitted by `decay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Exact,
    Early,
    EarlyEarly,
    LateEarly,
    /// `-dH_l/dt` of the early-time form and its two power-law asymptotes.
    Voltage,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::Exact,
        Model::Early,
        Model::EarlyEarly,
        Model::LateEarly,
        Model::Voltage,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Model::Exact => "exact",
            Model::Early => "early",
            Model::EarlyEarly => "early_early",
            Model::LateEarly => "late_early",
            Model::Voltage => "voltage",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Model::ALL.iter().copied().find(|m| m.name() == s)
    }
}

/// The three decay-curve panels, by permeability contrast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Mu1,
    Mu5,
    Mu100,
}

impl Panel {
    pub const ALL: [Panel; 3] = [Panel::Mu1, Panel::Mu5, Panel::Mu100];

    pub fn mu_ratio(&self) -> f64 {
        match self {
            Panel::Mu1 => 1.0,
            Panel::Mu5 => 5.0,
            Panel::Mu100 => 100.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Panel::Mu1),
            "5" => Some(Panel::Mu5),
            "100" => Some(Panel::Mu100),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Panel::Mu1 => "1",
            Panel::Mu5 => "5",
            Panel::Mu100 => "100",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelChoice {
    One(Panel),
    All,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: TargetParams,
    pub l_values: Vec<usize>,
    /// Roots per order for `spectrum`.
    pub roots: usize,
    pub mesh_level: u32,
    pub mesh: Option<PathBuf>,
    pub modes: usize,
    /// Time grid; seconds for `decay`, units of tau_c for `fig3`.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: usize,
    pub spacing: Spacing,
    pub models: Vec<Model>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    /// Value column read by `fit`.
    pub column: String,
    pub windows: Vec<(f64, f64)>,
    pub panel: Option<PanelChoice>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> CliResult<Self> {
        let mut mu_c = s.parsed::<f64>("mu_c")?.unwrap_or(100.0);
        let mu_b = s.parsed::<f64>("mu_b")?.unwrap_or(1.0);
        if let Some(r) = s.parsed::<f64>("mu_ratio")? {
            if !(r.is_finite() && r > 0.0) {
                return Err(s.invalid("mu_ratio", format!("must be finite and > 0, got {r}")));
            }
            mu_c = r * mu_b;
        }
        let sigma_c = s.parsed::<f64>("sigma_c")?.unwrap_or(1e7);
        let length = s.parsed::<f64>("length")?.unwrap_or(0.05);
        let mut params = TargetParams {
            mu_c,
            mu_b,
            sigma_c,
            length,
            sigma_b: None,
            distance: None,
        };
        if let Err(e) = params.validate() {
            let key = match &e {
                emdecay::Error::InvalidParameter { field, .. } => match *field {
                    "mu_c" if s.get("mu_ratio").is_some() => "mu_ratio",
                    "mu_c/mu_b" => "mu_c",
                    f => KEYS.iter().copied().find(|k| *k == f).unwrap_or("mu_c"),
                },
                _ => "mu_c",
            };
            return Err(s.invalid(key, e));
        }
        if let Some(b) = s.parsed::<f64>("sigma_b")? {
            params = params.with_background(b).map_err(|e| s.invalid("sigma_b", e))?;
        }
        if let Some(d) = s.parsed::<f64>("distance")? {
            params = params.with_distance(d).map_err(|e| s.invalid("distance", e))?;
        }

        let l_values = match (s.get("l"), s.parsed::<usize>("l_max")?) {
            (Some((list, _)), _) => {
                let v: Vec<usize> = list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| s.invalid("l", format!("expected a comma-separated list of orders: {e}")))?;
                if v.is_empty() || v.contains(&0) {
                    return Err(s.invalid("l", "orders must be >= 1"));
                }
                v
            }
            (None, Some(0)) => return Err(s.invalid("l_max", "must be >= 1")),
            (None, Some(m)) => (1..=m).collect(),
            (None, None) => (1..=5).collect(),
        };

        let roots = s.parsed::<usize>("roots")?.unwrap_or(10);
        if roots == 0 {
            return Err(s.invalid("roots", "must be >= 1"));
        }
        let mesh_level = s.parsed::<u32>("mesh_level")?.unwrap_or(3);
        if mesh_level > 5 {
            return Err(s.invalid("mesh_level", format!("{mesh_level} exceeds 5 (dense solves)")));
        }
        let modes = s.parsed::<usize>("modes")?.unwrap_or(15);
        if modes == 0 {
            return Err(s.invalid("modes", "must be >= 1"));
        }

        let t_min = s.parsed::<f64>("tmin")?;
        let t_max = s.parsed::<f64>("tmax")?;
        if let Some(t) = t_min {
            if !(t.is_finite() && t > 0.0) {
                return Err(s.invalid("tmin", format!("must be finite and > 0, got {t}")));
            }
        }
        if let Some(t) = t_max {
            if !t.is_finite() {
                return Err(s.invalid("tmax", format!("must be finite, got {t}")));
            }
        }
        if let (Some(a), Some(b)) = (t_min, t_max) {
            if !(b > a) {
                return Err(s.invalid("tmax", format!("must exceed tmin = {a}, got {b}")));
            }
        }
        let points = s.parsed::<usize>("points")?.unwrap_or(200);
        if points < 2 {
            return Err(s.invalid("points", format!("must be >= 2, got {points}")));
        }
        let spacing = match s.get("spacing").map(|(v, _)| v.as_str()) {
            None | Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => return Err(s.invalid("spacing", format!("expected log or linear, got `{other}`"))),
        };
        let models = match s.get("models") {
            None => Model::ALL.to_vec(),
            Some((list, _)) => list
                .split(',')
                .map(|m| Model::parse(m.trim()))
                .collect::<Option<Vec<_>>>()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| {
                    s.invalid(
                        "models",
                        "expected a list from exact, early, early_early, late_early, voltage",
                    )
                })?,
        };
        let windows = match s.get("windows") {
            None => Vec::new(),
            Some((list, _)) => parse_windows(list).map_err(|e| s.invalid("windows", e))?,
        };
        let panel = match s.get("panel").map(|(v, _)| v.as_str()) {
            None => None,
            Some("all") => Some(PanelChoice::All),
            Some(v) => Some(PanelChoice::One(Panel::parse(v).ok_or_else(|| {
                s.invalid("panel", format!("expected 1, 5, 100 or all, got `{v}`"))
            })?)),
        };
        let path = |k: &str| s.get(k).map(|(v, _)| PathBuf::from(v));
        Ok(RunConfig {
            params,
            l_values,
            roots,
            mesh_level,
            mesh: path("mesh"),
            modes,
            t_min,
            t_max,
            points,
            spacing,
            models,
            out: path("out"),
            input: path("input"),
            column: s
                .get("column")
                .map(|(v, _)| v.clone())
                .unwrap_or_else(|| "V".to_string()),
            windows,
            panel,
        })
    }

    /// Time grid on `[t_min, t_max]`, with defaults used where unset.
    pub fn grid(&self, default_min: f64, default_max: f64) -> CliResult<Vec<f64>> {
        let lo = self.t_min.unwrap_or(default_min);
        let hi = self.t_max.unwrap_or(default_max);
        if !(lo > 0.0 && hi > lo) {
            return Err(CliError::Config(format!(
                "field `tmax`: time range [{lo}, {hi}] is empty (tmin must be > 0 and below tmax)"
            )));
        }
        Ok(match self.spacing {
            Spacing::Log => emdecay::fit::log_grid(lo, hi, self.points),
            Spacing::Linear => (0..self.points)
                .map(|i| {
                    if i + 1 == self.points {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (self.points - 1) as f64
                    }
                })
                .collect(),
        })
    }
}

/// `lo:hi,lo:hi` fit windows.
pub fn parse_windows(text: &str) -> Result<Vec<(f64, f64)>, String> {
    text.split(',')
        .map(|w| {
            let (a, b) = w.split_once(':').ok_or_else(|| format!("window `{w}` is not lo:hi"))?;
            let lo = a.trim().parse::<f64>().map_err(|e| format!("window `{w}`: {e}"))?;
            let hi = b.trim().parse::<f64>().map_err(|e| format!("window `{w}`: {e}"))?;
            if !(lo > 0.0 && hi > lo) {
                return Err(format!("window `{w}` must satisfy 0 < lo < hi"));
            }
            Ok((lo, hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_file(text: &str) -> CliResult<RunConfig> {
        let mut s = Settings::default();
        s.parse_file("run.cfg", text)?;
        RunConfig::from_settings(&s)
    }

    fn message(r: CliResult<RunConfig>) -> String {
        match r {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_are_steel_like() {
        let c = from_file("").unwrap();
        assert_eq!(c.params.mu_ratio(), 100.0);
        assert_eq!(c.l_values, [1, 2, 3, 4, 5]);
        assert_eq!(c.points, 200);
        assert_eq!(c.models.len(), 5);
        assert_eq!(c.column, "V");
    }

    #[test]
    fn file_values_and_comments() {
        let c = from_file(
            "# target\nmu_ratio = 5\nsigma_c=3.5e7 # aluminium-ish\n\nl = 1, 3\nwindows = 1e-4:1e-2, 1e2:1e4\n",
        )
        .unwrap();
        assert_eq!(c.params.mu_ratio(), 5.0);
        assert_eq!(c.params.sigma_c, 3.5e7);
        assert_eq!(c.l_values, [1, 3]);
        assert_eq!(c.windows, [(1e-4, 1e-2), (1e2, 1e4)]);
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::default();
        s.parse_file("a", "points = 10\nmu_ratio = 5").unwrap();
        s.set("points", "20", Origin::Flag).unwrap();
        s.set("mu-ratio", "1", Origin::Flag).unwrap();
        let c = RunConfig::from_settings(&s).unwrap();
        assert_eq!((c.points, c.params.mu_ratio()), (20, 1.0));
    }

    #[test]
    fn errors_name_field_and_line() {
        let m = message(from_file("points = 10\ntmin = -1\n"));
        assert!(m.contains("`tmin`") && m.contains("run.cfg:2"), "{m}");
        let m = message(from_file("points = 1\n"));
        assert!(m.contains("`points`") && m.contains("run.cfg:1"), "{m}");
        let m = message(from_file("tmin = 1\ntmax = 0.5\n"));
        assert!(m.contains("`tmax`") && m.contains(":2"), "{m}");
        let m = message(from_file("bogus = 3\n"));
        assert!(m.contains("unknown key `bogus`") && m.contains(":1"), "{m}");
        let m = message(from_file("sigma_c = 0\n"));
        assert!(m.contains("`sigma_c`"), "{m}");
        let m = message(from_file("mu_ratio = -2\n"));
        assert!(m.contains("`mu_ratio`"), "{m}");
        let m = message(from_file("\n\njust text\n"));
        assert!(m.contains("run.cfg:3"), "{m}");
        let m = message(from_file("length = abc\n"));
        assert!(m.contains("`length`"), "{m}");
        let m = message(from_file("panel = 7\n"));
        assert!(m.contains("`panel`"), "{m}");
        let m = message(from_file("windows = 3:1\n"));
        assert!(m.contains("`windows`"), "{m}");
    }

    #[test]
    fn grids() {
        let c = from_file("points = 5\nspacing = linear").unwrap();
        assert_eq!(c.grid(1.0, 5.0).unwrap(), [1.0, 2.0, 3.0, 4.0, 5.0]);
        let c = from_file("points = 3\ntmin = 1e-4\ntmax = 1").unwrap();
        let g = c.grid(9.0, 10.0).unwrap();
        assert_eq!((g[0], g[2]), (1e-4, 1.0));
        assert!((g[1] - 1e-2).abs() < 1e-16);
    }
}
