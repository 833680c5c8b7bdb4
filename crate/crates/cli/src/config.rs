//! Resolved run configuration: built-in defaults, overlaid by the TOML file,
//! overlaid by command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use gevrey_core::scalar::{parse_rational, DEFAULT_PRECISION_BITS};
use gevrey_core::{NumericMode, Sigma};
use gevrey_spectral::PhaseConvention;
use rug::Rational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const COMMANDS: [&str; 6] = [
    "timejet",
    "sharpness",
    "majorant",
    "combinatorics",
    "spectral",
    "profile",
];

/// A number kept as written, so exact rationals like `3/2` survive.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NumText(pub String);

impl NumText {
    pub fn new(s: &str) -> Self {
        NumText(s.to_string())
    }

    pub fn rational(&self, name: &str) -> Result<Rational, CliError> {
        parse_rational(&self.0).ok_or_else(|| {
            CliError::Usage(format!("{name}: cannot parse `{}` as a number", self.0))
        })
    }

    pub fn sigma(&self) -> Result<Sigma, CliError> {
        Sigma::new(self.rational("sigma")?).map_err(|e| CliError::Usage(format!("sigma: {e}")))
    }
}

impl fmt::Display for NumText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NumText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Real(f64),
        }
        Ok(NumText(match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Int(i) => i.to_string(),
            Raw::Real(x) => x.to_string(),
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CommonConfig {
    pub output_dir: PathBuf,
    pub format: Format,
    pub precision_bits: Option<u32>,
    pub exact: bool,
    pub float: bool,
}

impl Default for CommonConfig {
    fn default() -> Self {
        CommonConfig {
            output_dir: PathBuf::from("gevrey-out"),
            format: Format::Csv,
            precision_bits: None,
            exact: false,
            float: false,
        }
    }
}

impl CommonConfig {
    /// Exact for integer sigma unless `--float`; big-float otherwise.
    pub fn mode_for(&self, sigma: &Sigma) -> Result<NumericMode, CliError> {
        if self.exact && self.float {
            return Err(CliError::Usage(
                "--exact and --float are mutually exclusive".into(),
            ));
        }
        if self.exact {
            if sigma.integer().is_none() {
                return Err(CliError::Usage(format!(
                    "--exact needs an integer sigma, got {sigma}"
                )));
            }
            return Ok(NumericMode::Exact);
        }
        if self.float || sigma.integer().is_none() {
            let bits = self.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
            return NumericMode::float(bits).map_err(|e| CliError::Usage(e.to_string()));
        }
        Ok(NumericMode::Exact)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub model: String,
    pub alpha_c: NumText,
    pub beta: NumText,
    pub delta: NumText,
    pub sigma: NumText,
    pub j_max: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            model: "kp1_5".into(),
            alpha_c: NumText::new("0"),
            beta: NumText::new("1"),
            delta: NumText::new("1"),
            sigma: NumText::new("1"),
            j_max: 8,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TimejetConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub nx_out: usize,
    pub ny_out: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SharpnessConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub j0: usize,
    pub j_min: usize,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        SharpnessConfig {
            model: ModelConfig::default(),
            j0: 1,
            j_min: gevrey_core::growth::DEFAULT_J_MIN,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MajorantConfig {
    pub sigma: NumText,
    pub find_c: bool,
    pub k_max: usize,
    pub c: Option<NumText>,
    pub epsilon: Option<NumText>,
    pub c1: NumText,
    pub alpha_c: NumText,
    pub j_max: usize,
    pub estimate: bool,
    pub estimate_j: usize,
    pub lm_max: usize,
}

impl Default for MajorantConfig {
    fn default() -> Self {
        MajorantConfig {
            sigma: NumText::new("1"),
            find_c: false,
            k_max: 200,
            c: None,
            epsilon: None,
            c1: NumText::new("1"),
            alpha_c: NumText::new("0"),
            j_max: gevrey_core::majorant::P3_J_MAX,
            estimate: false,
            estimate_j: 4,
            lm_max: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CombinatoricsConfig {
    pub l_max: usize,
    pub m_max: usize,
    pub j_max: usize,
    pub n_max: usize,
    pub exhaustive: bool,
    pub pascal_n: usize,
    pub pascal_t: usize,
}

impl Default for CombinatoricsConfig {
    fn default() -> Self {
        CombinatoricsConfig {
            l_max: 6,
            m_max: 6,
            j_max: 4,
            n_max: 12,
            exhaustive: false,
            pascal_n: 5,
            pascal_t: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nx: 128,
            ny: 64,
            lx: 2.0 * PI,
            ly: 2.0 * PI,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<gevrey_spectral::Grid, CliError> {
        gevrey_spectral::Grid::new(self.nx, self.ny, self.lx, self.ly)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    #[serde(flatten)]
    pub grid: GridConfig,
    pub input: Option<PathBuf>,
    pub delta: f64,
    pub sigma: f64,
    pub amplitude: f64,
    pub dt: f64,
    pub t_end: f64,
    pub alpha_c: f64,
    pub dealias_fraction: f64,
    pub snapshot_every: usize,
    pub linear: bool,
    pub b: f64,
    pub phase: PhaseConvention,
    pub norm_delta: f64,
    pub s1: f64,
    pub s2: f64,
    pub write_fields: bool,
    pub l2_tol: f64,
    pub persistence: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            grid: GridConfig::default(),
            input: None,
            delta: 1.0,
            sigma: 1.0,
            amplitude: 1.0,
            dt: 1e-4,
            t_end: 0.1,
            alpha_c: 0.0,
            dealias_fraction: 2.0 / 3.0,
            snapshot_every: 100,
            linear: false,
            b: gevrey_spectral::BourgainParams::DEFAULT_B,
            phase: PhaseConvention::Equation,
            norm_delta: 0.5,
            s1: 0.0,
            s2: 0.0,
            write_fields: false,
            l2_tol: 1e-6,
            persistence: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileConfig {
    #[serde(flatten)]
    pub grid: GridConfig,
    pub delta: f64,
    pub sigma: NumText,
    pub amplitude: f64,
    pub jet_order: Option<usize>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            grid: GridConfig::default(),
            delta: 1.0,
            sigma: NumText::new("1"),
            amplitude: 1.0,
            jet_order: None,
        }
    }
}

/// Parsed TOML file: top-level keys for the common options, one table per command.
#[derive(Debug, Default)]
pub struct FileConfig {
    table: Map<String, Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let value: toml::Value = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        match serde_json::to_value(value) {
            Ok(Value::Object(table)) => Ok(FileConfig { table }),
            _ => Err(CliError::Usage(format!(
                "config {}: expected a table",
                path.display()
            ))),
        }
    }

    pub fn common(&self) -> Map<String, Value> {
        self.table
            .iter()
            .filter(|(k, _)| !COMMANDS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn section(&self, command: &str) -> Result<Map<String, Value>, CliError> {
        match self.table.get(command) {
            None => Ok(Map::new()),
            Some(Value::Object(m)) => Ok(m.clone()),
            Some(_) => Err(CliError::Usage(format!(
                "config: `{command}` must be a table"
            ))),
        }
    }
}

/// Overlays `flags` (absent options and unset switches skipped) on `file`
/// and fills the rest from `T::default()`. Unknown keys are rejected.
pub fn resolve<T>(
    file: Map<String, Value>,
    flags: &impl Serialize,
    what: &str,
) -> Result<T, CliError>
where
    T: DeserializeOwned + Serialize + Default,
{
    let mut merged = file;
    if let Ok(Value::Object(f)) = serde_json::to_value(flags) {
        for (k, v) in f {
            if !matches!(v, Value::Null | Value::Bool(false)) {
                merged.insert(k, v);
            }
        }
    }
    let known = match serde_json::to_value(T::default()) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    if let Some(k) = merged.keys().find(|k| !known.contains_key(*k)) {
        return Err(CliError::Usage(format!("{what}: unknown option `{k}`")));
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: Map<String, Value> =
            serde_json::from_str(r#"{"j_max": 3, "sigma": 2, "model": "kawahara"}"#).unwrap();
        let flags = serde_json::json!({"j_max": 5, "model": null});
        let cfg: TimejetConfig = resolve(file, &flags, "timejet").unwrap();
        assert_eq!(cfg.model.j_max, 5);
        assert_eq!(cfg.model.sigma, NumText::new("2"));
        assert_eq!(cfg.model.model, "kawahara");
        assert_eq!(cfg.nx_out, 0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let file: Map<String, Value> = serde_json::from_str(r#"{"jmax": 3}"#).unwrap();
        let err = resolve::<TimejetConfig>(file, &serde_json::json!({}), "timejet").unwrap_err();
        assert!(err.to_string().contains("jmax"));
    }

    #[test]
    fn modes() {
        let one = Sigma::from_u32(1).unwrap();
        let half = NumText::new("3/2").sigma().unwrap();
        let c = CommonConfig::default();
        assert_eq!(c.mode_for(&one).unwrap(), NumericMode::Exact);
        assert!(!c.mode_for(&half).unwrap().is_exact());
        let exact = CommonConfig {
            exact: true,
            ..CommonConfig::default()
        };
        assert!(exact.mode_for(&half).is_err());
        let low = CommonConfig {
            float: true,
            precision_bits: Some(64),
            ..CommonConfig::default()
        };
        assert!(low.mode_for(&one).is_err());
    }
}
