//! Experiment configuration.
//!
//! Two encodings are accepted. A JSON document deserializing into
//! [`ExperimentConfig`], or a flat `key = value` text file:
//!
//! ```text
//! # case 1: six samples, interior target
//! case            = case1
//! testbed         = burgers
//! grid            = 512
//! length          = 1.0
//! final_time      = 1.0
//! snapshots       = 200
//! initial         = random_fourier     # zero | sine | random_fourier
//! offset          = 0.0
//! amplitude       = 0.5
//! fourier_modes   = 6                  # random_fourier only
//! wavenumber      = 1                  # sine only
//! dt              = 5e-5               # optional, stable step otherwise
//! sampling        = 100, 120, 130, 160, 170, 200
//! target          = 110
//! modes           = 10
//! methods         = reference, neville, amsallem, standard
//! reference_index = 0                  # optional, amsallem only
//! output          = out/case1
//! seed            = 0
//! workers         = 4                  # optional
//! ```
//!
//! Blank lines and `#` comments are ignored, lists are comma separated and
//! may be wrapped in `()` or `[]`. Unknown and repeated keys are errors.
//! The experiment `seed` replaces the testbed seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grassmann_core::interp::Method;
use grassmann_core::testbed::{BurgersConfig, InitialCondition};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Reference,
    Neville,
    Amsallem,
    Standard,
}

impl MethodChoice {
    pub const ALL: [MethodChoice; 4] = [
        MethodChoice::Reference,
        MethodChoice::Neville,
        MethodChoice::Amsallem,
        MethodChoice::Standard,
    ];

    /// Interpolator behind the choice; `None` for the reference basis.
    pub fn interpolator(self) -> Option<Method> {
        match self {
            MethodChoice::Reference => None,
            MethodChoice::Neville => Some(Method::Neville),
            MethodChoice::Amsallem => Some(Method::Amsallem),
            MethodChoice::Standard => Some(Method::Standard),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::Reference => "reference",
            MethodChoice::Neville => "neville",
            MethodChoice::Amsallem => "amsallem",
            MethodChoice::Standard => "standard",
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodChoice {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        MethodChoice::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                CliError::config(format!(
                    "unknown method `{s}` (expected reference, neville, amsallem or standard)"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestbedSpec {
    Burgers(BurgersConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_case")]
    pub case: String,
    pub testbed: TestbedSpec,
    pub sampling: Vec<f64>,
    pub target: f64,
    pub modes: usize,
    pub methods: Vec<MethodChoice>,
    #[serde(default)]
    pub reference_index: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for the HDM solves; all cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_case() -> String {
    "case".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Reads a config file: JSON when the extension is `.json` or the
    /// content starts with `{`, the flat grammar otherwise.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        let cfg = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        } else {
            Self::parse_flat(&text)?
        };
        cfg.validated()
    }

    pub fn parse_flat(text: &str) -> CliResult<Self> {
        let mut entries = FlatEntries::parse(text)?;
        let initial = match entries.take("initial")?.as_deref().unwrap_or("sine") {
            "zero" => InitialCondition::Zero,
            "sine" => InitialCondition::Sine {
                offset: entries.number("offset")?.unwrap_or(1.0),
                amplitude: entries.number("amplitude")?.unwrap_or(0.5),
                wavenumber: entries.integer("wavenumber")?.unwrap_or(1) as u32,
            },
            "random_fourier" => InitialCondition::RandomFourier {
                offset: entries.number("offset")?.unwrap_or(0.0),
                amplitude: entries.number("amplitude")?.unwrap_or(0.5),
                modes: entries.integer("fourier_modes")?.unwrap_or(6) as u32,
            },
            other => {
                return Err(CliError::config(format!(
                    "unknown initial condition `{other}` (expected zero, sine or random_fourier)"
                )))
            }
        };
        match entries.take("testbed")?.as_deref().unwrap_or("burgers") {
            "burgers" => {}
            other => return Err(CliError::config(format!("unknown testbed `{other}`"))),
        }
        let defaults = BurgersConfig::default();
        let seed = entries.integer("seed")?.unwrap_or(0);
        let burgers = BurgersConfig {
            grid: entries
                .integer("grid")?
                .map_or(defaults.grid, |v| v as usize),
            length: entries.number("length")?.unwrap_or(defaults.length),
            final_time: entries.number("final_time")?.unwrap_or(defaults.final_time),
            snapshots: entries
                .integer("snapshots")?
                .map_or(defaults.snapshots, |v| v as usize),
            initial,
            dt: entries.number("dt")?,
            seed,
        };
        let cfg = ExperimentConfig {
            case: entries.take("case")?.unwrap_or_else(default_case),
            testbed: TestbedSpec::Burgers(burgers),
            sampling: entries.numbers("sampling")?.unwrap_or_default(),
            target: entries
                .number("target")?
                .ok_or_else(|| CliError::config("missing key `target`"))?,
            modes: entries
                .integer("modes")?
                .ok_or_else(|| CliError::config("missing key `modes`"))?
                as usize,
            methods: match entries.list("methods")? {
                Some(items) => items.iter().map(|m| m.parse()).collect::<CliResult<_>>()?,
                None => MethodChoice::ALL.to_vec(),
            },
            reference_index: entries.integer("reference_index")?.map(|v| v as usize),
            output: entries
                .take("output")?
                .map_or_else(default_output, PathBuf::from),
            seed,
            workers: entries.integer("workers")?.map(|v| v as usize),
        };
        entries.finish()?;
        Ok(cfg)
    }

    /// Checks the invariants and normalizes the sampling order.
    pub fn validated(mut self) -> CliResult<Self> {
        if self.sampling.is_empty() {
            return Err(CliError::config("sampling list is empty"));
        }
        if self.sampling.iter().any(|v| !v.is_finite()) || !self.target.is_finite() {
            return Err(CliError::config(
                "sampling values and target must be finite",
            ));
        }
        self.sampling.sort_by(f64::total_cmp);
        if self.sampling.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::config("sampling values must be distinct"));
        }
        if self.modes == 0 {
            return Err(CliError::config("modes must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(CliError::config("methods list is empty"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(CliError::config("methods list has duplicates"));
        }
        if let Some(r) = self.reference_index {
            if r >= self.sampling.len() {
                return Err(CliError::config(format!(
                    "reference_index {r} out of range for {} samples",
                    self.sampling.len()
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(CliError::config("workers must be at least 1"));
        }
        let TestbedSpec::Burgers(b) = &mut self.testbed;
        b.seed = self.seed;
        if self.modes >= b.snapshots {
            return Err(CliError::config(format!(
                "modes ({}) must be below the snapshot count ({})",
                self.modes, b.snapshots
            )));
        }
        if self
            .sampling
            .iter()
            .chain([&self.target])
            .any(|&l| l <= 0.0)
        {
            return Err(CliError::config(
                "parameters map to viscosity 1/lambda and must be positive",
            ));
        }
        Ok(self)
    }

    pub fn burgers(&self) -> &BurgersConfig {
        match &self.testbed {
            TestbedSpec::Burgers(b) => b,
        }
    }

    pub fn burgers_mut(&mut self) -> &mut BurgersConfig {
        match &mut self.testbed {
            TestbedSpec::Burgers(b) => b,
        }
    }

    pub fn wants_reference(&self) -> bool {
        self.methods.contains(&MethodChoice::Reference)
    }
}

/// Parsed `key = value` lines, consumed key by key.
struct FlatEntries {
    values: BTreeMap<String, (usize, String)>,
}

impl FlatEntries {
    fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {}: expected `key = value`",
                    k + 1
                )));
            };
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(CliError::config(format!("line {}: empty key", k + 1)));
            }
            if values
                .insert(key.clone(), (k + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::config(format!(
                    "line {}: key `{key}` repeated",
                    k + 1
                )));
            }
        }
        Ok(Self { values })
    }

    fn take(&mut self, key: &str) -> CliResult<Option<String>> {
        Ok(self.values.remove(key).map(|(_, v)| v))
    }

    fn take_with_line(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn number(&mut self, key: &str) -> CliResult<Option<f64>> {
        self.take_with_line(key)
            .map(|(line, v)| {
                v.parse::<f64>().map_err(|_| {
                    CliError::config(format!("line {line}: `{key}` expects a number, got `{v}`"))
                })
            })
            .transpose()
    }

    fn integer(&mut self, key: &str) -> CliResult<Option<u64>> {
        self.take_with_line(key)
            .map(|(line, v)| {
                v.parse::<u64>().map_err(|_| {
                    CliError::config(format!(
                        "line {line}: `{key}` expects a non-negative integer, got `{v}`"
                    ))
                })
            })
            .transpose()
    }

    fn list(&mut self, key: &str) -> CliResult<Option<Vec<String>>> {
        Ok(self.take_with_line(key).map(|(_, v)| {
            let inner = v
                .trim()
                .trim_start_matches(['(', '['])
                .trim_end_matches([')', ']']);
            inner
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        }))
    }

    fn numbers(&mut self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(items) = self.list(key)? else {
            return Ok(None);
        };
        items
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::config(format!("`{key}` entry `{s}` is not a number")))
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }

    fn finish(self) -> CliResult<()> {
        match self.values.into_iter().next() {
            Some((key, (line, _))) => Err(CliError::config(format!(
                "line {line}: unknown key `{key}`"
            ))),
            None => Ok(()),
        }
    }
}
