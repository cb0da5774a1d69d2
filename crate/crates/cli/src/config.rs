//! Job configuration files.
//!
//! A configuration is a TOML document: top-level `key = value` lines and one
//! `[[ring]]` section per ring.
//!
//! ```toml
//! n = 4
//! kind = "homogeneous"      # or "vortex"
//! gamma = -1.5              # homogeneous only; defaults to -1.5
//! omega = "solve"           # or a number
//! free_radii = [2]          # rings whose radius the solver may move
//!
//! [tolerances]
//! oracle = 1e-8
//!
//! [outputs]
//! report = true
//! csv = true
//! diagrams = false
//!
//! [[ring]]
//! kind = "center"
//! mass = 4.0
//!
//! [[ring]]
//! kind = "regular"
//! radius = 1.0
//! mass = 0.5
//! phase = "0"               # or "pi/n"
//!
//! [[ring]]
//! kind = "semiregular"
//! radius = 2.0
//! mass = 1.0
//! half_gap = "pi/9"
//! ```
//!
//! Validation collects every problem before reporting.

use std::path::Path;

use ringfactor_core::{Phase, PotentialKind, RingKind, RingSpec, RingSystem};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{CliError, ConfigErrors};

/// Rotation rate: given, or solved for together with the free radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OmegaSpec {
    Given(f64),
    Solve,
}

/// Gate overrides. Unset entries use the built-in thresholds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub oracle: Option<f64>,
    pub off_block: Option<f64>,
    pub algebra: Option<f64>,
    pub equivariance: Option<f64>,
    pub m_orthogonality: Option<f64>,
    pub parity: Option<f64>,
    pub classical: Option<f64>,
    pub solver: Option<f64>,
    pub hessian_fd: Option<f64>,
}

impl Tolerances {
    const KEYS: [&'static str; 9] = [
        "oracle",
        "off_block",
        "algebra",
        "equivariance",
        "m_orthogonality",
        "parity",
        "classical",
        "solver",
        "hessian_fd",
    ];

    /// Every gate set to `tol`.
    pub fn uniform(tol: f64) -> Self {
        let t = Some(tol);
        Self {
            oracle: t,
            off_block: t,
            algebra: t,
            equivariance: t,
            m_orthogonality: t,
            parity: t,
            classical: t,
            solver: t,
            hessian_fd: t,
        }
    }

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "oracle" => &mut self.oracle,
            "off_block" => &mut self.off_block,
            "algebra" => &mut self.algebra,
            "equivariance" => &mut self.equivariance,
            "m_orthogonality" => &mut self.m_orthogonality,
            "parity" => &mut self.parity,
            "classical" => &mut self.classical,
            "solver" => &mut self.solver,
            "hessian_fd" => &mut self.hessian_fd,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub report: bool,
    pub csv: bool,
    pub diagrams: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { report: true, csv: true, diagrams: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub n: usize,
    pub rings: Vec<RingSpec>,
    pub kind: PotentialKind,
    pub omega: OmegaSpec,
    pub free_radii: Vec<usize>,
    pub tolerances: Tolerances,
    pub outputs: Outputs,
}

impl JobConfig {
    /// The ring system at the configured radii.
    pub fn system(&self) -> Result<RingSystem, CliError> {
        RingSystem::build(self.n, &self.rings).map_err(|e| CliError::core("ring system", e))
    }

    /// SHA-256 of the canonical JSON form, so formatting and comments in
    /// the source file do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("configuration serializes");
        Sha256::digest(canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_config(path: &Path) -> Result<JobConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_config_str(&text)?)
}

pub fn parse_config_str(text: &str) -> Result<JobConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigErrors(vec![e.message().to_string()]))?;
    let mut p = Parser::default();
    let config = p.job(&table);
    if p.errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(p.errors))
    }
}

/// Parses `"0"`, `"pi/9"`, `"2*pi/7"`, `"0.3pi"`, `"pi"` or a plain number.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let Some((head, tail)) = s.split_once("pi") else {
        return s.parse().ok();
    };
    let coefficient = match head.trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t.strip_prefix('/')?.parse::<f64>().ok()?,
    };
    Some(coefficient * std::f64::consts::PI / divisor)
}

#[derive(Default)]
struct Parser {
    errors: Vec<String>,
}

impl Parser {
    fn error(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn unknown_keys(&mut self, table: &Table, allowed: &[&str], context: &str) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.error(format!("{context}unknown key '{key}'"));
            }
        }
    }

    fn number(&mut self, v: &Value, what: &str) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.error(format!("{what} must be a number, found {}", v.type_str()));
                None
            }
        }
    }

    fn required<'a>(&mut self, table: &'a Table, key: &str, context: &str) -> Option<&'a Value> {
        let v = table.get(key);
        if v.is_none() {
            self.error(format!("{context}missing key '{key}'"));
        }
        v
    }

    fn job(&mut self, t: &Table) -> JobConfig {
        self.unknown_keys(t, &["n", "kind", "gamma", "omega", "free_radii", "tolerances", "outputs", "ring"], "");

        let n = match self.required(t, "n", "") {
            Some(Value::Integer(i)) if *i >= 2 => *i as usize,
            Some(v) => {
                self.error(format!("n must be an integer >= 2, found {v}"));
                0
            }
            None => 0,
        };

        let gamma = t.get("gamma").and_then(|v| self.number(v, "gamma"));
        let kind = match t.get("kind").map(Value::as_str) {
            Some(Some("homogeneous")) => {
                PotentialKind::Homogeneous { gamma: gamma.unwrap_or(PotentialKind::NEWTONIAN_GAMMA) }
            }
            Some(Some("vortex")) => {
                if gamma.is_some() {
                    self.error("gamma is only meaningful for kind = \"homogeneous\"");
                }
                PotentialKind::Vortex
            }
            Some(other) => {
                self.error(format!("kind must be \"homogeneous\" or \"vortex\", found {other:?}"));
                PotentialKind::Vortex
            }
            None => {
                self.error("missing key 'kind'");
                PotentialKind::Vortex
            }
        };
        if let Err(e) = kind.validate() {
            self.error(e.to_string());
        }

        let omega = match t.get("omega") {
            None => OmegaSpec::Solve,
            Some(Value::String(s)) if s == "solve" => OmegaSpec::Solve,
            Some(v @ (Value::Float(_) | Value::Integer(_))) => OmegaSpec::Given(self.number(v, "omega").unwrap_or(0.0)),
            Some(v) => {
                self.error(format!("omega must be a number or \"solve\", found {v}"));
                OmegaSpec::Solve
            }
        };

        let rings = match t.get("ring") {
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .filter_map(|(i, item)| match item {
                    Value::Table(rt) => self.ring(rt, i),
                    _ => {
                        self.error(format!("ring[{i}] must be a table"));
                        None
                    }
                })
                .collect(),
            Some(_) => {
                self.error("'ring' must be written as [[ring]] sections");
                Vec::new()
            }
            None => {
                self.error("no [[ring]] sections");
                Vec::new()
            }
        };

        let free_radii = match t.get("free_radii") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .filter_map(|v| match v {
                    Value::Integer(i) if *i >= 0 && (*i as usize) < rings.len() => Some(*i as usize),
                    _ => {
                        self.error(format!("free_radii entry {v} is not a ring index (0..{})", rings.len()));
                        None
                    }
                })
                .collect(),
            Some(v) => {
                self.error(format!("free_radii must be a list of ring indices, found {v}"));
                Vec::new()
            }
        };
        for &i in &free_radii {
            if matches!(rings.get(i), Some(RingSpec { kind: RingKind::Center, .. })) {
                self.error(format!("free_radii: ring {i} is the center and has no radius"));
            }
        }
        if !free_radii.is_empty() && omega != OmegaSpec::Solve {
            self.error("free_radii requires omega = \"solve\"");
        }

        let tolerances = self.tolerances(t.get("tolerances"));
        let outputs = self.outputs(t.get("outputs"));

        // Geometry is only checked once the rings themselves parsed.
        if n >= 2 && !rings.is_empty() && self.errors.is_empty() {
            if let Err(e) = RingSystem::build(n, &rings) {
                self.error(e.to_string());
            }
        }

        JobConfig { n, rings, kind, omega, free_radii, tolerances, outputs }
    }

    fn ring(&mut self, t: &Table, i: usize) -> Option<RingSpec> {
        let ctx = format!("ring[{i}]: ");
        let kind = match t.get("kind").and_then(Value::as_str) {
            Some(k @ ("center" | "regular" | "semiregular")) => k,
            Some(k) => {
                self.error(format!("{ctx}kind must be center, regular or semiregular, found \"{k}\""));
                return None;
            }
            None => {
                self.error(format!("{ctx}missing key 'kind'"));
                return None;
            }
        };
        let allowed: &[&str] = match kind {
            "center" => &["kind", "mass"],
            "regular" => &["kind", "mass", "radius", "phase"],
            _ => &["kind", "mass", "radius", "half_gap"],
        };
        self.unknown_keys(t, allowed, &ctx);

        let mass = self.required(t, "mass", &ctx).and_then(|v| self.number(v, &format!("{ctx}mass")));
        if let Some(m) = mass {
            if m == 0.0 || !m.is_finite() {
                self.error(format!("{ctx}mass must be finite and nonzero, found {m}"));
            }
        }
        let radius = if kind == "center" {
            Some(0.0)
        } else {
            let r = self.required(t, "radius", &ctx).and_then(|v| self.number(v, &format!("{ctx}radius")));
            if let Some(r) = r {
                if r <= 0.0 || !r.is_finite() {
                    self.error(format!("{ctx}radius must be positive, found {r}"));
                }
            }
            r
        };

        let spec = match kind {
            "center" => RingKind::Center,
            "regular" => {
                let phase = match t.get("phase") {
                    None => Some(Phase::Aligned),
                    Some(v) => match v.as_str().map(|s| s.replace(' ', "")) {
                        Some(s) if s == "0" => Some(Phase::Aligned),
                        Some(s) if s == "pi/n" => Some(Phase::Staggered),
                        _ => {
                            self.error(format!("{ctx}phase must be \"0\" or \"pi/n\", found {v}"));
                            None
                        }
                    },
                };
                RingKind::Regular { radius: radius?, phase: phase? }
            }
            _ => {
                let gap = match self.required(t, "half_gap", &ctx) {
                    Some(Value::String(s)) => {
                        let g = parse_angle(s);
                        if g.is_none() {
                            self.error(format!("{ctx}half_gap \"{s}\" is not an angle"));
                        }
                        g
                    }
                    Some(v) => self.number(v, &format!("{ctx}half_gap")),
                    None => None,
                }?;
                RingKind::Semiregular { radius: radius?, half_gap: gap }
            }
        };
        Some(RingSpec { kind: spec, mass: mass? })
    }

    fn tolerances(&mut self, v: Option<&Value>) -> Tolerances {
        let mut out = Tolerances::default();
        let Some(v) = v else { return out };
        let Some(t) = v.as_table() else {
            self.error("tolerances must be a table");
            return out;
        };
        self.unknown_keys(t, &Tolerances::KEYS, "tolerances: ");
        for (key, value) in t {
            let parsed = self.number(value, &format!("tolerances.{key}"));
            if let (Some(x), Some(slot)) = (parsed, out.slot(key)) {
                if x > 0.0 && x.is_finite() {
                    *slot = Some(x);
                } else {
                    self.error(format!("tolerances.{key} must be positive, found {x}"));
                }
            }
        }
        out
    }

    fn outputs(&mut self, v: Option<&Value>) -> Outputs {
        let mut out = Outputs::default();
        let Some(v) = v else { return out };
        let Some(t) = v.as_table() else {
            self.error("outputs must be a table");
            return out;
        };
        self.unknown_keys(t, &["report", "csv", "diagrams"], "outputs: ");
        for (key, value) in t {
            let Some(flag) = value.as_bool() else {
                self.error(format!("outputs.{key} must be true or false"));
                continue;
            };
            match key.as_str() {
                "report" => out.report = flag,
                "csv" => out.csv = flag,
                "diagrams" => out.diagrams = flag,
                _ => {}
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/9"), Some(PI / 9.0));
        assert_eq!(parse_angle("2*pi / 7"), Some(2.0 * PI / 7.0));
        assert_eq!(parse_angle("0.25"), Some(0.25));
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("pi/"), None);
        assert_eq!(parse_angle("half"), None);
    }

    #[test]
    fn uniform_tolerances_cover_every_key() {
        let mut t = Tolerances::uniform(1e-3);
        for key in Tolerances::KEYS {
            assert_eq!(*t.slot(key).unwrap(), Some(1e-3));
        }
    }
}
