//! Scenario files: line-oriented `key = value` pairs with `#` comments and a
//! mandatory `kind` key. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("missing `kind`")]
    MissingKind,
    #[error("unknown kind `{0}` (see `qcorr list-kinds`)")]
    UnknownKind(String),
    #[error("line {line}: unknown key `{key}` for kind `{kind}`")]
    UnknownKey {
        line: usize,
        key: String,
        kind: &'static str,
    },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{key}` for kind `{kind}`")]
    MissingKey { key: &'static str, kind: &'static str },
    #[error("key `{key}`: {reason} (got `{value}`)")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Average,
    UncertaintyClassical,
    UncertaintyQuantum,
    Eigen,
    Evolve,
    Decohere,
    ClassicalLimit,
    HbarScan,
    Atom,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Average,
        Kind::UncertaintyClassical,
        Kind::UncertaintyQuantum,
        Kind::Eigen,
        Kind::Evolve,
        Kind::Decohere,
        Kind::ClassicalLimit,
        Kind::HbarScan,
        Kind::Atom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Average => "average",
            Kind::UncertaintyClassical => "uncertainty-classical",
            Kind::UncertaintyQuantum => "uncertainty-quantum",
            Kind::Eigen => "eigen",
            Kind::Evolve => "evolve",
            Kind::Decohere => "decohere",
            Kind::ClassicalLimit => "classical-limit",
            Kind::HbarScan => "hbar-scan",
            Kind::Atom => "atom",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Kind::Average => "classical and quantum averages of an observable in a Gaussian state",
            Kind::UncertaintyClassical => "classical uncertain relation on seeded random triples",
            Kind::UncertaintyQuantum => "quantum uncertainty principle for a Gaussian, random triples or an eigenstate",
            Kind::Eigen => "lowest levels of a 1D Hamiltonian with residuals",
            Kind::Evolve => "Crank-Nicolson evolution of a Gaussian packet",
            Kind::Decohere => "diagonal and cross terms of an average in an eigenbasis",
            Kind::ClassicalLimit => "averages over narrowing Gaussians approaching a point value",
            Kind::HbarScan => "ground-state localization as hbar decreases",
            Kind::Atom => "uncertainty estimate and radial solve for a hydrogen-like ion",
        }
    }

    /// True when the scenario draws random numbers and so records its seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Kind::UncertaintyClassical | Kind::UncertaintyQuantum)
    }

    pub fn keys(self) -> &'static [KeySpec] {
        schema(self)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ScenarioError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Float,
    PositiveFloat,
    Count { min: usize },
    Seed,
    Choice(&'static [&'static str]),
    FloatList,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeySpec {
    pub name: &'static str,
    pub ty: ValueType,
    /// `None` marks a required key, except for `out` and `seed`, which are
    /// simply optional.
    pub default: Option<&'static str>,
}

const fn key(name: &'static str, ty: ValueType, default: &'static str) -> KeySpec {
    KeySpec {
        name,
        ty,
        default: Some(default),
    }
}

const fn required(name: &'static str, ty: ValueType) -> KeySpec {
    KeySpec {
        name,
        ty,
        default: None,
    }
}

const OBSERVABLES: &[&str] = &["x", "x2", "x4", "cos"];
const POSITIVE: ValueType = ValueType::PositiveFloat;
const FLOAT: ValueType = ValueType::Float;

fn schema(kind: Kind) -> &'static [KeySpec] {
    use ValueType::{Choice, Count, FloatList};
    match kind {
        Kind::Average => {
            const KEYS: &[KeySpec] = &[
                required("observable", Choice(OBSERVABLES)),
                key("center", FLOAT, "0"),
                key("width", POSITIVE, "1"),
                key("n", Count { min: 8 }, "1024"),
                key("box", POSITIVE, "10"),
                key("tolerance", POSITIVE, "1e-3"),
            ];
            KEYS
        }
        Kind::UncertaintyClassical => {
            const KEYS: &[KeySpec] = &[
                required("trials", Count { min: 1 }),
                key("xi_samples", Count { min: 1 }, "20"),
                key("n", Count { min: 8 }, "128"),
                key("box", POSITIVE, "5"),
            ];
            KEYS
        }
        Kind::UncertaintyQuantum => {
            const KEYS: &[KeySpec] = &[
                required("mode", Choice(&["gaussian", "random", "eigenstate"])),
                key("sigma", POSITIVE, "1"),
                key("center", FLOAT, "0"),
                key("k0", FLOAT, "0"),
                key("hbar", POSITIVE, "1"),
                key("trials", Count { min: 1 }, "100"),
                key("zeta_samples", Count { min: 1 }, "20"),
                key("trial_points", Count { min: 8 }, "48"),
                key("n", Count { min: 8 }, "1024"),
                key("box", POSITIVE, "12"),
                key("tolerance", POSITIVE, "1e-3"),
            ];
            KEYS
        }
        Kind::Eigen => {
            const KEYS: &[KeySpec] = &[
                required("potential", Choice(&["oscillator", "quartic", "box", "double-well"])),
                key("levels", Count { min: 1 }, "8"),
                key("n", Count { min: 8 }, "512"),
                key("box", POSITIVE, "10"),
                key("hbar", POSITIVE, "1"),
                key("mass", POSITIVE, "1"),
                key("omega", POSITIVE, "1"),
                key("tolerance", POSITIVE, "1e-3"),
            ];
            KEYS
        }
        Kind::Evolve => {
            const KEYS: &[KeySpec] = &[
                required("potential", Choice(&["free", "oscillator", "zero"])),
                key("sigma", POSITIVE, "1"),
                key("center", FLOAT, "0"),
                key("k0", FLOAT, "0"),
                key("dt", POSITIVE, "0.01"),
                key("steps", Count { min: 1 }, "200"),
                key("every", Count { min: 1 }, "10"),
                key("n", Count { min: 8 }, "1024"),
                key("box", POSITIVE, "20"),
                key("hbar", POSITIVE, "1"),
                key("mass", POSITIVE, "1"),
                key("omega", POSITIVE, "1"),
            ];
            KEYS
        }
        Kind::Decohere => {
            const KEYS: &[KeySpec] = &[
                required("operator", Choice(&["position", "hamiltonian"])),
                key("potential", Choice(&["oscillator", "quartic"]), "oscillator"),
                key("states", Count { min: 2 }, "2"),
                key("n", Count { min: 8 }, "512"),
                key("box", POSITIVE, "10"),
            ];
            KEYS
        }
        Kind::ClassicalLimit => {
            const KEYS: &[KeySpec] = &[
                required("observable", Choice(OBSERVABLES)),
                key("x0", FLOAT, "0"),
                key("widths", FloatList, "1, 0.5, 0.25, 0.125"),
                key("n", Count { min: 8 }, "2001"),
                key("box", POSITIVE, "5"),
            ];
            KEYS
        }
        Kind::HbarScan => {
            const KEYS: &[KeySpec] = &[
                required("potential", Choice(&["oscillator", "quartic"])),
                key("hbar", FloatList, "1, 0.5, 0.25"),
                key("mass", POSITIVE, "1"),
                key("n", Count { min: 8 }, "1024"),
                key("box", POSITIVE, "8"),
            ];
            KEYS
        }
        Kind::Atom => {
            const KEYS: &[KeySpec] = &[
                required("z", Count { min: 1 }),
                key("units", Choice(&["atomic", "si"]), "atomic"),
                key("radii", POSITIVE, "40"),
                key("n", Count { min: 8 }, "2000"),
                key("kappa", POSITIVE, "1"),
            ];
            KEYS
        }
    }
}

/// Keys accepted by every kind.
const COMMON: &[KeySpec] = &[
    KeySpec {
        name: "out",
        ty: ValueType::Path,
        default: None,
    },
    KeySpec {
        name: "seed",
        ty: ValueType::Seed,
        default: None,
    },
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Count(usize),
    Seed(u64),
    Choice(String),
    FloatList(Vec<f64>),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: Kind,
    pub params: BTreeMap<&'static str, Value>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn float(&self, name: &str) -> f64 {
        match self.params.get(name) {
            Some(Value::Float(v)) => *v,
            other => panic!("`{name}` is not a float parameter of {}: {other:?}", self.kind),
        }
    }

    pub fn count(&self, name: &str) -> usize {
        match self.params.get(name) {
            Some(Value::Count(v)) => *v,
            other => panic!("`{name}` is not a count parameter of {}: {other:?}", self.kind),
        }
    }

    pub fn choice(&self, name: &str) -> &str {
        match self.params.get(name) {
            Some(Value::Choice(v)) => v,
            other => panic!("`{name}` is not a choice parameter of {}: {other:?}", self.kind),
        }
    }

    pub fn list(&self, name: &str) -> &[f64] {
        match self.params.get(name) {
            Some(Value::FloatList(v)) => v,
            other => panic!("`{name}` is not a list parameter of {}: {other:?}", self.kind),
        }
    }
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_float(key: &str, raw: &str) -> Result<f64, ScenarioError> {
    let v: f64 = raw.parse().map_err(|_| invalid(key, raw, "not a number"))?;
    if !v.is_finite() {
        return Err(invalid(key, raw, "not finite"));
    }
    Ok(v)
}

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Value, ScenarioError> {
    let key = spec.name;
    Ok(match spec.ty {
        ValueType::Float => Value::Float(parse_float(key, raw)?),
        ValueType::PositiveFloat => {
            let v = parse_float(key, raw)?;
            if v <= 0.0 {
                return Err(invalid(key, raw, "must be positive"));
            }
            Value::Float(v)
        }
        ValueType::Count { min } => {
            let v: usize = raw
                .parse()
                .map_err(|_| invalid(key, raw, "not a non-negative integer"))?;
            if v < min {
                return Err(invalid(key, raw, format!("must be at least {min}")));
            }
            Value::Count(v)
        }
        ValueType::Seed => Value::Seed(
            raw.parse()
                .map_err(|_| invalid(key, raw, "not an unsigned 64-bit integer"))?,
        ),
        ValueType::Choice(options) => {
            if !options.contains(&raw) {
                return Err(invalid(key, raw, format!("expected one of {}", options.join(", "))));
            }
            Value::Choice(raw.to_string())
        }
        ValueType::FloatList => {
            let values = raw
                .split(',')
                .map(|item| parse_float(key, item.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err(invalid(key, raw, "empty list"));
            }
            Value::FloatList(values)
        }
        ValueType::Path => {
            if raw.is_empty() {
                return Err(invalid(key, raw, "empty path"));
            }
            Value::Path(PathBuf::from(raw))
        }
    })
}

/// Parses and validates a scenario. Defaults are filled in for every
/// optional key the file leaves out.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ScenarioError::Syntax { line: line_no })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ScenarioError::Syntax { line: line_no });
        }
        if entries.iter().any(|(_, k, _)| *k == key) {
            return Err(ScenarioError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        entries.push((line_no, key, value));
    }

    let kind: Kind = entries
        .iter()
        .find(|(_, k, _)| *k == "kind")
        .ok_or(ScenarioError::MissingKind)?
        .2
        .parse()?;

    let specs = kind.keys();
    let mut params = BTreeMap::new();
    let mut output_path = None;
    let mut seed = None;
    for &(line, key, raw) in entries.iter().filter(|(_, k, _)| *k != "kind") {
        let spec = specs
            .iter()
            .chain(COMMON)
            .find(|s| s.name == key)
            .ok_or_else(|| ScenarioError::UnknownKey {
                line,
                key: key.to_string(),
                kind: kind.name(),
            })?;
        match parse_value(spec, raw)? {
            Value::Path(p) => output_path = Some(p),
            Value::Seed(s) => seed = Some(s),
            v => {
                params.insert(spec.name, v);
            }
        }
    }
    for spec in specs {
        if params.contains_key(spec.name) {
            continue;
        }
        match spec.default {
            Some(raw) => {
                params.insert(spec.name, parse_value(spec, raw)?);
            }
            None => {
                return Err(ScenarioError::MissingKey {
                    key: spec.name,
                    kind: kind.name(),
                })
            }
        }
    }
    Ok(Scenario {
        kind,
        params,
        output_path,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_scenario() {
        let s = parse_scenario("kind = atom\nz = 1\nunits = atomic").unwrap();
        assert_eq!(s.kind, Kind::Atom);
        assert_eq!(s.count("z"), 1);
        assert_eq!(s.choice("units"), "atomic");
        assert_eq!(s.float("radii"), 40.0);
    }

    #[test]
    fn eigen_scenario() {
        let s = parse_scenario("kind = eigen\npotential = oscillator\nn = 512\nbox = 10").unwrap();
        assert_eq!(s.kind, Kind::Eigen);
        assert_eq!(s.choice("potential"), "oscillator");
        assert_eq!(s.count("n"), 512);
        assert_eq!(s.float("box"), 10.0);
        assert_eq!(s.count("levels"), 8);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_scenario("kind = atom\nzz = 1").unwrap_err();
        assert_eq!(
            err,
            ScenarioError::UnknownKey {
                line: 2,
                key: "zz".into(),
                kind: "atom"
            }
        );
    }

    #[test]
    fn comments_blanks_and_order() {
        let text = "# hydrogen\n\n  z = 2   # helium ion\nkind = atom\nseed = 9\nout = atom.csv\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.count("z"), 2);
        assert_eq!(s.seed, Some(9));
        assert_eq!(s.output_path, Some(PathBuf::from("atom.csv")));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_scenario("z = 1"), Err(ScenarioError::MissingKind));
        assert_eq!(
            parse_scenario("kind = molecule"),
            Err(ScenarioError::UnknownKind("molecule".into()))
        );
        assert_eq!(
            parse_scenario("kind = atom"),
            Err(ScenarioError::MissingKey {
                key: "z",
                kind: "atom"
            })
        );
        assert_eq!(
            parse_scenario("kind = atom\nz 1"),
            Err(ScenarioError::Syntax { line: 2 })
        );
        assert!(matches!(
            parse_scenario("kind = atom\nz = 1\nz = 2"),
            Err(ScenarioError::DuplicateKey { line: 3, .. })
        ));
    }

    #[test]
    fn values_are_validated() {
        for text in [
            "kind = eigen\npotential = oscillator\nbox = inf",
            "kind = eigen\npotential = oscillator\nbox = NaN",
            "kind = eigen\npotential = oscillator\nbox = -1",
            "kind = eigen\npotential = spring",
            "kind = eigen\npotential = box\nn = 4",
            "kind = hbar-scan\npotential = quartic\nhbar = 1, x",
            "kind = atom\nz = 1\nseed = -3",
        ] {
            assert!(
                matches!(parse_scenario(text), Err(ScenarioError::InvalidValue { .. })),
                "{text}"
            );
        }
    }

    #[test]
    fn lists_parse() {
        let s = parse_scenario("kind = hbar-scan\npotential = quartic\nhbar = 1, 0.5,0.25").unwrap();
        assert_eq!(s.list("hbar"), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn every_kind_round_trips_its_name() {
        for kind in Kind::ALL {
            assert_eq!(kind.name().parse::<Kind>().unwrap(), kind);
        }
    }
}
