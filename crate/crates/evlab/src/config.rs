//! Experiment configuration: JSON in, validated and canonical JSON out.
//!
//! A minimal file names the map, the noise grid, the block layout and the
//! master seed:
//!
//! ```json
//! {"map": "ternary", "eps": [1e-3], "m": 200, "n": 1000, "seed": 1}
//! ```
//!
//! Everything else is filled in by [`parse_config_str`], and
//! [`emit_config`] writes the resolved form back out. Parsing the emitted text
//! gives the same configuration again.

use std::fmt;
use std::path::Path;

use evlab_core::dynamics::{MapSpec, NoiseCoupling, NoiseSpec, Space, State, GOLDEN_MEAN};
use evlab_core::evt::{EiNormalization, MIN_BLOCKS_FOR_FIT};
use evlab_core::observables::Family;
use serde::de::{self, IntoDeserializer, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Largest orbit `m·n` accepted.
pub const MAX_ORBIT_POINTS: u64 = 100_000_000;
/// Target used for circle maps when none is given.
pub const DEFAULT_TARGET: f64 = 0.7371;
pub const DEFAULT_BURN_IN: usize = 10_000;
pub const DEFAULT_REALIZATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Shared,
    Independent,
}

/// A map family with every parameter explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Rotation { alpha: f64 },
    Ternary,
    Quadratic { a: f64 },
    PomeauManneville { alpha: f64 },
    Lsv { alpha: f64 },
    CuspLorenz { a: f64 },
    ArnoldCat { coupling: Coupling },
    Henon { a: f64, b: f64 },
}

impl MapConfig {
    pub fn spec(&self) -> evlab_core::Result<MapSpec> {
        let spec = match *self {
            MapConfig::Rotation { alpha } => MapSpec::Rotation { alpha },
            MapConfig::Ternary => MapSpec::TernaryShift,
            MapConfig::Quadratic { a } => MapSpec::Quadratic { a },
            MapConfig::PomeauManneville { alpha } => MapSpec::PomeauManneville { alpha },
            MapConfig::Lsv { alpha } => MapSpec::Lsv { alpha },
            MapConfig::CuspLorenz { a } => MapSpec::CuspLorenz { a },
            MapConfig::ArnoldCat { .. } => MapSpec::ArnoldCat,
            MapConfig::Henon { a, b } => MapSpec::Henon { a, b },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn noise(&self, epsilon: f64) -> evlab_core::Result<NoiseSpec> {
        let coupling = match self {
            MapConfig::ArnoldCat { coupling: Coupling::Independent } => NoiseCoupling::Independent,
            _ => NoiseCoupling::Shared,
        };
        Ok(NoiseSpec::new(epsilon)?.with_coupling(coupling))
    }

    pub fn space(&self) -> Space {
        match self {
            MapConfig::Rotation { .. }
            | MapConfig::Ternary
            | MapConfig::PomeauManneville { .. }
            | MapConfig::Lsv { .. } => Space::Circle,
            MapConfig::Quadratic { .. } | MapConfig::CuspLorenz { .. } => Space::Interval,
            MapConfig::ArnoldCat { .. } => Space::Torus2,
            MapConfig::Henon { .. } => Space::Plane2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapConfig::Rotation { .. } => "rotation",
            MapConfig::Ternary => "ternary",
            MapConfig::Quadratic { .. } => "quadratic",
            MapConfig::PomeauManneville { .. } => "pomeau_manneville",
            MapConfig::Lsv { .. } => "lsv",
            MapConfig::CuspLorenz { .. } => "cusp_lorenz",
            MapConfig::ArnoldCat { .. } => "arnold_cat",
            MapConfig::Henon { .. } => "henon",
        }
    }
}

/// Attracting fixed point `(−1 + √(1 + 4a))/(2a)` of `1 − a x²`.
pub fn quadratic_fixed_point(a: f64) -> f64 {
    (-1.0 + (1.0 + 4.0 * a).sqrt()) / (2.0 * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservableConfig {
    G1,
    G2 {
        a: f64,
    },
    G3 {
        a: f64,
        #[serde(default)]
        c: f64,
    },
}

impl ObservableConfig {
    pub fn family(&self) -> Family {
        match *self {
            ObservableConfig::G1 => Family::G1,
            ObservableConfig::G2 { a } => Family::G2 { a },
            ObservableConfig::G3 { a, c } => Family::G3 { a, c },
        }
    }

    pub fn label(&self) -> &'static str {
        self.family().label()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    /// One target point for every realization.
    Fixed { z: Vec<f64> },
    /// A periodic point of the unperturbed map, with its prime period.
    Periodic { z: Vec<f64>, period: usize },
    /// A fresh target per realization, drawn from the stationary measure.
    FromStationary,
}

impl TargetConfig {
    /// The configured point, if the target is not drawn per realization.
    pub fn point(&self) -> Option<State> {
        match self {
            TargetConfig::Fixed { z } | TargetConfig::Periodic { z, .. } => Some(state_from(z)),
            TargetConfig::FromStationary => None,
        }
    }
}

pub(crate) fn state_from(z: &[f64]) -> State {
    match z {
        [x] => State::one(*x),
        [x, y] => State::two(*x, *y),
        _ => State::one(f64::NAN),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    TwoN,
    TwoNOverEps,
}

impl From<Normalization> for EiNormalization {
    fn from(n: Normalization) -> Self {
        match n {
            Normalization::TwoN => EiNormalization::TwoN,
            Normalization::TwoNOverEps => EiNormalization::TwoNOverEps,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub map: MapConfig,
    pub observables: Vec<ObservableConfig>,
    pub target: TargetConfig,
    pub eps: Vec<f64>,
    /// Blocks per realization.
    pub m: usize,
    /// Block length.
    pub n: usize,
    pub realizations: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub ei_normalization: Normalization,
}

impl ExperimentConfig {
    /// Defaults for every optional field.
    pub fn new(map: MapConfig, eps: Vec<f64>, m: usize, n: usize, seed: u64) -> Self {
        Self {
            observables: default_observables(&map),
            target: default_target(&map),
            map,
            eps,
            m,
            n,
            realizations: DEFAULT_REALIZATIONS,
            seed,
            burn_in: DEFAULT_BURN_IN,
            ei_normalization: Normalization::TwoN,
        }
    }

    pub fn with_observables(mut self, observables: Vec<ObservableConfig>) -> Self {
        self.observables = observables;
        self
    }

    pub fn with_target(mut self, target: TargetConfig) -> Self {
        self.target = target;
        self
    }

    pub fn with_realizations(mut self, r: usize) -> Self {
        self.realizations = r;
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.ei_normalization = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.map.spec().map_err(|e| Error::range("map", e.to_string()))?;
        if self.eps.is_empty() {
            return Err(Error::range("eps", "at least one noise level is required"));
        }
        for (i, &e) in self.eps.iter().enumerate() {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::range(format!("eps[{i}]"), format!("noise level must be finite and >= 0, got {e}")));
            }
        }
        if self.m < MIN_BLOCKS_FOR_FIT {
            return Err(Error::range("m", format!("need at least {MIN_BLOCKS_FOR_FIT} blocks")));
        }
        if self.n == 0 {
            return Err(Error::range("n", "block length must be >= 1"));
        }
        if (self.m as u64).saturating_mul(self.n as u64) > MAX_ORBIT_POINTS {
            return Err(Error::range("m*n", format!("orbit length exceeds {MAX_ORBIT_POINTS}")));
        }
        if self.realizations == 0 {
            return Err(Error::range("realizations", "must be >= 1"));
        }
        if self.observables.is_empty() {
            return Err(Error::range("observables", "at least one observable is required"));
        }
        for (i, obs) in self.observables.iter().enumerate() {
            let field = format!("observables[{i}]");
            let ok = match *obs {
                ObservableConfig::G1 => true,
                ObservableConfig::G2 { a } => a > 0.0 && a.is_finite(),
                ObservableConfig::G3 { a, c } => a > 0.0 && a.is_finite() && c.is_finite(),
            };
            if !ok {
                return Err(Error::range(field, "exponent a must be > 0 and C finite"));
            }
            if self.observables[..i].iter().any(|o| o.label() == obs.label()) {
                return Err(Error::range(field, "each observable family may appear once"));
            }
        }
        match &self.target {
            TargetConfig::Fixed { z } | TargetConfig::Periodic { z, .. } => {
                let space = spec.space();
                if z.len() != space.dim() {
                    return Err(Error::range("target.z", format!("expected {} coordinate(s)", space.dim())));
                }
                let inside = z.iter().all(|v| v.is_finite() && (!space.is_periodic() || (0.0..1.0).contains(v)));
                if !inside {
                    return Err(Error::range("target.z", "target must be a point of the map's space"));
                }
                if let TargetConfig::Periodic { period: 0, .. } = self.target {
                    return Err(Error::range("target.period", "period must be >= 1"));
                }
            }
            TargetConfig::FromStationary => {}
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        crate::output::sha256_hex(emit_config(self).as_bytes())
    }
}

/// `g1`, `g2` and `g3` with `C = 0`; `a = 3` on 1-D spaces and `a = 1` on
/// 2-D spaces.
pub fn default_observables(map: &MapConfig) -> Vec<ObservableConfig> {
    let a = if map.space().dim() == 1 { 3.0 } else { 1.0 };
    vec![ObservableConfig::G1, ObservableConfig::G2 { a }, ObservableConfig::G3 { a, c: 0.0 }]
}

/// Circle maps: the fixed generic point `0.7371`. Quadratic map: its
/// attracting fixed point. Everything else: drawn from the stationary
/// measure.
pub fn default_target(map: &MapConfig) -> TargetConfig {
    match *map {
        MapConfig::Rotation { .. } | MapConfig::Ternary => TargetConfig::Fixed { z: vec![DEFAULT_TARGET] },
        MapConfig::Quadratic { a } => TargetConfig::Fixed { z: vec![quadratic_fixed_point(a)] },
        _ => TargetConfig::FromStationary,
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema { path, message: e.into_inner().to_string() }
    })?;
    let map = raw.map.resolve()?;
    let cfg = ExperimentConfig {
        observables: raw.observables.unwrap_or_else(|| default_observables(&map)),
        target: raw.target.unwrap_or_else(|| default_target(&map)),
        map,
        eps: raw.eps.into_vec(),
        m: raw.m,
        n: raw.n,
        realizations: raw.realizations.unwrap_or(DEFAULT_REALIZATIONS),
        seed: raw.seed,
        burn_in: raw.burn_in.unwrap_or(DEFAULT_BURN_IN),
        ei_normalization: raw.ei_normalization.unwrap_or_default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical pretty-printed JSON, newline terminated.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("configuration serializes");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    map: RawMap,
    observables: Option<Vec<ObservableConfig>>,
    target: Option<TargetConfig>,
    #[serde(alias = "epsilon")]
    eps: OneOrMany,
    m: usize,
    n: usize,
    realizations: Option<usize>,
    seed: u64,
    burn_in: Option<usize>,
    ei_normalization: Option<Normalization>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MapName {
    Rotation,
    #[serde(alias = "ternary_shift")]
    Ternary,
    Quadratic,
    #[serde(alias = "pm")]
    PomeauManneville,
    Lsv,
    #[serde(alias = "lorenz", alias = "cusp")]
    CuspLorenz,
    #[serde(alias = "cat")]
    ArnoldCat,
    Henon,
}

/// A map given either by name or as `{"kind": ..., params}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapFields {
    kind: MapName,
    alpha: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    coupling: Option<Coupling>,
}

struct RawMap(RawMapFields);

impl<'de> Deserialize<'de> for RawMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawMapFields;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map name or an object with a `kind` field")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Self::Value, E> {
                let kind = MapName::deserialize(s.into_deserializer())?;
                Ok(RawMapFields { kind, alpha: None, a: None, b: None, coupling: None })
            }

            fn visit_map<A: MapAccess<'de>>(self, m: A) -> std::result::Result<Self::Value, A::Error> {
                RawMapFields::deserialize(de::value::MapAccessDeserializer::new(m))
            }
        }
        d.deserialize_any(V).map(RawMap)
    }
}

impl RawMap {
    fn resolve(self) -> Result<MapConfig> {
        let f = self.0;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Schema { path: format!("map.{name}"), message: "missing field".into() })
        };
        let unused = |present: bool, name: &str| -> Result<()> {
            if present {
                Err(Error::Schema { path: format!("map.{name}"), message: "not a parameter of this map".into() })
            } else {
                Ok(())
            }
        };
        let cfg = match f.kind {
            MapName::Rotation => {
                unused(f.a.is_some(), "a")?;
                MapConfig::Rotation { alpha: f.alpha.unwrap_or(GOLDEN_MEAN) }
            }
            MapName::Ternary => {
                unused(f.alpha.is_some(), "alpha")?;
                unused(f.a.is_some(), "a")?;
                MapConfig::Ternary
            }
            MapName::Quadratic => MapConfig::Quadratic { a: need(f.a, "a")? },
            MapName::PomeauManneville => MapConfig::PomeauManneville { alpha: need(f.alpha, "alpha")? },
            MapName::Lsv => MapConfig::Lsv { alpha: need(f.alpha, "alpha")? },
            MapName::CuspLorenz => MapConfig::CuspLorenz { a: need(f.a, "a")? },
            MapName::ArnoldCat => MapConfig::ArnoldCat { coupling: f.coupling.unwrap_or_default() },
            MapName::Henon => MapConfig::Henon { a: f.a.unwrap_or(1.4), b: f.b.unwrap_or(0.3) },
        };
        if !matches!(cfg, MapConfig::Henon { .. }) {
            unused(f.b.is_some(), "b")?;
        }
        if !matches!(cfg, MapConfig::ArnoldCat { .. }) {
            unused(f.coupling.is_some(), "coupling")?;
        }
        if !matches!(cfg, MapConfig::Rotation { .. } | MapConfig::PomeauManneville { .. } | MapConfig::Lsv { .. }) {
            unused(f.alpha.is_some(), "alpha")?;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves() {
        let cfg = parse_config_str(r#"{"map": "ternary", "eps": [1e-3], "m": 200, "n": 1000, "seed": 1}"#).unwrap();
        assert_eq!(cfg.map, MapConfig::Ternary);
        assert_eq!(cfg.target, TargetConfig::Fixed { z: vec![DEFAULT_TARGET] });
        assert_eq!(cfg.observables.len(), 3);
        assert_eq!(cfg.realizations, DEFAULT_REALIZATIONS);
        assert_eq!(parse_config_str(&emit_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let e = parse_config_str(r#"{"map": "ternary", "eps": [1e-3], "m": "x", "n": 1000, "seed": 1}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "m"), "{e}");
        let e = parse_config_str(r#"{"map": {"kind": "quadratic"}, "eps": 0, "m": 200, "n": 10, "seed": 1}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "map.a"), "{e}");
        let e = parse_config_str(r#"{"map": {"kind": "henon", "q": 1}, "eps": 0, "m": 200, "n": 10, "seed": 1}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path.starts_with("map")), "{e}");
    }

    #[test]
    fn range_errors() {
        let e = parse_config_str(r#"{"map": "ternary", "epsilon": -0.1, "m": 200, "n": 1000, "seed": 1}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Range { ref field, .. } if field == "eps[0]"), "{e}");
        let e = parse_config_str(r#"{"map": "ternary", "eps": 0.1, "m": 1000000, "n": 1000, "seed": 1}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Range { ref field, .. } if field == "m*n"), "{e}");
        let e = parse_config_str(r#"{"map": {"kind": "pm", "alpha": 1.5}, "eps": 0.1, "m": 100, "n": 10, "seed": 1}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Range { ref field, .. } if field == "map"), "{e}");
    }
}
