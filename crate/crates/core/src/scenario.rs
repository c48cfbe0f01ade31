//! Scenario bundles (weights, step law, scales, quadrature) and their JSON
//! wire format.
//!
//! JSON shape:
//! ```json
//! {
//!   "weights": [[1.0], [2.0]],
//!   "law_x": {"atoms": [-1.0, 1.0], "masses": [0.5, 0.5]},
//!   "tau": 0.5,
//!   "epsilon": 1.0,
//!   "quadrature": {"nodes_per_axis": 513, "max_refinements": 6, "rel_tol": 1e-6, "rule": "trapezoid"},
//!   "enumeration_cap": 16777216
//! }
//! ```
//! `tau` accepts the string `"inf"` since JSON has no infinity literal;
//! `quadrature` and `enumeration_cap` are optional.

use serde::{Deserialize, Serialize};

use crate::charfn::QuadratureSpec;
use crate::dist::{DiscreteDist1D, WeightMatrix};
use crate::error::{Error, Result};
use crate::exact::DEFAULT_ENUMERATION_CAP;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub weights: WeightMatrix,
    pub law_x: DiscreteDist1D,
    /// Concentration scale; 0 and infinity are both meaningful.
    pub tau: f64,
    pub epsilon: f64,
    pub quadrature: QuadratureSpec,
    pub enumeration_cap: u64,
}

/// Wire shape of a one-dimensional discrete law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawDist {
    pub atoms: Vec<f64>,
    pub masses: Vec<f64>,
}

impl RawDist {
    pub fn to_probability(&self) -> Result<DiscreteDist1D> {
        if self.atoms.len() != self.masses.len() {
            return Err(Error::InvalidInput(format!(
                "law has {} atoms but {} masses",
                self.atoms.len(),
                self.masses.len()
            )));
        }
        DiscreteDist1D::probability(self.atoms.iter().copied().zip(self.masses.iter().copied()))
    }

    pub fn to_sub_probability(&self) -> Result<DiscreteDist1D> {
        if self.atoms.len() != self.masses.len() {
            return Err(Error::InvalidInput(format!(
                "measure has {} atoms but {} masses",
                self.atoms.len(),
                self.masses.len()
            )));
        }
        DiscreteDist1D::sub_probability(self.atoms.iter().copied().zip(self.masses.iter().copied()))
    }

    pub fn from_dist(d: &DiscreteDist1D) -> Self {
        Self {
            atoms: d.atoms().to_vec(),
            masses: d.masses().to_vec(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TauField {
    Num(f64),
    Word(String),
}

#[derive(Serialize, Deserialize)]
struct RawScenario {
    weights: Vec<Vec<f64>>,
    law_x: RawDist,
    tau: TauField,
    epsilon: f64,
    #[serde(default)]
    quadrature: QuadratureSpec,
    #[serde(default = "default_cap")]
    enumeration_cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

fn parse_tau(t: &TauField) -> Result<f64> {
    match t {
        TauField::Num(x) => {
            if x.is_nan() || *x < 0.0 {
                Err(Error::InvalidInput(format!("tau must be >= 0, got {x}")))
            } else {
                Ok(*x)
            }
        }
        TauField::Word(w) if w == "inf" => Ok(f64::INFINITY),
        TauField::Word(w) => Err(Error::InvalidInput(format!(
            "tau must be a number or \"inf\", got \"{w}\""
        ))),
    }
}

impl Scenario {
    pub fn new(
        weights: WeightMatrix,
        law_x: DiscreteDist1D,
        tau: f64,
        epsilon: f64,
        quadrature: QuadratureSpec,
        enumeration_cap: u64,
    ) -> Result<Self> {
        if tau.is_nan() || tau < 0.0 {
            return Err(Error::InvalidInput(format!("tau must be >= 0, got {tau}")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        quadrature.validate()?;
        if !law_x.is_probability() {
            return Err(Error::InvalidInput("law_x must be a probability law".into()));
        }
        Ok(Self {
            weights,
            law_x,
            tau,
            epsilon,
            quadrature,
            enumeration_cap,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("malformed scenario JSON: {e}")))?;
        let weights = WeightMatrix::from_rows(&raw.weights)?;
        let law_x = raw.law_x.to_probability()?;
        let tau = parse_tau(&raw.tau)?;
        Scenario::new(
            weights,
            law_x,
            tau,
            raw.epsilon,
            raw.quadrature,
            raw.enumeration_cap,
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawScenario {
            weights: self.weights.to_nested(),
            law_x: RawDist::from_dist(&self.law_x),
            tau: if self.tau.is_infinite() {
                TauField::Word("inf".into())
            } else {
                TauField::Num(self.tau)
            },
            epsilon: self.epsilon,
            quadrature: self.quadrature.clone(),
            enumeration_cap: self.enumeration_cap,
        };
        serde_json::to_value(raw).expect("scenario serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("scenario serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let json = r#"{
            "weights": [[1.0], [2.0], [3.0]],
            "law_x": {"atoms": [-1.0, 1.0], "masses": [0.5, 0.5]},
            "tau": 0.5,
            "epsilon": 1.0
        }"#;
        let s = Scenario::from_json_str(json).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.enumeration_cap, DEFAULT_ENUMERATION_CAP);
        assert_eq!(s.quadrature, QuadratureSpec::default());

        let echoed = Scenario::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(echoed.tau, s.tau);
        assert_eq!(echoed.weights, s.weights);
    }

    #[test]
    fn tau_inf_accepted() {
        let json = r#"{
            "weights": [[1.0]],
            "law_x": {"atoms": [0.0], "masses": [1.0]},
            "tau": "inf",
            "epsilon": 0.5
        }"#;
        let s = Scenario::from_json_str(json).unwrap();
        assert!(s.tau.is_infinite());
        let echoed = Scenario::from_json_str(&s.to_json_string()).unwrap();
        assert!(echoed.tau.is_infinite());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Scenario::from_json_str("{").is_err());
        let bad_tau = r#"{
            "weights": [[1.0]],
            "law_x": {"atoms": [0.0], "masses": [1.0]},
            "tau": "huge",
            "epsilon": 0.5
        }"#;
        assert!(Scenario::from_json_str(bad_tau).is_err());
        let bad_eps = r#"{
            "weights": [[1.0]],
            "law_x": {"atoms": [0.0], "masses": [1.0]},
            "tau": 1.0,
            "epsilon": 0.0
        }"#;
        assert!(Scenario::from_json_str(bad_eps).is_err());
    }
}
