//! Network-spec files.
//!
//! ```json
//! { "M": 4, "gamma": 1.0, "loss": 0.0,
//!   "elements": [ { "m": 1, "mp": 2, "t": 0.75, "phi": 0.0 } ] }
//!
//! { "M": 4, "gamma": 1.0,
//!   "regular": { "taus": [0.75, 0.0, 1.0], "phis": [0.0, 1.57, 0.0] } }
//! ```
//!
//! Exactly one of `elements` and `regular` must be present. Pairs missing from
//! `elements` are transparent. A regular spec lists one splitter per neighbour
//! order `k = 1..M-1` and may carry `reflectivities` (`1 - τ_k`) so that
//! near-transparent orders survive a round trip at full precision.

use std::fs;
use std::path::Path;

use cascade_core::{BeamSplitter, Error, NetworkSpec, RegularSpec};
use serde::{Deserialize, Serialize};

use crate::failure::{Context, Failure, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(rename = "M")]
    pub sites: usize,
    pub gamma: f64,
    #[serde(default)]
    pub loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regular: Option<RegularRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub m: usize,
    pub mp: usize,
    pub t: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularRecord {
    pub taus: Vec<f64>,
    pub phis: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectivities: Option<Vec<f64>>,
}

/// A validated network, keeping track of whether it was given as regular.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    General(NetworkSpec),
    Regular(RegularSpec),
}

impl Network {
    pub fn expanded(&self) -> NetworkSpec {
        match self {
            Network::General(net) => net.clone(),
            Network::Regular(spec) => spec.expand(),
        }
    }

    pub fn regular(&self) -> Option<&RegularSpec> {
        match self {
            Network::Regular(spec) => Some(spec),
            Network::General(_) => None,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            Network::General(net) => net.sites(),
            Network::Regular(spec) => spec.sites(),
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            Network::General(net) => net.gamma(),
            Network::Regular(spec) => spec.gamma(),
        }
    }
}

impl SpecFile {
    pub fn parse(text: &str) -> Outcome<Self> {
        serde_json::from_str(text).map_err(|e| Failure::validation(format!("spec: {e}")))
    }

    pub fn load(path: &Path) -> Outcome<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|f| Failure::validation(format!("{}: {}", path.display(), f.message)))
    }

    /// Check every field and build the network.
    pub fn validate(&self) -> Outcome<Network> {
        match (&self.elements, &self.regular) {
            (Some(_), Some(_)) => Err(Failure::validation(
                "spec: give either `elements` or `regular`, not both",
            )),
            (None, None) => Err(Failure::validation("spec: one of `elements` or `regular` is required")),
            (Some(elements), None) => self.general(elements).map(Network::General),
            (None, Some(regular)) => self.regular_spec(regular).map(Network::Regular),
        }
    }

    fn general(&self, elements: &[ElementRecord]) -> Outcome<NetworkSpec> {
        let splitters = elements
            .iter()
            .map(|e| {
                BeamSplitter::new(e.t, e.phi)
                    .map(|bs| (e.m, e.mp, bs))
                    .map_err(|source| Error::Element { m: e.m, mp: e.mp, source })
            })
            .collect::<Result<Vec<_>, _>>()
            .context("spec elements")?;
        NetworkSpec::from_elements(self.sites, self.gamma, self.loss, splitters).context("spec")
    }

    fn regular_spec(&self, regular: &RegularRecord) -> Outcome<RegularSpec> {
        let RegularRecord { taus, phis, reflectivities } = regular;
        if taus.len() != phis.len() || reflectivities.as_ref().is_some_and(|r| r.len() != taus.len()) {
            return Err(Failure::validation(format!(
                "spec regular: taus, phis and reflectivities must have equal lengths (got {}, {}, {})",
                taus.len(),
                phis.len(),
                reflectivities.as_ref().map_or(taus.len(), Vec::len),
            )));
        }
        let orders = taus
            .iter()
            .zip(phis)
            .enumerate()
            .map(|(i, (&t, &phi))| {
                let bs = match reflectivities {
                    Some(r) => BeamSplitter::from_parts(t, r[i], phi),
                    None => BeamSplitter::new(t, phi),
                };
                bs.map_err(|source| Error::OrderSplitter { k: i + 1, source })
            })
            .collect::<Result<Vec<_>, _>>()
            .context("spec regular")?;
        RegularSpec::from_splitters(self.sites, orders, self.loss, self.gamma).context("spec regular")
    }

    /// File form of a regular network, with reflectivities.
    pub fn from_regular(spec: &RegularSpec) -> Self {
        let orders = spec.splitters();
        Self {
            sites: spec.sites(),
            gamma: spec.gamma(),
            loss: spec.loss(),
            elements: None,
            regular: Some(RegularRecord {
                taus: orders.iter().map(BeamSplitter::transmissivity).collect(),
                phis: orders.iter().map(BeamSplitter::phase).collect(),
                reflectivities: Some(orders.iter().map(BeamSplitter::reflectivity).collect()),
            }),
        }
    }

    /// File form of an arbitrary network; transparent pairs are omitted.
    pub fn from_network(net: &NetworkSpec) -> Self {
        let elements = net
            .elements()
            .filter(|(_, _, bs)| *bs != BeamSplitter::TRANSPARENT)
            .map(|(m, mp, bs)| ElementRecord {
                m,
                mp,
                t: bs.transmissivity(),
                phi: bs.phase(),
            })
            .collect();
        Self {
            sites: net.sites(),
            gamma: net.gamma(),
            loss: net.loss(),
            elements: Some(elements),
            regular: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("spec files serialise");
        text.push('\n');
        text
    }
}

/// Load and validate in one go.
pub fn load_network(path: &Path) -> Outcome<Network> {
    SpecFile::load(path)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_layouts() {
        let net = SpecFile::parse(r#"{"M":3,"gamma":1.0,"elements":[{"m":1,"mp":3,"t":0.5,"phi":0.1}]}"#)
            .unwrap()
            .validate()
            .unwrap();
        let net = match net {
            Network::General(n) => n,
            other => panic!("{other:?}"),
        };
        assert_eq!(net.element(1, 3).transmissivity(), 0.5);
        assert_eq!(net.element(1, 2), BeamSplitter::TRANSPARENT);
        assert_eq!(net.loss(), 0.0);

        let reg = SpecFile::parse(r#"{"M":3,"gamma":2.0,"loss":0.1,"regular":{"taus":[0.2,1.0],"phis":[0.0,0.0]}}"#)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(reg.regular().unwrap().taus(), vec![0.2, 1.0]);
        assert_eq!(reg.gamma(), 2.0);
    }

    #[test]
    fn rejects_bad_specs_naming_the_field() {
        let cases = [
            (r#"{"M":3,"gamma":1.0}"#, "required"),
            (
                r#"{"M":3,"gamma":1.0,"elements":[],"regular":{"taus":[1,1],"phis":[0,0]}}"#,
                "not both",
            ),
            (r#"{"M":3,"gamma":1.0,"elements":[{"m":2,"mp":2,"t":0.5,"phi":0}]}"#, "(2,2)"),
            (r#"{"M":3,"gamma":1.0,"elements":[{"m":1,"mp":2,"t":1.5,"phi":0}]}"#, "(1,2)"),
            (r#"{"M":3,"gamma":-1.0,"elements":[]}"#, "gamma"),
            (r#"{"M":3,"gamma":1.0,"loss":2,"elements":[]}"#, "loss"),
            (r#"{"M":3,"gamma":1.0,"regular":{"taus":[1],"phis":[0]}}"#, "2 transmissivities"),
            (r#"{"M":3,"gamma":1.0,"regular":{"taus":[1,1],"phis":[0]}}"#, "equal lengths"),
            (r#"{"M":3,"gamma":1.0,"regular":{"taus":[0.5,1],"phis":[0,0],"reflectivities":[0.4,0]}}"#, "k = 1"),
            (r#"{"M":3,"gamma":1.0,"colour":1,"elements":[]}"#, "unknown field"),
        ];
        for (text, needle) in cases {
            let err = SpecFile::parse(text).and_then(|s| s.validate()).unwrap_err();
            assert_eq!(err.exit_code(), 2);
            assert!(err.message.contains(needle), "{text}: {}", err.message);
        }
    }

    #[test]
    fn regular_round_trip_keeps_reflectivities() {
        let orders = vec![
            BeamSplitter::from_reflectivity(1e-20, 0.3).unwrap(),
            BeamSplitter::new(0.25, 6.0).unwrap(),
        ];
        let spec = RegularSpec::from_splitters(3, orders, 0.0, 1.5).unwrap();
        let text = SpecFile::from_regular(&spec).to_json();
        let back = SpecFile::parse(&text).unwrap().validate().unwrap();
        assert_eq!(back.regular().unwrap(), &spec);
    }

    #[test]
    fn general_round_trip() {
        let net = NetworkSpec::new(4, 1.0, 0.2)
            .unwrap()
            .with_element(2, 4, BeamSplitter::new(0.3, 1.0).unwrap())
            .unwrap();
        let text = SpecFile::from_network(&net).to_json();
        assert_eq!(SpecFile::parse(&text).unwrap().validate().unwrap(), Network::General(net));
    }
}
