//! JSON interchange: space files, presheaf files and interval witnesses.
//!
//! Sets are written as arrays of labels or, where a string key is needed, as
//! the canonical key: labels in ground order joined by commas, `""` for `∅`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{ChainWitness, Rational, RationalInterval};
use crate::mask::{GroundSet, SubsetMask};
use crate::sheaf::{hasse_edges, Presheaf};
use crate::structure::{generate_structure, ConnectivityStructure, GeneratorFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceMode {
    /// The listed sets must already form a structure.
    #[default]
    Structure,
    /// The listed sets are closed under chained unions on load.
    Generators,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub elements: Vec<String>,
    pub connected: Vec<Vec<String>>,
    #[serde(default)]
    pub mode: SpaceMode,
}

impl SpaceFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn ground(&self) -> Result<GroundSet> {
        GroundSet::new(self.elements.iter().cloned())
    }

    /// The listed sets as masks, in file order, without `∅` inserted.
    pub fn masks(&self, ground: &GroundSet) -> Result<Vec<SubsetMask>> {
        self.connected.iter().map(|set| ground.mask_of(set)).collect()
    }

    pub fn into_structure(&self) -> Result<ConnectivityStructure> {
        let ground = self.ground()?;
        let masks = self.masks(&ground)?;
        match self.mode {
            SpaceMode::Structure => ConnectivityStructure::new(ground, masks),
            SpaceMode::Generators => Ok(generate_structure(&GeneratorFamily::new(ground, masks)?)),
        }
    }

    /// Canonical structure-mode file for `k`, `∅` included.
    pub fn from_structure(k: &ConnectivityStructure) -> Self {
        let ground = k.ground();
        SpaceFile {
            elements: ground.names().to_vec(),
            connected: k
                .family()
                .iter()
                .map(|&m| ground.labels(m).into_iter().map(String::from).collect())
                .collect(),
            mode: SpaceMode::Structure,
        }
    }

    /// Canonical text: one connected set per line, trailing newline.
    pub fn to_json(&self) -> String {
        let strings = |items: &[String]| -> String {
            let quoted: Vec<String> = items
                .iter()
                .map(|s| serde_json::to_string(s).expect("strings serialize"))
                .collect();
            format!("[{}]", quoted.join(", "))
        };
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"elements\": {},", strings(&self.elements));
        out.push_str("  \"connected\": [");
        for (i, set) in self.connected.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&strings(set));
        }
        out.push_str(if self.connected.is_empty() { "],\n" } else { "\n  ],\n" });
        let mode = match self.mode {
            SpaceMode::Structure => "structure",
            SpaceMode::Generators => "generators",
        };
        let _ = writeln!(out, "  \"mode\": \"{mode}\"");
        out.push_str("}\n");
        out
    }
}

/// Reads a space file: structure mode is validated, generators mode closed.
pub fn parse_space(text: &str) -> Result<ConnectivityStructure> {
    SpaceFile::parse(text)?.into_structure()
}

pub fn serialize_space(k: &ConnectivityStructure) -> String {
    SpaceFile::from_structure(k).to_json()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafFile {
    /// Canonical set key to section labels.
    pub sections: BTreeMap<String, Vec<String>>,
    /// `"A->B"` for each Hasse edge, mapping section labels over `A` to labels over `B`.
    pub restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

impl PresheafFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_presheaf(&self, k: &ConnectivityStructure) -> Result<Presheaf> {
        let ground = k.ground();
        let mut sections = BTreeMap::new();
        for (key, labels) in &self.sections {
            let a = ground.parse_key(key)?;
            if sections.insert(a, labels.clone()).is_some() {
                return Err(Error::Malformed(format!("section set for {key:?} given twice")));
            }
        }
        let mut edges = BTreeMap::new();
        for (key, map) in &self.restrictions {
            let (upper, lower) = key
                .split_once("->")
                .ok_or_else(|| Error::Malformed(format!("restriction key {key:?} is not of the form A->B")))?;
            let edge = (ground.parse_key(upper)?, ground.parse_key(lower)?);
            if edges.insert(edge, map.clone()).is_some() {
                return Err(Error::Malformed(format!("restriction {key:?} given twice")));
            }
        }
        Presheaf::from_labels(k, sections, edges)
    }

    pub fn from_presheaf(f: &Presheaf) -> Self {
        let k = f.structure();
        let ground = k.ground();
        let sections = k
            .family()
            .iter()
            .map(|&a| (ground.key(a), f.sections(a).to_vec()))
            .collect();
        let restrictions = hasse_edges(k)
            .into_iter()
            .map(|(upper, lower)| {
                let map = f.edge_maps()[&(upper, lower)]
                    .iter()
                    .enumerate()
                    .map(|(s, &t)| (f.sections(upper)[s].clone(), f.sections(lower)[t].clone()))
                    .collect();
                (format!("{}->{}", ground.key(upper), ground.key(lower)), map)
            })
            .collect();
        PresheafFile { sections, restrictions }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("presheaf file serializes");
        text.push('\n');
        text
    }
}

pub fn parse_presheaf(text: &str, k: &ConnectivityStructure) -> Result<Presheaf> {
    PresheafFile::parse(text)?.into_presheaf(k)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Malformed(format!("{text:?} is not a rational number")))
}

/// Parses `lo,hi` into a closed interval.
pub fn parse_interval(text: &str) -> Result<RationalInterval> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Error::Malformed(format!("interval {text:?} is not of the form lo,hi")))?;
    RationalInterval::closed(parse_rational(lo)?, parse_rational(hi)?)
}

/// Witness on disk. Endpoints are rational strings such as `"3/20"`; the
/// empty interval is `null`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub target: Option<[String; 2]>,
    pub epsilon: String,
    pub pieces: Vec<Option<[String; 2]>>,
}

fn interval_to_pair(i: &RationalInterval) -> Option<[String; 2]> {
    i.bounds().map(|(lo, hi)| [lo.to_string(), hi.to_string()])
}

fn pair_to_interval(p: &Option<[String; 2]>) -> Result<RationalInterval> {
    match p {
        None => Ok(RationalInterval::Empty),
        Some([lo, hi]) => RationalInterval::closed(parse_rational(lo)?, parse_rational(hi)?),
    }
}

impl WitnessFile {
    pub fn from_witness(w: &ChainWitness) -> Self {
        WitnessFile {
            target: interval_to_pair(&w.target),
            epsilon: w.epsilon.to_string(),
            pieces: w.pieces.iter().map(interval_to_pair).collect(),
        }
    }

    pub fn into_witness(&self) -> Result<ChainWitness> {
        Ok(ChainWitness {
            target: pair_to_interval(&self.target)?,
            epsilon: parse_rational(&self.epsilon)?,
            pieces: self.pieces.iter().map(pair_to_interval).collect::<Result<_>>()?,
        })
    }
}

pub fn parse_witness(text: &str) -> Result<ChainWitness> {
    serde_json::from_str::<WitnessFile>(text)?.into_witness()
}

pub fn serialize_witness(w: &ChainWitness) -> String {
    let mut text = serde_json::to_string_pretty(&WitnessFile::from_witness(w)).expect("witness serializes");
    text.push('\n');
    text
}
