//! Connectivity structures on a finite ground set.
//!
//! A structure is a family of subsets (the connected parts) that contains the
//! empty set and is closed under the union of any two members that share a
//! point. On a finite set that pairwise rule already gives closure under
//! unions of arbitrary families with a common point: such a family can be
//! merged two members at a time and every partial union keeps the point.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::mask::{canonicalize, GroundSet, SubsetMask};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureViolation {
    MissingEmpty,
    /// `left ∩ right ≠ ∅` but `left ∪ right` is absent.
    MissingUnion {
        left: SubsetMask,
        right: SubsetMask,
        union: SubsetMask,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructureReport {
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structure axioms on a raw family, without inserting `∅`.
///
/// Violations are listed in canonical pair order, `left < right`.
pub fn validate_structure(ground: &GroundSet, family: &[SubsetMask]) -> Result<StructureReport> {
    for &m in family {
        ground.check(m)?;
    }
    let mut sorted = family.to_vec();
    canonicalize(&mut sorted);
    let present: HashSet<SubsetMask> = sorted.iter().copied().collect();

    let mut violations = Vec::new();
    if !present.contains(&SubsetMask::EMPTY) {
        violations.push(StructureViolation::MissingEmpty);
    }
    for (i, &left) in sorted.iter().enumerate() {
        for &right in &sorted[i + 1..] {
            if left.meets(right) {
                let union = left.union(right);
                if !present.contains(&union) {
                    violations.push(StructureViolation::MissingUnion { left, right, union });
                }
            }
        }
    }
    Ok(StructureReport { violations })
}

/// Smallest family containing `generators` and `∅` that is closed under
/// unions of intersecting pairs. Returned in canonical order.
pub fn closure<I>(generators: I) -> Vec<SubsetMask>
where
    I: IntoIterator<Item = SubsetMask>,
{
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    for m in std::iter::once(SubsetMask::EMPTY).chain(generators) {
        if seen.insert(m) {
            members.push(m);
        }
    }
    // Each member is paired once with every member found before it; members
    // discovered along the way are appended and get their turn later.
    let mut next = 0;
    while next < members.len() {
        let p = members[next];
        if !p.is_empty() {
            for j in 0..next {
                let q = members[j];
                if p.meets(q) {
                    let u = p.union(q);
                    if seen.insert(u) {
                        members.push(u);
                    }
                }
            }
        }
        next += 1;
    }
    canonicalize(&mut members);
    members
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFamily {
    ground: GroundSet,
    generators: Vec<SubsetMask>,
}

impl GeneratorFamily {
    pub fn new(ground: GroundSet, mut generators: Vec<SubsetMask>) -> Result<Self> {
        for &m in &generators {
            ground.check(m)?;
        }
        canonicalize(&mut generators);
        Ok(GeneratorFamily { ground, generators })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn generators(&self) -> &[SubsetMask] {
        &self.generators
    }
}

/// The structure generated by a family of subsets.
pub fn generate_structure(gen: &GeneratorFamily) -> ConnectivityStructure {
    ConnectivityStructure {
        ground: gen.ground.clone(),
        carrier: gen.ground.full(),
        family: closure(gen.generators.iter().copied()),
    }
}

/// A validated connectivity structure.
///
/// `carrier` is the set of points the structure lives on. It is the whole
/// ground set except for induced structures, which keep the ambient labels
/// and bit positions and restrict the carrier instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityStructure {
    ground: GroundSet,
    carrier: SubsetMask,
    family: Vec<SubsetMask>,
}

impl ConnectivityStructure {
    /// Validates `family` (with `∅` inserted) as a structure on the whole ground set.
    pub fn new(ground: GroundSet, mut family: Vec<SubsetMask>) -> Result<Self> {
        family.push(SubsetMask::EMPTY);
        canonicalize(&mut family);
        let report = validate_structure(&ground, &family)?;
        if !report.is_ok() {
            return Err(Error::InvalidStructure(report.violations));
        }
        Ok(ConnectivityStructure {
            carrier: ground.full(),
            ground,
            family,
        })
    }

    /// The structure whose connected sets are the vertex sets of connected
    /// subgraphs, plus `∅`.
    pub fn from_graph<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let ground = GroundSet::new(vertices.iter().map(|v| v.as_ref().to_string()))?;
        let mut adjacency = vec![SubsetMask::EMPTY; ground.len()];
        for (u, v) in edges {
            let lookup = |label: &str| {
                ground
                    .index_of(label)
                    .ok_or_else(|| Error::Malformed(format!("edge uses unknown vertex {label:?}")))
            };
            let (u, v) = (lookup(u.as_ref())?, lookup(v.as_ref())?);
            adjacency[u] = adjacency[u].union(SubsetMask::singleton(v));
            adjacency[v] = adjacency[v].union(SubsetMask::singleton(u));
        }

        let mut seen: HashSet<SubsetMask> = HashSet::new();
        let mut queue: VecDeque<SubsetMask> = (0..ground.len()).map(SubsetMask::singleton).collect();
        seen.extend(queue.iter().copied());
        while let Some(set) = queue.pop_front() {
            let frontier = set
                .indices()
                .fold(SubsetMask::EMPTY, |acc, i| acc.union(adjacency[i]))
                .difference(set);
            for v in frontier.indices() {
                let grown = set.union(SubsetMask::singleton(v));
                if seen.insert(grown) {
                    queue.push_back(grown);
                }
            }
        }
        let mut family: Vec<SubsetMask> = seen.into_iter().collect();
        family.push(SubsetMask::EMPTY);
        canonicalize(&mut family);
        Ok(ConnectivityStructure {
            carrier: ground.full(),
            ground,
            family,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn carrier(&self) -> SubsetMask {
        self.carrier
    }

    /// Connected sets in canonical order; always starts with `∅`.
    pub fn family(&self) -> &[SubsetMask] {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn contains(&self, set: SubsetMask) -> bool {
        self.family.binary_search(&set).is_ok()
    }

    pub fn require(&self, set: SubsetMask) -> Result<()> {
        if self.contains(set) {
            Ok(())
        } else {
            Err(Error::NotConnected(set))
        }
    }

    /// Connected subsets of `set`, canonical order.
    pub fn below(&self, set: SubsetMask) -> impl Iterator<Item = SubsetMask> + '_ {
        self.family.iter().copied().filter(move |m| m.is_subset_of(set))
    }

    /// `K|_A`, the connected sets contained in `a`, as a structure carried by `a`.
    pub fn induced(&self, a: SubsetMask) -> Result<ConnectivityStructure> {
        self.require(a)?;
        Ok(ConnectivityStructure {
            ground: self.ground.clone(),
            carrier: a,
            family: self.below(a).collect(),
        })
    }

    /// Every point of the carrier is connected.
    pub fn is_integral(&self) -> bool {
        self.carrier.indices().all(|i| self.contains(SubsetMask::singleton(i)))
    }

    /// `a` is not generated by its proper connected subsets.
    pub fn irreducible_by_definition(&self, a: SubsetMask) -> Result<bool> {
        self.require(a)?;
        let generated = closure(self.below(a).filter(|&b| b != a));
        Ok(generated.binary_search(&a).is_err())
    }

    pub fn irreducibles(&self) -> Vec<SubsetMask> {
        self.family
            .iter()
            .copied()
            .filter(|&a| self.irreducible_by_definition(a).expect("member of the family"))
            .collect()
    }
}
