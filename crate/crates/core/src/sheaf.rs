//! Finite presheaves of sets on the inclusion poset of a structure, and the
//! sheaf condition for the covering sieves of its topology.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::site::{CoveringTable, Sieve};
use crate::structure::ConnectivityStructure;

/// Pairs `(upper, lower)` with `lower ⊊ upper` and nothing connected strictly between.
pub fn hasse_edges(k: &ConnectivityStructure) -> Vec<(SubsetMask, SubsetMask)> {
    let family = k.family();
    let mut edges = Vec::new();
    for &upper in family {
        for &lower in family {
            if lower.is_proper_subset_of(upper)
                && !family
                    .iter()
                    .any(|&mid| lower.is_proper_subset_of(mid) && mid.is_proper_subset_of(upper))
            {
                edges.push((upper, lower));
            }
        }
    }
    edges
}

/// Section sets per connected set, with restriction maps on Hasse edges.
///
/// Sections are addressed by their index in the object's label list. Maps
/// between non-adjacent objects are composed along one Hasse path; whether
/// every path agrees is the business of [`validate_presheaf`].
#[derive(Debug, Clone)]
pub struct Presheaf {
    structure: ConnectivityStructure,
    sections: BTreeMap<SubsetMask, Vec<String>>,
    edges: BTreeMap<(SubsetMask, SubsetMask), Vec<usize>>,
    composites: HashMap<(SubsetMask, SubsetMask), Vec<usize>>,
}

/// Restriction of one section along two Hasse paths disagrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorialityViolation {
    pub upper: SubsetMask,
    pub lower: SubsetMask,
    pub section: usize,
    pub first_path: Vec<SubsetMask>,
    pub first_image: usize,
    pub second_path: Vec<SubsetMask>,
    pub second_image: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PresheafReport {
    pub violations: Vec<FunctorialityViolation>,
}

impl PresheafReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A composite map and one Hasse path realizing it.
#[derive(Clone)]
struct Route {
    map: Vec<usize>,
    path: Vec<SubsetMask>,
}

impl Presheaf {
    pub fn new(
        k: &ConnectivityStructure,
        sections: BTreeMap<SubsetMask, Vec<String>>,
        edges: BTreeMap<(SubsetMask, SubsetMask), Vec<usize>>,
    ) -> Result<Self> {
        for (&a, labels) in &sections {
            k.require(a)?;
            let mut seen = HashSet::new();
            for label in labels {
                if !seen.insert(label) {
                    return Err(Error::Malformed(format!("section {label:?} repeated over {a}")));
                }
            }
        }
        if let Some(&a) = k.family().iter().find(|a| !sections.contains_key(a)) {
            return Err(Error::Malformed(format!("no section set for {a}")));
        }

        let hasse: HashSet<(SubsetMask, SubsetMask)> = hasse_edges(k).into_iter().collect();
        for (&(upper, lower), map) in &edges {
            if !hasse.contains(&(upper, lower)) {
                return Err(Error::Malformed(format!("{upper} -> {lower} is not a Hasse edge")));
            }
            if map.len() != sections[&upper].len() || map.iter().any(|&t| t >= sections[&lower].len()) {
                return Err(Error::Malformed(format!(
                    "restriction {upper} -> {lower} is not a total map"
                )));
            }
        }
        if let Some((upper, lower)) = hasse.iter().copied().find(|e| !edges.contains_key(e)) {
            return Err(Error::Malformed(format!("missing restriction {upper} -> {lower}")));
        }

        let mut presheaf = Presheaf {
            structure: k.clone(),
            sections,
            edges,
            composites: HashMap::new(),
        };
        let mut composites = HashMap::new();
        for &upper in k.family() {
            for (lower, routes) in presheaf.routes_from(upper) {
                composites.insert((upper, lower), routes.into_iter().next().expect("reached").map);
            }
        }
        presheaf.composites = composites;
        Ok(presheaf)
    }

    /// Builds a presheaf whose restriction maps are given by section label.
    pub fn from_labels(
        k: &ConnectivityStructure,
        sections: BTreeMap<SubsetMask, Vec<String>>,
        edges: BTreeMap<(SubsetMask, SubsetMask), BTreeMap<String, String>>,
    ) -> Result<Self> {
        let position = |a: SubsetMask, label: &str| -> Result<usize> {
            sections
                .get(&a)
                .and_then(|labels| labels.iter().position(|l| l == label))
                .ok_or_else(|| Error::Malformed(format!("unknown section {label:?} over {a}")))
        };
        let mut indexed = BTreeMap::new();
        for (&(upper, lower), map) in &edges {
            let source = sections
                .get(&upper)
                .ok_or_else(|| Error::Malformed(format!("no section set for {upper}")))?;
            let mut images = Vec::with_capacity(source.len());
            for label in source {
                let image = map.get(label).ok_or_else(|| {
                    Error::Malformed(format!("restriction {upper} -> {lower} misses section {label:?}"))
                })?;
                images.push(position(lower, image)?);
            }
            if map.len() != source.len() {
                return Err(Error::Malformed(format!(
                    "restriction {upper} -> {lower} maps unknown sections"
                )));
            }
            indexed.insert((upper, lower), images);
        }
        Presheaf::new(k, sections, indexed)
    }

    /// The presheaf with the same section set everywhere and identity restrictions.
    pub fn constant<S: AsRef<str>>(k: &ConnectivityStructure, labels: &[S]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let sections = k.family().iter().map(|&a| (a, labels.clone())).collect();
        let identity: Vec<usize> = (0..labels.len()).collect();
        let edges = hasse_edges(k).into_iter().map(|e| (e, identity.clone())).collect();
        Presheaf::new(k, sections, edges)
    }

    /// One section everywhere.
    pub fn terminal(k: &ConnectivityStructure) -> Self {
        Presheaf::constant(k, &["*"]).expect("terminal presheaf is well formed")
    }

    /// `F(A)` = all functions `A → values`, restricted by restricting the domain.
    ///
    /// A section is labelled `a=v,b=w` in ground order; the empty function is `""`.
    pub fn functions_to<S: AsRef<str>>(k: &ConnectivityStructure, values: &[S]) -> Result<Self> {
        let values: Vec<&str> = values.iter().map(AsRef::as_ref).collect();
        let ground = k.ground();
        let mut sections = BTreeMap::new();
        for &a in k.family() {
            let points: Vec<usize> = a.indices().collect();
            let total = values
                .len()
                .checked_pow(points.len() as u32)
                .ok_or_else(|| Error::Domain(format!("too many functions on {}", ground.show(a))))?;
            let labels: Vec<String> = (0..total)
                .map(|code| {
                    let mut rest = code;
                    let mut parts = Vec::with_capacity(points.len());
                    for &p in &points {
                        parts.push(format!("{}={}", ground.name(p), values[rest % values.len()]));
                        rest /= values.len();
                    }
                    parts.join(",")
                })
                .collect();
            sections.insert(a, labels);
        }

        let mut edges = BTreeMap::new();
        for (upper, lower) in hasse_edges(k) {
            let upper_points: Vec<usize> = upper.indices().collect();
            let lower_points: Vec<usize> = lower.indices().collect();
            let map = (0..sections[&upper].len())
                .map(|code| {
                    let digit = |p: usize| {
                        let pos = upper_points.iter().position(|&q| q == p).expect("lower ⊆ upper");
                        code / values.len().pow(pos as u32) % values.len()
                    };
                    lower_points
                        .iter()
                        .enumerate()
                        .map(|(i, &p)| digit(p) * values.len().pow(i as u32))
                        .sum()
                })
                .collect();
            edges.insert((upper, lower), map);
        }
        Presheaf::new(k, sections, edges)
    }

    pub fn structure(&self) -> &ConnectivityStructure {
        &self.structure
    }

    pub fn sections(&self, a: SubsetMask) -> &[String] {
        self.sections.get(&a).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_maps(&self) -> &BTreeMap<(SubsetMask, SubsetMask), Vec<usize>> {
        &self.edges
    }

    /// Restriction of section `section` of `F(from)` to `to ⊆ from`.
    pub fn restrict(&self, section: usize, from: SubsetMask, to: SubsetMask) -> usize {
        if from == to {
            return section;
        }
        self.composites[&(from, to)][section]
    }

    /// Returns a copy with sections renamed by `rename(object, label)`.
    pub fn relabeled<F>(&self, mut rename: F) -> Result<Presheaf>
    where
        F: FnMut(SubsetMask, &str) -> String,
    {
        let sections = self
            .sections
            .iter()
            .map(|(&a, labels)| (a, labels.iter().map(|l| rename(a, l)).collect()))
            .collect();
        Presheaf::new(&self.structure, sections, self.edges.clone())
    }

    /// Up to two distinct composite maps from `upper` to each object below it.
    fn routes_from(&self, upper: SubsetMask) -> BTreeMap<SubsetMask, Vec<Route>> {
        let mut routes: BTreeMap<SubsetMask, Vec<Route>> = BTreeMap::new();
        routes.insert(
            upper,
            vec![Route {
                map: (0..self.sections[&upper].len()).collect(),
                path: vec![upper],
            }],
        );
        // Descending canonical order visits every superset before its subsets.
        let below: Vec<SubsetMask> = self.structure.below(upper).collect();
        for &mid in below.iter().rev() {
            let Some(here) = routes.get(&mid).cloned() else {
                continue;
            };
            let out_edges = self
                .edges
                .range((mid, SubsetMask::EMPTY)..=(mid, SubsetMask::from_bits(u64::MAX)));
            for (&(_, lower), edge) in out_edges {
                let slot = routes.entry(lower).or_default();
                for route in &here {
                    if slot.len() == 2 {
                        break;
                    }
                    let map: Vec<usize> = route.map.iter().map(|&s| edge[s]).collect();
                    if slot.iter().all(|r| r.map != map) {
                        let mut path = route.path.clone();
                        path.push(lower);
                        slot.push(Route { map, path });
                    }
                }
            }
        }
        routes
    }
}

/// Checks that every pair of Hasse paths between comparable objects composes
/// to the same map. One violation is reported per offending `(upper, lower)`.
pub fn validate_presheaf(f: &Presheaf, k: &ConnectivityStructure) -> Result<PresheafReport> {
    if f.structure.family() != k.family() {
        return Err(Error::Malformed(
            "presheaf is defined over a different structure".into(),
        ));
    }
    let mut violations = Vec::new();
    for &upper in k.family() {
        for (lower, routes) in f.routes_from(upper) {
            if let [first, second] = routes.as_slice() {
                let section = (0..first.map.len())
                    .find(|&s| first.map[s] != second.map[s])
                    .expect("distinct maps");
                violations.push(FunctorialityViolation {
                    upper,
                    lower,
                    section,
                    first_path: first.path.clone(),
                    first_image: first.map[section],
                    second_path: second.path.clone(),
                    second_image: second.map[section],
                });
            }
        }
    }
    Ok(PresheafReport { violations })
}

/// A compatible choice of one section per member of a sieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingFamily {
    pub sieve: Sieve,
    /// `(member, section index)` in the sieve's canonical member order.
    pub assignment: Vec<(SubsetMask, usize)>,
}

impl MatchingFamily {
    pub fn at(&self, member: SubsetMask) -> Option<usize> {
        self.assignment
            .binary_search_by(|(m, _)| m.cmp(&member))
            .ok()
            .map(|i| self.assignment[i].1)
    }
}

/// Every matching family for `f` on sieve `c`.
///
/// Sections are chosen on the maximal members of `c` and pushed down to the
/// members below them; a choice that disagrees with an earlier one on a
/// shared member is abandoned.
pub fn matching_families(f: &Presheaf, c: &Sieve, cap: usize) -> Result<Vec<MatchingFamily>> {
    let tops = c.maximal_members();
    let mut search = MatchingSearch {
        f,
        c,
        tops: &tops,
        assigned: HashMap::new(),
        out: Vec::new(),
        cap,
    };
    if !search.descend(0) {
        return Err(Error::CapExceeded {
            base: c.base(),
            cap,
            partial: search.out.len(),
        });
    }
    Ok(search.out)
}

struct MatchingSearch<'a> {
    f: &'a Presheaf,
    c: &'a Sieve,
    tops: &'a [SubsetMask],
    assigned: HashMap<SubsetMask, usize>,
    out: Vec<MatchingFamily>,
    cap: usize,
}

impl MatchingSearch<'_> {
    fn descend(&mut self, depth: usize) -> bool {
        let Some(&top) = self.tops.get(depth) else {
            if self.out.len() == self.cap {
                return false;
            }
            let assignment = self.c.members().iter().map(|&m| (m, self.assigned[&m])).collect();
            self.out.push(MatchingFamily {
                sieve: self.c.clone(),
                assignment,
            });
            return true;
        };
        for section in 0..self.f.sections(top).len() {
            let mut fresh = Vec::new();
            let mut consistent = true;
            for &member in self.c.members() {
                if !member.is_subset_of(top) {
                    continue;
                }
                let image = self.f.restrict(section, top, member);
                match self.assigned.get(&member) {
                    Some(&prior) if prior != image => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        self.assigned.insert(member, image);
                        fresh.push(member);
                    }
                }
            }
            let ok = !consistent || self.descend(depth + 1);
            for member in fresh {
                self.assigned.remove(&member);
            }
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Sections over the base whose restrictions reproduce `m`.
pub fn amalgamations(f: &Presheaf, m: &MatchingFamily) -> Vec<usize> {
    let base = m.sieve.base();
    (0..f.sections(base).len())
        .filter(|&x| m.assignment.iter().all(|&(member, s)| f.restrict(x, base, member) == s))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafCounterexample {
    pub object: SubsetMask,
    pub sieve: Sieve,
    pub family: MatchingFamily,
    pub amalgamations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafVerdict {
    /// Matching families examined before stopping.
    pub families_checked: usize,
    pub counterexample: Option<SheafCounterexample>,
}

impl SheafVerdict {
    pub fn is_sheaf(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Every matching family on every covering sieve has exactly one amalgamation.
///
/// Objects, sieves and families are visited in canonical order, so the
/// reported counterexample is the first one in that order. `f` is assumed to
/// pass [`validate_presheaf`].
pub fn is_sheaf(f: &Presheaf, k: &ConnectivityStructure, table: &CoveringTable, cap: usize) -> Result<SheafVerdict> {
    if f.structure.family() != k.family() {
        return Err(Error::Malformed(
            "presheaf is defined over a different structure".into(),
        ));
    }
    let mut families_checked = 0;
    for (object, covers) in table.iter() {
        for sieve in covers {
            for family in matching_families(f, sieve, cap)? {
                families_checked += 1;
                let glued = amalgamations(f, &family).len();
                if glued != 1 {
                    return Ok(SheafVerdict {
                        families_checked,
                        counterexample: Some(SheafCounterexample {
                            object,
                            sieve: sieve.clone(),
                            family,
                            amalgamations: glued,
                        }),
                    });
                }
            }
        }
    }
    Ok(SheafVerdict {
        families_checked,
        counterexample: None,
    })
}
