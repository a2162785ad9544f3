//! Sieves on the inclusion poset of a connectivity structure and the
//! topology whose covering sieves on `A` are those generating all of `K|_A`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::{canonicalize, SubsetMask};
use crate::structure::{closure, ConnectivityStructure};

/// Default bound on the number of sieves enumerated on a single object.
pub const DEFAULT_CAP: usize = 1_000_000;

/// A sieve on `base`, given by the connected sets that are domains of its arrows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sieve {
    base: SubsetMask,
    members: Vec<SubsetMask>,
}

impl Sieve {
    /// Builds a sieve after checking [`is_sieve`].
    pub fn new(k: &ConnectivityStructure, base: SubsetMask, mut members: Vec<SubsetMask>) -> Result<Self> {
        k.require(base)?;
        canonicalize(&mut members);
        if !is_sieve(k, base, &members) {
            return Err(Error::Domain(format!(
                "members are not a downward-closed family of connected subsets of {base}"
            )));
        }
        Ok(Sieve { base, members })
    }

    pub fn empty(base: SubsetMask) -> Self {
        Sieve {
            base,
            members: Vec::new(),
        }
    }

    pub fn base(&self) -> SubsetMask {
        self.base
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: SubsetMask) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    /// Members not contained in any other member.
    pub fn maximal_members(&self) -> Vec<SubsetMask> {
        self.members
            .iter()
            .copied()
            .filter(|&m| !self.members.iter().any(|&n| m.is_proper_subset_of(n)))
            .collect()
    }

    /// The pullback of the sieve along `b ⊆ base`.
    pub fn restrict(&self, k: &ConnectivityStructure, b: SubsetMask) -> Result<Sieve> {
        k.require(b)?;
        if !b.is_subset_of(self.base) {
            return Err(Error::Domain(format!("{b} is not contained in the base {}", self.base)));
        }
        Ok(self.restrict_unchecked(b))
    }

    fn restrict_unchecked(&self, b: SubsetMask) -> Sieve {
        Sieve {
            base: b,
            members: self.members.iter().copied().filter(|m| m.is_subset_of(b)).collect(),
        }
    }

    /// Table order: member count, then members compared lexicographically.
    fn table_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.members
            .len()
            .cmp(&other.members.len())
            .then_with(|| self.members.cmp(&other.members))
    }
}

pub fn maximal_sieve(k: &ConnectivityStructure, a: SubsetMask) -> Result<Sieve> {
    k.require(a)?;
    Ok(Sieve {
        base: a,
        members: k.below(a).collect(),
    })
}

/// Members are connected, contained in `base`, and downward closed in `K`.
pub fn is_sieve(k: &ConnectivityStructure, base: SubsetMask, members: &[SubsetMask]) -> bool {
    members
        .iter()
        .all(|&m| k.contains(m) && m.is_subset_of(base) && k.below(m).all(|c| members.contains(&c)))
}

/// `[c]_0 = K|_A`. Only `K|_A ⊆ [c]_0` is tested; the converse holds for
/// every sieve since its members lie in the structure `K|_A`.
pub fn is_covering(k: &ConnectivityStructure, c: &Sieve) -> bool {
    let generated = closure(c.members.iter().copied());
    k.below(c.base).all(|b| generated.binary_search(&b).is_ok())
}

/// All sieves on `a`, in table order.
///
/// Downsets of `K|_A` are produced by walking its elements from the top of
/// the canonical order down: an element below an included one is forced in,
/// any other element is branched on. Every branch ends in a distinct downset.
pub fn enumerate_sieves(k: &ConnectivityStructure, a: SubsetMask, cap: usize) -> Result<Vec<Sieve>> {
    k.require(a)?;
    let elems: Vec<SubsetMask> = k.below(a).collect();
    let below: Vec<Vec<usize>> = elems
        .iter()
        .enumerate()
        .map(|(i, &e)| (0..i).filter(|&j| elems[j].is_subset_of(e)).collect())
        .collect();

    let mut walk = DownsetWalk {
        elems: &elems,
        below: &below,
        forced: vec![0; elems.len()],
        chosen: Vec::with_capacity(elems.len()),
        out: Vec::new(),
        cap,
    };
    if !walk.descend(elems.len()) {
        return Err(Error::CapExceeded {
            base: a,
            cap,
            partial: walk.out.len(),
        });
    }
    let mut sieves: Vec<Sieve> = walk
        .out
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            Sieve { base: a, members }
        })
        .collect();
    sieves.sort_by(Sieve::table_cmp);
    Ok(sieves)
}

struct DownsetWalk<'a> {
    elems: &'a [SubsetMask],
    below: &'a [Vec<usize>],
    forced: Vec<u32>,
    chosen: Vec<SubsetMask>,
    out: Vec<Vec<SubsetMask>>,
    cap: usize,
}

impl DownsetWalk<'_> {
    /// Decides elements `0..remaining`; returns false once the cap is hit.
    fn descend(&mut self, remaining: usize) -> bool {
        let Some(i) = remaining.checked_sub(1) else {
            if self.out.len() == self.cap {
                return false;
            }
            self.out.push(self.chosen.clone());
            return true;
        };
        if self.forced[i] > 0 {
            self.chosen.push(self.elems[i]);
            let ok = self.descend(i);
            self.chosen.pop();
            return ok;
        }
        if !self.descend(i) {
            return false;
        }
        self.chosen.push(self.elems[i]);
        for &j in &self.below[i] {
            self.forced[j] += 1;
        }
        let ok = self.descend(i);
        for &j in &self.below[i] {
            self.forced[j] -= 1;
        }
        self.chosen.pop();
        ok
    }
}

/// `J(a)`, in table order. The maximal sieve is always among them.
pub fn covering_sieves(k: &ConnectivityStructure, a: SubsetMask, cap: usize) -> Result<Vec<Sieve>> {
    Ok(enumerate_sieves(k, a, cap)?
        .into_iter()
        .filter(|c| is_covering(k, c))
        .collect())
}

/// `A ↦ J(A)` over every connected set, in canonical object order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringTable {
    entries: Vec<(SubsetMask, Vec<Sieve>)>,
}

impl CoveringTable {
    pub fn entries(&self) -> &[(SubsetMask, Vec<Sieve>)] {
        &self.entries
    }

    pub fn get(&self, a: SubsetMask) -> Option<&[Sieve]> {
        self.entries
            .binary_search_by(|(obj, _)| obj.cmp(&a))
            .ok()
            .map(|i| self.entries[i].1.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, &[Sieve])> {
        self.entries.iter().map(|(a, j)| (*a, j.as_slice()))
    }
}

pub fn covering_table(k: &ConnectivityStructure, cap: usize) -> Result<CoveringTable> {
    let entries = k
        .family()
        .iter()
        .map(|&a| covering_sieves(k, a, cap).map(|j| (a, j)))
        .collect::<Result<_>>()?;
    Ok(CoveringTable { entries })
}

/// `J(a)` consists of the maximal sieve alone.
pub fn is_irreducible_via_j(k: &ConnectivityStructure, a: SubsetMask, cap: usize) -> Result<bool> {
    Ok(covering_sieves(k, a, cap)?.len() == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Maximality,
    Stability,
    Transitivity,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Maximality => "maximality",
            Axiom::Stability => "stability",
            Axiom::Transitivity => "transitivity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    Exhaustive,
    Randomized { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// The maximal sieve on `object` does not cover it.
    Maximality { object: SubsetMask },
    /// `cover ∈ J(object)` restricted to `to` does not cover `to`.
    Stability {
        object: SubsetMask,
        cover: Sieve,
        to: SubsetMask,
    },
    /// `sieve` is locally covering along `cover ∈ J(object)` but does not cover.
    Transitivity {
        object: SubsetMask,
        cover: Sieve,
        sieve: Sieve,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub instances: usize,
    pub violations: Vec<AxiomViolation>,
    pub mode: SamplingMode,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sieves and covering data for one object, memoized across checks.
struct ObjectSieves {
    below: Vec<SubsetMask>,
    sieves: Vec<Sieve>,
    covering: Vec<usize>,
}

struct AxiomChecker<'a> {
    k: &'a ConnectivityStructure,
    cap: usize,
    objects: HashMap<SubsetMask, ObjectSieves>,
    covers: HashMap<Sieve, bool>,
}

impl<'a> AxiomChecker<'a> {
    fn new(k: &'a ConnectivityStructure, cap: usize) -> Self {
        AxiomChecker {
            k,
            cap,
            objects: HashMap::new(),
            covers: HashMap::new(),
        }
    }

    fn covers(&mut self, sieve: &Sieve) -> bool {
        if let Some(&hit) = self.covers.get(sieve) {
            return hit;
        }
        let hit = is_covering(self.k, sieve);
        self.covers.insert(sieve.clone(), hit);
        hit
    }

    fn object(&mut self, a: SubsetMask) -> Result<&ObjectSieves> {
        if !self.objects.contains_key(&a) {
            let sieves = enumerate_sieves(self.k, a, self.cap)?;
            let covering = (0..sieves.len()).filter(|&i| self.covers(&sieves[i])).collect();
            let data = ObjectSieves {
                below: self.k.below(a).collect(),
                sieves,
                covering,
            };
            self.objects.insert(a, data);
        }
        Ok(&self.objects[&a])
    }

    fn check_maximality(&mut self, a: SubsetMask) -> Option<AxiomViolation> {
        let max = maximal_sieve(self.k, a).expect("object of the structure");
        (!self.covers(&max)).then_some(AxiomViolation::Maximality { object: a })
    }

    fn check_stability(&mut self, a: SubsetMask, cover: &Sieve, b: SubsetMask) -> Option<AxiomViolation> {
        let restricted = cover.restrict_unchecked(b);
        (!self.covers(&restricted)).then(|| AxiomViolation::Stability {
            object: a,
            cover: cover.clone(),
            to: b,
        })
    }

    fn check_transitivity(&mut self, a: SubsetMask, cover: &Sieve, d: &Sieve) -> Option<AxiomViolation> {
        let locally_covering = cover.members.iter().all(|&b| self.covers(&d.restrict_unchecked(b)));
        (locally_covering && !self.covers(d)).then(|| AxiomViolation::Transitivity {
            object: a,
            cover: cover.clone(),
            sieve: d.clone(),
        })
    }
}

/// Checks the three topology axioms for `J` on `k`.
///
/// Maximality is always checked on every object. In randomized mode each
/// sample draws an object `A`, a covering sieve `c` on `A`, a connected
/// `B ⊆ A` and an arbitrary sieve `d` on `A`, and checks stability on
/// `(c, B)` and transitivity on `(c, d)`.
pub fn verify_axioms(k: &ConnectivityStructure, mode: SamplingMode, cap: usize) -> Result<Vec<AxiomReport>> {
    let mut checker = AxiomChecker::new(k, cap);
    let mut maximality = AxiomReport {
        axiom: Axiom::Maximality,
        instances: 0,
        violations: Vec::new(),
        mode,
    };
    let mut stability = AxiomReport {
        axiom: Axiom::Stability,
        ..maximality.clone()
    };
    let mut transitivity = AxiomReport {
        axiom: Axiom::Transitivity,
        ..maximality.clone()
    };

    for &a in k.family() {
        maximality.instances += 1;
        maximality.violations.extend(checker.check_maximality(a));
    }

    match mode {
        SamplingMode::Exhaustive => {
            for &a in k.family() {
                let data = checker.object(a)?;
                let below = data.below.clone();
                let sieves = data.sieves.clone();
                let covering: Vec<Sieve> = data.covering.iter().map(|&i| sieves[i].clone()).collect();
                for cover in &covering {
                    for &b in &below {
                        stability.instances += 1;
                        stability.violations.extend(checker.check_stability(a, cover, b));
                    }
                    for d in &sieves {
                        transitivity.instances += 1;
                        transitivity.violations.extend(checker.check_transitivity(a, cover, d));
                    }
                }
            }
        }
        SamplingMode::Randomized { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let family = k.family();
            for _ in 0..samples {
                let a = family[rng.gen_range(0..family.len())];
                let data = checker.object(a)?;
                // The maximal sieve always covers, so `covering` is nonempty
                // unless maximality already failed.
                if data.covering.is_empty() {
                    continue;
                }
                let cover = data.sieves[data.covering[rng.gen_range(0..data.covering.len())]].clone();
                let b = data.below[rng.gen_range(0..data.below.len())];
                let d = data.sieves[rng.gen_range(0..data.sieves.len())].clone();
                stability.instances += 1;
                stability.violations.extend(checker.check_stability(a, &cover, b));
                transitivity.instances += 1;
                transitivity
                    .violations
                    .extend(checker.check_transitivity(a, &cover, &d));
            }
        }
    }
    Ok(vec![maximality, stability, transitivity])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::GroundSet;

    fn five_point() -> ConnectivityStructure {
        let g = GroundSet::new(["a", "b", "c", "d", "e"]).unwrap();
        let family = ["", "a", "b", "c", "d", "e", "a,b", "b,c,d", "a,b,c,d", "a,b,c,d,e"]
            .iter()
            .map(|key| g.parse_key(key).unwrap())
            .collect();
        ConnectivityStructure::new(g, family).unwrap()
    }

    fn keys(k: &ConnectivityStructure, list: &[&str]) -> Vec<SubsetMask> {
        let mut v: Vec<SubsetMask> = list.iter().map(|key| k.ground().parse_key(key).unwrap()).collect();
        v.sort();
        v
    }

    fn key(k: &ConnectivityStructure, s: &str) -> SubsetMask {
        k.ground().parse_key(s).unwrap()
    }

    const COVER_ABCD: [&str; 7] = ["", "a", "b", "c", "d", "a,b", "b,c,d"];

    #[test]
    fn maximal_sieve_examples() {
        let k = five_point();
        let ab = maximal_sieve(&k, key(&k, "a,b")).unwrap();
        assert_eq!(ab.members(), keys(&k, &["", "a", "b", "a,b"]).as_slice());
        assert_eq!(
            maximal_sieve(&k, SubsetMask::EMPTY).unwrap().members(),
            &[SubsetMask::EMPTY]
        );
        assert_eq!(maximal_sieve(&k, k.ground().full()).unwrap().len(), 10);
        assert!(matches!(maximal_sieve(&k, key(&k, "a,c")), Err(Error::NotConnected(_))));
    }

    #[test]
    fn sieve_predicate_examples() {
        let k = five_point();
        assert!(is_sieve(&k, key(&k, "a,b,c,d"), &keys(&k, &COVER_ABCD)));
        assert!(!is_sieve(&k, key(&k, "a,b"), &keys(&k, &["a,b"])));
        assert!(is_sieve(&k, key(&k, "a,b"), &[]));
        assert!(!is_sieve(&k, key(&k, "a,b"), &keys(&k, &["", "c"])));
        assert!(Sieve::new(&k, key(&k, "a,b"), keys(&k, &["a,b"])).is_err());
    }

    #[test]
    fn restriction_examples() {
        let k = five_point();
        let abcd = key(&k, "a,b,c,d");
        let max = maximal_sieve(&k, abcd).unwrap();
        assert_eq!(
            max.restrict(&k, key(&k, "a,b")).unwrap(),
            maximal_sieve(&k, key(&k, "a,b")).unwrap()
        );

        let cover = Sieve::new(&k, abcd, keys(&k, &COVER_ABCD)).unwrap();
        let bcd = key(&k, "b,c,d");
        let restricted = cover.restrict(&k, bcd).unwrap();
        assert_eq!(restricted.members(), keys(&k, &["", "b", "c", "d", "b,c,d"]).as_slice());
        assert_eq!(restricted, maximal_sieve(&k, bcd).unwrap());

        let empty = Sieve::empty(abcd).restrict(&k, bcd).unwrap();
        assert!(empty.is_empty());
        assert!(is_sieve(&k, bcd, restricted.members()));

        assert!(matches!(cover.restrict(&k, key(&k, "e")), Err(Error::Domain(_))));
        assert!(matches!(
            cover.restrict(&k, key(&k, "a,c")),
            Err(Error::NotConnected(_))
        ));
    }

    #[test]
    fn covering_examples() {
        let k = five_point();
        let cover = Sieve::new(&k, key(&k, "a,b,c,d"), keys(&k, &COVER_ABCD)).unwrap();
        assert!(is_covering(&k, &cover));
        assert!(is_covering(&k, &Sieve::empty(SubsetMask::EMPTY)));
        assert!(!is_covering(&k, &Sieve::empty(key(&k, "a"))));
        let singles = Sieve::new(&k, key(&k, "a,b"), keys(&k, &["", "a", "b"])).unwrap();
        assert!(!is_covering(&k, &singles));
    }

    #[test]
    fn enumeration_examples() {
        let k = five_point();
        assert_eq!(enumerate_sieves(&k, key(&k, "a,b,c,d"), DEFAULT_CAP).unwrap().len(), 25);

        let on_empty = enumerate_sieves(&k, SubsetMask::EMPTY, DEFAULT_CAP).unwrap();
        assert_eq!(
            on_empty,
            vec![
                Sieve::empty(SubsetMask::EMPTY),
                maximal_sieve(&k, SubsetMask::EMPTY).unwrap()
            ]
        );

        let on_e = enumerate_sieves(&k, key(&k, "e"), DEFAULT_CAP).unwrap();
        let members: Vec<Vec<SubsetMask>> = on_e.iter().map(|s| s.members().to_vec()).collect();
        assert_eq!(members, vec![vec![], keys(&k, &[""]), keys(&k, &["", "e"])]);
    }

    #[test]
    fn enumeration_cap_reports_partial_count() {
        let k = five_point();
        let err = enumerate_sieves(&k, key(&k, "a,b,c,d"), 10).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                base: key(&k, "a,b,c,d"),
                cap: 10,
                partial: 10
            }
        );
        assert!(enumerate_sieves(&k, key(&k, "a,b,c,d"), 25).is_ok());
    }

    #[test]
    fn covering_sieve_examples() {
        let k = five_point();
        let abcd = key(&k, "a,b,c,d");
        let j = covering_sieves(&k, abcd, DEFAULT_CAP).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[0].members(), keys(&k, &COVER_ABCD).as_slice());
        assert_eq!(j[1], maximal_sieve(&k, abcd).unwrap());

        let j0 = covering_sieves(&k, SubsetMask::EMPTY, DEFAULT_CAP).unwrap();
        assert_eq!(j0.len(), 2);
        assert!(j0[0].is_empty());

        assert_eq!(covering_sieves(&k, key(&k, "a,b"), DEFAULT_CAP).unwrap().len(), 1);
    }

    #[test]
    fn covering_table_examples() {
        let k = five_point();
        let table = covering_table(&k, DEFAULT_CAP).unwrap();
        for (a, j) in table.iter() {
            let expected = if a.is_empty() || a == key(&k, "a,b,c,d") { 2 } else { 1 };
            assert_eq!(j.len(), expected, "object {a}");
        }
        assert!(table.get(key(&k, "a,c")).is_none());

        let trivial = ConnectivityStructure::new(GroundSet::new(["a"]).unwrap(), vec![]).unwrap();
        let table = covering_table(&trivial, DEFAULT_CAP).unwrap();
        assert_eq!(table.entries().len(), 1);
        assert_eq!(table.get(SubsetMask::EMPTY).unwrap().len(), 2);

        let path = ConnectivityStructure::from_graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let j = covering_sieves(&path, path.ground().full(), DEFAULT_CAP).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[0].len(), path.len() - 1);
        assert!(!j[0].contains(path.ground().full()));
    }

    #[test]
    fn irreducibility_through_j() {
        let k = five_point();
        assert!(is_irreducible_via_j(&k, k.ground().full(), DEFAULT_CAP).unwrap());
        assert!(!is_irreducible_via_j(&k, SubsetMask::EMPTY, DEFAULT_CAP).unwrap());
        assert!(!is_irreducible_via_j(&k, key(&k, "a,b,c,d"), DEFAULT_CAP).unwrap());
    }

    #[test]
    fn axioms_hold_on_five_point() {
        let k = five_point();
        let reports = verify_axioms(&k, SamplingMode::Exhaustive, DEFAULT_CAP).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(r.passed(), "{:?}", r);
            assert!(r.instances > 0);
        }
        assert_eq!(reports[0].instances, 10);
    }

    #[test]
    fn axioms_hold_on_trivial_structure() {
        let trivial = ConnectivityStructure::new(GroundSet::new(["a"]).unwrap(), vec![]).unwrap();
        let reports = verify_axioms(&trivial, SamplingMode::Exhaustive, DEFAULT_CAP).unwrap();
        assert!(reports.iter().all(AxiomReport::passed));
        // J(∅) has two sieves, each tested against both sieves on ∅.
        assert_eq!(reports[2].instances, 4);
    }

    #[test]
    fn randomized_axioms_are_reproducible() {
        let k = five_point();
        let mode = SamplingMode::Randomized { samples: 200, seed: 7 };
        let first = verify_axioms(&k, mode, DEFAULT_CAP).unwrap();
        let second = verify_axioms(&k, mode, DEFAULT_CAP).unwrap();
        assert_eq!(first, second);
        assert!(first.iter().all(AxiomReport::passed));
        assert_eq!(first[1].instances, 200);
    }

    #[test]
    fn a_non_topology_is_caught() {
        // A non-covering sieve passed off as a cover must surface as a violation.
        let k = five_point();
        let mut checker = AxiomChecker::new(&k, DEFAULT_CAP);
        let bogus = Sieve::empty(key(&k, "a,b"));
        let v = checker.check_stability(key(&k, "a,b"), &bogus, key(&k, "a"));
        assert!(matches!(v, Some(AxiomViolation::Stability { .. })));
    }
}
