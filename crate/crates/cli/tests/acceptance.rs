//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with a custom harness so the report is printed even when output
//! capture is on. The process exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use connectif::corpus::{desk_corpus, random_generators};
use connectif::interval::{build_witness, verify_witness, RationalInterval};
use connectif::io::{parse_presheaf, parse_rational, parse_space};
use connectif::sheaf::is_sheaf;
use connectif::site::{
    covering_sieves, covering_table, enumerate_sieves, is_covering, is_irreducible_via_j, maximal_sieve, verify_axioms,
    SamplingMode, Sieve, DEFAULT_CAP,
};
use connectif::{closure, generate_structure, ConnectivityStructure, GeneratorFamily, GroundSet, SubsetMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 120;
const CORPUS_MAX_POINTS: usize = 6;
const CORPUS_MAX_FAMILY: usize = 20;

const LIMIT_JTABLE: Duration = Duration::from_secs(1);
const LIMIT_AXIOMS: Duration = Duration::from_secs(60);
const LIMIT_SHEAF: Duration = Duration::from_secs(5);
const LIMIT_WITNESS: Duration = Duration::from_secs(5);

const CLOSURE_FAMILIES: usize = 1000;
const CLOSURE_MAX_POINTS: usize = 8;
const ORACLE_MAX_POSET: usize = 12;
const WITNESS_CASES: usize = 600;
const WITNESS_MAX_DENOMINATOR: i64 = 64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn five_point() -> ConnectivityStructure {
    parse_space(&read("five-point.json")).expect("example file loads")
}

fn corpus() -> Vec<ConnectivityStructure> {
    desk_corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_MAX_POINTS, CORPUS_MAX_FAMILY)
}

fn keyed(g: &GroundSet, keys: &[&str]) -> Vec<SubsetMask> {
    keys.iter().map(|k| g.parse_key(k).expect("known labels")).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn criterion_1() -> Outcome {
    let k = five_point();
    let g = k.ground().clone();
    let start = Instant::now();
    let table = covering_table(&k, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let abcd = g.parse_key("a,b,c,d").unwrap();
    for &a in k.family() {
        let got: BTreeSet<Vec<SubsetMask>> = table
            .get(a)
            .ok_or_else(|| format!("no entry for {}", g.show(a)))?
            .iter()
            .map(|s| s.members().to_vec())
            .collect();
        let maximal: Vec<SubsetMask> = k.below(a).collect();
        let mut expected = BTreeSet::from([maximal]);
        if a.is_empty() {
            expected.insert(Vec::new());
        } else if a == abcd {
            expected.insert(keyed(&g, &["", "a", "b", "c", "d", "a,b", "b,c,d"]));
        }
        ensure(got == expected, || format!("J({}) = {got:?}", g.show(a)))?;
    }
    within(elapsed, LIMIT_JTABLE)?;
    Ok(format!("{} objects, exact match, {elapsed:.2?}", k.len()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut structures = vec![five_point()];
    structures.extend(corpus());
    let mut instances = 0;
    for k in &structures {
        for report in verify_axioms(k, SamplingMode::Exhaustive, DEFAULT_CAP).map_err(|e| e.to_string())? {
            ensure(report.passed(), || {
                format!(
                    "{} violated on {:?}: {:?}",
                    report.axiom.name(),
                    k.family(),
                    report.violations[0]
                )
            })?;
            instances += report.instances;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, LIMIT_AXIOMS)?;
    Ok(format!(
        "{} structures, {instances} instances, 0 violations, {elapsed:.2?}",
        structures.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for k in std::iter::once(five_point()).chain(corpus()) {
        for &a in k.family() {
            let by_definition = k.irreducible_by_definition(a).map_err(|e| e.to_string())?;
            let via_j = is_irreducible_via_j(&k, a, DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(by_definition == via_j, || {
                format!("disagree on {a} in {:?}", k.family())
            })?;
            checked += 1;
        }
    }
    let k = five_point();
    let g = k.ground();
    let expected: Vec<SubsetMask> = k
        .family()
        .iter()
        .copied()
        .filter(|&a| !a.is_empty() && a != g.parse_key("a,b,c,d").unwrap())
        .collect();
    let got = k.irreducibles();
    ensure(got == expected, || format!("example irreducibles {:?}", got))?;
    Ok(format!(
        "{checked} connected sets agree; example irreducibles = K minus {{∅, {{a,b,c,d}}}}"
    ))
}

fn criterion_4() -> Outcome {
    let (mut singletons, mut larger) = (0, 0);
    for k in corpus() {
        for &a in k.family() {
            if a.len() == 1 {
                let j = covering_sieves(&k, a, DEFAULT_CAP).map_err(|e| e.to_string())?;
                ensure(j.len() == 1, || format!("|J({a})| = {}", j.len()))?;
                singletons += 1;
            } else if a.len() >= 2 {
                let points: Vec<SubsetMask> = k.below(a).filter(|m| m.len() <= 1).collect();
                let sieve = Sieve::new(&k, a, points).map_err(|e| e.to_string())?;
                ensure(!is_covering(&k, &sieve), || {
                    format!("points cover {a} in {:?}", k.family())
                })?;
                larger += 1;
            }
        }
    }
    Ok(format!(
        "{singletons} singletons with |J| = 1, {larger} larger sets not covered by points"
    ))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for k in std::iter::once(five_point()).chain(corpus()) {
        let j = covering_sieves(&k, SubsetMask::EMPTY, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let expected = vec![
            Sieve::empty(SubsetMask::EMPTY),
            maximal_sieve(&k, SubsetMask::EMPTY).unwrap(),
        ];
        ensure(j == expected, || format!("J(∅) = {j:?}"))?;
        ensure(expected[1].members() == [SubsetMask::EMPTY], || {
            "maximal sieve on ∅".into()
        })?;
        checked += 1;
    }
    Ok(format!("{checked} structures with J(∅) = {{empty, {{∅}}}}"))
}

fn subfamily(small: &[SubsetMask], large: &[SubsetMask]) -> bool {
    small.iter().all(|m| large.binary_search(m).is_ok())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fixed_points = 0;
    for round in 0..CLOSURE_FAMILIES {
        let n = 1 + round % CLOSURE_MAX_POINTS;
        let count = rng.gen_range(0..=n + 3);
        let gen = random_generators(&mut rng, n, count);
        let k = generate_structure(&gen);
        let closed = k.family().to_vec();
        let ctx = || format!("generators {:?}", gen.generators());

        ensure(subfamily(&closure(gen.generators().iter().copied()), &closed), ctx)?;
        let mut gens = gen.generators().to_vec();
        gens.sort();
        ensure(subfamily(&gens, &closed), ctx)?;
        ensure(closure(closed.iter().copied()) == closed, ctx)?;

        let extra: Vec<SubsetMask> = (0..rng.gen_range(1..=3))
            .map(|_| SubsetMask::from_bits(rng.gen_range(1..1u64 << n)))
            .collect();
        let mut larger = gen.generators().to_vec();
        larger.extend(extra);
        let bigger = generate_structure(&GeneratorFamily::new(k.ground().clone(), larger).map_err(|e| e.to_string())?);
        ensure(subfamily(&closed, bigger.family()), ctx)?;

        let again = ConnectivityStructure::new(k.ground().clone(), closed.clone()).map_err(|e| e.to_string())?;
        let regenerated = generate_structure(&GeneratorFamily::new(k.ground().clone(), closed.clone()).unwrap());
        ensure(
            again.family() == closed.as_slice() && regenerated.family() == closed.as_slice(),
            ctx,
        )?;
        fixed_points += 1;
    }
    Ok(format!(
        "{CLOSURE_FAMILIES} generator families, {fixed_points} fixed points"
    ))
}

/// Every downward-closed subset of the elements of `K|_A`.
fn downset_count(k: &ConnectivityStructure, a: SubsetMask) -> usize {
    let elems: Vec<SubsetMask> = k.below(a).collect();
    (0u32..1 << elems.len())
        .filter(|pick| {
            let inside = |i: usize| pick >> i & 1 == 1;
            (0..elems.len())
                .filter(|&i| inside(i))
                .all(|i| (0..elems.len()).all(|j| !elems[j].is_subset_of(elems[i]) || inside(j)))
        })
        .count()
}

fn criterion_7() -> Outcome {
    let k = five_point();
    let abcd = k.ground().parse_key("a,b,c,d").unwrap();
    let got = enumerate_sieves(&k, abcd, DEFAULT_CAP)
        .map_err(|e| e.to_string())?
        .len();
    ensure(got == 25 && downset_count(&k, abcd) == 25, || {
        format!("{got} sieves on {{a,b,c,d}}")
    })?;

    let mut posets = 0;
    for k in std::iter::once(five_point()).chain(corpus()) {
        for &a in k.family() {
            if k.below(a).count() > ORACLE_MAX_POSET {
                continue;
            }
            let got = enumerate_sieves(&k, a, DEFAULT_CAP).map_err(|e| e.to_string())?.len();
            let expected = downset_count(&k, a);
            ensure(got == expected, || {
                format!("{got} vs {expected} sieves on {a} in {:?}", k.family())
            })?;
            posets += 1;
        }
    }
    Ok(format!(
        "25 sieves on {{a,b,c,d}}; {posets} posets match the downset oracle"
    ))
}

fn criterion_8() -> Outcome {
    let k = five_point();
    let start = Instant::now();
    let table = covering_table(&k, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let load = |name: &str| parse_presheaf(&read(name), &k).map_err(|e| e.to_string());

    let terminal = load("terminal.json")?;
    ensure(k.family().iter().all(|&a| terminal.sections(a).len() == 1), || {
        "terminal file is not a singleton presheaf".into()
    })?;
    let verdict = is_sheaf(&terminal, &k, &table, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(verdict.is_sheaf(), || "terminal presheaf is not a sheaf".into())?;

    let constant = load("constant2.json")?;
    let first = is_sheaf(&constant, &k, &table, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let second = is_sheaf(&constant, &k, &table, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(first == second, || "counterexample differs between runs".into())?;
    let cx = first.counterexample.ok_or("constant presheaf passed")?;
    ensure(
        cx.object.is_empty() && cx.sieve.is_empty() && cx.amalgamations == 2,
        || format!("counterexample {cx:?}"),
    )?;

    let maps = load("maps01.json")?;
    let verdict = is_sheaf(&maps, &k, &table, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(verdict.is_sheaf(), || {
        format!("maps-to-{{0,1}} failed: {:?}", verdict.counterexample)
    })?;

    let elapsed = start.elapsed();
    within(elapsed, LIMIT_SHEAF)?;
    Ok(format!(
        "terminal ok, constant fails at ∅ with 2 amalgamations, maps ok, {elapsed:.2?}"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = |n: i64, d: i64| parse_rational(&format!("{n}/{d}")).expect("valid rational");
    let start = Instant::now();
    for _ in 0..WITNESS_CASES {
        let lo = q(rng.gen_range(-256..256), rng.gen_range(1..=WITNESS_MAX_DENOMINATOR));
        let len = q(rng.gen_range(0..256), rng.gen_range(1..=WITNESS_MAX_DENOMINATOR));
        let eps = q(rng.gen_range(1..256), rng.gen_range(1..=WITNESS_MAX_DENOMINATOR));
        let target = RationalInterval::closed(lo.clone(), &lo + len).map_err(|e| e.to_string())?;
        let w = build_witness(&target, &eps).map_err(|e| e.to_string())?;
        ensure(verify_witness(&w), || {
            format!("witness for {target} with epsilon {eps} rejected")
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, LIMIT_WITNESS)?;
    Ok(format!("{WITNESS_CASES} cases verified, {elapsed:.2?}"))
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_connectif");
    let space = data("five-point.json");
    let space = space.to_str().unwrap();
    let presheaf = |n: &str| data(n).to_string_lossy().into_owned();
    let invocations: Vec<Vec<String>> = [
        vec!["validate", space],
        vec!["generate", &presheaf("chain-generators.json")],
        vec!["induced", space, "--set", "a,b,c,d"],
        vec!["sieves", space, "--on", "a,b,c,d"],
        vec!["jtable", space],
        vec!["irreducibles", space],
        vec!["axioms", space, "--exhaustive"],
        vec!["axioms", space, "--samples", "200", "--seed", "7"],
        vec!["sheaf", space, &presheaf("terminal.json")],
        vec!["sheaf", space, &presheaf("constant2.json")],
        vec!["sheaf", space, &presheaf("maps01.json")],
        vec!["interval-witness", "--target", "-1/3,5/7", "--epsilon", "1/9"],
    ]
    .into_iter()
    .map(|args| args.into_iter().map(String::from).collect())
    .collect();

    for args in &invocations {
        let run = || {
            Command::new(bin)
                .arg("--format")
                .arg("json")
                .args(args)
                .output()
                .expect("binary runs")
        };
        let (first, second) = (run(), run());
        ensure(first.status.code() == second.status.code(), || {
            format!("{args:?}: exit codes differ")
        })?;
        ensure(!first.stdout.is_empty(), || format!("{args:?}: no output"))?;
        serde_json::from_slice::<serde_json::Value>(&first.stdout).map_err(|e| format!("{args:?}: {e}"))?;
        ensure(first.stdout == second.stdout, || format!("{args:?}: output differs"))?;
    }
    Ok(format!(
        "{} invocations byte-identical across two runs",
        invocations.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("covering table of the five-point example", criterion_1),
        ("exhaustive axioms on the example and corpus", criterion_2),
        ("irreducible equivalence", criterion_3),
        ("singletons and point sieves", criterion_4),
        ("covering sieves of the empty set", criterion_5),
        ("closure laws", criterion_6),
        ("sieve count against downset oracle", criterion_7),
        ("sheaf checks on the example", criterion_8),
        ("interval witnesses", criterion_9),
        ("byte-identical JSON reports", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
