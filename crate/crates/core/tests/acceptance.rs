//! Acceptance suite. Every criterion is an exact check; one line per
//! criterion is printed and the process fails if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{
    affine_space, det, dot, dual_rays_oracle, fan, fixture_paths, hilbert_basis_oracle, hirzebruch,
    ivs, projective_space, random_complete_plane_fan, random_cone_fan, random_levels,
    random_simplicial_cone, rng, to_i64s, with_levels,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use toristack::charts::{is_deligne_mumford, local_chart, stabilizer};
use toristack::cli::{build_stacky_fan, parse_document};
use toristack::monoids::{
    admissible_resolution, exponent_vectors, irreducible_ray_correspondence,
    minimal_free_resolution, monoid_from_cone, resolution_cokernel, restrict_resolution,
    AffineMonoid,
};
use toristack::stackyfan::{is_complete, validate_fan, Fan, StackyFan};
use toristack::RationalCone;

const TIME_LIMIT: Duration = Duration::from_secs(30);

/// The shared random cone sample: full-dimensional simplicial cones with
/// `d ∈ {1, 2, 3}` and entries in `[-5, 5]`.
fn test_cones() -> Vec<Vec<Vec<i64>>> {
    let mut r = rng(2024);
    (0..200)
        .map(|_| {
            let d = r.gen_range(1..=3);
            random_simplicial_cone(&mut r, d, 5)
        })
        .collect()
}

fn monoid_of(gens: &[Vec<i64>]) -> AffineMonoid {
    monoid_from_cone(&RationalCone::new(gens.len(), &ivs(gens)).unwrap()).unwrap()
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn multiplicity_coincidence(cones: &[Vec<Vec<i64>>]) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for gens in cones {
        let cone = RationalCone::new(gens.len(), &ivs(gens)).unwrap();
        let res = minimal_free_resolution(&monoid_of(gens)).unwrap();
        let order = resolution_cokernel(&res).unwrap().order().unwrap();
        if order != cone.multiplicity().unwrap() || order != BigInt::from(det(gens).abs()) {
            bad.push(gens.clone());
        }
    }
    let t = start.elapsed();
    check(
        bad.is_empty() && t < TIME_LIMIT,
        format!("{} cones, {} mismatches, {:.2?}", cones.len(), bad.len(), t),
    )
}

fn stabilizer_formula(cones: &[Vec<Vec<i64>>]) -> Outcome {
    let start = Instant::now();
    let mut r = rng(7);
    let mut bad = 0;
    for gens in cones {
        let d = gens.len();
        let f = fan(d, gens, &[(0..d).collect()]);
        let levels = random_levels(&mut r, d, 4);
        let expected = BigInt::from(det(gens).abs()) * BigInt::from(levels.iter().product::<u64>());
        let sf = with_levels(&f, levels);
        let order = stabilizer(&sf, &(0..d).collect::<Vec<_>>())
            .unwrap()
            .order()
            .unwrap();
        if order != expected {
            bad += 1;
        }
    }
    let t = start.elapsed();
    check(
        bad == 0 && t < TIME_LIMIT,
        format!("{} cones, {} mismatches, {:.2?}", cones.len(), bad, t),
    )
}

fn invariant_ring() -> Outcome {
    let mut r = rng(8);
    let mut counterexamples = 0;
    let mut charts = 0;
    while charts < 50 {
        let d = r.gen_range(1..=3);
        let gens = random_simplicial_cone(&mut r, d, 5);
        let f = fan(d, &gens, &[(0..d).collect()]);
        let sf = with_levels(&f, random_levels(&mut r, d, 3));
        let ch = local_chart(&sf, &(0..d).collect::<Vec<_>>()).unwrap();
        let k = ch.group.invariant_factors.len();
        for a in exponent_vectors(ch.coordinates.len(), 6) {
            let fixed = (0..k).all(|j| {
                let s: BigInt = a
                    .iter()
                    .zip(&ch.coordinates)
                    .map(|(&e, c)| BigInt::from(e) * &c.weight.0[j])
                    .sum();
                (s % &ch.group.invariant_factors[j]).is_zero()
            });
            let in_p = ch
                .resolution
                .element(&a)
                .to_integral()
                .is_some_and(|x| gens.iter().all(|g| dot(g, &to_i64s(&x)) >= 0));
            if fixed != in_p {
                counterexamples += 1;
            }
        }
        charts += 1;
    }
    check(
        counterexamples == 0,
        format!("{charts} charts, {counterexamples} counterexamples"),
    )
}

fn universal_property(cones: &[Vec<Vec<i64>>]) -> Outcome {
    let mut r = rng(9);
    let mut bad = 0;
    for gens in cones.iter().take(100) {
        let p = monoid_of(gens);
        let minimal = minimal_free_resolution(&p).unwrap();
        let levels: BTreeMap<_, _> = minimal
            .rays()
            .iter()
            .map(|v| (v.clone(), r.gen_range(1..=4u64)))
            .collect();
        let adm = admissible_resolution(&p, &levels).unwrap();
        for ((f, g), v) in minimal
            .generators()
            .iter()
            .zip(adm.realized_generators())
            .zip(minimal.rays())
        {
            // f = n g for a positive integer n, read off a nonzero coordinate
            let k = v.0.iter().position(|x| !x.is_zero()).unwrap();
            let n: BigRational = &f.0[k] / &g.0[k];
            let ok = n.is_integer()
                && n.is_positive()
                && *f == g.scale(&n)
                && n == BigRational::from_integer(levels[v].into());
            if !ok {
                bad += 1;
            }
        }
    }
    check(
        bad == 0,
        format!("100 resolutions, {bad} generators without integral factorization"),
    )
}

fn projection_stability(cones: &[Vec<Vec<i64>>]) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for gens in cones {
        let p = monoid_of(gens);
        let res = minimal_free_resolution(&p).unwrap();
        let n = res.rank();
        for mask in 1u32..1 << n {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            checked += 1;
            if let Err(e) = restrict_resolution(&p, &res, &subset) {
                failures.push(format!("{gens:?} {subset:?}: {e}"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{checked} restrictions, {} mismatches{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first: {f:?}"))
                .unwrap_or_default()
        ),
    )
}

fn hilbert_basis_oracle_equivalence(cones: &[Vec<Vec<i64>>]) -> Outcome {
    let mut bad = 0;
    for gens in cones {
        let lib: Vec<Vec<i64>> = monoid_of(gens)
            .hilbert_basis()
            .iter()
            .map(to_i64s)
            .collect();
        if lib != hilbert_basis_oracle(gens, &dual_rays_oracle(gens)) {
            bad += 1;
        }
    }
    check(bad == 0, format!("{} cones, {bad} mismatches", cones.len()))
}

fn load_fixture(name: &str) -> StackyFan {
    let path = common::fixtures_dir().join(name);
    let doc = parse_document(&std::fs::read_to_string(path).unwrap()).unwrap();
    build_stacky_fan(&doc).unwrap().stacky_fan
}

fn drop_cone(f: &Fan, k: usize) -> Fan {
    let cones: Vec<Vec<usize>> = f
        .maximal_cones()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, c)| c.clone())
        .collect();
    let used: Vec<usize> = (0..f.rays().len())
        .filter(|i| cones.iter().any(|c| c.contains(i)))
        .collect();
    let rays: Vec<_> = used.iter().map(|&i| f.rays()[i].clone()).collect();
    let cones: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| {
            c.iter()
                .map(|i| used.iter().position(|u| u == i).unwrap())
                .collect()
        })
        .collect();
    validate_fan(f.ambient_rank(), &rays, &cones).unwrap()
}

fn completeness_fixtures() -> Outcome {
    let mut wrong = Vec::new();
    let complete = [
        "p1.json",
        "p2.json",
        "hirzebruch_f0.json",
        "hirzebruch_f1.json",
        "hirzebruch_f2.json",
    ];
    for name in complete {
        let f = load_fixture(name).fan().clone();
        if !is_complete(&f) {
            wrong.push(name.to_string());
        }
        for k in 0..f.maximal_cones().len() {
            if is_complete(&drop_cone(&f, k)) {
                wrong.push(format!("{name} without cone {k}"));
            }
        }
    }
    for name in [
        "p2_minus_cone.json",
        "hirzebruch_f0_minus_cone.json",
        "hirzebruch_f1_minus_cone.json",
        "hirzebruch_f2_minus_cone.json",
        "a2.json",
        "a3.json",
    ] {
        if is_complete(load_fixture(name).fan()) {
            wrong.push(name.to_string());
        }
    }
    for d in 1..=3 {
        if is_complete(&affine_space(d)) {
            wrong.push(format!("A^{d}"));
        }
    }
    check(wrong.is_empty(), format!("wrong answers: {wrong:?}"))
}

fn smooth_canonical_collapse() -> Outcome {
    let mut fans: Vec<Fan> = vec![
        projective_space(1),
        projective_space(2),
        projective_space(3),
    ];
    fans.extend((1..=3).map(affine_space));
    fans.extend((0..=3).map(hirzebruch));
    let mut r = rng(10);
    fans.extend(
        (0..40)
            .map(|_| random_complete_plane_fan(&mut r, 5))
            .filter(Fan::is_smooth),
    );
    for path in fixture_paths() {
        let doc = parse_document(&std::fs::read_to_string(&path).unwrap()).unwrap();
        if let Ok(loaded) = build_stacky_fan(&doc) {
            if loaded.stacky_fan.fan().is_smooth() {
                fans.push(loaded.stacky_fan.fan().clone());
            }
        }
    }
    let mut nontrivial = 0;
    for f in &fans {
        let sf = StackyFan::canonical(f.clone());
        for sigma in f.cones() {
            let chart_trivial = local_chart(&sf, sigma).unwrap().group.is_trivial();
            let stab_trivial = stabilizer(&sf, sigma).unwrap().is_trivial();
            if !(chart_trivial && stab_trivial) {
                nontrivial += 1;
            }
        }
    }
    check(
        nontrivial == 0,
        format!("{} smooth fans, {nontrivial} nontrivial groups", fans.len()),
    )
}

fn dm_tame_tripwire() -> Outcome {
    let mut r = rng(11);
    let primes = [0u64, 2, 3, 5, 7];
    let mut disagreements = 0;
    for _ in 0..100 {
        let f = if r.gen_bool(0.5) {
            random_complete_plane_fan(&mut r, 4)
        } else {
            let d = r.gen_range(1..=3);
            random_cone_fan(&mut r, d, 4)
        };
        let sf = with_levels(&f, random_levels(&mut r, f.rays().len(), 4));
        let k = r.gen_range(1..=3);
        let chars: Vec<u64> = primes.choose_multiple(&mut r, k).copied().collect();
        if is_deligne_mumford(&sf, &chars) != sf.is_tame(&chars) {
            disagreements += 1;
        }
    }
    check(
        disagreements == 0,
        format!("100 triples, {disagreements} disagreements"),
    )
}

fn correspondence_cardinalities() -> Outcome {
    let mut fans: Vec<StackyFan> = Vec::new();
    for path in fixture_paths() {
        let doc = parse_document(&std::fs::read_to_string(&path).unwrap()).unwrap();
        if let Ok(loaded) = build_stacky_fan(&doc) {
            fans.push(loaded.stacky_fan);
        }
    }
    let mut r = rng(12);
    for _ in 0..30 {
        let d = r.gen_range(1..=3);
        let f = random_cone_fan(&mut r, d, 5);
        fans.push(with_levels(&f, random_levels(&mut r, d, 3)));
    }
    let mut charts = 0;
    let mut bad = 0;
    for sf in &fans {
        for sigma in sf.fan().cones() {
            let ch = local_chart(sf, sigma).unwrap();
            let irreducibles = ch.resolution.realized_generators().len();
            let rays = ch.monoid.cone().rays().len();
            let mut primes: Vec<_> = irreducible_ray_correspondence(&ch.resolution)
                .into_iter()
                .map(|c| c.prime.normal)
                .collect();
            primes.sort();
            primes.dedup();
            charts += 1;
            if !(irreducibles == rays && rays == primes.len() && primes.len() == sigma.len()) {
                bad += 1;
            }
        }
    }
    check(bad == 0, format!("{charts} charts, {bad} mismatches"))
}

fn determinism() -> Outcome {
    let mut differing = Vec::new();
    let paths = fixture_paths();
    for path in &paths {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_toristack"))
                .arg("report")
                .arg(path)
                .output()
                .expect("binary runs")
        };
        let (a, b) = (run(), run());
        if a.stdout != b.stdout || a.status.code() != b.status.code() {
            differing.push(path.display().to_string());
        }
    }
    check(
        differing.is_empty(),
        format!("{} fixtures, differing: {differing:?}", paths.len()),
    )
}

fn main() {
    let cones = test_cones();
    let criteria: Vec<Criterion> = vec![
        (
            "multiplicity coincidence",
            Box::new(|| multiplicity_coincidence(&cones)),
        ),
        (
            "stabilizer formula",
            Box::new(|| stabilizer_formula(&cones)),
        ),
        ("invariant ring", Box::new(invariant_ring)),
        (
            "universal property",
            Box::new(|| universal_property(&cones)),
        ),
        (
            "projection stability",
            Box::new(|| projection_stability(&cones)),
        ),
        (
            "hilbert basis oracle",
            Box::new(|| hilbert_basis_oracle_equivalence(&cones)),
        ),
        ("completeness fixtures", Box::new(completeness_fixtures)),
        (
            "smooth canonical collapse",
            Box::new(smooth_canonical_collapse),
        ),
        ("dm/tame tripwire", Box::new(dm_tame_tripwire)),
        (
            "correspondence cardinalities",
            Box::new(correspondence_cardinalities),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}: {name} ({})",
            i + 1,
            outcome.detail
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
