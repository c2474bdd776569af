//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tailsheaf::classify::{classify_tail, rank_bound_check, singular_locus};
use tailsheaf::cohomology::{cohomology_table, default_window, euler_check, Engine};
use tailsheaf::construct::{
    curvilinear, fixture, from_local_algebra, jordan_algebra, normalize_point, points_block, poonen_algebra,
    random_presentation, s1, scramble, scramble_columns, FatPointSpec, PointBlock, FIXTURE_NAMES,
};
use tailsheaf::presentation::HyperplaneChoice;
use tailsheaf::structure::{decompose, recognize_tangent_power, split_level};
use tailsheaf::SheafPresentation;
use tailsheaf_cli::{run, Command, Format, RunConfig};
use tailsheaf_core::{Field, PolyRing, Scalar, ZeroLocus};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn q(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_int(Field::Rationals, x)).collect()
}

fn ring3() -> PolyRing {
    PolyRing::projective(3, Field::Rationals)
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let mut config = RunConfig::fixture(Command::Classify, "counterexample_3x9");
    config.format = Format::Json;
    let report = run(&config);
    within(start, Duration::from_secs(5))?;
    ensure(report.status == 0, || format!("exit status {}", report.status))?;
    let v: Value = serde_json::from_str(&report.stdout).map_err(err)?;
    let r = &v["result"];
    ensure(r["is_tail"] == false, || "reported as a tail".into())?;
    let w: Vec<(i64, u64)> = r["witness"]
        .as_array()
        .ok_or("no witness")?
        .iter()
        .map(|x| (x["t"].as_i64().unwrap_or(0), x["h"].as_u64().unwrap_or(0)))
        .collect();
    ensure(w == [(-5, 3), (-6, 2)], || format!("witness {w:?}"))?;
    // the table agrees with the witness
    let p = fixture("counterexample_3x9").map_err(err)?;
    let t = cohomology_table(&p, -6, -5, Engine::Both).map_err(err)?;
    ensure(t.h(2, -5) == Some(3) && t.h(2, -6) == Some(2), || "table disagrees with witness".into())?;
    Ok("non-tail, h2(F(-5)) = 3, h2(F(-6)) = 2".into())
}

fn example_c() -> Outcome {
    let start = Instant::now();
    let p = fixture("example_c").map_err(err)?;
    let c = classify_tail(&p).map_err(err)?;
    ensure(c.is_tail && c.m == 2, || format!("tail {} with m = {}", c.is_tail, c.m))?;
    let t = cohomology_table(&p, -12, 2, Engine::Both).map_err(err)?;
    let f1 = p.sub_presentation(&[0, 1], &[0, 1, 2, 3, 4, 5]).map_err(err)?;
    let t1 = cohomology_table(&f1, -12, 2, Engine::Both).map_err(err)?;
    within(start, Duration::from_secs(30))?;
    let bad: Vec<i64> = (-12..=-3).filter(|&k| t.h(2, k) != Some(2)).collect();
    ensure(bad.is_empty(), || format!("h2(F(t)) != 2 at t = {bad:?}"))?;
    let f1_support: Vec<i64> = (-12..=2).filter(|&k| t1.h(2, k) != Some(0)).collect();
    let f1_values: Vec<u64> = f1_support.iter().filter_map(|&k| t1.h(2, k)).collect();
    ensure(f1_support == [-4, -3] && f1_values == [2, 2], || {
        format!("h2(F1(t)) nonzero at t = {f1_support:?} with values {f1_values:?}")
    })?;
    Ok("2-tail, h2 = 2 for t <= -3, F1 supported at -4, -3".into())
}

fn example_d() -> Outcome {
    let p = fixture("example_d").map_err(err)?;
    let c = classify_tail(&p).map_err(err)?;
    ensure(c.is_tail && c.m == 3, || format!("tail {} with m = {}", c.is_tail, c.m))?;
    let m2 = p.sub_presentation(&[3, 4], &(9..17).collect::<Vec<_>>()).map_err(err)?;
    let v = recognize_tangent_power(&m2).map_err(err)?;
    ensure(v.m == Some(2), || format!("M2 verdict {:?}", v.reason))?;
    let m3 = p.sub_presentation(&[5, 6, 7], &(17..26).collect::<Vec<_>>()).map_err(err)?;
    let d = decompose(&m3).map_err(err)?;
    ensure(d.blocks.len() == 3, || format!("M3 gave {} blocks", d.blocks.len()))?;
    for b in &d.blocks {
        let bc = classify_tail(&b.presentation).map_err(err)?;
        ensure(b.m == 1 && bc.is_tail && bc.m == 1 && bc.minimal, || "M3 block is not S_1-type".into())?;
    }
    Ok("3-tail, M2 = two tangent twists, M3 = three S_1 blocks".into())
}

fn remark_iv() -> Outcome {
    let p = fixture("remark_iv").map_err(err)?;
    let c = classify_tail(&p).map_err(err)?;
    ensure(c.is_tail && c.m == 2 && c.normalized && c.minimal, || format!("{c:?}"))?;
    let d = decompose(&p).map_err(err)?;
    ensure(d.blocks.len() == 1 && d.blocks[0].m == 2, || format!("{} blocks", d.blocks.len()))?;
    Ok("normalized minimal 2-tail, one block".into())
}

fn tail_fixtures() -> Result<Vec<(String, SheafPresentation)>, String> {
    let mut names: Vec<String> = FIXTURE_NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(["curvilinear_3_2", "curvilinear_3_3", "curvilinear_3_4", "s1_2", "s1_4"].map(String::from));
    names.into_iter().map(|n| fixture(&n).map(|p| (n, p)).map_err(err)).collect()
}

fn rank_bound() -> Outcome {
    let mut checked = 0;
    for (name, p) in tail_fixtures()? {
        let c = classify_tail(&p).map_err(err)?;
        if !c.is_tail {
            continue;
        }
        let b = rank_bound_check(&p).map_err(err)?;
        ensure(b.holds, || format!("{name}: rank {} < {}", b.rank, b.bound))?;
        ensure(b.tight == c.minimal, || format!("{name}: tight {} but minimal {}", b.tight, c.minimal))?;
        checked += 1;
    }
    Ok(format!("{checked} tail fixtures"))
}

fn sing_lemma() -> Outcome {
    let mut checked = 0;
    for (name, p) in tail_fixtures()? {
        let c = classify_tail(&p).map_err(err)?;
        if !c.is_tail {
            continue;
        }
        let r = singular_locus(&p).map_err(err)?;
        ensure(r.is_zero_dimensional(), || format!("{name}: positive-dimensional Sing"))?;
        let len = r.sing_length.ok_or_else(|| format!("{name}: Sing length not certified"))?;
        ensure(len <= c.m, || format!("{name}: Sing length {len} > m = {}", c.m))?;
        checked += 1;
    }
    let lines = fixture("line_bundles").map_err(err)?;
    let c = classify_tail(&lines).map_err(err)?;
    let r = singular_locus(&lines).map_err(err)?;
    ensure(c.m == 0 && matches!(r.locus, ZeroLocus::Empty), || "line bundles: Sing not empty".into())?;
    Ok(format!("{checked} tail fixtures, line bundles empty"))
}

fn poonen() -> Outcome {
    let start = Instant::now();
    let built = from_local_algebra(&FatPointSpec::at_origin(poonen_algebra().map_err(err)?)).map_err(err)?;
    let c = classify_tail(&built).map_err(err)?;
    ensure(c.is_tail && c.m == 6 && c.normalized && c.minimal, || format!("{c:?}"))?;
    let r = singular_locus(&built).map_err(err)?;
    let pts: Vec<(Vec<Scalar>, usize)> = r.points.iter().map(|p| (p.coords.clone(), p.rank_drop)).collect();
    ensure(pts == [(q(&[0, 0, 0, 1]), 1)], || format!("singular points {pts:?}"))?;
    let shipped = fixture("poonen_6x18").map_err(err)?;
    let (lo, hi) = default_window(&shipped);
    let a = cohomology_table(&built, lo, hi, Engine::Dense).map_err(err)?;
    let b = cohomology_table(&shipped, lo, hi, Engine::Dense).map_err(err)?;
    ensure(a.rows == b.rows, || "cohomology tables differ".into())?;
    let same = built.fitting_ideal().same_ideal(&shipped.fitting_ideal()).map_err(err)?;
    ensure(same, || "Fitting ideals differ".into())?;
    within(start, Duration::from_secs(60))?;
    Ok("normalized minimal 6-tail at (0:0:0:1), matches the 6x18 matrix".into())
}

fn restriction() -> Outcome {
    let ring = ring3();
    let pb = |pts: &[Vec<Scalar>]| {
        let blocks: Vec<PointBlock> = pts.iter().map(|p| PointBlock::at(ring, p).unwrap()).collect();
        points_block(ring, &blocks)
    };
    let cases: Vec<(String, SheafPresentation, usize)> = vec![
        ("s1(3)".into(), s1(3).map_err(err)?, 1),
        ("curvilinear(3,2)".into(), curvilinear(3, 2).map_err(err)?, 2),
        ("curvilinear(3,3)".into(), curvilinear(3, 3).map_err(err)?, 3),
        ("curvilinear(3,4)".into(), curvilinear(3, 4).map_err(err)?, 4),
        ("points_block(2)".into(), pb(&[q(&[0, 0, 0, 1]), q(&[1, 0, 0, 0])]).map_err(err)?, 2),
        ("points_block(3)".into(), pb(&[q(&[0, 0, 0, 1]), q(&[1, 0, 0, 0]), q(&[1, 2, 3, 4])]).map_err(err)?, 3),
    ];
    for (name, p, m) in &cases {
        for seed in [11, 22, 33] {
            let r = p.restrict_hyperplane(&HyperplaneChoice::Seeded(seed)).map_err(err)?;
            let v = recognize_tangent_power(&r.presentation).map_err(err)?;
            ensure(v.m == Some(*m), || format!("{name}, seed {seed}: {:?} instead of {m}", v.m))?;
        }
    }
    Ok(format!("{} minimal fixtures x 3 hyperplanes", cases.len()))
}

/// Block-diagonal minimal tail on random distinct points, with the expected `(m, point)` multiset.
fn random_blocks(seed: u64) -> Result<(SheafPresentation, Vec<(usize, Vec<Scalar>)>), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(2..=4);
    let mut pool: Vec<Vec<i64>> = Vec::new();
    while pool.len() < count {
        let mut v: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let norm = normalize_point(&q(&v));
        if pool.iter().any(|p| normalize_point(&q(p)) == norm) {
            continue;
        }
        v.shrink_to_fit();
        pool.push(v);
    }
    pool.shuffle(&mut rng);
    let mut sum = SheafPresentation::zero(ring3());
    let mut expected = Vec::new();
    for v in pool {
        let m = rng.gen_range(1..=2);
        let point = normalize_point(&q(&v));
        let block =
            from_local_algebra(&FatPointSpec { point: point.clone(), algebra: jordan_algebra(3, m).map_err(err)? })
                .map_err(err)?;
        sum = sum.direct_sum(&block).map_err(err)?;
        expected.push((m, point));
    }
    expected.sort();
    Ok((sum, expected))
}

fn scramble_recover() -> Outcome {
    for trial in 0..25u64 {
        let (p, expected) = random_blocks(1000 + trial)?;
        let (scrambled, change) = scramble(&p, 2000 + trial).map_err(err)?;
        let mut expected: Vec<(usize, Vec<Scalar>)> = expected
            .into_iter()
            .map(|(m, pt)| change.map_point(&pt).map(|x| (m, normalize_point(&x))).map_err(err))
            .collect::<Result<_, _>>()?;
        expected.sort();
        let d = decompose(&scrambled).map_err(|e| format!("trial {trial}: {e}"))?;
        let mut got: Vec<(usize, Vec<Scalar>)> = d.blocks.iter().map(|b| (b.m, b.point.clone())).collect();
        got.sort();
        ensure(got == expected, || format!("trial {trial}: {got:?} vs {expected:?}"))?;
        let applied = d.record.apply(&scrambled.twist(d.shift)).map_err(err)?;
        ensure(applied == d.presentation, || format!("trial {trial}: record does not reproduce the blocks"))?;
    }
    Ok("25 trials".into())
}

fn level_splitting() -> Outcome {
    for trial in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + trial);
        let m = rng.gen_range(1..=3);
        let r = rng.gen_range(0..=2);
        let higher: Vec<i64> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(2..=4)).collect();
        let mut lines: Vec<i64> = vec![1; r];
        lines.extend(&higher);
        lines.sort();
        let ring = ring3();
        let mut p = curvilinear(3, m).map_err(err)?;
        if !lines.is_empty() {
            p = p
                .direct_sum(&SheafPresentation::new(ring, vec![], lines.clone(), vec![]).map_err(err)?)
                .map_err(err)?;
        }
        let (scrambled, _) = scramble_columns(&p, 4000 + trial).map_err(err)?;
        let split = split_level(&scrambled).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(split.m == m as u64 && split.line_bundles == lines, || {
            format!("trial {trial}: m {} lines {:?}, expected {m} {lines:?}", split.m, split.line_bundles)
        })?;
        ensure(split.verified(), || format!("trial {trial}: verification failed"))?;
    }
    Ok("10 trials".into())
}

fn oracle_equivalence() -> Outcome {
    let mut cases: Vec<(String, SheafPresentation)> = tail_fixtures()?;
    for seed in 0..50u64 {
        let n = if seed % 2 == 0 { 2 } else { 3 };
        cases.push((format!("random seed {seed}"), random_presentation(seed, n)));
    }
    let mut points = 0;
    for (name, p) in &cases {
        let (lo, hi) = default_window(p);
        cohomology_table(p, lo, hi, Engine::Both).map_err(|e| format!("{name}: {e}"))?;
        for t in lo..=hi {
            let e = euler_check(p, t).map_err(err)?;
            ensure(e.pass, || format!("{name}: Euler identity fails at t = {t}"))?;
            points += 1;
        }
    }
    Ok(format!("{} presentations, {points} twists", cases.len()))
}

fn chern_16() -> Outcome {
    let start = Instant::now();
    let p = fixture("chern_16").map_err(err)?;
    let r = singular_locus(&p).map_err(err)?;
    within(start, Duration::from_secs(120))?;
    ensure(r.fitting_length() == Some(16), || format!("Fitting length {:?}", r.fitting_length()))?;
    ensure(r.sing_length == Some(16), || format!("Sing length {:?}", r.sing_length))?;
    ensure(r.points.len() == 16, || format!("{} rational points", r.points.len()))?;
    Ok("Sing of length 16 in 16 points".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("counterexample values", counterexample),
        ("example (c) cohomology", example_c),
        ("example (d) structure", example_d),
        ("remark (iv) does not split", remark_iv),
        ("rank bound", rank_bound),
        ("singular-locus length", sing_lemma),
        ("fat-point correspondence", poonen),
        ("restriction to tangent powers", restriction),
        ("scramble-and-recover decomposition", scramble_recover),
        ("level splitting", level_splitting),
        ("oracle equivalence", oracle_equivalence),
        ("length-16 singular locus", chern_16),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({took:.2}s)", k + 1),
            Err(reason) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {reason} ({took:.2}s)", k + 1);
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
