//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.
//!
//! Expected values are either frozen integers recomputed here by direct
//! search (`naive_order`, `naive_wreath_order`) or produced by brute-force
//! oracles independent of the code under test.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cantorchain_core::bs::{
    appendix_normality, bs_chain, galois_group, k_table, level_data, normality_fixtures,
    power_subgroup, quotient_context, stability_certificate, BsParams, Metacyclic,
};
use cantorchain_core::chain::{
    build_chain_from_path, core_table, discriminant_tower, stability_verdict, VerdictKind,
};
use cantorchain_core::odometer::odometer;
use cantorchain_core::perm::{
    normal_core, oracle, GeneratedGroup, GroupElement, Permutation, Portrait, DEFAULT_CAP,
};
use cantorchain_core::tree::{path_metric, PathPrefix, TreeSignature, VertexAddress};
use cantorchain_core::wreath::{
    abelianization_check, all_wildness_witnesses, level_kernel, structural_tower, wild_certificate,
    WreathChainSpec,
};
use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed > limit {
        return Err(format!("took {elapsed:?}, limit {limit:?}"));
    }
    Ok(())
}

fn naive_order(q: u128, m: u128) -> u128 {
    if m == 1 {
        return 1;
    }
    let (mut x, mut v) = (1, q % m);
    while v != 1 {
        v = v * q % m;
        x += 1;
    }
    x
}

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

// s_n, M_n and k_{m,n} by direct search, for moduli that fit u128.
fn naive_tables(q: u128, d: u128, horizon: u32) -> (Vec<u128>, Vec<u128>, Vec<Vec<u128>>) {
    let s: Vec<u128> = (0..=horizon).map(|n| naive_order(q, d.pow(n))).collect();
    let modulus: Vec<u128> = s.iter().map(|&sn| q.pow(sn as u32) - 1).collect();
    let k = (0..=horizon as usize)
        .map(|m| {
            (m..=horizon as usize)
                .map(|n| naive_order(q, modulus[n] / modulus[m]))
                .collect()
        })
        .collect();
    (s, modulus, k)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let params = ok(BsParams::new(5, 3, 2))?;
    let levels = ok(level_data(&params))?;
    let k = ok(k_table(&params, &levels))?;
    let h1 = ok(ok(galois_group(&params, 1))?.order())?;
    let h2 = ok(ok(galois_group(&params, 2))?.order())?;
    let elapsed = start.elapsed();

    let frozen_s = [2u128, 6];
    let frozen_c = [8u128, 1736];
    let (s, modulus, naive_k) = naive_tables(5, 3, 2);
    ensure!(s[1..] == frozen_s, "direct search gives s = {:?}", &s[1..]);
    ensure!(
        [modulus[1] / 3, modulus[2] / 9] == frozen_c,
        "direct search gives M = {modulus:?}"
    );
    ensure!(levels.s[1..] == [big(2), big(6)], "s = {:?}", levels.s);
    ensure!(levels.c[1..] == [big(8), big(1736)], "c = {:?}", levels.c);
    ensure!(h1 == 48 && h2 == 93744, "|H_1| = {h1}, |H_2| = {h2}");
    ensure!(
        *k.get(0, 2) == big(6) && *k.get(1, 2) == big(6),
        "k_02 = {}, k_12 = {}",
        k.get(0, 2),
        k.get(1, 2)
    );
    ensure!(
        naive_k[0][2] == 6 && naive_k[1][1] == 6,
        "direct search k = {naive_k:?}"
    );
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "s=(2,6) c=(8,1736) |H_1|=48 |H_2|=93744 k_02=k_12=6 in {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let params = ok(BsParams::new(5, 3, 2))?;
    let chain = ok(bs_chain(&params, DEFAULT_CAP))?;
    let table = ok(core_table(&chain))?;
    let ctx = chain.ambient().identity().context().clone();
    let (_, modulus, k) = naive_tables(5, 3, 2);
    let mut checked = 0;
    for m in 0..=2usize {
        for n in m..=2usize {
            // ⟨τ^{M_n}, σ^{k_{m,n}}⟩ with G_0 the whole quotient.
            let a = if n == 0 { 1 } else { modulus[n] };
            let expected = GeneratedGroup::new(
                Metacyclic::identity(&ctx),
                vec![
                    Metacyclic::new(&ctx, a as i128, 0),
                    Metacyclic::new(&ctx, 0, k[m][n - m] as i128),
                ],
            );
            let want: HashSet<Metacyclic> = ok(expected.elements())?.iter().cloned().collect();
            let got: HashSet<Metacyclic> =
                ok(table.core(m, n).elements())?.iter().cloned().collect();
            ensure!(
                got == want,
                "C_{n}^{m}: {} elements, closed form {}",
                got.len(),
                want.len()
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "{checked} cores in H_2 match <tau^M_n, sigma^k_mn> in {elapsed:.2?}"
    ))
}

fn criterion_3() -> Outcome {
    let mut total = 0;
    let mut normal = 0;
    let mut detail = Vec::new();
    for (q, d, n) in [(5u64, 3u64, 1usize), (5, 3, 2), (3, 5, 1)] {
        let params = ok(BsParams::new(q, d, n))?;
        let levels = ok(level_data(&params))?;
        let ctx = ok(quotient_context(&params, &levels, n))?;
        let order = ctx.modulus() * ctx.exponent();
        let fixtures = normality_fixtures(&ctx, 2000);
        ensure!(!fixtures.is_empty(), "no fixtures in H_{n} for ({q},{d})");
        for f in &fixtures {
            let (r, alpha) = f.ambient;
            let h = power_subgroup(&ctx, &BigUint::from(r), &BigUint::from(alpha), DEFAULT_CAP);
            let s = f.sub.image_in(&ctx, DEFAULT_CAP);
            let size = ok(s.order())? as u64;
            ensure!(
                size * f.sub.index() == order,
                "{f:?}: image has order {size}"
            );
            ensure!(f.sub.index() <= 2000, "{f:?} exceeds the index bound");
            let brute = ok(oracle::is_normal_by_generators(&h, &s))?;
            let formula = ok(appendix_normality(f.ambient, &f.sub, q))?;
            ensure!(
                brute == formula,
                "({q},{d}) H_{n} {f:?}: criterion {formula}, conjugation {brute}"
            );
            normal += brute as usize;
        }
        total += fixtures.len();
        detail.push(format!("({q},{d}) H_{n}: {}", fixtures.len()));
    }
    Ok(format!(
        "{total} fixtures [{}], {normal} normal, 0 mismatches",
        detail.join("; ")
    ))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (q, d) in [(5u64, 3u64), (3, 5)] {
        let params = ok(BsParams::new(q, d, 3))?;
        let levels = ok(level_data(&params))?;
        let k = ok(k_table(&params, &levels))?;
        let cert = ok(stability_certificate(&params))?;
        let tower = ok(cantorchain_core::bs::closed_form_tower(&levels, &k))?;
        let verdict = stability_verdict(&tower, &[cert]);
        ensure!(
            verdict.kind == VerdictKind::StableCertified,
            "({q},{d}): {verdict}"
        );
        for m in 0..=3 {
            for n in m + 1..=3 {
                ensure!(
                    k.get(m, n) >= k.get(m, n - 1),
                    "({q},{d}): k column {m} decreases at {n}"
                );
            }
        }
        for m in 0..3 {
            let ratio = k.get(m, 3) / k.get(m + 1, 3);
            ensure!(
                tower.psi_kernel_orders[m] == ratio,
                "({q},{d}): psi kernel {m} is {}, k ratio {ratio}",
                tower.psi_kernel_orders[m]
            );
        }
        // Cross-check against enumeration at the largest horizon within cap.
        let top = (1..=3)
            .rev()
            .find(|&n| levels.quotient_order(n) <= BigUint::from(DEFAULT_CAP))
            .unwrap_or(0);
        let small = params.with_horizon(top);
        let chain = ok(bs_chain(&small, DEFAULT_CAP))?;
        let enumerated = ok(discriminant_tower(&chain, &ok(core_table(&chain))?))?;
        let small_levels = ok(level_data(&small))?;
        let closed = ok(cantorchain_core::bs::closed_form_tower(
            &small_levels,
            &ok(k_table(&small, &small_levels))?,
        ))?;
        ensure!(
            enumerated == closed,
            "({q},{d}) N={top}: enumerated tower differs"
        );
        let shown: Vec<String> = tower
            .psi_kernel_orders
            .iter()
            .map(|x| x.to_string())
            .collect();
        notes.push(format!("({q},{d}) psi=[{}] enum N={top}", shown.join(",")));
    }
    Ok(format!("StableCertified at N=3; {}", notes.join("; ")))
}

// ∏ (2!)^{2^{k-1}} by repeated doubling, independent of the library formula.
fn naive_wreath_order(n: u32) -> BigUint {
    BigUint::from(2u32).pow((1u32 << n) - 1)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for n in 2..=4usize {
        let sig = Arc::new(ok(TreeSignature::constant(2, n))?);
        let spec = ok(WreathChainSpec::leftmost(Arc::clone(&sig)))?;
        let expected = naive_wreath_order(n as u32);
        ensure!(spec.ambient_order() == expected, "closed form at N={n}");
        if n <= 3 {
            let enumerated = BigUint::from(ok(spec.ambient().order())?);
            ensure!(
                enumerated == expected,
                "enumerated |Aut(T_{n})| = {enumerated}"
            );
        }
        for j in 0..=n {
            let w = ok(level_kernel(&spec, j))?;
            let want = &expected / naive_wreath_order(j as u32);
            ensure!(
                w.order == want,
                "|W_{j}| at N={n} is {}, expected {want}",
                w.order
            );
            if w.order <= BigUint::from(40_000u32) {
                let got = ok(w.to_group(&sig, DEFAULT_CAP).order())?;
                ensure!(
                    BigUint::from(got) == want,
                    "enumerated |W_{j}| at N={n} is {got}"
                );
            }
        }
        let witnesses = ok(all_wildness_witnesses(&spec))?;
        let expected_pairs: usize = (1..n).map(|m| m << m).sum();
        ensure!(
            witnesses.len() == expected_pairs,
            "{} witnesses at N={n}",
            witnesses.len()
        );
        for w in &witnesses {
            ensure!(ok(w.verify())?, "witness {} in {} fails", w.inner, w.outer);
            // Independent leaf scan: fixed outside the inner cylinder, moves inside.
            let mut moved = false;
            for leaf in sig.leaves() {
                let x = leaf.leaf().clone();
                let image = ok(w.element.apply(&x))?;
                if w.inner.is_prefix_of(&x) {
                    moved |= image != x;
                } else {
                    ensure!(image == x, "witness moves {x} outside {}", w.inner);
                }
            }
            ensure!(moved, "witness for {} is trivial", w.inner);
        }
        pairs += witnesses.len();
        let (cert, _) = ok(wild_certificate(&spec))?;
        let verdict = stability_verdict(&ok(structural_tower(&sig))?, &[cert]);
        ensure!(
            verdict.kind == VerdictKind::WildCertified,
            "N={n}: {verdict}"
        );
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "orders 8/128/32768, W_n ladder exact, {pairs} witnesses, WildCertified in {elapsed:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    let binary = ok(TreeSignature::constant(2, 3))?;
    for n in 1..=3 {
        let ab = ok(abelianization_check(&binary, n, DEFAULT_CAP))?;
        ensure!(ab == 1 << n, "d=2 n={n}: abelianization {ab}");
    }
    let ternary = ok(TreeSignature::constant(3, 1))?;
    let ab = ok(abelianization_check(&ternary, 1, DEFAULT_CAP))?;
    ensure!(ab == 2, "d=3 n=1: abelianization {ab}");
    Ok("2, 4, 8 for d=2 and 2 for d=3".into())
}

fn criterion_7() -> Outcome {
    let sig = Arc::new(ok(TreeSignature::constant(2, 4))?);
    let a = odometer(&sig);
    let group = GeneratedGroup::new(a.identity_like(), vec![a]);
    let chain = ok(build_chain_from_path(&group, &PathPrefix::leftmost(sig)))?;
    let tower = ok(discriminant_tower(&chain, &ok(core_table(&chain))?))?;
    ensure!(
        tower.discriminant_orders.iter().all(|x| x.is_one()),
        "|D_m,4| = {:?}",
        tower.discriminant_orders
    );
    Ok("|D_{m,4}| = 1 for m = 0..4".into())
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

fn random_portrait(rng: &mut ChaCha8Rng, sig: &Arc<TreeSignature>) -> Portrait {
    let mut entries = Vec::new();
    for k in 0..sig.horizon() {
        for v in sig.level(k).unwrap() {
            entries.push((v, random_perm(rng, sig.degree(k + 1))));
        }
    }
    Portrait::from_vertex_perms(Arc::clone(sig), entries).unwrap()
}

fn criterion_8() -> Outcome {
    let mut triples = 0;
    for n in 1..=4 {
        let sig = Arc::new(ok(TreeSignature::constant(2, n))?);
        let leaves = sig.leaves();
        for x in &leaves {
            for y in &leaves {
                for z in &leaves {
                    let (xy, yz, xz) = (
                        ok(path_metric(x, y))?,
                        ok(path_metric(y, z))?,
                        ok(path_metric(x, z))?,
                    );
                    ensure!(
                        xz <= xy.max(yz),
                        "ultrametric fails at {} {} {}",
                        x.leaf(),
                        y.leaf(),
                        z.leaf()
                    );
                    triples += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=5);
        let sig = Arc::new(ok(TreeSignature::constant(rng.gen_range(2..=3), n))?);
        let g = random_portrait(&mut rng, &sig);
        let word = |rng: &mut ChaCha8Rng| {
            let w = (0..n)
                .map(|k| rng.gen_range(0..sig.degree(k + 1)))
                .collect();
            PathPrefix::new(Arc::clone(&sig), VertexAddress::new(w)).unwrap()
        };
        let (x, y) = (word(&mut rng), word(&mut rng));
        let gx = ok(PathPrefix::new(Arc::clone(&sig), ok(g.apply(x.leaf()))?))?;
        let gy = ok(PathPrefix::new(Arc::clone(&sig), ok(g.apply(y.leaf()))?))?;
        ensure!(
            ok(path_metric(&gx, &gy))? == ok(path_metric(&x, &y))?,
            "isometry fails for {} {}",
            x.leaf(),
            y.leaf()
        );
        samples += 1;
    }
    Ok(format!(
        "{triples} ultrametric triples, {samples} isometry samples, 0 violations"
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let binary = Arc::new(ok(TreeSignature::constant(2, 3))?);
    let mut pairs = 0;
    let mut nontrivial = 0;
    while pairs < 50 {
        let g = if pairs % 2 == 0 {
            let n = rng.gen_range(3..=7);
            let gens = (0..2).map(|_| random_perm(&mut rng, n)).collect();
            PairGroup::Perm(GeneratedGroup::new(Permutation::identity(n), gens))
        } else {
            let gens = (0..rng.gen_range(1..=3))
                .map(|_| random_portrait(&mut rng, &binary))
                .collect();
            PairGroup::Tree(GeneratedGroup::new(
                Portrait::identity(Arc::clone(&binary)),
                gens,
            ))
        };
        let (size, core_size) = match &g {
            PairGroup::Perm(g) => check_core(g, &mut rng)?,
            PairGroup::Tree(g) => check_core(g, &mut rng)?,
        };
        ensure!(size <= 10_000, "|G| = {size} exceeds the bound");
        nontrivial += (core_size > 1) as usize;
        pairs += 1;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "50 pairs ({nontrivial} with nontrivial core), 0 mismatches in {elapsed:.2?}"
    ))
}

enum PairGroup {
    Perm(GeneratedGroup<Permutation>),
    Tree(GeneratedGroup<Portrait>),
}

fn check_core<E: GroupElement>(
    g: &GeneratedGroup<E>,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, usize), String> {
    let elems = ok(g.enumerate())?;
    let picks = (0..rng.gen_range(1..=2))
        .map(|_| elems[rng.gen_range(0..elems.len())].clone())
        .collect();
    let h = g.subgroup(picks);
    let core = ok(normal_core(g, &h))?;
    let got: HashSet<E> = ok(core.elements())?.iter().cloned().collect();
    let want = ok(oracle::brute_force_core(g, &h))?;
    ensure!(
        got == want,
        "core has {} elements, intersection of conjugates {}",
        got.len(),
        want.len()
    );
    Ok((elems.len(), got.len()))
}

fn criterion_10() -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let bin = env!("CARGO_BIN_EXE_cantorchain");
    let configs = [
        r#"{"family": {"wreath": {"d": 2}}, "horizon": 3, "seed": 11}"#,
        r#"{"family": {"bs": {"q": 5, "d": 3}}, "horizon": 2, "seed": 11}"#,
        r#"{"family": {"odometer": {"d": 2}}, "horizon": 4, "seed": 11}"#,
    ];
    for (i, text) in configs.iter().enumerate() {
        let config = dir.path().join(format!("c{i}.json"));
        ok(std::fs::write(&config, text))?;
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("run{i}_{run}"));
            let status = ok(Command::new(bin)
                .args(["analyze", "--config"])
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .output())?;
            ensure!(
                status.status.success(),
                "analyze failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            outputs.push(ok(std::fs::read(out.join("report.json")))?);
        }
        ensure!(outputs[0] == outputs[1], "reports differ for {text}");
        ensure!(!outputs[0].is_empty(), "empty report");
    }
    Ok(format!("{} configs, byte-identical reports", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("BS closed forms (q,d)=(5,3), N=2", criterion_1),
        ("core formula vs enumerated cores in H_2", criterion_2),
        (
            "divisibility criterion vs conjugation, index <= 2000",
            criterion_3,
        ),
        ("stability certificate at N=3", criterion_4),
        ("wreath family d=2, N=2..4", criterion_5),
        ("abelianization of Aut(T_n)", criterion_6),
        ("odometer trivial discriminant, d=2, N=4", criterion_7),
        ("ultrametric and isometry", criterion_8),
        ("normal core vs intersection of conjugates", criterion_9),
        ("deterministic analyze reports", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
