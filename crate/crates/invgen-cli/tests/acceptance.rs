use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use invgen::core::{brute_force_satisfying_set, for_each_point, satisfying_count, tv_exact, tv_uniform_sets, MassTable};
use invgen::densify::{densify_dnf, densify_ltf, exact_ltf_counter, exact_ltf_sampler, DensifierParams};
use invgen::genct::{dnf_count, dnf_sample, draw_retrying, ltf_count_exact, make_forward_tools, BottomSampler, FnSampler};
use invgen::graphauto::{build_aut_inverse_sampler, complete_graph, cycle_graph, petersen_automorphisms, Permutation};
use invgen::hypsel::{table_candidate, tournament, TableSampler};
use invgen::pipeline::{
    inverse_generate, make_instantiation, planted_dnf, random_kdnf, random_ltf, Budget, ClassTag, InversionRun,
};
use invgen::sq::{default_ell, simulate_stat, BiasEstimate, StatQuery};
use invgen::{Assignment, BoolFunc, Conjunction, Dnf, SeedTree};
use rand::{Rng, RngCore};
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Outcome {
    pass: bool,
    detail: String,
}

fn rate(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn exact_set(f: &BoolFunc) -> BTreeSet<Assignment> {
    brute_force_satisfying_set(f, f.dim()).unwrap().into_iter().collect()
}

fn exact_source(f: &BoolFunc) -> Arc<dyn BottomSampler> {
    let points: Vec<Assignment> = brute_force_satisfying_set(f, f.dim()).unwrap();
    Arc::new(TableSampler::new(&MassTable::uniform(points).unwrap()).unwrap())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(101).rng();
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(4..=18);
        let f = random_ltf(n, 50, &mut rng).unwrap();
        let dp = ltf_count_exact(&f).unwrap().value * (1u64 << n) as f64;
        let brute = satisfying_count(&BoolFunc::Ltf(f)).unwrap();
        mismatches += (dp.round() as u64 != brute || (dp - dp.round()).abs() > 1e-6) as usize;
    }
    let t = start.elapsed();
    Outcome {
        pass: mismatches == 0 && within(t, 10),
        detail: format!("mismatches={mismatches}/200 time={:.2}s", t.as_secs_f64()),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(102).rng();
    let mut good = 0;
    for _ in 0..200 {
        let f = planted_dnf(12, 4, 2..=5, &mut rng).unwrap();
        let exact = satisfying_count(&BoolFunc::Dnf(f.clone())).unwrap() as f64 / 4096.0;
        let est = dnf_count(&f, 0.05, 0.05, &mut rng).unwrap().value;
        good += ((est - exact).abs() <= 0.05 * exact) as usize;
    }
    let t = start.elapsed();
    Outcome {
        pass: rate(good, 200) >= 0.93 && within(t, 60),
        detail: format!("within 5%: {good}/200 time={:.2}s", t.as_secs_f64()),
    }
}

fn small_dnf(rng: &mut impl Rng) -> Dnf {
    loop {
        let terms = rng.gen_range(1..=3);
        let f = planted_dnf(10, terms, 5..=9, rng).unwrap();
        let c = satisfying_count(&BoolFunc::Dnf(f.clone())).unwrap();
        if (2..=100).contains(&c) {
            return f;
        }
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(103).rng();
    let draws = 1_000_000u64;
    let mut min_p = 1.0f64;
    let mut rejected = 0;
    for _ in 0..20 {
        let f = small_dnf(&mut rng);
        let support = exact_set(&BoolFunc::Dnf(f.clone()));
        let sampler = dnf_sample(&f, 1e-9).unwrap();
        let mut counts: BTreeMap<Assignment, u64> = support.iter().map(|x| (*x, 0)).collect();
        let mut outside = 0u64;
        for _ in 0..draws {
            let x = draw_retrying(&sampler, 1000, &mut rng).unwrap();
            match counts.get_mut(&x) {
                Some(c) => *c += 1,
                None => outside += 1,
            }
        }
        let k = support.len() as f64;
        let expected = draws as f64 / k;
        let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = ChiSquared::new(k - 1.0).unwrap().sf(stat);
        min_p = min_p.min(p);
        rejected += (outside > 0 || p < 1e-3) as usize;
    }
    Outcome {
        pass: rejected == 0,
        detail: format!("rejected={rejected}/20 min_p={min_p:.4} time={:.1}s", start.elapsed().as_secs_f64()),
    }
}

fn uniform_cube(n: usize) -> FnSampler<impl Fn(&mut dyn RngCore) -> Option<Assignment> + Send + Sync> {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    FnSampler(move |r: &mut dyn RngCore| Assignment::new(n, r.next_u64() & mask).ok())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (tau, tau_p, delta) = (0.05, 0.025, 0.02);
    let mut rng = SeedTree::new(104).rng();
    let trials = 500;
    let mut good = 0;
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = rng.gen_range(4..=12);
        let f = if trial % 2 == 0 {
            BoolFunc::Ltf(random_ltf(n, 10, &mut rng).unwrap())
        } else {
            BoolFunc::Dnf(planted_dnf(n, 3, 1..=4, &mut rng).unwrap())
        };
        let support: Vec<Assignment> = brute_force_satisfying_set(&f, n).unwrap();
        if support.is_empty() {
            good += 1;
            continue;
        }
        let size = 1usize << n;
        let pos_table: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let neg_table: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mut exact = 0.0;
        for_each_point(n, |x| {
            let i = x.bits() as usize;
            exact += if f.eval_unchecked(&x) { pos_table[i] } else { neg_table[i] };
        })
        .unwrap();
        exact /= size as f64;
        let p = support.len() as f64 / size as f64;
        let q = StatQuery::new(tau, move |x: &Assignment, y| {
            let i = x.bits() as usize;
            if y == 1 {
                pos_table[i]
            } else {
                neg_table[i]
            }
        })
        .unwrap();
        let bias = BiasEstimate::new(p + rng.gen_range(-tau_p..=tau_p), tau_p);
        let pos = TableSampler::new(&MassTable::uniform(support).unwrap()).unwrap();
        let v = simulate_stat(&q, &uniform_cube(n), &pos, bias, delta, &mut rng).unwrap();
        let err = (v - exact).abs();
        worst = worst.max(err);
        good += (err <= tau + tau_p) as usize;
    }
    Outcome {
        pass: rate(good, trials) >= 0.96,
        detail: format!(
            "within tau+tau': {good}/{trials} worst={worst:.4} time={:.1}s",
            start.elapsed().as_secs_f64()
        ),
    }
}

fn table(weights: &[f64]) -> MassTable<u32> {
    MassTable::from_weights(weights.iter().enumerate().map(|(i, &w)| (i as u32, w))).unwrap()
}

fn family(rng: &mut impl Rng, k: usize, n: usize) -> (MassTable<u32>, Vec<MassTable<u32>>, usize) {
    let target_w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    let target = table(&target_w);
    let good = rng.gen_range(0..n);
    let mut out = Vec::with_capacity(n);
    for idx in 0..n {
        let t = if idx == good {
            let noise = table(&(0..k).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>());
            MassTable::from_weights((0..k as u32).map(|x| (x, 0.96 * target.prob(&x) + 0.04 * noise.prob(&x)))).unwrap()
        } else {
            loop {
                let mut w = vec![1e-3; k];
                for _ in 0..rng.gen_range(1..=4) {
                    w[rng.gen_range(0..k)] += rng.gen_range(1.0..3.0);
                }
                let t = table(&w);
                if tv_exact(&target, &t).unwrap() >= 0.5 {
                    break t;
                }
            }
        };
        out.push(t);
    }
    (target, out, good)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let eps = 0.05;
    let beta = (1.0 + eps / 8.0f64).sqrt() - 1.0;
    let mut rng = SeedTree::new(105).rng();
    let (k, n) = (30, 20);
    let mut good = 0;
    let mut setup_ok = true;
    for _ in 0..100 {
        let (target, fam, close) = family(&mut rng, k, n);
        setup_ok &= tv_exact(&target, &fam[close]).unwrap() <= eps;
        let cands: Vec<_> = fam
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let factors: Vec<f64> =
                    (0..k).map(|_| if rng.gen_bool(0.5) { 1.0 + beta } else { 1.0 / (1.0 + beta) }).collect();
                table_candidate(i, t.clone(), move |x: &u32| factors[*x as usize]).unwrap()
            })
            .collect();
        let src = TableSampler::new(&target).unwrap();
        let out = tournament(&src, &cands, eps, 0.05, None, &mut rng).unwrap();
        good += (tv_exact(&target, &fam[out.winner]).unwrap() <= 6.0 * eps) as usize;
    }
    let t = start.elapsed();
    Outcome {
        pass: setup_ok && rate(good, 100) >= 0.95 && within(t, 300),
        detail: format!("winner within 0.3: {good}/100 time={:.1}s", t.as_secs_f64()),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(106).rng();
    let (eps, delta) = (0.1, 0.1);
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.gen_range(4..=14);
        let f = loop {
            let f = BoolFunc::Ltf(random_ltf(n, 10, &mut rng).unwrap());
            if satisfying_count(&f).unwrap() > 0 {
                break f;
            }
        };
        let fs = exact_set(&f);
        let p = fs.len() as f64 / (1u64 << n) as f64;
        let params = DensifierParams::ltf(n, eps, delta, p).unwrap();
        let source = exact_source(&f);
        let Ok(out) = densify_ltf(source.as_ref(), &params, &exact_ltf_counter, &exact_ltf_sampler, &mut rng) else {
            continue;
        };
        let g = BoolFunc::Ltf(out.g);
        let gs = exact_set(&g);
        let coverage = fs.iter().filter(|x| g.eval_unchecked(x)).count() as f64 / fs.len() as f64;
        let density = gs.iter().filter(|x| f.eval_unchecked(x)).count() as f64 / gs.len().max(1) as f64;
        good += (coverage >= 1.0 - eps && density >= params.gamma) as usize;
    }
    Outcome {
        pass: good >= 85,
        detail: format!("both conditions: {good}/100 time={:.1}s", start.elapsed().as_secs_f64()),
    }
}

fn disagreement(f: &BoolFunc, gs: &BTreeSet<Assignment>, terms: &[Conjunction]) -> f64 {
    let wrong = gs.iter().filter(|x| f.eval_unchecked(x) != terms.iter().any(|t| t.evaluate(x))).count();
    wrong as f64 / gs.len() as f64
}

/// Smallest disagreement with `f` over sub-collections of `terms`, restricted
/// to `g⁻¹(1)`: exhaustive for up to 16 terms, otherwise the terms implying `f`.
fn best_subcollection(f: &BoolFunc, gs: &BTreeSet<Assignment>, terms: &[Conjunction]) -> f64 {
    if terms.len() <= 16 {
        (0u32..1 << terms.len())
            .map(|mask| {
                let pick: Vec<Conjunction> =
                    terms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| *t).collect();
                disagreement(f, gs, &pick)
            })
            .fold(f64::INFINITY, f64::min)
    } else {
        let implying: Vec<Conjunction> =
            terms.iter().filter(|t| gs.iter().all(|x| !t.evaluate(x) || f.eval_unchecked(x))).copied().collect();
        disagreement(f, gs, &implying)
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(107).rng();
    let (eps, delta, s) = (0.1, 0.1, 2);
    let ell = default_ell();
    let bound = ell(eps / s as f64);
    let cap = 10 * Budget::default().densifier_iterations;
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.gen_range(6..=14);
        let f = BoolFunc::Dnf(planted_dnf(n, s, 3..=5, &mut rng).unwrap());
        let fs = exact_set(&f);
        let p = fs.len() as f64 / (1u64 << n) as f64;
        let params = DensifierParams::dnf(n, s, eps, delta, p, default_ell()).unwrap().with_max_iterations(cap);
        let source = exact_source(&f);
        let Ok(out) = densify_dnf(source.as_ref(), &params, n, s, &mut rng) else { continue };
        let g = out.to_bool_func().unwrap();
        let gs = exact_set(&g);
        if gs.is_empty() {
            continue;
        }
        let coverage = fs.iter().filter(|x| g.eval_unchecked(x)).count() as f64 / fs.len() as f64;
        let density = gs.iter().filter(|x| f.eval_unchecked(x)).count() as f64 / gs.len() as f64;
        let witness = best_subcollection(&f, &gs, &out.terms);
        good += (coverage >= 1.0 - eps && density >= 1.0 / (2.0 * params.m) && witness <= bound) as usize;
    }
    Outcome {
        pass: good >= 85,
        detail: format!("all three properties: {good}/100 time={:.1}s", start.elapsed().as_secs_f64()),
    }
}

/// TV between the sampler's output and `U_{f⁻¹(1)}`, estimated from draws.
///
/// The output is uniform on the conditional support `S`, so the distance is
/// `Pr[x ∉ f] + Pr[x ∈ f]·max(0, 1 − |S|/|F|)`, a single Bernoulli mean.
fn measured_tv(run: &InversionRun, f: &BoolFunc, draws: u64, rng: &mut impl RngCore) -> (f64, f64, f64, bool) {
    let s: BTreeSet<Assignment> = run.sampler.conditional_support().unwrap().into_iter().collect();
    let fs = exact_set(f);
    let exact = tv_uniform_sets(&s, &fs).unwrap();
    let mut accepted = 0u64;
    let mut inside = 0u64;
    let mut stray = false;
    for _ in 0..draws {
        if let Some(x) = run.sampler.generate(rng) {
            accepted += 1;
            stray |= !s.contains(&x);
            inside += f.eval_unchecked(&x) as u64;
        }
    }
    if accepted == 0 {
        return (1.0, exact, 1.0, stray);
    }
    let p_in = inside as f64 / accepted as f64;
    let shrink = (1.0 - s.len() as f64 / fs.len() as f64).max(0.0);
    let tv = (1.0 - p_in) + p_in * shrink;
    let half_width = ((2.0f64 / 0.05).ln() / (2.0 * accepted as f64)).sqrt();
    (tv, exact, half_width, stray)
}

fn inversion_batch(label: &str, cases: Vec<(BoolFunc, ClassTag)>, seed: u64) -> (usize, usize, String) {
    let mut wins = 0;
    let mut lines = Vec::new();
    let total = cases.len();
    for (i, (f, class)) in cases.into_iter().enumerate() {
        let mut rng = SeedTree::new(seed).child(i as u64).rng();
        let inst = make_instantiation(class, f.dim()).unwrap();
        let source = make_forward_tools(&f).unwrap().sampler(1e-12).unwrap();
        let verdict = match inverse_generate(source, 0.25, 0.2, &inst, &Budget::default(), &mut rng) {
            Ok(run) => {
                let (tv, exact, hw, stray) = measured_tv(&run, &f, 1_000_000, &mut rng);
                let ok = !stray && hw <= 0.01 && tv <= 0.25;
                wins += ok as usize;
                format!("tv={tv:.3} exact={exact:.3} hw={hw:.4}{}", if stray { " stray" } else { "" })
            }
            Err(e) => format!("error: {e}"),
        };
        lines.push(format!("    {label}[{i}] {verdict}"));
    }
    (wins, total, lines.join("\n"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(108).rng();
    let cases = (0..20)
        .map(|_| loop {
            let f = BoolFunc::Ltf(random_ltf(12, 50, &mut rng).unwrap());
            if satisfying_count(&f).unwrap() > 0 {
                break (f, ClassTag::Ltf);
            }
        })
        .collect();
    let (wins, total, lines) = inversion_batch("ltf", cases, 208);
    let t = start.elapsed();
    println!("{lines}");
    Outcome {
        pass: rate(wins, total) >= 0.7 && within(t, 1800),
        detail: format!("tv<=0.25: {wins}/{total} time={:.1}s", t.as_secs_f64()),
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedTree::new(109).rng();
    let dnfs: Vec<_> =
        (0..10).map(|_| (BoolFunc::Dnf(planted_dnf(12, 2, 3..=5, &mut rng).unwrap()), ClassTag::Dnf { s: 2 })).collect();
    let kdnfs: Vec<_> =
        (0..10).map(|_| (BoolFunc::Dnf(random_kdnf(12, 2, 3, &mut rng).unwrap()), ClassTag::Kdnf { k: 2 })).collect();
    let (w1, t1, l1) = inversion_batch("dnf", dnfs, 209);
    let (w2, t2, l2) = inversion_batch("kdnf", kdnfs, 309);
    println!("{l1}\n{l2}");
    Outcome {
        pass: rate(w1, t1) >= 0.7 && rate(w2, t2) >= 0.7,
        detail: format!("dnf {w1}/{t1} kdnf {w2}/{t2} time={:.1}s", start.elapsed().as_secs_f64()),
    }
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let groups: Vec<(&str, usize, Vec<Permutation>)> = vec![
        ("C8", 8, invgen::graphauto::brute_force_automorphisms(&cycle_graph(8)).unwrap()),
        ("K4", 4, invgen::graphauto::brute_force_automorphisms(&complete_graph(4)).unwrap()),
        ("Petersen", 10, petersen_automorphisms()),
    ];
    let draws = 1_000_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for (gi, (name, n, aut)) in groups.into_iter().enumerate() {
        let uniform = MassTable::uniform(aut.iter().cloned()).unwrap();
        let source = TableSampler::new(&uniform).unwrap();
        let mut good = 0;
        let mut worst = 0.0f64;
        for redraw in 0..50u64 {
            let mut rng = SeedTree::new(110).child(gi as u64).child(redraw).rng();
            let s = build_aut_inverse_sampler(&source, n, 0.02, 0.02, &mut rng).unwrap();
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for _ in 0..draws {
                *counts.entry(s.walk_index(&mut rng)).or_insert(0) += 1;
            }
            let emp = MassTable::from_counts(counts.into_iter().map(|(i, c)| (s.element(i), c))).unwrap();
            let tv = tv_exact(&emp, &uniform).unwrap();
            worst = worst.max(tv);
            good += (tv <= 0.05) as usize;
        }
        pass &= rate(good, 50) >= 0.95;
        parts.push(format!("{name} |Aut|={} {good}/50 worst={worst:.4}", aut.len()));
    }
    let t = start.elapsed();
    Outcome { pass: pass && within(t, 300), detail: format!("{} time={:.1}s", parts.join(", "), t.as_secs_f64()) }
}

fn invgen_cli(args: &[&str], dir: &Path) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_invgen")).args(args).current_dir(dir).output().expect("binary runs");
    (out.status.success(), out.stdout)
}

fn tree_bytes(dir: &Path, skip: &[&str]) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if !skip.contains(&name.as_str()) && path.is_file() {
            out.insert(name, std::fs::read(&path).unwrap());
        }
    }
    out
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("f.json"), r#"{"kind":"dnf","n":10,"terms":[[1,2,3],[-4,5],[6,-7,8,9]]}"#).unwrap();
    std::fs::write(d.join("c8.txt"), "8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 1\n").unwrap();
    let runs: Vec<(&str, Vec<&str>, Option<&str>)> = vec![
        ("gen", vec!["gen", "--class", "ltf", "--n", "8", "--seed", "3", "--samples", "4000", "--out", "OUT"], Some("OUT")),
        (
            "invert",
            vec!["invert", "--class", "ltf", "--samples", "data/samples.txt", "--seed", "4", "--draws", "20000", "--out", "OUT"],
            Some("OUT"),
        ),
        ("eval", vec!["eval", "--sampler", "data/sampler.json", "--function", "data/function.json", "--draws", "20000", "--seed", "5"], None),
        ("count", vec!["count", "--function", "f.json", "--seed", "6"], None),
        ("sample", vec!["sample", "--function", "f.json", "--draws", "2000", "--seed", "7", "--out", "OUT"], Some("OUT")),
        ("graphauto", vec!["graphauto", "--graph", "c8.txt", "--seed", "8", "--draws", "20000"], None),
    ];
    ok_or_fail(invgen_cli(&["gen", "--class", "ltf", "--n", "8", "--seed", "1", "--samples", "4000", "--out", "data"], d).0);
    let mut diffs = Vec::new();
    for (name, args, out) in &runs {
        if *name == "eval" {
            let inv = ["invert", "--class", "ltf", "--samples", "data/samples.txt", "--seed", "2", "--draws", "1000", "--out", "data"];
            ok_or_fail(invgen_cli(&inv, d).0);
        }
        let mut results = Vec::new();
        for _ in 0..2 {
            let target = format!("{name}_out");
            let argv: Vec<&str> = args.iter().map(|a| if *a == "OUT" { target.as_str() } else { a }).collect();
            let (ok, stdout) = invgen_cli(&argv, d);
            let path = d.join(&target);
            let files = match out {
                Some(_) if path.is_dir() => tree_bytes(&path, &["timings.json"]),
                Some(_) => BTreeMap::from([(target.clone(), std::fs::read(&path).unwrap_or_default())]),
                None => BTreeMap::new(),
            };
            if path.is_dir() {
                std::fs::remove_dir_all(&path).unwrap();
            } else if path.exists() {
                std::fs::remove_file(&path).unwrap();
            }
            results.push((ok, stdout, files));
        }
        if !results[0].0 || results[0] != results[1] {
            diffs.push(name.to_string());
        }
    }
    let mut rng = SeedTree::new(111).rng();
    let classes = [
        (BoolFunc::Ltf(random_ltf(8, 20, &mut rng).unwrap()), ClassTag::Ltf),
        (BoolFunc::Dnf(planted_dnf(8, 2, 2..=3, &mut rng).unwrap()), ClassTag::Dnf { s: 2 }),
        (BoolFunc::Dnf(random_kdnf(8, 2, 2, &mut rng).unwrap()), ClassTag::Kdnf { k: 2 }),
    ];
    for (i, (f, class)) in classes.into_iter().enumerate() {
        let inst = make_instantiation(class, f.dim()).unwrap();
        let once = || {
            let source = make_forward_tools(&f).unwrap().sampler(1e-12).unwrap();
            let mut rng = SeedTree::new(211).child(i as u64).rng();
            inverse_generate(source, 0.25, 0.2, &inst, &Budget::default(), &mut rng)
                .map(|r| (serde_json::to_string(&r.transcript).unwrap(), serde_json::to_string(&r.sampler.to_spec()).unwrap()))
                .map_err(|e| e.to_string())
        };
        if once() != once() {
            diffs.push(format!("pipeline[{i}]"));
        }
    }
    Outcome {
        pass: diffs.is_empty(),
        detail: format!("differing: {diffs:?} time={:.1}s", start.elapsed().as_secs_f64()),
    }
}

fn ok_or_fail(ok: bool) {
    assert!(ok, "setup command failed");
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let out = run();
        println!("criterion {id}: {} {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        failed += !out.pass as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
