use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::Serialize;
use serde_json::json;

use invgen::core::io::{function_to_json, parse_function, parse_samples, samples_to_string};
use invgen::core::{brute_force_satisfying_set, Assignment, BoolFunc, ENUMERATION_CAP};
use invgen::genct::{draw_retrying, make_forward_tools, BottomSampler, FnSampler};
use invgen::graphauto::{brute_force_automorphisms, build_aut_inverse_sampler, parse_graph, Permutation};
use invgen::hypsel::TableSampler;
use invgen::pipeline::{
    inverse_generate, make_instantiation, planted_dnf, random_kdnf, random_ltf, Budget, ClassTag, InverseSampler,
    SamplerSpec,
};
use invgen::{Error, MassTable, SeedTree};

use crate::report::{bias_bound, half_width, recompute_tv_from_counts, tv_between_counts, write_json, Timings, TvSection, SCHEMA};
use crate::{
    ClassArgs, ClassName, Cli, CliError, CliResult, Command, CountArgs, EvalArgs, GenArgs, GraphautoArgs, InvertArgs,
    SampleArgs,
};

const DRAW_ATTEMPTS: u64 = 1000;

/// Runs one command and returns a one-line summary for stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Invert(a) => invert(a),
        Command::Eval(a) => eval(a),
        Command::Count(a) => count(a),
        Command::Sample(a) => sample(a),
        Command::Graphauto(a) => graphauto(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn out_dir(path: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

fn read_function(path: &Path) -> CliResult<BoolFunc> {
    Ok(parse_function(&read(path)?)?)
}

fn class_tag(c: &ClassArgs) -> CliResult<ClassTag> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--class {:?} needs --{flag}", c.class)));
    Ok(match c.class {
        ClassName::Ltf => ClassTag::Ltf,
        ClassName::Dnf => ClassTag::Dnf { s: need(c.s, "s")? },
        ClassName::Kdnf => ClassTag::Kdnf { k: need(c.k, "k")? },
    })
}

fn plant(a: &GenArgs, rng: &mut dyn RngCore) -> CliResult<BoolFunc> {
    if let Some(p) = &a.function {
        let f = read_function(p)?;
        if f.dim() != a.n {
            return Err(Error::DimensionMismatch { expected: a.n, got: f.dim() }.into());
        }
        return Ok(f);
    }
    Ok(match a.class.class {
        ClassName::Ltf => BoolFunc::Ltf(random_ltf(a.n, 10, rng)?),
        ClassName::Dnf => {
            let lo = 3.min(a.n);
            BoolFunc::Dnf(planted_dnf(a.n, a.class.s.unwrap_or(2), lo..=5.min(a.n).max(lo), rng)?)
        }
        ClassName::Kdnf => BoolFunc::Dnf(random_kdnf(a.n, a.class.k.unwrap_or(2), a.class.s.unwrap_or(3), rng)?),
    })
}

fn exact_sampler(f: &BoolFunc, delta: f64) -> CliResult<Arc<dyn BottomSampler>> {
    let unsat = || CliError::Lib(Error::invalid("the planted function has no satisfying assignment"));
    let tools = match make_forward_tools(f) {
        Ok(t) => t,
        Err(Error::Infeasible(_)) => return Err(unsat()),
        Err(e) => return Err(e.into()),
    };
    if let BoolFunc::Ltf(_) = f {
        if tools.count(0.5, 0.5, &mut SeedTree::new(0).rng())?.value == 0.0 {
            return Err(unsat());
        }
    }
    Ok(tools.sampler(delta)?)
}

fn gen(a: &GenArgs) -> CliResult<String> {
    let root = SeedTree::new(a.seed);
    let f = plant(a, &mut root.named("plant").rng())?;
    let sampler = exact_sampler(&f, 1e-9)?;
    let mut rng = root.named("samples").rng();
    let points = (0..a.samples)
        .map(|_| draw_retrying(sampler.as_ref(), DRAW_ATTEMPTS, &mut rng))
        .collect::<invgen::Result<Vec<_>>>()?;
    let dir = out_dir(&a.out)?;
    write(&dir.join("function.json"), &(function_to_json(&f) + "\n"))?;
    write(&dir.join("samples.txt"), &samples_to_string(&points))?;
    Ok(format!("wrote {} samples of a {} over {} variables to {}", points.len(), f.kind(), f.dim(), dir.display()))
}

fn draw_counts(
    sampler: &dyn BottomSampler,
    draws: u64,
    rng: &mut dyn RngCore,
) -> (BTreeMap<Assignment, u64>, u64) {
    let mut counts = BTreeMap::new();
    let mut bottom = 0;
    for _ in 0..draws {
        match sampler.generate(rng) {
            Some(x) => *counts.entry(x).or_insert(0) += 1,
            None => bottom += 1,
        }
    }
    (counts, bottom)
}

fn keyed(counts: BTreeMap<Assignment, u64>) -> BTreeMap<String, u64> {
    counts.into_iter().map(|(x, c)| (x.to_string(), c)).collect()
}

fn tv_section(
    sampler: &dyn BottomSampler,
    f: &BoolFunc,
    draws: u64,
    empirical: bool,
    threshold: f64,
    rng: &mut dyn RngCore,
) -> CliResult<TvSection> {
    let (counts, bottom) = draw_counts(sampler, draws, rng);
    let accepted = draws - bottom;
    let counts = keyed(counts);
    if !empirical {
        let support: BTreeSet<String> =
            brute_force_satisfying_set(f, f.dim())?.iter().map(|x| x.to_string()).collect();
        let tv = recompute_tv_from_counts(&counts, &support);
        return Ok(TvSection {
            mode: "exact",
            draws,
            bottom,
            support_size: Some(support.len() as u64),
            reference_counts: None,
            tv,
            half_width: half_width(accepted),
            bias_bound: bias_bound(support.len() as u64, accepted),
            support_caveat: false,
            threshold,
            pass: tv <= threshold,
            counts,
        });
    }
    let reference = exact_sampler(f, 1e-9)?;
    let (reference_counts, _) = draw_counts(reference.as_ref(), accepted.max(1), rng);
    let reference_counts = keyed(reference_counts);
    let tv = tv_between_counts(&counts, &reference_counts);
    let seen = counts.keys().chain(reference_counts.keys()).collect::<BTreeSet<_>>().len() as u64;
    Ok(TvSection {
        mode: "empirical",
        draws,
        bottom,
        support_size: None,
        tv,
        half_width: half_width(accepted),
        bias_bound: bias_bound(seen, accepted),
        support_caveat: true,
        threshold,
        pass: tv <= threshold,
        counts,
        reference_counts: Some(reference_counts),
    })
}

#[derive(Serialize)]
struct ExactSupport {
    sampler_support: u64,
    target_support: u64,
    intersection: u64,
    /// `1 − |A∩B| / max(|A|,|B|)`: the conditional output is uniform on the sampler's support.
    tv: f64,
}

fn exact_support(s: &InverseSampler, f: &BoolFunc) -> CliResult<ExactSupport> {
    let a: BTreeSet<Assignment> = s.conditional_support()?.into_iter().collect();
    let b: BTreeSet<Assignment> = brute_force_satisfying_set(f, f.dim())?.into_iter().collect();
    let inter = a.intersection(&b).count() as u64;
    let tv = invgen::core::tv_uniform_sets(&a, &b).unwrap_or(1.0);
    Ok(ExactSupport { sampler_support: a.len() as u64, target_support: b.len() as u64, intersection: inter, tv })
}

fn invert(a: &InvertArgs) -> CliResult<String> {
    let mut timings = Timings::start();
    let root = SeedTree::new(a.seed);
    let points = parse_samples(&read(&a.samples)?, None)?;
    if points.is_empty() {
        return Err(Error::invalid(format!("{}: no samples", a.samples.display())).into());
    }
    let n = points[0].dim();
    let function = a.function.as_deref().map(read_function).transpose()?;
    if let Some(f) = &function {
        if f.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.dim() }.into());
        }
    }
    let budget: Budget = match &a.budget {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::invalid(format!("budget file: {e}")))?,
        None => Budget::default(),
    };
    let inst = make_instantiation(class_tag(&a.class)?, n)?;
    let pool = Arc::new(points);
    let source: Arc<dyn BottomSampler> = Arc::new(FnSampler(move |rng: &mut dyn RngCore| {
        Some(pool[rng.gen_range(0..pool.len())])
    }));
    timings.lap("load");
    let run = inverse_generate(source, a.eps, a.delta, &inst, &budget, &mut root.named("invert").rng())?;
    timings.lap("inverse_generate");

    let dir = out_dir(&a.out)?;
    let spec = run.sampler.to_spec();
    write_json(&dir.join("sampler.json"), &spec)?;
    let (exact, tv) = match &function {
        Some(f) if n <= ENUMERATION_CAP => {
            let exact = exact_support(&run.sampler, f)?;
            let tv = tv_section(&run.sampler, f, a.draws, false, a.tv_threshold, &mut root.named("eval").rng())?;
            (Some(exact), Some(tv))
        }
        Some(f) => {
            let tv = tv_section(&run.sampler, f, a.draws, true, a.tv_threshold, &mut root.named("eval").rng())?;
            (None, Some(tv))
        }
        None => (None, None),
    };
    timings.lap("evaluate");
    let report = json!({
        "schema": SCHEMA,
        "command": "invert",
        "config": a,
        "n": n,
        "winner_grid_index": run.transcript.winner,
        "sampler": {
            "g_kind": spec.g.kind(),
            "h_kind": spec.h.kind(),
            "trials": spec.trials,
            "certificate": spec.certificate,
        },
        "transcript": run.transcript,
        "exact_support": exact,
        "tv": tv,
    });
    write_json(&dir.join("report.json"), &report)?;
    write_json(&dir.join("timings.json"), &timings)?;
    Ok(format!(
        "winner grid index {} of {}; report in {}",
        run.transcript.winner.unwrap_or_default(),
        run.transcript.grid.len(),
        dir.display()
    ))
}

fn load_sampler(path: &Path) -> CliResult<InverseSampler> {
    let spec: SamplerSpec =
        serde_json::from_str(&read(path)?).map_err(|e| Error::invalid(format!("sampler file: {e}")))?;
    Ok(InverseSampler::from_spec(&spec)?)
}

fn emit(out: &Option<PathBuf>, report: &serde_json::Value) -> CliResult<String> {
    match out {
        Some(p) => {
            write_json(p, report)?;
            Ok(format!("report in {}", p.display()))
        }
        None => Ok(serde_json::to_string(report).map_err(|e| CliError::Usage(e.to_string()))?),
    }
}

fn eval(a: &EvalArgs) -> CliResult<String> {
    let sampler = load_sampler(&a.sampler)?;
    let f = read_function(&a.function)?;
    if f.dim() != sampler.dim() {
        return Err(Error::DimensionMismatch { expected: sampler.dim(), got: f.dim() }.into());
    }
    if a.exact && f.dim() > ENUMERATION_CAP {
        return Err(Error::Capacity(format!("cannot enumerate dimension {}", f.dim())).into());
    }
    let empirical = a.empirical || f.dim() > ENUMERATION_CAP;
    let mut rng = SeedTree::new(a.seed).named("eval").rng();
    let tv = tv_section(&sampler, &f, a.draws, empirical, a.tv_threshold, &mut rng)?;
    emit(&a.out, &json!({ "schema": SCHEMA, "command": "eval", "config": a, "n": f.dim(), "tv": tv }))
}

fn count(a: &CountArgs) -> CliResult<String> {
    let f = read_function(&a.function)?;
    let n = f.dim();
    let estimate = match make_forward_tools(&f) {
        Ok(tools) => Some(tools.count(a.eps, a.delta, &mut SeedTree::new(a.seed).named("count").rng())?),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let fraction = estimate.map_or(0.0, |e| e.value);
    let exact = (n <= 20).then(|| invgen::core::satisfying_count(&f)).transpose()?;
    emit(
        &a.out,
        &json!({
            "schema": SCHEMA,
            "command": "count",
            "config": a,
            "n": n,
            "estimate": estimate,
            "fraction": fraction,
            "count": fraction * 2f64.powi(n as i32),
            "exact_count": exact,
        }),
    )
}

fn sample(a: &SampleArgs) -> CliResult<String> {
    let f = read_function(&a.function)?;
    let sampler = exact_sampler(&f, a.delta)?;
    let mut rng = SeedTree::new(a.seed).named("sample").rng();
    let mut points = Vec::with_capacity(a.draws as usize);
    let mut bottom = 0u64;
    for _ in 0..a.draws {
        match sampler.generate(&mut rng) {
            Some(x) => points.push(x),
            None => bottom += 1,
        }
    }
    write(&a.out, &samples_to_string(&points))?;
    Ok(format!("wrote {} samples ({bottom} draws returned bottom) to {}", points.len(), a.out.display()))
}

fn graphauto(a: &GraphautoArgs) -> CliResult<String> {
    let g = parse_graph(&read(&a.graph)?)?;
    let group = brute_force_automorphisms(&g)?;
    let table = MassTable::uniform(group.iter().cloned())?;
    let source = TableSampler::new(&table)?;
    let root = SeedTree::new(a.seed);
    let sampler = build_aut_inverse_sampler(&source, g.n(), a.eps, a.delta, &mut root.named("generators").rng())?;
    let mut rng = root.named("walk").rng();
    let mut by_index: BTreeMap<u32, u64> = BTreeMap::new();
    for _ in 0..a.draws {
        *by_index.entry(sampler.walk_index(&mut rng)).or_insert(0) += 1;
    }
    let counts: BTreeMap<String, u64> = by_index.into_iter().map(|(i, c)| (sampler.element(i).to_string(), c)).collect();
    let support: BTreeSet<String> = group.iter().map(Permutation::to_string).collect();
    let tv = recompute_tv_from_counts(&counts, &support);
    let report = json!({
        "schema": SCHEMA,
        "command": "graphauto",
        "config": a,
        "n": g.n(),
        "group_order": group.len(),
        "generators": sampler.set().elements().len(),
        "walk_length": sampler.steps(),
        "draws": a.draws,
        "counts": counts,
        "tv": tv,
        "half_width": half_width(a.draws),
        "bias_bound": bias_bound(group.len() as u64, a.draws),
        "threshold": a.tv_threshold,
        "pass": tv <= a.tv_threshold,
    });
    emit(&a.out, &report)
}
