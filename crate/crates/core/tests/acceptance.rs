//! Acceptance gate. Every criterion runs in one sequential test so the timing
//! checks do not compete with other tests for cores; each prints one line.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use divsub::data::{generate_noisy, generate_synthesized, NoisySpec};
use divsub::greedy::{greedy_select, niceness_witness};
use divsub::info::{nvi_distance, InfoCache};
use divsub::objective::{evaluate, relevance_g, MiTable, ObjectiveConfig};
use divsub::oracle::{approximation_report, brute_force_opt, OracleInstance, DEFAULT_BUDGET};
use divsub::{
    centralized_select, default_machine_count, distributed_select, multilabel_metrics,
    streaming_select, Dataset, DatasetStream, DiscreteColumn, FeatureId, GreedyVariant,
    ObjectiveParams, PredictionMatrix,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn noisy(n: usize, d: usize, t: usize, cardinality: u32, seed: u64) -> Dataset {
    generate_noisy(
        NoisySpec {
            n,
            d,
            t,
            cardinality,
            noise: 0.5,
        },
        seed,
    )
}

fn setup(data: &Dataset, params: ObjectiveParams<f64>) -> (ObjectiveConfig<f64>, InfoCache<f64>) {
    (
        ObjectiveConfig::new(params, MiTable::compute(data).unwrap()).unwrap(),
        InfoCache::for_dataset(data),
    )
}

fn h_of(set: &[FeatureId], cfg: &ObjectiveConfig<f64>, cache: &InfoCache<f64>) -> f64 {
    evaluate(set, cfg, cache).unwrap().h
}

fn random_column(rng: &mut ChaCha8Rng, n: usize) -> DiscreteColumn {
    let card = rng.gen_range(1..=4u32);
    let codes: Vec<u32> = (0..n).map(|_| rng.gen_range(0..card)).collect();
    DiscreteColumn::from_codes(&codes)
}

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let triples = 2000;
    let mut worst: f64 = 0.0;
    for _ in 0..triples {
        let n = rng.gen_range(1..=64);
        let a = random_column(&mut rng, n);
        let b = random_column(&mut rng, n);
        let c = random_column(&mut rng, n);
        let d = |x: &DiscreteColumn, y: &DiscreteColumn| nvi_distance::<f64>(x, y).unwrap();
        for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
            ensure(d(x, y).to_bits() == d(y, x).to_bits(), || {
                format!("asymmetric: {} vs {}", d(x, y), d(y, x))
            })?;
            ensure((0.0..=1.0).contains(&d(x, y)), || {
                format!("out of range: {}", d(x, y))
            })?;
        }
        for x in [&a, &b, &c] {
            ensure(d(x, x) == 0.0, || format!("d(a, a) = {}", d(x, x)))?;
        }
        for (x, y, z) in [(&a, &b, &c), (&b, &a, &c), (&a, &c, &b)] {
            let slack = d(x, z) - d(x, y) - d(y, z);
            worst = worst.max(slack);
            ensure(slack <= 1e-9, || format!("triangle violated by {slack:e}"))?;
        }
    }
    Ok(format!(
        "{triples} triples, worst triangle slack {worst:.3e}"
    ))
}

/// Independent `g`: per label, the sum of the `p` largest values in the column.
fn g_reference(set: &[FeatureId], rows: &HashMap<FeatureId, Vec<f64>>, t: usize, p: usize) -> f64 {
    (0..t)
        .map(|l| {
            let mut col: Vec<f64> = set.iter().map(|x| rows[x][l]).collect();
            col.sort_by(|a, b| b.total_cmp(a));
            col.iter().take(p).sum::<f64>()
        })
        .sum()
}

fn relevance_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut triples = 0;
    let mut instance = 0u64;
    while triples < 1200 {
        instance += 1;
        let d = rng.gen_range(3..=20);
        let t = rng.gen_range(1..=4);
        let data = noisy(rng.gen_range(8..=40), d, t, 3, instance);
        let mi = MiTable::compute(&data).unwrap();
        let rows: HashMap<FeatureId, Vec<f64>> =
            (0..d).map(|x| (x, mi.row(x).unwrap().to_vec())).collect();
        for p in [1, 2, d] {
            let cfg = ObjectiveConfig::unweighted(p, d, mi.clone()).unwrap();
            let g = |s: &[FeatureId]| relevance_g(s, &cfg).unwrap();
            for _ in 0..10 {
                let mut ids: Vec<FeatureId> = (0..d).collect();
                ids.shuffle(&mut rng);
                let t_len = rng.gen_range(0..d);
                let s_len = rng.gen_range(0..=t_len);
                let x = ids[t_len];
                let big = &ids[..t_len];
                let small = &ids[..s_len];
                let with = |s: &[FeatureId]| [s, &[x]].concat();

                let (gs, gt) = (g(small), g(big));
                ensure(gs >= 0.0, || format!("g(S) = {gs} < 0"))?;
                ensure(
                    (gs - g_reference(small, &rows, t, p)).abs() <= 1e-12,
                    || format!("g(S) = {gs} disagrees with the reference"),
                )?;
                ensure(gt >= gs - 1e-9, || {
                    format!("not monotone: g(T) = {gt} < g(S) = {gs}")
                })?;
                let (ds, dt) = (g(&with(small)) - gs, g(&with(big)) - gt);
                ensure(ds >= dt - 1e-9, || {
                    format!("not submodular: gain {ds} on S < gain {dt} on T (p = {p})")
                })?;
                triples += 1;
            }
        }
    }
    Ok(format!(
        "{triples} (S, T, x) triples over {instance} datasets"
    ))
}

fn niceness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_marginal, mut worst_distance): (f64, f64) = (0.0, 0.0);
    for i in 0..100u64 {
        let d = rng.gen_range(30..=60);
        let k = rng.gen_range(10..=15);
        let t = rng.gen_range(1..=4);
        let lambda = [0.0, 0.25, 0.5, 0.75, 1.0][i as usize % 5];
        let p = [1, 3, 10][i as usize % 3];
        let data = noisy(rng.gen_range(24..=64), d, t, 4, 100 + i);
        let (cfg, cache) = setup(&data, ObjectiveParams::new(lambda, p, k));
        let report = niceness_witness(&data.feature_ids(), k, &cfg, &cache).unwrap();
        worst_marginal = worst_marginal.max(report.max_marginal_ratio);
        worst_distance = worst_distance.max(report.max_distance_ratio);
        ensure(report.max_marginal_ratio <= 5.0 + 1e-9, || {
            format!("instance {i}: marginal ratio {}", report.max_marginal_ratio)
        })?;
        ensure(report.max_distance_ratio <= 4.5 + 1e-9, || {
            format!("instance {i}: distance ratio {}", report.max_distance_ratio)
        })?;
        ensure(report.stable(), || {
            format!("instance {i}: unstable {:?}", report.unstable)
        })?;
    }
    Ok(format!(
        "100 instances, max ratios {worst_marginal:.3} (<= 5) and {worst_distance:.3} (<= 4.5)"
    ))
}

fn altgreedy_half() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 1.0;
    for i in 0..50u64 {
        let d = rng.gen_range(6..=12);
        let k = rng.gen_range(2..=4);
        let lambda = [0.0, 0.5, 1.0][i as usize % 3];
        let p = rng.gen_range(1..=3);
        let data = noisy(rng.gen_range(12..=40), d, rng.gen_range(1..=3), 3, 200 + i);
        let (cfg, cache) = setup(&data, ObjectiveParams::new(lambda, p, k));
        let opt = brute_force_opt(&data.feature_ids(), k, &cfg, &cache, DEFAULT_BUDGET).unwrap();
        let alt = greedy_select(
            &data.feature_ids(),
            k,
            GreedyVariant::AltGreedy,
            &cfg,
            &cache,
        )
        .unwrap();
        let value = h_of(&alt, &cfg, &cache);
        if opt.value > 0.0 {
            worst = worst.min(value / opt.value);
        }
        ensure(value >= 0.5 * opt.value - 1e-9, || {
            format!("instance {i}: {value} < half of {}", opt.value)
        })?;
    }
    Ok(format!("50 instances, worst AltGreedy/OPT {worst:.4}"))
}

/// Per-instance 20-seed mean ratios, measured once and pinned.
const PINNED_MEANS: [f64; 20] = [
    1.0000, 0.9987, 0.9956, 1.0000, 0.9890, 0.9877, 1.0000, 0.9977, 0.9998, 1.0000, 0.9861, 0.9985,
    1.0000, 0.9857, 0.9826, 1.0000, 0.9981, 0.9897, 1.0000, 0.9989,
];

fn distributed_bound() -> Outcome {
    let seeds: Vec<u64> = (0..20).collect();
    let mut means = Vec::new();
    let mut worst: f64 = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20u64 {
        let d = rng.gen_range(10..=14);
        let k = rng.gen_range(2..=4);
        let lambda = [0.0, 0.5, 1.0][i as usize % 3];
        let data = noisy(rng.gen_range(16..=48), d, rng.gen_range(1..=3), 3, 300 + i);
        let mut inst = OracleInstance::new(&data, ObjectiveParams::new(lambda, 2, k));
        inst.machines = Some(rng.gen_range(2..=4));
        let report = approximation_report(&inst, &seeds).unwrap();
        worst = worst.min(report.min_distributed_ratio);
        ensure(report.distributed_bound_holds, || {
            format!(
                "instance {i}: ratio {} below 1/31",
                report.min_distributed_ratio
            )
        })?;
        means.push(report.mean_distributed_ratio);
    }
    for (i, (m, pinned)) in means.iter().zip(PINNED_MEANS).enumerate() {
        ensure((m - pinned).abs() <= 0.02, || {
            format!("instance {i}: mean ratio {m:.4} drifted from pinned {pinned:.4}")
        })?;
    }
    Ok(format!(
        "400 runs, worst ratio {worst:.4}, means within 0.02 of baselines"
    ))
}

fn distributed_vs_centralized() -> Outcome {
    let data = generate_synthesized(0);
    let mut parts = Vec::new();
    for k in [10, 16, 50] {
        let params = ObjectiveParams::new(0.5, 10, k);
        let central = centralized_select(&data, params, GreedyVariant::AltGreedy).unwrap();
        let m = default_machine_count(data.d(), k).unwrap();
        let dist = distributed_select(&data, params, m, 0, 4).unwrap();
        let (c, dv) = (central.objective.h, dist.objective.h);
        ensure(dv >= 0.9 * c, || {
            format!("k = {k}: distributed {dv} < 0.9 x centralized {c}")
        })?;
        parts.push(format!("k={k} m={m}: {dv:.2} vs {c:.2}"));
    }
    Ok(parts.join("; "))
}

fn determinism() -> Outcome {
    let max = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .max(4);
    let cases = [
        (
            generate_synthesized(4),
            ObjectiveParams::new(0.5, 10, 16),
            8,
        ),
        (noisy(64, 300, 4, 4, 7), ObjectiveParams::new(0.3, 3, 12), 5),
    ];
    for (data, params, machines) in &cases {
        let mut reference: Option<String> = None;
        for workers in [1, 2, max] {
            for _ in 0..10 {
                let report = distributed_select(data, *params, *machines, 11, workers).unwrap();
                let bytes = serde_json::to_string(&report.selected).unwrap();
                match &reference {
                    None => reference = Some(bytes),
                    Some(r) => ensure(*r == bytes, || format!("parallelism {workers} differs"))?,
                }
            }
        }
    }
    Ok(format!(
        "2 datasets x parallelism {{1, 2, {max}}} x 10 runs identical"
    ))
}

fn streaming_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20u64 {
        let d = rng.gen_range(20..=120);
        let k = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=6);
        let data = noisy(rng.gen_range(16..=64), d, rng.gen_range(1..=4), 4, 400 + i);
        let params = ObjectiveParams::new([0.0, 0.5, 1.0][i as usize % 3], 3, k);
        let dist = distributed_select(&data, params, m, i, 2).unwrap();
        let stream = streaming_select(&mut DatasetStream::new(&data), params, m, i).unwrap();
        ensure(stream.selected == dist.selected, || {
            format!("instance {i}: outputs differ")
        })?;
        ensure(
            stream.objective.h.to_bits() == dist.objective.h.to_bits(),
            || {
                format!(
                    "instance {i}: objective {} vs {}",
                    stream.objective.h, dist.objective.h
                )
            },
        )?;
    }
    let data = generate_synthesized(0);
    let (m, k) = (8, 16);
    let report = streaming_select(
        &mut DatasetStream::new(&data),
        ObjectiveParams::new(0.5, 10, k),
        m,
        0,
    )
    .unwrap();
    let largest = *report
        .plan
        .as_ref()
        .unwrap()
        .partition_sizes
        .iter()
        .max()
        .unwrap();
    let peak = report.peak_retained_columns.unwrap();
    ensure(peak <= largest + m * k, || {
        format!("peak {peak} > {largest} + {}", m * k)
    })?;
    Ok(format!(
        "20 instances equal; peak {peak} <= {largest} + {} of d = 800",
        m * k
    ))
}

fn metrics_examples() -> Outcome {
    let truth = PredictionMatrix::from_rows(&[vec![true, false], vec![true, true]]).unwrap();
    let pred = PredictionMatrix::from_rows(&[vec![true, true], vec![false, true]]).unwrap();
    let s = multilabel_metrics(&truth, &pred).unwrap();
    let two_thirds = 2.0 / 3.0;
    ensure(
        s.subset_accuracy == 0.0 && s.example_accuracy == 0.5,
        || format!("{s:?}"),
    )?;
    for v in [s.example_f, s.label_avg_f, s.pooled_f] {
        ensure((v - two_thirds).abs() < 1e-15, || format!("{s:?}"))?;
    }
    let perfect = multilabel_metrics(&truth, &truth).unwrap();
    ensure(
        [
            perfect.subset_accuracy,
            perfect.example_accuracy,
            perfect.example_f,
            perfect.label_avg_f,
            perfect.pooled_f,
        ]
        .iter()
        .all(|&v| v == 1.0),
        || format!("{perfect:?}"),
    )?;
    let disjoint = multilabel_metrics(&truth, &truth.complement()).unwrap();
    ensure(
        disjoint.subset_accuracy == 0.0 && disjoint.example_accuracy == 0.0,
        || format!("{disjoint:?}"),
    )?;
    Ok("2x2 example, perfect and complement cases exact".into())
}

fn lambda_endpoints() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let data = noisy(48, 40, 3, 4, 10);
    let mi = MiTable::compute(&data).unwrap();
    let rows: HashMap<FeatureId, Vec<f64>> = (0..data.d())
        .map(|x| (x, mi.row(x).unwrap().to_vec()))
        .collect();
    let cache = InfoCache::for_dataset(&data);
    for _ in 0..100 {
        let k = rng.gen_range(1..=12);
        let p = rng.gen_range(1..=5);
        let mut ids = data.feature_ids();
        ids.shuffle(&mut rng);
        let set = &ids[..k];

        let mut pairs = 0.0;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                pairs += nvi_distance::<f64>(data.feature(a), data.feature(b)).unwrap();
            }
        }
        let one = ObjectiveConfig::new(ObjectiveParams::new(1.0, p, k), mi.clone()).unwrap();
        let h1 = h_of(set, &one, &cache);
        ensure((h1 - pairs).abs() <= 1e-12, || {
            format!("lambda = 1: {h1} vs {pairs}")
        })?;

        let zero = ObjectiveConfig::new(ObjectiveParams::new(0.0, p, k), mi.clone()).unwrap();
        let scale = (k * (k - 1)).max(1) as f64 / (2 * p * data.t()) as f64;
        let expected = scale * g_reference(set, &rows, data.t(), p);
        let h0 = h_of(set, &zero, &cache);
        ensure((h0 - expected).abs() <= 1e-12, || {
            format!("lambda = 0: {h0} vs {expected}")
        })?;
    }
    Ok("100 sets, both endpoints within 1e-12".into())
}

fn speedup() -> Outcome {
    let data = noisy(256, 20_000, 8, 4, 11);
    let (k, m, workers) = (50, 20, 4);
    let params = ObjectiveParams::new(0.5, 10, k);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut trials = Vec::new();
    for trial in 0..3u64 {
        let t = Instant::now();
        let c = centralized_select(&data, params, GreedyVariant::AltGreedy).unwrap();
        let central = t.elapsed();
        let t = Instant::now();
        let d = distributed_select(&data, params, m, trial, workers).unwrap();
        let dist = t.elapsed();
        println!("    trial {trial}: centralized {:?}", c.timings);
        println!("    trial {trial}: distributed {:?}", d.timings);
        trials.push((central, dist));
    }
    let summary = trials
        .iter()
        .map(|(c, d)| {
            format!(
                "{:.0} vs {:.0} ms",
                d.as_secs_f64() * 1e3,
                c.as_secs_f64() * 1e3
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    ensure(trials.iter().all(|(c, d)| d < c), || {
        format!("distributed not faster in every trial ({summary}; {cores} core(s))")
    })?;
    Ok(format!(
        "distributed vs centralized: {summary}; {cores} core(s)"
    ))
}

#[test]
fn acceptance() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Option<Duration>); 11] = [
        ("metric axioms", metric_axioms, Some(Duration::from_secs(5))),
        (
            "relevance is monotone submodular",
            relevance_properties,
            Some(Duration::from_secs(10)),
        ),
        ("greedy niceness", niceness, Some(Duration::from_secs(60))),
        ("AltGreedy half bound", altgreedy_half, None),
        ("distributed 1/31 bound", distributed_bound, None),
        (
            "distributed near centralized",
            distributed_vs_centralized,
            Some(Duration::from_secs(120)),
        ),
        ("schedule independence", determinism, None),
        (
            "streaming equivalence and memory",
            streaming_equivalence,
            None,
        ),
        ("multi-label metrics", metrics_examples, None),
        ("lambda endpoints", lambda_endpoints, None),
        ("distributed speed-up", speedup, None),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]",
                i + 1
            ),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
