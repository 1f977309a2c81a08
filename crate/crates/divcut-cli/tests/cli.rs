//! End-to-end tests driving the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn divcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divcut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("divcut-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gamma_prints_hamming_schedule() {
    let out = divcut(&["gamma", "--measure", "hamming", "--m", "5", "--lambda", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "4 2 0 -2 -4");

    let out = divcut(&["gamma", "--measure", "hamming", "--m", "4", "--lambda", "0.5"]);
    assert_eq!(stdout(&out).trim(), "1.5 0.5 -0.5 -1.5");
}

#[test]
fn gamma_rejects_non_concave_custom_measure() {
    let out = divcut(&[
        "gamma", "--measure", "custom", "--delta", "0,1,3", "--lambda", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_NOT_CONCAVE"));
}

#[test]
fn parallel_and_independent_emit_identical_labelings() {
    let dir = tmp_dir("strategies");
    let inst = dir.join("grid.divcut");
    let gen = divcut(&[
        "gen", "grid", "--rows", "6", "--cols", "5", "--seed", "11", "--contrast",
        "-o", inst.to_str().unwrap(),
    ]);
    assert!(gen.status.success());

    for (strategy, extra) in [("parallel", Some(("--workers", "4"))), ("independent", None)] {
        let out_dir = dir.join(strategy);
        let mut args: Vec<String> = [
            "solve",
            inst.to_str().unwrap(),
            "--strategy",
            strategy,
            "--measure",
            "hamming",
            "--m",
            "5",
            "--lambda",
            "0.7",
            "-o",
            out_dir.to_str().unwrap(),
        ]
        .map(String::from)
        .to_vec();
        if let Some((k, v)) = extra {
            args.push(k.into());
            args.push(v.into());
        }
        let out = Command::new(env!("CARGO_BIN_EXE_divcut")).args(&args).output().unwrap();
        assert!(out.status.success(), "{strategy}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let a = std::fs::read(dir.join("parallel/labelings-parallel.txt")).unwrap();
    let b = std::fs::read(dir.join("independent/labelings-independent.txt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_numbers_recompute_from_labeling_files() {
    let dir = tmp_dir("report");
    let inst_path = dir.join("toy.divcut");
    assert!(divcut(&[
        "gen", "scribble", "--rows", "6", "--cols", "6", "--seed", "3",
        "-o", inst_path.to_str().unwrap(),
    ])
    .status
    .success());
    let out_dir = dir.join("out");
    assert!(divcut(&[
        "solve",
        inst_path.to_str().unwrap(),
        "--strategy",
        "sequential",
        "--measure",
        "hamming",
        "--m",
        "3",
        "--lambda",
        "1.5",
        "-o",
        out_dir.to_str().unwrap(),
    ])
    .status
    .success());

    // Recompute the objective from the emitted labelings and compare with
    // the units figure in the report.
    let instance = divcut::instance::Instance::read(&inst_path).unwrap();
    let labelings = divcut::instance::labelings_from_text(
        &std::fs::read_to_string(out_dir.join("labelings-sequential.txt")).unwrap(),
    )
    .unwrap();
    let measure = divcut::DiversityMeasure::hamming(3);
    let schedule =
        divcut::GammaSchedule::new(&measure, 1.5, instance.model.scale()).unwrap();
    let recomputed =
        divcut::solver::joint_objective_units(&instance.model, &schedule, &labelings).unwrap();

    let report = std::fs::read_to_string(out_dir.join("report-sequential.txt")).unwrap();
    let units_line = report
        .lines()
        .find(|l| l.starts_with("objective "))
        .expect("report has objective line");
    let units: i64 = units_line.split_whitespace().last().unwrap().parse().unwrap();
    assert_eq!(units, recomputed);

    // The graymap exists and has PGM shape.
    let pgm = std::fs::read_to_string(out_dir.join("solution-sequential.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n6 6\n3\n"));
}

#[test]
fn check_flags_non_submodular_instance() {
    let dir = tmp_dir("check");
    let path = dir.join("bad.divcut");
    std::fs::write(
        &path,
        "divcut instance 1\nnodes 2\nedges 1\nu 0 0 0\nu 1 0 0\ne 0 1 0 0 0 5\n",
    )
    .unwrap();
    let out = divcut(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("submodular false"));
}

#[test]
fn solve_refuses_non_submodular_instance_with_code() {
    let dir = tmp_dir("refuse");
    let path = dir.join("bad.divcut");
    std::fs::write(
        &path,
        "divcut instance 1\nnodes 2\nedges 1\nu 0 0 0\nu 1 0 0\ne 0 1 0 0 0 5\n",
    )
    .unwrap();
    let out = divcut(&[
        "solve", path.to_str().unwrap(), "--measure", "hamming", "--m", "2",
        "--lambda", "1", "-o", dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_NOT_SUBMODULAR"));
}

#[test]
fn oracle_verify_passes_on_default_suite() {
    let out = divcut(&["oracle-verify", "--instances", "60", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("oracle-verify pass"));
}

#[test]
fn seed_env_var_is_honored() {
    let dir = tmp_dir("seedenv");
    let a = dir.join("a.divcut");
    let b = dir.join("b.divcut");
    let run = |path: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_divcut"))
            .args(["gen", "grid", "--rows", "3", "--cols", "3", "-o", path.to_str().unwrap()])
            .env("DIVCUT_SEED", "123")
            .output()
            .unwrap();
        assert!(out.status.success());
    };
    run(&a);
    run(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn dimacs_export_and_solve_round_trip() {
    let dir = tmp_dir("dimacs");
    let inst = dir.join("grid.divcut");
    assert!(divcut(&[
        "gen", "grid", "--rows", "4", "--cols", "4", "--seed", "9",
        "-o", inst.to_str().unwrap(),
    ])
    .status
    .success());
    let dimacs = dir.join("net.dimacs");
    assert!(divcut(&[
        "export-dimacs", inst.to_str().unwrap(), "--gamma", "0.25",
        "-o", dimacs.to_str().unwrap(),
    ])
    .status
    .success());
    let out = divcut(&["solve-dimacs", dimacs.to_str().unwrap()]);
    assert!(out.status.success());
    let flow_line = stdout(&out);
    let flow: i64 = flow_line.trim().strip_prefix("flow ").unwrap().parse().unwrap();

    // The DIMACS round trip preserves the min-cut value of the reduction.
    let instance = divcut::instance::Instance::read(&inst).unwrap();
    let gamma = instance.model.scale().to_units(0.25);
    let mut map = divcut::ReductionMap::build(
        &instance.model,
        &vec![gamma; instance.model.node_count()],
    )
    .unwrap();
    let direct = map.network().solve().flow_units;
    assert_eq!(flow, direct);
}

#[test]
fn bench_emits_samples_and_summary() {
    let dir = tmp_dir("bench");
    let out = divcut(&[
        "bench", "--rows", "12", "--cols", "12", "--m-list", "2,3",
        "--lambda", "1", "--warmup", "0", "--repeats", "2",
        "--seed", "4", "-o", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let samples = std::fs::read_to_string(dir.join("bench-samples.tsv")).unwrap();
    assert!(samples.lines().count() > 6); // header + 3 methods x 2 Ms x 2 repeats
    let summary = std::fs::read_to_string(dir.join("bench-summary.tsv")).unwrap();
    assert!(summary.contains("parametric-sequential"));
    assert!(summary.contains("divmbest"));
    assert!(summary.contains("time_ms(M=2)"));

    // All methods agree on the exact objective or dominate it: the two
    // parametric rows must match each other exactly.
    let mut objectives = std::collections::HashMap::new();
    for line in samples.lines().skip(1) {
        let fields: Vec<&str> = line.split('\t').collect();
        let key = (fields[0].starts_with("parametric"), fields[1].to_string());
        let obj: i64 = fields[4].parse().unwrap();
        objectives.entry(key).or_insert_with(Vec::new).push(obj);
    }
    for ((is_parametric, m), objs) in &objectives {
        if *is_parametric {
            assert!(objs.windows(2).all(|w| w[0] == w[1]), "M={m}");
        }
    }
    // The exact solver never loses to the greedy baseline.
    for (key, objs) in &objectives {
        if !key.0 {
            let exact = objectives[&(true, key.1.clone())][0];
            for &greedy in objs {
                assert!(exact <= greedy, "M={}", key.1);
            }
        }
    }
}

#[test]
fn bench_with_ground_truth_emits_metric_table() {
    let dir = tmp_dir("bench-gt");
    let inst = dir.join("toy.divcut");
    assert!(divcut(&[
        "gen", "scribble", "--rows", "10", "--cols", "10", "--seed", "6",
        "-o", inst.to_str().unwrap(),
    ])
    .status
    .success());
    let out_dir = dir.join("bench");
    let out = divcut(&[
        "bench", inst.to_str().unwrap(), "--m-list", "2,4",
        "--lambda", "0.5", "--warmup", "0", "--repeats", "1",
        "-o", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(out_dir.join("bench-metrics.tsv")).unwrap();
    assert!(metrics.contains("best_accuracy(M=2)"));
    assert!(metrics.contains("best_iou(M=4)"));
    // M-vs-metric data is plot-ready: every method row has 1 + 2*|Ms| fields.
    for line in metrics.lines().skip(1) {
        assert_eq!(line.split('\t').count(), 5, "{line}");
    }
}
