//! Command-line driver: instance generation, schedule printing, solving,
//! oracle verification and benchmarking.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use divcut::diversity::{DiversityMeasure, GammaSchedule};
use divcut::instance::{
    generate_grid, generate_scribble_toy, labelings_to_text, random_submodular_model,
    zero_count_pgm, BlobShape, Instance, MeasureSpec,
};
use divcut::oracle::{
    brute_force_joint, brute_force_multilabel, check_join_preserves_optimality, check_threshold_decoupling, divmbest_greedy,
    AntitoneOracle, SubmodularOracle, DEFAULT_BUDGET,
};
use divcut::report::{BenchReport, BenchSample, RunReport, StrategyReport};
use divcut::solver::{joint_objective_units, solve_joint, verify_solution, Strategy};
use divcut::{Error, Scale};

#[derive(Parser)]
#[command(name = "divcut", about = "Diverse M-best labelings via parametric min-cut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Check submodularity of an instance and concavity of its measure.
    Check {
        instance: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Print the closed-form gamma schedule for a measure.
    Gamma {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        lambda: f64,
        /// Fixed-point units per 1.0 cost.
        #[arg(long, default_value_t = divcut::fixed::DEFAULT_SCALE)]
        scale: i64,
    },
    /// Solve an instance and write labelings, report and graymap.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Sequential)]
        strategy: StrategyArg,
        /// Worker count for the parallel strategy.
        #[arg(long, default_value_t = 2)]
        workers: usize,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        lambda: Option<f64>,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
        /// Re-verify the solution from scratch before writing.
        #[arg(long)]
        verify: bool,
    },
    /// Run the randomized oracle suite; exit 0 iff everything agrees.
    OracleVerify {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Seed; falls back to DIVCUT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        max_m: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Time strategies against the DivMBest baseline over a list of M.
    Bench {
        /// Instance file; omit to generate a grid.
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        rows: usize,
        #[arg(long, default_value_t = 128)]
        cols: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 6, 10])]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Export the min-cut network of an instance in DIMACS max-flow format.
    ExportDimacs {
        instance: PathBuf,
        /// Node-uniform gamma added to the label-1 cost.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve a DIMACS max-flow file and print the flow value in units.
    SolveDimacs { file: PathBuf },
}

#[derive(Subcommand)]
enum GenCommand {
    /// 4-connected grid with contrast-modulated Potts edges.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1.0)]
        unary_noise: f64,
        #[arg(long, default_value_t = 0.5)]
        potts: f64,
        #[arg(long)]
        contrast: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Scribble segmentation toy with planted ground truth.
    Scribble {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value = "disk")]
        shape: String,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Random submodular model (the oracle-suite distribution).
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.6)]
        edge_probability: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MeasureArgs {
    /// hamming | linear | power | custom (falls back to the instance file).
    #[arg(long)]
    measure: Option<String>,
    /// Exponent for the power measure.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Explicit delta values for a custom measure, comma separated.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Number of labelings M.
    #[arg(long)]
    m: Option<usize>,
}

impl MeasureArgs {
    fn spec(&self) -> Result<Option<MeasureSpec>, Error> {
        match self.measure.as_deref() {
            None => Ok(None),
            Some("hamming") => Ok(Some(MeasureSpec::Hamming)),
            Some("linear") => Ok(Some(MeasureSpec::Linear)),
            Some("power") => Ok(Some(MeasureSpec::Power(self.p))),
            Some("custom") => match &self.delta {
                Some(values) => Ok(Some(MeasureSpec::Custom(values.clone()))),
                None => Err(Error::InvalidInput("custom measure needs --delta".into())),
            },
            Some(other) => Err(Error::InvalidInput(format!("unknown measure `{other}`"))),
        }
    }

    /// Resolve without an instance file (for `gamma`).
    fn standalone(&self) -> Result<DiversityMeasure, Error> {
        let spec = self
            .spec()?
            .ok_or_else(|| Error::InvalidInput("--measure is required".into()))?;
        let m = match (&spec, self.m) {
            (MeasureSpec::Custom(values), None) => values.len() - 1,
            (_, Some(m)) => m,
            _ => return Err(Error::InvalidInput("--m is required".into())),
        };
        spec.to_measure(m)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Independent,
    Sequential,
    Parallel,
}

impl StrategyArg {
    fn to_strategy(self, workers: usize) -> Strategy {
        match self {
            StrategyArg::Independent => Strategy::Independent,
            StrategyArg::Sequential => Strategy::Sequential,
            StrategyArg::Parallel => Strategy::Parallel(workers),
        }
    }
}

fn seed_or_env(seed: Option<u64>) -> u64 {
    seed.or_else(|| std::env::var("DIVCUT_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}: {err}", err.code());
            ExitCode::from(match err.code() {
                "E_INVALID_INPUT" | "E_DIMENSION" | "E_PARSE" => 2u8,
                "E_NOT_SUBMODULAR" | "E_NOT_CONCAVE" | "E_BAD_LAMBDA" => 3,
                "E_BUDGET" => 4,
                "E_IO" => 5,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen { what } => gen(what),
        Command::Check { instance, measure } => check(&instance, &measure),
        Command::Gamma { measure, lambda, scale } => gamma(&measure, lambda, scale),
        Command::Solve { instance, strategy, workers, measure, lambda, out, verify } => {
            solve(&instance, strategy.to_strategy(workers), &measure, lambda, &out, verify)
        }
        Command::OracleVerify { instances, seed, max_nodes, max_m, budget } => {
            oracle_verify(instances, seed_or_env(seed), max_nodes, max_m, budget)
        }
        Command::Bench {
            instance,
            rows,
            cols,
            m_list,
            lambda,
            warmup,
            repeats,
            workers,
            seed,
            out,
        } => bench(
            instance.as_deref(),
            rows,
            cols,
            &m_list,
            lambda,
            warmup,
            repeats,
            workers,
            seed_or_env(seed),
            &out,
        ),
        Command::ExportDimacs { instance, gamma, out } => export_dimacs(&instance, gamma, &out),
        Command::SolveDimacs { file } => solve_dimacs(&file),
    }
}

fn gen(what: GenCommand) -> Result<ExitCode, Error> {
    match what {
        GenCommand::Grid { rows, cols, unary_noise, potts, contrast, seed, out } => {
            let instance =
                generate_grid(rows, cols, unary_noise, potts, contrast, seed_or_env(seed))?;
            instance.write(&out)?;
            println!("wrote {} ({} nodes)", out.display(), instance.model.node_count());
        }
        GenCommand::Scribble { rows, cols, shape, noise, seed, out } => {
            let shape: BlobShape = shape.parse()?;
            let toy = generate_scribble_toy(rows, cols, shape, noise, seed_or_env(seed))?;
            toy.instance.write(&out)?;
            println!(
                "wrote {} ({} nodes, {} scribbles)",
                out.display(),
                toy.instance.model.node_count(),
                toy.scribbles.len()
            );
        }
        GenCommand::Random { nodes, edge_probability, seed, out } => {
            let model =
                random_submodular_model(seed_or_env(seed), nodes, edge_probability, Scale::default());
            Instance::from_model(model).write(&out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn check(path: &Path, measure_args: &MeasureArgs) -> Result<ExitCode, Error> {
    let instance = Instance::read(path)?;
    let cert = instance.model.check_submodular();
    println!(
        "submodular {} worst-margin {}{}",
        cert.is_submodular,
        cert.worst_margin(),
        cert.worst_edge.map(|e| format!(" worst-edge {e}")).unwrap_or_default()
    );
    let mut ok = cert.is_submodular;
    let spec = measure_args.spec()?;
    if spec.is_some() || instance.measure.is_some() {
        let measure = instance.resolve_measure(spec.as_ref(), measure_args.m)?;
        let concave = measure.check_concave(instance.model.scale().epsilon());
        match concave.violating_pair {
            Some((i, j)) => println!("concave false violating-pair {i} {j}"),
            None => println!("concave true"),
        }
        ok &= concave.is_concave;
    }
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn gamma(measure_args: &MeasureArgs, lambda: f64, scale: i64) -> Result<ExitCode, Error> {
    let measure = measure_args.standalone()?;
    let schedule = GammaSchedule::new(&measure, lambda, Scale::new(scale))?;
    let parts: Vec<String> = schedule.gammas_real().iter().map(|g| g.to_string()).collect();
    println!("{}", parts.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn solve(
    path: &Path,
    strategy: Strategy,
    measure_args: &MeasureArgs,
    lambda_flag: Option<f64>,
    out_dir: &Path,
    verify: bool,
) -> Result<ExitCode, Error> {
    let instance = Instance::read(path)?;
    let measure = instance.resolve_measure(measure_args.spec()?.as_ref(), measure_args.m)?;
    let lambda = lambda_flag
        .or(instance.lambda)
        .ok_or_else(|| Error::InvalidInput("no lambda given (flag or instance file)".into()))?;

    let solution = solve_joint(&instance.model, &measure, lambda, strategy)?;
    if verify {
        let report = verify_solution(&instance.model, &measure, lambda, &solution)?;
        if !report.nested || !report.all_levels_optimal() {
            return Err(Error::InvalidInput("verification failed".into()));
        }
    }

    std::fs::create_dir_all(out_dir)?;
    let tag = strategy_tag(strategy);
    std::fs::write(
        out_dir.join(format!("labelings-{tag}.txt")),
        labelings_to_text(&solution.tuple, instance.grid),
    )?;
    if let Some((rows, cols)) = instance.grid {
        std::fs::write(
            out_dir.join(format!("solution-{tag}.pgm")),
            zero_count_pgm(&solution.tuple, rows, cols)?,
        )?;
    }
    let report = RunReport {
        instance: path.display().to_string(),
        node_count: instance.model.node_count(),
        edge_count: instance.model.edge_count(),
        m_count: measure.m_count(),
        lambda,
        measure: measure.kind().to_string(),
        runs: vec![StrategyReport::from_solution(&solution, instance.ground_truth.as_ref())?],
    };
    std::fs::write(out_dir.join(format!("report-{tag}.txt")), report.to_text())?;
    println!(
        "objective {} units {} nested {}",
        solution.joint_objective(),
        solution.joint_objective_units,
        solution.tuple.is_nested()
    );
    Ok(ExitCode::SUCCESS)
}

fn strategy_tag(strategy: Strategy) -> String {
    match strategy {
        Strategy::Independent => "independent".into(),
        Strategy::Sequential => "sequential".into(),
        Strategy::Parallel(_) => "parallel".into(),
    }
}

fn oracle_verify(
    instances: usize,
    seed: u64,
    max_nodes: usize,
    max_m: usize,
    budget: u128,
) -> Result<ExitCode, Error> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [0.1, 1.0, 10.0];
    let mut failures = 0usize;

    for round in 0..instances {
        let n = rng.random_range(1..=max_nodes.max(1));
        let model_seed = rng.random::<u64>();
        let model = random_submodular_model(model_seed, n, 0.6, Scale::default());
        let m_count = rng.random_range(1..=max_m.max(1));
        let measure = if rng.random_bool(0.5) {
            DiversityMeasure::hamming(m_count)
        } else {
            DiversityMeasure::power(m_count, [1.0, 2.0, 3.0][rng.random_range(0..3)])?
        };
        let lambda = lambdas[rng.random_range(0..3)];

        let mut fail = |what: &str| {
            failures += 1;
            eprintln!("FAIL round {round} ({what}): seed {seed}, model seed {model_seed}");
            eprintln!("measure {} M {m_count} lambda {lambda}", measure.kind());
            eprintln!("{}", Instance::from_model(model.clone()).to_text());
        };

        let sol = solve_joint(&model, &measure, lambda, Strategy::Independent)?;
        let brute = brute_force_joint(&model, &measure, lambda, budget, false)?;
        if sol.joint_objective_units != brute.objective_units {
            fail("solver vs brute force");
            continue;
        }
        if !sol.tuple.is_nested() {
            fail("nestedness");
            continue;
        }
        let multi = brute_force_multilabel(&model, &measure, lambda, budget)?;
        if multi.objective_units != brute.objective_units {
            fail("multilabel oracle");
            continue;
        }
        if measure.kind() == divcut::MeasureKind::Hamming {
            let schedule = GammaSchedule::new(&measure, lambda, model.scale())?;
            let greedy = divmbest_greedy(&model, &measure, lambda)?;
            let greedy_obj = joint_objective_units(&model, &schedule, &greedy.tuple)?;
            if greedy_obj < brute.objective_units {
                fail("divmbest below optimum");
                continue;
            }
        }
    }

    // Set-function oracle families for the join and decoupling checks.
    let family_rounds = instances / 2;
    for round in 0..family_rounds {
        let n = rng.random_range(1..=4);
        let model_seed = rng.random::<u64>();
        let base = random_submodular_model(model_seed, n, 0.7, Scale::new(1));
        let energy = SubmodularOracle::from_model(&base)?;
        let antitone = {
            let coeffs: Vec<i64> = (0..n).map(|_| -rng.random_range(0..=4)).collect();
            let values = (0u64..1 << n)
                .map(|mask| {
                    (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| coeffs[v]).sum::<i64>()
                })
                .collect();
            AntitoneOracle::new(n, values)?
        };
        if !check_join_preserves_optimality(&energy, &antitone)? {
            failures += 1;
            eprintln!("FAIL join-lemma round {round}: seed {seed}, model seed {model_seed}");
            continue;
        }
        let m_count = rng.random_range(1..=max_m.max(1));
        let sched = GammaSchedule::new(&DiversityMeasure::hamming(m_count), 2.0, Scale::new(1))?;
        let levels: Vec<SubmodularOracle> = (0..m_count)
            .map(|level| {
                let g = sched.gamma_units(level);
                let values = (0u64..1 << n)
                    .map(|mask| energy.value(mask) + g * mask.count_ones() as i64)
                    .collect();
                SubmodularOracle::new(n, values)
            })
            .collect::<Result<_, _>>()?;
        let report = check_threshold_decoupling(&levels)?;
        if !report.differences_antitone
            || report.decoupling_holds != Some(true)
            || report.highest_minimizers_nested != Some(true)
        {
            failures += 1;
            eprintln!("FAIL decoupling round {round}: seed {seed}, model seed {model_seed}");
        }
    }

    if failures == 0 {
        println!("oracle-verify pass: {instances} joint rounds, {family_rounds} family rounds");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("oracle-verify FAILED: {failures} failures");
        Ok(ExitCode::FAILURE)
    }
}

#[allow(clippy::too_many_arguments)]
fn bench(
    instance: Option<&Path>,
    rows: usize,
    cols: usize,
    m_list: &[usize],
    lambda: f64,
    warmup: usize,
    repeats: usize,
    workers: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<ExitCode, Error> {
    let instance = match instance {
        Some(path) => Instance::read(path)?,
        None => generate_grid(rows, cols, 1.0, 0.5, true, seed)?,
    };
    let model = &instance.model;
    let truth = instance.ground_truth.as_ref();
    let mut report = BenchReport::default();

    type MethodRun<'a> = Box<dyn Fn() -> Result<(i64, divcut::LabelingTuple), Error> + 'a>;
    for &m_count in m_list {
        let measure = DiversityMeasure::hamming(m_count);
        let schedule = GammaSchedule::new(&measure, lambda, model.scale())?;
        let methods: Vec<(String, MethodRun)> = vec![
            (
                "parametric-sequential".into(),
                Box::new(|| {
                    let sol = solve_joint(model, &measure, lambda, Strategy::Sequential)?;
                    Ok((sol.joint_objective_units, sol.tuple))
                }),
            ),
            (
                format!("parametric-parallel({workers})"),
                Box::new(|| {
                    let sol = solve_joint(model, &measure, lambda, Strategy::Parallel(workers))?;
                    Ok((sol.joint_objective_units, sol.tuple))
                }),
            ),
            (
                "divmbest".into(),
                Box::new(|| {
                    let greedy = divmbest_greedy(model, &measure, lambda)?;
                    let objective = joint_objective_units(model, &schedule, &greedy.tuple)?;
                    Ok((objective, greedy.tuple))
                }),
            ),
        ];
        for (name, run) in &methods {
            for _ in 0..warmup {
                run()?;
            }
            for repeat in 0..repeats {
                let t = std::time::Instant::now();
                let (objective, tuple) = run()?;
                let total_ms = t.elapsed().as_secs_f64() * 1e3;
                let metrics = match truth {
                    Some(gt) => Some(divcut::report::compute_metrics(&tuple, gt)?),
                    None => None,
                };
                report.samples.push(BenchSample {
                    method: name.clone(),
                    m_count,
                    repeat,
                    total_ms,
                    joint_objective_units: objective,
                    best_accuracy: metrics.as_ref().map(|m| m.best_accuracy),
                    best_iou: metrics.as_ref().map(|m| m.best_iou),
                });
            }
        }
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("bench-samples.tsv"), report.samples_text())?;
    std::fs::write(out_dir.join("bench-summary.tsv"), report.summary_text())?;
    print!("{}", report.summary_text());
    if let Some(metrics) = report.metrics_text() {
        std::fs::write(out_dir.join("bench-metrics.tsv"), &metrics)?;
        print!("{metrics}");
    }
    Ok(ExitCode::SUCCESS)
}

fn export_dimacs(path: &Path, gamma: f64, out: &Path) -> Result<ExitCode, Error> {
    let instance = Instance::read(path)?;
    let gamma_units = instance.model.scale().to_units(gamma);
    let map = divcut::ReductionMap::build(
        &instance.model,
        &vec![gamma_units; instance.model.node_count()],
    )?;
    std::fs::write(out, divcut::maxflow::write_dimacs(map.spec()))?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn solve_dimacs(path: &Path) -> Result<ExitCode, Error> {
    let spec = divcut::maxflow::read_dimacs(&std::fs::read_to_string(path)?)?;
    let cut = spec.build().solve();
    println!("flow {}", cut.flow_units);
    Ok(ExitCode::SUCCESS)
}
