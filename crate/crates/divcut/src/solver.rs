//! Exact joint solver for the diverse-M-best objective
//! `sum_m E(y^m) - lambda * Delta^M({y})`.
//!
//! With a concave node-wise measure the problem decouples: level `m` is the
//! perturbed master problem `E(y) + gamma^m * sum_v y_v`, solved by one
//! min-cut, taking the highest minimizer. The three strategies differ only
//! in scheduling:
//!
//! * independent — one cold solve per level;
//! * sequential  — one network, reparameterized level to level, reusing the
//!   flow and fixing every node already labeled 1 (nestedness makes the fix
//!   lossless);
//! * parallel    — contiguous groups of levels, one worker per group, warm
//!   starts inside each group.
//!
//! All strategies return bitwise-identical tuples.

use std::time::{Duration, Instant};

use crate::diversity::{DiversityMeasure, GammaSchedule};
use crate::energy::{EnergyModel, Labeling, LabelingTuple};
use crate::error::{Error, Result};
use crate::reduction::{ReductionMap, Which};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Independent,
    Sequential,
    Parallel(usize),
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Independent => write!(f, "independent"),
            Strategy::Sequential => write!(f, "sequential"),
            Strategy::Parallel(p) => write!(f, "parallel({p})"),
        }
    }
}

/// A solved instance: the nested tuple plus everything needed to audit it.
#[derive(Debug, Clone)]
pub struct DiverseSolution {
    pub tuple: LabelingTuple,
    /// Master energy `E(y^m)` per level, in units.
    pub per_labeling_energy_units: Vec<i64>,
    /// Quantized `lambda * Delta^M({y})` in units.
    pub scaled_diversity_units: i64,
    /// `sum_m E(y^m) - lambda * Delta^M({y})` in units.
    pub joint_objective_units: i64,
    pub schedule: GammaSchedule,
    pub strategy: Strategy,
    /// Free (unfixed) node count entering each level solve.
    pub level_free_nodes: Vec<usize>,
    pub level_durations: Vec<Duration>,
    pub total_duration: Duration,
}

impl DiverseSolution {
    pub fn per_labeling_energies(&self) -> Vec<f64> {
        self.per_labeling_energy_units
            .iter()
            .map(|&e| self.schedule.scale().to_real(e))
            .collect()
    }

    /// Diversity value `Delta^M({y})` recovered from the quantized scaled
    /// diversity.
    pub fn diversity_value(&self) -> f64 {
        self.schedule.scale().to_real(self.scaled_diversity_units) / self.schedule.lambda()
    }

    pub fn joint_objective(&self) -> f64 {
        self.schedule.scale().to_real(self.joint_objective_units)
    }
}

/// Solve the joint problem for a concave measure with the given strategy.
pub fn solve_joint(
    model: &EnergyModel,
    measure: &DiversityMeasure,
    lambda: f64,
    strategy: Strategy,
) -> Result<DiverseSolution> {
    let schedule = GammaSchedule::new(measure, lambda, model.scale())?;
    solve_with_schedule(model, &schedule, strategy)
}

/// Solve for an explicit schedule.
pub fn solve_with_schedule(
    model: &EnergyModel,
    schedule: &GammaSchedule,
    strategy: Strategy,
) -> Result<DiverseSolution> {
    model.require_submodular()?;
    let start = Instant::now();
    let (labelings, level_durations, level_free_nodes) = match strategy {
        Strategy::Independent => run_independent(model, schedule)?,
        Strategy::Sequential => run_sequential(model, schedule)?,
        Strategy::Parallel(workers) => run_parallel(model, schedule, workers)?,
    };
    let total_duration = start.elapsed();
    assemble(
        model,
        schedule,
        strategy,
        labelings,
        level_durations,
        level_free_nodes,
        total_duration,
    )
}

/// One cold solve per level.
pub fn solve_independent(model: &EnergyModel, schedule: &GammaSchedule) -> Result<DiverseSolution> {
    solve_with_schedule(model, schedule, Strategy::Independent)
}

/// Warm-started sweep with node fixing.
pub fn solve_sequential(model: &EnergyModel, schedule: &GammaSchedule) -> Result<DiverseSolution> {
    solve_with_schedule(model, schedule, Strategy::Sequential)
}

/// `workers` groups of contiguous levels, warm-started within each group.
pub fn solve_parallel(
    model: &EnergyModel,
    schedule: &GammaSchedule,
    workers: usize,
) -> Result<DiverseSolution> {
    solve_with_schedule(model, schedule, Strategy::Parallel(workers))
}

type LevelRuns = (Vec<Labeling>, Vec<Duration>, Vec<usize>);

fn run_independent(model: &EnergyModel, schedule: &GammaSchedule) -> Result<LevelRuns> {
    let n = model.node_count();
    let mut labelings = Vec::with_capacity(schedule.m_count());
    let mut durations = Vec::with_capacity(schedule.m_count());
    for level in 0..schedule.m_count() {
        let t = Instant::now();
        let gamma = vec![schedule.gamma_units(level); n];
        let mut map = ReductionMap::build(model, &gamma)?;
        let (y, _) = map.solve(Which::Highest)?;
        durations.push(t.elapsed());
        labelings.push(y);
    }
    let free = vec![n; schedule.m_count()];
    Ok((labelings, durations, free))
}

fn run_sequential(model: &EnergyModel, schedule: &GammaSchedule) -> Result<LevelRuns> {
    let n = model.node_count();
    let m_count = schedule.m_count();
    let mut labelings: Vec<Labeling> = Vec::with_capacity(m_count);
    let mut durations = Vec::with_capacity(m_count);
    let mut free_nodes = Vec::with_capacity(m_count);
    let mut fixed = vec![false; n];

    let t = Instant::now();
    let mut map = ReductionMap::build(model, &vec![schedule.gamma_units(0); n])?;
    let (y, _) = map.solve(Which::Highest)?;
    durations.push(t.elapsed());
    free_nodes.push(n);
    labelings.push(y);

    for level in 1..m_count {
        let t = Instant::now();
        // Nestedness: once a node takes label 1 it keeps it on every later
        // level, so it can be clamped before the next solve.
        let prev = labelings[level - 1].clone();
        for v in 0..n {
            if prev.get(v) && !fixed[v] {
                map.network().fix_node(v, true)?;
                fixed[v] = true;
            }
        }
        map.shift_gamma_uniform(schedule.gamma_units(level) - schedule.gamma_units(level - 1))?;
        let (y, _) = map.solve(Which::Highest)?;
        durations.push(t.elapsed());
        free_nodes.push(n - fixed.iter().filter(|&&f| f).count());
        labelings.push(y);
    }
    Ok((labelings, durations, free_nodes))
}

fn run_parallel(model: &EnergyModel, schedule: &GammaSchedule, workers: usize) -> Result<LevelRuns> {
    if workers == 0 {
        return Err(Error::InvalidInput("parallel strategy needs at least one worker".into()));
    }
    let m_count = schedule.m_count();
    let n = model.node_count();
    let groups = contiguous_groups(m_count, workers);

    let mut results: Vec<Option<(Labeling, Duration)>> = vec![None; m_count];
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for group in &groups {
            if group.is_empty() {
                continue;
            }
            let group = group.clone();
            handles.push(scope.spawn(move || -> Result<Vec<(usize, Labeling, Duration)>> {
                let mut out = Vec::with_capacity(group.len());
                let first = group.start;
                let t = Instant::now();
                let mut map = ReductionMap::build(model, &vec![schedule.gamma_units(first); n])?;
                let (y, _) = map.solve(Which::Highest)?;
                out.push((first, y, t.elapsed()));
                for level in group.skip(1) {
                    let t = Instant::now();
                    map.shift_gamma_uniform(
                        schedule.gamma_units(level) - schedule.gamma_units(level - 1),
                    )?;
                    let (y, _) = map.solve(Which::Highest)?;
                    out.push((level, y, t.elapsed()));
                }
                Ok(out)
            }));
        }
        for handle in handles {
            let worker_result = handle.join().expect("solver worker panicked")?;
            for (level, y, d) in worker_result {
                results[level] = Some((y, d));
            }
        }
        Ok(())
    })?;

    let mut labelings = Vec::with_capacity(m_count);
    let mut durations = Vec::with_capacity(m_count);
    for slot in results {
        let (y, d) = slot.expect("missing level result");
        labelings.push(y);
        durations.push(d);
    }
    Ok((labelings, durations, vec![n; m_count]))
}

/// Split `0..m_count` into `workers` contiguous ranges, sizes as equal as
/// possible, earlier groups taking the remainder.
fn contiguous_groups(m_count: usize, workers: usize) -> Vec<std::ops::Range<usize>> {
    let base = m_count / workers;
    let rem = m_count % workers;
    let mut groups = Vec::with_capacity(workers);
    let mut start = 0;
    for g in 0..workers {
        let len = base + usize::from(g < rem);
        groups.push(start..start + len);
        start += len;
    }
    groups
}

fn assemble(
    model: &EnergyModel,
    schedule: &GammaSchedule,
    strategy: Strategy,
    labelings: Vec<Labeling>,
    level_durations: Vec<Duration>,
    level_free_nodes: Vec<usize>,
    total_duration: Duration,
) -> Result<DiverseSolution> {
    let tuple = LabelingTuple::new(labelings)?;
    let per_labeling_energy_units: Vec<i64> = tuple
        .labelings()
        .iter()
        .map(|y| model.evaluate_units(y))
        .collect::<Result<_>>()?;
    let scaled_diversity_units = schedule.tuple_scaled_diversity_units(&tuple)?;
    let joint_objective_units =
        per_labeling_energy_units.iter().sum::<i64>() - scaled_diversity_units;
    Ok(DiverseSolution {
        tuple,
        per_labeling_energy_units,
        scaled_diversity_units,
        joint_objective_units,
        schedule: schedule.clone(),
        strategy,
        level_free_nodes,
        level_durations,
        total_duration,
    })
}

/// Joint objective of an arbitrary tuple under the schedule's quantization,
/// in units. This is the quantity all solvers and oracles optimize.
pub fn joint_objective_units(
    model: &EnergyModel,
    schedule: &GammaSchedule,
    tuple: &LabelingTuple,
) -> Result<i64> {
    let energies: i64 = tuple
        .labelings()
        .iter()
        .map(|y| model.evaluate_units(y))
        .sum::<Result<i64>>()?;
    Ok(energies - schedule.tuple_scaled_diversity_units(tuple)?)
}

/// Restore nestedness of per-level minimizers by the join sweep
/// `y^{m+1} <- y^{m+1} v y^m`. Total; when each input labeling minimizes its
/// own perturbed objective the outputs still do.
pub fn repair_nestedness(tuple: &LabelingTuple) -> LabelingTuple {
    let mut repaired: Vec<Labeling> = Vec::with_capacity(tuple.len());
    for y in tuple.labelings() {
        let next = match repaired.last() {
            Some(prev) => y.join(prev),
            None => y.clone(),
        };
        repaired.push(next);
    }
    LabelingTuple::new(repaired).expect("repair preserves tuple shape")
}

/// Everything `verify_tuple` recomputes from scratch about a candidate tuple.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub joint_objective_units: i64,
    pub joint_objective: f64,
    pub nested: bool,
    /// Per level: does the labeling's perturbed energy match a fresh
    /// independent solve of that level?
    pub per_level_optimal: Vec<bool>,
}

impl VerificationReport {
    pub fn all_levels_optimal(&self) -> bool {
        self.per_level_optimal.iter().all(|&ok| ok)
    }
}

/// Recompute objective, nestedness and per-level optimality of any tuple.
pub fn verify_tuple(
    model: &EnergyModel,
    measure: &DiversityMeasure,
    lambda: f64,
    tuple: &LabelingTuple,
) -> Result<VerificationReport> {
    let schedule = GammaSchedule::new(measure, lambda, model.scale())?;
    let objective = joint_objective_units(model, &schedule, tuple)?;
    let mut per_level_optimal = Vec::with_capacity(tuple.len());
    for level in 0..tuple.len() {
        let gamma = vec![schedule.gamma_units(level); model.node_count()];
        let perturbed = model.evaluate_perturbed_units(tuple.get(level), &gamma)?;
        let (_, best) = crate::reduction::minimize(model, &gamma, Which::Highest)?;
        per_level_optimal.push(perturbed == best);
    }
    Ok(VerificationReport {
        joint_objective_units: objective,
        joint_objective: model.scale().to_real(objective),
        nested: tuple.is_nested(),
        per_level_optimal,
    })
}

/// Verify a solution object: recomputation plus consistency with the stored
/// objective.
pub fn verify_solution(
    model: &EnergyModel,
    measure: &DiversityMeasure,
    lambda: f64,
    solution: &DiverseSolution,
) -> Result<VerificationReport> {
    let report = verify_tuple(model, measure, lambda, &solution.tuple)?;
    if report.joint_objective_units != solution.joint_objective_units {
        return Err(Error::InvalidInput(format!(
            "stored objective {} disagrees with recomputed {}",
            solution.joint_objective_units, report.joint_objective_units
        )));
    }
    Ok(report)
}
