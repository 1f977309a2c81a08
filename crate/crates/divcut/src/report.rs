//! Run reports and segmentation-style quality metrics.
//!
//! Reports are plain structured text; every number in them recomputes from
//! the emitted labeling files, there is no hidden state.

use crate::energy::{Labeling, LabelingTuple};
use crate::error::{Error, Result};
use crate::solver::DiverseSolution;

/// Fraction of nodes where `pred` agrees with `truth`.
pub fn pixel_accuracy(pred: &Labeling, truth: &Labeling) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if pred.is_empty() {
        return Ok(1.0);
    }
    Ok(1.0 - pred.hamming(truth) as f64 / pred.len() as f64)
}

/// Foreground intersection-over-union; 1.0 when both masks are empty.
pub fn intersection_over_union(pred: &Labeling, truth: &Labeling) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for v in 0..pred.len() {
        let p = pred.get(v);
        let t = truth.get(v);
        inter += (p && t) as usize;
        union += (p || t) as usize;
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Best value of `metric` over the M labelings, with the achieving level.
pub fn best_of_m(
    tuple: &LabelingTuple,
    truth: &Labeling,
    metric: fn(&Labeling, &Labeling) -> Result<f64>,
) -> Result<(f64, usize)> {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (m, y) in tuple.labelings().iter().enumerate() {
        let value = metric(y, truth)?;
        if value > best {
            best = value;
            arg = m;
        }
    }
    Ok((best, arg))
}

/// Quality of one solution tuple against a ground truth.
#[derive(Debug, Clone)]
pub struct Metrics {
    pub per_level_accuracy: Vec<f64>,
    pub per_level_iou: Vec<f64>,
    pub best_accuracy: f64,
    pub best_accuracy_level: usize,
    pub best_iou: f64,
    pub best_iou_level: usize,
}

pub fn compute_metrics(tuple: &LabelingTuple, truth: &Labeling) -> Result<Metrics> {
    let per_level_accuracy = tuple
        .labelings()
        .iter()
        .map(|y| pixel_accuracy(y, truth))
        .collect::<Result<Vec<_>>>()?;
    let per_level_iou = tuple
        .labelings()
        .iter()
        .map(|y| intersection_over_union(y, truth))
        .collect::<Result<Vec<_>>>()?;
    let (best_accuracy, best_accuracy_level) = best_of_m(tuple, truth, pixel_accuracy)?;
    let (best_iou, best_iou_level) = best_of_m(tuple, truth, intersection_over_union)?;
    Ok(Metrics {
        per_level_accuracy,
        per_level_iou,
        best_accuracy,
        best_accuracy_level,
        best_iou,
        best_iou_level,
    })
}

/// Report for one strategy run on one instance.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    pub strategy: String,
    pub joint_objective_units: i64,
    pub joint_objective: f64,
    pub per_level_energies: Vec<f64>,
    pub diversity_value: f64,
    pub level_times_ms: Vec<f64>,
    pub total_time_ms: f64,
    pub level_free_nodes: Vec<usize>,
    pub metrics: Option<Metrics>,
}

impl StrategyReport {
    pub fn from_solution(sol: &DiverseSolution, truth: Option<&Labeling>) -> Result<Self> {
        let metrics = match truth {
            Some(t) => Some(compute_metrics(&sol.tuple, t)?),
            None => None,
        };
        Ok(StrategyReport {
            strategy: sol.strategy.to_string(),
            joint_objective_units: sol.joint_objective_units,
            joint_objective: sol.joint_objective(),
            per_level_energies: sol.per_labeling_energies(),
            diversity_value: sol.diversity_value(),
            level_times_ms: sol
                .level_durations
                .iter()
                .map(|d| d.as_secs_f64() * 1e3)
                .collect(),
            total_time_ms: sol.total_duration.as_secs_f64() * 1e3,
            level_free_nodes: sol.level_free_nodes.clone(),
            metrics,
        })
    }
}

/// Whole-run report: instance header plus one block per strategy.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub instance: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub m_count: usize,
    pub lambda: f64,
    pub measure: String,
    pub runs: Vec<StrategyReport>,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("divcut report 1\n");
        out.push_str(&format!("instance {}\n", self.instance));
        out.push_str(&format!(
            "nodes {} edges {} m {} lambda {} measure {}\n",
            self.node_count, self.edge_count, self.m_count, self.lambda, self.measure
        ));
        for run in &self.runs {
            out.push_str(&format!("strategy {}\n", run.strategy));
            out.push_str(&format!(
                "objective {} units {}\n",
                run.joint_objective, run.joint_objective_units
            ));
            out.push_str(&format!("energies {}\n", join_floats(&run.per_level_energies)));
            out.push_str(&format!("diversity {}\n", run.diversity_value));
            out.push_str(&format!(
                "times-ms {} total {}\n",
                join_floats(&run.level_times_ms),
                run.total_time_ms
            ));
            out.push_str(&format!(
                "free-nodes {}\n",
                run.level_free_nodes
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            if let Some(m) = &run.metrics {
                out.push_str(&format!(
                    "metric accuracy-best {} level {}\n",
                    m.best_accuracy, m.best_accuracy_level
                ));
                out.push_str(&format!(
                    "metric iou-best {} level {}\n",
                    m.best_iou, m.best_iou_level
                ));
                out.push_str(&format!(
                    "metric accuracy-per-level {}\n",
                    join_floats(&m.per_level_accuracy)
                ));
                out.push_str(&format!("metric iou-per-level {}\n", join_floats(&m.per_level_iou)));
            }
        }
        out.push_str("end\n");
        out
    }
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// One timing sample of a bench run.
#[derive(Debug, Clone)]
pub struct BenchSample {
    pub method: String,
    pub m_count: usize,
    pub repeat: usize,
    pub total_ms: f64,
    pub joint_objective_units: i64,
    /// Best-of-M accuracy/IoU against a ground truth, when one exists.
    pub best_accuracy: Option<f64>,
    pub best_iou: Option<f64>,
}

/// Raw samples plus a per-(method, M) summary table, both in plot-ready
/// tab-separated text.
#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub samples: Vec<BenchSample>,
}

impl BenchReport {
    pub fn samples_text(&self) -> String {
        let mut out =
            String::from("method\tm\trepeat\ttotal_ms\tobjective_units\tbest_accuracy\tbest_iou\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        for s in &self.samples {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                s.method,
                s.m_count,
                s.repeat,
                s.total_ms,
                s.joint_objective_units,
                opt(s.best_accuracy),
                opt(s.best_iou)
            ));
        }
        out
    }

    /// Best-of-M accuracy per (method, M); None when no sample carries
    /// metrics. Accuracy is deterministic per (method, M) so the first
    /// sample wins.
    pub fn metrics_text(&self) -> Option<String> {
        if self.samples.iter().all(|s| s.best_accuracy.is_none()) {
            return None;
        }
        let mut methods: Vec<String> = Vec::new();
        let mut ms: Vec<usize> = Vec::new();
        for s in &self.samples {
            if !methods.contains(&s.method) {
                methods.push(s.method.clone());
            }
            if !ms.contains(&s.m_count) {
                ms.push(s.m_count);
            }
        }
        ms.sort_unstable();
        let mut out = String::from("method");
        for m in &ms {
            out.push_str(&format!("\tbest_accuracy(M={m})\tbest_iou(M={m})"));
        }
        out.push('\n');
        for method in &methods {
            out.push_str(method);
            for &m in &ms {
                let sample = self
                    .samples
                    .iter()
                    .find(|s| &s.method == method && s.m_count == m);
                match sample.and_then(|s| s.best_accuracy.zip(s.best_iou)) {
                    Some((acc, iou)) => out.push_str(&format!("\t{acc}\t{iou}")),
                    None => out.push_str("\t-\t-"),
                }
            }
            out.push('\n');
        }
        Some(out)
    }

    /// Median wall time per (method, M), methods in first-seen order.
    pub fn summary_text(&self) -> String {
        let mut methods: Vec<String> = Vec::new();
        let mut ms: Vec<usize> = Vec::new();
        for s in &self.samples {
            if !methods.contains(&s.method) {
                methods.push(s.method.clone());
            }
            if !ms.contains(&s.m_count) {
                ms.push(s.m_count);
            }
        }
        ms.sort_unstable();
        let mut out = String::from("method");
        for m in &ms {
            out.push_str(&format!("\ttime_ms(M={m})"));
        }
        out.push('\n');
        for method in &methods {
            out.push_str(method);
            for &m in &ms {
                let mut times: Vec<f64> = self
                    .samples
                    .iter()
                    .filter(|s| &s.method == method && s.m_count == m)
                    .map(|s| s.total_ms)
                    .collect();
                if times.is_empty() {
                    out.push_str("\t-");
                } else {
                    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    out.push_str(&format!("\t{}", times[times.len() / 2]));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(bits: &[u8]) -> Labeling {
        Labeling::new(bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn accuracy_and_iou() {
        let truth = lab(&[1, 1, 0, 0]);
        let pred = lab(&[1, 0, 0, 0]);
        assert_eq!(pixel_accuracy(&pred, &truth).unwrap(), 0.75);
        assert_eq!(intersection_over_union(&pred, &truth).unwrap(), 0.5);
        assert_eq!(intersection_over_union(&truth, &truth).unwrap(), 1.0);
        let empty = lab(&[0, 0, 0, 0]);
        assert_eq!(intersection_over_union(&empty, &empty).unwrap(), 1.0);
        assert!(pixel_accuracy(&lab(&[0]), &truth).is_err());
    }

    #[test]
    fn best_of_m_picks_argmax() {
        let truth = lab(&[1, 1, 0, 0]);
        let tuple = LabelingTuple::new(vec![
            lab(&[0, 0, 0, 0]),
            lab(&[1, 1, 0, 0]),
            lab(&[1, 1, 1, 1]),
        ])
        .unwrap();
        let (best, level) = best_of_m(&tuple, &truth, pixel_accuracy).unwrap();
        assert_eq!(best, 1.0);
        assert_eq!(level, 1);
    }

    #[test]
    fn best_of_m_at_least_map_metric_for_odd_hamming() {
        // For odd M with Hamming diversity the middle labeling is a MAP
        // labeling, so the best-of-M metric is at least the MAP metric.
        use crate::instance::{generate_scribble_toy, BlobShape};
        use crate::reduction::{minimize_uniform, Which};
        use crate::solver::{solve_joint, Strategy};
        for seed in [2, 9, 17] {
            let toy = generate_scribble_toy(7, 7, BlobShape::Disk, 0.45, seed).unwrap();
            let gt = toy.instance.ground_truth.clone().unwrap();
            let model = &toy.instance.model;
            for m_count in [3usize, 5] {
                let measure = crate::DiversityMeasure::hamming(m_count);
                let sol = solve_joint(model, &measure, 0.4, Strategy::Sequential).unwrap();
                let (map_labeling, _) = minimize_uniform(model, 0, Which::Highest).unwrap();
                let map_accuracy = pixel_accuracy(&map_labeling, &gt).unwrap();
                let (best, _) = best_of_m(&sol.tuple, &gt, pixel_accuracy).unwrap();
                assert!(best >= map_accuracy, "seed {seed} M {m_count}");
                let map_iou = intersection_over_union(&map_labeling, &gt).unwrap();
                let (best_iou, _) = best_of_m(&sol.tuple, &gt, intersection_over_union).unwrap();
                assert!(best_iou >= map_iou, "seed {seed} M {m_count}");
            }
        }
    }

    #[test]
    fn bench_summary_uses_median() {
        let report = BenchReport {
            samples: vec![
                BenchSample {
                    method: "sequential".into(),
                    m_count: 2,
                    repeat: 0,
                    total_ms: 5.0,
                    joint_objective_units: 0,
                    best_accuracy: None,
                    best_iou: None,
                },
                BenchSample {
                    method: "sequential".into(),
                    m_count: 2,
                    repeat: 1,
                    total_ms: 1.0,
                    joint_objective_units: 0,
                    best_accuracy: Some(0.75),
                    best_iou: Some(0.5),
                },
                BenchSample {
                    method: "sequential".into(),
                    m_count: 2,
                    repeat: 2,
                    total_ms: 2.0,
                    joint_objective_units: 0,
                    best_accuracy: None,
                    best_iou: None,
                },
            ],
        };
        let summary = report.summary_text();
        assert!(summary.contains("time_ms(M=2)"));
        assert!(summary.lines().nth(1).unwrap().ends_with("\t2"));
        // Metrics table appears as soon as any sample carries one.
        let metrics = report.metrics_text().unwrap();
        assert!(metrics.contains("best_accuracy(M=2)"));
    }
}
