//! Instance files, synthetic generators and labeling files.
//!
//! Instances are a line-oriented, versioned text format so that fixtures
//! diff cleanly and oracle counterexamples stay auditable:
//!
//! ```text
//! divcut instance 1
//! nodes <n>
//! edges <e>
//! grid <rows> <cols>          # optional
//! scale <units-per-one>       # optional, default 1000000
//! u <v> <theta0> <theta1>     # n lines
//! e <u> <v> <t00> <t01> <t10> <t11>
//! diversity hamming|linear|power <p>|custom <d0> <d1> ...
//! m <M>
//! lambda <value>
//! groundtruth <bit-string>
//! ```
//!
//! Trailer lines are optional. Costs are written back in their quantized
//! form with shortest round-trip float formatting, so
//! `write(read(write(x))) == write(x)` byte for byte.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::diversity::DiversityMeasure;
use crate::energy::{EnergyModel, Labeling, LabelingTuple};
use crate::error::{Error, Result};
use crate::fixed::Scale;

pub const INSTANCE_HEADER: &str = "divcut instance 1";
pub const LABELINGS_HEADER: &str = "divcut labelings 1";

/// Diversity selection as written in instance files.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Hamming,
    Linear,
    Power(f64),
    Custom(Vec<f64>),
}

impl MeasureSpec {
    pub fn to_measure(&self, m_count: usize) -> Result<DiversityMeasure> {
        match self {
            MeasureSpec::Hamming => Ok(DiversityMeasure::hamming(m_count)),
            MeasureSpec::Linear => Ok(DiversityMeasure::linear(m_count)),
            MeasureSpec::Power(p) => DiversityMeasure::power(m_count, *p),
            MeasureSpec::Custom(values) => {
                let measure = DiversityMeasure::custom(values.clone())?;
                if measure.m_count() != m_count {
                    return Err(Error::InvalidInput(format!(
                        "custom measure defines M = {}, requested M = {}",
                        measure.m_count(),
                        m_count
                    )));
                }
                Ok(measure)
            }
        }
    }
}

/// A parsed instance: the model plus optional solve parameters.
#[derive(Debug, Clone)]
pub struct Instance {
    pub model: EnergyModel,
    pub grid: Option<(usize, usize)>,
    pub measure: Option<MeasureSpec>,
    pub m_count: Option<usize>,
    pub lambda: Option<f64>,
    pub ground_truth: Option<Labeling>,
}

impl Instance {
    pub fn from_model(model: EnergyModel) -> Self {
        Instance {
            model,
            grid: None,
            measure: None,
            m_count: None,
            lambda: None,
            ground_truth: None,
        }
    }

    pub fn to_text(&self) -> String {
        let model = &self.model;
        let mut out = String::new();
        out.push_str(INSTANCE_HEADER);
        out.push('\n');
        out.push_str(&format!("nodes {}\n", model.node_count()));
        out.push_str(&format!("edges {}\n", model.edge_count()));
        if let Some((r, c)) = self.grid {
            out.push_str(&format!("grid {r} {c}\n"));
        }
        if model.scale() != Scale::default() {
            out.push_str(&format!("scale {}\n", model.scale().units_per_one()));
        }
        for v in 0..model.node_count() {
            let (c0, c1) = model.unary_real(v);
            out.push_str(&format!("u {v} {c0} {c1}\n"));
        }
        for (i, e) in model.edges().iter().enumerate() {
            let t = model.edge_table_real(i);
            out.push_str(&format!("e {} {} {} {} {} {}\n", e.u, e.v, t[0], t[1], t[2], t[3]));
        }
        match &self.measure {
            Some(MeasureSpec::Hamming) => out.push_str("diversity hamming\n"),
            Some(MeasureSpec::Linear) => out.push_str("diversity linear\n"),
            Some(MeasureSpec::Power(p)) => out.push_str(&format!("diversity power {p}\n")),
            Some(MeasureSpec::Custom(values)) => {
                out.push_str("diversity custom");
                for v in values {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
            None => {}
        }
        if let Some(m) = self.m_count {
            out.push_str(&format!("m {m}\n"));
        }
        if let Some(lambda) = self.lambda {
            out.push_str(&format!("lambda {lambda}\n"));
        }
        if let Some(gt) = &self.ground_truth {
            out.push_str(&format!("groundtruth {gt}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Instance> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: String| Error::Parse { line, message };

        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        if header.trim() != INSTANCE_HEADER {
            return Err(err(1, format!("expected header `{INSTANCE_HEADER}`")));
        }

        let mut node_count: Option<usize> = None;
        let mut edge_count: Option<usize> = None;
        let mut grid = None;
        let mut scale = Scale::default();
        let mut unary: Vec<(f64, f64)> = Vec::new();
        let mut edges: Vec<(usize, usize, [f64; 4])> = Vec::new();
        let mut measure = None;
        let mut m_count = None;
        let mut lambda = None;
        let mut ground_truth_bits: Option<(usize, String)> = None;

        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_num = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| err(line_no, format!("bad number `{s}`")))
            };
            let parse_usize = |s: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|_| err(line_no, format!("bad integer `{s}`")))
            };
            match fields[0] {
                "nodes" if fields.len() == 2 => node_count = Some(parse_usize(fields[1])?),
                "edges" if fields.len() == 2 => edge_count = Some(parse_usize(fields[1])?),
                "grid" if fields.len() == 3 => {
                    grid = Some((parse_usize(fields[1])?, parse_usize(fields[2])?))
                }
                "scale" if fields.len() == 2 => {
                    let units = fields[1]
                        .parse::<i64>()
                        .map_err(|_| err(line_no, format!("bad scale `{}`", fields[1])))?;
                    if units <= 0 {
                        return Err(err(line_no, "scale must be positive".into()));
                    }
                    scale = Scale::new(units);
                }
                "u" if fields.len() == 4 => {
                    let v = parse_usize(fields[1])?;
                    if v != unary.len() {
                        return Err(err(
                            line_no,
                            format!("unary lines must be in order; expected node {}", unary.len()),
                        ));
                    }
                    unary.push((parse_num(fields[2])?, parse_num(fields[3])?));
                }
                "e" if fields.len() == 7 => {
                    let u = parse_usize(fields[1])?;
                    let v = parse_usize(fields[2])?;
                    let mut table = [0.0; 4];
                    for (slot, f) in table.iter_mut().zip(&fields[3..7]) {
                        *slot = parse_num(f)?;
                    }
                    edges.push((u, v, table));
                }
                "diversity" if fields.len() >= 2 => {
                    measure = Some(match fields[1] {
                        "hamming" => MeasureSpec::Hamming,
                        "linear" => MeasureSpec::Linear,
                        "power" if fields.len() == 3 => MeasureSpec::Power(parse_num(fields[2])?),
                        "custom" if fields.len() >= 4 => MeasureSpec::Custom(
                            fields[2..].iter().map(|f| parse_num(f)).collect::<Result<_>>()?,
                        ),
                        other => {
                            return Err(err(line_no, format!("unknown diversity kind `{other}`")))
                        }
                    });
                }
                "m" if fields.len() == 2 => m_count = Some(parse_usize(fields[1])?),
                "lambda" if fields.len() == 2 => lambda = Some(parse_num(fields[1])?),
                "groundtruth" if fields.len() == 2 => {
                    ground_truth_bits = Some((line_no, fields[1].to_string()))
                }
                other => return Err(err(line_no, format!("unrecognized line `{other} ...`"))),
            }
        }

        let node_count = node_count.ok_or_else(|| err(0, "missing `nodes` section".into()))?;
        let edge_count = edge_count.ok_or_else(|| err(0, "missing `edges` section".into()))?;
        if unary.len() != node_count {
            return Err(err(
                0,
                format!("missing unary section: {} of {} `u` lines", unary.len(), node_count),
            ));
        }
        if edges.len() != edge_count {
            return Err(err(
                0,
                format!("missing edge section: {} of {} `e` lines", edges.len(), edge_count),
            ));
        }
        let model = EnergyModel::new(node_count, &unary, &edges, scale)?;
        let ground_truth = match ground_truth_bits {
            Some((line_no, bits)) => {
                if bits.len() != node_count || bits.chars().any(|c| c != '0' && c != '1') {
                    return Err(err(
                        line_no,
                        "groundtruth must be a bit string of length nodes".into(),
                    ));
                }
                Some(Labeling::new(bits.chars().map(|c| c == '1').collect()))
            }
            None => None,
        };
        if let (Some(MeasureSpec::Custom(values)), Some(m)) = (&measure, m_count) {
            if values.len() != m + 1 {
                return Err(err(
                    0,
                    format!("custom diversity has {} values but m is {m}", values.len()),
                ));
            }
        }
        Ok(Instance { model, grid, measure, m_count, lambda, ground_truth })
    }

    pub fn read(path: &Path) -> Result<Instance> {
        Instance::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }

    /// Resolve a measure from the file plus CLI-level overrides.
    pub fn resolve_measure(
        &self,
        override_spec: Option<&MeasureSpec>,
        override_m: Option<usize>,
    ) -> Result<DiversityMeasure> {
        let spec = override_spec
            .or(self.measure.as_ref())
            .ok_or_else(|| Error::InvalidInput("no diversity measure given".into()))?;
        let m_count = match (override_m, self.m_count, spec) {
            (Some(m), _, _) | (None, Some(m), _) => m,
            (None, None, MeasureSpec::Custom(values)) => values.len() - 1,
            _ => return Err(Error::InvalidInput("no M given".into())),
        };
        if m_count == 0 {
            return Err(Error::InvalidInput("M must be at least 1".into()));
        }
        spec.to_measure(m_count)
    }
}

/// 4-connected grid with noisy unaries and (optionally contrast-modulated)
/// Potts edges; submodular by construction, deterministic per seed.
pub fn generate_grid(
    rows: usize,
    cols: usize,
    unary_noise: f64,
    potts_strength: f64,
    contrast: bool,
    seed: u64,
) -> Result<Instance> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("grid dimensions must be positive".into()));
    }
    if potts_strength < 0.0 {
        return Err(Error::InvalidInput("potts strength must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    // Synthetic intensity field drives the contrast model.
    let intensity: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let unary: Vec<(f64, f64)> =
        (0..n).map(|_| (0.0, unary_noise * rng.random_range(-1.0..1.0))).collect();
    let mut edges = Vec::new();
    let node = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            let mut push = |u: usize, v: usize| {
                let w = if contrast {
                    let diff = intensity[u] - intensity[v];
                    potts_strength * (-4.0 * diff * diff).exp()
                } else {
                    potts_strength
                };
                edges.push((u, v, [0.0, w, w, 0.0]));
            };
            if c + 1 < cols {
                push(node(r, c), node(r, c + 1));
            }
            if r + 1 < rows {
                push(node(r, c), node(r + 1, c));
            }
        }
    }
    let model = EnergyModel::new(n, &unary, &edges, Scale::default())?;
    let mut instance = Instance::from_model(model);
    instance.grid = Some((rows, cols));
    Ok(instance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlobShape {
    Disk,
    Rect,
}

impl std::str::FromStr for BlobShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(BlobShape::Disk),
            "rect" => Ok(BlobShape::Rect),
            other => Err(Error::InvalidInput(format!("unknown shape `{other}`"))),
        }
    }
}

/// A synthetic interactive-segmentation instance: planted blob ground truth,
/// noisy unaries, hard scribble constraints.
pub struct ScribbleToy {
    pub instance: Instance,
    /// Scribbled nodes with their forced label.
    pub scribbles: Vec<(usize, bool)>,
}

/// Unary margin toward the ground truth label. The Potts strength stays
/// below `margin / 4` so the zero-noise MAP labeling is the ground truth:
/// flipping any region gains at least `margin` per node and loses at most
/// four boundary edges per node.
const SCRIBBLE_MARGIN: f64 = 1.0;
const SCRIBBLE_POTTS: f64 = 0.2;
const SCRIBBLE_COST: f64 = 1000.0;

pub fn generate_scribble_toy(
    rows: usize,
    cols: usize,
    shape: BlobShape,
    noise: f64,
    seed: u64,
) -> Result<ScribbleToy> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("grid dimensions must be positive".into()));
    }
    if !(0.0..SCRIBBLE_MARGIN / 2.0).contains(&noise) {
        return Err(Error::InvalidInput(format!(
            "noise must be in [0, {})",
            SCRIBBLE_MARGIN / 2.0
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;

    let cy = rng.random_range(0.0..rows as f64);
    let cx = rng.random_range(0.0..cols as f64);
    let extent_y = rng.random_range(rows as f64 / 6.0..rows as f64 / 2.5);
    let extent_x = rng.random_range(cols as f64 / 6.0..cols as f64 / 2.5);
    let gt_bits: Vec<bool> = (0..n)
        .map(|v| {
            let r = (v / cols) as f64 + 0.5;
            let c = (v % cols) as f64 + 0.5;
            match shape {
                BlobShape::Disk => {
                    let dy = (r - cy) / extent_y;
                    let dx = (c - cx) / extent_x;
                    dy * dy + dx * dx <= 1.0
                }
                BlobShape::Rect => (r - cy).abs() <= extent_y && (c - cx).abs() <= extent_x,
            }
        })
        .collect();
    let ground_truth = Labeling::new(gt_bits);

    let mut unary: Vec<(f64, f64)> = (0..n)
        .map(|v| {
            let against = SCRIBBLE_MARGIN + noise * rng.random_range(-1.0..1.0);
            let toward = noise * rng.random_range(-1.0..1.0);
            if ground_truth.get(v) {
                (against, toward)
            } else {
                (toward, against)
            }
        })
        .collect();

    // A few scribbles on each side, when such pixels exist.
    let mut scribbles = Vec::new();
    for wanted in [true, false] {
        let candidates: Vec<usize> = (0..n).filter(|&v| ground_truth.get(v) == wanted).collect();
        if candidates.is_empty() {
            continue;
        }
        let count = (candidates.len() / 8).clamp(1, 5);
        for _ in 0..count {
            let v = candidates[rng.random_range(0..candidates.len())];
            scribbles.push((v, wanted));
            if wanted {
                unary[v].0 += SCRIBBLE_COST;
            } else {
                unary[v].1 += SCRIBBLE_COST;
            }
        }
    }

    let node = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let table = [0.0, SCRIBBLE_POTTS, SCRIBBLE_POTTS, 0.0];
            if c + 1 < cols {
                edges.push((node(r, c), node(r, c + 1), table));
            }
            if r + 1 < rows {
                edges.push((node(r, c), node(r + 1, c), table));
            }
        }
    }
    let model = EnergyModel::new(n, &unary, &edges, Scale::default())?;
    let mut instance = Instance::from_model(model);
    instance.grid = Some((rows, cols));
    instance.ground_truth = Some(ground_truth);
    Ok(ScribbleToy { instance, scribbles })
}

/// Random submodular pairwise model over small integer costs, for oracle
/// suites and fixtures. Deterministic per seed.
pub fn random_submodular_model(
    seed: u64,
    node_count: usize,
    edge_probability: f64,
    scale: Scale,
) -> EnergyModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_submodular_model_with(&mut rng, node_count, edge_probability, scale)
}

pub fn random_submodular_model_with(
    rng: &mut ChaCha8Rng,
    node_count: usize,
    edge_probability: f64,
    scale: Scale,
) -> EnergyModel {
    let unary: Vec<(f64, f64)> = (0..node_count)
        .map(|_| (rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64))
        .collect();
    let mut edges = Vec::new();
    for u in 0..node_count {
        for v in (u + 1)..node_count {
            if rng.random_bool(edge_probability) {
                let a = rng.random_range(-3..=3) as f64;
                let d = rng.random_range(-3..=3) as f64;
                let slack = rng.random_range(0..=6) as f64;
                let b = rng.random_range(-3..=3) as f64;
                let c = a + d + slack - b; // margin = slack >= 0
                edges.push((u, v, [a, b, c, d]));
            }
        }
    }
    EnergyModel::new(node_count, &unary, &edges, scale).expect("generated model is valid")
}

/// Serialize a tuple of labelings, one bit-row per labeling.
pub fn labelings_to_text(tuple: &LabelingTuple, grid: Option<(usize, usize)>) -> String {
    let mut out = String::new();
    out.push_str(LABELINGS_HEADER);
    out.push('\n');
    out.push_str(&format!("nodes {} m {}", tuple.node_count(), tuple.len()));
    if let Some((r, c)) = grid {
        out.push_str(&format!(" grid {r} {c}"));
    }
    out.push('\n');
    for y in tuple.labelings() {
        out.push_str(&format!("{y}\n"));
    }
    out
}

pub fn labelings_from_text(text: &str) -> Result<LabelingTuple> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != LABELINGS_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{LABELINGS_HEADER}`"),
        });
    }
    let meta = lines.next().unwrap_or_default();
    let fields: Vec<&str> = meta.split_whitespace().collect();
    if fields.len() < 4 || fields[0] != "nodes" || fields[2] != "m" {
        return Err(Error::Parse { line: 2, message: "expected `nodes <n> m <M>`".into() });
    }
    let n: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse { line: 2, message: "bad node count".into() })?;
    let m: usize = fields[3]
        .parse()
        .map_err(|_| Error::Parse { line: 2, message: "bad m".into() })?;
    let mut labelings = Vec::with_capacity(m);
    for (i, row) in lines.take(m).enumerate() {
        let row = row.trim();
        if row.len() != n || row.chars().any(|c| c != '0' && c != '1') {
            return Err(Error::Parse {
                line: 3 + i,
                message: format!("expected a bit row of length {n}"),
            });
        }
        labelings.push(Labeling::new(row.chars().map(|c| c == '1').collect()));
    }
    if labelings.len() != m {
        return Err(Error::Parse { line: 0, message: format!("expected {m} bit rows") });
    }
    LabelingTuple::new(labelings)
}

/// Portable graymap of the per-node zero counts (values 0..=M), viewable
/// without imaging dependencies. Requires grid dimensions.
pub fn zero_count_pgm(tuple: &LabelingTuple, rows: usize, cols: usize) -> Result<String> {
    if rows * cols != tuple.node_count() {
        return Err(Error::DimensionMismatch { expected: tuple.node_count(), got: rows * cols });
    }
    let mut out = format!("P2\n{cols} {rows}\n{}\n", tuple.len());
    for r in 0..rows {
        let row: Vec<String> =
            (0..cols).map(|c| tuple.zero_count(r * cols + c).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}
