//! Node-wise permutation-invariant diversity measures and their level
//! schedules.
//!
//! A measure is a table `delta(0..=M)` over the per-node zero-count. For
//! concave measures the joint objective decouples into M independent
//! perturbed problems whose unary perturbations are the first differences
//! `gamma^m = lambda * (delta(m) - delta(m-1))`. The schedule is the single
//! place where the lambda-scaled measure is quantized; solvers and oracles
//! both read the quantized table so their objectives agree exactly.

use crate::energy::LabelingTuple;
use crate::error::{Error, Result};
use crate::fixed::Scale;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    Hamming,
    Linear,
    Power(f64),
    Custom,
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureKind::Hamming => write!(f, "hamming"),
            MeasureKind::Linear => write!(f, "linear"),
            MeasureKind::Power(p) => write!(f, "power {p}"),
            MeasureKind::Custom => write!(f, "custom"),
        }
    }
}

/// Per-node diversity as a function of the zero-count, identical across
/// nodes. `values` has length `M + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityMeasure {
    m_count: usize,
    values: Vec<f64>,
    kind: MeasureKind,
}

impl DiversityMeasure {
    /// Sum of pairwise Hamming distances: `delta(m) = m * (M - m)`.
    pub fn hamming(m_count: usize) -> Self {
        assert!(m_count >= 1, "M must be at least 1");
        DiversityMeasure {
            m_count,
            values: (0..=m_count).map(|m| (m * (m_count - m)) as f64).collect(),
            kind: MeasureKind::Hamming,
        }
    }

    /// `delta(m) = -|2m - M|^p`, concave for `p >= 1`.
    pub fn power(m_count: usize, p: f64) -> Result<Self> {
        assert!(m_count >= 1, "M must be at least 1");
        if !(p >= 1.0) {
            return Err(Error::InvalidInput(format!("power exponent must be >= 1, got {p}")));
        }
        let values = (0..=m_count)
            .map(|m| -((2 * m) as f64 - m_count as f64).abs().powf(p))
            .collect();
        let kind = if p == 1.0 { MeasureKind::Linear } else { MeasureKind::Power(p) };
        Ok(DiversityMeasure { m_count, values, kind })
    }

    pub fn linear(m_count: usize) -> Self {
        let mut d = Self::power(m_count, 1.0).unwrap();
        d.kind = MeasureKind::Linear;
        d
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(
                "custom measure needs at least delta(0) and delta(1)".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("custom measure values must be finite".into()));
        }
        Ok(DiversityMeasure {
            m_count: values.len() - 1,
            values,
            kind: MeasureKind::Custom,
        })
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, zero_count: usize) -> f64 {
        self.values[zero_count]
    }

    /// Concavity certificate with tolerance `eps`: first differences must be
    /// non-increasing, `d(i) >= d(j) - eps` for all `i <= j`.
    pub fn check_concave(&self, eps: f64) -> ConcavityCertificate {
        let diffs: Vec<f64> = (1..=self.m_count)
            .map(|m| self.values[m] - self.values[m - 1])
            .collect();
        for i in 0..diffs.len() {
            for j in (i + 1)..diffs.len() {
                if diffs[i] < diffs[j] - eps {
                    return ConcavityCertificate {
                        is_concave: false,
                        violating_pair: Some((i + 1, j + 1)),
                    };
                }
            }
        }
        ConcavityCertificate { is_concave: true, violating_pair: None }
    }

    /// Unscaled diversity of a tuple: `sum_v delta(m0_v)`.
    pub fn of_tuple(&self, tuple: &LabelingTuple) -> Result<f64> {
        if tuple.len() != self.m_count {
            return Err(Error::DimensionMismatch {
                expected: self.m_count,
                got: tuple.len(),
            });
        }
        Ok((0..tuple.node_count())
            .map(|v| self.values[tuple.zero_count(v)])
            .sum())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConcavityCertificate {
    pub is_concave: bool,
    /// 1-based indices (i, j) of increasing first differences, if any.
    pub violating_pair: Option<(usize, usize)>,
}

/// The M per-level unary perturbations of a concave measure, quantized.
///
/// `gamma_units[m]` holds `round(S * lambda * (delta(m+1) - delta(m)))`,
/// clamped non-increasing (the clamp can only fire within the concavity
/// tolerance). The lambda-scaled measure itself is reconstructed as prefix
/// sums of the quantized differences, so the telescoping used by the
/// decoupling argument is exact in integer arithmetic.
#[derive(Debug, Clone)]
pub struct GammaSchedule {
    m_count: usize,
    lambda: f64,
    scale: Scale,
    gamma_units: Vec<i64>,
    /// `scaled_div_units[x]` = quantized `lambda * delta(x)`, length `M + 1`.
    scaled_div_units: Vec<i64>,
}

impl GammaSchedule {
    pub fn new(measure: &DiversityMeasure, lambda: f64, scale: Scale) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda(lambda));
        }
        let cert = measure.check_concave(scale.epsilon());
        if let Some((i, j)) = cert.violating_pair {
            return Err(Error::NotConcave { i, j });
        }
        let m_count = measure.m_count();
        let mut gamma_units = Vec::with_capacity(m_count);
        for m in 1..=m_count {
            let raw = scale.try_units(lambda * (measure.value(m) - measure.value(m - 1)))?;
            let clamped = match gamma_units.last() {
                Some(&prev) => raw.min(prev),
                None => raw,
            };
            gamma_units.push(clamped);
        }
        let mut scaled_div_units = Vec::with_capacity(m_count + 1);
        scaled_div_units.push(scale.try_units(lambda * measure.value(0))?);
        for &g in &gamma_units {
            scaled_div_units.push(scaled_div_units.last().unwrap() + g);
        }
        Ok(GammaSchedule {
            m_count,
            lambda,
            scale,
            gamma_units,
            scaled_div_units,
        })
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// Quantized `gamma^{level+1}` (levels are 0-based here).
    pub fn gamma_units(&self, level: usize) -> i64 {
        self.gamma_units[level]
    }

    pub fn gammas_real(&self) -> Vec<f64> {
        self.gamma_units.iter().map(|&g| self.scale.to_real(g)).collect()
    }

    /// Quantized `lambda * delta(zero_count)`.
    pub fn scaled_diversity_units(&self, zero_count: usize) -> i64 {
        self.scaled_div_units[zero_count]
    }

    /// Quantized `lambda * Delta^M({y})` of a whole tuple.
    pub fn tuple_scaled_diversity_units(&self, tuple: &LabelingTuple) -> Result<i64> {
        if tuple.len() != self.m_count {
            return Err(Error::DimensionMismatch {
                expected: self.m_count,
                got: tuple.len(),
            });
        }
        Ok((0..tuple.node_count())
            .map(|v| self.scaled_div_units[tuple.zero_count(v)])
            .sum())
    }
}

/// Quantized lambda-scaled diversity table for arbitrary (possibly
/// non-concave) measures. Concave measures go through [`GammaSchedule`] so
/// that oracles and solvers share bit-identical objectives; everything else
/// is rounded directly per entry.
pub fn scaled_diversity_table(
    measure: &DiversityMeasure,
    lambda: f64,
    scale: Scale,
) -> Result<Vec<i64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if measure.check_concave(scale.epsilon()).is_concave {
        let sched = GammaSchedule::new(measure, lambda, scale)?;
        Ok((0..=measure.m_count())
            .map(|x| sched.scaled_diversity_units(x))
            .collect())
    } else {
        measure.values().iter().map(|&d| scale.try_units(lambda * d)).collect()
    }
}
