//! Binary pairwise energies over node labelings.
//!
//! An [`EnergyModel`] stores a unary table per node and a full 4-value table
//! per edge. Costs are quantized to fixed-point units at construction; all
//! arithmetic below the public accessors is exact integer arithmetic.

use crate::error::{Error, Result};
use crate::fixed::Scale;

/// A pairwise term between two nodes, with the full cost table over
/// `{0,1} x {0,1}`. Table order: `(0,0), (0,1), (1,0), (1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub table: [i64; 4],
}

impl Edge {
    /// Submodularity margin in units:
    /// `theta(0,1) + theta(1,0) - theta(0,0) - theta(1,1)`.
    pub fn margin_units(&self) -> i64 {
        self.table[1] + self.table[2] - self.table[0] - self.table[3]
    }

    pub fn cost_units(&self, yu: bool, yv: bool) -> i64 {
        self.table[(yu as usize) * 2 + yv as usize]
    }
}

/// Binary pairwise energy: `E(y) = sum_v theta_v(y_v) + sum_uv theta_uv(y_u, y_v)`.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    scale: Scale,
    unary: Vec<[i64; 2]>,
    edges: Vec<Edge>,
}

impl EnergyModel {
    /// Build a model from real-valued costs.
    ///
    /// Edges must satisfy `u < v < node_count` and be pairwise distinct;
    /// violations are rejected rather than normalized or merged.
    pub fn new(
        node_count: usize,
        unary: &[(f64, f64)],
        edges: &[(usize, usize, [f64; 4])],
        scale: Scale,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("node_count must be positive".into()));
        }
        if unary.len() != node_count {
            return Err(Error::DimensionMismatch {
                expected: node_count,
                got: unary.len(),
            });
        }
        let unary = unary
            .iter()
            .map(|&(c0, c1)| Ok([scale.try_units(c0)?, scale.try_units(c1)?]))
            .collect::<Result<Vec<_>>>()?;

        let mut seen = std::collections::HashSet::new();
        let mut quantized = Vec::with_capacity(edges.len());
        for &(u, v, table) in edges {
            if u >= v {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) must satisfy u < v"
                )));
            }
            if v >= node_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) endpoint out of range (node_count {node_count})"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u}, {v})")));
            }
            let mut units = [0i64; 4];
            for (slot, cost) in units.iter_mut().zip(table) {
                *slot = scale.try_units(cost)?;
            }
            quantized.push(Edge { u, v, table: units });
        }

        Ok(EnergyModel {
            scale,
            unary,
            edges: quantized,
        })
    }

    pub fn node_count(&self) -> usize {
        self.unary.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn unary_units(&self, v: usize) -> [i64; 2] {
        self.unary[v]
    }

    pub fn unary_real(&self, v: usize) -> (f64, f64) {
        (
            self.scale.to_real(self.unary[v][0]),
            self.scale.to_real(self.unary[v][1]),
        )
    }

    pub fn edge_table_real(&self, e: usize) -> [f64; 4] {
        self.edges[e].table.map(|u| self.scale.to_real(u))
    }

    /// Total energy of a labeling, in fixed-point units.
    pub fn evaluate_units(&self, y: &Labeling) -> Result<i64> {
        if y.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                got: y.len(),
            });
        }
        let mut total = 0i64;
        for (v, costs) in self.unary.iter().enumerate() {
            total += costs[y.get(v) as usize];
        }
        for e in &self.edges {
            total += e.cost_units(y.get(e.u), y.get(e.v));
        }
        Ok(total)
    }

    /// Total energy of a labeling as a real value.
    pub fn evaluate(&self, y: &Labeling) -> Result<f64> {
        Ok(self.scale.to_real(self.evaluate_units(y)?))
    }

    /// Energy plus a per-node perturbation on label 1, in units:
    /// `E(y) + sum_v gamma_v * y_v`.
    pub fn evaluate_perturbed_units(&self, y: &Labeling, gamma_units: &[i64]) -> Result<i64> {
        if gamma_units.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                got: gamma_units.len(),
            });
        }
        let mut total = self.evaluate_units(y)?;
        for v in 0..self.node_count() {
            if y.get(v) {
                total += gamma_units[v];
            }
        }
        Ok(total)
    }

    /// Submodularity certificate. An energy is submodular iff every edge
    /// margin is `>= -epsilon`, i.e. at least `-1` unit.
    pub fn check_submodular(&self) -> SubmodularityCertificate {
        let mut worst_edge = None;
        let mut worst_margin = i64::MAX;
        for (i, e) in self.edges.iter().enumerate() {
            let m = e.margin_units();
            if m < worst_margin {
                worst_margin = m;
                worst_edge = Some(i);
            }
        }
        if self.edges.is_empty() {
            return SubmodularityCertificate {
                is_submodular: true,
                worst_edge: None,
                worst_margin_units: 0,
                scale: self.scale,
            };
        }
        SubmodularityCertificate {
            is_submodular: worst_margin >= -1,
            worst_edge,
            worst_margin_units: worst_margin,
            scale: self.scale,
        }
    }

    /// Shorthand for `check_submodular().is_submodular`.
    pub fn is_submodular(&self) -> bool {
        self.check_submodular().is_submodular
    }

    pub fn require_submodular(&self) -> Result<()> {
        let cert = self.check_submodular();
        if cert.is_submodular {
            Ok(())
        } else {
            Err(Error::NotSubmodular {
                edge: cert.worst_edge.unwrap_or(0),
                margin: cert.worst_margin(),
            })
        }
    }

    /// Rewrite the energy in the separable form
    ///
    /// `E(y) = constant + sum_v a_v y_v + sum_uv w_uv |y_u - y_v|`.
    ///
    /// The rewrite is unique: expanding an edge table `(A, B, C, D)` over the
    /// basis `{1, y_u, y_v, |y_u - y_v|}` forces
    ///
    /// * `w_uv    = (B + C - A - D) / 2` (half the submodularity margin),
    /// * `a_u    += C - A - w_uv`, `a_v += B - A - w_uv`,
    /// * `const  += A`,
    ///
    /// on top of `a_v = theta_v(1) - theta_v(0)` and
    /// `const = sum_v theta_v(0)` from the unaries. Asymmetric tables
    /// (`B != C`) contribute asymmetric per-node corrections. To stay exact in
    /// integer arithmetic all coefficients are stored doubled (half-units).
    ///
    /// Margins of `-1` unit (submodular within tolerance) are clamped to zero
    /// weight, which perturbs the identity by at most one unit per edge.
    pub fn reformulate(&self) -> Result<Reformulation> {
        self.require_submodular()?;
        let n = self.node_count();
        let mut constant2 = 0i64;
        let mut node_coeff2 = vec![0i64; n];
        for (v, costs) in self.unary.iter().enumerate() {
            constant2 += 2 * costs[0];
            node_coeff2[v] += 2 * (costs[1] - costs[0]);
        }
        let mut edge_weight2 = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let [a, b, c, d] = e.table;
            let w2 = (b + c - a - d).max(0);
            constant2 += 2 * a;
            node_coeff2[e.u] += 2 * (c - a) - w2;
            node_coeff2[e.v] += 2 * (b - a) - w2;
            edge_weight2.push(w2);
        }
        Ok(Reformulation {
            scale: self.scale,
            constant2,
            node_coeff2,
            edge_weight2,
            edges: self.edges.iter().map(|e| (e.u, e.v)).collect(),
        })
    }
}

/// Result of a submodularity check.
#[derive(Debug, Clone, Copy)]
pub struct SubmodularityCertificate {
    pub is_submodular: bool,
    pub worst_edge: Option<usize>,
    pub worst_margin_units: i64,
    scale: Scale,
}

impl SubmodularityCertificate {
    pub fn worst_margin(&self) -> f64 {
        self.scale.to_real(self.worst_margin_units)
    }
}

/// The separable rewrite of a submodular model. Coefficients are kept in
/// doubled units so that the pairwise weight (half the integer margin) stays
/// integral.
#[derive(Debug, Clone)]
pub struct Reformulation {
    scale: Scale,
    /// `2 * constant` in units.
    pub constant2: i64,
    /// `2 * a_v` in units, including edge-induced corrections.
    pub node_coeff2: Vec<i64>,
    /// `2 * w_uv` in units; equals the clamped integer margin of the edge.
    pub edge_weight2: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
}

impl Reformulation {
    pub fn constant(&self) -> f64 {
        self.scale.to_real(self.constant2) / 2.0
    }

    pub fn node_coeff(&self, v: usize) -> f64 {
        self.scale.to_real(self.node_coeff2[v]) / 2.0
    }

    pub fn edge_weight(&self, e: usize) -> f64 {
        self.scale.to_real(self.edge_weight2[e]) / 2.0
    }

    /// Evaluate the separable form, returning `2 * E(y)` in units.
    pub fn evaluate2_units(&self, y: &Labeling) -> Result<i64> {
        if y.len() != self.node_coeff2.len() {
            return Err(Error::DimensionMismatch {
                expected: self.node_coeff2.len(),
                got: y.len(),
            });
        }
        let mut total = self.constant2;
        for (v, &coeff) in self.node_coeff2.iter().enumerate() {
            if y.get(v) {
                total += coeff;
            }
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if y.get(u) != y.get(v) {
                total += self.edge_weight2[i];
            }
        }
        Ok(total)
    }
}

/// An assignment of one bit per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    bits: Vec<bool>,
}

impl Labeling {
    pub fn new(bits: Vec<bool>) -> Self {
        Labeling { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Labeling { bits: vec![false; n] }
    }

    /// Decode the low `n` bits of a mask, bit `v` = node `v`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        assert!(n <= 64);
        Labeling {
            bits: (0..n).map(|v| mask >> v & 1 == 1).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (v, &b)| m | (b as u64) << v)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, v: usize) -> bool {
        self.bits[v]
    }

    pub fn set(&mut self, v: usize, value: bool) {
        self.bits[v] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Coordinate-wise maximum.
    pub fn join(&self, other: &Labeling) -> Labeling {
        assert_eq!(self.len(), other.len());
        Labeling {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a | b)
                .collect(),
        }
    }

    /// Coordinate-wise minimum.
    pub fn meet(&self, other: &Labeling) -> Labeling {
        assert_eq!(self.len(), other.len());
        Labeling {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a & b)
                .collect(),
        }
    }

    /// True iff `self <= other` coordinate-wise.
    pub fn le(&self, other: &Labeling) -> bool {
        assert_eq!(self.len(), other.len());
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| a <= b)
    }

    pub fn hamming(&self, other: &Labeling) -> usize {
        assert_eq!(self.len(), other.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl std::fmt::Display for Labeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// An ordered M-tuple of labelings over one node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingTuple {
    labelings: Vec<Labeling>,
}

impl LabelingTuple {
    pub fn new(labelings: Vec<Labeling>) -> Result<Self> {
        if labelings.is_empty() {
            return Err(Error::InvalidInput("tuple must contain at least one labeling".into()));
        }
        let n = labelings[0].len();
        if labelings.iter().any(|y| y.len() != n) {
            return Err(Error::InvalidInput(
                "all labelings in a tuple must share one node count".into(),
            ));
        }
        Ok(LabelingTuple { labelings })
    }

    pub fn len(&self) -> usize {
        self.labelings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelings.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.labelings[0].len()
    }

    pub fn get(&self, m: usize) -> &Labeling {
        &self.labelings[m]
    }

    pub fn labelings(&self) -> &[Labeling] {
        &self.labelings
    }

    /// Number of labelings assigning 0 to node `v`.
    pub fn zero_count(&self, v: usize) -> usize {
        self.labelings.iter().filter(|y| !y.get(v)).count()
    }

    /// True iff `y^i <= y^j` coordinate-wise for all `i <= j`.
    pub fn is_nested(&self) -> bool {
        self.labelings
            .windows(2)
            .all(|pair| pair[0].le(&pair[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(
        n: usize,
        unary: &[(f64, f64)],
        edges: &[(usize, usize, [f64; 4])],
    ) -> EnergyModel {
        EnergyModel::new(n, unary, edges, Scale::default()).unwrap()
    }

    #[test]
    fn evaluate_single_node() {
        let m = model(1, &[(0.0, 5.0)], &[]);
        assert_eq!(m.evaluate(&Labeling::new(vec![false])).unwrap(), 0.0);
        assert_eq!(m.evaluate(&Labeling::new(vec![true])).unwrap(), 5.0);
    }

    #[test]
    fn evaluate_two_node_chain() {
        // theta_1 = (0,1), theta_2 = (0,1), edge (0,2,2,0); y = (0,1) costs 0+1+2.
        let m = model(
            2,
            &[(0.0, 1.0), (0.0, 1.0)],
            &[(0, 1, [0.0, 2.0, 2.0, 0.0])],
        );
        let y = Labeling::new(vec![false, true]);
        assert_eq!(m.evaluate(&y).unwrap(), 3.0);
        // Independent table walk over all four labelings as a second route.
        for (mask, want) in [(0u64, 0.0), (1, 3.0), (2, 3.0), (3, 2.0)] {
            let y = Labeling::from_mask(mask, 2);
            assert_eq!(m.evaluate(&y).unwrap(), want, "mask {mask}");
        }
    }

    #[test]
    fn evaluate_zero_model() {
        let m = model(3, &[(0.0, 0.0); 3], &[(0, 1, [0.0; 4]), (1, 2, [0.0; 4])]);
        for mask in 0..8 {
            assert_eq!(m.evaluate(&Labeling::from_mask(mask, 3)).unwrap(), 0.0);
        }
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let m = model(2, &[(0.0, 0.0); 2], &[]);
        let err = m.evaluate(&Labeling::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 3 }));
    }

    #[test]
    fn submodularity_certificate() {
        let potts = model(2, &[(0.0, 0.0); 2], &[(0, 1, [0.0, 2.0, 2.0, 0.0])]);
        let cert = potts.check_submodular();
        assert!(cert.is_submodular);
        assert_eq!(cert.worst_margin(), 4.0);

        let bad = model(2, &[(0.0, 0.0); 2], &[(0, 1, [0.0, 0.0, 0.0, 1.0])]);
        let cert = bad.check_submodular();
        assert!(!cert.is_submodular);
        assert_eq!(cert.worst_edge, Some(0));
        assert_eq!(cert.worst_margin(), -1.0);

        let empty = model(2, &[(0.0, 0.0); 2], &[]);
        assert!(empty.check_submodular().is_submodular);
    }

    #[test]
    fn construction_rejects_bad_edges() {
        let unary = [(0.0, 0.0), (0.0, 0.0)];
        assert!(EnergyModel::new(2, &unary, &[(1, 1, [0.0; 4])], Scale::default()).is_err());
        assert!(EnergyModel::new(2, &unary, &[(1, 0, [0.0; 4])], Scale::default()).is_err());
        assert!(EnergyModel::new(2, &unary, &[(0, 2, [0.0; 4])], Scale::default()).is_err());
        assert!(EnergyModel::new(
            2,
            &unary,
            &[(0, 1, [0.0; 4]), (0, 1, [1.0; 4])],
            Scale::default()
        )
        .is_err());
    }

    #[test]
    fn reformulate_unary_only() {
        let m = model(1, &[(0.0, 3.0)], &[]);
        let r = m.reformulate().unwrap();
        assert_eq!(r.constant(), 0.0);
        assert_eq!(r.node_coeff(0), 3.0);
    }

    #[test]
    fn reformulate_potts_edge() {
        // Potts (0,2,2,0): margin 4, separable weight 2, zero corrections.
        let m = model(2, &[(0.0, 0.0); 2], &[(0, 1, [0.0, 2.0, 2.0, 0.0])]);
        let r = m.reformulate().unwrap();
        assert_eq!(r.edge_weight(0), 2.0);
        for mask in 0..4 {
            let y = Labeling::from_mask(mask, 2);
            assert_eq!(r.evaluate2_units(&y).unwrap(), 2 * m.evaluate_units(&y).unwrap());
        }
    }

    #[test]
    fn reformulate_rejects_non_submodular() {
        let m = model(2, &[(0.0, 0.0); 2], &[(0, 1, [0.0, 0.0, 0.0, 1.0])]);
        assert!(matches!(m.reformulate(), Err(Error::NotSubmodular { .. })));
    }

    #[test]
    fn reformulate_identity_asymmetric_edge() {
        // Asymmetric table exercises the per-node corrections.
        let m = model(
            2,
            &[(0.5, -1.0), (0.0, 2.0)],
            &[(0, 1, [1.0, 4.0, 0.5, -1.0])],
        );
        assert!(m.is_submodular());
        let r = m.reformulate().unwrap();
        for mask in 0..4 {
            let y = Labeling::from_mask(mask, 2);
            assert_eq!(r.evaluate2_units(&y).unwrap(), 2 * m.evaluate_units(&y).unwrap());
        }
    }

    #[test]
    fn nestedness() {
        let t = |rows: &[&[u8]]| {
            LabelingTuple::new(
                rows.iter()
                    .map(|r| Labeling::new(r.iter().map(|&b| b == 1).collect()))
                    .collect(),
            )
            .unwrap()
        };
        assert!(t(&[&[0, 0], &[0, 1], &[1, 1]]).is_nested());
        assert!(!t(&[&[0, 1], &[1, 0]]).is_nested());
        assert!(t(&[&[1, 0]]).is_nested());
    }

    #[test]
    fn tuple_requires_shared_node_count() {
        let err = LabelingTuple::new(vec![Labeling::zeros(2), Labeling::zeros(3)]);
        assert!(err.is_err());
    }
}
