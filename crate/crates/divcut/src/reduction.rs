//! Translation of a binary submodular energy (plus a per-node unary
//! perturbation on label 1) into an s-t network whose minimum cuts are
//! exactly the minimizers, under the crate-wide convention label 1 = sink
//! side.
//!
//! Each edge table `(A, B, C, D)` decomposes into a constant `A`, label-1
//! charges `C - A` at `u` and `D - C` at `v`, and one forward arc `u -> v`
//! of capacity `B + C - A - D` (cut exactly when `y_u = 0, y_v = 1`). Net
//! label-1 charges are split into terminal arcs with negative parts moved
//! into the recorded constant.

use crate::energy::{EnergyModel, Labeling};
use crate::error::{Error, Result};
use crate::maxflow::{CutResult, ExtremalCut, FlowNetwork, NetworkSpec};

/// Which extremal minimizer to return for a perturbed energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// Coordinate-wise least minimizer.
    Lowest,
    /// Coordinate-wise greatest minimizer.
    Highest,
}

/// A built reduction: the network plus enough bookkeeping to map cut values
/// back to perturbed energies.
pub struct ReductionMap {
    /// Per-node net charge on label 1, in units (unary difference plus
    /// gamma plus edge corrections).
    label1_charge: Vec<i64>,
    /// Forward arc capacity per model edge, in units (clamped at zero).
    arc_caps: Vec<(usize, usize, i64)>,
    /// Additive constant dropped during construction, in units:
    /// `E^gamma(y) = cut_capacity(y) + constant`.
    pub constant_units: i64,
    net: FlowNetwork,
    spec: NetworkSpec,
}

impl ReductionMap {
    /// Build the network for `E(y) + sum_v gamma_v y_v`. Refuses
    /// non-submodular models.
    pub fn build(model: &EnergyModel, gamma_units: &[i64]) -> Result<ReductionMap> {
        model.require_submodular()?;
        let n = model.node_count();
        if gamma_units.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gamma_units.len() });
        }

        let mut constant = 0i64;
        let mut charge = vec![0i64; n];
        for v in 0..n {
            let [c0, c1] = model.unary_units(v);
            constant += c0;
            charge[v] += c1 - c0 + gamma_units[v];
        }
        let mut arc_caps = Vec::with_capacity(model.edge_count());
        for e in model.edges() {
            let [a, b, c, d] = e.table;
            constant += a;
            charge[e.u] += c - a;
            charge[e.v] += d - c;
            arc_caps.push((e.u, e.v, (b + c - a - d).max(0)));
        }

        let mut spec = NetworkSpec::new(n);
        for (v, &b) in charge.iter().enumerate() {
            if b >= 0 {
                spec.add_terminal(v, b, 0)?;
            } else {
                spec.add_terminal(v, 0, -b)?;
                constant += b;
            }
        }
        for &(u, v, cap) in &arc_caps {
            if cap > 0 {
                spec.add_arc(u, v, cap, 0)?;
            }
        }
        let net = spec.build();
        Ok(ReductionMap { label1_charge: charge, arc_caps, constant_units: constant, net, spec })
    }

    pub fn network(&mut self) -> &mut FlowNetwork {
        &mut self.net
    }

    /// The network as built; later gamma shifts are not reflected here.
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    /// Capacity of the cut induced by labeling `y` in the as-built network.
    /// Satisfies `E^gamma(y) = cut_capacity(y) + constant` exactly (up to
    /// one unit per clamped near-zero edge margin).
    pub fn cut_capacity_units(&self, y: &Labeling) -> i64 {
        let mut total = 0i64;
        for (v, &b) in self.label1_charge.iter().enumerate() {
            if y.get(v) {
                total += b.max(0);
            } else {
                total += (-b).max(0);
            }
        }
        for &(u, v, cap) in &self.arc_caps {
            if !y.get(u) && y.get(v) {
                total += cap;
            }
        }
        total
    }

    /// Shift the per-node label-1 charges by `delta_units` (node-uniform),
    /// keeping the flow for a warm re-solve. The recorded constant follows
    /// the charges, so the cut/energy correspondence stays exact.
    pub fn shift_gamma_uniform(&mut self, delta_units: i64) -> Result<()> {
        if delta_units == 0 {
            return Ok(());
        }
        let deltas: Vec<(usize, i64, i64)> = (0..self.net.node_count())
            .map(|v| (v, delta_units, 0))
            .collect();
        for b in &mut self.label1_charge {
            let before = (*b).min(0);
            *b += delta_units;
            self.constant_units += (*b).min(0) - before;
        }
        self.net.reparameterize(&deltas)
    }

    /// Solve and return the requested extremal minimizer as a labeling
    /// (sink side = label 1).
    pub fn solve(&mut self, which: Which) -> Result<(Labeling, CutResult)> {
        self.net.solve();
        let cut = self.net.extremal_cut(match which {
            Which::Highest => ExtremalCut::MinimalSourceSide,
            Which::Lowest => ExtremalCut::MaximalSourceSide,
        })?;
        Ok((Labeling::new(cut.side.clone()), cut))
    }
}

/// One-shot exact minimization of `E(y) + sum_v gamma_v y_v`, returning the
/// requested extremal minimizer and its perturbed energy in units.
pub fn minimize(
    model: &EnergyModel,
    gamma_units: &[i64],
    which: Which,
) -> Result<(Labeling, i64)> {
    let mut map = ReductionMap::build(model, gamma_units)?;
    let (labeling, _) = map.solve(which)?;
    let energy = model.evaluate_perturbed_units(&labeling, gamma_units)?;
    Ok((labeling, energy))
}

/// Node-uniform variant of [`minimize`].
pub fn minimize_uniform(
    model: &EnergyModel,
    gamma_units: i64,
    which: Which,
) -> Result<(Labeling, i64)> {
    minimize(model, &vec![gamma_units; model.node_count()], which)
}
