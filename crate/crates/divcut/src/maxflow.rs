//! s-t max-flow / min-cut kernel.
//!
//! Augmenting-path solver with bidirectional grow/adopt search trees in the
//! style of Boykov and Kolmogorov, over integer capacities. Terminal
//! capacities are stored per node as a single residual (`> 0` means residual
//! capacity from the source, `< 0` toward the sink); this makes terminal
//! reparameterization a constant-time update that keeps the existing flow
//! feasible, so a re-solve continues from the current flow.
//!
//! Convention used across the crate: label 1 = sink side. The highest
//! labeling (most ones) is the minimal source side.

use crate::error::{Error, Result};

mod dimacs;
pub use dimacs::{read_dimacs, write_dimacs};

const PARENT_NONE: u32 = u32::MAX;
const PARENT_TERMINAL: u32 = u32::MAX - 1;
const PARENT_ORPHAN: u32 = u32::MAX - 2;
const MAX_ARCS: usize = (u32::MAX - 8) as usize;

const TREE_FREE: u8 = 0;
const TREE_SRC: u8 = 1;
const TREE_SNK: u8 = 2;

/// Which extremal minimum cut to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalCut {
    /// Nodes reachable from the source in the residual graph.
    MinimalSourceSide,
    /// Complement of the nodes that reach the sink in the residual graph.
    MaximalSourceSide,
}

/// A minimum cut: its value and one side assignment per node
/// (`false` = source side / label 0, `true` = sink side / label 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub flow_units: i64,
    pub side: Vec<bool>,
}

/// Immutable description of an s-t network; the builder for [`FlowNetwork`]
/// and the unit for DIMACS exchange. Terminal entry `v` is
/// `(cap source->v, cap v->sink)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetworkSpec {
    pub node_count: usize,
    pub terminal: Vec<(i64, i64)>,
    pub arcs: Vec<(usize, usize, i64, i64)>,
}

impl NetworkSpec {
    pub fn new(node_count: usize) -> Self {
        NetworkSpec {
            node_count,
            terminal: vec![(0, 0); node_count],
            arcs: Vec::new(),
        }
    }

    pub fn add_terminal(&mut self, v: usize, cap_src: i64, cap_snk: i64) -> Result<()> {
        if v >= self.node_count {
            return Err(Error::InvalidInput(format!("terminal node {v} out of range")));
        }
        if cap_src < 0 || cap_snk < 0 {
            return Err(Error::InvalidInput("terminal capacities must be non-negative".into()));
        }
        self.terminal[v].0 += cap_src;
        self.terminal[v].1 += cap_snk;
        Ok(())
    }

    pub fn add_arc(&mut self, u: usize, v: usize, cap_uv: i64, cap_vu: i64) -> Result<()> {
        if u >= self.node_count || v >= self.node_count {
            return Err(Error::InvalidInput(format!("arc ({u}, {v}) endpoint out of range")));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop arc at node {u}")));
        }
        if cap_uv < 0 || cap_vu < 0 {
            return Err(Error::InvalidInput("arc capacities must be non-negative".into()));
        }
        self.arcs.push((u, v, cap_uv, cap_vu));
        Ok(())
    }

    /// Capacity of the cut given by `side` (`true` = sink side): terminal
    /// arcs crossing plus internal arcs from the source side to the sink
    /// side. Used as the independent check that a reported cut's capacity
    /// equals the flow value.
    pub fn cut_capacity(&self, side: &[bool]) -> i64 {
        assert_eq!(side.len(), self.node_count);
        let mut total = 0i64;
        for (v, &(cs, ct)) in self.terminal.iter().enumerate() {
            total += if side[v] { cs } else { ct };
        }
        for &(u, v, cap_uv, cap_vu) in &self.arcs {
            if !side[u] && side[v] {
                total += cap_uv;
            } else if side[u] && !side[v] {
                total += cap_vu;
            }
        }
        total
    }

    pub fn build(&self) -> FlowNetwork {
        let mut net = FlowNetwork::new(self.node_count);
        for (v, &(cs, ct)) in self.terminal.iter().enumerate() {
            net.add_terminal_caps(v, cs, ct);
        }
        for &(u, v, cap_uv, cap_vu) in &self.arcs {
            net.add_arc(u, v, cap_uv, cap_vu);
        }
        net
    }
}

/// Mutable solver state for one s-t network.
pub struct FlowNetwork {
    node_count: usize,
    /// Combined residual terminal capacity per node.
    tr_cap: Vec<i64>,
    /// Half-arcs; sister of arc `a` is `a ^ 1`.
    heads: Vec<u32>,
    r_cap: Vec<i64>,
    /// CSR adjacency over half-arcs, in ascending arc order per node.
    adj_start: Vec<u32>,
    adj_arcs: Vec<u32>,
    adj_dirty: bool,

    parent_arc: Vec<u32>,
    tree: Vec<u8>,
    dist: Vec<u32>,
    ts: Vec<u32>,
    time: u32,
    active: std::collections::VecDeque<u32>,
    in_active: Vec<bool>,
    orphans: std::collections::VecDeque<u32>,

    flow_acc: i64,
    /// Sum of absolute finite capacities ever introduced; the forcing
    /// capacity for fixed nodes always exceeds it.
    finite_cap_sum: i64,
    fixed: Vec<Option<bool>>,
    solved: bool,
}

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            node_count,
            tr_cap: vec![0; node_count],
            heads: Vec::new(),
            r_cap: Vec::new(),
            adj_start: Vec::new(),
            adj_arcs: Vec::new(),
            adj_dirty: true,
            parent_arc: vec![PARENT_NONE; node_count],
            tree: vec![TREE_FREE; node_count],
            dist: vec![0; node_count],
            ts: vec![0; node_count],
            time: 0,
            active: std::collections::VecDeque::new(),
            in_active: vec![false; node_count],
            orphans: std::collections::VecDeque::new(),
            flow_acc: 0,
            finite_cap_sum: 0,
            fixed: vec![None; node_count],
            solved: false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_solved(&self) -> bool {
        self.solved
    }

    /// Residual terminal capacity of `v` (positive = source side residual).
    pub fn terminal_residual(&self, v: usize) -> i64 {
        self.tr_cap[v]
    }

    fn add_terminal_caps(&mut self, v: usize, cap_src: i64, cap_snk: i64) {
        debug_assert!(cap_src >= 0 && cap_snk >= 0);
        self.grow_budget(cap_src + cap_snk);
        self.apply_terminal_delta(v, cap_src, cap_snk);
    }

    fn grow_budget(&mut self, amount: i64) {
        self.finite_cap_sum = self
            .finite_cap_sum
            .checked_add(amount)
            .filter(|&s| s < i64::MAX / 4)
            .expect("capacity budget overflow");
    }

    fn add_arc(&mut self, u: usize, v: usize, cap_uv: i64, cap_vu: i64) {
        debug_assert!(u != v && u < self.node_count && v < self.node_count);
        debug_assert!(cap_uv >= 0 && cap_vu >= 0);
        assert!(self.heads.len() + 2 <= MAX_ARCS, "arc count overflow");
        self.grow_budget(cap_uv + cap_vu);
        self.heads.push(v as u32);
        self.heads.push(u as u32);
        self.r_cap.push(cap_uv);
        self.r_cap.push(cap_vu);
        self.adj_dirty = true;
        self.solved = false;
    }

    /// Core terminal update: adds `d_src` to the source capacity and `d_snk`
    /// to the sink capacity of `v`, in the combined-residual representation.
    /// Negative effective capacities never appear; the flow accumulator
    /// absorbs the difference so every cut value shifts consistently.
    fn apply_terminal_delta(&mut self, v: usize, d_src: i64, d_snk: i64) {
        let tr = self.tr_cap[v];
        let tr_new = tr
            .checked_add(d_src)
            .and_then(|t| t.checked_sub(d_snk))
            .expect("terminal capacity overflow");
        self.flow_acc = self
            .flow_acc
            .checked_add(d_src - (tr_new.max(0) - tr.max(0)))
            .expect("flow accounting overflow");
        self.tr_cap[v] = tr_new;
        self.solved = false;
    }

    /// Reparameterize terminal capacities; each entry is
    /// `(node, delta_source_cap, delta_sink_cap)` and deltas may be negative.
    /// Existing flow stays feasible and the next `solve` continues from it.
    pub fn reparameterize(&mut self, deltas: &[(usize, i64, i64)]) -> Result<()> {
        for &(v, d_src, d_snk) in deltas {
            if v >= self.node_count {
                return Err(Error::InvalidInput(format!("reparameterize: node {v} out of range")));
            }
            self.grow_budget(d_src.abs() + d_snk.abs());
            self.apply_terminal_delta(v, d_src, d_snk);
        }
        // Keep previously fixed nodes forced under the enlarged budget.
        for v in 0..self.node_count {
            if let Some(label) = self.fixed[v] {
                self.enforce_fix(v, label);
            }
        }
        Ok(())
    }

    /// Force node `v` to `label` (`true` = sink side / label 1) in every
    /// optimal cut, via a terminal capacity exceeding all finite capacity.
    pub fn fix_node(&mut self, v: usize, label: bool) -> Result<()> {
        if v >= self.node_count {
            return Err(Error::InvalidInput(format!("fix_node: node {v} out of range")));
        }
        match self.fixed[v] {
            Some(prev) if prev != label => return Err(Error::ConflictingFix { node: v }),
            _ => {}
        }
        self.fixed[v] = Some(label);
        self.enforce_fix(v, label);
        Ok(())
    }

    fn enforce_fix(&mut self, v: usize, label: bool) {
        let needed = self
            .finite_cap_sum
            .checked_add(1)
            .expect("capacity budget overflow");
        let tr = self.tr_cap[v];
        if label {
            if tr > -needed {
                self.apply_terminal_delta(v, 0, tr + needed);
            }
        } else if tr < needed {
            self.apply_terminal_delta(v, needed - tr, 0);
        }
    }

    fn build_adjacency(&mut self) {
        let arc_count = self.heads.len();
        let mut counts = vec![0u32; self.node_count + 1];
        for a in 0..arc_count {
            let tail = self.heads[a ^ 1] as usize;
            counts[tail + 1] += 1;
        }
        for i in 0..self.node_count {
            counts[i + 1] += counts[i];
        }
        self.adj_start = counts.clone();
        self.adj_arcs = vec![0; arc_count];
        let mut cursor = counts;
        for a in 0..arc_count {
            let tail = self.heads[a ^ 1] as usize;
            self.adj_arcs[cursor[tail] as usize] = a as u32;
            cursor[tail] += 1;
        }
        self.adj_dirty = false;
    }

    fn arcs_of(&self, v: usize) -> std::ops::Range<usize> {
        self.adj_start[v] as usize..self.adj_start[v + 1] as usize
    }

    fn activate(&mut self, v: u32) {
        if !self.in_active[v as usize] {
            self.in_active[v as usize] = true;
            self.active.push_back(v);
        }
    }

    fn make_orphan(&mut self, v: u32) {
        self.parent_arc[v as usize] = PARENT_ORPHAN;
        self.orphans.push_back(v);
    }

    fn init_search(&mut self) {
        self.active.clear();
        self.orphans.clear();
        self.in_active.fill(false);
        self.time = 1;
        for v in 0..self.node_count {
            self.ts[v] = 1;
            self.dist[v] = 1;
            if self.tr_cap[v] > 0 {
                self.tree[v] = TREE_SRC;
                self.parent_arc[v] = PARENT_TERMINAL;
                self.activate(v as u32);
            } else if self.tr_cap[v] < 0 {
                self.tree[v] = TREE_SNK;
                self.parent_arc[v] = PARENT_TERMINAL;
                self.activate(v as u32);
            } else {
                self.tree[v] = TREE_FREE;
                self.parent_arc[v] = PARENT_NONE;
            }
        }
    }

    /// Compute the maximum flow, continuing from any flow already present,
    /// and return the minimal-source-side minimum cut.
    pub fn solve(&mut self) -> CutResult {
        if self.adj_dirty {
            self.build_adjacency();
        }
        self.init_search();
        while let Some(connect) = self.grow() {
            self.time += 1;
            self.augment(connect);
            self.adopt();
        }
        self.solved = true;
        debug_assert!(self.fixed_nodes_respected());
        CutResult {
            flow_units: self.flow_acc,
            side: self.side_bits(ExtremalCut::MinimalSourceSide),
        }
    }

    /// Flow value of the last solve.
    pub fn flow_value(&self) -> Result<i64> {
        if !self.solved {
            return Err(Error::NotSolved);
        }
        Ok(self.flow_acc)
    }

    /// One of the two extremal minimum cuts of a solved network.
    pub fn extremal_cut(&self, which: ExtremalCut) -> Result<CutResult> {
        if !self.solved {
            return Err(Error::NotSolved);
        }
        Ok(CutResult {
            flow_units: self.flow_acc,
            side: self.side_bits(which),
        })
    }

    fn side_bits(&self, which: ExtremalCut) -> Vec<bool> {
        match which {
            ExtremalCut::MinimalSourceSide => {
                let reach = self.residual_from_source();
                (0..self.node_count).map(|v| !reach[v]).collect()
            }
            ExtremalCut::MaximalSourceSide => self.residual_to_sink(),
        }
    }

    /// Nodes reachable from the source through positive residuals.
    fn residual_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::new();
        for v in 0..self.node_count {
            if self.tr_cap[v] > 0 {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            for i in self.arcs_of(u) {
                let a = self.adj_arcs[i] as usize;
                let q = self.heads[a] as usize;
                if self.r_cap[a] > 0 && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// Nodes with a positive-residual path to the sink.
    fn residual_to_sink(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::new();
        for v in 0..self.node_count {
            if self.tr_cap[v] < 0 {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(x) = queue.pop_front() {
            for i in self.arcs_of(x) {
                let a = self.adj_arcs[i] as usize;
                let q = self.heads[a] as usize;
                // q reaches x through the sister arc q -> x.
                if self.r_cap[a ^ 1] > 0 && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    fn fixed_nodes_respected(&self) -> bool {
        let min_side = self.side_bits(ExtremalCut::MinimalSourceSide);
        let max_side = self.side_bits(ExtremalCut::MaximalSourceSide);
        self.fixed.iter().enumerate().all(|(v, f)| match f {
            Some(label) => min_side[v] == *label && max_side[v] == *label,
            None => true,
        })
    }

    /// Expand both trees until they touch; returns the connecting half-arc
    /// oriented source-tree -> sink-tree, or None when no path remains.
    fn grow(&mut self) -> Option<u32> {
        while let Some(p) = self.active.pop_front() {
            self.in_active[p as usize] = false;
            let tree_p = self.tree[p as usize];
            if tree_p == TREE_FREE {
                continue;
            }
            for i in self.arcs_of(p as usize) {
                let a = self.adj_arcs[i] as usize;
                let cap = if tree_p == TREE_SRC { self.r_cap[a] } else { self.r_cap[a ^ 1] };
                if cap <= 0 {
                    continue;
                }
                let q = self.heads[a];
                let tree_q = self.tree[q as usize];
                if tree_q == TREE_FREE {
                    self.tree[q as usize] = tree_p;
                    self.parent_arc[q as usize] = (a ^ 1) as u32;
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                    self.ts[q as usize] = self.ts[p as usize];
                    self.activate(q);
                } else if tree_q != tree_p {
                    // Trees meet. p stays active so its remaining arcs are
                    // rescanned after augmentation.
                    self.in_active[p as usize] = true;
                    self.active.push_front(p);
                    return Some(if tree_p == TREE_SRC { a as u32 } else { (a ^ 1) as u32 });
                }
            }
        }
        None
    }

    fn augment(&mut self, connect: u32) {
        let connect = connect as usize;
        let src_end = self.heads[connect ^ 1];
        let snk_end = self.heads[connect];

        // Bottleneck over the whole path.
        let mut delta = self.r_cap[connect];
        let mut x = src_end;
        loop {
            let pa = self.parent_arc[x as usize];
            if pa == PARENT_TERMINAL {
                delta = delta.min(self.tr_cap[x as usize]);
                break;
            }
            delta = delta.min(self.r_cap[(pa ^ 1) as usize]);
            x = self.heads[pa as usize];
        }
        let mut x = snk_end;
        loop {
            let pa = self.parent_arc[x as usize];
            if pa == PARENT_TERMINAL {
                delta = delta.min(-self.tr_cap[x as usize]);
                break;
            }
            delta = delta.min(self.r_cap[pa as usize]);
            x = self.heads[pa as usize];
        }
        debug_assert!(delta > 0);

        // Push and collect orphans at saturated arcs.
        self.r_cap[connect] -= delta;
        self.r_cap[connect ^ 1] += delta;
        let mut x = src_end;
        loop {
            let pa = self.parent_arc[x as usize];
            if pa == PARENT_TERMINAL {
                self.tr_cap[x as usize] -= delta;
                if self.tr_cap[x as usize] == 0 {
                    self.make_orphan(x);
                }
                break;
            }
            let pa = pa as usize;
            self.r_cap[pa ^ 1] -= delta;
            self.r_cap[pa] += delta;
            if self.r_cap[pa ^ 1] == 0 {
                self.make_orphan(x);
            }
            x = self.heads[pa];
        }
        let mut x = snk_end;
        loop {
            let pa = self.parent_arc[x as usize];
            if pa == PARENT_TERMINAL {
                self.tr_cap[x as usize] += delta;
                if self.tr_cap[x as usize] == 0 {
                    self.make_orphan(x);
                }
                break;
            }
            let pa = pa as usize;
            self.r_cap[pa] -= delta;
            self.r_cap[pa ^ 1] += delta;
            if self.r_cap[pa] == 0 {
                self.make_orphan(x);
            }
            x = self.heads[pa];
        }
        self.flow_acc += delta;
    }

    /// Distance to a terminal-rooted origin, walking parent pointers with
    /// timestamp caching; None when the chain ends at an orphan.
    fn origin_dist(&mut self, start: u32) -> Option<u32> {
        let mut d: u32 = 0;
        let mut j = start;
        loop {
            if self.ts[j as usize] == self.time {
                d += self.dist[j as usize];
                break;
            }
            let pa = self.parent_arc[j as usize];
            if pa == PARENT_TERMINAL {
                d += 1;
                break;
            }
            if pa == PARENT_ORPHAN || pa == PARENT_NONE {
                return None;
            }
            d += 1;
            j = self.heads[pa as usize];
        }
        // Cache distances along the walked prefix.
        let mut k = start;
        let mut dd = d;
        while self.ts[k as usize] != self.time {
            self.ts[k as usize] = self.time;
            self.dist[k as usize] = dd;
            let pa = self.parent_arc[k as usize];
            if pa == PARENT_TERMINAL {
                break;
            }
            dd -= 1;
            k = self.heads[pa as usize];
        }
        Some(d)
    }

    fn adopt(&mut self) {
        while let Some(x) = self.orphans.pop_front() {
            if self.parent_arc[x as usize] != PARENT_ORPHAN {
                continue;
            }
            self.process_orphan(x);
        }
    }

    fn process_orphan(&mut self, x: u32) {
        let tree_x = self.tree[x as usize];
        debug_assert!(tree_x != TREE_FREE);

        // Look for a new parent in the same tree with residual capacity in
        // the right direction and a terminal-rooted origin; prefer the
        // closest origin, ties broken by arc order.
        let mut best_arc = PARENT_NONE;
        let mut best_dist = u32::MAX;
        let range = self.arcs_of(x as usize);
        for i in range {
            let a = self.adj_arcs[i] as usize;
            let q = self.heads[a];
            if self.tree[q as usize] != tree_x {
                continue;
            }
            let cap = if tree_x == TREE_SRC { self.r_cap[a ^ 1] } else { self.r_cap[a] };
            if cap <= 0 {
                continue;
            }
            if let Some(d) = self.origin_dist(q) {
                if d < best_dist {
                    best_dist = d;
                    best_arc = a as u32;
                }
            }
        }

        if best_arc != PARENT_NONE {
            self.parent_arc[x as usize] = best_arc;
            self.ts[x as usize] = self.time;
            self.dist[x as usize] = best_dist + 1;
            return;
        }

        // No parent: x leaves the tree; its children become orphans and
        // neighbors that could re-grow toward x are activated.
        for i in self.arcs_of(x as usize) {
            let a = self.adj_arcs[i] as usize;
            let q = self.heads[a];
            if self.tree[q as usize] != tree_x {
                continue;
            }
            let cap_toward_x = if tree_x == TREE_SRC { self.r_cap[a ^ 1] } else { self.r_cap[a] };
            if cap_toward_x > 0 {
                self.activate(q);
            }
            let pq = self.parent_arc[q as usize];
            if pq < PARENT_ORPHAN && self.heads[pq as usize] == x {
                self.make_orphan(q);
            }
        }
        self.tree[x as usize] = TREE_FREE;
        self.parent_arc[x as usize] = PARENT_NONE;
    }
}
