//! Reductions of flow polytopes and the cells of the canonical subdivision.
//!
//! Graphs produced by reductions carry provenance: every edge remembers the
//! multiset of original edge indices it is a formal sum of. Edges added by a
//! reduction at a vertex with zero netflow have empty provenance.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::combin::{bareiss_determinant, multinomial, weak_compositions};
use crate::error::{Error, Result};
use crate::graph::{Edge, MultiDigraph, Netflow};
use crate::kostant::{kpf, FlowAssignment};
use crate::lidskii::{generalized_binomial, lidskii_volume, multiset_coeff, LidskiiTable, PointsFormula};

/// Default node cap for explicit reduction trees.
pub const DEFAULT_NODE_CAP: usize = 100_000;

/// A bipartite noncrossing tree on `left` ordered left vertices and `right`
/// ordered right vertices, stored as the composition `b` of `right - 1`:
/// left vertex `p` has degree `b[p] + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NoncrossingTree {
    left: usize,
    right: usize,
    comp: Vec<u64>,
}

impl NoncrossingTree {
    pub fn new(left: usize, right: usize, comp: Vec<u64>) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::TreeShapeMismatch(format!("sides must be nonempty, got {left} x {right}")));
        }
        if comp.len() != left || comp.iter().sum::<u64>() != right as u64 - 1 {
            return Err(Error::TreeShapeMismatch(format!(
                "{comp:?} is not a composition of {} into {left} parts",
                right - 1
            )));
        }
        Ok(NoncrossingTree { left, right, comp })
    }

    /// Every tree in `T_{L,R}` with `|L| = left`, `|R| = right`.
    pub fn all(left: usize, right: usize) -> Vec<NoncrossingTree> {
        if left == 0 || right == 0 {
            return Vec::new();
        }
        weak_compositions(right as u64 - 1, left)
            .into_iter()
            .map(|comp| NoncrossingTree { left, right, comp })
            .collect()
    }

    pub fn left_size(&self) -> usize {
        self.left
    }

    pub fn right_size(&self) -> usize {
        self.right
    }

    pub fn composition(&self) -> &[u64] {
        &self.comp
    }

    /// Tree edges as 0-based `(left, right)` pairs. Left vertex `p` covers
    /// the right interval starting where left vertex `p - 1` ended.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.left + self.right - 1);
        let mut start = 0usize;
        for (p, &b) in self.comp.iter().enumerate() {
            for q in start..=start + b as usize {
                out.push((p, q));
            }
            start += b as usize;
        }
        out
    }
}

/// A graph inside a reduction tree, with per-edge provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    provenance: Vec<Vec<usize>>,
}

impl ReductionGraph {
    pub fn from_graph(g: &MultiDigraph) -> Self {
        ReductionGraph {
            vertex_count: g.vertex_count(),
            edges: g.edges().to_vec(),
            provenance: (0..g.edge_count()).map(|k| vec![k]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn sink(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    pub fn to_graph(&self) -> MultiDigraph {
        MultiDigraph::from_parts(self.vertex_count, self.edges.clone())
    }

    /// Indices of edges into `v`, in edge order.
    pub fn incoming(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&k| self.edges[k].1 == v).collect()
    }

    /// Indices of edges out of `v`, by target then edge order.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.edges.len()).filter(|&k| self.edges[k].0 == v).collect();
        out.sort_by_key(|&k| (self.edges[k].1, k));
        out
    }

    pub fn outd(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn ind(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// `Some(m)` when the graph is `G(m)`: every edge ends at the sink and
    /// every vertex `1..=n` has at least one edge.
    pub fn leaf_signature(&self) -> Option<Vec<u64>> {
        if self.edges.iter().any(|e| e.1 != self.sink()) {
            return None;
        }
        let m: Vec<u64> = (1..=self.n()).map(|v| self.outd(v) as u64).collect();
        m.iter().all(|&x| x > 0).then_some(m)
    }

    /// A vertex other than the sink with incoming but no outgoing edges.
    pub fn dead_end(&self) -> Option<usize> {
        (2..=self.n()).find(|&v| self.ind(v) > 0 && self.outd(v) == 0)
    }

    fn edge_key(&self, k: usize) -> String {
        let (i, j) = self.edges[k];
        format!("{i}{j}")
    }
}

fn merged(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// One basic reduction on the edge pair `(a, i)`, `(i, b)` given by index.
/// The first graph swaps `(i, b)` for `(a, b)`, the second swaps `(a, i)`
/// for `(a, b)`; the new edge takes the position of the one it replaces.
pub fn basic_reduction(h: &ReductionGraph, e1: usize, e2: usize) -> Result<(ReductionGraph, ReductionGraph)> {
    let (Some(&(a, i)), Some(&(i2, b))) = (h.edges.get(e1), h.edges.get(e2)) else {
        return Err(Error::BadParams(format!("edge index out of range: {e1}, {e2}")));
    };
    if i != i2 {
        return Err(Error::EdgesNotComposable(a, i, i2, b));
    }
    let prov = merged(&h.provenance[e1], &h.provenance[e2]);
    let mut g1 = h.clone();
    g1.edges[e2] = (a, b);
    g1.provenance[e2] = prov.clone();
    let mut g2 = h.clone();
    g2.edges[e1] = (a, b);
    g2.provenance[e1] = prov;
    Ok((g1, g2))
}

/// [`basic_reduction`] on plain graphs, using the first copies of `e1` and `e2`.
pub fn basic_reduction_edges(g: &MultiDigraph, e1: Edge, e2: Edge) -> Result<(MultiDigraph, MultiDigraph)> {
    if e1.1 != e2.0 {
        return Err(Error::EdgesNotComposable(e1.0, e1.1, e2.0, e2.1));
    }
    let find = |e: Edge| {
        g.edges()
            .iter()
            .position(|&x| x == e)
            .ok_or_else(|| Error::BadParams(format!("edge ({}, {}) is not in the graph", e.0, e.1)))
    };
    let h = ReductionGraph::from_graph(g);
    let (g1, g2) = basic_reduction(&h, find(e1)?, find(e2)?)?;
    Ok((g1.to_graph(), g2.to_graph()))
}

/// The left and right sizes of the trees used at vertex `i`.
pub fn reduction_shape(h: &ReductionGraph, i: usize, a_i_positive: bool) -> Result<(usize, usize)> {
    if i < 2 || i > h.n() {
        return Err(Error::BadParams(format!("reduction vertex {i} must lie in 2..={}", h.n())));
    }
    let ind = h.ind(i);
    if ind == 0 {
        return Err(Error::NoIncomingEdges(i));
    }
    Ok((ind + a_i_positive as usize, h.outd(i)))
}

/// The graph `G_T^{(i)}`: every incoming and outgoing edge at `i` is replaced
/// by one edge per tree edge. Left vertices are the incoming edges in edge
/// order, followed by `i` itself when `a_i > 0`; right vertices are the
/// outgoing edges by target. When `a_i = 0` a fresh edge `(i, n+1)` is added.
pub fn compounded_reduction(
    h: &ReductionGraph,
    i: usize,
    a_i_positive: bool,
    tree: &NoncrossingTree,
) -> Result<ReductionGraph> {
    let (left, right) = reduction_shape(h, i, a_i_positive)?;
    if tree.left_size() != left || tree.right_size() != right {
        return Err(Error::TreeShapeMismatch(format!(
            "vertex {i} needs a {left} x {right} tree, got {} x {}",
            tree.left_size(),
            tree.right_size()
        )));
    }
    let inc = h.incoming(i);
    let out = h.outgoing(i);
    let mut res = ReductionGraph { vertex_count: h.vertex_count, edges: Vec::new(), provenance: Vec::new() };
    for (k, &e) in h.edges.iter().enumerate() {
        if e.0 != i && e.1 != i {
            res.edges.push(e);
            res.provenance.push(h.provenance[k].clone());
        }
    }
    for (p, q) in tree.edges() {
        let e2 = out[q];
        let target = h.edges[e2].1;
        if p < inc.len() {
            let e1 = inc[p];
            res.edges.push((h.edges[e1].0, target));
            res.provenance.push(merged(&h.provenance[e1], &h.provenance[e2]));
        } else {
            res.edges.push((i, target));
            res.provenance.push(h.provenance[e2].clone());
        }
    }
    if !a_i_positive {
        res.edges.push((i, h.sink()));
        res.provenance.push(Vec::new());
    }
    Ok(res)
}

/// All `(T, G_T^{(i)})` of one compounded reduction.
pub fn compounded_children(
    h: &ReductionGraph,
    i: usize,
    a_i_positive: bool,
) -> Result<Vec<(NoncrossingTree, ReductionGraph)>> {
    let (left, right) = reduction_shape(h, i, a_i_positive)?;
    NoncrossingTree::all(left, right)
        .into_iter()
        .map(|t| compounded_reduction(h, i, a_i_positive, &t).map(|child| (t, child)))
        .collect()
}

fn check_inputs(g: &MultiDigraph, a: &Netflow) -> Result<()> {
    g.require_outgoing_all()?;
    a.check_for(g)?;
    a.require_nonnegative()
}

/// How a node of a reduction tree ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafKind {
    /// `G(m)`.
    FullDimensional(Vec<u64>),
    /// Some vertex has incoming but no outgoing edges.
    LowerDimensional,
}

/// What produced a node from its parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Compounded { vertex: usize, composition: Vec<u64> },
    /// `left` is the child that drops `(i, b)`.
    Basic { vertex: usize, incoming: Edge, outgoing: Edge, left: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    pub step: Option<Step>,
    pub graph: ReductionGraph,
    /// Exponents of `x^H` over vertices `1..=n+1` (basic reduction trees only).
    pub monomial_out: Option<Vec<i64>>,
    /// Exponents of `x^{H'}` over vertices `1..=n+1` (basic reduction trees only).
    pub monomial_in: Option<Vec<i64>>,
    pub leaf: Option<LeafKind>,
    /// False for nodes left unexpanded because the node cap was reached.
    pub expanded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Ccrt,
    Brt,
}

/// An explicit reduction tree, possibly truncated at a node cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTree {
    pub kind: TreeKind,
    pub nodes: Vec<TreeNode>,
    pub node_cap: usize,
    pub truncated: bool,
}

impl ReductionTree {
    fn push(&mut self, parent: Option<usize>, step: Option<Step>, graph: ReductionGraph) -> Option<usize> {
        if self.nodes.len() >= self.node_cap {
            self.truncated = true;
            return None;
        }
        let id = self.nodes.len();
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        self.nodes.push(TreeNode {
            id,
            parent,
            children: Vec::new(),
            depth,
            step,
            graph,
            monomial_out: None,
            monomial_in: None,
            leaf: None,
            expanded: true,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        Some(id)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.leaf.is_some())
    }

    /// Steps from the root to `id`.
    pub fn path_steps(&self, id: usize) -> Vec<&Step> {
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            steps.extend(self.nodes[cur].step.as_ref());
            cur = p;
        }
        steps.reverse();
        steps
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "id": n.id,
                    "parent": n.parent,
                    "depth": n.depth,
                    "step": n.step,
                    "edges": n.graph.edges().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
                    "provenance": n.graph.provenance(),
                    "monomial_out": n.monomial_out,
                    "monomial_in": n.monomial_in,
                    "leaf": n.leaf.is_some(),
                    "full_dimensional": n.leaf.as_ref().map(|l| matches!(l, LeafKind::FullDimensional(_))),
                    // Drawn boxed in the DOT export.
                    "boxed": matches!(n.leaf, Some(LeafKind::FullDimensional(_))),
                    "m": match &n.leaf { Some(LeafKind::FullDimensional(m)) => Some(m.clone()), _ => None },
                    "expanded": n.expanded,
                })
            })
            .collect();
        json!({
            "schema": "flowvol/1",
            "kind": self.kind,
            "node_cap": self.node_cap,
            "truncated": self.truncated,
            "nodes": nodes,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph reduction {\n  node [fontname=\"monospace\"];\n");
        if self.truncated {
            s.push_str(&format!("  // truncated at {} nodes\n", self.node_cap));
        }
        for n in &self.nodes {
            let edges: Vec<String> = (0..n.graph.edges().len()).map(|k| n.graph.edge_key(k)).collect();
            let body = edges.join(" ");
            let (label, attrs) = match &n.leaf {
                Some(LeafKind::FullDimensional(m)) => {
                    let m: Vec<String> = m.iter().map(u64::to_string).collect();
                    (format!("G({})\\n{body}", m.join(",")), ", shape=box, peripheries=2")
                }
                Some(LeafKind::LowerDimensional) => (format!("{body}\\nlower-dim"), ", color=red, fontcolor=red"),
                None if !n.expanded => (format!("{body}\\n..."), ", style=dashed"),
                None => (body, ""),
            };
            s.push_str(&format!("  n{} [label=\"{}\"{}];\n", n.id, label, attrs));
        }
        for n in &self.nodes {
            if let Some(p) = n.parent {
                let label = match &n.step {
                    Some(Step::Compounded { vertex, composition }) => format!("CR {vertex}: {composition:?}"),
                    Some(Step::Basic { vertex, left, .. }) => format!("BR {vertex} {}", if *left { "L" } else { "R" }),
                    None => String::new(),
                };
                s.push_str(&format!("  n{p} -> n{} [label=\"{label}\"];\n", n.id));
            }
        }
        if self.truncated {
            s.push_str("  truncated [label=\"truncated\", shape=plaintext];\n");
        }
        s.push_str("}\n");
        s
    }
}

/// The canonical compounded reduction tree: compounded reductions at
/// vertices `n, n-1, ..., 2`, skipping vertices without incoming edges.
pub fn ccrt_tree(g: &MultiDigraph, a: &Netflow, node_cap: usize) -> Result<ReductionTree> {
    check_inputs(g, a)?;
    let mut tree = ReductionTree { kind: TreeKind::Ccrt, nodes: Vec::new(), node_cap, truncated: false };
    let root = tree.push(None, None, ReductionGraph::from_graph(g)).ok_or(Error::EnumerationCapExceeded { cap: node_cap })?;
    let mut stack = vec![(root, g.n())];
    while let Some((id, mut v)) = stack.pop() {
        let h = tree.nodes[id].graph.clone();
        while v >= 2 && h.ind(v) == 0 {
            v -= 1;
        }
        if v < 2 {
            tree.nodes[id].leaf = Some(match h.leaf_signature() {
                Some(m) => LeafKind::FullDimensional(m),
                None => LeafKind::LowerDimensional,
            });
            continue;
        }
        let children = compounded_children(&h, v, a.free()[v - 1] > 0)?;
        let wanted = children.len();
        let mut created = Vec::new();
        for (t, child) in children {
            let step = Step::Compounded { vertex: v, composition: t.composition().to_vec() };
            match tree.push(Some(id), Some(step), child) {
                Some(c) => created.push(c),
                None => break,
            }
        }
        if created.len() < wanted {
            tree.nodes[id].expanded = false;
        }
        for c in created.into_iter().rev() {
            stack.push((c, v - 1));
        }
    }
    Ok(tree)
}

/// A full-dimensional leaf of the canonical tree with the trees on its path,
/// listed as `(vertex, tree)` in reduction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcrtLeaf {
    pub m: Vec<u64>,
    pub trees: Vec<(usize, NoncrossingTree)>,
}

/// Every leaf of the explicit canonical tree. Fails when the tree would
/// need more than `node_cap` nodes.
pub fn ccrt_leaves(g: &MultiDigraph, a: &Netflow, node_cap: usize) -> Result<Vec<CcrtLeaf>> {
    let tree = ccrt_tree(g, a, node_cap)?;
    if tree.truncated {
        return Err(Error::EnumerationCapExceeded { cap: node_cap });
    }
    let mut leaves = Vec::new();
    for node in tree.leaves() {
        let m = match &node.leaf {
            Some(LeafKind::FullDimensional(m)) => m.clone(),
            _ => unreachable!("compounded reductions never leave a dead end"),
        };
        let mut trees = Vec::new();
        let mut cur = node.id;
        let mut path = Vec::new();
        while let Some(p) = tree.nodes[cur].parent {
            path.push(cur);
            cur = p;
        }
        for id in path.into_iter().rev() {
            let Some(Step::Compounded { vertex, composition }) = &tree.nodes[id].step else { unreachable!() };
            let parent = &tree.nodes[tree.nodes[id].parent.expect("non-root")].graph;
            let (l, r) = reduction_shape(parent, *vertex, a.free()[vertex - 1] > 0)?;
            trees.push((*vertex, NoncrossingTree::new(l, r, composition.clone())?));
        }
        leaves.push(CcrtLeaf { m, trees });
    }
    Ok(leaves)
}

/// Leaf signatures of the explicit canonical tree with their counts.
pub fn ccrt_leaf_counts(g: &MultiDigraph, a: &Netflow, node_cap: usize) -> Result<BTreeMap<Vec<u64>, BigUint>> {
    let mut counts = BTreeMap::new();
    for leaf in ccrt_leaves(g, a, node_cap)? {
        *counts.entry(leaf.m).or_insert_with(BigUint::zero) += 1u32;
    }
    Ok(counts)
}

/// A cell type of the canonical subdivision with everything the volume and
/// lattice-point formulas attach to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellSpec {
    pub m: Vec<u64>,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub multiplicity: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub volume_term: BigUint,
    #[serde(serialize_with = "crate::serde_big::bigint")]
    pub points_term_binomial: BigInt,
    #[serde(serialize_with = "crate::serde_big::bigint")]
    pub points_term_multiset: BigInt,
}

/// Normalized volume of `F_{G(m)}(a)`.
pub fn cell_volume(m: &[u64], a: &Netflow) -> Result<BigUint> {
    if let Some(p) = m.iter().position(|&x| x == 0) {
        return Err(Error::ZeroPart(p + 1));
    }
    if a.len() != m.len() {
        return Err(Error::NetflowLength { expected: m.len(), found: a.len() });
    }
    let j: Vec<u64> = m.iter().map(|&x| x - 1).collect();
    let mut v = BigInt::from(multinomial(&j));
    for (&ai, &ji) in a.free().iter().zip(&j) {
        v *= num_traits::pow(BigInt::from(ai), ji as usize);
    }
    v.to_biguint().ok_or(Error::NegativeNetflow(a.free().iter().position(|&x| x < 0).map_or(0, |p| p + 1)))
}

/// Cells of the canonical subdivision of `F_G(a)` from the dominance
/// characterization: `m = j + 1` over compositions `j` dominating `out`,
/// with `m_i = 1` wherever `a_i = 0`, and multiplicity `K_G(m - outd, 0)`.
/// Signatures with multiplicity zero are omitted.
pub fn ccrt_cells(g: &MultiDigraph, a: &Netflow) -> Result<Vec<CellSpec>> {
    check_inputs(g, a)?;
    let table = LidskiiTable::new(g)?;
    let vol = table.volume_terms(a)?;
    let bin = table.points_terms(a, PointsFormula::Binomial)?;
    let ms = table.points_terms(a, PointsFormula::Multiset)?;
    let mut cells = Vec::new();
    for (idx, j) in table.compositions().iter().enumerate() {
        if j.iter().zip(a.free()).any(|(&ji, &ai)| ai == 0 && ji > 0) {
            continue;
        }
        let multiplicity = table.kpf_factor(idx).clone();
        if multiplicity.is_zero() {
            continue;
        }
        cells.push(CellSpec {
            m: j.iter().map(|&x| x + 1).collect(),
            multiplicity,
            volume_term: vol[idx].coefficient.to_biguint().expect("volume coefficients are nonnegative"),
            points_term_binomial: bin[idx].coefficient.clone(),
            points_term_multiset: ms[idx].coefficient.clone(),
        });
    }
    Ok(cells)
}

fn in_edges_by_vertex(g: &MultiDigraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); g.vertex_count() + 1];
    for (k, &(_, j)) in g.edges().iter().enumerate() {
        inc[j].push(k);
    }
    inc
}

/// Reads off the trees of a canonical-tree path from an integral flow with
/// netflow `(m - outd, 0)`. At vertex `i` the composition lists the flows on
/// the incoming edges of `G` followed, when `a_i > 0`, by `m_i - 1`.
pub fn phi_bijection(
    g: &MultiDigraph,
    a: &Netflow,
    m: &[u64],
    flow: &FlowAssignment,
) -> Result<Vec<(usize, NoncrossingTree)>> {
    check_inputs(g, a)?;
    let n = g.n();
    if m.len() != n || flow.flows.len() != g.edge_count() {
        return Err(Error::NetflowMismatch(format!(
            "expected {n} parts and {} edge flows, got {} and {}",
            g.edge_count(),
            m.len(),
            flow.flows.len()
        )));
    }
    let profile = g.degree_profile();
    let mut expected: Vec<i64> = (1..=n).map(|v| m[v - 1] as i64 - profile.outd(v) as i64).collect();
    expected.push(0);
    let actual = flow.netflow(g);
    if actual != expected {
        return Err(Error::NetflowMismatch(format!("flow has netflow {actual:?}, expected {expected:?}")));
    }
    let inc = in_edges_by_vertex(g);
    let mut trees = Vec::new();
    for i in (2..=n).rev() {
        if inc[i].is_empty() {
            continue;
        }
        let positive = a.free()[i - 1] > 0;
        let mut comp: Vec<u64> = inc[i].iter().map(|&e| flow.flows[e]).collect();
        if positive {
            comp.push(m[i - 1] - 1);
        } else if m[i - 1] != 1 {
            return Err(Error::TreeShapeMismatch(format!("vertex {i} has a_i = 0 but m_i = {}", m[i - 1])));
        }
        let outflow: u64 = g.edges().iter().zip(&flow.flows).filter(|(e, _)| e.0 == i).map(|(_, &f)| f).sum();
        let right = profile.outd(i) + outflow as usize;
        trees.push((i, NoncrossingTree::new(comp.len(), right, comp)?));
    }
    Ok(trees)
}

/// Inverse of [`phi_bijection`]: rebuilds the flow from the trees. Edges
/// into the sink carry zero flow.
pub fn psi_inverse(g: &MultiDigraph, trees: &[(usize, NoncrossingTree)]) -> Result<FlowAssignment> {
    let n = g.n();
    let inc = in_edges_by_vertex(g);
    let profile = g.degree_profile();
    let mut flows = vec![0u64; g.edge_count()];
    let mut by_vertex: BTreeMap<usize, &NoncrossingTree> = BTreeMap::new();
    for (v, t) in trees {
        if *v < 2 || *v > n || by_vertex.insert(*v, t).is_some() {
            return Err(Error::TreeShapeMismatch(format!("unexpected or repeated tree at vertex {v}")));
        }
    }
    for i in (2..=n).rev() {
        let tree = by_vertex.remove(&i);
        if inc[i].is_empty() {
            if tree.is_some() {
                return Err(Error::TreeShapeMismatch(format!("vertex {i} has no incoming edges")));
            }
            continue;
        }
        let tree = tree.ok_or_else(|| Error::TreeShapeMismatch(format!("missing tree at vertex {i}")))?;
        let left = tree.left_size();
        if left != inc[i].len() && left != inc[i].len() + 1 {
            return Err(Error::TreeShapeMismatch(format!("tree at vertex {i} has {left} left vertices")));
        }
        let outflow: u64 = g.edges().iter().zip(&flows).filter(|(e, _)| e.0 == i).map(|(_, &f)| f).sum();
        let right = profile.outd(i) + outflow as usize;
        if tree.right_size() != right {
            return Err(Error::TreeShapeMismatch(format!(
                "tree at vertex {i} has {} right vertices, expected {right}",
                tree.right_size()
            )));
        }
        for (k, &e) in inc[i].iter().enumerate() {
            flows[e] = tree.composition()[k];
        }
    }
    Ok(FlowAssignment { flows })
}

/// The signature `m` that a tuple of trees leads to.
pub fn trees_signature(g: &MultiDigraph, trees: &[(usize, NoncrossingTree)]) -> Result<Vec<u64>> {
    let flow = psi_inverse(g, trees)?;
    let net = flow.netflow(g);
    let profile = g.degree_profile();
    Ok((1..=g.n()).map(|v| (net[v - 1] + profile.outd(v) as i64) as u64).collect())
}

/// Number of cells `M` of the canonical subdivision for positive netflows:
/// the sum of `K_G(j - out, 0)` over dominance compositions `j`.
pub fn num_cells(g: &MultiDigraph) -> Result<BigUint> {
    let table = LidskiiTable::new(g)?;
    Ok((0..table.len()).map(|idx| table.kpf_factor(idx).clone()).sum())
}

/// The five quantities that all count cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCountChecks {
    /// Leaves of the explicit canonical tree for `a = (1, ..., 1)`; absent
    /// when the tree exceeds the node cap.
    #[serde(serialize_with = "crate::serde_big::opt_biguint")]
    pub explicit_leaves: Option<BigUint>,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub kostant_sum: BigUint,
    /// `K_{G*}(m - n, -out_1, ..., -out_n, 0)`.
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub star_points: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub star_volume: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub circ_volume: BigUint,
}

impl CellCountChecks {
    pub fn all_equal(&self) -> bool {
        let m = &self.kostant_sum;
        self.explicit_leaves.as_ref().map_or(true, |e| e == m)
            && &self.star_points == m
            && &self.star_volume == m
            && &self.circ_volume == m
    }
}

pub fn num_cells_crosschecks(g: &MultiDigraph, node_cap: usize) -> Result<CellCountChecks> {
    g.require_outgoing_all()?;
    let n = g.n();
    let kostant_sum = num_cells(g)?;
    let explicit_leaves = match ccrt_tree(g, &Netflow::ones(n), node_cap) {
        Ok(t) if !t.truncated => Some(BigUint::from(t.leaves().count())),
        Ok(_) => None,
        Err(e) => return Err(e),
    };
    let star = g.star_graph();
    let out = g.degree_profile().shifted_out();
    let mut net = vec![g.generic_dimension()];
    net.extend(out.iter().map(|&o| -o));
    net.push(0);
    let star_points = kpf(&star, &net)?;
    let star_volume = lidskii_volume(&star, &Netflow::unit(n + 1))?;
    let circ_volume = lidskii_volume(&g.circ_graph(), &Netflow::unit(n + 1))?;
    Ok(CellCountChecks { explicit_leaves, kostant_sum, star_points, star_volume, circ_volume })
}

/// `det[ C(out_{i+1} + ... + out_n + 1, i - j + 1) ]` for `1 <= i, j <= n-1`.
pub fn cell_types_determinant(out: &[i64]) -> BigInt {
    let n = out.len();
    if n <= 1 {
        return BigInt::one();
    }
    let suffix = |i: usize| -> i64 { out[i..].iter().sum() };
    let matrix: Vec<Vec<BigInt>> = (1..n)
        .map(|i| {
            let top = suffix(i) + 1;
            (1..n)
                .map(|j| {
                    let k = i as i64 - j as i64 + 1;
                    if k < 0 {
                        BigInt::zero()
                    } else {
                        generalized_binomial(top, k as u64)
                    }
                })
                .collect()
        })
        .collect();
    bareiss_determinant(&matrix)
}

/// The number of cell types `N`, by determinant and by direct count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellTypeCount {
    #[serde(serialize_with = "crate::serde_big::bigint")]
    pub determinant: BigInt,
    /// Compositions of `m - n` dominating `out`.
    pub dominance_count: usize,
    /// Those with `K_G(j - out, 0) > 0`, i.e. signatures that actually occur.
    pub occurring: usize,
}

pub fn num_cell_types(g: &MultiDigraph) -> Result<CellTypeCount> {
    let table = LidskiiTable::new(g)?;
    let occurring = (0..table.len()).filter(|&idx| !table.kpf_factor(idx).is_zero()).count();
    Ok(CellTypeCount { determinant: cell_types_determinant(table.out()), dominance_count: table.len(), occurring })
}

/// Which monomial bookkeeping a basic reduction tree uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BrtMode {
    /// Left steps record `x_a / x_i`; leaves give the binomial formula.
    Out,
    /// Right steps record `x_i / x_b`; leaves give the multiset formula.
    In,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrtLeaf {
    pub node: usize,
    /// `Some(m)` for a full-dimensional leaf `G(m)`.
    pub m: Option<Vec<u64>>,
    /// The netflow `a - H` (or `a - H'`) the leaf is evaluated at.
    pub shifted_netflow: Vec<i64>,
    /// `K_H` at the shifted netflow, computed directly.
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub contribution: BigUint,
    /// The product formula for full-dimensional leaves.
    #[serde(serialize_with = "crate::serde_big::opt_bigint")]
    pub closed_form: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrtResult {
    pub mode: BrtMode,
    pub tree: ReductionTree,
    pub leaves: Vec<BrtLeaf>,
}

impl BrtResult {
    pub fn total_contribution(&self) -> BigUint {
        self.leaves.iter().map(|l| &l.contribution).sum()
    }

    pub fn closed_form_total(&self) -> BigInt {
        self.leaves.iter().filter_map(|l| l.closed_form.as_ref()).sum()
    }

    pub fn full_dimensional_counts(&self) -> BTreeMap<Vec<u64>, BigUint> {
        let mut counts = BTreeMap::new();
        for m in self.leaves.iter().filter_map(|l| l.m.as_ref()) {
            *counts.entry(m.clone()).or_insert_with(BigUint::zero) += 1u32;
        }
        counts
    }
}

/// The basic reduction tree that reduces at vertices `n, ..., 2`, each time
/// pairing the incoming edge with the smallest source and the outgoing edge
/// with the largest target (earliest copies first). The tree does not depend
/// on `a`; `a` and `mode` only enter the leaf contributions.
pub fn brt_leaves(g: &MultiDigraph, a: &Netflow, mode: BrtMode, node_cap: usize) -> Result<BrtResult> {
    check_inputs(g, a)?;
    let tree = brt_tree(g, node_cap);
    let profile = g.degree_profile();
    let n = g.n();
    let full = a.full();
    let mut leaves = Vec::new();
    for node in tree.leaves() {
        let monomial = match mode {
            BrtMode::Out => node.monomial_out.as_ref(),
            BrtMode::In => node.monomial_in.as_ref(),
        }
        .expect("basic reduction nodes carry monomials");
        let shifted: Vec<i64> = full.iter().zip(monomial).map(|(x, y)| x - y).collect();
        let contribution = kpf(&node.graph.to_graph(), &shifted)?;
        let m = match &node.leaf {
            Some(LeafKind::FullDimensional(m)) => Some(m.clone()),
            _ => None,
        };
        let closed_form = m.as_ref().map(|m| {
            (1..=n)
                .map(|i| {
                    let k = m[i - 1] - 1;
                    let ai = a.free()[i - 1];
                    match mode {
                        BrtMode::Out => generalized_binomial(ai + profile.outd(i) as i64 - 1, k),
                        BrtMode::In => multiset_coeff(ai - profile.inn(i), k),
                    }
                })
                .product::<BigInt>()
        });
        leaves.push(BrtLeaf { node: node.id, m, shifted_netflow: shifted, contribution, closed_form });
    }
    Ok(BrtResult { mode, tree, leaves })
}

/// The explicit basic reduction tree with both monomials on every node.
pub fn brt_tree(g: &MultiDigraph, node_cap: usize) -> ReductionTree {
    let n = g.n();
    let mut tree = ReductionTree { kind: TreeKind::Brt, nodes: Vec::new(), node_cap, truncated: false };
    let Some(root) = tree.push(None, None, ReductionGraph::from_graph(g)) else {
        return tree;
    };
    tree.nodes[root].monomial_out = Some(vec![0; n + 1]);
    tree.nodes[root].monomial_in = Some(vec![0; n + 1]);
    let mut stack = vec![(root, n)];
    while let Some((id, mut v)) = stack.pop() {
        let h = tree.nodes[id].graph.clone();
        while v >= 2 && (h.ind(v) == 0 || h.outd(v) == 0) {
            v -= 1;
        }
        if v < 2 {
            tree.nodes[id].leaf = Some(match h.leaf_signature() {
                Some(m) => LeafKind::FullDimensional(m),
                None => LeafKind::LowerDimensional,
            });
            continue;
        }
        let inc = h.incoming(v);
        let e1 = *inc.iter().min_by_key(|&&k| (h.edges[k].0, k)).expect("vertex has incoming edges");
        let out = h.outgoing(v);
        let e2 = *out.iter().max_by_key(|&&k| (h.edges[k].1, std::cmp::Reverse(k))).expect("vertex has outgoing edges");
        let (src, tgt) = (h.edges[e1].0, h.edges[e2].1);
        let (g1, g2) = basic_reduction(&h, e1, e2).expect("edges share vertex v");
        let mo = tree.nodes[id].monomial_out.clone().expect("set on every node");
        let mi = tree.nodes[id].monomial_in.clone().expect("set on every node");
        let mut created = Vec::new();
        for (left, child) in [(true, g1), (false, g2)] {
            let step = Step::Basic { vertex: v, incoming: (src, v), outgoing: (v, tgt), left };
            let Some(c) = tree.push(Some(id), Some(step), child) else { break };
            let (mut co, mut ci) = (mo.clone(), mi.clone());
            if left {
                co[src - 1] += 1;
                co[v - 1] -= 1;
            } else {
                ci[v - 1] += 1;
                ci[tgt - 1] -= 1;
            }
            tree.nodes[c].monomial_out = Some(co);
            tree.nodes[c].monomial_in = Some(ci);
            created.push(c);
        }
        if created.len() < 2 {
            tree.nodes[id].expanded = false;
        }
        for c in created.into_iter().rev() {
            stack.push((c, v));
        }
    }
    tree
}
