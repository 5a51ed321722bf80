//! Directed acyclic multigraphs on `1..=n+1`, their degree data, and the
//! derived graphs used throughout the crate.
//!
//! Every edge `(i, j)` satisfies `i < j`, so acyclicity holds by construction.
//! Edge order is insertion order and every enumeration below walks it in that
//! order, which keeps all outputs reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiDigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

/// Degree statistics, indexed by vertex (`outd(1)` is the outdegree of vertex 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub outdeg: Vec<usize>,
    pub indeg: Vec<usize>,
}

impl DegreeProfile {
    pub fn outd(&self, v: usize) -> usize {
        self.outdeg[v - 1]
    }

    pub fn ind(&self, v: usize) -> usize {
        self.indeg[v - 1]
    }

    /// `outd(v) - 1`.
    pub fn out(&self, v: usize) -> i64 {
        self.outd(v) as i64 - 1
    }

    /// `ind(v) - 1`.
    pub fn inn(&self, v: usize) -> i64 {
        self.ind(v) as i64 - 1
    }

    /// Shifted outdegrees of the non-sink vertices `1..=n`.
    pub fn shifted_out(&self) -> Vec<i64> {
        (1..self.outdeg.len()).map(|v| self.out(v)).collect()
    }

    /// Shifted indegrees of all vertices `1..=n+1`.
    pub fn shifted_in(&self) -> Vec<i64> {
        (1..=self.indeg.len()).map(|v| self.inn(v)).collect()
    }
}

impl MultiDigraph {
    /// Validated constructor: `n + 1` vertices and the given edge list.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 || edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let max = n + 1;
        for &(i, j) in &edges {
            if i == 0 || j == 0 || i > max || j > max {
                return Err(Error::VertexRange { i, j, max });
            }
            if i >= j {
                return Err(Error::EdgeOrientation(i, j));
            }
        }
        Ok(MultiDigraph { vertex_count: max, edges })
    }

    /// Constructor for graphs produced by internal rewrites that preserve
    /// the orientation invariant.
    pub(crate) fn from_parts(vertex_count: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.iter().all(|&(i, j)| 1 <= i && i < j && j <= vertex_count));
        MultiDigraph { vertex_count, edges }
    }

    /// Number of non-sink vertices.
    pub fn n(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sink(&self) -> usize {
        self.vertex_count
    }

    /// `m - n`, the dimension of the flow polytope for a generic netflow.
    pub fn generic_dimension(&self) -> i64 {
        self.edge_count() as i64 - self.n() as i64
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let mut outdeg = vec![0; self.vertex_count];
        let mut indeg = vec![0; self.vertex_count];
        for &(i, j) in &self.edges {
            outdeg[i - 1] += 1;
            indeg[j - 1] += 1;
        }
        DegreeProfile { outdeg, indeg }
    }

    /// First vertex among `1..=n` without an outgoing edge.
    pub fn missing_outgoing(&self) -> Option<usize> {
        let p = self.degree_profile();
        (1..=self.n()).find(|&v| p.outd(v) == 0)
    }

    /// First vertex among `2..=n+1` without an incoming edge.
    pub fn missing_incoming(&self) -> Option<usize> {
        let p = self.degree_profile();
        (2..=self.vertex_count).find(|&v| p.ind(v) == 0)
    }

    pub fn has_outgoing_all(&self) -> bool {
        self.missing_outgoing().is_none()
    }

    pub fn has_incoming_all(&self) -> bool {
        self.missing_incoming().is_none()
    }

    pub fn require_outgoing_all(&self) -> Result<()> {
        match self.missing_outgoing() {
            Some(v) => Err(Error::MissingOutgoingEdge(v)),
            None => Ok(()),
        }
    }

    pub fn require_incoming_all(&self) -> Result<()> {
        match self.missing_incoming() {
            Some(v) => Err(Error::MissingIncomingEdge(v)),
            None => Ok(()),
        }
    }

    /// Weak connectivity of the underlying undirected multigraph.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..=self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
        let root = find(&mut parent, 1);
        (2..=self.vertex_count).all(|v| find(&mut parent, v) == root)
    }

    /// Edge multisets agree, ignoring order.
    pub fn same_edges_as(&self, other: &MultiDigraph) -> bool {
        if self.vertex_count != other.vertex_count {
            return false;
        }
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// The reversed graph: edge `(p, q)` becomes `(n+2-q, n+2-p)`.
    pub fn reverse(&self) -> MultiDigraph {
        let top = self.vertex_count + 1;
        let edges = self.edges.iter().map(|&(p, q)| (top - q, top - p)).collect();
        MultiDigraph::from_parts(self.vertex_count, edges)
    }

    /// Adds a new source joined to the old vertices `1..=n`. The new source
    /// becomes vertex 1 and old vertex `i` becomes `i + 1`; the original
    /// edges come first in the edge list.
    pub fn star_graph(&self) -> MultiDigraph {
        self.with_new_source(self.n())
    }

    /// Like [`star_graph`](Self::star_graph) but the new source is also
    /// joined to the old sink.
    pub fn circ_graph(&self) -> MultiDigraph {
        self.with_new_source(self.n() + 1)
    }

    fn with_new_source(&self, reach: usize) -> MultiDigraph {
        let mut edges: Vec<Edge> = self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
        edges.extend((1..=reach).map(|v| (1, v + 1)));
        MultiDigraph::from_parts(self.vertex_count + 1, edges)
    }

    /// `G(m)`: `m_i` parallel edges `(i, n+1)` for each `i`.
    pub fn leaf_graph(m: &[u64]) -> Result<MultiDigraph> {
        if m.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(pos) = m.iter().position(|&p| p == 0) {
            return Err(Error::ZeroPart(pos + 1));
        }
        let sink = m.len() + 1;
        let edges = m
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat((i + 1, sink)).take(k as usize))
            .collect();
        Ok(MultiDigraph::from_parts(sink, edges))
    }

    /// The complete graph on `vertices` vertices.
    pub fn complete(vertices: usize) -> Result<MultiDigraph> {
        if vertices < 2 {
            return Err(Error::BadParams(format!("complete graph needs at least 2 vertices, got {vertices}")));
        }
        let edges = (1..vertices)
            .flat_map(|i| (i + 1..=vertices).map(move |j| (i, j)))
            .collect();
        Ok(MultiDigraph::from_parts(vertices, edges))
    }

    /// The Pitman–Stanley graph: edges `(i, i+1)` and `(i, n+1)` for `i = 1..=n`.
    pub fn pitman_stanley(n: usize) -> Result<MultiDigraph> {
        if n == 0 {
            return Err(Error::BadParams("Pitman-Stanley graph needs n >= 1".into()));
        }
        let edges = (1..=n).flat_map(|i| [(i, i + 1), (i, n + 1)]).collect();
        Ok(MultiDigraph::from_parts(n + 1, edges))
    }

    /// The path `1 -> 2 -> ... -> n+1` plus `c_i` extra edges `(i, n+1)`.
    pub fn pi_c(c: &[u64]) -> Result<MultiDigraph> {
        if c.is_empty() {
            return Err(Error::BadParams("pi_c needs at least one multiplicity".into()));
        }
        let n = c.len();
        let mut edges: Vec<Edge> = (1..=n).map(|i| (i, i + 1)).collect();
        for (i, &k) in c.iter().enumerate() {
            edges.extend(std::iter::repeat((i + 1, n + 1)).take(k as usize));
        }
        Ok(MultiDigraph::from_parts(n + 1, edges))
    }

    /// Every directed path from vertex 1 to the sink, as lists of edge
    /// indices. Parallel edges yield distinct paths.
    pub fn source_sink_paths(&self) -> Vec<Vec<usize>> {
        let mut out_edges = vec![Vec::new(); self.vertex_count + 1];
        for (idx, &(i, _)) in self.edges.iter().enumerate() {
            out_edges[i].push(idx);
        }
        let mut paths = Vec::new();
        let mut stack = Vec::new();
        self.walk_paths(1, &out_edges, &mut stack, &mut paths);
        paths
    }

    fn walk_paths(&self, v: usize, out_edges: &[Vec<usize>], stack: &mut Vec<usize>, paths: &mut Vec<Vec<usize>>) {
        if v == self.sink() {
            paths.push(stack.clone());
            return;
        }
        for &idx in &out_edges[v] {
            stack.push(idx);
            self.walk_paths(self.edges[idx].1, out_edges, stack, paths);
            stack.pop();
        }
    }
}

/// Builtin graph families by name: `complete` takes the vertex count,
/// `pitman_stanley` takes `n`, `pi_c` takes the multiplicities.
pub fn family(name: &str, params: &[u64]) -> Result<MultiDigraph> {
    let single = |what: &str| -> Result<usize> {
        match params {
            [p] => Ok(*p as usize),
            _ => Err(Error::BadParams(format!("{what} takes exactly one parameter"))),
        }
    };
    match name {
        "complete" | "k" => MultiDigraph::complete(single("complete")?),
        "pitman_stanley" | "ps" => MultiDigraph::pitman_stanley(single("pitman_stanley")?),
        "pi_c" | "pic" => MultiDigraph::pi_c(params),
        other => Err(Error::BadParams(format!("unknown family `{other}`"))),
    }
}

/// The free entries `a_1..a_n` of a netflow; the sink entry is always
/// `-(a_1 + ... + a_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Netflow {
    free: Vec<i64>,
}

impl Netflow {
    pub fn new(free: Vec<i64>) -> Self {
        Netflow { free }
    }

    pub fn ones(n: usize) -> Self {
        Netflow::new(vec![1; n])
    }

    /// `e_1 - e_{n+1}`.
    pub fn unit(n: usize) -> Self {
        let mut free = vec![0; n];
        if n > 0 {
            free[0] = 1;
        }
        Netflow::new(free)
    }

    pub fn free(&self) -> &[i64] {
        &self.free
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.free.iter().all(|&a| a >= 0)
    }

    pub fn full(&self) -> Vec<i64> {
        let mut v = self.free.clone();
        v.push(-self.free.iter().sum::<i64>());
        v
    }

    pub fn scaled(&self, t: i64) -> Netflow {
        Netflow::new(self.free.iter().map(|&a| a * t).collect())
    }

    pub fn check_for(&self, g: &MultiDigraph) -> Result<()> {
        if self.len() != g.n() {
            return Err(Error::NetflowLength { expected: g.n(), found: self.len() });
        }
        Ok(())
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.free.iter().position(|&a| a < 0) {
            Some(p) => Err(Error::NegativeNetflow(p + 1)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> MultiDigraph {
        MultiDigraph::new(3, vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn make_graph_validates() {
        assert_eq!(k4().edge_count(), 6);
        assert_eq!(MultiDigraph::new(1, vec![(1, 2)]).unwrap().edge_count(), 1);
        assert_eq!(MultiDigraph::new(2, vec![(2, 1)]), Err(Error::EdgeOrientation(2, 1)));
        assert_eq!(MultiDigraph::new(2, vec![(1, 4)]), Err(Error::VertexRange { i: 1, j: 4, max: 3 }));
        assert_eq!(MultiDigraph::new(2, vec![]), Err(Error::EmptyGraph));
        assert_eq!(MultiDigraph::new(0, vec![(1, 1)]), Err(Error::EmptyGraph));
    }

    #[test]
    fn degree_profiles() {
        let p = k4().degree_profile();
        assert_eq!(p.outdeg, vec![3, 2, 1, 0]);
        assert_eq!(p.shifted_out(), vec![2, 1, 0]);
        assert_eq!(p.shifted_in(), vec![-1, 0, 1, 2]);

        let ps3 = MultiDigraph::pitman_stanley(3).unwrap().degree_profile();
        assert_eq!(ps3.shifted_out(), vec![1, 1, 1]);

        let e = MultiDigraph::new(1, vec![(1, 2)]).unwrap().degree_profile();
        assert_eq!((e.outdeg, e.indeg), (vec![1, 0], vec![0, 1]));
    }

    #[test]
    fn reversal() {
        assert!(k4().reverse().same_edges_as(&k4()));
        let path = MultiDigraph::new(2, vec![(1, 2), (2, 3)]).unwrap();
        assert!(path.reverse().same_edges_as(&path));
        let fork = MultiDigraph::new(2, vec![(1, 2), (1, 3)]).unwrap();
        assert_eq!(fork.reverse().edges(), &[(2, 3), (1, 3)]);
        assert_eq!(fork.reverse().reverse(), fork);
    }

    #[test]
    fn star_and_circ() {
        let k5 = MultiDigraph::complete(5).unwrap();
        assert!(k4().circ_graph().same_edges_as(&k5));
        let e = MultiDigraph::new(1, vec![(1, 2)]).unwrap();
        assert!(e.star_graph().same_edges_as(&MultiDigraph::new(2, vec![(1, 2), (2, 3)]).unwrap()));
        let ps2 = MultiDigraph::pitman_stanley(2).unwrap();
        let star = ps2.star_graph();
        let expected = MultiDigraph::new(3, vec![(2, 3), (2, 4), (3, 4), (3, 4), (1, 2), (1, 3)]).unwrap();
        assert!(star.same_edges_as(&expected));
        assert_eq!(star.edge_count(), ps2.edge_count() + 2);
        assert_eq!(ps2.circ_graph().edge_count(), ps2.edge_count() + 3);
    }

    #[test]
    fn leaf_graphs() {
        let g = MultiDigraph::leaf_graph(&[3, 2, 1]).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.edges().iter().all(|&(_, j)| j == 4));
        assert_eq!(MultiDigraph::leaf_graph(&[1]).unwrap().edges(), &[(1, 2)]);
        assert_eq!(MultiDigraph::leaf_graph(&[4, 1, 1]).unwrap().edge_count(), 6);
        assert_eq!(MultiDigraph::leaf_graph(&[2, 0]), Err(Error::ZeroPart(2)));
    }

    #[test]
    fn families() {
        let ps3 = family("pitman_stanley", &[3]).unwrap();
        let expected = MultiDigraph::new(3, vec![(1, 2), (2, 3), (3, 4), (1, 4), (2, 4), (3, 4)]).unwrap();
        assert!(ps3.same_edges_as(&expected));
        assert!(family("pi_c", &[1, 1, 1]).unwrap().same_edges_as(&ps3));
        assert_eq!(family("complete", &[4]).unwrap(), k4());
        assert!(family("complete", &[1, 2]).is_err());
        assert!(family("nope", &[1]).is_err());
    }

    #[test]
    fn paths() {
        let paths = k4().source_sink_paths();
        let as_vertices: Vec<Vec<usize>> = paths
            .iter()
            .map(|p| {
                let mut vs = vec![1];
                vs.extend(p.iter().map(|&e| k4().edges()[e].1));
                vs
            })
            .collect();
        assert_eq!(as_vertices, vec![vec![1, 2, 3, 4], vec![1, 2, 4], vec![1, 3, 4], vec![1, 4]]);
        assert_eq!(MultiDigraph::new(1, vec![(1, 2)]).unwrap().source_sink_paths().len(), 1);
        assert!(MultiDigraph::new(2, vec![(2, 3)]).unwrap().source_sink_paths().is_empty());
    }

    #[test]
    fn outgoing_checks() {
        let g = MultiDigraph::new(2, vec![(1, 3)]).unwrap();
        assert_eq!(g.require_outgoing_all(), Err(Error::MissingOutgoingEdge(2)));
        assert_eq!(g.require_incoming_all(), Err(Error::MissingIncomingEdge(2)));
        assert!(!MultiDigraph::new(3, vec![(1, 2), (3, 4)]).unwrap().is_connected());
        assert!(k4().is_connected());
    }
}
