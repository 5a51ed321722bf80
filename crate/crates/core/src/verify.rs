//! A seeded corpus of small graphs and the suite of cross-method identities
//! run over it. Every check compares exact values from independent routes.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::families::{ehrhart_positivity_check, ps_lattice_count, words_total};
use crate::graph::{Edge, MultiDigraph, Netflow};
use crate::kostant::{kpf, kpf_count_via_flows, normalized_volume_or_zero};
use crate::lidskii::{lidskii_points_binomial, lidskii_points_multiset, lidskii_volume, points_indegree, volume_indegree};
use crate::subdivision::{
    basic_reduction, brt_leaves, ccrt_cells, ccrt_leaf_counts, ccrt_leaves, compounded_children, num_cell_types,
    num_cells_crosschecks, phi_bijection, psi_inverse, trees_signature, BrtMode, ReductionGraph, DEFAULT_NODE_CAP,
};

/// Flows listed per cell before the bijection check gives up on a case.
const FLOW_CAP: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct CorpusCase {
    pub label: String,
    pub graph: MultiDigraph,
    pub netflow: Netflow,
    /// Known volume and lattice-point count, for the named examples.
    #[serde(skip)]
    pub expected_volume: Option<BigUint>,
    #[serde(skip)]
    pub expected_points: Option<BigUint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub max_m: usize,
    pub max_a: i64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { seed: 7, count: 200, max_n: 4, max_m: 8, max_a: 3 }
    }
}

/// Random graphs where every non-sink vertex has an outgoing edge. The
/// vertex count `n` is drawn from `1..=max_n` and the edge count from
/// `n..=max(n, max_m)`.
pub fn random_corpus(cfg: &CorpusConfig) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_n = cfg.max_n.max(1);
    (0..cfg.count)
        .map(|k| {
            let n = rng.gen_range(1..=max_n);
            let m = rng.gen_range(n..=cfg.max_m.max(n));
            let mut edges: Vec<Edge> = (1..=n).map(|i| (i, rng.gen_range(i + 1..=n + 1))).collect();
            while edges.len() < m {
                let i = rng.gen_range(1..=n);
                edges.push((i, rng.gen_range(i + 1..=n + 1)));
            }
            let graph = MultiDigraph::new(n, edges).expect("edges point forward inside the vertex range");
            let netflow = Netflow::new((0..n).map(|_| rng.gen_range(0..=cfg.max_a)).collect());
            CorpusCase { label: format!("random#{k}"), graph, netflow, expected_volume: None, expected_points: None }
        })
        .collect()
}

/// The worked examples with their known volumes and lattice-point counts.
pub fn builtin_corpus() -> Vec<CorpusCase> {
    let case = |label: &str, graph: MultiDigraph, a: Vec<i64>, vol: Option<u64>, pts: Option<u64>| CorpusCase {
        label: label.to_string(),
        graph,
        netflow: Netflow::new(a),
        expected_volume: vol.map(BigUint::from),
        expected_points: pts.map(BigUint::from),
    };
    let k = |v| MultiDigraph::complete(v).expect("complete graph");
    let ps = |n| MultiDigraph::pitman_stanley(n).expect("Pitman-Stanley graph");
    let doubled = MultiDigraph::new(2, vec![(1, 2), (1, 2), (2, 3), (2, 3)]).expect("doubled path");
    vec![
        case("k4 (1,1,1)", k(4), vec![1, 1, 1], Some(4), Some(7)),
        // One unit along a path: the CRY polytope, whose points are the 4 paths.
        case("k4 (1,0,0)", k(4), vec![1, 0, 0], Some(1), Some(4)),
        case("k4 (1,1,0)", k(4), vec![1, 1, 0], Some(4), None),
        case("k5 (1,1,1,1)", k(5), vec![1, 1, 1, 1], Some(160), None),
        case("k6 (1,0,0,0,0)", k(6), vec![1, 0, 0, 0, 0], Some(10), Some(16)),
        case("ps3 (1,1,1)", ps(3), vec![1, 1, 1], Some(16), Some(14)),
        case("doubled path (1,1)", doubled, vec![1, 1], Some(4), Some(6)),
        case("pic:1,2,1 (1,1,1)", MultiDigraph::pi_c(&[1, 2, 1]).expect("pi_c"), vec![1, 1, 1], None, None),
        case("single edge (1)", MultiDigraph::new(1, vec![(1, 2)]).expect("edge"), vec![1], Some(1), Some(1)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Known values of the named examples.
    Golden,
    /// Outdegree volume formula against the Ehrhart leading coefficient.
    VolumeFormula,
    /// Binomial and multiset point formulas against the partition function.
    PointFormulas,
    /// `K_G(a) = K_{G^r}(reversed -a)` and the same for volumes.
    Reversal,
    /// Indegree volume and point formulas against the reversed graph.
    Indegree,
    /// Flows to trees and back, and onto the leaves of the explicit tree.
    Bijection,
    /// Explicit canonical tree leaves against the dominance census.
    CanonicalCells,
    /// Full-dimensional leaves of the basic tree against the canonical tree.
    BasicTreeLeaves,
    /// Lower-dimensional leaves of the basic tree count nothing.
    BasicTreeLowerLeaves,
    /// Volumes add up under basic and compounded reductions.
    Additivity,
    /// The five cell counts agree.
    CellCounts,
    /// Cell-type determinant, dominance count and Pitman–Stanley count agree.
    CellTypes,
    /// The word expansion sums to the unit-netflow volume.
    Words,
    /// Ehrhart polynomials of `Pi_n(c)` have positive coefficients.
    Positivity,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::Golden,
        Check::VolumeFormula,
        Check::PointFormulas,
        Check::Reversal,
        Check::Indegree,
        Check::Bijection,
        Check::CanonicalCells,
        Check::BasicTreeLeaves,
        Check::BasicTreeLowerLeaves,
        Check::Additivity,
        Check::CellCounts,
        Check::CellTypes,
        Check::Words,
        Check::Positivity,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The case is outside the check's hypotheses.
    Skip,
    Fail(String),
}

fn agree<T: PartialEq + std::fmt::Debug>(what: &str, values: &[(&str, T)]) -> Verdict {
    let first = &values[0].1;
    if values.iter().all(|(_, v)| v == first) {
        Verdict::Pass
    } else {
        let shown: Vec<String> = values.iter().map(|(k, v)| format!("{k}={v:?}")).collect();
        Verdict::Fail(format!("{what}: {}", shown.join(", ")))
    }
}

fn reversed_netflow(a: &Netflow) -> Vec<i64> {
    a.full().iter().rev().map(|x| -x).collect()
}

/// Runs one check on one case.
pub fn run_check(check: Check, case: &CorpusCase) -> Result<Verdict> {
    let g = &case.graph;
    let a = &case.netflow;
    let n = g.n();
    match check {
        Check::Golden => {
            if case.expected_volume.is_none() && case.expected_points.is_none() {
                return Ok(Verdict::Skip);
            }
            if let Some(vol) = &case.expected_volume {
                let v = lidskii_volume(g, a)?;
                let o = normalized_volume_or_zero(g, a)?;
                let verdict = agree("volume", &[("expected", vol), ("lidskii", &v), ("oracle", &o)]);
                if verdict != Verdict::Pass {
                    return Ok(verdict);
                }
            }
            Ok(match &case.expected_points {
                Some(pts) => agree("points", &[("expected", pts.clone()), ("kpf", kpf(g, &a.full())?)]),
                None => Verdict::Pass,
            })
        }
        Check::VolumeFormula => {
            let v = lidskii_volume(g, a)?;
            let o = normalized_volume_or_zero(g, a)?;
            Ok(agree("volume", &[("lidskii", v), ("ehrhart", o)]))
        }
        Check::PointFormulas => {
            let k = kpf(g, &a.full())?;
            let b = lidskii_points_binomial(g, a)?;
            let m = lidskii_points_multiset(g, a)?;
            Ok(agree("points", &[("kpf", k), ("binomial", b), ("multiset", m)]))
        }
        Check::Reversal => {
            let r = g.reverse();
            let ra = reversed_netflow(a);
            let k = kpf(g, &a.full())?;
            let kr = kpf(&r, &ra)?;
            if k != kr {
                return Ok(agree("reversed points", &[("G", k), ("G^r", kr)]));
            }
            // Unit netflow: F_G(e_1 - e_{n+1}) and F_{G^r}(e_1 - e_{n+1}) share a volume.
            let v = lidskii_volume(g, &Netflow::unit(n))?;
            let vr = normalized_volume_or_zero(&r, &Netflow::unit(n))?;
            Ok(agree("reversed unit volume", &[("G", v), ("G^r", vr)]))
        }
        Check::Indegree => {
            if !g.has_incoming_all() {
                return Ok(Verdict::Skip);
            }
            let r = g.reverse();
            let rb = Netflow::new(a.free().iter().rev().copied().collect());
            let v = volume_indegree(g, a)?;
            let vr = lidskii_volume(&r, &rb)?;
            let mut net = vec![a.free().iter().sum::<i64>()];
            net.extend(a.free().iter().map(|x| -x));
            let p = points_indegree(g, a)?;
            let k = kpf(g, &net)?;
            Ok(match agree("indegree volume", &[("indegree", v), ("reversed", vr)]) {
                Verdict::Pass => agree("indegree points", &[("indegree", p), ("kpf", k)]),
                fail => fail,
            })
        }
        Check::Bijection => bijection(g, a),
        Check::CanonicalCells => {
            let explicit = match ccrt_leaf_counts(g, a, DEFAULT_NODE_CAP) {
                Ok(c) => c,
                Err(crate::Error::EnumerationCapExceeded { .. }) => return Ok(Verdict::Skip),
                Err(e) => return Err(e),
            };
            let explicit: BTreeMap<Vec<u64>, BigUint> =
                explicit.into_iter().filter(|(m, _)| full_dimensional(m, a)).collect();
            let census: BTreeMap<Vec<u64>, BigUint> =
                ccrt_cells(g, a)?.into_iter().map(|c| (c.m, c.multiplicity)).collect();
            Ok(agree("canonical leaves", &[("tree", explicit), ("census", census)]))
        }
        Check::BasicTreeLeaves => {
            let ones = Netflow::ones(n);
            let brt = brt_leaves(g, &ones, BrtMode::Out, DEFAULT_NODE_CAP)?;
            if brt.tree.truncated {
                return Ok(Verdict::Skip);
            }
            let ccrt = ccrt_leaf_counts(g, &ones, DEFAULT_NODE_CAP)?;
            Ok(agree("full-dimensional leaves", &[("basic", brt.full_dimensional_counts()), ("canonical", ccrt)]))
        }
        Check::BasicTreeLowerLeaves => basic_lower_leaves(g, a),
        Check::Additivity => additivity(g, a),
        Check::CellCounts => {
            let c = num_cells_crosschecks(g, DEFAULT_NODE_CAP)?;
            Ok(if c.all_equal() { Verdict::Pass } else { Verdict::Fail(format!("cell counts disagree: {c:?}")) })
        }
        Check::CellTypes => {
            let t = num_cell_types(g)?;
            let out = g.degree_profile().shifted_out();
            let rev: Vec<u64> = out[1..].iter().rev().map(|&o| o as u64).collect();
            let ps = BigInt::from(ps_lattice_count(&rev));
            Ok(agree(
                "cell types",
                &[("determinant", t.determinant), ("dominance", BigInt::from(t.dominance_count)), ("pitman-stanley", ps)],
            ))
        }
        Check::Words => {
            let w = words_total(g)?;
            let v = lidskii_volume(g, &Netflow::ones(n))?;
            Ok(agree("words", &[("words", w), ("volume", v)]))
        }
        Check::Positivity => {
            // Pi_n(c) with c read off the outdegrees and a shifted to be positive.
            let c: Vec<u64> = g.degree_profile().shifted_out()[..n].iter().map(|&o| o as u64).collect();
            let pa: Vec<u64> = a.free().iter().map(|&x| x as u64 + 1).collect();
            Ok(if ehrhart_positivity_check(&c, &pa, 3)? {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("Ehrhart polynomial of Pi(c={c:?}) at {pa:?} is not positive"))
            })
        }
    }
}

/// Vertex 1 is never reduced, so with `a_1 = 0` the explicit tree keeps
/// leaves `G(m)` with `m_1 > 1`. Their polytopes are flat and they are not
/// cells.
fn full_dimensional(m: &[u64], a: &Netflow) -> bool {
    m.iter().zip(a.free()).all(|(&mi, &ai)| ai > 0 || mi == 1)
}

fn bijection(g: &MultiDigraph, a: &Netflow) -> Result<Verdict> {
    let leaves = match ccrt_leaves(g, a, DEFAULT_NODE_CAP) {
        Ok(l) => l,
        Err(crate::Error::EnumerationCapExceeded { .. }) => return Ok(Verdict::Skip),
        Err(e) => return Err(e),
    };
    let outd: Vec<i64> = (1..=g.n()).map(|v| g.degree_profile().outd(v) as i64).collect();
    let mut from_flows = BTreeSet::new();
    for cell in ccrt_cells(g, a)? {
        let mut net: Vec<i64> = cell.m.iter().zip(&outd).map(|(&m, &o)| m as i64 - o).collect();
        net.push(0);
        let flows = match kpf_count_via_flows(g, &net, true, FLOW_CAP) {
            Ok((_, Some(f))) => f,
            Ok((_, None)) => unreachable!("listing was requested"),
            Err(crate::Error::EnumerationCapExceeded { .. }) => return Ok(Verdict::Skip),
            Err(e) => return Err(e),
        };
        for f in flows {
            let trees = phi_bijection(g, a, &cell.m, &f)?;
            if psi_inverse(g, &trees)? != f {
                return Ok(Verdict::Fail(format!("flow {:?} does not survive the round trip", f.flows)));
            }
            if trees_signature(g, &trees)? != cell.m {
                return Ok(Verdict::Fail(format!("trees of flow {:?} lead away from {:?}", f.flows, cell.m)));
            }
            if !from_flows.insert(format!("{trees:?}")) {
                return Ok(Verdict::Fail(format!("two flows share the trees {trees:?}")));
            }
        }
    }
    let from_tree: BTreeSet<String> =
        leaves.iter().filter(|l| full_dimensional(&l.m, a)).map(|l| format!("{:?}", l.trees)).collect();
    Ok(if from_tree == from_flows {
        Verdict::Pass
    } else {
        Verdict::Fail(format!("{} leaf paths versus {} flows", from_tree.len(), from_flows.len()))
    })
}

/// Lower-dimensional leaves vanish in both bookkeepings, and full-dimensional
/// closed forms add up to `K_G`. The multiset side needs `a_i >= ind_i`, so
/// it runs at `a + ind`.
fn basic_lower_leaves(g: &MultiDigraph, a: &Netflow) -> Result<Verdict> {
    let profile = g.degree_profile();
    let lifted = Netflow::new(a.free().iter().enumerate().map(|(i, &x)| x + profile.ind(i + 1) as i64).collect());
    for (mode, net) in [(BrtMode::Out, a), (BrtMode::In, &lifted)] {
        let r = brt_leaves(g, net, mode, DEFAULT_NODE_CAP)?;
        if r.tree.truncated {
            return Ok(Verdict::Skip);
        }
        if let Some(l) = r.leaves.iter().find(|l| l.m.is_none() && !l.contribution.is_zero()) {
            return Ok(Verdict::Fail(format!("{mode:?} leaf {} contributes {}", l.node, l.contribution)));
        }
        let k = BigInt::from(kpf(g, &net.full())?);
        let v = agree(
            "leaf totals",
            &[("kpf", k), ("leaves", BigInt::from(r.total_contribution())), ("closed", r.closed_form_total())],
        );
        if v != Verdict::Pass {
            return Ok(v);
        }
    }
    Ok(Verdict::Pass)
}

/// A piece with a dead end (a vertex other than the sink with incoming but
/// no outgoing edges) lies in a hyperplane of its parent and counts zero,
/// even when its own flow polytope has the generic dimension.
fn piece_volume(h: &ReductionGraph, a: &Netflow) -> Result<BigUint> {
    if h.dead_end().is_some() {
        return Ok(BigUint::zero());
    }
    normalized_volume_or_zero(&h.to_graph(), a)
}

/// Reduces at the highest vertex that has edges on both sides: every basic
/// reduction there and the full compounded reduction must split the volume.
fn additivity(g: &MultiDigraph, a: &Netflow) -> Result<Verdict> {
    let h = ReductionGraph::from_graph(g);
    let Some(v) = (2..=g.n()).rev().find(|&v| h.ind(v) > 0 && h.outd(v) > 0) else {
        return Ok(Verdict::Skip);
    };
    let whole = normalized_volume_or_zero(g, a)?;
    for &e1 in &h.incoming(v) {
        for &e2 in &h.outgoing(v) {
            let (g1, g2) = basic_reduction(&h, e1, e2)?;
            let parts = piece_volume(&g1, a)? + piece_volume(&g2, a)?;
            if parts != whole {
                return Ok(Verdict::Fail(format!(
                    "basic reduction of {:?}, {:?}: {parts} != {whole}",
                    h.edges()[e1],
                    h.edges()[e2]
                )));
            }
        }
    }
    let mut parts = BigUint::zero();
    for (_, child) in compounded_children(&h, v, a.free()[v - 1] > 0)? {
        parts += piece_volume(&child, a)?;
    }
    Ok(agree("compounded reduction", &[("whole", whole), ("cells", parts)]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: usize,
    pub skipped: usize,
    pub failed: usize,
    /// The first failure, as `label: message`.
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub cases: usize,
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failed == 0)
    }

    pub fn outcome(&self, check: Check) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.check == check)
    }
}

/// Runs `checks` over `cases`. Errors from the library count as failures.
pub fn run_suite(cases: &[CorpusCase], checks: &[Check]) -> SuiteReport {
    let outcomes = checks
        .iter()
        .map(|&check| {
            let mut o = CheckOutcome { check, passed: 0, skipped: 0, failed: 0, first_failure: None };
            for case in cases {
                let verdict = run_check(check, case).unwrap_or_else(|e| Verdict::Fail(format!("error: {e}")));
                match verdict {
                    Verdict::Pass => o.passed += 1,
                    Verdict::Skip => o.skipped += 1,
                    Verdict::Fail(msg) => {
                        o.failed += 1;
                        o.first_failure.get_or_insert_with(|| {
                            format!("{} {:?} a={:?}: {msg}", case.label, case.graph.edges(), case.netflow.free())
                        });
                    }
                }
            }
            o
        })
        .collect();
    SuiteReport { cases: cases.len(), outcomes }
}

/// Random corpora for several seeds, concatenated.
pub fn multi_seed_corpus(base: &CorpusConfig, seeds: impl IntoIterator<Item = u64>) -> Vec<CorpusCase> {
    seeds.into_iter().flat_map(|seed| random_corpus(&CorpusConfig { seed, ..*base })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_well_formed() {
        let cfg = CorpusConfig { count: 40, ..CorpusConfig::default() };
        let a = random_corpus(&cfg);
        let b = random_corpus(&cfg);
        assert_eq!(a.len(), 40);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.graph, y.graph);
            assert_eq!(x.netflow, y.netflow);
            assert!(x.graph.has_outgoing_all());
            assert!(x.graph.n() <= 4 && x.graph.edge_count() <= 8.max(x.graph.n()));
            assert!(x.netflow.free().iter().all(|&v| (0..=3).contains(&v)));
        }
        let other = random_corpus(&CorpusConfig { seed: 8, ..cfg });
        assert!(a.iter().zip(&other).any(|(x, y)| x.graph != y.graph || x.netflow != y.netflow));
    }

    #[test]
    fn builtin_examples_pass() {
        let report = run_suite(&builtin_corpus(), &Check::ALL);
        for o in &report.outcomes {
            assert_eq!(o.failed, 0, "{:?}", o.first_failure);
        }
    }

    #[test]
    fn trivial_graphs_pass() {
        let cases = random_corpus(&CorpusConfig { count: 10, max_n: 1, ..CorpusConfig::default() });
        assert!(cases.iter().all(|c| c.graph.n() == 1));
        let report = run_suite(&cases, &Check::ALL);
        assert!(report.all_passed(), "{:#?}", report.outcomes.iter().filter(|o| o.failed > 0).collect::<Vec<_>>());
    }
}
