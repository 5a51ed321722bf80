//! Kostant partition functions by direct dynamic programming over flows, and
//! Ehrhart polynomials of flow polytopes by exact interpolation.
//!
//! Nothing here uses the Lidskii formulas; this module is the reference
//! the formula-based modules are checked against.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combin::{binomial, factorial};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, Netflow};
use crate::poly::{lagrange_interpolate, ExactPoly};

/// Default cap on the number of flows [`kpf_count_via_flows`] will list.
pub const DEFAULT_FLOW_LIST_CAP: usize = 100_000;

/// A nonnegative integer flow, one entry per edge in edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FlowAssignment {
    pub flows: Vec<u64>,
}

impl FlowAssignment {
    /// Full netflow vector (length `n + 1`): outflow minus inflow at each vertex.
    pub fn netflow(&self, g: &MultiDigraph) -> Vec<i64> {
        let mut net = vec![0i64; g.vertex_count()];
        for (&(i, j), &f) in g.edges().iter().zip(&self.flows) {
            net[i - 1] += f as i64;
            net[j - 1] -= f as i64;
        }
        net
    }
}

struct OutGroups {
    /// `(target, multiplicity)` for targets below the sink.
    inner: Vec<(usize, u64)>,
    to_sink: u64,
}

fn out_groups(g: &MultiDigraph) -> Vec<OutGroups> {
    let sink = g.sink();
    let mut groups: Vec<OutGroups> = (0..=g.vertex_count()).map(|_| OutGroups { inner: Vec::new(), to_sink: 0 }).collect();
    for &(i, j) in g.edges() {
        let grp = &mut groups[i];
        if j == sink {
            grp.to_sink += 1;
        } else if let Some(slot) = grp.inner.iter_mut().find(|(t, _)| *t == j) {
            slot.1 += 1;
        } else {
            grp.inner.push((j, 1));
        }
    }
    for grp in &mut groups {
        grp.inner.sort_unstable();
    }
    groups
}

fn check_full_netflow(g: &MultiDigraph, a_full: &[i64]) -> Result<()> {
    if a_full.len() != g.vertex_count() {
        return Err(Error::NetflowLength { expected: g.vertex_count(), found: a_full.len() });
    }
    let sum: i64 = a_full.iter().sum();
    if sum != 0 {
        return Err(Error::NonzeroSum(BigInt::from(sum)));
    }
    Ok(())
}

/// Number of ways to put `x` units on `mult` parallel edges.
fn spread(x: u64, mult: u64) -> BigUint {
    match mult {
        0 => {
            if x == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            }
        }
        1 => BigUint::one(),
        _ => binomial(x + mult - 1, mult - 1),
    }
}

/// `K_G(a)`: the number of nonnegative integer flows on `g` with full
/// netflow vector `a_full` (length `n + 1`, summing to zero).
///
/// Vertices are processed in order `1..=n`. The state after vertex `i` is the
/// vector of inflows already committed to vertices `i+1..=n`; states are
/// merged between and within vertices, so each `(vertex, inflow vector)` is
/// counted once.
pub fn kpf(g: &MultiDigraph, a_full: &[i64]) -> Result<BigUint> {
    check_full_netflow(g, a_full)?;
    let n = g.n();
    // Cut condition: flow across {1..k} | {k+1..n+1} equals the prefix sum.
    let mut prefix = 0;
    for &a in &a_full[..n] {
        prefix += a;
        if prefix < 0 {
            return Ok(BigUint::zero());
        }
    }
    let groups = out_groups(g);
    let mut layer: HashMap<Vec<i64>, BigUint> = HashMap::new();
    layer.insert(vec![0; n + 1], BigUint::one());

    for v in 1..=n {
        let grp = &groups[v];
        let mut next: HashMap<Vec<i64>, BigUint> = HashMap::new();
        for (state, count) in layer {
            let total = a_full[v - 1] + state[v];
            if total < 0 {
                continue;
            }
            let mut base = state;
            base[v] = 0;
            let mut partial: HashMap<(u64, Vec<i64>), BigUint> = HashMap::new();
            partial.insert((total as u64, base), count);
            for &(target, mult) in &grp.inner {
                let mut step: HashMap<(u64, Vec<i64>), BigUint> = HashMap::new();
                for ((rest, inflow), w) in partial {
                    for x in 0..=rest {
                        let mut inflow2 = inflow.clone();
                        inflow2[target] += x as i64;
                        let weight = if mult == 1 { w.clone() } else { &w * spread(x, mult) };
                        *step.entry((rest - x, inflow2)).or_insert_with(BigUint::zero) += weight;
                    }
                }
                partial = step;
            }
            for ((rest, inflow), w) in partial {
                let ways = spread(rest, grp.to_sink);
                if ways.is_zero() {
                    continue;
                }
                *next.entry(inflow).or_insert_with(BigUint::zero) += w * ways;
            }
        }
        layer = next;
    }
    Ok(layer.into_values().fold(BigUint::zero(), |acc, c| acc + c))
}

/// [`kpf`] plus, when `list` is set, the flows themselves. Listing fails with
/// `EnumerationCapExceeded` when there are more than `cap` flows.
pub fn kpf_count_via_flows(
    g: &MultiDigraph,
    a_full: &[i64],
    list: bool,
    cap: usize,
) -> Result<(BigUint, Option<Vec<FlowAssignment>>)> {
    let count = kpf(g, a_full)?;
    if !list {
        return Ok((count, None));
    }
    if count > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded { cap });
    }
    let mut out_edges = vec![Vec::new(); g.vertex_count() + 1];
    for (idx, &(i, _)) in g.edges().iter().enumerate() {
        out_edges[i].push(idx);
    }
    let mut flows = Vec::new();
    let mut current = vec![0u64; g.edge_count()];
    let mut inflow = vec![0i64; g.vertex_count() + 1];
    enumerate_from(g, a_full, &out_edges, 1, 0, &mut current, &mut inflow, &mut flows);
    debug_assert_eq!(BigUint::from(flows.len()), count);
    Ok((count, Some(flows)))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_from(
    g: &MultiDigraph,
    a_full: &[i64],
    out_edges: &[Vec<usize>],
    v: usize,
    slot: usize,
    current: &mut Vec<u64>,
    inflow: &mut Vec<i64>,
    out: &mut Vec<FlowAssignment>,
) {
    if v > g.n() {
        out.push(FlowAssignment { flows: current.clone() });
        return;
    }
    let edges = &out_edges[v];
    let total = a_full[v - 1] + inflow[v];
    if total < 0 {
        return;
    }
    let used: i64 = edges[..slot].iter().map(|&e| current[e] as i64).sum();
    let rest = total - used;
    if slot == edges.len() {
        if rest == 0 {
            enumerate_from(g, a_full, out_edges, v + 1, 0, current, inflow, out);
        }
        return;
    }
    let e = edges[slot];
    let head = g.edges()[e].1;
    let choices: Vec<i64> = if slot + 1 == edges.len() { vec![rest] } else { (0..=rest).collect() };
    for x in choices {
        current[e] = x as u64;
        inflow[head] += x;
        enumerate_from(g, a_full, out_edges, v, slot + 1, current, inflow, out);
        inflow[head] -= x;
        current[e] = 0;
    }
}

/// `K_G(t * a)`: lattice points of the `t`-th dilate of `F_G(a)`.
pub fn ehrhart_value(g: &MultiDigraph, a: &Netflow, t: u64) -> Result<BigUint> {
    a.check_for(g)?;
    a.require_nonnegative()?;
    kpf(g, &a.scaled(t as i64).full())
}

/// The Ehrhart polynomial of `F_G(a)` in the dilation variable `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EhrhartPolynomial {
    pub poly: ExactPoly,
    /// `m - n` (clamped at zero).
    pub generic_dimension: usize,
    /// Degree of `poly`; `None` when the polytope is empty.
    pub dimension: Option<usize>,
}

impl EhrhartPolynomial {
    pub fn is_degenerate(&self) -> bool {
        self.dimension != Some(self.generic_dimension)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.poly.coefficient(&[self.generic_dimension as u32])
    }

    pub fn eval(&self, t: i64) -> BigRational {
        self.poly.eval_int(&[t])
    }
}

/// Interpolates `t -> K_G(t a)` exactly through `t = 0..=m-n`.
///
/// An empty polytope (`K_G(a) = 0`) yields the zero polynomial flagged as
/// degenerate. A nonempty polytope of dimension below `m - n` is flagged
/// too; the polynomial is still exact.
pub fn ehrhart_poly(g: &MultiDigraph, a: &Netflow) -> Result<EhrhartPolynomial> {
    a.check_for(g)?;
    a.require_nonnegative()?;
    let d = g.generic_dimension().max(0) as usize;
    let vars = vec!["t".to_string()];
    if kpf(g, &a.full())?.is_zero() {
        return Ok(EhrhartPolynomial { poly: ExactPoly::zero(vars), generic_dimension: d, dimension: None });
    }
    let mut points = Vec::with_capacity(d + 1);
    for t in 0..=d as u64 {
        let value = ehrhart_value(g, a, t)?;
        points.push((BigInt::from(t), BigInt::from(value)));
    }
    let poly = lagrange_interpolate("t", &points);
    let dimension = poly.degree().map(|deg| deg as usize);
    Ok(EhrhartPolynomial { poly, generic_dimension: d, dimension })
}

/// Normalized volume `(m-n)! * leading coefficient`, or zero when the
/// polytope is lower-dimensional or empty.
pub fn normalized_volume_or_zero(g: &MultiDigraph, a: &Netflow) -> Result<BigUint> {
    let e = ehrhart_poly(g, a)?;
    if e.is_degenerate() {
        return Ok(BigUint::zero());
    }
    Ok(scale_leading(&e))
}

fn scale_leading(e: &EhrhartPolynomial) -> BigUint {
    let v = e.leading_coefficient() * BigRational::from_integer(factorial(e.generic_dimension as u64).into());
    assert!(v.is_integer(), "normalized volume must be an integer");
    v.to_integer().to_biguint().expect("normalized volume is nonnegative")
}

/// Normalized volume of `F_G(a)` read off the Ehrhart polynomial. A point
/// polytope has normalized volume 1.
pub fn volume_oracle(g: &MultiDigraph, a: &Netflow) -> Result<BigUint> {
    let e = ehrhart_poly(g, a)?;
    if e.is_degenerate() {
        return Err(Error::DegenerateDimension {
            expected: e.generic_dimension,
            actual: e.dimension.unwrap_or(0),
        });
    }
    Ok(scale_leading(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn k4() -> MultiDigraph {
        MultiDigraph::complete(4).unwrap()
    }

    fn doubled_path() -> MultiDigraph {
        MultiDigraph::new(2, vec![(1, 2), (1, 2), (2, 3), (2, 3)]).unwrap()
    }

    /// Brute force: every edge takes a value in 0..=bound.
    fn brute_kpf(g: &MultiDigraph, a_full: &[i64], bound: u64) -> u64 {
        let m = g.edge_count();
        let mut count = 0;
        let mut f = vec![0u64; m];
        loop {
            if (FlowAssignment { flows: f.clone() }).netflow(g) == a_full {
                count += 1;
            }
            let mut k = 0;
            while k < m && f[k] == bound {
                f[k] = 0;
                k += 1;
            }
            if k == m {
                return count;
            }
            f[k] += 1;
        }
    }

    #[test]
    fn kpf_examples() {
        assert_eq!(kpf(&k4(), &[0, 0, 0, 0]).unwrap(), big(1));
        assert_eq!(kpf(&k4(), &[1, 1, 1, -3]).unwrap(), big(7));
        assert_eq!(kpf(&k4(), &[1, -1, 0, 0]).unwrap(), big(1));
        assert_eq!(kpf(&k4(), &[1, 1, 0, 0]), Err(Error::NonzeroSum(2.into())));
        assert_eq!(kpf(&k4(), &[0, 0, 0]), Err(Error::NetflowLength { expected: 4, found: 3 }));
        assert_eq!(kpf(&k4(), &[-1, 1, 0, 0]).unwrap(), big(0));
    }

    #[test]
    fn kpf_matches_brute_force() {
        let graphs = [k4(), doubled_path(), MultiDigraph::pitman_stanley(3).unwrap()];
        let vectors: [&[i64]; 5] = [&[1, 1, 1, -3], &[2, 0, 1, -3], &[1, 0, -1, 0], &[2, -1, 1, -2], &[0, 2, -1, -1]];
        for g in &graphs {
            for v in vectors {
                if v.len() != g.vertex_count() {
                    continue;
                }
                assert_eq!(kpf(g, v).unwrap(), big(brute_kpf(g, v, 4)), "{g:?} {v:?}");
            }
        }
        for v in [[1, 1, -2], [2, 1, -3], [3, 0, -3], [0, 2, -2]] {
            assert_eq!(kpf(&doubled_path(), &v).unwrap(), big(brute_kpf(&doubled_path(), &v, 3)));
        }
    }

    #[test]
    fn flow_listing() {
        let (c, flows) = kpf_count_via_flows(&k4(), &[0, 0, 0, 0], true, 10).unwrap();
        assert_eq!(c, big(1));
        assert_eq!(flows.unwrap(), vec![FlowAssignment { flows: vec![0; 6] }]);

        let (c, flows) = kpf_count_via_flows(&k4(), &[1, 1, 1, -3], true, 10).unwrap();
        assert_eq!(c, big(7));
        let flows = flows.unwrap();
        assert_eq!(flows.len(), 7);
        assert!(flows.iter().all(|f| f.netflow(&k4()) == vec![1, 1, 1, -3]));

        let path = MultiDigraph::new(2, vec![(1, 2), (2, 3)]).unwrap();
        let (_, flows) = kpf_count_via_flows(&path, &[1, 0, -1], true, 10).unwrap();
        assert_eq!(flows.unwrap(), vec![FlowAssignment { flows: vec![1, 1] }]);

        assert_eq!(
            kpf_count_via_flows(&k4(), &[1, 1, 1, -3], true, 6),
            Err(Error::EnumerationCapExceeded { cap: 6 })
        );
        assert_eq!(kpf_count_via_flows(&k4(), &[1, 1, 1, -3], false, 0).unwrap().1, None);
    }

    #[test]
    fn ehrhart_values_and_polynomials() {
        assert_eq!(ehrhart_value(&k4(), &Netflow::ones(3), 1).unwrap(), big(7));
        assert_eq!(ehrhart_value(&k4(), &Netflow::ones(3), 0).unwrap(), big(1));
        assert_eq!(ehrhart_value(&doubled_path(), &Netflow::ones(2), 2).unwrap(), big(15));

        let e = ehrhart_poly(&doubled_path(), &Netflow::ones(2)).unwrap();
        assert_eq!(e.poly.to_string(), "2t^2+3t+1");
        assert!(!e.is_degenerate());
        assert_eq!(e.eval(1), BigRational::from_integer(6.into()));

        let single = MultiDigraph::new(1, vec![(1, 2)]).unwrap();
        let e = ehrhart_poly(&single, &Netflow::new(vec![1])).unwrap();
        assert_eq!(e.poly.to_string(), "1");
        assert!(!e.is_degenerate());

        let e = ehrhart_poly(&k4(), &Netflow::ones(3)).unwrap();
        assert_eq!(e.leading_coefficient(), BigRational::new(2.into(), 3.into()));

        assert_eq!(ehrhart_poly(&k4(), &Netflow::new(vec![1, -1, 1])), Err(Error::NegativeNetflow(2)));
    }

    #[test]
    fn oracle_volumes() {
        assert_eq!(volume_oracle(&k4(), &Netflow::ones(3)).unwrap(), big(4));
        assert_eq!(volume_oracle(&MultiDigraph::pitman_stanley(3).unwrap(), &Netflow::ones(3)).unwrap(), big(16));
        assert_eq!(volume_oracle(&MultiDigraph::new(1, vec![(1, 2)]).unwrap(), &Netflow::new(vec![1])).unwrap(), big(1));
        assert_eq!(volume_oracle(&doubled_path(), &Netflow::ones(2)).unwrap(), big(4));
        // Zero netflow collapses the polytope to a point.
        assert_eq!(
            volume_oracle(&k4(), &Netflow::new(vec![0, 0, 0])),
            Err(Error::DegenerateDimension { expected: 3, actual: 0 })
        );
        assert_eq!(normalized_volume_or_zero(&k4(), &Netflow::new(vec![0, 0, 0])).unwrap(), big(0));
        // Empty polytope: vertex 2 cannot send its unit anywhere.
        let stuck = MultiDigraph::new(2, vec![(1, 3), (1, 2)]).unwrap();
        let e = ehrhart_poly(&stuck, &Netflow::new(vec![0, 1])).unwrap();
        assert!(e.poly.is_zero() && e.dimension.is_none());
    }

    #[test]
    fn reversal_symmetry_small() {
        let g = MultiDigraph::new(3, vec![(1, 2), (1, 2), (2, 4), (1, 3), (3, 4), (2, 3)]).unwrap();
        for a in [[1i64, 2, 0], [2, 0, 1], [0, 1, 3]] {
            let s: i64 = a.iter().sum();
            let lhs = kpf(&g, &[a[0], a[1], a[2], -s]).unwrap();
            let rhs = kpf(&g.reverse(), &[s, -a[2], -a[1], -a[0]]).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
