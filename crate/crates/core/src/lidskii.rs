//! The Lidskii volume and lattice-point formulas.
//!
//! All three formulas sum over the same weak compositions `j` of `m - n`
//! dominating `out`, with the same Kostant factor `K_G(j - out, 0)`. They
//! therefore share one [`LidskiiTable`], which computes each factor at most
//! once and only when a term actually needs it.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combin::{factorial, multinomial};
use crate::error::Result;
use crate::graph::{MultiDigraph, Netflow};
use crate::kostant::kpf;
use crate::poly::ExactPoly;

/// Weak compositions of `total` with every proper prefix sum at least the
/// matching prefix sum of `out`, in lexicographic order.
pub fn dominance_compositions(out: &[i64], total: u64) -> Vec<Vec<u64>> {
    let mut res = Vec::new();
    let mut cur = vec![0u64; out.len()];
    walk_prefixes(out, total, 0, 0, 0, &mut cur, &mut res, |sum, bound| sum >= bound);
    res
}

/// Weak compositions of `total` with every proper prefix sum at most the
/// matching prefix sum of `bound`, in lexicographic order.
pub fn dominated_compositions(bound: &[i64], total: u64) -> Vec<Vec<u64>> {
    let mut res = Vec::new();
    let mut cur = vec![0u64; bound.len()];
    walk_prefixes(bound, total, 0, 0, 0, &mut cur, &mut res, |sum, b| sum <= b);
    res
}

#[allow(clippy::too_many_arguments)]
fn walk_prefixes(
    reference: &[i64],
    total: u64,
    pos: usize,
    sum: u64,
    ref_sum: i64,
    cur: &mut Vec<u64>,
    res: &mut Vec<Vec<u64>>,
    ok: fn(i64, i64) -> bool,
) {
    let n = reference.len();
    if n == 0 {
        if total == 0 {
            res.push(Vec::new());
        }
        return;
    }
    if pos + 1 == n {
        cur[pos] = total - sum;
        res.push(cur.clone());
        return;
    }
    let ref_sum = ref_sum + reference[pos];
    for v in 0..=total - sum {
        if ok((sum + v) as i64, ref_sum) {
            cur[pos] = v;
            walk_prefixes(reference, total, pos + 1, sum + v, ref_sum, cur, res, ok);
        }
    }
}

/// `x (x-1) ... (x-k+1) / k!`, defined for every integer `x`.
pub fn generalized_binomial(x: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(x) - BigInt::from(i);
    }
    num / BigInt::from(factorial(k))
}

/// `((x multichoose k)) = C(x + k - 1, k)`.
pub fn multiset_coeff(x: i64, k: u64) -> BigInt {
    generalized_binomial(x + k as i64 - 1, k)
}

/// `a^j` with `0^0 = 1`.
fn monomial_value(a: &[i64], j: &[u64]) -> BigInt {
    a.iter().zip(j).fold(BigInt::one(), |acc, (&x, &e)| acc * num_traits::pow(BigInt::from(x), e as usize))
}

/// One summand of a Lidskii formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LidskiiTerm {
    pub j: Vec<u64>,
    /// Everything except the Kostant factor: the multinomial times `a^j`, or
    /// the product of (multiset) binomials.
    #[serde(serialize_with = "crate::serde_big::bigint")]
    pub coefficient: BigInt,
    /// `K_G(j - out, 0)`; `None` when the coefficient is zero and the factor
    /// was never needed.
    #[serde(serialize_with = "crate::serde_big::opt_biguint")]
    pub kpf_factor: Option<BigUint>,
    #[serde(serialize_with = "crate::serde_big::bigint")]
    pub value: BigInt,
}

/// Which lattice-point formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointsFormula {
    /// `prod C(a_i + out_i, j_i)`.
    Binomial,
    /// `prod ((a_i - in_i multichoose j_i))`.
    Multiset,
}

/// The compositions `j` of a graph together with lazily computed Kostant
/// factors.
pub struct LidskiiTable<'g> {
    graph: &'g MultiDigraph,
    out: Vec<i64>,
    inn: Vec<i64>,
    degree: u64,
    compositions: Vec<Vec<u64>>,
    factors: Vec<OnceLock<BigUint>>,
}

impl<'g> LidskiiTable<'g> {
    pub fn new(graph: &'g MultiDigraph) -> Result<Self> {
        graph.require_outgoing_all()?;
        let profile = graph.degree_profile();
        let out = profile.shifted_out();
        let inn = profile.shifted_in();
        let degree = graph.generic_dimension() as u64;
        let compositions = dominance_compositions(&out, degree);
        let factors = compositions.iter().map(|_| OnceLock::new()).collect();
        Ok(LidskiiTable { graph, out, inn, degree, compositions, factors })
    }

    pub fn graph(&self) -> &MultiDigraph {
        self.graph
    }

    /// `out_i` for `i = 1..=n`.
    pub fn out(&self) -> &[i64] {
        &self.out
    }

    /// `m - n`.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn compositions(&self) -> &[Vec<u64>] {
        &self.compositions
    }

    pub fn len(&self) -> usize {
        self.compositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compositions.is_empty()
    }

    /// The full netflow `(j - out, 0)`.
    pub fn shifted_netflow(&self, j: &[u64]) -> Vec<i64> {
        let mut v: Vec<i64> = j.iter().zip(&self.out).map(|(&x, &o)| x as i64 - o).collect();
        v.push(0);
        v
    }

    /// `K_G(j - out, 0)` for the `idx`-th composition.
    pub fn kpf_factor(&self, idx: usize) -> &BigUint {
        self.factors[idx].get_or_init(|| {
            kpf(self.graph, &self.shifted_netflow(&self.compositions[idx])).expect("shifted netflow sums to zero")
        })
    }

    fn terms_with(&self, coefficient: impl Fn(&[u64]) -> BigInt) -> Vec<LidskiiTerm> {
        self.compositions
            .iter()
            .enumerate()
            .map(|(idx, j)| {
                let c = coefficient(j);
                if c.is_zero() {
                    return LidskiiTerm { j: j.clone(), coefficient: c, kpf_factor: None, value: BigInt::zero() };
                }
                let k = self.kpf_factor(idx).clone();
                let value = &c * BigInt::from(k.clone());
                LidskiiTerm { j: j.clone(), coefficient: c, kpf_factor: Some(k), value }
            })
            .collect()
    }

    fn check_netflow(&self, a: &Netflow) -> Result<()> {
        a.check_for(self.graph)?;
        a.require_nonnegative()
    }

    /// Summands of the volume formula at `a`.
    pub fn volume_terms(&self, a: &Netflow) -> Result<Vec<LidskiiTerm>> {
        self.check_netflow(a)?;
        Ok(self.terms_with(|j| BigInt::from(multinomial(j)) * monomial_value(a.free(), j)))
    }

    /// Summands of a lattice-point formula at `a`.
    pub fn points_terms(&self, a: &Netflow, formula: PointsFormula) -> Result<Vec<LidskiiTerm>> {
        self.check_netflow(a)?;
        let a = a.free();
        Ok(match formula {
            PointsFormula::Binomial => self.terms_with(|j| {
                j.iter()
                    .enumerate()
                    .map(|(i, &ji)| generalized_binomial(a[i] + self.out[i], ji))
                    .product()
            }),
            // in_i is indexed from vertex 1, so a_i pairs with self.inn[i].
            PointsFormula::Multiset => self.terms_with(|j| {
                j.iter()
                    .enumerate()
                    .map(|(i, &ji)| multiset_coeff(a[i] - self.inn[i], ji))
                    .product()
            }),
        })
    }

    /// The volume as a homogeneous polynomial of degree `m - n` in `a1..an`.
    pub fn volume_poly(&self) -> ExactPoly {
        let mut p = ExactPoly::zero(ExactPoly::indexed_vars("a", self.graph.n()));
        for (idx, j) in self.compositions.iter().enumerate() {
            let c = BigInt::from(multinomial(j) * self.kpf_factor(idx));
            p.add_term(j.iter().map(|&e| e as u32).collect(), BigRational::from_integer(c));
        }
        p
    }
}

pub fn sum_terms(terms: &[LidskiiTerm]) -> BigInt {
    terms.iter().map(|t| &t.value).sum()
}

fn to_nonnegative(v: BigInt) -> BigUint {
    v.to_biguint().expect("formula sums are nonnegative for nonnegative netflows")
}

/// Normalized volume of `F_G(a)` by the Lidskii volume formula.
pub fn lidskii_volume(g: &MultiDigraph, a: &Netflow) -> Result<BigUint> {
    Ok(to_nonnegative(sum_terms(&lidskii_volume_terms(g, a)?)))
}

pub fn lidskii_volume_terms(g: &MultiDigraph, a: &Netflow) -> Result<Vec<LidskiiTerm>> {
    LidskiiTable::new(g)?.volume_terms(a)
}

pub fn lidskii_volume_poly(g: &MultiDigraph) -> Result<ExactPoly> {
    Ok(LidskiiTable::new(g)?.volume_poly())
}

/// `K_G(a)` by the binomial Lidskii formula.
pub fn lidskii_points_binomial(g: &MultiDigraph, a: &Netflow) -> Result<BigUint> {
    Ok(to_nonnegative(sum_terms(&lidskii_points_terms(g, a, PointsFormula::Binomial)?)))
}

/// `K_G(a)` by the multiset Lidskii formula.
pub fn lidskii_points_multiset(g: &MultiDigraph, a: &Netflow) -> Result<BigUint> {
    Ok(to_nonnegative(sum_terms(&lidskii_points_terms(g, a, PointsFormula::Multiset)?)))
}

pub fn lidskii_points_terms(g: &MultiDigraph, a: &Netflow, formula: PointsFormula) -> Result<Vec<LidskiiTerm>> {
    LidskiiTable::new(g)?.points_terms(a, formula)
}

/// Summands of the indegree volume formula: `j` runs over compositions of
/// `m - n` dominated by `(in_2, ..., in_{n+1})`.
pub fn volume_indegree_terms(g: &MultiDigraph, b: &Netflow) -> Result<Vec<LidskiiTerm>> {
    g.require_incoming_all()?;
    b.check_for(g)?;
    b.require_nonnegative()?;
    let inn = g.degree_profile().shifted_in();
    let tail = &inn[1..];
    let degree = g.generic_dimension() as u64;
    let mut terms = Vec::new();
    for j in dominated_compositions(tail, degree) {
        let c = BigInt::from(multinomial(&j)) * monomial_value(b.free(), &j);
        if c.is_zero() {
            terms.push(LidskiiTerm { j, coefficient: c, kpf_factor: None, value: BigInt::zero() });
            continue;
        }
        let mut net = vec![0i64];
        net.extend(tail.iter().zip(&j).map(|(&x, &ji)| x - ji as i64));
        let k = kpf(g, &net)?;
        let value = &c * BigInt::from(k.clone());
        terms.push(LidskiiTerm { j, coefficient: c, kpf_factor: Some(k), value });
    }
    Ok(terms)
}

/// Normalized volume of `F_G(b_1 + ... + b_n, -b_1, ..., -b_n)`.
pub fn volume_indegree(g: &MultiDigraph, b: &Netflow) -> Result<BigUint> {
    Ok(to_nonnegative(sum_terms(&volume_indegree_terms(g, b)?)))
}

/// `K_G(b_1 + ... + b_n, -b_1, ..., -b_n)`, evaluated as the binomial formula
/// on the reversed graph with `b` reversed.
pub fn points_indegree(g: &MultiDigraph, b: &Netflow) -> Result<BigUint> {
    g.require_incoming_all()?;
    b.check_for(g)?;
    b.require_nonnegative()?;
    let reversed_b = Netflow::new(b.free().iter().rev().copied().collect());
    lidskii_points_binomial(&g.reverse(), &reversed_b)
}

/// The volume of `F_G(e_1 - e_{n+1})` and the two Kostant values it equals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitVolumeIdentities {
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub volume: BigUint,
    /// `K_G(m - n - out_1, -out_2, ..., -out_n, 0)`.
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub via_outdegrees: BigUint,
    /// `K_G(0, in_2, ..., in_n, -m + n + in_{n+1})`; absent when some vertex
    /// `2..=n+1` has no incoming edge.
    #[serde(serialize_with = "crate::serde_big::opt_biguint")]
    pub via_indegrees: Option<BigUint>,
}

impl UnitVolumeIdentities {
    pub fn all_equal(&self) -> bool {
        self.volume == self.via_outdegrees && self.via_indegrees.as_ref().map_or(true, |v| *v == self.volume)
    }
}

pub fn unit_volume_identities(g: &MultiDigraph) -> Result<UnitVolumeIdentities> {
    g.require_outgoing_all()?;
    let n = g.n();
    let d = g.generic_dimension();
    let profile = g.degree_profile();
    let volume = lidskii_volume(g, &Netflow::unit(n))?;

    let out = profile.shifted_out();
    let mut net_out: Vec<i64> = out.iter().map(|&o| -o).collect();
    net_out[0] += d;
    net_out.push(0);
    let via_outdegrees = kpf(g, &net_out)?;

    let via_indegrees = if g.has_incoming_all() {
        let inn = profile.shifted_in();
        let mut net_in = vec![0i64];
        net_in.extend_from_slice(&inn[1..n]);
        net_in.push(-d + inn[n]);
        Some(kpf(g, &net_in)?)
    } else {
        None
    };
    Ok(UnitVolumeIdentities { volume, via_outdegrees, via_indegrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn k4() -> MultiDigraph {
        MultiDigraph::complete(4).unwrap()
    }

    fn doubled_path() -> MultiDigraph {
        MultiDigraph::new(2, vec![(1, 2), (1, 2), (2, 3), (2, 3)]).unwrap()
    }

    fn breakdown(terms: &[LidskiiTerm]) -> Vec<(Vec<u64>, i64)> {
        terms.iter().map(|t| (t.j.clone(), i64::try_from(&t.value).unwrap())).collect()
    }

    #[test]
    fn dominance_enumeration() {
        assert_eq!(dominance_compositions(&[2, 1, 0], 3), vec![vec![2, 1, 0], vec![3, 0, 0]]);
        assert_eq!(
            dominance_compositions(&[1, 1, 1], 3),
            vec![vec![1, 1, 1], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0], vec![3, 0, 0]]
        );
        assert_eq!(dominance_compositions(&[0], 0), vec![vec![0]]);
        assert_eq!(dominated_compositions(&[0, 1, 2], 3), vec![vec![0, 0, 3], vec![0, 1, 2]]);
    }

    #[test]
    fn binomials() {
        assert_eq!(generalized_binomial(-2, 3), BigInt::from(-4));
        assert_eq!(generalized_binomial(5, 2), BigInt::from(10));
        assert_eq!(generalized_binomial(2, 3), BigInt::zero());
        assert_eq!(generalized_binomial(-7, 0), BigInt::one());
        assert_eq!(multiset_coeff(2, 2), BigInt::from(3));
        assert_eq!(multiset_coeff(0, 1), BigInt::zero());
        assert_eq!(multiset_coeff(0, 0), BigInt::one());
    }

    #[test]
    fn golden_volumes() {
        let ones = Netflow::ones(3);
        assert_eq!(lidskii_volume(&k4(), &ones).unwrap(), BigUint::from(4u32));
        assert_eq!(breakdown(&lidskii_volume_terms(&k4(), &ones).unwrap()), vec![(vec![2, 1, 0], 3), (vec![3, 0, 0], 1)]);
        assert_eq!(lidskii_volume(&MultiDigraph::pitman_stanley(3).unwrap(), &ones).unwrap(), BigUint::from(16u32));
        assert_eq!(lidskii_volume(&doubled_path(), &Netflow::ones(2)).unwrap(), BigUint::from(4u32));
        assert_eq!(lidskii_volume_poly(&k4()).unwrap().to_string(), "a1^3+3a1^2*a2");
    }

    #[test]
    fn golden_points() {
        let ones = Netflow::ones(3);
        let bin = lidskii_points_terms(&k4(), &ones, PointsFormula::Binomial).unwrap();
        assert_eq!(breakdown(&bin), vec![(vec![2, 1, 0], 6), (vec![3, 0, 0], 1)]);
        let ms = lidskii_points_terms(&k4(), &ones, PointsFormula::Multiset).unwrap();
        assert_eq!(breakdown(&ms), vec![(vec![2, 1, 0], 3), (vec![3, 0, 0], 4)]);

        let dp = doubled_path();
        let two = Netflow::ones(2);
        let bin = lidskii_points_terms(&dp, &two, PointsFormula::Binomial).unwrap();
        assert_eq!(breakdown(&bin), vec![(vec![1, 1], 4), (vec![2, 0], 2)]);
        let ms = lidskii_points_terms(&dp, &two, PointsFormula::Multiset).unwrap();
        assert_eq!(breakdown(&ms), vec![(vec![1, 1], 0), (vec![2, 0], 6)]);
        assert_eq!(ms[0].kpf_factor, None);
    }

    #[test]
    fn indegree_forms() {
        let ones = Netflow::ones(3);
        let terms = volume_indegree_terms(&k4(), &ones).unwrap();
        assert_eq!(breakdown(&terms), vec![(vec![0, 0, 3], 1), (vec![0, 1, 2], 3)]);
        // F(1,0,0,-1) is b = (0,0,1); b = (1,0,0) is the point polytope F(1,-1,0,0).
        assert_eq!(volume_indegree(&k4(), &Netflow::new(vec![0, 0, 1])).unwrap(), BigUint::one());
        assert_eq!(volume_indegree(&k4(), &Netflow::new(vec![1, 0, 0])).unwrap(), BigUint::zero());
        let path = MultiDigraph::new(2, vec![(1, 2), (2, 3)]).unwrap();
        assert_eq!(volume_indegree(&path, &Netflow::new(vec![0, 1])).unwrap(), BigUint::one());
        assert_eq!(points_indegree(&k4(), &ones).unwrap(), BigUint::from(7u32));
        assert_eq!(points_indegree(&path, &Netflow::new(vec![0, 1])).unwrap(), BigUint::one());
        let no_in = MultiDigraph::new(2, vec![(1, 3), (2, 3)]).unwrap();
        assert_eq!(volume_indegree(&no_in, &Netflow::ones(2)), Err(Error::MissingIncomingEdge(2)));
    }

    #[test]
    fn unit_identities() {
        let u = unit_volume_identities(&k4()).unwrap();
        assert_eq!((u.volume.clone(), u.via_outdegrees.clone()), (BigUint::one(), BigUint::one()));
        assert!(u.all_equal());
        let u = unit_volume_identities(&MultiDigraph::complete(5).unwrap()).unwrap();
        assert_eq!(u.volume, BigUint::from(2u32));
        assert_eq!(u.via_indegrees, Some(BigUint::from(2u32)));
        assert!(u.all_equal());
        let single = MultiDigraph::new(1, vec![(1, 2)]).unwrap();
        assert!(unit_volume_identities(&single).unwrap().all_equal());
    }

    #[test]
    fn missing_outgoing_edge() {
        let g = MultiDigraph::new(2, vec![(1, 3)]).unwrap();
        assert_eq!(lidskii_volume(&g, &Netflow::ones(2)), Err(Error::MissingOutgoingEdge(2)));
    }
}
