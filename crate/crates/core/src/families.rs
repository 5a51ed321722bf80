//! Closed forms for special families of flow polytopes, and the word and
//! parking-function expansions of the volume.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combin::{bareiss_determinant, binomial, factorial, multinomial};
use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, Netflow};
use crate::kostant::{ehrhart_poly, ehrhart_value};
use crate::lidskii::{dominance_compositions, generalized_binomial, multiset_coeff, LidskiiTable};
use crate::subdivision::cell_types_determinant;

pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / (k + 1)
}

fn catalan_product(upto: u64) -> BigUint {
    (0..=upto).map(catalan).product()
}

/// Standard Young tableaux of a shape (weakly decreasing row lengths), by
/// the hook-length rule.
pub fn hook_length_count(shape: &[u64]) -> BigUint {
    let cells: u64 = shape.iter().sum();
    let mut hooks = BigUint::one();
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len {
            let arm = len - c - 1;
            let leg = shape[r + 1..].iter().filter(|&&l| l > c).count() as u64;
            hooks *= arm + leg + 1;
        }
    }
    factorial(cells) / hooks
}

/// `f^{(n-1, n-2, ..., 1)}`.
pub fn hook_staircase(n: u64) -> BigUint {
    let shape: Vec<u64> = (1..n).rev().collect();
    hook_length_count(&shape)
}

/// Volume of `F_{k_{n+1}}(1, 0, ..., 0, -1)`: `C_0 C_1 ... C_{n-2}`.
pub fn cry_volume(n: u64) -> BigUint {
    if n < 2 {
        return BigUint::one();
    }
    catalan_product(n - 2)
}

/// Volume of `F_{k_{n+1}}(1, ..., 1, -n)`: `f^{(n-1,...,1)} C_0 ... C_{n-1}`.
pub fn tesler_volume(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    hook_staircase(n) * catalan_product(n - 1)
}

/// Volume of `F_{k_{n+1}}(1, 1, 0, ..., 0, -2)`: `2^{C(n,2) - 1} C_0 ... C_{n-2}`.
pub fn ckm_volume(n: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::BadParams(format!("ckm_volume needs n >= 2, got {n}")));
    }
    Ok((BigUint::one() << (n * (n - 1) / 2 - 1)) * catalan_product(n - 2))
}

fn monomial(a: &[u64], j: &[u64]) -> BigUint {
    a.iter().zip(j).map(|(&x, &e)| num_traits::pow(BigUint::from(x), e as usize)).product()
}

/// Volume of the Pitman–Stanley flow polytope `F_{Pi_n}(a)`.
pub fn ps_volume(a: &[u64]) -> BigUint {
    let n = a.len();
    dominance_compositions(&vec![1; n], n as u64)
        .iter()
        .map(|j| multinomial(j) * monomial(a, j))
        .sum()
}

/// Lattice points of the Pitman–Stanley polytope `PS(a)`:
/// `det[ C(a_1 + ... + a_{n-i+1} + 1, i - j + 1) ]`.
pub fn ps_lattice_count(a: &[u64]) -> BigUint {
    let n = a.len();
    let prefix = |k: usize| -> i64 { a[..k].iter().sum::<u64>() as i64 };
    let matrix: Vec<Vec<BigInt>> = (1..=n)
        .map(|i| {
            let top = prefix(n - i + 1) + 1;
            (1..=n)
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
    bareiss_determinant(&matrix).to_biguint().expect("lattice-point counts are nonnegative")
}

/// Parking functions of length `n` in lexicographic order: words over
/// `1..=n` whose sorted rearrangement `w` has `w_i <= i`.
pub fn parking_functions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut word = vec![1usize; n];
    if n == 0 {
        return vec![Vec::new()];
    }
    loop {
        let mut s = word.clone();
        s.sort_unstable();
        if s.iter().enumerate().all(|(i, &w)| w <= i + 1) {
            out.push(word.clone());
        }
        let mut k = n;
        while k > 0 && word[k - 1] == n {
            word[k - 1] = 1;
            k -= 1;
        }
        if k == 0 {
            return out;
        }
        word[k - 1] += 1;
    }
}

/// `sum over parking functions k of a_{k_1} ... a_{k_n}`.
pub fn ps_word_volume(a: &[u64]) -> BigUint {
    parking_functions(a.len())
        .iter()
        .map(|w| w.iter().map(|&k| BigUint::from(a[k - 1])).product::<BigUint>())
        .sum()
}

/// The volume polynomial written as a sum over words `w` of length `m - n`
/// with multiplicity `m(w) = K_G(j - out, 0)`, `j` the letter content of `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordExpansion {
    #[serde(serialize_with = "crate::serde_big::word_counts")]
    pub entries: BTreeMap<Vec<usize>, BigUint>,
}

impl WordExpansion {
    pub fn total(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn distinct_words(&self) -> usize {
        self.entries.len()
    }
}

fn words_with_content(content: &[u64]) -> Vec<Vec<usize>> {
    let len: u64 = content.iter().sum();
    let mut out = Vec::new();
    let mut left = content.to_vec();
    let mut cur = Vec::with_capacity(len as usize);
    fn rec(left: &mut [u64], cur: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for k in 0..left.len() {
            if left[k] > 0 {
                left[k] -= 1;
                cur.push(k + 1);
                rec(left, cur, len, out);
                cur.pop();
                left[k] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, len as usize, &mut out);
    out
}

/// Words with positive multiplicity.
pub fn words_expansion(g: &MultiDigraph) -> Result<WordExpansion> {
    let table = LidskiiTable::new(g)?;
    let mut entries = BTreeMap::new();
    for (idx, j) in table.compositions().iter().enumerate() {
        let k = table.kpf_factor(idx);
        if k.is_zero() {
            continue;
        }
        for w in words_with_content(j) {
            entries.insert(w, k.clone());
        }
    }
    Ok(WordExpansion { entries })
}

/// `sum_w m(w)`, without listing the words.
pub fn words_total(g: &MultiDigraph) -> Result<BigUint> {
    let table = LidskiiTable::new(g)?;
    Ok((0..table.len()).map(|idx| multinomial(&table.compositions()[idx]) * table.kpf_factor(idx)).sum())
}

fn check_pic(c: &[u64], a: &[u64]) -> Result<()> {
    if c.is_empty() || c.len() != a.len() {
        return Err(Error::BadParams(format!("c and a must have the same positive length, got {} and {}", c.len(), a.len())));
    }
    Ok(())
}

fn pic_compositions(c: &[u64]) -> Vec<Vec<u64>> {
    let out: Vec<i64> = c.iter().map(|&x| x as i64).collect();
    dominance_compositions(&out, c.iter().sum())
}

fn sum_nonnegative(v: BigInt) -> BigUint {
    v.to_biguint().expect("sum is nonnegative")
}

/// Volume of `F_{Pi_n(c)}(a)`: the Kostant factors are all 1.
pub fn pic_volume(c: &[u64], a: &[u64]) -> Result<BigUint> {
    check_pic(c, a)?;
    Ok(pic_compositions(c).iter().map(|j| multinomial(j) * monomial(a, j)).sum())
}

/// `K_{Pi_n(c)}(a)` by the binomial formula: `prod C(a_i + c_i, j_i)`.
pub fn pic_points_binomial(c: &[u64], a: &[u64]) -> Result<BigUint> {
    check_pic(c, a)?;
    let total: BigInt = pic_compositions(c)
        .iter()
        .map(|j| {
            (0..j.len())
                .map(|i| generalized_binomial((a[i] + c[i]) as i64, j[i]))
                .product::<BigInt>()
        })
        .sum();
    Ok(sum_nonnegative(total))
}

/// `K_{Pi_n(c)}(a)` by the multiset formula, with `in_1 = -1` and
/// `in_i = 0` otherwise.
pub fn pic_points_multiset(c: &[u64], a: &[u64]) -> Result<BigUint> {
    check_pic(c, a)?;
    let total: BigInt = pic_compositions(c)
        .iter()
        .map(|j| {
            (0..j.len())
                .map(|i| multiset_coeff(a[i] as i64 + (i == 0) as i64, j[i]))
                .product::<BigInt>()
        })
        .sum();
    Ok(sum_nonnegative(total))
}

/// Volume of `F_{Pi_n(c)*}(1, 0, ..., 0, -1)`, the lattice-point count of
/// `PS(c_n, ..., c_2)`. It does not depend on `c_1`.
pub fn pic_star_volume(c: &[u64]) -> BigUint {
    let out: Vec<i64> = c.iter().map(|&x| x as i64).collect();
    cell_types_determinant(&out).to_biguint().expect("lattice-point counts are nonnegative")
}

/// `(1/n!) (c+1) (c+nd+2) (c+nd+3) ... (c+nd+n)`, which counts the lattice
/// points of `PS(c, d, ..., d)` with `n - 1` copies of `d`, i.e. equals
/// `pic_star_volume(d, ..., d, c)` with `n + 1` entries.
pub fn ps_block_product(c: u64, d: u64, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BadParams("ps_block_product needs n >= 1".into()));
    }
    let mut num = BigUint::from(c + 1);
    for k in 2..=n {
        num *= c + n * d + k;
    }
    let den = factorial(n);
    if !(&num % &den).is_zero() {
        return Err(Error::BadParams(format!("product is not divisible by {n}! for c={c}, d={d}")));
    }
    Ok(num / den)
}

/// Checks that the Ehrhart polynomial of `F_{Pi_n(c)}(a)` has positive
/// coefficients in every degree up to its own, after confirming it against
/// direct counts for `t = 0..=t_max`.
pub fn ehrhart_positivity_check(c: &[u64], a: &[u64], t_max: u64) -> Result<bool> {
    check_pic(c, a)?;
    let g = MultiDigraph::pi_c(c)?;
    let net = Netflow::new(a.iter().map(|&x| x as i64).collect());
    let e = ehrhart_poly(&g, &net)?;
    for t in 0..=t_max {
        let direct = BigRational::from_integer(BigInt::from(ehrhart_value(&g, &net, t)?));
        if e.eval(t as i64) != direct {
            return Ok(false);
        }
    }
    if e.poly.is_zero() {
        return Ok(false);
    }
    Ok(e.poly.univariate_coefficients().iter().all(|x| x.is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kostant::kpf;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Counts standard Young tableaux by removing corners recursively.
    fn syt_brute(shape: &mut Vec<u64>) -> u64 {
        if shape.iter().all(|&x| x == 0) {
            return 1;
        }
        let mut total = 0;
        for r in 0..shape.len() {
            let is_corner = shape[r] > 0 && (r + 1 == shape.len() || shape[r + 1] < shape[r]);
            if is_corner {
                shape[r] -= 1;
                total += syt_brute(shape);
                shape[r] += 1;
            }
        }
        total
    }

    /// Lattice points of `PS(a)`: `y >= 0` with `y_1 + ... + y_k <= a_1 + ... + a_k`.
    fn ps_points_brute(a: &[u64]) -> u64 {
        fn rec(a: &[u64], k: usize, ysum: u64, asum: u64) -> u64 {
            if k == a.len() {
                return 1;
            }
            let cap = asum + a[k];
            (0..=cap - ysum).map(|y| rec(a, k + 1, ysum + y, cap)).sum()
        }
        rec(a, 0, 0, 0)
    }

    #[test]
    fn catalan_and_hooks() {
        let c: Vec<BigUint> = (0..7).map(catalan).collect();
        assert_eq!(c, [1u64, 1, 2, 5, 14, 42, 132].map(big));
        assert_eq!(hook_staircase(3), big(2));
        assert_eq!(hook_staircase(4), big(16));
        for n in 0..=5u64 {
            let mut shape: Vec<u64> = (1..n).rev().collect();
            assert_eq!(hook_staircase(n), big(syt_brute(&mut shape)));
        }
        assert_eq!(hook_length_count(&[3, 1]), big(syt_brute(&mut vec![3, 1])));
    }

    #[test]
    fn complete_graph_products() {
        assert_eq!((3..=7).map(cry_volume).collect::<Vec<_>>(), [1u64, 2, 10, 140, 5880].map(big));
        assert_eq!(tesler_volume(3), big(4));
        assert_eq!(tesler_volume(4), big(160));
        assert_eq!(ckm_volume(3).unwrap(), big(4));
        assert!(ckm_volume(1).is_err());
    }

    #[test]
    fn pitman_stanley() {
        assert_eq!(ps_volume(&[1, 1, 1]), big(16));
        assert_eq!(ps_volume(&[5]), big(5));
        assert_eq!(ps_volume(&[1, 0, 0, 0]), big(1));
        assert_eq!(ps_lattice_count(&[1, 1, 1]), big(14));
        assert_eq!(ps_lattice_count(&[4]), big(5));
        for a in [vec![2, 0, 1], vec![0, 3], vec![1, 2, 1, 1], vec![3, 0, 0, 2]] {
            assert_eq!(ps_lattice_count(&a), big(ps_points_brute(&a)), "{a:?}");
        }
    }

    #[test]
    fn parking() {
        assert_eq!(parking_functions(2), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(parking_functions(3).len(), 16);
        assert_eq!(parking_functions(4).len(), 125);
        assert_eq!(ps_word_volume(&[1, 0]), big(1));
        assert_eq!(ps_word_volume(&[2, 1, 3]), ps_volume(&[2, 1, 3]));
    }

    #[test]
    fn words() {
        let k4 = MultiDigraph::complete(4).unwrap();
        let w = words_expansion(&k4).unwrap();
        assert_eq!(w.distinct_words(), 4);
        assert!(w.entries.values().all(|m| *m == big(1)));
        assert!(w.entries.contains_key(&vec![1, 1, 1]) && w.entries.contains_key(&vec![2, 1, 1]));
        assert_eq!(w.total(), big(4));
        assert_eq!(words_total(&k4).unwrap(), tesler_volume(3));

        let ps3 = MultiDigraph::pitman_stanley(3).unwrap();
        let w = words_expansion(&ps3).unwrap();
        let pf: Vec<Vec<usize>> = parking_functions(3);
        assert_eq!(w.entries.keys().cloned().collect::<Vec<_>>(), pf);
    }

    #[test]
    fn pic_family() {
        assert_eq!(pic_volume(&[1, 1, 1], &[1, 1, 1]).unwrap(), big(16));
        assert_eq!(pic_points_binomial(&[1, 1, 1], &[1, 1, 1]).unwrap(), big(14));
        assert_eq!(pic_points_multiset(&[1, 1, 1], &[1, 1, 1]).unwrap(), big(14));
        assert_eq!(pic_volume(&[1], &[6]).unwrap(), big(6));
        assert_eq!(pic_points_binomial(&[1], &[6]).unwrap(), big(7));
        assert_eq!(pic_volume(&[2, 1], &[1, 1]).unwrap(), big(4));
        let g = MultiDigraph::pi_c(&[2, 1]).unwrap();
        assert_eq!(pic_points_multiset(&[2, 1], &[2, 3]).unwrap(), kpf(&g, &[2, 3, -5]).unwrap());
        assert!(pic_volume(&[1, 1], &[1]).is_err());
    }

    #[test]
    fn pic_star_and_blocks() {
        assert_eq!(pic_star_volume(&[1, 1, 1]), big(5));
        assert_eq!(pic_star_volume(&[1, 2, 3]), pic_star_volume(&[99, 2, 3]));
        assert_eq!(ps_block_product(0, 1, 2).unwrap(), big(2));
        for n in 1..=4u64 {
            for c in 0..=3u64 {
                for d in 0..=3u64 {
                    let mut shape = vec![d; n as usize];
                    shape.push(c);
                    assert_eq!(ps_block_product(c, d, n).unwrap(), pic_star_volume(&shape), "c={c} d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn positivity() {
        assert!(ehrhart_positivity_check(&[1, 1, 1], &[1, 1, 1], 4).unwrap());
        assert!(ehrhart_positivity_check(&[2, 1], &[3, 2], 4).unwrap());
    }
}
