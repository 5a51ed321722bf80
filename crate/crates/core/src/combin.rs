//! Small exact combinatorial helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `C(n, k)` for nonnegative arguments.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial coefficient `(sum parts)! / prod(part!)`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut total = 0;
    let mut acc = BigUint::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// All weak compositions of `total` into `len` parts, in lexicographic order.
pub fn weak_compositions(total: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0; len];
    fill_compositions(total, 0, &mut cur, &mut out);
    out
}

fn fill_compositions(rest: u64, pos: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if pos + 1 >= cur.len() {
        if cur.is_empty() {
            if rest == 0 {
                out.push(Vec::new());
            }
            return;
        }
        cur[pos] = rest;
        out.push(cur.clone());
        return;
    }
    for v in 0..=rest {
        cur[pos] = v;
        fill_compositions(rest - v, pos + 1, cur, out);
    }
}

/// Determinant by fraction-free (Bareiss) elimination. The empty matrix has
/// determinant 1.
pub fn bareiss_determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
        if m.is_empty() {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for c in 0..m.len() {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &m[0][c] * cofactor_det(&minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn binomials_and_multinomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 3), BigUint::zero());
        assert_eq!(multinomial(&[2, 1, 0]), BigUint::from(3u32));
        assert_eq!(multinomial(&[]), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
    }

    #[test]
    fn compositions_enumerated_in_order() {
        let c = weak_compositions(2, 2);
        assert_eq!(c, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(weak_compositions(3, 3).len(), 10);
        assert_eq!(weak_compositions(0, 0), vec![Vec::<u64>::new()]);
        assert!(weak_compositions(1, 0).is_empty());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let mats: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![3, 1], vec![1, 2]],
            vec![vec![0, 1, 2], vec![3, 0, 1], vec![2, 5, 0]],
            vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]],
            vec![vec![2, -1, 0, 4], vec![1, 3, -2, 0], vec![0, 1, 1, 1], vec![5, 0, 2, -3]],
        ];
        for m in mats {
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            assert_eq!(bareiss_determinant(&big), cofactor_det(&big));
        }
        assert_eq!(bareiss_determinant(&[]), BigInt::one());
    }
}
