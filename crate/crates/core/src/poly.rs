//! Polynomials with arbitrary-precision rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Sparse polynomial over named variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl ExactPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        ExactPoly { vars, terms: BTreeMap::new() }
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(var: &str, coeffs: &[BigRational]) -> Self {
        let mut p = ExactPoly::zero(vec![var.to_string()]);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c.clone());
        }
        p
    }

    /// Variables `a1..an`.
    pub fn indexed_vars(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, coeff: BigRational) {
        assert_eq!(exps.len(), self.vars.len(), "exponent arity");
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == degree)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len(), "evaluation point arity");
        let mut total = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                // 0^0 = 1
                term *= num_traits::pow(x.clone(), e as usize);
            }
            total += term;
        }
        total
    }

    pub fn eval_int(&self, point: &[i64]) -> BigRational {
        let pt: Vec<BigRational> = point.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        self.eval(&pt)
    }

    /// Ascending coefficients of a univariate polynomial.
    pub fn univariate_coefficients(&self) -> Vec<BigRational> {
        assert_eq!(self.vars.len(), 1, "univariate_coefficients on a multivariate polynomial");
        let deg = self.degree().unwrap_or(0) as usize;
        (0..=deg).map(|k| self.coefficient(&[k as u32])).collect()
    }

    pub fn scale(&self, c: &BigRational) -> ExactPoly {
        let mut p = ExactPoly::zero(self.vars.clone());
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn add(&self, other: &ExactPoly) -> ExactPoly {
        assert_eq!(self.vars, other.vars, "variable mismatch");
        let mut p = self.clone();
        for (e, v) in &other.terms {
            p.add_term(e.clone(), v.clone());
        }
        p
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        assert_eq!(self.vars, other.vars, "variable mismatch");
        let mut p = ExactPoly::zero(self.vars.clone());
        for (e1, v1) in &self.terms {
            for (e2, v2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, v1 * v2);
            }
        }
        p
    }
}

/// Exact Lagrange interpolation through `(x_k, y_k)` with distinct `x_k`.
pub fn lagrange_interpolate(var: &str, points: &[(BigInt, BigInt)]) -> ExactPoly {
    let vars = vec![var.to_string()];
    let mut result = ExactPoly::zero(vars.clone());
    for (k, (xk, yk)) in points.iter().enumerate() {
        let mut basis = ExactPoly::univariate(var, &[BigRational::one()]);
        let mut denom = BigInt::one();
        for (l, (xl, _)) in points.iter().enumerate() {
            if l == k {
                continue;
            }
            let factor = ExactPoly::univariate(
                var,
                &[BigRational::from_integer(-xl.clone()), BigRational::one()],
            );
            basis = basis.mul(&factor);
            denom *= xk - xl;
        }
        result = result.add(&basis.scale(&BigRational::new(yk.clone(), denom)));
    }
    result
}

impl fmt::Display for ExactPoly {
    /// Terms in descending total degree, e.g. `2t^2+3t+1` or `a1^3+3a1^2*a2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Vec<u32>, &BigRational)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (exps, c)) in ordered.into_iter().enumerate() {
            let monomial: Vec<String> = exps
                .iter()
                .zip(&self.vars)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            let negative = c.is_negative();
            if idx > 0 {
                write!(f, "{}", if negative { "-" } else { "+" })?;
            } else if negative {
                write!(f, "-")?;
            }
            let mag = c.abs();
            let mag_str = if mag.is_integer() { mag.to_integer().to_string() } else { format!("({mag})") };
            if monomial.is_empty() {
                write!(f, "{mag_str}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag_str}")?;
                }
                write!(f, "{}", monomial.join("*"))?;
            }
        }
        Ok(())
    }
}
