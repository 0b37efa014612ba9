use std::fmt;

use crate::arith;
use crate::error::{invalid, Result};

/// A homogeneous polynomial with integer coefficients, stored as a list of
/// monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousForm {
    nvars: usize,
    degree: u32,
    terms: Vec<(i64, Vec<u32>)>,
}

impl HomogeneousForm {
    /// Builds a form from `(coefficient, exponents)` pairs. Zero terms are
    /// dropped, equal monomials merged, and the content divided out.
    pub fn new(nvars: usize, terms: &[(i64, Vec<u32>)]) -> Result<Self> {
        if nvars == 0 {
            return invalid("a form needs at least one variable");
        }
        let mut merged: Vec<(i128, Vec<u32>)> = Vec::new();
        let mut degree = None;
        for (c, e) in terms {
            if e.len() != nvars {
                return invalid(format!(
                    "monomial has {} exponents, expected {nvars}",
                    e.len()
                ));
            }
            if *c == 0 {
                continue;
            }
            let d: u32 = e.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return invalid(format!("form is not homogeneous ({d0} vs {d})"))
                }
                _ => {}
            }
            match merged.iter_mut().find(|(_, e2)| e2 == e) {
                Some(t) => t.0 += *c as i128,
                None => merged.push((*c as i128, e.clone())),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        if merged.is_empty() {
            return invalid("form has content zero");
        }
        let content = merged
            .iter()
            .fold(0i128, |g, (c, _)| gcd_i128(g, *c));
        let mut out = Vec::with_capacity(merged.len());
        for (c, e) in merged {
            let c = i64::try_from(c / content)
                .map_err(|_| crate::Error::Overflow("form coefficient".into()))?;
            out.push((c, e));
        }
        Ok(HomogeneousForm {
            nvars,
            degree: degree.unwrap_or(0),
            terms: out,
        })
    }

    /// Σ cᵢ xᵢ^d.
    pub fn diagonal(coeffs: &[i64], degree: u32) -> Result<Self> {
        let n = coeffs.len();
        let terms: Vec<(i64, Vec<u32>)> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = degree;
                (c, e)
            })
            .collect();
        Self::new(n, &terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(i64, Vec<u32>)] {
        &self.terms
    }

    pub fn coefficients(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    /// Partial derivative in variable `i`; `None` if it vanishes identically.
    pub(crate) fn derivative_terms(&self, i: usize) -> Vec<(i128, Vec<u32>)> {
        self.terms
            .iter()
            .filter(|(_, e)| e[i] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (*c as i128 * e[i] as i128, e2)
            })
            .collect()
    }

    /// Exact value at an integer vector, if it fits.
    pub fn eval(&self, x: &[i64]) -> Option<i128> {
        if x.len() != self.nvars {
            return None;
        }
        let mut acc: i128 = 0;
        for (c, e) in &self.terms {
            let mut t = *c as i128;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t.checked_mul(*xi as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    /// Largest power of `p` dividing every coefficient is always 1 after
    /// construction; this reports whether the reduction mod p vanishes.
    pub fn vanishes_mod(&self, p: u64) -> bool {
        self.terms.iter().all(|(c, _)| arith::rem(*c as i128, p) == 0)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, e)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{d}")?,
                }
            }
        }
        Ok(())
    }
}
