//! Laurent polynomials `Z[x, x^-1]`, standing in for the integral group ring
//! of the infinite cyclic voltage group: `x^k` is the group element `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::arith::valuation;
use crate::matrix::IntegerMatrix;
use crate::par::{self, Execution};

/// Finitely supported map `exponent -> coefficient`; zero coefficients are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Laurent {
    terms: BTreeMap<i64, BigInt>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(BigInt::one(), 0)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Laurent::monomial(c.into(), 0)
    }

    pub fn monomial(c: BigInt, exponent: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(exponent, c);
        l
    }

    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut l = Laurent::zero();
        for (e, c) in terms {
            l.add_term(e, c.into());
        }
        l
    }

    pub fn add_term(&mut self, exponent: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: i64) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    /// The augmentation `x -> 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Image in `Z[x]/(x^modulus - 1)`, exponents folded into `[0, modulus)`.
    pub fn fold(&self, modulus: u64) -> Self {
        assert!(modulus > 0, "fold modulus must be positive");
        let m = modulus as i128;
        let mut out = Laurent::zero();
        for (&e, c) in &self.terms {
            let r = (e as i128).rem_euclid(m) as i64;
            out.add_term(r, c.clone());
        }
        out
    }

    /// Nonnegative gcd of the coefficients; zero for the zero element.
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// `v_p` of the content; `None` (infinite) for zero.
    pub fn content_valuation(&self, p: u64) -> Option<u32> {
        valuation(&self.content(), p)
    }

    fn from_poly(p: &Poly, shift: i64) -> Self {
        let mut l = Laurent::zero();
        for (i, c) in p.0.iter().enumerate() {
            l.add_term(i as i64 + shift, c.clone());
        }
        l
    }

    fn to_poly(&self, shift: i64) -> Poly {
        let mut coeffs = Vec::new();
        for (&e, c) in &self.terms {
            let i = usize::try_from(e + shift).expect("shift clears negative exponents");
            if coeffs.len() <= i {
                coeffs.resize(i + 1, BigInt::zero());
            }
            coeffs[i] = c.clone();
        }
        Poly(coeffs)
    }
}

impl Add for &Laurent {
    type Output = Laurent;

    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &Laurent {
    type Output = Laurent;

    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Neg for &Laurent {
    type Output = Laurent;

    fn neg(self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for &Laurent {
    type Output = Laurent;

    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&a, c) in &self.terms {
            for (&b, d) in &rhs.terms {
                out.add_term(a + b, c * d);
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    /// Descending exponents, e.g. `-x + 2 - x^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (&e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let var = match e {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{e}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Laurent {
    /// `{"<exponent>": "<coeff>"}` in ascending exponent order.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

pub(crate) fn ser_bigints<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Dense polynomial in ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<BigInt>);

impl Poly {
    fn trimmed(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::trimmed(out)
    }

    fn sub(&self, rhs: &Poly) -> Poly {
        let len = self.0.len().max(rhs.0.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in rhs.0.iter().enumerate() {
            out[i] -= b;
        }
        Poly::trimmed(out)
    }

    /// Quotient of a division known to be exact over `Z`.
    fn div_exact(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly(Vec::new());
        }
        let mut rem = self.0.clone();
        let dl = d.0.len();
        assert!(rem.len() >= dl, "inexact polynomial division");
        let lead = d.0.last().expect("nonzero");
        let mut q = vec![BigInt::zero(); rem.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let top = &rem[k + dl - 1];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            assert!(r.is_zero(), "inexact polynomial division");
            for (j, dj) in d.0.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
        Poly::trimmed(q)
    }
}

/// Square matrix over the Laurent ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    entries: Vec<Vec<Laurent>>,
}

impl LaurentMatrix {
    pub fn new(entries: Vec<Vec<Laurent>>) -> Self {
        let n = entries.len();
        assert!(
            entries.iter().all(|r| r.len() == n),
            "LaurentMatrix must be square"
        );
        LaurentMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Laurent>] {
        &self.entries
    }

    /// Entrywise augmentation `x -> 1`.
    pub fn eval_at_one(&self) -> IntegerMatrix {
        let n = self.size();
        let mut m = IntegerMatrix::zeros(n, n);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval_at_one();
            }
        }
        m
    }

    /// Simultaneous row/column permutation `A -> P A P^T`, with
    /// `perm[i]` the new index of old index `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.size();
        let mut out = vec![vec![Laurent::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                out[perm[i]][perm[j]] = self.entries[i][j].clone();
            }
        }
        LaurentMatrix { entries: out }
    }

    pub fn determinant(&self) -> Laurent {
        self.determinant_with(Execution::default())
    }

    /// Exact determinant: each row is multiplied by `x^k` to clear negative
    /// exponents, the polynomial determinant is taken by Bareiss elimination
    /// over `Z[x]`, and the total shift is undone.
    pub fn determinant_with(&self, execution: Execution) -> Laurent {
        let n = self.size();
        if n == 0 {
            return Laurent::one();
        }
        let mut total_shift = 0i64;
        let mut a: Vec<Vec<Poly>> = self
            .entries
            .iter()
            .map(|row| {
                let low = row
                    .iter()
                    .filter_map(Laurent::min_exponent)
                    .min()
                    .unwrap_or(0);
                let k = (-low).max(0);
                total_shift += k;
                row.iter().map(|e| e.to_poly(k)).collect()
            })
            .collect();
        let mut negate = false;
        let mut prev = Poly(vec![BigInt::one()]);
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return Laurent::zero(),
                }
            }
            let (head, tail) = a.split_at_mut(k + 1);
            let pivot_row = &head[k];
            let pivot = &pivot_row[k];
            let prev_ref = &prev;
            let updated: Vec<Vec<Poly>> = par::map(execution, tail, |row| {
                let mut row = row.clone();
                for j in k + 1..n {
                    let num = row[j].mul(pivot).sub(&row[k].mul(&pivot_row[j]));
                    row[j] = num.div_exact(prev_ref);
                }
                row
            });
            tail.clone_from_slice(&updated);
            prev = a[k][k].clone();
        }
        let det = Laurent::from_poly(&prev, -total_shift);
        if negate {
            -&det
        } else {
            det
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(terms: &[(i64, i64)]) -> Laurent {
        Laurent::from_terms(terms.iter().copied())
    }

    #[test]
    fn ring_operations() {
        let a = l(&[(-1, 1), (0, 2)]);
        let b = l(&[(1, 1), (0, -1)]);
        assert_eq!(&a * &b, l(&[(-1, -1), (0, -1), (1, 2)]));
        assert_eq!(&a - &a, Laurent::zero());
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(a.shift(3), l(&[(2, 1), (3, 2)]));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut a = l(&[(2, 5)]);
        a.add_term(2, BigInt::from(-5));
        assert!(a.is_zero());
        assert_eq!(a.min_exponent(), None);
        assert_eq!(l(&[(4, 0)]), Laurent::zero());
    }

    #[test]
    fn folding_reduces_modulo_group_order() {
        let theta = l(&[(-1, -1), (0, 2), (1, -1)]);
        assert_eq!(theta.fold(2), l(&[(0, 2), (1, -2)]));
        assert_eq!(theta.fold(1), Laurent::zero());
        assert_eq!(l(&[(5, 3), (-4, 1)]).fold(9), l(&[(5, 4)]));
    }

    #[test]
    fn content_and_valuation() {
        let t = l(&[(0, 12), (3, -18), (-2, 6)]);
        assert_eq!(t.content(), BigInt::from(6));
        assert_eq!(t.content_valuation(2), Some(1));
        assert_eq!(t.content_valuation(5), Some(0));
        assert_eq!(Laurent::zero().content_valuation(3), None);
    }

    #[test]
    fn display() {
        assert_eq!(l(&[(-1, -1), (0, 2), (1, -1)]).to_string(), "-x + 2 - x^-1");
        assert_eq!(l(&[(2, 3)]).to_string(), "3*x^2");
        assert_eq!(Laurent::zero().to_string(), "0");
    }

    #[test]
    fn serializes_exponents_in_numeric_order() {
        let t = l(&[(-1, -1), (0, 2), (10, -1)]);
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"-1":"-1","0":"2","10":"-1"}"#
        );
    }

    #[test]
    fn exact_division() {
        // (x - 1)^2 = x^2 - 2x + 1 divided by (x - 1)
        let sq = Poly(vec![1.into(), (-2).into(), 1.into()]);
        let d = Poly(vec![(-1).into(), 1.into()]);
        assert_eq!(sq.div_exact(&d), d);
    }

    #[test]
    fn determinant_of_two_by_two() {
        let m = LaurentMatrix::new(vec![
            vec![Laurent::constant(1), l(&[(1, -1)])],
            vec![l(&[(-1, -1)]), Laurent::constant(1)],
        ]);
        assert!(m.determinant().is_zero());
        let m = LaurentMatrix::new(vec![
            vec![l(&[(0, 0)]), l(&[(2, 1)])],
            vec![l(&[(-3, 1)]), l(&[(0, 5)])],
        ]);
        // 0 * 5 - x^2 * x^-3, needs a row swap
        assert_eq!(m.determinant(), l(&[(-1, -1)]));
    }
}
