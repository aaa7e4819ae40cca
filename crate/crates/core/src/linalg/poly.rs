//! Univariate polynomials and the coprime splitting used by the decomposition search.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use super::scalar::{Field, Rational, Scalar};
use crate::error::{Error, Result};

/// Coefficients stored low degree first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_i64(field: Field, c: &[i64]) -> Self {
        UniPoly::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn zero(field: Field) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Self {
        UniPoly::new(field, vec![field.one()])
    }

    /// `x - a`.
    pub fn linear(a: &Scalar) -> Self {
        let f = a.field();
        UniPoly::new(f, vec![-a, f.one()])
    }

    pub fn x(field: Field) -> Self {
        UniPoly::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(Scalar::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero lead");
                UniPoly { field: self.field, coeffs: self.coeffs.iter().map(|c| c * &inv).collect() }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = self.field.zero();
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
            .collect();
        UniPoly::new(self.field, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-&self.field.one()))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        UniPoly::new(self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(self.field);
        }
        let mut c = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j].add_mul_assign(a, b);
            }
        }
        UniPoly::new(self.field, c)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = UniPoly::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder; fails on a zero divisor.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.lead().ok_or(Error::ZeroPolynomial)?;
        let inv = dl.inv().expect("nonzero lead");
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((UniPoly::zero(self.field), self.clone()));
        }
        let mut q = vec![self.field.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            let neg = -&c;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j].add_mul_assign(&neg, dc);
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((UniPoly::new(self.field, q), UniPoly::new(self.field, r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.from_i64(i as i64))
            .collect();
        UniPoly::new(self.field, c)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `self^e mod m` by repeated squaring.
    fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m).expect("nonzero modulus");
        let mut acc = UniPoly::one(self.field).rem(m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Product of the distinct monic irreducible factors.
    pub fn radical(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(UniPoly::one(self.field));
        }
        let d = self.derivative();
        if d.is_zero() {
            // characteristic p and f = g(x^p) = h(x)^p with h having the same coefficients
            let p = self.field.characteristic() as usize;
            let h = UniPoly::new(self.field, self.coeffs.iter().step_by(p).cloned().collect());
            return h.radical();
        }
        let g = self.gcd(&d);
        let w = self.div_exact(&g)?.monic();
        if self.field.characteristic() == 0 || g.is_constant() {
            return Ok(w);
        }
        let rg = g.radical()?;
        let common = w.gcd(&rg);
        Ok(w.mul(&rg).div_exact(&common)?.monic())
    }

    /// Square-free decomposition in characteristic zero: `f = c · Π s_i^i`.
    fn yun(&self) -> Vec<UniPoly> {
        let f = self.monic();
        let d = f.derivative();
        let mut a = f.gcd(&d);
        let mut b = f.div_exact(&a).expect("gcd divides");
        let mut c = d.div_exact(&a).expect("gcd divides");
        let mut dd = c.sub(&b.derivative());
        let mut out = Vec::new();
        while !b.is_constant() {
            a = b.gcd(&dd);
            out.push(a.clone());
            b = b.div_exact(&a).expect("gcd divides");
            c = dd.div_exact(&a).expect("gcd divides");
            dd = c.sub(&b.derivative());
        }
        out
    }

    /// A nontrivial monic factor of a square-free polynomial, if one is found.
    fn squarefree_factor(&self) -> Option<UniPoly> {
        let deg = self.degree()?;
        if deg < 2 {
            return None;
        }
        if self.coeffs[0].is_zero() {
            return Some(UniPoly::x(self.field));
        }
        match self.field {
            Field::Prime(p) => berlekamp_factor(self, p),
            Field::Rationals => rational_root(self).map(|r| UniPoly::linear(&r)),
        }
    }

    /// Split `f = g·h` with `gcd(g, h) = 1` and both factors nonconstant.
    ///
    /// Over a prime field every reducible non-primary polynomial splits. Over
    /// the rationals only square-free parts and rational roots are used, so
    /// `None` there does not mean `f` is a prime power.
    pub fn coprime_split(&self) -> Result<Option<(UniPoly, UniPoly)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(None);
        }
        let f = self.monic();
        let u = if self.field.characteristic() == 0 {
            let parts: Vec<UniPoly> = f.yun().into_iter().filter(|s| !s.is_constant()).collect();
            if parts.len() >= 2 {
                Some(parts[0].clone())
            } else {
                f.radical()?.squarefree_factor()
            }
        } else {
            f.radical()?.squarefree_factor()
        };
        let Some(u) = u else { return Ok(None) };
        let deg = f.degree().unwrap_or(0);
        let g = f.gcd(&u.pow(deg));
        let h = f.div_exact(&g)?;
        if g.is_constant() || h.is_constant() {
            return Err(Error::Internal("factor did not split the polynomial".into()));
        }
        Ok(Some((g, h.monic())))
    }
}

/// Berlekamp: a nontrivial factor of a square-free polynomial over F_p.
fn berlekamp_factor(f: &UniPoly, p: u64) -> Option<UniPoly> {
    let field = f.field();
    let f = f.monic();
    let n = f.degree()?;
    // Q[i] = x^(p i) mod f; kernel of Q - I gives the Berlekamp subalgebra
    let xp = UniPoly::x(field).powmod(p, &f);
    let mut rows = Matrix::zeros(field, n, n);
    let mut cur = UniPoly::one(field);
    for i in 0..n {
        for (j, c) in cur.coeffs().iter().enumerate() {
            rows[(i, j)] = c.clone();
        }
        rows[(i, i)] = &rows[(i, i)] - &field.one();
        cur = cur.mul(&xp).rem(&f).ok()?;
    }
    // v (as a row vector of coefficients) with v (Q - I) = 0
    let kernel = rows.transpose().nullspace();
    if kernel.cols() <= 1 {
        return None;
    }
    for k in 0..kernel.cols() {
        let v = UniPoly::new(field, kernel.col(k));
        if v.is_constant() {
            continue;
        }
        if p <= 65536 {
            for a in 0..p {
                let g = f.gcd(&v.sub(&UniPoly::new(field, vec![field.from_i64(a as i64)])));
                if !g.is_constant() && g.degree() < f.degree() {
                    return Some(g);
                }
            }
        } else {
            // p odd and large: gcd with (v + a)^((p-1)/2) - 1 separates roots
            for a in 0..64u64 {
                let shifted = v.add(&UniPoly::new(field, vec![field.from_i64(a as i64)]));
                let pw = shifted.powmod((p - 1) / 2, &f).sub(&UniPoly::one(field));
                let g = f.gcd(&pw);
                if !g.is_constant() && g.degree() < f.degree() {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// Divisors of `n` found by trial division, or `None` if `n` is too large to factor quickly.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.checked_mul(d)? <= n {
        if d > 2_000_000 {
            return None;
        }
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small.into_iter().map(BigInt::from).collect())
}

/// A rational root by the rational root theorem, trying candidates in increasing size.
fn rational_root(f: &UniPoly) -> Option<Scalar> {
    // clear denominators: multiply by the lcm of coefficient denominators
    let rats: Vec<Rational> = f
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rational(r) => r.clone(),
            Scalar::Modular(..) => unreachable!("rational polynomial"),
        })
        .collect();
    let mut l = BigInt::one();
    for r in &rats {
        l = l.lcm(&r.denom());
    }
    let ints: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&l / r.denom())).collect();
    let a0 = ints.first()?;
    let an = ints.last()?;
    if a0.is_zero() {
        return Some(Field::Rationals.zero());
    }
    let ps = divisors(a0)?;
    let qs = divisors(an)?;
    let mut cands: Vec<Rational> = Vec::new();
    for p in &ps {
        for q in &qs {
            if p.gcd(q).is_one() {
                let r = Rational::from_bigs(p.clone(), q.clone()).ok()?;
                cands.push(r.clone());
                cands.push(r.neg());
            }
        }
    }
    cands.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    cands
        .into_iter()
        .map(Scalar::Rational)
        .find(|x| f.eval(x).is_zero())
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    fn p(field: Field, c: &[i64]) -> UniPoly {
        UniPoly::from_i64(field, c)
    }

    #[test]
    fn split_examples() {
        assert_eq!(p(Q, &[0, 0, 1]).coprime_split().unwrap(), None);
        let (g, h) = p(Q, &[0, -1, 1]).coprime_split().unwrap().unwrap();
        assert_eq!(g, p(Q, &[0, 1]));
        assert_eq!(h, p(Q, &[-1, 1]));
        let f2 = Field::Prime(2);
        assert_eq!(p(f2, &[1, 0, 1]).coprime_split().unwrap(), None);
        assert!(UniPoly::zero(Q).coprime_split().is_err());
        assert_eq!(p(Q, &[5]).coprime_split().unwrap(), None);
    }

    #[test]
    fn splits_over_prime_fields() {
        // (x^2 + x + 1)(x + 1) over F_2: irreducible quadratic times linear
        let f2 = Field::Prime(2);
        let f = p(f2, &[1, 1, 1]).mul(&p(f2, &[1, 1]));
        let (g, h) = f.coprime_split().unwrap().unwrap();
        assert_eq!(g.mul(&h), f);
        assert!(g.gcd(&h).is_constant());
        // (x^2+1)^2 (x^2+x+1)... over F_3 x^2+1 is irreducible
        let f3 = Field::Prime(3);
        let f = p(f3, &[1, 0, 1]).pow(2).mul(&p(f3, &[2, 1, 1]));
        let (g, h) = f.coprime_split().unwrap().unwrap();
        assert_eq!(g.mul(&h), f);
        // x^3 - x^... purely inseparable power (x+1)^4 over F_2
        assert_eq!(p(f2, &[1, 1]).pow(4).coprime_split().unwrap(), None);
    }

    #[test]
    fn rational_incomplete_split() {
        // x^2 - 2 is irreducible over Q; (x^2-2)(x^2-3) has no rational roots: None is allowed
        let f = p(Q, &[-2, 0, 1]).mul(&p(Q, &[-3, 0, 1]));
        assert_eq!(f.coprime_split().unwrap(), None);
        // but a repeated factor next to a simple one is found
        let f = p(Q, &[-2, 0, 1]).pow(2).mul(&p(Q, &[-3, 0, 1]));
        let (g, h) = f.coprime_split().unwrap().unwrap();
        assert_eq!(g.mul(&h), f);
        // rational roots with nontrivial denominators
        let f = p(Q, &[-1, 2]).mul(&p(Q, &[3, 0, 0, 1]));
        let (g, h) = f.coprime_split().unwrap().unwrap();
        assert_eq!(g.mul(&h), f.monic());
    }

    #[test]
    fn radical_in_characteristic_p() {
        let f2 = Field::Prime(2);
        let f = p(f2, &[1, 1]).pow(2).mul(&p(f2, &[0, 1]).pow(3));
        assert_eq!(f.radical().unwrap(), p(f2, &[0, 1, 1]));
        let f3 = Field::Prime(3);
        let f = p(f3, &[1, 1]).pow(3).mul(&p(f3, &[2, 1]));
        assert_eq!(f.radical().unwrap(), p(f3, &[2, 1]).mul(&p(f3, &[1, 1])));
    }

    proptest! {
        #[test]
        fn split_is_exact_and_coprime(
            roots in proptest::collection::vec(-3i64..4, 1..6),
            mult in proptest::collection::vec(1usize..3, 6),
            prime in prop::sample::select(vec![0u64, 2, 3, 7]),
        ) {
            let field = if prime == 0 { Q } else { Field::Prime(prime) };
            let mut f = UniPoly::one(field);
            for (r, m) in roots.iter().zip(&mult) {
                f = f.mul(&UniPoly::linear(&field.from_i64(*r)).pow(*m));
            }
            let distinct: std::collections::HashSet<Scalar> = roots.iter().map(|r| field.from_i64(*r)).collect();
            match f.coprime_split().unwrap() {
                Some((g, h)) => {
                    prop_assert_eq!(g.mul(&h), f.clone());
                    prop_assert!(g.gcd(&h).is_constant());
                    prop_assert!(!g.is_constant() && !h.is_constant());
                }
                None => prop_assert_eq!(distinct.len(), 1),
            }
        }

        #[test]
        fn divrem_reconstructs(a in proptest::collection::vec(-4i64..5, 0..6), b in proptest::collection::vec(-4i64..5, 1..4)) {
            let a = p(Q, &a);
            let b = p(Q, &b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(q.mul(&b).add(&r), a);
            prop_assert!(r.is_zero() || r.degree() < b.degree());
        }
    }
}
