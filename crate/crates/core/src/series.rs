//! Dense truncated power series in one and two variables over a [`Ring`].
//!
//! A series of order `T` stores the coefficients of `x^0 ..= x^T` and knows
//! nothing beyond `x^T`. Binary operations truncate to the smaller order.
//! Division by `x^k` is [`UniSeries::shift_down`], which refuses to drop a
//! nonzero coefficient: poles must cancel exactly or the computation aborts.

use crate::error::{Error, Result};
use crate::exact::{binom_general, int, Rational};
use crate::ring::{RationalField, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct UniSeries<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> UniSeries<R> {
    /// Series of order `order`; missing coefficients are zero, extra ones dropped.
    pub fn new(ring: R, mut coeffs: Vec<R::Elem>, order: usize) -> Self {
        coeffs.resize(order + 1, ring.zero());
        Self { ring, coeffs }
    }

    pub fn from_fn(ring: R, order: usize, f: impl FnMut(usize) -> R::Elem) -> Self {
        let coeffs = (0..=order).map(f).collect();
        Self { ring, coeffs }
    }

    pub fn zero(ring: R, order: usize) -> Self {
        Self::new(ring, Vec::new(), order)
    }

    pub fn constant(ring: R, c: R::Elem, order: usize) -> Self {
        Self::new(ring, vec![c], order)
    }

    pub fn one(ring: R, order: usize) -> Self {
        let one = ring.one();
        Self::constant(ring, one, order)
    }

    /// `c + x`.
    pub fn linear(ring: R, c: R::Elem, order: usize) -> Self {
        let one = ring.one();
        Self::new(ring, vec![c, one], order)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> Result<&R::Elem> {
        self.coeffs.get(k).ok_or(Error::BeyondTruncation {
            requested: (k, 0),
            order: (self.order(), 0),
        })
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.ring.clone(), self.coeffs.clone(), order.min(self.order()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.ring.add(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        Self { ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.ring.sub(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        Self { ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.ring.neg(c))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map(|a| self.ring.mul(a, c))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map(|a| self.ring.scale(a, r))
    }

    pub fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Self { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let ring = &self.ring;
        let mut out = vec![ring.zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if ring.is_zero(b) {
                    continue;
                }
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        Self { ring: ring.clone(), coeffs: out }
    }

    /// Multiplicative inverse up to the truncation order.
    pub fn invert(&self) -> Result<Self> {
        let ring = &self.ring;
        let c0 = ring.inv(&self.coeffs[0]).ok_or(Error::NonUnit)?;
        let n = self.order();
        let mut out: Vec<R::Elem> = Vec::with_capacity(n + 1);
        out.push(c0.clone());
        for k in 1..=n {
            let mut acc = ring.zero();
            for j in 1..=k {
                if !ring.is_zero(&self.coeffs[j]) {
                    acc = ring.add(&acc, &ring.mul(&self.coeffs[j], &out[k - j]));
                }
            }
            out.push(ring.neg(&ring.mul(&acc, &c0)));
        }
        Ok(Self { ring: ring.clone(), coeffs: out })
    }

    /// `self^e`; a negative exponent inverts first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.ring.clone(), self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Divides by `x^k`, checking that the `k` discarded coefficients are zero.
    ///
    /// The result has order `order - k`.
    pub fn shift_down(&self, k: usize, what: &'static str) -> Result<Self> {
        if k > self.order() {
            return Err(Error::BeyondTruncation {
                requested: (k, 0),
                order: (self.order(), 0),
            });
        }
        if let Some(index) = (0..k).find(|&i| !self.ring.is_zero(&self.coeffs[i])) {
            return Err(Error::PoleNotCancelled { what, index });
        }
        Ok(Self { ring: self.ring.clone(), coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiplies by `x^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![self.ring.zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(self.ring.clone(), coeffs, self.order())
    }

    /// `(1 + x)^e` for any rational `e`, via generalized binomials.
    pub fn one_plus_x_pow(ring: R, e: &Rational, order: usize) -> Self {
        Self::from_fn(ring.clone(), order, |k| ring.from_rational(&binom_general(e, k as u64)))
    }
}

/// A truncated series in `x1, x2`, stored row-major: index `(i, j)` is the
/// coefficient of `x1^i x2^j`, with `i <= t1` and `j <= t2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<R: Ring> {
    ring: R,
    t1: usize,
    t2: usize,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> BiSeries<R> {
    pub fn from_fn(ring: R, order: (usize, usize), mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let (t1, t2) = order;
        let mut coeffs = Vec::with_capacity((t1 + 1) * (t2 + 1));
        for i in 0..=t1 {
            for j in 0..=t2 {
                coeffs.push(f(i, j));
            }
        }
        Self { ring, t1, t2, coeffs }
    }

    pub fn zero(ring: R, order: (usize, usize)) -> Self {
        let z = ring.zero();
        Self::from_fn(ring, order, |_, _| z.clone())
    }

    pub fn constant(ring: R, c: R::Elem, order: (usize, usize)) -> Self {
        let mut s = Self::zero(ring, order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(ring: R, order: (usize, usize)) -> Self {
        let one = ring.one();
        Self::constant(ring, one, order)
    }

    /// Embeds a series in `x1` (when `first`) or `x2`.
    pub fn from_uni(s: &UniSeries<R>, first: bool, order: (usize, usize)) -> Self {
        let ring = s.ring().clone();
        let z = ring.zero();
        Self::from_fn(ring, order, |i, j| {
            let (k, other) = if first { (i, j) } else { (j, i) };
            if other == 0 && k < s.coeffs().len() {
                s.coeffs()[k].clone()
            } else {
                z.clone()
            }
        })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> (usize, usize) {
        (self.t1, self.t2)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.t2 + 1) + j
    }

    pub fn coefficient(&self, i: usize, j: usize) -> Result<&R::Elem> {
        if i > self.t1 || j > self.t2 {
            return Err(Error::BeyondTruncation {
                requested: (i, j),
                order: (self.t1, self.t2),
            });
        }
        Ok(&self.coeffs[self.idx(i, j)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn truncate(&self, order: (usize, usize)) -> Self {
        let t1 = order.0.min(self.t1);
        let t2 = order.1.min(self.t2);
        Self::from_fn(self.ring.clone(), (t1, t2), |i, j| self.coeffs[self.idx(i, j)].clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Self {
        let t1 = self.t1.min(other.t1);
        let t2 = self.t2.min(other.t2);
        Self::from_fn(self.ring.clone(), (t1, t2), |i, j| {
            f(&self.coeffs[self.idx(i, j)], &other.coeffs[other.idx(i, j)])
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| self.ring.sub(a, b))
    }

    pub fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Self {
            ring: self.ring.clone(),
            t1: self.t1,
            t2: self.t2,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.ring.neg(c))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map(|a| self.ring.mul(a, c))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map(|a| self.ring.scale(a, r))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let ring = &self.ring;
        let t1 = self.t1.min(other.t1);
        let t2 = self.t2.min(other.t2);
        let mut out = Self::zero(ring.clone(), (t1, t2));
        let rhs: Vec<(usize, usize, &R::Elem)> = (0..=t1)
            .flat_map(|i| (0..=t2).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, &other.coeffs[other.idx(i, j)]))
            .filter(|(_, _, c)| !ring.is_zero(c))
            .collect();
        for i in 0..=t1 {
            for j in 0..=t2 {
                let a = &self.coeffs[self.idx(i, j)];
                if ring.is_zero(a) {
                    continue;
                }
                for &(k, l, b) in &rhs {
                    if i + k > t1 || j + l > t2 {
                        continue;
                    }
                    let at = out.idx(i + k, j + l);
                    out.coeffs[at] = ring.add(&out.coeffs[at], &ring.mul(a, b));
                }
            }
        }
        out
    }

    pub fn invert(&self) -> Result<Self> {
        let ring = &self.ring;
        let c0 = ring.inv(&self.coeffs[0]).ok_or(Error::NonUnit)?;
        let mut out = Self::zero(ring.clone(), (self.t1, self.t2));
        for i in 0..=self.t1 {
            for j in 0..=self.t2 {
                if i == 0 && j == 0 {
                    out.coeffs[0] = c0.clone();
                    continue;
                }
                let mut acc = ring.zero();
                for k in 0..=i {
                    for l in 0..=j {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        let a = &self.coeffs[self.idx(k, l)];
                        if !ring.is_zero(a) {
                            acc = ring.add(&acc, &ring.mul(a, &out.coeffs[out.idx(i - k, j - l)]));
                        }
                    }
                }
                let at = out.idx(i, j);
                out.coeffs[at] = ring.neg(&ring.mul(&acc, &c0));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.ring.clone(), self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Swaps the roles of `x1` and `x2`.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring.clone(), (self.t2, self.t1), |i, j| {
            self.coeffs[self.idx(j, i)].clone()
        })
    }
}

/// `Res_{x=0} x^a (1+x)^{N-1+b} / ((1+x)^N - 1)^{c+1}`, by series division.
///
/// `(1+x)^N - 1 = x D(x)` with `D(0) = N`, so the integrand is
/// `x^{a-c-1} (1+x)^{N-1+b} D(x)^{-(c+1)}` and the residue is the
/// coefficient of `x^{c-a}` in the regular part.
pub fn residue_oracle(a: u32, b: i64, c: u32, n: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    let q = RationalField;
    let order = (a + c + 2) as usize;
    let numerator = UniSeries::one_plus_x_pow(q, &int(n as i64 - 1 + b), order).shift_up(a as usize);
    let xd = UniSeries::one_plus_x_pow(q, &int(n as i64), order + 1)
        .sub(&UniSeries::one(q, order + 1));
    let d = xd.shift_down(1, "(1+x)^N - 1")?;
    let quotient = numerator.mul(&d.pow(-(c as i64 + 1))?);
    Ok(quotient.coefficient(c as usize)?.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn q_series(v: &[(i64, i64)], order: usize) -> UniSeries<RationalField> {
        UniSeries::new(RationalField, v.iter().map(|&(n, d)| rat(n, d)).collect(), order)
    }

    #[test]
    fn geometric_inverse() {
        let s = q_series(&[(1, 1), (-1, 1)], 4);
        let inv = s.invert().unwrap();
        assert_eq!(inv.coeffs(), &[int(1), int(1), int(1), int(1), int(1)]);
    }

    #[test]
    fn constant_inverse() {
        let s = UniSeries::constant(RationalField, int(2), 3);
        assert_eq!(s.invert().unwrap().coeffs()[0], rat(1, 2));
    }

    #[test]
    fn long_division_example() {
        let s = q_series(&[(1, 1), (1, 1), (1, 3)], 2);
        assert_eq!(s.invert().unwrap().coeffs(), &[int(1), int(-1), rat(2, 3)]);
    }

    #[test]
    fn non_unit_is_rejected() {
        let s = q_series(&[(0, 1), (1, 1)], 3);
        assert_eq!(s.invert(), Err(Error::NonUnit));
    }

    #[test]
    fn coefficient_examples() {
        let s = UniSeries::one_plus_x_pow(RationalField, &int(5), 5);
        assert_eq!(s.coefficient(2).unwrap(), &int(10));
        let geo = q_series(&[(1, 1), (-1, 1)], 6).invert().unwrap();
        assert_eq!(geo.coefficient(4).unwrap(), &int(1));

        let x = UniSeries::linear(RationalField, int(1), 1);
        let p = BiSeries::from_uni(&x, true, (1, 1)).mul(&BiSeries::from_uni(&x, false, (1, 1)));
        assert_eq!(p.coefficient(1, 1).unwrap(), &int(1));
    }

    #[test]
    fn coefficient_beyond_truncation_is_an_error() {
        let s = UniSeries::one(RationalField, 2);
        assert!(matches!(s.coefficient(3), Err(Error::BeyondTruncation { .. })));
        let b = BiSeries::one(RationalField, (1, 2));
        assert!(matches!(b.coefficient(0, 3), Err(Error::BeyondTruncation { .. })));
    }

    #[test]
    fn shift_down_refuses_uncancelled_pole() {
        let s = q_series(&[(0, 1), (1, 1), (2, 1)], 2);
        assert_eq!(s.shift_down(1, "t").unwrap().coeffs(), &[int(1), int(2)]);
        assert_eq!(
            s.shift_down(2, "t"),
            Err(Error::PoleNotCancelled { what: "t", index: 1 })
        );
    }

    #[test]
    fn residue_oracle_examples() {
        assert_eq!(residue_oracle(0, 0, 0, 5).unwrap(), rat(1, 5));
        assert_eq!(residue_oracle(1, 0, 1, 2).unwrap(), rat(1, 4));
        assert_eq!(residue_oracle(0, 0, 1, 3).unwrap(), int(0));
    }

    #[test]
    fn bivariate_inverse_round_trip() {
        let s = BiSeries::from_fn(RationalField, (3, 2), |i, j| rat(1 + i as i64 * 3 - j as i64, 1 + j as i64));
        let p = s.mul(&s.invert().unwrap());
        assert_eq!(p, BiSeries::one(RationalField, (3, 2)));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..8).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_uni(order: usize) -> impl Strategy<Value = UniSeries<RationalField>> {
        prop::collection::vec(arb_rational(), order + 1)
            .prop_map(move |c| UniSeries::new(RationalField, c, order))
    }

    fn arb_bi(order: (usize, usize)) -> impl Strategy<Value = BiSeries<RationalField>> {
        prop::collection::vec(arb_rational(), (order.0 + 1) * (order.1 + 1)).prop_map(move |c| {
            BiSeries::from_fn(RationalField, order, |i, j| c[i * (order.1 + 1) + j].clone())
        })
    }

    proptest! {
        #[test]
        fn uni_ring_laws(a in arb_uni(5), b in arb_uni(5), c in arb_uni(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn bi_ring_laws(a in arb_bi((3, 2)), b in arb_bi((3, 2)), c in arb_bi((3, 2))) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn uni_invert_round_trip(mut a in arb_uni(6), c0 in 1i64..9) {
            a = a.add(&UniSeries::constant(RationalField, int(c0), 6)).sub(
                &UniSeries::constant(RationalField, a.coeffs()[0].clone(), 6));
            let inv = a.invert().unwrap();
            prop_assert_eq!(a.mul(&inv), UniSeries::one(RationalField, 6));
        }

        #[test]
        fn bi_invert_round_trip(a in arb_bi((2, 3)), c0 in 1i64..9) {
            let shift = int(c0) - a.coefficient(0, 0).unwrap();
            let a = a.add(&BiSeries::constant(RationalField, shift, (2, 3)));
            prop_assert_eq!(a.mul(&a.invert().unwrap()), BiSeries::one(RationalField, (2, 3)));
        }
    }
}
