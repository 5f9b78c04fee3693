//! The cyclotomic field `Q(zeta_N)` for an odd prime `N`, and sums over
//! `N`-th roots of unity.
//!
//! Elements are stored in the power basis `1, t, ..., t^{N-2}` modulo
//! `1 + t + ... + t^{N-1}`, with integer coordinates over one shared
//! positive denominator. Keeping a single denominator makes multiplication
//! `(N-1)^2` integer products plus one gcd pass, instead of a gcd per
//! coordinate product.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, int, pow2, BernoulliConvention, Rational};
use crate::ring::{RationalField, Ring};
use crate::series::UniSeries;

/// `Q[t] / (1 + t + ... + t^{N-1})`, a field because `N` is prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CycloField {
    n: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElement {
    num: Vec<BigInt>,
    den: BigInt,
}

pub fn is_odd_prime(n: u64) -> bool {
    n >= 3 && n % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl CycloField {
    pub fn new(n: u64) -> Result<Self> {
        if !is_odd_prime(n) {
            return Err(Error::Invalid(format!("cyclotomic conductor {n} is not an odd prime")));
        }
        Ok(Self { n: n as usize })
    }

    pub fn conductor(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.n - 1
    }

    fn make(&self, num: Vec<BigInt>, den: BigInt) -> CycloElement {
        debug_assert_eq!(num.len(), self.dim());
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if den.is_negative() {
            g = -g;
        }
        if g.is_one() {
            CycloElement { num, den }
        } else {
            CycloElement { num: num.into_iter().map(|c| c / &g).collect(), den: den / g }
        }
    }

    /// Reduces a vector of length `N` (coefficients of `1, ..., t^{N-1}`)
    /// using `t^{N-1} = -(1 + ... + t^{N-2})`.
    fn reduce_full(&self, mut full: Vec<BigInt>, den: BigInt) -> CycloElement {
        let top = full.pop().expect("length N");
        if !top.is_zero() {
            for c in &mut full {
                *c -= &top;
            }
        }
        self.make(full, den)
    }

    /// `zeta^e` for any integer `e`.
    pub fn zeta_pow(&self, e: i64) -> CycloElement {
        let mut full = vec![BigInt::zero(); self.n];
        full[e.rem_euclid(self.n as i64) as usize] = BigInt::one();
        self.reduce_full(full, BigInt::one())
    }

    pub fn zeta(&self) -> CycloElement {
        self.zeta_pow(1)
    }

    /// Coordinates in the power basis as rationals.
    pub fn coords(&self, x: &CycloElement) -> Vec<Rational> {
        x.num.iter().map(|c| Rational::new(c.clone(), x.den.clone())).collect()
    }

    pub fn from_coords(&self, coords: &[Rational]) -> CycloElement {
        assert_eq!(coords.len(), self.dim(), "expected N-1 coordinates");
        let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        self.make(num, den)
    }

    pub fn is_rational(&self, x: &CycloElement) -> bool {
        x.num[1..].iter().all(Zero::is_zero)
    }

    /// The value of `x` if it lies in `Q`.
    pub fn to_rational(&self, x: &CycloElement) -> Option<Rational> {
        self.is_rational(x).then(|| Rational::new(x.num[0].clone(), x.den.clone()))
    }

    /// The automorphism `zeta -> zeta^r`, `gcd(r, N) = 1`.
    pub fn galois(&self, x: &CycloElement, r: i64) -> CycloElement {
        let r = r.rem_euclid(self.n as i64) as usize;
        assert!(r != 0, "zeta -> zeta^0 is not an automorphism");
        let mut full = vec![BigInt::zero(); self.n];
        for (i, c) in x.num.iter().enumerate() {
            full[(i * r) % self.n] = c.clone();
        }
        self.reduce_full(full, x.den.clone())
    }

    /// Sum of all `N - 1` conjugates; always rational.
    pub fn trace(&self, x: &CycloElement) -> Rational {
        let sum = (1..self.n as i64).fold(self.zero(), |acc, r| self.add(&acc, &self.galois(x, r)));
        self.to_rational(&sum).expect("a trace is Galois-invariant")
    }

    fn poly_inverse(&self, x: &CycloElement) -> Option<CycloElement> {
        // extended Euclid in Q[t] against the cyclotomic polynomial
        let a: Vec<Rational> = self.coords(x);
        let modulus: Vec<Rational> = vec![Rational::one(); self.n];
        let (mut r0, mut r1) = (modulus, poly::trim(a));
        let (mut s0, mut s1) = (Vec::new(), vec![Rational::one()]);
        if r1.is_empty() {
            return None;
        }
        while r1.len() > 1 {
            let (q, r) = poly::divrem(&r0, &r1);
            let s = poly::sub(&s0, &poly::mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            if r1.is_empty() {
                // a common factor with the modulus: impossible for nonzero x in a field
                return None;
            }
        }
        let c = r1[0].recip();
        let s: Vec<Rational> = s1.into_iter().map(|v| v * &c).collect();
        let (_, s) = poly::divrem(&s, &vec![Rational::one(); self.n]);
        let mut coords = s;
        coords.resize(self.dim(), Rational::zero());
        Some(self.from_coords(&coords))
    }
}

mod poly {
    //! Dense polynomials over Q, lowest degree first, no trailing zeros.
    use num_traits::Zero;

    use crate::exact::Rational;

    pub fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    a.get(i).cloned().unwrap_or_else(Rational::zero)
                        - b.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let b = trim(b.to_vec());
        let lead = b.last().expect("division by the zero polynomial").recip();
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap() * &lead;
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] -= &c * bi;
            }
            q[shift] = c;
            r.pop();
            r = trim(r);
        }
        (trim(q), r)
    }
}

impl Ring for CycloField {
    type Elem = CycloElement;

    fn zero(&self) -> CycloElement {
        CycloElement { num: vec![BigInt::zero(); self.dim()], den: BigInt::one() }
    }

    fn one(&self) -> CycloElement {
        self.from_rational(&Rational::one())
    }

    fn from_rational(&self, r: &Rational) -> CycloElement {
        let mut num = vec![BigInt::zero(); self.dim()];
        num[0] = r.numer().clone();
        CycloElement { num, den: r.denom().clone() }
    }

    fn add(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        if a.den == b.den {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect();
            self.make(num, a.den.clone())
        } else {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| x * &b.den + y * &a.den).collect();
            self.make(num, &a.den * &b.den)
        }
    }

    fn sub(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        let n = self.n;
        let mut full = vec![BigInt::zero(); n];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                full[k] += x * y;
            }
        }
        self.reduce_full(full, &a.den * &b.den)
    }

    fn neg(&self, a: &CycloElement) -> CycloElement {
        CycloElement { num: a.num.iter().map(|c| -c).collect(), den: a.den.clone() }
    }

    fn is_zero(&self, a: &CycloElement) -> bool {
        a.num.iter().all(Zero::is_zero)
    }

    fn inv(&self, a: &CycloElement) -> Option<CycloElement> {
        if self.is_zero(a) {
            return None;
        }
        if self.is_rational(a) {
            let r = Rational::new(a.num[0].clone(), a.den.clone());
            return Some(self.from_rational(&r.recip()));
        }
        self.poly_inverse(a)
    }

    fn scale(&self, a: &CycloElement, r: &Rational) -> CycloElement {
        let num = a.num.iter().map(|c| c * r.numer()).collect();
        self.make(num, &a.den * r.denom())
    }
}

impl CycloField {
    /// Like [`Ring::inv`] but with an error for zero.
    pub fn cyclo_inv(&self, x: &CycloElement) -> Result<CycloElement> {
        self.inv(x).ok_or(Error::DivisionByZero("cyclotomic inverse"))
    }
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = Rational::new(c.clone(), self.den.clone());
            terms.push(match i {
                0 => format!("{r}"),
                1 => format!("({r})z"),
                _ => format!("({r})z^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootSumAlgorithm {
    /// Sum the `N - 1` conjugates inside `Q(zeta_N)`.
    Direct,
    /// Read the coefficient off the generating function in an auxiliary variable.
    Generating,
}

/// `sum_{zeta^N = 1, zeta != 1} zeta^e / (1 - zeta)^k`.
pub fn root_sum(e: i64, k: i64, n: u64, algorithm: RootSumAlgorithm) -> Result<Rational> {
    match algorithm {
        RootSumAlgorithm::Generating if k >= 1 => root_sum_generating(e, k as usize, n),
        _ => root_sum_direct(e, k, n),
    }
}

fn root_sum_direct(e: i64, k: i64, n: u64) -> Result<Rational> {
    let field = CycloField::new(n)?;
    let one_minus_zeta = field.sub(&field.one(), &field.zeta());
    let denom = field.pow(&one_minus_zeta, -k).ok_or(Error::DivisionByZero("1 - zeta"))?;
    let x = field.mul(&field.zeta_pow(e), &denom);
    Ok(field.trace(&x))
}

/// With `w = 1 - z` and `1 <= e <= N` (reduced mod `N`), partial fractions give
/// `sum_{zeta != 1} zeta^e / (w - zeta) = 1/z + N w^{e-1} / (w^N - 1)`.
/// Expanding in `z`, the left side has `z^{k-1}` coefficient equal to the
/// wanted sum. Writing `w^N - 1 = z D(z)`, that coefficient is `[z^k]` of
/// `N w^{e-1} / D(z)` because the `1/z` pole cancels.
fn root_sum_generating(e: i64, k: usize, n: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Invalid(format!("need N >= 2, got {n}")));
    }
    let q = RationalField;
    let n_i = n as i64;
    let e = (e - 1).rem_euclid(n_i) + 1;
    let order = k;
    // (1 - z)^p = sum_j C(p, j) (-z)^j
    let one_minus_z_pow = |p: i64, order: usize| {
        UniSeries::one_plus_x_pow(q, &int(p), order)
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| if j % 2 == 0 { c.clone() } else { -c })
            .collect::<Vec<_>>()
    };
    let numer = UniSeries::new(q, one_minus_z_pow(e - 1, order), order).scale_rational(&int(n_i));
    let w_n_minus_one = UniSeries::new(q, one_minus_z_pow(n_i, order + 1), order + 1)
        .sub(&UniSeries::one(q, order + 1));
    let d = w_n_minus_one.shift_down(1, "(1-z)^N - 1")?;
    let t = numer.mul(&d.invert()?);
    Ok(t.coefficient(k)?.clone())
}

/// `(1 - 2^{1-k}) B_k / k!`, the limit of `N^{-k} sum_{zeta != 1} zeta^{(N-1)/2 + a} / (1 - zeta)^k`.
///
/// Zero for `k < 0` and `-1` at `k = 0`.
pub fn lemma_bern_limit(k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let factor = Rational::one() - pow2(1 - k);
    if factor.is_zero() {
        return Rational::zero();
    }
    let b = bernoulli(k as usize, BernoulliConvention::Standard).expect("standard B_k always exists");
    factor * b / Rational::from_integer(factorial(k as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_prime_conductors() {
        assert!(CycloField::new(9).is_err());
        assert!(CycloField::new(2).is_err());
        assert!(CycloField::new(1).is_err());
        assert!(CycloField::new(11).is_ok());
    }

    #[test]
    fn relations_hold() {
        for n in [3u64, 5, 7, 11] {
            let f = CycloField::new(n).unwrap();
            let z = f.zeta();
            assert_eq!(f.pow(&z, n as i64).unwrap(), f.one());
            let s = (0..n as i64).fold(f.zero(), |acc, e| f.add(&acc, &f.zeta_pow(e)));
            assert!(f.is_zero(&s));
        }
    }

    #[test]
    fn inverse_examples() {
        let f = CycloField::new(3).unwrap();
        let z = f.zeta();
        let z2 = f.cyclo_inv(&z).unwrap();
        assert_eq!(z2, f.from_coords(&[int(-1), int(-1)]));
        assert_eq!(z2, f.zeta_pow(2));

        let one_minus_z = f.sub(&f.one(), &z);
        assert_eq!(f.cyclo_inv(&one_minus_z).unwrap(), f.from_coords(&[rat(2, 3), rat(1, 3)]));

        assert_eq!(f.cyclo_inv(&f.from_rational(&int(2))).unwrap(), f.from_rational(&rat(1, 2)));
        assert!(f.cyclo_inv(&f.zero()).is_err());
    }

    #[test]
    fn root_sum_examples() {
        use RootSumAlgorithm::*;
        assert_eq!(root_sum(1, 0, 7, Direct).unwrap(), int(-1));
        assert_eq!(root_sum(0, 1, 3, Direct).unwrap(), int(1));
        assert_eq!(root_sum(0, 1, 3, Generating).unwrap(), int(1));
        assert_eq!(root_sum(0, 0, 5, Direct).unwrap(), int(4));
        assert_eq!(root_sum(0, 0, 5, Generating).unwrap(), int(4));
        // k < 0 vanishes once N is large relative to |k|
        assert_eq!(root_sum(3, -2, 11, Direct).unwrap(), int(0));
    }

    #[test]
    fn root_sum_algorithms_agree() {
        for n in [3u64, 5, 7] {
            for e in -3..=3 {
                for k in 1..=6 {
                    assert_eq!(
                        root_sum(e, k, n, RootSumAlgorithm::Direct).unwrap(),
                        root_sum(e, k, n, RootSumAlgorithm::Generating).unwrap(),
                        "e={e} k={k} N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn lemma_bern_limit_examples() {
        assert_eq!(lemma_bern_limit(0), int(-1));
        assert_eq!(lemma_bern_limit(2), rat(1, 24));
        assert_eq!(lemma_bern_limit(3), int(0));
        assert_eq!(lemma_bern_limit(1), int(0));
        assert_eq!(lemma_bern_limit(-4), int(0));
    }

    fn arb_elem(n: u64) -> impl Strategy<Value = CycloElement> {
        let f = CycloField::new(n).unwrap();
        prop::collection::vec((-12i64..12, 1i64..6), (n - 1) as usize)
            .prop_map(move |c| f.from_coords(&c.iter().map(|&(a, b)| rat(a, b)).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_elem(7), b in arb_elem(7), c in arb_elem(7)) {
            let f = CycloField::new(7).unwrap();
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            if !f.is_zero(&a) {
                prop_assert_eq!(f.mul(&a, &f.cyclo_inv(&a).unwrap()), f.one());
            }
        }

        #[test]
        fn galois_commutes_with_multiplication(a in arb_elem(5), b in arb_elem(5), r in 1i64..5) {
            let f = CycloField::new(5).unwrap();
            prop_assert_eq!(f.galois(&f.mul(&a, &b), r), f.mul(&f.galois(&a, r), &f.galois(&b, r)));
            prop_assert_eq!(f.galois(&f.add(&a, &b), r), f.add(&f.galois(&a, r), &f.galois(&b, r)));
        }
    }
}
