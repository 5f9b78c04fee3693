//! Exact rational arithmetic and the combinatorial primitives shared by the
//! rest of the crate.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RationalField;
use crate::series::UniSeries;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `n (n-1) ... (n-k+1)`, which is zero once the product crosses the origin.
pub fn falling_factorial(n: i64, k: u64) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * (n - i))
}

/// `2^e` for any integer `e`.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `r^e` for any integer `e` (panics on `0^{negative}`).
pub fn rpow(r: &Rational, e: i64) -> Rational {
    let base = if e < 0 { r.recip() } else { r.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Generalized binomial `z (z-1) ... (z-b+1) / b!`.
pub fn binom_general(z: &Rational, b: u64) -> Rational {
    let mut acc = Rational::one();
    let mut cur = z.clone();
    for i in 1..=b {
        acc = acc * &cur / int(i as i64);
        cur -= Rational::one();
    }
    acc
}

/// Binomial with integer upper argument of either sign; zero for `k < 0`.
pub fn binom_int(n: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    binom_general(&int(n), k as u64)
}

/// Same as [`binom_general`] but zero for a negative lower index.
pub fn binom_signed(z: &Rational, b: i64) -> Rational {
    if b < 0 {
        Rational::zero()
    } else {
        binom_general(z, b as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BernoulliConvention {
    /// `-u / sinh u = sum_k (2^k - 2) / k! * B_k u^k`. Leaves `B_1` undetermined.
    Sinh,
    /// `u / (e^u - 1) = sum_k B_k u^k / k!`, so `B_1 = -1/2`.
    Standard,
}

/// Memoized Bernoulli numbers under both conventions.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    sinh: Vec<Option<Rational>>,
    standard: Vec<Rational>,
}

impl BernoulliTable {
    /// Builds `B_0 ..= B_order` by inverting the two generating series.
    pub fn new(order: usize) -> Self {
        let q = RationalField;
        let fact: Vec<BigInt> = (0..=order as u64 + 1).map(factorial).collect();

        // sinh(u)/u = sum u^{2j} / (2j+1)!
        let sinh_over_u = UniSeries::from_fn(q, order, |k| {
            if k % 2 == 0 {
                Rational::new(BigInt::one(), fact[k + 1].clone())
            } else {
                Rational::zero()
            }
        });
        let minus_u_over_sinh = sinh_over_u
            .invert()
            .expect("constant term is 1")
            .neg();

        // (e^u - 1)/u = sum u^j / (j+1)!
        let expm1_over_u =
            UniSeries::from_fn(q, order, |k| Rational::new(BigInt::one(), fact[k + 1].clone()));
        let u_over_expm1 = expm1_over_u.invert().expect("constant term is 1");

        let mut sinh = Vec::with_capacity(order + 1);
        let mut standard = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let kf = Rational::from_integer(fact[k].clone());
            let two_k_minus_two = pow2(k as i64) - int(2);
            sinh.push(if two_k_minus_two.is_zero() {
                None
            } else {
                Some(minus_u_over_sinh.coeffs()[k].clone() * &kf / two_k_minus_two)
            });
            standard.push(u_over_expm1.coeffs()[k].clone() * kf);
        }
        Self { sinh, standard }
    }

    pub fn order(&self) -> usize {
        self.standard.len() - 1
    }

    pub fn get(&self, k: usize, convention: BernoulliConvention) -> Option<Result<Rational>> {
        if k > self.order() {
            return None;
        }
        Some(match convention {
            BernoulliConvention::Standard => Ok(self.standard[k].clone()),
            BernoulliConvention::Sinh => self.sinh[k].clone().ok_or(Error::BernoulliUndefined),
        })
    }
}

fn table() -> &'static RwLock<BernoulliTable> {
    static TABLE: OnceLock<RwLock<BernoulliTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(BernoulliTable::new(32)))
}

/// The Bernoulli number `B_k`.
///
/// Fails only for `k = 1` under [`BernoulliConvention::Sinh`].
pub fn bernoulli(k: usize, convention: BernoulliConvention) -> Result<Rational> {
    if let Some(v) = table().read().expect("bernoulli table poisoned").get(k, convention) {
        return v;
    }
    let mut guard = table().write().expect("bernoulli table poisoned");
    let mut order = guard.order();
    while order < k {
        order *= 2;
    }
    if order > guard.order() {
        *guard = BernoulliTable::new(order);
    }
    guard.get(k, convention).expect("table was grown past k")
}

/// `sum_{p=0}^{alpha} p^i C(alpha, p) (-1)^{alpha-p}`.
///
/// This is `alpha!` times a Stirling number of the second kind, so it vanishes
/// for `i < alpha` and equals `alpha!` at `i = alpha`.
pub fn euler_alt_sum(alpha: u64, i: u32) -> Rational {
    let mut acc = BigInt::zero();
    let mut c = BigInt::one();
    for p in 0..=alpha {
        if p > 0 {
            c = c * (alpha - p + 1) / p;
        }
        let term = num_traits::pow(BigInt::from(p), i as usize) * &c;
        if (alpha - p) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Rational::from_integer(acc)
}

/// Coefficients `c(j, i)` of `C(x, j) = sum_i c(j, i) x^i`, lowest degree first.
pub fn binom_poly_coeffs(j: usize) -> Vec<Rational> {
    // x (x - 1) ... (x - j + 1), one linear factor at a time
    let mut poly = vec![Rational::one()];
    for r in 0..j {
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * int(r as i64);
        }
        poly = next;
    }
    let jf = Rational::from_integer(factorial(j as u64));
    poly.into_iter().map(|c| c / &jf).collect()
}

/// `sum_{b1 + b2 = a} C(a1, b1) C(a - a1, b2) (t + b1 - b2)^m`.
///
/// Equals `(t + 2 a1 - a)^m` when `m <= a` (any rational `a1`), or when `a1`
/// is an integer in `0..=a` (any `m`). Outside that range it generally does
/// not: `a = 2, m = 3` is off by `-8 a1 (a1 - 1)(a1 - 2)`.
pub fn vandermonde_sum(a1: &Rational, a: u64, t: &Rational, m: u32) -> Rational {
    let a2 = int(a as i64) - a1;
    (0..=a)
        .map(|b1| {
            let b2 = a - b1;
            let base = t + int(b1 as i64) - int(b2 as i64);
            binom_general(a1, b1) * binom_general(&a2, b2) * num_traits::pow(base, m as usize)
        })
        .sum()
}

/// `|a - b|`, exact.
pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binom_general_examples() {
        assert_eq!(binom_general(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(binom_general(&int(7), 0), int(1));
        assert_eq!(binom_general(&int(-1), 3), int(-1));
        assert_eq!(binom_general(&int(6), 3), int(20));
        assert_eq!(binom_general(&int(2), 5), int(0));
    }

    #[test]
    fn binom_general_is_a_polynomial_of_degree_b() {
        // the (b+1)-th forward difference in z vanishes
        for b in 0..6u64 {
            for z0 in [rat(1, 3), rat(-7, 2), rat(5, 11)] {
                let h = rat(2, 7);
                let diff: Rational = (0..=b + 1)
                    .map(|i| {
                        let z = &z0 + &h * int(i as i64);
                        let sign = if (b + 1 - i) % 2 == 0 { 1 } else { -1 };
                        binom_int((b + 1) as i64, i as i64) * int(sign) * binom_general(&z, b)
                    })
                    .sum();
                assert!(diff.is_zero(), "b={b} z0={z0}");
            }
        }
    }

    #[test]
    fn bernoulli_examples() {
        use BernoulliConvention::*;
        assert_eq!(bernoulli(0, Sinh).unwrap(), int(1));
        assert_eq!(bernoulli(3, Sinh).unwrap(), int(0));
        assert_eq!(bernoulli(2, Sinh).unwrap(), rat(1, 6));
        assert_eq!(bernoulli(4, Sinh).unwrap(), rat(-1, 30));
        assert_eq!(bernoulli(1, Sinh), Err(Error::BernoulliUndefined));
        assert_eq!(bernoulli(1, Standard).unwrap(), rat(-1, 2));
        assert_eq!(bernoulli(12, Standard).unwrap(), rat(-691, 2730));
    }

    #[test]
    fn conventions_agree_on_even_indices() {
        for k in (0..=20).step_by(2) {
            assert_eq!(
                bernoulli(k, BernoulliConvention::Sinh).unwrap(),
                bernoulli(k, BernoulliConvention::Standard).unwrap(),
                "k={k}"
            );
        }
        for k in (3..=21).step_by(2) {
            assert!(bernoulli(k, BernoulliConvention::Sinh).unwrap().is_zero());
            assert!(bernoulli(k, BernoulliConvention::Standard).unwrap().is_zero());
        }
    }

    #[test]
    fn table_grows_on_demand() {
        // B_60 lies beyond the initial table
        let b60 = bernoulli(60, BernoulliConvention::Standard).unwrap();
        assert_eq!(
            b60,
            Rational::new(
                "-1215233140483755572040304994079820246041491".parse().unwrap(),
                "56786730".parse().unwrap()
            )
        );
    }

    #[test]
    fn euler_alt_sum_examples_and_identities() {
        assert_eq!(euler_alt_sum(2, 1), int(0));
        assert_eq!(euler_alt_sum(2, 2), int(2));
        assert_eq!(euler_alt_sum(1, 0), int(0));
        for alpha in 0..=12u64 {
            for i in 0..alpha as u32 {
                assert!(euler_alt_sum(alpha, i).is_zero(), "alpha={alpha} i={i}");
            }
            assert_eq!(
                euler_alt_sum(alpha, alpha as u32),
                Rational::from_integer(factorial(alpha))
            );
        }
    }

    #[test]
    fn binom_poly_coeffs_examples() {
        assert_eq!(binom_poly_coeffs(0), vec![int(1)]);
        assert_eq!(binom_poly_coeffs(1), vec![int(0), int(1)]);
        assert_eq!(binom_poly_coeffs(2), vec![int(0), rat(-1, 2), rat(1, 2)]);
    }

    #[test]
    fn binom_poly_coeffs_reproduce_binomials() {
        for j in 0..8usize {
            let c = binom_poly_coeffs(j);
            for n in 0..=2 * j as i64 {
                let v: Rational = c
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| ci * num_traits::pow(int(n), i))
                    .sum();
                assert_eq!(v, binom_int(n, j as i64), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_sum(&rat(1, 2), 1, &int(3), 1), int(3));
        assert_eq!(vandermonde_sum(&int(1), 2, &int(5), 2), int(25));
        assert_eq!(vandermonde_sum(&rat(-4, 9), 5, &rat(2, 3), 0), int(1));
    }

    #[test]
    fn vandermonde_needs_m_at_most_a() {
        let off = vandermonde_sum(&rat(1, 2), 2, &int(0), 3) - num_traits::pow(int(-1), 3);
        assert_eq!(off, rat(-8, 1) * rat(1, 2) * rat(-1, 2) * rat(-3, 2));
        assert_ne!(vandermonde_sum(&int(-1), 0, &int(0), 1), int(-2));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..9).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn vandermonde_rational(a1 in small_rational(), t in small_rational(), a in 0u64..=8, m in 0u32..=8) {
            let m = m.min(a as u32);
            let want = num_traits::pow(&t + int(2) * &a1 - int(a as i64), m as usize);
            prop_assert_eq!(vandermonde_sum(&a1, a, &t, m), want);
        }

        #[test]
        fn vandermonde_integer_split(t in small_rational(), a in 0u64..=8, k in 0u64..=8, m in 0u32..=8) {
            let a1 = int((k % (a + 1)) as i64);
            let want = num_traits::pow(&t + int(2) * &a1 - int(a as i64), m as usize);
            prop_assert_eq!(vandermonde_sum(&a1, a, &t, m), want);
        }
    }

    #[test]
    fn falling_factorial_hits_zero() {
        assert_eq!(falling_factorial(5, 3), BigInt::from(60));
        assert_eq!(falling_factorial(3, 5), BigInt::zero());
        assert_eq!(falling_factorial(0, 0), BigInt::one());
    }
}
