//! Top intersections on `Sym^{d1} C x Sym^{d2} C`.
//!
//! On `Sym^d C` the only classes that matter here are the point class `x`
//! and the theta class `theta`, and top monomials integrate as
//! `x^{d-l} theta^l = g!/(g-l)!` for `l <= g` and `0` for `l > g`.
//! A [`ThetaSeries`] is a polynomial in `theta1, theta2` whose coefficients
//! are [`BiSeries`] in `x1, x2`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{binom_int, factorial, int, Rational};
use crate::ring::Ring;
use crate::series::{BiSeries, UniSeries};

/// `x^p theta^q` integrated over `Sym^d C` on a genus-`g` curve.
pub fn integrate_sym_monomial(g: u32, d: u32, p: u32, q: u32) -> Rational {
    if p + q != d || q > g {
        return Rational::zero();
    }
    Rational::from_integer(factorial(g as u64) / factorial((g - q) as u64))
}

/// Polynomial in `theta1, theta2` with bivariate series coefficients.
///
/// Terms with a theta power above `cap` are dropped on multiplication. With
/// `cap = genus` this loses nothing, since such terms integrate to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSeries<R: Ring> {
    genus: u32,
    cap: usize,
    degrees: (usize, usize),
    entries: Vec<BiSeries<R>>,
}

impl<R: Ring> ThetaSeries<R> {
    pub fn zero(ring: R, genus: u32, degrees: (usize, usize)) -> Self {
        Self::zero_with_cap(ring, genus, genus as usize, degrees)
    }

    pub fn zero_with_cap(ring: R, genus: u32, cap: usize, degrees: (usize, usize)) -> Self {
        let entries = vec![BiSeries::zero(ring, degrees); (cap + 1) * (cap + 1)];
        Self { genus, cap, degrees, entries }
    }

    /// A theta-free series.
    pub fn from_bi(b: BiSeries<R>, genus: u32, cap: usize) -> Self {
        let degrees = b.order();
        let mut s = Self::zero_with_cap(b.ring().clone(), genus, cap, degrees);
        s.entries[0] = b;
        s
    }

    /// `c * theta1^q1 * theta2^q2`.
    pub fn monomial(ring: R, genus: u32, cap: usize, degrees: (usize, usize), q: (usize, usize), c: R::Elem) -> Self {
        let mut s = Self::zero_with_cap(ring.clone(), genus, cap, degrees);
        if q.0 <= cap && q.1 <= cap {
            let at = s.idx(q.0, q.1);
            s.entries[at] = BiSeries::constant(ring, c, degrees);
        }
        s
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn degrees(&self) -> (usize, usize) {
        self.degrees
    }

    fn idx(&self, q1: usize, q2: usize) -> usize {
        q1 * (self.cap + 1) + q2
    }

    fn ring(&self) -> &R {
        self.entries[0].ring()
    }

    /// Coefficient of `theta1^q1 theta2^q2`.
    pub fn entry(&self, q1: usize, q2: usize) -> Option<&BiSeries<R>> {
        (q1 <= self.cap && q2 <= self.cap).then(|| &self.entries[self.idx(q1, q2)])
    }

    pub fn set_entry(&mut self, q1: usize, q2: usize, b: BiSeries<R>) {
        assert!(q1 <= self.cap && q2 <= self.cap, "theta power above cap");
        let at = self.idx(q1, q2);
        self.entries[at] = b.truncate(self.degrees);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self { entries: self.entries.iter().map(|a| a.scale(c)).collect(), ..self.clone() }
    }

    pub fn mul_bi(&self, b: &BiSeries<R>) -> Self {
        Self { entries: self.entries.iter().map(|a| a.mul(b)).collect(), ..self.clone() }
    }

    /// Theta-graded convolution.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let cap = self.cap;
        let mut out = Self::zero_with_cap(self.ring().clone(), self.genus, cap, self.degrees);
        for a1 in 0..=cap {
            for a2 in 0..=cap {
                let a = &self.entries[self.idx(a1, a2)];
                if a.is_zero() {
                    continue;
                }
                for b1 in 0..=cap - a1 {
                    for b2 in 0..=cap - a2 {
                        let b = &other.entries[other.idx(b1, b2)];
                        if b.is_zero() {
                            continue;
                        }
                        let at = out.idx(a1 + b1, a2 + b2);
                        out.entries[at] = out.entries[at].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let one = BiSeries::one(self.ring().clone(), self.degrees);
        (0..e).fold(Self::from_bi(one, self.genus, self.cap), |acc, _| acc.mul(self))
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.cap, other.cap, "theta caps differ");
        assert_eq!(self.degrees, other.degrees, "locus degrees differ");
    }
}

/// Evaluates `f` on `Sym^{d1} C x Sym^{d2} C`.
pub fn integrate_fixed_locus<R: Ring>(f: &ThetaSeries<R>) -> Result<R::Elem> {
    let (d1, d2) = f.degrees;
    let g = f.genus;
    let ring = f.ring().clone();
    let mut acc = ring.zero();
    for q1 in 0..=f.cap.min(d1) {
        for q2 in 0..=f.cap.min(d2) {
            let w1 = integrate_sym_monomial(g, d1 as u32, (d1 - q1) as u32, q1 as u32);
            let w2 = integrate_sym_monomial(g, d2 as u32, (d2 - q2) as u32, q2 as u32);
            let w = w1 * w2;
            if w.is_zero() {
                continue;
            }
            let c = f.entries[f.idx(q1, q2)].coefficient(d1 - q1, d2 - q2)?;
            acc = ring.add(&acc, &ring.scale(c, &w));
        }
    }
    Ok(acc)
}

/// `(lambda + x)^e` for `e >= 0`, exact as a polynomial and truncated.
pub fn shifted_power<R: Ring>(ring: &R, lambda: &R::Elem, e: u64, order: usize) -> UniSeries<R> {
    UniSeries::from_fn(ring.clone(), order, |k| {
        if k as u64 > e {
            return ring.zero();
        }
        let lp = ring.pow(lambda, (e - k as u64) as i64).expect("non-negative exponent");
        ring.scale(&lp, &binom_int(e as i64, k as i64))
    })
}

/// `((lambda + x)^N - 1) / x` for `lambda^N = 1`, a unit with constant term
/// `N lambda^{N-1}`. Fails if `lambda^N != 1`.
pub fn pole_free_quotient<R: Ring>(ring: &R, lambda: &R::Elem, n: u64, order: usize) -> Result<UniSeries<R>> {
    let p = shifted_power(ring, lambda, n, order + 1).sub(&UniSeries::one(ring.clone(), order + 1));
    p.shift_down(1, "(lambda + x)^N - 1")
}

/// `N (lambda + x)^{N-1} / ((lambda + x)^N - 1) - 1/x` as a genuine power series.
///
/// Over the common denominator `x ((lambda + x)^N - 1) = x^2 Q(x)` the
/// numerator is `N x (lambda + x)^{N-1} - ((lambda + x)^N - 1)`, whose `x^0`
/// and `x^1` coefficients cancel exactly when `lambda^N = 1`.
pub fn theta_exponent<R: Ring>(ring: &R, lambda: &R::Elem, n: u64, order: usize) -> Result<UniSeries<R>> {
    let o = order + 2;
    let lhs = shifted_power(ring, lambda, n - 1, o)
        .shift_up(1)
        .scale_rational(&int(n as i64));
    let rhs = shifted_power(ring, lambda, n, o).sub(&UniSeries::one(ring.clone(), o));
    let numerator = lhs.sub(&rhs).shift_down(2, "log-derivative numerator")?;
    let q = pole_free_quotient(ring, lambda, n, order)?;
    Ok(numerator.mul(&q.invert()?))
}

/// `theta^l / l! * exp(theta S)` on `Sym^d C`, with `theta^j` replaced by
/// `g!/(g-j)! x^j`. Only powers `theta^j`, `j <= g`, survive.
pub fn theta_exp_direct<R: Ring>(g: u32, l: u32, s: &UniSeries<R>) -> Result<UniSeries<R>> {
    if l > g {
        return Err(Error::Invalid(format!("theta power {l} exceeds genus {g}")));
    }
    let ring = s.ring().clone();
    let order = s.order();
    let mut acc = UniSeries::zero(ring.clone(), order);
    let mut s_pow = UniSeries::one(ring, order);
    for k in 0..=(g - l) {
        // g! / ((g-l-k)! l! k!)
        let c = Rational::new(
            factorial(g as u64),
            factorial((g - l - k) as u64) * factorial(l as u64) * factorial(k as u64),
        );
        acc = acc.add(&s_pow.shift_up((l + k) as usize).scale_rational(&c));
        s_pow = s_pow.mul(s);
    }
    Ok(acc)
}

/// `N^{g-l} C(g, l) x^g (lambda + x)^{(N-1)(g-l)} / ((lambda + x)^N - 1)^{g-l}`.
pub fn theta_exp_closed<R: Ring>(g: u32, l: u32, n: u64, ring: &R, lambda: &R::Elem, order: usize) -> Result<UniSeries<R>> {
    if l > g {
        return Err(Error::Invalid(format!("theta power {l} exceeds genus {g}")));
    }
    let gl = (g - l) as u64;
    let prefactor = Rational::from_integer(BigInt::from(n).pow(gl as u32)) * binom_int(g as i64, l as i64);
    // x^g / ((lambda+x)^N - 1)^{g-l} = x^l Q(x)^{-(g-l)}
    let q = pole_free_quotient(ring, lambda, n, order)?;
    let body = shifted_power(ring, lambda, (n - 1) * gl, order).mul(&q.pow(-(gl as i64))?);
    Ok(body.shift_up(l as usize).scale_rational(&prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CycloField;
    use crate::exact::rat;
    use crate::ring::RationalField;

    #[test]
    fn monomial_examples() {
        assert_eq!(integrate_sym_monomial(2, 3, 1, 2), int(2));
        assert_eq!(integrate_sym_monomial(1, 4, 1, 3), int(0));
        assert_eq!(integrate_sym_monomial(3, 5, 1, 1), int(0));
        assert_eq!(integrate_sym_monomial(3, 5, 4, 1), int(3));
        assert_eq!(integrate_sym_monomial(0, 0, 0, 0), int(1));
    }

    #[test]
    fn direct_examples() {
        let q = RationalField;
        let s = theta_exponent(&q, &int(1), 3, 2).unwrap();
        assert_eq!(theta_exp_direct(1, 0, &s).unwrap().coeffs(), &[int(1), int(1), rat(-1, 3)]);
        assert_eq!(theta_exp_direct(1, 1, &s).unwrap().coeffs(), &[int(0), int(1), int(0)]);
        // l = g leaves x^g alone
        let s4 = theta_exponent(&q, &int(1), 5, 4).unwrap();
        assert_eq!(
            theta_exp_direct(3, 3, &s4).unwrap(),
            UniSeries::one(q, 4).shift_up(3)
        );
    }

    #[test]
    fn closed_examples() {
        let q = RationalField;
        assert_eq!(
            theta_exp_closed(1, 1, 7, &q, &int(1), 3).unwrap(),
            UniSeries::one(q, 3).shift_up(1)
        );
        assert_eq!(
            theta_exp_closed(1, 0, 3, &q, &int(1), 2).unwrap().coeffs(),
            &[int(1), int(1), rat(-1, 3)]
        );
        // g=2, l=1: 2 * 3 * x^2 (1+x)^2 / ((1+x)^3 - 1) = 2x (1 + x - x^2/3 + ...)
        let c = theta_exp_closed(2, 1, 3, &q, &int(1), 3).unwrap();
        assert_eq!(c.coeffs(), &[int(0), int(2), int(2), rat(-2, 3)]);
    }

    #[test]
    fn closed_matches_direct() {
        for n in [3u64, 5] {
            let field = CycloField::new(n).unwrap();
            for j in 0..n as i64 {
                let lambda = field.zeta_pow(j);
                for order in 0..=6 {
                    let s = theta_exponent(&field, &lambda, n, order).unwrap();
                    for g in 0..=4 {
                        for l in 0..=g {
                            assert_eq!(
                                theta_exp_direct(g, l, &s).unwrap(),
                                theta_exp_closed(g, l, n, &field, &lambda, order).unwrap(),
                                "N={n} j={j} order={order} g={g} l={l}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn theta_exponent_constant_term() {
        for n in [3u64, 5, 7] {
            let field = CycloField::new(n).unwrap();
            for j in 0..n as i64 {
                let lambda = field.zeta_pow(j);
                let s = theta_exponent(&field, &lambda, n, 3).unwrap();
                let expected = field.scale(&field.zeta_pow(-j), &rat(n as i64 - 1, 2));
                assert_eq!(s.coeffs()[0], expected);
            }
        }
    }

    #[test]
    fn theta_exponent_needs_a_root_of_unity() {
        let q = RationalField;
        assert!(matches!(
            theta_exponent(&q, &int(2), 3, 2),
            Err(Error::PoleNotCancelled { .. })
        ));
    }

    fn x_power(d: (usize, usize), p: (usize, usize)) -> BiSeries<RationalField> {
        BiSeries::from_fn(RationalField, d, |i, j| if (i, j) == p { int(1) } else { int(0) })
    }

    #[test]
    fn integrate_examples() {
        let q = RationalField;
        let f = ThetaSeries::from_bi(x_power((2, 3), (2, 3)), 2, 2);
        assert_eq!(integrate_fixed_locus(&f).unwrap(), int(1));

        let mut f = ThetaSeries::zero(q, 2, (3, 2));
        f.set_entry(1, 1, x_power((3, 2), (2, 1)));
        assert_eq!(integrate_fixed_locus(&f).unwrap(), int(4));

        // wrong x-degree contributes nothing
        let mut f = ThetaSeries::zero(q, 2, (3, 2));
        f.set_entry(1, 1, x_power((3, 2), (1, 1)));
        assert_eq!(integrate_fixed_locus(&f).unwrap(), int(0));
    }

    #[test]
    fn point_factor_keeps_only_constants() {
        let q = RationalField;
        let theta1 = ThetaSeries::monomial(q, 1, 1, (0, 1), (1, 0), int(1));
        assert_eq!(integrate_fixed_locus(&theta1).unwrap(), int(0));
        let theta2 = ThetaSeries::monomial(q, 1, 1, (0, 1), (0, 1), int(1));
        assert_eq!(integrate_fixed_locus(&theta2).unwrap(), int(1));
    }

    fn sample(genus: u32, cap: usize, degrees: (usize, usize), seed: i64) -> ThetaSeries<RationalField> {
        let q = RationalField;
        let mut f = ThetaSeries::zero_with_cap(q, genus, cap, degrees);
        for q1 in 0..=cap.min(genus as usize + 1) {
            for q2 in 0..=cap.min(genus as usize + 1) {
                let b = BiSeries::from_fn(q, degrees, |i, j| {
                    rat((seed * 7 + (q1 * 5 + q2 * 3 + i * 2 + j) as i64) % 11 - 5, 1 + (i + q1) as i64)
                });
                f.set_entry(q1, q2, b);
            }
        }
        f
    }

    #[test]
    fn theta_cap_is_sound() {
        // products computed with a larger cap keep terms the genus cap drops,
        // but those terms integrate to zero
        for genus in 1..=3u32 {
            for seed in 0..4 {
                let degrees = (genus as usize + 2, genus as usize + 1);
                let capped = sample(genus, genus as usize, degrees, seed);
                let wide = sample(genus, genus as usize + 3, degrees, seed);
                let a = integrate_fixed_locus(&capped.mul(&capped)).unwrap();
                let b = integrate_fixed_locus(&wide.mul(&wide)).unwrap();
                assert_eq!(a, b, "genus={genus} seed={seed}");
            }
        }
    }

    #[test]
    fn integration_factorizes_across_the_two_symmetric_products() {
        let q = RationalField;
        let g = 2;
        let (d1, d2) = (3usize, 2usize);
        // f1 in x1, theta1 only; f2 in x2, theta2 only
        let f1 = ThetaSeries::monomial(q, g, 2, (d1, d2), (1, 0), int(3))
            .mul_bi(&x_power((d1, d2), (2, 0)))
            .add(&ThetaSeries::from_bi(x_power((d1, d2), (3, 0)).scale_rational(&int(5)), g, 2));
        let f2 = ThetaSeries::monomial(q, g, 2, (d1, d2), (0, 2), int(2))
            .add(&ThetaSeries::from_bi(x_power((d1, d2), (0, 1)), g, 2));
        let lhs = integrate_fixed_locus(&f1.mul(&f2)).unwrap();
        // on Sym^3: 3 * x^2 theta = 3 * 2 = 6, plus 5 x^3 = 5
        // on Sym^2: 2 * theta^2 = 2 * 2 = 4, plus x = 0 (not top)
        assert_eq!(lhs, int(11 * 4));
    }
}
