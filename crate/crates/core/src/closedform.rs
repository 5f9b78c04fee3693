//! Closed forms for `∫ α^m β^n` on the moduli space and the chain of identities
//! that links them to the localization sum.
//!
//! Ratios of factorials `m!/(m-j)!` are always evaluated as falling
//! factorials. They vanish when `m < j`, and in that case no Bernoulli number
//! is looked up at all.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::lemma_bern_limit;
use crate::error::{Error, Result};
use crate::exact::{
    bernoulli, binom_general, binom_signed, factorial, falling_factorial, int, pow2, BernoulliConvention, Rational,
};

/// A top-degree monomial `α^m β^n Π (ψ_k ψ_{k+g})^{p_k}` on `N_g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntersectionQuery {
    pub g: u32,
    pub m_alpha: u32,
    pub n_beta: u32,
    #[serde(default)]
    pub psi_pairs: Vec<u32>,
}

impl IntersectionQuery {
    pub fn new(g: u32, m_alpha: u32, n_beta: u32, psi_pairs: Vec<u32>) -> Self {
        Self { g, m_alpha, n_beta, psi_pairs }
    }

    pub fn psi_total(&self) -> u32 {
        self.psi_pairs.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.g < 1 {
            return Err(Error::Invalid("genus must be at least 1".into()));
        }
        if let Some(k) = self.psi_pairs.iter().position(|&p| p > 1) {
            return Err(Error::Invalid(format!(
                "psi pair multiplicity p_{} = {} (psi classes are odd, so only 0 or 1 is meaningful)",
                k + 1,
                self.psi_pairs[k]
            )));
        }
        if self.psi_pairs.len() > self.g as usize {
            return Err(Error::Invalid(format!("{} psi pairs given but the genus is {}", self.psi_pairs.len(), self.g)));
        }
        check_top_degree(self.g, self.m_alpha, self.n_beta, self.psi_total())
    }
}

fn check_top_degree(g: u32, m: u32, n: u32, p: u32) -> Result<()> {
    let lhs = 2 * m as i64 + 4 * n as i64 + 6 * p as i64;
    let rhs = 6 * g as i64 - 6;
    if lhs != rhs {
        return Err(Error::Degree(format!(
            "2m + 4n + 6p = {lhs} but dim N_g = 6g - 6 = {rhs} (g = {g}, m = {m}, n = {n}, p = {p})"
        )));
    }
    Ok(())
}

fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `(2^q - 2) B_q` with the zero factor checked first, so `q = 1` is never
/// looked up. Only called with `q >= 0`.
fn scaled_bernoulli(q: i64) -> Result<Rational> {
    let factor = pow2(q) - int(2);
    if factor.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(factor * bernoulli(q as usize, BernoulliConvention::Sinh)?)
}

/// `∫_{N_g} α^m β^n = (-1)^g 2^{2g-2} m!/(m-g+1)! (2^{m-g+1} - 2) B_{m-g+1}`.
pub fn intersect_main(g: u32, m: u32, n: u32) -> Result<Rational> {
    if g < 1 {
        return Err(Error::Invalid("genus must be at least 1".into()));
    }
    check_top_degree(g, m, n, 0)?;
    let ff = falling_factorial(m as i64, g as u64 - 1);
    if ff.is_zero() {
        return Ok(Rational::zero());
    }
    let q = m as i64 - g as i64 + 1;
    let g = g as i64;
    Ok(sign(g) * pow2(2 * g - 2) * Rational::from_integer(ff) * scaled_bernoulli(q)?)
}

/// ψ classes only survive in pairs `ψ_k ψ_{k+g}`, and each pair drops the genus by one.
pub fn intersect_psi(query: &IntersectionQuery) -> Result<Rational> {
    query.validate()?;
    let p = query.psi_total();
    if p >= query.g {
        // Only reachable as g = p, m = n = 0, which the degree check rejects for g > 1.
        return Err(Error::Degree(format!("{p} psi pairs exhaust genus {}", query.g)));
    }
    intersect_main(query.g - p, query.m_alpha, query.n_beta)
}

fn check_red(g: u32, m: u32, n: u32) -> Result<()> {
    if g < 1 {
        return Err(Error::Invalid("genus must be at least 1".into()));
    }
    if m + 2 * n != 4 * g - 3 {
        return Err(Error::Degree(format!("m + 2n = {} but 4g - 3 = {}", m + 2 * n, 4 * g - 3)));
    }
    if m < g {
        return Err(Error::Degree(format!("m = {m} is below the genus {g}")));
    }
    Ok(())
}

/// Bernoulli factor `B_{m-2g+1}` times `m!/(m-2g+1)!`, or `None` when the
/// falling factorial is zero.
fn red_core(g: u32, m: u32) -> Result<Option<(Rational, i64)>> {
    let ff = falling_factorial(m as i64, 2 * g as u64 - 1);
    if ff.is_zero() {
        return Ok(None);
    }
    let q = m as i64 - 2 * g as i64 + 1;
    Ok(Some((Rational::from_integer(ff), q)))
}

/// `(-1)^g (2^{m-1} - 2^{2g-1}) m!/(m-2g+1)! B_{m-2g+1}`: the localization total.
pub fn rhs_red(g: u32, m: u32, n: u32) -> Result<Rational> {
    check_red(g, m, n)?;
    let Some((ff, q)) = red_core(g, m)? else {
        return Ok(Rational::zero());
    };
    let factor = pow2(m as i64 - 1) - pow2(2 * g as i64 - 1);
    if factor.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(sign(g as i64) * factor * ff * bernoulli(q as usize, BernoulliConvention::Standard)?)
}

/// `2^{m-1} m!/(m-2g+1)! B_{m-2g+1} (1 - 2^{2g-m})`, the end of the collapse
/// chain. Equals `(-1)^g rhs_red`.
pub fn final_chain(g: u32, m: u32) -> Result<Rational> {
    let Some((ff, q)) = red_core(g, m)? else {
        return Ok(Rational::zero());
    };
    let factor = Rational::one() - pow2(2 * g as i64 - m as i64);
    if factor.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(pow2(m as i64 - 1) * ff * factor * bernoulli(q as usize, BernoulliConvention::Standard)?)
}

/// Limit of the root-of-unity sum: `C(E, k) B_{k-E}/(k-E)! (1 - 2^{E-k+1})`
/// with `E = 2n - 2(g-1) + s`.
pub fn z_infinity(g: u32, n: u32, s: u32, k: u32) -> Rational {
    let e = 2 * n as i64 - 2 * (g as i64 - 1) + s as i64;
    binom_general(&int(e), k as u64) * lemma_bern_limit(k as i64 - e)
}

/// Coefficients of `C(sigma x + a, j)` in `x`, lowest degree first.
fn shifted_binom_poly(sigma: i64, a: &Rational, j: i64) -> Vec<Rational> {
    if j < 0 {
        return vec![];
    }
    let mut poly = vec![Rational::one()];
    for r in 0..j {
        let c0 = a - int(r);
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c * &c0;
            next[i + 1] += c * int(sigma);
        }
        poly = next;
    }
    let jf = Rational::from_integer(factorial(j as u64));
    poly.into_iter().map(|c| c / &jf).collect()
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The three stages of the `N -> infinity` collapse, for one `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseChain {
    /// Before summing over `d1 + d2 = d`.
    pub pre_collapse: Rational,
    /// After the Vandermonde step: `2^{m-1} m! Σ C(g,l1) C(g,l2) (-1)^s z_∞(s, s)`.
    pub vandermonde: Rational,
    pub final_form: Rational,
}

impl CollapseChain {
    pub fn consistent(&self) -> bool {
        self.pre_collapse == self.vandermonde && self.vandermonde == self.final_form
    }
}

pub fn collapse_chain(g: u32, m: u32, n: u32, d: u32) -> Result<CollapseChain> {
    check_red(g, m, n)?;
    let half_d = Rational::new(d.into(), 2.into());
    let mf = Rational::from_integer(factorial(m as u64));
    let gi = g as i64;

    let mut pre = Rational::zero();
    let mut vdm = Rational::zero();
    for l1 in 0..=m.min(g) {
        for l2 in 0..=(m - l1).min(g) {
            let s = m - l1 - l2;
            let weight = pow2((l1 + l2) as i64) * binom_signed(&int(gi), l1 as i64) * binom_signed(&int(gi), l2 as i64);
            let m_over_s = &mf / Rational::from_integer(factorial(s as u64));

            // k-th coefficient of Σ_{d1+d2=d} (d2-d1)^s C(x+d/2-l1, d1-l1) C(-x+d/2-l2, d2-l2)
            let mut collapsed: Vec<Rational> = vec![];
            for d1 in 0..=d {
                let d2 = d - d1;
                let p1 = shifted_binom_poly(1, &(&half_d - int(l1 as i64)), d1 as i64 - l1 as i64);
                let p2 = shifted_binom_poly(-1, &(&half_d - int(l2 as i64)), d2 as i64 - l2 as i64);
                let prod = poly_mul(&p1, &p2);
                let w = num_traits::pow(int(d2 as i64 - d1 as i64), s as usize);
                if collapsed.len() < prod.len() {
                    collapsed.resize(prod.len(), Rational::zero());
                }
                for (i, c) in prod.into_iter().enumerate() {
                    collapsed[i] += c * &w;
                }
            }
            for (k, c) in collapsed.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let kf = Rational::from_integer(factorial(k as u64));
                pre += &m_over_s * &weight * kf * c * z_infinity(g, n, s, k as u32);
            }

            vdm += binom_signed(&int(gi), l1 as i64)
                * binom_signed(&int(gi), l2 as i64)
                * sign(s as i64)
                * z_infinity(g, n, s, s);
        }
    }
    pre /= int(2);
    vdm *= pow2(m as i64 - 1) * &mf;

    Ok(CollapseChain { pre_collapse: pre, vandermonde: vdm, final_form: final_chain(g, m)? })
}

/// The pre-collapse sum, checked against the closed end of the chain.
///
/// Multiply by `(-1)^g` to compare with [`rhs_red`].
pub fn asymptotic_sum(g: u32, m: u32, n: u32, d: u32) -> Result<Rational> {
    let chain = collapse_chain(g, m, n, d)?;
    if !chain.consistent() {
        return Err(Error::Invalid(format!(
            "collapse chain disagrees at (g, m, n, d) = ({g}, {m}, {n}, {d}): {} / {} / {}",
            chain.pre_collapse, chain.vandermonde, chain.final_form
        )));
    }
    Ok(chain.pre_collapse)
}

/// `∫_J (4θ)^g = 4^g g!` on the Jacobian.
pub fn jacobian_theta_integral(g: u32) -> Rational {
    pow2(2 * g as i64) * Rational::from_integer(factorial(g as u64))
}

/// Passing from `∫ α^{m_alpha} β^n` on `N_g` to the localization total with
/// `m = m_alpha + g`. Returns `(m, m_alpha!/m!)`.
pub fn reduction_prefactor(g: u32, m_alpha: u32, n: u32) -> Result<(u32, Rational)> {
    if g < 1 {
        return Err(Error::Invalid("genus must be at least 1".into()));
    }
    check_top_degree(g, m_alpha, n, 0)?;
    let m = m_alpha + g;
    // 4^{-g} C(m, g) ∫_J (4θ)^g = m!/(m-g)!
    let lift = binom_general(&int(m as i64), g as u64) * jacobian_theta_integral(g) / pow2(2 * g as i64);
    debug_assert_eq!(lift, Rational::from_integer(falling_factorial(m as i64, g as u64)));
    Ok((m, lift.recip()))
}

/// All `(m_alpha, n)` with `2 m_alpha + 4 n = 6g - 6`.
pub fn admissible_exponents(g: u32) -> Vec<(u32, u32)> {
    if g < 1 {
        return vec![];
    }
    let top = 3 * g - 3;
    (0..=top / 2).rev().map(|n| (top - 2 * n, n)).collect()
}

/// `Σ_{l1+l2+s=m} C(g,l1) C(g,l2) C(m-2g,s)`, the coefficient of `z^m` in `(1+z)^m`.
pub fn multinomial_collapse(g: u32, m: u32) -> Rational {
    let top = int(m as i64 - 2 * g as i64);
    let mut acc = Rational::zero();
    for l1 in 0..=m {
        for l2 in 0..=(m - l1) {
            let s = m - l1 - l2;
            acc += binom_signed(&int(g as i64), l1 as i64)
                * binom_signed(&int(g as i64), l2 as i64)
                * binom_general(&top, s as u64);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn main_examples() {
        assert_eq!(intersect_main(1, 0, 0).unwrap(), int(1));
        assert_eq!(intersect_main(2, 3, 0).unwrap(), int(4));
        assert_eq!(intersect_main(2, 1, 1).unwrap(), int(-4));
        assert_eq!(intersect_main(3, 6, 0).unwrap(), int(224));
        assert!(matches!(intersect_main(2, 2, 0), Err(Error::Degree(_))));
    }

    #[test]
    fn main_vanishing_pattern() {
        for g in 1..=6 {
            for (m, n) in admissible_exponents(g) {
                let q = m as i64 - g as i64 + 1;
                if q == 1 || (q >= 3 && q % 2 == 1) {
                    assert!(intersect_main(g, m, n).unwrap().is_zero(), "g={g} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn psi_reduction() {
        let q = IntersectionQuery::new(3, 3, 0, vec![1, 0, 0]);
        assert_eq!(intersect_psi(&q).unwrap(), int(4));
        let q = IntersectionQuery::new(2, 3, 0, vec![]);
        assert_eq!(intersect_psi(&q).unwrap(), intersect_main(2, 3, 0).unwrap());
        assert!(intersect_psi(&IntersectionQuery::new(3, 4, 0, vec![1])).is_err());
        assert!(intersect_psi(&IntersectionQuery::new(3, 0, 0, vec![2])).is_err());
    }

    #[test]
    fn red_examples_and_final_chain() {
        assert_eq!(rhs_red(1, 1, 0).unwrap(), int(1));
        assert_eq!(rhs_red(2, 5, 0).unwrap(), int(80));
        assert_eq!(rhs_red(2, 3, 1).unwrap(), int(-24));
        for g in 1..=5u32 {
            for n in 0..=(3 * g - 3) / 2 {
                let m = 4 * g - 3 - 2 * n;
                if m < g {
                    continue;
                }
                assert_eq!(rhs_red(g, m, n).unwrap(), sign(g as i64) * final_chain(g, m).unwrap());
            }
        }
    }

    #[test]
    fn prefactor_examples() {
        assert_eq!(reduction_prefactor(2, 3, 0).unwrap(), (5, rat(1, 20)));
        assert_eq!(reduction_prefactor(1, 0, 0).unwrap(), (1, int(1)));
        assert_eq!(reduction_prefactor(2, 1, 1).unwrap(), (3, rat(1, 6)));
    }

    #[test]
    fn triangle_identity() {
        for g in 1..=4 {
            for (ma, n) in admissible_exponents(g) {
                let (m, f) = reduction_prefactor(g, ma, n).unwrap();
                assert_eq!(intersect_main(g, ma, n).unwrap(), f * rhs_red(g, m, n).unwrap(), "g={g} ma={ma} n={n}");
            }
        }
    }

    #[test]
    fn collapse_chain_matches_red() {
        for g in 1..=3u32 {
            for (ma, n) in admissible_exponents(g) {
                let m = ma + g;
                for d in [2 * g - 1, 2 * g + 1] {
                    let chain = collapse_chain(g, m, n, d).unwrap();
                    assert!(chain.consistent(), "g={g} m={m} n={n} d={d}: {chain:?}");
                    assert_eq!(sign(g as i64) * chain.pre_collapse, rhs_red(g, m, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn multinomial() {
        for g in 1..=4 {
            for m in g..=4 * g - 3 {
                assert_eq!(multinomial_collapse(g, m), int(1), "g={g} m={m}");
            }
        }
    }
}
