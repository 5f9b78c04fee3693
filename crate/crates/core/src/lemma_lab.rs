//! Brute-force checks of the analytic lemmas behind the collapse: the residue
//! closed form, the Bernoulli limit of root-of-unity sums, and the binomial
//! difference limit.
//!
//! Verdicts compare exact errors at a few values of `N`. An error sequence
//! passes when every step strictly decreases, except that a step from zero to
//! zero is allowed (the finite value is already exact).

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{lemma_bern_limit, root_sum, RootSumAlgorithm};
use crate::error::Result;
use crate::exact::{abs_diff, binom_general, binom_int, binom_poly_coeffs, factorial, int, rat, rpow, Rational};
use crate::params;
use crate::report::{Params, ResultRow, Verdict};
use crate::series::residue_oracle;

/// `(1/N) Σ_{p=0}^{a} (-1)^{a-p} C((b+p)/N, c) C(a, p)`.
pub fn residue_closed(a: u32, b: i64, c: u32, n: u32) -> Rational {
    let nn = int(n as i64);
    let sum: Rational = (0..=a)
        .map(|p| {
            let term = binom_general(&(int(b + p as i64) / &nn), c as u64) * binom_int(a as i64, p as i64);
            if (a - p) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    sum / nn
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernCheck {
    pub finite: Rational,
    pub limit: Rational,
    pub error: Rational,
}

/// `N^{-k} Σ_{ζ ≠ 1} ζ^{(N-1)/2 + a} / (1 - ζ)^k` against its `N -> ∞` limit.
pub fn lemma_bern_check(a: i64, k: u32, n: u64) -> Result<BernCheck> {
    let e = (n as i64 - 1) / 2 + a;
    let sum = root_sum(e, k as i64, n, RootSumAlgorithm::Generating)?;
    let finite = sum / rpow(&int(n as i64), k as i64);
    let limit = lemma_bern_limit(k as i64);
    let error = abs_diff(&finite, &limit);
    Ok(BernCheck { finite, limit, error })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinomsCheck {
    pub finite: Rational,
    pub limit: Rational,
}

impl BinomsCheck {
    pub fn error(&self) -> Rational {
        abs_diff(&self.finite, &self.limit)
    }
}

/// `N^α Σ_p C(z + p/N, b) C(α, p) (-1)^{α-p}` against `α! [x^α] C(x + z, b)`.
pub fn lemma_binoms_check(z: &Rational, b: u32, alpha: u32, n: u64) -> BinomsCheck {
    let nn = int(n as i64);
    let sum: Rational = (0..=alpha)
        .map(|p| {
            let term = binom_general(&(z + int(p as i64) / &nn), b as u64) * binom_int(alpha as i64, p as i64);
            if (alpha - p) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    let finite = sum * rpow(&nn, alpha as i64);

    // C(x+z, b) = Σ_i c(b,i) (x+z)^i, so [x^α] = Σ_i c(b,i) C(i,α) z^{i-α}
    let coeff: Rational = binom_poly_coeffs(b as usize)
        .iter()
        .enumerate()
        .skip(alpha as usize)
        .map(|(i, c)| c * binom_int(i as i64, alpha as i64) * rpow_nonneg(z, i - alpha as usize))
        .sum();
    let limit = coeff * Rational::from_integer(factorial(alpha as u64));
    BinomsCheck { finite, limit }
}

fn rpow_nonneg(z: &Rational, e: usize) -> Rational {
    if e == 0 {
        Rational::one()
    } else {
        num_traits::pow(z.clone(), e)
    }
}

/// Strictly decreasing, with `0 -> 0` steps allowed.
pub fn converges(errors: &[Rational]) -> bool {
    errors.windows(2).all(|w| w[1] < w[0] || (w[0].is_zero() && w[1].is_zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Residue,
    BernoulliLimit,
    BinomialLimit,
}

impl LemmaId {
    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Residue => "residue",
            LemmaId::BernoulliLimit => "lemma1",
            LemmaId::BinomialLimit => "lemma2",
        }
    }
}

/// One grid point: the exact error at each `N`, in increasing `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaPoint {
    pub params: Params,
    pub errors: Vec<(u64, Rational)>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub points: Vec<LemmaPoint>,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.points.iter().all(|p| !p.verdict.is_fail())
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaPoint> {
        self.points.iter().filter(|p| p.verdict.is_fail())
    }

    /// One row per `(point, N)`, the value being the exact error.
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut rows = vec![];
        for p in &self.points {
            for (n, e) in &p.errors {
                let mut params = p.params.clone();
                params.insert("lemma".into(), self.lemma.name().into());
                params.insert("N".into(), (*n).into());
                rows.push(ResultRow::new(params, e, None, p.verdict));
            }
        }
        rows
    }
}

/// `residue_closed` against `residue_oracle` on `a <= a_max`, `|b| <= b_max`,
/// `c <= c_max`, `1 <= N <= n_max`. The error must be exactly zero.
pub fn residue_grid(a_max: u32, b_max: i64, c_max: u32, n_max: u32) -> Result<LemmaReport> {
    let mut grid = vec![];
    for a in 0..=a_max {
        for b in -b_max..=b_max {
            for c in 0..=c_max {
                for n in 1..=n_max {
                    grid.push((a, b, c, n));
                }
            }
        }
    }
    let points = grid
        .into_par_iter()
        .map(|(a, b, c, n)| {
            let err = abs_diff(&residue_closed(a, b, c, n), &residue_oracle(a, b, c, n)?);
            Ok(LemmaPoint {
                params: params! {"a" => a, "b" => b, "c" => c},
                verdict: Verdict::from_bool(err.is_zero()),
                errors: vec![(n as u64, err)],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport { lemma: LemmaId::Residue, points })
}

/// The Bernoulli limit over `k <= k_max` and the given shifts `a`. At `k = 0` the finite
/// value must be exactly `-1` for every `N`.
pub fn bern_grid(ns: &[u64], k_max: u32, shifts: &[i64]) -> Result<LemmaReport> {
    let grid: Vec<(i64, u32)> = shifts.iter().flat_map(|&a| (0..=k_max).map(move |k| (a, k))).collect();
    let points = grid
        .into_par_iter()
        .map(|(a, k)| {
            let checks = ns.iter().map(|&n| Ok((n, lemma_bern_check(a, k, n)?))).collect::<Result<Vec<_>>>()?;
            let errors: Vec<_> = checks.iter().map(|(n, c)| (*n, c.error.clone())).collect();
            let errs: Vec<Rational> = errors.iter().map(|(_, e)| e.clone()).collect();
            let ok = if k == 0 { checks.iter().all(|(_, c)| c.finite == int(-1)) } else { converges(&errs) };
            Ok(LemmaPoint { params: params! {"a" => a, "k" => k}, errors, verdict: Verdict::from_bool(ok) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport { lemma: LemmaId::BernoulliLimit, points })
}

/// The binomial limit over `b <= b_max`, `alpha <= alpha_max` and the given `z`. When
/// `b <= alpha` the finite sum is a top-order difference of a polynomial of
/// degree `b`, so the error must vanish at every `N`.
pub fn binoms_grid(ns: &[u64], b_max: u32, alpha_max: u32, zs: &[Rational]) -> LemmaReport {
    let mut grid = vec![];
    for z in zs {
        for b in 0..=b_max {
            for alpha in 0..=alpha_max {
                grid.push((z.clone(), b, alpha));
            }
        }
    }
    let points = grid
        .into_par_iter()
        .map(|(z, b, alpha)| {
            let errors: Vec<(u64, Rational)> =
                ns.iter().map(|&n| (n, lemma_binoms_check(&z, b, alpha, n).error())).collect();
            let errs: Vec<Rational> = errors.iter().map(|(_, e)| e.clone()).collect();
            let ok = if b <= alpha { errs.iter().all(Zero::is_zero) } else { converges(&errs) };
            LemmaPoint { params: params! {"z" => &z, "b" => b, "alpha" => alpha}, errors, verdict: Verdict::from_bool(ok) }
        })
        .collect();
    LemmaReport { lemma: LemmaId::BinomialLimit, points }
}

pub const LEMMA1_NS: [u64; 3] = [11, 101, 1009];
pub const LEMMA1_SHIFTS: [i64; 4] = [-1, 0, 1, 2];
pub const LEMMA2_NS: [u64; 3] = [10, 100, 1000];

pub fn lemma2_zs() -> Vec<Rational> {
    vec![int(0), rat(1, 2), rat(-3, 2), int(2)]
}

/// The three standard grids.
pub fn standard_reports() -> Result<Vec<LemmaReport>> {
    Ok(vec![
        residue_grid(6, 4, 5, 9)?,
        bern_grid(&LEMMA1_NS, 6, &LEMMA1_SHIFTS)?,
        binoms_grid(&LEMMA2_NS, 5, 4, &lemma2_zs()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_examples() {
        for n in 1..6 {
            assert_eq!(residue_closed(0, 0, 0, n), rat(1, n as i64));
        }
        assert_eq!(residue_closed(1, 0, 1, 2), rat(1, 4));
        assert_eq!(residue_closed(0, 0, 1, 3), int(0));
        assert_eq!(residue_oracle(0, 0, 1, 3).unwrap(), int(0));
    }

    #[test]
    fn bern_examples() {
        let c = lemma_bern_check(0, 0, 101).unwrap();
        assert_eq!((c.finite, c.limit), (int(-1), int(-1)));
        let c = lemma_bern_check(0, 1, 3).unwrap();
        assert_eq!((c.finite, c.limit), (rat(-1, 3), int(0)));
        let e101 = lemma_bern_check(0, 2, 101).unwrap();
        let e1009 = lemma_bern_check(0, 2, 1009).unwrap();
        assert_eq!(e101.limit, rat(1, 24));
        assert!(e1009.error < e101.error);
    }

    #[test]
    fn binoms_examples() {
        let z = rat(-3, 2);
        let c = lemma_binoms_check(&z, 3, 0, 7);
        assert_eq!(c.finite, binom_general(&z, 3));
        assert_eq!(c.finite, c.limit);
        let c = lemma_binoms_check(&z, 0, 1, 7);
        assert_eq!((c.finite, c.limit), (int(0), int(0)));
        for n in [1, 10, 1000] {
            let c = lemma_binoms_check(&int(0), 1, 1, n);
            assert_eq!((c.finite, c.limit), (int(1), int(1)));
        }
    }

    #[test]
    fn convergence_rule() {
        assert!(converges(&[int(3), int(2), int(1)]));
        assert!(converges(&[int(0), int(0), int(0)]));
        assert!(!converges(&[int(3), int(3), int(1)]));
    }

    #[test]
    fn small_grids_pass() {
        assert!(residue_grid(3, 2, 3, 5).unwrap().pass());
        assert!(binoms_grid(&[10, 100], 3, 3, &[rat(1, 2)]).pass());
    }
}
