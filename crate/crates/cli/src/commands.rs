use anyhow::{bail, Context};
use serde::Deserialize;

use quotloc::closedform::{
    admissible_exponents, collapse_chain, intersect_main, intersect_psi, multinomial_collapse, reduction_prefactor,
    rhs_red, IntersectionQuery,
};
use quotloc::cyclotomic::is_odd_prime;
use quotloc::lemma_lab::standard_reports;
use quotloc::localization::{compare_routes, quot_localized, ProblemInstance, Route, SELECTED_NORMALIZATION};
use quotloc::params;
use quotloc::report::{parse_rational, render, Params, Report, ResultRow, Verdict};
use quotloc::Rational;

use crate::{GridArgs, IntersectArgs, LocalizeArgs, RouteArg, Suite, TableArgs, VerifyArgs};

const BUILTIN_GOLDEN: &str = include_str!("../golden/vectors.json");

pub fn intersect(a: &IntersectArgs) -> anyhow::Result<Report<&IntersectArgs>> {
    let query = IntersectionQuery::new(a.genus, a.alpha, a.beta, a.psi.clone());
    let value = intersect_psi(&query)?;
    let mut p = params! {"g" => a.genus, "m_alpha" => a.alpha, "n" => a.beta};
    if query.psi_total() > 0 {
        p.insert("psi_pairs".into(), query.psi_total().into());
    }
    Ok(Report::new("intersect", a, vec![ResultRow::new(p, &value, Some("closed"), Verdict::Info)]))
}

/// `n` from `m + 2n = 4g - 3`, with the constraint named on failure.
fn beta_exponent(g: u32, m: u32) -> anyhow::Result<u32> {
    if g == 0 {
        bail!("genus must be at least 1");
    }
    let top = 4 * g - 3;
    if m > top || (top - m) % 2 == 1 {
        bail!("degree constraint m + 2n = 4g - 3 = {top} has no solution n >= 0 for m = {m}");
    }
    if m < g {
        bail!("constraint m >= g violated: m = {m}, g = {g}");
    }
    Ok((top - m) / 2)
}

fn smallest_prime_at_least(lo: u64) -> u64 {
    (lo.max(3)..).find(|&n| is_odd_prime(n)).expect("primes are unbounded")
}

/// A validated `(N, d)` cell or the reason it is skipped.
fn cell(g: u32, m: u32, n: u32, big_n: u64, d: u32, allow_small_n: bool) -> Result<ProblemInstance, String> {
    if !allow_small_n && big_n < 2 * g as u64 + 1 {
        return Err(format!("N = {big_n} < 2g + 1 = {} (pass --allow-small-n to force)", 2 * g + 1));
    }
    ProblemInstance::new(g, m, n, big_n, d).map_err(|e| e.to_string())
}

fn grid_defaults(g: u32, ns: &[u64], ds: &[u32]) -> (Vec<u64>, Vec<u32>) {
    let ns = if ns.is_empty() { vec![smallest_prime_at_least(2 * g as u64 + 1)] } else { ns.to_vec() };
    let ds = if ds.is_empty() { vec![(2 * g).saturating_sub(1).max(1)] } else { ds.to_vec() };
    (ns, ds)
}

fn cell_params(inst: &ProblemInstance) -> Params {
    params! {"g" => inst.g, "m" => inst.m, "n" => inst.n, "N" => inst.big_n, "d" => inst.d}
}

fn skipped_row(g: u32, m: u32, n: u32, big_n: u64, d: u32, why: String) -> ResultRow {
    let p = params! {"g" => g, "m" => m, "n" => n, "N" => big_n, "d" => d};
    ResultRow::text(p, format!("skipped: {why}"), None, Verdict::Info)
}

pub fn localize(a: &LocalizeArgs) -> anyhow::Result<Report<&LocalizeArgs>> {
    let GridArgs { genus: g, alpha_exp, big_n, d, allow_small_n } = &a.grid;
    let g = *g;
    let m = alpha_exp.unwrap_or((4 * g).saturating_sub(3));
    let n = beta_exponent(g, m)?;
    let m_alpha = m - g;
    let expected_reduced = intersect_main(g, m_alpha, n)?;
    let (_, factor) = reduction_prefactor(g, m_alpha, n)?;
    let expected = rhs_red(g, m, n)?;
    let (ns, ds) = grid_defaults(g, big_n, d);

    let (route, tag) = match a.route {
        RouteArg::A => (Some(Route::A), "a"),
        RouteArg::B => (Some(Route::B), "b"),
        RouteArg::Closed => (None, "closed"),
    };
    let mut rows = vec![];
    for &big_n in &ns {
        for &d in &ds {
            let inst = match cell(g, m, n, big_n, d, *allow_small_n) {
                Ok(i) => i,
                Err(why) => {
                    rows.push(skipped_row(g, m, n, big_n, d, why));
                    continue;
                }
            };
            let q = match route {
                Some(r) => quot_localized(&inst, r).with_context(|| format!("localizing {inst:?}"))?,
                None => expected.clone(),
            };
            let mut p = cell_params(&inst);
            p.insert("quantity".into(), "quot".into());
            rows.push(ResultRow::new(p, &q, Some(tag), Verdict::from_bool(q == expected)));

            let reduced = &q * &factor;
            let mut p = cell_params(&inst);
            p.insert("quantity".into(), "reduced".into());
            p.insert("m_alpha".into(), m_alpha.into());
            rows.push(ResultRow::new(p, &reduced, Some(tag), Verdict::from_bool(reduced == expected_reduced)));
        }
    }
    Ok(Report::new("localize", a, rows))
}

pub fn verify(a: &VerifyArgs) -> anyhow::Result<Report<&VerifyArgs>> {
    let rows = match a.suite {
        Suite::Lemmas => standard_reports()?.iter().flat_map(|r| r.rows()).collect(),
        Suite::Consistency => consistency(a.genus.unwrap_or(3))?,
        Suite::Routes => routes(a)?,
        Suite::Invariance => invariance(a)?,
        Suite::Golden => {
            let text = match &a.golden {
                Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
                None => BUILTIN_GOLDEN.to_owned(),
            };
            golden(&text)?
        }
    };
    Ok(Report::new(format!("verify {}", suite_name(a.suite)), a, rows))
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Lemmas => "lemmas",
        Suite::Consistency => "consistency",
        Suite::Routes => "routes",
        Suite::Golden => "golden",
        Suite::Invariance => "invariance",
    }
}

fn consistency(max_genus: u32) -> anyhow::Result<Vec<ResultRow>> {
    let mut rows = vec![];
    for g in 1..=max_genus {
        let sign = if g % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        for (ma, n) in admissible_exponents(g) {
            let main = intersect_main(g, ma, n)?;
            let (m, factor) = reduction_prefactor(g, ma, n)?;
            let red = rhs_red(g, m, n)?;
            let p = params! {"check" => "triangle", "g" => g, "m_alpha" => ma, "n" => n};
            rows.push(ResultRow::new(p, &main, Some("closed"), Verdict::from_bool(main == &factor * &red)));
            for d in [2 * g - 1, 2 * g + 1] {
                let chain = collapse_chain(g, m, n, d)?;
                let ok = chain.consistent() && red == &sign * &chain.pre_collapse;
                let p = params! {"check" => "collapse", "g" => g, "m" => m, "n" => n, "d" => d};
                rows.push(ResultRow::new(p, &chain.pre_collapse, Some("closed"), Verdict::from_bool(ok)));
            }
        }
        for m in g..=4 * g - 3 {
            let v = multinomial_collapse(g, m);
            let p = params! {"check" => "multinomial", "g" => g, "m" => m};
            rows.push(ResultRow::new(p, &v, None, Verdict::from_bool(v == Rational::from_integer(1.into()))));
        }
    }
    Ok(rows)
}

fn routes(a: &VerifyArgs) -> anyhow::Result<Vec<ResultRow>> {
    let g = a.genus.unwrap_or(1);
    let m = a.alpha_exp.unwrap_or((4 * g).saturating_sub(3));
    let n = beta_exponent(g, m)?;
    let (ns, ds) = grid_defaults(g, &a.big_n, &a.d);
    let mut rows = vec![];
    for &big_n in &ns {
        for &d in &ds {
            let inst = match cell(g, m, n, big_n, d, a.allow_small_n) {
                Ok(i) => i,
                Err(why) => {
                    rows.push(skipped_row(g, m, n, big_n, d, why));
                    continue;
                }
            };
            let cmp = compare_routes(&inst)?;
            rows.push(ResultRow::new(cell_params(&inst), &cmp.route_a, Some("a"), Verdict::Info));
            for (norm, value, _) in &cmp.candidates {
                let mut p = cell_params(&inst);
                p.insert("normalization".into(), norm.to_string().into());
                let v = value.as_ref().map_or_else(|| "irrational".to_owned(), render);
                rows.push(ResultRow::text(p, v, Some("b"), Verdict::Info));
            }
            let matching: Vec<String> = cmp.matching().iter().map(|n| n.to_string()).collect();
            let mut p = cell_params(&inst);
            p.insert("selected".into(), SELECTED_NORMALIZATION.to_string().into());
            p.insert("matching".into(), matching.join("|").into());
            let ok = cmp.matching() == [SELECTED_NORMALIZATION];
            rows.push(ResultRow::new(p, &cmp.route_a, Some("b"), Verdict::from_bool(ok)));
        }
    }
    Ok(rows)
}

fn invariance(a: &VerifyArgs) -> anyhow::Result<Vec<ResultRow>> {
    let grids: Vec<(u32, Vec<u64>, Vec<u32>)> = match a.genus {
        Some(g) => {
            let ns = if a.big_n.is_empty() { vec![smallest_prime_at_least(2 * g as u64 + 1)] } else { a.big_n.clone() };
            let base = (2 * g).saturating_sub(1).max(1);
            let ds = if a.d.is_empty() { vec![base, base + 2] } else { a.d.clone() };
            vec![(g, ns, ds)]
        }
        None => vec![(1, vec![3, 5, 7], vec![1, 3]), (2, vec![5, 7], vec![3, 5])],
    };
    let mut rows = vec![];
    for (g, ns, ds) in grids {
        let ms: Vec<u32> = match a.alpha_exp {
            Some(m) => vec![m],
            None => (g..=4 * g - 3).filter(|m| (4 * g - 3 - m) % 2 == 0).collect(),
        };
        for m in ms {
            let n = beta_exponent(g, m)?;
            let expected = rhs_red(g, m, n)?;
            for &big_n in &ns {
                for &d in &ds {
                    match cell(g, m, n, big_n, d, a.allow_small_n) {
                        Ok(inst) => {
                            let q = quot_localized(&inst, Route::A)?;
                            rows.push(ResultRow::new(cell_params(&inst), &q, Some("a"), Verdict::from_bool(q == expected)));
                        }
                        Err(why) => rows.push(skipped_row(g, m, n, big_n, d, why)),
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Deserialize)]
struct Golden {
    intersect: Vec<GoldenIntersect>,
    red: Vec<GoldenRed>,
    localize: Vec<GoldenLocalize>,
}

#[derive(Debug, Deserialize)]
struct GoldenIntersect {
    g: u32,
    m_alpha: u32,
    n: u32,
    #[serde(default)]
    psi: Vec<u32>,
    value: String,
}

#[derive(Debug, Deserialize)]
struct GoldenRed {
    g: u32,
    m: u32,
    n: u32,
    value: String,
}

#[derive(Debug, Deserialize)]
struct GoldenLocalize {
    g: u32,
    m: u32,
    n: u32,
    #[serde(rename = "N")]
    big_n: u64,
    d: u32,
    value: String,
}

fn golden_value(s: &str) -> anyhow::Result<Rational> {
    parse_rational(s).with_context(|| format!("golden value {s:?} is not a rational"))
}

fn golden(text: &str) -> anyhow::Result<Vec<ResultRow>> {
    let golden: Golden = serde_json::from_str(text).context("parsing golden vectors")?;
    let mut rows = vec![];
    for e in &golden.intersect {
        let want = golden_value(&e.value)?;
        let got = intersect_psi(&IntersectionQuery::new(e.g, e.m_alpha, e.n, e.psi.clone()))?;
        let mut p = params! {"table" => "intersect", "g" => e.g, "m_alpha" => e.m_alpha, "n" => e.n};
        if !e.psi.is_empty() {
            p.insert("psi_pairs".into(), e.psi.iter().sum::<u32>().into());
        }
        rows.push(ResultRow::new(p, &got, Some("closed"), Verdict::from_bool(got == want)));
    }
    for e in &golden.red {
        let want = golden_value(&e.value)?;
        let got = rhs_red(e.g, e.m, e.n)?;
        let p = params! {"table" => "red", "g" => e.g, "m" => e.m, "n" => e.n};
        rows.push(ResultRow::new(p, &got, Some("closed"), Verdict::from_bool(got == want)));
    }
    for e in &golden.localize {
        let want = golden_value(&e.value)?;
        let inst = ProblemInstance::new(e.g, e.m, e.n, e.big_n, e.d)?;
        let got = quot_localized(&inst, Route::A)?;
        let mut p = cell_params(&inst);
        p.insert("table".into(), "localize".into());
        rows.push(ResultRow::new(p, &got, Some("a"), Verdict::from_bool(got == want)));
    }
    Ok(rows)
}

pub fn table(a: &TableArgs) -> anyhow::Result<Report<&TableArgs>> {
    let mut rows = vec![];
    for g in 1..=a.max_genus {
        let max_p = if a.psi { g - 1 } else { 0 };
        for p in 0..=max_p {
            for (ma, n) in admissible_exponents(g - p) {
                let value = intersect_psi(&IntersectionQuery::new(g, ma, n, vec![1; p as usize]))?;
                let prm = params! {"g" => g, "m_alpha" => ma, "n" => n, "psi_pairs" => p};
                rows.push(ResultRow::new(prm, &value, Some("closed"), Verdict::Info));
            }
        }
    }
    Ok(Report::new("table", a, rows))
}
