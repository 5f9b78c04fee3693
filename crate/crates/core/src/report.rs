//! Serializable report records shared by the library and the command line.
//!
//! Rationals never appear as floats: they are rendered `"p/q"` (or `"p"`).
//! Parameter maps are ordered so that serialization is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::Rational;

/// A rational rendered as `"p/q"`, or `"p"` when integral.
pub fn render(r: &Rational) -> String {
    r.to_string()
}

/// Inverse of [`render`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse().ok()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Text(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Param::Int(v)
    }
}
impl From<u32> for Param {
    fn from(v: u32) -> Self {
        Param::Int(v.into())
    }
}
impl From<u64> for Param {
    fn from(v: u64) -> Self {
        Param::Int(v as i64)
    }
}
impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_owned())
    }
}
impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}
impl From<&Rational> for Param {
    fn from(v: &Rational) -> Self {
        Param::Text(render(v))
    }
}

pub type Params = BTreeMap<String, Param>;

/// Build a [`Params`] map from `key => value` pairs.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut p = $crate::report::Params::new();
        $( p.insert(($k).to_string(), $crate::report::Param::from($v)); )*
        p
    }};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// A computed value with nothing to compare it against.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub params: Params,
    pub value: String,
    pub route: Option<String>,
    pub verdict: Verdict,
}

impl ResultRow {
    pub fn new(params: Params, value: &Rational, route: Option<&str>, verdict: Verdict) -> Self {
        Self { params, value: render(value), route: route.map(str::to_owned), verdict }
    }

    /// A row whose value is not a number (a skipped cell, an error message).
    pub fn text(params: Params, value: impl Into<String>, route: Option<&str>, verdict: Verdict) -> Self {
        Self { params, value: value.into(), route: route.map(str::to_owned), verdict }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<C> {
    pub command: String,
    pub config: C,
    pub results: Vec<ResultRow>,
    pub suite_pass: bool,
}

impl<C> Report<C> {
    /// `suite_pass` is derived from the rows: no row may be a failure.
    pub fn new(command: impl Into<String>, config: C, results: Vec<ResultRow>) -> Self {
        let suite_pass = results.iter().all(|r| !r.verdict.is_fail());
        Self { command: command.into(), config, results, suite_pass }
    }
}
