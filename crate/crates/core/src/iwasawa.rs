//! Iwasawa invariants of a tower and the reduced Stickelberger element.
//!
//! `fit_invariants` recovers `(mu, lambda, nu)` in `e_m = mu p^m + lambda m + nu`
//! exactly from observed exponents. `stickelberger` takes the determinant of
//! the voltage Laplacian in `Z[x, x^-1]`; monomials `x^k` are units there, so
//! `p` divides it in the Iwasawa algebra exactly when `p` divides every
//! coefficient, and the verdict reduces to the p-adic valuation of the content.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::arith::{check_prime, valuation};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::par::Execution;
use crate::tower::{analyze_tower, TowerReport, TowerSpec};
use crate::voltage::{voltage_laplacian, VoltageAssignment, DEFAULT_MAX_VERTICES};

/// Fewest observed levels a fit accepts: three unknowns plus one check.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IwasawaFit {
    pub mu: u64,
    pub lambda: u64,
    pub nu: i64,
    pub m0: u32,
    /// Observed levels `m >= m0`, all matched exactly.
    pub verified_levels: usize,
}

impl IwasawaFit {
    pub fn predict(&self, p: u64, m: u32) -> Option<i128> {
        let pm = (p as i128).checked_pow(m)?;
        (self.mu as i128)
            .checked_mul(pm)?
            .checked_add(self.lambda as i128 * m as i128)?
            .checked_add(self.nu as i128)
    }
}

/// Parameters implied by the three points at `m0, m0 + 1, m0 + 2`.
fn solve_at(e: &[u64], p: u64, m0: usize) -> std::result::Result<(u64, u64, i64), String> {
    let p = p as i128;
    let pm = p
        .checked_pow(m0 as u32)
        .ok_or_else(|| format!("p^{m0} overflows"))?;
    let at = |m: usize| e[m] as i128;
    let d0 = at(m0 + 1) - at(m0);
    let d1 = at(m0 + 2) - at(m0 + 1);
    let second = d1 - d0;
    let denom = pm * (p - 1) * (p - 1);
    if second < 0 || second % denom != 0 {
        return Err(format!(
            "second difference {second} at m0={m0} is not a nonnegative multiple of {denom}"
        ));
    }
    let mu = second / denom;
    let lambda = d0 - mu * pm * (p - 1);
    if lambda < 0 {
        return Err(format!("lambda = {lambda} < 0 at m0={m0}"));
    }
    let nu = at(m0) - mu * pm - lambda * m0 as i128;
    let nu = i64::try_from(nu).map_err(|_| format!("nu = {nu} out of range"))?;
    Ok((mu as u64, lambda as u64, nu))
}

fn residuals(e: &[u64], p: u64, m0: usize, (mu, lambda, nu): (u64, u64, i64)) -> Option<Vec<i128>> {
    let fit = IwasawaFit {
        mu,
        lambda,
        nu,
        m0: m0 as u32,
        verified_levels: 0,
    };
    (m0..e.len())
        .map(|m| Some(e[m] as i128 - fit.predict(p, m as u32)?))
        .collect()
}

/// Exact fit of `e_m = mu p^m + lambda m + nu`, searching the smallest `m0`
/// that leaves at least four points.
pub fn fit_invariants(e: &[u64], p: u64) -> Result<IwasawaFit> {
    check_prime(p)?;
    if e.len() < MIN_FIT_POINTS {
        return Err(Error::NonConformingFit {
            reason: format!("need at least {MIN_FIT_POINTS} levels, got {}", e.len()),
            residuals: Vec::new(),
        });
    }
    let last_m0 = e.len() - MIN_FIT_POINTS;
    let mut diagnostics = (String::new(), Vec::new());
    for m0 in 0..=last_m0 {
        match solve_at(e, p, m0) {
            Ok(params) => {
                let Some(res) = residuals(e, p, m0, params) else {
                    diagnostics = (format!("prediction overflows at m0={m0}"), Vec::new());
                    continue;
                };
                if res.iter().all(|&r| r == 0) {
                    let (mu, lambda, nu) = params;
                    return Ok(IwasawaFit {
                        mu,
                        lambda,
                        nu,
                        m0: m0 as u32,
                        verified_levels: e.len() - m0,
                    });
                }
                diagnostics = (
                    format!(
                        "tail from m0={m0} misses mu={}, lambda={}, nu={}",
                        params.0, params.1, params.2
                    ),
                    res,
                );
            }
            Err(reason) => diagnostics = (reason, Vec::new()),
        }
    }
    Err(Error::NonConformingFit {
        reason: diagnostics.0,
        residuals: diagnostics.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Zero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Unbounded => "unbounded",
            Verdict::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StickelbergerReport {
    pub theta: Laurent,
    /// `None` stands for an infinite valuation (`theta = 0`).
    #[serde(serialize_with = "ser_valuation")]
    pub content_valuation: Option<u32>,
    pub verdict: Verdict,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_reductions"
    )]
    pub level_reductions: Option<BTreeMap<u32, Laurent>>,
}

fn ser_valuation<S: Serializer>(v: &Option<u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_u32(*v),
        None => s.serialize_str("inf"),
    }
}

fn ser_reductions<S: Serializer>(
    r: &Option<BTreeMap<u32, Laurent>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let r = r.as_ref().expect("skipped when absent");
    let mut map = s.serialize_map(Some(r.len()))?;
    for (m, t) in r {
        map.serialize_entry(&m.to_string(), t)?;
    }
    map.end()
}

impl StickelbergerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn verdict_for(content_valuation: Option<u32>) -> Verdict {
    match content_valuation {
        None => Verdict::Zero,
        Some(0) => Verdict::Bounded,
        Some(_) => Verdict::Unbounded,
    }
}

pub fn stickelberger(va: &VoltageAssignment) -> StickelbergerReport {
    stickelberger_with(va, None, Execution::default())
}

/// Like [`stickelberger`], also reducing `theta` modulo `x^{p^m} - 1` for
/// every `m <= max_level` when given.
pub fn stickelberger_with(
    va: &VoltageAssignment,
    max_level: Option<u32>,
    execution: Execution,
) -> StickelbergerReport {
    let theta = voltage_laplacian(va).determinant_with(execution);
    let content_valuation = theta.content_valuation(va.prime());
    let level_reductions = max_level.map(|top| {
        (0..=top)
            .map_while(|m| va.prime().checked_pow(m).map(|pm| (m, theta.fold(pm))))
            .collect()
    });
    StickelbergerReport {
        verdict: verdict_for(content_valuation),
        theta,
        content_valuation,
        level_reductions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankCheckOutcome {
    Pass,
    Fail,
    Inconclusive,
}

/// Observed p-ranks against the Stickelberger verdict. A finite window can
/// only suggest the limiting behaviour; `finite_sample_proxy` is always set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub outcome: RankCheckOutcome,
    pub verdict: Verdict,
    pub ranks: Vec<usize>,
    pub finite_sample_proxy: bool,
    pub note: String,
}

pub fn rank_trajectory_check(report: &TowerReport, sr: &StickelbergerReport) -> RankCheck {
    let ranks = report.p_ranks();
    let make = |outcome, note: String| RankCheck {
        outcome,
        verdict: sr.verdict,
        ranks: ranks.clone(),
        finite_sample_proxy: true,
        note,
    };
    if ranks.len() < 3 {
        return make(
            RankCheckOutcome::Inconclusive,
            format!("{} connected levels observed, need 3", ranks.len()),
        );
    }
    let (prev, last) = (ranks[ranks.len() - 2], ranks[ranks.len() - 1]);
    match sr.verdict {
        Verdict::Zero => make(
            RankCheckOutcome::Inconclusive,
            "theta vanishes; no rank prediction".into(),
        ),
        Verdict::Bounded if prev == last => {
            make(RankCheckOutcome::Pass, format!("p-rank stable at {last}"))
        }
        Verdict::Bounded => make(
            RankCheckOutcome::Fail,
            format!("p-rank moved {prev} -> {last} although theta is prime to p"),
        ),
        Verdict::Unbounded if last > prev => make(
            RankCheckOutcome::Pass,
            format!("p-rank grew {prev} -> {last}"),
        ),
        Verdict::Unbounded => make(
            RankCheckOutcome::Fail,
            format!("p-rank {prev} -> {last} did not grow although p divides theta"),
        ),
    }
}

/// `(mu, lambda)` predicted for the single-voltage tower over `K_n`:
/// `mu = v_p((n - 2) n^(n - 3))`, `lambda = 1`.
pub fn example1_expected(n: usize, p: u64) -> Result<(u64, u64)> {
    check_prime(p)?;
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "complete graph needs n >= 3, got {n}"
        )));
    }
    let value = BigInt::from(n - 2) * num_traits::pow(BigInt::from(n), n - 3);
    let mu = valuation(&value, p).expect("(n - 2) n^(n - 3) > 0 for n >= 3");
    Ok((u64::from(mu), 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceCheck {
    pub m: u32,
    pub observed: i128,
    pub predicted: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Example1Verdict {
    pub n: usize,
    pub p: u64,
    pub levels: u32,
    pub exponents: Vec<u64>,
    pub expected_mu: u64,
    pub expected_lambda: u64,
    /// Present when at least four levels were available.
    pub fitted: Option<IwasawaFit>,
    /// `e_{m+1} - e_m` against `mu p^m (p - 1) + lambda`, used when too few
    /// levels exist for a fit.
    pub difference_checks: Vec<DifferenceCheck>,
    pub pass: bool,
}

impl fmt::Display for Example1Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let (mu, lambda) = (self.expected_mu, self.expected_lambda);
        match &self.fitted {
            Some(fit) => write!(
                f,
                "{status}: μ={} λ={} (expected μ={mu} λ={lambda}); ν={} m0={}",
                fit.mu, fit.lambda, fit.nu, fit.m0
            ),
            None if !self.difference_checks.is_empty() => {
                let diffs: Vec<String> = self
                    .difference_checks
                    .iter()
                    .map(|d| format!("{}/{}", d.observed, d.predicted))
                    .collect();
                write!(
                    f,
                    "{status}: first differences (observed/predicted) {} with μ={mu} λ={lambda}",
                    diffs.join(", ")
                )
            }
            None => write!(
                f,
                "{status}: no fit (expected μ={mu} λ={lambda}); exponents {:?}",
                self.exponents
            ),
        }
    }
}

pub fn verify_example1(n: usize, p: u64, max_level: u32) -> Result<Example1Verdict> {
    verify_example1_with(n, p, max_level, DEFAULT_MAX_VERTICES, Execution::default())
}

pub fn verify_example1_with(
    n: usize,
    p: u64,
    max_level: u32,
    max_vertices: usize,
    execution: Execution,
) -> Result<Example1Verdict> {
    let (expected_mu, expected_lambda) = example1_expected(n, p)?;
    let va = VoltageAssignment::single_voltage_complete(n, p)?;
    let spec = TowerSpec {
        max_vertices,
        execution,
        ..TowerSpec::new(va, max_level)
    };
    let report = analyze_tower(&spec)?;
    if let Some(level) = report.truncated_at_level {
        let vertices = crate::voltage::level_vertices(n, p, level).unwrap_or(u128::MAX);
        return Err(Error::SizeGuard {
            level,
            vertices,
            limit: max_vertices,
        });
    }
    let exponents = report.exponents();
    if exponents.len() != report.levels.len() {
        return Err(Error::Disconnected);
    }
    let mut verdict = Example1Verdict {
        n,
        p,
        levels: max_level,
        exponents: exponents.clone(),
        expected_mu,
        expected_lambda,
        fitted: None,
        difference_checks: Vec::new(),
        pass: false,
    };
    if exponents.len() >= MIN_FIT_POINTS {
        if let Ok(fit) = fit_invariants(&exponents, p) {
            verdict.pass = fit.mu == expected_mu && fit.lambda == expected_lambda;
            verdict.fitted = Some(fit);
        }
        return Ok(verdict);
    }
    verdict.difference_checks = difference_checks(&exponents, p, expected_mu, expected_lambda);
    verdict.pass = !verdict.difference_checks.is_empty()
        && verdict
            .difference_checks
            .iter()
            .all(|d| d.observed == d.predicted);
    Ok(verdict)
}

/// `e_{m+1} - e_m` against `mu p^m (p - 1) + lambda` for every consecutive pair.
pub fn difference_checks(e: &[u64], p: u64, mu: u64, lambda: u64) -> Vec<DifferenceCheck> {
    e.windows(2)
        .enumerate()
        .map(|(m, w)| DifferenceCheck {
            m: m as u32,
            observed: w[1] as i128 - w[0] as i128,
            predicted: mu as i128 * (p as i128).pow(m as u32) * (p as i128 - 1) + lambda as i128,
        })
        .collect()
}
