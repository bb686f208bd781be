//! Level-by-level Jacobian data along a cyclic voltage p-tower.
//!
//! Every level is re-derived from the integer voltages rather than lifted
//! from the previous one, so levels are independent and run concurrently.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jacobian::{is_connected, jacobian_with, p_sylow};
use crate::par::{self, Execution};
use crate::voltage::{
    derive_with_limit, level_vertices, DerivedGraph, VoltageAssignment, DEFAULT_MAX_VERTICES,
};

#[derive(Debug, Clone)]
pub struct TowerSpec {
    pub va: VoltageAssignment,
    pub max_level: u32,
    /// Levels whose cover would exceed this many vertices are not computed.
    pub max_vertices: usize,
    /// Keep the full invariant factors and `|J(X_m)|` of every level.
    pub include_total_order: bool,
    pub execution: Execution,
}

impl TowerSpec {
    pub fn new(va: VoltageAssignment, max_level: u32) -> Self {
        TowerSpec {
            va,
            max_level,
            max_vertices: DEFAULT_MAX_VERTICES,
            include_total_order: false,
            execution: Execution::default(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.va.prime()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub m: u32,
    pub vertices: u128,
    pub connected: bool,
    pub e_m: Option<u64>,
    pub p_rank: Option<usize>,
    #[serde(serialize_with = "ser_opt_bigints")]
    pub p_part_factors: Option<Vec<BigInt>>,
    #[serde(
        serialize_with = "ser_opt_bigint",
        skip_serializing_if = "Option::is_none"
    )]
    pub total_order: Option<BigInt>,
    #[serde(
        serialize_with = "ser_opt_bigints",
        skip_serializing_if = "Option::is_none"
    )]
    pub invariant_factors: Option<Vec<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub p: u64,
    pub levels: Vec<LevelRecord>,
    pub first_disconnected_level: Option<u32>,
    /// First level skipped by the size guard.
    pub truncated_at_level: Option<u32>,
}

impl TowerReport {
    /// `e_m` for consecutive levels starting at 0, stopping at the first gap.
    pub fn exponents(&self) -> Vec<u64> {
        self.levels.iter().map_while(|l| l.e_m).collect()
    }

    pub fn p_ranks(&self) -> Vec<usize> {
        self.levels.iter().map_while(|l| l.p_rank).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per level; `p_part_factors` joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "m",
            "vertices",
            "connected",
            "e_m",
            "p_rank",
            "p_part_factors",
            "total_order",
        ])
        .expect("in-memory write");
        let opt = |x: Option<String>| x.unwrap_or_default();
        for l in &self.levels {
            w.write_record([
                l.m.to_string(),
                l.vertices.to_string(),
                l.connected.to_string(),
                opt(l.e_m.map(|e| e.to_string())),
                opt(l.p_rank.map(|r| r.to_string())),
                opt(l.p_part_factors.as_ref().map(|fs| {
                    fs.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(";")
                })),
                opt(l.total_order.as_ref().map(ToString::to_string)),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub fn level_graph(spec: &TowerSpec, m: u32) -> Result<DerivedGraph> {
    if m > spec.max_level {
        return Err(Error::InvalidArgument(format!(
            "level {m} beyond the tower's top level {}",
            spec.max_level
        )));
    }
    derive_with_limit(&spec.va, m, spec.max_vertices)
}

pub fn analyze_tower(spec: &TowerSpec) -> Result<TowerReport> {
    let n = spec.va.base().vertex_count();
    let p = spec.prime();
    let within: Vec<u32> = (0..=spec.max_level)
        .take_while(|&m| level_vertices(n, p, m).is_some_and(|v| v <= spec.max_vertices as u128))
        .collect();
    let truncated_at_level = (within.len() as u32 <= spec.max_level).then_some(within.len() as u32);

    let records: Vec<Result<LevelRecord>> =
        par::map(spec.execution, &within, |&m| analyze_level(spec, m));
    let levels = records.into_iter().collect::<Result<Vec<_>>>()?;

    let first_disconnected_level = levels.iter().find(|l| !l.connected).map(|l| l.m);
    if let (Some(l0), Some(l1)) = (levels.first(), levels.get(1)) {
        if l0.connected && l1.connected {
            if let Some(level) = first_disconnected_level {
                return Err(Error::ConnectivityViolation { level });
            }
        }
    }
    Ok(TowerReport {
        p,
        levels,
        first_disconnected_level,
        truncated_at_level,
    })
}

fn analyze_level(spec: &TowerSpec, m: u32) -> Result<LevelRecord> {
    let d = derive_with_limit(&spec.va, m, spec.max_vertices)?;
    let vertices = d.graph.vertex_count() as u128;
    if !is_connected(&d.graph) {
        return Ok(LevelRecord {
            m,
            vertices,
            connected: false,
            e_m: None,
            p_rank: None,
            p_part_factors: None,
            total_order: None,
            invariant_factors: None,
        });
    }
    let jac = jacobian_with(&d.graph, 1, spec.execution)?;
    let sylow = p_sylow(&jac, spec.prime())?;
    let (total_order, invariant_factors) = if spec.include_total_order {
        (jac.order(), Some(jac.factors))
    } else {
        (None, None)
    };
    Ok(LevelRecord {
        m,
        vertices,
        connected: true,
        e_m: Some(sylow.order_exponent),
        p_rank: Some(sylow.p_rank),
        p_part_factors: Some(sylow.p_part_factors),
        total_order,
        invariant_factors,
    })
}

fn ser_opt_bigints<S: Serializer>(
    xs: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match xs {
        Some(xs) => crate::laurent::ser_bigints(xs, s),
        None => s.serialize_none(),
    }
}

fn ser_opt_bigint<S: Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn triangle_tower_vertex_counts() {
        let va = VoltageAssignment::single_voltage_complete(3, 3).unwrap();
        let report = analyze_tower(&TowerSpec::new(va, 2)).unwrap();
        let counts: Vec<u128> = report.levels.iter().map(|l| l.vertices).collect();
        assert_eq!(counts, vec![3, 9, 27]);
        assert!(report.levels.iter().all(|l| l.connected));
        assert_eq!(report.levels[0].e_m, Some(1));
        assert_eq!(report.first_disconnected_level, None);
        assert_eq!(report.truncated_at_level, None);
    }

    #[test]
    fn zero_voltages_disconnect_level_one() {
        let va = VoltageAssignment::new(Graph::complete(3).unwrap(), 2, []).unwrap();
        let report = analyze_tower(&TowerSpec::new(va, 1)).unwrap();
        assert_eq!(report.first_disconnected_level, Some(1));
        assert_eq!(report.levels[1].e_m, None);
        assert_eq!(report.levels[1].vertices, 6);
        assert_eq!(report.exponents(), vec![0]);
    }

    #[test]
    fn level_zero_matches_base_jacobian() {
        let va = VoltageAssignment::single_voltage_complete(4, 2).unwrap();
        let mut spec = TowerSpec::new(va, 0);
        spec.include_total_order = true;
        let report = analyze_tower(&spec).unwrap();
        assert_eq!(report.levels.len(), 1);
        let l0 = &report.levels[0];
        assert_eq!(l0.total_order, Some(BigInt::from(16)));
        assert_eq!(l0.e_m, Some(4));
        assert_eq!(l0.p_rank, Some(2));
    }

    #[test]
    fn guard_truncates() {
        let va = VoltageAssignment::single_voltage_complete(3, 2).unwrap();
        let mut spec = TowerSpec::new(va, 5);
        spec.max_vertices = 30;
        let report = analyze_tower(&spec).unwrap();
        assert_eq!(report.levels.len(), 4);
        assert_eq!(report.truncated_at_level, Some(4));
        assert!(level_graph(&spec, 4).is_err());
        assert!(level_graph(&spec, 6).is_err());
        assert_eq!(level_graph(&spec, 1).unwrap().graph.vertex_count(), 6);
    }

    #[test]
    fn json_and_csv_shapes() {
        let va = VoltageAssignment::new(Graph::complete(3).unwrap(), 2, []).unwrap();
        let report = analyze_tower(&TowerSpec::new(va, 1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["p"], 2);
        assert_eq!(v["levels"][0]["p_part_factors"], serde_json::json!([]));
        assert_eq!(v["levels"][1]["e_m"], serde_json::Value::Null);
        assert_eq!(v["first_disconnected_level"], 1);
        assert!(v["levels"][0].get("total_order").is_none());
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "m,vertices,connected,e_m,p_rank,p_part_factors,total_order"
        );
        assert_eq!(lines[2], "1,6,false,,,,");
    }
}
