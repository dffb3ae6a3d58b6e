// SPDX-License-Identifier: Apache-2.0
//! Static timing: longest paths, closed-form latency expressions for the
//! seventeen reference 32-bit adders, comparison reports and the hybrid
//! configuration sweep.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::delay::{DelayTable, Time};
use crate::generators::{gen_hybrid_rca, AdderSpec, GenError};
use crate::netlist::{gate_census, validate, GateKind, Netlist, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimingError {
    #[error("netlist is not structurally valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetlist(Vec<Violation>),
    #[error("unknown adder legend {0:?} (expected Adder1..Adder17)")]
    UnknownLegend(String),
    #[error("sweep width must be at least 2, got {0}")]
    WidthTooSmall(usize),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Sum of gate delays: `Σ coefficients[k]·T_k`, plus one buffer and one
/// register delay when the flags are set.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LatencyExpr {
    pub coefficients: BTreeMap<GateKind, u64>,
    pub includes_buffer: bool,
    pub includes_register: bool,
}

impl LatencyExpr {
    pub fn new(terms: &[(GateKind, u64)], includes_buffer: bool, includes_register: bool) -> Self {
        let mut e = Self {
            includes_buffer,
            includes_register,
            ..Self::default()
        };
        for &(k, c) in terms {
            e.add(k, c);
        }
        e
    }

    pub fn add(&mut self, kind: GateKind, count: u64) {
        if count > 0 {
            *self.coefficients.entry(kind).or_default() += count;
        }
    }

    pub fn coefficient(&self, kind: GateKind) -> u64 {
        self.coefficients.get(&kind).copied().unwrap_or(0)
    }

    pub fn evaluate(&self, d: &DelayTable) -> Time {
        let body: Time = self.coefficients.iter().map(|(&k, &c)| c * d.get(k)).sum();
        body + if self.includes_buffer { d.get(GateKind::BUF) } else { 0 }
            + if self.includes_register { d.register() } else { 0 }
    }

    /// Same gate multiset, ignoring the buffer and register flags.
    pub fn same_coefficients(&self, other: &LatencyExpr) -> bool {
        self.coefficients == other.coefficients
    }
}

impl fmt::Display for LatencyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if self.includes_buffer {
            terms.push("T_BUF".to_string());
        }
        if self.includes_register {
            terms.push("T_REG".to_string());
        }
        for (k, &c) in &self.coefficients {
            let name = if *k == GateKind::C2 { "CE2" } else { k.name() };
            terms.push(if c == 1 {
                format!("T_{name}")
            } else {
                format!("{c}T_{name}")
            });
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPath {
    pub value: Time,
    /// Gate ids from the first gate after a primary input to the gate
    /// driving the end point.
    pub path: Vec<String>,
    pub expr: LatencyExpr,
}

/// Longest path from any primary input to any output-pair rail (or to
/// `ackout` when the netlist has no output pairs). BUF gates on the path
/// set `includes_buffer`; a leading register C-element sets
/// `includes_register`; every other gate adds to the coefficients. Among
/// equally long paths the lexicographically smallest id sequence wins.
pub fn critical_path(n: &Netlist, d: &DelayTable) -> Result<CriticalPath, TimingError> {
    let violations = validate(n);
    if !violations.is_empty() {
        return Err(TimingError::InvalidNetlist(violations));
    }
    let order = n.topo_order().expect("validated netlist is acyclic");
    // net -> (arrival, gate indices of the best path)
    let mut best: BTreeMap<&str, (Time, Vec<usize>)> = BTreeMap::new();
    for net in n.primary_input_nets() {
        best.insert(net, (0, Vec::new()));
    }
    let better = |a: &(Time, Vec<usize>), b: &(Time, Vec<usize>)| -> bool {
        a.0 > b.0 || (a.0 == b.0 && ids(n, &a.1) < ids(n, &b.1))
    };
    for gi in order {
        let g = &n.gates[gi];
        let mut pick: Option<&(Time, Vec<usize>)> = None;
        for i in &g.inputs {
            let cand = &best[i.as_str()];
            if pick.is_none_or(|p| better(cand, p)) {
                pick = Some(cand);
            }
        }
        let (t, p) = pick.expect("gates have inputs");
        let mut path = p.clone();
        path.push(gi);
        best.insert(&g.out, (t + d.get(g.kind), path));
    }

    let ends: Vec<&str> = if n.outputs.is_empty() {
        n.ackout().into_iter().collect()
    } else {
        n.outputs.iter().flat_map(|p| p.rails()).collect()
    };
    let mut top: Option<&(Time, Vec<usize>)> = None;
    for e in ends {
        let cand = &best[e];
        if top.is_none_or(|t| better(cand, t)) {
            top = Some(cand);
        }
    }
    let (value, path) = top.cloned().unwrap_or((0, Vec::new()));

    let mut expr = LatencyExpr::default();
    for (k, &gi) in path.iter().enumerate() {
        let g = &n.gates[gi];
        if k == 0 && n.is_register(g) {
            expr.includes_register = true;
        } else if g.kind == GateKind::BUF {
            expr.includes_buffer = true;
        } else {
            expr.add(g.kind, 1);
        }
    }
    Ok(CriticalPath {
        value,
        path: path.iter().map(|&gi| n.gates[gi].id.clone()).collect(),
        expr,
    })
}

fn ids<'a>(n: &'a Netlist, path: &[usize]) -> Vec<&'a str> {
    path.iter().map(|&gi| n.gates[gi].id.as_str()).collect()
}

/// One of the seventeen reference 32-bit adders, `Adder1`..`Adder17`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdderLegend(u8);

impl AdderLegend {
    pub const PROPOSED: AdderLegend = AdderLegend(11);

    pub fn new(number: u8) -> Option<Self> {
        (1..=17).contains(&number).then_some(Self(number))
    }

    pub fn all() -> impl Iterator<Item = AdderLegend> {
        (1..=17).map(AdderLegend)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Architecture; encoding and redundancy; timing model.
    pub fn description(self) -> &'static str {
        LEGENDS[self.index()].0
    }

    /// Reference post-layout latency in nanoseconds.
    pub fn practical_latency_ns(self) -> f64 {
        LEGENDS[self.index()].1
    }

    pub fn latency_expr(self) -> LatencyExpr {
        LatencyExpr::new(FORMULAS[self.index()], true, true)
    }

    /// Generator configuration for the legends this crate can build.
    pub fn adder_spec(self) -> Option<AdderSpec> {
        let spec = match self.0 {
            1 => AdderSpec::new(32, 32, true),
            5 => AdderSpec::new(32, 0, false),
            6 => AdderSpec::new(32, 0, true),
            11 => AdderSpec::new(32, 2, true),
            12 => AdderSpec::new(32, 4, true),
            _ => return None,
        };
        Some(spec.expect("fixed legend configurations are legal"))
    }

    fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl fmt::Display for AdderLegend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Adder{}", self.0)
    }
}

impl FromStr for AdderLegend {
    type Err = TimingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t
            .strip_prefix("Adder")
            .or_else(|| t.strip_prefix("adder"))
            .unwrap_or(t);
        digits
            .parse::<u8>()
            .ok()
            .and_then(AdderLegend::new)
            .ok_or_else(|| TimingError::UnknownLegend(s.to_string()))
    }
}

const LEGENDS: [(&str, f64); 17] = [
    ("RCA; Homogeneous, Redundant logic; Early output", 3.10),
    ("RCA; Heterogeneous, No redundancy; Weak-indication", 7.06),
    ("RCA; Homogeneous, No redundancy; Weak-indication", 4.12),
    ("RCA; Homogeneous, Redundant logic; Weak-indication", 2.84),
    ("RCA; Homogeneous, No redundancy; Early output", 4.01),
    ("RCA; Homogeneous, Redundant logic; Early output", 2.21),
    ("RCA; Heterogeneous, No redundancy; Weak-indication", 4.36),
    ("RCA; Heterogeneous, Redundant logic; Weak-indication", 3.03),
    ("RCA; Heterogeneous, No redundancy; Early output", 4.22),
    ("RCA; Heterogeneous, Redundant logic; Early output", 2.38),
    ("Hybrid RCA; Homogeneous, Redundant logic; 15 DAFAs and 2 SAFAs; Early output", 2.14),
    ("Hybrid RCA; Homogeneous, Redundant logic; 14 DAFAs and 4 SAFAs; Early output", 2.21),
    ("CLA; Homogeneous; Weak-indication", 3.31),
    ("CLA-RCA; Homogeneous; Weak-indication", 3.08),
    ("CLA; Homogeneous; Early output", 2.77),
    ("CLA-RCA; Homogeneous; Early output", 2.54),
    ("CSLA; Homogeneous; Early output", 2.46),
];

use GateKind::{AND2, AND4, AO21, AO22, C2, OR2, OR3, OR4};

const FORMULAS: [&[(GateKind, u64)]; 17] = [
    &[(AO22, 32), (C2, 1), (OR2, 1)],
    &[(C2, 32), (OR2, 33)],
    &[(C2, 16), (AND4, 1), (OR4, 1), (OR3, 1), (OR2, 15)],
    &[(C2, 1), (AND4, 1), (AND2, 15), (OR4, 1), (OR3, 1), (OR2, 15)],
    &[(C2, 16), (AND4, 1), (OR4, 1), (OR3, 1), (OR2, 15)],
    &[(AO21, 15), (C2, 1), (AND4, 1), (OR4, 1), (OR3, 1)],
    &[(C2, 17), (OR2, 18)],
    &[(C2, 2), (AND2, 15), (OR2, 18)],
    &[(AO22, 1), (C2, 16), (OR2, 17)],
    &[(AO21, 15), (C2, 1), (AND2, 1), (OR4, 1), (OR2, 1)],
    &[(AO22, 3), (AO21, 14), (C2, 1), (OR3, 1)],
    &[(AO22, 5), (AO21, 13), (C2, 1), (OR3, 1)],
    &[(C2, 12), (AO22, 3), (AND4, 1), (OR4, 2), (OR2, 8)],
    &[(C2, 11), (AO22, 3), (AND4, 1), (OR4, 2), (OR2, 7)],
    &[(C2, 12), (AO22, 1), (OR2, 9)],
    &[(C2, 11), (AO22, 1), (OR2, 8)],
    &[(C2, 6), (AO22, 9), (OR2, 3)],
];

pub fn latency_expr_table() -> BTreeMap<AdderLegend, LatencyExpr> {
    AdderLegend::all().map(|l| (l, l.latency_expr())).collect()
}

/// Published reductions of the proposed adder against other legends, in
/// percent. The report recomputes them and flags disagreements.
const CLAIMED_REDUCTIONS: [(u8, f64); 6] = [
    (1, 31.0),
    (13, 35.3),
    (14, 30.5),
    (15, 20.2),
    (16, 18.7),
    (17, 13.0),
];

/// Largest gap, in percentage points, between a recomputed and a claimed
/// reduction that still counts as agreement.
pub const REDUCTION_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportSource {
    /// Evaluate every latency expression under this table.
    Formula(DelayTable),
    /// Use the embedded reference latencies (ns).
    Practical,
}

impl ReportSource {
    pub fn label(&self) -> &'static str {
        match self {
            ReportSource::Formula(_) => "formula",
            ReportSource::Practical => "practical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub legend: String,
    pub description: String,
    pub latency: f64,
    /// Latency divided by the proposed adder's latency.
    pub normalized: f64,
    /// `(L_X - L_11) / L_X` in percent.
    pub reduction_vs_adder11_percent: f64,
    pub source: String,
    pub claimed_reduction_percent: Option<f64>,
    pub discrepancy: bool,
    /// Gate count of the generated netlist. An area proxy only.
    pub gate_count_proxy: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub source: String,
    pub time_unit: String,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn row(&self, legend: AdderLegend) -> Option<&CompareRow> {
        let name = legend.to_string();
        self.rows.iter().find(|r| r.legend == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "legend",
            "description",
            "latency",
            "normalized",
            "reduction_vs_adder11_percent",
            "source",
        ])
        .expect("in-memory write");
        let practical = self.source == "practical";
        for r in &self.rows {
            let latency = if practical {
                format!("{:.2}", r.latency)
            } else {
                format!("{}", r.latency)
            };
            w.write_record([
                r.legend.clone(),
                r.description.clone(),
                latency,
                format!("{:.3}", r.normalized),
                format!("{:.1}", r.reduction_vs_adder11_percent),
                r.source.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Latency of every selected legend (all when `only` is `None`), normalized
/// to Adder11 and with the proposed adder's reduction against each.
pub fn compare_report(source: &ReportSource, only: Option<&[String]>) -> Result<CompareReport, TimingError> {
    let legends: Vec<AdderLegend> = match only {
        None => AdderLegend::all().collect(),
        Some(names) => names.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
    };
    let latency = |l: AdderLegend| -> f64 {
        match source {
            ReportSource::Formula(d) => l.latency_expr().evaluate(d) as f64,
            ReportSource::Practical => l.practical_latency_ns(),
        }
    };
    let base = latency(AdderLegend::PROPOSED);
    let rows = legends
        .into_iter()
        .map(|l| {
            let lat = latency(l);
            let reduction = if l == AdderLegend::PROPOSED {
                0.0
            } else {
                (lat - base) / lat * 100.0
            };
            let claimed = match source {
                ReportSource::Practical => CLAIMED_REDUCTIONS
                    .iter()
                    .find(|(n, _)| *n == l.number())
                    .map(|&(_, c)| c),
                ReportSource::Formula(_) => None,
            };
            CompareRow {
                legend: l.to_string(),
                description: l.description().to_string(),
                latency: lat,
                normalized: if l == AdderLegend::PROPOSED { 1.0 } else { lat / base },
                reduction_vs_adder11_percent: reduction,
                source: source.label().to_string(),
                claimed_reduction_percent: claimed,
                discrepancy: claimed.is_some_and(|c| (c - reduction).abs() > REDUCTION_TOLERANCE),
                gate_count_proxy: l.adder_spec().map(|s| gate_census(&gen_hybrid_rca(s)).total()),
            }
        })
        .collect();
    Ok(CompareReport {
        source: source.label().to_string(),
        time_unit: match source {
            ReportSource::Formula(d) => d.time_unit.clone(),
            ReportSource::Practical => "ns".into(),
        },
        rows,
    })
}

/// Closed-form latency (register included) of a `width`-bit hybrid adder
/// with `safa` single-bit stages at the bottom.
pub fn hybrid_latency_expr(width: usize, safa: usize) -> Result<LatencyExpr, TimingError> {
    let spec = AdderSpec::new(width, safa, true)?;
    let dafa = spec.dafa_stages as u64;
    let s = safa as u64;
    let mut e = LatencyExpr::new(&[], true, true);
    if dafa == 0 {
        e.add(AO22, s);
        e.add(C2, 1);
        e.add(OR2, 1);
    } else {
        if s == 0 {
            e.add(AND4, 1);
            e.add(OR4, 1);
        } else {
            e.add(AO22, s + 1);
        }
        e.add(AO21, dafa - 1);
        e.add(C2, 1);
        e.add(OR3, 1);
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sweep {
    pub width: usize,
    /// `(safa stages, latency)` for every legal configuration, ascending s.
    pub curve: Vec<(usize, Time)>,
    /// All minimizing s values, ascending.
    pub argmin: Vec<usize>,
}

pub fn sweep_hybrid(width: usize, d: &DelayTable) -> Result<Sweep, TimingError> {
    if width < 2 {
        return Err(TimingError::WidthTooSmall(width));
    }
    let curve = AdderSpec::legal_safa_counts(width)
        .into_iter()
        .map(|s| hybrid_latency_expr(width, s).map(|e| (s, e.evaluate(d))))
        .collect::<Result<Vec<_>, _>>()?;
    let min = curve.iter().map(|&(_, t)| t).min().expect("nonempty curve");
    let argmin = curve.iter().filter(|&&(_, t)| t == min).map(|&(s, _)| s).collect();
    Ok(Sweep { width, curve, argmin })
}
