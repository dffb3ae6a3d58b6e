// SPDX-License-Identifier: Apache-2.0
//! Structural circuit model.
//!
//! A [`Netlist`] is a flat list of typed gates connected by named nets,
//! with ordered dual-rail port groups and optional handshake ports. The
//! on-disk form is JSON:
//!
//! ```text
//! {
//!   "name": "safa",
//!   "inputs":  [{"group": "A", "rail1": "A1", "rail0": "A0"}, ...],
//!   "outputs": [{"group": "SUM", "rail1": "SUM1", "rail0": "SUM0"}, ...],
//!   "acks":    {"ackin": "ackin", "ackout": "ackout"},
//!   "gates":   [{"id": "CG1", "kind": "AO22", "in": ["A1", "B1", "A0", "B0"], "out": "CG1"}, ...]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    BUF,
    AND2,
    AND4,
    OR2,
    OR3,
    OR4,
    AO21,
    AO22,
    AO222,
    /// Two-input Muller C-element.
    #[serde(alias = "CE2")]
    C2,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::BUF,
        GateKind::AND2,
        GateKind::AND4,
        GateKind::OR2,
        GateKind::OR3,
        GateKind::OR4,
        GateKind::AO21,
        GateKind::AO22,
        GateKind::AO222,
        GateKind::C2,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::BUF => 1,
            GateKind::AND2 | GateKind::OR2 | GateKind::C2 => 2,
            GateKind::OR3 | GateKind::AO21 => 3,
            GateKind::AND4 | GateKind::OR4 | GateKind::AO22 => 4,
            GateKind::AO222 => 6,
        }
    }

    pub fn is_stateful(self) -> bool {
        self == GateKind::C2
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::BUF => "BUF",
            GateKind::AND2 => "AND2",
            GateKind::AND4 => "AND4",
            GateKind::OR2 => "OR2",
            GateKind::OR3 => "OR3",
            GateKind::OR4 => "OR4",
            GateKind::AO21 => "AO21",
            GateKind::AO22 => "AO22",
            GateKind::AO222 => "AO222",
            GateKind::C2 => "C2",
        }
    }

    /// Next output level given the input levels and the current output.
    ///
    /// `current` only matters for the C-element, which holds its value
    /// while the inputs disagree.
    pub fn eval(self, ins: &[bool], current: bool) -> bool {
        debug_assert_eq!(ins.len(), self.arity());
        match self {
            GateKind::BUF => ins[0],
            GateKind::AND2 | GateKind::AND4 => ins.iter().all(|&b| b),
            GateKind::OR2 | GateKind::OR3 | GateKind::OR4 => ins.iter().any(|&b| b),
            GateKind::AO21 => (ins[0] && ins[1]) || ins[2],
            GateKind::AO22 => (ins[0] && ins[1]) || (ins[2] && ins[3]),
            GateKind::AO222 => (ins[0] && ins[1]) || (ins[2] && ins[3]) || (ins[4] && ins[5]),
            GateKind::C2 => {
                if ins[0] == ins[1] {
                    ins[0]
                } else {
                    current
                }
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown gate kind {0:?}")]
pub struct UnknownGateKind(pub String);

impl FromStr for GateKind {
    type Err = UnknownGateKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        if upper == "CE2" {
            return Ok(GateKind::C2);
        }
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == upper)
            .ok_or_else(|| UnknownGateKind(s.to_string()))
    }
}

/// A named dual-rail signal: `rail1` high encodes 1, `rail0` high encodes 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortGroup {
    pub group: String,
    pub rail1: String,
    pub rail0: String,
}

impl PortGroup {
    pub fn new(group: impl Into<String>, rail1: impl Into<String>, rail0: impl Into<String>) -> Self {
        Self {
            group: group.into(),
            rail1: rail1.into(),
            rail0: rail0.into(),
        }
    }

    pub fn rails(&self) -> [&str; 2] {
        [&self.rail1, &self.rail0]
    }
}

/// Handshake nets of an asynchronous stage.
///
/// Both fields are present on a full stage. A standalone completion
/// detector has only `ackout`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AckPorts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ackin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ackout: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub out: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Netlist {
    pub name: String,
    pub inputs: Vec<PortGroup>,
    pub outputs: Vec<PortGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acks: Option<AckPorts>,
    pub gates: Vec<Gate>,
    /// Dual-rail pairs on internal nets (carries, registered inputs) that
    /// the simulator monitors for illegal codewords. Not part of the file
    /// format.
    #[serde(skip)]
    pub internal_pairs: Vec<PortGroup>,
}

#[derive(Debug, Error)]
pub enum NetlistIoError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed netlist: {0}")]
    Json(#[from] serde_json::Error),
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn ackin(&self) -> Option<&str> {
        self.acks.as_ref().and_then(|a| a.ackin.as_deref())
    }

    pub fn ackout(&self) -> Option<&str> {
        self.acks.as_ref().and_then(|a| a.ackout.as_deref())
    }

    pub fn input(&self, group: &str) -> Option<&PortGroup> {
        self.inputs.iter().find(|p| p.group == group)
    }

    pub fn output(&self, group: &str) -> Option<&PortGroup> {
        self.outputs.iter().find(|p| p.group == group)
    }

    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }

    /// All primary input nets: every input rail plus `ackin`.
    pub fn primary_input_nets(&self) -> BTreeSet<&str> {
        let mut s: BTreeSet<&str> = self
            .inputs
            .iter()
            .flat_map(|p| p.rails())
            .collect();
        s.extend(self.ackin());
        s
    }

    /// All primary output nets: every output rail plus `ackout`.
    pub fn primary_output_nets(&self) -> BTreeSet<&str> {
        let mut s: BTreeSet<&str> = self
            .outputs
            .iter()
            .flat_map(|p| p.rails())
            .collect();
        s.extend(self.ackout());
        s
    }

    /// Every net name referenced anywhere, sorted.
    pub fn nets(&self) -> BTreeSet<&str> {
        let mut s = self.primary_input_nets();
        s.extend(self.primary_output_nets());
        for g in &self.gates {
            s.extend(g.inputs.iter().map(String::as_str));
            s.insert(&g.out);
        }
        s
    }

    /// Register C-elements: C2 gates with one input tied to `ackin`.
    pub fn is_register(&self, gate: &Gate) -> bool {
        match self.ackin() {
            Some(ackin) => gate.kind == GateKind::C2 && gate.inputs.iter().any(|n| n == ackin),
            None => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), NetlistIoError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, NetlistIoError> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text)?)
    }

    /// Gate indices in a topological order, or `None` if the graph is cyclic.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let (order, _) = self.kahn();
        (order.len() == self.gates.len()).then_some(order)
    }

    /// Kahn's algorithm; returns the order found and the gates left over
    /// (which lie on or behind a cycle).
    fn kahn(&self) -> (Vec<usize>, Vec<usize>) {
        let driver: HashMap<&str, usize> = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.out.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.gates.len()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for n in &g.inputs {
                if let Some(&d) = driver.get(n.as_str()) {
                    indegree[i] += 1;
                    succ[d].push(i);
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..self.gates.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &s in &succ[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    queue.push_back(s);
                }
            }
        }
        let rest = (0..self.gates.len()).filter(|&i| indegree[i] > 0).collect();
        (order, rest)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Arity {
        gate: String,
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    DuplicateGateId(String),
    MultipleDrivers {
        net: String,
        drivers: Vec<String>,
    },
    /// A gate drives a primary input net.
    DrivenInput {
        net: String,
        gate: String,
    },
    Undriven(String),
    Dangling(String),
    Cycle(Vec<String>),
    BadPortGroup(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity {
                gate,
                kind,
                expected,
                found,
            } => write!(f, "gate {gate}: {kind} takes {expected} inputs, found {found}"),
            Violation::DuplicateGateId(id) => write!(f, "duplicate gate id {id}"),
            Violation::MultipleDrivers { net, drivers } => {
                write!(f, "net {net} has multiple drivers: {}", drivers.join(", "))
            }
            Violation::DrivenInput { net, gate } => {
                write!(f, "primary input {net} is also driven by gate {gate}")
            }
            Violation::Undriven(n) => write!(f, "net {n} has no driver"),
            Violation::Dangling(n) => write!(f, "net {n} has no fanout and is not an output"),
            Violation::Cycle(gates) => write!(f, "combinational cycle through {}", gates.join(", ")),
            Violation::BadPortGroup(g) => {
                write!(f, "port group {g} must reference two distinct nets")
            }
        }
    }
}

/// Structural check; an empty report means the netlist is valid.
pub fn validate(n: &Netlist) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut ids = BTreeSet::new();
    for g in &n.gates {
        if !ids.insert(g.id.as_str()) {
            out.push(Violation::DuplicateGateId(g.id.clone()));
        }
        if g.inputs.len() != g.kind.arity() {
            out.push(Violation::Arity {
                gate: g.id.clone(),
                kind: g.kind,
                expected: g.kind.arity(),
                found: g.inputs.len(),
            });
        }
    }

    let mut groups = BTreeSet::new();
    for p in n.inputs.iter().chain(&n.outputs) {
        if p.rail1 == p.rail0 || p.rail1.is_empty() || p.rail0.is_empty() {
            out.push(Violation::BadPortGroup(p.group.clone()));
        }
        if !groups.insert((n.inputs.contains(p), p.group.as_str())) {
            out.push(Violation::BadPortGroup(p.group.clone()));
        }
    }

    let inputs = n.primary_input_nets();
    let outputs = n.primary_output_nets();

    let mut drivers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut fanout: BTreeMap<&str, usize> = BTreeMap::new();
    for g in &n.gates {
        drivers.entry(&g.out).or_default().push(&g.id);
        for i in &g.inputs {
            *fanout.entry(i).or_default() += 1;
        }
    }
    for (net, ds) in &drivers {
        if ds.len() > 1 {
            out.push(Violation::MultipleDrivers {
                net: net.to_string(),
                drivers: ds.iter().map(|s| s.to_string()).collect(),
            });
        }
        if inputs.contains(net) {
            out.push(Violation::DrivenInput {
                net: net.to_string(),
                gate: ds[0].to_string(),
            });
        }
    }
    for net in n.nets() {
        if !inputs.contains(net) && !drivers.contains_key(net) {
            out.push(Violation::Undriven(net.to_string()));
        }
        if !outputs.contains(net) && !fanout.contains_key(net) {
            out.push(Violation::Dangling(net.to_string()));
        }
    }

    let (_, cyclic) = n.kahn();
    if !cyclic.is_empty() {
        out.push(Violation::Cycle(
            cyclic.iter().map(|&i| n.gates[i].id.clone()).collect(),
        ));
    }
    out
}

/// Gate counts per kind. Every kind is present, possibly with count zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census(BTreeMap<GateKind, usize>);

impl Census {
    pub fn empty() -> Self {
        Census(GateKind::ALL.into_iter().map(|k| (k, 0)).collect())
    }

    pub fn from_counts(counts: &[(GateKind, usize)]) -> Self {
        let mut c = Self::empty();
        for &(k, v) in counts {
            *c.0.get_mut(&k).unwrap() += v;
        }
        c
    }

    pub fn get(&self, kind: GateKind) -> usize {
        self.0[&kind]
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GateKind, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// Per-kind `self - other`.
    pub fn diff(&self, other: &Census) -> BTreeMap<GateKind, i64> {
        GateKind::ALL
            .into_iter()
            .map(|k| (k, self.get(k) as i64 - other.get(k) as i64))
            .collect()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .filter(|&(_, v)| v > 0)
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        if parts.is_empty() {
            f.write_str("(no gates)")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

pub fn gate_census(n: &Netlist) -> Census {
    let mut c = Census::empty();
    for g in &n.gates {
        *c.0.get_mut(&g.kind).unwrap() += 1;
    }
    c
}
