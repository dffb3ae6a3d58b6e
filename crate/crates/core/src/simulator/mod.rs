// SPDX-License-Identifier: Apache-2.0
//! Event-driven gate-level simulation.
//!
//! Every gate has a pure transport delay: an input change that alters the
//! gate's projected output schedules the new level `delay` time units later.
//! Writes that would not change a net are dropped. Events pop in
//! `(time, insertion order)` order, so a run is fully deterministic.
//!
//! A four-phase transaction is simulated as a set phase (valid data applied,
//! run to quiescence) followed by a reset phase (spacer applied to every
//! input, run to quiescence).

mod classify;
mod protocol;
mod vcd_dump;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::codes::{decode_dual_rail, RailPair, RailState};
use crate::delay::{DelayTable, Time};
use crate::netlist::{validate, GateKind, Netlist, Violation};

pub use classify::{classify_indication, ClassifyError, Indication, IndicationReport, Witness};
pub use protocol::{run_protocol, run_protocol_with, InputVector, ProtocolOptions, ProtocolReport};
pub use vcd_dump::write_vcd;

/// Default bound on processed events per run.
pub const DEFAULT_EVENT_BOUND: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("netlist is not structurally valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetlist(Vec<Violation>),
    #[error("no input port group named {0}")]
    UnknownGroup(String),
    #[error("input group {0} has no stimulus")]
    MissingInput(String),
    #[error("event bound of {0} exceeded (oscillation?)")]
    EventBound(u64),
    #[error("netlist has no {0} handshake net")]
    NoHandshake(&'static str),
    #[error("handshake deadlock at vector {vector} during {phase} phase; blocking nets: {}", blocking.join(", "))]
    Deadlock {
        vector: usize,
        phase: Phase,
        blocking: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Idle,
    Set,
    Reset,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Idle => "idle",
            Phase::Set => "set",
            Phase::Reset => "reset",
        })
    }
}

/// One net level change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub time: Time,
    pub net: usize,
    pub level: bool,
}

#[derive(Debug, Clone)]
struct CompiledGate {
    kind: GateKind,
    inputs: Vec<usize>,
    output: usize,
    delay: Time,
}

#[derive(Debug, Clone)]
pub(crate) struct PairIdx {
    pub group: String,
    pub rail1: usize,
    pub rail0: usize,
}

/// Index-based form of a netlist bound to a delay table.
#[derive(Debug)]
pub struct Compiled {
    names: Arc<[String]>,
    index: HashMap<String, usize>,
    gates: Vec<CompiledGate>,
    fanout: Vec<Vec<usize>>,
    pub(crate) inputs: Vec<PairIdx>,
    pub(crate) outputs: Vec<PairIdx>,
    /// Every pair checked for (1,1): inputs, outputs, internal pairs.
    monitored: Vec<PairIdx>,
    pairs_of_net: Vec<Vec<usize>>,
    pub(crate) ackin: Option<usize>,
    pub(crate) ackout: Option<usize>,
}

impl Compiled {
    pub fn new(n: &Netlist, d: &DelayTable) -> Result<Self, SimError> {
        let violations = validate(n);
        if !violations.is_empty() {
            return Err(SimError::InvalidNetlist(violations));
        }
        let names: Vec<String> = n.nets().into_iter().map(str::to_string).collect();
        let index: HashMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let gates: Vec<CompiledGate> = n
            .gates
            .iter()
            .map(|g| CompiledGate {
                kind: g.kind,
                inputs: g.inputs.iter().map(|x| index[x]).collect(),
                output: index[&g.out],
                delay: d.get(g.kind),
            })
            .collect();
        let mut fanout = vec![Vec::new(); names.len()];
        for (gi, g) in gates.iter().enumerate() {
            for &i in &g.inputs {
                if !fanout[i].contains(&gi) {
                    fanout[i].push(gi);
                }
            }
        }
        let pair = |p: &crate::netlist::PortGroup| PairIdx {
            group: p.group.clone(),
            rail1: index[&p.rail1],
            rail0: index[&p.rail0],
        };
        let inputs: Vec<PairIdx> = n.inputs.iter().map(pair).collect();
        let outputs: Vec<PairIdx> = n.outputs.iter().map(pair).collect();
        let mut monitored: Vec<PairIdx> = inputs.iter().chain(&outputs).cloned().collect();
        monitored.extend(
            n.internal_pairs
                .iter()
                .filter(|p| index.contains_key(&p.rail1) && index.contains_key(&p.rail0))
                .map(pair),
        );
        let mut pairs_of_net = vec![Vec::new(); names.len()];
        for (pi, p) in monitored.iter().enumerate() {
            pairs_of_net[p.rail1].push(pi);
            pairs_of_net[p.rail0].push(pi);
        }
        Ok(Self {
            ackin: n.ackin().map(|s| index[s]),
            ackout: n.ackout().map(|s| index[s]),
            names: names.into(),
            index,
            gates,
            fanout,
            inputs,
            outputs,
            monitored,
            pairs_of_net,
        })
    }

    pub fn net_names(&self) -> &Arc<[String]> {
        &self.names
    }

    pub fn net(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn input_index(&self, group: &str) -> Option<usize> {
        self.inputs.iter().position(|p| p.group == group)
    }
}

/// Mutable simulation state over a [`Compiled`] netlist.
#[derive(Debug, Clone)]
pub struct Simulator<'c> {
    c: &'c Compiled,
    levels: Vec<bool>,
    projected: Vec<bool>,
    queue: BinaryHeap<Reverse<(Time, u64, usize, bool)>>,
    seq: u64,
    now: Time,
    pub event_bound: u64,
    transitions: Vec<Transition>,
    phase: Phase,
    monotonic_violations: usize,
    illegal_events: usize,
}

impl<'c> Simulator<'c> {
    pub fn new(c: &'c Compiled) -> Self {
        Self {
            c,
            levels: vec![false; c.names.len()],
            projected: vec![false; c.gates.len()],
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
            event_bound: DEFAULT_EVENT_BOUND,
            transitions: Vec::new(),
            phase: Phase::Idle,
            monotonic_violations: 0,
            illegal_events: 0,
        }
    }

    /// Back to the all-zero state at time 0.
    pub fn reset(&mut self) {
        self.levels.iter_mut().for_each(|l| *l = false);
        self.projected.iter_mut().for_each(|l| *l = false);
        self.queue.clear();
        self.seq = 0;
        self.now = 0;
        self.transitions.clear();
        self.phase = Phase::Idle;
        self.monotonic_violations = 0;
        self.illegal_events = 0;
    }

    pub fn compiled(&self) -> &'c Compiled {
        self.c
    }

    pub fn now(&self) -> Time {
        self.now
    }

    pub fn set_phase(&mut self, p: Phase) {
        self.phase = p;
    }

    pub fn level(&self, net: usize) -> bool {
        self.levels[net]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn monotonic_violations(&self) -> usize {
        self.monotonic_violations
    }

    pub fn illegal_events(&self) -> usize {
        self.illegal_events
    }

    pub(crate) fn pair_state(&self, p: &PairIdx) -> RailState {
        decode_dual_rail(RailPair::new(self.levels[p.rail1], self.levels[p.rail0]))
    }

    pub fn schedule(&mut self, net: usize, level: bool, at: Time) {
        self.queue.push(Reverse((at, self.seq, net, level)));
        self.seq += 1;
    }

    /// Drives input pair `idx` to `value` (`None` = spacer) at time `at`.
    pub fn drive_input(&mut self, idx: usize, value: Option<bool>, at: Time) {
        let (r1, r0) = (self.c.inputs[idx].rail1, self.c.inputs[idx].rail0);
        match value {
            Some(v) => {
                self.schedule(r1, v, at);
                self.schedule(r0, !v, at);
            }
            None => {
                self.schedule(r1, false, at);
                self.schedule(r0, false, at);
            }
        }
    }

    /// Processes events until the queue is empty; returns the time of the
    /// last processed event (or the current time if none).
    pub fn run(&mut self) -> Result<Time, SimError> {
        let mut processed = 0u64;
        while let Some(Reverse((t, _, net, level))) = self.queue.pop() {
            processed += 1;
            if processed > self.event_bound {
                return Err(SimError::EventBound(self.event_bound));
            }
            self.now = t;
            if self.levels[net] == level {
                continue;
            }
            self.levels[net] = level;
            self.transitions.push(Transition { time: t, net, level });
            if Some(net) != self.c.ackin {
                match (self.phase, level) {
                    (Phase::Set, false) | (Phase::Reset, true) => self.monotonic_violations += 1,
                    _ => {}
                }
            }
            if level {
                for &pi in &self.c.pairs_of_net[net] {
                    let p = &self.c.monitored[pi];
                    if self.levels[p.rail1] && self.levels[p.rail0] {
                        self.illegal_events += 1;
                    }
                }
            }
            for fi in 0..self.c.fanout[net].len() {
                let gi = self.c.fanout[net][fi];
                let g = &self.c.gates[gi];
                let mut ins = [false; 6];
                for (k, &i) in g.inputs.iter().enumerate() {
                    ins[k] = self.levels[i];
                }
                let next = g.kind.eval(&ins[..g.inputs.len()], self.projected[gi]);
                if next != self.projected[gi] {
                    self.projected[gi] = next;
                    let (out, at) = (g.output, t + g.delay);
                    self.schedule(out, next, at);
                }
            }
        }
        Ok(self.now)
    }
}

/// Data applied to one input pair in the set phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stimulus {
    pub group: String,
    pub value: bool,
    /// `None` leaves the pair at spacer for the whole set phase.
    pub apply_at: Option<Time>,
}

impl Stimulus {
    pub fn at(group: impl Into<String>, value: bool, time: Time) -> Self {
        Self {
            group: group.into(),
            value,
            apply_at: Some(time),
        }
    }

    pub fn never(group: impl Into<String>, value: bool) -> Self {
        Self {
            group: group.into(),
            value,
            apply_at: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputRecord {
    pub group: String,
    pub value: bool,
    pub applied_at: Option<Time>,
    pub spacer_at: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputRecord {
    pub group: String,
    /// Decoded value at the end of the set phase.
    pub value: Option<bool>,
    /// First time the pair held a valid codeword during the set phase.
    pub valid_at: Option<Time>,
    /// Time the pair returned to spacer during the reset phase.
    pub spacer_at: Option<Time>,
}

/// Record of one four-phase data transaction.
#[derive(Debug, Clone)]
pub struct TransactionLog {
    pub nets: Arc<[String]>,
    /// All level changes in time order, both phases.
    pub transitions: Vec<Transition>,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<OutputRecord>,
    pub reset_start: Time,
    pub end: Time,
    /// First input application to last output validity.
    pub latency: Option<Time>,
    pub rtz_complete: bool,
    pub illegal_seen: bool,
    pub monotonic_violations: usize,
}

impl TransactionLog {
    /// Per-net `(time, level)` history.
    pub fn net_history(&self, name: &str) -> Vec<(Time, bool)> {
        let Some(idx) = self.nets.iter().position(|n| n == name) else {
            return Vec::new();
        };
        self.transitions
            .iter()
            .filter(|t| t.net == idx)
            .map(|t| (t.time, t.level))
            .collect()
    }

    pub fn output(&self, group: &str) -> Option<&OutputRecord> {
        self.outputs.iter().find(|o| o.group == group)
    }

    /// Copy of this log with every transition after `time` dropped.
    pub fn truncated(&self, time: Time) -> Self {
        let mut l = self.clone();
        l.transitions.retain(|t| t.time <= time);
        l.end = l.end.min(time);
        l.rtz_complete = false;
        l
    }

    /// Final level of every net, replayed from the transitions.
    pub fn final_levels(&self) -> Vec<bool> {
        let mut lv = vec![false; self.nets.len()];
        for t in &self.transitions {
            lv[t.net] = t.level;
        }
        lv
    }
}

/// True iff every net of `n` (other than the environment-driven `ackin`)
/// is low when the log ends.
pub fn check_rtz_complete(log: &TransactionLog, n: &Netlist) -> bool {
    let lv = log.final_levels();
    let ackin = n.ackin();
    n.nets().into_iter().filter(|&name| Some(name) != ackin).all(|name| {
        match log.nets.iter().position(|x| x == name) {
            Some(i) => !lv[i],
            None => false,
        }
    })
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_log(
    sim: &Simulator<'_>,
    first_transition: usize,
    reset_transition: usize,
    inputs: Vec<InputRecord>,
    reset_start: Time,
    end: Time,
    set_values: &[Option<bool>],
    monotonic_violations: usize,
    illegal_events: usize,
) -> TransactionLog {
    let c = sim.c;
    let trans = &sim.transitions[first_transition..];
    let outputs: Vec<OutputRecord> = c
        .outputs
        .iter()
        .zip(set_values)
        .map(|(p, &value)| {
            let mut valid_at = None;
            let mut spacer_at = None;
            let (mut l1, mut l0) = (false, false);
            for (k, t) in trans.iter().enumerate() {
                if t.net != p.rail1 && t.net != p.rail0 {
                    continue;
                }
                if t.net == p.rail1 {
                    l1 = t.level;
                } else {
                    l0 = t.level;
                }
                let s = decode_dual_rail(RailPair::new(l1, l0));
                if first_transition + k < reset_transition {
                    if valid_at.is_none() && s.is_valid() {
                        valid_at = Some(t.time);
                    }
                } else if s == RailState::Spacer {
                    spacer_at = Some(t.time);
                }
            }
            OutputRecord {
                group: p.group.clone(),
                value,
                valid_at,
                spacer_at,
            }
        })
        .collect();

    let first_applied = inputs.iter().filter_map(|i| i.applied_at).min();
    let last_valid = outputs.iter().map(|o| o.valid_at).collect::<Option<Vec<_>>>();
    let latency = match (first_applied, last_valid) {
        (Some(f), Some(v)) => v.into_iter().max().map(|m| m.saturating_sub(f)),
        _ => None,
    };
    let env = c.ackin;
    let rtz_complete = sim
        .levels
        .iter()
        .enumerate()
        .all(|(i, &l)| !l || Some(i) == env);
    TransactionLog {
        nets: c.names.clone(),
        transitions: trans.to_vec(),
        inputs,
        outputs,
        reset_start,
        end,
        latency,
        rtz_complete,
        illegal_seen: illegal_events > 0,
        monotonic_violations,
    }
}

/// Runs one set phase and one reset phase from the all-spacer state.
///
/// A staged netlist gets `ackin` high before the set phase and low at the
/// start of the reset phase, as an always-ready receiver would drive it.
pub fn simulate_transaction(
    n: &Netlist,
    d: &DelayTable,
    stimuli: &[Stimulus],
) -> Result<TransactionLog, SimError> {
    let c = Compiled::new(n, d)?;
    let mut sim = Simulator::new(&c);
    run_transaction(&mut sim, stimuli)
}

/// Like [`simulate_transaction`] on an already compiled netlist. The
/// simulator is reset first.
pub fn run_transaction(sim: &mut Simulator<'_>, stimuli: &[Stimulus]) -> Result<TransactionLog, SimError> {
    let c = sim.c;
    for s in stimuli {
        if c.input_index(&s.group).is_none() {
            return Err(SimError::UnknownGroup(s.group.clone()));
        }
    }
    let mut plan = Vec::with_capacity(c.inputs.len());
    for p in &c.inputs {
        let s = stimuli
            .iter()
            .find(|s| s.group == p.group)
            .ok_or_else(|| SimError::MissingInput(p.group.clone()))?;
        plan.push((s.value, s.apply_at));
    }

    sim.reset();
    if let Some(ackin) = c.ackin {
        sim.schedule(ackin, true, 0);
        sim.run()?;
    }
    let start = sim.transitions.len();
    sim.set_phase(Phase::Set);
    for (i, &(v, at)) in plan.iter().enumerate() {
        if let Some(t) = at {
            sim.drive_input(i, Some(v), t);
        }
    }
    let set_end = sim.run()?;
    let reset_transition = sim.transitions.len();
    let set_values: Vec<Option<bool>> = c.outputs.iter().map(|p| sim.pair_state(p).value()).collect();

    sim.set_phase(Phase::Reset);
    if let Some(ackin) = c.ackin {
        sim.schedule(ackin, false, set_end);
    }
    let mut records = Vec::with_capacity(plan.len());
    for (i, &(v, at)) in plan.iter().enumerate() {
        if at.is_some() {
            sim.drive_input(i, None, set_end);
        }
        records.push(InputRecord {
            group: c.inputs[i].group.clone(),
            value: v,
            applied_at: at,
            spacer_at: at.map(|_| set_end),
        });
    }
    let end = sim.run()?;
    sim.set_phase(Phase::Idle);
    let (mv, ill) = (sim.monotonic_violations, sim.illegal_events);
    Ok(build_log(sim, start, reset_transition, records, set_end, end, &set_values, mv, ill))
}
