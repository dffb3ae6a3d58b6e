// SPDX-License-Identifier: Apache-2.0
//! Four-phase handshake driver for registered stages.
//!
//! The environment plays both neighbours. The receiver side is ideal: it
//! holds `ackin` high to let data through and drops it as soon as the stage
//! raises `ackout`. Each phase runs to quiescence before the handshake is
//! checked, so a stuck completion detector shows up as a deadlock rather
//! than a timeout.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_log, Compiled, InputRecord, Phase, SimError, Simulator, TransactionLog};
use crate::delay::{DelayTable, Time};
use crate::generators::ports;
use crate::netlist::Netlist;

/// One data token: a value per input group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InputVector {
    pub values: BTreeMap<String, bool>,
}

impl InputVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, group: impl Into<String>, value: bool) -> Self {
        self.values.insert(group.into(), value);
        self
    }

    /// Operand bits for a generated ripple-carry adder of `width` bits.
    pub fn adder(width: usize, a: u128, b: u128, cin: bool) -> Self {
        let mut v = Self::new();
        for i in 0..width {
            v.values.insert(ports::a(i), (a >> i) & 1 == 1);
            v.values.insert(ports::b(i), (b >> i) & 1 == 1);
        }
        v.values.insert(ports::CIN.into(), cin);
        v
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolOptions {
    /// Each input pair is applied up to this many time units after the
    /// phase starts, drawn from the seeded generator.
    pub max_skew: Time,
    pub event_bound: u64,
    /// Keep full per-transaction logs (memory grows with vector count).
    pub keep_logs: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            max_skew: 3,
            event_bound: super::DEFAULT_EVENT_BOUND,
            keep_logs: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProtocolReport {
    pub logs: Vec<TransactionLog>,
    pub completed: usize,
    /// Transactions in which some monitored pair reached (1,1).
    pub illegal_transactions: usize,
    pub illegal_events: usize,
    pub rtz_failures: usize,
    pub monotonic_violations: usize,
    /// Decoded output values per completed transaction.
    pub outputs: Vec<BTreeMap<String, bool>>,
    /// Worst forward latency seen (first input to last output valid).
    pub max_latency: Option<Time>,
}

impl ProtocolReport {
    pub fn clean(&self) -> bool {
        self.illegal_events == 0 && self.rtz_failures == 0 && self.monotonic_violations == 0
    }
}

pub fn run_protocol(
    stage: &Netlist,
    d: &DelayTable,
    vectors: &[InputVector],
    seed: u64,
) -> Result<ProtocolReport, SimError> {
    run_protocol_with(stage, d, vectors, seed, &ProtocolOptions::default())
}

pub fn run_protocol_with(
    stage: &Netlist,
    d: &DelayTable,
    vectors: &[InputVector],
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ProtocolReport, SimError> {
    let c = Compiled::new(stage, d)?;
    let ackin = c.ackin.ok_or(SimError::NoHandshake("ackin"))?;
    let ackout = c.ackout.ok_or(SimError::NoHandshake("ackout"))?;
    let mut plan: Vec<Vec<bool>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if let Some(g) = v.values.keys().find(|g| c.input_index(g).is_none()) {
            return Err(SimError::UnknownGroup(g.clone()));
        }
        let mut row = Vec::with_capacity(c.inputs.len());
        for p in &c.inputs {
            row.push(
                *v.values
                    .get(&p.group)
                    .ok_or_else(|| SimError::MissingInput(p.group.clone()))?,
            );
        }
        plan.push(row);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = Simulator::new(&c);
    sim.event_bound = opts.event_bound;
    let mut report = ProtocolReport::default();

    sim.schedule(ackin, true, 0);
    sim.run()?;

    for (vi, row) in plan.iter().enumerate() {
        let start = sim.transitions.len();
        let (mv0, ill0) = (sim.monotonic_violations, sim.illegal_events);
        let t0 = sim.now();

        sim.set_phase(Phase::Set);
        let mut applied = Vec::with_capacity(row.len());
        for (i, &v) in row.iter().enumerate() {
            let at = t0 + rng.gen_range(0..=opts.max_skew);
            sim.drive_input(i, Some(v), at);
            applied.push(at);
        }
        let set_end = sim.run()?;
        if !sim.level(ackout) {
            return Err(deadlock(&sim, vi, Phase::Set));
        }
        let reset_transition = sim.transitions.len();
        let set_values: Vec<Option<bool>> =
            c.outputs.iter().map(|p| sim.pair_state(p).value()).collect();

        sim.set_phase(Phase::Reset);
        sim.schedule(ackin, false, set_end);
        let mut records = Vec::with_capacity(row.len());
        for (i, &v) in row.iter().enumerate() {
            let at = set_end + rng.gen_range(0..=opts.max_skew);
            sim.drive_input(i, None, at);
            records.push(InputRecord {
                group: c.inputs[i].group.clone(),
                value: v,
                applied_at: Some(applied[i]),
                spacer_at: Some(at),
            });
        }
        let end = sim.run()?;
        if sim.level(ackout) {
            return Err(deadlock(&sim, vi, Phase::Reset));
        }
        let (mv, ill) = (
            sim.monotonic_violations - mv0,
            sim.illegal_events - ill0,
        );
        let log = build_log(&sim, start, reset_transition, records, set_end, end, &set_values, mv, ill);
        sim.set_phase(Phase::Idle);
        sim.schedule(ackin, true, end);
        sim.run()?;

        report.completed += 1;
        report.illegal_events += ill;
        report.illegal_transactions += usize::from(ill > 0);
        report.monotonic_violations += mv;
        report.rtz_failures += usize::from(!log.rtz_complete);
        report.max_latency = report.max_latency.max(log.latency);
        report.outputs.push(
            c.outputs
                .iter()
                .zip(&set_values)
                .filter_map(|(p, v)| v.map(|v| (p.group.clone(), v)))
                .collect(),
        );
        if opts.keep_logs {
            report.logs.push(log);
        }
        // bound the history kept inside the simulator
        if !opts.keep_logs {
            sim.transitions.clear();
        }
    }
    Ok(report)
}

fn deadlock(sim: &Simulator<'_>, vector: usize, phase: Phase) -> SimError {
    let c = sim.compiled();
    let names = c.net_names();
    let want_high = phase == Phase::Set;
    let mut blocking: Vec<String> = c
        .outputs
        .iter()
        .filter(|p| sim.pair_state(p).is_valid() != want_high)
        .map(|p| p.group.clone())
        .collect();
    if let Some(a) = c.ackout {
        blocking.push(names[a].clone());
    }
    SimError::Deadlock {
        vector,
        phase,
        blocking,
    }
}
