// SPDX-License-Identifier: Apache-2.0
//! Circuit generators: the early output single-bit and dual-bit adders, the
//! hybrid ripple carry adder built from them, completion detectors, and
//! the register/acknowledge wrapper that turns a function block into a
//! four-phase stage.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::netlist::{AckPorts, Gate, GateKind, Netlist, PortGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("adder width must be at least 1")]
    ZeroWidth,
    #[error("{safa} single-bit stages exceed the adder width {width}")]
    TooManySafa { width: usize, safa: usize },
    #[error("width {width} with {safa} single-bit stages leaves {} bits, which dual-bit stages cannot cover", width - safa)]
    Parity { width: usize, safa: usize },
    #[error("a completion detector needs at least one rail pair")]
    NoPairs,
    #[error("function block {0} has no dual-rail input or output ports")]
    NoDualRailPorts(String),
    #[error("function block {0} already has handshake ports")]
    AlreadyStaged(String),
    #[error("net name {0} collides with a stage net")]
    NetCollision(String),
}

/// Shape of a hybrid ripple carry adder: `safa_stages` single-bit adders in
/// the least significant positions and `dafa_stages` dual-bit adders above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub width: usize,
    pub safa_stages: usize,
    pub dafa_stages: usize,
    pub redundant_carry: bool,
}

impl AdderSpec {
    pub fn new(width: usize, safa_stages: usize, redundant_carry: bool) -> Result<Self, GenError> {
        if width == 0 {
            return Err(GenError::ZeroWidth);
        }
        if safa_stages > width {
            return Err(GenError::TooManySafa {
                width,
                safa: safa_stages,
            });
        }
        if !(width - safa_stages).is_multiple_of(2) {
            return Err(GenError::Parity {
                width,
                safa: safa_stages,
            });
        }
        Ok(Self {
            width,
            safa_stages,
            dafa_stages: (width - safa_stages) / 2,
            redundant_carry,
        })
    }

    /// Every legal single-bit stage count for `width`, ascending.
    pub fn legal_safa_counts(width: usize) -> Vec<usize> {
        (0..=width).filter(|s| (width - s).is_multiple_of(2)).collect()
    }
}

/// Port naming shared by every generated adder.
pub mod ports {
    pub const CIN: &str = "CIN";
    pub const COUT: &str = "COUT";

    pub fn a(i: usize) -> String {
        format!("A[{i}]")
    }

    pub fn b(i: usize) -> String {
        format!("B[{i}]")
    }

    pub fn sum(i: usize) -> String {
        format!("SUM[{i}]")
    }

    pub fn rail(group: &str, high: bool) -> String {
        format!("{group}.{}", u8::from(high))
    }
}

/// Incremental netlist construction.
#[derive(Debug, Default)]
pub struct Builder {
    n: Netlist,
}

impl Builder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            n: Netlist::new(name),
        }
    }

    pub fn input(&mut self, group: &str, rail1: &str, rail0: &str) {
        self.n.inputs.push(PortGroup::new(group, rail1, rail0));
    }

    pub fn output(&mut self, group: &str, rail1: &str, rail0: &str) {
        self.n.outputs.push(PortGroup::new(group, rail1, rail0));
    }

    /// Input group `group` with rails `group.1` / `group.0`.
    pub fn input_pair(&mut self, group: &str) -> (String, String) {
        let (r1, r0) = (ports::rail(group, true), ports::rail(group, false));
        self.input(group, &r1, &r0);
        (r1, r0)
    }

    pub fn output_pair(&mut self, group: &str) -> (String, String) {
        let (r1, r0) = (ports::rail(group, true), ports::rail(group, false));
        self.output(group, &r1, &r0);
        (r1, r0)
    }

    pub fn internal_pair(&mut self, group: &str, rail1: &str, rail0: &str) {
        self.n.internal_pairs.push(PortGroup::new(group, rail1, rail0));
    }

    /// Adds a gate whose output net is named after the gate; returns the net.
    pub fn gate(&mut self, id: &str, kind: GateKind, ins: &[&str]) -> String {
        self.gate_to(id, kind, ins, id)
    }

    pub fn gate_to(&mut self, id: &str, kind: GateKind, ins: &[&str], out: &str) -> String {
        self.n.gates.push(Gate {
            id: id.to_string(),
            kind,
            inputs: ins.iter().map(|s| s.to_string()).collect(),
            out: out.to_string(),
        });
        out.to_string()
    }

    /// Copies `sub` into this netlist. Nets named in `bind` are connected to
    /// the given parent nets; every other net and every gate id is prefixed
    /// with `prefix/`. Ports of `sub` are not re-exported.
    pub fn instantiate(&mut self, sub: &Netlist, prefix: &str, bind: &BTreeMap<String, String>) {
        let map = |net: &str| -> String {
            bind.get(net)
                .cloned()
                .unwrap_or_else(|| format!("{prefix}/{net}"))
        };
        for g in &sub.gates {
            self.n.gates.push(Gate {
                id: format!("{prefix}/{}", g.id),
                kind: g.kind,
                inputs: g.inputs.iter().map(|n| map(n)).collect(),
                out: map(&g.out),
            });
        }
        for p in &sub.internal_pairs {
            self.n.internal_pairs.push(PortGroup::new(
                format!("{prefix}/{}", p.group),
                map(&p.rail1),
                map(&p.rail0),
            ));
        }
    }

    pub fn finish(self) -> Netlist {
        self.n
    }
}

fn bind_group(bind: &mut BTreeMap<String, String>, port: &PortGroup, rail1: &str, rail0: &str) {
    bind.insert(port.rail1.clone(), rail1.to_string());
    bind.insert(port.rail0.clone(), rail0.to_string());
}

/// Early output single-bit full adder.
///
/// Ports: `A` (A1, A0), `B` (B1, B0), `CIN` (CIN1, CIN0) in; `SUM`
/// (SUM1, SUM0), `COUT` (COUT1, COUT0) out. CG1 and CG2 are the
/// equivalence and difference of A and B; the carry gates reuse the A1·B1
/// and A0·B0 conjunctions so a carry can be produced before CIN arrives.
pub fn gen_safa() -> Netlist {
    use GateKind::*;
    let mut b = Builder::new("safa");
    b.input("A", "A1", "A0");
    b.input("B", "B1", "B0");
    b.input("CIN", "CIN1", "CIN0");

    let eq = b.gate("CG1", AO22, &["A1", "B1", "A0", "B0"]);
    let ne = b.gate("CG2", AO22, &["A1", "B0", "A0", "B1"]);
    b.internal_pair("X", &ne, &eq);
    b.gate_to("CG3", AO22, &["A1", "B1", &ne, "CIN1"], "COUT1");
    b.gate_to("CG4", AO22, &["A0", "B0", &ne, "CIN0"], "COUT0");

    let s1a = b.gate("CE1", C2, &[&ne, "CIN0"]);
    let s1b = b.gate("CE2", C2, &[&eq, "CIN1"]);
    let s0a = b.gate("CE3", C2, &[&ne, "CIN1"]);
    let s0b = b.gate("CE4", C2, &[&eq, "CIN0"]);
    b.gate_to("OR1", OR2, &[&s1a, &s1b], "SUM1");
    b.gate_to("OR2", OR2, &[&s0a, &s0b], "SUM0");

    b.output("SUM", "SUM1", "SUM0");
    b.output("COUT", "COUT1", "COUT0");
    b.finish()
}

/// Early output dual-bit full adder.
///
/// Ports: `A1` (A11, A10), `A0` (A01, A00), `B1` (B11, B10), `B0`
/// (B01, B00), `CIN` (CIN1, CIN0) in; `SUM1` (SUM11, SUM10), `SUM0`
/// (SUM01, SUM00), `COUT` (COUT21, COUT20) out.
///
/// Product gates are numbered `t00..t21` with the four propagate products
/// first. The propagate signal `P` (pair sum of exactly 3) is shared by the
/// carry and both high sum rails. With `redundant` the carry rails are
/// AO21 gates fed directly by `P` and CIN; without it they are OR2 gates
/// over the `P`/CIN C-elements already present for the sum.
///
/// High-bit sum gates are named `H*` and low-bit ones `L*` so the critical
/// path reported on equal-length ties runs through the high sum rails.
pub fn gen_dafa(redundant: bool) -> Netlist {
    use GateKind::*;
    let name = if redundant { "dafa_redundant" } else { "dafa" };
    let mut b = Builder::new(name);
    b.input("A1", "A11", "A10");
    b.input("A0", "A01", "A00");
    b.input("B1", "B11", "B10");
    b.input("B0", "B01", "B00");
    b.input("CIN", "CIN1", "CIN0");

    let mut next = 0usize;
    let mut t = |b: &mut Builder, kind: GateKind, ins: &[&str]| {
        let id = format!("t{next:02}");
        next += 1;
        b.gate(&id, kind, ins)
    };
    let or_of = |b: &mut Builder, id: &str, terms: &[String]| {
        let ins: Vec<&str> = terms.iter().map(String::as_str).collect();
        let kind = match ins.len() {
            3 => OR3,
            4 => OR4,
            _ => unreachable!(),
        };
        b.gate(id, kind, &ins)
    };

    let p_terms: Vec<String> = [
        ["A10", "A00", "B11", "B01"],
        ["A11", "A00", "B10", "B01"],
        ["A10", "A01", "B11", "B00"],
        ["A11", "A01", "B10", "B00"],
    ]
    .iter()
    .map(|lits| t(&mut b, AND4, lits))
    .collect();
    // high bits equal, low bits differ
    let y_terms: Vec<String> = [
        ["A11", "A00", "B11", "B01"],
        ["A11", "A01", "B11", "B00"],
        ["A10", "A00", "B10", "B01"],
        ["A10", "A01", "B10", "B00"],
    ]
    .iter()
    .map(|lits| t(&mut b, AND4, lits))
    .collect();
    let z1_terms: Vec<String> = [
        ["A10", "A01", "B10", "B01"],
        ["A11", "A00", "B10", "B00"],
        ["A10", "A00", "B11", "B00"],
        ["A11", "A01", "B11", "B01"],
    ]
    .iter()
    .map(|lits| t(&mut b, AND4, lits))
    .collect();
    let z0_terms: Vec<String> = [
        ["A11", "A00", "B11", "B00"],
        ["A11", "A01", "B10", "B01"],
        ["A10", "A01", "B11", "B01"],
        ["A10", "A00", "B10", "B00"],
    ]
    .iter()
    .map(|lits| t(&mut b, AND4, lits))
    .collect();
    let g1_terms = vec![
        t(&mut b, AND4, &["A10", "A01", "B11", "B01"]),
        t(&mut b, AND4, &["A11", "A01", "B10", "B01"]),
        t(&mut b, AND2, &["A11", "B11"]),
    ];
    let g0_terms = vec![
        t(&mut b, AND4, &["A11", "A00", "B10", "B00"]),
        t(&mut b, AND4, &["A10", "A00", "B11", "B00"]),
        t(&mut b, AND2, &["A10", "B10"]),
    ];

    let p = or_of(&mut b, "P", &p_terms);
    let y = or_of(&mut b, "Y", &y_terms);
    let z1 = or_of(&mut b, "Z1", &z1_terms);
    let z0 = or_of(&mut b, "Z0", &z0_terms);
    let g1 = or_of(&mut b, "G1", &g1_terms);
    let g0 = or_of(&mut b, "G0", &g0_terms);

    let cp0 = b.gate("CP0", C2, &[&p, "CIN0"]);
    let cp1 = b.gate("CP1", C2, &[&p, "CIN1"]);
    let cy1 = b.gate("CY1", C2, &[&y, "CIN1"]);
    let cy0 = b.gate("CY0", C2, &[&y, "CIN0"]);
    b.gate_to("HS1", OR3, &[&cp0, &cy1, &z1], "SUM11");
    b.gate_to("HS0", OR3, &[&cp1, &cy0, &z0], "SUM10");

    if redundant {
        b.gate_to("AO1", AO21, &[&p, "CIN1", &g1], "COUT21");
        b.gate_to("AO0", AO21, &[&p, "CIN0", &g0], "COUT20");
    } else {
        b.gate_to("OC1", OR2, &[&cp1, &g1], "COUT21");
        b.gate_to("OC0", OR2, &[&cp0, &g0], "COUT20");
    }

    let ne = b.gate("D", AO22, &["A01", "B00", "A00", "B01"]);
    let eq = b.gate("E", AO22, &["A01", "B01", "A00", "B00"]);
    b.internal_pair("X0", &ne, &eq);
    let s1a = b.gate("LD0", C2, &[&ne, "CIN0"]);
    let s1b = b.gate("LE1", C2, &[&eq, "CIN1"]);
    let s0a = b.gate("LD1", C2, &[&ne, "CIN1"]);
    let s0b = b.gate("LE0", C2, &[&eq, "CIN0"]);
    b.gate_to("LS1", OR2, &[&s1a, &s1b], "SUM01");
    b.gate_to("LS0", OR2, &[&s0a, &s0b], "SUM00");

    b.output("SUM1", "SUM11", "SUM10");
    b.output("SUM0", "SUM01", "SUM00");
    b.output("COUT", "COUT21", "COUT20");
    b.finish()
}

/// Hybrid ripple carry adder.
///
/// Inputs `A[0..n]`, `B[0..n]`, `CIN`; outputs `SUM[0..n]`, `COUT`; every
/// group has rails `<group>.1` / `<group>.0`. Single-bit adders occupy bits
/// `0..s` (instances `safa<i>`), dual-bit adders the rest (instances
/// `dafa<j>`), linked through internal carries `C[i]`.
pub fn gen_hybrid_rca(spec: AdderSpec) -> Netlist {
    let AdderSpec {
        width,
        safa_stages,
        redundant_carry,
        ..
    } = spec;
    let mut b = Builder::new(format!(
        "rca{width}_s{safa_stages}{}",
        if redundant_carry { "_r" } else { "" }
    ));
    for i in 0..width {
        b.input_pair(&ports::a(i));
    }
    for i in 0..width {
        b.input_pair(&ports::b(i));
    }
    let mut carry = b.input_pair(ports::CIN);

    let safa = gen_safa();
    let dafa = gen_dafa(redundant_carry);

    let mut sums: Vec<(String, String)> = Vec::with_capacity(width);
    let carry_out = |b: &mut Builder, top_bit: usize| -> (String, String) {
        if top_bit + 1 == width {
            (ports::rail(ports::COUT, true), ports::rail(ports::COUT, false))
        } else {
            let g = format!("C[{top_bit}]");
            let pair = (ports::rail(&g, true), ports::rail(&g, false));
            b.internal_pair(&g, &pair.0, &pair.1);
            pair
        }
    };
    let rails = |g: &str| (ports::rail(g, true), ports::rail(g, false));

    for i in 0..safa_stages {
        let cout = carry_out(&mut b, i);
        let sum = rails(&ports::sum(i));
        let mut bind = BTreeMap::new();
        let (a1, a0) = rails(&ports::a(i));
        let (b1, b0) = rails(&ports::b(i));
        bind_group(&mut bind, safa.input("A").unwrap(), &a1, &a0);
        bind_group(&mut bind, safa.input("B").unwrap(), &b1, &b0);
        bind_group(&mut bind, safa.input("CIN").unwrap(), &carry.0, &carry.1);
        bind_group(&mut bind, safa.output("SUM").unwrap(), &sum.0, &sum.1);
        bind_group(&mut bind, safa.output("COUT").unwrap(), &cout.0, &cout.1);
        b.instantiate(&safa, &format!("safa{i}"), &bind);
        sums.push(sum);
        carry = cout;
    }
    for j in 0..spec.dafa_stages {
        let lo = safa_stages + 2 * j;
        let hi = lo + 1;
        let cout = carry_out(&mut b, hi);
        let mut bind = BTreeMap::new();
        for (port, net) in [
            ("A1", ports::a(hi)),
            ("A0", ports::a(lo)),
            ("B1", ports::b(hi)),
            ("B0", ports::b(lo)),
        ] {
            let (r1, r0) = rails(&net);
            bind_group(&mut bind, dafa.input(port).unwrap(), &r1, &r0);
        }
        bind_group(&mut bind, dafa.input("CIN").unwrap(), &carry.0, &carry.1);
        let s_lo = rails(&ports::sum(lo));
        let s_hi = rails(&ports::sum(hi));
        bind_group(&mut bind, dafa.output("SUM0").unwrap(), &s_lo.0, &s_lo.1);
        bind_group(&mut bind, dafa.output("SUM1").unwrap(), &s_hi.0, &s_hi.1);
        bind_group(&mut bind, dafa.output("COUT").unwrap(), &cout.0, &cout.1);
        b.instantiate(&dafa, &format!("dafa{j}"), &bind);
        sums.push(s_lo);
        sums.push(s_hi);
        carry = cout;
    }
    for (i, (r1, r0)) in sums.iter().enumerate() {
        b.output(&ports::sum(i), r1, r0);
    }
    b.output(ports::COUT, &carry.0, &carry.1);
    b.finish()
}

/// Adds an OR2-per-pair completion detector with a balanced C-element tree
/// whose root drives `out`. Gate ids are prefixed with `prefix/`.
fn add_detector(b: &mut Builder, pairs: &[(String, String)], prefix: &str, out: &str) {
    let single = pairs.len() == 1;
    let mut level: Vec<String> = pairs
        .iter()
        .enumerate()
        .map(|(i, (r1, r0))| {
            let id = format!("{prefix}/or{i}");
            if single {
                b.gate_to(&id, GateKind::OR2, &[r1, r0], out)
            } else {
                b.gate(&id, GateKind::OR2, &[r1, r0])
            }
        })
        .collect();
    let mut depth = 0;
    while level.len() > 1 {
        let last_level = level.len() == 2;
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for (j, chunk) in level.chunks(2).enumerate() {
            match chunk {
                [x, y] => {
                    let id = format!("{prefix}/c{depth}_{j}");
                    let net = if last_level {
                        b.gate_to(&id, GateKind::C2, &[x, y], out)
                    } else {
                        b.gate(&id, GateKind::C2, &[x, y])
                    };
                    next.push(net);
                }
                [x] => next.push(x.clone()),
                _ => unreachable!(),
            }
        }
        level = next;
        depth += 1;
    }
}

/// Standalone completion detector over `k` pairs `X[0..k]`; its output
/// `done` is exposed as the `ackout` handshake net.
pub fn gen_completion_detector(k: usize) -> Result<Netlist, GenError> {
    if k == 0 {
        return Err(GenError::NoPairs);
    }
    let mut b = Builder::new(format!("detector{k}"));
    let pairs: Vec<(String, String)> = (0..k).map(|i| b.input_pair(&format!("X[{i}]"))).collect();
    add_detector(&mut b, &pairs, "cd", "done");
    let mut n = b.finish();
    n.acks = Some(AckPorts {
        ackin: None,
        ackout: Some("done".into()),
    });
    Ok(n)
}

pub const ACKIN: &str = "ackin";
pub const ACKOUT: &str = "ackout";

/// Net name of the stage-level input feeding the register for `rail`.
pub fn stage_input_rail(rail: &str) -> String {
    format!("{rail}.in")
}

/// Wraps a function block into a four-phase stage: a C-element register on
/// every input rail (second input `ackin`) and a completion detector over
/// the block outputs driving `ackout`.
///
/// The register outputs keep the block's original input net names, so the
/// block's gates are copied unchanged. Stage inputs are `<rail>.in`.
pub fn gen_stage(fb: &Netlist) -> Result<Netlist, GenError> {
    if fb.inputs.is_empty() || fb.outputs.is_empty() {
        return Err(GenError::NoDualRailPorts(fb.name.clone()));
    }
    if fb.acks.is_some() {
        return Err(GenError::AlreadyStaged(fb.name.clone()));
    }
    let existing: BTreeSet<&str> = fb.nets();
    let mut reserved = vec![ACKIN.to_string(), ACKOUT.to_string()];
    for p in &fb.inputs {
        reserved.extend(p.rails().map(stage_input_rail));
    }
    if let Some(clash) = reserved.iter().find(|r| existing.contains(r.as_str())) {
        return Err(GenError::NetCollision(clash.clone()));
    }

    let mut b = Builder::new(format!("{}_stage", fb.name));
    for p in &fb.inputs {
        let (i1, i0) = (stage_input_rail(&p.rail1), stage_input_rail(&p.rail0));
        b.input(&p.group, &i1, &i0);
        b.gate_to(&format!("reg/{}", p.rail1), GateKind::C2, &[&i1, ACKIN], &p.rail1);
        b.gate_to(&format!("reg/{}", p.rail0), GateKind::C2, &[&i0, ACKIN], &p.rail0);
        b.internal_pair(&p.group, &p.rail1, &p.rail0);
    }
    let mut n = b.finish();
    n.gates.extend(fb.gates.iter().cloned());
    n.internal_pairs.extend(fb.internal_pairs.iter().cloned());

    let mut b = Builder { n };
    let pairs: Vec<(String, String)> = fb
        .outputs
        .iter()
        .map(|p| (p.rail1.clone(), p.rail0.clone()))
        .collect();
    add_detector(&mut b, &pairs, "cd", ACKOUT);
    for p in &fb.outputs {
        b.output(&p.group, &p.rail1, &p.rail0);
    }
    let mut n = b.finish();
    n.acks = Some(AckPorts {
        ackin: Some(ACKIN.into()),
        ackout: Some(ACKOUT.into()),
    });
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{gate_census, validate, Census};
    use GateKind::*;

    #[test]
    fn safa_census() {
        let n = gen_safa();
        assert!(validate(&n).is_empty(), "{:?}", validate(&n));
        assert_eq!(
            gate_census(&n),
            Census::from_counts(&[(AO22, 4), (C2, 4), (OR2, 2)])
        );
    }

    #[test]
    fn dafa_variant_delta() {
        let r = gen_dafa(true);
        let nr = gen_dafa(false);
        assert!(validate(&r).is_empty(), "{:?}", validate(&r));
        assert!(validate(&nr).is_empty(), "{:?}", validate(&nr));
        let d = gate_census(&r).diff(&gate_census(&nr));
        for k in GateKind::ALL {
            let expect = match k {
                AO21 => 2,
                OR2 => -2,
                _ => 0,
            };
            assert_eq!(d[&k], expect, "{k}");
        }
    }

    #[test]
    fn adder_spec_parity() {
        assert!(matches!(AdderSpec::new(5, 2, true), Err(GenError::Parity { .. })));
        assert!(matches!(AdderSpec::new(4, 6, true), Err(GenError::TooManySafa { .. })));
        assert_eq!(AdderSpec::new(0, 0, true), Err(GenError::ZeroWidth));
        let s = AdderSpec::new(32, 2, true).unwrap();
        assert_eq!(s.dafa_stages, 15);
        assert_eq!(AdderSpec::new(32, 4, true).unwrap().dafa_stages, 14);
        assert_eq!(AdderSpec::legal_safa_counts(4), vec![0, 2, 4]);
        assert_eq!(AdderSpec::legal_safa_counts(3), vec![1, 3]);
    }

    fn instance_count(n: &Netlist, prefix: &str) -> usize {
        n.gates
            .iter()
            .filter_map(|g| g.id.split('/').next())
            .filter(|p| p.starts_with(prefix))
            .collect::<BTreeSet<_>>()
            .len()
    }

    #[test]
    fn hybrid_instances() {
        let n = gen_hybrid_rca(AdderSpec::new(32, 2, true).unwrap());
        assert!(validate(&n).is_empty());
        assert_eq!(instance_count(&n, "safa"), 2);
        assert_eq!(instance_count(&n, "dafa"), 15);
        assert_eq!(n.inputs.len(), 65);
        assert_eq!(n.outputs.len(), 33);

        let n = gen_hybrid_rca(AdderSpec::new(32, 4, true).unwrap());
        assert_eq!(instance_count(&n, "safa"), 4);
        assert_eq!(instance_count(&n, "dafa"), 14);

        let safa = gate_census(&gen_safa());
        let dafa = gate_census(&gen_dafa(true));
        let total = gate_census(&n);
        for k in GateKind::ALL {
            assert_eq!(total.get(k), 4 * safa.get(k) + 14 * dafa.get(k));
        }
    }

    #[test]
    fn detector_census() {
        for (k, or2, c2) in [(1, 1, 0), (2, 2, 1), (4, 4, 3), (5, 5, 4), (32, 32, 31)] {
            let n = gen_completion_detector(k).unwrap();
            assert!(validate(&n).is_empty(), "{k}: {:?}", validate(&n));
            assert_eq!(gate_census(&n), Census::from_counts(&[(OR2, or2), (C2, c2)]), "k={k}");
        }
        assert_eq!(gen_completion_detector(0), Err(GenError::NoPairs));
    }

    #[test]
    fn detector_tree_is_balanced() {
        // depth of the C2 tree for k leaves is ceil(log2 k)
        for k in [2usize, 3, 4, 7, 8, 9, 33] {
            let n = gen_completion_detector(k).unwrap();
            let order = n.topo_order().unwrap();
            let mut depth = std::collections::HashMap::new();
            for i in order {
                let g = &n.gates[i];
                let d = g
                    .inputs
                    .iter()
                    .filter_map(|x| depth.get(x.as_str()).copied())
                    .max()
                    .unwrap_or(0)
                    + usize::from(g.kind == C2);
                depth.insert(g.out.as_str(), d);
            }
            let expect = (usize::BITS - (k - 1).leading_zeros()) as usize;
            assert_eq!(depth["done"], expect, "k={k}");
        }
    }

    #[test]
    fn stage_wrapping_safa() {
        let fb = gen_safa();
        let st = gen_stage(&fb).unwrap();
        assert!(validate(&st).is_empty(), "{:?}", validate(&st));
        let d = gate_census(&st).diff(&gate_census(&fb));
        assert_eq!(d[&C2], 6 + 1);
        assert_eq!(d[&OR2], 2);
        assert_eq!(st.gates.iter().filter(|g| st.is_register(g)).count(), 6);
        assert_eq!(st.ackin(), Some(ACKIN));
        assert_eq!(st.ackout(), Some(ACKOUT));
    }

    #[test]
    fn stage_of_pass_through_block() {
        let mut fb = Netlist::new("wire");
        fb.inputs.push(PortGroup::new("X", "x1", "x0"));
        fb.outputs.push(PortGroup::new("X", "x1", "x0"));
        let st = gen_stage(&fb).unwrap();
        assert!(validate(&st).is_empty(), "{:?}", validate(&st));
        assert_eq!(gate_census(&st), Census::from_counts(&[(C2, 2), (OR2, 1)]));
    }

    #[test]
    fn stage_errors() {
        assert!(matches!(gen_stage(&Netlist::new("x")), Err(GenError::NoDualRailPorts(_))));
        let st = gen_stage(&gen_safa()).unwrap();
        assert!(matches!(gen_stage(&st), Err(GenError::AlreadyStaged(_))));
        let mut fb = gen_safa();
        fb.gates[0].out = "ackout".into();
        assert!(matches!(gen_stage(&fb), Err(GenError::NetCollision(_))));
    }
}
