// SPDX-License-Identifier: Apache-2.0
//! Value-change dump of simulated transactions.

use std::io::{self, Write};

use vcd::{TimescaleUnit, Writer};

use super::TransactionLog;

/// Writes every net of the logged netlist as a one-bit wire. Logs are
/// written back to back in the order given; their times must not overlap
/// (true for logs from one protocol run). All nets start at 0.
pub fn write_vcd<W: Write>(out: W, module: &str, logs: &[TransactionLog]) -> io::Result<()> {
    let mut w = Writer::new(out);
    w.timescale(1, TimescaleUnit::PS)?;
    w.add_module(module)?;
    let nets = match logs.first() {
        Some(l) => l.nets.clone(),
        None => Vec::new().into(),
    };
    let ids = nets
        .iter()
        .map(|n| w.add_wire(1, &n.replace(' ', "_")))
        .collect::<io::Result<Vec<_>>>()?;
    w.upscope()?;
    w.enddefinitions()?;
    w.timestamp(0)?;
    for &id in &ids {
        w.change_scalar(id, false)?;
    }
    let mut last = 0;
    for t in logs.iter().flat_map(|l| &l.transitions) {
        if t.time != last {
            w.timestamp(t.time)?;
            last = t.time;
        }
        w.change_scalar(ids[t.net], t.level)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayTable;
    use crate::generators::gen_safa;
    use crate::simulator::{simulate_transaction, Stimulus};

    #[test]
    fn dump_contains_nets_and_times() {
        let s = [
            Stimulus::at("A", true, 0),
            Stimulus::at("B", true, 0),
            Stimulus::at("CIN", false, 2),
        ];
        let log = simulate_transaction(&gen_safa(), &DelayTable::default(), &s).unwrap();
        let mut buf = Vec::new();
        write_vcd(&mut buf, "safa", &[log]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("$timescale 1 ps $end"));
        assert!(text.contains(" SUM1 $end"));
        assert!(text.contains("#2\n"));
        assert!(text.contains("$enddefinitions"));
    }
}
