// SPDX-License-Identifier: Apache-2.0
//! Empirical indication classification by input-skew trials.
//!
//! Each trial picks a random valid vector and one input pair to hold back.
//! The other inputs are applied and the circuit runs to quiescence, which
//! stands in for "arbitrarily long" delay. Outputs already valid at that
//! point did not wait for the late input. The reset phase is probed the same
//! way with the late pair keeping its data while the rest go to spacer.
//!
//! A block whose only output is a bare `ackout` net (a completion
//! detector) is observed through that net: high counts as valid, low as
//! spacer.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Compiled, Phase, Simulator};
use crate::codes::RailState;
use crate::delay::DelayTable;
use crate::netlist::Netlist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indication {
    Strong,
    Weak,
    Early,
}

impl fmt::Display for Indication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Indication::Strong => "strong",
            Indication::Weak => "weak",
            Indication::Early => "early",
        })
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("function block has no inputs")]
    NoInputs,
    #[error("function block has no observable outputs")]
    NoOutputs,
    #[error(transparent)]
    Sim(#[from] super::SimError),
}

/// One trial in which outputs moved before the held-back input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub trial: usize,
    pub delayed: String,
    pub vector: Vec<(String, bool)>,
    /// Outputs that completed their transition early.
    pub outputs: Vec<String>,
    /// True when every output completed early.
    pub all_outputs: bool,
}

#[derive(Debug, Clone)]
pub struct IndicationReport {
    pub indication: Indication,
    pub trials: usize,
    pub seed: u64,
    pub early_set: Vec<Witness>,
    pub early_reset: Vec<Witness>,
}

impl IndicationReport {
    pub fn full_early_set(&self) -> usize {
        self.early_set.iter().filter(|w| w.all_outputs).count()
    }

    pub fn full_early_reset(&self) -> usize {
        self.early_reset.iter().filter(|w| w.all_outputs).count()
    }

    /// Empirical evidence, not a proof: a "strong" verdict only means no
    /// trial found an early output.
    pub fn note(&self) -> String {
        format!(
            "{} trials (seed {}); early-set witnesses: {} ({} complete); early-reset witnesses: {} ({} complete)",
            self.trials,
            self.seed,
            self.early_set.len(),
            self.full_early_set(),
            self.early_reset.len(),
            self.full_early_reset()
        )
    }
}

enum Observed {
    Pairs,
    Net(usize),
}

pub fn classify_indication(
    fb: &Netlist,
    d: &DelayTable,
    trials: usize,
    seed: u64,
) -> Result<IndicationReport, ClassifyError> {
    if trials == 0 {
        return Err(ClassifyError::NoTrials);
    }
    let c = Compiled::new(fb, d)?;
    if c.inputs.is_empty() {
        return Err(ClassifyError::NoInputs);
    }
    let observed = if !c.outputs.is_empty() {
        Observed::Pairs
    } else if let Some(a) = c.ackout {
        Observed::Net(a)
    } else {
        return Err(ClassifyError::NoOutputs);
    };
    let out_names: Vec<String> = match observed {
        Observed::Pairs => c.outputs.iter().map(|p| p.group.clone()).collect(),
        Observed::Net(a) => vec![c.net_names()[a].clone()],
    };
    // (valid, spacer) per observed output
    let states = |sim: &Simulator<'_>| -> Vec<(bool, bool)> {
        match observed {
            Observed::Pairs => c
                .outputs
                .iter()
                .map(|p| {
                    let s = sim.pair_state(p);
                    (s.is_valid(), s == RailState::Spacer)
                })
                .collect(),
            Observed::Net(a) => vec![(sim.level(a), !sim.level(a))],
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = Simulator::new(&c);
    let mut early_set = Vec::new();
    let mut early_reset = Vec::new();

    for trial in 0..trials {
        let values: Vec<bool> = (0..c.inputs.len()).map(|_| rng.gen()).collect();
        let late = rng.gen_range(0..c.inputs.len());
        let vector: Vec<(String, bool)> = c
            .inputs
            .iter()
            .zip(&values)
            .map(|(p, &v)| (p.group.clone(), v))
            .collect();

        sim.reset();
        if let Some(ackin) = c.ackin {
            sim.schedule(ackin, true, 0);
            sim.run()?;
        }
        sim.set_phase(Phase::Set);
        let t0 = sim.now();
        for (i, &v) in values.iter().enumerate() {
            if i != late {
                sim.drive_input(i, Some(v), t0);
            }
        }
        let t1 = sim.run()?;
        let early: Vec<usize> = states(&sim)
            .iter()
            .enumerate()
            .filter(|(_, s)| s.0)
            .map(|(i, _)| i)
            .collect();
        if !early.is_empty() {
            early_set.push(Witness {
                trial,
                delayed: c.inputs[late].group.clone(),
                vector: vector.clone(),
                all_outputs: early.len() == out_names.len(),
                outputs: early.iter().map(|&i| out_names[i].clone()).collect(),
            });
        }
        sim.drive_input(late, Some(values[late]), t1 + 1);
        let t2 = sim.run()?;

        sim.set_phase(Phase::Reset);
        for i in 0..values.len() {
            if i != late {
                sim.drive_input(i, None, t2);
            }
        }
        let t3 = sim.run()?;
        let early: Vec<usize> = states(&sim)
            .iter()
            .enumerate()
            .filter(|(_, s)| s.1)
            .map(|(i, _)| i)
            .collect();
        if !early.is_empty() {
            early_reset.push(Witness {
                trial,
                delayed: c.inputs[late].group.clone(),
                vector,
                all_outputs: early.len() == out_names.len(),
                outputs: early.iter().map(|&i| out_names[i].clone()).collect(),
            });
        }
        sim.drive_input(late, None, t3 + 1);
        sim.run()?;
    }

    let full = |ws: &[Witness]| ws.iter().any(|w| w.all_outputs);
    let indication = if full(&early_set) || full(&early_reset) {
        Indication::Early
    } else if early_set.is_empty() && early_reset.is_empty() {
        Indication::Strong
    } else {
        Indication::Weak
    };
    Ok(IndicationReport {
        indication,
        trials,
        seed,
        early_set,
        early_reset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_completion_detector, gen_dafa, gen_safa, Builder};
    use crate::netlist::GateKind;

    #[test]
    fn safa_is_early() {
        let r = classify_indication(&gen_safa(), &DelayTable::default(), 32, 3).unwrap();
        assert_eq!(r.indication, Indication::Early);
        assert!(!r.early_set.is_empty());
        assert!(r.full_early_reset() > 0);
        // the sum needs every input, so no trial completes all outputs early
        assert_eq!(r.full_early_set(), 0);
        assert!(r.early_set.iter().all(|w| w.outputs == ["COUT"]));
    }

    #[test]
    fn dafa_variants_are_early() {
        for red in [true, false] {
            let r = classify_indication(&gen_dafa(red), &DelayTable::example(), 32, 11).unwrap();
            assert_eq!(r.indication, Indication::Early, "redundant={red}");
        }
    }

    #[test]
    fn detector_is_strong() {
        let r = classify_indication(&gen_completion_detector(4).unwrap(), &DelayTable::default(), 32, 1).unwrap();
        assert_eq!(r.indication, Indication::Strong);
        assert!(r.note().contains("32 trials"));
    }

    #[test]
    fn mixed_block_is_weak() {
        // Z = X or Y completes as soon as one input is 1; W = X and Y waits
        // for both inputs in both phases
        let mut b = Builder::new("mixed");
        b.input("X", "X.1", "X.0");
        b.input("Y", "Y.1", "Y.0");
        b.output("Z", "Z.1", "Z.0");
        b.output("W", "W.1", "W.0");
        b.gate_to("z1", GateKind::OR2, &["X.1", "Y.1"], "Z.1");
        b.gate_to("z0", GateKind::C2, &["X.0", "Y.0"], "Z.0");
        b.gate_to("w1", GateKind::C2, &["X.1", "Y.1"], "W.1");
        b.gate("c00", GateKind::C2, &["X.0", "Y.0"]);
        b.gate("c01", GateKind::C2, &["X.0", "Y.1"]);
        b.gate("c10", GateKind::C2, &["X.1", "Y.0"]);
        b.gate_to("w0", GateKind::OR3, &["c00", "c01", "c10"], "W.0");
        let r = classify_indication(&b.finish(), &DelayTable::default(), 64, 2).unwrap();
        assert_eq!(r.indication, Indication::Weak);
        assert!(r.early_set.iter().all(|w| w.outputs == ["Z"]));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(
            classify_indication(&gen_safa(), &DelayTable::default(), 0, 0),
            Err(ClassifyError::NoTrials)
        ));
    }
}
