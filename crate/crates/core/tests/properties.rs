// SPDX-License-Identifier: Apache-2.0
use proptest::prelude::*;

use qdi_adder::delay::DelayTable;
use qdi_adder::generators::{gen_hybrid_rca, gen_stage, ports, AdderSpec};
use qdi_adder::netlist::{GateKind, Netlist};
use qdi_adder::simulator::{run_protocol, InputVector};
use qdi_adder::timing::critical_path;
use qdi_adder::verification::{adder_latency, exhaustive_verify, oracle_add, VerifyMode, VerifyOptions};

fn delays() -> impl Strategy<Value = DelayTable> {
    prop::collection::vec(1u64..20, GateKind::ALL.len()).prop_map(|v| {
        let pairs: Vec<_> = GateKind::ALL.iter().copied().zip(v).collect();
        DelayTable::from_pairs(&pairs).unwrap()
    })
}

fn spec(max_width: usize) -> impl Strategy<Value = AdderSpec> {
    (1..=max_width, any::<bool>()).prop_flat_map(|(w, r)| {
        prop::sample::select(AdderSpec::legal_safa_counts(w)).prop_map(move |s| AdderSpec::new(w, s, r).unwrap())
    })
}

fn operands(width: usize) -> impl Strategy<Value = (u128, u128, bool)> {
    let m = (1u128 << width) - 1;
    (0..=m, 0..=m, any::<bool>())
}

fn spec_and_vector(max_width: usize) -> impl Strategy<Value = (AdderSpec, (u128, u128, bool))> {
    spec(max_width).prop_flat_map(|s| (Just(s), operands(s.width)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_width_adders_add(s in spec(10), seed in any::<u64>(), d in delays()) {
        let n = gen_hybrid_rca(s);
        let opts = VerifyOptions { delays: d, ..VerifyOptions::default() };
        let rep = exhaustive_verify(&n, s.width as u32, VerifyMode::Random { seed, count: 64 }, &opts).unwrap();
        prop_assert!(rep.pass(), "{:?}", rep.first_failure);
        prop_assert_eq!(rep.illegal_transactions, 0);
        prop_assert_eq!(rep.rtz_failures, 0);
        prop_assert_eq!(rep.monotonic_violations, 0);
    }

    #[test]
    fn latency_never_exceeds_critical_path((s, (a, b, cin)) in spec_and_vector(8), d in delays(), staged in any::<bool>()) {
        let fb = gen_hybrid_rca(s);
        let n = if staged { gen_stage(&fb).unwrap() } else { fb };
        let cp = critical_path(&n, &d).unwrap().value;
        let t = adder_latency(&n, &d, s.width, a, b, cin).unwrap().unwrap();
        prop_assert!(t <= cp, "latency {} above critical path {}", t, cp);
    }

    #[test]
    fn protocol_is_deterministic_and_monotonic(s in spec(6), seed in any::<u64>(), d in delays(), vs in prop::collection::vec((0u128..64, 0u128..64, any::<bool>()), 1..6)) {
        let stage = gen_stage(&gen_hybrid_rca(s)).unwrap();
        let m = (1u128 << s.width) - 1;
        let vectors: Vec<_> = vs.iter().map(|&(a, b, c)| InputVector::adder(s.width, a & m, b & m, c)).collect();
        let r1 = run_protocol(&stage, &d, &vectors, seed).unwrap();
        let r2 = run_protocol(&stage, &d, &vectors, seed).unwrap();
        prop_assert!(r1.clean());
        prop_assert_eq!(r1.completed, vectors.len());
        prop_assert_eq!(&r1.outputs, &r2.outputs);
        prop_assert_eq!(r1.max_latency, r2.max_latency);
        for (x, y) in r1.logs.iter().zip(&r2.logs) {
            prop_assert_eq!(&x.transitions, &y.transitions);
        }
        for (&(a, b, c), out) in vs.iter().zip(&r1.outputs) {
            let (sum, cout) = oracle_add(a & m, b & m, c, s.width as u32).unwrap();
            for i in 0..s.width {
                prop_assert_eq!(out[&ports::sum(i)], (sum >> i) & 1 == 1);
            }
            prop_assert_eq!(out[ports::COUT], cout);
        }
    }

    #[test]
    fn netlist_json_round_trips(s in spec(12), staged in any::<bool>()) {
        let fb = gen_hybrid_rca(s);
        let n = if staged { gen_stage(&fb).unwrap() } else { fb };
        let back = Netlist::from_json(&n.to_json()).unwrap();
        prop_assert_eq!(&back.name, &n.name);
        prop_assert_eq!(&back.inputs, &n.inputs);
        prop_assert_eq!(&back.outputs, &n.outputs);
        prop_assert_eq!(&back.acks, &n.acks);
        prop_assert_eq!(&back.gates, &n.gates);
    }

    #[test]
    fn delay_table_json_round_trips(d in delays()) {
        prop_assert_eq!(DelayTable::from_json(&d.to_json()).unwrap(), d);
    }
}
