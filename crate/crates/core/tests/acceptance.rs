// SPDX-License-Identifier: Apache-2.0
//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdi_adder::delay::DelayTable;
use qdi_adder::generators::{gen_completion_detector, gen_dafa, gen_hybrid_rca, gen_safa, gen_stage, AdderSpec};
use qdi_adder::netlist::{GateKind, Netlist};
use qdi_adder::simulator::{classify_indication, Indication};
use qdi_adder::timing::{
    compare_report, critical_path, latency_expr_table, sweep_hybrid, AdderLegend, LatencyExpr, ReportSource,
};
use qdi_adder::verification::{
    adder_latency, dafa_equations, dsop_check, exhaustive_verify, monotonic_cover_check, safa_equations,
    EquationSet, Literal, ProductTerm, Variable, VerifyMode, VerifyOptions,
};

/// Agreement band for recomputed percentage reductions, in points.
const REDUCTION_TOL_PP: f64 = 0.1;
/// Tolerance for comparing floating ratios that should be exact.
const RATIO_EPS: f64 = 1e-9;
/// Random delay tables in the timing battery.
const BATTERY_RANDOM_TABLES: usize = 40;
const BATTERY_SEED: u64 = 7;
const RANDOM_VECTORS_32: usize = 10_000;
const RANDOM_VECTOR_SEED: u64 = 0x5EED;
const CLASSIFY_TRIALS: usize = 48;
const SYNTHETIC_SETS: usize = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn with_kinds(pairs: &[(GateKind, u64)]) -> DelayTable {
    DelayTable::from_pairs(pairs).expect("battery tables are valid")
}

/// Delay tables for which the closed-form expressions describe the
/// longest path: each sum/carry alternative is no longer than the one the
/// expression follows. See the timing regime tests for tables outside it.
fn in_regime(d: &DelayTable) -> bool {
    use GateKind::*;
    let t = |k| d.get(k);
    t(AO22) <= t(C2) + t(OR2)
        && t(AO21) <= t(C2) + t(OR3)
        && t(OR2) <= t(OR3)
        && t(OR3) <= t(OR4)
        && t(AND2) <= t(AND4)
        && 3 * t(AO22) >= t(AND4) + t(OR4)
}

fn battery() -> Vec<(String, DelayTable)> {
    use GateKind::*;
    let mut v = vec![
        ("unit".to_string(), DelayTable::default()),
        ("example".to_string(), DelayTable::example()),
        (
            "ps-like".to_string(),
            with_kinds(&[
                (BUF, 40),
                (AND2, 18),
                (AND4, 30),
                (OR2, 20),
                (OR3, 28),
                (OR4, 35),
                (AO21, 30),
                (AO22, 32),
                (AO222, 45),
                (C2, 40),
            ]),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    while v.len() < 3 + BATTERY_RANDOM_TABLES {
        let pairs: Vec<(GateKind, u64)> = GateKind::ALL
            .iter()
            .map(|&k| (k, if k == BUF { rng.gen_range(0..5) } else { rng.gen_range(1..60) }))
            .collect();
        let d = with_kinds(&pairs);
        if in_regime(&d) {
            v.push((format!("random#{}", v.len() - 3), d));
        }
    }
    v
}

fn staged(spec: AdderSpec) -> Netlist {
    gen_stage(&gen_hybrid_rca(spec)).expect("adders have dual-rail ports")
}

fn formula_legends() -> Vec<(AdderLegend, Netlist)> {
    [1u8, 5, 6, 11, 12]
        .iter()
        .map(|&n| {
            let l = AdderLegend::new(n).unwrap();
            (l, staged(l.adder_spec().unwrap()))
        })
        .collect()
}

fn c1_formula_agreement() -> Outcome {
    let tables = battery();
    let legends = formula_legends();
    for (name, d) in &tables {
        for (l, n) in &legends {
            let cp = critical_path(n, d).map_err(|e| e.to_string())?;
            let f = l.latency_expr();
            if !cp.expr.same_coefficients(&f) || !cp.expr.includes_register {
                return Err(format!("{l} under {name}: path {} vs formula {f}", cp.expr));
            }
            let expect = f.evaluate(d) - d.get(GateKind::BUF);
            if cp.value != expect {
                return Err(format!("{l} under {name}: value {} vs {expect}", cp.value));
            }
        }
    }
    Ok(format!(
        "Adder1/5/6/11/12 path expressions equal their formulas under {} delay tables",
        tables.len()
    ))
}

/// Reference expressions typed in by hand and parsed independently of
/// the crate's table.
const REFERENCE: [&str; 17] = [
    "T_BUF + T_REG + 32T_AO22 + T_CE2 + T_OR2",
    "T_BUF + T_REG + 32T_CE2 + 33T_OR2",
    "T_BUF + T_REG + 16T_CE2 + T_AND4 + T_OR4 + T_OR3 + 15T_OR2",
    "T_BUF + T_REG + T_CE2 + T_AND4 + 15T_AND2 + T_OR4 + T_OR3 + 15T_OR2",
    "T_BUF + T_REG + 16T_CE2 + T_AND4 + T_OR4 + T_OR3 + 15T_OR2",
    "T_BUF + T_REG + 15T_AO21 + T_CE2 + T_AND4 + T_OR4 + T_OR3",
    "T_BUF + T_REG + 17T_CE2 + 18T_OR2",
    "T_BUF + T_REG + 2T_CE2 + 15T_AND2 + 18T_OR2",
    "T_BUF + T_REG + T_AO22 + 16T_CE2 + 17T_OR2",
    "T_BUF + T_REG + 15T_AO21 + T_CE2 + T_AND2 + T_OR4 + T_OR2",
    "T_BUF + T_REG + 3T_AO22 + 14T_AO21 + T_CE2 + T_OR3",
    "T_BUF + T_REG + 5T_AO22 + 13T_AO21 + T_CE2 + T_OR3",
    "T_BUF + T_REG + 12T_CE2 + 3T_AO22 + T_AND4 + 2T_OR4 + 8T_OR2",
    "T_BUF + T_REG + 11T_CE2 + 3T_AO22 + T_AND4 + 2T_OR4 + 7T_OR2",
    "T_BUF + T_REG + 12T_CE2 + T_AO22 + 9T_OR2",
    "T_BUF + T_REG + 11T_CE2 + T_AO22 + 8T_OR2",
    "T_BUF + T_REG + 6T_CE2 + 9T_AO22 + 3T_OR2",
];

fn parse_printed(s: &str) -> LatencyExpr {
    let mut e = LatencyExpr::default();
    for term in s.split('+').map(str::trim) {
        let (count, name) = term.split_once("T_").expect("term has T_");
        let count: u64 = if count.is_empty() { 1 } else { count.parse().unwrap() };
        match name {
            "BUF" => e.includes_buffer = true,
            "REG" => e.includes_register = true,
            k => e.add(k.parse().unwrap(), count),
        }
    }
    e
}

fn c2_formula_table() -> Outcome {
    let table = latency_expr_table();
    if table.len() != 17 {
        return Err(format!("{} legends in table", table.len()));
    }
    for (i, text) in REFERENCE.iter().enumerate() {
        let l = AdderLegend::new(i as u8 + 1).unwrap();
        let want = parse_printed(text);
        if table[&l] != want {
            return Err(format!("{l}: table {} vs reference {text}", table[&l]));
        }
    }
    Ok("all 17 expressions match coefficient for coefficient, BUF and REG included".into())
}

fn c3_functional() -> Outcome {
    let opts = VerifyOptions::default();
    let mut lines = Vec::new();
    for w in [4u32, 8] {
        for s in [0usize, 2] {
            for r in [true, false] {
                let n = gen_hybrid_rca(AdderSpec::new(w as usize, s, r).unwrap());
                let rep = exhaustive_verify(&n, w, VerifyMode::Exhaustive, &opts).map_err(|e| e.to_string())?;
                let want = 1usize << (2 * w + 1);
                if rep.transactions != want || !rep.pass() || rep.illegal_transactions > 0 || rep.rtz_failures > 0 {
                    return Err(format!("w={w} s={s} redundant={r}: {rep:?}"));
                }
                lines.push(format!("{}", rep.transactions));
            }
        }
    }
    let n = staged(AdderSpec::new(32, 2, true).unwrap());
    let mode = VerifyMode::Random {
        seed: RANDOM_VECTOR_SEED,
        count: RANDOM_VECTORS_32,
    };
    let rep = exhaustive_verify(&n, 32, mode, &opts).map_err(|e| e.to_string())?;
    if rep.transactions != RANDOM_VECTORS_32 || !rep.pass() || rep.illegal_transactions > 0 || rep.rtz_failures > 0 {
        return Err(format!("32-bit random: {rep:?}"));
    }
    Ok(format!(
        "exhaustive widths 4 and 8 ({} transactions per configuration), {} random 32-bit vectors on the registered Adder11; 0 failures, 0 illegal, 0 RTZ failures",
        lines.join("/"),
        rep.transactions
    ))
}

fn c4_table2_report() -> Outcome {
    let r = compare_report(&ReportSource::Practical, None).map_err(|e| e.to_string())?;
    let row = |n: u8| r.row(AdderLegend::new(n).unwrap()).unwrap();
    for (n, claimed) in [(13u8, 35.3), (14, 30.5), (17, 13.0)] {
        let got = row(n).reduction_vs_adder11_percent;
        if (got - claimed).abs() > REDUCTION_TOL_PP {
            return Err(format!("Adder{n}: {got:.3}% vs {claimed}%"));
        }
    }
    for (n, computed, claimed) in [(15u8, 22.7, 20.2), (16, 15.7, 18.7)] {
        let x = row(n);
        if (x.reduction_vs_adder11_percent - computed).abs() > REDUCTION_TOL_PP
            || !x.discrepancy
            || x.claimed_reduction_percent != Some(claimed)
        {
            return Err(format!("Adder{n}: {x:?}"));
        }
    }
    if (row(11).normalized - 1.0).abs() > RATIO_EPS {
        return Err("Adder11 not normalized to 1".into());
    }
    let flagged: Vec<&str> = r.rows.iter().filter(|x| x.discrepancy).map(|x| x.legend.as_str()).collect();
    if flagged != ["Adder15", "Adder16"] {
        return Err(format!("unexpected discrepancy flags {flagged:?}"));
    }
    Ok(format!(
        "reductions 13: {:.1}%, 14: {:.1}%, 17: {:.1}%; 15: {:.1}% and 16: {:.1}% flagged against claimed 20.2%/18.7%",
        row(13).reduction_vs_adder11_percent,
        row(14).reduction_vs_adder11_percent,
        row(17).reduction_vs_adder11_percent,
        row(15).reduction_vs_adder11_percent,
        row(16).reduction_vs_adder11_percent
    ))
}

fn c5_redundancy() -> Outcome {
    use GateKind::*;
    let a5 = staged(AdderSpec::new(32, 0, false).unwrap());
    let a6 = staged(AdderSpec::new(32, 0, true).unwrap());
    let mut checked = 0;
    for (name, d) in battery() {
        if d.get(AO21) >= d.get(C2) + d.get(OR2) {
            continue;
        }
        checked += 1;
        let (l5, l6) = (
            critical_path(&a5, &d).unwrap().value,
            critical_path(&a6, &d).unwrap().value,
        );
        if l6 >= l5 {
            return Err(format!("{name}: Adder6 {l6} >= Adder5 {l5}"));
        }
    }
    let u = DelayTable::default();
    let (u5, u6) = (
        critical_path(&a5, &u).unwrap().value,
        critical_path(&a6, &u).unwrap().value,
    );
    let f5 = AdderLegend::new(5).unwrap().latency_expr().evaluate(&u);
    let f6 = AdderLegend::new(6).unwrap().latency_expr().evaluate(&u);
    if (u5, u6) != (f5, f6) || (u5, u6) != (35, 20) {
        return Err(format!("unit delays: Adder5 {u5} (formula {f5}), Adder6 {u6} (formula {f6})"));
    }
    Ok(format!(
        "Adder6 faster than Adder5 under all {checked} qualifying battery tables; unit delays Adder6 {u6}, Adder5 {u5} (both equal their closed forms)"
    ))
}

fn c6_sweep() -> Outcome {
    let s = sweep_hybrid(32, &DelayTable::example()).map_err(|e| e.to_string())?;
    let u = sweep_hybrid(32, &DelayTable::default()).map_err(|e| e.to_string())?;
    if s.argmin != [2] || u.argmin != [0, 2] {
        return Err(format!("example argmin {:?}, unit argmin {:?}", s.argmin, u.argmin));
    }
    Ok(format!(
        "example table argmin {{2}} at {}, unit delays tie {{0, 2}} at {}",
        s.curve[1].1, u.curve[0].1
    ))
}

fn c7_classification() -> Outcome {
    let d = DelayTable::default();
    let blocks: Vec<(&str, Netlist)> = vec![
        ("SAFA", gen_safa()),
        ("DAFA redundant", gen_dafa(true)),
        ("DAFA non-redundant", gen_dafa(false)),
        ("Adder11", gen_hybrid_rca(AdderSpec::new(32, 2, true).unwrap())),
    ];
    let mut notes = Vec::new();
    for (name, n) in &blocks {
        let r = classify_indication(n, &d, CLASSIFY_TRIALS, 1).map_err(|e| e.to_string())?;
        if r.indication != Indication::Early || r.early_set.is_empty() || r.early_reset.is_empty() {
            return Err(format!("{name}: {} ({})", r.indication, r.note()));
        }
        notes.push(format!("{name} early ({}/{})", r.early_set.len(), r.early_reset.len()));
    }
    let det = gen_completion_detector(4).unwrap();
    let r = classify_indication(&det, &d, CLASSIFY_TRIALS, 1).map_err(|e| e.to_string())?;
    if r.indication != Indication::Strong {
        return Err(format!("detector: {} ({})", r.indication, r.note()));
    }
    notes.push("4-pair detector strong".into());
    Ok(format!("{} [set/reset witnesses]", notes.join(", ")))
}

fn random_set(rng: &mut ChaCha8Rng) -> EquationSet {
    let k = rng.gen_range(2..=5);
    let variables: Vec<Variable> = (0..k)
        .map(|i| Variable::new(&format!("V{i}"), &format!("V{i}_1"), &format!("V{i}_0")))
        .collect();
    let products = (0..rng.gen_range(2..=6))
        .map(|_| {
            let mut lits = Vec::new();
            for var in 0..k {
                if rng.gen_bool(0.6) {
                    lits.push(Literal { var, high: rng.gen() });
                }
            }
            if lits.is_empty() {
                lits.push(Literal { var: 0, high: rng.gen() });
            }
            ProductTerm::new(lits).unwrap()
        })
        .collect();
    EquationSet {
        name: "synthetic".into(),
        variables,
        equations: vec![qdi_adder::verification::Equation {
            output: "F".into(),
            products,
        }],
        pairs: Vec::new(),
    }
}

fn c8_properties() -> Outcome {
    for eqs in [safa_equations(), dafa_equations()] {
        let ds = dsop_check(&eqs);
        let cv = monotonic_cover_check(&eqs);
        if !ds.pass || !cv.pass {
            return Err(format!("{}: dsop {:?} cover {:?}", eqs.name, ds.offending, cv.pass));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut verdicts = BTreeMap::new();
    for i in 0..SYNTHETIC_SETS {
        let set = random_set(&mut rng);
        let r = dsop_check(&set);
        if !r.checkers_agree {
            return Err(format!("structural and enumerative checks disagree on set {i}"));
        }
        *verdicts.entry(r.pass).or_insert(0usize) += 1;
    }
    Ok(format!(
        "10 equations pass both checks; checkers agree on {SYNTHETIC_SETS} random sets ({} disjoint, {} overlapping)",
        verdicts.get(&true).unwrap_or(&0),
        verdicts.get(&false).unwrap_or(&0)
    ))
}

fn c9_witness() -> Outcome {
    let d = DelayTable::default();
    let n = staged(AdderSpec::new(32, 2, true).unwrap());
    let cp = critical_path(&n, &d).unwrap().value;
    let m = u32::MAX as u128;
    let sim = adder_latency(&n, &d, 32, 1, m - 1, true).map_err(|e| e.to_string())?;
    // informational only
    let alt = adder_latency(&n, &d, 32, 1, m, false).map_err(|e| e.to_string())?;
    if sim != Some(cp) {
        return Err(format!("simulated {sim:?} vs critical path {cp}"));
    }
    Ok(format!(
        "A=1, B=0xFFFFFFFE, CIN=1 takes {} = critical path {cp}; A=1, B=0xFFFFFFFF, CIN=0 takes {}",
        sim.unwrap(),
        alt.map_or("-".into(), |t| t.to_string())
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 formula agreement", c1_formula_agreement),
        ("2 embedded formula table", c2_formula_table),
        ("3 functional correctness", c3_functional),
        ("4 comparison report", c4_table2_report),
        ("5 redundancy latency", c5_redundancy),
        ("6 hybrid optimum", c6_sweep),
        ("7 indication classes", c7_classification),
        ("8 equation properties", c8_properties),
        ("9 worst-case witness", c9_witness),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let r = f();
        let ms = t.elapsed().as_millis();
        match r {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{ms} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} [{ms} ms]");
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
