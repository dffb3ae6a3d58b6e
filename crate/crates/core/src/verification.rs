// SPDX-License-Identifier: Apache-2.0
//! Functional oracles and checks on the dual-rail logic equations.
//!
//! Equations are sums of products over rails of dual-rail variables. The
//! valid-input universe assigns each variable 0 or 1 (spacer excluded); a
//! literal `X1` is true when X is 1, `X0` when X is 0.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::delay::{DelayTable, Time};
use crate::generators::ports;
use crate::netlist::Netlist;
use crate::simulator::{run_transaction, simulate_transaction, Compiled, SimError, Simulator, Stimulus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("operand {value} does not fit in {width} bits")]
    OperandOutOfRange { value: u128, width: u32 },
    #[error("width must be between 1 and 128, got {0}")]
    BadWidth(u32),
    #[error("exhaustive mode supports widths up to {max}, got {width}")]
    TooWideForExhaustive { width: u32, max: u32 },
    #[error("product {0:?} contains both rails of {1}")]
    ContradictoryProduct(String, String),
    #[error("unknown rail {rail:?} in equation for {output}")]
    UnknownRail { output: String, rail: String },
    #[error("malformed equation line {0:?}")]
    Malformed(String),
    #[error("netlist ports do not match: {0}")]
    PortMismatch(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// `(a + b + cin) mod 2^width` and the carry out.
pub fn oracle_add(a: u128, b: u128, cin: bool, width: u32) -> Result<(u128, bool), VerifyError> {
    if width == 0 || width > 128 {
        return Err(VerifyError::BadWidth(width));
    }
    let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
    for v in [a, b] {
        if v & !mask != 0 {
            return Err(VerifyError::OperandOutOfRange { value: v, width });
        }
    }
    let (s1, c1) = a.overflowing_add(b);
    let (s2, c2) = s1.overflowing_add(u128::from(cin));
    if width == 128 {
        Ok((s2, c1 || c2))
    } else {
        Ok((s2 & mask, (s2 >> width) & 1 == 1))
    }
}

/// A dual-rail variable and its two rail names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub rail1: String,
    pub rail0: String,
}

impl Variable {
    pub fn new(name: &str, rail1: &str, rail0: &str) -> Self {
        Self {
            name: name.into(),
            rail1: rail1.into(),
            rail0: rail0.into(),
        }
    }
}

/// One rail of variable number `var`: `high` picks rail1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub high: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductTerm {
    literals: BTreeSet<Literal>,
}

impl ProductTerm {
    /// Fails with the offending variable index if both rails of one
    /// variable appear.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, usize> {
        let literals: BTreeSet<Literal> = literals.into_iter().collect();
        let mut seen = BTreeMap::new();
        for l in &literals {
            if seen.insert(l.var, l.high).is_some() {
                return Err(l.var);
            }
        }
        Ok(Self { literals })
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.literals.iter().copied()
    }

    pub fn eval(&self, values: &[bool]) -> bool {
        self.literals.iter().all(|l| values[l.var] == l.high)
    }

    /// Opposite-rail rule: some variable appears with different rails.
    pub fn disjoint_structural(&self, other: &ProductTerm) -> bool {
        self.literals
            .iter()
            .any(|l| other.literals.contains(&Literal { var: l.var, high: !l.high }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    /// Output rail name.
    pub output: String,
    pub products: Vec<ProductTerm>,
}

/// Complementary output equations forming one dual-rail output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPair {
    pub group: String,
    pub rail1: usize,
    pub rail0: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSet {
    pub name: String,
    pub variables: Vec<Variable>,
    pub equations: Vec<Equation>,
    pub pairs: Vec<OutputPair>,
}

impl EquationSet {
    /// Parses lines of the form `OUT = P1 + P2 + ...` where each product
    /// is a concatenation of rail names, tokenized longest match first.
    /// `pairs` lists `(group, rail1 output, rail0 output)`.
    pub fn parse(
        name: &str,
        variables: Vec<Variable>,
        text: &str,
        pairs: &[(&str, &str, &str)],
    ) -> Result<Self, VerifyError> {
        let mut rails: Vec<(&str, Literal)> = Vec::new();
        for (i, v) in variables.iter().enumerate() {
            rails.push((&v.rail1, Literal { var: i, high: true }));
            rails.push((&v.rail0, Literal { var: i, high: false }));
        }
        rails.sort_by_key(|(r, _)| std::cmp::Reverse(r.len()));

        let mut equations = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (out, rhs) = line
                .split_once('=')
                .ok_or_else(|| VerifyError::Malformed(line.to_string()))?;
            let output = out.trim().to_string();
            let mut products = Vec::new();
            for p in rhs.split('+').map(str::trim) {
                let mut lits = Vec::new();
                let mut rest = p;
                while !rest.is_empty() {
                    let (r, l) = rails
                        .iter()
                        .find(|(r, _)| rest.starts_with(r))
                        .ok_or_else(|| VerifyError::UnknownRail {
                            output: output.clone(),
                            rail: rest.to_string(),
                        })?;
                    lits.push(*l);
                    rest = &rest[r.len()..];
                }
                if lits.is_empty() {
                    return Err(VerifyError::Malformed(line.to_string()));
                }
                let term = ProductTerm::new(lits).map_err(|v| {
                    VerifyError::ContradictoryProduct(p.to_string(), variables[v].name.clone())
                })?;
                products.push(term);
            }
            equations.push(Equation { output, products });
        }
        let find = |o: &str| {
            equations
                .iter()
                .position(|e| e.output == o)
                .ok_or_else(|| VerifyError::Malformed(format!("no equation for {o}")))
        };
        let pairs = pairs
            .iter()
            .map(|&(g, r1, r0)| {
                Ok(OutputPair {
                    group: g.to_string(),
                    rail1: find(r1)?,
                    rail0: find(r0)?,
                })
            })
            .collect::<Result<Vec<_>, VerifyError>>()?;
        Ok(Self {
            name: name.to_string(),
            variables,
            equations,
            pairs,
        })
    }

    /// Every valid assignment, variable 0 as the least significant bit.
    pub fn assignments(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        let k = self.variables.len();
        (0..1u64 << k).map(move |m| (0..k).map(|i| (m >> i) & 1 == 1).collect())
    }

    /// Output rail levels for one valid assignment.
    pub fn evaluate(&self, values: &[bool]) -> BTreeMap<String, bool> {
        self.equations
            .iter()
            .map(|e| (e.output.clone(), e.products.iter().any(|p| p.eval(values))))
            .collect()
    }

    pub fn render_product(&self, p: &ProductTerm) -> String {
        p.literals()
            .map(|l| {
                let v = &self.variables[l.var];
                if l.high { v.rail1.clone() } else { v.rail0.clone() }
            })
            .collect()
    }
}

const SAFA_EQUATIONS: &str = "
SUM1 = A0B0CIN1 + A0B1CIN0 + A1B0CIN0 + A1B1CIN1
SUM0 = A0B0CIN0 + A0B1CIN1 + A1B0CIN1 + A1B1CIN0
COUT1 = A0B1CIN1 + A1B0CIN1 + A1B1CIN0 + A1B1CIN1
COUT0 = A0B0CIN0 + A0B0CIN1 + A0B1CIN0 + A1B0CIN0
";

const DAFA_EQUATIONS: &str = "
SUM11 = A11A01B10B00CIN0 + A10A01B11B00CIN0 + A11A00B10B01CIN0 + A10A00B11B01CIN0 + A11A00B11B01CIN1 + A11A01B11B00CIN1 + A10A00B10B01CIN1 + A10A01B10B00CIN1 + A10A01B10B01 + A11A00B10B00 + A10A00B11B00 + A11A01B11B01
SUM10 = A11A01B10B00CIN1 + A10A01B11B00CIN1 + A11A00B10B01CIN1 + A10A00B11B01CIN1 + A10A01B10B00CIN0 + A10A00B10B01CIN0 + A11A01B11B00CIN0 + A11A00B11B01CIN0 + A11A00B11B00 + A11A01B10B01 + A10A01B11B01 + A10A00B10B00
SUM01 = A01B00CIN0 + A00B01CIN0 + A00B00CIN1 + A01B01CIN1
SUM00 = A01B01CIN0 + A01B00CIN1 + A00B01CIN1 + A00B00CIN0
COUT21 = A10A00B11B01CIN1 + A11A00B10B01CIN1 + A10A01B11B00CIN1 + A11A01B10B00CIN1 + A10A01B11B01 + A11A01B10B01 + A11B11
COUT20 = A11A01B10B00CIN0 + A10A01B11B00CIN0 + A11A00B10B01CIN0 + A10A00B11B01CIN0 + A11A00B10B00 + A10A00B11B00 + A10B10
";

/// Sum and carry equations of the single-bit adder (four outputs).
pub fn safa_equations() -> EquationSet {
    EquationSet::parse(
        "safa",
        vec![
            Variable::new("A", "A1", "A0"),
            Variable::new("B", "B1", "B0"),
            Variable::new("CIN", "CIN1", "CIN0"),
        ],
        SAFA_EQUATIONS,
        &[("SUM", "SUM1", "SUM0"), ("COUT", "COUT1", "COUT0")],
    )
    .expect("embedded equations parse")
}

/// Sum and carry equations of the dual-bit adder (six outputs).
pub fn dafa_equations() -> EquationSet {
    EquationSet::parse(
        "dafa",
        vec![
            Variable::new("A1", "A11", "A10"),
            Variable::new("A0", "A01", "A00"),
            Variable::new("B1", "B11", "B10"),
            Variable::new("B0", "B01", "B00"),
            Variable::new("CIN", "CIN1", "CIN0"),
        ],
        DAFA_EQUATIONS,
        &[
            ("SUM1", "SUM11", "SUM10"),
            ("SUM0", "SUM01", "SUM00"),
            ("COUT", "COUT21", "COUT20"),
        ],
    )
    .expect("embedded equations parse")
}

/// Enumerative disjointness: no valid assignment satisfies both products.
pub fn disjoint_enumerative(eqs: &EquationSet, p: &ProductTerm, q: &ProductTerm) -> bool {
    !eqs.assignments().any(|v| p.eval(&v) && q.eval(&v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub output: String,
    pub first: String,
    pub second: String,
    /// A valid assignment satisfying both, one value per variable.
    pub witness: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsopReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub offending: Option<Overlap>,
    /// Structural and enumerative verdicts matched on every pair.
    pub checkers_agree: bool,
}

/// Checks that every two products of each output are disjoint, by the
/// opposite-rail rule and by enumeration.
pub fn dsop_check(eqs: &EquationSet) -> DsopReport {
    let mut pairs_checked = 0;
    let mut offending = None;
    let mut checkers_agree = true;
    for e in &eqs.equations {
        for (i, p) in e.products.iter().enumerate() {
            for q in &e.products[i + 1..] {
                pairs_checked += 1;
                let s = p.disjoint_structural(q);
                let n = disjoint_enumerative(eqs, p, q);
                checkers_agree &= s == n;
                if !n && offending.is_none() {
                    let witness = eqs
                        .assignments()
                        .find(|v| p.eval(v) && q.eval(v))
                        .expect("overlap has a witness");
                    offending = Some(Overlap {
                        output: e.output.clone(),
                        first: eqs.render_product(p),
                        second: eqs.render_product(q),
                        witness,
                    });
                }
            }
        }
    }
    DsopReport {
        pass: offending.is_none() && checkers_agree,
        pairs_checked,
        offending,
        checkers_agree,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCover {
    pub group: String,
    pub assignments: usize,
    pub products: usize,
    /// Assignments with a number of active products other than one.
    pub violations: Vec<(Vec<bool>, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub pass: bool,
    pub pairs: Vec<PairCover>,
}

/// For each output pair, exactly one product over both rails' equations is
/// active on every valid input.
pub fn monotonic_cover_check(eqs: &EquationSet) -> CoverReport {
    let pairs: Vec<PairCover> = eqs
        .pairs
        .iter()
        .map(|pr| {
            let products: Vec<&ProductTerm> = eqs.equations[pr.rail1]
                .products
                .iter()
                .chain(&eqs.equations[pr.rail0].products)
                .collect();
            let mut assignments = 0;
            let mut violations = Vec::new();
            for v in eqs.assignments() {
                assignments += 1;
                let active = products.iter().filter(|p| p.eval(&v)).count();
                if active != 1 {
                    violations.push((v, active));
                }
            }
            PairCover {
                group: pr.group.clone(),
                assignments,
                products: products.len(),
                violations,
            }
        })
        .collect();
    CoverReport {
        pass: pairs.iter().all(|p| p.violations.is_empty()),
        pairs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub pass: bool,
    pub assignments: usize,
    /// First mismatching assignment and the output group that differed.
    pub mismatch: Option<(Vec<bool>, String)>,
}

/// Steady-state netlist outputs against equation evaluation on every valid
/// input. Input groups and rails must match the equation variables, and
/// output rails must match the equation outputs.
pub fn equation_equivalence(n: &Netlist, eqs: &EquationSet) -> Result<EquivalenceReport, VerifyError> {
    for v in &eqs.variables {
        match n.input(&v.name) {
            Some(p) if p.rail1 == v.rail1 && p.rail0 == v.rail0 => {}
            _ => return Err(VerifyError::PortMismatch(format!("input {} ({}, {})", v.name, v.rail1, v.rail0))),
        }
    }
    if n.inputs.len() != eqs.variables.len() {
        return Err(VerifyError::PortMismatch("extra netlist inputs".into()));
    }
    for pr in &eqs.pairs {
        let (r1, r0) = (&eqs.equations[pr.rail1].output, &eqs.equations[pr.rail0].output);
        match n.output(&pr.group) {
            Some(p) if &p.rail1 == r1 && &p.rail0 == r0 => {}
            _ => return Err(VerifyError::PortMismatch(format!("output {} ({r1}, {r0})", pr.group))),
        }
    }
    let c = Compiled::new(n, &DelayTable::default())?;
    let mut sim = Simulator::new(&c);
    let mut assignments = 0;
    for v in eqs.assignments() {
        assignments += 1;
        let stim: Vec<Stimulus> = eqs
            .variables
            .iter()
            .zip(&v)
            .map(|(var, &b)| Stimulus::at(var.name.clone(), b, 0))
            .collect();
        let log = run_transaction(&mut sim, &stim)?;
        let expect = eqs.evaluate(&v);
        for pr in &eqs.pairs {
            let e1 = expect[&eqs.equations[pr.rail1].output];
            let e0 = expect[&eqs.equations[pr.rail0].output];
            let got = log.output(&pr.group).and_then(|o| o.value);
            let want = match (e1, e0) {
                (true, false) => Some(true),
                (false, true) => Some(false),
                _ => None,
            };
            if want.is_none() || got != want {
                return Ok(EquivalenceReport {
                    pass: false,
                    assignments,
                    mismatch: Some((v, pr.group.clone())),
                });
            }
        }
    }
    Ok(EquivalenceReport {
        pass: true,
        assignments,
        mismatch: None,
    })
}

/// Largest width accepted by exhaustive verification.
pub const MAX_EXHAUSTIVE_WIDTH: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// All `2^(2w+1)` operand combinations.
    Exhaustive,
    /// `count` operand triples drawn from a generator seeded with `seed`.
    Random { seed: u64, count: usize },
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub delays: DelayTable,
    /// Each input pair arrives up to this long after the phase starts,
    /// derived from the vector index.
    pub max_skew: Time,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            delays: DelayTable::default(),
            max_skew: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub index: usize,
    pub a: u128,
    pub b: u128,
    pub cin: bool,
    pub expected: (u128, bool),
    /// Decoded `(sum, cout)`, `None` when some output never became valid.
    pub got: Option<(u128, bool)>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub transactions: usize,
    pub failures: usize,
    pub illegal_transactions: usize,
    pub rtz_failures: usize,
    pub monotonic_violations: usize,
    /// Worst forward latency over the vectors that completed.
    pub max_latency: Option<Time>,
    /// Lowest-index failing vector.
    pub first_failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    fn merge(mut self, o: VerifyReport) -> VerifyReport {
        self.transactions += o.transactions;
        self.failures += o.failures;
        self.illegal_transactions += o.illegal_transactions;
        self.rtz_failures += o.rtz_failures;
        self.monotonic_violations += o.monotonic_violations;
        self.max_latency = self.max_latency.max(o.max_latency);
        self.first_failure = match (self.first_failure, o.first_failure) {
            (Some(a), Some(b)) => Some(if a.index <= b.index { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Operand triples exercised by `mode`, in index order. Exhaustive order
/// has `cin` fastest, then `b`, then `a`.
pub fn verification_vectors(width: u32, mode: VerifyMode) -> Result<Vec<(u128, u128, bool)>, VerifyError> {
    if width == 0 || width > 128 {
        return Err(VerifyError::BadWidth(width));
    }
    match mode {
        VerifyMode::Exhaustive => {
            if width > MAX_EXHAUSTIVE_WIDTH {
                return Err(VerifyError::TooWideForExhaustive {
                    width,
                    max: MAX_EXHAUSTIVE_WIDTH,
                });
            }
            let n = 1u128 << width;
            Ok((0..n * n * 2)
                .map(|k| (k >> (width + 1), (k >> 1) & (n - 1), k & 1 == 1))
                .collect())
        }
        VerifyMode::Random { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
            Ok((0..count)
                .map(|_| (rng.gen::<u128>() & mask, rng.gen::<u128>() & mask, rng.gen()))
                .collect())
        }
    }
}

/// Simulates one transaction per vector and checks decoded outputs against
/// [`oracle_add`], RTZ completeness, codeword legality and per-phase
/// monotonicity. Vectors are spread over worker threads; the result does
/// not depend on the thread count.
pub fn exhaustive_verify(
    n: &Netlist,
    width: u32,
    mode: VerifyMode,
    opts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let w = width as usize;
    for g in (0..w).flat_map(|i| [ports::a(i), ports::b(i)]).chain([ports::CIN.to_string()]) {
        if n.input(&g).is_none() {
            return Err(VerifyError::PortMismatch(format!("missing input {g}")));
        }
    }
    for g in (0..w).map(ports::sum).chain([ports::COUT.to_string()]) {
        if n.output(&g).is_none() {
            return Err(VerifyError::PortMismatch(format!("missing output {g}")));
        }
    }
    if n.inputs.len() != 2 * w + 1 || n.outputs.len() != w + 1 {
        return Err(VerifyError::PortMismatch(format!("netlist is not a {width}-bit adder")));
    }
    let vectors = verification_vectors(width, mode)?;
    let c = Compiled::new(n, &opts.delays)?;

    const CHUNK: usize = 512;
    let report = vectors
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| -> Result<VerifyReport, VerifyError> {
            let mut sim = Simulator::new(&c);
            let mut r = VerifyReport::default();
            for (k, &(a, b, cin)) in chunk.iter().enumerate() {
                let index = ci * CHUNK + k;
                let stim = adder_stimuli(w, a, b, cin, index, opts.max_skew);
                let log = run_transaction(&mut sim, &stim)?;
                r.transactions += 1;
                r.max_latency = r.max_latency.max(log.latency);
                let expected = oracle_add(a, b, cin, width)?;
                let got = decode_adder(&log, w);
                let mut reasons = Vec::new();
                if got != Some(expected) {
                    reasons.push("wrong sum");
                }
                if log.illegal_seen {
                    r.illegal_transactions += 1;
                    reasons.push("illegal codeword");
                }
                if !log.rtz_complete {
                    r.rtz_failures += 1;
                    reasons.push("incomplete return to zero");
                }
                if log.monotonic_violations > 0 {
                    r.monotonic_violations += log.monotonic_violations;
                    reasons.push("non-monotonic transition");
                }
                if !reasons.is_empty() {
                    r.failures += 1;
                    if r.first_failure.is_none() {
                        r.first_failure = Some(Counterexample {
                            index,
                            a,
                            b,
                            cin,
                            expected,
                            got,
                            reason: reasons.join(", "),
                        });
                    }
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(VerifyReport::default(), VerifyReport::merge);
    Ok(report)
}

fn adder_stimuli(w: usize, a: u128, b: u128, cin: bool, index: usize, max_skew: Time) -> Vec<Stimulus> {
    let mut rng = ChaCha8Rng::seed_from_u64(index as u64);
    let mut skew = || if max_skew == 0 { 0 } else { rng.gen_range(0..=max_skew) };
    let mut s = Vec::with_capacity(2 * w + 1);
    for i in 0..w {
        s.push(Stimulus::at(ports::a(i), (a >> i) & 1 == 1, skew()));
        s.push(Stimulus::at(ports::b(i), (b >> i) & 1 == 1, skew()));
    }
    s.push(Stimulus::at(ports::CIN, cin, skew()));
    s
}

fn decode_adder(log: &crate::simulator::TransactionLog, w: usize) -> Option<(u128, bool)> {
    let mut sum = 0u128;
    for i in 0..w {
        if log.output(&ports::sum(i))?.value? {
            sum |= 1 << i;
        }
    }
    Some((sum, log.output(ports::COUT)?.value?))
}

/// Simulated forward latency of one operand triple, all inputs applied at
/// time 0.
pub fn adder_latency(n: &Netlist, d: &DelayTable, width: usize, a: u128, b: u128, cin: bool) -> Result<Option<Time>, VerifyError> {
    let stim = adder_stimuli(width, a, b, cin, 0, 0);
    Ok(simulate_transaction(n, d, &stim)?.latency)
}
