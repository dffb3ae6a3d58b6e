// SPDX-License-Identifier: Apache-2.0
//! `qdi-adder` command-line tool.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qdi_adder::delay::{DelayError, DelayTable};
use qdi_adder::generators::{
    gen_completion_detector, gen_dafa, gen_hybrid_rca, gen_safa, gen_stage, AdderSpec, GenError,
};
use qdi_adder::netlist::{gate_census, validate, Netlist, NetlistIoError};
use qdi_adder::simulator::{
    classify_indication, run_protocol_with, write_vcd, ClassifyError, InputVector, ProtocolOptions, SimError,
};
use qdi_adder::timing::{compare_report, critical_path, sweep_hybrid, AdderLegend, ReportSource, TimingError};
use qdi_adder::verification::{
    dafa_equations, dsop_check, equation_equivalence, exhaustive_verify, monotonic_cover_check, oracle_add,
    safa_equations, verification_vectors, VerifyError, VerifyMode, VerifyOptions,
};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 0x5EED;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  i/o or other error
  2  usage error (bad flags or circuit parameters)
  3  input file could not be parsed
  4  a verification check failed
  5  handshake deadlock";

mod exit {
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const CHECK: u8 = 4;
    pub const DEADLOCK: u8 = 5;
}

#[derive(Parser)]
#[command(name = "qdi-adder", version, about = "Generate, simulate, verify and time dual-rail early output adders", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a netlist and print its gate census.
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Output file (JSON); stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the four-phase handshake over a list of vectors.
    Sim {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        delays: DelayArgs,
        /// Vector file: `<hex a> <hex b> <cin>` per line, `#` comments.
        #[arg(long, conflicts_with = "count")]
        vectors: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of random vectors when no vector file is given.
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Largest input arrival skew per phase.
        #[arg(long, default_value_t = 3)]
        skew: u64,
        /// Write a value-change dump of the whole run.
        #[arg(long)]
        vcd: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a circuit against the addition oracle or its logic equations.
    Verify {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        delays: DelayArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Vector count in random mode.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Static critical path of a circuit.
    Sta {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        delays: DelayArgs,
        /// Analyse the bare function block without input registers.
        #[arg(long)]
        no_register: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Latency comparison of the seventeen reference adders.
    Compare {
        #[arg(long, value_enum, default_value_t = Source::Table2)]
        source: Source,
        #[command(flatten)]
        delays: DelayArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Restrict to these legends (repeatable), e.g. `--legend Adder13`.
        #[arg(long = "legend")]
        legends: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Classify a function block as strong, weak or early output.
    Classify {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        delays: DelayArgs,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Closed-form latency of every single-bit/dual-bit split of a width.
    Sweep {
        #[arg(long, default_value_t = 32)]
        width: usize,
        #[command(flatten)]
        delays: DelayArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CircuitKind {
    Safa,
    Dafa,
    Rca,
    Detector,
}

#[derive(Args)]
struct CircuitArgs {
    /// Circuit to generate (ignored with --netlist).
    #[arg(value_enum, required_unless_present = "netlist")]
    circuit: Option<CircuitKind>,
    /// Read the netlist from a JSON file instead of generating it.
    #[arg(long, conflicts_with = "circuit")]
    netlist: Option<PathBuf>,
    /// Adder width in bits.
    #[arg(long, default_value_t = 32)]
    width: usize,
    /// Single-bit stages in the least significant positions.
    #[arg(long, default_value_t = 2)]
    safa: usize,
    /// Carry logic with redundant AO21 gates (default).
    #[arg(long, conflicts_with = "non_redundant")]
    redundant: bool,
    /// Carry logic without the redundant gates.
    #[arg(long)]
    non_redundant: bool,
    /// Pair count of a standalone completion detector.
    #[arg(long, default_value_t = 4)]
    pairs: usize,
    /// Wrap the function block in a registered handshake stage.
    #[arg(long)]
    stage: bool,
}

#[derive(Args)]
struct DelayArgs {
    /// Delay table file (JSON); unit delays when omitted.
    #[arg(long)]
    delays: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Table2,
    Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Deadlock(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Parse(_) => exit::PARSE,
            CliError::Check(_) => exit::CHECK,
            CliError::Deadlock(_) => exit::DEADLOCK,
            CliError::Other(_) => exit::OTHER,
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<NetlistIoError> for CliError {
    fn from(e: NetlistIoError) -> Self {
        match e {
            NetlistIoError::Io(e) => CliError::Other(e.to_string()),
            e => CliError::Parse(e.to_string()),
        }
    }
}

impl From<DelayError> for CliError {
    fn from(e: DelayError) -> Self {
        match e {
            DelayError::Io(e) => CliError::Other(e.to_string()),
            e => CliError::Parse(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Deadlock { .. } => CliError::Deadlock(e.to_string()),
            SimError::InvalidNetlist(_) => CliError::Parse(e.to_string()),
            SimError::UnknownGroup(_) | SimError::MissingInput(_) | SimError::NoHandshake(_) => {
                CliError::Usage(e.to_string())
            }
            SimError::EventBound(_) => CliError::Check(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Sim(s) => s.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TimingError> for CliError {
    fn from(e: TimingError) -> Self {
        match e {
            TimingError::InvalidNetlist(_) => CliError::Parse(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Sim(s) => s.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

struct Loaded {
    netlist: Netlist,
    /// Adder width when the circuit is a generated or detected adder.
    width: Option<usize>,
    kind: Option<CircuitKind>,
    spec: Option<AdderSpec>,
}

impl CircuitArgs {
    fn redundant(&self) -> bool {
        !self.non_redundant
    }

    fn load(&self) -> Result<Loaded, CliError> {
        let (netlist, kind, spec) = match (&self.netlist, self.circuit) {
            (Some(path), _) => {
                let n = Netlist::read_file(path)?;
                let v = validate(&n);
                if !v.is_empty() {
                    let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    return Err(CliError::Parse(format!("invalid netlist: {}", msg.join("; "))));
                }
                (n, None, None)
            }
            (None, Some(CircuitKind::Safa)) => (gen_safa(), Some(CircuitKind::Safa), None),
            (None, Some(CircuitKind::Dafa)) => (gen_dafa(self.redundant()), Some(CircuitKind::Dafa), None),
            (None, Some(CircuitKind::Rca)) => {
                let spec = AdderSpec::new(self.width, self.safa, self.redundant())?;
                (gen_hybrid_rca(spec), Some(CircuitKind::Rca), Some(spec))
            }
            (None, Some(CircuitKind::Detector)) => (
                gen_completion_detector(self.pairs)?,
                Some(CircuitKind::Detector),
                None,
            ),
            (None, None) => return Err(CliError::Usage("no circuit given".into())),
        };
        let netlist = if self.stage && netlist.acks.is_none() {
            gen_stage(&netlist)?
        } else {
            netlist
        };
        let width = adder_width(&netlist);
        Ok(Loaded {
            netlist,
            width,
            kind,
            spec,
        })
    }
}

/// Width of a netlist with the generated adder port names, if it has them.
fn adder_width(n: &Netlist) -> Option<usize> {
    use qdi_adder::generators::ports;
    let w = n.outputs.len().checked_sub(1)?;
    let ok = w >= 1
        && n.inputs.len() == 2 * w + 1
        && (0..w).all(|i| n.input(&ports::a(i)).is_some() && n.input(&ports::b(i)).is_some())
        && n.input(ports::CIN).is_some()
        && (0..w).all(|i| n.output(&ports::sum(i)).is_some())
        && n.output(ports::COUT).is_some();
    ok.then_some(w)
}

fn delays(args: &DelayArgs) -> Result<DelayTable, CliError> {
    Ok(match &args.delays {
        Some(p) => DelayTable::read_file(p)?,
        None => DelayTable::default(),
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_vectors(path: &Path, width: usize) -> Result<Vec<(u128, u128, bool)>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| CliError::Parse(format!("{}:{}: {what}", path.display(), ln + 1));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(bad("expected `<hex a> <hex b> <cin>`"));
        }
        let hex = |s: &str| {
            let s = s.trim_start_matches("0x").trim_start_matches("0X");
            u128::from_str_radix(s, 16).map_err(|_| bad("bad hexadecimal operand"))
        };
        let (a, b) = (hex(f[0])?, hex(f[1])?);
        let cin = match f[2] {
            "0" => false,
            "1" => true,
            _ => return Err(bad("carry-in must be 0 or 1")),
        };
        if width < 128 && (a >> width != 0 || b >> width != 0) {
            return Err(bad(&format!("operand wider than {width} bits")));
        }
        out.push((a, b, cin));
    }
    Ok(out)
}

fn cmd_build(circuit: &CircuitArgs, output: Option<&Path>) -> Result<(), CliError> {
    let l = circuit.load()?;
    let census = gate_census(&l.netlist);
    let mut text = l.netlist.to_json();
    text.push('\n');
    match output {
        Some(p) => {
            fs::write(p, text)?;
            println!("{}: {} gates", l.netlist.name, census.total());
            println!("{census}");
        }
        None => {
            print!("{text}");
            eprintln!("{census}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sim(
    circuit: &CircuitArgs,
    d: &DelayArgs,
    vectors: Option<&Path>,
    seed: u64,
    count: usize,
    skew: u64,
    vcd: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let l = circuit.load()?;
    let d = delays(d)?;
    let stage = if l.netlist.acks.is_some() {
        l.netlist
    } else {
        gen_stage(&l.netlist)?
    };
    let width = l.width.ok_or_else(|| {
        CliError::Usage("sim needs an adder with A[i]/B[i]/CIN inputs and SUM[i]/COUT outputs".into())
    })?;
    let triples = match vectors {
        Some(p) => parse_vectors(p, width)?,
        None => verification_vectors(width as u32, VerifyMode::Random { seed, count })?,
    };
    let inputs: Vec<InputVector> = triples
        .iter()
        .map(|&(a, b, c)| InputVector::adder(width, a, b, c))
        .collect();
    let opts = ProtocolOptions {
        max_skew: skew,
        keep_logs: true,
        ..ProtocolOptions::default()
    };
    let r = run_protocol_with(&stage, &d, &inputs, seed, &opts)?;

    let mut text = String::from("vector,a,b,cin,sum,cout,latency,ok\n");
    let mut wrong = 0;
    for (i, ((a, b, cin), out)) in triples.iter().zip(&r.outputs).enumerate() {
        let (es, ec) = oracle_add(*a, *b, *cin, width as u32)?;
        let sum = (0..width).try_fold(0u128, |acc, k| {
            out.get(&qdi_adder::generators::ports::sum(k))
                .map(|&v| acc | (u128::from(v) << k))
        });
        let cout = out.get(qdi_adder::generators::ports::COUT).copied();
        let ok = sum == Some(es) && cout == Some(ec);
        wrong += usize::from(!ok);
        let lat = r.logs[i].latency.map_or("-".to_string(), |t| t.to_string());
        text.push_str(&format!(
            "{i},{a:x},{b:x},{},{},{},{lat},{ok}\n",
            u8::from(*cin),
            sum.map_or("-".into(), |s| format!("{s:x}")),
            cout.map_or("-".into(), |c| u8::from(c).to_string()),
        ));
    }
    text.push_str(&format!(
        "# transactions={} wrong={} illegal_events={} rtz_failures={} monotonic_violations={} max_latency={} {}\n",
        r.completed,
        wrong,
        r.illegal_events,
        r.rtz_failures,
        r.monotonic_violations,
        r.max_latency.map_or("-".into(), |t| t.to_string()),
        d.time_unit
    ));
    emit(output, &text)?;
    if let Some(p) = vcd {
        let f = fs::File::create(p)?;
        write_vcd(io::BufWriter::new(f), &stage.name, &r.logs)?;
    }
    if wrong > 0 || !r.clean() {
        return Err(CliError::Check(format!(
            "{wrong} wrong results, {} illegal events, {} RTZ failures",
            r.illegal_events, r.rtz_failures
        )));
    }
    Ok(())
}

fn cmd_verify(
    circuit: &CircuitArgs,
    d: &DelayArgs,
    mode: Mode,
    seed: u64,
    count: usize,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let l = circuit.load()?;
    let d = delays(d)?;
    let mut text = String::new();
    let pass = match (l.kind, l.width) {
        (Some(k @ (CircuitKind::Safa | CircuitKind::Dafa)), _) if !circuit.stage => {
            let eqs = if k == CircuitKind::Safa { safa_equations() } else { dafa_equations() };
            let ds = dsop_check(&eqs);
            let cv = monotonic_cover_check(&eqs);
            let eq = equation_equivalence(&l.netlist, &eqs)?;
            text.push_str(&format!("circuit: {}\n", l.netlist.name));
            text.push_str(&format!(
                "dsop: {} ({} product pairs)\n",
                verdict(ds.pass),
                ds.pairs_checked
            ));
            text.push_str(&format!("monotonic cover: {}\n", verdict(cv.pass)));
            text.push_str(&format!(
                "equation equivalence: {} ({} assignments)\n",
                verdict(eq.pass),
                eq.assignments
            ));
            ds.pass && cv.pass && eq.pass
        }
        (_, Some(w)) => {
            let vm = match mode {
                Mode::Exhaustive => VerifyMode::Exhaustive,
                Mode::Random => VerifyMode::Random { seed, count },
            };
            let opts = VerifyOptions {
                delays: d,
                ..VerifyOptions::default()
            };
            let r = exhaustive_verify(&l.netlist, w as u32, vm, &opts)?;
            text.push_str(&format!("circuit: {}\n", l.netlist.name));
            text.push_str(&format!(
                "mode: {}\n",
                match vm {
                    VerifyMode::Exhaustive => "exhaustive".to_string(),
                    VerifyMode::Random { seed, count } => format!("random (seed {seed}, count {count})"),
                }
            ));
            text.push_str(&format!("transactions: {}\n", r.transactions));
            text.push_str(&format!("failures: {}\n", r.failures));
            text.push_str(&format!("illegal: {}\n", r.illegal_transactions));
            text.push_str(&format!("rtz failures: {}\n", r.rtz_failures));
            if let Some(cx) = &r.first_failure {
                text.push_str(&format!(
                    "first failure: vector {} a={:x} b={:x} cin={} expected sum={:x} cout={} got {} ({})\n",
                    cx.index,
                    cx.a,
                    cx.b,
                    u8::from(cx.cin),
                    cx.expected.0,
                    u8::from(cx.expected.1),
                    cx.got.map_or("no valid output".into(), |(s, c)| format!("sum={s:x} cout={}", u8::from(c))),
                    cx.reason
                ));
            }
            text.push_str(&format!("result: {}\n", verdict(r.pass())));
            r.pass()
        }
        _ => {
            return Err(CliError::Usage(
                "verify needs safa, dafa or an adder netlist with the generated port names".into(),
            ))
        }
    };
    emit(output, &text)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Check("verification failed".into()))
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn legend_of(spec: &AdderSpec) -> Option<AdderLegend> {
    AdderLegend::all().find(|l| {
        l.adder_spec().is_some_and(|s| {
            s.width == spec.width
                && s.safa_stages == spec.safa_stages
                && (s.dafa_stages == 0 || s.redundant_carry == spec.redundant_carry)
        })
    })
}

fn cmd_sta(circuit: &CircuitArgs, d: &DelayArgs, no_register: bool, output: Option<&Path>) -> Result<(), CliError> {
    let l = circuit.load()?;
    let d = delays(d)?;
    let n = if circuit.netlist.is_none() && !no_register && l.netlist.acks.is_none() {
        gen_stage(&l.netlist)?
    } else {
        l.netlist
    };
    let cp = critical_path(&n, &d)?;
    let mut text = format!("circuit: {}\n", n.name);
    text.push_str(&format!("latency: {} {}\n", cp.value, d.time_unit));
    text.push_str(&format!("expr: {}\n", cp.expr));
    text.push_str(&format!("path: {}\n", cp.path.join(" -> ")));
    if let Some(legend) = l.spec.as_ref().and_then(legend_of) {
        let f = legend.latency_expr();
        text.push_str(&format!(
            "formula {legend}: {f}\nformula match: {}\n",
            if cp.expr.same_coefficients(&f) { "yes" } else { "no" }
        ));
    }
    emit(output, &text)
}

fn cmd_compare(
    source: Source,
    d: &DelayArgs,
    format: Format,
    legends: &[String],
    output: Option<&Path>,
) -> Result<(), CliError> {
    let src = match source {
        Source::Table2 => ReportSource::Practical,
        Source::Formula => ReportSource::Formula(delays(d)?),
    };
    let only = (!legends.is_empty()).then_some(legends);
    let r = compare_report(&src, only)?;
    let text = match format {
        Format::Csv => r.to_csv(),
        Format::Json => r.to_json() + "\n",
    };
    emit(output, &text)
}

fn cmd_classify(
    circuit: &CircuitArgs,
    d: &DelayArgs,
    trials: usize,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let l = circuit.load()?;
    let d = delays(d)?;
    let r = classify_indication(&l.netlist, &d, trials, seed)?;
    let mut text = format!("circuit: {}\nindication: {}\nnote: {}\n", l.netlist.name, r.indication, r.note());
    for (label, ws) in [("early-set", &r.early_set), ("early-reset", &r.early_reset)] {
        if let Some(w) = ws.iter().find(|w| w.all_outputs).or(ws.first()) {
            let vec: Vec<String> = w.vector.iter().map(|(g, v)| format!("{g}={}", u8::from(*v))).collect();
            text.push_str(&format!(
                "{label} witness: trial {} delayed {} outputs [{}] vector {}\n",
                w.trial,
                w.delayed,
                w.outputs.join(" "),
                vec.join(" ")
            ));
        }
    }
    emit(output, &text)
}

fn cmd_sweep(width: usize, d: &DelayArgs, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    let d = delays(d)?;
    let s = sweep_hybrid(width, &d)?;
    let text = match format {
        Format::Csv => {
            let mut t = String::from("safa_stages,dafa_stages,latency,optimal\n");
            for &(k, lat) in &s.curve {
                t.push_str(&format!(
                    "{k},{},{lat},{}\n",
                    (width - k) / 2,
                    s.argmin.contains(&k)
                ));
            }
            let am: Vec<String> = s.argmin.iter().map(|k| k.to_string()).collect();
            t.push_str(&format!("# argmin: {{{}}}\n", am.join(", ")));
            t
        }
        Format::Json => serde_json::to_string_pretty(&s).expect("serializable") + "\n",
    };
    emit(output, &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { circuit, output } => cmd_build(&circuit, output.as_deref()),
        Command::Sim {
            circuit,
            delays,
            vectors,
            seed,
            count,
            skew,
            vcd,
            output,
        } => cmd_sim(
            &circuit,
            &delays,
            vectors.as_deref(),
            seed,
            count,
            skew,
            vcd.as_deref(),
            output.as_deref(),
        ),
        Command::Verify {
            circuit,
            delays,
            mode,
            seed,
            count,
            output,
        } => cmd_verify(&circuit, &delays, mode, seed, count, output.as_deref()),
        Command::Sta {
            circuit,
            delays,
            no_register,
            output,
        } => cmd_sta(&circuit, &delays, no_register, output.as_deref()),
        Command::Compare {
            source,
            delays,
            format,
            legends,
            output,
        } => cmd_compare(source, &delays, format, &legends, output.as_deref()),
        Command::Classify {
            circuit,
            delays,
            trials,
            seed,
            output,
        } => cmd_classify(&circuit, &delays, trials, seed, output.as_deref()),
        Command::Sweep {
            width,
            delays,
            format,
            output,
        } => cmd_sweep(width, &delays, format, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
