use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prockit::compose::{self, CommFn};
use prockit::equiv::{
    branching_bisim, confirm_distinguisher, is_determinate, lang_eq, minimize, rooted_branching_bisim,
    strong_bisim, trace_eq, verify_witness, EquivResult, Relation,
};
use prockit::hml::strong_distinguishing_formula;
use prockit::expr::{parse_expr, parse_label_set, sos_lts};
use prockit::lts::isomorphism;
use prockit::models::{self, Model};
use prockit::petri::{self, Net};
use prockit::recspec::{unfold, RecSpec};
use prockit::Lts;
use thiserror::Error;

const DEFAULT_BOUND: usize = 100_000;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

/// What a command produced: text for stdout, and whether the verdict was negative.
struct Report {
    text: String,
    negative: bool,
    /// Set when the output is a truncated state space.
    truncated: Option<String>,
}

impl Report {
    fn ok(text: String) -> Report {
        Report { text, negative: false, truncated: None }
    }
}

#[derive(Parser)]
#[command(name = "prockit", version, about = "Transition systems, process expressions, nets and their equivalences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Communication function file (`comm a b -> c` lines).
    #[arg(long)]
    comm: Option<PathBuf>,
    /// State budget for exploring expressions, specifications and nets.
    #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = positive)]
    bound: usize,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit Graphviz instead of the text format where a system is printed.
    #[arg(long)]
    dot: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the syntax of a file and print it in canonical form.
    Parse {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build the transition system of an expression, specification or net.
    Lts {
        /// Input file; its extension selects the format (.lts, .net, .spec, otherwise an expression).
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["file", "net", "expr"])]
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["file", "spec", "expr"])]
        net: Option<PathBuf>,
        /// Expression given inline.
        #[arg(long, conflicts_with_all = ["file", "spec", "net"])]
        expr: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Combine transition systems.
    Compose {
        op: ComposeOp,
        first: PathBuf,
        second: Option<PathBuf>,
        /// Label set for encap and hide, e.g. `{a, s1(0)}`.
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two systems; exits 0 when related and 1 otherwise.
    Check {
        relation: CheckRel,
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Quotient by the largest strong or branching bisimulation.
    Minimize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MinRel::Branching)]
        relation: MinRel,
        #[command(flatten)]
        common: Common,
    },
    /// Print structural properties.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run one of the built-in verification pipelines.
    Demo {
        which: Demo,
        #[command(flatten)]
        common: Common,
    },
    /// Render a transition system or net as Graphviz.
    Dot {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Unfold a recursive specification from its root.
    Unfold {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a catalogued example, e.g. `model buffer l=2 D=0,1`.
    Model {
        name: String,
        /// Parameters as key=value.
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComposeOp {
    Par,
    Alt,
    Seq,
    Star,
    Omega,
    Encap,
    Hide,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckRel {
    Iso,
    Trace,
    Lang,
    Bisim,
    Branching,
    Rbranching,
}

impl CheckRel {
    fn name(self) -> &'static str {
        match self {
            CheckRel::Iso => "iso",
            CheckRel::Trace => "trace",
            CheckRel::Lang => "lang",
            CheckRel::Bisim => "bisim",
            CheckRel::Branching => "branching",
            CheckRel::Rbranching => "rbranching",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MinRel {
    Strong,
    Branching,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Abp,
    Buffers,
    Scheduler,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {e}", path.display()))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn load_comm(common: &Common) -> Result<CommFn, CliError> {
    match &common.comm {
        None => Ok(CommFn::new()),
        Some(p) => {
            let g = CommFn::parse_text(&read(p)?).map_err(|e| parse_err(p, e))?;
            g.validate().map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok(g)
        }
    }
}

/// A system together with the reason it is incomplete, if it is.
struct Loaded {
    lts: Lts,
    truncated: Option<String>,
}

fn truncation(path: &Path, bound: usize, frontier: usize) -> String {
    format!("{}: truncated at {bound} states, {frontier} unexplored", path.display())
}

fn load_system(path: &Path, common: &Common) -> Result<Loaded, CliError> {
    let text = read(path)?;
    let bound = common.bound;
    match extension(path) {
        "lts" => Ok(Loaded { lts: Lts::parse_text(&text).map_err(|e| parse_err(path, e))?, truncated: None }),
        "net" => load_net(path, &text, bound),
        "spec" => load_spec(path, &text, common),
        _ => {
            let p = parse_expr(&text).map_err(|e| parse_err(path, e))?;
            let r = sos_lts(&p, &load_comm(common)?, bound).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let truncated = (!r.complete).then(|| truncation(path, bound, r.frontier.len()));
            Ok(Loaded { lts: r.lts, truncated })
        }
    }
}

fn load_net(path: &Path, text: &str, bound: usize) -> Result<Loaded, CliError> {
    let n = Net::parse_text(text).map_err(|e| parse_err(path, e))?;
    let s = petri::trsy(&n, bound);
    let truncated = (!s.complete).then(|| format!("{}: truncated at {bound} markings", path.display()));
    Ok(Loaded { lts: s.lts, truncated })
}

fn load_spec(path: &Path, text: &str, common: &Common) -> Result<Loaded, CliError> {
    let s = RecSpec::parse(text).map_err(|e| parse_err(path, e))?;
    let u = unfold(&s, &load_comm(common)?, common.bound).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let truncated = (!u.complete).then(|| truncation(path, common.bound, u.frontier.len()));
    Ok(Loaded { lts: u.lts, truncated })
}

/// A system that must be complete to be compared or transformed.
fn load_complete(path: &Path, common: &Common) -> Result<Lts, CliError> {
    let l = load_system(path, common)?;
    match l.truncated {
        Some(t) => Err(CliError::Budget(t)),
        None => Ok(l.lts),
    }
}

fn render(l: &Lts, common: &Common) -> String {
    if common.dot {
        l.to_dot()
    } else {
        l.to_text()
    }
}

fn system_report(l: Loaded, common: &Common) -> Report {
    Report { text: render(&l.lts, common), negative: false, truncated: l.truncated }
}

fn cmd_parse(file: &Path) -> Result<Report, CliError> {
    let text = read(file)?;
    let out = match extension(file) {
        "lts" => Lts::parse_text(&text).map_err(|e| parse_err(file, e))?.to_text(),
        "net" => Net::parse_text(&text).map_err(|e| parse_err(file, e))?.to_text(),
        "spec" => RecSpec::parse(&text).map_err(|e| parse_err(file, e))?.to_text(),
        "comm" => CommFn::parse_text(&text).map_err(|e| parse_err(file, e))?.to_text(),
        _ => format!("{}\n", parse_expr(&text).map_err(|e| parse_err(file, e))?),
    };
    Ok(Report::ok(out))
}

fn cmd_compose(op: ComposeOp, first: &Path, second: Option<&Path>, set: Option<&str>, common: &Common) -> Result<Report, CliError> {
    let a = load_complete(first, common)?;
    let need_second = || -> Result<Lts, CliError> {
        let p = second.ok_or_else(|| CliError::Usage("this operator takes two systems".into()))?;
        load_complete(p, common)
    };
    let need_set = || -> Result<std::collections::BTreeSet<String>, CliError> {
        let s = set.ok_or_else(|| CliError::Usage("this operator needs --set".into()))?;
        parse_label_set(s).map_err(|e| CliError::Usage(format!("--set: {e}")))
    };
    let single = || -> Result<(), CliError> {
        match second {
            Some(_) => Err(CliError::Usage("this operator takes one system".into())),
            None => Ok(()),
        }
    };
    let usage = |e: prockit::ComposeError| CliError::Usage(e.to_string());
    let l = match op {
        ComposeOp::Par => compose::parallel(&a, &need_second()?, &load_comm(common)?).map_err(usage)?,
        ComposeOp::Alt => compose::alt(&a, &need_second()?),
        ComposeOp::Seq => compose::seq(&a, &need_second()?),
        ComposeOp::Star => compose::star(&a, &need_second()?),
        ComposeOp::Omega => {
            single()?;
            compose::omega(&a)
        }
        ComposeOp::Encap => {
            single()?;
            compose::encap(&need_set()?, &a).map_err(usage)?
        }
        ComposeOp::Hide => {
            single()?;
            compose::hide(&need_set()?, &a).map_err(usage)?
        }
    };
    Ok(Report::ok(render(&l, common)))
}

/// Runs a comparison and writes the verdict plus the evidence behind it.
fn verdict(rel: CheckRel, a: &Lts, b: &Lts, out: &mut String) -> bool {
    let r: EquivResult = match rel {
        CheckRel::Iso => {
            let w = isomorphism(a, b);
            EquivResult { equivalent: w.is_some(), witness: w, distinguisher: None }
        }
        CheckRel::Trace => trace_eq(a, b),
        CheckRel::Lang => lang_eq(a, b),
        CheckRel::Bisim => strong_bisim(a, b),
        CheckRel::Branching => branching_bisim(a, b),
        CheckRel::Rbranching => rooted_branching_bisim(a, b),
    };
    let _ = writeln!(out, "RESULT: {} {}", rel.name(), r.equivalent);
    if let Some(w) = &r.witness {
        let checked = match rel {
            CheckRel::Iso | CheckRel::Bisim => Some(verify_witness(a, b, w, Relation::Strong, false, false)),
            CheckRel::Branching => Some(verify_witness(a, b, w, Relation::Branching, false, false)),
            CheckRel::Rbranching => Some(verify_witness(a, b, w, Relation::Branching, true, false)),
            _ => None,
        };
        let note = match checked {
            Some(true) => ", verified",
            Some(false) => ", FAILED verification",
            None => "",
        };
        let _ = writeln!(out, "witness: {} pairs{note}", w.len());
    }
    if !r.equivalent && r.distinguisher.is_none() && matches!(rel, CheckRel::Iso | CheckRel::Bisim) {
        if let Some(f) = strong_distinguishing_formula(a, b) {
            let confirmed = f.holds(a, a.initial()) && !f.holds(b, b.initial());
            let _ = writeln!(out, "distinguisher: {f}{}", if confirmed { ", confirmed" } else { ", NOT confirmed" });
        }
    }
    if !r.equivalent && r.distinguisher.is_none() && matches!(rel, CheckRel::Branching | CheckRel::Rbranching) {
        if let Some(t) = trace_eq(a, b).distinguisher {
            let shown = if t.is_empty() { "(empty trace)".to_string() } else { t.join(" ") };
            let confirmed = confirm_distinguisher(a, b, &t, false);
            let _ = writeln!(out, "distinguisher: trace {shown}{}", if confirmed { ", confirmed" } else { ", NOT confirmed" });
        }
    }
    if let Some(t) = &r.distinguisher {
        let shown = if t.is_empty() { "(empty trace)".to_string() } else { t.join(" ") };
        let confirmed = confirm_distinguisher(a, b, t, matches!(rel, CheckRel::Lang));
        let _ = writeln!(out, "distinguisher: {shown}{}", if confirmed { ", confirmed" } else { ", NOT confirmed" });
    }
    r.equivalent
}

fn cmd_check(rel: CheckRel, first: &Path, second: &Path, common: &Common) -> Result<Report, CliError> {
    let a = load_complete(first, common)?;
    let b = load_complete(second, common)?;
    let mut text = String::new();
    let ok = verdict(rel, &a, &b, &mut text);
    Ok(Report { text, negative: !ok, truncated: None })
}

fn cmd_classify(file: &Path, common: &Common) -> Result<Report, CliError> {
    let l = load_complete(file, common)?;
    let c = l.classify();
    let mut t = String::new();
    let _ = writeln!(t, "states: {}", l.num_states());
    let _ = writeln!(t, "transitions: {}", l.transitions().len());
    let _ = writeln!(t, "reachable: {}", l.reach().len());
    for (k, v) in [
        ("connected", c.connected),
        ("finite", c.finite),
        ("regular", c.regular),
        ("finitely_branching", c.finitely_branching),
        ("deterministic", c.deterministic),
        ("finite_traces", c.finite_traces),
        ("determinate", is_determinate(&l)),
    ] {
        let _ = writeln!(t, "{k}: {v}");
    }
    Ok(Report::ok(t))
}

fn cmd_dot(file: &Path, common: &Common) -> Result<Report, CliError> {
    if extension(file) == "net" {
        let n = Net::parse_text(&read(file)?).map_err(|e| parse_err(file, e))?;
        return Ok(Report::ok(n.to_dot()));
    }
    Ok(Report::ok(load_system(file, common)?.lts.to_dot()))
}

fn cmd_model(name: &str, params: &[String], common: &Common) -> Result<Report, CliError> {
    let mut map = BTreeMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter `{p}` is not key=value")))?;
        map.insert(k.to_string(), v.to_string());
    }
    let m = models::build(name, &map).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match m {
        Model::Lts(l) => render(&l, common),
        Model::Net(n) if common.dot => n.to_dot(),
        Model::Net(n) => n.to_text(),
        Model::Spec(s) => s.to_text(),
    };
    Ok(Report::ok(text))
}

fn result_line(out: &mut String, label: &str, value: bool) -> bool {
    let _ = writeln!(out, "RESULT: {label} {value}");
    value
}

fn demo(which: Demo) -> Report {
    let mut t = String::new();
    let mut all = true;
    match which {
        Demo::Abp => {
            for data in [&["0"][..], &["0", "1"][..]] {
                let p = models::abp_pipeline(data);
                let tag = format!("|D|={}", data.len());
                let _ = writeln!(t, "# abp {tag}: {} reachable states after hiding", p.hidden.reach().len());
                all &= result_line(&mut t, &format!("branching[abp,buffer1,{tag}]"), branching_bisim(&p.hidden, &p.target_buffer).equivalent);
                all &= result_line(&mut t, &format!("rbranching[abp,buffer1,{tag}]"), rooted_branching_bisim(&p.hidden, &p.target_buffer).equivalent);
                all &= result_line(&mut t, &format!("determinate[abp,{tag}]"), is_determinate(&p.hidden));
            }
        }
        Demo::Buffers => {
            for (l1, l2) in [(1, 1), (1, 2), (2, 2)] {
                let p = models::buffers_pipeline(l1, l2, &["0", "1"]);
                let r = branching_bisim(&p.hidden, &p.target).equivalent;
                all &= result_line(&mut t, &format!("branching[buffer{l1}+buffer{l2},buffer{}]", l1 + l2), r);
            }
        }
        Demo::Scheduler => {
            let n = 3;
            let mut parts: Vec<Net> = (1..=n).map(models::scheduler_process_net).collect();
            parts.push(models::scheduler_control_net(n));
            let direct = models::scheduler_net(n);
            let composed = petri::par_nets_all(&parts, &models::scheduler_comm(n))
                .and_then(|c| petri::encap_net(&models::scheduler_blocked(n), &c));
            let same = composed.as_ref().is_ok_and(|c| {
                c.places() == direct.places() && c.transitions() == direct.transitions() && c.initial() == direct.initial()
            });
            all &= result_line(&mut t, "same-net[composed,direct]", same);
            let sys = petri::trsy(&direct, DEFAULT_BOUND).lts;
            let spec = unfold(&models::scheduler_specs(n), &models::scheduler_comm(n), DEFAULT_BOUND);
            let agree = spec.is_ok_and(|u| u.complete && strong_bisim(&u.lts, &sys).equivalent);
            all &= result_line(&mut t, "bisim[spec,net]", agree);
            let order = sys.traces(6).iter().all(|tr| {
                let starts: Vec<&String> = tr.iter().filter(|a| a.starts_with("start")).collect();
                starts.iter().enumerate().all(|(k, a)| **a == format!("start({})", k % n + 1))
            });
            all &= result_line(&mut t, "cyclic-order[start]", order);
        }
    }
    Report { text: t, negative: !all, truncated: None }
}

fn run(cli: Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    let (report, common) = match &cli.command {
        Command::Parse { file, common } => (cmd_parse(file)?, common),
        Command::Lts { file, spec, net, expr, common } => {
            let loaded = match (file, spec, net, expr) {
                (Some(f), ..) => load_system(f, common)?,
                (_, Some(s), ..) => load_spec(s, &read(s)?, common)?,
                (_, _, Some(n), _) => load_net(n, &read(n)?, common.bound)?,
                (_, _, _, Some(e)) => {
                    let p = parse_expr(e).map_err(|err| CliError::Parse(format!("--expr: {err}")))?;
                    let r = sos_lts(&p, &load_comm(common)?, common.bound).map_err(|err| CliError::Usage(err.to_string()))?;
                    let truncated = (!r.complete).then(|| truncation(Path::new("--expr"), common.bound, r.frontier.len()));
                    Loaded { lts: r.lts, truncated }
                }
                _ => return Err(CliError::Usage("give an input file, --spec, --net or --expr".into())),
            };
            (system_report(loaded, common), common)
        }
        Command::Compose { op, first, second, set, common } => {
            (cmd_compose(*op, first, second.as_deref(), set.as_deref(), common)?, common)
        }
        Command::Check { relation, first, second, common } => (cmd_check(*relation, first, second, common)?, common),
        Command::Minimize { file, relation, common } => {
            let l = load_complete(file, common)?;
            let rel = match relation {
                MinRel::Strong => Relation::Strong,
                MinRel::Branching => Relation::Branching,
            };
            (Report::ok(render(&minimize(&l, rel), common)), common)
        }
        Command::Classify { file, common } => (cmd_classify(file, common)?, common),
        Command::Demo { which, common } => (demo(*which), common),
        Command::Dot { file, common } => (cmd_dot(file, common)?, common),
        Command::Unfold { spec, common } => (system_report(load_spec(spec, &read(spec)?, common)?, common), common),
        Command::Model { name, params, common } => (cmd_model(name, params, common)?, common),
    };
    Ok((report, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((report, out)) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &report.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", report.text);
            }
            if let Some(t) = report.truncated {
                eprintln!("note: {t}");
                return ExitCode::from(4);
            }
            ExitCode::from(if report.negative { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
