use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use relorder::audit::{audit, AuditReport};
use relorder::engines::{joint, plan_for, Rule};
use relorder::error::Error;
use relorder::geometry::causally_related;
use relorder::io::{bundled_document, format_value, parse_scenario, serialize_distribution, Format};
use relorder::oracle::{sequential_collapse_with, OracleOptions};
use relorder::Scenario;

/// Engine and oracle must agree to this level.
const ORACLE_TOL: f64 = 1e-10;

/// History count above which `oracle-check` needs `--force`.
const HISTORY_LIMIT: u128 = 1_000_000;

#[derive(Parser)]
#[command(name = "relorder", version, about = "Bloch versus relational reduction in relativistic measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Bloch,
    Relational,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Rule {
        match r {
            RuleArg::Bloch => Rule::Bloch,
            RuleArg::Relational => Rule::Relational,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    SorkinLinear,
    SorkinSquare,
    Field,
}

impl DemoName {
    fn name(self) -> &'static str {
        match self {
            DemoName::SorkinLinear => "sorkin-linear",
            DemoName::SorkinSquare => "sorkin-square",
            DemoName::Field => "field",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the staged causal order of a scenario.
    Order { scenario: PathBuf },
    /// Print the joint (or marginal) outcome distribution.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "relational")]
        rule: RuleArg,
        /// Instruments to sum out, comma separated.
        #[arg(long, value_delimiter = ',')]
        marginal: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        /// Frame velocity for the Bloch rule, overriding the file.
        #[arg(long, value_parser = parse_velocity, allow_hyphen_values = true)]
        frame: Option<Velocity>,
    },
    /// Signaling, rule coincidence and frame audit for a sender/receiver pair.
    Audit {
        scenario: PathBuf,
        #[arg(long)]
        sender: String,
        #[arg(long)]
        receiver: String,
        /// Boost velocity "vx[,vy[,vz]]"; repeat for several boosts.
        #[arg(long = "boosts", value_parser = parse_velocity, allow_hyphen_values = true)]
        boosts: Vec<Velocity>,
    },
    /// Compare the engines with sequential collapse.
    OracleCheck {
        scenario: PathBuf,
        /// Rule to check; both when omitted.
        #[arg(long, value_enum)]
        rule: Option<RuleArg>,
        /// Run even when the history tree is very large.
        #[arg(long)]
        force: bool,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Write a bundled scenario to the working directory and walk through it.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

/// Velocity given as "vx[,vy[,vz]]".
#[derive(Clone, Debug)]
struct Velocity(Vec<f64>);

fn parse_velocity(s: &str) -> Result<Velocity, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad velocity component '{x}': {e}")))
        .collect::<Result<_, _>>()
        .map(Velocity)
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MissingFrame => 3,
            Error::NotSpacelike(..) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: format!("error[{}]: {e}", e.code()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("error[Io]: cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_scenario(&text)?)
}

fn order_report(s: &Scenario) -> String {
    let order = s.order();
    let mut out = String::new();
    let stage_names: Vec<String> = order
        .stages
        .iter()
        .enumerate()
        .map(|(k, ps)| {
            let names: Vec<String> = ps.iter().map(|&p| s.portion_label(p)).collect();
            format!("S{} = ({})", k + 1, names.join(", "))
        })
        .collect();
    let _ = writeln!(out, "stages: {}", stage_names.join(", "));
    let _ = writeln!(out);
    let _ = writeln!(out, "portions:");
    for (k, ps) in order.stages.iter().enumerate() {
        for &p in ps {
            let portion = &order.portions[p];
            let inst = &s.instruments[portion.instrument];
            let points: Vec<String> = portion
                .points
                .iter()
                .map(|&i| {
                    let e = &inst.region.points[i];
                    let coords: Vec<String> = std::iter::once(e.t).chain(e.x.iter().copied()).map(format_value).collect();
                    format!("({})", coords.join(", "))
                })
                .collect();
            let _ = writeln!(
                out,
                "  S{}  {:<8} instrument {:<6} points {}",
                k + 1,
                s.portion_label(p),
                inst.name,
                points.join(" ")
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "causal relations (row vs column: < precedes, > follows, ~ spacelike, <> both):");
    let names = s.instrument_names();
    let width = names.iter().map(String::len).max().unwrap_or(1).max(2);
    let mut header = format!("  {:width$}", "");
    for n in &names {
        let _ = write!(header, "  {n:<width$}");
    }
    let _ = writeln!(out, "{}", header.trim_end());
    for (i, a) in s.instruments.iter().enumerate() {
        let mut row = format!("  {:<width$}", names[i]);
        for (j, b) in s.instruments.iter().enumerate() {
            let cell = if i == j {
                "-"
            } else {
                let before = a.region.points.iter().any(|p| {
                    b.region.points.iter().any(|q| causally_related(p, q) && p.t < q.t)
                });
                let after = b.region.points.iter().any(|q| {
                    a.region.points.iter().any(|p| causally_related(p, q) && q.t < p.t)
                });
                match (before, after) {
                    (true, true) => "<>",
                    (true, false) => "<",
                    (false, true) => ">",
                    (false, false) => "~",
                }
            };
            let _ = write!(row, "  {cell:<width$}");
        }
        let _ = writeln!(out, "{}", row.trim_end());
    }
    out
}

fn cmd_run(
    path: &Path,
    rule: Rule,
    marginal: &[String],
    format: Format,
    frame: Option<Vec<f64>>,
) -> Outcome {
    let mut s = load(path)?;
    if let Some(v) = frame {
        s = Scenario::new(
            s.factors.clone(),
            s.rho0.clone(),
            s.initial_region.clone(),
            s.instruments.clone(),
            Some(v),
            s.lattice.clone(),
        )?;
    }
    let d = joint(&s, rule)?;
    let sum_out: Vec<&str> = marginal.iter().map(String::as_str).collect();
    let d = d.marginalize(&sum_out)?;
    Ok(serialize_distribution(&d, format))
}

fn report_json(r: &AuditReport) -> String {
    let mut text = serde_json::to_string_pretty(r).expect("plain data");
    text.push('\n');
    text
}

fn cmd_oracle_check(path: &Path, rule: Option<Rule>, force: bool, corrupt: bool) -> Outcome {
    let s = load(path)?;
    let rules = match rule {
        Some(r) => vec![r],
        None if s.frame.is_some() => vec![Rule::Bloch, Rule::Relational],
        None => vec![Rule::Relational],
    };
    let mut out = String::new();
    let mut worst: f64 = 0.0;
    for rule in rules {
        let plan = plan_for(&s, rule, &[])?;
        let histories = plan.history_count();
        if histories > HISTORY_LIMIT {
            let warning = format!("warning: {rule} rule has {histories} histories (limit {HISTORY_LIMIT})");
            if !force {
                return Err(Failure {
                    code: 2,
                    message: format!("{warning}; rerun with --force"),
                });
            }
            eprintln!("{warning}; continuing because of --force");
        }
        let engine = joint(&s, rule)?;
        let opts = OracleOptions {
            omit: Vec::new(),
            reverse: corrupt,
        };
        let oracle = sequential_collapse_with(&s, rule, &opts)?.distribution();
        let dev = engine.max_deviation(&oracle)?;
        worst = worst.max(dev);
        let verdict = if dev <= ORACLE_TOL { "agree" } else { "DISAGREE" };
        let _ = writeln!(out, "{rule}: max deviation {dev:.3e} over {histories} histories: {verdict}");
    }
    if worst > ORACLE_TOL {
        return Err(Failure {
            code: 5,
            message: format!("{out}oracle disagreement: max deviation {worst:.3e}"),
        });
    }
    Ok(out)
}

fn cmd_demo(name: DemoName) -> Outcome {
    let name = name.name();
    let text = bundled_document(name).expect("bundled demo");
    let file = format!("{name}.scn");
    std::fs::write(&file, text).map_err(|e| Failure {
        code: 2,
        message: format!("error[Io]: cannot write {file}: {e}"),
    })?;
    let s = parse_scenario(text)?;
    let mut out = String::new();
    let _ = writeln!(out, "wrote {file}");
    let _ = writeln!(out);
    let _ = writeln!(out, "== order");
    out.push_str(&order_report(&s));
    for rule in [Rule::Bloch, Rule::Relational] {
        let _ = writeln!(out);
        let _ = writeln!(out, "== run --rule {rule} --marginal A,B");
        let d = joint(&s, rule)?.marginalize(&["A", "B"])?;
        out.push_str(&serialize_distribution(&d, Format::Table));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "== audit --sender A --receiver C --boosts 0.8 --boosts -0.8");
    let report = audit(&s, "A", "C", &[vec![0.8], vec![-0.8]])?;
    for shift in &report.frame_audit {
        let _ = writeln!(
            out,
            "boost {:?}: bloch shift {}, relational shift {:.3e}",
            shift.velocity,
            shift.bloch_shift.map_or("n/a".to_string(), |b| format!("{b:.12}")),
            shift.relational_shift
        );
    }
    if let Some(gap) = report.coincidence_gap {
        let _ = writeln!(out, "coincidence gap: {gap:.12}");
    }
    for sig in &report.signaling {
        let _ = writeln!(out, "{} signaling A -> C: {:.12}", sig.rule, sig.magnitude);
    }
    Ok(out)
}

fn execute(cli: Cli) -> Outcome {
    match cli.command {
        Command::Order { scenario } => Ok(order_report(&load(&scenario)?)),
        Command::Run {
            scenario,
            rule,
            marginal,
            format,
            frame,
        } => {
            let format = match format {
                FormatArg::Table => Format::Table,
                FormatArg::Records => Format::Records,
            };
            cmd_run(&scenario, rule.into(), &marginal, format, frame.map(|v| v.0))
        }
        Command::Audit {
            scenario,
            sender,
            receiver,
            boosts,
        } => {
            let s = load(&scenario)?;
            let boosts: Vec<Vec<f64>> = boosts.into_iter().map(|v| v.0).collect();
            Ok(report_json(&audit(&s, &sender, &receiver, &boosts)?))
        }
        Command::OracleCheck {
            scenario,
            rule,
            force,
            corrupt,
        } => cmd_oracle_check(&scenario, rule.map(Rule::from), force, corrupt),
        Command::Demo { name } => cmd_demo(name),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
