//! The `polyinv` command line: file formats and subcommands.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use polyinv_core::execution::{reach_oracle, run, RunStatus};
use polyinv_core::reductions::{gadget_reduce, lift_labeling, project_invariant, state_encode, GuardVariant};
use polyinv_core::rational::render_point;
use polyinv_core::synth::{encode_bounded_existence, search_bounded, TemplateSpec};
use polyinv_core::{build_witness, check_separating, TransitionSystem};
use serde::de::DeserializeOwned;
use serde::Serialize;

use format::{
    state_names, ConfigEntry, GadgetLayoutFile, InvariantFile, LayoutFile, ReportFile, SimplexLayoutFile,
    SystemFile,
};

#[derive(Debug, Parser)]
#[command(name = "polyinv", version, about = "Exact polyhedral invariants for affine transition systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the system deterministically from its initial configuration.
    Simulate {
        system: PathBuf,
        #[arg(long)]
        steps: usize,
    },
    /// Check that an invariant is inductive and separating.
    Check { system: PathBuf, invariant: PathBuf },
    /// Apply one of the reductions.
    Reduce {
        #[command(subcommand)]
        kind: ReduceKind,
    },
    /// Run, build the hull-of-run invariant and check it.
    Witness {
        system: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift a source invariant through a simplex layout.
    LiftInv {
        invariant: PathBuf,
        layout: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Project a target invariant back through a simplex layout.
    ProjectInv {
        invariant: PathBuf,
        layout: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the SMT-LIB problem for invariants with at most K constraints per state.
    EmitSmt {
        system: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search small integer templates for an invariant.
    Search {
        system: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short = 'B')]
        bound: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the configurations reachable within a step budget.
    Oracle {
        system: PathBuf,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceKind {
    /// Add the step counter and parabola guards.
    Gadget {
        system: PathBuf,
        /// Guard original transitions by y <= (t^2+t)/2 instead of equality.
        #[arg(long)]
        le_guard: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Encode control states as simplex vertices.
    States {
        system: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        layout: Option<PathBuf>,
    },
}

/// Result of a successful invocation; errors map to exit code 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 1,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed document", path.display()))
}

pub fn read_system(path: &Path) -> Result<TransitionSystem> {
    let f: SystemFile = read_json(path)?;
    f.to_system().with_context(|| format!("{}: invalid system", path.display()))
}

fn render<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents always serialize");
    s.push('\n');
    s
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => out.write_all(text.as_bytes()).context("cannot write to standard output"),
    }
}

#[derive(Serialize)]
struct RunReport {
    status: &'static str,
    configs: Vec<ConfigEntry>,
    fired: Vec<usize>,
    ambiguous: Vec<usize>,
}

#[derive(Serialize)]
struct OracleReport {
    configs: Vec<ConfigEntry>,
    bad_reachable: bool,
}

/// Runs one command, writing documents to `out` and a summary to `log`.
pub fn execute(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate { system, steps } => {
            let s = read_system(system)?;
            let r = run(&s, *steps)?;
            writeln!(log, "{} after {} steps in {}", r.status, r.fired.len(), s.state_name(r.last().state))?;
            let report = RunReport {
                status: r.status.name(),
                configs: r.configs.iter().map(|c| ConfigEntry::new(&s, c)).collect(),
                fired: r.fired.clone(),
                ambiguous: r.ambiguous.clone(),
            };
            emit(&render(&report), None, out)?;
            Ok(Outcome::Positive)
        }
        Command::Check { system, invariant } => {
            let s = read_system(system)?;
            let f: InvariantFile = read_json(invariant)?;
            let inv = f
                .to_labeling(&s.vars, &state_names(&s))
                .with_context(|| format!("{}: invalid invariant", invariant.display()))?;
            let report = check_separating(&s, &inv)?;
            writeln!(log, "verdict: {}", report.verdict.name())?;
            let file = ReportFile::new(&s, &report);
            for f in &file.failures {
                let at = match (&f.transition, &f.from, &f.to) {
                    (Some(i), Some(a), Some(b)) => format!("transition {i} ({a} -> {b})"),
                    _ => f.kind.clone(),
                };
                let w = report.failures.iter().find(|x| x.transition == f.transition);
                let shown = |p: Option<&Vec<polyinv_core::Rational>>| p.map_or("-".to_string(), |p| render_point(p));
                writeln!(
                    log,
                    "  {at}: witness {} image {}",
                    shown(w.and_then(|x| x.witness.as_ref())),
                    shown(w.and_then(|x| x.image.as_ref()))
                )?;
            }
            emit(&render(&file), None, out)?;
            Ok(if report.passed() { Outcome::Positive } else { Outcome::Negative })
        }
        Command::Reduce { kind } => {
            let (system, output, layout_path) = match kind {
                ReduceKind::Gadget { system, output, layout, .. } | ReduceKind::States { system, output, layout } => {
                    (system, output, layout)
                }
            };
            let s = read_system(system)?;
            let (target, layout) = match kind {
                ReduceKind::Gadget { le_guard, .. } => {
                    let variant = if *le_guard { GuardVariant::AtMost } else { GuardVariant::Equality };
                    let (g, l) = gadget_reduce(&s, variant)?;
                    let file = LayoutFile::Gadget(GadgetLayoutFile::new(&s, &g, &l));
                    (g, file)
                }
                ReduceKind::States { .. } => {
                    let (e, l) = state_encode(&s)?;
                    let file = LayoutFile::Simplex(SimplexLayoutFile::new(&s, &e, &l));
                    (e, file)
                }
            };
            writeln!(log, "{} states, dimension {}", target.states.len(), target.dim())?;
            emit(&render(&SystemFile::from_system(&target)), output.as_deref(), out)?;
            if let Some(p) = layout_path {
                emit(&render(&layout), Some(p), out)?;
            }
            Ok(Outcome::Positive)
        }
        Command::Witness { system, steps, output } => {
            let s = read_system(system)?;
            let r = run(&s, *steps)?;
            if r.status != RunStatus::Halted {
                writeln!(log, "no witness: run status {} after {} steps", r.status, r.fired.len())?;
                return Ok(Outcome::Negative);
            }
            let inv = build_witness(&s, &r)?;
            let report = check_separating(&s, &inv)?;
            if !report.passed() {
                writeln!(log, "no witness: hull of the run is {}", report.verdict.name())?;
                return Ok(Outcome::Negative);
            }
            writeln!(log, "halted after {} steps; witness is separating-inductive", r.fired.len())?;
            let file = InvariantFile::from_labeling(&s.vars, &state_names(&s), &inv);
            emit(&render(&file), output.as_deref(), out)?;
            Ok(Outcome::Positive)
        }
        Command::LiftInv { invariant, layout, output } => {
            let lf = simplex_layout(layout)?;
            let l = lf.layout()?;
            let f: InvariantFile = read_json(invariant)?;
            let inv = f
                .to_labeling(&lf.source_vars, &lf.source_states)
                .with_context(|| format!("{}: invalid invariant", invariant.display()))?;
            let lifted = lift_labeling(&inv, &l)?;
            let file = InvariantFile::from_labeling(&lf.target_vars, &lf.target_states(), &lifted);
            emit(&render(&file), output.as_deref(), out)?;
            Ok(Outcome::Positive)
        }
        Command::ProjectInv { invariant, layout, output } => {
            let lf = simplex_layout(layout)?;
            let l = lf.layout()?;
            let f: InvariantFile = read_json(invariant)?;
            let inv = f
                .to_labeling(&lf.target_vars, &lf.target_states())
                .with_context(|| format!("{}: invalid invariant", invariant.display()))?;
            if !inv.get(l.bad).is_empty() {
                writeln!(log, "warning: label of {} is not empty and is ignored", lf.bad)?;
            }
            let projected = project_invariant(inv.get(l.main), &l)?;
            let file = InvariantFile::from_labeling(&lf.source_vars, &lf.source_states, &projected);
            emit(&render(&file), output.as_deref(), out)?;
            Ok(Outcome::Positive)
        }
        Command::EmitSmt { system, k, output } => {
            let s = read_system(system)?;
            let text = encode_bounded_existence(&s, TemplateSpec { k: *k, coeff_bound: 0 })?;
            emit(&text, output.as_deref(), out)?;
            Ok(Outcome::Positive)
        }
        Command::Search { system, k, bound, output } => {
            let s = read_system(system)?;
            match search_bounded(&s, TemplateSpec { k: *k, coeff_bound: *bound })? {
                Some(inv) => {
                    writeln!(log, "found a separating-inductive invariant")?;
                    let file = InvariantFile::from_labeling(&s.vars, &state_names(&s), &inv);
                    emit(&render(&file), output.as_deref(), out)?;
                    Ok(Outcome::Positive)
                }
                None => {
                    writeln!(
                        log,
                        "not found: no invariant with at most {k} constraints and integer coefficients in [-{bound}, {bound}]; \
                         the search is incomplete, so this does not show that none exists"
                    )?;
                    Ok(Outcome::Negative)
                }
            }
        }
        Command::Oracle { system, steps } => {
            let s = read_system(system)?;
            let configs = reach_oracle(&s, *steps)?;
            let bad = s.bad_state().expect("validated");
            let bad_reachable = configs.iter().any(|c| c.state == bad);
            writeln!(
                log,
                "{} configurations within {steps} steps; bad state {}",
                configs.len(),
                if bad_reachable { "reachable" } else { "not reached" }
            )?;
            let report = OracleReport { configs: configs.iter().map(|c| ConfigEntry::new(&s, c)).collect(), bad_reachable };
            emit(&render(&report), None, out)?;
            Ok(if bad_reachable { Outcome::Negative } else { Outcome::Positive })
        }
    }
}

fn simplex_layout(path: &Path) -> Result<SimplexLayoutFile> {
    match read_json::<LayoutFile>(path)? {
        LayoutFile::Simplex(l) => Ok(l),
        LayoutFile::Gadget(_) => bail!("{}: invariants are translated through simplex layouts only", path.display()),
    }
}
