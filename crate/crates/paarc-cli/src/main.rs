//! `paarc` — run campus scenarios, lint policies, evaluate single decision
//! requests, and query audit logs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use paarc::audit::{AuditFilter, AuditRecord, Domain};
use paarc::enforce::{pdp_decide, Pip, PolicyStore, ServiceRequest};
use paarc::policy::{parse_policy_set, DecisionEffect};
use paarc::sim::{run_scenario, Report, Scenario, SimError};

#[derive(Parser)]
#[command(name = "paarc", version, about = "Policy-aware M2M enforcement engine and campus transport simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario to its final scripted tick and write the report.
    Run(RunArgs),
    /// Policy file tools.
    Policy {
        #[command(subcommand)]
        command: PolicyCommand,
    },
    /// Decide a single request document against a policy file.
    Eval(EvalArgs),
    /// Query the audit log inside a report.
    Audit(AuditArgs),
}

#[derive(Subcommand)]
enum PolicyCommand {
    /// Parse and invariant-check a `.pol` file.
    Check { path: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Policy file; defaults to the scenario's `policies` field, resolved
    /// relative to the scenario file.
    #[arg(long)]
    policies: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Machine-parseable summary on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    request: PathBuf,
    #[arg(long)]
    policies: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    report: PathBuf,
    /// Show the full trace of one request.
    #[arg(long)]
    request_id: Option<String>,
    /// permit | deny | not-applicable | indeterminate
    #[arg(long)]
    effect: Option<String>,
    /// device | network | application
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    actor: Option<String>,
    #[arg(long)]
    action: Option<String>,
    #[arg(long)]
    tick_from: Option<i64>,
    #[arg(long)]
    tick_to: Option<i64>,
    /// Print matching records as a JSON array.
    #[arg(long)]
    json: bool,
}

/// Exit codes: 0 success, 1 scenario/policy error, 2 I/O error,
/// 3 internal invariant violation.
enum CliError {
    Input(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Policy { command: PolicyCommand::Check { path } } => cmd_policy_check(&path),
        Command::Eval(args) => cmd_eval(args),
        Command::Audit(args) => cmd_audit(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("paarc: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let scenario_text = read(&args.scenario)?;
    let scenario = Scenario::from_json(&scenario_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.scenario.display())))?;

    let policy_path = match args.policies {
        Some(p) => p,
        None => {
            let field = scenario.policies.clone().ok_or_else(|| {
                CliError::Input(
                    "no --policies flag and the scenario names no policy file".to_string(),
                )
            })?;
            args.scenario.parent().unwrap_or(Path::new(".")).join(field)
        }
    };
    let policy_text = read(&policy_path)?;

    let report = run_scenario(&scenario, &policy_text).map_err(|e| match e {
        SimError::Policy(err) => CliError::Input(format!("{}: {err}", policy_path.display())),
        other => CliError::Input(other.to_string()),
    })?;

    let bytes = report.to_json_bytes();
    fs::write(&args.out, &bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.out.display())))?;

    if args.json {
        let summary = serde_json::json!({
            "mode": report.mode,
            "final_tick": report.final_tick,
            "assignments": report.assignments.len(),
            "tallies": report.tallies,
            "decision_count": report.decision_count,
            "audit_record_count": report.audit_record_count,
            "out": args.out.display().to_string(),
        });
        println!("{summary}");
    } else {
        let t = &report.tallies;
        println!(
            "mode {} run to tick {}: {} log entries, {} assignment(s), {} audit record(s)",
            report.mode,
            report.final_tick,
            report.log.len(),
            report.assignments.len(),
            report.audit_record_count,
        );
        println!(
            "accepted: {} legitimate, {} illegitimate | rejected: {} legitimate, {} illegitimate",
            t.accepted_legitimate,
            t.accepted_illegitimate,
            t.rejected_legitimate,
            t.rejected_illegitimate,
        );
        println!("report written to {}", args.out.display());
    }
    Ok(())
}

fn cmd_policy_check(path: &Path) -> Result<(), CliError> {
    let text = read(path)?;
    match parse_policy_set(&text) {
        Ok(policies) => {
            println!("{} policies OK", policies.len());
            Ok(())
        }
        Err(e) => Err(CliError::Input(format!("{}:{}:{}: {e}", path.display(), e.line, e.col))),
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let request_text = read(&args.request)?;
    let request: ServiceRequest = serde_json::from_str(&request_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.request.display())))?;
    let policy_text = read(&args.policies)?;

    let store = PolicyStore::new();
    store
        .load_set(&policy_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.policies.display())))?;
    let report = pdp_decide(&request, &store.snapshot(), &Pip::new());
    if !report.decision.is_consistent() {
        return Err(CliError::Internal("decision bookkeeping inconsistent".to_string()));
    }
    let out = serde_json::to_string_pretty(&report.decision)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{out}");
    Ok(())
}

fn parse_effect(s: &str) -> Result<DecisionEffect, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "permit" => Ok(DecisionEffect::Permit),
        "deny" => Ok(DecisionEffect::Deny),
        "not-applicable" | "notapplicable" => Ok(DecisionEffect::NotApplicable),
        "indeterminate" => Ok(DecisionEffect::Indeterminate),
        other => Err(CliError::Input(format!("unknown effect `{other}`"))),
    }
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let report_text = read(&args.report)?;
    let report = Report::from_json(&report_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.report.display())))?;

    // A report's audit log is contiguous from 1; anything else means the
    // file was not produced by a run.
    for (i, record) in report.audit.iter().enumerate() {
        if record.seq != i as u64 + 1 {
            return Err(CliError::Internal(format!(
                "audit log corrupt: record {} has seq {}",
                i, record.seq
            )));
        }
    }

    let mut filter = AuditFilter::default();
    if let Some(effect) = &args.effect {
        filter.effect = Some(parse_effect(effect)?);
    }
    if let Some(domain) = &args.domain {
        filter.domain = Some(
            Domain::from_str_opt(domain)
                .ok_or_else(|| CliError::Input(format!("unknown domain `{domain}`")))?,
        );
    }
    filter.actor = args.actor.clone();
    filter.action = args.action.clone();
    if args.tick_from.is_some() || args.tick_to.is_some() {
        filter.tick_range =
            Some((args.tick_from.unwrap_or(i64::MIN), args.tick_to.unwrap_or(i64::MAX)));
    }

    let matches: Vec<&AuditRecord> = report
        .audit
        .iter()
        .filter(|r| {
            args.request_id.as_deref().map_or(true, |id| r.request_id.as_deref() == Some(id))
        })
        .filter(|r| filter.matches(r))
        .collect();

    if args.json {
        let out = serde_json::to_string_pretty(&matches)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        println!("{out}");
    } else {
        for r in &matches {
            let effect =
                r.decision_effect.map(|e| format!(" effect={e:?}")).unwrap_or_default();
            let request =
                r.request_id.as_deref().map(|id| format!(" req={id}")).unwrap_or_default();
            println!(
                "#{:<4} t={:<6} [{:<11}] {:<10} {:<18}{}{} {}",
                r.seq,
                r.tick,
                format!("{:?}", r.domain).to_lowercase(),
                r.actor,
                r.action,
                effect,
                request,
                r.detail
            );
        }
    }
    Ok(())
}
