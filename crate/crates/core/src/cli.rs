//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 when an assert-mode
//! claim fails, 3 when a computation fails.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::audit::{known_ids, run_audit, AuditConfig, ClaimSelection, Registry, SystemSpec};
use crate::dynamics::{integrate, IntegratorOptions};
use crate::expr::parse_number;
use crate::pinney::PinneyTriple;
use crate::systems::CartesianState;
use crate::{Error, Exec, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERT_FAILED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ermakov-audit", version, about = "Simulate Ermakov systems and audit their reduction, Pinney partners and symmetries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the Cartesian equations of motion.
    Simulate(SimArgs),
    /// Momentum law and reduced-equation residuals along a simulated trajectory.
    Reduce(RunArgs),
    /// Pinney partner, Wronskian and invariant claims.
    Pinney(PinneyArgs),
    /// Flow tests, closure and substitution audit of the generators.
    Symmetries(SymArgs),
    /// Every registered claim.
    Audit(AuditArgs),
    /// Registered claims.
    Claims(ClaimsArgs),
}

#[derive(Debug, Args)]
struct SimArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System definition file (JSON).
    #[arg(long)]
    system: Option<PathBuf>,
    /// Initial condition x,y,vx,vy.
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    /// Time span a,b.
    #[arg(long, allow_hyphen_values = true)]
    tspan: Option<String>,
    /// Integrator tolerance (relative and absolute).
    #[arg(long)]
    tol: Option<String>,
    /// Write a JSON summary here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write CSV exports into this directory.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Reference angle where mu vanishes.
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<String>,
}

#[derive(Debug, Args)]
struct PinneyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Pinney triple A,B,C, with C (or the whole triple) given as `auto`.
    #[arg(long, allow_hyphen_values = true)]
    pinney: Option<String>,
}

#[derive(Debug, Args)]
struct SymArgs {
    #[command(flatten)]
    pinney: PinneyArgs,
    /// Seed for random sample points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    sym: SymArgs,
    /// Claim ids, comma separated, or `all`.
    #[arg(long)]
    claims: Option<String>,
    /// Claim registry file (JSON list of {id, description, tolerance, mode}).
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClaimsArgs {
    /// Print registry ids and modes.
    #[arg(long)]
    list: bool,
    /// Claim registry file instead of the built-in one.
    #[arg(long)]
    registry: Option<PathBuf>,
}

fn numbers<const N: usize>(flag: &str, s: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(Error::Config(format!("--{flag} expects {N} comma-separated numbers, got {s:?}")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_number(p.trim()).map_err(|e| Error::Config(format!("--{flag}: {e}")))?;
    }
    Ok(out)
}

impl SimArgs {
    fn config(&self) -> Result<AuditConfig> {
        let mut cfg = match (&self.config, &self.system) {
            (Some(path), _) => AuditConfig::from_file(path)?,
            (None, Some(sys)) => AuditConfig::new(SystemSpec::Path(sys.clone())),
            (None, None) => return Err(Error::Config("either --system or --config is required".into())),
        };
        if let (Some(_), Some(sys)) = (&self.config, &self.system) {
            cfg.system = SystemSpec::Path(sys.clone());
        }
        if let Some(s) = &self.ic {
            cfg.ic = numbers("ic", s)?;
        }
        if let Some(s) = &self.tspan {
            cfg.tspan = numbers("tspan", s)?;
        }
        if let Some(s) = &self.tol {
            cfg.tol = numbers::<1>("tol", s)?[0];
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.csv.is_some() {
            cfg.csv = self.csv.clone();
        }
        Ok(cfg)
    }
}

impl RunArgs {
    fn config(&self) -> Result<AuditConfig> {
        let mut cfg = self.sim.config()?;
        if let Some(s) = &self.theta0 {
            cfg.theta0 = numbers::<1>("theta0", s)?[0];
        }
        Ok(cfg)
    }
}

impl PinneyArgs {
    fn config(&self) -> Result<AuditConfig> {
        let mut cfg = self.run.config()?;
        if let Some(s) = &self.pinney {
            cfg.pinney = s.parse::<PinneyTriple>().map_err(|e| Error::Config(format!("--pinney: {e}")))?;
        }
        Ok(cfg)
    }
}

impl SymArgs {
    fn config(&self) -> Result<AuditConfig> {
        let mut cfg = self.pinney.config()?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

impl AuditArgs {
    fn config(&self) -> Result<AuditConfig> {
        let mut cfg = self.sym.config()?;
        if let Some(s) = &self.claims {
            cfg.claims = s.parse()?;
        }
        if self.registry.is_some() {
            cfg.registry = self.registry.clone();
        }
        Ok(cfg)
    }
}

fn ids(list: &[&str]) -> ClaimSelection {
    ClaimSelection::Ids(list.iter().map(|s| s.to_string()).collect())
}

fn subset(prefixes: &[&str], exact: &[&str]) -> ClaimSelection {
    ClaimSelection::Ids(
        known_ids()
            .into_iter()
            .filter(|id| exact.contains(&id.as_str()) || prefixes.iter().any(|p| id.starts_with(p)))
            .collect(),
    )
}

/// Whether an error comes from the input rather than from a computation.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::Config(_)
            | Error::UnknownClaim(_)
            | Error::Pole(_)
            | Error::Origin
            | Error::Precondition(_)
            | Error::PinneyConstraint { .. }
            | Error::Io(_)
    )
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn simulate(args: &SimArgs) -> Result<i32> {
    let cfg = args.config()?;
    cfg.validate()?;
    let system = cfg.resolve_system()?;
    let ic: CartesianState = cfg.initial_state();
    let tr = integrate(system.first_order_rhs(), &ic.to_vec(), (cfg.tspan[0], cfg.tspan[1]), IntegratorOptions::with_tol(cfg.tol))?;
    let end = CartesianState::from_slice(tr.end(), tr.state(tr.len() - 1));
    let summary = json!({
        "system": system.definition(),
        "ic": cfg.ic,
        "tspan": cfg.tspan,
        "tol": cfg.tol,
        "integrator": tr.meta,
        "final_state": { "t": end.t, "x": end.x, "y": end.y, "vx": end.vx, "vy": end.vy },
        "angular_momentum": { "start": ic.angular_momentum(), "end": end.angular_momentum() },
    });
    println!(
        "t = {}: (x, y, vx, vy) = ({:.12e}, {:.12e}, {:.12e}, {:.12e}); {} steps ({} rejected)",
        end.t, end.x, end.y, end.vx, end.vy, tr.meta.accepted_steps, tr.meta.rejected_steps
    );
    write_out(&cfg.out, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    if let Some(dir) = &cfg.csv {
        std::fs::create_dir_all(dir)?;
        let f = std::fs::File::create(dir.join("trajectory.csv"))?;
        tr.write_csv(std::io::BufWriter::new(f), &["t", "x", "y", "vx", "vy"])?;
    }
    Ok(EXIT_OK)
}

fn audit(mut cfg: AuditConfig, forced: Option<ClaimSelection>) -> Result<i32> {
    if let Some(sel) = forced {
        cfg.claims = sel;
    }
    let outcome = run_audit(&cfg, Exec::Parallel)?;
    print!("{}", outcome.report.table());
    if let Some(p) = &cfg.out {
        outcome.report.write_json(p)?;
    }
    if let Some(dir) = &cfg.csv {
        outcome.artifacts.write_csv(dir)?;
    }
    Ok(if outcome.report.has_assert_failure() { EXIT_ASSERT_FAILED } else { EXIT_OK })
}

fn list_claims(args: &ClaimsArgs) -> Result<i32> {
    let reg = match &args.registry {
        Some(p) => Registry::from_file(p)?,
        None => Registry::default(),
    };
    for c in reg.claims() {
        let mode = match c.mode {
            crate::verdict::ClaimMode::Assert => "assert",
            crate::verdict::ClaimMode::Report => "report",
        };
        let tol = c.tolerance.map_or("-".to_string(), |t| format!("{t:e}"));
        println!("{:<22} {:<6} {:>8}  {}", c.id, mode, tol, c.description);
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Reduce(a) => audit(
            a.config()?,
            Some(ids(&["eq2.3", "reduced_full", "reduced_paper", "polar_force", "polar_printed", "omega_printed"])),
        ),
        Command::Pinney(a) => audit(
            a.config()?,
            Some(ids(&["pinney_constraint", "wronskian_abel", "pinney_residual", "ELI_reduced", "ELI_original_printed"])),
        ),
        Command::Symmetries(a) => audit(a.config()?, Some(subset(&["gamma_", "substitution_"], &["closure_sl2"]))),
        Command::Audit(a) => audit(a.config()?, None),
        Command::Claims(a) => list_claims(&a),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if is_input_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_INTERNAL
            }
        }
    }
}
