use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_vc_lab::fsg::{self, Config, REPORT_SCHEMA};
use padic_vc_lab::groups::{CompactGroupScheme, Element, GroupDescriptor, GroupKind};
use padic_vc_lab::rational::parse_rational;
use padic_vc_lab::sets::{compact_locus, CylinderSet, WindowSet};
use padic_vc_lab::vc::{self, ExperimentOptions, NetRequest, SetSystem, MAX_VC_CAP};
use padic_vc_lab::{Error, Rational, Result};
use serde_json::{json, Value};

/// Exact p-adic measure, compactness and epsilon-net experiments.
#[derive(Parser)]
#[command(name = "padic-vc-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Haar measure of a window set (JSON file).
    Measure {
        #[arg(long)]
        set: PathBuf,
    },
    /// Closedness, boundedness and compactness of a window set.
    CompactCheck {
        #[arg(long)]
        set: PathBuf,
    },
    /// Indices of the compact members of a JSON array of window sets.
    CompactLocus {
        #[arg(long)]
        family: PathBuf,
    },
    /// Finite quotients of the catalogue groups.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// VC dimension of a set system.
    Vc {
        #[command(subcommand)]
        op: VcOp,
    },
    /// Epsilon-net sample sizes, verification and experiments.
    Net {
        #[command(subcommand)]
        op: NetOp,
    },
    /// Greedy cover of a quotient by left translates of a cylinder set.
    Cover {
        #[command(flatten)]
        group: GroupArgs,
        /// Cylinder set JSON file.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        max_translates: Option<usize>,
        /// Also compute the exact minimal cover (small groups only).
        #[arg(long)]
        exact: bool,
    },
    /// Finite-satisfiability witness for the ball family (or a given system).
    Fsg {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a pipeline config and writes report.json and tables/*.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GroupOp {
    /// Order and elements of the quotient.
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Haar-random elements.
    Sample {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Exact Haar measure of a cylinder set.
    Measure {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        set: PathBuf,
    },
}

#[derive(Subcommand)]
enum VcOp {
    Dim {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = MAX_VC_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum NetOp {
    /// Least N satisfying both sample-size inequalities.
    Size {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Checks that a sample meets every member of measure > epsilon.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        epsilon: String,
        /// JSON array of ground elements.
        #[arg(long)]
        sample: PathBuf,
    },
    /// Repeated net trials on the ball family of a quotient.
    Experiment {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long)]
        discrepancy: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-trial CSV rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Additive,
    Units,
    PrincipalUnits,
    Heisenberg,
}

#[derive(Args)]
struct GroupArgs {
    #[arg(long, value_enum)]
    group: Kind,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    level: u32,
    /// Dimension of the additive group.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

impl GroupArgs {
    fn descriptor(&self) -> Result<GroupDescriptor> {
        let kind = match self.group {
            Kind::Additive => GroupKind::Additive { n: self.n },
            Kind::Units => GroupKind::Units,
            Kind::PrincipalUnits => GroupKind::PrincipalUnits,
            Kind::Heisenberg => GroupKind::Heisenberg,
        };
        Ok(GroupDescriptor {
            scheme: CompactGroupScheme::new(kind, self.p)?,
            level: self.level,
        })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Config(format!("not a rational: {s:?}")))
}

fn emit(mut v: Value, out: Option<&Path>) -> Result<()> {
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema".into(), REPORT_SCHEMA.into());
    }
    let text = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            // a closed pipe downstream is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

fn load_system(path: Option<&Path>, q: &padic_vc_lab::groups::FiniteQuotient) -> Result<SetSystem> {
    match path {
        Some(p) => read_json(p),
        None => Ok(SetSystem::balls(q)),
    }
}

fn family_dimension(sys: &SetSystem) -> Result<u64> {
    match vc::vc_dimension(sys, MAX_VC_CAP)? {
        vc::VcDimension::Exact(k) => Ok(k.max(1) as u64),
        vc::VcDimension::AtLeast(c) => Err(Error::CapExceeded(format!("VC dimension at least {c}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Measure { set } => {
            let w: WindowSet = read_json(&set)?;
            let m = w.measure().map(|m| m.to_string());
            emit(json!({ "measure": m, "bounded": w.is_bounded() }), None)
        }
        Command::CompactCheck { set } => {
            let w: WindowSet = read_json(&set)?;
            emit(
                json!({
                    "closed": w.is_closed(),
                    "bounded": w.is_bounded(),
                    "compact": w.is_definably_compact(),
                }),
                None,
            )
        }
        Command::CompactLocus { family } => {
            let fam: Vec<WindowSet> = read_json(&family)?;
            emit(json!({ "size": fam.len(), "locus": compact_locus(&fam) }), None)
        }
        Command::Group { op } => match op {
            GroupOp::Quotient { group } => {
                let q = group.descriptor()?.quotient()?;
                emit(json!({ "order": q.len(), "elements": q.elements() }), None)
            }
            GroupOp::Sample { group, seed, count } => {
                let q = group.descriptor()?.quotient()?;
                let sample: Vec<Element> = q.sampler(seed).sample(count);
                emit(json!({ "seed": seed, "sample": sample }), None)
            }
            GroupOp::Measure { group, set } => {
                let q = group.descriptor()?.quotient()?;
                let d: CylinderSet = read_json(&set)?;
                emit(json!({ "measure": q.haar_measure(&d)?.to_string() }), None)
            }
        },
        Command::Vc {
            op: VcOp::Dim { system, cap },
        } => {
            let sys: SetSystem = read_json(&system)?;
            let d = vc::vc_dimension(&sys, cap)?;
            emit(json!({ "vc_dimension": d.to_string(), "exact": matches!(d, vc::VcDimension::Exact(_)) }), None)
        }
        Command::Net { op } => match op {
            NetOp::Size { k, epsilon, delta } => {
                let eps = rational(&epsilon)?;
                let req = match delta {
                    Some(d) => NetRequest::with_delta(k, eps, rational(&d)?)?,
                    None => NetRequest::new(k, eps)?,
                };
                let n = vc::net_size(&req);
                emit(
                    json!({ "k": k, "epsilon": req.epsilon.to_string(), "delta": req.delta.to_string(), "n": n }),
                    None,
                )
            }
            NetOp::Verify {
                system,
                epsilon,
                sample,
            } => {
                let sys: SetSystem = read_json(&system)?;
                let pts: Vec<Element> = read_json(&sample)?;
                let idx = pts
                    .iter()
                    .map(|e| {
                        sys.ground()
                            .iter()
                            .position(|g| g == e)
                            .ok_or_else(|| Error::UnknownElement(e.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let missed = vc::verify_net(&sys, &rational(&epsilon)?, &idx);
                emit(json!({ "ok": missed.is_empty(), "missed": missed }), None)?;
                if missed.is_empty() {
                    Ok(())
                } else {
                    Err(Error::NetMissed(missed))
                }
            }
            NetOp::Experiment {
                group,
                epsilon,
                trials,
                seed,
                system,
                sample_size,
                discrepancy,
                workers,
                out,
                csv,
            } => {
                let desc = group.descriptor()?;
                let q = desc.quotient()?;
                let sys = load_system(system.as_deref(), &q)?;
                let eps = rational(&epsilon)?;
                let req = NetRequest::new(family_dimension(&sys)?, eps.clone())?;
                let opts = ExperimentOptions {
                    sample_size,
                    discrepancy,
                    workers,
                    ..Default::default()
                };
                let report = vc::net_experiment(&q, &sys, &req, trials, seed, &opts)?;
                if let Some(path) = csv {
                    report.write_csv(fs::File::create(path)?)?;
                }
                let mut v = to_value(&report)?;
                v["group"] = to_value(&desc)?;
                v["seed"] = seed.into();
                emit(v, out.as_deref())?;
                if report.failure_rate > eps {
                    return Err(Error::Verification(format!(
                        "failure rate {} exceeds epsilon {eps}",
                        report.failure_rate
                    )));
                }
                Ok(())
            }
        },
        Command::Cover {
            group,
            set,
            max_translates,
            exact,
        } => {
            let q = group.descriptor()?.quotient()?;
            let d: CylinderSet = read_json(&set)?;
            let cert = fsg::greedy_cover(&q, &d, max_translates.unwrap_or(q.len()))?;
            let mut v = to_value(&cert)?;
            v["k"] = cert.k().into();
            if exact {
                v["exact_k"] = to_value(&fsg::exact_min_cover(&q, &d, 10_000_000)?)?;
            }
            emit(v, None)?;
            if cert.covered {
                Ok(())
            } else {
                Err(Error::Verification("translates do not cover the group".into()))
            }
        }
        Command::Fsg {
            group,
            epsilon,
            seed,
            system,
            out,
        } => {
            let q = group.descriptor()?.quotient()?;
            let sys = load_system(system.as_deref(), &q)?;
            let sys = if system.is_some() { sys.close_under_translation(&q)? } else { sys };
            let w = fsg::fsg_witness(&q, &sys, &rational(&epsilon)?, seed)?;
            emit(to_value(&w)?, out.as_deref())
        }
        Command::Run {
            config,
            out_dir,
            workers,
        } => {
            let cfg = Config::from_file(&config)?;
            let summary = fsg::run_experiment(&cfg, out_dir.as_deref(), workers)?;
            eprintln!(
                "wrote {} and {} tables",
                summary.report_path.display(),
                summary.tables.len()
            );
            if summary.verification_failures > 0 {
                return Err(Error::Verification(format!(
                    "{} steps failed verification",
                    summary.verification_failures
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
