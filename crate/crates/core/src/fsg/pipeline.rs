//! Batch experiments driven by a JSON config.
//!
//! ```json
//! {"pipeline": [{"kind": "net_size_table", "ks": [1, 2], "epsilons": ["1/2"]}],
//!  "seed": 42, "out_dir": "out"}
//! ```
//!
//! Step `i` runs with seed `seed + i` (wrapping). Within a step, Haar
//! samples come from ChaCha8 streams of that seed as described on
//! [`HaarSampler`](crate::groups::HaarSampler). Nothing in the report depends
//! on the worker count; the only nondeterministic field is
//! `generated_unix_secs`.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::cover::{exact_min_cover, greedy_cover};
use super::witness::fsg_witness;
use crate::error::{Error, Result};
use crate::groups::{FiniteQuotient, GroupDescriptor};
use crate::rational::{self, Rational};
use crate::sets::WindowSet;
use crate::vc::{
    check_exact, net_experiment, net_size, vc_dimension, ExperimentOptions, NetRequest, SetSystem, VcDimension,
    MAX_VC_CAP,
};

pub const REPORT_SCHEMA: u32 = 1;
/// Exact minimal covers are only attempted up to this group order.
pub const EXACT_COVER_MAX_ORDER: usize = 100;
const EXACT_COVER_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub pipeline: Vec<Step>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for trial fan-out. Does not affect results.
    #[serde(default)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    NetSizeTable {
        ks: Vec<u64>,
        #[serde(with = "rational::serde_vec")]
        epsilons: Vec<Rational>,
    },
    NetExperiment {
        group: GroupDescriptor,
        #[serde(with = "rational::serde_str")]
        epsilon: Rational,
        trials: usize,
        #[serde(default)]
        discrepancy: bool,
    },
    FsgWitness {
        group: GroupDescriptor,
        #[serde(with = "rational::serde_str")]
        epsilon: Rational,
    },
    CoverStudy {
        group: GroupDescriptor,
        sets: usize,
    },
    CompactLocus {
        family: Vec<WindowSet>,
    },
}

impl Step {
    fn name(&self) -> &'static str {
        match self {
            Step::NetSizeTable { .. } => "net_size_table",
            Step::NetExperiment { .. } => "net_experiment",
            Step::FsgWitness { .. } => "fsg_witness",
            Step::CoverStudy { .. } => "cover_study",
            Step::CompactLocus { .. } => "compact_locus",
        }
    }
}

impl Config {
    /// Parses and validates a config; errors name the offending field and
    /// position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        let bad = |i: usize, msg: &str| Err(Error::Config(format!("at `pipeline[{i}]`: {msg}")));
        if self.workers == Some(0) {
            return Err(Error::Config("at `workers`: must be at least 1".into()));
        }
        for (i, step) in self.pipeline.iter().enumerate() {
            match step {
                Step::NetSizeTable { ks, epsilons } => {
                    if ks.contains(&0) {
                        return bad(i, "k must be at least 1");
                    }
                    if epsilons.iter().any(|e| *e <= Rational::zero() || *e >= rational::int(1)) {
                        return bad(i, "epsilon must lie in (0, 1)");
                    }
                }
                Step::NetExperiment { epsilon, trials, .. } => {
                    if *trials == 0 {
                        return bad(i, "trials must be at least 1");
                    }
                    if *epsilon <= Rational::zero() || *epsilon >= rational::int(1) {
                        return bad(i, "epsilon must lie in (0, 1)");
                    }
                }
                Step::FsgWitness { epsilon, .. } => {
                    if *epsilon <= Rational::zero() {
                        return bad(i, "epsilon must be positive");
                    }
                }
                Step::CoverStudy { sets, .. } => {
                    if *sets == 0 {
                        return bad(i, "sets must be at least 1");
                    }
                }
                Step::CompactLocus { .. } => {}
            }
        }
        Ok(())
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: Value,
    pub report_path: PathBuf,
    pub tables: Vec<PathBuf>,
    /// Steps whose exact checks failed.
    pub verification_failures: usize,
}

struct StepOutput {
    json: Value,
    table: Option<(String, Vec<u8>)>,
    failed: bool,
}

fn ball_family(q: &FiniteQuotient) -> Result<(SetSystem, usize)> {
    let fam = SetSystem::balls(q);
    match vc_dimension(&fam, MAX_VC_CAP)? {
        VcDimension::Exact(k) => Ok((fam, k)),
        VcDimension::AtLeast(c) => Err(Error::CapExceeded(format!("VC dimension at least {c}"))),
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn net_size_table(ks: &[u64], epsilons: &[Rational]) -> Result<StepOutput> {
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut failed = false;
    for &k in ks {
        for eps in epsilons {
            let req = NetRequest::new(k, eps.clone())?;
            let n = net_size(&req);
            let holds = check_exact(&req, n).holds();
            let previous_fails = !check_exact(&req, n - 1).holds();
            failed |= !(holds && previous_fails);
            rows.push(json!({
                "k": k,
                "epsilon": eps.to_string(),
                "delta": req.delta.to_string(),
                "n": n,
                "holds": holds,
                "previous_fails": previous_fails,
            }));
            csv_rows.push(vec![k.to_string(), eps.to_string(), req.delta.to_string(), n.to_string()]);
        }
    }
    Ok(StepOutput {
        json: json!({ "rows": rows }),
        table: Some(("net_size".into(), csv_bytes(&["k", "epsilon", "delta", "N"], csv_rows)?)),
        failed,
    })
}

fn net_step(
    group: &GroupDescriptor,
    epsilon: &Rational,
    trials: usize,
    discrepancy: bool,
    seed: u64,
    workers: Option<usize>,
) -> Result<StepOutput> {
    let q = group.quotient()?;
    let (fam, k) = ball_family(&q)?;
    let req = NetRequest::new(k.max(1) as u64, epsilon.clone())?;
    let opts = ExperimentOptions {
        discrepancy,
        workers,
        ..Default::default()
    };
    let report = net_experiment(&q, &fam, &req, trials, seed, &opts)?;
    let within = report.failure_rate <= *epsilon;
    let mut table = Vec::new();
    report.write_csv(&mut table)?;
    let mut json = serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?;
    json["group"] = serde_json::to_value(group).map_err(|e| Error::Io(e.to_string()))?;
    json["family_size"] = fam.len().into();
    json["within_bound"] = within.into();
    Ok(StepOutput {
        json,
        table: Some(("net_experiment".into(), table)),
        failed: !within,
    })
}

fn witness_step(group: &GroupDescriptor, epsilon: &Rational, seed: u64) -> Result<StepOutput> {
    let q = group.quotient()?;
    let fam = SetSystem::balls(&q);
    let group = serde_json::to_value(group).map_err(|e| Error::Io(e.to_string()))?;
    match fsg_witness(&q, &fam, epsilon, seed) {
        Ok(w) => Ok(StepOutput {
            json: json!({ "group": group, "status": "verified", "witness": w }),
            table: None,
            failed: false,
        }),
        Err(Error::NetMissed(missed)) => Ok(StepOutput {
            json: json!({ "group": group, "status": "missed", "epsilon": epsilon.to_string(), "missed": missed }),
            table: None,
            failed: true,
        }),
        Err(e) => Err(e),
    }
}

fn cover_step(group: &GroupDescriptor, sets: usize, seed: u64) -> Result<StepOutput> {
    let q = group.quotient()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_g = (q.len() as f64).ln();
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut failed = false;
    for s in 0..sets {
        let d = q.random_cylinder(&mut rng);
        let cert = greedy_cover(&q, &d, q.len())?;
        let lb = cert.lower_bound.unwrap_or(0);
        let k = cert.k();
        let exact = if q.len() <= EXACT_COVER_MAX_ORDER {
            exact_min_cover(&q, &d, EXACT_COVER_BUDGET)?
        } else {
            None
        };
        let ok = cert.covered && k as u64 >= lb && (k as f64) <= lb as f64 * (1.0 + ln_g) + 1e-9;
        failed |= !ok;
        rows.push(json!({
            "set": s,
            "level": d.level(),
            "residues": d.len(),
            "measure": cert.measure.to_string(),
            "k": k,
            "lower_bound": lb,
            "covered": cert.covered,
            "exact_k": exact,
        }));
        csv_rows.push(vec![
            s.to_string(),
            d.level().to_string(),
            cert.measure.to_string(),
            k.to_string(),
            lb.to_string(),
            cert.covered.to_string(),
            exact.map(|e| e.to_string()).unwrap_or_default(),
        ]);
    }
    let group = serde_json::to_value(group).map_err(|e| Error::Io(e.to_string()))?;
    Ok(StepOutput {
        json: json!({ "group": group, "order": q.len(), "rows": rows }),
        table: Some((
            "cover_study".into(),
            csv_bytes(&["set", "level", "measure", "k", "lower_bound", "covered", "exact_k"], csv_rows)?,
        )),
        failed,
    })
}

fn locus_step(family: &[WindowSet]) -> Result<StepOutput> {
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for (i, d) in family.iter().enumerate() {
        let (closed, bounded, compact) = (d.is_closed(), d.is_bounded(), d.is_definably_compact());
        rows.push(json!({ "index": i, "closed": closed, "bounded": bounded, "compact": compact }));
        csv_rows.push(vec![i.to_string(), closed.to_string(), bounded.to_string(), compact.to_string()]);
    }
    Ok(StepOutput {
        json: json!({ "locus": crate::sets::compact_locus(family), "rows": rows }),
        table: Some((
            "compact_locus".into(),
            csv_bytes(&["index", "closed", "bounded", "compact"], csv_rows)?,
        )),
        failed: false,
    })
}

fn run_step(step: &Step, seed: u64, workers: Option<usize>) -> Result<StepOutput> {
    match step {
        Step::NetSizeTable { ks, epsilons } => net_size_table(ks, epsilons),
        Step::NetExperiment {
            group,
            epsilon,
            trials,
            discrepancy,
        } => net_step(group, epsilon, *trials, *discrepancy, seed, workers),
        Step::FsgWitness { group, epsilon } => witness_step(group, epsilon, seed),
        Step::CoverStudy { group, sets } => cover_step(group, *sets, seed),
        Step::CompactLocus { family } => locus_step(family),
    }
}

/// Builds the report without touching the filesystem. Tables are returned
/// as `(file name, bytes)`.
pub fn build_report(config: &Config, workers: Option<usize>) -> Result<(Value, Vec<(String, Vec<u8>)>, usize)> {
    let workers = workers.or(config.workers);
    let mut steps = Vec::new();
    let mut tables = Vec::new();
    let mut failures = 0;
    for (i, step) in config.pipeline.iter().enumerate() {
        let seed = config.seed.wrapping_add(i as u64);
        let out = run_step(step, seed, workers)?;
        let mut json = out.json;
        json["index"] = i.into();
        json["kind"] = step.name().into();
        json["seed"] = seed.into();
        json["verified"] = (!out.failed).into();
        failures += out.failed as usize;
        if let Some((name, bytes)) = out.table {
            let file = format!("step{i}_{name}.csv");
            json["table"] = format!("tables/{file}").into();
            tables.push((file, bytes));
        }
        steps.push(json);
    }
    let report = json!({
        "schema": REPORT_SCHEMA,
        "seed": config.seed,
        "steps": steps,
        "verification_failures": failures,
    });
    Ok((report, tables, failures))
}

/// Runs the pipeline and writes `report.json` and `tables/*.csv` under
/// `out_dir` (or the config's `out_dir`, or `out`).
pub fn run_experiment(config: &Config, out_dir: Option<&Path>, workers: Option<usize>) -> Result<RunSummary> {
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let (mut report, tables, failures) = build_report(config, workers)?;
    let table_dir = dir.join("tables");
    fs::create_dir_all(&table_dir)?;
    let mut written = Vec::new();
    for (name, bytes) in tables {
        let path = table_dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
    }
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    report["generated_unix_secs"] = secs.into();
    let report_path = dir.join("report.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&report_path, text + "\n")?;
    Ok(RunSummary {
        report,
        report_path,
        tables: written,
        verification_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_pipeline() {
        let cfg = Config::from_json(r#"{"pipeline": [], "seed": 42}"#).unwrap();
        let (report, tables, failures) = build_report(&cfg, None).unwrap();
        assert_eq!(report["schema"], 1);
        assert_eq!(report["steps"].as_array().unwrap().len(), 0);
        assert!(tables.is_empty());
        assert_eq!(failures, 0);
    }

    #[test]
    fn config_errors_name_the_field() {
        let e = Config::from_json(r#"{"pipeline": [{"kind": "net_size_table", "ks": [1], "epsilons": ["x"]}]}"#)
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("pipeline[0]") && msg.contains("\"x\""), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
        let e = Config::from_json(r#"{"pipeline": [], "sed": 1}"#).unwrap_err();
        assert!(e.to_string().contains("sed"));
        let e = Config::from_json(r#"{"pipeline": [{"kind": "cover_study", "group": {"kind": "units", "p": 3, "level": 2}, "sets": 0}]}"#)
            .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn table_step() {
        let cfg = Config::from_json(
            r#"{"pipeline": [{"kind": "net_size_table", "ks": [1], "epsilons": ["1/2"]}], "seed": 0}"#,
        )
        .unwrap();
        let (report, tables, _) = build_report(&cfg, None).unwrap();
        assert_eq!(report["steps"][0]["rows"][0]["n"], 1270);
        assert_eq!(tables[0].0, "step0_net_size.csv");
        assert_eq!(String::from_utf8(tables[0].1.clone()).unwrap(), "k,epsilon,delta,N\n1,1/2,1/4,1270\n");
    }

    #[test]
    fn cover_and_locus_steps() {
        let cfg = Config::from_json(
            r#"{"pipeline": [
                {"kind": "cover_study", "group": {"kind": "additive", "p": 3, "level": 2}, "sets": 5},
                {"kind": "compact_locus", "family": [
                    {"p": 3, "n": 1, "scale": 0, "level": 1, "residues": [[0]], "tail": false},
                    {"p": 3, "n": 1, "scale": 0, "level": 1, "residues": [[0]], "tail": true}
                ]}
            ], "seed": 7}"#,
        )
        .unwrap();
        let (report, tables, failures) = build_report(&cfg, None).unwrap();
        assert_eq!(failures, 0);
        assert_eq!(tables.len(), 2);
        assert_eq!(report["steps"][1]["locus"], json!([0]));
        assert_eq!(report["steps"][0]["rows"].as_array().unwrap().len(), 5);
    }
}
