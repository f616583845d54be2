use std::io::Write;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::net_size::{net_size, NetRequest};
use super::stats::discrepancy;
use super::SetSystem;
use crate::error::{Error, Result};
use crate::groups::{Element, FiniteQuotient, HaarSampler};
use crate::rational::{self, Rational};

/// Labels of members with measure `> ε` that the sample misses.
pub fn verify_net(sys: &SetSystem, epsilon: &Rational, sample: &[usize]) -> Vec<String> {
    let mut hit = FixedBitSet::with_capacity(sys.ground().len());
    for &i in sample {
        if i < sys.ground().len() {
            hit.insert(i);
        }
    }
    sys.family()
        .iter()
        .enumerate()
        .filter(|(m, member)| sys.measure(*m) > *epsilon && member.set.is_disjoint(&hit))
        .map(|(_, member)| member.label.clone())
        .collect()
}

/// Knobs for [`net_experiment`] beyond the request itself.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOptions {
    /// Draw this many points instead of `net_size(req)`.
    pub sample_size: Option<usize>,
    /// Use this sample (element indices) in every trial instead of drawing.
    pub forced_sample: Option<Vec<usize>>,
    /// Also draw a second sample per trial and record the discrepancy.
    pub discrepancy: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub n: usize,
    pub missed_count: usize,
    pub missed: Vec<String>,
    #[serde(with = "opt_rational")]
    pub max_discrepancy: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetReport {
    pub k: u64,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub sample_size: usize,
    /// The sample drawn in trial 0.
    pub sample: Vec<Element>,
    /// Members missed by the trial-0 sample.
    pub missed: Vec<String>,
    pub trials: Vec<TrialOutcome>,
    pub failures: usize,
    #[serde(with = "rational::serde_str")]
    pub failure_rate: Rational,
    /// Trials whose discrepancy exceeded δ, when discrepancies were recorded.
    pub discrepancy_exceedances: Option<usize>,
}

impl NetReport {
    /// Per-trial CSV rows: `trial,N,missed_count,max_discrepancy`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["trial", "N", "missed_count", "max_discrepancy"]).map_err(io)?;
        for t in &self.trials {
            let disc = t.max_discrepancy.as_ref().map(|d| d.to_string()).unwrap_or_default();
            w.write_record([t.trial.to_string(), t.n.to_string(), t.missed_count.to_string(), disc])
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

mod opt_rational {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(r) => s.collect_str(r),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(s) => crate::rational::parse_rational(&s)
                .map(Some)
                .ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}"))),
            None => Ok(None),
        }
    }
}

struct TrialResult {
    outcome: TrialOutcome,
    sample: Option<Vec<usize>>,
}

fn run_trial(
    q: &FiniteQuotient,
    sys: &SetSystem,
    req: &NetRequest,
    n: usize,
    seed: u64,
    trial: usize,
    opts: &ExperimentOptions,
) -> Result<TrialResult> {
    let sample = match &opts.forced_sample {
        Some(s) => s.clone(),
        None => HaarSampler::stream(q, seed, 2 * trial as u64).sample_indices(n),
    };
    let missed = verify_net(sys, &req.epsilon, &sample);
    let max_discrepancy = if opts.discrepancy {
        let other = HaarSampler::stream(q, seed, 2 * trial as u64 + 1).sample_indices(sample.len());
        Some(discrepancy(&sample, &other, sys)?)
    } else {
        None
    };
    Ok(TrialResult {
        outcome: TrialOutcome {
            trial,
            n: sample.len(),
            missed_count: missed.len(),
            missed,
            max_discrepancy,
        },
        sample: (trial == 0).then_some(sample),
    })
}

#[cfg(feature = "parallel")]
fn run_trials(
    trials: usize,
    workers: Option<usize>,
    f: impl Fn(usize) -> Result<TrialResult> + Sync + Send,
) -> Result<Vec<TrialResult>> {
    use rayon::prelude::*;
    let go = || (0..trials).into_par_iter().map(&f).collect::<Result<Vec<_>>>();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(go),
        None => go(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_trials(
    trials: usize,
    _workers: Option<usize>,
    f: impl Fn(usize) -> Result<TrialResult>,
) -> Result<Vec<TrialResult>> {
    (0..trials).map(f).collect()
}

/// Runs `trials` independent ε-net trials on a quotient. Trial `t` draws its
/// sample from stream `2t` of the master seed (and, for discrepancies, its
/// second sample from stream `2t + 1`), so the report does not depend on
/// the number of workers.
pub fn net_experiment(
    q: &FiniteQuotient,
    sys: &SetSystem,
    req: &NetRequest,
    trials: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<NetReport> {
    sys.check_ground(q)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if let Some(s) = &opts.forced_sample {
        if s.is_empty() || s.iter().any(|&i| i >= q.len()) {
            return Err(Error::InvalidArgument("forced sample must be nonempty element indices".into()));
        }
    }
    let n = match opts.sample_size {
        Some(n) => n,
        None => usize::try_from(net_size(req))
            .map_err(|_| Error::CapExceeded("sample size".into()))?,
    };
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let results = run_trials(trials, opts.workers, |t| run_trial(q, sys, req, n, seed, t, opts))?;
    let mut sample = Vec::new();
    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        if let Some(s) = r.sample {
            sample = s;
        }
        outcomes.push(r.outcome);
    }
    let failures = outcomes.iter().filter(|t| t.missed_count > 0).count();
    let discrepancy_exceedances = opts.discrepancy.then(|| {
        outcomes
            .iter()
            .filter(|t| t.max_discrepancy.as_ref().is_some_and(|d| *d > req.delta))
            .count()
    });
    Ok(NetReport {
        k: req.k,
        epsilon: req.epsilon.clone(),
        delta: req.delta.clone(),
        sample_size: n,
        missed: outcomes[0].missed.clone(),
        sample: sample.into_iter().map(|i| q.element(i).clone()).collect(),
        failures,
        failure_rate: Rational::new(BigInt::from(failures), BigInt::from(trials)),
        trials: outcomes,
        discrepancy_exceedances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{CompactGroupScheme, GroupKind};
    use crate::rational::{int, ratio};

    fn units() -> FiniteQuotient {
        CompactGroupScheme::new(GroupKind::Units, 3).unwrap().quotient(3).unwrap()
    }

    #[test]
    fn full_sample_misses_nothing() {
        let q = units();
        let s = SetSystem::balls(&q);
        let all: Vec<usize> = (0..q.len()).collect();
        assert!(verify_net(&s, &ratio(1, 4), &all).is_empty());
    }

    #[test]
    fn reports_large_missed_member() {
        let q = units();
        let half: Vec<usize> = (0..q.len()).filter(|&i| q.element(i)[0] % 3 == 1).collect();
        let s = SetSystem::new(q.elements().to_vec(), vec![("D".into(), half.clone())]).unwrap();
        let outside: Vec<usize> = (0..q.len()).filter(|i| !half.contains(i)).collect();
        assert_eq!(verify_net(&s, &ratio(1, 4), &outside), vec!["D".to_string()]);
        // Not large enough to count.
        assert!(verify_net(&s, &ratio(1, 2), &outside).is_empty());
    }

    #[test]
    fn forced_full_sample_never_fails() {
        let q = units();
        let s = SetSystem::balls(&q);
        let req = NetRequest::new(2, ratio(1, 4)).unwrap();
        let opts = ExperimentOptions {
            forced_sample: Some((0..q.len()).collect()),
            ..Default::default()
        };
        let r = net_experiment(&q, &s, &req, 1, 0, &opts).unwrap();
        assert_eq!(r.failure_rate, int(0));
        assert!(r.missed.is_empty());
    }

    #[test]
    fn tiny_samples_fail_and_csv_rows() {
        let q = units();
        let s = SetSystem::balls(&q);
        let req = NetRequest::new(2, ratio(1, 4)).unwrap();
        let opts = ExperimentOptions {
            sample_size: Some(1),
            discrepancy: true,
            ..Default::default()
        };
        let r = net_experiment(&q, &s, &req, 20, 3, &opts).unwrap();
        assert!(r.failures > 0);
        assert_eq!(r.sample.len(), 1);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "trial,N,missed_count,max_discrepancy");
        assert_eq!(text.lines().count(), 21);
        let back: NetReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
