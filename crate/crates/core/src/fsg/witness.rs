use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::cover::{greedy_cover, CoverCertificate};
use crate::error::{Error, Result};
use crate::groups::{Element, FiniteQuotient, HaarSampler};
use crate::rational::{self, Rational};
use crate::sets::CylinderSet;
use crate::vc::{net_size, vc_dimension, verify_net, NetRequest, SetSystem, VcDimension, MAX_VC_CAP};

/// A finite point set met by every translate of every member of measure `> ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsgWitness {
    /// Distinct elements of the drawn sample, sorted.
    pub net: Vec<Element>,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub family_descriptor: String,
    pub vc_dimension: usize,
    /// Number of Haar draws, `N(k, ε)`; zero for a vacuous witness.
    pub sample_size: u64,
}

impl FsgWitness {
    fn net_bits(&self, q: &FiniteQuotient) -> Result<FixedBitSet> {
        let mut bits = FixedBitSet::with_capacity(q.len());
        for a in &self.net {
            bits.insert(q.index_of(a).ok_or_else(|| Error::UnknownElement(a.clone()))?);
        }
        Ok(bits)
    }

    /// Pairs `(g, label)` with `μ(D) > ε` and `g · D` disjoint from the net.
    pub fn translate_violations(&self, q: &FiniteQuotient, family: &SetSystem) -> Result<Vec<(Element, String)>> {
        let net = self.net_bits(q)?;
        let mut out = Vec::new();
        for (m, member) in family.family().iter().enumerate() {
            if family.measure(m) <= self.epsilon {
                continue;
            }
            for g in 0..q.len() {
                if family.translate_member(q, g, m).is_disjoint(&net) {
                    out.push((q.element(g).clone(), member.label.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Members that miss the net but have measure `> ε`; empty for a valid witness.
    pub fn large_members_missing_net(&self, q: &FiniteQuotient, family: &SetSystem) -> Result<Vec<String>> {
        let net = self.net_bits(q)?;
        Ok(family
            .family()
            .iter()
            .enumerate()
            .filter(|(m, member)| member.set.is_disjoint(&net) && family.measure(*m) > self.epsilon)
            .map(|(_, member)| member.label.clone())
            .collect())
    }
}

/// Draws `N(k, ε)` Haar points (stream 0 of `seed`) for a translation-closed
/// family of VC dimension `k`, and certifies them exactly.
///
/// A sample that misses some large member yields [`Error::NetMissed`] with
/// the labels; the caller may retry with another seed.
pub fn fsg_witness(q: &FiniteQuotient, family: &SetSystem, epsilon: &Rational, seed: u64) -> Result<FsgWitness> {
    if *epsilon <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !family.verify_translation_closed(q)? {
        return Err(Error::Precondition("family is not closed under left translation".into()));
    }
    let k = match vc_dimension(family, MAX_VC_CAP)? {
        VcDimension::Exact(k) => k,
        VcDimension::AtLeast(c) => {
            return Err(Error::CapExceeded(format!("VC dimension at least {c}")));
        }
    };
    let descriptor = format!(
        "{} members over {} mod {}^{}",
        family.len(),
        q.kind(),
        q.p(),
        q.level()
    );
    if *epsilon >= Rational::one() {
        return Ok(FsgWitness {
            net: vec![],
            epsilon: epsilon.clone(),
            family_descriptor: descriptor,
            vc_dimension: k,
            sample_size: 0,
        });
    }
    let req = NetRequest::new(k.max(1) as u64, epsilon.clone())?;
    let n = net_size(&req);
    let sample = HaarSampler::new(q, seed).sample_indices(n as usize);
    let missed = verify_net(family, epsilon, &sample);
    if !missed.is_empty() {
        return Err(Error::NetMissed(missed));
    }
    let distinct: BTreeSet<usize> = sample.into_iter().collect();
    let witness = FsgWitness {
        net: distinct.into_iter().map(|i| q.element(i).clone()).collect(),
        epsilon: epsilon.clone(),
        family_descriptor: descriptor,
        vc_dimension: k,
        sample_size: n,
    };
    let bad = witness.translate_violations(q, family)?;
    if !bad.is_empty() {
        return Err(Error::Verification(format!("{} translates miss the net", bad.len())));
    }
    Ok(witness)
}

/// Finite echo of the argument that a set containing the model points is generic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EasyDirectionReport {
    /// `|G \ box|`.
    pub outside_size: usize,
    /// `G \ box` contains none of the points.
    pub outside_misses_points: bool,
    /// Cover of the group by left translates of the box.
    pub cover: CoverCertificate,
    /// Family members containing none of the points.
    pub members_missing_points: Vec<String>,
}

pub fn easy_direction_check(
    q: &FiniteQuotient,
    family: &SetSystem,
    points: &[Element],
    gamma_box: &CylinderSet,
) -> Result<EasyDirectionReport> {
    family.check_ground(q)?;
    let inside = match q.subset_indices(gamma_box) {
        Ok(idx) => idx,
        Err(Error::NotInGroup) => return Err(Error::Precondition("box is not inside the group".into())),
        Err(e) => return Err(e),
    };
    let mut in_box = FixedBitSet::with_capacity(q.len());
    inside.iter().for_each(|&i| in_box.insert(i));
    let mut hit = FixedBitSet::with_capacity(q.len());
    for a in points {
        let i = q
            .index_of(a)
            .ok_or_else(|| Error::Precondition(format!("point {a:?} is not in the group")))?;
        if !in_box.contains(i) {
            return Err(Error::Precondition(format!("point {a:?} lies outside the box")));
        }
        hit.insert(i);
    }
    let mut outside = in_box.clone();
    outside.toggle_range(..);
    let cover = greedy_cover(q, gamma_box, q.len())?;
    let members_missing_points = family
        .family()
        .iter()
        .filter(|m| m.set.is_disjoint(&hit))
        .map(|m| m.label.clone())
        .collect();
    Ok(EasyDirectionReport {
        outside_size: outside.count_ones(..),
        outside_misses_points: outside.is_disjoint(&hit),
        cover,
        members_missing_points,
    })
}
