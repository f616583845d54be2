//! Set systems, shattering and epsilon-nets.

mod net;
mod net_size;
mod shatter;
mod stats;

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Element, FiniteQuotient};
use crate::rational::Rational;
use crate::sets::CylinderSet;

pub use net::{net_experiment, verify_net, ExperimentOptions, NetReport, TrialOutcome};
pub use net_size::{check_exact, exp_exceeds, net_size, NetRequest, NetSizeCheck};
pub use shatter::{sauer_shelah_bound, shatter_count, vc_dimension, VcDimension, MAX_VC_CAP};
pub use stats::{average, discrepancy};

/// A labelled member of a [`SetSystem`], as a bitset over ground indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub label: String,
    pub set: FixedBitSet,
}

impl Member {
    pub fn len(&self) -> usize {
        self.set.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.set.contains(i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.set.ones()
    }
}

/// A finite ground set with a labelled family of subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    ground: Vec<Element>,
    family: Vec<Member>,
    translation_closed: bool,
}

#[derive(Serialize, Deserialize)]
struct MemberJson {
    label: String,
    members: Vec<Element>,
}

#[derive(Serialize, Deserialize)]
struct SetSystemJson {
    ground: Vec<Element>,
    family: Vec<MemberJson>,
    #[serde(default)]
    translation_closed: bool,
}

impl Serialize for SetSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetSystemJson {
            ground: self.ground.clone(),
            family: self
                .family
                .iter()
                .map(|m| MemberJson {
                    label: m.label.clone(),
                    members: m.indices().map(|i| self.ground[i].clone()).collect(),
                })
                .collect(),
            translation_closed: self.translation_closed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SetSystemJson::deserialize(d)?;
        let index: HashMap<&Element, usize> = j.ground.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut family = Vec::with_capacity(j.family.len());
        for m in &j.family {
            let idx: Option<Vec<usize>> = m.members.iter().map(|e| index.get(e).copied()).collect();
            let idx = idx.ok_or_else(|| {
                serde::de::Error::custom(format!("member of {:?} not in ground set", m.label))
            })?;
            family.push((m.label.clone(), idx));
        }
        let mut sys = SetSystem::new(j.ground.clone(), family).map_err(serde::de::Error::custom)?;
        sys.translation_closed = j.translation_closed;
        Ok(sys)
    }
}

impl SetSystem {
    pub fn new(ground: Vec<Element>, family: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let distinct: HashSet<&Element> = ground.iter().collect();
        if distinct.len() != ground.len() {
            return Err(Error::InvalidArgument("ground set has repeated elements".into()));
        }
        let mut labels = HashSet::new();
        let mut members = Vec::with_capacity(family.len());
        for (label, idx) in family {
            if !labels.insert(label.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate label {label:?}")));
            }
            let mut set = FixedBitSet::with_capacity(ground.len());
            for i in idx {
                if i >= ground.len() {
                    return Err(Error::InvalidArgument(format!("index {i} outside ground set")));
                }
                set.insert(i);
            }
            members.push(Member { label, set });
        }
        Ok(Self {
            ground,
            family: members,
            translation_closed: false,
        })
    }

    /// Cylinder sets inside a quotient, over the quotient's elements.
    pub fn from_cylinders(q: &FiniteQuotient, family: Vec<(String, CylinderSet)>) -> Result<Self> {
        let family = family
            .into_iter()
            .map(|(l, d)| Ok((l, q.subset_indices(&d)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(q.elements().to_vec(), family)
    }

    /// Every box `∏ B_γ(c_i)` (for `0 <= γ <= level`) met with the carrier,
    /// without repeats. For the catalogue groups this family is already
    /// closed under left translation.
    pub fn balls(q: &FiniteQuotient) -> Self {
        let mut seen = HashSet::new();
        let mut family = Vec::new();
        for gamma in 0..=q.level() {
            let mut classes: Vec<(Element, Vec<usize>)> = Vec::new();
            let mut slot: HashMap<Element, usize> = HashMap::new();
            for (i, e) in q.elements().iter().enumerate() {
                let key = q.reduce(e, gamma);
                let s = *slot.entry(key.clone()).or_insert_with(|| {
                    classes.push((key, Vec::new()));
                    classes.len() - 1
                });
                classes[s].1.push(i);
            }
            for (center, idx) in classes {
                if seen.insert(idx.clone()) {
                    family.push((format!("B{gamma}{center:?}"), idx));
                }
            }
        }
        Self::new(q.elements().to_vec(), family).expect("labels are distinct")
    }

    /// Adds every left translate `a · D` of every member and sets the flag.
    pub fn close_under_translation(mut self, q: &FiniteQuotient) -> Result<Self> {
        self.check_ground(q)?;
        let mut seen: HashSet<FixedBitSet> = self.family.iter().map(|m| m.set.clone()).collect();
        let mut labels: HashSet<String> = self.family.iter().map(|m| m.label.clone()).collect();
        let mut queue: Vec<Member> = self.family.clone();
        while let Some(m) = queue.pop() {
            for a in 0..q.len() {
                let set = self.translate(q, a, &m.set);
                if seen.insert(set.clone()) {
                    let mut label = format!("{:?}*{}", q.element(a), m.label);
                    while !labels.insert(label.clone()) {
                        label.push('\'');
                    }
                    let member = Member { label, set };
                    self.family.push(member.clone());
                    queue.push(member);
                }
            }
        }
        self.translation_closed = true;
        Ok(self)
    }

    fn translate(&self, q: &FiniteQuotient, a: usize, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.ground.len());
        for i in set.ones() {
            out.insert(q.op_index(a, i));
        }
        out
    }

    /// Left translate of a member by the group element with index `a`.
    pub fn translate_member(&self, q: &FiniteQuotient, a: usize, member: usize) -> FixedBitSet {
        self.translate(q, a, &self.family[member].set)
    }

    /// Exhaustively checks closure under left translation.
    pub fn verify_translation_closed(&self, q: &FiniteQuotient) -> Result<bool> {
        self.check_ground(q)?;
        let sets: HashSet<&FixedBitSet> = self.family.iter().map(|m| &m.set).collect();
        Ok(self
            .family
            .iter()
            .all(|m| (0..q.len()).all(|a| sets.contains(&self.translate(q, a, &m.set)))))
    }

    pub(crate) fn check_ground(&self, q: &FiniteQuotient) -> Result<()> {
        if self.ground.as_slice() != q.elements() {
            return Err(Error::InvalidArgument("set system ground is not the quotient".into()));
        }
        Ok(())
    }

    pub fn ground(&self) -> &[Element] {
        &self.ground
    }

    pub fn family(&self) -> &[Member] {
        &self.family
    }

    pub fn translation_closed(&self) -> bool {
        self.translation_closed
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// Normalized counting measure of a member.
    pub fn measure(&self, member: usize) -> Rational {
        Rational::new(
            self.family[member].len().into(),
            self.ground.len().max(1).into(),
        )
    }
}
