//! Compact p-adic groups and their finite quotients modulo `p^m`.
//!
//! Each scheme has its carrier inside `Z_p^n` and reduction modulo `p^m` is
//! a group homomorphism, so subsets that are unions of fibres have exact
//! Haar measure equal to the normalized count on the quotient.

mod sampler;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{check_prime, PadicApprox};
use crate::rational::Rational;
use crate::sets::{all_digits, checked_pow, CylinderSet, Residue};

pub use sampler::HaarSampler;

/// Default bound on the number of enumerated quotient elements.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// A group element: coordinates reduced modulo `p^m`.
pub type Element = Residue;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// `(Z_p^n, +)`.
    Additive {
        #[serde(default = "one")]
        n: usize,
    },
    /// `Z_p^×`.
    Units,
    /// `1 + p Z_p`.
    PrincipalUnits,
    /// Upper unitriangular 3×3 matrices over `Z_p`, as triples `(a, b, c)`.
    Heisenberg,
}

impl GroupKind {
    pub fn dim(self) -> usize {
        match self {
            GroupKind::Additive { n } => n,
            GroupKind::Units | GroupKind::PrincipalUnits => 1,
            GroupKind::Heisenberg => 3,
        }
    }

    pub fn min_level(self) -> u32 {
        match self {
            GroupKind::PrincipalUnits => 2,
            _ => 1,
        }
    }

    pub fn is_abelian(self) -> bool {
        !matches!(self, GroupKind::Heisenberg)
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Additive { n } => write!(f, "additive({n})"),
            GroupKind::Units => f.write_str("units"),
            GroupKind::PrincipalUnits => f.write_str("principal_units"),
            GroupKind::Heisenberg => f.write_str("heisenberg"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompactGroupScheme {
    #[serde(flatten)]
    pub kind: GroupKind,
    pub p: u64,
}

impl CompactGroupScheme {
    pub fn new(kind: GroupKind, p: u64) -> Result<Self> {
        check_prime(p).map_err(|e| Error::InvalidGroup(e.to_string()))?;
        if kind.dim() == 0 {
            return Err(Error::InvalidGroup("additive dimension must be at least 1".into()));
        }
        Ok(Self { kind, p })
    }

    /// Number of elements of the level-`m` quotient.
    pub fn order(&self, level: u32) -> Option<u128> {
        let q = (self.p as u128).checked_pow(level)?;
        match self.kind {
            GroupKind::Additive { n } => q.checked_pow(n as u32),
            GroupKind::Units => Some(q - q / self.p as u128),
            GroupKind::PrincipalUnits => Some(q / self.p as u128),
            GroupKind::Heisenberg => q.checked_pow(3),
        }
    }

    pub fn quotient(&self, level: u32) -> Result<FiniteQuotient> {
        FiniteQuotient::new(*self, level)
    }
}

/// The `{"kind":"units","p":3,"level":2}` descriptor used by the CLI and configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    #[serde(flatten)]
    pub scheme: CompactGroupScheme,
    pub level: u32,
}

impl GroupDescriptor {
    pub fn quotient(&self) -> Result<FiniteQuotient> {
        self.scheme.quotient(self.level)
    }
}

fn mulmod(a: u64, b: u64, modulus: u64) -> u64 {
    (a as u128 * b as u128 % modulus as u128) as u64
}

fn addmod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 + b as u128) % modulus as u128) as u64
}

/// The group law modulo `modulus`; reduction between levels respects it.
fn law(kind: GroupKind, modulus: u64, a: &[u64], b: &[u64]) -> Element {
    match kind {
        GroupKind::Additive { .. } => a.iter().zip(b).map(|(&x, &y)| addmod(x, y, modulus)).collect(),
        GroupKind::Units | GroupKind::PrincipalUnits => vec![mulmod(a[0], b[0], modulus)],
        GroupKind::Heisenberg => vec![
            addmod(a[0], b[0], modulus),
            addmod(a[1], b[1], modulus),
            addmod(addmod(a[2], b[2], modulus), mulmod(a[0], b[1], modulus), modulus),
        ],
    }
}

/// Whether a residue at level >= 1 reduces from the carrier.
fn in_carrier(kind: GroupKind, p: u64, r: &[u64]) -> bool {
    match kind {
        GroupKind::Units => r[0] % p != 0,
        GroupKind::PrincipalUnits => r[0] % p == 1,
        _ => true,
    }
}

/// A compact group reduced modulo `p^level`, with its elements enumerated
/// in lexicographic order.
#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    scheme: CompactGroupScheme,
    level: u32,
    modulus: u64,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
}

impl FiniteQuotient {
    pub fn new(scheme: CompactGroupScheme, level: u32) -> Result<Self> {
        Self::with_cap(scheme, level, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(scheme: CompactGroupScheme, level: u32, cap: usize) -> Result<Self> {
        let scheme = CompactGroupScheme::new(scheme.kind, scheme.p)?;
        let kind = scheme.kind;
        if level < kind.min_level() {
            return Err(Error::InvalidGroup(format!(
                "{kind} needs level >= {}, got {level}",
                kind.min_level()
            )));
        }
        let modulus = checked_pow(scheme.p, level)?;
        let order = scheme.order(level).unwrap_or(u128::MAX);
        if order > cap as u128 {
            return Err(Error::CapExceeded(format!(
                "{kind} mod {}^{level} has {order} elements, cap is {cap}",
                scheme.p
            )));
        }
        let p = scheme.p;
        let elements: Vec<Element> = match kind {
            GroupKind::Additive { n } => all_digits(modulus, n),
            GroupKind::Heisenberg => all_digits(modulus, 3),
            GroupKind::Units => (1..modulus).filter(|x| x % p != 0).map(|x| vec![x]).collect(),
            GroupKind::PrincipalUnits => (1..modulus).step_by(p as usize).map(|x| vec![x]).collect(),
        };
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(Self {
            scheme,
            level,
            modulus,
            elements,
            index,
        })
    }

    pub fn scheme(&self) -> CompactGroupScheme {
        self.scheme
    }

    pub fn kind(&self) -> GroupKind {
        self.scheme.kind
    }

    pub fn p(&self) -> u64 {
        self.scheme.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.scheme.kind.dim()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &[u64]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &[u64]) -> bool {
        self.index.contains_key(e)
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.modulus)
    }

    fn addmod(&self, a: u64, b: u64) -> u64 {
        addmod(a, b, self.modulus)
    }

    fn negmod(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    pub fn identity(&self) -> Element {
        match self.kind() {
            GroupKind::Additive { n } => vec![0; n],
            GroupKind::Units | GroupKind::PrincipalUnits => vec![1],
            GroupKind::Heisenberg => vec![0; 3],
        }
    }

    /// The group law on reduced coordinates.
    pub fn op(&self, a: &[u64], b: &[u64]) -> Element {
        law(self.kind(), self.modulus, a, b)
    }

    pub fn inv(&self, a: &[u64]) -> Element {
        match self.kind() {
            GroupKind::Additive { .. } => a.iter().map(|&x| self.negmod(x)).collect(),
            GroupKind::Units | GroupKind::PrincipalUnits => {
                let x = PadicApprox::from_integer(self.p(), &BigInt::from(a[0]), self.level as usize)
                    .and_then(|x| x.inv_unit())
                    .expect("quotient elements are units");
                vec![x.unit_part().to_u64().unwrap()]
            }
            GroupKind::Heisenberg => {
                // (a, b, c)^-1 = (-a, -b, ab - c)
                vec![
                    self.negmod(a[0]),
                    self.negmod(a[1]),
                    self.addmod(self.mulmod(a[0], a[1]), self.negmod(a[2])),
                ]
            }
        }
    }

    /// `op` on element indices.
    pub fn op_index(&self, i: usize, j: usize) -> usize {
        self.index[&self.op(&self.elements[i], &self.elements[j])]
    }

    /// Reduces an element to a coarser level.
    pub fn reduce(&self, e: &[u64], level: u32) -> Element {
        let m = self.p().pow(level);
        e.iter().map(|x| x % m).collect()
    }

    /// For each element, the index of its image in a coarser quotient.
    pub fn reduction_map(&self, coarse: &FiniteQuotient) -> Result<Vec<usize>> {
        if coarse.scheme != self.scheme || coarse.level > self.level {
            return Err(Error::InvalidGroup("reduction needs the same scheme at a coarser level".into()));
        }
        Ok(self
            .elements
            .iter()
            .map(|e| coarse.index[&self.reduce(e, coarse.level)])
            .collect())
    }

    /// Indices of the elements of `d`, refined to this level.
    pub fn subset_indices(&self, d: &CylinderSet) -> Result<Vec<usize>> {
        self.check_set(d)?;
        let modulus = d.modulus();
        let mut buf = vec![0; self.dim()];
        Ok((0..self.len())
            .filter(|&i| {
                for (b, x) in buf.iter_mut().zip(&self.elements[i]) {
                    *b = x % modulus;
                }
                d.residues().contains(&buf)
            })
            .collect())
    }

    /// The cylinder at this level with the given elements as residues.
    pub fn cylinder(&self, indices: impl IntoIterator<Item = usize>) -> CylinderSet {
        CylinderSet::new(
            self.p(),
            self.dim(),
            self.level,
            indices.into_iter().map(|i| self.elements[i].clone()),
        )
        .expect("elements are reduced residues")
    }

    /// The whole carrier as a cylinder set.
    pub fn carrier(&self) -> CylinderSet {
        self.cylinder(0..self.len())
    }

    fn check_set(&self, d: &CylinderSet) -> Result<()> {
        if d.p() != self.p() {
            return Err(Error::PrimeMismatch(self.p(), d.p()));
        }
        if d.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), d.dim()));
        }
        if d.level() > self.level {
            return Err(Error::Precondition(format!(
                "set level {} exceeds quotient level {}",
                d.level(),
                self.level
            )));
        }
        if d.level() >= 1 && !d.residues().iter().all(|r| in_carrier(self.kind(), self.p(), r)) {
            return Err(Error::NotInGroup);
        }
        Ok(())
    }

    /// Normalized Haar measure `|D| / |G|`, exact.
    ///
    /// Reduction to the set's own level `l` is onto with fibres of equal
    /// size, so this is the residue count over the order of the level-`l`
    /// quotient.
    pub fn haar_measure(&self, d: &CylinderSet) -> Result<Rational> {
        self.check_set(d)?;
        if d.level() == 0 {
            let k = self.subset_indices(d)?.len();
            return Ok(Rational::new(BigInt::from(k), BigInt::from(self.len())));
        }
        let order = self.scheme.order(d.level()).expect("coarser than the quotient");
        Ok(Rational::new(BigInt::from(d.len()), BigInt::from(order)))
    }

    /// Left translate `a · D`, computed at the level of `D`.
    pub fn translate_set(&self, a: &[u64], d: &CylinderSet) -> Result<CylinderSet> {
        if !self.contains(a) {
            return Err(Error::UnknownElement(a.to_vec()));
        }
        self.check_set(d)?;
        if d.level() == 0 {
            let members = self.subset_indices(d)?;
            return Ok(self.cylinder(members.into_iter().map(|i| self.index[&self.op(a, &self.elements[i])])));
        }
        let modulus = d.modulus();
        let a = self.reduce(a, d.level());
        CylinderSet::new(
            self.p(),
            self.dim(),
            d.level(),
            d.residues().iter().map(|r| law(self.kind(), modulus, &a, r)),
        )
    }

    pub fn sampler(&self, seed: u64) -> HaarSampler<'_> {
        HaarSampler::new(self, seed)
    }

    /// A random nonempty cylinder inside the carrier: a level is drawn
    /// uniformly, then each reduced element is kept with probability 1/2.
    pub fn random_cylinder<R: Rng + ?Sized>(&self, rng: &mut R) -> CylinderSet {
        let level = rng.gen_range(self.kind().min_level()..=self.level);
        let reduced: Vec<Element>;
        let pool: &[Element] = if level == self.level {
            &self.elements
        } else {
            let set: BTreeSet<Element> = self.elements.iter().map(|e| self.reduce(e, level)).collect();
            reduced = set.into_iter().collect();
            &reduced
        };
        let mut chosen: Vec<Element> = pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if chosen.is_empty() {
            chosen.push(pool[rng.gen_range(0..pool.len())].clone());
        }
        CylinderSet::new(self.p(), self.dim(), level, chosen).expect("reduced residues")
    }
}
