//! Simplicial fans and stacky fans.
//!
//! Cones of a [`Fan`] are identified by the sorted list of their ray indices.
//! A [`StackyFan`] adds a level `n_ρ >= 1` on every ray; its free-net is
//! generated by the points `n_ρ v_ρ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cones::{ConeError, RationalCone};
use crate::linalg::{int_rank, IntVector};
use crate::monoids::{monoid_from_cone, MonoidError};

/// Sorted ray indices of a cone.
pub type ConeId = Vec<usize>;

/// One failed fan axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RankMismatch {
        ray: usize,
        expected: usize,
        found: usize,
    },
    ZeroRay(usize),
    NonPrimitiveRay {
        ray: usize,
        vector: IntVector,
        primitive: IntVector,
    },
    DuplicateRay {
        first: usize,
        second: usize,
    },
    RayIndexOutOfRange {
        cone: usize,
        index: usize,
    },
    RepeatedRayInCone {
        cone: usize,
        index: usize,
    },
    NonSimplicial(ConeId),
    IntersectionNotFace(ConeId, ConeId),
    UnusedRay(usize),
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::RankMismatch { .. } => "RankMismatch",
            Violation::ZeroRay(_) => "ZeroRay",
            Violation::NonPrimitiveRay { .. } => "NonPrimitiveRay",
            Violation::DuplicateRay { .. } => "DuplicateRay",
            Violation::RayIndexOutOfRange { .. } => "RayIndexOutOfRange",
            Violation::RepeatedRayInCone { .. } => "RepeatedRayInCone",
            Violation::NonSimplicial(_) => "NonSimplicial",
            Violation::IntersectionNotFace(..) => "IntersectionNotFace",
            Violation::UnusedRay(_) => "UnusedRay",
        }
    }

    /// Cones the violation refers to, if any.
    pub fn cones(&self) -> Vec<ConeId> {
        match self {
            Violation::NonSimplicial(c) => vec![c.clone()],
            Violation::IntersectionNotFace(a, b) => vec![a.clone(), b.clone()],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankMismatch {
                ray,
                expected,
                found,
            } => {
                write!(f, "ray {ray} has {found} coordinates, expected {expected}")
            }
            Violation::ZeroRay(i) => write!(f, "ray {i} is zero"),
            Violation::NonPrimitiveRay {
                ray,
                vector,
                primitive,
            } => {
                write!(f, "ray {ray} = {vector} is not primitive; use {primitive}")
            }
            Violation::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            Violation::RayIndexOutOfRange { cone, index } => {
                write!(
                    f,
                    "cone {cone} refers to ray index {index}, which does not exist"
                )
            }
            Violation::RepeatedRayInCone { cone, index } => {
                write!(f, "cone {cone} lists ray {index} twice")
            }
            Violation::NonSimplicial(c) => write!(f, "cone {c:?} is not simplicial"),
            Violation::IntersectionNotFace(a, b) => {
                write!(
                    f,
                    "the intersection of cones {a:?} and {b:?} is not a face of each"
                )
            }
            Violation::UnusedRay(i) => write!(f, "ray {i} lies in no cone"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid fan: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct FanError {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StackyFanError {
    #[error("expected {expected} levels, got {found}")]
    LevelCount { expected: usize, found: usize },
    #[error("level on ray {0} must be a positive integer")]
    InvalidLevel(usize),
    #[error("cone {0:?} is not in the fan")]
    UnknownCone(ConeId),
    #[error("cone {face:?} is not a face of {cone:?}")]
    NotAFace { face: ConeId, cone: ConeId },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A finite simplicial fan, closed under faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<IntVector>,
    maximal_cones: Vec<ConeId>,
    cones: Vec<ConeId>,
}

/// Checks the fan axioms and builds the face closure. Every violation found
/// is reported, not just the first.
pub fn validate_fan(
    ambient_rank: usize,
    rays: &[IntVector],
    maximal_cones: &[Vec<usize>],
) -> Result<Fan, FanError> {
    let mut violations = Vec::new();
    for (i, r) in rays.iter().enumerate() {
        if r.len() != ambient_rank {
            violations.push(Violation::RankMismatch {
                ray: i,
                expected: ambient_rank,
                found: r.len(),
            });
        } else if r.is_zero() {
            violations.push(Violation::ZeroRay(i));
        } else if !r.is_primitive() {
            violations.push(Violation::NonPrimitiveRay {
                ray: i,
                vector: r.clone(),
                primitive: r.primitive(),
            });
        }
    }
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if rays[i] == rays[j] {
                violations.push(Violation::DuplicateRay {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let mut cones: Vec<ConeId> = Vec::new();
    for (c, cone) in maximal_cones.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &i in cone {
            if i >= rays.len() {
                violations.push(Violation::RayIndexOutOfRange { cone: c, index: i });
            } else if !seen.insert(i) {
                violations.push(Violation::RepeatedRayInCone { cone: c, index: i });
            }
        }
        cones.push(seen.into_iter().collect());
    }
    if !violations.is_empty() {
        return Err(FanError { violations });
    }

    for c in &cones {
        let vs: Vec<IntVector> = c.iter().map(|&i| rays[i].clone()).collect();
        if int_rank(&vs, ambient_rank) != vs.len() {
            violations.push(Violation::NonSimplicial(c.clone()));
        }
    }
    let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
    for i in 0..rays.len() {
        if !used.contains(&i) {
            violations.push(Violation::UnusedRay(i));
        }
    }
    if !violations.is_empty() {
        return Err(FanError { violations });
    }

    let cone_of = |id: &[usize]| {
        let vs: Vec<IntVector> = id.iter().map(|&i| rays[i].clone()).collect();
        RationalCone::new(ambient_rank, &vs).expect("simplicial cones are strictly convex")
    };
    let geometric: Vec<RationalCone> = cones.iter().map(|c| cone_of(c)).collect();
    for a in 0..cones.len() {
        for b in a + 1..cones.len() {
            let common: Vec<usize> = cones[a]
                .iter()
                .filter(|i| cones[b].contains(i))
                .copied()
                .collect();
            let meet = geometric[a]
                .intersect(&geometric[b])
                .expect("same ambient rank");
            if meet.rays() != cone_of(&common).rays() {
                violations.push(Violation::IntersectionNotFace(
                    cones[a].clone(),
                    cones[b].clone(),
                ));
            }
        }
    }
    if !violations.is_empty() {
        return Err(FanError { violations });
    }

    // keep only maximal cones
    let mut maximal: Vec<ConeId> = cones
        .iter()
        .filter(|c| {
            !cones
                .iter()
                .any(|o| o.len() > c.len() && c.iter().all(|i| o.contains(i)))
        })
        .cloned()
        .collect();
    maximal.sort();
    maximal.dedup();
    let mut closure: BTreeSet<ConeId> = BTreeSet::new();
    for c in &maximal {
        for face in subsets(c) {
            closure.insert(face);
        }
    }
    let mut all: Vec<ConeId> = closure.into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(Fan {
        ambient_rank,
        rays: rays.to_vec(),
        maximal_cones: maximal,
        cones: all,
    })
}

fn subsets(c: &[usize]) -> Vec<ConeId> {
    (0u64..1 << c.len())
        .map(|mask| {
            c.iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}

impl Fan {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[ConeId] {
        &self.maximal_cones
    }

    /// All cones, by dimension and then lexicographically; starts with the
    /// zero cone.
    pub fn cones(&self) -> &[ConeId] {
        &self.cones
    }

    pub fn contains(&self, cone: &[usize]) -> bool {
        self.cones.iter().any(|c| c == cone)
    }

    pub fn check_cone(&self, cone: &[usize]) -> Result<(), StackyFanError> {
        if self.contains(cone) {
            Ok(())
        } else {
            Err(StackyFanError::UnknownCone(cone.to_vec()))
        }
    }

    /// `face ≺ cone`, both in the fan.
    pub fn check_face(&self, face: &[usize], cone: &[usize]) -> Result<(), StackyFanError> {
        self.check_cone(face)?;
        self.check_cone(cone)?;
        if !face.iter().all(|i| cone.contains(i)) {
            return Err(StackyFanError::NotAFace {
                face: face.to_vec(),
                cone: cone.to_vec(),
            });
        }
        Ok(())
    }

    pub fn geometric_cone(&self, cone: &[usize]) -> RationalCone {
        let vs: Vec<IntVector> = cone.iter().map(|&i| self.rays[i].clone()).collect();
        RationalCone::new(self.ambient_rank, &vs).expect("fan cones are strictly convex")
    }

    /// `mult(σ)`.
    pub fn multiplicity(&self, cone: &[usize]) -> Result<BigInt, StackyFanError> {
        self.check_cone(cone)?;
        Ok(self.geometric_cone(cone).multiplicity()?)
    }

    /// Whether every cone has multiplicity one.
    pub fn is_smooth(&self) -> bool {
        self.maximal_cones
            .iter()
            .all(|c| self.multiplicity(c).is_ok_and(|m| m.is_one()))
    }
}

/// Wall criterion: every maximal cone is full-dimensional, there is at least
/// one, every wall (codimension-one cone) lies in exactly two of them, and the
/// maximal cones are connected through walls.
pub fn is_complete(fan: &Fan) -> bool {
    let d = fan.ambient_rank;
    let top = &fan.maximal_cones;
    if top.is_empty() || top.iter().any(|c| c.len() != d) {
        return false;
    }
    let mut cofaces: BTreeMap<ConeId, Vec<usize>> = BTreeMap::new();
    for (k, c) in top.iter().enumerate() {
        for skip in 0..c.len() {
            let wall: ConeId = c
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &i)| i)
                .collect();
            cofaces.entry(wall).or_default().push(k);
        }
    }
    if d > 0 && cofaces.values().any(|v| v.len() != 2) {
        return false;
    }
    // connectivity through walls
    let mut seen = vec![false; top.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(k) = stack.pop() {
        for pair in cofaces.values().filter(|v| v.contains(&k)) {
            for &o in pair {
                if !seen[o] {
                    seen[o] = true;
                    stack.push(o);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Whether `n` is invertible in every listed characteristic (0 = char 0).
pub fn invertible_in(n: &BigInt, characteristics: &[u64]) -> bool {
    characteristics
        .iter()
        .all(|&p| p == 0 || n.gcd(&BigInt::from(p)).is_one())
}

/// A simplicial fan with a level `n_ρ >= 1` on each ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    fan: Fan,
    levels: Vec<u64>,
}

impl StackyFan {
    pub fn new(fan: Fan, levels: Vec<u64>) -> Result<Self, StackyFanError> {
        if levels.len() != fan.rays.len() {
            return Err(StackyFanError::LevelCount {
                expected: fan.rays.len(),
                found: levels.len(),
            });
        }
        if let Some(i) = levels.iter().position(|&n| n == 0) {
            return Err(StackyFanError::InvalidLevel(i));
        }
        let sf = StackyFan { fan, levels };
        debug_assert!(sf.free_net_is_free());
        Ok(sf)
    }

    /// Level 1 on every ray.
    pub fn canonical(fan: Fan) -> Self {
        let n = fan.rays.len();
        StackyFan {
            fan,
            levels: vec![1; n],
        }
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn level(&self, ray: usize) -> u64 {
        self.levels[ray]
    }

    /// `w_ρ = n_ρ v_ρ`.
    pub fn free_net_points(&self) -> Vec<IntVector> {
        self.fan
            .rays
            .iter()
            .zip(&self.levels)
            .map(|(v, &n)| v.scale(&BigInt::from(n)))
            .collect()
    }

    /// Per cone the points `w_ρ` are independent (the net is free of rank
    /// `dim σ`) and each is a positive multiple of `v_ρ` (so it is close to
    /// `σ ∩ N`).
    fn free_net_is_free(&self) -> bool {
        let w = self.free_net_points();
        self.fan.maximal_cones.iter().all(|c| {
            let ws: Vec<IntVector> = c.iter().map(|&i| w[i].clone()).collect();
            int_rank(&ws, self.fan.ambient_rank) == ws.len()
        }) && w
            .iter()
            .zip(&self.fan.rays)
            .all(|(w, v)| w.dot(v).is_positive())
    }

    /// `mult(σ) · Π_{ρ ∈ σ(1)} n_ρ`; 1 for the zero cone.
    pub fn stacky_multiplicity(&self, cone: &[usize]) -> Result<BigInt, StackyFanError> {
        let m = self.fan.multiplicity(cone)?;
        Ok(cone
            .iter()
            .fold(m, |acc, &i| acc * BigInt::from(self.levels[i])))
    }

    /// Every stacky multiplicity invertible in every listed characteristic.
    pub fn is_tame(&self, characteristics: &[u64]) -> bool {
        self.fan.cones.iter().all(|c| {
            self.stacky_multiplicity(c)
                .is_ok_and(|m| invertible_in(&m, characteristics))
        })
    }
}

/// Monomial generators of the ideal of `V(τ)` in the chart `X_σ`: the
/// Hilbert-basis elements of `σ^∨ ∩ M` pairing positively with the relative
/// interior of `τ`. Empty for `τ = 0`.
pub fn cycle_ideal_classical(
    fan: &Fan,
    tau: &[usize],
    sigma_chart: &[usize],
) -> Result<Vec<IntVector>, StackyFanError> {
    fan.check_face(tau, sigma_chart)?;
    if tau.is_empty() {
        return Ok(Vec::new());
    }
    let p = monoid_from_cone(&fan.geometric_cone(sigma_chart))?;
    let interior = fan.geometric_cone(tau).relative_interior_point()?;
    Ok(p.hilbert_basis()
        .iter()
        .filter(|h| interior.dot_int(h) > Zero::zero())
        .cloned()
        .collect())
}
