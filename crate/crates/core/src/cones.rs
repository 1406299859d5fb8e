//! Rational polyhedral cones.
//!
//! A [`RationalCone`] keeps both of its descriptions: the extreme rays (and a
//! lineality basis, empty for strictly convex cones) and the generators of
//! its dual. Conversion between the two goes through an exact
//! double-description / Fourier–Motzkin pass in [`double_description`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    hnf_basis, int_rank, lattice_index, rational_rank, solve_in_basis, IntVector, RationalVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("rank mismatch: expected vectors of length {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("cone is not strictly convex")]
    NotStrictlyConvex,
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("cone is not full-dimensional")]
    NotFullDimensional,
    #[error("{0} is not a ray of the cone")]
    NotARay(IntVector),
    #[error("the zero cone has no relative interior point")]
    ZeroCone,
}

/// A rational polyhedral cone in `Q^ambient_rank`.
///
/// `rays` are primitive integer vectors, pairwise non-proportional and
/// sorted lexicographically. When `lineality` is nonempty the cone is not
/// strictly convex; rays are then taken orthogonal to the lineality space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalCone {
    ambient_rank: usize,
    rays: Vec<IntVector>,
    lineality: Vec<IntVector>,
    dual_rays: Vec<IntVector>,
    dual_lineality: Vec<IntVector>,
}

impl RationalCone {
    /// A strictly convex cone generated by `generators`.
    pub fn new(ambient_rank: usize, generators: &[IntVector]) -> Result<Self, ConeError> {
        let c = Self::from_generators(ambient_rank, generators)?;
        if !c.is_strictly_convex() {
            return Err(ConeError::NotStrictlyConvex);
        }
        Ok(c)
    }

    /// Convenience constructor for tests and fixtures.
    pub fn from_i64s(ambient_rank: usize, generators: &[&[i64]]) -> Result<Self, ConeError> {
        let gens: Vec<IntVector> = generators.iter().map(|g| IntVector::from_i64s(g)).collect();
        Self::new(ambient_rank, &gens)
    }

    /// Any polyhedral cone, possibly containing lines.
    pub fn from_generators(
        ambient_rank: usize,
        generators: &[IntVector],
    ) -> Result<Self, ConeError> {
        for g in generators {
            check_len(ambient_rank, g.len())?;
        }
        let (dual_rays, dual_lineality) = double_description(ambient_rank, generators);
        let dual_gens = signed_generators(&dual_rays, &dual_lineality);
        let (rays, lineality) = double_description(ambient_rank, &dual_gens);
        Ok(RationalCone {
            ambient_rank,
            rays,
            lineality,
            dual_rays,
            dual_lineality,
        })
    }

    pub fn from_rational_generators(
        ambient_rank: usize,
        generators: &[RationalVector],
    ) -> Result<Self, ConeError> {
        let ints: Vec<IntVector> = generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(RationalVector::primitive_direction)
            .collect();
        Self::from_generators(ambient_rank, &ints)
    }

    /// The cone `{x : <a, x> >= 0 for every a in inequalities}`.
    pub fn from_inequalities(
        ambient_rank: usize,
        inequalities: &[IntVector],
    ) -> Result<Self, ConeError> {
        for a in inequalities {
            check_len(ambient_rank, a.len())?;
        }
        let (rays, lineality) = double_description(ambient_rank, inequalities);
        let gens = signed_generators(&rays, &lineality);
        let (dual_rays, dual_lineality) = double_description(ambient_rank, &gens);
        Ok(RationalCone {
            ambient_rank,
            rays,
            lineality,
            dual_rays,
            dual_lineality,
        })
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self::from_generators(ambient_rank, &[]).expect("zero cone")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Extreme rays as first lattice points, in lexicographic order.
    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Basis of the lineality space (empty iff strictly convex).
    pub fn lineality(&self) -> &[IntVector] {
        &self.lineality
    }

    /// Rays plus both signs of every lineality vector.
    pub fn generators(&self) -> Vec<IntVector> {
        signed_generators(&self.rays, &self.lineality)
    }

    pub fn dual_rays(&self) -> &[IntVector] {
        &self.dual_rays
    }

    pub fn dual_lineality(&self) -> &[IntVector] {
        &self.dual_lineality
    }

    pub fn dual_generators(&self) -> Vec<IntVector> {
        signed_generators(&self.dual_rays, &self.dual_lineality)
    }

    /// `{m : <m, u> >= 0 for all u in self}`.
    pub fn dual_cone(&self) -> RationalCone {
        RationalCone {
            ambient_rank: self.ambient_rank,
            rays: self.dual_rays.clone(),
            lineality: self.dual_lineality.clone(),
            dual_rays: self.rays.clone(),
            dual_lineality: self.lineality.clone(),
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn dim(&self) -> usize {
        let mut all = self.rays.clone();
        all.extend(self.lineality.iter().cloned());
        int_rank(&all, self.ambient_rank)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_rank
    }

    /// Strictly convex with linearly independent rays.
    pub fn is_simplicial(&self) -> bool {
        self.is_strictly_convex() && int_rank(&self.rays, self.ambient_rank) == self.rays.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn contains(&self, v: &RationalVector) -> Result<bool, ConeError> {
        check_len(self.ambient_rank, v.len())?;
        Ok(self.dual_rays.iter().all(|m| !v.dot_int(m).is_negative())
            && self.dual_lineality.iter().all(|l| v.dot_int(l).is_zero()))
    }

    pub fn contains_int(&self, v: &IntVector) -> Result<bool, ConeError> {
        check_len(self.ambient_rank, v.len())?;
        Ok(self.dual_rays.iter().all(|m| !v.dot(m).is_negative())
            && self.dual_lineality.iter().all(|l| v.dot(l).is_zero()))
    }

    pub fn contains_cone(&self, other: &RationalCone) -> Result<bool, ConeError> {
        check_len(self.ambient_rank, other.ambient_rank)?;
        for g in other.generators() {
            if !self.contains_int(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn intersect(&self, other: &RationalCone) -> Result<RationalCone, ConeError> {
        check_len(self.ambient_rank, other.ambient_rank)?;
        let mut ineqs = self.dual_generators();
        ineqs.extend(other.dual_generators());
        Self::from_inequalities(self.ambient_rank, &ineqs)
    }

    /// Whether `f` is a face of `self`: `f ⊆ self` and `f = self ∩ m^⊥` for
    /// some `m` in the dual. The candidate `m` is the sum of all dual rays
    /// vanishing on `f`, which cuts out the smallest face containing `f`.
    pub fn is_face(&self, f: &RationalCone) -> Result<bool, ConeError> {
        if !self.contains_cone(f)? {
            return Ok(false);
        }
        let f_gens = f.generators();
        let mut m = IntVector::zeros(self.ambient_rank);
        for u in &self.dual_rays {
            if f_gens.iter().all(|g| g.dot(u).is_zero()) {
                m = m.add(u);
            }
        }
        let mut face_gens: Vec<IntVector> = self
            .rays
            .iter()
            .filter(|r| r.dot(&m).is_zero())
            .cloned()
            .collect();
        face_gens.extend(signed_generators(&[], &self.lineality));
        let face = Self::from_generators(self.ambient_rank, &face_gens)?;
        Ok(face.rays == f.rays && face.lineality == f.lineality)
    }

    /// Index of the lattice spanned by the primitive rays inside the
    /// saturation of their span.
    pub fn multiplicity(&self) -> Result<BigInt, ConeError> {
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        Ok(lattice_index(&self.rays, self.ambient_rank))
    }

    /// For a simplicial full-dimensional cone and one of its rays `rho`, the
    /// unique ray of the dual pairing positively with `rho`.
    pub fn ray_star(&self, rho: &IntVector) -> Result<IntVector, ConeError> {
        check_len(self.ambient_rank, rho.len())?;
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        if !self.is_full_dimensional() {
            return Err(ConeError::NotFullDimensional);
        }
        if !self.rays.contains(rho) {
            return Err(ConeError::NotARay(rho.clone()));
        }
        let mut hits = self.dual_rays.iter().filter(|m| m.dot(rho).is_positive());
        let star = hits
            .next()
            .cloned()
            .expect("simplicial cone has a dual ray off rho^perp");
        debug_assert!(hits.next().is_none());
        Ok(star)
    }

    /// Sum of the primitive ray generators.
    pub fn relative_interior_point(&self) -> Result<RationalVector, ConeError> {
        if self.rays.is_empty() {
            return Err(ConeError::ZeroCone);
        }
        let sum = self
            .rays
            .iter()
            .fold(IntVector::zeros(self.ambient_rank), |acc, r| acc.add(r));
        Ok(sum.to_rational())
    }

    /// Coordinates of `v` in the ray basis of a simplicial cone, or `None` if
    /// `v` is outside the span of the rays.
    pub fn ray_coordinates(&self, v: &RationalVector) -> Result<Option<RationalVector>, ConeError> {
        check_len(self.ambient_rank, v.len())?;
        if !self.is_simplicial() {
            return Err(ConeError::NotSimplicial);
        }
        let basis: Vec<RationalVector> = self.rays.iter().map(IntVector::to_rational).collect();
        Ok(solve_in_basis(&basis, v))
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), ConeError> {
    if expected != found {
        return Err(ConeError::RankMismatch { expected, found });
    }
    Ok(())
}

fn signed_generators(rays: &[IntVector], lineality: &[IntVector]) -> Vec<IntVector> {
    let mut out = rays.to_vec();
    for l in lineality {
        out.push(l.clone());
        out.push(l.neg());
    }
    out
}

/// Converts `{x : <a, x> >= 0 for all a}` into generators.
///
/// Returns `(rays, lineality)`: primitive extreme rays of the cone modulo its
/// lineality space (orthogonal to it, sorted) and a Hermite-normal-form basis
/// of the lineality space. Each inequality is added in turn; rays that stop
/// being extreme are discarded with the rank test
/// `rank(A_{Z(r)}) = rank(A) - 1`, where `Z(r)` are the tight inequalities.
pub fn double_description(
    ambient_rank: usize,
    inequalities: &[IntVector],
) -> (Vec<IntVector>, Vec<IntVector>) {
    let d = ambient_rank;
    let mut lineality: Vec<IntVector> = (0..d).map(|i| IntVector::unit(d, i)).collect();
    let mut rays: Vec<IntVector> = Vec::new();
    let mut processed: Vec<IntVector> = Vec::new();

    for a in inequalities {
        let a = a.primitive();
        if a.is_zero() || processed.contains(&a) {
            continue;
        }
        if let Some(idx) = lineality.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l0 = lineality.remove(idx);
            if a.dot(&l0).is_negative() {
                l0 = l0.neg();
            }
            let a0 = a.dot(&l0);
            for l in lineality.iter_mut() {
                let al = a.dot(l);
                *l = l.scale(&a0).sub(&l0.scale(&al)).primitive();
            }
            for r in rays.iter_mut() {
                let ar = a.dot(r);
                *r = r.scale(&a0).sub(&l0.scale(&ar)).primitive();
            }
            rays.push(l0);
        } else {
            let mut next = Vec::new();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for r in rays.drain(..) {
                let ar = a.dot(&r);
                if ar.is_positive() {
                    pos.push((r.clone(), ar));
                    next.push(r);
                } else if ar.is_zero() {
                    next.push(r);
                } else {
                    neg.push((r, ar));
                }
            }
            for (p, ap) in &pos {
                for (n, an) in &neg {
                    let c = n.scale(ap).sub(&p.scale(an)).primitive();
                    if !c.is_zero() {
                        next.push(c);
                    }
                }
            }
            rays = next;
        }
        processed.push(a);
        rays = prune_rays(d, rays, &lineality, &processed);
    }

    let lineality = hnf_basis(&lineality, d);
    let mut rays = prune_rays(d, rays, &lineality, &processed);
    rays.sort();
    (rays, lineality)
}

fn prune_rays(
    d: usize,
    rays: Vec<IntVector>,
    lineality: &[IntVector],
    processed: &[IntVector],
) -> Vec<IntVector> {
    let full_rank = int_rank(processed, d);
    let mut out: Vec<IntVector> = Vec::new();
    for r in rays {
        let r = project_off(&r, lineality);
        if r.is_zero() || out.contains(&r) {
            continue;
        }
        let tight: Vec<IntVector> = processed
            .iter()
            .filter(|a| a.dot(&r).is_zero())
            .cloned()
            .collect();
        if int_rank(&tight, d) + 1 == full_rank {
            out.push(r);
        }
    }
    out
}

/// Primitive direction of the orthogonal projection of `r` onto the
/// complement of `span(lineality)`.
fn project_off(r: &IntVector, lineality: &[IntVector]) -> IntVector {
    if lineality.is_empty() {
        return r.primitive();
    }
    let k = lineality.len();
    // Solve the Gram system G c = L r.
    let gram: Vec<RationalVector> = (0..k)
        .map(|i| {
            RationalVector(
                (0..k)
                    .map(|j| BigRational::from_integer(lineality[i].dot(&lineality[j])))
                    .collect(),
            )
        })
        .collect();
    let rhs = RationalVector(
        lineality
            .iter()
            .map(|l| BigRational::from_integer(l.dot(r)))
            .collect(),
    );
    // gram is symmetric, so solving with its rows as a basis is the same system
    let c = solve_in_basis(&gram, &rhs).expect("lineality basis is independent");
    let mut proj = r.to_rational();
    for (ci, l) in c.0.iter().zip(lineality) {
        proj = proj.sub(&l.to_rational().scale(ci));
    }
    if proj.is_zero() {
        return IntVector::zeros(r.len());
    }
    proj.primitive_direction()
}

/// Whether the rational vectors are linearly independent.
pub fn independent(vectors: &[RationalVector], ambient_rank: usize) -> bool {
    rational_rank(vectors, ambient_rank) == vectors.len()
}

/// `<m, v>` as a rational, a small convenience for callers mixing types.
pub fn pairing(m: &IntVector, v: &RationalVector) -> BigRational {
    v.dot_int(m)
}

/// Whether `<m, v> > 0`.
pub fn pairs_positively(m: &IntVector, v: &RationalVector) -> bool {
    pairing(m, v) > BigRational::zero()
}
