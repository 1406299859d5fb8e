//! Local charts of a toric stack.
//!
//! For a cone `σ` of rank `r` the lattice splits as `N = N' ⊕ N''` with `N'`
//! the saturation of the span of `σ`. With `P = σ'^∨ ∩ M'` the chart is
//! `[Spec Z[F] / D(G)] × G_m^{d-r}` where `F` is the admissible resolution of
//! `P` of the type given by the levels and `G = F^gp / P^gp`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::cones::{ConeError, RationalCone};
use crate::linalg::{
    cokernel_invariants, solve_in_int_basis, split_lattice, FiniteAbelianGroup, IntVector,
    IntegerMatrix,
};
use crate::monoids::{
    admissible_resolution, exponent_vectors, generated_by_hilbert_basis, monoid_from_cone,
    resolution_cokernel_with_weights, AffineMonoid, FreeResolution, MonoidError,
};
use crate::stackyfan::{invertible_in, ConeId, StackyFan, StackyFanError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartError {
    #[error(transparent)]
    Fan(#[from] StackyFanError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    /// An internal consistency check failed; this is a bug.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// `N = N' ⊕ N''` adapted to a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    /// Basis of `N'` (Hermite normal form).
    pub n_prime: Vec<IntVector>,
    /// Basis of a complement `N''`.
    pub n_double_prime: Vec<IntVector>,
    /// Dual basis of `M`: the first `r` vectors pair to the identity with
    /// `n_prime` and vanish on `n_double_prime`, the rest the other way round.
    pub dual_basis: Vec<IntVector>,
}

impl Splitting {
    pub fn rank(&self) -> usize {
        self.n_prime.len()
    }

    /// Coordinates of a vector of `N'` in the basis `n_prime`.
    pub fn n_prime_coordinates(&self, v: &IntVector) -> Option<IntVector> {
        if self.n_prime.is_empty() {
            return v.is_zero().then(|| IntVector(Vec::new()));
        }
        solve_in_int_basis(&self.n_prime, v)?.to_integral()
    }

    /// `Σ p_j m_j` for `p ∈ M' = Z^r`.
    pub fn lift_to_m(&self, p: &IntVector) -> IntVector {
        let d = self.n_prime.len() + self.n_double_prime.len();
        p.0.iter()
            .zip(&self.dual_basis)
            .fold(IntVector::zeros(d), |acc, (c, m)| acc.add(&m.scale(c)))
    }
}

/// Splits the lattice along a strictly convex simplicial cone.
pub fn split_cone(sigma: &RationalCone) -> Result<Splitting, ChartError> {
    if !sigma.is_strictly_convex() {
        return Err(ConeError::NotStrictlyConvex.into());
    }
    if !sigma.is_simplicial() {
        return Err(ConeError::NotSimplicial.into());
    }
    let d = sigma.ambient_rank();
    let (n_prime, n_double_prime) = split_lattice(sigma.rays(), d);
    let basis: Vec<IntVector> = n_prime.iter().chain(&n_double_prime).cloned().collect();
    let inverse = IntegerMatrix::from_rows(&basis, d)
        .unimodular_inverse()
        .ok_or_else(|| ChartError::Internal("lattice splitting is not unimodular".into()))?;
    let dual_basis = (0..d).map(|j| inverse.column(j)).collect();
    Ok(Splitting {
        n_prime,
        n_double_prime,
        dual_basis,
    })
}

/// One coordinate `x_i` of a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCoordinate {
    /// Fan ray whose divisor is `x_i = 0`.
    pub fan_ray: usize,
    pub level: u64,
    /// Ray of `C(P)` in `M'` coordinates.
    pub dual_ray: IntVector,
    /// Image of `e_i` in `G`.
    pub weight: IntVector,
}

/// The chart over one cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalChart {
    pub cone: ConeId,
    pub torus_rank: usize,
    pub splitting: Splitting,
    pub monoid: AffineMonoid,
    pub resolution: FreeResolution,
    pub group: FiniteAbelianGroup,
    /// Ordered as the rays of `C(P)`.
    pub coordinates: Vec<ChartCoordinate>,
    /// Generators of `σ^∨ ∩ M` modulo units, lifted to `M`.
    pub coarse_generators: Vec<IntVector>,
}

impl LocalChart {
    pub fn rank(&self) -> usize {
        self.splitting.rank()
    }

    pub fn weights(&self) -> Vec<IntVector> {
        self.coordinates.iter().map(|c| c.weight.clone()).collect()
    }

    /// Coordinates whose vanishing cuts out the closed substack of a face
    /// `τ` of this chart's cone, i.e. those whose fan ray lies in `τ`.
    pub fn cycle_ideal(&self, face: &[usize]) -> Result<Vec<usize>, ChartError> {
        if !face.iter().all(|i| self.cone.contains(i)) {
            return Err(StackyFanError::NotAFace {
                face: face.to_vec(),
                cone: self.cone.clone(),
            }
            .into());
        }
        Ok((0..self.coordinates.len())
            .filter(|&i| face.contains(&self.coordinates[i].fan_ray))
            .collect())
    }

    /// Whether `weight` is zero in `G`.
    fn is_trivial_class(&self, x: &IntVector) -> bool {
        x.0.iter()
            .zip(&self.group.invariant_factors)
            .all(|(c, d)| (c % d).is_zero())
    }

    /// Exponent vectors of total degree at most `bound` where invariance under
    /// `D(G)` and membership in `P` disagree. Empty when the invariant ring is
    /// `Z[P]` up to that degree.
    pub fn invariant_ring_mismatches(&self, bound: u64) -> Vec<Vec<u64>> {
        let n = self.coordinates.len();
        let k = self.group.invariant_factors.len();
        exponent_vectors(n, bound)
            .into_iter()
            .filter(|a| {
                let class = a
                    .iter()
                    .zip(&self.coordinates)
                    .fold(IntVector::zeros(k), |acc, (&e, c)| {
                        acc.add(&c.weight.scale(&BigInt::from(e)))
                    });
                let fixed = self.is_trivial_class(&class);
                let in_p = self
                    .resolution
                    .element(a)
                    .to_integral()
                    .is_some_and(|x| generated_by_hilbert_basis(&self.monoid, &x));
                fixed != in_p
            })
            .collect()
    }

    /// Whether the weights generate `G`, i.e. `D(G)` acts faithfully.
    pub fn weights_generate(&self) -> bool {
        let k = self.group.invariant_factors.len();
        let mut cols = self.weights();
        for (i, d) in self.group.invariant_factors.iter().enumerate() {
            let mut rel = IntVector::zeros(k);
            rel.0[i] = d.clone();
            cols.push(rel);
        }
        cokernel_invariants(&IntegerMatrix::from_columns(&cols, k)).is_trivial()
    }
}

/// Builds the chart over `cone`.
pub fn local_chart(sf: &StackyFan, cone: &[usize]) -> Result<LocalChart, ChartError> {
    let fan = sf.fan();
    fan.check_cone(cone)?;
    let sigma = fan.geometric_cone(cone);
    let splitting = split_cone(&sigma)?;
    let r = splitting.rank();
    let coords: Vec<IntVector> = cone
        .iter()
        .map(|&i| {
            splitting
                .n_prime_coordinates(&fan.rays()[i])
                .ok_or_else(|| ChartError::Internal(format!("ray {i} is not in N'")))
        })
        .collect::<Result<_, _>>()?;
    let sigma_prime = RationalCone::new(r, &coords)?;
    let monoid = monoid_from_cone(&sigma_prime)?;

    // ray of C(P) -> fan ray
    let mut owner: BTreeMap<IntVector, usize> = BTreeMap::new();
    for (&i, v) in cone.iter().zip(&coords) {
        owner.insert(sigma_prime.ray_star(v)?, i);
    }
    let levels: BTreeMap<IntVector, u64> = owner
        .iter()
        .map(|(u, &i)| (u.clone(), sf.level(i)))
        .collect();
    let resolution = admissible_resolution(&monoid, &levels)?;
    let (group, weights) = resolution_cokernel_with_weights(&resolution)?;
    let coordinates = resolution
        .rays()
        .iter()
        .zip(weights)
        .map(|(u, weight)| {
            let fan_ray = *owner
                .get(u)
                .ok_or_else(|| ChartError::Internal(format!("ray {u} of C(P) has no fan ray")))?;
            Ok(ChartCoordinate {
                fan_ray,
                level: sf.level(fan_ray),
                dual_ray: u.clone(),
                weight,
            })
        })
        .collect::<Result<Vec<_>, ChartError>>()?;
    let mut coarse_generators: Vec<IntVector> = monoid
        .hilbert_basis()
        .iter()
        .map(|p| splitting.lift_to_m(p))
        .collect();
    coarse_generators.sort();
    Ok(LocalChart {
        cone: cone.to_vec(),
        torus_rank: fan.ambient_rank() - r,
        splitting,
        monoid,
        resolution,
        group,
        coordinates,
        coarse_generators,
    })
}

/// The stabilizer group `G_σ`; its Cartier dual `D(G_σ)` is the stabilizer of
/// the torus-fixed point of the chart. Its order must equal the stacky
/// multiplicity, and a mismatch is reported as an internal error.
pub fn stabilizer(sf: &StackyFan, cone: &[usize]) -> Result<FiniteAbelianGroup, ChartError> {
    let chart = local_chart(sf, cone)?;
    let expected = sf.stacky_multiplicity(cone)?;
    match chart.group.order() {
        Some(n) if n == expected => Ok(chart.group),
        other => Err(ChartError::Internal(format!(
            "stabilizer of cone {cone:?} has order {other:?}, stacky multiplicity is {expected}"
        ))),
    }
}

/// Deligne–Mumford over the given characteristics; equivalent to tameness.
pub fn is_deligne_mumford(sf: &StackyFan, characteristics: &[u64]) -> bool {
    sf.is_tame(characteristics)
}

/// The chart's quotient map is Kummer étale when `|G|` is invertible.
pub fn is_kummer_etale_chart(chart: &LocalChart, characteristics: &[u64]) -> bool {
    chart
        .group
        .order()
        .is_some_and(|n| invertible_in(&n, characteristics))
}

/// Coordinates of the chart over `chart_cone` cutting out the substack of
/// the face `face`.
pub fn cycle_ideal_in_chart(
    sf: &StackyFan,
    face: &[usize],
    chart_cone: &[usize],
) -> Result<Vec<usize>, ChartError> {
    sf.fan().check_face(face, chart_cone)?;
    local_chart(sf, chart_cone)?.cycle_ideal(face)
}

/// A torus-invariant prime divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryDivisor {
    pub ray: usize,
    pub level: u64,
    /// Generic stabilizer, cyclic of order equal to the level.
    pub stabilizer: FiniteAbelianGroup,
    /// `(maximal cone, coordinate index)` for every maximal chart meeting it.
    pub local_equations: Vec<(ConeId, usize)>,
}

/// The divisors `D_ρ`, one per ray.
pub fn boundary_divisors(sf: &StackyFan) -> Result<Vec<BoundaryDivisor>, ChartError> {
    let fan = sf.fan();
    let charts: Vec<LocalChart> = fan
        .maximal_cones()
        .iter()
        .map(|c| local_chart(sf, c))
        .collect::<Result<_, _>>()?;
    (0..fan.rays().len())
        .map(|ray| {
            let local_equations = charts
                .iter()
                .filter_map(|ch| {
                    ch.coordinates
                        .iter()
                        .position(|c| c.fan_ray == ray)
                        .map(|k| (ch.cone.clone(), k))
                })
                .collect();
            Ok(BoundaryDivisor {
                ray,
                level: sf.level(ray),
                stabilizer: stabilizer(sf, &[ray])?,
                local_equations,
            })
        })
        .collect()
}

/// `Π` of the group's invariant factors as `μ_d` labels, e.g. `["μ_2", "μ_6"]`.
pub fn cartier_dual_labels(group: &FiniteAbelianGroup) -> Vec<String> {
    group
        .invariant_factors
        .iter()
        .map(|d| format!("μ_{d}"))
        .collect()
}

/// Single label of a stabilizer: `1`, `μ_n` or a product.
pub fn stabilizer_label(group: &FiniteAbelianGroup) -> String {
    if group.is_trivial() {
        "1".to_string()
    } else {
        cartier_dual_labels(group).join(" × ")
    }
}
