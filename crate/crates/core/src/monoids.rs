//! Affine toric monoids and their free resolutions.
//!
//! A monoid is always `C ∩ Z^d` for a rational cone `C` (so it is saturated
//! by construction). For a sharp simplicially toric monoid `P` with primitive
//! ray generators `v_1, ..., v_d` of `C(P)`, the minimal free resolution is
//! the free monoid on `f_i = v_i / b_i`, where `1/b_i` generates the image of
//! `P^gp` under the `i`-th coordinate in the ray basis. An admissible
//! resolution of type `n` divides each generator further by its level `n_i`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cones::{ConeError, RationalCone};
use crate::linalg::{
    cokernel_invariants, cokernel_with_projection, hnf_basis, int_rank,
    rational_subgroup_generator, saturate, smith_normal_form, solve_in_int_basis, split_lattice,
    FiniteAbelianGroup, IntVector, IntegerMatrix, RationalVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("monoid is not sharp")]
    NotSharp,
    #[error("{0} is not a ray of C(P)")]
    UnknownRay(IntVector),
    #[error("level on ray {0} must be a positive integer")]
    ZeroLevel(IntVector),
    #[error("P^gp does not have integral coordinates in the resolution basis")]
    NonIntegralResolution,
    #[error("{0} is not an element of the monoid")]
    NotInMonoid(IntVector),
    #[error("submonoid is not close: no multiple of {element} up to {bound} lies in it")]
    NotClose { element: IntVector, bound: u64 },
    #[error("submonoid is not saturated: {0} lies in C(Q) ∩ Q^gp but not in Q")]
    NotSaturated(IntVector),
    #[error("coordinate subset must be nonempty, strictly increasing and below {0}")]
    InvalidSubset(usize),
    #[error("expected the minimal free resolution (all levels 1)")]
    NotMinimal,
    #[error("projected resolution differs from the recomputed minimal one: {0}")]
    ProjectionMismatch(String),
}

/// `P = C ∩ Z^d` for a rational cone `C = C(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMonoid {
    lattice_rank: usize,
    cone: RationalCone,
    hilbert_basis: Vec<IntVector>,
    units: Vec<IntVector>,
    simplicial: bool,
}

impl AffineMonoid {
    /// The monoid of lattice points of `cone`. For cones with lineality the
    /// Hilbert basis is that of the sharp quotient, lifted along a lattice
    /// complement of the unit group.
    pub fn from_cone(cone: RationalCone) -> Result<Self, MonoidError> {
        let d = cone.ambient_rank();
        if cone.is_strictly_convex() {
            let hilbert_basis = pointed_hilbert_basis(&cone)?;
            let simplicial = cone.is_simplicial();
            return Ok(AffineMonoid {
                lattice_rank: d,
                cone,
                hilbert_basis,
                units: Vec::new(),
                simplicial,
            });
        }
        let (units, complement) = split_lattice(cone.lineality(), d);
        let mut basis = units.clone();
        basis.extend(complement.iter().cloned());
        let u = units.len();
        let quotient_gens: Vec<IntVector> = cone
            .rays()
            .iter()
            .map(|r| {
                let c = solve_in_int_basis(&basis, r).expect("split is a basis");
                RationalVector(c.0[u..].to_vec()).primitive_direction()
            })
            .collect();
        let quotient = RationalCone::new(d - u, &quotient_gens)?;
        let lift = |h: &IntVector| {
            h.0.iter()
                .zip(&complement)
                .fold(IntVector::zeros(d), |acc, (c, w)| acc.add(&w.scale(c)))
        };
        let mut hilbert_basis: Vec<IntVector> =
            pointed_hilbert_basis(&quotient)?.iter().map(lift).collect();
        hilbert_basis.sort();
        let simplicial = quotient.is_simplicial();
        Ok(AffineMonoid {
            lattice_rank: d,
            cone,
            hilbert_basis,
            units,
            simplicial,
        })
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    /// `C(P)`.
    pub fn cone(&self) -> &RationalCone {
        &self.cone
    }

    /// Irreducible elements (of the sharp quotient, when `P` is not sharp).
    pub fn hilbert_basis(&self) -> &[IntVector] {
        &self.hilbert_basis
    }

    /// Basis of the group of invertible elements.
    pub fn units(&self) -> &[IntVector] {
        &self.units
    }

    pub fn is_sharp(&self) -> bool {
        self.units.is_empty()
    }

    /// Whether `C(P)` modulo its lineality is simplicial.
    pub fn is_simplicial(&self) -> bool {
        self.simplicial
    }

    /// Rank of `P^gp`.
    pub fn group_rank(&self) -> usize {
        self.cone.dim()
    }

    /// Basis of `P^gp = span(C) ∩ Z^d`.
    pub fn group_basis(&self) -> Vec<IntVector> {
        saturate(&self.cone.generators(), self.lattice_rank)
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.cone.contains_int(x).unwrap_or(false)
    }
}

/// `σ^∨ ∩ M` for a strictly convex simplicial cone `σ ⊂ N_Q`.
pub fn monoid_from_cone(sigma: &RationalCone) -> Result<AffineMonoid, MonoidError> {
    if !sigma.is_simplicial() {
        return Err(MonoidError::NotSimplicial);
    }
    AffineMonoid::from_cone(sigma.dual_cone())
}

/// Hilbert basis of `c ∩ Z^d` for a strictly convex simplicial cone `c`.
///
/// Inside the saturated span of the rays, the lattice points of the
/// half-open fundamental parallelepiped are enumerated as coset
/// representatives of the ray lattice (read off a Smith form); together with
/// the rays they generate the monoid, and the irreducible ones are kept.
pub fn hilbert_basis(c: &RationalCone) -> Result<Vec<IntVector>, MonoidError> {
    if !c.is_simplicial() {
        return Err(MonoidError::NotSimplicial);
    }
    Ok(simplicial_hilbert_basis(c.rays(), c.ambient_rank()))
}

fn simplicial_hilbert_basis(rays: &[IntVector], d: usize) -> Vec<IntVector> {
    let k = rays.len();
    if k == 0 {
        return Vec::new();
    }
    let sat = saturate(rays, d);
    // rays in coordinates of the saturated lattice
    let coords: Vec<IntVector> = rays
        .iter()
        .map(|r| {
            solve_in_int_basis(&sat, r)
                .and_then(|c| c.to_integral())
                .expect("ray in saturation")
        })
        .collect();
    let ray_matrix = IntegerMatrix::from_rows(&coords, k);
    let snf = smith_normal_form(&ray_matrix);
    let diag = snf.diagonal();

    // λ-coordinates scaled by the determinant stay integral: x ↦ x · det R⁻¹
    let det = ray_matrix.determinant().abs();
    let inverse = crate::linalg::rational_inverse(
        &coords
            .iter()
            .map(IntVector::to_rational)
            .collect::<Vec<_>>(),
    )
    .expect("full rank");
    let scaled_inverse = IntegerMatrix::from_rows(
        &inverse
            .iter()
            .map(|row| {
                RationalVector(
                    row.0
                        .iter()
                        .map(|q| q * BigRational::from_integer(det.clone()))
                        .collect(),
                )
                .to_integral()
                .expect("det R⁻¹ is integral")
            })
            .collect::<Vec<_>>(),
        k,
    );

    // (scaled λ, point in sat-coordinates)
    let mut candidates: Vec<(IntVector, IntVector)> = Vec::new();
    for (i, r) in coords.iter().enumerate() {
        candidates.push((IntVector::unit(k, i).scale(&det), r.clone()));
    }
    for t in box_points(&diag) {
        let x = IntegerMatrix::from_rows(&[t], k).mul(&snf.v_inv);
        let lam = x.mul(&scaled_inverse).row(0);
        let frac = IntVector(lam.0.iter().map(|l| l.mod_floor(&det)).collect());
        if frac.is_zero() {
            continue;
        }
        let point = frac
            .0
            .iter()
            .zip(&coords)
            .fold(IntVector::zeros(k), |acc, (l, r)| acc.add(&r.scale(l)));
        let point = IntVector(point.0.iter().map(|x| x / &det).collect());
        candidates.push((frac, point));
    }
    candidates.sort();
    candidates.dedup();

    let keep = irreducible_mask(
        &candidates
            .iter()
            .map(|(l, _)| l.clone())
            .collect::<Vec<_>>(),
    );
    let mut out: Vec<IntVector> = candidates
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|((_, p), _)| {
            p.0.iter()
                .zip(&sat)
                .fold(IntVector::zeros(d), |acc, (c, b)| acc.add(&b.scale(c)))
        })
        .collect();
    out.sort();
    out
}

/// `keep[i]` iff no other vector is componentwise below `lambdas[i]`. Works
/// on machine integers when the entries fit.
fn irreducible_mask(lambdas: &[IntVector]) -> Vec<bool> {
    let small: Option<Vec<Vec<i64>>> = lambdas.iter().map(|l| l.to_i64s()).collect();
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    match small {
        Some(ls) => {
            let sums: Vec<i128> = ls
                .iter()
                .map(|l| l.iter().map(|&x| x as i128).sum())
                .collect();
            order.sort_by_key(|&i| sums[i]);
            let mut keep = vec![true; ls.len()];
            for (pos, &i) in order.iter().enumerate() {
                // only vectors of strictly smaller sum can lie below
                keep[i] = !order[..pos]
                    .iter()
                    .any(|&j| sums[j] < sums[i] && ls[i].iter().zip(&ls[j]).all(|(a, b)| a >= b));
            }
            keep
        }
        None => (0..lambdas.len())
            .map(|i| {
                !lambdas.iter().enumerate().any(|(j, lc)| {
                    j != i
                        && *lc != lambdas[i]
                        && lambdas[i].0.iter().zip(&lc.0).all(|(a, b)| a >= b)
                })
            })
            .collect(),
    }
}

/// All `t` with `0 <= t_i < d_i` (zero diagonal entries cannot occur for a
/// full-rank matrix).
fn box_points(diag: &[BigInt]) -> Vec<IntVector> {
    let mut out = vec![IntVector(Vec::new())];
    for d in diag {
        let n = d.to_u64().expect("box size fits in u64");
        let mut next = Vec::with_capacity(out.len() * n as usize);
        for p in &out {
            for t in 0..n {
                let mut q = p.clone();
                q.0.push(BigInt::from(t));
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Hilbert basis of a strictly convex cone of any shape: union of the Hilbert
/// bases of a triangulation by rays, filtered to irreducibles of the whole
/// cone.
fn pointed_hilbert_basis(c: &RationalCone) -> Result<Vec<IntVector>, MonoidError> {
    if c.is_simplicial() {
        return Ok(simplicial_hilbert_basis(c.rays(), c.ambient_rank()));
    }
    let d = c.ambient_rank();
    let mut candidates: Vec<IntVector> = Vec::new();
    for simplex in triangulate(c)? {
        candidates.extend(simplicial_hilbert_basis(&simplex, d));
    }
    candidates.sort();
    candidates.dedup();
    let mut out = Vec::new();
    for h in &candidates {
        let mut reducible = false;
        for g in &candidates {
            if g != h && c.contains_int(&h.sub(g))? {
                reducible = true;
                break;
            }
        }
        if !reducible {
            out.push(h.clone());
        }
    }
    Ok(out)
}

/// Pulling triangulation using only the rays of `c`.
fn triangulate(c: &RationalCone) -> Result<Vec<Vec<IntVector>>, MonoidError> {
    if c.is_simplicial() {
        return Ok(vec![c.rays().to_vec()]);
    }
    let apex = &c.rays()[0];
    let mut out = Vec::new();
    for m in c.dual_rays() {
        if !m.dot(apex).is_zero() {
            let facet: Vec<IntVector> = c
                .rays()
                .iter()
                .filter(|r| r.dot(m).is_zero())
                .cloned()
                .collect();
            let facet_cone = RationalCone::new(c.ambient_rank(), &facet)?;
            for mut simplex in triangulate(&facet_cone)? {
                simplex.insert(0, apex.clone());
                out.push(simplex);
            }
        }
    }
    Ok(out)
}

/// Whether `C(P)` has exactly `rank P^gp` rays.
pub fn is_simplicially_toric(p: &AffineMonoid) -> Result<bool, MonoidError> {
    if !p.is_sharp() {
        return Err(MonoidError::NotSharp);
    }
    Ok(p.cone.rays().len() == p.group_rank())
}

/// An embedding `P ⊂ ⊕ N·g_i ⊂ P^gp ⊗ Q` with `g_i = v_i / (b_i n_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeResolution {
    source: AffineMonoid,
    rays: Vec<IntVector>,
    denominators: Vec<BigInt>,
    levels: Vec<u64>,
}

impl FreeResolution {
    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn rank(&self) -> usize {
        self.rays.len()
    }

    /// Primitive ray generators `v_i` of `C(P)`, lexicographic.
    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// `b_i`.
    pub fn denominators(&self) -> &[BigInt] {
        &self.denominators
    }

    /// `n_i` (all 1 for the minimal resolution).
    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn is_minimal(&self) -> bool {
        self.levels.iter().all(|&n| n == 1)
    }

    /// Generators `f_i = v_i / b_i` of the minimal resolution.
    pub fn generators(&self) -> Vec<RationalVector> {
        self.rays
            .iter()
            .zip(&self.denominators)
            .map(|(v, b)| {
                v.to_rational()
                    .scale(&BigRational::new(BigInt::one(), b.clone()))
            })
            .collect()
    }

    /// Generators `g_i = f_i / n_i` actually used by this resolution.
    pub fn realized_generators(&self) -> Vec<RationalVector> {
        self.rays
            .iter()
            .zip(self.scales())
            .map(|(v, s)| v.to_rational().scale(&BigRational::new(BigInt::one(), s)))
            .collect()
    }

    /// `b_i * n_i`.
    fn scales(&self) -> Vec<BigInt> {
        self.denominators
            .iter()
            .zip(&self.levels)
            .map(|(b, &n)| b * BigInt::from(n))
            .collect()
    }

    /// Coordinates of `x ∈ P^gp ⊗ Q` in the basis `g_i`.
    pub fn coordinates(&self, x: &RationalVector) -> Option<RationalVector> {
        let ray_coords = crate::linalg::solve_in_basis(
            &self
                .rays
                .iter()
                .map(IntVector::to_rational)
                .collect::<Vec<_>>(),
            x,
        )?;
        Some(RationalVector(
            ray_coords
                .0
                .iter()
                .zip(self.scales())
                .map(|(c, s)| c * BigRational::from_integer(s))
                .collect(),
        ))
    }

    /// `Σ a_i g_i`.
    pub fn element(&self, exponents: &[u64]) -> RationalVector {
        let d = self.source.lattice_rank;
        self.realized_generators()
            .iter()
            .zip(exponents)
            .fold(RationalVector::zeros(d), |acc, (g, &a)| {
                acc.add(&g.scale(&BigRational::from_integer(BigInt::from(a))))
            })
    }

    /// Same resolution with different levels.
    pub fn with_levels(&self, levels: &[u64]) -> Result<FreeResolution, MonoidError> {
        assert_eq!(levels.len(), self.rank());
        if let Some(i) = levels.iter().position(|&n| n == 0) {
            return Err(MonoidError::ZeroLevel(self.rays[i].clone()));
        }
        Ok(FreeResolution {
            levels: levels.to_vec(),
            ..self.clone()
        })
    }

    /// Checks `P ⊆ ⊕ N g_i` on the Hilbert basis.
    pub fn contains_source(&self) -> bool {
        self.source.hilbert_basis.iter().all(|h| {
            self.coordinates(&h.to_rational())
                .is_some_and(|c| c.is_integral() && c.0.iter().all(|x| !x.is_negative()))
        })
    }
}

/// The canonical construction of the minimal free resolution.
pub fn minimal_free_resolution(p: &AffineMonoid) -> Result<FreeResolution, MonoidError> {
    if !p.is_sharp() {
        return Err(MonoidError::NotSharp);
    }
    if !is_simplicially_toric(p)? {
        return Err(MonoidError::NotSimplicial);
    }
    let rays = p.cone.rays().to_vec();
    let d = rays.len();
    let group = p.group_basis();
    let coords: Vec<RationalVector> = group
        .iter()
        .map(|e| solve_in_int_basis(&rays, e).expect("P^gp lies in the span of C(P)"))
        .collect();
    let mut denominators = Vec::with_capacity(d);
    for i in 0..d {
        let column: Vec<BigRational> = coords.iter().map(|c| c.0[i].clone()).collect();
        let gen = rational_subgroup_generator(&column);
        // v_i ∈ P^gp has i-th coordinate 1, so the generator is 1/b_i
        assert!(
            gen.numer().is_one(),
            "q_i(P^gp) must be (1/b_i)Z, got {gen}"
        );
        denominators.push(gen.denom().clone());
    }
    let res = FreeResolution {
        source: p.clone(),
        rays,
        denominators,
        levels: vec![1; d],
    };
    debug_assert!(res.contains_source());
    Ok(res)
}

/// The admissible resolution of type `levels` (keyed by rays of `C(P)`;
/// rays not mentioned get level 1).
pub fn admissible_resolution(
    p: &AffineMonoid,
    levels: &BTreeMap<IntVector, u64>,
) -> Result<FreeResolution, MonoidError> {
    let minimal = minimal_free_resolution(p)?;
    for (ray, &n) in levels {
        if !minimal.rays.contains(ray) {
            return Err(MonoidError::UnknownRay(ray.clone()));
        }
        if n == 0 {
            return Err(MonoidError::ZeroLevel(ray.clone()));
        }
    }
    let lv: Vec<u64> = minimal
        .rays
        .iter()
        .map(|r| levels.get(r).copied().unwrap_or(1))
        .collect();
    minimal.with_levels(&lv)
}

/// Matrix whose columns are a basis of `P^gp` in `g`-coordinates.
fn inclusion_matrix(res: &FreeResolution) -> Result<IntegerMatrix, MonoidError> {
    let cols: Vec<IntVector> = res
        .source
        .group_basis()
        .iter()
        .map(|e| {
            res.coordinates(&e.to_rational())
                .and_then(|c| c.to_integral())
        })
        .collect::<Option<_>>()
        .ok_or(MonoidError::NonIntegralResolution)?;
    Ok(IntegerMatrix::from_columns(&cols, res.rank()))
}

/// `F^gp / ι(P^gp)`.
pub fn resolution_cokernel(res: &FreeResolution) -> Result<FiniteAbelianGroup, MonoidError> {
    Ok(cokernel_invariants(&inclusion_matrix(res)?))
}

/// `F^gp / ι(P^gp)` together with the images of the generators `e_i` of `F`
/// in invariant-factor coordinates (residues in `[0, d_i)`).
pub fn resolution_cokernel_with_weights(
    res: &FreeResolution,
) -> Result<(FiniteAbelianGroup, Vec<IntVector>), MonoidError> {
    let (group, projection) = cokernel_with_projection(&inclusion_matrix(res)?);
    let weights = (0..res.rank())
        .map(|i| {
            crate::linalg::project_to_cokernel(&group, &projection, &IntVector::unit(res.rank(), i))
        })
        .collect();
    Ok((group, weights))
}

/// A height-one prime of `P`, i.e. `{p ∈ P : <normal, p> > 0}`; it is the
/// complement of the facet of `C(P)` spanned by `complement_face`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightOnePrime {
    pub complement_face: Vec<IntVector>,
    pub normal: IntVector,
}

impl HeightOnePrime {
    pub fn contains(&self, p: &IntVector) -> bool {
        self.normal.dot(p).is_positive()
    }
}

/// One row of the generator ↔ ray ↔ prime correspondence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayCorrespondence {
    pub index: usize,
    pub generator: RationalVector,
    pub ray: IntVector,
    pub prime: HeightOnePrime,
}

pub fn irreducible_ray_correspondence(res: &FreeResolution) -> Vec<RayCorrespondence> {
    let gens = res.realized_generators();
    let dual = res.source.cone.dual_rays();
    res.rays
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let others: Vec<IntVector> = res
                .rays
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| r.clone())
                .collect();
            let normal = dual
                .iter()
                .find(|m| m.dot(v).is_positive() && others.iter().all(|r| m.dot(r).is_zero()))
                .cloned()
                .expect("simplicial cone has a facet normal for every ray");
            RayCorrespondence {
                index: i,
                generator: gens[i].clone(),
                ray: v.clone(),
                prime: HeightOnePrime {
                    complement_face: others,
                    normal,
                },
            }
        })
        .collect()
}

/// Positive linear functional on `C(P) \ {0}` for a sharp monoid.
fn grading(p: &AffineMonoid) -> IntVector {
    p.cone
        .dual_rays()
        .iter()
        .fold(IntVector::zeros(p.lattice_rank), |acc, m| acc.add(m))
}

/// Membership of `x` in the submonoid generated by `gens`, by exhaustive
/// search ordered by a positive grading.
struct SubmonoidOracle<'a> {
    gens: &'a [IntVector],
    grading: IntVector,
    memo: HashMap<IntVector, bool>,
}

impl<'a> SubmonoidOracle<'a> {
    fn new(gens: &'a [IntVector], grading: IntVector) -> Self {
        SubmonoidOracle {
            gens,
            grading,
            memo: HashMap::new(),
        }
    }

    fn contains(&mut self, x: &IntVector) -> bool {
        if x.is_zero() {
            return true;
        }
        if !self.grading.dot(x).is_positive() {
            return false;
        }
        if let Some(&b) = self.memo.get(x) {
            return b;
        }
        let mut found = false;
        for g in self.gens {
            if g.is_zero() {
                continue;
            }
            let rest = x.sub(g);
            if self.contains(&rest) {
                found = true;
                break;
            }
        }
        self.memo.insert(x.clone(), found);
        found
    }
}

/// Whether `x` is a nonnegative integer combination of the Hilbert basis of a
/// sharp monoid.
pub fn generated_by_hilbert_basis(p: &AffineMonoid, x: &IntVector) -> bool {
    SubmonoidOracle::new(&p.hilbert_basis, grading(p)).contains(x)
}

/// `P / Q ≅ P^gp / Q^gp` for a saturated submonoid `Q` close to `P`.
///
/// Closeness is witnessed for every Hilbert basis element `h` by a multiple
/// `n h` with nonnegative integer coordinates in an independent subset of the
/// generators; a witness larger than `bound` (default unbounded) is an error.
/// Saturation is checked by testing that the Hilbert basis of `C(P) ∩ Q^gp`
/// lies in `Q`.
pub fn quotient_group(
    p: &AffineMonoid,
    q_generators: &[IntVector],
    bound: Option<u64>,
) -> Result<FiniteAbelianGroup, MonoidError> {
    if !p.is_sharp() {
        return Err(MonoidError::NotSharp);
    }
    let d = p.lattice_rank;
    for q in q_generators {
        if q.len() != d {
            return Err(ConeError::RankMismatch {
                expected: d,
                found: q.len(),
            }
            .into());
        }
        if !p.contains(q) {
            return Err(MonoidError::NotInMonoid(q.clone()));
        }
    }
    let p_basis = p.group_basis();
    let q_coords: Vec<IntVector> = q_generators
        .iter()
        .map(|q| {
            solve_in_int_basis(&p_basis, q)
                .and_then(|c| c.to_integral())
                .expect("Q ⊂ P^gp")
        })
        .collect();
    let quotient = cokernel_invariants(&IntegerMatrix::from_columns(&q_coords, p_basis.len()));
    let bound = bound.unwrap_or(u64::MAX);
    let rank = int_rank(q_generators, d);
    let bases: Vec<Vec<IntVector>> = index_subsets(q_generators.len(), rank)
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|i| q_generators[i].clone())
                .collect::<Vec<_>>()
        })
        .filter(|b| int_rank(b, d) == rank)
        .collect();
    for h in &p.hilbert_basis {
        // smallest multiple of h that is a nonnegative integer combination of
        // some independent subset of the generators
        let witness = bases
            .iter()
            .filter_map(|b| solve_in_int_basis(b, h))
            .filter(|c| c.0.iter().all(|x| !x.is_negative()))
            .map(|c| c.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
            .min();
        match witness.and_then(|n| n.to_u64()) {
            Some(n) if n <= bound => {}
            _ => {
                return Err(MonoidError::NotClose {
                    element: h.clone(),
                    bound,
                })
            }
        }
    }
    let mut oracle = SubmonoidOracle::new(q_generators, grading(p));

    // Saturation: Hilbert basis of C(P) ∩ Q^gp, computed in a basis of Q^gp.
    let q_basis = hnf_basis(q_generators, d);
    let k = q_basis.len();
    let ray_coords: Vec<IntVector> = p
        .cone
        .rays()
        .iter()
        .map(|r| {
            solve_in_int_basis(&q_basis, r)
                .expect("Q^gp ⊗ Q = P^gp ⊗ Q")
                .primitive_direction()
        })
        .collect();
    let cone_in_q = RationalCone::new(k, &ray_coords)?;
    for h in pointed_hilbert_basis(&cone_in_q)? {
        let x =
            h.0.iter()
                .zip(&q_basis)
                .fold(IntVector::zeros(d), |acc, (c, b)| acc.add(&b.scale(c)));
        if !oracle.contains(&x) {
            return Err(MonoidError::NotSaturated(x));
        }
    }
    Ok(quotient)
}

/// Result of projecting a minimal resolution onto a subset of coordinates.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub subset: Vec<usize>,
    /// Basis of `Q^gp ⊂ Z^r` (F-coordinates), rows.
    pub lattice_basis: Vec<IntVector>,
    /// `Q` written in coordinates of `lattice_basis`.
    pub monoid: AffineMonoid,
    /// Minimal free resolution of `Q`, recomputed from scratch.
    pub resolution: FreeResolution,
    /// The unit vectors of `N^r`, written in coordinates of `lattice_basis`.
    pub projected_generators: Vec<RationalVector>,
}

/// `Q = π(P)` for the projection `π : F → N^r` onto `subset`, checked to be
/// toric with minimal resolution `Q ⊂ N^r`.
pub fn restrict_resolution(
    p: &AffineMonoid,
    res: &FreeResolution,
    subset: &[usize],
) -> Result<Restriction, MonoidError> {
    if !res.is_minimal() {
        return Err(MonoidError::NotMinimal);
    }
    let d = res.rank();
    if subset.is_empty()
        || subset.windows(2).any(|w| w[0] >= w[1])
        || subset.iter().any(|&i| i >= d)
    {
        return Err(MonoidError::InvalidSubset(d));
    }
    let r = subset.len();
    let f_coords = |x: &IntVector| -> IntVector {
        res.coordinates(&x.to_rational())
            .and_then(|c| c.to_integral())
            .expect("P ⊂ F")
    };
    let images: Vec<IntVector> = p
        .hilbert_basis
        .iter()
        .map(|h| {
            let c = f_coords(h);
            IntVector(subset.iter().map(|&i| c.0[i].clone()).collect())
        })
        .collect();
    let lattice_basis = hnf_basis(&images, r);
    if lattice_basis.len() != r {
        return Err(MonoidError::ProjectionMismatch(format!(
            "image has rank {} < {r}",
            lattice_basis.len()
        )));
    }
    let projected_generators: Vec<RationalVector> = (0..r)
        .map(|i| solve_in_int_basis(&lattice_basis, &IntVector::unit(r, i)).expect("full rank"))
        .collect();
    let cone = RationalCone::from_rational_generators(r, &projected_generators)?;
    let monoid = AffineMonoid::from_cone(cone)?;

    // Every irreducible element of C(Q) ∩ Q^gp must come from P.
    let p_gp_in_f: Vec<IntVector> = p.group_basis().iter().map(f_coords).collect();
    for h in monoid.hilbert_basis() {
        let y =
            h.0.iter()
                .zip(&lattice_basis)
                .fold(IntVector::zeros(r), |acc, (c, b)| acc.add(&b.scale(c)));
        if !lifts_to_source(&y, subset, &p_gp_in_f, res) {
            return Err(MonoidError::ProjectionMismatch(format!(
                "{y} is not the image of an element of P"
            )));
        }
    }

    let resolution = minimal_free_resolution(&monoid)?;
    let mut recomputed = resolution.generators();
    recomputed.sort_by(crate::linalg::cmp_rational);
    let mut projected = projected_generators.clone();
    projected.sort_by(crate::linalg::cmp_rational);
    if recomputed != projected {
        return Err(MonoidError::ProjectionMismatch(format!(
            "recomputed generators {recomputed:?} vs projected {projected:?}"
        )));
    }
    Ok(Restriction {
        subset: subset.to_vec(),
        lattice_basis,
        monoid,
        resolution,
        projected_generators,
    })
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut with_last = index_subsets(n - 1, k - 1);
    for s in &mut with_last {
        s.push(n - 1);
    }
    let mut out = index_subsets(n - 1, k);
    out.extend(with_last);
    out
}

/// Whether `y ∈ N^r` has a preimage in `P` under the projection: some
/// `z ∈ N^(d-r)` with `(y, z)` in the image of `P^gp` in `F^gp = Z^d`. The
/// lattice condition is periodic in `z_j` with period `b_j`.
fn lifts_to_source(
    y: &IntVector,
    subset: &[usize],
    p_gp_in_f: &[IntVector],
    res: &FreeResolution,
) -> bool {
    let d = res.rank();
    let rest: Vec<usize> = (0..d).filter(|i| !subset.contains(i)).collect();
    let periods: Vec<BigInt> = rest.iter().map(|&i| res.denominators[i].clone()).collect();
    let lattice = hnf_basis(p_gp_in_f, d);
    for z in box_points(&periods) {
        let mut full = IntVector::zeros(d);
        for (k, &i) in subset.iter().enumerate() {
            full.0[i] = y.0[k].clone();
        }
        for (k, &i) in rest.iter().enumerate() {
            full.0[i] = z.0[k].clone();
        }
        if solve_in_int_basis(&lattice, &full).is_some_and(|c| c.is_integral()) {
            return true;
        }
    }
    false
}

/// All exponent vectors in `N^d` with coordinate sum at most `bound`.
pub fn exponent_vectors(d: usize, bound: u64) -> Vec<Vec<u64>> {
    fn rec(d: usize, left: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(d, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, bound, &mut Vec::new(), &mut out);
    out
}

/// Brute-force check of `P^gp ∩ F = P` on elements of `F` of total degree
/// at most `degree_bound`. Membership in `P` is decided through the Hilbert
/// basis, independently of the cone description.
pub fn saturation_intersection_check(res: &FreeResolution, degree_bound: u64) -> bool {
    let p = &res.source;
    let mut oracle = SubmonoidOracle::new(&p.hilbert_basis, grading(p));
    exponent_vectors(res.rank(), degree_bound)
        .iter()
        .all(|a| match res.element(a).to_integral() {
            Some(x) => oracle.contains(&x),
            None => true,
        })
}

/// Rank of the span of the given vectors; re-exported for callers that need
/// it alongside the monoid API.
pub fn span_rank(vectors: &[IntVector], d: usize) -> usize {
    int_rank(vectors, d)
}
