//! Shared generators and brute-force oracles for the integration tests.
//!
//! The oracles work on small `i64`/`i128` data and use none of the library's
//! algorithms, so agreement with the library is meaningful.
#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toristack::stackyfan::{validate_fan, Fan, StackyFan};
use toristack::IntVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iv(xs: &[i64]) -> IntVector {
    IntVector::from_i64s(xs)
}

pub fn ivs(xs: &[Vec<i64>]) -> Vec<IntVector> {
    xs.iter().map(|x| iv(x)).collect()
}

pub fn to_i64s(v: &IntVector) -> Vec<i64> {
    v.to_i64s().expect("small test values")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    v.iter().map(|x| x / g).collect()
}

/// Determinant by cofactor expansion.
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0] as i128,
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] as i128 * det(&minor)
            })
            .sum(),
    }
}

/// `adj(V)` with `V · adj(V) = det(V) · I`; column `i` of the adjugate is
/// orthogonal to every row of `V` but row `i`.
pub fn adjugate_columns(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rows.len();
    if n == 1 {
        return vec![vec![1]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // entry (j, i) of adj = cofactor (i, j)
                    let minor: Vec<Vec<i64>> = rows
                        .iter()
                        .enumerate()
                        .filter(|&(r, _)| r != i)
                        .map(|(_, row)| {
                            row.iter()
                                .enumerate()
                                .filter(|&(c, _)| c != j)
                                .map(|(_, &x)| x)
                                .collect()
                        })
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    (sign * det(&minor)) as i64
                })
                .collect()
        })
        .collect()
}

/// Primitive rays of the dual of the simplicial full-dimensional cone with
/// the given generators, sorted.
pub fn dual_rays_oracle(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let s = det(gens).signum() as i64;
    let mut out: Vec<Vec<i64>> = adjugate_columns(gens)
        .iter()
        .map(|c| primitive(&c.iter().map(|x| x * s).collect::<Vec<_>>()))
        .collect();
    out.sort();
    out
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize, range: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-range..=range)).collect();
        if v.iter().any(|&x| x != 0) {
            return primitive(&v);
        }
    }
}

/// `d` primitive vectors with nonzero determinant.
pub fn random_simplicial_cone(rng: &mut ChaCha8Rng, d: usize, range: i64) -> Vec<Vec<i64>> {
    loop {
        let gens: Vec<Vec<i64>> = (0..d).map(|_| random_vector(rng, d, range)).collect();
        if det(&gens) != 0 {
            return gens;
        }
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hilbert basis of `{x ∈ Z^d : <a, x> >= 0 for all a in normals}` (pointed,
/// full-dimensional), given its rays: enumerate the lattice points of the box
/// spanned by the zonotope of the rays, then keep the irreducible ones in
/// order of a positive grading.
pub fn hilbert_basis_oracle(normals: &[Vec<i64>], rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = rays[0].len();
    let lo: Vec<i64> = (0..d)
        .map(|k| rays.iter().map(|r| r[k].min(0)).sum())
        .collect();
    let hi: Vec<i64> = (0..d)
        .map(|k| rays.iter().map(|r| r[k].max(0)).sum())
        .collect();
    let grading: Vec<i64> = (0..d).map(|k| normals.iter().map(|a| a[k]).sum()).collect();
    let bound: i64 = rays.iter().map(|r| dot(r, &grading)).sum();
    let inside = |x: &[i64]| normals.iter().all(|a| dot(a, x) >= 0);
    let mut points = Vec::new();
    let mut x = lo.clone();
    'outer: loop {
        let deg = dot(&x, &grading);
        if deg > 0 && deg <= bound && inside(&x) {
            points.push((deg, x.clone()));
        }
        for k in 0..d {
            if x[k] < hi[k] {
                x[k] += 1;
                continue 'outer;
            }
            x[k] = lo[k];
        }
        break;
    }
    points.sort();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for (_, p) in points {
        let reducible = basis.iter().any(|h| {
            let rest: Vec<i64> = p.iter().zip(h).map(|(a, b)| a - b).collect();
            inside(&rest)
        });
        if !reducible {
            basis.push(p);
        }
    }
    basis.sort();
    basis
}

// ---------------------------------------------------------------------------
// exact rational elimination for oracles

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Solves `Σ λ_i cols_i = target` when the columns are independent; `None`
/// if dependent or inconsistent.
pub fn solve(cols: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let n = cols.len();
    let m = target.len();
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| cols.iter().map(|c| q(c[i])).chain([q(target[i])]).collect())
        .collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        let p = (row..m).find(|&i| !a[i][c].is_zero())?;
        a.swap(row, p);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != row && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if (row..m).any(|i| !a[i][n].is_zero()) {
        return None;
    }
    Some((0..n).map(|c| a[c][n].clone()).collect())
}

/// Conic membership by Carathéodory: `v` is in the cone iff it is a
/// nonnegative combination of some linearly independent subset.
pub fn in_cone_oracle(gens: &[Vec<i64>], v: &[i64]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    let k = gens.len();
    (1u32..1 << k).any(|mask| {
        let subset: Vec<Vec<i64>> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| gens[i].clone())
            .collect();
        subset.len() <= v.len()
            && solve(&subset, v).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
    })
}

// ---------------------------------------------------------------------------
// cokernels

/// Invariant factors (without 1s) via determinantal divisors: the product of
/// the first `i` factors is the gcd of the `i × i` minors.
pub fn determinantal_invariants(rows: &[Vec<i64>]) -> (Vec<i64>, usize) {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let mut divisors = vec![1i128];
    for k in 1..=m.min(n) {
        let mut g = 0i128;
        for rs in combinations(m, k) {
            for cs in combinations(n, k) {
                let minor: Vec<Vec<i64>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| rows[r][c]).collect())
                    .collect();
                g = gcd128(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let factors: Vec<i64> = (1..divisors.len())
        .map(|i| (divisors[i] / divisors[i - 1]) as i64)
        .filter(|&f| f != 1)
        .collect();
    (factors, m - rank)
}

fn gcd128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd128(b, a % b)
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// For a square nonsingular `A`, enumerates `Z^m / A Z^m` by breadth-first
/// search from 0 and returns, for every `k` up to the order, the number of
/// elements killed by `k`.
pub fn torsion_counts_by_enumeration(a: &[Vec<i64>]) -> Vec<usize> {
    let m = a.len();
    let cols: Vec<Vec<i64>> = (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect();
    let same = |x: &[i64], y: &[i64]| {
        let diff: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        solve(&cols, &diff).is_some_and(|l| l.iter().all(|c| c.is_integer()))
    };
    let mut reps: Vec<Vec<i64>> = vec![vec![0; m]];
    let mut frontier = reps.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for i in 0..m {
                let mut y = x.clone();
                y[i] += 1;
                if !reps.iter().any(|r| same(r, &y)) {
                    reps.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let order = reps.len();
    (1..=order)
        .map(|k| {
            reps.iter()
                .filter(|r| {
                    let kr: Vec<i64> = r.iter().map(|x| x * k as i64).collect();
                    same(&kr, &vec![0; m])
                })
                .count()
        })
        .collect()
}

/// Same counts computed from a list of cyclic orders.
pub fn torsion_counts_from_factors(factors: &[i64], order: usize) -> Vec<usize> {
    (1..=order)
        .map(|k| factors.iter().map(|&d| gcd(d, k as i64) as usize).product())
        .collect()
}

// ---------------------------------------------------------------------------
// fans

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

pub fn fan(d: usize, rays: &[Vec<i64>], cones: &[Vec<usize>]) -> Fan {
    validate_fan(d, &ivs(rays), cones).expect("valid test fan")
}

pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    rays.push(vec![-1; n]);
    let cones: Vec<Vec<usize>> = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    fan(n, &rays, &cones)
}

pub fn affine_space(n: usize) -> Fan {
    let rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    fan(n, &rays, &[(0..n).collect()])
}

pub fn hirzebruch(a: i64) -> Fan {
    fan(
        2,
        &[vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
}

/// A complete fan in the plane: random primitive vectors sorted by angle,
/// accepted when consecutive rays are less than a half-turn apart.
pub fn random_complete_plane_fan(rng: &mut ChaCha8Rng, range: i64) -> Fan {
    loop {
        let k = rng.gen_range(3..=6);
        let mut rays: Vec<Vec<i64>> = (0..k).map(|_| random_vector(rng, 2, range)).collect();
        rays.sort_by(|a, b| {
            (a[1] as f64)
                .atan2(a[0] as f64)
                .total_cmp(&(b[1] as f64).atan2(b[0] as f64))
        });
        rays.dedup();
        let n = rays.len();
        if n < 3 {
            continue;
        }
        let ok = (0..n).all(|i| {
            let (a, b) = (&rays[i], &rays[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0] > 0
        });
        if ok {
            let cones: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
            return fan(2, &rays, &cones);
        }
    }
}

/// A fan with one random simplicial maximal cone in dimension `d`.
pub fn random_cone_fan(rng: &mut ChaCha8Rng, d: usize, range: i64) -> Fan {
    let gens = random_simplicial_cone(rng, d, range);
    fan(d, &gens, &[(0..d).collect()])
}

pub fn random_levels(rng: &mut ChaCha8Rng, n: usize, max: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=max)).collect()
}

pub fn with_levels(f: &Fan, levels: Vec<u64>) -> StackyFan {
    StackyFan::new(f.clone(), levels).expect("positive levels")
}
