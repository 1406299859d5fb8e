//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers ([`BigInt`]) and
//! rationals ([`BigRational`]). The normal forms ([`hermite_normal_form`],
//! [`smith_normal_form`]) are the workhorses for lattice indices,
//! saturations and the structure of finite cokernels.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A vector of integers, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

/// A vector of rationals. `BigRational` keeps every coordinate reduced with
/// a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector(pub Vec<BigRational>);

impl IntVector {
    pub fn zeros(len: usize) -> Self {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64s(xs: &[i64]) -> Self {
        IntVector(xs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// The first lattice point on the ray through `self`.
    pub fn primitive(&self) -> IntVector {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        IntVector(self.0.iter().map(|x| x / &g).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(
            self.0
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    }

    /// Coordinates as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|x| x.to_i64()).collect()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl RationalVector {
    pub fn zeros(len: usize) -> Self {
        RationalVector(vec![BigRational::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> BigRational {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_int(&self, other: &IntVector) -> BigRational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * BigRational::from_integer(b.clone()))
            .sum()
    }

    pub fn scale(&self, k: &BigRational) -> RationalVector {
        RationalVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn to_integral(&self) -> Option<IntVector> {
        self.is_integral()
            .then(|| IntVector(self.0.iter().map(|x| x.to_integer()).collect()))
    }

    /// The primitive integer vector pointing in the same direction.
    pub fn primitive_direction(&self) -> IntVector {
        let lcm = self.0.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let scaled = IntVector(
            self.0
                .iter()
                .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
                .collect(),
        );
        scaled.primitive()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors. `cols` is needed for
    /// the empty case.
    pub fn from_rows(rows: &[IntVector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, x) in r.0.iter().enumerate() {
                m.data[i * cols + j] = x.clone();
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector], rows: usize) -> Self {
        Self::from_rows(cols, rows).transpose()
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        Self::from_rows(&vs, cols)
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.len());
        IntVector((0..self.rows).map(|i| self.row(i).dot(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).0).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<RationalVector> = self
            .row_vectors()
            .iter()
            .map(IntVector::to_rational)
            .collect();
        rational_rank(&rows, self.cols)
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    /// Inverse of a unimodular matrix, `None` otherwise.
    pub fn unimodular_inverse(&self) -> Option<IntegerMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let rows: Vec<RationalVector> = self
            .row_vectors()
            .iter()
            .map(IntVector::to_rational)
            .collect();
        let inv = rational_inverse(&rows)?;
        let ints: Option<Vec<IntVector>> = inv.iter().map(RationalVector::to_integral).collect();
        Some(IntegerMatrix::from_rows(&ints?, self.cols))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(source, j) * k;
            self.data[target * self.cols + j] += v;
        }
    }

    /// col[target] += k * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, source) * k;
            self.data[i * self.cols + target] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * A = H`. Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and zero rows sit at the bottom.
pub fn hermite_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(a.rows);
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..a.cols {
        if pivot_row == a.rows {
            break;
        }
        loop {
            // smallest nonzero entry at or below pivot_row
            let best = (pivot_row..a.rows)
                .filter(|&i| !h.get(i, col).is_zero())
                .min_by(|&x, &y| h.get(x, col).abs().cmp(&h.get(y, col).abs()));
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..a.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = h.get(i, col).div_floor(h.get(pivot_row, col));
                let k = -q;
                h.add_row_multiple(i, pivot_row, &k);
                u.add_row_multiple(i, pivot_row, &k);
                if !h.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(pivot_row, col).is_zero() {
            continue;
        }
        if h.get(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    // reduce entries above pivots
    for &(r, c) in &pivots {
        let p = h.get(r, c).clone();
        for i in 0..r {
            let q = h.get(i, c).div_floor(&p);
            if !q.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                u.add_row_multiple(i, r, &k);
            }
        }
    }
    (h, u)
}

/// Result of [`smith_normal_form`]: `u * a * v = s`.
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntegerMatrix,
}

impl SmithNormalForm {
    /// The diagonal entries `d_1 | d_2 | ...` (including trailing zeros up to
    /// `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by elementary row and column operations, always
/// pivoting on the smallest nonzero entry of the remaining block.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithNormalForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    let mut v_inv = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_snf(s, u, v, v_inv);
            };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            v_inv.swap_rows(t, bj);

            let mut clean = true;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let k = -s.get(i, t).div_floor(s.get(t, t));
                s.add_row_multiple(i, t, &k);
                u.add_row_multiple(i, t, &k);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let k = -s.get(t, j).div_floor(s.get(t, t));
                s.add_col_multiple(j, t, &k);
                v.add_col_multiple(j, t, &k);
                // V_inv gets the inverse operation on rows: row[t] -= k * row[j]
                v_inv.add_row_multiple(t, j, &-&k);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(s.get(t, t)));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_snf(s, u, v, v_inv)
}

fn finish_snf(
    s: IntegerMatrix,
    u: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
) -> SmithNormalForm {
    SmithNormalForm { s, u, v, v_inv }
}

/// A finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`
/// with `d_1 | d_2 | ... | d_k` and every `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    /// Canonical form of `Z/a_1 ⊕ ... ⊕ Z/a_k ⊕ Z^free_rank` for arbitrary
    /// positive `a_i`.
    pub fn from_cyclic_orders(orders: &[BigInt], free_rank: usize) -> Self {
        let snf = smith_normal_form(&IntegerMatrix::diagonal(orders));
        let mut g = group_from_diagonal(&snf.diagonal(), orders.len());
        g.free_rank += free_rank;
        g
    }

    /// `None` if the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Exponent of the torsion part.
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigInt::one)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn group_from_diagonal(diag: &[BigInt], rows: usize) -> FiniteAbelianGroup {
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    FiniteAbelianGroup {
        invariant_factors: diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect(),
        free_rank: rows - rank,
    }
}

/// Structure of `Z^rows / column-span(A)`.
pub fn cokernel_invariants(a: &IntegerMatrix) -> FiniteAbelianGroup {
    let snf = smith_normal_form(a);
    group_from_diagonal(&snf.diagonal(), a.rows)
}

/// The cokernel of `A` together with the quotient map: `projection * x`
/// gives the class of `x ∈ Z^rows` in invariant-factor coordinates (torsion
/// coordinates first, each reduced into `[0, d_i)`, then the free ones).
pub fn cokernel_with_projection(a: &IntegerMatrix) -> (FiniteAbelianGroup, IntegerMatrix) {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let group = group_from_diagonal(&diag, a.rows);
    let mut rows = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if !d.is_zero() && !d.is_one() {
            rows.push(snf.u.row(i));
        }
    }
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    for i in rank..a.rows {
        rows.push(snf.u.row(i));
    }
    let projection = IntegerMatrix::from_rows(&rows, a.rows);
    (group, projection)
}

/// Applies a cokernel projection and reduces the torsion coordinates.
pub fn project_to_cokernel(
    group: &FiniteAbelianGroup,
    projection: &IntegerMatrix,
    x: &IntVector,
) -> IntVector {
    let mut y = projection.mul_vec(x);
    for (c, d) in y.0.iter_mut().zip(&group.invariant_factors) {
        *c = c.mod_floor(d);
    }
    y
}

/// Index of the lattice spanned by `generators` inside its saturation in
/// `Z^ambient_rank`.
pub fn lattice_index(generators: &[IntVector], ambient_rank: usize) -> BigInt {
    let snf = smith_normal_form(&IntegerMatrix::from_rows(generators, ambient_rank));
    snf.diagonal()
        .into_iter()
        .filter(|d| !d.is_zero())
        .product()
}

/// Index of the span of `generators` in the whole of `Z^ambient_rank`;
/// `None` stands for an infinite index (span not of full rank).
pub fn index_in_ambient(generators: &[IntVector], ambient_rank: usize) -> Option<BigInt> {
    let snf = smith_normal_form(&IntegerMatrix::from_rows(generators, ambient_rank));
    (snf.rank() == ambient_rank).then(|| lattice_index(generators, ambient_rank))
}

/// A basis (in Hermite normal form) of the saturation
/// `{v ∈ Z^d : n v ∈ span(generators) for some n >= 1}`.
pub fn saturate(generators: &[IntVector], ambient_rank: usize) -> Vec<IntVector> {
    let snf = smith_normal_form(&IntegerMatrix::from_rows(generators, ambient_rank));
    let rank = snf.rank();
    // A = U^-1 S V^-1, so the first `rank` rows of V^-1 span the saturation.
    let basis: Vec<IntVector> = (0..rank).map(|i| snf.v_inv.row(i)).collect();
    hnf_basis(&basis, ambient_rank)
}

/// Nonzero rows of the Hermite normal form of the given rows.
pub fn hnf_basis(rows: &[IntVector], ambient_rank: usize) -> Vec<IntVector> {
    let (h, _) = hermite_normal_form(&IntegerMatrix::from_rows(rows, ambient_rank));
    h.row_vectors()
        .into_iter()
        .filter(|r| !r.is_zero())
        .collect()
}

/// Splits `Z^d = L ⊕ C` where `L` is the saturation of the span of
/// `generators`. Returns `(basis of L, basis of C)`; together they form a
/// unimodular matrix. `L` is in Hermite normal form; when all of its pivots
/// are 1 the complement consists of the standard vectors at non-pivot
/// positions.
pub fn split_lattice(
    generators: &[IntVector],
    ambient_rank: usize,
) -> (Vec<IntVector>, Vec<IntVector>) {
    let sat = saturate(generators, ambient_rank);
    let pivots: Vec<usize> = sat
        .iter()
        .map(|r| {
            r.0.iter()
                .position(|x| !x.is_zero())
                .expect("nonzero HNF row")
        })
        .collect();
    let complement = if sat.iter().zip(&pivots).all(|(r, &p)| r.0[p].is_one()) {
        (0..ambient_rank)
            .filter(|j| !pivots.contains(j))
            .map(|j| IntVector::unit(ambient_rank, j))
            .collect()
    } else {
        let snf = smith_normal_form(&IntegerMatrix::from_rows(&sat, ambient_rank));
        (sat.len()..ambient_rank)
            .map(|i| snf.v_inv.row(i))
            .collect()
    };
    (sat, complement)
}

// ---------------------------------------------------------------------------
// rational elimination helpers

/// Reduced row echelon form in place; returns pivot columns.
pub(crate) fn rref(rows: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let v = &f * &rows[r][j];
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rational_rank(rows: &[RationalVector], cols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.0.clone()).collect();
    rref(&mut m, cols).len()
}

pub fn int_rank(rows: &[IntVector], cols: usize) -> usize {
    let rs: Vec<RationalVector> = rows.iter().map(IntVector::to_rational).collect();
    rational_rank(&rs, cols)
}

/// Coefficients `c` with `sum c_i basis_i = target`, or `None` when the
/// target is outside the span. The basis must be linearly independent.
pub fn solve_in_basis(basis: &[RationalVector], target: &RationalVector) -> Option<RationalVector> {
    let k = basis.len();
    let d = target.len();
    // columns are basis vectors: d equations in k unknowns, augmented
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b.0[i].clone()).collect();
            row.push(target.0[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    assert_eq!(pivots.len(), k, "basis is not linearly independent");
    let mut sol = RationalVector::zeros(k);
    for (row, &p) in pivots.iter().enumerate() {
        sol.0[p] = m[row][k].clone();
    }
    Some(sol)
}

pub fn solve_in_int_basis(basis: &[IntVector], target: &IntVector) -> Option<RationalVector> {
    let b: Vec<RationalVector> = basis.iter().map(IntVector::to_rational).collect();
    solve_in_basis(&b, &target.to_rational())
}

/// Inverse of a square rational matrix given by rows.
pub fn rational_inverse(rows: &[RationalVector]) -> Option<Vec<RationalVector>> {
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.0.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    let pivots = rref(&mut m, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(
        m.into_iter()
            .map(|r| RationalVector(r[n..].to_vec()))
            .collect(),
    )
}

/// Generator of the subgroup of Q generated by the given rationals (0 if all
/// are zero).
pub fn rational_subgroup_generator(xs: &[BigRational]) -> BigRational {
    let lcm = xs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let g = xs
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .fold(BigInt::zero(), |g, x| g.gcd(&x));
    BigRational::new(g, lcm)
}

/// Lexicographic comparison helper for sorting rational vectors.
pub fn cmp_rational(a: &RationalVector, b: &RationalVector) -> Ordering {
    a.0.cmp(&b.0)
}
