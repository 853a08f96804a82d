//! Dense linear algebra over the rationals.
//!
//! Everything here is exact: matrices hold [`Rational`] entries, elimination is
//! Gauss-Jordan without any tolerance, and subspaces are kept in reduced row
//! echelon form so that two subspaces are equal iff their basis matrices are.
//!
//! Tensor index convention: in a Kronecker product `a ⊗ b` the pair `(i, α)`
//! maps to the flat index `i * dim(b) + α`. Tensor positions compose left to
//! right, so slot 0 of `base^⊗n` is the most significant digit.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap on any ambient dimension the crate will allocate.
pub const DEFAULT_GUARD_DIM: usize = 20_000;

/// Environment variable that overrides [`DEFAULT_GUARD_DIM`].
pub const GUARD_ENV: &str = "TRANSTAT_GUARD_DIM";

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Upper bound on ambient dimensions, checked before allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    pub max_ambient: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Guard {
            max_ambient: DEFAULT_GUARD_DIM,
        }
    }
}

impl Guard {
    pub fn new(max_ambient: usize) -> Self {
        Guard { max_ambient }
    }

    /// Default guard, overridden by `TRANSTAT_GUARD_DIM` when it parses.
    pub fn from_env() -> Self {
        std::env::var(GUARD_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Guard::new)
            .unwrap_or_default()
    }

    pub fn check(&self, requested: usize) -> Result<()> {
        if requested > self.max_ambient {
            return Err(Error::GuardExceeded {
                requested,
                limit: self.max_ambient,
            });
        }
        Ok(())
    }

    /// Checks `base^n`, failing on overflow as well.
    pub fn check_power(&self, base: usize, n: usize) -> Result<usize> {
        let mut dim: usize = 1;
        for _ in 0..n {
            dim = dim.checked_mul(base).ok_or(Error::GuardExceeded {
                requested: usize::MAX,
                limit: self.max_ambient,
            })?;
        }
        self.check(dim)?;
        Ok(dim)
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(RationalMatrix {
            rows: n,
            cols,
            data,
        })
    }

    /// Integer literal helper, mostly for tests and presets.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| int(x))
            })
            .collect();
        RationalMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn column_vector(v: &[Rational]) -> Self {
        RationalMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn outer(u: &[Rational], v: &[Rational]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| &u[i] * &v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    /// Matrix product. Rows of `self` and columns of `other` are cleared
    /// of denominators first so the inner sums run over integers; zero
    /// entries are skipped, which keeps sparse tensor operators cheap.
    ///
    /// Panics on a shape mismatch.
    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let col_den: Vec<BigInt> = (0..other.cols)
            .map(|j| common_denominator((0..other.rows).map(|k| &other[(k, j)])))
            .collect();
        let other_rows: Vec<Vec<(usize, BigInt)>> = (0..other.rows)
            .map(|k| {
                other
                    .row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (j, scaled(x, &col_den[j])))
                    .collect()
            })
            .collect();
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        let mut acc = vec![BigInt::zero(); other.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let den = common_denominator(row.iter());
            let mut touched = false;
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let a = scaled(a, &den);
                for (j, b) in &other_rows[k] {
                    acc[*j] += &a * b;
                    touched = true;
                }
            }
            if !touched {
                continue;
            }
            for (j, x) in acc.iter_mut().enumerate() {
                if !x.is_zero() {
                    out.data[i * other.cols + j] = Rational::new(std::mem::take(x), &den * &col_den[j]);
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let (vi, vden) = integer_vec(v);
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let den = common_denominator(row.iter());
                let mut acc = BigInt::zero();
                for (a, b) in row.iter().zip(&vi) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += scaled(a, &den) * b;
                    }
                }
                Rational::new(acc, den * &vden)
            })
            .collect()
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &RationalMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> RationalMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "elementwise shape mismatch"
        );
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Sub-block of rows `[r0, r1)` and columns `[c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> RationalMatrix {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    /// Exact inverse by Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = RationalMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let (r, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(r.block(0, n, n, 2 * n))
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Least common multiple of the denominators of the nonzero entries.
fn common_denominator<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    let mut l = BigInt::one();
    for x in xs {
        if !x.is_zero() && !x.denom().is_one() {
            l = l.lcm(x.denom());
        }
    }
    l
}

/// `x · den` for a `den` that `x`'s denominator divides.
fn scaled(x: &Rational, den: &BigInt) -> BigInt {
    if x.denom().is_one() {
        x.numer() * den
    } else {
        x.numer() * (den / x.denom())
    }
}

/// `v = w / den` with `w` integral.
fn integer_vec(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(v.iter());
    (v.iter().map(|x| if x.is_zero() { BigInt::zero() } else { scaled(x, &den) }).collect(), den)
}

/// Divides out the gcd of the entries.
fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() {
        return;
    }
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x /= &g;
        }
    }
}

/// Reduced row echelon form and pivot columns.
///
/// Elimination runs on primitive integer rows (cross-multiplication, then
/// removal of the row content); the pivot rows are divided by their pivots
/// only at the end.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let cols = m.cols;
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let mut r = integer_vec(m.row(i)).0;
            make_primitive(&mut r);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..cols {
        if prow == rows.len() {
            break;
        }
        let Some(sel) = (prow..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(prow, sel);
        let pivot_row = rows[prow].clone();
        let a = pivot_row[col].clone();
        let support: Vec<usize> = (col..cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == prow || row[col].is_zero() {
                continue;
            }
            let b = std::mem::take(&mut row[col]);
            if !a.is_one() {
                for x in row.iter_mut() {
                    if !x.is_zero() {
                        *x *= &a;
                    }
                }
            }
            for &j in &support {
                if j != col {
                    row[j] -= &b * &pivot_row[j];
                }
            }
            make_primitive(row);
        }
        pivots.push(col);
        prow += 1;
    }
    let mut data = Vec::with_capacity(m.rows * cols);
    for (i, row) in rows.into_iter().enumerate() {
        if i < pivots.len() {
            let p = row[pivots[i]].clone();
            data.extend(row.into_iter().map(|x| {
                if x.is_zero() {
                    Rational::zero()
                } else {
                    Rational::new(x, p.clone())
                }
            }));
        } else {
            data.extend(std::iter::repeat_n(Rational::zero(), cols));
        }
    }
    (
        RationalMatrix {
            rows: m.rows,
            cols,
            data,
        },
        pivots,
    )
}

/// Null space of `m` as a canonical subspace of `Q^cols`.
pub fn kernel(m: &RationalMatrix) -> Subspace {
    let (r, pivots) = rref(m);
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors: Vec<Vec<Rational>> = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                let c = &r[(row, f)];
                if !c.is_zero() {
                    v[p] = -c;
                }
            }
            v
        })
        .collect();
    Subspace::from_vectors(n, vectors).expect("kernel vectors have ambient length")
}

/// Kronecker product with `(i, α) ↦ i * b.rows + α` on both axes.
pub fn kron(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let mut out = RationalMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    let width = out.cols;
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let x = &a[(ia, ja)];
            if x.is_zero() {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    let y = &b[(ib, jb)];
                    if y.is_zero() {
                        continue;
                    }
                    out.data[(ia * b.rows + ib) * width + ja * b.cols + jb] = x * y;
                }
            }
        }
    }
    out
}

/// `kron` of vectors under the same index convention.
pub fn kron_vec(u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

/// True iff `p` is idempotent and self-adjoint for the form `gram`
/// (`gram · p = pᵀ · gram`).
pub fn is_projector(p: &RationalMatrix, gram: &RationalMatrix) -> bool {
    if !p.is_square() || !gram.is_square() || p.rows != gram.rows {
        return false;
    }
    p.mul(p) == *p && gram.mul(p) == p.transpose().mul(gram)
}

/// Leading principal minors all positive, tested via the pivots of
/// elimination without row exchanges.
pub fn is_positive_definite(m: &RationalMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows;
    let mut a = m.row_vectors();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        let inv = a[k][k].recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

/// A subspace of `Q^ambient` stored as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::identity(ambient),
        }
    }

    /// Span of the rows of `rows`.
    pub fn from_spanning(rows: &RationalMatrix) -> Self {
        let (r, pivots) = rref(rows);
        Subspace {
            ambient: rows.cols,
            basis: r.block(0, pivots.len(), 0, rows.cols),
        }
    }

    pub fn from_vectors(ambient: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        Ok(Self::from_spanning(&RationalMatrix::from_rows(ambient, vectors)?))
    }

    /// Column space of `m`.
    pub fn image(m: &RationalMatrix) -> Self {
        Self::from_spanning(&m.transpose())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vectors()
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of ambient dimension {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let extra = RationalMatrix::from_rows(self.ambient, vec![v.to_vec()]).unwrap();
        self.basis.vstack(&extra).unwrap().rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.sum(other).is_ok_and(|s| s.dim() == other.dim())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        Ok(Self::from_spanning(&self.basis.vstack(&other.basis)?))
    }

    /// `a ∩ b` as the common kernel of the stacked annihilators of `a` and `b`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let ann_a = kernel(&self.basis);
        let ann_b = kernel(&other.basis);
        Ok(kernel(&ann_a.basis.vstack(&ann_b.basis)?))
    }

    /// `{φ : φᵀ · pairing · v = 0 for all v in self}`.
    pub fn annihilator(&self, pairing: &RationalMatrix) -> Result<Subspace> {
        if !pairing.is_square() || pairing.rows != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "pairing is {}x{}, subspace ambient is {}",
                pairing.rows, pairing.cols, self.ambient
            )));
        }
        let rank = pairing.rank();
        if rank < self.ambient {
            return Err(Error::DegeneratePairing {
                rank,
                dim: self.ambient,
            });
        }
        Ok(kernel(&self.basis.mul(&pairing.transpose())))
    }

    /// Gram-orthogonal projector onto this subspace: `Bᵀ (B G Bᵀ)⁻¹ B G`.
    pub fn orthogonal_projector(&self, gram: &RationalMatrix) -> Result<RationalMatrix> {
        if gram.rows != self.ambient || !gram.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{}, subspace ambient is {}",
                gram.rows, gram.cols, self.ambient
            )));
        }
        if self.dim() == 0 {
            return Ok(RationalMatrix::zeros(self.ambient, self.ambient));
        }
        let bg = self.basis.mul(gram);
        let inner = bg.mul(&self.basis.transpose()).inverse()?;
        Ok(self.basis.transpose().mul(&inner).mul(&bg))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

/// An operator on `base^⊗slots` prepared for repeated application at a
/// chosen position inside `base^⊗n`, without materialising the lifted matrix.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    base: usize,
    slots: usize,
    // op = columns / den; columns[j] = nonzero (i, den·op[i][j])
    columns: Vec<Vec<(usize, BigInt)>>,
    den: BigInt,
}

impl LocalOperator {
    pub fn new(op: &RationalMatrix, base: usize, slots: usize) -> Result<Self> {
        let width = base.pow(slots as u32);
        if op.rows() != width || op.cols() != width {
            return Err(Error::DimensionMismatch(format!(
                "local operator is {}x{}, expected {width}x{width}",
                op.rows(),
                op.cols()
            )));
        }
        let den = common_denominator(op.entries().iter());
        let columns = (0..width)
            .map(|j| {
                (0..width)
                    .filter(|&i| !op[(i, j)].is_zero())
                    .map(|i| (i, scaled(&op[(i, j)], &den)))
                    .collect()
            })
            .collect();
        Ok(LocalOperator {
            base,
            slots,
            columns,
            den,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Applies `id^{⊗pos} ⊗ op ⊗ id^{⊗(n − pos − slots)}` to `v ∈ base^⊗n`.
    pub fn apply(&self, n: usize, pos: usize, v: &[Rational]) -> Vec<Rational> {
        assert!(pos + self.slots <= n, "operator slots exceed tensor degree");
        let mid = self.columns.len();
        let right = self.base.pow((n - pos - self.slots) as u32);
        assert_eq!(v.len(), self.base.pow(n as u32), "vector length mismatch");
        let (vi, vden) = integer_vec(v);
        let mut out = vec![BigInt::zero(); v.len()];
        for (idx, x) in vi.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let r = idx % right;
            let j = (idx / right) % mid;
            let l = idx / (right * mid);
            for (i, c) in &self.columns[j] {
                out[(l * mid + i) * right + r] += c * x;
            }
        }
        let den = &self.den * vden;
        out.into_iter()
            .map(|x| if x.is_zero() { Rational::zero() } else { Rational::new(x, den.clone()) })
            .collect()
    }

    /// The lifted matrix on `base^⊗n`.
    pub fn lifted(&self, n: usize, pos: usize) -> RationalMatrix {
        let dim = self.base.pow(n as u32);
        let mut out = RationalMatrix::zeros(dim, dim);
        let mut e = vec![Rational::zero(); dim];
        for j in 0..dim {
            e[j] = Rational::one();
            for (i, x) in self.apply(n, pos, &e).into_iter().enumerate() {
                out[(i, j)] = x;
            }
            e[j] = Rational::zero();
        }
        out
    }
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn unit_vector(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);

        let (r, p) = rref(&RationalMatrix::identity(3));
        assert_eq!(r, RationalMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);

        let (r, p) = rref(&m(&[&[0, 1], &[1, 0]]));
        assert_eq!(r, RationalMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&RationalMatrix::zeros(2, 2)), Subspace::full(2));
        assert_eq!(kernel(&RationalMatrix::identity(3)).dim(), 0);

        let ones = vec![int(1); 3];
        let p = RationalMatrix::outer(&ones, &ones).scale(&rat(1, 3));
        let k = kernel(&p);
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!(is_zero_vec(&p.mul_vec(&v)));
        }
    }

    #[test]
    fn intersect_examples() {
        let e1 = Subspace::from_vectors(2, vec![vec![int(1), int(0)]]).unwrap();
        let e2 = Subspace::from_vectors(2, vec![vec![int(0), int(1)]]).unwrap();
        assert_eq!(e1.intersect(&e2).unwrap().dim(), 0);
        assert_eq!(Subspace::full(2).intersect(&e1).unwrap(), e1);
        assert!(e1.intersect(&Subspace::zero(3)).is_err());
    }

    // h = Σ k_α ⊗ k_α in dim-3 K. Oracle: solve h⊗x = y⊗h by brute force
    // over the 27 coordinates.
    #[test]
    fn h_tensor_k_meets_k_tensor_h_trivially() {
        let mut h = vec![int(0); 9];
        for a in 0..3 {
            h[a * 3 + a] = int(1);
        }
        let hk: Vec<Vec<Rational>> = (0..3).map(|a| kron_vec(&h, &unit_vector(3, a))).collect();
        let kh: Vec<Vec<Rational>> = (0..3).map(|a| kron_vec(&unit_vector(3, a), &h)).collect();
        let a = Subspace::from_vectors(27, hk.clone()).unwrap();
        let b = Subspace::from_vectors(27, kh.clone()).unwrap();
        // oracle: [hk | -kh] has trivial kernel iff intersection is zero
        let mut rows = hk;
        rows.extend(kh.into_iter().map(|v| v.into_iter().map(|x| -x).collect()));
        let stacked = RationalMatrix::from_rows(27, rows).unwrap().transpose();
        assert_eq!(kernel(&stacked).dim(), 0);
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
    }

    #[test]
    fn kron_identity() {
        assert_eq!(
            kron(&RationalMatrix::identity(2), &RationalMatrix::identity(3)),
            RationalMatrix::identity(6)
        );
    }

    #[test]
    fn projector_checks() {
        let id = RationalMatrix::identity(2);
        assert!(is_projector(&id, &id));
        assert!(!is_projector(&m(&[&[1, 1], &[0, 0]]), &id));

        let mut h = vec![int(0); 9];
        for a in 0..3 {
            h[a * 3 + a] = int(1);
        }
        let q = RationalMatrix::outer(&h, &h).scale(&rat(1, 3));
        assert!(is_projector(&q, &RationalMatrix::identity(9)));
    }

    #[test]
    fn annihilator_examples() {
        let id = RationalMatrix::identity(4);
        assert_eq!(Subspace::zero(4).annihilator(&id).unwrap(), Subspace::full(4));
        assert_eq!(Subspace::full(4).annihilator(&id).unwrap().dim(), 0);

        let mut h = vec![int(0); 9];
        for a in 0..3 {
            h[a * 3 + a] = int(1);
        }
        let line = Subspace::from_vectors(9, vec![h.clone()]).unwrap();
        let h_perp = line.annihilator(&RationalMatrix::identity(9)).unwrap();
        assert_eq!(h_perp.dim(), 8);
        let back = h_perp.annihilator(&RationalMatrix::identity(9)).unwrap();
        assert_eq!(back, line);
        for v in h_perp.vectors() {
            let pair: Rational = v.iter().zip(&h).map(|(a, b)| a * b).sum();
            assert!(pair.is_zero());
        }
        assert!(matches!(
            line.annihilator(&RationalMatrix::zeros(9, 9)),
            Err(Error::DegeneratePairing { .. })
        ));
    }

    #[test]
    fn inverse_and_positive_definite() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.mul(&a.inverse().unwrap()), RationalMatrix::identity(2));
        assert!(is_positive_definite(&a));
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn local_operator_matches_kron() {
        let op = m(&[&[1, 2, 0, 0], &[0, 1, 3, 0], &[0, 0, 1, 4], &[5, 0, 0, 1]]);
        let local = LocalOperator::new(&op, 2, 2).unwrap();
        let i2 = RationalMatrix::identity(2);
        assert_eq!(local.lifted(3, 0), kron(&op, &i2));
        assert_eq!(local.lifted(3, 1), kron(&i2, &op));
    }

    #[test]
    fn guard_rejects_large() {
        let g = Guard::new(100);
        assert!(g.check_power(5, 2).is_ok());
        assert!(matches!(g.check_power(5, 3), Err(Error::GuardExceeded { .. })));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    fn matrix(max: usize) -> impl Strategy<Value = RationalMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(small_rational(), r * c).prop_map(move |data| {
                RationalMatrix::from_fn(r, c, |i, j| data[i * c + j].clone())
            })
        })
    }

    fn square(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(small_rational(), n * n)
            .prop_map(move |data| RationalMatrix::from_fn(n, n, |i, j| data[i * n + j].clone()))
    }

    fn subspace(ambient: usize) -> impl Strategy<Value = Subspace> {
        (0..=ambient).prop_flat_map(move |k| {
            proptest::collection::vec(small_rational(), k * ambient).prop_map(move |data| {
                Subspace::from_spanning(&RationalMatrix::from_fn(k, ambient, |i, j| {
                    data[i * ambient + j].clone()
                }))
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(a in matrix(6)) {
            prop_assert_eq!(a.rank() + kernel(&a).dim(), a.cols());
            for v in kernel(&a).vectors() {
                prop_assert!(is_zero_vec(&a.mul_vec(&v)));
            }
        }

        #[test]
        fn intersection_laws(a in subspace(5), b in subspace(5), c in subspace(5)) {
            let ab = a.intersect(&b).unwrap();
            prop_assert_eq!(&ab, &b.intersect(&a).unwrap());
            prop_assert_eq!(
                ab.intersect(&c).unwrap(),
                a.intersect(&b.intersect(&c).unwrap()).unwrap()
            );
            let sum = a.sum(&b).unwrap();
            prop_assert_eq!(ab.dim() + sum.dim(), a.dim() + b.dim());
        }

        #[test]
        fn double_annihilator(a in subspace(5)) {
            let id = RationalMatrix::identity(5);
            let ann = a.annihilator(&id).unwrap();
            prop_assert_eq!(ann.dim(), 5 - a.dim());
            prop_assert_eq!(ann.annihilator(&id).unwrap(), a);
        }

        #[test]
        fn kron_mixed_product(a in square(3), b in square(2)) {
            let ia = RationalMatrix::identity(a.rows());
            let ib = RationalMatrix::identity(b.rows());
            prop_assert_eq!(kron(&a, &ib).mul(&kron(&ia, &b)), kron(&a, &b));
        }

        #[test]
        fn rref_is_deterministic(a in matrix(5)) {
            prop_assert_eq!(rref(&a), rref(&a.clone()));
        }
    }
}
