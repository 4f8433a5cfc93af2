//! Exact linear algebra over the rationals.
//!
//! Everything here is arbitrary precision; there is no floating point and no
//! tolerance anywhere. Subspaces are kept in reduced column echelon form so
//! that two equal subspaces always have identical bases.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("inconsistent system: right-hand side leaves the column space")]
    Inconsistent,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Parses `p` or `p/q` with a nonzero denominator. The result is normalized.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        text: text.to_string(),
        reason,
    };
    let int = |s: &str| -> Result<BigInt, ParseRationalError> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected decimal integer"));
        }
        BigInt::from_str(s).map_err(|_| err("expected decimal integer"))
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(int(text)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(err("zero denominator"));
            }
            if q.is_negative() {
                return Err(err("denominator must be positive"));
            }
            Ok(Rational::new(int(p)?, q))
        }
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// All solutions `X` of `A X = B`: `particular + (columns drawn from homogeneous)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Matrix,
    /// Kernel of `A`; every column of `X` may move freely inside it.
    pub homogeneous: Subspace,
    rhs_cols: usize,
}

impl AffineSolution {
    /// Dimension of the affine family of matrix solutions.
    pub fn family_dim(&self) -> usize {
        self.homogeneous.dim() * self.rhs_cols
    }

    pub fn is_unique(&self) -> bool {
        self.family_dim() == 0
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
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

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Matrix { rows, cols, data }
    }

    /// Builds from rows; `cols` is needed to give zero-row matrices a width.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix {
            rows: r,
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
            cols,
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Rational>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(&self, other: &Matrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(row + i, col + j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        self.transpose().select_rows(idx).transpose()
    }

    /// Reduced row echelon form by Gauss-Jordan elimination; the pivot is the
    /// first nonzero entry in each column.
    pub fn rref(&self) -> Rref {
        let mut rows = self.to_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].recip();
            for x in rows[r].iter_mut().skip(c) {
                *x *= &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            reduced: Matrix::from_rows(rows, self.cols),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Kernel `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Subspace {
        let Rref { reduced, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(i, f)].clone();
            }
            basis.push(v);
        }
        Subspace::span(&Matrix::from_columns(&basis, self.cols))
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<AffineSolution, LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::Shape(format!(
                "solve: {} rows vs right-hand side with {} rows",
                self.rows, rhs.rows
            )));
        }
        let Rref { reduced, pivots } = self.hstack(rhs).rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        let mut particular = Matrix::zeros(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                particular[(p, j)] = reduced[(i, self.cols + j)].clone();
            }
        }
        Ok(AffineSolution {
            particular,
            homogeneous: self.nullspace(),
            rhs_cols: rhs.cols,
        })
    }

    /// Two-sided inverse, if square and nonsingular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let sol = self.solve(&Matrix::identity(self.rows)).ok()?;
        sol.is_unique().then_some(sol.particular)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn column_space(&self) -> Subspace {
        Subspace::span(self)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut m = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        m[(i, j)] += a * b;
                    }
                }
            }
        }
        m
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.shape(),
            rhs.shape(),
            "matrix difference shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// A linear subspace of `ℚ^ambient`, stored by a basis in reduced column
/// echelon form (the transpose of an RREF).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

/// Everything [`Subspace::compare`] reports about a pair of subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceRelation {
    pub equal: bool,
    /// `u ⊆ v`
    pub contains: bool,
    pub sum: Subspace,
    pub intersection: Subspace,
}

impl Subspace {
    /// Column span of `generators`, canonicalized.
    pub fn span(generators: &Matrix) -> Self {
        let ambient = generators.rows();
        let Rref { reduced, pivots } = generators.transpose().rref();
        let basis = reduced
            .select_rows(&(0..pivots.len()).collect::<Vec<_>>())
            .transpose();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Canonical basis, one vector per column.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Rows carrying the leading one of each basis column.
    pub fn pivot_rows(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|j| {
                (0..self.ambient)
                    .find(|&i| !self.basis[(i, j)].is_zero())
                    .expect("canonical basis column is nonzero")
            })
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    /// Whether every column of `vectors` lies in the subspace.
    pub fn contains_columns(&self, vectors: &Matrix) -> bool {
        assert_eq!(vectors.rows(), self.ambient, "vector length mismatch");
        if vectors.cols() == 0 {
            return true;
        }
        // the complement projection kills exactly this subspace
        (&self.complement_projection() * vectors).is_zero()
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.contains_columns(&other.basis))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(Subspace::span(&self.basis.hstack(&other.basis)))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let k = self.dim();
        let stacked = self.basis.hstack(&-&other.basis);
        let null = stacked.nullspace();
        let coeffs = null.basis.block(0, 0, k, null.dim());
        Ok(Subspace::span(&(&self.basis * &coeffs)))
    }

    pub fn compare(&self, other: &Subspace) -> Result<SubspaceRelation, LinalgError> {
        Ok(SubspaceRelation {
            equal: self == other,
            contains: other.contains(self)?,
            sum: self.sum(other)?,
            intersection: self.intersection(other)?,
        })
    }

    /// `{ m · x : x ∈ self }`
    pub fn image(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient, "image: shape mismatch");
        Subspace::span(&(m * &self.basis))
    }

    /// `{ x : m · x ∈ self }`
    pub fn preimage(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient, "preimage: shape mismatch");
        (&self.complement_projection() * m).nullspace()
    }

    /// Projection `ℚ^ambient → ℚ^(ambient − dim)` whose kernel is exactly this
    /// subspace. The complement is spanned by the standard vectors at the
    /// non-pivot rows, and the projection is the identity on them.
    pub fn complement_projection(&self) -> Matrix {
        let pivots = self.pivot_rows();
        let mut is_pivot = vec![false; self.ambient];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.ambient).filter(|&i| !is_pivot[i]).collect();
        // x = B·x_pivot + Σ y_i e_i  ⇒  y = x_free − B_free · x_pivot
        let mut pi = Matrix::zeros(free.len(), self.ambient);
        for (r, &i) in free.iter().enumerate() {
            pi[(r, i)] = Rational::one();
            for (j, &p) in pivots.iter().enumerate() {
                pi[(r, p)] = -self.basis[(i, j)].clone();
            }
        }
        pi
    }

    /// Coordinates of the given columns in this subspace's basis, if they lie in it.
    pub fn coordinates(&self, vectors: &Matrix) -> Option<Matrix> {
        let sol = self.basis.solve(vectors).ok()?;
        debug_assert!(sol.is_unique());
        Some(sol.particular)
    }

    /// Vectors of `self` extending a basis of `sub ⊆ self` to a basis of `self`.
    pub fn complement_in(&self, sub: &Subspace) -> Result<Matrix, LinalgError> {
        self.check_ambient(sub)?;
        let mut chosen = sub.basis.clone();
        let mut added = Vec::new();
        let mut rank = sub.dim();
        for j in 0..self.dim() {
            let v = self.basis.select_columns(&[j]);
            let trial = chosen.hstack(&v);
            let r = trial.rank();
            if r > rank {
                chosen = trial;
                rank = r;
                added.push(j);
            }
        }
        if rank != self.dim() {
            return Err(LinalgError::Shape(
                "complement_in: sub is not contained in self".into(),
            ));
        }
        Ok(self.basis.select_columns(&added))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in {}: {})",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}

/// A subquotient `space / sub` with a chosen basis of representatives.
#[derive(Clone, Debug)]
pub struct Subquotient {
    sub: Subspace,
    representatives: Matrix,
    frame: Matrix,
}

impl Subquotient {
    pub fn new(space: &Subspace, sub: &Subspace) -> Result<Self, LinalgError> {
        if !space.contains(sub)? {
            return Err(LinalgError::Shape(
                "subquotient: sub is not contained in space".into(),
            ));
        }
        let representatives = space.complement_in(sub)?;
        let frame = sub.basis().hstack(&representatives);
        Ok(Subquotient {
            sub: sub.clone(),
            representatives,
            frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.representatives.cols()
    }

    /// Representatives in the ambient space, one per column.
    pub fn representatives(&self) -> &Matrix {
        &self.representatives
    }

    /// Class coordinates of each column of `vectors`, which must lie in the space.
    pub fn reduce(&self, vectors: &Matrix) -> Option<Matrix> {
        let sol = self.frame.solve(vectors).ok()?;
        let k = self.sub.dim();
        Some(sol.particular.block(k, 0, self.dim(), vectors.cols()))
    }
}
