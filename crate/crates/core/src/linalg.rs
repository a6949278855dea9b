//! Dense linear algebra over K. Matrices and vectors carry raw [`Elem`]s;
//! the owning [`Field`] is passed to every operation.

use std::fmt;

use crate::field::{Elem, Field};

pub type Vector = Vec<Elem>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1))).finish()
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = Elem::ONE;
        }
        m
    }

    pub fn scalar(n: usize, a: Elem) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = a;
        }
        m
    }

    pub fn diagonal(entries: &[Elem]) -> Self {
        let n = entries.len();
        let mut m = Self::zero(n, n);
        for (i, &a) in entries.iter().enumerate() {
            m.data[i * n + i] = a;
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Result<Self, LinalgError> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, a: Elem) {
        self.data[i * self.cols + j] = a;
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { Elem::ONE } else { Elem::ZERO })
            })
    }

    pub fn mul(&self, k: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        mul_into(k, &self.data, &other.data, self.rows, self.cols, other.cols, &mut out.data);
        out
    }

    pub fn mul_vec(&self, k: &Field, v: &[Elem]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(k, self.row(i), v))
            .collect()
    }

    pub fn add(&self, k: &Field, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| k.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, k: &Field, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| k.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: &Field, c: Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| k.mul(c, a)).collect(),
        }
    }

    /// If `self = c · other` for some scalar c, returns c.
    pub fn scalar_ratio(&self, k: &Field, other: &Matrix) -> Option<Elem> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let pos = other.data.iter().position(|a| !a.is_zero())?;
        let c = k.div(self.data[pos], other.data[pos]).ok()?;
        (self.data.iter().zip(&other.data).all(|(&a, &b)| a == k.mul(c, b))).then_some(c)
    }

    pub fn pow(&self, k: &Field, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &base);
            }
            base = base.mul(k, &base);
            e >>= 1;
        }
        acc
    }

    pub fn rank(&self, k: &Field) -> usize {
        rref(k, self).1
    }

    pub fn inverse(&self, k: &Field) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Elem::ONE);
        }
        let (r, _, pivots) = rref_full(k, &aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let mut inv = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self, k: &Field) -> Elem {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Elem::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Elem::ZERO;
            };
            if p != c {
                for j in 0..n {
                    let t = m.get(p, j);
                    m.set(p, j, m.get(c, j));
                    m.set(c, j, t);
                }
                det = k.neg(det);
            }
            let piv = m.get(c, c);
            det = k.mul(det, piv);
            let inv = k.inv(piv).unwrap();
            for i in c + 1..n {
                let f = k.mul(m.get(i, c), inv);
                if !f.is_zero() {
                    for j in c..n {
                        let v = k.sub(m.get(i, j), k.mul(f, m.get(c, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }
}

/// out = a (r×m) · b (m×c), all row-major.
#[inline]
pub(crate) fn mul_into(
    k: &Field,
    a: &[Elem],
    b: &[Elem],
    r: usize,
    m: usize,
    c: usize,
    out: &mut [Elem],
) {
    for i in 0..r {
        for j in 0..c {
            let mut acc = Elem::ZERO;
            for t in 0..m {
                let x = a[i * m + t];
                if !x.is_zero() {
                    acc = k.add(acc, k.mul(x, b[t * c + j]));
                }
            }
            out[i * c + j] = acc;
        }
    }
}

pub fn dot(k: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(Elem::ZERO, |acc, (&x, &y)| k.add(acc, k.mul(x, y)))
}

pub fn vec_add(k: &Field, a: &[Elem], b: &[Elem]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| k.add(x, y)).collect()
}

pub fn vec_sub(k: &Field, a: &[Elem], b: &[Elem]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| k.sub(x, y)).collect()
}

pub fn vec_scale(k: &Field, c: Elem, a: &[Elem]) -> Vector {
    a.iter().map(|&x| k.mul(c, x)).collect()
}

pub fn is_zero_vec(a: &[Elem]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Elem::ZERO; n];
    v[i] = Elem::ONE;
    v
}

/// Rescale so the first nonzero coordinate is 1; returns the vector and the
/// factor c with `v = c · monic`. `None` for the zero vector.
pub fn monic(k: &Field, v: &[Elem]) -> Option<(Vector, Elem)> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = k.inv(lead).unwrap();
    Some((vec_scale(k, inv, v), lead))
}

fn rref_full(k: &Field, m: &Matrix) -> (Matrix, usize, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = k.inv(a.get(r, c)).unwrap();
        for j in c..cols {
            let v = k.mul(inv, a.get(r, j));
            a.set(r, j, v);
        }
        for i in 0..rows {
            let f = a.get(i, c);
            if i != r && !f.is_zero() {
                for j in c..cols {
                    let v = k.sub(a.get(i, j), k.mul(f, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, r, pivots)
}

/// Reduced row-echelon form (same shape; zero rows at the bottom) and rank.
pub fn rref(k: &Field, m: &Matrix) -> (Matrix, usize) {
    let (a, r, _) = rref_full(k, m);
    (a, r)
}

/// Some solution of `m x = b`, with free variables set to zero.
pub fn solve(k: &Field, m: &Matrix, b: &[Elem]) -> Result<Vector, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows,
            found: b.len(),
        });
    }
    let mut aug = Matrix::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, m.cols, b[i]);
    }
    let (r, _, pivots) = rref_full(k, &aug);
    if pivots.last() == Some(&m.cols) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = vec![Elem::ZERO; m.cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = r.get(i, m.cols);
    }
    Ok(x)
}

/// Basis of the right kernel {x : m x = 0}, one vector per free column.
pub fn kernel(k: &Field, m: &Matrix) -> Vec<Vector> {
    let (r, rank, pivots) = rref_full(k, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Elem::ZERO; m.cols];
            x[f] = Elem::ONE;
            for (i, &c) in pivots.iter().enumerate().take(rank) {
                x[c] = k.neg(r.get(i, f));
            }
            x
        })
        .collect()
}

/// Coordinates with respect to a fixed, linearly independent list of vectors
/// (not necessarily echelon). Precomputes an invertible minor so lookups
/// cost one small matrix-vector product.
#[derive(Debug, Clone)]
pub struct BasisCoordinates {
    basis: Vec<Vector>,
    rows: Vec<usize>,
    minor_inv: Matrix,
}

impl BasisCoordinates {
    pub fn new(k: &Field, basis: &[Vector]) -> Option<Self> {
        let m = basis.len();
        if m == 0 {
            return Some(BasisCoordinates {
                basis: Vec::new(),
                rows: Vec::new(),
                minor_inv: Matrix::zero(0, 0),
            });
        }
        let (_, rank, pivots) = rref_full(k, &Matrix::from_rows(basis).ok()?);
        if rank < m {
            return None;
        }
        let minor = Matrix::from_rows(
            &pivots
                .iter()
                .map(|&r| basis.iter().map(|b| b[r]).collect())
                .collect::<Vec<Vector>>(),
        )
        .ok()?;
        Some(BasisCoordinates {
            basis: basis.to_vec(),
            rows: pivots,
            minor_inv: minor.inverse(k).ok()?,
        })
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn combine(&self, k: &Field, x: &[Elem]) -> Vector {
        let n = self.basis.first().map_or(0, |b| b.len());
        let mut out = vec![Elem::ZERO; n];
        for (c, b) in x.iter().zip(&self.basis) {
            if !c.is_zero() {
                for (o, &y) in out.iter_mut().zip(b) {
                    *o = k.add(*o, k.mul(*c, y));
                }
            }
        }
        out
    }

    /// Coordinates of `v`, or `None` when v is outside the span.
    pub fn coords(&self, k: &Field, v: &[Elem]) -> Option<Vector> {
        if self.basis.is_empty() {
            return is_zero_vec(v).then(Vec::new);
        }
        let sub: Vector = self.rows.iter().map(|&r| v[r]).collect();
        let x = self.minor_inv.mul_vec(k, &sub);
        (self.combine(k, &x) == v).then_some(x)
    }
}

/// A K-subspace of K^n held by its reduced row-echelon basis, so equal
/// subspaces are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vector>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}⟩", self.basis)
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: (0..n).map(|i| unit_vector(n, i)).collect(),
        }
    }

    pub fn span(k: &Field, n: usize, vectors: &[Vector]) -> Result<Self, LinalgError> {
        for v in vectors {
            if v.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if vectors.is_empty() {
            return Ok(Self::zero(n));
        }
        let (r, rank) = rref(k, &Matrix::from_rows(vectors)?);
        Ok(Subspace {
            n,
            basis: (0..rank).map(|i| r.row(i).to_vec()).collect(),
        })
    }

    pub fn line(k: &Field, v: &[Elem]) -> Self {
        Self::span(k, v.len(), &[v.to_vec()]).expect("consistent length")
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.n
    }

    fn check(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn contains(&self, k: &Field, v: &[Elem]) -> bool {
        let mut r = v.to_vec();
        for row in &self.basis {
            let c = row.iter().position(|x| !x.is_zero()).unwrap();
            let f = r[c];
            if !f.is_zero() {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = k.sub(*x, k.mul(f, y));
                }
            }
        }
        is_zero_vec(&r)
    }

    pub fn contains_subspace(&self, k: &Field, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(k, v))
    }

    pub fn sum(&self, k: &Field, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(k, self.n, &vs)
    }

    /// Exact intersection via the kernel of the stacked bases.
    pub fn intersect(&self, k: &Field, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.n));
        }
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().cloned());
        let m = Matrix::from_columns(&cols)?;
        let vecs: Vec<Vector> = kernel(k, &m)
            .into_iter()
            .map(|x| {
                let mut v = vec![Elem::ZERO; self.n];
                for (c, row) in x.iter().zip(&self.basis) {
                    for (t, &y) in v.iter_mut().zip(row) {
                        *t = k.add(*t, k.mul(*c, y));
                    }
                }
                v
            })
            .collect();
        Subspace::span(k, self.n, &vecs)
    }

    /// Image under a square matrix.
    pub fn image(&self, k: &Field, a: &Matrix) -> Subspace {
        let vs: Vec<Vector> = self.basis.iter().map(|v| a.mul_vec(k, v)).collect();
        Subspace::span(k, self.n, &vs).expect("square matrix preserves length")
    }

    /// Coordinates of `v` with respect to the echelon basis.
    pub fn coordinates(&self, k: &Field, v: &[Elem]) -> Option<Vector> {
        let coords: Vector = self
            .basis
            .iter()
            .map(|row| v[row.iter().position(|x| !x.is_zero()).unwrap()])
            .collect();
        let mut recon = vec![Elem::ZERO; self.n];
        for (c, row) in coords.iter().zip(&self.basis) {
            for (t, &y) in recon.iter_mut().zip(row) {
                *t = k.add(*t, k.mul(*c, y));
            }
        }
        (recon == v).then_some(coords)
    }

    /// Canonical spanning vector of a line (monic by construction).
    pub fn line_vector(&self) -> Option<&Vector> {
        (self.dim() == 1).then(|| &self.basis[0])
    }
}
