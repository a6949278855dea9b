//! Symplectic spaces, similitudes, and transvections.
//!
//! Vectors are columns and matrices act on the left. The form is
//! ⟨u, v⟩ = uᵀ J v, and the transvection with direction v and parameter λ is
//! T_v[λ] : u ↦ u + λ⟨u, v⟩ v, i.e. the matrix I + λ v (J v)ᵀ.

use crate::field::{Elem, Field};
use crate::linalg::{self, dot, kernel, monic, vec_scale, LinalgError, Matrix, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymplecticError {
    #[error("symplectic spaces need even dimension, got {0}")]
    OddDimension(usize),
    #[error("Gram matrix is not a nonsingular alternating form")]
    DegenerateForm,
    #[error("matrix is not a symplectic similitude")]
    NotSymplecticSimilitude,
    #[error("transvection direction must be nonzero")]
    ZeroDirection,
    #[error("matrix is not a symplectic transvection")]
    NotTransvection,
    #[error("transvections have different direction lines")]
    DirectionMismatch,
    #[error("subspace is degenerate for the form")]
    DegenerateSubspace,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSpace {
    field: Field,
    n: usize,
    gram: Matrix,
}

impl SymplecticSpace {
    /// Standard space with basis e₁…e_g, f₁…f_g and ⟨e_i, f_j⟩ = δ_ij.
    pub fn standard(k: &Field, n: usize) -> Result<Self, SymplecticError> {
        if n == 0 || n % 2 == 1 {
            return Err(SymplecticError::OddDimension(n));
        }
        let g = n / 2;
        let mut j = Matrix::zero(n, n);
        for i in 0..g {
            j.set(i, g + i, Elem::ONE);
            j.set(g + i, i, k.neg(Elem::ONE));
        }
        Ok(SymplecticSpace {
            field: k.clone(),
            n,
            gram: j,
        })
    }

    pub fn with_gram(k: &Field, gram: Matrix) -> Result<Self, SymplecticError> {
        let n = gram.rows();
        if !gram.is_square() {
            return Err(SymplecticError::DegenerateForm);
        }
        if n == 0 || n % 2 == 1 {
            return Err(SymplecticError::OddDimension(n));
        }
        for i in 0..n {
            if !gram.get(i, i).is_zero() {
                return Err(SymplecticError::DegenerateForm);
            }
            for j in 0..i {
                if gram.get(i, j) != k.neg(gram.get(j, i)) {
                    return Err(SymplecticError::DegenerateForm);
                }
            }
        }
        if gram.rank(k) != n {
            return Err(SymplecticError::DegenerateForm);
        }
        Ok(SymplecticSpace {
            field: k.clone(),
            n,
            gram,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn is_standard(&self) -> bool {
        SymplecticSpace::standard(&self.field, self.n).is_ok_and(|s| s.gram == self.gram)
    }

    /// ⟨u, v⟩ = uᵀ J v.
    pub fn form(&self, u: &[Elem], v: &[Elem]) -> Elem {
        dot(&self.field, u, &self.gram.mul_vec(&self.field, v))
    }

    /// The unique α with AᵀJA = αJ.
    pub fn multiplier(&self, a: &Matrix) -> Result<Elem, SymplecticError> {
        let k = &self.field;
        if a.rows() != self.n || a.cols() != self.n {
            return Err(SymplecticError::NotSymplecticSimilitude);
        }
        let m = a.transpose().mul(k, &self.gram).mul(k, a);
        match m.scalar_ratio(k, &self.gram) {
            Some(alpha) if !alpha.is_zero() => Ok(alpha),
            _ => Err(SymplecticError::NotSymplecticSimilitude),
        }
    }

    pub fn is_symplectic(&self, a: &Matrix) -> bool {
        self.multiplier(a) == Ok(Elem::ONE)
    }

    /// W^⊥.
    pub fn perp(&self, w: &Subspace) -> Subspace {
        let k = &self.field;
        if w.is_zero() {
            return Subspace::full(self.n);
        }
        // ⟨u, w⟩ = u·(Jw): kernel of the rows (Jw)ᵀ
        let rows: Vec<Vector> = w.basis().iter().map(|b| self.gram.mul_vec(k, b)).collect();
        let ker = kernel(k, &Matrix::from_rows(&rows).expect("uniform length"));
        Subspace::span(k, self.n, &ker).expect("uniform length")
    }

    pub fn is_nondegenerate(&self, w: &Subspace) -> bool {
        let k = &self.field;
        w.intersect(k, &self.perp(w)).is_ok_and(|s| s.is_zero())
    }

    pub fn is_totally_isotropic(&self, w: &Subspace) -> bool {
        let b = w.basis();
        b.iter().all(|x| b.iter().all(|y| self.form(x, y).is_zero()))
    }

    /// A symplectic basis (pairs (e_i, f_i) with ⟨e_i, f_j⟩ = δ_ij) of a
    /// nondegenerate subspace, built by Gram–Schmidt on its echelon basis.
    pub fn symplectic_basis(&self, h: &Subspace) -> Result<Vec<(Vector, Vector)>, SymplecticError> {
        self.symplectic_basis_from(h.basis().to_vec())
    }

    /// Gram–Schmidt on a spanning list of a nondegenerate subspace. Pairings
    /// and coefficients stay in any subfield containing the input pairings.
    pub fn symplectic_basis_from(
        &self,
        mut pool: Vec<Vector>,
    ) -> Result<Vec<(Vector, Vector)>, SymplecticError> {
        let k = &self.field;
        let mut pairs = Vec::new();
        while !pool.is_empty() {
            let e = pool.remove(0);
            let pos = pool
                .iter()
                .position(|x| !self.form(&e, x).is_zero())
                .ok_or(SymplecticError::DegenerateSubspace)?;
            let x = pool.remove(pos);
            let f = vec_scale(k, k.inv(self.form(&e, &x)).unwrap(), &x);
            for u in pool.iter_mut() {
                let (uf, ue) = (self.form(u, &f), self.form(u, &e));
                for i in 0..self.n {
                    u[i] = k.add(k.sub(u[i], k.mul(uf, e[i])), k.mul(ue, f[i]));
                }
            }
            pool.retain(|u| !linalg::is_zero_vec(u));
            pairs.push((e, f));
        }
        Ok(pairs)
    }

    /// Frame matrix B whose columns (e₁…e_g, f₁…f_g) form a symplectic basis
    /// of V such that the first dim(H)/2 hyperbolic pairs span H; BᵀJB is the
    /// standard Gram matrix.
    pub fn extend_symplectic_basis(&self, h: &Subspace) -> Result<Matrix, SymplecticError> {
        let mut pairs = self.symplectic_basis(h)?;
        pairs.extend(self.symplectic_basis(&self.perp(h))?);
        Ok(frame_matrix(&pairs))
    }

    /// Orthogonal projection onto a nondegenerate H along H^⊥, given a
    /// symplectic basis of H.
    pub fn project(&self, pairs: &[(Vector, Vector)], v: &[Elem]) -> Vector {
        let k = &self.field;
        let mut out = vec![Elem::ZERO; self.n];
        for (e, f) in pairs {
            let (a, b) = (self.form(v, f), k.neg(self.form(v, e)));
            for i in 0..self.n {
                out[i] = k.add(out[i], k.add(k.mul(a, e[i]), k.mul(b, f[i])));
            }
        }
        out
    }

    /// Matrix of T_v[λ] = I + λ v (Jv)ᵀ (not canonicalised).
    pub fn transvection_matrix(&self, v: &[Elem], lambda: Elem) -> Matrix {
        let k = &self.field;
        let jv = self.gram.mul_vec(k, v);
        let mut m = Matrix::identity(self.n);
        for i in 0..self.n {
            let li = k.mul(lambda, v[i]);
            if li.is_zero() {
                continue;
            }
            for j in 0..self.n {
                m.set(i, j, k.add(m.get(i, j), k.mul(li, jv[j])));
            }
        }
        m
    }

    pub fn make_transvection(&self, v: &[Elem], lambda: Elem) -> Result<Transvection, SymplecticError> {
        if v.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            }
            .into());
        }
        Transvection::canonical(&self.field, v, lambda)
    }

    pub fn detect_transvection(&self, a: &Matrix) -> Result<Transvection, SymplecticError> {
        let k = &self.field;
        if !self.is_symplectic(a) {
            return Err(SymplecticError::NotTransvection);
        }
        let n_mat = a.sub(k, &Matrix::identity(self.n));
        let Some(col) = (0..self.n).find(|&j| (0..self.n).any(|i| !n_mat.get(i, j).is_zero())) else {
            return Ok(Transvection::Trivial);
        };
        let (w, _) = monic(k, &n_mat.column(col)).unwrap();
        let jw = self.gram.mul_vec(k, &w);
        let i0 = w.iter().position(|x| !x.is_zero()).unwrap();
        let Some(j0) = jw.iter().position(|x| !x.is_zero()) else {
            return Err(SymplecticError::NotTransvection);
        };
        // w[i0] = 1, so N[i0][j0] = λ (Jw)[j0]
        let lambda = k.div(n_mat.get(i0, j0), jw[j0]).unwrap();
        if lambda.is_zero() || self.transvection_matrix(&w, lambda) != *a {
            return Err(SymplecticError::NotTransvection);
        }
        Ok(Transvection::Nontrivial {
            direction: w,
            parameter: lambda,
        })
    }

    /// A T_v[λ] A⁻¹ = T_{Av}[λ/α] for A with multiplier α.
    pub fn conjugate_transvection(
        &self,
        a: &Matrix,
        t: &Transvection,
    ) -> Result<Transvection, SymplecticError> {
        let alpha = self.multiplier(a)?;
        Ok(conjugate_with_multiplier(&self.field, a, alpha, t))
    }

    pub fn compose_same_direction(
        &self,
        t1: &Transvection,
        t2: &Transvection,
    ) -> Result<Transvection, SymplecticError> {
        let k = &self.field;
        match (t1, t2) {
            (Transvection::Trivial, t) | (t, Transvection::Trivial) => Ok(t.clone()),
            (
                Transvection::Nontrivial {
                    direction: v1,
                    parameter: l1,
                },
                Transvection::Nontrivial {
                    direction: v2,
                    parameter: l2,
                },
            ) => {
                if v1 != v2 {
                    return Err(SymplecticError::DirectionMismatch);
                }
                Transvection::canonical(k, v1, k.add(*l1, *l2))
            }
        }
    }
}

/// Conjugation when the multiplier is already known.
pub(crate) fn conjugate_with_multiplier(
    k: &Field,
    a: &Matrix,
    alpha: Elem,
    t: &Transvection,
) -> Transvection {
    match t {
        Transvection::Trivial => Transvection::Trivial,
        Transvection::Nontrivial {
            direction,
            parameter,
        } => {
            let av = a.mul_vec(k, direction);
            let lam = k.div(*parameter, alpha).expect("similitude multiplier is nonzero");
            Transvection::canonical(k, &av, lam).expect("invertible image of nonzero vector")
        }
    }
}

/// Matrix with columns e₁…e_g, f₁…f_g from hyperbolic pairs.
pub fn frame_matrix(pairs: &[(Vector, Vector)]) -> Matrix {
    let mut cols: Vec<Vector> = pairs.iter().map(|(e, _)| e.clone()).collect();
    cols.extend(pairs.iter().map(|(_, f)| f.clone()));
    Matrix::from_columns(&cols).expect("uniform length")
}

/// A symplectic transvection in canonical form: the direction is monic, so
/// (xv, x⁻²λ) and (v, λ) give the same value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transvection {
    Trivial,
    Nontrivial { direction: Vector, parameter: Elem },
}

impl Transvection {
    /// Canonical form of T_v[λ]: with v = c·m and m monic, T_v[λ] = T_m[c²λ].
    pub fn canonical(k: &Field, v: &[Elem], lambda: Elem) -> Result<Transvection, SymplecticError> {
        let (m, c) = monic(k, v).ok_or(SymplecticError::ZeroDirection)?;
        if lambda.is_zero() {
            return Ok(Transvection::Trivial);
        }
        Ok(Transvection::Nontrivial {
            direction: m,
            parameter: k.mul(k.mul(c, c), lambda),
        })
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Transvection::Trivial)
    }

    pub fn direction(&self) -> Option<&Vector> {
        match self {
            Transvection::Trivial => None,
            Transvection::Nontrivial { direction, .. } => Some(direction),
        }
    }

    pub fn parameter(&self) -> Elem {
        match self {
            Transvection::Trivial => Elem::ZERO,
            Transvection::Nontrivial { parameter, .. } => *parameter,
        }
    }

    pub fn matrix(&self, space: &SymplecticSpace) -> Matrix {
        match self {
            Transvection::Trivial => Matrix::identity(space.dim()),
            Transvection::Nontrivial {
                direction,
                parameter,
            } => space.transvection_matrix(direction, *parameter),
        }
    }
}
