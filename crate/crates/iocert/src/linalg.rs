//! Dense subspace primitives: orthonormal bases, kernels, sums, principal
//! correlations, and nearest points in affine sets.
//!
//! Every subspace is carried as an explicit orthonormal basis, so distances
//! and correlations reduce to small SVDs of coefficient matrices. The zero
//! subspace is first class (an n×0 basis), which keeps unions of subspaces
//! containing {0} unexceptional.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::Result;

/// Relative rank cutoff: singular values ≤ tol · σ_max are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A linear subspace of ℝⁿ, stored as an orthonormal basis (columns).
///
/// Invariant: `basis.transpose() * basis == I` within 1e−10 per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Zero subspace of ℝⁿ.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        let gram = basis.transpose() * &basis;
        let dim = basis.ncols();
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > 1e-10 {
                    return Err(Error::invalid(format!(
                        "basis columns not orthonormal: gram[{i},{j}] = {:.3e}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Subspace { basis })
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Subspace dimension (number of basis columns).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis, one column per dimension.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(self.ambient_dim());
        }
        &self.basis * (self.basis.transpose() * x)
    }

    /// ℓ² distance from `x` to the subspace.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Whether every direction of `other` lies in `self` (within `tol` per
    /// basis column).
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        if other.dim() > self.dim() {
            return false;
        }
        for j in 0..other.dim() {
            let q = other.basis.column(j).into_owned();
            if self.distance(&q) > tol {
                return false;
            }
        }
        true
    }
}

/// Orthonormal basis for the span of the given vectors.
///
/// Rank is decided by singular values relative to the largest one; the
/// returned basis spans the same space the inputs do. Deterministic for a
/// fixed input.
pub fn orthonormalize(vectors: &[DVector<f64>], tol: f64) -> Result<Subspace> {
    let n = match vectors.first() {
        Some(v) => v.len(),
        None => return Err(Error::invalid("orthonormalize needs at least one vector")),
    };
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                context: "orthonormalize",
                expected: n,
                found: vectors[i].len(),
            });
        }
    }
    let mat = DMatrix::from_columns(vectors);
    Ok(span_of(&mat, tol))
}

/// Orthonormal basis of the column span of `mat`.
pub fn span_of(mat: &DMatrix<f64>, tol: f64) -> Subspace {
    let n = mat.nrows();
    if n == 0 || mat.ncols() == 0 {
        return Subspace::zero(n);
    }
    let svd = mat.clone().svd(true, false);
    let sigma = &svd.singular_values;
    let sigma_max = sigma.max();
    if !(sigma_max > 0.0) {
        return Subspace::zero(n);
    }
    let rank = sigma.iter().filter(|&&s| s > tol * sigma_max).count();
    let u = svd.u.expect("svd requested u");
    Subspace {
        basis: u.columns(0, rank).into_owned(),
    }
}

/// Orthonormal basis of ker M = {h : Mh = 0}.
///
/// Built as the orthogonal complement of the row space, so each returned
/// column satisfies ‖M q‖ ≤ tol · ‖M‖ even when m ≪ n.
pub fn kernel_basis(m: &DMatrix<f64>, tol: f64) -> Subspace {
    let n = m.ncols();
    if n == 0 {
        return Subspace::zero(0);
    }
    if m.nrows() == 0 {
        return Subspace {
            basis: DMatrix::identity(n, n),
        };
    }
    let row_space = span_of(&m.transpose(), tol);
    complement(&row_space)
}

/// Orthogonal complement of a subspace inside its ambient space.
pub fn complement(space: &Subspace) -> Subspace {
    let n = space.ambient_dim();
    let r = space.dim();
    if r == 0 {
        return Subspace {
            basis: DMatrix::identity(n, n),
        };
    }
    if r >= n {
        return Subspace::zero(n);
    }
    // I − QQᵀ has eigenvalues exactly {0, 1}; the λ=1 eigenvectors are the
    // complement. Well conditioned regardless of how M was scaled.
    let mut a = DMatrix::identity(n, n) - space.basis() * space.basis().transpose();
    // Symmetrize to shield the eigensolver from roundoff asymmetry.
    let at = a.transpose();
    a = (a + at) * 0.5;
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("eigenvalues are finite")
    });
    let cols: Vec<DVector<f64>> = order[..n - r]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Subspace {
        basis: DMatrix::from_columns(&cols),
    }
}

/// Smallest subspace containing both arguments.
pub fn subspace_sum(u: &Subspace, w: &Subspace) -> Result<Subspace> {
    if u.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "subspace_sum",
            expected: u.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    let n = u.ambient_dim();
    let total = u.dim() + w.dim();
    if total == 0 {
        return Ok(Subspace::zero(n));
    }
    let mut stacked = DMatrix::zeros(n, total);
    stacked.columns_mut(0, u.dim()).copy_from(u.basis());
    stacked.columns_mut(u.dim(), w.dim()).copy_from(w.basis());
    Ok(span_of(&stacked, DEFAULT_RANK_TOL))
}

/// Largest correlation sup { ⟨u, w⟩ : u ∈ U, w ∈ W, ‖u‖ = ‖w‖ = 1 },
/// i.e. the cosine of the smallest principal angle. Zero when either
/// subspace is trivial; clamped into [0, 1].
pub fn principal_correlation(u: &Subspace, w: &Subspace) -> Result<f64> {
    if u.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "principal_correlation",
            expected: u.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    if u.dim() == 0 || w.dim() == 0 {
        return Ok(0.0);
    }
    let product = u.basis().transpose() * w.basis();
    let sigma = product.svd(false, false).singular_values;
    Ok(sigma.max().clamp(0.0, 1.0))
}

/// Unit vectors attaining the largest correlation between two subspaces:
/// returns (u, w, c) with u ∈ U, w ∈ W, ‖u‖ = ‖w‖ = 1 and ⟨u, w⟩ = c the
/// cosine of the smallest principal angle.
pub fn principal_pair(u: &Subspace, w: &Subspace) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    if u.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "principal_pair",
            expected: u.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    if u.dim() == 0 || w.dim() == 0 {
        return Err(Error::invalid(
            "principal_pair needs two nontrivial subspaces",
        ));
    }
    let product = u.basis().transpose() * w.basis();
    let svd = product.svd(true, true);
    let mut arg = 0;
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] > svd.singular_values[arg] {
            arg = i;
        }
    }
    let left = svd.u.as_ref().expect("svd with u").column(arg).into_owned();
    let right = svd
        .v_t
        .as_ref()
        .expect("svd with v")
        .row(arg)
        .transpose()
        .into_owned();
    let c = svd.singular_values[arg].clamp(0.0, 1.0);
    Ok((u.basis() * left, w.basis() * right, c))
}

/// Nearest point of the affine set x + N to the subspace W.
///
/// Returns (z, dist) with z ∈ x + N, dist = d(z, W) = d(x + N, W). The
/// infimum is attained: minimizing ‖x − f − g‖ over f ∈ N, g ∈ W is a
/// linear least-squares problem on the stacked bases, solved by
/// pseudo-inverse so intersecting N and W stay well posed.
pub fn nearest_in_affine(
    x: &DVector<f64>,
    n_space: &Subspace,
    w: &Subspace,
) -> Result<(DVector<f64>, f64)> {
    let n = x.len();
    if n_space.ambient_dim() != n || w.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            context: "nearest_in_affine",
            expected: n,
            found: if n_space.ambient_dim() != n {
                n_space.ambient_dim()
            } else {
                w.ambient_dim()
            },
        });
    }
    let p = n_space.dim();
    let q = w.dim();
    if p + q == 0 {
        return Ok((x.clone(), x.norm()));
    }
    let mut stacked = DMatrix::zeros(n, p + q);
    stacked.columns_mut(0, p).copy_from(n_space.basis());
    stacked.columns_mut(p, q).copy_from(w.basis());
    let coeffs = min_norm_solve(&stacked, x, DEFAULT_RANK_TOL);
    let f = if p > 0 {
        n_space.basis() * coeffs.rows(0, p).into_owned()
    } else {
        DVector::zeros(n)
    };
    let residual = x - &stacked * &coeffs;
    let z = x - f;
    Ok((z, residual.norm()))
}

/// Minimum-norm least-squares solution of A c ≈ b via SVD pseudo-inverse.
pub(crate) fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let sigma_max = if svd.singular_values.len() > 0 {
        svd.singular_values.max()
    } else {
        0.0
    };
    let eps = if sigma_max > 0.0 { tol * sigma_max } else { f64::MAX };
    svd.solve(b, eps).expect("svd.solve with u and v computed")
}
