//! Witness constructions certifying when dimensionality reduction is
//! impossible, plus small geometric demos:
//!
//! - [`spd_sparse_inverse_onb`]: the difference set of symmetric
//!   positive-definite matrices with (n+2)-sparse inverses contains an
//!   orthonormal basis of the symmetric matrices — built explicitly with
//!   analytic inverses as certificates.
//! - [`fourier_rank1_onb`]: rank-one outer products of discrete Fourier
//!   vectors form a complex orthonormal basis of maximally incoherent
//!   low-rank matrices.
//! - [`adversarial_pair`]: two points on one measurement fiber that force
//!   every decoder's error/distance ratio above √(D²−1).
//! - [`hyperbola_demo`]: distances from a line to the hyperbola branch
//!   {(s, 1/s) : s > 0} decrease strictly without attaining their infimum,
//!   showing why attainment slack belongs in decoder guarantees.

use nalgebra::{Complex, DMatrix, DVector};

use crate::decode::DecodeResult;
use crate::error::Error;
use crate::linalg::{kernel_basis, min_norm_solve, principal_correlation, principal_pair};
use crate::model::{Model, DEFAULT_MAX_COMPONENTS};
use crate::Result;

/// Entrywise tolerance on Gram and inverse certificates.
pub const WITNESS_CERT_TOL: f64 = 1e-12;

/// Orthonormal basis of symmetric n×n matrices realized as differences of
/// symmetric positive-definite matrices with sparse inverses.
#[derive(Debug, Clone)]
pub struct SpdOnb {
    pub n: usize,
    /// n(n+1)/2 orthonormal symmetric matrices: E_ii, then
    /// (E_ij + E_ji)/√2 for i < j.
    pub elements: Vec<DMatrix<f64>>,
    /// Pairs (z₁, z₂) of positive-definite sparse-inverse matrices with
    /// z₁ − z₂ equal to the corresponding element.
    pub pairs: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    /// Analytic inverse of each z₁.
    pub inverses: Vec<DMatrix<f64>>,
    /// Exact nonzero count of each inverse: n on the diagonal elements,
    /// n+2 on the off-diagonal ones.
    pub inverse_nonzeros: Vec<usize>,
    /// Smallest eigenvalue of each z₁ (positive definiteness certificate).
    pub min_eigenvalues: Vec<f64>,
    /// max |Gram − I| over entries of the vectorized elements.
    pub gram_error: f64,
    /// max over elements of ‖z₁·z₁⁻¹ − I‖∞.
    pub max_inverse_residual: f64,
}

impl SpdOnb {
    /// Row-major vectorizations of the basis elements (unit vectors in
    /// ℝ^{n²}), e.g. for frame-constant certification.
    pub fn vectorized(&self) -> Vec<DVector<f64>> {
        self.elements
            .iter()
            .map(|e| DVector::from_row_slice(e.transpose().as_slice()))
            .collect()
    }
}

fn unit_entry(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(n, n);
    e[(i, j)] = 1.0;
    e
}

fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let sym = (a + a.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Builds the symmetric-matrix orthonormal basis {E_ii, (E_ij+E_ji)/√2}
/// from within Σ−Σ, where Σ is the cone of symmetric positive-definite
/// matrices with sparse inverse:
///
/// - E_ii = B_i − I with B_i = I + E_ii and B_i⁻¹ = I − ½E_ii (n nonzeros);
/// - (E_ij+E_ji)/√2 = C_ij/√2 − √2·I with C_ij = 2I + E_ij + E_ji and
///   C_ij⁻¹ = ½I + ⅙(E_ii+E_jj) − ⅓(E_ij+E_ji) (n+2 nonzeros), the √2
///   rescaling staying inside the positive cone.
///
/// Every certificate (Gram rows, analytic inverses, eigenvalue positivity)
/// is computed and stored, not assumed.
pub fn spd_sparse_inverse_onb(n: usize) -> Result<SpdOnb> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "spd_sparse_inverse_onb needs n >= 2, got {n}"
        )));
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let sqrt2 = 2.0_f64.sqrt();

    let mut elements = Vec::new();
    let mut pairs = Vec::new();
    let mut inverses = Vec::new();

    for i in 0..n {
        let e_ii = unit_entry(n, i, i);
        let b = &identity + &e_ii;
        let b_inv = &identity - &e_ii * 0.5;
        elements.push(e_ii);
        pairs.push((b, identity.clone()));
        inverses.push(b_inv);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let sym_ij = unit_entry(n, i, j) + unit_entry(n, j, i);
            let c = &identity * 2.0 + &sym_ij;
            let c_inv = &identity * 0.5
                + (unit_entry(n, i, i) + unit_entry(n, j, j)) / 6.0
                - &sym_ij / 3.0;
            elements.push(&sym_ij / sqrt2);
            pairs.push((&c / sqrt2, &identity * sqrt2));
            inverses.push(&c_inv * sqrt2);
        }
    }

    let count = elements.len();
    let mut gram_error: f64 = 0.0;
    for p in 0..count {
        for q in 0..count {
            let target = if p == q { 1.0 } else { 0.0 };
            let dot = frobenius_dot(&elements[p], &elements[q]);
            gram_error = gram_error.max((dot - target).abs());
        }
    }

    let mut inverse_nonzeros = Vec::with_capacity(count);
    let mut min_eigenvalues = Vec::with_capacity(count);
    let mut max_inverse_residual: f64 = 0.0;
    for (idx, (z1, _)) in pairs.iter().enumerate() {
        inverse_nonzeros.push(inverses[idx].iter().filter(|v| **v != 0.0).count());
        min_eigenvalues.push(min_eigenvalue(z1));
        let residual = z1 * &inverses[idx] - &identity;
        max_inverse_residual = max_inverse_residual
            .max(residual.iter().cloned().fold(0.0, |acc, v| acc.max(v.abs())));
    }

    Ok(SpdOnb {
        n,
        elements,
        pairs,
        inverses,
        inverse_nonzeros,
        min_eigenvalues,
        gram_error,
        max_inverse_residual,
    })
}

/// Complex orthonormal basis of n1×n2 matrices made of rank-one outer
/// products of discrete Fourier vectors, with incoherence certificates.
#[derive(Debug, Clone)]
pub struct FourierOnb {
    pub n1: usize,
    pub n2: usize,
    /// n1·n2 matrices e_k f_ℓ*, every entry of modulus 1/√(n1·n2).
    pub elements: Vec<DMatrix<Complex<f64>>>,
    /// Witness pairs (element, 0): the basis sits inside the model itself,
    /// which contains the zero matrix.
    pub pairs: Vec<(DMatrix<Complex<f64>>, DMatrix<Complex<f64>>)>,
    /// max |⟨A_p, A_q⟩ − δ_pq| over the Hermitian Gram matrix.
    pub gram_error: f64,
    /// max deviation of any entry modulus from 1/√(n1·n2).
    pub modulus_error: f64,
    /// max_k ‖u_k‖∞ — equals √(1/n1), meeting the singular-vector
    /// incoherence condition with equality.
    pub u_inf: f64,
    /// max_ℓ ‖v_ℓ‖∞ — equals √(1/n2).
    pub v_inf: f64,
    /// max entry modulus of u_k v_ℓ* — equals √(1/(n1·n2)).
    pub uv_inf: f64,
}

impl FourierOnb {
    /// Realified vectorizations [Re; Im] (unit vectors in ℝ^{2·n1·n2});
    /// a complex ONB realifies to a real orthonormal family.
    pub fn realified(&self) -> Vec<DVector<f64>> {
        self.elements
            .iter()
            .map(|a| {
                let len = a.nrows() * a.ncols();
                let mut v = DVector::zeros(2 * len);
                for (idx, entry) in a.transpose().iter().enumerate() {
                    v[idx] = entry.re;
                    v[len + idx] = entry.im;
                }
                v
            })
            .collect()
    }
}

fn dft_vector(n: usize, k: usize) -> DVector<Complex<f64>> {
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |u, _| {
        let angle = 2.0 * std::f64::consts::PI * (u as f64) * (k as f64) / (n as f64);
        Complex::new(angle.cos() * scale, angle.sin() * scale)
    })
}

/// Builds the n1·n2 rank-one DFT outer products e_k f_ℓ* and certifies
/// orthonormality (Hermitian Gram = I), constant entry modulus, and the
/// two incoherence equalities at μ = r = 1.
pub fn fourier_rank1_onb(n1: usize, n2: usize) -> Result<FourierOnb> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid(format!(
            "fourier_rank1_onb needs n1, n2 >= 1, got {n1}x{n2}"
        )));
    }
    if n1 * n2 > DEFAULT_MAX_COMPONENTS {
        return Err(Error::ComponentOverflow {
            required: (n1 * n2) as u128,
            max: DEFAULT_MAX_COMPONENTS,
        });
    }
    let mut elements = Vec::with_capacity(n1 * n2);
    let mut u_inf: f64 = 0.0;
    let mut v_inf: f64 = 0.0;
    let mut uv_inf: f64 = 0.0;
    for k in 0..n1 {
        let u = dft_vector(n1, k);
        u_inf = u_inf.max(u.iter().map(|c| c.norm()).fold(0.0, f64::max));
        for l in 0..n2 {
            let v = dft_vector(n2, l);
            v_inf = v_inf.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
            // A = u v*  (outer product with the conjugated second factor)
            let a = DMatrix::from_fn(n1, n2, |r, c| u[r] * v[c].conj());
            uv_inf = uv_inf.max(a.iter().map(|c| c.norm()).fold(0.0, f64::max));
            elements.push(a);
        }
    }

    let target_modulus = 1.0 / ((n1 * n2) as f64).sqrt();
    let mut modulus_error: f64 = 0.0;
    for a in &elements {
        for entry in a.iter() {
            modulus_error = modulus_error.max((entry.norm() - target_modulus).abs());
        }
    }

    let mut gram_error: f64 = 0.0;
    for p in 0..elements.len() {
        for q in 0..elements.len() {
            let mut dot = Complex::new(0.0, 0.0);
            for (x, y) in elements[p].iter().zip(elements[q].iter()) {
                dot += x.conj() * y;
            }
            let target = if p == q { 1.0 } else { 0.0 };
            gram_error = gram_error.max((dot - Complex::new(target, 0.0)).norm());
        }
    }

    let zero = DMatrix::from_element(n1, n2, Complex::new(0.0, 0.0));
    let pairs = elements
        .iter()
        .map(|a| (a.clone(), zero.clone()))
        .collect();

    Ok(FourierOnb {
        n1,
        n2,
        elements,
        pairs,
        gram_error,
        modulus_error,
        u_inf,
        v_inf,
        uv_inf,
    })
}

/// Two model points and two perturbed fiber mates that force any decoder's
/// worst error/distance ratio to at least √(D²−1).
#[derive(Debug, Clone)]
pub struct AdversarialPair {
    /// Fiber mates: Mp₁ = Mp₂, each at distance ½·√(1−c²) from the model.
    pub p1: DVector<f64>,
    pub p2: DVector<f64>,
    /// Model points with z₁ − z₂ = z.
    pub z1: DVector<f64>,
    pub z2: DVector<f64>,
    /// √(D²−1): any decoder's error/distance ratio on one of the four
    /// points is at least this.
    pub ratio_bound: f64,
    /// Unit kernel direction achieving the correlation.
    pub h: DVector<f64>,
    /// Unit model-difference direction with ⟨h, z⟩ = correlation.
    pub z: DVector<f64>,
    /// Principal correlation c of the worst difference component; satisfies
    /// c² ≥ 1 − 1/D².
    pub correlation: f64,
    /// Component indices (i, j) of the difference subspace used.
    pub components: (usize, usize),
    /// ‖M(p₁ − p₂)‖₂ — the fiber identity, certified here.
    pub fiber_gap: f64,
}

/// Constructs the adversarial pair for a requested constant 1 < D < D*.
///
/// Takes the principal pair (h, z) between ker M and the most correlated
/// difference component (so ⟨h,z⟩² = c² ≥ 1 − 1/D²), splits z = z₁ − z₂ by
/// minimum-norm least squares over the two component bases, and reflects
/// the model points into the common fiber through p = (z₁+z₂)/2:
/// p₁ = p + P_ker(z/2), p₂ = p − P_ker(z/2). Then ‖p₁−p₂‖ = c while each
/// p_i sits within ½√(1−c²) of the model, so any single decode of their
/// shared measurement errs by ratio ≥ c/√(1−c²) ≥ √(D²−1) on one of them.
pub fn adversarial_pair(
    m: &DMatrix<f64>,
    model: &Model,
    d: f64,
    rank_tol: f64,
) -> Result<AdversarialPair> {
    if !(d > 1.0) {
        return Err(Error::invalid(format!(
            "adversarial_pair needs D > 1, got {d}"
        )));
    }
    model.validate()?;
    if m.ncols() != model.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "adversarial_pair",
            expected: model.ambient_dim(),
            found: m.ncols(),
        });
    }
    let kernel = kernel_basis(m, rank_tol);
    if kernel.dim() == 0 {
        return Err(Error::invalid(
            "adversarial_pair: M is injective; every D is achievable and no \
             adversarial direction exists",
        ));
    }
    let diffs = model.difference_components(DEFAULT_MAX_COMPONENTS)?;
    let mut worst: Option<(usize, f64)> = None;
    for (idx, diff) in diffs.iter().enumerate() {
        if diff.space.dim() == 0 {
            continue;
        }
        let c = principal_correlation(&kernel, &diff.space)?;
        if worst.map_or(true, |(_, best)| c > best) {
            worst = Some((idx, c));
        }
    }
    let (worst_idx, correlation) =
        worst.ok_or_else(|| Error::invalid("adversarial_pair: difference set is trivial"))?;
    let required = 1.0 - 1.0 / (d * d);
    if correlation * correlation + 1e-12 < required {
        return Err(Error::invalid(format!(
            "adversarial_pair needs D below the optimal constant: correlation² \
             {:.6e} < 1 − 1/D² = {required:.6e}",
            correlation * correlation
        )));
    }
    let (h, z, _) = principal_pair(&kernel, &diffs[worst_idx].space)?;

    let (i, j) = diffs[worst_idx].pair;
    let components = model.enumerate_components(DEFAULT_MAX_COMPONENTS)?;
    let (qi, qj) = (components[i].basis(), components[j].basis());
    let (di, dj) = (qi.ncols(), qj.ncols());
    let mut concat = DMatrix::zeros(m.ncols(), di + dj);
    concat.view_mut((0, 0), (m.ncols(), di)).copy_from(qi);
    concat
        .view_mut((0, di), (m.ncols(), dj))
        .copy_from(&(-qj));
    let coeff = min_norm_solve(&concat, &z, 1e-13);
    let z1 = qi * coeff.rows(0, di);
    let z2 = qj * coeff.rows(di, dj);
    if (&z1 - &z2 - &z).norm() > 1e-8 {
        return Err(Error::invalid(
            "adversarial_pair: direction does not split across the component \
             pair (inconsistent difference geometry)",
        ));
    }

    let p = (&z1 + &z2) * 0.5;
    let half_kernel_shift = kernel.basis() * (kernel.basis().transpose() * ((&z1 - &z2) * 0.5));
    let p1 = &p + &half_kernel_shift;
    let p2 = &p - &half_kernel_shift;
    let fiber_gap = (m * (&p1 - &p2)).norm();

    Ok(AdversarialPair {
        p1,
        p2,
        z1,
        z2,
        ratio_bound: (d * d - 1.0).sqrt(),
        h,
        z,
        correlation,
        components: (i, j),
        fiber_gap,
    })
}

/// Runs a decoder on the four adversarial points and returns the largest
/// error/distance ratio (∞ when a model point is not recovered exactly).
pub fn decoder_worst_ratio(
    pair: &AdversarialPair,
    m: &DMatrix<f64>,
    model: &Model,
    decoder: &dyn Fn(&DVector<f64>) -> Result<DecodeResult>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in [&pair.z1, &pair.z2, &pair.p1, &pair.p2] {
        let decoded = decoder(&(m * x))?;
        let err = (x - &decoded.x_hat).norm();
        let dist = model.project(x)?.distance;
        let ratio = if dist > 1e-12 {
            err / dist
        } else if err > 1e-9 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// Distance table from the horizontal line through (0, x2) to the
/// hyperbola branch {(s, 1/s) : s > 0}, sampled at abscissas `t_grid`.
///
/// For x2 < 0 the distances strictly decrease toward |x2| without ever
/// attaining it — the infimum over the measurement fiber is not a minimum,
/// which is exactly why decoder guarantees carry an attainment slack.
pub fn hyperbola_demo(x2: f64, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if t_grid.is_empty() {
        return Err(Error::invalid("hyperbola_demo needs a nonempty grid"));
    }
    for pair in t_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::invalid(
                "hyperbola_demo needs a strictly increasing grid",
            ));
        }
    }
    if t_grid[0] <= 0.0 {
        return Err(Error::invalid("hyperbola_demo needs positive abscissas"));
    }
    let table = t_grid
        .iter()
        .map(|&t| (t, hyperbola_distance(t, x2)))
        .collect();
    Ok(table)
}

/// min over s > 0 of hypot(t − s, x2 − 1/s): coarse log-spaced scan
/// followed by golden-section refinement around the best bracket.
fn hyperbola_distance(t: f64, x2: f64) -> f64 {
    let objective = |s: f64| (t - s).hypot(x2 - 1.0 / s);
    let lo: f64 = 1e-9;
    let hi: f64 = (10.0 * t).max(10.0 / x2.abs().max(1e-9)).max(10.0);
    let steps = 4000;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / steps as f64).exp())
        .collect();
    for (idx, &s) in grid.iter().enumerate() {
        let val = objective(s);
        if val < best_val {
            best_val = val;
            best_idx = idx;
        }
    }
    let a = grid[best_idx.saturating_sub(1)];
    let b = grid[(best_idx + 1).min(steps)];
    golden_min(&objective, a, b).min(best_val)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * (a.abs() + b.abs() + 1.0) {
            break;
        }
    }
    fc.min(fd)
}
