//! Shared helpers and independent oracles for the integration suites.
//!
//! Everything here is deliberately naive — closed forms and brute-force
//! sampling that are slow but easy to trust — so the analytic code in the
//! library is checked against implementations that share none of its
//! machinery beyond basis enumeration.

#![allow(dead_code)]

use iocert::linalg::{kernel_basis, orthonormalize, Subspace};
use iocert::model::{Model, DEFAULT_MAX_COMPONENTS};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic generator: one seed, independent streams per instance.
pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform direction on the unit sphere of ℝⁿ.
pub fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let g = gaussian_vector(n, rng);
        let norm = g.norm();
        if norm > 1e-9 {
            return g / norm;
        }
    }
}

/// Gaussian vector supported on exactly `k` uniformly chosen coordinates.
pub fn sparse_vector(n: usize, k: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let support = rand::seq::index::sample(rng, n, k);
    let mut x = DVector::zeros(n);
    for i in support {
        x[i] = rng.sample::<f64, _>(StandardNormal);
    }
    x
}

/// Union of `count` random one-dimensional subspaces of ℝⁿ (so every
/// difference component has dimension at most two).
pub fn random_line_union(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Model {
    let lines = (0..count)
        .map(|_| {
            orthonormalize(&[unit_vector(n, rng)], 1e-12).expect("a unit vector spans a line")
        })
        .collect::<Vec<Subspace>>();
    Model::ExplicitUoS(lines)
}

/// Closed-form k-support norm: the atomic norm whose atoms are unit-norm
/// k-sparse vectors.
///
/// With a = |x| sorted decreasingly and suffix sums T_r = Σ_{i≥k−r−1} a_i,
/// the squared norm is min over r ∈ {0,…,k−1} with (r+1)·a_{k−r−1} ≤ T_r of
/// Σ_{i<k−r−1} a_i² + T_r²/(r+1): each feasible r induces an admissible
/// weight vector in the variational form ‖x‖² = min_{0<θ≤1, Σθ≤k} Σ x_i²/θ_i,
/// and the optimal r is always feasible, so the minimum is exact.
pub fn k_support_norm(x: &DVector<f64>, k: usize) -> f64 {
    let n = x.len();
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.partial_cmp(p).expect("finite entries"));
    let mut suffix = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + a[j];
    }
    let mut best = f64::INFINITY;
    for r in 0..k {
        let head_len = k - r - 1;
        let tail = suffix[head_len];
        let avg = tail / (r as f64 + 1.0);
        let feasible = avg >= a[head_len] - 1e-12 * (1.0 + avg);
        if !feasible {
            continue;
        }
        let head: f64 = a[..head_len].iter().map(|v| v * v).sum();
        best = best.min((head + tail * tail / (r as f64 + 1.0)).sqrt());
    }
    assert!(best.is_finite(), "some split is always feasible");
    best
}

/// Random-search oracle for the optimal ℓ²/ℓ² null-space constant.
///
/// Samples unit directions h in ker M; for each h the best difference-set
/// correlation is computed exactly as max over components W of ‖Q_Wᵀ h‖
/// (the inner maximization over z ∈ W has this closed form), implemented as
/// a small quadratic form per component. The result is an inner bound of
/// the true supremum that converges as the sample count grows, and it
/// shares no principal-angle code with the library.
pub fn random_search_d_star(m: &DMatrix<f64>, model: &Model, samples: usize, seed: u64) -> f64 {
    let kernel = kernel_basis(m, 1e-10);
    let kdim = kernel.dim();
    if kdim == 0 {
        return 0.0;
    }
    let comps = model
        .difference_components(DEFAULT_MAX_COMPONENTS)
        .expect("enumerable difference set");
    // Gram matrices G_W = (Q_Wᵀ K)ᵀ (Q_Wᵀ K): for unit u, uᵀ G_W u = ‖Q_Wᵀ h‖²
    // with h = K u.
    let grams: Vec<DMatrix<f64>> = comps
        .iter()
        .map(|c| {
            let p = c.space.basis().transpose() * kernel.basis();
            p.transpose() * p
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = DVector::zeros(kdim);
    let mut gu = DVector::zeros(kdim);
    let mut best_c2: f64 = 0.0;
    for _ in 0..samples {
        for i in 0..kdim {
            u[i] = rng.sample::<f64, _>(StandardNormal);
        }
        let norm = u.norm();
        if norm < 1e-12 {
            continue;
        }
        u /= norm;
        for g in &grams {
            gu.gemv(1.0, g, &u, 0.0);
            let c2 = u.dot(&gu);
            if c2 > best_c2 {
                best_c2 = c2;
            }
        }
    }
    if best_c2 >= 1.0 - 1e-12 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - best_c2).sqrt()
    }
}
