//! Feasibility certificates for a measurement operator against a model.
//!
//! The quantities computed here answer "can any decoder work with this M":
//!
//! - the optimal ℓ²/ℓ² null space constant D*, from principal angles
//!   between ker M and the difference components of the model;
//! - generalized restricted isometry constants (α, β) on the model set or
//!   its difference set;
//! - frame constants and the dimension / constant lower bounds they imply;
//! - sampled null-space-property checks with planted worst directions;
//! - alternating-maximization estimates for low-rank models, always
//!   reported as flagged bounds rather than exact values.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Error;
use crate::linalg::{
    kernel_basis, principal_correlation, principal_pair, Subspace, DEFAULT_RANK_TOL,
};
use crate::model::{Model, DEFAULT_MAX_COMPONENTS};
use crate::norms::m_distance_to_spans;
use crate::Result;

/// Correlations this close to 1 report an infinite NSP constant.
pub const CORRELATION_ONE_TOL: f64 = 1e-12;

/// Slack beyond which a sampled inequality counts as violated.
pub const NSP_VIOLATION_TOL: f64 = 1e-9;

/// Unit-norm tolerance for frame vector input.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Restart and iteration budget for alternating low-rank estimation.
const ESTIMATE_RESTARTS: usize = 24;
const ESTIMATE_ITERS: usize = 400;
const ESTIMATE_SEED: u64 = 0x10CE_4714;

/// 1/√(1−c²) with the infinity convention at c ≈ 1.
fn d_from_correlation(c: f64) -> f64 {
    if c >= 1.0 - CORRELATION_ONE_TOL {
        f64::INFINITY
    } else {
        1.0 / (1.0 - c * c).sqrt()
    }
}

/// Optimal ℓ²/ℓ² null space constant.
#[derive(Debug, Clone)]
pub struct NspConstant {
    /// Smallest D with ‖h‖₂ ≤ D·d₂(h, Σ−Σ) for all h ∈ ker M; +∞ when the
    /// kernel meets the difference set nontrivially, 0 for a trivial kernel.
    pub d_star: f64,
    /// Largest principal correlation between ker M and a difference
    /// component.
    pub correlation: f64,
    /// Component pair attaining the correlation.
    pub worst_pair: Option<(usize, usize)>,
    /// True when the value is an alternating-maximization lower bound
    /// (low-rank models) rather than an exact component maximum.
    pub estimate: bool,
}

/// Computes the optimal NSP constant D* = max over difference components W
/// of 1/√(1 − c²) with c the principal correlation between ker M and W.
///
/// Exact (to factorization tolerance) for models with enumerable difference
/// components; low-rank models delegate to
/// [`lowrank_correlation_estimate`] and flag the result as a lower bound.
/// `seed` feeds only that estimation path.
pub fn nsp_constant_l2(
    m: &DMatrix<f64>,
    model: &Model,
    rank_tol: f64,
    seed: u64,
) -> Result<NspConstant> {
    model.validate()?;
    if m.ncols() != model.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "nsp_constant_l2",
            expected: model.ambient_dim(),
            found: m.ncols(),
        });
    }
    let kernel = kernel_basis(m, rank_tol);
    if kernel.dim() == 0 {
        return Ok(NspConstant {
            d_star: 0.0,
            correlation: 0.0,
            worst_pair: None,
            estimate: false,
        });
    }
    if let Model::LowRank { n1, n2, r } = model {
        let est = lowrank_correlation_estimate(m, *n1, *n2, *r, ESTIMATE_RESTARTS, seed)?;
        return Ok(NspConstant {
            d_star: est.d_star,
            correlation: est.correlation,
            worst_pair: None,
            estimate: true,
        });
    }
    let diffs = model.difference_components(DEFAULT_MAX_COMPONENTS)?;
    let correlations: Vec<f64> = diffs
        .par_iter()
        .map(|comp| principal_correlation(&kernel, &comp.space))
        .collect::<Result<_>>()?;
    let mut correlation = 0.0;
    let mut worst_pair = None;
    for (comp, c) in diffs.iter().zip(&correlations) {
        if *c > correlation {
            correlation = *c;
            worst_pair = Some(comp.pair);
        }
    }
    Ok(NspConstant {
        d_star: d_from_correlation(correlation),
        correlation,
        worst_pair,
        estimate: false,
    })
}

/// Which set the restricted isometry constants are taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentSet {
    /// The model Σ itself.
    Model,
    /// The difference set Σ−Σ.
    Difference,
}

/// Generalized restricted isometry constants.
#[derive(Debug, Clone)]
pub struct RipConstants {
    /// min over components W of σ_min(M·Q_W); every z in the set obeys
    /// alpha·‖z‖ ≤ ‖Mz‖. +∞ when the set is {0}.
    pub alpha: f64,
    /// max over components of σ_max(M·Q_W); ‖Mz‖ ≤ beta·‖z‖.
    pub beta: f64,
    /// True when alternating estimation was used (low-rank models); alpha is
    /// then an upper bound on the true constant and beta a lower bound.
    pub estimate: bool,
}

/// Computes (α, β) with α·‖z‖₂ ≤ ‖Mz‖₂ ≤ β·‖z‖₂ for every z in the chosen
/// set, as extreme singular values of M restricted to each component.
pub fn rip_constants(m: &DMatrix<f64>, model: &Model, on: ComponentSet) -> Result<RipConstants> {
    model.validate()?;
    if m.ncols() != model.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "rip_constants",
            expected: model.ambient_dim(),
            found: m.ncols(),
        });
    }
    if let Model::LowRank { n1, n2, r } = model {
        let cap = (*n1).min(*n2);
        let t = match on {
            ComponentSet::Model => (*r).min(cap),
            ComponentSet::Difference => (2 * r).min(cap),
        };
        return lowrank_rip_estimate(m, *n1, *n2, t);
    }
    let spans: Vec<Subspace> = match on {
        ComponentSet::Model => model.enumerate_components(DEFAULT_MAX_COMPONENTS)?,
        ComponentSet::Difference => model
            .difference_components(DEFAULT_MAX_COMPONENTS)?
            .into_iter()
            .map(|c| c.space)
            .collect(),
    };
    let extremes: Vec<(f64, f64)> = spans
        .par_iter()
        .filter(|s| s.dim() > 0)
        .map(|s| {
            let sigma = (m * s.basis()).svd(false, false).singular_values;
            let lo = sigma.iter().cloned().fold(f64::MAX, f64::min);
            let hi = sigma.iter().cloned().fold(0.0, f64::max);
            // A wide restriction (more columns than rows) has a kernel even
            // when every listed singular value is positive.
            let lo = if s.dim() > m.nrows() { 0.0 } else { lo };
            (lo, hi)
        })
        .collect();
    if extremes.is_empty() {
        return Ok(RipConstants {
            alpha: f64::INFINITY,
            beta: 0.0,
            estimate: false,
        });
    }
    let alpha = extremes.iter().map(|e| e.0).fold(f64::MAX, f64::min);
    let beta = extremes.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(RipConstants {
        alpha,
        beta,
        estimate: false,
    })
}

/// Frame constant of a vector family restricted to a subspace.
#[derive(Debug, Clone)]
pub struct FrameConstant {
    /// Largest K with Σ_i ⟨z_i, x⟩² ≥ K‖x‖₂² for all x in the subspace.
    pub k: f64,
    /// Unit vector in the subspace attaining the constant.
    pub witness: DVector<f64>,
}

/// Smallest eigenvalue of the frame operator Σ z_i z_iᵀ restricted to `v`,
/// together with a minimizing unit witness.
pub fn frame_constant(vectors: &[DVector<f64>], v: &Subspace) -> Result<FrameConstant> {
    if v.dim() == 0 {
        return Err(Error::invalid("frame_constant needs a nontrivial subspace"));
    }
    let n = v.ambient_dim();
    for (index, z) in vectors.iter().enumerate() {
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                context: "frame_constant",
                expected: n,
                found: z.len(),
            });
        }
        let norm = z.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitVector { index, norm });
        }
    }
    let mut s = DMatrix::zeros(n, n);
    for z in vectors {
        s += z * z.transpose();
    }
    let mut restricted = v.basis().transpose() * s * v.basis();
    let rt = restricted.transpose();
    restricted = (restricted + rt) * 0.5;
    let eig = restricted.symmetric_eigen();
    let mut arg = 0;
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[arg] {
            arg = i;
        }
    }
    let witness = v.basis() * eig.eigenvectors.column(arg).into_owned();
    Ok(FrameConstant {
        k: eig.eigenvalues[arg].max(0.0),
        witness: &witness / witness.norm(),
    })
}

/// Minimum output dimension any D-instance-optimal scheme needs on an
/// n-dimensional space whose difference set contains a K-frame:
/// ⌈n·(1 − (1 − 1/D²)/K)⌉, clamped at 0.
pub fn min_measurements(n: usize, k: f64, d_star: f64) -> Result<usize> {
    if k <= 0.0 {
        return Err(Error::invalid(format!("frame constant must be positive, got {k}")));
    }
    if d_star < 1.0 {
        return Err(Error::invalid(format!(
            "min_measurements needs d_star >= 1, got {d_star}"
        )));
    }
    let shrink = if d_star.is_infinite() {
        1.0
    } else {
        1.0 - 1.0 / (d_star * d_star)
    };
    let value = (n as f64) * (1.0 - shrink / k);
    if value <= 0.0 {
        return Ok(0);
    }
    // Guard: values that are integral up to roundoff must not cross up.
    Ok((value - 1e-12 * value.max(1.0)).ceil() as usize)
}

/// Lower bound on the constant of any ℓ²/ℓ² instance-optimal decoder with m
/// measurements: 1/√(1 − K(1 − m/n)); +∞ once K(1 − m/n) ≥ 1.
pub fn io_constant_lower_bound(n: usize, m_rows: usize, k: f64) -> Result<f64> {
    if m_rows == 0 || m_rows > n {
        return Err(Error::invalid(format!(
            "io_constant_lower_bound needs 0 < m <= n, got m={m_rows}, n={n}"
        )));
    }
    if k <= 0.0 {
        return Err(Error::invalid(format!("frame constant must be positive, got {k}")));
    }
    let t = k * (1.0 - m_rows as f64 / n as f64);
    if t >= 1.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / (1.0 - t).sqrt())
    }
}

/// Which distance enters the right-hand side of a robust NSP check.
#[derive(Debug, Clone, Copy)]
pub enum DistanceKind {
    /// Euclidean distance to the difference set.
    Euclidean,
    /// Measurement-aware distance ‖·‖₂ + (1/alpha)‖M·‖₂ to the difference
    /// set.
    MeasurementNorm { alpha: f64 },
}

/// Inequality to verify by sampling.
#[derive(Debug, Clone, Copy)]
pub enum NspMode {
    /// ‖h‖₂ ≤ d·d₂(h, Σ−Σ) over h ∈ ker M.
    Plain { d: f64 },
    /// ‖h‖₂ ≤ d1·dist(h, Σ−Σ) + d2·‖Mh‖₂ over h in the full space.
    Robust {
        d1: f64,
        d2: f64,
        distance: DistanceKind,
    },
}

/// Outcome of a sampled NSP verification.
#[derive(Debug, Clone)]
pub struct NspCheck {
    /// Total vectors tested (requested samples plus planted directions).
    pub samples: usize,
    /// Largest observed ‖h‖ / RHS.
    pub max_ratio: f64,
    /// Count of h with ‖h‖ > RHS + 1e−9.
    pub violations: usize,
    /// Vector attaining the max ratio.
    pub worst: Option<DVector<f64>>,
}

/// Verifies an NSP inequality on random unit vectors plus planted
/// worst-case directions (principal kernel/component pairs and the flattest
/// measurement direction inside each component).
pub fn nsp_check(
    m: &DMatrix<f64>,
    model: &Model,
    mode: NspMode,
    samples: usize,
    seed: u64,
    rank_tol: f64,
) -> Result<NspCheck> {
    model.validate()?;
    let n = model.ambient_dim();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "nsp_check",
            expected: n,
            found: m.ncols(),
        });
    }
    match mode {
        NspMode::Plain { d } if !d.is_finite() => {
            return Err(Error::invalid("nsp_check needs finite constants"))
        }
        NspMode::Robust { d1, d2, .. } if !d1.is_finite() || !d2.is_finite() => {
            return Err(Error::invalid("nsp_check needs finite constants"))
        }
        _ => {}
    }
    let kernel = kernel_basis(m, rank_tol);

    // Exact Euclidean distance to Σ−Σ: per-component projection residual for
    // enumerable models, singular value tail for low-rank cones.
    enum DiffGeometry {
        Spans(Vec<Subspace>),
        RankTail { n1: usize, n2: usize, t: usize },
    }
    let geometry = match model {
        Model::LowRank { n1, n2, r } => DiffGeometry::RankTail {
            n1: *n1,
            n2: *n2,
            t: (2 * r).min((*n1).min(*n2)),
        },
        _ => DiffGeometry::Spans(
            model
                .difference_components(DEFAULT_MAX_COMPONENTS)?
                .into_iter()
                .map(|c| c.space)
                .collect(),
        ),
    };
    let euclid_dist = |h: &DVector<f64>| -> f64 {
        match &geometry {
            DiffGeometry::Spans(spans) => {
                let mut best = h.norm();
                for w in spans {
                    best = best.min(w.distance(h));
                }
                best
            }
            DiffGeometry::RankTail { n1, n2, t } => {
                let mat = DMatrix::from_row_slice(*n1, *n2, h.as_slice());
                let sigma = mat.svd(false, false).singular_values;
                let mut tail = 0.0;
                for i in *t..sigma.len() {
                    tail += sigma[i] * sigma[i];
                }
                tail.sqrt()
            }
        }
    };
    let dist = |h: &DVector<f64>| -> Result<f64> {
        match mode {
            NspMode::Plain { .. } => Ok(euclid_dist(h)),
            NspMode::Robust { distance, .. } => match distance {
                DistanceKind::Euclidean => Ok(euclid_dist(h)),
                DistanceKind::MeasurementNorm { alpha } => match &geometry {
                    DiffGeometry::Spans(spans) => {
                        m_distance_to_spans(h, spans, m, alpha, DEFAULT_M_TOL)
                    }
                    DiffGeometry::RankTail { .. } => Err(Error::UnsupportedKind {
                        op: "nsp_check with measurement-norm distance",
                        kind: model.kind_name(),
                    }),
                },
            },
        }
    };
    const DEFAULT_M_TOL: f64 = 1e-10;

    // Planted directions.
    let mut planted: Vec<DVector<f64>> = Vec::new();
    match &geometry {
        DiffGeometry::Spans(spans) => {
            for w in spans {
                if w.dim() == 0 {
                    continue;
                }
                if kernel.dim() > 0 {
                    let (h, _, _) = principal_pair(&kernel, w)?;
                    planted.push(h);
                }
                if matches!(mode, NspMode::Robust { .. }) {
                    // Flattest measurement direction inside the component.
                    let mq = m * w.basis();
                    let svd = mq.svd(false, true);
                    let vt = svd.v_t.as_ref().expect("svd with v");
                    let mut arg = 0;
                    for i in 0..svd.singular_values.len() {
                        if svd.singular_values[i] < svd.singular_values[arg] {
                            arg = i;
                        }
                    }
                    planted.push(w.basis() * vt.row(arg).transpose());
                }
            }
        }
        DiffGeometry::RankTail { n1, n2, .. } => {
            if kernel.dim() > 0 {
                if let Model::LowRank { r, .. } = model {
                    let est =
                        lowrank_correlation_estimate(m, *n1, *n2, *r, ESTIMATE_RESTARTS, seed)?;
                    if est.kernel_direction.norm() > 0.0 {
                        planted.push(est.kernel_direction);
                    }
                }
            }
        }
    }

    let sample_h = |index: usize| -> DVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64 + 1);
        let raw: DVector<f64> = match mode {
            NspMode::Plain { .. } => {
                if kernel.dim() == 0 {
                    return DVector::zeros(n);
                }
                let g = DVector::from_fn(kernel.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
                kernel.basis() * g
            }
            NspMode::Robust { .. } => {
                DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
            }
        };
        let norm = raw.norm();
        if norm > 0.0 {
            raw / norm
        } else {
            raw
        }
    };

    let mut all: Vec<DVector<f64>> = planted;
    all.extend((0..samples).map(sample_h));

    let evaluated: Vec<Result<(f64, bool)>> = all
        .par_iter()
        .map(|h| {
            let lhs = h.norm();
            if lhs == 0.0 {
                return Ok((0.0, false));
            }
            let rhs = match mode {
                NspMode::Plain { d } => d * dist(h)?,
                NspMode::Robust { d1, d2, .. } => d1 * dist(h)? + d2 * (m * h).norm(),
            };
            let ratio = if rhs > 0.0 {
                lhs / rhs
            } else if lhs <= NSP_VIOLATION_TOL {
                1.0
            } else {
                f64::INFINITY
            };
            Ok((ratio, lhs > rhs + NSP_VIOLATION_TOL))
        })
        .collect();

    let mut max_ratio = 0.0;
    let mut violations = 0;
    let mut worst = None;
    for (h, entry) in all.iter().zip(evaluated) {
        let (ratio, violated) = entry?;
        if violated {
            violations += 1;
        }
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = Some(h.clone());
        }
    }
    Ok(NspCheck {
        samples: all.len(),
        max_ratio,
        violations,
        worst,
    })
}

/// Alternating-maximization bound for low-rank models.
#[derive(Debug, Clone)]
pub struct LowRankCorrelation {
    /// Certified lower bound on sup ⟨h, z⟩ over unit h ∈ ker M and unit z
    /// of rank ≤ 2r (every iterate is feasible).
    pub correlation: f64,
    /// Induced lower bound on D*.
    pub d_star: f64,
    /// Kernel vector attaining the reported correlation.
    pub kernel_direction: DVector<f64>,
}

/// Estimates the kernel / rank-2r-cone correlation by alternating between
/// the best rank-2r truncation of the current kernel vector and the kernel
/// projection of the current cone vector. Each step is a linear
/// maximization, so the correlation ascends monotonically; restarts guard
/// against poor basins.
pub fn lowrank_correlation_estimate(
    m: &DMatrix<f64>,
    n1: usize,
    n2: usize,
    r: usize,
    restarts: usize,
    seed: u64,
) -> Result<LowRankCorrelation> {
    let n = n1 * n2;
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "lowrank_correlation_estimate",
            expected: n,
            found: m.ncols(),
        });
    }
    if r == 0 || r > n1.min(n2) {
        return Err(Error::invalid(format!(
            "rank bound must satisfy 1 <= r <= min(n1, n2), got {r}"
        )));
    }
    let kernel = kernel_basis(m, DEFAULT_RANK_TOL);
    if kernel.dim() == 0 {
        return Ok(LowRankCorrelation {
            correlation: 0.0,
            d_star: 0.0,
            kernel_direction: DVector::zeros(n),
        });
    }
    let t = (2 * r).min(n1.min(n2));
    let truncate = |h: &DVector<f64>| -> Option<DVector<f64>> {
        let mat = DMatrix::from_row_slice(n1, n2, h.as_slice());
        let svd = mat.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[j]
                .partial_cmp(&svd.singular_values[i])
                .expect("finite singular values")
        });
        let mut out = DMatrix::zeros(n1, n2);
        for &i in order.iter().take(t) {
            out += u.column(i) * svd.singular_values[i] * vt.row(i);
        }
        let norm = out.norm();
        if norm == 0.0 {
            return None;
        }
        Some(DVector::from_row_slice((out / norm).transpose().as_slice()))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<DVector<f64>> = (0..kernel.dim())
        .map(|i| kernel.basis().column(i).into_owned())
        .collect();
    for _ in 0..restarts {
        let g = DVector::from_fn(kernel.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let h = kernel.basis() * g;
        let norm = h.norm();
        if norm > 0.0 {
            starts.push(h / norm);
        }
    }

    let mut best_c = 0.0;
    let mut best_h = DVector::zeros(n);
    for start in starts {
        let mut h = start;
        let mut last = 0.0;
        for _ in 0..ESTIMATE_ITERS {
            let Some(z) = truncate(&h) else { break };
            let hp = kernel.project(&z);
            let c = hp.norm();
            if c <= 0.0 {
                break;
            }
            h = hp / c;
            if c - last <= 1e-13 {
                last = c;
                break;
            }
            last = c;
        }
        if last > best_c {
            best_c = last;
            best_h = h;
        }
    }
    let correlation = best_c.clamp(0.0, 1.0);
    Ok(LowRankCorrelation {
        correlation,
        d_star: d_from_correlation(correlation),
        kernel_direction: best_h,
    })
}

/// Alternating estimates of restricted isometry constants on a rank cone:
/// beta from ascent on ⟨z, MᵀMz⟩, alpha from ascent on the complementary
/// shifted form. Beta is a lower bound, alpha an upper bound.
fn lowrank_rip_estimate(m: &DMatrix<f64>, n1: usize, n2: usize, t: usize) -> Result<RipConstants> {
    let n = n1 * n2;
    if t == 0 {
        return Ok(RipConstants {
            alpha: f64::INFINITY,
            beta: 0.0,
            estimate: true,
        });
    }
    let gram = m.transpose() * m;
    let sigma_max2 = {
        let sigma = m.clone().svd(false, false).singular_values;
        sigma.iter().cloned().fold(0.0, f64::max).powi(2)
    };
    let shift = sigma_max2 + 1.0;
    let shifted = DMatrix::identity(n, n) * shift - &gram;

    let ascend = |a: &DMatrix<f64>, seed: u64| -> f64 {
        let truncate = |v: &DVector<f64>| -> Option<DVector<f64>> {
            let mat = DMatrix::from_row_slice(n1, n2, v.as_slice());
            let svd = mat.svd(true, true);
            let u = svd.u.as_ref().expect("svd with u");
            let vt = svd.v_t.as_ref().expect("svd with v");
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&i, &j| {
                svd.singular_values[j]
                    .partial_cmp(&svd.singular_values[i])
                    .expect("finite singular values")
            });
            let mut out = DMatrix::zeros(n1, n2);
            for &i in order.iter().take(t) {
                out += u.column(i) * svd.singular_values[i] * vt.row(i);
            }
            let norm = out.norm();
            if norm == 0.0 {
                return None;
            }
            Some(DVector::from_row_slice((out / norm).transpose().as_slice()))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eig = {
            let sym = (a + a.transpose()) * 0.5;
            let decomp = sym.symmetric_eigen();
            let mut arg = 0;
            for i in 0..decomp.eigenvalues.len() {
                if decomp.eigenvalues[i] > decomp.eigenvalues[arg] {
                    arg = i;
                }
            }
            decomp.eigenvectors.column(arg).into_owned()
        };
        let mut starts = vec![eig];
        for _ in 0..ESTIMATE_RESTARTS {
            starts.push(DVector::from_fn(n, |_, _| {
                rng.sample::<f64, _>(StandardNormal)
            }));
        }
        let mut best: f64 = 0.0;
        for start in starts {
            let Some(mut z) = truncate(&start) else { continue };
            let mut value = (z.transpose() * a * &z)[(0, 0)];
            for _ in 0..ESTIMATE_ITERS {
                let Some(next) = truncate(&(a * &z)) else { break };
                let v_next = (next.transpose() * a * &next)[(0, 0)];
                let stalled = v_next <= value + 1e-13;
                z = next;
                value = v_next.max(value);
                if stalled {
                    break;
                }
            }
            best = best.max(value);
        }
        best
    };

    let beta2 = ascend(&gram, ESTIMATE_SEED);
    let alpha2 = (shift - ascend(&shifted, ESTIMATE_SEED ^ 0xA5A5)).max(0.0);
    Ok(RipConstants {
        alpha: alpha2.sqrt(),
        beta: beta2.sqrt(),
        estimate: true,
    })
}

/// Assembled feasibility certificate for (M, model).
#[derive(Debug, Clone)]
pub struct CertReport {
    /// Optimal ℓ²/ℓ² NSP constant (0 for trivial kernel, +∞ when the kernel
    /// meets the difference set).
    pub d_star: f64,
    /// Correlation behind d_star.
    pub correlation: f64,
    /// Lower restricted isometry constant on Σ−Σ.
    pub alpha: f64,
    /// Upper restricted isometry constant on Σ.
    pub beta: f64,
    /// Frame constant of the canonical basis (coordinate-support models
    /// where it lies inside Σ−Σ).
    pub frame_k: Option<f64>,
    /// Dimension lower bound implied by d_star and frame_k.
    pub m_lower_bound: Option<usize>,
    /// Difference component pair attaining d_star.
    pub worst_pair: Option<(usize, usize)>,
    /// Relative rank tolerance used for kernel extraction.
    pub rank_tol: f64,
    /// True when any reported value is a flagged bound, not exact.
    pub estimate: bool,
}

/// Runs the full certification pipeline: D*, RIP constants on Σ−Σ and Σ,
/// and for coordinate-support models the canonical-basis frame constant
/// with its implied measurement lower bound.
pub fn certify(m: &DMatrix<f64>, model: &Model, rank_tol: f64, seed: u64) -> Result<CertReport> {
    let nsp = nsp_constant_l2(m, model, rank_tol, seed)?;
    let diff = rip_constants(m, model, ComponentSet::Difference)?;
    let on_model = rip_constants(m, model, ComponentSet::Model)?;
    let (frame_k, m_lower_bound) = match model {
        Model::KSparse { n, .. } | Model::BlockSparse { n, .. } => {
            let canonical: Vec<DVector<f64>> = (0..*n)
                .map(|i| {
                    let mut e = DVector::zeros(*n);
                    e[i] = 1.0;
                    e
                })
                .collect();
            let full = crate::linalg::span_of(&DMatrix::identity(*n, *n), rank_tol);
            let frame = frame_constant(&canonical, &full)?;
            let lower = if nsp.d_star >= 1.0 {
                Some(min_measurements(*n, frame.k, nsp.d_star)?)
            } else {
                None
            };
            (Some(frame.k), lower)
        }
        _ => (None, None),
    };
    Ok(CertReport {
        d_star: nsp.d_star,
        correlation: nsp.correlation,
        alpha: diff.alpha,
        beta: on_model.beta,
        frame_k,
        m_lower_bound,
        worst_pair: nsp.worst_pair,
        rank_tol,
        estimate: nsp.estimate || diff.estimate || on_model.estimate,
    })
}
