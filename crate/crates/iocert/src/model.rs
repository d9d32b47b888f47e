//! Union-of-subspaces models: sparse and block-sparse supports, explicit
//! subspace lists, low-rank matrices, and finite point clouds.
//!
//! A model Σ enters certification through two finite subspace lists: its own
//! components and the components covering the difference set Σ − Σ. For
//! support models both lists are exact (unions of coordinate subspaces); for
//! point clouds they cover the cone ℝΣ, which is what the homogeneous
//! certification quantities consume. Low-rank models have a continuum of
//! components and are deliberately excluded from enumeration; callers fall
//! back to the alternating estimators in [`crate::certify`].

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg::{subspace_sum, Subspace};
use crate::Result;

/// Cap on enumerated components; combinatorial models past this error out.
pub const DEFAULT_MAX_COMPONENTS: usize = 10_000;

/// Tie-break window for equally good projections: the lowest component index
/// wins among candidates within this distance of the best.
pub const PROJECTION_TIE_TOL: f64 = 1e-12;

/// Absolute membership tolerance for point clouds.
pub const POINT_CLOUD_TOL: f64 = 1e-9;

/// A low-dimensional signal model Σ ⊂ ℝⁿ.
#[derive(Debug, Clone)]
pub enum Model {
    /// Union of the given subspaces.
    ExplicitUoS(Vec<Subspace>),
    /// Vectors with at most `k` nonzero entries out of `n`.
    KSparse { n: usize, k: usize },
    /// Vectors supported on at most `k` of the given index blocks.
    BlockSparse {
        n: usize,
        blocks: Vec<Vec<usize>>,
        k: usize,
    },
    /// n1×n2 matrices of rank at most `r`, vectorized row-major.
    LowRank { n1: usize, n2: usize, r: usize },
    /// A finite set of points.
    PointCloud(Vec<DVector<f64>>),
}

/// Best model approximation of a vector.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// Nearest model point found.
    pub point: DVector<f64>,
    /// ℓ² distance from the input to `point`.
    pub distance: f64,
    /// Index of the component containing `point`, when components are
    /// enumerable (`None` for low-rank models).
    pub component: Option<usize>,
}

/// One covering component of Σ − Σ, tagged with the pair of model
/// components whose difference it covers.
#[derive(Debug, Clone)]
pub struct DiffComponent {
    pub space: Subspace,
    /// Indices into `enumerate_components` output with pair.0 <= pair.1.
    pub pair: (usize, usize),
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Lexicographic rank of a sorted k-subset of {0, …, n−1}.
fn combination_rank(subset: &[usize], n: usize) -> usize {
    let k = subset.len();
    let mut rank: u128 = 0;
    let mut prev: usize = 0;
    for (pos, &idx) in subset.iter().enumerate() {
        for skipped in prev..idx {
            rank += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = idx + 1;
    }
    rank as usize
}

/// Subspace of vectors supported on the given (sorted) coordinate set.
fn support_subspace(n: usize, support: &[usize]) -> Subspace {
    let mut basis = DMatrix::zeros(n, support.len());
    for (col, &idx) in support.iter().enumerate() {
        basis[(idx, col)] = 1.0;
    }
    Subspace::from_orthonormal(basis).expect("canonical columns are orthonormal")
}

impl Model {
    /// Ambient dimension of the signal space (n1·n2 for matrices).
    pub fn ambient_dim(&self) -> usize {
        match self {
            Model::ExplicitUoS(spaces) => spaces.first().map_or(0, |s| s.ambient_dim()),
            Model::KSparse { n, .. } => *n,
            Model::BlockSparse { n, .. } => *n,
            Model::LowRank { n1, n2, .. } => n1 * n2,
            Model::PointCloud(points) => points.first().map_or(0, |p| p.len()),
        }
    }

    /// Short lowercase kind tag, matching the JSON schema.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::ExplicitUoS(_) => "uos",
            Model::KSparse { .. } => "ksparse",
            Model::BlockSparse { .. } => "blocksparse",
            Model::LowRank { .. } => "lowrank",
            Model::PointCloud(_) => "pointcloud",
        }
    }

    /// Structural sanity checks; call once after construction or parsing.
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::ExplicitUoS(spaces) => {
                if spaces.is_empty() {
                    return Err(Error::invalid("uos model needs at least one subspace"));
                }
                let n = spaces[0].ambient_dim();
                if spaces.iter().any(|s| s.ambient_dim() != n) {
                    return Err(Error::invalid("uos subspaces have mixed ambient dims"));
                }
            }
            Model::KSparse { n, k } => {
                if *k == 0 || *k > *n {
                    return Err(Error::invalid(format!(
                        "ksparse needs 1 <= k <= n, got k={k}, n={n}"
                    )));
                }
            }
            Model::BlockSparse { n, blocks, k } => {
                if *k == 0 || *k > blocks.len() {
                    return Err(Error::invalid(format!(
                        "blocksparse needs 1 <= k <= {} blocks, got k={k}",
                        blocks.len()
                    )));
                }
                let mut seen = vec![false; *n];
                for block in blocks {
                    if block.is_empty() {
                        return Err(Error::invalid("blocksparse has an empty block"));
                    }
                    for &idx in block {
                        if idx >= *n {
                            return Err(Error::invalid(format!(
                                "block index {idx} out of range for n={n}"
                            )));
                        }
                        if seen[idx] {
                            return Err(Error::invalid(format!(
                                "block index {idx} appears twice"
                            )));
                        }
                        seen[idx] = true;
                    }
                }
                if seen.iter().any(|&s| !s) {
                    return Err(Error::invalid("blocks do not cover every index"));
                }
            }
            Model::LowRank { n1, n2, r } => {
                if *r == 0 || *r > (*n1).min(*n2) {
                    return Err(Error::invalid(format!(
                        "lowrank needs 1 <= r <= min(n1, n2), got r={r}, n1={n1}, n2={n2}"
                    )));
                }
            }
            Model::PointCloud(points) => {
                if points.is_empty() {
                    return Err(Error::invalid("pointcloud needs at least one point"));
                }
                let n = points[0].len();
                if points.iter().any(|p| p.len() != n) {
                    return Err(Error::invalid("pointcloud points have mixed dims"));
                }
                if points.iter().flat_map(|p| p.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("pointcloud contains non-finite entries"));
                }
            }
        }
        Ok(())
    }

    /// Reshapes a vectorized n1×n2 matrix (row-major).
    pub fn matricize(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        match self {
            Model::LowRank { n1, n2, .. } => {
                if x.len() != n1 * n2 {
                    return Err(Error::DimensionMismatch {
                        context: "matricize",
                        expected: n1 * n2,
                        found: x.len(),
                    });
                }
                Ok(DMatrix::from_row_slice(*n1, *n2, x.as_slice()))
            }
            _ => Err(Error::UnsupportedKind {
                op: "matricize",
                kind: self.kind_name(),
            }),
        }
    }

    /// The subspace components whose union contains Σ (the cone ℝΣ for
    /// point clouds). Deterministic order; errors when the count exceeds
    /// `max_count` or the model has no finite component list.
    pub fn enumerate_components(&self, max_count: usize) -> Result<Vec<Subspace>> {
        self.validate()?;
        match self {
            Model::ExplicitUoS(spaces) => {
                Self::check_count(spaces.len() as u128, max_count)?;
                Ok(dedupe_spans(spaces.clone()))
            }
            Model::KSparse { n, k } => {
                Self::check_count(binomial(*n, *k), max_count)?;
                Ok((0..*n)
                    .combinations(*k)
                    .map(|support| support_subspace(*n, &support))
                    .collect())
            }
            Model::BlockSparse { n, blocks, k } => {
                Self::check_count(binomial(blocks.len(), *k), max_count)?;
                Ok((0..blocks.len())
                    .combinations(*k)
                    .map(|chosen| {
                        let mut support: Vec<usize> = chosen
                            .iter()
                            .flat_map(|&b| blocks[b].iter().copied())
                            .collect();
                        support.sort_unstable();
                        support_subspace(*n, &support)
                    })
                    .collect())
            }
            Model::LowRank { .. } => Err(Error::UnsupportedKind {
                op: "enumerate_components",
                kind: self.kind_name(),
            }),
            Model::PointCloud(points) => {
                Self::check_count(points.len() as u128, max_count)?;
                let spans: Vec<Subspace> = points
                    .iter()
                    .map(|p| {
                        if p.norm() == 0.0 {
                            Subspace::zero(p.len())
                        } else {
                            Subspace::from_orthonormal(DMatrix::from_column_slice(
                                p.len(),
                                1,
                                p.normalize().as_slice(),
                            ))
                            .expect("normalized column")
                        }
                    })
                    .collect();
                Ok(dedupe_spans(spans))
            }
        }
    }

    /// Maximal subspace components covering Σ − Σ, each labeled with a
    /// generating pair of model components. For support models this is the
    /// exact union of min(2k, n)-sized supports; for explicit unions and
    /// point clouds it is the pruned list of pairwise sums.
    pub fn difference_components(&self, max_count: usize) -> Result<Vec<DiffComponent>> {
        self.validate()?;
        match self {
            Model::KSparse { n, k } => {
                let width = (2 * *k).min(*n);
                Self::check_count(binomial(*n, width), max_count)?;
                Ok((0..*n)
                    .combinations(width)
                    .map(|support| {
                        let pair = (
                            combination_rank(&support[..*k], *n),
                            combination_rank(&support[width - *k..], *n),
                        );
                        DiffComponent {
                            space: support_subspace(*n, &support),
                            pair,
                        }
                    })
                    .collect())
            }
            Model::BlockSparse { n, blocks, k } => {
                let width = (2 * *k).min(blocks.len());
                Self::check_count(binomial(blocks.len(), width), max_count)?;
                Ok((0..blocks.len())
                    .combinations(width)
                    .map(|chosen| {
                        let pair = (
                            combination_rank(&chosen[..*k], blocks.len()),
                            combination_rank(&chosen[width - *k..], blocks.len()),
                        );
                        let mut support: Vec<usize> = chosen
                            .iter()
                            .flat_map(|&b| blocks[b].iter().copied())
                            .collect();
                        support.sort_unstable();
                        DiffComponent {
                            space: support_subspace(*n, &support),
                            pair,
                        }
                    })
                    .collect())
            }
            Model::ExplicitUoS(_) | Model::PointCloud(_) => {
                let components = self.enumerate_components(max_count)?;
                let count = components.len() as u128;
                Self::check_count(count * (count + 1) / 2, max_count)?;
                let mut sums = Vec::new();
                for i in 0..components.len() {
                    for j in i..components.len() {
                        sums.push(DiffComponent {
                            space: subspace_sum(&components[i], &components[j])?,
                            pair: (i, j),
                        });
                    }
                }
                Ok(prune_to_maximal(sums))
            }
            Model::LowRank { .. } => Err(Error::UnsupportedKind {
                op: "difference_components",
                kind: self.kind_name(),
            }),
        }
    }

    /// Best approximation of `x` inside Σ.
    pub fn project(&self, x: &DVector<f64>) -> Result<ProjectionResult> {
        self.validate()?;
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "project_model",
                expected: self.ambient_dim(),
                found: x.len(),
            });
        }
        match self {
            Model::KSparse { n, k } => {
                // Hard threshold: keep the k largest magnitudes, lower index
                // winning ties, which is the exact Euclidean projection.
                let mut order: Vec<usize> = (0..*n).collect();
                order.sort_by(|&i, &j| {
                    x[j].abs()
                        .partial_cmp(&x[i].abs())
                        .expect("finite entries")
                        .then(i.cmp(&j))
                });
                let mut support: Vec<usize> = order[..*k].to_vec();
                support.sort_unstable();
                let mut point = DVector::zeros(*n);
                for &idx in &support {
                    point[idx] = x[idx];
                }
                let distance = (x - &point).norm();
                Ok(ProjectionResult {
                    point,
                    distance,
                    component: Some(combination_rank(&support, *n)),
                })
            }
            Model::BlockSparse { n, blocks, k } => {
                let energies: Vec<f64> = blocks
                    .iter()
                    .map(|block| block.iter().map(|&i| x[i] * x[i]).sum::<f64>())
                    .collect();
                let mut order: Vec<usize> = (0..blocks.len()).collect();
                order.sort_by(|&a, &b| {
                    energies[b]
                        .partial_cmp(&energies[a])
                        .expect("finite entries")
                        .then(a.cmp(&b))
                });
                let mut chosen: Vec<usize> = order[..*k].to_vec();
                chosen.sort_unstable();
                let mut point = DVector::zeros(*n);
                for &b in &chosen {
                    for &idx in &blocks[b] {
                        point[idx] = x[idx];
                    }
                }
                let distance = (x - &point).norm();
                Ok(ProjectionResult {
                    point,
                    distance,
                    component: Some(combination_rank(&chosen, blocks.len())),
                })
            }
            Model::ExplicitUoS(_) => {
                let components = self.enumerate_components(usize::MAX)?;
                let mut best: Option<(usize, DVector<f64>, f64)> = None;
                for (idx, space) in components.iter().enumerate() {
                    let point = space.project(x);
                    let distance = (x - &point).norm();
                    let better = match &best {
                        None => true,
                        Some((_, _, best_d)) => distance < best_d - PROJECTION_TIE_TOL,
                    };
                    if better {
                        best = Some((idx, point, distance));
                    }
                }
                let (component, point, distance) = best.expect("uos has components");
                Ok(ProjectionResult {
                    point,
                    distance,
                    component: Some(component),
                })
            }
            Model::LowRank { n1, n2, r } => {
                let mat = self.matricize(x)?;
                let svd = mat.svd(true, true);
                let u = svd.u.as_ref().expect("svd with u");
                let v_t = svd.v_t.as_ref().expect("svd with v");
                let rank = (*r).min(*n1).min(*n2);
                let mut truncated = DMatrix::zeros(*n1, *n2);
                for i in 0..rank {
                    let scaled = u.column(i) * svd.singular_values[i];
                    truncated += scaled * v_t.row(i);
                }
                let tail: f64 = svd
                    .singular_values
                    .iter()
                    .skip(rank)
                    .map(|s| s * s)
                    .sum::<f64>()
                    .sqrt();
                let point = DVector::from_row_slice(truncated.transpose().as_slice());
                Ok(ProjectionResult {
                    point,
                    distance: tail,
                    component: None,
                })
            }
            Model::PointCloud(points) => {
                let mut best = (0usize, f64::MAX);
                for (idx, p) in points.iter().enumerate() {
                    let d = (x - p).norm();
                    if d < best.1 - PROJECTION_TIE_TOL {
                        best = (idx, d);
                    }
                }
                Ok(ProjectionResult {
                    point: points[best.0].clone(),
                    distance: best.1,
                    component: Some(best.0),
                })
            }
        }
    }

    /// ℓ² distance from `x` to Σ.
    pub fn distance(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }

    /// Membership check at the model's native tolerance (absolute 1e−9 for
    /// point clouds, `tol` elsewhere).
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        let tol = match self {
            Model::PointCloud(_) => POINT_CLOUD_TOL,
            _ => tol,
        };
        Ok(self.distance(x)? <= tol)
    }

    fn check_count(required: u128, max_count: usize) -> Result<()> {
        if required > max_count as u128 {
            return Err(Error::ComponentOverflow {
                required,
                max: max_count,
            });
        }
        Ok(())
    }
}

/// Removes exact duplicates (mutual containment), keeping first occurrences.
fn dedupe_spans(spaces: Vec<Subspace>) -> Vec<Subspace> {
    let mut kept: Vec<Subspace> = Vec::with_capacity(spaces.len());
    for s in spaces {
        let duplicate = kept
            .iter()
            .any(|k| k.dim() == s.dim() && k.contains(&s, 1e-9));
        if !duplicate {
            kept.push(s);
        }
    }
    kept
}

/// Keeps only components not strictly contained in another; equal spans keep
/// the earliest generating pair.
fn prune_to_maximal(items: Vec<DiffComponent>) -> Vec<DiffComponent> {
    let mut keep = vec![true; items.len()];
    for a in 0..items.len() {
        for b in 0..items.len() {
            if a == b {
                continue;
            }
            if items[b].space.contains(&items[a].space, 1e-9) {
                let equal = items[a].space.contains(&items[b].space, 1e-9);
                if !equal || b < a {
                    keep[a] = false;
                    break;
                }
            }
        }
    }
    items
        .into_iter()
        .zip(keep)
        .filter_map(|(item, k)| k.then_some(item))
        .collect()
}
