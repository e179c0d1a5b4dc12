//! End-to-end clustering pipelines and evaluation.
//!
//! `cluster_sdp` builds the squared-distance weight matrix, solves the Max
//! k-Cut relaxation, and rounds with either scheme; `kmeans` is the Lloyd
//! baseline with k-means++ seeding; `rand_index` scores agreement between two
//! partitions. `max_kcut_brute_force` gives exact optima at small n for
//! oracle checks.

use rand::Rng;

use crate::elliptope::cut_weight_matrix_form;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::partition::{cut_weight, Partition};
use crate::rng::{self, stream};
use crate::rounding::{self, RoundingParams, RoundingTrace};
use crate::sdp::{self, SolveStatus, SolverParams};

/// Rounding scheme selector for the SDP pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpMethod {
    FixedPoint,
    Randomized,
}

/// Which pipeline produced a `ClusterResult`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SdpFixedPoint,
    SdpRandomized,
    KMeans,
}

/// Parameters for the SDP pipeline.
#[derive(Debug, Clone)]
pub struct SdpPipelineParams {
    /// Controls for the relaxation solve. The T' solves inside fixed point
    /// rounding use `rounding.solver` instead; those are warm-started and
    /// much better conditioned, so the two are worth setting independently
    /// on large instances.
    pub solver: SolverParams,
    pub rounding: RoundingParams,
    /// Trial count for the randomized arm (best-of-trials).
    pub trials: usize,
    /// Seed for the randomized arm.
    pub seed: u64,
}

impl Default for SdpPipelineParams {
    fn default() -> Self {
        SdpPipelineParams {
            solver: SolverParams::default(),
            rounding: RoundingParams::default(),
            trials: 50,
            seed: 0,
        }
    }
}

impl SdpPipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        self.solver.validate()?;
        self.rounding.validate()
    }
}

/// Solver-side summary kept in diagnostics.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub iterations: usize,
    pub status: SolveStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Relaxation weight ((k-1)/2k)(1-X)·M at the solver output; an upper
    /// bound (up to solver tolerance) on any partition's cut weight.
    pub relaxation_weight: f64,
}

/// Method-specific diagnostics carried by a `ClusterResult`.
#[derive(Debug, Clone)]
pub enum Diagnostics {
    SdpFixedPoint {
        solve: SolveSummary,
        trace: RoundingTrace,
    },
    SdpRandomized {
        solve: SolveSummary,
        trials: usize,
    },
    KMeans {
        restarts: usize,
        /// Sum of squared distances to assigned centers.
        objective: f64,
    },
}

#[derive(Debug, Clone)]
pub struct ClusterResult {
    pub partition: Partition,
    /// `cut_weight(partition, M)` for the instance's weight matrix.
    pub cut_weight: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// `M_ij = ‖x_i − x_j‖²` with zero diagonal.
pub fn pairwise_sq_dist_weights(points: &[Vec<f64>]) -> Result<SymMatrix> {
    validate_points(points)?;
    Ok(SymMatrix::from_fn(points.len(), |i, j| {
        sq_dist(&points[i], &points[j])
    }))
}

/// SDP pipeline on points: squared-distance weights, relaxation solve,
/// rounding by `method`.
pub fn cluster_sdp(
    points: &[Vec<f64>],
    k: usize,
    method: SdpMethod,
    params: &SdpPipelineParams,
) -> Result<ClusterResult> {
    let m = pairwise_sq_dist_weights(points)?;
    cluster_sdp_weights(&m, k, method, params)
}

/// SDP pipeline on an explicit weight matrix (negative weights allowed).
///
/// The relaxation `argmax ((k−1)/2k)(1−X)·M` is solved as `argmax (−M)·X`;
/// the dropped constant and scale do not move the argmax and the reported
/// weights are computed in the original scale.
pub fn cluster_sdp_weights(
    m: &SymMatrix,
    k: usize,
    method: SdpMethod,
    params: &SdpPipelineParams,
) -> Result<ClusterResult> {
    params.validate()?;
    if k < 2 || m.n() < k {
        return Err(Error::invalid(format!(
            "cluster_sdp requires n >= k >= 2 (n = {}, k = {k})",
            m.n()
        )));
    }
    if !m.is_finite() {
        return Err(Error::invalid("weight matrix has non-finite entries"));
    }

    let c = m.scaled(-1.0);
    let sol = sdp::solve_linear(&c, k, &params.solver)?;
    let solve = SolveSummary {
        iterations: sol.iterations,
        status: sol.status,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        relaxation_weight: cut_weight_matrix_form(&sol.x, m, k)?,
    };

    match method {
        SdpMethod::FixedPoint => {
            let trace = rounding::fixed_point_round(&sol.x, k, &params.rounding)?;
            let partition = trace
                .partition
                .clone()
                .ok_or_else(|| Error::Numerical("rounding produced no partition".into()))?;
            let weight = cut_weight(&partition, m)?;
            Ok(ClusterResult {
                partition,
                cut_weight: weight,
                method: Method::SdpFixedPoint,
                diagnostics: Diagnostics::SdpFixedPoint { solve, trace },
            })
        }
        SdpMethod::Randomized => {
            let (partition, weight) =
                rounding::randomized_round(&sol.x, k, params.trials, params.seed, m)?;
            Ok(ClusterResult {
                partition,
                cut_weight: weight,
                method: Method::SdpRandomized,
                diagnostics: Diagnostics::SdpRandomized {
                    solve,
                    trials: params.trials,
                },
            })
        }
    }
}

/// k-means baseline wrapped as a `ClusterResult`; the cut weight is scored
/// against the squared-distance matrix so methods are directly comparable.
pub fn cluster_kmeans(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let m = pairwise_sq_dist_weights(points)?;
    let (partition, objective) = kmeans(points, k, restarts, seed)?;
    let weight = cut_weight(&partition, &m)?;
    Ok(ClusterResult {
        partition,
        cut_weight: weight,
        method: Method::KMeans,
        diagnostics: Diagnostics::KMeans {
            restarts,
            objective,
        },
    })
}

/// Lloyd's algorithm with k-means++ seeding, best objective over `restarts`
/// independent runs. Each restart draws from its own RNG substream, so the
/// result does not depend on evaluation order.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Partition, f64)> {
    validate_points(points)?;
    let n = points.len();
    if k < 1 || k > n {
        return Err(Error::invalid(format!(
            "kmeans requires n >= k >= 1 (n = {n}, k = {k})"
        )));
    }
    if restarts < 1 {
        return Err(Error::invalid("kmeans requires restarts >= 1"));
    }
    let mut best: Option<(Partition, f64)> = None;
    for restart in 0..restarts {
        let mut run_rng = rng::substream(seed, stream::KMEANS_BASE + restart as u64);
        let (labels, objective, _) = lloyd(points, k, &mut run_rng);
        if best.as_ref().is_none_or(|(_, obj)| objective < *obj) {
            best = Some((Partition::new(labels, k)?, objective));
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Fraction of element pairs on which the two partitions agree (same block
/// in both, or different blocks in both), computed from the contingency
/// table.
pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::dims(format!(
            "rand_index: partitions cover {} and {} elements",
            a.n(),
            b.n()
        )));
    }
    let n = a.n();
    if n < 2 {
        return Err(Error::invalid("rand_index requires n >= 2"));
    }
    let (ka, kb) = (a.k(), b.k());
    let mut cells = vec![0u64; ka * kb];
    let mut rows = vec![0u64; ka];
    let mut cols = vec![0u64; kb];
    for i in 0..n {
        cells[a.label(i) * kb + b.label(i)] += 1;
        rows[a.label(i)] += 1;
        cols[b.label(i)] += 1;
    }
    let choose2 = |m: u64| if m < 2 { 0.0 } else { (m * (m - 1) / 2) as f64 };
    let total = choose2(n as u64);
    let together_both: f64 = cells.iter().map(|&m| choose2(m)).sum();
    let together_a: f64 = rows.iter().map(|&m| choose2(m)).sum();
    let together_b: f64 = cols.iter().map(|&m| choose2(m)).sum();
    Ok((total - together_a - together_b + 2.0 * together_both) / total)
}

/// Exhaustive Max k-Cut over every partition of `[n]` into at most k blocks.
/// Only feasible at small n; intended for oracle checks.
pub fn max_kcut_brute_force(m: &SymMatrix, k: usize) -> Result<(Partition, f64)> {
    if k < 1 {
        return Err(Error::invalid("max_kcut_brute_force requires k >= 1"));
    }
    let mut best: Option<(Partition, f64)> = None;
    for p in Partition::enumerate(m.n(), k) {
        let w = cut_weight(&p, m)?;
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((p, w));
        }
    }
    Ok(best.expect("enumeration is nonempty"))
}

fn validate_points(points: &[Vec<f64>]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one point"));
    }
    let d = points[0].len();
    if d == 0 {
        return Err(Error::invalid("points must have dimension >= 1"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(Error::dims(format!(
                "point {i} has dimension {}, expected {d}",
                p.len()
            )));
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One seeded Lloyd run; returns labels, final objective, and the objective
/// after every assignment (for monotonicity checks).
fn lloyd(points: &[Vec<f64>], k: usize, run_rng: &mut impl Rng) -> (Vec<usize>, f64, Vec<f64>) {
    let mut centers = kmeanspp_centers(points, k, run_rng);
    let mut labels = assign(points, &centers);
    let mut history = vec![objective(points, &centers, &labels)];
    for _ in 0..300 {
        update_centers(points, k, &labels, &mut centers);
        let next = assign(points, &centers);
        history.push(objective(points, &centers, &next));
        if next == labels {
            break;
        }
        labels = next;
    }
    let obj = *history.last().expect("history is nonempty");
    (labels, obj, history)
}

fn kmeanspp_centers(points: &[Vec<f64>], k: usize, run_rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[run_rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = run_rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining points sit on existing centers.
            run_rng.random_range(0..n)
        };
        centers.push(points[idx].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, centers.last().expect("nonempty")));
        }
    }
    centers
}

fn assign(points: &[Vec<f64>], centers: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut label = 0;
            let mut best = f64::INFINITY;
            for (j, c) in centers.iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best {
                    best = d;
                    label = j;
                }
            }
            label
        })
        .collect()
}

fn update_centers(points: &[Vec<f64>], k: usize, labels: &[usize], centers: &mut [Vec<f64>]) {
    let d = points[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for (s, dst) in sums[c].iter_mut().zip(centers[c].iter_mut()) {
                *dst = *s / counts[c] as f64;
            }
        }
    }
    // Re-seed each empty cluster at the point farthest from its current
    // center; such points are the worst-served and moving an unused center
    // there cannot raise the objective.
    let mut taken = vec![false; points.len()];
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut far_idx = 0;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let dist = sq_dist(p, &centers[labels[i]]);
            if dist > far_d {
                far_d = dist;
                far_idx = i;
            }
        }
        centers[c] = points[far_idx].clone();
        taken[far_idx] = true;
    }
}

fn objective(points: &[Vec<f64>], centers: &[Vec<f64>], labels: &[usize]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_from_points() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 0.0]];
        let m = pairwise_sq_dist_weights(&pts).unwrap();
        assert_eq!(m.get(0, 1), 25.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(1, 1), 0.0);

        let bad = vec![vec![0.0], vec![f64::NAN]];
        assert!(pairwise_sq_dist_weights(&bad).is_err());
        let ragged = vec![vec![0.0], vec![0.0, 1.0]];
        assert!(pairwise_sq_dist_weights(&ragged).is_err());
    }

    #[test]
    fn kmeans_edge_cases() {
        let pts = vec![vec![0.0], vec![1.0], vec![5.0], vec![6.0]];
        // k = 1: objective is total squared deviation from the mean (= 3).
        let mean = 3.0;
        let expect: f64 = pts.iter().map(|p| (p[0] - mean) * (p[0] - mean)).sum();
        let (p1, obj1) = kmeans(&pts, 1, 3, 0).unwrap();
        assert_eq!(p1.block_count(), 1);
        assert!((obj1 - expect).abs() < 1e-12);

        // k = n: all singletons, objective 0.
        let (p4, obj4) = kmeans(&pts, 4, 3, 0).unwrap();
        assert_eq!(p4.block_count(), 4);
        assert_eq!(obj4, 0.0);

        assert!(kmeans(&pts, 5, 1, 0).is_err());
        assert!(kmeans(&pts, 2, 0, 0).is_err());
    }

    #[test]
    fn kmeans_objective_history_is_non_increasing() {
        let mut gen_rng = rng::substream(3, 77);
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                (0..3)
                    .map(|_| gen_rng.random_range(-1.0..1.0))
                    .collect::<Vec<f64>>()
            })
            .collect();
        for restart in 0..5 {
            let mut run_rng = rng::substream(9, stream::KMEANS_BASE + restart);
            let (_, _, history) = lloyd(&pts, 4, &mut run_rng);
            for w in history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()));
            }
        }
    }

    #[test]
    fn kmeans_is_deterministic() {
        let pts = vec![
            vec![0.0, 0.1],
            vec![0.1, -0.1],
            vec![5.0, 5.2],
            vec![5.1, 4.9],
        ];
        let a = kmeans(&pts, 2, 4, 11).unwrap();
        let b = kmeans(&pts, 2, 4, 11).unwrap();
        assert!(a.0.same_clustering(&b.0));
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn rand_index_examples() {
        let a = Partition::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(rand_index(&a, &a).unwrap(), 1.0);

        let one = Partition::new(vec![0, 0, 0, 0], 1).unwrap();
        assert_eq!(rand_index(&a, &one).unwrap(), 0.0);

        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let q = Partition::new(vec![0, 1, 1, 1], 2).unwrap();
        assert_eq!(rand_index(&p, &q).unwrap(), 0.5);
        assert_eq!(rand_index(&q, &p).unwrap(), 0.5);

        let short = Partition::new(vec![0], 1).unwrap();
        assert!(rand_index(&short, &short).is_err());
        assert!(rand_index(&a, &Partition::new(vec![0, 1], 2).unwrap()).is_err());
    }

    #[test]
    fn brute_force_two_blobs() {
        // Max 2-Cut on squared distances splits the two far groups.
        let pts = vec![vec![0.0], vec![0.2], vec![10.0], vec![10.1]];
        let m = pairwise_sq_dist_weights(&pts).unwrap();
        let (p, w) = max_kcut_brute_force(&m, 2).unwrap();
        assert!(p.same_clustering(&Partition::new(vec![0, 0, 1, 1], 2).unwrap()));
        assert!(w > 0.0);
    }
}
