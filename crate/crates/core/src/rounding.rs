//! Rounding schemes for relaxation solutions.
//!
//! The deterministic scheme iterates `X_{t+1} = T'(X_t)` where
//! `T'(X) = argmax_{Y} (X + A)·Y` over the k-way elliptope and `A` is the
//! constant shift matrix with entry `a = (1 - k/2)/(k - 1)`. The clustering
//! energy `f(X) = (X + A)·(X + A)` is non-decreasing along the iteration and
//! is maximized exactly at the k-partition matrices, which are attractive
//! fixed points of `T'`. The randomized scheme factors `X` into unit vectors
//! and assigns each to the closest of k random directions.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::elliptope;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SymMatrix;
use crate::partition::{cut_weight, Partition};
use crate::rng::{self, stream};
use crate::sdp::{self, SolverParams};

/// PSD slack accepted by `randomized_round` before factorization; lenient
/// enough for iterates of a loosely-converged solve, since factorization
/// clamps the negative part anyway.
const RANDOMIZED_PSD_TOL: f64 = 1e-3;

/// PSD slack accepted when factorizing a non-converged iterate for the
/// randomized fallback.
const FALLBACK_PSD_TOL: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct RoundingParams {
    /// Cap on T' applications.
    pub max_rounds: usize,
    /// Entrywise distance to `{-1/(k-1), 1}` at which an iterate counts as a
    /// vertex.
    pub vertex_tol: f64,
    /// Frobenius step size below which the iteration is declared stalled.
    pub step_tol: f64,
    /// Master seed for the randomized fallback assignment.
    pub seed: u64,
    pub solver: SolverParams,
}

impl Default for RoundingParams {
    fn default() -> Self {
        RoundingParams {
            max_rounds: 50,
            vertex_tol: 1e-3,
            step_tol: 1e-6,
            seed: 0,
            solver: SolverParams::default(),
        }
    }
}

impl RoundingParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::invalid("max_rounds must be positive"));
        }
        if !self.vertex_tol.is_finite() || self.vertex_tol <= 0.0 {
            return Err(Error::invalid("vertex_tol must be positive"));
        }
        if !self.step_tol.is_finite() || self.step_tol <= 0.0 {
            return Err(Error::invalid("step_tol must be positive"));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundStatus {
    VertexReached,
    Stalled,
    MaxRounds,
}

/// Record of one fixed point run: every iterate starting from `X_0`, the
/// energy of each, and the extracted partition when one exists.
#[derive(Debug, Clone)]
pub struct RoundingTrace {
    pub iterates: Vec<SymMatrix>,
    pub energies: Vec<f64>,
    pub partition: Option<Partition>,
    pub status: RoundStatus,
    /// True when the partition came from the randomized fallback rather than
    /// from extraction at (relaxed) vertex tolerance.
    pub fallback_randomized: bool,
    /// Total ADMM iterations summed over all T' solves.
    pub solver_iterations: usize,
}

impl RoundingTrace {
    /// Number of T' applications performed.
    pub fn rounds(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_iterate(&self) -> &SymMatrix {
        self.iterates.last().expect("trace always holds X_0")
    }
}

fn shift_value(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("shift requires k >= 2"));
    }
    Ok((1.0 - k as f64 / 2.0) / (k as f64 - 1.0))
}

/// Constant matrix `A` with every entry `a = (1 - k/2)/(k - 1)`.
pub fn shift_matrix(n: usize, k: usize) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::invalid("shift_matrix requires n >= 1"));
    }
    Ok(SymMatrix::constant(n, shift_value(k)?))
}

/// Clustering energy `f(X) = (X + A)·(X + A) = sum_ij (X_ij + a)^2`.
///
/// Constant on the k-partition matrices of a given size (where it equals
/// `n^2 ((k/2)/(k-1))^2`) and strictly smaller everywhere else on the body.
pub fn clustering_energy(x: &SymMatrix, k: usize) -> f64 {
    let a = shift_value(k).expect("clustering energy requires k >= 2");
    let n = x.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let t = x.get(i, j) + a;
            sum += t * t;
        }
    }
    sum
}

/// Runs the fixed point iteration from `X0` until an iterate extracts as a
/// partition at `vertex_tol` (`VertexReached`), the step size drops below
/// `step_tol` (`Stalled`), or `max_rounds` is hit.
///
/// Non-vertex terminations still try to extract a partition at the relaxed
/// tolerance `10·vertex_tol`; failing that, one randomized assignment seeded
/// from `params.seed` supplies the partition and the trace is flagged. Each
/// T' solve warm-starts from the previous iterate.
pub fn fixed_point_round(
    x0: &SymMatrix,
    k: usize,
    params: &RoundingParams,
) -> Result<RoundingTrace> {
    params.validate()?;
    let a = shift_value(k)?;
    if !x0.is_finite() {
        return Err(Error::invalid(
            "fixed_point_round: X0 has non-finite entries",
        ));
    }

    let mut iterates = vec![x0.clone()];
    let mut energies = vec![clustering_energy(x0, k)];
    let mut status = RoundStatus::MaxRounds;
    let mut partition = None;
    let mut solver_iterations = 0;

    let mut x = x0.clone();
    for _ in 0..params.max_rounds {
        let sol = sdp::solve_linear_warm(&x.shifted(a), k, &params.solver, &x)?;
        solver_iterations += sol.iterations;
        let y = sol.x;
        let step = y.frob_dist(&x).expect("iterates share dimension");
        energies.push(clustering_energy(&y, k));
        iterates.push(y.clone());
        if let Ok(p) = elliptope::extract_partition(&y, k, params.vertex_tol) {
            status = RoundStatus::VertexReached;
            partition = Some(p);
            break;
        }
        if step < params.step_tol {
            status = RoundStatus::Stalled;
            break;
        }
        x = y;
    }

    let mut fallback_randomized = false;
    if partition.is_none() {
        let last = iterates.last().expect("trace holds X_0");
        match elliptope::extract_partition(last, k, 10.0 * params.vertex_tol) {
            Ok(p) => partition = Some(p),
            Err(_) => {
                let rows = gram_factorize(last, FALLBACK_PSD_TOL)?;
                let mut trial_rng = rng::substream(params.seed, stream::ROUND_FALLBACK);
                let labels = assign_to_random_directions(&rows, k, &mut trial_rng);
                partition = Some(Partition::new(labels, k)?);
                fallback_randomized = true;
            }
        }
    }

    Ok(RoundingTrace {
        iterates,
        energies,
        partition,
        status,
        fallback_randomized,
        solver_iterations,
    })
}

/// Factors a PSD matrix with unit diagonal into rows `v_i` with
/// `v_i·v_j = X_ij` (within `10·tol`): symmetric eigendecomposition with
/// negative eigenvalues clamped to zero, rows renormalized to unit length.
/// Robust where Cholesky fails on the rank-deficient matrices the relaxation
/// produces.
pub fn gram_factorize(x: &SymMatrix, tol: f64) -> Result<Vec<Vec<f64>>> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::invalid("gram_factorize requires tol >= 0"));
    }
    let n = x.n();
    let (values, vectors) = linalg::sym_eigen(x.to_dmatrix())?;
    let min_eig = values.min();
    if min_eig < -tol {
        return Err(Error::NotPsd(format!(
            "gram_factorize: minimum eigenvalue {min_eig:.3e} below -{tol:.3e}"
        )));
    }
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let s = values[j].max(0.0).sqrt();
        for i in 0..n {
            rows[i][j] = vectors[(i, j)] * s;
        }
    }
    for row in &mut rows {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
    Ok(rows)
}

/// Randomized rounding: per trial, draw k uniform unit directions in R^n,
/// assign each factor row to its closest direction (ties to the lowest
/// index), score with `cut_weight` against `M`, and keep the best trial.
/// Trials use independent RNG substreams of `seed`, so the result does not
/// depend on evaluation order; one factorization is shared by all trials.
pub fn randomized_round(
    x: &SymMatrix,
    k: usize,
    trials: usize,
    seed: u64,
    m: &SymMatrix,
) -> Result<(Partition, f64)> {
    if trials < 1 {
        return Err(Error::invalid("randomized_round requires trials >= 1"));
    }
    if k < 2 {
        return Err(Error::invalid("randomized_round requires k >= 2"));
    }
    if x.n() != m.n() {
        return Err(Error::dims(format!(
            "randomized_round: X has n = {}, M has n = {}",
            x.n(),
            m.n()
        )));
    }
    let rows = gram_factorize(x, RANDOMIZED_PSD_TOL)?;
    let mut best: Option<(Partition, f64)> = None;
    for trial in 0..trials {
        let mut trial_rng = rng::substream(seed, stream::TRIAL_BASE + trial as u64);
        let labels = assign_to_random_directions(&rows, k, &mut trial_rng);
        let p = Partition::new(labels, k)?;
        let w = cut_weight(&p, m)?;
        if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
            best = Some((p, w));
        }
    }
    Ok(best.expect("at least one trial"))
}

fn assign_to_random_directions(
    rows: &[Vec<f64>],
    k: usize,
    trial_rng: &mut impl Rng,
) -> Vec<usize> {
    let dim = rows.first().map_or(0, Vec::len);
    let dirs: Vec<Vec<f64>> = (0..k).map(|_| random_unit_vector(dim, trial_rng)).collect();
    rows.iter()
        .map(|v| {
            let mut label = 0;
            let mut best = f64::NEG_INFINITY;
            for (j, u) in dirs.iter().enumerate() {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                if d > best {
                    best = d;
                    label = j;
                }
            }
            label
        })
        .collect()
}

fn random_unit_vector(dim: usize, trial_rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| trial_rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}
