//! First-order solver for linear optimization over the k-way elliptope.
//!
//! `solve_linear` computes `argmax_{X in L_{n,k}} C·X` by ADMM, splitting the
//! feasible set into the PSD cone (handled by eigenvalue clamping) and the
//! box/diagonal constraints (handled by entrywise clamping), with the linear
//! objective absorbed into the proximal step. The module also exposes the two
//! projections, a Dykstra projection onto the full body, and the diagonal
//! KKT certificate `CX = DX`.

use nalgebra::DMatrix;

use crate::elliptope::entry_floor;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SymMatrix;

/// ADMM controls. Defaults are suitable for n up to a few hundred.
#[derive(Debug, Clone)]
pub struct SolverParams {
    /// Iteration cap; hitting it yields status `MaxIters`, not an error.
    pub max_iters: usize,
    /// Absolute residual tolerance.
    pub eps_abs: f64,
    /// Relative residual tolerance, scaled by max(‖X‖_F, ‖Z‖_F, ‖C‖_F).
    pub eps_rel: f64,
    /// Initial penalty parameter.
    pub rho: f64,
    /// Rescale rho when the primal/dual residual ratio exceeds 10.
    pub adaptive_rho: bool,
    /// Over-relaxation factor in [1, 2).
    pub over_relaxation: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_iters: 20_000,
            eps_abs: 1e-6,
            eps_rel: 1e-6,
            rho: 1.0,
            adaptive_rho: true,
            over_relaxation: 1.6,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be positive"));
        }
        if !self.eps_abs.is_finite() || self.eps_abs <= 0.0 {
            return Err(Error::invalid("eps_abs must be positive"));
        }
        if !self.eps_rel.is_finite() || self.eps_rel < 0.0 {
            return Err(Error::invalid("eps_rel must be nonnegative"));
        }
        if !self.rho.is_finite() || self.rho <= 0.0 {
            return Err(Error::invalid("rho must be positive"));
        }
        if !(1.0..2.0).contains(&self.over_relaxation) {
            return Err(Error::invalid("over_relaxation must lie in [1, 2)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
}

/// Output of `solve_linear`. When `status` is `Converged` the iterate
/// satisfies the box constraints exactly and is PSD to within `10·eps_abs`,
/// so it passes `in_kway_elliptope(x, k, 10·eps_abs)`.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: SymMatrix,
    /// `C·X` in the caller's scale.
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Diagonal multiplier fit for the stationarity condition `CX = DX`.
///
/// A small residual certifies optimality when no box constraint is active;
/// with active constraints the residual is informative but not conclusive.
#[derive(Debug, Clone)]
pub struct KktCertificate {
    /// Row-wise least-squares diagonal `d_i = <(CX)_i, X_i> / <X_i, X_i>`.
    pub d: Vec<f64>,
    /// `‖CX − DX‖_F / (1 + ‖CX‖_F)`.
    pub residual: f64,
}

/// Nearest (Frobenius) positive-semidefinite matrix: eigendecompose, clamp
/// negative eigenvalues to zero, reconstruct.
pub fn project_psd(s: &SymMatrix) -> Result<SymMatrix> {
    Ok(SymMatrix::from_dmatrix(&project_psd_dm(s.to_dmatrix())?))
}

/// Nearest matrix with unit diagonal and off-diagonal entries in
/// `[−1/(k−1), 1]`. The upper clamp is redundant for elliptope members but
/// stabilizes intermediate iterates.
pub fn project_box(s: &SymMatrix, k: usize) -> SymMatrix {
    let floor = entry_floor(k);
    SymMatrix::from_fn(s.n(), |i, j| {
        if i == j {
            1.0
        } else {
            s.get(i, j).clamp(floor, 1.0)
        }
    })
}

/// Dykstra's alternating projection onto `L_{n,k}` (PSD cone against
/// box/diagonal set). Stops when the Frobenius gap between the two half-step
/// iterates drops to `tol` or after `max_iters` sweeps. The result satisfies
/// the box constraints exactly.
pub fn project_elliptope(s: &SymMatrix, k: usize, max_iters: usize, tol: f64) -> Result<SymMatrix> {
    if k < 2 {
        return Err(Error::invalid("project_elliptope requires k >= 2"));
    }
    if max_iters == 0 {
        return Err(Error::invalid("project_elliptope requires max_iters >= 1"));
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::invalid("project_elliptope requires tol >= 0"));
    }
    let floor = entry_floor(k);
    let n = s.n();
    let mut y = s.to_dmatrix();
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut q = DMatrix::<f64>::zeros(n, n);
    for _ in 0..max_iters {
        let yp = project_psd_dm(&y + &p)?;
        p = &y + &p - &yp;
        let yb = project_box_dm(&yp + &q, floor);
        q = &yp + &q - &yb;
        let gap = (&yb - &yp).norm();
        y = yb;
        if gap <= tol {
            break;
        }
    }
    Ok(SymMatrix::from_dmatrix(&y))
}

/// Maximizes `C·X` over the k-way elliptope from a cold start.
pub fn solve_linear(c: &SymMatrix, k: usize, params: &SolverParams) -> Result<SdpSolution> {
    admm(c, k, params, None)
}

/// Same as `solve_linear`, warm-started from `x0` (projected into the box
/// first). Useful when consecutive objectives are close, as in the fixed
/// point iteration.
pub fn solve_linear_warm(
    c: &SymMatrix,
    k: usize,
    params: &SolverParams,
    x0: &SymMatrix,
) -> Result<SdpSolution> {
    admm(c, k, params, Some(x0))
}

fn admm(
    c: &SymMatrix,
    k: usize,
    params: &SolverParams,
    x0: Option<&SymMatrix>,
) -> Result<SdpSolution> {
    params.validate()?;
    if k < 2 {
        return Err(Error::invalid("solve_linear requires k >= 2"));
    }
    if !c.is_finite() {
        return Err(Error::invalid(
            "solve_linear: objective matrix has non-finite entries",
        ));
    }
    let n = c.n();
    let floor = entry_floor(k);

    // Normalize the objective so rho and the residual thresholds see a
    // problem of unit scale regardless of the caller's weighting.
    let c_norm = c.frob_norm();
    let (c_hat, c_hat_norm) = if c_norm > 0.0 {
        (c.to_dmatrix() / c_norm, 1.0)
    } else {
        (DMatrix::zeros(n, n), 0.0)
    };

    let mut z = match x0 {
        Some(start) => {
            if start.n() != n {
                return Err(Error::dims(format!(
                    "solve_linear: warm start has n = {}, objective has n = {}",
                    start.n(),
                    n
                )));
            }
            if !start.is_finite() {
                return Err(Error::invalid(
                    "solve_linear: warm start has non-finite entries",
                ));
            }
            project_box_dm(start.to_dmatrix(), floor)
        }
        None => DMatrix::identity(n, n),
    };
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut x;
    let mut rho = params.rho;
    let alpha = params.over_relaxation;

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut status = SolveStatus::MaxIters;
    let mut iterations = params.max_iters;

    for it in 1..=params.max_iters {
        x = project_psd_dm(&z - &u + &c_hat * (1.0 / rho))?;
        let x_hat = &x * alpha + &z * (1.0 - alpha);
        let z_prev = std::mem::replace(&mut z, project_box_dm(&x_hat + &u, floor));
        u += &x_hat - &z;

        primal = (&x - &z).norm();
        dual = rho * (&z - &z_prev).norm();
        if !primal.is_finite() || !dual.is_finite() {
            return Err(Error::Numerical(format!(
                "solve_linear iterates became non-finite at iteration {it} (rho = {rho})"
            )));
        }

        let scale = x.norm().max(z.norm()).max(c_hat_norm);
        let eps = params.eps_abs + params.eps_rel * scale;
        if primal <= eps && dual <= eps {
            // The residual test alone lets lambda_min(Z) drift below
            // -10·eps_abs at large n; gate convergence on near-PSD-ness of
            // the reported iterate. primal bounds the spectral gap, so the
            // eigenvalue check is only needed when primal is loose.
            let feasible = primal <= 5.0 * params.eps_abs
                || linalg::min_eigenvalue_dm(z.clone())? >= -5.0 * params.eps_abs;
            if feasible {
                status = SolveStatus::Converged;
                iterations = it;
                break;
            }
        }

        if params.adaptive_rho {
            if primal > 10.0 * dual && rho < 1e4 {
                rho = (rho * 2.0).min(1e4);
                u /= 2.0;
            } else if dual > 10.0 * primal && rho > 1e-4 {
                rho = (rho / 2.0).max(1e-4);
                u *= 2.0;
            }
        }
    }

    // Report Z: it satisfies the box constraints exactly, and the gate above
    // bounds how far it can be from the PSD cone.
    let xs = SymMatrix::from_dmatrix(&z);
    let objective = xs.frobenius_dot(c).expect("dimensions match");
    Ok(SdpSolution {
        x: xs,
        objective,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        status,
    })
}

/// Least-squares diagonal fit for `CX = DX` with the normalized residual.
pub fn kkt_check(c: &SymMatrix, x: &SymMatrix) -> Result<KktCertificate> {
    if c.n() != x.n() {
        return Err(Error::dims(format!(
            "kkt_check: C is {0}x{0}, X is {1}x{1}",
            c.n(),
            x.n()
        )));
    }
    let n = c.n();
    let xd = x.to_dmatrix();
    let p = c.to_dmatrix() * &xd;

    let mut d = vec![0.0; n];
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            num += p[(i, j)] * xd[(i, j)];
            den += xd[(i, j)] * xd[(i, j)];
        }
        d[i] = if den > 0.0 { num / den } else { 0.0 };
    }

    let mut resid_sq = 0.0;
    let mut p_norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r = p[(i, j)] - d[i] * xd[(i, j)];
            resid_sq += r * r;
            p_norm_sq += p[(i, j)] * p[(i, j)];
        }
    }
    Ok(KktCertificate {
        d,
        residual: resid_sq.sqrt() / (1.0 + p_norm_sq.sqrt()),
    })
}

fn project_psd_dm(m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let (values, vectors) = linalg::sym_eigen(m)?;
    let mut scaled = vectors.clone();
    for j in 0..n {
        let lam = values[j].max(0.0);
        scaled.column_mut(j).scale_mut(lam);
    }
    let mut out = scaled * vectors.transpose();
    symmetrize(&mut out);
    Ok(out)
}

fn project_box_dm(mut m: DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = if i == j {
                1.0
            } else {
                m[(i, j)].clamp(floor, 1.0)
            };
        }
    }
    m
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptope::partition_matrix;
    use crate::partition::Partition;

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        for bad in [
            SolverParams {
                max_iters: 0,
                ..Default::default()
            },
            SolverParams {
                eps_abs: 0.0,
                ..Default::default()
            },
            SolverParams {
                eps_rel: -1e-9,
                ..Default::default()
            },
            SolverParams {
                rho: 0.0,
                ..Default::default()
            },
            SolverParams {
                over_relaxation: 2.0,
                ..Default::default()
            },
            SolverParams {
                over_relaxation: 0.9,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn psd_projection_examples() {
        let mut s = SymMatrix::zeros(2);
        s.set(0, 0, 1.0);
        s.set(1, 1, -2.0);
        let p = project_psd(&s).unwrap();
        assert!((p.get(0, 0) - 1.0).abs() < 1e-10);
        assert!(p.get(1, 1).abs() < 1e-10);
        assert!(p.get(0, 1).abs() < 1e-10);

        let mut flip = SymMatrix::zeros(2);
        flip.set(0, 1, 1.0);
        let q = project_psd(&flip).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.get(i, j) - 0.5).abs() < 1e-10);
            }
        }

        // Identity on the cone.
        let x = partition_matrix(&Partition::new(vec![0, 1, 0], 3).unwrap());
        let px = project_psd(&x).unwrap();
        assert!(x.max_abs_diff(&px).unwrap() < 1e-10);
    }

    #[test]
    fn box_projection_examples() {
        let mut s = SymMatrix::identity(3);
        s.set(0, 1, -0.9);
        s.set(1, 2, 1.3);
        s.set(0, 0, 0.7);
        let p = project_box(&s, 3);
        assert_eq!(p.get(0, 1), -0.5);
        assert_eq!(p.get(1, 2), 1.0);
        assert_eq!(p.get(0, 0), 1.0);

        let x = partition_matrix(&Partition::new(vec![0, 1, 1], 3).unwrap());
        assert_eq!(x.max_abs_diff(&project_box(&x, 3)).unwrap(), 0.0);
    }

    #[test]
    fn solve_tiny_instances() {
        let params = SolverParams::default();

        let mut c = SymMatrix::zeros(2);
        c.set(0, 1, 1.0);
        let sol = solve_linear(&c, 2, &params).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!((sol.x.get(0, 1) - 1.0).abs() < 1e-4);
        assert!((sol.objective - 2.0).abs() < 1e-3);

        c.set(0, 1, -1.0);
        let sol = solve_linear(&c, 2, &params).unwrap();
        assert!((sol.x.get(0, 1) + 1.0).abs() < 1e-4);

        let sol = solve_linear(&c, 3, &params).unwrap();
        assert!((sol.x.get(0, 1) + 0.5).abs() < 1e-4);
    }

    #[test]
    fn solve_rejects_bad_input() {
        let c = SymMatrix::identity(2);
        assert!(solve_linear(&c, 1, &SolverParams::default()).is_err());
        let mut bad = SymMatrix::zeros(2);
        bad.set(0, 1, f64::NAN);
        assert!(solve_linear(&bad, 2, &SolverParams::default()).is_err());
        let x0 = SymMatrix::identity(3);
        assert!(solve_linear_warm(&c, 2, &SolverParams::default(), &x0).is_err());
    }

    #[test]
    fn warm_start_agrees_with_cold_start() {
        let mut c = SymMatrix::zeros(3);
        c.set(0, 1, 1.0);
        c.set(0, 2, -0.7);
        c.set(1, 2, 0.3);
        let params = SolverParams::default();
        let cold = solve_linear(&c, 3, &params).unwrap();
        let warm = solve_linear_warm(&c, 3, &params, &cold.x).unwrap();
        assert_eq!(warm.status, SolveStatus::Converged);
        assert!(cold.x.max_abs_diff(&warm.x).unwrap() < 1e-4);
    }

    #[test]
    fn dykstra_projection_lands_in_the_body() {
        let x = partition_matrix(&Partition::new(vec![0, 1, 2, 0], 3).unwrap());
        let same = project_elliptope(&x, 3, 500, 1e-12).unwrap();
        assert!(x.max_abs_diff(&same).unwrap() < 1e-9);

        let bumped = SymMatrix::from_fn(4, |i, j| x.get(i, j) + if i == j { 0.0 } else { -0.2 });
        let proj = project_elliptope(&bumped, 3, 2000, 1e-12).unwrap();
        assert!(crate::elliptope::in_kway_elliptope(&proj, 3, 1e-8).unwrap());
    }

    #[test]
    fn kkt_diagonal_case() {
        let mut c = SymMatrix::zeros(3);
        for i in 0..3 {
            c.set(i, i, (i + 1) as f64);
        }
        let cert = kkt_check(&c, &SymMatrix::identity(3)).unwrap();
        assert!(cert.residual < 1e-12);
        assert!((cert.d[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kkt_dimension_mismatch() {
        let c = SymMatrix::identity(2);
        let x = SymMatrix::identity(3);
        assert!(kkt_check(&c, &x).is_err());
    }
}
