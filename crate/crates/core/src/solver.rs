//! Conjugate gradient on the normal equations (CGLS) for the minimum-norm
//! least-squares solution of A x = p.
//!
//! The iteration starts from the zero image, so every iterate stays in
//! range(Aᵀ) and the limit of a consistent system is the minimum Euclidean
//! norm solution. Plain CGLS, no preconditioning or reorthogonalization;
//! the two matrix applications dominate each iteration.

use crate::error::{Error, Result};
use crate::projector::{Image, ProjectionVector, SparseProjectionMatrix};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Maximum iteration count κ.
    pub kappa: usize,
    /// Early stop once ‖Aᵀ(Ax − p)‖₂ falls to or below this value. Off by
    /// default: Algorithm-style fixed-κ runs are the baseline interface.
    pub residual_tol: Option<f64>,
    /// Forces sequential accumulation. The implementation is sequential
    /// either way; the flag pins the contract for callers.
    pub deterministic: bool,
}

impl SolverConfig {
    pub fn fixed(kappa: usize) -> SolverConfig {
        SolverConfig {
            kappa,
            residual_tol: None,
            deterministic: true,
        }
    }

    pub fn with_tol(kappa: usize, tol: f64) -> SolverConfig {
        SolverConfig {
            kappa,
            residual_tol: Some(tol),
            deterministic: true,
        }
    }
}

/// Per-iteration residual history; entry 0 describes the zero start vector.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub iterations_run: usize,
    /// ‖A x_i − p‖₂ for i = 0..=iterations_run.
    pub residual_norms: Vec<f64>,
    /// ‖Aᵀ(A x_i − p)‖₂ for i = 0..=iterations_run.
    pub normal_residuals: Vec<f64>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs κ CGLS iterations (or stops early on the normal-residual tolerance)
/// and returns the iterate with its trace.
pub fn cgls(
    a: &SparseProjectionMatrix,
    p: &ProjectionVector,
    cfg: &SolverConfig,
) -> Result<(Image, SolverTrace)> {
    if p.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "projection vector has {} bins, matrix has {}",
            p.len(),
            a.m()
        )));
    }
    let grid = a.grid();
    let mut x = Image::zeros(grid);
    // r = p - A x = p at the zero start
    let mut r = p.clone();
    let mut s = a.back_project(&r)?;
    let mut gamma = s.norm_l2_sq();
    let mut dir = s.clone();

    let mut trace = SolverTrace {
        iterations_run: 0,
        residual_norms: vec![norm2(r.values())],
        normal_residuals: vec![gamma.sqrt()],
    };
    if let Some(tol) = cfg.residual_tol {
        if gamma.sqrt() <= tol {
            return Ok((x, trace));
        }
    }

    for it in 1..=cfg.kappa {
        let q = a.forward_project(&dir)?;
        let qq = q.values().iter().map(|v| v * v).sum::<f64>();
        if qq == 0.0 {
            // search direction annihilated: normal residual is already zero
            break;
        }
        let alpha = gamma / qq;
        if !alpha.is_finite() {
            return Err(Error::NonFinite(it));
        }
        let xv: Vec<f64> = x
            .values()
            .iter()
            .zip(dir.values())
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        x = Image::from_values(grid, xv);
        let rv: Vec<f64> = r
            .values()
            .iter()
            .zip(q.values())
            .map(|(ri, qi)| ri - alpha * qi)
            .collect();
        r = ProjectionVector::new(rv);
        s = a.back_project(&r)?;
        let gamma_next = s.norm_l2_sq();
        if !gamma_next.is_finite() {
            return Err(Error::NonFinite(it));
        }
        trace.iterations_run = it;
        trace.residual_norms.push(norm2(r.values()));
        trace.normal_residuals.push(gamma_next.sqrt());
        if let Some(tol) = cfg.residual_tol {
            if gamma_next.sqrt() <= tol {
                break;
            }
        }
        let beta = gamma_next / gamma;
        gamma = gamma_next;
        let dv: Vec<f64> = s
            .values()
            .iter()
            .zip(dir.values())
            .map(|(si, di)| si + beta * di)
            .collect();
        dir = Image::from_values(grid, dv);
    }
    Ok((x, trace))
}

/// Central-solution radius R = sqrt(‖p‖₁/d − ‖x*‖₂²): the common distance
/// from the minimum-norm solution to every binary solution.
pub fn central_radius(p: &ProjectionVector, xstar: &Image, d: usize) -> Result<f64> {
    let radicand = p.norm_l1() / d as f64 - xstar.norm_l2_sq();
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.sqrt())
}
