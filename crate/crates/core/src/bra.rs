//! The binary reconstruction pipeline: approximate the minimum-norm solution
//! with CGLS, read the ghost weights off the lambda0 block, subtract the
//! weight field, and round to a binary image.
//!
//! When every pixel of the ghost region is covered exactly once, rounding the
//! CGLS iterate directly gives the same limit and is markedly more robust at
//! small iteration counts (the doubled-pixel correction amplifies weight
//! noise), so the pipeline takes that path whenever it applies.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ghost::{
    build_bad_configuration, build_ghost_index, enlarging_region, BadConfiguration, Coverage,
    EnlargingRegion, GhostRegionIndex,
};
use crate::lattice::{check_binary_uniqueness, DirectionSet, GridDims, Point};
use crate::projector::{Image, ProjectionVector, SparseProjectionMatrix};
use crate::solver::{cgls, SolverConfig, SolverTrace};

/// Recovered ghost coefficients, one per translation u of the enlarging
/// region. For a converged solve of a binary-consistent system they stay in
/// [−4/9, 4/9] up to numerical slack.
#[derive(Debug, Clone, Default)]
pub struct GhostWeights {
    alpha: BTreeMap<Point, f64>,
}

impl GhostWeights {
    pub fn get(&self, u: Point) -> Option<f64> {
        self.alpha.get(&u).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.alpha.iter().map(|(&u, &a)| (u, a))
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

impl Serialize for GhostWeights {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.alpha.len()))?;
        for (u, a) in &self.alpha {
            seq.serialize_element(&(u, a))?;
        }
        seq.end()
    }
}

/// α_u = x_κ(λ₀+u) − round(x_κ(λ₀+u)) for every u in E, rounding ties away
/// from zero.
pub fn compute_alphas(
    xk: &Image,
    bad: &BadConfiguration,
    region: &EnlargingRegion,
) -> GhostWeights {
    let l0 = bad.lambda0();
    let grid = xk.dims();
    let mut alpha = BTreeMap::new();
    for u in region.points() {
        let p = (l0.0 + u.0, l0.1 + u.1);
        assert!(grid.contains(p), "lambda0 + E must lie inside the grid");
        let v = xk.get(p);
        alpha.insert(u, v - v.round());
    }
    GhostWeights { alpha }
}

fn weight_at(cov: &Coverage, weights: &GhostWeights, delta_weight: i64) -> f64 {
    let mut w = 0.0;
    for u in &cov.plus {
        w += weights.get(*u).unwrap_or(0.0);
    }
    for u in &cov.minus {
        w -= weights.get(*u).unwrap_or(0.0);
    }
    if let Some(u) = cov.delta {
        w += delta_weight as f64 * weights.get(u).unwrap_or(0.0);
    }
    w
}

/// The minimal-weight field w*: zero off H, the signed coefficient sum on H.
pub fn build_weight_field(
    index: &GhostRegionIndex,
    weights: &GhostWeights,
    bad: &BadConfiguration,
    grid: GridDims,
) -> Image {
    let mut w = Image::zeros(grid);
    for (&p, cov) in index.coverage() {
        w.set(p, weight_at(cov, weights, bad.delta_weight()));
    }
    w
}

/// Subtracts the weight field from the iterate: outside H the value is
/// untouched; at a doubled-pixel translate the correction is ∓2α_u; elsewhere
/// the correction is the signed sum over the covering translations.
pub fn apply_rounding(
    xk: &Image,
    weights: &GhostWeights,
    index: &GhostRegionIndex,
    bad: &BadConfiguration,
) -> Result<Image> {
    let mut out = xk.clone();
    for (&p, cov) in index.coverage() {
        if cov.multiplicity() == 0 {
            return Err(Error::InconsistentIndex(p));
        }
        out.set(p, xk.get(p) - weight_at(cov, weights, bad.delta_weight()));
    }
    Ok(out)
}

/// Per-pixel threshold at 1/2 with the tie going to 1, clamping everything
/// to {0, 1}.
pub fn binary_round(x: &Image) -> Image {
    let values = x
        .values()
        .iter()
        .map(|&v| if v >= 0.5 { 1.0 } else { 0.0 })
        .collect();
    Image::binary(x.dims(), values).expect("thresholded values are binary")
}

/// True when every pixel of H is covered exactly once, in which case
/// rounding the iterate directly reproduces the corrected rounding.
pub fn simple_rounding_applicable(index: &GhostRegionIndex) -> bool {
    index.coverage().values().all(|c| c.multiplicity() == 1)
}

/// Iteration cap heuristic: ten times the grid side estimate √(MN).
pub fn default_kappa_cap(grid: GridDims) -> usize {
    10 * (grid.len() as f64).sqrt().ceil() as usize
}

#[derive(Debug, Clone)]
pub struct BraConfig {
    pub kappa: usize,
    /// Optional early stop forwarded to CGLS.
    pub residual_tol: Option<f64>,
    /// Proceed on sets that fail the uniqueness check (the guarantee is
    /// void; recorded in the diagnostics).
    pub force: bool,
    pub deterministic: bool,
    /// Pixels of the pre-round image within this distance of 1/2 are
    /// reported as unstable.
    pub near_half_margin: f64,
}

impl BraConfig {
    pub fn new(kappa: usize) -> BraConfig {
        BraConfig {
            kappa,
            residual_tol: None,
            force: false,
            deterministic: true,
            near_half_margin: 0.05,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> BraConfig {
        self.residual_tol = Some(tol);
        self
    }

    pub fn forced(mut self) -> BraConfig {
        self.force = true;
        self
    }
}

/// Run summary written alongside reconstructions.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub pixels_in_h: usize,
    pub pixels_outside_h: usize,
    /// Pre-round pixels within `near_half_margin` of 1/2; oscillation of
    /// these under growing κ indicates under-iteration.
    pub near_half: Vec<Point>,
    pub near_half_margin: f64,
    pub fast_path: bool,
    pub forced: bool,
    /// Set when force mode could not build the ghost machinery and fell
    /// back to rounding the iterate.
    pub fallback_plain_rounding: bool,
    pub residual_norm: f64,
    pub normal_residual_norm: f64,
    pub iterations_run: usize,
}

/// Full reconstruction output.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub binary: Image,
    pub weights: GhostWeights,
    /// The weight field w* that was subtracted (zero in fast-path runs'
    /// rounding but reported regardless).
    pub wstar: Image,
    pub kappa_used: usize,
    pub trace: SolverTrace,
    pub diagnostics: Diagnostics,
}

fn near_half_pixels(raw: &Image, margin: f64) -> Vec<Point> {
    let dims = raw.dims();
    raw.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| (**v - 0.5).abs() < margin)
        .map(|(i, _)| dims.point_at(i))
        .collect()
}

/// End-to-end reconstruction: build A, run κ CGLS iterations, expand F_S,
/// recover the ghost weights from the λ₀ block, correct, and round.
/// Refuses sets that fail the uniqueness check unless `force` is set.
pub fn bra(
    s: &DirectionSet,
    grid: GridDims,
    p: &ProjectionVector,
    cfg: &BraConfig,
) -> Result<ReconstructionResult> {
    let report = check_binary_uniqueness(s, grid);
    if !report.is_binary_uniqueness_set && !cfg.force {
        return Err(Error::NotUniquenessSet(format!(
            "set {:?} on {grid} (valid: {}, structure: {}); pass force to proceed anyway",
            s.dirs().map(|d| d.vector()),
            report.valid,
            report.structure.is_some(),
        )));
    }
    let a = SparseProjectionMatrix::build(s, grid);
    let solver_cfg = SolverConfig {
        kappa: cfg.kappa,
        residual_tol: cfg.residual_tol,
        deterministic: cfg.deterministic,
    };
    let (xk, trace) = cgls(&a, p, &solver_cfg)?;

    let machinery = if report.valid {
        report
            .structure
            .and_then(|case| build_bad_configuration(s, case).ok())
    } else {
        None
    };
    let (raw, weights, wstar, fast_path, fallback, h_len) = match machinery {
        Some(bad) => {
            let region = enlarging_region(s, grid);
            let weights = compute_alphas(&xk, &bad, &region);
            let index = build_ghost_index(&bad, &region);
            let wstar = build_weight_field(&index, &weights, &bad, grid);
            let h_len = index.len();
            if simple_rounding_applicable(&index) {
                (xk.clone(), weights, wstar, true, false, h_len)
            } else {
                let raw = apply_rounding(&xk, &weights, &index, &bad)?;
                (raw, weights, wstar, false, false, h_len)
            }
        }
        None => {
            debug_assert!(cfg.force, "refusal happens before this point");
            let zeros = Image::zeros(grid);
            (xk.clone(), GhostWeights::default(), zeros, false, true, 0)
        }
    };
    let binary = binary_round(&raw);
    let diagnostics = Diagnostics {
        pixels_in_h: h_len,
        pixels_outside_h: grid.len() - h_len,
        near_half: near_half_pixels(&raw, cfg.near_half_margin),
        near_half_margin: cfg.near_half_margin,
        fast_path,
        forced: cfg.force,
        fallback_plain_rounding: fallback,
        residual_norm: *trace.residual_norms.last().unwrap(),
        normal_residual_norm: *trace.normal_residuals.last().unwrap(),
        iterations_run: trace.iterations_run,
    };
    Ok(ReconstructionResult {
        binary,
        weights,
        wstar,
        kappa_used: trace.iterations_run,
        trace,
        diagnostics,
    })
}
