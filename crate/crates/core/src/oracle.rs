//! Independent ground truth for small instances: exhaustive enumeration of
//! binary solutions with per-line pruning, a dense SVD-backed minimum-norm
//! solve, and the closed-form ghost-weight expression evaluated on a known
//! phantom. These exist to validate the production path, not to scale.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ghost::BadConfiguration;
use crate::lattice::Point;
use crate::projector::{Image, ProjectionVector, SparseProjectionMatrix};

/// All binary solutions found, up to the requested cap.
#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub solutions: Vec<Image>,
    /// True when the search was cut after exceeding the cap; the returned
    /// list is then exactly `cap` long.
    pub truncated: bool,
}

struct Search<'a> {
    pixel_rows: &'a [Vec<u32>],
    order: &'a [usize],
    target: &'a [i64],
    sums: Vec<i64>,
    remaining: Vec<i64>,
    assignment: Vec<u8>,
    solutions: Vec<Vec<u8>>,
    cap: usize,
    truncated: bool,
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize) {
        if self.truncated {
            return;
        }
        if depth == self.order.len() {
            let mut sol = vec![0u8; self.assignment.len()];
            for (slot, &pix) in self.order.iter().enumerate() {
                sol[pix] = self.assignment[slot];
            }
            if self.solutions.len() == self.cap {
                self.truncated = true;
            } else {
                self.solutions.push(sol);
            }
            return;
        }
        let pix = self.order[depth];
        'values: for v in 0i64..=1 {
            for &r in &self.pixel_rows[pix] {
                let r = r as usize;
                let s = self.sums[r] + v;
                if s > self.target[r] || s + self.remaining[r] - 1 < self.target[r] {
                    continue 'values;
                }
            }
            for &r in &self.pixel_rows[pix] {
                self.sums[r as usize] += v;
                self.remaining[r as usize] -= 1;
            }
            self.assignment[depth] = v as u8;
            self.dfs(depth + 1);
            for &r in &self.pixel_rows[pix] {
                self.sums[r as usize] -= v;
                self.remaining[r as usize] += 1;
            }
        }
    }
}

/// Depth-first search over pixels with per-line interval pruning: a partial
/// assignment dies as soon as some line's sum overshoots its bin or can no
/// longer reach it. Pixels are visited line-by-line along the shortest
/// direction so lines complete early. Exact integer arithmetic throughout.
pub fn enumerate_binary_solutions(
    a: &SparseProjectionMatrix,
    p: &ProjectionVector,
    cap: usize,
) -> Result<EnumerationResult> {
    if p.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "projection vector has {} bins, matrix has {}",
            p.len(),
            a.m()
        )));
    }
    let mut target = Vec::with_capacity(a.m());
    for (i, &v) in p.values().iter().enumerate() {
        let r = v.round();
        if (v - r).abs() > 1e-9 {
            return Err(Error::NonIntegralProjection(i));
        }
        target.push(r as i64);
    }

    let mut pixel_rows: Vec<Vec<u32>> = vec![Vec::new(); a.n()];
    for i in 0..a.m() {
        for &j in a.row(i) {
            pixel_rows[j as usize].push(i as u32);
        }
    }

    let shortest = a
        .layout()
        .blocks()
        .iter()
        .enumerate()
        .min_by_key(|(_, b)| {
            let d = b.direction();
            d.a() * d.a() + d.b() * d.b()
        })
        .map(|(i, _)| i)
        .expect("layout has at least one block");
    let blk = &a.layout().blocks()[shortest];
    let mut order = Vec::with_capacity(a.n());
    for local in 0..blk.bin_count() {
        for &j in a.row(blk.offset() + local) {
            order.push(j as usize);
        }
    }
    debug_assert_eq!(order.len(), a.n());

    let remaining = (0..a.m()).map(|i| a.row(i).len() as i64).collect();
    let mut search = Search {
        pixel_rows: &pixel_rows,
        order: &order,
        target: &target,
        sums: vec![0; a.m()],
        remaining,
        assignment: vec![0; a.n()],
        solutions: Vec::new(),
        cap,
        truncated: false,
    };
    search.dfs(0);
    let mut sols = search.solutions;
    sols.sort();
    let grid = a.grid();
    let solutions = sols
        .into_iter()
        .map(|s| {
            Image::binary(grid, s.into_iter().map(f64::from).collect())
                .expect("enumerated values are binary")
        })
        .collect();
    Ok(EnumerationResult {
        solutions,
        truncated: search.truncated,
    })
}

fn to_dense(a: &SparseProjectionMatrix) -> DMatrix<f64> {
    let mut dense = DMatrix::zeros(a.m(), a.n());
    for i in 0..a.m() {
        for &j in a.row(i) {
            dense[(i, j as usize)] = 1.0;
        }
    }
    dense
}

/// Minimum-norm least-squares solution by dense SVD. Singular values below
/// `tol` (relative to the largest) are treated as null directions; the
/// remaining spectrum must be well conditioned.
pub fn dense_min_norm(
    a: &SparseProjectionMatrix,
    p: &ProjectionVector,
    tol: f64,
) -> Result<Image> {
    if p.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "projection vector has {} bins, matrix has {}",
            p.len(),
            a.m()
        )));
    }
    let svd = to_dense(a).svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = sigma_max * tol.max(f64::EPSILON);
    let sigma_min_kept = svd
        .singular_values
        .iter()
        .copied()
        .filter(|s| *s > cutoff)
        .fold(f64::INFINITY, f64::min);
    let cond = sigma_max / sigma_min_kept;
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::IllConditioned(cond));
    }
    let b = DVector::from_column_slice(p.values());
    let x = svd
        .solve(&b, cutoff)
        .map_err(|_| Error::IllConditioned(cond))?;
    Ok(Image::from_values(a.grid(), x.iter().copied().collect()))
}

/// Rank of A with singular values below `rel_tol`·σ_max counted as zero.
pub fn matrix_rank(a: &SparseProjectionMatrix, rel_tol: f64) -> usize {
    let svd = to_dense(a).svd(false, false);
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|s| **s > sigma_max * rel_tol)
        .count()
}

/// The separable ghost-weight expression evaluated on the true phantom:
/// (Σ_{I⁻} x̄(λᵢ+u) − Σ_{I⁺} x̄(λᵢ+u) − w_δ·x̄(λ_δ+u)) / 18,
/// with w_δ the doubled pixel's weight (±2). Exact, and equal to the
/// recovered weights, precisely when every pixel of H is covered once.
pub fn alpha_closed_form(xbar: &Image, bad: &BadConfiguration, u: Point) -> f64 {
    let at = |p: Point| xbar.get((p.0 + u.0, p.1 + u.1));
    let mut sum = 0.0;
    for &i in bad.iminus() {
        sum += at(bad.pixels()[i].0);
    }
    for &i in bad.iplus() {
        sum -= at(bad.pixels()[i].0);
    }
    sum -= bad.delta_weight() as f64 * at(bad.lambda_delta());
    sum / 18.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghost::build_bad_configuration;
    use crate::lattice::{detect_structure, Direction, DirectionSet, GridDims};
    use crate::solver::{cgls, SolverConfig};

    fn paper_fixture() -> (DirectionSet, GridDims, Image) {
        let s = DirectionSet::from_pairs([(1, 0), (1, 2), (0, 1), (2, 1)]).unwrap();
        let grid = GridDims::new(5, 5);
        #[rustfmt::skip]
        let phantom = Image::binary(grid, vec![
            0., 1., 1., 1., 1.,
            0., 1., 1., 1., 1.,
            0., 0., 1., 1., 0.,
            0., 0., 0., 0., 0.,
            0., 0., 0., 0., 0.,
        ]).unwrap();
        (s, grid, phantom)
    }

    #[test]
    fn paper_system_has_unique_solution() {
        let (s, grid, phantom) = paper_fixture();
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = a.forward_project(&phantom).unwrap();
        let res = enumerate_binary_solutions(&a, &p, 4).unwrap();
        assert!(!res.truncated);
        assert_eq!(res.solutions.len(), 1);
        assert_eq!(res.solutions[0].values(), phantom.values());
    }

    #[test]
    fn zero_data_has_only_zero_solution() {
        let (s, grid, _) = paper_fixture();
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = ProjectionVector::new(vec![0.0; a.m()]);
        let res = enumerate_binary_solutions(&a, &p, 4).unwrap();
        assert_eq!(res.solutions.len(), 1);
        assert!(res.solutions[0].values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_direction_ambiguity() {
        let dirs = [Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()];
        let grid = GridDims::new(5, 5);
        let a = SparseProjectionMatrix::from_directions(&dirs, grid);
        let mut vals = vec![0.0; 25];
        vals[grid.index_of((0, 0))] = 1.0;
        vals[grid.index_of((1, 1))] = 1.0;
        let phantom = Image::binary(grid, vals).unwrap();
        let p = a.forward_project(&phantom).unwrap();
        let res = enumerate_binary_solutions(&a, &p, 10).unwrap();
        assert_eq!(res.solutions.len(), 2);
        // cap smaller than the solution count reports truncation
        let res = enumerate_binary_solutions(&a, &p, 1).unwrap();
        assert!(res.truncated);
        assert_eq!(res.solutions.len(), 1);
    }

    #[test]
    fn non_integral_data_is_rejected() {
        let (s, grid, _) = paper_fixture();
        let a = SparseProjectionMatrix::build(&s, grid);
        let mut vals = vec![0.0; a.m()];
        vals[3] = 0.5;
        assert!(matches!(
            enumerate_binary_solutions(&a, &ProjectionVector::new(vals), 4),
            Err(Error::NonIntegralProjection(3))
        ));
    }

    #[test]
    fn dense_min_norm_matches_cgls() {
        let (s, grid, phantom) = paper_fixture();
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = a.forward_project(&phantom).unwrap();
        let dense = dense_min_norm(&a, &p, 1e-10).unwrap();
        let (iterative, _) = cgls(&a, &p, &SolverConfig::with_tol(1000, 1e-13)).unwrap();
        for (i, (d, c)) in dense.values().iter().zip(iterative.values()).enumerate() {
            assert!((d - c).abs() < 1e-8, "pixel {i}: {d} vs {c}");
        }
    }

    #[test]
    fn katz_system_is_ghost_free() {
        // h = 3 >= M = 3: trivial null space, the solve is exact
        let s = DirectionSet::from_pairs([(1, 0), (0, 1), (1, 1), (1, -1)]).unwrap();
        let grid = GridDims::new(3, 3);
        let a = SparseProjectionMatrix::build(&s, grid);
        assert_eq!(matrix_rank(&a, 1e-10), 9);
        let phantom = Image::binary(grid, vec![1., 0., 1., 0., 1., 0., 0., 0., 1.]).unwrap();
        let p = a.forward_project(&phantom).unwrap();
        let x = dense_min_norm(&a, &p, 1e-10).unwrap();
        for (got, want) in x.values().iter().zip(phantom.values()) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn min_norm_is_orthogonal_to_ghosts() {
        use crate::ghost;
        let (s, grid, phantom) = paper_fixture();
        let a = SparseProjectionMatrix::build(&s, grid);
        let p = a.forward_project(&phantom).unwrap();
        let x = dense_min_norm(&a, &p, 1e-10).unwrap();
        let case = detect_structure(&s).unwrap();
        let bad = build_bad_configuration(&s, case).unwrap();
        let e = ghost::enlarging_region(&s, grid);
        for u in e.points() {
            let g = ghost::build_ghost_gu(&bad, u, &e, grid).unwrap();
            let dot: f64 = x.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_bounds() {
        let (s, _, _) = paper_fixture();
        let case = detect_structure(&s).unwrap();
        let bad = build_bad_configuration(&s, case).unwrap();
        let grid = GridDims::new(5, 5);

        let zero = Image::zeros(grid);
        assert_eq!(alpha_closed_form(&zero, &bad, (0, 0)), 0.0);

        // ones exactly on the minus pixels: the upper bound 4/9 is attained
        let mut vals = vec![0.0; 25];
        for &i in bad.iminus() {
            vals[grid.index_of(bad.pixels()[i].0)] = 1.0;
        }
        let img = Image::binary(grid, vals.clone()).unwrap();
        assert!((alpha_closed_form(&img, &bad, (0, 0)) - 4.0 / 9.0).abs() < 1e-15);

        // ones on the plus pixels and the doubled pixel: lower bound −4/9
        let mut vals = vec![0.0; 25];
        for &i in bad.iplus() {
            vals[grid.index_of(bad.pixels()[i].0)] = 1.0;
        }
        vals[grid.index_of(bad.lambda_delta())] = 1.0;
        let img = Image::binary(grid, vals).unwrap();
        assert!((alpha_closed_form(&img, &bad, (0, 0)) + 4.0 / 9.0).abs() < 1e-15);
    }
}
