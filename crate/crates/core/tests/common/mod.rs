//! Fixture pool shared by the integration suites.

use gridtomo::phantom::{generate_phantom, PhantomKind, PhantomSpec};
use gridtomo::solver::{cgls, SolverConfig};
use gridtomo::{DirectionSet, GridDims, Image, ProjectionVector, SparseProjectionMatrix};

pub struct Fixture {
    pub name: &'static str,
    pub set: DirectionSet,
    pub grid: GridDims,
}

pub fn fixture(name: &'static str, pairs: [(i64, i64); 4], m: usize, n: usize) -> Fixture {
    Fixture {
        name,
        set: DirectionSet::from_pairs(pairs).expect("fixture pairs are well formed"),
        grid: GridDims::new(m, n),
    }
}

/// Every set here passes the binary-uniqueness check on its grid; the pool
/// spans both structure cases, singleton and extended enlarging regions,
/// overlapping and single-coverage ghost regions, and a negative-b direction.
pub fn pool() -> Vec<Fixture> {
    vec![
        fixture("paper-5x5", [(1, 0), (1, 2), (0, 1), (2, 1)], 5, 5),
        fixture("minus-6x7", [(1, 1), (1, -1), (1, 2), (1, -2)], 6, 7),
        fixture("corollary-7x7", [(1, 0), (0, 1), (3, 2), (2, 3)], 7, 7),
        fixture("plus-19x19", [(1, 5), (3, 1), (4, 1), (8, 7)], 19, 19),
        fixture("negb-26x28", [(5, 6), (7, 5), (3, -2), (9, 13)], 26, 28),
        fixture("plus-single-49x47", [(3, 5), (5, 3), (16, 15), (24, 23)], 49, 47),
        fixture("example41-51x51", [(3, 5), (5, 3), (16, 15), (24, 23)], 51, 51),
    ]
}

/// The pool members small enough for dense-rank work (n <= 400).
pub fn small_pool() -> Vec<Fixture> {
    pool()
        .into_iter()
        .filter(|f| f.grid.len() <= 400)
        .collect()
}

pub fn random_phantom(grid: GridDims, density: f64, seed: u64) -> Image {
    generate_phantom(&PhantomSpec::new(PhantomKind::Random { density, seed }, grid))
        .expect("random phantom generation")
}

/// Tightly converged minimum-norm iterate.
pub fn converge(a: &SparseProjectionMatrix, p: &ProjectionVector, tol: f64) -> Image {
    let cap = 40 * (a.n() as f64).sqrt().ceil() as usize + 200;
    let (x, trace) = cgls(a, p, &SolverConfig::with_tol(cap, tol)).expect("cgls run");
    assert!(
        *trace.normal_residuals.last().unwrap() <= tol * 10.0,
        "solver stalled at {:.3e} (target {tol:.1e})",
        trace.normal_residuals.last().unwrap()
    );
    x
}
