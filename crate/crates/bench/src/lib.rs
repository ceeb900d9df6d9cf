//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Shared problem builders live here so the bench targets stay terse.

use gridtomo::phantom::{generate_phantom, PhantomKind, PhantomSpec, ShapeClass};
use gridtomo::{construct_set_odd_n, DirectionSet, GridDims, Image, SparseProjectionMatrix};

pub struct Problem {
    pub set: DirectionSet,
    pub grid: GridDims,
    pub matrix: SparseProjectionMatrix,
    pub phantom: Image,
}

/// The 63x63 reference problem used across the benchmarks.
pub fn problem_63() -> Problem {
    let grid = GridDims::new(63, 63);
    let set = construct_set_odd_n(63).expect("63 is odd");
    let matrix = SparseProjectionMatrix::build(&set, grid);
    let phantom = generate_phantom(&PhantomSpec::new(
        PhantomKind::Shapes {
            class: ShapeClass::Holed,
            seed: 1,
        },
        grid,
    ))
    .expect("phantom generation");
    Problem {
        set,
        grid,
        matrix,
        phantom,
    }
}
