//! gridtomo — exact binary tomography on the lattice grid model.
//!
//! Pixels are lattice points, X-rays are lattice lines a·y = b·x + t, and a
//! projection counts the image values on one line. With four directions
//! chosen so that u4 = u1 + u2 ± u3 and a margin test on the derived pair
//! set passes, a consistent projection vector determines exactly one binary
//! image, and that image is recovered from the minimum-Euclidean-norm
//! solution of A x = p by reading ghost coefficients off a distinguished
//! block of pixels and rounding.
//!
//! Pipeline stages, mirrored by the module layout:
//!
//! 1. [`lattice`] — directions, grids, validity/Katz tests, the uniqueness
//!    decision procedure, and constructive families of good sets.
//! 2. [`ghost`] — the 15-pixel switching configuration, enlarging region,
//!    and per-pixel coefficient index.
//! 3. [`projector`] — bin layout and the sparse binary projection matrix.
//! 4. [`solver`] — CGLS iteration toward the minimum-norm solution.
//! 5. [`bra`] — weight recovery, correction, and binary round-off.
//! 6. [`oracle`] — brute-force enumeration and dense solves for validation.
//! 7. [`phantom`], [`metrics`], [`formats`], [`bench`] — test images,
//!    scoring, file formats, and the CGLS-vs-BRA comparison harness.

pub mod bench;
pub mod bra;
pub mod error;
pub mod formats;
pub mod ghost;
pub mod lattice;
pub mod metrics;
pub mod oracle;
pub mod phantom;
pub mod projector;
pub mod solver;

pub use bra::{bra, BraConfig, ReconstructionResult};
pub use error::{Error, Result};
pub use ghost::{expand_fs, BadConfiguration, EnlargingRegion, GhostRegionIndex};
pub use lattice::{
    check_binary_uniqueness, construct_set_odd_n, detect_structure, Direction, DirectionSet,
    GridDims, Point, UniquenessReport,
};
pub use projector::{BinLayout, Image, ImageKind, ProjectionVector, SparseProjectionMatrix};
pub use solver::{cgls, central_radius, SolverConfig, SolverTrace};
