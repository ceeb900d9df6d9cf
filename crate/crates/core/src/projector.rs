//! Bin layout, sparse binary projection matrix, and (transposed) application.
//!
//! Bins are ordered block-by-block in the stored direction order; within a
//! block, bins follow increasing line intercept t over the intercepts that
//! actually meet the grid. One row of the matrix lists the pixels of one
//! lattice line; every pixel lies on exactly one line per direction, so each
//! column of a d-direction matrix carries exactly d ones.

use crate::error::{Error, Result};
use crate::lattice::{Direction, DirectionSet, GridDims, Point};

/// Whether every stored sample is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageKind {
    Binary,
    Real,
}

/// A grid function in row-major order ((x, y) ↦ y * width + x).
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    dims: GridDims,
    values: Vec<f64>,
    kind: ImageKind,
}

impl Image {
    pub fn zeros(dims: GridDims) -> Image {
        Image {
            dims,
            values: vec![0.0; dims.len()],
            kind: ImageKind::Real,
        }
    }

    pub fn from_values(dims: GridDims, values: Vec<f64>) -> Image {
        assert_eq!(values.len(), dims.len(), "value count must match grid");
        Image {
            dims,
            values,
            kind: ImageKind::Real,
        }
    }

    /// Builds a binary image; every value must be exactly 0 or 1.
    pub fn binary(dims: GridDims, values: Vec<f64>) -> Result<Image> {
        if values.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for grid {dims}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| *v != 0.0 && *v != 1.0) {
            return Err(Error::DimensionMismatch(format!(
                "pixel {i} has non-binary value {}",
                values[i]
            )));
        }
        Ok(Image {
            dims,
            values,
            kind: ImageKind::Binary,
        })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn kind(&self) -> ImageKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: Point) -> f64 {
        self.values[self.dims.index_of(p)]
    }

    pub fn set(&mut self, p: Point, v: f64) {
        let i = self.dims.index_of(p);
        self.values[i] = v;
        if self.kind == ImageKind::Binary && v != 0.0 && v != 1.0 {
            self.kind = ImageKind::Real;
        }
    }

    /// Number of pixels where the two images differ.
    pub fn diff_count(&self, other: &Image) -> usize {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn norm_l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Intercept of the line through `p` in direction `d`: t = a*y − b*x.
pub fn line_of(p: Point, d: Direction) -> i64 {
    d.a() * p.1 - d.b() * p.0
}

/// Number of lines in direction `d` that meet an M×N grid:
/// (M−a)|b| + (N−|b|)a + a|b|.
pub fn bin_count(d: Direction, grid: GridDims) -> i64 {
    let (m, n) = (grid.width() as i64, grid.height() as i64);
    let (a, b) = (d.a(), d.b().abs());
    (m - a) * b + (n - b) * a + a * b
}

/// One direction's contiguous bin block.
#[derive(Debug, Clone)]
pub struct DirectionBlock {
    direction: Direction,
    offset: usize,
    t_values: Vec<i64>,
}

impl DirectionBlock {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Offset of this block's first bin in the assembled vector.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn bin_count(&self) -> usize {
        self.t_values.len()
    }

    /// Realized intercepts, increasing; bin i of the block is t_values[i].
    pub fn t_values(&self) -> &[i64] {
        &self.t_values
    }

    /// Block-local bin index of intercept `t`.
    pub fn bin_of(&self, t: i64) -> Option<usize> {
        self.t_values.binary_search(&t).ok()
    }
}

/// Deterministic line-to-row indexing for a direction list on a grid.
#[derive(Debug, Clone)]
pub struct BinLayout {
    grid: GridDims,
    blocks: Vec<DirectionBlock>,
    m: usize,
}

impl BinLayout {
    pub fn build(dirs: &[Direction], grid: GridDims) -> BinLayout {
        let mut blocks = Vec::with_capacity(dirs.len());
        let mut offset = 0;
        for &d in dirs {
            let (a, b) = (d.a(), d.b());
            let (m, n) = (grid.width() as i64, grid.height() as i64);
            let t_min = if b >= 0 { -b * (m - 1) } else { 0 };
            let t_max = if b >= 0 {
                a * (n - 1)
            } else {
                a * (n - 1) - b * (m - 1)
            };
            let mut seen = vec![false; (t_max - t_min + 1) as usize];
            for y in 0..n {
                for x in 0..m {
                    seen[(a * y - b * x - t_min) as usize] = true;
                }
            }
            let t_values: Vec<i64> = seen
                .iter()
                .enumerate()
                .filter(|(_, s)| **s)
                .map(|(i, _)| i as i64 + t_min)
                .collect();
            if a < m && b.abs() < n {
                assert_eq!(
                    t_values.len() as i64,
                    bin_count(d, grid),
                    "realized bins disagree with the bin-count formula for {d}"
                );
            }
            let count = t_values.len();
            blocks.push(DirectionBlock {
                direction: d,
                offset,
                t_values,
            });
            offset += count;
        }
        BinLayout {
            grid,
            blocks,
            m: offset,
        }
    }

    pub fn for_set(s: &DirectionSet, grid: GridDims) -> BinLayout {
        BinLayout::build(s.dirs(), grid)
    }

    pub fn grid(&self) -> GridDims {
        self.grid
    }

    /// Total bin count m.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[DirectionBlock] {
        &self.blocks
    }

    /// Global bin index of intercept `t` in block `block`.
    pub fn bin_index(&self, block: usize, t: i64) -> Option<usize> {
        let blk = &self.blocks[block];
        blk.bin_of(t).map(|i| blk.offset + i)
    }

    /// Splits a flat vector of length m into per-block slices.
    pub fn split_blocks<'a>(&self, values: &'a [f64]) -> Vec<&'a [f64]> {
        assert_eq!(values.len(), self.m);
        self.blocks
            .iter()
            .map(|b| &values[b.offset..b.offset + b.bin_count()])
            .collect()
    }
}

/// One measurement per lattice line, in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionVector {
    values: Vec<f64>,
}

impl ProjectionVector {
    pub fn new(values: Vec<f64>) -> ProjectionVector {
        ProjectionVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

/// Row-oriented binary matrix: row i lists the pixels on line i.
#[derive(Debug, Clone)]
pub struct SparseProjectionMatrix {
    layout: BinLayout,
    rows: Vec<Vec<u32>>,
    n: usize,
}

impl SparseProjectionMatrix {
    pub fn build(s: &DirectionSet, grid: GridDims) -> SparseProjectionMatrix {
        Self::from_directions(s.dirs(), grid)
    }

    pub fn from_directions(dirs: &[Direction], grid: GridDims) -> SparseProjectionMatrix {
        let layout = BinLayout::build(dirs, grid);
        Self::from_layout(layout)
    }

    pub fn from_layout(layout: BinLayout) -> SparseProjectionMatrix {
        let grid = layout.grid();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); layout.m()];
        for (bi, blk) in layout.blocks().iter().enumerate() {
            let d = blk.direction();
            for y in 0..grid.height() as i64 {
                for x in 0..grid.width() as i64 {
                    let row = layout.bin_index(bi, line_of((x, y), d)).unwrap();
                    rows[row].push(grid.index_of((x, y)) as u32);
                }
            }
        }
        SparseProjectionMatrix {
            n: grid.len(),
            layout,
            rows,
        }
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> &BinLayout {
        &self.layout
    }

    pub fn grid(&self) -> GridDims {
        self.layout.grid()
    }

    /// Pixel indices on line `i`, sorted ascending.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// p = A x.
    pub fn forward_project(&self, x: &Image) -> Result<ProjectionVector> {
        if x.dims() != self.grid() {
            return Err(Error::DimensionMismatch(format!(
                "image is {}, matrix expects {}",
                x.dims(),
                self.grid()
            )));
        }
        let xv = x.values();
        let values = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&j| xv[j as usize]).sum())
            .collect();
        Ok(ProjectionVector::new(values))
    }

    /// Returns Aᵀ p as a real-valued image.
    pub fn back_project(&self, p: &ProjectionVector) -> Result<Image> {
        if p.len() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "projection vector has {} bins, matrix has {}",
                p.len(),
                self.m()
            )));
        }
        let mut out = vec![0.0; self.n];
        for (row, &v) in self.rows.iter().zip(p.values()) {
            for &j in row {
                out[j as usize] += v;
            }
        }
        Ok(Image::from_values(self.grid(), out))
    }
}
