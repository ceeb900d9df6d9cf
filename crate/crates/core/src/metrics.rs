//! Reconstruction quality measures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::projector::Image;

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    /// 100 · matching pixels / total pixels.
    pub percent_correct: f64,
    pub wrong_count: usize,
    pub wrong_pixels: Option<Vec<Point>>,
}

/// Pixelwise comparison of two same-sized images.
pub fn compare(truth: &Image, recon: &Image) -> Result<Metrics> {
    if truth.dims() != recon.dims() {
        return Err(Error::DimensionMismatch(format!(
            "truth is {}, reconstruction is {}",
            truth.dims(),
            recon.dims()
        )));
    }
    let dims = truth.dims();
    let wrong: Vec<Point> = truth
        .values()
        .iter()
        .zip(recon.values())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| dims.point_at(i))
        .collect();
    let n = dims.len();
    Ok(Metrics {
        percent_correct: 100.0 * (n - wrong.len()) as f64 / n as f64,
        wrong_count: wrong.len(),
        wrong_pixels: Some(wrong),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridDims;

    #[test]
    fn identical_images() {
        let g = GridDims::new(5, 5);
        let a = Image::binary(g, vec![1.0; 25]).unwrap();
        let m = compare(&a, &a).unwrap();
        assert_eq!(m.percent_correct, 100.0);
        assert_eq!(m.wrong_count, 0);
    }

    #[test]
    fn single_flip_and_symmetry() {
        let g = GridDims::new(5, 5);
        let a = Image::binary(g, vec![0.0; 25]).unwrap();
        let mut v = vec![0.0; 25];
        v[7] = 1.0;
        let b = Image::binary(g, v).unwrap();
        let m = compare(&a, &b).unwrap();
        assert_eq!(m.wrong_count, 1);
        assert!((m.percent_correct - 96.0).abs() < 1e-12);
        assert_eq!(m.wrong_pixels.unwrap(), vec![(2, 1)]);
        assert_eq!(compare(&b, &a).unwrap().wrong_count, 1);
    }

    #[test]
    fn all_flipped() {
        let g = GridDims::new(3, 3);
        let a = Image::binary(g, vec![0.0; 9]).unwrap();
        let b = Image::binary(g, vec![1.0; 9]).unwrap();
        let m = compare(&a, &b).unwrap();
        assert_eq!(m.percent_correct, 0.0);
        assert_eq!(m.wrong_count, 9);
    }

    #[test]
    fn dims_must_match() {
        let a = Image::zeros(GridDims::new(3, 3));
        let b = Image::zeros(GridDims::new(3, 4));
        assert!(matches!(compare(&a, &b), Err(Error::DimensionMismatch(_))));
    }
}
