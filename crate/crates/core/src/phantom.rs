//! Synthetic binary phantoms and named fixtures.
//!
//! The shape generators produce three qualitative families on any grid size:
//! a smooth-boundary blob, a fragmented-boundary blob with a small hole, and
//! a large object perforated by many holes. All generation is deterministic
//! in the seed.

use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formats;
use crate::lattice::{DirectionSet, GridDims};
use crate::projector::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeClass {
    Smooth,
    Fragmented,
    Holed,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 3] = [ShapeClass::Smooth, ShapeClass::Fragmented, ShapeClass::Holed];

    pub fn name(&self) -> &'static str {
        match self {
            ShapeClass::Smooth => "smooth",
            ShapeClass::Fragmented => "fragmented",
            ShapeClass::Holed => "holed",
        }
    }
}

impl FromStr for ShapeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<ShapeClass> {
        match s {
            "smooth" => Ok(ShapeClass::Smooth),
            "fragmented" => Ok(ShapeClass::Fragmented),
            "holed" => Ok(ShapeClass::Holed),
            other => Err(Error::parse(0, format!("unknown shape class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhantomKind {
    File(PathBuf),
    Random { density: f64, seed: u64 },
    Shapes { class: ShapeClass, seed: u64 },
    Fixture(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub kind: PhantomKind,
    pub dims: GridDims,
}

impl PhantomSpec {
    pub fn new(kind: PhantomKind, dims: GridDims) -> PhantomSpec {
        PhantomSpec { kind, dims }
    }

    /// Parses the CLI syntax: `file:PATH`, `random:DENSITY[:SEED]`,
    /// `shapes:CLASS[:SEED]`, `fixture:NAME`. Omitted seeds fall back to
    /// `default_seed`.
    pub fn parse(text: &str, dims: GridDims, default_seed: u64) -> Result<PhantomSpec> {
        let mut parts = text.splitn(2, ':');
        let head = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("");
        let kind = match head {
            "file" => PhantomKind::File(PathBuf::from(rest)),
            "fixture" => PhantomKind::Fixture(rest.to_string()),
            "random" => {
                let mut it = rest.split(':');
                let density: f64 = it
                    .next()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::parse(0, "random phantom needs a density"))?
                    .parse()
                    .map_err(|e| Error::parse(0, format!("bad density: {e}")))?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::parse(0, "density must lie in [0, 1]"));
                }
                let seed = match it.next() {
                    Some(s) => s
                        .parse()
                        .map_err(|e| Error::parse(0, format!("bad seed: {e}")))?,
                    None => default_seed,
                };
                PhantomKind::Random { density, seed }
            }
            "shapes" => {
                let mut it = rest.split(':');
                let class: ShapeClass = it
                    .next()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::parse(0, "shapes phantom needs a class"))?
                    .parse()?;
                let seed = match it.next() {
                    Some(s) => s
                        .parse()
                        .map_err(|e| Error::parse(0, format!("bad seed: {e}")))?,
                    None => default_seed,
                };
                PhantomKind::Shapes { class, seed }
            }
            other => {
                return Err(Error::parse(
                    0,
                    format!("unknown phantom kind {other:?} (file|random|shapes|fixture)"),
                ))
            }
        };
        Ok(PhantomSpec { kind, dims })
    }
}

/// The 5×5 fixture image used throughout the test corpus.
pub fn fixture_5x5_phantom() -> Image {
    #[rustfmt::skip]
    let values = vec![
        0., 1., 1., 1., 1.,
        0., 1., 1., 1., 1.,
        0., 0., 1., 1., 0.,
        0., 0., 0., 0., 0.,
        0., 0., 0., 0., 0.,
    ];
    Image::binary(GridDims::new(5, 5), values).expect("fixture is binary")
}

/// The direction set paired with the 5×5 fixture.
pub fn fixture_5x5_set() -> DirectionSet {
    DirectionSet::from_pairs([(1, 0), (1, 2), (0, 1), (2, 1)]).expect("fixture set is well formed")
}

fn ellipse_blob(dims: GridDims, rng: &mut ChaCha8Rng, ripple: f64, harmonics: usize) -> Vec<f64> {
    let (m, n) = (dims.width() as f64, dims.height() as f64);
    let cx = m / 2.0 + rng.gen_range(-0.05..0.05) * m;
    let cy = n / 2.0 + rng.gen_range(-0.05..0.05) * n;
    let rx = rng.gen_range(0.28..0.38) * m;
    let ry = rng.gen_range(0.28..0.38) * n;
    let coeffs: Vec<(f64, f64, f64)> = (0..harmonics)
        .map(|h| {
            (
                rng.gen_range(0.0..ripple),
                (h + 2) as f64,
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let mut values = vec![0.0; dims.len()];
    for y in 0..dims.height() {
        for x in 0..dims.width() {
            let dx = (x as f64 + 0.5 - cx) / rx;
            let dy = (y as f64 + 0.5 - cy) / ry;
            let r = (dx * dx + dy * dy).sqrt();
            let theta = dy.atan2(dx);
            let boundary: f64 = 1.0
                + coeffs
                    .iter()
                    .map(|(c, k, phi)| c * (k * theta + phi).sin())
                    .sum::<f64>();
            if r <= boundary {
                values[y * dims.width() + x] = 1.0;
            }
        }
    }
    values
}

fn punch_hole(dims: GridDims, values: &mut [f64], cx: f64, cy: f64, radius: f64) {
    for y in 0..dims.height() {
        for x in 0..dims.width() {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            if dx * dx + dy * dy <= radius * radius {
                values[y * dims.width() + x] = 0.0;
            }
        }
    }
}

fn shapes_phantom(class: ShapeClass, seed: u64, dims: GridDims) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (dims.width() as f64, dims.height() as f64);
    let mut values = match class {
        ShapeClass::Smooth => ellipse_blob(dims, &mut rng, 0.03, 2),
        ShapeClass::Fragmented => ellipse_blob(dims, &mut rng, 0.16, 7),
        ShapeClass::Holed => ellipse_blob(dims, &mut rng, 0.05, 3),
    };
    match class {
        ShapeClass::Smooth => {}
        ShapeClass::Fragmented => {
            let cx = m * rng.gen_range(0.4..0.6);
            let cy = n * rng.gen_range(0.4..0.6);
            punch_hole(dims, &mut values, cx, cy, 0.06 * m.min(n));
        }
        ShapeClass::Holed => {
            let holes = 4 + (rng.gen::<u64>() % 4) as usize;
            for _ in 0..holes {
                let cx = m * rng.gen_range(0.25..0.75);
                let cy = n * rng.gen_range(0.25..0.75);
                let r = rng.gen_range(0.04..0.09) * m.min(n);
                punch_hole(dims, &mut values, cx, cy, r);
            }
        }
    }
    Image::binary(dims, values).expect("generator emits 0/1")
}

/// Deterministic phantom generation; FILE and FIXTURE kinds are checked
/// against the declared grid dimensions.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<Image> {
    match &spec.kind {
        PhantomKind::Random { density, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let values = (0..spec.dims.len())
                .map(|_| if rng.gen::<f64>() < *density { 1.0 } else { 0.0 })
                .collect();
            Image::binary(spec.dims, values)
        }
        PhantomKind::Shapes { class, seed } => Ok(shapes_phantom(*class, *seed, spec.dims)),
        PhantomKind::Fixture(name) => match name.as_str() {
            "paper-5x5" => {
                let img = fixture_5x5_phantom();
                if img.dims() != spec.dims {
                    return Err(Error::DimensionMismatch(format!(
                        "fixture paper-5x5 is {}, requested {}",
                        img.dims(),
                        spec.dims
                    )));
                }
                Ok(img)
            }
            other => Err(Error::UnknownFixture(other.to_string())),
        },
        PhantomKind::File(path) => {
            let img = formats::load_image_auto(path)?;
            if img.dims() != spec.dims {
                return Err(Error::DimensionMismatch(format!(
                    "file {} is {}, requested {}",
                    path.display(),
                    img.dims(),
                    spec.dims
                )));
            }
            Ok(img)
        }
    }
}
