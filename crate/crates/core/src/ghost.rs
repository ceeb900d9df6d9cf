//! Symbolic ghost geometry: the 15-pixel weakly bad configuration obtained by
//! expanding the product of the four direction binomials, the enlarging
//! region of translations that keep it inside the grid, and the per-pixel
//! coefficient index that drives weight recovery.
//!
//! Everything here is exact integer arithmetic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{CaseTag, Direction, DirectionSet, GridDims, Point, StructureCase};
use crate::projector::Image;

/// Sparse integer polynomial in x, y with lattice-point exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolynomial {
    terms: BTreeMap<Point, i64>,
}

impl LatticePolynomial {
    pub fn one() -> LatticePolynomial {
        LatticePolynomial {
            terms: BTreeMap::from([((0, 0), 1)]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Point, i64)>) -> LatticePolynomial {
        let mut map = BTreeMap::new();
        for (p, c) in terms {
            let e = map.entry(p).or_insert(0);
            *e += c;
            if *e == 0 {
                map.remove(&p);
            }
        }
        LatticePolynomial { terms: map }
    }

    /// Terms in lexicographic exponent order; zero coefficients never stored.
    pub fn terms(&self) -> impl Iterator<Item = (Point, i64)> + '_ {
        self.terms.iter().map(|(&p, &c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: Point) -> i64 {
        self.terms.get(&p).copied().unwrap_or(0)
    }

    /// Sum of all coefficients, i.e. the value at x = y = 1.
    pub fn eval_at_one(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn mul(&self, other: &LatticePolynomial) -> LatticePolynomial {
        let mut out = BTreeMap::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                let p = (i1 + i2, j1 + j2);
                let e = out.entry(p).or_insert(0);
                *e += c1 * c2;
                if *e == 0 {
                    out.remove(&p);
                }
            }
        }
        LatticePolynomial { terms: out }
    }
}

impl std::fmt::Display for LatticePolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((x, y), c)) in self.terms.iter().rev().enumerate() {
            if i == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if *c < 0 { "-" } else { "+" })?;
            }
            let mag = c.abs();
            if mag != 1 || (*x == 0 && *y == 0) {
                write!(f, "{mag}")?;
            }
            match x {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{x}")?,
            }
            match y {
                0 => {}
                1 => write!(f, "y")?,
                _ => write!(f, "y^{y}")?,
            }
        }
        Ok(())
    }
}

/// The annihilating binomial of one direction:
/// x^a y^b − 1 (a≠0, b>0), x^a − y^{−b} (a≠0, b<0), x − 1, or y − 1.
pub fn binomial_factor(d: Direction) -> LatticePolynomial {
    let (a, b) = d.vector();
    let terms: [(Point, i64); 2] = if a != 0 && b > 0 {
        [((a, b), 1), ((0, 0), -1)]
    } else if a != 0 && b < 0 {
        [((a, 0), 1), ((0, -b), -1)]
    } else if b == 0 {
        [((1, 0), 1), ((0, 0), -1)]
    } else {
        [((0, 1), 1), ((0, 0), -1)]
    };
    LatticePolynomial::from_terms(terms)
}

/// Product of the binomials over an arbitrary direction list
/// (empty product = 1).
pub fn expand_product(dirs: &[Direction]) -> LatticePolynomial {
    dirs.iter()
        .fold(LatticePolynomial::one(), |acc, &d| {
            acc.mul(&binomial_factor(d))
        })
}

/// F_S(x, y), the product over all four directions of the set.
pub fn expand_fs(s: &DirectionSet) -> LatticePolynomial {
    expand_product(s.dirs())
}

/// The 15 weighted pixels of F_S with the distinguished y-axis pixel, the
/// doubled pixel, and the index sets of the ±1 pixels.
#[derive(Debug, Clone)]
pub struct BadConfiguration {
    pixels: Vec<(Point, i64)>,
    lambda0: Point,
    lambda_delta: Point,
    delta_weight: i64,
    iplus: Vec<usize>,
    iminus: Vec<usize>,
    case: StructureCase,
}

impl BadConfiguration {
    /// Pixels in lexicographic order with their weights.
    pub fn pixels(&self) -> &[(Point, i64)] {
        &self.pixels
    }

    /// The unique positive-weight pixel on the y-axis.
    pub fn lambda0(&self) -> Point {
        self.lambda0
    }

    /// The pixel of weight ±2.
    pub fn lambda_delta(&self) -> Point {
        self.lambda_delta
    }

    /// +2 in the Minus case, −2 in the Plus case.
    pub fn delta_weight(&self) -> i64 {
        self.delta_weight
    }

    /// Indices (into `pixels`) of the weight +1 pixels; contains lambda0.
    pub fn iplus(&self) -> &[usize] {
        &self.iplus
    }

    /// Indices of the weight −1 pixels.
    pub fn iminus(&self) -> &[usize] {
        &self.iminus
    }

    pub fn case(&self) -> StructureCase {
        self.case
    }
}

/// Expands F_S and identifies the distinguished pixels.
///
/// The y-axis pixel is the unique x-exponent-zero term with positive
/// coefficient; a second y-axis term of weight −1 appears exactly when the
/// set contains (0,1). The doubled pixel's position and sign are checked
/// against the role identity rather than assumed.
pub fn build_bad_configuration(s: &DirectionSet, case: StructureCase) -> Result<BadConfiguration> {
    let fs = expand_fs(s);
    if fs.len() != 15 {
        return Err(Error::NotUniquenessSet(format!(
            "F_S has {} terms, expected 15",
            fs.len()
        )));
    }
    let pixels: Vec<(Point, i64)> = fs.terms().collect();
    let doubles: Vec<usize> = pixels
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| c.abs() == 2)
        .map(|(i, _)| i)
        .collect();
    if doubles.len() != 1 || pixels.iter().any(|(_, c)| c.abs() > 2 || *c == 0) {
        return Err(Error::NotUniquenessSet(format!(
            "F_S has {} doubled pixels, expected exactly 1",
            doubles.len()
        )));
    }
    let (lambda_delta, delta_weight) = pixels[doubles[0]];

    let axis: Vec<&(Point, i64)> = pixels.iter().filter(|((x, _), _)| *x == 0).collect();
    let positive_axis: Vec<Point> = axis
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(p, _)| *p)
        .collect();
    if positive_axis.len() != 1 {
        return Err(Error::NotUniquenessSet(format!(
            "{} positive y-axis terms, expected exactly 1",
            positive_axis.len()
        )));
    }
    let lambda0 = positive_axis[0];

    let [u1, u2, _, u4] = case.role_vectors(s);
    let (expect_delta, expect_weight) = match case.tag {
        CaseTag::Minus => ((lambda0.0 + u1.0 + u2.0, lambda0.1 + u1.1 + u2.1), 2),
        CaseTag::Plus => ((lambda0.0 + u4.0, lambda0.1 + u4.1), -2),
    };
    if (lambda_delta, delta_weight) != (expect_delta, expect_weight) {
        return Err(Error::NotUniquenessSet(format!(
            "doubled pixel {lambda_delta:?} (weight {delta_weight}) does not match \
             the role identity's {expect_delta:?} (weight {expect_weight})"
        )));
    }

    let iplus: Vec<usize> = pixels
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| *c == 1)
        .map(|(i, _)| i)
        .collect();
    let iminus: Vec<usize> = pixels
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| *c == -1)
        .map(|(i, _)| i)
        .collect();
    debug_assert_eq!(iplus.len() + iminus.len(), 14);
    debug_assert_eq!(
        (iplus.len(), iminus.len()),
        match case.tag {
            CaseTag::Minus => (6, 8),
            CaseTag::Plus => (8, 6),
        }
    );
    Ok(BadConfiguration {
        pixels,
        lambda0,
        lambda_delta,
        delta_weight,
        iplus,
        iminus,
        case,
    })
}

/// The (M−h) × (N−k) rectangle of translations u for which F_S + u stays
/// inside the grid.
#[derive(Debug, Clone, Copy)]
pub struct EnlargingRegion {
    width: i64,
    height: i64,
}

impl EnlargingRegion {
    /// Horizontal extent M − h.
    pub fn width(&self) -> i64 {
        self.width
    }

    /// Vertical extent N − k.
    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn len(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, u: Point) -> bool {
        u.0 >= 0 && u.0 < self.width && u.1 >= 0 && u.1 < self.height
    }

    /// Lattice points column-major in x then y, i.e. (0,0), (0,1), ...
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let (w, h) = (self.width, self.height);
        (0..w).flat_map(move |p| (0..h).map(move |q| (p, q)))
    }
}

/// Enlarging region of a valid set on a grid.
pub fn enlarging_region(s: &DirectionSet, grid: GridDims) -> EnlargingRegion {
    assert!(s.is_valid(grid), "enlarging region requires a valid set");
    let (h, k) = s.sums_hk();
    EnlargingRegion {
        width: grid.width() as i64 - h,
        height: grid.height() as i64 - k,
    }
}

/// dim(null(A)) = (M−h)(N−k) for a set of binary uniqueness.
pub fn ghost_dimension(s: &DirectionSet, grid: GridDims) -> usize {
    enlarging_region(s, grid).len()
}

/// Coverage of one pixel of H: which translations reach it through a +1
/// pixel, a −1 pixel, or the doubled pixel.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    pub plus: Vec<Point>,
    pub minus: Vec<Point>,
    pub delta: Option<Point>,
}

impl Coverage {
    /// |E⁺(ξ,η) ∪ E⁻(ξ,η)| plus the doubled-pixel translate if present.
    pub fn multiplicity(&self) -> usize {
        self.plus.len() + self.minus.len() + usize::from(self.delta.is_some())
    }
}

/// Map from every pixel of H = ∪_{u∈E} (F_S + u) to its coverage.
#[derive(Debug, Clone)]
pub struct GhostRegionIndex {
    coverage: BTreeMap<Point, Coverage>,
}

impl GhostRegionIndex {
    pub fn coverage(&self) -> &BTreeMap<Point, Coverage> {
        &self.coverage
    }

    pub fn get(&self, p: Point) -> Option<&Coverage> {
        self.coverage.get(&p)
    }

    /// Number of pixels in H.
    pub fn len(&self) -> usize {
        self.coverage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coverage.is_empty()
    }
}

/// Builds the per-pixel index over H by translating every pixel of F_S along
/// every u in E. Each pixel of H can be reached from at most 14 pixels, so
/// the index size is linear in |H|.
pub fn build_ghost_index(bad: &BadConfiguration, region: &EnlargingRegion) -> GhostRegionIndex {
    let mut coverage: BTreeMap<Point, Coverage> = BTreeMap::new();
    let delta_idx = bad
        .pixels()
        .iter()
        .position(|(p, _)| *p == bad.lambda_delta())
        .unwrap();
    for u in region.points() {
        for (t, &(p, _)) in bad.pixels().iter().enumerate() {
            let q = (p.0 + u.0, p.1 + u.1);
            let cov = coverage.entry(q).or_default();
            if t == delta_idx {
                debug_assert!(cov.delta.is_none());
                cov.delta = Some(u);
            } else if bad.iplus().contains(&t) {
                cov.plus.push(u);
            } else {
                cov.minus.push(u);
            }
        }
    }
    GhostRegionIndex { coverage }
}

/// The base ghost g_u: zero off F_S + u, ±1 on the single pixels, ±2 on the
/// doubled pixel. Forward projection of g_u along every direction of S is
/// identically zero.
pub fn build_ghost_gu(
    bad: &BadConfiguration,
    u: Point,
    region: &EnlargingRegion,
    grid: GridDims,
) -> Result<Image> {
    if !region.contains(u) {
        return Err(Error::OutOfRegion(u));
    }
    let mut img = Image::zeros(grid);
    for &(p, w) in bad.pixels() {
        let q = (p.0 + u.0, p.1 + u.1);
        debug_assert!(grid.contains(q), "translated pixel {q:?} left the grid");
        img.set(q, w as f64);
    }
    Ok(img)
}
