//! Lattice directions, grids, and the four-direction binary-uniqueness test.
//!
//! A direction is a coprime pair (a,b) with a >= 0, and a projection line in
//! direction (a,b) has equation a*y = b*x + t with integer intercept t. A set
//! of four directions of the shape u4 = u1 + u2 ± u3 that additionally passes
//! the partition conditions implemented by [`check_binary_uniqueness`] admits
//! exactly one binary image per consistent projection vector.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A lattice point or integer vector (x, y).
pub type Point = (i64, i64);

/// Normalized lattice direction: coprime (a, b) with a >= 0, and the
/// conventions a = 1 when b = 0, b = 1 when a = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    a: i64,
    b: i64,
}

impl Direction {
    /// Normalizes an arbitrary nonzero integer vector to its direction
    /// representative: divide by gcd(|a|,|b|), then flip sign so a >= 0
    /// (and b = 1 when a = 0).
    pub fn new(a: i64, b: i64) -> Result<Direction> {
        if a == 0 && b == 0 {
            return Err(Error::ZeroVector);
        }
        let g = gcd(a.unsigned_abs(), b.unsigned_abs()) as i64;
        let (mut a, mut b) = (a / g, b / g);
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
        }
        Ok(Direction { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn vector(&self) -> Point {
        (self.a, self.b)
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[i64; 2]>::deserialize(d)?;
        Direction::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// Pixel grid {(x, y) : 0 <= x < width, 0 <= y < height}, y axis downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    width: usize,
    height: usize,
}

impl GridDims {
    pub fn new(width: usize, height: usize) -> GridDims {
        assert!(width >= 1 && height >= 1, "grid sides must be >= 1");
        GridDims { width, height }
    }

    /// Horizontal pixel count M.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Vertical pixel count N.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Total pixel count n = M * N.
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: Point) -> bool {
        p.0 >= 0 && p.1 >= 0 && (p.0 as usize) < self.width && (p.1 as usize) < self.height
    }

    /// Row-major pixel index of (x, y): y * width + x.
    pub fn index_of(&self, p: Point) -> usize {
        debug_assert!(self.contains(p));
        p.1 as usize * self.width + p.0 as usize
    }

    pub fn point_at(&self, idx: usize) -> Point {
        ((idx % self.width) as i64, (idx / self.width) as i64)
    }
}

impl std::fmt::Display for GridDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// An ordered set of four pairwise distinct directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DirectionSet {
    dirs: [Direction; 4],
}

impl DirectionSet {
    pub fn new(dirs: [Direction; 4]) -> Result<DirectionSet> {
        for i in 0..4 {
            for j in i + 1..4 {
                if dirs[i] == dirs[j] {
                    return Err(Error::DuplicateDirection);
                }
            }
        }
        Ok(DirectionSet { dirs })
    }

    /// Builds the set from raw integer pairs, normalizing each.
    pub fn from_pairs(pairs: [(i64, i64); 4]) -> Result<DirectionSet> {
        let mut dirs = [Direction { a: 1, b: 0 }; 4];
        for (d, (a, b)) in dirs.iter_mut().zip(pairs) {
            *d = Direction::new(a, b)?;
        }
        DirectionSet::new(dirs)
    }

    pub fn dirs(&self) -> &[Direction; 4] {
        &self.dirs
    }

    /// (h, k) = (sum of a_r, sum of |b_r|).
    pub fn sums_hk(&self) -> (i64, i64) {
        let h = self.dirs.iter().map(|d| d.a).sum();
        let k = self.dirs.iter().map(|d| d.b.abs()).sum();
        (h, k)
    }

    /// h < M and k < N: ghosts fit inside the grid.
    pub fn is_valid(&self, grid: GridDims) -> bool {
        let (h, k) = self.sums_hk();
        h < grid.width() as i64 && k < grid.height() as i64
    }

    /// h >= M or k >= N: uniqueness holds with no further assumptions.
    pub fn katz_condition(&self, grid: GridDims) -> bool {
        let (h, k) = self.sums_hk();
        h >= grid.width() as i64 || k >= grid.height() as i64
    }
}

impl<'de> Deserialize<'de> for DirectionSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dirs = <[Direction; 4]>::deserialize(d)?;
        DirectionSet::new(dirs).map_err(serde::de::Error::custom)
    }
}

/// Sign of the structural identity u4 = u1 + u2 ± u3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// u1 + u2 = u3 + u4; the doubled pixel sits at lambda0 + u1 + u2 with weight +2.
    Minus,
    /// u4 = u1 + u2 + u3; the doubled pixel sits at lambda0 + u4 with weight -2.
    Plus,
}

/// A role assignment: `roles[r]` is the stored index playing u_{r+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureCase {
    pub tag: CaseTag,
    pub roles: [usize; 4],
}

impl StructureCase {
    /// The four direction vectors in role order (u1, u2, u3, u4).
    pub fn role_vectors(&self, s: &DirectionSet) -> [Point; 4] {
        self.roles.map(|i| s.dirs()[i].vector())
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for p0 in 0..4 {
        for p1 in 0..4 {
            for p2 in 0..4 {
                for p3 in 0..4 {
                    if p0 != p1 && p0 != p2 && p0 != p3 && p1 != p2 && p1 != p3 && p2 != p3 {
                        out.push([p0, p1, p2, p3]);
                    }
                }
            }
        }
    }
    out
}

fn add(u: Point, v: Point) -> Point {
    (u.0 + v.0, u.1 + v.1)
}

fn sub(u: Point, v: Point) -> Point {
    (u.0 - v.0, u.1 - v.1)
}

/// All role assignments satisfying u4 = u1 + u2 ± u3, in deterministic order:
/// permutations lexicographically, Minus checked before Plus within each.
///
/// Sign-flipped representatives need no separate search: any identity over
/// flipped representatives rearranges to u_i + u_j = u_k + u_l (Minus) or
/// u_i + u_j + u_k = u_l (Plus) over the normalized ones.
pub fn detect_structure_all(s: &DirectionSet) -> Vec<StructureCase> {
    let v: Vec<Point> = s.dirs().iter().map(|d| d.vector()).collect();
    let mut out = Vec::new();
    for roles in permutations4() {
        let [u1, u2, u3, u4] = roles.map(|i| v[i]);
        if sub(add(u1, u2), u3) == u4 {
            out.push(StructureCase {
                tag: CaseTag::Minus,
                roles,
            });
        }
        if add(add(u1, u2), u3) == u4 {
            out.push(StructureCase {
                tag: CaseTag::Plus,
                roles,
            });
        }
    }
    out
}

/// First matching role assignment under the documented deterministic order.
pub fn detect_structure(s: &DirectionSet) -> Result<StructureCase> {
    detect_structure_all(s)
        .into_iter()
        .next()
        .ok_or(Error::NoStructure)
}

/// The pair set D = (±S) ∪ (±Ŝ) split into the |a|-dominant and |b|-dominant
/// parts, with ties broken toward `pos_a` exactly when min{M−h, N−k} = M−h.
#[derive(Debug, Clone, Serialize)]
pub struct DPartition {
    pub d: Vec<Point>,
    pub pos_a: Vec<Point>,
    pub pos_b: Vec<Point>,
}

/// Builds D = ±S ∪ ±Ŝ with Ŝ = {u1−u4, u2−u4, u1+u2} as raw integer pairs
/// (entries need not be coprime) and partitions it.
pub fn build_d_partition(s: &DirectionSet, grid: GridDims, case: &StructureCase) -> DPartition {
    let [u1, u2, _, u4] = case.role_vectors(s);
    let mut d: Vec<Point> = Vec::with_capacity(14);
    let base: Vec<Point> = s
        .dirs()
        .iter()
        .map(|dir| dir.vector())
        .chain([sub(u1, u4), sub(u2, u4), add(u1, u2)])
        .collect();
    for v in base {
        for w in [v, (-v.0, -v.1)] {
            if !d.contains(&w) {
                d.push(w);
            }
        }
    }
    let (h, k) = s.sums_hk();
    let (mh, nk) = (grid.width() as i64 - h, grid.height() as i64 - k);
    let tie_to_a = mh.min(nk) == mh;
    let mut pos_a = Vec::new();
    let mut pos_b = Vec::new();
    for &(a, b) in &d {
        if a.abs() > b.abs() || (a.abs() == b.abs() && tie_to_a) {
            pos_a.push((a, b));
        } else {
            pos_b.push((a, b));
        }
    }
    DPartition { d, pos_a, pos_b }
}

/// Full decision record for one set on one grid. `is_binary_uniqueness_set`
/// is the conjunction of validity, structure, and the four conditions; an
/// empty side of the partition drops its min-condition.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub grid: GridDims,
    pub dirs: DirectionSet,
    pub h: i64,
    pub k: i64,
    pub valid: bool,
    pub katz: bool,
    pub structure: Option<StructureCase>,
    pub d: Vec<Point>,
    pub pos_a: Vec<Point>,
    pub pos_b: Vec<Point>,
    pub cond_iff1a: bool,
    pub cond_iff1b: bool,
    pub cond_b: bool,
    pub cond_a: bool,
    pub is_binary_uniqueness_set: bool,
}

/// Evaluates validity, structure, and the partition conditions:
/// min over pos_a of |a| and min over pos_b of |b| must reach min{M−h, N−k},
/// and when the grid margins differ, every element of the partition side
/// named after the smaller margin must clear one full margin.
pub fn check_binary_uniqueness(s: &DirectionSet, grid: GridDims) -> UniquenessReport {
    let (h, k) = s.sums_hk();
    let valid = s.is_valid(grid);
    let katz = s.katz_condition(grid);
    let structure = detect_structure_all(s).into_iter().next();
    let mut report = UniquenessReport {
        grid,
        dirs: s.clone(),
        h,
        k,
        valid,
        katz,
        structure,
        d: Vec::new(),
        pos_a: Vec::new(),
        pos_b: Vec::new(),
        cond_iff1a: false,
        cond_iff1b: false,
        cond_b: false,
        cond_a: false,
        is_binary_uniqueness_set: false,
    };
    let case = match (valid, &report.structure) {
        (true, Some(case)) => *case,
        _ => return report,
    };
    let part = build_d_partition(s, grid, &case);
    let (mh, nk) = (grid.width() as i64 - h, grid.height() as i64 - k);
    let min_margin = mh.min(nk);
    report.cond_iff1a = part
        .pos_a
        .iter()
        .map(|v| v.0.abs())
        .min()
        .is_none_or(|m| m >= min_margin);
    report.cond_iff1b = part
        .pos_b
        .iter()
        .map(|v| v.1.abs())
        .min()
        .is_none_or(|m| m >= min_margin);
    let clears = |v: &Point| v.0.abs() >= mh || v.1.abs() >= nk;
    report.cond_b = mh >= nk || part.pos_b.iter().all(clears);
    report.cond_a = nk >= mh || part.pos_a.iter().all(clears);
    report.is_binary_uniqueness_set =
        report.cond_iff1a && report.cond_iff1b && report.cond_b && report.cond_a;
    report.d = part.d;
    report.pos_a = part.pos_a;
    report.pos_b = part.pos_b;
    report
}

/// The constructive family {(1,0), (0,1), ((N−1)/2, (N−3)/2), ((N−3)/2, (N−1)/2)}
/// for odd N >= 5, which passes [`check_binary_uniqueness`] on the N×N grid.
pub fn construct_set_odd_n(n: i64) -> Result<DirectionSet> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::BadN(n));
    }
    let q = (n - 1) / 2;
    DirectionSet::from_pairs([(1, 0), (0, 1), (q, q - 1), (q - 1, q)])
}

/// Sufficient template test: some direction u1 attains both coordinate minima
/// with b1 >= 0, u4 is the sum of the other three, and the increments satisfy
/// 2(r1+r2) >= M − 7a1 and 2(s1+s2) >= N − 7b1. True implies the set passes
/// [`check_binary_uniqueness`]; the converse does not hold.
pub fn check_corollary2(s: &DirectionSet, grid: GridDims) -> bool {
    let v: Vec<Point> = s.dirs().iter().map(|d| d.vector()).collect();
    let (m, n) = (grid.width() as i64, grid.height() as i64);
    for delta in 0..4 {
        let rest: Vec<Point> = (0..4).filter(|&i| i != delta).map(|i| v[i]).collect();
        let total = rest.iter().fold((0, 0), |acc, &p| add(acc, p));
        if v[delta] != total {
            continue;
        }
        let a1 = rest.iter().map(|p| p.0).min().unwrap();
        let b1 = rest.iter().map(|p| p.1).min().unwrap();
        let Some(pos) = rest.iter().position(|&p| p == (a1, b1)) else {
            continue;
        };
        if b1 < 0 {
            continue;
        }
        let others: Vec<Point> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, &p)| p)
            .collect();
        let r_sum = others[0].0 + others[1].0 - 2 * a1;
        let s_sum = others[0].1 + others[1].1 - 2 * b1;
        if 2 * r_sum >= m - 7 * a1 && 2 * s_sum >= n - 7 * b1 {
            return true;
        }
    }
    false
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: [(i64, i64); 4]) -> DirectionSet {
        DirectionSet::from_pairs(pairs).unwrap()
    }

    #[test]
    fn normalization() {
        assert_eq!(Direction::new(0, 1).unwrap().vector(), (0, 1));
        assert_eq!(Direction::new(-3, -5).unwrap().vector(), (3, 5));
        assert_eq!(Direction::new(2, 4).unwrap().vector(), (1, 2));
        assert_eq!(Direction::new(0, -7).unwrap().vector(), (0, 1));
        assert_eq!(Direction::new(-4, 0).unwrap().vector(), (1, 0));
        assert!(matches!(Direction::new(0, 0), Err(Error::ZeroVector)));
    }

    #[test]
    fn sums_and_validity() {
        let s = set([(1, 0), (1, 2), (0, 1), (2, 1)]);
        assert_eq!(s.sums_hk(), (4, 4));
        assert!(s.is_valid(GridDims::new(5, 5)));
        assert!(!s.katz_condition(GridDims::new(5, 5)));

        let s = set([(80, 77), (81, 91), (80, 83), (241, 251)]);
        assert_eq!(s.sums_hk(), (482, 502));
        assert!(s.is_valid(GridDims::new(512, 512)));
        assert!(!s.katz_condition(GridDims::new(512, 512)));

        let s = set([(3, 5), (5, 3), (16, 15), (24, 23)]);
        assert_eq!(s.sums_hk(), (48, 46));
        // boundary of validity: h = M
        assert!(!s.is_valid(GridDims::new(48, 51)));
        assert!(s.katz_condition(GridDims::new(48, 51)));
        // Katz boundary case from a valid-shaped set on a smaller grid
        let s = set([(1, 0), (0, 1), (2, 1), (1, 2)]);
        assert!(s.katz_condition(GridDims::new(4, 4)));
    }

    #[test]
    fn structure_detection() {
        let s = set([(1, 0), (1, 2), (0, 1), (2, 1)]);
        let c = detect_structure(&s).unwrap();
        assert_eq!(c.tag, CaseTag::Minus);
        assert_eq!(c.roles, [0, 1, 2, 3]);

        let s = set([(3, 5), (5, 3), (16, 15), (24, 23)]);
        let c = detect_structure(&s).unwrap();
        assert_eq!(c.tag, CaseTag::Plus);
        assert_eq!(c.role_vectors(&s)[3], (24, 23));

        let s = set([(1, 0), (0, 1), (1, 1), (5, 7)]);
        assert!(matches!(detect_structure(&s), Err(Error::NoStructure)));
    }

    #[test]
    fn d_partition_512() {
        let s = set([(80, 77), (81, 91), (80, 83), (241, 251)]);
        let grid = GridDims::new(512, 512);
        let case = detect_structure(&s).unwrap();
        let part = build_d_partition(&s, grid, &case);
        let expected = [
            (80, 77),
            (81, 91),
            (80, 83),
            (241, 251),
            (161, 174),
            (160, 160),
            (161, 168),
        ];
        assert_eq!(part.d.len(), 14);
        for v in expected {
            assert!(part.d.contains(&v) && part.d.contains(&(-v.0, -v.1)), "{v:?}");
        }
        // h = 482, k = 502 on 512x512: min{M-h, N-k} = N-k = 10, so the tie
        // pair (160,160) lands in pos_b and only (80,77) dominates in |a|.
        assert_eq!(part.pos_a.len(), 2);
        assert!(part.pos_a.contains(&(80, 77)));
        assert!(part.pos_b.contains(&(160, 160)));
    }

    #[test]
    fn uniqueness_paper_sets() {
        for (pairs, m, n) in [
            ([(80, 77), (81, 91), (80, 83), (241, 251)], 512, 512),
            ([(3, 5), (5, 3), (16, 15), (24, 23)], 51, 51),
            ([(1, 0), (1, 2), (0, 1), (2, 1)], 5, 5),
            ([(5, 6), (7, 5), (3, -2), (9, 13)], 26, 28),
            ([(1, 1), (1, -1), (1, 2), (1, -2)], 6, 7),
            ([(1, 5), (3, 1), (4, 1), (8, 7)], 19, 19),
        ] {
            let rep = check_binary_uniqueness(&set(pairs), GridDims::new(m, n));
            assert!(rep.is_binary_uniqueness_set, "{pairs:?} on {m}x{n}: {rep:?}");
            assert!(!rep.katz);
        }
    }

    #[test]
    fn uniqueness_failures() {
        // corollary set is valid on 6x6 but fails the margin conditions
        let rep = check_binary_uniqueness(
            &set([(1, 0), (0, 1), (2, 1), (1, 2)]),
            GridDims::new(6, 6),
        );
        assert!(rep.valid && rep.structure.is_some());
        assert!(!rep.is_binary_uniqueness_set);
        // no structural identity at all
        let rep = check_binary_uniqueness(
            &set([(1, 0), (0, 1), (1, 1), (5, 7)]),
            GridDims::new(20, 20),
        );
        assert!(rep.structure.is_none() && !rep.is_binary_uniqueness_set);
    }

    #[test]
    fn corollary_construction() {
        let s = construct_set_odd_n(5).unwrap();
        assert_eq!(
            s.dirs().map(|d| d.vector()),
            [(1, 0), (0, 1), (2, 1), (1, 2)]
        );
        let s = construct_set_odd_n(51).unwrap();
        assert_eq!(
            s.dirs().map(|d| d.vector()),
            [(1, 0), (0, 1), (25, 24), (24, 25)]
        );
        assert!(matches!(construct_set_odd_n(4), Err(Error::BadN(4))));
        assert!(matches!(construct_set_odd_n(3), Err(Error::BadN(3))));
    }

    #[test]
    fn corollary_sweep() {
        for n in (5..=201).step_by(2) {
            let s = construct_set_odd_n(n).unwrap();
            let rep = check_binary_uniqueness(&s, GridDims::new(n as usize, n as usize));
            assert!(rep.is_binary_uniqueness_set, "N = {n}");
        }
    }

    #[test]
    fn corollary2_template() {
        let grid = GridDims::new(100, 100);
        let s = set([(7, 8), (20, 19), (20, 21), (47, 48)]);
        assert!(check_corollary2(&s, grid));
        assert!(check_binary_uniqueness(&s, grid).is_binary_uniqueness_set);

        // template mismatch: fourth direction is not the sum of the others
        let s = set([(1, 0), (1, 2), (0, 1), (2, 1)]);
        assert!(!check_corollary2(&s, GridDims::new(5, 5)));

        // example 4.1: no direction attains both minima, so the template
        // does not apply even though the set is one of binary uniqueness
        let s = set([(3, 5), (5, 3), (16, 15), (24, 23)]);
        assert!(!check_corollary2(&s, GridDims::new(51, 51)));
    }

    #[test]
    fn report_serializes() {
        let rep = check_binary_uniqueness(
            &set([(1, 0), (1, 2), (0, 1), (2, 1)]),
            GridDims::new(5, 5),
        );
        let js = serde_json::to_value(&rep).unwrap();
        assert_eq!(js["is_binary_uniqueness_set"], true);
        assert_eq!(js["cond_iff1a"], true);
        assert_eq!(js["dirs"][0], serde_json::json!([1, 0]));
    }
}
