//! Separating hyperplanes: 1D thresholds, 2D lines through perimeter grid
//! points, the orientation predicate, and two-way splits of a sample set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::SampleSet;

/// Relative tolerance under which the orientation determinant counts as zero.
pub const ORIENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Sign of the determinant of rows `(a, 1)`, `(b, 1)`, `(c, 1)`: `+1` when `c`
/// lies to the left of the directed line `a -> b`, `-1` to the right, `0` on it.
///
/// The result is exactly antisymmetric in `a` and `b`.
pub fn orient(a: Point2, b: Point2, c: Point2) -> Result<i8> {
    if a == b {
        return Err(Error::DegenerateLine((a.x, a.y)));
    }
    if (b.x, b.y) < (a.x, a.y) {
        return Ok(-orient_raw(b, a, c));
    }
    Ok(orient_raw(a, b, c))
}

fn orient_raw(a: Point2, b: Point2, c: Point2) -> i8 {
    let lhs = (b.x - a.x) * (c.y - a.y);
    let rhs = (b.y - a.y) * (c.x - a.x);
    let det = lhs - rhs;
    let tol = ORIENT_TOLERANCE * (lhs.abs() + rhs.abs());
    if det > tol {
        1
    } else if det < -tol {
        -1
    } else {
        0
    }
}

/// A two-way separator of the input space.
///
/// A threshold sends `x < t` to the first side and `x >= t` to the second.
/// A line sends points with non-negative orientation to the first side and
/// the rest to the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperplane {
    Threshold { t: f64 },
    Line { a: Point2, b: Point2 },
}

impl Hyperplane {
    pub fn dim(&self) -> usize {
        match self {
            Hyperplane::Threshold { .. } => 1,
            Hyperplane::Line { .. } => 2,
        }
    }

    /// Whether `point` falls on the first side.
    pub fn first_side(&self, point: &[f64]) -> Result<bool> {
        match *self {
            Hyperplane::Threshold { t } => Ok(point[0] < t),
            Hyperplane::Line { a, b } => Ok(orient(a, b, Point2::new(point[0], point[1]))? >= 0),
        }
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperplane::Threshold { t } => write!(f, "x = {t}"),
            Hyperplane::Line { a, b } => {
                write!(f, "line ({}, {}) -> ({}, {})", a.x, a.y, b.x, b.y)
            }
        }
    }
}

/// Indices of the samples on each side of `h`, in original order.
pub fn split_indices(data: &SampleSet, h: &Hyperplane) -> Result<(Vec<usize>, Vec<usize>)> {
    if data.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: data.dim(),
        });
    }
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (i, p) in data.points().enumerate() {
        if h.first_side(p)? {
            first.push(i);
        } else {
            second.push(i);
        }
    }
    Ok((first, second))
}

/// Splits `data` by `h`. Either side may be empty.
pub fn split(data: &SampleSet, h: &Hyperplane) -> Result<(Option<SampleSet>, Option<SampleSet>)> {
    let (first, second) = split_indices(data, h)?;
    Ok((data.subset(&first), data.subset(&second)))
}

/// Thresholds at every sample `x` that leave at least `min_points` samples on each side.
///
/// `data` must be one-dimensional (sorted, unique `x`).
pub fn candidates_1d(data: &SampleSet, min_points: usize) -> Vec<f64> {
    let n = data.len();
    let lo = min_points.max(1);
    if n < 2 * lo {
        return Vec::new();
    }
    // Sample k as threshold leaves k points strictly below it.
    data.xs()
        .enumerate()
        .skip(lo)
        .take(n + 1 - 2 * lo)
        .map(|(_, x)| x)
        .collect()
}

/// A uniform rectangular grid, `nx` by `ny` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::Grid(format!(
                "bounds [{x_min}, {x_max}] x [{y_min}, {y_max}] are not increasing"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::Grid(format!(
                "need at least 2 points per axis, got {nx} x {ny}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// `[0, 1]^2` sampled at step 0.1.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(0.0, 1.0, 0.0, 1.0, n, n)
    }

    pub fn x_at(&self, i: usize) -> f64 {
        lerp(self.x_min, self.x_max, i, self.nx)
    }

    pub fn y_at(&self, j: usize) -> f64 {
        lerp(self.y_min, self.y_max, j, self.ny)
    }

    /// All grid points, `x` outer and `y` inner.
    pub fn points(&self) -> Vec<Point2> {
        (0..self.nx)
            .flat_map(|i| (0..self.ny).map(move |j| (i, j)))
            .map(|(i, j)| Point2::new(self.x_at(i), self.y_at(j)))
            .collect()
    }

    /// Recovers the grid from 2D samples whose distinct coordinates are evenly spaced.
    pub fn infer(data: &SampleSet) -> Result<Self> {
        if data.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: data.dim(),
            });
        }
        let xs = distinct_axis(data.points().map(|p| p[0]), "x")?;
        let ys = distinct_axis(data.points().map(|p| p[1]), "y")?;
        Self::new(
            xs[0],
            xs[xs.len() - 1],
            ys[0],
            ys[ys.len() - 1],
            xs.len(),
            ys.len(),
        )
    }

    /// Perimeter edges the point lies on geometrically (corners lie on two).
    pub fn edges_containing(&self, p: Point2) -> Vec<Edge> {
        let close = |a: f64, b: f64, span: f64| (a - b).abs() <= 1e-9 * span;
        let (sx, sy) = (self.x_max - self.x_min, self.y_max - self.y_min);
        let mut edges = Vec::new();
        if close(p.y, self.y_min, sy) {
            edges.push(Edge::Bottom);
        }
        if close(p.x, self.x_min, sx) {
            edges.push(Edge::Left);
        }
        if close(p.y, self.y_max, sy) {
            edges.push(Edge::Top);
        }
        if close(p.x, self.x_max, sx) {
            edges.push(Edge::Right);
        }
        edges
    }
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn distinct_axis(values: impl Iterator<Item = f64>, axis: &str) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let span = v[v.len() - 1] - v[0];
    if span <= 0.0 {
        return Err(Error::Grid(format!("all {axis} coordinates are equal")));
    }
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * span);
    let step = span / (v.len() - 1) as f64;
    for (i, w) in v.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > 1e-6 * step {
            return Err(Error::Grid(format!(
                "{axis} coordinates are not evenly spaced (gap {} at index {i}, expected {step})",
                w[1] - w[0]
            )));
        }
    }
    Ok(v)
}

/// Perimeter edges: 1 bottom, 2 left, 3 top, 4 right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Bottom = 1,
    Left = 2,
    Top = 3,
    Right = 4,
}

impl Edge {
    pub fn number(self) -> u8 {
        self as u8
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            1 => Ok(Edge::Bottom),
            2 => Ok(Edge::Left),
            3 => Ok(Edge::Top),
            4 => Ok(Edge::Right),
            n => Err(serde::de::Error::custom(format!(
                "edge must be 1..=4, got {n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterPoint {
    pub point: Point2,
    pub edge: Edge,
}

/// Grid perimeter points in walk order: bottom left-to-right, right
/// bottom-to-top, top right-to-left, left top-to-bottom. Corners belong to
/// the bottom and top edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterIndex {
    points: Vec<PerimeterPoint>,
}

impl PerimeterIndex {
    pub fn points(&self) -> &[PerimeterPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&PerimeterPoint> {
        self.points.get(i)
    }
}

pub fn perimeter_points(grid: &GridSpec) -> PerimeterIndex {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut points = Vec::with_capacity(2 * nx + 2 * ny - 4);
    let mut push = |x, y, edge| {
        points.push(PerimeterPoint {
            point: Point2::new(x, y),
            edge,
        })
    };
    for i in 0..nx {
        push(grid.x_at(i), grid.y_min, Edge::Bottom);
    }
    for j in 1..ny - 1 {
        push(grid.x_max, grid.y_at(j), Edge::Right);
    }
    for i in (0..nx).rev() {
        push(grid.x_at(i), grid.y_max, Edge::Top);
    }
    for j in (1..ny - 1).rev() {
        push(grid.x_min, grid.y_at(j), Edge::Left);
    }
    PerimeterIndex { points }
}

/// A candidate line through perimeter points `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterLine {
    pub i: usize,
    pub j: usize,
    pub a: Point2,
    pub b: Point2,
}

impl PerimeterLine {
    pub fn hyperplane(&self) -> Hyperplane {
        Hyperplane::Line {
            a: self.a,
            b: self.b,
        }
    }
}

/// Every pair of perimeter points on different edges, ordered by `(i, j)`.
pub fn candidate_lines_2d(perim: &PerimeterIndex) -> Vec<PerimeterLine> {
    let pts = perim.points();
    let mut lines = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate().skip(i + 1) {
            if p.edge != q.edge {
                lines.push(PerimeterLine {
                    i,
                    j,
                    a: p.point,
                    b: q.point,
                });
            }
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)).unwrap(), 1);
        assert_eq!(orient(p(0.0, 0.0), p(1.0, 0.0), p(0.0, -1.0)).unwrap(), -1);
        assert_eq!(orient(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.0)).unwrap(), 0);
        assert!(orient(p(1.0, 1.0), p(1.0, 1.0), p(0.0, 0.0)).is_err());
    }

    #[test]
    fn orientation_tolerates_rounded_collinear_points() {
        let g = GridSpec::unit(11).unwrap();
        let (a, b) = (p(1.0, 0.0), p(0.0, 1.0));
        for i in 0..11 {
            let c = p(g.x_at(i), g.y_at(10 - i));
            assert_eq!(orient(a, b, c).unwrap(), 0, "{c:?}");
        }
    }

    #[test]
    fn one_d_candidates() {
        let d = SampleSet::from_xy(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0; 5]).unwrap();
        assert_eq!(candidates_1d(&d, 2), vec![2.0, 3.0]);
        assert!(candidates_1d(&d, 3).is_empty());
        let d = SampleSet::from_xy(&[0.0, 1.0], &[0.0; 2]).unwrap();
        assert_eq!(candidates_1d(&d, 1), vec![1.0]);
        let xs: Vec<f64> = (0..=2000).map(|i| i as f64 / 100.0).collect();
        let d = SampleSet::from_xy(&xs, &vec![0.0; xs.len()]).unwrap();
        assert_eq!(candidates_1d(&d, 3).len(), 1996);
    }

    #[test]
    fn threshold_split_puts_boundary_right() {
        let xs: Vec<f64> = (0..=20).map(f64::from).collect();
        let d = SampleSet::from_xy(&xs, &xs).unwrap();
        let (l, r) = split(&d, &Hyperplane::Threshold { t: 10.0 }).unwrap();
        let (l, r) = (l.unwrap(), r.unwrap());
        assert_eq!(
            l.xs().collect::<Vec<_>>(),
            (0..10).map(f64::from).collect::<Vec<_>>()
        );
        assert_eq!(r.xs().next(), Some(10.0));
        assert_eq!(r.len(), 11);
        let (l, r) = split(&d, &Hyperplane::Threshold { t: -1.0 }).unwrap();
        assert!(l.is_none());
        assert_eq!(r.unwrap().len(), 21);
    }

    #[test]
    fn diagonal_split_of_3x3_grid() {
        let g = GridSpec::unit(3).unwrap();
        let pts: Vec<(f64, f64)> = g.points().iter().map(|q| (q.x, q.y)).collect();
        let d = SampleSet::from_points_2d(&pts, 1, vec![0.0; 9]).unwrap();
        let h = Hyperplane::Line {
            a: p(0.0, 0.0),
            b: p(1.0, 1.0),
        };
        let (first, second) = split_indices(&d, &h).unwrap();
        assert_eq!((first.len(), second.len()), (6, 3));
        assert!(split_indices(&d, &Hyperplane::Threshold { t: 0.5 }).is_err());
    }

    #[test]
    fn perimeter_walk() {
        let per = perimeter_points(&GridSpec::unit(3).unwrap());
        let got: Vec<(f64, f64, u8)> = per
            .points()
            .iter()
            .map(|q| (q.point.x, q.point.y, q.edge.number()))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.0, 0.0, 1),
                (0.5, 0.0, 1),
                (1.0, 0.0, 1),
                (1.0, 0.5, 4),
                (1.0, 1.0, 3),
                (0.5, 1.0, 3),
                (0.0, 1.0, 3),
                (0.0, 0.5, 2),
            ]
        );
        assert_eq!(perimeter_points(&GridSpec::unit(2).unwrap()).len(), 4);
        assert_eq!(perimeter_points(&GridSpec::unit(11).unwrap()).len(), 40);
    }

    #[test]
    fn line_counts() {
        let count = |n| candidate_lines_2d(&perimeter_points(&GridSpec::unit(n).unwrap())).len();
        assert_eq!(count(2), 4);
        assert_eq!(count(3), 22);
        assert_eq!(count(11), 598);
    }

    #[test]
    fn grid_inference() {
        let g = GridSpec::new(-1.0, 2.0, 0.5, 1.5, 7, 5).unwrap();
        let pts: Vec<(f64, f64)> = g.points().iter().map(|q| (q.x, q.y)).collect();
        let d = SampleSet::from_points_2d(&pts, 1, vec![0.0; pts.len()]).unwrap();
        assert_eq!(GridSpec::infer(&d).unwrap(), g);
        let bad = SampleSet::from_points_2d(&[(0.0, 0.0), (1.0, 1.0), (3.0, 2.0)], 1, vec![0.0; 3])
            .unwrap();
        assert!(GridSpec::infer(&bad).is_err());
        assert!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 3, 3).is_err());
        assert!(GridSpec::unit(1).is_err());
    }

    #[test]
    fn corner_lies_on_two_edges() {
        let g = GridSpec::unit(11).unwrap();
        assert_eq!(
            g.edges_containing(p(1.0, 0.0)),
            vec![Edge::Bottom, Edge::Right]
        );
        assert_eq!(g.edges_containing(p(0.0, 0.5)), vec![Edge::Left]);
        assert!(g.edges_containing(p(0.5, 0.5)).is_empty());
    }
}
