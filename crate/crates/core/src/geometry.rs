//! Point clouds and Euclidean metric computations.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A finite multiset of points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidPointCloud("no points".into()))?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidPointCloud(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointCloud(
                "dimension must be positive".into(),
            ));
        }
        if coords.is_empty() {
            return Err(Error::InvalidPointCloud("no points".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidPointCloud(format!(
                "{} coordinates do not divide into dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPointCloud("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points_2d(points: &[[f64; 2]]) -> Result<Self> {
        Self::from_flat(2, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false for a constructed cloud.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }

    /// Parses the plain-text cloud format: one point per line, coordinates
    /// separated by commas and/or whitespace, `#` lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut coords = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Vec<f64> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::parse(lineno + 1, format!("bad coordinate {t:?}")))
                })
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::parse(
                        lineno + 1,
                        format!("ragged row: {} coordinates, expected {d}", row.len()),
                    ))
                }
                _ => {}
            }
            coords.extend(row);
        }
        let dim = dim.ok_or_else(|| Error::parse(0, "no points in input"))?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::parse(0, "non-finite coordinate"));
        }
        Self::from_flat(dim, coords)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|c| crate::fmt::g17(*c)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric matrix of Euclidean distances with zero diagonal.
pub fn pairwise_distances(x: &PointCloud) -> DMatrix<f64> {
    let n = x.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = x.distance(i, j);
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    m
}

fn directed_hausdorff(x: &PointCloud, y: &PointCloud) -> f64 {
    x.points()
        .map(|p| {
            y.points()
                .map(|q| euclidean(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `max(sup_x inf_y |x-y|, sup_y inf_x |x-y|)`.
pub fn hausdorff_distance(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(directed_hausdorff(x, y).max(directed_hausdorff(y, x)))
}

/// Radius of the smallest disk containing three planar points.
///
/// Non-acute (including collinear) triangles are enclosed by the disk on their
/// longest side; acute ones by their circumcircle. The longest-side branch
/// reuses [`euclidean`] so that the value coincides bit-for-bit with the
/// corresponding edge value in a filtration.
pub fn min_enclosing_ball_radius_3pts(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let ab = euclidean(&a, &b);
    let bc = euclidean(&b, &c);
    let ca = euclidean(&c, &a);
    let mut sides = [ab, bc, ca];
    sides.sort_by(f64::total_cmp);
    let [s0, s1, longest] = sides;
    let half = longest / 2.0;
    if s0 * s0 + s1 * s1 <= longest * longest {
        return half;
    }
    // circumcenter relative to `a`
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let det = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / det;
    let uy = (bx * c2 - cx * b2) / det;
    let circumradius = (ux * ux + uy * uy).sqrt();
    circumradius.max(half)
}
