//! Čech (planar, exact ball model) and Vietoris–Rips filtrations.
//!
//! Filtration values use the radius convention: an edge enters at half its
//! length, so both constructions share the scale of the union-of-balls model.

use std::cmp::Ordering;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::{min_enclosing_ball_radius_3pts, PointCloud};

pub type Vertices = SmallVec<[u32; 4]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Strictly increasing point indices.
    pub vertices: Vertices,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces in lexicographic order.
    pub fn faces(&self) -> impl Iterator<Item = Vertices> + '_ {
        let k = if self.vertices.len() > 1 {
            self.vertices.len()
        } else {
            0
        };
        (0..k).rev().map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationMode {
    Cech2d,
    Rips,
}

impl std::str::FromStr for FiltrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cech2d" => Ok(Self::Cech2d),
            "rips" => Ok(Self::Rips),
            other => Err(Error::param(format!("unknown filtration mode {other:?}"))),
        }
    }
}

/// Simplices in the total order (value, dimension, lexicographic vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    mode: FiltrationMode,
    n_points: usize,
    skeleton: usize,
}

fn filtration_order(a: &Simplex, b: &Simplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

impl Filtration {
    /// Builds a filtration from arbitrary simplices, sorting them into the
    /// canonical order and checking the face-value property.
    pub fn from_simplices(
        mut simplices: Vec<Simplex>,
        mode: FiltrationMode,
        n_points: usize,
        skeleton: usize,
    ) -> Result<Self> {
        for s in &simplices {
            if s.vertices.is_empty() || s.vertices.len() > skeleton + 1 {
                return Err(Error::param("simplex size outside skeleton"));
            }
            if !s.vertices.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::param("simplex vertices must be strictly increasing"));
            }
            if s.vertices.iter().any(|&v| v as usize >= n_points) {
                return Err(Error::param("vertex index out of range"));
            }
            if !s.value.is_finite() || s.value < 0.0 {
                return Err(Error::param("simplex value must be finite and nonnegative"));
            }
        }
        simplices.sort_by(filtration_order);
        let f = Self {
            simplices,
            mode,
            n_points,
            skeleton,
        };
        f.check_faces()?;
        Ok(f)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn mode(&self) -> FiltrationMode {
        self.mode
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Dimension of the skeleton this filtration was built up to.
    pub fn skeleton(&self) -> usize {
        self.skeleton
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Verifies that every face is present, precedes its coface, and has a
    /// value no larger than the coface's.
    pub fn check_faces(&self) -> Result<()> {
        let index = self.index_map();
        for (pos, s) in self.simplices.iter().enumerate() {
            for face in s.faces() {
                let Some(&fi) = index.get(&face) else {
                    return Err(Error::param(format!("missing face {face:?}")));
                };
                if fi >= pos || self.simplices[fi].value > s.value {
                    return Err(Error::param(format!("face {face:?} out of order")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn index_map(&self) -> std::collections::HashMap<Vertices, usize> {
        self.simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.clone(), i))
            .collect()
    }
}

fn edge_values(x: &PointCloud, r_max: f64) -> Vec<Option<f64>> {
    let n = x.len();
    let mut table = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = x.distance(i, j) / 2.0;
            if v <= r_max {
                table[i * n + j] = Some(v);
                table[j * n + i] = Some(v);
            }
        }
    }
    table
}

fn check_r_max(r_max: f64) -> Result<()> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::param(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    Ok(())
}

fn vertices_of(vs: &[u32]) -> Vertices {
    vs.iter().copied().collect()
}

/// Nerve of closed planar balls up to the 2-skeleton: vertices at 0, edges
/// at half their length, triangles at their minimum enclosing radius.
pub fn build_cech2d(x: &PointCloud, r_max: f64) -> Result<Filtration> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: x.dim(),
        });
    }
    check_r_max(r_max)?;
    let n = x.len();
    let edges = edge_values(x, r_max);
    let mut simplices: Vec<Simplex> = (0..n as u32)
        .map(|v| Simplex {
            vertices: vertices_of(&[v]),
            value: 0.0,
        })
        .collect();
    let pt = |i: usize| [x.point(i)[0], x.point(i)[1]];
    for i in 0..n {
        for j in i + 1..n {
            let Some(vij) = edges[i * n + j] else {
                continue;
            };
            simplices.push(Simplex {
                vertices: vertices_of(&[i as u32, j as u32]),
                value: vij,
            });
            for k in j + 1..n {
                if edges[i * n + k].is_none() || edges[j * n + k].is_none() {
                    continue;
                }
                let r = min_enclosing_ball_radius_3pts(pt(i), pt(j), pt(k));
                if r <= r_max {
                    simplices.push(Simplex {
                        vertices: vertices_of(&[i as u32, j as u32, k as u32]),
                        value: r,
                    });
                }
            }
        }
    }
    simplices.sort_by(filtration_order);
    Ok(Filtration {
        simplices,
        mode: FiltrationMode::Cech2d,
        n_points: n,
        skeleton: 2,
    })
}

/// Vietoris–Rips filtration with simplices of up to `q_max + 2` vertices.
/// A simplex enters at half its largest edge length.
pub fn build_rips(x: &PointCloud, q_max: usize, r_max: f64) -> Result<Filtration> {
    check_r_max(r_max)?;
    let n = x.len();
    let max_size = q_max + 2;
    let edges = edge_values(x, r_max);
    let mut simplices = Vec::new();
    let mut stack: Vec<u32> = Vec::with_capacity(max_size);

    // depth-first clique enumeration over increasing vertex ids
    fn extend(
        n: usize,
        edges: &[Option<f64>],
        max_size: usize,
        stack: &mut Vec<u32>,
        value: f64,
        out: &mut Vec<Simplex>,
    ) {
        out.push(Simplex {
            vertices: stack.iter().copied().collect(),
            value,
        });
        if stack.len() == max_size {
            return;
        }
        let last = *stack.last().expect("nonempty stack") as usize;
        for next in last + 1..n {
            let mut v = value;
            let mut ok = true;
            for &u in stack.iter() {
                match edges[u as usize * n + next] {
                    Some(e) => v = v.max(e),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                stack.push(next as u32);
                extend(n, edges, max_size, stack, v, out);
                stack.pop();
            }
        }
    }

    for v in 0..n {
        stack.push(v as u32);
        extend(n, &edges, max_size, &mut stack, 0.0, &mut simplices);
        stack.pop();
    }
    simplices.sort_by(filtration_order);
    Ok(Filtration {
        simplices,
        mode: FiltrationMode::Rips,
        n_points: n,
        skeleton: q_max + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> PointCloud {
        PointCloud::from_points_2d(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap()
    }

    fn square() -> PointCloud {
        PointCloud::from_points_2d(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    #[test]
    fn cech_equilateral_triangle() {
        let f = build_cech2d(&triangle(), 1.0).unwrap();
        assert_eq!(f.len(), 7);
        let edges: Vec<f64> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1)
            .map(|s| s.value)
            .collect();
        for e in edges {
            assert_abs_diff_eq!(e, 0.5, epsilon = 1e-15);
        }
        let tri = f.simplices().last().unwrap();
        assert_eq!(tri.dim(), 2);
        assert_abs_diff_eq!(tri.value, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        f.check_faces().unwrap();
    }

    #[test]
    fn cech_single_point_and_far_pair() {
        let one = PointCloud::from_points_2d(&[[2.0, 3.0]]).unwrap();
        let f = build_cech2d(&one, 1.0).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.simplices()[0].value, 0.0);

        let far = PointCloud::from_points_2d(&[[0.0, 0.0], [3.0, 0.0]]).unwrap();
        let f = build_cech2d(&far, 1.0).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.simplices().iter().all(|s| s.dim() == 0));
    }

    #[test]
    fn cech_rejects_bad_input() {
        let x3 = PointCloud::new(vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(
            build_cech2d(&x3, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(build_cech2d(&triangle(), 0.0).is_err());
    }

    #[test]
    fn rips_unit_square() {
        let f = build_rips(&square(), 1, 1.0).unwrap();
        let mut edges: Vec<f64> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1)
            .map(|s| s.value)
            .collect();
        edges.sort_by(f64::total_cmp);
        assert_eq!(edges.len(), 6);
        assert!(edges[..4].iter().all(|&e| e == 0.5));
        assert!(edges[4..]
            .iter()
            .all(|&e| (e - 2f64.sqrt() / 2.0).abs() < 1e-15));
        assert_eq!(f.simplices().iter().filter(|s| s.dim() == 2).count(), 4);
        f.check_faces().unwrap();
    }

    #[test]
    fn rips_small_radius_gives_vertices_only() {
        let f = build_rips(&square(), 2, 0.49).unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn cech_and_rips_share_one_skeleton() {
        let x = PointCloud::from_points_2d(&[
            [0.0, 0.0],
            [1.0, 0.2],
            [0.3, 0.9],
            [2.0, 2.0],
            [1.1, 1.4],
        ])
        .unwrap();
        let low = |f: &Filtration| -> Vec<Simplex> {
            f.simplices()
                .iter()
                .filter(|s| s.dim() <= 1)
                .cloned()
                .collect()
        };
        assert_eq!(
            low(&build_cech2d(&x, 1.2).unwrap()),
            low(&build_rips(&x, 1, 1.2).unwrap())
        );
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let x = square();
        assert_eq!(
            build_cech2d(&x, 2.0).unwrap(),
            build_cech2d(&x, 2.0).unwrap()
        );
    }

    #[test]
    fn faces_enumeration() {
        let s = Simplex {
            vertices: vertices_of(&[1, 4, 7]),
            value: 0.0,
        };
        let faces: Vec<Vec<u32>> = s.faces().map(|f| f.to_vec()).collect();
        assert_eq!(faces, vec![vec![1, 4], vec![1, 7], vec![4, 7]]);
        let v = Simplex {
            vertices: vertices_of(&[3]),
            value: 0.0,
        };
        assert_eq!(v.faces().count(), 0);
    }
}
