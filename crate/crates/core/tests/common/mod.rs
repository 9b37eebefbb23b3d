//! Independent oracles and random-input generators shared by the
//! integration tests. Nothing here calls the algorithm it checks.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use tdakernel::filtration::Filtration;
use tdakernel::{PersistenceDiagram, PointCloud, RandomSource};

pub fn random_cloud(rng: &mut RandomSource, n: usize, scale: f64) -> PointCloud {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| [scale * rng.uniform(), scale * rng.uniform()])
        .collect();
    PointCloud::from_points_2d(&pts).unwrap()
}

pub fn perturb(rng: &mut RandomSource, x: &PointCloud, eps: f64) -> PointCloud {
    let pts: Vec<[f64; 2]> = x
        .points()
        .map(|p| {
            [
                p[0] + eps * (2.0 * rng.uniform() - 1.0),
                p[1] + eps * (2.0 * rng.uniform() - 1.0),
            ]
        })
        .collect();
    PointCloud::from_points_2d(&pts).unwrap()
}

/// Finite diagram with up to `max_points` points, births in `[0, 1)`,
/// persistence in `(0, max_pers]`.
pub fn random_diagram(
    rng: &mut RandomSource,
    max_points: usize,
    max_pers: f64,
) -> PersistenceDiagram {
    let m = rng.int_inclusive(0, max_points as i64) as usize;
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|_| {
            let b = rng.uniform();
            (b, b + max_pers * (1.0 - rng.uniform()))
        })
        .collect();
    PersistenceDiagram::from_points(1, &pts).unwrap()
}

pub fn random_nonempty_diagram(
    rng: &mut RandomSource,
    max_points: usize,
    max_pers: f64,
) -> PersistenceDiagram {
    loop {
        let d = random_diagram(rng, max_points, max_pers);
        if !d.is_empty() {
            return d;
        }
    }
}

// ---------------------------------------------------------------------------
// Betti numbers by Z/2 rank of boundary matrices

fn rank_z2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = rows.first().map_or(0, Vec::len);
    for bit in 0..words * 64 {
        let (w, mask) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & mask != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the boundary map from `q`-simplices to `(q-1)`-simplices of the
/// subcomplex with value `<= a`.
fn boundary_rank(simplices: &[(Vec<u32>, f64)], q: usize, a: f64) -> usize {
    if q == 0 {
        return 0;
    }
    let faces: Vec<&Vec<u32>> = simplices
        .iter()
        .filter(|(v, val)| v.len() == q && *val <= a)
        .map(|(v, _)| v)
        .collect();
    let cofaces: Vec<&Vec<u32>> = simplices
        .iter()
        .filter(|(v, val)| v.len() == q + 1 && *val <= a)
        .map(|(v, _)| v)
        .collect();
    if faces.is_empty() || cofaces.is_empty() {
        return 0;
    }
    let words = faces.len().div_ceil(64);
    let rows = cofaces
        .iter()
        .map(|s| {
            let mut row = vec![0u64; words];
            for skip in 0..s.len() {
                let face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let idx = faces
                    .iter()
                    .position(|f| **f == face)
                    .expect("face present");
                row[idx / 64] |= 1 << (idx % 64);
            }
            row
        })
        .collect();
    rank_z2(rows)
}

pub fn betti_oracle(f: &Filtration, q: usize, a: f64) -> usize {
    let simplices: Vec<(Vec<u32>, f64)> = f
        .simplices()
        .iter()
        .map(|s| (s.vertices.to_vec(), s.value))
        .collect();
    let n_q = simplices
        .iter()
        .filter(|(v, val)| v.len() == q + 1 && *val <= a)
        .count();
    n_q - boundary_rank(&simplices, q, a) - boundary_rank(&simplices, q + 1, a)
}

/// Number of pairs alive at `a` (birth `<= a <` death).
pub fn alive_count(d: &PersistenceDiagram, a: f64) -> usize {
    d.pairs()
        .iter()
        .filter(|p| p.birth <= a && a < p.death)
        .count()
}

// ---------------------------------------------------------------------------
// Bottleneck by enumerating every partial matching

fn linf(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

fn diag_cost(a: [f64; 2]) -> f64 {
    (a[1] - a[0]) / 2.0
}

fn brute(
    d: &[[f64; 2]],
    e: &[[f64; 2]],
    i: usize,
    used: &mut Vec<bool>,
    worst: f64,
    best: &mut f64,
) {
    if worst >= *best {
        return;
    }
    if i == d.len() {
        let rest = e
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(&y, _)| diag_cost(y))
            .fold(worst, f64::max);
        *best = best.min(rest);
        return;
    }
    brute(d, e, i + 1, used, worst.max(diag_cost(d[i])), best);
    for j in 0..e.len() {
        if !used[j] {
            used[j] = true;
            brute(d, e, i + 1, used, worst.max(linf(d[i], e[j])), best);
            used[j] = false;
        }
    }
}

pub fn bottleneck_oracle(d: &PersistenceDiagram, e: &PersistenceDiagram) -> f64 {
    let dp = d.finite_points().unwrap();
    let ep = e.finite_points().unwrap();
    let mut best = f64::INFINITY;
    brute(&dp, &ep, 0, &mut vec![false; ep.len()], 0.0, &mut best);
    best
}

// ---------------------------------------------------------------------------
// Minimum enclosing ball of three points

/// Exact radius: the optimal center is a pair midpoint or the circumcenter,
/// so take the smallest candidate ball that contains all three points.
pub fn meb_candidate_oracle(pts: [[f64; 2]; 3]) -> f64 {
    let mut centers = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            centers.push([(pts[i][0] + pts[j][0]) / 2.0, (pts[i][1] + pts[j][1]) / 2.0]);
        }
    }
    // circumcenter from the perpendicular bisector system by Cramer's rule
    let [a, b, c] = pts;
    let norm2 = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
    let (a11, a12, r1) = (b[0] - a[0], b[1] - a[1], (norm2(b) - norm2(a)) / 2.0);
    let (a21, a22, r2) = (c[0] - a[0], c[1] - a[1], (norm2(c) - norm2(a)) / 2.0);
    let det = a11 * a22 - a12 * a21;
    if det.abs() > 1e-300 {
        centers.push([(r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det]);
    }
    centers
        .into_iter()
        .map(|c| meb_cost(&pts, c))
        .fold(f64::INFINITY, f64::min)
}

fn meb_cost(pts: &[[f64; 2]; 3], c: [f64; 2]) -> f64 {
    pts.iter()
        .map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// Upper bound on the radius from repeated 41x41 grid search over a box that
/// shrinks by a quarter per round. Stalls slightly above the optimum when the
/// minimizer sits on a ridge, so it only bounds from above.
pub fn meb_grid_search(pts: [[f64; 2]; 3]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let mut half = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / 2.0).max(1e-9);
    let mut best = meb_cost(&pts, center);
    while half > 1e-12 * (1.0 + best) {
        let mut next = center;
        for i in -20..=20 {
            for j in -20..=20 {
                let c = [
                    center[0] + half * i as f64 / 20.0,
                    center[1] + half * j as f64 / 20.0,
                ];
                let v = meb_cost(&pts, c);
                if v < best {
                    best = v;
                    next = c;
                }
            }
        }
        center = next;
        half *= 0.75;
    }
    best
}

// ---------------------------------------------------------------------------
// Rips complex by enumerating every vertex subset

pub fn rips_oracle(x: &PointCloud, q_max: usize, r_max: f64) -> Vec<(Vec<u32>, f64)> {
    let n = x.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let verts: Vec<u32> = (0..n as u32).filter(|&i| mask >> i & 1 == 1).collect();
        if verts.len() > q_max + 2 {
            continue;
        }
        let mut diam: f64 = 0.0;
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                let (p, q) = (x.point(verts[a] as usize), x.point(verts[b] as usize));
                let d = p
                    .iter()
                    .zip(q)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt();
                diam = diam.max(d);
            }
        }
        if diam <= 2.0 * r_max {
            out.push((verts, diam / 2.0));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

// ---------------------------------------------------------------------------
// KFDR with explicit finite-dimensional features

pub fn random_psd(rng: &mut RandomSource, n: usize, rank: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, rank, |_, _| rng.standard_normal());
    let k = &a * a.transpose();
    (&k + k.transpose()) * 0.5
}

/// Features `F = V sqrt(Lambda)` from the Gram matrix, then
/// `ell (n - ell) / n * d' (S_w + gamma I)^-1 d` with `d` the class-mean
/// difference and `S_w` the pooled within-class covariance.
pub fn kfdr_explicit(k: &DMatrix<f64>, ell: usize, gamma: f64) -> f64 {
    let n = k.nrows();
    let eig = nalgebra::SymmetricEigen::new(k.clone());
    let mut f = DMatrix::zeros(n, n);
    for c in 0..n {
        let s = eig.eigenvalues[c].max(0.0).sqrt();
        for r in 0..n {
            f[(r, c)] = eig.eigenvectors[(r, c)] * s;
        }
    }
    let mean = |rows: std::ops::Range<usize>| -> DVector<f64> {
        let len = rows.len() as f64;
        let mut m = DVector::zeros(n);
        for r in rows {
            m += f.row(r).transpose();
        }
        m / len
    };
    let (m1, m2) = (mean(0..ell), mean(ell..n));
    let mut sw = DMatrix::zeros(n, n);
    for r in 0..n {
        let c = if r < ell { &m1 } else { &m2 };
        let v = f.row(r).transpose() - c;
        sw += &v * v.transpose();
    }
    sw /= n as f64;
    let d = &m2 - &m1;
    let reg = sw + DMatrix::identity(n, n) * gamma;
    let x = reg
        .lu()
        .solve(&d)
        .expect("regularized covariance is invertible");
    (ell * (n - ell)) as f64 / n as f64 * d.dot(&x)
}
