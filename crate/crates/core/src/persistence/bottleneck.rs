use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::PersistenceDiagram;

/// Maximum bipartite matching by Hopcroft–Karp. `adj[u]` lists the right
/// vertices adjacent to left vertex `u`. Returns the matching size.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;

    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            match_l: &mut [usize],
            match_r: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == usize::MAX
                    || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist))
                {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }

        for u in 0..n_left {
            if match_l[u] == FREE && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                size += 1;
            }
        }
    }
    size
}

fn linf(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// Whether a perfect matching with every cost `<= eps` exists. Left side:
/// points of `d` then diagonal slots for `e`; right side: points of `e` then
/// diagonal slots for `d`.
fn feasible(d: &[[f64; 2]], e: &[[f64; 2]], eps: f64) -> bool {
    let (n, m) = (d.len(), e.len());
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n + m);
    for (i, &x) in d.iter().enumerate() {
        let mut row: Vec<usize> = (0..m).filter(|&j| linf(x, e[j]) <= eps).collect();
        if (x[1] - x[0]) / 2.0 <= eps {
            row.push(m + i);
        }
        adj.push(row);
    }
    for (j, &y) in e.iter().enumerate() {
        let mut row = Vec::with_capacity(n + 1);
        if (y[1] - y[0]) / 2.0 <= eps {
            row.push(j);
        }
        // diagonal-to-diagonal matches are free
        row.extend(m..m + n);
        adj.push(row);
    }
    hopcroft_karp(&adj, n + m) == n + m
}

/// Exact bottleneck distance between two finite diagrams of the same degree.
///
/// The optimum is always one of the candidate costs (pairwise L∞ distances
/// and half-persistences), so a binary search over the sorted candidates with
/// a matching feasibility test returns it exactly.
pub fn bottleneck_distance(d: &PersistenceDiagram, e: &PersistenceDiagram) -> Result<f64> {
    if d.degree() != e.degree() {
        return Err(Error::DegreeMismatch {
            left: d.degree(),
            right: e.degree(),
        });
    }
    let dp = d.finite_points()?;
    let ep = e.finite_points()?;
    let mut candidates: Vec<f64> = vec![0.0];
    for &x in &dp {
        candidates.push((x[1] - x[0]) / 2.0);
        candidates.extend(ep.iter().map(|&y| linf(x, y)));
    }
    candidates.extend(ep.iter().map(|y| (y[1] - y[0]) / 2.0));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // the largest candidate is always feasible (everything to the diagonal
    // costs at most the largest half-persistence)
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&dp, &ep, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}
