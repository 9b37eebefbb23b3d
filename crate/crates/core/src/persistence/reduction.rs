use crate::error::{Error, Result};
use crate::filtration::{Filtration, Vertices};

use super::{PersistenceDiagram, PersistencePair};

/// Pairs with `death - birth <= ZERO_PERSISTENCE_RTOL * max(1, |death|)` lie
/// on the diagonal up to rounding and are dropped.
pub const ZERO_PERSISTENCE_RTOL: f64 = 1e-12;

/// Column-reduction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Left-to-right reduction of every column.
    Standard,
    /// Top-dimension-first reduction that zeroes columns known to be
    /// positive (clearing).
    #[default]
    Twist,
}

const NONE: u32 = u32::MAX;

/// Sorted face indices of every simplex, restricted to dimension `max_dim`.
fn boundary_columns(f: &Filtration, max_dim: usize) -> Vec<Vec<u32>> {
    let n = f.n_points();
    let simplices = f.simplices();
    let mut vertex_index = vec![NONE; n];
    let mut edge_index = vec![NONE; n * n];
    let mut higher: std::collections::HashMap<Vertices, u32> = Default::default();
    for (i, s) in simplices.iter().enumerate() {
        match s.vertices.len() {
            1 => vertex_index[s.vertices[0] as usize] = i as u32,
            2 => edge_index[s.vertices[0] as usize * n + s.vertices[1] as usize] = i as u32,
            k if k <= max_dim => {
                higher.insert(s.vertices.clone(), i as u32);
            }
            _ => {}
        }
    }
    simplices
        .iter()
        .map(|s| {
            if s.dim() > max_dim || s.dim() == 0 {
                return Vec::new();
            }
            let mut col: Vec<u32> = match s.vertices.len() {
                2 => vec![
                    vertex_index[s.vertices[0] as usize],
                    vertex_index[s.vertices[1] as usize],
                ],
                3 => {
                    let v = &s.vertices;
                    let e = |a: u32, b: u32| edge_index[a as usize * n + b as usize];
                    vec![e(v[0], v[1]), e(v[0], v[2]), e(v[1], v[2])]
                }
                _ => s.faces().map(|face| higher[&face]).collect(),
            };
            col.sort_unstable();
            col
        })
        .collect()
}

/// Z/2 column addition of two sorted index lists.
fn add_columns(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn reduce_column(j: usize, cols: &mut [Vec<u32>], pivot_of: &[u32]) {
    let mut col = std::mem::take(&mut cols[j]);
    while let Some(&low) = col.last() {
        let k = pivot_of[low as usize];
        if k == NONE {
            break;
        }
        col = add_columns(&col, &cols[k as usize]);
    }
    cols[j] = col;
}

/// Returns `pivot_of[row] = column` for every persistence pair.
fn reduce(f: &Filtration, max_dim: usize, algo: Reduction) -> Vec<u32> {
    let mut cols = boundary_columns(f, max_dim);
    let len = cols.len();
    let mut pivot_of = vec![NONE; len];
    match algo {
        Reduction::Standard => {
            for j in 0..len {
                reduce_column(j, &mut cols, &pivot_of);
                if let Some(&low) = cols[j].last() {
                    pivot_of[low as usize] = j as u32;
                }
            }
        }
        Reduction::Twist => {
            let mut cleared = vec![false; len];
            let dims: Vec<usize> = f.simplices().iter().map(|s| s.dim()).collect();
            for d in (1..=max_dim).rev() {
                for j in 0..len {
                    if dims[j] != d {
                        continue;
                    }
                    if cleared[j] {
                        cols[j].clear();
                        continue;
                    }
                    reduce_column(j, &mut cols, &pivot_of);
                    if let Some(&low) = cols[j].last() {
                        pivot_of[low as usize] = j as u32;
                        cleared[low as usize] = true;
                    }
                }
            }
        }
    }
    pivot_of
}

/// Persistence diagrams of degrees `0..=q_max` using the twist reduction.
///
/// Essential classes are reported with `death = +inf`; call
/// [`PersistenceDiagram::reduced`] to drop them.
pub fn compute_persistence(f: &Filtration, q_max: usize) -> Result<Vec<PersistenceDiagram>> {
    compute_persistence_with(f, q_max, Reduction::Twist)
}

pub fn compute_persistence_with(
    f: &Filtration,
    q_max: usize,
    algo: Reduction,
) -> Result<Vec<PersistenceDiagram>> {
    if q_max + 1 > f.skeleton() {
        return Err(Error::param(format!(
            "degree {q_max} needs a {}-skeleton, filtration has {}",
            q_max + 1,
            f.skeleton()
        )));
    }
    let max_dim = q_max + 1;
    let pivot_of = reduce(f, max_dim, algo);
    let simplices = f.simplices();
    let mut diagrams: Vec<PersistenceDiagram> =
        (0..=q_max).map(PersistenceDiagram::empty).collect();
    let mut is_death = vec![false; simplices.len()];
    for &col in &pivot_of {
        if col != NONE {
            is_death[col as usize] = true;
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let q = s.dim();
        if q > q_max || is_death[i] {
            continue;
        }
        let birth = s.value;
        let col = pivot_of[i];
        let death = if col == NONE {
            f64::INFINITY
        } else {
            simplices[col as usize].value
        };
        if death.is_finite() && death - birth <= ZERO_PERSISTENCE_RTOL * death.abs().max(1.0) {
            continue;
        }
        diagrams[q].push(PersistencePair { birth, death });
    }
    Ok(diagrams)
}
