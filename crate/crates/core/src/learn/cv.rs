use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::par;
use crate::rng::RandomSource;

use super::svm::{svm_predict, svm_train, LabeledGram};

/// Stratified fold assignment: each class is shuffled with the seed and
/// dealt round-robin, so every fold sees both classes.
pub fn stratified_folds(labels: &[i8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::param("cross-validation needs at least 2 folds"));
    }
    let mut assignment = vec![0; labels.len()];
    let mut rng = RandomSource::new(seed);
    let mut offset = 0;
    for class in [1i8, -1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::param(format!(
                "{folds} folds but class {class} has {} samples",
                members.len()
            )));
        }
        rng.shuffle(&mut members);
        for (r, &i) in members.iter().enumerate() {
            assignment[i] = (r + offset) % folds;
        }
        offset += members.len();
    }
    Ok(assignment)
}

/// Result of a grid search.
#[derive(Debug, Clone)]
pub struct CvOutcome<T> {
    pub best: T,
    pub best_index: usize,
    pub best_reg_c: f64,
    /// Mean validation accuracy, indexed `[grid][reg_c]`.
    pub scores: Vec<Vec<f64>>,
}

fn submatrix(k: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| k[(rows[r], cols[c])])
}

fn fold_accuracy(
    k: &DMatrix<f64>,
    labels: &[i8],
    assignment: &[usize],
    fold: usize,
    reg_c: f64,
) -> Result<f64> {
    let train: Vec<usize> = (0..labels.len())
        .filter(|&i| assignment[i] != fold)
        .collect();
    let test: Vec<usize> = (0..labels.len())
        .filter(|&i| assignment[i] == fold)
        .collect();
    let train_labels: Vec<i8> = train.iter().map(|&i| labels[i]).collect();
    let lg = LabeledGram::new(
        GramMatrix::new(submatrix(k, &train, &train), None)?,
        train_labels,
    )?;
    let model = svm_train(&lg, reg_c)?;
    let pred = svm_predict(&model, &submatrix(k, &test, &train))?;
    let hits = test
        .iter()
        .zip(&pred)
        .filter(|(&i, &p)| labels[i] == p)
        .count();
    Ok(hits as f64 / test.len() as f64)
}

/// k-fold grid search over kernel candidates and SVM regularizers.
///
/// `producer` builds the full training Gram matrix for one candidate. The
/// winner maximizes mean validation accuracy; ties go to the earliest
/// candidate, then the earliest `reg_c`.
pub fn cross_validate<T, F>(
    folds: usize,
    grid: &[T],
    reg_grid: &[f64],
    labels: &[i8],
    seed: u64,
    producer: F,
) -> Result<CvOutcome<T>>
where
    T: Clone + Sync,
    F: Fn(&T) -> Result<DMatrix<f64>> + Sync + Send,
{
    if grid.is_empty() || reg_grid.is_empty() {
        return Err(Error::param("empty cross-validation grid"));
    }
    let assignment = stratified_folds(labels, folds, seed)?;
    let grams = par::map_slice(grid, &producer)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    for k in &grams {
        if k.nrows() != labels.len() || k.ncols() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: k.nrows(),
            });
        }
    }
    let tasks: Vec<(usize, usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..reg_grid.len()).flat_map(move |r| (0..folds).map(move |f| (g, r, f))))
        .collect();
    let acc = par::map_slice(&tasks, |&(g, r, f)| {
        fold_accuracy(&grams[g], labels, &assignment, f, reg_grid[r])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut scores = vec![vec![0.0; reg_grid.len()]; grid.len()];
    for (&(g, r, _), a) in tasks.iter().zip(&acc) {
        scores[g][r] += a / folds as f64;
    }
    let (mut bg, mut br) = (0, 0);
    for (g, row) in scores.iter().enumerate() {
        for (r, &s) in row.iter().enumerate() {
            if s > scores[bg][br] {
                bg = g;
                br = r;
            }
        }
    }
    Ok(CvOutcome {
        best: grid[bg].clone(),
        best_index: bg,
        best_reg_c: reg_grid[br],
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_stratified_and_reproducible() {
        let labels: Vec<i8> = (0..30).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let a = stratified_folds(&labels, 5, 9).unwrap();
        assert_eq!(a, stratified_folds(&labels, 5, 9).unwrap());
        for f in 0..5 {
            let pos = (0..30).filter(|&i| a[i] == f && labels[i] == 1).count();
            let neg = (0..30).filter(|&i| a[i] == f && labels[i] == -1).count();
            assert_eq!((pos, neg), (2, 4));
        }
    }

    #[test]
    fn too_many_folds() {
        assert!(stratified_folds(&[1, 1, -1], 2, 0).is_err());
        assert!(stratified_folds(&[1, -1], 1, 0).is_err());
    }

    #[test]
    fn grid_of_one() {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let labels: Vec<i8> = (0..12).map(|i| if i < 6 { -1 } else { 1 }).collect();
        let out = cross_validate(3, &[0.7], &[1.0], &labels, 1, |&s: &f64| {
            Ok(DMatrix::from_fn(12, 12, |i, j| {
                (-(x[i] - x[j]).powi(2) / (2.0 * s * s)).exp()
            }))
        })
        .unwrap();
        assert_eq!(out.best, 0.7);
        assert_eq!(out.best_index, 0);
    }
}
