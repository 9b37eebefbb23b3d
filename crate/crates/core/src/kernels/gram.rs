use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::learn::eig_sym;
use crate::par;
use crate::persistence::PersistenceDiagram;

use super::embedding::EmbeddedDiagram;
use super::spec::{KernelSpec, Rkhs};

/// Symmetric similarity matrix over a collection of diagrams.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
    spec: Option<KernelSpec>,
    labels: Option<Vec<String>>,
}

/// Relative eigenvalue floor: `min eig >= -PSD_RTOL * trace`.
const PSD_RTOL: f64 = 1e-8;

impl GramMatrix {
    pub fn new(entries: DMatrix<f64>, spec: Option<KernelSpec>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::param("gram matrix must be square"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gram matrix"));
        }
        Ok(Self {
            entries,
            spec,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::param("label count differs from gram size"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn spec(&self) -> Option<&KernelSpec> {
        self.spec.as_ref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn symmetry_error(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (values, _) = eig_sym(&symmetrized(&self.entries))?;
        Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Checks symmetry to `1e-10` and `min eig >= -1e-8 * trace`.
    pub fn check_health(&self) -> Result<()> {
        let asym = self.symmetry_error();
        if asym > 1e-10 {
            return Err(Error::param(format!("gram matrix asymmetric by {asym:e}")));
        }
        let min_eig = self.min_eigenvalue()?;
        let trace = self.entries.trace();
        if min_eig < -PSD_RTOL * trace.abs() {
            return Err(Error::NotPsd { min_eig, trace });
        }
        Ok(())
    }

    /// Clips eigenvalues in `[-1e-8 * trace, 0)` to zero. More negative
    /// spectra are an error.
    pub fn psd_floor(&self) -> Result<Self> {
        let sym = symmetrized(&self.entries);
        let (values, vectors) = eig_sym(&sym)?;
        let min_eig = values.iter().copied().fold(f64::INFINITY, f64::min);
        let trace = sym.trace();
        if min_eig < -PSD_RTOL * trace.abs() {
            return Err(Error::NotPsd { min_eig, trace });
        }
        let entries = if min_eig < 0.0 {
            let clipped = values.map(|v| v.max(0.0));
            let m = &vectors * DMatrix::from_diagonal(&clipped) * vectors.transpose();
            symmetrized(&m)
        } else {
            sym
        };
        Ok(Self {
            entries,
            spec: self.spec,
            labels: self.labels.clone(),
        })
    }

    /// CSV with an optional header row of labels, then `n` rows of `n`
    /// comma-separated values.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(labels) = &self.labels {
            out.push_str(&labels.join(","));
            out.push('\n');
        }
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| g17(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let parse_row = |line: &str| -> Option<Vec<f64>> {
            line.split(',')
                .map(|t| t.trim().parse::<f64>().ok())
                .collect()
        };
        let (labels, body) = match lines.first() {
            None => return Err(Error::parse(0, "empty gram file")),
            Some((_, first)) if parse_row(first).is_none() => (
                Some(
                    first
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .collect::<Vec<_>>(),
                ),
                &lines[1..],
            ),
            Some(_) => (None, &lines[..]),
        };
        let n = body.len();
        if n == 0 {
            return Err(Error::parse(0, "gram file has no rows"));
        }
        let mut data = Vec::with_capacity(n * n);
        for &(lineno, line) in body {
            let row = parse_row(line).ok_or_else(|| Error::parse(lineno, "non-numeric entry"))?;
            if row.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {n} columns, found {}", row.len()),
                ));
            }
            data.extend(row);
        }
        let g = Self::new(DMatrix::from_row_slice(n, n, &data), None)
            .map_err(|e| Error::parse(0, e.to_string()))?;
        match labels {
            Some(l) if l.len() == n => Ok(g.with_labels(l)?),
            Some(l) => Err(Error::parse(1, format!("{} labels for {n} rows", l.len()))),
            None => Ok(g),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub(crate) fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn check_collection(diagrams: &[PersistenceDiagram]) -> Result<()> {
    let first = diagrams
        .first()
        .ok_or_else(|| Error::param("empty diagram list"))?;
    for d in diagrams {
        if d.degree() != first.degree() {
            return Err(Error::DegreeMismatch {
                left: first.degree(),
                right: d.degree(),
            });
        }
        if !d.is_reduced() {
            return Err(Error::InfiniteDeath);
        }
    }
    Ok(())
}

/// Turns a matrix of embedding inner products into the Gram matrix of the
/// requested RKHS kernel.
pub(crate) fn apply_rkhs(inner: DMatrix<f64>, rkhs: Rkhs) -> DMatrix<f64> {
    match rkhs {
        Rkhs::Linear => inner,
        Rkhs::Gaussian { tau } => {
            let n = inner.nrows();
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    return 1.0;
                }
                let d2 = (inner[(i, i)] + inner[(j, j)] - 2.0 * inner[(i, j)]).max(0.0);
                (-d2 / (2.0 * tau * tau)).exp()
            })
        }
    }
}

/// Exact Gram matrix; every entry is a full double sum over generator pairs.
pub fn gram(diagrams: &[PersistenceDiagram], spec: &KernelSpec) -> Result<GramMatrix> {
    check_collection(diagrams)?;
    spec.validate()?;
    let embedded = par::map_slice(diagrams, |d| EmbeddedDiagram::new(d, &spec.base))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let inner = par::symmetric_matrix(embedded.len(), |i, j| {
        embedded[i].inner(&embedded[j], &spec.base)
    });
    GramMatrix::new(apply_rkhs(inner, spec.rkhs), Some(*spec))
}

/// Rectangular kernel matrix `K[i, j] = k(rows[i], cols[j])`, e.g. test
/// diagrams against training diagrams for prediction.
pub fn cross_gram(
    rows: &[PersistenceDiagram],
    cols: &[PersistenceDiagram],
    spec: &KernelSpec,
) -> Result<DMatrix<f64>> {
    check_collection(rows)?;
    check_collection(cols)?;
    if rows[0].degree() != cols[0].degree() {
        return Err(Error::DegreeMismatch {
            left: rows[0].degree(),
            right: cols[0].degree(),
        });
    }
    spec.validate()?;
    let embed = |ds: &[PersistenceDiagram]| {
        par::map_slice(ds, |d| EmbeddedDiagram::new(d, &spec.base))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    };
    let (r, c) = (embed(rows)?, embed(cols)?);
    let values = par::map_range(r.len() * c.len(), |k| {
        r[k / c.len()].inner(&c[k % c.len()], &spec.base)
    });
    let inner = DMatrix::from_row_slice(r.len(), c.len(), &values);
    Ok(match spec.rkhs {
        Rkhs::Linear => inner,
        Rkhs::Gaussian { tau } => {
            let self_r: Vec<f64> = r.iter().map(|e| e.inner(e, &spec.base)).collect();
            let self_c: Vec<f64> = c.iter().map(|e| e.inner(e, &spec.base)).collect();
            DMatrix::from_fn(r.len(), c.len(), |i, j| {
                let d2 = (self_r[i] + self_c[j] - 2.0 * inner[(i, j)]).max(0.0);
                (-d2 / (2.0 * tau * tau)).exp()
            })
        }
    })
}
