use crate::error::{Error, Result};

/// One generator. `death` may be `+inf` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() {
            return Err(Error::NonFinite("birth"));
        }
        if death.is_nan() {
            return Err(Error::NonFinite("death"));
        }
        if birth > death {
            return Err(Error::param(format!("birth {birth} exceeds death {death}")));
        }
        Ok(Self { birth, death })
    }

    pub fn pers(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn point(&self) -> [f64; 2] {
        [self.birth, self.death]
    }
}

/// Off-diagonal generators of one homology degree. The diagonal is implicit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    degree: usize,
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(degree: usize, pairs: Vec<PersistencePair>) -> Self {
        Self { degree, pairs }
    }

    /// Convenience constructor from `(birth, death)` tuples.
    pub fn from_points(degree: usize, points: &[(f64, f64)]) -> Result<Self> {
        let pairs = points
            .iter()
            .map(|&(b, d)| PersistencePair::new(b, d))
            .collect::<Result<_>>()?;
        Ok(Self { degree, pairs })
    }

    pub fn empty(degree: usize) -> Self {
        Self {
            degree,
            pairs: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, pair: PersistencePair) {
        self.pairs.push(pair);
    }

    /// The diagram with essential (infinite-death) generators removed.
    pub fn reduced(&self) -> Self {
        Self {
            degree: self.degree,
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|p| !p.is_essential())
                .collect(),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.pairs.iter().all(|p| !p.is_essential())
    }

    /// Finite points, erroring if any generator is essential.
    pub fn finite_points(&self) -> Result<Vec<[f64; 2]>> {
        self.pairs
            .iter()
            .map(|p| {
                if p.is_essential() {
                    Err(Error::InfiniteDeath)
                } else {
                    Ok(p.point())
                }
            })
            .collect()
    }

    /// Pairs sorted by (birth, death), for multiset comparison.
    pub fn sorted_pairs(&self) -> Vec<PersistencePair> {
        let mut v = self.pairs.clone();
        v.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        });
        v
    }
}

/// Sum of `pers^p` over finite generators with persistence above `t`.
pub fn total_persistence(d: &PersistenceDiagram, p: f64, t: f64) -> f64 {
    d.pairs()
        .iter()
        .filter(|x| !x.is_essential())
        .map(PersistencePair::pers)
        .filter(|&pers| pers > t)
        .map(|pers| pers.powf(p))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_persistence_examples() {
        let empty = PersistenceDiagram::empty(1);
        assert_eq!(total_persistence(&empty, 2.0, 0.0), 0.0);
        let d = PersistenceDiagram::from_points(1, &[(0.0, 1.0), (0.0, 2.0)]).unwrap();
        assert_eq!(total_persistence(&d, 2.0, 0.0), 5.0);
        assert_eq!(total_persistence(&d, 1.0, 1.0), 2.0);
    }

    #[test]
    fn essential_pairs_excluded() {
        let d = PersistenceDiagram::from_points(0, &[(0.0, f64::INFINITY), (0.0, 1.0)]).unwrap();
        assert_eq!(total_persistence(&d, 1.0, 0.0), 1.0);
        assert_eq!(d.reduced().len(), 1);
        assert!(!d.is_reduced());
        assert!(matches!(d.finite_points(), Err(Error::InfiniteDeath)));
    }

    #[test]
    fn pair_validation() {
        assert!(PersistencePair::new(2.0, 1.0).is_err());
        assert!(PersistencePair::new(f64::INFINITY, f64::INFINITY).is_err());
        assert!(PersistencePair::new(1.0, f64::INFINITY)
            .unwrap()
            .is_essential());
    }
}
