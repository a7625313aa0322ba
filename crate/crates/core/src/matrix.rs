//! Square matrices over the group ring.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::ring::{GroupRingElement, Rational, TorusCharacterPoint};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    spec: Arc<GroupSpec>,
    entries: Vec<Vec<GroupRingElement>>,
}

impl RingMatrix {
    pub fn from_rows(spec: Arc<GroupSpec>, entries: Vec<Vec<GroupRingElement>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::Internal(format!(
                    "row of length {} in {n}x{n} matrix",
                    row.len()
                )));
            }
            for e in row {
                if e.spec() != &spec {
                    return Err(Error::SpecMismatch {
                        left: spec.to_string(),
                        right: e.spec().to_string(),
                    });
                }
            }
        }
        Ok(Self { spec, entries })
    }

    pub fn zeros(spec: Arc<GroupSpec>, n: usize) -> Self {
        let entries = vec![vec![GroupRingElement::zero(spec.clone()); n]; n];
        Self { spec, entries }
    }

    pub fn identity(spec: Arc<GroupSpec>, n: usize) -> Self {
        let mut m = Self::zeros(spec.clone(), n);
        for i in 0..n {
            m.entries[i][i] = GroupRingElement::one(spec.clone());
        }
        m
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: GroupRingElement) {
        self.entries[i][j] = value;
    }

    pub fn rows(&self) -> &[Vec<GroupRingElement>] {
        &self.entries
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec || self.dim() != other.dim() {
            return Err(Error::SpecMismatch {
                left: format!("{} ({}x{})", self.spec, self.dim(), self.dim()),
                right: format!("{} ({}x{})", other.spec, other.dim(), other.dim()),
            });
        }
        let n = self.dim();
        let mut out = Self::zeros(self.spec.clone(), n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i][j] = out.entries[i][j].add(&a.multiply(b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.dim();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[i][j] = self.entries[i][j].add(&other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = e.scale(k);
            }
        }
        out
    }

    /// Conjugate transpose: `(star M)_{ij} = star(M_{ji})`.
    pub fn star_transpose(&self) -> Self {
        let n = self.dim();
        let mut out = Self::zeros(self.spec.clone(), n);
        for i in 0..n {
            for j in 0..n {
                out.entries[i][j] = self.entries[j][i].star();
            }
        }
        out
    }

    /// `Tr_Γ(M) = Σ_i constant_term(M_ii)`.
    pub fn von_neumann_trace(&self) -> Rational {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, row)| row[i].constant_term())
            .sum()
    }

    /// Fourier symbol of the matrix at a dual-group point.
    pub fn evaluate(&self, p: &TorusCharacterPoint) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j].evaluate(p))
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(GroupRingElement::render).collect())
            .collect()
    }
}
