//! Affine flats (points, lines, planes, ...) with exact rational arithmetic.

use crate::error::{Error, Result};
use crate::rational::RationalPoint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// An affine flat `base + span(directions)` in `R^d`. The direction vectors
/// are linearly independent, so `directions.len()` is the flat's dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFlat {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub base: Vec<BigRational>,
    pub directions: Vec<DirectionVec>,
}

/// Newtype so a vector of direction vectors can use the string wire form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionVec(
    #[serde(with = "crate::rational::serde_rational_vec")] pub Vec<BigRational>,
);

impl AffineFlat {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient(&self) -> usize {
        self.base.len()
    }

    /// Exact membership test by solving `base + D*lambda = x`.
    pub fn contains(&self, x: &[BigRational]) -> Result<bool> {
        if x.len() != self.ambient() {
            return Err(Error::DimensionMismatch { expected: self.ambient(), got: x.len() });
        }
        // Augmented system: columns = directions, rhs = x - base.
        let d = self.ambient();
        let k = self.dim();
        let mut rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut r: Vec<BigRational> = self.directions.iter().map(|v| v.0[i].clone()).collect();
                r.push(&x[i] - &self.base[i]);
                r
            })
            .collect();
        // Gaussian elimination; consistent iff no pivot falls in the rhs column.
        let mut pivot_row = 0;
        for col in 0..k {
            let Some(p) = (pivot_row..d).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, p);
            let pv = rows[pivot_row][col].clone();
            for r in 0..d {
                if r != pivot_row && !rows[r][col].is_zero() {
                    let f = &rows[r][col] / &pv;
                    for c in col..=k {
                        let sub = &f * &rows[pivot_row][c];
                        rows[r][c] = &rows[r][c] - sub;
                    }
                }
            }
            pivot_row += 1;
        }
        // Inconsistent iff a row with zero direction part has nonzero rhs.
        Ok(rows
            .iter()
            .all(|row| !(row[..k].iter().all(|x| x.is_zero()) && !row[k].is_zero())))
    }
}

/// Minimal affine flat containing the given rational points.
pub fn affine_hull(points: &[RationalPoint]) -> Result<AffineFlat> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateFlat);
    };
    let base = first.coords();
    let d = base.len();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    // Collect independent difference vectors by incremental elimination.
    let mut basis: Vec<Vec<BigRational>> = Vec::new(); // kept in echelon form
    let mut directions: Vec<Vec<BigRational>> = Vec::new(); // original differences
    for p in &points[1..] {
        let coords = p.coords();
        let mut v: Vec<BigRational> = coords.iter().zip(&base).map(|(a, b)| a - b).collect();
        // reduce v against the echelon basis
        for b in &basis {
            let lead = b.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = &v[lead] / &b[lead];
                for i in 0..d {
                    let sub = &f * &b[i];
                    v[i] = &v[i] - sub;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            directions.push(coords.iter().zip(&base).map(|(a, b)| a - b).collect());
            basis.push(v);
        }
    }
    Ok(AffineFlat {
        base,
        directions: directions.into_iter().map(DirectionVec).collect(),
    })
}
