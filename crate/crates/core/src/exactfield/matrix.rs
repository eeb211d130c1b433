//! Dense matrices over one field spec, with exact reduced row-echelon form,
//! rank, and kernel bases.
//!
//! Prime fields use plain modular Gauss-Jordan elimination. Rational matrices
//! clear denominators and run fraction-free (Bareiss) forward elimination
//! before a rational back-substitution, which keeps intermediate entries at
//! minor-determinant size instead of letting fractions compound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FieldSpec, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Output of `rref`: the unique reduced row-echelon form together with the
/// rank and pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl Matrix {
    pub fn new(spec: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                rows * cols
            )));
        }
        if data.iter().any(|s| s.spec() != spec) {
            return Err(Error::MixedFieldSpecs);
        }
        Ok(Self {
            spec,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            if r.len() != cols {
                return Err(Error::ColumnMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
        }
        Matrix::new(spec, n, cols, rows.into_iter().flatten().collect())
    }

    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            spec,
            rows,
            cols,
            data: vec![Scalar::zero(spec); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(spec, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one(spec);
        }
        m
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Stacks `other` below `self`; column counts must match.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::ColumnMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        if self.spec != other.spec {
            return Err(Error::MixedFieldSpecs);
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix::new(self.spec, self.rows + other.rows, self.cols, data)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero(self.spec);
                for c in 0..self.cols {
                    acc = acc.add(&self.at(r, c).mul(&v[c]));
                }
                acc
            })
            .collect()
    }

    /// The unique reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        match self.spec {
            FieldSpec::Prime { p } => self.rref_prime(p as u64),
            FieldSpec::Rational => self.rref_bareiss(),
        }
    }

    /// Gauss-Jordan on a flat u64 buffer; p < 2^31 keeps products in range.
    fn rref_prime(&self, p: u64) -> Rref {
        let cols = self.cols;
        let mut m: Vec<u64> = self
            .data
            .iter()
            .map(|s| match s {
                Scalar::Prime { value, .. } => *value as u64,
                Scalar::Rational(_) => unreachable!("prime-field matrix"),
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(pr) = (r..self.rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    m.swap(r * cols + j, pr * cols + j);
                }
            }
            let inv = mod_inv(m[r * cols + c], p);
            for j in c..cols {
                m[r * cols + j] = m[r * cols + j] * inv % p;
            }
            for i in 0..self.rows {
                let factor = m[i * cols + c];
                if i == r || factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = factor * m[r * cols + j] % p;
                    m[i * cols + j] = (m[i * cols + j] + p - sub) % p;
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        let data = m
            .into_iter()
            .map(|v| Scalar::Prime {
                p: p as u32,
                value: v as u32,
            })
            .collect();
        Rref {
            rank: pivot_cols.len(),
            pivot_cols,
            matrix: Matrix {
                spec: self.spec,
                rows: self.rows,
                cols,
                data,
            },
        }
    }

    fn rref_bareiss(&self) -> Rref {
        // Clear denominators row by row; row scaling does not change the RREF.
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    let q = self.at(r, c).as_rational().expect("rational matrix");
                    lcm = lcm.lcm(q.denom());
                }
                (0..self.cols)
                    .map(|c| {
                        let q = self.at(r, c).as_rational().unwrap();
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();

        let mut pivot_cols = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(pr) = (r..self.rows).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let piv = rows[r][c].clone();
            for i in (r + 1)..self.rows {
                let lead = rows[i][c].clone();
                for j in c..self.cols {
                    let v = &piv * &rows[i][j] - &lead * &rows[r][j];
                    // Bareiss one-step division is exact: v is prev times a minor
                    rows[i][j] = &v / &prev;
                }
            }
            prev = piv;
            pivot_cols.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }

        // Back-substitution in rational arithmetic on the echelon rows.
        let mut rat: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|row| row.iter().map(|v| BigRational::from(v.clone())).collect())
            .collect();
        for (row_i, &col) in pivot_cols.iter().enumerate().rev() {
            let piv = rat[row_i][col].clone();
            for j in col..self.cols {
                rat[row_i][j] = &rat[row_i][j] / &piv;
            }
            for i in 0..row_i {
                if !rat[i][col].is_zero() {
                    let factor = rat[i][col].clone();
                    for j in col..self.cols {
                        let sub = &factor * &rat[row_i][j];
                        rat[i][j] = &rat[i][j] - sub;
                    }
                }
            }
        }
        // Rows past the rank are exact zero rows.
        for row in rat.iter_mut().skip(pivot_cols.len()) {
            for v in row.iter_mut() {
                *v = BigRational::zero();
            }
        }
        let data = rat
            .into_iter()
            .flatten()
            .map(Scalar::Rational)
            .collect::<Vec<_>>();
        Rref {
            rank: pivot_cols.len(),
            pivot_cols,
            matrix: Matrix::new(FieldSpec::Rational, self.rows, self.cols, data)
                .expect("shape preserved"),
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// A basis of the right null space; one vector per free column, in
    /// ascending column order. Empty for full column rank.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let Rref {
            matrix, pivot_cols, ..
        } = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &c) in pivot_cols.iter().enumerate() {
                v[c] = Some(i);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Scalar::zero(self.spec); self.cols];
            vec[free] = Scalar::one(self.spec);
            for (i, &pc) in pivot_cols.iter().enumerate() {
                vec[pc] = matrix.at(i, free).neg();
            }
            basis.push(vec);
        }
        basis
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (a as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (((s0 % p as i64) + p as i64) % p as i64) as u64
}

/// True iff kernel(a) ⊆ kernel(b), decided by comparing rank(a) with the rank
/// of a stacked on b.
pub fn solve_rank_compare(a: &Matrix, b: &Matrix) -> Result<bool> {
    let stacked = a.vstack(b)?;
    Ok(a.rank() == stacked.rank())
}
