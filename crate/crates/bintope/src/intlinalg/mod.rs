//! Exact integer linear algebra: dense matrices over `BigInt`, Smith normal
//! forms with accumulated unimodular transforms, and fraction-free
//! determinants.

mod det;
mod snf;

pub use det::{det_exact, is_unimodular};
pub use snf::{smith_normal_form, smith_normal_form_with, SnfOptions};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Index, IndexMut, Range};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Dense row-major matrix with arbitrary-precision integer entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-word rows; handy in tests and generators.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged rows in matrix literal"
        );
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| BigInt::from(v)))
            .collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Copy of the block with the given row and column ranges.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> IntMatrix {
        assert!(rows.end <= self.rows && cols.end <= self.cols);
        let mut out = IntMatrix::zeros(rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out[(oi, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = &self[(i, k)];
                if lik.is_zero() {
                    continue;
                }
                let out_row_start = i * rhs.cols;
                let rhs_row = rhs.row(k);
                for j in 0..rhs.cols {
                    if !rhs_row[j].is_zero() {
                        out.data[out_row_start + j] += lik * &rhs_row[j];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a, b) = (a.min(b), a.max(b));
        let (top, bottom) = self.data.split_at_mut(b * self.cols);
        top[a * self.cols..(a + 1) * self.cols].swap_with_slice(&mut bottom[..self.cols]);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Serializes in the plain text format: a `rows cols` header line followed
    /// by one line of signed decimal entries per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the plain text format accepted by [`IntMatrix::to_text`].
    pub fn from_text(text: &str) -> Result<IntMatrix, LinalgError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (header_line, header) = lines.next().ok_or(LinalgError::Parse {
            line: 1,
            reason: "empty input".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(LinalgError::Parse {
                line: header_line + 1,
                reason: format!("expected `rows cols` header, got {header:?}"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| LinalgError::Parse {
                line: header_line + 1,
                reason: format!("bad dimension {s:?}"),
            })
        };
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut m = IntMatrix::zeros(rows, cols);
        let mut filled = 0usize;
        for (lineno, line) in lines {
            if filled == rows {
                return Err(LinalgError::Parse {
                    line: lineno + 1,
                    reason: "more rows than the header declares".into(),
                });
            }
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(LinalgError::Parse {
                    line: lineno + 1,
                    reason: format!("expected {cols} entries, got {}", entries.len()),
                });
            }
            for (j, tok) in entries.iter().enumerate() {
                m[(filled, j)] = tok.parse::<BigInt>().map_err(|_| LinalgError::Parse {
                    line: lineno + 1,
                    reason: format!("bad integer {tok:?}"),
                })?;
            }
            filled += 1;
        }
        if filled != rows {
            return Err(LinalgError::Parse {
                line: 0,
                reason: format!("header declares {rows} rows, found {filled}"),
            });
        }
        Ok(m)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{})\n{}", self.rows, self.cols, self.to_text())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Smith normal form `P * A * Q = diag(d_1..d_r)` (padded with zeros), with
/// `P`, `Q` unimodular and all `d_j` positive.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub divisors: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// The diagonal form as a full matrix of the original shape.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.p.rows(), self.q.rows());
        for (i, div) in self.divisors.iter().enumerate() {
            d[(i, i)] = div.clone();
        }
        d
    }

    /// Top `r` rows of `P`.
    pub fn p_r(&self) -> IntMatrix {
        self.p.submatrix(0..self.rank(), 0..self.p.cols())
    }

    /// Bottom `n - r` rows of `P`; their columns span the lattice directions
    /// along which the diagonalized system is free.
    pub fn p_0(&self) -> IntMatrix {
        self.p.submatrix(self.rank()..self.p.rows(), 0..self.p.cols())
    }

    /// Left `r` columns of `Q`.
    pub fn q_r(&self) -> IntMatrix {
        self.q.submatrix(0..self.q.rows(), 0..self.rank())
    }

    /// Right `m - r` columns of `Q`.
    pub fn q_0(&self) -> IntMatrix {
        self.q.submatrix(0..self.q.rows(), self.rank()..self.q.cols())
    }
}
