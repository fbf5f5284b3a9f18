//! Dense row-major matrix and its plain-text file format.
//!
//! The format is UTF-8 text: a header line `R C`, then `R` lines holding
//! `C` space-separated decimal numbers each.

use std::io::{BufRead, Write};

use crate::error::MatrixError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[S]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Option<S> {
        (r < self.rows && c < self.cols).then(|| self.data[r * self.cols + c])
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [S] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[S]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = S> + '_ {
        (0..self.rows).map(move |r| self.data[r * self.cols + c])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Writes the header line and one line per row. Values use the shortest
    /// decimal representation that parses back to the same bits.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.rows, self.cols)?;
        let mut line = String::new();
        for r in 0..self.rows {
            line.clear();
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        out.flush()
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("matrix text is ASCII")
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self, MatrixError> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
            Ok(l) => !l.trim().is_empty(),
            Err(_) => true,
        });
        let (_, header) = lines.next().ok_or(MatrixError::MissingHeader)?;
        let header = header?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| MatrixError::BadHeader(header.clone()));
        let (rows, cols) = match dims.as_slice() {
            [r, c] => (parse_dim(r)?, parse_dim(c)?),
            _ => return Err(MatrixError::BadHeader(header.clone())),
        };
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (lineno, line) in lines {
            let line = line?;
            if seen == rows {
                return Err(MatrixError::RowCount {
                    expected: rows,
                    found: seen + 1,
                });
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v = tok.parse::<S>().map_err(|_| MatrixError::BadValue {
                    line: lineno + 1,
                    token: tok.to_string(),
                })?;
                data.push(v);
            }
            let found = data.len() - before;
            if found != cols {
                return Err(MatrixError::RaggedRow {
                    row: seen,
                    expected: cols,
                    found,
                });
            }
            seen += 1;
        }
        if seen != rows {
            return Err(MatrixError::RowCount {
                expected: rows,
                found: seen,
            });
        }
        Ok(Self { rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_text_format() {
        let m = Matrix::from_rows(&[[0.25f64, 0.75]]).unwrap();
        assert_eq!(m.to_text(), "1 2\n0.25 0.75\n");
    }

    #[test]
    fn two_by_three_has_two_data_lines() {
        let m = Matrix::from_rows(&[[1.0f64, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let text = m.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1..].iter().all(|l| l.split(' ').count() == 3));
    }

    #[test]
    fn read_rejects_ragged_and_short_input() {
        let ragged = "2 2\n0.5 0.5\n1.0\n";
        assert!(matches!(
            Matrix::<f64>::read_text(ragged.as_bytes()),
            Err(MatrixError::RaggedRow { row: 1, .. })
        ));
        let short = "3 1\n1\n1\n";
        assert!(matches!(
            Matrix::<f64>::read_text(short.as_bytes()),
            Err(MatrixError::RowCount { expected: 3, found: 2 })
        ));
        assert!(matches!(
            Matrix::<f64>::read_text("1 x\n".as_bytes()),
            Err(MatrixError::BadHeader(_))
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let vals = [0.1f64, 1.0 / 3.0, 1e-12, 0.123_456_789_012_345_6];
        let m = Matrix::from_rows(&[vals]).unwrap();
        let back = Matrix::<f64>::read_text(m.to_text().as_bytes()).unwrap();
        assert_eq!(m, back);
    }
}
