use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense complex matrix, row-major. The universal carrier for algebra
/// elements, module elements, and witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

fn check_finite(entries: &[Complex64]) -> Result<()> {
    if entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} with {} entries",
                entries.len()
            )));
        }
        check_finite(&entries)?;
        Ok(Self { rows, cols, entries })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from(
            (0..self.rows).map(|i| self[(i, j)]).collect::<Vec<_>>(),
        )
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector::from(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, lambda: Complex64) -> ComplexMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * lambda).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix add".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn matvec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of dim {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::ZERO;
            for (a, b) in row.iter().zip(x.entries()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        Ok(ComplexVector::from(out))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Vertical stacking; all blocks must share the column count.
    pub fn vstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let cols = blocks
            .first()
            .ok_or_else(|| Error::InvalidInput("vstack of zero blocks".into()))?
            .cols;
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut entries = Vec::with_capacity(rows * cols);
        for b in blocks {
            entries.extend_from_slice(&b.entries);
        }
        Ok(Self { rows, cols, entries })
    }

    /// Horizontal stacking; all blocks must share the row count.
    pub fn hstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let rows = blocks
            .first()
            .ok_or_else(|| Error::InvalidInput("hstack of zero blocks".into()))?
            .rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)];
                }
            }
            off += b.cols;
        }
        Ok(out)
    }

    /// Submatrix by row and column ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> ComplexMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out[(oi, oj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    /// Top singular value.
    pub fn top_singular_value(&self) -> f64 {
        let svd = self.to_nalgebra().svd(false, false);
        svd.singular_values.iter().cloned().fold(0.0, f64::max)
    }

    /// Top singular triple (sigma, u, v) with a*v = sigma*u.
    pub fn top_singular_triple(&self) -> (f64, ComplexVector, ComplexVector) {
        let svd = self.to_nalgebra().svd(true, true);
        let (mut best, mut idx) = (0.0f64, 0usize);
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s > best {
                best = *s;
                idx = i;
            }
        }
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let uvec = ComplexVector::from((0..self.rows).map(|i| u[(i, idx)]).collect::<Vec<_>>());
        // rows of v_t are conjugated right singular vectors
        let vvec = ComplexVector::from(
            (0..self.cols).map(|j| vt[(idx, j)].conj()).collect::<Vec<_>>(),
        );
        (best, uvec, vvec)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("empty vector".into()));
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![Complex64::ZERO; dim],
        }
    }

    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[j] = Complex64::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn scale(&self, lambda: Complex64) -> ComplexVector {
        Self {
            entries: self.entries.iter().map(|&z| z * lambda).collect(),
        }
    }

    pub fn conj(&self) -> ComplexVector {
        Self {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == Complex64::ZERO)
    }

    /// Contiguous slice [start, start+len) as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> ComplexVector {
        Self {
            entries: self.entries[start..start + len].to_vec(),
        }
    }

    pub fn concat(parts: &[ComplexVector]) -> ComplexVector {
        Self {
            entries: parts.iter().flat_map(|p| p.entries.iter().copied()).collect(),
        }
    }

    /// As a column matrix.
    pub fn as_column(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim(), 1, self.entries.clone()).expect("finite vector")
    }

    /// As a row matrix.
    pub fn as_row(&self) -> ComplexMatrix {
        ComplexMatrix::new(1, self.dim(), self.entries.clone()).expect("finite vector")
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

// Wire format: {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        ComplexMatrix::new(
            w.rows,
            w.cols,
            w.entries
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .map_err(de::Error::custom)
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries
            .iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        ComplexVector::new(
            raw.iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .map_err(de::Error::custom)
    }
}
