//! Compositions, block-diagonal and basis-parametrized matrix algebras, and
//! the stacked row/column module elements built over them.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::matrix::ComplexMatrix;
use crate::opnorm::{best_op_norm, OptimizerConfig};

/// Relative tolerance for algebra membership and closure checks.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// A composition (d_1, ..., d_k) of d, fixing the block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<usize>,
    offsets: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(Error::BadComposition);
        }
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        offsets.push(0);
        for &p in &parts {
            offsets.push(offsets.last().unwrap() + p);
        }
        Ok(Self { parts, offsets })
    }

    pub fn single(d: usize) -> Self {
        Self::new(vec![d]).expect("d >= 1")
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn part(&self, j: usize) -> usize {
        self.parts[j]
    }

    /// Index range of block `j` inside the ambient dimension.
    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// Comma-separated parts, e.g. "1,2,1".
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad composition {s:?}")))
            })
            .collect::<Result<_>>()?;
        Composition::new(parts)
    }
}

/// The block-diagonal subalgebra of d x d matrices fixed by a composition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagAlgebra {
    composition: Composition,
}

impl BlockDiagAlgebra {
    pub fn new(composition: Composition) -> Self {
        Self { composition }
    }

    pub fn full(d: usize) -> Self {
        Self::new(Composition::single(d))
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn dim(&self) -> usize {
        self.composition.total()
    }

    /// Frobenius mass outside the diagonal blocks.
    pub fn off_block_mass(&self, m: &ComplexMatrix) -> f64 {
        let d = self.dim();
        let mut mass = 0.0;
        for j in 0..self.composition.len() {
            let r = self.composition.range(j);
            for i in 0..d {
                if r.contains(&i) {
                    continue;
                }
                for c in r.clone() {
                    mass += m[(i, c)].norm_sqr();
                }
            }
        }
        mass.sqrt()
    }

    /// Extract the diagonal blocks.
    pub fn diagonal_blocks(&self, m: &ComplexMatrix) -> Vec<ComplexMatrix> {
        (0..self.composition.len())
            .map(|j| {
                let r = self.composition.range(j);
                m.submatrix(r.clone(), r)
            })
            .collect()
    }
}

/// An algebra given by a finite linearly independent basis, closed under
/// multiplication. Covers the counterexample algebras (simultaneously
/// diagonalizable, strictly upper triangular) with one code path.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametrizedAlgebra {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    // vectorized basis (d^2 x m) kept for least-squares membership tests
    gram: DMatrix<Complex64>,
}

impl ParametrizedAlgebra {
    pub fn new(dim: usize, basis: Vec<ComplexMatrix>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        for b in &basis {
            if b.rows() != dim || b.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis element is {}x{}, algebra dim {dim}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        let m = basis.len();
        let gram = DMatrix::from_fn(dim * dim, m, |row, col| {
            let (i, j) = (row / dim, row % dim);
            basis[col][(i, j)]
        });
        let scale = basis.iter().map(|b| b.frobenius_norm()).fold(0.0, f64::max);
        let svd = gram.clone().svd(false, false);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-12 * scale.max(1.0))
            .count();
        if rank < m {
            return Err(Error::DependentBasis { rank, expected: m });
        }
        let alg = Self { dim, basis, gram };
        // closure under multiplication, checked at construction
        let mut worst: f64 = 0.0;
        for bi in &alg.basis {
            for bj in &alg.basis {
                let prod = bi.matmul(bj)?;
                let (_, residual) = alg.project(&prod);
                let rel = residual / prod.frobenius_norm().max(1.0);
                worst = worst.max(rel);
            }
        }
        if worst > MEMBERSHIP_TOL {
            return Err(Error::NotClosed(worst));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Least-squares coordinates of `m` against the basis span, with the
    /// Frobenius residual.
    pub fn project(&self, m: &ComplexMatrix) -> (Vec<Complex64>, f64) {
        let d = self.dim;
        let rhs = DMatrix::from_fn(d * d, 1, |row, _| m[(row / d, row % d)]);
        let svd = self.gram.clone().svd(true, true);
        let sol = svd.solve(&rhs, 1e-14).expect("svd solve");
        let fitted = &self.gram * &sol;
        let residual = (&fitted - &rhs).norm();
        (sol.iter().cloned().collect(), residual)
    }

    /// Linear combination of the basis.
    pub fn element(&self, coords: &[Complex64]) -> Result<ComplexMatrix> {
        if coords.len() != self.basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for basis of size {}",
                coords.len(),
                self.basis.len()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, b) in coords.iter().zip(&self.basis) {
            out = out.add(&b.scale(*c))?;
        }
        Ok(out)
    }
}

/// Either kind of algebra; block-diagonal additionally unlocks the
/// constructive-witness fast path.
#[derive(Debug, Clone, PartialEq)]
pub enum Algebra {
    Block(BlockDiagAlgebra),
    Basis(ParametrizedAlgebra),
}

impl Algebra {
    pub fn block(composition: Composition) -> Self {
        Algebra::Block(BlockDiagAlgebra::new(composition))
    }

    pub fn full_matrix(d: usize) -> Self {
        Algebra::Block(BlockDiagAlgebra::full(d))
    }

    pub fn dim(&self) -> usize {
        match self {
            Algebra::Block(a) => a.dim(),
            Algebra::Basis(a) => a.dim(),
        }
    }

    pub fn as_block(&self) -> Option<&BlockDiagAlgebra> {
        match self {
            Algebra::Block(a) => Some(a),
            Algebra::Basis(_) => None,
        }
    }

    /// Membership test with tolerance relative to the Frobenius norm.
    pub fn membership(&self, m: &ComplexMatrix, tol: f64) -> Result<bool> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} element in algebra of dim {}",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        let scale = m.frobenius_norm();
        if scale == 0.0 {
            return Ok(true);
        }
        let residual = match self {
            Algebra::Block(a) => a.off_block_mass(m),
            Algebra::Basis(a) => a.project(m).1,
        };
        Ok(residual <= tol * scale)
    }

    /// Basis matrices of the algebra as a linear space. For block algebras
    /// these are the matrix units inside each block.
    pub fn basis_matrices(&self) -> Vec<ComplexMatrix> {
        match self {
            Algebra::Basis(a) => a.basis().to_vec(),
            Algebra::Block(a) => {
                let d = a.dim();
                let mut out = Vec::new();
                for j in 0..a.composition().len() {
                    let r = a.composition().range(j);
                    for i in r.clone() {
                        for c in r.clone() {
                            let mut e = ComplexMatrix::zeros(d, d);
                            e[(i, c)] = Complex64::ONE;
                            out.push(e);
                        }
                    }
                }
                out
            }
        }
    }
}

/// Assemble a block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("block_diag of zero blocks".into()));
    }
    for b in blocks {
        if !b.is_square() {
            return Err(Error::DimensionMismatch("block_diag needs square blocks".into()));
        }
    }
    let d: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(d, d);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.rows();
    }
    Ok(out)
}

/// n algebra elements stacked vertically: an nd x d matrix.
#[derive(Debug, Clone)]
pub struct ColumnModuleElement {
    algebra: Algebra,
    blocks: Vec<ComplexMatrix>,
    matrix: ComplexMatrix,
}

/// n algebra elements side by side: a d x nd matrix.
#[derive(Debug, Clone)]
pub struct RowModuleElement {
    algebra: Algebra,
    blocks: Vec<ComplexMatrix>,
    matrix: ComplexMatrix,
}

fn check_blocks(algebra: &Algebra, blocks: &[ComplexMatrix]) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("module element needs n >= 1".into()));
    }
    for b in blocks {
        if !algebra.membership(b, MEMBERSHIP_TOL)? {
            let residual = match algebra {
                Algebra::Block(a) => a.off_block_mass(b),
                Algebra::Basis(a) => a.project(b).1,
            };
            return Err(Error::NotInAlgebra {
                residual,
                tol: MEMBERSHIP_TOL,
            });
        }
    }
    Ok(())
}

impl ColumnModuleElement {
    pub fn from_blocks(algebra: Algebra, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        check_blocks(&algebra, &blocks)?;
        let matrix = ComplexMatrix::vstack(&blocks)?;
        Ok(Self { algebra, blocks, matrix })
    }

    pub fn from_matrix(algebra: Algebra, matrix: ComplexMatrix) -> Result<Self> {
        let d = algebra.dim();
        if matrix.cols() != d || matrix.rows() % d != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not an nd x d stack over dim {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n = matrix.rows() / d;
        let blocks: Vec<ComplexMatrix> = (0..n)
            .map(|l| matrix.submatrix(l * d..(l + 1) * d, 0..d))
            .collect();
        check_blocks(&algebra, &blocks)?;
        Ok(Self { algebra, blocks, matrix })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn composition(&self) -> Result<&Composition> {
        self.algebra
            .as_block()
            .map(|a| a.composition())
            .ok_or(Error::NotBlockDiagonal)
    }

    /// The columns of the j-th block: an nd x d_j matrix (zero rows kept).
    pub fn column_slice(&self, j: usize) -> Result<ComplexMatrix> {
        let comp = self.composition()?;
        if j >= comp.len() {
            return Err(Error::IndexOutOfRange { index: j, k: comp.len() });
        }
        Ok(self.matrix.submatrix(0..self.matrix.rows(), comp.range(j)))
    }

    /// The n stacked j-th diagonal blocks: an nd_j x d_j matrix.
    pub fn column_block(&self, j: usize) -> Result<ComplexMatrix> {
        let comp = self.composition()?;
        if j >= comp.len() {
            return Err(Error::IndexOutOfRange { index: j, k: comp.len() });
        }
        let r = comp.range(j);
        let parts: Vec<ComplexMatrix> = self
            .blocks
            .iter()
            .map(|b| b.submatrix(r.clone(), r.clone()))
            .collect();
        ComplexMatrix::vstack(&parts)
    }

    /// Norm via the block lemma: the max over j of the column-slice norms.
    pub fn stacked_norm(&self, p: PExponent, cfg: &OptimizerConfig) -> Result<f64> {
        let comp = self.composition()?;
        let mut best: f64 = 0.0;
        for j in 0..comp.len() {
            let blk = self.column_block(j)?;
            best = best.max(best_op_norm(&blk, p, p, cfg).value);
        }
        Ok(best)
    }
}

impl RowModuleElement {
    pub fn from_blocks(algebra: Algebra, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        check_blocks(&algebra, &blocks)?;
        let matrix = ComplexMatrix::hstack(&blocks)?;
        Ok(Self { algebra, blocks, matrix })
    }

    pub fn from_matrix(algebra: Algebra, matrix: ComplexMatrix) -> Result<Self> {
        let d = algebra.dim();
        if matrix.rows() != d || matrix.cols() % d != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a d x nd stack over dim {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n = matrix.cols() / d;
        let blocks: Vec<ComplexMatrix> = (0..n)
            .map(|l| matrix.submatrix(0..d, l * d..(l + 1) * d))
            .collect();
        check_blocks(&algebra, &blocks)?;
        Ok(Self { algebra, blocks, matrix })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn composition(&self) -> Result<&Composition> {
        self.algebra
            .as_block()
            .map(|a| a.composition())
            .ok_or(Error::NotBlockDiagonal)
    }

    /// The rows of the j-th block: a d_j x nd matrix (zero columns kept).
    pub fn row_slice(&self, j: usize) -> Result<ComplexMatrix> {
        let comp = self.composition()?;
        if j >= comp.len() {
            return Err(Error::IndexOutOfRange { index: j, k: comp.len() });
        }
        Ok(self.matrix.submatrix(comp.range(j), 0..self.matrix.cols()))
    }

    /// The n side-by-side j-th diagonal blocks: a d_j x nd_j matrix.
    pub fn row_block(&self, j: usize) -> Result<ComplexMatrix> {
        let comp = self.composition()?;
        if j >= comp.len() {
            return Err(Error::IndexOutOfRange { index: j, k: comp.len() });
        }
        let r = comp.range(j);
        let parts: Vec<ComplexMatrix> = self
            .blocks
            .iter()
            .map(|b| b.submatrix(r.clone(), r.clone()))
            .collect();
        ComplexMatrix::hstack(&parts)
    }

    /// Norm via the block lemma: the max over j of the row-slice norms.
    pub fn stacked_norm(&self, p: PExponent, cfg: &OptimizerConfig) -> Result<f64> {
        let comp = self.composition()?;
        let mut best: f64 = 0.0;
        for j in 0..comp.len() {
            let blk = self.row_block(j)?;
            best = best.max(best_op_norm(&blk, p, p, cfg).value);
        }
        Ok(best)
    }
}

// Wire format: {"kind": "block", "parts": [...]} or
// {"kind": "basis", "dim": d, "basis": [matrix, ...]}.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum AlgebraWire {
    Block { parts: Vec<usize> },
    Basis { dim: usize, basis: Vec<ComplexMatrix> },
}

impl Serialize for Algebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            Algebra::Block(a) => AlgebraWire::Block {
                parts: a.composition().parts().to_vec(),
            },
            Algebra::Basis(a) => AlgebraWire::Basis {
                dim: a.dim(),
                basis: a.basis().to_vec(),
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Algebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match AlgebraWire::deserialize(d)? {
            AlgebraWire::Block { parts } => {
                let comp = Composition::new(parts).map_err(de::Error::custom)?;
                Ok(Algebra::block(comp))
            }
            AlgebraWire::Basis { dim, basis } => {
                let alg = ParametrizedAlgebra::new(dim, basis).map_err(de::Error::custom)?;
                Ok(Algebra::Basis(alg))
            }
        }
    }
}
