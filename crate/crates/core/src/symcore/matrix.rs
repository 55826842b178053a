use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::registry::Registry;
use super::rf::RationalFunction;
use super::SymError;

/// Dense matrix over the rational function field, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<RationalFunction>,
}

impl Mat {
    pub fn zeros(reg: &Arc<Registry>, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![RationalFunction::zero(reg); rows * cols],
        }
    }

    pub fn identity(reg: &Arc<Registry>, n: usize) -> Self {
        let mut m = Self::zeros(reg, n, n);
        for i in 0..n {
            m.set(i, i, RationalFunction::one(reg));
        }
        m
    }

    pub fn from_fn(
        reg: &Arc<Registry>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RationalFunction,
    ) -> Self {
        let mut m = Self::zeros(reg, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(_reg: &Arc<Registry>, rows: Vec<Vec<RationalFunction>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.data
            .first()
            .map(|x| x.registry())
            .expect("empty matrix has no registry")
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalFunction) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if i == j && !e.is_one() {
                    return false;
                }
                if i != j && !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let reg = self.registry();
        let mut out = Mat::zeros(reg, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RationalFunction::zero(reg);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let reg = self.registry();
        Mat::from_fn(reg, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, mut f: impl FnMut(&RationalFunction) -> RationalFunction) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| f(x)).collect(),
        }
    }

    pub fn try_map(
        &self,
        mut f: impl FnMut(&RationalFunction) -> Result<RationalFunction, SymError>,
    ) -> Result<Mat, SymError> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            data.push(f(x)?);
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Mat, SymError> {
        if self.rows != self.cols {
            return Err(SymError::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let reg = self.registry();
        let mut a = self.clone();
        let mut inv = Mat::identity(reg, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return Err(SymError::SingularMatrix),
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).clone();
            let pinv = p.inv()?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                a.row_sub_scaled(r, col, &factor);
                inv.row_sub_scaled(r, col, &factor);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &RationalFunction) {
        for j in 0..self.cols {
            let v = self.get(r, j).mul(c);
            self.set(r, j, v);
        }
    }

    /// row r -= factor * row src
    fn row_sub_scaled(&mut self, r: usize, src: usize, factor: &RationalFunction) {
        for j in 0..self.cols {
            let v = self.get(r, j).sub(&self.get(src, j).mul(factor));
            self.set(r, j, v);
        }
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let pivot = (row..self.rows).find(|&r| !a.get(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            if pivot != row {
                a.swap_rows(pivot, row);
            }
            let pinv = a.get(row, col).inv().expect("pivot is nonzero");
            a.scale_row(row, &pinv);
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                a.row_sub_scaled(r, row, &factor);
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    /// Solves A x = b for all columns of b at once. Errors when the system is
    /// inconsistent or underdetermined.
    pub fn solve(&self, b: &Mat) -> Result<Mat, SymError> {
        if self.rows != b.rows {
            return Err(SymError::Shape(format!(
                "solve: {} equations vs {} right-hand rows",
                self.rows, b.rows
            )));
        }
        let reg = self.registry();
        let mut aug = Mat::zeros(reg, self.rows, self.cols + b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for j in 0..b.cols {
                aug.set(i, self.cols + j, b.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        // Inconsistent if a pivot lands in the right-hand block.
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(SymError::SingularMatrix);
        }
        if pivots.len() < self.cols {
            return Err(SymError::SingularMatrix);
        }
        let mut x = Mat::zeros(reg, self.cols, b.cols);
        for (row, &col) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(col, j, r.get(row, self.cols + j).clone());
            }
        }
        Ok(x)
    }

    /// Dimension of the kernel.
    pub fn nullity(&self) -> usize {
        let (_, pivots) = self.rref();
        self.cols - pivots.len()
    }

    /// Basis of the kernel, one column per basis vector, in the canonical
    /// rref parametrization.
    pub fn nullspace(&self) -> Mat {
        let reg = self.registry();
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Mat::zeros(reg, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, RationalFunction::one(reg));
            for (row, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, r.get(row, fc).neg());
            }
        }
        basis
    }

    /// Plain trace.
    pub fn trace(&self) -> RationalFunction {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        let reg = self.registry();
        let mut acc = RationalFunction::zero(reg);
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Supertrace: diagonal entries weighted by (-1)^parity.
    pub fn supertrace(&self, parities: &[bool]) -> RationalFunction {
        assert_eq!(self.rows, self.cols, "supertrace of a non-square matrix");
        assert_eq!(self.rows, parities.len(), "parity vector length mismatch");
        let reg = self.registry();
        let mut acc = RationalFunction::zero(reg);
        for i in 0..self.rows {
            if parities[i] {
                acc = acc.sub(self.get(i, i));
            } else {
                acc = acc.add(self.get(i, i));
            }
        }
        acc
    }
}

/// Kronecker product with Koszul signs. Rows of the result are indexed by
/// pairs (i, j), columns by (k, l), with
///   (A (x) B)[(i,j),(k,l)] = (-1)^((|j| + |l|) |k|) A[i,k] B[j,l]
/// where |j|, |l| are parities of B's row j and column l and |k| is the
/// parity of A's column k. With all parities even this is the plain
/// Kronecker product.
pub fn super_kron(
    a: &Mat,
    b: &Mat,
    a_col_par: &[bool],
    b_row_par: &[bool],
    b_col_par: &[bool],
) -> Mat {
    assert_eq!(a.ncols(), a_col_par.len());
    assert_eq!(b.nrows(), b_row_par.len());
    assert_eq!(b.ncols(), b_col_par.len());
    let reg = a.registry();
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    let mut out = Mat::zeros(reg, rows, cols);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let av = a.get(i, k);
            if av.is_zero() {
                continue;
            }
            for j in 0..b.nrows() {
                for l in 0..b.ncols() {
                    let bv = b.get(j, l);
                    if bv.is_zero() {
                        continue;
                    }
                    let sign = (b_row_par[j] ^ b_col_par[l]) && a_col_par[k];
                    let val = av.mul(bv);
                    let val = if sign { val.neg() } else { val };
                    out.set(i * b.nrows() + j, k * b.ncols() + l, val);
                }
            }
        }
    }
    out
}

/// Plain Kronecker product (all parities even).
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let a_col = vec![false; a.ncols()];
    let b_row = vec![false; b.nrows()];
    let b_col = vec![false; b.ncols()];
    super_kron(a, b, &a_col, &b_row, &b_col)
}

/// Block-diagonal assembly. Panics on an empty block list.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let reg = blocks
        .first()
        .expect("block_diag needs at least one block")
        .registry();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(reg, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                out.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Parity vector of a tensor product of two super spaces.
pub fn tensor_parity(p1: &[bool], p2: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(p1.len() * p2.len());
    for &a in p1 {
        for &b in p2 {
            out.push(a ^ b);
        }
    }
    out
}

impl fmt::Display for Mat {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(out, ", ")?;
                }
                write!(out, "{}", self.get(i, j))?;
            }
            write!(out, "]")?;
        }
        write!(out, "]")
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.get(i, j).to_string())
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}
