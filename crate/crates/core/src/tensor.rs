//! Dense matrix/vector primitives and the operators the backpropagation
//! algebra is written in: column-major vectorization, Kronecker and Hadamard
//! products, diagonal embedding, last-column removal, and row augmentation.
//!
//! Values are immutable after construction. Dimensions here are desk-scale
//! (tens at most), so everything is a plain dense `Vec<f64>` with no attempt
//! at BLAS-level performance.
//!
//! Shape preconditions are caller contracts and panic on violation.

use std::fmt;
use std::ops::Index;

/// Dense real matrix with column-major storage.
///
/// Column-major layout means `vectorize` (stacking columns top to bottom,
/// left to right) is the identity on the backing storage, which fixes the
/// layout of every flattened weight and gradient vector downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Dense real column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from column-major data.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        assert_eq!(
            data.len(),
            rows * cols,
            "expected {} entries for a {rows}x{cols} matrix, got {}",
            rows * cols,
            data.len()
        );
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of literals, e.g. `&[&[1.0, 2.0], &[3.0, 4.0]]`.
    ///
    /// Entries must be finite; NaN/Inf in a literal is a construction bug.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "matrix must have at least one row");
        let ncols = rows[0].len();
        assert!(ncols >= 1, "matrix must have at least one column");
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "row {i} has length {}, expected {ncols}", r.len());
        }
        let m = Self::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        assert!(
            m.data.iter().all(|v| v.is_finite()),
            "matrix literal contains a non-finite entry"
        );
        m
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position,
    /// in column-major order.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// A 1-row matrix holding `v` transposed.
    pub fn row_from(v: &Vector) -> Self {
        Self::from_fn(1, v.dim(), |_, j| v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vector {
        assert!(j < self.cols, "column index {j} out of range for {} columns", self.cols);
        Vector::from_slice(&self.data[j * self.rows..(j + 1) * self.rows])
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Standard matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|t| self[(i, t)] * rhs[(t, j)]).sum()
        })
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vector(&self, v: &Vector) -> Vector {
        assert_eq!(
            self.cols,
            v.dim(),
            "matrix-vector dimension mismatch: {}x{} * {}",
            self.rows,
            self.cols,
            v.dim()
        );
        Vector::from_fn(self.rows, |i| (0..self.cols).map(|t| self[(i, t)] * v[t]).sum())
    }

    /// Entrywise (Hadamard) product. Shapes must match.
    pub fn hadamard(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "hadamard shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * rhs[(i, j)])
    }

    /// Kronecker product: block (i, j) of the result is `self[(i, j)] * rhs`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// The matrix without its final column (the bullet operator on weight
    /// matrices, which strips the bias column).
    pub fn drop_last_column(&self) -> Matrix {
        assert!(
            self.cols >= 2,
            "drop_last_column requires at least 2 columns, matrix is {}x{}",
            self.rows,
            self.cols
        );
        Matrix::from_column_major(
            self.rows,
            self.cols - 1,
            self.data[..self.rows * (self.cols - 1)].to_vec(),
        )
    }

    /// Column-major vectorization: columns stacked left to right.
    pub fn vectorize(&self) -> Vector {
        Vector { data: self.data.clone() }
    }

    /// A copy with entry (i, j) replaced by `value`.
    pub fn with_entry(&self, i: usize, j: usize, value: f64) -> Matrix {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range for {}x{}", self.rows, self.cols);
        let mut data = self.data.clone();
        data[j * self.rows + i] = value;
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| s * self[(i, j)])
    }

    /// Largest absolute entrywise difference to `rhs`.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range for {}x{}", self.rows, self.cols);
        &self.data[j * self.rows + i]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>12.6}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Inverse of `vectorize`: rebuilds a `rows x cols` matrix from a
/// column-major stacked vector. Dimension mismatch is a caller bug.
pub fn unvectorize(v: &Vector, rows: usize, cols: usize) -> Matrix {
    assert_eq!(
        v.dim(),
        rows * cols,
        "unvectorize dimension mismatch: vector of dim {} cannot fill {rows}x{cols}",
        v.dim()
    );
    Matrix::from_column_major(rows, cols, v.data.clone())
}

impl Vector {
    pub fn from_slice(entries: &[f64]) -> Self {
        assert!(!entries.is_empty(), "vector must have at least one entry");
        Self { data: entries.to_vec() }
    }

    pub fn from_vec(entries: Vec<f64>) -> Self {
        assert!(!entries.is_empty(), "vector must have at least one entry");
        Self { data: entries }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        assert!(dim >= 1, "vector dimension must be >= 1");
        Self { data: (0..dim).map(&mut f).collect() }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_| 0.0)
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    /// The vector with a constant 1 appended (bias-as-column convention).
    pub fn augment(&self) -> Vector {
        let mut data = self.data.clone();
        data.push(1.0);
        Vector { data }
    }

    /// Entrywise product of two vectors of equal dimension.
    pub fn hadamard(&self, rhs: &Vector) -> Vector {
        assert_eq!(
            self.dim(),
            rhs.dim(),
            "hadamard dimension mismatch: {} vs {}",
            self.dim(),
            rhs.dim()
        );
        Vector::from_fn(self.dim(), |i| self[i] * rhs[i])
    }

    /// The square diagonal matrix carrying this vector on its main diagonal.
    pub fn diag(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { self[i] } else { 0.0 })
    }

    /// Outer product `self * row^T`, an `self.dim() x row.dim()` matrix.
    pub fn outer(&self, row: &Vector) -> Matrix {
        Matrix::from_fn(self.dim(), row.dim(), |i, j| self[i] * row[j])
    }

    pub fn add(&self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "add dimension mismatch");
        Vector::from_fn(self.dim(), |i| self[i] + rhs[i])
    }

    pub fn sub(&self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "sub dimension mismatch");
        Vector::from_fn(self.dim(), |i| self[i] - rhs[i])
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from_fn(self.dim(), |i| s * self[i])
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Vector) -> f64 {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..self.dim() {
            if self.data[i] > self.data[best] {
                best = i;
            }
        }
        best
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vector(v: &[f64]) -> Vector {
        Vector::from_slice(v)
    }

    #[test]
    fn vectorize_stacks_columns() {
        let a = Matrix::from_rows(&[&[1.0, 3.0], &[2.0, 4.0]]);
        assert_eq!(a.vectorize(), vector(&[1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn vectorize_of_column_vector_is_itself() {
        let a = Matrix::from_rows(&[&[5.0], &[7.0], &[9.0]]);
        assert_eq!(a.vectorize(), vector(&[5.0, 7.0, 9.0]));
    }

    #[test]
    fn unvectorize_inverts_vectorize() {
        let v = vector(&[1.0, 2.0, 3.0, 4.0]);
        let a = unvectorize(&v, 2, 2);
        assert_eq!(a, Matrix::from_rows(&[&[1.0, 3.0], &[2.0, 4.0]]));
        assert_eq!(unvectorize(&vector(&[5.0]), 1, 1), Matrix::from_rows(&[&[5.0]]));
    }

    #[test]
    #[should_panic(expected = "unvectorize dimension mismatch")]
    fn unvectorize_rejects_wrong_dim() {
        let _ = unvectorize(&vector(&[1.0, 2.0, 3.0]), 2, 2);
    }

    #[test]
    fn kron_scalar_one_is_identity() {
        let one = Matrix::from_rows(&[&[1.0]]);
        let b = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(one.kron(&b), b);
    }

    #[test]
    fn kron_row_with_identity() {
        let a = Matrix::from_rows(&[&[1.0, 2.0]]);
        let expected = Matrix::from_rows(&[&[1.0, 0.0, 2.0, 0.0], &[0.0, 1.0, 0.0, 2.0]]);
        assert_eq!(a.kron(&Matrix::identity(2)), expected);
    }

    #[test]
    fn kron_blocks_match_definition() {
        // Entry check straight from the block definition, independent of the
        // loop order inside kron.
        let a = Matrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 - 2.5);
        let b = Matrix::from_fn(2, 4, |i, j| (i * 4 + j) as f64 + 0.25);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 6);
        assert_eq!(k.cols(), 8);
        for i in 0..3 {
            for j in 0..2 {
                for r in 0..2 {
                    for s in 0..4 {
                        assert_eq!(k[(i * 2 + r, j * 4 + s)], a[(i, j)] * b[(r, s)]);
                    }
                }
            }
        }
    }

    #[test]
    fn hadamard_with_ones_is_identity() {
        let a = Matrix::from_fn(3, 4, |i, j| (i + 2 * j) as f64);
        let ones = Matrix::from_fn(3, 4, |_, _| 1.0);
        assert_eq!(a.hadamard(&ones), a);
    }

    #[test]
    #[should_panic(expected = "hadamard shape mismatch")]
    fn hadamard_rejects_shape_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(3, 2);
        let _ = a.hadamard(&b);
    }

    #[test]
    fn diag_builds_identity_from_ones() {
        assert_eq!(vector(&[1.0, 1.0]).diag(), Matrix::identity(2));
    }

    #[test]
    fn diag_times_vector_scales() {
        let d = vector(&[2.0, 3.0]).diag();
        assert_eq!(d.mul_vector(&vector(&[1.0, 1.0])), vector(&[2.0, 3.0]));
    }

    #[test]
    fn drop_last_column_removes_bias_block() {
        let w = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(w.drop_last_column(), Matrix::from_rows(&[&[1.0, 2.0], &[4.0, 5.0]]));
    }

    #[test]
    fn drop_last_column_shape_for_weight_matrices() {
        let w = Matrix::from_fn(4, 5, |i, j| (i * 5 + j) as f64);
        let b = w.drop_last_column();
        assert_eq!((b.rows(), b.cols()), (4, 4));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(b[(i, j)], w[(i, j)]);
            }
        }
    }

    #[test]
    #[should_panic(expected = "drop_last_column requires at least 2 columns")]
    fn drop_last_column_rejects_single_column() {
        let _ = Matrix::zeros(3, 1).drop_last_column();
    }

    #[test]
    fn augment_appends_exact_one() {
        let a = vector(&[0.2, 0.8]).augment();
        assert_eq!(a, vector(&[0.2, 0.8, 1.0]));
        assert_eq!(a[2], 1.0);
    }

    #[test]
    #[should_panic(expected = "matrix literal contains a non-finite entry")]
    fn literal_construction_rejects_nan() {
        let _ = Matrix::from_rows(&[&[1.0, f64::NAN]]);
    }

    // Deterministic pseudo-random fill for the identity checks below; keeps
    // the oracle side free of the production RNG.
    fn test_matrix(rows: usize, cols: usize, salt: u64) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| {
            let h = (i as u64)
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add((j as u64).wrapping_mul(0xbf58476d1ce4e5b9))
                .wrapping_add(salt.wrapping_mul(0x94d049bb133111eb));
            let h = (h ^ (h >> 31)).wrapping_mul(0xd6e8feb86659fd93);
            ((h >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    fn naive_matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = vec![vec![0.0; b.cols()]; a.rows()];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for t in 0..a.cols() {
                    *cell += a[(i, t)] * b[(t, j)];
                }
            }
        }
        Matrix::from_fn(a.rows(), b.cols(), |i, j| out[i][j])
    }

    #[test]
    fn matmul_matches_naive_triple_loop() {
        let a = test_matrix(4, 3, 1);
        let b = test_matrix(3, 5, 2);
        assert!(a.matmul(&b).max_abs_diff(&naive_matmul(&a, &b)) == 0.0);
    }

    #[test]
    fn kron_transpose_identity_over_random_shapes() {
        for salt in 0..100 {
            let m = 1 + (salt % 5) as usize;
            let n = 1 + (salt / 5 % 5) as usize;
            let p = 1 + (salt / 25 % 5) as usize;
            let q = 1 + (salt / 7 % 5) as usize;
            let a = test_matrix(m, n, salt);
            let b = test_matrix(p, q, salt + 1000);
            assert_eq!(a.kron(&b).transpose(), a.transpose().kron(&b.transpose()));
        }
    }

    #[test]
    fn kron_mixed_product_identity() {
        for salt in 0..100 {
            let a = test_matrix(3, 4, salt);
            let b = test_matrix(2, 3, salt + 100);
            let c = test_matrix(4, 2, salt + 200);
            let d = test_matrix(3, 5, salt + 300);
            let lhs = a.kron(&b).matmul(&c.kron(&d));
            let rhs = a.matmul(&c).kron(&b.matmul(&d));
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12, "mixed product off at salt {salt}");
        }
    }

    #[test]
    fn vec_of_axb_identity() {
        for salt in 0..100 {
            let a = test_matrix(3, 3, salt);
            let x = test_matrix(3, 3, salt + 400);
            let b = test_matrix(3, 3, salt + 800);
            let lhs = naive_matmul(&naive_matmul(&a, &x), &b).vectorize();
            let rhs = b.transpose().kron(&a).mul_vector(&x.vectorize());
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12, "vec(AXB) identity off at salt {salt}");
        }
    }

    #[test]
    fn diag_hadamard_identity_is_exact() {
        for salt in 0..20 {
            let v = test_matrix(5, 1, salt).column(0);
            let w = test_matrix(5, 1, salt + 500).column(0);
            assert_eq!(v.diag().mul_vector(&w), v.hadamard(&w));
            assert_eq!(v.hadamard(&w), w.hadamard(&v));
        }
    }

    #[test]
    fn augmented_potential_splits_into_weight_block_and_bias() {
        for salt in 0..20 {
            let w = test_matrix(3, 5, salt);
            let a = test_matrix(4, 1, salt + 600).column(0);
            let full = w.mul_vector(&a.augment());
            let split = w.drop_last_column().mul_vector(&a).add(&w.column(4));
            assert!(full.max_abs_diff(&split) <= 1e-15, "split mismatch at salt {salt}");
        }
    }

    proptest! {
        #[test]
        fn vec_unvec_round_trip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
            let a = test_matrix(rows, cols, seed);
            prop_assert_eq!(unvectorize(&a.vectorize(), rows, cols), a);
        }

        #[test]
        fn hadamard_commutes(dim in 1usize..8, seed in 0u64..1000) {
            let v = test_matrix(dim, 1, seed).column(0);
            let w = test_matrix(dim, 1, seed + 1).column(0);
            prop_assert_eq!(v.hadamard(&w), w.hadamard(&v));
        }

        #[test]
        fn kron_shape_is_product_of_shapes(
            m in 1usize..5, n in 1usize..5, p in 1usize..5, q in 1usize..5, seed in 0u64..100,
        ) {
            let a = test_matrix(m, n, seed);
            let b = test_matrix(p, q, seed + 1);
            let k = a.kron(&b);
            prop_assert_eq!((k.rows(), k.cols()), (m * p, n * q));
        }

        #[test]
        fn augment_grows_dim_by_one(dim in 1usize..10, seed in 0u64..1000) {
            let v = test_matrix(dim, 1, seed).column(0);
            let a = v.augment();
            prop_assert_eq!(a.dim(), dim + 1);
            prop_assert_eq!(a[dim], 1.0);
        }
    }
}
