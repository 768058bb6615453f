//! Square real matrices stored either as compressed sparse rows or densely.
//!
//! Generators of permutation and Young-form representations have at most two
//! nonzeros per row, and Kronecker products of sparse factors stay sparse, so
//! most representations never need dense generator storage.

use nalgebra::DMatrix;

/// Fill ratio above which an operator is stored densely.
pub const DENSIFY_FILL: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        let mut m = SparseMatrix {
            dim,
            indptr,
            indices,
            values,
        };
        m.drop_zeros();
        m
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            indptr: (0..=dim).collect(),
            indices: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut triplets = vec![];
        for r in 0..dim {
            for c in 0..dim {
                if m[(r, c)] != 0.0 {
                    triplets.push((r, c, m[(r, c)]));
                }
            }
        }
        SparseMatrix::from_triplets(dim, triplets)
    }

    fn drop_zeros(&mut self) {
        let mut indptr = vec![0; self.dim + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `r` as `(col, value)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let dim = self.dim * other.dim;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for r1 in 0..self.dim {
            for (c1, v1) in self.row(r1) {
                for r2 in 0..other.dim {
                    for (c2, v2) in other.row(r2) {
                        triplets.push((r1 * other.dim + r2, c1 * other.dim + c2, v1 * v2));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(dim, triplets)
    }
}

/// A square matrix in whichever storage suits its fill.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Sparse(SparseMatrix),
    Dense(DMatrix<f64>),
}

impl Operator {
    /// Wraps a sparse matrix, densifying if its fill exceeds [`DENSIFY_FILL`].
    pub fn from_sparse(m: SparseMatrix) -> Self {
        let fill = m.nnz() as f64 / (m.dim().max(1) * m.dim().max(1)) as f64;
        if fill > DENSIFY_FILL && m.dim() > 4 {
            Operator::Dense(m.to_dense())
        } else {
            Operator::Sparse(m)
        }
    }

    /// Wraps a dense matrix, switching to sparse storage if it is sparse enough.
    pub fn from_dense(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operators are square");
        let nnz = m.iter().filter(|v| **v != 0.0).count();
        let dim = m.nrows().max(1);
        if (nnz as f64) / ((dim * dim) as f64) <= DENSIFY_FILL || m.nrows() <= 4 {
            Operator::Sparse(SparseMatrix::from_dense(&m))
        } else {
            Operator::Dense(m)
        }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::Sparse(SparseMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Sparse(s) => s.dim(),
            Operator::Dense(d) => d.nrows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Operator::Sparse(_))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Operator::Sparse(s) => s.to_dense(),
            Operator::Dense(d) => d.clone(),
        }
    }

    fn to_sparse(&self) -> SparseMatrix {
        match self {
            Operator::Sparse(s) => s.clone(),
            Operator::Dense(d) => SparseMatrix::from_dense(d),
        }
    }

    /// Maximum number of nonzeros in any row.
    pub fn max_row_nnz(&self) -> usize {
        match self {
            Operator::Sparse(s) => (0..s.dim()).map(|r| s.row(r).count()).max().unwrap_or(0),
            Operator::Dense(d) => d
                .row_iter()
                .map(|row| row.iter().filter(|v| **v != 0.0).count())
                .max()
                .unwrap_or(0),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self {
            Operator::Sparse(s) => s.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v),
            Operator::Dense(d) => d[(r, c)],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `self * m`.
    pub fn mul_dense(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Operator::Dense(d) => d * m,
            Operator::Sparse(s) => {
                let mut out = DMatrix::zeros(s.dim(), m.ncols());
                for c in 0..m.ncols() {
                    let col = m.column(c);
                    let mut out_col = out.column_mut(c);
                    for r in 0..s.dim() {
                        out_col[r] = s.row(r).map(|(k, v)| v * col[k]).sum();
                    }
                }
                out
            }
        }
    }

    /// `m * self`.
    pub fn dense_mul(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Operator::Dense(d) => m * d,
            Operator::Sparse(s) => {
                let mut out = DMatrix::zeros(m.nrows(), s.dim());
                for r in 0..s.dim() {
                    for (c, v) in s.row(r) {
                        out.column_mut(c).axpy(v, &m.column(r), 1.0);
                    }
                }
                out
            }
        }
    }

    /// `qᵀ · self · q` for a matrix `q` with `dim` rows.
    pub fn conjugate_by(&self, q: &DMatrix<f64>) -> DMatrix<f64> {
        q.transpose() * self.mul_dense(q)
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => Operator::from_sparse(a.kron(b)),
            _ => Operator::from_dense(self.to_dense().kronecker(&other.to_dense())),
        }
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Operator) -> Operator {
        let (a, b) = (self.to_sparse(), other.to_sparse());
        let shift = a.dim();
        let mut triplets = Vec::with_capacity(a.nnz() + b.nnz());
        for r in 0..a.dim() {
            triplets.extend(a.row(r).map(|(c, v)| (r, c, v)));
        }
        for r in 0..b.dim() {
            triplets.extend(b.row(r).map(|(c, v)| (r + shift, c + shift, v)));
        }
        Operator::from_sparse(SparseMatrix::from_triplets(a.dim() + b.dim(), triplets))
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `‖mᵀm − I‖_max`.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let mut g = m.transpose() * m;
    for i in 0..g.nrows() {
        g[(i, i)] -= 1.0;
    }
    max_abs(&g)
}
