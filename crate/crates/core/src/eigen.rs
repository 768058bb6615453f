//! Symmetric eigendecomposition for matrices with integer spectra,
//! simultaneous diagonalization of commuting families by successive
//! deflation, and orthonormal null spaces.
//!
//! The integer solver reduces `A` to tridiagonal form with Householder
//! reflections and then, for each candidate integer `m`, extracts the null
//! space of `T − mI` from a pivoted tridiagonal factorization. Sturm counts
//! decide how many eigenvalues lie within `0.25` of each integer, so an
//! eigenvalue that is not close to an integer aborts the decomposition
//! instead of being rounded.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::max_abs;

/// Half-width of the window around each integer in which eigenvalues are
/// accepted.
pub const ROUNDING_GUARD: f64 = 0.25;

/// Default relative singular-value cutoff for [`nullspace_orthonormal`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Diagonalization residual allowed per unit of the eigenvalue bound.
pub const DIAG_TOL: f64 = 1e-8;

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diag));
        for (i, &e) in self.off.iter().enumerate() {
            m[(i + 1, i)] = e;
            m[(i, i + 1)] = e;
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }

    /// Bound on the spectral norm.
    pub fn scale(&self) -> f64 {
        let dmax = self.diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let emax = self.off.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        dmax + 2.0 * emax
    }

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// pivots of `T − xI = LDLᵀ`.
    pub fn sturm_count(&self, x: f64) -> usize {
        sturm_count(&self.diag, &self.off, x)
    }
}

fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE / f64::EPSILON;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        q = diag[i]
            - x
            - if i > 0 {
                off[i - 1] * off[i - 1] / q
            } else {
                0.0
            };
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn symmetry_check(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = max_abs(a).max(1.0);
    let asym = max_abs(&(a - a.transpose()));
    if asym > 1e-10 * scale {
        return Err(Error::InvalidArgument(format!(
            "matrix is not symmetric (deviation {asym:e})"
        )));
    }
    Ok(scale)
}

/// Householder reduction `Q_Hᵀ A Q_H = T`.
#[allow(clippy::needless_range_loop)]
pub fn tridiagonalize(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Tridiagonal)> {
    symmetry_check(a)?;
    let n = a.nrows();
    let mut work = (a + a.transpose()) * 0.5;
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors: Vec<(usize, DVector<f64>, f64)> = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: DVector<f64> = work.view((k + 1, k), (m, 1)).column(0).clone_owned();
        let tail = v.rows(1, m - 1).norm_squared();
        if tail == 0.0 {
            off[k] = v[0];
            continue;
        }
        let norm = (v[0] * v[0] + tail).sqrt();
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let beta = 2.0 / v.norm_squared();

        let mut sub = work.view_mut((k + 1, k + 1), (m, m));
        let p = (&sub * &v) * beta;
        let w = &p - &v * (0.5 * beta * p.dot(&v));
        sub.ger(-1.0, &v, &w, 1.0);
        sub.ger(-1.0, &w, &v, 1.0);

        off[k] = alpha;
        reflectors.push((k, v, beta));
    }
    if n >= 2 {
        off[n - 2] = work[(n - 1, n - 2)];
    }
    let diag = (0..n).map(|i| work[(i, i)]).collect();

    let mut q = DMatrix::identity(n, n);
    for (k, v, beta) in reflectors.iter().rev() {
        let m = n - k - 1;
        let mut block = q.view_mut((k + 1, k + 1), (m, m));
        let w = block.transpose() * v;
        block.ger(-beta, v, &w, 1.0);
    }
    Ok((q, Tridiagonal { diag, off }))
}

/// Pivoted LU of a tridiagonal matrix, as in LAPACK's `gttrf`.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Factorizes `T − shift·I`; pivots below `pivtol` in magnitude are
    /// replaced by `±pivtol`.
    fn new(diag: &[f64], off: &[f64], shift: f64, pivtol: f64) -> Self {
        let s = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; s.saturating_sub(2)];
        let mut swapped = vec![false; s.saturating_sub(1)];
        for i in 0..s.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < s {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for p in d.iter_mut() {
            if p.abs() < pivtol {
                *p = if *p < 0.0 { -pivtol } else { pivtol };
            }
        }
        TridiagonalLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let s = self.d.len();
        for i in 0..s.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..s).rev() {
            let mut v = b[i];
            if i + 1 < s {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < s {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

/// Deterministic probe vectors for inverse iteration.
fn probe_vector(len: usize, index: usize) -> Vec<f64> {
    if index == 0 {
        return vec![1.0; len];
    }
    (0..len)
        .map(|i| ((i + 1) as f64 * (index as f64 * 0.618_033_988_75 + 0.3)).sin() + 0.01)
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
    }
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], shift: f64, x: &[f64]) -> f64 {
    let s = diag.len();
    (0..s)
        .map(|i| {
            let mut r = (diag[i] - shift) * x[i];
            if i > 0 {
                r += off[i - 1] * x[i - 1];
            }
            if i + 1 < s {
                r += off[i] * x[i + 1];
            }
            r.abs()
        })
        .fold(0.0, f64::max)
}

/// Orthonormal basis of the `count`-dimensional eigenspace of an unreduced
/// tridiagonal block for the eigenvalue cluster at `shift`.
fn cluster_vectors(
    diag: &[f64],
    off: &[f64],
    shift: f64,
    count: usize,
    scale: f64,
) -> Vec<Vec<f64>> {
    let s = diag.len();
    let pivtol = f64::EPSILON * scale.max(1.0);
    let lu = TridiagonalLu::new(diag, off, shift, pivtol);
    let target = 1e-12 * scale.max(1.0) * (s as f64).sqrt();
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(count);
    for c in 0..count {
        let mut x = probe_vector(s, c);
        orthogonalize_against(&mut x, &found);
        normalize(&mut x);
        for iter in 0..5 {
            lu.solve(&mut x);
            orthogonalize_against(&mut x, &found);
            normalize(&mut x);
            if iter >= 1 && tridiagonal_residual(diag, off, shift, &x) <= target {
                break;
            }
        }
        found.push(x);
    }
    found
}

/// Orthogonal `Q` and integer eigenvalues with `QᵀAQ ≈ diag(values)`.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub vectors: DMatrix<f64>,
    /// Rounded eigenvalues in non-decreasing order.
    pub values: Vec<i64>,
    /// `‖QᵀAQ − diag(values)‖_max`.
    pub residual: f64,
}

/// Diagonalizes a symmetric matrix whose eigenvalues are integers in
/// `[-bound, bound]`.
pub fn integer_eigen_decompose(a: &DMatrix<f64>, bound: i64) -> Result<EigenResult> {
    let d = a.nrows();
    let (qh, t) = tridiagonalize(a)?;
    let scale = t.scale().max(1.0);
    let split_tol = 4.0 * f64::EPSILON * scale * (d.max(1) as f64);

    // Unreduced blocks [start, end).
    let mut blocks = vec![];
    let mut start = 0;
    for i in 0..d.saturating_sub(1) {
        if t.off[i].abs() <= split_tol {
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    if d > 0 {
        blocks.push((start, d));
    }

    // (eigenvalue, block start, vector within block)
    let mut pairs: Vec<(i64, usize, Vec<f64>)> = Vec::with_capacity(d);
    for &(b0, b1) in &blocks {
        let diag = &t.diag[b0..b1];
        let off_full = &t.off[b0..b1 - 1];
        let mut off = off_full.to_vec();
        // entries below the split threshold inside a block cannot exist,
        // but keep the factorization away from exact zeros
        for e in off.iter_mut() {
            if e.abs() <= split_tol {
                *e = 0.0;
            }
        }
        let size = b1 - b0;
        let mut accounted = 0;
        for m in -bound..=bound {
            let lo = sturm_count(diag, &off, m as f64 - ROUNDING_GUARD);
            let hi = sturm_count(diag, &off, m as f64 + ROUNDING_GUARD);
            let count = hi - lo;
            if count == 0 {
                continue;
            }
            accounted += count;
            for v in cluster_vectors(diag, &off, m as f64, count, scale) {
                pairs.push((m, b0, v));
            }
        }
        if accounted != size {
            let below = sturm_count(diag, &off, -(bound as f64) - ROUNDING_GUARD);
            let above = size - sturm_count(diag, &off, bound as f64 + ROUNDING_GUARD);
            return Err(Error::SpectrumNotInteger(format!(
                "{} of {size} eigenvalues in a tridiagonal block lie within {ROUNDING_GUARD} of an \
                 integer in [-{bound}, {bound}] ({below} below, {above} above the range)",
                accounted
            )));
        }
    }
    pairs.sort_by_key(|p| p.0);

    let mut vectors = DMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (col, (m, b0, v)) in pairs.iter().enumerate() {
        let w = DVector::from_column_slice(v);
        let basis = qh.columns(*b0, v.len());
        vectors.set_column(col, &(basis * w));
        values.push(*m);
    }
    let mut projected = vectors.transpose() * a * &vectors;
    for (i, &m) in values.iter().enumerate() {
        projected[(i, i)] -= m as f64;
    }
    let residual = max_abs(&projected);
    Ok(EigenResult {
        vectors,
        values,
        residual,
    })
}

/// One orthogonal matrix diagonalizing a commuting family, with the integer
/// diagonal of each member.
#[derive(Clone, Debug)]
pub struct SimultaneousDiagonalization {
    pub q: DMatrix<f64>,
    /// `diagonals[k][c]` is the eigenvalue of member `k` on column `c`.
    pub diagonals: Vec<Vec<i64>>,
    /// Largest eigen or invariance residual met during deflation.
    pub residual: f64,
}

struct DeflationBlock {
    basis: DMatrix<f64>,
    labels: Vec<i64>,
}

/// Diagonalizes the first matrix, then diagonalizes each later matrix on
/// every joint eigenspace found so far. `bounds[k]` bounds the spectrum of
/// `xs[k]`.
pub fn simultaneous_diagonalize(
    xs: &[DMatrix<f64>],
    bounds: &[i64],
) -> Result<SimultaneousDiagonalization> {
    if xs.len() != bounds.len() {
        return Err(Error::InvalidArgument(format!(
            "{} matrices but {} bounds",
            xs.len(),
            bounds.len()
        )));
    }
    let d = xs.first().map_or(0, |x| x.nrows());
    if xs.iter().any(|x| x.nrows() != d || x.ncols() != d) {
        return Err(Error::InvalidArgument("matrices differ in size".into()));
    }
    let mut blocks = vec![DeflationBlock {
        basis: DMatrix::identity(d, d),
        labels: vec![],
    }];
    let mut residual = 0.0f64;
    for (k, (x, &bound)) in xs.iter().zip(bounds).enumerate() {
        let tol = DIAG_TOL * (bound.max(1) as f64);
        let mut next = Vec::with_capacity(blocks.len());
        for block in blocks {
            let (restricted, invariance) = if k == 0 {
                (x.clone(), 0.0)
            } else {
                let y = x * &block.basis;
                let m = block.basis.transpose() * &y;
                let invariance = max_abs(&(&y - &block.basis * &m));
                (m, invariance)
            };
            if invariance > tol {
                return Err(Error::NotCommuting {
                    residual: invariance,
                });
            }
            let sym = (&restricted + restricted.transpose()) * 0.5;
            let eig = integer_eigen_decompose(&sym, bound)?;
            if eig.residual > tol {
                return Err(Error::NumericalFailure {
                    stage: format!("diagonalizing member {} of the family", k + 1),
                    residual: eig.residual,
                    tolerance: tol,
                });
            }
            residual = residual.max(invariance).max(eig.residual);
            let rotated = &block.basis * &eig.vectors;
            let mut c = 0;
            while c < eig.values.len() {
                let value = eig.values[c];
                let len = eig.values[c..].iter().take_while(|&&v| v == value).count();
                let mut labels = block.labels.clone();
                labels.push(value);
                next.push(DeflationBlock {
                    basis: rotated.columns(c, len).clone_owned(),
                    labels,
                });
                c += len;
            }
        }
        blocks = next;
    }

    let mut q = DMatrix::zeros(d, d);
    let mut diagonals = vec![Vec::with_capacity(d); xs.len()];
    let mut col = 0;
    for block in &blocks {
        let w = block.basis.ncols();
        q.columns_mut(col, w).copy_from(&block.basis);
        for (k, &label) in block.labels.iter().enumerate() {
            diagonals[k].extend(std::iter::repeat_n(label, w));
        }
        col += w;
    }
    if d > 0 && xs.is_empty() {
        q = DMatrix::identity(d, d);
    }
    Ok(SimultaneousDiagonalization {
        q,
        diagonals,
        residual,
    })
}

/// `max_k ‖Qᵀ X_k Q − diag(diagonals[k])‖_max`, computed directly.
pub fn diagonalization_residual(
    xs: &[DMatrix<f64>],
    q: &DMatrix<f64>,
    diagonals: &[Vec<i64>],
) -> f64 {
    xs.iter()
        .zip(diagonals)
        .map(|(x, diag)| {
            let mut m = q.transpose() * x * q;
            for (i, &v) in diag.iter().enumerate() {
                m[(i, i)] -= v as f64;
            }
            max_abs(&m)
        })
        .fold(0.0, f64::max)
}

/// Orthonormal basis of `{v : Av ≈ 0}` from the right singular vectors whose
/// singular values fall below `rank_tol · σ_max`.
pub fn nullspace_orthonormal(a: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    nullspace_orthonormal_scaled(a, rank_tol, 0.0)
}

/// As [`nullspace_orthonormal`], with the cutoff `rank_tol · max(σ_max, scale)`.
/// A known natural scale keeps a system that is zero up to rounding from
/// being read as full rank.
pub fn nullspace_orthonormal_scaled(a: &DMatrix<f64>, rank_tol: f64, scale: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    if ncols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Reduce tall systems to a square triangular factor with the same row
    // space; pad wide ones so that every right singular vector is returned.
    let square = if a.nrows() > ncols {
        a.clone().qr().r()
    } else if a.nrows() < ncols {
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.rows_mut(0, a.nrows()).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd
        .singular_values
        .iter()
        .fold(0.0f64, |m, s| m.max(*s))
        .max(scale);
    let null: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| sigma_max == 0.0 || **s < rank_tol * sigma_max)
        .map(|(i, _)| i)
        .collect();
    let mut basis = DMatrix::zeros(ncols, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    basis
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
pub fn gram_schmidt(columns: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = columns.clone();
    for j in 0..q.ncols() {
        let original = q.column(j).norm();
        for _ in 0..2 {
            for i in 0..j {
                let dot = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-dot, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm == 0.0 || norm <= 1e-10 * original {
            return Err(Error::DependentColumns { index: j });
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok(q)
}

/// Null space via Gram–Schmidt: an orthonormal basis of the row space is
/// built with rows dropped when their residual falls below
/// `rank_tol · (largest row norm)`, then completed with pivoted
/// Gram–Schmidt on the complementary projector.
pub fn nullspace_gram_schmidt(a: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    let row_scale = (0..a.nrows())
        .map(|r| a.row(r).norm())
        .fold(0.0f64, f64::max);
    let mut row_basis: Vec<Vec<f64>> = vec![];
    if row_scale > 0.0 {
        for r in 0..a.nrows() {
            let mut v: Vec<f64> = a.row(r).iter().copied().collect();
            orthogonalize_against(&mut v, &row_basis);
            let norm = normalize(&mut v);
            if norm > rank_tol * row_scale {
                row_basis.push(v);
            }
            if row_basis.len() == ncols {
                break;
            }
        }
    }
    let nullity = ncols - row_basis.len();
    let mut residual = DMatrix::<f64>::identity(ncols, ncols);
    for b in &row_basis {
        let bv = DVector::from_column_slice(b);
        let proj = residual.transpose() * &bv;
        residual.ger(-1.0, &bv, &proj, 1.0);
    }
    let mut basis = DMatrix::zeros(ncols, nullity);
    for c in 0..nullity {
        let (best, _) = (0..ncols)
            .map(|j| (j, residual.column(j).norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mut q = residual.column(best).clone_owned();
        for _ in 0..2 {
            for prev in 0..c {
                let dot = basis.column(prev).dot(&q);
                q.axpy(-dot, &basis.column(prev), 1.0);
            }
            for b in &row_basis {
                let bv = DVector::from_column_slice(b);
                let dot = bv.dot(&q);
                q.axpy(-dot, &bv, 1.0);
            }
        }
        q.normalize_mut();
        let proj = residual.transpose() * &q;
        residual.ger(-1.0, &q, &proj, 1.0);
        basis.set_column(c, &q);
    }
    basis
}
