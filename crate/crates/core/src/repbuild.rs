//! Orthogonal representations of Sₙ given by their Coxeter generators, the
//! standard constructions on them, and assembly of the Young–Jucys–Murphy
//! matrices.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::combinatorics::Partition;
use crate::error::{Error, Result};
use crate::irrep::irrep_generators;
use crate::operator::{max_abs, Operator, SparseMatrix};

/// Default tolerance for generator validation; scaled by the dimension.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-8;

/// Largest `n` accepted by [`regular_representation`] without the override.
pub const REGULAR_MAX_N: usize = 6;

/// A representation `ρ: Sₙ → O(d)` given by `ρ(τ_1), …, ρ(τ_{n-1})`.
#[derive(Clone, Debug)]
pub struct Representation {
    n: usize,
    dim: usize,
    generators: Vec<Operator>,
}

impl Representation {
    /// Wraps generators after checking them with [`validate_generators`].
    pub fn new(n: usize, dim: usize, generators: Vec<Operator>) -> Result<Self> {
        let report = validate_generators(n, dim, &generators, DEFAULT_VALIDATION_TOL);
        if !report.passed() {
            return Err(Error::Validation(report.to_string()));
        }
        Ok(Representation { n, dim, generators })
    }

    /// Wraps generators that are correct by construction.
    pub(crate) fn from_trusted(n: usize, dim: usize, generators: Vec<Operator>) -> Self {
        debug_assert_eq!(generators.len(), n.saturating_sub(1));
        debug_assert!(generators.iter().all(|g| g.dim() == dim));
        Representation { n, dim, generators }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ρ(τ_1), …, ρ(τ_{n-1})`, indexed from zero.
    pub fn generators(&self) -> &[Operator] {
        &self.generators
    }

    /// `Qᵀ ρ(τ_ℓ) Q` for every generator. `q` must be orthogonal.
    pub fn conjugated(&self, q: &DMatrix<f64>) -> Representation {
        let generators = self
            .generators
            .iter()
            .map(|g| Operator::from_dense(g.conjugate_by(q)))
            .collect();
        Representation::from_trusted(self.n, q.ncols(), generators)
    }
}

/// The one-dimensional trivial representation.
pub fn trivial_representation(n: usize) -> Result<Representation> {
    irrep_representation(&Partition::row(n)?)
}

/// `ρ_λ` in Young's orthogonal form.
pub fn irrep_representation(shape: &Partition) -> Result<Representation> {
    let irr = irrep_generators(shape);
    Ok(Representation::from_trusted(
        irr.n(),
        irr.dim(),
        irr.generators,
    ))
}

/// Permutation matrices: generator `ℓ` is `Iₙ` with rows `ℓ` and `ℓ+1` swapped.
pub fn permutation_representation(n: usize) -> Result<Representation> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "permutation representation needs n >= 2, got {n}"
        )));
    }
    let generators = (0..n - 1)
        .map(|l| {
            let triplets = (0..n)
                .map(|r| {
                    let c = if r == l {
                        l + 1
                    } else if r == l + 1 {
                        l
                    } else {
                        r
                    };
                    (r, c, 1.0)
                })
                .collect();
            Operator::Sparse(SparseMatrix::from_triplets(n, triplets))
        })
        .collect();
    Ok(Representation::from_trusted(n, n, generators))
}

/// All permutations of `0..n` in lexicographic one-line order.
pub(crate) fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Left regular representation on the `n!` group elements. Refuses
/// `n > 6` unless `allow_large` is set.
pub fn regular_representation(n: usize, allow_large: bool) -> Result<Representation> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "regular representation needs n >= 2, got {n}"
        )));
    }
    if n > REGULAR_MAX_N && !allow_large {
        return Err(Error::DimensionGuard {
            what: format!("regular({n})"),
            dimension: (1..=n).product(),
            cap: (1..=REGULAR_MAX_N).product(),
        });
    }
    let elements = all_permutations(n);
    let index: HashMap<&[usize], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_slice(), i))
        .collect();
    let dim = elements.len();
    let generators = (0..n - 1)
        .map(|l| {
            let triplets = elements
                .iter()
                .enumerate()
                .map(|(col, g)| {
                    // τ ∘ g swaps the values l and l+1 in one-line notation
                    let h: Vec<usize> = g
                        .iter()
                        .map(|&v| {
                            if v == l {
                                l + 1
                            } else if v == l + 1 {
                                l
                            } else {
                                v
                            }
                        })
                        .collect();
                    (index[h.as_slice()], col, 1.0)
                })
                .collect();
            Operator::Sparse(SparseMatrix::from_triplets(dim, triplets))
        })
        .collect();
    Ok(Representation::from_trusted(n, dim, generators))
}

fn check_same_n(a: &Representation, b: &Representation) -> Result<()> {
    if a.n != b.n {
        return Err(Error::InvalidArgument(format!(
            "representations of S{} and S{} cannot be combined",
            a.n, b.n
        )));
    }
    Ok(())
}

/// `ρ₁ ⊗ ρ₂` with generators `kron(ρ₁(τ_ℓ), ρ₂(τ_ℓ))`.
pub fn tensor_product(a: &Representation, b: &Representation) -> Result<Representation> {
    check_same_n(a, b)?;
    let generators = a
        .generators
        .iter()
        .zip(&b.generators)
        .map(|(x, y)| x.kron(y))
        .collect();
    Ok(Representation::from_trusted(a.n, a.dim * b.dim, generators))
}

/// Left-associated tensor product of one or more representations.
pub fn tensor_product_all(factors: &[Representation]) -> Result<Representation> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty tensor product".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, f| tensor_product(&acc, f))
}

/// `ρ^{⊗k}` for `k ≥ 1`.
pub fn tensor_power(rep: &Representation, k: usize) -> Result<Representation> {
    if k == 0 {
        return Err(Error::InvalidArgument("tensor power needs k >= 1".into()));
    }
    tensor_product_all(&vec![rep.clone(); k])
}

pub fn direct_sum(a: &Representation, b: &Representation) -> Result<Representation> {
    check_same_n(a, b)?;
    let generators = a
        .generators
        .iter()
        .zip(&b.generators)
        .map(|(x, y)| x.direct_sum(y))
        .collect();
    Ok(Representation::from_trusted(a.n, a.dim + b.dim, generators))
}

pub fn direct_sum_all(summands: &[Representation]) -> Result<Representation> {
    let (first, rest) = summands
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty direct sum".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| direct_sum(&acc, s))
}

/// `ρ((i j))` for `1 ≤ i < j ≤ n`, via
/// `(i j) = τ_i ⋯ τ_{j-2} τ_{j-1} τ_{j-2} ⋯ τ_i`.
pub fn transposition_matrix(rep: &Representation, i: usize, j: usize) -> Result<DMatrix<f64>> {
    if !(1 <= i && i < j && j <= rep.n) {
        return Err(Error::InvalidArgument(format!(
            "transposition ({i} {j}) is not in S{}",
            rep.n
        )));
    }
    let mut m = rep.generators[j - 2].to_dense();
    for l in (i..j - 1).rev() {
        let g = &rep.generators[l - 1];
        m = g.dense_mul(&g.mul_dense(&m));
    }
    Ok(m)
}

/// `ρ(X_1), …, ρ(X_n)`.
#[derive(Clone, Debug)]
pub struct YjmMatrices {
    pub matrices: Vec<DMatrix<f64>>,
}

impl YjmMatrices {
    /// `ρ(X_j)` for 1-based `j`.
    pub fn get(&self, j: usize) -> &DMatrix<f64> {
        &self.matrices[j - 1]
    }

    /// Largest `‖[X_i, X_j]‖_max` over all pairs.
    pub fn max_commutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, x) in self.matrices.iter().enumerate() {
            for y in &self.matrices[a + 1..] {
                worst = worst.max(max_abs(&(x * y - y * x)));
            }
        }
        worst
    }
}

/// YJM matrices from the recurrence `X_{j+1} = τ_j X_j τ_j + τ_j`, without
/// checking commutativity.
pub fn assemble_yjm(rep: &Representation) -> YjmMatrices {
    let d = rep.dim;
    let mut matrices = Vec::with_capacity(rep.n);
    matrices.push(DMatrix::zeros(d, d));
    for g in &rep.generators {
        let prev = matrices.last().unwrap();
        let mut next = g.dense_mul(&g.mul_dense(prev));
        next += g.to_dense();
        let sym = (&next + next.transpose()) * 0.5;
        matrices.push(sym);
    }
    YjmMatrices { matrices }
}

/// Commutator tolerance for YJM matrices, per unit dimension.
pub const YJM_COMMUTATOR_TOL: f64 = 1e-10;

/// Assembles the YJM matrices and checks that they pairwise commute to
/// within `1e-10·d`.
pub fn yjm_matrices(rep: &Representation) -> Result<YjmMatrices> {
    let yjm = assemble_yjm(rep);
    let worst = yjm.max_commutator();
    if worst > YJM_COMMUTATOR_TOL * rep.dim as f64 {
        return Err(Error::HomomorphismViolation(format!(
            "YJM commutator {worst:e} exceeds {:e}",
            YJM_COMMUTATOR_TOL * rep.dim as f64
        )));
    }
    Ok(yjm)
}

/// Maximum deviations of a generator list from the relations defining an
/// orthogonal representation of Sₙ.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub dim: usize,
    /// Problems with the number or shape of the generators.
    pub shape_errors: Vec<String>,
    pub symmetry: f64,
    pub orthogonality: f64,
    pub involution: f64,
    pub braid: f64,
    pub commutation: f64,
    /// Threshold applied to every deviation (already scaled by `dim`).
    pub threshold: f64,
}

impl ValidationReport {
    fn checks(&self) -> [(&'static str, f64); 5] {
        [
            ("symmetry", self.symmetry),
            ("orthogonality", self.orthogonality),
            ("involution", self.involution),
            ("braid", self.braid),
            ("commutation", self.commutation),
        ]
    }

    /// Names of the relations whose deviation exceeds the threshold.
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks()
            .into_iter()
            .filter(|(_, v)| v.is_nan() || *v > self.threshold)
            .map(|(name, _)| name)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.shape_errors.is_empty() && self.failures().is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.shape_errors {
            write!(f, "{e}; ")?;
        }
        for (name, v) in self.checks() {
            let verdict = if v <= self.threshold { "ok" } else { "FAILED" };
            write!(f, "{name} {v:.3e} {verdict}; ")?;
        }
        write!(f, "threshold {:.3e}", self.threshold)
    }
}

/// Checks symmetry, orthogonality and the Coxeter relations `G_ℓ² = I`,
/// `(G_ℓ G_{ℓ+1})³ = I`, `G_i G_j = G_j G_i` for `|i − j| ≥ 2`. Deviations
/// are compared against `tol · dim`.
pub fn validate_generators(
    n: usize,
    dim: usize,
    generators: &[Operator],
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport {
        n,
        dim,
        shape_errors: vec![],
        symmetry: 0.0,
        orthogonality: 0.0,
        involution: 0.0,
        braid: 0.0,
        commutation: 0.0,
        threshold: tol * dim.max(1) as f64,
    };
    if generators.len() != n.saturating_sub(1) {
        report.shape_errors.push(format!(
            "expected {} generators for S{n}, found {}",
            n.saturating_sub(1),
            generators.len()
        ));
    }
    if let Some((l, g)) = generators.iter().enumerate().find(|(_, g)| g.dim() != dim) {
        report.shape_errors.push(format!(
            "generator {} is {}x{}, expected {dim}x{dim}",
            l + 1,
            g.dim(),
            g.dim()
        ));
    }
    if !report.shape_errors.is_empty() {
        return report;
    }
    let identity = DMatrix::<f64>::identity(dim, dim);
    let dense: Vec<DMatrix<f64>> = generators.iter().map(Operator::to_dense).collect();
    for (l, g) in generators.iter().enumerate() {
        let gd = &dense[l];
        report.symmetry = report.symmetry.max(max_abs(&(gd - gd.transpose())));
        report.orthogonality = report
            .orthogonality
            .max(max_abs(&(g.dense_mul(&gd.transpose()) - &identity)));
        report.involution = report
            .involution
            .max(max_abs(&(g.mul_dense(gd) - &identity)));
        if let Some(h) = dense.get(l + 1) {
            let gh = g.mul_dense(h);
            let cube = &gh * &gh * &gh;
            report.braid = report.braid.max(max_abs(&(cube - &identity)));
        }
        for (m, h) in dense.iter().enumerate().skip(l + 2) {
            let comm = g.mul_dense(h) - generators[m].mul_dense(gd);
            report.commutation = report.commutation.max(max_abs(&comm));
        }
    }
    report
}

/// On-disk representation format: dense generator matrices as nested row
/// arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub n: usize,
    pub d: usize,
    pub generators: Vec<Vec<Vec<f64>>>,
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

impl RepresentationFile {
    pub fn from_representation(rep: &Representation) -> Self {
        RepresentationFile {
            n: rep.n,
            d: rep.dim,
            generators: rep
                .generators
                .iter()
                .map(|g| matrix_to_rows(&g.to_dense()))
                .collect(),
        }
    }

    pub fn into_representation(self) -> Result<Representation> {
        let mut generators = Vec::with_capacity(self.generators.len());
        for (l, rows) in self.generators.iter().enumerate() {
            let m = rows_to_matrix(rows)?;
            if m.nrows() != self.d || m.ncols() != self.d {
                return Err(Error::Parse(format!(
                    "generator {} is {}x{}, header says d = {}",
                    l + 1,
                    m.nrows(),
                    m.ncols(),
                    self.d
                )));
            }
            generators.push(Operator::from_dense(m));
        }
        Representation::new(self.n, self.d, generators)
    }
}

pub fn representation_from_json(text: &str) -> Result<Representation> {
    let file: RepresentationFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_representation()
}

pub fn representation_from_file(path: impl AsRef<Path>) -> Result<Representation> {
    representation_from_json(&fs::read_to_string(path)?)
}

pub fn write_representation(path: impl AsRef<Path>, rep: &Representation) -> Result<()> {
    let text = serde_json::to_string(&RepresentationFile::from_representation(rep))?;
    fs::write(path, text)?;
    Ok(())
}
