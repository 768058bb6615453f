//! Multiplicities from the joint YJM spectrum, and the full block
//! diagonalization obtained by splitting each isotypic component with an
//! intertwiner null space.
//!
//! After the YJM family is diagonalized, basis vectors are sorted by their
//! content vectors. The columns belonging to one irreducible `λ` with
//! multiplicity `a` then come in tableau-major, copy-minor order: column
//! `t·a + p` carries copy `p` of tableau `t`. In that basis each generator
//! restricted to the component equals `ρ_λ ⊗ I_a` up to an unknown
//! orthogonal mixing of the copies inside every content eigenspace, which the
//! intertwiner solve removes.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::combinatorics::{
    is_valid_content, partition_of_content, tableau_count, ContentVector, Partition,
};
use crate::eigen::{
    diagonalization_residual, nullspace_orthonormal_scaled, simultaneous_diagonalize,
    DEFAULT_RANK_TOL,
};
use crate::error::{Error, Result};
use crate::irrep::{irrep_generators, irrep_yjm_diagonals, IrrepGenerators};
use crate::operator::{max_abs, orthogonality_defect, Operator};
use crate::oracle::{multiplicities_by_characters, TRACE_ORACLE_MAX_N};
use crate::repbuild::{assemble_yjm, Representation};

/// Default block residual tolerance per unit dimension.
pub const DEFAULT_TOL_PER_DIM: f64 = 1e-8;
/// Environment variable overriding [`DEFAULT_TOL_PER_DIM`].
pub const TOL_ENV: &str = "SYMDECOMP_TOL";
/// Orthogonality threshold for a computed `Q`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Largest `n` for which verification consults the character oracle.
pub const VERIFY_ORACLE_MAX_N: usize = 7;

/// Per-dimension tolerance factor, honouring `SYMDECOMP_TOL`.
pub fn tolerance_factor() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL_PER_DIM)
}

/// Joint YJM eigenvalues, one content vector per basis vector, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SpectrumMatrix {
    rows: Vec<ContentVector>,
}

impl SpectrumMatrix {
    pub fn rows(&self) -> &[ContentVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_vecs(&self) -> Vec<Vec<i64>> {
        self.rows.iter().map(|r| r.entries().to_vec()).collect()
    }
}

/// One irreducible constituent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub partition: Partition,
    pub multiplicity: usize,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionResult {
    pub components: Vec<Component>,
    #[serde(skip)]
    pub q: Option<DMatrix<f64>>,
    #[serde(skip)]
    pub canonical_only: bool,
    pub residual: f64,
}

impl DecompositionResult {
    pub fn dim(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.multiplicity * c.dimension)
            .sum()
    }

    pub fn multiplicity(&self, shape: &Partition) -> usize {
        self.components
            .iter()
            .find(|c| &c.partition == shape)
            .map_or(0, |c| c.multiplicity)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Null-space basis `u` and the reshaped blocks `Q̄⁽ʲ⁾` of one isotypic split.
#[derive(Clone, Debug)]
pub struct IsotypicSplit {
    pub u: DMatrix<f64>,
    pub qbar: Vec<DMatrix<f64>>,
}

impl IsotypicSplit {
    /// `[Q̄⁽¹⁾, …, Q̄⁽ᵃ⁾]`.
    pub fn assembled(&self) -> DMatrix<f64> {
        let rows = self.qbar.first().map_or(0, |b| b.nrows());
        let cols: usize = self.qbar.iter().map(|b| b.ncols()).sum();
        let mut q = DMatrix::zeros(rows, cols);
        let mut c = 0;
        for b in &self.qbar {
            q.columns_mut(c, b.ncols()).copy_from(b);
            c += b.ncols();
        }
        q
    }
}

/// How the intertwiner equations are set up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitStrategy {
    /// Unknowns restricted to the `a·d_λ` entries allowed by matching
    /// content vectors. Requires the tableau-major, copy-minor layout.
    #[default]
    Restricted,
    /// All `(a·d_λ)·d_λ` entries; works for any basis.
    Dense,
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    pub strategy: SplitStrategy,
    pub rank_tol: f64,
    /// Block residual tolerance per unit dimension.
    pub tol_per_dim: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            strategy: SplitStrategy::Restricted,
            rank_tol: DEFAULT_RANK_TOL,
            tol_per_dim: tolerance_factor(),
        }
    }
}

/// Simultaneously diagonalizes `ρ(X_2), …, ρ(X_n)` and sorts the basis by
/// content vector. Commutation is enforced through the deflation
/// invariance check.
pub fn joint_spectrum(rep: &Representation) -> Result<(DMatrix<f64>, SpectrumMatrix)> {
    let (q, spec, _) = joint_spectrum_with_residual(rep)?;
    Ok((q, spec))
}

fn joint_spectrum_with_residual(
    rep: &Representation,
) -> Result<(DMatrix<f64>, SpectrumMatrix, f64)> {
    let d = rep.dim();
    let yjm = assemble_yjm(rep);
    let xs = &yjm.matrices[1..];
    let bounds: Vec<i64> = (2..=rep.n()).map(|j| j as i64 - 1).collect();
    let sd = if xs.is_empty() {
        crate::eigen::SimultaneousDiagonalization {
            q: DMatrix::identity(d, d),
            diagonals: vec![],
            residual: 0.0,
        }
    } else {
        simultaneous_diagonalize(xs, &bounds)?
    };

    let raw: Vec<Vec<i64>> = (0..d)
        .map(|c| {
            std::iter::once(0)
                .chain(sd.diagonals.iter().map(|diag| diag[c]))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw[a].cmp(&raw[b]));

    let mut q = DMatrix::zeros(d, d);
    let mut rows = Vec::with_capacity(d);
    for (dst, &src) in order.iter().enumerate() {
        q.set_column(dst, &sd.q.column(src));
        is_valid_content(&raw[src]).map_err(Error::ContentInvariant)?;
        rows.push(ContentVector::new(raw[src].clone())?);
    }
    let sorted_diagonals: Vec<Vec<i64>> = (0..xs.len())
        .map(|k| rows.iter().map(|r| r.entries()[k + 1]).collect())
        .collect();
    let residual = diagonalization_residual(xs, &q, &sorted_diagonals);
    Ok((q, SpectrumMatrix { rows }, residual))
}

/// A component together with the spectrum positions of its columns.
struct Grouped {
    component: Component,
    columns: Vec<usize>,
}

/// Groups sorted spectrum rows by partition in order of first occurrence and
/// checks that every tableau content of `λ` occurs exactly `a` times.
fn group_components(spec: &SpectrumMatrix) -> Result<Vec<Grouped>> {
    let mut groups: Vec<(Partition, Vec<usize>)> = vec![];
    let mut index: HashMap<Partition, usize> = HashMap::new();
    for (i, row) in spec.rows.iter().enumerate() {
        let shape = partition_of_content(row)?;
        let k = *index.entry(shape.clone()).or_insert_with(|| {
            groups.push((shape, vec![]));
            groups.len() - 1
        });
        groups[k].1.push(i);
    }
    groups
        .into_iter()
        .map(|(partition, columns)| {
            let dimension = tableau_count(&partition);
            let count = columns.len();
            let inconsistent = || Error::InconsistentSpectrum {
                partition: partition.parts().to_vec(),
                count,
                dimension,
            };
            if count % dimension != 0 {
                return Err(inconsistent());
            }
            let a = count / dimension;
            let contents = irrep_yjm_diagonals(&partition);
            for (pos, &col) in columns.iter().enumerate() {
                if spec.rows[col] != contents[pos / a] {
                    return Err(inconsistent());
                }
            }
            Ok(Grouped {
                component: Component {
                    partition,
                    multiplicity: a,
                    dimension,
                },
                columns,
            })
        })
        .collect()
}

/// Partitions and multiplicities from the joint spectrum. The returned `Q`
/// is the canonical-reduction matrix `Q̃` with columns in sorted spectrum
/// order; `residual` is its YJM diagonalization residual.
pub fn multiplicities(rep: &Representation) -> Result<DecompositionResult> {
    let (q, spec, residual) = joint_spectrum_with_residual(rep)?;
    let groups = group_components(&spec)?;
    let result = DecompositionResult {
        components: groups.into_iter().map(|g| g.component).collect(),
        q: Some(q),
        canonical_only: true,
        residual,
    };
    debug_assert_eq!(result.dim(), rep.dim());
    Ok(result)
}

fn gather_columns(q: &DMatrix<f64>, columns: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(q.nrows(), columns.len());
    for (dst, &src) in columns.iter().enumerate() {
        out.set_column(dst, &q.column(src));
    }
    out
}

/// Solves `ρ̃(τ_ℓ)Q̄ = Q̄(I_a ⊗ ρ_λ(τ_ℓ))` for all generators and returns the
/// `a` orthonormal intertwiner blocks.
pub fn split_isotypic(
    rtilde: &Representation,
    shape: &Partition,
    a: usize,
) -> Result<IsotypicSplit> {
    split_isotypic_with(
        rtilde,
        shape,
        a,
        SplitStrategy::Restricted,
        DEFAULT_RANK_TOL,
    )
}

/// Maps an unknown index to its (row, column) in the block.
type Placement = Box<dyn Fn(usize) -> (usize, usize)>;

pub fn split_isotypic_with(
    rtilde: &Representation,
    shape: &Partition,
    a: usize,
    strategy: SplitStrategy,
    rank_tol: f64,
) -> Result<IsotypicSplit> {
    let irr = irrep_generators(shape);
    let d = irr.dim();
    if rtilde.n() != shape.n() || rtilde.dim() != a * d || a == 0 {
        return Err(Error::InvalidArgument(format!(
            "isotypic block of dimension {} cannot hold {a} copies of {shape} (dimension {d})",
            rtilde.dim()
        )));
    }
    let big = a * d;
    let rt: Vec<DMatrix<f64>> = rtilde.generators().iter().map(Operator::to_dense).collect();
    let rl: Vec<DMatrix<f64>> = irr.generators.iter().map(Operator::to_dense).collect();
    // equation (r, c) of generator ℓ sits at row ℓ·big·d + c·big + r
    let eq_rows = rt.len() * big * d;

    let (system, place): (DMatrix<f64>, Placement) = match strategy {
        SplitStrategy::Restricted => {
            // unknown s·a + p is Q̄[s·a + p, s]
            let mut sys = DMatrix::zeros(eq_rows, big);
            for (l, (g, h)) in rt.iter().zip(&rl).enumerate() {
                let base = l * big * d;
                for s in 0..d {
                    for p in 0..a {
                        let x = s * a + p;
                        for r in 0..big {
                            sys[(base + s * big + r, x)] += g[(r, x)];
                        }
                        for c in 0..d {
                            sys[(base + c * big + x, x)] -= h[(s, c)];
                        }
                    }
                }
            }
            (sys, Box::new(move |x| (x, x / a)))
        }
        SplitStrategy::Dense => {
            // unknown c·big + r is Q̄[r, c] (column-major vec)
            let mut sys = DMatrix::zeros(eq_rows, big * d);
            for (l, (g, h)) in rt.iter().zip(&rl).enumerate() {
                let base = l * big * d;
                for c in 0..d {
                    for r in 0..big {
                        let row = base + c * big + r;
                        for k in 0..big {
                            sys[(row, c * big + k)] += g[(r, k)];
                        }
                        for k in 0..d {
                            sys[(row, k * big + r)] -= h[(k, c)];
                        }
                    }
                }
            }
            (sys, Box::new(move |x| (x % big, x / big)))
        }
    };

    let u = if system.nrows() == 0 {
        // n = 1: every vector intertwines; only a = 1, d = 1 is possible
        DMatrix::identity(system.ncols(), system.ncols())
    } else {
        // generators are orthogonal, so the equations have unit scale
        nullspace_orthonormal_scaled(&system, rank_tol, 1.0)
    };
    if u.ncols() != a {
        return Err(Error::MultiplicityMismatch {
            expected: a,
            found: u.ncols(),
        });
    }
    let scale = (d as f64).sqrt();
    let qbar: Vec<DMatrix<f64>> = (0..a)
        .map(|j| {
            let mut block = DMatrix::zeros(big, d);
            for x in 0..u.nrows() {
                let (r, c) = place(x);
                block[(r, c)] = scale * u[(x, j)];
            }
            block
        })
        .collect();
    let split = IsotypicSplit { u, qbar };
    let defect = orthogonality_defect(&split.assembled());
    let tol = ORTHOGONALITY_TOL.max(DEFAULT_TOL_PER_DIM * big as f64);
    if defect > tol {
        return Err(Error::NumericalFailure {
            stage: format!("orthogonality of the {shape} split"),
            residual: defect,
            tolerance: tol,
        });
    }
    Ok(split)
}

/// Fixes column signs of a multiplicity-free block so its off-diagonal
/// generator entries are positive, as in Young's orthogonal form.
fn normalize_signs(block: &mut DMatrix<f64>, rep: &Representation, irr: &IrrepGenerators) {
    let d = irr.dim();
    let rt: Vec<DMatrix<f64>> = rep
        .generators()
        .iter()
        .map(|g| g.conjugate_by(block))
        .collect();
    let mut sign: Vec<Option<f64>> = vec![None; d];
    let mut stack = vec![0];
    sign[0] = Some(1.0);
    while let Some(s) = stack.pop() {
        let ss = sign[s].unwrap();
        for (l, g) in irr.generators.iter().enumerate() {
            for t in 0..d {
                if t == s || sign[t].is_some() || g.get(t, s) <= 0.0 {
                    continue;
                }
                sign[t] = Some(ss * rt[l][(t, s)].signum());
                stack.push(t);
            }
        }
    }
    for (c, s) in sign.iter().enumerate() {
        if s.unwrap_or(1.0) < 0.0 {
            block.column_mut(c).neg_mut();
        }
    }
}

/// Full block diagonalization with default options.
pub fn block_diagonalize(rep: &Representation) -> Result<DecompositionResult> {
    block_diagonalize_with(rep, &DecomposeOptions::default())
}

pub fn block_diagonalize_with(
    rep: &Representation,
    options: &DecomposeOptions,
) -> Result<DecompositionResult> {
    let (q_tilde, spec, _) = joint_spectrum_with_residual(rep)?;
    let groups = group_components(&spec)?;
    let d = rep.dim();
    let mut q = DMatrix::zeros(d, d);
    let mut col = 0;
    for g in &groups {
        let Component {
            partition,
            multiplicity: a,
            dimension,
        } = &g.component;
        let irr = irrep_generators(partition);
        let mut block = gather_columns(&q_tilde, &g.columns);
        if *a == 1 {
            normalize_signs(&mut block, rep, &irr);
        } else {
            let rtilde = Representation::from_trusted(
                rep.n(),
                block.ncols(),
                rep.generators()
                    .iter()
                    .map(|gen| Operator::from_dense(gen.conjugate_by(&block)))
                    .collect(),
            );
            let split =
                split_isotypic_with(&rtilde, partition, *a, options.strategy, options.rank_tol)?;
            block = &block * split.assembled();
        }
        q.columns_mut(col, a * dimension).copy_from(&block);
        col += a * dimension;
    }
    let components: Vec<Component> = groups.into_iter().map(|g| g.component).collect();
    let residual = block_residual(rep, &q, &components)?;
    let tol = options.tol_per_dim * d.max(1) as f64;
    if residual > tol {
        return Err(Error::NumericalFailure {
            stage: "block diagonalization".into(),
            residual,
            tolerance: tol,
        });
    }
    Ok(DecompositionResult {
        components,
        q: Some(q),
        canonical_only: false,
        residual,
    })
}

/// `max_ℓ ‖Qᵀρ(τ_ℓ)Q − ⊕_k (I_{a_k} ⊗ ρ_{λᵏ}(τ_ℓ))‖_max`.
pub fn block_residual(
    rep: &Representation,
    q: &DMatrix<f64>,
    components: &[Component],
) -> Result<f64> {
    let d = rep.dim();
    let total: usize = components
        .iter()
        .map(|c| c.multiplicity * c.dimension)
        .sum();
    if q.nrows() != d || q.ncols() != d || total != d {
        return Err(Error::InvalidArgument(format!(
            "Q is {}x{} and components span {total}, representation has dimension {d}",
            q.nrows(),
            q.ncols()
        )));
    }
    let irreps: Vec<IrrepGenerators> = components
        .iter()
        .map(|c| irrep_generators(&c.partition))
        .collect();
    let mut worst = 0.0f64;
    for (l, g) in rep.generators().iter().enumerate() {
        let mut m = g.conjugate_by(q);
        let mut offset = 0;
        for (c, irr) in components.iter().zip(&irreps) {
            let target = irr.generators[l].to_dense();
            for _ in 0..c.multiplicity {
                let mut view = m.view_mut((offset, offset), (c.dimension, c.dimension));
                view -= &target;
                offset += c.dimension;
            }
        }
        worst = worst.max(max_abs(&m));
    }
    Ok(worst)
}

/// Outcome of re-checking a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub dimension_sum: usize,
    pub dimension: usize,
    pub orthogonality: f64,
    pub block_residual: f64,
    pub tolerance: f64,
    /// `(partition, oracle, found)` for every disagreement; `None` when the
    /// oracle was not consulted.
    pub oracle_mismatches: Option<Vec<(Partition, usize, usize)>>,
}

impl VerificationReport {
    pub fn orthogonal(&self) -> bool {
        self.orthogonality <= ORTHOGONALITY_TOL
    }

    pub fn passed(&self) -> bool {
        self.dimension_sum == self.dimension
            && self.orthogonal()
            && self.block_residual <= self.tolerance
            && self.oracle_mismatches.as_ref().is_none_or(|m| m.is_empty())
    }
}

/// Recomputes orthogonality and block residuals of `result.q`, and compares
/// multiplicities with the character oracle when `n ≤ 7`.
pub fn verify_decomposition(
    rep: &Representation,
    result: &DecompositionResult,
) -> VerificationReport {
    let d = rep.dim();
    let (orthogonality, block_residual) = match &result.q {
        Some(q) if q.nrows() == d && q.ncols() == d => (
            orthogonality_defect(q),
            self::block_residual(rep, q, &result.components).unwrap_or(f64::INFINITY),
        ),
        _ => (f64::INFINITY, f64::INFINITY),
    };
    let oracle_mismatches = (rep.n() <= VERIFY_ORACLE_MAX_N.min(TRACE_ORACLE_MAX_N))
        .then(|| multiplicities_by_characters(rep).ok())
        .flatten()
        .map(|expected| {
            expected
                .into_iter()
                .filter_map(|(shape, m)| {
                    let found = result.multiplicity(&shape);
                    (found != m).then_some((shape, m, found))
                })
                .collect()
        });
    VerificationReport {
        dimension_sum: result.dim(),
        dimension: d,
        orthogonality,
        block_residual,
        tolerance: tolerance_factor() * d.max(1) as f64,
        oracle_mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::partitions_of;
    use crate::repbuild::{
        direct_sum, direct_sum_all, irrep_representation, permutation_representation,
        regular_representation, tensor_product, trivial_representation,
    };

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn comps(r: &DecompositionResult) -> Vec<(Vec<usize>, usize)> {
        r.components
            .iter()
            .map(|c| (c.partition.parts().to_vec(), c.multiplicity))
            .collect()
    }

    /// `ρ_λ^{⊕a}` reordered into tableau-major, copy-minor layout, with a
    /// rotation mixing the copies inside each content eigenspace.
    fn canonical_copies(shape: &Partition, a: usize, angle: f64) -> Representation {
        let irr = irrep_representation(shape).unwrap();
        let d = irr.dim();
        let sum = direct_sum_all(&vec![irr; a]).unwrap();
        let mut perm = DMatrix::zeros(a * d, a * d);
        for t in 0..d {
            for c in 0..a {
                perm[(c * d + t, t * a + c)] = 1.0;
            }
        }
        let mut rot = DMatrix::identity(a * d, a * d);
        if a >= 2 {
            for t in 0..d {
                let (s, c) = (
                    (angle * (t + 1) as f64).sin(),
                    (angle * (t + 1) as f64).cos(),
                );
                let (i, j) = (t * a, t * a + 1);
                rot[(i, i)] = c;
                rot[(j, j)] = c;
                rot[(i, j)] = -s;
                rot[(j, i)] = s;
            }
        }
        sum.conjugated(&(perm * rot))
    }

    #[test]
    fn permutation_spectrum_s4() {
        let (q, spec) = joint_spectrum(&permutation_representation(4).unwrap()).unwrap();
        assert_eq!(
            spec.to_vecs(),
            vec![
                vec![0, -1, 1, 2],
                vec![0, 1, -1, 2],
                vec![0, 1, 2, -1],
                vec![0, 1, 2, 3]
            ]
        );
        assert!(orthogonality_defect(&q) < 1e-12);
    }

    #[test]
    fn trivial_spectrum_is_single_row() {
        for n in 1..=6 {
            let (_, spec) = joint_spectrum(&trivial_representation(n).unwrap()).unwrap();
            assert_eq!(spec.to_vecs(), vec![(0..n as i64).collect::<Vec<_>>()]);
        }
    }

    #[test]
    fn irrep_spectra_are_tableau_contents() {
        for n in 1..=6 {
            for shape in partitions_of(n).unwrap() {
                let (_, spec) = joint_spectrum(&irrep_representation(&shape).unwrap()).unwrap();
                let mut expected = irrep_yjm_diagonals(&shape);
                expected.sort();
                assert_eq!(spec.rows(), expected.as_slice(), "{shape}");
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let r = multiplicities(&permutation_representation(4).unwrap()).unwrap();
        assert_eq!(comps(&r), vec![(vec![3, 1], 1), (vec![4], 1)]);
        assert!(r.canonical_only);

        let irr = irrep_representation(&p(&[3, 2])).unwrap();
        let r = multiplicities(&direct_sum(&irr, &irr).unwrap()).unwrap();
        assert_eq!(comps(&r), vec![(vec![3, 2], 2)]);

        let t = irrep_representation(&p(&[2, 1])).unwrap();
        let r = multiplicities(&tensor_product(&t, &t).unwrap()).unwrap();
        let mut found = comps(&r);
        found.sort();
        assert_eq!(
            found,
            vec![(vec![1, 1, 1], 1), (vec![2, 1], 1), (vec![3], 1)]
        );
        assert_eq!(r.dim(), 4);
    }

    #[test]
    fn components_ordered_by_first_occurrence() {
        let r = multiplicities(&regular_representation(3, false).unwrap()).unwrap();
        assert_eq!(
            comps(&r),
            vec![(vec![1, 1, 1], 1), (vec![2, 1], 2), (vec![3], 1)]
        );
    }

    #[test]
    fn lone_copy_of_a_partial_component_is_inconsistent() {
        let spec = SpectrumMatrix {
            rows: vec![ContentVector::new(vec![0, 1, -1]).unwrap()],
        };
        assert!(matches!(
            group_components(&spec),
            Err(Error::InconsistentSpectrum {
                count: 1,
                dimension: 2,
                ..
            })
        ));
        // right count, wrong contents
        let spec = SpectrumMatrix {
            rows: vec![
                ContentVector::new(vec![0, 1, -1]).unwrap(),
                ContentVector::new(vec![0, 1, -1]).unwrap(),
            ],
        };
        assert!(matches!(
            group_components(&spec),
            Err(Error::InconsistentSpectrum { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let r = multiplicities(&permutation_representation(4).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["components"][0]["partition"], serde_json::json!([3, 1]));
        assert_eq!(v["components"][0]["multiplicity"], 1);
        assert_eq!(v["components"][0]["dimension"], 3);
        assert_eq!(v["components"][1]["partition"], serde_json::json!([4]));
        assert!(v["residual"].is_number());
        assert!(v.get("q").is_none());
    }

    #[test]
    fn single_copy_split_is_signed_identity() {
        let shape = p(&[3, 1]);
        let split = split_isotypic(&irrep_representation(&shape).unwrap(), &shape, 1).unwrap();
        let q = split.assembled();
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!((q[(r, c)].abs() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_already_separated_copies() {
        for shape in [p(&[2, 1]), p(&[3, 1]), p(&[2, 2])] {
            for a in 1..=3 {
                let rt = canonical_copies(&shape, a, 0.0);
                let split = split_isotypic(&rt, &shape, a).unwrap();
                assert_eq!(split.u.ncols(), a);
                let rt = canonical_copies(&shape, a, 0.7);
                let split = split_isotypic(&rt, &shape, a).unwrap();
                let q = split.assembled();
                assert!(orthogonality_defect(&q) < 1e-10);
                let dense =
                    split_isotypic_with(&rt, &shape, a, SplitStrategy::Dense, DEFAULT_RANK_TOL)
                        .unwrap();
                assert_eq!(dense.u.ncols(), a);
                let components = [Component {
                    partition: shape.clone(),
                    multiplicity: a,
                    dimension: tableau_count(&shape),
                }];
                assert!(block_residual(&rt, &q, &components).unwrap() < 1e-10);
                assert!(block_residual(&rt, &dense.assembled(), &components).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_blocks_split() {
        // every equation vanishes up to rounding; all of R^a intertwines
        let rep = direct_sum(
            &irrep_representation(&p(&[5])).unwrap(),
            &irrep_representation(&p(&[5])).unwrap(),
        )
        .unwrap();
        let noisy = rep.conjugated(&DMatrix::from_row_slice(2, 2, &[0.6, 0.8, -0.8, 0.6]));
        let split = split_isotypic(&noisy, &p(&[5]), 2).unwrap();
        assert_eq!(split.u.ncols(), 2);
        let r = block_diagonalize(
            &crate::repbuild::tensor_power(&permutation_representation(5).unwrap(), 2).unwrap(),
        )
        .unwrap();
        assert_eq!(r.multiplicity(&p(&[5])), 2);
        assert_eq!(r.multiplicity(&p(&[4, 1])), 3);
    }

    #[test]
    fn mismatched_multiplicity_is_reported() {
        // (3,1) ⊕ (2,1,1) has the dimension of two copies of (3,1)
        let rep = direct_sum(
            &irrep_representation(&p(&[3, 1])).unwrap(),
            &irrep_representation(&p(&[2, 1, 1])).unwrap(),
        )
        .unwrap();
        let err = split_isotypic_with(&rep, &p(&[3, 1]), 2, SplitStrategy::Dense, DEFAULT_RANK_TOL)
            .unwrap_err();
        assert!(matches!(
            err,
            Error::MultiplicityMismatch {
                expected: 2,
                found: 1
            }
        ));
        assert!(split_isotypic(&rep, &p(&[3, 1]), 3).is_err());
    }

    #[test]
    fn regular_s3_split_blocks_carry_the_irrep() {
        let rep = regular_representation(3, false).unwrap();
        let r = block_diagonalize(&rep).unwrap();
        assert!(!r.canonical_only);
        assert!(r.residual <= 1e-10, "{}", r.residual);
        assert_eq!(r.multiplicity(&p(&[2, 1])), 2);
        assert!(orthogonality_defect(r.q.as_ref().unwrap()) < 1e-10);
    }

    #[test]
    fn permutation_s4_and_known_witness() {
        let rep = permutation_representation(4).unwrap();
        let r = block_diagonalize(&rep).unwrap();
        assert!(r.residual <= 1e-10);
        let report = verify_decomposition(&rep, &r);
        assert!(report.passed(), "{report:?}");

        let (s2, s6, s12) = (2f64.sqrt(), 6f64.sqrt(), 12f64.sqrt());
        #[rustfmt::skip]
        let witness = DMatrix::from_row_slice(4, 4, &[
            1.0 / s2, 1.0 / s6, 1.0 / s12, -0.5,
            -1.0 / s2, 1.0 / s6, 1.0 / s12, -0.5,
            0.0, -(2.0f64 / 3.0).sqrt(), 1.0 / s12, -0.5,
            0.0, 0.0, -(3f64.sqrt()) / 2.0, -0.5,
        ]);
        assert!(orthogonality_defect(&witness) < 1e-15);
        assert!(block_residual(&rep, &witness, &r.components).unwrap() < 1e-15);
    }

    #[test]
    fn irrep_decomposes_to_signed_identity() {
        let shape = p(&[3, 2, 1]);
        let rep = irrep_representation(&shape).unwrap();
        let r = block_diagonalize(&rep).unwrap();
        assert!(r.residual < 1e-10);
        let q = r.q.unwrap();
        for i in 0..q.nrows() {
            assert!((q[(i, i)].abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn regular_s4_components() {
        let rep = regular_representation(4, false).unwrap();
        let r = block_diagonalize(&rep).unwrap();
        assert!(r.residual <= 1e-9);
        for c in &r.components {
            assert_eq!(c.multiplicity, c.dimension);
        }
        assert_eq!(r.components.len(), 5);
    }

    #[test]
    fn dense_strategy_agrees() {
        let t = irrep_representation(&p(&[2, 2])).unwrap();
        let rep = tensor_product(&t, &t).unwrap();
        let opts = DecomposeOptions {
            strategy: SplitStrategy::Dense,
            ..DecomposeOptions::default()
        };
        let a = block_diagonalize_with(&rep, &opts).unwrap();
        let b = block_diagonalize(&rep).unwrap();
        assert_eq!(a.components, b.components);
        assert!(a.residual < 1e-10);
    }

    #[test]
    fn verification_flags_broken_q() {
        let rep = permutation_representation(4).unwrap();
        let mut r = block_diagonalize(&rep).unwrap();
        r.q.as_mut().unwrap().column_mut(0).fill(0.0);
        let report = verify_decomposition(&rep, &r);
        assert!(!report.orthogonal());
        assert!(!report.passed());

        let mut r = block_diagonalize(&rep).unwrap();
        r.components[0].multiplicity = 2;
        r.components[1].multiplicity = 0;
        let report = verify_decomposition(&rep, &r);
        assert!(!report.oracle_mismatches.unwrap().is_empty());
    }
}
