//! Character-theoretic ground truth: conjugacy classes, Murnaghan–Nakayama
//! characters, multiplicities from traces and Kronecker coefficients. All
//! character arithmetic is exact.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use crate::combinatorics::{partitions_of, Partition};
use crate::error::{Error, Result};
use crate::repbuild::{all_permutations, Representation};

/// Largest `n` accepted by the oracle routines.
pub const ORACLE_MAX_N: usize = 10;
/// Largest `n` for [`multiplicity_by_characters`].
pub const TRACE_ORACLE_MAX_N: usize = 8;
/// Largest `n` for [`brute_force_multiplicities`].
pub const BRUTE_FORCE_MAX_N: usize = 6;

const ROUNDING_GUARD: f64 = 1e-6;

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// One conjugacy class of Sₙ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassData {
    pub cycle_type: Partition,
    pub size: u64,
    /// 1-based generator indices whose product lies in the class.
    pub representative: Vec<usize>,
}

fn check_oracle_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::InvalidArgument(format!(
            "oracle supports 1 <= n <= {cap}, got {n}"
        )));
    }
    Ok(())
}

/// Size of the centralizer of a permutation with the given cycle type.
fn centralizer_order(cycle_type: &Partition) -> u64 {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &p in cycle_type.parts() {
        *counts.entry(p).or_default() += 1;
    }
    counts
        .iter()
        .map(|(&j, &m)| (j as u64).pow(m as u32) * factorial(m as usize))
        .product()
}

/// Classes in the order of [`partitions_of`]. Representatives place cycles
/// on consecutive points, longest first; a cycle on `s..s+L-1` is the word
/// `τ_s τ_{s+1} ⋯ τ_{s+L-2}`.
pub fn conjugacy_classes(n: usize) -> Result<Vec<ClassData>> {
    check_oracle_n(n, ORACLE_MAX_N)?;
    let order = factorial(n);
    Ok(partitions_of(n)?
        .into_iter()
        .map(|cycle_type| {
            let mut representative = vec![];
            let mut start = 1;
            for &len in cycle_type.parts() {
                representative.extend(start..start + len - 1);
                start += len;
            }
            ClassData {
                size: order / centralizer_order(&cycle_type),
                cycle_type,
                representative,
            }
        })
        .collect())
}

/// Murnaghan–Nakayama evaluation with memoization over
/// `(shape, remaining cycle lengths)`.
#[derive(Default)]
pub struct CharacterCache {
    memo: HashMap<(Vec<usize>, Vec<usize>), i64>,
}

impl CharacterCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ_λ` at a permutation of the given cycle type.
    pub fn character(&mut self, shape: &Partition, cycle_type: &Partition) -> Result<i64> {
        if shape.n() != cycle_type.n() {
            return Err(Error::InvalidArgument(format!(
                "{shape} and {cycle_type} partition different integers"
            )));
        }
        Ok(self.eval(shape.parts().to_vec(), cycle_type.parts().to_vec()))
    }

    fn eval(&mut self, shape: Vec<usize>, cycles: Vec<usize>) -> i64 {
        if cycles.is_empty() {
            return 1;
        }
        let key = (shape, cycles);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (shape, cycles) = key;
        let r = cycles[0];
        let rest = cycles[1..].to_vec();
        // Beta numbers: removing a border strip of length r moves one bead
        // from b to b - r; the sign counts the beads jumped over.
        let k = shape.len();
        let betas: Vec<usize> = shape
            .iter()
            .enumerate()
            .map(|(i, &p)| p + k - 1 - i)
            .collect();
        let mut total = 0;
        for (i, &b) in betas.iter().enumerate() {
            if b < r || betas.contains(&(b - r)) {
                continue;
            }
            let jumped = betas.iter().filter(|&&x| x > b - r && x < b).count();
            let sign = if jumped % 2 == 0 { 1 } else { -1 };
            let mut next = betas.clone();
            next[i] = b - r;
            next.sort_unstable_by(|a, b| b.cmp(a));
            let parts: Vec<usize> = next
                .iter()
                .enumerate()
                .map(|(j, &x)| x - (k - 1 - j))
                .filter(|&p| p > 0)
                .collect();
            total += sign * self.eval(parts, rest.clone());
        }
        self.memo.insert((shape, cycles), total);
        total
    }
}

pub fn character(shape: &Partition, cycle_type: &Partition) -> Result<i64> {
    CharacterCache::new().character(shape, cycle_type)
}

/// Full character table: `values[i][c]` is `χ_{partitions[i]}` on `classes[c]`.
pub struct CharacterTable {
    pub partitions: Vec<Partition>,
    pub classes: Vec<ClassData>,
    pub values: Vec<Vec<i64>>,
}

pub fn character_table(n: usize) -> Result<CharacterTable> {
    let classes = conjugacy_classes(n)?;
    let partitions = partitions_of(n)?;
    let mut cache = CharacterCache::new();
    let mut values = Vec::with_capacity(partitions.len());
    for shape in &partitions {
        let row = classes
            .iter()
            .map(|c| cache.character(shape, &c.cycle_type))
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    Ok(CharacterTable {
        partitions,
        classes,
        values,
    })
}

/// `g(λ, μ, ν) = (1/n!) Σ_classes |C| χ_λ χ_μ χ_ν`, the multiplicity of `ρ_ν`
/// in `ρ_λ ⊗ ρ_μ`.
pub fn kronecker_coefficient(a: &Partition, b: &Partition, c: &Partition) -> Result<u64> {
    let n = a.n();
    if b.n() != n || c.n() != n {
        return Err(Error::InvalidArgument(
            "Kronecker coefficients need partitions of the same n".into(),
        ));
    }
    check_oracle_n(n, ORACLE_MAX_N)?;
    let mut cache = CharacterCache::new();
    let mut sum: i128 = 0;
    for class in conjugacy_classes(n)? {
        let ct = &class.cycle_type;
        sum += class.size as i128
            * (cache.character(a, ct)? * cache.character(b, ct)? * cache.character(c, ct)?) as i128;
    }
    let order = factorial(n) as i128;
    if sum % order != 0 || sum < 0 {
        return Err(Error::OracleInconsistency(format!(
            "class sum {sum} is not a non-negative multiple of {order}"
        )));
    }
    Ok((sum / order) as u64)
}

/// All `g(λ, μ, ν)` for `ν ⊢ n`, in [`partitions_of`] order.
pub fn kronecker_row(a: &Partition, b: &Partition) -> Result<Vec<(Partition, u64)>> {
    partitions_of(a.n())?
        .into_iter()
        .map(|c| kronecker_coefficient(a, b, &c).map(|g| (c, g)))
        .collect()
}

/// `ρ(τ_{w_1} ⋯ τ_{w_k})` as a dense matrix.
fn word_matrix(rep: &Representation, word: &[usize]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(rep.dim(), rep.dim());
    for &l in word.iter().rev() {
        m = rep.generators()[l - 1].mul_dense(&m);
    }
    m
}

fn round_multiplicity(raw: f64, shape: &Partition) -> Result<usize> {
    let rounded = raw.round();
    if (raw - rounded).abs() >= ROUNDING_GUARD || rounded < 0.0 {
        return Err(Error::OracleInconsistency(format!(
            "multiplicity of {shape} evaluates to {raw}, not a non-negative integer"
        )));
    }
    Ok(rounded as usize)
}

/// Multiplicity of every `ρ_λ` in `ρ` from the class-weighted inner product
/// of characters, with `tr ρ` evaluated on one word per class.
pub fn multiplicities_by_characters(rep: &Representation) -> Result<Vec<(Partition, usize)>> {
    check_oracle_n(rep.n(), TRACE_ORACLE_MAX_N)?;
    let table = character_table(rep.n())?;
    let order = factorial(rep.n()) as f64;
    let traces: Vec<f64> = table
        .classes
        .iter()
        .map(|c| word_matrix(rep, &c.representative).trace())
        .collect();
    table
        .partitions
        .iter()
        .zip(&table.values)
        .map(|(shape, chars)| {
            let raw: f64 = table
                .classes
                .iter()
                .zip(&traces)
                .zip(chars)
                .map(|((c, tr), &chi)| c.size as f64 * tr * chi as f64)
                .sum::<f64>()
                / order;
            round_multiplicity(raw, shape).map(|m| (shape.clone(), m))
        })
        .collect()
}

pub fn multiplicity_by_characters(rep: &Representation, shape: &Partition) -> Result<usize> {
    if shape.n() != rep.n() {
        return Err(Error::InvalidArgument(format!(
            "{shape} is not a partition of {}",
            rep.n()
        )));
    }
    multiplicities_by_characters(rep)?
        .into_iter()
        .find(|(p, _)| p == shape)
        .map(|(_, m)| m)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown partition {shape}")))
}

/// Cycle type of a permutation of `0..n` in one-line notation.
pub(crate) fn cycle_type(perm: &[usize]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = vec![];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(parts).expect("cycle lengths form a partition")
}

/// Adjacent-transposition word for a permutation, from bubble sort.
fn bubble_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut word = vec![];
    let n = p.len();
    for pass in 0..n {
        for i in 0..n - 1 - pass.min(n - 1) {
            if p[i] > p[i + 1] {
                p.swap(i, i + 1);
                word.push(i + 1);
            }
        }
    }
    // p ∘ s_1 ∘ … ∘ s_k = id, so p = s_k ∘ … ∘ s_1
    word.reverse();
    word
}

/// Multiplicities from a sum over all `n!` group elements.
pub fn brute_force_multiplicities(rep: &Representation) -> Result<BTreeMap<Partition, usize>> {
    check_oracle_n(rep.n(), BRUTE_FORCE_MAX_N)?;
    let n = rep.n();
    let table = character_table(n)?;
    let class_index: HashMap<&Partition, usize> = table
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (&c.cycle_type, i))
        .collect();
    let mut sums = vec![0.0f64; table.partitions.len()];
    for g in all_permutations(n) {
        let tr = word_matrix(rep, &bubble_word(&g)).trace();
        let c = class_index[&cycle_type(&g)];
        for (s, chars) in sums.iter_mut().zip(&table.values) {
            *s += tr * chars[c] as f64;
        }
    }
    let order = factorial(n) as f64;
    table
        .partitions
        .iter()
        .zip(sums)
        .map(|(shape, s)| round_multiplicity(s / order, shape).map(|m| (shape.clone(), m)))
        .collect()
}
