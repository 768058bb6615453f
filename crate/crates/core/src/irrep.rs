//! Young's orthogonal form of the irreducible representations of Sₙ.

use std::collections::HashMap;

use crate::combinatorics::{
    content_of, enumerate_tableaux, ContentVector, Partition, StandardTableau,
};
use crate::operator::{Operator, SparseMatrix};

/// Generators `ρ_λ(τ_1), …, ρ_λ(τ_{n-1})` of the irreducible indexed by a
/// partition, in the basis of standard tableaux sorted by content vector.
#[derive(Clone, Debug)]
pub struct IrrepGenerators {
    pub partition: Partition,
    pub tableaux: Vec<StandardTableau>,
    pub generators: Vec<Operator>,
}

impl IrrepGenerators {
    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }
}

pub fn irrep_generators(shape: &Partition) -> IrrepGenerators {
    let n = shape.n();
    let tableaux = enumerate_tableaux(shape);
    let contents: Vec<Vec<i64>> = tableaux.iter().map(|t| content_of(t).into()).collect();
    let index: HashMap<&[i64], usize> = contents
        .iter()
        .enumerate()
        .map(|(k, c)| (c.as_slice(), k))
        .collect();
    let dim = tableaux.len();

    let generators = (1..n)
        .map(|l| {
            let mut triplets = Vec::with_capacity(2 * dim);
            for (j, t) in tableaux.iter().enumerate() {
                let (i1, j1) = t.position(l);
                let (i2, j2) = t.position(l + 1);
                if i1 == i2 {
                    triplets.push((j, j, 1.0));
                } else if j1 == j2 {
                    triplets.push((j, j, -1.0));
                } else {
                    // axial distance: content(ℓ+1) - content(ℓ)
                    let r = (j2 as i64 + i1 as i64 - i2 as i64 - j1 as i64) as f64;
                    let mut swapped = contents[j].clone();
                    swapped.swap(l - 1, l);
                    let k = index[swapped.as_slice()];
                    triplets.push((j, j, 1.0 / r));
                    triplets.push((k, j, (1.0 - 1.0 / (r * r)).sqrt()));
                }
            }
            Operator::Sparse(SparseMatrix::from_triplets(dim, triplets))
        })
        .collect();

    IrrepGenerators {
        partition: shape.clone(),
        tableaux,
        generators,
    }
}

/// Diagonals of `ρ_λ(X_1), …, ρ_λ(X_n)`: row `k` is the content vector of
/// the `k`-th tableau.
pub fn irrep_yjm_diagonals(shape: &Partition) -> Vec<ContentVector> {
    enumerate_tableaux(shape).iter().map(content_of).collect()
}
