//! Partitions, standard Young tableaux and content vectors.
//!
//! Box coordinates are 1-based `(row, column)`. The content of a box is
//! `column - row`, and the content vector of a tableau lists the content of
//! the box holding each label `1..=n` in turn.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition {
                parts: vec![],
                reason: "a partition needs at least one part".into(),
            });
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition {
                parts: parts.iter().map(|&p| p as i64).collect(),
                reason: "parts must be positive".into(),
            });
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition {
                parts: parts.iter().map(|&p| p as i64).collect(),
                reason: "parts must be weakly decreasing".into(),
            });
        }
        Ok(Partition { parts })
    }

    /// The one-row partition `(n)`.
    pub fn row(n: usize) -> Result<Self> {
        Partition::new(vec![n])
    }

    /// The one-column partition `(1, ..., 1)`.
    pub fn column(n: usize) -> Result<Self> {
        Partition::new(vec![1; n])
    }

    /// The hook `(n - legs, 1, ..., 1)` with `legs` ones.
    pub fn hook(n: usize, legs: usize) -> Result<Self> {
        if legs >= n {
            return Err(Error::InvalidArgument(format!(
                "hook of {n} cannot have {legs} legs"
            )));
        }
        let mut parts = vec![n - legs];
        parts.extend(std::iter::repeat_n(1, legs));
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The transposed partition.
    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.parts[0])
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// Hook length of the box at 1-based `(row, col)`.
    pub fn hook_length(&self, row: usize, col: usize) -> usize {
        let arm = self.parts[row - 1] - col;
        let leg = self.parts[row..].iter().filter(|&&p| p >= col).count();
        arm + leg + 1
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n`, largest first part first.
pub fn partitions_of(n: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "partitions are only enumerated for n >= 1".into(),
        ));
    }
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Number of standard tableaux of shape `shape`, by the hook length formula.
pub fn tableau_count(shape: &Partition) -> usize {
    let mut hooks: Vec<u128> = Vec::with_capacity(shape.n());
    for (i, &len) in shape.parts().iter().enumerate() {
        for j in 1..=len {
            hooks.push(shape.hook_length(i + 1, j) as u128);
        }
    }
    let mut count: u128 = 1;
    for k in 1..=shape.n() as u128 {
        let mut factor = k;
        for h in hooks.iter_mut().filter(|h| **h > 1) {
            let g = gcd(factor, *h);
            factor /= g;
            *h /= g;
        }
        count *= factor;
    }
    debug_assert!(hooks.iter().all(|&h| h == 1));
    count as usize
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A standard Young tableau, stored as the box occupied by each label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    shape: Partition,
    /// `positions[k - 1]` is the 1-based `(row, col)` of label `k`.
    positions: Vec<(usize, usize)>,
}

impl StandardTableau {
    /// Builds a tableau from its rows of labels.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let shape = Partition::new(rows.iter().map(Vec::len).collect())?;
        let n = shape.n();
        let mut positions = vec![(0, 0); n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &label) in row.iter().enumerate() {
                if label == 0 || label > n || positions[label - 1] != (0, 0) {
                    return Err(Error::InvalidArgument(format!(
                        "labels must be exactly 1..={n}, found {label} twice or out of range"
                    )));
                }
                positions[label - 1] = (i + 1, j + 1);
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &label) in row.iter().enumerate() {
                let right_ok = row.get(j + 1).is_none_or(|&r| r > label);
                let below_ok = rows
                    .get(i + 1)
                    .and_then(|r| r.get(j))
                    .is_none_or(|&b| b > label);
                if !right_ok || !below_ok {
                    return Err(Error::InvalidArgument(format!(
                        "labels must increase along rows and columns (at box ({}, {}))",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(StandardTableau { shape, positions })
    }

    /// Builds a tableau from a chain of partitions `λ¹ ⊂ λ² ⊂ … ⊂ λⁿ` with
    /// `λʲ ⊢ j`, placing label `j` in the box added at step `j`.
    pub fn from_chain(chain: &[Partition]) -> Result<Self> {
        let mut positions = Vec::with_capacity(chain.len());
        let mut prev: Vec<usize> = vec![];
        for (j, lambda) in chain.iter().enumerate() {
            if lambda.n() != j + 1 {
                return Err(Error::InvalidArgument(format!(
                    "chain entry {} is {lambda}, which is not a partition of {}",
                    j + 1,
                    j + 1
                )));
            }
            let cur = lambda.parts();
            let grown: Vec<usize> = (0..cur.len())
                .filter(|&i| cur[i] != prev.get(i).copied().unwrap_or(0))
                .collect();
            let ok = grown.len() == 1
                && cur.len() >= prev.len()
                && cur[grown[0]] == prev.get(grown[0]).copied().unwrap_or(0) + 1;
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "chain entry {} does not add exactly one box",
                    j + 1
                )));
            }
            positions.push((grown[0] + 1, cur[grown[0]]));
            prev = cur.to_vec();
        }
        let shape = chain
            .last()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("empty chain".into()))?;
        Ok(StandardTableau { shape, positions })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// 1-based `(row, col)` of `label`.
    pub fn position(&self, label: usize) -> (usize, usize) {
        self.positions[label - 1]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows: Vec<Vec<usize>> = self.shape.parts().iter().map(|&l| vec![0; l]).collect();
        for (k, &(i, j)) in self.positions.iter().enumerate() {
            rows[i - 1][j - 1] = k + 1;
        }
        rows
    }
}

/// The diagonal index `column - row` of every label, in label order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ContentVector {
    entries: Vec<i64>,
}

impl ContentVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        is_valid_content(&entries).map_err(Error::ContentInvariant)?;
        Ok(ContentVector { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

impl TryFrom<Vec<i64>> for ContentVector {
    type Error = Error;

    fn try_from(entries: Vec<i64>) -> Result<Self> {
        ContentVector::new(entries)
    }
}

impl From<ContentVector> for Vec<i64> {
    fn from(c: ContentVector) -> Vec<i64> {
        c.entries
    }
}

/// Which defining condition of a content vector failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContentCondition {
    /// The vector is empty.
    Empty,
    /// `a₁ ≠ 0`.
    FirstEntryZero,
    /// Neither `a_k - 1` nor `a_k + 1` occurs before position `k`.
    NeighbourSeen,
    /// A repeated value `a` without both `a - 1` and `a + 1` in between.
    RepeatSeparated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentViolation {
    pub condition: ContentCondition,
    /// 1-based position at which the condition first fails.
    pub position: usize,
}

impl fmt::Display for ContentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            ContentCondition::Empty => "vector is empty",
            ContentCondition::FirstEntryZero => "first entry must be 0",
            ContentCondition::NeighbourSeen => "neither neighbour value occurs earlier",
            ContentCondition::RepeatSeparated => {
                "repeated value is not separated by both of its neighbours"
            }
        };
        write!(f, "{what} (position {})", self.position)
    }
}

/// Checks the three content-vector conditions, reporting the first failure.
pub fn is_valid_content(v: &[i64]) -> std::result::Result<(), ContentViolation> {
    let fail = |condition, position| {
        Err(ContentViolation {
            condition,
            position,
        })
    };
    if v.is_empty() {
        return fail(ContentCondition::Empty, 1);
    }
    if v[0] != 0 {
        return fail(ContentCondition::FirstEntryZero, 1);
    }
    for k in 1..v.len() {
        let a = v[k];
        if !v[..k].iter().any(|&b| b == a - 1 || b == a + 1) {
            return fail(ContentCondition::NeighbourSeen, k + 1);
        }
        if let Some(prev) = v[..k].iter().rposition(|&b| b == a) {
            let between = &v[prev + 1..k];
            if !(between.contains(&(a - 1)) && between.contains(&(a + 1))) {
                return fail(ContentCondition::RepeatSeparated, k + 1);
            }
        }
    }
    Ok(())
}

pub fn content_of(t: &StandardTableau) -> ContentVector {
    ContentVector {
        entries: t
            .positions
            .iter()
            .map(|&(i, j)| j as i64 - i as i64)
            .collect(),
    }
}

/// Inverse of [`content_of`]: fills boxes in the order their diagonals appear.
pub fn tableau_of(c: &ContentVector) -> Result<StandardTableau> {
    is_valid_content(c.entries()).map_err(Error::ContentInvariant)?;
    let mut seen: HashMap<i64, usize> = HashMap::new();
    let mut positions = Vec::with_capacity(c.n());
    for &p in c.entries() {
        let mu = seen.entry(p).or_insert(0);
        let m = *mu as i64;
        let pos = if p >= 0 {
            (m + 1, m + p + 1)
        } else {
            (m - p + 1, m + 1)
        };
        positions.push((pos.0 as usize, pos.1 as usize));
        *mu += 1;
    }
    let shape = partition_of_content(c)?;
    Ok(StandardTableau { shape, positions })
}

/// Shape of the tableau encoded by a content vector: the partition has
/// `1 - min c` parts; each non-positive content `k` occurring `μ` times
/// lengthens parts `1-k ..= μ-k`, each positive `k` lengthens parts `1 ..= μ`.
pub fn partition_of_content(c: &ContentVector) -> Result<Partition> {
    is_valid_content(c.entries()).map_err(Error::ContentInvariant)?;
    let entries = c.entries();
    let min = *entries.iter().min().expect("non-empty");
    let max = *entries.iter().max().expect("non-empty");
    let occurrences = |k: i64| entries.iter().filter(|&&x| x == k).count() as i64;
    let mut parts = vec![0usize; (1 - min) as usize];
    for k in (min..=0).rev() {
        let mu = occurrences(k);
        for idx in (1 - k)..=(mu - k) {
            parts[(idx - 1) as usize] += 1;
        }
    }
    for k in 1..=max {
        let mu = occurrences(k);
        for idx in 1..=mu {
            parts[(idx - 1) as usize] += 1;
        }
    }
    Partition::new(parts)
}

/// All standard tableaux of `shape`, ordered lexicographically by content
/// vector.
pub fn enumerate_tableaux(shape: &Partition) -> Vec<StandardTableau> {
    // Addable boxes have pairwise distinct contents, so visiting them in
    // increasing content order yields content vectors in lexicographic order.
    fn rec(
        shape: &Partition,
        filled: &mut Vec<usize>,
        positions: &mut Vec<(usize, usize)>,
        out: &mut Vec<StandardTableau>,
    ) {
        if positions.len() == shape.n() {
            out.push(StandardTableau {
                shape: shape.clone(),
                positions: positions.clone(),
            });
            return;
        }
        let target = shape.parts();
        for i in (0..target.len()).rev() {
            let addable = filled[i] < target[i] && (i == 0 || filled[i - 1] > filled[i]);
            if !addable {
                continue;
            }
            filled[i] += 1;
            positions.push((i + 1, filled[i]));
            rec(shape, filled, positions, out);
            positions.pop();
            filled[i] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(
        shape,
        &mut vec![0; shape.len()],
        &mut Vec::with_capacity(shape.n()),
        &mut out,
    );
    out
}
