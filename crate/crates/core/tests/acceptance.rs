//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single PASS/FAIL line. A process-wide lock serializes the
//! criteria so the timing check is not disturbed by the others.

use std::sync::Mutex;
use std::time::Instant;

use nalgebra::DMatrix;
use symdecomp::combinatorics::{
    content_of, enumerate_tableaux, is_valid_content, partition_of_content, partitions_of,
    tableau_count, tableau_of, ContentVector, Partition,
};
use symdecomp::decompose::{
    block_diagonalize, block_residual, joint_spectrum, multiplicities, split_isotypic,
    split_isotypic_with, SplitStrategy,
};
use symdecomp::eigen::DEFAULT_RANK_TOL;
use symdecomp::operator::orthogonality_defect;
use symdecomp::oracle::kronecker_coefficient;
use symdecomp::repbuild::{
    direct_sum, direct_sum_all, irrep_representation, permutation_representation,
    regular_representation, tensor_power, tensor_product, yjm_matrices, Representation,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn report(criterion: usize, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {criterion} PASS: {title}");
    } else {
        println!("criterion {criterion} FAIL: {title}");
        for f in failures {
            println!("    {f}");
        }
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed: {failures:?}"
    );
}

fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn irrep(parts: &[usize]) -> Representation {
    irrep_representation(&p(parts)).unwrap()
}

/// Deterministic pseudo-random orthogonal matrix.
fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let m = DMatrix::from_fn(d, d, |_, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    m.qr().q()
}

fn fixtures() -> Vec<(String, Representation)> {
    let mut out = vec![];
    for n in 2..=8 {
        out.push((format!("perm({n})"), permutation_representation(n).unwrap()));
    }
    for n in 2..=4 {
        out.push((
            format!("regular({n})"),
            regular_representation(n, false).unwrap(),
        ));
    }
    for parts in [&[3, 1][..], &[2, 2], &[3, 2, 1], &[4, 2, 1], &[2, 2, 1, 1]] {
        out.push((format!("irrep{parts:?}"), irrep(parts)));
    }
    out.push((
        "dsum(irrep(3,1),irrep(3,1),irrep(4))".into(),
        direct_sum_all(&[irrep(&[3, 1]), irrep(&[3, 1]), irrep(&[4])]).unwrap(),
    ));
    out.push((
        "dsum(irrep(2,2),perm(4))".into(),
        direct_sum(&irrep(&[2, 2]), &permutation_representation(4).unwrap()).unwrap(),
    ));
    out.push((
        "tensor(irrep(2,1),irrep(2,1))".into(),
        tensor_product(&irrep(&[2, 1]), &irrep(&[2, 1])).unwrap(),
    ));
    out.push((
        "tensor(irrep(3,2,1),irrep(2,2,2))".into(),
        tensor_product(&irrep(&[3, 2, 1]), &irrep(&[2, 2, 2])).unwrap(),
    ));
    out.push((
        "power(perm(5),2)".into(),
        tensor_power(&permutation_representation(5).unwrap(), 2).unwrap(),
    ));
    out.push((
        "conjugated regular(3)".into(),
        regular_representation(3, false)
            .unwrap()
            .conjugated(&random_orthogonal(6, 7)),
    ));
    out
}

#[test]
fn criterion_1_permutation_s4() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    let start = Instant::now();
    let rep = permutation_representation(4).unwrap();
    let result = multiplicities(&rep).unwrap();
    let (_, spec) = joint_spectrum(&rep).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let comps: Vec<(Partition, usize)> = result
        .components
        .iter()
        .map(|c| (c.partition.clone(), c.multiplicity))
        .collect();
    if comps != vec![(p(&[3, 1]), 1), (p(&[4]), 1)] {
        failures.push(format!("multiplicities {comps:?}"));
    }
    let expected = vec![
        vec![0, -1, 1, 2],
        vec![0, 1, -1, 2],
        vec![0, 1, 2, -1],
        vec![0, 1, 2, 3],
    ];
    if spec.to_vecs() != expected {
        failures.push(format!("spectrum {:?}", spec.to_vecs()));
    }
    if elapsed >= 1.0 {
        failures.push(format!("took {elapsed:.3} s"));
    }
    report(
        1,
        "S4 permutation multiplicities and joint spectrum",
        &failures,
    );
}

#[test]
fn criterion_2_yjm_fixtures() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let yjm = yjm_matrices(&permutation_representation(4).unwrap()).unwrap();
    #[rustfmt::skip]
    let expected = [
        (2, [0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.]),
        (3, [1., 0., 1., 0., 0., 1., 1., 0., 1., 1., 0., 0., 0., 0., 0., 2.]),
        (4, [2., 0., 0., 1., 0., 2., 0., 1., 0., 0., 2., 1., 1., 1., 1., 0.]),
    ];
    let mut failures = vec![];
    for (j, entries) in expected {
        let want = DMatrix::from_row_slice(4, 4, &entries);
        if yjm.get(j) != &want {
            failures.push(format!("X_{j} = {}", yjm.get(j)));
        }
    }
    if yjm.get(1) != &DMatrix::zeros(4, 4) {
        failures.push("X_1 is not zero".into());
    }
    report(
        2,
        "YJM matrices of the S4 permutation representation",
        &failures,
    );
}

#[test]
fn criterion_3_block_diagonalization_residuals() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    for (name, rep) in fixtures() {
        let d = rep.dim();
        match block_diagonalize(&rep) {
            Ok(r) => {
                let q = r.q.as_ref().unwrap();
                let orth = orthogonality_defect(q);
                let res = block_residual(&rep, q, &r.components).unwrap();
                if orth > 1e-10 {
                    failures.push(format!("{name}: orthogonality {orth:e}"));
                }
                if res > 1e-8 * d as f64 {
                    failures.push(format!("{name}: block residual {res:e}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }

    // a hand-built orthogonal Q for perm(4)
    let rep = permutation_representation(4).unwrap();
    let (s2, s6, s12) = (2f64.sqrt(), 6f64.sqrt(), 12f64.sqrt());
    #[rustfmt::skip]
    let witness = DMatrix::from_row_slice(4, 4, &[
        1.0 / s2, 1.0 / s6, 1.0 / s12, -0.5,
        -1.0 / s2, 1.0 / s6, 1.0 / s12, -0.5,
        0.0, -(2.0f64 / 3.0).sqrt(), 1.0 / s12, -0.5,
        0.0, 0.0, -(3f64.sqrt()) / 2.0, -0.5,
    ]);
    let comps = multiplicities(&rep).unwrap().components;
    let orth = orthogonality_defect(&witness);
    let res = block_residual(&rep, &witness, &comps).unwrap();
    if orth > 1e-10 || res > 1e-8 * 4.0 {
        failures.push(format!(
            "witness Q: orthogonality {orth:e}, residual {res:e}"
        ));
    }
    report(
        3,
        "block diagonalization residuals on all fixtures",
        &failures,
    );
}

#[test]
fn criterion_4_oracle_equivalence_sweep() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    let mut pairs = 0;
    for n in 3..=6 {
        let shapes = partitions_of(n).unwrap();
        let reps: Vec<Representation> = shapes
            .iter()
            .map(|s| irrep_representation(s).unwrap())
            .collect();
        for (a, ra) in shapes.iter().zip(&reps) {
            for (b, rb) in shapes.iter().zip(&reps) {
                pairs += 1;
                let rep = tensor_product(ra, rb).unwrap();
                let result = match multiplicities(&rep) {
                    Ok(r) => r,
                    Err(e) => {
                        failures.push(format!("{a} x {b}: {e}"));
                        continue;
                    }
                };
                for c in &shapes {
                    let g = kronecker_coefficient(a, b, c).unwrap();
                    let found = result.multiplicity(c) as u64;
                    if g != found {
                        failures.push(format!("{a} x {b} -> {c}: pipeline {found}, oracle {g}"));
                    }
                }
            }
        }
    }
    println!("    {pairs} tensor-product pairs checked");
    report(
        4,
        "pipeline multiplicities equal Kronecker coefficients, n = 3..6",
        &failures,
    );
}

#[test]
fn criterion_5_regular_representation() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    for n in 3..=4 {
        let rep = regular_representation(n, false).unwrap();
        let order: usize = (1..=n).product();
        let r = match block_diagonalize(&rep) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("regular({n}): {e}"));
                continue;
            }
        };
        for shape in partitions_of(n).unwrap() {
            let a = r.multiplicity(&shape);
            if a != tableau_count(&shape) {
                failures.push(format!("regular({n}): a_{shape} = {a}"));
            }
        }
        if r.dim() != order {
            failures.push(format!("regular({n}): sum a d = {}", r.dim()));
        }
        if r.residual > 1e-8 * order as f64 {
            failures.push(format!("regular({n}): residual {:e}", r.residual));
        }
    }
    report(5, "regular representations of S3 and S4", &failures);
}

#[test]
fn criterion_6_null_space_dimension() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    for shape in [p(&[2, 1]), p(&[3, 1]), p(&[2, 2])] {
        let irr = irrep_representation(&shape).unwrap();
        for a in 1..=3 {
            // stacked equations over all entries, on ρ_λ^{⊕a} as given
            let copies = direct_sum_all(&vec![irr.clone(); a]).unwrap();
            match split_isotypic_with(&copies, &shape, a, SplitStrategy::Dense, DEFAULT_RANK_TOL) {
                Ok(split) => {
                    let orth = orthogonality_defect(&split.assembled());
                    if split.u.ncols() != a || orth > 1e-10 {
                        failures.push(format!(
                            "{shape}^{a} dense: {} columns, orthogonality {orth:e}",
                            split.u.ncols()
                        ));
                    }
                }
                Err(e) => failures.push(format!("{shape}^{a} dense: {e}")),
            }
            // restricted equations, on the canonical form of a scrambled copy
            let scrambled = copies.conjugated(&random_orthogonal(copies.dim(), a as u64));
            let q_tilde = multiplicities(&scrambled).unwrap().q.unwrap();
            let canonical = scrambled.conjugated(&q_tilde);
            match split_isotypic(&canonical, &shape, a) {
                Ok(split) => {
                    let orth = orthogonality_defect(&split.assembled());
                    if split.u.ncols() != a || orth > 1e-10 {
                        failures.push(format!(
                            "{shape}^{a} restricted: {} columns, orthogonality {orth:e}",
                            split.u.ncols()
                        ));
                    }
                }
                Err(e) => failures.push(format!("{shape}^{a} restricted: {e}")),
            }
        }
    }
    report(6, "intertwiner null space has dimension a", &failures);
}

#[test]
fn criterion_7_property_suites() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    for (name, rep) in fixtures() {
        let d = rep.dim();
        let yjm = match yjm_matrices(&rep) {
            Ok(y) => y,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let comm = yjm.max_commutator();
        if comm > 1e-10 * d as f64 {
            failures.push(format!("{name}: commutator {comm:e}"));
        }
        let (q, spec) = joint_spectrum(&rep).unwrap();
        for j in 1..=rep.n() {
            let diag = (q.transpose() * yjm.get(j) * &q).diagonal();
            let bound = j as f64 - 1.0;
            for (raw, row) in diag.iter().zip(spec.rows()) {
                let claimed = row.entries()[j - 1] as f64;
                if (raw - claimed).abs() >= 0.25 || claimed.abs() > bound {
                    failures.push(format!("{name}: X_{j} eigenvalue {raw} vs {claimed}"));
                }
            }
        }
        for row in spec.rows() {
            if let Err(v) = is_valid_content(row.entries()) {
                failures.push(format!("{name}: row {:?}: {v}", row.entries()));
            }
        }
        let mut counts: Vec<(Partition, usize)> = vec![];
        for row in spec.rows() {
            let shape = partition_of_content(row).unwrap();
            match counts.iter_mut().find(|(s, _)| *s == shape) {
                Some(entry) => entry.1 += 1,
                None => counts.push((shape, 1)),
            }
        }
        for (shape, count) in &counts {
            if count % tableau_count(shape) != 0 {
                failures.push(format!("{name}: {shape} occurs {count} times"));
            }
        }
        let r = multiplicities(&rep).unwrap();
        if r.dim() != d {
            failures.push(format!("{name}: sum a d = {} != {d}", r.dim()));
        }
    }
    report(7, "YJM and spectrum properties on all fixtures", &failures);
}

#[test]
fn criterion_8_combinatorial_identities() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut failures = vec![];
    for n in 1..=8 {
        let sum: usize = partitions_of(n)
            .unwrap()
            .iter()
            .map(|s| tableau_count(s).pow(2))
            .sum();
        let order: usize = (1..=n).product();
        if sum != order {
            failures.push(format!("n={n}: sum of squares {sum} != {order}"));
        }
    }
    for n in 1..=7 {
        for shape in partitions_of(n).unwrap() {
            for t in enumerate_tableaux(&shape) {
                let c = content_of(&t);
                if tableau_of(&c).ok().as_ref() != Some(&t) {
                    failures.push(format!(
                        "{shape}: tableau {:?} does not round-trip",
                        t.rows()
                    ));
                }
                if partition_of_content(&c).ok().as_ref() != Some(&shape) {
                    failures.push(format!(
                        "{shape}: content {:?} gives wrong shape",
                        c.entries()
                    ));
                }
            }
        }
    }
    let c = ContentVector::new(vec![0, 1, -1, -2, 0, 2, -3]).unwrap();
    if partition_of_content(&c).unwrap() != p(&[3, 2, 1, 1]) {
        failures.push("worked content example gives the wrong partition".into());
    }
    report(8, "combinatorial identities", &failures);
}

#[test]
fn criterion_9_complexity_slope() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let hook = |n: usize| {
        let mut parts = vec![2];
        parts.extend(std::iter::repeat_n(1, n - 2));
        irrep_representation(&Partition::new(parts).unwrap()).unwrap()
    };
    let grid = [
        (5, 2),
        (6, 2),
        (7, 2),
        (5, 3),
        (6, 3),
        (7, 3),
        (5, 4),
        (6, 4),
    ];
    let mut points = vec![];
    for (n, k) in grid {
        let rep = tensor_power(&hook(n), k).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            multiplicities(&rep).unwrap();
            best = best.min(start.elapsed().as_secs_f64());
        }
        println!("    n={n} k={k} d={} seconds={best:.3e}", rep.dim());
        points.push(((rep.dim() as f64).ln(), best.ln()));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("    log-log slope {slope:.3}");
    let mut failures = vec![];
    if slope > 3.5 {
        failures.push(format!("slope {slope:.3} exceeds 3.5"));
    }
    report(9, "hook tensor power timing slope", &failures);
}
