//! Timing runs over families of tensor products.

use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;

use super::expr::RepSpecExpression;
use crate::combinatorics::Partition;
use crate::decompose::{block_diagonalize, multiplicities};
use crate::error::Result;

pub const CSV_HEADER: &str = "family,n,k,d,seconds,residual";
/// Default dimension cap for a bench row.
pub const DEFAULT_BENCH_CAP: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchFamily {
    /// `ρ_{(2,1,…,1)}^{⊗k}`
    Hook,
    /// `ρ_{(2,2,1,…,1)}^{⊗k}`
    NearHook,
    /// `ρˢ(n)^{⊗k}`
    Perm,
    /// `ρ_{(n−1,1)} ⊗ ρ_{(2,1,…,1)}`; `k` is fixed at 2.
    HookPair,
    /// `ρ_{(n−2,1,1)} ⊗ ρ_{(2,2,1,…,1)}`; `k` is fixed at 2.
    NearHookPair,
}

impl BenchFamily {
    pub fn name(self) -> &'static str {
        match self {
            BenchFamily::Hook => "hook",
            BenchFamily::NearHook => "near-hook",
            BenchFamily::Perm => "perm",
            BenchFamily::HookPair => "hook-pair",
            BenchFamily::NearHookPair => "near-hook-pair",
        }
    }

    pub fn is_pair(self) -> bool {
        matches!(self, BenchFamily::HookPair | BenchFamily::NearHookPair)
    }

    /// The representation for `(n, k)`, or `None` where the family is
    /// undefined.
    pub fn expression(self, n: usize, k: usize) -> Option<RepSpecExpression> {
        let shape = |head: &[usize]| {
            let used: usize = head.iter().sum();
            (used <= n).then(|| {
                let mut parts = head.to_vec();
                parts.extend(std::iter::repeat_n(1, n - used));
                RepSpecExpression::Irrep(Partition::new(parts).expect("weakly decreasing"))
            })
        };
        let power = |e: RepSpecExpression| {
            if k == 1 {
                e
            } else {
                RepSpecExpression::Power(Box::new(e), k)
            }
        };
        if k == 0 {
            return None;
        }
        match self {
            BenchFamily::Hook if n >= 3 => shape(&[2]).map(power),
            BenchFamily::NearHook if n >= 4 => shape(&[2, 2]).map(power),
            BenchFamily::Perm if n >= 2 => Some(power(RepSpecExpression::Perm(n))),
            BenchFamily::HookPair if n >= 3 => Some(RepSpecExpression::Tensor(vec![
                shape(&[n - 1])?,
                shape(&[2])?,
            ])),
            BenchFamily::NearHookPair if n >= 4 => Some(RepSpecExpression::Tensor(vec![
                shape(&[n - 2])?,
                shape(&[2, 2])?,
            ])),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub family: BenchFamily,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub seconds: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: BenchFamily,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub cap: usize,
    pub repeats: usize,
    /// Time the full block diagonalization instead of multiplicities only.
    pub full: bool,
}

/// Runs every `(n, k)` in the grid. Returns measured rows and a notice for
/// each skipped combination.
pub fn run_bench(config: &BenchConfig) -> Result<(Vec<BenchRow>, Vec<String>)> {
    let mut rows = vec![];
    let mut notices = vec![];
    let ks: &[usize] = if config.family.is_pair() {
        &[2]
    } else {
        &config.ks
    };
    for &n in &config.ns {
        for &k in ks {
            let Some(expr) = config.family.expression(n, k) else {
                notices.push(format!(
                    "{} undefined for n={n} k={k}",
                    config.family.name()
                ));
                continue;
            };
            let (_, d) = expr.shape()?;
            if d > config.cap {
                notices.push(format!(
                    "skipping {} n={n} k={k}: d={d} exceeds cap {}",
                    config.family.name(),
                    config.cap
                ));
                continue;
            }
            let rep = expr.build(false)?;
            let mut best = f64::INFINITY;
            let mut residual = 0.0;
            for _ in 0..config.repeats.max(1) {
                let start = Instant::now();
                let result = if config.full {
                    block_diagonalize(&rep)?
                } else {
                    multiplicities(&rep)?
                };
                best = best.min(start.elapsed().as_secs_f64());
                residual = result.residual;
            }
            rows.push(BenchRow {
                family: config.family,
                n,
                k,
                d,
                seconds: best,
                residual,
            });
        }
    }
    Ok((rows, notices))
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:e},{:e}",
            r.family.name(),
            r.n,
            r.k,
            r.d,
            r.seconds,
            r.residual
        )
        .unwrap();
    }
    out
}

/// A self-contained gnuplot script plotting time against dimension on
/// log-log axes.
pub fn to_gnuplot(rows: &[BenchRow]) -> String {
    let mut out = String::from("$data << EOD\n# d seconds n k\n");
    for r in rows {
        writeln!(out, "{} {:e} {} {}", r.d, r.seconds, r.n, r.k).unwrap();
    }
    out.push_str(
        "EOD\nset logscale xy\nset xlabel \"dimension\"\nset ylabel \"seconds\"\n\
         plot $data using 1:2 with linespoints title \"wall time\"\n",
    );
    out
}

/// Least-squares slope of `log t` against `log d`. `None` with fewer than
/// two distinct dimensions.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(d, t)| *d > 0 && *t > 0.0)
        .map(|&(d, t)| ((d as f64).ln(), t.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

/// Parses `5`, `5..8` (inclusive) or `5,6,8`.
pub fn parse_range(text: &str) -> std::result::Result<Vec<usize>, String> {
    let bad = || format!("`{text}` is not N, A..B or a comma-separated list");
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::tableau_count;

    #[test]
    fn family_dimensions() {
        let d = |f: BenchFamily, n, k| f.expression(n, k).unwrap().shape().unwrap().1;
        for n in 3..=9 {
            assert_eq!(d(BenchFamily::Hook, n, 1), n - 1);
            assert_eq!(d(BenchFamily::Hook, n, 3), (n - 1).pow(3));
            assert_eq!(d(BenchFamily::HookPair, n, 2), (n - 1) * (n - 1));
            assert_eq!(d(BenchFamily::Perm, n, 2), n * n);
        }
        for n in 5..=9 {
            // (n-2,1,1) has dimension C(n-1, 2)
            let mut parts = vec![2, 2];
            parts.extend(std::iter::repeat_n(1, n - 4));
            let near = tableau_count(&Partition::new(parts).unwrap());
            assert_eq!(d(BenchFamily::NearHook, n, 1), near);
            assert_eq!(
                d(BenchFamily::NearHookPair, n, 2),
                (n - 1) * (n - 2) / 2 * near
            );
        }
        assert!(BenchFamily::NearHook.expression(3, 2).is_none());
        assert!(BenchFamily::Hook.expression(5, 0).is_none());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(usize, f64)> = [10usize, 20, 40, 80]
            .iter()
            .map(|&d| (d, 1e-9 * (d as f64).powi(3)))
            .collect();
        assert!((loglog_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert!(loglog_slope(&[(10, 1.0)]).is_none());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5..7").unwrap(), vec![5, 6, 7]);
        assert_eq!(parse_range("4").unwrap(), vec![4]);
        assert_eq!(parse_range("3, 5").unwrap(), vec![3, 5]);
        assert!(parse_range("7..5").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn small_bench_runs() {
        let config = BenchConfig {
            family: BenchFamily::Hook,
            ns: vec![4, 5],
            ks: vec![1, 2, 9],
            cap: 100,
            repeats: 1,
            full: false,
        };
        let (rows, notices) = run_bench(&config).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(notices.len(), 2);
        let csv = to_csv(&rows);
        assert!(csv.starts_with("family,n,k,d,seconds,residual\nhook,4,1,3,"));
        assert_eq!(csv.lines().count(), 5);
        assert!(to_gnuplot(&rows).contains("set logscale xy"));
    }
}
