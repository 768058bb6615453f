//! Textual representation constructors such as
//! `tensor(irrep(3,2,1),power(perm(6),2))`.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use serde::Deserialize;

use crate::combinatorics::{tableau_count, Partition};
use crate::error::{Error, Result};
use crate::repbuild::{
    direct_sum_all, irrep_representation, permutation_representation, regular_representation,
    representation_from_file, tensor_power, tensor_product_all, Representation,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepSpecExpression {
    Perm(usize),
    Regular(usize),
    Irrep(Partition),
    File(PathBuf),
    Tensor(Vec<RepSpecExpression>),
    DirectSum(Vec<RepSpecExpression>),
    Power(Box<RepSpecExpression>, usize),
}

impl RepSpecExpression {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { src: text, pos: 0 };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        expr.shape()?;
        Ok(expr)
    }

    /// `(n, d)` without building any matrices. Reads the header of `file`
    /// leaves.
    pub fn shape(&self) -> Result<(usize, usize)> {
        let children = |items: &[RepSpecExpression], combine: fn(usize, usize) -> usize| {
            let mut shapes = items.iter().map(|e| e.shape());
            let (n, mut d) = shapes.next().expect("parser rejects empty lists")?;
            for s in shapes {
                let (m, e) = s?;
                if m != n {
                    return Err(Error::Parse(format!(
                        "`{self}` mixes representations of S{n} and S{m}"
                    )));
                }
                d = combine(d, e);
            }
            Ok((n, d))
        };
        match self {
            RepSpecExpression::Perm(n) => Ok((*n, *n)),
            RepSpecExpression::Regular(n) => Ok((*n, (1..=*n).product())),
            RepSpecExpression::Irrep(p) => Ok((p.n(), tableau_count(p))),
            RepSpecExpression::File(path) => {
                #[derive(Deserialize)]
                struct Header {
                    n: usize,
                    d: usize,
                }
                let text = fs::read_to_string(path)?;
                let h: Header = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Ok((h.n, h.d))
            }
            RepSpecExpression::Tensor(items) => children(items, |a, b| a.saturating_mul(b)),
            RepSpecExpression::DirectSum(items) => children(items, |a, b| a + b),
            RepSpecExpression::Power(e, k) => {
                let (n, d) = e.shape()?;
                Ok((n, d.saturating_pow(*k as u32)))
            }
        }
    }

    /// Materializes the representation. `regular(n)` beyond the built-in
    /// cap needs `allow_large`.
    pub fn build(&self, allow_large: bool) -> Result<Representation> {
        match self {
            RepSpecExpression::Perm(n) => permutation_representation(*n),
            RepSpecExpression::Regular(n) => regular_representation(*n, allow_large),
            RepSpecExpression::Irrep(p) => irrep_representation(p),
            RepSpecExpression::File(path) => representation_from_file(path),
            RepSpecExpression::Tensor(items) => tensor_product_all(
                &items
                    .iter()
                    .map(|e| e.build(allow_large))
                    .collect::<Result<Vec<_>>>()?,
            ),
            RepSpecExpression::DirectSum(items) => direct_sum_all(
                &items
                    .iter()
                    .map(|e| e.build(allow_large))
                    .collect::<Result<Vec<_>>>()?,
            ),
            RepSpecExpression::Power(e, k) => tensor_power(&e.build(allow_large)?, *k),
        }
    }

    /// Fails with a dimension guard error if `d` exceeds `cap`.
    pub fn check_dimension(&self, cap: usize) -> Result<(usize, usize)> {
        let (n, d) = self.shape()?;
        if d > cap {
            return Err(Error::DimensionGuard {
                what: self.to_string(),
                dimension: d,
                cap,
            });
        }
        Ok((n, d))
    }
}

fn join(items: &[RepSpecExpression]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for RepSpecExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepSpecExpression::Perm(n) => write!(f, "perm({n})"),
            RepSpecExpression::Regular(n) => write!(f, "regular({n})"),
            RepSpecExpression::Irrep(p) => {
                let parts: Vec<String> = p.parts().iter().map(ToString::to_string).collect();
                write!(f, "irrep({})", parts.join(","))
            }
            RepSpecExpression::File(path) => write!(f, "file(\"{}\")", path.display()),
            RepSpecExpression::Tensor(items) => write!(f, "tensor({})", join(items)),
            RepSpecExpression::DirectSum(items) => write!(f, "dsum({})", join(items)),
            RepSpecExpression::Power(e, k) => write!(f, "power({e},{k})"),
        }
    }
}

/// Parses `"3,2,1"` (surrounding parentheses and spaces allowed).
pub fn parse_partition(text: &str) -> Result<Partition> {
    let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts = trimmed
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{text}` is not a comma-separated partition")))
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a constructor name"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.src[start..self.pos])
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected an integer"));
        }
        let start = self.pos;
        self.pos += len;
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    fn integer_list(&mut self) -> Result<Vec<usize>> {
        let mut out = vec![self.integer()?];
        while self.peek() == Some(',') {
            self.eat(',')?;
            out.push(self.integer()?);
        }
        Ok(out)
    }

    fn path(&mut self) -> Result<PathBuf> {
        self.skip_ws();
        if self.rest().starts_with('"') {
            let body = &self.rest()[1..];
            let end = body
                .find('"')
                .ok_or_else(|| self.error("unterminated string"))?;
            let path = PathBuf::from(&body[..end]);
            self.pos += end + 2;
            return Ok(path);
        }
        let end = self
            .rest()
            .find(')')
            .ok_or_else(|| self.error("expected `)`"))?;
        let raw = self.rest()[..end].trim();
        if raw.is_empty() {
            return Err(self.error("empty file path"));
        }
        let path = PathBuf::from(raw);
        self.pos += end;
        Ok(path)
    }

    fn expr_list(&mut self) -> Result<Vec<RepSpecExpression>> {
        let mut out = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.eat(',')?;
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<RepSpecExpression> {
        let start = self.pos;
        let name = self.ident()?.to_ascii_lowercase();
        self.eat('(')?;
        let expr = match name.as_str() {
            "perm" => RepSpecExpression::Perm(self.integer()?),
            "regular" => RepSpecExpression::Regular(self.integer()?),
            "irrep" => RepSpecExpression::Irrep(Partition::new(self.integer_list()?)?),
            "file" => RepSpecExpression::File(self.path()?),
            "tensor" => RepSpecExpression::Tensor(self.expr_list()?),
            "dsum" => RepSpecExpression::DirectSum(self.expr_list()?),
            "power" => {
                let base = self.expr()?;
                self.eat(',')?;
                let k = self.integer()?;
                if k == 0 {
                    return Err(self.error("power needs k >= 1"));
                }
                RepSpecExpression::Power(Box::new(base), k)
            }
            other => {
                self.pos = start;
                return Err(self.error(&format!("unknown constructor `{other}`")));
            }
        };
        self.eat(')')?;
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repbuild::{permutation_representation, write_representation};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn parses_nested_expressions() {
        let e = RepSpecExpression::parse(" tensor( irrep(3,2,1), power(perm(6), 2) ) ").unwrap();
        assert_eq!(
            e,
            RepSpecExpression::Tensor(vec![
                RepSpecExpression::Irrep(p(&[3, 2, 1])),
                RepSpecExpression::Power(Box::new(RepSpecExpression::Perm(6)), 2),
            ])
        );
        assert_eq!(e.shape().unwrap(), (6, 16 * 36));
        assert_eq!(e.to_string(), "tensor(irrep(3,2,1),power(perm(6),2))");
        assert_eq!(RepSpecExpression::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn shapes() {
        let cases = [
            ("perm(4)", (4, 4)),
            ("regular(3)", (3, 6)),
            ("dsum(irrep(4),irrep(4))", (4, 2)),
            ("power(irrep(2,1,1,1),3)", (5, 64)),
        ];
        for (text, shape) in cases {
            assert_eq!(
                RepSpecExpression::parse(text).unwrap().shape().unwrap(),
                shape
            );
        }
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "perm(4",
            "perm(4))",
            "perms(4)",
            "irrep(1,3)",
            "irrep()",
            "tensor()",
            "power(perm(3),0)",
            "tensor(perm(3),perm(4))",
            "dsum(irrep(2,1),irrep(4))",
            "",
        ] {
            assert!(
                matches!(
                    RepSpecExpression::parse(bad),
                    Err(Error::Parse(_) | Error::InvalidPartition { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn builds_match_shapes() {
        for text in [
            "perm(4)",
            "regular(3)",
            "tensor(irrep(2,1),irrep(2,1))",
            "dsum(perm(3),irrep(1,1,1))",
        ] {
            let e = RepSpecExpression::parse(text).unwrap();
            let rep = e.build(false).unwrap();
            assert_eq!((rep.n(), rep.dim()), e.shape().unwrap());
        }
    }

    #[test]
    fn file_leaves_and_guard() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("perm 4.json");
        write_representation(&path, &permutation_representation(4).unwrap()).unwrap();
        let text = format!("tensor(file(\"{}\"),irrep(3,1))", path.display());
        let e = RepSpecExpression::parse(&text).unwrap();
        assert_eq!(e.shape().unwrap(), (4, 12));
        assert_eq!(e.build(false).unwrap().dim(), 12);
        assert!(matches!(
            e.check_dimension(10),
            Err(Error::DimensionGuard {
                dimension: 12,
                cap: 10,
                ..
            })
        ));
        assert!(RepSpecExpression::parse("file(/nonexistent/x.json)").is_err());
    }

    #[test]
    fn partition_arguments() {
        assert_eq!(parse_partition("3,2,1").unwrap(), p(&[3, 2, 1]));
        assert_eq!(parse_partition(" (4) ").unwrap(), p(&[4]));
        assert!(parse_partition("3;2").is_err());
        assert!(parse_partition("1,2").is_err());
    }
}
