use std::collections::HashMap;

use serde_json::{json, Value};

use crate::symexpr::{Expr, Rational};

/// Square matrix of expressions, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExprMatrix {
    n: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn zeros(n: usize) -> Self {
        ExprMatrix {
            n,
            data: vec![Expr::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        ExprMatrix::from_fn(n, |r, c| if r == c { Expr::one() } else { Expr::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        ExprMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Expr) {
        self.data[r * self.n + c] = e;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    pub fn transpose(&self) -> ExprMatrix {
        ExprMatrix::from_fn(self.n, |r, c| self.get(c, r).clone())
    }

    pub fn trace(&self) -> Expr {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        ExprMatrix::from_fn(self.n, |r, c| {
            (0..self.n)
                .filter(|&k| !self.get(r, k).is_zero() && !other.get(k, c).is_zero())
                .map(|k| self.get(r, k) * other.get(k, c))
                .sum()
        })
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Vec<Expr> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * &v[c]).sum())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> ExprMatrix {
        ExprMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&Expr) -> Result<Expr, E>) -> Result<ExprMatrix, E> {
        Ok(ExprMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// The `size × size` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> ExprMatrix {
        ExprMatrix::from_fn(size, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Expr)> + '_ {
        self.data.iter().enumerate().map(move |(i, e)| (i / self.n, i % self.n, e))
    }

    /// Determinant by Laplace expansion along rows, memoized on the set of
    /// remaining columns.
    pub fn determinant(&self) -> Expr {
        assert!(self.n <= 24, "Laplace expansion is only meant for small matrices");
        let mut memo = HashMap::new();
        self.minor(0, (1u32 << self.n) - 1, &mut memo)
    }

    fn minor(&self, row: usize, cols: u32, memo: &mut HashMap<u32, Expr>) -> Expr {
        if row == self.n {
            return Expr::one();
        }
        if let Some(e) = memo.get(&cols) {
            return e.clone();
        }
        let mut terms = Vec::new();
        let mut sign = 1;
        for c in 0..self.n {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = self.get(row, c);
            if !a.is_zero() {
                let sub = self.minor(row + 1, cols & !(1 << c), memo);
                if !sub.is_zero() {
                    let t = a * &sub;
                    terms.push(if sign > 0 { t } else { -t });
                }
            }
            sign = -sign;
        }
        let e: Expr = terms.into_iter().sum();
        memo.insert(cols, e.clone());
        e
    }

    /// Sparse JSON list `{i, j, expr}` with 1-based indices.
    pub fn to_json(&self, names: Option<&[String]>) -> Value {
        let items: Vec<Value> = self
            .entries()
            .filter(|(_, _, e)| !e.is_zero())
            .map(|(r, c, e)| {
                let s = match names {
                    Some(n) => e.to_string_with(n),
                    None => e.to_string(),
                };
                json!({"i": r + 1, "j": c + 1, "expr": s})
            })
            .collect();
        Value::Array(items)
    }

    /// Scalar multiple of the identity added in place.
    pub fn add_scalar(&mut self, c: &Rational) {
        for i in 0..self.n {
            let e = self.get(i, i) + &Expr::from_rational(c.clone());
            self.set(i, i, e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_small_integer_matrix() {
        let m = ExprMatrix::from_fn(3, |r, c| Expr::int([[2, 0, 1], [1, 3, 2], [1, 1, 2]][r][c]));
        assert_eq!(m.determinant(), Expr::int(6));
        assert_eq!(ExprMatrix::identity(5).determinant(), Expr::one());
    }

    #[test]
    fn product_and_transpose() {
        let a = ExprMatrix::from_fn(2, |r, c| Expr::var(r * 2 + c));
        let id = ExprMatrix::identity(2);
        assert_eq!(a.mul(&id), a);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.trace(), Expr::var(0) + Expr::var(3));
    }
}
