use serde_json::{json, Value};

use crate::symexpr::Expr;

/// Dense component array of `Expr` with every index ranging over `0..n`.
///
/// Components are stored row-major, the last index varying fastest.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor {
    n: usize,
    rank: usize,
    comp: Vec<Expr>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Tensor {
            n,
            rank,
            comp: vec![Expr::zero(); n.pow(rank as u32)],
        }
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Expr) -> Self {
        let mut t = Tensor::zeros(n, rank);
        let mut idx = vec![0; rank];
        for slot in 0..t.comp.len() {
            t.unflatten(slot, &mut idx);
            t.comp[slot] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.n);
            acc * self.n + i
        })
    }

    fn unflatten(&self, mut slot: usize, idx: &mut [usize]) {
        for d in (0..self.rank).rev() {
            idx[d] = slot % self.n;
            slot /= self.n;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comp[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Expr) {
        let slot = self.flatten(idx);
        self.comp[slot] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.comp.iter().all(Expr::is_zero)
    }

    /// Nonzero components with their indices, in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> + '_ {
        self.comp.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(slot, e)| {
            let mut idx = vec![0; self.rank];
            self.unflatten(slot, &mut idx);
            (idx, e)
        })
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Tensor {
        Tensor {
            n: self.n,
            rank: self.rank,
            comp: self.comp.iter().map(f).collect(),
        }
    }

    /// Sparse JSON list of `{indices, expr}` with 1-based indices.
    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .nonzero()
            .map(|(idx, e)| {
                let idx: Vec<usize> = idx.iter().map(|i| i + 1).collect();
                json!({ "indices": idx, "expr": e.to_string() })
            })
            .collect();
        Value::Array(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let t = Tensor::from_fn(3, 3, |i| Expr::int((i[0] * 100 + i[1] * 10 + i[2]) as i64));
        assert_eq!(*t.get(&[2, 0, 1]), Expr::int(201));
        let nz: Vec<_> = t.nonzero().map(|(i, _)| i).collect();
        assert_eq!(nz.len(), 26);
        assert_eq!(nz[0], vec![0, 0, 1]);
    }
}
