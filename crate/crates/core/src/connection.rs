//! Affine connections on a coordinate chart, given by Christoffel symbols.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::symexpr::{Atom, Bindings, Expr};
use crate::tensor::Tensor;

/// Coordinate chart `x_1..x_n` with display names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn standard(n: usize) -> Self {
        Chart {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::DimensionMismatch("a chart needs at least one variable".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::InvalidName(format!("{a} (declared twice)")));
            }
        }
        Ok(Chart { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Advisory tag for the two three-dimensional families studied here.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Only `∇_{∂1}∂_j = f_j ∂_1` (and its symmetric partners) nonzero.
    Family1,
    /// Only `∇_{∂1}∂1 = f1 ∂2`, `∇_{∂2}∂2 = f2 ∂3`, `∇_{∂3}∂3 = f3 ∂1` nonzero.
    Family2,
    Generic,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Family1 => "family-1",
            Family::Family2 => "family-2",
            Family::Generic => "generic",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "family-1" | "family1" => Some(Family::Family1),
            "family-2" | "family2" => Some(Family::Family2),
            "generic" => Some(Family::Generic),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Affine connection `∇_{∂i}∂j = Σ_k Γ^k_{ij} ∂k`.
///
/// `gamma(i, j, k)` is `Γ^k_{ij}` with 0-based indices. The family tag is
/// informational; every predicate recomputes from the symbols.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    chart: Chart,
    gamma: Tensor,
    family: Option<Family>,
}

impl Connection {
    /// Builds a connection after checking that every symbol lives on the chart.
    pub fn new(chart: Chart, gamma: Tensor) -> Result<Self> {
        let n = chart.dim();
        if gamma.dim() != n || gamma.rank() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "chart has dimension {n} but the symbol array is {}^{}",
                gamma.dim(),
                gamma.rank()
            )));
        }
        for (idx, e) in gamma.nonzero() {
            if let Some(v) = e.max_var() {
                if v >= n {
                    return Err(Error::DimensionMismatch(format!(
                        "Γ^{}_{}{} mentions x{} outside a chart of dimension {n}",
                        idx[2] + 1,
                        idx[0] + 1,
                        idx[1] + 1,
                        v + 1
                    )));
                }
            }
        }
        Ok(Connection {
            chart,
            gamma,
            family: None,
        })
    }

    /// Builds from a function of `(i, j, k)` giving `Γ^k_{ij}`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Expr) -> Result<Self> {
        Connection::new(Chart::standard(n), Tensor::from_fn(n, 3, |i| f(i[0], i[1], i[2])))
    }

    pub fn flat(n: usize) -> Self {
        Connection {
            chart: Chart::standard(n),
            gamma: Tensor::zeros(n, 3),
            family: None,
        }
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.gamma.get(&[i, j, k])
    }

    pub fn symbols(&self) -> &Tensor {
        &self.gamma
    }

    /// Applies a substitution to every symbol.
    pub fn substitute(&self, b: &Bindings) -> Result<Connection> {
        let mut gamma = Tensor::zeros(self.dim(), 3);
        for (idx, e) in self.gamma.nonzero() {
            gamma.set(&idx, e.substitute(b)?);
        }
        Ok(Connection {
            chart: self.chart.clone(),
            gamma,
            family: self.family,
        })
    }

    /// `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}`, stored at `[i][j][k]`.
    pub fn torsion(&self) -> Tensor {
        let n = self.dim();
        Tensor::from_fn(n, 3, |x| self.gamma(x[0], x[1], x[2]) - self.gamma(x[1], x[0], x[2]))
    }

    /// First nonzero torsion component, if any.
    pub fn torsion_witness(&self) -> Option<(usize, usize, usize, Expr)> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let t = self.gamma(i, j, k) - self.gamma(j, i, k);
                    if !t.is_zero() {
                        return Some((i, j, k, t));
                    }
                }
            }
        }
        None
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_witness().is_none()
    }

    /// Errors with the first nonzero torsion component.
    pub fn require_torsion_free(&self) -> Result<()> {
        match self.torsion_witness() {
            None => Ok(()),
            Some((i, j, k, t)) => Err(Error::TorsionNonZero {
                i,
                j,
                k,
                expr: t.to_string(),
            }),
        }
    }

    /// `∇₁ ⊕ ∇₂` on the product chart; the second factor's coordinates are
    /// renamed `x_{n1+1}..`.
    pub fn direct_sum(&self, other: &Connection) -> Result<Connection> {
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let mut gamma = Tensor::zeros(n, 3);
        for (idx, e) in self.gamma.nonzero() {
            gamma.set(&idx, e.clone());
        }
        for (idx, e) in other.gamma.nonzero() {
            let shifted = e.map_atoms(|a| shift_atom(a, n1))?;
            gamma.set(&[idx[0] + n1, idx[1] + n1, idx[2] + n1], shifted);
        }
        Connection::new(Chart::standard(n), gamma)
    }

    /// Sparse JSON form `{dim, variables, gamma: [{i, j, k, expr}]}`, 1-based.
    pub fn to_json(&self) -> Value {
        let names = self.chart.names();
        let gamma: Vec<Value> = self
            .gamma
            .nonzero()
            .map(|(x, e)| json!({"i": x[0] + 1, "j": x[1] + 1, "k": x[2] + 1, "expr": e.to_string_with(names)}))
            .collect();
        json!({
            "dim": self.dim(),
            "variables": names,
            "family": self.family.map(|f| f.name()),
            "gamma": gamma,
        })
    }
}

/// Moves an atom's chart-variable dependence up by `offset`.
pub(crate) fn shift_atom(a: Atom, offset: usize) -> Result<Atom> {
    Ok(match a {
        Atom::Var(v) => Atom::var(v as usize + offset),
        Atom::Func(f) => Atom::Func(f.shifted(offset)?),
        other => other,
    })
}

/// Opaque `f1, f2, f3` each depending on all of `x1, x2, x3`.
pub fn generic_functions() -> [Expr; 3] {
    ["f1", "f2", "f3"].map(|name| Expr::func(name, &[0, 1, 2]).expect("valid generic function"))
}

/// Family-1 connection: `∇_{∂1}∂_j = f_j ∂1` for `j = 1, 2, 3`.
///
/// Torsion-freeness forces `Γ^1_{j1} = Γ^1_{1j}`, so both are stored.
pub fn family1(f: [Expr; 3]) -> Connection {
    family1_in_direction(0, f).with_family(Family::Family1)
}

/// `∇_{∂1}∂_j = f_j ∂_d`: the family-1 pattern pointing along `∂_{d+1}`.
pub fn family1_in_direction(d: usize, f: [Expr; 3]) -> Connection {
    assert!(d < 3, "direction index out of range");
    let mut gamma = Tensor::zeros(3, 3);
    for (j, fj) in f.into_iter().enumerate() {
        gamma.set(&[0, j, d], fj.clone());
        gamma.set(&[j, 0, d], fj);
    }
    Connection::new(Chart::standard(3), gamma).expect("three-dimensional data")
}

/// Family-2 connection: `∇_{∂1}∂1 = f1 ∂2`, `∇_{∂2}∂2 = f2 ∂3`, `∇_{∂3}∂3 = f3 ∂1`.
pub fn family2(f: [Expr; 3]) -> Connection {
    let [f1, f2, f3] = f;
    let mut gamma = Tensor::zeros(3, 3);
    gamma.set(&[0, 0, 1], f1);
    gamma.set(&[1, 1, 2], f2);
    gamma.set(&[2, 2, 0], f3);
    Connection::new(Chart::standard(3), gamma)
        .expect("three-dimensional data")
        .with_family(Family::Family2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse_expr;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    #[test]
    fn flat_is_torsion_free() {
        let c = Connection::flat(3);
        assert!(c.torsion().is_zero());
        assert!(c.is_torsion_free());
    }

    #[test]
    fn families_are_torsion_free() {
        assert!(family1(generic_functions()).torsion().is_zero());
        assert!(family2(generic_functions()).is_torsion_free());
        for d in 0..3 {
            assert!(family1_in_direction(d, generic_functions()).is_torsion_free());
        }
    }

    #[test]
    fn asymmetric_torsion() {
        let c = Connection::from_fn(3, |i, j, k| if (i, j, k) == (0, 1, 0) { x(2) } else { Expr::zero() }).unwrap();
        let t = c.torsion();
        assert_eq!(*t.get(&[0, 1, 0]), x(2));
        assert_eq!(*t.get(&[1, 0, 0]), -x(2));
        assert!(!c.is_torsion_free());
        assert!(matches!(
            c.require_torsion_free(),
            Err(Error::TorsionNonZero { i: 0, j: 1, k: 0, .. })
        ));
    }

    #[test]
    fn torsion_is_antisymmetric() {
        let c = Connection::from_fn(3, |i, j, k| x(i) * x(k) + Expr::int((j * 3 + k) as i64)).unwrap();
        let t = c.torsion();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(*t.get(&[i, j, k]), -t.get(&[j, i, k]));
                }
            }
        }
    }

    #[test]
    fn direct_sum_of_flats_is_flat() {
        let c = Connection::flat(3).direct_sum(&Connection::flat(3)).unwrap();
        assert_eq!(c, Connection::flat(6));
    }

    #[test]
    fn direct_sum_renames_second_factor() {
        let a = family1([Expr::zero(), -x(2), x(1)]);
        let b = family2([Expr::zero(), x(1), x(1) + x(2).pow(2)]);
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(s.is_torsion_free());
        assert_eq!(*s.gamma(0, 1, 0), -x(2));
        assert_eq!(*s.gamma(5, 5, 3), x(4) + x(5).pow(2));
        assert!(s.gamma(0, 3, 0).is_zero());
    }

    #[test]
    fn rejects_symbols_off_the_chart() {
        let mut g = Tensor::zeros(2, 3);
        g.set(&[0, 0, 0], parse_expr("x3", 3).unwrap());
        assert!(Connection::new(Chart::standard(2), g).is_err());
    }

    #[test]
    fn json_is_sparse_and_one_based() {
        let v = family1([x(0), Expr::zero(), Expr::zero()]).to_json();
        assert_eq!(v["dim"], 3);
        assert_eq!(v["gamma"].as_array().unwrap().len(), 1);
        assert_eq!(v["gamma"][0]["i"], 1);
        assert_eq!(v["gamma"][0]["expr"], "x1");
    }
}
