//! Curvature, Ricci and their covariant derivatives in coordinates.
//!
//! Conventions (0-based indices throughout):
//!
//! * `R(∂_k, ∂_l)∂_j = Σ_i R^i_{jkl} ∂_i`, stored at `[i][j][k][l]`;
//! * `Ric_{jk} = Ric(∂_j, ∂_k) = Σ_i R^i_{kij}`;
//! * `(∇_{∂_i}Ric)_{jk}` stored at `[i][j][k]`;
//! * `(∇_{∂_m}R)^i_{jkl}` stored at `[m][i][j][k][l]`.

use serde::Serialize;

use crate::connection::{family1, family2, generic_functions, Connection, Family};
use crate::error::Result;
use crate::symexpr::{Atom, Expr, Monomial};
use crate::tensor::Tensor;

macro_rules! component_tensor {
    ($name:ident, $rank:expr, $($ix:ident),+) => {
        #[derive(Clone, PartialEq, Eq, Debug)]
        pub struct $name(Tensor);

        impl $name {
            pub fn get(&self, $($ix: usize),+) -> &Expr {
                self.0.get(&[$($ix),+])
            }

            pub fn tensor(&self) -> &Tensor {
                &self.0
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            pub fn is_zero(&self) -> bool {
                self.0.is_zero()
            }
        }
    };
}

component_tensor!(CurvatureTensor, 4, i, j, k, l);
component_tensor!(RicciTensor, 2, j, k);
component_tensor!(CovDerivRicci, 3, i, j, k);
component_tensor!(CovDerivCurvature, 5, m, i, j, k, l);

impl CurvatureTensor {
    /// Components of `R(∂_k, ∂_l)∂_j`.
    pub fn apply(&self, k: usize, l: usize, j: usize) -> Vec<Expr> {
        (0..self.dim()).map(|i| self.get(i, j, k, l).clone()).collect()
    }
}

/// `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Σ_m (Γ^i_{km} Γ^m_{lj} − Γ^i_{lm} Γ^m_{kj})`.
///
/// Coordinate fields commute, so the bracket term drops; this relies on the
/// connection being torsion-free, which is checked.
pub fn curvature(c: &Connection) -> Result<CurvatureTensor> {
    c.require_torsion_free()?;
    let n = c.dim();
    let g = |i: usize, j: usize, k: usize| c.gamma(i, j, k);
    let mut t = Tensor::zeros(n, 4);
    for k in 0..n {
        for l in k + 1..n {
            for i in 0..n {
                for j in 0..n {
                    let mut e = g(l, j, i).diff(k) - g(k, j, i).diff(l);
                    let products: Expr = (0..n)
                        .flat_map(|m| [g(k, m, i) * g(l, j, m), -(g(l, m, i) * g(k, j, m))])
                        .sum();
                    e += products;
                    if !e.is_zero() {
                        t.set(&[i, j, l, k], -&e);
                        t.set(&[i, j, k, l], e);
                    }
                }
            }
        }
    }
    Ok(CurvatureTensor(t))
}

pub fn ricci_from(r: &CurvatureTensor) -> RicciTensor {
    let n = r.dim();
    RicciTensor(Tensor::from_fn(n, 2, |x| {
        let (j, k) = (x[0], x[1]);
        (0..n).map(|i| r.get(i, k, i, j)).sum()
    }))
}

pub fn ricci(c: &Connection) -> Result<RicciTensor> {
    Ok(ricci_from(&curvature(c)?))
}

/// `(∇_i Ric)_{jk} = ∂_i Ric_{jk} − Σ_m Γ^m_{ij} Ric_{mk} − Σ_m Γ^m_{ik} Ric_{jm}`.
pub fn cov_deriv_ricci_from(c: &Connection, ric: &RicciTensor) -> CovDerivRicci {
    let n = c.dim();
    CovDerivRicci(Tensor::from_fn(n, 3, |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        let mut e = ric.get(j, k).diff(i);
        let corr: Expr = (0..n)
            .flat_map(|m| [c.gamma(i, j, m) * ric.get(m, k), c.gamma(i, k, m) * ric.get(j, m)])
            .sum();
        e -= corr;
        e
    }))
}

pub fn cov_deriv_ricci(c: &Connection) -> Result<CovDerivRicci> {
    Ok(cov_deriv_ricci_from(c, &ricci(c)?))
}

/// `(∇_m R)^i_{jkl} = ∂_m R^i_{jkl} + Σ_r (Γ^i_{mr} R^r_{jkl} − Γ^r_{mk} R^i_{jrl}
/// − Γ^r_{ml} R^i_{jkr} − Γ^r_{mj} R^i_{rkl})`.
pub fn cov_deriv_curvature_from(c: &Connection, r: &CurvatureTensor) -> CovDerivCurvature {
    let n = c.dim();
    let g = |i: usize, j: usize, k: usize| c.gamma(i, j, k);
    let mut t = Tensor::zeros(n, 5);
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in k + 1..n {
                        let mut terms = vec![r.get(i, j, k, l).diff(m)];
                        for s in 0..n {
                            terms.push(g(m, s, i) * r.get(s, j, k, l));
                            terms.push(-(g(m, k, s) * r.get(i, j, s, l)));
                            terms.push(-(g(m, l, s) * r.get(i, j, k, s)));
                            terms.push(-(g(m, j, s) * r.get(i, s, k, l)));
                        }
                        let e: Expr = terms.into_iter().sum();
                        if !e.is_zero() {
                            t.set(&[m, i, j, l, k], -&e);
                            t.set(&[m, i, j, k, l], e);
                        }
                    }
                }
            }
        }
    }
    CovDerivCurvature(t)
}

pub fn cov_deriv_curvature(c: &Connection) -> Result<CovDerivCurvature> {
    Ok(cov_deriv_curvature_from(c, &curvature(c)?))
}

/// `(∇_X Ric)(X, X)` for the symbolic direction `X = Σ α_i ∂_i`.
pub fn ricci_cubic_form(c: &Connection) -> Result<Expr> {
    Ok(cubic_form_from(&cov_deriv_ricci(c)?))
}

pub fn cubic_form_from(d: &CovDerivRicci) -> Expr {
    let n = d.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let e = d.get(i, j, k);
                if !e.is_zero() {
                    terms.push(e * (Expr::dir(i) * Expr::dir(j) * Expr::dir(k)));
                }
            }
        }
    }
    terms.into_iter().sum()
}

/// Failing index triple of the cyclic-parallel test.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CyclicWitness {
    pub indices: (usize, usize, usize),
    pub expr: Expr,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CyclicVerdict {
    pub holds: bool,
    pub witness: Option<CyclicWitness>,
}

/// Cyclic sum of `∇Ric` over `(i, j, k)`, taken on the symmetric part of Ric.
///
/// `(∇_X Ric)(X, X)` only sees the symmetric part, and Ric need not be
/// symmetric for an affine connection, so the symmetrized sum is the one
/// equivalent to the cubic form vanishing.
pub fn cyclic_sum(d: &CovDerivRicci, i: usize, j: usize, k: usize) -> Expr {
    let half = Expr::ratio(1, 2);
    let s: Expr = [(i, j, k), (j, k, i), (k, i, j)]
        .into_iter()
        .flat_map(|(a, b, c)| [d.get(a, b, c).clone(), d.get(a, c, b).clone()])
        .sum();
    half * s
}

/// Decides `(∇_X Ric)(X, X) = 0` for all `X`.
///
/// On failure the witness is the lexicographically first triple
/// `i ≤ j ≤ k` with a nonzero cyclic sum.
pub fn is_cyclic_parallel(c: &Connection) -> Result<CyclicVerdict> {
    Ok(cyclic_verdict_from(&cov_deriv_ricci(c)?))
}

pub fn cyclic_verdict_from(d: &CovDerivRicci) -> CyclicVerdict {
    let n = d.dim();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let e = cyclic_sum(d, i, j, k);
                if !e.is_zero() {
                    return CyclicVerdict {
                        holds: false,
                        witness: Some(CyclicWitness { indices: (i, j, k), expr: e }),
                    };
                }
            }
        }
    }
    CyclicVerdict {
        holds: true,
        witness: None,
    }
}

/// One equation of the cyclic-parallel system: the coefficient of an
/// `α`-monomial in `(∇_X Ric)(X, X)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdeEquation {
    pub monomial: Monomial,
    pub lhs: Expr,
}

/// The α-coefficients of `(∇_X Ric)(X, X)` for the generic member of a family,
/// i.e. the partial differential equations characterising cyclic parallelism.
pub fn cyclic_parallel_pde_system(family: Family) -> Result<Vec<PdeEquation>> {
    let c = match family {
        Family::Family1 => family1(generic_functions()),
        Family::Family2 => family2(generic_functions()),
        Family::Generic => {
            return Err(crate::Error::InvalidFunction(
                "no generic member for an untagged connection".into(),
            ))
        }
    };
    pde_system_of(&c)
}

/// α-coefficients of the cubic form of any connection, highest monomial first.
pub fn pde_system_of(c: &Connection) -> Result<Vec<PdeEquation>> {
    let form = ricci_cubic_form(c)?;
    Ok(form
        .coefficients_in(Atom::is_dir)
        .into_iter()
        .rev()
        .map(|(monomial, lhs)| PdeEquation { monomial, lhs })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Bindings;

    #[test]
    fn flat_connection_has_no_curvature() {
        let c = Connection::flat(3);
        assert!(curvature(&c).unwrap().is_zero());
        assert!(ricci(&c).unwrap().is_zero());
        assert!(cov_deriv_ricci(&c).unwrap().is_zero());
        assert!(cov_deriv_curvature(&c).unwrap().is_zero());
        assert!(is_cyclic_parallel(&c).unwrap().holds);
    }

    #[test]
    fn constant_flat_symbols_are_parallel() {
        // Constant symbols with Γ^1_{22} = 1 only: every product vanishes.
        let c = Connection::from_fn(3, |i, j, k| {
            if (i, j, k) == (1, 1, 0) {
                Expr::one()
            } else {
                Expr::zero()
            }
        })
        .unwrap();
        assert!(curvature(&c).unwrap().is_zero());
        assert!(cov_deriv_curvature(&c).unwrap().is_zero());
    }

    #[test]
    fn torsion_is_rejected() {
        let c = Connection::from_fn(2, |i, j, k| {
            if (i, j, k) == (0, 1, 0) {
                Expr::var(1)
            } else {
                Expr::zero()
            }
        })
        .unwrap();
        assert!(curvature(&c).is_err());
    }

    #[test]
    fn witness_for_broken_family2_shape() {
        // f1 = x2 still solves every equation of the system; x2^2 breaks ∂2²f1 = 0.
        let c = family2([Expr::var(1), Expr::zero(), Expr::zero()]);
        assert!(is_cyclic_parallel(&c).unwrap().holds);

        let c = family2([Expr::var(1).pow(2), Expr::zero(), Expr::zero()]);
        let v = is_cyclic_parallel(&c).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.indices, (0, 0, 1));
        assert_eq!(w.expr, Expr::int(2));
        let form = ricci_cubic_form(&c).unwrap();
        assert_eq!(form, Expr::dir(0).pow(2) * Expr::dir(1) * Expr::int(2));
    }

    #[test]
    fn ricci_22_under_substitution() {
        let [_, f2, _] = generic_functions();
        let e = f2.diff(1) + f2.pow(2);
        let a = *f2.atoms().iter().next().unwrap();
        let b = Bindings::new().with(a, -Expr::var(2));
        assert_eq!(e.substitute(&b).unwrap(), Expr::var(2).pow(2));
        let b = Bindings::new().with(a, Expr::zero());
        assert!(e.substitute(&b).unwrap().is_zero());
    }
}
