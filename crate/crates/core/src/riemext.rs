//! Riemannian extensions: the neutral metric on the cotangent bundle built
//! from a torsion-free connection, its Levi-Civita connection, and the
//! transfer of the Szabó property.
//!
//! Fiber coordinates follow the base ones: `x_{n+i}` pairs with `x_i`, so a
//! primed index `i'` is `i + n`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::check::{all_ok, Check};
use crate::connection::{Chart, Connection};
use crate::error::{Error, Result};
use crate::matrix::ExprMatrix;
use crate::symexpr::{Atom, Bindings, Expr};
use crate::szabo::{analyze, char_poly, SzaboAnalysis, SzaboVerdict};
use crate::tensor::Tensor;
use crate::tensorcalc::curvature;

/// Symmetric `2n × 2n` metric on cotangent coordinates `x_1..x_{2n}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeutralMetric {
    base_dim: usize,
    g: ExprMatrix,
}

impl NeutralMetric {
    /// Wraps a metric matrix after checking the extension block shape:
    /// identity pairing between base and fiber, zero fiber block, base block
    /// symmetric and linear in the fiber variables.
    pub fn new(g: ExprMatrix) -> Result<Self> {
        let dim = g.dim();
        if !dim.is_multiple_of(2) {
            return Err(Error::NotExtensionShaped(format!("odd dimension {dim}")));
        }
        let n = dim / 2;
        for a in 0..dim {
            for b in 0..dim {
                if g.get(a, b) != g.get(b, a) {
                    return Err(Error::NotExtensionShaped(format!("g is not symmetric at ({}, {})", a + 1, b + 1)));
                }
                let e = g.get(a, b);
                let ok = match (a < n, b < n) {
                    (true, true) => {
                        e.is_homogeneous_in(|x| matches!(x, Atom::Var(v) if *v as usize >= n), 1)
                            && !e.contains_atom(|x| matches!(x, Atom::Func(f) if f.args().any(|v| v >= n)))
                    }
                    (false, false) => e.is_zero(),
                    _ => {
                        let paired = a % n == b % n;
                        if paired {
                            e.is_one()
                        } else {
                            e.is_zero()
                        }
                    }
                };
                if !ok {
                    return Err(Error::NotExtensionShaped(format!(
                        "entry ({}, {}) = {e} breaks the extension block shape",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(NeutralMetric { base_dim: n, g })
    }

    pub fn dim(&self) -> usize {
        2 * self.base_dim
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.g
    }

    pub fn get(&self, a: usize, b: usize) -> &Expr {
        self.g.get(a, b)
    }

    /// `[[A, I], [I, 0]]⁻¹ = [[0, I], [I, −A]]`.
    pub fn inverse(&self) -> ExprMatrix {
        let n = self.base_dim;
        ExprMatrix::from_fn(2 * n, |a, b| match (a < n, b < n) {
            (true, true) => Expr::zero(),
            (false, false) => -self.g.get(a - n, b - n),
            _ if a % n == b % n => Expr::one(),
            _ => Expr::zero(),
        })
    }

    pub fn chart(&self) -> Chart {
        Chart::standard(self.dim())
    }

    /// Sparse JSON `{dim, g: [{i, j, expr}]}`, upper triangle, 1-based.
    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .g
            .entries()
            .filter(|(a, b, e)| a <= b && !e.is_zero())
            .map(|(a, b, e)| json!({"i": a + 1, "j": b + 1, "expr": e.to_string()}))
            .collect();
        json!({"dim": self.dim(), "g": items})
    }
}

/// `g_{ij} = −2 Σ_k x_{k'} Γ^k_{ij}`, `g_{i j'} = δ_ij`, `g_{i' j'} = 0`.
pub fn riemannian_extension(c: &Connection) -> Result<NeutralMetric> {
    c.require_torsion_free()?;
    let n = c.dim();
    let g = ExprMatrix::from_fn(2 * n, |a, b| match (a < n, b < n) {
        (true, true) => (0..n)
            .map(|k| Expr::var(k + n) * c.gamma(a, b, k))
            .sum::<Expr>()
            .scale_int(-2),
        (false, false) => Expr::zero(),
        _ if a % n == b % n => Expr::one(),
        _ => Expr::zero(),
    });
    NeutralMetric::new(g)
}

/// Levi-Civita connection from the Koszul formula
/// `Γ^c_{ab} = ½ Σ_d g^{cd} (∂_a g_{db} + ∂_b g_{ad} − ∂_d g_{ab})`.
pub fn levi_civita_koszul(g: &NeutralMetric) -> Result<Connection> {
    let dim = g.dim();
    let inv = g.inverse();
    // Lowered symbols Γ_{dab}, symmetric in a, b.
    let mut lowered = Tensor::zeros(dim, 3);
    for d in 0..dim {
        for a in 0..dim {
            for b in a..dim {
                let e = (g.get(d, b).diff(a) + g.get(a, d).diff(b) - g.get(a, b).diff(d)).scale(
                    &crate::Rational::new(1.into(), 2.into()),
                );
                if !e.is_zero() {
                    lowered.set(&[d, b, a], e.clone());
                    lowered.set(&[d, a, b], e);
                }
            }
        }
    }
    let gamma = Tensor::from_fn(dim, 3, |x| {
        let (a, b, c) = (x[0], x[1], x[2]);
        (0..dim)
            .filter(|&d| !inv.get(c, d).is_zero())
            .map(|d| inv.get(c, d) * lowered.get(&[d, a, b]))
            .sum()
    });
    Connection::new(g.chart(), gamma)
}

/// Levi-Civita connection of the extension from the base symbols directly:
///
/// * `Γ̃^k_{ij} = Γ^k_{ij}`
/// * `Γ̃^{k'}_{i'j} = −Γ^i_{jk}`, `Γ̃^{k'}_{ij'} = −Γ^j_{ik}`
/// * `Γ̃^{k'}_{ij} = Σ_r x_{r'} (∂_k Γ^r_{ij} − ∂_i Γ^r_{jk} − ∂_j Γ^r_{ik} + 2 Σ_l Γ^r_{kl} Γ^l_{ij})`
///
/// and every other symbol zero.
pub fn levi_civita_closed_form(c: &Connection) -> Result<Connection> {
    c.require_torsion_free()?;
    let n = c.dim();
    let g = |i: usize, j: usize, k: usize| c.gamma(i, j, k);
    let mut t = Tensor::zeros(2 * n, 3);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                t.set(&[i, j, k], g(i, j, k).clone());
                t.set(&[i + n, j, k + n], -g(j, k, i));
                t.set(&[i, j + n, k + n], -g(i, k, j));
                let e: Expr = (0..n)
                    .map(|r| {
                        let mut inner = g(i, j, r).diff(k) - g(j, k, r).diff(i) - g(i, k, r).diff(j);
                        let quad: Expr = (0..n).map(|l| g(k, l, r) * g(i, j, l)).sum();
                        inner += quad.scale_int(2);
                        Expr::var(r + n) * inner
                    })
                    .sum();
                t.set(&[i, j, k + n], e);
            }
        }
    }
    Connection::new(Chart::standard(2 * n), t)
}

/// `(∇_a g)_{bc} = ∂_a g_{bc} − Σ_d Γ^d_{ab} g_{dc} − Σ_d Γ^d_{ac} g_{bd}`.
pub fn metric_covariant_derivative(g: &NeutralMetric, c: &Connection) -> Tensor {
    let dim = g.dim();
    Tensor::from_fn(dim, 3, |x| {
        let (a, b, cc) = (x[0], x[1], x[2]);
        let mut e = g.get(b, cc).diff(a);
        let corr: Expr = (0..dim)
            .flat_map(|d| [c.gamma(a, b, d) * g.get(d, cc), c.gamma(a, cc, d) * g.get(b, d)])
            .sum();
        e -= corr;
        e
    })
}

/// Checks tying the extension back to the base connection.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<Check>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        all_ok(&self.checks)
    }
}

/// Koszul and closed form agree, the result is metric, `g·g⁻¹ = I`, and the
/// stated curvature components transfer.
///
/// The curvature identities are read with `R^h_{kji}` the `∂_h` component of
/// `R(∂_k, ∂_j)∂_i`:
///
/// * `R̃^h_{kji} = R^h_{kji}`
/// * `R̃^{h'}_{kji'} = −R^i_{kjh}`
/// * `R̃^{h'}_{k'ji} = R^k_{hij}`
pub fn verify_extension_lemma(c: &Connection) -> Result<LemmaReport> {
    let n = c.dim();
    let g = riemannian_extension(c)?;
    let mut checks = Vec::new();

    let product = g.matrix().mul(&g.inverse());
    checks.push(Check::from_first_failure(
        "metric times inverse is the identity",
        (product != ExprMatrix::identity(2 * n)).then(|| "g * g^-1 differs from I".to_string()),
    ));

    let koszul = levi_civita_koszul(&g)?;
    let closed = levi_civita_closed_form(c)?;
    let mismatch = koszul.symbols().nonzero().chain(closed.symbols().nonzero()).find_map(|(x, _)| {
        let (a, b) = (koszul.gamma(x[0], x[1], x[2]), closed.gamma(x[0], x[1], x[2]));
        (a != b).then(|| format!("Γ^{}_{}{}: Koszul {a}, closed form {b}", x[2] + 1, x[0] + 1, x[1] + 1))
    });
    checks.push(Check::from_first_failure("Koszul symbols equal closed form", mismatch));

    let dg = metric_covariant_derivative(&g, &koszul);
    checks.push(Check::from_first_failure(
        "metric is parallel",
        dg.nonzero()
            .next()
            .map(|(x, e)| format!("(∇_{} g)_{}{} = {e}", x[0] + 1, x[1] + 1, x[2] + 1)),
    ));
    checks.push(Check::from_first_failure(
        "extension connection is torsion-free",
        koszul.torsion_witness().map(|(i, j, k, e)| format!("T^{}_{}{} = {e}", k + 1, i + 1, j + 1)),
    ));

    let r = curvature(c)?;
    let rt = curvature(&closed)?;
    // comp(h, i, k, j) is the ∂_h component of R(∂_k, ∂_j)∂_i.
    let mut base = None;
    let mut mixed = None;
    let mut fiber = None;
    for h in 0..n {
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if base.is_none() && rt.get(h, i, k, j) != r.get(h, i, k, j) {
                        base = Some(format!("h={} k={} j={} i={}", h + 1, k + 1, j + 1, i + 1));
                    }
                    if mixed.is_none() && *rt.get(h + n, i + n, k, j) != -r.get(i, h, k, j) {
                        mixed = Some(format!("h={} k={} j={} i={}", h + 1, k + 1, j + 1, i + 1));
                    }
                    if fiber.is_none() && rt.get(h + n, i, k + n, j) != r.get(k, j, h, i) {
                        fiber = Some(format!("h={} k={} j={} i={}", h + 1, k + 1, j + 1, i + 1));
                    }
                }
            }
        }
    }
    checks.push(Check::from_first_failure("base curvature components agree", base));
    checks.push(Check::from_first_failure("R^h'_kji' = -R^i_kjh", mixed));
    checks.push(Check::from_first_failure("R^h'_k'ji = R^k_hij", fiber));
    Ok(LemmaReport { checks })
}

/// Szabó analysis of the Levi-Civita connection of `g` in all `2n` directions.
pub fn analyze_extension(g: &NeutralMetric) -> Result<SzaboAnalysis> {
    analyze(&levi_civita_koszul(g)?)
}

/// Szabó iff the characteristic polynomial is `λ^{2n}` identically.
pub fn is_pseudo_szabo(g: &NeutralMetric) -> Result<SzaboVerdict> {
    Ok(analyze_extension(g)?.verdict)
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub checks: Vec<Check>,
}

impl BlockReport {
    pub fn ok(&self) -> bool {
        all_ok(&self.checks)
    }
}

fn first_difference(a: &ExprMatrix, b: &ExprMatrix) -> Option<String> {
    a.entries()
        .find(|(r, c, e)| *e != b.get(*r, *c))
        .map(|(r, c, e)| format!("entry ({}, {}): {e} vs {}", r + 1, c + 1, b.get(r, c)))
}

fn block_checks(base: &SzaboAnalysis, ext: &SzaboAnalysis) -> Result<BlockReport> {
    let n = base.matrix.dim();
    let s = base.matrix.matrix();
    let st = ext.matrix.matrix();

    let mut no_fiber = Bindings::new();
    for i in n..2 * n {
        no_fiber.insert(Atom::dir(i), Expr::zero());
    }
    let ul = st.block(0, 0, n).try_map(|e| e.substitute(&no_fiber))?;
    let ur = st.block(0, n, n);
    let lr = st.block(n, n, n).try_map(|e| e.substitute(&no_fiber))?;

    let mut checks = vec![Check::from_first_failure(
        "upper-right block vanishes",
        ur.entries()
            .find(|(_, _, e)| !e.is_zero())
            .map(|(r, c, e)| format!("entry ({}, {}) = {e}", r + 1, c + n + 1)),
    )];
    checks.push(Check::from_first_failure("upper-left block is S(X)", first_difference(&ul, s)));
    checks.push(Check::from_first_failure(
        "lower-right block is the transpose of S(X)",
        first_difference(&lr, &s.transpose()),
    ));

    let p = &base.verdict.char_poly;
    let pt = char_poly(&s.transpose());
    checks.push(Check::from_bool("S(X) and its transpose share a spectrum", *p == pt, || {
        "P(S) differs from P(tS)".into()
    }));
    let product = p.mul(&pt);
    let direct = &ext.verdict.char_poly;
    let factor = (product != *direct).then(|| {
        let d = (0..=2 * n).find(|&d| product.coeff(d) != direct.coeff(d)).unwrap_or(0);
        format!("coefficient of lambda^{d} differs")
    });
    checks.push(Check::from_first_failure("P(S~) = P(S) * P(tS)", factor));
    Ok(BlockReport { checks })
}

/// Checks `S̃(X̃) = [[S(X), 0], [*, ᵗS(X)]]` and `P(S̃) = P(S)·P(ᵗS)`.
///
/// The extension operator is taken in the full direction `α_1..α_{2n}`;
/// the diagonal blocks are compared after setting the fiber parameters to
/// zero. The characteristic polynomial of `S̃` is computed directly, not from
/// the blocks.
pub fn check_block_structure(c: &Connection) -> Result<BlockReport> {
    let base = analyze(c)?;
    let ext = analyze_extension(&riemannian_extension(c)?)?;
    block_checks(&base, &ext)
}

/// Everything the extension of one connection yields.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub metric: NeutralMetric,
    pub lemma: LemmaReport,
    pub base: SzaboVerdict,
    pub extension: SzaboVerdict,
    pub blocks: BlockReport,
}

impl ExtensionReport {
    /// The Szabó property transfers in both directions.
    pub fn transfer_holds(&self) -> bool {
        self.base.is_szabo == self.extension.is_szabo
    }

    pub fn ok(&self) -> bool {
        self.lemma.ok() && self.blocks.ok() && self.transfer_holds()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "metric": self.metric.to_json(),
            "lemma_checks": self.lemma.checks,
            "block_checks": self.blocks.checks,
            "base_szabo": self.base.to_json(),
            "extension_szabo": self.extension.to_json(),
            "transfer_holds": self.transfer_holds(),
        })
    }
}

pub fn extension_report(c: &Connection) -> Result<ExtensionReport> {
    let metric = riemannian_extension(c)?;
    let lemma = verify_extension_lemma(c)?;
    let base = analyze(c)?;
    let ext = analyze_extension(&metric)?;
    let blocks = block_checks(&base, &ext)?;
    Ok(ExtensionReport {
        metric,
        lemma,
        base: base.verdict,
        extension: ext.verdict,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::family1;

    #[test]
    fn flat_extension_is_pure_pairing() {
        let g = riemannian_extension(&Connection::flat(3)).unwrap();
        assert_eq!(g.dim(), 6);
        for (a, b, e) in g.matrix().entries() {
            let expected = if a % 3 == b % 3 && (a < 3) != (b < 3) { Expr::one() } else { Expr::zero() };
            assert_eq!(*e, expected);
        }
        assert!(levi_civita_koszul(&g).unwrap().symbols().is_zero());
        assert!(levi_civita_closed_form(&Connection::flat(3)).unwrap().symbols().is_zero());
    }

    #[test]
    fn determinant_is_unimodular() {
        let x = Expr::var;
        let c = family1([x(0), x(2).scale_int(2), x(1).scale_int(-2)]);
        let g = riemannian_extension(&c).unwrap();
        // (-1)^n for n = 3.
        assert_eq!(g.matrix().determinant(), Expr::int(-1));
        assert_eq!(g.matrix().mul(&g.inverse()), ExprMatrix::identity(6));
    }

    #[test]
    fn rejects_non_extension_shapes() {
        let g = ExprMatrix::identity(4);
        assert!(matches!(NeutralMetric::new(g), Err(Error::NotExtensionShaped(_))));
    }
}
