//! The affine Szabó operator `S(X)Y = (∇_X R)(Y, X)X` in a fully symbolic
//! direction `X = Σ α_i ∂_i`, its characteristic polynomial, and the
//! nilpotency criterion.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::connection::{family1, family2, generic_functions, Connection};
use crate::error::Result;
use crate::matrix::ExprMatrix;
use crate::symexpr::{Atom, Bindings, Expr, Monomial, Rational};
use crate::tensorcalc::{
    cov_deriv_curvature_from, cov_deriv_ricci_from, cubic_form_from, curvature, cyclic_verdict_from, ricci_from,
    CovDerivCurvature,
};

/// Matrix of `S(X)` in the coordinate frame; column `m` holds `S(X)∂_m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SzaboMatrix(pub ExprMatrix);

impl SzaboMatrix {
    pub fn from_cov_deriv(d: &CovDerivCurvature) -> Self {
        let n = d.dim();
        let dirs: Vec<Expr> = (0..n).map(Expr::dir).collect();
        let mut cubic = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    cubic.push(&dirs[i] * &dirs[j] * &dirs[k]);
                }
            }
        }
        SzaboMatrix(ExprMatrix::from_fn(n, |p, m| {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let e = d.get(i, p, k, m, j);
                        if !e.is_zero() {
                            terms.push(e * &cubic[(i * n + j) * n + k]);
                        }
                    }
                }
            }
            terms.into_iter().sum()
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.0
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        self.0.get(r, c)
    }

    /// `S(X)X` as a coordinate vector; identically zero for every connection.
    pub fn applied_to_direction(&self) -> Vec<Expr> {
        let dirs: Vec<Expr> = (0..self.dim()).map(Expr::dir).collect();
        self.0.mul_vec(&dirs)
    }

    /// Every entry is homogeneous of degree three in the direction parameters.
    pub fn is_cubic(&self) -> bool {
        self.0.entries().all(|(_, _, e)| e.is_homogeneous_in(Atom::is_dir, 3))
    }
}

pub fn szabo_operator(c: &Connection) -> Result<SzaboMatrix> {
    let r = curvature(c)?;
    Ok(SzaboMatrix::from_cov_deriv(&cov_deriv_curvature_from(c, &r)))
}

/// `det(λI − M) = Σ_d c_d λ^d`, so `c_n = 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly {
    coeffs: Vec<Expr>,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<Expr>) -> Self {
        CharPoly { coeffs }
    }

    /// `λ^n`.
    pub fn pure_power(n: usize) -> Self {
        let mut coeffs = vec![Expr::zero(); n + 1];
        coeffs[n] = Expr::one();
        CharPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `λ^d`.
    pub fn coeff(&self, d: usize) -> &Expr {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    /// All coefficients below the leading one vanish.
    pub fn is_pure_power(&self) -> bool {
        self.coeffs[..self.degree()].iter().all(Expr::is_zero)
    }

    /// Highest-degree nonzero coefficient below the leading one.
    pub fn first_nonzero_subleading(&self) -> Option<(usize, &Expr)> {
        (0..self.degree()).rev().map(|d| (d, &self.coeffs[d])).find(|(_, e)| !e.is_zero())
    }

    pub fn to_expr(&self) -> Expr {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| c * &Expr::lambda().pow(d as u32))
            .sum()
    }

    /// Prints by descending degree, coefficients with the given variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        self.render(Some(names))
    }

    fn render(&self, names: Option<&[String]>) -> String {
        let mut parts = Vec::new();
        for d in (0..=self.degree()).rev() {
            let c = &self.coeffs[d];
            if c.is_zero() {
                continue;
            }
            let text = match names {
                Some(n) => c.to_string_with(n),
                None => c.to_string(),
            };
            let power = match d {
                0 => String::new(),
                1 => "lambda".to_string(),
                _ => format!("lambda^{d}"),
            };
            parts.push(match (c.is_one(), d) {
                (_, 0) => format!("({text})"),
                (true, _) => power,
                (false, _) => format!("({text})*{power}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn mul(&self, other: &CharPoly) -> CharPoly {
        let mut coeffs = vec![Expr::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if !a.is_zero() && !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        CharPoly { coeffs }
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

/// Characteristic polynomial by cofactor expansion of `λI − M`.
pub fn char_poly_cofactor(m: &ExprMatrix) -> CharPoly {
    let n = m.dim();
    let shifted = ExprMatrix::from_fn(n, |r, c| {
        let e = -m.get(r, c);
        if r == c {
            e + Expr::lambda()
        } else {
            e
        }
    });
    let mut coeffs = shifted.determinant().lambda_coefficients();
    coeffs.resize(n + 1, Expr::zero());
    CharPoly { coeffs }
}

/// Characteristic polynomial by the Faddeev–LeVerrier trace recursion.
pub fn char_poly_faddeev_leverrier(m: &ExprMatrix) -> CharPoly {
    let n = m.dim();
    let mut coeffs = vec![Expr::zero(); n + 1];
    coeffs[n] = Expr::one();
    let mut acc = ExprMatrix::identity(n);
    for k in 1..=n {
        let am = m.mul(&acc);
        let c = am.trace().scale(&Rational::new((-1).into(), (k as i64).into()));
        if k < n {
            acc = am;
            for i in 0..n {
                let e = acc.get(i, i) + &c;
                acc.set(i, i, e);
            }
        }
        coeffs[n - k] = c;
    }
    CharPoly { coeffs }
}

/// Cofactor expansion up to dimension four, trace recursion beyond.
pub fn char_poly(m: &ExprMatrix) -> CharPoly {
    if m.dim() <= 4 {
        char_poly_cofactor(m)
    } else {
        char_poly_faddeev_leverrier(m)
    }
}

#[derive(Clone, Debug)]
pub struct SzaboVerdict {
    pub is_szabo: bool,
    pub char_poly: CharPoly,
    /// Degree and value of the first nonzero coefficient below `λ^n`.
    pub failing_coefficient: Option<(usize, Expr)>,
    /// `trace S(X) = (∇_X Ric)(X, X)` held.
    pub trace_identity_ok: bool,
    pub notes: String,
}

impl SzaboVerdict {
    pub fn from_char_poly(char_poly: CharPoly, trace_identity_ok: bool) -> Self {
        let failing = char_poly.first_nonzero_subleading().map(|(d, e)| (d, e.clone()));
        let n = char_poly.degree();
        let notes = match &failing {
            None => format!("characteristic polynomial is lambda^{n}, so S(X) is nilpotent"),
            Some((d, _)) => format!("coefficient of lambda^{d} is not identically zero"),
        };
        SzaboVerdict {
            is_szabo: failing.is_none(),
            char_poly,
            failing_coefficient: failing,
            trace_identity_ok,
            notes,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "is_szabo": self.is_szabo,
            "char_poly": self.char_poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "trace_identity_ok": self.trace_identity_ok,
            "notes": self.notes,
        });
        if let Some((d, e)) = &self.failing_coefficient {
            v["failing_coefficient"] = json!({"degree": d, "expr": e.to_string()});
        }
        v
    }
}

/// Everything the Szabó decision computes, kept for inspection.
#[derive(Clone, Debug)]
pub struct SzaboAnalysis {
    pub matrix: SzaboMatrix,
    pub ricci_cubic_form: Expr,
    pub cyclic_parallel: bool,
    pub verdict: SzaboVerdict,
}

pub fn analyze(c: &Connection) -> Result<SzaboAnalysis> {
    let r = curvature(c)?;
    let ric = ricci_from(&r);
    let dric = cov_deriv_ricci_from(c, &ric);
    let form = cubic_form_from(&dric);
    let cyclic = cyclic_verdict_from(&dric).holds;
    let matrix = SzaboMatrix::from_cov_deriv(&cov_deriv_curvature_from(c, &r));
    let trace_ok = matrix.0.trace() == form;
    let verdict = SzaboVerdict::from_char_poly(char_poly(&matrix.0), trace_ok);
    Ok(SzaboAnalysis {
        matrix,
        ricci_cubic_form: form,
        cyclic_parallel: cyclic,
        verdict,
    })
}

/// Affine Szabó iff `det(λI − S(X)) = λ^n` identically in `α`.
pub fn is_affine_szabo(c: &Connection) -> Result<SzaboVerdict> {
    Ok(analyze(c)?.verdict)
}

/// Upper bound on the eigenvalue magnitudes of a numeric matrix.
///
/// The characteristic polynomial is formed in floating point by the trace
/// recursion and bounded with Fujiwara's root bound. At points where the
/// entries are small integers the arithmetic is exact, so a nilpotent
/// matrix yields exactly zero. Direct eigenvalue iteration is avoided: a
/// nilpotent Jordan block perturbed by rounding has eigenvalues of order
/// `ε^{1/n}`.
pub fn spectral_radius_bound(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mul = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect())
            .collect()
    };
    let mut acc: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| f64::from(r == c)).collect()).collect();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    for k in 1..=n {
        let am = mul(m, &acc);
        let c = -(0..n).map(|i| am[i][i]).sum::<f64>() / k as f64;
        coeffs[n - k] = c;
        acc = am;
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    (1..=n)
        .map(|k| coeffs[n - k].abs().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        * 2.0
}

/// Evaluates the Szabó matrix at a point and direction; opaque function
/// values come from `func`.
pub fn evaluate_matrix(
    s: &SzaboMatrix,
    point: &[f64],
    direction: &[f64],
    func: impl Fn(&Atom) -> Option<f64>,
) -> Result<Vec<Vec<f64>>> {
    let lookup = |a: &Atom| match a {
        Atom::Var(i) => point.get(*i as usize).copied(),
        Atom::Dir(i) => direction.get(*i as usize).copied(),
        _ => func(a),
    };
    let n = s.dim();
    (0..n)
        .map(|r| (0..n).map(|c| s.get(r, c).eval(lookup)).collect())
        .collect()
}

/// Outcome of one randomized family-1 sample.
#[derive(Clone, Debug, Serialize)]
pub struct Family1Sample {
    pub f: [String; 3],
    pub planted: bool,
    pub cyclic_parallel: bool,
    pub affine_szabo: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Family1Report {
    pub seed: u64,
    pub sampling: String,
    pub samples: Vec<Family1Sample>,
    pub all_agree: bool,
    pub cyclic_count: usize,
    /// Generic member: only the first row of `S(X)` is nonzero.
    pub generic_single_row: bool,
    /// Generic member: `a11 = (∇_X Ric)(X, X)`.
    pub generic_a11_is_cubic_form: bool,
    /// Generic member: `det(λI − S) = λ³ − a11 λ²`.
    pub generic_char_poly_shape: bool,
    /// Generic member with `a11` imposed to vanish has char poly `λ³`.
    pub generic_forced_nilpotent: bool,
    pub generic_char_poly: String,
}

impl Family1Report {
    pub fn ok(&self) -> bool {
        self.all_agree
            && self.generic_single_row
            && self.generic_a11_is_cubic_form
            && self.generic_char_poly_shape
            && self.generic_forced_nilpotent
    }
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[usize], density: f64) -> Expr {
    let mut monomials = vec![Monomial::one()];
    for (a, &v) in vars.iter().enumerate() {
        monomials.push(Monomial::atom(Atom::var(v)));
        for &w in &vars[a..] {
            monomials.push(Monomial::from_factors([(Atom::var(v), 1), (Atom::var(w), 1)]));
        }
    }
    let terms = monomials.into_iter().filter_map(|m| {
        if rng.random_bool(density) {
            let c: i64 = rng.random_range(-2..=2);
            Some((m, Rational::from_integer(c.into())))
        } else {
            None
        }
    });
    Expr::from_terms(terms.collect::<Vec<_>>())
}

/// Checks that the affine Szabó property of the family-1 connections
/// coincides with cyclic parallelism of their Ricci tensor.
///
/// Symbolically, the generic member has a single nonzero row whose diagonal
/// entry is the Ricci cubic form, so forcing it to vanish leaves `λ³`. The
/// randomized half compares both predicates on sampled polynomial members:
/// even-numbered samples are drawn from the solution family
/// `f1 = p(x1)`, `f2 = c x3 + d`, `f3 = −c x2 + e`, odd-numbered samples have
/// arbitrary sparse polynomials of degree at most two with coefficients in
/// `[-2, 2]`.
pub fn verify_family1_theorem(samples: usize, seed: u64) -> Result<Family1Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for s in 0..samples {
        let planted = s % 2 == 0;
        let f = if planted {
            let c: i64 = rng.random_range(-3..=3);
            let d: i64 = rng.random_range(-2..=2);
            let e: i64 = rng.random_range(-2..=2);
            [
                random_poly(&mut rng, &[0], 0.6),
                Expr::var(2).scale_int(c) + Expr::int(d),
                Expr::var(1).scale_int(-c) + Expr::int(e),
            ]
        } else {
            [0.4, 0.4, 0.4].map(|p| random_poly(&mut rng, &[0, 1, 2], p))
        };
        let names = f.clone().map(|e| e.to_string());
        let a = analyze(&family1(f))?;
        out.push(Family1Sample {
            f: names,
            planted,
            cyclic_parallel: a.cyclic_parallel,
            affine_szabo: a.verdict.is_szabo,
        });
    }
    let all_agree = out.iter().all(|s| s.cyclic_parallel == s.affine_szabo);
    let cyclic_count = out.iter().filter(|s| s.cyclic_parallel).count();

    let generic = analyze(&family1(generic_functions()))?;
    let s = &generic.matrix;
    let single_row = (1..3).all(|r| (0..3).all(|c| s.get(r, c).is_zero()));
    let a11 = s.get(0, 0).clone();
    let a11_ok = a11 == generic.ricci_cubic_form && !a11.is_zero();
    let cp = &generic.verdict.char_poly;
    let shape = *cp == CharPoly::from_coeffs(vec![Expr::zero(), Expr::zero(), -&a11, Expr::one()]);
    let mut forced = s.0.clone();
    forced.set(0, 0, Expr::zero());
    let forced_ok = char_poly(&forced).is_pure_power();
    Ok(Family1Report {
        seed,
        sampling: "ChaCha8 seeded; even samples f1 = p(x1), f2 = c*x3 + d, f3 = -c*x2 + e; \
                   odd samples sparse degree <= 2 with coefficients in [-2, 2]"
            .to_string(),
        samples: out,
        all_agree,
        cyclic_count,
        generic_single_row: single_row,
        generic_a11_is_cubic_form: a11_ok,
        generic_char_poly_shape: shape,
        generic_forced_nilpotent: forced_ok,
        generic_char_poly: cp.to_string(),
    })
}

/// One sufficient case for the second family.
#[derive(Clone, Debug, Serialize)]
pub struct Family2Case {
    pub label: String,
    pub f: [String; 3],
    pub cyclic_parallel: bool,
    pub affine_szabo: bool,
    pub char_poly: String,
}

/// One branch of the case analysis: a product of off-diagonal entries that
/// must vanish under the stated restriction.
#[derive(Clone, Debug, Serialize)]
pub struct Family2Branch {
    pub label: String,
    pub product: String,
    pub vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Family2Report {
    pub cases: Vec<Family2Case>,
    pub branches: Vec<Family2Branch>,
    /// Under the cyclic-parallel shape the characteristic polynomial is
    /// `λ³ + c1 λ`: trace and constant term vanish identically.
    pub shape_odd_char_poly: bool,
    /// Under the cyclic-parallel shape, whether `b12 b23 b31 + b13 b21 b32`
    /// vanishes outright. Informational: the diagonal of `S(X)` is not zero
    /// for the general shape, so this sum is not the constant term.
    pub shape_triple_products_cancel: bool,
}

impl Family2Report {
    pub fn ok(&self) -> bool {
        self.cases.iter().all(|c| c.affine_szabo)
            && self.branches.iter().all(|b| b.vanishes)
            && self.shape_odd_char_poly
    }
}

fn func(name: &str, var: usize) -> Expr {
    Expr::func(name, &[var]).expect("valid function name")
}

/// The six sufficient conditions for the second family to be affine Szabó,
/// with opaque single-variable functions.
pub fn family2_sufficient_cases() -> Vec<(String, [Expr; 3])> {
    let z = Expr::zero;
    vec![
        ("f1 = 0, f2 = u(x2), f3 = v(x2) + t(x3)".into(), [z(), func("u", 1), func("v", 1) + func("t", 2)]),
        ("f2 = 0, f3 = t(x3), f1 = f(x1) + g(x3)".into(), [func("f", 0) + func("g", 2), z(), func("t", 2)]),
        ("f3 = 0, f1 = f(x1), f2 = h(x1) + u(x2)".into(), [func("f", 0), func("h", 0) + func("u", 1), z()]),
        ("f1 = 0, f2 = f(x1) + g(x2), f3 = 0".into(), [z(), func("f", 0) + func("g", 1), z()]),
        ("f2 = 0, f3 = v(x2) + t(x3), f1 = 0".into(), [z(), z(), func("v", 1) + func("t", 2)]),
        ("f3 = 0, f1 = f(x1) + g(x3), f2 = 0".into(), [func("f", 0) + func("g", 2), z(), z()]),
    ]
}

/// The cyclic-parallel shape `f1 = f(x1) + g(x3)`, `f2 = h(x1) + u(x2)`,
/// `f3 = v(x2) + t(x3)`.
pub fn family2_cyclic_shape() -> [Expr; 3] {
    [
        func("f", 0) + func("g", 2),
        func("h", 0) + func("u", 1),
        func("v", 1) + func("t", 2),
    ]
}

fn label(e: &[Expr; 3]) -> [String; 3] {
    e.clone().map(|x| x.to_string())
}

/// Verifies the sufficient conditions for the second family and the case
/// analysis behind them.
pub fn verify_family2_theorem() -> Result<Family2Report> {
    let mut cases = Vec::new();
    for (name, f) in family2_sufficient_cases() {
        let a = analyze(&family2(f.clone()))?;
        cases.push(Family2Case {
            label: name,
            f: label(&f),
            cyclic_parallel: a.cyclic_parallel,
            affine_szabo: a.verdict.is_szabo,
            char_poly: a.verdict.char_poly.to_string(),
        });
    }

    let shape = family2_cyclic_shape();
    let general = analyze(&family2(shape.clone()))?;
    let b = |r: usize, c: usize| general.matrix.get(r, c).clone();
    let triple = b(0, 1) * b(1, 2) * b(2, 0) + b(0, 2) * b(1, 0) * b(2, 1);
    let cp = &general.verdict.char_poly;
    let shape_odd_char_poly = general.matrix.0.trace().is_zero() && cp.coeff(0).is_zero() && cp.coeff(2).is_zero();

    // Restricting one f_i to zero leaves a single off-diagonal pair; each
    // sub-branch then kills that pair.
    let bind = |pairs: &[(&str, usize, Expr)]| {
        let mut bindings = Bindings::new();
        for (name, v, e) in pairs {
            bindings.insert(Atom::Func(crate::FuncAtom::new(name, &[*v]).expect("valid")), e.clone());
        }
        bindings
    };
    let zero = Expr::zero;
    type Restriction<'a> = (&'a str, Vec<(&'a str, usize, Expr)>, (usize, usize), Vec<(&'a str, Vec<(&'a str, usize, Expr)>)>);
    let restrictions: Vec<Restriction> = vec![
        (
            "f1 = 0",
            vec![("f", 0, zero()), ("g", 2, zero())],
            (0, 2),
            vec![
                ("f1 = 0 and d1 f2 = 0 (h = 0)", vec![("h", 0, zero())]),
                ("f1 = 0 and f3 = 0", vec![("v", 1, zero()), ("t", 2, zero())]),
            ],
        ),
        (
            "f2 = 0",
            vec![("h", 0, zero()), ("u", 1, zero())],
            (0, 1),
            vec![
                ("f2 = 0 and d2 f3 = 0 (v = 0)", vec![("v", 1, zero())]),
                ("f2 = 0 and f1 = 0", vec![("f", 0, zero()), ("g", 2, zero())]),
            ],
        ),
        (
            "f3 = 0",
            vec![("v", 1, zero()), ("t", 2, zero())],
            (1, 2),
            vec![
                ("f3 = 0 and d3 f1 = 0 (g = 0)", vec![("g", 2, zero())]),
                ("f3 = 0 and f2 = 0", vec![("h", 0, zero()), ("u", 1, zero())]),
            ],
        ),
    ];
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut branches = Vec::new();
    for (name, base, (pr, pc), subs) in restrictions {
        let restricted = general.matrix.0.try_map(|e| e.substitute(&bind(&base)))?;
        let r = |a: usize, c: usize| restricted.get(a, c).clone();
        let triple = r(0, 1) * r(1, 2) * r(2, 0) + r(0, 2) * r(1, 0) * r(2, 1);
        branches.push(Family2Branch {
            label: format!("{name}: b12 b23 b31 + b13 b21 b32"),
            product: triple.to_string(),
            vanishes: triple.is_zero(),
        });
        for &(r, c) in &pairs {
            if (r, c) == (pr, pc) {
                continue;
            }
            let prod = restricted.get(r, c) * restricted.get(c, r);
            branches.push(Family2Branch {
                label: format!("{name}: b{}{} b{}{}", r + 1, c + 1, c + 1, r + 1),
                product: prod.to_string(),
                vanishes: prod.is_zero(),
            });
        }
        for (sub_name, extra) in subs {
            let mut all = base.clone();
            all.extend(extra);
            let m = general.matrix.0.try_map(|e| e.substitute(&bind(&all)))?;
            let prod = m.get(pr, pc) * m.get(pc, pr);
            branches.push(Family2Branch {
                label: format!("{sub_name}: b{}{} b{}{}", pr + 1, pc + 1, pc + 1, pr + 1),
                product: prod.to_string(),
                vanishes: prod.is_zero(),
            });
        }
    }

    Ok(Family2Report {
        cases,
        branches,
        shape_odd_char_poly,
        shape_triple_products_cancel: triple.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_gives_pure_power() {
        let z = ExprMatrix::zeros(3);
        assert_eq!(char_poly_cofactor(&z), CharPoly::pure_power(3));
        assert_eq!(char_poly_faddeev_leverrier(&z), CharPoly::pure_power(3));
    }

    #[test]
    fn both_algorithms_agree_on_symbolic_matrix() {
        let m = ExprMatrix::from_fn(5, |r, c| Expr::var(r) * Expr::dir(c) + Expr::int((r as i64 - c as i64) % 3));
        assert_eq!(char_poly_cofactor(&m), char_poly_faddeev_leverrier(&m));
    }

    #[test]
    fn flat_connection_is_szabo() {
        let v = is_affine_szabo(&Connection::flat(3)).unwrap();
        assert!(v.is_szabo && v.trace_identity_ok);
        assert!(v.failing_coefficient.is_none());
    }

    #[test]
    fn spectral_bound_of_jordan_block_is_zero() {
        let m = vec![vec![0.0, 3.0, 1.0], vec![0.0, 0.0, -2.0], vec![0.0, 0.0, 0.0]];
        assert_eq!(spectral_radius_bound(&m), 0.0);
        let d = vec![vec![2.0, 0.0], vec![0.0, -1.0]];
        assert!(spectral_radius_bound(&d) >= 2.0);
    }

    #[test]
    fn char_poly_display() {
        let p = CharPoly::from_coeffs(vec![Expr::zero(), Expr::var(0), Expr::zero(), Expr::one()]);
        assert_eq!(p.to_string(), "lambda^3 + (x1)*lambda");
    }
}
