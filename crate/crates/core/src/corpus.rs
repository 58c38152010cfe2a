//! Reference connections with known verdicts, the published forms of the
//! cyclic-parallel equations, and a driver that checks all of it.

use serde_json::{json, Value};

use crate::check::{all_ok, Check};
use crate::connection::{family1, family2, generic_functions, Connection, Family};
use crate::error::Result;
use crate::riemext::{extension_report, riemannian_extension};
use crate::symexpr::{Expr, Monomial, Rational};
use crate::szabo::{analyze, family2_cyclic_shape, verify_family1_theorem, verify_family2_theorem, CharPoly};
use crate::tensorcalc::{
    curvature, cyclic_parallel_pde_system, is_cyclic_parallel, PdeEquation,
};

/// A connection together with the verdicts it is known to have.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub connection: Connection,
    pub cyclic_parallel: bool,
    pub affine_szabo: bool,
}

/// The three-dimensional reference connections.
pub fn corpus() -> Vec<CorpusEntry> {
    let x = Expr::var;
    vec![
        CorpusEntry {
            name: "flat",
            summary: "all Christoffel symbols zero",
            connection: Connection::flat(3),
            cyclic_parallel: true,
            affine_szabo: true,
        },
        CorpusEntry {
            name: "family1-rotation",
            summary: "first family, f = (0, -x3, x2)",
            connection: rotation(),
            cyclic_parallel: true,
            affine_szabo: true,
        },
        CorpusEntry {
            name: "family1-linear",
            summary: "first family, f = (x1, 2*x3, -2*x2)",
            connection: family1_linear(),
            cyclic_parallel: true,
            affine_szabo: true,
        },
        CorpusEntry {
            name: "family2-f1-zero",
            summary: "second family, f = (0, x2, x2 + x3^2)",
            connection: family2_f1_zero(),
            cyclic_parallel: true,
            affine_szabo: true,
        },
        CorpusEntry {
            name: "family2-f3-zero",
            summary: "second family, f = (x1^2, x1 + x2, 0)",
            connection: family2([x(0).pow(2), x(0) + x(1), Expr::zero()]),
            cyclic_parallel: true,
            affine_szabo: true,
        },
        CorpusEntry {
            name: "family2-quadratic",
            summary: "second family, f = (x1^2, x1 + x2, x2 + x3^2); cyclic parallel, not Szabó",
            connection: family2_quadratic(),
            cyclic_parallel: true,
            affine_szabo: false,
        },
    ]
}

pub fn rotation() -> Connection {
    let x = Expr::var;
    family1([Expr::zero(), -x(2), x(1)])
}

pub fn family1_linear() -> Connection {
    let x = Expr::var;
    family1([x(0), x(2).scale_int(2), x(1).scale_int(-2)])
}

pub fn family2_f1_zero() -> Connection {
    let x = Expr::var;
    family2([Expr::zero(), x(1), x(1) + x(2).pow(2)])
}

pub fn family2_quadratic() -> Connection {
    let x = Expr::var;
    family2([x(0).pow(2), x(0) + x(1), x(1) + x(2).pow(2)])
}

/// Six-dimensional product of two Szabó factors.
pub fn product_example() -> Result<Connection> {
    rotation().direct_sum(&family2_f1_zero())
}

/// `∂^{ks} f_i` for the generic `f_i(x1, x2, x3)`.
fn partial(i: usize, ks: &[usize]) -> Expr {
    let [f1, f2, f3] = generic_functions();
    let mut e = [f1, f2, f3][i].clone();
    for &k in ks {
        e = e.diff(k);
    }
    e
}

/// The nine equations for the first family as they are usually printed.
pub fn printed_family1_system() -> Vec<Expr> {
    let f = |i: usize| partial(i, &[]);
    let d = partial;
    let two = |e: Expr| e.scale_int(2);
    let four = |e: Expr| e.scale_int(4);
    vec![
        d(2, &[2, 2]) + two(f(2) * d(2, &[2])),
        d(1, &[1, 1]) + two(f(1) * d(1, &[1])),
        d(0, &[2, 2]) + four(f(2) * d(2, &[0])) - two(f(2) * d(0, &[2])),
        d(0, &[1, 1]) + four(f(1) * d(1, &[0])) - two(f(1) * d(0, &[1])),
        d(2, &[0, 0]) - d(0, &[0, 2]) - f(0) * d(2, &[0]) + f(0) * d(0, &[2]),
        d(1, &[0, 0]) - d(0, &[0, 1]) - f(0) * d(1, &[0]) + f(0) * d(0, &[1]),
        d(2, &[1, 1]) + two(d(1, &[1, 2])) + two(f(1) * d(1, &[2])) + two(f(2) * d(1, &[1])) + two(f(1) * d(2, &[1])),
        d(1, &[2, 2]) + two(d(2, &[1, 2])) + two(f(2) * d(2, &[1])) + two(f(2) * d(1, &[2])) + two(f(1) * d(2, &[2])),
        four(f(2) * d(1, &[0])) + four(f(1) * d(2, &[0])) - two(f(2) * d(0, &[1])) - two(f(1) * d(0, &[2]))
            + two(d(0, &[1, 2])),
    ]
}

/// The nine equations for the second family as they are usually printed.
pub fn printed_family2_system() -> Vec<Expr> {
    let f = |i: usize| partial(i, &[]);
    let d = partial;
    let two = |e: Expr| e.scale_int(2);
    vec![
        d(0, &[0, 1]),
        d(0, &[1, 2]),
        d(1, &[0, 2]),
        d(1, &[1, 2]),
        d(2, &[0, 1]),
        d(2, &[0, 2]),
        d(0, &[1, 1]) - two(f(0) * d(1, &[2])),
        d(2, &[0, 0]) - two(f(2) * d(0, &[1])),
        d(1, &[2, 2]) - two(f(1) * d(2, &[0])),
    ]
}

/// One matched pair: reference index, the derived α-monomial, and the scale
/// `derived = scale · reference`.
#[derive(Clone, Debug)]
pub struct SystemPair {
    pub reference: usize,
    pub monomial: Monomial,
    pub scale: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct SystemComparison {
    pub pairs: Vec<SystemPair>,
    /// Derived equations proportional to no reference equation.
    pub unmatched_derived: Vec<PdeEquation>,
    /// Reference equations no derived equation is proportional to.
    pub unmatched_reference: Vec<usize>,
}

impl SystemComparison {
    pub fn ok(&self) -> bool {
        self.unmatched_derived.is_empty() && self.unmatched_reference.is_empty()
    }
}

/// Matches derived equations to reference ones up to a nonzero rational
/// factor each, one-to-one.
pub fn compare_systems(derived: &[PdeEquation], reference: &[Expr]) -> SystemComparison {
    let mut used = vec![false; reference.len()];
    let mut out = SystemComparison::default();
    for eq in derived.iter().filter(|e| !e.lhs.is_zero()) {
        let hit = reference
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .find_map(|(i, r)| eq.lhs.proportional_to(r).map(|s| (i, s)));
        match hit {
            Some((i, scale)) => {
                used[i] = true;
                out.pairs.push(SystemPair {
                    reference: i,
                    monomial: eq.monomial.clone(),
                    scale,
                });
            }
            None => out.unmatched_derived.push(eq.clone()),
        }
    }
    out.unmatched_reference = (0..reference.len()).filter(|&i| !used[i]).collect();
    out
}

fn comparison_check(name: &str, family: Family, reference: &[Expr]) -> Result<Check> {
    let cmp = compare_systems(&cyclic_parallel_pde_system(family)?, reference);
    Ok(Check::from_bool(name, cmp.ok(), || {
        let derived: Vec<String> = cmp
            .unmatched_derived
            .iter()
            .map(|e| format!("{}: {}", e.monomial, e.lhs))
            .collect();
        format!(
            "unmatched derived [{}]; unmatched reference {:?}",
            derived.join("; "),
            cmp.unmatched_reference.iter().map(|i| i + 1).collect::<Vec<_>>()
        )
    }))
}

/// Invariants every Szabó computation must satisfy exactly: `S(X)X = 0`,
/// cubic homogeneity, the trace identity, first Bianchi and antisymmetry of
/// the curvature.
pub fn invariant_checks(c: &Connection) -> Result<Vec<Check>> {
    let n = c.dim();
    let a = analyze(c)?;
    let r = curvature(c)?;
    let mut checks = Vec::new();
    let sx = a.matrix.applied_to_direction();
    checks.push(Check::from_first_failure(
        "S(X)X = 0",
        sx.iter().position(|e| !e.is_zero()).map(|i| format!("component {} = {}", i + 1, sx[i])),
    ));
    checks.push(Check::from_bool("S is cubic in X", a.matrix.is_cubic(), || {
        "an entry is not homogeneous of degree 3 in the direction".into()
    }));
    checks.push(Check::from_bool("trace S(X) = (nabla_X Ric)(X, X)", a.verdict.trace_identity_ok, || {
        format!("trace {} vs {}", a.matrix.matrix().trace(), a.ricci_cubic_form)
    }));
    let mut bianchi = None;
    let mut antisym = None;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if bianchi.is_none() {
                        let s = r.get(i, j, k, l) + r.get(i, k, l, j) + r.get(i, l, j, k);
                        if !s.is_zero() {
                            bianchi = Some(format!("({},{},{},{}): {s}", i + 1, j + 1, k + 1, l + 1));
                        }
                    }
                    if antisym.is_none() && *r.get(i, j, k, l) != -r.get(i, j, l, k) {
                        antisym = Some(format!("({},{},{},{})", i + 1, j + 1, k + 1, l + 1));
                    }
                }
            }
        }
    }
    checks.push(Check::from_first_failure("first Bianchi identity", bianchi));
    checks.push(Check::from_first_failure("curvature antisymmetry", antisym));
    Ok(checks)
}

/// Expected nonzero base block of the extension of [`family1_linear`],
/// upper triangle.
pub fn family1_linear_metric() -> Vec<(usize, usize, Expr)> {
    let x = Expr::var;
    vec![
        (0, 0, (x(0) * x(3)).scale_int(-2)),
        (0, 1, (x(2) * x(3)).scale_int(-4)),
        (0, 2, (x(1) * x(3)).scale_int(4)),
    ]
}

/// Options for [`verify_all`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    /// Skip the six-dimensional extension computations.
    pub skip_extensions: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            samples: 50,
            skip_extensions: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        all_ok(&self.checks)
    }

    pub fn to_json(&self) -> Value {
        json!({"ok": self.ok(), "checks": self.checks})
    }
}

/// Runs every reference check: corpus verdicts, both equation systems, the
/// family theorems, the product example and the extensions.
pub fn verify_all(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let entries = corpus();
    for e in &entries {
        let a = analyze(&e.connection)?;
        checks.push(Check::from_bool(format!("{}: cyclic parallel = {}", e.name, e.cyclic_parallel), a.cyclic_parallel == e.cyclic_parallel, || {
            format!("got {}", a.cyclic_parallel)
        }));
        checks.push(Check::from_bool(format!("{}: affine Szabó = {}", e.name, e.affine_szabo), a.verdict.is_szabo == e.affine_szabo, || {
            format!("char poly {}", a.verdict.char_poly)
        }));
        for c in invariant_checks(&e.connection)? {
            checks.push(Check { name: format!("{}: {}", e.name, c.name), ..c });
        }
    }

    checks.push(comparison_check("first family: derived system equals printed system", Family::Family1, &printed_family1_system())?);
    checks.push(comparison_check("second family: derived system equals printed system", Family::Family2, &printed_family2_system())?);
    let shape = family2(family2_cyclic_shape());
    let v = is_cyclic_parallel(&shape)?;
    checks.push(Check::from_bool("second family: separated shape is cyclic parallel", v.holds, || {
        v.witness.map(|w| format!("{:?}: {}", w.indices, w.expr)).unwrap_or_default()
    }));

    let f1 = verify_family1_theorem(opts.samples, opts.seed)?;
    checks.push(Check::from_bool(
        format!("first family: Szabó iff cyclic parallel ({} samples, seed {})", opts.samples, opts.seed),
        f1.ok(),
        || format!("{f1:?}"),
    ));
    let f2 = verify_family2_theorem()?;
    checks.push(Check::from_bool("second family: sufficient cases are Szabó", f2.ok(), || {
        let bad: Vec<&str> = f2
            .cases
            .iter()
            .filter(|c| !c.affine_szabo)
            .map(|c| c.label.as_str())
            .chain(f2.branches.iter().filter(|b| !b.vanishes).map(|b| b.label.as_str()))
            .collect();
        bad.join(", ")
    }));

    let product = analyze(&product_example()?)?;
    checks.push(Check::from_bool(
        "product of Szabó factors is Szabó in dimension 6",
        product.verdict.char_poly == CharPoly::pure_power(6),
        || product.verdict.char_poly.to_string(),
    ));

    if !opts.skip_extensions {
        let metric = riemannian_extension(&family1_linear())?;
        let mut mismatch = None;
        for (i, j, e) in family1_linear_metric() {
            if *metric.get(i, j) != e {
                mismatch = Some(format!("g({},{}) = {}", i + 1, j + 1, metric.get(i, j)));
            }
        }
        checks.push(Check::from_first_failure("family1-linear: extension metric components", mismatch));
        for e in &entries {
            let rep = extension_report(&e.connection)?;
            for c in rep.lemma.checks.iter().chain(&rep.blocks.checks) {
                checks.push(Check {
                    name: format!("{} extension: {}", e.name, c.name),
                    ..c.clone()
                });
            }
            checks.push(Check::from_bool(
                format!("{} extension: pseudo-Szabó = {}", e.name, e.affine_szabo),
                rep.extension.is_szabo == e.affine_szabo && rep.transfer_holds(),
                || rep.extension.notes.clone(),
            ));
        }
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_systems_match_derived() {
        for (fam, printed) in [
            (Family::Family1, printed_family1_system()),
            (Family::Family2, printed_family2_system()),
        ] {
            let cmp = compare_systems(&cyclic_parallel_pde_system(fam).unwrap(), &printed);
            assert!(cmp.ok(), "{fam}: {cmp:?}");
            assert_eq!(cmp.pairs.len(), 9);
        }
    }

    #[test]
    fn a_sign_flip_inside_one_equation_is_caught() {
        let mut printed = printed_family2_system();
        printed[6] = partial(0, &[1, 1]) + partial(0, &[]) * partial(1, &[2]).scale_int(2);
        let cmp = compare_systems(&cyclic_parallel_pde_system(Family::Family2).unwrap(), &printed);
        assert!(!cmp.ok());
        assert_eq!(cmp.unmatched_reference, vec![6]);
    }

    #[test]
    fn corpus_invariants_hold() {
        for e in corpus() {
            for c in invariant_checks(&e.connection).unwrap() {
                assert!(c.ok, "{}: {:?}", e.name, c);
            }
        }
    }
}
