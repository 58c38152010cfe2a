use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::atom::{Atom, FuncAtom};
use crate::error::{Error, Result};

/// Exact coefficient field.
pub type Rational = num_rational::BigRational;

/// Power product of atoms, kept sorted by atom with positive exponents.
///
/// Monomials are ordered graded-lexicographically: total degree first,
/// then the larger exponent on the earliest atom wins.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    factors: SmallVec<[(Atom, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(a: Atom) -> Self {
        Monomial::power(a, 1)
    }

    pub fn power(a: Atom, exp: u32) -> Self {
        if exp == 0 {
            return Monomial::one();
        }
        let mut factors = SmallVec::new();
        factors.push((a, exp));
        Monomial { degree: exp, factors }
    }

    /// Builds a monomial from unsorted factors, merging repeats.
    pub fn from_factors(factors: impl IntoIterator<Item = (Atom, u32)>) -> Self {
        let mut v: SmallVec<[(Atom, u32); 4]> = factors.into_iter().filter(|f| f.1 > 0).collect();
        v.sort_unstable_by_key(|a| a.0);
        let mut out: SmallVec<[(Atom, u32); 4]> = SmallVec::with_capacity(v.len());
        for (a, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == a => last.1 += e,
                _ => out.push((a, e)),
            }
        }
        let degree = out.iter().map(|f| f.1).sum();
        Monomial { degree, factors: out }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.factors
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.factors
            .binary_search_by(|f| f.0.cmp(a))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn degree_in(&self, pred: impl Fn(&Atom) -> bool) -> u32 {
        self.factors.iter().filter(|f| pred(&f.0)).map(|f| f.1).sum()
    }

    /// Splits into the factors selected by `pred` and the remainder.
    pub fn split(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.factors.iter().partition(|f| pred(&f.0));
        (Monomial::from_sorted(a), Monomial::from_sorted(b))
    }

    fn from_sorted(factors: impl IntoIterator<Item = (Atom, u32)>) -> Self {
        let factors: SmallVec<[(Atom, u32); 4]> = factors.into_iter().collect();
        let degree = factors.iter().map(|f| f.1).sum();
        Monomial { degree, factors }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let (a, b) = (&self.factors, &other.factors);
        let mut out: SmallVec<[(Atom, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial {
            degree: self.degree + other.degree,
            factors: out,
        }
    }

    /// Divides out one power of `a`; the caller guarantees it is present.
    fn lower(&self, a: &Atom) -> Monomial {
        let mut out = self.clone();
        let pos = out
            .factors
            .binary_search_by(|f| f.0.cmp(a))
            .expect("atom present in monomial");
        if out.factors[pos].1 == 1 {
            out.factors.remove(pos);
        } else {
            out.factors[pos].1 -= 1;
        }
        out.degree -= 1;
        out
    }

    pub fn write(&self, out: &mut String, names: Option<&[String]>) {
        for (n, (a, e)) in self.factors.iter().enumerate() {
            if n > 0 {
                out.push('*');
            }
            a.write(out, names);
            if *e > 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.factors.iter().zip(other.factors.iter()) {
                if a.0 != b.0 {
                    // The monomial carrying the earlier atom is the larger one.
                    return b.0.cmp(&a.0);
                }
                if a.1 != b.1 {
                    return a.1.cmp(&b.1);
                }
            }
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut s = String::new();
        self.write(&mut s, None);
        f.write_str(&s)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact polynomial over [`Atom`]s with rational coefficients.
///
/// The term list is sorted ascending by monomial and never holds a zero
/// coefficient, so structural equality is mathematical equality when all
/// atoms (including every function partial) are treated as independent
/// indeterminates. Concrete function choices can make a nonzero canonical
/// form vanish; substitute them first when checking a specific example.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: Vec<(Monomial, Rational)>,
}

// Products with more candidate terms than this accumulate in a hash map
// instead of a sorted buffer.
const HASH_MUL_THRESHOLD: usize = 2048;

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::from_rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Expr::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(c: Rational) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr { terms: vec![(m, c)] }
        }
    }

    pub fn atom(a: Atom) -> Self {
        Expr::term(Monomial::atom(a), Rational::one())
    }

    /// Chart coordinate `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        Expr::atom(Atom::var(i))
    }

    /// Direction parameter `α_{i+1}`.
    pub fn dir(i: usize) -> Self {
        Expr::atom(Atom::dir(i))
    }

    pub fn lambda() -> Self {
        Expr::atom(Atom::Lambda)
    }

    /// Opaque function `name(x_{a+1}, ...)` of the given chart variables.
    pub fn func(name: &str, args: &[usize]) -> Result<Self> {
        Ok(Expr::atom(Atom::Func(FuncAtom::new(name, args)?)))
    }

    /// Canonicalizes an arbitrary list of terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut v: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Expr::merge_sorted(v)
    }

    fn merge_sorted(v: Vec<(Monomial, Rational)>) -> Self {
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        Expr { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.factors().iter().map(|f| f.0))
            .collect()
    }

    pub fn contains_atom(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.terms
            .iter()
            .any(|(m, _)| m.factors().iter().any(|f| pred(&f.0)))
    }

    /// Largest chart-variable index referenced by a variable or function.
    pub fn max_var(&self) -> Option<usize> {
        self.atoms().iter().filter_map(|a| a.max_var()).max()
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Expr {
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    /// Multiplies by `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Expr {
        if c.is_zero() || self.is_zero() {
            return Expr::zero();
        }
        // Multiplying every monomial by a fixed one preserves the order.
        Expr {
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn add_ref(&self, other: &Expr, negate: bool) -> Expr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Expr { terms: out }
    }

    fn mul_ref(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let count = self.terms.len() * other.terms.len();
        if count <= HASH_MUL_THRESHOLD {
            let mut v = Vec::with_capacity(count);
            for (ma, ca) in &self.terms {
                for (mb, cb) in &other.terms {
                    v.push((ma.mul(mb), ca * cb));
                }
            }
            return Expr::from_terms(v);
        }
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|k| *k += &c)
                    .or_insert(c);
            }
        }
        let mut v: Vec<(Monomial, Rational)> = acc.into_iter().filter(|t| !t.1.is_zero()).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Expr { terms: v }
    }

    /// Partial derivative with respect to chart variable `x_{var+1}`.
    ///
    /// Direction parameters and λ are constants; an opaque partial of a
    /// function that depends on `var` advances to the next partial.
    pub fn diff(&self, var: usize) -> Expr {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for &(a, e) in m.factors() {
                let replacement = match a {
                    Atom::Var(v) if v as usize == var => None,
                    Atom::Func(f) => match f.differentiate(var) {
                        Some(g) => Some(Atom::Func(g)),
                        None => continue,
                    },
                    _ => continue,
                };
                let lowered = m.lower(&a);
                let mono = match replacement {
                    None => lowered,
                    Some(b) => lowered.mul(&Monomial::atom(b)),
                };
                out.push((mono, c * Rational::from_integer(BigInt::from(e))));
            }
        }
        Expr::from_terms(out)
    }

    /// Applies `f` to every atom and re-canonicalizes.
    pub fn map_atoms(&self, mut f: impl FnMut(Atom) -> Result<Atom>) -> Result<Expr> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = Vec::with_capacity(m.factors().len());
            for &(a, e) in m.factors() {
                factors.push((f(a)?, e));
            }
            out.push((Monomial::from_factors(factors), c.clone()));
        }
        Ok(Expr::from_terms(out))
    }

    /// Replaces atoms by expressions.
    ///
    /// A binding for a function partial also covers every higher partial of
    /// the same function, obtained by differentiating the binding. An
    /// occurring partial that can only be reached by integrating a binding is
    /// reported as [`Error::MissingDerivativeBinding`].
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut resolved: HashMap<Atom, Option<Expr>> = HashMap::new();
        let mut powers: HashMap<(Atom, u32), Expr> = HashMap::new();
        let mut acc = Expr::zero();
        let mut plain = Vec::new();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut value = Expr::one();
            for &(a, e) in m.factors() {
                if let std::collections::hash_map::Entry::Vacant(e) = resolved.entry(a) {
                    let r = bindings.resolve(&a)?;
                    e.insert(r);
                }
                match &resolved[&a] {
                    None => kept.push((a, e)),
                    Some(b) => {
                        let p = powers.entry((a, e)).or_insert_with(|| b.pow(e));
                        value = &value * &*p;
                    }
                }
            }
            let rest = Monomial::from_sorted(kept);
            if value.is_one() {
                plain.push((rest, c.clone()));
            } else {
                acc += value.mul_term(&rest, c);
            }
        }
        Ok(acc + Expr::from_terms(plain))
    }

    /// Evaluates in floating point; every occurring atom must have a value.
    pub fn eval(&self, lookup: impl Fn(&Atom) -> Option<f64>) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (a, e) in m.factors() {
                let v = lookup(a).ok_or_else(|| Error::UnboundAtom(a.to_string()))?;
                t *= v.powi(*e as i32);
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_map(&self, point: &HashMap<Atom, f64>) -> Result<f64> {
        self.eval(|a| point.get(a).copied())
    }

    /// Groups terms by the part of their monomial selected by `pred`.
    ///
    /// `e == Σ key * value` over the returned map, and no value contains a
    /// selected atom.
    pub fn coefficients_in(&self, pred: impl Fn(&Atom) -> bool) -> BTreeMap<Monomial, Expr> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (key, rest) = m.split(&pred);
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, v)| (k, Expr::from_terms(v)))
            .collect()
    }

    /// Coefficient list in powers of λ, lowest first.
    pub fn lambda_coefficients(&self) -> Vec<Expr> {
        let groups = self.coefficients_in(Atom::is_lambda);
        let top = groups.keys().map(|k| k.degree()).max().unwrap_or(0) as usize;
        let mut out = vec![Expr::zero(); top + 1];
        for (k, v) in groups {
            out[k.degree() as usize] = v;
        }
        out
    }

    /// Maximum total degree in the selected atoms, `None` for zero.
    pub fn degree_in(&self, pred: impl Fn(&Atom) -> bool) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree_in(&pred)).max()
    }

    /// Every term has degree exactly `d` in the selected atoms.
    pub fn is_homogeneous_in(&self, pred: impl Fn(&Atom) -> bool, d: u32) -> bool {
        self.terms.iter().all(|(m, _)| m.degree_in(&pred) == d)
    }

    /// Whether `self == k * other` for some nonzero rational `k`.
    pub fn proportional_to(&self, other: &Expr) -> Option<Rational> {
        if self.is_zero() || other.is_zero() || self.len() != other.len() {
            return None;
        }
        let k = &self.terms[0].1 / &other.terms[0].1;
        let same = self
            .terms
            .iter()
            .zip(other.terms.iter())
            .all(|(a, b)| a.0 == b.0 && a.1 == &b.1 * &k);
        same.then_some(k)
    }

    /// Prints with custom chart-variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        self.render(Some(names))
    }

    fn render(&self, names: Option<&[String]>) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if m.is_one() {
                s.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    s.push_str(&mag.to_string());
                    s.push('*');
                }
                m.write(&mut s, names);
            }
        }
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b, false));
binop!(Sub, sub, |a, b| a.add_ref(b, true));
binop!(Mul, mul, |a, b| a.mul_ref(b));

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = self.add_ref(rhs, false);
    }
}

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        if self.is_zero() {
            *self = rhs;
        } else {
            *self = self.add_ref(&rhs, false);
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = self.add_ref(rhs, true);
    }
}

impl SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self = self.add_ref(&rhs, true);
    }
}

impl MulAssign<&Expr> for Expr {
    fn mul_assign(&mut self, rhs: &Expr) {
        *self = self.mul_ref(rhs);
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(mut self) -> Expr {
        for t in &mut self.terms {
            t.1 = -std::mem::take(&mut t.1);
        }
        self
    }
}

impl Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        // Gather first, canonicalize once.
        Expr::from_terms(iter.flat_map(|e| e.terms))
    }
}

impl<'a> Sum<&'a Expr> for Expr {
    fn sum<I: Iterator<Item = &'a Expr>>(iter: I) -> Expr {
        Expr::from_terms(iter.flat_map(|e| e.terms.iter().cloned()))
    }
}

impl Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |acc, e| acc * e)
    }
}

/// Substitution map from atoms to expressions.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    map: BTreeMap<Atom, Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn with(mut self, atom: Atom, value: Expr) -> Self {
        self.insert(atom, value);
        self
    }

    pub fn insert(&mut self, atom: Atom, value: Expr) {
        self.map.insert(atom, value);
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn resolve(&self, atom: &Atom) -> Result<Option<Expr>> {
        if let Some(e) = self.map.get(atom) {
            return Ok(Some(e.clone()));
        }
        let Atom::Func(target) = atom else {
            return Ok(None);
        };
        // Highest-order bound partial that reaches the target.
        type Candidate<'a> = (&'a FuncAtom, Vec<(usize, u8)>, &'a Expr);
        let mut best: Option<Candidate<'_>> = None;
        let mut same_function = false;
        for (k, v) in &self.map {
            let Atom::Func(src) = k else { continue };
            if !src.same_function(target) {
                continue;
            }
            same_function = true;
            if let Some(steps) = src.derivatives_towards(target) {
                if best.as_ref().is_none_or(|b| src.order() > b.0.order()) {
                    best = Some((src, steps, v));
                }
            }
        }
        match best {
            Some((_, steps, value)) => {
                let mut e = value.clone();
                for (var, k) in steps {
                    for _ in 0..k {
                        e = e.diff(var);
                    }
                }
                Ok(Some(e))
            }
            None if same_function => Err(Error::MissingDerivativeBinding(atom.to_string())),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(name: &str, arg: usize) -> Expr {
        Expr::func(name, &[arg]).unwrap()
    }

    #[test]
    fn additive_inverse_is_zero() {
        let x1 = Expr::var(0);
        let e = &x1 + &(-&x1);
        assert!(e.is_zero());
        assert_eq!(e.to_string(), "0");
    }

    #[test]
    fn difference_of_squares() {
        let (a, b) = (f("f", 0), f("g", 2));
        let lhs = (&a + &b) * (&a - &b);
        assert_eq!(lhs, a.pow(2) - b.pow(2));
        assert_eq!(lhs.to_string(), "f(x1)^2 - g(x3)^2");
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let e = Expr::var(1) + Expr::var(2).pow(2);
        let by_mul = &e * &e;
        let expected = Expr::var(1).pow(2)
            + Expr::var(1) * Expr::var(2).pow(2) * Expr::int(2)
            + Expr::var(2).pow(4);
        assert_eq!(e.pow(2), by_mul);
        assert_eq!(e.pow(2), expected);
        assert!(e.pow(0).is_one());
    }

    #[test]
    fn diff_power_rule_and_opaque() {
        let e = Expr::var(1) + Expr::var(2).pow(2);
        assert_eq!(e.diff(2), Expr::var(2).scale_int(2));
        let p = f("f", 0) * f("g", 2);
        assert_eq!(p.diff(0).to_string(), "d1(f)(x1)*g(x3)");
        assert!(Expr::dir(0).diff(0).is_zero());
        assert!(Expr::lambda().diff(0).is_zero());
    }

    #[test]
    fn substitution_through_derivatives() {
        let fa = Atom::Func(FuncAtom::new("f", &[0]).unwrap());
        let fp = Expr::atom(fa).diff(0);
        let b = Bindings::new().with(fa, Expr::var(0).pow(2));
        assert_eq!(fp.substitute(&b).unwrap(), Expr::var(0).scale_int(2));

        // A binding for f' cannot produce f.
        let fpa = *fp.atoms().iter().next().unwrap();
        let b = Bindings::new().with(fpa, Expr::one());
        let e = Expr::atom(fa) + fp.clone();
        assert!(matches!(e.substitute(&b), Err(Error::MissingDerivativeBinding(_))));
        assert_eq!(fp.diff(0).substitute(&b).unwrap(), Expr::zero());
    }

    #[test]
    fn substitution_leaves_unbound_atoms() {
        let fa = Atom::Func(FuncAtom::new("f", &[0]).unwrap());
        let ga = Atom::Func(FuncAtom::new("g", &[2]).unwrap());
        let e = Expr::atom(fa) + Expr::atom(ga);
        let b = Bindings::new().with(fa, Expr::var(0)).with(ga, Expr::zero());
        assert_eq!(e.substitute(&b).unwrap(), Expr::var(0));
        let b = Bindings::new().with(fa, Expr::var(0));
        assert_eq!(e.substitute(&b).unwrap(), Expr::var(0) + Expr::atom(ga));
    }

    #[test]
    fn numeric_evaluation() {
        let e = Expr::var(1) + Expr::var(2).pow(2);
        let v = e
            .eval(|a| match a {
                Atom::Var(1) => Some(1.0),
                Atom::Var(2) => Some(2.0),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, 5.0);
        assert_eq!(Expr::zero().eval(|_| None).unwrap(), 0.0);
        let p = f("f", 0) * Expr::dir(1);
        let v = p
            .eval(|a| match a {
                Atom::Func(_) => Some(3.0),
                Atom::Dir(1) => Some(-2.0),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, -6.0);
        assert!(matches!(p.eval(|_| None), Err(Error::UnboundAtom(_))));
    }

    #[test]
    fn lambda_coefficients_are_dense() {
        let e = Expr::lambda().pow(3) - Expr::var(0) * Expr::lambda();
        let c = e.lambda_coefficients();
        assert_eq!(c.len(), 4);
        assert!(c[0].is_zero() && c[2].is_zero());
        assert_eq!(c[1], -Expr::var(0));
        assert!(c[3].is_one());
    }

    #[test]
    fn printing_is_graded_and_signed() {
        let e = Expr::var(0) * Expr::var(3).scale_int(-2) + Expr::ratio(3, 2) - Expr::var(1);
        assert_eq!(e.to_string(), "-2*x1*x4 - x2 + 3/2");
    }

    #[test]
    fn proportional() {
        let a = Expr::var(0) + Expr::var(1).scale_int(2);
        let b = a.scale_int(-3);
        assert_eq!(b.proportional_to(&a), Some(Rational::from_integer((-3).into())));
        assert_eq!((&a + &Expr::one()).proportional_to(&a), None);
    }
}
