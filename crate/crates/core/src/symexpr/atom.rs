use std::fmt;

use crate::error::{Error, Result};

/// Number of chart variables an opaque function may depend on.
pub const MAX_FUNC_ARGS: usize = 16;

/// Maximum length in bytes of an opaque function name.
pub const MAX_FUNC_NAME: usize = 12;

/// Short ASCII identifier stored inline so that atoms stay `Copy`.
///
/// Zero padding makes the derived ordering agree with string ordering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncName([u8; MAX_FUNC_NAME]);

impl FuncName {
    pub fn new(name: &str) -> Result<Self> {
        let bytes = name.as_bytes();
        let valid = !bytes.is_empty()
            && bytes.len() <= MAX_FUNC_NAME
            && bytes[0].is_ascii_alphabetic()
            && bytes.iter().all(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if !valid {
            return Err(Error::InvalidName(name.to_string()));
        }
        let mut buf = [0u8; MAX_FUNC_NAME];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(FuncName(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|b| *b == 0).unwrap_or(MAX_FUNC_NAME);
        // Only ASCII is ever stored.
        std::str::from_utf8(&self.0[..len]).unwrap_or("?")
    }
}

impl fmt::Debug for FuncName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A partial derivative of an opaque smooth function.
///
/// `deriv[v]` is the number of times the function has been differentiated
/// with respect to chart variable `v`. Only variables in `args` may carry a
/// nonzero count, so mixed partials commute by construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncAtom {
    name: FuncName,
    order: u16,
    deriv: [u8; MAX_FUNC_ARGS],
    args: u16,
}

impl FuncAtom {
    /// The underived function `name(args...)`.
    pub fn new(name: &str, args: &[usize]) -> Result<Self> {
        let name = FuncName::new(name)?;
        if args.is_empty() {
            return Err(Error::InvalidFunction(format!(
                "{} must depend on at least one variable",
                name.as_str()
            )));
        }
        let mut mask = 0u16;
        for &a in args {
            if a >= MAX_FUNC_ARGS {
                return Err(Error::InvalidFunction(format!(
                    "{} depends on x{}, beyond the supported x1..x{}",
                    name.as_str(),
                    a + 1,
                    MAX_FUNC_ARGS
                )));
            }
            mask |= 1 << a;
        }
        Ok(FuncAtom {
            name,
            order: 0,
            deriv: [0; MAX_FUNC_ARGS],
            args: mask,
        })
    }

    pub fn name(&self) -> &str {
        self.name.as_str()
    }

    /// Total derivative order.
    pub fn order(&self) -> u16 {
        self.order
    }

    pub fn depends_on(&self, var: usize) -> bool {
        var < MAX_FUNC_ARGS && self.args & (1 << var) != 0
    }

    /// Indices of the chart variables the function depends on, ascending.
    pub fn args(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_FUNC_ARGS).filter(move |&v| self.depends_on(v))
    }

    pub fn arg_count(&self) -> usize {
        self.args.count_ones() as usize
    }

    /// How many times this atom has been differentiated in `var`.
    pub fn deriv_count(&self, var: usize) -> u8 {
        if var < MAX_FUNC_ARGS {
            self.deriv[var]
        } else {
            0
        }
    }

    /// The underived function this atom is a partial of.
    pub fn base(&self) -> FuncAtom {
        FuncAtom {
            order: 0,
            deriv: [0; MAX_FUNC_ARGS],
            ..*self
        }
    }

    pub fn same_function(&self, other: &FuncAtom) -> bool {
        self.name == other.name && self.args == other.args
    }

    /// `∂_var` of this atom, or `None` when the function ignores `var`.
    pub fn differentiate(&self, var: usize) -> Option<FuncAtom> {
        if !self.depends_on(var) {
            return None;
        }
        let mut out = *self;
        out.deriv[var] = out.deriv[var].checked_add(1).expect("derivative order overflow");
        out.order += 1;
        Some(out)
    }

    /// Partial derivative with the given per-variable counts.
    pub fn with_derivatives(&self, counts: &[(usize, u8)]) -> Result<FuncAtom> {
        let mut out = self.base();
        for &(var, k) in counts {
            if !self.depends_on(var) {
                return Err(Error::InvalidFunction(format!(
                    "{} does not depend on x{}",
                    self.name(),
                    var + 1
                )));
            }
            out.deriv[var] += k;
            out.order += k as u16;
        }
        Ok(out)
    }

    /// Remaining derivatives needed to go from `self` to `target`, if
    /// `target` is a (possibly equal) higher partial of `self`.
    pub fn derivatives_towards(&self, target: &FuncAtom) -> Option<Vec<(usize, u8)>> {
        if !self.same_function(target) {
            return None;
        }
        let mut steps = Vec::new();
        for v in 0..MAX_FUNC_ARGS {
            let (a, b) = (self.deriv[v], target.deriv[v]);
            if a > b {
                return None;
            }
            if b > a {
                steps.push((v, b - a));
            }
        }
        Some(steps)
    }

    /// Same function with every argument index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Result<FuncAtom> {
        let mut out = *self;
        out.args = 0;
        out.deriv = [0; MAX_FUNC_ARGS];
        for v in self.args() {
            let w = v + offset;
            if w >= MAX_FUNC_ARGS {
                return Err(Error::InvalidFunction(format!(
                    "{} would depend on x{}, beyond the supported x1..x{}",
                    self.name(),
                    w + 1,
                    MAX_FUNC_ARGS
                )));
            }
            out.args |= 1 << w;
            out.deriv[w] = self.deriv[v];
        }
        Ok(out)
    }
}

/// An indeterminate of the expression ring.
///
/// The derived order (kind, then name, then derivative order, then
/// arguments) fixes the canonical term order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Chart coordinate `x_{i+1}`.
    Var(u16),
    /// Direction parameter `α_{i+1}` of a symbolic tangent vector.
    Dir(u16),
    /// Spectral variable of characteristic polynomials.
    Lambda,
    /// Opaque smooth function or one of its partial derivatives.
    Func(FuncAtom),
}

impl Atom {
    pub fn var(i: usize) -> Atom {
        Atom::Var(i as u16)
    }

    pub fn dir(i: usize) -> Atom {
        Atom::Dir(i as u16)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Atom::Var(_))
    }

    pub fn is_dir(&self) -> bool {
        matches!(self, Atom::Dir(_))
    }

    pub fn is_lambda(&self) -> bool {
        matches!(self, Atom::Lambda)
    }

    /// Whether `∂_var` of this atom can be nonzero.
    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Atom::Var(v) => *v as usize == var,
            Atom::Func(f) => f.depends_on(var),
            Atom::Dir(_) | Atom::Lambda => false,
        }
    }

    /// Largest chart variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Atom::Var(v) => Some(*v as usize),
            Atom::Func(f) => f.args().last(),
            _ => None,
        }
    }

    /// Writes the atom using `names` for chart variables (default `x1..`).
    pub fn write(&self, out: &mut String, names: Option<&[String]>) {
        let var_name = |v: usize| -> String {
            match names.and_then(|n| n.get(v)) {
                Some(s) => s.clone(),
                None => format!("x{}", v + 1),
            }
        };
        match self {
            Atom::Var(v) => out.push_str(&var_name(*v as usize)),
            Atom::Dir(i) => {
                out.push('a');
                out.push_str(&(i + 1).to_string());
            }
            Atom::Lambda => out.push_str("lambda"),
            Atom::Func(f) => {
                if f.order > 0 {
                    if f.arg_count() == 1 {
                        out.push_str(&format!("d{}(", f.order));
                    } else {
                        let parts: Vec<String> = f
                            .args()
                            .filter(|&v| f.deriv[v] > 0)
                            .map(|v| match f.deriv[v] {
                                1 => var_name(v),
                                k => format!("{}^{}", var_name(v), k),
                            })
                            .collect();
                        out.push_str(&format!("d[{}](", parts.join(",")));
                    }
                    out.push_str(f.name());
                    out.push(')');
                } else {
                    out.push_str(f.name());
                }
                let args: Vec<String> = f.args().map(var_name).collect();
                out.push('(');
                out.push_str(&args.join(","));
                out.push(')');
            }
        }
    }
}

impl fmt::Debug for FuncAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&Atom::Func(*self), f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, None);
        f.write_str(&s)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_order_like_strings() {
        let a = FuncName::new("f").unwrap();
        let b = FuncName::new("f1").unwrap();
        let c = FuncName::new("g").unwrap();
        assert!(a < b && b < c);
        assert!(FuncName::new("1f").is_err());
        assert!(FuncName::new("waytoolongname").is_err());
    }

    #[test]
    fn atom_kind_order() {
        let f = Atom::Func(FuncAtom::new("a", &[0]).unwrap());
        assert!(Atom::var(5) < Atom::dir(0));
        assert!(Atom::dir(9) < Atom::Lambda);
        assert!(Atom::Lambda < f);
    }

    #[test]
    fn derivative_atoms_print() {
        let f = FuncAtom::new("f", &[0]).unwrap();
        let f2 = f.differentiate(0).unwrap().differentiate(0).unwrap();
        assert_eq!(Atom::Func(f2).to_string(), "d2(f)(x1)");
        assert!(f.differentiate(1).is_none());

        let g = FuncAtom::new("f1", &[0, 1, 2]).unwrap();
        let g = g.with_derivatives(&[(1, 1), (2, 2)]).unwrap();
        assert_eq!(Atom::Func(g).to_string(), "d[x2,x3^2](f1)(x1,x2,x3)");
        assert_eq!(g.order(), 3);
    }

    #[test]
    fn derivative_orders_are_compared_after_names() {
        let f = FuncAtom::new("f", &[0]).unwrap();
        let fp = f.differentiate(0).unwrap();
        let g = FuncAtom::new("g", &[0]).unwrap();
        assert!(Atom::Func(f) < Atom::Func(fp));
        assert!(Atom::Func(fp) < Atom::Func(g));
    }

    #[test]
    fn derivatives_towards() {
        let f = FuncAtom::new("f", &[0, 1]).unwrap();
        let target = f.with_derivatives(&[(0, 2), (1, 1)]).unwrap();
        assert_eq!(f.derivatives_towards(&target), Some(vec![(0, 2), (1, 1)]));
        assert_eq!(target.derivatives_towards(&f), None);
    }

    #[test]
    fn shifting_arguments() {
        let f = FuncAtom::new("f", &[0]).unwrap().differentiate(0).unwrap();
        let s = f.shifted(3).unwrap();
        assert!(s.depends_on(3) && !s.depends_on(0));
        assert_eq!(Atom::Func(s).to_string(), "d1(f)(x4)");
    }
}
