//! Benchmark fixtures shared by the bench targets.

use szabo_core::connection::{family1, family2, generic_functions};
use szabo_core::{Connection, Expr};

pub fn generic_family1() -> Connection {
    family1(generic_functions())
}

pub fn generic_family2() -> Connection {
    family2(generic_functions())
}

/// `(x1 + x2 + x3 + 1)^k`, a dense polynomial for ring benchmarks.
pub fn dense_power(k: u32) -> Expr {
    (Expr::var(0) + Expr::var(1) + Expr::var(2) + Expr::one()).pow(k)
}
