//! Quadratic posiforms: constant plus nonnegative terms over literals.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{Assignment, ModelError, Qubo};
use crate::scalar::Scalar;

/// A variable (`x_i`) or its complement (`x̄_i = 1 − x_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub complemented: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, complemented: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, complemented: true }
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            complemented: !self.complemented,
        }
    }

    pub fn value(self, x: &[bool]) -> bool {
        x[self.var] ^ self.complemented
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complemented {
            write!(f, "!x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// `constant + Σ a_u·u + Σ a_uv·u·v` with every `a_u, a_uv > 0`.
///
/// Quadratic keys are literal pairs on distinct variables ordered by
/// variable index.
#[derive(Debug, Clone, PartialEq)]
pub struct Posiform<T> {
    num_vars: usize,
    constant: T,
    linear: BTreeMap<Literal, T>,
    quadratic: BTreeMap<(Literal, Literal), T>,
}

impl<T: Scalar> Posiform<T> {
    pub fn new(num_vars: usize) -> Self {
        Posiform {
            num_vars,
            constant: T::zero(),
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn linear(&self) -> &BTreeMap<Literal, T> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(Literal, Literal), T> {
        &self.quadratic
    }

    pub fn add_constant(&mut self, c: T) {
        self.constant = self.constant + c;
    }

    /// Adds `c·u`. Panics if `c` is negative.
    #[track_caller]
    pub fn add_linear(&mut self, u: Literal, c: T) {
        assert!(u.var < self.num_vars);
        assert!(c >= T::zero(), "posiform coefficients must be nonnegative");
        if !c.is_zero() {
            let e = self.linear.entry(u).or_insert_with(T::zero);
            *e = *e + c;
        }
    }

    /// Adds `c·u·v` for literals on distinct variables. Panics if `c` is
    /// negative.
    #[track_caller]
    pub fn add_quadratic(&mut self, u: Literal, v: Literal, c: T) {
        assert!(u.var < self.num_vars && v.var < self.num_vars);
        assert_ne!(u.var, v.var, "quadratic term needs distinct variables");
        assert!(c >= T::zero(), "posiform coefficients must be nonnegative");
        if c.is_zero() {
            return;
        }
        let key = if u.var < v.var { (u, v) } else { (v, u) };
        let e = self.quadratic.entry(key).or_insert_with(T::zero);
        *e = *e + c;
    }

    pub fn energy(&self, x: &[bool]) -> T {
        assert_eq!(x.len(), self.num_vars);
        let mut e = self.constant;
        for (&u, &c) in &self.linear {
            if u.value(x) {
                e = e + c;
            }
        }
        for (&(u, v), &c) in &self.quadratic {
            if u.value(x) && v.value(x) {
                e = e + c;
            }
        }
        e
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<T, ModelError> {
        if a.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        Ok(self.energy(&a.to_binary().to_bools()))
    }

    /// Number of non-constant terms.
    pub fn num_terms(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }
}

impl<T: Scalar> fmt::Display for Posiform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant.to_text())?;
        for (u, c) in &self.linear {
            write!(f, " + {}·{u}", c.to_text())?;
        }
        for ((u, v), c) in &self.quadratic {
            write!(f, " + {}·{u}·{v}", c.to_text())?;
        }
        Ok(())
    }
}

/// Rewrites a QUBO as an equivalent posiform.
///
/// Quadratic terms are handled first in ascending pair order: `a·x_i·x_j`
/// with `a < 0` becomes `a·x_i + (−a)·x_i·x̄_j` (the higher index is
/// complemented). The accumulated linear coefficients are then made
/// nonnegative via `a·x_i = a + (−a)·x̄_i`.
pub fn to_posiform<T: Scalar>(q: &Qubo<T>) -> Posiform<T> {
    let mut p = Posiform::new(q.num_vars());
    p.constant = q.offset();
    let mut linear: BTreeMap<usize, T> = q.linear().clone();
    for (&(i, j), &a) in q.quadratic() {
        if a > T::zero() {
            p.add_quadratic(Literal::pos(i), Literal::pos(j), a);
        } else {
            let e = linear.entry(i).or_insert_with(T::zero);
            *e = *e + a;
            p.add_quadratic(Literal::pos(i), Literal::neg(j), -a);
        }
    }
    for (i, a) in linear {
        if a > T::zero() {
            p.add_linear(Literal::pos(i), a);
        } else if a < T::zero() {
            p.constant = p.constant + a;
            p.add_linear(Literal::neg(i), -a);
        }
    }
    p
}
