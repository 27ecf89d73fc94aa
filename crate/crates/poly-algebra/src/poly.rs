use std::collections::hash_map::{DefaultHasher, Entry};
use std::collections::HashMap;
use std::fmt;
use std::hash::BuildHasherDefault;

use crate::monomial::{Monomial, Var};

/// Fixed-seed hasher so that term iteration order, and therefore every
/// floating-point reduction over a polynomial, is identical between runs.
pub(crate) type TermMap = HashMap<Monomial, f64, BuildHasherDefault<DefaultHasher>>;

/// A sparse real polynomial in the chain variables `r_j`, `p_j`.
///
/// Invariants: no stored coefficient is exactly zero, no stored exponent is
/// zero, and term keys are unique with factors in canonical variable order
/// (the [`Monomial`] representation enforces the last two).
#[derive(Clone, Default, PartialEq)]
pub struct SparsePoly {
    terms: TermMap,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn variable(v: Var) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(Monomial::var(v), 1.0);
        p
    }

    pub fn monomial(m: Monomial, c: f64) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Adds `c * m`, merging with an existing term and pruning exact zeros.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let new = *e.get() + c;
                if new == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = new;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &SparsePoly, s: f64) {
        for (m, c) in other.iter() {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out.add_assign_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out.add_assign_scaled(other, -1.0);
        out
    }

    pub fn scale(&self, s: f64) -> SparsePoly {
        let mut out = SparsePoly::zero();
        if s != 0.0 {
            for (m, c) in self.iter() {
                out.add_term(m.clone(), c * s);
            }
        }
        out
    }

    /// Full polynomial product. Quadratic in term count; meant for the
    /// low-degree polynomials of the adjoint and stationarity checks, not
    /// for operator iterates (use
    /// [`GibbsMeasure::product_expectation`](crate::GibbsMeasure::product_expectation)
    /// there).
    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in self.iter() {
            for (mb, cb) in other.iter() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Evaluates at a point given by a variable assignment.
    pub fn eval(&self, assign: impl Fn(Var) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in self.iter() {
            let mut term = c;
            for &(v, e) in m.factors() {
                term *= assign(v).powi(e as i32);
            }
            acc += term;
        }
        acc
    }

    /// Largest absolute coefficient difference against `other`, over the
    /// union of both supports.
    pub fn max_coeff_distance(&self, other: &SparsePoly) -> f64 {
        let mut d: f64 = 0.0;
        for (m, c) in self.iter() {
            d = d.max((c - other.coefficient(m)).abs());
        }
        for (m, c) in other.iter() {
            d = d.max((c - self.coefficient(m)).abs());
        }
        d
    }

    /// Terms in a deterministic (sorted) order, for display and tests.
    pub fn sorted_terms(&self) -> Vec<(Monomial, f64)> {
        let mut v: Vec<_> = self.iter().map(|(m, c)| (m.clone(), c)).collect();
        v.sort_by(|a, b| a.0.factors().cmp(b.0.factors()));
        v
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.sorted_terms() {
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c >= 0.0 {
                write!(f, " + {c}")?;
            } else {
                write!(f, " - {}", -c)?;
            }
            if !m.is_constant() {
                write!(f, "*{m:?}")?;
            }
        }
        Ok(())
    }
}
