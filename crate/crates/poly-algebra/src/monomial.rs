use std::fmt;

use smallvec::SmallVec;

/// One phase-space variable of a chain: a bond extension `r_j` or a
/// momentum `p_j`.
///
/// Variables are packed into a single integer id, `2*site` for `r` and
/// `2*site + 1` for `p`, so the derived ordering interleaves per site:
/// `r_0 < p_0 < r_1 < p_1 < ...`. This id order is the canonical order used
/// by [`Monomial`] keys.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn r(site: usize) -> Self {
        Var((site as u32) << 1)
    }

    pub fn p(site: usize) -> Self {
        Var(((site as u32) << 1) | 1)
    }

    pub fn site(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_momentum(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_extension(self) -> bool {
        self.0 & 1 == 0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}]",
            if self.is_momentum() { "p" } else { "r" },
            self.site()
        )
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

type Factors = SmallVec<[(Var, u8); 6]>;

/// A product of variable powers with every stored exponent nonzero and the
/// factors sorted by variable id. The empty monomial is the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Factors,
}

impl Monomial {
    /// The constant monomial 1.
    pub fn one() -> Self {
        Monomial {
            factors: Factors::new(),
        }
    }

    pub fn var(v: Var) -> Self {
        Monomial {
            factors: SmallVec::from_slice(&[(v, 1)]),
        }
    }

    pub fn power(v: Var, exp: u8) -> Self {
        if exp == 0 {
            return Self::one();
        }
        Monomial {
            factors: SmallVec::from_slice(&[(v, exp)]),
        }
    }

    /// Builds a monomial from unsorted `(var, exponent)` pairs, merging
    /// repeats and dropping zero exponents.
    pub fn from_pairs(pairs: &[(Var, u8)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            m = m.times_power(v, e as i32);
        }
        m
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exponent(&self, v: Var) -> u8 {
        match self.factors.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    pub fn factors(&self) -> &[(Var, u8)] {
        &self.factors
    }

    /// Multiplies by `v^delta`. Negative `delta` differentiation-style
    /// lowers the exponent; panics if the exponent would go negative
    /// (callers always check the current exponent first).
    pub fn times_power(&self, v: Var, delta: i32) -> Monomial {
        if delta == 0 {
            return self.clone();
        }
        let mut factors = self.factors.clone();
        match factors.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => {
                let e = factors[i].1 as i32 + delta;
                assert!(e >= 0, "negative exponent on {v:?}");
                if e == 0 {
                    factors.remove(i);
                } else {
                    factors[i].1 = e as u8;
                }
            }
            Err(i) => {
                assert!(delta > 0, "negative exponent on {v:?}");
                factors.insert(i, (v, delta as u8));
            }
        }
        Monomial { factors }
    }

    /// Product of two monomials (exponents add).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = Factors::new();
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    factors.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    factors.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    factors.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&a[i..]);
        factors.extend_from_slice(&b[j..]);
        Monomial { factors }
    }

    /// The parity signature: the sorted list of variables carrying an odd
    /// exponent. Two monomials have an even product exactly when their
    /// signatures agree.
    pub fn parity_signature(&self) -> SmallVec<[Var; 6]> {
        self.factors
            .iter()
            .filter(|&&(_, e)| e % 2 == 1)
            .map(|&(v, _)| v)
            .collect()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v:?}")?;
            } else {
                write!(f, "{v:?}^{e}")?;
            }
        }
        Ok(())
    }
}
