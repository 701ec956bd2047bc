//! Exact rational functions in the two commuting symbols `L` and `T`.
//!
//! A [`BivRat`] is a fraction whose numerator is a polynomial in `T` with
//! Laurent-polynomial coefficients in `L`, and whose denominator is a
//! multiset of factors `(1 - L^a T^b)`. Denominators are never cancelled
//! against numerators: the factors keep their provenance so the final pole
//! report presents the candidate-pole form. Equality is cross-multiplied
//! polynomial identity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Laurent polynomials in L.
// ---------------------------------------------------------------------------

/// A Laurent polynomial in `L` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct LPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LPoly {
    pub fn zero() -> LPoly {
        LPoly::default()
    }

    pub fn one() -> LPoly {
        LPoly::monomial(0, BigInt::one())
    }

    /// The single term `coeff * L^exp`.
    pub fn monomial(exp: i64, coeff: BigInt) -> LPoly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LPoly { terms }
    }

    /// The variable `L`.
    pub fn l() -> LPoly {
        LPoly::monomial(1, BigInt::one())
    }

    /// The factor `L - 1`.
    pub fn l_minus_one() -> LPoly {
        let mut p = LPoly::l();
        p.add_term(0, -BigInt::one());
        p
    }

    pub fn from_int(v: i64) -> LPoly {
        LPoly::monomial(0, BigInt::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> LPoly {
        LPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &LPoly) -> LPoly {
        let mut out = LPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn shift(&self, exp: i64) -> LPoly {
        LPoly {
            terms: self.terms.iter().map(|(e, c)| (e + exp, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: usize) -> LPoly {
        let mut out = LPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Exact division by `1 - L^a` (`a != 0`). Returns `None` when the
    /// quotient is not a Laurent polynomial.
    pub fn divide_binomial(&self, a: i64) -> Option<LPoly> {
        assert!(a != 0);
        if self.is_zero() {
            return Some(LPoly::zero());
        }
        if a < 0 {
            // 1 - L^a = -L^a (1 - L^{-a})
            let q = self.divide_binomial(-a)?;
            return Some(q.shift(-a).neg());
        }
        // q(e) = p(e) + q(e - a), upward from the lowest exponent
        let emin = self.min_exp().unwrap();
        let emax = self.max_exp().unwrap();
        let mut q = LPoly::zero();
        for e in emin..=emax {
            let val = self.coeff(e) + q.coeff(e - a);
            q.add_term(e, val);
        }
        // the quotient is polynomial iff the top window vanished
        for e in (emax - a + 1)..=emax {
            if !q.coeff(e).is_zero() {
                return None;
            }
        }
        // drop the top window (zero by the check above) and verify
        debug_assert_eq!(q.sub(&q.shift(a)), *self);
        Some(q)
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if *e != 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if *e == 1 {
                    write!(f, "L")?;
                } else {
                    write!(f, "L^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Polynomials in T with LPoly coefficients.
// ---------------------------------------------------------------------------

/// A polynomial in `T` whose coefficients are Laurent polynomials in `L`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TPoly {
    coeffs: BTreeMap<usize, LPoly>,
}

impl TPoly {
    pub fn zero() -> TPoly {
        TPoly::default()
    }

    pub fn one() -> TPoly {
        TPoly::monomial(0, LPoly::one())
    }

    pub fn monomial(t_exp: usize, c: LPoly) -> TPoly {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(t_exp, c);
        }
        TPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, t_exp: usize) -> LPoly {
        self.coeffs.get(&t_exp).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&usize, &LPoly)> {
        self.coeffs.iter()
    }

    pub fn deg(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, t_exp: usize, c: LPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(t_exp).or_default();
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.coeffs.remove(&t_exp);
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (t, c) in &other.coeffs {
            out.add_term(*t, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (t, c) in &other.coeffs {
            out.add_term(*t, c.neg());
        }
        out
    }

    pub fn neg(&self) -> TPoly {
        TPoly {
            coeffs: self.coeffs.iter().map(|(t, c)| (*t, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (t1, c1) in &self.coeffs {
            for (t2, c2) in &other.coeffs {
                out.add_term(t1 + t2, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &LPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (t, c0) in &self.coeffs {
            out.add_term(*t, c0.mul(c));
        }
        out
    }

    /// Multiply by the factor `1 - L^a T^b`.
    pub fn mul_factor(&self, a: i64, b: usize) -> TPoly {
        let mut shifted = TPoly::zero();
        for (t, c) in &self.coeffs {
            shifted.add_term(t + b, c.shift(a));
        }
        self.sub(&shifted)
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let single_term = c.terms.len() == 1;
            if single_term && *t > 0 {
                let (e, coeff) = c.terms.iter().next().unwrap();
                let unit = coeff.is_one() && *e != 0;
                if coeff.is_one() && *e == 0 {
                    // coefficient 1: bare T power
                } else if unit {
                    if *e == 1 {
                        write!(f, "L*")?;
                    } else {
                        write!(f, "L^{e}*")?;
                    }
                } else {
                    write!(f, "({c})*")?;
                }
            } else if *t > 0 {
                write!(f, "({c})*")?;
            } else {
                write!(f, "{c}")?;
            }
            if *t == 1 {
                write!(f, "T")?;
            } else if *t > 1 {
                write!(f, "T^{t}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Bivariate rational forms.
// ---------------------------------------------------------------------------

/// A rational function `num / prod (1 - L^a T^b)^mult`.
#[derive(Clone, PartialEq, Eq)]
pub struct BivRat {
    num: TPoly,
    den: BTreeMap<(i64, usize), usize>,
}

impl BivRat {
    /// Build from numerator and denominator factor multiset.
    pub fn new(num: TPoly, den: BTreeMap<(i64, usize), usize>) -> BivRat {
        assert!(
            !den.contains_key(&(0, 0)),
            "denominator factor (1 - L^0 T^0) is zero"
        );
        let den = den.into_iter().filter(|&(_, m)| m > 0).collect();
        BivRat { num, den }
    }

    pub fn zero() -> BivRat {
        BivRat::new(TPoly::zero(), BTreeMap::new())
    }

    pub fn one() -> BivRat {
        BivRat::new(TPoly::one(), BTreeMap::new())
    }

    pub fn from_tpoly(p: TPoly) -> BivRat {
        BivRat::new(p, BTreeMap::new())
    }

    /// `1 / (1 - L^a T^b)`.
    pub fn geometric(a: i64, b: usize) -> BivRat {
        let mut den = BTreeMap::new();
        den.insert((a, b), 1);
        BivRat::new(TPoly::one(), den)
    }

    pub fn num(&self) -> &TPoly {
        &self.num
    }

    pub fn den(&self) -> &BTreeMap<(i64, usize), usize> {
        &self.den
    }

    /// The denominator expanded into a polynomial.
    pub fn den_as_tpoly(&self) -> TPoly {
        let mut out = TPoly::one();
        for (&(a, b), &m) in &self.den {
            for _ in 0..m {
                out = out.mul_factor(a, b);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn neg(&self) -> BivRat {
        BivRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &BivRat) -> BivRat {
        // least common multiset denominator
        let mut den: BTreeMap<(i64, usize), usize> = self.den.clone();
        for (f, m) in &other.den {
            let e = den.entry(*f).or_insert(0);
            *e = (*e).max(*m);
        }
        let mut num_a = self.num.clone();
        let mut num_b = other.num.clone();
        for (&(a, b), &m) in &den {
            let ma = self.den.get(&(a, b)).copied().unwrap_or(0);
            let mb = other.den.get(&(a, b)).copied().unwrap_or(0);
            for _ in ma..m {
                num_a = num_a.mul_factor(a, b);
            }
            for _ in mb..m {
                num_b = num_b.mul_factor(a, b);
            }
        }
        BivRat::new(num_a.add(&num_b), den)
    }

    pub fn sub(&self, other: &BivRat) -> BivRat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BivRat) -> BivRat {
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            *den.entry(*f).or_insert(0) += m;
        }
        BivRat::new(self.num.mul(&other.num), den)
    }

    pub fn scale(&self, c: &LPoly) -> BivRat {
        BivRat {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Cross-multiplied polynomial equality.
    pub fn equals(&self, other: &BivRat) -> bool {
        // scale each numerator by the factors the other side has in excess
        let mut lhs = self.num.clone();
        let mut rhs = other.num.clone();
        let mut all: BTreeMap<(i64, usize), (usize, usize)> = BTreeMap::new();
        for (f, m) in &self.den {
            all.entry(*f).or_insert((0, 0)).0 = *m;
        }
        for (f, m) in &other.den {
            all.entry(*f).or_insert((0, 0)).1 = *m;
        }
        for (&(a, b), &(ma, mb)) in &all {
            if mb > ma {
                for _ in ma..mb {
                    lhs = lhs.mul_factor(a, b);
                }
            } else {
                for _ in mb..ma {
                    rhs = rhs.mul_factor(a, b);
                }
            }
        }
        lhs == rhs
    }

    /// Exact `T`-expansion: coefficients of `T^0 .. T^order` in `Z[L]`.
    ///
    /// Factors with `b = 0` must divide the expansion exactly; a failed
    /// division reports [`Error::NonPolynomialCoefficient`].
    pub fn expand(&self, order: usize) -> Result<Vec<LPoly>> {
        let mut coeffs: Vec<LPoly> = (0..=order).map(|s| self.num.coeff(s)).collect();
        for (&(a, b), &m) in &self.den {
            if b == 0 {
                continue;
            }
            for _ in 0..m {
                for s in b..=order {
                    let prev = coeffs[s - b].shift(a);
                    coeffs[s] = coeffs[s].add(&prev);
                }
            }
        }
        for (&(a, b), &m) in &self.den {
            if b != 0 {
                continue;
            }
            for _ in 0..m {
                for (s, c) in coeffs.iter_mut().enumerate() {
                    *c = c
                        .divide_binomial(a)
                        .ok_or(Error::NonPolynomialCoefficient { degree: s })?;
                }
            }
        }
        Ok(coeffs)
    }
}

impl fmt::Display for BivRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        // factors sorted by (b, a)
        let mut factors: Vec<(&(i64, usize), &usize)> = self.den.iter().collect();
        factors.sort_by_key(|(&(a, b), _)| (b, a));
        let mut first = true;
        for (&(a, b), &m) in factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "(1 - {})", factor_body(a, b))?;
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for BivRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn factor_body(a: i64, b: usize) -> String {
    let l_part = match a {
        0 => String::new(),
        1 => "L".to_string(),
        _ => format!("L^{a}"),
    };
    let t_part = match b {
        0 => String::new(),
        1 => "T".to_string(),
        _ => format!("T^{b}"),
    };
    match (l_part.is_empty(), t_part.is_empty()) {
        (true, true) => "1".to_string(),
        (true, false) => t_part,
        (false, true) => l_part,
        (false, false) => format!("{l_part}*{t_part}"),
    }
}

/// Reconstruct the numerator of a rational form with known denominator from
/// enough expansion coefficients.
///
/// `coeffs` must be the expansion of the unknown fraction to an order at
/// least `deg_T(denominator) + guard`; the top `guard` coefficients of the
/// re-summed product must vanish, otherwise [`Error::NotStabilized`].
pub fn reconstruct_numerator(
    coeffs: &[LPoly],
    den: &BTreeMap<(i64, usize), usize>,
    guard: usize,
) -> Result<TPoly> {
    assert!(!coeffs.is_empty());
    let order = coeffs.len() - 1;
    let den_deg: usize = den.iter().map(|(&(_, b), &m)| b * m).sum();
    assert!(
        order >= den_deg + guard,
        "reconstruction needs at least deg_T(den) + guard coefficients"
    );
    let mut series = TPoly::zero();
    for (s, c) in coeffs.iter().enumerate() {
        series.add_term(s, c.clone());
    }
    let mut product = series;
    for (&(a, b), &m) in den {
        for _ in 0..m {
            product = product.mul_factor(a, b);
        }
    }
    // truncate: coefficients above `order` are contaminated by truncation
    let mut out = TPoly::zero();
    for (t, c) in product.coeffs() {
        if *t <= order {
            out.add_term(*t, c.clone());
        }
    }
    for s in (order - guard + 1)..=order {
        if !out.coeff(s).is_zero() {
            return Err(Error::NotStabilized { degree: s });
        }
    }
    let mut trimmed = TPoly::zero();
    for (t, c) in out.coeffs() {
        if *t <= order - guard {
            trimmed.add_term(*t, c.clone());
        }
    }
    Ok(trimmed)
}

// ---------------------------------------------------------------------------
// Univariate rational forms in L.
// ---------------------------------------------------------------------------

/// A general rational function in `L` (used for comparisons of volumes).
#[derive(Clone, PartialEq, Eq)]
pub struct LRat {
    num: LPoly,
    den: LPoly,
}

impl LRat {
    pub fn new(num: LPoly, den: LPoly) -> LRat {
        assert!(!den.is_zero());
        LRat { num, den }
    }

    pub fn zero() -> LRat {
        LRat::new(LPoly::zero(), LPoly::one())
    }

    pub fn from_lpoly(p: LPoly) -> LRat {
        LRat::new(p, LPoly::one())
    }

    pub fn add(&self, other: &LRat) -> LRat {
        LRat::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &LRat) -> LRat {
        LRat::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> LRat {
        LRat::new(self.num.neg(), self.den.clone())
    }

    pub fn equals(&self, other: &LRat) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Expansion in descending powers of `L`: returns the top exponent `e`
    /// and the coefficients of `L^e, L^{e-1}, ..., L^{e-depth}`.
    ///
    /// Requires the denominator's top coefficient to be a unit, which holds
    /// for products of binomials `1 - L^a`.
    pub fn descending_expansion(&self, depth: usize) -> (i64, Vec<BigInt>) {
        assert!(!self.num.is_zero(), "expansion of zero has no top exponent");
        let e_num = self.num.max_exp().unwrap();
        let e_den = self.den.max_exp().unwrap();
        let lead = self.den.coeff(e_den);
        assert!(
            lead.clone().abs().is_one(),
            "denominator must have unit top coefficient"
        );
        // series division in the variable u = 1/L
        let num_u = |i: usize| self.num.coeff(e_num - i as i64);
        let den_u = |i: usize| self.den.coeff(e_den - i as i64);
        let mut out = Vec::with_capacity(depth + 1);
        for i in 0..=depth {
            let mut acc = num_u(i);
            for (j, prev) in out.iter().enumerate().take(i) {
                acc -= den_u(i - j) * prev;
            }
            out.push(acc / &lead);
        }
        (e_num - e_den, out)
    }
}

impl fmt::Display for LRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// A motivic volume: Laurent numerator over factors `(1 - L^{-c})`.
#[derive(Clone, PartialEq, Eq)]
pub struct LVolRat {
    num: LPoly,
    den: BTreeMap<u64, usize>,
}

impl LVolRat {
    pub fn new(num: LPoly, den: BTreeMap<u64, usize>) -> LVolRat {
        assert!(den.keys().all(|&c| c >= 1));
        let den = den.into_iter().filter(|&(_, m)| m > 0).collect();
        LVolRat { num, den }
    }

    pub fn zero() -> LVolRat {
        LVolRat::new(LPoly::zero(), BTreeMap::new())
    }

    pub fn num(&self) -> &LPoly {
        &self.num
    }

    pub fn den(&self) -> &BTreeMap<u64, usize> {
        &self.den
    }

    pub fn scale(&self, c: &LPoly) -> LVolRat {
        LVolRat {
            num: self.num.mul(c),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &LVolRat) -> LVolRat {
        let mut den: BTreeMap<u64, usize> = self.den.clone();
        for (c, m) in &other.den {
            let e = den.entry(*c).or_insert(0);
            *e = (*e).max(*m);
        }
        let mut num_a = self.num.clone();
        let mut num_b = other.num.clone();
        for (&c, &m) in &den {
            let ma = self.den.get(&c).copied().unwrap_or(0);
            let mb = other.den.get(&c).copied().unwrap_or(0);
            let factor = binomial_neg(c);
            for _ in ma..m {
                num_a = num_a.mul(&factor);
            }
            for _ in mb..m {
                num_b = num_b.mul(&factor);
            }
        }
        LVolRat::new(num_a.add(&num_b), den)
    }

    /// Convert to a general rational function in `L`.
    pub fn to_lrat(&self) -> LRat {
        let mut den = LPoly::one();
        for (&c, &m) in &self.den {
            for _ in 0..m {
                den = den.mul(&binomial_neg(c));
            }
        }
        LRat::new(self.num.clone(), den)
    }

    pub fn equals(&self, other: &LVolRat) -> bool {
        self.to_lrat().equals(&other.to_lrat())
    }
}

/// The factor `1 - L^{-c}`.
fn binomial_neg(c: u64) -> LPoly {
    let mut p = LPoly::one();
    p.add_term(-(c as i64), -BigInt::one());
    p
}

impl fmt::Display for LVolRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        let mut first = true;
        for (&c, &m) in &self.den {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "(1 - L^-{c})")?;
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LVolRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn den(factors: &[(i64, usize)]) -> BTreeMap<(i64, usize), usize> {
        let mut out = BTreeMap::new();
        for &f in factors {
            *out.entry(f).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn identity_laws() {
        let x = BivRat::geometric(1, 1); // 1/(1-LT)
        assert!(x.add(&BivRat::zero()).equals(&x));
        assert!(x.mul(&BivRat::one()).equals(&x));
        let t = BivRat::from_tpoly(TPoly::monomial(1, LPoly::one()));
        assert!(!x.equals(&x.add(&t)));
    }

    #[test]
    fn smooth_curve_assembly() {
        // 1/(1-T) + (L-1)T/((1-LT)(1-T)) = 1/(1-LT)
        let a = BivRat::geometric(0, 1);
        let b = BivRat::new(
            TPoly::monomial(1, LPoly::l_minus_one()),
            den(&[(1, 1), (0, 1)]),
        );
        let sum = a.add(&b);
        assert!(sum.equals(&BivRat::geometric(1, 1)));
    }

    #[test]
    fn expand_geometric() {
        let x = BivRat::geometric(2, 1); // 1/(1-L^2 T)
        let coeffs = x.expand(3).unwrap();
        assert_eq!(coeffs[0], LPoly::one());
        assert_eq!(coeffs[1], LPoly::monomial(2, BigInt::one()));
        assert_eq!(coeffs[2], LPoly::monomial(4, BigInt::one()));
        assert_eq!(coeffs[3], LPoly::monomial(6, BigInt::one()));
    }

    #[test]
    fn expand_resum_roundtrip() {
        // T^2/((1-LT)(1-T^2)) expanded, then reconstructed
        let x = BivRat::new(
            TPoly::monomial(2, LPoly::one()),
            den(&[(1, 1), (0, 2)]),
        );
        let coeffs = x.expand(12).unwrap();
        let num = reconstruct_numerator(&coeffs, x.den(), 4).unwrap();
        assert_eq!(num, TPoly::monomial(2, LPoly::one()));
    }

    #[test]
    fn reconstruct_trivial_and_mismatch() {
        let one = BivRat::geometric(0, 1); // 1/(1-T)
        let coeffs = one.expand(8).unwrap();
        let num = reconstruct_numerator(&coeffs, one.den(), 4).unwrap();
        assert_eq!(num, TPoly::one());

        // wrong denominator {(0,1)} for 1/(1-LT) must not stabilize
        let x = BivRat::geometric(1, 1);
        let coeffs = x.expand(8).unwrap();
        let err = reconstruct_numerator(&coeffs, one.den(), 4).unwrap_err();
        assert!(matches!(err, Error::NotStabilized { .. }));
    }

    #[test]
    fn expand_divides_constant_factors() {
        // (1 - L^2) T / ((1 - L^2) (1 - T)): the b=0 factor divides out
        let mut num = TPoly::monomial(1, LPoly::one());
        num = num.mul_factor(2, 0); // (1 - L^2) * T
        let x = BivRat::new(num, den(&[(2, 0), (0, 1)]));
        let coeffs = x.expand(4).unwrap();
        assert_eq!(coeffs[0], LPoly::zero());
        for c in &coeffs[1..] {
            assert_eq!(*c, LPoly::one());
        }
        // and a non-divisible coefficient is reported
        let bad = BivRat::new(TPoly::monomial(0, LPoly::one()), den(&[(2, 0)]));
        assert!(matches!(
            bad.expand(1),
            Err(Error::NonPolynomialCoefficient { .. })
        ));
    }

    #[test]
    fn divide_binomial_negative_exponent() {
        // (1 - L^-3) * (L + 2) recovered
        let p = LPoly::monomial(1, BigInt::one())
            .add(&LPoly::from_int(2))
            .mul(&binomial_neg(3));
        let q = p.divide_binomial(-3).unwrap();
        assert_eq!(q, LPoly::monomial(1, BigInt::one()).add(&LPoly::from_int(2)));
    }

    #[test]
    fn volume_forms_compare() {
        // 1/(1-L^{-1}) equals L/(L-1) as rational functions
        let v = LVolRat::new(LPoly::one(), [(1u64, 1usize)].into_iter().collect());
        let expected = LRat::new(LPoly::l(), LPoly::l_minus_one());
        assert!(v.to_lrat().equals(&expected));
    }
}
