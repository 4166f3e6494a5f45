//! Sparse multivariate polynomials over the rationals.
//!
//! Representation: an ordered variable list shared behind an `Arc`, and a
//! `BTreeMap` from exponent vectors to nonzero `BigRational` coefficients.
//! The map is keyed by graded-lexicographic order (earlier variables rank
//! higher), so iteration order, leading terms and formatting are canonical.
//!
//! Invariants maintained by every constructor and operation:
//! * no stored zero coefficients;
//! * every exponent vector has one entry per variable;
//! * two polynomials over the same variable list are equal iff their term
//!   maps are equal.

mod factor;
mod gcd;
mod parse;
pub mod sturm;

pub use factor::{split_squarefree_deg2, SquarefreeFactor};
pub use parse::{format_poly, parse_poly, ParseError};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Exact coefficient type: arbitrary-precision rational in lowest terms with
/// positive denominator (canonicalisation is enforced by `num-rational`).
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Convert a rational to `f64` (numerator/denominator division; saturates on
/// overflow of the intermediate conversions).
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fallback for very large numerator/denominator: divide leading
        // digits. Practically unreachable for the sizes this crate produces.
        let n = r.numer().to_string();
        let d = r.denom().to_string();
        let nf: f64 = n.parse().unwrap_or(f64::NAN);
        let df: f64 = d.parse().unwrap_or(f64::NAN);
        nf / df
    })
}

/// Format a rational canonically: `p` when the denominator is one, else `p/q`.
pub fn format_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        let mut s = r.numer().to_string();
        s.push('/');
        s.push_str(&r.denom().to_string());
        s
    }
}

/// Errors raised by polynomial operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Operands are defined over different variable lists.
    VarMismatch,
    /// A named variable is not in the polynomial's variable list.
    UnknownVariable(String),
    /// A variable was left unbound by a substitution or evaluation.
    UnboundVariable(String),
    /// Both inputs of a gcd were zero.
    GcdOfZeros,
    /// Zero input where a nonzero polynomial is required.
    ZeroInput,
    /// Exact division failed (divisor does not divide the dividend).
    InexactDivision,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::VarMismatch => write!(f, "operands have different variable lists"),
            PolyError::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            PolyError::UnboundVariable(v) => write!(f, "variable `{v}` is unbound"),
            PolyError::GcdOfZeros => write!(f, "gcd of two zero polynomials"),
            PolyError::ZeroInput => write!(f, "zero polynomial not allowed here"),
            PolyError::InexactDivision => write!(f, "division is not exact"),
        }
    }
}

/// An ordered list of variable names. Declaration order fixes the
/// graded-lexicographic term order (earlier = higher).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vars {
    names: Vec<String>,
}

impl Vars {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Arc<Vars> {
        Arc::new(Vars {
            names: names.into_iter().map(Into::into).collect(),
        })
    }

    /// The analysis plane `(x, y)`.
    pub fn xy() -> Arc<Vars> {
        Vars::new(["x", "y"])
    }

    /// The extended space `(x, y, eps)`.
    pub fn xye() -> Arc<Vars> {
        Vars::new(["x", "y", "eps"])
    }

    /// Blow-up chart coordinates `(r, u, v)`.
    pub fn ruv() -> Arc<Vars> {
        Vars::new(["r", "u", "v"])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Exponent vector, one entry per variable, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise divisibility.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lex: total degree first, then lexicographic on the exponent
    /// vector (so the first declared variable dominates ties).
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Sparse multivariate polynomial over `Rational`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<Vars>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<Vars>, c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    pub fn var(vars: &Arc<Vars>, name: &str) -> Result<Self, PolyError> {
        let idx = vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.into()))?;
        let mut p = MultiPoly::zero(vars);
        p.terms.insert(Monomial::var(vars.len(), idx), Rational::one());
        Ok(p)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(
        vars: &Arc<Vars>,
        terms: I,
    ) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::constant(self.vars.len()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> alloc::collections::btree_map::Iter<'_, Monomial, Rational> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var_idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var_idx]).max().unwrap_or(0)
    }

    /// Leading term under graded lex (largest key).
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.vars.names() == other.vars.names() {
            Ok(())
        } else {
            Err(PolyError::VarMismatch)
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        let mut out = MultiPoly::zero(&self.vars);
        for (m, co) in &self.terms {
            out.terms.insert(m.clone(), co * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same vars");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same vars");
            }
        }
        acc
    }

    /// Exact partial derivative.
    pub fn differentiate(&self, var: &str) -> Result<MultiPoly, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[idx] -= 1;
            out.add_term(me, c * Rational::from(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Exact substitution. Every variable of `self` must appear in
    /// `bindings`, or be present by name in the target variable list (in
    /// which case it binds to itself).
    pub fn substitute(
        &self,
        target: &Arc<Vars>,
        bindings: &[(&str, MultiPoly)],
    ) -> Result<MultiPoly, PolyError> {
        for (_, b) in bindings {
            if b.vars.names() != target.names() {
                return Err(PolyError::VarMismatch);
            }
        }
        // Resolve the image of each source variable.
        let mut images: Vec<MultiPoly> = Vec::with_capacity(self.vars.len());
        for name in self.vars.names() {
            if let Some((_, b)) = bindings.iter().find(|(n, _)| n == name) {
                images.push(b.clone());
            } else if target.index_of(name).is_some() {
                images.push(MultiPoly::var(target, name)?);
            } else {
                return Err(PolyError::UnboundVariable(name.clone()));
            }
        }
        // Power cache per variable, filled on demand.
        let mut pow_cache: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|img| vec![MultiPoly::one(target), img.clone()])
            .collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut pow_cache[i];
                while cache.len() <= e as usize {
                    let next = cache
                        .last()
                        .unwrap()
                        .mul(&images[i])
                        .expect("same vars");
                    cache.push(next);
                }
                term = term.mul(&cache[e as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Largest `k` such that `var^k` divides the polynomial exactly;
    /// `None` for the zero polynomial (the `+infinity` sentinel).
    pub fn valuation(&self, var: &str) -> Result<Option<u32>, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        if self.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.terms.keys().map(|m| m.0[idx]).min().unwrap()))
    }

    /// Exact division by `var^k`; errors if the valuation is smaller.
    pub fn divide_by_power(&self, var: &str, k: u32) -> Result<MultiPoly, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[idx] < k {
                return Err(PolyError::InexactDivision);
            }
            let mut me = m.clone();
            me.0[idx] -= k;
            out.terms.insert(me, c.clone());
        }
        Ok(out)
    }

    /// Multiply by `var^k`.
    pub fn mul_by_power(&self, var: &str, k: u32) -> Result<MultiPoly, PolyError> {
        let idx = self
            .vars
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut me = m.clone();
            me.0[idx] += k;
            out.terms.insert(me, c.clone());
        }
        Ok(out)
    }

    /// Exact rational evaluation; all variables must be bound.
    pub fn eval_rational(&self, point: &[(&str, Rational)]) -> Result<Rational, PolyError> {
        let mut vals: Vec<Rational> = Vec::with_capacity(self.vars.len());
        for name in self.vars.names() {
            match point.iter().find(|(n, _)| n == name) {
                Some((_, v)) => vals.push(v.clone()),
                None => return Err(PolyError::UnboundVariable(name.clone())),
            }
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating evaluation at a full binding, in declaration order.
    pub fn eval_f64(&self, vals: &[f64]) -> f64 {
        debug_assert_eq!(vals.len(), self.vars.len());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= numeric_powi(vals[i], e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Normalise the leading coefficient (graded lex) to one. Zero maps to
    /// zero.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = Rational::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    /// Exact multivariate division: `Some(q)` with `self = q * d`, or `None`.
    pub fn exact_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MultiPoly::zero(&self.vars));
        }
        if self.vars.names() != d.vars.names() {
            return None;
        }
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = rc / &dc;
            let mut qt = MultiPoly::zero(&self.vars);
            qt.terms.insert(qm.clone(), qc.clone());
            quot.add_term(qm, qc);
            rem = rem.sub(&qt.mul(d).expect("same vars")).expect("same vars");
        }
        Some(quot)
    }

    /// Restrict to a different variable list by name. Variables absent from
    /// `target` must not occur in the polynomial.
    pub fn cast_to(&self, target: &Arc<Vars>) -> Result<MultiPoly, PolyError> {
        let mut map: Vec<Option<usize>> = Vec::with_capacity(self.vars.len());
        for name in self.vars.names() {
            map.push(target.index_of(name));
        }
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &exp) in m.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = exp,
                    None => return Err(PolyError::UnboundVariable(self.vars.name(i).into())),
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Coefficient of `var^k`, as a polynomial over the same variable list
    /// (with `var`-degree zero).
    pub fn coeff_of(&self, var_idx: usize, k: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[var_idx] == k {
                let mut me = m.clone();
                me.0[var_idx] = 0;
                out.terms.insert(me, c.clone());
            }
        }
        out
    }

    /// Univariate view: dense coefficient vector in `var` (constant term
    /// first), entries being polynomials in the remaining variables.
    pub fn univariate_in(&self, var_idx: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var_idx);
        (0..=d).map(|k| self.coeff_of(var_idx, k)).collect()
    }

    /// True if the polynomial involves the given variable.
    pub fn depends_on(&self, var_idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[var_idx] > 0)
    }

    /// The weighted valuation: minimum of `sum_i w_i * e_i` over monomials.
    /// `None` for the zero polynomial.
    pub fn weighted_valuation(&self, weights: &[u32]) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.0.iter().zip(weights).map(|(e, w)| e * w).sum())
            .min()
    }

    /// The sum of monomials attaining the weighted valuation (the initial
    /// form of the polynomial under the weight vector).
    pub fn weighted_initial_form(&self, weights: &[u32]) -> MultiPoly {
        let Some(v) = self.weighted_valuation(weights) else {
            return MultiPoly::zero(&self.vars);
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let w: u32 = m.0.iter().zip(weights).map(|(e, w)| e * w).sum();
            if w == v {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self))
    }
}

fn numeric_powi(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        e >>= 1;
        b *= b;
    }
    acc
}

/// A planar (2-component) or extended (3-component) polynomial vector field.
/// All components share one variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, PolyError> {
        assert!(!components.is_empty());
        let v0 = components[0].vars().clone();
        for c in &components[1..] {
            if c.vars().names() != v0.names() {
                return Err(PolyError::VarMismatch);
            }
        }
        Ok(PolyVectorField { components })
    }

    pub fn planar(a: MultiPoly, b: MultiPoly) -> Result<Self, PolyError> {
        PolyVectorField::new(vec![a, b])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn vars(&self) -> &Arc<Vars> {
        self.components[0].vars()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(point)).collect()
    }

    /// Exact Jacobian matrix entries `d component_i / d var_j`.
    pub fn jacobian(&self) -> Result<Vec<Vec<MultiPoly>>, PolyError> {
        let names: Vec<String> = self.vars().names().to_vec();
        self.components
            .iter()
            .map(|c| names.iter().map(|n| c.differentiate(n)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> MultiPoly {
        parse_poly(src, &Vars::xy()).unwrap()
    }

    #[test]
    fn transcritical_quartic_expands() {
        // (y-x)(y+x)(y-x/2)(y+x/2) = y^4 - (5/4) x^2 y^2 + (1/4) x^4
        let q = p("(y-x)*(y+x)*(y-x/2)*(y+x/2)");
        let expect = p("y^4 - 5/4*x^2*y^2 + 1/4*x^4");
        assert_eq!(q, expect);
    }

    #[test]
    fn zero_and_cancellation() {
        assert!(p("0").is_zero());
        assert!(p("x^2 - x^2").is_zero());
    }

    #[test]
    fn arith_examples() {
        assert_eq!(p("(x+y) + (x-y)"), p("2*x"));
        assert_eq!(p("(x-y)*(x+y)"), p("x^2 - y^2"));
        assert_eq!(p("(x+1)^3"), p("x^3 + 3*x^2 + 3*x + 1"));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("1/4*x^4").differentiate("x").unwrap(), p("x^3"));
        assert!(p("7/3").differentiate("y").unwrap().is_zero());
        // term-by-term oracle for the quartic
        assert_eq!(
            p("y^4 - 5/4*x^2*y^2 + 1/4*x^4").differentiate("x").unwrap(),
            p("-5/2*x*y^2 + x^3")
        );
    }

    #[test]
    fn substitution_examples() {
        let ruv = Vars::ruv();
        let r = MultiPoly::var(&ruv, "r").unwrap();
        let u = MultiPoly::var(&ruv, "u").unwrap();
        let v = MultiPoly::var(&ruv, "v").unwrap();
        let ru = r.mul(&u).unwrap();
        let r2v = r.mul(&r).unwrap().mul(&v).unwrap();

        let x2 = p("x^2");
        let got = x2
            .substitute(&ruv, &[("x", ru.clone()), ("y", r2v.clone())])
            .unwrap();
        assert_eq!(got, parse_poly("r^2*u^2", &ruv).unwrap());

        let xy = p("x+y");
        let got = xy
            .substitute(&ruv, &[("x", r.clone()), ("y", r2v.clone())])
            .unwrap();
        assert_eq!(got, parse_poly("r + r^2*v", &ruv).unwrap());
    }

    #[test]
    fn quartic_blowup_valuation() {
        // first component of the transcritical X0 under x -> r*u, y -> r*v
        // factors out r^4 exactly
        let ruv = Vars::ruv();
        let r = MultiPoly::var(&ruv, "r").unwrap();
        let u = MultiPoly::var(&ruv, "u").unwrap();
        let v = MultiPoly::var(&ruv, "v").unwrap();
        let q = p("(y-x)*(y+x)*(y-x/2)*(y+x/2)");
        let sub = q
            .substitute(
                &ruv,
                &[("x", r.mul(&u).unwrap()), ("y", r.mul(&v).unwrap())],
            )
            .unwrap();
        assert_eq!(sub.valuation("r").unwrap(), Some(4));
        let reduced = sub.divide_by_power("r", 4).unwrap();
        let expect = parse_poly("(v-u)*(v+u)*(v-u/2)*(v+u/2)", &ruv).unwrap();
        assert_eq!(reduced, expect);
        // re-multiplying reconstructs
        assert_eq!(reduced.mul_by_power("r", 4).unwrap(), sub);
    }

    #[test]
    fn valuation_examples() {
        let ruv = Vars::ruv();
        let q = parse_poly("r^4 + r^5*u", &ruv).unwrap();
        assert_eq!(q.valuation("r").unwrap(), Some(4));
        assert_eq!(MultiPoly::zero(&ruv).valuation("r").unwrap(), None);
        assert_eq!(
            parse_poly("r^3*(u+1)", &ruv).unwrap().valuation("r").unwrap(),
            Some(3)
        );
    }

    #[test]
    fn eval_examples() {
        let q = p("x^2 + y");
        let v = q
            .eval_rational(&[("x", rat(1, 2)), ("y", rat(1, 4))])
            .unwrap();
        assert_eq!(v, rat(1, 2));
        assert!(MultiPoly::zero(&Vars::xy())
            .eval_rational(&[("x", rat(3, 1)), ("y", rat(9, 7))])
            .unwrap()
            .is_zero());
        // point on the branch y = x of the transcritical critical set
        let q = p("(y-x)*(y+x)*(y-x/2)*(y+x/2)");
        let v = q
            .eval_rational(&[("x", rat(1, 1)), ("y", rat(1, 1))])
            .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn exact_division() {
        let a = p("(x-y)^2*(x+y)");
        let d = p("x-y");
        let q = a.exact_div(&d).unwrap();
        assert_eq!(q, p("(x-y)*(x+y)"));
        assert!(p("x^2+y").exact_div(&p("x-y")).is_none());
    }

    #[test]
    fn var_mismatch_is_detected() {
        let a = p("x");
        let b = parse_poly("r", &Vars::ruv()).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), PolyError::VarMismatch);
    }

    #[test]
    fn unknown_variable_errors() {
        assert_eq!(
            p("x").differentiate("z").unwrap_err(),
            PolyError::UnknownVariable("z".into())
        );
    }
}
