//! Real-root isolation for univariate rational polynomials: Sturm sequences
//! with exact bisection, the simplest-rational-in-interval search used to
//! recognise rational roots, and floating Newton polish for the rest.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{rat_to_f64, Rational};

/// A real root of a univariate polynomial, isolated to the requested width.
#[derive(Debug, Clone, PartialEq)]
pub enum RootLocation {
    /// Exactly confirmed rational root.
    Exact(Rational),
    /// Open-closed isolating interval `(lo, hi]` of width below the target,
    /// with a floating refinement.
    Interval { lo: Rational, hi: Rational, approx: f64 },
}

impl RootLocation {
    pub fn to_f64(&self) -> f64 {
        match self {
            RootLocation::Exact(r) => rat_to_f64(r),
            RootLocation::Interval { approx, .. } => *approx,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            RootLocation::Exact(r) => Some(r),
            _ => None,
        }
    }
}

fn trim(mut c: Vec<Rational>) -> Vec<Rational> {
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    c
}

pub fn eval(c: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for k in (0..c.len()).rev() {
        acc = acc * x + &c[k];
    }
    acc
}

pub fn eval_f64(c: &[Rational], x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (0..c.len()).rev() {
        acc = acc * x + rat_to_f64(&c[k]);
    }
    acc
}

fn derivative(c: &[Rational]) -> Vec<Rational> {
    if c.len() <= 1 {
        return alloc::vec![];
    }
    (1..c.len())
        .map(|k| &c[k] * Rational::from(BigInt::from(k as u64)))
        .collect()
}

/// Remainder of polynomial division over Q.
fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let q = r.last().unwrap() / &lb;
        for k in 0..=db {
            let idx = dr - db + k;
            let sub = &q * &b[k];
            r[idx] -= sub;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_gcd_univ(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        let lc = a.last().unwrap().clone();
        a.iter().map(|x| x / &lc).collect()
    }
}

fn exact_quotient(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    // long division, remainder known to vanish
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut q = alloc::vec![Rational::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r.last().unwrap() / &lb;
        q[dr - db] = c.clone();
        for k in 0..=db {
            let idx = dr - db + k;
            let sub = &c * &b[k];
            r[idx] -= sub;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    q
}

/// Sturm chain of a squarefree polynomial.
fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = alloc::vec![trim(p.to_vec()), derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            return chain;
        }
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            return chain;
        }
        chain.push(r.iter().map(|x| -x).collect());
    }
}

fn sign_changes_at(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for p in chain {
        let v = eval(p, x);
        let s: i8 = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
pub fn simplest_rational_in(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo <= &Rational::zero() && &Rational::zero() <= hi {
        return Rational::zero();
    }
    if hi < &Rational::zero() {
        return -simplest_rational_in(&-hi.clone(), &-lo.clone());
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    // 0 < lo <= hi
    let fl = lo.floor();
    let ceil_lo = lo.ceil();
    if &ceil_lo <= hi {
        return ceil_lo;
    }
    // both in (fl, fl+1): recurse on reciprocals of the fractional parts
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_positive(&(Rational::one() / b), &(Rational::one() / a));
    fl + Rational::one() / inner
}

/// Isolate all real roots of `coeffs` (constant term first) in `[lo, hi]` to
/// interval width below `width`. Rational roots are confirmed exactly; others
/// carry a Newton-polished floating approximation.
pub fn isolate_roots(
    coeffs: &[Rational],
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Vec<RootLocation> {
    let p = trim(coeffs.to_vec());
    if p.len() <= 1 {
        return alloc::vec![];
    }
    // squarefree reduction p / gcd(p, p')
    let g = poly_gcd_univ(&p, &derivative(&p));
    let sf = if g.len() > 1 { exact_quotient(&p, &g) } else { p.clone() };
    let chain = sturm_chain(&sf);

    let mut out: Vec<RootLocation> = Vec::new();
    if eval(&sf, lo).is_zero() {
        out.push(RootLocation::Exact(lo.clone()));
    }
    // roots in (lo, hi]
    let mut stack = alloc::vec![(lo.clone(), hi.clone())];
    let two = Rational::from(BigInt::from(2));
    while let Some((a, b)) = stack.pop() {
        let count = sign_changes_at(&chain, &a).saturating_sub(sign_changes_at(&chain, &b));
        if count == 0 {
            continue;
        }
        if count == 1 && (&b - &a) < *width {
            out.push(confirm_root(&sf, &a, &b));
            continue;
        }
        let mid = (&a + &b) / &two;
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|x, y| {
        x.to_f64()
            .partial_cmp(&y.to_f64())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    out
}

fn confirm_root(sf: &[Rational], a: &Rational, b: &Rational) -> RootLocation {
    // candidate rationals: interval ends and the simplest rational inside
    for cand in [b.clone(), a.clone(), simplest_rational_in(a, b)] {
        if eval(sf, &cand).is_zero() {
            return RootLocation::Exact(cand);
        }
    }
    // Newton polish from the midpoint
    let mut x = 0.5 * (rat_to_f64(a) + rat_to_f64(b));
    let d = derivative(sf);
    for _ in 0..60 {
        let f = eval_f64(sf, x);
        let fp = eval_f64(&d, x);
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        x -= step;
        if libm::fabs(step) < 1e-15 * (1.0 + libm::fabs(x)) {
            break;
        }
    }
    RootLocation::Interval { lo: a.clone(), hi: b.clone(), approx: x }
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    fn coeffs(list: &[i64]) -> Vec<Rational> {
        list.iter().map(|&v| rat(v, 1)).collect()
    }

    #[test]
    fn isolates_rational_roots_exactly() {
        // (x - 1/2)(x + 2) = x^2 + 3/2 x - 1
        let p = alloc::vec![rat(-1, 1), rat(3, 2), rat(1, 1)];
        let roots = isolate_roots(&p, &rat(-10, 1), &rat(10, 1), &rat(1, 1_000_000_000_000));
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], RootLocation::Exact(rat(-2, 1)));
        assert_eq!(roots[1], RootLocation::Exact(rat(1, 2)));
    }

    #[test]
    fn isolates_irrational_roots() {
        // x^2 - 2
        let p = coeffs(&[-2, 0, 1]);
        let roots = isolate_roots(&p, &rat(-10, 1), &rat(10, 1), &rat(1, 1_000_000_000_000));
        assert_eq!(roots.len(), 2);
        let sqrt2 = 1.4142135623730951_f64;
        assert!((roots[0].to_f64() + sqrt2).abs() < 1e-12);
        assert!((roots[1].to_f64() - sqrt2).abs() < 1e-12);
        assert!(roots[0].as_exact().is_none());
    }

    #[test]
    fn repeated_roots_reported_once() {
        // (x-1)^2 (x+3)
        let p = alloc::vec![rat(3, 1), rat(-5, 1), rat(1, 1), rat(1, 1)];
        let roots = isolate_roots(&p, &rat(-10, 1), &rat(10, 1), &rat(1, 1 << 40));
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], RootLocation::Exact(rat(-3, 1)));
        assert_eq!(roots[1], RootLocation::Exact(rat(1, 1)));
    }

    #[test]
    fn respects_search_interval() {
        let p = coeffs(&[-2, 0, 1]); // roots +-sqrt(2)
        let roots = isolate_roots(&p, &rat(0, 1), &rat(10, 1), &rat(1, 1 << 40));
        assert_eq!(roots.len(), 1);
        assert!(roots[0].to_f64() > 0.0);
    }

    #[test]
    fn root_at_left_endpoint_found() {
        let p = coeffs(&[0, 1]); // x
        let roots = isolate_roots(&p, &rat(0, 1), &rat(1, 1), &rat(1, 1 << 40));
        assert_eq!(roots, alloc::vec![RootLocation::Exact(rat(0, 1))]);
    }

    #[test]
    fn simplest_rational_examples() {
        assert_eq!(simplest_rational_in(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_rational_in(&rat(-1, 10), &rat(1, 10)), rat(0, 1));
        assert_eq!(simplest_rational_in(&rat(7, 10), &rat(8, 10)), rat(3, 4));
        // tight interval around 1/3
        assert_eq!(
            simplest_rational_in(&rat(333, 1000), &rat(334, 1000)),
            rat(1, 3)
        );
    }
}
