//! Squarefree factorisation (Musser, char 0) and splitting of squarefree
//! parts into irreducible rational factors of total degree at most two.
//!
//! The splitter is complete for inputs that are products of factors of total
//! degree <= 2 (lines, parabolas, conics): such factors are, after content
//! extraction, of one of the shapes
//!
//! * `c(x)` — free of `y` (handled by the univariate splitter),
//! * `y - q(x)` with `deg q <= 2` (monic in `y`),
//! * `(a1*x + a0)*y + b(x)` with `a1 != 0, deg b <= 2`,
//! * `y^2 + b(x)*y + c(x)` with `deg b <= 1, deg c <= 2`,
//!
//! and each shape is recovered by specialising `x` at a few rational points,
//! interpolating, and verifying by exact division. Residuals that resist the
//! search (irreducible components of degree >= 3, or inputs in three or more
//! variables) are kept unsplit and flagged.

use alloc::borrow::ToOwned;
use alloc::sync::Arc;
#[allow(unused_imports)]
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rat, MultiPoly, Monomial, PolyError, Rational, Vars};

/// One squarefree factor of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeFactor {
    /// Monic (graded-lex leading coefficient one) factor.
    pub factor: MultiPoly,
    pub multiplicity: u32,
    /// True when the factor is certified irreducible over the rationals
    /// (total degree <= 2, or split completely). False flags a part kept
    /// unsplit because the search is limited to degree-two components.
    pub irreducible: bool,
}

/// Result of [`MultiPoly::squarefree_factor`]: `unit * prod factor_i^mult_i`
/// reconstructs the input exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: Rational,
    pub factors: Vec<SquarefreeFactor>,
}

impl SquarefreeDecomposition {
    /// Exact reconstruction of the original polynomial.
    pub fn reconstruct(&self, vars: &Arc<Vars>) -> MultiPoly {
        let mut acc = MultiPoly::constant(vars, self.unit.clone());
        for f in &self.factors {
            acc = acc.mul(&f.factor.pow(f.multiplicity)).expect("same vars");
        }
        acc
    }

    pub fn all_irreducible(&self) -> bool {
        self.factors.iter().all(|f| f.irreducible)
    }
}

impl MultiPoly {
    /// Squarefree factorisation over the rationals, with degree-two splitting
    /// of each squarefree part. Errors on zero input.
    pub fn squarefree_factor(&self) -> Result<SquarefreeDecomposition, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroInput);
        }
        if self.is_constant() {
            return Ok(SquarefreeDecomposition {
                unit: self.constant_term(),
                factors: Vec::new(),
            });
        }
        // Musser: g_k = gcd(g_{k-1}, all partials); g_k = prod f_i^(e_i - k).
        let mut chain = alloc::vec![self.monic()];
        loop {
            let last = chain.last().unwrap();
            if last.is_constant() {
                break;
            }
            let mut g = last.clone();
            for name in self.vars().names() {
                let d = last.differentiate(name)?;
                if d.is_zero() {
                    continue;
                }
                g = g.gcd(&d)?;
                if g.is_constant() {
                    break;
                }
            }
            if !g.depends_on_any() {
                chain.push(MultiPoly::one(self.vars()));
                break;
            }
            chain.push(g.monic());
        }
        // w_k = g_{k-1}/g_k = product of distinct factors with mult >= k;
        // factors of multiplicity exactly k: w_k / w_{k+1}.
        let mut w: Vec<MultiPoly> = Vec::new();
        for k in 1..chain.len() {
            w.push(
                chain[k - 1]
                    .exact_div(&chain[k])
                    .expect("squarefree chain divides"),
            );
        }
        w.push(MultiPoly::one(self.vars()));
        let mut factors: Vec<SquarefreeFactor> = Vec::new();
        for k in 0..w.len() - 1 {
            let exact = w[k].exact_div(&w[k + 1]).expect("w chain divides");
            if exact.is_constant() {
                continue;
            }
            let (parts, complete) = split_squarefree_deg2(&exact.monic());
            for part in parts {
                let irreducible = part.total_degree() <= 2 || complete;
                // Degree > 2 parts are certified only when the search is
                // complete; keep the flag honest.
                let irreducible = irreducible && part.total_degree() <= 2;
                factors.push(SquarefreeFactor {
                    factor: part,
                    multiplicity: (k + 1) as u32,
                    irreducible,
                });
            }
        }
        // Unit = input / reconstruction of monic factors.
        let mut prod = MultiPoly::one(self.vars());
        for f in &factors {
            prod = prod.mul(&f.factor.pow(f.multiplicity))?;
        }
        let unit = self
            .leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::one)
            / prod.leading_coeff();
        debug_assert_eq!(prod.scale(&unit), *self, "reconstruction");
        Ok(SquarefreeDecomposition { unit, factors })
    }

    fn depends_on_any(&self) -> bool {
        (0..self.vars().len()).any(|i| self.depends_on(i))
    }
}

/// Split a squarefree monic polynomial into irreducible factors of total
/// degree <= 2 where possible. Returns monic factors (product = input up to a
/// unit, which is one for monic inputs) and whether the split is complete.
pub fn split_squarefree_deg2(p: &MultiPoly) -> (Vec<MultiPoly>, bool) {
    let active: Vec<usize> = (0..p.vars().len()).filter(|&i| p.depends_on(i)).collect();
    match active.len() {
        0 => (alloc::vec![], true),
        1 => split_univariate(p, active[0]),
        2 => split_bivariate(p, active[0], active[1]),
        _ => (alloc::vec![p.clone()], false),
    }
}

// ---------------------------------------------------------------------------
// Univariate splitting
// ---------------------------------------------------------------------------

/// Dense rational coefficients of a univariate polynomial (constant first).
fn univ_coeffs(p: &MultiPoly, var: usize) -> Vec<Rational> {
    let d = p.degree_in(var) as usize;
    let mut c = alloc::vec![Rational::zero(); d + 1];
    for (m, co) in p.terms() {
        c[m.0[var] as usize] = co.clone();
    }
    c
}

fn poly_from_univ(vars: &Arc<Vars>, var: usize, coeffs: &[Rational]) -> MultiPoly {
    let n = vars.len();
    MultiPoly::from_terms(
        vars,
        coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
            let mut e = alloc::vec![0u32; n];
            e[var] = k as u32;
            (Monomial(e), c.clone())
        }),
    )
}

fn split_univariate(p: &MultiPoly, var: usize) -> (Vec<MultiPoly>, bool) {
    let coeffs = univ_coeffs(p, var);
    let (pieces, complete) = univ_split(&coeffs);
    let out = pieces
        .iter()
        .map(|c| poly_from_univ(p.vars(), var, c).monic())
        .collect();
    (out, complete)
}

/// Split univariate rational coefficients (constant first) into monic pieces
/// of degree <= 2 where possible; incomplete residuals are returned whole.
fn univ_split(coeffs: &[Rational]) -> (Vec<Vec<Rational>>, bool) {
    let mut c = trim(coeffs.to_vec());
    let mut out: Vec<Vec<Rational>> = Vec::new();
    // x^k content
    let val = c.iter().position(|x| !x.is_zero()).unwrap_or(0);
    for _ in 0..val {
        out.push(alloc::vec![Rational::zero(), Rational::one()]);
    }
    c.drain(..val);
    // rational roots
    loop {
        if c.len() <= 1 {
            return (out, true);
        }
        if c.len() <= 3 {
            break;
        }
        match find_rational_root(&c) {
            Some(r) => {
                out.push(alloc::vec![-r.clone(), Rational::one()]);
                c = deflate(&c, &r);
            }
            None => break,
        }
    }
    match c.len() {
        0 | 1 => (out, true),
        2 => {
            out.push(monicize(&c));
            (out, true)
        }
        3 => {
            // quadratic: split iff the discriminant is a rational square
            let q = monicize(&c);
            let (b, c0) = (q[1].clone(), q[0].clone());
            let disc = &b * &b - rat(4, 1) * &c0;
            if let Some(s) = rational_sqrt(&disc) {
                let r1 = (-&b + &s) / rat(2, 1);
                let r2 = (-&b - &s) / rat(2, 1);
                out.push(alloc::vec![-r1, Rational::one()]);
                out.push(alloc::vec![-r2, Rational::one()]);
            } else {
                out.push(q);
            }
            (out, true)
        }
        5 => {
            // quartic without rational roots: try an integer quadratic pair
            match quartic_quadratic_pair(&c) {
                Some((f, g)) => {
                    let (mut fs, fc) = univ_split(&f);
                    let (mut gs, gc) = univ_split(&g);
                    out.append(&mut fs);
                    out.append(&mut gs);
                    (out, fc && gc)
                }
                None => {
                    out.push(monicize(&c));
                    (out, true) // quartic certified to have no deg<=2 split
                }
            }
        }
        _ => {
            out.push(monicize(&c));
            (out, false)
        }
    }
}

fn trim(mut c: Vec<Rational>) -> Vec<Rational> {
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    c
}

fn monicize(c: &[Rational]) -> Vec<Rational> {
    let lc = c.last().unwrap().clone();
    c.iter().map(|x| x / &lc).collect()
}

/// Synthetic division by (x - r); assumes r is a root.
fn deflate(c: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = c.len();
    let mut q = alloc::vec![Rational::zero(); n - 1];
    let mut acc = Rational::zero();
    for k in (1..n).rev() {
        acc = &c[k] + &acc * r;
        q[k - 1] = acc.clone();
    }
    q
}

fn eval_univ(c: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for k in (0..c.len()).rev() {
        acc = acc * x + &c[k];
    }
    acc
}

/// Clear denominators and divide by the integer content.
fn primitive_integer(c: &[Rational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for x in c {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * &den / x.denom()).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.iter().map(|v| v / &g).collect()
    }
}

const DIVISOR_ENUM_CAP: u64 = 1_000_000;

/// All positive divisors of |n|, or None when |n| is too large to enumerate.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return Some(alloc::vec![]);
    }
    let nu = n.to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    let mut steps = 0u64;
    while d.checked_mul(d).map(|dd| dd <= nu).unwrap_or(false) {
        steps += 1;
        if steps > DIVISOR_ENUM_CAP {
            return None;
        }
        if nu % d == 0 {
            out.push(BigInt::from(d));
            if d != nu / d {
                out.push(BigInt::from(nu / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// One rational root of the polynomial, if any (rational root theorem on the
/// primitive integer form).
fn find_rational_root(c: &[Rational]) -> Option<Rational> {
    if eval_univ(c, &Rational::zero()).is_zero() {
        return Some(Rational::zero());
    }
    let ints = primitive_integer(c);
    let a0 = ints.first()?.clone();
    let an = ints.last()?.clone();
    let ps = divisors(&a0)?;
    let qs = divisors(&an)?;
    for pnum in &ps {
        for qden in &qs {
            for sign in [1i64, -1] {
                let cand = Rational::new(pnum * BigInt::from(sign), qden.clone());
                if eval_univ(c, &cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Try to write a rational-root-free quartic as a product of two rational
/// quadratics (integer divisor-pair enumeration on the primitive form).
fn quartic_quadratic_pair(c: &[Rational]) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let a = primitive_integer(c); // a0..a4
    let lead_divs = divisors(&a[4])?;
    let const_divs = divisors(&a[0])?;
    for b2 in &lead_divs {
        let c2 = &a[4] / b2;
        for b0d in &const_divs {
            for s0 in [1i64, -1] {
                let b0 = b0d * BigInt::from(s0);
                let c0 = &a[0] / &b0;
                // Solve  a3 = b2*c1 + b1*c2,  a1 = b1*c0 + b0*c1  for (b1,c1).
                let det = b2 * &c0 - &b0 * &c2;
                let (b1, c1) = if det.is_zero() {
                    continue;
                } else {
                    let b1n = &a[3] * &c0 - &b0 * &a[1];
                    let c1n = b2 * &a[1] - &a[3] * &c2;
                    if (&b1n % &det).is_zero() && (&c1n % &det).is_zero() {
                        (b1n / &det, c1n / &det)
                    } else {
                        continue;
                    }
                };
                if &a[2] - (b2 * &c0 + &b1 * &c1 + &b0 * &c2) == BigInt::zero() {
                    let f = alloc::vec![
                        Rational::from(b0.clone()),
                        Rational::from(b1),
                        Rational::from(b2.clone())
                    ];
                    let g = alloc::vec![
                        Rational::from(c0),
                        Rational::from(c1),
                        Rational::from(c2)
                    ];
                    return Some((monicize(&f), monicize(&g)));
                }
            }
        }
    }
    None
}

/// Square root of a non-negative rational if it is an exact square.
fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Bivariate splitting
// ---------------------------------------------------------------------------

fn split_bivariate(p: &MultiPoly, vx: usize, vy: usize) -> (Vec<MultiPoly>, bool) {
    let mut out: Vec<MultiPoly> = Vec::new();
    let mut complete = true;

    // y-content: gcd of the y-coefficients is free of y.
    let mut rem = p.clone();
    let coeffs = rem.univariate_in(vy);
    let mut cont = MultiPoly::zero(p.vars());
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        cont = if cont.is_zero() { c.clone() } else { cont.gcd(c).expect("nonzero") };
        if cont.is_constant() {
            break;
        }
    }
    if !cont.is_constant() {
        let (mut parts, ok) = split_univariate(&cont.monic(), vx);
        complete &= ok;
        out.append(&mut parts);
        rem = rem.exact_div(&cont.monic()).expect("content divides").monic();
    }

    'peel: loop {
        if rem.is_constant() {
            return (out, complete);
        }
        if !rem.depends_on(vy) {
            let (mut parts, ok) = split_univariate(&rem.monic(), vx);
            complete &= ok;
            out.append(&mut parts);
            return (out, complete);
        }
        if rem.total_degree() <= 2 {
            // base case: a line (irreducible) or a conic (maybe two lines)
            let mut parts = split_conic(&rem, vx, vy);
            out.append(&mut parts);
            return (out, complete);
        }
        // shape `y - q(x)`, deg q <= 2 (covers rational lines and parabolas)
        if let Some(f) = find_monic_y_factor(&rem, vx, vy) {
            rem = rem.exact_div(&f).expect("verified").monic();
            out.push(f);
            continue 'peel;
        }
        // shape `(a1*x + a0)*y + b(x)`, a1 != 0
        if let Some(f) = find_skew_linear_factor(&rem, vx, vy) {
            rem = rem.exact_div(&f).expect("verified").monic();
            out.push(f);
            continue 'peel;
        }
        // shape `y^2 + b(x)*y + c(x)`
        if let Some(f) = find_monic_quadratic_factor(&rem, vx, vy) {
            rem = rem.exact_div(&f).expect("verified").monic();
            out.push(f);
            continue 'peel;
        }
        // nothing found: keep the residual unsplit and flag it
        out.push(rem.monic());
        return (out, false);
    }
}

/// Split a total-degree-two polynomial into two rational lines when possible.
fn split_conic(q: &MultiPoly, vx: usize, vy: usize) -> Vec<MultiPoly> {
    if q.total_degree() <= 1 {
        return alloc::vec![q.monic()];
    }
    // coefficients a x^2 + b x y + c y^2 + d x + e y + f
    let coef = |ex: u32, ey: u32| -> Rational {
        q.terms()
            .find(|(m, _)| m.0[vx] == ex && m.0[vy] == ey)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    };
    let (a, b, c) = (coef(2, 0), coef(1, 1), coef(0, 2));
    let (d, e, f) = (coef(1, 0), coef(0, 1), coef(0, 0));
    let vars = q.vars();
    let x = MultiPoly::var(vars, &vars.name(vx).to_owned()).unwrap();
    let y = MultiPoly::var(vars, &vars.name(vy).to_owned()).unwrap();
    let lin =
        |cx: Rational, cy: Rational, c0: Rational| -> MultiPoly {
            x.scale(&cx)
                .add(&y.scale(&cy))
                .unwrap()
                .add(&MultiPoly::constant(vars, c0))
                .unwrap()
        };
    let try_pair = |l1: MultiPoly, l2: MultiPoly| -> Option<Vec<MultiPoly>> {
        let prod = l1.mul(&l2).ok()?;
        let scale = q.leading_coeff() / prod.leading_coeff();
        if prod.scale(&scale) == *q {
            Some(alloc::vec![l1.monic(), l2.monic()])
        } else {
            None
        }
    };
    if !a.is_zero() {
        // roots in x: 2a x + (b y + d) -/+ s(y),  s(y)^2 = (by+d)^2 - 4a(cy^2+ey+f)
        let aa = rat(4, 1) * &a;
        let dy2 = &b * &b - &aa * &c;
        let dy1 = rat(2, 1) * &b * &d - &aa * &e;
        let dy0 = &d * &d - &aa * &f;
        if let Some((s1, s0)) = quadratic_perfect_square(&dy2, &dy1, &dy0) {
            let two_a = rat(2, 1) * &a;
            let l1 = lin(two_a.clone(), &b + &s1, &d + &s0);
            let l2 = lin(two_a, &b - &s1, &d - &s0);
            if let Some(pair) = try_pair(l1, l2) {
                return pair;
            }
        }
    } else if !c.is_zero() {
        let cc = rat(4, 1) * &c;
        let dx2 = &b * &b - &cc * &a;
        let dx1 = rat(2, 1) * &b * &e - &cc * &d;
        let dx0 = &e * &e - &cc * &f;
        if let Some((s1, s0)) = quadratic_perfect_square(&dx2, &dx1, &dx0) {
            let two_c = rat(2, 1) * &c;
            let l1 = lin(&b + &s1, two_c.clone(), &e + &s0);
            let l2 = lin(&b - &s1, two_c, &e - &s0);
            if let Some(pair) = try_pair(l1, l2) {
                return pair;
            }
        }
    } else if !b.is_zero() {
        // b x y + d x + e y + f = (b x + e)(b y + d)/b  iff  b f = d e
        if &b * &f == &d * &e {
            let l1 = lin(b.clone(), Rational::zero(), e.clone());
            let l2 = lin(Rational::zero(), b.clone(), d.clone());
            if let Some(pair) = try_pair(l1, l2) {
                return pair;
            }
        }
    }
    alloc::vec![q.monic()]
}

/// Is `A t^2 + B t + C` a perfect square `(s1 t + s0)^2` over the rationals?
fn quadratic_perfect_square(
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Option<(Rational, Rational)> {
    if a.is_zero() {
        if !b.is_zero() {
            return None;
        }
        return rational_sqrt(c).map(|s0| (Rational::zero(), s0));
    }
    let s1 = rational_sqrt(a)?;
    let s0 = b / (rat(2, 1) * &s1);
    if &(&s0 * &s0) == c {
        Some((s1, s0))
    } else {
        None
    }
}

/// Sample x-values where the y-leading coefficient does not vanish.
fn good_samples(p: &MultiPoly, vx: usize, vy: usize, count: usize) -> Vec<Rational> {
    let dy = p.degree_in(vy);
    let lc = p.coeff_of(vy, dy);
    let mut out = Vec::new();
    let mut k: i64 = 0;
    while out.len() < count && k < 64 {
        for cand in [k, -k] {
            if out.len() >= count {
                break;
            }
            let c = Rational::from(BigInt::from(cand));
            let ly = eval_in_x(&lc, vx, &c);
            if !ly.is_zero() && !out.contains(&c) {
                out.push(c);
            }
        }
        k += 1;
    }
    out
}

/// Evaluate a polynomial of the two active variables at x = c, producing a
/// univariate polynomial in y (as dense rational coefficients).
fn specialize_x(p: &MultiPoly, vx: usize, vy: usize, c: &Rational) -> Vec<Rational> {
    let dy = p.degree_in(vy) as usize;
    let mut out = alloc::vec![Rational::zero(); dy + 1];
    for (m, co) in p.terms() {
        let mut t = co.clone();
        for _ in 0..m.0[vx] {
            t *= c;
        }
        out[m.0[vy] as usize] += t;
    }
    trim(out)
}

fn eval_in_x(p: &MultiPoly, vx: usize, c: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for (m, co) in p.terms() {
        let mut t = co.clone();
        for _ in 0..m.0[vx] {
            t *= c;
        }
        acc += t;
    }
    acc
}

/// All rational roots (with repetition collapsed) of univariate coefficients.
fn all_rational_roots(c: &[Rational]) -> Vec<Rational> {
    let mut c = trim(c.to_vec());
    let mut out = Vec::new();
    if c.is_empty() {
        return out;
    }
    if c.iter().take(1).any(|x| x.is_zero()) && c.len() > 1 {
        out.push(Rational::zero());
        while c.first().map(|x| x.is_zero()).unwrap_or(false) && c.len() > 1 {
            c.remove(0);
        }
    }
    while c.len() > 1 {
        match find_rational_root(&c) {
            Some(r) => {
                if !out.contains(&r) {
                    out.push(r.clone());
                }
                c = deflate(&c, &r);
            }
            None => break,
        }
    }
    out
}

/// Lagrange interpolation through (x_i, v_i); returns dense coefficients.
fn lagrange(xs: &[Rational], vs: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut acc = alloc::vec![Rational::zero(); n];
    for i in 0..n {
        // basis_i(t) = prod_{j != i} (t - x_j) / (x_i - x_j)
        let mut basis = alloc::vec![Rational::one()];
        let mut denom = Rational::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            // multiply basis by (t - x_j)
            let mut next = alloc::vec![Rational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let w = &vs[i] / denom;
        for (k, b) in basis.iter().enumerate() {
            acc[k] += b * &w;
        }
    }
    trim(acc)
}

/// Find a factor `y - q(x)` with `deg q <= 2` by interpolating rational roots
/// of three specialisations and verifying by exact division.
fn find_monic_y_factor(p: &MultiPoly, vx: usize, vy: usize) -> Option<MultiPoly> {
    let xs = good_samples(p, vx, vy, 3);
    if xs.len() < 3 {
        return None;
    }
    let roots: Vec<Vec<Rational>> = xs
        .iter()
        .map(|c| all_rational_roots(&specialize_x(p, vx, vy, c)))
        .collect();
    if roots.iter().any(|r| r.is_empty()) {
        return None;
    }
    let vars = p.vars();
    let y = MultiPoly::var(vars, &vars.name(vy).to_owned()).unwrap();
    for r0 in &roots[0] {
        for r1 in &roots[1] {
            for r2 in &roots[2] {
                let q = lagrange(&xs, &[r0.clone(), r1.clone(), r2.clone()]);
                if q.len() > 3 {
                    continue;
                }
                let qpoly = poly_from_univ(vars, vx, &q);
                let cand = y.sub(&qpoly).expect("same vars");
                if p.exact_div(&cand).is_some() {
                    return Some(cand.monic());
                }
            }
        }
    }
    None
}

/// Find a factor `(a1*x + a0)*y + b(x)` with `a1 != 0`, `deg b <= 2`:
/// four-point interpolation with the cubic coefficient of b forced to zero.
fn find_skew_linear_factor(p: &MultiPoly, vx: usize, vy: usize) -> Option<MultiPoly> {
    let xs = good_samples(p, vx, vy, 4);
    if xs.len() < 4 {
        return None;
    }
    let roots: Vec<Vec<Rational>> = xs
        .iter()
        .map(|c| all_rational_roots(&specialize_x(p, vx, vy, c)))
        .collect();
    if roots.iter().any(|r| r.is_empty()) {
        return None;
    }
    let vars = p.vars();
    let x = MultiPoly::var(vars, &vars.name(vx).to_owned()).unwrap();
    let y = MultiPoly::var(vars, &vars.name(vy).to_owned()).unwrap();
    let mut idx = [0usize; 4];
    loop {
        let rs: Vec<Rational> = (0..4).map(|i| roots[i][idx[i]].clone()).collect();
        // b(x_i) = -(a0 + a1 x_i) r_i must interpolate to degree <= 2:
        // the cubic coefficient of the interpolant is linear in (a0, a1).
        // cubic coeff of interp(v_i) = sum_i v_i / prod_{j!=i}(x_i - x_j).
        let mut c0 = Rational::zero(); // coefficient of a0
        let mut c1 = Rational::zero(); // coefficient of a1
        for i in 0..4 {
            let mut den = Rational::one();
            for j in 0..4 {
                if j != i {
                    den *= &xs[i] - &xs[j];
                }
            }
            let w = -&rs[i] / den;
            c0 += &w;
            c1 += &w * &xs[i];
        }
        let (a0, a1) = if c1.is_zero() && c0.is_zero() {
            (Rational::zero(), Rational::one())
        } else {
            (c1.clone(), -c0.clone())
        };
        if !a1.is_zero() {
            let vs: Vec<Rational> = (0..4).map(|i| -(&a0 + &a1 * &xs[i]) * &rs[i]).collect();
            let b = lagrange(&xs, &vs);
            if b.len() <= 3 {
                let a = x.scale(&a1).add(&MultiPoly::constant(vars, a0.clone())).unwrap();
                let cand = a
                    .mul(&y)
                    .unwrap()
                    .add(&poly_from_univ(vars, vx, &b))
                    .unwrap();
                if !cand.is_constant() && p.exact_div(&cand).is_some() {
                    return Some(cand.monic());
                }
            }
        }
        // advance the multi-index
        let mut i = 0;
        loop {
            if i == 4 {
                return None;
            }
            idx[i] += 1;
            if idx[i] < roots[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Find a factor `y^2 + b(x)*y + c(x)` (`deg b <= 1`, `deg c <= 2`) from monic
/// quadratic divisors of three specialisations.
fn find_monic_quadratic_factor(p: &MultiPoly, vx: usize, vy: usize) -> Option<MultiPoly> {
    if p.degree_in(vy) < 2 {
        return None;
    }
    let xs = good_samples(p, vx, vy, 3);
    if xs.len() < 3 {
        return None;
    }
    let divisors: Vec<Vec<(Rational, Rational)>> = xs
        .iter()
        .map(|c| monic_quadratic_divisors(&specialize_x(p, vx, vy, c)))
        .collect();
    if divisors.iter().any(|d| d.is_empty()) {
        return None;
    }
    let vars = p.vars();
    let y = MultiPoly::var(vars, &vars.name(vy).to_owned()).unwrap();
    for d0 in &divisors[0] {
        for d1 in &divisors[1] {
            for d2 in &divisors[2] {
                let b = lagrange(&xs, &[d0.0.clone(), d1.0.clone(), d2.0.clone()]);
                let c = lagrange(&xs, &[d0.1.clone(), d1.1.clone(), d2.1.clone()]);
                if b.len() > 2 || c.len() > 3 {
                    continue;
                }
                let cand = y
                    .mul(&y)
                    .unwrap()
                    .add(&poly_from_univ(vars, vx, &b).mul(&y).unwrap())
                    .unwrap()
                    .add(&poly_from_univ(vars, vx, &c))
                    .unwrap();
                if p.exact_div(&cand).is_some() {
                    return Some(cand.monic());
                }
            }
        }
    }
    None
}

/// Monic quadratic divisors `y^2 + b y + c` of a univariate polynomial,
/// assembled from its degree <= 2 factor pieces.
fn monic_quadratic_divisors(coeffs: &[Rational]) -> Vec<(Rational, Rational)> {
    let (pieces, _) = univ_split(coeffs);
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    let mut push = |b: Rational, c: Rational| {
        if !out.contains(&(b.clone(), c.clone())) {
            out.push((b, c));
        }
    };
    let linears: Vec<&Vec<Rational>> = pieces.iter().filter(|p| p.len() == 2).collect();
    for q in pieces.iter().filter(|p| p.len() == 3) {
        push(q[1].clone(), q[0].clone());
    }
    for i in 0..linears.len() {
        for j in i..linears.len() {
            // (y + pi)(y + pj) — repeated linear pieces allowed
            let (pi, pj) = (&linears[i][0], &linears[j][0]);
            push(pi + pj, pi * pj);
        }
    }
    if out.len() > 24 {
        out.truncate(24);
    }
    out
}
