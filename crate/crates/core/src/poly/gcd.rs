//! Multivariate gcd over the rationals via the subresultant pseudo-remainder
//! sequence on integer-primitive representatives, plus resultants through
//! fraction-free (Bareiss) elimination on the Sylvester matrix.

use alloc::borrow::ToOwned;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
#[cfg(test)]
use num_traits::Zero;

use super::{MultiPoly, PolyError, Rational};

impl MultiPoly {
    /// A greatest common divisor, normalised so its graded-lex leading
    /// coefficient is one. Errors only when both inputs are zero.
    pub fn gcd(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        Ok(gcd_inner(&integer_primitive(self), &integer_primitive(other)).monic())
    }
}

/// Scale a nonzero polynomial so its coefficients are coprime integers (the
/// zero polynomial is returned unchanged). Keeps every later division inside
/// the integers, where content extraction is a plain integer gcd.
fn integer_primitive(p: &MultiPoly) -> MultiPoly {
    use num_traits::Zero as _;
    if p.is_zero() {
        return p.clone();
    }
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    let mut content = BigInt::from(0);
    for (_, c) in p.terms() {
        let int = c.numer() * &den / c.denom();
        content = content.gcd(&int);
    }
    if content.is_zero() {
        return p.clone();
    }
    p.scale(&Rational::new(den, content))
}

fn gcd_inner(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return q.clone();
    }
    if q.is_zero() {
        return p.clone();
    }
    if p.is_constant() || q.is_constant() {
        return MultiPoly::one(p.vars());
    }
    // Main variable: the first declared variable on which either depends.
    let var = (0..p.vars().len())
        .find(|&i| p.depends_on(i) || q.depends_on(i))
        .expect("non-constant operands");

    let (cp, pp) = content_and_primitive(p, var);
    let (cq, pq) = content_and_primitive(q, var);
    let cont_gcd = gcd_inner(&cp, &cq);
    let g = subresultant_gcd(&pp, &pq, var);
    cont_gcd.mul(&g).expect("same vars")
}

/// Split into (content, primitive part) with respect to `var`: the content is
/// the gcd of the `var`-coefficients, and `p = content * primitive` up to a
/// rational unit absorbed into the primitive part.
fn content_and_primitive(p: &MultiPoly, var: usize) -> (MultiPoly, MultiPoly) {
    if !p.depends_on(var) {
        // contributes through the content only
        return (integer_primitive(p), MultiPoly::one(p.vars()));
    }
    let coeffs = p.univariate_in(var);
    let mut cont = MultiPoly::zero(p.vars());
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        cont = if cont.is_zero() {
            integer_primitive(c)
        } else {
            gcd_inner(&cont, &integer_primitive(c))
        };
        if cont.is_constant() {
            break;
        }
    }
    if cont.is_constant() {
        return (MultiPoly::one(p.vars()), p.clone());
    }
    let prim = p.exact_div(&cont).expect("content divides");
    (cont, prim)
}

/// Subresultant PRS gcd of two polynomials primitive in `var`; returns the
/// primitive part of the last nonzero remainder (one when coprime in `var`).
fn subresultant_gcd(p: &MultiPoly, q: &MultiPoly, var: usize) -> MultiPoly {
    let vars = p.vars().clone();
    let (mut a, mut b) = if p.degree_in(var) >= q.degree_in(var) {
        (p.clone(), q.clone())
    } else {
        (q.clone(), p.clone())
    };
    let mut g = MultiPoly::one(&vars);
    let mut h = MultiPoly::one(&vars);
    loop {
        let delta = a.degree_in(var) - b.degree_in(var);
        let r = pseudo_rem(&a, &b, var);
        if r.is_zero() {
            return content_and_primitive(&b, var).1;
        }
        if !r.depends_on(var) {
            // nonzero remainder free of `var`: the primitive parts are coprime
            return MultiPoly::one(&vars);
        }
        a = b;
        // b = r / (g * h^delta); exact by the subresultant recurrence
        let divisor = g.mul(&h.pow(delta)).expect("same vars");
        b = r
            .exact_div(&divisor)
            .expect("subresultant division is exact");
        g = a.coeff_of(var, a.degree_in(var));
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant h-update is exact"),
        };
    }
}

/// Pseudo-remainder of `a` by `b` in the main variable `var`:
/// `lc(b)^(deg a - deg b + 1) * a = q*b + rem` with `deg_var rem < deg_var b`.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let db = b.degree_in(var);
    let lb = b.coeff_of(var, db);
    let mut r = a.clone();
    let mut steps = a.degree_in(var) as i64 - db as i64 + 1;
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = r.coeff_of(var, dr);
        // r <- lc(b)*r - lc(r)*x^(dr-db)*b
        let shifted = b
            .mul(&lr)
            .expect("same vars")
            .mul_by_power_idx(var, dr - db);
        r = r.mul(&lb).expect("same vars").sub(&shifted).expect("same vars");
        steps -= 1;
    }
    // Pad remaining lc(b) powers so the pseudo-remainder identity holds.
    while steps > 0 {
        r = r.mul(&lb).expect("same vars");
        steps -= 1;
    }
    r
}

impl MultiPoly {
    fn mul_by_power_idx(&self, var: usize, k: u32) -> MultiPoly {
        let name = self.vars().name(var).to_owned();
        self.mul_by_power(&name, k).expect("var in list")
    }

    /// Resultant of `self` and `other` eliminating `var`, computed by
    /// fraction-free Gaussian elimination on the Sylvester matrix. The result
    /// does not involve `var`.
    pub fn resultant(&self, other: &MultiPoly, var: &str) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let idx = self
            .vars()
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero(self.vars()));
        }
        let m = self.degree_in(idx) as usize;
        let n = other.degree_in(idx) as usize;
        if m == 0 {
            return Ok(self.pow(n as u32));
        }
        if n == 0 {
            return Ok(other.pow(m as u32));
        }
        let pc = self.univariate_in(idx); // constant term first
        let qc = other.univariate_in(idx);
        let dim = m + n;
        let zero = MultiPoly::zero(self.vars());
        let mut a: Vec<Vec<MultiPoly>> = alloc::vec![alloc::vec![zero.clone(); dim]; dim];
        // n rows of p coefficients (highest degree first), then m rows of q.
        for row in 0..n {
            for (k, c) in pc.iter().enumerate() {
                a[row][row + (m - k)] = c.clone();
            }
        }
        for row in 0..m {
            for (k, c) in qc.iter().enumerate() {
                a[n + row][row + (n - k)] = c.clone();
            }
        }
        bareiss_determinant(a)
    }
}

/// Fraction-free determinant; exact over any integral domain with exact
/// division.
fn bareiss_determinant(mut a: Vec<Vec<MultiPoly>>) -> Result<MultiPoly, PolyError> {
    let n = a.len();
    if n == 0 {
        return Err(PolyError::ZeroInput);
    }
    let vars = a[0][0].vars().clone();
    let mut sign = Rational::one();
    let mut prev = MultiPoly::one(&vars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // pivot search
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(MultiPoly::zero(&vars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .mul(&a[k][k])?
                    .sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = num.exact_div(&prev).ok_or(PolyError::InexactDivision)?;
            }
            a[i][k] = MultiPoly::zero(&vars);
        }
        prev = a[k][k].clone();
    }
    Ok(a[n - 1][n - 1].scale(&sign))
}
