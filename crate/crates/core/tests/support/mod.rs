//! Deterministic random generators shared by the property and acceptance
//! suites: small rationals, sparse polynomials in up to three variables, and
//! products of low-degree factors.

use std::sync::Arc;

use canard_core::poly::{rat, MultiPoly, Monomial, Rational, Vars};

/// Small deterministic PRNG (xorshift64*), so the acceptance suite is
/// reproducible run to run.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

pub fn rand_rational(rng: &mut Rng) -> Rational {
    let num = rng.int_in(-9, 9);
    let den = rng.int_in(1, 9);
    rat(num, den)
}

pub fn nonzero_rational(rng: &mut Rng) -> Rational {
    loop {
        let r = rand_rational(rng);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

/// Sparse random polynomial: up to `max_terms` terms, each exponent at most
/// `max_exp` (three variables gives total degree up to `3 * max_exp`).
pub fn rand_poly(rng: &mut Rng, vars: &Arc<Vars>, max_terms: u64, max_exp: u32) -> MultiPoly {
    let n = vars.len();
    let terms = 1 + rng.below(max_terms);
    let mut list = Vec::new();
    for _ in 0..terms {
        let mono = Monomial((0..n).map(|_| rng.below(max_exp as u64 + 1) as u32).collect());
        list.push((mono, rand_rational(rng)));
    }
    MultiPoly::from_terms(vars, list)
}

pub fn rand_nonzero_poly(rng: &mut Rng, vars: &Arc<Vars>, max_terms: u64, max_exp: u32) -> MultiPoly {
    loop {
        let p = rand_poly(rng, vars, max_terms, max_exp);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random non-constant factor of total degree <= 2 in `(x, y)`.
pub fn rand_small_factor(rng: &mut Rng, vars: &Arc<Vars>) -> MultiPoly {
    loop {
        let x = MultiPoly::var(vars, "x").unwrap();
        let y = MultiPoly::var(vars, "y").unwrap();
        let c = |r: &mut Rng| MultiPoly::constant(vars, rand_rational(r));
        let p = match rng.below(4) {
            // line a x + b y + c
            0 => x
                .scale(&rand_rational(rng))
                .add(&y.scale(&rand_rational(rng)))
                .unwrap()
                .add(&c(rng))
                .unwrap(),
            // parabola-like y - q(x)
            1 => {
                let q = x
                    .mul(&x)
                    .unwrap()
                    .scale(&rand_rational(rng))
                    .add(&x.scale(&rand_rational(rng)))
                    .unwrap()
                    .add(&c(rng))
                    .unwrap();
                y.sub(&q).unwrap()
            }
            // conic y^2 + a x^2 + b
            2 => y
                .mul(&y)
                .unwrap()
                .add(&x.mul(&x).unwrap().scale(&rand_rational(rng)))
                .unwrap()
                .add(&c(rng))
                .unwrap(),
            // skew product term x y + c
            _ => x.mul(&y).unwrap().add(&c(rng)).unwrap(),
        };
        if !p.is_constant() {
            return p;
        }
    }
}
