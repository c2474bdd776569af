//! Roots of univariate polynomials lying in the base field.
//!
//! Over the rationals: square-free part, roots modulo a small prime, Newton lifting
//! past the coefficient bound, rational reconstruction, exact verification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{Field, Scalar};

/// Dense univariate polynomial, `coeffs[k]` multiplies `t^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub field: Field,
    pub coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> UniPoly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    fn derivative(&self) -> UniPoly {
        let coeffs =
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * &Scalar::from_int(self.field, k as i64)).collect();
        UniPoly::new(self.field, coeffs)
    }

    /// Remainder and quotient of division by a nonzero `d`.
    fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.coeffs[dd].inv().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![Scalar::zero(self.field); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = &r[r.len() - 1] * &lc_inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = &r[k + i] - &(&c * dc);
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Scalar::is_zero) {
                r.pop();
            }
        }
        (UniPoly::new(self.field, q), UniPoly::new(self.field, r))
    }

    fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn square_free(&self) -> UniPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }
}

/// Distinct roots in the coefficient field, ascending.
pub fn rational_roots(f: &UniPoly) -> Vec<Scalar> {
    if f.is_zero() {
        panic!("every element is a root of the zero polynomial");
    }
    let mut roots = Vec::new();
    // strip the factor t^k
    let k = f.coeffs.iter().take_while(|c| c.is_zero()).count();
    if k > 0 {
        roots.push(Scalar::zero(f.field));
    }
    let g = UniPoly::new(f.field, f.coeffs[k..].to_vec());
    if g.degree().unwrap_or(0) > 0 {
        let g = g.square_free();
        match f.field {
            Field::Prime(p) => roots.extend(prime_field_roots(&g, p)),
            Field::Rationals => roots.extend(rational_field_roots(&g)),
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn prime_field_roots(g: &UniPoly, p: u64) -> Vec<Scalar> {
    if p <= 1 << 20 {
        return (0..p as i64).map(|v| Scalar::from_int(g.field, v)).filter(|x| g.eval(x).is_zero()).collect();
    }
    equal_degree_roots(g, p)
}

/// Roots over a large prime field: split gcd(g, t^p - t) by random shifts.
fn equal_degree_roots(g: &UniPoly, p: u64) -> Vec<Scalar> {
    let field = g.field;
    let t = UniPoly::new(field, vec![Scalar::zero(field), Scalar::one(field)]);
    let tp = powmod(&t, p, g);
    let lin = UniPoly::new(field, sub_coeffs(&tp.coeffs, &t.coeffs, field));
    let h = g.gcd(&lin);
    let mut out = Vec::new();
    let mut stack = vec![h];
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    while let Some(f) = stack.pop() {
        match f.degree() {
            None | Some(0) => continue,
            Some(1) => {
                let r = -&(&f.coeffs[0] / &f.coeffs[1]);
                out.push(r);
                continue;
            }
            _ => {}
        }
        loop {
            let a = Scalar::from_int(field, rng.gen_range(0..p) as i64);
            let shift = UniPoly::new(field, vec![a, Scalar::one(field)]);
            let w = powmod(&shift, (p - 1) / 2, &f);
            let mut wc = w.coeffs.clone();
            if wc.is_empty() {
                wc.push(Scalar::zero(field));
            }
            wc[0] = &wc[0] - &Scalar::one(field);
            let d = f.gcd(&UniPoly::new(field, wc));
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) < f.degree() {
                let (q, _) = f.div_rem(&d);
                stack.push(d);
                stack.push(q);
                break;
            }
        }
    }
    out
}

fn sub_coeffs(a: &[Scalar], b: &[Scalar], field: Field) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| Scalar::zero(field));
            let y = b.get(i).cloned().unwrap_or_else(|| Scalar::zero(field));
            &x - &y
        })
        .collect()
}

fn mulmod(a: &UniPoly, b: &UniPoly, m: &UniPoly) -> UniPoly {
    if a.is_zero() || b.is_zero() {
        return UniPoly::new(a.field, Vec::new());
    }
    let mut c = vec![Scalar::zero(a.field); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            c[i + j] = &c[i + j] + &(x * y);
        }
    }
    UniPoly::new(a.field, c).div_rem(m).1
}

fn powmod(base: &UniPoly, mut e: u64, m: &UniPoly) -> UniPoly {
    let mut result = UniPoly::new(base.field, vec![Scalar::one(base.field)]).div_rem(m).1;
    let mut b = base.div_rem(m).1;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &b, m);
        }
        b = mulmod(&b, &b, m);
        e >>= 1;
    }
    result
}

/// Primitive integer coefficients of a rational polynomial.
fn integer_coeffs(g: &UniPoly) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in &g.coeffs {
        lcm = lcm.lcm(c.as_rational().unwrap().denom());
    }
    let mut ints: Vec<BigInt> = g
        .coeffs
        .iter()
        .map(|c| {
            let q = c.as_rational().unwrap();
            q.numer() * (&lcm / q.denom())
        })
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if !content.is_zero() && !content.is_one() {
        for c in ints.iter_mut() {
            *c = &*c / &content;
        }
    }
    ints
}

fn eval_mod(c: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for a in c.iter().rev() {
        acc = (acc * x + a).mod_floor(m);
    }
    acc
}

fn rational_field_roots(g: &UniPoly) -> Vec<Scalar> {
    let c = integer_coeffs(g);
    let deg = c.len() - 1;
    let lc = c[deg].abs();
    let c0 = c[0].abs();
    let dc: Vec<BigInt> = c.iter().enumerate().skip(1).map(|(k, a)| a * BigInt::from(k)).collect();

    // a prime keeping the degree and square-freeness
    let mut ell: u64 = 101;
    loop {
        let m = BigInt::from(ell);
        if is_small_prime(ell) && !(&lc % &m).is_zero() {
            let f = Field::Prime(ell);
            let red = |v: &[BigInt]| UniPoly::new(f, v.iter().map(|a| Scalar::from_bigint(f, a)).collect());
            let gp = red(&c);
            let dp = red(&dc);
            if gp.gcd(&dp).degree() == Some(0) {
                break;
            }
        }
        ell += 2;
    }
    let residues: Vec<u64> = (0..ell)
        .filter(|&v| {
            let x = BigInt::from(v);
            eval_mod(&c, &x, &BigInt::from(ell)).is_zero()
        })
        .collect();

    // lift past 2 * |c0| * |lc|
    let bound = BigInt::from(2) * &c0 * &lc + BigInt::one();
    let mut out = Vec::new();
    for r0 in residues {
        let mut modulus = BigInt::from(ell);
        let mut r = BigInt::from(r0);
        while modulus <= bound {
            let new_mod = &modulus * &modulus;
            let fr = eval_mod(&c, &r, &new_mod);
            let dfr = eval_mod(&dc, &r, &new_mod);
            let inv = match mod_inverse(&dfr, &new_mod) {
                Some(v) => v,
                None => break,
            };
            r = (&r - fr * inv).mod_floor(&new_mod);
            modulus = new_mod;
        }
        if let Some(q) = reconstruct(&r, &modulus, &c0, &lc) {
            let s = Scalar::Rational(q);
            if g.eval(&s).is_zero() {
                out.push(s);
            }
        }
    }
    out
}

fn is_small_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// `a/b` with `|a| <= num_bound`, `0 < b <= den_bound`, `a = r b mod m`.
fn reconstruct(r: &BigInt, m: &BigInt, num_bound: &BigInt, den_bound: &BigInt) -> Option<BigRational> {
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > num_bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > den_bound {
        return None;
    }
    let (a, b) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(BigRational::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qpoly(c: &[i64]) -> UniPoly {
        UniPoly::new(Field::Rationals, c.iter().map(|&v| Scalar::from_int(Field::Rationals, v)).collect())
    }

    #[test]
    fn finds_rational_roots_with_multiplicity_removed() {
        // (2t - 3)^2 (t + 5)(t^2 + 1) t
        let base = [(-3, 2), (-3, 2), (5, 1)];
        let mut coeffs = vec![Scalar::one(Field::Rationals)];
        let field = Field::Rationals;
        for (a, b) in base {
            let f = UniPoly::new(field, vec![Scalar::from_int(field, a), Scalar::from_int(field, b)]);
            coeffs = mulmod_free(&coeffs, &f.coeffs);
        }
        coeffs = mulmod_free(&coeffs, &qpoly(&[1, 0, 1]).coeffs);
        coeffs = mulmod_free(&coeffs, &qpoly(&[0, 1]).coeffs);
        let roots = rational_roots(&UniPoly::new(field, coeffs));
        let shown: Vec<String> = roots.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["-5", "0", "3/2"]);
    }

    fn mulmod_free(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = a[0].field();
        let mut c = vec![Scalar::zero(f); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] = &c[i + j] + &(x * y);
            }
        }
        c
    }

    #[test]
    fn no_roots_for_irreducible_quadratic() {
        assert!(rational_roots(&qpoly(&[-2, 0, 1])).is_empty());
    }

    #[test]
    fn large_roots_are_reconstructed() {
        // (t - 123456789/1000)(t + 7)
        let f = Field::Rationals;
        let r = Scalar::parse(f, "123456789/1000").unwrap();
        let lin = UniPoly::new(f, vec![-&r, Scalar::one(f)]);
        let c = mulmod_free(&lin.coeffs, &qpoly(&[7, 1]).coeffs);
        let roots = rational_roots(&UniPoly::new(f, c));
        assert_eq!(roots, vec![Scalar::from_int(f, -7), r]);
    }

    #[test]
    fn prime_field_roots_small_and_large() {
        for p in [32003u64, 2147483647] {
            let f = Field::Prime(p);
            let lin = |a: i64| UniPoly::new(f, vec![Scalar::from_int(f, -a), Scalar::one(f)]);
            let prod = mulmod_free(&lin(3).coeffs, &lin(10).coeffs);
            let sq = UniPoly::new(f, vec![Scalar::one(f), Scalar::zero(f), Scalar::one(f)]);
            let prod = UniPoly::new(f, mulmod_free(&prod, &sq.coeffs));
            let mut roots = rational_roots(&prod);
            // drop the square roots of -1 when the prime has them
            roots.retain(|r| !(&(r * r) + &Scalar::one(f)).is_zero());
            assert_eq!(roots, vec![Scalar::from_int(f, 3), Scalar::from_int(f, 10)]);
        }
    }
}
