//! Exact counting of base-field roots of a univariate polynomial.
//!
//! Over F_p the number of distinct roots is the degree of gcd(g, t^p - t),
//! computed with t^p reduced mod g by square-and-multiply, so the count is
//! exact for any modulus without enumerating the field. Over Q the rational
//! roots of the cleared-denominator polynomial are found through the monic
//! substitution y = lead * t followed by Sturm-sequence bisection: every
//! isolating interval of width below one holds at most one integer
//! candidate, which is then checked by evaluation. No integer factorization
//! is needed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactfield::Scalar;
use crate::mpoly::MultiPoly;

/// Number of distinct roots of a nonzero univariate polynomial over its
/// base field.
pub fn distinct_root_count(g: &MultiPoly) -> usize {
    assert_eq!(g.nvars(), 1, "root counting needs a univariate polynomial");
    assert!(!g.is_zero(), "root counting needs a nonzero polynomial");
    match g.spec() {
        crate::exactfield::FieldSpec::Prime { p } => {
            let coeffs = dense_fp(g, p as u64);
            fp_distinct_roots(&coeffs, p as u64)
        }
        crate::exactfield::FieldSpec::Rational => {
            let coeffs = dense_q(g);
            rational_distinct_roots(&coeffs)
        }
    }
}

fn dense_fp(g: &MultiPoly, p: u64) -> Vec<u64> {
    let d = g.total_degree().unwrap_or(0);
    let mut out = vec![0u64; d + 1];
    for (m, c) in g.terms() {
        if let Scalar::Prime { value, .. } = c {
            out[m.0[0] as usize] = *value as u64;
        }
        let _ = p;
    }
    out
}

fn dense_q(g: &MultiPoly) -> Vec<BigRational> {
    let d = g.total_degree().unwrap_or(0);
    let mut out = vec![BigRational::zero(); d + 1];
    for (m, c) in g.terms() {
        if let Some(r) = c.as_rational() {
            out[m.0[0] as usize] = r.clone();
        }
    }
    out
}

// ---- prime field path ----

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_deg(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (a as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (((s0 % p as i64) + p as i64) % p as i64) as u64
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = fp_deg(b).expect("nonzero divisor");
    let lead_inv = fp_inv(b[db], p);
    while let Some(dr) = fp_deg(&r) {
        if dr < db {
            break;
        }
        let factor = r[dr] * lead_inv % p;
        let shift = dr - db;
        for i in 0..=db {
            let sub = factor * b[i] % p;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn fp_mulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ca * cb) % p;
        }
    }
    fp_rem(&prod, g, p)
}

/// t^p mod g by binary exponentiation.
fn fp_pow_t_mod(g: &[u64], p: u64) -> Vec<u64> {
    let t = vec![0u64, 1];
    let mut base = fp_rem(&t, g, p);
    let mut acc = fp_rem(&[1], g, p);
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, g, p);
        }
        base = fp_mulmod(&base, &base, g, p);
        e >>= 1;
    }
    acc
}

fn fp_distinct_roots(g: &[u64], p: u64) -> usize {
    let mut g = g.to_vec();
    fp_trim(&mut g);
    match fp_deg(&g) {
        None | Some(0) => 0,
        Some(_) => {
            // gcd(g, t^p - t) splits into exactly the distinct linear factors
            let mut tp = fp_pow_t_mod(&g, p);
            // subtract t
            if tp.len() < 2 {
                tp.resize(2, 0);
            }
            tp[1] = (tp[1] + p - 1) % p;
            fp_trim(&mut tp);
            if tp.is_empty() {
                // t^p ≡ t mod g: g divides t^p - t, all roots distinct in F_p
                return fp_deg(&g).unwrap();
            }
            let d = fp_gcd(&g, &tp, p);
            fp_deg(&d).unwrap_or(0)
        }
    }
}

// ---- rational path ----

fn q_trim(v: &mut Vec<BigRational>) {
    while v.last().map(Zero::is_zero) == Some(true) {
        v.pop();
    }
}

fn q_eval(v: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in v.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn q_derivative(v: &[BigRational]) -> Vec<BigRational> {
    v.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect()
}

fn q_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    q_trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / &b[db];
        let shift = dr - db;
        for i in 0..=db {
            let sub = &factor * &b[i];
            r[i + shift] = &r[i + shift] - sub;
        }
        r.pop();
        q_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Scales by a positive constant so the largest coefficient has magnitude
/// one; keeps remainder sequences from exploding while preserving signs.
fn q_normalize(v: &mut [BigRational]) {
    let mut m = BigRational::zero();
    for c in v.iter() {
        let a = c.abs();
        if a > m {
            m = a;
        }
    }
    if m.is_zero() || m.is_one() {
        return;
    }
    for c in v.iter_mut() {
        *c = &*c / &m;
    }
}

fn q_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    q_trim(&mut x);
    q_trim(&mut y);
    while !y.is_empty() {
        let mut r = q_rem(&x, &y);
        q_normalize(&mut r);
        x = y;
        y = r;
    }
    x
}

fn q_divide_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    q_trim(&mut r);
    let db = b.len() - 1;
    let mut quot = vec![BigRational::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / &b[db];
        let shift = dr - db;
        quot[shift] = factor.clone();
        for i in 0..=db {
            let sub = &factor * &b[i];
            r[i + shift] = &r[i + shift] - sub;
        }
        q_trim(&mut r);
    }
    quot
}

fn sturm_chain(p0: Vec<BigRational>) -> Vec<Vec<BigRational>> {
    let mut chain = vec![p0.clone()];
    let p1 = q_derivative(&p0);
    if p1.is_empty() {
        return chain;
    }
    chain.push(p1);
    loop {
        let n = chain.len();
        let r = q_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        let mut next: Vec<BigRational> = r.iter().map(|c| -c).collect();
        q_normalize(&mut next);
        chain.push(next);
    }
    chain
}

fn sign_variations(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = q_eval(p, x);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if let Some(prev) = last {
            if prev != pos {
                count += 1;
            }
        }
        last = Some(pos);
    }
    count
}

/// Distinct rational roots of a polynomial with rational coefficients.
fn rational_distinct_roots(coeffs: &[BigRational]) -> usize {
    let mut v = coeffs.to_vec();
    q_trim(&mut v);
    if v.len() <= 1 {
        return 0;
    }
    // factor out t^k; a zero constant term contributes the root 0 once
    let mut count = 0usize;
    let zeros = v.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        count += 1;
        v.drain(..zeros);
    }
    if v.len() <= 1 {
        return count;
    }
    // square-free part
    let deriv = q_derivative(&v);
    let g = q_gcd(&v, &deriv);
    let sf = if g.len() > 1 {
        q_divide_exact(&v, &g)
    } else {
        v
    };

    // clear denominators and make monic via y = lead * t: integer roots of
    // the transform correspond to rational roots of the original
    let mut lcm = BigInt::one();
    for c in &sf {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    let ints: Vec<BigInt> = sf.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let d = ints.len() - 1;
    let lead = ints[d].clone();
    let monic: Vec<BigRational> = (0..=d)
        .map(|i| {
            let scale = pow_bigint(&lead, (d - 1).saturating_sub(i) as u32);
            if i == d {
                BigRational::one()
            } else {
                BigRational::from(&ints[i] * scale)
            }
        })
        .collect();

    let chain = sturm_chain(monic.clone());
    let bound: BigRational = {
        let mut m = BigInt::zero();
        for c in &monic {
            let a = c.numer().abs();
            if a > m {
                m = a;
            }
        }
        BigRational::from(m + BigInt::one())
    };

    // bisect (lo, hi] intervals until at most one integer candidate remains;
    // an integer root of the monic transform is a rational root upstairs
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let roots_here = sign_variations(&chain, &lo).saturating_sub(sign_variations(&chain, &hi));
        if roots_here == 0 {
            continue;
        }
        if &hi - &lo < BigRational::one() {
            let candidate = hi.floor();
            if candidate > lo && q_eval(&monic, &candidate).is_zero() {
                count += 1;
            }
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    count
}

fn pow_bigint(b: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::mpoly::Monomial;

    fn f7() -> FieldSpec {
        FieldSpec::prime(7).unwrap()
    }

    fn upoly(spec: FieldSpec, coeffs: &[i64]) -> MultiPoly {
        MultiPoly::from_terms(
            spec,
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (Monomial(vec![i as u32]), Scalar::from_i64(c, spec)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn fp_examples() {
        // t^2 - 1 over F_7: roots 1 and 6
        assert_eq!(distinct_root_count(&upoly(f7(), &[-1, 0, 1])), 2);
        // t^2 + 1 over F_7: -1 is a non-residue mod 7
        assert_eq!(distinct_root_count(&upoly(f7(), &[1, 0, 1])), 0);
        // (t-1)^2: one distinct root
        assert_eq!(distinct_root_count(&upoly(f7(), &[1, -2, 1])), 1);
        // t^7 - t: everything
        let mut coeffs = vec![0i64; 8];
        coeffs[1] = -1;
        coeffs[7] = 1;
        assert_eq!(distinct_root_count(&upoly(f7(), &coeffs)), 7);
        // nonzero constant
        assert_eq!(distinct_root_count(&upoly(f7(), &[3])), 0);
    }

    #[test]
    fn fp_matches_enumeration() {
        let spec = FieldSpec::prime(13).unwrap();
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..200 {
            let d = 1 + rng.next_below(5) as usize;
            let coeffs: Vec<i64> = (0..=d).map(|_| rng.next_below(13) as i64).collect();
            let g = upoly(spec, &coeffs);
            if g.is_zero() {
                continue;
            }
            let expected = (0..13)
                .filter(|&t| g.evaluate(&[Scalar::from_i64(t, spec)]).is_zero())
                .count();
            assert_eq!(distinct_root_count(&g), expected, "coeffs {coeffs:?}");
        }
    }

    #[test]
    fn rational_examples() {
        let q = FieldSpec::rational();
        // (t-1)(t-2) = t^2 - 3t + 2
        assert_eq!(distinct_root_count(&upoly(q, &[2, -3, 1])), 2);
        // t^2 + 1 has no rational roots
        assert_eq!(distinct_root_count(&upoly(q, &[1, 0, 1])), 0);
        // t^2 - 2 is irrational
        assert_eq!(distinct_root_count(&upoly(q, &[-2, 0, 1])), 0);
        // 2t - 1: root 1/2
        assert_eq!(distinct_root_count(&upoly(q, &[-1, 2])), 1);
        // t^3: root 0 once
        assert_eq!(distinct_root_count(&upoly(q, &[0, 0, 0, 1])), 1);
        // (2t-1)(3t+5)(t-7)^2
        let p = upoly(q, &[-1, 2]);
        let p2 = upoly(q, &[5, 3]);
        let p3 = upoly(q, &[-7, 1]);
        let prod = p.mul(&p2).mul(&p3).mul(&p3);
        assert_eq!(distinct_root_count(&prod), 3);
    }

    #[test]
    fn rational_random_products_count_their_factors() {
        let q = FieldSpec::rational();
        let mut rng = crate::rng::SplitMix64::new(5);
        for _ in 0..50 {
            let k = 1 + rng.next_below(4) as usize;
            let mut roots: Vec<(i64, i64)> = Vec::new();
            let mut poly = upoly(q, &[1]);
            for _ in 0..k {
                let num = rng.next_range(-8, 9);
                let den = 1 + rng.next_below(4) as i64;
                let g = num_integer::Integer::gcd(&num, &den);
                let (num, den) = (num / g, den / g);
                if !roots.contains(&(num, den)) {
                    roots.push((num, den));
                }
                // factor den*t - num
                poly = poly.mul(&upoly(q, &[-num, den]));
            }
            // one irrational factor to exercise the sieve
            poly = poly.mul(&upoly(q, &[-2, 0, 1]));
            assert_eq!(distinct_root_count(&poly), roots.len(), "roots {roots:?}");
        }
    }
}
