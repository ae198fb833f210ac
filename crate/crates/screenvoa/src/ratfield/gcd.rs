//! Multivariate polynomial gcd by recursive primitive remainder sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{Mono, Poly, NVARS};

/// Greatest common divisor with positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.sign_normalized();
    }
    if b.is_zero() {
        return a.sign_normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    let ma = a.min_mono();
    let mb = b.min_mono();
    let mut mg: Mono = [0; NVARS];
    for i in 0..NVARS {
        mg[i] = ma[i].min(mb[i]);
    }
    let ca = a.content();
    let cb = b.content();
    let cg = ca.gcd(&cb);
    let a1 = a.div_mono(&ma).div_int(&ca);
    let b1 = b.div_mono(&mb).div_int(&cb);
    let g = gcd_primitive(&a1, &b1);
    g.mul_term(&mg, &cg).sign_normalized()
}

/// Gcd of a list, stopping early once it becomes a unit.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a Poly>>(items: I) -> Poly {
    let mut g = Poly::zero();
    for p in items {
        if p.is_zero() {
            continue;
        }
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Inputs have unit integer content; the result has positive leading coefficient.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.sign_normalized();
    }
    let (small, big) = if a.total_degree() <= b.total_degree() { (a, b) } else { (b, a) };
    if small.nterms() <= big.nterms() && big.div_exact(small).is_some() {
        return small.sign_normalized();
    }
    if let (Some(_), Some(_)) = (a.homogeneous_degree(), b.homogeneous_degree()) {
        return gcd_homogeneous(a, b);
    }
    for v in 0..NVARS {
        let ua = a.uses_var(v);
        let ub = b.uses_var(v);
        if ua && !ub {
            let c = gcd_many(a.coeffs_in(v).iter());
            return gcd(&c, b);
        }
        if ub && !ua {
            let c = gcd_many(b.coeffs_in(v).iter());
            return gcd(a, &c);
        }
    }
    let mut best = None;
    for v in 0..NVARS {
        if a.uses_var(v) {
            let d = a.degree_in(v).min(b.degree_in(v));
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((v, d));
            }
        }
    }
    let v = best.expect("non-constant polynomial uses some variable").0;
    let mut ca = a.coeffs_in(v);
    let mut cb = b.coeffs_in(v);
    let conta = gcd_many(ca.iter());
    let contb = gcd_many(cb.iter());
    divide_all(&mut ca, &conta);
    divide_all(&mut cb, &contb);
    let gc = gcd(&conta, &contb);
    if ca.len() < cb.len() {
        std::mem::swap(&mut ca, &mut cb);
    }
    let h = loop {
        if cb.len() == 1 {
            break vec![Poly::one()];
        }
        let r = prem(&ca, &cb);
        if r.is_empty() {
            break cb;
        }
        let mut r = r;
        let cr = gcd_many(r.iter());
        divide_all(&mut r, &cr);
        ca = cb;
        cb = r;
    };
    let mut h = h;
    let ch = gcd_many(h.iter());
    divide_all(&mut h, &ch);
    Poly::from_coeffs_in(v, &h).mul(&gc).sign_normalized()
}

fn divide_all(cs: &mut [Poly], d: &Poly) {
    if d.is_one() || d.is_zero() {
        return;
    }
    for c in cs.iter_mut() {
        *c = c.div_exact(d).expect("content divides every coefficient");
    }
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().map_or(false, |p| p.is_zero()) {
        v.pop();
    }
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients
/// (index = power). Returns an empty vector for zero.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = b.len() - 1;
    let lc = &b[n];
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return r;
    }
    let mut e = r.len() - b.len() + 1;
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - n;
        for x in r.iter_mut() {
            *x = x.mul(lc);
        }
        for (i, bi) in b.iter().enumerate() {
            let t = bi.mul(&lr);
            r[i + shift] = r[i + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lc.pow(e as u32);
        for x in r.iter_mut() {
            *x = x.mul(&f);
        }
    }
    r
}

fn gcd_homogeneous(a: &Poly, b: &Poly) -> Poly {
    let one = Poly::one();
    let au = a.substitute(1, &one);
    let bu = b.substitute(1, &one);
    let g = gcd(&au, &bu);
    let d = g.degree_in(0);
    let terms: Vec<(Mono, BigInt)> = g
        .terms()
        .iter()
        .map(|(m, c)| ([m[0], d - m[0], 0], c.clone()))
        .collect();
    let h = Poly::from_terms(terms);
    let c = h.content();
    if c.is_zero() || c.is_one() {
        h.sign_normalized()
    } else {
        h.div_int(&c).sign_normalized()
    }
}

pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    a.div_exact(&g).expect("gcd divides").mul(b).sign_normalized()
}

#[allow(dead_code)]
pub(crate) fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() && b.is_zero() {
        BigInt::zero()
    } else {
        a.gcd(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Poly {
        Poly::var(0)
    }
    fn e2() -> Poly {
        Poly::var(1)
    }
    fn b() -> Poly {
        Poly::var(2)
    }
    fn c(n: i64) -> Poly {
        Poly::from_i64(n)
    }

    #[test]
    fn bivariate_common_factor() {
        let f = e1().add(&e2());
        let g1 = f.mul(&e1().sub(&c(2).mul(&e2())));
        let g2 = f.mul(&f).mul(&e2().add(&c(3)));
        assert_eq!(gcd(&g1, &g2), f);
    }

    #[test]
    fn content_and_monomial_parts() {
        let p = c(6).mul(&e1().pow(2)).mul(&e2());
        let q = c(4).mul(&e1()).mul(&e2().pow(3));
        assert_eq!(gcd(&p, &q), c(2).mul(&e1()).mul(&e2()));
    }

    #[test]
    fn trivariate() {
        let f = b().mul(&e1()).add(&c(1));
        let p = f.mul(&e1().add(&b()));
        let q = f.mul(&e2().sub(&b())).mul(&e2());
        assert_eq!(gcd(&p, &q), f);
        assert_eq!(gcd(&e1().add(&b()), &e2().sub(&b())), Poly::one());
    }

    #[test]
    fn sign_is_normalized() {
        let f = e1().neg().add(&e2());
        let g = gcd(&f.mul(&e1()), &f.mul(&e2().add(&c(1))));
        assert_eq!(g, f.neg());
    }
}
