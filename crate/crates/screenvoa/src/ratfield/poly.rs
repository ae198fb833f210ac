//! Sparse multivariate polynomials over Z in the variables e1, e2 and an
//! optional transcendental `b` (used only for symbolic screening momenta).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub const NVARS: usize = 3;
pub const VAR_NAMES: [&str; NVARS] = ["e1", "e2", "b"];

pub type Mono = [u16; NVARS];

#[inline]
fn mono_deg(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Graded lexicographic order with e1 > e2 > b.
#[inline]
pub fn grlex(a: &Mono, b: &Mono) -> Ordering {
    mono_deg(a).cmp(&mono_deg(b)).then_with(|| a.cmp(b))
}

#[inline]
fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] += b[i];
    }
    r
}

#[inline]
fn mono_divides(d: &Mono, m: &Mono) -> bool {
    (0..NVARS).all(|i| d[i] <= m[i])
}

#[inline]
fn mono_div(m: &Mono, d: &Mono) -> Mono {
    let mut r = *m;
    for i in 0..NVARS {
        r[i] -= d[i];
    }
    r
}

/// Terms are kept sorted by descending grlex order with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![([0; NVARS], c)] }
        }
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(BigInt::from(c))
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; NVARS];
        m[i] = 1;
        Poly { terms: vec![(m, BigInt::one())] }
    }

    pub fn monomial(m: Mono, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Build from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(mut terms: Vec<(Mono, BigInt)>) -> Self {
        terms.sort_unstable_by(|a, b| grlex(&b.0, &a.0));
        let mut out: Vec<(Mono, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    /// Weight (a,b) meaning a*e1 + b*e2.
    pub fn linear(a: i64, b: i64) -> Self {
        Self::from_terms(vec![
            ([1, 0, 0], BigInt::from(a)),
            ([0, 1, 0], BigInt::from(b)),
        ])
    }

    pub fn terms(&self) -> &[(Mono, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; NVARS] && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == [0; NVARS])
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 if self.terms[0].0 == [0; NVARS] => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<&(Mono, BigInt)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(BigInt::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| mono_deg(&t.0)).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.iter().map(|t| t.0[v]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0[v] > 0)
    }

    /// Homogeneous in (e1, e2) and free of `b`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let first = self.terms.first()?;
        if first.0[2] != 0 {
            return None;
        }
        let d = mono_deg(&first.0);
        if self.terms.iter().all(|t| t.0[2] == 0 && mono_deg(&t.0) == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_mono(&self) -> Mono {
        let mut m = match self.terms.first() {
            Some(t) => t.0,
            None => return [0; NVARS],
        };
        for (t, _) in &self.terms[1..] {
            for i in 0..NVARS {
                m[i] = m[i].min(t[i]);
            }
        }
        m
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match grlex(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        let mut acc = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.push((mono_mul(ma, mb), ca * cb));
            }
        }
        Poly::from_terms(acc)
    }

    pub fn mul_term(&self, m: &Mono, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(t, d)| (mono_mul(t, m), d * c)).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        self.mul_term(&[0; NVARS], c)
    }

    /// Exact division by an integer; caller guarantees divisibility.
    pub fn div_int(&self, c: &BigInt) -> Poly {
        if c.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (*m, d / c)).collect() }
    }

    /// Exact division by a monomial; caller guarantees divisibility.
    pub fn div_mono(&self, m: &Mono) -> Poly {
        if *m == [0; NVARS] {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(t, c)| (mono_div(t, m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !mono_divides(dm, m) {
                    return None;
                }
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((mono_div(m, dm), q));
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = d.terms[0].clone();
        let mut rem = self.clone();
        let mut q = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            if !mono_divides(&dm, &rm) {
                return None;
            }
            let (c, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let m = mono_div(&rm, &dm);
            rem = rem.sub(&d.mul_term(&m, &c));
            q.push((m, c));
        }
        Some(Poly { terms: q })
    }

    /// Substitute `value` for variable `v`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        if !self.uses_var(v) {
            return self.clone();
        }
        let maxd = self.degree_in(v) as usize;
        let mut powers = vec![Poly::one()];
        for i in 1..=maxd {
            let p = powers[i - 1].mul(value);
            powers.push(p);
        }
        let mut acc = Vec::new();
        for (m, c) in &self.terms {
            let e = m[v] as usize;
            let mut rest = *m;
            rest[v] = 0;
            for (pm, pc) in powers[e].terms() {
                acc.push((mono_mul(&rest, pm), c * pc));
            }
        }
        Poly::from_terms(acc)
    }

    /// Evaluate at integer points modulo nothing (exact).
    pub fn eval_int(&self, point: &[i64; NVARS]) -> BigInt {
        let mut s = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                for _ in 0..m[i] {
                    t *= point[i];
                }
            }
            s += t;
        }
        s
    }

    /// Coefficients with respect to variable `v`: entry j is the
    /// coefficient of v^j (a polynomial free of v).
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Mono, BigInt)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let mut r = *m;
            let e = r[v] as usize;
            r[v] = 0;
            buckets[e].push((r, c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut acc = Vec::new();
        for (j, c) in coeffs.iter().enumerate() {
            for (m, x) in c.terms() {
                let mut r = *m;
                r[v] += j as u16;
                acc.push((r, x.clone()));
            }
        }
        Poly::from_terms(acc)
    }

    /// Positive leading coefficient.
    pub fn sign_normalized(&self) -> Poly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.iter().map(|t| t.1.bits()).max().unwrap_or(0)
    }
}

fn fmt_mono(m: &Mono, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for i in 0..NVARS {
        if m[i] == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if m[i] == 1 {
            write!(f, "{}", VAR_NAMES[i])?;
        } else {
            write!(f, "{}^{}", VAR_NAMES[i], m[i])?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = *m == [0; NVARS];
            if is_const {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                fmt_mono(m, f)?;
            } else {
                write!(f, "{}*", a)?;
                fmt_mono(m, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
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

    #[test]
    fn arithmetic_and_render() {
        let p = e1().add(&e2()).mul(&e1().sub(&e2()));
        assert_eq!(p.to_string(), "e1^2 - e2^2");
        assert_eq!(p.sub(&p), Poly::zero());
        assert_eq!(Poly::linear(-1, -1).to_string(), "-e1 - e2");
    }

    #[test]
    fn exact_division() {
        let a = e1().add(&e2());
        let b = e1().sub(&e2().scale(&BigInt::from(3)));
        let p = a.mul(&b).mul(&a);
        assert_eq!(p.div_exact(&a).unwrap(), a.mul(&b));
        assert!(p.div_exact(&e1()).is_none());
        assert!(p.scale(&BigInt::from(2)).div_exact(&Poly::from_i64(3)).is_none());
    }

    #[test]
    fn substitution_and_coeffs() {
        let p = e1().pow(2).add(&e1().mul(&e2()));
        let q = p.substitute(1, &Poly::one());
        assert_eq!(q.to_string(), "e1^2 + e1");
        let cs = p.coeffs_in(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(Poly::from_coeffs_in(0, &cs), p);
    }
}
