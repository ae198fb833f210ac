//! Elements of F = Q(e1, e2) (optionally extended by one transcendental `b`),
//! stored as reduced quotients of integer polynomials.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::gcd::gcd;
use super::poly::{Poly, NVARS};
use super::RatError;

/// Canonical invariant: `den` nonzero, gcd(num, den) = 1 including integer
/// content, leading coefficient of `den` positive, zero stored as 0/1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

pub fn rf_normalize(num: Poly, den: Poly) -> Result<RatFun, RatError> {
    if den.is_zero() {
        return Err(RatError::ZeroDenominator);
    }
    Ok(RatFun::reduce(num, den))
}

impl RatFun {
    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFun { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        RatFun { num: Poly::from_i64(n), den: Poly::one() }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::reduce(Poly::from_i64(p), Poly::from_i64(q))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFun { num: Poly::constant(n), den: Poly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::reduce(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn e1() -> Self {
        Self::from_poly(Poly::var(0))
    }

    pub fn e2() -> Self {
        Self::from_poly(Poly::var(1))
    }

    /// e3 = -e1 - e2.
    pub fn e3() -> Self {
        Self::from_poly(Poly::linear(-1, -1))
    }

    pub fn beta() -> Self {
        Self::from_poly(Poly::var(2))
    }

    /// The weight a*e1 + b*e2.
    pub fn weight(a: i64, b: i64) -> Self {
        Self::from_poly(Poly::linear(a, b))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub(crate) fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return RatFun { num, den };
        }
        if let Some(c) = den.constant_value() {
            let g = num.content();
            let g = num_integer::Integer::gcd(&g, &c);
            let mut n = num.div_int(&g);
            let mut d = c / &g;
            if d.is_negative() {
                n = n.neg();
                d = -d;
            }
            return RatFun { num: n, den: Poly::constant(d) };
        }
        let g = gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides numerator"), den.div_exact(&g).expect("gcd divides denominator"))
        };
        if d.leading_coeff().is_negative() {
            n = n.neg();
            d = d.neg();
        }
        RatFun { num: n, den: d }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Exact rational value when the element is a constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(BigRational::new(n, d))
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        if r.is_integer() {
            Some(r.to_integer())
        } else {
            None
        }
    }

    pub fn uses_beta(&self) -> bool {
        self.num.uses_var(2) || self.den.uses_var(2)
    }

    /// Degree of homogeneity in (e1, e2) when both parts are homogeneous
    /// and free of `b`.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let a = self.num.homogeneous_degree()? as i64;
        let b = self.den.homogeneous_degree()? as i64;
        Some(a - b)
    }

    pub fn inv(&self) -> Result<Self, RatError> {
        if self.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        let (mut n, mut d) = (self.den.clone(), self.num.clone());
        if d.leading_coeff().is_negative() {
            n = n.neg();
            d = d.neg();
        }
        Ok(RatFun { num: n, den: d })
    }

    pub fn pow(&self, e: i32) -> Self {
        if e >= 0 {
            RatFun { num: self.num.pow(e as u32), den: self.den.pow(e as u32) }
        } else {
            self.inv().expect("negative power of zero").pow(-e)
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RatError> {
        Ok(self * &other.inv()?)
    }

    /// Substitute `value` for variable `v` (0 = e1, 1 = e2, 2 = b).
    pub fn substitute(&self, v: usize, value: &RatFun) -> Result<Self, RatError> {
        assert!(v < NVARS);
        let eval = |p: &Poly| -> RatFun {
            let cs = p.coeffs_in(v);
            let mut acc = RatFun::zero();
            for c in cs.iter().rev() {
                acc = &(&acc * value) + &RatFun::from_poly(c.clone());
            }
            acc
        };
        let n = eval(&self.num);
        let d = eval(&self.den);
        n.checked_div(&d)
    }

    /// Evaluate at an integer point; `None` if the denominator vanishes.
    pub fn eval_int(&self, point: &[i64; NVARS]) -> Option<BigRational> {
        let d = self.den.eval_int(point);
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(self.num.eval_int(point), d))
    }

    /// Human-oriented rendering that writes e1+e2 factors as -e3 and omits
    /// trivial denominators.
    pub fn pretty(&self) -> String {
        let (sn, n, n_compound) = pretty_poly(&self.num);
        let neg = if self.den.is_one() { sn } else { sn ^ pretty_poly(&self.den).0 };
        let sign = if neg { "-" } else { "" };
        if self.den.is_one() {
            return format!("{}{}", sign, n);
        }
        let (_, d, d_compound) = pretty_poly(&self.den);
        let n = if n_compound { format!("({})", n) } else { n };
        if d_compound || d.contains('*') {
            format!("{}{}/({})", sign, n, d)
        } else {
            format!("{}{}/{}", sign, n, d)
        }
    }
}

/// Returns (negative, body, body-is-a-sum); powers of e3 = -(e1+e2) are
/// factored out for display.
fn pretty_poly(p: &Poly) -> (bool, String, bool) {
    let single = |q: &Poly| -> (bool, String) {
        let neg = q.leading_coeff().is_negative();
        let s = if neg { q.neg().to_string() } else { q.to_string() };
        (neg, s)
    };
    if p.nterms() <= 1 {
        let (n, s) = single(p);
        return (n, s, false);
    }
    let e3 = Poly::linear(-1, -1);
    let mut rest = p.clone();
    let mut k3 = 0;
    while rest.total_degree() > 0 {
        match rest.div_exact(&e3) {
            Some(q) => {
                rest = q;
                k3 += 1;
            }
            None => break,
        }
    }
    if k3 == 0 {
        return (false, p.to_string(), true);
    }
    let mut factors = Vec::new();
    let mut neg = false;
    if rest.nterms() == 1 {
        let (n, s) = single(&rest);
        neg = n;
        if s != "1" {
            factors.push(s);
        }
    } else {
        factors.push(format!("({})", rest));
    }
    factors.push(if k3 == 1 { "e3".to_string() } else { format!("e3^{}", k3) });
    (neg, factors.join("*"), false)
}

impl Default for RatFun {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl From<i64> for RatFun {
    fn from(n: i64) -> Self {
        RatFun::from_int(n)
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let n = self.num.add(&o.num);
            if self.den.is_one() {
                return RatFun { num: n, den: Poly::one() };
            }
            return RatFun::reduce(n, self.den.clone());
        }
        if self.den.is_one() {
            return RatFun { num: self.num.mul(&o.den).add(&o.num), den: o.den.clone() };
        }
        if o.den.is_one() {
            return RatFun { num: o.num.mul(&self.den).add(&self.num), den: self.den.clone() };
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            let d = self.den.mul(&o.den);
            return RatFun::finish(n, d);
        }
        let da = self.den.div_exact(&g).expect("gcd divides");
        let db = o.den.div_exact(&g).expect("gcd divides");
        let n = self.num.mul(&db).add(&o.num.mul(&da));
        if n.is_zero() {
            return RatFun::zero();
        }
        let h = gcd(&n, &g);
        let (n, g2) = if h.is_one() {
            (n, g)
        } else {
            (n.div_exact(&h).expect("gcd divides"), g.div_exact(&h).expect("gcd divides"))
        };
        RatFun::finish(n, da.mul(&db).mul(&g2))
    }
}

impl RatFun {
    /// Sign normalization for a pair already known to be coprime.
    fn finish(n: Poly, d: Poly) -> RatFun {
        if n.is_zero() {
            return RatFun::zero();
        }
        if d.leading_coeff().is_negative() {
            RatFun { num: n.neg(), den: d.neg() }
        } else {
            RatFun { num: n, den: d }
        }
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self + &(-o)
    }
}

impl<'a> Neg for &'a RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den }
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFun { num: self.num.mul(&o.num), den: Poly::one() };
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFun::finish(n1.mul(&n2), d1.mul(&d2))
    }
}

impl<'a> Div<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn div(self, o: &RatFun) -> RatFun {
        self.checked_div(o).expect("division by zero in F")
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, o: RatFun) -> RatFun {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFun> for RatFun {
            type Output = RatFun;
            fn $m(self, o: &RatFun) -> RatFun {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RatFun> for &'a RatFun {
            type Output = RatFun;
            fn $m(self, o: RatFun) -> RatFun {
                self.$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl<'a> AddAssign<&'a RatFun> for RatFun {
    fn add_assign(&mut self, o: &RatFun) {
        *self = &*self + o;
    }
}

impl AddAssign<RatFun> for RatFun {
    fn add_assign(&mut self, o: RatFun) {
        *self = &*self + &o;
    }
}

impl<'a> SubAssign<&'a RatFun> for RatFun {
    fn sub_assign(&mut self, o: &RatFun) {
        *self = &*self - o;
    }
}

impl<'a> MulAssign<&'a RatFun> for RatFun {
    fn mul_assign(&mut self, o: &RatFun) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> RatFun {
        RatFun::e1()
    }
    fn e2() -> RatFun {
        RatFun::e2()
    }

    #[test]
    fn normalize_examples() {
        let n = Poly::var(0).pow(2).sub(&Poly::var(1).pow(2));
        let d = Poly::var(0).sub(&Poly::var(1));
        assert_eq!(rf_normalize(n, d).unwrap(), e1() + e2());
        assert_eq!(rf_normalize(Poly::zero(), Poly::var(0)).unwrap(), RatFun::zero());
        let r = rf_normalize(Poly::linear(2, 0), Poly::linear(0, 4)).unwrap();
        assert_eq!(r.to_string(), "(e1)/(2*e2)");
        assert!(rf_normalize(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn sign_convention() {
        let r = RatFun::one() / RatFun::e3();
        assert_eq!(r.to_string(), "(-1)/(e1 + e2)");
        assert_eq!(r.pretty(), "1/e3");
        let k = RatFun::from_int(-1) / (e1() * RatFun::e3());
        assert_eq!(k.pretty(), "-1/(e1*e3)");
        assert_eq!((e1() + e2()).pretty(), "-e3");
    }

    #[test]
    fn field_operations() {
        let a = e1() / (e1() + e2());
        let b = e2() / (e1() + e2());
        assert!((&a + &b).is_one());
        let c = &a * &a.inv().unwrap();
        assert!(c.is_one());
        assert_eq!((&a - &a), RatFun::zero());
        assert_eq!(RatFun::from_ratio(6, -4).to_string(), "(-3)/(2)");
    }

    #[test]
    fn substitution() {
        let t = RatFun::beta() / RatFun::from_int(2) - RatFun::one() / RatFun::beta();
        let img = RatFun::from_int(-2) / RatFun::beta();
        let s = t.substitute(2, &img).unwrap();
        assert_eq!(s, RatFun::beta() / RatFun::from_int(2) - RatFun::one() / RatFun::beta());
    }
}
