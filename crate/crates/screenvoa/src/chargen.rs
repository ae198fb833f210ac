//! Generating functions: Gottsche's formula, partition enumeration and the
//! rank-one vacuum characters of C^2 and the resolved conifold.

use std::collections::BTreeMap;

use crate::localization::{conifold_fixed_points, partitions_of};

/// Integer polynomial in t, dense by exponent.
pub type TPoly = Vec<i64>;

fn tpoly_mul(a: &TPoly, b: &TPoly) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn tpoly_add(a: &TPoly, b: &TPoly) -> TPoly {
    let mut out = vec![0i64; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(out)
}

fn trim(mut v: TPoly) -> TPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn monomial(e: usize, c: i64) -> TPoly {
    let mut v = vec![0; e + 1];
    v[e] = c;
    trim(v)
}

pub fn render_tpoly(p: &TPoly) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(e, c)| match (e, *c) {
            (0, c) => c.to_string(),
            (1, 1) => "t".into(),
            (e, 1) => format!("t^{}", e),
            (1, c) => format!("{}*t", c),
            (e, c) => format!("{}*t^{}", c, e),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

/// Power series in q with t-polynomial coefficients, truncated at q^cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub cutoff: usize,
    pub coeffs: Vec<TPoly>,
}

impl QSeries {
    pub fn one(cutoff: usize) -> Self {
        let mut coeffs = vec![Vec::new(); cutoff + 1];
        coeffs[0] = vec![1];
        QSeries { cutoff, coeffs }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let n = self.cutoff.min(o.cutoff);
        let mut coeffs = vec![Vec::new(); n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                let p = tpoly_mul(&self.coeffs[i], &o.coeffs[j]);
                coeffs[i + j] = tpoly_add(&coeffs[i + j], &p);
            }
        }
        QSeries { cutoff: n, coeffs }
    }

    /// (1 + s t^a q^m)^{+-1} with s = +-1, expanded to the cutoff.
    fn factor(cutoff: usize, m: usize, a: usize, sign: i64, invert: bool) -> QSeries {
        let mut s = QSeries::one(cutoff);
        if invert {
            // 1/(1 - x) = sum x^j with x = -sign t^a q^m.
            let mut j = 1;
            while j * m <= cutoff {
                let c = if sign > 0 && j % 2 == 1 { -1 } else { 1 };
                s.coeffs[j * m] = monomial(a * j, c);
                j += 1;
            }
        } else if m <= cutoff {
            s.coeffs[m] = monomial(a, sign);
        }
        s
    }

    /// Specialize t to an integer.
    pub fn at_t(&self, t: i64) -> Vec<i64> {
        self.coeffs
            .iter()
            .map(|p| p.iter().enumerate().map(|(e, c)| c * t.pow(e as u32)).sum())
            .collect()
    }
}

/// prod_m (1+t^{2m-1}q^m)^{b1}(1+t^{2m+1}q^m)^{b3} / ((1-t^{2m-2}q^m)^{b0}(1-t^{2m}q^m)^{b2}(1-t^{2m+2}q^m)^{b4}).
pub fn gottsche_series(b: [usize; 5], cutoff: usize) -> QSeries {
    let mut s = QSeries::one(cutoff);
    for m in 1..=cutoff {
        let pieces = [
            (b[1], 2 * m - 1, 1i64, false),
            (b[3], 2 * m + 1, 1, false),
            (b[0], 2 * m - 2, -1, true),
            (b[2], 2 * m, -1, true),
            (b[4], 2 * m + 2, -1, true),
        ];
        for (mult, a, sign, inv) in pieces {
            for _ in 0..mult {
                s = s.mul(&QSeries::factor(cutoff, m, a, sign, inv));
            }
        }
    }
    s
}

/// prod_k (1-q^k)^{-r} coefficients.
pub fn euler_product(r: usize, cutoff: usize) -> Vec<u64> {
    crate::fock::colored_partitions(r, cutoff)
}

/// Vacuum character of C^2, by product and by counting partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VwC2 {
    pub product: Vec<u64>,
    pub enumerated: Vec<u64>,
}

impl VwC2 {
    pub fn agree(&self) -> bool {
        self.product == self.enumerated
    }
}

pub fn vw_c2(cutoff: usize) -> VwC2 {
    let product = euler_product(1, cutoff);
    let enumerated = (0..=cutoff).map(|n| partitions_of(n).len() as u64).collect();
    VwC2 { product, enumerated }
}

/// Conifold character: bivariate counts and the q^{1/2} specialization,
/// the latter indexed by twice the exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VwConifold {
    pub cutoff: usize,
    /// (ell, n) -> number of fixed points with |lambda0| + |lambda_inf| = n.
    pub bivariate: BTreeMap<(i64, usize), u64>,
    /// coefficient of q^{k/2} at index k, from the enumeration.
    pub specialized: Vec<u64>,
    /// same, from sum_ell q^{ell^2/2} / prod (1-q^k)^2.
    pub product: Vec<u64>,
}

impl VwConifold {
    pub fn agree(&self) -> bool {
        self.specialized == self.product
    }
}

pub fn vw_conifold(cutoff: usize) -> VwConifold {
    let half_max = 2 * cutoff;
    let mut ell_max = 0i64;
    while (ell_max + 1) * (ell_max + 1) <= half_max as i64 {
        ell_max += 1;
    }
    let mut bivariate = BTreeMap::new();
    let mut specialized = vec![0u64; half_max + 1];
    for ell in -ell_max..=ell_max {
        let w = (ell * ell) as usize;
        for n in 0..=cutoff {
            let c = conifold_fixed_points(ell, n).len() as u64;
            bivariate.insert((ell, n), c);
            if w + 2 * n <= half_max {
                specialized[w + 2 * n] += c;
            }
        }
    }
    let p2 = euler_product(2, cutoff);
    let mut product = vec![0u64; half_max + 1];
    for ell in -ell_max..=ell_max {
        let w = (ell * ell) as usize;
        for (n, c) in p2.iter().enumerate() {
            if w + 2 * n <= half_max {
                product[w + 2 * n] += c;
            }
        }
    }
    VwConifold { cutoff, bivariate, specialized, product }
}

/// "q^{k/2}" exponent label.
pub fn half_exponent(k: usize) -> String {
    if k % 2 == 0 {
        (k / 2).to_string()
    } else {
        format!("{}/2", k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_degeneration() {
        let s = gottsche_series([1, 0, 0, 0, 0], 8);
        assert_eq!(s.at_t(1), vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn p2_first_coefficient() {
        let s = gottsche_series([1, 0, 1, 0, 1], 3);
        assert_eq!(s.coeffs[1], vec![1, 0, 1, 0, 1]);
        assert_eq!(render_tpoly(&s.coeffs[1]), "1 + t^2 + t^4");
    }

    #[test]
    fn c2_second_coefficient() {
        // Hilb^2(C^2) from (1-q)^{-1}(1-t^2 q^2)^{-1}: q^2 -> 1 + t^2.
        let s = gottsche_series([1, 0, 0, 0, 0], 3);
        assert_eq!(s.coeffs[2], vec![1, 0, 1]);
    }

    #[test]
    fn p2_euler_characteristics() {
        // chi(Hilb^n P^2) = coefficients of prod (1-q^k)^{-3}.
        let s = gottsche_series([1, 0, 1, 0, 1], 6);
        let want: Vec<i64> = euler_product(3, 6).iter().map(|&x| x as i64).collect();
        assert_eq!(s.at_t(1), want);
    }

    #[test]
    fn odd_betti_signs() {
        // b1 = 1 alone: prod (1 + t^{2m-1} q^m), at t = 1 distinct partitions.
        let s = gottsche_series([0, 1, 0, 0, 0], 6);
        assert_eq!(s.at_t(1), vec![1, 1, 1, 2, 2, 3, 4]);
    }

    #[test]
    fn vw_c2_backends() {
        let v = vw_c2(20);
        assert!(v.agree());
        assert_eq!(&v.product[..11], &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert_eq!(vw_c2(0).product, vec![1]);
    }

    #[test]
    fn conifold() {
        let v = vw_conifold(6);
        assert!(v.agree());
        assert_eq!(v.specialized[0], 1);
        assert_eq!(v.specialized[1], 2);
        assert_eq!(v.bivariate[&(0, 2)], 5);
        assert_eq!(v.bivariate[&(-1, 2)], 5);
        assert_eq!(half_exponent(3), "3/2");
    }
}
