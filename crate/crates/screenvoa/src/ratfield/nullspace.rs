//! Exact kernels of matrices over F.
//!
//! Rows are cleared of denominators and eliminated fraction-free, keeping
//! every row primitive. When the entries are bi-homogeneous in (e1, e2)
//! (entry degree = column weight - row weight), the scaling symmetry lets
//! us set e2 = 1, eliminate over Q(e1), and re-homogenize the result.

use std::collections::VecDeque;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::gcd::{gcd, gcd_many, lcm};
use super::poly::{Mono, Poly};
use super::ratfun::RatFun;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub ncols: usize,
    pub rows: Vec<Vec<RatFun>>,
}

impl RatMatrix {
    pub fn new(ncols: usize, rows: Vec<Vec<RatFun>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        RatMatrix { ncols, rows }
    }

    pub fn from_rows(rows: Vec<Vec<RatFun>>) -> Self {
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        Self::new(ncols, rows)
    }

    pub fn apply(&self, v: &[RatFun]) -> Vec<RatFun> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc = RatFun::zero();
                for (a, b) in r.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Basis of the right kernel. For each non-pivot column f (ascending) the
/// returned vector has a 1 in position f and zeros at the other free columns.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<RatFun>> {
    let e = Echelon::compute(m);
    e.kernel()
}

pub fn rank(m: &RatMatrix) -> usize {
    Echelon::compute(m).pivots.len()
}

struct Echelon {
    ncols: usize,
    rows: Vec<Vec<Poly>>,
    pivots: Vec<(usize, usize)>,
    col_weight: Option<Vec<i64>>,
}

/// Solve deg(M_ij) = c_j - r_i over connected components.
fn bihomogeneous_weights(m: &RatMatrix) -> Option<Vec<i64>> {
    let nr = m.rows.len();
    let nc = m.ncols;
    let mut row_adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nr];
    let mut col_adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nc];
    for (i, row) in m.rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let h = x.homogeneous_degree()?;
            row_adj[i].push((j, h));
            col_adj[j].push((i, h));
        }
    }
    let mut r: Vec<Option<i64>> = vec![None; nr];
    let mut c: Vec<Option<i64>> = vec![None; nc];
    for start in 0..nc {
        if c[start].is_some() {
            continue;
        }
        c[start] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back((false, start));
        while let Some((is_row, k)) = queue.pop_front() {
            if is_row {
                let rk = r[k].unwrap();
                for &(j, h) in &row_adj[k] {
                    let want = rk + h;
                    match c[j] {
                        None => {
                            c[j] = Some(want);
                            queue.push_back((false, j));
                        }
                        Some(v) if v != want => return None,
                        _ => {}
                    }
                }
            } else {
                let ck = c[k].unwrap();
                for &(i, h) in &col_adj[k] {
                    let want = ck - h;
                    match r[i] {
                        None => {
                            r[i] = Some(want);
                            queue.push_back((true, i));
                        }
                        Some(v) if v != want => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    Some(c.into_iter().map(|x| x.unwrap_or(0)).collect())
}

fn dehomogenize(p: &Poly) -> Poly {
    p.substitute(1, &Poly::one())
}

/// P(e1/e2) * e2^shift as a field element.
fn rehomogenize(x: &RatFun, shift: i64) -> RatFun {
    let hom = |p: &Poly| -> (Poly, i64) {
        let d = p.degree_in(0);
        let terms: Vec<(Mono, BigInt)> =
            p.terms().iter().map(|(m, c)| ([m[0], d - m[0], 0], c.clone())).collect();
        (Poly::from_terms(terms), d as i64)
    };
    let (n, dn) = hom(x.numer());
    let (d, dd) = hom(x.denom());
    let s = dd - dn + shift;
    let e2 = Poly::var(1);
    let (n, d) = if s >= 0 { (n.mul(&e2.pow(s as u32)), d) } else { (n, d.mul(&e2.pow((-s) as u32))) };
    RatFun::reduce(n, d)
}

fn clear_row(row: &[RatFun], dehom: bool) -> Vec<Poly> {
    let parts: Vec<(Poly, Poly)> = row
        .iter()
        .map(|x| {
            if dehom {
                let n = dehomogenize(x.numer());
                let d = dehomogenize(x.denom());
                let r = RatFun::reduce(n, d);
                (r.numer().clone(), r.denom().clone())
            } else {
                (x.numer().clone(), x.denom().clone())
            }
        })
        .collect();
    let mut l = Poly::one();
    for (n, d) in &parts {
        if !n.is_zero() && !d.is_one() {
            l = lcm(&l, d);
        }
    }
    let mut out: Vec<Poly> = parts
        .into_iter()
        .map(|(n, d)| if n.is_zero() { n } else { n.mul(&l.div_exact(&d).expect("lcm")) })
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [Poly]) {
    let g = gcd_many(row.iter());
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x = x.div_exact(&g).expect("row content divides");
        }
    }
}

fn pivot_cost(p: &Poly) -> (u32, usize, u64) {
    (p.total_degree(), p.nterms(), p.max_coeff_bits())
}

impl Echelon {
    fn compute(m: &RatMatrix) -> Echelon {
        let col_weight = if m.rows.iter().flatten().any(|x| x.uses_beta()) {
            None
        } else {
            bihomogeneous_weights(m)
        };
        let dehom = col_weight.is_some();
        let mut rows: Vec<Vec<Poly>> = m
            .rows
            .par_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| clear_row(r, dehom))
            .collect();
        let mut used = vec![false; rows.len()];
        let mut pivots = Vec::new();
        for col in 0..m.ncols {
            let mut best: Option<(usize, (u32, usize, u64))> = None;
            for (i, row) in rows.iter().enumerate() {
                if used[i] || row[col].is_zero() {
                    continue;
                }
                let c = pivot_cost(&row[col]);
                if best.as_ref().map_or(true, |b| c < b.1) {
                    best = Some((i, c));
                }
            }
            let Some((p, _)) = best else { continue };
            used[p] = true;
            pivots.push((p, col));
            let prow = rows[p].clone();
            let a = prow[col].clone();
            rows.par_iter_mut().enumerate().for_each(|(i, row)| {
                if i == p || row[col].is_zero() {
                    return;
                }
                let e = row[col].clone();
                let g = gcd(&a, &e);
                let a1 = a.div_exact(&g).expect("gcd");
                let e1 = e.div_exact(&g).expect("gcd");
                for j in 0..row.len() {
                    let left = if row[j].is_zero() { Poly::zero() } else { row[j].mul(&a1) };
                    let right = if prow[j].is_zero() { Poly::zero() } else { prow[j].mul(&e1) };
                    row[j] = left.sub(&right);
                }
                debug_assert!(row[col].is_zero());
                make_primitive(row);
            });
        }
        Echelon { ncols: m.ncols, rows, pivots, col_weight }
    }

    fn kernel(&self) -> Vec<Vec<RatFun>> {
        let mut is_pivot = vec![false; self.ncols];
        for &(_, c) in &self.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.ncols).filter(|&c| !is_pivot[c]).collect();
        free.par_iter()
            .map(|&f| {
                let mut v = vec![RatFun::zero(); self.ncols];
                v[f] = RatFun::one();
                for &(p, c) in &self.pivots {
                    let x = &self.rows[p][f];
                    if x.is_zero() {
                        continue;
                    }
                    v[c] = -RatFun::reduce(x.clone(), self.rows[p][c].clone());
                }
                if let Some(w) = &self.col_weight {
                    for (j, x) in v.iter_mut().enumerate() {
                        if !x.is_zero() {
                            *x = rehomogenize(x, w[f] - w[j]);
                        }
                    }
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn check_kernel(m: &RatMatrix, expect_dim: usize) {
        let k = nullspace(m);
        assert_eq!(k.len(), expect_dim);
        for v in &k {
            assert!(m.apply(v).iter().all(|x| x.is_zero()), "not in kernel: {:?}", v);
        }
        assert_eq!(rank(m) + k.len(), m.ncols);
    }

    #[test]
    fn trivial_cases() {
        let id = RatMatrix::from_rows(vec![vec![rf("1"), rf("0")], vec![rf("0"), rf("1")]]);
        check_kernel(&id, 0);
        let z = RatMatrix::from_rows(vec![vec![rf("0"), rf("0")], vec![rf("0"), rf("0")]]);
        check_kernel(&z, 2);
        let m = RatMatrix::from_rows(vec![vec![rf("e1"), rf("e2")]]);
        let k = nullspace(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] * &rf("e1") + &k[0][1] * &rf("e2"), RatFun::zero());
        assert_eq!(k[0][0], rf("-e2/e1"));
    }

    #[test]
    fn inhomogeneous_and_beta_entries() {
        let m = RatMatrix::from_rows(vec![
            vec![rf("1 + e1"), rf("e2"), rf("b")],
            vec![rf("2 + 2*e1"), rf("2*e2"), rf("2*b")],
            vec![rf("e1"), rf("1/e2"), rf("0")],
        ]);
        check_kernel(&m, 1);
    }

    #[test]
    fn bihomogeneous_path() {
        let m = RatMatrix::from_rows(vec![
            vec![rf("e1"), rf("e1*e2"), rf("e1^2 + e2^2"), rf("1")],
            vec![rf("1/e2"), rf("3"), rf("(e1+e2)/(e1-e2)"), rf("1/(e1*e2)")],
        ]);
        assert!(bihomogeneous_weights(&m).is_some());
        check_kernel(&m, 2);
    }
}
