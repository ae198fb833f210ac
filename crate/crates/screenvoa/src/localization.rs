//! Fixed-point model of the Heisenberg action on the equivariant cohomology
//! of Hilbert schemes of points on C^2.
//!
//! Box (i, j) of a partition (row i, column j) is the monomial x^j y^i; x has
//! weight e1 and y weight e2. Tangent spaces are computed two ways: the
//! arm/leg character, and directly as weight spaces of Hom(I, O/I). The
//! nested space Hilb_{n,n+1} at (I_mu in I_lambda) is the kernel of
//! Hom(I_lambda, O/I_lambda) + Hom(I_mu, O/I_mu) -> Hom(I_mu, O/I_lambda).
//!
//! b_{-1} has matrix elements e(T_lambda)/e(T_{lambda,mu}); b_1 is minus its
//! adjoint for ([lambda],[mu]) = delta e(T_lambda). b_{-2} and b_2 are the
//! double commutators of b_{-1}, b_1 with D = c_1(O/I), normalized on the
//! vacuum; all other relations are then checked.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::gkm::Weight;
use crate::ratfield::RatFun;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(pub Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn transpose(&self) -> Partition {
        let m = self.0.first().copied().unwrap_or(0);
        Partition((0..m).map(|j| self.0.iter().filter(|&&p| p > j).count() as u32).collect())
    }

    /// Boxes (row, column).
    pub fn boxes(&self) -> Vec<(u32, u32)> {
        let mut v = Vec::new();
        for (i, &p) in self.0.iter().enumerate() {
            for j in 0..p {
                v.push((i as u32, j));
            }
        }
        v
    }

    fn contains(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.0.len() && (j as u32) < self.0[i as usize]
    }

    /// Partitions obtained by adding one box.
    pub fn add_box(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..=self.0.len() {
            let cur = self.0.get(i).copied().unwrap_or(0);
            let above = if i == 0 { u32::MAX } else { self.0[i - 1] };
            if cur < above {
                let mut p = self.0.clone();
                if i == p.len() {
                    p.push(1);
                } else {
                    p[i] += 1;
                }
                out.push(Partition(p));
            }
        }
        out
    }

    pub fn remove_box(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            let next = self.0.get(i + 1).copied().unwrap_or(0);
            if self.0[i] > next {
                let mut p = self.0.clone();
                p[i] -= 1;
                out.push(Partition::new(p));
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

/// Fixed points (lambda0, lambda_inf) of total size n in any sector ell.
pub fn conifold_fixed_points(_ell: i64, n: usize) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for a in 0..=n {
        for p in partitions_of(a) {
            for q in partitions_of(n - a) {
                out.push((p.clone(), q));
            }
        }
    }
    out
}

/// Arm/leg tangent character: per box, (l+1) e1 - a e2 and -l e1 + (a+1) e2,
/// with arm along x (columns) and leg along y (rows).
pub fn hilb_tangent(lambda: &Partition) -> Vec<Weight> {
    let t = lambda.transpose();
    let mut out = Vec::new();
    for (i, j) in lambda.boxes() {
        let arm = lambda.0[i as usize] as i64 - j as i64 - 1;
        let leg = t.0[j as usize] as i64 - i as i64 - 1;
        out.push(Weight { a: arm + 1, b: -leg });
        out.push(Weight { a: -arm, b: leg + 1 });
    }
    out.sort();
    out
}

pub fn euler_class(ws: &[Weight]) -> RatFun {
    ws.iter().fold(RatFun::one(), |acc, w| &acc * &w.to_ratfun())
}

// ---------------------------------------------------------------------------
// Direct weight-space computation.

fn rank_q(rows: &mut [Vec<BigRational>], ncols: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &piv;
                for k in c..ncols {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Variables and constraints of Hom(I_src, O/I_tgt) in weight w (phi(x^m) = c_m x^{m+w}).
struct HomSystem {
    vars: Vec<(i64, i64)>,
    /// Each constraint: c_a - c_b = 0 (Some(b)) or c_a = 0 (None).
    cons: Vec<(usize, Option<usize>)>,
}

fn hom_system(src: &Partition, tgt: &Partition, w: (i64, i64)) -> HomSystem {
    // Monomial (j, i) = x^j y^i; membership in the staircase uses row i, column j.
    let in_src_ideal = |j: i64, i: i64| j >= 0 && i >= 0 && !src.contains(i, j);
    let in_tgt_stair = |j: i64, i: i64| tgt.contains(i, j);
    let bound = 2 + src.0.len().max(src.0.first().copied().unwrap_or(0) as usize) as i64
        + tgt.0.len().max(tgt.0.first().copied().unwrap_or(0) as usize) as i64
        + w.0.abs()
        + w.1.abs();
    let mut vars = Vec::new();
    let mut index = HashMap::new();
    for j in 0..=bound {
        for i in 0..=bound {
            if in_src_ideal(j, i) && in_tgt_stair(j + w.0, i + w.1) {
                index.insert((j, i), vars.len());
                vars.push((j, i));
            }
        }
    }
    let mut cons = Vec::new();
    for j in 0..=bound {
        for i in 0..=bound {
            if !in_src_ideal(j, i) {
                continue;
            }
            for (dj, di) in [(1, 0), (0, 1)] {
                let (j2, i2) = (j + dj, i + di);
                let Some(&b) = index.get(&(j2, i2)) else { continue };
                match index.get(&(j, i)) {
                    Some(&a) => cons.push((b, Some(a))),
                    None => cons.push((b, None)),
                }
            }
        }
    }
    HomSystem { vars, cons }
}

fn push_cons(rows: &mut Vec<Vec<BigRational>>, ncols: usize, off: usize, sys: &HomSystem) {
    for &(a, b) in &sys.cons {
        let mut row = vec![BigRational::zero(); ncols];
        row[off + a] = BigRational::one();
        if let Some(b) = b {
            row[off + b] -= BigRational::one();
        }
        rows.push(row);
    }
}

fn hom_dim(src: &Partition, tgt: &Partition, w: (i64, i64)) -> usize {
    let sys = hom_system(src, tgt, w);
    let n = sys.vars.len();
    if n == 0 {
        return 0;
    }
    let mut rows = Vec::new();
    push_cons(&mut rows, n, 0, &sys);
    n - rank_q(&mut rows, n)
}

fn weight_range(n: u32) -> impl Iterator<Item = (i64, i64)> {
    let b = n as i64 + 1;
    (-b..=b).flat_map(move |a| (-b..=b).map(move |c| (a, c)))
}

fn expand(dims: Vec<((i64, i64), usize)>) -> Vec<Weight> {
    let mut out = Vec::new();
    for ((a, b), d) in dims {
        for _ in 0..d {
            // phi of weight w moves x^m to x^{m+w}; the tangent weight is -w.
            out.push(Weight { a: -a, b: -b });
        }
    }
    out.sort();
    out
}

/// Tangent weights of Hilb_n at lambda from Hom(I, O/I).
pub fn hilb_tangent_direct(lambda: &Partition) -> Vec<Weight> {
    let dims = weight_range(lambda.size())
        .map(|w| (w, hom_dim(lambda, lambda, w)))
        .filter(|(_, d)| *d > 0)
        .collect();
    expand(dims)
}

/// Tangent weights of Hilb_{n,n+1} at (lambda in mu).
pub fn nested_tangent(lambda: &Partition, mu: &Partition) -> Vec<Weight> {
    let mut dims = Vec::new();
    for w in weight_range(mu.size()) {
        let a = hom_system(lambda, lambda, w);
        let b = hom_system(mu, mu, w);
        let (na, nb) = (a.vars.len(), b.vars.len());
        let n = na + nb;
        if n == 0 {
            continue;
        }
        let mut rows = Vec::new();
        push_cons(&mut rows, n, 0, &a);
        push_cons(&mut rows, n, na, &b);
        // Agreement in Hom(I_mu, O/I_lambda): x^m in I_mu with x^{m+w} in the lambda staircase.
        let ia: HashMap<(i64, i64), usize> = a.vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        for (k, &(j, i)) in b.vars.iter().enumerate() {
            if lambda.contains(i + w.1, j + w.0) {
                let mut row = vec![BigRational::zero(); n];
                row[na + k] = BigRational::one();
                if let Some(&ka) = ia.get(&(j, i)) {
                    row[ka] -= BigRational::one();
                }
                rows.push(row);
            }
        }
        let d = n - rank_q(&mut rows, n);
        if d > 0 {
            dims.push((w, d));
        }
    }
    expand(dims)
}

// ---------------------------------------------------------------------------
// Operators.

pub type LocState = BTreeMap<Partition, RatFun>;

fn add_to(s: &mut LocState, p: Partition, c: RatFun) {
    if c.is_zero() {
        return;
    }
    let e = s.entry(p.clone()).or_insert_with(RatFun::zero);
    *e += &c;
    if e.is_zero() {
        s.remove(&p);
    }
}

pub fn loc_sub(a: &LocState, b: &LocState) -> LocState {
    let mut out = a.clone();
    for (p, c) in b {
        add_to(&mut out, p.clone(), -c.clone());
    }
    out
}

pub fn loc_scale(a: &LocState, c: &RatFun) -> LocState {
    let mut out = LocState::new();
    for (p, x) in a {
        add_to(&mut out, p.clone(), x * c);
    }
    out
}

pub fn basis_state(p: &Partition) -> LocState {
    let mut s = LocState::new();
    s.insert(p.clone(), RatFun::one());
    s
}

/// Which realization produced b_{+-2}.
pub const B2_REALIZATION: &str = "b_{-2} = c [[D, b_{-1}], b_{-1}], b_2 = c' [[b_1, D], b_1], D = c_1(O/I), c and c' fixed on the vacuum";

pub struct Nakajima {
    tangent: Mutex<HashMap<Partition, RatFun>>,
    nested: Mutex<HashMap<(Partition, Partition), RatFun>>,
    c_minus2: RatFun,
    c_plus2: RatFun,
}

impl Default for Nakajima {
    fn default() -> Self {
        Self::new()
    }
}

impl Nakajima {
    pub fn new() -> Self {
        let mut n = Nakajima {
            tangent: Mutex::new(HashMap::new()),
            nested: Mutex::new(HashMap::new()),
            c_minus2: RatFun::one(),
            c_plus2: RatFun::one(),
        };
        // b_{-2}|0> spans the size-2 part of the vacuum orbit; fix c by
        // [b_2, b_{-2}]|0> = 2k|0> with c' = c (both sides scale by c c').
        let vac = basis_state(&Partition::empty());
        let raw = n.b2_raw(&n.bm2_raw(&vac));
        let x = raw.get(&Partition::empty()).cloned().unwrap_or_else(RatFun::zero);
        let want = &Self::level() * &RatFun::from_int(2);
        // Put the whole normalization on b_2 so no square roots are needed.
        n.c_plus2 = want.checked_div(&x).expect("nonzero vacuum commutator");
        n
    }

    /// k = -1/(e1 e2).
    pub fn level() -> RatFun {
        (&RatFun::e1() * &RatFun::e2()).inv().expect("nonzero") * RatFun::from_int(-1)
    }

    pub fn euler_tangent(&self, p: &Partition) -> RatFun {
        if let Some(x) = self.tangent.lock().unwrap().get(p) {
            return x.clone();
        }
        let e = euler_class(&hilb_tangent(p));
        self.tangent.lock().unwrap().insert(p.clone(), e.clone());
        e
    }

    pub fn euler_nested(&self, l: &Partition, m: &Partition) -> RatFun {
        let key = (l.clone(), m.clone());
        if let Some(x) = self.nested.lock().unwrap().get(&key) {
            return x.clone();
        }
        let e = euler_class(&nested_tangent(l, m));
        self.nested.lock().unwrap().insert(key, e.clone());
        e
    }

    /// <mu| b_{-1} |lambda>.
    pub fn raise_coeff(&self, l: &Partition, m: &Partition) -> RatFun {
        self.euler_tangent(l).checked_div(&self.euler_nested(l, m)).expect("nonzero nested Euler class")
    }

    /// <lambda| b_1 |mu> = -<mu| b_{-1} |lambda> e(T_mu)/e(T_lambda).
    pub fn lower_coeff(&self, l: &Partition, m: &Partition) -> RatFun {
        -(self.euler_tangent(m).checked_div(&self.euler_nested(l, m)).expect("nonzero nested Euler class"))
    }

    pub fn raise(&self, s: &LocState) -> LocState {
        let mut out = LocState::new();
        for (l, c) in s {
            for m in l.add_box() {
                add_to(&mut out, m.clone(), c * &self.raise_coeff(l, &m));
            }
        }
        out
    }

    pub fn lower(&self, s: &LocState) -> LocState {
        let mut out = LocState::new();
        for (m, c) in s {
            for l in m.remove_box() {
                add_to(&mut out, l.clone(), c * &self.lower_coeff(&l, m));
            }
        }
        out
    }

    /// Multiplication by c_1(O/I): the sum of box weights.
    pub fn d_op(&self, s: &LocState) -> LocState {
        let mut out = LocState::new();
        for (p, c) in s {
            let w: RatFun = p
                .boxes()
                .iter()
                .fold(RatFun::zero(), |acc, &(i, j)| &acc + &RatFun::weight(j as i64, i as i64));
            add_to(&mut out, p.clone(), c * &w);
        }
        out
    }

    fn comm(&self, f: &dyn Fn(&LocState) -> LocState, g: &dyn Fn(&LocState) -> LocState, s: &LocState) -> LocState {
        loc_sub(&f(&g(s)), &g(&f(s)))
    }

    fn bm2_raw(&self, s: &LocState) -> LocState {
        let inner = |x: &LocState| self.comm(&|y| self.d_op(y), &|y| self.raise(y), x);
        self.comm(&inner, &|y| self.raise(y), s)
    }

    fn b2_raw(&self, s: &LocState) -> LocState {
        let inner = |x: &LocState| self.comm(&|y| self.lower(y), &|y| self.d_op(y), x);
        self.comm(&inner, &|y| self.lower(y), s)
    }

    /// b_n for n in {-2, -1, 1, 2}.
    pub fn b(&self, n: i64, s: &LocState) -> LocState {
        match n {
            -1 => self.raise(s),
            1 => self.lower(s),
            -2 => loc_scale(&self.bm2_raw(s), &self.c_minus2),
            2 => loc_scale(&self.b2_raw(s), &self.c_plus2),
            _ => panic!("unsupported mode {}", n),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeisenbergReport {
    pub max_size: usize,
    pub checked: usize,
    pub failures: Vec<String>,
    pub realization: String,
}

impl HeisenbergReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// [b_m, b_n] = m delta_{m+n,0} k on every partition of size <= max_size.
pub fn heisenberg_certify(nak: &Nakajima, max_size: usize) -> HeisenbergReport {
    let k = Nakajima::level();
    let modes = [-2i64, -1, 1, 2];
    let parts: Vec<Partition> = (0..=max_size).flat_map(partitions_of).collect();
    let results: Vec<(usize, Vec<String>)> = parts
        .par_iter()
        .map(|p| {
            let v = basis_state(p);
            let mut fails = Vec::new();
            let mut count = 0;
            for (i, &m) in modes.iter().enumerate() {
                for &n in &modes[i + 1..] {
                    let lhs = loc_sub(&nak.b(m, &nak.b(n, &v)), &nak.b(n, &nak.b(m, &v)));
                    let rhs = if m + n == 0 { loc_scale(&v, &(&k * &RatFun::from_int(m))) } else { LocState::new() };
                    let diff = loc_sub(&lhs, &rhs);
                    if !diff.is_empty() {
                        fails.push(format!("[b_{}, b_{}] on {}: residue {}", m, n, p, render_loc(&diff)));
                    }
                    count += 1;
                }
            }
            (count, fails)
        })
        .collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (c, f) in results {
        checked += c;
        failures.extend(f);
    }
    HeisenbergReport { max_size, checked, failures, realization: B2_REALIZATION.into() }
}

pub fn render_loc(s: &LocState) -> String {
    if s.is_empty() {
        return "0".into();
    }
    s.iter().map(|(p, c)| format!("({}) [{}]", c.pretty(), p)).collect::<Vec<_>>().join(" + ")
}

/// Matrix of b_n from size-a partitions, rows indexed by targets.
pub fn operator_matrix(nak: &Nakajima, n: i64, a: usize) -> Vec<(Partition, Partition, RatFun)> {
    let mut out = Vec::new();
    for p in partitions_of(a) {
        for (q, c) in nak.b(n, &basis_state(&p)) {
            out.push((p.clone(), q, c));
        }
    }
    out
}

/// Level conventions for the two fixed points of the conifold's compact curve.
pub fn conifold_levels() -> Vec<(String, String)> {
    vec![
        ("local toric chart".into(), "k_0 = -1/(e2*e3), k_inf = 1/(e2*e3)".into()),
        ("grading of the pair-of-partitions example".into(), "k_0 = -1/(2*e1*(e2-e1))".into()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn small_tangents() {
        assert_eq!(hilb_tangent(&p(&[1])), vec![Weight::E1, Weight::E2].into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
        let t = hilb_tangent(&p(&[2]));
        assert_eq!(t.len(), 4);
        assert!(t.contains(&Weight { a: 2, b: 0 }));
        assert!(t.contains(&Weight { a: -1, b: 1 }));
        // transpose swaps e1 and e2
        let mut tt: Vec<Weight> = hilb_tangent(&p(&[1, 1])).iter().map(|w| Weight { a: w.b, b: w.a }).collect();
        tt.sort();
        assert_eq!(tt, t);
    }

    #[test]
    fn tangents_agree_with_hom() {
        for n in 0..=5 {
            for l in partitions_of(n) {
                let a = hilb_tangent(&l);
                assert_eq!(a.len(), 2 * n);
                assert!(a.iter().all(|w| w.a != 0 || w.b != 0));
                assert_eq!(a, hilb_tangent_direct(&l), "{}", l);
            }
        }
    }

    #[test]
    fn nested_dimension() {
        for n in 0..=4 {
            for l in partitions_of(n) {
                for m in l.add_box() {
                    let t = nested_tangent(&l, &m);
                    assert_eq!(t.len(), 2 * n + 2, "{} < {}", l, m);
                    assert!(t.iter().all(|w| w.a != 0 || w.b != 0));
                }
            }
        }
        // Hilb_{0,1} = C^2
        let mut t = nested_tangent(&Partition::empty(), &p(&[1]));
        t.sort();
        assert_eq!(t, hilb_tangent(&p(&[1])));
    }

    #[test]
    fn raise_and_lower() {
        let nak = Nakajima::new();
        let vac = basis_state(&Partition::empty());
        let one = nak.raise(&vac);
        assert_eq!(one.keys().cloned().collect::<Vec<_>>(), vec![p(&[1])]);
        let two = nak.raise(&one);
        assert_eq!(two.keys().cloned().collect::<Vec<_>>(), vec![p(&[1, 1]), p(&[2])]);
        assert!(nak.lower(&vac).is_empty());
        let c = loc_sub(&nak.lower(&nak.raise(&vac)), &nak.raise(&nak.lower(&vac)));
        assert_eq!(c, loc_scale(&vac, &Nakajima::level()));
    }

    #[test]
    fn degree_two_commutator_is_scalar() {
        let nak = Nakajima::new();
        for q in partitions_of(2) {
            let v = basis_state(&q);
            let c = loc_sub(&nak.lower(&nak.raise(&v)), &nak.raise(&nak.lower(&v)));
            assert_eq!(c, loc_scale(&v, &Nakajima::level()));
        }
    }

    #[test]
    fn heisenberg_small() {
        let nak = Nakajima::new();
        let r = heisenberg_certify(&nak, 3);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn conifold_points() {
        assert_eq!(conifold_fixed_points(0, 0), vec![(Partition::empty(), Partition::empty())]);
        assert_eq!(conifold_fixed_points(3, 1).len(), 2);
        assert_eq!(conifold_fixed_points(-2, 2).len(), 5);
        assert_eq!(partitions_of(10).len(), 42);
    }
}
