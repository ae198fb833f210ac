//! Vertex operators on Fock modules: exponentials V_lambda, normally ordered
//! monomials in derivatives of currents, the state-field correspondence and
//! n-th products / OPE singular parts.
//!
//! Conventions: V_lambda(z) = eps * S_lambda z^{b_0[lambda]} E_-(z) E_+(z) with
//! E_+ = exp(-sum_{n>0} b_n[lambda] z^{-n}/n), E_- = exp(sum_{n>0} b_{-n}[lambda] z^n/n)
//! and J^c(z) = sum_n b_n^c z^{-n-1}. In :J...V: the modes b_n with n >= 0
//! stand to the right of the exponential.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::fock::{apply_b, dot, mat_vec, sort_modes, FockError, FockSpace, FockState, Modes, Sector};
use crate::ratfield::RatFun;

/// coeff * :prod_i d^{k_i} J^{c_i} V_sector:, factors sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMonomial {
    pub coeff: RatFun,
    pub factors: Vec<(u32, u32)>,
    pub sector: Sector,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FieldExpr {
    pub terms: Vec<VertexMonomial>,
}

impl FieldExpr {
    pub fn zero() -> Self {
        FieldExpr::default()
    }

    pub fn current(fs: &FockSpace, c: usize) -> Self {
        FieldExpr {
            terms: vec![VertexMonomial { coeff: RatFun::one(), factors: vec![(0, c as u32)], sector: fs.zero_sector() }],
        }
    }

    pub fn exponential(sector: Sector) -> Self {
        FieldExpr { terms: vec![VertexMonomial { coeff: RatFun::one(), factors: Vec::new(), sector }] }
    }

    pub fn monomial(coeff: RatFun, mut factors: Vec<(u32, u32)>, sector: Sector) -> Self {
        factors.sort();
        FieldExpr { terms: vec![VertexMonomial { coeff, factors, sector }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &FieldExpr) -> FieldExpr {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        FieldExpr { terms }.collect()
    }

    pub fn scale(&self, c: &RatFun) -> FieldExpr {
        FieldExpr {
            terms: self
                .terms
                .iter()
                .map(|t| VertexMonomial { coeff: &t.coeff * c, factors: t.factors.clone(), sector: t.sector.clone() })
                .collect(),
        }
        .collect()
    }

    /// Merge equal monomials and drop zeros.
    pub fn collect(self) -> FieldExpr {
        let mut map: BTreeMap<(Sector, Vec<(u32, u32)>), RatFun> = BTreeMap::new();
        for t in self.terms {
            let e = map.entry((t.sector, t.factors)).or_insert_with(RatFun::zero);
            *e += &t.coeff;
        }
        FieldExpr {
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((sector, factors), coeff)| VertexMonomial { coeff, factors, sector })
                .collect(),
        }
    }

    /// Translation derivative; d V_lambda = :J[lambda] V_lambda:.
    pub fn derivative(&self, fs: &FockSpace) -> FieldExpr {
        let mut terms = Vec::new();
        for t in &self.terms {
            for i in 0..t.factors.len() {
                let mut f = t.factors.clone();
                f[i].0 += 1;
                f.sort();
                terms.push(VertexMonomial { coeff: t.coeff.clone(), factors: f, sector: t.sector.clone() });
            }
            if !t.sector.is_zero() {
                for (c, a) in fs.sector_alpha(&t.sector).iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut f = t.factors.clone();
                    f.push((0, c as u32));
                    f.sort();
                    terms.push(VertexMonomial { coeff: &t.coeff * a, factors: f, sector: t.sector.clone() });
                }
            }
        }
        FieldExpr { terms }.collect()
    }

    pub fn render(&self, fs: &FockSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s: Vec<String> = t
                    .factors
                    .iter()
                    .map(|(k, c)| {
                        let n = &fs.names[*c as usize];
                        match k {
                            0 => format!("J[{}]", n),
                            1 => format!("dJ[{}]", n),
                            _ => format!("d^{}J[{}]", k, n),
                        }
                    })
                    .collect();
                if !t.sector.is_zero() {
                    s.push(format!("V[{}]", t.sector));
                }
                let body = if s.is_empty() { "1".to_string() } else { format!(":{}:", s.join(" ")) };
                format!("({}) {}", t.coeff.pretty(), body)
            })
            .collect();
        parts.join(" + ")
    }
}

struct ExpData {
    alpha: Vec<RatFun>,
    /// <lambda, c> = (G alpha)_c.
    g: Vec<RatFun>,
    creation: Mutex<Vec<Arc<BTreeMap<Modes, RatFun>>>>,
}

impl ExpData {
    fn new(fs: &FockSpace, sector: &Sector) -> Self {
        let alpha = fs.sector_alpha(sector);
        let g = mat_vec(&fs.gram, &alpha);
        let mut c0 = BTreeMap::new();
        c0.insert(Vec::new(), RatFun::one());
        ExpData { alpha, g, creation: Mutex::new(vec![Arc::new(c0)]) }
    }

    /// Coefficient of z^p in E_-(z): p C_p = sum_{n=1}^p b_{-n}[lambda] C_{p-n}.
    fn creation(&self, p: usize) -> Arc<BTreeMap<Modes, RatFun>> {
        let mut cs = self.creation.lock().unwrap();
        while cs.len() <= p {
            let q = cs.len();
            let mut next: BTreeMap<Modes, RatFun> = BTreeMap::new();
            let inv = RatFun::from_ratio(1, q as i64);
            for n in 1..=q {
                for (c, a) in self.alpha.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let f = a * &inv;
                    for (m, x) in cs[q - n].iter() {
                        let mut m2 = m.clone();
                        m2.push((n as u32, c as u32));
                        sort_modes(&mut m2);
                        let e = next.entry(m2).or_insert_with(RatFun::zero);
                        *e += &(x * &f);
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            cs.push(Arc::new(next));
        }
        cs[p].clone()
    }
}

/// Vertex operator evaluation with cached creation series per exponential.
pub struct VertexEngine<'a> {
    pub fs: &'a FockSpace,
    cache: Mutex<HashMap<Sector, Arc<ExpData>>>,
}

fn falling(n: i64, k: u32) -> i64 {
    // prod_{j=1..k} (-n - j)
    (1..=k as i64).map(|j| -n - j).product()
}

fn as_int(x: &RatFun) -> Result<i64, FockError> {
    x.as_integer()
        .and_then(|n| i64::try_from(&n).ok())
        .ok_or_else(|| FockError::NonIntegral(x.pretty()))
}

fn compositions(total: i64, parts: usize, f: &mut dyn FnMut(&[i64])) {
    fn rec(rem: i64, left: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if left == 1 {
            cur.push(rem);
            f(cur);
            cur.pop();
            return;
        }
        for x in 0..=rem {
            cur.push(x);
            rec(rem - x, left - 1, cur, f);
            cur.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    if total < 0 {
        return;
    }
    let mut cur = Vec::with_capacity(parts);
    rec(total, parts, &mut cur, f);
}

impl<'a> VertexEngine<'a> {
    pub fn new(fs: &'a FockSpace) -> Self {
        VertexEngine { fs, cache: Mutex::new(HashMap::new()) }
    }

    fn exp_data(&self, s: &Sector) -> Arc<ExpData> {
        let mut c = self.cache.lock().unwrap();
        c.entry(s.clone()).or_insert_with(|| Arc::new(ExpData::new(self.fs, s))).clone()
    }

    /// z-exponent offset (lambda, sector) of V_lambda on a sector.
    pub fn offset(&self, lambda: &Sector, sector: &Sector) -> Result<i64, FockError> {
        if lambda.is_zero() {
            return Ok(0);
        }
        let ed = self.exp_data(lambda);
        as_int(&dot(&ed.alpha, &self.fs.zero_modes(sector)))
    }

    /// Coefficient of z^e in V_lambda(z) applied to s.
    pub fn exp_coeff(&self, lambda: &Sector, e: i64, s: &FockState) -> Result<FockState, FockError> {
        let mut out = FockState::zero();
        if lambda.is_zero() {
            if e == 0 {
                out = s.clone();
            }
            return Ok(out);
        }
        let ed = self.exp_data(lambda);
        let mut e0_cache: BTreeMap<Sector, (i64, i64)> = BTreeMap::new();
        for ((sec, modes), x) in s.terms() {
            let (e0, sign) = match e0_cache.get(sec) {
                Some(v) => *v,
                None => {
                    let e0 = as_int(&dot(&ed.alpha, &self.fs.zero_modes(sec)))?;
                    let v = (e0, self.fs.cocycle(lambda, sec));
                    e0_cache.insert(sec.clone(), v);
                    v
                }
            };
            let target = sec.add(lambda);
            let coeff = if sign < 0 { -x.clone() } else { x.clone() };
            // Group equal modes.
            let mut groups: Vec<((u32, u32), usize)> = Vec::new();
            for m in modes {
                match groups.last_mut() {
                    Some((g, k)) if g == m => *k += 1,
                    _ => groups.push((*m, 1)),
                }
            }
            let mut choice = vec![0usize; groups.len()];
            loop {
                // Removing j copies of b_{-n}^c contributes binom(k,j) (-g_c)^j z^{-n j}.
                let mut q = 0i64;
                let mut f = coeff.clone();
                let mut rest: Modes = Vec::new();
                for (gi, ((n, c), k)) in groups.iter().enumerate() {
                    let j = choice[gi];
                    if j > 0 {
                        q += (*n as i64) * j as i64;
                        let b = binom(*k as i64, j as i64);
                        f = &f * &(RatFun::from_int(b) * (-ed.g[*c as usize].clone()).pow(j as i32));
                    }
                    for _ in 0..(k - j) {
                        rest.push((*n, *c));
                    }
                }
                let p = e - e0 + q;
                if p >= 0 && !f.is_zero() {
                    let cp = ed.creation(p as usize);
                    for (cm, cc) in cp.iter() {
                        let mut m2 = rest.clone();
                        m2.extend(cm.iter().copied());
                        sort_modes(&mut m2);
                        out.add_term(target.clone(), m2, &f * cc);
                    }
                }
                // Next choice; a group can only lose modes when g_c != 0.
                let advanced = groups.iter().enumerate().any(|(i, ((_, c), k))| {
                    if choice[i] < *k && !ed.g[*c as usize].is_zero() {
                        choice[i] += 1;
                        true
                    } else {
                        choice[i] = 0;
                        false
                    }
                });
                if !advanced {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of z^e in a single monomial field applied to s.
    pub fn monomial_coeff(&self, mono: &VertexMonomial, e: i64, s: &FockState) -> Result<FockState, FockError> {
        let fs = self.fs;
        let f = mono.factors.len();
        let mut out = FockState::zero();
        for mask in 0u32..(1u32 << f) {
            let plus: Vec<(u32, u32)> = (0..f).filter(|i| mask >> i & 1 == 1).map(|i| mono.factors[i]).collect();
            let minus: Vec<(u32, u32)> = (0..f).filter(|i| mask >> i & 1 == 0).map(|i| mono.factors[i]).collect();
            let mut right: BTreeMap<i64, FockState> = BTreeMap::new();
            right.insert(0, s.clone());
            for &(k, c) in &plus {
                let mut next: BTreeMap<i64, FockState> = BTreeMap::new();
                for (zp, st) in &right {
                    for n in 0..=st.max_mode_degree() as i64 {
                        let st2 = apply_b(fs, n, c as usize, st);
                        if st2.is_zero() {
                            continue;
                        }
                        let coef = RatFun::from_int(falling(n, k));
                        next.entry(zp - n - 1 - k as i64).or_default().add_assign_scaled(&st2, &coef);
                    }
                }
                next.retain(|_, v| !v.is_zero());
                right = next;
            }
            let sum_k: i64 = minus.iter().map(|x| x.0 as i64).sum();
            for (zp, st) in &right {
                let (lo, hi) = if mono.sector.is_zero() {
                    (0, 0)
                } else {
                    let mut lo = i64::MAX;
                    for sec in st.sectors() {
                        lo = lo.min(self.offset(&mono.sector, &sec)? - st.max_mode_degree() as i64);
                    }
                    (lo, e - zp + sum_k)
                };
                for ev in lo..=hi {
                    let total = e - zp - ev + sum_k;
                    if total < 0 || (minus.is_empty() && total != 0) {
                        continue;
                    }
                    let vst = self.exp_coeff(&mono.sector, ev, st)?;
                    if vst.is_zero() {
                        continue;
                    }
                    compositions(total, minus.len(), &mut |ss: &[i64]| {
                        let mut coef = 1i64;
                        let mut cur = vst.clone();
                        for (i, &(k, c)) in minus.iter().enumerate() {
                            let n = -ss[i] - 1;
                            coef *= falling(n, k);
                            if coef == 0 {
                                return;
                            }
                            cur = apply_b(fs, n, c as usize, &cur);
                        }
                        out.add_assign_scaled(&cur, &(&mono.coeff * &RatFun::from_int(coef)));
                    });
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of z^e in F(z) s.
    pub fn field_coeff(&self, field: &FieldExpr, e: i64, s: &FockState) -> Result<FockState, FockError> {
        let mut out = FockState::zero();
        for m in &field.terms {
            let r = self.monomial_coeff(m, e, s)?;
            out.add_assign_scaled(&r, &RatFun::one());
        }
        Ok(out)
    }

    /// Mode m of F: coefficient of z^{-m-1+(lambda, sector)} per monomial and basis term.
    pub fn field_mode(&self, field: &FieldExpr, m: i64, s: &FockState) -> Result<FockState, FockError> {
        let mut out = FockState::zero();
        for mono in &field.terms {
            for sec in s.sectors() {
                let part = restrict_sector(s, &sec);
                let e = -m - 1 + self.offset(&mono.sector, &sec)?;
                let r = self.monomial_coeff(mono, e, &part)?;
                out.add_assign_scaled(&r, &RatFun::one());
            }
        }
        Ok(out)
    }

    pub fn vertex_mode(&self, lambda: &Sector, m: i64, s: &FockState) -> Result<FockState, FockError> {
        self.field_mode(&FieldExpr::exponential(lambda.clone()), m, s)
    }

    /// state -> field: b_{-n_1}...|mu> maps to :prod d^{n_i-1}J / (n_i-1)! V_mu:.
    pub fn field_of_state(&self, s: &FockState) -> FieldExpr {
        let mut terms = Vec::new();
        for ((sec, modes), x) in s.terms() {
            let mut denom = 1i64;
            let factors: Vec<(u32, u32)> = modes
                .iter()
                .map(|&(n, c)| {
                    denom *= (1..n as i64).product::<i64>();
                    (n - 1, c)
                })
                .collect();
            let mut factors = factors;
            factors.sort();
            terms.push(VertexMonomial { coeff: x * &RatFun::from_ratio(1, denom), factors, sector: sec.clone() });
        }
        FieldExpr { terms }.collect()
    }

    /// F(z)|0> at z^0.
    pub fn state_of_field(&self, f: &FieldExpr) -> Result<FockState, FockError> {
        self.field_coeff(f, 0, &self.fs.vacuum())
    }

    /// a_(j) b: coefficient of z^{-j-1} in Y(a,z) b.
    pub fn n_product(&self, a: &FockState, j: i64, b: &FockState) -> Result<FockState, FockError> {
        self.field_coeff(&self.field_of_state(a), -j - 1, b)
    }

    /// Largest j with a_(j) b possibly nonzero, from the grading.
    pub fn max_pole(&self, a: &FockState, b: &FockState) -> Result<i64, FockError> {
        let fs = self.fs;
        let mut best: Option<i64> = None;
        for ((sa, ma), _) in a.terms() {
            for ((sb, mb), _) in b.terms() {
                let da = fs.sector_degree(sa)? + num_rational::Rational64::from_integer(crate::fock::mode_degree(ma) as i64);
                let db = fs.sector_degree(sb)? + num_rational::Rational64::from_integer(crate::fock::mode_degree(mb) as i64);
                let dt = fs.sector_degree(&sa.add(sb))?;
                let j = (da + db - dt - num_rational::Rational64::from_integer(1)).floor().to_integer();
                best = Some(best.map_or(j, |x: i64| x.max(j)));
            }
        }
        Ok(best.unwrap_or(-1))
    }

    /// Singular part of A(z)B(w): pole order j+1 -> field of a_(j) b.
    pub fn ope_singular(&self, f1: &FieldExpr, f2: &FieldExpr) -> Result<BTreeMap<i64, FieldExpr>, FockError> {
        let a = self.state_of_field(f1)?;
        let b = self.state_of_field(f2)?;
        let jmax = self.max_pole(&a, &b)?;
        let results: Vec<(i64, Result<FockState, FockError>)> =
            (0..=jmax.max(-1)).into_par_iter().map(|j| (j, self.n_product(&a, j, &b))).collect();
        let mut out = BTreeMap::new();
        for (j, r) in results {
            let st = r?;
            if !st.is_zero() {
                out.insert(j + 1, self.field_of_state(&st));
            }
        }
        Ok(out)
    }
}

fn binom(n: i64, k: i64) -> i64 {
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn restrict_sector(s: &FockState, sec: &Sector) -> FockState {
    let mut out = FockState::zero();
    for ((t, m), x) in s.terms() {
        if t == sec {
            out.add_term(t.clone(), m.clone(), x.clone());
        }
    }
    out
}

/// Render an OPE as lines "A(z) B(w) ~ (...) (z-w)^-k".
pub fn render_ope(fs: &FockSpace, a: &str, b: &str, ope: &BTreeMap<i64, FieldExpr>) -> String {
    if ope.is_empty() {
        return format!("{}(z) {}(w) ~ 0", a, b);
    }
    let parts: Vec<String> =
        ope.iter().rev().map(|(k, f)| format!("[{}] (z-w)^-{}", f.render(fs), k)).collect();
    format!("{}(z) {}(w) ~ {}", a, b, parts.join(" + "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::{lattice_data, DivisorSpec, LatticeData};
    use crate::fock::mode_basis;
    use crate::gkm::{build_geometry, GeometrySpec};
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn lattice(geo: GeometrySpec, series: &str) -> LatticeData {
        let g = build_geometry(&geo).unwrap();
        lattice_data(&g, &DivisorSpec::parse_inline(&g, series).unwrap()).unwrap()
    }

    fn basis_upto(fs: &FockSpace, sector: &Sector, d: u32) -> Vec<FockState> {
        let colors: Vec<usize> = (0..fs.ncolors()).collect();
        (0..=d)
            .flat_map(|n| mode_basis(&colors, n))
            .map(|m| FockState::basis(sector.clone(), m))
            .collect()
    }

    #[test]
    fn current_modes_match_apply_b() {
        let l = lattice(GeometrySpec::Ymn { m: 2, n: 0 }, "d2");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let j = FieldExpr::current(&fs, 1);
        let sec = Sector::new(vec![1], vec![]);
        for s in basis_upto(&fs, &sec, 3) {
            for m in -3..=3 {
                assert_eq!(eng.field_mode(&j, m, &s).unwrap(), apply_b(&fs, m, 1, &s));
            }
        }
    }

    #[test]
    fn leading_mode_of_exponential() {
        let l = lattice(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let one = Sector::new(vec![1], vec![]);
        let st = eng.state_of_field(&FieldExpr::exponential(one.clone())).unwrap();
        assert_eq!(st, FockState::basis(one, vec![]));
    }

    #[test]
    fn heisenberg_exponential_commutator() {
        // [b_n^c, V(z)] = <lambda,c> z^n V(z), checked coefficientwise.
        let l = lattice(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let lam = Sector::new(vec![1], vec![]);
        let g = mat_vec(&fs.gram, &fs.sector_alpha(&lam));
        for src in [Sector::new(vec![0], vec![]), Sector::new(vec![-1], vec![])] {
            for s in basis_upto(&fs, &src, 3) {
                for c in 0..2 {
                    for n in -2i64..=2 {
                        for e in -3i64..=3 {
                            let lhs = apply_b(&fs, n, c, &eng.exp_coeff(&lam, e, &s).unwrap())
                                .sub(&eng.exp_coeff(&lam, e, &apply_b(&fs, n, c, &s)).unwrap());
                            let rhs = eng.exp_coeff(&lam, e - n, &s).unwrap().scale(&g[c]);
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conifold_exponential_product() {
        // V_1(z)V_1(w) = (z-w)^chi :V_1(z)V_1(w):, chi = 1: (V_1)_(j) V_1 vanishes
        // for j >= 0 and (V_1)_(-2) V_1 is the leading normally ordered term.
        let l = lattice(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let one = FockState::basis(Sector::new(vec![1], vec![]), vec![]);
        for j in 0..3 {
            assert!(eng.n_product(&one, j, &one).unwrap().is_zero());
        }
        let two = Sector::new(vec![2], vec![]);
        let lead = eng.n_product(&one, -2, &one).unwrap();
        assert_eq!(lead, FockState::basis(two, vec![]).scale(&RatFun::from_int(fs.cocycle(
            &Sector::new(vec![1], vec![]),
            &Sector::new(vec![1], vec![])
        ))));
        assert!(eng.n_product(&one, -1, &one).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_ope_double_pole() {
        let l = lattice(GeometrySpec::Ymn { m: 2, n: 0 }, "d2");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let j = FieldExpr::current(&fs, 0);
        let ope = eng.ope_singular(&j, &j).unwrap();
        assert_eq!(ope.len(), 1);
        let f = &ope[&2];
        assert_eq!(f.terms.len(), 1);
        assert_eq!(f.terms[0].coeff, rf("-1/(e1*e3)"));
        assert!(f.terms[0].factors.is_empty());
    }

    #[test]
    fn virasoro_zero_mode_on_first_excited_state() {
        let l = LatticeData::free_bosons(vec![rf("-1/(e1*e2)")], vec![]);
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let k = fs.gram[0][0].clone();
        let t = FieldExpr::monomial(RatFun::one() / (RatFun::from_int(2) * k), vec![(0, 0), (0, 0)], fs.zero_sector());
        let s = apply_b(&fs, -1, 0, &fs.vacuum());
        assert_eq!(eng.field_mode(&t, 1, &s).unwrap(), s);
    }

    #[test]
    fn derivative_is_translation() {
        let l = lattice(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let f = FieldExpr::monomial(rf("e1"), vec![(1, 0), (0, 1)], Sector::new(vec![-1], vec![]));
        let d = eng.state_of_field(&f.derivative(&fs)).unwrap();
        let t = eng.field_coeff(&f, 1, &fs.vacuum()).unwrap();
        assert_eq!(d, t);
        assert!(!d.is_zero());
    }

    #[test]
    fn state_field_roundtrip() {
        let l = lattice(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        for sec in [Sector::new(vec![0], vec![]), Sector::new(vec![1], vec![]), Sector::new(vec![-2], vec![])] {
            for s in basis_upto(&fs, &sec, 3) {
                let f = eng.field_of_state(&s);
                let back = eng.state_of_field(&f).unwrap();
                let c = fs.cocycle(&sec, &fs.zero_sector());
                assert_eq!(back, s.scale(&RatFun::from_int(c)));
            }
        }
    }

    #[test]
    fn non_integral_offset_is_an_error() {
        let l = lattice(GeometrySpec::C3, "d1,d1");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let q = Sector::new(vec![], vec![1, 0]);
        let s = FockState::basis(Sector::new(vec![], vec![1, 0]), vec![]);
        assert!(matches!(eng.vertex_mode(&q, 0, &s), Err(FockError::NonIntegral(_))));
    }
}
