//! Fock modules of a Heisenberg algebra with a lattice of sectors.
//!
//! A `FockSpace` is given by colors c with Gram matrix G,
//! [b_m^c, b_n^d] = m delta_{m+n,0} G(c,d), and a list of sector generators
//! (lattice curves, then screening tags), each with a coordinate vector alpha
//! in color space. On the sector v = sum n_a g_a the zero mode b_0^c acts by
//! (G alpha_v)_c.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use crate::divisor::LatticeData;
use crate::ratfield::RatFun;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Sector {
    pub lattice: Vec<i64>,
    pub tags: Vec<i64>,
}

impl Sector {
    pub fn new(lattice: Vec<i64>, tags: Vec<i64>) -> Self {
        Sector { lattice, tags }
    }

    pub fn zero(nl: usize, nt: usize) -> Self {
        Sector { lattice: vec![0; nl], tags: vec![0; nt] }
    }

    pub fn unit_tag(nl: usize, nt: usize, s: usize) -> Self {
        let mut x = Self::zero(nl, nt);
        x.tags[s] = 1;
        x
    }

    pub fn unit_lattice(nl: usize, nt: usize, i: usize) -> Self {
        let mut x = Self::zero(nl, nt);
        x.lattice[i] = 1;
        x
    }

    pub fn is_zero(&self) -> bool {
        self.lattice.iter().all(|&x| x == 0) && self.tags.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Sector) -> Sector {
        Sector {
            lattice: self.lattice.iter().zip(&o.lattice).map(|(a, b)| a + b).collect(),
            tags: self.tags.iter().zip(&o.tags).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Sector {
        Sector { lattice: self.lattice.iter().map(|a| -a).collect(), tags: self.tags.iter().map(|a| -a).collect() }
    }

    fn coords(&self) -> impl Iterator<Item = i64> + '_ {
        self.lattice.iter().chain(self.tags.iter()).copied()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "l=({})", j(&self.lattice))?;
        if self.tags.iter().any(|&t| t != 0) {
            write!(f, ";s=({})", j(&self.tags))?;
        }
        Ok(())
    }
}

/// Creation modes b_{-n}^c as (n, c), sorted by descending n then ascending c.
pub type Modes = Vec<(u32, u32)>;

pub fn sort_modes(m: &mut Modes) {
    m.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
}

pub fn mode_degree(m: &Modes) -> u32 {
    m.iter().map(|x| x.0).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    pub names: Vec<String>,
    pub gram: Vec<Vec<RatFun>>,
    /// Color coordinates of sector generators (lattice ones first).
    pub gen_alpha: Vec<Vec<RatFun>>,
    pub nlattice: usize,
    /// Linear part f of the degree offset on generators.
    pub gen_f: Vec<RatFun>,
    /// Integral pairing on lattice generators, used by the cocycle.
    pub chi: Vec<Vec<i64>>,
    gen_nu: Vec<Vec<RatFun>>,
    gen_pair: Vec<Vec<RatFun>>,
    diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("non-integral pairing: z-exponent {0} is not an integer")]
    NonIntegral(String),
    #[error("sector degree of {0} is not a rational number")]
    NonRationalDegree(String),
    #[error("state is not homogeneous")]
    Mixed,
}

impl FockSpace {
    pub fn new(
        names: Vec<String>,
        gram: Vec<Vec<RatFun>>,
        gen_alpha: Vec<Vec<RatFun>>,
        nlattice: usize,
        gen_f: Vec<RatFun>,
        chi: Vec<Vec<i64>>,
    ) -> Self {
        let n = names.len();
        assert!(gram.len() == n && gram.iter().all(|r| r.len() == n));
        assert_eq!(gen_alpha.len(), gen_f.len());
        let gen_nu: Vec<Vec<RatFun>> = gen_alpha.iter().map(|a| mat_vec(&gram, a)).collect();
        let gen_pair = gen_alpha
            .iter()
            .map(|a| gen_nu.iter().map(|nu| dot(a, nu)).collect())
            .collect();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || gram[i][j].is_zero()));
        FockSpace { names, gram, gen_alpha, nlattice, gen_f, chi, gen_nu, gen_pair, diagonal }
    }

    /// Colors = sheet points; generators = curve cocharacters then screenings.
    pub fn from_lattice(l: &LatticeData) -> Self {
        let n = l.npoints();
        let mut gram = vec![vec![RatFun::zero(); n]; n];
        for y in 0..n {
            gram[y][y] = l.levels[y].clone();
        }
        let mut gen_alpha = l.curve_cochars.clone();
        let mut gen_f: Vec<RatFun> = (0..l.ncurves()).map(|i| RatFun::from_ratio(2 - l.chi[i][i], 2)).collect();
        for q in &l.screenings {
            gen_alpha.push(q.cochar.clone());
            gen_f.push(RatFun::one() - l.pair(&q.cochar, &q.cochar) * RatFun::from_ratio(1, 2));
        }
        FockSpace::new(l.names.clone(), gram, gen_alpha, l.ncurves(), gen_f, l.chi.clone())
    }

    pub fn ncolors(&self) -> usize {
        self.names.len()
    }

    pub fn ntags(&self) -> usize {
        self.gen_alpha.len() - self.nlattice
    }

    pub fn zero_sector(&self) -> Sector {
        Sector::zero(self.nlattice, self.ntags())
    }

    pub fn vacuum(&self) -> FockState {
        FockState::basis(self.zero_sector(), Vec::new())
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Color coordinates of a sector.
    pub fn sector_alpha(&self, s: &Sector) -> Vec<RatFun> {
        let mut v = vec![RatFun::zero(); self.ncolors()];
        for (a, n) in s.coords().enumerate() {
            if n != 0 {
                let c = RatFun::from_int(n);
                for (x, y) in v.iter_mut().zip(&self.gen_alpha[a]) {
                    if !y.is_zero() {
                        *x += &c * y;
                    }
                }
            }
        }
        v
    }

    /// b_0 eigenvalues on a sector.
    pub fn zero_modes(&self, s: &Sector) -> Vec<RatFun> {
        let mut v = vec![RatFun::zero(); self.ncolors()];
        for (a, n) in s.coords().enumerate() {
            if n != 0 {
                let c = RatFun::from_int(n);
                for (x, y) in v.iter_mut().zip(&self.gen_nu[a]) {
                    if !y.is_zero() {
                        *x += &c * y;
                    }
                }
            }
        }
        v
    }

    /// Pairing of two sectors.
    pub fn sector_pair(&self, s: &Sector, t: &Sector) -> RatFun {
        let sc: Vec<i64> = s.coords().collect();
        let tc: Vec<i64> = t.coords().collect();
        let mut acc = RatFun::zero();
        for (a, &x) in sc.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b, &y) in tc.iter().enumerate() {
                if y != 0 && !self.gen_pair[a][b].is_zero() {
                    acc += RatFun::from_int(x * y) * self.gen_pair[a][b].clone();
                }
            }
        }
        acc
    }

    /// Pairing of a color-space vector with a sector.
    pub fn alpha_pair(&self, alpha: &[RatFun], s: &Sector) -> RatFun {
        dot(alpha, &self.zero_modes(s))
    }

    pub fn sector_degree(&self, s: &Sector) -> Result<Rational64, FockError> {
        let mut d = self.sector_pair(s, s) * RatFun::from_ratio(1, 2);
        for (a, n) in s.coords().enumerate() {
            if n != 0 {
                d += RatFun::from_int(n) * self.gen_f[a].clone();
            }
        }
        let bad = || FockError::NonRationalDegree(s.to_string());
        let r = d.as_rational().ok_or_else(bad)?;
        let n: i64 = r.numer().try_into().map_err(|_| bad())?;
        let m: i64 = r.denom().try_into().map_err(|_| bad())?;
        Ok(Rational64::new(n, m))
    }

    /// Sign eps(l, m) = prod_{i>j} (-1)^{l_i m_j chi(i,j)} on lattice parts.
    pub fn cocycle(&self, l: &Sector, m: &Sector) -> i64 {
        let mut e = 0i64;
        for i in 0..self.nlattice {
            if l.lattice[i] == 0 {
                continue;
            }
            for j in 0..i {
                e += l.lattice[i] * m.lattice[j] * self.chi[i][j];
            }
        }
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Commutator coefficient [b_n^c, b_{-n}^d] / n.
    pub fn gram_entry(&self, c: usize, d: usize) -> &RatFun {
        &self.gram[c][d]
    }
}

pub(crate) fn dot(a: &[RatFun], b: &[RatFun]) -> RatFun {
    let mut acc = RatFun::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub(crate) fn mat_vec(m: &[Vec<RatFun>], v: &[RatFun]) -> Vec<RatFun> {
    // (G v)_c = sum_d v_d G(d, c); G is symmetric.
    (0..m.len())
        .map(|c| {
            let mut acc = RatFun::zero();
            for (d, x) in v.iter().enumerate() {
                if !x.is_zero() && !m[d][c].is_zero() {
                    acc += x * &m[d][c];
                }
            }
            acc
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct FockState {
    terms: BTreeMap<(Sector, Modes), RatFun>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(Rational64),
    Mixed,
}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn basis(sector: Sector, mut modes: Modes) -> Self {
        sort_modes(&mut modes);
        let mut terms = BTreeMap::new();
        terms.insert((sector, modes), RatFun::one());
        FockState { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Sector, Modes), &RatFun)> {
        self.terms.iter()
    }

    pub fn coeff(&self, sector: &Sector, modes: &Modes) -> RatFun {
        self.terms.get(&(sector.clone(), modes.clone())).cloned().unwrap_or_else(RatFun::zero)
    }

    pub fn add_term(&mut self, sector: Sector, modes: Modes, c: RatFun) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((sector, modes)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &FockState, c: &RatFun) {
        if c.is_zero() {
            return;
        }
        for ((s, m), x) in &other.terms {
            self.add_term(s.clone(), m.clone(), if c.is_one() { x.clone() } else { x * c });
        }
    }

    pub fn add(&self, other: &FockState) -> FockState {
        let mut r = self.clone();
        r.add_assign_scaled(other, &RatFun::one());
        r
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        let mut r = self.clone();
        r.add_assign_scaled(other, &RatFun::from_int(-1));
        r
    }

    pub fn scale(&self, c: &RatFun) -> FockState {
        let mut r = FockState::zero();
        r.add_assign_scaled(self, c);
        r
    }

    pub fn max_mode_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| mode_degree(m)).max().unwrap_or(0)
    }

    pub fn sectors(&self) -> Vec<Sector> {
        let mut v: Vec<Sector> = self.terms.keys().map(|(s, _)| s.clone()).collect();
        v.dedup();
        v
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockState{{")?;
        for ((s, m), c) in &self.terms {
            write!(f, " [{}] {:?} |{}>;", c, m, s)?;
        }
        write!(f, " }}")
    }
}

/// Action of b_n^c.
pub fn apply_b(fs: &FockSpace, n: i64, c: usize, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    if n < 0 {
        for ((sec, m), x) in &s.terms {
            let mut m2 = m.clone();
            m2.push(((-n) as u32, c as u32));
            sort_modes(&mut m2);
            out.add_term(sec.clone(), m2, x.clone());
        }
    } else if n == 0 {
        let mut cache: BTreeMap<&Sector, RatFun> = BTreeMap::new();
        for ((sec, m), x) in &s.terms {
            let ev = cache.entry(sec).or_insert_with(|| fs.zero_modes(sec)[c].clone());
            if !ev.is_zero() {
                out.add_term(sec.clone(), m.clone(), x * &*ev);
            }
        }
    } else {
        let nn = n as u32;
        for ((sec, m), x) in &s.terms {
            let mut k = 0;
            while k < m.len() {
                let (mn, mc) = m[k];
                let mut j = k;
                while j < m.len() && m[j] == m[k] {
                    j += 1;
                }
                if mn == nn {
                    let g = fs.gram_entry(c, mc as usize);
                    if !g.is_zero() {
                        let mult = (j - k) as i64;
                        let mut m2 = m.clone();
                        m2.remove(k);
                        out.add_term(sec.clone(), m2, x * &(g * &RatFun::from_int(mult * n)));
                    }
                }
                k = j;
            }
        }
    }
    out
}

/// Translate every sector by `delta`; creation modes are untouched.
pub fn shift(delta: &Sector, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    for ((sec, m), x) in &s.terms {
        out.add_term(sec.add(delta), m.clone(), x.clone());
    }
    out
}

pub fn degree(fs: &FockSpace, s: &FockState) -> Result<Degree, FockError> {
    let mut d: Option<Rational64> = None;
    for (sec, m) in s.terms.keys() {
        let x = fs.sector_degree(sec)? + Rational64::from_integer(mode_degree(m) as i64);
        match d {
            None => d = Some(x),
            Some(y) if y != x => return Ok(Degree::Mixed),
            _ => {}
        }
    }
    Ok(d.map_or(Degree::Zero, Degree::Homogeneous))
}

pub fn render_basis(fs: &FockSpace, sector: &Sector, modes: &Modes) -> String {
    let mut parts: Vec<String> = modes.iter().map(|(n, c)| format!("b(-{},{})", n, fs.names[*c as usize])).collect();
    parts.push(format!("|{}⟩", sector));
    parts.join(" ")
}

pub fn render(fs: &FockSpace, s: &FockState) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = s
        .terms
        .iter()
        .map(|((sec, m), c)| {
            let b = render_basis(fs, sec, m);
            if c.is_one() {
                b
            } else {
                format!("({}) {}", c.pretty(), b)
            }
        })
        .collect();
    parts.join(" + ")
}

/// All creation-mode multisets of total degree n over the given colors.
pub fn mode_basis(colors: &[usize], n: u32) -> Vec<Modes> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(colors: &[usize], rem: u32, max: (u32, usize), cur: &mut Modes, out: &mut Vec<Modes>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rem.min(max.0)).rev() {
            for (ci, &c) in colors.iter().enumerate() {
                if part == max.0 && ci < max.1 {
                    continue;
                }
                cur.push((part, c as u32));
                rec(colors, rem - part, (part, ci), cur, out);
                cur.pop();
            }
        }
    }
    rec(colors, n, (n, 0), &mut cur, &mut out);
    out
}

/// Number of colored partitions of n with `k` colors.
pub fn colored_partitions(k: usize, n: usize) -> Vec<u64> {
    let mut a = vec![0u64; n + 1];
    a[0] = 1;
    for _ in 0..k {
        for part in 1..=n {
            for x in part..=n {
                a[x] += a[x - part];
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::{lattice_data, DivisorSpec};
    use crate::gkm::{build_geometry, GeometrySpec};
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn space(geo: GeometrySpec, series: &str) -> FockSpace {
        let g = build_geometry(&geo).unwrap();
        let l = lattice_data(&g, &DivisorSpec::parse_inline(&g, series).unwrap()).unwrap();
        FockSpace::from_lattice(&l)
    }

    #[test]
    fn commutator_on_vacuum() {
        let fs = space(GeometrySpec::C3, "d1");
        let v = fs.vacuum();
        let s = apply_b(&fs, 1, 0, &apply_b(&fs, -1, 0, &v));
        assert_eq!(s, v.scale(&rf("-1/(e1*e2)")));
        assert!(apply_b(&fs, 2, 0, &apply_b(&fs, -1, 0, &v)).is_zero());
    }

    #[test]
    fn zero_mode_on_lattice_sector() {
        let fs = space(GeometrySpec::Ymn { m: 2, n: 0 }, "d2");
        let s = FockState::basis(Sector::new(vec![1], vec![]), vec![]);
        assert_eq!(apply_b(&fs, 0, 0, &s), s.scale(&rf("-1/e3")));
        assert_eq!(apply_b(&fs, 0, 1, &s), s.scale(&rf("1/e3")));
    }

    #[test]
    fn shift_and_degree() {
        let fs = space(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        let v = fs.vacuum();
        let one = Sector::new(vec![1], vec![]);
        let s = shift(&one, &apply_b(&fs, -1, 0, &v));
        assert_eq!(render(&fs, &s), "b(-1,y1) |l=(1)⟩");
        assert_eq!(shift(&one.neg(), &s), apply_b(&fs, -1, 0, &v));
        assert_eq!(degree(&fs, &FockState::basis(one, vec![])).unwrap(), Degree::Homogeneous(Rational64::from_integer(1)));
        let t = FockState::basis(fs.zero_sector(), vec![(2, 0), (1, 1)]);
        assert_eq!(degree(&fs, &t).unwrap(), Degree::Homogeneous(Rational64::from_integer(3)));
        assert_eq!(degree(&fs, &v.add(&t)).unwrap(), Degree::Mixed);
        assert_eq!(degree(&fs, &FockState::zero()).unwrap(), Degree::Zero);
    }

    #[test]
    fn heisenberg_relations_on_basis() {
        let fs = space(GeometrySpec::C3, "d1,d1");
        let colors = [0usize, 1];
        for d in 0..=4u32 {
            for m in mode_basis(&colors, d) {
                let s = FockState::basis(fs.zero_sector(), m);
                for a in 0..2 {
                    for b in 0..2 {
                        for p in -3i64..=3 {
                            for q in -3i64..=3 {
                                let lhs = apply_b(&fs, p, a, &apply_b(&fs, q, b, &s))
                                    .sub(&apply_b(&fs, q, b, &apply_b(&fs, p, a, &s)));
                                let want = if p + q == 0 {
                                    s.scale(&(RatFun::from_int(p) * fs.gram[a][b].clone()))
                                } else {
                                    FockState::zero()
                                };
                                assert_eq!(lhs, want);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_counts() {
        assert_eq!(colored_partitions(1, 6), vec![1, 1, 2, 3, 5, 7, 11]);
        assert_eq!(colored_partitions(2, 4), vec![1, 2, 5, 10, 20]);
        for n in 0..6u32 {
            assert_eq!(mode_basis(&[0, 1, 2], n).len() as u64, colored_partitions(3, 6)[n as usize]);
        }
    }

    #[test]
    fn cocycle_is_bimultiplicative() {
        let fs = space(GeometrySpec::Ymn { m: 3, n: 0 }, "d5");
        let s = |a, b| Sector::new(vec![a, b], vec![]);
        assert_eq!(fs.cocycle(&s(0, 1), &s(1, 0)), -1);
        assert_eq!(fs.cocycle(&s(1, 0), &s(0, 1)), 1);
        assert_eq!(fs.cocycle(&s(0, 2), &s(1, 0)), 1);
    }
}
