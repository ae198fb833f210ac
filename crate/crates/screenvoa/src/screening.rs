//! Screening charges as graded maps, exact kernels in degree truncation and
//! the factorization check.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use rayon::prelude::*;

use crate::divisor::{lattice_data, DivisorError, DivisorSpec, LatticeData};
use crate::fock::{colored_partitions, mode_basis, mode_degree, FockError, FockSpace, FockState, Modes, Sector};
use crate::gkm::GkmGraph;
use crate::ratfield::{nullspace, rank, RatFun, RatMatrix};
use crate::vertexop::VertexEngine;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScreeningError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error("truncation limit exceeded: block of {size} basis states at degree {degree}, sector {sector} (limit {limit})")]
    TruncationLimit { size: usize, limit: usize, degree: String, sector: String },
    #[error("invalid request: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMethod {
    /// Stacked charge matrices on the full Fock basis.
    Direct,
    /// Kernel on the span of the charge cocharacters, tensored with the
    /// orthogonal Fock space; dimensions only.
    Reduced,
}

#[derive(Clone, Debug)]
pub struct KernelOptions {
    pub sector_bound: i64,
    pub max_block: usize,
    pub method: KernelMethod,
    pub min_degree: Option<Rational64>,
}

impl KernelOptions {
    pub fn with_bound(sector_bound: i64) -> Self {
        KernelOptions { sector_bound, max_block: 6000, method: KernelMethod::Direct, min_degree: None }
    }

    pub fn default_for(cutoff: i64) -> Self {
        Self::with_bound(2 * cutoff + 2)
    }
}

#[derive(Clone, Debug)]
pub struct KernelBlock {
    pub degree: Rational64,
    pub sector: Sector,
    pub size: usize,
    pub dim: usize,
    /// Explicit basis (direct method only).
    pub basis: Vec<FockState>,
}

#[derive(Clone, Debug)]
pub struct GradedKernel {
    pub blocks: Vec<KernelBlock>,
    pub dims: BTreeMap<Rational64, usize>,
    pub sector_bound: i64,
    pub method: KernelMethod,
}

impl GradedKernel {
    pub fn dims_upto(&self, n: i64) -> Vec<usize> {
        (0..=n).map(|d| self.dims.get(&Rational64::from_integer(d)).copied().unwrap_or(0)).collect()
    }

    pub fn basis_at(&self, degree: Rational64) -> Vec<&FockState> {
        self.blocks.iter().filter(|b| b.degree == degree).flat_map(|b| b.basis.iter()).collect()
    }
}

/// Residue of the screening current with tag index `q` applied to `s`.
pub fn screening_action(eng: &VertexEngine, q: usize, s: &FockState) -> Result<FockState, FockError> {
    let fs = eng.fs;
    let lambda = Sector::unit_tag(fs.nlattice, fs.ntags(), q);
    eng.exp_coeff(&lambda, -1, s)
}

/// All lattice sectors with |l_i| <= bound, in lexicographic order.
pub fn sectors_within(fs: &FockSpace, bound: i64) -> Vec<Sector> {
    let n = fs.nlattice;
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            for x in -bound..=bound {
                let mut w: Vec<i64> = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out.into_iter().map(|l| Sector::new(l, vec![0; fs.ntags()])).collect()
}

/// (degree, sector, mode degree) for every source block with degree <= cutoff.
fn source_blocks(
    fs: &FockSpace,
    cutoff: Rational64,
    opts: &KernelOptions,
) -> Result<Vec<(Rational64, Sector, u32)>, ScreeningError> {
    let mut out = Vec::new();
    for sec in sectors_within(fs, opts.sector_bound) {
        let d = fs.sector_degree(&sec)?;
        let mut m = 0i64;
        loop {
            let deg = d + Rational64::from_integer(m);
            if deg > cutoff {
                break;
            }
            if opts.min_degree.map_or(true, |lo| deg >= lo) {
                out.push((deg, sec.clone(), m as u32));
            }
            m += 1;
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

/// Matrix of the charges on a list of source vectors; rows are target basis keys.
fn charge_matrix(eng: &VertexEngine, charges: &[usize], cols: &[FockState]) -> Result<RatMatrix, FockError> {
    let images: Vec<Result<Vec<FockState>, FockError>> = cols
        .par_iter()
        .map(|v| charges.iter().map(|&q| screening_action(eng, q, v)).collect())
        .collect();
    let mut rows_index: BTreeMap<(usize, Sector, Modes), usize> = BTreeMap::new();
    let mut images_ok = Vec::with_capacity(cols.len());
    for im in images {
        let im = im?;
        for (qi, st) in im.iter().enumerate() {
            for ((sec, m), _) in st.terms() {
                let n = rows_index.len();
                rows_index.entry((qi, sec.clone(), m.clone())).or_insert(n);
            }
        }
        images_ok.push(im);
    }
    let mut rows = vec![vec![RatFun::zero(); cols.len()]; rows_index.len()];
    for (j, im) in images_ok.iter().enumerate() {
        for (qi, st) in im.iter().enumerate() {
            for ((sec, m), x) in st.terms() {
                let r = rows_index[&(qi, sec.clone(), m.clone())];
                rows[r][j] = x.clone();
            }
        }
    }
    Ok(RatMatrix::new(cols.len(), rows))
}

fn combine(basis: &[FockState], v: &[RatFun]) -> FockState {
    let mut out = FockState::zero();
    for (b, c) in basis.iter().zip(v) {
        out.add_assign_scaled(b, c);
    }
    out
}

/// Kernel of the given charges on the span of `cols`: explicit vectors.
pub fn kernel_of_span(eng: &VertexEngine, charges: &[usize], cols: &[FockState]) -> Result<Vec<FockState>, FockError> {
    if charges.is_empty() || cols.is_empty() {
        return Ok(cols.to_vec());
    }
    let m = charge_matrix(eng, charges, cols)?;
    if m.rows.is_empty() {
        return Ok(cols.to_vec());
    }
    Ok(nullspace(&m).iter().map(|v| combine(cols, v)).collect())
}

pub fn kernel_basis(
    fs: &FockSpace,
    charges: &[usize],
    cutoff: i64,
    opts: &KernelOptions,
) -> Result<GradedKernel, ScreeningError> {
    match opts.method {
        KernelMethod::Direct => kernel_direct(fs, charges, cutoff, opts),
        KernelMethod::Reduced => kernel_reduced(fs, charges, cutoff, opts),
    }
}

fn kernel_direct(fs: &FockSpace, charges: &[usize], cutoff: i64, opts: &KernelOptions) -> Result<GradedKernel, ScreeningError> {
    let eng = VertexEngine::new(fs);
    let colors: Vec<usize> = (0..fs.ncolors()).collect();
    let mut blocks = Vec::new();
    let mut dims: BTreeMap<Rational64, usize> = BTreeMap::new();
    for (deg, sec, m) in source_blocks(fs, Rational64::from_integer(cutoff), opts)? {
        let modes = mode_basis(&colors, m);
        if modes.len() > opts.max_block {
            return Err(ScreeningError::TruncationLimit {
                size: modes.len(),
                limit: opts.max_block,
                degree: deg.to_string(),
                sector: sec.to_string(),
            });
        }
        let cols: Vec<FockState> = modes.into_iter().map(|md| FockState::basis(sec.clone(), md)).collect();
        let size = cols.len();
        let basis = kernel_of_span(&eng, charges, &cols)?;
        *dims.entry(deg).or_default() += basis.len();
        blocks.push(KernelBlock { degree: deg, sector: sec, size, dim: basis.len(), basis });
    }
    Ok(GradedKernel { blocks, dims, sector_bound: opts.sector_bound, method: KernelMethod::Direct })
}

/// Solve G x = b for a small invertible matrix over F.
fn solve_small(g: &[Vec<RatFun>], b: &[RatFun]) -> Option<Vec<RatFun>> {
    let n = g.len();
    let mut a: Vec<Vec<RatFun>> = g.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].inv().ok()?;
        for k in c..=n {
            a[c][k] = &a[c][k] * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in c..=n {
                    let t = &f * &a[c][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// Heisenberg space on the span U of the chosen charge cocharacters, with
/// the same sector generators projected to U. Returns None when the pairing
/// restricted to U is degenerate.
pub fn reduced_space(fs: &FockSpace, charges: &[usize]) -> Option<FockSpace> {
    let ng = fs.gen_alpha.len();
    let mut us: Vec<Vec<RatFun>> = Vec::new();
    for &q in charges {
        let v = fs.gen_alpha[fs.nlattice + q].clone();
        let mut trial = us.clone();
        trial.push(v.clone());
        let m = RatMatrix::from_rows(trial);
        if rank(&m) > us.len() {
            us.push(v);
        }
    }
    if us.is_empty() {
        return None;
    }
    let pair = |a: &[RatFun], b: &[RatFun]| -> RatFun {
        let gb = crate::fock::mat_vec(&fs.gram, b);
        crate::fock::dot(a, &gb)
    };
    let gu: Vec<Vec<RatFun>> = us.iter().map(|a| us.iter().map(|b| pair(a, b)).collect()).collect();
    let gen_alpha: Option<Vec<Vec<RatFun>>> = (0..ng)
        .map(|g| {
            let p: Vec<RatFun> = us.iter().map(|u| pair(u, &fs.gen_alpha[g])).collect();
            solve_small(&gu, &p)
        })
        .collect();
    let gen_alpha = gen_alpha?;
    let names = (1..=us.len()).map(|i| format!("u{}", i)).collect();
    Some(FockSpace::new(names, gu, gen_alpha, fs.nlattice, fs.gen_f.clone(), fs.chi.clone()))
}

fn kernel_reduced(fs: &FockSpace, charges: &[usize], cutoff: i64, opts: &KernelOptions) -> Result<GradedKernel, ScreeningError> {
    let Some(red) = reduced_space(fs, charges) else {
        let mut o = opts.clone();
        o.method = KernelMethod::Direct;
        return kernel_direct(fs, charges, cutoff, &o);
    };
    let eng = VertexEngine::new(&red);
    let ucolors: Vec<usize> = (0..red.ncolors()).collect();
    let nw = fs.ncolors() - red.ncolors();
    let blocks_src = source_blocks(fs, Rational64::from_integer(cutoff), opts)?;
    let maxm = blocks_src.iter().map(|b| b.2).max().unwrap_or(0) as usize;
    let pw = colored_partitions(nw, maxm);
    // K_U(sector, m) computed once per pair.
    let mut needed: BTreeSet<(Sector, u32)> = BTreeSet::new();
    for (_, sec, m) in &blocks_src {
        for mm in 0..=*m {
            needed.insert((sec.clone(), mm));
        }
    }
    let needed: Vec<(Sector, u32)> = needed.into_iter().collect();
    for (sec, m) in &needed {
        let n = mode_basis(&ucolors, *m).len();
        if n > opts.max_block {
            return Err(ScreeningError::TruncationLimit {
                size: n,
                limit: opts.max_block,
                degree: format!("mode degree {}", m),
                sector: sec.to_string(),
            });
        }
    }
    let ku: Vec<Result<usize, FockError>> = needed
        .par_iter()
        .map(|(sec, m)| {
            let cols: Vec<FockState> =
                mode_basis(&ucolors, *m).into_iter().map(|md| FockState::basis(sec.clone(), md)).collect();
            if cols.is_empty() {
                return Ok(0);
            }
            let mat = charge_matrix(&eng, charges, &cols)?;
            Ok(cols.len() - if mat.rows.is_empty() { 0 } else { rank(&mat) })
        })
        .collect();
    let mut kmap: BTreeMap<(Sector, u32), usize> = BTreeMap::new();
    for (k, r) in needed.into_iter().zip(ku) {
        kmap.insert(k, r?);
    }
    let colors: Vec<usize> = (0..fs.ncolors()).collect();
    let mut blocks = Vec::new();
    let mut dims: BTreeMap<Rational64, usize> = BTreeMap::new();
    for (deg, sec, m) in blocks_src {
        let dim: usize = (0..=m as usize).map(|a| pw[a] as usize * kmap[&(sec.clone(), m - a as u32)]).sum();
        let size = colored_partitions(colors.len(), m as usize)[m as usize] as usize;
        *dims.entry(deg).or_default() += dim;
        blocks.push(KernelBlock { degree: deg, sector: sec, size, dim, basis: Vec::new() });
    }
    Ok(GradedKernel { blocks, dims, sector_bound: opts.sector_bound, method: KernelMethod::Reduced })
}

// ---------------------------------------------------------------------------
// Factorization.

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub split: usize,
    pub direct: Vec<usize>,
    pub factored: Vec<usize>,
    pub sector_bound: i64,
}

impl FactorizationReport {
    pub fn ok(&self) -> bool {
        self.direct == self.factored
    }

    pub fn diff(&self) -> String {
        let mut s = Vec::new();
        for (d, (a, b)) in self.direct.iter().zip(&self.factored).enumerate() {
            if a != b {
                s.push(format!("degree {}: direct {} vs factored {}", d, a, b));
            }
        }
        s.join("; ")
    }
}

/// Map of a sub-divisor's colors and curves into the full lattice data.
struct Embedding {
    colors: Vec<usize>,
    curves: Vec<usize>,
}

fn embed(full: &LatticeData, sub: &LatticeData, offset: usize) -> Embedding {
    let colors = sub
        .points
        .iter()
        .map(|p| full.points.iter().position(|q| q.pos == p.pos + offset && q.point == p.point).expect("sheet point"))
        .collect();
    let curves = sub
        .curves
        .iter()
        .map(|c| full.curves.iter().position(|q| q.pos == c.pos + offset && q.curve == c.curve).expect("sheet curve"))
        .collect();
    Embedding { colors, curves }
}

fn tensor(fs: &FockSpace, a: &FockState, ea: &Embedding, b: &FockState, eb: &Embedding) -> FockState {
    let mut out = FockState::zero();
    for ((sa, ma), xa) in a.terms() {
        for ((sb, mb), xb) in b.terms() {
            let mut sec = fs.zero_sector();
            for (i, &l) in sa.lattice.iter().enumerate() {
                sec.lattice[ea.curves[i]] += l;
            }
            for (i, &l) in sb.lattice.iter().enumerate() {
                sec.lattice[eb.curves[i]] += l;
            }
            let mut modes: Modes = ma.iter().map(|&(n, c)| (n, ea.colors[c as usize] as u32)).collect();
            modes.extend(mb.iter().map(|&(n, c)| (n, eb.colors[c as usize] as u32)));
            crate::fock::sort_modes(&mut modes);
            out.add_term(sec, modes, xa * xb);
        }
    }
    out
}

/// Compare dim ker(all charges) with the kernel of the split-step charges on
/// ker(left charges) (x) ker(right charges), both per degree up to `cutoff`.
pub fn factorization_check(
    g: &GkmGraph,
    spec: &DivisorSpec,
    split: usize,
    cutoff: i64,
    sector_bound: i64,
) -> Result<FactorizationReport, ScreeningError> {
    let n = spec.series.len();
    if split < 1 || split >= n {
        return Err(ScreeningError::Invalid(format!("split must lie in 1..{}", n.saturating_sub(1))));
    }
    let full = lattice_data(g, spec)?;
    let fs = FockSpace::from_lattice(&full);
    let all: Vec<usize> = (0..full.screenings.len()).collect();
    let opts = KernelOptions::with_bound(sector_bound);
    let direct = kernel_basis(&fs, &all, cutoff, &opts)?.dims_upto(cutoff);

    let left_spec = DivisorSpec::new(g, spec.series[..split].to_vec())?;
    let right_spec = DivisorSpec::new(g, spec.series[split..].to_vec())?;
    let left = lattice_data(g, &left_spec)?;
    let right = lattice_data(g, &right_spec)?;
    let lfs = FockSpace::from_lattice(&left);
    let rfs = FockSpace::from_lattice(&right);
    let el = embed(&full, &left, 0);
    let er = embed(&full, &right, split);
    let lmin = min_sector_degree(&lfs, sector_bound)?;
    let rmin = min_sector_degree(&rfs, sector_bound)?;
    let lk = kernel_basis(&lfs, &(0..left.screenings.len()).collect::<Vec<_>>(), cutoff - rmin, &opts_from(sector_bound, lmin))?;
    let rk = kernel_basis(&rfs, &(0..right.screenings.len()).collect::<Vec<_>>(), cutoff - lmin, &opts_from(sector_bound, rmin))?;
    let split_charges: Vec<usize> =
        full.screenings.iter().enumerate().filter(|(_, q)| q.step == split).map(|(i, _)| i).collect();
    let eng = VertexEngine::new(&fs);
    let mut factored = vec![0usize; cutoff as usize + 1];
    for d in 0..=cutoff {
        let deg = Rational64::from_integer(d);
        // Tensor products grouped by full sector, so blocks stay independent.
        let mut by_sector: BTreeMap<Sector, Vec<FockState>> = BTreeMap::new();
        for bl in &lk.blocks {
            for br in &rk.blocks {
                if bl.degree + br.degree != deg {
                    continue;
                }
                for a in &bl.basis {
                    for b in &br.basis {
                        let t = tensor(&fs, a, &el, b, &er);
                        let sec = t.sectors()[0].clone();
                        by_sector.entry(sec).or_default().push(t);
                    }
                }
            }
        }
        for (_, cols) in by_sector {
            factored[d as usize] += kernel_of_span(&eng, &split_charges, &cols)?.len();
        }
    }
    Ok(FactorizationReport { split, direct, factored, sector_bound })
}

fn opts_from(bound: i64, min: i64) -> KernelOptions {
    let mut o = KernelOptions::with_bound(bound);
    o.min_degree = Some(Rational64::from_integer(min));
    o
}

fn min_sector_degree(fs: &FockSpace, bound: i64) -> Result<i64, ScreeningError> {
    let mut m = i64::MAX;
    for s in sectors_within(fs, bound) {
        m = m.min(fs.sector_degree(&s)?.floor().to_integer());
    }
    Ok(m)
}

/// Check that a charge maps degree-d states to degree-d states.
pub fn degree_preserved(eng: &VertexEngine, q: usize, s: &FockState) -> Result<bool, FockError> {
    use crate::fock::{degree, Degree};
    let img = screening_action(eng, q, s)?;
    if img.is_zero() {
        return Ok(true);
    }
    let a = degree(eng.fs, s)?;
    let b = degree(eng.fs, &img)?;
    Ok(matches!((a, b), (Degree::Homogeneous(x), Degree::Homogeneous(y)) if x == y))
}

pub fn total_mode_degree(s: &FockState) -> Option<u32> {
    let mut it = s.terms().map(|((_, m), _)| mode_degree(m));
    let first = it.next()?;
    it.all(|x| x == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::apply_b;
    use crate::gkm::{build_geometry, GeometrySpec};
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn setup(geo: GeometrySpec, series: &str) -> (GkmGraph, DivisorSpec, LatticeData) {
        let g = build_geometry(&geo).unwrap();
        let spec = DivisorSpec::parse_inline(&g, series).unwrap();
        let l = lattice_data(&g, &spec).unwrap();
        (g, spec, l)
    }

    /// Coefficients of prod_{n>=1}(1-q^n)^{-1} prod_{n>=2}(1-q^n)^{-1}.
    fn pi_vir(n: usize) -> Vec<usize> {
        let mut a = vec![0usize; n + 1];
        a[0] = 1;
        for start in [1usize, 2] {
            for part in start..=n {
                for x in part..=n {
                    a[x] += a[x - part];
                }
            }
        }
        a
    }

    #[test]
    fn vacuum_is_screened() {
        let l = LatticeData::free_bosons(vec![rf("-1/(e1*e2)")], vec![vec![rf("b")]]);
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        assert!(screening_action(&eng, 0, &fs.vacuum()).unwrap().is_zero());
    }

    #[test]
    fn first_order_screening_coefficient() {
        // Only b_1 from E_+ reaches z^{-1}: Q b_{-1}|0> = -k*beta |beta>.
        let l = LatticeData::free_bosons(vec![rf("-1/(e1*e2)")], vec![vec![rf("b")]]);
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let s = apply_b(&fs, -1, 0, &fs.vacuum());
        let img = screening_action(&eng, 0, &s).unwrap();
        let want = FockState::basis(Sector::new(vec![], vec![1]), vec![]).scale(&rf("b/(e1*e2)"));
        assert_eq!(img, want);
    }

    #[test]
    fn rank_one_virasoro_vector() {
        // Single charge e^{b phi}, level k: the degree-2 kernel is spanned by
        // (1/(2k)) b_{-1}^2 + (b/2 - 1/(k b)) b_{-2}, solved by hand.
        let k = rf("-1/(e1*e2)");
        let beta = rf("b");
        let l = LatticeData::free_bosons(vec![k.clone()], vec![vec![beta.clone()]]);
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let gk = kernel_basis(&fs, &[0], 2, &KernelOptions::with_bound(0)).unwrap();
        assert_eq!(gk.dims_upto(2), vec![1, 0, 1]);
        let t = FockState::basis(fs.zero_sector(), vec![(1, 0), (1, 0)])
            .scale(&(RatFun::one() / (RatFun::from_int(2) * k.clone())))
            .add(&FockState::basis(fs.zero_sector(), vec![(2, 0)]).scale(
                &(&beta * &RatFun::from_ratio(1, 2) - RatFun::one() / (&k * &beta)),
            ));
        assert!(screening_action(&eng, 0, &t).unwrap().is_zero());
        let v = gk.basis_at(Rational64::from_integer(2))[0].clone();
        let ratio = &v.coeff(&fs.zero_sector(), &vec![(2, 0)]) / &t.coeff(&fs.zero_sector(), &vec![(2, 0)]);
        assert_eq!(v, t.scale(&ratio));
    }

    #[test]
    fn no_charges_gives_full_fock_space() {
        let (_, _, l) = setup(GeometrySpec::C3, "d1,d1");
        let fs = FockSpace::from_lattice(&l);
        let gk = kernel_basis(&fs, &[], 4, &KernelOptions::with_bound(0)).unwrap();
        assert_eq!(gk.dims_upto(4), vec![1, 2, 5, 10, 20]);
    }

    #[test]
    fn c3_two_sheets_direct_and_reduced() {
        let (_, _, l) = setup(GeometrySpec::C3, "d1,d1");
        let fs = FockSpace::from_lattice(&l);
        let want: Vec<usize> = pi_vir(5);
        let d = kernel_basis(&fs, &[0, 1], 5, &KernelOptions::with_bound(0)).unwrap();
        assert_eq!(d.dims_upto(5), want);
        let mut o = KernelOptions::with_bound(0);
        o.method = KernelMethod::Reduced;
        let r = kernel_basis(&fs, &[0, 1], 5, &o).unwrap();
        assert_eq!(r.dims_upto(5), want);
        let single = kernel_basis(&fs, &[1], 5, &KernelOptions::with_bound(0)).unwrap();
        assert_eq!(single.dims_upto(5), want);
    }

    #[test]
    fn charges_preserve_degree() {
        let (_, _, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d1,d1,d2");
        let fs = FockSpace::from_lattice(&l);
        let eng = VertexEngine::new(&fs);
        let colors: Vec<usize> = (0..fs.ncolors()).collect();
        for sec in sectors_within(&fs, 1) {
            for m in 0..=3 {
                for md in mode_basis(&colors, m) {
                    let s = FockState::basis(sec.clone(), md);
                    for q in 0..l.screenings.len() {
                        assert!(degree_preserved(&eng, q, &s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn stacking_order_is_irrelevant() {
        let (_, _, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d1,d1,d2");
        let fs = FockSpace::from_lattice(&l);
        let o = KernelOptions::with_bound(1);
        let a = kernel_basis(&fs, &[0, 1, 2], 2, &o).unwrap();
        let b = kernel_basis(&fs, &[2, 1, 0], 2, &o).unwrap();
        assert_eq!(a.dims, b.dims);
    }

    #[test]
    fn reduced_matches_direct_with_lattice() {
        let (_, _, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d1,d1,d2");
        let fs = FockSpace::from_lattice(&l);
        let all: Vec<usize> = (0..l.screenings.len()).collect();
        let o = KernelOptions::with_bound(1);
        let d = kernel_basis(&fs, &all, 2, &o).unwrap();
        let mut o2 = o.clone();
        o2.method = KernelMethod::Reduced;
        let r = kernel_basis(&fs, &all, 2, &o2).unwrap();
        assert_eq!(d.dims, r.dims);
    }

    #[test]
    fn factorization_trivial_and_c3() {
        let (g, spec, _) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d4");
        assert!(factorization_check(&g, &spec, 1, 2, 1).is_err());
        let (g, spec, _) = setup(GeometrySpec::C3, "d1,d1");
        let r = factorization_check(&g, &spec, 1, 4, 0).unwrap();
        assert!(r.ok(), "{}", r.diff());
        assert_eq!(r.direct, pi_vir(4));
    }

    #[test]
    fn truncation_guard() {
        let (_, _, l) = setup(GeometrySpec::C3, "d1,d1");
        let fs = FockSpace::from_lattice(&l);
        let mut o = KernelOptions::with_bound(0);
        o.max_block = 10;
        assert!(matches!(kernel_basis(&fs, &[0], 5, &o), Err(ScreeningError::TruncationLimit { .. })));
    }
}
