//! Lattice data of the free field algebra attached to a divisor with a
//! composition series: sheet points, levels, curve and screening cocharacters.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::Deserialize;

use crate::gkm::{surface_euler, GkmGraph};
use crate::ratfield::RatFun;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivisorError {
    #[error("unknown divisor '{0}'")]
    UnknownDivisor(String),
    #[error("invalid divisor spec: {0}")]
    Invalid(String),
    #[error("integrality violation: chi({i},{j}) = {value} is not an integer")]
    Integrality { i: usize, j: usize, value: String },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSpec {
    /// (divisor id, multiplicity), ascending by id.
    pub components: Vec<(usize, u32)>,
    /// Composition series d_1, ..., d_N.
    pub series: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    series: Vec<String>,
    #[serde(default)]
    components: Option<Vec<RawComponent>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    divisor: String,
    multiplicity: u32,
}

impl DivisorSpec {
    pub fn new(g: &GkmGraph, series: Vec<usize>) -> Result<Self, DivisorError> {
        if series.is_empty() {
            return Err(DivisorError::Invalid("empty composition series".into()));
        }
        let mut counts: std::collections::BTreeMap<usize, u32> = Default::default();
        for &d in &series {
            if d >= g.divisors.len() {
                return Err(DivisorError::UnknownDivisor(format!("#{}", d)));
            }
            *counts.entry(d).or_default() += 1;
        }
        Ok(DivisorSpec { components: counts.into_iter().collect(), series })
    }

    /// Comma separated series of divisor names, e.g. `d1,d1,d2`.
    pub fn parse_inline(g: &GkmGraph, text: &str) -> Result<Self, DivisorError> {
        let series = text
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| g.divisor_id(s).map_err(|_| DivisorError::UnknownDivisor(s.into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(g, series)
    }

    pub fn parse_toml(g: &GkmGraph, text: &str) -> Result<Self, DivisorError> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| DivisorError::Parse(e.to_string()))?;
        let series = raw
            .series
            .iter()
            .map(|s| g.divisor_id(s).map_err(|_| DivisorError::UnknownDivisor(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = Self::new(g, series)?;
        if let Some(comps) = raw.components {
            let mut given = Vec::new();
            for c in comps {
                let d = g.divisor_id(&c.divisor).map_err(|_| DivisorError::UnknownDivisor(c.divisor.clone()))?;
                if c.multiplicity == 0 {
                    return Err(DivisorError::Invalid(format!("multiplicity of {} must be >= 1", c.divisor)));
                }
                given.push((d, c.multiplicity));
            }
            given.sort();
            if given != spec.components {
                return Err(DivisorError::Invalid(
                    "each divisor must appear in the series exactly as often as its multiplicity".into(),
                ));
            }
        }
        Ok(spec)
    }

    pub fn describe(&self, g: &GkmGraph) -> String {
        let names: Vec<&str> = self.series.iter().map(|&d| g.divisors[d].name.as_str()).collect();
        names.join(",")
    }
}

/// Accepts either TOML text or an inline series.
pub fn parse_divisor(g: &GkmGraph, text: &str) -> Result<DivisorSpec, DivisorError> {
    if text.contains('=') {
        DivisorSpec::parse_toml(g, text)
    } else {
        DivisorSpec::parse_inline(g, text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetPoint {
    pub divisor: usize,
    /// 1-based sheet number within its divisor.
    pub sheet: u32,
    /// 0-based position in the composition series.
    pub pos: usize,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetCurve {
    pub divisor: usize,
    pub sheet: u32,
    pub pos: usize,
    pub curve: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Screening {
    /// 1-based step k between series positions k and k+1.
    pub step: usize,
    /// Noncompact curve id (None for screenings supplied by hand).
    pub curve: Option<usize>,
    pub cochar: Vec<RatFun>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeData {
    pub names: Vec<String>,
    pub points: Vec<SheetPoint>,
    pub curves: Vec<SheetCurve>,
    pub levels: Vec<RatFun>,
    pub curve_cochars: Vec<Vec<RatFun>>,
    pub screenings: Vec<Screening>,
    pub chi: Vec<Vec<i64>>,
    pub warnings: Vec<String>,
}

impl LatticeData {
    /// Free bosons with given levels and screening covectors, no lattice part.
    pub fn free_bosons(levels: Vec<RatFun>, screenings: Vec<Vec<RatFun>>) -> Self {
        let n = levels.len();
        let screenings = screenings
            .into_iter()
            .enumerate()
            .map(|(k, cochar)| {
                assert_eq!(cochar.len(), n);
                Screening { step: k + 1, curve: None, cochar, label: format!("Q{}", k + 1) }
            })
            .collect();
        LatticeData {
            names: (1..=n).map(|i| format!("y{}", i)).collect(),
            points: Vec::new(),
            curves: Vec::new(),
            levels,
            curve_cochars: Vec::new(),
            screenings,
            chi: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn npoints(&self) -> usize {
        self.levels.len()
    }

    pub fn ncurves(&self) -> usize {
        self.curve_cochars.len()
    }

    pub fn pair(&self, a: &[RatFun], b: &[RatFun]) -> RatFun {
        let mut acc = RatFun::zero();
        for y in 0..self.levels.len() {
            if a[y].is_zero() || b[y].is_zero() {
                continue;
            }
            acc += &(&self.levels[y] * &a[y]) * &b[y];
        }
        acc
    }

    /// Covector sum_i l_i lambda_i + sum_s t_s lambda_s.
    pub fn covector(&self, lattice: &[i64], tags: &[i64]) -> Vec<RatFun> {
        let mut v = vec![RatFun::zero(); self.npoints()];
        for (i, &l) in lattice.iter().enumerate() {
            if l != 0 {
                let c = RatFun::from_int(l);
                for y in 0..v.len() {
                    if !self.curve_cochars[i][y].is_zero() {
                        v[y] += &c * &self.curve_cochars[i][y];
                    }
                }
            }
        }
        for (s, &t) in tags.iter().enumerate() {
            if t != 0 {
                let c = RatFun::from_int(t);
                for y in 0..v.len() {
                    if !self.screenings[s].cochar[y].is_zero() {
                        v[y] += &c * &self.screenings[s].cochar[y];
                    }
                }
            }
        }
        v
    }

    /// Degree offset d(v) = (v,v)/2 + f(v), None when it is not a rational constant.
    pub fn sector_degree(&self, lattice: &[i64], tags: &[i64]) -> Option<Rational64> {
        let v = self.covector(lattice, tags);
        let mut d = self.pair(&v, &v) * RatFun::from_ratio(1, 2);
        for (i, &l) in lattice.iter().enumerate() {
            if l != 0 {
                d += RatFun::from_int(l) * RatFun::from_ratio(2 - self.chi[i][i], 2);
            }
        }
        for (s, &t) in tags.iter().enumerate() {
            if t != 0 {
                let c = &self.screenings[s].cochar;
                let f = RatFun::one() - self.pair(c, c) * RatFun::from_ratio(1, 2);
                d += RatFun::from_int(t) * f;
            }
        }
        let r = d.as_rational()?;
        let n: i64 = r.numer().try_into().ok()?;
        let m: i64 = r.denom().try_into().ok()?;
        Some(Rational64::new(n, m))
    }

    pub fn render_covector(&self, v: &[RatFun]) -> String {
        let mut parts = Vec::new();
        for (y, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(format!("({})*phi{}", c.pretty(), y + 1));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub fn lattice_data(g: &GkmGraph, spec: &DivisorSpec) -> Result<LatticeData, DivisorError> {
    let n = spec.series.len();
    let mut sheet_of_pos = vec![0u32; n];
    let mut seen: HashMap<usize, u32> = HashMap::new();
    for (p, &d) in spec.series.iter().enumerate() {
        let c = seen.entry(d).or_default();
        *c += 1;
        sheet_of_pos[p] = *c;
    }
    let mut points = Vec::new();
    for y in 0..g.fixed_points.len() {
        for (p, &d) in spec.series.iter().enumerate() {
            if g.divisors[d].tangent_at(y).is_some() {
                points.push(SheetPoint { divisor: d, sheet: sheet_of_pos[p], pos: p, point: y });
            }
        }
    }
    let index: HashMap<(usize, usize), usize> =
        points.iter().enumerate().map(|(k, sp)| ((sp.pos, sp.point), k)).collect();
    let levels: Vec<RatFun> = points
        .iter()
        .map(|sp| -surface_euler(g, sp.divisor, sp.point).expect("point in divisor").inv().expect("nonzero Euler class"))
        .collect();
    let np = points.len();
    let mut curves = Vec::new();
    let mut curve_cochars = Vec::new();
    for (p, &d) in spec.series.iter().enumerate() {
        for i in g.compact_in(d) {
            let c = &g.compact_curves[i];
            let (_, nw) = c.normals.iter().find(|x| x.0 == d).unwrap();
            let mut v = vec![RatFun::zero(); np];
            for e in 0..2 {
                v[index[&(p, c.ends[e])]] = nw[e].to_ratfun();
            }
            curves.push(SheetCurve { divisor: d, sheet: sheet_of_pos[p], pos: p, curve: i });
            curve_cochars.push(v);
        }
    }
    let mut screenings = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let (da, db) = (spec.series[k], spec.series[k + 1]);
        let a = g.noncompact_in(da);
        let shared: Vec<usize> = g.noncompact_in(db).into_iter().filter(|s| a.contains(s)).collect();
        let mut any = false;
        for s in shared {
            let c = &g.noncompact_curves[s];
            let Some(y) = c.end else { continue };
            let na = c.normals.iter().find(|x| x.0 == da).unwrap().1;
            let nb = c.normals.iter().find(|x| x.0 == db).unwrap().1;
            let mut v = vec![RatFun::zero(); np];
            v[index[&(k, y)]] = na.to_ratfun();
            v[index[&(k + 1, y)]] = v[index[&(k + 1, y)]].clone() - nb.to_ratfun();
            screenings.push(Screening { step: k + 1, curve: Some(s), cochar: v, label: format!("Q{}[{}]", k + 1, c.name) });
            any = true;
        }
        if !any {
            warnings.push(format!("empty screening set at step {}", k + 1));
        }
    }
    let names = (1..=np).map(|k| format!("y{}", k)).collect();
    let mut ld = LatticeData { names, points, curves, levels, curve_cochars, screenings, chi: Vec::new(), warnings };
    let nc = ld.curves.len();
    let mut chi = vec![vec![0i64; nc]; nc];
    for i in 0..nc {
        for j in 0..nc {
            chi[i][j] = chi_value(&ld, i, j)?;
        }
    }
    ld.chi = chi;
    Ok(ld)
}

fn chi_value(l: &LatticeData, i: usize, j: usize) -> Result<i64, DivisorError> {
    let v = l.pair(&l.curve_cochars[i], &l.curve_cochars[j]);
    let bad = || DivisorError::Integrality { i, j, value: v.pretty() };
    let n = v.as_integer().ok_or_else(bad)?;
    i64::try_from(&n).map_err(|_| bad())
}

pub fn chi_pairing(l: &LatticeData, i: usize, j: usize) -> Result<i64, DivisorError> {
    chi_value(l, i, j)
}

/// Human table in the style of generator / OPE / screening listings.
pub fn algebra_report(g: &GkmGraph, spec: &DivisorSpec, l: &LatticeData) -> String {
    let mut s = String::new();
    s.push_str(&format!("geometry {}  divisor series {}\n", g.label, spec.describe(g)));
    s.push_str("heisenberg fields\n");
    for (k, sp) in l.points.iter().enumerate() {
        s.push_str(&format!(
            "  J{} = (sheet {} of {}, {})  J{}(z) J{}(w) ~ ({}) (z-w)^-2\n",
            k + 1,
            sp.sheet,
            g.divisors[sp.divisor].name,
            g.fixed_points[sp.point].name,
            k + 1,
            k + 1,
            l.levels[k].pretty()
        ));
    }
    s.push_str("lattice vertex operators\n");
    for (i, c) in l.curves.iter().enumerate() {
        s.push_str(&format!(
            "  V{} = :exp({}):  ({} in sheet {} of {})\n",
            i + 1,
            l.render_covector(&l.curve_cochars[i]),
            g.compact_curves[c.curve].name,
            c.sheet,
            g.divisors[c.divisor].name
        ));
        for (y, x) in l.curve_cochars[i].iter().enumerate() {
            if !x.is_zero() {
                let r = &l.levels[y] * x;
                s.push_str(&format!("    J{}(z) V{}_l(w) ~ ({})*l V{}_l(w)/(z-w)\n", y + 1, i + 1, r.pretty(), i + 1));
            }
        }
    }
    if !l.chi.is_empty() {
        s.push_str("chi pairing\n");
        for row in &l.chi {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("  [{}]\n", r.join(", ")));
        }
    }
    s.push_str("screening currents\n");
    for q in &l.screenings {
        s.push_str(&format!("  {} = :exp({}):\n", q.label, l.render_covector(&q.cochar)));
    }
    for w in &l.warnings {
        s.push_str(&format!("warning: {}\n", w));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkm::{build_geometry, GeometrySpec};
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn setup(geo: GeometrySpec, series: &str) -> (GkmGraph, LatticeData) {
        let g = build_geometry(&geo).unwrap();
        let spec = DivisorSpec::parse_inline(&g, series).unwrap();
        let l = lattice_data(&g, &spec).unwrap();
        (g, l)
    }

    fn cov(l: &LatticeData, xs: &[&str]) -> Vec<RatFun> {
        assert_eq!(xs.len(), l.npoints());
        xs.iter().map(|s| rf(s)).collect()
    }

    #[test]
    fn chi_values_for_single_sheets() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d2");
        assert_eq!(l.chi, vec![vec![0]]);
        assert_eq!(l.levels, vec![rf("-1/(e1*e3)"), rf("1/(e1*e3)")]);
        let (_, l) = setup(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        assert_eq!(l.chi, vec![vec![1]]);
        assert_eq!(l.curve_cochars[0], cov(&l, &["e2", "-e1"]));
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d4");
        assert_eq!(l.chi, vec![vec![2]]);
        assert_eq!(l.curve_cochars[0], cov(&l, &["e2", "e3 - e1"]));
    }

    #[test]
    fn a2_cartan_matrix() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 3, n: 0 }, "d5");
        assert_eq!(l.chi, vec![vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn cross_sheet_chi_vanishes() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d4,d2,d4");
        assert_eq!(l.curves.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                if l.curves[i].pos != l.curves[j].pos {
                    assert_eq!(l.chi[i][j], 0);
                }
            }
        }
    }

    #[test]
    fn c3_two_sheet_screenings() {
        let (_, l) = setup(GeometrySpec::C3, "d1,d1");
        assert_eq!(l.screenings.len(), 2);
        assert_eq!(l.screenings[0].cochar, cov(&l, &["e1", "-e1"]));
        assert_eq!(l.screenings[1].cochar, cov(&l, &["e2", "-e2"]));
        assert_eq!(l.levels, vec![rf("-1/(e1*e2)"); 2]);
    }

    #[test]
    fn affine_sl2_data() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d1,d1,d2");
        let step2: Vec<_> = l.screenings.iter().filter(|q| q.step == 2).collect();
        assert_eq!(step2.len(), 1);
        assert_eq!(step2[0].cochar, cov(&l, &["0", "e2", "-e3", "0"]));
        assert!(l.screenings.iter().any(|q| q.step == 1 && q.cochar == cov(&l, &["e1", "-e1", "0", "0"])));
        assert_eq!(l.levels[3], rf("1/(e1*e3)"));
        assert_eq!(l.curve_cochars, vec![cov(&l, &["0", "0", "e1", "e1"])]);
    }

    #[test]
    fn two_copies_of_p1_face() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d2,d2");
        assert_eq!(l.screenings.len(), 2);
        assert_eq!(l.screenings[0].cochar, cov(&l, &["e3", "-e3", "0", "0"]));
        assert_eq!(l.screenings[1].cochar, cov(&l, &["0", "0", "-e3", "e3"]));
    }

    #[test]
    fn empty_screening_warning() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 2, n: 0 }, "d1,d3");
        assert!(l.screenings.is_empty());
        assert_eq!(l.warnings, vec!["empty screening set at step 1".to_string()]);
    }

    #[test]
    fn degree_offsets() {
        let (_, l) = setup(GeometrySpec::Ymn { m: 1, n: 1 }, "d3");
        assert_eq!(l.sector_degree(&[1], &[]), Some(Rational64::from_integer(1)));
        assert_eq!(l.sector_degree(&[-1], &[]), Some(Rational64::from_integer(0)));
        assert_eq!(l.sector_degree(&[2], &[]), Some(Rational64::from_integer(3)));
        let (_, l) = setup(GeometrySpec::C3, "d1,d1");
        assert_eq!(l.sector_degree(&[], &[1, 0]), Some(Rational64::from_integer(1)));
        assert_eq!(l.sector_degree(&[], &[2, 0]), None);
    }

    #[test]
    fn toml_spec() {
        let g = build_geometry(&GeometrySpec::Ymn { m: 2, n: 0 }).unwrap();
        let t = "series = [\"d1\", \"d1\", \"d2\"]\ncomponents = [{ divisor = \"d1\", multiplicity = 2 }, { divisor = \"d2\", multiplicity = 1 }]\n";
        let s = parse_divisor(&g, t).unwrap();
        assert_eq!(s.components, vec![(0, 2), (1, 1)]);
        let bad = "series = [\"d1\"]\ncomponents = [{ divisor = \"d1\", multiplicity = 2 }]\n";
        assert!(parse_divisor(&g, bad).is_err());
        assert!(parse_divisor(&g, "d9").is_err());
    }
}
