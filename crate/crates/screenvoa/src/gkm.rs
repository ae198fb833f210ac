//! GKM data of toric Calabi-Yau threefolds: fixed points, toric divisors,
//! compact and noncompact toric curves with their tangent and normal weights.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;

use crate::ratfield::RatFun;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Weight {
    pub a: i64,
    pub b: i64,
}

impl Weight {
    pub const fn new(a: i64, b: i64) -> Self {
        Weight { a, b }
    }
    pub const E1: Weight = Weight::new(1, 0);
    pub const E2: Weight = Weight::new(0, 1);
    pub const E3: Weight = Weight::new(-1, -1);

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn neg(self) -> Weight {
        Weight::new(-self.a, -self.b)
    }

    pub fn add(self, o: Weight) -> Weight {
        Weight::new(self.a + o.a, self.b + o.b)
    }

    pub fn to_ratfun(self) -> RatFun {
        RatFun::weight(self.a, self.b)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.a, self.b);
        if a == 0 && b == 0 {
            return write!(f, "0");
        }
        if a == b {
            return match -a {
                1 => write!(f, "e3"),
                -1 => write!(f, "-e3"),
                k => write!(f, "{}*e3", k),
            };
        }
        // Prefer forms using e3 when they are shorter, e.g. e3 - e1.
        let candidates = [(a, b, 0i64), (a - b, 0, -b), (0, b - a, -a)];
        let cost = |&(x, y, z): &(i64, i64, i64)| {
            ((x != 0) as i64 + (y != 0) as i64 + (z != 0) as i64, x.abs() + y.abs() + z.abs(), z != 0)
        };
        let best = *candidates.iter().min_by_key(|c| cost(c)).unwrap();
        let mut parts: Vec<(i64, &str)> = Vec::new();
        if best.2 != 0 {
            parts.push((best.2, "e3"));
        }
        if best.0 != 0 {
            parts.push((best.0, "e1"));
        }
        if best.1 != 0 {
            parts.push((best.1, "e2"));
        }
        for (i, (c, v)) in parts.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if i == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            if c.abs() == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}*{}", c.abs(), v)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub name: String,
    pub tangent: [Weight; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorFace {
    pub name: String,
    /// (fixed point, surface tangent pair at it), in fixed-point order.
    pub points: Vec<(usize, [Weight; 2])>,
}

impl DivisorFace {
    pub fn tangent_at(&self, y: usize) -> Option<[Weight; 2]> {
        self.points.iter().find(|p| p.0 == y).map(|p| p.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactCurve {
    pub name: String,
    pub ends: [usize; 2],
    /// (divisor, normal weight at ends[0], normal weight at ends[1]).
    pub normals: Vec<(usize, [Weight; 2])>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoncompactCurve {
    pub name: String,
    pub end: Option<usize>,
    /// (divisor, normal weight at the fixed point).
    pub normals: Vec<(usize, Weight)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmGraph {
    pub label: String,
    pub fixed_points: Vec<FixedPoint>,
    pub divisors: Vec<DivisorFace>,
    pub compact_curves: Vec<CompactCurve>,
    pub noncompact_curves: Vec<NoncompactCurve>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GkmError {
    #[error("invalid GKM data: {0}")]
    Invalid(String),
    #[error("fixed point {y} is not contained in divisor {d}")]
    NotContained { d: String, y: String },
    #[error("curve {i} does not lie in divisor {d} with endpoint {y}")]
    CurveContainment { i: String, d: String, y: String },
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("unsupported built-in geometry: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometrySpec {
    C3,
    Ymn { m: u32, n: u32 },
    Raw(String),
}

impl GeometrySpec {
    /// Accepts `C3`, `Y(m,n)` / `Ymn:m,n`; anything else is not a built-in.
    pub fn parse_builtin(s: &str) -> Option<GeometrySpec> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.eq_ignore_ascii_case("c3") {
            return Some(GeometrySpec::C3);
        }
        let inner = t
            .strip_prefix("Y(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("Ymn:"))?;
        let mut it = inner.split(',');
        let m = it.next()?.parse().ok()?;
        let n = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        Some(GeometrySpec::Ymn { m, n })
    }

    pub fn describe(&self) -> String {
        match self {
            GeometrySpec::C3 => "C3".into(),
            GeometrySpec::Ymn { m, n } => format!("Y({},{})", m, n),
            GeometrySpec::Raw(_) => "raw".into(),
        }
    }
}

pub fn build_geometry(spec: &GeometrySpec) -> Result<GkmGraph, GkmError> {
    let g = match spec {
        GeometrySpec::C3 => {
            let mut g = toric_ymn(1, 0);
            g.label = "C3".into();
            g
        }
        GeometrySpec::Ymn { m, n } => {
            if *m < 1 || m + n > 4 {
                return Err(GkmError::Unsupported(format!(
                    "Y({},{}): built-ins require m >= 1 and m + n <= 4",
                    m, n
                )));
            }
            toric_ymn(*m, *n)
        }
        GeometrySpec::Raw(text) => parse_raw(text)?,
    };
    g.validate()?;
    Ok(g)
}

/// Integer inverse transpose of a unimodular 3x3 matrix: rows m_a with
/// <m_a, v_b> = delta_ab.
fn dual_basis(v: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let det = v[0][0] * (v[1][1] * v[2][2] - v[1][2] * v[2][1]) - v[0][1] * (v[1][0] * v[2][2] - v[1][2] * v[2][0])
        + v[0][2] * (v[1][0] * v[2][1] - v[1][1] * v[2][0]);
    assert!(det == 1 || det == -1, "triangulation is not unimodular");
    let mut m = [[0i64; 3]; 3];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let cr = [
            v[b][1] * v[c][2] - v[b][2] * v[c][1],
            v[b][2] * v[c][0] - v[b][0] * v[c][2],
            v[b][0] * v[c][1] - v[b][1] * v[c][0],
        ];
        for k in 0..3 {
            m[a][k] = cr[k] * det;
        }
    }
    m
}

/// Character (x, y, *) restricted to the Calabi-Yau torus: y*e1 + x*e2.
fn char_weight(m: [i64; 3]) -> Weight {
    Weight::new(m[1], m[0])
}

/// Planar diagram: top row (i,0), i = 0..m; bottom row (j,1), j = 0..n.
fn toric_ymn(m: u32, n: u32) -> GkmGraph {
    let (m, n) = (m as i64, n as i64);
    let mut verts: Vec<(i64, i64)> = (0..=m).map(|i| (i, 0)).collect();
    verts.extend((0..=n).map(|j| (j, 1)));
    let top = |i: i64| i as usize;
    let bot = |j: i64| (m + 1 + j) as usize;
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for i in 0..m {
        tris.push([top(i), top(i + 1), bot(0)]);
    }
    for j in 0..n {
        tris.push([top(m), bot(j), bot(j + 1)]);
    }
    let duals: Vec<[Weight; 3]> = tris
        .iter()
        .map(|t| {
            let v = [0, 1, 2].map(|k| [verts[t[k]].0, verts[t[k]].1, 1]);
            dual_basis(v).map(char_weight)
        })
        .collect();
    let wt = |t: usize, vert: usize| -> Weight {
        let k = tris[t].iter().position(|&x| x == vert).expect("vertex in triangle");
        duals[t][k]
    };
    let fixed_points: Vec<FixedPoint> =
        (0..tris.len()).map(|t| FixedPoint { name: format!("y{}", t + 1), tangent: duals[t] }).collect();
    let divisors: Vec<DivisorFace> = (0..verts.len())
        .map(|v| {
            let points = (0..tris.len())
                .filter(|&t| tris[t].contains(&v))
                .map(|t| {
                    let others: Vec<usize> = tris[t].iter().copied().filter(|&u| u != v).collect();
                    (t, [wt(t, others[0]), wt(t, others[1])])
                })
                .collect();
            DivisorFace { name: format!("d{}", v + 1), points }
        })
        .collect();
    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let mut interior: Vec<((usize, usize), [usize; 2])> = edges
        .iter()
        .filter(|(_, ts)| ts.len() == 2)
        .map(|(e, ts)| (*e, [ts[0], ts[1]]))
        .collect();
    interior.sort_by_key(|(_, ts)| *ts);
    let compact_curves = interior
        .iter()
        .enumerate()
        .map(|(k, ((b, c), ts))| {
            let mut normals = vec![
                (*b, [wt(ts[0], *c), wt(ts[1], *c)]),
                (*c, [wt(ts[0], *b), wt(ts[1], *b)]),
            ];
            normals.sort_by_key(|x| x.0);
            CompactCurve { name: format!("i{}", k + 1), ends: *ts, normals }
        })
        .collect();
    let mut boundary: Vec<(usize, usize)> = vec![(top(0), bot(0))];
    boundary.extend((0..m).map(|i| (top(i), top(i + 1))));
    boundary.push((top(m), bot(n)));
    boundary.extend((0..n).map(|j| (bot(j), bot(j + 1))));
    let noncompact_curves = boundary
        .iter()
        .enumerate()
        .map(|(k, &(b, c))| {
            let t = edges[&(b.min(c), b.max(c))][0];
            let mut normals = vec![(b, wt(t, c)), (c, wt(t, b))];
            normals.sort_by_key(|x| x.0);
            NoncompactCurve { name: format!("s{}", k + 1), end: Some(t), normals }
        })
        .collect();
    GkmGraph {
        label: format!("Y({},{})", m, n),
        fixed_points,
        divisors,
        compact_curves,
        noncompact_curves,
    }
}

fn remove_one(pair: [Weight; 2], w: Weight) -> Option<Weight> {
    if pair[0] == w {
        Some(pair[1])
    } else if pair[1] == w {
        Some(pair[0])
    } else {
        None
    }
}

fn is_submultiset(pair: &[Weight; 2], triple: &[Weight; 3]) -> bool {
    let mut used = [false; 3];
    pair.iter().all(|w| {
        for k in 0..3 {
            if !used[k] && triple[k] == *w {
                used[k] = true;
                return true;
            }
        }
        false
    })
}

impl GkmGraph {
    pub fn validate(&self) -> Result<(), GkmError> {
        let bad = |s: String| Err(GkmError::Invalid(s));
        let mut names = std::collections::HashSet::new();
        for n in self
            .fixed_points
            .iter()
            .map(|x| &x.name)
            .chain(self.divisors.iter().map(|x| &x.name))
            .chain(self.compact_curves.iter().map(|x| &x.name))
            .chain(self.noncompact_curves.iter().map(|x| &x.name))
        {
            if !names.insert(n.clone()) {
                return bad(format!("duplicate name '{}'", n));
            }
        }
        for p in &self.fixed_points {
            let s = p.tangent.iter().fold(Weight::default(), |a, w| a.add(*w));
            if !s.is_zero() {
                return bad(format!("tangent weights at {} do not sum to zero (Calabi-Yau condition)", p.name));
            }
            if p.tangent.iter().any(|w| w.is_zero()) {
                return bad(format!("zero tangent weight at {}", p.name));
            }
        }
        for d in &self.divisors {
            for (y, pair) in &d.points {
                let Some(fp) = self.fixed_points.get(*y) else {
                    return bad(format!("divisor {} references missing fixed point", d.name));
                };
                if !is_submultiset(pair, &fp.tangent) {
                    return bad(format!(
                        "tangent pair of {} at {} is not a sub-multiset of the threefold tangent weights",
                        d.name, fp.name
                    ));
                }
            }
        }
        for c in &self.compact_curves {
            if c.ends[0] == c.ends[1] {
                return bad(format!("compact curve {} needs two distinct endpoints", c.name));
            }
            if c.normals.is_empty() {
                return bad(format!("compact curve {} lies in no divisor", c.name));
            }
            let mut dirs: Option<[Weight; 2]> = None;
            for (d, nw) in &c.normals {
                let face = self.divisors.get(*d).ok_or_else(|| GkmError::Invalid("bad divisor index".into()))?;
                let mut this = [Weight::default(); 2];
                for e in 0..2 {
                    let Some(pair) = face.tangent_at(c.ends[e]) else {
                        return bad(format!("divisor {} does not contain endpoint of {}", face.name, c.name));
                    };
                    let Some(dir) = remove_one(pair, nw[e]) else {
                        return bad(format!("normal weight of {} in {} is not a tangent weight", c.name, face.name));
                    };
                    this[e] = dir;
                }
                if this[0] != this[1].neg() {
                    return bad(format!(
                        "curve-direction weights of {} in {} are not opposite at the two endpoints (GKM edge condition)",
                        c.name, face.name
                    ));
                }
                if let Some(prev) = dirs {
                    if prev != this {
                        return bad(format!("inconsistent direction of {} across divisors", c.name));
                    }
                }
                dirs = Some(this);
            }
        }
        for s in &self.noncompact_curves {
            let Some(y) = s.end else { continue };
            if y >= self.fixed_points.len() {
                return bad(format!("noncompact curve {} references missing fixed point", s.name));
            }
            let mut dir = None;
            for (d, nw) in &s.normals {
                let face = self.divisors.get(*d).ok_or_else(|| GkmError::Invalid("bad divisor index".into()))?;
                let Some(pair) = face.tangent_at(y) else {
                    return bad(format!("divisor {} does not contain the fixed point of {}", face.name, s.name));
                };
                let Some(w) = remove_one(pair, *nw) else {
                    return bad(format!("normal weight of {} in {} is not a tangent weight", s.name, face.name));
                };
                if dir.map_or(false, |x| x != w) {
                    return bad(format!("inconsistent direction of {} across divisors", s.name));
                }
                dir = Some(w);
            }
        }
        Ok(())
    }

    pub fn fixed_point_id(&self, name: &str) -> Result<usize, GkmError> {
        self.fixed_points
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| GkmError::Unknown { kind: "fixed point", name: name.into() })
    }

    pub fn divisor_id(&self, name: &str) -> Result<usize, GkmError> {
        self.divisors
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| GkmError::Unknown { kind: "divisor", name: name.into() })
    }

    pub fn compact_id(&self, name: &str) -> Result<usize, GkmError> {
        self.compact_curves
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| GkmError::Unknown { kind: "compact curve", name: name.into() })
    }

    /// Direction weight of a compact curve at each endpoint.
    pub fn curve_direction(&self, i: usize) -> [Weight; 2] {
        let c = &self.compact_curves[i];
        let (d, nw) = &c.normals[0];
        let face = &self.divisors[*d];
        [0, 1].map(|e| remove_one(face.tangent_at(c.ends[e]).unwrap(), nw[e]).unwrap())
    }

    /// Noncompact curves lying in divisor d.
    pub fn noncompact_in(&self, d: usize) -> Vec<usize> {
        (0..self.noncompact_curves.len())
            .filter(|&s| self.noncompact_curves[s].normals.iter().any(|x| x.0 == d))
            .collect()
    }

    pub fn compact_in(&self, d: usize) -> Vec<usize> {
        (0..self.compact_curves.len())
            .filter(|&i| self.compact_curves[i].normals.iter().any(|x| x.0 == d))
            .collect()
    }

    /// Plain-text tables of fixed points, divisors and curves.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let fp = |y: usize| self.fixed_points[y].name.clone();
        s.push_str(&format!("geometry {}\n", self.label));
        s.push_str("orientation: planar diagram, weight of character (x,y) = y*e1 + x*e2\n");
        s.push_str(&format!("fixed points ({})\n", self.fixed_points.len()));
        for p in &self.fixed_points {
            let t: Vec<String> = p.tangent.iter().map(|w| w.to_string()).collect();
            s.push_str(&format!("  {}  {{{}}}\n", p.name, t.join(", ")));
        }
        s.push_str(&format!("divisors ({})\n", self.divisors.len()));
        for d in &self.divisors {
            let t: Vec<String> =
                d.points.iter().map(|(y, p)| format!("{}: {{{}, {}}}", fp(*y), p[0], p[1])).collect();
            s.push_str(&format!("  {}  {}\n", d.name, t.join("; ")));
        }
        s.push_str(&format!("compact curves ({})\n", self.compact_curves.len()));
        for (i, c) in self.compact_curves.iter().enumerate() {
            let dir = self.curve_direction(i);
            let ns: Vec<String> = c
                .normals
                .iter()
                .map(|(d, w)| format!("N in {}: {}@{}, {}@{}", self.divisors[*d].name, w[0], fp(c.ends[0]), w[1], fp(c.ends[1])))
                .collect();
            s.push_str(&format!(
                "  {}  {} -- {}  direction {}@{}  {}\n",
                c.name,
                fp(c.ends[0]),
                fp(c.ends[1]),
                dir[0],
                fp(c.ends[0]),
                ns.join("; ")
            ));
        }
        s.push_str(&format!("noncompact curves ({})\n", self.noncompact_curves.len()));
        for c in &self.noncompact_curves {
            let at = c.end.map(fp).unwrap_or_else(|| "-".into());
            let ns: Vec<String> =
                c.normals.iter().map(|(d, w)| format!("N in {}: {}", self.divisors[*d].name, w)).collect();
            s.push_str(&format!("  {}  at {}  {}\n", c.name, at, ns.join("; ")));
        }
        s
    }
}

pub fn surface_euler(g: &GkmGraph, d: usize, y: usize) -> Result<RatFun, GkmError> {
    let face = &g.divisors[d];
    let pair = face.tangent_at(y).ok_or_else(|| GkmError::NotContained {
        d: face.name.clone(),
        y: g.fixed_points[y].name.clone(),
    })?;
    Ok(pair[0].to_ratfun() * pair[1].to_ratfun())
}

pub fn normal_weight(g: &GkmGraph, i: usize, y: usize, d: usize) -> Result<RatFun, GkmError> {
    let c = &g.compact_curves[i];
    let err = || GkmError::CurveContainment {
        i: c.name.clone(),
        d: g.divisors[d].name.clone(),
        y: g.fixed_points[y].name.clone(),
    };
    let e = c.ends.iter().position(|&x| x == y).ok_or_else(err)?;
    let (_, w) = c.normals.iter().find(|x| x.0 == d).ok_or_else(err)?;
    Ok(w[e].to_ratfun())
}

// ---------------------------------------------------------------------------
// Raw GKM input (TOML).

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    fixed_point: Vec<RawPoint>,
    #[serde(default)]
    divisor: Vec<RawDivisor>,
    #[serde(default)]
    compact_curve: Vec<RawCompact>,
    #[serde(default)]
    noncompact_curve: Vec<RawNoncompact>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    tangent: Vec<[i64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDivisor {
    name: String,
    points: Vec<RawDivPoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDivPoint {
    point: String,
    tangent: Vec<[i64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompact {
    name: String,
    ends: [String; 2],
    normals: Vec<RawCompactNormal>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompactNormal {
    divisor: String,
    weights: [[i64; 2]; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoncompact {
    name: String,
    #[serde(default)]
    point: Option<String>,
    normals: Vec<RawNoncompactNormal>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoncompactNormal {
    divisor: String,
    weight: [i64; 2],
}

fn w2(x: [i64; 2]) -> Weight {
    Weight::new(x[0], x[1])
}

pub fn parse_raw(text: &str) -> Result<GkmGraph, GkmError> {
    let doc: RawDoc = toml::from_str(text).map_err(|e| GkmError::Parse(e.to_string()))?;
    let mut fp_ids = HashMap::new();
    let mut fixed_points = Vec::new();
    for (k, p) in doc.fixed_point.iter().enumerate() {
        if p.tangent.len() != 3 {
            return Err(GkmError::Invalid(format!("fixed point {} needs exactly three tangent weights", p.name)));
        }
        fp_ids.insert(p.name.clone(), k);
        fixed_points.push(FixedPoint { name: p.name.clone(), tangent: [w2(p.tangent[0]), w2(p.tangent[1]), w2(p.tangent[2])] });
    }
    let fid = |n: &str| fp_ids.get(n).copied().ok_or_else(|| GkmError::Unknown { kind: "fixed point", name: n.into() });
    let mut div_ids = HashMap::new();
    let mut divisors = Vec::new();
    for (k, d) in doc.divisor.iter().enumerate() {
        div_ids.insert(d.name.clone(), k);
        let mut points = Vec::new();
        for p in &d.points {
            if p.tangent.len() != 2 {
                return Err(GkmError::Invalid(format!("divisor {} needs a tangent pair at {}", d.name, p.point)));
            }
            points.push((fid(&p.point)?, [w2(p.tangent[0]), w2(p.tangent[1])]));
        }
        points.sort_by_key(|x| x.0);
        divisors.push(DivisorFace { name: d.name.clone(), points });
    }
    let did = |n: &str| div_ids.get(n).copied().ok_or_else(|| GkmError::Unknown { kind: "divisor", name: n.into() });
    let mut compact_curves = Vec::new();
    for c in &doc.compact_curve {
        let ends = [fid(&c.ends[0])?, fid(&c.ends[1])?];
        let mut normals = Vec::new();
        for n in &c.normals {
            normals.push((did(&n.divisor)?, [w2(n.weights[0]), w2(n.weights[1])]));
        }
        normals.sort_by_key(|x| x.0);
        compact_curves.push(CompactCurve { name: c.name.clone(), ends, normals });
    }
    let mut noncompact_curves = Vec::new();
    for c in &doc.noncompact_curve {
        let end = match &c.point {
            Some(p) => Some(fid(p)?),
            None => None,
        };
        let mut normals = Vec::new();
        for n in &c.normals {
            normals.push((did(&n.divisor)?, w2(n.weight)));
        }
        normals.sort_by_key(|x| x.0);
        noncompact_curves.push(NoncompactCurve { name: c.name.clone(), end, normals });
    }
    Ok(GkmGraph {
        label: doc.label.unwrap_or_else(|| "raw".into()),
        fixed_points,
        divisors,
        compact_curves,
        noncompact_curves,
    })
}

/// Serialize to the raw TOML schema (round-trips through `parse_raw`).
pub fn to_raw(g: &GkmGraph) -> String {
    let w = |x: Weight| format!("[{}, {}]", x.a, x.b);
    let mut s = format!("label = \"{}\"\n", g.label);
    for p in &g.fixed_points {
        s.push_str(&format!(
            "\n[[fixed_point]]\nname = \"{}\"\ntangent = [{}, {}, {}]\n",
            p.name,
            w(p.tangent[0]),
            w(p.tangent[1]),
            w(p.tangent[2])
        ));
    }
    for d in &g.divisors {
        s.push_str(&format!("\n[[divisor]]\nname = \"{}\"\npoints = [\n", d.name));
        for (y, pr) in &d.points {
            s.push_str(&format!(
                "  {{ point = \"{}\", tangent = [{}, {}] }},\n",
                g.fixed_points[*y].name,
                w(pr[0]),
                w(pr[1])
            ));
        }
        s.push_str("]\n");
    }
    for c in &g.compact_curves {
        s.push_str(&format!(
            "\n[[compact_curve]]\nname = \"{}\"\nends = [\"{}\", \"{}\"]\nnormals = [\n",
            c.name, g.fixed_points[c.ends[0]].name, g.fixed_points[c.ends[1]].name
        ));
        for (d, nw) in &c.normals {
            s.push_str(&format!(
                "  {{ divisor = \"{}\", weights = [{}, {}] }},\n",
                g.divisors[*d].name,
                w(nw[0]),
                w(nw[1])
            ));
        }
        s.push_str("]\n");
    }
    for c in &g.noncompact_curves {
        s.push_str(&format!("\n[[noncompact_curve]]\nname = \"{}\"\n", c.name));
        if let Some(y) = c.end {
            s.push_str(&format!("point = \"{}\"\n", g.fixed_points[y].name));
        }
        s.push_str("normals = [\n");
        for (d, nw) in &c.normals {
            s.push_str(&format!("  {{ divisor = \"{}\", weight = {} }},\n", g.divisors[*d].name, w(*nw)));
        }
        s.push_str("]\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfield::parse_ratfun;

    fn rf(s: &str) -> RatFun {
        parse_ratfun(s).unwrap()
    }

    fn y(m: u32, n: u32) -> GkmGraph {
        build_geometry(&GeometrySpec::Ymn { m, n }).unwrap()
    }

    #[test]
    fn counts() {
        let g = y(2, 0);
        assert_eq!(
            (g.fixed_points.len(), g.compact_curves.len(), g.noncompact_curves.len(), g.divisors.len()),
            (2, 1, 4, 4)
        );
        let c3 = build_geometry(&GeometrySpec::C3).unwrap();
        assert_eq!(
            (c3.fixed_points.len(), c3.compact_curves.len(), c3.noncompact_curves.len(), c3.divisors.len()),
            (1, 0, 3, 3)
        );
        let mut t = c3.fixed_points[0].tangent.to_vec();
        t.sort();
        let mut want = vec![Weight::E1, Weight::E2, Weight::E3];
        want.sort();
        assert_eq!(t, want);
        let g = y(1, 1);
        assert_eq!(
            (g.fixed_points.len(), g.compact_curves.len(), g.noncompact_curves.len(), g.divisors.len()),
            (2, 1, 4, 4)
        );
    }

    #[test]
    fn euler_classes_and_normals() {
        let c3 = build_geometry(&GeometrySpec::C3).unwrap();
        assert_eq!(surface_euler(&c3, 0, 0).unwrap(), rf("e1*e2"));
        let g = y(1, 1);
        assert_eq!(surface_euler(&g, 2, 0).unwrap(), rf("e2*e3"));
        assert_eq!(normal_weight(&g, 0, 0, 2).unwrap(), rf("e2"));
        assert_eq!(normal_weight(&g, 0, 1, 2).unwrap(), rf("-e1"));
        let g = y(2, 0);
        assert_eq!(surface_euler(&g, 1, 0).unwrap(), rf("e1*e3"));
        assert_eq!(normal_weight(&g, 0, 0, 1).unwrap(), rf("e1"));
        assert_eq!(normal_weight(&g, 0, 1, 1).unwrap(), rf("e1"));
        assert_eq!(normal_weight(&g, 0, 0, 3).unwrap(), rf("e2"));
        assert_eq!(normal_weight(&g, 0, 1, 3).unwrap(), rf("e3 - e1"));
        assert!(surface_euler(&g, 0, 1).is_err());
    }

    #[test]
    fn builtins_satisfy_invariants() {
        for (m, n) in [(1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (2, 1), (2, 2), (1, 3), (3, 1)] {
            let g = y(m, n);
            g.validate().unwrap();
            for (i, c) in g.compact_curves.iter().enumerate() {
                let dir = g.curve_direction(i);
                for (d, nw) in &c.normals {
                    for e in 0..2 {
                        let mut want = g.divisors[*d].tangent_at(c.ends[e]).unwrap().to_vec();
                        let mut got = vec![dir[e], nw[e]];
                        want.sort();
                        got.sort();
                        assert_eq!(got, want);
                    }
                }
            }
        }
        assert!(build_geometry(&GeometrySpec::Ymn { m: 3, n: 2 }).is_err());
    }

    #[test]
    fn raw_roundtrip_and_validation() {
        let g = y(2, 0);
        let text = to_raw(&g);
        let h = build_geometry(&GeometrySpec::Raw(text.clone())).unwrap();
        assert_eq!(g, h);
        let broken = text.replacen("tangent = [[-1, -1], [0, 1], [1, 0]]", "tangent = [[-1, 0], [0, 1], [1, 0]]", 1);
        assert_ne!(broken, text);
        match build_geometry(&GeometrySpec::Raw(broken)) {
            Err(GkmError::Invalid(msg)) => assert!(msg.contains("Calabi-Yau"), "{}", msg),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn weight_rendering() {
        assert_eq!(Weight::E3.to_string(), "e3");
        assert_eq!(Weight::new(1, 1).to_string(), "-e3");
        assert_eq!(Weight::new(-2, -1).to_string(), "e3 - e1");
        assert_eq!(Weight::new(1, -1).to_string(), "e1 - e2");
    }
}
