//! Command-line front end. Every command renders into a string so runs can
//! be compared byte for byte; `run` returns the exit status with it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::chargen::{gottsche_series, half_exponent, render_tpoly, vw_c2, vw_conifold};
use crate::divisor::{algebra_report, lattice_data, parse_divisor, DivisorSpec, LatticeData};
use crate::fock::{render, FockSpace};
use crate::gkm::{build_geometry, GeometrySpec, GkmGraph};
use crate::localization::{conifold_levels, heisenberg_certify, operator_matrix, Nakajima};
use crate::screening::{factorization_check, kernel_basis, KernelMethod, KernelOptions};
use crate::verify::Suite;

pub const THREADS_ENV: &str = "SCREENVOA_THREADS";
const ORIENTATION: &str = "weight of character (x,y) = y*e1 + x*e2, e3 = -e1-e2";
const COCYCLE: &str = "eps(l,m) = (-1)^(sum_{i>j} l_i m_j chi_ij)";

#[derive(Parser, Debug, Clone)]
#[command(name = "screenvoa", version, about = "Screening-operator vertex algebras of divisors in toric CY3s")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; command-line flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in geometry (C3, Y(m,n)) or path to a raw GKM file.
    #[arg(long, global = true)]
    pub geometry: Option<String>,
    /// Divisor series ("d1,d1,d2") or path to a divisor TOML file.
    #[arg(long, global = true)]
    pub divisor: Option<String>,
    #[arg(long, global = true)]
    pub cutoff: Option<i64>,
    #[arg(long = "sector-bound", global = true)]
    pub sector_bound: Option<i64>,
    /// Comma-separated charge labels (Q1[s2]) or steps (Q1).
    #[arg(long, global = true)]
    pub charges: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Verification suite(s), comma-separated, or "all".
    #[arg(long, global = true)]
    pub suite: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// GKM data of the geometry.
    Geometry,
    /// Free-field data of a divisor: levels, lattice, screenings.
    Algebra,
    /// Graded kernel of the screening charges.
    Kernel {
        /// Print basis vectors.
        #[arg(long)]
        basis: bool,
        /// Dimensions through the reduced space spanned by the charges.
        #[arg(long)]
        reduced: bool,
        /// Also compare with the kernel through a split of the series.
        #[arg(long)]
        split: Option<usize>,
    },
    /// Run verification suites.
    Verify,
    /// Generating functions.
    Character {
        /// vw_c2, vw_conifold or gottsche.
        #[arg(long, default_value = "vw_c2")]
        series: String,
        /// Betti numbers b0..b4 for gottsche.
        #[arg(long, default_value = "1,0,0,0,0")]
        betti: String,
    },
    /// Nakajima operators on fixed points of Hilb(C^2).
    Localize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Kv,
    Csv,
}

impl Format {
    fn name(&self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Kv => "kv",
            Format::Csv => "csv",
        }
    }
}

#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub geometry: Option<String>,
    pub divisor: Option<String>,
    pub cutoff: Option<i64>,
    pub sector_bound: Option<i64>,
    pub charges: Option<String>,
    pub format: Option<Format>,
    pub suite: Option<String>,
}

/// Resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: String,
    pub divisor: Option<String>,
    pub cutoff: i64,
    pub sector_bound: Option<i64>,
    pub charges: Option<String>,
    pub format: Format,
    pub suite: String,
}

impl RunConfig {
    /// Canonical key=value text that the config hash is taken over.
    pub fn canonical(&self, command: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", command);
        let _ = writeln!(s, "geometry={}", self.geometry);
        let _ = writeln!(s, "divisor={}", self.divisor.as_deref().unwrap_or(""));
        let _ = writeln!(s, "cutoff={}", self.cutoff);
        let _ = writeln!(s, "sector_bound={}", self.sector_bound.map(|b| b.to_string()).unwrap_or_default());
        let _ = writeln!(s, "charges={}", self.charges.as_deref().unwrap_or(""));
        let _ = writeln!(s, "format={}", self.format.name());
        let _ = writeln!(s, "suite={}", self.suite);
        s
    }

    pub fn hash(&self, command: &str) -> String {
        let d = Sha256::digest(self.canonical(command).as_bytes());
        d.iter().map(|b| format!("{:02x}", b)).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(String),
}

fn read_if_path(s: &str) -> Result<String, CliError> {
    let p = Path::new(s);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {}", s, e)))
    } else {
        Ok(s.to_string())
    }
}

pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {}", p.display(), e)))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| CliError::Config(format!("{}: {}", p.display(), e)))?
        }
        None => FileConfig::default(),
    };
    let cutoff = cli.cutoff.or(file.cutoff).unwrap_or(4);
    if cutoff < 0 {
        return Err(CliError::Config("cutoff must be >= 0".into()));
    }
    Ok(RunConfig {
        geometry: cli.geometry.clone().or(file.geometry).unwrap_or_else(|| "C3".into()),
        divisor: cli.divisor.clone().or(file.divisor),
        cutoff,
        sector_bound: cli.sector_bound.or(file.sector_bound),
        charges: cli.charges.clone().or(file.charges),
        format: cli.format.or(file.format).unwrap_or(Format::Text),
        suite: cli.suite.clone().or(file.suite).unwrap_or_else(|| "all".into()),
    })
}

fn load_geometry(cfg: &RunConfig) -> Result<GkmGraph, CliError> {
    let spec = match GeometrySpec::parse_builtin(&cfg.geometry) {
        Some(s) => s,
        None => GeometrySpec::Raw(read_if_path(&cfg.geometry)?),
    };
    build_geometry(&spec).map_err(|e| CliError::Config(format!("geometry: {}", e)))
}

fn load_divisor(cfg: &RunConfig, g: &GkmGraph) -> Result<(DivisorSpec, LatticeData), CliError> {
    let text = cfg.divisor.as_deref().ok_or_else(|| CliError::Config("--divisor is required".into()))?;
    let spec = parse_divisor(g, &read_if_path(text)?).map_err(|e| CliError::Config(format!("divisor: {}", e)))?;
    let l = lattice_data(g, &spec).map_err(|e| CliError::Compute(e.to_string()))?;
    Ok((spec, l))
}

/// Charge indices selected by labels ("Q1[s2]") or whole steps ("Q1").
pub fn select_charges(l: &LatticeData, sel: Option<&str>) -> Result<Vec<usize>, CliError> {
    let Some(sel) = sel else {
        return Ok((0..l.screenings.len()).collect());
    };
    let mut out = Vec::new();
    for item in sel.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let hits: Vec<usize> = l
            .screenings
            .iter()
            .enumerate()
            .filter(|(_, q)| q.label == item || format!("Q{}", q.step) == item)
            .map(|(i, _)| i)
            .collect();
        if hits.is_empty() {
            return Err(CliError::Config(format!("unknown charge {}", item)));
        }
        out.extend(hits);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

struct Out {
    format: Format,
    text: String,
}

impl Out {
    fn kv(&mut self, k: &str, v: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{}={}", k, v);
    }

    fn line(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{}", s);
    }
}

fn header(out: &mut Out, command: &str, cfg: &RunConfig, bound: Option<i64>) {
    if out.format == Format::Text {
        out.line(format!("screenvoa {} {}  config {}", env!("CARGO_PKG_VERSION"), command, &cfg.hash(command)[..16]));
        out.line(format!("conventions: {}; cocycle {}", ORIENTATION, COCYCLE));
        if let Some(b) = bound {
            out.line(format!("sector bound: {}", b));
        }
        return;
    }
    if out.format == Format::Csv {
        return;
    }
    out.kv("tool", "screenvoa");
    out.kv("version", env!("CARGO_PKG_VERSION"));
    out.kv("command", command);
    out.kv("config_hash", cfg.hash(command));
    out.kv("convention.orientation", ORIENTATION);
    out.kv("convention.cocycle", COCYCLE);
    out.kv("convention.sector_bound", bound.map(|b| b.to_string()).unwrap_or_else(|| "n/a".into()));
}

fn rat(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Set the worker count from the environment; later calls are no-ops.
pub fn init_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}

/// Execute a parsed command line; returns (exit status, report).
pub fn run(cli: &Cli) -> (i32, String) {
    match run_inner(cli) {
        Ok(r) => r,
        Err(e) => (2, format!("error: {}\n", e)),
    }
}

fn run_inner(cli: &Cli) -> Result<(i32, String), CliError> {
    let cfg = resolve(cli)?;
    let mut out = Out { format: cfg.format, text: String::new() };
    let ok = match &cli.command {
        Command::Geometry => cmd_geometry(&cfg, &mut out)?,
        Command::Algebra => cmd_algebra(&cfg, &mut out)?,
        Command::Kernel { basis, reduced, split } => cmd_kernel(&cfg, &mut out, *basis, *reduced, *split)?,
        Command::Verify => cmd_verify(&cfg, &mut out)?,
        Command::Character { series, betti } => cmd_character(&cfg, &mut out, series, betti)?,
        Command::Localize => cmd_localize(&cfg, &mut out)?,
    };
    if out.format == Format::Kv {
        out.kv("status", if ok { "pass" } else { "fail" });
    }
    Ok((if ok { 0 } else { 1 }, out.text))
}

fn cmd_geometry(cfg: &RunConfig, out: &mut Out) -> Result<bool, CliError> {
    let g = load_geometry(cfg)?;
    header(out, "geometry", cfg, None);
    match out.format {
        Format::Kv | Format::Csv => {
            out.kv("geometry", &g.label);
            for p in &g.fixed_points {
                let t: Vec<String> = p.tangent.iter().map(|w| w.to_string()).collect();
                out.kv(&format!("fixed_point.{}.tangent", p.name), t.join(";"));
            }
            for d in &g.divisors {
                let t: Vec<String> = d
                    .points
                    .iter()
                    .map(|(y, w)| format!("{}:{},{}", g.fixed_points[*y].name, w[0], w[1]))
                    .collect();
                out.kv(&format!("divisor.{}", d.name), t.join(";"));
            }
            for c in &g.compact_curves {
                out.kv(
                    &format!("compact_curve.{}", c.name),
                    format!("{}-{}", g.fixed_points[c.ends[0]].name, g.fixed_points[c.ends[1]].name),
                );
            }
            for c in &g.noncompact_curves {
                let at = c.end.map(|y| g.fixed_points[y].name.clone()).unwrap_or_else(|| "-".into());
                out.kv(&format!("noncompact_curve.{}", c.name), at);
            }
        }
        Format::Text => out.text.push_str(&g.report()),
    }
    Ok(true)
}

fn cmd_algebra(cfg: &RunConfig, out: &mut Out) -> Result<bool, CliError> {
    let g = load_geometry(cfg)?;
    let (spec, l) = load_divisor(cfg, &g)?;
    header(out, "algebra", cfg, None);
    match out.format {
        Format::Text => out.text.push_str(&algebra_report(&g, &spec, &l)),
        _ => {
            out.kv("divisor", spec.describe(&g));
            for (k, lev) in l.levels.iter().enumerate() {
                out.kv(&format!("level.{}", l.names[k]), lev.pretty());
            }
            for (i, c) in l.curve_cochars.iter().enumerate() {
                out.kv(&format!("lattice.V{}", i + 1), l.render_covector(c));
            }
            for (i, row) in l.chi.iter().enumerate() {
                let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                out.kv(&format!("chi.{}", i + 1), r.join(","));
            }
            for q in &l.screenings {
                out.kv(&format!("screening.{}", q.label), l.render_covector(&q.cochar));
            }
            for w in &l.warnings {
                out.kv("warning", w);
            }
        }
    }
    Ok(true)
}

fn cmd_kernel(cfg: &RunConfig, out: &mut Out, basis: bool, reduced: bool, split: Option<usize>) -> Result<bool, CliError> {
    let g = load_geometry(cfg)?;
    let (spec, l) = load_divisor(cfg, &g)?;
    let charges = select_charges(&l, cfg.charges.as_deref())?;
    let mut opts = KernelOptions::default_for(cfg.cutoff);
    if let Some(b) = cfg.sector_bound {
        opts.sector_bound = b;
    }
    if reduced {
        opts.method = KernelMethod::Reduced;
    }
    header(out, "kernel", cfg, Some(opts.sector_bound));
    let fs = FockSpace::from_lattice(&l);
    let k = kernel_basis(&fs, &charges, cfg.cutoff, &opts).map_err(|e| CliError::Compute(e.to_string()))?;
    let labels: Vec<String> = charges.iter().map(|&i| l.screenings[i].label.clone()).collect();
    let dims: Vec<String> = k.dims_upto(cfg.cutoff).iter().map(|d| d.to_string()).collect();
    match out.format {
        Format::Text => {
            out.line(format!("divisor {}  charges {}", spec.describe(&g), labels.join(" ")));
            out.line(format!("dims (degrees 0..{}): {}", cfg.cutoff, dims.join(", ")));
            for (d, n) in &k.dims {
                out.line(format!("  degree {:>4}  dim {}", rat(d), n));
            }
        }
        Format::Kv => {
            out.kv("divisor", spec.describe(&g));
            out.kv("charges", labels.join(","));
            out.kv("method", if reduced { "reduced" } else { "direct" });
            for (d, n) in &k.dims {
                out.kv(&format!("dim.{}", rat(d)), n);
            }
        }
        Format::Csv => {
            out.line("degree,dim");
            for (d, n) in &k.dims {
                out.line(format!("{},{}", rat(d), n));
            }
        }
    }
    if basis && !reduced {
        for b in &k.blocks {
            for (i, v) in b.basis.iter().enumerate() {
                match out.format {
                    Format::Text => out.line(format!("  [{} {}] {}", rat(&b.degree), b.sector, render(&fs, v))),
                    _ => out.kv(&format!("basis.{}.{}.{}", rat(&b.degree), b.sector, i), render(&fs, v)),
                }
            }
        }
    }
    let mut ok = true;
    if let Some(s) = split {
        let bound = cfg.sector_bound.unwrap_or(1);
        let r = factorization_check(&g, &spec, s, cfg.cutoff, bound).map_err(|e| CliError::Compute(e.to_string()))?;
        ok = r.ok();
        let j = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match out.format {
            Format::Text => {
                out.line(format!("factorization at {} (sector bound {}): direct {} split {} -> {}", s, bound, j(&r.direct), j(&r.factored), if ok { "equal" } else { "MISMATCH" }));
                if !ok {
                    out.line(r.diff());
                }
            }
            _ => {
                out.kv("factorization.split", s);
                out.kv("factorization.direct", j(&r.direct));
                out.kv("factorization.factored", j(&r.factored));
                out.kv("factorization.equal", ok);
            }
        }
    }
    Ok(ok)
}

fn cmd_verify(cfg: &RunConfig, out: &mut Out) -> Result<bool, CliError> {
    let suites: Vec<Suite> = if cfg.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        cfg.suite
            .split(',')
            .map(|s| Suite::parse(s.trim()).ok_or_else(|| CliError::Config(format!("unknown suite {}", s))))
            .collect::<Result<_, _>>()?
    };
    header(out, "verify", cfg, None);
    let mut all = true;
    for s in suites {
        let r = s.run().map_err(|e| CliError::Compute(e.to_string()))?;
        all &= r.passed();
        match out.format {
            Format::Text => out.text.push_str(&r.to_string()),
            Format::Csv => {
                for c in &r.checks {
                    out.line(format!("{},{},{}", r.suite, c.name.replace(',', ";"), if c.pass { "pass" } else { "fail" }));
                }
            }
            Format::Kv => {
                out.kv(&format!("suite.{}", r.suite), if r.passed() { "pass" } else { "fail" });
                for (i, c) in r.checks.iter().enumerate() {
                    out.kv(&format!("suite.{}.check.{}", r.suite, i), format!("{} | {} | {}", if c.pass { "pass" } else { "fail" }, c.name, c.witness));
                }
            }
        }
    }
    Ok(all)
}

fn cmd_character(cfg: &RunConfig, out: &mut Out, series: &str, betti: &str) -> Result<bool, CliError> {
    let n = cfg.cutoff as usize;
    header(out, "character", cfg, None);
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut ok = true;
    match series {
        "vw_c2" => {
            let v = vw_c2(n);
            ok = v.agree();
            for (i, c) in v.product.iter().enumerate() {
                rows.push((i.to_string(), c.to_string()));
            }
        }
        "vw_conifold" => {
            let v = vw_conifold(n);
            ok = v.agree();
            for (i, c) in v.specialized.iter().enumerate() {
                rows.push((half_exponent(i), c.to_string()));
            }
            for ((ell, m), c) in &v.bivariate {
                rows.push((format!("x^{} q^{}", ell, m), c.to_string()));
            }
        }
        "gottsche" => {
            let b: Vec<usize> = betti
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Config(format!("betti: {}", e)))?;
            let b: [usize; 5] = b.try_into().map_err(|_| CliError::Config("betti needs five numbers".into()))?;
            let s = gottsche_series(b, n);
            for (i, c) in s.coeffs.iter().enumerate() {
                rows.push((i.to_string(), render_tpoly(c)));
            }
        }
        other => return Err(CliError::Config(format!("unknown series {}", other))),
    }
    match out.format {
        Format::Text => {
            out.line(format!("series {}  cutoff {}  backends {}", series, n, if ok { "agree" } else { "DISAGREE" }));
            let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(1).max(8);
            for (e, c) in &rows {
                out.line(format!("  {:>w$}  {}", e, c, w = w));
            }
        }
        Format::Csv => {
            out.line("exponent,coefficient");
            for (e, c) in &rows {
                out.line(format!("{},{}", e, c));
            }
        }
        Format::Kv => {
            out.kv("series", series);
            out.kv("backends_agree", ok);
            for (e, c) in &rows {
                out.kv(&format!("coeff.{}", e.replace(' ', "")), c);
            }
        }
    }
    Ok(ok)
}

fn cmd_localize(cfg: &RunConfig, out: &mut Out) -> Result<bool, CliError> {
    let n = cfg.cutoff.max(0) as usize;
    header(out, "localize", cfg, None);
    let nak = Nakajima::new();
    let kv = out.format != Format::Text;
    for a in 0..n {
        for (mode, from) in [(-1i64, a), (1, a + 1)] {
            for (p, q, c) in operator_matrix(&nak, mode, from) {
                if kv {
                    out.kv(&format!("b{}.{}.{}", mode, q, p), c.pretty());
                } else {
                    out.line(format!("<{}| b_{} |{}> = {}", q, mode, p, c.pretty()));
                }
            }
        }
    }
    let rep = heisenberg_certify(&nak, n);
    let residue = if rep.passed() { "0".to_string() } else { rep.failures.join("; ") };
    if kv {
        out.kv("heisenberg.max_size", n);
        out.kv("heisenberg.relations", rep.checked);
        out.kv("heisenberg.residue", &residue);
        out.kv("heisenberg.level", Nakajima::level().pretty());
        out.kv("b2.realization", &rep.realization);
        for (name, v) in conifold_levels() {
            out.kv(&format!("conifold.levels.{}", name.replace(' ', "_")), v);
        }
    } else {
        out.line(format!("commutator residue [b_m,b_n] - m delta k on sizes <= {} ({} relations): {}", n, rep.checked, residue));
        out.line(format!("level k = {}", Nakajima::level().pretty()));
        out.line(format!("b_(+-2): {}", rep.realization));
        for (name, v) in conifold_levels() {
            out.line(format!("conifold levels ({}): {}", name, v));
        }
    }
    Ok(rep.passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("screenvoa").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn kernel_dims_two_sheets() {
        let (code, out) = run_args(&["kernel", "--divisor", "d1,d1", "--cutoff", "3", "--format", "kv"]);
        assert_eq!(code, 0);
        assert!(out.contains("dim.0=1\ndim.1=1\ndim.2=3\ndim.3=5\n"), "{}", out);
    }

    #[test]
    fn character_table() {
        let (code, out) = run_args(&["character", "--cutoff", "10", "--format", "csv"]);
        assert_eq!(code, 0);
        let coeffs: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(coeffs, ["1", "1", "2", "3", "5", "7", "11", "15", "22", "30", "42"]);
    }

    #[test]
    fn charge_selection_and_errors() {
        let (code, out) = run_args(&["kernel", "--divisor", "d1,d1", "--charges", "Q9"]);
        assert_eq!(code, 2);
        assert!(out.contains("unknown charge"));
        let (code, _) = run_args(&["algebra", "--geometry", "Y(2,0)", "--divisor", "d1,d1,d2", "--format", "kv"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn config_hash_is_stable() {
        let (_, a) = run_args(&["geometry", "--geometry", "Y(2,0)", "--format", "kv"]);
        let (_, b) = run_args(&["geometry", "--geometry", "Y(2,0)", "--format", "kv"]);
        assert_eq!(a, b);
        assert!(a.contains("config_hash="));
    }

    #[test]
    fn config_file_errors_have_position() {
        let dir = std::env::temp_dir().join("screenvoa_cli_test.toml");
        std::fs::write(&dir, "cutoff = \n").unwrap();
        let (code, out) = run_args(&["geometry", "--config", dir.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(out.contains("line 1"), "{}", out);
    }
}
