//! Reproducible experiment sweeps. Each experiment renders a CSV table, a
//! one-line summary with its key constant, and a pass flag for the
//! thresholds it checks.
//!
//! Random sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded from the
//! configured `seed`, which gives the same stream on every platform. Rows are
//! produced in a fixed loop order, so a given configuration always renders to
//! the same bytes.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annulus::{
    dla_bruteforce_adaptive, dla_estimate, half_plane_distance, half_plane_estimate, AnnulusCase,
    AnnulusPoint, dla_case,
};
use crate::error::Result;
use crate::holonomy::{curve_length, short_marking, systolic_basis, FnPoint};
use crate::hypkernel::{
    fermi_distance, pentagon_adjacent, pentagon_side, HalfPlanePoint, HexagonData, MARGULIS,
};
use crate::metrics::{
    candidate_family, csv_float, dl_adaptive, dl_gamma, dt_annulus_factor, flat_torus_dl,
    flat_torus_dt, marking_distance, theorem1_closed_form, thick_quantity, twist_count,
    twisted_pair, wolpert_check, FlatTorus, SupSearch, ThickQuantity, THM1_DL_OFFSET,
};
use crate::topology::{dehn_twist, CurveClass, Marking, Slope};

/// A rejected configuration line or value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line of the configuration text, when the problem has one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn config_err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    HexagonSelftest,
    AnnulusLemma,
    HalfPlaneCompare,
    TorusEquality,
    Wolpert,
    ThickCompare,
    ProdregError,
    Thm1Divergence,
    MarkingDistance,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::HexagonSelftest,
        Experiment::AnnulusLemma,
        Experiment::HalfPlaneCompare,
        Experiment::TorusEquality,
        Experiment::Wolpert,
        Experiment::ThickCompare,
        Experiment::ProdregError,
        Experiment::Thm1Divergence,
        Experiment::MarkingDistance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::HexagonSelftest => "hexagon-selftest",
            Experiment::AnnulusLemma => "annulus-lemma",
            Experiment::HalfPlaneCompare => "half-plane-compare",
            Experiment::TorusEquality => "torus-equality",
            Experiment::Wolpert => "wolpert",
            Experiment::ThickCompare => "thick-compare",
            Experiment::ProdregError => "prodreg-error",
            Experiment::Thm1Divergence => "thm1-divergence",
            Experiment::MarkingDistance => "marking-distance",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Experiment::HexagonSelftest => {
                "right-angled hexagon and pentagon identities, Fermi distance vs half-plane"
            }
            Experiment::AnnulusLemma => {
                "annulus distance lemma: brute-force sup vs the two-case closed form"
            }
            Experiment::HalfPlaneCompare => {
                "annulus distance grows like log|dt|, half-plane distance like 2 log|dt|"
            }
            Experiment::TorusEquality => {
                "Teichmueller and Lipschitz metrics agree on the flat torus"
            }
            Experiment::Wolpert => "Wolpert's inequality: length ratios bounded by the dilatation",
            Experiment::ThickCompare => {
                "thick part: d_L comparable to the short-marking ratios and log i(mu, mu')"
            }
            Experiment::ProdregError => {
                "product regions for the Lipschitz metric along a thin curve"
            }
            Experiment::Thm1Divergence => {
                "twist sequence with d_L bounded while the Teichmueller estimate grows"
            }
            Experiment::MarkingDistance => {
                "marking distance log i: self value, twist growth and quasi-triangle slack"
            }
        }
    }

    /// Defaults of the keys the experiment reads, as `key=value` pairs.
    pub fn defaults(&self) -> &'static str {
        match self {
            Experiment::HexagonSelftest => "samples=10000 seed=7",
            Experiment::AnnulusLemma => "grid=5 l_min=1e-6 eps0=0.2 eps1=0.05",
            Experiment::HalfPlaneCompare => "eps0=0.2",
            Experiment::TorusEquality => "grid=10 cutoff=200",
            Experiment::Wolpert => "grid=10 cutoff=200",
            Experiment::ThickCompare => "samples=100 cutoff=64 seed=7 eps1=0.05",
            Experiment::ProdregError => {
                "samples=50 cutoff=64 l_min=1e-5 twist_max=1e6 seed=7 eps0=0.2 eps1=0.05"
            }
            Experiment::Thm1Divergence => "n_max=6 cutoff=64 eps1=0.05",
            Experiment::MarkingDistance => "samples=200 seed=7",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, ConfigError> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| config_err(None, format!("unknown experiment `{s}`")))
    }
}

/// One row of [`list_experiments`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: &'static str,
}

pub fn list_experiments() -> Vec<ExperimentInfo> {
    Experiment::ALL
        .iter()
        .map(|e| ExperimentInfo {
            name: e.name(),
            description: e.description(),
            defaults: e.defaults(),
        })
        .collect()
}

/// Parsed run configuration. Optional fields fall back to the defaults of
/// the experiment being run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub eps0: f64,
    pub eps1: f64,
    pub seed: u64,
    pub cutoff: Option<u32>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub n_max: Option<u32>,
    pub l_min: Option<f64>,
    pub twist_max: Option<f64>,
    pub out: Option<PathBuf>,
    eps_line: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            eps0: 0.2,
            eps1: 0.05,
            seed: 7,
            cutoff: None,
            samples: None,
            grid: None,
            n_max: None,
            l_min: None,
            twist_max: None,
            out: None,
            eps_line: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, line: Option<usize>) -> std::result::Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| config_err(line, format!("`{value}` is not a valid value for {key}")))
}

fn positive_int<T>(key: &str, value: &str, line: Option<usize>) -> std::result::Result<T, ConfigError>
where
    T: FromStr + PartialOrd + Default,
{
    let v: T = parse_num(key, value, line)?;
    if v <= T::default() {
        return Err(config_err(line, format!("{key} must be at least 1")));
    }
    Ok(v)
}

fn positive_real(key: &str, value: &str, line: Option<usize>) -> std::result::Result<f64, ConfigError> {
    let v: f64 = parse_num(key, value, line)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(config_err(line, format!("{key} must be positive and finite")));
    }
    Ok(v)
}

impl ExperimentConfig {
    /// Applies one `key=value` line; blank lines and `#` comments are
    /// ignored.
    pub fn apply_line(&mut self, text: &str, line: Option<usize>) -> std::result::Result<(), ConfigError> {
        let text = text.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            return Ok(());
        }
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected key=value, got `{text}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "experiment" => self.experiment = Some(value.parse().map_err(|e: ConfigError| config_err(line, e.message))?),
            "eps0" => {
                self.eps0 = positive_real(key, value, line)?;
                self.eps_line = line;
            }
            "eps1" => {
                self.eps1 = positive_real(key, value, line)?;
                self.eps_line = line;
            }
            "seed" => self.seed = parse_num(key, value, line)?,
            "cutoff" => self.cutoff = Some(positive_int(key, value, line)?),
            "samples" => self.samples = Some(positive_int(key, value, line)?),
            "grid" => {
                let g: usize = positive_int(key, value, line)?;
                if g < 2 {
                    return Err(config_err(line, "grid must be at least 2"));
                }
                self.grid = Some(g);
            }
            "n_max" => self.n_max = Some(positive_int(key, value, line)?),
            "l_min" => self.l_min = Some(positive_real(key, value, line)?),
            "twist_max" => self.twist_max = Some(positive_real(key, value, line)?),
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(config_err(line, format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides given outside a file (command line).
    pub fn with_overrides<S: AsRef<str>>(mut self, sets: &[S]) -> std::result::Result<Self, ConfigError> {
        for s in sets {
            let s = s.as_ref();
            if !s.contains('=') {
                return Err(config_err(None, format!("override `{s}` is not key=value")));
            }
            self.apply_line(s, None)?;
            if s.trim_start().starts_with("eps") {
                self.eps_line = None;
            }
        }
        self.check()?;
        Ok(self)
    }

    /// Cross-key constraints: `eps1 < eps0 < 0.2629`, `eps0 / eps1 > 2`,
    /// `l_min < eps1`.
    pub fn check(&self) -> std::result::Result<(), ConfigError> {
        let line = self.eps_line;
        if !(self.eps0 < MARGULIS) {
            return Err(config_err(line, format!("eps0 = {} must be below {MARGULIS}", self.eps0)));
        }
        if !(self.eps1 < self.eps0) {
            return Err(config_err(line, format!("eps1 = {} must be below eps0 = {}", self.eps1, self.eps0)));
        }
        if !(self.eps0 / self.eps1 > 2.0) {
            return Err(config_err(
                line,
                format!("eps0/eps1 = {} must exceed 2", self.eps0 / self.eps1),
            ));
        }
        if let Some(l) = self.l_min {
            if !(l < self.eps1) {
                return Err(config_err(None, format!("l_min = {l} must be below eps1 = {}", self.eps1)));
            }
        }
        Ok(())
    }
}

/// Parses line-oriented `key=value` text into a configuration with defaults
/// for every key not mentioned.
pub fn validate_config(text: &str) -> std::result::Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    for (i, line) in text.lines().enumerate() {
        cfg.apply_line(line, Some(i + 1))?;
    }
    cfg.check()?;
    Ok(cfg)
}

/// Result of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub csv: String,
    pub summary: String,
    pub passed: bool,
    /// Named constants measured by the run, in report order.
    pub constants: Vec<(String, f64)>,
}

impl RunOutput {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

struct Table {
    csv: String,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut csv = header.join(",");
        csv.push('\n');
        Self { csv }
    }

    fn row(&mut self, cells: &[String]) {
        self.csv.push_str(&cells.join(","));
        self.csv.push('\n');
    }
}

struct Report {
    constants: Vec<(String, f64)>,
    checks: Vec<(String, bool)>,
}

impl Report {
    fn new() -> Self {
        Self {
            constants: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn constant(&mut self, name: &str, v: f64) {
        self.constants.push((name.to_string(), v));
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    fn finish(self, experiment: Experiment, table: Table) -> RunOutput {
        let passed = self.checks.iter().all(|(_, ok)| *ok);
        let mut summary = format!("{experiment}: {}", if passed { "PASS" } else { "FAIL" });
        for (k, v) in &self.constants {
            summary.push_str(&format!(" {k}={}", fmt_short(*v)));
        }
        for (k, ok) in &self.checks {
            if !ok {
                summary.push_str(&format!(" violated:{k}"));
            }
        }
        RunOutput {
            experiment,
            csv: table.csv,
            summary,
            passed,
            constants: self.constants,
        }
    }
}

fn fmt_short(v: f64) -> String {
    format!("{v:.6e}")
}

fn f(v: f64) -> String {
    csv_float(v)
}

/// Runs `experiment` (or the one named in the configuration).
pub fn run(cfg: &ExperimentConfig, experiment: Experiment) -> Result<RunOutput> {
    match experiment {
        Experiment::HexagonSelftest => hexagon_selftest(cfg),
        Experiment::AnnulusLemma => annulus_lemma(cfg),
        Experiment::HalfPlaneCompare => half_plane_compare(cfg),
        Experiment::TorusEquality => torus_equality(cfg),
        Experiment::Wolpert => wolpert(cfg),
        Experiment::ThickCompare => thick_compare(cfg),
        Experiment::ProdregError => prodreg_error(cfg),
        Experiment::Thm1Divergence => thm1_divergence(cfg),
        Experiment::MarkingDistance => marking_distance_experiment(cfg),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo.ln()..=hi.ln()).exp()
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn hexagon_selftest(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let samples = cfg.samples.unwrap_or(10_000);
    let mut r = rng(cfg.seed);
    let mut t = Table::new(&["kind", "index", "x1", "x2", "x3", "value", "residual"]);
    let mut rep = Report::new();
    let (mut hex_max, mut pent_max, mut fermi_max) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..samples {
        // pick the three alternate sides and recover the gap side w
        let a: f64 = r.gen_range(0.05..5.0);
        let ap: f64 = r.gen_range(0.05..5.0);
        let c: f64 = r.gen_range(0.05..5.0);
        let w = ((c.cosh() + a.cosh() * ap.cosh()) / (a.sinh() * ap.sinh())).acosh();
        let h = HexagonData::solve(a, ap, w)?;
        let res = h.residual();
        hex_max = hex_max.max(res);
        t.row(&["hexagon".into(), i.to_string(), f(a), f(ap), f(w), f(h.c), f(res)]);
    }
    for i in 0..samples {
        let a: f64 = r.gen_range(0.05..5.0);
        let c: f64 = r.gen_range(0.0..5.0);
        let u = pentagon_adjacent(c, a)?;
        let c2 = pentagon_side(u, a)?;
        let rhs = u.sinh() * a.sinh();
        let res = (c2.cosh() - rhs).abs() / rhs.max(1.0);
        pent_max = pent_max.max(res);
        t.row(&["pentagon".into(), i.to_string(), f(u), f(a), String::new(), f(c2), f(res)]);
    }
    for i in 0..(samples / 10).max(1) {
        let d1 = r.gen_range(-4.0..4.0);
        let d2 = r.gen_range(-4.0..4.0);
        let du = r.gen_range(0.0..6.0);
        let d = fermi_distance(d1, d2, du);
        let direct = HalfPlanePoint::from_fermi(d1, 0.0).distance(&HalfPlanePoint::from_fermi(d2, du));
        let res = (d - direct).abs();
        fermi_max = fermi_max.max(res);
        t.row(&["fermi".into(), i.to_string(), f(d1), f(d2), f(du), f(d), f(res)]);
    }
    rep.constant("max_hexagon_residual", hex_max);
    rep.constant("max_pentagon_residual", pent_max);
    rep.constant("max_fermi_residual", fermi_max);
    rep.check("residual<=1e-9", hex_max.max(pent_max).max(fermi_max) <= 1e-9);
    Ok(rep.finish(Experiment::HexagonSelftest, t))
}

/// `|Δt|` values of the annulus grid.
pub const ANNULUS_TWISTS: [f64; 5] = [0.0, 10.0, 1e3, 1e6, 1e8];

/// Case-(ii) identity `log(|Δt| l₂ / log(1/l₁)) = log(l₂/l₁) + log(|Δt| l₁ / log(1/l₁))`
/// residual for `l₁ <= l₂`.
pub fn twist_case_identity_residual(l1: f64, l2: f64, dt: f64) -> f64 {
    let li = (1.0 / l1).ln();
    let lhs = (dt * l2 / li).ln();
    let rhs = (l2 / l1).ln() + (dt * l1 / li).ln();
    (lhs - rhs).abs()
}

fn annulus_lemma(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let g = cfg.grid.unwrap_or(5);
    let fine = 2 * g - 1;
    let ls = log_spaced(cfg.l_min.unwrap_or(1e-6), cfg.eps1, fine);
    let mut t = Table::new(&["l1", "t1", "l2", "t2", "brute", "estimate", "gap"]);
    let mut rep = Report::new();
    let (mut coarse, mut refined, mut identity) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (i, &l1) in ls.iter().enumerate() {
        for (j, &l2) in ls.iter().enumerate() {
            for &dt in &ANNULUS_TWISTS {
                let a = AnnulusPoint::new(0.0, l1, cfg.eps0)?;
                let b = AnnulusPoint::new(dt, l2, cfg.eps0)?;
                let brute = dla_bruteforce_adaptive(&a, &b)?.0.value;
                let est = dla_estimate(&a, &b)?.value;
                let gap = (brute - est).abs();
                refined = refined.max(gap);
                if i % 2 == 0 && j % 2 == 0 {
                    coarse = coarse.max(gap);
                }
                if dla_case(&a, &b) == AnnulusCase::Twist {
                    identity = identity.max(twist_case_identity_residual(l1.min(l2), l1.max(l2), dt));
                }
                t.row(&[f(l1), f(0.0), f(l2), f(dt), f(brute), f(est), f(gap)]);
            }
        }
    }
    let change = (refined - coarse).abs() / coarse;
    rep.constant("max_gap_coarse", coarse);
    rep.constant("max_gap_refined", refined);
    rep.constant("refinement_change", change);
    rep.constant("twist_identity_residual", identity);
    rep.check("gap finite", refined.is_finite());
    rep.check("refinement<10%", change < 0.10);
    rep.check("identity<=1e-12", identity <= 1e-12);
    Ok(rep.finish(Experiment::AnnulusLemma, t))
}

/// `(l₁, l₂)` pairs swept in the half-plane comparison.
pub const HALF_PLANE_PAIRS: [(f64, f64); 4] = [(1e-4, 1e-4), (1e-4, 1e-3), (1e-3, 1e-2), (1e-5, 1e-2)];

fn half_plane_compare(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let dts: Vec<f64> = (0..=18).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let mut t = Table::new(&[
        "l1",
        "l2",
        "dt",
        "brute",
        "estimate",
        "half_plane",
        "half_plane_estimate",
    ]);
    let mut rep = Report::new();
    let mut slopes = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut worst_brute: f64 = 0.0;
    let mut hp_gap: f64 = 0.0;
    for &(l1, l2) in &HALF_PLANE_PAIRS {
        let (mut xs, mut ys_b, mut ys_e, mut ys_h) = (vec![], vec![], vec![], vec![]);
        for &dt in &dts {
            let a = AnnulusPoint::new(0.0, l1, cfg.eps0)?;
            let b = AnnulusPoint::new(dt, l2, cfg.eps0)?;
            let brute = dla_bruteforce_adaptive(&a, &b)?.0.value;
            let est = dla_estimate(&a, &b)?.value;
            let hp = half_plane_distance(a.half_plane(), b.half_plane());
            let hpe = half_plane_estimate(a.half_plane(), b.half_plane());
            hp_gap = hp_gap.max((hp - hpe).abs());
            if dt >= 1e6 {
                xs.push(dt.ln());
                ys_b.push(brute);
                ys_e.push(est);
                ys_h.push(hp);
            }
            t.row(&[f(l1), f(l2), f(dt), f(brute), f(est), f(hp), f(hpe)]);
        }
        let (sb, se, sh) = (fitted_slope(&xs, &ys_b), fitted_slope(&xs, &ys_e), fitted_slope(&xs, &ys_h));
        worst_brute = worst_brute.max((sb - 1.0).abs());
        slopes.0 = slopes.0.min(se);
        slopes.1 = slopes.1.max(se);
        slopes.2 = slopes.2.min(sh);
        slopes.3 = slopes.3.max(sh);
    }
    rep.constant("annulus_slope_min", slopes.0);
    rep.constant("annulus_slope_max", slopes.1);
    rep.constant("brute_slope_max_dev", worst_brute);
    rep.constant("half_plane_slope_min", slopes.2);
    rep.constant("half_plane_slope_max", slopes.3);
    rep.constant("half_plane_estimate_gap", hp_gap);
    rep.check("annulus slope ~1", (slopes.0 - 1.0).abs() <= 0.1 && (slopes.1 - 1.0).abs() <= 0.1);
    rep.check("brute slope ~1", worst_brute <= 0.1);
    rep.check("half-plane slope ~2", (slopes.2 - 2.0).abs() <= 0.2 && (slopes.3 - 2.0).abs() <= 0.2);
    Ok(rep.finish(Experiment::HalfPlaneCompare, t))
}

fn torus_grid(cfg: &ExperimentConfig) -> Result<Vec<FlatTorus>> {
    let g = cfg.grid.unwrap_or(10);
    let mut out = Vec::with_capacity(g * g);
    for &im in &lin_spaced(0.5, 2.0, g) {
        for &re in &lin_spaced(-0.5, 0.5, g) {
            out.push(FlatTorus::new(re, im)?);
        }
    }
    Ok(out)
}

fn torus_equality(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let n = cfg.cutoff.unwrap_or(200);
    let reference = FlatTorus::new(0.0, 1.0)?;
    let mut t = Table::new(&["re", "im", "d_t", "d_l", "gap", "witness"]);
    let mut rep = Report::new();
    let mut worst: f64 = 0.0;
    for tor in torus_grid(cfg)? {
        let dt = flat_torus_dt(&reference, &tor, n);
        let dl = flat_torus_dl(&reference, &tor, n);
        let gap = (dt.value - dl.value).abs();
        worst = worst.max(gap);
        t.row(&[f(tor.re()), f(tor.im()), f(dt.value), f(dl.value), f(gap), dt.witness.to_string()]);
    }
    let oracle = flat_torus_dt(&reference, &FlatTorus::new(0.0, 2.0)?, n).value;
    let oracle_err = (oracle - 0.5 * 2f64.ln()).abs();
    rep.constant("max_gap", worst);
    rep.constant("i_vs_2i_error", oracle_err);
    rep.check("gap<=1e-6", worst <= 1e-6);
    rep.check("i vs 2i", oracle_err <= 1e-9);
    Ok(rep.finish(Experiment::TorusEquality, t))
}

fn wolpert(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let n = cfg.cutoff.unwrap_or(200);
    let reference = FlatTorus::new(0.0, 1.0)?;
    let mut t = Table::new(&["re", "im", "lipschitz", "dilatation", "margin", "holds"]);
    let mut rep = Report::new();
    let (mut violations, mut min_margin) = (0usize, f64::INFINITY);
    for tor in torus_grid(cfg)? {
        let w = wolpert_check(&reference, &tor, n);
        if !w.holds {
            violations += 1;
        }
        min_margin = min_margin.min(w.margin);
        t.row(&[f(tor.re()), f(tor.im()), f(w.lipschitz), f(w.dilatation), f(w.margin), w.holds.to_string()]);
    }
    rep.constant("violations", violations as f64);
    rep.constant("min_margin", min_margin);
    rep.check("no violations", violations == 0);
    Ok(rep.finish(Experiment::Wolpert, t))
}

/// Shortest-curve length required of a sampled thick point.
pub const THICK_SYSTOLE: f64 = 0.2;

fn sample_thick_point(r: &mut ChaCha8Rng) -> Result<FnPoint> {
    loop {
        let l = log_uniform(r, 0.2, 4.0);
        let s = r.gen_range(-2.0 * l..=2.0 * l);
        let p = FnPoint::torus(l, s)?;
        let (u, _) = systolic_basis(&p)?;
        if curve_length(&p, &u)? >= THICK_SYSTOLE {
            return Ok(p);
        }
    }
}

fn search(cfg: &ExperimentConfig) -> SupSearch {
    SupSearch {
        max_cutoff: cfg.cutoff.unwrap_or(64),
        eps1: cfg.eps1,
        ..SupSearch::default()
    }
}

/// Gaps among `d_L`, `q₃`, `q₄` and the marking distance for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThickSample {
    pub dl: f64,
    pub q3: f64,
    pub q4: f64,
    pub marking_distance: f64,
}

impl ThickSample {
    pub fn max_gap(&self) -> f64 {
        let v = [self.dl, self.q3, self.q4, self.marking_distance];
        let mut g: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                g = g.max((v[i] - v[j]).abs());
            }
        }
        g
    }
}

pub fn thick_sample(sigma: &FnPoint, tau: &FnPoint, search: &SupSearch) -> Result<ThickSample> {
    let (dl, n) = dl_adaptive(sigma, tau, search)?;
    let cands = candidate_family(&[sigma, tau], n, search.twist_images, search.eps1)?;
    let q3 = thick_quantity(sigma, tau, ThickQuantity::SourceMarking, &cands, search.eps1)?;
    let q4 = thick_quantity(sigma, tau, ThickQuantity::TargetMarking, &cands, search.eps1)?;
    let md = marking_distance(&short_marking(sigma, &cands)?, &short_marking(tau, &cands)?)?;
    Ok(ThickSample {
        dl: dl.value,
        q3: q3.value,
        q4: q4.value,
        marking_distance: md,
    })
}

fn thick_compare(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let samples = cfg.samples.unwrap_or(100);
    let search = search(cfg);
    let mut t = Table::new(&[
        "draw", "index", "l1", "s1", "l2", "s2", "d_l", "q3", "q4", "marking_distance", "max_gap",
    ]);
    let mut rep = Report::new();
    let mut consts = [0.0_f64; 2];
    for (draw, c) in consts.iter_mut().enumerate() {
        let mut r = rng(cfg.seed.wrapping_add(draw as u64));
        for i in 0..samples {
            let sigma = sample_thick_point(&mut r)?;
            let tau = sample_thick_point(&mut r)?;
            let s = thick_sample(&sigma, &tau, &search)?;
            *c = c.max(s.max_gap());
            let (a, b) = (sigma.coords()[0], tau.coords()[0]);
            t.row(&[
                draw.to_string(),
                i.to_string(),
                f(a.length),
                f(a.twist),
                f(b.length),
                f(b.twist),
                f(s.dl),
                f(s.q3),
                f(s.q4),
                f(s.marking_distance),
                f(s.max_gap()),
            ]);
        }
    }
    let ratio = consts[0].max(consts[1]) / consts[0].min(consts[1]);
    rep.constant("max_gap", consts[0]);
    rep.constant("max_gap_redraw", consts[1]);
    rep.constant("redraw_ratio", ratio);
    rep.check("finite", consts[0].is_finite() && consts[1].is_finite());
    rep.check("redraw within x1.5", ratio <= 1.5);
    Ok(rep.finish(Experiment::ThickCompare, t))
}

/// Length bands `[lo, hi]` for the product-region sweep: decades starting
/// at `l_min`, the last one clipped at `eps1`.
pub fn length_bands(eps1: f64, l_min: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = l_min;
    while lo < eps1 * (1.0 - 1e-12) {
        let hi = (lo * 10.0).min(eps1);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

fn prodreg_error(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let samples = cfg.samples.unwrap_or(50);
    let twist_max = cfg.twist_max.unwrap_or(1e6);
    let bands = length_bands(cfg.eps1, cfg.l_min.unwrap_or(1e-5));
    let search = search(cfg);
    let gamma = [CurveClass::Slope(Slope::MERIDIAN)];
    let mut r = rng(cfg.seed);
    let mut t = Table::new(&[
        "band", "index", "l1", "t1", "l2", "t2", "d_l", "d_l_gamma", "gap",
    ]);
    let mut rep = Report::new();
    let mut per_band = Vec::with_capacity(bands.len());
    for (b, &(lo, hi)) in bands.iter().enumerate() {
        let mut c: f64 = 0.0;
        for i in 0..samples {
            let (l1, l2) = (log_uniform(&mut r, lo, hi), log_uniform(&mut r, lo, hi));
            let t1 = r.gen_range(-twist_max..=twist_max);
            let t2 = r.gen_range(-twist_max..=twist_max);
            let sigma = FnPoint::torus(l1, t1 * l1)?;
            let tau = FnPoint::torus(l2, t2 * l2)?;
            let dl = dl_adaptive(&sigma, &tau, &search)?.0.value;
            let dlg = dl_gamma(&sigma, &tau, &gamma, cfg.eps1, cfg.eps0)?.value;
            let gap = (dl - dlg).abs();
            c = c.max(gap);
            t.row(&[b.to_string(), i.to_string(), f(l1), f(t1), f(l2), f(t2), f(dl), f(dlg), f(gap)]);
        }
        rep.constant(&format!("max_gap_band{b}"), c);
        per_band.push(c);
    }
    let hi = per_band.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = per_band.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.constant("max_gap", hi);
    rep.constant("band_ratio", hi / lo);
    rep.check("finite", hi.is_finite());
    rep.check("stable within x2", hi / lo <= 2.0);
    Ok(rep.finish(Experiment::ProdregError, t))
}

/// One row of the twist-sequence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm1Row {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub dl: f64,
    pub closed_form: f64,
    pub dt_gamma: f64,
}

/// The pair `σₙ, τₙ` with `Pₙ = n²`, `qₙ = n`, and its estimators. The
/// Teichmüller side is the half-plane annulus factor, which is defined even
/// when `e^{-P}` is not below the thin threshold.
pub fn thm1_row(n: u32, search: &SupSearch) -> Result<Thm1Row> {
    let p = f64::from(n * n);
    let q = f64::from(n);
    let twists = twist_count(p, q)?;
    let (sigma, tau) = twisted_pair((-p).exp(), twists)?;
    let (dl, _) = dl_adaptive(&sigma, &tau, search)?;
    let (a, b) = (sigma.coords()[0], tau.coords()[0]);
    let dt = dt_annulus_factor(a.twist / a.length, a.length, b.twist / b.length, b.length)?;
    Ok(Thm1Row {
        n,
        p,
        q,
        dl: dl.value,
        closed_form: theorem1_closed_form(p, q),
        dt_gamma: dt,
    })
}

fn thm1_divergence(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let n_max = cfg.n_max.unwrap_or(6);
    let search = search(cfg);
    let mut t = Table::new(&["n", "P", "q", "dL", "closed_form", "dT_gamma"]);
    let mut rep = Report::new();
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let row = thm1_row(n, &search)?;
        t.row(&[n.to_string(), f(row.p), f(row.q), f(row.dl), f(row.closed_form), f(row.dt_gamma)]);
        rows.push(row);
    }
    let decreasing = rows.windows(2).all(|w| w[1].dl < w[0].dl);
    let offset = rows
        .iter()
        .map(|r| (r.dl - r.closed_form).abs())
        .fold(0.0_f64, f64::max);
    let excess: Vec<f64> = rows.iter().map(|r| r.dt_gamma - r.q).collect();
    let band = excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - excess.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.constant("max_dl_offset", offset);
    rep.constant("dt_minus_q_band", band);
    rep.constant("dl_strictly_decreasing", if decreasing { 1.0 } else { 0.0 });
    rep.check("dL strictly decreasing", decreasing);
    rep.check("dL offset within recorded constant", offset <= THM1_DL_OFFSET);
    rep.check("dT_gamma - q band <= 2", band <= 2.0);
    Ok(rep.finish(Experiment::Thm1Divergence, t))
}

/// Applies the mapping class `T_{1/0}^{k₁} T_{0/1}^{k₂} ...` (rightmost
/// first) to every curve of a marking.
pub fn twisted_marking(base: &Marking, word: &[(bool, i64)]) -> Result<Marking> {
    let a = CurveClass::Slope(Slope::MERIDIAN);
    let b = CurveClass::Slope(Slope::LONGITUDE);
    let apply = |c: &CurveClass| -> Result<CurveClass> {
        let mut c = c.clone();
        for &(along_a, k) in word.iter().rev() {
            c = dehn_twist(&c, if along_a { &a } else { &b }, k)?;
        }
        Ok(c)
    };
    let pants = base.pants_curves().iter().map(apply).collect::<Result<Vec<_>>>()?;
    let duals = base.duals().iter().map(apply).collect::<Result<Vec<_>>>()?;
    Marking::new(pants, duals)
}

pub fn standard_marking() -> Marking {
    Marking::new(
        vec![CurveClass::Slope(Slope::MERIDIAN)],
        vec![CurveClass::Slope(Slope::LONGITUDE)],
    )
    .expect("1/0 and 0/1 meet once")
}

fn random_marking(r: &mut ChaCha8Rng) -> Result<Marking> {
    let len = r.gen_range(1..=4);
    let word: Vec<(bool, i64)> = (0..len)
        .map(|i| (i % 2 == 0, r.gen_range(1..=3) * if r.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    twisted_marking(&standard_marking(), &word)
}

fn marking_distance_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let samples = cfg.samples.unwrap_or(200);
    let mut r = rng(cfg.seed);
    let mut t = Table::new(&["kind", "index", "md_12", "md_23", "md_13", "excess"]);
    let mut rep = Report::new();
    let mu = standard_marking();
    let self_md = marking_distance(&mu, &mu)?;
    t.row(&["self".into(), "0".into(), f(self_md), String::new(), String::new(), String::new()]);
    let (mut xs, mut ys) = (vec![], vec![]);
    for j in 0..=20u32 {
        let k = 1i64 << j;
        let mk = twisted_marking(&mu, &[(true, k)])?;
        let md = marking_distance(&mu, &mk)?;
        if j >= 10 {
            xs.push((k as f64).ln());
            ys.push(md);
        }
        t.row(&["twist".into(), k.to_string(), f(md), String::new(), String::new(), String::new()]);
    }
    let growth = fitted_slope(&xs, &ys);
    let mut slack = f64::NEG_INFINITY;
    for i in 0..samples {
        let (m1, m2, m3) = (random_marking(&mut r)?, random_marking(&mut r)?, random_marking(&mut r)?);
        let d12 = marking_distance(&m1, &m2)?;
        let d23 = marking_distance(&m2, &m3)?;
        let d13 = marking_distance(&m1, &m3)?;
        let excess = d13 - d12 - d23;
        slack = slack.max(excess);
        t.row(&["triangle".into(), i.to_string(), f(d12), f(d23), f(d13), f(excess)]);
    }
    rep.constant("self_distance", self_md);
    rep.constant("twist_growth_slope", growth);
    rep.constant("triangle_slack", slack);
    rep.check("self = log 2", (self_md - 2f64.ln()).abs() <= 1e-15);
    rep.check("growth ~ log k", (growth - 1.0).abs() <= 0.1);
    rep.check("slack finite", slack.is_finite());
    Ok(rep.finish(Experiment::MarkingDistance, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        assert_eq!(validate_config("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn accepts_thresholds_and_comments() {
        let cfg = validate_config("# thresholds\neps0=0.2\neps1=0.05  # thin\n\nseed = 11").unwrap();
        assert_eq!((cfg.eps0, cfg.eps1, cfg.seed), (0.2, 0.05, 11));
    }

    #[test]
    fn ratio_violation_reports_line() {
        let err = validate_config("samples=3\neps1=0.15").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("eps1"), "{err}");
        let err = validate_config("eps0=0.2\neps1=0.1333").unwrap_err();
        assert!(err.message.contains("exceed 2"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = validate_config("eps0=0.2\nbogus=1").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(validate_config("eps0=0.3").is_err());
        assert!(validate_config("grid=1").is_err());
        assert!(validate_config("samples=0").is_err());
        assert!(validate_config("noequals").is_err());
    }

    #[test]
    fn overrides_are_checked() {
        let cfg = validate_config("").unwrap();
        assert!(cfg.clone().with_overrides(&["eps1=0.15"]).is_err());
        let cfg = cfg.with_overrides(&["samples=12", "eps1=0.04"]).unwrap();
        assert_eq!(cfg.samples, Some(12));
    }

    #[test]
    fn listing_matches_names() {
        let list = list_experiments();
        assert_eq!(list.len(), 9);
        for info in list {
            assert_eq!(info.name.parse::<Experiment>().unwrap().name(), info.name);
        }
    }

    #[test]
    fn length_bands_cover_range() {
        let b = length_bands(0.05, 1e-5);
        assert_eq!(b.len(), 4);
        assert_eq!(b[0].0, 1e-5);
        assert_eq!(b[3].1, 0.05);
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 3.0];
        assert!((fitted_slope(&xs, &[3.0, 5.0, 7.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_run_is_deterministic() {
        let cfg = validate_config("samples=20").unwrap();
        let a = run(&cfg, Experiment::HexagonSelftest).unwrap();
        let b = run(&cfg, Experiment::HexagonSelftest).unwrap();
        assert_eq!(a.csv, b.csv);
        assert!(a.passed);
        assert!(a.csv.starts_with("kind,index,x1,x2,x3,value,residual\n"));
    }

    #[test]
    fn twisted_marking_family() {
        let mu = standard_marking();
        let m = twisted_marking(&mu, &[(true, 5)]).unwrap();
        assert_eq!(m.duals()[0], CurveClass::slope(5, 1).unwrap());
        assert_eq!(marking_distance(&mu, &m).unwrap(), 7f64.ln());
    }
}
