//! Batch sweeps over fixed points, report documents and their renderings.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ambient::{microlocal_from_image, DEFAULT_WITNESS_DRAWS};
use crate::combinatorics::{enumerate_defects, flag_dim, piece_dim, DefectMatrix, GammaVector};
use crate::error::{Error, Result};
use crate::fixed_point::{
    canonical_nu1_power, dpi, n0_dim, p0, verify_key_prop, verify_n, verify_reduction_chain, FixedPointData,
};
use crate::ambient::MicrolocalRecord;
use crate::combinatorics::{defect_to_kappa, enumerate_kostant, enumerate_partitions, kappa_to_defect};
use crate::graded::{dpi_general, quiver_tangent_general, Quasiflag, RemarkReport};

pub const TOOL: &str = "qml";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            other => Err(Error::Parse(format!("unknown format {other:?} (expected json, csv or human)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Sequential,
    /// rayon work-stealing; falls back to sequential without the
    /// `parallel` feature
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRange {
    pub n_max: usize,
    pub gamma_max: u32,
}

impl Default for OracleRange {
    fn default() -> Self {
        OracleRange { n_max: 3, gamma_max: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_max: usize,
    pub gamma_max: u32,
    pub oracle: OracleRange,
    pub seed: u64,
    pub witness_draws: usize,
    /// `QML_TRUNCATION_CAP` if set, else the default rule
    pub truncation_cap: String,
}

impl SweepConfig {
    pub fn new(n_max: usize, gamma_max: u32) -> Self {
        SweepConfig {
            n_max,
            gamma_max,
            oracle: OracleRange::default(),
            seed: 0,
            witness_draws: DEFAULT_WITNESS_DRAWS,
            truncation_cap: truncation_cap_setting(),
        }
    }
}

pub fn truncation_cap_setting() -> String {
    match std::env::var("QML_TRUNCATION_CAP") {
        Ok(v) => v.trim().to_string(),
        Err(_) => "8*(|gamma|+n+2)".to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub gamma: String,
    pub defect: String,
    pub dim_t: usize,
    pub kernel_dim: usize,
    pub key_prop_bound: u32,
    pub margin: i64,
    pub key_prop_pass: bool,
    pub nu1_power: usize,
    pub dim_n: usize,
    pub expected_dim_n: usize,
    pub nu_injective: bool,
    /// `N` spanned by genuine tangent vectors
    pub nu_tangent: bool,
    /// dimension and injectivity for every monomial class of `nu1`
    pub nu_monomial_injective: bool,
    /// number of monomial classes of `nu1` whose `N` is not inside `T`
    pub nu_monomial_non_tangent: usize,
    pub reduction_chain_pass: bool,
    pub microlocal_pass: bool,
    pub intersection_dim: usize,
    pub conormal_dim: usize,
    pub piece_dim: u32,
    pub oracle_checked: bool,
    pub oracle_agrees: Option<bool>,
    /// both sides of the dimension count for `N`, as displayed in the
    /// source: `2|gamma| + dim B - sum d_pp - sum d_pq + 1`
    pub identity_lhs: i64,
    /// `sum_{q<p} (d_pq + 1) + 1`
    pub identity_rhs: i64,
    pub pass: bool,
}

impl SweepRecord {
    /// Name of the first failing check.
    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.key_prop_pass, "key proposition"),
            (self.dim_n == self.expected_dim_n, "dim N"),
            (self.nu_injective, "N injectivity"),
            (self.nu_tangent, "N inside T"),
            (self.nu_monomial_injective, "N injectivity for monomial nu1"),
            (self.reduction_chain_pass, "reduction chain"),
            (self.microlocal_pass, "microlocal emptiness"),
            (self.oracle_agrees != Some(false), "oracle equivalence"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaCount {
    pub n: usize,
    pub gamma: String,
    pub defects: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub passing: usize,
    pub violations: usize,
    pub oracle_checked: usize,
    pub per_gamma: Vec<GammaCount>,
    pub first_violation: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn all_pass(&self) -> bool {
        self.summary.violations == 0
    }
}

/// Wall-clock time per record; kept apart from the report so that the
/// report stays byte-stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub n: usize,
    pub gamma: String,
    pub defect: String,
    pub micros: u128,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub report: ReportDocument,
    pub timings: Vec<Timing>,
}

/// Every `gamma` with `0 < |gamma| <= max`, lexicographically.
pub fn gammas(n: usize, max: u32) -> Vec<GammaVector> {
    let mut gs = GammaVector::all_nonzero_up_to(n, max);
    gs.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    gs
}

/// All checks at the fixed point of `defect`.
pub fn analyze(defect: &DefectMatrix, config: &SweepConfig) -> Result<SweepRecord> {
    let n = defect.n();
    let gamma = defect.gamma();
    let fp = FixedPointData::build(defect);
    let map = dpi(&fp)?;
    let kp = verify_key_prop(defect, &map)?;
    let chain = verify_reduction_chain(defect, &map)?;

    let j = canonical_nu1_power(defect)?;
    let nrep = verify_n(&fp, &map, j)?;
    let top = defect.get(p0(defect)?, p0(defect)?) as usize;
    let mut monomial_injective = true;
    let mut monomial_non_tangent = 0;
    for k in 0..top {
        let r = verify_n(&fp, &map, k)?;
        monomial_injective &= r.injective && r.dim == r.expected_dim;
        monomial_non_tangent += usize::from(!r.tangent);
    }

    let image = map.image();
    let micro = microlocal_from_image(
        &defect.to_string(),
        &gamma,
        &image,
        Some(piece_dim(defect)),
        config.seed,
        config.witness_draws,
    )?;

    let oracle_checked = n <= config.oracle.n_max && gamma.size() <= config.oracle.gamma_max;
    let oracle_agrees = if oracle_checked {
        let qf = Quasiflag::fixed_point(defect);
        let t = quiver_tangent_general(&qf)?;
        let g = dpi_general(&t, None)?;
        let gi = g.image_in_layout(&qf)?;
        Some(t.dim() == map.tangent.dim() && g.kernel_dim() == map.kernel_dim() && gi == image)
    } else {
        None
    };

    let size = gamma.size() as i64;
    let diag = defect.diagonal_sum() as i64;
    let identity_lhs = 2 * size + flag_dim(n) as i64 - diag - size + 1;
    let identity_rhs = n0_dim(defect) as i64 + 1;

    let mut rec = SweepRecord {
        n,
        gamma: gamma.to_string(),
        defect: defect.to_string(),
        dim_t: map.tangent.dim(),
        kernel_dim: kp.kernel_dim,
        key_prop_bound: kp.bound,
        margin: kp.margin,
        key_prop_pass: kp.pass,
        nu1_power: j,
        dim_n: nrep.dim,
        expected_dim_n: nrep.expected_dim,
        nu_injective: nrep.injective,
        nu_tangent: nrep.tangent,
        nu_monomial_injective: monomial_injective,
        nu_monomial_non_tangent: monomial_non_tangent,
        reduction_chain_pass: chain.pass,
        microlocal_pass: micro.pass,
        intersection_dim: micro.intersection_dim,
        conormal_dim: micro.conormal_dim,
        piece_dim: piece_dim(defect),
        oracle_checked,
        oracle_agrees,
        identity_lhs,
        identity_rhs,
        pass: false,
    };
    rec.pass = rec.first_failure().is_none();
    Ok(rec)
}

fn run_items<T, R, F>(items: &[T], schedule: Schedule, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match schedule {
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Runs `body` inside a pool of `jobs` threads when given.
pub fn with_jobs<R: Send>(jobs: Option<usize>, body: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        #[cfg(feature = "parallel")]
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(body))
        }
        _ => Ok(body()),
    }
}

pub fn sweep(config: &SweepConfig, schedule: Schedule) -> Result<SweepOutput> {
    let mut items = Vec::new();
    let mut per_gamma = Vec::new();
    if config.gamma_max > 0 {
        for n in 2..=config.n_max {
            for g in gammas(n, config.gamma_max) {
                let ds = enumerate_defects(&g);
                per_gamma.push(GammaCount { n, gamma: g.to_string(), defects: ds.len() });
                items.extend(ds);
            }
        }
    }
    let results = run_items(&items, schedule, |d| {
        let start = Instant::now();
        let r = analyze(d, config).map_err(|e| {
            Error::Internal(format!("n={} gamma={} defect={d}: {e}", d.n(), d.gamma()))
        });
        (r, start.elapsed().as_micros())
    });
    let mut records = Vec::with_capacity(results.len());
    let mut timings = Vec::with_capacity(results.len());
    for (r, micros) in results {
        let r = r?;
        timings.push(Timing { n: r.n, gamma: r.gamma.clone(), defect: r.defect.clone(), micros });
        records.push(r);
    }
    let passing = records.iter().filter(|r| r.pass).count();
    let first_violation = records.iter().find(|r| !r.pass).map(|r| {
        format!("n={} gamma={} defect={}: {}", r.n, r.gamma, r.defect, r.first_failure().unwrap_or("?"))
    });
    let summary = Summary {
        records: records.len(),
        passing,
        violations: records.len() - passing,
        oracle_checked: records.iter().filter(|r| r.oracle_checked).count(),
        per_gamma,
        first_violation,
        note: records.is_empty().then(|| "no gamma>0 in range".to_string()),
    };
    let report = ReportDocument {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        records,
        summary,
    };
    Ok(SweepOutput { report, timings })
}

/// Something the CLI can print in every format.
pub trait Document: Serialize {
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn human(&self) -> String;
}

pub fn emit<D: Document>(doc: &D, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Internal(e.to_string());
            w.write_record(doc.csv_header()).map_err(io)?;
            for row in doc.csv_rows() {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
        }
        Format::Human => Ok(doc.human()),
    }
}

fn opt(x: Option<bool>) -> String {
    x.map_or_else(String::new, |b| b.to_string())
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

const RECORD_COLUMNS: [&str; 26] = [
    "n",
    "gamma",
    "defect",
    "dim_t",
    "kernel_dim",
    "key_prop_bound",
    "margin",
    "key_prop_pass",
    "nu1_power",
    "dim_n",
    "expected_dim_n",
    "nu_injective",
    "nu_tangent",
    "nu_monomial_injective",
    "nu_monomial_non_tangent",
    "reduction_chain_pass",
    "microlocal_pass",
    "intersection_dim",
    "conormal_dim",
    "piece_dim",
    "oracle_checked",
    "oracle_agrees",
    "identity_lhs",
    "identity_rhs",
    "pass",
    "first_failure",
];

fn record_row(r: &SweepRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.gamma.clone(),
        r.defect.clone(),
        r.dim_t.to_string(),
        r.kernel_dim.to_string(),
        r.key_prop_bound.to_string(),
        r.margin.to_string(),
        r.key_prop_pass.to_string(),
        r.nu1_power.to_string(),
        r.dim_n.to_string(),
        r.expected_dim_n.to_string(),
        r.nu_injective.to_string(),
        r.nu_tangent.to_string(),
        r.nu_monomial_injective.to_string(),
        r.nu_monomial_non_tangent.to_string(),
        r.reduction_chain_pass.to_string(),
        r.microlocal_pass.to_string(),
        r.intersection_dim.to_string(),
        r.conormal_dim.to_string(),
        r.piece_dim.to_string(),
        r.oracle_checked.to_string(),
        opt(r.oracle_agrees),
        r.identity_lhs.to_string(),
        r.identity_rhs.to_string(),
        r.pass.to_string(),
        r.first_failure().unwrap_or("").to_string(),
    ]
}

/// The per-record inequality chain with computed numbers.
pub fn human_record(r: &SweepRecord) -> String {
    let mut s = String::new();
    let rank = r.dim_t - r.kernel_dim;
    let rhs_flag = r.n * (r.n - 1) / 2;
    let _ = writeln!(s, "n={} gamma=({}) defect={}  [{}]", r.n, r.gamma, r.defect, if r.pass { "pass" } else { "VIOLATION" });
    let _ = writeln!(
        s,
        "  kernel: dim Ker(d pi) = {} < {} = sum d_pp + |gamma| - 1   (margin {}) {}",
        r.kernel_dim,
        r.key_prop_bound,
        r.margin,
        mark(r.key_prop_pass)
    );
    let _ = writeln!(
        s,
        "  chain:  rank(d pi) = {} - {} = {} > {} + 1 + {} = {} = dim(Q_0 x C) + dim piece {}",
        r.dim_t,
        r.kernel_dim,
        rank,
        rhs_flag,
        r.piece_dim,
        rhs_flag + 1 + r.piece_dim as usize,
        mark(r.reduction_chain_pass)
    );
    let _ = writeln!(
        s,
        "  N:      dim N = {} (expected {}), nu1 class z^{}, injective {}, inside T {}, monomial classes injective {} ({} not inside T)",
        r.dim_n,
        r.expected_dim_n,
        r.nu1_power,
        mark(r.nu_injective),
        mark(r.nu_tangent),
        mark(r.nu_monomial_injective),
        r.nu_monomial_non_tangent
    );
    let _ = writeln!(
        s,
        "  conormal: dim(Ker d*pi n conormal) = {} < {} = dim conormal {}",
        r.intersection_dim,
        r.conormal_dim,
        mark(r.microlocal_pass)
    );
    let oracle = match r.oracle_agrees {
        None => "not checked".to_string(),
        Some(b) => mark(b).to_string(),
    };
    let _ = writeln!(s, "  oracle: {oracle}; count identity {} vs {}", r.identity_lhs, r.identity_rhs);
    s
}

impl Document for ReportDocument {
    fn csv_header(&self) -> Vec<String> {
        RECORD_COLUMNS.iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.records.iter().map(record_row).collect()
    }

    fn human(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(
            s,
            "{} {}: sweep n <= {}, |gamma| <= {}, oracle n <= {}, |gamma| <= {}, seed {}",
            self.tool, self.version, c.n_max, c.gamma_max, c.oracle.n_max, c.oracle.gamma_max, c.seed
        );
        for r in &self.records {
            s.push_str(&human_record(r));
        }
        let m = &self.summary;
        let _ = writeln!(
            s,
            "{} records, {} pass, {} violations, {} oracle-checked",
            m.records, m.passing, m.violations, m.oracle_checked
        );
        if let Some(v) = &m.first_violation {
            let _ = writeln!(s, "first violation: {v}");
        }
        if let Some(note) = &m.note {
            let _ = writeln!(s, "note: {note}");
        }
        s
    }
}

impl Document for Vec<Timing> {
    fn csv_header(&self) -> Vec<String> {
        ["n", "gamma", "defect", "micros"].iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.iter().map(|t| vec![t.n.to_string(), t.gamma.clone(), t.defect.clone(), t.micros.to_string()]).collect()
    }

    fn human(&self) -> String {
        self.iter().map(|t| format!("n={} gamma=({}) defect={}: {} us\n", t.n, t.gamma, t.defect, t.micros)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumKind {
    Kostant,
    Defects,
    Partitions,
}

impl FromStr for EnumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kostant" => Ok(EnumKind::Kostant),
            "defects" => Ok(EnumKind::Defects),
            "partitions" => Ok(EnumKind::Partitions),
            other => Err(Error::Parse(format!("unknown enumeration {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumItem {
    pub index: usize,
    pub value: String,
    /// the partner under the bijection (kostant <-> defects), or the
    /// number of parts (partitions)
    pub partner: String,
    /// number of parts of a Kostant partition, `dim` of the piece of a
    /// defect matrix, number of parts of a partition of `gamma`
    pub size: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumDocument {
    pub kind: EnumKind,
    pub gamma: String,
    pub count: usize,
    pub items: Vec<EnumItem>,
}

pub fn enumerate(kind: EnumKind, gamma: &GammaVector) -> EnumDocument {
    let items: Vec<EnumItem> = match kind {
        EnumKind::Kostant => enumerate_kostant(gamma)
            .iter()
            .enumerate()
            .map(|(index, k)| EnumItem {
                index,
                value: k.tri().to_string(),
                partner: kappa_to_defect(k).to_string(),
                size: k.num_parts(),
            })
            .collect(),
        EnumKind::Defects => enumerate_defects(gamma)
            .iter()
            .enumerate()
            .map(|(index, d)| EnumItem {
                index,
                value: d.to_string(),
                partner: defect_to_kappa(d).tri().to_string(),
                size: piece_dim(d),
            })
            .collect(),
        EnumKind::Partitions => enumerate_partitions(gamma)
            .iter()
            .enumerate()
            .map(|(index, p)| EnumItem { index, value: p.to_string(), partner: String::new(), size: p.len() as u32 })
            .collect(),
    };
    EnumDocument { kind, gamma: gamma.to_string(), count: items.len(), items }
}

impl Document for EnumDocument {
    fn csv_header(&self) -> Vec<String> {
        ["index", "value", "partner", "size"].iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.items.iter().map(|i| vec![i.index.to_string(), i.value.clone(), i.partner.clone(), i.size.to_string()]).collect()
    }

    fn human(&self) -> String {
        let mut s = format!("{:?} of gamma=({}): {}\n", self.kind, self.gamma, self.count).to_lowercase();
        for i in &self.items {
            let partner = if i.partner.is_empty() { String::new() } else { format!("  <-> {}", i.partner) };
            let _ = writeln!(s, "  {:>3}  {}{}  [{}]", i.index, i.value, partner, i.size);
        }
        s
    }
}

impl Document for SweepRecord {
    fn csv_header(&self) -> Vec<String> {
        RECORD_COLUMNS.iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![record_row(self)]
    }

    fn human(&self) -> String {
        human_record(self)
    }
}

impl Document for MicrolocalRecord {
    fn csv_header(&self) -> Vec<String> {
        ["point", "ambient_dim", "dpi_rank", "cokernel_dim", "conormal_dim", "intersection_dim", "proper_with_piece", "witness_draws", "pass"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.point.clone(),
            self.ambient_dim.to_string(),
            self.dpi_rank.to_string(),
            self.cokernel_dim.to_string(),
            self.conormal_dim.to_string(),
            self.intersection_dim.to_string(),
            opt(self.proper_with_piece),
            self.witness_draws.to_string(),
            self.pass.to_string(),
        ]]
    }

    fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "point {}: ambient tangent {}, rank(d pi) {}", self.point, self.ambient_dim, self.dpi_rank);
        let _ = writeln!(
            s,
            "  dim Ker(d*pi) = {}, dim conormal = {}, dim intersection = {} {}",
            self.cokernel_dim,
            self.conormal_dim,
            self.intersection_dim,
            mark(self.intersection_dim < self.conormal_dim)
        );
        if let Some(b) = self.proper_with_piece {
            let _ = writeln!(s, "  intersection + piece below conormal + 1: {}", mark(b));
        }
        match &self.witness {
            Some(w) => {
                let _ = writeln!(s, "  witness found after {} draw(s): [{}]", self.witness_draws, w.join(", "));
            }
            None => {
                let _ = writeln!(s, "  no witness after {} draw(s)", self.witness_draws);
            }
        }
        s
    }
}

impl Document for RemarkReport {
    fn csv_header(&self) -> Vec<String> {
        ["point", "tangent_dim", "kernel_dim", "in_fiber", "piece_dim"].iter().map(|s| s.to_string()).collect()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .fixed_points
            .iter()
            .map(|f| vec![format!("fixed {}", f.defect), String::new(), f.fast_kernel.to_string(), "true".into(), f.piece_dim.to_string()])
            .collect();
        rows.extend(self.family.iter().map(|p| {
            vec![format!("family t={}", p.t), p.tangent_dim.to_string(), p.kernel_dim.to_string(), p.in_fiber.to_string(), String::new()]
        }));
        rows
    }

    fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "SL_3, gamma = (2,2): cells of dimensions {:?}", self.cell_dims);
        for f in &self.fixed_points {
            let _ = writeln!(
                s,
                "  fixed point {} (piece dim {}): kernel {} (graded engine {}) {}",
                f.defect,
                f.piece_dim,
                f.fast_kernel,
                f.graded_kernel,
                mark(f.fast_kernel == f.graded_kernel)
            );
        }
        for p in &self.family {
            let _ = writeln!(
                s,
                "  family t={}: in simple fiber {}, dim T = {}, kernel {}",
                p.t, p.in_fiber, p.tangent_dim, p.kernel_dim
            );
        }
        for m in &self.sampled_microlocal {
            let _ = writeln!(s, "  microlocal at {}: intersection {} < {} {}", m.point, m.intersection_dim, m.conormal_dim, mark(m.pass));
        }
        let _ = writeln!(s, "  semicontinuity {}; overall {}", mark(self.semicontinuous), mark(self.pass));
        s
    }
}
