//! Deterministic experiment runner: builds coherent systems from a compact
//! description, runs one analysis, and renders JSON reports or sweep CSVs.
//!
//! Reports are plain `serde_json::Value`s with sorted keys, so identical
//! specs give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use coframe_core::density::{
    beurling_density, density_theorem_check, frame_measure, fundamental_identity_report,
};
use coframe_core::frame::CoherentSystem;
use coframe_core::geometry::{canonical_windows, folner_profile, relative_separation, IndexSet, Window, WindowSequence};
use coframe_core::io::{
    certificate_from_json, certificate_to_json, load_system, matrix_rows_to_json, read_json, system_to_json, vector_to_json,
};
use coframe_core::linalg::{random_unit_vector, seeded_rng, CVector, RNG_ALGORITHM};
use coframe_core::removal::{
    excess, infinite_excess_criterion, necessary_condition_check, removal_certificate, remove_positive_density,
    run_removal, RemovalCertificate, RemovalConfig,
};
use coframe_core::rep::{b_space_diagnostics, gabor_rep, heisenberg_schroedinger_rep, ProjectiveRep};
use coframe_core::{Complex64, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Exit status for each error class.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotAFrame { .. } => 2,
        Error::NotOvercomplete { .. } => 3,
        Error::Io(_) => 5,
        _ => 4,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gabor,
    Heisenberg,
}

impl Family {
    pub fn rep(self, n: usize) -> Result<ProjectiveRep> {
        match self {
            Family::Gabor => gabor_rep(n),
            Family::Heisenberg => heisenberg_schroedinger_rep(n),
        }
    }
}

/// `"e0"`, `"random"` (seeded unit vector) or explicit `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Named(String),
    Explicit(Vec<[f64; 2]>),
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec::Named("random".into())
    }
}

/// `"full"`, `{"random": k}` (seeded `k`-subset) or an explicit element list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Named(String),
    Random { random: usize },
    Explicit(Vec<usize>),
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Named("full".into())
    }
}

/// `"identity"` or `{"canonical": r}`, the `r`-th canonical window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QSpec {
    Named(String),
    Canonical { canonical: usize },
}

impl Default for QSpec {
    fn default() -> Self {
        QSpec::Named("identity".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum SystemSource {
    Builtin {
        family: Family,
        n: usize,
        #[serde(default)]
        g: GeneratorSpec,
        #[serde(default)]
        lambda: LambdaSpec,
        #[serde(default, rename = "Q")]
        q: QSpec,
    },
    File {
        path: PathBuf,
    },
}

/// Canonical boxes/balls up to the whole group, or only the whole group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSpec {
    #[default]
    Canonical,
    Full,
}

impl WindowSpec {
    pub fn build(self, group: &coframe_core::FiniteGroup) -> WindowSequence {
        match self {
            WindowSpec::Canonical => WindowSequence::canonical(group),
            WindowSpec::Full => WindowSequence::full_group(group),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Analyze,
    Density,
    Identity,
    Remove,
    Verify,
    Sweep,
}

/// Parameter grid for sweeps; `lambda_sizes` entries of `None` mean the full group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub family: Family,
    pub ns: Vec<usize>,
    #[serde(default = "full_only")]
    pub lambda_sizes: Vec<Option<usize>>,
    #[serde(default = "zero_seed")]
    pub seeds: Vec<u64>,
}

fn full_only() -> Vec<Option<usize>> {
    vec![None]
}

fn zero_seed() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub system: Option<SystemSource>,
    #[serde(default)]
    pub windows: WindowSpec,
    #[serde(default)]
    pub seed: u64,
    pub operation: Operation,
    #[serde(default)]
    pub removal: RemovalConfig,
    #[serde(default)]
    pub emit_trace: bool,
    /// Certificate to check in `verify`; the pipeline runs when absent.
    #[serde(default)]
    pub certificate: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<SweepGrid>,
}

/// Output of one run: a JSON report or, for sweeps, CSV text.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Json(Value),
    Csv(String),
}

impl RunOutput {
    pub fn render(&self) -> Result<String> {
        match self {
            RunOutput::Json(v) => coframe_core::io::to_json_string(v),
            RunOutput::Csv(s) => Ok(s.clone()),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn generator(spec: &GeneratorSpec, dim: usize, seed: u64) -> Result<CVector> {
    match spec {
        GeneratorSpec::Named(name) if name == "e0" => {
            let mut g = CVector::zeros(dim);
            g[0] = Complex64::new(1.0, 0.0);
            Ok(g)
        }
        GeneratorSpec::Named(name) if name == "random" => Ok(random_unit_vector(&mut seeded_rng(seed), dim)),
        GeneratorSpec::Named(name) => Err(bad(format!("unknown generator `{name}`"))),
        GeneratorSpec::Explicit(entries) => {
            if entries.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    actual: entries.len(),
                });
            }
            Ok(CVector::from_iterator(dim, entries.iter().map(|[re, im]| Complex64::new(*re, *im))))
        }
    }
}

/// Index sets draw from a stream separate from the generator's.
fn lambda_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn index_set(spec: &LambdaSpec, group: &coframe_core::FiniteGroup, seed: u64) -> Result<IndexSet> {
    match spec {
        LambdaSpec::Named(name) if name == "full" => Ok(IndexSet::full(group)),
        LambdaSpec::Named(name) => Err(bad(format!("unknown index set `{name}`"))),
        LambdaSpec::Random { random } => IndexSet::random(group, *random, &mut seeded_rng(lambda_seed(seed))),
        LambdaSpec::Explicit(list) => IndexSet::new(group, list.iter().copied()),
    }
}

fn q_window(spec: &QSpec, group: &coframe_core::FiniteGroup) -> Result<Window> {
    match spec {
        QSpec::Named(name) if name == "identity" => Ok(Window::identity(group)),
        QSpec::Named(name) => Err(bad(format!("unknown Q `{name}`"))),
        QSpec::Canonical { canonical } => {
            let family = canonical_windows(group);
            family
                .get(*canonical)
                .cloned()
                .ok_or_else(|| bad(format!("canonical window {canonical} does not exist ({} available)", family.len())))
        }
    }
}

pub fn build_system(source: &SystemSource, seed: u64) -> Result<CoherentSystem> {
    match source {
        SystemSource::File { path } => load_system(path),
        SystemSource::Builtin { family, n, g, lambda, q } => {
            let rep = Arc::new(family.rep(*n)?);
            let group = rep.group().clone();
            let g = generator(g, rep.dim(), seed)?;
            let lambda = index_set(lambda, &group, seed)?;
            let q = q_window(q, &group)?;
            CoherentSystem::new(rep, g, lambda, q)
        }
    }
}

fn system_summary(sys: &CoherentSystem) -> Value {
    json!({
        "group": sys.group().label(),
        "order": sys.group().order(),
        "dim": sys.dim(),
        "d_pi": sys.d_pi(),
        "lambda": sys.lambda().elements(),
        "Q": sys.q().elements(),
        "g": vector_to_json(sys.g()),
    })
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    if spec.operation == Operation::Sweep {
        let grid = spec.grid.as_ref().ok_or_else(|| bad("sweep requires a grid"))?;
        return sweep(grid, spec.windows, &spec.removal).map(RunOutput::Csv);
    }
    let source = spec.system.as_ref().ok_or_else(|| bad("operation requires a system"))?;
    let sys = build_system(source, spec.seed)?;
    let windows = spec.windows.build(sys.group());
    let body = match spec.operation {
        Operation::Analyze => analyze_report(&sys)?,
        Operation::Density => density_report(&sys, &windows)?,
        Operation::Identity => identity_report(&sys, &windows)?,
        Operation::Remove => remove_report(&sys, &windows, &spec.removal, spec.emit_trace)?,
        Operation::Verify => verify_report(&sys, &windows, &spec.removal, spec.certificate.as_ref())?,
        Operation::Sweep => unreachable!("handled above"),
    };
    Ok(RunOutput::Json(json!({
        "operation": spec.operation,
        "seed": spec.seed,
        "rng_algorithm": RNG_ALGORITHM,
        "system": system_summary(&sys),
        "result": body,
    })))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn analyze_report(sys: &CoherentSystem) -> Result<Value> {
    let a = sys.analyze()?;
    let b_space = b_space_diagnostics(sys.rep(), sys.g(), sys.q())?;
    Ok(json!({
        "is_frame": true,
        "A": a.lower,
        "B": a.upper,
        "eigenvalues": a.eigenvalues,
        "dual_bounds": [a.dual_bounds.0, a.dual_bounds.1],
        "pairings": a.pairings,
        "pairing_sum": a.pairing_sum(),
        "excess": excess(&a),
        "excess_criterion": to_value(&infinite_excess_criterion(&a)),
        "b_space": to_value(&b_space),
    }))
}

fn density_report(sys: &CoherentSystem, windows: &WindowSequence) -> Result<Value> {
    let group = sys.group();
    let density = beurling_density(group, sys.lambda(), windows);
    let bounds = sys.frame_bounds();
    let measure = if bounds.is_frame {
        to_value(&frame_measure(group, &sys.analyze()?, sys.lambda(), windows)?)
    } else {
        Value::Null
    };
    let folner: Vec<f64> = folner_profile(group, windows, sys.q())
        .iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .collect();
    Ok(json!({
        "is_frame": bounds.is_frame,
        "density": to_value(&density),
        "measure": measure,
        "folner_defect": folner,
        "relative_separation": relative_separation(group, sys.lambda(), sys.q()),
    }))
}

fn identity_report(sys: &CoherentSystem, windows: &WindowSequence) -> Result<Value> {
    let id = fundamental_identity_report(sys, windows)?;
    let thm = density_theorem_check(sys)?;
    Ok(json!({
        "identity": to_value(&id),
        "density_theorem": to_value(&thm),
        "density_theorem_passed": thm.passed(),
    }))
}

fn remove_report(sys: &CoherentSystem, windows: &WindowSequence, cfg: &RemovalConfig, emit_trace: bool) -> Result<Value> {
    let run = run_removal(sys, windows, cfg)?;
    let mut out = json!({ "certificate": certificate_to_json(&run.certificate) });
    if emit_trace {
        out["audit"] = json!({
            "m_n": matrix_rows_to_json(&run.split.m_n),
            "d_n": matrix_rows_to_json(&run.split.d_n),
            "r_n": matrix_rows_to_json(&run.split.r_n),
            "envelope": run.envelope.values,
            "certificate_matrix": matrix_rows_to_json(&run.certificate_matrix),
        });
    }
    Ok(out)
}

/// A bare certificate, or the report written by `remove`.
fn read_certificate(path: &Path) -> Result<RemovalCertificate> {
    let v = read_json(path)?;
    match v.pointer("/result/certificate") {
        Some(inner) if v.get("operation") == Some(&json!("remove")) => certificate_from_json(inner),
        _ => certificate_from_json(&v),
    }
}

fn verify_report(
    sys: &CoherentSystem,
    windows: &WindowSequence,
    cfg: &RemovalConfig,
    certificate: Option<&PathBuf>,
) -> Result<Value> {
    let cert = match certificate {
        Some(path) => read_certificate(path)?,
        None => remove_positive_density(sys, windows, cfg)?,
    };
    let frame = sys.frame();
    let analysis = frame.analyze()?;
    let check = removal_certificate(&frame, &analysis, &cert.gamma)?;
    let gamma = IndexSet::new(sys.group(), cert.gamma.iter().copied())?;
    let necessary = necessary_condition_check(sys, &gamma, windows)?;
    let identity = fundamental_identity_report(sys, &WindowSequence::full_group(sys.group()))?;
    let thm = density_theorem_check(sys)?;
    let norm_matches = (check.norm - cert.certificate_norm).abs() <= 1e-9;
    let passed = check.is_removable && check.agrees() && norm_matches && necessary.passed() && thm.passed()
        && identity.max_residual() <= 1e-9;
    Ok(json!({
        "certificate": certificate_to_json(&cert),
        "recomputed": to_value(&check),
        "norm_matches": norm_matches,
        "necessary_condition": to_value(&necessary),
        "identity_residual": identity.max_residual(),
        "density_theorem_passed": thm.passed(),
        "passed": passed,
    }))
}

pub const SWEEP_HEADER: &str =
    "N,n_lambda,seed,is_frame,d_pi,D_minus,D_plus,M_minus,M_plus,A,B,excess,removed,cert_norm";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub n_lambda: usize,
    pub seed: u64,
    pub d_pi: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// Frame-only quantities; `None` when the system is not a frame.
    pub frame: Option<FrameColumns>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameColumns {
    pub m_minus: f64,
    pub m_plus: f64,
    pub a: f64,
    pub b: f64,
    pub excess: usize,
    /// `#Γ`, zero when the frame is exact; the norm is absent then.
    pub removed: usize,
    pub cert_norm: Option<f64>,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.n_lambda,
            self.seed,
            self.frame.is_some(),
            self.d_pi,
            self.d_minus,
            self.d_plus
        );
        match &self.frame {
            Some(f) => {
                let norm = f.cert_norm.map(|x| x.to_string()).unwrap_or_default();
                write!(s, ",{},{},{},{},{},{},{}", f.m_minus, f.m_plus, f.a, f.b, f.excess, f.removed, norm)
                    .expect("writing to a String");
            }
            None => s.push_str(",,,,,,,"),
        }
        s
    }
}

pub fn sweep_point(
    family: Family,
    n: usize,
    size: Option<usize>,
    seed: u64,
    windows: WindowSpec,
    cfg: &RemovalConfig,
) -> Result<SweepRow> {
    let lambda = match size {
        Some(k) => LambdaSpec::Random { random: k },
        None => LambdaSpec::default(),
    };
    let source = SystemSource::Builtin {
        family,
        n,
        g: GeneratorSpec::default(),
        lambda,
        q: QSpec::default(),
    };
    let sys = build_system(&source, seed)?;
    let group = sys.group().clone();
    let seq = windows.build(&group);
    let density = beurling_density(&group, sys.lambda(), &seq);
    let mut row = SweepRow {
        n,
        n_lambda: sys.lambda().len(),
        seed,
        d_pi: sys.d_pi(),
        d_minus: density.d_minus,
        d_plus: density.d_plus,
        frame: None,
    };
    let Ok(analysis) = sys.analyze() else {
        return Ok(row);
    };
    let measure = frame_measure(&group, &analysis, sys.lambda(), &seq)?;
    let (removed, cert_norm) = match remove_positive_density(&sys, &seq, cfg) {
        Ok(cert) => (cert.gamma.len(), Some(cert.certificate_norm)),
        Err(Error::NotOvercomplete { .. }) => (0, None),
        Err(e) => return Err(e),
    };
    row.frame = Some(FrameColumns {
        m_minus: measure.m_minus,
        m_plus: measure.m_plus,
        a: analysis.lower,
        b: analysis.upper,
        excess: excess(&analysis),
        removed,
        cert_norm,
    });
    Ok(row)
}

/// One CSV row per grid point in grid order (`ns`, then sizes, then seeds).
pub fn sweep(grid: &SweepGrid, windows: WindowSpec, cfg: &RemovalConfig) -> Result<String> {
    if grid.ns.is_empty() || grid.lambda_sizes.is_empty() || grid.seeds.is_empty() {
        return Err(bad("sweep grid must be nonempty"));
    }
    let points: Vec<(usize, Option<usize>, u64)> = grid
        .ns
        .iter()
        .flat_map(|&n| {
            grid.lambda_sizes
                .iter()
                .flat_map(move |&k| grid.seeds.iter().map(move |&s| (n, k, s)))
        })
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(n, k, s)| sweep_point(grid.family, n, k, s, windows, cfg))
        .collect::<Result<_>>()?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in &rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    Ok(out)
}

/// Convenience for `gen`: the JSON form of a built system.
pub fn generate(source: &SystemSource, seed: u64) -> Result<Value> {
    Ok(system_to_json(&build_system(source, seed)?))
}

pub use coframe_core::io::to_json_string;
