//! One function per instance kind: payload in, structured result out.

use std::time::Instant;

use cnp_core::capacity::{
    analytic_capacity, disk_competitor_probe, is_removable, removability_experiment, Capacity, Component,
    RemovabilityConfig,
};
use cnp_core::disk::{
    blaschke_product, blaschke_sum, dominating_ratio, dx_lower_bound, grid_sup, BlaschkeSum, DiskFunction, DiskSample,
    GridSpec,
};
use cnp_core::kernels::{dk, dk_matrix, EmbeddingMap, KernelSpec};
use cnp_core::linalg::DEFAULT_PSD_TOL;
use cnp_core::pick::{
    contractivity_certificate, extremal_value, is_contractive_multiplier, is_solvable, min_multiplier_norm,
    InterpolationProblem, DEFAULT_BRACKET_TOL,
};
use cnp_core::realization::{disk_embedding, realize, verify_unitary_gram};
use cnp_core::report::{ExperimentReport, Verdict};
use cnp_core::{Complex64, Exec};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::instance::{Instance, Kind};
use crate::output::Table;
use crate::payload::*;
use crate::weak_hardy::{weak_hardy_experiment, WeakHardyConfig, DEFAULT_TOL as WEAK_HARDY_TOL};

/// Gram deviation below which a disk identification counts as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// A sample counts as reaching a function's supremum when its ratio is within
/// this of 1; the grid and the sample discretize the boundary differently.
pub const DOMINATING_SLACK: f64 = 1e-6;

/// Distance along the ray at which the disk competitor `r/(z - c)` is probed.
pub const PROBE_RADIUS: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Overrides the instance's own tolerance (bracket, PSD or gap,
    /// depending on the kind).
    pub tol: Option<f64>,
    /// Overrides the instance's seed.
    pub seed: Option<u64>,
    /// Record wall time (makes reports non-reproducible byte-for-byte).
    pub timing: bool,
    pub exec: Exec,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tol: None, seed: None, timing: false, exec: Exec::Parallel }
    }
}

impl RunOptions {
    fn tol(&self, own: Option<f64>, default: f64) -> f64 {
        self.tol.or(own).unwrap_or(default)
    }

    fn seed(&self, own: Option<u64>) -> u64 {
        self.seed.or(own).unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Computed,
    Pass,
    Fail,
    Inconclusive,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub kind: Kind,
    pub digest: String,
    pub status: Status,
    pub result: Value,
    /// Flat rows for CSV; `None` for nested results.
    pub table: Option<Table>,
    pub wall_time_ms: Option<f64>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Computed | Status::Pass => 0,
            Status::Fail | Status::Inconclusive => 1,
        }
    }
}

struct Computed {
    status: Status,
    result: Value,
    table: Option<Table>,
}

fn computed<T: Serialize>(result: &T, table: Option<Table>) -> Result<Computed> {
    Ok(Computed { status: Status::Computed, result: to_value(result)?, table })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Invalid(format!("result not representable as JSON: {e}")))
}

pub fn execute(inst: &Instance, opts: &RunOptions) -> Result<Outcome> {
    let start = Instant::now();
    let mut c = match inst.kind {
        Kind::Pick => pick(inst.payload()?, opts),
        Kind::Extremal => extremal(inst.payload()?, opts),
        Kind::Dk => dk_table(inst.payload()?, opts),
        Kind::Embed => embed(inst.payload()?, opts),
        Kind::Dominate => dominate(inst.payload()?, opts),
        Kind::Blaschke => blaschke(inst.payload()?, opts),
        Kind::Capacity => capacity(inst.payload()?),
        Kind::RemoveExperiment => remove(inst.payload()?, opts),
        Kind::WeakHardyExperiment => weak_hardy(inst.payload()?, opts),
    }?;
    let wall_time_ms = opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    if let Value::Object(map) = &mut c.result {
        // Experiment reports carry the digest (and timing) themselves too.
        if map.contains_key("experiment") {
            map.insert("digest".into(), Value::String(inst.digest.clone()));
            if let Some(ms) = wall_time_ms {
                map.insert("wall_time_ms".into(), to_value(&ms)?);
            }
        }
    }
    Ok(Outcome {
        kind: inst.kind,
        digest: inst.digest.clone(),
        status: c.status,
        result: c.result,
        table: c.table,
        wall_time_ms,
    })
}

fn fmt_c(z: Complex64) -> [String; 2] {
    [z.re.to_string(), z.im.to_string()]
}

#[derive(Serialize)]
struct PickOut {
    ids: Vec<String>,
    feasible: bool,
    min_norm: f64,
    certificate: f64,
    iterations: usize,
    lower_seed: f64,
    /// Pick matrix at `t = 1` is PSD within the default relative tolerance.
    solvable: bool,
    tol: f64,
}

fn pick(p: PickPayload, opts: &RunOptions) -> Result<Computed> {
    let (spec, pts) = build_sample(&p.kernel, p.points.as_ref(), p.ids.as_deref())?;
    let tol = opts.tol(p.tol, DEFAULT_BRACKET_TOL);
    let problem = InterpolationProblem::new(spec, pts, p.targets.into_targets()?)?;
    let r = min_multiplier_norm(&problem, tol)?;
    let out = PickOut {
        ids: problem.pts.ids().to_vec(),
        feasible: r.feasible,
        min_norm: r.min_norm,
        certificate: r.certificate,
        iterations: r.iterations,
        lower_seed: r.lower_seed,
        solvable: is_solvable(&problem, DEFAULT_PSD_TOL)?,
        tol,
    };
    let table = Table::new(
        ["min_norm", "feasible", "solvable", "certificate", "iterations", "lower_seed"],
        vec![vec![
            out.min_norm.to_string(),
            out.feasible.to_string(),
            out.solvable.to_string(),
            out.certificate.to_string(),
            out.iterations.to_string(),
            out.lower_seed.to_string(),
        ]],
    );
    computed(&out, Some(table))
}

#[derive(Serialize)]
struct ExtremalOut {
    base: String,
    x: String,
    value: f64,
    closed_form: f64,
    gap: f64,
    boundary_min_eigenvalue: f64,
    iterations: usize,
    dk: f64,
    tol: f64,
    /// `gap <= 2 tol`; omitted for raw Gram kernels, where the closed form
    /// is only reported (finite data cannot certify the two-point property).
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agreement: Option<bool>,
}

fn extremal(p: ExtremalPayload, opts: &RunOptions) -> Result<Computed> {
    let (spec, pts) = build_sample(&p.kernel, p.points.as_ref(), p.ids.as_deref())?;
    let (base, x) = (p.base.resolve(&pts)?, p.x.resolve(&pts)?);
    let tol = opts.tol(p.tol, DEFAULT_BRACKET_TOL);
    let r = extremal_value(&spec, &pts, base, x, tol)?;
    let out = ExtremalOut {
        base: pts.id(base).to_string(),
        x: pts.id(x).to_string(),
        value: r.value,
        closed_form: r.closed_form,
        gap: r.gap,
        boundary_min_eigenvalue: r.boundary_min_eigenvalue,
        iterations: r.iterations,
        dk: dk(&spec, &pts, x, base)?,
        tol,
        oracle_agreement: (!matches!(spec, KernelSpec::Gram(_))).then_some(r.gap <= 2.0 * tol),
    };
    let table = Table::new(
        ["base", "x", "value", "closed_form", "gap", "boundary_min_eigenvalue", "iterations"],
        vec![vec![
            out.base.clone(),
            out.x.clone(),
            out.value.to_string(),
            out.closed_form.to_string(),
            out.gap.to_string(),
            out.boundary_min_eigenvalue.to_string(),
            out.iterations.to_string(),
        ]],
    );
    computed(&out, Some(table))
}

#[derive(Serialize)]
struct DkPair {
    a: String,
    b: String,
    dk: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum DkOut {
    Matrix { ids: Vec<String>, matrix: Vec<Vec<f64>> },
    Pairs { pairs: Vec<DkPair> },
}

fn dk_table(p: DkPayload, opts: &RunOptions) -> Result<Computed> {
    let (spec, pts) = build_sample(&p.kernel, p.points.as_ref(), p.ids.as_deref())?;
    let header = ["a", "b", "dk"];
    match p.pairs {
        Some(pairs) => {
            let pairs = pairs
                .iter()
                .map(|(a, b)| {
                    let (i, j) = (a.resolve(&pts)?, b.resolve(&pts)?);
                    Ok(DkPair { a: pts.id(i).into(), b: pts.id(j).into(), dk: dk(&spec, &pts, i, j)? })
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = pairs.iter().map(|q| vec![q.a.clone(), q.b.clone(), q.dk.to_string()]).collect();
            computed(&DkOut::Pairs { pairs }, Some(Table::new(header, rows)))
        }
        None => {
            let matrix = dk_matrix(&spec, &pts, opts.exec)?;
            let mut rows = Vec::new();
            for (i, row) in matrix.iter().enumerate() {
                for (j, d) in row.iter().enumerate().skip(i + 1) {
                    rows.push(vec![pts.id(i).to_string(), pts.id(j).to_string(), d.to_string()]);
                }
            }
            computed(&DkOut::Matrix { ids: pts.ids().to_vec(), matrix }, Some(Table::new(header, rows)))
        }
    }
}

#[derive(Serialize)]
struct DiskEmbeddingOut {
    lambda: String,
    images: Vec<Complex64>,
    unitary_deviation: f64,
    unitary: bool,
}

#[derive(Serialize)]
struct XiOut {
    values: Vec<Complex64>,
    contractive: bool,
    min_eigenvalue: f64,
}

#[derive(Serialize)]
struct UnitaryCheckOut {
    deviation: f64,
    holds: bool,
}

#[derive(Serialize)]
struct EmbedOut {
    ids: Vec<String>,
    base: String,
    d: usize,
    b: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    reconstruction_error: f64,
    spectrum: Vec<f64>,
    tol: f64,
    /// Rank-one realizations only: the disk coordinate `<b(x), b(lambda)/|b(lambda)|>`.
    #[serde(skip_serializing_if = "Option::is_none")]
    disk_embedding: Option<DiskEmbeddingOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<XiOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitary_check: Option<UnitaryCheckOut>,
}

fn embed(p: EmbedPayload, opts: &RunOptions) -> Result<Computed> {
    let (spec, pts) = build_sample(&p.kernel, p.points.as_ref(), p.ids.as_deref())?;
    let base = p.base.resolve(&pts)?;
    let tol = opts.tol(p.tol, DEFAULT_PSD_TOL);
    let r = realize(&spec, &pts, base, tol)?;

    let disk = if r.d == 1 && pts.len() > 1 {
        let lambda = match &p.lambda {
            Some(l) => l.resolve(&pts)?,
            None => (0..pts.len()).find(|&i| i != base).expect("at least two points"),
        };
        let images = disk_embedding(&r, lambda)?;
        let unitary_deviation = verify_unitary_gram(&spec, &pts, base, &images)?;
        Some(DiskEmbeddingOut {
            lambda: pts.id(lambda).into(),
            images,
            unitary_deviation,
            unitary: unitary_deviation <= UNITARY_TOL,
        })
    } else {
        None
    };
    let xi = match &p.xi {
        Some(xi) => {
            let values = cnp_core::realization::xi_multiplier_values(&r, xi)?;
            Some(XiOut {
                contractive: is_contractive_multiplier(&spec, &pts, &values)?,
                min_eigenvalue: contractivity_certificate(&spec, &pts, &values)?,
                values,
            })
        }
        None => None,
    };
    let unitary_check = match &p.disk_images {
        Some(j) => {
            let deviation = verify_unitary_gram(&spec, &pts, base, j)?;
            Some(UnitaryCheckOut { deviation, holds: deviation <= UNITARY_TOL })
        }
        None => None,
    };
    let out = EmbedOut {
        ids: pts.ids().to_vec(),
        base: pts.id(base).into(),
        d: r.d,
        norms: r.norms(),
        b: r.b,
        reconstruction_error: r.reconstruction_error,
        spectrum: r.spectrum,
        tol,
        disk_embedding: disk,
        xi,
        unitary_check,
    };
    computed(&out, None)
}

#[derive(Serialize)]
struct FunctionRatio {
    function: String,
    ratio: f64,
}

#[derive(Serialize)]
struct DominateOut {
    sample_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    grid: GridSpec,
    ratio: f64,
    per_function: Vec<FunctionRatio>,
    /// `consistent-with-dominating` when every function reaches its grid
    /// sup on the sample (within `DOMINATING_SLACK`), else `not-dominating-for-family`. Finite families
    /// can refute, never prove, that a set is dominating.
    assessment: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairwise: Option<PairwiseOut>,
}

#[derive(Serialize)]
struct PairwiseOut {
    points: Vec<Complex64>,
    /// `sup_f d_D(f(x), f(y))` over the family: a lower bound for the Möbius pseudo-distance.
    lower_bound: Vec<Vec<f64>>,
}

fn dominate(p: DominatePayload, opts: &RunOptions) -> Result<Computed> {
    let seed = p.sample.seed(opts.seed(p.seed));
    let points = p.sample.generate(seed)?;
    let grid = p.grid.unwrap_or_default();
    let sample = DiskSample::new(points, None)?;
    let rep = dominating_ratio(&sample, &p.functions, &grid, opts.exec)?;
    let pairwise = match p.pairwise {
        Some(points) => {
            let lower_bound = dx_lower_bound(&points, &p.functions, &grid, opts.exec)?;
            Some(PairwiseOut { points, lower_bound })
        }
        None => None,
    };
    let per_function: Vec<FunctionRatio> = p
        .functions
        .iter()
        .zip(&rep.per_function)
        .map(|(f, &ratio)| FunctionRatio { function: f.name(), ratio })
        .collect();
    let rows = per_function.iter().map(|f| vec![f.function.clone(), f.ratio.to_string()]).collect();
    let out = DominateOut {
        sample_size: sample.points().len(),
        seed: p.sample.is_random().then_some(seed),
        grid,
        ratio: rep.ratio,
        per_function,
        assessment: if rep.ratio >= 1.0 - DOMINATING_SLACK {
            "consistent-with-dominating"
        } else {
            "not-dominating-for-family"
        },
        pairwise,
    };
    computed(&out, Some(Table::new(["function", "ratio"], rows)))
}

#[derive(Serialize)]
struct BlaschkeValue {
    z: Complex64,
    value: Complex64,
    modulus: f64,
}

#[derive(Serialize)]
struct BlaschkeOut {
    zeros: usize,
    sum: BlaschkeSum,
    grid_sup: f64,
    values: Vec<BlaschkeValue>,
}

fn blaschke(p: BlaschkePayload, opts: &RunOptions) -> Result<Computed> {
    let sample = DiskSample::new(p.zeros.clone(), p.tail_model)?;
    let f = DiskFunction::Blaschke { zeros: p.zeros.clone() };
    f.validate()?;
    let grid = p.grid.unwrap_or_default();
    grid.validate()?;
    let values = p
        .points
        .unwrap_or_default()
        .into_iter()
        .map(|z| {
            let value = blaschke_product(&p.zeros, z)?;
            Ok(BlaschkeValue { z, value, modulus: value.norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = values
        .iter()
        .map(|v| {
            let [zr, zi] = fmt_c(v.z);
            let [vr, vi] = fmt_c(v.value);
            vec![zr, zi, vr, vi, v.modulus.to_string()]
        })
        .collect();
    let out = BlaschkeOut {
        zeros: p.zeros.len(),
        sum: blaschke_sum(&sample),
        grid_sup: grid_sup(&f, &grid, opts.exec),
        values,
    };
    computed(&out, Some(Table::new(["z_re", "z_im", "value_re", "value_im", "modulus"], rows)))
}

#[derive(Serialize)]
struct ProbeOut {
    component: usize,
    radius: f64,
    probe_radius: f64,
    value: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct CapacityOut {
    capacity: Capacity,
    removable: bool,
    components: usize,
    /// Disk lower bound `|f'(inf)| >= r` from the competitor `r/(z - c)`,
    /// evaluated as `|z f(z)|` far along a ray.
    competitor_probes: Vec<ProbeOut>,
}

fn capacity(p: CapacityPayload) -> Result<Computed> {
    let set = cnp_core::capacity::PlanarSet::new(p.components)?;
    let cap = analytic_capacity(&set);
    let competitor_probes = set
        .components
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match *c {
            Component::Disk { center, radius } if radius > 0.0 => {
                let value = disk_competitor_probe(center, radius, PROBE_RADIUS, 0.0);
                Some(ProbeOut {
                    component: i,
                    radius,
                    probe_radius: PROBE_RADIUS,
                    value,
                    relative_error: (value - radius).abs() / radius,
                })
            }
            _ => None,
        })
        .collect();
    let out = CapacityOut {
        removable: is_removable(&set),
        components: set.components.len(),
        capacity: cap,
        competitor_probes,
    };
    let (status, value) = match &out.capacity {
        Capacity::Exact { value, .. } => ("exact", value.to_string()),
        Capacity::Unsupported { .. } => ("unsupported", String::new()),
    };
    let table =
        Table::new(["status", "value", "removable"], vec![vec![status.into(), value, out.removable.to_string()]]);
    computed(&out, Some(table))
}

fn experiment(report: ExperimentReport) -> Result<Computed> {
    let rows = report
        .steps
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                s.value.to_string(),
                s.oracle.to_string(),
                s.gap.to_string(),
                s.tolerance.map(|t| t.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Computed {
        status: report.verdict.into(),
        result: to_value(&report)?,
        table: Some(Table::new(["n", "value", "oracle", "gap", "tolerance"], rows)),
    })
}

fn remove(p: RemovePayload, opts: &RunOptions) -> Result<Computed> {
    let seed = p.sample.seed(opts.seed(p.seed));
    let sample = p.sample.generate(seed)?;
    let mut cfg = RemovabilityConfig::new(p.punctures, sample, p.function, opts.tol(p.tol, 0.0));
    if let Some(sizes) = &p.sizes {
        cfg.sizes = sizes.expand()?;
    }
    if let Some(grid) = p.grid {
        cfg.grid = grid;
    }
    let mut report = removability_experiment(&cfg, opts.exec)?;
    report.seed = p.sample.is_random().then_some(seed);
    experiment(report)
}

fn weak_hardy(p: WeakHardyPayload, opts: &RunOptions) -> Result<Computed> {
    let seed = opts.seed(p.seed);
    let tol = opts.tol(p.tol, WEAK_HARDY_TOL);
    let sizes = p.sizes.expand()?;
    let mut cfg = match (&p.kernel, &p.sample) {
        (None | Some(KernelPayload::Szego), Some(sample)) => {
            WeakHardyConfig::szego(sample.generate(sample.seed(seed))?, p.function, sizes, tol, seed)?
        }
        (None | Some(KernelPayload::Szego), None) => {
            return Err(CliError::Invalid("the szego weak-hardy experiment needs a `sample`".into()))
        }
        (Some(KernelPayload::Embedding { base, images }), None) => {
            let map = EmbeddingMap::new(images.clone(), base.clone())?;
            WeakHardyConfig::embedding(map, p.function, sizes, tol, seed)?
        }
        (Some(KernelPayload::Embedding { .. }), Some(_)) => {
            return Err(CliError::Invalid("an embedding kernel brings its own sample; drop `sample`".into()))
        }
        (Some(other), _) => {
            return Err(CliError::Invalid(format!(
                "weak-hardy experiments take a szego or embedding kernel, not {:?}",
                kernel_name(other)
            )))
        }
    };
    if let Some(b) = p.bracket_tol {
        cfg.opts.bracket_tol = b;
    }
    if let Some(grid) = p.grid {
        cfg.grid = grid;
    }
    experiment(weak_hardy_experiment(&cfg, opts.exec)?)
}

fn kernel_name(k: &KernelPayload) -> &'static str {
    match k {
        KernelPayload::Szego => "szego",
        KernelPayload::DruryArveson { .. } => "drury-arveson",
        KernelPayload::Embedding { .. } => "embedding",
        KernelPayload::Gram { .. } => "gram",
    }
}
