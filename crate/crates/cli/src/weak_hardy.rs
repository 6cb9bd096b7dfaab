//! Weak-Hardy convergence harness.
//!
//! For a kernel induced by an embedding `j` of a sample `A` into the disk and
//! a bounded test function `Phi`, the data `x -> Phi(j(x))` is interpolated on
//! growing prefixes of a seeded shuffle of `A`. The minimal multiplier norms
//! form a nondecreasing sequence of lower bounds for the multiplier norm of
//! `Phi o j`; when the space has weak Hardy type they approach the sup norm,
//! which the harness estimates by `sup_A |Phi o j|`.

use cnp_core::disk::{dominating_ratio, grid_sup, DiskFunction, DiskSample, GridSpec};
use cnp_core::kernels::{EmbeddingMap, KernelSpec, PointSet};
use cnp_core::pick::{min_multiplier_norm_with, InterpolationProblem, PickOptions};
use cnp_core::report::{ExperimentReport, StepRecord};
use cnp_core::{Complex64, Error as CoreError, Exec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// A later prefix may come out below an earlier one by at most this much
/// before the run is flagged as solver-inconsistent.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Bracket width used by the experiments: small enough that bisection noise
/// stays well below [`MONOTONE_SLACK`].
pub const EXPERIMENT_BRACKET_TOL: f64 = 1e-12;

pub const DEFAULT_TOL: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct WeakHardyConfig {
    pub spec: KernelSpec,
    pub pts: PointSet,
    /// `j(x)` for every sample point, in `pts` order.
    pub images: Vec<Complex64>,
    pub function: DiskFunction,
    /// Strictly increasing prefix lengths.
    pub sizes: Vec<usize>,
    /// Tolerance for the final gap to `sup_A |Phi o j|`.
    pub tol: f64,
    pub seed: u64,
    pub opts: PickOptions,
    pub grid: GridSpec,
}

impl WeakHardyConfig {
    /// Szegő kernel on disk points (`j` is the identity).
    pub fn szego(
        sample: Vec<Complex64>,
        function: DiskFunction,
        sizes: Vec<usize>,
        tol: f64,
        seed: u64,
    ) -> Result<Self> {
        let pts = PointSet::from_scalars(&sample)?;
        Ok(Self::with_defaults(KernelSpec::Szego, pts, sample, function, sizes, tol, seed))
    }

    /// Embedding kernel; the sample is every labelled point of the map.
    pub fn embedding(
        map: EmbeddingMap,
        function: DiskFunction,
        sizes: Vec<usize>,
        tol: f64,
        seed: u64,
    ) -> Result<Self> {
        let ids: Vec<String> = map.images().keys().cloned().collect();
        let images: Vec<Complex64> = map.images().values().copied().collect();
        let pts = PointSet::from_ids(ids)?;
        Ok(Self::with_defaults(KernelSpec::Embedding(map), pts, images, function, sizes, tol, seed))
    }

    fn with_defaults(
        spec: KernelSpec,
        pts: PointSet,
        images: Vec<Complex64>,
        function: DiskFunction,
        sizes: Vec<usize>,
        tol: f64,
        seed: u64,
    ) -> Self {
        WeakHardyConfig {
            spec,
            pts,
            images,
            function,
            sizes,
            tol,
            seed,
            opts: PickOptions::with_bracket(EXPERIMENT_BRACKET_TOL),
            grid: GridSpec::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.pts.len();
        if n == 0 {
            return Err(CoreError::EmptySample.into());
        }
        if !(self.tol >= 0.0) {
            return Err(CoreError::NegativeTolerance(self.tol).into());
        }
        if self.sizes.is_empty() {
            return Err(CliError::Invalid("no subsample sizes given".into()));
        }
        if let Some(&bad) = self.sizes.iter().find(|&&m| m == 0 || m > n) {
            return Err(CliError::Invalid(format!("subsample size {bad} outside 1..={n}")));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Invalid("subsample sizes must be strictly increasing".into()));
        }
        self.function.validate()?;
        self.grid.validate()?;
        Ok(())
    }
}

pub fn weak_hardy_experiment(cfg: &WeakHardyConfig, exec: Exec) -> Result<ExperimentReport> {
    cfg.validate()?;
    let sup_grid = grid_sup(&cfg.function, &cfg.grid, exec);
    if !(sup_grid <= 1.0) {
        return Err(CoreError::EscapesDisk { name: cfg.function.name(), modulus: sup_grid }.into());
    }
    let n = cfg.pts.len();
    let values: Vec<Complex64> = cfg.images.iter().map(|&z| cfg.function.eval(z)).collect();
    let sup_sample = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_image = cfg.images.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let full = InterpolationProblem::scalar(cfg.spec.clone(), cfg.pts.clone(), values)?;

    let runs = exec.map(&cfg.sizes, |&m| min_multiplier_norm_with(&full.restrict(&order[..m]), cfg.opts));
    let norms = runs.into_iter().map(|r| r.map(|p| p.min_norm)).collect::<Result<Vec<f64>, _>>()?;

    let last = cfg.sizes.len() - 1;
    let steps: Vec<StepRecord> = cfg
        .sizes
        .iter()
        .zip(&norms)
        .enumerate()
        .map(|(k, (&m, &t))| StepRecord::new(m, t, sup_sample, (k == last).then_some(cfg.tol)))
        .collect();

    let drop = cfg.sizes.windows(2).zip(norms.windows(2)).find(|(_, t)| t[1] < t[0] - MONOTONE_SLACK);
    let bounded = norms.iter().all(|&t| t <= 1.0 + cfg.opts.bracket_tol);
    let ratio = dominating_ratio(
        &DiskSample::new(cfg.images.clone(), None)?,
        std::slice::from_ref(&cfg.function),
        &cfg.grid,
        exec,
    )?
    .ratio;

    let mut notes = vec![
        format!("kernel: {}; sample: {n} points, max |j(x)| = {max_image:.6}", cfg.spec.name()),
        format!("test function: {}; sup_A |phi| = {sup_sample:.6}; grid sup = {sup_grid:.6}", cfg.function.name()),
        format!("dominating ratio of the sample for this function: {ratio:.6}"),
    ];
    match drop {
        Some((m, t)) => notes.push(format!(
            "solver-inconsistency: min_norm fell from {:.12} (n = {}) to {:.12} (n = {})",
            t[0], m[0], t[1], m[1]
        )),
        None => notes.push(format!("lower bounds nondecreasing (slack {MONOTONE_SLACK:e})")),
    }
    if !bounded {
        notes.push("a lower bound exceeded 1, contradicting ||phi||_Mult <= sup |phi| <= 1".into());
    }
    let mut report = ExperimentReport::new("weak-hardy", steps, drop.is_none() && bounded, notes);
    report.seed = Some(cfg.seed);
    Ok(report)
}
