//! Analytic capacity of finitely described compact sets, removability, and the
//! puncture experiment for Pick data on `D \ E`.
//!
//! Only closed forms are emitted: finite sets have capacity 0, a closed disk
//! of radius `r` has capacity `r`, a segment of length `L` has `L / 4`. Any
//! other configuration is reported as unsupported together with bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::{grid_sup, DiskFunction, GridSpec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernels::{EmbeddingMap, KernelSpec, PointSet};
use crate::pick::{min_multiplier_norm_with, InterpolationProblem, PickOptions};
use crate::report::{ExperimentReport, StepRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Component {
    Point { z: Complex64 },
    Disk { center: Complex64, radius: f64 },
    Segment { a: Complex64, b: Complex64 },
}

impl Component {
    /// Capacity of the component on its own.
    pub fn capacity(&self) -> f64 {
        match *self {
            Component::Point { .. } => 0.0,
            Component::Disk { radius, .. } => radius,
            Component::Segment { a, b } => (b - a).norm() / 4.0,
        }
    }

    fn is_degenerate(&self) -> bool {
        self.capacity() == 0.0
    }

    fn contains_point(&self, p: Complex64) -> bool {
        const EPS: f64 = 1e-12;
        match *self {
            Component::Point { z } => z == p,
            Component::Disk { center, radius } => (p - center).norm() <= radius + EPS,
            Component::Segment { a, b } => {
                let ab = b - a;
                let len = ab.norm();
                if len == 0.0 {
                    return p == a;
                }
                let ap = p - a;
                let cross = (ab.re * ap.im - ab.im * ap.re).abs() / len;
                let t = (ab.re * ap.re + ab.im * ap.im) / (len * len);
                cross <= EPS && (-EPS..=1.0 + EPS).contains(&t)
            }
        }
    }

    /// Whether `other` is a subset of `self` (disks are convex, so it is
    /// enough to check extreme points).
    fn contains(&self, other: &Component) -> bool {
        match (*self, *other) {
            (_, Component::Point { z }) => self.contains_point(z),
            (_, Component::Segment { a, b }) => self.contains_point(a) && self.contains_point(b),
            (Component::Disk { center, radius }, Component::Disk { center: c2, radius: r2 }) => {
                (center - c2).norm() + r2 <= radius + 1e-12
            }
            (_, Component::Disk { center, radius }) => radius == 0.0 && self.contains_point(center),
        }
    }

    /// Centre and radius of a disk enclosing the component.
    fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Component::Point { z } => (z.re, z.re, z.im, z.im),
            Component::Disk { center, radius } => {
                (center.re - radius, center.re + radius, center.im - radius, center.im + radius)
            }
            Component::Segment { a, b } => (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im)),
        }
    }

    fn farthest_from(&self, c: Complex64) -> f64 {
        match *self {
            Component::Point { z } => (z - c).norm(),
            Component::Disk { center, radius } => (center - c).norm() + radius,
            Component::Segment { a, b } => (a - c).norm().max((b - c).norm()),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        let ok = match *self {
            Component::Point { z } => finite(z),
            Component::Disk { center, radius } => {
                if radius < 0.0 {
                    return Err(Error::PlanarSet(format!("negative radius {radius}")));
                }
                finite(center) && radius.is_finite()
            }
            Component::Segment { a, b } => finite(a) && finite(b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite { context: "planar set component".into() })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarSet {
    pub components: Vec<Component>,
}

impl PlanarSet {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        Ok(PlanarSet { components })
    }

    /// Radius of a disk containing the whole set, centred at the middle of
    /// its bounding box. Not minimal, always valid.
    pub fn enclosing_radius(&self) -> f64 {
        if self.components.is_empty() {
            return 0.0;
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.components {
            let (a, b, cc, d) = c.bounding_box();
            x0 = x0.min(a);
            x1 = x1.max(b);
            y0 = y0.min(cc);
            y1 = y1.max(d);
        }
        let mid = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        self.components.iter().map(|c| c.farthest_from(mid)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacitySource {
    /// Follows from removability of finite sets.
    Removable,
    /// Classical closed form (disk, segment) from the literature.
    Literature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Capacity {
    Exact {
        value: f64,
        source: CapacitySource,
    },
    Unsupported {
        /// `sum` of the component capacities (the subadditive estimate).
        component_sum: f64,
        /// Radius of an enclosing disk; capacity is monotone, so this bounds it.
        upper_bound: f64,
        /// Largest component capacity; a valid lower bound by monotonicity.
        lower_bound: f64,
    },
}

impl Capacity {
    pub fn value(&self) -> Option<f64> {
        match self {
            Capacity::Exact { value, .. } => Some(*value),
            Capacity::Unsupported { .. } => None,
        }
    }
}

pub fn analytic_capacity(s: &PlanarSet) -> Capacity {
    let solid: Vec<&Component> = s.components.iter().filter(|c| !c.is_degenerate()).collect();
    if solid.is_empty() {
        return Capacity::Exact { value: 0.0, source: CapacitySource::Removable };
    }
    // Finite sets are removable, so isolated points never change the value;
    // a single solid component that swallows every other one decides it.
    if let Some(host) = solid.iter().find(|h| solid.iter().all(|o| h.contains(o))) {
        return Capacity::Exact { value: host.capacity(), source: CapacitySource::Literature };
    }
    Capacity::Unsupported {
        component_sum: solid.iter().map(|c| c.capacity()).sum(),
        upper_bound: s.enclosing_radius(),
        lower_bound: solid.iter().map(|c| c.capacity()).fold(0.0, f64::max),
    }
}

/// Whether the set is removable for bounded holomorphic functions. Any solid
/// component already has positive capacity, so this is decided even when
/// the exact capacity is unsupported.
pub fn is_removable(s: &PlanarSet) -> bool {
    match analytic_capacity(s) {
        Capacity::Exact { value, .. } => value == 0.0,
        Capacity::Unsupported { lower_bound, .. } => lower_bound == 0.0,
    }
}

/// `z f(z)` for the disk competitor `f(z) = r / (z - c)` at `z = c + R e^{i theta}`;
/// tends to `f'(inf) = r` as `R -> inf`.
pub fn disk_competitor_probe(center: Complex64, radius: f64, probe_radius: f64, theta: f64) -> f64 {
    let z = center + Complex64::from_polar(probe_radius, theta);
    (z * radius / (z - center)).norm()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovabilityConfig {
    pub punctures: Vec<Complex64>,
    pub sample: Vec<Complex64>,
    pub test_fn: DiskFunction,
    /// Prefix sizes of the sample; empty means the whole sample once.
    pub sizes: Vec<usize>,
    pub tol: f64,
    pub opts: PickOptions,
    pub grid: GridSpec,
}

impl RemovabilityConfig {
    pub fn new(punctures: Vec<Complex64>, sample: Vec<Complex64>, test_fn: DiskFunction, tol: f64) -> Self {
        RemovabilityConfig {
            punctures,
            sample,
            test_fn,
            sizes: Vec::new(),
            tol,
            opts: PickOptions::default(),
            grid: GridSpec::default(),
        }
    }
}

/// Compares minimal multiplier norms of `test_fn` data on the punctured
/// domain `D \ E` (kernel induced by the inclusion) with the same data on
/// `D` (Szegő kernel). Each step records the punctured value against the
/// unpunctured oracle; PASS iff every gap is within `tol`.
pub fn removability_experiment(cfg: &RemovabilityConfig, exec: Exec) -> Result<ExperimentReport> {
    if cfg.sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(cfg.tol >= 0.0) {
        return Err(Error::NegativeTolerance(cfg.tol));
    }
    cfg.test_fn.validate()?;
    for &e in &cfg.punctures {
        if !e.re.is_finite() || !e.im.is_finite() || e.norm_sqr() >= 1.0 {
            return Err(Error::OutsideDisk { re: e.re, im: e.im });
        }
        if e == Complex64::new(0.0, 0.0) {
            return Err(Error::PunctureAtOrigin);
        }
        if cfg.sample.contains(&e) {
            return Err(Error::PunctureCollision { re: e.re, im: e.im });
        }
    }
    let sup = grid_sup(&cfg.test_fn, &cfg.grid, exec);
    if !(sup <= 1.0) {
        return Err(Error::EscapesDisk { name: cfg.test_fn.name(), modulus: sup });
    }

    let pts = PointSet::from_scalars(&cfg.sample)?;
    let values: Vec<Complex64> = cfg.sample.iter().map(|&z| cfg.test_fn.eval(z)).collect();
    let punctured = KernelSpec::Embedding(EmbeddingMap::inclusion(&cfg.sample, "origin")?);
    let whole = KernelSpec::Szego;

    let sizes = if cfg.sizes.is_empty() { vec![cfg.sample.len()] } else { cfg.sizes.clone() };
    if let Some(&bad) = sizes.iter().find(|&&n| n == 0 || n > cfg.sample.len()) {
        return Err(Error::Sample(format!("subsample size {bad} outside 1..={}", cfg.sample.len())));
    }
    let runs = exec.map(&sizes, |&n| -> Result<StepRecord> {
        let sub = pts.prefix(n);
        let data = values[..n].to_vec();
        let a = InterpolationProblem::scalar(punctured.clone(), sub.clone(), data.clone())?;
        let b = InterpolationProblem::scalar(whole.clone(), sub, data)?;
        let with_puncture = min_multiplier_norm_with(&a, cfg.opts)?.min_norm;
        let without = min_multiplier_norm_with(&b, cfg.opts)?.min_norm;
        Ok(StepRecord::new(n, with_puncture, without, Some(cfg.tol)))
    });
    let steps = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let bounded = steps.iter().all(|s| s.value <= 1.0 + cfg.opts.bracket_tol);
    let notes = vec![
        format!("punctures: {}", cfg.punctures.len()),
        format!("test function: {} (grid sup {sup:.6})", cfg.test_fn.name()),
    ];
    Ok(ExperimentReport::new("remove", steps, bounded, notes))
}
