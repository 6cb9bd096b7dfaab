//! Typed payloads for each instance kind, and their conversion into
//! `cnp-core` values. The JSON schema has already been checked by the time
//! these are deserialized; conversion adds the semantic checks.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use cnp_core::capacity::Component;
use cnp_core::disk::{DiskFunction, GridSpec, TailModel};
use cnp_core::kernels::{EmbeddingMap, GramKernel, KernelSpec, PointSet};
use cnp_core::linalg::HermitianMatrix;
use cnp_core::nalgebra::DMatrix;
use cnp_core::pick::Targets;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelPayload {
    Szego,
    DruryArveson { d: usize },
    Embedding { base: String, images: BTreeMap<String, Complex64> },
    Gram { ids: Option<Vec<String>>, matrix: Vec<Vec<Complex64>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PointsPayload {
    Scalars(Vec<Complex64>),
    Vectors(Vec<Vec<Complex64>>),
    Ids(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Index(usize),
    Id(String),
}

impl PointRef {
    pub fn resolve(&self, pts: &PointSet) -> Result<usize> {
        match self {
            PointRef::Index(i) if *i < pts.len() => Ok(*i),
            PointRef::Index(i) => Err(CliError::Invalid(format!("point index {i} out of range (n = {})", pts.len()))),
            PointRef::Id(id) => Ok(pts.index_of(id)?),
        }
    }
}

/// Kernel plus the finite sample it is evaluated on.
pub fn build_sample(
    kernel: &KernelPayload,
    points: Option<&PointsPayload>,
    ids: Option<&[String]>,
) -> Result<(KernelSpec, PointSet)> {
    let labelled = |coords: Vec<Vec<Complex64>>| -> Result<PointSet> {
        match ids {
            Some(ids) => Ok(PointSet::new(ids.to_vec(), coords)?),
            None => Ok(PointSet::from_vectors(coords)?),
        }
    };
    let need = |what: &str| CliError::Invalid(format!("kernel {what} needs `points`"));
    match kernel {
        KernelPayload::Szego => {
            let coords = match points.ok_or_else(|| need("szego"))? {
                PointsPayload::Scalars(zs) => zs.iter().map(|&z| vec![z]).collect(),
                PointsPayload::Vectors(vs) if vs.iter().all(|v| v.len() == 1) => vs.clone(),
                _ => return Err(CliError::Invalid("szego points must be complex numbers [re, im]".into())),
            };
            Ok((KernelSpec::Szego, labelled(coords)?))
        }
        KernelPayload::DruryArveson { d } => {
            let spec = KernelSpec::drury_arveson(*d)?;
            let coords = match points.ok_or_else(|| need("drury-arveson"))? {
                PointsPayload::Vectors(vs) => vs.clone(),
                PointsPayload::Scalars(zs) if *d == 1 => zs.iter().map(|&z| vec![z]).collect(),
                _ => return Err(CliError::Invalid(format!("drury-arveson points must be vectors of length {d}"))),
            };
            if let Some(v) = coords.iter().find(|v| v.len() != *d) {
                return Err(CliError::Invalid(format!("point of length {} for drury-arveson d = {d}", v.len())));
            }
            Ok((spec, labelled(coords)?))
        }
        KernelPayload::Embedding { base, images } => {
            let map = EmbeddingMap::new(images.clone(), base.clone())?;
            let pts = id_points(points, images.keys().cloned().collect())?;
            Ok((KernelSpec::Embedding(map), pts))
        }
        KernelPayload::Gram { ids: gram_ids, matrix } => {
            let labels: Vec<String> = match gram_ids {
                Some(v) => v.clone(),
                None => (0..matrix.len()).map(|i| format!("p{i}")).collect(),
            };
            let kernel = GramKernel::new(labels.clone(), HermitianMatrix::from_rows(matrix)?)?;
            let pts = id_points(points, labels)?;
            Ok((KernelSpec::Gram(kernel), pts))
        }
    }
}

fn id_points(points: Option<&PointsPayload>, all: Vec<String>) -> Result<PointSet> {
    match points {
        None => Ok(PointSet::from_ids(all)?),
        Some(PointsPayload::Ids(ids)) => Ok(PointSet::from_ids(ids.clone())?),
        Some(PointsPayload::Scalars(v)) if v.is_empty() => Ok(PointSet::from_ids(Vec::<String>::new())?),
        Some(_) => Err(CliError::Invalid("embedding and gram kernels take point ids, not coordinates".into())),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TargetsPayload {
    Scalar(Vec<Complex64>),
    Block(Vec<Vec<Vec<Complex64>>>),
}

impl TargetsPayload {
    pub fn into_targets(self) -> Result<Targets> {
        match self {
            TargetsPayload::Scalar(v) => Ok(Targets::Scalar(v)),
            TargetsPayload::Block(blocks) => {
                let order = blocks.first().map_or(1, Vec::len);
                let blocks = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| block_matrix(rows, order, i))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Targets::Block { order, blocks })
            }
        }
    }
}

fn block_matrix(rows: &[Vec<Complex64>], order: usize, index: usize) -> Result<DMatrix<Complex64>> {
    if rows.len() != order || rows.iter().any(|r| r.len() != order) {
        return Err(CliError::Invalid(format!("target block {index} is not {order}x{order}")));
    }
    Ok(DMatrix::from_fn(order, order, |a, b| rows[a][b]))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickPayload {
    pub kernel: KernelPayload,
    pub points: Option<PointsPayload>,
    pub ids: Option<Vec<String>>,
    pub targets: TargetsPayload,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalPayload {
    pub kernel: KernelPayload,
    pub points: Option<PointsPayload>,
    pub ids: Option<Vec<String>>,
    pub base: PointRef,
    pub x: PointRef,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DkPayload {
    pub kernel: KernelPayload,
    pub points: Option<PointsPayload>,
    pub ids: Option<Vec<String>>,
    pub pairs: Option<Vec<(PointRef, PointRef)>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedPayload {
    pub kernel: KernelPayload,
    pub points: Option<PointsPayload>,
    pub ids: Option<Vec<String>>,
    pub base: PointRef,
    pub tol: Option<f64>,
    pub xi: Option<Vec<Complex64>>,
    pub lambda: Option<PointRef>,
    pub disk_images: Option<Vec<Complex64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominatePayload {
    pub sample: SampleSpec,
    pub functions: Vec<DiskFunction>,
    pub grid: Option<GridSpec>,
    pub pairwise: Option<Vec<Complex64>>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkePayload {
    pub zeros: Vec<Complex64>,
    pub points: Option<Vec<Complex64>>,
    pub tail_model: Option<TailModel>,
    pub grid: Option<GridSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityPayload {
    pub components: Vec<Component>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemovePayload {
    pub punctures: Vec<Complex64>,
    pub sample: SampleSpec,
    pub function: DiskFunction,
    pub sizes: Option<SizesSpec>,
    pub tol: Option<f64>,
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakHardyPayload {
    pub kernel: Option<KernelPayload>,
    pub sample: Option<SampleSpec>,
    pub function: DiskFunction,
    pub sizes: SizesSpec,
    pub tol: Option<f64>,
    pub bracket_tol: Option<f64>,
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SizesSpec {
    List(Vec<usize>),
    Range {
        from: usize,
        to: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl SizesSpec {
    pub fn expand(&self) -> Result<Vec<usize>> {
        match self {
            SizesSpec::List(v) => Ok(v.clone()),
            SizesSpec::Range { from, to, step } => {
                if from > to || *step == 0 {
                    return Err(CliError::Invalid(format!("empty size range {from}..={to} step {step}")));
                }
                let mut v: Vec<usize> = (*from..=*to).step_by(*step).collect();
                if v.last() != Some(to) {
                    v.push(*to);
                }
                Ok(v)
            }
        }
    }
}

/// Finite samples of the disk, generated deterministically.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SampleSpec {
    Points {
        points: Vec<Complex64>,
    },
    Grid {
        radial: usize,
        angular: usize,
        outer_radius: f64,
    },
    Circle {
        n: usize,
        radius: f64,
    },
    /// `rings` circles evenly spaced in `[inner, outer]`, `angular` points
    /// each, consecutive rings rotated by `1/rings` of the angular step.
    Annulus {
        inner: f64,
        outer: f64,
        rings: usize,
        angular: usize,
    },
    /// Uniform in the disk of radius `rmax`.
    Random {
        n: usize,
        rmax: f64,
        seed: Option<u64>,
    },
}

impl SampleSpec {
    /// Whether the sample draws random numbers (and so records a seed).
    pub fn is_random(&self) -> bool {
        matches!(self, SampleSpec::Random { .. })
    }

    /// The seed a random sample will use: its own, else `fallback`.
    pub fn seed(&self, fallback: u64) -> u64 {
        match self {
            SampleSpec::Random { seed: Some(s), .. } => *s,
            _ => fallback,
        }
    }

    pub fn generate(&self, fallback_seed: u64) -> Result<Vec<Complex64>> {
        let pts = match *self {
            SampleSpec::Points { ref points } => points.clone(),
            SampleSpec::Grid { radial, angular, outer_radius } => {
                let g = GridSpec { radial, angular, outer_radius };
                g.validate()?;
                g.points()
            }
            SampleSpec::Circle { n, radius } => {
                (0..n).map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64)).collect()
            }
            SampleSpec::Annulus { inner, outer, rings, angular } => {
                if !(inner <= outer) || rings == 0 || angular == 0 {
                    return Err(CliError::Invalid(format!(
                        "annulus needs inner <= outer and positive counts, got {inner}..{outer}, {rings}x{angular}"
                    )));
                }
                let mut v = Vec::with_capacity(rings * angular);
                for k in 0..rings {
                    let r = if rings == 1 { outer } else { inner + (outer - inner) * k as f64 / (rings - 1) as f64 };
                    let shift = k as f64 / rings as f64;
                    v.extend((0..angular).map(|t| Complex64::from_polar(r, TAU * (t as f64 + shift) / angular as f64)));
                }
                v
            }
            SampleSpec::Random { n, rmax, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed(fallback_seed));
                (0..n)
                    .map(|_| {
                        let r = rmax * rng.gen::<f64>().sqrt();
                        Complex64::from_polar(r, rng.gen_range(0.0..TAU))
                    })
                    .collect()
            }
        };
        if let Some(z) = pts.iter().find(|z| !(z.norm_sqr() < 1.0)) {
            return Err(CliError::Core(cnp_core::Error::OutsideDisk { re: z.re, im: z.im }));
        }
        Ok(pts)
    }
}
