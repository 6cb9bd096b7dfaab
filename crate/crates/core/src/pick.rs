//! Pick matrices, interpolation feasibility, minimal multiplier norms and the
//! two-point extremal problem.
//!
//! The scaled Pick matrix has blocks `(t^2 I - W_i W_j*) k(x_i, x_j)`. Its
//! positivity is upward-closed in `t`, so the least feasible `t` is found by
//! bisection with an eigenvalue sign test.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kernels::{gram, normalize, KernelSpec, PointSet};
use crate::linalg::{is_psd, min_eigenvalue, psd_threshold, spectral_norm, HermitianMatrix, DEFAULT_PSD_TOL};

pub const DEFAULT_BRACKET_TOL: f64 = 1e-9;

/// Relative threshold of the eigenvalue sign test used inside bisection.
/// Much tighter than [`DEFAULT_PSD_TOL`]: a looser threshold shifts the
/// located boundary by `threshold / slope`, which at 1e-9 is already ~1e-8.
pub const BISECTION_PSD_TOL: f64 = 1e-12;

/// Bracket growth stops once `upper - lower` would exceed this.
pub const MAX_BRACKET_SPAN: f64 = 1048576.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Scalar(Vec<Complex64>),
    /// `order x order` blocks, one per point.
    Block {
        order: usize,
        blocks: Vec<DMatrix<Complex64>>,
    },
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Scalar(v) => v.len(),
            Targets::Block { blocks, .. } => blocks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_order(&self) -> usize {
        match self {
            Targets::Scalar(_) => 1,
            Targets::Block { order, .. } => *order,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            Targets::Scalar(v) => {
                if !v.iter().all(finite) {
                    return Err(Error::NonFinite { context: "targets".into() });
                }
            }
            Targets::Block { order, blocks } => {
                if *order == 0 {
                    return Err(Error::Targets("block order must be at least 1".into()));
                }
                for (i, b) in blocks.iter().enumerate() {
                    if b.nrows() != *order || b.ncols() != *order {
                        return Err(Error::Targets(format!(
                            "block {i} is {}x{}, expected {order}x{order}",
                            b.nrows(),
                            b.ncols()
                        )));
                    }
                    if !b.iter().all(finite) {
                        return Err(Error::NonFinite { context: format!("target block {i}") });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationProblem {
    pub spec: KernelSpec,
    pub pts: PointSet,
    pub targets: Targets,
}

impl InterpolationProblem {
    pub fn new(spec: KernelSpec, pts: PointSet, targets: Targets) -> Result<Self> {
        targets.validate()?;
        if targets.len() != pts.len() {
            return Err(Error::Targets(format!("{} targets for {} points", targets.len(), pts.len())));
        }
        Ok(InterpolationProblem { spec, pts, targets })
    }

    pub fn scalar(spec: KernelSpec, pts: PointSet, values: Vec<Complex64>) -> Result<Self> {
        Self::new(spec, pts, Targets::Scalar(values))
    }

    /// Keeps the points (and targets) listed in `idx`.
    pub fn restrict(&self, idx: &[usize]) -> InterpolationProblem {
        let targets = match &self.targets {
            Targets::Scalar(v) => Targets::Scalar(idx.iter().map(|&i| v[i]).collect()),
            Targets::Block { order, blocks } => {
                Targets::Block { order: *order, blocks: idx.iter().map(|&i| blocks[i].clone()).collect() }
            }
        };
        InterpolationProblem { spec: self.spec.clone(), pts: self.pts.subset(idx), targets }
    }
}

/// Tolerances for [`min_multiplier_norm_with`] and [`extremal_value_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PickOptions {
    /// Final bracket width.
    pub bracket_tol: f64,
    /// Relative threshold of the sign test at each bisection step.
    pub psd_tol: f64,
}

impl Default for PickOptions {
    fn default() -> Self {
        PickOptions { bracket_tol: DEFAULT_BRACKET_TOL, psd_tol: BISECTION_PSD_TOL }
    }
}

impl PickOptions {
    pub fn with_bracket(bracket_tol: f64) -> Self {
        PickOptions { bracket_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.bracket_tol > 0.0) {
            return Err(Error::NegativeTolerance(self.bracket_tol));
        }
        if !(self.psd_tol >= 0.0) {
            return Err(Error::NegativeTolerance(self.psd_tol));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PickResult {
    pub feasible: bool,
    pub min_norm: f64,
    /// Minimum eigenvalue of the Pick matrix at `min_norm`.
    pub certificate: f64,
    pub iterations: usize,
    /// `max_i ||W_i||`, where bisection starts.
    pub lower_seed: f64,
}

/// Gram matrix plus targets, assembled once and rescaled per `t`.
struct PickAssembly {
    gram: HermitianMatrix,
    targets: Targets,
}

impl PickAssembly {
    fn new(p: &InterpolationProblem) -> Result<Self> {
        p.targets.validate()?;
        if p.targets.len() != p.pts.len() {
            return Err(Error::Targets(format!("{} targets for {} points", p.targets.len(), p.pts.len())));
        }
        Ok(PickAssembly { gram: gram(&p.spec, &p.pts)?, targets: p.targets.clone() })
    }

    fn matrix(&self, t: f64) -> Result<HermitianMatrix> {
        let t2 = Complex64::new(t * t, 0.0);
        match &self.targets {
            Targets::Scalar(w) => {
                HermitianMatrix::from_upper_fn(w.len(), |i, j| (t2 - w[i] * w[j].conj()) * self.gram.get(i, j))
            }
            Targets::Block { order: m, blocks } => {
                let n = blocks.len();
                // W_i W_j* for i <= j; block (j, i) is the adjoint of block (i, j).
                let mut data = DMatrix::zeros(m * n, m * n);
                for i in 0..n {
                    for j in i..n {
                        let k = self.gram.get(i, j);
                        let ww = &blocks[i] * blocks[j].adjoint();
                        for a in 0..*m {
                            for b in 0..*m {
                                let delta = if a == b { t2 } else { Complex64::new(0.0, 0.0) };
                                let v = (delta - ww[(a, b)]) * k;
                                data[(i * m + a, j * m + b)] = v;
                                data[(j * m + b, i * m + a)] = v.conj();
                            }
                        }
                    }
                }
                HermitianMatrix::new(data)
            }
        }
    }

    fn lower_seed(&self) -> Result<f64> {
        match &self.targets {
            Targets::Scalar(w) => Ok(w.iter().map(|z| z.norm()).fold(0.0, f64::max)),
            Targets::Block { blocks, .. } => blocks.iter().try_fold(0.0_f64, |acc, b| Ok(acc.max(spectral_norm(b)?))),
        }
    }

    fn sign_test(&self, t: f64, psd_tol: f64) -> Result<(bool, f64)> {
        let h = self.matrix(t)?;
        let lmin = min_eigenvalue(&h)?;
        Ok((lmin >= -psd_threshold(&h, psd_tol), lmin))
    }
}

/// Pick matrix of `p` scaled by `t`; at `t = 1` this is the interpolation
/// feasibility matrix.
pub fn pick_matrix(p: &InterpolationProblem, t: f64) -> Result<HermitianMatrix> {
    if !(t >= 0.0) {
        return Err(Error::Targets(format!("scale t must be non-negative, got {t}")));
    }
    PickAssembly::new(p)?.matrix(t)
}

/// Positivity of the unscaled Pick matrix within `tol`.
pub fn is_solvable(p: &InterpolationProblem, tol: f64) -> Result<bool> {
    is_psd(&pick_matrix(p, 1.0)?, tol)
}

/// Least `t` making the scaled Pick matrix PSD, to bracket width `tol`.
pub fn min_multiplier_norm(p: &InterpolationProblem, tol: f64) -> Result<PickResult> {
    min_multiplier_norm_with(p, PickOptions::with_bracket(tol))
}

pub fn min_multiplier_norm_with(p: &InterpolationProblem, opts: PickOptions) -> Result<PickResult> {
    opts.validate()?;
    if p.pts.is_empty() {
        return Err(Error::EmptyProblem);
    }
    let asm = PickAssembly::new(p)?;
    let lower_seed = asm.lower_seed()?;
    let finish = |t: f64, cert: f64, iterations: usize| PickResult {
        feasible: t <= 1.0 + opts.bracket_tol,
        min_norm: t,
        certificate: cert,
        iterations,
        lower_seed,
    };

    let (ok, cert) = asm.sign_test(lower_seed, opts.psd_tol)?;
    if ok {
        return Ok(finish(lower_seed, cert, 0));
    }
    let mut lo = lower_seed;
    let mut span = 1.0;
    let (mut hi, mut hi_cert) = loop {
        let t = lower_seed + span;
        let (ok, cert) = asm.sign_test(t, opts.psd_tol)?;
        if ok {
            break (t, cert);
        }
        lo = t;
        span *= 2.0;
        if span > MAX_BRACKET_SPAN {
            return Err(Error::UnboundedBracket { upper: lower_seed + MAX_BRACKET_SPAN });
        }
    };
    let mut iterations = 0;
    while hi - lo > opts.bracket_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let (ok, cert) = asm.sign_test(mid, opts.psd_tol)?;
        if ok {
            hi = mid;
            hi_cert = cert;
        } else {
            lo = mid;
        }
    }
    log::debug!("min_multiplier_norm: t* = {hi} after {iterations} bisection steps");
    Ok(finish(hi, hi_cert, iterations))
}

/// Independent problems solved under one execution strategy; results are in
/// input order.
pub fn min_multiplier_norms(
    problems: &[InterpolationProblem],
    opts: PickOptions,
    exec: Exec,
) -> Vec<Result<PickResult>> {
    exec.map(problems, |p| min_multiplier_norm_with(p, opts))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalResult {
    /// Largest `c` with the two-point problem `(base -> 0, x -> c)` solvable.
    pub value: f64,
    /// `sqrt(1 - 1/k_base(x, x))`.
    pub closed_form: f64,
    pub gap: f64,
    /// Minimum eigenvalue of the two-point Pick matrix at `value`; vanishes
    /// at the true optimum.
    pub boundary_min_eigenvalue: f64,
    pub iterations: usize,
}

/// Extremal value `sup { Re phi(x) : ||phi||_Mult <= 1, phi(base) = 0 }`
/// computed from the kernel normalized at `base`.
pub fn extremal_value(spec: &KernelSpec, pts: &PointSet, base: usize, x: usize, tol: f64) -> Result<ExtremalResult> {
    extremal_value_with(spec, pts, base, x, PickOptions::with_bracket(tol))
}

pub fn extremal_value_with(
    spec: &KernelSpec,
    pts: &PointSet,
    base: usize,
    x: usize,
    opts: PickOptions,
) -> Result<ExtremalResult> {
    opts.validate()?;
    if base >= pts.len() || x >= pts.len() {
        return Err(Error::UnknownPoint(format!("index {}", base.max(x))));
    }
    if base == x {
        return Err(Error::DegenerateExtremal);
    }
    let kb = normalize(spec, pts, base)?;
    let two = kb.principal(&[base, x]);
    let kxx = two.get(1, 1).re;
    let closed_form = (1.0 - 1.0 / kxx).max(0.0).sqrt();

    let asm_at = |c: f64| PickAssembly {
        gram: two.clone(),
        targets: Targets::Scalar(vec![Complex64::new(0.0, 0.0), Complex64::new(c, 0.0)]),
    };
    let test = |c: f64| asm_at(c).sign_test(1.0, opts.psd_tol);

    // Feasible set in c is [0, c*]; c = 0 is the Gram matrix itself. The
    // certificate grows like k_base(x, x) * (c* - c), so near the boundary of
    // the ball the bracket alone does not make the located matrix singular
    // to `bracket_tol`; keep halving until it is (or the bracket collapses).
    let (mut lo, mut lo_cert) = (0.0, test(0.0)?.1);
    let mut hi = 1.0;
    let mut iterations = 0;
    while hi - lo > opts.bracket_tol || lo_cert.abs() > opts.bracket_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let (ok, cert) = test(mid)?;
        if ok {
            lo = mid;
            lo_cert = cert;
        } else {
            hi = mid;
        }
    }
    Ok(ExtremalResult {
        value: lo,
        closed_form,
        gap: (lo - closed_form).abs(),
        boundary_min_eigenvalue: lo_cert,
        iterations,
    })
}

/// Minimum eigenvalue of `[(1 - v_i conj(v_j)) k(x_i, x_j)]`.
pub fn contractivity_certificate(spec: &KernelSpec, pts: &PointSet, values: &[Complex64]) -> Result<f64> {
    let p = InterpolationProblem::scalar(spec.clone(), pts.clone(), values.to_vec())?;
    min_eigenvalue(&pick_matrix(&p, 1.0)?)
}

/// Whether the sampled function `x_i -> values[i]` passes the contractive
/// multiplier test on the sample (PSD to [`DEFAULT_PSD_TOL`]).
pub fn is_contractive_multiplier(spec: &KernelSpec, pts: &PointSet, values: &[Complex64]) -> Result<bool> {
    let p = InterpolationProblem::scalar(spec.clone(), pts.clone(), values.to_vec())?;
    is_psd(&pick_matrix(&p, 1.0)?, DEFAULT_PSD_TOL)
}
