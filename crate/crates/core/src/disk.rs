//! Function theory on the unit disk: pseudo-hyperbolic and Carathéodory
//! distances, Blaschke sums and products, and grid-based dominating-set
//! diagnostics for finite families of test functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

fn check_disk(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm_sqr() >= 1.0 {
        return Err(Error::OutsideDisk { re: z.re, im: z.im });
    }
    Ok(())
}

/// Disk automorphism `(alpha - z) / (1 - conj(alpha) z)`.
pub fn automorphism(alpha: Complex64, z: Complex64) -> Complex64 {
    (alpha - z) / (Complex64::new(1.0, 0.0) - alpha.conj() * z)
}

/// `|(z - w) / (1 - conj(w) z)|`.
pub fn mobius_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_disk(z)?;
    check_disk(w)?;
    if z == w {
        return Ok(0.0);
    }
    // Ratio of moduli rather than modulus of the quotient: both factors are
    // invariant under swapping z and w, so the distance is exactly symmetric.
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    Ok((num / den).min(1.0 - f64::EPSILON))
}

pub fn caratheodory_distance(z: Complex64, w: Complex64) -> Result<f64> {
    Ok(mobius_distance(z, w)?.atanh())
}

/// `a_n = 1 - c / n^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailModel {
    pub c: f64,
    pub p: f64,
}

impl TailModel {
    /// Moduli `a_1..a_count`. Terms with `c / n^p > 1` would have negative
    /// modulus and are skipped.
    pub fn moduli(&self, count: usize) -> Vec<f64> {
        (1..=count).map(|n| 1.0 - self.c / (n as f64).powf(self.p)).filter(|&a| (0.0..1.0).contains(&a)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskSample {
    points: Vec<Complex64>,
    tail_model: Option<TailModel>,
}

impl DiskSample {
    pub fn new(points: Vec<Complex64>, tail_model: Option<TailModel>) -> Result<Self> {
        for &z in &points {
            check_disk(z)?;
        }
        if let Some(t) = tail_model {
            if !(t.c > 0.0 && t.p > 0.0 && t.c.is_finite() && t.p.is_finite()) {
                return Err(Error::Sample(format!("tail model parameters must be positive, got c={}, p={}", t.c, t.p)));
            }
        }
        Ok(DiskSample { points, tail_model })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn tail_model(&self) -> Option<TailModel> {
        self.tail_model
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlaschkeClass {
    Divergent,
    Convergent,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSum {
    pub partial: f64,
    pub classification: BlaschkeClass,
}

/// `sum (1 - |a|)` over the listed points, with the tail classified by its
/// p-series exponent: divergent (a set of uniqueness) iff `p <= 1`.
pub fn blaschke_sum(s: &DiskSample) -> BlaschkeSum {
    let partial = s.points.iter().map(|a| 1.0 - a.norm()).sum();
    let classification = match s.tail_model {
        None => BlaschkeClass::Unknown,
        Some(t) if t.p <= 1.0 => BlaschkeClass::Divergent,
        Some(_) => BlaschkeClass::Convergent,
    };
    BlaschkeSum { partial, classification }
}

/// Finite Blaschke product `prod (a - z)/(1 - conj(a) z) * |a|/a`.
pub fn blaschke_product(zeros: &[Complex64], z: Complex64) -> Result<Complex64> {
    check_disk(z)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for &a in zeros {
        if a == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroInBlaschke);
        }
        check_disk(a)?;
        acc *= automorphism(a, z) * (a.norm() / a);
    }
    Ok(acc)
}

/// Bounded holomorphic test functions on the disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiskFunction {
    Identity,
    Constant {
        value: Complex64,
    },
    /// `sum c_k z^k`, lowest degree first.
    Polynomial {
        coeffs: Vec<Complex64>,
    },
    Blaschke {
        zeros: Vec<Complex64>,
    },
    /// `(z - a) / (1 - conj(a) z)`.
    Mobius {
        a: Complex64,
    },
}

impl DiskFunction {
    pub fn name(&self) -> String {
        match self {
            DiskFunction::Identity => "identity".into(),
            DiskFunction::Constant { value } => format!("constant({value})"),
            DiskFunction::Polynomial { coeffs } => format!("polynomial(degree {})", coeffs.len().saturating_sub(1)),
            DiskFunction::Blaschke { zeros } => format!("blaschke({} zeros)", zeros.len()),
            DiskFunction::Mobius { a } => format!("mobius({a})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            DiskFunction::Identity => Ok(()),
            DiskFunction::Constant { value } if finite(value) => Ok(()),
            DiskFunction::Polynomial { coeffs } if coeffs.iter().all(finite) => Ok(()),
            DiskFunction::Blaschke { zeros } => {
                for &a in zeros {
                    if a == Complex64::new(0.0, 0.0) {
                        return Err(Error::ZeroInBlaschke);
                    }
                    check_disk(a)?;
                }
                Ok(())
            }
            DiskFunction::Mobius { a } => check_disk(*a),
            _ => Err(Error::NonFinite { context: self.name() }),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            DiskFunction::Identity => z,
            DiskFunction::Constant { value } => *value,
            DiskFunction::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
            }
            DiskFunction::Blaschke { zeros } => {
                zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, &a| acc * automorphism(a, z) * (a.norm() / a))
            }
            DiskFunction::Mobius { a } => -automorphism(*a, z),
        }
    }
}

/// Polar evaluation grid: the centre plus `radial x angular` nodes at radii
/// `outer_radius * k / radial`, `k = 1..=radial`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
    pub outer_radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { radial: 200, angular: 256, outer_radius: 0.995 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial == 0 || self.angular == 0 || !(self.outer_radius > 0.0 && self.outer_radius < 1.0) {
            return Err(Error::Sample(format!(
                "grid needs radial, angular >= 1 and 0 < outer_radius < 1, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        1 + self.radial * self.angular
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: usize) -> Complex64 {
        if idx == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = (idx - 1) / self.angular + 1;
        let t = (idx - 1) % self.angular;
        let r = self.outer_radius * k as f64 / self.radial as f64;
        Complex64::from_polar(r, std::f64::consts::TAU * t as f64 / self.angular as f64)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// `max |f|` over the grid.
pub fn grid_sup(f: &DiskFunction, grid: &GridSpec, exec: Exec) -> f64 {
    exec.max_range(grid.len(), |i| f.eval(grid.point(i)).norm())
}

pub fn sample_sup(f: &DiskFunction, sample: &[Complex64]) -> f64 {
    sample.iter().map(|&z| f.eval(z).norm()).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominatingReport {
    /// Minimum of the per-function ratios.
    pub ratio: f64,
    /// `sup_A |f| / sup_grid |f|`, clipped to [0, 1], in family order.
    pub per_function: Vec<f64>,
}

/// Family-relative dominating diagnostic. A ratio below 1 means some test
/// function fails to reach its (grid) supremum on the sample; a ratio of 1
/// is only consistent with the sample being dominating.
pub fn dominating_ratio(
    sample: &DiskSample,
    fns: &[DiskFunction],
    grid: &GridSpec,
    exec: Exec,
) -> Result<DominatingReport> {
    if fns.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if sample.points.is_empty() {
        return Err(Error::EmptySample);
    }
    grid.validate()?;
    let mut per_function = Vec::with_capacity(fns.len());
    for f in fns {
        f.validate()?;
        let on_grid = grid_sup(f, grid, exec);
        let on_sample = sample_sup(f, &sample.points);
        let r = if on_grid == 0.0 { 1.0 } else { (on_sample / on_grid).clamp(0.0, 1.0) };
        per_function.push(r);
    }
    let ratio = per_function.iter().copied().fold(1.0, f64::min);
    Ok(DominatingReport { ratio, per_function })
}

/// `sup_f d_D(f(x_i), f(x_j))` over the family: a lower bound for the
/// Möbius pseudo-distance of the domain. Each member must map the grid into
/// the closed unit disk.
pub fn dx_lower_bound(pts: &[Complex64], fns: &[DiskFunction], grid: &GridSpec, exec: Exec) -> Result<Vec<Vec<f64>>> {
    if fns.is_empty() {
        return Err(Error::EmptyFamily);
    }
    grid.validate()?;
    for &z in pts {
        check_disk(z)?;
    }
    let mut images = Vec::with_capacity(fns.len());
    for f in fns {
        f.validate()?;
        let sup = grid_sup(f, grid, exec);
        if !(sup <= 1.0) {
            return Err(Error::EscapesDisk { name: f.name(), modulus: sup });
        }
        let vals: Vec<Complex64> = pts.iter().map(|&z| f.eval(z)).collect();
        if let Some(v) = vals.iter().find(|v| v.norm_sqr() >= 1.0) {
            return Err(Error::EscapesDisk { name: f.name(), modulus: v.norm() });
        }
        images.push(vals);
    }
    let n = pts.len();
    let rows = exec.map_range(n, |i| {
        (0..n)
            .map(|j| images.iter().try_fold(0.0_f64, |acc, vals| Ok(acc.max(mobius_distance(vals[i], vals[j])?))))
            .collect::<Result<Vec<f64>>>()
    });
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_examples() {
        assert!((mobius_distance(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mobius_distance(c(0.3, 0.2), c(0.3, 0.2)).unwrap(), 0.0);
        assert!((mobius_distance(c(0.5, 0.0), c(-0.5, 0.0)).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(mobius_distance(c(1.0, 0.0), c(0.0, 0.0)), Err(Error::OutsideDisk { .. })));
    }

    #[test]
    fn caratheodory_examples() {
        assert_eq!(caratheodory_distance(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        assert!((caratheodory_distance(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-12);
        assert!(
            caratheodory_distance(c(0.9, 0.0), c(0.0, 0.0)).unwrap()
                > caratheodory_distance(c(0.5, 0.0), c(0.0, 0.0)).unwrap()
        );
    }

    #[test]
    fn blaschke_sum_examples() {
        let pts: Vec<_> = (1..=3).map(|n| c(1.0 - 1.0 / (n * n) as f64, 0.0)).collect();
        let s = DiskSample::new(pts, None).unwrap();
        let b = blaschke_sum(&s);
        assert!((b.partial - 49.0 / 36.0).abs() < 1e-15);
        assert_eq!(b.classification, BlaschkeClass::Unknown);
        let tail = |p| DiskSample::new(vec![], Some(TailModel { c: 1.0, p })).unwrap();
        assert_eq!(blaschke_sum(&tail(1.0)).classification, BlaschkeClass::Divergent);
        assert_eq!(blaschke_sum(&tail(2.0)).classification, BlaschkeClass::Convergent);
        assert!(DiskSample::new(vec![], Some(TailModel { c: -1.0, p: 1.0 })).is_err());
    }

    #[test]
    fn blaschke_product_examples() {
        assert!((blaschke_product(&[c(0.5, 0.0)], c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(blaschke_product(&[c(0.3, 0.4), c(0.5, 0.0)], c(0.3, 0.4)).unwrap(), c(0.0, 0.0));
        let v = blaschke_product(&[c(0.5, 0.0), c(0.0, 0.5)], c(0.0, 0.0)).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(blaschke_product(&[c(0.0, 0.0)], c(0.1, 0.0)), Err(Error::ZeroInBlaschke));
    }

    #[test]
    fn dominating_examples() {
        let grid = GridSpec { radial: 20, angular: 32, outer_radius: 0.99 };
        let sample = DiskSample::new(grid.points(), None).unwrap();
        let r = dominating_ratio(&sample, &[DiskFunction::Identity], &grid, Exec::Sequential).unwrap();
        assert_eq!(r.ratio, 1.0);

        let origin = DiskSample::new(vec![c(0.0, 0.0)], None).unwrap();
        let r = dominating_ratio(&origin, &[DiskFunction::Identity], &grid, Exec::Parallel).unwrap();
        assert_eq!(r.ratio, 0.0);

        assert_eq!(dominating_ratio(&origin, &[], &grid, Exec::Parallel), Err(Error::EmptyFamily));
    }

    #[test]
    fn circle_sample_squared() {
        let circle: Vec<_> =
            (0..1000).map(|k| Complex64::from_polar(0.99, std::f64::consts::TAU * k as f64 / 1000.0)).collect();
        let sample = DiskSample::new(circle, None).unwrap();
        let sq = DiskFunction::Polynomial { coeffs: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] };
        let grid = GridSpec::default();
        let r = dominating_ratio(&sample, &[sq], &grid, Exec::Parallel).unwrap();
        assert!((r.ratio - 0.9801 / (0.995 * 0.995)).abs() < 1e-12);
    }

    #[test]
    fn dx_examples() {
        let grid = GridSpec { radial: 10, angular: 16, outer_radius: 0.99 };
        let pts = [c(0.0, 0.0), c(0.5, 0.0)];
        let m = dx_lower_bound(&pts, &[DiskFunction::Identity], &grid, Exec::Sequential).unwrap();
        assert!((m[0][1] - 0.5).abs() < 1e-15);
        let zero = DiskFunction::Constant { value: c(0.0, 0.0) };
        let m = dx_lower_bound(&pts, &[zero], &grid, Exec::Sequential).unwrap();
        assert_eq!(m[0][1], 0.0);
        let sq = DiskFunction::Polynomial { coeffs: vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)] };
        let m = dx_lower_bound(&pts, &[sq], &grid, Exec::Sequential).unwrap();
        assert!((m[0][1] - 0.25).abs() < 1e-15);

        let big = DiskFunction::Polynomial { coeffs: vec![c(0.0, 0.0), c(2.0, 0.0)] };
        assert!(matches!(dx_lower_bound(&pts, &[big], &grid, Exec::Sequential), Err(Error::EscapesDisk { .. })));
    }

    #[test]
    fn function_eval() {
        let z = c(0.3, -0.2);
        assert_eq!(DiskFunction::Identity.eval(z), z);
        let m = DiskFunction::Mobius { a: c(0.2, 0.0) };
        let want = (z - 0.2) / (c(1.0, 0.0) - 0.2 * z);
        assert!((m.eval(z) - want).norm() < 1e-15);
        let p = DiskFunction::Polynomial { coeffs: vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0)] };
        assert!((p.eval(z) - (c(1.0, 0.0) + c(0.0, 2.0) * z + 3.0 * z * z)).norm() < 1e-15);
    }
}
