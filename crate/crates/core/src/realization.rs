//! Finite-sample Drury–Arveson realizations.
//!
//! A kernel normalized at `base` is CNP on the sample iff
//! `F(x, y) = 1 - 1/k_base(x, y)` is PSD; factoring `F = B B*` gives rows
//! `b(x)` in the unit ball of C^d with `k_base(x, y) = 1 / (1 - <b(x), b(y)>)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{inner, normalize, szego, KernelSpec, PointSet};
use crate::linalg::{low_rank_factor, psd_threshold, HermitianMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingRealization {
    /// Sample rank of `F`; a lower bound for the embedding dimension of the whole space.
    pub d: usize,
    /// One row per sample point.
    pub b: Vec<Vec<Complex64>>,
    pub base: usize,
    /// `max |k_base(x,y) - 1/(1 - <b(x), b(y)>)|`.
    pub reconstruction_error: f64,
    /// Eigenvalues of `F`, descending.
    pub spectrum: Vec<f64>,
}

impl EmbeddingRealization {
    pub fn norms(&self) -> Vec<f64> {
        self.b.iter().map(|row| inner(row, row).re.sqrt()).collect()
    }
}

pub fn realize(spec: &KernelSpec, pts: &PointSet, base: usize, tol: f64) -> Result<EmbeddingRealization> {
    let kb = normalize(spec, pts, base)?;
    let n = kb.order();
    let one = Complex64::new(1.0, 0.0);
    let f = HermitianMatrix::from_upper_fn(n, |i, j| one - kb.get(i, j).inv())?;
    let factor = match low_rank_factor(&f, tol) {
        Ok(fac) => fac,
        Err(Error::NotPsd { min_eigenvalue }) => return Err(Error::NotCnp { min_eigenvalue }),
        Err(e) => return Err(e),
    };
    let d = factor.rank;
    if let Some(s) = factor.spectrum.get(d) {
        if *s > 0.0 && *s > 0.1 * psd_threshold(&f, tol) {
            log::debug!("realize: borderline rank, first dropped eigenvalue {s:e}");
        }
    }
    let mut b: Vec<Vec<Complex64>> = (0..n).map(|i| factor.factor.row(i).iter().copied().collect()).collect();

    // F vanishes on the base row, so b(base) is zero up to eigensolver noise;
    // snap it to exactly zero once that has been confirmed.
    let base_norm = inner(&b[base], &b[base]).re.sqrt();
    if base_norm > 1e-10 {
        return Err(Error::Embedding(format!("b(base) has norm {base_norm:e}, expected 0")));
    }
    b[base].fill(Complex64::new(0.0, 0.0));
    let mut scale = 0.0_f64;
    let mut reconstruction_error = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let k = kb.get(i, j);
            scale = scale.max(k.norm());
            let rebuilt = (one - inner(&b[i], &b[j])).inv();
            reconstruction_error = reconstruction_error.max((k - rebuilt).norm());
        }
    }
    if b.iter().any(|row| inner(row, row).re >= 1.0) {
        return Err(Error::Embedding("a realized point left the open unit ball".into()));
    }
    log::debug!("realize: d = {d}, reconstruction error {reconstruction_error:e} (scale {scale:e})");
    Ok(EmbeddingRealization { d, b, base, reconstruction_error, spectrum: factor.spectrum })
}

/// Largest deviation between the kernel normalized at `base` and the Szegő
/// kernel of the disk images `j`. Zero (to rounding) exactly when composition
/// with `j` is unitary from H^2 onto the sample's span.
pub fn verify_unitary_gram(spec: &KernelSpec, pts: &PointSet, base: usize, j: &[Complex64]) -> Result<f64> {
    if j.len() != pts.len() {
        return Err(Error::Embedding(format!("{} images for {} points", j.len(), pts.len())));
    }
    if let Some(z) = j.iter().find(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm_sqr() >= 1.0) {
        return Err(Error::OutsideDisk { re: z.re, im: z.im });
    }
    if base >= j.len() || j[base] != Complex64::new(0.0, 0.0) {
        return Err(Error::Embedding("the base point must be sent to 0".into()));
    }
    for a in 0..j.len() {
        for c in 0..a {
            if j[a] == j[c] {
                return Err(Error::Embedding(format!("not injective: {} and {}", pts.id(c), pts.id(a))));
            }
        }
    }
    let kb = normalize(spec, pts, base)?;
    let mut dev = 0.0_f64;
    for a in 0..j.len() {
        for c in a..j.len() {
            dev = dev.max((kb.get(a, c) - szego(j[a], j[c])).norm());
        }
    }
    Ok(dev)
}

/// Values of `x -> <b(x), xi>` on the sample.
pub fn xi_multiplier_values(r: &EmbeddingRealization, xi: &[Complex64]) -> Result<Vec<Complex64>> {
    if xi.len() != r.d {
        return Err(Error::Dimension(format!("xi has length {}, realization has d = {}", xi.len(), r.d)));
    }
    let norm = inner(xi, xi).re.sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitXi { norm });
    }
    Ok(r.b.iter().map(|row| inner(row, xi)).collect())
}

/// Disk coordinate `j(x) = <b(x), b(lambda)/||b(lambda)||>`. For a rank-one
/// realization this recovers the embedding with `k = 1/(1 - j(x) conj(j(y)))`.
pub fn disk_embedding(r: &EmbeddingRealization, lambda: usize) -> Result<Vec<Complex64>> {
    if lambda >= r.b.len() || lambda == r.base {
        return Err(Error::Embedding("lambda must be a sample point other than the base".into()));
    }
    let bl = &r.b[lambda];
    let nl = inner(bl, bl).re.sqrt();
    if nl == 0.0 {
        return Err(Error::Embedding("b(lambda) vanishes".into()));
    }
    let unit: Vec<Complex64> = bl.iter().map(|z| z / nl).collect();
    xi_multiplier_values(r, &unit)
}

/// `t^4/4 - t^3 + t^2/2 + t + 1/4`, nondecreasing on [0, 1] with `g(1) = 1`.
pub fn g_poly(t: f64) -> f64 {
    (((0.25 * t - 1.0) * t + 0.5) * t + 1.0) * t + 0.25
}
