#![allow(dead_code)]

use cnp_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Point in the open disk of radius `rmax`.
pub fn disk_point(rmax: f64) -> impl Strategy<Value = Complex64> {
    (0.0..rmax, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// `n` distinct points (distinctness up to 1e-3 in modulus of the difference).
pub fn distinct_disk_points(n: std::ops::Range<usize>, rmax: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(disk_point(rmax), n)
        .prop_filter("points too close", |v| (0..v.len()).all(|i| (0..i).all(|j| (v[i] - v[j]).norm() > 1e-3)))
}

pub fn rand_disk<R: Rng>(rng: &mut R, rmax: f64) -> Complex64 {
    let r = rmax * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Uniform-ish point of the ball of radius `rmax` in C^d.
pub fn rand_ball<R: Rng>(rng: &mut R, d: usize, rmax: f64) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let r = rmax * rng.gen::<f64>().powf(1.0 / (2 * d) as f64);
    v.into_iter().map(|z| z * (r / norm)).collect()
}

pub fn rand_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Pseudo-hyperbolic distance straight from its definition; independent of
/// the library's kernel route.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    ((z - w) / (c(1.0, 0.0) - w.conj() * z)).norm()
}
