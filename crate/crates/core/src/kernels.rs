//! Kernels on finite point sets: Gram assembly, normalization at a base
//! point, and the kernel pseudo-metric
//! `d_k(x, y) = sqrt(1 - |k(x,y)|^2 / (k(x,x) k(y,y)))`.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{is_psd, HermitianMatrix, DEFAULT_PSD_TOL};

/// Largest supported Drury–Arveson dimension.
pub const MAX_DA_DIMENSION: usize = 64;

/// Columns of a raw Gram kernel with `d_k^2` below this are treated as proportional.
pub const PROPORTIONALITY_TOL: f64 = 1e-10;

/// Szegő kernel `1 / (1 - z conj(w))`.
#[inline]
pub fn szego(z: Complex64, w: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z * w.conj()).inv()
}

/// Drury–Arveson kernel `1 / (1 - <z, w>)` on the unit ball of C^d.
#[inline]
pub fn drury_arveson(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    (Complex64::new(1.0, 0.0) - inner(z, w)).inv()
}

/// `<z, w> = sum z_k conj(w_k)`.
#[inline]
pub fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn label(i: usize) -> String {
    format!("p{i}")
}

/// A finite, ordered sample of the underlying set. Coordinates may be empty
/// for kernels that are defined directly on labels (embedding and raw Gram).
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    ids: Vec<String>,
    coords: Vec<Vec<Complex64>>,
}

impl PointSet {
    pub fn new(ids: Vec<String>, coords: Vec<Vec<Complex64>>) -> Result<Self> {
        if ids.len() != coords.len() {
            return Err(Error::PointSet(format!("{} ids but {} coordinate vectors", ids.len(), coords.len())));
        }
        let mut seen = HashSet::new();
        for id in &ids {
            if id.is_empty() {
                return Err(Error::PointSet("empty point id".into()));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::PointSet(format!("duplicate point id {id}")));
            }
        }
        for (id, c) in ids.iter().zip(&coords) {
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { context: format!("coordinates of {id}") });
            }
        }
        for i in 0..coords.len() {
            for j in 0..i {
                if !coords[i].is_empty() && coords[i] == coords[j] {
                    return Err(Error::PointSet(format!("points {} and {} coincide", ids[j], ids[i])));
                }
            }
        }
        Ok(PointSet { ids, coords })
    }

    /// Points in the disk, labelled `p0, p1, ...`.
    pub fn from_scalars(zs: &[Complex64]) -> Result<Self> {
        Self::new((0..zs.len()).map(label).collect(), zs.iter().map(|&z| vec![z]).collect())
    }

    pub fn from_vectors(vs: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new((0..vs.len()).map(label).collect(), vs)
    }

    /// Coordinate-free sample, for embedding and raw Gram kernels.
    pub fn from_ids<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        Self::new(ids, vec![Vec::new(); n])
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self, i: usize) -> &[Complex64] {
        &self.coords[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Sub-sample in the order of `idx`.
    pub fn subset(&self, idx: &[usize]) -> PointSet {
        PointSet {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            coords: idx.iter().map(|&i| self.coords[i].clone()).collect(),
        }
    }

    /// First `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        let idx: Vec<usize> = (0..n.min(self.len())).collect();
        self.subset(&idx)
    }
}

/// An injective map from labels into the open disk with a base label sent to 0.
/// Induces the kernel `k(x, y) = 1 / (1 - j(x) conj(j(y)))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMap {
    images: BTreeMap<String, Complex64>,
    base: String,
}

impl EmbeddingMap {
    pub fn new(images: BTreeMap<String, Complex64>, base: impl Into<String>) -> Result<Self> {
        let base = base.into();
        match images.get(&base) {
            None => return Err(Error::Kernel(format!("base point {base} missing from embedding"))),
            Some(z) if *z != Complex64::new(0.0, 0.0) => {
                return Err(Error::Kernel(format!("embedding must send base point {base} to 0")))
            }
            _ => {}
        }
        let vals: Vec<(&String, &Complex64)> = images.iter().collect();
        for (id, z) in &vals {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { context: format!("image of {id}") });
            }
            if z.norm_sqr() >= 1.0 {
                return Err(Error::Domain { id: id.to_string() });
            }
        }
        for i in 0..vals.len() {
            for k in 0..i {
                if vals[i].1 == vals[k].1 {
                    return Err(Error::Kernel(format!("embedding not injective: {} and {}", vals[k].0, vals[i].0)));
                }
            }
        }
        Ok(EmbeddingMap { images, base })
    }

    /// The inclusion of a disk sample, labelled like [`PointSet::from_scalars`],
    /// plus an extra base label `base` sent to 0 when 0 is not in the sample.
    pub fn inclusion(zs: &[Complex64], base: &str) -> Result<Self> {
        let mut images: BTreeMap<String, Complex64> = zs.iter().enumerate().map(|(i, &z)| (label(i), z)).collect();
        let base_id = match zs.iter().position(|z| *z == Complex64::new(0.0, 0.0)) {
            Some(i) => label(i),
            None => {
                if images.contains_key(base) {
                    return Err(Error::Kernel(format!("base label {base} clashes with a sample label")));
                }
                images.insert(base.to_string(), Complex64::new(0.0, 0.0));
                base.to_string()
            }
        };
        Self::new(images, base_id)
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn image(&self, id: &str) -> Result<Complex64> {
        self.images.get(id).copied().ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn images(&self) -> &BTreeMap<String, Complex64> {
        &self.images
    }
}

/// An explicit kernel matrix on labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct GramKernel {
    ids: Vec<String>,
    matrix: HermitianMatrix,
}

impl GramKernel {
    /// Validates positivity (to [`DEFAULT_PSD_TOL`]), strictly positive
    /// diagonal, no vanishing entries and no pair of proportional columns.
    pub fn new(ids: Vec<String>, matrix: HermitianMatrix) -> Result<Self> {
        let n = matrix.order();
        if ids.len() != n {
            return Err(Error::Kernel(format!("{} ids for a Gram matrix of order {n}", ids.len())));
        }
        PointSet::from_ids(ids.clone())?;
        for i in 0..n {
            if matrix.get(i, i).re <= 0.0 {
                return Err(Error::Kernel(format!("non-positive diagonal at {}", ids[i])));
            }
            for j in 0..i {
                let kij = matrix.get(i, j);
                if kij.norm() == 0.0 {
                    return Err(Error::NotIrreducible { a: ids[j].clone(), b: ids[i].clone() });
                }
                // For PSD matrices, proportional columns <=> a singular 2x2 principal minor.
                let ratio = kij.norm_sqr() / (matrix.get(i, i).re * matrix.get(j, j).re);
                if 1.0 - ratio <= PROPORTIONALITY_TOL {
                    return Err(Error::NotIrreducible { a: ids[j].clone(), b: ids[i].clone() });
                }
            }
        }
        if n > 0 && !is_psd(&matrix, DEFAULT_PSD_TOL)? {
            return Err(Error::Kernel("Gram matrix is not positive semidefinite".into()));
        }
        Ok(GramKernel { ids, matrix })
    }

    /// Labels `p0, p1, ...`.
    pub fn unlabelled(matrix: HermitianMatrix) -> Result<Self> {
        let ids = (0..matrix.order()).map(label).collect();
        Self::new(ids, matrix)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    fn index_of(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    Szego,
    DruryArveson { d: usize },
    Embedding(EmbeddingMap),
    Gram(GramKernel),
}

impl KernelSpec {
    pub fn drury_arveson(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_DA_DIMENSION {
            return Err(Error::Kernel(format!("Drury-Arveson dimension must lie in 1..={MAX_DA_DIMENSION}, got {d}")));
        }
        Ok(KernelSpec::DruryArveson { d })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Szego => "szego",
            KernelSpec::DruryArveson { .. } => "drury-arveson",
            KernelSpec::Embedding(_) => "embedding",
            KernelSpec::Gram(_) => "gram",
        }
    }

    /// Checks that every point is admissible and resolves it to whatever the
    /// kernel evaluates on.
    fn resolve(&self, pts: &PointSet) -> Result<Resolved> {
        match self {
            KernelSpec::Szego => {
                let mut zs = Vec::with_capacity(pts.len());
                for i in 0..pts.len() {
                    let c = pts.coords(i);
                    if c.len() != 1 {
                        return Err(Error::PointSet(format!(
                            "Szego point {} must have one coordinate, has {}",
                            pts.id(i),
                            c.len()
                        )));
                    }
                    if c[0].norm_sqr() >= 1.0 {
                        return Err(Error::Domain { id: pts.id(i).to_string() });
                    }
                    zs.push(c[0]);
                }
                Ok(Resolved::Disk(zs))
            }
            KernelSpec::DruryArveson { d } => {
                if *d == 0 || *d > MAX_DA_DIMENSION {
                    return Err(Error::Kernel(format!("unsupported Drury-Arveson dimension {d}")));
                }
                for i in 0..pts.len() {
                    let c = pts.coords(i);
                    if c.len() != *d {
                        return Err(Error::PointSet(format!(
                            "point {} has dimension {}, kernel expects {d}",
                            pts.id(i),
                            c.len()
                        )));
                    }
                    if c.iter().map(|z| z.norm_sqr()).sum::<f64>() >= 1.0 {
                        return Err(Error::Domain { id: pts.id(i).to_string() });
                    }
                }
                Ok(Resolved::Ball)
            }
            KernelSpec::Embedding(map) => {
                let zs = pts.ids().iter().map(|id| map.image(id)).collect::<Result<Vec<_>>>()?;
                Ok(Resolved::Disk(zs))
            }
            KernelSpec::Gram(g) => {
                let idx = pts.ids().iter().map(|id| g.index_of(id)).collect::<Result<Vec<_>>>()?;
                Ok(Resolved::Indices(idx))
            }
        }
    }

    fn entry(&self, resolved: &Resolved, pts: &PointSet, i: usize, j: usize) -> Complex64 {
        match (self, resolved) {
            (_, Resolved::Disk(zs)) => szego(zs[i], zs[j]),
            (KernelSpec::Gram(g), Resolved::Indices(idx)) => g.matrix.get(idx[i], idx[j]),
            (_, Resolved::Ball) => drury_arveson(pts.coords(i), pts.coords(j)),
            _ => unreachable!("resolution always matches the kernel variant"),
        }
    }
}

enum Resolved {
    Disk(Vec<Complex64>),
    Ball,
    Indices(Vec<usize>),
}

/// `[k(x_i, x_j)]` on the sample.
pub fn gram(spec: &KernelSpec, pts: &PointSet) -> Result<HermitianMatrix> {
    let resolved = spec.resolve(pts)?;
    HermitianMatrix::from_upper_fn(pts.len(), |i, j| spec.entry(&resolved, pts, i, j))
}

/// Normalizes a kernel matrix at row/column `base`:
/// `k_b(x, y) = k(x, y) k(b, b) / (k(x, b) k(b, y))`.
/// The base row and column of the result are exactly 1.
pub fn normalize_gram(g: &HermitianMatrix, base: usize, ids: &[String]) -> Result<HermitianMatrix> {
    let n = g.order();
    if base >= n {
        return Err(Error::UnknownPoint(format!("index {base}")));
    }
    for i in 0..n {
        if g.get(i, base).norm() == 0.0 {
            return Err(Error::VanishesAgainstBase { id: ids.get(i).cloned().unwrap_or_else(|| label(i)) });
        }
    }
    let kbb = g.get(base, base);
    HermitianMatrix::from_upper_fn(n, |i, j| {
        if i == base || j == base {
            Complex64::new(1.0, 0.0)
        } else {
            g.get(i, j) * kbb / (g.get(i, base) * g.get(base, j))
        }
    })
}

pub fn normalize(spec: &KernelSpec, pts: &PointSet, base: usize) -> Result<HermitianMatrix> {
    normalize_gram(&gram(spec, pts)?, base, pts.ids())
}

/// The pseudo-metric read off a kernel matrix.
pub fn dk_from_gram(g: &HermitianMatrix, i: usize, j: usize, ids: &[String]) -> Result<f64> {
    if i == j {
        return Ok(0.0);
    }
    let kij = g.get(i, j);
    if kij.norm() == 0.0 {
        let name = |k: usize| ids.get(k).cloned().unwrap_or_else(|| label(k));
        return Err(Error::NotIrreducible { a: name(i), b: name(j) });
    }
    let ratio = kij.norm_sqr() / (g.get(i, i).re * g.get(j, j).re);
    Ok((1.0 - ratio).max(0.0).sqrt())
}

pub fn dk(spec: &KernelSpec, pts: &PointSet, i: usize, j: usize) -> Result<f64> {
    if i >= pts.len() || j >= pts.len() {
        return Err(Error::UnknownPoint(format!("index {}", i.max(j))));
    }
    let sub = pts.subset(&[i, j]);
    let g = gram(spec, &sub)?;
    dk_from_gram(&g, 0, 1, sub.ids())
}

/// Full symmetric table of `d_k` over the sample.
pub fn dk_matrix(spec: &KernelSpec, pts: &PointSet, exec: Exec) -> Result<Vec<Vec<f64>>> {
    let g = gram(spec, pts)?;
    let n = pts.len();
    exec.map_range(n, |i| (0..n).map(|j| dk_from_gram(&g, i, j, pts.ids())).collect::<Result<Vec<f64>>>())
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn szego_gram_example() {
        let pts = PointSet::from_scalars(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let g = gram(&KernelSpec::Szego, &pts).unwrap();
        assert_eq!(g.get(0, 0), c(1.0, 0.0));
        assert_eq!(g.get(0, 1), c(1.0, 0.0));
        assert!((g.get(1, 1).re - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn drury_arveson_diagonal() {
        let pts = PointSet::from_vectors(vec![vec![c(0.5, 0.0), c(0.5, 0.0)]]).unwrap();
        let g = gram(&KernelSpec::drury_arveson(2).unwrap(), &pts).unwrap();
        assert!((g.get(0, 0).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_embedding_matches_szego() {
        let zs = [c(0.0, 0.0), c(0.5, 0.0)];
        let map = EmbeddingMap::inclusion(&zs, "base").unwrap();
        assert_eq!(map.base(), "p0");
        let pts = PointSet::from_scalars(&zs).unwrap();
        assert_eq!(gram(&KernelSpec::Embedding(map), &pts).unwrap(), gram(&KernelSpec::Szego, &pts).unwrap());
    }

    #[test]
    fn boundary_point_names_id() {
        let pts = PointSet::new(vec!["a".into(), "edge".into()], vec![vec![c(0.1, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(gram(&KernelSpec::Szego, &pts), Err(Error::Domain { id: "edge".into() }));
    }

    #[test]
    fn repeated_points_rejected() {
        assert!(matches!(PointSet::from_scalars(&[c(0.2, 0.0), c(0.2, 0.0)]), Err(Error::PointSet(_))));
    }

    #[test]
    fn normalize_examples() {
        let pts = PointSet::from_scalars(&[c(0.0, 0.0), c(0.5, 0.0), c(0.1, -0.3)]).unwrap();
        let g = gram(&KernelSpec::Szego, &pts).unwrap();
        let nb = normalize(&KernelSpec::Szego, &pts, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((nb.get(i, j) - g.get(i, j)).norm() < 1e-15);
            }
        }

        let raw = GramKernel::unlabelled(HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap())
            .unwrap();
        let spec = KernelSpec::Gram(raw);
        let pts = PointSet::from_ids(["p0", "p1"]).unwrap();
        let nb = normalize(&spec, &pts, 0).unwrap();
        assert_eq!(nb.get(0, 0), c(1.0, 0.0));
        assert_eq!(nb.get(0, 1), c(1.0, 0.0));
        assert!((nb.get(1, 1).re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_base_row_is_ones() {
        let pts = PointSet::from_vectors(vec![
            vec![c(0.1, 0.2), c(-0.3, 0.0)],
            vec![c(0.4, 0.0), c(0.2, 0.1)],
            vec![c(-0.2, -0.5), c(0.0, 0.3)],
        ])
        .unwrap();
        let nb = normalize(&KernelSpec::drury_arveson(2).unwrap(), &pts, 1).unwrap();
        for k in 0..3 {
            assert_eq!(nb.get(1, k), c(1.0, 0.0));
            assert_eq!(nb.get(k, 1), c(1.0, 0.0));
        }
    }

    #[test]
    fn vanishing_kernel_rejected() {
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(GramKernel::unlabelled(m.clone()), Err(Error::NotIrreducible { .. })));
        assert!(matches!(normalize_gram(&m, 0, &["a".into(), "b".into()]), Err(Error::VanishesAgainstBase { .. })));
    }

    #[test]
    fn proportional_columns_rejected() {
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(GramKernel::unlabelled(m), Err(Error::NotIrreducible { .. })));
    }

    #[test]
    fn dk_examples() {
        let pts = PointSet::from_scalars(&[c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((dk(&KernelSpec::Szego, &pts, 0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(dk(&KernelSpec::Szego, &pts, 1, 1).unwrap(), 0.0);

        let z = c(0.3, -0.4);
        let w = c(-0.6, 0.1);
        let pts = PointSet::from_scalars(&[z, w]).unwrap();
        let expected = ((z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z)).norm();
        assert!((dk(&KernelSpec::Szego, &pts, 0, 1).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn embedding_validation() {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), c(0.1, 0.0));
        assert!(EmbeddingMap::new(m.clone(), "a").is_err());
        m.insert("o".to_string(), c(0.0, 0.0));
        m.insert("b".to_string(), c(0.1, 0.0));
        assert!(EmbeddingMap::new(m.clone(), "o").is_err());
        m.insert("b".to_string(), c(1.0, 0.0));
        assert!(matches!(EmbeddingMap::new(m, "o"), Err(Error::Domain { .. })));
    }

    #[test]
    fn dk_matrix_symmetric() {
        let pts = PointSet::from_scalars(&[c(0.1, 0.0), c(0.0, 0.7), c(-0.4, -0.4)]).unwrap();
        let m = dk_matrix(&KernelSpec::Szego, &pts, Exec::Parallel).unwrap();
        for (i, row) in m.iter().enumerate() {
            assert_eq!(row[i], 0.0);
            for (j, &d) in row.iter().enumerate() {
                assert_eq!(d, m[j][i]);
                assert!((0.0..1.0).contains(&d));
            }
        }
    }
}
