//! Eigenstates built from the reflection group.
//!
//! Units: `hbar^2 / (2 mu) = 1`, so a plane wave `exp(i k.z)` has energy
//! `|k|^2` and eigenstates satisfy `-laplacian(psi) = |k|^2 psi`.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupElement, ReflectionGroup};
use crate::masses::JacobiFrame;
use crate::numfmt::{sci, CSV_DIGITS};
use crate::roots::RootSet;

/// Floor factor for relative residual denominators.
const EPS_FACTOR: f64 = 1e-30;

/// Incident wavevector of a scattering state.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavevector(pub DVector<f64>);

impl Wavevector {
    pub fn new(k: DVector<f64>) -> Self {
        Wavevector(k)
    }

    pub fn energy(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `alpha_i . k > 0` for every simple root.
    pub fn is_incident(&self, roots: &RootSet) -> bool {
        roots.roots().iter().all(|a| a.dot(&self.0) > 0.0)
    }
}

/// Signed superposition of the plane waves `exp(i (g k).z)` over the group.
#[derive(Debug, Clone)]
pub struct BetheState {
    group: Arc<ReflectionGroup>,
    k: Wavevector,
    normalization: Complex64,
    /// Row-major `|G| x N` table of the rotated wavevectors `g k`.
    waves: Vec<f64>,
    signs: Vec<f64>,
}

impl BetheState {
    /// Any finite k of the right dimension, including ones outside the
    /// incident cone.
    pub fn new(group: Arc<ReflectionGroup>, k: Wavevector) -> Result<Self> {
        let n = group.dim();
        if k.0.len() != n {
            return Err(Error::domain(format!(
                "wavevector has {} components, expected {n}",
                k.0.len()
            )));
        }
        if !k.0.iter().all(|x| x.is_finite()) {
            return Err(Error::domain("wavevector has non-finite components"));
        }
        let mut waves = Vec::with_capacity(group.order() * n);
        let mut signs = Vec::with_capacity(group.order());
        for g in group.elements() {
            waves.extend((&g.matrix * &k.0).iter());
            signs.push(g.sign());
        }
        Ok(BetheState {
            group,
            k,
            normalization: Complex64::new(1.0, 0.0),
            waves,
            signs,
        })
    }

    /// A scattering state: k must satisfy `alpha_i . k > 0` for all i.
    pub fn scattering(group: Arc<ReflectionGroup>, k: Wavevector) -> Result<Self> {
        if k.0.len() == group.dim() && !k.is_incident(group.roots()) {
            return Err(Error::domain(
                "wavevector is not incident: alpha_i . k > 0 fails for some simple root",
            ));
        }
        Self::new(group, k)
    }

    pub fn with_normalization(mut self, c: Complex64) -> Self {
        self.normalization = c;
        self
    }

    pub fn group(&self) -> &ReflectionGroup {
        &self.group
    }

    pub fn k(&self) -> &Wavevector {
        &self.k
    }

    /// Sum of the term magnitudes, `|G| |const|`.
    pub fn term_scale(&self) -> f64 {
        self.signs.len() as f64 * self.normalization.norm()
    }

    pub fn eval(&self, z: &DVector<f64>) -> Complex64 {
        let n = z.len();
        assert_eq!(n, self.group.dim(), "point has wrong dimension");
        let z = z.as_slice();
        let mut re = 0.0;
        let mut im = 0.0;
        for (gk, s) in self.waves.chunks_exact(n).zip(&self.signs) {
            let phase: f64 = gk.iter().zip(z).map(|(a, b)| a * b).sum();
            let (sin, cos) = phase.sin_cos();
            re += s * cos;
            im += s * sin;
        }
        self.normalization * Complex64::new(re, im)
    }

    /// Pointwise `eval` over many points, split across the current rayon
    /// pool. Each point is summed in a fixed order, so the output does not
    /// depend on the number of workers.
    pub fn eval_batch(&self, points: &[DVector<f64>]) -> Vec<Complex64> {
        points.par_iter().map(|z| self.eval(z)).collect()
    }

    /// Relative-space radius at which probe points should sit. The state
    /// vanishes to order `|positive roots|` at the chamber corner, so relative
    /// residuals are only meaningful once `|k_rel| |z_rel|` exceeds that
    /// order (and at least 20).
    pub fn probe_radius(&self) -> f64 {
        let e = self.group.e_com();
        let k_rel = (&self.k.0 - e * e.dot(&self.k.0)).norm();
        let order = self.group.positive_roots().len().max(20) as f64;
        if k_rel > 0.0 {
            order / k_rel
        } else {
            1.0
        }
    }

    fn eps(&self) -> f64 {
        EPS_FACTOR * self.term_scale()
    }

    /// `|psi(g z) - (-1)^P(g) psi(z)| / (|psi(z)| + eps)`.
    pub fn symmetry_residual(&self, g: &GroupElement, z: &DVector<f64>) -> f64 {
        let base = self.eval(z);
        let moved = self.eval(&g.apply(z));
        (moved - base * g.sign()).norm() / (base.norm() + self.eps())
    }

    /// Residual of `psi(z + c e_com) = exp(i c k.e_com) psi(z)`.
    pub fn translation_residual(&self, z: &DVector<f64>, c: f64) -> f64 {
        let e = self.group.e_com();
        let base = self.eval(z);
        let shifted = self.eval(&(z + e * c));
        let phase = Complex64::from_polar(1.0, c * self.k.0.dot(e));
        (shifted - base * phase).norm() / (base.norm() + self.eps())
    }

    /// Central-difference Laplacian check of `-laplacian(psi) = |k|^2 psi`.
    pub fn helmholtz_residual(&self, z: &DVector<f64>, h: f64) -> Result<f64> {
        if !(1e-4..=1e-2).contains(&h) {
            return Err(Error::domain(format!("step {h} outside [1e-4, 1e-2]")));
        }
        let center = self.eval(z);
        let mut lap = Complex64::new(0.0, 0.0);
        let mut p = z.clone();
        for d in 0..z.len() {
            p[d] = z[d] + h;
            let plus = self.eval(&p);
            p[d] = z[d] - h;
            let minus = self.eval(&p);
            p[d] = z[d];
            lap += (plus + minus - center * 2.0) / (h * h);
        }
        let e = self.k.energy();
        Ok((lap + center * e).norm() / (e * center.norm() + self.eps()))
    }
}

/// Product of the positive-root linear forms: the lowest-degree polynomial
/// that changes sign under every reflection of the group.
#[derive(Debug, Clone)]
pub struct AntiInvariantState {
    positive_roots: Vec<DVector<f64>>,
    simple_roots: RootSet,
    normalization: f64,
}

impl AntiInvariantState {
    pub fn new(group: &ReflectionGroup) -> Self {
        AntiInvariantState {
            positive_roots: group.positive_roots().to_vec(),
            simple_roots: group.roots().clone(),
            normalization: 1.0,
        }
    }

    pub fn with_normalization(mut self, c: f64) -> Self {
        self.normalization = c;
        self
    }

    /// Homogeneity degree, the number of mirrors.
    pub fn degree(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn positive_roots(&self) -> &[DVector<f64>] {
        &self.positive_roots
    }

    pub fn simple_roots(&self) -> &RootSet {
        &self.simple_roots
    }

    pub fn eval(&self, z: &DVector<f64>) -> f64 {
        self.normalization
            * self
                .positive_roots
                .iter()
                .map(|b| b.dot(z))
                .product::<f64>()
    }

    /// Exact Laplacian from the product rule,
    /// `sum_{j<l} 2 (b_j.b_l) prod_{m != j,l} (b_m.z)`,
    /// returned with the sum of absolute term values.
    pub fn laplacian(&self, z: &DVector<f64>) -> (f64, f64) {
        let factors: Vec<f64> = self.positive_roots.iter().map(|b| b.dot(z)).collect();
        let p = factors.len();
        let mut value = 0.0;
        let mut scale = 0.0;
        let mut rest = Vec::with_capacity(p);
        let mut prefix = vec![1.0; p];
        for j in 0..p {
            rest.clear();
            rest.extend(
                factors
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, f)| *f),
            );
            // prefix[i] = product of rest[..i]
            let mut acc = 1.0;
            for (i, f) in rest.iter().enumerate() {
                prefix[i] = acc;
                acc *= f;
            }
            let mut suffix = 1.0;
            for i in (0..rest.len()).rev() {
                let l = if i < j { i } else { i + 1 };
                if l > j {
                    let dot = self.positive_roots[j].dot(&self.positive_roots[l]);
                    let term = 2.0 * dot * prefix[i] * suffix;
                    value += term;
                    scale += term.abs();
                }
                suffix *= rest[i];
            }
        }
        (self.normalization * value, self.normalization.abs() * scale)
    }
}

/// One sample of an angular density grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub theta: f64,
    pub phi: f64,
    pub density: f64,
    pub in_chamber: bool,
}

/// `|psi|^2` on the unit sphere of relative motion, normalized to a maximum
/// of 1. Rows are theta-major: index `i * resolution + j` holds
/// `(theta_i, phi_j)`.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub resolution: usize,
    pub points: Vec<DensityPoint>,
    basis: Vec<DVector<f64>>,
    slice: Vec<f64>,
    max_density: f64,
}

impl DensityGrid {
    /// Orthonormal basis of the relative space used for the angles.
    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Unnormalized maximum of `|psi|^2` over the grid.
    pub fn max_density(&self) -> f64 {
        self.max_density
    }

    pub fn point(&self, i: usize, j: usize) -> &DensityPoint {
        &self.points[i * self.resolution + j]
    }

    /// Unit vector in z space for the given grid angles.
    pub fn direction(&self, theta: f64, phi: f64) -> DVector<f64> {
        sphere_point(&self.basis, &self.slice, theta, phi)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theta,phi,density,in_chamber")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{}",
                sci(p.theta, CSV_DIGITS),
                sci(p.phi, CSV_DIGITS),
                sci(p.density, CSV_DIGITS),
                p.in_chamber
            )?;
        }
        Ok(())
    }
}

/// Orthonormal basis of the complement of `e_com`. The first vector points
/// away from the chamber interior, so the chamber sits on the equator at
/// `phi = pi`; the rest come from the simple roots by Gram-Schmidt. The
/// pole is then turned about the chamber direction so that no chamber wall
/// runs along a grid meridian or parallel.
pub fn relative_basis(roots: &RootSet) -> Vec<DVector<f64>> {
    let mut basis = gram_schmidt(roots);
    if basis.len() >= 3 {
        let (g1, g2) = (basis[1].clone(), basis[2].clone());
        let walls: Vec<f64> = roots
            .roots()
            .iter()
            .filter(|a| a.dot(&g1).hypot(a.dot(&g2)) > 1e-9)
            .map(|a| a.dot(&g1).atan2(a.dot(&g2)))
            .collect();
        let quarter = PI / 2.0;
        let obliqueness = |gamma: f64| {
            walls
                .iter()
                .map(|w| {
                    let r = (gamma - w).rem_euclid(quarter);
                    r.min(quarter - r)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let mut best = (0.0, f64::NEG_INFINITY);
        for step in 0..900 {
            let gamma = quarter * step as f64 / 900.0;
            let score = obliqueness(gamma);
            if score > best.1 {
                best = (gamma, score);
            }
        }
        let (sin, cos) = best.0.sin_cos();
        basis[1] = &g1 * cos - &g2 * sin;
        basis[2] = &g2 * cos + &g1 * sin;
    }
    basis
}

fn gram_schmidt(roots: &RootSet) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let e = roots.e_com();
    let seeds = roots
        .interior_point()
        .ok()
        .map(|c| -c)
        .into_iter()
        .chain(roots.roots().iter().cloned());
    for a in seeds {
        let a = &a;
        let mut v = a - e * e.dot(a);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-12 {
            basis.push(v / norm);
        }
    }
    basis
}

/// Hyperspherical embedding: the leading `slice` angles peel off the last
/// basis vectors, `(theta, phi)` cover the remaining 2-sphere.
fn sphere_point(basis: &[DVector<f64>], slice: &[f64], theta: f64, phi: f64) -> DVector<f64> {
    let d = basis.len();
    let mut p = DVector::zeros(basis[0].len());
    let mut radius = 1.0;
    for (k, &chi) in slice.iter().enumerate() {
        p += &basis[d - 1 - k] * (radius * chi.cos());
        radius *= chi.sin();
    }
    p += &basis[0] * (radius * theta.sin() * phi.cos());
    p += &basis[1] * (radius * theta.sin() * phi.sin());
    p += &basis[2] * (radius * theta.cos());
    p
}

/// Samples `|psi|^2` on a `resolution x resolution` grid of cell-centered
/// angles `theta in (0, pi)`, `phi in (0, 2 pi)`. Relative spaces of
/// dimension `d > 3` need `d - 3` fixed slice angles.
pub fn angular_density_grid(
    state: &AntiInvariantState,
    frame: &JacobiFrame,
    resolution: usize,
    slice: Option<&[f64]>,
) -> Result<DensityGrid> {
    if !(16..=4096).contains(&resolution) {
        return Err(Error::domain(format!(
            "resolution {resolution} outside [16, 4096]"
        )));
    }
    let roots = state.simple_roots();
    if roots.dim() != frame.dim() {
        return Err(Error::domain("frame and state have different dimensions"));
    }
    let basis = relative_basis(roots);
    let d = basis.len();
    if d < 3 {
        return Err(Error::domain(format!(
            "angular grids need a relative space of dimension at least 3, got {d}"
        )));
    }
    let slice: Vec<f64> = slice.unwrap_or(&[]).to_vec();
    if slice.len() != d - 3 {
        return Err(Error::domain(format!(
            "relative space of dimension {d} needs {} fixed slice angle(s), got {}",
            d - 3,
            slice.len()
        )));
    }
    if !slice.iter().all(|a| a.is_finite()) {
        return Err(Error::domain("slice angles must be finite"));
    }

    let mut points: Vec<DensityPoint> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / resolution, idx % resolution);
            let theta = PI * (i as f64 + 0.5) / resolution as f64;
            let phi = 2.0 * PI * (j as f64 + 0.5) / resolution as f64;
            let u = sphere_point(&basis, &slice, theta, phi);
            let psi = state.eval(&u);
            DensityPoint {
                theta,
                phi,
                density: psi * psi,
                in_chamber: roots.in_chamber(&u),
            }
        })
        .collect();
    let max_density = points.iter().map(|p| p.density).fold(0.0, f64::max);
    if max_density > 0.0 {
        for p in &mut points {
            p.density /= max_density;
        }
    }
    Ok(DensityGrid {
        resolution,
        points,
        basis,
        slice,
        max_density,
    })
}
