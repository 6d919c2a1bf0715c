//! Concrete torus geometry and a spectral discretization of the surface
//! operators on v-independent fields.
//!
//! The torus is `X(u, v) = ((a + r cos u) cos v, (a + r cos u) sin v, r sin u)`
//! with outward normal, so the outer equator has `H = (1/r + 1/(a + r)) / 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{to_f64, Rational};
use crate::spectral;

/// Default number of u-samples for grid operators.
pub const DEFAULT_GRID: usize = 256;

/// Tail ratio above which an operator result is flagged as under-resolved.
const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TorusShape {
    a: f64,
    r: f64,
    exact: Option<(Rational, Rational)>,
}

impl TorusShape {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !(a.is_finite() && r.is_finite() && r > 0.0 && a > r) {
            return Err(Error::BadInput(format!(
                "torus radii must satisfy a > r > 0, got a = {a}, r = {r}"
            )));
        }
        Ok(Self { a, r, exact: None })
    }

    /// Builds the shape from exact squared radii.
    pub fn from_exact(a2: &Rational, r2: &Rational) -> Result<Self> {
        let (a2f, r2f) = (to_f64(a2), to_f64(r2));
        if !(r2f > 0.0 && a2 > r2) {
            return Err(Error::BadInput(format!(
                "torus radii must satisfy a > r > 0, got a² = {a2}, r² = {r2}"
            )));
        }
        let mut t = Self::new(a2f.sqrt(), r2f.sqrt())?;
        t.exact = Some((a2.clone(), r2.clone()));
        Ok(t)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Exact `(a², r²)` when the shape was built from rationals.
    pub fn exact(&self) -> Option<(&Rational, &Rational)> {
        self.exact.as_ref().map(|(a2, r2)| (a2, r2))
    }

    /// `a + r cos u`, the distance from the symmetry axis.
    pub fn axis_distance(&self, u: f64) -> f64 {
        self.a + self.r * u.cos()
    }

    /// Mean and Gaussian curvature at poloidal angle `u`.
    pub fn curvatures(&self, u: f64) -> (f64, f64) {
        let c = u.cos();
        let d = self.axis_distance(u);
        (0.5 * (1.0 / self.r + c / d), c / (self.r * d))
    }

    pub fn fundamental_forms(&self, u: f64) -> FundamentalForms {
        let c = u.cos();
        let d = self.axis_distance(u);
        FundamentalForms {
            g11: self.r * self.r,
            g22: d * d,
            h11: self.r,
            h22: d * c,
        }
    }

    /// Area, volume and reduced volume, with independent quadrature values.
    pub fn area_volume(&self) -> AreaVolume {
        let (a, r) = (self.a, self.r);
        let area = 4.0 * PI * PI * a * r;
        let volume = 2.0 * PI * PI * a * r * r;
        let u = nodes(DEFAULT_GRID);
        let da: Vec<f64> = u.iter().map(|&x| r * self.axis_distance(x)).collect();
        // V = (1/3) ∫ X·N dA with X·N = a cos u + r
        let dv: Vec<f64> = u
            .iter()
            .zip(&da)
            .map(|(&x, w)| (a * x.cos() + r) * w / 3.0)
            .collect();
        AreaVolume {
            area,
            volume,
            reduced_volume: reduced_volume(area, volume),
            area_quadrature: 2.0 * PI * spectral::periodic_integral(&da),
            volume_quadrature: 2.0 * PI * spectral::periodic_integral(&dv),
        }
    }

    /// `∫ f dA` for a v-independent field.
    pub fn integrate(&self, f: &SurfaceGrid) -> f64 {
        let u = nodes(f.len());
        let w: Vec<f64> = u
            .iter()
            .zip(&f.values)
            .map(|(&x, v)| v * self.r * self.axis_distance(x))
            .collect();
        2.0 * PI * spectral::periodic_integral(&w)
    }

    /// Samples `f(H(u), K(u))` on an `n`-point grid.
    pub fn sample_curvature_field(
        &self,
        n: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SurfaceGrid> {
        SurfaceGrid::sample(n, |u| {
            let (h, k) = self.curvatures(u);
            f(h, k)
        })
    }
}

/// Components of the first (`g`) and second (`h`) fundamental forms in the
/// `(u, v)` chart; both are diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalForms {
    pub g11: f64,
    pub g22: f64,
    pub h11: f64,
    pub h22: f64,
}

impl FundamentalForms {
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.h11 / self.g11 + self.h22 / self.g22)
    }

    pub fn gaussian_curvature(&self) -> f64 {
        (self.h11 * self.h22) / (self.g11 * self.g22)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaVolume {
    pub area: f64,
    pub volume: f64,
    pub reduced_volume: f64,
    pub area_quadrature: f64,
    pub volume_quadrature: f64,
}

/// `V / ((4π/3)(A/4π)^{3/2})`, the volume relative to a sphere of equal area.
pub fn reduced_volume(area: f64, volume: f64) -> f64 {
    volume / (4.0 * PI / 3.0 * (area / (4.0 * PI)).powf(1.5))
}

/// Inverse of the torus reduced-volume relation: `a²/r² = 81 / (16π² v⁴)`.
pub fn ratio_from_reduced_volume(v: f64) -> f64 {
    81.0 / (16.0 * PI * PI * v.powi(4))
}

/// Equispaced nodes `2πj/n` on `[0, 2π)`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Samples of a v-independent scalar field at the nodes `2πj/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceGrid {
    values: Vec<f64>,
    accuracy_warning: bool,
}

impl SurfaceGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        check_grid_size(values.len())?;
        Ok(Self {
            values,
            accuracy_warning: false,
        })
    }

    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid_size(n)?;
        Self::from_values(nodes(n).into_iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Set when the grid could not resolve the field or the operator output.
    pub fn accuracy_warning(&self) -> bool {
        self.accuracy_warning
    }

    /// Marks the field as under-resolved when `warn` is set.
    pub fn flagged(mut self, warn: bool) -> Self {
        self.accuracy_warning |= warn;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            accuracy_warning: self.accuracy_warning,
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &SurfaceGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::BadInput(format!(
                "grid sizes differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
            accuracy_warning: self.accuracy_warning || other.accuracy_warning,
        })
    }
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(Error::BadInput(format!(
            "grid size must be even and at least 16, got {n}"
        )));
    }
    Ok(())
}

/// `(1/(r D)) ∂_u (w(u) ∂_u f)` where `w` is the flux weight.
fn divergence_form(t: &TorusShape, f: &SurfaceGrid, weight: impl Fn(f64) -> f64) -> SurfaceGrid {
    let u = nodes(f.len());
    let fu = spectral::derivative(&f.values);
    let flux: Vec<f64> = u.iter().zip(&fu).map(|(&x, d)| weight(x) * d).collect();
    let dflux = spectral::derivative(&flux);
    let values: Vec<f64> = u
        .iter()
        .zip(&dflux)
        .map(|(&x, d)| d / (t.r * t.axis_distance(x)))
        .collect();
    let warn = f.accuracy_warning
        || spectral::tail_ratio(&f.values) > TAIL_TOLERANCE
        || spectral::tail_ratio(&flux) > TAIL_TOLERANCE;
    SurfaceGrid {
        values,
        accuracy_warning: warn,
    }
}

/// Laplace–Beltrami operator `(1/√g) ∂_i(√g g^{ij} ∂_j f)`.
pub fn lb_numeric(t: &TorusShape, f: &SurfaceGrid) -> SurfaceGrid {
    // √g g^{uu} = r D / r²
    divergence_form(t, f, |u| t.axis_distance(u) / t.r)
}

/// `(1/√g) ∂_i(√g K h^{ij} ∂_j f)`, with `h^{ij}` the inverse second form.
pub fn divbar_numeric(t: &TorusShape, f: &SurfaceGrid) -> SurfaceGrid {
    // √g K h^{uu} = r D · cos u / (r D) · 1/r
    divergence_form(t, f, |u| u.cos() / t.r)
}

/// `g^{uu} ∂_u f ∂_u g`, the metric product of the two gradients.
pub fn grad_dot_numeric(t: &TorusShape, f: &SurfaceGrid, g: &SurfaceGrid) -> Result<SurfaceGrid> {
    let fu = SurfaceGrid::from_values(spectral::derivative(&f.values))?;
    let gu = SurfaceGrid::from_values(spectral::derivative(&g.values))?;
    let r2 = t.r * t.r;
    fu.zip_with(&gu, |x, y| x * y / r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat_int;

    fn random_angles(n: usize) -> Vec<f64> {
        // fixed low-discrepancy sequence, no RNG needed
        (0..n)
            .map(|i| (i as f64 * 2.399963229728653) % (2.0 * PI))
            .collect()
    }

    #[test]
    fn curvature_examples() {
        let t = TorusShape::new(2.0, 1.0).unwrap();
        let (h, k) = t.curvatures(PI / 2.0);
        assert!((h - 0.5).abs() < 1e-15 && k.abs() < 1e-15);
        let (h, k) = t.curvatures(0.0);
        assert!((h - 2.0 / 3.0).abs() < 1e-15 && (k - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.fundamental_forms(0.0).g22, 9.0);
    }

    #[test]
    fn forms_reproduce_curvatures() {
        for (a, r) in [(2.0, 1.0), (3.7, 0.4), (1.1, 1.0)] {
            let t = TorusShape::new(a, r).unwrap();
            for u in random_angles(32) {
                let ff = t.fundamental_forms(u);
                let (h, k) = t.curvatures(u);
                assert!((ff.mean_curvature() - h).abs() < 1e-12);
                assert!((ff.gaussian_curvature() - k).abs() < 1e-12);
                assert!((r * r * k - 2.0 * r * h + 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_invalid_radii_and_grids() {
        assert!(TorusShape::new(1.0, 1.0).is_err());
        assert!(TorusShape::new(2.0, -1.0).is_err());
        assert!(TorusShape::from_exact(&rat_int(1), &rat_int(2)).is_err());
        assert!(SurfaceGrid::sample(15, |_| 0.0).is_err());
        assert!(SurfaceGrid::sample(8, |_| 0.0).is_err());
    }

    #[test]
    fn area_and_volume() {
        let t = TorusShape::new(2.0, 1.0).unwrap();
        let av = t.area_volume();
        assert!((av.area - 8.0 * PI * PI).abs() < 1e-12);
        assert!((av.volume - 4.0 * PI * PI).abs() < 1e-12);
        assert!((av.area_quadrature - av.area).abs() < 1e-12 * av.area);
        assert!((av.volume_quadrature - av.volume).abs() < 1e-12 * av.volume);
    }

    #[test]
    fn laplacian_of_cos_u() {
        let (a, r) = (3.0, 1.0);
        let t = TorusShape::new(a, r).unwrap();
        let f = SurfaceGrid::sample(64, f64::cos).unwrap();
        let lf = lb_numeric(&t, &f);
        assert!(!lf.accuracy_warning());
        // (1/(r²D)) ∂_u(-D sin u) = -(r(-sin u) sin u + D cos u)/(r²D)
        for (u, v) in nodes(64).iter().zip(lf.values()) {
            let d = a + r * u.cos();
            let exact = (r * u.sin().powi(2) - d * u.cos()) / (r * r * d);
            assert!((v - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let t = TorusShape::new(2.0, 1.0).unwrap();
        let f = SurfaceGrid::sample(16, |u| (8.0 * u).cos()).unwrap();
        assert!(lb_numeric(&t, &f).accuracy_warning());
        let g = SurfaceGrid::sample(16, |u| (3.0 * u).cos()).unwrap();
        assert!(!divbar_numeric(&t, &g).accuracy_warning());
    }

    #[test]
    fn divergence_forms_integrate_to_zero() {
        let t = TorusShape::new(1.7, 0.6).unwrap();
        let f = t.sample_curvature_field(128, |h, k| h.powi(3) + k).unwrap();
        let scale = f.max_abs();
        assert!(t.integrate(&lb_numeric(&t, &f)).abs() < 1e-10 * scale);
        assert!(t.integrate(&divbar_numeric(&t, &f)).abs() < 1e-10 * scale);
    }

    #[test]
    fn clifford_reduced_volume() {
        let t = TorusShape::new(2f64.sqrt(), 1.0).unwrap();
        let v = t.area_volume().reduced_volume;
        assert!((v - 0.7116).abs() < 1e-4);
        assert!((ratio_from_reduced_volume(v) - 2.0).abs() < 1e-12);
        let approx = 1.0 / (1.94 * v.powi(4));
        assert!((approx - 2.0).abs() < 0.02);
    }
}
