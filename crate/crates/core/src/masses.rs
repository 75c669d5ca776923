//! Mass spectra and the mass-scaled coordinate map.
//!
//! Particle `i` (1-based) sits at `x_i` with `x_1 < x_2 < ... < x_N`. The map
//! `z_i = sqrt(m_i / mu) x_i` turns the N particles into a single particle of
//! mass `mu` in N dimensions, where kinetic energy is isotropic and the
//! contact hyperplanes meet at angles fixed by the mass ratios.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt;

/// `5 - 2 sqrt(5)`, the constant shared by both families.
fn c5() -> f64 {
    5.0 - 2.0 * 5f64.sqrt()
}

/// Lower end of the family parameter range, `1 / (5 - 2 sqrt(5))`.
pub fn xi_min() -> f64 {
    1.0 / c5()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectrumLabel {
    H3,
    H4,
    Custom,
}

impl fmt::Display for SpectrumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumLabel::H3 => "H3",
            SpectrumLabel::H4 => "H4",
            SpectrumLabel::Custom => "Custom",
        })
    }
}

/// The two published mass families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    H3,
    H4,
}

impl Family {
    pub fn particles(self) -> usize {
        match self {
            Family::H3 => 4,
            Family::H4 => 5,
        }
    }

    /// Open interval of admissible `xi`.
    pub fn xi_range(self) -> (f64, f64) {
        match self {
            Family::H3 => (xi_min(), 3.0),
            Family::H4 => (xi_min(), 2.0),
        }
    }

    pub fn label(self) -> SpectrumLabel {
        match self {
            Family::H3 => SpectrumLabel::H3,
            Family::H4 => SpectrumLabel::H4,
        }
    }

    pub fn spectrum(self, xi: f64, m2: f64) -> Result<MassSpectrum> {
        match self {
            Family::H3 => h3_family(xi, m2),
            Family::H4 => h4_family(xi, m2),
        }
    }
}

/// Which end of the family interval a limit approaches. At the lower end the
/// leftmost mass diverges and becomes a wall on the left of the remaining
/// particles; at the upper end the rightmost mass does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wall {
    LeftWall,
    RightWall,
}

/// Ordered positive particle masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct MassSpectrum {
    label: SpectrumLabel,
    #[serde(serialize_with = "numfmt::reals")]
    masses: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    label: SpectrumLabel,
    masses: Vec<f64>,
}

impl TryFrom<RawSpectrum> for MassSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        MassSpectrum::new(raw.label, raw.masses)
    }
}

impl MassSpectrum {
    pub fn new(label: SpectrumLabel, masses: Vec<f64>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::domain(format!(
                "a spectrum needs at least 2 masses, got {}",
                masses.len()
            )));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::domain(format!(
                    "mass m{} = {m} must be positive and finite",
                    i + 1
                )));
            }
        }
        let expected = match label {
            SpectrumLabel::H3 => Some(4),
            SpectrumLabel::H4 => Some(5),
            SpectrumLabel::Custom => None,
        };
        if let Some(n) = expected {
            if masses.len() != n {
                return Err(Error::domain(format!(
                    "label {label} requires {n} masses, got {}",
                    masses.len()
                )));
            }
        }
        Ok(MassSpectrum { label, masses })
    }

    pub fn custom(masses: Vec<f64>) -> Result<Self> {
        Self::new(SpectrumLabel::Custom, masses)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::domain(format!("invalid spectrum JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }

    pub fn label(&self) -> SpectrumLabel {
        self.label
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Mass of particle `i`, 1-based.
    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i - 1]
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Masses of the four-body family whose contact planes meet at 36°, 60° and
/// 90°.
pub fn h3_family(xi: f64, m2: f64) -> Result<MassSpectrum> {
    let (m1, m3, m4) = h3_ratios(xi, m2, Family::H3)?;
    MassSpectrum::new(SpectrumLabel::H3, vec![m1 * m2, m2, m3 * m2, m4 * m2])
}

/// The five-body extension: one more particle whose contact plane meets the
/// last one at 60°.
pub fn h4_family(xi: f64, m2: f64) -> Result<MassSpectrum> {
    let (m1, m3, m4) = h3_ratios(xi, m2, Family::H4)?;
    let m5 = xi * (xi + 1.0) / ((3.0 - xi) * (2.0 - xi));
    MassSpectrum::new(
        SpectrumLabel::H4,
        vec![m1 * m2, m2, m3 * m2, m4 * m2, m5 * m2],
    )
}

fn h3_ratios(xi: f64, m2: f64, family: Family) -> Result<(f64, f64, f64)> {
    if !(m2.is_finite() && m2 > 0.0) {
        return Err(Error::domain(format!(
            "mass scale m2 = {m2} must be positive and finite"
        )));
    }
    let (lo, hi) = family.xi_range();
    if !xi.is_finite() {
        return Err(Error::domain(format!("xi = {xi} is not finite")));
    }
    if xi <= lo {
        return Err(Error::domain(format!(
            "xi = {xi} must exceed 1/(5-2*sqrt(5)) = {lo:.12}: mass m1 diverges at the lower end \
             and is negative below it"
        )));
    }
    if xi >= hi {
        let which = match family {
            Family::H3 => "m4",
            Family::H4 => "m5",
        };
        return Err(Error::domain(format!(
            "xi = {xi} must be below {hi}: mass {which} diverges at the upper end and is negative \
             above it"
        )));
    }
    let m1 = (xi + 1.0) / (c5() * xi - 1.0);
    let m4 = xi * (xi + 1.0) / (3.0 - xi);
    Ok((m1, xi, m4))
}

/// Reduced half-line problem left over when one end mass diverges.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingSpectrum {
    /// Finite masses in particle order, the diverged particle removed.
    pub spectrum: MassSpectrum,
    /// Index (1-based, in the full family) of the particle that became the wall.
    pub wall_particle: usize,
    /// The wall sits at the origin of the co-moving frame.
    pub wall_position: f64,
    pub wall: Wall,
}

/// Closed-form spectra of the half-line problems at either end of a family.
pub fn limiting_spectrum(family: Family, end: Wall, m2: f64) -> Result<LimitingSpectrum> {
    if !(m2.is_finite() && m2 > 0.0) {
        return Err(Error::domain(format!(
            "mass scale m2 = {m2} must be positive and finite"
        )));
    }
    let s5 = 5f64.sqrt();
    let ratios: Vec<f64> = match (family, end) {
        (Family::H3, Wall::LeftWall) => vec![1.0, 1.0 / c5(), 2.5 + 11.0 / (2.0 * s5)],
        (Family::H3, Wall::RightWall) => vec![2.0 / (7.0 - 3.0 * s5), 1.0, 3.0],
        (Family::H4, Wall::LeftWall) => vec![
            1.0,
            1.0 / c5(),
            2.5 + 11.0 / (2.0 * s5),
            (47.0 + 21.0 * s5) / 2.0,
        ],
        (Family::H4, Wall::RightWall) => vec![27.0 + 12.0 * s5, 1.0, 2.0, 6.0],
    };
    let wall_particle = match end {
        Wall::LeftWall => 1,
        Wall::RightWall => family.particles(),
    };
    let spectrum = MassSpectrum::custom(ratios.into_iter().map(|r| r * m2).collect())?;
    Ok(LimitingSpectrum {
        spectrum,
        wall_particle,
        wall_position: 0.0,
        wall: end,
    })
}

/// Mass-scaled coordinates attached to a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFrame {
    mu: f64,
    spectrum: MassSpectrum,
    e_com: DVector<f64>,
}

impl JacobiFrame {
    /// Frame with `mu = m2`.
    pub fn new(spectrum: MassSpectrum) -> Self {
        let mu = spectrum.mass(2);
        Self::with_mu(spectrum, mu).expect("m2 is a valid mass scale")
    }

    pub fn with_mu(spectrum: MassSpectrum, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::domain(format!(
                "mass scale mu = {mu} must be positive"
            )));
        }
        let total = spectrum.total();
        let e_com = DVector::from_iterator(
            spectrum.len(),
            spectrum.masses().iter().map(|m| (m / total).sqrt()),
        );
        let e_com = e_com.normalize();
        Ok(JacobiFrame {
            mu,
            spectrum,
            e_com,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn spectrum(&self) -> &MassSpectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    /// Unit vector along the center-of-mass direction in z space.
    pub fn e_com(&self) -> &DVector<f64> {
        &self.e_com
    }

    pub fn x_to_z(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim(), "position vector has wrong length");
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.spectrum.masses())
                .map(|(xi, m)| (m / self.mu).sqrt() * xi),
        )
    }

    pub fn z_to_x(&self, z: &DVector<f64>) -> DVector<f64> {
        assert_eq!(z.len(), self.dim(), "coordinate vector has wrong length");
        DVector::from_iterator(
            z.len(),
            z.iter()
                .zip(self.spectrum.masses())
                .map(|(zi, m)| (self.mu / m).sqrt() * zi),
        )
    }

    /// Center-of-mass position in physical units recovered from z.
    pub fn center_of_mass(&self, z: &DVector<f64>) -> f64 {
        (self.mu / self.spectrum.total()).sqrt() * self.e_com.dot(z)
    }

    /// Removes the center-of-mass component of z.
    pub fn relative_part(&self, z: &DVector<f64>) -> DVector<f64> {
        z - &self.e_com * self.e_com.dot(z)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn h3_at_two() {
        let s = h3_family(2.0, 1.0).unwrap();
        // 3 / (9 - 4 sqrt 5) rationalizes to 27 + 12 sqrt 5.
        let expected = [53.83281572999747635691, 1.0, 2.0, 6.0];
        for (m, e) in s.masses().iter().zip(expected) {
            assert!(rel(*m, e) < 1e-14, "{m} vs {e}");
        }
        assert_eq!(s.label(), SpectrumLabel::H3);
    }

    #[test]
    fn h4_at_one_point_nine() {
        // Independent 40-digit evaluation of the closed forms.
        let expected = [
            985.82938224095364908858,
            1.0,
            1.9,
            5.00909090909090909090,
            50.0909090909090909090,
        ];
        let s = h4_family(1.9, 1.0).unwrap();
        for (m, e) in s.masses().iter().zip(expected) {
            assert!(rel(*m, e) < 1e-12, "{m} vs {e}");
        }
    }

    #[test]
    fn endpoints_are_excluded() {
        let lo = xi_min();
        assert!((lo - (5.0 + 2.0 * 5f64.sqrt()) / 5.0).abs() < 1e-14);
        let e = h3_family(3.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("m4"), "{e}");
        let e = h3_family(lo, 1.0).unwrap_err();
        assert!(e.to_string().contains("m1"), "{e}");
        let e = h4_family(2.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("m5"), "{e}");
        assert!(h4_family(lo, 1.0).is_err());
        assert!(h3_family(1.0, 1.0).is_err());
        assert!(h3_family(3.5, 1.0).is_err());
        assert!(h3_family(2.0, 0.0).is_err());
        assert!(h3_family(2.0, -1.0).is_err());
        assert!(h3_family(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn masses_blow_up_near_endpoints() {
        for fam in [Family::H3, Family::H4] {
            let (lo, hi) = fam.xi_range();
            let near_lo = fam.spectrum(lo + 1e-7, 1.0).unwrap();
            assert!(near_lo.mass(1) > 1e6);
            let near_hi = fam.spectrum(hi - 1e-7, 1.0).unwrap();
            assert!(near_hi.mass(fam.particles()) > 1e6);
        }
    }

    #[test]
    fn limits_match_closed_forms() {
        let s5 = 5f64.sqrt();
        let l = limiting_spectrum(Family::H3, Wall::LeftWall, 1.0).unwrap();
        assert_eq!(l.wall_particle, 1);
        assert_eq!(l.wall_position, 0.0);
        assert!(rel(l.spectrum.mass(2), 1.894427190999915878563) < 1e-14);
        assert!(rel(l.spectrum.mass(3), 4.959674775249768666050) < 1e-14);
        let r = limiting_spectrum(Family::H3, Wall::RightWall, 1.0).unwrap();
        assert_eq!(r.wall_particle, 4);
        assert!(rel(r.spectrum.mass(1), 6.854101966249684544613) < 1e-14);
        assert_eq!(r.spectrum.mass(3), 3.0);
        let l = limiting_spectrum(Family::H4, Wall::LeftWall, 1.0).unwrap();
        assert!(rel(l.spectrum.mass(4), 46.97871376374779181229) < 1e-14);
        let r = limiting_spectrum(Family::H4, Wall::RightWall, 2.0).unwrap();
        assert!(rel(r.spectrum.mass(1), 2.0 * (27.0 + 12.0 * s5)) < 1e-14);
        assert_eq!(r.spectrum.masses()[1..], [2.0, 4.0, 12.0]);
        assert!(limiting_spectrum(Family::H3, Wall::LeftWall, 0.0).is_err());
    }

    #[test]
    fn limits_agree_with_family_formulas_at_the_ends() {
        // The finite masses of the family extend continuously to the ends.
        let lo = xi_min();
        let l = limiting_spectrum(Family::H4, Wall::LeftWall, 1.0).unwrap();
        let m4 = lo * (lo + 1.0) / (3.0 - lo);
        let m5 = m4 / (2.0 - lo);
        assert!(rel(l.spectrum.mass(2), lo) < 1e-14);
        assert!(rel(l.spectrum.mass(3), m4) < 1e-13);
        assert!(rel(l.spectrum.mass(4), m5) < 1e-12);
        let r = limiting_spectrum(Family::H3, Wall::RightWall, 1.0).unwrap();
        assert!(rel(r.spectrum.mass(1), 4.0 / (3.0 * c5() - 1.0)) < 1e-13);
    }

    #[test]
    fn spectrum_validation() {
        assert!(MassSpectrum::custom(vec![1.0]).is_err());
        assert!(MassSpectrum::custom(vec![1.0, 0.0]).is_err());
        assert!(MassSpectrum::custom(vec![1.0, f64::INFINITY]).is_err());
        assert!(MassSpectrum::new(SpectrumLabel::H3, vec![1.0; 5]).is_err());
        assert!(MassSpectrum::new(SpectrumLabel::H4, vec![1.0; 5]).is_ok());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = h4_family(1.95, 3.0).unwrap();
        let text = s.to_json();
        assert!(text.starts_with(r#"{"label":"H4","masses":["#), "{text}");
        assert_eq!(MassSpectrum::from_json(&text).unwrap(), s);
        assert!(MassSpectrum::from_json(r#"{"label":"Custom","masses":[1,-2]}"#).is_err());
        assert!(MassSpectrum::from_json(r#"{"label":"H3","masses":[1,2]}"#).is_err());
        assert!(MassSpectrum::from_json(r#"{"label":"X","masses":[1,2]}"#).is_err());
        let c = MassSpectrum::from_json(r#"{"label":"Custom","masses":[1,2.5]}"#).unwrap();
        assert_eq!(c.masses(), &[1.0, 2.5]);
    }

    #[test]
    fn equal_masses_give_identity_map() {
        let f = JacobiFrame::new(MassSpectrum::custom(vec![1.0; 4]).unwrap());
        let x = DVector::from_vec(vec![-1.0, 0.5, 2.0, 7.0]);
        assert_eq!(f.x_to_z(&x), x);
        let zero = DVector::zeros(4);
        assert_eq!(f.x_to_z(&zero), zero);
    }

    proptest! {
        #[test]
        fn h4_extends_h3(t in 0.0001f64..0.9999) {
            let (lo, hi) = Family::H4.xi_range();
            let xi = lo + t * (hi - lo);
            let a = h3_family(xi, 1.0).unwrap();
            let b = h4_family(xi, 1.0).unwrap();
            prop_assert_eq!(a.masses(), &b.masses()[..4]);
            prop_assert!(b.masses().iter().all(|m| m.is_finite() && *m > 0.0));
        }

        #[test]
        fn x_z_round_trip_and_com(
            masses in proptest::collection::vec(0.01f64..100.0, 2..7),
            seed in proptest::collection::vec(-10.0f64..10.0, 7),
            mu in 0.1f64..10.0,
        ) {
            let n = masses.len();
            let spectrum = MassSpectrum::custom(masses.clone()).unwrap();
            let f = JacobiFrame::with_mu(spectrum, mu).unwrap();
            prop_assert!((f.e_com().norm() - 1.0).abs() < 1e-12);
            let x = DVector::from_iterator(n, seed.iter().copied().take(n));
            let back = f.z_to_x(&f.x_to_z(&x));
            for (a, b) in back.iter().zip(x.iter()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
            let total: f64 = masses.iter().sum();
            let com: f64 = masses.iter().zip(x.iter()).map(|(m, x)| m * x).sum::<f64>() / total;
            let z = f.x_to_z(&x);
            prop_assert!((f.center_of_mass(&z) - com).abs() < 1e-11 * (1.0 + com.abs()));
            let direct = f.e_com().dot(&z);
            prop_assert!((direct - com * total / (mu * total).sqrt()).abs() < 1e-10 * (1.0 + direct.abs()));
        }
    }
}
