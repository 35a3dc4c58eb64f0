//! Two-flavor mixing, gravitationally corrected oscillation phases, and the
//! flavor-space evolution matrix.
//!
//! Phase conventions: only the difference `Phi_21 = phi2 - phi1` is physical;
//! every exported observable is invariant under a common shift of both mass
//! phases. All closed forms here are first order in `GM/r`; the flat limit
//! `GM = 0` reproduces the flat-space phase bitwise because the correction
//! brackets collapse to exactly 1.

use num_complex::Complex64;

use crate::geometry::GravitySource;
use crate::units::{phase_from_kinematics, UnitsMode};
use crate::{Error, Result};

/// Neutrino flavor label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Electron,
    Muon,
}

impl Flavor {
    pub fn index(self) -> usize {
        match self {
            Flavor::Electron => 0,
            Flavor::Muon => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Electron => "e",
            Flavor::Muon => "mu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "e" => Some(Flavor::Electron),
            "mu" => Some(Flavor::Muon),
            _ => None,
        }
    }
}

/// Mixing angle, mass-squared splitting and the unit convention they are
/// evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationParams {
    theta: f64,
    delta_m2: f64,
    units: UnitsMode,
}

impl OscillationParams {
    /// `theta` in radians within [0, pi/2]; `delta_m2` in eV² (either sign,
    /// probabilities depend on it only through sin²).
    pub fn new(theta: f64, delta_m2: f64, units: UnitsMode) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(OscillationParams {
            theta,
            delta_m2,
            units,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta_m2(&self) -> f64 {
        self.delta_m2
    }

    pub fn units(&self) -> UnitsMode {
        self.units
    }
}

/// Per-eigenstate propagation phases; by convention `phi1 = 0` and `phi2`
/// carries the splitting unless the caller overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPhases {
    pub phi1: f64,
    pub phi2: f64,
}

impl MassPhases {
    /// Phases `{0, phi21}` from the relative phase alone.
    pub fn from_splitting(phi21: f64) -> Self {
        MassPhases {
            phi1: 0.0,
            phi2: phi21,
        }
    }

    pub fn splitting(&self) -> f64 {
        self.phi2 - self.phi1
    }
}

/// A 2x2 complex matrix in the flavor basis, row/column order (e, mu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            m: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        Mat2 { m: out }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2 {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][j] - rhs.m[i][j];
            }
        }
        Mat2 { m: out }
    }

    /// Max-norm over entries, `max |m_ij|`.
    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `<bra| M |ket>` with basis vectors labeled by flavor.
    pub fn sandwich(&self, bra: Flavor, ket: Flavor) -> Complex64 {
        self.m[bra.index()][ket.index()]
    }
}

/// Flavor-space transition-amplitude matrix
/// `U_{dl}(L) = sum_k U*_{dk} exp(-i phi_k) U_{lk}`; unitary and, for the
/// real two-flavor mixing matrix, symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionMatrix {
    mat: Mat2,
}

impl EvolutionMatrix {
    /// Amplitude to detect flavor `detected` given initial flavor `initial`.
    pub fn amplitude(&self, detected: Flavor, initial: Flavor) -> Complex64 {
        self.mat.m[detected.index()][initial.index()]
    }

    /// `P(initial -> detected) = |amplitude|²`.
    pub fn probability(&self, detected: Flavor, initial: Flavor) -> f64 {
        self.amplitude(detected, initial).norm_sqr()
    }

    pub fn as_mat(&self) -> &Mat2 {
        &self.mat
    }

    /// `max |(U†U - I)_ij|`, should be at rounding level for any phases.
    pub fn unitarity_defect(&self) -> f64 {
        self.mat
            .adjoint()
            .mul(&self.mat)
            .sub(&Mat2::identity())
            .max_norm()
    }
}

/// Real orthogonal two-flavor mixing matrix
/// `[[cos th, sin th], [-sin th, cos th]]`, rows indexed by flavor (e, mu)
/// and columns by mass eigenstate (1, 2).
pub fn mixing_matrix(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// Evolution matrix from the mixing angle and the two mass-eigenstate phases.
pub fn evolution_matrix(theta: f64, phases: &MassPhases) -> EvolutionMatrix {
    let u = mixing_matrix(theta);
    let e1 = Complex64::from_polar(1.0, -phases.phi1);
    let e2 = Complex64::from_polar(1.0, -phases.phi2);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (d, row) in m.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            *cell = e1 * u[d][0] * u[l][0] + e2 * u[d][1] * u[l][1];
        }
    }
    EvolutionMatrix { mat: Mat2 { m } }
}

/// Two-flavor transition probability `sin²(2 theta) sin²(delta_phase / 2)`.
pub fn transition_probability(theta: f64, delta_phase: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    s2 * s2 * (0.5 * delta_phase).sin().powi(2)
}

/// Survival probability `1 - P_transition`.
pub fn survival_probability(theta: f64, delta_phase: f64) -> f64 {
    1.0 - transition_probability(theta, delta_phase)
}

/// Flat-space kinematic phase over a baseline `l` km at energy `e0` TeV.
pub fn phase_flat(params: &OscillationParams, l: f64, e0: f64) -> Result<f64> {
    phase_from_kinematics(params.delta_m2, l, e0, params.units)
}

/// General first-order curved phase referenced to the local energy at the
/// detector:
///
/// ```text
/// Phi = Phi_flat(L_p, E_loc) * [1 - GM (ln(r_b/r_a)/L_p - 1/r_b)]
/// ```
pub fn phase_curved_general(
    params: &OscillationParams,
    l_p: f64,
    e_loc: f64,
    r_a: f64,
    r_b: f64,
    source: &GravitySource,
) -> Result<f64> {
    let flat = phase_flat(params, l_p, e_loc)?;
    if l_p == 0.0 {
        return Ok(flat);
    }
    crate::geometry::metric_potential(r_a, source)?;
    crate::geometry::metric_potential(r_b, source)?;
    let correction = 1.0 - source.gm_km() * ((r_b / r_a).ln() / l_p - 1.0 / r_b);
    Ok(flat * correction)
}

/// First-order phase for outward radial propagation, referenced to the
/// energy at infinity:
///
/// ```text
/// Phi(L_p) = Phi_flat(L_p, E0) * [1 - (GM / L_p) ln(L_p/r_a + 1)]
/// ```
///
/// The doubled-baseline phase is the same formula at `2 L_p`.
pub fn phase_outward(
    params: &OscillationParams,
    l_p: f64,
    e0_inf: f64,
    r_a: f64,
    source: &GravitySource,
) -> Result<f64> {
    let flat = phase_flat(params, l_p, e0_inf)?;
    if l_p == 0.0 {
        return Ok(flat);
    }
    crate::geometry::metric_potential(r_a, source)?;
    let correction = 1.0 - source.gm_km() * (l_p / r_a + 1.0).ln() / l_p;
    Ok(flat * correction)
}

/// First-order phase for inward radial propagation from `r_a'`:
///
/// ```text
/// Phi(L_p) = Phi_flat(L_p, E0) * [1 + (GM / L_p) ln(1 - L_p/r_a')]
/// ```
///
/// The log argument must stay positive, so `l_p < r_a'` is required.
pub fn phase_inward(
    params: &OscillationParams,
    l_p: f64,
    e0_inf: f64,
    r_a_prime: f64,
    source: &GravitySource,
) -> Result<f64> {
    let flat = phase_flat(params, l_p, e0_inf)?;
    if l_p == 0.0 {
        return Ok(flat);
    }
    crate::geometry::metric_potential(r_a_prime, source)?;
    if l_p >= r_a_prime {
        return Err(Error::InwardBaselineTooLong {
            baseline: l_p,
            r_source: r_a_prime,
        });
    }
    // Keep the derived detector radius honest as well.
    crate::geometry::detector_radius_weak(
        r_a_prime,
        l_p,
        source,
        crate::geometry::Direction::Inward,
    )?;
    let correction = 1.0 + source.gm_km() * (1.0 - l_p / r_a_prime).ln() / l_p;
    Ok(flat * correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(units: UnitsMode) -> OscillationParams {
        OscillationParams::new(0.59, 7.92e-5, units).unwrap()
    }

    fn paper_figure() -> OscillationParams {
        params(UnitsMode::PaperFigure)
    }

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want}");
    }

    #[test]
    fn params_reject_out_of_range_theta() {
        assert!(OscillationParams::new(-0.1, 1.0, UnitsMode::Physical).is_err());
        assert!(OscillationParams::new(FRAC_PI_2 + 0.1, 1.0, UnitsMode::Physical).is_err());
        // Negative splitting is allowed.
        assert!(OscillationParams::new(0.3, -7.92e-5, UnitsMode::Physical).is_ok());
    }

    #[test]
    fn mixing_matrix_special_angles() {
        let id = mixing_matrix(0.0);
        assert_eq!(id, [[1.0, 0.0], [-0.0, 1.0]]);
        for row in mixing_matrix(FRAC_PI_4) {
            for entry in row {
                assert_close(entry.abs(), std::f64::consts::FRAC_1_SQRT_2, 1e-15);
            }
        }
        let u = mixing_matrix(0.59);
        assert_close(u[0][0], 0.830941, 1e-6);
        assert_close(u[0][1], 0.556361, 1e-6);
        // Orthogonal with determinant +1.
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert_close(det, 1.0, 1e-15);
    }

    #[test]
    fn evolution_matrix_trivial_cases() {
        let diag = evolution_matrix(
            0.0,
            &MassPhases {
                phi1: 0.3,
                phi2: 1.1,
            },
        );
        assert_close(
            diag.amplitude(Flavor::Electron, Flavor::Muon).norm(),
            0.0,
            1e-15,
        );
        assert_close(
            (diag.amplitude(Flavor::Electron, Flavor::Electron) - Complex64::from_polar(1.0, -0.3))
                .norm(),
            0.0,
            1e-15,
        );

        let global = evolution_matrix(
            0.7,
            &MassPhases {
                phi1: 0.9,
                phi2: 0.9,
            },
        );
        let expected = Complex64::from_polar(1.0, -0.9);
        for f in [Flavor::Electron, Flavor::Muon] {
            assert_close((global.amplitude(f, f) - expected).norm(), 0.0, 1e-12);
        }

        let swap = evolution_matrix(
            FRAC_PI_4,
            &MassPhases {
                phi1: 0.0,
                phi2: PI,
            },
        );
        assert_close(
            swap.amplitude(Flavor::Electron, Flavor::Electron).norm(),
            0.0,
            1e-12,
        );
        assert_close(
            swap.amplitude(Flavor::Electron, Flavor::Muon).norm(),
            1.0,
            1e-12,
        );
    }

    #[test]
    fn evolution_matrix_is_unitary_and_conserves_probability() {
        for theta in [0.0, 0.2, 0.59, FRAC_PI_4, FRAC_PI_2] {
            for phi2 in [0.0, 0.4, 2.0, 11.7] {
                let u = evolution_matrix(theta, &MassPhases { phi1: 0.0, phi2 });
                assert!(u.unitarity_defect() <= 1e-12);
                for initial in [Flavor::Electron, Flavor::Muon] {
                    let total = u.probability(Flavor::Electron, initial)
                        + u.probability(Flavor::Muon, initial);
                    assert_close(total, 1.0, 1e-12);
                }
            }
        }
    }

    #[test]
    fn transition_probability_matches_matrix_element() {
        for theta in [0.1, 0.59, 1.2] {
            for dphi in [0.0, 0.5, 2.4, 9.9] {
                let u = evolution_matrix(theta, &MassPhases::from_splitting(dphi));
                let via_matrix = u.probability(Flavor::Electron, Flavor::Muon);
                assert_close(transition_probability(theta, dphi), via_matrix, 1e-12);
            }
        }
    }

    #[test]
    fn transition_probability_values() {
        assert_close(transition_probability(FRAC_PI_4, PI), 1.0, 1e-15);
        assert_close(transition_probability(0.77, 0.0), 0.0, 1e-15);
        // sin²(1.18), direct evaluation.
        assert_close(transition_probability(0.59, PI), 0.854896278181, 1e-9);
    }

    #[test]
    fn phase_flat_delegates_to_units() {
        let phys = params(UnitsMode::Physical);
        assert_close(phase_flat(&phys, 3.0e8, 300.0).unwrap(), 0.40136, 1e-5);
        assert_close(
            phase_flat(&paper_figure(), 3.0e8, 300.0).unwrap(),
            39.6,
            1e-10,
        );
        let zero = OscillationParams::new(0.59, 0.0, UnitsMode::Physical).unwrap();
        assert_eq!(phase_flat(&zero, 3.0e8, 300.0).unwrap(), 0.0);
    }

    #[test]
    fn phase_outward_matches_arithmetic() {
        let source = GravitySource::new(3.0e7).unwrap();
        let got = phase_outward(&paper_figure(), 3.0e8, 300.0, 1.0e8, &source).unwrap();
        let want = 39.6 * (1.0 - 0.1 * 4.0_f64.ln());
        assert_close(got, want, 1e-12);
        assert_close(want, 34.110274, 1e-5);

        let got2 = phase_outward(&paper_figure(), 6.0e8, 300.0, 1.0e8, &source).unwrap();
        let want2 = 79.2 * (1.0 - 0.05 * 7.0_f64.ln());
        assert_close(got2, want2, 1e-12);
        assert_close(want2, 71.494196, 1e-5);
    }

    #[test]
    fn phase_inward_matches_arithmetic() {
        let source = GravitySource::new(3.0e7).unwrap();
        let got = phase_inward(&paper_figure(), 3.0e8, 300.0, 6.5e8, &source).unwrap();
        let want = 39.6 * (1.0 + 0.1 * (1.0 - 3.0 / 6.5_f64).ln());
        assert_close(got, want, 1e-12);
        assert_close(want, 37.148605, 1e-5);

        let got2 = phase_inward(&paper_figure(), 6.0e8, 300.0, 6.5e8, &source).unwrap();
        let want2 = 79.2 * (1.0 + 0.05 * (1.0 - 6.0 / 6.5_f64).ln());
        assert_close(got2, want2, 1e-12);
        assert_close(want2, 69.042800, 1e-5);
    }

    #[test]
    fn phase_inward_rejects_long_baseline() {
        let source = GravitySource::new(3.0e7).unwrap();
        assert!(matches!(
            phase_inward(&paper_figure(), 6.5e8, 300.0, 6.5e8, &source),
            Err(Error::InwardBaselineTooLong { .. })
        ));
    }

    #[test]
    fn gm_zero_reduces_to_flat_bitwise() {
        let flat_src = GravitySource::flat();
        for l_p in [0.0, 1.0e7, 3.0e8, 9.9e8] {
            for e0 in [150.0, 300.0, 500.0] {
                let flat = phase_flat(&paper_figure(), l_p, e0).unwrap();
                let out = phase_outward(&paper_figure(), l_p, e0, 1.0e8, &flat_src).unwrap();
                let inw = phase_inward(&paper_figure(), l_p, e0, 1.5e9, &flat_src).unwrap();
                assert_eq!(flat, out);
                assert_eq!(flat, inw);
            }
        }
    }

    #[test]
    fn phase_curved_general_flat_reduction_and_sign() {
        let params = paper_figure();
        let flat_src = GravitySource::flat();
        assert_eq!(
            phase_curved_general(&params, 3.0e8, 300.0, 1.0e8, 4.0e8, &flat_src).unwrap(),
            phase_flat(&params, 3.0e8, 300.0).unwrap()
        );

        let source = GravitySource::new(3.0e7).unwrap();
        let r_b = crate::geometry::detector_radius_weak(
            1.0e8,
            3.0e8,
            &source,
            crate::geometry::Direction::Outward,
        )
        .unwrap();
        let got = phase_curved_general(&params, 3.0e8, 300.0, 1.0e8, r_b, &source).unwrap();
        let want = 39.6 * (1.0 - 3.0e7 * ((r_b / 1.0e8).ln() / 3.0e8 - 1.0 / r_b));
        assert_close(got, want, 1e-12);
        // Outward correction reduces the phase.
        assert!(got < 39.6);
    }

    #[test]
    fn global_phase_shift_leaves_magnitudes_unchanged() {
        for delta in [0.0, 0.9, -4.2] {
            let a = evolution_matrix(
                0.59,
                &MassPhases {
                    phi1: 0.0,
                    phi2: 2.2,
                },
            );
            let b = evolution_matrix(
                0.59,
                &MassPhases {
                    phi1: delta,
                    phi2: 2.2 + delta,
                },
            );
            for d in [Flavor::Electron, Flavor::Muon] {
                for l in [Flavor::Electron, Flavor::Muon] {
                    assert_close(a.amplitude(d, l).norm(), b.amplitude(d, l).norm(), 1e-12);
                }
            }
        }
    }
}
