//! l1-norm quantum coherence of the evolved flavor state.
//!
//! Two routes are kept side by side: [`l1_norm`] sums the off-diagonal
//! magnitudes of the density matrix built by [`evolve_density`], while
//! [`coherence_mu`] uses the pure-state shortcut
//! `C_mu = 2 sqrt(P_trans P_surv)` with the gravitationally corrected
//! probabilities referenced to the local energy at the detector. Testing both
//! catches transcription errors in either.

use num_complex::Complex64;

use crate::geometry::{
    detector_radius_exact, detector_radius_weak, metric_potential, ApproxMode, Direction,
    GravitySource, RadialStation,
};
use crate::oscillation::{
    evolution_matrix, transition_probability, Flavor, MassPhases, Mat2, OscillationParams,
};
use crate::units::phase_from_kinematics;
use crate::{Error, Result};

/// A 2x2 flavor-basis density matrix (Hermitian, unit trace, PSD).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlavorDensityMatrix {
    mat: Mat2,
}

const DENSITY_TOL: f64 = 1e-12;

impl FlavorDensityMatrix {
    /// Wraps a raw matrix after checking Hermiticity, unit trace, and
    /// positive semidefiniteness at 1e-12.
    pub fn new(mat: Mat2) -> Result<Self> {
        let hermitian_defect = mat.sub(&mat.adjoint()).max_norm();
        if hermitian_defect > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {hermitian_defect:.3e})"
            )));
        }
        let trace = mat.m[0][0] + mat.m[1][1];
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace is {} + {}i, expected 1",
                trace.re, trace.im
            )));
        }
        // Eigenvalues of a 2x2 Hermitian matrix.
        let det = (mat.m[0][0] * mat.m[1][1] - mat.m[0][1] * mat.m[1][0]).re;
        let disc = (trace.re * trace.re - 4.0 * det).max(0.0).sqrt();
        let min_eig = 0.5 * (trace.re - disc);
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(FlavorDensityMatrix { mat })
    }

    pub fn entry(&self, row: Flavor, col: Flavor) -> Complex64 {
        self.mat.m[row.index()][col.index()]
    }

    pub fn as_mat(&self) -> &Mat2 {
        &self.mat
    }
}

/// Pure-state density matrix of the evolved flavor state: the initial flavor
/// column of the evolution matrix, outer-multiplied with its conjugate.
pub fn evolve_density(
    theta: f64,
    phases: &MassPhases,
    initial_flavor: Flavor,
) -> FlavorDensityMatrix {
    let u = evolution_matrix(theta, phases);
    let amp_e = u.amplitude(Flavor::Electron, initial_flavor);
    let amp_mu = u.amplitude(Flavor::Muon, initial_flavor);
    let v = [amp_e, amp_mu];
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = v[i] * v[j].conj();
        }
    }
    // Unitary evolution of a basis state always satisfies the invariants.
    FlavorDensityMatrix::new(Mat2 { m }).expect("pure state density matrix")
}

/// l1-norm of coherence: the sum of off-diagonal magnitudes, in [0, 1] for a
/// valid 2x2 density matrix.
pub fn l1_norm(rho: &FlavorDensityMatrix) -> f64 {
    rho.entry(Flavor::Electron, Flavor::Muon).norm()
        + rho.entry(Flavor::Muon, Flavor::Electron).norm()
}

/// Propagation setup for the coherence observable. Unlike the `K3` setup,
/// the phase is referenced to the local energy `E_loc` measured at the
/// detector, and only the single baseline `L_p` is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceScenario {
    params: OscillationParams,
    source: GravitySource,
    direction: Direction,
    r_source_km: f64,
    baseline_km: f64,
    e_loc_tev: f64,
    approx: ApproxMode,
}

impl CoherenceScenario {
    pub fn new(
        params: OscillationParams,
        source: GravitySource,
        direction: Direction,
        r_source_km: f64,
        baseline_km: f64,
        e_loc_tev: f64,
        approx: ApproxMode,
    ) -> Result<Self> {
        RadialStation::new(r_source_km, &source)?;
        if baseline_km < 0.0 || baseline_km.is_nan() {
            return Err(Error::NegativeLength(baseline_km));
        }
        if e_loc_tev <= 0.0 || e_loc_tev.is_nan() {
            return Err(Error::NonPositiveEnergy(e_loc_tev));
        }
        let scenario = CoherenceScenario {
            params,
            source,
            direction,
            r_source_km,
            baseline_km,
            e_loc_tev,
            approx,
        };
        scenario.detector_radius()?;
        Ok(scenario)
    }

    pub fn params(&self) -> &OscillationParams {
        &self.params
    }

    pub fn source(&self) -> &GravitySource {
        &self.source
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn r_source_km(&self) -> f64 {
        self.r_source_km
    }

    pub fn baseline_km(&self) -> f64 {
        self.baseline_km
    }

    pub fn e_loc_tev(&self) -> f64 {
        self.e_loc_tev
    }

    pub fn approx(&self) -> ApproxMode {
        self.approx
    }

    /// Same setup with a different proper baseline (sweep support).
    pub fn with_baseline(&self, baseline_km: f64) -> Result<Self> {
        CoherenceScenario::new(
            self.params,
            self.source,
            self.direction,
            self.r_source_km,
            baseline_km,
            self.e_loc_tev,
            self.approx,
        )
    }

    /// Same setup with the gravitational source replaced (flat comparison).
    pub fn with_source(&self, source: GravitySource) -> Result<Self> {
        CoherenceScenario::new(
            self.params,
            source,
            self.direction,
            self.r_source_km,
            self.baseline_km,
            self.e_loc_tev,
            self.approx,
        )
    }

    fn detector_radius(&self) -> Result<f64> {
        match self.approx {
            ApproxMode::Weak => detector_radius_weak(
                self.r_source_km,
                self.baseline_km,
                &self.source,
                self.direction,
            ),
            ApproxMode::Exact => detector_radius_exact(
                self.r_source_km,
                self.baseline_km,
                &self.source,
                self.direction,
            ),
        }
    }

    /// The gravitationally corrected oscillation phase referenced to `E_loc`:
    ///
    /// ```text
    /// outward: Phi_flat(L_p, E_loc) [1 - GM (ln(L_p/r_a + 1)/L_p - 1/(L_p + r_a))]
    /// inward:  Phi_flat(L_p, E_loc) [1 + GM (ln(1 - L_p/r_a)/L_p + 1/(L_p + r_a))]
    /// ```
    ///
    /// The extra `1/(L_p + r_a)` terms relative to the `K3` phases come from
    /// rewriting the energy at infinity in terms of the local energy.
    pub fn phase(&self) -> Result<f64> {
        let l_p = self.baseline_km;
        let r_a = self.r_source_km;
        let gm = self.source.gm_km();
        match self.approx {
            ApproxMode::Weak => {
                let flat = phase_from_kinematics(
                    self.params.delta_m2(),
                    l_p,
                    self.e_loc_tev,
                    self.params.units(),
                )?;
                if l_p == 0.0 {
                    return Ok(flat);
                }
                if self.direction == Direction::Inward && l_p >= r_a {
                    return Err(Error::InwardBaselineTooLong {
                        baseline: l_p,
                        r_source: r_a,
                    });
                }
                let correction = match self.direction {
                    Direction::Outward => {
                        1.0 - gm * ((l_p / r_a + 1.0).ln() / l_p - 1.0 / (l_p + r_a))
                    }
                    Direction::Inward => {
                        1.0 + gm * ((1.0 - l_p / r_a).ln() / l_p + 1.0 / (l_p + r_a))
                    }
                };
                Ok(flat * correction)
            }
            ApproxMode::Exact => {
                // Exact inversion for the detector radius, exact blueshift
                // back to the energy at infinity.
                let r_b = self.detector_radius()?;
                let e0_inf = self.e_loc_tev * metric_potential(r_b, &self.source)?.sqrt();
                phase_from_kinematics(
                    self.params.delta_m2(),
                    (r_b - r_a).abs(),
                    e0_inf,
                    self.params.units(),
                )
            }
        }
    }
}

/// `C_mu = 2 sqrt(P_trans P_surv)` for an initial muon neutrino, equal to the
/// l1-norm of the evolved density matrix.
pub fn coherence_mu(scenario: &CoherenceScenario) -> Result<f64> {
    let phi = scenario.phase()?;
    let p_trans = transition_probability(scenario.params.theta(), phi);
    let p_surv = 1.0 - p_trans;
    Ok(2.0 * (p_trans * p_surv).sqrt())
}
