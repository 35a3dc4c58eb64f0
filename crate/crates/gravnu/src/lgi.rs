//! Leggett-Garg correlators and the `K3` parameter for the two-detector
//! radial setup.
//!
//! The initial state is fixed to a muon neutrino; measurements project onto
//! the flavor `alpha` at proper distances `{0, L_p, 2 L_p}`. Two independent
//! routes to `K3` are provided: amplitude-level closed forms ([`k3`],
//! [`correlation_endpoints`], [`correlation_middle`]) and an operator-algebra
//! oracle ([`k3_direct_oracle`]) that Heisenberg-evolves the dichotomic
//! observable `Q = 2|alpha><alpha| - 1` and takes anticommutator expectation
//! values. Their agreement to 1e-12 is part of the acceptance suite.

use num_complex::Complex64;

use crate::geometry::{
    detector_radius_exact, detector_radius_weak, ApproxMode, Direction, GravitySource,
    RadialStation,
};
use crate::oscillation::{
    evolution_matrix, phase_inward, phase_outward, EvolutionMatrix, Flavor, MassPhases, Mat2,
    OscillationParams,
};
use crate::units::phase_from_kinematics;
use crate::{Error, Result};

/// Which endpoint correlator baseline is meant: `C(0, L_p)` or `C(0, 2 L_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kappa {
    One,
    Two,
}

impl Kappa {
    fn factor(self) -> f64 {
        match self {
            Kappa::One => 1.0,
            Kappa::Two => 2.0,
        }
    }
}

/// The full two-detector radial measurement setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgiScenario {
    params: OscillationParams,
    source: GravitySource,
    direction: Direction,
    r_source_km: f64,
    baseline_km: f64,
    e0_inf_tev: f64,
    alpha: Flavor,
    approx: ApproxMode,
}

impl LgiScenario {
    /// Validates the geometric invariants up front: the source radius and
    /// both derived detector radii must lie outside the horizon, and inward
    /// scenarios need `2 L_p < r_source` so the doubled baseline fits.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: OscillationParams,
        source: GravitySource,
        direction: Direction,
        r_source_km: f64,
        baseline_km: f64,
        e0_inf_tev: f64,
        alpha: Flavor,
        approx: ApproxMode,
    ) -> Result<Self> {
        RadialStation::new(r_source_km, &source)?;
        if baseline_km < 0.0 || baseline_km.is_nan() {
            return Err(Error::NegativeLength(baseline_km));
        }
        if e0_inf_tev <= 0.0 || e0_inf_tev.is_nan() {
            return Err(Error::NonPositiveEnergy(e0_inf_tev));
        }
        if direction == Direction::Inward && 2.0 * baseline_km >= r_source_km {
            return Err(Error::InwardBaselineTooLong {
                baseline: 2.0 * baseline_km,
                r_source: r_source_km,
            });
        }
        let scenario = LgiScenario {
            params,
            source,
            direction,
            r_source_km,
            baseline_km,
            e0_inf_tev,
            alpha,
            approx,
        };
        // Both detector radii must exist outside the horizon.
        scenario.detector_radius(Kappa::One)?;
        scenario.detector_radius(Kappa::Two)?;
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

    pub fn e0_inf_tev(&self) -> f64 {
        self.e0_inf_tev
    }

    pub fn alpha(&self) -> Flavor {
        self.alpha
    }

    pub fn approx(&self) -> ApproxMode {
        self.approx
    }

    /// Same setup with a different energy at infinity (sweep support).
    pub fn with_energy(&self, e0_inf_tev: f64) -> Result<Self> {
        if e0_inf_tev <= 0.0 || e0_inf_tev.is_nan() {
            return Err(Error::NonPositiveEnergy(e0_inf_tev));
        }
        Ok(LgiScenario {
            e0_inf_tev,
            ..*self
        })
    }

    /// Same setup with the gravitational source replaced (flat comparison).
    pub fn with_source(&self, source: GravitySource) -> Result<Self> {
        LgiScenario::new(
            self.params,
            source,
            self.direction,
            self.r_source_km,
            self.baseline_km,
            self.e0_inf_tev,
            self.alpha,
            self.approx,
        )
    }

    fn detector_radius(&self, kappa: Kappa) -> Result<f64> {
        let l = kappa.factor() * self.baseline_km;
        match self.approx {
            ApproxMode::Weak => {
                detector_radius_weak(self.r_source_km, l, &self.source, self.direction)
            }
            ApproxMode::Exact => {
                detector_radius_exact(self.r_source_km, l, &self.source, self.direction)
            }
        }
    }

    /// Oscillation phase accumulated over `kappa * L_p`, referenced to the
    /// energy measured at infinity.
    pub fn phase(&self, kappa: Kappa) -> Result<f64> {
        let l = kappa.factor() * self.baseline_km;
        match self.approx {
            ApproxMode::Weak => match self.direction {
                Direction::Outward => phase_outward(
                    &self.params,
                    l,
                    self.e0_inf_tev,
                    self.r_source_km,
                    &self.source,
                ),
                Direction::Inward => phase_inward(
                    &self.params,
                    l,
                    self.e0_inf_tev,
                    self.r_source_km,
                    &self.source,
                ),
            },
            ApproxMode::Exact => {
                let r_b = self.detector_radius(kappa)?;
                let dr = (r_b - self.r_source_km).abs();
                phase_from_kinematics(
                    self.params.delta_m2(),
                    dr,
                    self.e0_inf_tev,
                    self.params.units(),
                )
            }
        }
    }

    /// Both oscillation phases `(Phi(L_p), Phi(2 L_p))`.
    pub fn phases(&self) -> Result<(f64, f64)> {
        Ok((self.phase(Kappa::One)?, self.phase(Kappa::Two)?))
    }

    /// Evolution matrices at the two baselines.
    pub fn evolution_matrices(&self) -> Result<(EvolutionMatrix, EvolutionMatrix)> {
        let (phi_l, phi_2l) = self.phases()?;
        Ok((
            evolution_matrix(self.params.theta(), &MassPhases::from_splitting(phi_l)),
            evolution_matrix(self.params.theta(), &MassPhases::from_splitting(phi_2l)),
        ))
    }
}

/// Endpoint correlator `C(0, kappa L_p)`: for `alpha = mu` this is
/// `2 P_surv - 1`, otherwise `1 - 2 P_trans`.
pub fn correlation_endpoints(scenario: &LgiScenario, kappa: Kappa) -> Result<f64> {
    let phi = scenario.phase(kappa)?;
    Ok(endpoints_from_phase(
        scenario.params.theta(),
        phi,
        scenario.alpha,
    ))
}

/// Middle correlator `C(L_p, 2 L_p)` from the amplitude-level closed form.
pub fn correlation_middle(scenario: &LgiScenario) -> Result<f64> {
    let (phi_l, phi_2l) = scenario.phases()?;
    Ok(middle_from_phases(
        scenario.params.theta(),
        phi_l,
        phi_2l,
        scenario.alpha,
    ))
}

/// `K3 = C(0, L_p) + C(L_p, 2 L_p) - C(0, 2 L_p)` via the per-flavor closed
/// forms in terms of probabilities and transition-matrix elements.
pub fn k3(scenario: &LgiScenario) -> Result<f64> {
    let (phi_l, phi_2l) = scenario.phases()?;
    Ok(k3_from_phases(
        scenario.params.theta(),
        phi_l,
        phi_2l,
        scenario.alpha,
    ))
}

/// Operator-algebra oracle for `K3`: builds `Q(L) = U†(L) Q U(L)` explicitly
/// as 2x2 complex matrices (with `U(0) = I`), evaluates the three
/// anticommutator correlators and sums them. Kept deliberately independent of
/// the amplitude-level closed forms.
pub fn k3_direct_oracle(scenario: &LgiScenario) -> Result<f64> {
    let (phi_l, phi_2l) = scenario.phases()?;
    Ok(k3_oracle_from_phases(
        scenario.params.theta(),
        phi_l,
        phi_2l,
        scenario.alpha,
    ))
}

/// Convenience bundle for one scenario evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgiEvaluation {
    pub c_0_l: f64,
    pub c_l_2l: f64,
    pub c_0_2l: f64,
    pub k3: f64,
    /// Strictly `K3 > 1`, no tolerance band.
    pub violates: bool,
}

/// Evaluates `K3` together with its three correlators and the violation flag.
pub fn evaluate(scenario: &LgiScenario) -> Result<LgiEvaluation> {
    let c_0_l = correlation_endpoints(scenario, Kappa::One)?;
    let c_l_2l = correlation_middle(scenario)?;
    let c_0_2l = correlation_endpoints(scenario, Kappa::Two)?;
    let k3 = k3(scenario)?;
    Ok(LgiEvaluation {
        c_0_l,
        c_l_2l,
        c_0_2l,
        k3,
        violates: k3 > 1.0,
    })
}

/// `C(0, kappa L_p)` from the phase alone.
pub fn endpoints_from_phase(theta: f64, phi: f64, alpha: Flavor) -> f64 {
    let u = evolution_matrix(theta, &MassPhases::from_splitting(phi));
    match alpha {
        Flavor::Muon => 2.0 * u.probability(Flavor::Muon, Flavor::Muon) - 1.0,
        Flavor::Electron => 1.0 - 2.0 * u.probability(Flavor::Electron, Flavor::Muon),
    }
}

/// `C(L_p, 2 L_p)` from the two phases.
///
/// Transcribes the simplified anticommutator expansion
///
/// ```text
/// C = 4 conj(U_ma[L]) U_am[L] conj(U_ma[2L]) U_am[2L]
///   + 2 conj(U_ma[L]) U_ae[L] conj(U_ea[2L]) U_am[2L]
///   + 2 conj(U_ma[2L]) U_ae[2L] conj(U_ea[L]) U_am[L]
///   - 2 P_ma[L] - 2 P_ma[2L] + 1
/// ```
///
/// whose imaginary parts cancel pairwise; the residue is asserted at 1e-12.
pub fn middle_from_phases(theta: f64, phi_l: f64, phi_2l: f64, alpha: Flavor) -> f64 {
    let u_l = evolution_matrix(theta, &MassPhases::from_splitting(phi_l));
    let u_2l = evolution_matrix(theta, &MassPhases::from_splitting(phi_2l));

    let u_ma_l = u_l.amplitude(Flavor::Muon, alpha);
    let u_ma_2l = u_2l.amplitude(Flavor::Muon, alpha);
    let u_am_l = u_l.amplitude(alpha, Flavor::Muon);
    let u_am_2l = u_2l.amplitude(alpha, Flavor::Muon);
    let u_ae_l = u_l.amplitude(alpha, Flavor::Electron);
    let u_ae_2l = u_2l.amplitude(alpha, Flavor::Electron);
    let u_ea_l = u_l.amplitude(Flavor::Electron, alpha);
    let u_ea_2l = u_2l.amplitude(Flavor::Electron, alpha);

    let p_l = u_l.probability(alpha, Flavor::Muon);
    let p_2l = u_2l.probability(alpha, Flavor::Muon);

    let c = 4.0 * u_ma_l.conj() * u_am_l * u_ma_2l.conj() * u_am_2l
        + 2.0 * u_ma_l.conj() * u_ae_l * u_ea_2l.conj() * u_am_2l
        + 2.0 * u_ma_2l.conj() * u_ae_2l * u_ea_l.conj() * u_am_l
        + Complex64::new(1.0 - 2.0 * p_l - 2.0 * p_2l, 0.0);
    assert!(
        c.im.abs() <= 1e-12,
        "imaginary residue {} in C(L_p, 2L_p)",
        c.im
    );
    c.re
}

/// `K3` from the two phases via the per-flavor closed forms:
///
/// ```text
/// alpha = e:  1 - 4 P_me[L]  + 4 P_me[L] P_me[2L] + 4 Re[X_e]
/// alpha = mu: 1 - 4 P_mm[2L] + 4 P_mm[L] P_mm[2L] + 4 Re[X_mu]
/// ```
///
/// with the cross term `X_a = conj(U_am[L]) U_ae[L] conj(U_ae[2L]) U_am[2L]`.
/// The conjugation pattern is the one that keeps the expression real and
/// reproduces the anticommutator oracle.
pub fn k3_from_phases(theta: f64, phi_l: f64, phi_2l: f64, alpha: Flavor) -> f64 {
    let u_l = evolution_matrix(theta, &MassPhases::from_splitting(phi_l));
    let u_2l = evolution_matrix(theta, &MassPhases::from_splitting(phi_2l));

    let u_am_l = u_l.amplitude(alpha, Flavor::Muon);
    let u_am_2l = u_2l.amplitude(alpha, Flavor::Muon);
    let u_ae_l = u_l.amplitude(alpha, Flavor::Electron);
    let u_ae_2l = u_2l.amplitude(alpha, Flavor::Electron);
    let cross = (u_am_l.conj() * u_ae_l * u_ae_2l.conj() * u_am_2l).re;

    match alpha {
        Flavor::Electron => {
            let p_l = u_l.probability(Flavor::Electron, Flavor::Muon);
            let p_2l = u_2l.probability(Flavor::Electron, Flavor::Muon);
            1.0 - 4.0 * p_l + 4.0 * p_l * p_2l + 4.0 * cross
        }
        Flavor::Muon => {
            let p_l = u_l.probability(Flavor::Muon, Flavor::Muon);
            let p_2l = u_2l.probability(Flavor::Muon, Flavor::Muon);
            1.0 - 4.0 * p_2l + 4.0 * p_l * p_2l + 4.0 * cross
        }
    }
}

/// Oracle route for `K3` from the two phases; see [`k3_direct_oracle`].
pub fn k3_oracle_from_phases(theta: f64, phi_l: f64, phi_2l: f64, alpha: Flavor) -> f64 {
    let u_l = evolution_matrix(theta, &MassPhases::from_splitting(phi_l));
    let u_2l = evolution_matrix(theta, &MassPhases::from_splitting(phi_2l));
    let q0 = dichotomic_observable(alpha);
    let q_l = heisenberg_observable(&q0, u_l.as_mat());
    let q_2l = heisenberg_observable(&q0, u_2l.as_mat());

    anticommutator_correlation(&q0, &q_l) + anticommutator_correlation(&q_l, &q_2l)
        - anticommutator_correlation(&q0, &q_2l)
}

/// `Q = 2 |alpha><alpha| - 1` in the flavor basis.
pub fn dichotomic_observable(alpha: Flavor) -> Mat2 {
    let mut q = Mat2::identity();
    q.m[0][0] = Complex64::new(-1.0, 0.0);
    q.m[1][1] = Complex64::new(-1.0, 0.0);
    q.m[alpha.index()][alpha.index()] = Complex64::new(1.0, 0.0);
    q
}

/// `Q(L) = U†(L) Q U(L)`.
pub fn heisenberg_observable(q: &Mat2, u: &Mat2) -> Mat2 {
    u.adjoint().mul(q).mul(u)
}

/// `<mu| (Q_a Q_b + Q_b Q_a) / 2 |mu>`; the imaginary residue is asserted at
/// 1e-12 and the real part returned.
pub fn anticommutator_correlation(q_a: &Mat2, q_b: &Mat2) -> f64 {
    let ab = q_a.mul(q_b);
    let ba = q_b.mul(q_a);
    let mu = Flavor::Muon;
    let c = 0.5 * (ab.sandwich(mu, mu) + ba.sandwich(mu, mu));
    assert!(
        c.im.abs() <= 1e-12,
        "imaginary residue {} in anticommutator correlation",
        c.im
    );
    c.re
}
