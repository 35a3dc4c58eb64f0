//! Built-in verification suites: oracle equivalence, unitarity, flat-limit
//! reduction, inversion round trips, and input validation. Deterministic for
//! a given seed.

use gravnu::coherence::{coherence_mu, evolve_density, l1_norm, CoherenceScenario};
use gravnu::geometry::*;
use gravnu::lgi::{k3_from_phases, k3_oracle_from_phases, LgiScenario};
use gravnu::oscillation::*;
use gravnu::sweep::{DEFAULT_DELTA_M2_EV2, DEFAULT_THETA};
use gravnu::units::UnitsMode;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// SplitMix64; deterministic across platforms for a fixed seed.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    fn flavor(&mut self) -> Flavor {
        if self.next_u64().is_multiple_of(2) {
            Flavor::Electron
        } else {
            Flavor::Muon
        }
    }
}

struct Suite {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn default_params() -> OscillationParams {
    OscillationParams::new(DEFAULT_THETA, DEFAULT_DELTA_M2_EV2, UnitsMode::PaperFigure).unwrap()
}

fn oracle_equivalence(rng: &mut SplitMix64) -> Suite {
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let theta = rng.range(0.0, std::f64::consts::FRAC_PI_2);
        let phi_l = rng.range(0.0, FOUR_PI);
        let phi_2l = rng.range(0.0, FOUR_PI);
        let alpha = rng.flavor();
        worst = worst.max(
            (k3_from_phases(theta, phi_l, phi_2l, alpha)
                - k3_oracle_from_phases(theta, phi_l, phi_2l, alpha))
            .abs(),
        );
    }
    for _ in 0..100 {
        let (direction, r_source) = if rng.next_u64().is_multiple_of(2) {
            (Direction::Outward, 1.0e8)
        } else {
            (Direction::Inward, 6.5e8)
        };
        let gm = if rng.next_u64().is_multiple_of(2) {
            0.0
        } else {
            3.0e7
        };
        let scenario = LgiScenario::new(
            default_params(),
            GravitySource::new(gm).unwrap(),
            direction,
            r_source,
            3.0e8,
            rng.range(150.0, 500.0),
            rng.flavor(),
            ApproxMode::Weak,
        )
        .unwrap();
        worst = worst.max(
            (gravnu::lgi::k3(&scenario).unwrap()
                - gravnu::lgi::k3_direct_oracle(&scenario).unwrap())
            .abs(),
        );
    }
    Suite {
        name: "oracle-equivalence",
        pass: worst <= 1e-12,
        detail: format!("max |k3 - oracle| = {worst:.3e} (600 cases)"),
    }
}

fn unitarity(rng: &mut SplitMix64) -> Suite {
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let theta = rng.range(0.0, std::f64::consts::FRAC_PI_2);
        let phi2 = rng.range(-FOUR_PI, FOUR_PI);
        let u = evolution_matrix(theta, &MassPhases::from_splitting(phi2));
        worst = worst.max(u.unitarity_defect());
        for initial in [Flavor::Electron, Flavor::Muon] {
            let total =
                u.probability(Flavor::Electron, initial) + u.probability(Flavor::Muon, initial);
            worst = worst.max((total - 1.0).abs());
        }
    }
    Suite {
        name: "unitarity",
        pass: worst <= 1e-12,
        detail: format!("max defect = {worst:.3e} (500 matrices)"),
    }
}

fn flat_reduction(rng: &mut SplitMix64) -> Suite {
    let params = default_params();
    let flat_src = GravitySource::flat();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let l_p = rng.range(0.0, 9.0e8);
        let e0 = rng.range(1.0, 1000.0);
        let flat = phase_flat(&params, l_p, e0).unwrap();
        worst = worst
            .max((phase_outward(&params, l_p, e0, 1.0e8, &flat_src).unwrap() - flat).abs())
            .max((phase_inward(&params, l_p, e0, 1.5e9, &flat_src).unwrap() - flat).abs());
    }
    for _ in 0..100 {
        let baseline = rng.range(0.0, 3.5e8);
        let scenario = CoherenceScenario::new(
            params,
            flat_src,
            Direction::Outward,
            1.0e8,
            baseline,
            300.0,
            ApproxMode::Weak,
        )
        .unwrap();
        let phi = phase_flat(&params, baseline, 300.0).unwrap();
        let rho = evolve_density(
            params.theta(),
            &MassPhases::from_splitting(phi),
            Flavor::Muon,
        );
        worst = worst.max((coherence_mu(&scenario).unwrap() - l1_norm(&rho)).abs());
    }
    Suite {
        name: "gm->0 reduction",
        pass: worst <= 1e-12,
        detail: format!("max deviation = {worst:.3e}"),
    }
}

fn round_trips(rng: &mut SplitMix64) -> Suite {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gm = rng.range(1.0e5, 5.0e7);
        let source = GravitySource::new(gm).unwrap();
        let r_a = rng.range(3.0 * gm, 50.0 * gm);
        let direction = if rng.next_u64().is_multiple_of(2) {
            Direction::Outward
        } else {
            Direction::Inward
        };
        let l_p = match direction {
            Direction::Outward => rng.range(0.1, 10.0) * r_a,
            Direction::Inward => rng.range(0.05, 0.5) * (r_a - source.horizon_km()),
        };
        let r_b = detector_radius_exact(r_a, l_p, &source, direction).unwrap();
        let back = match direction {
            Direction::Outward => proper_distance_exact(r_a, r_b, &source).unwrap(),
            Direction::Inward => proper_distance_exact(r_b, r_a, &source).unwrap(),
        };
        worst = worst.max((back - l_p).abs() / l_p);
    }
    Suite {
        name: "round-trip",
        pass: worst <= 1e-10,
        detail: format!("max rel residual = {worst:.3e} (100 inversions)"),
    }
}

fn validation() -> Suite {
    let gm_rejected = GravitySource::new(-1.0).is_err();
    let horizon_rejected = metric_potential(5.0e7, &GravitySource::new(3.0e7).unwrap()).is_err();
    let baseline_rejected = LgiScenario::new(
        default_params(),
        GravitySource::new(3.0e7).unwrap(),
        Direction::Inward,
        6.5e8,
        3.5e8,
        300.0,
        Flavor::Muon,
        ApproxMode::Weak,
    )
    .is_err();
    let energy_rejected =
        gravnu::units::phase_from_kinematics(1.0, 1.0, 0.0, UnitsMode::Physical).is_err();
    let pass = gm_rejected && horizon_rejected && baseline_rejected && energy_rejected;
    Suite {
        name: "validation",
        pass,
        detail: format!(
            "gm<0 rejected={gm_rejected}, horizon rejected={horizon_rejected}, long inward baseline rejected={baseline_rejected}, E<=0 rejected={energy_rejected}"
        ),
    }
}

/// Runs every suite, prints the table, returns `true` when all pass.
pub fn run(seed: u64) -> bool {
    let mut rng = SplitMix64::new(seed);
    println!("selftest (seed {seed})");
    let suites = [
        oracle_equivalence(&mut rng),
        unitarity(&mut rng),
        flat_reduction(&mut rng),
        round_trips(&mut rng),
        validation(),
    ];
    let mut all = true;
    for suite in &suites {
        let tag = if suite.pass { "PASS" } else { "FAIL" };
        println!("{tag}  {:<18} {}", suite.name, suite.detail);
        all &= suite.pass;
    }
    all
}
