//! Schwarzschild geometry for radial propagation.
//!
//! All radii and lengths are in km, with `G = c = 1` so the source is fully
//! described by the length `GM`. Every radius handed to these functions must
//! lie strictly outside the horizon `r = 2 GM`; violating inputs are rejected
//! rather than clamped.

use crate::{Error, Result};

/// A spherically symmetric gravitational source, described by the geometrized
/// mass `GM` in km. `GM = 0` encodes flat spacetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravitySource {
    gm_km: f64,
}

impl GravitySource {
    pub fn new(gm_km: f64) -> Result<Self> {
        if gm_km < 0.0 || gm_km.is_nan() {
            return Err(Error::NegativeGravitationalMass(gm_km));
        }
        Ok(GravitySource { gm_km })
    }

    /// Flat spacetime (`GM = 0`).
    pub fn flat() -> Self {
        GravitySource { gm_km: 0.0 }
    }

    pub fn gm_km(&self) -> f64 {
        self.gm_km
    }

    /// Horizon radius `2 GM` in km.
    pub fn horizon_km(&self) -> f64 {
        2.0 * self.gm_km
    }

    pub fn is_flat(&self) -> bool {
        self.gm_km == 0.0
    }
}

/// A radius validated to lie strictly outside the horizon of its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialStation {
    r_km: f64,
}

impl RadialStation {
    pub fn new(r_km: f64, source: &GravitySource) -> Result<Self> {
        if r_km <= source.horizon_km() || r_km.is_nan() {
            return Err(Error::HorizonViolation {
                r: r_km,
                horizon: source.horizon_km(),
            });
        }
        Ok(RadialStation { r_km })
    }

    pub fn r_km(&self) -> f64 {
        self.r_km
    }
}

/// Radial propagation direction relative to the gravitational source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Outward,
    Inward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Outward => "outward",
            Direction::Inward => "inward",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "outward" => Some(Direction::Outward),
            "inward" => Some(Direction::Inward),
            _ => None,
        }
    }
}

/// Order of the gravitational blueshift applied by [`local_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyFidelity {
    /// `E (1 + GM/r)`, first order in `GM/r`.
    FirstOrder,
    /// `E B(r)^{-1/2}` with the full metric potential.
    Exact,
}

/// Geometric fidelity used when a scenario turns baselines into phases.
///
/// `Weak` evaluates the first-order closed forms; `Exact` inverts the exact
/// proper distance for the detector radius and feeds the coordinate
/// difference and exact blueshift into the phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMode {
    Weak,
    Exact,
}

impl ApproxMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ApproxMode::Weak => "weak",
            ApproxMode::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weak" => Some(ApproxMode::Weak),
            "exact" => Some(ApproxMode::Exact),
            _ => None,
        }
    }
}

/// Metric potential `B(r) = 1 - 2 GM / r`, in (0, 1] outside the horizon.
pub fn metric_potential(r_km: f64, source: &GravitySource) -> Result<f64> {
    let station = RadialStation::new(r_km, source)?;
    Ok(1.0 - source.horizon_km() / station.r_km())
}

/// Exact radial proper distance between `r_a <= r_b`, the closed form of
/// `integral sqrt(g_rr) dr`:
///
/// ```text
/// L_p = r_b sqrt(B(r_b)) - r_a sqrt(B(r_a))
///     + 2 GM [ ln(sqrt(r_b - 2GM) + sqrt(r_b)) - ln(sqrt(r_a - 2GM) + sqrt(r_a)) ]
/// ```
///
/// Strictly greater than `r_b - r_a` when `GM > 0` and `r_b > r_a`.
pub fn proper_distance_exact(r_a: f64, r_b: f64, source: &GravitySource) -> Result<f64> {
    check_ordering(r_a, r_b)?;
    let a = RadialStation::new(r_a, source)?.r_km();
    let b = RadialStation::new(r_b, source)?.r_km();
    let rs = source.horizon_km();
    let boundary = |r: f64| r * (1.0 - rs / r).sqrt();
    let log_term = |r: f64| ((r - rs).sqrt() + r.sqrt()).ln();
    Ok(boundary(b) - boundary(a) + rs * (log_term(b) - log_term(a)))
}

/// Weak-field proper distance `r_b - r_a + GM ln(r_b / r_a)`.
pub fn proper_distance_weak(r_a: f64, r_b: f64, source: &GravitySource) -> Result<f64> {
    check_ordering(r_a, r_b)?;
    if r_a <= 0.0 || r_a.is_nan() {
        return Err(Error::HorizonViolation {
            r: r_a,
            horizon: source.horizon_km(),
        });
    }
    Ok(r_b - r_a + source.gm_km() * (r_b / r_a).ln())
}

/// First-order inversion of [`proper_distance_weak`]: the detector radius a
/// proper baseline `l_p` away from `r_source` in the given direction.
///
/// Outward: `r_b = L_p + r_a - GM ln(L_p/r_a + 1)`.
/// Inward:  `r_b = r_a - L_p - GM ln(1 - L_p/r_a)`, requiring `L_p < r_a`.
pub fn detector_radius_weak(
    r_source: f64,
    l_p: f64,
    source: &GravitySource,
    direction: Direction,
) -> Result<f64> {
    let r_a = RadialStation::new(r_source, source)?.r_km();
    if l_p < 0.0 || l_p.is_nan() {
        return Err(Error::NegativeLength(l_p));
    }
    let gm = source.gm_km();
    let r_b = match direction {
        Direction::Outward => l_p + r_a - gm * (l_p / r_a + 1.0).ln(),
        Direction::Inward => {
            if l_p >= r_a {
                return Err(Error::InwardBaselineTooLong {
                    baseline: l_p,
                    r_source: r_a,
                });
            }
            r_a - l_p - gm * (1.0 - l_p / r_a).ln()
        }
    };
    RadialStation::new(r_b, source).map(|s| s.r_km())
}

/// Inversion of [`proper_distance_exact`]: finds `r_b` with
/// `L_p(min(r_a, r_b), max(r_a, r_b)) = l_p` to 1e-12 relative, by bracketed
/// bisection refined with Newton steps (the integrand `1/sqrt(B)` is smooth
/// and monotone, so the bracket never stalls).
pub fn detector_radius_exact(
    r_source: f64,
    l_p: f64,
    source: &GravitySource,
    direction: Direction,
) -> Result<f64> {
    let r_a = RadialStation::new(r_source, source)?.r_km();
    if l_p < 0.0 || l_p.is_nan() {
        return Err(Error::NegativeLength(l_p));
    }
    if l_p == 0.0 {
        return Ok(r_a);
    }
    if source.is_flat() {
        // The integrand is identically 1; keep the flat limit exact.
        let r_b = match direction {
            Direction::Outward => r_a + l_p,
            Direction::Inward => {
                if l_p >= r_a {
                    return Err(Error::InwardBaselineTooLong {
                        baseline: l_p,
                        r_source: r_a,
                    });
                }
                r_a - l_p
            }
        };
        return RadialStation::new(r_b, source).map(|s| s.r_km());
    }

    let (mut lo, mut hi) = match direction {
        // Integrand >= 1, so L_p(r_a, r_a + l_p) >= l_p brackets from above.
        Direction::Outward => (r_a, r_a + l_p),
        Direction::Inward => {
            if l_p >= r_a {
                return Err(Error::InwardBaselineTooLong {
                    baseline: l_p,
                    r_source: r_a,
                });
            }
            // L_p >= coordinate distance, so the root lies above r_a - l_p,
            // clipped to stay outside the horizon.
            let horizon_guard = source.horizon_km() * (1.0 + 1.0e-12) + f64::MIN_POSITIVE;
            let lo = (r_a - l_p).max(horizon_guard);
            if proper_distance_exact(lo, r_a, source)? < l_p {
                return Err(Error::InversionFailure(format!(
                    "proper baseline {l_p} km does not fit between r = {r_a} km and the horizon"
                )));
            }
            (lo, r_a)
        }
    };

    // f(r) = L_p(...) - l_p, increasing in r outward, decreasing inward.
    let residual = |r: f64| -> Result<f64> {
        Ok(match direction {
            Direction::Outward => proper_distance_exact(r_a, r, source)? - l_p,
            Direction::Inward => proper_distance_exact(r, r_a, source)? - l_p,
        })
    };
    let sign = match direction {
        Direction::Outward => 1.0,
        Direction::Inward => -1.0,
    };

    let tol = 1.0e-12 * l_p;
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = residual(r)?;
        if f.abs() <= tol {
            return Ok(r);
        }
        if sign * f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        // Newton step using dL_p/dr_b = 1/sqrt(B(r)); fall back to bisection
        // whenever it leaves the bracket.
        let derivative = sign / metric_potential(r, source)?.sqrt();
        let newton = r - f / derivative;
        r = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs() {
            return Ok(r);
        }
    }
    Err(Error::InversionFailure(format!(
        "no convergence inverting proper distance {l_p} km from r = {r_a} km"
    )))
}

/// Energy measured by a static observer at radius `r`, blueshifted from the
/// energy `e_inf` measured at infinity.
pub fn local_energy(
    e_inf: f64,
    r_km: f64,
    source: &GravitySource,
    fidelity: EnergyFidelity,
) -> Result<f64> {
    if e_inf <= 0.0 || e_inf.is_nan() {
        return Err(Error::NonPositiveEnergy(e_inf));
    }
    let station = RadialStation::new(r_km, source)?;
    Ok(match fidelity {
        EnergyFidelity::FirstOrder => e_inf * (1.0 + source.gm_km() / station.r_km()),
        EnergyFidelity::Exact => e_inf / metric_potential(r_km, source)?.sqrt(),
    })
}

fn check_ordering(r_a: f64, r_b: f64) -> Result<()> {
    if r_b < r_a || r_b.is_nan() || r_a.is_nan() {
        return Err(Error::RadiusOrdering { r_a, r_b });
    }
    Ok(())
}
