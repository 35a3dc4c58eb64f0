//! Shared test support: an adaptive Gauss-Kronrod quadrature oracle, a pure
//! bisection inversion oracle, and a deterministic RNG. Everything here is
//! deliberately independent of the library's closed forms so the comparisons
//! in the test suites mean something.

#![allow(dead_code)]

/// 15-point Kronrod nodes on [0, 1] side of [-1, 1] (symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// 15-point Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Embedded 7-point Gauss weights (nodes are `XGK[1], XGK[3], XGK[5], XGK[7]`).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7/K15 pair on [a, b]: returns (K15 estimate, |K15 - G7|).
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(center);
    let mut gauss = WG[3] * f(center);
    for i in 0..7 {
        let offset = half * XGK[i];
        let pair = f(center - offset) + f(center + offset);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (half * kronrod, (half * (kronrod - gauss)).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (estimate, error) = gauss_kronrod(f, a, b);
    if error <= tol || depth >= 60 {
        return estimate;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth + 1) + adapt(f, mid, b, 0.5 * tol, depth + 1)
}

/// Adaptive quadrature of `f` on [a, b] to the given relative tolerance.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (first, _) = gauss_kronrod(f, a, b);
    let tol = rel_tol * first.abs().max(f64::MIN_POSITIVE);
    adapt(f, a, b, tol, 0)
}

/// Radial proper-distance integrand `1/sqrt(1 - 2GM/r)`.
pub fn proper_distance_integrand(gm: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| 1.0 / (1.0 - 2.0 * gm / r).sqrt()
}

/// Proper distance by quadrature alone.
pub fn quadrature_proper_distance(r_a: f64, r_b: f64, gm: f64, rel_tol: f64) -> f64 {
    adaptive_quadrature(&proper_distance_integrand(gm), r_a, r_b, rel_tol)
}

/// Pure-bisection inversion of the quadrature proper distance: the outward
/// detector radius `r_b` with `integral_{r_a}^{r_b} = l_p`.
pub fn bisect_outward_radius(r_a: f64, l_p: f64, gm: f64, rel_tol: f64) -> f64 {
    let mut lo = r_a;
    let mut hi = r_a + l_p;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let reached = quadrature_proper_distance(r_a, mid, gm, rel_tol * 1e-2);
        if (reached - l_p).abs() <= rel_tol * l_p {
            return mid;
        }
        if reached < l_p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// SplitMix64: tiny, seedable, fully deterministic across platforms.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[(self.next_u64() % items.len() as u64) as usize]
    }
}
