//! Deterministic quadrature: double-exponential (tanh-sinh) rules on finite
//! intervals, half-line and radial integrals built on top of them, and
//! iterated integrals over boxes and balls.
//!
//! Tanh-sinh tolerates algebraic endpoint singularities, which covers the
//! `u^{γk-d-1}` behaviour of power-law tails after inversion and the cusp of
//! `‖x‖` at the origin once regions are split there.

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 6.5;

/// Integrates `f` over `[a, b]` to relative tolerance `tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -tanh_sinh(f, b, a, tol);
    }
    let half = 0.5 * (b - a);
    // Node at parameter t, evaluated as an offset from the nearer endpoint so
    // that points crowding the ends are not rounded onto them.
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        // 1 - tanh|u| = 2 / (1 + e^{2|u|})
        let gap = half * 2.0 / (1.0 + (2.0 * u.abs()).exp());
        if gap == 0.0 {
            return 0.0;
        }
        let x = if u < 0.0 { a + gap } else { b - gap };
        if x <= a || x >= b {
            return 0.0;
        }
        let y = f(x);
        if y.is_finite() {
            w * y
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h;
        let err = (next - estimate).abs();
        estimate = next;
        if level >= 3 && err <= tol * next.abs().max(1e-300) {
            break;
        }
    }
    estimate
}

/// Integrates `f` over `[0, ∞)`. The half line is cut at `breaks`
/// (increasing, positive); the last piece `[b, ∞)` is mapped by `r = b/u`.
pub fn half_line<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = 0.0;
    for &b in breaks {
        debug_assert!(b > lo);
        total += tanh_sinh(&f, lo, b, tol);
        lo = b;
    }
    let b = if lo > 0.0 { lo } else { 1.0 };
    if lo == 0.0 {
        total += tanh_sinh(&f, 0.0, 1.0, tol);
    }
    total += tanh_sinh(|u: f64| f(b / u) * b / (u * u), 0.0, 1.0, tol);
    total
}

/// `∫_{ℝ^d} g(‖x‖) dx = |S^{d-1}| ∫_0^∞ g(r) r^{d-1} dr`.
pub fn radial<F: Fn(f64) -> f64>(g: F, d: usize, breaks: &[f64], tol: f64) -> f64 {
    let area: f64 = crate::scalar::unit_sphere_area(d);
    area * half_line(|r| g(r) * r.powi(d as i32 - 1), breaks, tol)
}

/// `∫_{B(0,R)} g(‖x‖) dx`.
pub fn radial_ball<F: Fn(f64) -> f64>(g: F, d: usize, radius: f64, tol: f64) -> f64 {
    let area: f64 = crate::scalar::unit_sphere_area(d);
    area * tanh_sinh(|r| g(r) * r.powi(d as i32 - 1), 0.0, radius, tol)
}

/// Integration region for [`iterated`].
#[derive(Debug, Clone)]
pub enum Region<'a> {
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: &'a [f64], hi: &'a [f64] },
    /// Euclidean ball.
    Ball { center: &'a [f64], radius: f64 },
}

impl Region<'_> {
    fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    fn limits(&self, level: usize, prefix: &[f64]) -> (f64, f64) {
        match self {
            Region::Box { lo, hi } => (lo[level], hi[level]),
            Region::Ball { center, radius } => {
                let used: f64 = prefix.iter().zip(center.iter()).map(|(x, c)| (x - c) * (x - c)).sum();
                let rem = (radius * radius - used).max(0.0).sqrt();
                (center[level] - rem, center[level] + rem)
            }
        }
    }
}

/// Iterated integral of `f` over `region`, splitting every coordinate range
/// at 0 so that a kink of `f` at the origin sits on panel boundaries.
pub fn iterated<F: Fn(&[f64]) -> f64>(f: &F, region: &Region<'_>, tol: f64) -> f64 {
    let d = region.dim();
    iterated_level(f, region, tol, 0, d, &[])
}

fn iterated_level<F: Fn(&[f64]) -> f64>(
    f: &F,
    region: &Region<'_>,
    tol: f64,
    level: usize,
    d: usize,
    prefix: &[f64],
) -> f64 {
    let (a, b) = region.limits(level, prefix);
    if b <= a {
        return 0.0;
    }
    let inner = |x: f64| -> f64 {
        let mut p = prefix.to_vec();
        p.push(x);
        if level + 1 == d {
            f(&p)
        } else {
            iterated_level(f, region, tol, level + 1, d, &p)
        }
    };
    if a < 0.0 && b > 0.0 {
        tanh_sinh(inner, a, 0.0, tol) + tanh_sinh(inner, 0.0, b, tol)
    } else {
        tanh_sinh(inner, a, b, tol)
    }
}
