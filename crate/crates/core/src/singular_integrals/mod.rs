//! Hilbert transforms `Hf(x) = (1/π) PV∫ f(y)/(x-y) dy`, the velocity
//! `u(x) = ∫_0^x Hw`, and the interaction constants that bound how far
//! bumps at other scales perturb a given bump.

mod bounds;
mod field;
mod spectral;

use rayon::prelude::*;

pub use bounds::{
    c_of_r, interaction_constants, verify_farfield_bounds, BoundCheck, BoundKind, FarfieldReport, InteractionConstants,
    PhiNorms,
};
pub use field::Field1D;
pub use spectral::{hilbert_periodic, hilbert_spectral, velocity_from_w, SpectralOutput, SpectralWorkspace, Velocity};

use crate::quad::{self, Estimate};
use crate::{Error, Result};

/// A smooth function with derivatives and a known compact support.
pub trait SmoothFunction: Sync {
    /// `order`-th derivative at `x`; order 0 is the value.
    fn derivative(&self, x: f64, order: usize) -> f64;

    /// Closed intervals outside of which the function vanishes.
    fn support(&self) -> Vec<(f64, f64)>;

    fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }
}

/// Adapter turning a closure `(x, order) -> f^{(order)}(x)` into a
/// [`SmoothFunction`].
pub struct FnSmooth<F> {
    pub f: F,
    pub support: Vec<(f64, f64)>,
}

impl<F: Fn(f64, usize) -> f64 + Sync> SmoothFunction for FnSmooth<F> {
    fn derivative(&self, x: f64, order: usize) -> f64 {
        (self.f)(x, order)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.support.clone()
    }
}

/// The `order`-th derivative of another function, as a function.
pub struct Derivative<'a> {
    pub base: &'a dyn SmoothFunction,
    pub order: usize,
}

impl SmoothFunction for Derivative<'_> {
    fn derivative(&self, x: f64, order: usize) -> f64 {
        self.base.derivative(x, self.order + order)
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.base.support()
    }
}

/// Sum of scaled, dilated copies `Σ c_i f_i(x/s_i)`.
pub struct Superposition<'a> {
    pub terms: Vec<(f64, f64, &'a dyn SmoothFunction)>,
}

impl SmoothFunction for Superposition<'_> {
    fn derivative(&self, x: f64, order: usize) -> f64 {
        self.terms
            .iter()
            .map(|&(c, s, f)| c * f.derivative(x / s, order) / s.powi(order as i32))
            .sum()
    }
    fn support(&self) -> Vec<(f64, f64)> {
        self.terms
            .iter()
            .flat_map(|&(_, s, f)| f.support().into_iter().map(move |(a, b)| (a * s, b * s)))
            .collect()
    }
}

/// Principal value `Hf(x)` of a smooth evaluator.
///
/// The kernel is folded onto `s = |x - y|`: `Hf(x) = (1/π) ∫_0^∞ (f(x-s) -
/// f(x+s))/s ds`, whose integrand is bounded near `s = 0`. The excised piece
/// `[0, δ]` takes a 20-point rule checked against the same rule on its two
/// halves, with `δ` shrunk until they agree; the rest is adaptive.
pub fn hilbert_pv(f: &dyn SmoothFunction, x: f64, tol: f64) -> Estimate {
    let support = f.support();
    let mut breaks: Vec<f64> = support
        .iter()
        .flat_map(|&(a, b)| [(x - a).abs(), (x - b).abs()])
        .filter(|s| *s > 0.0)
        .collect();
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let Some(&reach) = breaks.last() else {
        return Estimate { value: 0.0, error: 0.0 };
    };
    let g = |s: f64| (f.value(x - s) - f.value(x + s)) / s;
    let width = support
        .iter()
        .filter(|&&(a, b)| a <= x && x <= b)
        .map(|&(a, b)| b - a)
        .fold(reach, f64::min);
    let rule = quad::gl20();
    let mut delta = 0.01 * (0.5 * breaks[0]).min(0.125 * width);
    let mut inner = 0.0;
    let mut inner_err = f64::INFINITY;
    for _ in 0..12 {
        let whole = rule.integrate(g, 0.0, delta);
        let halves = rule.integrate(g, 0.0, 0.5 * delta) + rule.integrate(g, 0.5 * delta, delta);
        inner = halves;
        inner_err = (halves - whole).abs();
        if inner_err <= 0.1 * tol * std::f64::consts::PI {
            break;
        }
        delta *= 0.25;
    }
    let mut pts = vec![delta];
    pts.extend(breaks.iter().copied().filter(|&b| b > delta));
    let outer = quad::adaptive_pieces(g, &pts, 0.9 * tol * std::f64::consts::PI);
    Estimate {
        value: (inner + outer.value) / std::f64::consts::PI,
        error: (inner_err + outer.error) / std::f64::consts::PI,
    }
}

/// [`hilbert_pv`] at many points, evaluated in parallel.
pub fn hilbert_pv_many(f: &dyn SmoothFunction, xs: &[f64], tol: f64) -> Vec<Estimate> {
    xs.par_iter().map(|&x| hilbert_pv(f, x, tol)).collect()
}

/// Principal value at grid node `i` of a sampled field.
///
/// Uses the alternating-node rule `(2h/π) Σ_{j-i odd} f_j/(x_i - x_j)`, which
/// never touches the singular node, and certifies it against the same rule on
/// the doubled spacing. Refuses at a detected jump in the samples.
pub fn hilbert_pv_sampled(f: &Field1D, i: usize) -> Result<Estimate> {
    let n = f.n_points();
    if i >= n {
        return Err(Error::param(format!("node {i} outside a grid of {n} points")));
    }
    if f.jump_at(i) {
        return Err(Error::Precondition(format!(
            "sampled field has a jump at x = {}; a smooth evaluator is required there",
            f.x(i)
        )));
    }
    let h = f.h();
    let v = f.values();
    let rule = |stride: usize| {
        let mut s = 0.0;
        let mut d = stride;
        while d <= i.max(n - 1 - i) {
            let left = if d <= i { v[i - d] } else { 0.0 };
            let right = if i + d < n { v[i + d] } else { 0.0 };
            s += (left - right) / (d as f64 * h);
            d += 2 * stride;
        }
        2.0 * stride as f64 * h * s / std::f64::consts::PI
    };
    let fine = rule(1);
    let coarse = rule(2);
    Ok(Estimate { value: fine, error: (fine - coarse).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian() -> FnSmooth<impl Fn(f64, usize) -> f64 + Sync> {
        // truncated where e^{-x²} is below 1e-30
        FnSmooth {
            f: |x: f64, order: usize| {
                let g = (-x * x).exp();
                match order {
                    0 => g,
                    1 => -2.0 * x * g,
                    _ => (4.0 * x * x - 2.0) * g,
                }
            },
            support: vec![(-8.5, 8.5)],
        }
    }

    /// Dawson's function `∫_0^x e^{t²-x²} dt`.
    fn dawson(x: f64) -> f64 {
        quad::adaptive(|t| (t * t - x * x).exp(), 0.0, x, 1e-15).value
    }

    #[test]
    fn gaussian_transform_is_scaled_dawson() {
        let g = gaussian();
        for &x in &[0.0, 0.3, 1.0, 2.5, 4.0] {
            let e = hilbert_pv(&g, x, 1e-12);
            let exact = 2.0 * dawson(x) / PI.sqrt();
            assert!((e.value - exact).abs() < 1e-10, "x = {x}: {} vs {exact}", e.value);
            assert!(e.error < 1e-8);
        }
    }

    #[test]
    fn conjugate_poisson_pair() {
        let f = FnSmooth {
            f: |x: f64, order: usize| match order {
                0 => 1.0 / (1.0 + x * x),
                _ => -2.0 * x / (1.0 + x * x).powi(2),
            },
            support: vec![(-1e3, 1e3)],
        };
        for &x in &[0.0, 0.5, 2.0] {
            let v = hilbert_pv(&f, x, 1e-10).value;
            // the discarded tails shift the value by O(x/R³)
            assert!((v - x / (1.0 + x * x)).abs() < 1e-7, "x = {x}: {v}");
        }
    }

    #[test]
    fn odd_input_has_even_transform() {
        let f = FnSmooth {
            f: |x: f64, _| x * (-x * x).exp(),
            support: vec![(-9.0, 9.0)],
        };
        for &x in &[0.2, 0.9, 3.0] {
            let a = hilbert_pv(&f, x, 1e-12).value;
            let b = hilbert_pv(&f, -x, 1e-12).value;
            assert!((a - b).abs() < 1e-10);
        }
        let at0 = hilbert_pv(&f, 0.0, 1e-12).value;
        let direct = -2.0 / PI * quad::adaptive(|y| (-y * y).exp(), 0.0, 9.0, 1e-14).value;
        assert!((at0 - direct).abs() < 1e-10);
    }

    #[test]
    fn sampled_rule_matches_smooth_rule() {
        let n = 2001;
        let f = Field1D::from_fn(-10.0, 10.0, n, |x| (-x * x).exp()).unwrap();
        for &i in &[1000usize, 1100, 1400] {
            let e = hilbert_pv_sampled(&f, i).unwrap();
            let exact = 2.0 * dawson(f.x(i)) / PI.sqrt();
            assert!((e.value - exact).abs() < 1e-10, "{} vs {exact}", e.value);
        }
    }

    #[test]
    fn sampled_rule_refuses_jumps() {
        let f = Field1D::from_fn(-1.0, 1.0, 201, |x| if x < 0.0 { 0.0 } else { 1.0 }).unwrap();
        assert!(hilbert_pv_sampled(&f, 100).is_err());
        assert!(hilbert_pv_sampled(&f, 10).is_ok());
    }
}
