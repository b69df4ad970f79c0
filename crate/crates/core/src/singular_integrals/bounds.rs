use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{hilbert_pv, Derivative, SmoothFunction};
use crate::quad;
use crate::{Error, Result};

/// Norms of the reference profile entering the energy constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiNorms {
    pub max_phi: f64,
    pub max_hphi: f64,
    /// `max|Φ|`, `Φ(0) = 0`, `Φ' = Hφ`.
    pub max_big_phi: f64,
    pub d1_l2: f64,
    pub d2_l2: f64,
    /// `‖φ‖₁`, measured.
    pub l1_phi: f64,
}

/// Interaction and energy constants for given `(r, ε, A)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionConstants {
    pub r: f64,
    pub eps: f64,
    pub ratio: f64,
    pub c_r: f64,
    /// `‖φ‖₁ + π(1-2r)c(r)ε`, the L¹ bound on a profile.
    pub l1_bound: f64,
    /// The same bound with `‖φ‖₁` replaced by 1.
    pub l1_bound_literal: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub norms: PhiNorms,
    /// `4(max|Φ| + C₄)(A-1)/(1-5c(r)ε)`; must stay below `r`.
    pub support_drift: f64,
    /// Supremum of the `A` for which the drift condition holds, if any.
    pub admissible_ratio: Option<f64>,
}

impl InteractionConstants {
    /// Upper bound on `∫_t^0 x_{n,k}` over the bootstrap window.
    pub fn window_integral(&self) -> f64 {
        4.0 * (self.ratio - 1.0) / (1.0 - 5.0 * self.c_r * self.eps)
    }

    /// `T = a/(1 - c(r)ε)`, `a` the fixed point for `b = (1 + c(r)ε)/(1 - c(r)ε)`.
    pub fn bootstrap_window(&self) -> Result<f64> {
        let ce = self.c_r * self.eps;
        Ok(crate::ode_cascade::fixed_point_a(self.ratio, (1.0 + ce) / (1.0 - ce))? / (1.0 - ce))
    }

    /// `C₇ I e^{C₆ I/2}/2`, the bound on `√E` after accumulating `I`.
    pub fn energy_bound(&self, integral: f64) -> f64 {
        0.5 * self.c7 * integral * (0.5 * self.c6 * integral).exp()
    }
}

/// `c(r) = √(32r³/3)/(π(1-2r))`.
pub fn c_of_r(r: f64) -> f64 {
    (32.0 * r.powi(3) / 3.0).sqrt() / (PI * (1.0 - 2.0 * r))
}

struct Core {
    c_r: f64,
    l: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    c5: f64,
}

fn core(r: f64, eps: f64, ratio: f64, l1_phi: f64) -> Core {
    let c_r = c_of_r(r);
    let l = l1_phi + PI * (1.0 - 2.0 * r) * c_r * eps;
    let q = r / ratio;
    let d = 1.0 - 3.0 * r - 2.0 * r * r;
    let c1 = l * q / (PI * d * d * (1.0 - q));
    let s = ratio * r * r;
    let c2 = 16.0 * l * (1.0 + 2.0 * r) * s / (7.0 * PI * (1.0 - 2.0 * r).powi(2) * (1.0 - s));
    let sq = (r / PI).sqrt();
    let c3 = 2.0 * eps * sq + (1.0 + 2.0 * r) * c1 + c2;
    let c4 = 2.0 * eps * (1.0 + 2.0 * r) * sq + (1.0 + 2.0 * r).powi(2) * c1 + 1.75 * c2;
    let c5 = eps + 2.0 * (2.0 * r).sqrt() * (c1 + 32.0 * c2 / (7.0 - 14.0 * r));
    Core { c_r, l, c1, c2, c3, c4, c5 }
}

/// Evaluates `c(r)`, `C₁ … C₇` and the admissible range of `A`.
///
/// `C₆` uses `2√(2r)(‖φ'‖ + C₅)/π` for the first energy term and `C₇` the
/// larger of `max|Hφ|` and `max|Φ|` next to `‖φ''‖`, so both dominate every
/// term of the energy inequality they summarise.
pub fn interaction_constants(r: f64, eps: f64, ratio: f64, norms: PhiNorms) -> Result<InteractionConstants> {
    if !(r > 0.0 && r <= 0.25) {
        return Err(Error::param(format!("r = {r} outside (0, 1/4]")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param(format!("ε = {eps} must be positive")));
    }
    if !(ratio > 1.0 && ratio < 2.0) {
        return Err(Error::param(format!("A = {ratio} outside (1, 2)")));
    }
    if !(norms.l1_phi > 0.0) {
        return Err(Error::param("‖φ‖₁ must be positive"));
    }
    let k = core(r, eps, ratio, norms.l1_phi);
    let c6 = norms.max_hphi + k.c3 + 2.0 * (2.0 * r).sqrt() * (norms.d1_l2 + k.c5) / PI;
    let c7 = 2.0
        * (norms.max_phi * (norms.d1_l2 + k.c5) + norms.d2_l2 * (norms.max_hphi.max(norms.max_big_phi) + k.c4));
    let denom = 1.0 - 5.0 * k.c_r * eps;
    let drift = |a: f64| 4.0 * (norms.max_big_phi + core(r, eps, a, norms.l1_phi).c4) * (a - 1.0) / denom;
    let support_drift = if denom > 0.0 { drift(ratio) } else { f64::INFINITY };
    let admissible_ratio = (denom > 0.0).then(|| {
        let ok = |a: f64| drift(a) < r;
        let mut lo = 1.0;
        let mut hi = None;
        for i in 0..=2000 {
            let a = 1.0 + 10f64.powf(-12.0 + 12.0 * i as f64 / 2000.0) * 0.999_999;
            if ok(a) {
                lo = a;
            } else {
                hi = Some(a);
                break;
            }
        }
        match hi {
            None => 2.0,
            Some(mut hi) => {
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    });
    let admissible_ratio = admissible_ratio.filter(|a| *a > 1.0);
    Ok(InteractionConstants {
        r,
        eps,
        ratio,
        c_r: k.c_r,
        l1_bound: k.l,
        l1_bound_literal: 1.0 + PI * (1.0 - 2.0 * r) * k.c_r * eps,
        c1: k.c1,
        c2: k.c2,
        c3: k.c3,
        c4: k.c4,
        c5: k.c5,
        c6,
        c7,
        norms,
        support_drift,
        admissible_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    FarValue,
    FarDerivative,
    NearDerivative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub x: f64,
    pub value: f64,
    pub bound: f64,
    /// `bound - |value| - quadrature error`.
    pub margin: f64,
    /// Margin against the bound built on `‖W‖₁ ≤ 1 + ε√(32r³/3)`.
    pub margin_literal: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarfieldReport {
    pub h1_distance: f64,
    pub checks: Vec<BoundCheck>,
    pub worst_margin: f64,
    pub pass: bool,
    /// `‖φ‖₁ + ε√(32r³/3)`, the constant the bounds are scaled by.
    pub l1_bound: f64,
    pub worst_margin_literal: f64,
    pub pass_literal: bool,
}

/// Checks the decay bounds of `HW` and `∂HW` away from a profile's support
/// against principal-value quadrature of `W` and `W'`.
pub fn verify_farfield_bounds(
    w: &dyn SmoothFunction,
    phi: &dyn SmoothFunction,
    r: f64,
    eps: f64,
) -> Result<FarfieldReport> {
    if !(r > 0.0 && r <= 0.25) || !(eps > 0.0) {
        return Err(Error::param(format!("need 0 < r ≤ 1/4 and ε > 0, got r = {r}, ε = {eps}")));
    }
    let inside = |a: f64, b: f64| {
        let lo = 1.0 - 2.0 * r - 1e-12;
        let hi = 1.0 + 2.0 * r + 1e-12;
        (a >= lo && b <= hi) || (a >= -hi && b <= -lo)
    };
    if let Some(&(a, b)) = w.support().iter().find(|&&(a, b)| !inside(a, b)) {
        return Err(Error::Precondition(format!("support piece [{a}, {b}] leaves [±1∓2r, ±1±2r]")));
    }
    let pts = [-1.0 - 2.0 * r, -1.0, -1.0 + 2.0 * r, 1.0 - 2.0 * r, 1.0, 1.0 + 2.0 * r];
    let h1 = quad::adaptive_pieces(
        |x| {
            let d = w.derivative(x, 1) - phi.derivative(x, 1);
            d * d
        },
        &pts,
        1e-14,
    )
    .value
    .sqrt();
    if h1 > eps * (1.0 + 1e-9) {
        return Err(Error::Precondition(format!("‖∂(W-φ)‖₂ = {h1} exceeds ε = {eps}")));
    }
    let l1_phi = quad::adaptive_pieces(|x| phi.value(x).abs(), &pts, 1e-13).value;
    let spread = PI * (1.0 - 2.0 * r) * c_of_r(r) * eps;
    let l = l1_phi + spread;
    let literal = (1.0 + spread) / l;
    let edge = 1.0 + 2.0 * r;
    let dw = Derivative { base: w, order: 1 };
    let tol = 1e-12;
    let mut checks = Vec::new();
    let mut push = |kind, x: f64, est: crate::quad::Estimate, bound: f64| {
        let slack = est.value.abs() + est.error;
        checks.push(BoundCheck {
            kind,
            x,
            value: est.value,
            bound,
            margin: bound - slack,
            margin_literal: bound * literal - slack,
        });
    };
    for i in 0..24 {
        let mag = edge * (1.0 + 10f64.powf(-2.0 + 3.5 * i as f64 / 23.0));
        for x in [mag, -mag] {
            let d = x * x - edge * edge;
            push(BoundKind::FarValue, x, hilbert_pv(w, x, tol), l * edge / (PI * d));
            push(BoundKind::FarDerivative, x, hilbert_pv(&dw, x, tol), 2.0 * l * edge * x.abs() / (PI * d * d));
        }
    }
    let near = 1.0 - 2.0 * r;
    for i in 0..16 {
        let mag = near * 0.98 * i as f64 / 15.0;
        for x in [mag, -mag] {
            let bound = l / (PI * (near - mag).powi(2));
            push(BoundKind::NearDerivative, x, hilbert_pv(&dw, x, tol), bound);
        }
    }
    let worst_margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let worst_margin_literal = checks.iter().map(|c| c.margin_literal).fold(f64::INFINITY, f64::min);
    Ok(FarfieldReport {
        h1_distance: h1,
        checks,
        worst_margin,
        pass: worst_margin >= 0.0,
        l1_bound: l,
        worst_margin_literal,
        pass_literal: worst_margin_literal >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_norms() -> PhiNorms {
        PhiNorms { max_phi: 1.0, max_hphi: 1.0, max_big_phi: 1.0, d1_l2: 1.0, d2_l2: 1.0, l1_phi: 1.0 }
    }

    #[test]
    fn c_at_quarter() {
        // √(32/(64·3)) / (π/2)
        let expected = (1.0f64 / 6.0).sqrt() * 2.0 / PI;
        assert!((c_of_r(0.25) - expected).abs() < 1e-15);
        assert!((c_of_r(0.25) - 0.2599).abs() < 1e-4);
    }

    #[test]
    fn small_r_limits() {
        let k = interaction_constants(1e-8, 0.05, 1.5, unit_norms()).unwrap();
        assert!(k.c_r < 1e-11);
        assert!(k.c1 < 1e-7 && k.c2 < 1e-14);
        assert!((k.c3 - 0.0).abs() < 1e-5);
        assert!((k.c5 - 0.05).abs() < 1e-10);
    }

    #[test]
    fn c1_c2_bounded_uniformly_over_ratio() {
        // C₁ falls and C₂ rises with A; the endpoint values bound the family
        let lo = interaction_constants(0.2, 0.05, 1.0 + 1e-9, unit_norms()).unwrap();
        let hi = interaction_constants(0.2, 0.05, 2.0 - 1e-9, unit_norms()).unwrap();
        for i in 1..100 {
            let a = 1.0 + i as f64 / 100.0;
            let k = interaction_constants(0.2, 0.05, a, unit_norms()).unwrap();
            assert!(k.c1 <= lo.c1 + 1e-12 && k.c1 >= hi.c1 - 1e-12);
            assert!(k.c2 <= hi.c2 + 1e-12 && k.c2 >= lo.c2 - 1e-12);
        }
        assert!(hi.c1.is_finite() && hi.c2.is_finite());
    }

    #[test]
    fn domain_errors() {
        assert!(interaction_constants(0.3, 0.05, 1.1, unit_norms()).is_err());
        assert!(interaction_constants(0.2, 0.05, 2.0, unit_norms()).is_err());
        assert!(interaction_constants(0.2, 0.0, 1.1, unit_norms()).is_err());
    }

    #[test]
    fn admissible_ratio_satisfies_the_drift_condition() {
        let k = interaction_constants(0.2, 0.05, 1.05, unit_norms()).unwrap();
        let a = k.admissible_ratio.unwrap();
        let at = interaction_constants(0.2, 0.05, 1.0 + 0.999 * (a - 1.0), unit_norms()).unwrap();
        assert!(at.support_drift < 0.2);
        let past = interaction_constants(0.2, 0.05, 1.0 + 1.01 * (a - 1.0), unit_norms()).unwrap();
        assert!(past.support_drift >= 0.2);
    }
}
