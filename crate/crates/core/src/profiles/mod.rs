//! Initial-data building blocks: the 1D bump `ρ`, the odd profile `φ`, the
//! multi-bump sum, the 3D radial and vertical profiles with the smoothed
//! `ρ_k`, and analyzers for Hölder seminorms and vortex-free gaps.

mod analysis;
mod jet;
mod multibump;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::quad;
use crate::singular_integrals::{hilbert_pv, velocity_from_w, Field1D, PhiNorms, SmoothFunction};
use crate::special;
use crate::{Error, Result};
use jet::{half_mollifier, mollifier, Jet, ORDER};

pub use analysis::{holder_of_field, holder_seminorm, holder_seminorm_fn, support_gaps, HolderReport};
pub use multibump::{assemble_multibump, MultiBumpData};

/// Closed-form description of a profile; the evaluator is rebuilt from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `scale·ψ((x - center)/half_width)`, `ψ(u) = exp(-1/(1-u²))`.
    Bump { center: f64, half_width: f64, scale: f64 },
    /// `b(-x) - b(x)` for the bump `b` with the same parameters.
    OddPair { center: f64, half_width: f64, scale: f64 },
    /// Even, 1 on `[-z, z]`, 0 outside `[-2z, 2z]`.
    Plateau { z: f64 },
    /// `ρ_z(z)|z|^{1/12} sgn z`.
    Kink { z: f64 },
    /// The kink with `c1 z + c3 z³ + c5 z⁵` on `[-h, h]`.
    Smoothed { z: f64, h: f64, c1: f64, c3: f64, c5: f64 },
}

/// A recorded residual of a normalization or matching condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub residual: f64,
}

/// A compactly supported profile with exact derivatives up to order 6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub name: String,
    pub shape: Shape,
    pub certificates: Vec<Certificate>,
}

fn bump_jet(x: Jet, center: f64, half_width: f64) -> Jet {
    mollifier(x.shift(-center).scale(1.0 / half_width))
}

/// Smooth step, 0 for `t ≤ 0` and 1 for `t ≥ 1`.
fn step_jet(t: Jet) -> Jet {
    if t.value() >= 1.0 {
        return Jet::constant(1.0);
    }
    if t.value() <= 0.0 {
        return Jet::zero();
    }
    let p = half_mollifier(t);
    let q = half_mollifier(t.scale(-1.0).shift(1.0));
    p.mul(&p.add(q).recip())
}

/// `ρ_z` evaluated on `|z|`, with `y` the jet of `|z|`.
fn plateau_jet(y: Jet, z: f64) -> Jet {
    step_jet(y.scale(-1.0 / z).shift(2.0))
}

fn odd_quintic(y: Jet, c1: f64, c3: f64, c5: f64) -> Jet {
    let y2 = y.mul(&y);
    let inner = y2.scale(c5).shift(c3).mul(&y2).shift(c1);
    y.mul(&inner)
}

impl BumpProfile {
    pub fn new(name: impl Into<String>, shape: Shape) -> Self {
        BumpProfile { name: name.into(), shape, certificates: Vec::new() }
    }

    /// Value without derivatives; agrees with the jet to rounding.
    fn scalar(&self, x: f64) -> f64 {
        let moll = |u: f64| {
            let p = 1.0 - u * u;
            if p <= 1.0 / 700.0 {
                0.0
            } else {
                (-1.0 / p).exp()
            }
        };
        let half = |t: f64| if t <= 1.0 / 700.0 { 0.0 } else { (-1.0 / t).exp() };
        let plateau = |y: f64, z: f64| {
            let t = 2.0 - y / z;
            if t >= 1.0 {
                1.0
            } else if t <= 0.0 {
                0.0
            } else {
                let p = half(t);
                p / (p + half(1.0 - t))
            }
        };
        match self.shape {
            Shape::Bump { center, half_width, scale } => scale * moll((x - center) / half_width),
            Shape::OddPair { center, half_width, scale } => {
                scale * (moll((-x - center) / half_width) - moll((x - center) / half_width))
            }
            Shape::Plateau { z } => plateau(x.abs(), z),
            Shape::Kink { z } | Shape::Smoothed { z, .. } => {
                let y = x.abs();
                if let Shape::Smoothed { h, c1, c3, c5, .. } = self.shape {
                    if y <= h {
                        let y2 = x * x;
                        return x * (c1 + y2 * (c3 + y2 * c5));
                    }
                }
                x.signum() * plateau(y, z) * y.powf(1.0 / 12.0)
            }
        }
    }

    fn jet(&self, x: f64) -> Jet {
        let v = Jet::var(x);
        match self.shape {
            Shape::Bump { center, half_width, scale } => bump_jet(v, center, half_width).scale(scale),
            Shape::OddPair { center, half_width, scale } => {
                let left = bump_jet(v.scale(-1.0), center, half_width);
                let right = bump_jet(v, center, half_width);
                left.add(right.scale(-1.0)).scale(scale)
            }
            Shape::Plateau { z } => {
                let y = if x < 0.0 { v.scale(-1.0) } else { v };
                plateau_jet(y, z)
            }
            Shape::Kink { z } | Shape::Smoothed { z, .. } => {
                // odd: g(x) = sgn(x)·G(|x|)
                let (y, sign) = if x < 0.0 { (v.scale(-1.0), -1.0) } else { (v, 1.0) };
                if let Shape::Smoothed { h, c1, c3, c5, .. } = self.shape {
                    if y.value() <= h {
                        return odd_quintic(y, c1, c3, c5).scale(sign);
                    }
                }
                if y.value() == 0.0 {
                    let mut c = [f64::INFINITY; ORDER];
                    c[0] = 0.0;
                    return Jet(c);
                }
                plateau_jet(y, z).mul(&y.powf(1.0 / 12.0)).scale(sign)
            }
        }
    }

    /// Support pieces as closed intervals.
    pub fn support_pieces(&self) -> Vec<(f64, f64)> {
        match self.shape {
            Shape::Bump { center, half_width, .. } => vec![(center - half_width, center + half_width)],
            Shape::OddPair { center, half_width, .. } => {
                vec![(-center - half_width, -center + half_width), (center - half_width, center + half_width)]
            }
            Shape::Plateau { z } | Shape::Kink { z } | Shape::Smoothed { z, .. } => vec![(-2.0 * z, 2.0 * z)],
        }
    }

    /// Largest residual among the certificates.
    pub fn worst_residual(&self) -> f64 {
        self.certificates.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn certificate(&self, name: &str) -> Option<f64> {
        self.certificates.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    /// Samples over the support hull as `x,value` rows.
    pub fn write_csv<W: Write>(&self, w: W, n: usize) -> Result<()> {
        let pieces = self.support_pieces();
        let lo = pieces.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pieces.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Field1D::from_fn(lo, hi, n, |x| self.value(x))?.write_csv(w)
    }

    /// JSON descriptor with shape parameters and certificates.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl SmoothFunction for BumpProfile {
    fn derivative(&self, x: f64, order: usize) -> f64 {
        let outside = self.support_pieces().iter().all(|&(a, b)| x <= a || x >= b);
        if outside {
            return 0.0;
        }
        self.jet(x).derivative(order)
    }

    fn support(&self) -> Vec<(f64, f64)> {
        self.support_pieces()
    }

    fn value(&self, x: f64) -> f64 {
        self.scalar(x)
    }
}

/// `∫ρ(y)/y dy` over the support of a positive-side bump.
fn first_inverse_moment(f: &dyn SmoothFunction) -> f64 {
    f.support()
        .iter()
        .map(|&(a, b)| quad::adaptive(|y| f.value(y) / y, a, b, 1e-16).value)
        .sum()
}

/// The bump `ρ`: nonnegative, supported in `[1-r, 1+r]`, symmetric about 1,
/// scaled so that `∫ρ(y)/y dy = π/2`, i.e. `Hρ(0) = -1/2`.
pub fn build_bump(r: f64) -> Result<BumpProfile> {
    if !(r > 0.0 && r <= 0.25) {
        return Err(Error::param(format!("r = {r} outside (0, 1/4]")));
    }
    let unit = BumpProfile::new("rho", Shape::Bump { center: 1.0, half_width: r, scale: 1.0 });
    let scale = 0.5 * PI / first_inverse_moment(&unit);
    let mut rho = BumpProfile::new("rho", Shape::Bump { center: 1.0, half_width: r, scale });
    let moment = first_inverse_moment(&rho);
    let h0 = hilbert_pv(&rho, 0.0, 1e-14).value;
    rho.certificates = vec![
        Certificate { name: "inverse_moment".into(), residual: (moment - 0.5 * PI).abs() },
        Certificate { name: "h_rho_0".into(), residual: (h0 + 0.5).abs() },
    ];
    Ok(rho)
}

/// `φ(x) = ρ(-x) - ρ(x)`, odd with `Hφ(0) = 1`.
pub fn build_phi(rho: &BumpProfile) -> Result<BumpProfile> {
    let Shape::Bump { center, half_width, scale } = rho.shape else {
        return Err(Error::param("φ is built from a single bump"));
    };
    let mut phi = BumpProfile::new("phi", Shape::OddPair { center, half_width, scale });
    let h0 = hilbert_pv(&phi, 0.0, 1e-14).value;
    phi.certificates = vec![Certificate { name: "h_phi_0".into(), residual: (h0 - 1.0).abs() }];
    Ok(phi)
}

/// `ρ` and `φ` for a given `r` in one call.
pub fn reference_profile(r: f64) -> Result<BumpProfile> {
    build_phi(&build_bump(r)?)
}

fn radial_moment(f: &dyn SmoothFunction) -> f64 {
    f.support()
        .iter()
        .map(|&(a, b)| quad::adaptive(|r| r.powf(-11.0 / 12.0) * f.value(r), a, b, 1e-16).value)
        .sum()
}

/// Radial profile `φ(r) ≥ 0` on `[1-d, 1+d]` with
/// `(3B/4)∫ r^{-11/12} φ(r) dr = 1`, `B = B(25/24, 35/24)`.
pub fn build_phi3d(d: f64) -> Result<BumpProfile> {
    if !(d > 0.0 && d <= 0.25) {
        return Err(Error::param(format!("d = {d} outside (0, 1/4]")));
    }
    let b = special::beta_axis();
    let unit = BumpProfile::new("phi3d", Shape::Bump { center: 1.0, half_width: d, scale: 1.0 });
    let scale = 4.0 / (3.0 * b * radial_moment(&unit));
    let mut phi = BumpProfile::new("phi3d", Shape::Bump { center: 1.0, half_width: d, scale });
    let residual = (0.75 * b * radial_moment(&phi) - 1.0).abs();
    phi.certificates = vec![Certificate { name: "beta_normalization".into(), residual }];
    Ok(phi)
}

/// Vertical cutoff `ρ(z)`: even, 1 on `[-Z, Z]`, vanishing outside `[-2Z, 2Z]`.
pub fn build_rho_z(z: f64) -> Result<BumpProfile> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::param(format!("Z = {z} must be positive")));
    }
    Ok(BumpProfile::new("rho_z", Shape::Plateau { z }))
}

/// `ρ_z(z)|z|^{1/12} sgn z` without smoothing.
pub fn kink_profile(rho_z: &BumpProfile) -> Result<BumpProfile> {
    let Shape::Plateau { z } = rho_z.shape else {
        return Err(Error::param("expected a plateau profile"));
    };
    Ok(BumpProfile::new("kink", Shape::Kink { z }))
}

/// `ρ_k`: the kink with an odd quintic on `[-h_k, h_k]`, `h_k = ε_s e^{-6ak}`,
/// matching value and two derivatives at `±h_k`.
pub fn smooth_rho(rho_z: &BumpProfile, k: u32, eps_s: f64, a: f64) -> Result<BumpProfile> {
    let Shape::Plateau { z } = rho_z.shape else {
        return Err(Error::param("expected a plateau profile"));
    };
    if !(eps_s > 0.0 && a > 0.0) {
        return Err(Error::param(format!("need ε_s > 0 and a > 0, got {eps_s}, {a}")));
    }
    let h = eps_s * (-6.0 * a * k as f64).exp();
    if h >= z {
        return Err(Error::Precondition(format!("smoothing window h = {h} is not below Z = {z}")));
    }
    let g = BumpProfile::new("kink", Shape::Kink { z }).jet(h);
    let (g0, g1, g2) = (g.derivative(0), g.derivative(1), g.derivative(2));
    // c1 h + c3 h³ + c5 h⁵ = g0, c1 + 3c3 h² + 5c5 h⁴ = g1, 6c3 h + 20c5 h³ = g2
    let e1 = g0 - g1 * h;
    let e2 = g2 * h * h;
    let c5 = (e2 + 3.0 * e1) / (8.0 * h.powi(5));
    let c3 = (e2 - 20.0 * c5 * h.powi(5)) / (6.0 * h.powi(3));
    let c1 = g1 - 3.0 * c3 * h * h - 5.0 * c5 * h.powi(4);
    let mut rho_k = BumpProfile::new(format!("rho_{k}"), Shape::Smoothed { z, h, c1, c3, c5 });
    let q = odd_quintic(Jet::var(h), c1, c3, c5);
    let seam = (0..3).map(|m| (q.derivative(m) - g.derivative(m)).abs() * h.powf(m as f64 - 1.0 / 12.0));
    rho_k.certificates = vec![Certificate { name: "seam".into(), residual: seam.fold(0.0, f64::max) }];
    Ok(rho_k)
}

/// The smoothing perturbation integral against its bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingCheck {
    pub k_scale: f64,
    pub h: f64,
    /// `∬ r²zφ(r)|ρ(Kz)(Kz)^{1/12} - ρ_k(Kz)|/(z²+r²)^{5/2}` over `r, z > 0`.
    pub integral: f64,
    /// `16 h^{25/12}/(25K²B)`.
    pub bound: f64,
    /// `∫φ(r)/r³ dr`, the radial weight the bound replaces by `4/(3B)`.
    pub radial_weight: f64,
    pub holds: bool,
}

/// Evaluates the smoothing perturbation integral at `K` by nested adaptive
/// quadrature and compares it with `16h^{25/12}/(25K²B)`.
pub fn smoothing_certificate(rho_k: &BumpProfile, phi: &BumpProfile, k_scale: f64) -> Result<SmoothingCheck> {
    let Shape::Smoothed { z, h, .. } = rho_k.shape else {
        return Err(Error::param("expected a smoothed profile"));
    };
    if !(k_scale > 0.0) {
        return Err(Error::param("K must be positive"));
    }
    let kink = BumpProfile::new("kink", Shape::Kink { z });
    let (ra, rb) = phi.support_pieces()[0];
    let radial = |zz: f64| {
        quad::adaptive(|r| r * r * phi.value(r) / (zz * zz + r * r).powf(2.5), ra, rb, 1e-15).value
    };
    let top = h / k_scale;
    let integral = quad::adaptive(
        |zz| {
            let s = k_scale * zz;
            let diff = (kink.value(s) - rho_k.value(s)).abs();
            if diff == 0.0 {
                0.0
            } else {
                zz * diff * radial(zz)
            }
        },
        0.0,
        top,
        1e-15 * top.powf(25.0 / 12.0).max(1e-300),
    )
    .value;
    let b = special::beta_axis();
    let bound = 16.0 * h.powf(25.0 / 12.0) / (25.0 * k_scale * k_scale * b);
    let radial_weight = quad::adaptive(|r| phi.value(r) / r.powi(3), ra, rb, 1e-15).value;
    Ok(SmoothingCheck { k_scale, h, integral, bound, radial_weight, holds: integral <= bound })
}

/// Samples `max|φ|`, `max|Hφ|`, `max|Φ|`, `‖φ'‖₂`, `‖φ''‖₂` and `‖φ‖₁`.
pub fn phi_norms(phi: &BumpProfile) -> Result<PhiNorms> {
    let pieces = phi.support_pieces();
    let mut pts: Vec<f64> = pieces.iter().flat_map(|&(a, b)| [a, b]).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let l2 = |order: usize| {
        quad::adaptive_pieces(|x| phi.derivative(x, order).powi(2), &pts, 1e-15).value.sqrt()
    };
    let l1_phi = quad::adaptive_pieces(|x| phi.value(x).abs(), &pts, 1e-15).value;
    let mut max_phi = 0.0f64;
    for &(a, b) in &pieces {
        let n = 4000;
        let (mut best, mut at) = (0.0f64, a);
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            if phi.value(x).abs() > best {
                best = phi.value(x).abs();
                at = x;
            }
        }
        for _ in 0..8 {
            let d2 = phi.derivative(at, 2);
            if d2 == 0.0 {
                break;
            }
            at = (at - phi.derivative(at, 1) / d2).clamp(a, b);
        }
        max_phi = max_phi.max(best).max(phi.value(at).abs());
    }
    let reach = pts.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let field = Field1D::from_fn(-4.0 * reach, 4.0 * reach, (1 << 15) + 1, |x| phi.value(x))?;
    let vel = velocity_from_w(&field)?;
    Ok(PhiNorms {
        max_phi,
        max_hphi: vel.hw.sup_norm(),
        max_big_phi: vel.u.sup_norm(),
        d1_l2: l2(1),
        d2_l2: l2(2),
        l1_phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_values_match_the_jets() {
        let rz = build_rho_z(2.0).unwrap();
        let profiles = [
            reference_profile(0.2).unwrap(),
            build_bump(0.2).unwrap(),
            build_phi3d(0.1).unwrap(),
            rz.clone(),
            kink_profile(&rz).unwrap(),
            smooth_rho(&rz, 2, 0.1, 0.3).unwrap(),
        ];
        for p in &profiles {
            for i in 0..=4000 {
                let x = -4.5 + 9.0 * i as f64 / 4000.0;
                let inside = p.support_pieces().iter().any(|&(a, b)| x > a && x < b);
                let jet = if inside { p.jet(x).value() } else { 0.0 };
                let v = p.value(x);
                assert!((v - jet).abs() <= 1e-14 * jet.abs().max(1e-300) + 1e-300, "{} at {x}: {v} vs {jet}", p.name);
            }
        }
    }

    #[test]
    fn bump_normalization_is_recomputable() {
        for &r in &[0.05, 0.15, 0.25] {
            let rho = build_bump(r).unwrap();
            assert!(rho.worst_residual() < 1e-10, "{:?}", rho.certificates);
            let h0 = hilbert_pv(&rho, 0.0, 1e-13).value;
            assert!((h0 + 0.5).abs() < 1e-8, "Hρ(0) = {h0}");
            for i in 0..20 {
                let s = r * i as f64 / 20.0;
                // 1 ± s rounds differently, so equality holds to a few ulps of x
                assert!((rho.value(1.0 + s) - rho.value(1.0 - s)).abs() < 1e-13 * rho.value(1.0));
                assert!(rho.value(1.0 + s) >= 0.0);
            }
            assert_eq!(rho.value(1.0 + r), 0.0);
            assert_eq!(rho.value(1.0 - r - 1e-9), 0.0);
        }
    }

    #[test]
    fn rho_l1_norm_sits_near_half_pi() {
        // ∫ρ/y = π/2 with y ∈ [1-r, 1+r] pins ‖ρ‖₁ to [(1-r)π/2, (1+r)π/2]
        let r = 0.2;
        let rho = build_bump(r).unwrap();
        let l1 = quad::adaptive(|x| rho.value(x), 1.0 - r, 1.0 + r, 1e-14).value;
        assert!(l1 >= (1.0 - r) * 0.5 * PI && l1 <= (1.0 + r) * 0.5 * PI, "{l1}");
        assert!(l1 > 1.0);
    }

    #[test]
    fn phi_is_odd_with_unit_hilbert_at_origin() {
        let phi = reference_profile(0.2).unwrap();
        assert_eq!(phi.value(0.0), 0.0);
        assert!((hilbert_pv(&phi, 0.0, 1e-13).value - 1.0).abs() < 1e-8);
        for i in 1..50 {
            let x = 0.8 + 0.4 * i as f64 / 50.0;
            assert!(phi.value(x) < 0.0);
            assert_eq!(phi.value(-x), -phi.value(x));
        }
    }

    #[test]
    fn derivatives_converge_at_second_order() {
        let phi = reference_profile(0.2).unwrap();
        let x = 1.07;
        for order in 0..4 {
            let err = |h: f64| {
                let fd = (phi.derivative(x + h, order) - phi.derivative(x - h, order)) / (2.0 * h);
                (fd - phi.derivative(x, order + 1)).abs()
            };
            let ratio = err(1e-3) / err(5e-4);
            assert!((ratio - 4.0).abs() < 0.2, "order {order}: ratio {ratio}");
        }
    }

    #[test]
    fn phi3d_normalization() {
        for &d in &[0.01, 0.1, 0.25] {
            let phi = build_phi3d(d).unwrap();
            assert!(phi.worst_residual() < 1e-10);
            let b = special::beta_axis();
            let m = radial_moment(&phi);
            assert!((0.75 * b * m - 1.0).abs() < 1e-10);
        }
        assert!(build_phi3d(0.3).is_err());
    }

    #[test]
    fn phi3d_mass_approaches_moment_as_support_shrinks() {
        let phi = build_phi3d(1e-3).unwrap();
        let mass = quad::adaptive(|r| phi.value(r), 1.0 - 1e-3, 1.0 + 1e-3, 1e-15).value;
        assert!((mass / radial_moment(&phi) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn plateau_shape() {
        let rz = build_rho_z(1.5).unwrap();
        assert_eq!(rz.value(0.0), 1.0);
        assert_eq!(rz.value(1.5), 1.0);
        assert_eq!(rz.value(-3.0), 0.0);
        for i in 0..100 {
            let z = -3.2 + 6.4 * i as f64 / 100.0;
            let v = rz.value(z);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, rz.value(-z));
        }
    }

    #[test]
    fn smoothed_rho_is_odd_and_matches_outside_window() {
        let rz = build_rho_z(1.0).unwrap();
        let kink = kink_profile(&rz).unwrap();
        for k in 0..6 {
            let rk = smooth_rho(&rz, k, 0.1, 0.3).unwrap();
            let Shape::Smoothed { h, .. } = rk.shape else { unreachable!() };
            assert!(rk.worst_residual() < 1e-12, "{:?}", rk.certificates);
            for i in 0..40 {
                let z = h * (0.05 + 3.0 * i as f64 / 40.0);
                assert_eq!(rk.value(-z), -rk.value(z));
                if z > h {
                    assert_eq!(rk.value(z), kink.value(z));
                }
            }
            let below = rk.value(h * (1.0 - 1e-9));
            assert!((below - kink.value(h)).abs() < 1e-9 * kink.value(h));
        }
        assert!(smooth_rho(&rz, 0, 2.0, 0.3).is_err());
    }

    #[test]
    fn smoothing_integral_respects_its_bound() {
        let rz = build_rho_z(1.0).unwrap();
        let phi = build_phi3d(0.1).unwrap();
        let a = 0.3;
        for k in 0..6u32 {
            let rk = smooth_rho(&rz, k, 0.1, a).unwrap();
            let kk = (-6.0 * a * k as f64).exp();
            let c = smoothing_certificate(&rk, &phi, kk).unwrap();
            assert!(c.holds, "k = {k}: {c:?}");
        }
    }

    #[test]
    fn reference_norms_are_finite_and_consistent() {
        let phi = reference_profile(0.2).unwrap();
        let n = phi_norms(&phi).unwrap();
        assert!(n.max_hphi >= 1.0 - 1e-9);
        assert!(n.max_phi > 0.0 && n.d1_l2 > 0.0 && n.d2_l2 > n.d1_l2);
        assert!(n.l1_phi > 0.8 * PI && n.l1_phi < 1.2 * PI);
        assert!(n.max_big_phi > 0.0 && n.max_big_phi.is_finite());
    }

    #[test]
    fn descriptor_round_trips() {
        let phi = reference_profile(0.2).unwrap();
        let back: BumpProfile = serde_json::from_str(&phi.to_json().unwrap()).unwrap();
        assert_eq!(back, phi);
    }
}
